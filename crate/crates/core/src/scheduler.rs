//! Blind interference-avoidance delivery schedule.
//!
//! A user needs one coded subfile from each of its `d` connected ENs. The
//! subfile a user gets from EN `k - tau + 1` is called its type-`tau` subfile.
//! Stage `s` delivers types `s` and `d - s + 1` to every user. Blocks of `d + 1`
//! consecutive EN/user pairs are scheduled together: at each slot, for every
//! block offset `i`, EN `i` sends type `s` to user `i + s - 1` and EN `i + s`
//! sends type `d - s + 1` to user `i + d`. Phase 1 shifts the blocks through
//! `d + 1` slots; Phase 2 serves the `K mod (d + 1)` users the full blocks
//! missed, one offset per slot.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::placement::DemandVector;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transmission {
    pub en: usize,
    pub user: usize,
    pub file_id: usize,
    pub tau: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    /// 1-based position in the schedule.
    pub time: usize,
    pub stage: usize,
    pub phase: u8,
    /// Sorted by EN.
    pub transmissions: Vec<Transmission>,
}

impl Slot {
    pub fn active_ens(&self) -> BTreeSet<usize> {
        self.transmissions.iter().map(|t| t.en).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub topology: Topology,
    pub slots: Vec<Slot>,
}

impl Schedule {
    pub fn deliveries(&self) -> usize {
        self.slots.iter().map(|s| s.transmissions.len()).sum()
    }

    /// Keeps only the slots of stages `1..=last_stage`.
    pub fn truncated_to_stage(&self, last_stage: usize) -> Schedule {
        Schedule {
            topology: self.topology,
            slots: self.slots.iter().filter(|s| s.stage <= last_stage).cloned().collect(),
        }
    }

    pub fn transmissions(&self) -> impl Iterator<Item = (&Slot, &Transmission)> {
        self.slots.iter().flat_map(|s| s.transmissions.iter().map(move |t| (s, t)))
    }

    /// One line per transmission, sorted by `(slot, en)`:
    /// `slot=<t> stage=<s> phase=<p> en=<i> ue=<j> file=<f> type=<tau>`.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (slot, t) in self.transmissions() {
            writeln!(
                f,
                "slot={} stage={} phase={} en={} ue={} file={} type={}",
                slot.time, slot.stage, slot.phase, t.en, t.user, t.file_id, t.tau
            )?;
        }
        Ok(())
    }
}

/// Number of slots the construction uses for `(K,d)`.
pub fn slot_count(k: usize, d: usize) -> usize {
    if d == 1 {
        1
    } else {
        d.div_ceil(2) * ((d + 1) + k % (d + 1))
    }
}

/// EN holding user `user`'s type-`tau` subfile: `((user - tau) mod K) + 1`.
pub fn type_source(t: &Topology, user: usize, tau: usize) -> Result<usize> {
    if tau == 0 || tau > t.d() {
        return Err(Error::Domain(format!("type {tau} not in 1..={}", t.d())));
    }
    if user == 0 || user > t.k() {
        return Err(Error::IndexOutOfRange { index: user, k: t.k() });
    }
    Ok(t.wrap(user as i64 - tau as i64 + 1))
}

/// Type of the subfile EN `en` holds for user `user`; requires a connection.
pub fn type_between(t: &Topology, en: usize, user: usize) -> Option<usize> {
    t.connected(en, user)
        .then(|| (user as i64 - en as i64).rem_euclid(t.k() as i64) as usize + 1)
}

/// The two types stage `s` delivers: `(s, d - s + 1)`.
pub fn stage_types(s: usize, d: usize) -> Result<(usize, usize)> {
    let stages = d.div_ceil(2);
    if s == 0 || s > stages {
        return Err(Error::Domain(format!("stage {s} not in 1..={stages}")));
    }
    Ok((s, d - s + 1))
}

fn check_schedulable(t: &Topology) -> Result<()> {
    if t.d() >= 2 && t.k() < t.d() + 1 {
        return Err(Error::Unsupported(format!(
            "K = {} violates K >= d + 1 = {} required for d >= 2",
            t.k(),
            t.d() + 1
        )));
    }
    Ok(())
}

/// Block offsets used at within-stage slot `t` (1-based).
fn offsets(k: usize, d: usize, t: usize) -> Vec<usize> {
    let blocks = k / (d + 1);
    if t <= d + 1 {
        (0..blocks).map(|b| t + b * (d + 1)).collect()
    } else {
        vec![t + (blocks - 1) * (d + 1)]
    }
}

/// The pair of transmissions rooted at offset `i` in stage `s`, as
/// `(en, user, tau)` triples.
fn block_pair(t: &Topology, s: usize, i: usize) -> [(usize, usize, usize); 2] {
    let d = t.d();
    let i = i as i64;
    [
        (t.wrap(i), t.wrap(i + s as i64 - 1), s),
        (t.wrap(i + s as i64), t.wrap(i + d as i64), d - s + 1),
    ]
}

/// Users still missing each of stage `s`'s two types after Phase 1.
pub fn leftover_users(t: &Topology, s: usize) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
    if t.d() < 2 {
        return Err(Error::Domain("leftover users are defined for d >= 2".into()));
    }
    check_schedulable(t)?;
    stage_types(s, t.d())?;
    let mut missing_a: BTreeSet<usize> = (1..=t.k()).collect();
    let mut missing_b = missing_a.clone();
    for slot in 1..=t.d() + 1 {
        for i in offsets(t.k(), t.d(), slot) {
            let [(_, ua, _), (_, ub, _)] = block_pair(t, s, i);
            missing_a.remove(&ua);
            missing_b.remove(&ub);
        }
    }
    Ok((missing_a, missing_b))
}

/// Builds the full delivery schedule for the given demands.
pub fn build_schedule(t: &Topology, demands: &DemandVector) -> Result<Schedule> {
    if demands.len() != t.k() {
        return Err(Error::Demand(format!(
            "{} demands for {} users",
            demands.len(),
            t.k()
        )));
    }
    check_schedulable(t)?;
    let (k, d) = (t.k(), t.d());

    if d == 1 {
        let transmissions = (1..=k)
            .map(|j| Transmission { en: j, user: j, file_id: demands.of(j), tau: 1 })
            .collect();
        return Ok(Schedule {
            topology: *t,
            slots: vec![Slot { time: 1, stage: 1, phase: 1, transmissions }],
        });
    }

    let per_stage = (d + 1) + k % (d + 1);
    let mut slots = Vec::with_capacity(slot_count(k, d));
    for s in 1..=d.div_ceil(2) {
        for within in 1..=per_stage {
            let mut transmissions: Vec<Transmission> = offsets(k, d, within)
                .into_iter()
                .flat_map(|i| block_pair(t, s, i))
                .map(|(en, user, tau)| Transmission { en, user, file_id: demands.of(user), tau })
                .collect();
            transmissions.sort();
            slots.push(Slot {
                time: slots.len() + 1,
                stage: s,
                phase: if within <= d + 1 { 1 } else { 2 },
                transmissions,
            });
        }
    }
    Ok(Schedule { topology: *t, slots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(k: usize, d: usize) -> Schedule {
        let t = Topology::new(k, d).unwrap();
        build_schedule(&t, &DemandVector::canonical(k, k).unwrap()).unwrap()
    }

    fn pairs(slot: &Slot) -> Vec<(usize, usize, usize)> {
        slot.transmissions.iter().map(|t| (t.en, t.user, t.tau)).collect()
    }

    #[test]
    fn example_8_2() {
        let s = sched(8, 2);
        assert_eq!(s.slots.len(), 5);
        assert_eq!(s.deliveries(), 16);
        assert_eq!(pairs(&s.slots[0]), vec![(1, 1, 1), (2, 3, 2), (4, 4, 1), (5, 6, 2)]);
        assert_eq!(pairs(&s.slots[3]), vec![(7, 7, 1), (8, 1, 2)]);
        assert_eq!(pairs(&s.slots[4]), vec![(1, 2, 2), (8, 8, 1)]);
        assert_eq!(s.slots[3].phase, 2);
        // demands A..H map onto files 1..8
        assert_eq!(s.slots[0].transmissions[1].file_id, 3);
    }

    #[test]
    fn example_11_4() {
        let s = sched(11, 4);
        assert_eq!(s.slots.len(), 12);
        assert_eq!(s.deliveries(), 44);
        assert_eq!(pairs(&s.slots[0]), vec![(1, 1, 1), (2, 5, 4), (6, 6, 1), (7, 10, 4)]);
        assert_eq!(pairs(&s.slots[5]), vec![(1, 4, 4), (11, 11, 1)]);
        assert_eq!(pairs(&s.slots[6]), vec![(1, 2, 2), (3, 5, 3), (6, 7, 2), (8, 10, 3)]);
        assert_eq!(pairs(&s.slots[11]), vec![(2, 4, 3), (11, 1, 2)]);
        assert_eq!((s.slots[6].stage, s.slots[6].phase), (2, 1));
    }

    #[test]
    fn divisible_case_has_no_phase_two() {
        let s = sched(9, 2);
        assert_eq!(s.slots.len(), 3);
        assert_eq!(s.deliveries(), 18);
        assert!(s.slots.iter().all(|sl| sl.phase == 1));
    }

    #[test]
    fn degree_one_single_slot() {
        let s = sched(6, 1);
        assert_eq!(s.slots.len(), 1);
        assert_eq!(s.slots[0].transmissions.len(), 6);
        let lone = sched(1, 1);
        assert_eq!(lone.deliveries(), 1);
    }

    #[test]
    fn rejects_too_few_pairs() {
        let t = Topology::new(4, 4).unwrap();
        let err = build_schedule(&t, &DemandVector::canonical(4, 1).unwrap());
        assert!(matches!(err, Err(Error::Unsupported(m)) if m.contains("K >= d + 1")));
        let t = Topology::new(3, 3).unwrap();
        assert!(build_schedule(&t, &DemandVector::canonical(3, 1).unwrap()).is_err());
    }

    #[test]
    fn rejects_wrong_demand_length() {
        let t = Topology::new(8, 2).unwrap();
        assert!(build_schedule(&t, &DemandVector::canonical(7, 1).unwrap()).is_err());
    }

    #[test]
    fn type_sources() {
        let t = Topology::new(11, 4).unwrap();
        assert_eq!(type_source(&t, 5, 4).unwrap(), 2);
        for k in 1..=11 {
            assert_eq!(type_source(&t, k, 1).unwrap(), k);
        }
        assert!(type_source(&t, 5, 5).is_err());
        assert!(type_source(&t, 5, 0).is_err());
        let t = Topology::new(8, 2).unwrap();
        assert_eq!(type_source(&t, 1, 2).unwrap(), 8);
        assert_eq!(type_between(&t, 8, 1), Some(2));
        assert_eq!(type_between(&t, 3, 1), None);
    }

    #[test]
    fn stage_type_pairs() {
        assert_eq!(stage_types(1, 4).unwrap(), (1, 4));
        assert_eq!(stage_types(2, 4).unwrap(), (2, 3));
        assert_eq!(stage_types(2, 3).unwrap(), (2, 2));
        assert!(stage_types(3, 4).is_err());
        assert!(stage_types(0, 4).is_err());
    }

    #[test]
    fn leftovers() {
        let t = Topology::new(11, 4).unwrap();
        let (a, b) = leftover_users(&t, 1).unwrap();
        assert_eq!(a, BTreeSet::from([11]));
        assert_eq!(b, BTreeSet::from([4]));

        let t = Topology::new(9, 2).unwrap();
        let (a, b) = leftover_users(&t, 1).unwrap();
        assert!(a.is_empty() && b.is_empty());
    }

    #[test]
    fn phase_one_is_a_cyclic_shift() {
        for d in 2..=6 {
            for k in d + 1..=30 {
                let s = sched(k, d);
                let t = s.topology;
                for pair in s.slots.windows(2) {
                    if pair[0].stage != pair[1].stage || pair[1].phase != 1 {
                        continue;
                    }
                    let mut shifted: Vec<_> = pair[0]
                        .transmissions
                        .iter()
                        .map(|x| (t.wrap(x.en as i64 + 1), t.wrap(x.user as i64 + 1), x.tau))
                        .collect();
                    shifted.sort();
                    let mut next = pairs(&pair[1]);
                    next.sort();
                    assert_eq!(shifted, next, "k={k} d={d} slot={}", pair[1].time);
                }
            }
        }
    }

    #[test]
    fn dump_format() {
        let s = sched(8, 2);
        let dump = s.dump();
        let first = dump.lines().next().unwrap();
        assert_eq!(first, "slot=1 stage=1 phase=1 en=1 ue=1 file=1 type=1");
        assert_eq!(dump.lines().count(), 16);
        assert!(dump.ends_with('\n'));
    }
}
