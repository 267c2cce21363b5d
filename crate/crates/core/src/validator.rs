//! Independent checks of a schedule under the deterministic collision model:
//! a user decodes a slot iff exactly one of its connected ENs is active and
//! that EN is the one addressing it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::analysis::prop1_bound;
use crate::field::PrimeField;
use crate::placement::{self, decode, encode, DemandVector, Library, PlacementScheme};
use crate::rational::{fraction, rat, Rational};
use crate::scheduler::{type_between, Schedule};
use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateEn { slot: usize, en: usize },
    NotConnected { slot: usize, en: usize, user: usize },
    WrongType { slot: usize, en: usize, user: usize, tau: usize, expected: usize },
    /// `interferers` are the other active ENs `user` hears.
    Collision { slot: usize, user: usize, interferers: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateEn { slot, en } => write!(f, "violation slot={slot} en={en} kind=duplicate-en"),
            Violation::NotConnected { slot, en, user } => {
                write!(f, "violation slot={slot} en={en} ue={user} kind=not-connected")
            }
            Violation::WrongType { slot, en, user, tau, expected } => write!(
                f,
                "violation slot={slot} en={en} ue={user} kind=wrong-type type={tau} expected={expected}"
            ),
            Violation::Collision { slot, user, interferers } => {
                let ens: Vec<String> = interferers.iter().map(usize::to_string).collect();
                write!(f, "violation slot={slot} ue={user} kind=collision interferers={}", ens.join(","))
            }
        }
    }
}

pub fn check_collisions(t: &Topology, sched: &Schedule) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    for slot in &sched.slots {
        let mut active = BTreeSet::new();
        for tx in &slot.transmissions {
            if !active.insert(tx.en) {
                violations.push(Violation::DuplicateEn { slot: slot.time, en: tx.en });
            }
        }
        for tx in &slot.transmissions {
            let in_range = |x: usize| (1..=t.k()).contains(&x);
            let expected = if in_range(tx.en) && in_range(tx.user) {
                type_between(t, tx.en, tx.user)
            } else {
                None
            };
            let Some(expected) = expected else {
                violations.push(Violation::NotConnected { slot: slot.time, en: tx.en, user: tx.user });
                continue;
            };
            if expected != tx.tau {
                violations.push(Violation::WrongType {
                    slot: slot.time,
                    en: tx.en,
                    user: tx.user,
                    tau: tx.tau,
                    expected,
                });
            }
            let heard = t.transmitters(tx.user).expect("user index checked by connectivity");
            let interferers: Vec<usize> =
                heard.into_iter().filter(|&e| e != tx.en && active.contains(&e)).collect();
            if !interferers.is_empty() {
                violations.push(Violation::Collision { slot: slot.time, user: tx.user, interferers });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incomplete {
    pub user: usize,
    pub missing: BTreeSet<usize>,
    /// Rank of the generator columns of the ENs the user heard from.
    pub rank: usize,
}

/// Distinct source ENs each user received from, indexed by `user - 1`.
pub fn sources_per_user(t: &Topology, sched: &Schedule) -> Vec<BTreeSet<usize>> {
    let mut sources = vec![BTreeSet::new(); t.k()];
    for (_, tx) in sched.transmissions() {
        if (1..=t.k()).contains(&tx.user) {
            sources[tx.user - 1].insert(tx.en);
        }
    }
    sources
}

/// Every user must collect all `d` types. The rank of the corresponding
/// generator columns is checked as well, against the default Vandermonde
/// placement.
pub fn check_completeness(t: &Topology, sched: &Schedule) -> Result<(), Vec<Incomplete>> {
    let scheme = placement::build_placement(t, PrimeField::default())
        .expect("default field exceeds any practical K");
    check_completeness_with(t, &scheme, sched)
}

pub fn check_completeness_with(
    t: &Topology,
    scheme: &PlacementScheme,
    sched: &Schedule,
) -> Result<(), Vec<Incomplete>> {
    let mut types = vec![BTreeSet::new(); t.k()];
    for (_, tx) in sched.transmissions() {
        if (1..=t.k()).contains(&tx.user) {
            types[tx.user - 1].insert(tx.tau);
        }
    }
    let sources = sources_per_user(t, sched);
    let all: BTreeSet<usize> = (1..=t.d()).collect();
    let mut bad = Vec::new();
    for user in 1..=t.k() {
        let missing: BTreeSet<usize> = all.difference(&types[user - 1]).copied().collect();
        let rank = placement::decodability_rank(scheme, &sources[user - 1]).unwrap_or(0);
        // complete types imply full rank for an MDS generator, and vice versa
        if !missing.is_empty() || rank != t.d() {
            bad.push(Incomplete { user, missing, rank });
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdtReport {
    pub slots: usize,
    pub deliveries: usize,
    pub sum_dof: Rational,
    pub ndt_exact: Rational,
    pub ndt_bound: Rational,
}

impl NdtReport {
    /// `ndt=<num>/<den> dof=<num>/<den> slots=<S> deliveries=<D>`
    pub fn line(&self) -> String {
        format!(
            "ndt={} dof={} slots={} deliveries={}",
            fraction(&self.ndt_exact),
            fraction(&self.sum_dof),
            self.slots,
            self.deliveries
        )
    }
}

/// Each interference-free slot carries `F/d` bits, so `S` slots take `S/d`
/// normalized time units.
pub fn measure(t: &Topology, sched: &Schedule) -> NdtReport {
    let slots = sched.slots.len();
    let deliveries = sched.deliveries();
    NdtReport {
        slots,
        deliveries,
        sum_dof: rat(deliveries as i64, slots.max(1) as i64),
        ndt_exact: rat(slots as i64, t.d() as i64),
        ndt_bound: prop1_bound(t.d()).expect("topology has d >= 1"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeliveryError {
    #[error("{} collision-model violations, first: {}", .0.len(), .0[0])]
    Collisions(Vec<Violation>),
    #[error("{} users cannot decode, first: user {}", .0.len(), .0[0].user)]
    Incomplete(Vec<Incomplete>),
    #[error("user {user} was sent file {sent} but demands file {demanded}")]
    WrongFile { user: usize, sent: usize, demanded: usize },
    #[error("encoding failed: {0}")]
    Encode(crate::error::Error),
    #[error("user {user}: {source}")]
    Placement { user: usize, source: crate::error::Error },
    #[error("user {user} decoded a file that differs from file {file_id}")]
    Mismatch { user: usize, file_id: usize },
}

/// Runs the whole pipeline: checks the schedule, encodes the library, hands
/// every user the coded subfiles addressed to it and decodes them.
/// Returns each user's decoded payload, indexed by `user - 1`.
pub fn simulate_delivery(
    t: &Topology,
    scheme: &PlacementScheme,
    library: &Library,
    demands: &DemandVector,
    sched: &Schedule,
) -> Result<Vec<Vec<u8>>, DeliveryError> {
    check_collisions(t, sched).map_err(DeliveryError::Collisions)?;
    check_completeness_with(t, scheme, sched).map_err(DeliveryError::Incomplete)?;
    let cache = encode(scheme, library).map_err(DeliveryError::Encode)?;

    let mut received: BTreeMap<usize, BTreeMap<usize, &placement::CodedSubfile>> = BTreeMap::new();
    for (_, tx) in sched.transmissions() {
        let demanded = demands.of(tx.user);
        if tx.file_id != demanded {
            return Err(DeliveryError::WrongFile { user: tx.user, sent: tx.file_id, demanded });
        }
        let part = cache.get(&(tx.en, tx.file_id)).ok_or_else(|| DeliveryError::Placement {
            user: tx.user,
            source: crate::error::Error::Library(format!("EN {} holds nothing of file {}", tx.en, tx.file_id)),
        })?;
        received.entry(tx.user).or_default().insert(tx.en, part);
    }

    (1..=t.k())
        .map(|user| {
            let file_id = demands.of(user);
            let parts: Vec<_> = received
                .get(&user)
                .map(|m| m.values().take(t.d()).map(|&p| p.clone()).collect())
                .unwrap_or_default();
            let decoded =
                decode(scheme, file_id, &parts).map_err(|source| DeliveryError::Placement { user, source })?;
            let expected = library
                .file(file_id)
                .map_err(|source| DeliveryError::Placement { user, source })?;
            if decoded != expected {
                return Err(DeliveryError::Mismatch { user, file_id });
            }
            Ok(decoded)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::scheduler::{build_schedule, Slot, Transmission};

    fn schedule(k: usize, d: usize) -> (Topology, Schedule) {
        let t = Topology::new(k, d).unwrap();
        let s = build_schedule(&t, &DemandVector::canonical(k, 4).unwrap()).unwrap();
        (t, s)
    }

    fn hand_slot(t: Topology, txs: &[(usize, usize, usize)]) -> Schedule {
        Schedule {
            topology: t,
            slots: vec![Slot {
                time: 1,
                stage: 1,
                phase: 1,
                transmissions: txs
                    .iter()
                    .map(|&(en, user, tau)| Transmission { en, user, file_id: 1, tau })
                    .collect(),
            }],
        }
    }

    #[test]
    fn constructed_schedules_are_clean() {
        for (k, d) in [(8, 2), (11, 4), (9, 2), (5, 1)] {
            let (t, s) = schedule(k, d);
            assert_eq!(check_collisions(&t, &s), Ok(()));
            assert_eq!(check_completeness(&t, &s), Ok(()));
        }
    }

    #[test]
    fn adjacent_ens_collide() {
        let t = Topology::new(8, 2).unwrap();
        let s = hand_slot(t, &[(1, 1, 1), (8, 8, 1)]);
        let v = check_collisions(&t, &s).unwrap_err();
        assert_eq!(v, vec![Violation::Collision { slot: 1, user: 1, interferers: vec![8] }]);
        assert_eq!(v[0].to_string(), "violation slot=1 ue=1 kind=collision interferers=8");
    }

    #[test]
    fn structural_violations() {
        let t = Topology::new(8, 2).unwrap();
        let s = hand_slot(t, &[(1, 1, 1), (1, 2, 2), (4, 7, 1), (5, 6, 1)]);
        let v = check_collisions(&t, &s).unwrap_err();
        assert!(v.contains(&Violation::DuplicateEn { slot: 1, en: 1 }));
        assert!(v.contains(&Violation::NotConnected { slot: 1, en: 4, user: 7 }));
        assert!(v.contains(&Violation::WrongType { slot: 1, en: 5, user: 6, tau: 1, expected: 2 }));
    }

    #[test]
    fn degree_one_all_active() {
        let t = Topology::new(7, 1).unwrap();
        let s = hand_slot(t, &(1..=7).map(|j| (j, j, 1)).collect::<Vec<_>>());
        assert_eq!(check_collisions(&t, &s), Ok(()));
        assert_eq!(check_completeness(&t, &s), Ok(()));
    }

    #[test]
    fn stage_one_only_misses_middle_types() {
        let (t, s) = schedule(11, 4);
        let bad = check_completeness(&t, &s.truncated_to_stage(1)).unwrap_err();
        assert_eq!(bad.len(), 11);
        for inc in bad {
            assert_eq!(inc.missing, BTreeSet::from([2, 3]));
            assert_eq!(inc.rank, 2);
        }
    }

    #[test]
    fn measurements() {
        let (t, s) = schedule(8, 2);
        let r = measure(&t, &s);
        assert_eq!((r.slots, r.deliveries), (5, 16));
        assert_eq!(r.sum_dof, rat(16, 5));
        assert_eq!(r.ndt_exact, rat(5, 2));
        assert_eq!(r.ndt_bound, int(3));
        assert_eq!(r.line(), "ndt=5/2 dof=16/5 slots=5 deliveries=16");

        let (t, s) = schedule(11, 4);
        let r = measure(&t, &s);
        assert_eq!((r.sum_dof, r.ndt_exact), (rat(11, 3), int(3)));

        let (t, s) = schedule(9, 2);
        let r = measure(&t, &s);
        assert_eq!((r.slots, r.deliveries, r.sum_dof, r.ndt_exact), (3, 18, int(6), rat(3, 2)));
    }

    #[test]
    fn same_file_for_everyone() {
        let t = Topology::new(11, 4).unwrap();
        let scheme = placement::build_placement(&t, PrimeField::default()).unwrap();
        let lib = Library::new(vec![vec![0xab; 33], vec![0x11; 33]]).unwrap();
        let demands = DemandVector::new(vec![2; 11], 2).unwrap();
        let s = build_schedule(&t, &demands).unwrap();
        let out = simulate_delivery(&t, &scheme, &lib, &demands, &s).unwrap();
        assert!(out.iter().all(|f| f == &vec![0x11; 33]));
    }

    #[test]
    fn demand_mismatch_is_reported() {
        let t = Topology::new(8, 2).unwrap();
        let scheme = placement::build_placement(&t, PrimeField::default()).unwrap();
        let lib = Library::new(vec![vec![1; 8], vec![2; 8]]).unwrap();
        let s = build_schedule(&t, &DemandVector::new(vec![1; 8], 2).unwrap()).unwrap();
        let other = DemandVector::new(vec![2; 8], 2).unwrap();
        let err = simulate_delivery(&t, &scheme, &lib, &other, &s).unwrap_err();
        assert!(matches!(err, DeliveryError::WrongFile { sent: 1, demanded: 2, .. }));
    }

    #[test]
    fn truncated_schedule_fails_delivery() {
        let t = Topology::new(11, 4).unwrap();
        let scheme = placement::build_placement(&t, PrimeField::default()).unwrap();
        let lib = Library::new(vec![vec![5; 16]]).unwrap();
        let demands = DemandVector::canonical(11, 1).unwrap();
        let s = build_schedule(&t, &demands).unwrap().truncated_to_stage(1);
        let err = simulate_delivery(&t, &scheme, &lib, &demands, &s).unwrap_err();
        assert!(matches!(err, DeliveryError::Incomplete(_)));
    }
}
