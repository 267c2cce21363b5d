//! Exhaustive reference searches for small networks.
//!
//! A slot activates a subset of ENs; each active EN addresses one user it
//! reaches with the subfile type it holds for that user, and every addressed
//! user must hear no other active EN. Deliveries are tracked as a bitmask over
//! `(user, type)` pairs, bit `(user - 1) * d + (type - 1)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scheduler::type_between;
use crate::topology::Topology;

pub const MAX_SEARCH_K: usize = 8;
pub const MAX_SEARCH_D: usize = 3;
pub const MAX_CONCURRENT_K: usize = 12;

/// Delivered `(user, type)` pairs so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeliveryState {
    pub delivered: u64,
    pub slots_used: usize,
}

fn bit(t: &Topology, user: usize, tau: usize) -> u64 {
    1 << ((user - 1) * t.d() + (tau - 1))
}

/// For a set of active ENs, the users each EN could serve without collision.
fn options(t: &Topology, active: u32) -> Option<Vec<(usize, Vec<usize>)>> {
    let is_active = |en: usize| active & (1 << (en - 1)) != 0;
    let mut out = Vec::new();
    for en in (1..=t.k()).filter(|&e| is_active(e)) {
        let users: Vec<usize> = t
            .receivers(en)
            .expect("en in range")
            .into_iter()
            .filter(|&u| {
                t.transmitters(u)
                    .expect("user in range")
                    .iter()
                    .all(|&e| e == en || !is_active(e))
            })
            .collect();
        if users.is_empty() {
            // an active EN serving nobody is pure interference; the same
            // deliveries are reachable with it silent
            return None;
        }
        out.push((en, users));
    }
    Some(out)
}

/// Every inclusion-maximal set of deliveries a single slot can make.
fn maximal_slot_masks(t: &Topology) -> Vec<u64> {
    let mut masks = Vec::new();
    for active in 1u32..(1 << t.k()) {
        let Some(opts) = options(t, active) else { continue };
        let mut partial = vec![0u64];
        for (en, users) in &opts {
            let mut next = Vec::with_capacity(partial.len() * users.len());
            for &m in &partial {
                for &u in users {
                    let tau = type_between(t, *en, u).expect("connected");
                    next.push(m | bit(t, u, tau));
                }
            }
            partial = next;
        }
        masks.extend(partial);
    }
    masks.sort_unstable();
    masks.dedup();
    // drop masks strictly contained in another; silencing an EN never creates
    // a collision, so subsets of a feasible slot are feasible
    masks.sort_unstable_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let mut maximal: Vec<u64> = Vec::new();
    for m in masks {
        if !maximal.iter().any(|&big| big & m == m) {
            maximal.push(m);
        }
    }
    maximal
}

/// Largest number of collision-free deliveries in one slot.
pub fn max_concurrent(t: &Topology) -> Result<usize> {
    if t.k() > MAX_CONCURRENT_K {
        return Err(Error::Oracle(format!("K = {} exceeds search limit {MAX_CONCURRENT_K}", t.k())));
    }
    let best = (1u32..(1 << t.k()))
        .filter(|&a| options(t, a).is_some())
        .map(|a| a.count_ones() as usize)
        .max()
        .unwrap_or(0);
    Ok(best)
}

struct Search {
    masks: Vec<u64>,
    goal: u64,
    per_slot: u32,
    /// Largest remaining slot allowance already shown insufficient.
    failed: HashMap<u64, usize>,
}

impl Search {
    fn feasible(&mut self, state: DeliveryState, depth: usize) -> bool {
        let delivered = state.delivered;
        if delivered == self.goal {
            return true;
        }
        let remaining = depth - state.slots_used;
        if remaining == 0 {
            return false;
        }
        let missing = self.goal & !delivered;
        if missing.count_ones() > self.per_slot * remaining as u32 {
            return false;
        }
        if self.failed.get(&delivered).is_some_and(|&r| r >= remaining) {
            return false;
        }
        // Some slot must deliver the lowest missing pair; slot order is free.
        let lowest = missing & missing.wrapping_neg();
        for i in 0..self.masks.len() {
            let m = self.masks[i];
            let next = DeliveryState { delivered: delivered | m, slots_used: state.slots_used + 1 };
            if m & lowest != 0 && self.feasible(next, depth) {
                return true;
            }
        }
        let entry = self.failed.entry(delivered).or_insert(0);
        *entry = (*entry).max(remaining);
        false
    }
}

/// Minimum number of collision-free slots that deliver every user all `d`
/// types, by iterative deepening up to `slot_budget`.
pub fn min_slots(t: &Topology, slot_budget: usize) -> Result<usize> {
    if t.k() > MAX_SEARCH_K || t.d() > MAX_SEARCH_D {
        return Err(Error::Oracle(format!(
            "(K,d) = ({},{}) exceeds search limits K <= {MAX_SEARCH_K}, d <= {MAX_SEARCH_D}",
            t.k(),
            t.d()
        )));
    }
    if slot_budget == 0 {
        return Err(Error::Oracle("slot budget must be at least 1".into()));
    }
    let bits = t.k() * t.d();
    let mut search = Search {
        masks: maximal_slot_masks(t),
        goal: if bits == 64 { u64::MAX } else { (1 << bits) - 1 },
        per_slot: max_concurrent(t)? as u32,
        failed: HashMap::new(),
    };
    for depth in 1..=slot_budget {
        if search.feasible(DeliveryState { delivered: 0, slots_used: 0 }, depth) {
            return Ok(depth);
        }
    }
    Err(Error::Oracle(format!("no schedule within {slot_budget} slots")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(k: usize, d: usize) -> Topology {
        Topology::new(k, d).unwrap()
    }

    #[test]
    fn degree_one() {
        for k in 1..=8 {
            assert_eq!(min_slots(&topo(k, 1), 3).unwrap(), 1);
            assert_eq!(max_concurrent(&topo(k, 1)).unwrap(), k);
        }
    }

    #[test]
    fn concurrency_of_examples() {
        // One more than the constructed schedule's 4: two 3-EN blocks plus a
        // lone EN whose successor is silent.
        assert_eq!(max_concurrent(&topo(8, 2)).unwrap(), 5);
        let t = topo(8, 2);
        let witness = crate::scheduler::Schedule {
            topology: t,
            slots: vec![crate::scheduler::Slot {
                time: 1,
                stage: 1,
                phase: 1,
                transmissions: [(1, 1, 1), (2, 3, 2), (4, 4, 1), (6, 6, 1), (7, 8, 2)]
                    .iter()
                    .map(|&(en, user, tau)| crate::scheduler::Transmission { en, user, file_id: 1, tau })
                    .collect(),
            }],
        };
        assert_eq!(crate::validator::check_collisions(&t, &witness), Ok(()));
        assert_eq!(max_concurrent(&topo(11, 4)).unwrap(), 4);
    }

    #[test]
    fn guards() {
        assert!(min_slots(&topo(9, 2), 10).is_err());
        assert!(min_slots(&topo(8, 4), 10).is_err());
        assert!(min_slots(&topo(5, 2), 0).is_err());
        assert!(max_concurrent(&topo(13, 2)).is_err());
        // (5,2) needs at least ceil(10/3) slots
        assert!(min_slots(&topo(5, 2), 2).is_err());
    }

    #[test]
    fn small_instances_respect_counting_bound() {
        for (k, d) in [(4, 2), (5, 2), (6, 2), (4, 3), (5, 3)] {
            let t = topo(k, d);
            let v = min_slots(&t, 12).unwrap();
            let per = max_concurrent(&t).unwrap();
            assert!(v >= (k * d).div_ceil(per), "k={k} d={d}");
            assert!(v <= crate::scheduler::slot_count(k, d), "k={k} d={d}");
        }
    }
}
