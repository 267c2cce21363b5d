//! The (K,d) regular partially connected edge network.
//!
//! There are `K` edge nodes (ENs) and `K` users. EN `i` reaches users
//! `i, i+1, ..., i+d-1` and user `j` hears ENs `j-d+1, ..., j`, all indices
//! taken cyclically in `1..=K`. Every public index in this crate is 1-based.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Topology {
    k: usize,
    d: usize,
}

impl Topology {
    pub fn new(k: usize, d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::Topology(format!("d = {d} violates d >= 1")));
        }
        if d > k {
            return Err(Error::Topology(format!("d = {d} violates d <= k = {k}")));
        }
        Ok(Topology { k, d })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Maps any (possibly zero or negative) integer onto `1..=K`.
    pub fn wrap(&self, x: i64) -> usize {
        let k = self.k as i64;
        ((x - 1).rem_euclid(k) + 1) as usize
    }

    fn check(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.k {
            Err(Error::IndexOutOfRange { index, k: self.k })
        } else {
            Ok(())
        }
    }

    /// Users reached by EN `i`, in cyclic order starting at `i`.
    pub fn receivers(&self, i: usize) -> Result<Vec<usize>> {
        self.check(i)?;
        Ok((0..self.d).map(|o| self.wrap((i + o) as i64)).collect())
    }

    /// ENs heard by user `j`, in cyclic order ending at `j`.
    pub fn transmitters(&self, j: usize) -> Result<Vec<usize>> {
        self.check(j)?;
        let first = j as i64 - self.d as i64 + 1;
        Ok((0..self.d as i64).map(|o| self.wrap(first + o)).collect())
    }

    /// Whether EN `en` is connected to user `user`. Both must be in range.
    pub fn connected(&self, en: usize, user: usize) -> bool {
        // user - en (mod K) must lie in 0..d
        let diff = (user as i64 - en as i64).rem_euclid(self.k as i64) as usize;
        diff < self.d
    }

    pub fn is_fully_connected(&self) -> bool {
        self.d == self.k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_network() {
        let t = Topology::new(5, 2).unwrap();
        assert_eq!(t.receivers(1).unwrap(), vec![1, 2]);
        assert_eq!(t.transmitters(3).unwrap(), vec![2, 3]);
        assert_eq!(t.receivers(5).unwrap(), vec![5, 1]);
    }

    #[test]
    fn rejects_bad_degree() {
        assert!(matches!(Topology::new(3, 5), Err(Error::Topology(m)) if m.contains("d <= k")));
        assert!(matches!(Topology::new(3, 0), Err(Error::Topology(m)) if m.contains("d >= 1")));
    }

    #[test]
    fn fully_connected_is_representable() {
        let t = Topology::new(4, 4).unwrap();
        assert!(t.is_fully_connected());
        assert_eq!(t.receivers(3).unwrap(), vec![3, 4, 1, 2]);
    }

    #[test]
    fn wraparound() {
        let t = Topology::new(8, 2).unwrap();
        assert_eq!(t.receivers(8).unwrap(), vec![8, 1]);
        assert_eq!(t.transmitters(1).unwrap(), vec![8, 1]);
        let t = Topology::new(11, 4).unwrap();
        assert_eq!(t.receivers(7).unwrap(), vec![7, 8, 9, 10]);
    }

    #[test]
    fn degree_one_isolates_pairs() {
        let t = Topology::new(6, 1).unwrap();
        for j in 1..=6 {
            assert_eq!(t.transmitters(j).unwrap(), vec![j]);
        }
    }

    #[test]
    fn out_of_range_index() {
        let t = Topology::new(5, 2).unwrap();
        assert_eq!(t.receivers(0), Err(Error::IndexOutOfRange { index: 0, k: 5 }));
        assert!(t.transmitters(6).is_err());
    }

    #[test]
    fn duality_cardinality_and_shift() {
        for k in 1..=64 {
            for d in 1..=k {
                let t = Topology::new(k, d).unwrap();
                for i in 1..=k {
                    let rx = t.receivers(i).unwrap();
                    assert_eq!(rx.len(), d);
                    assert_eq!(t.transmitters(i).unwrap().len(), d);
                    for j in 1..=k {
                        let forward = rx.contains(&j);
                        let backward = t.transmitters(j).unwrap().contains(&i);
                        assert_eq!(forward, backward, "k={k} d={d} i={i} j={j}");
                        assert_eq!(forward, t.connected(i, j));
                    }
                    let next = t.receivers(t.wrap(i as i64 + 1)).unwrap();
                    let shifted: Vec<_> = rx.iter().map(|&u| t.wrap(u as i64 + 1)).collect();
                    assert_eq!(next, shifted);
                }
            }
        }
    }
}
