//! Closed-form normalized delivery times (NDTs).
//!
//! The edge NDT of the coded scheme is `2(d+1)ceil(d/2)/d` (1 for `d = 1`).
//! The benchmark caches whole files (or `(K,2)`-MDS pieces) and achieves
//! `(d+1)/2`. With fronthaul pre-log `r`, the cloud first ships the missing
//! cache fraction serially, which adds `d(1/d - mu)/r` for the coded scheme and
//! `2(1/2 - mu)/r` for the benchmark.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, rat, Ndt, Rational};
use crate::scheduler::slot_count;

fn ceil_half(d: i64) -> i64 {
    (d + 1) / 2
}

fn check_degree(d: usize, min: usize) -> Result<i64> {
    if d < min {
        return Err(Error::Domain(format!("d = {d} violates d >= {min}")));
    }
    Ok(d as i64)
}

/// Worst-case edge NDT of the coded scheme at `mu = 1/d`.
pub fn prop1_bound(d: usize) -> Result<Rational> {
    let d = check_degree(d, 1)?;
    Ok(if d == 1 {
        int(1)
    } else {
        rat(2 * (d + 1) * ceil_half(d), d)
    })
}

/// Edge NDT of the full-caching benchmark.
pub fn full_caching_edge_ndt(d: usize) -> Result<Rational> {
    let d = check_degree(d, 1)?;
    Ok(if d == 1 { int(1) } else { rat(d + 1, 2) })
}

/// `4 ceil(d/2) / d`, the coded scheme's edge NDT over the benchmark's.
pub fn ratio_bound(d: usize) -> Result<Rational> {
    let di = check_degree(d, 2)?;
    let value = rat(4 * ceil_half(di), di);
    debug_assert!(value <= int(4));
    debug_assert_eq!(value, prop1_bound(d)? / full_caching_edge_ndt(d)?);
    Ok(value)
}

/// Exact edge NDT of the constructed schedule for a given `K`, i.e. slots / d.
pub fn exact_edge_ndt(k: usize, d: usize) -> Result<Rational> {
    let di = check_degree(d, 1)?;
    if d >= 2 && k < d + 1 {
        return Err(Error::Domain(format!("K = {k} violates K >= d + 1")));
    }
    Ok(rat(slot_count(k, d) as i64, di))
}

fn check_point(mu: Rational, r: Rational) -> Result<()> {
    if mu.is_negative() || mu > int(1) {
        return Err(Error::Domain(format!("mu = {mu} not in [0, 1]")));
    }
    if r.is_negative() {
        return Err(Error::Domain(format!("r = {r} is negative")));
    }
    Ok(())
}

/// Serial fronthaul-then-edge NDT for a scheme that needs cache fraction
/// `min_cache` and pays `weight * (min_cache - mu) / r` to top up.
fn serial_ndt(mu: Rational, r: Rational, min_cache: Rational, weight: Rational, edge: Rational) -> Ndt {
    if mu >= min_cache {
        Ndt::Finite(edge)
    } else if r.is_zero() {
        Ndt::Infinite
    } else {
        Ndt::Finite(weight * (min_cache - mu) / r + edge)
    }
}

/// End-to-end NDT of the coded scheme using an arbitrary edge NDT.
pub fn delta_ach_with_edge(mu: Rational, r: Rational, d: usize, edge: Rational) -> Result<Ndt> {
    check_point(mu, r)?;
    let di = check_degree(d, 1)?;
    Ok(serial_ndt(mu, r, rat(1, di), int(di), edge))
}

pub fn delta_ach(mu: Rational, r: Rational, d: usize) -> Result<Ndt> {
    delta_ach_with_edge(mu, r, d, prop1_bound(d)?)
}

pub fn delta_full(mu: Rational, r: Rational, d: usize) -> Result<Ndt> {
    check_point(mu, r)?;
    Ok(serial_ndt(mu, r, rat(1, 2), int(2), full_caching_edge_ndt(d)?))
}

fn threshold_denominator(d: i64) -> i64 {
    (d + 1) * (4 * ceil_half(d) - d)
}

/// Largest `r` at which the coded scheme still wins for `0 < mu < 1/d`.
pub fn threshold_r1(mu: Rational, d: usize) -> Result<Rational> {
    let di = check_degree(d, 2)?;
    if !(mu.is_positive() && mu < rat(1, di)) {
        return Err(Error::Domain(format!("r1 needs 0 < mu < 1/{d}, got mu = {mu}")));
    }
    let r1 = int(2 * di * (di - 2)) * mu / int(threshold_denominator(di));
    debug_assert!(r1.is_zero() || delta_ach(mu, r1, d)? == delta_full(mu, r1, d)?);
    Ok(r1)
}

/// Largest `r` at which the coded scheme still wins for `1/d <= mu < 1/2`.
pub fn threshold_r2(mu: Rational, d: usize) -> Result<Rational> {
    let di = check_degree(d, 3)?;
    if !(mu >= rat(1, di) && mu < rat(1, 2)) {
        return Err(Error::Domain(format!("r2 needs 1/{d} <= mu < 1/2, got mu = {mu}")));
    }
    let r2 = int(2 * di) * (int(1) - int(2) * mu) / int(threshold_denominator(di));
    debug_assert_eq!(delta_ach(mu, r2, d)?, delta_full(mu, r2, d)?);
    Ok(r2)
}

/// The regime threshold that applies at `mu`, if any.
pub fn threshold(mu: Rational, d: usize) -> Option<Rational> {
    threshold_r1(mu, d).or_else(|_| threshold_r2(mu, d)).ok()
}

/// Set of fronthaul pre-logs `r > 0` where the coded scheme is no worse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossover {
    Never,
    UpTo(Rational),
    Always,
}

/// Crossover of the coded scheme with the exact `K`-dependent edge NDT against
/// the benchmark. Extension: the worst-case thresholds above use the
/// `K`-independent bound instead.
pub fn crossover_exact(mu: Rational, k: usize, d: usize) -> Result<Crossover> {
    check_point(mu, int(0))?;
    let di = check_degree(d, 2)?;
    let edge = exact_edge_ndt(k, d)?;
    let gap = edge - full_caching_edge_ndt(d)?;
    let inv_d = rat(1, di);
    let half = rat(1, 2);
    // ach - full = (fronthaul_ach - fronthaul_full) / r + gap, with the
    // fronthaul terms being (1 - d mu)^+ and (1 - 2 mu)^+.
    let fa = if mu < inv_d { int(1) - int(di) * mu } else { int(0) };
    let ff = if mu < half { int(1) - int(2) * mu } else { int(0) };
    let slope = fa - ff;
    // The exact edge NDT never beats the benchmark's, so gap >= 0.
    debug_assert!(!gap.is_negative());
    Ok(if slope.is_positive() || (slope.is_zero() && gap.is_positive()) {
        Crossover::Never
    } else if gap.is_zero() {
        Crossover::Always
    } else {
        Crossover::UpTo(-slope / gap)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Proposed,
    FullCachingBenchmark,
    Tie,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Proposed => "Proposed",
            Scheme::FullCachingBenchmark => "FullCachingBenchmark",
            Scheme::Tie => "Tie",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimePoint {
    pub mu: Rational,
    pub r: Rational,
    pub d: usize,
    pub delta_ach: Ndt,
    pub delta_full: Ndt,
    pub best: Scheme,
}

pub const CSV_HEADER: &str = "mu,r,d,delta_ach,delta_full,best";

impl RegimePoint {
    /// CSV row matching [`CSV_HEADER`]; rationals as `num/den`, infinity as `inf`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            crate::rational::fraction(&self.mu),
            crate::rational::fraction(&self.r),
            self.d,
            self.delta_ach.fraction(),
            self.delta_full.fraction(),
            self.best
        )
    }
}

pub fn best_scheme(mu: Rational, r: Rational, d: usize) -> Result<RegimePoint> {
    let ach = delta_ach(mu, r, d)?;
    let full = delta_full(mu, r, d)?;
    let best = match ach.cmp(&full) {
        std::cmp::Ordering::Less => Scheme::Proposed,
        std::cmp::Ordering::Greater => Scheme::FullCachingBenchmark,
        std::cmp::Ordering::Equal => Scheme::Tie,
    };
    Ok(RegimePoint { mu, r, d, delta_ach: ach, delta_full: full, best })
}

/// Value at `query` of the lower convex envelope of achievable `(mu, ndt)`
/// points, i.e. the best NDT reachable by splitting files between schemes.
pub fn memory_sharing_envelope(points: &[(Rational, Rational)], query: Rational) -> Result<Rational> {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return Err(Error::Domain("no achievable points".into()));
    };
    if points.windows(2).any(|w| w[0].0 > w[1].0) {
        return Err(Error::Domain("points must be sorted by mu".into()));
    }
    if query < first.0 || query > last.0 {
        return Err(Error::Domain(format!("query mu = {query} outside [{}, {}]", first.0, last.0)));
    }

    // Lower hull by monotone chain; for equal mu keep the smaller ndt.
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for &p in points {
        if let Some(top) = hull.last() {
            if top.0 == p.0 {
                if p.1 < top.1 {
                    hull.pop();
                } else {
                    continue;
                }
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= Rational::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    if hull.len() == 1 {
        return Ok(hull[0].1);
    }
    let seg = hull
        .windows(2)
        .find(|w| query >= w[0].0 && query <= w[1].0)
        .expect("query lies within hull range");
    let (a, b) = (seg[0], seg[1]);
    let t = (query - a.0) / (b.0 - a.0);
    Ok(a.1 + t * (b.1 - a.1))
}
