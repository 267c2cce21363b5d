//! Arithmetic over GF(p) for a prime `p`, plus the small amount of dense
//! linear algebra the placement code needs.

use crate::error::{Error, Result};

/// Default modulus. 16-bit chunks always fit below it.
pub const DEFAULT_PRIME: u64 = 65_537;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

impl PrimeField {
    /// The modulus is kept below 2^32 so products fit in a `u64`.
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 32 {
            return Err(Error::Field { p, reason: "modulus must be below 2^32".into() });
        }
        if !is_prime(p) {
            return Err(Error::Field { p, reason: "not prime".into() });
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat. `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        (a != 0).then(|| self.pow(a, self.p - 2))
    }

    /// Rank of a dense row-major matrix by Gaussian elimination.
    pub fn rank(&self, rows: &[Vec<u64>]) -> usize {
        let mut m: Vec<Vec<u64>> = rows.to_vec();
        let ncols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..ncols {
            let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, pivot);
            let inv = self.inv(m[rank][col]).expect("nonzero pivot");
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let factor = self.mul(m[r][col], inv);
                    for c in col..ncols {
                        let v = self.mul(factor, m[rank][c]);
                        m[r][c] = self.sub(m[r][c], v);
                    }
                }
            }
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }

    /// Inverse of a square matrix by Gauss-Jordan elimination, `None` if singular.
    pub fn invert(&self, matrix: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
        let n = matrix.len();
        let mut aug: Vec<Vec<u64>> = matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                assert_eq!(row.len(), n, "matrix must be square");
                let mut r = row.iter().map(|v| v % self.p).collect::<Vec<_>>();
                r.extend((0..n).map(|j| u64::from(i == j)));
                r
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| aug[r][col] != 0)?;
            aug.swap(col, pivot);
            let inv = self.inv(aug[col][col])?;
            for c in 0..2 * n {
                aug[col][c] = self.mul(aug[col][c], inv);
            }
            for r in 0..n {
                if r != col && aug[r][col] != 0 {
                    let factor = aug[r][col];
                    for c in 0..2 * n {
                        let v = self.mul(factor, aug[col][c]);
                        aug[r][c] = self.sub(aug[r][c], v);
                    }
                }
            }
        }
        Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
    }
}
