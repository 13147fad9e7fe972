//! Arithmetic in a prime field `F_p`, enough for ranks of small matrices.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u8,
}

impl PrimeField {
    pub fn new(p: u8) -> Result<Self> {
        if !matches!(p, 2 | 3) {
            return Err(Error::InvalidParameters(format!("only F_2 and F_3 are supported, got q = {p}")));
        }
        Ok(Self { p })
    }

    pub fn order(self) -> u8 {
        self.p
    }

    pub fn sub(self, a: u8, b: u8) -> u8 {
        (a + self.p - b) % self.p
    }

    fn inv(self, a: u8) -> u8 {
        // every nonzero element of F_2 and F_3 is its own inverse
        debug_assert!(a != 0);
        a
    }

    /// Rank by Gaussian elimination; `rows` is consumed as scratch space.
    pub fn rank(self, rows: &mut [Vec<u8>]) -> usize {
        let p = self.p as u16;
        let ncols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..ncols {
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, piv);
            let inv = self.inv(rows[rank][col]) as u16;
            for x in rows[rank].iter_mut() {
                *x = ((*x as u16 * inv) % p) as u8;
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let f = rows[r][col] as u16;
                    for c in col..ncols {
                        let v = (rows[r][c] as u16 + p * p - f * rows[rank][c] as u16) % p;
                        rows[r][c] = v as u8;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}
