//! Linear algebra over GF(2) with rows packed into `u64` words.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Parity of `popcount(x & a)`.
#[inline]
pub fn dot2(x: u64, a: u64) -> u8 {
    ((x & a).count_ones() & 1) as u8
}

/// Accumulated equations `row · a = 0`. Zero rows are counted but not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gf2Matrix {
    n_cols: usize,
    rows: Vec<u64>,
    zero_rows: usize,
}

impl Gf2Matrix {
    pub fn new(n_cols: usize) -> Result<Self> {
        if n_cols == 0 || n_cols > 64 {
            return Err(domain(format!("GF(2) width {n_cols} outside 1..=64")));
        }
        Ok(Self {
            n_cols,
            ..Self::default()
        })
    }

    pub fn from_rows(n_cols: usize, rows: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut m = Self::new(n_cols)?;
        for r in rows {
            m.push(r)?;
        }
        Ok(m)
    }

    pub fn push(&mut self, row: u64) -> Result<()> {
        if self.n_cols < 64 && row >> self.n_cols != 0 {
            return Err(domain(format!(
                "row {row:#b} wider than {} bits",
                self.n_cols
            )));
        }
        if row == 0 {
            self.zero_rows += 1;
        } else {
            self.rows.push(row);
        }
        Ok(())
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn zero_rows(&self) -> usize {
        self.zero_rows
    }

    /// Rows pushed, zero rows included.
    pub fn total_rows(&self) -> usize {
        self.rows.len() + self.zero_rows
    }

    /// Reduced row echelon form: `(row, pivot column)` pairs, pivots ascending.
    fn rref(&self) -> Vec<(u64, usize)> {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.n_cols {
            let bit = 1u64 << col;
            let Some(found) = (next..rows.len()).find(|&i| rows[i] & bit != 0) else {
                continue;
            };
            rows.swap(next, found);
            let pivot_row = rows[next];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != next && *r & bit != 0 {
                    *r ^= pivot_row;
                }
            }
            pivots.push((next, col));
            next += 1;
        }
        pivots.into_iter().map(|(i, c)| (rows[i], c)).collect()
    }
}

pub fn rank(m: &Gf2Matrix) -> usize {
    m.rref().len()
}

/// Basis of `{v : row · v = 0 for every row}`, one vector per free column.
pub fn nullspace(m: &Gf2Matrix) -> Vec<u64> {
    let rref = m.rref();
    let pivot_cols: u64 = rref.iter().fold(0, |acc, &(_, c)| acc | 1 << c);
    (0..m.n_cols)
        .filter(|&f| pivot_cols & (1 << f) == 0)
        .map(|f| {
            rref.iter().fold(
                1u64 << f,
                |v, &(row, c)| {
                    if row & (1 << f) != 0 {
                        v | 1 << c
                    } else {
                        v
                    }
                },
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoveryStatus {
    Unique,
    Underdetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskRecovery {
    pub status: RecoveryStatus,
    pub a_candidate: Option<u64>,
}

/// The unique nonzero solution once the rows reach rank `n − 1`.
pub fn recover_mask(m: &Gf2Matrix) -> Result<MaskRecovery> {
    let r = rank(m);
    if r == m.n_cols {
        return Err(Error::Contradiction { rank: r });
    }
    if r + 1 < m.n_cols {
        return Ok(MaskRecovery {
            status: RecoveryStatus::Underdetermined,
            a_candidate: None,
        });
    }
    let basis = nullspace(m);
    debug_assert_eq!(basis.len(), 1);
    Ok(MaskRecovery {
        status: RecoveryStatus::Unique,
        a_candidate: Some(basis[0]),
    })
}
