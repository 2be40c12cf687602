//! Black-box functions: the inner-product function `f(w) = w·a mod 2` and
//! two-to-one functions `g` that are constant exactly on the cosets `{w, w⊕a}`.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest `n` for which [`verify_promise`] enumerates all inputs.
pub const PROMISE_CHECK_MAX_BITS: usize = 20;

/// Largest `n` for which a scrambled oracle may be built (the permutation is tabulated).
pub const SCRAMBLE_MAX_BITS: usize = 28;

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_input(n: usize, w: u64) -> Result<()> {
    if w & !low_mask(n) != 0 {
        Err(domain(format!("input {w} does not fit in {n} bits")))
    } else {
        Ok(())
    }
}

/// `popcount(y ⊕ z)`.
#[inline]
pub fn hamming(y: u64, z: u64) -> u32 {
    (y ^ z).count_ones()
}

/// Hidden string of the inner-product problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BvMask {
    n: usize,
    a: u64,
}

impl BvMask {
    pub fn new(n: usize, a: u64) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(domain(format!("bit count {n} outside 1..=64")));
        }
        if a & !low_mask(n) != 0 {
            return Err(domain(format!("mask {a:#x} does not fit in {n} bits")));
        }
        Ok(Self { n, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    /// `f(w)` without the range check.
    #[inline]
    pub fn f(&self, w: u64) -> u8 {
        ((w & self.a).count_ones() & 1) as u8
    }

    pub fn record(&self) -> OracleRecord {
        OracleRecord {
            problem: Problem::Bv,
            n: self.n,
            a: self.a,
            pivot_bit: None,
            scramble_seed: None,
        }
    }
}

/// Parity of the bitwise AND of `w` and the mask.
pub fn bv_eval(mask: &BvMask, w: u64) -> Result<u8> {
    check_input(mask.n, w)?;
    Ok(mask.f(w))
}

/// A function `{0,1}^n → {0,1}^{n−1}` satisfying Simon's promise for mask `a`.
///
/// Canonical form: with `j` the lowest set bit of `a`, each input is mapped to
/// the member of its coset whose bit `j` is clear, and bit `j` is then deleted.
/// An optional seeded permutation of the output space is composed on top.
#[derive(Debug, Clone, PartialEq)]
pub struct SimonOracle {
    n: usize,
    a: u64,
    pivot_bit: usize,
    scramble_seed: Option<u64>,
    scramble: Option<Arc<Vec<u64>>>,
    table: Option<Vec<u64>>,
}

pub fn simon_build(n: usize, a: u64, scramble_seed: Option<u64>) -> Result<SimonOracle> {
    if !(2..=63).contains(&n) {
        return Err(domain(format!("Simon oracles need 2 <= n <= 63, got {n}")));
    }
    if a == 0 {
        return Err(Error::PromiseImpossible(
            "mask 0 would require g to be injective into a smaller set".into(),
        ));
    }
    if a & !low_mask(n) != 0 {
        return Err(domain(format!("mask {a:#x} does not fit in {n} bits")));
    }
    let scramble = match scramble_seed {
        None => None,
        Some(seed) => {
            if n > SCRAMBLE_MAX_BITS {
                return Err(Error::Capacity {
                    what: "scrambled oracle",
                    requested: n,
                    cap: SCRAMBLE_MAX_BITS,
                });
            }
            let mut perm: Vec<u64> = (0..1u64 << (n - 1)).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            Some(Arc::new(perm))
        }
    };
    Ok(SimonOracle {
        n,
        a,
        pivot_bit: a.trailing_zeros() as usize,
        scramble_seed,
        scramble,
        table: None,
    })
}

impl SimonOracle {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn pivot_bit(&self) -> usize {
        self.pivot_bit
    }

    pub fn scramble_seed(&self) -> Option<u64> {
        self.scramble_seed
    }

    /// `g(w)` without the range check.
    #[inline]
    pub fn g(&self, w: u64) -> u64 {
        if let Some(t) = &self.table {
            return t[w as usize];
        }
        let j = self.pivot_bit;
        let rep = if (w >> j) & 1 == 0 { w } else { w ^ self.a };
        let canonical = ((rep >> (j + 1)) << j) | (rep & low_mask(j));
        match &self.scramble {
            Some(perm) => perm[canonical as usize],
            None => canonical,
        }
    }

    /// Tabulate `g` so individual entries can be overridden.
    pub fn materialize(mut self) -> Result<Self> {
        if self.n > PROMISE_CHECK_MAX_BITS {
            return Err(Error::Capacity {
                what: "oracle table",
                requested: self.n,
                cap: PROMISE_CHECK_MAX_BITS,
            });
        }
        let table = (0..1u64 << self.n).map(|w| self.g(w)).collect();
        self.table = Some(table);
        Ok(self)
    }

    /// Overwrite one table entry. Used to plant promise violations in tests of
    /// the verifier; the result is generally not a valid Simon oracle.
    pub fn set_table_entry(&mut self, w: u64, value: u64) -> Result<()> {
        check_input(self.n, w)?;
        check_input(self.n - 1, value)?;
        let table = self
            .table
            .as_mut()
            .ok_or_else(|| domain("oracle is not materialized"))?;
        table[w as usize] = value;
        Ok(())
    }

    pub fn record(&self) -> OracleRecord {
        OracleRecord {
            problem: Problem::Simon,
            n: self.n,
            a: self.a,
            pivot_bit: Some(self.pivot_bit),
            scramble_seed: self.scramble_seed,
        }
    }

    pub fn from_record(rec: &OracleRecord) -> Result<Self> {
        if rec.problem != Problem::Simon {
            return Err(domain("record does not describe a Simon oracle"));
        }
        let o = simon_build(rec.n, rec.a, rec.scramble_seed)?;
        if let Some(p) = rec.pivot_bit {
            if p != o.pivot_bit {
                return Err(domain(format!(
                    "record pivot bit {p} disagrees with mask {:#x}",
                    rec.a
                )));
            }
        }
        Ok(o)
    }
}

pub fn simon_eval(oracle: &SimonOracle, w: u64) -> Result<u64> {
    check_input(oracle.n, w)?;
    Ok(oracle.g(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromiseReport {
    pub holds: bool,
    pub witness: Option<(u64, u64)>,
}

/// Exhaustively check both directions of the promise
/// `g(w) = g(y) ⇔ w ⊕ y ∈ {0, a}`.
///
/// The witness is the lexicographically first colliding pair that is not a
/// coset pair if one exists, otherwise the first coset pair with distinct outputs.
pub fn verify_promise(oracle: &SimonOracle) -> Result<PromiseReport> {
    let n = oracle.n;
    if n > PROMISE_CHECK_MAX_BITS {
        return Err(Error::Capacity {
            what: "exhaustive promise check",
            requested: n,
            cap: PROMISE_CHECK_MAX_BITS,
        });
    }
    let a = oracle.a;
    let mut seen: HashMap<u64, Vec<u64>> = HashMap::new();
    for w in 0..1u64 << n {
        let bucket = seen.entry(oracle.g(w)).or_default();
        if let Some(&y) = bucket.iter().find(|&&y| y ^ w != a) {
            return Ok(PromiseReport {
                holds: false,
                witness: Some((y, w)),
            });
        }
        bucket.push(w);
    }
    for w in 0..1u64 << n {
        if oracle.g(w) != oracle.g(w ^ a) {
            return Ok(PromiseReport {
                holds: false,
                witness: Some((w.min(w ^ a), w.max(w ^ a))),
            });
        }
    }
    Ok(PromiseReport {
        holds: true,
        witness: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Bv,
    Simon,
}

/// Reproducible description of an oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub problem: Problem,
    pub n: usize,
    pub a: u64,
    pub pivot_bit: Option<usize>,
    pub scramble_seed: Option<u64>,
}
