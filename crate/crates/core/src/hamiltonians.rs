//! Problem and driver Hamiltonians for both algorithms, in dense form over the
//! full `A ⊗ B` register and as per-branch two-level blocks.
//!
//! Energy conventions are kept as printed: the inner-product problem has ground
//! energy −1, the Simon problem (Hamming penalty) has ground energy 0.

use nalgebra::ComplexField;

use crate::error::{domain, Result};
use crate::oracles::{hamming, BvMask, SimonOracle};
use crate::qstate::{check_cap, DenseOperator, StateVector, DENSE_OPERATOR_QUBIT_CAP};
use crate::scalar::Real;

/// `H(s) = s·H_p + (1 − s)·H_d`, with the product state the protocol is aiming for.
#[derive(Debug, Clone)]
pub struct InterpolatedHamiltonian<T: Real> {
    pub problem: DenseOperator<T>,
    pub driver: DenseOperator<T>,
    pub n_a: usize,
    pub n_b: usize,
    /// `2^{-n/2} Σ_w |w⟩ ⊗ |oracle(w)⟩`, when known.
    pub target: Option<StateVector<T>>,
}

impl<T: Real> InterpolatedHamiltonian<T> {
    pub fn bv(mask: &BvMask) -> Result<Self> {
        Ok(Self {
            problem: bv_problem(mask)?,
            driver: bv_driver(mask.n())?,
            n_a: mask.n(),
            n_b: 1,
            target: Some(crate::evolution::bv_target(mask)?),
        })
    }

    pub fn simon(oracle: &SimonOracle) -> Result<Self> {
        Ok(Self {
            problem: simon_problem(oracle)?,
            driver: simon_driver(oracle.n())?,
            n_a: oracle.n(),
            n_b: oracle.n() - 1,
            target: Some(crate::evolution::simon_target(oracle)?),
        })
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }
}

fn check_dense(n_total: usize) -> Result<()> {
    check_cap("dense Hamiltonian", n_total, DENSE_OPERATOR_QUBIT_CAP)
}

/// `½(1 − σ_x)`.
fn half_one_minus_x<T: Real>() -> DenseOperator<T> {
    DenseOperator::identity(2)
        .add(&DenseOperator::pauli_x().scale(-T::one()))
        .expect("2x2")
        .scale(T::half())
}

/// Single-qubit operator on qubit `k` of an `nqubits` register.
fn embed<T: Real>(op: &DenseOperator<T>, k: usize, nqubits: usize) -> DenseOperator<T> {
    (0..nqubits)
        .rev()
        .fold(DenseOperator::identity(1), |acc, q| {
            if q == k {
                acc.kron(op)
            } else {
                acc.kron(&DenseOperator::identity(2))
            }
        })
}

/// Diagonal: `−1` on `|w⟩|f(w)⟩`, `0` elsewhere.
pub fn bv_problem<T: Real>(mask: &BvMask) -> Result<DenseOperator<T>> {
    let n = mask.n();
    check_dense(n + 1)?;
    let diag: Vec<T> = (0..1u64 << (n + 1))
        .map(|idx| {
            let (w, b) = (idx >> 1, (idx & 1) as u8);
            if b == mask.f(w) {
                -T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(DenseOperator::from_real_diagonal(&diag))
}

/// `½ 1_A ⊗ (1 − σ_x)_B`.
pub fn bv_driver<T: Real>(n: usize) -> Result<DenseOperator<T>> {
    check_dense(n + 1)?;
    Ok(DenseOperator::identity(1 << n).kron(&half_one_minus_x()))
}

/// Diagonal with entry `h(y, g(w))` at `|w⟩|y⟩`.
pub fn simon_problem<T: Real>(oracle: &SimonOracle) -> Result<DenseOperator<T>> {
    let n = oracle.n();
    check_dense(2 * n - 1)?;
    let n_b = n - 1;
    let diag: Vec<T> = (0..1u64 << (2 * n - 1))
        .map(|idx| {
            let (w, y) = (idx >> n_b, idx & ((1 << n_b) - 1));
            T::lit(hamming(y, oracle.g(w)) as f64)
        })
        .collect();
    Ok(DenseOperator::from_real_diagonal(&diag))
}

/// The same operator assembled from Pauli terms:
/// `½ Σ_w |w⟩⟨w| ⊗ Σ_k [1 − (−1)^{g_k(w)} σ_z^k]`.
pub fn simon_problem_pauli<T: Real>(oracle: &SimonOracle) -> Result<DenseOperator<T>> {
    let n = oracle.n();
    check_dense(2 * n - 1)?;
    let n_b = n - 1;
    let dim_b = 1usize << n_b;
    let mut total = DenseOperator::zeros(1 << (2 * n - 1));
    for w in 0..1u64 << n {
        let mut proj = vec![T::zero(); 1 << n];
        proj[w as usize] = T::one();
        let proj = DenseOperator::from_real_diagonal(&proj);
        let gw = oracle.g(w);
        let mut branch = DenseOperator::zeros(dim_b);
        for k in 0..n_b {
            let sign = if (gw >> k) & 1 == 1 {
                T::one()
            } else {
                -T::one()
            };
            let term = DenseOperator::identity(dim_b)
                .add(&embed(&DenseOperator::pauli_z(), k, n_b).scale(sign))?;
            branch = branch.add(&term)?;
        }
        total = total.add(&proj.kron(&branch.scale(T::half())))?;
    }
    Ok(total)
}

/// `½ 1_A ⊗ Σ_k (1 − σ_x^k)` on the `n − 1` output qubits.
pub fn simon_driver<T: Real>(n: usize) -> Result<DenseOperator<T>> {
    if n < 2 {
        return Err(domain(format!("Simon driver needs n >= 2, got {n}")));
    }
    check_dense(2 * n - 1)?;
    let n_b = n - 1;
    let mut b = DenseOperator::zeros(1 << n_b);
    for k in 0..n_b {
        b = b.add(&embed(&half_one_minus_x(), k, n_b))?;
    }
    Ok(DenseOperator::identity(1 << n).kron(&b))
}

fn check_s<T: Real>(s: T) -> Result<()> {
    if s >= T::zero() && s <= T::one() {
        Ok(())
    } else {
        Err(domain(format!("schedule parameter {s} outside [0, 1]")))
    }
}

pub fn interpolate<T: Real>(h: &InterpolatedHamiltonian<T>, s: T) -> Result<DenseOperator<T>> {
    check_s(s)?;
    h.problem.scale(s).add(&h.driver.scale(T::one() - s))
}

/// Which printed form of the per-branch block to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockConvention {
    /// `½[(1−s)(1−σ_x) − s(1 + (−1)^f σ_z)]`, ground energy −1 at `s = 1`.
    Bv,
    /// `½[(1−s)(1−σ_x) + s(1 − (−1)^g σ_z)]`, one qubit of the Simon branch.
    Simon,
}

/// One decoupled branch of the output register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoLevelBlock {
    pub f_bit: u8,
    pub convention: BlockConvention,
}

impl TwoLevelBlock {
    pub fn bv(f_bit: u8) -> Self {
        Self {
            f_bit,
            convention: BlockConvention::Bv,
        }
    }

    pub fn simon(g_bit: u8) -> Self {
        Self {
            f_bit: g_bit,
            convention: BlockConvention::Simon,
        }
    }

    /// `(c0, cx, cz)` with `H_w(s) = c0·1 + cx·σ_x + cz·σ_z`.
    pub fn pauli_coefficients<T: Real>(&self, s: T) -> (T, T, T) {
        let half = T::half();
        let sign = if self.f_bit & 1 == 0 {
            T::one()
        } else {
            -T::one()
        };
        let cx = -half * (T::one() - s);
        let cz = -half * s * sign;
        let c0 = match self.convention {
            BlockConvention::Bv => half - s,
            BlockConvention::Simon => half,
        };
        (c0, cx, cz)
    }
}

/// The 2×2 block, assembled directly from the Pauli matrices.
pub fn two_level<T: Real>(block: &TwoLevelBlock, s: T) -> DenseOperator<T> {
    let one = DenseOperator::<T>::identity(2);
    let sz = DenseOperator::<T>::pauli_z();
    let sign = if block.f_bit & 1 == 0 {
        T::one()
    } else {
        -T::one()
    };
    let driver = half_one_minus_x::<T>().scale(T::one() - s);
    let problem = match block.convention {
        BlockConvention::Bv => one.add(&sz.scale(sign)).expect("2x2").scale(-T::half() * s),
        BlockConvention::Simon => one.add(&sz.scale(-sign)).expect("2x2").scale(T::half() * s),
    };
    driver.add(&problem).expect("2x2")
}

/// Eigenvalue splitting of [`two_level`] at `s`.
pub fn gap<T: Real>(block: &TwoLevelBlock, s: T) -> T {
    let h = two_level(block, s);
    let p = h.entry(0, 0).re;
    let r = h.entry(1, 1).re;
    let q = h.entry(0, 1);
    let d = p - r;
    (d * d + T::lit(4.0) * q.norm_sqr()).sqrt()
}

/// `√((1 − s)² + s²)`.
pub fn gap_closed_form<T: Real>(s: T) -> T {
    let u = T::one() - s;
    (u * u + s * s).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GapScan<T> {
    pub s_min: T,
    pub gap_min: T,
}

fn degeneracy_tol<T: Real>() -> T {
    <T as ComplexField>::RealField::default_epsilon().sqrt() * T::lit(10.0)
}

/// Spacing between the (possibly degenerate) ground level and the next level.
pub fn spectral_gap<T: Real>(op: &DenseOperator<T>) -> Result<Option<T>> {
    let ev = op.eigenvalues()?;
    let ground = ev[0];
    let tol = degeneracy_tol::<T>() * (T::one() + ground.abs());
    Ok(ev
        .iter()
        .copied()
        .find(|&e| e > ground + tol)
        .map(|e| e - ground))
}

/// Number of eigenvalues within tolerance of the lowest.
pub fn ground_degeneracy<T: Real>(op: &DenseOperator<T>) -> Result<usize> {
    let ev = op.eigenvalues()?;
    let tol = degeneracy_tol::<T>() * (T::one() + ev[0].abs());
    Ok(ev.iter().filter(|&&e| e <= ev[0] + tol).count())
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < 3 {
        Err(domain(format!(
            "gap scan needs at least 3 grid points, got {grid}"
        )))
    } else {
        Ok(())
    }
}

/// `(s, gap)` on a uniform grid including both endpoints.
pub fn gap_profile<T: Real>(h: &InterpolatedHamiltonian<T>, grid: usize) -> Result<Vec<(T, T)>> {
    check_grid(grid)?;
    check_dense(h.n_a + h.n_b)?;
    (0..grid)
        .map(|i| {
            let s = T::lit(i as f64 / (grid - 1) as f64);
            let g = spectral_gap(&interpolate(h, s)?)?
                .ok_or_else(|| domain("spectrum is fully degenerate"))?;
            Ok((s, g))
        })
        .collect()
}

/// Minimum of [`gap_profile`]; the first grid point wins ties.
pub fn min_gap_scan<T: Real>(h: &InterpolatedHamiltonian<T>, grid: usize) -> Result<GapScan<T>> {
    let profile = gap_profile(h, grid)?;
    let (s_min, gap_min) = profile
        .into_iter()
        .fold(None, |best: Option<(T, T)>, (s, g)| match best {
            Some((_, bg)) if bg <= g => best,
            _ => Some((s, g)),
        })
        .expect("grid is nonempty");
    Ok(GapScan { s_min, gap_min })
}

/// Two-level gap on a uniform grid, next to its closed form.
pub fn two_level_gap_profile<T: Real>(grid: usize) -> Result<Vec<(T, T, T)>> {
    check_grid(grid)?;
    let block = TwoLevelBlock::bv(0);
    Ok((0..grid)
        .map(|i| {
            let s = T::lit(i as f64 / (grid - 1) as f64);
            (s, gap(&block, s), gap_closed_form(s))
        })
        .collect())
}

#[cfg(test)]
/// `c0 + cx σ_x + cz σ_z` as a 2×2 array.
pub(crate) fn block_matrix<T: Real>(c0: T, cx: T, cz: T) -> [[num_complex::Complex<T>; 2]; 2] {
    [
        [crate::scalar::creal(c0 + cz), crate::scalar::creal(cx)],
        [crate::scalar::creal(cx), crate::scalar::creal(c0 - cz)],
    ]
}
