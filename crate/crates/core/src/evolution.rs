//! Time-dependent Schrödinger evolution under the linear schedule `s = t/T`.
//!
//! Both paths use the same stepping rule: each step of width `dt = T/N`
//! applies the exact propagator `exp(−i·dt·H(s_mid))` at the step midpoint.
//! The full path diagonalizes the dense `H(s_mid)`; the factored path uses the
//! closed-form 2×2 exponential of a single branch block and rebuilds the full
//! state from the two branch solutions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hamiltonians::{interpolate, BlockConvention, InterpolatedHamiltonian, TwoLevelBlock};
use crate::oracles::{BvMask, SimonOracle};
use crate::qstate::{check_cap, inner, StateVector, DENSE_OPERATOR_QUBIT_CAP};
use crate::scalar::{cone, creal, czero, phase_factor, Real};

/// Norm drift above which a run is rejected.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub total_time: f64,
    pub steps: usize,
}

impl Schedule {
    pub fn new(total_time: f64, steps: usize) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(domain(format!(
                "runtime must be positive, got {total_time}"
            )));
        }
        if steps == 0 {
            return Err(domain("step count must be at least 1"));
        }
        Ok(Self { total_time, steps })
    }

    /// `T = 50`, `N = 5000`.
    pub fn converged() -> Self {
        Self {
            total_time: 50.0,
            steps: 5000,
        }
    }

    /// `N = 100·T` (at least one step).
    pub fn with_density(total_time: f64) -> Result<Self> {
        Self::new(total_time, ((100.0 * total_time).round() as usize).max(1))
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    /// Schedule parameter at the midpoint of step `k`.
    pub fn midpoint(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / self.steps as f64
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult<T: Real> {
    pub final_state: StateVector<T>,
    /// Largest `|‖ψ‖² − 1|` seen over the run.
    pub norm_drift: T,
    pub fidelity_to_target: Option<T>,
}

fn is_real<T: Real>(m: &DMatrix<Complex<T>>) -> bool {
    m.iter().all(|z| z.im == T::zero())
}

fn apply_spectral<T: Real, V>(
    psi: &DVector<Complex<T>>,
    vecs: &DMatrix<V>,
    vals: &[T],
    dt: T,
    lift: impl Fn(V) -> Complex<T>,
) -> DVector<Complex<T>>
where
    V: nalgebra::Scalar + Copy,
{
    let d = vals.len();
    let v = DMatrix::from_fn(d, d, |i, j| lift(vecs[(i, j)]));
    let mut c = v.adjoint() * psi;
    for (ci, &e) in c.iter_mut().zip(vals) {
        *ci *= phase_factor(e * dt);
    }
    v * c
}

/// Brute-force evolution of the full `A ⊗ B` state.
pub fn evolve_full<T: Real>(
    h: &InterpolatedHamiltonian<T>,
    psi0: &StateVector<T>,
    sched: &Schedule,
) -> Result<EvolutionResult<T>> {
    check_cap("full evolution", h.n_a + h.n_b, DENSE_OPERATOR_QUBIT_CAP)?;
    if psi0.dim() != h.dim() {
        return Err(Error::Shape {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    let real_problem = is_real(h.problem.matrix()) && is_real(h.driver.matrix());
    let dt = T::lit(sched.dt());
    let mut psi = DVector::from_column_slice(psi0.amps());
    let mut drift = T::zero();
    for k in 0..sched.steps {
        let hs = interpolate(h, T::lit(sched.midpoint(k)))?;
        psi = if real_problem {
            let re = hs.matrix().map(|z| z.re);
            let eig = SymmetricEigen::new(re);
            apply_spectral(
                &psi,
                &eig.eigenvectors,
                eig.eigenvalues.as_slice(),
                dt,
                creal,
            )
        } else {
            let eig = SymmetricEigen::new(hs.matrix().clone());
            apply_spectral(
                &psi,
                &eig.eigenvectors,
                eig.eigenvalues.as_slice(),
                dt,
                |z| z,
            )
        };
        let norm = psi.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        drift = drift.max((norm - T::one()).abs());
    }
    let drift_f64 = drift.as_f64();
    if drift_f64.is_nan() || drift_f64 > NORM_DRIFT_LIMIT {
        return Err(Error::Integration {
            drift: drift_f64,
            limit: NORM_DRIFT_LIMIT,
        });
    }
    let final_state = StateVector::new(
        psi0.num_qubits_a(),
        psi0.num_qubits_b(),
        psi.iter().copied().collect(),
    )?;
    let fidelity_to_target = match &h.target {
        Some(t) => Some(inner(t, &final_state)?.norm_sqr()),
        None => None,
    };
    Ok(EvolutionResult {
        final_state,
        norm_drift: drift,
        fidelity_to_target,
    })
}

/// `exp(−i·dt·(c0 + cx σ_x + cz σ_z))` in closed form.
pub fn two_level_propagator<T: Real>(block: &TwoLevelBlock, s: T, dt: T) -> [[Complex<T>; 2]; 2] {
    let (c0, cx, cz) = block.pauli_coefficients(s);
    let global = phase_factor(c0 * dt);
    let b = (cx * cx + cz * cz).sqrt();
    if b == T::zero() {
        return [[global, czero()], [czero(), global]];
    }
    let (sin, cos) = (b * dt).sin_cos();
    let diag_im = sin * cz / b;
    let off = global * Complex::new(T::zero(), -(sin * cx / b));
    [
        [global * Complex::new(cos, -diag_im), off],
        [off, global * Complex::new(cos, diag_im)],
    ]
}

/// Evolve `|+⟩` under one branch block; the returned qubit keeps its global phase.
pub fn evolve_two_level<T: Real>(block: &TwoLevelBlock, sched: &Schedule) -> StateVector<T> {
    let dt = T::lit(sched.dt());
    let r = T::frac_1_sqrt_2();
    let mut a = [creal(r), creal(r)];
    for k in 0..sched.steps {
        let u = two_level_propagator(block, T::lit(sched.midpoint(k)), dt);
        a = [
            u[0][0] * a[0] + u[0][1] * a[1],
            u[1][0] * a[0] + u[1][1] * a[1],
        ];
    }
    StateVector::qubit(a[0], a[1])
}

/// The two branch solutions `(φ_0, φ_1)` for one block convention.
pub fn evolve_branches<T: Real>(
    convention: BlockConvention,
    sched: &Schedule,
) -> (StateVector<T>, StateVector<T>) {
    let phi0 = evolve_two_level(
        &TwoLevelBlock {
            f_bit: 0,
            convention,
        },
        sched,
    );
    let phi1 = evolve_two_level(
        &TwoLevelBlock {
            f_bit: 1,
            convention,
        },
        sched,
    );
    (phi0, phi1)
}

fn check_qubit<T: Real>(phi: &StateVector<T>) -> Result<()> {
    if phi.dim() != 2 {
        return Err(Error::Shape {
            expected: 2,
            actual: phi.dim(),
        });
    }
    Ok(())
}

fn inv_sqrt_dim<T: Real>(n: usize) -> T {
    T::one() / T::lit(((1u64 << n) as f64).sqrt())
}

/// `2^{-n/2} Σ_w |w⟩ ⊗ φ_{f(w)}`.
pub fn assemble_bv<T: Real>(
    mask: &BvMask,
    phi0: &StateVector<T>,
    phi1: &StateVector<T>,
) -> Result<StateVector<T>> {
    check_qubit(phi0)?;
    check_qubit(phi1)?;
    let n = mask.n();
    let mut out = StateVector::zeros(n, 1)?;
    let scale = inv_sqrt_dim::<T>(n);
    let branch = [phi0.amps(), phi1.amps()];
    for (w, pair) in out.amps_mut().chunks_exact_mut(2).enumerate() {
        let phi = branch[mask.f(w as u64) as usize];
        pair[0] = phi[0].scale(scale);
        pair[1] = phi[1].scale(scale);
    }
    Ok(out)
}

/// Lazy view of `2^{-n/2} Σ_w |w⟩ ⊗ (⊗_k φ_{g_k(w)})` that never stores the
/// full `2^{2n−1}` amplitudes.
#[derive(Debug, Clone)]
pub struct FactoredSimonState<'a, T: Real> {
    oracle: &'a SimonOracle,
    phi: [[Complex<T>; 2]; 2],
    scale: T,
}

impl<'a, T: Real> FactoredSimonState<'a, T> {
    pub fn new(
        oracle: &'a SimonOracle,
        phi0: &StateVector<T>,
        phi1: &StateVector<T>,
    ) -> Result<Self> {
        check_qubit(phi0)?;
        check_qubit(phi1)?;
        Ok(Self {
            oracle,
            phi: [
                [phi0.amps()[0], phi0.amps()[1]],
                [phi1.amps()[0], phi1.amps()[1]],
            ],
            scale: inv_sqrt_dim(oracle.n()),
        })
    }

    /// `⟨y|φ_{g_k(w)}⟩` multiplied over the output qubits, without the `2^{-n/2}`.
    pub fn branch_amplitude(&self, w: u64, y: u64) -> Complex<T> {
        let g = self.oracle.g(w);
        (0..self.oracle.n() - 1).fold(cone(), |acc, k| {
            acc * self.phi[((g >> k) & 1) as usize][((y >> k) & 1) as usize]
        })
    }

    pub fn amplitude(&self, w: u64, y: u64) -> Complex<T> {
        self.branch_amplitude(w, y).scale(self.scale)
    }

    pub fn materialize(&self) -> Result<StateVector<T>> {
        let n = self.oracle.n();
        let n_b = n - 1;
        let mut out = StateVector::zeros(n, n_b)?;
        for (w, chunk) in out.amps_mut().chunks_exact_mut(1 << n_b).enumerate() {
            let g = self.oracle.g(w as u64);
            // Build ⊗_k φ_{g_k} by doubling, qubit k occupying bit k.
            chunk[0] = creal(self.scale);
            for k in 0..n_b {
                let phi = self.phi[((g >> k) & 1) as usize];
                let len = 1usize << k;
                for i in 0..len {
                    let v = chunk[i];
                    chunk[i] = v * phi[0];
                    chunk[i + len] = v * phi[1];
                }
            }
        }
        Ok(out)
    }
}

/// `2^{-n/2} Σ_w |w⟩ ⊗ (⊗_k φ_{g_k(w)})`, materialized.
pub fn assemble_simon<T: Real>(
    oracle: &SimonOracle,
    phi0: &StateVector<T>,
    phi1: &StateVector<T>,
) -> Result<StateVector<T>> {
    check_cap(
        "Simon state",
        2 * oracle.n() - 1,
        crate::qstate::DEFAULT_QUBIT_CAP,
    )?;
    FactoredSimonState::new(oracle, phi0, phi1)?.materialize()
}

fn ideal_qubits<T: Real>() -> (StateVector<T>, StateVector<T>) {
    (
        StateVector::qubit(cone(), czero()),
        StateVector::qubit(czero(), cone()),
    )
}

/// `2^{-n/2} Σ_w |w⟩|f(w)⟩`.
pub fn bv_target<T: Real>(mask: &BvMask) -> Result<StateVector<T>> {
    let (z, o) = ideal_qubits();
    assemble_bv(mask, &z, &o)
}

/// `2^{-n/2} Σ_w |w⟩|g(w)⟩`.
pub fn simon_target<T: Real>(oracle: &SimonOracle) -> Result<StateVector<T>> {
    let (z, o) = ideal_qubits();
    assemble_simon(oracle, &z, &o)
}

/// `|+⟩_A ⊗ |+⟩_B`, the initial state of both algorithms.
pub fn initial_state<T: Real>(n_a: usize, n_b: usize) -> Result<StateVector<T>> {
    crate::qstate::tensor(&StateVector::plus(n_a)?, &StateVector::plus(n_b)?)
}

/// Overlap `|⟨target|ψ⟩|²` for the assembled inner-product state, in O(2^n).
pub fn bv_factored_fidelity<T: Real>(
    mask: &BvMask,
    phi0: &StateVector<T>,
    phi1: &StateVector<T>,
) -> T {
    let ones = (0..1u64 << mask.n()).filter(|&w| mask.f(w) == 1).count() as f64;
    let total = (1u64 << mask.n()) as f64;
    let ov = phi0.amps()[0].scale(T::lit((total - ones) / total))
        + phi1.amps()[1].scale(T::lit(ones / total));
    ov.norm_sqr()
}

/// Overlap `|⟨target|ψ⟩|²` for the assembled Simon state, in O(n·2^n).
pub fn simon_factored_fidelity<T: Real>(
    oracle: &SimonOracle,
    phi0: &StateVector<T>,
    phi1: &StateVector<T>,
) -> Result<T> {
    let view = FactoredSimonState::new(oracle, phi0, phi1)?;
    let sum = (0..1u64 << oracle.n()).fold(czero::<T>(), |acc, w| {
        acc + view.branch_amplitude(w, oracle.g(w))
    });
    Ok(sum
        .scale(T::lit(1.0 / (1u64 << oracle.n()) as f64))
        .norm_sqr())
}
