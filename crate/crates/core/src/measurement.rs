//! Projective measurements and the readout steps of both algorithms.
//!
//! An x-basis measurement is a Hadamard transform of the measured register,
//! a z-basis measurement, and the inverse transform. Outcome bit 0 means `|+⟩`
//! and bit 1 means `|−⟩`.
//!
//! Randomness is drawn in a fixed order so that a seed reproduces a run:
//! the factored Simon sampler draws `w*`, then the output bits in ascending
//! order, then the x outcome.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evolution::FactoredSimonState;
use crate::oracles::SimonOracle;
use crate::qstate::{check_cap, fwht, fwht_subsystem_in_place, StateVector, Subsystem};
use crate::scalar::{czero, Real};

/// Largest input register the factored Simon sampler will materialize.
pub const FACTORED_SAMPLER_MAX_BITS: usize = 24;

/// Seeded counter-based generator; `(seed, stream)` fully determines the output.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::for_stream(seed, 0)
    }

    /// Independent stream, e.g. one per shot or per trial.
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.random_range(0..n)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Z,
    X,
}

#[derive(Debug, Clone)]
pub struct MeasurementRecord<T: Real> {
    pub basis: Basis,
    pub subsystem: Subsystem,
    pub outcome: u64,
    pub post_state: StateVector<T>,
}

fn register_bits<T: Real>(psi: &StateVector<T>, subsystem: Subsystem) -> usize {
    match subsystem {
        Subsystem::A => psi.num_qubits_a(),
        Subsystem::B => psi.num_qubits_b(),
    }
}

fn outcome_of<T: Real>(psi: &StateVector<T>, subsystem: Subsystem, index: usize) -> usize {
    match subsystem {
        Subsystem::A => index >> psi.num_qubits_b(),
        Subsystem::B => index & ((1 << psi.num_qubits_b()) - 1),
    }
}

/// Born probabilities of the z-basis outcomes of one register.
pub fn outcome_probabilities<T: Real>(psi: &StateVector<T>, subsystem: Subsystem) -> Vec<T> {
    let mut p = vec![T::zero(); 1 << register_bits(psi, subsystem)];
    for (i, a) in psi.amps().iter().enumerate() {
        p[outcome_of(psi, subsystem, i)] += a.norm_sqr();
    }
    p
}

/// Born probabilities of the x-basis outcomes of one register.
pub fn x_outcome_probabilities<T: Real>(psi: &StateVector<T>, subsystem: Subsystem) -> Vec<T> {
    let mut h = psi.clone();
    fwht_subsystem_in_place(&mut h, subsystem);
    outcome_probabilities(&h, subsystem)
}

/// Draw an index with probability `p[i] / Σp`. Fails if the draw lands on a
/// branch with no weight, which only happens through rounding.
fn sample_index<T: Real>(p: &[T], rng: &mut RandomSource) -> Result<usize> {
    let total = p.iter().fold(T::zero(), |acc, &x| acc + x);
    let u = T::lit(rng.uniform()) * total;
    let mut acc = T::zero();
    let mut pick = p.len() - 1;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            pick = i;
            break;
        }
    }
    let weight = p[pick].as_f64();
    if weight.is_nan() || weight <= 0.0 {
        return Err(Error::ZeroProbabilityBranch {
            probability: weight,
        });
    }
    Ok(pick)
}

fn collapse<T: Real>(
    psi: &StateVector<T>,
    subsystem: Subsystem,
    outcome: usize,
    probability: T,
) -> StateVector<T> {
    let mut post = psi.clone();
    let inv = T::one() / probability.sqrt();
    for (i, a) in post.amps_mut().iter_mut().enumerate() {
        *a = if outcome_of(psi, subsystem, i) == outcome {
            a.scale(inv)
        } else {
            czero()
        };
    }
    post
}

pub fn measure_z<T: Real>(
    psi: &StateVector<T>,
    subsystem: Subsystem,
    rng: &mut RandomSource,
) -> Result<MeasurementRecord<T>> {
    let p = outcome_probabilities(psi, subsystem);
    let outcome = sample_index(&p, rng)?;
    Ok(MeasurementRecord {
        basis: Basis::Z,
        subsystem,
        outcome: outcome as u64,
        post_state: collapse(psi, subsystem, outcome, p[outcome]),
    })
}

pub fn measure_x<T: Real>(
    psi: &StateVector<T>,
    subsystem: Subsystem,
    rng: &mut RandomSource,
) -> Result<MeasurementRecord<T>> {
    let mut h = psi.clone();
    fwht_subsystem_in_place(&mut h, subsystem);
    let mut rec = measure_z(&h, subsystem, rng)?;
    fwht_subsystem_in_place(&mut rec.post_state, subsystem);
    rec.basis = Basis::X;
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BvReadout {
    pub restart: bool,
    pub a_candidate: Option<u64>,
}

/// x-measure the output qubit; on `|−⟩` read every input bit in the x basis.
pub fn bv_readout<T: Real>(
    final_state: &StateVector<T>,
    rng: &mut RandomSource,
) -> Result<BvReadout> {
    let b = measure_x(final_state, Subsystem::B, rng)?;
    if b.outcome == 0 {
        return Ok(BvReadout {
            restart: true,
            a_candidate: None,
        });
    }
    let a = measure_x(&b.post_state, Subsystem::A, rng)?;
    Ok(BvReadout {
        restart: false,
        a_candidate: Some(a.outcome),
    })
}

/// Probability that [`bv_readout`] asks for a restart.
pub fn bv_restart_probability<T: Real>(final_state: &StateVector<T>) -> T {
    x_outcome_probabilities(final_state, Subsystem::B)[0]
}

/// z-measure the output register, then x-measure the input register.
pub fn simon_sample<T: Real>(final_state: &StateVector<T>, rng: &mut RandomSource) -> Result<u64> {
    let b = measure_z(final_state, Subsystem::B, rng)?;
    Ok(measure_x(&b.post_state, Subsystem::A, rng)?.outcome)
}

/// Exact distribution of [`simon_sample`] on a materialized state.
pub fn simon_x_distribution<T: Real>(final_state: &StateVector<T>) -> Vec<T> {
    let n_b = final_state.num_qubits_b();
    let n_a = final_state.num_qubits_a();
    let mut dist = vec![T::zero(); 1 << n_a];
    for y in 0..1u64 << n_b {
        let p_y: T = (0..1u64 << n_a).fold(T::zero(), |acc, w| {
            acc + final_state.amplitude(w, y).norm_sqr()
        });
        if p_y == T::zero() {
            continue;
        }
        let post = collapse(final_state, Subsystem::B, y as usize, p_y);
        for (x, q) in x_outcome_probabilities(&post, Subsystem::A)
            .into_iter()
            .enumerate()
        {
            dist[x] += p_y * q;
        }
    }
    dist
}

fn conditional_input_amplitudes<T: Real>(
    view: &FactoredSimonState<'_, T>,
    n: usize,
    y: u64,
) -> Vec<num_complex::Complex<T>> {
    (0..1u64 << n)
        .map(|w| view.branch_amplitude(w, y))
        .collect()
}

/// Draw from the distribution of [`simon_sample`] on
/// `assemble_simon(oracle, φ0, φ1)` without building the `2^{2n−1}` state.
///
/// Cost is O(n·2^n): `w*` uniform, each output bit from its branch qubit,
/// then the input register conditioned on those bits is Hadamard-transformed
/// and sampled.
pub fn simon_sample_factored<T: Real>(
    oracle: &SimonOracle,
    phi0: &StateVector<T>,
    phi1: &StateVector<T>,
    rng: &mut RandomSource,
) -> Result<u64> {
    let n = oracle.n();
    check_cap("factored Simon sampler", n, FACTORED_SAMPLER_MAX_BITS)?;
    let view = FactoredSimonState::new(oracle, phi0, phi1)?;
    let phi = [phi0.amps(), phi1.amps()];

    let w_star = rng.below(1 << n);
    let g = oracle.g(w_star);
    let mut y = 0u64;
    for k in 0..n - 1 {
        let q = phi[((g >> k) & 1) as usize];
        let (p0, p1) = (q[0].norm_sqr(), q[1].norm_sqr());
        if T::lit(rng.uniform()) * (p0 + p1) >= p0 {
            y |= 1 << k;
        }
    }

    let mut alpha = conditional_input_amplitudes(&view, n, y);
    fwht(&mut alpha);
    let p: Vec<T> = alpha.iter().map(|a| a.norm_sqr()).collect();
    Ok(sample_index(&p, rng)? as u64)
}

/// Exact distribution of [`simon_sample_factored`], summed over output strings.
/// Cost O(n·4^n); intended for checking the sampler at small `n`.
pub fn simon_x_distribution_factored<T: Real>(
    oracle: &SimonOracle,
    phi0: &StateVector<T>,
    phi1: &StateVector<T>,
) -> Result<Vec<T>> {
    let n = oracle.n();
    check_cap(
        "exact factored distribution",
        2 * n - 1,
        crate::qstate::DEFAULT_QUBIT_CAP,
    )?;
    let view = FactoredSimonState::new(oracle, phi0, phi1)?;
    let scale = T::one() / T::lit((1u64 << n) as f64);
    let mut dist = vec![T::zero(); 1 << n];
    for y in 0..1u64 << (n - 1) {
        let mut alpha = conditional_input_amplitudes(&view, n, y);
        fwht(&mut alpha);
        for (d, a) in dist.iter_mut().zip(&alpha) {
            *d += a.norm_sqr() * scale;
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{
        assemble_simon, bv_target, evolve_branches, initial_state, simon_target, Schedule,
    };
    use crate::hamiltonians::BlockConvention;
    use crate::oracles::{simon_build, BvMask};
    use crate::qstate::tensor;
    use num_complex::Complex;

    fn dot2(x: u64, a: u64) -> u32 {
        (x & a).count_ones() & 1
    }

    #[test]
    fn random_source_is_reproducible() {
        let mut a = RandomSource::for_stream(9, 3);
        let mut b = RandomSource::for_stream(9, 3);
        let mut c = RandomSource::for_stream(9, 4);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn z_measurement_of_basis_state() {
        let psi = tensor(
            &StateVector::<f64>::basis(2, 1).unwrap(),
            &StateVector::basis(1, 1).unwrap(),
        )
        .unwrap();
        let mut rng = RandomSource::new(1);
        for _ in 0..20 {
            let r = measure_z(&psi, Subsystem::B, &mut rng).unwrap();
            assert_eq!(r.outcome, 1);
            assert!(r.post_state.max_abs_diff(&psi).unwrap() < 1e-15);
        }
    }

    #[test]
    fn simon_output_register_is_uniform_and_collapses_to_coset() {
        let o = simon_build(2, 3, None).unwrap();
        let t = simon_target::<f64>(&o).unwrap();
        let p = outcome_probabilities(&t, Subsystem::B);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);

        let mut rng = RandomSource::new(4);
        for _ in 0..10 {
            let r = measure_z(&t, Subsystem::B, &mut rng).unwrap();
            let y = r.outcome;
            let w_star = (0..4).find(|&w| o.g(w) == y).unwrap();
            let mut expect = StateVector::<f64>::zeros(2, 1).unwrap();
            let c = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let (i, j) = (expect.index(w_star, y), expect.index(w_star ^ 3, y));
            expect.amps_mut()[i] = c;
            expect.amps_mut()[j] = c;
            assert!(r.post_state.max_abs_diff(&expect).unwrap() < 1e-15);
        }
    }

    #[test]
    fn x_measurement_single_qubit() {
        let plus = StateVector::<f64>::plus(1).unwrap();
        let p = x_outcome_probabilities(&plus, Subsystem::A);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1] < 1e-30);
        let mut rng = RandomSource::new(2);
        let r = measure_x(&plus, Subsystem::A, &mut rng).unwrap();
        assert_eq!(r.outcome, 0);
        assert!(r.post_state.max_abs_diff(&plus).unwrap() < 1e-15);

        let zero = StateVector::<f64>::basis(1, 0).unwrap();
        let p = x_outcome_probabilities(&zero, Subsystem::A);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn collapse_is_idempotent() {
        let o = simon_build(3, 6, Some(1)).unwrap();
        let t = simon_target::<f64>(&o).unwrap();
        let mut rng = RandomSource::new(77);
        for _ in 0..10 {
            for sub in [Subsystem::A, Subsystem::B] {
                let r = measure_z(&t, sub, &mut rng).unwrap();
                let p = outcome_probabilities(&r.post_state, sub);
                assert!(p[r.outcome as usize] >= 1.0 - 1e-12);
                let r = measure_x(&t, sub, &mut rng).unwrap();
                let p = x_outcome_probabilities(&r.post_state, sub);
                assert!(p[r.outcome as usize] >= 1.0 - 1e-12);
                assert!((r.post_state.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bv_ideal_restart_probability_is_half() {
        for n in 1..=8 {
            for a in [0u64, 1, (1 << n) - 1] {
                let t = bv_target::<f64>(&BvMask::new(n, a).unwrap()).unwrap();
                assert!((bv_restart_probability(&t) - 0.5).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn bv_readout_recovers_mask_on_minus_branch() {
        let mask = BvMask::new(3, 5).unwrap();
        let t = bv_target::<f64>(&mask).unwrap();
        let mut rng = RandomSource::new(10);
        let mut minus = 0;
        for _ in 0..200 {
            let r = bv_readout(&t, &mut rng).unwrap();
            if !r.restart {
                minus += 1;
                assert_eq!(r.a_candidate, Some(5));
            }
        }
        assert!(minus > 60 && minus < 140);
    }

    #[test]
    fn bv_readout_on_initial_state_always_restarts() {
        let psi = initial_state::<f64>(4, 1).unwrap();
        assert!((bv_restart_probability(&psi) - 1.0).abs() < 1e-12);
        let mut rng = RandomSource::new(3);
        for _ in 0..50 {
            assert!(bv_readout(&psi, &mut rng).unwrap().restart);
        }
    }

    #[test]
    fn simon_ideal_distribution_is_uniform_over_orthogonal_strings() {
        let o = simon_build(3, 5, None).unwrap();
        let t = simon_target::<f64>(&o).unwrap();
        let d = simon_x_distribution(&t);
        for (x, p) in d.iter().enumerate() {
            let expect = if [0b000, 0b010, 0b101, 0b111].contains(&x) {
                0.25
            } else {
                0.0
            };
            assert!((p - expect).abs() < 1e-12, "x={x} p={p}");
        }
        let mut rng = RandomSource::new(8);
        for _ in 0..200 {
            let x = simon_sample(&t, &mut rng).unwrap();
            assert_eq!(dot2(x, 5), 0);
        }
    }

    #[test]
    fn factored_distribution_matches_dense() {
        for n in 2..=3usize {
            for a in 1..1u64 << n {
                let o = simon_build(n, a, Some(a)).unwrap();
                for t in [0.5, 5.0, 50.0] {
                    let (p0, p1) = evolve_branches::<f64>(
                        BlockConvention::Simon,
                        &Schedule::with_density(t).unwrap(),
                    );
                    let dense = simon_x_distribution(&assemble_simon(&o, &p0, &p1).unwrap());
                    let fact = simon_x_distribution_factored(&o, &p0, &p1).unwrap();
                    for (x, y) in dense.iter().zip(&fact) {
                        assert!((x - y).abs() <= 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn factored_ideal_distribution_is_exactly_uniform() {
        let z = StateVector::qubit(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
        let one = StateVector::qubit(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0));
        for n in 2..=4usize {
            for a in 1..1u64 << n {
                let o = simon_build(n, a, None).unwrap();
                let d = simon_x_distribution_factored::<f64>(&o, &z, &one).unwrap();
                let uniform = 1.0 / (1u64 << (n - 1)) as f64;
                let tv: f64 = d
                    .iter()
                    .enumerate()
                    .map(|(x, p)| (p - if dot2(x as u64, a) == 0 { uniform } else { 0.0 }).abs())
                    .sum::<f64>()
                    / 2.0;
                assert!(tv < 1e-12);
            }
        }
    }

    #[test]
    fn identical_branches_carry_no_information() {
        // Register A stays in |+…+⟩, so the Hadamard readout always returns 0.
        let plus = StateVector::<f64>::plus(1).unwrap();
        let o = simon_build(4, 11, None).unwrap();
        let d = simon_x_distribution_factored(&o, &plus, &plus).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12);
        assert!(d[1..].iter().all(|p| p.abs() < 1e-12));
    }

    #[test]
    fn factored_sampler_is_deterministic_and_orthogonal() {
        let o = simon_build(10, 0b1011001101, Some(3)).unwrap();
        let (p0, p1) = evolve_branches::<f64>(BlockConvention::Simon, &Schedule::converged());
        let run = |seed| {
            let mut rng = RandomSource::new(seed);
            (0..50)
                .map(|_| simon_sample_factored(&o, &p0, &p1, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        let xs = run(5);
        assert_eq!(xs, run(5));
        assert!(xs.iter().all(|&x| dot2(x, o.a()) == 0));
    }

    #[test]
    fn factored_sampler_capacity() {
        let o = simon_build(25, 1, None).unwrap();
        let p = StateVector::<f64>::plus(1).unwrap();
        assert!(matches!(
            simon_sample_factored(&o, &p, &p, &mut RandomSource::new(0)),
            Err(Error::Capacity { .. })
        ));
    }
}
