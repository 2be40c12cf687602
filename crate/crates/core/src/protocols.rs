//! End-to-end runs of both algorithms, their classical baselines, and sweeps.
//!
//! A run evolves once (the evolution is deterministic) and then repeats the
//! readout with fresh randomness, which is equivalent to repeating the whole
//! prepare-evolve-measure cycle.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{
    assemble_bv, assemble_simon, bv_factored_fidelity, evolve_branches, evolve_full, initial_state,
    simon_factored_fidelity, Schedule,
};
use crate::gf2::{rank, recover_mask, Gf2Matrix, RecoveryStatus};
use crate::hamiltonians::{BlockConvention, InterpolatedHamiltonian};
use crate::measurement::{
    bv_readout, simon_sample, simon_sample_factored, RandomSource, FACTORED_SAMPLER_MAX_BITS,
};
use crate::oracles::{simon_build, BvMask, Problem, SimonOracle};
use crate::qstate::{StateVector, DEFAULT_QUBIT_CAP, DENSE_OPERATOR_QUBIT_CAP};

/// Default repeat budget for the inner-product problem.
pub const BV_DEFAULT_MAX_REPEATS: u32 = 64;

/// Extra Simon runs allowed beyond `n`.
pub const SIMON_REPEAT_CUSHION: u32 = 40;

/// Stream reserved for drawing a mask when none is given.
const MASK_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionPath {
    Full,
    Factored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: Problem,
    pub n: usize,
    /// Planted mask; drawn from `seed` when absent.
    #[serde(default)]
    pub a: Option<u64>,
    pub total_time: f64,
    pub steps: usize,
    pub path: EvolutionPath,
    pub seed: u64,
    #[serde(default)]
    pub max_repeats: Option<u32>,
    #[serde(default)]
    pub scramble_seed: Option<u64>,
}

impl RunConfig {
    pub fn new(problem: Problem, n: usize) -> Self {
        let sched = Schedule::converged();
        Self {
            problem,
            n,
            a: None,
            total_time: sched.total_time,
            steps: sched.steps,
            path: EvolutionPath::Factored,
            seed: 0,
            max_repeats: None,
            scramble_seed: None,
        }
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::new(self.total_time, self.steps).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn max_repeats(&self) -> u32 {
        self.max_repeats.unwrap_or(match self.problem {
            Problem::Bv => BV_DEFAULT_MAX_REPEATS,
            Problem::Simon => self.n as u32 + SIMON_REPEAT_CUSHION,
        })
    }

    /// Largest `n` the chosen problem and path can handle.
    pub fn max_n(problem: Problem, path: EvolutionPath) -> usize {
        match (problem, path) {
            (Problem::Bv, EvolutionPath::Full) => DENSE_OPERATOR_QUBIT_CAP - 1,
            (Problem::Bv, EvolutionPath::Factored) => DEFAULT_QUBIT_CAP - 1,
            (Problem::Simon, EvolutionPath::Full) => DENSE_OPERATOR_QUBIT_CAP.div_ceil(2),
            (Problem::Simon, EvolutionPath::Factored) => FACTORED_SAMPLER_MAX_BITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min_n = match self.problem {
            Problem::Bv => 1,
            Problem::Simon => 2,
        };
        let max_n = Self::max_n(self.problem, self.path);
        if self.n < min_n || self.n > max_n {
            return Err(Error::Config(format!(
                "n = {} outside {min_n}..={max_n} for {:?} on the {:?} path",
                self.n, self.problem, self.path
            )));
        }
        self.schedule()?;
        if let Some(a) = self.a {
            if a >> self.n != 0 {
                return Err(Error::Config(format!(
                    "mask {a:#x} does not fit in {} bits",
                    self.n
                )));
            }
            if self.problem == Problem::Simon && a == 0 {
                return Err(Error::Config(
                    "Simon's promise needs a positive mask".into(),
                ));
            }
        }
        if self.max_repeats == Some(0) {
            return Err(Error::Config("max_repeats must be at least 1".into()));
        }
        Ok(())
    }

    /// The planted mask: `a` if set, otherwise a uniform draw from the seed
    /// (nonzero for Simon).
    pub fn resolve_mask(&self) -> u64 {
        if let Some(a) = self.a {
            return a;
        }
        let mut rng = RandomSource::for_stream(self.seed, MASK_STREAM);
        match self.problem {
            Problem::Bv => rng.below(1 << self.n),
            Problem::Simon => 1 + rng.below((1 << self.n) - 1),
        }
    }

    /// Copy with the mask filled in, so the record alone reproduces the run.
    pub fn resolved(&self) -> Self {
        Self {
            a: Some(self.resolve_mask()),
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: Problem,
    pub n: usize,
    pub planted_a: u64,
    pub success: bool,
    pub recovered_a: Option<u64>,
    /// Prepare-evolve-measure cycles performed.
    pub quantum_runs: u32,
    /// BV: `|ψ+⟩` outcomes. Simon: runs that did not raise the rank.
    pub restarts: u32,
    /// Simon measurement rows, zero rows included; 0 for BV.
    pub rows_collected: u32,
    /// `|⟨target|ψ(T)⟩|²` for the whole register.
    pub per_run_fidelity: f64,
    /// `|⟨0|φ_0⟩|²` of a single branch, on the factored path.
    pub branch_fidelity: Option<f64>,
    pub norm_drift: f64,
    pub wall_ms: f64,
}

impl RunReport {
    /// Equality on everything except wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        Self {
            wall_ms: 0.0,
            ..self.clone()
        } == Self {
            wall_ms: 0.0,
            ..other.clone()
        }
    }
}

struct Evolved {
    state: Option<StateVector<f64>>,
    branches: Option<(StateVector<f64>, StateVector<f64>)>,
    fidelity: f64,
    branch_fidelity: Option<f64>,
    norm_drift: f64,
}

fn evolve_bv(cfg: &RunConfig, mask: &BvMask) -> Result<Evolved> {
    let sched = cfg.schedule()?;
    match cfg.path {
        EvolutionPath::Factored => {
            let (p0, p1) = evolve_branches::<f64>(BlockConvention::Bv, &sched);
            let drift = (p0.norm_sqr() - 1.0).abs().max((p1.norm_sqr() - 1.0).abs());
            Ok(Evolved {
                fidelity: bv_factored_fidelity(mask, &p0, &p1),
                branch_fidelity: Some(p0.amps()[0].norm_sqr()),
                state: Some(assemble_bv(mask, &p0, &p1)?),
                branches: Some((p0, p1)),
                norm_drift: drift,
            })
        }
        EvolutionPath::Full => {
            let h = InterpolatedHamiltonian::<f64>::bv(mask)?;
            let r = evolve_full(&h, &initial_state(mask.n(), 1)?, &sched)?;
            Ok(Evolved {
                fidelity: r.fidelity_to_target.unwrap_or(f64::NAN),
                branch_fidelity: None,
                state: Some(r.final_state),
                branches: None,
                norm_drift: r.norm_drift,
            })
        }
    }
}

fn evolve_simon(cfg: &RunConfig, oracle: &SimonOracle) -> Result<Evolved> {
    let sched = cfg.schedule()?;
    match cfg.path {
        EvolutionPath::Factored => {
            let (p0, p1) = evolve_branches::<f64>(BlockConvention::Simon, &sched);
            let drift = (p0.norm_sqr() - 1.0).abs().max((p1.norm_sqr() - 1.0).abs());
            Ok(Evolved {
                fidelity: simon_factored_fidelity(oracle, &p0, &p1)?,
                branch_fidelity: Some(p0.amps()[0].norm_sqr()),
                state: None,
                branches: Some((p0, p1)),
                norm_drift: drift,
            })
        }
        EvolutionPath::Full => {
            let h = InterpolatedHamiltonian::<f64>::simon(oracle)?;
            let r = evolve_full(&h, &initial_state(oracle.n(), oracle.n() - 1)?, &sched)?;
            Ok(Evolved {
                fidelity: r.fidelity_to_target.unwrap_or(f64::NAN),
                branch_fidelity: None,
                state: Some(r.final_state),
                branches: None,
                norm_drift: r.norm_drift,
            })
        }
    }
}

/// Repeat the readout until the `|ψ−⟩` branch appears or the budget runs out.
pub fn run_bv(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.problem != Problem::Bv {
        return Err(Error::Config("run_bv needs problem = bv".into()));
    }
    cfg.validate()?;
    let start = Instant::now();
    let mask = BvMask::new(cfg.n, cfg.resolve_mask())?;
    let ev = evolve_bv(cfg, &mask)?;
    let final_state = ev.state.as_ref().expect("BV keeps the assembled state");
    let mut rng = RandomSource::for_stream(cfg.seed, 0);
    let (mut runs, mut restarts, mut recovered) = (0u32, 0u32, None);
    while runs < cfg.max_repeats() {
        runs += 1;
        let r = bv_readout(final_state, &mut rng)?;
        if r.restart {
            restarts += 1;
        } else {
            recovered = r.a_candidate;
            break;
        }
    }
    Ok(RunReport {
        problem: Problem::Bv,
        n: cfg.n,
        planted_a: mask.a(),
        success: recovered == Some(mask.a()),
        recovered_a: recovered,
        quantum_runs: runs,
        restarts,
        rows_collected: 0,
        per_run_fidelity: ev.fidelity,
        branch_fidelity: ev.branch_fidelity,
        norm_drift: ev.norm_drift,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Collect orthogonal rows until they have rank `n − 1`, then solve for the mask.
pub fn run_simon(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.problem != Problem::Simon {
        return Err(Error::Config("run_simon needs problem = simon".into()));
    }
    cfg.validate()?;
    let start = Instant::now();
    let oracle = simon_build(cfg.n, cfg.resolve_mask(), cfg.scramble_seed)?;
    let ev = evolve_simon(cfg, &oracle)?;
    let mut rng = RandomSource::for_stream(cfg.seed, 0);
    let mut rows = Gf2Matrix::new(cfg.n)?;
    let (mut runs, mut restarts, mut current_rank) = (0u32, 0u32, 0usize);
    while runs < cfg.max_repeats() && current_rank + 1 < cfg.n {
        runs += 1;
        let x = match (&ev.branches, &ev.state) {
            (Some((p0, p1)), _) => simon_sample_factored(&oracle, p0, p1, &mut rng)?,
            (None, Some(state)) => simon_sample(state, &mut rng)?,
            (None, None) => unreachable!("evolution produced neither branches nor a state"),
        };
        rows.push(x)?;
        let r = rank(&rows);
        if r == current_rank {
            restarts += 1;
        }
        current_rank = r;
    }
    let recovered = match recover_mask(&rows)? {
        m if m.status == RecoveryStatus::Unique => m.a_candidate,
        _ => None,
    };
    Ok(RunReport {
        problem: Problem::Simon,
        n: cfg.n,
        planted_a: oracle.a(),
        success: recovered == Some(oracle.a()),
        recovered_a: recovered,
        quantum_runs: runs,
        restarts,
        rows_collected: rows.total_rows() as u32,
        per_run_fidelity: ev.fidelity,
        branch_fidelity: ev.branch_fidelity,
        norm_drift: ev.norm_drift,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    match cfg.problem {
        Problem::Bv => run_bv(cfg),
        Problem::Simon => run_simon(cfg),
    }
}

/// Seed of trial `index` under a master seed.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    RandomSource::for_stream(master, index.wrapping_add(1)).next_u64()
}

/// Independent trials of one configuration, in parallel; order follows the trial index.
pub fn run_trials(base: &RunConfig, trials: usize) -> Result<Vec<RunReport>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|i| run(&base.with_seed(trial_seed(base.seed, i))))
        .collect()
}

/// Largest amplitude difference between the full and factored final states.
pub fn compare_paths(cfg: &RunConfig) -> Result<f64> {
    let sched = cfg.schedule()?;
    let a = cfg.resolve_mask();
    let (full, factored) = match cfg.problem {
        Problem::Bv => {
            let mask = BvMask::new(cfg.n, a)?;
            let h = InterpolatedHamiltonian::<f64>::bv(&mask)?;
            let full = evolve_full(&h, &initial_state(cfg.n, 1)?, &sched)?.final_state;
            let (p0, p1) = evolve_branches::<f64>(BlockConvention::Bv, &sched);
            (full, assemble_bv(&mask, &p0, &p1)?)
        }
        Problem::Simon => {
            let oracle = simon_build(cfg.n, a, cfg.scramble_seed)?;
            let h = InterpolatedHamiltonian::<f64>::simon(&oracle)?;
            let full = evolve_full(&h, &initial_state(cfg.n, cfg.n - 1)?, &sched)?.final_state;
            let (p0, p1) = evolve_branches::<f64>(BlockConvention::Simon, &sched);
            (full, assemble_simon(&oracle, &p0, &p1)?)
        }
    };
    Ok(full.max_abs_diff(&factored).expect("same register sizes"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalResult {
    pub queries: u64,
    pub a: u64,
}

/// Query `f` at every power of two; bit `k` of the answer is `f(2^k)`.
pub fn classical_bv(mask: &BvMask) -> ClassicalResult {
    let a = (0..mask.n()).fold(0u64, |acc, k| acc | (mask.f(1 << k) as u64) << k);
    ClassicalResult {
        queries: mask.n() as u64,
        a,
    }
}

/// Query distinct random inputs until two collide; their xor is the mask.
pub fn classical_simon(oracle: &SimonOracle, rng: &mut RandomSource) -> ClassicalResult {
    let domain = 1u64 << oracle.n();
    let mut asked = HashSet::new();
    let mut seen: HashMap<u64, u64> = HashMap::new();
    loop {
        let w = rng.below(domain);
        if !asked.insert(w) {
            continue;
        }
        if let Some(&y) = seen.get(&oracle.g(w)) {
            return ClassicalResult {
                queries: asked.len() as u64,
                a: w ^ y,
            };
        }
        seen.insert(oracle.g(w), w);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    N,
    #[serde(rename = "T")]
    Time,
    Steps,
}

/// Aggregates over the trials at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_fidelity: f64,
    /// Simon: rows collected. BV: quantum runs.
    pub mean_rows: f64,
    pub mean_restarts: f64,
    pub wall_ms: f64,
}

impl SweepRow {
    pub fn same_outcome(&self, other: &Self) -> bool {
        Self {
            wall_ms: 0.0,
            ..*self
        } == Self {
            wall_ms: 0.0,
            ..*other
        }
    }
}

/// Configuration used at one sweep point. Along the runtime axis the step
/// count is scaled with `T` so the step width stays that of `base`.
pub fn sweep_point(axis: SweepAxis, value: f64, base: &RunConfig) -> Result<RunConfig> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::N => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!(
                    "n must be a positive integer, got {value}"
                )));
            }
            cfg.n = value as usize;
        }
        SweepAxis::Time => {
            cfg.total_time = value;
            cfg.steps = ((base.steps as f64 * value / base.total_time).round() as usize).max(1);
        }
        SweepAxis::Steps => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!(
                    "steps must be a positive integer, got {value}"
                )));
            }
            cfg.steps = value as usize;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn sweep(
    axis: SweepAxis,
    values: &[f64],
    base: &RunConfig,
    trials: usize,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    if trials == 0 {
        return Err(Error::Config("sweep needs at least one trial".into()));
    }
    values
        .iter()
        .map(|&v| {
            let cfg = sweep_point(axis, v, base)?;
            let start = Instant::now();
            let reports = run_trials(&cfg, trials)?;
            let k = reports.len() as f64;
            let mean = |f: &dyn Fn(&RunReport) -> f64| reports.iter().map(f).sum::<f64>() / k;
            Ok(SweepRow {
                axis_value: v,
                trials,
                success_rate: mean(&|r| r.success as u8 as f64),
                mean_fidelity: mean(&|r| r.per_run_fidelity),
                mean_rows: mean(&|r| match r.problem {
                    Problem::Bv => r.quantum_runs as f64,
                    Problem::Simon => r.rows_collected as f64,
                }),
                mean_restarts: mean(&|r| r.restarts as f64),
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}
