//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use adiabatic_sim::evolution::{
    bv_target, evolve_branches, evolve_full, evolve_two_level, initial_state, Schedule,
};
use adiabatic_sim::gf2::dot2;
use adiabatic_sim::hamiltonians::{
    gap_closed_form, min_gap_scan, two_level_gap_profile, BlockConvention, InterpolatedHamiltonian,
    TwoLevelBlock,
};
use adiabatic_sim::measurement::{
    bv_readout, bv_restart_probability, simon_sample_factored, simon_x_distribution_factored,
    RandomSource,
};
use adiabatic_sim::oracles::{simon_build, BvMask, Problem};
use adiabatic_sim::protocols::{
    classical_simon, compare_paths, run, run_trials, EvolutionPath, RunConfig,
};
use adiabatic_sim::StateVector64;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: adiabatic_sim::Error) -> String {
    e.to_string()
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn median(v: &mut [u64]) -> f64 {
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] + v[m]) as f64 / 2.0
    }
}

fn qubit_diff(a: &StateVector64, b: &StateVector64) -> f64 {
    a.max_abs_diff(b).expect("both are single qubits")
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for t in [1.0, 5.0, 50.0] {
        let steps = (100.0 * t) as usize;
        for n in 2..=4usize {
            for a in 0..1u64 << n {
                let cfg = RunConfig {
                    a: Some(a),
                    total_time: t,
                    steps,
                    ..RunConfig::new(Problem::Bv, n)
                };
                worst = worst.max(compare_paths(&cfg).map_err(err)?);
            }
        }
        for n in 2..=3usize {
            for a in 1..1u64 << n {
                let cfg = RunConfig {
                    a: Some(a),
                    total_time: t,
                    steps,
                    ..RunConfig::new(Problem::Simon, n)
                };
                worst = worst.max(compare_paths(&cfg).map_err(err)?);
            }
        }
    }
    ensure(worst <= 1e-8, format!("max deviation {worst:.3e} > 1e-8"))?;
    Ok(format!(
        "max amplitude deviation {worst:.3e} over all masks"
    ))
}

fn criterion_2() -> Outcome {
    let profile = two_level_gap_profile::<f64>(1000).map_err(err)?;
    let mut worst: f64 = 0.0;
    for (s, g, _) in &profile {
        let analytic = ((1.0 - s) * (1.0 - s) + s * s).sqrt();
        worst = worst.max((g - analytic).abs());
        worst = worst.max((gap_closed_form(*s) - analytic).abs());
    }
    ensure(worst <= 1e-12, format!("two-level gap off by {worst:.3e}"))?;

    let target = std::f64::consts::FRAC_1_SQRT_2;
    let bv = InterpolatedHamiltonian::<f64>::bv(&BvMask::new(2, 2).map_err(err)?).map_err(err)?;
    let simon = InterpolatedHamiltonian::<f64>::simon(&simon_build(2, 3, None).map_err(err)?)
        .map_err(err)?;
    let mut parts = Vec::new();
    for (name, h) in [("bv", bv), ("simon", simon)] {
        let scan = min_gap_scan(&h, 201).map_err(err)?;
        ensure(
            (scan.gap_min - target).abs() <= 1e-3 && (scan.s_min - 0.5).abs() <= 5e-3,
            format!("{name}: gap_min {} at s {}", scan.gap_min, scan.s_min),
        )?;
        parts.push(format!("{name} {:.6}@{:.3}", scan.gap_min, scan.s_min));
    }
    Ok(format!(
        "two-level error {worst:.1e}; dense minima {}",
        parts.join(", ")
    ))
}

fn criterion_3() -> Outcome {
    let mut branch = Vec::new();
    let mut whole = Vec::new();
    for n in 2..=10usize {
        let cfg = RunConfig::new(Problem::Bv, n).with_seed(n as u64);
        let r = run(&cfg).map_err(err)?;
        branch.push(
            r.branch_fidelity
                .ok_or("factored run lacks branch fidelity")?,
        );
        whole.push(r.per_run_fidelity);
    }
    let f0 = branch[0];
    ensure(f0 >= 0.999, format!("branch fidelity {f0} < 0.999"))?;
    let spread = branch
        .iter()
        .chain(&whole)
        .map(|f| (f - f0).abs())
        .fold(0.0, f64::max);
    ensure(
        spread <= 1e-12,
        format!("fidelity varies across n by {spread:.3e}"),
    )?;

    let mut full_spread: f64 = 0.0;
    for n in 2..=4usize {
        let cfg = RunConfig {
            path: EvolutionPath::Full,
            ..RunConfig::new(Problem::Bv, n).with_seed(n as u64)
        };
        full_spread = full_spread.max((run(&cfg).map_err(err)?.per_run_fidelity - f0).abs());
    }
    ensure(
        full_spread <= 1e-8,
        format!("full path differs by {full_spread:.3e}"),
    )?;
    Ok(format!(
        "fidelity {f0:.6} for n = 2..10 (spread {spread:.1e}), full path within {full_spread:.1e}"
    ))
}

fn criterion_4() -> Outcome {
    for n in 1..=10usize {
        let ideal = bv_target::<f64>(&BvMask::new(n, (1 << n) - 1).map_err(err)?).map_err(err)?;
        let p = bv_restart_probability(&ideal);
        ensure(
            (p - 0.5).abs() <= 1e-12,
            format!("ideal restart probability {p} at n = {n}"),
        )?;
    }

    let shots = 10_000u64;
    let mut restarts = 0u64;
    let mut wrong = 0u64;
    let mut rng = RandomSource::new(2024);
    let sched = Schedule::converged();
    let (p0, p1) = evolve_branches::<f64>(BlockConvention::Bv, &sched);
    for n in [2usize, 5, 10] {
        let mask = BvMask::new(n, rng.below(1 << n)).map_err(err)?;
        let state = adiabatic_sim::evolution::assemble_bv(&mask, &p0, &p1).map_err(err)?;
        for _ in 0..shots {
            let r = bv_readout(&state, &mut rng).map_err(err)?;
            match r.a_candidate {
                None => restarts += 1,
                Some(a) if a != mask.a() => wrong += 1,
                Some(_) => {}
            }
        }
    }
    let frac = restarts as f64 / (3 * shots) as f64;
    ensure(
        (0.48..=0.52).contains(&frac),
        format!("restart fraction {frac}"),
    )?;
    ensure(
        wrong == 0,
        format!("{wrong} ψ− readouts gave the wrong mask"),
    )?;

    let cfg = RunConfig {
        max_repeats: Some(10),
        ..RunConfig::new(Problem::Bv, 6).with_seed(99)
    };
    let reports = run_trials(&cfg, 10_000).map_err(err)?;
    let failures = reports.iter().filter(|r| !r.success).count() as f64 / reports.len() as f64;
    ensure(
        failures <= 0.004,
        format!("failure fraction {failures} at max_repeats = 10"),
    )?;
    let mean_runs = RunConfig {
        max_repeats: None,
        ..cfg
    };
    let runs = run_trials(&mean_runs, 10_000).map_err(err)?;
    let mean = runs.iter().map(|r| r.quantum_runs as f64).sum::<f64>() / runs.len() as f64;
    Ok(format!(
        "ideal restart 0.5; empirical restart {frac:.4}; 0 wrong masks; failure at r=10 {failures:.4}; mean runs {mean:.3}"
    ))
}

fn criterion_5() -> Outcome {
    let sched = Schedule::converged();
    let (p0, p1) = evolve_branches::<f64>(BlockConvention::Simon, &sched);
    let mut leak: f64 = 0.0;
    for n in 2..=4usize {
        for a in 1..1u64 << n {
            let o = simon_build(n, a, None).map_err(err)?;
            let d = simon_x_distribution_factored(&o, &p0, &p1).map_err(err)?;
            let bad: f64 = d
                .iter()
                .enumerate()
                .filter(|(x, _)| dot2(*x as u64, a) == 1)
                .map(|(_, p)| p)
                .sum();
            leak = leak.max(bad);
        }
    }
    ensure(
        leak <= 1e-12,
        format!("non-orthogonal probability {leak:.3e} for n ≤ 4"),
    )?;

    let mut rng = RandomSource::new(5);
    let (mut shots, mut orth) = (0u64, 0u64);
    for n in [6usize, 8, 10] {
        let o = simon_build(n, 1 + rng.below((1 << n) - 1), Some(n as u64)).map_err(err)?;
        for _ in 0..3000 {
            let x = simon_sample_factored(&o, &p0, &p1, &mut rng).map_err(err)?;
            shots += 1;
            orth += (dot2(x, o.a()) == 0) as u64;
        }
    }
    let orth_frac = orth as f64 / shots as f64;
    ensure(
        orth_frac >= 0.99,
        format!("orthogonal fraction {orth_frac}"),
    )?;

    let mut lines = Vec::new();
    for n in [4usize, 6, 8, 10] {
        let cfg = RunConfig::new(Problem::Simon, n).with_seed(1000 + n as u64);
        let reports = run_trials(&cfg, 1000).map_err(err)?;
        let within = reports
            .iter()
            .filter(|r| r.success && r.rows_collected as usize <= n + 20)
            .count();
        let wrong = reports
            .iter()
            .filter(|r| r.recovered_a.is_some() && !r.success)
            .count();
        let frac = within as f64 / reports.len() as f64;
        ensure(
            frac >= 0.95,
            format!("n = {n}: only {frac} finished within n+20 runs"),
        )?;
        ensure(
            wrong == 0,
            format!("n = {n}: {wrong} completed trials recovered the wrong mask"),
        )?;
        lines.push(format!("n={n}:{frac:.3}"));
    }
    Ok(format!(
        "leak {leak:.1e}; orthogonal shots {orth_frac:.4}; within n+20 {}",
        lines.join(" ")
    ))
}

fn criterion_6() -> Outcome {
    let ns: Vec<usize> = (6..=14).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let classical: Vec<f64> = ns
        .par_iter()
        .map(|&n| {
            let mut rng = RandomSource::for_stream(6, n as u64);
            let o =
                simon_build(n, 1 + rng.below((1 << n) - 1), Some(n as u64)).expect("valid oracle");
            let mut q: Vec<u64> = (0..1000)
                .map(|_| classical_simon(&o, &mut rng).queries)
                .collect();
            median(&mut q).log2()
        })
        .collect();
    let quantum: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let cfg = RunConfig::new(Problem::Simon, n).with_seed(600 + n as u64);
            let reports = run_trials(&cfg, 200).map_err(err)?;
            Ok(reports.iter().map(|r| r.rows_collected as f64).sum::<f64>() / reports.len() as f64)
        })
        .collect::<Result<_, String>>()?;
    let (cs, qs) = (slope(&xs, &classical), slope(&xs, &quantum));
    ensure(
        (cs - 0.5).abs() <= 0.1,
        format!("classical log2-slope {cs:.3}"),
    )?;
    ensure(
        (qs - 1.0).abs() <= 0.3,
        format!("quantum rows slope {qs:.3}"),
    )?;
    Ok(format!(
        "classical log2 median slope {cs:.3}; quantum rows slope {qs:.3}"
    ))
}

fn criterion_7() -> Outcome {
    let mut drift: f64 = 0.0;
    for t in [1.0, 5.0, 50.0] {
        let sched = Schedule::with_density(t).map_err(err)?;
        for conv in [BlockConvention::Bv, BlockConvention::Simon] {
            let (p0, p1) = evolve_branches::<f64>(conv, &sched);
            drift = drift
                .max((p0.norm_sqr() - 1.0).abs())
                .max((p1.norm_sqr() - 1.0).abs());
        }
        let mask = BvMask::new(3, 5).map_err(err)?;
        let h = InterpolatedHamiltonian::<f64>::bv(&mask).map_err(err)?;
        let r = evolve_full(&h, &initial_state(3, 1).map_err(err)?, &sched).map_err(err)?;
        drift = drift.max(r.norm_drift);
        let o = simon_build(3, 6, None).map_err(err)?;
        let h = InterpolatedHamiltonian::<f64>::simon(&o).map_err(err)?;
        let r = evolve_full(&h, &initial_state(3, 2).map_err(err)?, &sched).map_err(err)?;
        drift = drift.max(r.norm_drift);
    }
    ensure(drift <= 1e-9, format!("norm drift {drift:.3e}"))?;

    let block = TwoLevelBlock::bv(0);
    let reference = evolve_two_level::<f64>(&block, &Schedule::new(50.0, 1 << 18).map_err(err)?);
    let errors: Vec<f64> = [500usize, 1000, 2000, 4000]
        .iter()
        .map(|&n| {
            let s =
                evolve_two_level::<f64>(&block, &Schedule::new(50.0, n).expect("valid schedule"));
            qubit_diff(&s, &reference)
        })
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(
        ratios.iter().all(|r| (r - 4.0).abs() <= 1.0),
        format!("error ratios {ratios:?}"),
    )?;
    Ok(format!(
        "max norm drift {drift:.1e}; error ratios per doubling {}",
        ratios
            .iter()
            .map(|r| format!("{r:.3}"))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    for t in [1.0, 5.0, 50.0] {
        for steps in [Schedule::with_density(t).map_err(err)?.steps, 5000] {
            let sched = Schedule::new(t, steps).map_err(err)?;
            for conv in [BlockConvention::Bv, BlockConvention::Simon] {
                let (p0, p1) = evolve_branches::<f64>(conv, &sched);
                let flipped = StateVector64::qubit(p0.amps()[1], p0.amps()[0]);
                worst = worst.max(qubit_diff(&p1, &flipped));
            }
        }
    }
    ensure(worst <= 1e-12, format!("|φ1 − σx φ0| = {worst:.3e}"))?;
    Ok(format!("max |φ1 − σx φ0| = {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("full vs factored equivalence", criterion_1),
        ("minimum gap", criterion_2),
        ("n-independent fidelity", criterion_3),
        ("BV readout statistics", criterion_4),
        ("Simon orthogonality and query count", criterion_5),
        ("classical/quantum separation", criterion_6),
        ("integrator contract", criterion_7),
        ("phase coherence", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
