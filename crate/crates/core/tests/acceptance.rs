//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the report is printed by a
//! normal `cargo test`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lvnm::certify::{lower_bound, BoundMethod};
use lvnm::linalg::mat3_rank;
use lvnm::pauli::{slice_family, to_pauli, Pairing};
use lvnm::settings::{decomposition_search, paper_decomposition, setting_operator, MeasurementSetting, PaperDecomposition};
use lvnm::simulate::estimate_witness;
use lvnm::states::{
    ghz_state, random_biseparable_state, random_local_unitary, random_product_state, schmidt_state, w_state,
    white_noise_mix, Bipartition, DensityMatrix, PureState,
};
use lvnm::witnesses::{
    classify, expectation, lambda_minus, noise_threshold, ppt_check, witness_ghz, witness_phi, witness_w0, witness_w1,
    witness_w2, Witness,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

const VALUE_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-10;
const BOUND_TIME: Duration = Duration::from_secs(10);
const LAMBDA_TOL: f64 = 1e-9;
const NPT_TOL: f64 = 1e-9;
const THRESHOLD_TOL: f64 = 1e-10;
const BISECTION_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-9;
const SLICE_RANK_TOL: f64 = 1e-8;
const SIGMA_FACTOR: f64 = 5.0;
const RATIO_TARGET: f64 = 0.5;
const RATIO_SLACK: f64 = 0.1;
const SEARCH_RESIDUAL: f64 = 1e-8;

/// Published seed for the search criterion.
const SEARCH_SEED: u64 = 2002;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn catalog() -> Vec<Witness> {
    vec![witness_w0(), witness_phi(0.6, 0.8).unwrap(), witness_ghz(), witness_w1(), witness_w2()]
}

fn witness_values() -> Outcome {
    let cases = [
        (witness_ghz(), ghz_state(), -0.25),
        (witness_w1(), w_state(), -1.0 / 3.0),
        (witness_w2(), ghz_state(), -0.5),
    ];
    let mut worst: f64 = 0.0;
    for (w, psi, want) in cases {
        let v = expectation(&w, &psi.density()).map_err(|e| e.to_string())?;
        worst = worst.max((v - want).abs());
        check((v - want).abs() < VALUE_TOL, || format!("{}: {v} != {want}", w.name))?;
    }
    Ok(format!("max deviation {worst:.1e}"))
}

fn decomposition_reconstruction() -> Outcome {
    let cases = [
        (PaperDecomposition::Anton { alpha: FRAC_1_SQRT_2, beta: -FRAC_1_SQRT_2 }, 3),
        (PaperDecomposition::Anton { alpha: 0.6, beta: 0.8 }, 3),
        (PaperDecomposition::Ghz, 4),
        (PaperDecomposition::W1, 5),
        (PaperDecomposition::W2, 4),
        (PaperDecomposition::Sanpera5 { alpha: 0.6, beta: 0.8 }, 4),
    ];
    let mut worst: f64 = 0.0;
    for (which, count) in cases {
        let d = paper_decomposition(which).map_err(|e| e.to_string())?;
        worst = worst.max(d.residual);
        check(d.residual < RESIDUAL_TOL, || format!("{}: residual {:e}", which.name(), d.residual))?;
        check(d.n_settings() == count, || format!("{}: {} settings, want {count}", which.name(), d.n_settings()))?;
    }
    Ok(format!("counts 3/4/5/4/4, max residual {worst:.1e}"))
}

fn setting_lower_bounds() -> Outcome {
    let cases = [(witness_w0(), 3, 3, BoundMethod::SpanDim), (witness_ghz(), 4, 3, BoundMethod::SpanDimPlusOne), (witness_w1(), 5, 4, BoundMethod::SpanDimPlusOne)];
    let mut times = Vec::new();
    for (w, bound, span, method) in cases {
        let start = Instant::now();
        let c = lower_bound(&w).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        times.push(format!("{}={}ms", w.name, took.as_millis()));
        check(c.bound == bound && c.span_dimension == span && c.method == method, || format!("{}: {c:?}", w.name))?;
        if method == BoundMethod::SpanDimPlusOne {
            check(c.rank_one_span_dimension == 1, || format!("{}: rank-one span {}", w.name, c.rank_one_span_dimension))?;
        }
        check(took < BOUND_TIME, || format!("{} took {took:?}", w.name))?;
    }
    Ok(format!("bounds 3/4/5 ({})", times.join(", ")))
}

fn noisy_schmidt(a: f64, p: f64) -> DensityMatrix {
    let b = (1.0 - a * a).sqrt();
    white_noise_mix(&schmidt_state(a, b).unwrap(), p).unwrap()
}

fn lambda_and_ppt() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [0.3, FRAC_1_SQRT_2, 0.9] {
        let b = (1.0 - a * a).sqrt();
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let rho = noisy_schmidt(a, p);
            let (min, _) = ppt_check(&rho, Bipartition::AB).map_err(|e| e.to_string())?;
            let lm = lambda_minus(a, b, p).map_err(|e| e.to_string())?;
            worst = worst.max((min - lm).abs());
            check((min - lm).abs() < LAMBDA_TOL, || format!("a={a}, p={p}: {min} vs {lm}"))?;
        }
    }
    // smallest p at which the partial transpose turns negative
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let (min, _) = ppt_check(&noisy_schmidt(FRAC_1_SQRT_2, mid), Bipartition::AB).map_err(|e| e.to_string())?;
        if min < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    check((p - 1.0 / 3.0).abs() < NPT_TOL, || format!("NPT threshold {p}"))?;
    Ok(format!("63 grid points within {worst:.1e}, NPT threshold {p:.12}"))
}

fn bisect_threshold(w: &Witness, psi: &PureState) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if expectation(w, &white_noise_mix(psi, mid).unwrap()).unwrap() < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn noise_thresholds() -> Outcome {
    let cases = [
        (witness_ghz(), ghz_state(), 5.0 / 7.0),
        (witness_w1(), w_state(), 13.0 / 21.0),
        (witness_w2(), ghz_state(), 3.0 / 7.0),
    ];
    let mut found = Vec::new();
    for (w, psi, want) in cases {
        let p = noise_threshold(&w, &psi).map_err(|e| e.to_string())?;
        check((p - want).abs() < THRESHOLD_TOL, || format!("{}: {p} != {want}", w.name))?;
        let b = bisect_threshold(&w, &psi);
        check((b - p).abs() < BISECTION_TOL, || format!("{}: bisection {b} vs {p}", w.name))?;
        found.push(format!("{}={p:.10}", w.name));
    }
    Ok(found.join(", "))
}

fn positivity() -> Outcome {
    let mut min = f64::INFINITY;
    for w in catalog() {
        for seed in 0..10_000u64 {
            let rho = random_product_state(w.n_qubits, seed).unwrap().density();
            let v = expectation(&w, &rho).map_err(|e| e.to_string())?;
            min = min.min(v);
            check(v >= -POSITIVITY_TOL, || format!("{} on product seed {seed}: {v}", w.name))?;
        }
    }
    for w in [witness_w1(), witness_ghz()] {
        for cut in [Bipartition::ABc, Bipartition::BAc, Bipartition::CAb] {
            for seed in 0..1_000u64 {
                let rho = random_biseparable_state(cut, seed).map_err(|e| e.to_string())?;
                let v = expectation(&w, &rho).map_err(|e| e.to_string())?;
                min = min.min(v);
                check(v >= -POSITIVITY_TOL, || format!("{} on {cut} seed {seed}: {v}", w.name))?;
            }
        }
    }
    Ok(format!("5x10^4 product + 6x10^3 biseparable states, min value {min:.3e}"))
}

fn random_setting(rng: &mut ChaCha20Rng) -> MeasurementSetting {
    let dirs: Vec<[f64; 3]> = (0..3).map(|_| [0; 3].map(|_| rng.sample::<f64, _>(StandardNormal))).collect();
    let weights = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
    MeasurementSetting::new(&dirs, weights).unwrap()
}

fn rank_one_settings() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    for trial in 0..1_000 {
        let s = random_setting(&mut rng);
        let c = to_pauli(&setting_operator(&s), 3).map_err(|e| e.to_string())?;
        for p in Pairing::THREE_QUBIT {
            for (k, m) in slice_family(&c, p).map_err(|e| e.to_string())?.matrices.iter().enumerate() {
                let r = mat3_rank(m, SLICE_RANK_TOL);
                check(r <= 1, || format!("trial {trial}, pairing {p}, slice {k}: rank {r}"))?;
            }
        }
    }
    Ok("10^3 settings x 3 pairings x 4 slices, all rank <= 1".into())
}

fn simulator_statistics() -> Outcome {
    let d = paper_decomposition(PaperDecomposition::Ghz).map_err(|e| e.to_string())?;
    let rho = ghz_state().density();
    let mut inside = 0;
    for seed in 0..100 {
        let r = estimate_witness(&rho, &d, 100_000, seed).map_err(|e| e.to_string())?;
        if (r.estimate + 0.25).abs() <= SIGMA_FACTOR * r.std_error {
            inside += 1;
        }
    }
    check(inside >= 99, || format!("only {inside}/100 seeds within 5 sigma"))?;
    let n = 10_000;
    let mut ratio = 0.0;
    for seed in 0..50 {
        let small = estimate_witness(&rho, &d, n, seed).map_err(|e| e.to_string())?;
        let large = estimate_witness(&rho, &d, 4 * n, 1_000 + seed).map_err(|e| e.to_string())?;
        ratio += large.std_error / small.std_error / 50.0;
    }
    check((ratio - RATIO_TARGET).abs() <= RATIO_SLACK * RATIO_TARGET, || format!("std_error ratio {ratio}"))?;
    Ok(format!("{inside}/100 within 5 sigma, mean std_error ratio {ratio:.4}"))
}

fn local_rotation_invariance() -> Outcome {
    let states3 = [ghz_state().density(), w_state().density(), DensityMatrix::maximally_mixed(3)];
    let states2 = [
        schmidt_state(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap().density(),
        schmidt_state(0.6, 0.8).unwrap().density(),
        DensityMatrix::maximally_mixed(2),
    ];
    for w in catalog() {
        let base = lower_bound(&w).map_err(|e| e.to_string())?;
        let states = if w.n_qubits == 3 { &states3 } else { &states2 };
        let labels: Vec<_> = states.iter().map(|r| classify(&w, expectation(&w, r).unwrap()).label).collect();
        for seed in 0..10 {
            let u = random_local_unitary(w.n_qubits, seed).unwrap();
            let rotated = w.conjugated(&u).map_err(|e| e.to_string())?;
            let c = lower_bound(&rotated).map_err(|e| e.to_string())?;
            check(c.bound == base.bound, || format!("{} seed {seed}: bound {} vs {}", w.name, c.bound, base.bound))?;
            for (rho, label) in states.iter().zip(&labels) {
                let moved = rho.conjugated(&u).map_err(|e| e.to_string())?;
                let got = classify(&rotated, expectation(&rotated, &moved).unwrap()).label;
                check(got == *label, || format!("{} seed {seed}: label {got} vs {label}", w.name))?;
            }
        }
    }
    Ok("5 witnesses x 10 rotations: bounds and labels unchanged".into())
}

fn search_capability() -> Outcome {
    let c = to_pauli(&witness_ghz().operator, 3).map_err(|e| e.to_string())?;
    let four = decomposition_search(&c, 4, 200, SEARCH_SEED).map_err(|e| e.to_string())?;
    check(four.success && four.best_residual < SEARCH_RESIDUAL, || format!("4 settings: residual {:e}", four.best_residual))?;
    let three = decomposition_search(&c, 3, 200, SEARCH_SEED).map_err(|e| e.to_string())?;
    check(!three.success, || format!("3 settings unexpectedly succeeded ({:e})", three.best_residual))?;
    Ok(format!(
        "seed {SEARCH_SEED}: 4 settings residual {:.1e} at restart {}, 3 settings best {:.3e}",
        four.best_residual, four.best_restart, three.best_residual
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("witness values", witness_values),
        ("decomposition reconstruction", decomposition_reconstruction),
        ("setting lower bounds", setting_lower_bounds),
        ("lambda_minus and PPT", lambda_and_ppt),
        ("white-noise thresholds", noise_thresholds),
        ("positivity on separable states", positivity),
        ("rank-one setting slices", rank_one_settings),
        ("simulator statistics", simulator_statistics),
        ("local-rotation invariance", local_rotation_invariance),
        ("search capability", search_capability),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{secs:.2}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{secs:.2}s]: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
