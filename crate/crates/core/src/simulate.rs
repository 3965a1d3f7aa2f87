//! Shot-limited measurement of a decomposed witness.
//!
//! Each setting is measured `shots` times; its contribution is the weighted
//! mean of the observed outcomes. Setting `i` draws from stream `i` of a
//! ChaCha20 generator keyed by the seed, so parallel and sequential runs agree.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::settings::{LocalDecomposition, MeasurementSetting, VERIFY_TOL};
use crate::states::DensityMatrix;

const PROB_TOL: f64 = 1e-10;

/// How the shot budget is spread over settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Allocation {
    /// The same number of shots for every setting.
    #[default]
    #[serde(rename = "uniform")]
    Uniform,
    /// Total budget `shots * n_settings` split in proportion to `sum |c|`.
    #[serde(rename = "weight-proportional")]
    WeightProportional,
}

impl Allocation {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Allocation::Uniform),
            "weight-proportional" => Ok(Allocation::WeightProportional),
            other => Err(Error::InvalidParameter(format!("unknown allocation '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingReport {
    pub index: usize,
    pub shots: u64,
    /// Counts keyed by outcome bitstring, party A first.
    pub counts: BTreeMap<String, u64>,
    pub contribution: f64,
    /// Variance of `contribution`: plug-in variance of the weighted outcome over shots.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
    pub allocation: Allocation,
    pub per_setting: Vec<SettingReport>,
}

/// Born-rule probabilities of every outcome of `s` on `rho`.
pub fn outcome_probabilities(rho: &DensityMatrix, s: &MeasurementSetting) -> Result<Vec<f64>> {
    if rho.n_qubits() != s.n_parties() {
        return Err(Error::DimensionMismatch {
            expected: rho.n_qubits(),
            got: s.n_parties(),
        });
    }
    let mut p = Vec::with_capacity(1 << s.n_parties());
    for o in 0..1usize << s.n_parties() {
        let v = s.outcome_projector(o).trace_product(rho.matrix())?.re;
        p.push(if v < 0.0 && v >= -1e-12 { 0.0 } else { v });
    }
    Ok(p)
}

/// One multinomial draw of `shots` outcomes, as a chain of binomials.
pub fn sample_counts(p: &[f64], shots: u64, seed: u64) -> Result<Vec<u64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    sample_counts_with(p, shots, &mut rng)
}

fn validate(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptyInput("probability vector"));
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < -1e-12) {
        return Err(Error::InvalidProbabilities(format!("entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidProbabilities(format!("sum {total}")));
    }
    Ok(())
}

fn sample_counts_with(p: &[f64], shots: u64, rng: &mut ChaCha20Rng) -> Result<Vec<u64>> {
    validate(p)?;
    let mut counts = vec![0u64; p.len()];
    let mut left = shots;
    let mut mass = 1.0;
    for (i, &pi) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == p.len() {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 { (pi.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(left, q)
            .map_err(|e| Error::InvalidProbabilities(e.to_string()))?
            .sample(rng);
        counts[i] = k;
        left -= k;
        mass -= pi.max(0.0);
    }
    Ok(counts)
}

/// `sum_settings sum_outcomes c * p`, the infinite-shot limit of the estimator.
pub fn exact_estimate(rho: &DensityMatrix, d: &LocalDecomposition) -> Result<f64> {
    let mut total = 0.0;
    for s in &d.settings {
        let p = outcome_probabilities(rho, s)?;
        total += p.iter().zip(s.weights()).map(|(p, c)| p * c).sum::<f64>();
    }
    Ok(total)
}

/// Uniform allocation with `shots_per_setting` shots each.
pub fn estimate_witness(rho: &DensityMatrix, d: &LocalDecomposition, shots_per_setting: u64, seed: u64) -> Result<EstimateReport> {
    estimate_witness_with(rho, d, shots_per_setting, seed, Allocation::Uniform)
}

pub fn estimate_witness_with(
    rho: &DensityMatrix,
    d: &LocalDecomposition,
    shots_per_setting: u64,
    seed: u64,
    allocation: Allocation,
) -> Result<EstimateReport> {
    if !(d.residual < VERIFY_TOL) {
        return Err(Error::UnverifiedDecomposition(d.residual));
    }
    if shots_per_setting == 0 {
        return Err(Error::InvalidParameter("shots must be positive".into()));
    }
    if d.settings.is_empty() {
        return Err(Error::EmptyInput("decomposition has no settings"));
    }
    let shots = allocate(d, shots_per_setting, allocation);
    let per_setting: Vec<SettingReport> = d
        .settings
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let p = outcome_probabilities(rho, s)?;
            let counts = sample_counts_with(&p, shots[i], &mut rng)?;
            Ok(summarize(i, s, shots[i], &counts))
        })
        .collect::<Result<_>>()?;
    let estimate = per_setting.iter().map(|r| r.contribution).sum();
    let std_error = per_setting.iter().map(|r| r.variance).sum::<f64>().sqrt();
    Ok(EstimateReport {
        estimate,
        std_error,
        seed,
        allocation,
        per_setting,
    })
}

fn summarize(index: usize, s: &MeasurementSetting, shots: u64, counts: &[u64]) -> SettingReport {
    let (mean, second) = if shots == 0 {
        (0.0, 0.0)
    } else {
        let n = shots as f64;
        counts.iter().zip(s.weights()).fold((0.0, 0.0), |(m, q), (&k, &c)| {
            let f = k as f64 / n;
            (m + c * f, q + c * c * f)
        })
    };
    let variance = if shots == 0 { 0.0 } else { (second - mean * mean).max(0.0) / shots as f64 };
    SettingReport {
        index,
        shots,
        counts: counts.iter().enumerate().map(|(o, &k)| (s.outcome_label(o), k)).collect(),
        contribution: mean,
        variance,
    }
}

/// Settings whose weights are all zero get no shots; every other setting gets at least one.
fn allocate(d: &LocalDecomposition, per_setting: u64, allocation: Allocation) -> Vec<u64> {
    let k = d.settings.len();
    match allocation {
        Allocation::Uniform => vec![per_setting; k],
        Allocation::WeightProportional => {
            let mass: Vec<f64> = d.settings.iter().map(|s| s.weights().iter().map(|c| c.abs()).sum()).collect();
            let total: f64 = mass.iter().sum();
            if total == 0.0 {
                return vec![per_setting; k];
            }
            let budget = (per_setting * k as u64) as f64;
            mass.iter()
                .map(|m| if *m == 0.0 { 0 } else { ((budget * m / total).round() as u64).max(1) })
                .collect()
        }
    }
}
