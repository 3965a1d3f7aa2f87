//! Randomized alternating least squares for decompositions with a fixed number
//! of settings.
//!
//! A setting with directions `n_1..n_m` measures exactly the operators
//! `sum_S w_S (x)_k (k in S ? n_k . sigma : 1)` over party subsets `S`, so the
//! model is linear in the weights `w` and, one party at a time, linear in each
//! direction. Sweeps alternate an exact weight solve with exact per-direction
//! solves whose length is folded back into the weights, so the residual never
//! increases within a restart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::pauli::{from_pauli, PauliCoefficients};
use crate::settings::{LocalDecomposition, MeasurementSetting};

/// A search succeeds when the reconstructed operator is this close to the target.
pub const SEARCH_TOL: f64 = 1e-8;

/// Restarts are run in blocks of this size; the search stops after the first
/// block that contains a success.
const BLOCK: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub max_settings: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
}

impl SearchOptions {
    pub fn new(max_settings: usize, restarts: usize, seed: u64) -> Self {
        Self {
            max_settings,
            restarts,
            seed,
            max_sweeps: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub success: bool,
    pub best_residual: f64,
    /// Index of the restart that produced the best decomposition.
    pub best_restart: usize,
    pub restarts_run: usize,
    pub decomposition: LocalDecomposition,
}

/// Searches for a decomposition of `c` into at most `max_settings` settings.
/// Failure to reach [`SEARCH_TOL`] is reported in the outcome, not as an error.
pub fn decomposition_search(c: &PauliCoefficients, max_settings: usize, restarts: usize, seed: u64) -> Result<SearchOutcome> {
    decomposition_search_with(c, &SearchOptions::new(max_settings, restarts, seed))
}

pub fn decomposition_search_with(c: &PauliCoefficients, opts: &SearchOptions) -> Result<SearchOutcome> {
    if opts.max_settings == 0 {
        return Err(Error::InvalidParameter("max_settings must be at least 1".into()));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let target = from_pauli(c);
    let mut best: Option<(f64, usize, LocalDecomposition)> = None;
    let mut run = 0;
    while run < opts.restarts {
        let end = (run + BLOCK).min(opts.restarts);
        let block: Vec<(f64, usize, LocalDecomposition)> = (run..end)
            .into_par_iter()
            .map(|r| -> Result<_> {
                let fit = Fit::run(c, opts, r)?;
                let d = fit.decomposition()?.verified_against(&target)?;
                Ok((d.residual, r, d))
            })
            .collect::<Result<_>>()?;
        run = end;
        for cand in block {
            let better = match &best {
                None => true,
                Some((res, idx, _)) => cand.0.total_cmp(res).then(cand.1.cmp(idx)).is_lt(),
            };
            if better {
                best = Some(cand);
            }
        }
        if best.as_ref().is_some_and(|b| b.0 < SEARCH_TOL) {
            break;
        }
    }
    let (residual, restart, decomposition) = best.expect("at least one restart");
    Ok(SearchOutcome {
        success: residual < SEARCH_TOL,
        best_residual: residual,
        best_restart: restart,
        restarts_run: run,
        decomposition,
    })
}

/// State of one restart.
struct Fit<'a> {
    n: usize,
    k: usize,
    target: &'a [f64],
    /// Base-4 digits of every Pauli index, party A first.
    digits: Vec<Vec<usize>>,
    /// Party subset (bit `n - 1 - p` for party `p`) with a non-identity factor.
    masks: Vec<usize>,
    /// `dirs[i * n + p]`: direction of party `p` in setting `i`.
    dirs: Vec<[f64; 3]>,
    /// `weights[i * 2^n + S]`: coefficient of the subset term `S` of setting `i`.
    weights: Vec<f64>,
}

impl<'a> Fit<'a> {
    fn run(c: &'a PauliCoefficients, opts: &SearchOptions, restart: usize) -> Result<Self> {
        let n = c.n_qubits();
        let k = opts.max_settings;
        let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
        rng.set_stream(restart as u64);
        let dirs = (0..k * n).map(|_| initial_direction(&mut rng)).collect();
        let digits: Vec<Vec<usize>> = (0..1usize << (2 * n))
            .map(|a| (0..n).map(|p| (a >> (2 * (n - 1 - p))) & 3).collect())
            .collect();
        let masks = digits
            .iter()
            .map(|d| d.iter().enumerate().filter(|(_, &x)| x != 0).fold(0, |m, (p, _)| m | 1 << (n - 1 - p)))
            .collect();
        let mut fit = Fit {
            n,
            k,
            target: c.as_slice(),
            digits,
            masks,
            dirs,
            weights: vec![0.0; k << n],
        };
        fit.solve_weights()?;
        let mut prev = fit.residual_sq();
        let mut stalled = 0;
        let tol_sq = (SEARCH_TOL * 1e-3).powi(2) / (1u64 << n) as f64;
        for _ in 0..opts.max_sweeps {
            for i in 0..k {
                for p in 0..n {
                    fit.update_direction(i, p);
                }
            }
            fit.solve_weights()?;
            let cur = fit.residual_sq();
            if cur < tol_sq {
                break;
            }
            if prev - cur <= 1e-10 * prev {
                stalled += 1;
                if stalled >= 15 {
                    break;
                }
            } else {
                stalled = 0;
            }
            prev = cur;
        }
        Ok(fit)
    }

    fn subsets(&self) -> usize {
        1 << self.n
    }

    /// Product of the direction components of setting `i` selected by Pauli
    /// index `a`, skipping party `skip`.
    fn term(&self, i: usize, a: usize, skip: Option<usize>) -> f64 {
        self.digits[a]
            .iter()
            .enumerate()
            .filter(|&(p, &x)| x != 0 && Some(p) != skip)
            .map(|(p, &x)| self.dirs[i * self.n + p][x - 1])
            .product()
    }

    fn model(&self) -> Vec<f64> {
        let m = self.subsets();
        (0..self.target.len())
            .map(|a| (0..self.k).map(|i| self.weights[i * m + self.masks[a]] * self.term(i, a, None)).sum())
            .collect()
    }

    fn residual_sq(&self) -> f64 {
        self.model().iter().zip(self.target).map(|(m, t)| (m - t).powi(2)).sum()
    }

    /// Subset terms have disjoint supports, so the weight problem splits into
    /// one small least-squares system per subset.
    fn solve_weights(&mut self) -> Result<()> {
        let m = self.subsets();
        for s in 0..m {
            let idx: Vec<usize> = (0..self.target.len()).filter(|&a| self.masks[a] == s).collect();
            let rows: Vec<Vec<f64>> = idx.iter().map(|&a| (0..self.k).map(|i| self.term(i, a, None)).collect()).collect();
            let rhs: Vec<f64> = idx.iter().map(|&a| self.target[a]).collect();
            let w = least_squares(&rows, &rhs)?;
            for (i, wi) in w.into_iter().enumerate() {
                self.weights[i * m + s] = wi;
            }
        }
        Ok(())
    }

    /// Exact minimization over the unnormalized direction of party `p` in
    /// setting `i`; its length moves into the weights of the subsets containing `p`.
    /// Each Pauli index touches one component, so the normal equations are diagonal.
    fn update_direction(&mut self, i: usize, p: usize) {
        let m = self.subsets();
        let model = self.model();
        let old = self.dirs[i * self.n + p];
        let mut num = [0.0; 3];
        let mut den = [0.0; 3];
        for a in 0..self.target.len() {
            let x = self.digits[a][p];
            if x == 0 {
                continue;
            }
            let coef = self.weights[i * m + self.masks[a]] * self.term(i, a, Some(p));
            let rhs = self.target[a] - (model[a] - coef * old[x - 1]);
            num[x - 1] += coef * rhs;
            den[x - 1] += coef * coef;
        }
        let sol: [f64; 3] = [0, 1, 2].map(|j| if den[j] > 1e-300 { num[j] / den[j] } else { 0.0 });
        let len = sol.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !len.is_finite() {
            return;
        }
        let bit = 1 << (self.n - 1 - p);
        if len < 1e-14 {
            for s in (0..m).filter(|s| s & bit != 0) {
                self.weights[i * m + s] = 0.0;
            }
            return;
        }
        self.dirs[i * self.n + p] = sol.map(|x| x / len);
        for s in (0..m).filter(|s| s & bit != 0) {
            self.weights[i * m + s] *= len;
        }
    }

    fn decomposition(&self) -> Result<LocalDecomposition> {
        let m = self.subsets();
        let mut settings = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let dirs = &self.dirs[i * self.n..(i + 1) * self.n];
            let weights: Vec<f64> = (0..m)
                .map(|o| {
                    (0..m)
                        .map(|s| {
                            // product of eigenvalue signs over the parties in S
                            let sign = if (o & s).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                            self.weights[i * m + s] * sign
                        })
                        .sum()
                })
                .collect();
            settings.push(MeasurementSetting::new(dirs, weights)?);
        }
        Ok(LocalDecomposition::new("search", settings))
    }
}

fn initial_direction(rng: &mut impl Rng) -> [f64; 3] {
    if rng.gen_bool(0.5) {
        let mut v = [0.0; 3];
        v[rng.gen_range(0..3)] = 1.0;
        return v;
    }
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-6 {
            return v.map(|x| x / len);
        }
    }
}
