//! Lower bounds on the number of local measurement settings.
//!
//! Every setting contributes, for a fixed pairing, slice matrices that are all
//! multiples of one rank-one matrix `s_row s_col^T`. If the slices of the target
//! span a `d`-dimensional space, at least `d` settings are needed. With exactly
//! `d` settings their rank-one matrices would form a basis of that space, so if
//! the space holds fewer than `d` independent rank-one matrices the bound rises
//! to `d + 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{flatten3, least_squares, mat3_rank, numerical_rank, singular_values, Mat3, RANK_TOL};
use crate::pauli::{slice_family, to_pauli, Pairing, PauliCoefficients};
use crate::witnesses::Witness;

/// Default number of random restarts of the rank-one search.
pub const DEFAULT_RESTARTS: usize = 500;
pub const DEFAULT_SEED: u64 = 2002;

const RANK_ONE_RATIO: f64 = 1e-9;
const MINOR_TOL: f64 = 1e-8;
/// Rank-one elements at a tangential contact with the span are only located to
/// about `sqrt(eps)`, so independence is judged more coarsely than span rank.
const INDEPENDENCE_TOL: f64 = 1e-6;
const MAX_ITERATIONS: usize = 300;
const POLISH_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundMethod {
    #[serde(rename = "span-dim")]
    SpanDim,
    #[serde(rename = "span-dim-plus-one")]
    SpanDimPlusOne,
}

/// What supports the rank-one count behind an escalated bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evidence {
    /// No escalation was attempted.
    #[serde(rename = "none")]
    None,
    /// Random-restart search that stopped finding new rank-one elements.
    #[serde(rename = "numerical-search")]
    NumericalSearch,
    /// The span matches one of the parametrized forms with a known rank-one set.
    #[serde(rename = "structured")]
    Structured,
}

/// Proven minimum number of settings plus the data that proves it.
///
/// `bound` equals `span_dimension` for [`BoundMethod::SpanDim`] (raised to 1 for
/// a nonzero operator whose slices vanish) and `span_dimension + 1` for
/// [`BoundMethod::SpanDimPlusOne`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCertificate {
    pub witness: String,
    pub bound: usize,
    pub method: BoundMethod,
    pub span_dimension: usize,
    pub rank_one_span_dimension: usize,
    pub exhausted: bool,
    pub pairing: Pairing,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankOneSearch {
    /// Independent rank-one elements, in the order they were found.
    pub elements: Vec<Mat3>,
    pub span_dim: usize,
    /// No restart in the second half of the run added an independent element.
    pub exhausted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            seed: DEFAULT_SEED,
        }
    }
}

/// Dimension of the span of the reduced slice matrices; for two qubits, the
/// rank of the single reduced matrix.
pub fn slice_span_dimension(c: &PauliCoefficients, pairing: Pairing) -> Result<usize> {
    let fam = slice_family(c, pairing)?;
    if pairing == Pairing::AB {
        return Ok(mat3_rank(&fam.matrices[0], RANK_TOL));
    }
    let flat: Vec<Vec<f64>> = fam.matrices.iter().map(flatten3).collect();
    numerical_rank(&flat, RANK_TOL)
}

fn orthonormal_basis(span: &[Mat3]) -> Vec<[f64; 9]> {
    let scale = span
        .iter()
        .map(|m| flatten3(m).iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut basis: Vec<[f64; 9]> = Vec::new();
    for m in span {
        let mut v: [f64; 9] = flatten3(m).try_into().expect("nine entries");
        // two Gram-Schmidt passes for stability
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= dot * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > RANK_TOL * scale && norm > 0.0 {
            basis.push(v.map(|x| x / norm));
        }
    }
    basis
}

fn combine(basis: &[[f64; 9]], t: &[f64]) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for (b, &w) in basis.iter().zip(t) {
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += w * b[r * 3 + c];
            }
        }
    }
    m
}

fn mat_vec(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|r| (0..3).map(|c| m[r][c] * v[c]).sum())
}

fn mat_t_vec(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|c| (0..3).map(|r| m[r][c] * v[r]).sum())
}

fn unit<const N: usize>(v: [f64; N]) -> Option<[f64; N]> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n > 1e-300).then(|| v.map(|x| x / n))
}

fn is_rank_one(m: &Mat3) -> bool {
    let rows: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
    let sv = singular_values(&rows).expect("3x3");
    if sv[0] == 0.0 || sv[1] >= RANK_ONE_RATIO * sv[0] {
        return false;
    }
    let scale = sv[0] * sv[0];
    all_minors_small(m, MINOR_TOL * scale)
}

fn all_minors_small(m: &Mat3, tol: f64) -> bool {
    for r in 0..3 {
        for r2 in r + 1..3 {
            for c in 0..3 {
                for c2 in c + 1..3 {
                    let minor = m[r][c] * m[r2][c2] - m[r][c2] * m[r2][c];
                    if minor.abs() > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// One restart: maximize `u^T X(t) v` over unit `t`, `u`, `v` by alternating
/// exact updates. The maximum equals 1 exactly when the span (in an orthonormal
/// basis) contains a rank-one element, and a maximizer is such an element.
fn rank_one_restart(basis: &[[f64; 9]], seed: u64, restart: usize) -> Option<Mat3> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let d = basis.len();
    let mut t: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    t.iter_mut().for_each(|x| *x /= norm);
    let mut v = unit([rng.sample(StandardNormal), rng.sample(StandardNormal), rng.gen::<f64>() + 0.1])?;

    for _ in 0..MAX_ITERATIONS {
        let x = combine(basis, &t);
        let u = unit(mat_vec(&x, &v))?;
        v = unit(mat_t_vec(&x, &u))?;
        let next: Vec<f64> = basis
            .iter()
            .map(|b| (0..3).map(|r| (0..3).map(|c| u[r] * b[r * 3 + c] * v[c]).sum::<f64>()).sum())
            .collect();
        let len = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len < 1e-300 {
            return None;
        }
        let next: Vec<f64> = next.iter().map(|x| x / len).collect();
        let change: f64 = next.iter().zip(&t).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        t = next;
        if change < 1e-15 {
            break;
        }
    }
    polish(basis, &mut t);
    let x = combine(basis, &t);
    is_rank_one(&x).then_some(x)
}

fn minors(m: &Mat3) -> Vec<f64> {
    let mut out = Vec::with_capacity(9);
    for (r, r2) in [(0, 1), (0, 2), (1, 2)] {
        for (c, c2) in [(0, 1), (0, 2), (1, 2)] {
            out.push(m[r][c] * m[r2][c2] - m[r][c2] * m[r2][c]);
        }
    }
    out
}

/// Gauss-Newton on the 2x2 minors of `X(t)`, keeping `t` on the unit sphere.
///
/// The power iteration above slows to a crawl when the span touches the
/// rank-one variety tangentially (as for the W1 span); Newton steps on the
/// minors still halve the error per step there.
fn polish(basis: &[[f64; 9]], t: &mut Vec<f64>) {
    let d = basis.len();
    for _ in 0..POLISH_ITERATIONS {
        let x = combine(basis, t);
        let f = minors(&x);
        if f.iter().all(|v| v.abs() < 1e-16) {
            return;
        }
        let mut rows: Vec<Vec<f64>> = vec![vec![0.0; d]; 10];
        let mut pos = 0;
        for (r, r2) in [(0, 1), (0, 2), (1, 2)] {
            for (c, c2) in [(0, 1), (0, 2), (1, 2)] {
                for (j, b) in basis.iter().enumerate() {
                    let db = |i: usize, k: usize| b[i * 3 + k];
                    rows[pos][j] = db(r, c) * x[r2][c2] + x[r][c] * db(r2, c2) - db(r, c2) * x[r2][c] - x[r][c2] * db(r2, c);
                }
                pos += 1;
            }
        }
        rows[9].copy_from_slice(t);
        let mut rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        rhs.push(0.0);
        let Ok(step) = least_squares(&rows, &rhs) else {
            return;
        };
        let next: Vec<f64> = t.iter().zip(&step).map(|(a, b)| a + b).collect();
        let len = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !len.is_finite() || len < 1e-300 {
            return;
        }
        *t = next.iter().map(|x| x / len).collect();
    }
}

/// Random-restart search for independent rank-one matrices inside the span of
/// `span_basis`. Restarts run in parallel; elements are merged in restart order
/// so the result matches a sequential run.
pub fn rank_one_elements_in_span(span_basis: &[Mat3], restarts: usize, seed: u64) -> Result<RankOneSearch> {
    if span_basis.is_empty() {
        return Err(Error::EmptyInput("span basis"));
    }
    let basis = orthonormal_basis(span_basis);
    if basis.is_empty() {
        return Ok(RankOneSearch {
            elements: Vec::new(),
            span_dim: 0,
            exhausted: true,
        });
    }
    let found: Vec<Option<Mat3>> = (0..restarts)
        .into_par_iter()
        .map(|r| rank_one_restart(&basis, seed, r))
        .collect();

    let mut elements: Vec<Mat3> = Vec::new();
    let mut last_gain: Option<usize> = None;
    for (r, cand) in found.into_iter().enumerate() {
        let Some(m) = cand else { continue };
        let mut trial: Vec<Vec<f64>> = elements.iter().map(flatten3).collect();
        trial.push(flatten3(&m));
        if numerical_rank(&trial, INDEPENDENCE_TOL)? > elements.len() {
            elements.push(m);
            last_gain = Some(r);
        }
    }
    let exhausted = match last_gain {
        None => restarts >= 2,
        Some(r) => restarts - 1 - r >= restarts / 2 && restarts >= 2,
    };
    Ok(RankOneSearch {
        span_dim: elements.len(),
        elements,
        exhausted,
    })
}

/// Parametrized slice spans whose rank-one elements are known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuredForm {
    /// `[[-a, b, 0], [b, a, 0], [0, 0, g]]`, rank one iff `a = b = 0`.
    Ghz,
    /// `[[a, 0, b], [0, a, g], [b, g, d]]`, rank one iff `a = b = g = 0`.
    W1,
}

impl StructuredForm {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ghz" => Ok(StructuredForm::Ghz),
            "w1" => Ok(StructuredForm::W1),
            other => Err(Error::InvalidParameter(format!("unknown structured form '{other}'"))),
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            StructuredForm::Ghz => 3,
            StructuredForm::W1 => 4,
        }
    }

    pub fn matrix(&self, p: &[f64]) -> Result<Mat3> {
        if p.len() != self.n_params() {
            return Err(Error::InvalidParameter(format!(
                "form needs {} coefficients, got {}",
                self.n_params(),
                p.len()
            )));
        }
        Ok(match self {
            StructuredForm::Ghz => [[-p[0], p[1], 0.0], [p[1], p[0], 0.0], [0.0, 0.0, p[2]]],
            StructuredForm::W1 => [[p[0], 0.0, p[1]], [0.0, p[0], p[2]], [p[1], p[2], p[3]]],
        })
    }

    fn basis(&self) -> Vec<Mat3> {
        (0..self.n_params())
            .map(|i| {
                let mut p = vec![0.0; self.n_params()];
                p[i] = 1.0;
                self.matrix(&p).expect("arity matches")
            })
            .collect()
    }

    /// Dimension of the span of all rank-one members: only the last parameter
    /// survives the rank-one condition in both forms.
    pub fn rank_one_span_dimension(&self) -> usize {
        1
    }

    /// Recognizes a span equal to this form's full parameter space.
    fn matches(&self, span: &[Mat3]) -> bool {
        let own: Vec<Vec<f64>> = span.iter().map(flatten3).collect();
        let Ok(d) = numerical_rank(&own, RANK_TOL) else {
            return false;
        };
        if d != self.n_params() {
            return false;
        }
        let mut joint = own;
        joint.extend(self.basis().iter().map(flatten3));
        numerical_rank(&joint, RANK_TOL).is_ok_and(|r| r == d)
    }
}

/// Exact rank-one test of a parametrized form via its 2x2 minors.
pub fn structured_rank_one_check(form: StructuredForm, coefficients: &[f64]) -> Result<bool> {
    let m = form.matrix(coefficients)?;
    let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return Ok(false);
    }
    Ok(all_minors_small(&m, 1e-12 * scale * scale))
}

fn certify_pairing(c: &PauliCoefficients, pairing: Pairing, opts: &CertifyOptions, label: &str) -> Result<LowerBoundCertificate> {
    let d = slice_span_dimension(c, pairing)?;
    let nonzero_operator = c.as_slice().iter().any(|x| x.abs() > 1e-12);
    let floor = usize::from(nonzero_operator);
    if pairing == Pairing::AB {
        // a rank-d matrix is a sum of no fewer than d rank-one matrices
        return Ok(LowerBoundCertificate {
            witness: label.to_string(),
            bound: d.max(floor),
            method: BoundMethod::SpanDim,
            span_dimension: d,
            rank_one_span_dimension: d,
            exhausted: false,
            pairing,
            evidence: Evidence::None,
        });
    }
    let span = slice_family(c, pairing)?.matrices;
    let search = rank_one_elements_in_span(&span, opts.restarts, opts.seed)?;
    let structured = [StructuredForm::Ghz, StructuredForm::W1].into_iter().find(|f| f.matches(&span));
    let (rank_one_dim, evidence) = match structured {
        Some(form) => (form.rank_one_span_dimension(), Evidence::Structured),
        None => (search.span_dim, Evidence::NumericalSearch),
    };
    let escalate = d > 0 && rank_one_dim < d && (structured.is_some() || search.exhausted);
    Ok(LowerBoundCertificate {
        witness: label.to_string(),
        bound: if escalate { d + 1 } else { d.max(floor) },
        method: if escalate { BoundMethod::SpanDimPlusOne } else { BoundMethod::SpanDim },
        span_dimension: d,
        rank_one_span_dimension: rank_one_dim,
        exhausted: search.exhausted,
        pairing,
        evidence: if escalate { evidence } else { Evidence::None },
    })
}

/// Best lower bound over all pairings, with the default search budget.
pub fn lower_bound(w: &Witness) -> Result<LowerBoundCertificate> {
    lower_bound_with(w, &CertifyOptions::default())
}

pub fn lower_bound_with(w: &Witness, opts: &CertifyOptions) -> Result<LowerBoundCertificate> {
    let pairings = Pairing::all_for(w.n_qubits)?;
    let c = to_pauli(&w.operator, w.n_qubits)?;
    lower_bound_for_coefficients(&c, &w.name, opts, pairings)
}

fn lower_bound_for_coefficients(
    c: &PauliCoefficients,
    label: &str,
    opts: &CertifyOptions,
    pairings: &[Pairing],
) -> Result<LowerBoundCertificate> {
    let mut best: Option<LowerBoundCertificate> = None;
    for &p in pairings {
        let cert = certify_pairing(c, p, opts, label)?;
        if best.as_ref().map_or(true, |b| cert.bound > b.bound) {
            best = Some(cert);
        }
    }
    best.ok_or(Error::UnsupportedQubits(c.n_qubits()))
}
