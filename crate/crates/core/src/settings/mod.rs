//! Local von Neumann measurement settings and decompositions of operators into
//! them.
//!
//! A setting fixes one measurement direction per party. Outcome bit `0` on a
//! party is the `+1` eigenvector of `n . sigma`, bit `1` the `-1` eigenvector,
//! and a setting measures any operator `sum_o c_o P_o` built from the product
//! projectors `P_o` of its outcomes. Bitstrings put party A first.

mod cover;
mod paper;
mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron_all, ComplexMatrix};
use crate::pauli::sigma;

pub use cover::{group_pauli_terms, CoverStrategy};
pub use paper::{paper_decomposition, paper_decomposition_by_name, PaperDecomposition};
pub use search::{decomposition_search, decomposition_search_with, SearchOptions, SearchOutcome, SEARCH_TOL};

/// A decomposition counts as verified below this Frobenius residual.
pub const VERIFY_TOL: f64 = 1e-10;

const UNIT_TOL: f64 = 1e-12;

/// Unit Bloch direction with canonical sign: the first nonzero component is
/// positive, so `n` and `-n` name the same setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction([f64; 3]);

impl Direction {
    /// Normalizes and canonicalizes `v`. The flag reports whether the sign was
    /// flipped, which swaps the roles of the two outcomes.
    pub fn canonicalize(v: [f64; 3]) -> Result<(Self, bool)> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 || !norm.is_finite() {
            return Err(Error::InvalidParameter(format!("direction {v:?} has no length")));
        }
        let mut u = v.map(|x| x / norm);
        for x in &mut u {
            if x.abs() < UNIT_TOL {
                *x = 0.0;
            }
        }
        let flip = u.iter().find(|x| **x != 0.0).is_some_and(|&x| x < 0.0);
        if flip {
            u = u.map(|x| -x);
        }
        // renormalize after snapping tiny components
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok((Self(u.map(|x| x / norm)), flip))
    }

    pub fn new(v: [f64; 3]) -> Result<Self> {
        Self::canonicalize(v).map(|(d, _)| d)
    }

    pub fn axis(axis: usize) -> Self {
        let mut v = [0.0; 3];
        v[axis - 1] = 1.0;
        Self(v)
    }

    pub fn x() -> Self {
        Self::axis(1)
    }

    pub fn y() -> Self {
        Self::axis(2)
    }

    pub fn z() -> Self {
        Self::axis(3)
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// Pauli axis (1 = x, 2 = y, 3 = z) this direction lies along, if any.
    pub fn pauli_axis(&self) -> Option<usize> {
        self.0.iter().position(|&c| (c - 1.0).abs() < UNIT_TOL).map(|i| i + 1)
    }

    /// `n . sigma`.
    pub fn observable(&self) -> ComplexMatrix {
        let [x, y, z] = self.0;
        &(&sigma(1).scale(x) + &sigma(2).scale(y)) + &sigma(3).scale(z)
    }

    /// `(1 + (-1)^outcome n . sigma) / 2`.
    pub fn projector(&self, outcome: usize) -> ComplexMatrix {
        let sign = if outcome == 0 { 0.5 } else { -0.5 };
        &ComplexMatrix::identity(2).scale(0.5) + &self.observable().scale(sign)
    }

    pub fn parse_axis(ch: char) -> Result<Self> {
        match ch.to_ascii_lowercase() {
            'x' => Ok(Self::x()),
            'y' => Ok(Self::y()),
            'z' => Ok(Self::z()),
            _ => Err(Error::InvalidParameter(format!("unknown axis '{ch}'"))),
        }
    }

    fn approx_eq(&self, other: &Direction) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| (a - b).abs() < 1e-9)
    }
}

/// One direction per party plus a real weight for every outcome bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    directions: Vec<Direction>,
    weights: Vec<f64>,
}

impl MeasurementSetting {
    /// Builds a setting from raw directions. Directions are canonicalized and
    /// the weights re-indexed so the operator is unchanged.
    pub fn new(directions: &[[f64; 3]], weights: Vec<f64>) -> Result<Self> {
        let n = directions.len();
        if n == 0 || weights.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: weights.len(),
            });
        }
        let mut dirs = Vec::with_capacity(n);
        let mut w = weights;
        for (k, v) in directions.iter().enumerate() {
            let (d, flipped) = Direction::canonicalize(*v)?;
            if flipped {
                let bit = 1 << (n - 1 - k);
                w = (0..w.len()).map(|o| w[o ^ bit]).collect();
            }
            dirs.push(d);
        }
        Ok(Self {
            directions: dirs,
            weights: w,
        })
    }

    pub fn from_directions(directions: Vec<Direction>, weights: Vec<f64>) -> Result<Self> {
        let raw: Vec<[f64; 3]> = directions.iter().map(|d| d.components()).collect();
        Self::new(&raw, weights)
    }

    /// Builds weights from a function of the per-party eigenvalue signs
    /// (`+1` for outcome 0, `-1` for outcome 1).
    pub fn from_sign_fn(directions: &[[f64; 3]], f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = directions.len();
        let weights = (0..1usize << n)
            .map(|o| {
                let signs: Vec<f64> = (0..n)
                    .map(|k| if (o >> (n - 1 - k)) & 1 == 0 { 1.0 } else { -1.0 })
                    .collect();
                f(&signs)
            })
            .collect();
        Self::new(directions, weights)
    }

    pub fn n_parties(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Product projector of outcome bitstring `outcome`.
    pub fn outcome_projector(&self, outcome: usize) -> ComplexMatrix {
        let n = self.n_parties();
        let factors: Vec<ComplexMatrix> = self
            .directions
            .iter()
            .enumerate()
            .map(|(k, d)| d.projector((outcome >> (n - 1 - k)) & 1))
            .collect();
        kron_all(&factors)
    }

    /// Number of outcomes with a nonzero weight.
    pub fn product_projector_count(&self) -> usize {
        self.weights.iter().filter(|w| w.abs() > 1e-12).count()
    }

    /// True when both settings use the same measurement basis on every party.
    pub fn same_basis(&self, other: &MeasurementSetting) -> bool {
        self.n_parties() == other.n_parties()
            && self.directions.iter().zip(&other.directions).all(|(a, b)| a.approx_eq(b))
    }

    pub fn outcome_label(&self, outcome: usize) -> String {
        let n = self.n_parties();
        (0..n)
            .map(|k| if (outcome >> (n - 1 - k)) & 1 == 0 { '0' } else { '1' })
            .collect()
    }
}

/// `sum_o c_o P_o`.
pub fn setting_operator(s: &MeasurementSetting) -> ComplexMatrix {
    let dim = 1usize << s.n_parties();
    let mut acc = ComplexMatrix::zeros(dim);
    for (o, &c) in s.weights.iter().enumerate() {
        if c != 0.0 {
            acc = &acc + &s.outcome_projector(o).scale(c);
        }
    }
    acc
}

/// Weighted list of settings reconstructing a target operator.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDecomposition {
    pub target_label: String,
    pub settings: Vec<MeasurementSetting>,
    /// Frobenius distance to the target; infinite until verified.
    pub residual: f64,
}

impl LocalDecomposition {
    pub fn new(target_label: impl Into<String>, settings: Vec<MeasurementSetting>) -> Self {
        Self {
            target_label: target_label.into(),
            settings,
            residual: f64::INFINITY,
        }
    }

    pub fn n_settings(&self) -> usize {
        self.settings.len()
    }

    pub fn product_projector_count(&self) -> usize {
        self.settings.iter().map(|s| s.product_projector_count()).sum()
    }

    pub fn n_qubits(&self) -> Option<usize> {
        self.settings.first().map(|s| s.n_parties())
    }

    pub fn operator(&self) -> Option<ComplexMatrix> {
        let n = self.n_qubits()?;
        let mut acc = ComplexMatrix::zeros(1 << n);
        for s in &self.settings {
            acc = &acc + &setting_operator(s);
        }
        Some(acc)
    }

    pub fn is_verified(&self) -> bool {
        self.residual < VERIFY_TOL
    }

    /// Computes and stores the residual against `target`.
    pub fn verified_against(mut self, target: &ComplexMatrix) -> Result<Self> {
        self.residual = verify_decomposition(&self, target)?;
        Ok(self)
    }
}

/// Frobenius norm of `sum_settings operator - target`.
pub fn verify_decomposition(d: &LocalDecomposition, target: &ComplexMatrix) -> Result<f64> {
    if d.settings.iter().any(|s| 1usize << s.n_parties() != target.dim()) {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            got: d.n_qubits().map(|n| 1 << n).unwrap_or(0),
        });
    }
    match d.operator() {
        Some(op) => op.frobenius_distance(target),
        None => Ok(target.frobenius_norm()),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SettingFile {
    pub directions: Vec<[f64; 3]>,
    pub weights: BTreeMap<String, f64>,
}

/// `{ "target": label, "settings": [ { "directions": [...], "weights": {...} } ] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub target: String,
    pub settings: Vec<SettingFile>,
}

impl From<&LocalDecomposition> for DecompositionFile {
    fn from(d: &LocalDecomposition) -> Self {
        let settings = d
            .settings
            .iter()
            .map(|s| SettingFile {
                directions: s.directions.iter().map(|d| d.components()).collect(),
                weights: s
                    .weights
                    .iter()
                    .enumerate()
                    .map(|(o, &w)| (s.outcome_label(o), w))
                    .collect(),
            })
            .collect();
        Self {
            target: d.target_label.clone(),
            settings,
        }
    }
}

impl TryFrom<DecompositionFile> for LocalDecomposition {
    type Error = Error;

    fn try_from(f: DecompositionFile) -> Result<Self> {
        let mut settings = Vec::with_capacity(f.settings.len());
        for s in f.settings {
            let n = s.directions.len();
            let mut weights = vec![0.0; 1 << n];
            for (label, w) in s.weights {
                if label.len() != n {
                    return Err(Error::InvalidParameter(format!("bad outcome label '{label}'")));
                }
                let idx = usize::from_str_radix(&label, 2)
                    .map_err(|_| Error::InvalidParameter(format!("bad outcome label '{label}'")))?;
                weights[idx] = w;
            }
            settings.push(MeasurementSetting::new(&s.directions, weights)?);
        }
        Ok(LocalDecomposition::new(f.target, settings))
    }
}

/// Hermitian commutator norm `|[A, B]|_F`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (&(a * b) - &(b * a)).frobenius_norm()
}

/// Observable `(x) n_k . sigma` of a setting; every setting operator commutes
/// with it and with each single-party factor.
pub fn party_observable(s: &MeasurementSetting, party: usize) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = (0..s.n_parties())
        .map(|k| {
            if k == party {
                s.directions[k].observable()
            } else {
                ComplexMatrix::identity(2)
            }
        })
        .collect();
    kron_all(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{pauli_string, to_pauli, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn direction_canonical_sign() {
        let (d, flipped) = Direction::canonicalize([0.0, -2.0, 0.0]).unwrap();
        assert!(flipped);
        assert_eq!(d.components(), [0.0, 1.0, 0.0]);
        assert_eq!(d.pauli_axis(), Some(2));
        let (d, flipped) = Direction::canonicalize([-1.0, 0.0, 1.0]).unwrap();
        assert!(flipped);
        assert!((d.components()[0] - H).abs() < 1e-15 && (d.components()[2] + H).abs() < 1e-15);
        assert!(Direction::new([0.0; 3]).is_err());
    }

    #[test]
    fn flipping_a_direction_keeps_the_operator() {
        let raw = MeasurementSetting::from_sign_fn(&[[-1.0, 0.0, 1.0], [0.0, 0.0, 1.0]], |e| 1.0 + 0.3 * e[0] - 0.7 * e[0] * e[1])
            .unwrap();
        // operator built by hand with the uncanonicalized direction
        let n = [-H, 0.0, H];
        let obs = &(&sigma(1).scale(n[0]) + &sigma(2).scale(n[1])) + &sigma(3).scale(n[2]);
        let id = ComplexMatrix::identity(2);
        let z = sigma(3);
        let expected = &(&crate::linalg::kron(&id, &id) + &crate::linalg::kron(&obs, &id).scale(0.3))
            - &crate::linalg::kron(&obs, &z).scale(0.7);
        assert!(setting_operator(&raw).frobenius_distance(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn setting_operator_examples() {
        let s = MeasurementSetting::new(&[[0.0, 0.0, 1.0]; 2], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(setting_operator(&s), ComplexMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0]));

        // (-1)^{r+s+t}/8 on zzz gives sigma_z^{(x)3}/8
        let s = MeasurementSetting::from_sign_fn(&[[0.0, 0.0, 1.0]; 3], |e| e[0] * e[1] * e[2] / 8.0).unwrap();
        let expected = pauli_string(&[PAULI_Z; 3]).scale(0.125);
        assert!(setting_operator(&s).frobenius_distance(&expected).unwrap() < 1e-15);

        // (x+y)/sqrt(2) on all parties gives (sigma_x + sigma_y)^{(x)3}/16
        let s = MeasurementSetting::from_sign_fn(&[[1.0, 1.0, 0.0]; 3], |e| 2f64.sqrt() / 8.0 * e[0] * e[1] * e[2]).unwrap();
        let sxy = &sigma(PAULI_X) + &sigma(PAULI_Y);
        let expected = kron_all([&sxy, &sxy, &sxy]).scale(1.0 / 16.0);
        assert!(setting_operator(&s).frobenius_distance(&expected).unwrap() < 1e-14);
        let _ = PAULI_I;
    }

    #[test]
    fn setting_operator_commutes_with_local_observables() {
        let s = MeasurementSetting::new(&[[0.3, -0.2, 0.9], [1.0, 1.0, 1.0], [0.0, 1.0, -0.4]], (0..8).map(|i| i as f64 - 2.5).collect())
            .unwrap();
        let op = setting_operator(&s);
        assert!(op.is_hermitian(1e-14));
        for k in 0..3 {
            assert!(commutator_norm(&op, &party_observable(&s, k)) < 1e-12);
        }
    }

    #[test]
    fn weights_shape_is_checked() {
        assert!(MeasurementSetting::new(&[[0.0, 0.0, 1.0]; 2], vec![1.0; 3]).is_err());
    }

    #[test]
    fn decomposition_file_round_trip() {
        let d = paper_decomposition(PaperDecomposition::W1).unwrap();
        let file = DecompositionFile::from(&d);
        let json = serde_json::to_string(&file).unwrap();
        let back: DecompositionFile = serde_json::from_str(&json).unwrap();
        let back = LocalDecomposition::try_from(back).unwrap();
        let target = crate::witnesses::witness_w1().operator;
        assert!(verify_decomposition(&back, &target).unwrap() < 1e-12);
        assert_eq!(file.settings[0].weights.len(), 8);
        assert!(file.settings[0].weights.contains_key("010"));
    }

    #[test]
    fn verify_checks_dimensions() {
        let d = paper_decomposition(PaperDecomposition::Ghz).unwrap();
        assert!(verify_decomposition(&d, &ComplexMatrix::identity(4)).is_err());
        let c = to_pauli(&d.operator().unwrap(), 3).unwrap();
        assert_eq!(c.n_qubits(), 3);
    }
}
