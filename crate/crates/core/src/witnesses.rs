//! Witness catalog, expectation values, verdicts, PPT checks and white-noise
//! detection thresholds.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, partial_transpose, ComplexMatrix};
use crate::states::{bell_psi_minus, ghz_state, partial_transpose_across, w_state, Bipartition, DensityMatrix, PureState};

const HERMITIAN_TOL: f64 = 1e-10;
const PARAM_TOL: f64 = 1e-10;
/// Eigenvalues below `-NPT_TOL` count as negative in the PPT test.
pub const NPT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictLabel {
    #[serde(rename = "no-detection")]
    NoDetection,
    #[serde(rename = "entangled")]
    Entangled,
    #[serde(rename = "genuinely-tripartite")]
    GenuinelyTripartite,
    #[serde(rename = "GHZ-class")]
    GhzClass,
}

impl VerdictLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictLabel::NoDetection => "no-detection",
            VerdictLabel::Entangled => "entangled",
            VerdictLabel::GenuinelyTripartite => "genuinely-tripartite",
            VerdictLabel::GhzClass => "GHZ-class",
        }
    }
}

impl fmt::Display for VerdictLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value strictly below `threshold` earns `label`. Rules are checked in
/// ascending threshold order, so a value sitting exactly on a boundary gets the
/// weaker label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictRule {
    pub threshold: f64,
    pub label: VerdictLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: f64,
    pub label: VerdictLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub name: String,
    pub operator: ComplexMatrix,
    pub n_qubits: usize,
    pub verdict_rules: Vec<VerdictRule>,
}

impl Witness {
    fn new(name: impl Into<String>, operator: ComplexMatrix, n_qubits: usize, mut rules: Vec<VerdictRule>) -> Self {
        debug_assert!(operator.is_hermitian(HERMITIAN_TOL));
        rules.sort_by(|a, b| a.threshold.total_cmp(&b.threshold));
        Self {
            name: name.into(),
            operator,
            n_qubits,
            verdict_rules: rules,
        }
    }

    /// Same witness with its operator replaced by `U W U^dagger`.
    pub fn conjugated(&self, unitary: &ComplexMatrix) -> Result<Self> {
        if unitary.dim() != self.operator.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.operator.dim(),
                got: unitary.dim(),
            });
        }
        let op = &(unitary * &self.operator) * &unitary.dagger();
        Ok(Self {
            operator: ComplexMatrix::from_fn(op.dim(), |i, j| (op[(i, j)] + op[(j, i)].conj()) * 0.5),
            ..self.clone()
        })
    }
}

fn rule(threshold: f64, label: VerdictLabel) -> VerdictRule {
    VerdictRule { threshold, label }
}

/// `|phi><phi|^{T_B}` for `|phi> = alpha|00> + beta|11>`.
pub fn witness_phi(alpha: f64, beta: f64) -> Result<Witness> {
    if (alpha * alpha + beta * beta - 1.0).abs() > PARAM_TOL {
        return Err(Error::InvalidParameter(format!(
            "alpha^2 + beta^2 = {} is not 1",
            alpha * alpha + beta * beta
        )));
    }
    let mut phi = vec![crate::linalg::C64::new(0.0, 0.0); 4];
    phi[0].re = alpha;
    phi[3].re = beta;
    let op = partial_transpose(&ComplexMatrix::outer(&phi), 1, &[2, 2])?;
    Ok(Witness::new(
        format!("phi({alpha},{beta})"),
        op,
        2,
        vec![rule(0.0, VerdictLabel::Entangled)],
    ))
}

/// `|psi_-><psi_-|^{T_B}` with `|psi_-> = (|00> - |11>)/sqrt(2)`.
pub fn witness_w0() -> Witness {
    let op = partial_transpose(&bell_psi_minus().projector(), 1, &[2, 2]).expect("two qubits");
    Witness::new("w0", op, 2, vec![rule(0.0, VerdictLabel::Entangled)])
}

fn shifted_projector(shift: f64, psi: &PureState) -> ComplexMatrix {
    &ComplexMatrix::identity(8).scale(shift) - &psi.projector()
}

/// `3/4 1 - |GHZ><GHZ|`; a negative value places the state in the GHZ class.
pub fn witness_ghz() -> Witness {
    Witness::new(
        "ghz",
        shifted_projector(0.75, &ghz_state()),
        3,
        vec![rule(0.0, VerdictLabel::GhzClass)],
    )
}

/// `2/3 1 - |W><W|`; nonnegative on all biseparable states.
pub fn witness_w1() -> Witness {
    Witness::new(
        "w1",
        shifted_projector(2.0 / 3.0, &w_state()),
        3,
        vec![rule(0.0, VerdictLabel::GenuinelyTripartite)],
    )
}

/// `1/2 1 - |GHZ><GHZ|`: values in `[-1/4, 0)` mean genuinely tripartite,
/// values below `-1/4` mean GHZ class.
pub fn witness_w2() -> Witness {
    Witness::new(
        "w2",
        shifted_projector(0.5, &ghz_state()),
        3,
        vec![
            rule(-0.25, VerdictLabel::GhzClass),
            rule(0.0, VerdictLabel::GenuinelyTripartite),
        ],
    )
}

/// Catalog lookup: `w0`, `phi` (needs `alpha`, `beta`), `ghz`, `w1`, `w2`.
pub fn by_name(name: &str, params: Option<(f64, f64)>) -> Result<Witness> {
    match name {
        "w0" => Ok(witness_w0()),
        "ghz" => Ok(witness_ghz()),
        "w1" => Ok(witness_w1()),
        "w2" => Ok(witness_w2()),
        "phi" => {
            let (a, b) = params.ok_or_else(|| Error::InvalidParameter("phi needs alpha and beta".into()))?;
            witness_phi(a, b)
        }
        other => Err(Error::UnknownWitness(other.to_string())),
    }
}

/// `Tr(W rho)`.
pub fn expectation(w: &Witness, rho: &DensityMatrix) -> Result<f64> {
    if w.n_qubits != rho.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: w.n_qubits,
            got: rho.n_qubits(),
        });
    }
    let v = w.operator.trace_product(rho.matrix())?;
    debug_assert!(v.im.abs() < 1e-10);
    Ok(v.re)
}

pub fn classify(w: &Witness, value: f64) -> Verdict {
    let label = w
        .verdict_rules
        .iter()
        .find(|r| value < r.threshold)
        .map(|r| r.label)
        .unwrap_or(VerdictLabel::NoDetection);
    Verdict { value, label }
}

/// Minimum eigenvalue of the partial transpose across `cut`, and whether it is
/// negative beyond [`NPT_TOL`].
pub fn ppt_check(rho: &DensityMatrix, cut: Bipartition) -> Result<(f64, bool)> {
    let pt = partial_transpose_across(rho, cut)?;
    let min = hermitian_eigenvalues(&pt)?[0];
    Ok((min, min < -NPT_TOL))
}

/// `(1 - p)/4 - a b p`, the only possibly negative eigenvalue of the partially
/// transposed noisy Schmidt state.
pub fn lambda_minus(a: f64, b: f64, p: f64) -> Result<f64> {
    if a < 0.0 || b < 0.0 || (a * a + b * b - 1.0).abs() > PARAM_TOL {
        return Err(Error::InvalidParameter(format!("invalid Schmidt coefficients ({a}, {b})")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("mixing weight {p} outside [0, 1]")));
    }
    Ok((1.0 - p) / 4.0 - a * b * p)
}

/// Smallest `p` such that `p|psi><psi| + (1-p) 1/2^n` gives a negative witness
/// value. The expectation is affine in `p`, so the root follows from the two
/// endpoint values.
pub fn noise_threshold(w: &Witness, psi: &PureState) -> Result<f64> {
    if w.n_qubits != psi.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: w.n_qubits,
            got: psi.n_qubits(),
        });
    }
    let pure = w.operator.expectation(psi.amplitudes())?.re;
    let mixed = expectation(w, &DensityMatrix::maximally_mixed(w.n_qubits))?;
    if pure >= 0.0 {
        return Err(Error::NoThreshold(pure));
    }
    if mixed < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "witness is negative on the maximally mixed state ({mixed})"
        )));
    }
    Ok(mixed / (mixed - pure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::pauli::to_pauli;
    use crate::states::{random_product_state, schmidt_state, white_noise_mix};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn phi_matches_closed_form() {
        for (a, b) in [(0.6, 0.8), (H, -H), (1.0, 0.0), (-0.28, 0.96)] {
            let w = witness_phi(a, b).unwrap();
            let mut expected = ComplexMatrix::zeros(4);
            expected[(0, 0)] = C64::new(a * a, 0.0);
            expected[(3, 3)] = C64::new(b * b, 0.0);
            expected[(1, 2)] = C64::new(a * b, 0.0);
            expected[(2, 1)] = C64::new(a * b, 0.0);
            assert!(w.operator.frobenius_distance(&expected).unwrap() < 1e-15);
            // 4 * coefficients reproduce the displayed lambda matrix
            let c = to_pauli(&w.operator, 2).unwrap();
            let table = [
                [1.0, 0.0, 0.0, a * a - b * b],
                [0.0, 2.0 * a * b, 0.0, 0.0],
                [0.0, 0.0, 2.0 * a * b, 0.0],
                [a * a - b * b, 0.0, 0.0, 1.0],
            ];
            for i in 0..4 {
                for j in 0..4 {
                    assert!((4.0 * c.get(&[i, j]) - table[i][j]).abs() < 1e-14);
                }
            }
        }
        assert!(witness_phi(0.5, 0.5).is_err());
    }

    #[test]
    fn w0_is_phi_with_opposite_signs() {
        let w0 = witness_w0();
        let phi = witness_phi(H, -H).unwrap();
        assert!(w0.operator.frobenius_distance(&phi.operator).unwrap() < 1e-15);
        let product = witness_phi(1.0, 0.0).unwrap();
        assert_eq!(product.operator, ComplexMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn catalog_values() {
        let ghz = ghz_state().density();
        let w = w_state().density();
        assert!((expectation(&witness_ghz(), &ghz).unwrap() + 0.25).abs() < 1e-12);
        assert!((expectation(&witness_w1(), &w).unwrap() + 1.0 / 3.0).abs() < 1e-12);
        let v = expectation(&witness_w2(), &ghz).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
        assert_eq!(classify(&witness_w2(), v).label, VerdictLabel::GhzClass);
        let mixed = DensityMatrix::maximally_mixed(3);
        assert!((expectation(&witness_ghz(), &mixed).unwrap() - 0.625).abs() < 1e-12);
        assert!((expectation(&witness_w1(), &ghz).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(expectation(&witness_ghz(), &schmidt_state(1.0, 0.0).unwrap().density()).is_err());
    }

    #[test]
    fn w0_on_noisy_schmidt_states() {
        for (a, p) in [(0.3f64, 0.2), (H, 0.5), (0.9, 0.95)] {
            let b = (1.0 - a * a).sqrt();
            let rho = white_noise_mix(&schmidt_state(a, b).unwrap(), p).unwrap();
            let v = expectation(&witness_w0(), &rho).unwrap();
            assert!((v - lambda_minus(a, b, p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn classification_rules() {
        assert_eq!(classify(&witness_w2(), -0.3).label, VerdictLabel::GhzClass);
        assert_eq!(classify(&witness_w2(), -0.1).label, VerdictLabel::GenuinelyTripartite);
        assert_eq!(classify(&witness_w2(), -0.25).label, VerdictLabel::GenuinelyTripartite);
        assert_eq!(classify(&witness_w2(), 0.0).label, VerdictLabel::NoDetection);
        assert_eq!(classify(&witness_ghz(), 0.2).label, VerdictLabel::NoDetection);
        assert_eq!(classify(&witness_ghz(), -0.2).label, VerdictLabel::GhzClass);
        assert_eq!(classify(&witness_w1(), -0.01).label, VerdictLabel::GenuinelyTripartite);
        assert_eq!(classify(&witness_w0(), -0.01).label, VerdictLabel::Entangled);
    }

    #[test]
    fn ppt_examples() {
        let (min, npt) = ppt_check(&bell_psi_minus().density(), Bipartition::AB).unwrap();
        assert!((min + 0.5).abs() < 1e-12 && npt);
        let prod = random_product_state(3, 4).unwrap().density();
        for cut in Bipartition::THREE_QUBIT {
            assert!(!ppt_check(&prod, cut).unwrap().1);
        }
        assert!(ppt_check(&prod, Bipartition::AB).is_err());
    }

    #[test]
    fn lambda_minus_examples() {
        assert!((lambda_minus(H, H, 1.0).unwrap() + 0.5).abs() < 1e-15);
        assert!((lambda_minus(1.0, 0.0, 0.4).unwrap() - 0.15).abs() < 1e-15);
        assert!(lambda_minus(H, H, 1.0 / 3.0).unwrap().abs() < 1e-15);
        assert!(lambda_minus(0.5, 0.5, 0.5).is_err());
        assert!(lambda_minus(H, H, 1.2).is_err());
    }

    #[test]
    fn thresholds() {
        assert!((noise_threshold(&witness_ghz(), &ghz_state()).unwrap() - 5.0 / 7.0).abs() < 1e-12);
        assert!((noise_threshold(&witness_w1(), &w_state()).unwrap() - 13.0 / 21.0).abs() < 1e-12);
        assert!((noise_threshold(&witness_w2(), &ghz_state()).unwrap() - 3.0 / 7.0).abs() < 1e-12);
        assert!(matches!(noise_threshold(&witness_w1(), &ghz_state()), Err(Error::NoThreshold(_))));
    }

    #[test]
    fn catalog_lookup() {
        assert_eq!(by_name("ghz", None).unwrap().name, "ghz");
        assert!(by_name("phi", Some((0.6, 0.8))).is_ok());
        assert!(by_name("phi", None).is_err());
        assert_eq!(by_name("nope", None).unwrap_err(), Error::UnknownWitness("nope".into()));
    }
}
