//! Hand-built decompositions of the catalog witnesses.

use std::f64::consts::{FRAC_PI_3, SQRT_2};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::settings::{LocalDecomposition, MeasurementSetting};
use crate::witnesses::{witness_ghz, witness_phi, witness_w1, witness_w2, Witness};

const X: [f64; 3] = [1.0, 0.0, 0.0];
const Y: [f64; 3] = [0.0, 1.0, 0.0];
const Z: [f64; 3] = [0.0, 0.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PaperDecomposition {
    /// `|phi><phi|^{T_B}` from three paired settings xx, yy, zz.
    Anton { alpha: f64, beta: f64 },
    /// `W_GHZ` from zzz, xxx and the two diagonal settings `(x +- y)/sqrt(2)`.
    Ghz,
    /// `W_W1` from zzz plus four settings along `(z +- x)/sqrt(2)`, `(z +- y)/sqrt(2)`.
    W1,
    /// `W_W2`: the GHZ decomposition with `1/4` removed from the zzz setting.
    W2,
    /// Five product projectors grouped into four settings.
    Sanpera5 { alpha: f64, beta: f64 },
}

impl PaperDecomposition {
    pub fn name(&self) -> &'static str {
        match self {
            PaperDecomposition::Anton { .. } => "anton",
            PaperDecomposition::Ghz => "ghz",
            PaperDecomposition::W1 => "w1",
            PaperDecomposition::W2 => "w2",
            PaperDecomposition::Sanpera5 { .. } => "sanpera5",
        }
    }

    /// The witness this decomposition reconstructs.
    pub fn target(&self) -> Result<Witness> {
        match *self {
            PaperDecomposition::Anton { alpha, beta } | PaperDecomposition::Sanpera5 { alpha, beta } => {
                witness_phi(alpha, beta)
            }
            PaperDecomposition::Ghz => Ok(witness_ghz()),
            PaperDecomposition::W1 => Ok(witness_w1()),
            PaperDecomposition::W2 => Ok(witness_w2()),
        }
    }
}

/// Looks a decomposition up by name; `anton` and `sanpera5` need `(alpha, beta)`.
pub fn paper_decomposition_by_name(name: &str, params: Option<(f64, f64)>) -> Result<LocalDecomposition> {
    let need = || params.ok_or_else(|| Error::InvalidParameter(format!("{name} needs alpha and beta")));
    let which = match name {
        "anton" => {
            let (alpha, beta) = need()?;
            PaperDecomposition::Anton { alpha, beta }
        }
        "sanpera5" => {
            let (alpha, beta) = need()?;
            PaperDecomposition::Sanpera5 { alpha, beta }
        }
        "ghz" => PaperDecomposition::Ghz,
        "w1" => PaperDecomposition::W1,
        "w2" => PaperDecomposition::W2,
        other => return Err(Error::UnknownDecomposition(other.to_string())),
    };
    paper_decomposition(which)
}

/// Builds the decomposition and records its residual against the target witness.
pub fn paper_decomposition(which: PaperDecomposition) -> Result<LocalDecomposition> {
    let target = which.target()?;
    let settings = match which {
        PaperDecomposition::Anton { alpha, beta } => anton(alpha, beta)?,
        PaperDecomposition::Ghz => ghz(0.0)?,
        PaperDecomposition::W2 => ghz(-0.25)?,
        PaperDecomposition::W1 => w1()?,
        PaperDecomposition::Sanpera5 { alpha, beta } => sanpera5(alpha, beta)?,
    };
    LocalDecomposition::new(target.name.clone(), settings).verified_against(&target.operator)
}

fn anton(alpha: f64, beta: f64) -> Result<Vec<MeasurementSetting>> {
    let ab = alpha * beta;
    Ok(vec![
        MeasurementSetting::new(&[X, X], vec![ab, 0.0, 0.0, ab])?,
        MeasurementSetting::new(&[Y, Y], vec![0.0, -ab, -ab, 0.0])?,
        MeasurementSetting::new(&[Z, Z], vec![alpha * alpha, 0.0, 0.0, beta * beta])?,
    ])
}

fn ghz(identity_shift: f64) -> Result<Vec<MeasurementSetting>> {
    let diag = SQRT_2 / 8.0;
    Ok(vec![
        MeasurementSetting::from_sign_fn(&[Z; 3], |e| {
            (5.0 - e[1] * e[2] - e[0] * e[2] - e[0] * e[1]) / 8.0 + identity_shift
        })?,
        MeasurementSetting::from_sign_fn(&[X; 3], |e| -0.25 * e[0] * e[1] * e[2])?,
        MeasurementSetting::from_sign_fn(&[[1.0, 1.0, 0.0]; 3], |e| diag * e[0] * e[1] * e[2])?,
        MeasurementSetting::from_sign_fn(&[[1.0, -1.0, 0.0]; 3], |e| diag * e[0] * e[1] * e[2])?,
    ])
}

fn w1() -> Result<Vec<MeasurementSetting>> {
    let mut out = vec![MeasurementSetting::from_sign_fn(&[Z; 3], |e| {
        let singles = e[0] + e[1] + e[2];
        let pairs = e[0] * e[1] + e[0] * e[2] + e[1] * e[2];
        (17.0 + 7.0 * e[0] * e[1] * e[2] + 3.0 * singles + 5.0 * pairs) / 24.0
    })?];
    // (1 + sigma_z +- sigma_{x,y}) = 1 + sqrt(2) n . sigma
    for n in [[1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, -1.0, 1.0]] {
        out.push(MeasurementSetting::from_sign_fn(&[n; 3], |e| {
            -e.iter().map(|s| 1.0 + SQRT_2 * s).product::<f64>() / 24.0
        })?);
    }
    Ok(out)
}

fn bloch_of(ket: [C64; 2]) -> [f64; 3] {
    let cross = ket[0].conj() * ket[1];
    [2.0 * cross.re, 2.0 * cross.im, ket[0].norm_sqr() - ket[1].norm_sqr()]
}

fn sanpera5(alpha: f64, beta: f64) -> Result<Vec<MeasurementSetting>> {
    if alpha <= 0.0 || beta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "the five-projector construction needs positive Schmidt coefficients, got ({alpha}, {beta})"
        )));
    }
    let cos = (alpha / (alpha + beta)).sqrt();
    let sin = (beta / (alpha + beta)).sqrt();
    let phase = C64::from_polar(1.0, FRAC_PI_3);
    let a1 = [phase * cos, phase.conj() * sin];
    let a2 = [phase.conj() * cos, phase * sin];
    let a3 = [a1[0] + a2[0], a1[1] + a2[1]];
    let weight = (alpha + beta).powi(2) / 3.0;
    let mut out = Vec::with_capacity(4);
    for ket in [a1, a2, a3] {
        let n = bloch_of(ket);
        out.push(MeasurementSetting::new(&[n, n], vec![weight, 0.0, 0.0, 0.0])?);
    }
    let ab = alpha * beta;
    out.push(MeasurementSetting::new(&[Z, Z], vec![0.0, -ab, -ab, 0.0])?);
    Ok(out)
}
