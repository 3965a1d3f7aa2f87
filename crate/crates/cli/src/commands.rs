//! Subcommand implementations. Each returns a payload or a coded failure and
//! never prints.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::Path;

use lvnm::certify::{lower_bound_with, CertifyOptions};
use lvnm::pauli::to_pauli;
use lvnm::settings::{
    decomposition_search, group_pauli_terms, paper_decomposition, verify_decomposition, CoverStrategy,
    DecompositionFile, Direction, LocalDecomposition, PaperDecomposition,
};
use lvnm::simulate::{estimate_witness_with, Allocation};
use lvnm::states::{
    bell_psi_minus, ghz_state, schmidt_state, w_state, white_noise_mix, DensityMatrix, DensityMatrixFile, PureState,
    PureStateFile,
};
use lvnm::witnesses::{by_name, classify, expectation, noise_threshold, Witness};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::output::{Failure, Outcome, EXIT_IO, EXIT_SEARCH_FAILED, EXIT_VALIDATION};

pub type CmdResult = Result<Outcome, Failure>;

pub fn load_witness(name: &str, alpha: Option<f64>, beta: Option<f64>) -> Result<Witness, Failure> {
    let params = match (alpha, beta) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => return Err(Failure::new("invalid-parameter", "--alpha and --beta go together", EXIT_VALIDATION)),
    };
    Ok(by_name(name, params)?)
}

/// Reads either a bare document or the `payload` of a previous command's output.
fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new("io", format!("{}: {e}", path.display()), EXIT_IO))?;
    let mut value: Value = serde_json::from_str(&text)?;
    if let Some(payload) = value.get_mut("payload").map(Value::take) {
        value = payload;
        if let Some(inner) = value.get_mut("decomposition").filter(|d| d.is_object()).map(Value::take) {
            value = inner;
        }
    }
    Ok(serde_json::from_value(value)?)
}

pub fn load_density(path: &Path) -> Result<DensityMatrix, Failure> {
    let file: DensityMatrixFile = read_json(path)?;
    Ok(DensityMatrix::try_from(file)?)
}

pub fn cmd_witness(w: &Witness) -> CmdResult {
    let c = to_pauli(&w.operator, w.n_qubits)?;
    Ok(Outcome::new(json!({
        "name": w.name,
        "n_qubits": w.n_qubits,
        "trace": w.operator.trace().re,
        "matrix": { "real": w.operator.real_parts(), "imag": w.operator.imag_parts() },
        "pauli": c.to_sparse_map(),
        "pauli_scale": c.prefactor_scale(),
        "verdict_rules": w.verdict_rules,
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Paper,
    Cover,
    Search,
}

impl Mode {
    fn as_str(&self) -> &'static str {
        match self {
            Mode::Paper => "paper",
            Mode::Cover => "cover",
            Mode::Search => "search",
        }
    }
}

pub struct DecomposeOptions<'a> {
    pub mode: Mode,
    pub axes: &'a str,
    pub greedy: bool,
    pub max_settings: usize,
    pub restarts: usize,
    pub seed: u64,
    pub variant: Option<&'a str>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

/// Hand-built decomposition matching a catalog witness.
fn paper_for(w: &Witness, opts: &DecomposeOptions) -> Result<LocalDecomposition, Failure> {
    let which = match (w.name.as_str(), opts.variant) {
        ("w0", None | Some("anton")) => PaperDecomposition::Anton {
            alpha: FRAC_1_SQRT_2,
            beta: -FRAC_1_SQRT_2,
        },
        ("ghz", None) => PaperDecomposition::Ghz,
        ("w1", None) => PaperDecomposition::W1,
        ("w2", None) => PaperDecomposition::W2,
        (name, variant) if name.starts_with("phi(") => {
            let (alpha, beta) = opts
                .alpha
                .zip(opts.beta)
                .ok_or_else(|| Failure::new("invalid-parameter", "phi needs --alpha and --beta", EXIT_VALIDATION))?;
            match variant {
                None | Some("anton") => PaperDecomposition::Anton { alpha, beta },
                Some("sanpera5") => PaperDecomposition::Sanpera5 { alpha, beta },
                Some(v) => return Err(Failure::new("unknown-decomposition", format!("unknown variant '{v}'"), EXIT_VALIDATION)),
            }
        }
        (name, variant) => {
            return Err(Failure::new(
                "unknown-decomposition",
                format!("no hand-built decomposition '{}' for witness '{name}'", variant.unwrap_or("default")),
                EXIT_VALIDATION,
            ))
        }
    };
    Ok(paper_decomposition(which)?)
}

/// `xyz` shares the axes among all parties; `xz,z,xyz` lists them per party.
pub fn parse_axes(spec: &str) -> Result<Vec<Vec<Direction>>, Failure> {
    spec.split(',')
        .map(|part| {
            let dirs = part.chars().map(Direction::parse_axis).collect::<Result<Vec<_>, _>>()?;
            if dirs.is_empty() {
                return Err(Failure::new("invalid-parameter", "empty axis list", EXIT_VALIDATION));
            }
            Ok(dirs)
        })
        .collect()
}

fn decomposition_payload(w: &Witness, mode: Mode, d: &LocalDecomposition) -> Value {
    json!({
        "witness": w.name,
        "mode": mode.as_str(),
        "n_settings": d.n_settings(),
        "product_projectors": d.product_projector_count(),
        "residual": d.residual,
        "decomposition": DecompositionFile::from(d),
    })
}

pub fn cmd_decompose(w: &Witness, opts: &DecomposeOptions) -> CmdResult {
    let c = to_pauli(&w.operator, w.n_qubits)?;
    match opts.mode {
        Mode::Paper => {
            let d = paper_for(w, opts)?;
            Ok(Outcome::new(decomposition_payload(w, opts.mode, &d)))
        }
        Mode::Cover => {
            let strategy = if opts.greedy { CoverStrategy::Greedy } else { CoverStrategy::Exact };
            let d = group_pauli_terms(&c, &parse_axes(opts.axes)?, strategy)?;
            Ok(Outcome::new(decomposition_payload(w, opts.mode, &d)))
        }
        Mode::Search => {
            let out = decomposition_search(&c, opts.max_settings, opts.restarts, opts.seed)?;
            let mut payload = decomposition_payload(w, opts.mode, &out.decomposition);
            payload["best_residual"] = json!(out.best_residual);
            payload["best_restart"] = json!(out.best_restart);
            payload["restarts_run"] = json!(out.restarts_run);
            payload["seed"] = json!(opts.seed);
            if out.success {
                Ok(Outcome::new(payload))
            } else {
                Err(Failure::new(
                    "search-failed",
                    format!(
                        "no decomposition with {} settings after {} restarts (best residual {:e})",
                        opts.max_settings, out.restarts_run, out.best_residual
                    ),
                    EXIT_SEARCH_FAILED,
                )
                .with_payload(payload))
            }
        }
    }
}

pub fn cmd_verify(w: &Witness, path: &Path, tol: f64) -> CmdResult {
    let file: DecompositionFile = read_json(path)?;
    let d = LocalDecomposition::try_from(file)?;
    let residual = verify_decomposition(&d, &w.operator)?;
    let payload = json!({
        "witness": w.name,
        "n_settings": d.n_settings(),
        "residual": residual,
        "tol": tol,
        "verified": residual < tol,
    });
    if residual < tol {
        Ok(Outcome::new(payload))
    } else {
        Err(Failure::new(
            "verification-failed",
            format!("residual {residual:e} exceeds tolerance {tol:e}"),
            EXIT_VALIDATION,
        )
        .with_payload(payload))
    }
}

pub fn cmd_certify(w: &Witness, restarts: usize, seed: u64) -> CmdResult {
    let cert = lower_bound_with(w, &CertifyOptions { restarts, seed })?;
    Ok(Outcome::new(serde_json::to_value(cert)?))
}

pub fn cmd_classify(w: &Witness, state: &Path) -> CmdResult {
    let rho = load_density(state)?;
    let verdict = classify(w, expectation(w, &rho)?);
    Ok(Outcome::new(json!({ "witness": w.name, "value": verdict.value, "label": verdict.label })))
}

pub fn cmd_simulate(
    w: &Witness,
    state: &Path,
    decomposition: Option<&Path>,
    opts: &DecomposeOptions,
    shots: u64,
    seed: u64,
    allocation: Allocation,
) -> CmdResult {
    let rho = load_density(state)?;
    let d = match decomposition {
        Some(path) => {
            let d = LocalDecomposition::try_from(read_json::<DecompositionFile>(path)?)?;
            d.verified_against(&w.operator)?
        }
        None => paper_for(w, opts)?,
    };
    let report = estimate_witness_with(&rho, &d, shots, seed, allocation)?;
    let mut out = Outcome::new(serde_json::to_value(&report)?);
    out.diagnostics.push(format!("exact value {:.16e}", expectation(w, &rho)?));
    Ok(out)
}

/// Named pure states, or a path to a pure-state file.
pub fn pure_state(name: &str, alpha: Option<f64>, beta: Option<f64>) -> Result<PureState, Failure> {
    match name {
        "ghz" => Ok(ghz_state()),
        "w" => Ok(w_state()),
        "psi-minus" => Ok(bell_psi_minus()),
        "schmidt" => {
            let (a, b) = alpha
                .zip(beta)
                .ok_or_else(|| Failure::new("invalid-parameter", "schmidt needs --alpha and --beta", EXIT_VALIDATION))?;
            Ok(schmidt_state(a, b)?)
        }
        path if Path::new(path).is_file() => Ok(PureState::try_from(read_json::<PureStateFile>(Path::new(path))?)?),
        other => Err(Failure::new("unknown-state", format!("unknown state '{other}'"), EXIT_VALIDATION)),
    }
}

pub fn cmd_threshold(w: &Witness, psi: &PureState, state_label: &str) -> CmdResult {
    let p = noise_threshold(w, psi)?;
    Ok(Outcome::new(json!({ "witness": w.name, "state": state_label, "threshold": p })))
}

/// Density-matrix file for a named state, optionally mixed with white noise.
pub fn cmd_state(name: &str, alpha: Option<f64>, beta: Option<f64>, noise: Option<f64>) -> CmdResult {
    let rho = match name {
        "mixed2" => DensityMatrix::maximally_mixed(2),
        "mixed3" => DensityMatrix::maximally_mixed(3),
        _ => {
            let psi = pure_state(name, alpha, beta)?;
            match noise {
                Some(p) => white_noise_mix(&psi, p)?,
                None => psi.density(),
            }
        }
    };
    Ok(Outcome::new(serde_json::to_value(DensityMatrixFile::from(&rho))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_parsing() {
        assert_eq!(parse_axes("xyz").unwrap().len(), 1);
        let per = parse_axes("xz,z,xyz").unwrap();
        assert_eq!(per.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 1, 3]);
        assert!(parse_axes("xq").is_err());
        assert!(parse_axes("x,,z").is_err());
    }

    #[test]
    fn witness_payload() {
        let w = load_witness("ghz", None, None).unwrap();
        let out = cmd_witness(&w).unwrap();
        assert!((out.payload["trace"].as_f64().unwrap() - 5.0).abs() < 1e-12);
        assert!(load_witness("phi", Some(0.6), None).is_err());
    }
}
