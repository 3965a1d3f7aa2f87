//! Pure states, density matrices and the state families used by the witnesses.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron_all, partial_transpose, ComplexMatrix, C64};

const NORM_TOL: f64 = 1e-12;
const PARAM_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

/// Number of pure terms mixed by the default biseparable sampler.
pub const BISEPARABLE_TERMS: usize = 4;

/// Normalized state vector on `n_qubits` qubits.
///
/// The global phase is fixed so the first nonzero amplitude is real and
/// nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self::with_canonical_phase(n_qubits, amplitudes))
    }

    /// Normalizes `amplitudes` before construction; fails on the zero vector.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(n_qubits, amplitudes.into_iter().map(|z| z / norm).collect())
    }

    fn with_canonical_phase(n_qubits: usize, mut amplitudes: Vec<C64>) -> Self {
        if let Some(first) = amplitudes.iter().find(|z| z.norm() > NORM_TOL).copied() {
            let phase = first.conj() / first.norm();
            for z in &mut amplitudes {
                *z *= phase;
            }
        }
        Self { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: self.projector(),
            noise_radius: 0.0,
        }
    }
}

/// Trace-one positive-semidefinite Hermitian operator on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
    /// Radius of the separable noise ball the state was drawn from. Carried as
    /// metadata only.
    noise_radius: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n_qubits: usize, matrix: ComplexMatrix) -> Result<Self> {
        if n_qubits == 0 || matrix.dim() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: matrix.dim(),
            });
        }
        let dev = matrix.hermitian_deviation();
        if dev > DENSITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = hermitian_eigenvalues(&matrix)?[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(Self {
            n_qubits,
            matrix,
            noise_radius: 0.0,
        })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
            noise_radius: 0.0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn noise_radius(&self) -> f64 {
        self.noise_radius
    }

    pub fn with_noise_radius(mut self, d: f64) -> Self {
        self.noise_radius = d;
        self
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("density matrices are Hermitian")
    }

    /// Convex combination; weights must be nonnegative and sum to one.
    pub fn mixture(terms: &[(f64, DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::EmptyInput("mixture needs at least one term"));
        };
        let n = first.n_qubits;
        let mut acc = ComplexMatrix::zeros(1 << n);
        let mut total = 0.0;
        for (w, rho) in terms {
            if *w < 0.0 || rho.n_qubits != n {
                return Err(Error::InvalidParameter("bad mixture term".into()));
            }
            acc = &acc + &rho.matrix.scale(*w);
            total += w;
        }
        if (total - 1.0).abs() > PARAM_TOL {
            return Err(Error::InvalidParameter(format!("mixture weights sum to {total}")));
        }
        Ok(Self {
            n_qubits: n,
            matrix: acc,
            noise_radius: 0.0,
        })
    }

    /// Applies `U rho U^dagger` for a unitary of matching dimension.
    pub fn conjugated(&self, unitary: &ComplexMatrix) -> Result<Self> {
        if unitary.dim() != self.matrix.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.dim(),
                got: unitary.dim(),
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &(unitary * &self.matrix) * &unitary.dagger(),
            noise_radius: self.noise_radius,
        })
    }
}

/// On-disk form: `{ "n_qubits": n, "real": [[..]], "imag": [[..]] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixFile {
    pub n_qubits: usize,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for DensityMatrixFile {
    fn from(rho: &DensityMatrix) -> Self {
        Self {
            n_qubits: rho.n_qubits,
            real: rho.matrix.real_parts(),
            imag: rho.matrix.imag_parts(),
        }
    }
}

impl TryFrom<DensityMatrixFile> for DensityMatrix {
    type Error = Error;

    fn try_from(f: DensityMatrixFile) -> Result<Self> {
        DensityMatrix::new(f.n_qubits, ComplexMatrix::from_parts(&f.real, &f.imag)?)
    }
}

/// On-disk form of a pure state: `{ "n_qubits": n, "real": [..], "imag": [..] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PureStateFile {
    pub n_qubits: usize,
    pub real: Vec<f64>,
    pub imag: Vec<f64>,
}

impl From<&PureState> for PureStateFile {
    fn from(psi: &PureState) -> Self {
        Self {
            n_qubits: psi.n_qubits,
            real: psi.amplitudes.iter().map(|z| z.re).collect(),
            imag: psi.amplitudes.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<PureStateFile> for PureState {
    type Error = Error;

    fn try_from(f: PureStateFile) -> Result<Self> {
        if f.real.len() != f.imag.len() {
            return Err(Error::DimensionMismatch {
                expected: f.real.len(),
                got: f.imag.len(),
            });
        }
        let amps = f.real.iter().zip(&f.imag).map(|(&r, &i)| C64::new(r, i)).collect();
        PureState::new(f.n_qubits, amps)
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn basis_state(n_qubits: usize, terms: &[(usize, C64)]) -> Result<PureState> {
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
    for &(i, a) in terms {
        amps[i] += a;
    }
    PureState::new(n_qubits, amps)
}

/// `a|01> + b|10>` with `a, b >= 0`, `a^2 + b^2 = 1`.
pub fn schmidt_state(a: f64, b: f64) -> Result<PureState> {
    if a < 0.0 || b < 0.0 {
        return Err(Error::InvalidParameter("Schmidt coefficients must be nonnegative".into()));
    }
    if (a * a + b * b - 1.0).abs() > PARAM_TOL {
        return Err(Error::InvalidParameter(format!("a^2 + b^2 = {} is not 1", a * a + b * b)));
    }
    let norm = (a * a + b * b).sqrt();
    basis_state(2, &[(0b01, real(a / norm)), (0b10, real(b / norm))])
}

/// `(|00> - |11>)/sqrt(2)`.
pub fn bell_psi_minus() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    basis_state(2, &[(0b00, real(h)), (0b11, real(-h))]).expect("normalized")
}

/// `(|000> + |111>)/sqrt(2)`.
pub fn ghz_state() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    basis_state(3, &[(0b000, real(h)), (0b111, real(h))]).expect("normalized")
}

/// `(|100> + |010> + |001>)/sqrt(3)`.
pub fn w_state() -> PureState {
    let t = 1.0 / 3f64.sqrt();
    basis_state(3, &[(0b100, real(t)), (0b010, real(t)), (0b001, real(t))]).expect("normalized")
}

/// Three-qubit normal form
/// `l0|000> + l1 e^{i theta}|100> + l2|101> + l3|110> + l4|111>`.
///
/// With `l4 = theta = 0` this is the W-class normal form.
pub fn slocc_normal_form(lambdas: [f64; 5], theta: f64) -> Result<PureState> {
    if lambdas.iter().any(|&l| l < 0.0) {
        return Err(Error::InvalidParameter("normal-form coefficients must be nonnegative".into()));
    }
    let total: f64 = lambdas.iter().map(|l| l * l).sum();
    if (total - 1.0).abs() > PARAM_TOL {
        return Err(Error::InvalidParameter(format!("sum of squares {total} is not 1")));
    }
    let norm = total.sqrt();
    let [l0, l1, l2, l3, l4] = lambdas.map(|l| l / norm);
    basis_state(
        3,
        &[
            (0b000, real(l0)),
            (0b100, C64::from_polar(l1, theta)),
            (0b101, real(l2)),
            (0b110, real(l3)),
            (0b111, real(l4)),
        ],
    )
}

/// `p |psi><psi| + (1 - p) 1/2^n`.
pub fn white_noise_mix(psi: &PureState, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("mixing weight {p} outside [0, 1]")));
    }
    let dim = 1usize << psi.n_qubits;
    let noise = ComplexMatrix::identity(dim).scale((1.0 - p) / dim as f64);
    Ok(DensityMatrix {
        n_qubits: psi.n_qubits,
        matrix: &psi.projector().scale(p) + &noise,
        noise_radius: 0.0,
    })
}

/// Bipartitions used by the PPT test and the biseparable sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bipartition {
    /// Two qubits, A versus B.
    #[serde(rename = "A-B")]
    AB,
    #[serde(rename = "A-BC")]
    ABc,
    #[serde(rename = "B-AC")]
    BAc,
    #[serde(rename = "C-AB")]
    CAb,
}

impl Bipartition {
    pub const THREE_QUBIT: [Bipartition; 3] = [Bipartition::ABc, Bipartition::BAc, Bipartition::CAb];

    pub fn n_qubits(&self) -> usize {
        match self {
            Bipartition::AB => 2,
            _ => 3,
        }
    }

    /// The party transposed by the PPT test; transposing the complement gives
    /// the same spectrum.
    pub fn transposed_party(&self) -> usize {
        match self {
            Bipartition::AB => 1,
            Bipartition::ABc => 0,
            Bipartition::BAc => 1,
            Bipartition::CAb => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Bipartition::AB => "A-B",
            Bipartition::ABc => "A-BC",
            Bipartition::BAc => "B-AC",
            Bipartition::CAb => "C-AB",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A-B" => Ok(Bipartition::AB),
            "A-BC" => Ok(Bipartition::ABc),
            "B-AC" => Ok(Bipartition::BAc),
            "C-AB" => Ok(Bipartition::CAb),
            _ => Err(Error::InvalidParameter(format!("unknown bipartition '{s}'"))),
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Partial transpose of `rho` across `cut`.
pub fn partial_transpose_across(rho: &DensityMatrix, cut: Bipartition) -> Result<ComplexMatrix> {
    if cut.n_qubits() != rho.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: cut.n_qubits(),
            got: rho.n_qubits,
        });
    }
    partial_transpose(&rho.matrix, cut.transposed_party(), &vec![2; rho.n_qubits])
}

fn random_ket(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Tensor product of `n` Haar-random single-qubit states.
pub fn random_product_state(n_qubits: usize, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    random_product_state_with(n_qubits, &mut rng)
}

pub fn random_product_state_with(n_qubits: usize, rng: &mut impl Rng) -> Result<PureState> {
    if n_qubits == 0 {
        return Err(Error::UnsupportedQubits(0));
    }
    let mut amps = vec![C64::new(1.0, 0.0)];
    for _ in 0..n_qubits {
        let q = random_ket(2, rng);
        amps = amps.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
    }
    PureState::normalized(n_qubits, amps)
}

/// Tensor product of `n` Haar-random single-qubit unitaries; conjugating by it
/// rotates every party's Bloch sphere independently.
pub fn random_local_unitary(n_qubits: usize, seed: u64) -> Result<ComplexMatrix> {
    if n_qubits == 0 {
        return Err(Error::UnsupportedQubits(0));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let factors: Vec<ComplexMatrix> = (0..n_qubits)
        .map(|_| {
            // a uniform unit quaternion is a Haar-random element of SU(2)
            let q = random_ket(2, &mut rng);
            ComplexMatrix::from_vec(2, vec![q[0], q[1], -q[1].conj(), q[0].conj()]).expect("2x2")
        })
        .collect();
    Ok(kron_all(&factors))
}

/// Pure three-qubit state that is a product across `cut`: a Haar qubit on the
/// singled-out party times a Haar two-qubit state on the other two.
fn random_biseparable_pure(cut: Bipartition, rng: &mut impl Rng) -> Result<PureState> {
    let single = random_ket(2, rng);
    let pair = random_ket(4, rng);
    let lone = cut.transposed_party();
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let bits = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
        let rest: Vec<usize> = (0..3).filter(|&k| k != lone).map(|k| bits[k]).collect();
        *amp = single[bits[lone]] * pair[rest[0] * 2 + rest[1]];
    }
    PureState::normalized(3, amps)
}

/// Mixture of [`BISEPARABLE_TERMS`] random pure states that are product across
/// `cut`, with flat Dirichlet weights.
pub fn random_biseparable_state(cut: Bipartition, seed: u64) -> Result<DensityMatrix> {
    random_biseparable_state_terms(cut, BISEPARABLE_TERMS, seed)
}

pub fn random_biseparable_state_terms(cut: Bipartition, terms: usize, seed: u64) -> Result<DensityMatrix> {
    if cut.n_qubits() != 3 {
        return Err(Error::InvalidParameter(format!("biseparable sampling needs a three-qubit cut, got {cut}")));
    }
    if terms == 0 {
        return Err(Error::EmptyInput("at least one mixture term"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let mut parts = Vec::with_capacity(terms);
    for w in raw {
        parts.push((w / total, random_biseparable_pure(cut, &mut rng)?.density()));
    }
    DensityMatrix::mixture(&parts)
}
