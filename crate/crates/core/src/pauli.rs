//! Pauli product basis: coefficient tensors, slice matrices, Bloch vectors.
//!
//! Coefficients are stored normalized, `M = sum_idx coeffs[idx] * sigma_idx`, so
//! `coeffs[idx] = Tr(M sigma_idx) / 2^n`. Tables written with a `1/2^n` prefactor
//! are recovered with [`PauliCoefficients::prefactor_scale`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, ComplexMatrix, Mat3, C64};

pub const PAULI_I: usize = 0;
pub const PAULI_X: usize = 1;
pub const PAULI_Y: usize = 2;
pub const PAULI_Z: usize = 3;

const LABELS: [char; 4] = ['1', 'x', 'y', 'z'];
const MAX_QUBITS: usize = 5;
/// Coefficients smaller than this are left out of printed supports.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Single-qubit Pauli matrix `sigma_i`, with `sigma_0` the identity.
pub fn sigma(i: usize) -> ComplexMatrix {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let im = C64::new(0.0, 1.0);
    let entries = match i {
        PAULI_I => vec![one, z, z, one],
        PAULI_X => vec![z, one, one, z],
        PAULI_Y => vec![z, -im, im, z],
        PAULI_Z => vec![one, z, z, -one],
        _ => panic!("Pauli index {i} out of range"),
    };
    ComplexMatrix::from_vec(2, entries).expect("2x2")
}

/// Tensor product `sigma_{i1} (x) ... (x) sigma_{in}`.
pub fn pauli_string(indices: &[usize]) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = indices.iter().map(|&i| sigma(i)).collect();
    kron_all(&factors)
}

/// Nonzero entry of row `row` of a Pauli string: `(column, value)`.
fn pauli_row_entry(indices: &[usize], row: usize) -> (usize, C64) {
    let n = indices.len();
    let mut col = 0usize;
    let mut value = C64::new(1.0, 0.0);
    for (k, &p) in indices.iter().enumerate() {
        let bit = (row >> (n - 1 - k)) & 1;
        let (cbit, v) = match p {
            PAULI_I => (bit, C64::new(1.0, 0.0)),
            PAULI_X => (bit ^ 1, C64::new(1.0, 0.0)),
            PAULI_Y => (bit ^ 1, if bit == 0 { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) }),
            _ => (bit, if bit == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) }),
        };
        col |= cbit << (n - 1 - k);
        value *= v;
    }
    (col, value)
}

fn digits(flat: usize, n: usize) -> Vec<usize> {
    (0..n).map(|k| (flat >> (2 * (n - 1 - k))) & 3).collect()
}

fn flat_index(indices: &[usize]) -> usize {
    indices.iter().fold(0, |acc, &i| acc * 4 + i)
}

/// Label of a Pauli index tuple, e.g. `(3, 3, 0)` -> `"zz1"`.
pub fn index_label(indices: &[usize]) -> String {
    indices.iter().map(|&i| LABELS[i]).collect()
}

pub fn parse_index_label(label: &str) -> Result<Vec<usize>> {
    label
        .chars()
        .map(|ch| {
            LABELS
                .iter()
                .position(|&l| l == ch.to_ascii_lowercase())
                .ok_or_else(|| Error::InvalidParameter(format!("bad Pauli label '{label}'")))
        })
        .collect()
}

/// Real coefficient tensor of a Hermitian operator in the Pauli product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCoefficients {
    n_qubits: usize,
    coeffs: Vec<f64>,
}

impl PauliCoefficients {
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedQubits(n_qubits));
        }
        Ok(Self {
            n_qubits,
            coeffs: vec![0.0; 1 << (2 * n_qubits)],
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    /// Factor converting stored values to a display with a `1/2^n` prefactor.
    pub fn prefactor_scale(&self) -> f64 {
        (1usize << self.n_qubits) as f64
    }

    pub fn get(&self, indices: &[usize]) -> f64 {
        assert_eq!(indices.len(), self.n_qubits);
        self.coeffs[flat_index(indices)]
    }

    pub fn set(&mut self, indices: &[usize], value: f64) {
        assert_eq!(indices.len(), self.n_qubits);
        self.coeffs[flat_index(indices)] = value;
    }

    /// Value by label such as `"zz1"`.
    pub fn get_label(&self, label: &str) -> Result<f64> {
        let idx = parse_index_label(label)?;
        if idx.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: idx.len(),
            });
        }
        Ok(self.get(&idx))
    }

    /// Iterates `(index tuple, value)` for entries with `|value| > threshold`.
    pub fn support(&self, threshold: f64) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let n = self.n_qubits;
        self.coeffs
            .iter()
            .enumerate()
            .filter(move |(_, v)| v.abs() > threshold)
            .map(move |(flat, &v)| (digits(flat, n), v))
    }

    /// Sparse `{label: value}` map of the entries above [`SUPPORT_THRESHOLD`].
    pub fn to_sparse_map(&self) -> BTreeMap<String, f64> {
        self.support(SUPPORT_THRESHOLD)
            .map(|(idx, v)| (index_label(&idx), v))
            .collect()
    }

    pub fn from_sparse_map(n_qubits: usize, map: &BTreeMap<String, f64>) -> Result<Self> {
        let mut out = Self::zeros(n_qubits)?;
        for (label, &v) in map {
            let idx = parse_index_label(label)?;
            if idx.len() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    got: idx.len(),
                });
            }
            out.set(&idx, v);
        }
        Ok(out)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &PauliCoefficients, b: f64) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| a * x + b * y).collect(),
        })
    }
}

/// Coefficients `Tr(m sigma_idx) / 2^n` of a Hermitian operator.
pub fn to_pauli(m: &ComplexMatrix, n_qubits: usize) -> Result<PauliCoefficients> {
    let mut out = PauliCoefficients::zeros(n_qubits)?;
    let dim = 1usize << n_qubits;
    if m.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.dim(),
        });
    }
    let dev = m.hermitian_deviation();
    if dev > 1e-10 * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    for flat in 0..out.coeffs.len() {
        let idx = digits(flat, n_qubits);
        let mut acc = C64::new(0.0, 0.0);
        for row in 0..dim {
            let (col, v) = pauli_row_entry(&idx, row);
            acc += v * m[(col, row)];
        }
        acc /= dim as f64;
        if acc.im.abs() > 1e-10 {
            return Err(Error::NotHermitian(acc.im.abs()));
        }
        out.coeffs[flat] = acc.re;
    }
    Ok(out)
}

/// Inverse of [`to_pauli`].
pub fn from_pauli(c: &PauliCoefficients) -> ComplexMatrix {
    let n = c.n_qubits;
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim);
    for (flat, &v) in c.coeffs.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let idx = digits(flat, n);
        for row in 0..dim {
            let (col, e) = pauli_row_entry(&idx, row);
            m[(row, col)] += e * v;
        }
    }
    m
}

/// Which parties index the rows and columns of the slice matrices, and which
/// party is sliced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Pairing {
    /// Two qubits: rows A, columns B, no slicing.
    #[serde(rename = "A|B")]
    AB,
    /// Rows A, columns B, sliced on C.
    #[serde(rename = "AB|C")]
    AbC,
    /// Rows A, columns C, sliced on B.
    #[serde(rename = "AC|B")]
    AcB,
    /// Rows B, columns C, sliced on A.
    #[serde(rename = "BC|A")]
    BcA,
}

impl Pairing {
    pub const THREE_QUBIT: [Pairing; 3] = [Pairing::AbC, Pairing::AcB, Pairing::BcA];

    pub fn label(&self) -> &'static str {
        match self {
            Pairing::AB => "A|B",
            Pairing::AbC => "AB|C",
            Pairing::AcB => "AC|B",
            Pairing::BcA => "BC|A",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A|B" => Ok(Pairing::AB),
            "AB|C" => Ok(Pairing::AbC),
            "AC|B" => Ok(Pairing::AcB),
            "BC|A" => Ok(Pairing::BcA),
            _ => Err(Error::InvalidPairing(s.to_string(), 0)),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Pairing::AB => 2,
            _ => 3,
        }
    }

    /// `(row party, column party, sliced party)`.
    fn parties(&self) -> (usize, usize, Option<usize>) {
        match self {
            Pairing::AB => (0, 1, None),
            Pairing::AbC => (0, 1, Some(2)),
            Pairing::AcB => (0, 2, Some(1)),
            Pairing::BcA => (1, 2, Some(0)),
        }
    }

    /// The pairings applicable to an `n`-qubit operator.
    pub fn all_for(n_qubits: usize) -> Result<&'static [Pairing]> {
        match n_qubits {
            2 => Ok(&[Pairing::AB]),
            3 => Ok(&Pairing::THREE_QUBIT),
            n => Err(Error::UnsupportedQubits(n)),
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Reduced 3x3 slice matrices of a coefficient tensor.
///
/// For three qubits `matrices[k][i][j]` is the coefficient with the row party at
/// index `i + 1`, the column party at `j + 1` and the sliced party at `k`; slice
/// `k = 0` is the identity slice. For two qubits there is a single matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceFamily {
    pub pairing: Pairing,
    pub matrices: Vec<Mat3>,
}

impl SliceFamily {
    pub fn scaled(&self, factor: f64) -> Vec<Mat3> {
        self.matrices
            .iter()
            .map(|m| m.map(|row| row.map(|x| x * factor)))
            .collect()
    }
}

pub fn slice_family(c: &PauliCoefficients, pairing: Pairing) -> Result<SliceFamily> {
    if pairing.n_qubits() != c.n_qubits {
        return Err(Error::InvalidPairing(pairing.label().to_string(), c.n_qubits));
    }
    let (rp, cp, sp) = pairing.parties();
    let slices: Vec<Option<usize>> = match sp {
        Some(_) => (0..4).map(Some).collect(),
        None => vec![None],
    };
    let matrices = slices
        .into_iter()
        .map(|k| {
            let mut m = [[0.0; 3]; 3];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, entry) in row.iter_mut().enumerate() {
                    let mut idx = vec![0usize; c.n_qubits];
                    idx[rp] = i + 1;
                    idx[cp] = j + 1;
                    if let (Some(s), Some(k)) = (sp, k) {
                        idx[s] = k;
                    }
                    *entry = c.get(&idx);
                }
            }
            m
        })
        .collect();
    Ok(SliceFamily { pairing, matrices })
}

/// Bloch representation `(1/2, s1, s2, s3)` of a rank-one qubit projector,
/// where `P = 1/2 * 1 + sum_i s_i sigma_i`.
pub fn bloch_vector(projector: &ComplexMatrix) -> Result<[f64; 4]> {
    if projector.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: projector.dim(),
        });
    }
    let dev = projector.hermitian_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let square = projector * projector;
    let idempotent = square.frobenius_distance(projector)?;
    let tr = projector.trace();
    if idempotent > 1e-10 || (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::InvalidParameter("not a rank-one projector".into()));
    }
    let c = to_pauli(projector, 1)?;
    Ok([0.5, c.get(&[1]), c.get(&[2]), c.get(&[3])])
}
