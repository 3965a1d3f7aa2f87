//! Dense complex linear algebra for the small operators used here (dimension 2 to 32).
//!
//! Basis ordering follows the usual ket-string convention: party A is the most
//! significant bit of a computational-basis index, so `|abc>` has index `4a + 2b + c`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-8;

const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Real 3x3 matrix, row-major.
pub type Mat3 = [[f64; 3]; 3];

/// Square dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; fails unless `entries.len() == dim * dim`.
    pub fn from_vec(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, data: entries })
    }

    /// Builds a matrix from separate real and imaginary row lists.
    pub fn from_parts(real: &[Vec<f64>], imag: &[Vec<f64>]) -> Result<Self> {
        let dim = real.len();
        if imag.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: imag.len(),
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (re_row, im_row) in real.iter().zip(imag) {
            if re_row.len() != dim || im_row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: re_row.len().max(im_row.len()),
                });
            }
            data.extend(re_row.iter().zip(im_row).map(|(&r, &i)| C64::new(r, i)));
        }
        Ok(Self { dim, data })
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Rank-one projector `|psi><psi|` (no normalization applied).
    pub fn outer(ket: &[C64]) -> Self {
        Self::from_fn(ket.len(), |i, j| ket[i] * ket[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn real_parts(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.iter().map(|z| z.re).collect()).collect()
    }

    pub fn imag_parts(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.iter().map(|z| z.im).collect()).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `M - M^dagger`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> Result<C64> {
        check_same_dim(self, other)?;
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }

    /// `<psi| self |psi>`.
    pub fn expectation(&self, ket: &[C64]) -> Result<C64> {
        if ket.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: ket.len(),
            });
        }
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let row: C64 = (0..n).map(|j| self.data[i * n + j] * ket[j]).sum();
            acc += ket[i].conj() * row;
        }
        Ok(acc)
    }

    pub fn frobenius_distance(&self, other: &ComplexMatrix) -> Result<f64> {
        check_same_dim(self, other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    Ok(())
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// Kronecker product; `a` indexes the most significant factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    ComplexMatrix::from_fn(na * nb, |i, j| a[(i / nb, j / nb)] * b[(i % nb, j % nb)])
}

/// Kronecker product of a list of factors, first factor most significant.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Transposes the indices of `party` only.
pub fn partial_transpose(m: &ComplexMatrix, party: usize, local_dims: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = local_dims.iter().product();
    if total != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: m.dim(),
        });
    }
    if party >= local_dims.len() {
        return Err(Error::InvalidParameter(format!(
            "party {party} out of range for {} parties",
            local_dims.len()
        )));
    }
    // stride of the party's digit in the mixed-radix index
    let stride: usize = local_dims[party + 1..].iter().product();
    let d = local_dims[party];
    let digit = |idx: usize| (idx / stride) % d;
    Ok(ComplexMatrix::from_fn(m.dim(), |i, j| {
        let (di, dj) = (digit(i), digit(j));
        let src_i = i - di * stride + dj * stride;
        let src_j = j - dj * stride + di * stride;
        m[(src_i, src_j)]
    }))
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns ascending eigenvalues and the matrix whose columns are the matching
/// eigenvectors.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let scale = m.frobenius_norm().max(1.0);
    let dev = m.hermitian_deviation();
    if dev > 1e-9 * scale {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.dim();
    // symmetrize so round-off in the input does not leak into the rotations
    let mut a = ComplexMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on columns p, q
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for r in 0..n {
                    let (x, y) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = x * gpp + y * gqp;
                    a[(r, q)] = x * gpq + y * gqq;
                }
                for r in 0..n {
                    let (x, y) = (a[(p, r)], a[(q, r)]);
                    a[(p, r)] = gpp.conj() * x + gqp.conj() * y;
                    a[(q, r)] = gpq.conj() * x + gqq.conj() * y;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for r in 0..n {
                    let (x, y) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = x * gpp + y * gqp;
                    v[(r, q)] = x * gpq + y * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|(values, _)| values)
}

/// Singular values (descending) of the real matrix whose rows are `rows`.
///
/// One-sided Jacobi: rows are rotated pairwise until mutually orthogonal, after
/// which their norms are the singular values.
pub fn singular_values(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = rows.first() else {
        return Err(Error::EmptyInput("singular_values needs at least one row"));
    };
    let width = first.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            got: bad.len(),
        });
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let m = a.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..m {
            for j in i + 1..m {
                let alpha: f64 = a[i].iter().map(|x| x * x).sum();
                let beta: f64 = a[j].iter().map(|x| x * x).sum();
                let gamma: f64 = a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..width {
                    let (x, y) = (a[i][k], a[j][k]);
                    a[i][k] = c * x - s * y;
                    a[j][k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = a.iter().map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    // a wide matrix has at most `width` nonzero singular values
    sv.truncate(m.min(width));
    Ok(sv)
}

/// Number of singular values above `tol` times the largest one, treating each
/// input as one row of a stacked matrix.
pub fn numerical_rank(vectors: &[Vec<f64>], tol: f64) -> Result<usize> {
    let sv = singular_values(vectors)?;
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * top).count())
}

pub fn flatten3(m: &Mat3) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

pub fn mat3_rank(m: &Mat3, tol: f64) -> usize {
    let rows: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
    numerical_rank(&rows, tol).unwrap_or(0)
}

/// Solves the least-squares problem `min |A x - b|` via the normal equations with
/// a small ridge term, which keeps rank-deficient systems solvable.
pub fn least_squares(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let Some(first) = a.first() else {
        return Err(Error::EmptyInput("least_squares needs at least one equation"));
    };
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = first.len();
    let mut gram = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for (row, &bi) in a.iter().zip(b) {
        for i in 0..n {
            rhs[i] += row[i] * bi;
            for j in 0..n {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    let diag_scale = (0..n).map(|i| gram[i][i]).fold(0.0f64, f64::max).max(1e-300);
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] += 1e-13 * diag_scale;
    }
    cholesky_solve(gram, rhs)
}

fn cholesky_solve(mut g: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = rhs.len();
    for j in 0..n {
        let mut d = g[j][j];
        for k in 0..j {
            d -= g[j][k] * g[j][k];
        }
        if d <= 0.0 {
            return Err(Error::InvalidParameter("normal equations not positive definite".into()));
        }
        let d = d.sqrt();
        g[j][j] = d;
        for i in j + 1..n {
            let mut s = g[i][j];
            for k in 0..j {
                s -= g[i][k] * g[j][k];
            }
            g[i][j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= g[i][k] * rhs[k];
        }
        rhs[i] = s / g[i][i];
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for k in i + 1..n {
            s -= g[k][i] * rhs[k];
        }
        rhs[i] = s / g[i][i];
    }
    Ok(rhs)
}


#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use crate::pauli::{sigma, PAULI_X, PAULI_Z};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn psi_minus_projector() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::outer(&[c(h), c(0.0), c(0.0), c(-h)])
    }

    #[test]
    fn kron_examples() {
        let m = kron(&sigma(PAULI_X), &ComplexMatrix::identity(2));
        assert_eq!(m.dim(), 4);
        assert_eq!(m[(0, 2)], c(1.0));
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
        assert_eq!(kron(&sigma(PAULI_Z), &sigma(PAULI_Z)).trace(), c(0.0));
    }

    #[test]
    fn kron_trace_is_multiplicative() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = random_hermitian(2, &mut rng);
            let b = random_hermitian(4, &mut rng);
            let lhs = kron(&a, &b).trace();
            assert!((lhs - a.trace() * b.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(2, &mut rng);
        let d = random_hermitian(2, &mut rng);
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        assert!(left.frobenius_distance(&right).unwrap() < 1e-12);
    }

    #[test]
    fn partial_transpose_of_product_transposes_second_factor() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let a = random_hermitian(2, &mut rng);
        let b = ComplexMatrix::from_fn(2, |i, j| C64::new((i + 2 * j) as f64, (i as f64) - (j as f64) * 0.5));
        let pt = partial_transpose(&kron(&a, &b), 1, &[2, 2]).unwrap();
        assert!(pt.frobenius_distance(&kron(&a, &b.transpose())).unwrap() < 1e-15);
        let pa = partial_transpose(&kron(&a, &b), 0, &[2, 2]).unwrap();
        assert!(pa.frobenius_distance(&kron(&a.transpose(), &b)).unwrap() < 1e-15);
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let p = psi_minus_projector();
        let twice = partial_transpose(&partial_transpose(&p, 1, &[2, 2]).unwrap(), 1, &[2, 2]).unwrap();
        assert_eq!(twice, p);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let m = random_hermitian(8, &mut rng);
        for party in 0..3 {
            let once = partial_transpose(&m, party, &[2, 2, 2]).unwrap();
            assert!((once.trace() - m.trace()).norm() < 1e-12);
            assert!(once.is_hermitian(1e-12));
            assert_eq!(partial_transpose(&once, party, &[2, 2, 2]).unwrap(), m);
        }
    }

    #[test]
    fn partial_transpose_errors() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(partial_transpose(&m, 0, &[2, 3]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(partial_transpose(&m, 2, &[2, 2]), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn singlet_partial_transpose_has_eigenvalue_minus_half() {
        let pt = partial_transpose(&psi_minus_projector(), 1, &[2, 2]).unwrap();
        let ev = hermitian_eigenvalues(&pt).unwrap();
        assert!((ev[0] + 0.5).abs() < 1e-12);
        assert!((ev[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_examples() {
        let ev = hermitian_eigenvalues(&sigma(PAULI_Z)).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        let ev = hermitian_eigenvalues(&ComplexMatrix::identity(4).scale(0.25)).unwrap();
        assert!(ev.iter().all(|&x| (x - 0.25).abs() < 1e-15));
        let y = sigma(crate::pauli::PAULI_Y);
        let ev = hermitian_eigenvalues(&y).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_recovers_known_spectrum() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for n in [2usize, 4, 8] {
            for _ in 0..10 {
                let q = random_unitary(n, &mut rng);
                let diag: Vec<f64> = (0..n).map(|i| i as f64 * 0.7 - 1.3).collect();
                let m = &(&q * &ComplexMatrix::diagonal(&diag)) * &q.dagger();
                let (ev, vecs) = hermitian_eigen(&m).unwrap();
                for (a, b) in ev.iter().zip(&diag) {
                    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
                }
                assert!((ev.iter().sum::<f64>() - m.trace().re).abs() < 1e-10);
                // columns are eigenvectors
                let back = &(&vecs * &ComplexMatrix::diagonal(&ev)) * &vecs.dagger();
                assert!(back.frobenius_distance(&m).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn eigen_handles_degenerate_spectrum() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let q = random_unitary(8, &mut rng);
        let diag = [-1.0, -1.0, 0.0, 0.0, 0.0, 2.0, 2.0, 2.0];
        let m = &(&q * &ComplexMatrix::diagonal(&diag)) * &q.dagger();
        let ev = hermitian_eigenvalues(&m).unwrap();
        for (a, b) in ev.iter().zip(&diag) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = ComplexMatrix::from_fn(2, |i, j| c((i * 2 + j) as f64));
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian(_))));
    }

    fn elementary(i: usize) -> Vec<f64> {
        let mut v = vec![0.0; 9];
        v[i * 4] = 1.0;
        v
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&[elementary(0)], RANK_TOL).unwrap(), 1);
        assert_eq!(numerical_rank(&[elementary(0), elementary(1), elementary(2)], RANK_TOL).unwrap(), 3);
        let sub: Mat3 = [[-0.25, 0.0, 0.0], [0.0, -0.25, 0.0], [0.0, 0.0, 0.25]];
        assert_eq!(mat3_rank(&sub, RANK_TOL), 3);
        assert!(matches!(numerical_rank(&[], RANK_TOL), Err(Error::EmptyInput(_))));
        assert_eq!(numerical_rank(&[vec![0.0; 4]], RANK_TOL).unwrap(), 0);
    }

    #[test]
    fn rank_detects_dependence() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        let b = vec![0.5, -1.0, 0.0, 2.0];
        let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        assert_eq!(numerical_rank(&[a, b, c], RANK_TOL).unwrap(), 2);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let sv = singular_values(&[vec![3.0, 0.0], vec![0.0, -4.0]]).unwrap();
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn least_squares_solves_overdetermined_system() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let b = vec![1.0, 2.0, 3.0];
        let x = least_squares(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-10 && (x[1] - 2.0).abs() < 1e-10);
    }
}
