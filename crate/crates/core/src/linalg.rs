//! Dense complex matrices of dimension 2 and 4.
//!
//! Everything here is written for the tiny matrices that describe one or two
//! qubits: eigenvalues of 2×2 Hermitian matrices use the closed form, larger
//! ones a cyclic complex Jacobi sweep, and singular values come from a
//! one-sided Jacobi orthogonalisation so that small singular values keep full
//! absolute accuracy.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest matrix dimension handled by the kernel.
pub const MAX_DIM: usize = 4;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues down to this value are accepted as numerical slack.
pub const POSITIVITY_SLACK: f64 = 1e-9;
/// Entropy refuses spectra with eigenvalues below this value.
pub const ENTROPY_POSITIVITY_TOL: f64 = 1e-6;
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major square complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from rows; fails unless the rows form a square array.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {} rows of lengths {:?}",
                dim,
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        Ok(Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Wraps a row-major slice of length `dim²`.
    pub fn from_slice(dim: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries cannot form a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self {
            dim,
            data: data.to_vec(),
        })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Projector `|ψ⟩⟨ψ|` (not normalised).
    pub fn outer(psi: &[Complex64]) -> Self {
        let dim = psi.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Copy with all off-diagonal entries removed.
    pub fn diagonal_part(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            m[(i, i)] = self[(i, i)];
        }
        m
    }

    /// Largest deviation from Hermiticity, `max |M_ij − conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_add(&other.try_mul(self)?)
    }

    /// Kronecker product `self ⊗ other`; `self` carries the slow index.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

// Operator forms panic on mismatched dimensions; use the `try_*` methods on
// untrusted input.
impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.try_add(rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.try_sub(rhs).expect("matrix dimensions must agree")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli matrices in the basis `{|0⟩, |1⟩}` with `σ_z|0⟩ = |0⟩`.
pub mod pauli {
    use super::*;

    pub fn identity() -> CMatrix {
        CMatrix::identity(2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn y() -> CMatrix {
        CMatrix::from_rows(&[
            vec![ZERO, Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.0, 1.0), ZERO],
        ])
        .unwrap()
    }

    pub fn z() -> CMatrix {
        CMatrix::diagonal(&[1.0, -1.0])
    }
}

/// Eigenvalues of a Hermitian matrix, sorted in descending order.
///
/// Only the Hermitian part of `m` is used.
pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    match m.dim() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![m[(0, 0)].re]),
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
            let mean = 0.5 * (a + d);
            let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            Ok(vec![mean + half_gap, mean - half_gap])
        }
        n if n <= MAX_DIM => Ok(eigh(m)?.0),
        n => Err(Error::Dimension(format!(
            "eigensolver supports dimension <= {MAX_DIM}, got {n}"
        ))),
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues in descending order and the matrix whose
/// columns are the matching eigenvectors.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.dim();
    if n > MAX_DIM {
        return Err(Error::Dimension(format!(
            "eigensolver supports dimension <= {MAX_DIM}, got {n}"
        )));
    }
    // symmetrise so the rotations act on an exactly Hermitian matrix
    let mut a = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)].conj());
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // J = P R with P = diag(.., 1_p, .., conj(phase)_q, ..)
                // columns: J[:,p] = c e_p − s conj(phase) e_q,
                //          J[:,q] = s e_p + c conj(phase) e_q
                let jpp = Complex64::new(c, 0.0);
                let jqp = -phase.conj() * s;
                let jpq = Complex64::new(s, 0.0);
                let jqq = phase.conj() * c;
                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A <- J^H A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = CMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[(k, new)] = v[(k, old)];
        }
    }
    Ok((values, vecs))
}

/// Singular values of a square matrix of dimension at most 4, in descending
/// order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    if n > MAX_DIM {
        return Err(Error::Dimension(format!(
            "singular values support dimension <= {MAX_DIM}, got {n}"
        )));
    }
    // one-sided Jacobi: orthogonalise columns in place
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)]).collect())
        .collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let g = gamma.norm();
                if g <= JACOBI_TOL * (alpha * beta).sqrt() || g <= f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (a, b) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (ap, aq) = (*a, *b);
                    *a = ap * c - aq * phase.conj() * s;
                    *b = ap * phase * s + aq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `Tr[A† B]`.
pub fn hilbert_schmidt_product(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    a.check_same_dim(b)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Shannon entropy (bits) of a spectrum, refusing clearly negative weights.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -ENTROPY_POSITIVITY_TOL {
            return Err(Error::Positivity { min_eigenvalue: l });
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Von Neumann entropy in bits of a Hermitian matrix.
pub fn matrix_entropy(m: &CMatrix) -> Result<f64> {
    entropy_of_spectrum(&eigvalsh(m)?)
}

/// Trace over the second factor of a 4×4 matrix ordered as `A ⊗ B`.
pub fn partial_trace_b_matrix(m: &CMatrix) -> Result<CMatrix> {
    if m.dim() != 4 {
        return Err(Error::Dimension(format!(
            "partial trace needs a 4x4 matrix, got {0}x{0}",
            m.dim()
        )));
    }
    let mut out = CMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = (0..2).map(|k| m[(2 * i + k, 2 * j + k)]).sum();
        }
    }
    Ok(out)
}

/// Validated density matrix of one (dim 2) or two (dim 4) qubits.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity (up to slack).
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_slack(m, POSITIVITY_SLACK)
    }

    /// As [`DensityMatrix::new`] with eigenvalues down to `-slack` accepted.
    pub fn with_slack(m: CMatrix, slack: f64) -> Result<Self> {
        if m.dim() != 2 && m.dim() != 4 {
            return Err(Error::Dimension(format!(
                "density matrices have dimension 2 or 4, got {}",
                m.dim()
            )));
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix not Hermitian (defect {defect:e})"
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let min = eigvalsh(&m)?.last().copied().unwrap_or(0.0);
        if min < -slack {
            return Err(Error::Positivity {
                min_eigenvalue: min,
            });
        }
        Ok(Self(m))
    }

    /// Normalised projector onto `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        Self::new(CMatrix::outer(psi).scale_real(1.0 / norm))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(CMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Qubit state `½(I + v·σ)`.
    pub fn from_bloch(v: [f64; 3]) -> Result<Self> {
        let [x, y, z] = v;
        let half = |a: f64, b: f64| Complex64::new(0.5 * a, 0.5 * b);
        Self::new(CMatrix::from_rows(&[
            vec![half(1.0 + z, 0.0), half(x, -y)],
            vec![half(x, y), half(1.0 - z, 0.0)],
        ])?)
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        Self::new(a.0.kron(&b.0))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.0).expect("validated dimension")
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        hilbert_schmidt_product(&self.0, &self.0)
            .expect("same matrix")
            .re
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix{:?}", self.0)
    }
}

/// Time derivative of a density matrix: Hermitian and traceless.
#[derive(Clone, PartialEq)]
pub struct MatrixDerivative(CMatrix);

impl MatrixDerivative {
    pub fn new(m: CMatrix) -> Result<Self> {
        let scale = m.frobenius_norm().max(1.0);
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::InvariantViolation(format!(
                "derivative not Hermitian (defect {defect:e})"
            )));
        }
        let tr = m.trace().norm();
        if tr > TRACE_TOL * scale {
            return Err(Error::InvariantViolation(format!(
                "derivative has trace {tr:e}"
            )));
        }
        Ok(Self(m))
    }

    pub fn zero(dim: usize) -> Self {
        Self(CMatrix::zeros(dim))
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

impl fmt::Debug for MatrixDerivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixDerivative{:?}", self.0)
    }
}

/// Von Neumann entropy `−Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    matrix_entropy(rho.matrix())
}

/// Reduced state of the first qubit of a two-qubit state.
pub fn partial_trace_b(rho: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(partial_trace_b_matrix(rho.matrix())?)
}
