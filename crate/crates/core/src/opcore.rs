//! Dense complex matrices and the Hermitian functional calculus.
//!
//! Every operator formula in the crate reduces to products, inverses, and
//! scalar functions of Hermitian Gram matrices such as `A*A` and `AA*`. Those
//! functions are evaluated through an eigendecomposition, never a power series.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex64;

/// Dense complex `rows × cols` matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix(DMatrix<C64>);

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorMatrix{}", self.0)
    }
}

impl OperatorMatrix {
    /// Wraps a matrix after checking shape and finiteness.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        // row-major index for error reporting
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite(i * m.ncols() + j));
                }
            }
        }
        Ok(OperatorMatrix(m))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[C64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for {}x{}, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(rows, cols, data))
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        let data: Vec<C64> = data.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_slice(rows, cols, &data)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        OperatorMatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn scalar(z: C64) -> Self {
        OperatorMatrix(DMatrix::from_element(1, 1, z))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        OperatorMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        OperatorMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        OperatorMatrix(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        OperatorMatrix(self.0.map(|z| z * c))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(self)
    }

    /// Real part of the Frobenius inner product `tr(self* other)`.
    pub fn real_inner(&self, other: &OperatorMatrix) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Copy of the `nr × nc` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        OperatorMatrix(self.0.view((r0, c0), (nr, nc)).into_owned())
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols() {
            return Err(Error::ShapeMismatch("incompatible 2x2 block layout".into()));
        }
        let (r1, c1) = a.shape();
        let mut m = DMatrix::zeros(r1 + c.rows(), c1 + b.cols());
        m.view_mut((0, 0), a.shape()).copy_from(&a.0);
        m.view_mut((0, c1), b.shape()).copy_from(&b.0);
        m.view_mut((r1, 0), c.shape()).copy_from(&c.0);
        m.view_mut((r1, c1), d.shape()).copy_from(&d.0);
        Ok(OperatorMatrix(m))
    }

    /// Stacks `top` over `bottom`.
    pub fn vstack(top: &Self, bottom: &Self) -> Result<Self> {
        if top.cols() != bottom.cols() {
            return Err(Error::ShapeMismatch("vstack column counts differ".into()));
        }
        let mut m = DMatrix::zeros(top.rows() + bottom.rows(), top.cols());
        m.view_mut((0, 0), top.shape()).copy_from(&top.0);
        m.view_mut((top.rows(), 0), bottom.shape()).copy_from(&bottom.0);
        Ok(OperatorMatrix(m))
    }

    /// Places `left` and `right` side by side.
    pub fn hstack(left: &Self, right: &Self) -> Result<Self> {
        if left.rows() != right.rows() {
            return Err(Error::ShapeMismatch("hstack row counts differ".into()));
        }
        let mut m = DMatrix::zeros(left.rows(), left.cols() + right.cols());
        m.view_mut((0, 0), left.shape()).copy_from(&left.0);
        m.view_mut((0, left.cols()), right.shape()).copy_from(&right.0);
        Ok(OperatorMatrix(m))
    }

    pub fn column(&self, j: usize) -> Self {
        self.block(0, j, self.rows(), 1)
    }

    /// Inverse of a square matrix; `Singular` if the condition number exceeds
    /// `cond_tol` or LU fails.
    pub fn inverse_with(&self, cond_tol: f64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!("cannot invert {}x{}", self.rows(), self.cols())));
        }
        let sv = self.0.singular_values();
        let smax = sv.max();
        let smin = sv.min();
        if !(smin > 0.0) || smax / smin > cond_tol {
            return Err(Error::Singular);
        }
        self.0.clone().try_inverse().map(OperatorMatrix).ok_or(Error::Singular)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with(Tolerances::DEFAULT.cond_tol)
    }

    /// `(self + self*)/2`.
    pub fn hermitian_part(&self) -> Self {
        OperatorMatrix((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Spectral norm of `self - other`.
    pub fn distance_to(&self, other: &Self) -> f64 {
        spectral_norm(&(self - other))
    }

    /// Orthonormal basis for the column span (thin QR; assumes full column rank).
    pub fn orthonormal_columns(&self) -> Self {
        let qr = self.0.clone().qr();
        OperatorMatrix(qr.q())
    }
}

macro_rules! impl_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&OperatorMatrix> for &OperatorMatrix {
            type Output = OperatorMatrix;
            fn $method(self, rhs: &OperatorMatrix) -> OperatorMatrix {
                OperatorMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $tr<OperatorMatrix> for OperatorMatrix {
            type Output = OperatorMatrix;
            fn $method(self, rhs: OperatorMatrix) -> OperatorMatrix {
                OperatorMatrix(self.0 $op rhs.0)
            }
        }
        impl $tr<&OperatorMatrix> for OperatorMatrix {
            type Output = OperatorMatrix;
            fn $method(self, rhs: &OperatorMatrix) -> OperatorMatrix {
                OperatorMatrix(self.0 $op &rhs.0)
            }
        }
        impl $tr<OperatorMatrix> for &OperatorMatrix {
            type Output = OperatorMatrix;
            fn $method(self, rhs: OperatorMatrix) -> OperatorMatrix {
                OperatorMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl Neg for OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix(-self.0)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix(-self.0.clone())
    }
}

/// Largest singular value.
pub fn spectral_norm(a: &OperatorMatrix) -> f64 {
    if a.rows() == 1 && a.cols() == 1 {
        return a.get(0, 0).norm();
    }
    a.0.singular_values().max()
}

/// Eigendecomposition `S = V diag(values) V*` of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: OperatorMatrix,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> OperatorMatrix {
        let v = &self.vectors.0;
        let n = self.values.len();
        let mut scaled = v.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        OperatorMatrix(scaled * v.adjoint())
    }
}

pub fn hermitian_eig(s: &OperatorMatrix) -> Result<HermitianEigen> {
    hermitian_eig_with(s, &Tolerances::DEFAULT)
}

pub fn hermitian_eig_with(s: &OperatorMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    if !s.is_square() {
        return Err(Error::ShapeMismatch(format!("eigendecomposition needs a square matrix, got {}x{}", s.rows(), s.cols())));
    }
    let defect = spectral_norm(&(s - &s.adjoint()));
    let scale = 1.0 + spectral_norm(s);
    if defect > tol.herm_tol * scale {
        return Err(Error::NotHermitian(defect));
    }
    let sym = s.hermitian_part();
    let eig = SymmetricEigen::new(sym.0);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors: OperatorMatrix(vectors) })
}

/// `f(S)` for Hermitian `S`; the scalar function must be finite on the spectrum.
pub fn hermitian_apply(s: &OperatorMatrix, f: impl Fn(f64) -> f64) -> Result<OperatorMatrix> {
    let eig = hermitian_eig(s)?;
    for &l in &eig.values {
        if !f(l).is_finite() {
            return Err(Error::DomainError(l));
        }
    }
    Ok(eig.reconstruct_with(f))
}

pub fn psd_apply(s: &OperatorMatrix, f: impl Fn(f64) -> f64) -> Result<OperatorMatrix> {
    psd_apply_with(s, f, &Tolerances::DEFAULT)
}

/// `f(S)` for positive semidefinite `S`; eigenvalues in `[-psd_tol, 0)` are clamped to 0.
pub fn psd_apply_with(s: &OperatorMatrix, f: impl Fn(f64) -> f64, tol: &Tolerances) -> Result<OperatorMatrix> {
    let eig = hermitian_eig_with(s, tol)?;
    let lmax = eig.values.last().copied().unwrap_or(0.0);
    let floor = -tol.psd_tol * lmax.abs().max(1.0);
    if let Some(&lmin) = eig.values.first() {
        if lmin < floor {
            return Err(Error::NotPSD(lmin));
        }
    }
    for &l in &eig.values {
        if !f(l.max(0.0)).is_finite() {
            return Err(Error::DomainError(l.max(0.0)));
        }
    }
    Ok(eig.reconstruct_with(|l| f(l.max(0.0))))
}

/// `f(AA*)`.
pub(crate) fn left_gram_apply(a: &OperatorMatrix, f: impl Fn(f64) -> f64) -> Result<OperatorMatrix> {
    psd_apply(&(a * &a.adjoint()), f)
}

/// `f(A*A)`.
pub(crate) fn right_gram_apply(a: &OperatorMatrix, f: impl Fn(f64) -> f64) -> Result<OperatorMatrix> {
    psd_apply(&(&a.adjoint() * a), f)
}

/// `(1 - t)^(-1/2)`, the scalar behind `(1 - AA*)^(-1/2)`.
pub(crate) fn inv_sqrt_one_minus(t: f64) -> f64 {
    if t >= 1.0 {
        f64::NAN
    } else {
        1.0 / (1.0 - t).sqrt()
    }
}

pub(crate) fn sqrt_one_minus(t: f64) -> f64 {
    if t > 1.0 {
        f64::NAN
    } else {
        (1.0 - t).sqrt()
    }
}

/// `D = J|D|` with `J` a partial isometry and `|D| = (D*D)^(1/2)`.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub isometry: OperatorMatrix,
    pub modulus: OperatorMatrix,
    pub rank: usize,
}

impl PolarDecomposition {
    /// `J*J`, the projection onto the initial space of the isometry.
    pub fn initial_projection(&self) -> OperatorMatrix {
        &self.isometry.adjoint() * &self.isometry
    }
}

pub fn polar_decompose(d: &OperatorMatrix, rank_tol: f64) -> PolarDecomposition {
    let (m, n) = d.shape();
    let svd = d.0.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let vt = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let smax = sv.max();
    let k = sv.len();

    let mut modulus = DMatrix::<C64>::zeros(n, n);
    let mut isometry = DMatrix::<C64>::zeros(m, n);
    let mut rank = 0;
    for r in 0..k {
        let s = sv[r];
        let vrow = vt.row(r);
        let vcol = vrow.adjoint();
        modulus += &vcol * vrow * C64::new(s, 0.0);
        if smax > 0.0 && s > rank_tol * smax {
            isometry += u.column(r) * vrow;
            rank += 1;
        }
    }
    PolarDecomposition {
        isometry: OperatorMatrix(isometry),
        modulus: OperatorMatrix(modulus).hermitian_part(),
        rank,
    }
}
