//! Möbius transformations of the operator ball and their block-matrix form.
//!
//! A ball point is an `n_H × n_K` strict contraction. An automorphism is stored
//! as an `(n_H + n_K)`-square block matrix `T` preserving `J = diag(I, -I)` and
//! acts by `w_T(A) = (T11 A + T12)(T21 A + T22)^(-1)`.

use crate::error::{Error, Result};
use crate::opcore::{
    inv_sqrt_one_minus, left_gram_apply, right_gram_apply, spectral_norm, sqrt_one_minus,
    OperatorMatrix, C64,
};
use crate::tolerance::Tolerances;

/// A point of the open unit ball, kept at least `boundary_tol` inside the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    matrix: OperatorMatrix,
    margin: f64,
}

impl BallPoint {
    pub fn new(matrix: OperatorMatrix) -> Result<Self> {
        Self::with_tol(matrix, Tolerances::DEFAULT.boundary_tol)
    }

    pub fn with_tol(matrix: OperatorMatrix, boundary_tol: f64) -> Result<Self> {
        let norm = spectral_norm(&matrix);
        if !(norm < 1.0 - boundary_tol) {
            return Err(Error::BoundaryProximity(norm));
        }
        Ok(BallPoint { matrix, margin: 1.0 - norm })
    }

    pub fn origin(rows: usize, cols: usize) -> Self {
        BallPoint { matrix: OperatorMatrix::zeros(rows, cols), margin: 1.0 }
    }

    /// 1×1 point with value `z`.
    pub fn scalar(z: C64) -> Result<Self> {
        Self::new(OperatorMatrix::scalar(z))
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> OperatorMatrix {
        self.matrix
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn norm(&self) -> f64 {
        1.0 - self.margin
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    pub fn neg(&self) -> BallPoint {
        BallPoint { matrix: -&self.matrix, margin: self.margin }
    }
}

fn same_shape(a: &OperatorMatrix, b: &OperatorMatrix, what: &str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{what}: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `M_A(X)` on raw matrices, without the boundary check on the result.
pub(crate) fn mobius_raw(a: &OperatorMatrix, x: &OperatorMatrix) -> Result<OperatorMatrix> {
    same_shape(a, x, "mobius_apply")?;
    let left = left_gram_apply(a, inv_sqrt_one_minus).map_err(|_| Error::BoundaryProximity(spectral_norm(a)))?;
    let right = right_gram_apply(a, sqrt_one_minus).map_err(|_| Error::BoundaryProximity(spectral_norm(a)))?;
    let n = a.cols();
    let resolvent = (OperatorMatrix::identity(n) + &a.adjoint() * x)
        .inverse()
        .map_err(|_| Error::SingularResolvent)?;
    Ok(&(&(&left * &(a + x)) * &resolvent) * &right)
}

/// `M_A(X) = (1-AA*)^(-1/2) (A+X) (1+A*X)^(-1) (1-A*A)^(1/2)`.
pub fn mobius_apply(a: &BallPoint, x: &BallPoint) -> Result<BallPoint> {
    BallPoint::new(mobius_raw(&a.matrix, &x.matrix)?)
}

/// Differential of `M_B` at `A` applied to `V`:
/// `(1-BB*)^(1/2) (1+AB*)^(-1) V (1+B*A)^(-1) (1-B*B)^(1/2)`.
pub fn mobius_differential(b: &BallPoint, a: &BallPoint, v: &OperatorMatrix) -> Result<OperatorMatrix> {
    same_shape(a.matrix(), b.matrix(), "mobius_differential")?;
    same_shape(a.matrix(), v, "mobius_differential direction")?;
    let (bm, am) = (&b.matrix, &a.matrix);
    let left = left_gram_apply(bm, sqrt_one_minus)?;
    let right = right_gram_apply(bm, sqrt_one_minus)?;
    let (h, k) = bm.shape();
    let inv_l = (OperatorMatrix::identity(h) + am * &bm.adjoint())
        .inverse()
        .map_err(|_| Error::SingularResolvent)?;
    let inv_r = (OperatorMatrix::identity(k) + &bm.adjoint() * am)
        .inverse()
        .map_err(|_| Error::SingularResolvent)?;
    Ok(&left * &inv_l * v * &inv_r * &right)
}

/// An automorphism of the ball given by a J-unitary block matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BallAutomorphism {
    block: OperatorMatrix,
    n_plus: usize,
    n_minus: usize,
}

/// `J = diag(I_{n_plus}, -I_{n_minus})`.
pub fn signature_matrix(n_plus: usize, n_minus: usize) -> OperatorMatrix {
    let diag: Vec<C64> = (0..n_plus + n_minus)
        .map(|i| if i < n_plus { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) })
        .collect();
    OperatorMatrix::from_diagonal(&diag)
}

/// `||T*JT - J||`.
pub fn j_defect(t: &OperatorMatrix, n_plus: usize, n_minus: usize) -> f64 {
    let j = signature_matrix(n_plus, n_minus);
    (&t.adjoint() * &j * t - &j).spectral_norm()
}

/// Rescales `T` by `1/sqrt(s)` where `s` is the least-squares fit of `T*JT ≈ sJ`.
fn normalize(t: &OperatorMatrix, n_plus: usize, n_minus: usize) -> Result<OperatorMatrix> {
    let j = signature_matrix(n_plus, n_minus);
    let form = &t.adjoint() * &j * t;
    let s = j.real_inner(&form) / (n_plus + n_minus) as f64;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::NotEtaPreserving(f64::INFINITY));
    }
    Ok(t.scale_real(1.0 / s.sqrt()))
}

impl BallAutomorphism {
    pub fn new(block: OperatorMatrix, n_plus: usize, n_minus: usize) -> Result<Self> {
        Self::with_tol(block, n_plus, n_minus, Tolerances::DEFAULT.aut_tol)
    }

    /// Normalizes and validates `block`; fails with `NotEtaPreserving` if the
    /// normalized defect exceeds `aut_tol`.
    pub fn with_tol(block: OperatorMatrix, n_plus: usize, n_minus: usize, aut_tol: f64) -> Result<Self> {
        if n_plus == 0 || n_minus == 0 || block.shape() != (n_plus + n_minus, n_plus + n_minus) {
            return Err(Error::ShapeMismatch(format!(
                "block {}x{} does not match signature ({n_plus},{n_minus})",
                block.rows(),
                block.cols()
            )));
        }
        let block = normalize(&block, n_plus, n_minus)?;
        let defect = j_defect(&block, n_plus, n_minus);
        if defect > aut_tol {
            return Err(Error::NotEtaPreserving(defect));
        }
        Ok(BallAutomorphism { block, n_plus, n_minus })
    }

    /// Wraps a product of validated automorphisms after renormalizing.
    fn from_product(block: OperatorMatrix, n_plus: usize, n_minus: usize) -> Self {
        let block = normalize(&block, n_plus, n_minus).unwrap_or(block);
        BallAutomorphism { block, n_plus, n_minus }
    }

    pub fn identity(n_plus: usize, n_minus: usize) -> Self {
        BallAutomorphism { block: OperatorMatrix::identity(n_plus + n_minus), n_plus, n_minus }
    }

    pub fn block(&self) -> &OperatorMatrix {
        &self.block
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.n_plus, self.n_minus)
    }

    pub fn t11(&self) -> OperatorMatrix {
        self.block.block(0, 0, self.n_plus, self.n_plus)
    }
    pub fn t12(&self) -> OperatorMatrix {
        self.block.block(0, self.n_plus, self.n_plus, self.n_minus)
    }
    pub fn t21(&self) -> OperatorMatrix {
        self.block.block(self.n_plus, 0, self.n_minus, self.n_plus)
    }
    pub fn t22(&self) -> OperatorMatrix {
        self.block.block(self.n_plus, self.n_plus, self.n_minus, self.n_minus)
    }

    pub fn defect(&self) -> f64 {
        j_defect(&self.block, self.n_plus, self.n_minus)
    }

    /// `T^(-1) = J T* J`.
    pub fn inverse(&self) -> Self {
        let j = signature_matrix(self.n_plus, self.n_minus);
        Self::from_product(&j * &self.block.adjoint() * &j, self.n_plus, self.n_minus)
    }

    /// `w_T(A)` on a raw matrix; no boundary check on the image.
    pub fn apply_raw(&self, a: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.apply_raw_with(a, Tolerances::DEFAULT.cond_tol)
    }

    pub fn apply_raw_with(&self, a: &OperatorMatrix, cond_tol: f64) -> Result<OperatorMatrix> {
        if a.shape() != (self.n_plus, self.n_minus) {
            return Err(Error::ShapeMismatch(format!(
                "point {}x{} vs automorphism signature ({},{})",
                a.rows(),
                a.cols(),
                self.n_plus,
                self.n_minus
            )));
        }
        let num = &self.t11() * a + self.t12();
        let den = &self.t21() * a + self.t22();
        let inv = den.inverse_with(cond_tol).map_err(|_| Error::SingularDenominator)?;
        Ok(&num * &inv)
    }
}

/// Block matrix `T_A` whose fractional-linear action is `M_A`.
pub fn mobius_as_block(a: &BallPoint) -> Result<BallAutomorphism> {
    let am = a.matrix();
    let (h, k) = am.shape();
    let left = left_gram_apply(am, inv_sqrt_one_minus).map_err(|_| Error::BoundaryProximity(a.norm()))?;
    let right = right_gram_apply(am, inv_sqrt_one_minus).map_err(|_| Error::BoundaryProximity(a.norm()))?;
    let block = OperatorMatrix::from_blocks(&left, &(&left * am), &(&right * &am.adjoint()), &right)?;
    Ok(BallAutomorphism { block, n_plus: h, n_minus: k })
}

pub fn automorphism_apply(t: &BallAutomorphism, a: &BallPoint) -> Result<BallPoint> {
    BallPoint::new(t.apply_raw(a.matrix())?)
}

/// `T1 ∘ T2`, i.e. the block product `T1·T2`, renormalized.
pub fn automorphism_compose(t1: &BallAutomorphism, t2: &BallAutomorphism) -> Result<BallAutomorphism> {
    if t1.signature() != t2.signature() {
        return Err(Error::ShapeMismatch("automorphisms act on different balls".into()));
    }
    Ok(BallAutomorphism::from_product(&t1.block * &t2.block, t1.n_plus, t1.n_minus))
}
