//! Indefinite forms with finitely many negative squares and the unitarization
//! of bounded representations that preserve them.
//!
//! The space is `C^(n_H + n_K)` with `η(x) = <Jx, x>`, `J = diag(I, -I)`. A
//! maximal negative subspace is the graph `L(A) = {Ax ⊕ x}` of a unique ball
//! point, and an η-preserving operator moves graphs by its fractional-linear
//! action.

use rand::seq::IndexedRandom;

use crate::error::{Error, Result};
use crate::fixedpoint::{find_fixed_point, AutomorphismGroup, FixedPointParams, FixedPointResult};
use crate::groups::{validate_table, FiniteGroup};
use crate::mobius::{signature_matrix, BallAutomorphism, BallPoint};
use crate::opcore::{
    hermitian_eig, inv_sqrt_one_minus, left_gram_apply, right_gram_apply, spectral_norm, OperatorMatrix, C64,
};
use crate::random::{random_unitary, rng_from_seed, TestRng};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PontryaginSignature {
    n_plus: usize,
    n_minus: usize,
}

impl PontryaginSignature {
    pub fn new(n_plus: usize, n_minus: usize) -> Result<Self> {
        if n_plus == 0 || n_minus == 0 {
            return Err(Error::ShapeMismatch(format!("signature ({n_plus},{n_minus}) needs both parts nonzero")));
        }
        Ok(PontryaginSignature { n_plus, n_minus })
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn j(&self) -> OperatorMatrix {
        signature_matrix(self.n_plus, self.n_minus)
    }

    fn check_square(&self, t: &OperatorMatrix) -> Result<()> {
        if t.shape() != (self.dim(), self.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "operator {}x{} on a space of dimension {}",
                t.rows(),
                t.cols(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// `η(x) = ||Px||² - ||Qx||²` for a column vector `x`.
pub fn eta_value(sig: &PontryaginSignature, x: &OperatorMatrix) -> Result<f64> {
    if x.shape() != (sig.dim(), 1) {
        return Err(Error::ShapeMismatch(format!("vector {}x{} for dimension {}", x.rows(), x.cols(), sig.dim())));
    }
    Ok((0..sig.dim())
        .map(|i| if i < sig.n_plus { x.get(i, 0).norm_sqr() } else { -x.get(i, 0).norm_sqr() })
        .sum())
}

/// `(||T*JT - J|| ≤ tol, ||T*JT - J||)`.
pub fn is_j_unitary(sig: &PontryaginSignature, t: &OperatorMatrix, tol: f64) -> Result<(bool, f64)> {
    sig.check_square(t)?;
    let j = sig.j();
    let defect = (&t.adjoint() * &j * t - &j).spectral_norm();
    Ok((defect <= tol, defect))
}

/// J-unitarity test with the tolerance scaled by `1 + ||T||²`, the size of the
/// rounding error in `T*JT`.
fn is_eta_preserving(sig: &PontryaginSignature, t: &OperatorMatrix, tol: f64) -> Result<(bool, f64)> {
    let (_, defect) = is_j_unitary(sig, t, tol)?;
    Ok((defect <= tol * (1.0 + t.spectral_norm().powi(2)), defect))
}

/// The stacked basis `[A; I]` of `L(A)`.
pub fn graph_subspace(sig: &PontryaginSignature, a: &BallPoint) -> Result<OperatorMatrix> {
    if a.shape() != (sig.n_plus, sig.n_minus) {
        return Err(Error::ShapeMismatch(format!("point {:?} for signature ({},{})", a.shape(), sig.n_plus, sig.n_minus)));
    }
    if !(a.norm() < 1.0 - Tolerances::DEFAULT.boundary_tol) {
        return Err(Error::BoundaryProximity(a.norm()));
    }
    OperatorMatrix::vstack(a.matrix(), &OperatorMatrix::identity(sig.n_minus))
}

/// The ball point whose graph spans the columns of `basis`.
pub fn subspace_to_ball(sig: &PontryaginSignature, basis: &OperatorMatrix) -> Result<BallPoint> {
    if basis.shape() != (sig.dim(), sig.n_minus) {
        return Err(Error::ShapeMismatch(format!(
            "basis {}x{} for signature ({},{})",
            basis.rows(),
            basis.cols(),
            sig.n_plus,
            sig.n_minus
        )));
    }
    let gram = &basis.adjoint() * &sig.j() * basis;
    let eig = hermitian_eig(&gram)?;
    let top = *eig.values.last().expect("nonempty");
    if !(top < 0.0) {
        return Err(Error::NotNegative);
    }
    let upper = basis.block(0, 0, sig.n_plus, sig.n_minus);
    let lower = basis.block(sig.n_plus, 0, sig.n_minus, sig.n_minus);
    let x = lower.inverse().map_err(|_| Error::DegenerateGraph)?;
    BallPoint::new(&upper * &x)
}

/// `ε(L(A)) = (1 - ||A||²)/(1 + ||A||²)`.
pub fn negativeness_degree(a: &BallPoint) -> Result<f64> {
    let b = a.norm();
    if !(b < 1.0) {
        return Err(Error::BoundaryProximity(b));
    }
    Ok((1.0 - b * b) / (1.0 + b * b))
}

pub fn induced_automorphism(sig: &PontryaginSignature, t: &OperatorMatrix) -> Result<BallAutomorphism> {
    let (ok, defect) = is_eta_preserving(sig, t, Tolerances::DEFAULT.rep_tol)?;
    if !ok {
        return Err(Error::NotEtaPreserving(defect));
    }
    BallAutomorphism::with_tol(t.clone(), sig.n_plus, sig.n_minus, f64::INFINITY)
}

/// `U = [[(1-DD*)^(-1/2), -D(1-D*D)^(-1/2)], [-D*(1-DD*)^(-1/2), (1-D*D)^(-1/2)]]`,
/// an η-preserving operator carrying `L(D)` onto the negative block.
pub fn unitarizer_matrix(sig: &PontryaginSignature, d: &BallPoint) -> Result<OperatorMatrix> {
    if d.shape() != (sig.n_plus, sig.n_minus) {
        return Err(Error::ShapeMismatch(format!("point {:?} for signature ({},{})", d.shape(), sig.n_plus, sig.n_minus)));
    }
    let dm = d.matrix();
    let boundary = |_| Error::BoundaryProximity(d.norm());
    let a = left_gram_apply(dm, inv_sqrt_one_minus).map_err(boundary)?;
    let b = right_gram_apply(dm, inv_sqrt_one_minus).map_err(boundary)?;
    OperatorMatrix::from_blocks(&a, &-(dm * &b), &-(&dm.adjoint() * &a), &b)
}

/// `sin` of the largest principal angle from `span(a)` to `span(b)`, i.e.
/// `||(I - Q_b Q_b*) Q_a||`.
pub fn subspace_gap(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    let qa = a.orthonormal_columns();
    let qb = b.orthonormal_columns();
    (&qa - &qb * &(&qb.adjoint() * &qa)).spectral_norm()
}

/// A finite group represented on the indefinite space.
#[derive(Debug, Clone)]
pub struct Representation {
    signature: PontryaginSignature,
    table: Vec<Vec<usize>>,
    identity: usize,
    images: Vec<OperatorMatrix>,
    bound: f64,
    eta_preserving: bool,
}

impl Representation {
    pub fn new(signature: PontryaginSignature, table: Vec<Vec<usize>>, images: Vec<OperatorMatrix>) -> Result<Self> {
        Self::with_tol(signature, table, images, Tolerances::DEFAULT.rep_tol)
    }

    /// Validates the table, the shapes, the identity and the homomorphism
    /// property. Products are compared with tolerance `rep_tol·(1 + ||π(g)||·||π(h)||)`.
    pub fn with_tol(
        signature: PontryaginSignature,
        table: Vec<Vec<usize>>,
        images: Vec<OperatorMatrix>,
        rep_tol: f64,
    ) -> Result<Self> {
        let identity = validate_table(&table)?;
        if images.len() != table.len() {
            return Err(Error::InvalidRepresentation(format!(
                "{} images for a group of order {}",
                images.len(),
                table.len()
            )));
        }
        for m in &images {
            signature.check_square(m)?;
        }
        let norms: Vec<f64> = images.iter().map(spectral_norm).collect();
        if images[identity].distance_to(&OperatorMatrix::identity(signature.dim())) > rep_tol {
            return Err(Error::InvalidRepresentation("identity element is not mapped to the identity".into()));
        }
        for g in 0..table.len() {
            for h in 0..table.len() {
                let defect = (&images[g] * &images[h]).distance_to(&images[table[g][h]]);
                if defect > rep_tol * (1.0 + norms[g] * norms[h]) {
                    return Err(Error::InvalidRepresentation(format!(
                        "images of {g}·{h} differ from the image of the product by {defect:e}"
                    )));
                }
            }
        }
        let mut eta_preserving = true;
        for m in &images {
            eta_preserving &= is_eta_preserving(&signature, m, rep_tol)?.0;
        }
        let bound = norms.iter().cloned().fold(0.0, f64::max);
        Ok(Representation { signature, table, identity, images, bound, eta_preserving })
    }

    pub fn signature(&self) -> &PontryaginSignature {
        &self.signature
    }

    pub fn group_order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn images(&self) -> &[OperatorMatrix] {
        &self.images
    }

    /// `max_g ||π(g)||`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_eta_preserving(&self) -> bool {
        self.eta_preserving
    }

    /// `max_g ||π(g)*π(g) - I||`.
    pub fn unitarity_defect(&self) -> f64 {
        let id = OperatorMatrix::identity(self.signature.dim());
        self.images.iter().map(|m| (&m.adjoint() * m - &id).spectral_norm()).fold(0.0, f64::max)
    }

    /// `max_{g,h} ||π(g)π(h) - π(gh)||`.
    pub fn homomorphism_defect(&self) -> f64 {
        let n = self.group_order();
        let mut worst: f64 = 0.0;
        for g in 0..n {
            for h in 0..n {
                worst = worst.max((&self.images[g] * &self.images[h]).distance_to(&self.images[self.table[g][h]]));
            }
        }
        worst
    }

    /// `max_g ||π(g)*Jπ(g) - J||`.
    pub fn eta_defect(&self) -> f64 {
        let j = self.signature.j();
        self.images.iter().map(|m| (&m.adjoint() * &j * m - &j).spectral_norm()).fold(0.0, f64::max)
    }

    /// The automorphism group `{w_π(g)}` with the representation's table.
    pub fn automorphism_group(&self) -> Result<AutomorphismGroup> {
        let elements = self
            .images
            .iter()
            .map(|m| induced_automorphism(&self.signature, m))
            .collect::<Result<Vec<_>>>()?;
        AutomorphismGroup::from_elements(elements, Some(self.table.clone()))
    }

    /// `S π(g) S^(-1)` for every element.
    pub fn conjugate(&self, s: &OperatorMatrix, s_inv: &OperatorMatrix) -> Result<Representation> {
        let images = self.images.iter().map(|m| s * m * s_inv).collect();
        Representation::new(self.signature, self.table.clone(), images)
    }
}

#[derive(Debug, Clone)]
pub struct Unitarization {
    /// `U`, so that `τ(g) = U π(g) U^(-1)`.
    pub similarity: OperatorMatrix,
    pub similarity_inverse: OperatorMatrix,
    pub unitary_rep: Representation,
    /// Common fixed point `D` of `{w_π(g)}`.
    pub fixed_point: BallPoint,
    pub solver: FixedPointResult,
}

/// Conjugates `rep` to a unitary representation through the unitarizer of a
/// common fixed point of the induced automorphisms.
pub fn unitarize(rep: &Representation, params: &FixedPointParams) -> Result<Unitarization> {
    if !rep.is_eta_preserving() {
        return Err(Error::NotEtaPreserving(rep.eta_defect()));
    }
    let sig = rep.signature;
    let group = rep.automorphism_group()?;
    let origin = BallPoint::origin(sig.n_plus, sig.n_minus);
    let solver = find_fixed_point(&group, &origin, params).map_err(|e| Error::FixedPointFailed(e.to_string()))?;
    if !solver.converged {
        return Err(Error::FixedPointFailed(format!(
            "displacement {:e} after {} iterations",
            solver.displacement, solver.iterations
        )));
    }
    let d = solver.point.clone();
    let u = unitarizer_matrix(&sig, &d)?;
    let j = sig.j();
    let u_inv = &j * &u.adjoint() * &j;
    let unitary_rep = rep.conjugate(&u, &u_inv)?;
    Ok(Unitarization { similarity: u, similarity_inverse: u_inv, unitary_rep, fixed_point: d, solver })
}

/// Invariant decomposition into a positive and a negative subspace.
#[derive(Debug, Clone)]
pub struct DualPair {
    /// Columns span the positive subspace.
    pub positive_basis: OperatorMatrix,
    /// Columns span the negative subspace.
    pub negative_basis: OperatorMatrix,
}

impl DualPair {
    /// Gram matrix of the scalar product `(h1 + k1, h2 + k2) = [h1, h2] - [k1, k2]`
    /// in standard coordinates.
    pub fn scalar_product(&self, sig: &PontryaginSignature) -> Result<OperatorMatrix> {
        let j = sig.j();
        let hp = &self.positive_basis;
        let kn = &self.negative_basis;
        let basis = OperatorMatrix::hstack(hp, kn)?;
        let zero_hk = OperatorMatrix::zeros(hp.cols(), kn.cols());
        let inner = OperatorMatrix::from_blocks(
            &(&hp.adjoint() * &j * hp),
            &zero_hk,
            &zero_hk.adjoint(),
            &-(&kn.adjoint() * &j * kn),
        )?;
        let inv = basis.inverse().map_err(|_| Error::DegenerateGraph)?;
        Ok(&inv.adjoint() * &inner * &inv)
    }

    /// Largest principal-angle sine between `π(g)·S` and `S` over both subspaces
    /// and all elements.
    pub fn invariance_defect(&self, rep: &Representation) -> f64 {
        let mut worst: f64 = 0.0;
        for m in rep.images() {
            worst = worst.max(subspace_gap(&(m * &self.positive_basis), &self.positive_basis));
            worst = worst.max(subspace_gap(&(m * &self.negative_basis), &self.negative_basis));
        }
        worst
    }
}

/// Invariant dual pair `H2 = T·H1`, `K2 = T·K1`, with `T = U^(-1)` and `H1`, `K1`
/// the positive and negative spectral subspaces of `R = T*JT`.
pub fn dual_pair(rep: &Representation, params: &FixedPointParams) -> Result<DualPair> {
    dual_pair_with(rep, params, &Tolerances::DEFAULT)
}

pub fn dual_pair_with(rep: &Representation, params: &FixedPointParams, tol: &Tolerances) -> Result<DualPair> {
    let sig = rep.signature;
    let unit = unitarize(rep, params)?;
    let t = &unit.similarity_inverse;
    let r = &t.adjoint() * &sig.j() * t;
    let eig = hermitian_eig(&r)?;
    if let Some(&small) = eig.values.iter().find(|l| l.abs() < tol.split_tol) {
        return Err(Error::SingularSpectrum(small));
    }
    let n = sig.dim();
    let pick = |positive: bool| -> Vec<usize> { (0..n).filter(|&i| (eig.values[i] > 0.0) == positive).collect() };
    let columns = |idx: &[usize]| -> OperatorMatrix {
        OperatorMatrix::from_fn(n, idx.len(), |i, j| eig.vectors.get(i, idx[j]))
    };
    let h1 = columns(&pick(true));
    let k1 = columns(&pick(false));
    if k1.cols() != sig.n_minus {
        return Err(Error::SingularSpectrum(eig.values[sig.n_minus.min(n - 1)]));
    }
    Ok(DualPair { positive_basis: t * &h1, negative_basis: t * &k1 })
}

/// Generator of conjugated-unitary test representations `π = V τ0 V^(-1)`.
///
/// `τ0 = diag(α, β)` is built from irreducible representations of `group`,
/// with `α` avoiding the irreducibles used in `β` whenever the dimensions allow
/// it, so that the induced group has the single fixed point `w_V(0)`. `V` is a
/// product of hyperbolic rotations across the split dressed by random block
/// unitaries, with `||V||·||V^(-1)|| = conditioning`.
pub fn make_test_representation(
    group: &FiniteGroup,
    sig: &PontryaginSignature,
    conditioning: f64,
    seed: u64,
) -> Result<Representation> {
    Ok(make_test_representation_parts(group, sig, conditioning, seed)?.0)
}

/// [`make_test_representation`] together with the conjugating operator `V`.
pub fn make_test_representation_parts(
    group: &FiniteGroup,
    sig: &PontryaginSignature,
    conditioning: f64,
    seed: u64,
) -> Result<(Representation, OperatorMatrix)> {
    if !(conditioning >= 1.0) || !conditioning.is_finite() {
        return Err(Error::PreconditionUnmet(format!("conditioning {conditioning} must be at least 1")));
    }
    let mut rng = rng_from_seed(seed);
    let irreps = &group.irreps;
    let all: Vec<usize> = (0..irreps.len()).collect();
    let nontrivial: Vec<usize> = all.iter().copied().filter(|&i| !is_trivial(group, i)).collect();
    let negative = fill(&mut rng, group, &nontrivial, sig.n_minus).or_else(|| fill(&mut rng, group, &all, sig.n_minus));
    let negative = negative.expect("one-dimensional trivial irreducible always fills");
    let unused: Vec<usize> = all.iter().copied().filter(|i| !negative.contains(i)).collect();
    let positive = fill(&mut rng, group, &unused, sig.n_plus)
        .or_else(|| fill(&mut rng, group, &all, sig.n_plus))
        .expect("one-dimensional trivial irreducible always fills");

    let wh = random_unitary(&mut rng, sig.n_plus);
    let wk = random_unitary(&mut rng, sig.n_minus);
    let s = conditioning.ln() / 2.0;
    let v = &(&block_diag(&random_unitary(&mut rng, sig.n_plus), &random_unitary(&mut rng, sig.n_minus))
        * &hyperbolic_rotations(sig, s))
        * &block_diag(&random_unitary(&mut rng, sig.n_plus), &random_unitary(&mut rng, sig.n_minus));
    let j = sig.j();
    let v_inv = &j * &v.adjoint() * &j;

    let images = (0..group.order())
        .map(|g| {
            let alpha = &wh * &direct_sum(group, &positive, g) * &wh.adjoint();
            let beta = &wk * &direct_sum(group, &negative, g) * &wk.adjoint();
            &v * &block_diag(&alpha, &beta) * &v_inv
        })
        .collect();
    Ok((Representation::new(*sig, group.table.clone(), images)?, v))
}

fn is_trivial(group: &FiniteGroup, irrep: usize) -> bool {
    let r = &group.irreps[irrep];
    r.dim == 1 && r.images.iter().all(|m| (m.get(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-12)
}

/// Random multiset of irreducibles from `allowed` with dimensions summing to `dim`.
fn fill(rng: &mut TestRng, group: &FiniteGroup, allowed: &[usize], dim: usize) -> Option<Vec<usize>> {
    let mut chosen = Vec::new();
    let mut remaining = dim;
    while remaining > 0 {
        let fits: Vec<usize> = allowed.iter().copied().filter(|&i| group.irreps[i].dim <= remaining).collect();
        let &pick = fits.choose(rng)?;
        remaining -= group.irreps[pick].dim;
        chosen.push(pick);
    }
    Some(chosen)
}

fn direct_sum(group: &FiniteGroup, irreps: &[usize], g: usize) -> OperatorMatrix {
    irreps
        .iter()
        .map(|&i| group.irreps[i].images[g].clone())
        .reduce(|acc, m| block_diag(&acc, &m))
        .expect("nonempty selection")
}

fn block_diag(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::from_blocks(a, &OperatorMatrix::zeros(a.rows(), b.cols()), &OperatorMatrix::zeros(b.rows(), a.cols()), b)
        .expect("block shapes agree")
}

/// Hyperbolic rotations by `s` in the planes `(e_i, e_{n_H + i})`, `i < min(n_H, n_K)`.
fn hyperbolic_rotations(sig: &PontryaginSignature, s: f64) -> OperatorMatrix {
    let mut m = OperatorMatrix::identity(sig.dim()).into_matrix();
    for i in 0..sig.n_plus.min(sig.n_minus) {
        let k = sig.n_plus + i;
        m[(i, i)] = C64::new(s.cosh(), 0.0);
        m[(k, k)] = C64::new(s.cosh(), 0.0);
        m[(i, k)] = C64::new(s.sinh(), 0.0);
        m[(k, i)] = C64::new(s.sinh(), 0.0);
    }
    OperatorMatrix::new(m).expect("finite entries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::named_group;
    use crate::mobius::{automorphism_apply, automorphism_compose};
    use crate::random::{random_ball_point, random_block_unitary, random_eta_preserving, random_shape};

    fn sig(p: usize, q: usize) -> PontryaginSignature {
        PontryaginSignature::new(p, q).unwrap()
    }

    fn column(v: &[f64]) -> OperatorMatrix {
        OperatorMatrix::from_real(v.len(), 1, v).unwrap()
    }

    #[test]
    fn eta_examples() {
        let s = sig(2, 1);
        assert_eq!(eta_value(&s, &column(&[1.0, 2.0, 0.0])).unwrap(), 5.0);
        assert_eq!(eta_value(&s, &column(&[0.0, 0.0, 3.0])).unwrap(), -9.0);
        assert_eq!(eta_value(&sig(1, 1), &column(&[1.0, 1.0])).unwrap(), 0.0);
        assert!(matches!(eta_value(&s, &column(&[1.0])), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn j_unitary_examples() {
        let mut rng = rng_from_seed(1);
        let u = random_block_unitary(&mut rng, 2, 1);
        let (ok, d) = is_j_unitary(&sig(2, 1), &u, 1e-10).unwrap();
        assert!(ok && d < 1e-14);
        let s = 0.8f64;
        let h = OperatorMatrix::from_real(2, 2, &[s.cosh(), s.sinh(), s.sinh(), s.cosh()]).unwrap();
        assert!(is_j_unitary(&sig(1, 1), &h, 1e-12).unwrap().0);
        let (ok, d) = is_j_unitary(&sig(1, 1), &OperatorMatrix::identity(2).scale_real(2.0), 1e-8).unwrap();
        assert!(!ok);
        assert!((d - 3.0).abs() < 1e-14);
    }

    #[test]
    fn graph_round_trip() {
        let mut rng = rng_from_seed(2);
        for _ in 0..20 {
            let (p, q) = random_shape(&mut rng, 4, 3);
            let s = sig(p, q);
            let a = random_ball_point(&mut rng, p, q, 0.95);
            let basis = graph_subspace(&s, &a).unwrap();
            for i in 0..q {
                assert!(eta_value(&s, &basis.column(i)).unwrap() < 0.0);
            }
            // any change of basis of the same span
            let g = crate::random::random_matrix(&mut rng, q, q);
            let back = subspace_to_ball(&s, &(&basis * &g)).unwrap();
            assert!(back.matrix().distance_to(a.matrix()) < 1e-10);
        }
        let zero = graph_subspace(&sig(2, 1), &BallPoint::origin(2, 1)).unwrap();
        assert_eq!(zero, column(&[0.0, 0.0, 1.0]));
    }

    #[test]
    fn subspace_examples() {
        let s = sig(1, 1);
        let a = subspace_to_ball(&s, &column(&[0.5, 1.0])).unwrap();
        assert!((a.matrix().get(0, 0).re - 0.5).abs() < 1e-15);
        let a = subspace_to_ball(&s, &column(&[1.0, 2.0])).unwrap();
        assert!((a.matrix().get(0, 0).re - 0.5).abs() < 1e-15);
        assert_eq!(subspace_to_ball(&s, &column(&[1.0, 0.5])).unwrap_err(), Error::NotNegative);
        assert_eq!(subspace_to_ball(&sig(2, 1), &column(&[1.0, 0.0, 0.0])).unwrap_err(), Error::NotNegative);
    }

    #[test]
    fn negativeness_examples() {
        assert_eq!(negativeness_degree(&BallPoint::origin(2, 2)).unwrap(), 1.0);
        let a = BallPoint::scalar(C64::new(0.0, 0.5)).unwrap();
        assert!((negativeness_degree(&a).unwrap() - 0.6).abs() < 1e-15);
        let values: Vec<f64> = (0..10)
            .map(|k| negativeness_degree(&BallPoint::scalar(C64::new(k as f64 / 10.0, 0.0)).unwrap()).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn degree_bound_under_transport() {
        let mut rng = rng_from_seed(3);
        for _ in 0..30 {
            let (p, q) = random_shape(&mut rng, 4, 3);
            let t = random_eta_preserving(&mut rng, p, q, 0.9);
            let w = induced_automorphism(&sig(p, q), &t).unwrap();
            let a = random_ball_point(&mut rng, p, q, 0.9);
            let moved = automorphism_apply(&w, &a).unwrap();
            let lhs = negativeness_degree(&moved).unwrap();
            let rhs = negativeness_degree(&a).unwrap() / t.spectral_norm().powi(2);
            assert!(lhs >= rhs - 1e-9);
        }
    }

    #[test]
    fn induced_action_moves_graphs() {
        let mut rng = rng_from_seed(4);
        for _ in 0..20 {
            let (p, q) = random_shape(&mut rng, 5, 2);
            let s = sig(p, q);
            let t = random_eta_preserving(&mut rng, p, q, 0.9);
            let t2 = random_eta_preserving(&mut rng, p, q, 0.9);
            let w = induced_automorphism(&s, &t).unwrap();
            let a = random_ball_point(&mut rng, p, q, 0.9);
            let image = graph_subspace(&s, &automorphism_apply(&w, &a).unwrap()).unwrap();
            let pushed = &t * &graph_subspace(&s, &a).unwrap();
            assert!(subspace_gap(&image, &pushed) < 1e-8);
            assert!(subspace_gap(&pushed, &image) < 1e-8);

            let w2 = induced_automorphism(&s, &t2).unwrap();
            let w12 = induced_automorphism(&s, &(&t * &t2)).unwrap();
            let lhs = automorphism_apply(&w12, &a).unwrap();
            let rhs = automorphism_apply(&automorphism_compose(&w, &w2).unwrap(), &a).unwrap();
            assert!(lhs.matrix().distance_to(rhs.matrix()) < 1e-10);
        }
        let id = induced_automorphism(&sig(2, 2), &OperatorMatrix::identity(4)).unwrap();
        assert_eq!(id.block(), &OperatorMatrix::identity(4));
        let bad = OperatorMatrix::identity(2).scale_real(2.0);
        assert!(matches!(induced_automorphism(&sig(1, 1), &bad), Err(Error::NotEtaPreserving(_))));
    }

    #[test]
    fn unitarizer_properties() {
        assert_eq!(unitarizer_matrix(&sig(2, 1), &BallPoint::origin(2, 1)).unwrap(), OperatorMatrix::identity(3));
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            let (p, q) = random_shape(&mut rng, 4, 3);
            let s = sig(p, q);
            let d = random_ball_point(&mut rng, p, q, 0.95);
            let u = unitarizer_matrix(&s, &d).unwrap();
            assert!(is_j_unitary(&s, &u, 1e-10).unwrap().0);
            let image = &u * &graph_subspace(&s, &d).unwrap();
            assert!(image.block(0, 0, p, q).spectral_norm() < 1e-10);
        }
    }

    #[test]
    fn bounded_representation_orbits_stay_inside() {
        let group = named_group("S3").unwrap();
        let s = sig(3, 2);
        let rep = make_test_representation(&group, &s, 20.0, 11).unwrap();
        let c = rep.bound();
        let autos = rep.automorphism_group().unwrap();
        let mut rng = rng_from_seed(6);
        for _ in 0..20 {
            let a = random_ball_point(&mut rng, 3, 2, 0.9);
            let na = a.norm();
            for w in autos.elements() {
                let image = automorphism_apply(w, &a).unwrap();
                let lhs = 1.0 - image.norm().powi(2);
                let rhs = (1.0 - na * na) / (1.0 + na * na) / (c * c);
                assert!(lhs >= rhs - 1e-9);
            }
        }
    }

    #[test]
    fn test_representation_examples() {
        let c2 = named_group("C2").unwrap();
        let rep = make_test_representation(&c2, &sig(2, 1), 10.0, 7).unwrap();
        assert!(rep.is_eta_preserving());
        assert!(rep.eta_defect() < 1e-10);
        assert!(rep.bound() <= 10.0 + 1e-9 && rep.bound() > 1.0);

        let s3 = named_group("S3").unwrap();
        let rep = make_test_representation(&s3, &sig(3, 2), 5.0, 1).unwrap();
        assert_eq!(rep.group_order(), 6);
        assert!(rep.homomorphism_defect() < 1e-10);

        let unit = make_test_representation(&s3, &sig(3, 2), 1.0, 1).unwrap();
        assert!(unit.unitarity_defect() < 1e-12);

        let again = make_test_representation(&s3, &sig(3, 2), 5.0, 1).unwrap();
        assert_eq!(again.images(), rep.images());
    }

    #[test]
    fn representation_validation() {
        let s = sig(1, 1);
        let id = OperatorMatrix::identity(2);
        let flip = OperatorMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let table = vec![vec![0, 1], vec![1, 0]];
        assert!(Representation::new(s, table.clone(), vec![id.clone(), flip.clone()]).is_ok());
        let wrong = OperatorMatrix::identity(2).scale_real(2.0);
        assert!(matches!(
            Representation::new(s, table.clone(), vec![id.clone(), wrong]),
            Err(Error::InvalidRepresentation(_))
        ));
        assert!(matches!(Representation::new(s, table, vec![id]), Err(Error::InvalidRepresentation(_))));
    }

    #[test]
    fn unitarize_block_diagonal_is_trivial() {
        let group = named_group("C4").unwrap();
        let rep = make_test_representation(&group, &sig(3, 1), 1.0, 2).unwrap();
        let out = unitarize(&rep, &FixedPointParams::default()).unwrap();
        assert!(out.fixed_point.norm() < 1e-9);
        assert!(out.similarity.distance_to(&OperatorMatrix::identity(4)) < 1e-8);
    }

    #[test]
    fn unitarize_conjugated_rep() {
        let group = named_group("C4").unwrap();
        let s = sig(3, 1);
        let rep = make_test_representation(&group, &s, 8.0, 3).unwrap();
        assert!(rep.unitarity_defect() > 1.0);
        let out = unitarize(&rep, &FixedPointParams::default()).unwrap();
        assert!(out.unitary_rep.unitarity_defect() < 1e-7);
        assert!(out.unitary_rep.homomorphism_defect() < 1e-8);
        for (g, tau) in out.unitary_rep.images().iter().enumerate() {
            let direct = &out.similarity * &rep.images()[g] * &out.similarity.inverse().unwrap();
            assert!(direct.distance_to(tau) < 1e-8);
        }
        // π(g) L(D) = L(D)
        let graph = graph_subspace(&s, &out.fixed_point).unwrap();
        for m in rep.images() {
            assert!(subspace_gap(&(m * &graph), &graph) < 1e-8);
        }
    }

    #[test]
    fn unitarize_rejects_indefinite_breakers() {
        let s = sig(1, 1);
        let scale = OperatorMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 0.5]).unwrap();
        let inv = OperatorMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 2.0]).unwrap();
        let flip = OperatorMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let rep = Representation::new(s, vec![vec![0, 1], vec![1, 0]], vec![OperatorMatrix::identity(2), flip]).unwrap();
        let rep = rep.conjugate(&scale, &inv).unwrap();
        assert!(!rep.is_eta_preserving());
        assert!(matches!(unitarize(&rep, &FixedPointParams::default()), Err(Error::NotEtaPreserving(_))));
    }

    #[test]
    fn dual_pair_examples() {
        let group = named_group("Q8").unwrap();
        let s = sig(3, 2);
        let plain = make_test_representation(&group, &s, 1.0, 4).unwrap();
        let pair = dual_pair(&plain, &FixedPointParams::default()).unwrap();
        let h_block = OperatorMatrix::vstack(&OperatorMatrix::identity(3), &OperatorMatrix::zeros(2, 3)).unwrap();
        let k_block = OperatorMatrix::vstack(&OperatorMatrix::zeros(3, 2), &OperatorMatrix::identity(2)).unwrap();
        assert!(subspace_gap(&pair.positive_basis, &h_block) < 1e-8);
        assert!(subspace_gap(&pair.negative_basis, &k_block) < 1e-8);

        let rep = make_test_representation(&group, &s, 6.0, 4).unwrap();
        let pair = dual_pair(&rep, &FixedPointParams::default()).unwrap();
        assert_eq!(pair.negative_basis.cols(), 2);
        assert_eq!(pair.positive_basis.cols(), 3);
        assert!(pair.invariance_defect(&rep) < 1e-8);
        for i in 0..3 {
            assert!(eta_value(&s, &pair.positive_basis.column(i)).unwrap() > 0.0);
        }
        for i in 0..2 {
            assert!(eta_value(&s, &pair.negative_basis.column(i)).unwrap() < 0.0);
        }
        // the rebuilt scalar product is positive and invariant
        let m = pair.scalar_product(&s).unwrap();
        assert!(hermitian_eig(&m).unwrap().values[0] > 0.0);
        for g in rep.images() {
            let moved = &g.adjoint() * &m * g;
            assert!(moved.distance_to(&m) < 1e-7 * m.spectral_norm());
        }
    }
}
