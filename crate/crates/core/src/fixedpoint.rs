//! Orbits, ellipticity, and common fixed points of automorphism groups.
//!
//! A finite group of ball automorphisms always has a common fixed point. The
//! solver minimizes the displacement `f(X) = max_g ρ(X, g(X))`, which is convex
//! along lines and vanishes exactly on the fixed-point set.

use crate::error::{Error, Result};
use crate::hyperbolic::{
    atanh_small, barycenter_sequence, convex_combination, distance, distance_raw, midpoint, MetricSample,
};
use crate::mobius::{automorphism_apply, automorphism_compose, mobius_as_block, mobius_raw, BallAutomorphism, BallPoint};
use crate::opcore::{hermitian_eig, spectral_norm, OperatorMatrix};
use crate::random::{random_ball_point, rng_from_seed};
use crate::tolerance::Tolerances;

/// Seed of the probe points used to identify automorphisms by their action.
const PROBE_SEED: u64 = 0x5e_ed0f_ba11;
const PROBE_COUNT: usize = 3;

/// A finite set of automorphisms of one ball, optionally with its multiplication table.
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    elements: Vec<BallAutomorphism>,
    table: Option<Vec<Vec<usize>>>,
    generated_from: Vec<usize>,
}

impl AutomorphismGroup {
    /// Wraps `elements` as given, without checking closure. Used for truncated
    /// orbits of infinite groups and for groups whose table is already known.
    pub fn from_elements(elements: Vec<BallAutomorphism>, table: Option<Vec<Vec<usize>>>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::PreconditionUnmet("automorphism group needs an element".into()))?;
        let sig = first.signature();
        if elements.iter().any(|e| e.signature() != sig) {
            return Err(Error::ShapeMismatch("automorphisms act on different balls".into()));
        }
        if let Some(t) = &table {
            if t.len() != elements.len() {
                return Err(Error::ShapeMismatch("table size differs from element count".into()));
            }
        }
        let generated_from = (0..elements.len()).collect();
        Ok(AutomorphismGroup { elements, table, generated_from })
    }

    pub fn elements(&self) -> &[BallAutomorphism] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn table(&self) -> Option<&[Vec<usize>]> {
        self.table.as_deref()
    }

    /// Element indices of the generators the group was closed from.
    pub fn generated_from(&self) -> &[usize] {
        &self.generated_from
    }

    /// `(n_H, n_K)` of the ball the group acts on.
    pub fn signature(&self) -> (usize, usize) {
        self.elements[0].signature()
    }

    /// Images `g(X)` in element order, as raw matrices.
    fn images_raw(&self, x: &OperatorMatrix) -> Result<Vec<OperatorMatrix>> {
        self.elements.iter().map(|g| g.apply_raw(x)).collect()
    }

    fn images(&self, x: &BallPoint) -> Result<Vec<BallPoint>> {
        self.elements.iter().map(|g| automorphism_apply(g, x)).collect()
    }
}

fn probes(n_plus: usize, n_minus: usize) -> Vec<BallPoint> {
    let mut rng = rng_from_seed(PROBE_SEED);
    (0..PROBE_COUNT).map(|_| random_ball_point(&mut rng, n_plus, n_minus, 0.5)).collect()
}

/// Probe images of `g`, or `None` when some image leaves the ball numerically.
fn signature_of(g: &BallAutomorphism, probes: &[BallPoint], boundary_tol: f64) -> Result<Option<Vec<OperatorMatrix>>> {
    let mut out = Vec::with_capacity(probes.len());
    for p in probes {
        let img = match g.apply_raw(p.matrix()) {
            Ok(m) => m,
            Err(Error::SingularDenominator) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !(spectral_norm(&img) < 1.0 - boundary_tol) {
            return Ok(None);
        }
        out.push(img);
    }
    Ok(Some(out))
}

fn same_action(a: &[OperatorMatrix], b: &[OperatorMatrix], group_tol: f64) -> Result<bool> {
    for (x, y) in a.iter().zip(b) {
        if distance_raw(x, y)? >= group_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn group_closure(generators: &[BallAutomorphism], max_elements: usize) -> Result<AutomorphismGroup> {
    group_closure_with(generators, max_elements, &Tolerances::DEFAULT)
}

/// Closes `generators` under composition, identifying elements by their action
/// on a fixed probe set.
///
/// Fails with `ClosureExceeded` when more than `max_elements` distinct actions
/// appear, or when a product pushes a probe point numerically onto the
/// boundary, which no finite group can do at desk-scale conditioning.
pub fn group_closure_with(
    generators: &[BallAutomorphism],
    max_elements: usize,
    tol: &Tolerances,
) -> Result<AutomorphismGroup> {
    let first = generators
        .first()
        .ok_or_else(|| Error::PreconditionUnmet("group closure needs at least one generator".into()))?;
    let (n_plus, n_minus) = first.signature();
    if generators.iter().any(|g| g.signature() != (n_plus, n_minus)) {
        return Err(Error::ShapeMismatch("generators act on different balls".into()));
    }
    let probe_set = probes(n_plus, n_minus);
    let mut elements: Vec<BallAutomorphism> = Vec::new();
    let mut actions: Vec<Vec<OperatorMatrix>> = Vec::new();

    let lookup = |actions: &[Vec<OperatorMatrix>], act: &[OperatorMatrix]| -> Result<Option<usize>> {
        for (k, a) in actions.iter().enumerate() {
            if same_action(a, act, tol.group_tol)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    };
    let insert = |elements: &mut Vec<BallAutomorphism>, actions: &mut Vec<Vec<OperatorMatrix>>, g: BallAutomorphism| -> Result<usize> {
        let act = signature_of(&g, &probe_set, tol.boundary_tol)?.ok_or(Error::ClosureExceeded(max_elements))?;
        if let Some(k) = lookup(actions, &act)? {
            return Ok(k);
        }
        if elements.len() >= max_elements {
            return Err(Error::ClosureExceeded(max_elements));
        }
        elements.push(g);
        actions.push(act);
        Ok(elements.len() - 1)
    };

    insert(&mut elements, &mut actions, BallAutomorphism::identity(n_plus, n_minus))?;
    let mut generated_from = Vec::with_capacity(generators.len());
    for g in generators {
        generated_from.push(insert(&mut elements, &mut actions, g.clone())?);
    }
    let mut frontier = 0;
    while frontier < elements.len() {
        for g in generators {
            let prod = automorphism_compose(&elements[frontier], g)?;
            insert(&mut elements, &mut actions, prod)?;
        }
        frontier += 1;
    }

    let n = elements.len();
    let mut table = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = automorphism_compose(&elements[i], &elements[j])?;
            let act = signature_of(&prod, &probe_set, tol.boundary_tol)?.ok_or(Error::ClosureExceeded(max_elements))?;
            table[i][j] = lookup(&actions, &act)?.ok_or(Error::ClosureExceeded(max_elements))?;
        }
    }
    Ok(AutomorphismGroup { elements, table: Some(table), generated_from })
}

/// The orbit `{g(X0)}` with its distance table.
pub fn orbit(group: &AutomorphismGroup, x0: &BallPoint) -> Result<MetricSample> {
    MetricSample::new(group.images(x0)?)
}

/// `(sup_g ||g(X0)|| ≤ 1 - margin, sup_g ||g(X0)||)`.
pub fn is_elliptic(group: &AutomorphismGroup, x0: &BallPoint, margin: f64) -> Result<(bool, f64)> {
    let sup = group
        .images_raw(x0.matrix())?
        .iter()
        .map(spectral_norm)
        .fold(0.0, f64::max);
    Ok((sup <= 1.0 - margin, sup))
}

/// `max_g ρ(X, g(X))`.
pub fn displacement(group: &AutomorphismGroup, x: &BallPoint) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for img in group.images_raw(x.matrix())? {
        worst = worst.max(distance_raw(x.matrix(), &img)?);
    }
    Ok(worst)
}

fn displacement_argmax(group: &AutomorphismGroup, x: &BallPoint) -> Result<(f64, usize)> {
    let mut best = (0.0, 0);
    for (k, img) in group.images_raw(x.matrix())?.iter().enumerate() {
        let d = distance_raw(x.matrix(), img)?;
        if d > best.0 {
            best = (d, k);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevParams {
    /// Relative stopping threshold on the predicted decrease of the radius.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ChebyshevParams {
    fn default() -> Self {
        ChebyshevParams { tol: Tolerances::DEFAULT.cheb_tol, max_iter: 500 }
    }
}

/// Linearization of `X ↦ ρ(X, p)` in the chart `V ↦ M_X(V)` around `V = 0`:
/// value and gradient `u v*` from the top singular pair of `M_{-X}(p)`.
fn linearize(x: &BallPoint, p: &BallPoint) -> Result<(f64, OperatorMatrix)> {
    let q = mobius_raw(&(-x.matrix()), p.matrix())?;
    let svd = q.as_matrix().clone().svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let (k, &s) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let grad = if s > 0.0 {
        OperatorMatrix::new(u.column(k) * vt.row(k)).expect("finite")
    } else {
        OperatorMatrix::zeros(q.rows(), q.cols())
    };
    if s >= 1.0 {
        return Err(Error::BoundaryProximity(s));
    }
    Ok((atanh_small(s), grad))
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Maximizes `Σ λ_i d_i - (μ/2)||Σ λ_i G_i||²` over the simplex by accelerated
/// projected gradient on the Gram matrix of the gradients.
fn solve_dual(values: &[f64], gram: &[Vec<f64>], mu: f64) -> Vec<f64> {
    let n = values.len();
    let lip = mu * gram.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = if lip > 0.0 { 1.0 / lip } else { 1.0 };
    let grad = |lam: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| values[i] - mu * (0..n).map(|j| gram[i][j] * lam[j]).sum::<f64>())
            .collect()
    };
    let mut lam = vec![1.0 / n as f64; n];
    let mut y = lam.clone();
    let mut t = 1.0f64;
    for _ in 0..20000 {
        let g = grad(&y);
        let next = project_simplex(&y.iter().zip(&g).map(|(a, b)| a + step * b).collect::<Vec<_>>());
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let change: f64 = next.iter().zip(&lam).map(|(a, b)| (a - b).abs()).sum();
        // restart momentum when the step opposes the gradient
        let uphill: f64 = g.iter().zip(next.iter().zip(&lam)).map(|(gi, (a, b))| gi * (a - b)).sum();
        if uphill < 0.0 {
            y = next.clone();
            t = 1.0;
        } else {
            y = next.iter().zip(&lam).map(|(a, b)| a + (t - 1.0) / t_next * (a - b)).collect();
            t = t_next;
        }
        lam = next;
        if change < 1e-15 {
            break;
        }
    }
    lam
}

/// Center of the smallest enclosing `ρ`-ball of the sample, by a proximal
/// linearized minimax method in the Möbius chart around the current center.
pub fn chebyshev_center(sample: &MetricSample, params: &ChebyshevParams) -> Result<(BallPoint, f64)> {
    let points = sample.points();
    if points.len() == 1 {
        return Ok((points[0].clone(), 0.0));
    }
    let radius_at = |x: &BallPoint| -> Result<f64> {
        points.iter().map(|p| distance(x, p)).try_fold(0.0, |acc, d| Ok(f64::max(acc, d?)))
    };
    let mut x = barycenter_sequence(points)?;
    let mut radius = radius_at(&x)?;
    let mut mu = 1.0;
    for _ in 0..params.max_iter {
        let lin = points.iter().map(|p| linearize(&x, p)).collect::<Result<Vec<_>>>()?;
        let values: Vec<f64> = lin.iter().map(|(d, _)| *d).collect();
        let gram: Vec<Vec<f64>> = lin.iter().map(|(_, gi)| lin.iter().map(|(_, gj)| gi.real_inner(gj)).collect()).collect();
        let mut accepted = false;
        while mu > 1e-14 {
            let lam = solve_dual(&values, &gram, mu);
            let mut step = OperatorMatrix::zeros(x.shape().0, x.shape().1);
            for (l, (_, g)) in lam.iter().zip(&lin) {
                step = step + g.scale_real(mu * l);
            }
            let model = lin
                .iter()
                .map(|(d, g)| d - g.real_inner(&step))
                .fold(f64::NEG_INFINITY, f64::max)
                + step.frobenius_norm().powi(2) / (2.0 * mu);
            let predicted = radius - model;
            // the dual value bounds the model minimum from below
            let dual = lam.iter().zip(&values).map(|(l, d)| l * d).sum::<f64>()
                - step.frobenius_norm().powi(2) / (2.0 * mu);
            if radius - dual <= params.tol * radius.max(1e-300) {
                return Ok((x, radius));
            }
            if spectral_norm(&step) >= 0.5 {
                mu *= 0.25;
                continue;
            }
            let trial = BallPoint::new(mobius_raw(x.matrix(), &step)?)?;
            let trial_radius = radius_at(&trial)?;
            if radius - trial_radius >= 0.1 * predicted {
                x = trial;
                radius = trial_radius;
                mu = (mu * 2.0).min(10.0);
                accepted = true;
                break;
            }
            mu *= 0.25;
        }
        if !accepted {
            // model step no longer resolvable in floating point
            return Ok((x, radius));
        }
    }
    Err(Error::MaxIterations(params.max_iter))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    /// Geodesic descent on the displacement toward orbit barycenters and
    /// attaining-pair midpoints.
    MidpointDescent,
    /// Repeated Chebyshev centers of the current orbit.
    ChebyshevIterate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointParams {
    pub mode: SolverMode,
    pub fp_tol: f64,
    pub max_iter: usize,
    pub elliptic_margin: f64,
    pub chebyshev: ChebyshevParams,
}

impl Default for FixedPointParams {
    fn default() -> Self {
        FixedPointParams {
            mode: SolverMode::MidpointDescent,
            fp_tol: Tolerances::DEFAULT.fp_tol,
            max_iter: 5000,
            elliptic_margin: Tolerances::DEFAULT.elliptic_margin,
            chebyshev: ChebyshevParams::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointResult {
    pub point: BallPoint,
    /// `max_g ρ(point, g(point))`.
    pub displacement: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Displacement after initialization and after every accepted step.
    pub history: Vec<f64>,
}

/// Backtracks along `[x, target]` for a sufficient decrease of the displacement.
fn line_search(group: &AutomorphismGroup, x: &BallPoint, f: f64, target: &BallPoint) -> Result<Option<(BallPoint, f64)>> {
    let mut s = 1.0;
    for _ in 0..30 {
        let z = convex_combination(x, target, s)?;
        let fz = displacement(group, &z)?;
        if fz <= f * (1.0 - 1e-4 * s) {
            return Ok(Some((z, fz)));
        }
        s *= 0.5;
    }
    Ok(None)
}

fn orbit_barycenter(group: &AutomorphismGroup, x: &BallPoint) -> Result<BallPoint> {
    barycenter_sequence(&group.images(x)?)
}

/// Common fixed point of a finite elliptic group.
///
/// Starts from the barycenter of the orbit of `x0` and only accepts steps that
/// decrease the displacement. If the iteration cap is hit the best iterate is
/// returned with `converged = false`.
pub fn find_fixed_point(group: &AutomorphismGroup, x0: &BallPoint, params: &FixedPointParams) -> Result<FixedPointResult> {
    let (elliptic, sup) = is_elliptic(group, x0, params.elliptic_margin)?;
    if !elliptic {
        return Err(Error::NotElliptic(sup));
    }
    let mut x = orbit_barycenter(group, x0)?;
    let mut f = displacement(group, &x)?;
    let start_f = displacement(group, x0)?;
    if start_f <= f {
        x = x0.clone();
        f = start_f;
    }
    let mut history = vec![f];
    let mut iterations = 0;
    while f > params.fp_tol && iterations < params.max_iter {
        iterations += 1;
        let primary = match params.mode {
            SolverMode::MidpointDescent => orbit_barycenter(group, &x)?,
            SolverMode::ChebyshevIterate => chebyshev_center(&orbit(group, &x)?, &params.chebyshev)?.0,
        };
        let mut step = line_search(group, &x, f, &primary)?;
        if step.is_none() {
            let (_, k) = displacement_argmax(group, &x)?;
            let image = automorphism_apply(&group.elements[k], &x)?;
            step = line_search(group, &x, f, &midpoint(&x, &image)?)?;
        }
        match step {
            Some((z, fz)) => {
                x = z;
                f = fz;
                history.push(f);
            }
            None => break,
        }
    }
    Ok(FixedPointResult { point: x, displacement: f, iterations, converged: f <= params.fp_tol, history })
}

/// Two points close together after `g` but far apart before it.
#[derive(Debug, Clone)]
pub struct EquicontinuityWitness {
    pub x1: BallPoint,
    pub x2: BallPoint,
    pub image1: BallPoint,
    pub image2: BallPoint,
    /// `||X2 - X1||`.
    pub input_gap: f64,
    /// `||g(X2) - g(X1)||`.
    pub image_gap: f64,
}

/// For `g` moving the origin within `δ` of the boundary, builds `X1 = 0` and
/// `X2 = h^(-1)(½ A P)` where `g = M_A ∘ h`, `A = g(0)` and `P` is the spectral
/// projection of `A*A` at `||A||²`.
pub fn equicontinuity_witness(g: &BallAutomorphism, delta: f64) -> Result<EquicontinuityWitness> {
    let (n_plus, n_minus) = g.signature();
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::PreconditionUnmet(format!("delta {delta} must lie in (0, 1/2)")));
    }
    let origin = BallPoint::origin(n_plus, n_minus);
    let a = g.apply_raw(origin.matrix())?;
    let norm = spectral_norm(&a);
    if !(norm > 1.0 - delta) {
        return Err(Error::PreconditionUnmet(format!("||g(0)|| = {norm} is not above 1 - delta")));
    }
    let a = BallPoint::new(a)?;
    // h = M_{-A} ∘ g fixes 0, so it is a linear isometry
    let h = automorphism_compose(&mobius_as_block(&a.neg())?, g)?;
    let eig = hermitian_eig(&(&a.matrix().adjoint() * a.matrix()))?;
    let top = *eig.values.last().expect("nonempty spectrum");
    let proj = eig.reconstruct_with(|l| if l >= top - 1e-12 * top.max(1.0) { 1.0 } else { 0.0 });
    let target = BallPoint::new((a.matrix() * &proj).scale_real(0.5))?;
    let x2 = automorphism_apply(&h.inverse(), &target)?;
    let image1 = automorphism_apply(g, &origin)?;
    let image2 = automorphism_apply(g, &x2)?;
    let input_gap = x2.matrix().distance_to(origin.matrix());
    let image_gap = image2.matrix().distance_to(image1.matrix());
    if !(input_gap > 0.25 && image_gap < delta) {
        return Err(Error::PreconditionUnmet(format!(
            "construction did not separate: input gap {input_gap}, image gap {image_gap}"
        )));
    }
    Ok(EquicontinuityWitness { x1: origin, x2, image1, image2, input_gap, image_gap })
}
