//! Named randomized property suites for the geometry and the unitarization
//! pipeline. Each suite samples its own seeded instances and reports the worst
//! observed violation.

use crate::error::{Error, Result};
use crate::fixedpoint::{find_fixed_point, FixedPointParams};
use crate::groups::named_group;
use crate::hyperbolic::{
    alpha_metric, barycenter_sequence, convex_combination, distance, line_through, th_map, GeodesicLine,
};
use crate::mobius::{automorphism_apply, mobius_apply, mobius_as_block, BallAutomorphism, BallPoint};
use crate::opcore::{psd_apply, spectral_norm, OperatorMatrix};
use crate::pontryagin::{
    dual_pair, graph_subspace, induced_automorphism, make_test_representation, negativeness_degree, subspace_to_ball,
    unitarize, PontryaginSignature,
};
use crate::random::{
    random_ball_point, random_eta_preserving, random_matrix, random_shape, random_unit_direction, rng_from_seed,
    TestRng,
};

/// Suites covering the lemmas on the geometry of lines in the ball.
pub const APPENDIX_SUITES: &[&str] = &[
    "differential",
    "alpha-metric",
    "metric-line",
    "unit-speed",
    "met",
    "line-invariance",
    "line-uniqueness",
    "lemma-inequality",
    "tanh-doubling",
    "doubling-convexity",
];

/// Further suites run by `all`.
pub const EXTRA_SUITES: &[&str] = &[
    "mobius-algebra",
    "isometry-invariance",
    "segment-convexity",
    "barycenter-mean",
    "graph-correspondence",
    "degree-transport",
    "fixed-point",
    "unitarization",
    "dual-pair",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    /// Largest `observed - allowed` over all trials; nonpositive when passing.
    pub worst_excess: f64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const MAX_REPORTED: usize = 5;

struct Recorder {
    report: SuiteReport,
    failed: usize,
}

impl Recorder {
    fn new(name: &str) -> Self {
        Recorder {
            report: SuiteReport { name: name.to_string(), trials: 0, worst_excess: f64::NEG_INFINITY, failures: Vec::new() },
            failed: 0,
        }
    }

    /// Records `observed ≤ allowed` for one trial.
    fn check(&mut self, trial: usize, what: &str, observed: f64, allowed: f64) {
        let excess = observed - allowed;
        if excess.is_nan() || excess > self.report.worst_excess {
            self.report.worst_excess = excess;
        }
        if !(excess <= 0.0) {
            self.fail(trial, format!("{what}: {observed:e} exceeds {allowed:e}"));
        }
    }

    fn fail(&mut self, trial: usize, msg: String) {
        self.failed += 1;
        if self.report.failures.len() < MAX_REPORTED {
            self.report.failures.push(format!("trial {trial}: {msg}"));
        }
    }

    fn run(mut self, trials: usize, mut body: impl FnMut(&mut Self, usize) -> Result<()>) -> SuiteReport {
        for k in 0..trials {
            if let Err(e) = body(&mut self, k) {
                self.fail(k, format!("{}: {e}", e.name()));
            }
        }
        self.report.trials = trials;
        if self.failed > MAX_REPORTED {
            let extra = self.failed - MAX_REPORTED;
            self.report.failures.push(format!("{extra} further failures"));
        }
        if trials == 0 {
            self.report.worst_excess = 0.0;
        }
        self.report
    }
}

fn random_line(rng: &mut TestRng, max_plus: usize, max_minus: usize) -> Result<GeodesicLine> {
    let (p, q) = random_shape(rng, max_plus, max_minus);
    let base = random_ball_point(rng, p, q, 0.8);
    GeodesicLine::new(base, random_unit_direction(rng, p, q))
}

fn uniform(rng: &mut TestRng, lo: f64, hi: f64) -> f64 {
    rand::Rng::random_range(rng, lo..hi)
}

fn suite_seed(seed: u64, name: &str) -> u64 {
    // FNV-1a of the name keeps suites independent of their run order
    let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    seed ^ h
}

/// Runs one suite by name.
pub fn run_suite(name: &str, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = rng_from_seed(suite_seed(seed, name));
    let rec = Recorder::new(name);
    let report = match name {
        "differential" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 4, 3);
            let b = random_ball_point(&mut rng, p, q, 0.8);
            let a = random_ball_point(&mut rng, p, q, 0.6);
            let v = random_unit_direction(&mut rng, p, q);
            let h = 1e-5;
            let plus = mobius_apply(&b, &BallPoint::new(a.matrix() + &v.scale_real(h))?)?;
            let minus = mobius_apply(&b, &BallPoint::new(a.matrix() - &v.scale_real(h))?)?;
            let fd = (plus.matrix() - minus.matrix()).scale_real(0.5 / h);
            let exact = crate::mobius::mobius_differential(&b, &a, &v)?;
            r.check(k, "differential vs central difference", fd.distance_to(&exact), 1e-6 * (1.0 + exact.spectral_norm()));
            Ok(())
        }),
        "alpha-metric" => rec.run(trials, |r, k| {
            // α(A, V) is the first-order growth of ρ(A, A + hV)
            let (p, q) = random_shape(&mut rng, 4, 3);
            let a = random_ball_point(&mut rng, p, q, 0.7);
            let v = random_unit_direction(&mut rng, p, q);
            let h = 1e-6;
            let moved = BallPoint::new(a.matrix() + &v.scale_real(h))?;
            let rate = distance(&a, &moved)? / h;
            let alpha = alpha_metric(&a, &v)?;
            r.check(k, "rho growth rate vs alpha", (rate - alpha).abs(), 1e-4 * alpha.max(1.0));
            Ok(())
        }),
        "metric-line" => rec.run(trials, |r, k| {
            let line = random_line(&mut rng, 6, 3)?;
            let params = [-3.0, -1.0, 0.0, 0.5, 2.0];
            for &s in &params {
                for &t in &params {
                    let d = distance(&line.point(s)?, &line.point(t)?)?;
                    r.check(k, "|rho(g(s), g(t)) - |s - t||", (d - (s - t).abs()).abs(), 1e-8);
                }
            }
            Ok(())
        }),
        "unit-speed" => rec.run(trials, |r, k| {
            let line = random_line(&mut rng, 5, 3)?;
            for _ in 0..10 {
                let t = uniform(&mut rng, -2.0, 2.0);
                let v = line.velocity(t)?;
                let p = line.point(t)?;
                r.check(k, "|alpha(g, g') - 1|", (alpha_metric(&p, &v)? - 1.0).abs(), 1e-7);
                let h = 1e-5;
                let fd = (line.point(t + h)?.matrix() - line.point(t - h)?.matrix()).scale_real(0.5 / h);
                r.check(k, "velocity vs central difference", fd.distance_to(&v), 1e-6);
            }
            Ok(())
        }),
        "met" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 5, 3);
            let d = random_unit_direction(&mut rng, p, q);
            let t = uniform(&mut rng, -3.0, 3.0);
            let g = th_map(&d.scale_real(t));
            let gp = &d - &(&g * &d.adjoint() * &g);
            let inv = |s: f64| 1.0 / (1.0 - s).sqrt();
            let lhs = &psd_apply(&(&g * &g.adjoint()), inv)? * &gp * &psd_apply(&(&g.adjoint() * &g), inv)?;
            r.check(k, "||(1-gg*)^(-1/2) g' (1-g*g)^(-1/2) - D||", lhs.distance_to(&d), 1e-8);
            Ok(())
        }),
        "line-invariance" => rec.run(trials, |r, k| {
            // an automorphism maps a line onto the line through any two image points
            let line = random_line(&mut rng, 4, 3)?;
            let (p, q) = line.base().shape();
            let w = BallAutomorphism::new(random_eta_preserving(&mut rng, p, q, 0.7), p, q)?;
            let (s, t, u) = (uniform(&mut rng, -2.0, 0.0), uniform(&mut rng, 0.5, 2.0), uniform(&mut rng, -2.0, 2.0));
            let image = |x: f64| -> Result<BallPoint> { automorphism_apply(&w, &line.point(x)?) };
            let (a, b) = (image(s)?, image(t)?);
            let rebuilt = line_through(&a, &b)?;
            let third = rebuilt.point(u - s)?;
            r.check(k, "image of third point off the rebuilt line", distance(&third, &image(u)?)?, 1e-7);
            Ok(())
        }),
        "line-uniqueness" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 5, 3);
            let a = random_ball_point(&mut rng, p, q, 0.9);
            let b = random_ball_point(&mut rng, p, q, 0.9);
            let rho = distance(&a, &b)?;
            let line = line_through(&a, &b)?;
            r.check(k, "line misses first point", distance(&line.point(0.0)?, &a)?, 1e-9);
            r.check(k, "line misses second point", distance(&line.point(rho)?, &b)?, 1e-8);
            let reverse = line_through(&b, &a)?;
            let mid = line.point(rho / 2.0)?;
            r.check(k, "reverse line disagrees", distance(&reverse.point(rho / 2.0)?, &mid)?, 1e-8);
            Ok(())
        }),
        "lemma-inequality" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 5, 4);
            let a = random_matrix(&mut rng, p, q);
            let b = random_ball_point(&mut rng, p, q, 0.99);
            let bm = b.matrix();
            let inv = |s: f64| 1.0 / (1.0 - s).sqrt();
            let inner = &a - &(bm * &a.adjoint() * bm);
            let rhs = (&psd_apply(&(bm * &bm.adjoint()), inv)? * &inner * &psd_apply(&(&bm.adjoint() * bm), inv)?)
                .spectral_norm();
            r.check(k, "||A|| over the weighted norm", a.spectral_norm() - rhs, 1e-9);
            Ok(())
        }),
        "tanh-doubling" => rec.run(trials, |r, k| {
            // Th(2X) = 2 Th(X) (1 + Th(X)* Th(X))^(-1)
            let (p, q) = random_shape(&mut rng, 5, 3);
            let x = random_matrix(&mut rng, p, q).scale_real(uniform(&mut rng, 0.0, 1.5));
            let c1 = th_map(&x);
            let den = (OperatorMatrix::identity(q) + &c1.adjoint() * &c1).inverse()?;
            let rhs = (&c1 * &den).scale_real(2.0);
            r.check(k, "doubling formula", th_map(&x.scale_real(2.0)).distance_to(&rhs), 1e-10);
            Ok(())
        }),
        "doubling-convexity" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 5, 3);
            let base = random_ball_point(&mut rng, p, q, 0.7);
            let g = GeodesicLine::new(base.clone(), random_unit_direction(&mut rng, p, q))?;
            let h = GeodesicLine::new(base, random_unit_direction(&mut rng, p, q))?;
            for s in [0.25, 0.5, 1.0] {
                let lhs = 2.0 * distance(&g.point(s)?, &h.point(s)?)?;
                let rhs = distance(&g.point(2.0 * s)?, &h.point(2.0 * s)?)?;
                r.check(k, "2 rho(g(s), h(s)) - rho(g(2s), h(2s))", lhs - rhs, 1e-8);
            }
            Ok(())
        }),
        "mobius-algebra" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 5, 3);
            let a = random_ball_point(&mut rng, p, q, 0.9);
            let x = random_ball_point(&mut rng, p, q, 0.9);
            let y = random_ball_point(&mut rng, p, q, 0.9);
            let back = mobius_apply(&a.neg(), &mobius_apply(&a, &x)?)?;
            r.check(k, "M_-A(M_A(X)) - X", back.matrix().distance_to(x.matrix()), 1e-9);
            let block = automorphism_apply(&mobius_as_block(&a)?, &x)?;
            r.check(k, "block vs direct", block.matrix().distance_to(mobius_apply(&a, &x)?.matrix()), 1e-9);
            let lhs = mobius_apply(&a, &x)?.matrix().distance_to(mobius_apply(&a, &y)?.matrix());
            let bound = 3.0 * (1.0 - a.norm()).powf(-2.5) * x.matrix().distance_to(y.matrix());
            r.check(k, "Lipschitz bound", lhs, bound);
            Ok(())
        }),
        "isometry-invariance" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 5, 3);
            let w = BallAutomorphism::new(random_eta_preserving(&mut rng, p, q, 0.8), p, q)?;
            let a = random_ball_point(&mut rng, p, q, 0.8);
            let b = random_ball_point(&mut rng, p, q, 0.8);
            let before = distance(&a, &b)?;
            let after = distance(&automorphism_apply(&w, &a)?, &automorphism_apply(&w, &b)?)?;
            r.check(k, "rho change under automorphism", (after - before).abs(), 1e-8);
            Ok(())
        }),
        "segment-convexity" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 4, 3);
            let pts: Vec<BallPoint> = (0..4).map(|_| random_ball_point(&mut rng, p, q, 0.9)).collect();
            let t = uniform(&mut rng, 0.0, 1.0);
            let lhs = distance(&convex_combination(&pts[0], &pts[1], t)?, &convex_combination(&pts[2], &pts[3], t)?)?;
            let rhs = (1.0 - t) * distance(&pts[0], &pts[2])? + t * distance(&pts[1], &pts[3])?;
            r.check(k, "segment convexity", lhs - rhs, 1e-8);
            Ok(())
        }),
        "barycenter-mean" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 4, 3);
            let n = rand::Rng::random_range(&mut rng, 2..8);
            let pts: Vec<BallPoint> = (0..n).map(|_| random_ball_point(&mut rng, p, q, 0.9)).collect();
            let b = barycenter_sequence(&pts)?;
            for _ in 0..10 {
                let x = random_ball_point(&mut rng, p, q, 0.9);
                let mean = pts.iter().map(|c| distance(&x, c)).sum::<Result<f64>>()? / n as f64;
                r.check(k, "rho(x, b_n) over the mean distance", distance(&x, &b)? - mean, 1e-8);
            }
            Ok(())
        }),
        "graph-correspondence" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 5, 3);
            let sig = PontryaginSignature::new(p, q)?;
            let a = random_ball_point(&mut rng, p, q, 0.95);
            let basis = &graph_subspace(&sig, &a)? * &random_matrix(&mut rng, q, q);
            let back = subspace_to_ball(&sig, &basis)?;
            r.check(k, "round trip", back.matrix().distance_to(a.matrix()), 1e-10);
            Ok(())
        }),
        "degree-transport" => rec.run(trials, |r, k| {
            let (p, q) = random_shape(&mut rng, 5, 3);
            let sig = PontryaginSignature::new(p, q)?;
            let t = random_eta_preserving(&mut rng, p, q, 0.9);
            let w = induced_automorphism(&sig, &t)?;
            let a = random_ball_point(&mut rng, p, q, 0.9);
            let moved = negativeness_degree(&automorphism_apply(&w, &a)?)?;
            let bound = negativeness_degree(&a)? / spectral_norm(&t).powi(2);
            r.check(k, "degree bound", bound - moved, 1e-9);
            Ok(())
        }),
        "fixed-point" | "unitarization" | "dual-pair" => {
            let which = name.to_string();
            rec.run(trials.min(9), |r, k| {
                let (group, sig, cond) = pipeline_case(k);
                let sig = PontryaginSignature::new(sig.0, sig.1)?;
                let rep = make_test_representation(&named_group(group)?, &sig, cond, k as u64)?;
                let params = FixedPointParams::default();
                match which.as_str() {
                    "fixed-point" => {
                        let res = find_fixed_point(&rep.automorphism_group()?, &BallPoint::origin(sig.n_plus(), sig.n_minus()), &params)?;
                        r.check(k, "displacement", res.displacement, params.fp_tol);
                    }
                    "unitarization" => {
                        let out = unitarize(&rep, &params)?;
                        r.check(k, "unitarity defect", out.unitary_rep.unitarity_defect(), 1e-7);
                        r.check(k, "homomorphism defect", out.unitary_rep.homomorphism_defect(), 1e-8);
                    }
                    _ => {
                        let pair = dual_pair(&rep, &params)?;
                        r.check(k, "invariance defect", pair.invariance_defect(&rep), 1e-7);
                        if pair.negative_basis.cols() != sig.n_minus() {
                            r.fail(k, "negative dimension differs from n_minus".into());
                        }
                    }
                }
                Ok(())
            })
        }
        other => return Err(Error::PreconditionUnmet(format!("unknown check suite '{other}'"))),
    };
    Ok(report)
}

fn pipeline_case(k: usize) -> (&'static str, (usize, usize), f64) {
    let groups = ["C4", "S3", "Q8"];
    let sigs = [(3, 1), (4, 2), (5, 2)];
    let conds = [2.0, 10.0, 50.0];
    (groups[k % 3], sigs[(k / 3) % 3], conds[(k + k / 3) % 3])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteSelection {
    Appendix,
    All,
}

pub fn suite_names(selection: SuiteSelection) -> Vec<&'static str> {
    let mut names = APPENDIX_SUITES.to_vec();
    if selection == SuiteSelection::All {
        names.extend_from_slice(EXTRA_SUITES);
    }
    names
}

pub fn run_checks(selection: SuiteSelection, trials: usize, seed: u64) -> Vec<SuiteReport> {
    suite_names(selection)
        .into_iter()
        .map(|name| run_suite(name, trials, seed).expect("listed suites exist"))
        .collect()
}
