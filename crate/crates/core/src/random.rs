//! Seeded samplers for matrices, ball points, and η-preserving operators.
//!
//! All samplers draw from a caller-supplied RNG so that test data is
//! reproducible from a single `u64` seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::mobius::{mobius_as_block, BallPoint};
use crate::opcore::{OperatorMatrix, C64};

pub type TestRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> OperatorMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let data: Vec<C64> = (0..rows * cols)
        .map(|_| C64::new(gaussian(rng) * s, gaussian(rng) * s))
        .collect();
    OperatorMatrix::from_row_slice(rows, cols, &data).expect("gaussian entries are finite")
}

pub fn random_real_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> OperatorMatrix {
    let data: Vec<f64> = (0..rows * cols).map(|_| gaussian(rng)).collect();
    OperatorMatrix::from_real(rows, cols, &data).expect("gaussian entries are finite")
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> OperatorMatrix {
    let g = random_matrix(rng, n, n);
    let qr = g.as_matrix().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    OperatorMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j])
}

/// Matrix with spectral norm exactly `norm`, random otherwise.
pub fn random_with_norm<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, norm: f64) -> OperatorMatrix {
    loop {
        let g = random_matrix(rng, rows, cols);
        let s = g.spectral_norm();
        if s > 1e-6 {
            return g.scale_real(norm / s);
        }
    }
}

/// Uniformly random direction on the unit sphere of the spectral norm.
pub fn random_unit_direction<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> OperatorMatrix {
    random_with_norm(rng, rows, cols, 1.0)
}

/// Ball point with norm drawn uniformly from `[0, max_norm)`.
pub fn random_ball_point<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, max_norm: f64) -> BallPoint {
    let r = rng.random::<f64>() * max_norm;
    BallPoint::new(random_with_norm(rng, rows, cols, r)).expect("norm below max_norm < 1")
}

/// Block-diagonal unitary `diag(U_H, U_K)`.
pub fn random_block_unitary<R: Rng + ?Sized>(rng: &mut R, n_plus: usize, n_minus: usize) -> OperatorMatrix {
    let uh = random_unitary(rng, n_plus);
    let uk = random_unitary(rng, n_minus);
    OperatorMatrix::from_blocks(
        &uh,
        &OperatorMatrix::zeros(n_plus, n_minus),
        &OperatorMatrix::zeros(n_minus, n_plus),
        &uk,
    )
    .expect("block shapes agree")
}

/// Random J-unitary operator `diag(U_H, U_K) · T_A` with `||A|| < max_norm`.
///
/// Every J-unitary operator factors this way, so the sampler covers the whole group.
pub fn random_eta_preserving<R: Rng + ?Sized>(
    rng: &mut R,
    n_plus: usize,
    n_minus: usize,
    max_norm: f64,
) -> OperatorMatrix {
    let a = random_ball_point(rng, n_plus, n_minus, max_norm);
    let t = mobius_as_block(&a).expect("interior point");
    &random_block_unitary(rng, n_plus, n_minus) * t.block()
}

/// Picks a shape `(n_plus, n_minus)` with `1 ≤ n_minus ≤ max_minus`, `1 ≤ n_plus ≤ max_plus`.
pub fn random_shape<R: Rng + ?Sized>(rng: &mut R, max_plus: usize, max_minus: usize) -> (usize, usize) {
    (rng.random_range(1..=max_plus), rng.random_range(1..=max_minus))
}
