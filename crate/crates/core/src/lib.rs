//! Hyperbolic geometry of the operator ball `{A : ||A|| < 1}` of `n_H × n_K`
//! complex matrices, common fixed points of elliptic automorphism groups, and
//! unitarization of representations preserving an indefinite form with
//! finitely many negative squares.

pub mod checks;
pub mod error;
pub mod fixedpoint;
pub mod groups;
pub mod hyperbolic;
pub mod mobius;
pub mod opcore;
pub mod pontryagin;
pub mod random;
pub mod tolerance;

pub use error::{Error, Result};
pub use mobius::{
    automorphism_apply, automorphism_compose, mobius_apply, mobius_as_block, mobius_differential,
    BallAutomorphism, BallPoint,
};
pub use opcore::{
    hermitian_eig, polar_decompose, psd_apply, spectral_norm, HermitianEigen, OperatorMatrix,
    PolarDecomposition, C64,
};
pub use tolerance::Tolerances;
