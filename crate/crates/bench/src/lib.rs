//! Shared fixtures for the benchmarks.

use faddeev_core::geometry::{build_k_3d, lambda_to_k, ComplexMomentum, Energy, LambdaCoord};
use faddeev_core::Complex64;

/// A d = 2 momentum at `lambda` with `E = 4`.
pub fn planar_k(lambda: Complex64) -> ComplexMomentum {
    lambda_to_k(
        LambdaCoord::new(lambda).expect("nonzero"),
        Energy::new(4.0).expect("finite"),
    )
    .expect("E > 0")
}

/// A d = 3 momentum with `E = 4` and `|Im k| = beta`.
pub fn spatial_k(beta: f64) -> ComplexMomentum {
    build_k_3d(
        Energy::new(4.0).expect("finite"),
        &[1.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0],
        beta,
    )
    .expect("valid")
}
