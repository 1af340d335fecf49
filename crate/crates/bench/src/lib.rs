//! Shared fixtures for the benchmarks.

use radial_dirac::radial::DeformParams;

/// Deformations exercised by every benchmark group.
pub const DEFORMATIONS: [f64; 3] = [-0.5, 0.0, 1.0];

pub fn params(c: f64) -> DeformParams {
    DeformParams::new(3, c).expect("valid deformation")
}

/// A fixed pair of points with `|x||y| = 6` and a generic angle.
pub fn point_pair() -> (Vec<f64>, Vec<f64>) {
    (vec![1.2, -0.9, 1.5], vec![0.4, 1.7, -0.8])
}
