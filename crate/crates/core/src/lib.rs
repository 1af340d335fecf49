//! Radially deformed Dirac operators on Clifford-valued functions: the
//! Laguerre–monogenic eigenbasis, the holomorphic semigroup and deformed
//! Fourier transform, and numerical checks of their identities.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clifford;
pub mod error;
pub mod kernel;
pub mod monogenics;
pub mod quadrature;
pub mod radial;
pub mod specfun;
pub mod transform;
pub mod verify;

pub use clifford::Multivector;
pub use error::{Error, Result};
pub use quadrature::QuadratureSpec;
