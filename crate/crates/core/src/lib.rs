//! Resource divergences, robustness measures and probabilistic
//! transformation-rate bounds over conically representable free sets.
//!
//! All divergences are reported in bits. The projective relative entropy
//! `D_max(ρ‖σ) + D_max(σ‖ρ)` and its free-set optimization are computed with
//! the built-in conic solver in [`conic`], which returns dual certificates
//! alongside every optimum.
//!
//! ```
//! use projent::{divergences::dproj_set, freesets::FreeCone, models::{isotropic, IsotropicParams}};
//!
//! let rho = isotropic(IsotropicParams::new(2, 0.75)?)?;
//! let value = dproj_set(&rho, &FreeCone::ppt(2, 2)?)?;
//! assert!((value.bits - 3f64.log2()).abs() < 1e-6);
//! # Ok::<(), projent::Error>(())
//! ```

// `!(x > bound)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conic;
pub mod divergences;
pub mod error;
pub mod freesets;
pub mod io;
pub mod models;
pub mod multicopy;
pub mod qlinalg;
pub mod rates;

pub use divergences::{DivergenceValue, Provenance, SmoothingRadius};
pub use error::{Error, Result};
pub use freesets::{FreeCone, FreeConeFamily};
pub use qlinalg::{DensityMatrix, HermitianOperator};
