//! Numerical laboratory for the generalised hyperelastic-rod equation
//!
//! ```text
//! u_t + f'(u) u_x + ∂x Λ⁻² ( g(u) + ½ f''(u) u_x² ) = 0,    Λ⁻² = (1 − ∂x²)⁻¹,
//! ```
//!
//! on a truncated periodic grid, with diagnostics for conservation, tail
//! profiles, decay persistence and weighted norms.

pub mod datum;
pub mod diagnostics;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod model;
pub mod nonlocal;
pub mod scheme;
pub mod spectral;
pub mod stencil;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{integrate, lp_norm, make_grid, spectral_derivative, Grid, GridFunction};
pub use nonlocal::{convolve_oracle, grad_helmholtz_inverse, helmholtz_inverse, HelmholtzOperator};
pub use model::{build_preset, galilean_reduce_dgh, rhs, validate_hypotheses, HypothesisReport, ModelSpec};
pub use scheme::{Discretization, Scheme};
pub use evolve::{evolve, step_rk4, Checkpoint, EvolveOptions, Trajectory};
pub use weights::{catalog, check_admissible, check_submultiplicative, estimate_moderate_constant, truncate, young_check, Weight};
pub use datum::{make_datum, Datum, DatumKind};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
