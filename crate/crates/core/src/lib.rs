//! Exact one-dimensional ROF minimization with relaxed Dirichlet boundary data.
//!
//! The crate works on step functions over `(0, L)`. It provides
//!
//! - [`step`]: the step-function data class, traces, norms and the relaxed energy,
//! - [`subdiff`]: dual certificates `z` proving minimality, and the minimal section
//!   that drives the total variation flow,
//! - [`tvflow`]: an exact event-driven simulator of the Dirichlet total variation flow,
//! - [`rofsolve`]: an exact dynamic-programming minimizer, an independent iterative
//!   oracle, and the implicit-Euler (proximal) flow,
//! - [`attain`]: boundary-attainment classification and theorem checkers,
//! - [`batch`]: data-parallel evaluation of instance batches (rayon behind the
//!   `parallel` feature, sequential otherwise).
//!
//! ```
//! use rof1d::{BoundaryPair, RofInstance, StepFunction, rofsolve};
//!
//! let f = StepFunction::new(2.0, vec![1.0], vec![2.0, 0.0]).unwrap();
//! let inst = RofInstance::new(f, 1.0, BoundaryPair::new(0.0, 0.0).unwrap()).unwrap();
//! let report = rofsolve::solve_rof(&inst).unwrap();
//! assert!(report.certificate.feasible);
//! assert!((report.energy - 2.0).abs() < 1e-12);
//! ```

pub mod attain;
pub mod batch;
mod error;
pub mod presets;
pub mod random;
pub mod rofsolve;
pub mod scalar;
pub mod step;
pub mod subdiff;
pub mod tvflow;

pub use error::{Error, Result};
pub use step::{BoundaryPair, ExtendedProfile, LpNorm, Monotonicity, RofInstance, StepFunction};
pub use subdiff::{CertificateReport, DualField};
pub use tvflow::FlowTrajectory;
