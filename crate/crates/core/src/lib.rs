//! Guided-mode solvers, Faraday coupling constants and QND spin-squeezing
//! dynamics for atoms trapped next to nanophotonic waveguides.
//!
//! The crate is organised bottom-up:
//!
//! - [`special`]: Bessel functions needed by the analytic fiber modes.
//! - [`waveguide`]: cylindrical (analytic HE11) and rectangular (vector finite
//!   difference) guided modes, group index, and the on-disk mode cache.
//! - [`coupling`]: effective areas, Faraday rotation angle, measurement
//!   strength, optical pumping rate and single-atom cooperativity.
//! - [`moments`]: the symmetric Gaussian moment hierarchy for an ensemble of
//!   qutrits under continuous QND measurement and optical pumping.
//! - [`oracle`]: brute-force density-matrix integrations that validate the
//!   moment hierarchy.
//! - [`fit`]: log-space least-squares fits used by the parameter scans.

pub mod consts;
pub mod coupling;
mod error;
pub mod fit;
pub mod moments;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod waveguide;

pub use error::{Error, Result};
