//! Gaussian moment hierarchy for an ensemble of qutrits under continuous QND
//! measurement of the collective `F_z` and local optical pumping.

pub mod basis;
pub mod generator;
mod integrate;
mod state;
mod trace;

pub use basis::{build_spin_matrices, full_spin_matrices, QutritBasis};
pub use generator::{Generators, Mat9, Vec9};
pub use integrate::{
    convergence_report, run_trajectory, scan, simulate, simulate_peak, step, ConvergenceReport, Mode,
    MomentDynamics, Sample, ScanAxis, SimParams,
};
pub use state::{packed_index, MomentState, N_COV};
pub use trace::{find_peak, write_scan_csv, xi_inv2_db, Peak, ScanRow, SqueezingTrace};
