//! Wiener paths, λ-branches, the zeta and eta processes and recurrence experiments.

pub mod branches;
pub mod eta;
pub mod recurrence;
pub mod spitzer;
pub mod strassen;
pub mod wiener;
pub mod zeta;

pub use branches::{solve_lambda_branches, BranchKind, CausticAction, LambdaBranches, LambdaRoot};
pub use eta::{eta_path, EtaPath, EtaProcess, EtaSample, EtaZero};
pub use recurrence::{recurrence_experiment, RecurrenceConfig, RecurrenceSummary};
pub use spitzer::{cauchy_cdf, ks_distance, spitzer_sample, winding_angle, SpitzerSample};
pub use strassen::{strassen_functional, strassen_h, strassen_scaling_check};
pub use wiener::{Functionals, WienerPath, WienerStream};
pub use zeta::{find_turbulent_times, zeta_path, TurbulenceReport, TurbulentTime, ZetaPath, ZetaSample};
