//! Convergence diagnostics and limit-constant solvers.

pub mod condensation;
pub mod constants;
pub mod limits;
pub mod report;
pub mod sampling;
pub mod scaling;
pub mod stats;
pub mod tau;

pub use condensation::{condensation_profile, condensation_study, CondensationStudy};
pub use constants::{chi_of_split, cmj_char_size, malthusian_alpha, ChiEstimate, CmjConstants};
pub use limits::{limit_family, LimitFamily};
pub use report::{run_converge, ConvergeConfig, ConvergenceReport};
pub use sampling::{lca_depth_profile, scaled_distance_samples, slope_vs_logn, tightness_report, DistanceSamples};
pub use scaling::Scaling;
pub use stats::{ks_one_sample, ks_two_sample, total_variation_discrete};
pub use tau::{energy_distance_tau, EmpiricalTau};
