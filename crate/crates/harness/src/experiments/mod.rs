//! Monte Carlo experiments. Every trial draws from its own stream derived
//! from the master seed, the experiment tag and the trial index, so results
//! do not depend on the number of workers.

mod dist;
mod error_curve;
mod nx_tail;
mod phi_tail;
mod scaling;
mod weight_tail;

pub use dist::{distribution_checks, rearrangement_checks, run_dist_suite};
pub use error_curve::{error_counts, root_positions, run_error_curve};
pub use nx_tail::{
    calibrate_nx_constant, nx_samples, nx_scale, run_nx_tail, CALIBRATION_SEED, NX_CONSTANT,
};
pub use phi_tail::{log_phi_samples, loglog_slope, run_phi_tail, tail_probabilities};
pub use scaling::{fit_scaling, fit_scaling_points, ScalingFit, ScalingPoint};
pub use weight_tail::{heavy_depth, run_weight_tail, weight_tail_bound};

use rootfind_core::growth::Model;
use rootfind_core::rng::derive_seed;

/// Seed of the stream identified by `tags` under `master`.
pub fn stream_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(master, |s, &t| derive_seed(s, t))
}

pub(crate) fn model_tag(model: Model) -> u64 {
    match model {
        Model::Ua => 0,
        Model::UaRegular { d } => u64::from(d),
    }
}
