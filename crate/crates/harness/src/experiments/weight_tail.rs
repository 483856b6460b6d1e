use rootfind_core::growth::Model;
use rootfind_core::rng::trial_rng;
use rootfind_core::PlaneTree;

use super::{model_tag, stream_seed};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::pool::WorkerPool;
use crate::table::{TrialRow, TrialTable};

const EXPERIMENT: &str = "weight-tail";
const TAG: u64 = 3;

/// Limiting bound on `P(∃u: depth(u) >= m, |θ_u T| >= ε|T|)`, where depth is
/// the weight for UA and the height for the regular model.
pub fn weight_tail_bound(model: Model, m: u32, epsilon: f64) -> f64 {
    let two_thirds = 2.0f64 / 3.0;
    match model {
        Model::Ua => epsilon.powi(-2) * two_thirds.powi(m as i32 - 1),
        Model::UaRegular { d } => 1.5 * (f64::from(d) + 1.0) * epsilon.powi(-2) * two_thirds.powi(m as i32),
    }
}

/// Largest weight (UA) or height (regular) over nodes whose subtree holds
/// at least an `epsilon` share of the tree.
pub fn heavy_depth(t: &PlaneTree, model: Model, epsilon: f64) -> u64 {
    let cut = epsilon * t.len() as f64;
    let depth: Vec<u64> = match model {
        Model::Ua => t.weights(),
        Model::UaRegular { .. } => t.heights().into_iter().map(u64::from).collect(),
    };
    (0..t.len()).filter(|&u| t.subtree_size(u) as f64 >= cut).map(|u| depth[u]).max().unwrap_or(0)
}

pub fn run_weight_tail(cfg: &ExperimentConfig, pool: &WorkerPool) -> Result<TrialTable> {
    cfg.validate()?;
    let stat = match cfg.model {
        Model::Ua => "weight_tail",
        Model::UaRegular { .. } => "height_tail",
    };
    let mut table = TrialTable::new();
    for &n in &cfg.n {
        let stream = stream_seed(cfg.seed, &[TAG, model_tag(cfg.model), n as u64]);
        let depths = pool.try_map(cfg.trials, |i| -> Result<u64> {
            let t = cfg.model.grow(n, &mut trial_rng(stream, i))?;
            Ok(heavy_depth(&t, cfg.model, cfg.epsilon))
        })?;
        let total = cfg.trials as f64;
        for &m in &cfg.m {
            let p = depths.iter().filter(|&&h| h >= u64::from(m)).count() as f64 / total;
            let bound = weight_tail_bound(cfg.model, m, cfg.epsilon);
            table.push(
                TrialRow::new(EXPERIMENT, &format!("{stat}_m{m}"), p)
                    .model(cfg.model)
                    .n(n)
                    .x(cfg.epsilon)
                    .stderr((p * (1.0 - p) / total).sqrt())
                    .bound(bound)
                    .pass(p <= bound)
                    .trials(cfg.trials)
                    .seed(cfg.seed),
            );
        }
    }
    Ok(table)
}
