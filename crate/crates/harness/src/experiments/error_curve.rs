use rootfind_core::centrality::{select_roots, RankMethod};
use rootfind_core::growth::Model;
use rootfind_core::rng::trial_rng;
use rootfind_core::stats::{wilson_interval, Z_95};

use super::{model_tag, stream_seed};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::pool::WorkerPool;
use crate::table::{TrialRow, TrialTable};

const EXPERIMENT: &str = "error-curve";
const TAG: u64 = 1;

/// Position of the root in the ranking of each simulated tree, or `None`
/// when it is not among the `k_max` most central nodes.
pub fn root_positions(
    model: Model,
    n: usize,
    k_max: usize,
    method: RankMethod,
    trials: u64,
    seed: u64,
    pool: &WorkerPool,
) -> Result<Vec<Option<usize>>> {
    let stream = stream_seed(seed, &[TAG, model_tag(model), n as u64]);
    pool.try_map(trials, |i| -> Result<Option<usize>> {
        let t = model.grow(n, &mut trial_rng(stream, i))?;
        let chosen = select_roots(&t, k_max, method)?;
        Ok(chosen.iter().position(|&u| u == 0))
    })
}

/// Number of trials in which the root is missed by the size-`K` output,
/// for each `K` of `ks`.
pub fn error_counts(positions: &[Option<usize>], ks: &[usize]) -> Vec<u64> {
    ks.iter().map(|&k| positions.iter().filter(|p| p.is_none_or(|pos| pos >= k)).count() as u64).collect()
}

pub fn run_error_curve(cfg: &ExperimentConfig, pool: &WorkerPool) -> Result<TrialTable> {
    cfg.validate()?;
    let mut ks = cfg.k.clone();
    ks.sort_unstable();
    ks.dedup();
    let k_max = *ks.last().expect("validated non-empty");
    let mut table = TrialTable::new();
    for &n in &cfg.n {
        let positions = root_positions(cfg.model, n, k_max, cfg.method, cfg.trials, cfg.seed, pool)?;
        let t = cfg.trials as f64;
        for (&k, &misses) in ks.iter().zip(&error_counts(&positions, &ks)) {
            let p = misses as f64 / t;
            let (lo, hi) = wilson_interval(misses, cfg.trials, Z_95);
            let base = |stat: &str, v: f64| {
                TrialRow::new(EXPERIMENT, stat, v).model(cfg.model).n(n).k(k).trials(cfg.trials).seed(cfg.seed)
            };
            table.push(base("error", p).stderr((p * (1.0 - p) / t).sqrt()));
            table.push(base("error_wilson_low", lo));
            table.push(base("error_wilson_high", hi));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_follow_positions() {
        let pos = [Some(0), Some(3), None, Some(1)];
        assert_eq!(error_counts(&pos, &[1, 2, 4, 8]), vec![3, 2, 1, 1]);
    }

    #[test]
    fn whole_tree_output_never_misses() {
        let pool = WorkerPool::new(Some(2)).unwrap();
        let cfg = ExperimentConfig {
            model: Model::UaRegular { d: 2 },
            n: vec![5],
            k: vec![1, 12],
            trials: 200,
            ..Default::default()
        };
        let table = run_error_curve(&cfg, &pool).unwrap();
        let errors: Vec<&TrialRow> = table.with_statistic("error").collect();
        assert_eq!(errors.len(), 2);
        assert_eq!(errors[1].value, 0.0);
        assert!(errors[0].value > 0.0);
    }
}
