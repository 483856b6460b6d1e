use rootfind_core::centrality::central_path_and_phi;
use rootfind_core::growth::Model;
use rootfind_core::rng::trial_rng;
use rootfind_core::stats::{linear_fit, LinearFit};

use super::{model_tag, stream_seed};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::pool::WorkerPool;
use crate::table::{TrialRow, TrialTable};

const EXPERIMENT: &str = "phi-tail";
const TAG: u64 = 2;

/// `log Φ(T_n)` for each trial.
pub fn log_phi_samples(model: Model, n: usize, trials: u64, seed: u64, pool: &WorkerPool) -> Result<Vec<f64>> {
    let stream = stream_seed(seed, &[TAG, model_tag(model), n as u64]);
    pool.try_map(trials, |i| -> Result<f64> {
        let t = model.grow(n, &mut trial_rng(stream, i))?;
        Ok(central_path_and_phi(&t).1)
    })
}

/// Empirical `P(Φ >= x)` for each `x`. Values within `1e-9` below `log x`
/// count as reaching it, since `Φ` takes exact rational values.
pub fn tail_probabilities(log_phis: &[f64], xs: &[f64]) -> Vec<f64> {
    let total = log_phis.len() as f64;
    xs.iter()
        .map(|&x| {
            let cut = x.ln() - 1e-9;
            log_phis.iter().filter(|&&l| l >= cut).count() as f64 / total
        })
        .collect()
}

/// Least-squares slope of `log P(Φ >= x)` against `log x`, over the points
/// with a positive tail.
pub fn loglog_slope(xs: &[f64], tails: &[f64]) -> Result<LinearFit> {
    let (lx, lt): (Vec<f64>, Vec<f64>) =
        xs.iter().zip(tails).filter(|&(_, &p)| p > 0.0).map(|(&x, &p)| (x.ln(), p.ln())).unzip();
    if lx.len() < 2 {
        return Err(HarnessError::Input("fewer than two positive tail points".into()));
    }
    Ok(linear_fit(&lx, &lt)?)
}

pub fn run_phi_tail(cfg: &ExperimentConfig, pool: &WorkerPool) -> Result<TrialTable> {
    cfg.validate()?;
    let mut table = TrialTable::new();
    for &n in &cfg.n {
        let samples = log_phi_samples(cfg.model, n, cfg.trials, cfg.seed, pool)?;
        let tails = tail_probabilities(&samples, &cfg.x);
        let t = cfg.trials as f64;
        let base = |stat: &str, v: f64| TrialRow::new(EXPERIMENT, stat, v).model(cfg.model).n(n).trials(cfg.trials).seed(cfg.seed);
        for (&x, &p) in cfg.x.iter().zip(&tails) {
            table.push(base("phi_tail", p).x(x).stderr((p * (1.0 - p) / t).sqrt()));
        }
        if let Ok(fit) = loglog_slope(&cfg.x, &tails) {
            table.push(base("loglog_slope", fit.slope).pass(fit.slope < 0.0));
            table.push(base("loglog_r_squared", fit.r_squared));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_trees_have_no_tail() {
        let pool = WorkerPool::new(Some(1)).unwrap();
        let cfg = ExperimentConfig { n: vec![1], trials: 10, ..Default::default() };
        let table = run_phi_tail(&cfg, &pool).unwrap();
        assert!(table.with_statistic("phi_tail").all(|r| r.value == 0.0));
        assert_eq!(table.with_statistic("loglog_slope").count(), 0);
    }

    #[test]
    fn exact_values_count_as_reaching_threshold() {
        assert_eq!(tail_probabilities(&[2f64.ln(), 0.0], &[2.0, 1.0, 3.0]), vec![0.5, 1.0, 0.0]);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [2.0, 4.0, 8.0, 16.0];
        let tails: Vec<f64> = xs.iter().map(|x: &f64| x.powf(-1.5)).collect();
        let fit = loglog_slope(&xs, &tails).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!(loglog_slope(&xs, &[0.5, 0.0, 0.0, 0.0]).is_err());
    }
}
