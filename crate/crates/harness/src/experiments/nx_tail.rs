use rootfind_core::growth::Model;
use rootfind_core::limits::count_ex_random_flow;
use rootfind_core::rng::derive_seed;

use super::{model_tag, stream_seed};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::pool::WorkerPool;
use crate::table::{TrialRow, TrialTable};

const EXPERIMENT: &str = "nx-tail";
const TAG: u64 = 4;

/// Master seed of the calibration run that produced [`NX_CONSTANT`]. The
/// default experiment seeds never coincide with it.
pub const CALIBRATION_SEED: u64 = 0x6361_6c69_6272_6174;

/// `ĉ` fitted on UA and regular (`d = 3`) flows with `x ∈ {10, 100}`,
/// `y ∈ {1, 2, 4}` and 10^4 calibration seeds.
pub const NX_CONSTANT: f64 = 0.698_426_034_793_464_1;

/// `exp(c + c √log x)`.
pub fn nx_scale(c: f64, x: f64) -> f64 {
    (c + c * x.ln().sqrt()).exp()
}

/// `N_x` of the flow sampled for each trial, for every `x` of `xs`.
pub fn nx_samples(
    model: Model,
    xs: &[f64],
    trials: u64,
    seed: u64,
    budget: usize,
    pool: &WorkerPool,
) -> Result<Vec<Vec<usize>>> {
    let stream = stream_seed(seed, &[TAG, model_tag(model)]);
    pool.try_map(trials, |i| -> Result<Vec<usize>> {
        let flow_seed = derive_seed(stream, i);
        Ok(xs.iter().map(|&x| count_ex_random_flow(model, x, flow_seed, budget)).collect::<rootfind_core::Result<_>>()?)
    })
}

/// Smallest `ĉ >= 0` such that, on the given run, the empirical
/// `P(N_x >= y exp(ĉ + ĉ √log x))` is at most `e^{-y}` for every model,
/// `x` and `y`. That is half the target `2e^{-y}`, which leaves room for
/// sampling noise when the constant is reused on fresh seeds.
pub fn calibrate_nx_constant(
    models: &[Model],
    xs: &[f64],
    ys: &[f64],
    trials: u64,
    seed: u64,
    budget: usize,
    pool: &WorkerPool,
) -> Result<f64> {
    if models.is_empty() || xs.is_empty() || ys.is_empty() || trials == 0 {
        return Err(HarnessError::Config("calibration needs models, x and y values and trials".into()));
    }
    let mut c: f64 = 0.0;
    for &model in models {
        let samples = nx_samples(model, xs, trials, seed, budget, pool)?;
        for (j, &x) in xs.iter().enumerate() {
            let mut counts: Vec<usize> = samples.iter().map(|s| s[j]).collect();
            counts.sort_unstable();
            for &y in ys {
                // Smallest integer t with #{N >= t} <= e^{-y} · trials.
                let allowed = ((-y).exp() * trials as f64).floor() as usize;
                let t = if allowed >= counts.len() { 1 } else { counts[counts.len() - 1 - allowed] + 1 };
                let needed = (t as f64 / y).ln() / (1.0 + x.ln().sqrt());
                c = c.max(needed);
            }
        }
    }
    Ok(c)
}

pub fn run_nx_tail(cfg: &ExperimentConfig, pool: &WorkerPool) -> Result<TrialTable> {
    cfg.validate()?;
    let c = cfg.nx_constant.unwrap_or(NX_CONSTANT);
    let samples = nx_samples(cfg.model, &cfg.x, cfg.trials, cfg.seed, cfg.budget, pool)?;
    let total = cfg.trials as f64;
    let mut table = TrialTable::new();
    let base = |stat: &str, v: f64| TrialRow::new(EXPERIMENT, stat, v).model(cfg.model).trials(cfg.trials).seed(cfg.seed);
    table.push(base("nx_constant", c));
    for (j, &x) in cfg.x.iter().enumerate() {
        let mean = samples.iter().map(|s| s[j] as f64).sum::<f64>() / total;
        table.push(base("nx_mean", mean).x(x));
        for &y in &cfg.y {
            let threshold = y * nx_scale(c, x);
            let p = samples.iter().filter(|s| s[j] as f64 >= threshold).count() as f64 / total;
            let bound = 2.0 * (-y).exp();
            table.push(
                base("nx_exceedance", p)
                    .x(x)
                    .y(y)
                    .stderr((p * (1.0 - p) / total).sqrt())
                    .bound(bound)
                    .pass(p <= bound),
            );
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_one_has_single_word() {
        let pool = WorkerPool::new(Some(1)).unwrap();
        let cfg = ExperimentConfig { x: vec![1.0], y: vec![1.0, 2.0], trials: 50, nx_constant: Some(0.5), ..Default::default() };
        let table = run_nx_tail(&cfg, &pool).unwrap();
        assert!(table.with_statistic("nx_exceedance").all(|r| r.value == 0.0 && r.pass == Some(true)));
        assert_eq!(table.with_statistic("nx_mean").next().unwrap().value, 1.0);
    }

    #[test]
    fn calibration_meets_its_own_target() {
        let pool = WorkerPool::new(Some(2)).unwrap();
        let (xs, ys) = ([10.0, 100.0], [1.0, 2.0]);
        let c = calibrate_nx_constant(&[Model::Ua], &xs, &ys, 400, 5, 1_000_000, &pool).unwrap();
        assert!(c > 0.0);
        let samples = nx_samples(Model::Ua, &xs, 400, 5, 1_000_000, &pool).unwrap();
        for (j, &x) in xs.iter().enumerate() {
            for &y in &ys {
                let hits = samples.iter().filter(|s| s[j] as f64 >= y * nx_scale(c, x)).count();
                assert!(hits as f64 <= (-y).exp() * 400.0);
            }
        }
    }
}
