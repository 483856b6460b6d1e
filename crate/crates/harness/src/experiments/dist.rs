use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rootfind_core::growth::{grow_ua_with, Model, UrnState};
use rootfind_core::limits::{
    beta_conditional_tail, check_q_domination, rearrange_uniform, sample_branching_generation,
    sample_dirichlet_sym_with, stick_break_factors, stick_break_with, DirichletRearranger, LimitFlowSample,
    PhiLimitSampler, SMALL_W,
};
use rootfind_core::rng::{derive_seed, rng_from_seed, trial_rng};
use rootfind_core::stats::{chi_square_gof, ks_one_sample, ks_two_sample, pearson, Summary};
use rootfind_core::Word;

use super::stream_seed;
use crate::config::{DistSizes, ExperimentConfig, Thresholds};
use crate::error::Result;
use crate::pool::WorkerPool;
use crate::table::{TrialRow, TrialTable};

const EXPERIMENT: &str = "dist-check";
const TAG: u64 = 5;

struct Ctx<'a> {
    sizes: &'a DistSizes,
    thr: Thresholds,
    seed: u64,
    pool: &'a WorkerPool,
}

impl Ctx<'_> {
    fn stream(&self, check: u64, param: u64) -> u64 {
        stream_seed(self.seed, &[TAG, check, param])
    }

    fn row(&self, stat: &str, value: f64, trials: u64) -> TrialRow {
        TrialRow::new(EXPERIMENT, stat, value).trials(trials).seed(self.seed)
    }

    /// Row comparing an estimate against a target within `sigmas` standard errors.
    fn moment_row(&self, stat: &str, s: &Summary, target: f64) -> TrialRow {
        let se = s.stderr();
        self.row(stat, s.mean, s.n as u64).stderr(se).bound(target).pass((s.mean - target).abs() <= self.thr.sigmas * se)
    }
}

/// Statistical checks of the limit laws: Dirichlet samplers against each
/// other and against the urn, subtree-ratio moments, uniformity of the first
/// subtree share, path-maximum moments, the conditional Beta tail and the
/// geometric branching law.
pub fn distribution_checks(cfg: &ExperimentConfig, pool: &WorkerPool) -> Result<TrialTable> {
    let ctx = Ctx { sizes: &cfg.dist, thr: cfg.thresholds, seed: cfg.seed, pool };
    let mut table = TrialTable::new();
    for &d in &ctx.sizes.stick_break_dims {
        stick_break_vs_urn(&ctx, d, &mut table)?;
    }
    dirichlet_marginals(&ctx, &mut table)?;
    for &d in &ctx.sizes.moment_dims {
        subtree_ratio_moments(&ctx, d, &mut table)?;
    }
    first_subtree_uniform(&ctx, &mut table)?;
    path_maximum_moments(&ctx, &mut table)?;
    beta_tail_grid(&ctx, &mut table)?;
    geometric_generations(&ctx, &mut table)?;
    Ok(table)
}

/// Exact per-sample checks of the rearrangement constructions together with
/// the laws of their companion variables.
pub fn rearrangement_checks(cfg: &ExperimentConfig, pool: &WorkerPool) -> Result<TrialTable> {
    let ctx = Ctx { sizes: &cfg.dist, thr: cfg.thresholds, seed: cfg.seed, pool };
    let mut table = TrialTable::new();
    uniform_rearrangement(&ctx, &mut table)?;
    q_domination(&ctx, &mut table)?;
    for &d in &ctx.sizes.rearrangement_dims {
        dirichlet_rearrangement(&ctx, d, &mut table)?;
    }
    Ok(table)
}

pub fn run_dist_suite(cfg: &ExperimentConfig, pool: &WorkerPool) -> Result<TrialTable> {
    cfg.validate()?;
    let mut table = distribution_checks(cfg, pool)?;
    table.extend(rearrangement_checks(cfg, pool)?);
    Ok(table)
}

/// Urn with one ball of each of `d` colours and `d - 1` added per draw,
/// against stick-breaking `Dir_d(1/(d-1))` passed through the same number
/// of draws. After `N` draws the urn's first colour has been drawn
/// `Binomial(N, D_1)` times given the limit `D`, so both samples share one
/// law exactly; comparing the raw limit instead would add a discretisation
/// bias of order `N^{-1/(d-1)}` near zero.
fn stick_break_vs_urn(ctx: &Ctx, d: usize, table: &mut TrialTable) -> Result<()> {
    let samples = ctx.sizes.stick_break_samples;
    let draws = ctx.sizes.urn_draws;
    let factors = stick_break_factors(d)?;
    let denom = (d as u64 + (d as u64 - 1) * draws) as f64;
    let urn_stream = ctx.stream(1, d as u64);
    let urn: Vec<f64> = ctx.pool.try_map(samples, |i| -> Result<f64> {
        let mut rng = trial_rng(urn_stream, i);
        let mut state = UrnState::new(&vec![1; d], d as u64 - 1)?;
        for _ in 0..draws {
            state.draw(&mut rng);
        }
        Ok(state.counts[0] as f64 / denom)
    })?;
    let sb_stream = ctx.stream(2, d as u64);
    let sb: Vec<(f64, f64)> = ctx.pool.try_map(samples, |i| -> Result<(f64, f64)> {
        let mut rng = trial_rng(sb_stream, i);
        let p = stick_break_with(&factors, &mut rng).vector[0];
        let k = Binomial::new(draws, p).map_err(|e| crate::error::HarnessError::Input(e.to_string()))?.sample(&mut rng);
        Ok((p, (1 + (d as u64 - 1) * k) as f64 / denom))
    })?;
    let mixed: Vec<f64> = sb.iter().map(|s| s.1).collect();
    let ks = ks_two_sample(&urn, &mixed);
    table.push(ctx.row("stick_break_vs_urn_ks", ks, samples).d(d as u32).bound(ctx.thr.ks).pass(ks < ctx.thr.ks));
    let gamma_stream = ctx.stream(3, d as u64);
    let alpha = 1.0 / (d as f64 - 1.0);
    let direct: Vec<f64> = ctx.pool.try_map(samples, |i| -> Result<f64> {
        Ok(sample_dirichlet_sym_with(d, alpha, &mut trial_rng(gamma_stream, i))?[0])
    })?;
    let limit: Vec<f64> = sb.iter().map(|s| s.0).collect();
    let ks = ks_two_sample(&limit, &direct);
    table.push(ctx.row("stick_break_vs_gamma_ks", ks, samples).d(d as u32).bound(ctx.thr.ks).pass(ks < ctx.thr.ks));
    Ok(())
}

fn dirichlet_marginals(ctx: &Ctx, table: &mut TrialTable) -> Result<()> {
    let samples = ctx.sizes.stick_break_samples;
    let mut rng = rng_from_seed(ctx.stream(4, 0));
    let uniform: Vec<f64> =
        (0..samples).map(|_| sample_dirichlet_sym_with(2, 1.0, &mut rng).map(|v| v[0])).collect::<std::result::Result<_, _>>()?;
    let ks = ks_one_sample(&uniform, |x| x.clamp(0.0, 1.0));
    table.push(ctx.row("dirichlet_k2_uniform_ks", ks, samples).bound(ctx.thr.ks_strict).pass(ks < ctx.thr.ks_strict));
    let third: Vec<f64> =
        (0..samples).map(|_| sample_dirichlet_sym_with(3, 0.5, &mut rng).map(|v| v[0])).collect::<std::result::Result<_, _>>()?;
    table.push(ctx.moment_row("dirichlet_k3_mean", &Summary::of(&third), 1.0 / 3.0));
    let squares: Vec<f64> = (0..samples)
        .map(|_| sample_dirichlet_sym_with(4, 1.0 / 3.0, &mut rng).map(|v| v[0] * v[0]))
        .collect::<std::result::Result<_, _>>()?;
    table.push(ctx.moment_row("dirichlet_k4_second_moment", &Summary::of(&squares), 1.0 / 7.0));
    Ok(())
}

/// `|θ_v T_n| / |θ_{(1)} T_n|` for `v = (1, 1)` in the regular model.
fn subtree_ratio_moments(ctx: &Ctx, d: u32, table: &mut TrialTable) -> Result<()> {
    let trials = ctx.sizes.moment_trials;
    let n = ctx.sizes.moment_steps;
    let model = Model::UaRegular { d };
    let stream = ctx.stream(5, u64::from(d));
    let ratios: Vec<f64> = ctx.pool.try_map(trials, |i| -> Result<f64> {
        let t = model.grow(n, &mut trial_rng(stream, i))?;
        let parent = t.find(&Word::from_slice(&[1])).expect("root children always exist");
        match t.find(&Word::from_slice(&[1, 1])) {
            Some(v) => Ok(t.subtree_size(v) as f64 / t.subtree_size(parent) as f64),
            None => Ok(0.0),
        }
    })?;
    let df = f64::from(d);
    table.push(ctx.moment_row("subtree_ratio_mean", &Summary::of(&ratios), 1.0 / df).model(model).n(n));
    let squares: Vec<f64> = ratios.iter().map(|r| r * r).collect();
    table.push(ctx.moment_row("subtree_ratio_second_moment", &Summary::of(&squares), 1.0 / (2.0 * df - 1.0)).model(model).n(n));
    Ok(())
}

/// `|θ_1 T_n| / (n - 1)` for UA trees.
fn first_subtree_uniform(ctx: &Ctx, table: &mut TrialTable) -> Result<()> {
    let trials = ctx.sizes.uniform_trials;
    let n = ctx.sizes.uniform_n.max(2);
    let stream = ctx.stream(6, n as u64);
    let shares: Vec<f64> = ctx.pool.try_map(trials, |i| -> Result<f64> {
        let t = grow_ua_with(n, &mut trial_rng(stream, i))?;
        Ok(t.subtree_size(1) as f64 / (n - 1) as f64)
    })?;
    let ks = ks_one_sample(&shares, |x| x.clamp(0.0, 1.0));
    table.push(ctx.row("first_subtree_uniform_ks", ks, trials).model(Model::Ua).n(n).bound(ctx.thr.ks).pass(ks < ctx.thr.ks));
    Ok(())
}

/// `E[(1 - V)^{-1/2}]` for the largest share along a path.
fn path_maximum_moments(ctx: &Ctx, table: &mut TrialTable) -> Result<()> {
    let samples = ctx.sizes.max_moment_samples_ua;
    let sampler = PhiLimitSampler::new(Model::Ua)?;
    let mut rng = rng_from_seed(ctx.stream(7, 0));
    let values: Vec<f64> = (0..samples).map(|_| (1.0 - sampler.sample_v(1, &mut rng)).powf(-0.5)).collect();
    let s = Summary::of(&values);
    let target = 2.0 * std::f64::consts::SQRT_2;
    let rel = (s.mean - target).abs() / target;
    table.push(
        ctx.row("max_share_moment", s.mean, samples)
            .model(Model::Ua)
            .stderr(s.stderr())
            .bound(target)
            .pass(rel <= ctx.thr.relative),
    );
    let samples = ctx.sizes.max_moment_samples_regular;
    let bound = 7.0 * std::f64::consts::SQRT_2;
    for &d in &ctx.sizes.max_moment_dims {
        let model = Model::UaRegular { d };
        let sampler = PhiLimitSampler::new(model)?;
        for (step, stat) in [(1usize, "max_share_moment_root"), (2, "max_share_moment")] {
            let mut rng = rng_from_seed(ctx.stream(8, u64::from(d) * 4 + step as u64));
            let values: Vec<f64> = (0..samples).map(|_| (1.0 - sampler.sample_v(step, &mut rng)).powf(-0.5)).collect();
            let s = Summary::of(&values);
            table.push(ctx.row(stat, s.mean, samples).model(model).stderr(s.stderr()).bound(bound).pass(s.mean <= bound));
        }
    }
    Ok(())
}

fn beta_tail_grid(ctx: &Ctx, table: &mut TrialTable) -> Result<()> {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for ai in 0..=10 {
        let a = 1.0 + f64::from(ai) / 10.0;
        for bi in 1..=20 {
            let b = f64::from(bi) * 0.05;
            worst = worst.max(beta_conditional_tail(a, b)?);
            points += 1;
        }
    }
    table.push(ctx.row("beta_conditional_tail_max", worst, points).bound(0.5).pass(worst <= 0.5));
    Ok(())
}

/// Generation `r` of the geometric branching process is Geometric(2^{-r}).
fn geometric_generations(ctx: &Ctx, table: &mut TrialTable) -> Result<()> {
    let samples = ctx.sizes.geometric_samples;
    for r in 1..=3u32 {
        let p = 0.5f64.powi(r as i32);
        // Pool the upper tail so every bin expects at least 20 counts.
        let mut bins = 1usize;
        while samples as f64 * (1.0 - p).powi(bins as i32) >= 20.0 {
            bins += 1;
        }
        let mut rng = rng_from_seed(ctx.stream(9, u64::from(r)));
        let mut observed = vec![0u64; bins];
        for _ in 0..samples {
            let z = sample_branching_generation(r, &mut rng) as usize;
            observed[(z - 1).min(bins - 1)] += 1;
        }
        let mut probs: Vec<f64> = (0..bins - 1).map(|i| p * (1.0 - p).powi(i as i32)).collect();
        probs.push((1.0 - p).powi(bins as i32 - 1));
        let (_, pv) = chi_square_gof(&observed, &probs)?;
        table.push(
            ctx.row(&format!("geometric_generation_r{r}_p_value"), pv, samples)
                .bound(ctx.thr.chi_square_p)
                .pass(pv > ctx.thr.chi_square_p),
        );
    }
    Ok(())
}

const UNIFORM_COMPANIONS: usize = 4;

fn uniform_rearrangement(ctx: &Ctx, table: &mut TrialTable) -> Result<()> {
    let samples = ctx.sizes.rearrangement_samples;
    let stream = ctx.stream(10, 0);
    let draws: Vec<(usize, Vec<f64>)> = ctx.pool.try_map(samples, |i| -> Result<(usize, Vec<f64>)> {
        let mut rng = trial_rng(stream, i);
        let mut us: Vec<f64> = (0..UNIFORM_COMPANIONS + 2).map(|_| rng.random()).collect();
        while us.iter().all(|&u| u <= 0.5) {
            us.push(rng.random());
        }
        let horizon = us.len();
        let r = rearrange_uniform(&us, horizon)?;
        Ok((r.violations.len(), r.companions[..UNIFORM_COMPANIONS].to_vec()))
    })?;
    let violations: usize = draws.iter().map(|d| d.0).sum();
    table.push(ctx.row("uniform_rearrangement_violations", violations as f64, samples).bound(0.0).pass(violations == 0));
    let columns: Vec<Vec<f64>> =
        (0..UNIFORM_COMPANIONS).map(|j| draws.iter().map(|d| d.1[j]).collect()).collect();
    for (j, col) in columns.iter().enumerate() {
        let ks = ks_one_sample(col, |v| (2.0 * v - 1.0).clamp(0.0, 1.0));
        table.push(
            ctx.row(&format!("companion_v{}_ks", j + 1), ks, samples).bound(ctx.thr.ks_strict).pass(ks < ctx.thr.ks_strict),
        );
    }
    let mut worst: f64 = 0.0;
    for a in 0..UNIFORM_COMPANIONS {
        for b in a + 1..UNIFORM_COMPANIONS {
            worst = worst.max(pearson(&columns[a], &columns[b]).abs());
        }
    }
    table.push(ctx.row("companion_max_abs_correlation", worst, samples).bound(ctx.thr.correlation).pass(worst < ctx.thr.correlation));
    Ok(())
}

fn q_domination(ctx: &Ctx, table: &mut TrialTable) -> Result<()> {
    let samples = ctx.sizes.q_flow_samples;
    let stream = ctx.stream(11, 0);
    let (depth, width) = (ctx.sizes.q_depth, ctx.sizes.q_width);
    let reports = ctx.pool.try_map(samples, |i| -> Result<(usize, usize)> {
        let mut flow = LimitFlowSample::new(Model::Ua, derive_seed(stream, i))?;
        let r = check_q_domination(&mut flow, depth, width)?;
        Ok((r.nodes_checked, r.violations + r.rearrangement_violations))
    })?;
    let nodes: usize = reports.iter().map(|r| r.0).sum();
    let violations: usize = reports.iter().map(|r| r.1).sum();
    table.push(ctx.row("q_domination_nodes", nodes as f64, samples).model(Model::Ua));
    table.push(ctx.row("q_domination_violations", violations as f64, samples).model(Model::Ua).bound(0.0).pass(violations == 0));
    Ok(())
}

fn dirichlet_rearrangement(ctx: &Ctx, d: usize, table: &mut TrialTable) -> Result<()> {
    let samples = ctx.sizes.rearrangement_samples;
    let rearranger = DirichletRearranger::new(d)?;
    let stream = ctx.stream(12, d as u64);
    let draws = ctx.pool.map(samples, |i| {
        let s = rearranger.sample(&mut trial_rng(stream, i));
        (s.result.violations.len(), s.result.companions.iter().map(|&w| w == SMALL_W).collect::<Vec<bool>>())
    });
    let violations: usize = draws.iter().map(|s| s.0).sum();
    table.push(
        ctx.row("dirichlet_rearrangement_violations", violations as f64, samples)
            .d(d as u32)
            .bound(0.0)
            .pass(violations == 0),
    );
    let sigma = (samples as f64 * 0.25).sqrt();
    for j in 0..d.saturating_sub(2) {
        let small = draws.iter().filter(|s| s.1[j]).count() as f64;
        let freq = small / samples as f64;
        table.push(
            ctx.row(&format!("w{}_small_frequency", j + 1), freq, samples)
                .d(d as u32)
                .stderr(sigma / samples as f64)
                .bound(0.5)
                .pass((small - samples as f64 / 2.0).abs() <= ctx.thr.sigmas * sigma),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            seed: 3,
            dist: DistSizes {
                stick_break_samples: 2000,
                stick_break_dims: vec![2, 4],
                urn_draws: 200,
                moment_trials: 300,
                moment_steps: 200,
                moment_dims: vec![2],
                uniform_trials: 500,
                uniform_n: 200,
                max_moment_samples_ua: 5000,
                max_moment_samples_regular: 2000,
                max_moment_dims: vec![2, 5],
                geometric_samples: 5000,
                rearrangement_samples: 2000,
                rearrangement_dims: vec![3, 6],
                q_flow_samples: 200,
                q_depth: 2,
                q_width: 3,
            },
            thresholds: Thresholds { ks: 0.1, ks_strict: 0.1, relative: 0.1, correlation: 0.1, ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn suite_runs_and_is_worker_independent() {
        let cfg = small_config();
        let a = run_dist_suite(&cfg, &WorkerPool::new(Some(1)).unwrap()).unwrap();
        let b = run_dist_suite(&cfg, &WorkerPool::new(Some(3)).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.iter().filter(|r| r.pass.is_some()).all(|r| r.bound.is_some()));
        let names: Vec<&str> = a.rows.iter().map(|r| r.statistic.as_str()).collect();
        for expected in ["stick_break_vs_urn_ks", "q_domination_violations", "w4_small_frequency", "beta_conditional_tail_max"] {
            assert!(names.contains(&expected), "missing {expected}");
        }
        let failed: Vec<&TrialRow> = a.rows.iter().filter(|r| r.pass == Some(false)).collect();
        assert!(failed.is_empty(), "{failed:?}");
    }
}
