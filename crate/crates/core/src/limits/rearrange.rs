//! Rearrangements that dominate sibling proportions by geometric products.
//!
//! For UA, a uniform stick-breaking sequence `P_i = U_i Π_{j<i}(1 - U_j)` is
//! reordered so that `P_{σ(i)} <= ½ Π_{j<=i-2} V_j` with i.i.d.
//! `V_j ~ Uniform[1/2, 1]`. For the regular model the same is done for a
//! `Dir_d(1/(d-1))` vector with companions `W_j ∈ {16/17, 1}`.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use super::dirichlet::{stick_break_factors, stick_break_with, StickFactor};
use super::quadrature::beta_conditional_tail;
use super::LimitFlowSample;
use crate::error::{invalid, Error, Result};
use crate::word::Word;

/// Relative slack on the per-sample inequality, covering the different
/// rounding of the two products being compared.
pub const INEQUALITY_SLACK: f64 = 1e-12;

pub const SMALL_W: f64 = 16.0 / 17.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RearrangementResult {
    /// One-based permutation prefix `σ(1), σ(2), ...`.
    pub sigma: Vec<usize>,
    /// `V_1, V_2, ...` or `W_1, W_2, ...`.
    pub companions: Vec<f64>,
    /// Pivot index `K`.
    pub pivot: usize,
    /// Indices `i` at which the domination inequality failed (empty when
    /// it holds everywhere).
    pub violations: Vec<usize>,
}

/// Indices `2 <= i <= sigma.len()` where `values[σ(i)] > ½ Π_{j<=i-2} c_j`.
fn check_domination(values: &[f64], sigma: &[usize], companions: &[f64]) -> Vec<usize> {
    let mut bad = Vec::new();
    let mut bound = 0.5;
    for i in 2..=sigma.len() {
        if i >= 3 {
            bound *= companions[i - 3];
        }
        if values[sigma[i - 1] - 1] > bound * (1.0 + INEQUALITY_SLACK) {
            bad.push(i);
        }
    }
    bad
}

/// `σ = (K, 1, ..., K-1, K+1, ..., len)`.
fn pivot_first(k: usize, len: usize) -> Vec<usize> {
    let mut sigma = Vec::with_capacity(len);
    sigma.push(k);
    sigma.extend((1..=len).filter(|&i| i != k));
    sigma
}

/// Rearranges the first `horizon` pieces of the uniform stick-breaking
/// sequence driven by `us`.
pub fn rearrange_uniform(us: &[f64], horizon: usize) -> Result<RearrangementResult> {
    if horizon < 2 {
        return Err(invalid("horizon must be at least 2"));
    }
    if us.len() < horizon {
        return Err(invalid(format!("need at least {horizon} values, got {}", us.len())));
    }
    if us.iter().any(|u| !(0.0..=1.0).contains(u)) {
        return Err(invalid("values must lie in [0, 1]"));
    }
    let k = us[..horizon].iter().position(|&u| u > 0.5).ok_or(Error::NoPivot { horizon })? + 1;
    let companions: Vec<f64> = (1..horizon)
        .map(|i| if i < k { 1.0 - us[i - 1] } else { 1.0 - us[i] / 2.0 })
        .collect();
    let sigma = pivot_first(k, horizon);
    let mut pieces = Vec::with_capacity(horizon);
    let mut remaining = 1.0;
    for &u in &us[..horizon] {
        pieces.push(u * remaining);
        remaining *= 1.0 - u;
    }
    let violations = check_domination(&pieces, &sigma, &companions);
    Ok(RearrangementResult { sigma, companions, pivot: k, violations })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletRearrangement {
    /// The sampled `Dir_d(1/(d-1))` vector.
    pub vector: Vec<f64>,
    /// Stick-breaking factors `X_1, ..., X_{d-1}`.
    pub factors: Vec<f64>,
    /// `σ` acts on indices of `vector`; companions are `W_1, ..., W_{d-2}`.
    pub result: RearrangementResult,
}

/// Samples `Dir_d(1/(d-1))` together with a rearrangement and companions
/// `W_i ∈ {16/17, 1}` that are i.i.d. fair coins.
///
/// `W_i` must dominate `1 - X` for one stick-breaking factor `X` (which one
/// depends on whether `i < K`). Value `16/17` is admissible exactly when
/// `X >= 1/17`; it is then taken with probability `1 / (2(1 - q))`, where `q`
/// is the probability that `X < 1/17` given what is known about `X`, so
/// that `P(W_i = 16/17) = 1/2` whatever happened before.
#[derive(Clone, Debug)]
pub struct DirichletRearranger {
    d: usize,
    factors: Vec<StickFactor>,
    /// `P(X_i < 1/17 | X_i <= 1/2)`, indexed by `i - 1`.
    q_conditional: Vec<f64>,
    /// `P(X_i < 1/17)`, indexed by `i - 1`.
    q_free: Vec<f64>,
}

impl DirichletRearranger {
    pub fn new(d: usize) -> Result<Self> {
        let factors = stick_break_factors(d)?;
        let dm1 = d as f64 - 1.0;
        let mut q_conditional = Vec::with_capacity(d - 1);
        let mut q_free = Vec::with_capacity(d - 1);
        for i in 1..d {
            let a = d as f64 / dm1;
            let b = 1.0 - (i as f64 - 1.0) / dm1;
            let q = beta_conditional_tail(a, b)?;
            if q > 0.5 {
                return Err(invalid(format!("conditional tail {q} exceeds 1/2 for a = {a}, b = {b}")));
            }
            q_conditional.push(q);
            q_free.push(q * beta_reg(a, b, 0.5));
        }
        Ok(DirichletRearranger { d, factors, q_conditional, q_free })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DirichletRearrangement {
        let d = self.d;
        let sb = stick_break_with(&self.factors, rng);
        let x = &sb.x;
        let k = x.iter().position(|&xi| xi > 0.5).map_or(d, |i| i + 1);
        let mut companions = Vec::with_capacity(d.saturating_sub(2));
        for i in 1..d.saturating_sub(1) {
            let (xv, q) = if i < k {
                (x[i - 1], self.q_conditional[i - 1])
            } else {
                (x[i], self.q_free[i])
            };
            let coin: f64 = rng.random();
            let w = if xv >= 1.0 / 17.0 && coin < 0.5 / (1.0 - q) { SMALL_W } else { 1.0 };
            companions.push(w);
        }
        // σ acts on stick-breaking order; translate to output coordinates.
        let mut position_of = vec![0usize; d];
        for (out_idx, &y_idx) in sb.perm.iter().enumerate() {
            position_of[y_idx] = out_idx + 1;
        }
        let sigma: Vec<usize> = pivot_first(k, d).into_iter().map(|m| position_of[m - 1]).collect();
        let violations = check_domination(&sb.vector, &sigma, &companions);
        DirichletRearrangement {
            vector: sb.vector,
            factors: sb.x,
            result: RearrangementResult { sigma, companions, pivot: k, violations },
        }
    }
}

pub fn rearrange_dirichlet(d: usize, seed: u64) -> Result<DirichletRearrangement> {
    Ok(DirichletRearranger::new(d)?.sample(&mut crate::rng::rng_from_seed(seed)))
}

/// `Q_w` from `Q_∅ = 1`, `Q_{u*1} = Q_u` and
/// `Q_{u*i} = Q_u · ½ · Π_{j<=i-2} V_{u*j}`.
pub fn q_flow_value(v_table: &HashMap<Word, f64>, w: &Word) -> Result<f64> {
    let mut q = 1.0;
    let mut prefix = Word::root();
    for &i in w.letters() {
        if i >= 2 {
            q *= 0.5;
            for j in 1..=i.saturating_sub(2) {
                let key = prefix.child(j);
                q *= *v_table.get(&key).ok_or_else(|| Error::MissingEntry(key.to_string()))?;
            }
        }
        prefix.push(i);
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QDominationReport {
    pub nodes_checked: usize,
    pub violations: usize,
    /// Violations of the per-node uniform rearrangement itself.
    pub rearrangement_violations: usize,
}

/// Builds the relabelling `σ` of the UA limit flow node by node and checks
/// `P_{σ(u)} <= Q_u` for every word `u` of height at most `depth` whose
/// letters are at most `width`.
pub fn check_q_domination(flow: &mut LimitFlowSample, depth: usize, width: usize) -> Result<QDominationReport> {
    if width < 1 {
        return Err(invalid("width must be at least 1"));
    }
    let mut v_table: HashMap<Word, f64> = HashMap::new();
    let mut report = QDominationReport { nodes_checked: 0, violations: 0, rearrangement_violations: 0 };
    // (word in Q coordinates, its image under σ, P at the image, Q value)
    let mut frontier = vec![(Word::root(), Word::root(), 1.0f64, 1.0f64)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (u, image, p_image, q_u) in frontier {
            let mut horizon = (width + 1).max(2);
            let rr = loop {
                let us = flow.uniforms(&image, horizon)?.to_vec();
                match rearrange_uniform(&us, horizon) {
                    Ok(r) => break r,
                    Err(Error::NoPivot { .. }) => horizon *= 2,
                    Err(e) => return Err(e),
                }
            };
            report.rearrangement_violations += rr.violations.len();
            for (j, &v) in rr.companions.iter().enumerate() {
                v_table.insert(u.child(j as u32 + 1), v);
            }
            let us = flow.uniforms(&image, horizon)?.to_vec();
            for i in 1..=width {
                let m = rr.sigma[i - 1];
                let p_child = p_image * us[m - 1] * us[..m - 1].iter().map(|x| 1.0 - x).product::<f64>();
                let child = u.child(i as u32);
                let q_child = q_flow_value(&v_table, &child)?;
                debug_assert!({
                    let direct = if i == 1 { q_u } else { q_u * 0.5 * rr.companions[..i - 2].iter().product::<f64>() };
                    (direct - q_child).abs() <= 1e-12 * q_child.max(1e-300)
                });
                report.nodes_checked += 1;
                if p_child > q_child * (1.0 + INEQUALITY_SLACK) {
                    report.violations += 1;
                }
                next.push((child, image.child(m as u32), p_child, q_child));
            }
        }
        frontier = next;
    }
    Ok(report)
}
