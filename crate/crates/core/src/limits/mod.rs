//! Limit objects of the growth models.
//!
//! As `n → ∞` the proportion of `T_n` inside the subtree of a fixed node
//! converges. For UA the limit proportions of the children of `u` are
//! `P_{u*i} = P_u U_{u*i} Π_{j<i}(1 - U_{u*j})` with i.i.d. uniforms; for the
//! regular model each node splits its mass by an independent
//! `Dir_d(1/(d-1))` vector (`Dir_{d+1}` at the root).
//!
//! [`LimitFlowSample`] realises one such infinite random flow lazily: the
//! factors of node `u` come from a generator seeded by `(seed, u)`, so any
//! part of the flow can be evaluated in any order with identical results.

mod dirichlet;
mod phi_bound;
mod quadrature;
mod rearrange;

pub use dirichlet::{
    sample_dirichlet_sym, sample_dirichlet_sym_with, stick_break_dirichlet, stick_break_dirichlet_with,
    stick_break_factors, stick_break_with, StickBreak, StickFactor,
};
pub use phi_bound::{sample_branching_generation, sample_phi_limit_bound, PhiLimitSample, PhiLimitSampler};
pub use quadrature::{beta_conditional_tail, integrate};
pub use rearrange::{
    check_q_domination, q_flow_value, rearrange_dirichlet, rearrange_uniform, DirichletRearrangement,
    DirichletRearranger, QDominationReport, RearrangementResult, INEQUALITY_SLACK, SMALL_W,
};

use std::collections::HashMap;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::flows::{walk_small_ratio_set, ChildScan, ListScan, Preflow, PreflowKind};
use crate::growth::Model;
use crate::rng::{derive_seed_path, rng_from_seed, TrialRng};
use crate::word::Word;

struct NodeFactors {
    rng: TrialRng,
    values: Vec<f64>,
}

/// One realisation of a limit flow.
pub struct LimitFlowSample {
    model: Model,
    seed: u64,
    /// For the regular model: whether the root also splits by `Dir_d`
    /// (the flow seen from inside the subtree of a child of the root).
    shifted: bool,
    factors: Vec<StickFactor>,
    cache: HashMap<Word, NodeFactors>,
}

impl LimitFlowSample {
    /// The flow `P` of `model`.
    pub fn new(model: Model, seed: u64) -> Result<Self> {
        Self::build(model, seed, false)
    }

    /// For the regular model, `P' = (P_{1*u}/P_1)_u`: every node, the root
    /// included, splits by `Dir_d(1/(d-1))`. For UA this equals [`Self::new`].
    pub fn shifted(model: Model, seed: u64) -> Result<Self> {
        Self::build(model, seed, true)
    }

    fn build(model: Model, seed: u64, shifted: bool) -> Result<Self> {
        model.validate()?;
        let factors = match model {
            Model::Ua => Vec::new(),
            Model::UaRegular { d } => stick_break_factors(d as usize)?,
        };
        Ok(LimitFlowSample { model, seed, shifted, factors, cache: HashMap::new() })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    fn node_rng(&self, u: &Word) -> TrialRng {
        rng_from_seed(derive_seed_path(self.seed, u.letters()))
    }

    /// UA only: `U_{u*1}, ..., U_{u*m}`.
    pub fn uniforms(&mut self, u: &Word, m: usize) -> Result<&[f64]> {
        if self.model != Model::Ua {
            return Err(invalid("uniform factors exist only for the UA flow"));
        }
        if !self.cache.contains_key(u) {
            let rng = self.node_rng(u);
            self.cache.insert(u.clone(), NodeFactors { rng, values: Vec::new() });
        }
        let node = self.cache.get_mut(u).expect("inserted above");
        while node.values.len() < m {
            let v: f64 = node.rng.random();
            node.values.push(v);
        }
        Ok(&node.values[..m])
    }

    /// Regular model only: the proportions `D_{u*1}, ..., D_{u*k}`.
    pub fn split(&mut self, u: &Word) -> Result<&[f64]> {
        let Model::UaRegular { d } = self.model else {
            return Err(invalid("Dirichlet splits exist only for the regular flow"));
        };
        if !self.cache.contains_key(u) {
            let mut rng = self.node_rng(u);
            let values = regular_split(d, u.is_root() && !self.shifted, &self.factors, &mut rng);
            self.cache.insert(u.clone(), NodeFactors { rng, values });
        }
        Ok(&self.cache[u].values)
    }

    /// `P_w`.
    pub fn p_value(&mut self, w: &Word) -> Result<f64> {
        let mut p = 1.0;
        let mut prefix = Word::root();
        for &i in w.letters() {
            let i = i as usize;
            match self.model {
                Model::Ua => {
                    let us = self.uniforms(&prefix, i)?;
                    p *= us[i - 1] * us[..i - 1].iter().map(|u| 1.0 - u).product::<f64>();
                }
                Model::UaRegular { .. } => {
                    let split = self.split(&prefix)?;
                    p *= split.get(i - 1).copied().unwrap_or(0.0);
                }
            }
            prefix.push(i as u32);
        }
        Ok(p)
    }
}

fn regular_split<R: Rng + ?Sized>(d: u32, root: bool, factors: &[StickFactor], rng: &mut R) -> Vec<f64> {
    if root {
        sample_dirichlet_sym_with(d as usize + 1, 1.0 / (d as f64 - 1.0), rng).expect("d >= 2 validated")
    } else {
        stick_break_with(factors, rng).vector
    }
}

/// Lazily drawn children of one UA node.
pub struct UaScan {
    rng: TrialRng,
    log_remaining: f64,
}

impl ChildScan for UaScan {
    fn next_log(&mut self) -> Option<f64> {
        let u: f64 = self.rng.random();
        let v = self.log_remaining + u.ln();
        self.log_remaining += (1.0 - u).ln();
        Some(v)
    }

    fn log_tail_bound(&self) -> f64 {
        self.log_remaining
    }
}

pub enum FlowScan {
    Ua(UaScan),
    Regular(ListScan),
}

impl ChildScan for FlowScan {
    fn next_log(&mut self) -> Option<f64> {
        match self {
            FlowScan::Ua(s) => s.next_log(),
            FlowScan::Regular(s) => s.next_log(),
        }
    }

    fn log_tail_bound(&self) -> f64 {
        match self {
            FlowScan::Ua(s) => s.log_tail_bound(),
            FlowScan::Regular(s) => s.log_tail_bound(),
        }
    }
}

impl Preflow for LimitFlowSample {
    type Scan = FlowScan;

    fn scan(&mut self, parent: &Word, log_value: f64) -> FlowScan {
        let mut rng = self.node_rng(parent);
        match self.model {
            Model::Ua => FlowScan::Ua(UaScan { rng, log_remaining: log_value }),
            Model::UaRegular { d } => {
                let split = regular_split(d, parent.is_root() && !self.shifted, &self.factors, &mut rng);
                FlowScan::Regular(ListScan::new(split.into_iter().map(|s| log_value + s.ln()).collect()))
            }
        }
    }

    fn kind(&self) -> PreflowKind {
        match self.model {
            Model::Ua => PreflowKind::RandomUa,
            Model::UaRegular { d } => PreflowKind::RandomUaRegular { d },
        }
    }
}

/// `E_x` of one sampled limit flow: `P` for UA, `P'` for the regular model.
pub fn enumerate_ex_random_flow(model: Model, x: f64, seed: u64, budget: usize) -> Result<(usize, Vec<Word>)> {
    let mut flow = LimitFlowSample::shifted(model, seed)?;
    let mut words = Vec::new();
    let n = walk_small_ratio_set(&mut flow, x, budget, |w| words.push(w.clone()))?;
    Ok((n, words))
}

/// `N_x` of one sampled limit flow, without materialising the words.
pub fn count_ex_random_flow(model: Model, x: f64, seed: u64, budget: usize) -> Result<usize> {
    let mut flow = LimitFlowSample::shifted(model, seed)?;
    walk_small_ratio_set(&mut flow, x, budget, |_| {})
}
