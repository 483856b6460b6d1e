//! Preflows on the Ulam–Harris tree and exact enumeration of
//! `E_x(f) = {u : x · Π_{∅ ≺ v ⪯ u} f(v)/2 ≥ 1}`.
//!
//! Every factor `f(v)/2` is at most `1/2`, so the running product is
//! decreasing along any path; the search stops descending as soon as it
//! drops below one. Within a sibling scan, a preflow supplies an upper bound
//! on every child not yet visited, which ends the scan early.

mod partitions;

pub use partitions::{erdos_bound, erdos_certificate, partition_count, partition_counts_upto, ErdosCertificate};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tree::PlaneTree;
use crate::word::Word;

pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// Slack in log space on the membership test, absorbing rounding when the
/// product lands exactly on 1 (e.g. `γ_2` at powers of two).
pub const LOG_TOLERANCE: f64 = 1e-9;

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PreflowKind {
    Gamma { alpha: f64 },
    DaryExplicit { d: u32 },
    RandomUa,
    RandomUaRegular { d: u32 },
}

/// Sequential access to the children of one node.
pub trait ChildScan {
    /// Log value of the next child, or `None` once no later child can be
    /// positive.
    fn next_log(&mut self) -> Option<f64>;

    /// Upper bound on the log value of every child not yet returned.
    fn log_tail_bound(&self) -> f64;
}

/// A map `f` from words to `[0, 1]` with `f(∅) = 1` and
/// `Σ_j f(u*j) <= f(u)`, evaluated lazily one sibling scan at a time.
pub trait Preflow {
    type Scan: ChildScan;

    /// Starts the scan over the children of `parent`, whose log value is
    /// `log_value`.
    fn scan(&mut self, parent: &Word, log_value: f64) -> Self::Scan;

    fn kind(&self) -> PreflowKind;
}

/// The geometric flow `γ_α(u) = α^{-Σ(u_i - 1)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaFlow {
    alpha: f64,
    ln_alpha: f64,
}

impl GammaFlow {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(invalid(format!("alpha must lie in (1, 2], got {alpha}")));
        }
        Ok(GammaFlow { alpha, ln_alpha: alpha.ln() })
    }

    /// The flow used for `d`-ary preflows, `α = d^{1/(d-1)}`.
    pub fn for_arity(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(invalid("arity must be at least 2"));
        }
        Self::new((d as f64).powf(1.0 / (d as f64 - 1.0)))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn log_value(&self, w: &Word) -> f64 {
        let excess: u64 = w.letters().iter().map(|&l| u64::from(l - 1)).sum();
        -(excess as f64) * self.ln_alpha
    }

    pub fn value(&self, w: &Word) -> f64 {
        self.log_value(w).exp()
    }
}

/// `γ_α(w)`.
pub fn gamma_value(alpha: f64, w: &Word) -> Result<f64> {
    Ok(GammaFlow::new(alpha)?.value(w))
}

pub struct GammaScan {
    next: f64,
    ln_alpha: f64,
}

impl ChildScan for GammaScan {
    fn next_log(&mut self) -> Option<f64> {
        let v = self.next;
        self.next -= self.ln_alpha;
        Some(v)
    }

    fn log_tail_bound(&self) -> f64 {
        self.next
    }
}

impl Preflow for GammaFlow {
    type Scan = GammaScan;

    fn scan(&mut self, _parent: &Word, log_value: f64) -> GammaScan {
        GammaScan { next: log_value, ln_alpha: self.ln_alpha }
    }

    fn kind(&self) -> PreflowKind {
        PreflowKind::Gamma { alpha: self.alpha }
    }
}

/// A `d`-ary preflow given by a closure over words.
pub struct ExplicitPreflow<F> {
    d: u32,
    value: F,
}

impl<F: FnMut(&Word) -> f64> ExplicitPreflow<F> {
    pub fn new(d: u32, value: F) -> Self {
        ExplicitPreflow { d, value }
    }

    pub fn arity(&self) -> u32 {
        self.d
    }

    pub fn value(&mut self, w: &Word) -> f64 {
        (self.value)(w)
    }
}

/// Children of one node, precomputed.
pub struct ListScan {
    logs: Vec<f64>,
    pos: usize,
}

impl ListScan {
    pub fn new(logs: Vec<f64>) -> Self {
        ListScan { logs, pos: 0 }
    }
}

impl ChildScan for ListScan {
    fn next_log(&mut self) -> Option<f64> {
        let v = self.logs.get(self.pos).copied();
        self.pos += 1;
        v
    }

    fn log_tail_bound(&self) -> f64 {
        self.logs[self.pos.min(self.logs.len())..].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl<F: FnMut(&Word) -> f64> Preflow for ExplicitPreflow<F> {
    type Scan = ListScan;

    fn scan(&mut self, parent: &Word, _log_value: f64) -> ListScan {
        let logs = (1..=self.d).map(|j| (self.value)(&parent.child(j)).ln()).collect();
        ListScan::new(logs)
    }

    fn kind(&self) -> PreflowKind {
        PreflowKind::DaryExplicit { d: self.d }
    }
}

/// `E_x(f)` in depth-first preorder.
pub fn enumerate_small_ratio_set<P: Preflow>(f: &mut P, x: f64, budget: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    walk_small_ratio_set(f, x, budget, |w| out.push(w.clone()))?;
    Ok(out)
}

/// `N_x(f) = |E_x(f)|`.
pub fn count_small_ratio_set<P: Preflow>(f: &mut P, x: f64, budget: usize) -> Result<usize> {
    walk_small_ratio_set(f, x, budget, |_| {})
}

/// Visits every word of `E_x(f)` and returns how many there were.
pub fn walk_small_ratio_set<P, V>(f: &mut P, x: f64, budget: usize, mut visit: V) -> Result<usize>
where
    P: Preflow,
    V: FnMut(&Word),
{
    if x < 1.0 || !x.is_finite() {
        return Err(invalid(format!("x must be a finite number >= 1, got {x}")));
    }
    let mut word = Word::root();
    let mut count = 0usize;
    visit(&word);
    count += 1;
    if count > budget {
        return Err(Error::BudgetExceeded { budget, partial: count });
    }
    descend(f, &mut word, x.ln(), 0.0, budget, &mut count, &mut visit)?;
    Ok(count)
}

fn descend<P, V>(
    f: &mut P,
    word: &mut Word,
    log_running: f64,
    log_value: f64,
    budget: usize,
    count: &mut usize,
    visit: &mut V,
) -> Result<()>
where
    P: Preflow,
    V: FnMut(&Word),
{
    let mut scan = f.scan(word, log_value);
    let mut j = 1u32;
    loop {
        if log_running + scan.log_tail_bound() - LN_2 < -LOG_TOLERANCE {
            break;
        }
        let Some(child_log) = scan.next_log() else { break };
        let child_running = log_running + child_log - LN_2;
        if child_running >= -LOG_TOLERANCE {
            word.push(j);
            visit(word);
            *count += 1;
            if *count > budget {
                word.pop();
                return Err(Error::BudgetExceeded { budget, partial: *count });
            }
            let r = descend(f, word, child_running, child_log, budget, count, visit);
            word.pop();
            r?;
        }
        j += 1;
    }
    Ok(())
}

/// Exact `N_x(γ_α)` next to `(n+1)^2 exp(π √(2n/3))`, `n = ⌊log_α x⌋`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountCertificate {
    pub x: f64,
    pub alpha: f64,
    pub n: u64,
    pub exact_count: usize,
    pub bound: f64,
    pub pass: bool,
}

/// `⌊log_α x⌋`, nudged so exact powers are not lost to rounding.
pub fn floor_log(alpha: f64, x: f64) -> u64 {
    (x.ln() / alpha.ln() + 1e-9).floor().max(0.0) as u64
}

pub fn count_bound(n: u64) -> f64 {
    let nf = n as f64;
    (nf + 1.0).powi(2) * (std::f64::consts::PI * (2.0 * nf / 3.0).sqrt()).exp()
}

pub fn certified_nx_bound(alpha: f64, x: f64) -> Result<CountCertificate> {
    certified_nx_bound_with(alpha, x, DEFAULT_NODE_BUDGET)
}

pub fn certified_nx_bound_with(alpha: f64, x: f64, budget: usize) -> Result<CountCertificate> {
    let mut flow = GammaFlow::new(alpha)?;
    let exact_count = count_small_ratio_set(&mut flow, x, budget)?;
    let n = floor_log(alpha, x);
    let bound = count_bound(n);
    Ok(CountCertificate { x, alpha, n, exact_count, bound, pass: exact_count as f64 <= bound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub d: u32,
    pub alpha: f64,
    pub checked: usize,
    pub pass: bool,
    /// First sorted word where the preflow exceeded `γ`, with both values.
    pub witness: Option<(Word, f64, f64)>,
}

/// Sorts the children of every node of a `d`-ary preflow in decreasing
/// order and checks the result against `γ_{d^{1/(d-1)}}` on all words of
/// height at most `probe_depth`.
pub fn dary_domination_check<F>(mut p: F, d: u32, probe_depth: usize) -> Result<DominationReport>
where
    F: FnMut(&Word) -> f64,
{
    let gamma = GammaFlow::for_arity(d)?;
    let ln_alpha = gamma.alpha().ln();
    let mut report = DominationReport { d, alpha: gamma.alpha(), checked: 1, pass: true, witness: None };
    let root_value = p(&Word::root());
    if root_value > 1.0 * (1.0 + 1e-12) {
        report.pass = false;
        report.witness = Some((Word::root(), root_value, 1.0));
        return Ok(report);
    }
    let mut stack = vec![(Word::root(), Word::root(), root_value, 0.0f64)];
    while let Some((orig, sorted, value, log_gamma)) = stack.pop() {
        if sorted.height() >= probe_depth || value <= 0.0 {
            continue;
        }
        let extra = p(&orig.child(d + 1));
        if extra != 0.0 {
            return Err(Error::NotDary { d, word: orig.child(d + 1).to_string() });
        }
        let mut kids: Vec<(f64, u32)> = (1..=d).map(|j| (p(&orig.child(j)), j)).collect();
        kids.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for (k, &(v, j)) in kids.iter().enumerate() {
            let rank = k as u32 + 1;
            let lg = log_gamma - f64::from(rank - 1) * ln_alpha;
            let g = lg.exp();
            report.checked += 1;
            let sorted_child = sorted.child(rank);
            if v > g * (1.0 + 1e-12) {
                report.pass = false;
                report.witness = Some((sorted_child, v, g));
                return Ok(report);
            }
            stack.push((orig.child(j), sorted_child, v, lg));
        }
    }
    Ok(report)
}

/// The child-proportion preflow `v ↦ |θ_{u*v} t| / |θ_u t|` of the subtree
/// at `u` (zero off the tree).
pub fn subtree_proportions(t: &PlaneTree, u: usize) -> impl FnMut(&Word) -> f64 + '_ {
    let base = t.subtree_size(u) as f64;
    move |w: &Word| {
        let mut v = u;
        for &j in w.letters() {
            match t.children(v).get(j as usize - 1) {
                Some(&c) => v = c as usize,
                None => return 0.0,
            }
        }
        t.subtree_size(v) as f64 / base
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: &[u32]) -> Word {
        Word::from_slice(l)
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_value(1.5, &Word::root()).unwrap(), 1.0);
        assert!((gamma_value(2.0, &w(&[2, 1])).unwrap() - 0.5).abs() < 1e-15);
        assert!((gamma_value(4.0 / 3.0, &w(&[3])).unwrap() - 0.5625).abs() < 1e-15);
        assert!(gamma_value(1.0, &Word::root()).is_err());
        assert!(gamma_value(2.5, &Word::root()).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let mut g = GammaFlow::new(2.0).unwrap();
        assert_eq!(enumerate_small_ratio_set(&mut g, 1.0, 100).unwrap(), vec![Word::root()]);
        let mut set = enumerate_small_ratio_set(&mut g, 4.0, 100).unwrap();
        set.sort();
        assert_eq!(set, vec![w(&[]), w(&[1]), w(&[1, 1]), w(&[2])]);
        assert!(enumerate_small_ratio_set(&mut g, 0.5, 100).is_err());
        for alpha in [1.1, 4.0 / 3.0, 1.7, 2.0] {
            let mut g = GammaFlow::new(alpha).unwrap();
            assert_eq!(count_small_ratio_set(&mut g, 1.0, 10).unwrap(), 1);
        }
    }

    #[test]
    fn budget_overflow_carries_partial_count() {
        let mut g = GammaFlow::new(4.0 / 3.0).unwrap();
        match count_small_ratio_set(&mut g, 1e4, 50) {
            Err(Error::BudgetExceeded { budget: 50, partial }) => assert_eq!(partial, 51),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn certificate_examples() {
        let c = certified_nx_bound(2.0, 4.0).unwrap();
        assert_eq!((c.exact_count, c.n), (4, 2));
        let expected = 9.0 * (std::f64::consts::PI * (4.0f64 / 3.0).sqrt()).exp();
        assert!((c.bound - expected).abs() < 1e-9);
        assert!((c.bound - 338.6).abs() < 0.1);
        assert!(c.pass);
        let c = certified_nx_bound(2.0, 1.0).unwrap();
        assert_eq!((c.exact_count, c.n, c.bound), (1, 0, 1.0));
        assert!(c.pass);
        let c = certified_nx_bound(4.0 / 3.0, 100.0).unwrap();
        assert_eq!(c.n, 16);
        assert!(c.pass);
    }

    #[test]
    fn domination_examples() {
        let halves = |w: &Word| {
            if w.letters().iter().any(|&l| l > 2) {
                0.0
            } else {
                0.5f64.powi(w.height() as i32)
            }
        };
        let r = dary_domination_check(halves, 2, 8).unwrap();
        assert!(r.pass);
        assert_eq!(r.checked, (1 << 9) - 1);
        let thirds = |w: &Word| {
            if w.letters().iter().any(|&l| l > 3) {
                0.0
            } else {
                (1.0f64 / 3.0).powi(w.height() as i32)
            }
        };
        assert!(dary_domination_check(thirds, 3, 5).unwrap().pass);
        assert!(matches!(dary_domination_check(thirds, 2, 3), Err(Error::NotDary { .. })));
        // Total child mass 1.02 is not a preflow; the third sorted child
        // exceeds γ((3)) = 1/3.
        let bad = |w: &Word| match w.letters() {
            [] => 1.0,
            [1] => 0.34,
            [2] => 0.34,
            [3] => 0.34,
            [..] => 0.0,
        };
        let r = dary_domination_check(bad, 3, 2).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witness.unwrap().0, w(&[3]));
    }
}
