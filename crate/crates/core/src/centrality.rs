//! The centrality `φ_t(u) = Π_{v ≠ u} |(t, u)_{v↓}|` and the root-finding
//! rule that returns the `K` nodes of smallest `φ`.
//!
//! `φ` itself overflows any fixed-width type, so nodes are ranked by
//! `log(φ(u)/φ(∅))`, which telescopes along the ancestry of `u`: moving from
//! a parent to a child of subtree size `s` multiplies `φ` by `(|t| - s)/s`.
//! Near-ties in log space are settled with exact rational arithmetic on
//! trees up to a configurable size.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tree::PlaneTree;

pub const DEFAULT_EXACT_CAP: usize = 2000;
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOptions {
    /// Largest tree on which near-ties are resolved exactly.
    pub exact_cap: usize,
    /// Log ratios closer than this are treated as possibly equal.
    pub tie_tolerance: f64,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions { exact_cap: DEFAULT_EXACT_CAP, tie_tolerance: DEFAULT_TIE_TOLERANCE }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    /// Rank by `φ`.
    Phi,
    /// Rank by `φ'(u)`, the largest component left after deleting `u`.
    MaxSubtree,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralityReport {
    /// `log(φ(u)/φ(∅))` per node.
    pub log_ratio: Vec<f64>,
    /// All node ids, most central first.
    pub ranking: Vec<usize>,
    /// Root-to-centroid path followed by [`central_path_and_phi`].
    pub central_path: Vec<usize>,
    /// `log(φ(∅)/min φ)`.
    pub log_phi: f64,
}

impl CentralityReport {
    pub fn compute(t: &PlaneTree) -> Self {
        Self::compute_with(t, &RankOptions::default())
    }

    pub fn compute_with(t: &PlaneTree, opts: &RankOptions) -> Self {
        let log_ratio = log_phi_profile(t);
        let ranking = order_by_phi(t, &log_ratio, t.len(), opts);
        let (central_path, log_phi) = central_path_and_phi(t);
        CentralityReport { log_ratio, ranking, central_path, log_phi }
    }
}

/// `log(φ(u)/φ(∅))` for every node, accumulated in creation order.
pub fn log_phi_profile(t: &PlaneTree) -> Vec<f64> {
    let n = t.len();
    let total = n as f64;
    let sizes = t.subtree_sizes();
    let mut out = vec![0.0; n];
    for u in 1..n {
        let s = f64::from(sizes[u]);
        let p = t.parent(u).expect("non-root node has a parent");
        out[u] = out[p] + (total - s).ln() - s.ln();
    }
    out
}

/// `φ(∅)/φ(u)` as an exact fraction in lowest terms.
pub fn phi_ratio_exact(t: &PlaneTree, u: usize) -> Result<BigRational> {
    phi_ratio_exact_with(t, u, DEFAULT_EXACT_CAP)
}

pub fn phi_ratio_exact_with(t: &PlaneTree, u: usize, cap: usize) -> Result<BigRational> {
    if t.len() > cap {
        return Err(Error::ExactCapExceeded { size: t.len(), cap });
    }
    if u >= t.len() {
        return Err(invalid(format!("node {u} is not in a tree of {} nodes", t.len())));
    }
    let n = t.len() as u64;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    let mut v = u;
    while let Some(p) = t.parent(v) {
        let s = t.subtree_size(v) as u64;
        num *= s;
        den *= n - s;
        v = p;
    }
    Ok(BigRational::new(num, den))
}

/// The `k` most central nodes, most central first. Output for `k` is a
/// prefix of the output for `k + 1`.
pub fn select_roots(t: &PlaneTree, k: usize, method: RankMethod) -> Result<Vec<usize>> {
    select_roots_with(t, k, method, &RankOptions::default())
}

pub fn select_roots_with(t: &PlaneTree, k: usize, method: RankMethod, opts: &RankOptions) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let k = k.min(t.len());
    Ok(match method {
        RankMethod::Phi => order_by_phi(t, &log_phi_profile(t), k, opts),
        RankMethod::MaxSubtree => order_by_max_subtree(t, k),
    })
}

/// Full ranking by `φ`, most central first.
pub fn phi_ranking(t: &PlaneTree) -> Vec<usize> {
    order_by_phi(t, &log_phi_profile(t), t.len(), &RankOptions::default())
}

/// Ranking by `φ` decided purely with exact rational arithmetic, ties by id.
pub fn phi_ranking_exact(t: &PlaneTree) -> Result<Vec<usize>> {
    let ratios: Vec<BigRational> = (0..t.len()).map(|u| phi_ratio_exact(t, u)).collect::<Result<_>>()?;
    let mut ids: Vec<usize> = (0..t.len()).collect();
    ids.sort_by(|&a, &b| ratios[b].cmp(&ratios[a]).then(a.cmp(&b)));
    Ok(ids)
}

fn key_order(keys: &[f64], a: u32, b: u32) -> Ordering {
    keys[a as usize].total_cmp(&keys[b as usize]).then(a.cmp(&b))
}

/// First `k` nodes by `φ`. Sorting happens on log ratios; each run of
/// consecutive values within the tie tolerance is then re-sorted exactly
/// (or by id above the exact cap).
fn order_by_phi(t: &PlaneTree, log_ratio: &[f64], k: usize, opts: &RankOptions) -> Vec<usize> {
    let n = log_ratio.len();
    let mut candidates: Vec<u32> = (0..n as u32).collect();
    if k < n {
        candidates.select_nth_unstable_by(k - 1, |&a, &b| key_order(log_ratio, a, b));
        let mut rest = candidates.split_off(k);
        let mut threshold = log_ratio[candidates[k - 1] as usize];
        if let Some(m) = candidates.iter().map(|&c| log_ratio[c as usize]).max_by(f64::total_cmp) {
            threshold = threshold.max(m);
        }
        // Pull in everything chained to the cut by near-ties.
        loop {
            let before = rest.len();
            let mut moved_max = f64::NEG_INFINITY;
            rest.retain(|&c| {
                let v = log_ratio[c as usize];
                if v <= threshold + opts.tie_tolerance {
                    candidates.push(c);
                    moved_max = moved_max.max(v);
                    false
                } else {
                    true
                }
            });
            if rest.len() == before {
                break;
            }
            threshold = threshold.max(moved_max);
        }
    }
    candidates.sort_unstable_by(|&a, &b| key_order(log_ratio, a, b));
    resolve_near_ties(t, log_ratio, &mut candidates, opts);
    candidates.truncate(k);
    candidates.into_iter().map(|c| c as usize).collect()
}

fn resolve_near_ties(t: &PlaneTree, log_ratio: &[f64], sorted: &mut [u32], opts: &RankOptions) {
    let exact = t.len() <= opts.exact_cap;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len()
            && log_ratio[sorted[end] as usize] - log_ratio[sorted[end - 1] as usize] <= opts.tie_tolerance
        {
            end += 1;
        }
        if end - start > 1 {
            let run = &mut sorted[start..end];
            if exact {
                let mut keyed: Vec<(BigRational, u32)> = run
                    .iter()
                    .map(|&c| (phi_ratio_exact_with(t, c as usize, usize::MAX).expect("node in tree"), c))
                    .collect();
                // Larger φ(∅)/φ(u) means smaller φ(u).
                keyed.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
                for (slot, (_, c)) in run.iter_mut().zip(keyed) {
                    *slot = c;
                }
            } else {
                run.sort_unstable();
            }
        }
        start = end;
    }
}

/// `φ'(u)`: size of the largest component of `t` with `u` removed. One
/// bottom-up pass finds the largest child subtree, and the component above
/// `u` has size `|t| - |θ_u t|`.
pub fn max_subtree_profile(t: &PlaneTree) -> Vec<u32> {
    let n = t.len();
    let sizes = t.subtree_sizes();
    let mut best = vec![0u32; n];
    for u in (1..n).rev() {
        let p = t.parent(u).expect("non-root node has a parent");
        best[p] = best[p].max(sizes[u]);
    }
    for u in 1..n {
        best[u] = best[u].max(n as u32 - sizes[u]);
    }
    best
}

fn order_by_max_subtree(t: &PlaneTree, k: usize) -> Vec<usize> {
    let score = max_subtree_profile(t);
    let cmp = |a: &u32, b: &u32| score[*a as usize].cmp(&score[*b as usize]).then(a.cmp(b));
    let mut ids: Vec<u32> = (0..t.len() as u32).collect();
    if k < ids.len() {
        ids.select_nth_unstable_by(k - 1, cmp);
        ids.truncate(k);
    }
    ids.sort_unstable_by(cmp);
    ids.into_iter().map(|c| c as usize).collect()
}

/// Path from the root that repeatedly moves to the child holding at least
/// half of the tree, and `log Φ(t) = log(φ(∅)/φ(end of path))`.
pub fn central_path_and_phi(t: &PlaneTree) -> (Vec<usize>, f64) {
    let n = t.len();
    let total = n as f64;
    let mut path = vec![0usize];
    let mut log_phi = 0.0;
    let mut u = 0usize;
    while let Some(&c) = t.children(u).iter().find(|&&c| 2 * t.subtree_size(c as usize) >= n) {
        let s = t.subtree_size(c as usize) as f64;
        log_phi += s.ln() - (total - s).ln();
        u = c as usize;
        path.push(u);
    }
    (path, log_phi)
}

/// Nodes at least as central as the root: `φ(v) <= φ(∅)`.
pub fn competitor_count(t: &PlaneTree) -> Vec<usize> {
    competitor_count_with(t, &RankOptions::default())
}

pub fn competitor_count_with(t: &PlaneTree, opts: &RankOptions) -> Vec<usize> {
    let lr = log_phi_profile(t);
    let exact = t.len() <= opts.exact_cap;
    (0..t.len())
        .filter(|&v| {
            if lr[v].abs() > opts.tie_tolerance {
                lr[v] < 0.0
            } else if exact {
                phi_ratio_exact_with(t, v, usize::MAX).expect("node in tree") >= BigRational::one()
            } else {
                true
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;
    use num_bigint::BigInt;

    fn tree(words: &[&[u32]]) -> PlaneTree {
        let ws: Vec<Word> = words.iter().map(|l| Word::from_slice(l)).collect();
        PlaneTree::from_words(&ws).unwrap()
    }

    fn path3() -> PlaneTree {
        tree(&[&[], &[1], &[1, 1]])
    }

    fn star4() -> PlaneTree {
        tree(&[&[], &[1], &[2], &[3]])
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn profile_examples() {
        let lr = log_phi_profile(&path3());
        assert_eq!(lr[0], 0.0);
        assert!((lr[1] + 2f64.ln()).abs() < 1e-15);
        assert!(lr[2].abs() < 1e-15);
        let lr = log_phi_profile(&star4());
        for v in &lr[1..] {
            assert!((v - 3f64.ln()).abs() < 1e-15);
        }
        assert_eq!(log_phi_profile(&PlaneTree::singleton()), vec![0.0]);
    }

    #[test]
    fn select_examples() {
        assert_eq!(select_roots(&path3(), 1, RankMethod::Phi).unwrap(), vec![1]);
        // φ(∅) = φ((1,1)) exactly; the root wins the tie by id.
        assert_eq!(select_roots(&path3(), 3, RankMethod::Phi).unwrap(), vec![1, 0, 2]);
        assert_eq!(select_roots(&star4(), 10, RankMethod::Phi).unwrap().len(), 4);
        assert_eq!(select_roots(&star4(), 1, RankMethod::MaxSubtree).unwrap(), vec![0]);
        assert!(select_roots(&star4(), 0, RankMethod::Phi).is_err());
    }

    #[test]
    fn exact_examples() {
        let t = path3();
        assert_eq!(phi_ratio_exact(&t, 2).unwrap(), ratio(1, 1));
        assert_eq!(phi_ratio_exact(&t, 1).unwrap(), ratio(2, 1));
        assert_eq!(phi_ratio_exact(&t, 0).unwrap(), ratio(1, 1));
        assert!(matches!(phi_ratio_exact_with(&t, 0, 2), Err(Error::ExactCapExceeded { .. })));
    }

    #[test]
    fn central_path_examples() {
        let (path, lp) = central_path_and_phi(&path3());
        assert_eq!(path, vec![0, 1]);
        assert!((lp - 2f64.ln()).abs() < 1e-15);
        assert_eq!(central_path_and_phi(&star4()), (vec![0], 0.0));
        assert_eq!(central_path_and_phi(&PlaneTree::singleton()), (vec![0], 0.0));
    }

    #[test]
    fn competitor_examples() {
        assert_eq!(competitor_count(&star4()), vec![0]);
        assert_eq!(competitor_count(&path3()), vec![0, 1, 2]);
        assert_eq!(competitor_count(&PlaneTree::singleton()), vec![0]);
    }

    #[test]
    fn report_is_consistent() {
        let r = CentralityReport::compute(&path3());
        assert_eq!(r.ranking, vec![1, 0, 2]);
        assert!((r.log_phi - 2f64.ln()).abs() < 1e-15);
        assert_eq!(r.central_path, vec![0, 1]);
    }

    #[test]
    fn max_subtree_examples() {
        assert_eq!(max_subtree_profile(&star4()), vec![1, 3, 3, 3]);
        assert_eq!(max_subtree_profile(&path3()), vec![2, 1, 2]);
    }
}
