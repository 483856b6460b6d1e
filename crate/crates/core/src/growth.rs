//! Seeded simulators for uniform attachment growth and a generic Pólya urn.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{rng_from_seed, trial_rng};
use crate::tree::PlaneTree;

/// Growth model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    /// Each step attaches a new node to a uniformly chosen existing node.
    Ua,
    /// Each step gives a uniformly chosen leaf `d` children; the initial tree
    /// is a root with `d + 1` children, so every internal node has degree
    /// `d + 1` in the graph view.
    UaRegular { d: u32 },
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Model::Ua => Ok(()),
            Model::UaRegular { d } if d >= 2 => Ok(()),
            Model::UaRegular { d } => Err(invalid(format!("regular model needs d >= 2, got {d}"))),
        }
    }

    /// Node count after `n` growth steps.
    pub fn node_count(&self, n: usize) -> usize {
        match *self {
            Model::Ua => n,
            Model::UaRegular { d } => d as usize * n + 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Model::Ua => "ua",
            Model::UaRegular { .. } => "ua_regular",
        }
    }

    pub fn degree(&self) -> Option<u32> {
        match *self {
            Model::Ua => None,
            Model::UaRegular { d } => Some(d),
        }
    }

    pub fn grow<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<PlaneTree> {
        match *self {
            Model::Ua => grow_ua_with(n, rng),
            Model::UaRegular { d } => grow_ua_regular_with(d, n, rng),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub model: Model,
    /// Number of growth steps.
    pub n: usize,
    pub seed: u64,
}

impl GrowthConfig {
    pub fn grow(&self) -> Result<PlaneTree> {
        self.model.grow(self.n, &mut rng_from_seed(self.seed))
    }

    /// Tree for trial `index` of a run seeded with `self.seed`.
    pub fn grow_trial(&self, index: u64) -> Result<PlaneTree> {
        self.model.grow(self.n, &mut trial_rng(self.seed, index))
    }
}

pub fn grow_ua(n: usize, seed: u64) -> Result<PlaneTree> {
    grow_ua_with(n, &mut rng_from_seed(seed))
}

pub fn grow_ua_regular(d: u32, n: usize, seed: u64) -> Result<PlaneTree> {
    grow_ua_regular_with(d, n, &mut rng_from_seed(seed))
}

/// `T_n` of the UA model: `T_1 = {∅}` and the node created at step `k`
/// becomes the next child of a uniformly chosen node among the first `k`.
pub fn grow_ua_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PlaneTree> {
    if n == 0 {
        return Err(invalid("UA growth needs n >= 1"));
    }
    if n > u32::MAX as usize - 1 {
        return Err(invalid("tree too large for 32-bit node ids"));
    }
    let mut parent = Vec::with_capacity(n);
    let mut rank = Vec::with_capacity(n);
    let mut kids = vec![0u32; n];
    parent.push(u32::MAX);
    rank.push(0);
    for id in 1..n {
        let p = rng.random_range(0..id);
        kids[p] += 1;
        parent.push(p as u32);
        rank.push(kids[p]);
    }
    Ok(PlaneTree::from_trusted(parent, rank))
}

/// `T_n` of the regular model: a root with `d + 1` children, then `n - 1`
/// steps that each pick a uniform leaf and give it children `1..=d`.
pub fn grow_ua_regular_with<R: Rng + ?Sized>(d: u32, n: usize, rng: &mut R) -> Result<PlaneTree> {
    if d < 2 {
        return Err(invalid(format!("regular model needs d >= 2, got {d}")));
    }
    if n == 0 {
        return Err(invalid("regular growth needs n >= 1"));
    }
    let total = (d as usize)
        .checked_mul(n)
        .and_then(|x| x.checked_add(2))
        .filter(|&x| x < u32::MAX as usize)
        .ok_or_else(|| invalid("tree too large for 32-bit node ids"))?;
    let mut parent = Vec::with_capacity(total);
    let mut rank = Vec::with_capacity(total);
    let mut leaves: Vec<u32> = Vec::with_capacity(total);
    parent.push(u32::MAX);
    rank.push(0);
    for j in 1..=d + 1 {
        leaves.push(parent.len() as u32);
        parent.push(0);
        rank.push(j);
    }
    for _ in 1..n {
        let idx = rng.random_range(0..leaves.len());
        let leaf = leaves.swap_remove(idx);
        for j in 1..=d {
            leaves.push(parent.len() as u32);
            parent.push(leaf);
            rank.push(j);
        }
    }
    debug_assert_eq!(parent.len(), total);
    Ok(PlaneTree::from_trusted(parent, rank))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrnState {
    pub counts: Vec<u64>,
    pub replacement: u64,
    pub draws_so_far: u64,
}

impl UrnState {
    pub fn new(initial: &[u64], replacement: u64) -> Result<Self> {
        if initial.is_empty() {
            return Err(invalid("urn needs at least one colour"));
        }
        if initial.contains(&0) {
            return Err(invalid("every colour needs at least one initial ball"));
        }
        if replacement == 0 {
            return Err(invalid("replacement must be at least 1"));
        }
        Ok(UrnState { counts: initial.to_vec(), replacement, draws_so_far: 0 })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Draws a ball proportionally to the counts, returns it together with
    /// `replacement` extra balls of its colour, and reports the colour.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let mut r = rng.random_range(0..self.total());
        let mut colour = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if r < c {
                colour = i;
                break;
            }
            r -= c;
        }
        self.counts[colour] += self.replacement;
        self.draws_so_far += 1;
        colour
    }

    pub fn fractions(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// Runs `draws` urn steps. When `thin` is `Some(k)` the state after every
/// `k`-th draw is recorded; the final state is always returned last.
pub fn polya_urn(
    initial: &[u64],
    replacement: u64,
    draws: u64,
    seed: u64,
    thin: Option<u64>,
) -> Result<Vec<UrnState>> {
    let mut state = UrnState::new(initial, replacement)?;
    if thin == Some(0) {
        return Err(invalid("thinning interval must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let mut trajectory = Vec::new();
    for step in 1..=draws {
        state.draw(&mut rng);
        if let Some(k) = thin {
            if step % k == 0 && step != draws {
                trajectory.push(state.clone());
            }
        }
    }
    trajectory.push(state);
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    #[test]
    fn ua_small_cases() {
        assert_eq!(grow_ua(1, 5).unwrap(), PlaneTree::singleton());
        for seed in 0..20 {
            let t = grow_ua(2, seed).unwrap();
            assert_eq!(t.word(1), Word::from_slice(&[1]));
        }
        let t = grow_ua(1000, 3).unwrap();
        assert_eq!(t.len(), 1000);
        assert!(grow_ua(0, 1).is_err());
    }

    #[test]
    fn regular_small_cases() {
        let t = grow_ua_regular(2, 1, 9).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.children(0).len(), 3);
        for seed in 0..20 {
            let t = grow_ua_regular(2, 2, seed).unwrap();
            assert_eq!((t.len(), t.leaf_count()), (6, 4));
        }
        let t = grow_ua_regular(3, 100, 1).unwrap();
        assert_eq!((t.len(), t.leaf_count()), (302, 202));
        assert!(grow_ua_regular(1, 5, 1).is_err());
        assert!(grow_ua_regular(2, 0, 1).is_err());
    }

    #[test]
    fn growth_is_deterministic() {
        assert_eq!(grow_ua(500, 42).unwrap(), grow_ua(500, 42).unwrap());
        assert_eq!(grow_ua_regular(4, 200, 42).unwrap(), grow_ua_regular(4, 200, 42).unwrap());
        assert_ne!(grow_ua(500, 42).unwrap(), grow_ua(500, 43).unwrap());
    }

    #[test]
    fn urn_bookkeeping() {
        let traj = polya_urn(&[1, 1], 1, 0, 0, None).unwrap();
        assert_eq!(traj.last().unwrap().counts, vec![1, 1]);
        let traj = polya_urn(&[2, 1, 3], 4, 1000, 7, Some(100)).unwrap();
        assert_eq!(traj.len(), 10);
        let last = traj.last().unwrap();
        assert_eq!(last.total(), 6 + 1000 * 4);
        assert_eq!(last.draws_so_far, 1000);
        assert!(polya_urn(&[], 1, 1, 0, None).is_err());
        assert!(polya_urn(&[1, 0], 1, 1, 0, None).is_err());
    }
}
