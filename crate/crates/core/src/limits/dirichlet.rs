//! Symmetric Dirichlet samplers.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{invalid, Result};
use crate::rng::rng_from_seed;

/// `Dir_k(α)` by normalising independent `Gamma(α, 1)` draws.
pub fn sample_dirichlet_sym_with<R: Rng + ?Sized>(k: usize, alpha: f64, rng: &mut R) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(invalid("Dirichlet dimension must be at least 2"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("Dirichlet parameter must be positive, got {alpha}")));
    }
    let gamma = Gamma::new(alpha, 1.0).map_err(|e| invalid(e.to_string()))?;
    loop {
        let g: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
        let total: f64 = g.iter().sum();
        if total > 0.0 && g.iter().all(|&v| v > 0.0) {
            return Ok(g.into_iter().map(|v| v / total).collect());
        }
    }
}

pub fn sample_dirichlet_sym(k: usize, alpha: f64, seed: u64) -> Result<Vec<f64>> {
    sample_dirichlet_sym_with(k, alpha, &mut rng_from_seed(seed))
}

/// One draw of the size-biased stick-breaking construction of
/// `Dir_d(1/(d-1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct StickBreak {
    /// `X_1, ..., X_{d-1}` with `X_i ~ Beta(d/(d-1), 1 - (i-1)/(d-1))`.
    pub x: Vec<f64>,
    /// `Y_i = X_i Π_{j<i}(1 - X_j)` and `Y_d = Π_{j<d}(1 - X_j)`.
    pub y: Vec<f64>,
    /// Zero-based uniform permutation `π`.
    pub perm: Vec<usize>,
    /// The output vector, component `k` equal to `Y_{π(k)}`.
    pub vector: Vec<f64>,
}

/// `X ~ Beta(a, b)` drawn as `G_a / (G_a + G_b)`. The complement
/// `G_b / (G_a + G_b)` is returned alongside, so `1 - X` keeps full relative
/// precision when `X` is within rounding of 1 (common for small `b`).
#[derive(Clone, Copy, Debug)]
pub struct StickFactor {
    a: Gamma<f64>,
    b: Gamma<f64>,
}

impl StickFactor {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let g = |shape: f64| Gamma::new(shape, 1.0).map_err(|e| invalid(e.to_string()));
        Ok(StickFactor { a: g(a)?, b: g(b)? })
    }

    /// `(X, 1 - X)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        loop {
            let ga = self.a.sample(rng);
            let gb = self.b.sample(rng);
            let total = ga + gb;
            if total > 0.0 {
                return (ga / total, gb / total);
            }
        }
    }
}

/// Laws of the stick-breaking factors for dimension `d`:
/// `X_i ~ Beta(d/(d-1), 1 - (i-1)/(d-1))`.
pub fn stick_break_factors(d: usize) -> Result<Vec<StickFactor>> {
    if d < 2 {
        return Err(invalid("stick-breaking needs d >= 2"));
    }
    let dm1 = d as f64 - 1.0;
    (1..d).map(|i| StickFactor::new(d as f64 / dm1, 1.0 - (i as f64 - 1.0) / dm1)).collect()
}

pub fn stick_break_with<R: Rng + ?Sized>(factors: &[StickFactor], rng: &mut R) -> StickBreak {
    let d = factors.len() + 1;
    let mut x = Vec::with_capacity(d - 1);
    let mut y = Vec::with_capacity(d);
    let mut remaining = 1.0;
    for factor in factors {
        let (xi, rest) = factor.sample(rng);
        x.push(xi);
        y.push(xi * remaining);
        remaining *= rest;
    }
    y.push(remaining);
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(rng);
    let vector = perm.iter().map(|&p| y[p]).collect();
    StickBreak { x, y, perm, vector }
}

/// `Dir_d(1/(d-1))` via stick-breaking.
pub fn stick_break_dirichlet_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Vec<f64>> {
    Ok(stick_break_with(&stick_break_factors(d)?, rng).vector)
}

pub fn stick_break_dirichlet(d: usize, seed: u64) -> Result<Vec<f64>> {
    stick_break_dirichlet_with(d, &mut rng_from_seed(seed))
}
