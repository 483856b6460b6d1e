//! Samplers for the almost-sure bound on the limiting competitive ratio and
//! for the geometric branching law used in the `N_x` tail argument.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dirichlet::{sample_dirichlet_sym_with, stick_break_factors, stick_break_with, StickFactor};
use crate::error::Result;
use crate::growth::Model;
use crate::rng::rng_from_seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiLimitSample {
    /// `log X` with `X = Π_{i<G} (1 - V_1⋯V_i)^{-1}`.
    pub log_x: f64,
    /// First `i` with `V_1⋯V_i <= 1/2`.
    pub g: usize,
}

/// Draws the largest sibling proportion along a root path.
#[derive(Clone, Debug)]
pub struct PhiLimitSampler {
    model: Model,
    factors: Vec<StickFactor>,
}

impl PhiLimitSampler {
    pub fn new(model: Model) -> Result<Self> {
        model.validate()?;
        let factors = match model {
            Model::Ua => Vec::new(),
            Model::UaRegular { d } => stick_break_factors(d as usize)?,
        };
        Ok(PhiLimitSampler { model, factors })
    }

    /// `V` at path step `step` (1-based). UA: `max(U, 1 - U)`. Regular: the
    /// largest component of `Dir_d(1/(d-1))`, or of `Dir_{d+1}(1/(d-1))` at
    /// the root.
    pub fn sample_v<R: Rng + ?Sized>(&self, step: usize, rng: &mut R) -> f64 {
        match self.model {
            Model::Ua => {
                let u: f64 = rng.random();
                u.max(1.0 - u)
            }
            Model::UaRegular { d } => {
                let v = if step == 1 {
                    sample_dirichlet_sym_with(d as usize + 1, 1.0 / (d as f64 - 1.0), rng)
                        .expect("parameters validated at construction")
                } else {
                    stick_break_with(&self.factors, rng).vector
                };
                v.into_iter().fold(0.0, f64::max)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhiLimitSample {
        let mut product = 1.0;
        let mut log_x = 0.0;
        let mut step = 1;
        loop {
            product *= self.sample_v(step, rng);
            if product <= 0.5 {
                return PhiLimitSample { log_x, g: step };
            }
            log_x -= (1.0 - product).ln();
            step += 1;
        }
    }
}

pub fn sample_phi_limit_bound(model: Model, seed: u64) -> Result<PhiLimitSample> {
    Ok(PhiLimitSampler::new(model)?.sample(&mut rng_from_seed(seed)))
}

/// Number of `Uniform[1/2, 1]` draws up to and including the first one at
/// most `3/4`; Geometric(1/2).
fn geometric_half<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    let mut k = 1;
    while rng.random_range(0.5..1.0) > 0.75 {
        k += 1;
    }
    k
}

/// Size of generation `r` of a branching process started from one
/// individual whose offspring counts are the gaps between successive
/// `V <= 3/4` events. The law is Geometric(2^{-r}).
pub fn sample_branching_generation<R: Rng + ?Sized>(r: u32, rng: &mut R) -> u64 {
    let mut size = 1u64;
    for _ in 0..r {
        size = (0..size).map(|_| geometric_half(rng)).sum();
    }
    size
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::chi_square_gof;

    #[test]
    fn samples_are_nonnegative() {
        let mut rng = rng_from_seed(8);
        for model in [Model::Ua, Model::UaRegular { d: 2 }, Model::UaRegular { d: 7 }] {
            let s = PhiLimitSampler::new(model).unwrap();
            for _ in 0..1000 {
                let p = s.sample(&mut rng);
                assert!(p.log_x >= 0.0 && p.g >= 1);
            }
        }
        assert!(PhiLimitSampler::new(Model::UaRegular { d: 1 }).is_err());
    }

    #[test]
    fn geometric_generation_law() {
        let mut rng = rng_from_seed(9);
        for r in 1..=3u32 {
            let p = 0.5f64.powi(r as i32);
            let bins = 12usize;
            let mut observed = vec![0u64; bins];
            for _ in 0..20_000 {
                let z = sample_branching_generation(r, &mut rng) as usize;
                observed[(z - 1).min(bins - 1)] += 1;
            }
            let mut probs: Vec<f64> = (1..bins).map(|i| p * (1.0 - p).powi(i as i32 - 1)).collect();
            probs.push((1.0 - p).powi(bins as i32 - 1));
            let (_, pv) = chi_square_gof(&observed, &probs).unwrap();
            assert!(pv > 0.001, "r = {r}, p-value {pv}");
        }
    }
}
