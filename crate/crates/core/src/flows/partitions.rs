use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// `p(0), ..., p(s)` by the coin-change recurrence over part sizes.
pub fn partition_counts_upto(s: usize) -> Vec<BigUint> {
    let mut p = vec![BigUint::zero(); s + 1];
    p[0] = BigUint::one();
    for part in 1..=s {
        for total in part..=s {
            let add = p[total - part].clone();
            p[total] += add;
        }
    }
    p
}

/// Number of partitions of `s`.
pub fn partition_count(s: usize) -> BigUint {
    partition_counts_upto(s).pop().expect("vector has s + 1 entries")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErdosCertificate {
    pub s: usize,
    pub count: BigUint,
    /// `exp(π √(2s/3))`.
    pub bound: f64,
    pub pass: bool,
}

pub fn erdos_bound(s: usize) -> f64 {
    (std::f64::consts::PI * (2.0 * s as f64 / 3.0).sqrt()).exp()
}

pub fn erdos_certificate(s: usize) -> ErdosCertificate {
    let count = partition_count(s);
    let bound = erdos_bound(s);
    let pass = count.to_f64().is_some_and(|c| c <= bound);
    ErdosCertificate { s, count, bound, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts non-increasing sequences summing to `s` by explicit listing.
    fn brute_force(s: usize) -> u64 {
        fn go(remaining: usize, max_part: usize) -> u64 {
            if remaining == 0 {
                return 1;
            }
            (1..=max_part.min(remaining)).map(|first| go(remaining - first, first)).sum()
        }
        go(s, s)
    }

    #[test]
    fn small_values() {
        assert_eq!(partition_count(0), BigUint::from(1u32));
        assert_eq!(partition_count(1), BigUint::from(1u32));
        assert_eq!(partition_count(6), BigUint::from(11u32));
        assert_eq!(brute_force(6), 11);
    }

    #[test]
    fn matches_brute_force_to_forty() {
        let dp = partition_counts_upto(40);
        for (s, p) in dp.iter().enumerate() {
            assert_eq!(*p, BigUint::from(brute_force(s)), "s = {s}");
        }
    }

    #[test]
    fn certificate_examples() {
        let c = erdos_certificate(6);
        assert_eq!(c.count, BigUint::from(11u32));
        assert!((c.bound - (2.0 * std::f64::consts::PI).exp()).abs() < 1e-9);
        assert!((c.bound - 535.49).abs() < 0.01);
        assert!(c.pass);
        let c = erdos_certificate(1);
        assert!((c.bound - (std::f64::consts::PI * (2.0f64 / 3.0).sqrt()).exp()).abs() < 1e-12);
        assert!((c.bound - 13.002).abs() < 1e-3);
        assert!(c.pass);
        // p(50) = 204226 is a classical tabulated value.
        let c = erdos_certificate(50);
        assert_eq!(c.count, BigUint::from(204_226u32));
        assert!(c.pass);
    }
}
