use rand::Rng;
use rootfind_core::growth::{polya_urn, Model};
use rootfind_core::limits::{
    check_q_domination, rearrange_uniform, sample_dirichlet_sym, stick_break_dirichlet, stick_break_factors,
    stick_break_with, DirichletRearranger, LimitFlowSample, SMALL_W,
};
use rootfind_core::rng::{derive_seed, rng_from_seed};
use rootfind_core::stats::{ks_one_sample, ks_two_sample, pearson};

/// Two-sample KS critical value at level 0.001.
fn ks_critical(n: usize, m: usize) -> f64 {
    let c = (-(0.0005f64).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n * m) as f64).sqrt()
}

#[test]
fn urn_with_unit_replacement_has_uniform_limit() {
    let fractions: Vec<f64> = (0..10_000u64)
        .map(|i| polya_urn(&[1, 1], 1, 100_000, derive_seed(1, i), None).unwrap()[0].fractions()[0])
        .collect();
    let ks = ks_one_sample(&fractions, |x| x.clamp(0.0, 1.0));
    assert!(ks < 0.01, "KS {ks}");
}

#[test]
fn urn_with_double_replacement_matches_arcsine() {
    let n = 10_000;
    let urn: Vec<f64> = (0..n as u64)
        .map(|i| polya_urn(&[1, 1], 2, 20_000, derive_seed(2, i), None).unwrap()[0].fractions()[0])
        .collect();
    let dir: Vec<f64> = (0..n as u64).map(|i| sample_dirichlet_sym(2, 0.5, derive_seed(3, i)).unwrap()[0]).collect();
    let ks = ks_two_sample(&urn, &dir);
    assert!(ks < ks_critical(n, n), "KS {ks}");
    // The arcsine CDF is an independent reference for both.
    let arcsine = |x: f64| 2.0 / std::f64::consts::PI * x.clamp(0.0, 1.0).sqrt().asin();
    assert!(ks_one_sample(&dir, arcsine) < 0.02);
}

#[test]
fn urn_keeps_ball_count() {
    let states = polya_urn(&[2, 3, 1], 4, 1000, 9, Some(100)).unwrap();
    assert_eq!(states.len(), 10);
    for (i, s) in states.iter().enumerate() {
        assert_eq!(s.draws_so_far, 100 * (i as u64 + 1));
        assert_eq!(s.total(), 6 + 4 * s.draws_so_far);
    }
    assert_eq!(polya_urn(&[1, 1], 1, 0, 0, None).unwrap()[0].counts, vec![1, 1]);
    assert!(polya_urn(&[], 1, 10, 0, None).is_err());
}

#[test]
fn two_dimensional_stick_break() {
    let mut rng = rng_from_seed(4);
    let factors = stick_break_factors(2).unwrap();
    let mut xs = Vec::new();
    let mut out = Vec::new();
    for _ in 0..50_000 {
        let sb = stick_break_with(&factors, &mut rng);
        xs.push(sb.x[0]);
        out.push(sb.vector[0]);
        assert!((sb.vector.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    // X_1 ~ Beta(2, 1) has CDF x².
    assert!(ks_one_sample(&xs, |x| x * x) < 0.01);
    assert!(ks_one_sample(&out, |x| x) < 0.01);
}

#[test]
fn stick_break_components_sum_to_one() {
    for d in 2..12 {
        for seed in 0..100 {
            let v = stick_break_dirichlet(d, seed).unwrap();
            assert_eq!(v.len(), d);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(v.iter().all(|&c| c > 0.0));
        }
    }
    assert!(stick_break_dirichlet(1, 0).is_err());
}

#[test]
fn uniform_rearrangement_statistics() {
    let mut rng = rng_from_seed(5);
    let samples = 100_000;
    let mut vs: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(samples)).collect();
    for _ in 0..samples {
        let mut us: Vec<f64> = Vec::new();
        loop {
            let u: f64 = rng.random();
            us.push(u);
            if u > 0.5 && us.len() >= 6 {
                break;
            }
        }
        let horizon = us.len();
        let r = rearrange_uniform(&us, horizon).unwrap();
        assert!(r.violations.is_empty());
        for (i, v) in vs.iter_mut().enumerate() {
            v.push(r.companions[i]);
        }
    }
    for v in &vs {
        let ks = ks_one_sample(v, |x| (2.0 * x - 1.0).clamp(0.0, 1.0));
        assert!(ks < 0.01, "KS {ks}");
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let rho = pearson(&vs[i], &vs[j]);
            assert!(rho.abs() < 0.01, "rho({i},{j}) = {rho}");
        }
    }
}

#[test]
fn dirichlet_rearrangement_statistics() {
    for d in [3usize, 6, 10] {
        let r = DirichletRearranger::new(d).unwrap();
        let mut rng = rng_from_seed(6 + d as u64);
        let samples = 40_000;
        let mut small = vec![0u64; d - 2];
        for _ in 0..samples {
            let s = r.sample(&mut rng);
            assert!(s.result.violations.is_empty());
            for (i, &w) in s.result.companions.iter().enumerate() {
                assert!(w == SMALL_W || w == 1.0);
                if w == SMALL_W {
                    small[i] += 1;
                }
            }
        }
        let sigma = (samples as f64 * 0.25).sqrt();
        for &c in &small {
            assert!((c as f64 - samples as f64 / 2.0).abs() < 3.0 * sigma, "d {d}: {small:?}");
        }
    }
}

#[test]
fn q_flow_dominates_rearranged_ua_flow() {
    for seed in 0..200 {
        let mut flow = LimitFlowSample::new(Model::Ua, seed).unwrap();
        let report = check_q_domination(&mut flow, 3, 4).unwrap();
        assert_eq!(report.nodes_checked, 4 + 16 + 64);
        assert_eq!(report.violations, 0);
        assert_eq!(report.rearrangement_violations, 0);
    }
}
