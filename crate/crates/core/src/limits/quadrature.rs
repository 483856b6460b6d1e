//! Adaptive Gauss–Kronrod quadrature and the conditional Beta tail
//! `P(X < 1/17 | X <= 1/2)`.

use crate::error::{invalid, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights at `XGK[1], XGK[3], XGK[5], XGK[7]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 60;

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// `∫_a^b f` to relative accuracy `rel_tol`, bisecting wherever the
/// Kronrod/Gauss discrepancy exceeds the interval's share of the budget.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (whole, _) = kronrod(&f, a, b);
    let target = (rel_tol * whole.abs()).max(f64::MIN_POSITIVE);
    refine(&f, a, b, target / (b - a), 0)
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, density: f64, depth: u32) -> f64 {
    let (est, err) = kronrod(f, a, b);
    if err <= density * (b - a) || depth >= MAX_DEPTH {
        return est;
    }
    let m = 0.5 * (a + b);
    refine(f, a, m, density, depth + 1) + refine(f, m, b, density, depth + 1)
}

/// Unnormalised `∫_0^c x^{a-1}(1-x)^{b-1} dx` for `c <= 1/2`. The
/// substitution `x = c t^{1/a}` absorbs the `x^{a-1}` factor at the origin.
fn beta_partial_integral(a: f64, b: f64, c: f64, rel_tol: f64) -> f64 {
    let inv_a = 1.0 / a;
    let integrand = move |t: f64| (1.0 - c * t.powf(inv_a)).powf(b - 1.0);
    c.powf(a) * inv_a * integrate(integrand, 0.0, 1.0, rel_tol)
}

/// `P(X < 1/17 | X <= 1/2)` for `X ~ Beta(a, b)`, `a ∈ [1, 2]`, `b ∈ (0, 1]`.
pub fn beta_conditional_tail(a: f64, b: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&a) || !(b > 0.0 && b <= 1.0) {
        return Err(invalid(format!("need a in [1, 2] and b in (0, 1], got a = {a}, b = {b}")));
    }
    let rel_tol = 1e-12;
    let lower = beta_partial_integral(a, b, 1.0 / 17.0, rel_tol);
    let upper = beta_partial_integral(a, b, 0.5, rel_tol);
    Ok(lower / upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::beta::beta_reg;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} = 2.
        let v = integrate(|x: f64| if x > 0.0 { x.powf(-0.5) } else { 0.0 }, 0.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn closed_forms() {
        assert!((beta_conditional_tail(1.0, 1.0).unwrap() - 2.0 / 17.0).abs() < 1e-14);
        assert!((beta_conditional_tail(2.0, 1.0).unwrap() - 4.0 / 289.0).abs() < 1e-14);
        assert!(beta_conditional_tail(0.5, 1.0).is_err());
        assert!(beta_conditional_tail(1.5, 0.0).is_err());
        assert!(beta_conditional_tail(1.5, 1.2).is_err());
    }

    /// The regularized incomplete beta function (continued fraction) is an
    /// independent route to the same ratio.
    #[test]
    fn agrees_with_incomplete_beta() {
        for ai in 0..=10 {
            let a = 1.0 + ai as f64 / 10.0;
            for bi in 1..=20 {
                let b = bi as f64 * 0.05;
                let quad = beta_conditional_tail(a, b).unwrap();
                let reference = beta_reg(a, b, 1.0 / 17.0) / beta_reg(a, b, 0.5);
                assert!(((quad - reference) / reference).abs() < 1e-8, "a = {a}, b = {b}: {quad} vs {reference}");
            }
        }
    }
}
