//! Fresnel integrals and the kernels built from them.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `C(x) = ∫₀ˣ cos(πt²/2) dt` and `S(x) = ∫₀ˣ sin(πt²/2) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FresnelPair {
    pub c: f64,
    pub s: f64,
}

impl FresnelPair {
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.c, self.s)
    }
}

/// Switch point between the power series and the continued fraction.
const SERIES_LIMIT: f64 = 1.6;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 200;

/// Fresnel integrals, absolute error below 1e-14 over the real line.
///
/// Power series for `|x| <= 1.6`; beyond that the complementary error
/// function of the complex argument is evaluated with a modified Lentz
/// continued fraction and combined with the `(1+j)/2` asymptote.
pub fn fresnel(x: f64) -> FresnelPair {
    if x.is_nan() {
        return FresnelPair { c: f64::NAN, s: f64::NAN };
    }
    if x.is_infinite() {
        let v = 0.5f64.copysign(x);
        return FresnelPair { c: v, s: v };
    }
    let ax = x.abs();
    let z = if ax <= SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    let sign = x.signum();
    FresnelPair {
        c: sign * z.re,
        s: sign * z.im,
    }
}

fn series(x: f64) -> Complex64 {
    // t_k = x (πx²/2)^k / k!; even k feed C, odd k feed S, alternating sign
    // within each.
    let w = FRAC_PI_2 * x * x;
    let mut term = x;
    let (mut c, mut s) = (x, 0.0);
    for k in 1..MAX_ITER {
        term *= w / k as f64;
        let contrib = term / (2 * k + 1) as f64;
        let negative = (k / 2) % 2 == 1;
        let signed = if negative { -contrib } else { contrib };
        if k % 2 == 0 {
            c += signed;
        } else {
            s += signed;
        }
        if contrib < EPS * c.abs().max(s.abs()) {
            break;
        }
    }
    Complex64::new(c, s)
}

fn continued_fraction(x: f64) -> Complex64 {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, -PI * x * x);
    let mut cc = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (d * a + b).inv();
        cc = b + a / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() <= EPS {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let phase = Complex64::from_polar(1.0, FRAC_PI_2 * x * x);
    Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - phase * h)
}

/// Dirichlet sinc `sin(αxπ/2) / sin(xπ/2)`, with the removable
/// singularities at even integers filled in by the limit `±α`.
///
/// The argument is reduced to the nearest even integer first, which keeps
/// the ratio well conditioned next to the singular points.
pub fn dirichlet_sinc(alpha: u64, x: f64) -> f64 {
    let k = (x / 2.0).round();
    let eps = x - 2.0 * k;
    // sin(αkπ + αεπ/2) / sin(kπ + επ/2) = (-1)^{k(α-1)} sin(αεπ/2)/sin(επ/2)
    let odd = ((k as i64).rem_euclid(2) == 1) && alpha.is_multiple_of(2);
    let sign = if odd { -1.0 } else { 1.0 };
    let a = alpha as f64;
    let half = eps * FRAC_PI_2;
    if half.abs() < 1e-9 {
        // sin(aθ)/sin(θ) ≈ a (1 - (a²-1)θ²/6)
        return sign * a * (1.0 - (a * a - 1.0) * half * half / 6.0);
    }
    sign * (a * half).sin() / half.sin()
}

/// `F(x) = (C(x) + jS(x)) / x`, with `F(0) = 1`.
pub fn f_kernel(x: f64) -> Complex64 {
    if x == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    fresnel(x).as_complex() / x
}

/// `G(β1, β2) = [Ĉ(β1, β2) + jŜ(β1, β2)] / (2β2)` where
/// `Ĉ = C(β1+β2) - C(β1-β2)` and likewise for `Ŝ`.
///
/// For a vanishing `β2` the divided difference is replaced by its Taylor
/// expansion `e^{jπβ1²/2} (1 + β2² (jπ - π²β1²) / 6)`.
pub fn g_kernel(beta1: f64, beta2: f64) -> Complex64 {
    if beta2.abs() < 1e-6 && (beta1 * beta2).abs() < 1e-3 {
        let lead = Complex64::from_polar(1.0, FRAC_PI_2 * beta1 * beta1);
        let corr = Complex64::new(-PI * PI * beta1 * beta1, PI) * (beta2 * beta2 / 6.0);
        return lead * (Complex64::new(1.0, 0.0) + corr);
    }
    let hi = fresnel(beta1 + beta2);
    let lo = fresnel(beta1 - beta2);
    Complex64::new(hi.c - lo.c, hi.s - lo.s) / (2.0 * beta2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresnel_at_zero_and_symmetry() {
        assert_eq!(fresnel(0.0), FresnelPair { c: 0.0, s: 0.0 });
        for x in [0.3, 1.59, 1.61, 2.5, 7.0, 31.0] {
            let p = fresnel(x);
            let n = fresnel(-x);
            assert_eq!(p.c, -n.c);
            assert_eq!(p.s, -n.s);
            assert!(p.c.abs() <= 0.9 && p.s.abs() <= 0.9);
        }
    }

    #[test]
    fn fresnel_reference_values() {
        // Abramowitz & Stegun table 7.7.
        let cases = [
            (0.5, 0.492_344_225_871_446_3, 0.064_732_432_859_999_29),
            (1.0, 0.779_893_400_376_822_8, 0.438_259_147_390_354_8),
            (2.0, 0.488_253_406_075_340_8, 0.343_415_678_363_698_2),
        ];
        for (x, c, s) in cases {
            let f = fresnel(x);
            assert!((f.c - c).abs() < 1e-14, "C({x}) = {}", f.c);
            assert!((f.s - s).abs() < 1e-14, "S({x}) = {}", f.s);
        }
    }

    #[test]
    fn branches_agree_at_switch_point() {
        let a = series(SERIES_LIMIT);
        let b = continued_fraction(SERIES_LIMIT);
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn dirichlet_limits_and_nulls() {
        assert!((dirichlet_sinc(7, 0.0) - 7.0).abs() < 1e-15);
        assert!(dirichlet_sinc(3, 2.0 / 3.0).abs() < 1e-15);
        // Even alpha flips sign at odd multiples of 2.
        assert!((dirichlet_sinc(4, 2.0) + 4.0).abs() < 1e-12);
        assert!((dirichlet_sinc(5, 2.0) - 5.0).abs() < 1e-12);
        let near = dirichlet_sinc(9, 4.0 + 1e-11);
        assert!((near - 9.0).abs() < 1e-9);
    }

    #[test]
    fn dirichlet_matches_direct_sum() {
        let alpha = 119u64;
        let x = 0.01;
        let half = (alpha as i64 - 1) / 2;
        let sum: Complex64 = (-half..=half)
            .map(|q| Complex64::from_polar(1.0, PI * q as f64 * x))
            .sum();
        assert!(sum.im.abs() < 1e-10);
        assert!((sum.re - dirichlet_sinc(alpha, x)).abs() < 1e-10);
    }

    #[test]
    fn kernel_limits() {
        assert_eq!(f_kernel(0.0), Complex64::new(1.0, 0.0));
        assert!((f_kernel(1e-7) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for b2 in [0.2, 1.0, 3.7] {
            assert!((g_kernel(0.0, b2) - f_kernel(b2)).norm() < 1e-14);
        }
        assert!(g_kernel(3.0, 2.0).norm() < 0.1);
    }

    #[test]
    fn g_series_is_continuous() {
        for b1 in [0.0, 0.4, 5.0] {
            let b2 = 1.01e-6;
            let direct = {
                let hi = fresnel(b1 + b2);
                let lo = fresnel(b1 - b2);
                Complex64::new(hi.c - lo.c, hi.s - lo.s) / (2.0 * b2)
            };
            assert!((g_kernel(b1, 0.99e-6) - direct).norm() < 1e-8);
        }
    }
}
