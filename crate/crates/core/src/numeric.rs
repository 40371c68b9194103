//! Small numerical toolbox: normal distribution functions, compensated
//! summation, bracketed 1-D searches, and incomplete-gamma integrals.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal survival function `P(N > x)`; accurate in the far tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal quantile (inverse CDF).
///
/// Acklam's rational approximation refined by one Halley step against the
/// exact CDF; absolute error is at the rounding level for p in (1e-300, 1).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1), got {p}");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    let mut x = if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    // One Halley refinement using the exact CDF.
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x -= u / (1.0 + 0.5 * x * u);
    x
}

/// Log of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Regularized upper incomplete gamma `Q(a, x) = Γ(a,x)/Γ(a)`.
///
/// Series for `x < a + 1`, continued fraction otherwise (both standard).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        // P(a,x) by series, then Q = 1 - P.
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut k = a;
        for _ in 0..500 {
            k += 1.0;
            term *= x / k;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        1.0 - sum * (-x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        // Lentz continued fraction for Q(a,x).
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x + a * x.ln() - ln_gamma(a)).exp() * h
    }
}

/// Upper incomplete gamma `Γ(a, x)` (non-regularized).
pub fn upper_gamma(a: f64, x: f64) -> f64 {
    gamma_q(a, x) * ln_gamma(a).exp()
}

/// Neumaier compensated accumulator.
///
/// Keeps absolute rounding error near one ulp of the running total even for
/// sums with ~1e8 terms of mixed magnitude.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice.
pub fn ksum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Kahan::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
///
/// Returns `(argmin, min)`. Tolerance is on the argument.
pub fn golden_min(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    if f1 < fm && f1 < f2 {
        (x1, f1)
    } else if f2 < fm {
        (x2, f2)
    } else {
        (xm, fm)
    }
}

/// Golden-section maximization on `[a, b]` for a unimodal (possibly kinked)
/// function; `-inf` values are tolerated away from the peak.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, neg) = golden_min(|t| -f(t), a, b, tol);
    (x, -neg)
}

/// Bisection for the root of a continuous function with `f(lo) <= 0 <= f(hi)`
/// (or the reverse). Runs to absolute tolerance `tol` on the argument.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    let fhi = f(hi);
    assert!(
        flo == 0.0 || fhi == 0.0 || (flo < 0.0) != (fhi < 0.0),
        "bisect needs a sign change: f({lo})={flo}, f({hi})={fhi}"
    );
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
///
/// The interval is pre-split into 32 panels before refining, so a feature
/// far narrower than the whole interval still gets probed.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let panels = 32;
    let width = (b - a) / panels as f64;
    let mut acc = Kahan::new();
    for i in 0..panels {
        let lo = a + i as f64 * width;
        let hi = if i == panels - 1 { b } else { lo + width };
        acc.add(integrate_panel(f, lo, hi, tol / panels as f64));
    }
    acc.value()
}

fn integrate_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + rec(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Ordinary least squares of `y` on `x` with per-point weights.
///
/// Returns `(slope, intercept, r_squared)`.
pub fn weighted_ols(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    assert!(x.len() == y.len() && x.len() == w.len() && x.len() >= 2);
    let sw: f64 = ksum(w.iter().copied());
    let mx = ksum(x.iter().zip(w).map(|(a, b)| a * b)) / sw;
    let my = ksum(y.iter().zip(w).map(|(a, b)| a * b)) / sw;
    let sxx = ksum(x.iter().zip(w).map(|(a, b)| b * (a - mx) * (a - mx)));
    let sxy = ksum(
        x.iter()
            .zip(y.iter())
            .zip(w)
            .map(|((a, c), b)| b * (a - mx) * (c - my)),
    );
    let syy = ksum(y.iter().zip(w).map(|(c, b)| b * (c - my) * (c - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_cdf_reference_points() {
        assert_abs_diff_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(normal_cdf(1.959963984540054), 0.975, epsilon = 1e-12);
        assert_abs_diff_eq!(normal_cdf(-1.0) + normal_cdf(1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-10, 1e-4, 0.025, 0.25, 0.5, 0.6744897501960817_f64.min(0.99), 0.975, 1.0 - 1e-9] {
            let x = normal_quantile(p);
            assert_abs_diff_eq!(normal_cdf(x), p, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(normal_quantile(0.975), 1.959963984540054, epsilon = 1e-9);
        assert_abs_diff_eq!(normal_quantile(0.75), 0.6744897501960817, epsilon = 1e-9);
    }

    #[test]
    fn gamma_q_matches_closed_forms() {
        // Q(1, x) = e^{-x}
        for &x in &[0.1, 1.0, 5.0, 30.0] {
            assert_abs_diff_eq!(gamma_q(1.0, x), (-x).exp(), epsilon = 1e-12);
        }
        // Q(2, x) = (1+x)e^{-x}
        assert_abs_diff_eq!(gamma_q(2.0, 3.0), 4.0 * (-3.0f64).exp(), epsilon = 1e-12);
        // Γ(a,0) = Γ(a)
        assert_abs_diff_eq!(upper_gamma(2.5, 0.0), ln_gamma(2.5).exp(), epsilon = 1e-12);
    }

    #[test]
    fn kahan_handles_adversarial_order() {
        let mut acc = Kahan::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        assert_abs_diff_eq!(acc.value(), 1.0 + 1e-10, epsilon = 1e-13);
    }

    #[test]
    fn golden_finds_quadratic_min() {
        let (x, fx) = golden_min(|t| (t - 1.3) * (t - 1.3) + 2.0, -10.0, 10.0, 1e-10);
        assert_abs_diff_eq!(x, 1.3, epsilon = 1e-7);
        assert_abs_diff_eq!(fx, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_integrates_gaussian_density() {
        let v = integrate(&|x: f64| normal_pdf(x), -8.0, 8.0, 1e-12);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|t| -2.0 * t + 0.5).collect();
        let w = [1.0; 4];
        let (m, b, r2) = weighted_ols(&x, &y, &w);
        assert_abs_diff_eq!(m, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r2, 1.0, epsilon = 1e-12);
    }
}
