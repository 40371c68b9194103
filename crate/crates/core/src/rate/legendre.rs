//! Legendre transform of the step log-MGF and the derived 1-D optimizations.

use crate::laws::StepLaw;
use crate::laws::StepSpec;
use crate::numeric::{golden_max, golden_min};

/// Λ(a) = sup_t {a·t − log E[e^{tX}]}.
///
/// Closed forms for the Rademacher and Gaussian laws; elsewhere a concave
/// 1-D maximization with bracket doubling. Steps with an empty MGF domain
/// get the degenerate transform (identically 0), matching the supremum over
/// the single admissible point t = 0.
pub fn legendre(step: &StepLaw, a: f64) -> f64 {
    let a = a.abs(); // symmetric laws have symmetric rate functions
    if a == 0.0 {
        return 0.0;
    }
    match step.spec() {
        StepSpec::Rademacher => {
            if a < 1.0 {
                ((1.0 + a) / 2.0) * (1.0 + a).ln() + ((1.0 - a) / 2.0) * (1.0 - a).ln()
            } else if a == 1.0 {
                2f64.ln()
            } else {
                f64::INFINITY
            }
        }
        StepSpec::Gaussian => 0.5 * a * a,
        _ => {
            if !step.has_exponential_moment() {
                return 0.0;
            }
            if let Some(l) = step.ess_sup() {
                if a > l {
                    return f64::INFINITY;
                }
                if a == l {
                    let atom = step.mass_at(l);
                    return if atom > 0.0 { -atom.ln() } else { f64::INFINITY };
                }
            }
            let objective = |t: f64| {
                let psi = step.log_mgf(t);
                if psi.is_finite() {
                    a * t - psi
                } else {
                    f64::NEG_INFINITY
                }
            };
            // Bracket the concave maximum by doubling.
            let mut hi = 1.0f64;
            while objective(2.0 * hi) > objective(hi) {
                hi *= 2.0;
                if hi > 1e8 {
                    break;
                }
            }
            let (_, v) = golden_max(objective, 0.0, 2.0 * hi, 1e-10 * hi.max(1.0));
            v.max(0.0)
        }
    }
}

/// Which linear cost enters the two-term exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiRegime {
    /// Family-size tail pays h·(β−1)·log m per unit of time fraction h.
    ParetoOffspringSubSchroder,
    /// Harmonic moments saturate at the single-child cost −h·log p1.
    ParetoOffspringSuperSchroder,
}

/// Optima of the sum form Φ(h) = c·h + h·Λ(I/h) and of the min form
/// Φ'(h) = (c·h) ∧ (h·Λ(I/h)).
#[derive(Clone, Copy, Debug)]
pub struct PhiOptimum {
    pub inf_sum: f64,
    pub argmin: f64,
    pub sup_min: f64,
    pub argmax: f64,
    /// Set when I = 0 collapses both optima to zero.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhiError {
    UnreachableShift,
    MissingSingleChildMass,
}

impl std::fmt::Display for PhiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhiError::UnreachableShift => {
                write!(f, "shift rate is infinite; use the time-fraction route instead")
            }
            PhiError::MissingSingleChildMass => {
                write!(f, "the saturated regime needs p1 > 0")
            }
        }
    }
}

impl std::error::Error for PhiError {}

/// Optimize the two-term exponent over the intermediate-time parameter h.
///
/// `h·Λ(I/h)` is the perspective of a convex function, hence convex in h and
/// nonincreasing; adding the linear cost keeps the sum convex (golden-section
/// on the bracketed minimum), and the min form is quasi-concave (golden-section
/// on the maximum).
pub fn optimize_phi(
    regime: PhiRegime,
    step: &StepLaw,
    i_val: f64,
    beta: f64,
    m: f64,
    p1: f64,
) -> Result<PhiOptimum, PhiError> {
    let c = match regime {
        PhiRegime::ParetoOffspringSubSchroder => (beta - 1.0) * m.ln(),
        PhiRegime::ParetoOffspringSuperSchroder => {
            if p1 <= 0.0 {
                return Err(PhiError::MissingSingleChildMass);
            }
            -p1.ln()
        }
    };
    if i_val == 0.0 {
        return Ok(PhiOptimum { inf_sum: 0.0, argmin: f64::NAN, sup_min: 0.0, argmax: f64::NAN, degenerate: true });
    }
    if !i_val.is_finite() {
        return Err(PhiError::UnreachableShift);
    }
    let walk_term = |h: f64| {
        if h <= 0.0 {
            return f64::INFINITY;
        }
        let lam = legendre(step, i_val / h);
        if lam.is_finite() {
            h * lam
        } else {
            f64::INFINITY
        }
    };
    let sum = |u: f64| {
        // optimize in log-h for scale robustness
        let h = u.exp();
        let w = walk_term(h);
        if w.is_finite() {
            c * h + w
        } else {
            f64::INFINITY
        }
    };
    let min_form = |u: f64| {
        let h = u.exp();
        let w = walk_term(h);
        (c * h).min(w)
    };
    // Bracket in log-h around the natural scale I.
    let center = i_val.ln();
    let (lo, hi) = (center - 14.0, center + 14.0);
    let mut best = (f64::INFINITY, f64::NAN);
    let grid = 240;
    for i in 0..=grid {
        let u = lo + (hi - lo) * i as f64 / grid as f64;
        let v = sum(u);
        if v < best.0 {
            best = (v, u);
        }
    }
    let du = (hi - lo) / grid as f64;
    let (u_min, inf_sum) = golden_min(sum, best.1 - du, best.1 + du, 1e-11);
    let mut worst = (f64::NEG_INFINITY, f64::NAN);
    for i in 0..=grid {
        let u = lo + (hi - lo) * i as f64 / grid as f64;
        let v = min_form(u);
        if v > worst.0 {
            worst = (v, u);
        }
    }
    let (u_max, sup_min) = golden_max(min_form, worst.1 - du, worst.1 + du, 1e-11);
    Ok(PhiOptimum {
        inf_sum,
        argmin: u_min.exp(),
        sup_min,
        argmax: u_max.exp(),
        degenerate: false,
    })
}

/// Decay constant for sums of a slowly-growing number of stretched-
/// exponential-tailed variables landing in a diffusive window.
#[derive(Clone, Copy, Debug)]
pub struct WeibullSumRate {
    /// The limit constant −λ·a^α.
    pub constant: f64,
    /// The probability is exp(constant · n^{α/2} / t_n^{α−1}): these are the
    /// exponents of the scale.
    pub n_exponent: f64,
    pub tn_exponent: f64,
}

pub fn weibull_sum_rate(lambda: f64, alpha: f64, a: f64) -> WeibullSumRate {
    assert!(lambda > 0.0 && alpha > 1.0 && a >= 0.0);
    WeibullSumRate {
        constant: -lambda * a.powf(alpha),
        n_exponent: alpha / 2.0,
        tn_exponent: alpha - 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{StepLaw, StepSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_forms() {
        let gauss = StepLaw::new(StepSpec::Gaussian).unwrap();
        assert_abs_diff_eq!(legendre(&gauss, 1.0), 0.5, epsilon = 1e-14);
        let rad = StepLaw::new(StepSpec::Rademacher).unwrap();
        assert_abs_diff_eq!(legendre(&rad, 0.5), 0.13081203594113694, epsilon = 1e-10);
        assert_eq!(legendre(&rad, 1.5), f64::INFINITY);
        assert_abs_diff_eq!(legendre(&rad, 1.0), 2f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn vanishes_at_the_mean_for_every_law() {
        for spec in [
            StepSpec::Rademacher,
            StepSpec::Gaussian,
            StepSpec::BoundedSymmetric { ess_sup: 1.4 },
            StepSpec::SymmetricWeibull { alpha: 2.0, lambda: 1.0 },
            StepSpec::SymmetricPareto { alpha: 3.0, kappa: 1.0 },
        ] {
            let law = StepLaw::new(spec).unwrap();
            assert_eq!(legendre(&law, 0.0), 0.0);
        }
    }

    #[test]
    fn degenerate_for_power_tails() {
        let law = StepLaw::new(StepSpec::SymmetricPareto { alpha: 3.0, kappa: 1.0 }).unwrap();
        assert_eq!(legendre(&law, 0.7), 0.0);
    }

    #[test]
    fn numeric_path_matches_gaussian_closed_form() {
        // The bounded mixture at L = √3 is the pure uniform; check the generic
        // optimizer against a dense finite-difference supremum.
        let law = StepLaw::new(StepSpec::BoundedSymmetric { ess_sup: 3f64.sqrt() }).unwrap();
        for &a in &[0.2, 0.8, 1.3] {
            let v = legendre(&law, a);
            let mut sup: f64 = 0.0;
            for i in 0..40_000 {
                let t = i as f64 * 1e-3;
                let psi = law.log_mgf(t);
                if psi.is_finite() {
                    sup = sup.max(a * t - psi);
                }
            }
            assert_abs_diff_eq!(v, sup, epsilon = 1e-5);
        }
    }

    #[test]
    fn convex_symmetric_nonnegative_on_grid() {
        for spec in [StepSpec::Rademacher, StepSpec::Gaussian, StepSpec::SymmetricWeibull { alpha: 2.0, lambda: 1.0 }] {
            let law = StepLaw::new(spec).unwrap();
            let xs: Vec<f64> = (0..21).map(|i| -0.9 + 0.09 * i as f64).collect();
            let vals: Vec<f64> = xs.iter().map(|&x| legendre(&law, x)).collect();
            for (i, &v) in vals.iter().enumerate() {
                assert!(v >= -1e-12);
                let j = xs.len() - 1 - i;
                assert_abs_diff_eq!(v, vals[j], epsilon = 1e-8);
            }
            for i in 1..xs.len() - 1 {
                assert!(vals[i] <= 0.5 * (vals[i - 1] + vals[i + 1]) + 1e-9, "not convex at {i}");
            }
        }
    }

    #[test]
    fn phi_optimum_gaussian_reference() {
        // c = 1, I = 1: minimize h + 1/(2h) ⇒ √2 at h = 1/√2; the min form
        // crosses at h = 1/(2h) ⇒ sup = 1/√2.
        let gauss = StepLaw::new(StepSpec::Gaussian).unwrap();
        // (β−1)·log m = 1 with β = 2, m = e
        let opt = optimize_phi(
            PhiRegime::ParetoOffspringSubSchroder,
            &gauss,
            1.0,
            2.0,
            std::f64::consts::E,
            0.5,
        )
        .unwrap();
        let s2 = std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(opt.inf_sum, s2, epsilon = 1e-6);
        assert_abs_diff_eq!(opt.argmin, 1.0 / s2, epsilon = 1e-4);
        assert_abs_diff_eq!(opt.sup_min, 1.0 / s2, epsilon = 1e-6);
        assert!(!opt.degenerate);
        // sandwich property
        assert!(opt.sup_min <= opt.inf_sum + 1e-9);
    }

    #[test]
    fn phi_degenerate_and_error_paths() {
        let gauss = StepLaw::new(StepSpec::Gaussian).unwrap();
        let opt = optimize_phi(PhiRegime::ParetoOffspringSubSchroder, &gauss, 0.0, 1.5, 1.5, 0.5)
            .unwrap();
        assert!(opt.degenerate && opt.inf_sum == 0.0 && opt.sup_min == 0.0);
        assert!(matches!(
            optimize_phi(PhiRegime::ParetoOffspringSubSchroder, &gauss, f64::INFINITY, 1.5, 1.5, 0.5),
            Err(PhiError::UnreachableShift)
        ));
        assert!(matches!(
            optimize_phi(PhiRegime::ParetoOffspringSuperSchroder, &gauss, 1.0, 3.0, 1.5, 0.0),
            Err(PhiError::MissingSingleChildMass)
        ));
    }

    #[test]
    fn phi_cost_to_zero_limit() {
        // As the linear cost vanishes the sum's infimum tends to 0 (send h→∞).
        let gauss = StepLaw::new(StepSpec::Gaussian).unwrap();
        let opt = optimize_phi(
            PhiRegime::ParetoOffspringSubSchroder,
            &gauss,
            1.0,
            1.0 + 1e-7,
            std::f64::consts::E,
            0.5,
        )
        .unwrap();
        assert!(opt.inf_sum < 1e-3, "inf {}", opt.inf_sum);
    }

    #[test]
    fn phi_sandwich_across_parameters() {
        let rad = StepLaw::new(StepSpec::Rademacher).unwrap();
        let gauss = StepLaw::new(StepSpec::Gaussian).unwrap();
        for step in [&rad, &gauss] {
            for &i_val in &[0.3, 1.0, 2.5] {
                for &beta in &[1.2, 1.5, 2.5] {
                    let opt = optimize_phi(
                        PhiRegime::ParetoOffspringSubSchroder,
                        step,
                        i_val,
                        beta,
                        1.5,
                        0.5,
                    )
                    .unwrap();
                    assert!(
                        opt.sup_min <= opt.inf_sum + 1e-8,
                        "sandwich failed: {} > {}",
                        opt.sup_min,
                        opt.inf_sum
                    );
                    assert!(opt.inf_sum.is_finite() && opt.inf_sum > 0.0);
                }
            }
        }
    }

    #[test]
    fn weibull_sum_rate_values() {
        assert_abs_diff_eq!(weibull_sum_rate(1.0, 2.0, 1.0).constant, -1.0, epsilon = 0.0);
        assert_abs_diff_eq!(weibull_sum_rate(2.0, 2.0, 0.0).constant, 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(weibull_sum_rate(1.0, 3.0, 2.0).constant, -8.0, epsilon = 0.0);
        let r = weibull_sum_rate(1.0, 2.0, 1.0);
        assert_abs_diff_eq!(r.n_exponent, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(r.tn_exponent, 1.0, epsilon = 0.0);
    }
}
