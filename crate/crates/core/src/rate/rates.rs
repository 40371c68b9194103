//! Gaussian set measures and the shift/variance rate functions.

use super::TargetSet;
use crate::numeric::{bisect, golden_max, normal_cdf, normal_sf};

#[derive(Clone, Debug, PartialEq)]
pub enum RateError {
    /// p must exceed the unshifted Gaussian mass of the set.
    NotRare { p: f64, base: f64 },
    /// p must be strictly below 1.
    NotBelowOne { p: f64 },
}

impl std::fmt::Display for RateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateError::NotRare { p, base } => {
                write!(f, "p = {p} does not exceed the baseline Gaussian mass {base}")
            }
            RateError::NotBelowOne { p } => write!(f, "p = {p} must be < 1"),
        }
    }
}

impl std::error::Error for RateError {}

/// ν((A − shift)/scale): standard Gaussian mass of the shifted, dilated set.
pub fn gaussian_set_measure(a: &TargetSet, shift: f64, scale: f64) -> f64 {
    assert!(scale > 0.0, "scale must be positive");
    let mut total = 0.0;
    for &(lo, hi) in a.intervals() {
        let zlo = (lo - shift) / scale;
        let zhi = (hi - shift) / scale;
        // Difference through the less-cancelling side.
        let m = if zlo + zhi > 0.0 {
            normal_sf(zlo) - normal_sf(zhi)
        } else {
            normal_cdf(zhi) - normal_cdf(zlo)
        };
        total += m.max(0.0);
    }
    total.min(1.0)
}

/// Result of the shift rate function: the infimum and a shift achieving it.
#[derive(Clone, Copy, Debug)]
pub struct ShiftRate {
    /// inf{|x| : ν(A−x) ≥ p}; +∞ when no shift reaches mass p.
    pub value: f64,
    /// A shift of magnitude `value` whose mass reaches p (None when +∞).
    pub arg_shift: Option<f64>,
}

fn validate_p(a: &TargetSet, p: f64) -> Result<f64, RateError> {
    if !(p < 1.0) {
        return Err(RateError::NotBelowOne { p });
    }
    let base = gaussian_set_measure(a, 0.0, 1.0);
    if !(p > base) {
        return Err(RateError::NotRare { p, base });
    }
    Ok(base)
}

/// inf{|x| : ν(A−x) ≥ p}. Scans the two-sided envelope for the first
/// up-crossing, then bisects; +∞ when even the global supremum stays below p.
pub fn i_rate(a: &TargetSet, p: f64) -> Result<f64, RateError> {
    i_rate_full(a, p).map(|r| r.value)
}

pub fn i_rate_full(a: &TargetSet, p: f64) -> Result<ShiftRate, RateError> {
    validate_p(a, p)?;
    let envelope = |t: f64| {
        gaussian_set_measure(a, t, 1.0).max(gaussian_set_measure(a, -t, 1.0))
    };
    // Grid fine enough to see every island of A.
    let min_width = a
        .intervals()
        .iter()
        .map(|&(lo, hi)| if lo.is_finite() && hi.is_finite() { hi - lo } else { f64::INFINITY })
        .fold(f64::INFINITY, f64::min);
    let step = (min_width / 8.0).min(0.01).max(1e-5);
    let reach = a
        .intervals()
        .iter()
        .flat_map(|&(lo, hi)| [lo, hi])
        .filter(|e| e.is_finite())
        .fold(0.0f64, |m, e| m.max(e.abs()));
    let t_max = reach + 10.0;

    let mut t_prev = 0.0f64;
    let mut t = 0.0f64;
    let mut found = false;
    while t <= t_max {
        if envelope(t) >= p {
            found = true;
            break;
        }
        t_prev = t;
        t += step;
    }
    if !found {
        if !a.is_bounded() {
            // Mass tends to 1 along the unbounded direction; keep scanning.
            let mut lo = t_max;
            let mut hi = t_max * 2.0 + 10.0;
            while envelope(hi) < p {
                lo = hi;
                hi = hi * 2.0 + 10.0;
                assert!(hi < 1e9, "shift search diverged");
            }
            let x = bisect(|u| envelope(u) - p, lo, hi, 1e-11);
            return Ok(shift_rate_at(a, p, x));
        }
        // Bounded set: compare p against the global supremum of the envelope.
        let (sup, _) = sup_shift_measure(a, 1.0);
        if sup < p {
            return Ok(ShiftRate { value: f64::INFINITY, arg_shift: None });
        }
        // The supremum reaches p inside a grid cell the scan stepped over:
        // fall back to a fine scan around the maximizing shift.
        let (_, x_best) = sup_shift_measure(a, 1.0);
        let t_best = x_best.abs();
        let mut lo = 0.0;
        let mut hi = t_best;
        for i in 0..=100_000 {
            let u = t_best * i as f64 / 100_000.0;
            if envelope(u) >= p {
                hi = u;
                break;
            }
            lo = u;
        }
        let x = bisect(|u| envelope(u) - p, lo, hi, 1e-11);
        return Ok(shift_rate_at(a, p, x));
    }
    if t == 0.0 {
        return Ok(ShiftRate { value: 0.0, arg_shift: Some(0.0) });
    }
    let x = bisect(|u| envelope(u) - p, t_prev, t, 1e-11);
    Ok(shift_rate_at(a, p, x))
}

fn shift_rate_at(a: &TargetSet, p: f64, t: f64) -> ShiftRate {
    // Resolve which sign achieves the mass at (or just beyond) the boundary.
    let eps = 1e-9 * (1.0 + t);
    let plus = gaussian_set_measure(a, t + eps, 1.0) >= p - 1e-12
        && gaussian_set_measure(a, t, 1.0) >= gaussian_set_measure(a, -t, 1.0);
    let sign = if plus { 1.0 } else { -1.0 };
    ShiftRate { value: t, arg_shift: Some(sign * t) }
}

/// sup over x of ν((A−x)/scale) with the maximizing shift; multi-start
/// golden refinement over a grid covering every island.
fn sup_shift_measure(a: &TargetSet, scale: f64) -> (f64, f64) {
    if !a.is_bounded() {
        return (1.0, 0.0);
    }
    let lo = a.min_finite().unwrap() - 10.0 * scale;
    let hi = a.max_finite().unwrap() + 10.0 * scale;
    let f = |x: f64| gaussian_set_measure(a, x, scale);
    let n = 2048;
    let width = (hi - lo) / n as f64;
    let mut best = (f(lo), lo);
    let mut candidates = Vec::new();
    let mut prev2 = f(lo);
    let mut prev = f(lo + width);
    for i in 2..=n {
        let x = lo + width * i as f64;
        let cur = f(x);
        if prev >= prev2 && prev >= cur {
            candidates.push(x - width);
        }
        prev2 = prev;
        prev = cur;
    }
    candidates.push(lo + width);
    candidates.push(hi - width);
    for c in candidates {
        let (x, v) = golden_max(f, c - width, c + width, 1e-12 * scale.max(1.0));
        if v > best.0 {
            best = (v, x);
        }
    }
    best
}

/// Result of the variance rate function.
#[derive(Clone, Copy, Debug)]
pub struct VarianceRate {
    /// inf{r ∈ [0,1) : sup_x ν((A−x)/√(1−r)) ≥ p}.
    pub value: f64,
    /// The maximizing shift at that r.
    pub arg_shift: f64,
}

/// J_A(p): bisection over r with the inner shift supremum per evaluation;
/// 0 when the unshrunk supremum already reaches p.
pub fn j_rate(a: &TargetSet, p: f64) -> Result<f64, RateError> {
    j_rate_full(a, p).map(|r| r.value)
}

pub fn j_rate_full(a: &TargetSet, p: f64) -> Result<VarianceRate, RateError> {
    validate_p(a, p)?;
    let sup_at = |r: f64| sup_shift_measure(a, (1.0 - r).sqrt());
    let (s0, x0) = sup_at(0.0);
    if s0 >= p {
        return Ok(VarianceRate { value: 0.0, arg_shift: x0 });
    }
    // Expand toward r = 1 until the supremum crosses p.
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    while sup_at(hi).0 < p {
        lo = hi;
        hi = 0.5 * (1.0 + hi);
        assert!(1.0 - hi > 1e-14, "variance search hit r = 1");
    }
    let r = bisect(|u| sup_at(u).0 - p, lo, hi, 1e-11);
    let (_, x) = sup_at((r + 1e-9).min(1.0 - 1e-12));
    Ok(VarianceRate { value: r, arg_shift: x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn half_line() -> TargetSet {
        TargetSet::parse("(-inf,0]").unwrap()
    }

    fn unit() -> TargetSet {
        TargetSet::parse("(0,1]").unwrap()
    }

    #[test]
    fn measure_reference_values() {
        assert_abs_diff_eq!(gaussian_set_measure(&half_line(), 0.0, 1.0), 0.5, epsilon = 1e-14);
        let line = TargetSet::parse("(-inf,inf]").unwrap();
        assert_abs_diff_eq!(gaussian_set_measure(&line, 3.7, 0.3), 1.0, epsilon = 1e-14);
        // 2Φ(0.5/0.741302)−1 = 0.5 with 0.5/0.741302 at the 75% quantile
        assert_abs_diff_eq!(
            gaussian_set_measure(&unit(), 0.5, 0.7413011092528009),
            0.5,
            epsilon = 1e-9
        );
    }

    #[test]
    fn measure_affine_consistency() {
        // ν((A−x)/s) equals the measure of the pre-transformed set at scale 1.
        let a = TargetSet::parse("(0.5,2] | (3,4]").unwrap();
        let (x, s) = (0.7, 1.9);
        let transformed = TargetSet::new(
            a.intervals().iter().map(|&(lo, hi)| ((lo - x) / s, (hi - x) / s)).collect(),
        )
        .unwrap();
        assert_abs_diff_eq!(
            gaussian_set_measure(&a, x, s),
            gaussian_set_measure(&transformed, 0.0, 1.0),
            epsilon = 1e-13
        );
    }

    #[test]
    fn shift_rate_on_half_line_is_the_quantile() {
        let r = i_rate_full(&half_line(), 0.975).unwrap();
        assert_abs_diff_eq!(r.value, 1.959963984540054, epsilon = 1e-8);
        // Mass grows by shifting the set left, i.e. negative shift of x.
        assert!(r.arg_shift.unwrap() < 0.0);
        // boundary behaviour: p just above 1/2 needs almost no shift
        let r = i_rate(&half_line(), 0.5 + 1e-9).unwrap();
        assert!(r < 1e-7);
    }

    #[test]
    fn shift_rate_infinite_when_mass_unreachable() {
        // max shifted mass of (0,1] is 2Φ(1/2)−1 ≈ 0.3829 < 0.5
        let r = i_rate_full(&unit(), 0.5).unwrap();
        assert_eq!(r.value, f64::INFINITY);
        assert!(r.arg_shift.is_none());
    }

    #[test]
    fn variance_rate_unit_interval() {
        // Solve 2Φ(0.5/√(1−r))−1 = 0.5 ⇒ r ≈ 0.450471
        let r = j_rate_full(&unit(), 0.5).unwrap();
        assert_abs_diff_eq!(r.value, 0.4504710507983167, epsilon = 1e-6);
        assert_abs_diff_eq!(r.arg_shift, 0.5, epsilon = 1e-4);
    }

    #[test]
    fn variance_rate_zero_cases() {
        // Unbounded sets absorb all mass under shifts alone.
        assert_eq!(j_rate(&half_line(), 0.93).unwrap(), 0.0);
        // Just below the attainable supremum the rate vanishes continuously.
        let sup = 2.0 * normal_cdf(0.5) - 1.0;
        let r = j_rate(&unit(), sup - 1e-6).unwrap();
        assert_eq!(r, 0.0);
        let r = j_rate(&unit(), sup + 1e-6).unwrap();
        assert!(r > 0.0 && r < 0.01);
    }

    #[test]
    fn rates_monotone_in_p() {
        let a = unit();
        let sup = 2.0 * normal_cdf(0.5) - 1.0;
        let mut prev_j = 0.0;
        for i in 1..20 {
            let p = sup + (1.0 - sup) * i as f64 / 20.0;
            let j = j_rate(&a, p).unwrap();
            assert!(j >= prev_j - 1e-9, "j_rate not monotone at p={p}");
            prev_j = j;
        }
        let h = half_line();
        let mut prev_i = 0.0;
        for i in 1..10 {
            let p = 0.5 + 0.45 * i as f64 / 10.0;
            let v = i_rate(&h, p).unwrap();
            assert!(v >= prev_i - 1e-9, "i_rate not monotone at p={p}");
            prev_i = v;
        }
    }

    #[test]
    fn preconditions_rejected() {
        assert!(matches!(i_rate(&half_line(), 0.4), Err(RateError::NotRare { .. })));
        assert!(matches!(i_rate(&half_line(), 1.0), Err(RateError::NotBelowOne { .. })));
        assert!(matches!(j_rate(&unit(), 0.1), Err(RateError::NotRare { .. })));
    }

    #[test]
    fn two_island_infimum_prefers_the_near_island() {
        // Mass can concentrate on either island; the infimum should pick the
        // shift that reaches p with the smaller |x|.
        let a = TargetSet::parse("(-9,-8] | (1,2]").unwrap();
        let p = 0.3;
        let r = i_rate_full(&a, p).unwrap();
        assert!(r.value.is_finite());
        let x = r.arg_shift.unwrap();
        assert!(gaussian_set_measure(&a, x, 1.0) >= p - 1e-7);
        // The near island is (1,2]; reaching 0.3 needs |x| ≈ a bit over 1.
        assert!(x > 0.0 && r.value < 2.0, "value {} x {}", r.value, x);
    }
}
