//! Offspring (family size) distributions.
//!
//! Three families cover the tail hypotheses of the decay theorems:
//!
//! * finite-support tables — exponential-moment regime;
//! * `ZipfPareto(β, b)` — pmf ∝ k^{−(β+1)} on k ≥ b, so the survival
//!   function is Θ(1)·x^{−β};
//! * `DiscreteWeibull(β, l, b)` — built by differencing the survival
//!   function, so P(N > k) = exp(−l·k^β) holds exactly for k ≥ b.
//!
//! Every law reports mean `m`, mass at one `p1`, minimal/maximal family
//! sizes `b`/`B`, the Schröder constant `−log p1 / log m`, and the Böttcher
//! constant `log b / log m` (defined for b ≥ 2).

use super::LawError;
use crate::numeric::Kahan;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Precomputed survival table length for the Zipf-Pareto sampler.
const ZIPF_TABLE: u64 = 4096;
/// Direct-summation horizon before switching to the Euler-Maclaurin tail.
const ZETA_DIRECT: u64 = 1 << 16;

/// Construction spec for an offspring law.
#[derive(Clone, Debug, PartialEq)]
pub enum OffspringSpec {
    /// Explicit pmf on positive integers.
    FiniteSupport(Vec<(u64, f64)>),
    /// pmf ∝ k^{−(β+1)} for k ≥ shift; requires β > 1.
    ZipfPareto { beta: f64, shift: u64 },
    /// P(N > k) = exp(−l·k^β) for k ≥ shift; requires β ∈ (0,1), l > 0.
    DiscreteWeibull { beta: f64, l: f64, shift: u64 },
}

/// Tail classification with the constants the rate module consumes.
#[derive(Clone, Debug, PartialEq)]
pub enum OffspringTail {
    Finite,
    /// P(N > x)·x^β stays in [lower, upper] for x ≥ 1 and tends to `asymptotic`.
    Pareto { beta: f64, asymptotic: f64, lower: f64, upper: f64 },
    /// P(N > x) ~ l1·exp(−l·x^β); `l1` = 1 for the exact-survival family.
    Weibull { beta: f64, l: f64, l1: f64 },
}

#[derive(Clone, Debug)]
enum Repr {
    Finite { ks: Vec<u64>, ps: Vec<f64>, cum: Vec<f64> },
    Zipf { beta: f64, b: u64, norm: f64, surv: Vec<f64> },
    Weib { beta: f64, l: f64, b: u64 },
}

/// An immutable offspring law with all derived constants populated.
#[derive(Clone, Debug)]
pub struct OffspringLaw {
    spec: OffspringSpec,
    repr: Repr,
    mean: f64,
    p1: f64,
    min_family: u64,
    max_family: Option<u64>,
    tail: OffspringTail,
}

impl OffspringLaw {
    pub fn new(spec: OffspringSpec) -> Result<Self, LawError> {
        match &spec {
            OffspringSpec::FiniteSupport(entries) => Self::new_finite(spec.clone(), entries),
            OffspringSpec::ZipfPareto { beta, shift } => Self::new_zipf(spec.clone(), *beta, *shift),
            OffspringSpec::DiscreteWeibull { beta, l, shift } => {
                Self::new_weibull(spec.clone(), *beta, *l, *shift)
            }
        }
    }

    fn new_finite(spec: OffspringSpec, entries: &[(u64, f64)]) -> Result<Self, LawError> {
        let mut pairs: Vec<(u64, f64)> = Vec::new();
        for &(k, p) in entries {
            if p < 0.0 || !p.is_finite() {
                return Err(LawError::BadParameter {
                    name: "pmf",
                    value: p,
                    requirement: "masses must be finite and nonnegative",
                });
            }
            if p == 0.0 {
                continue;
            }
            if k == 0 {
                return Err(LawError::ExtinctionMass(p));
            }
            match pairs.iter_mut().find(|(kk, _)| *kk == k) {
                Some((_, q)) => *q += p,
                None => pairs.push((k, p)),
            }
        }
        if pairs.is_empty() {
            return Err(LawError::EmptySupport);
        }
        pairs.sort_by_key(|&(k, _)| k);
        let total: f64 = pairs.iter().map(|&(_, p)| p).sum();
        for (_, p) in pairs.iter_mut() {
            *p /= total;
        }
        let b = pairs[0].0;
        let top = pairs.last().unwrap().0;
        let p1 = pairs.iter().find(|&&(k, _)| k == 1).map_or(0.0, |&(_, p)| p);
        if p1 >= 1.0 - 1e-15 {
            return Err(LawError::DegenerateSingleChild);
        }
        let mean = {
            let mut acc = Kahan::new();
            for &(k, p) in &pairs {
                acc.add(k as f64 * p);
            }
            acc.value()
        };
        let mut cum = Vec::with_capacity(pairs.len());
        let mut run = 0.0;
        for &(_, p) in &pairs {
            run += p;
            cum.push(run);
        }
        *cum.last_mut().unwrap() = 1.0;
        let (ks, ps): (Vec<u64>, Vec<f64>) = pairs.iter().copied().unzip();
        Ok(OffspringLaw {
            spec,
            repr: Repr::Finite { ks, ps, cum },
            mean,
            p1,
            min_family: b,
            max_family: Some(top),
            tail: OffspringTail::Finite,
        })
    }

    fn new_zipf(spec: OffspringSpec, beta: f64, b: u64) -> Result<Self, LawError> {
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(LawError::BadParameter {
                name: "beta",
                value: beta,
                requirement: "Pareto family-size exponent needs beta > 1",
            });
        }
        if b < 1 {
            return Err(LawError::BadParameter {
                name: "shift",
                value: b as f64,
                requirement: "minimal family size must be >= 1",
            });
        }
        let norm = 1.0 / tail_zeta(beta + 1.0, b);
        let mean = norm * tail_zeta(beta, b);
        let p1 = if b == 1 { norm } else { 0.0 };
        // Survival table S(k) = P(N > k) for k in b..=b+ZIPF_TABLE.
        let len = ZIPF_TABLE as usize + 1;
        let mut surv = vec![0.0f64; len];
        let mut run = tail_zeta(beta + 1.0, b + ZIPF_TABLE + 1) * norm;
        surv[len - 1] = run;
        for i in (0..len - 1).rev() {
            let k = b + i as u64;
            run += norm * (k as f64 + 1.0).powf(-(beta + 1.0));
            surv[i] = run;
        }
        // Tail-constant envelope over real x >= 1: S(x) is the step function
        // S(⌊x⌋), so on [k, k+1) the ratio S(x)·x^β spans [S(k)k^β, S(k)(k+1)^β].
        let asymptotic = norm / beta;
        let mut lower = asymptotic;
        let mut upper = asymptotic;
        let surv_at = |k: u64| -> f64 {
            if k < b {
                1.0
            } else if k - b < ZIPF_TABLE {
                surv[(k - b) as usize]
            } else {
                norm * tail_zeta(beta + 1.0, k + 1)
            }
        };
        for k in 1..=(10_000u64.max(2 * b)) {
            let s = surv_at(k);
            lower = lower.min(s * (k as f64).powf(beta));
            upper = upper.max(s * (k as f64 + 1.0).powf(beta));
        }
        Ok(OffspringLaw {
            spec,
            repr: Repr::Zipf { beta, b, norm, surv },
            mean,
            p1,
            min_family: b,
            max_family: None,
            tail: OffspringTail::Pareto { beta, asymptotic, lower, upper },
        })
    }

    fn new_weibull(spec: OffspringSpec, beta: f64, l: f64, b: u64) -> Result<Self, LawError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(LawError::BadParameter {
                name: "beta",
                value: beta,
                requirement: "stretched-exponential exponent needs beta in (0,1)",
            });
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(LawError::BadParameter {
                name: "l",
                value: l,
                requirement: "tail rate l must be positive",
            });
        }
        if b < 1 {
            return Err(LawError::BadParameter {
                name: "shift",
                value: b as f64,
                requirement: "minimal family size must be >= 1",
            });
        }
        let mean = b as f64 + stretched_exp_sum(l, beta, b);
        let p1 = if b == 1 { 1.0 - (-l).exp() } else { 0.0 };
        Ok(OffspringLaw {
            spec,
            repr: Repr::Weib { beta, l, b },
            mean,
            p1,
            min_family: b,
            max_family: None,
            tail: OffspringTail::Weibull { beta, l, l1: 1.0 },
        })
    }

    pub fn spec(&self) -> &OffspringSpec {
        &self.spec
    }

    /// Mass at exactly `k` children.
    pub fn pmf(&self, k: u64) -> f64 {
        match &self.repr {
            Repr::Finite { ks, ps, .. } => ks
                .iter()
                .position(|&kk| kk == k)
                .map_or(0.0, |i| ps[i]),
            Repr::Zipf { beta, b, norm, .. } => {
                if k < *b {
                    0.0
                } else {
                    norm * (k as f64).powf(-(beta + 1.0))
                }
            }
            Repr::Weib { beta, l, b } => {
                if k < *b {
                    0.0
                } else if k == *b {
                    1.0 - (-l * (k as f64).powf(*beta)).exp()
                } else {
                    let rate_lo = l * ((k - 1) as f64).powf(*beta);
                    let rate_hi = l * (k as f64).powf(*beta);
                    // exp(-lo) - exp(-hi) without cancellation.
                    (-rate_lo).exp() * (-(-(rate_hi - rate_lo)).exp_m1())
                }
            }
        }
    }

    /// Survival function `P(N > k)`.
    pub fn survival(&self, k: u64) -> f64 {
        match &self.repr {
            Repr::Finite { ks, cum, .. } => {
                // 1 - CDF(k) from the cumulative table.
                match ks.iter().rposition(|&kk| kk <= k) {
                    None => 1.0,
                    Some(i) => (1.0 - cum[i]).max(0.0),
                }
            }
            Repr::Zipf { beta, b, norm, surv } => {
                if k < *b {
                    1.0
                } else if k - *b < ZIPF_TABLE {
                    surv[(k - *b) as usize]
                } else {
                    norm * tail_zeta(*beta + 1.0, k + 1)
                }
            }
            Repr::Weib { beta, l, b } => {
                if k < *b {
                    1.0
                } else {
                    (-l * (k as f64).powf(*beta)).exp()
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    /// Minimal family size `b`.
    pub fn min_family(&self) -> u64 {
        self.min_family
    }

    /// Maximal family size `B`; `None` means unbounded.
    pub fn max_family(&self) -> Option<u64> {
        self.max_family
    }

    /// Schröder constant `−log p1 / log m`; infinite when `p1 = 0`.
    pub fn schroder(&self) -> f64 {
        if self.p1 == 0.0 {
            f64::INFINITY
        } else {
            -self.p1.ln() / self.mean.ln()
        }
    }

    /// Böttcher constant `log b / log m`, defined for b ≥ 2.
    pub fn bottcher(&self) -> Option<f64> {
        if self.min_family >= 2 {
            Some((self.min_family as f64).ln() / self.mean.ln())
        } else {
            None
        }
    }

    pub fn tail(&self) -> &OffspringTail {
        &self.tail
    }

    /// One draw by exact inversion of the survival function.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        let u: f64 = rng.random();
        let v = 1.0 - u; // (0, 1]
        match &self.repr {
            Repr::Finite { ks, cum, .. } => {
                let idx = cum.partition_point(|&c| c < u);
                ks[idx.min(ks.len() - 1)]
            }
            Repr::Zipf { beta, b, norm, surv } => {
                if v >= surv[0] {
                    return *b;
                }
                if v > surv[surv.len() - 1] {
                    // First k with S(k) <= v; surv is decreasing.
                    let i = surv.partition_point(|&s| s > v);
                    return b + i as u64;
                }
                // Deep tail: invert the asymptotic survival, then correct locally.
                let guess = (norm / (beta * v)).powf(1.0 / beta).min(9.0e15);
                let mut k = (guess as u64).max(b + ZIPF_TABLE);
                let s = |k: u64| norm * tail_zeta(beta + 1.0, k + 1);
                while s(k) > v {
                    k += 1 + k / 16;
                }
                while k > b + ZIPF_TABLE && s(k - 1) <= v {
                    k -= 1 + (k - b - ZIPF_TABLE) / 16;
                }
                while s(k) > v {
                    k += 1;
                }
                while k > *b && s(k - 1) <= v {
                    k -= 1;
                }
                k
            }
            Repr::Weib { beta, l, b } => {
                let x = (-v.ln() / l).powf(1.0 / beta);
                let k = x.ceil() as u64;
                k.max(*b)
            }
        }
    }

    /// Enumerate the pmf up to `k_max`, returning `(masses, residual)` where
    /// `masses[k]` is the mass at `k` and `residual` the mass beyond `k_max`.
    pub fn pmf_table(&self, k_max: u64) -> (Vec<f64>, f64) {
        let mut table = vec![0.0f64; k_max as usize + 1];
        match &self.repr {
            Repr::Finite { ks, ps, .. } => {
                let mut residual = 0.0;
                for (&k, &p) in ks.iter().zip(ps) {
                    if k <= k_max {
                        table[k as usize] = p;
                    } else {
                        residual += p;
                    }
                }
                (table, residual)
            }
            _ => {
                for k in self.min_family..=k_max {
                    table[k as usize] = self.pmf(k);
                }
                (table, self.survival(k_max))
            }
        }
    }
}

/// `Σ_{k ≥ from} k^{-s}` for `s > 1`: direct summation up to a horizon plus
/// an Euler-Maclaurin remainder.
pub fn tail_zeta(s: f64, from: u64) -> f64 {
    debug_assert!(s > 1.0);
    if from == 0 {
        return f64::INFINITY;
    }
    let horizon = ZETA_DIRECT.max(from);
    let mut acc = Kahan::new();
    // Small terms first.
    let mut k = horizon - 1;
    while k >= from {
        acc.add((k as f64).powf(-s));
        if k == from {
            break;
        }
        k -= 1;
    }
    acc.add(em_zeta_tail(s, horizon as f64));
    acc.value()
}

/// Euler-Maclaurin estimate of `Σ_{k ≥ m} k^{-s}`, accurate once m ≫ 1.
fn em_zeta_tail(s: f64, m: f64) -> f64 {
    let f = m.powf(-s);
    m * f / (s - 1.0) + 0.5 * f + s * f / (12.0 * m) - s * (s + 1.0) * (s + 2.0) * f / (720.0 * m * m * m)
}

/// `Σ_{k ≥ from} exp(−l·k^β)`: direct summation while terms matter, with an
/// Euler-Maclaurin remainder if the tail is still heavy at the horizon.
pub fn stretched_exp_sum(l: f64, beta: f64, from: u64) -> f64 {
    let mut acc = Kahan::new();
    let mut k = from;
    let cap = from + 2_000_000;
    while k < cap {
        let t = (-l * (k as f64).powf(beta)).exp();
        acc.add(t);
        if t < 1e-18 {
            return acc.value();
        }
        k += 1;
    }
    // Smooth remainder: ∫ + f/2 - f'/12 at the horizon.
    let m = k as f64;
    let f = |x: f64| (-l * x.powf(beta)).exp();
    // ∫_m^∞ e^{-l x^β} dx = (1/β) l^{-1/β} Γ(1/β, l m^β)
    let integral = crate::numeric::upper_gamma(1.0 / beta, l * m.powf(beta)) * l.powf(-1.0 / beta) / beta;
    let fp = -l * beta * m.powf(beta - 1.0) * f(m);
    acc.add(integral + 0.5 * f(m) - fp / 12.0);
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;
    use approx::assert_abs_diff_eq;

    fn finite(entries: &[(u64, f64)]) -> OffspringLaw {
        OffspringLaw::new(OffspringSpec::FiniteSupport(entries.to_vec())).unwrap()
    }

    #[test]
    fn half_half_law_constants() {
        let law = finite(&[(1, 0.5), (2, 0.5)]);
        assert_abs_diff_eq!(law.mean(), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(law.p1(), 0.5, epsilon = 1e-15);
        assert_eq!(law.min_family(), 1);
        assert_eq!(law.max_family(), Some(2));
        // -log(0.5)/log(1.5)
        assert_abs_diff_eq!(law.schroder(), 1.7095112913514547, epsilon = 1e-6);
        assert!(law.bottcher().is_none());
    }

    #[test]
    fn deterministic_binary_law() {
        let law = finite(&[(2, 1.0)]);
        assert_abs_diff_eq!(law.mean(), 2.0, epsilon = 0.0);
        assert_eq!(law.p1(), 0.0);
        assert_eq!(law.schroder(), f64::INFINITY);
        assert_abs_diff_eq!(law.bottcher().unwrap(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn two_three_law_bottcher() {
        let law = finite(&[(2, 0.5), (3, 0.5)]);
        assert_abs_diff_eq!(law.mean(), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(law.bottcher().unwrap(), 0.756470797617604, epsilon = 1e-6);
        assert_eq!(law.schroder(), f64::INFINITY);
    }

    #[test]
    fn triple_point_mass() {
        let law = finite(&[(3, 1.0)]);
        assert_abs_diff_eq!(law.mean(), 3.0, epsilon = 0.0);
        assert_abs_diff_eq!(law.bottcher().unwrap(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(matches!(
            OffspringLaw::new(OffspringSpec::FiniteSupport(vec![(0, 0.1), (2, 0.9)])),
            Err(LawError::ExtinctionMass(_))
        ));
        assert!(matches!(
            OffspringLaw::new(OffspringSpec::FiniteSupport(vec![(1, 1.0)])),
            Err(LawError::DegenerateSingleChild)
        ));
        assert!(OffspringLaw::new(OffspringSpec::FiniteSupport(vec![])).is_err());
        assert!(OffspringLaw::new(OffspringSpec::ZipfPareto { beta: 1.0, shift: 1 }).is_err());
        assert!(
            OffspringLaw::new(OffspringSpec::DiscreteWeibull { beta: 1.2, l: 1.0, shift: 1 })
                .is_err()
        );
    }

    #[test]
    fn pmf_reads_from_table() {
        let law = finite(&[(1, 0.5), (2, 0.5)]);
        assert_abs_diff_eq!(law.pmf(1), 0.5, epsilon = 0.0);
        assert_eq!(law.pmf(0), 0.0);
        assert_eq!(law.pmf(7), 0.0);
    }

    #[test]
    fn discrete_weibull_survival_is_exact_and_pmf_telescopes() {
        let law = OffspringLaw::new(OffspringSpec::DiscreteWeibull { beta: 0.5, l: 1.0, shift: 1 })
            .unwrap();
        for k in [1u64, 2, 5, 100, 10_000] {
            assert_abs_diff_eq!(
                law.survival(k),
                (-(k as f64).sqrt()).exp(),
                epsilon = 1e-15
            );
        }
        // Σ pmf over k = 1..10^6 telescopes to 1 - S(10^6).
        let mut acc = Kahan::new();
        for k in 1..=1_000_000u64 {
            acc.add(law.pmf(k));
        }
        assert_abs_diff_eq!(acc.value(), 1.0 - law.survival(1_000_000), epsilon = 1e-12);
        assert_abs_diff_eq!(acc.value(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn zipf_tail_constant_is_bounded_both_sides() {
        let law = OffspringLaw::new(OffspringSpec::ZipfPareto { beta: 1.5, shift: 1 }).unwrap();
        let OffspringTail::Pareto { lower, upper, asymptotic, .. } = *law.tail() else {
            panic!("wrong tail class")
        };
        assert!(lower > 0.0 && lower <= asymptotic && asymptotic <= upper);
        // Direct summation check of the envelope on x in [2b, 10^4].
        for k in [2u64, 10, 100, 1000, 10_000] {
            let ratio = law.survival(k) * (k as f64).powf(1.5);
            assert!(ratio >= lower * 0.999 && ratio <= upper * 1.001, "ratio {ratio} at {k}");
        }
    }

    #[test]
    fn zipf_mean_matches_direct_summation() {
        let law = OffspringLaw::new(OffspringSpec::ZipfPareto { beta: 2.5, shift: 2 }).unwrap();
        let mut acc = Kahan::new();
        for k in 2..=20_000_000u64 {
            acc.add(k as f64 * law.pmf(k));
        }
        // truncated sum undershoots; allow the tail
        assert!((law.mean() - acc.value()).abs() < 1e-6, "mean {} vs {}", law.mean(), acc.value());
    }

    #[test]
    fn finite_mean_matches_pmf_summation_exactly() {
        let law = finite(&[(1, 0.25), (2, 0.5), (3, 0.25)]);
        let direct: f64 = (1..=3).map(|k| k as f64 * law.pmf(k)).sum();
        assert_abs_diff_eq!(law.mean(), direct, epsilon = 1e-10);
    }

    #[test]
    fn point_mass_sampling_is_constant() {
        let law = finite(&[(2, 1.0)]);
        let mut rng = StreamKey::root(1).rng();
        for _ in 0..100 {
            assert_eq!(law.sample(&mut rng), 2);
        }
    }

    #[test]
    fn sample_mean_clt_bound() {
        let law = finite(&[(1, 0.5), (2, 0.5)]);
        let mut rng = StreamKey::root(7).rng();
        let n = 1_000_000u64;
        let mut sum = 0u64;
        for _ in 0..n {
            sum += law.sample(&mut rng);
        }
        let mean = sum as f64 / n as f64;
        // 3 sigma / 10^3 with sigma = 0.5
        assert!((mean - 1.5).abs() < 3.0 * 0.5 / 1000.0, "mean {mean}");
    }

    #[test]
    fn zipf_empirical_tail_matches_constructor_constant() {
        let law = OffspringLaw::new(OffspringSpec::ZipfPareto { beta: 1.5, shift: 1 }).unwrap();
        let mut rng = StreamKey::root(11).rng();
        let n = 1_000_000u64;
        let mut above = 0u64;
        for _ in 0..n {
            if law.sample(&mut rng) > 100 {
                above += 1;
            }
        }
        let empirical = above as f64 / n as f64 * 100f64.powf(1.5);
        let exact = law.survival(100) * 100f64.powf(1.5);
        assert!(
            (empirical / exact - 1.0).abs() < 0.2,
            "empirical {empirical} vs exact {exact}"
        );
    }

    #[test]
    fn weibull_sampler_matches_survival() {
        let law = OffspringLaw::new(OffspringSpec::DiscreteWeibull { beta: 0.5, l: 1.0, shift: 1 })
            .unwrap();
        let mut rng = StreamKey::root(3).rng();
        let n = 200_000u64;
        let mut above_4 = 0u64;
        for _ in 0..n {
            if law.sample(&mut rng) > 4 {
                above_4 += 1;
            }
        }
        let p = above_4 as f64 / n as f64;
        let exact = law.survival(4);
        assert!((p - exact).abs() < 4.0 * (exact * (1.0 - exact) / n as f64).sqrt() + 1e-4);
    }
}
