//! Exact distribution of the population size by iterated composition of the
//! offspring generating function, plus the moment functionals built on it.
//!
//! A generation step maps the coefficient series of |Z_g| through
//! `g ↦ Σ_k p_k g^k`. Finite-support laws use Horner's scheme with truncated
//! convolutions (direct products below a crossover, FFT above). Unbounded
//! laws evaluate the composition pointwise in the frequency domain: the DFT
//! of the next generation at frequency ω is the offspring series evaluated
//! at the complex number Ĝ(ω), with an early-termination bound from the pmf
//! suffix tails.
//!
//! Truncation is never silent: mass pushed beyond the cutoff is tracked in
//! `tail_mass`, and floating-point slack (clamped negatives, dropped pmf
//! residuals) accumulates in `truncation_bound`.

use crate::conv::{convolve_trunc, inverse_fft_real, real_fft};
use crate::laws::OffspringLaw;
use crate::numeric::Kahan;
use rustfft::num_complex::Complex64;

/// Full-support exactness cap: below this the engine never truncates a
/// finite-support law.
const FULL_SUPPORT_CAP: u64 = 1 << 21;
/// Hard ceiling on coefficient-array length.
const HARD_CAP: u64 = 1 << 23;

/// Law of |Z_n| up to a cutoff, with the escaped mass accounted for.
#[derive(Clone, Debug)]
pub struct TruncatedPgf {
    /// `coeffs[k]` = P(|Z_n| = k), k = 0..=cutoff.
    pub coeffs: Vec<f64>,
    /// Mass at population sizes beyond the cutoff.
    pub tail_mass: f64,
    pub generation: u32,
    /// Accumulated bound on mass lost to floating-point clamping and
    /// offspring-series truncation (already contained in `tail_mass`).
    pub truncation_bound: f64,
}

impl TruncatedPgf {
    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Σ k·coeffs[k]; tail mass is not included.
    pub fn mean_lower(&self) -> f64 {
        let mut acc = Kahan::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c > 0.0 {
                acc.add(k as f64 * c);
            }
        }
        acc.value()
    }

    pub fn total_mass(&self) -> f64 {
        let mut acc = Kahan::new();
        for &c in &self.coeffs {
            acc.add(c);
        }
        acc.value()
    }

    /// Two-column CSV (`k,probability`) with a header comment carrying the
    /// generation, cutoff and tail mass.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# generation={} cutoff={} tail_mass={:e}\nk,probability\n",
            self.generation,
            self.cutoff(),
            self.tail_mass
        );
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                out.push_str(&format!("{k},{c:e}\n"));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GwError {
    /// The requested cutoff cannot represent the distribution to the
    /// contract's accuracy; `required` is a sufficient cutoff.
    CutoffTooSmall { requested: u64, required: u64 },
    /// Minimal population b^n alone exceeds any representable cutoff.
    Infeasible { generation: u32, min_population: f64 },
}

impl std::fmt::Display for GwError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GwError::CutoffTooSmall { requested, required } => write!(
                f,
                "cutoff {requested} too small to hold mass 1-1e-6; use at least {required}"
            ),
            GwError::Infeasible { generation, min_population } => write!(
                f,
                "generation {generation} has minimal population {min_population:.3e}, beyond any cutoff"
            ),
        }
    }
}

impl std::error::Error for GwError {}

/// b^n as f64 (monitoring overflow) for feasibility checks.
fn min_population(law: &OffspringLaw, n: u32) -> f64 {
    (law.min_family() as f64).powi(n as i32)
}

/// Exact law of |Z_n| up to `cutoff`, erroring if the cutoff cannot hold
/// total mass 1 − 1e-6.
pub fn evolve_pgf(law: &OffspringLaw, n: u32, cutoff: u64) -> Result<TruncatedPgf, GwError> {
    let pgf = evolve_pgf_unchecked(law, n, cutoff)?;
    if pgf.tail_mass > 1e-6 {
        let required = suggested_cutoff(law, n);
        return Err(GwError::CutoffTooSmall { requested: cutoff, required });
    }
    Ok(pgf)
}

/// A cutoff that holds the bulk comfortably: 16·mⁿ (and at least 4·bⁿ).
pub fn suggested_cutoff(law: &OffspringLaw, n: u32) -> u64 {
    let bulk = 16.0 * law.mean().powi(n as i32);
    let floor = 4.0 * min_population(law, n);
    bulk.max(floor).min(HARD_CAP as f64).ceil() as u64
}

/// Same iteration without the coverage check; `tail_mass` carries whatever
/// escapes. Functionals whose integrand vanishes at large populations use
/// this directly.
pub fn evolve_pgf_unchecked(
    law: &OffspringLaw,
    n: u32,
    cutoff: u64,
) -> Result<TruncatedPgf, GwError> {
    let floor = min_population(law, n);
    if floor > HARD_CAP as f64 {
        return Err(GwError::Infeasible { generation: n, min_population: floor });
    }
    if (cutoff as f64) < floor {
        return Err(GwError::CutoffTooSmall { requested: cutoff, required: floor.ceil() as u64 });
    }
    let k = cutoff.min(HARD_CAP) as usize;

    let mut coeffs = vec![0.0f64; 2];
    coeffs[1] = 1.0; // single ancestor
    let mut bound = 0.0f64;
    let finite_top = law.max_family();

    for g in 0..n {
        coeffs = if g == 0 {
            // First generation is the offspring law itself, trimmed to its
            // actual support so later convolutions stay as short as possible.
            let top = finite_top.map_or(k as u64, |t| t.min(k as u64));
            law.pmf_table(top).0
        } else {
            match finite_top {
                Some(_) => compose_finite(law, &coeffs, k),
                None => compose_unbounded(law, &coeffs, k),
            }
        };
        // Exact support floor: no population below b^{g+1} is possible.
        let floor_g = (law.min_family() as f64).powi(g as i32 + 1);
        let len = coeffs.len();
        let floor_idx = if floor_g <= k as f64 { (floor_g as usize).min(len) } else { len };
        for c in coeffs.iter_mut().take(floor_idx) {
            if *c != 0.0 {
                bound += c.abs();
                *c = 0.0;
            }
        }
        // Clamp FFT noise; the clamped magnitude goes into the slack bound.
        for c in coeffs.iter_mut() {
            if *c < 0.0 {
                bound += -*c;
                *c = 0.0;
            }
        }
    }

    if coeffs.len() < k + 1 {
        coeffs.resize(k + 1, 0.0);
    }
    let total = {
        let mut acc = Kahan::new();
        for &c in &coeffs {
            acc.add(c);
        }
        acc.value()
    };
    Ok(TruncatedPgf {
        coeffs,
        tail_mass: (1.0 - total).max(0.0),
        generation: n,
        truncation_bound: bound,
    })
}

/// Horner evaluation of Σ p_k g^k for finite-support offspring.
fn compose_finite(law: &OffspringLaw, g: &[f64], k: usize) -> Vec<f64> {
    let b = law.min_family();
    let top = law.max_family().unwrap();
    let mut acc = vec![law.pmf(top)];
    let mut j = top;
    while j > b {
        j -= 1;
        acc = convolve_trunc(&acc, g, k);
        if acc.is_empty() {
            acc = vec![0.0];
        }
        acc[0] += law.pmf(j);
    }
    // multiply by g^b
    for _ in 0..b {
        acc = convolve_trunc(&acc, g, k);
    }
    acc
}

/// Frequency-domain composition for unbounded offspring laws.
///
/// The cyclic transform of the next generation is Σ p_k Ĝ(ω)^k; evaluating
/// with the pmf truncated at the cutoff and stopping once the suffix tail
/// cannot move the value by 1e-17 keeps the per-point cost near
/// `min(cutoff, 40/(1−|Ĝ|))` terms. The FFT length is ≥ 4·cutoff so mass
/// wrapping back into 0..=cutoff is bounded by the (tracked) escaped tail.
fn compose_unbounded(law: &OffspringLaw, g: &[f64], cutoff: usize) -> Vec<f64> {
    let b = law.min_family() as usize;
    let (pmf, _residual) = law.pmf_table(cutoff as u64);
    // Suffix tails of the truncated pmf for the stopping rule.
    let mut suffix = vec![0.0f64; pmf.len() + 1];
    for i in (0..pmf.len()).rev() {
        suffix[i] = suffix[i + 1] + pmf[i];
    }
    let nfft = (4 * (cutoff + 1)).next_power_of_two();
    let freq = real_fft(g, nfft);
    let half = nfft / 2;
    let evaluate = |z: Complex64| -> Complex64 {
        let r = z.norm().min(1.0);
        let mut zk = Complex64::new(1.0, 0.0);
        for _ in 0..b {
            zk *= z;
        }
        let mut acc = Complex64::default();
        let mut rk = r.powi(b as i32);
        let mut k = b;
        while k < pmf.len() {
            acc += pmf[k] * zk;
            if suffix[k + 1] * rk < 1e-17 {
                break;
            }
            zk *= z;
            rk *= r;
            k += 1;
        }
        acc
    };
    use rayon::prelude::*;
    let head: Vec<Complex64> = (0..=half).into_par_iter().map(|i| evaluate(freq[i])).collect();
    let mut composed: Vec<Complex64> = vec![Complex64::default(); nfft];
    for (i, &v) in head.iter().enumerate() {
        composed[i] = v;
        if i != 0 && i != half {
            composed[nfft - i] = v.conj();
        }
    }
    let mut out = inverse_fft_real(composed);
    out.truncate(cutoff + 1);
    out
}

/// Regime of the harmonic-moment normalizer `A_n(r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmonicRegime {
    /// r above the Schröder constant: A_n = p1^{−n}.
    SuperSchroder,
    /// r at the Schröder constant (within 1e-9): A_n = n·p1^{−n}.
    AtSchroder,
    /// r below the Schröder constant: A_n = m^{nr}.
    SubSchroder,
}

#[derive(Clone, Debug)]
pub struct HarmonicMoment {
    /// E[|Z_n|^{−r}] from the captured coefficients.
    pub raw: f64,
    /// `raw` plus the largest possible tail contribution.
    pub raw_upper: f64,
    /// raw · A_n(r)
    pub normalized: f64,
    pub regime: HarmonicRegime,
    pub normalizer: f64,
}

/// E[|Z_n|^{−r}] with the normalizer matching the Schröder comparison.
pub fn harmonic_moment(law: &OffspringLaw, n: u32, r: f64) -> Result<HarmonicMoment, GwError> {
    let cutoff = functional_cutoff(law, n, true);
    let pgf = evolve_pgf(law, n, cutoff)?;
    Ok(harmonic_moment_of(law, &pgf, r))
}

/// Same moment evaluated on an already-computed distribution.
pub fn harmonic_moment_of(law: &OffspringLaw, pgf: &TruncatedPgf, r: f64) -> HarmonicMoment {
    let mut acc = Kahan::new();
    for (k, &c) in pgf.coeffs.iter().enumerate().skip(1) {
        if c > 0.0 {
            acc.add(c * (k as f64).powf(-r));
        }
    }
    let raw = acc.value();
    let raw_upper = raw + pgf.tail_mass * (pgf.cutoff() as f64 + 1.0).powf(-r);
    let n = pgf.generation;
    let schroder = law.schroder();
    let (regime, normalizer) = if (r - schroder).abs() < 1e-9 {
        (HarmonicRegime::AtSchroder, n as f64 * law.p1().powi(-(n as i32)))
    } else if r > schroder {
        (HarmonicRegime::SuperSchroder, law.p1().powi(-(n as i32)))
    } else {
        (HarmonicRegime::SubSchroder, law.mean().powf(n as f64 * r))
    };
    HarmonicMoment { raw, raw_upper, normalized: raw * normalizer, regime, normalizer }
}

#[derive(Clone, Debug)]
pub struct StretchedMoment {
    /// E[exp(−l·|Z_n|^β)] from the captured coefficients.
    pub raw: f64,
    /// `raw` plus the tail bound tail_mass·exp(−l·(K+1)^β).
    pub raw_upper: f64,
    /// (1/n)·log raw
    pub log_scaled: f64,
    /// (1/n)·log(−log raw)
    pub loglog_scaled: f64,
}

/// E[exp(−l·|Z_n|^β)]; the integrand kills large populations, so the engine
/// runs unchecked with a cutoff of max(64·bⁿ, 1e5).
pub fn stretched_moment(
    law: &OffspringLaw,
    n: u32,
    l: f64,
    beta: f64,
) -> Result<StretchedMoment, GwError> {
    assert!(l > 0.0 && beta > 0.0, "need l > 0 and beta > 0");
    let cutoff = functional_cutoff(law, n, false);
    let pgf = evolve_pgf_unchecked(law, n, cutoff)?;
    Ok(stretched_moment_of(&pgf, l, beta, n))
}

pub fn stretched_moment_of(pgf: &TruncatedPgf, l: f64, beta: f64, n: u32) -> StretchedMoment {
    let mut acc = Kahan::new();
    for (k, &c) in pgf.coeffs.iter().enumerate().skip(1) {
        if c > 0.0 {
            acc.add(c * (-l * (k as f64).powf(beta)).exp());
        }
    }
    let raw = acc.value();
    let raw_upper = raw + pgf.tail_mass * (-l * (pgf.cutoff() as f64 + 1.0).powf(beta)).exp();
    let nf = n.max(1) as f64;
    let log_scaled = raw.ln() / nf;
    let loglog_scaled = (-raw.ln()).ln() / nf;
    StretchedMoment { raw, raw_upper, log_scaled, loglog_scaled }
}

#[derive(Clone, Copy, Debug)]
pub struct WnTail {
    /// Mass of {W_n > x} among captured coefficients.
    pub lower: f64,
    /// `lower` + tail_mass (everything beyond the cutoff exceeds the
    /// threshold or not; counting it in gives the upper bracket).
    pub upper: f64,
}

/// P(W_n > x) = P(|Z_n| > x·mⁿ), bracketed by the truncation tail.
pub fn wn_tail(law: &OffspringLaw, n: u32, x: f64) -> Result<WnTail, GwError> {
    assert!(x > 0.0);
    let cutoff = functional_cutoff(law, n, true);
    let pgf = evolve_pgf_unchecked(law, n, cutoff)?;
    let threshold = x * law.mean().powi(n as i32);
    let mut acc = Kahan::new();
    for (k, &c) in pgf.coeffs.iter().enumerate() {
        if c > 0.0 && k as f64 > threshold {
            acc.add(c);
        }
    }
    let lower = acc.value();
    Ok(WnTail { lower, upper: (lower + pgf.tail_mass).min(1.0) })
}

/// Cutoff policy: exact full support for finite laws when it fits, otherwise
/// bulk-sized for mass-hungry functionals and floor-sized for integrands
/// that vanish at large populations.
fn functional_cutoff(law: &OffspringLaw, n: u32, needs_bulk: bool) -> u64 {
    if let Some(top) = law.max_family() {
        let full = (top as f64).powi(n as i32);
        if full <= FULL_SUPPORT_CAP as f64 {
            return full as u64;
        }
    }
    let floor = min_population(law, n);
    let c = if needs_bulk {
        (16.0 * law.mean().powi(n as i32)).max(4.0 * floor).max(1e5)
    } else {
        (64.0 * floor).max(1e5)
    };
    c.min(HARD_CAP as f64) as u64
}
