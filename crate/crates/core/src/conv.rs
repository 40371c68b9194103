//! Truncated nonnegative-series convolution: direct products for short
//! operands, FFT above a crossover.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

/// Above this operand-product size the FFT path wins.
const DIRECT_OP_LIMIT: u128 = 1 << 22;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Convolution of `a` and `b` truncated to degrees `0..=max_degree`.
///
/// Coefficients are treated as exact; the caller accounts for mass at
/// degrees beyond the cutoff.
pub fn convolve_trunc(a: &[f64], b: &[f64], max_degree: usize) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let full = a.len() + b.len() - 1;
    let out_len = full.min(max_degree + 1);
    if (a.len() as u128) * (b.len() as u128) <= DIRECT_OP_LIMIT {
        convolve_direct(a, b, out_len)
    } else {
        convolve_fft(a, b, out_len)
    }
}

fn convolve_direct(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = vec![0.0f64; out_len];
    for (i, &s) in short.iter().enumerate() {
        if s == 0.0 || i >= out_len {
            continue;
        }
        let take = (out_len - i).min(long.len());
        for (o, &l) in out[i..i + take].iter_mut().zip(&long[..take]) {
            *o += s * l;
        }
    }
    out
}

fn convolve_fft(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    let full = a.len() + b.len() - 1;
    let n = full.next_power_of_two();
    let mut fa: Vec<Complex64> = Vec::with_capacity(n);
    // Pack both real sequences into one complex transform: fa = a + i*b.
    for i in 0..n {
        let re = a.get(i).copied().unwrap_or(0.0);
        let im = b.get(i).copied().unwrap_or(0.0);
        fa.push(Complex64::new(re, im));
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(&mut fa);
    // With z = FFT(a + ib): FFT(a)[k] = (z[k] + conj(z[n-k]))/2,
    // FFT(b)[k] = (z[k] - conj(z[n-k]))/(2i); their product is the transform
    // of the linear convolution (n >= full, so no wraparound).
    let mut prod: Vec<Complex64> = vec![Complex64::default(); n];
    for k in 0..n {
        let zk = fa[k];
        let zn = fa[(n - k) % n].conj();
        let ak = 0.5 * (zk + zn);
        let bk = Complex64::new(0.0, -0.5) * (zk - zn);
        prod[k] = ak * bk;
    }
    let ifft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    ifft.process(&mut prod);
    let scale = 1.0 / n as f64;
    prod.iter().take(out_len).map(|c| c.re * scale).collect()
}

/// Forward FFT of a real series zero-padded to `n` points (`n` a power of two).
pub fn real_fft(series: &[f64], n: usize) -> Vec<Complex64> {
    debug_assert!(n.is_power_of_two() && n >= series.len());
    let mut buf: Vec<Complex64> = series
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(std::iter::repeat(Complex64::default()))
        .take(n)
        .collect();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(&mut buf);
    buf
}

/// Inverse FFT returning the real parts, scaled by 1/n.
pub fn inverse_fft_real(mut freq: Vec<Complex64>) -> Vec<f64> {
    let n = freq.len();
    let ifft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    ifft.process(&mut freq);
    let scale = 1.0 / n as f64;
    freq.iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn direct_matches_hand_product() {
        // (1 + 2x)(3 + x + x^2) = 3 + 7x + 3x^2 + 2x^3
        let got = convolve_trunc(&[1.0, 2.0], &[3.0, 1.0, 1.0], 10);
        assert_eq!(got.len(), 4);
        for (g, e) in got.iter().zip([3.0, 7.0, 3.0, 2.0]) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn truncation_drops_high_degrees() {
        let got = convolve_trunc(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0], 2);
        assert_eq!(got, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn fft_agrees_with_direct_on_random_series() {
        let a: Vec<f64> = (0..3000).map(|i| ((i * 2654435761u64 as usize) % 997) as f64 / 997.0).collect();
        let b: Vec<f64> = (0..2500).map(|i| ((i * 40503usize + 7) % 991) as f64 / 991.0).collect();
        let direct = convolve_direct(&a, &b, a.len() + b.len() - 1);
        let fft = convolve_fft(&a, &b, a.len() + b.len() - 1);
        let scale: f64 = direct.iter().cloned().fold(0.0, f64::max);
        for (d, f) in direct.iter().zip(&fft) {
            assert_abs_diff_eq!(d / scale, f / scale, epsilon = 1e-12);
        }
    }
}
