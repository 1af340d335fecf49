//! Laguerre, Gegenbauer and Bessel functions plus `ln Γ`.
//!
//! The Bessel routines are built on the entire function
//! `J̃_ν(z) = (z/2)^{-ν} J_ν(z) = Σ_k (-1)^k (z/2)^{2k} / (k! Γ(k+ν+1))`,
//! summed with compensation. Non-integer powers use the principal branch.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default bound on `|z|` for the Bessel series.
pub const DEFAULT_BESSEL_BOUND: f64 = 60.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "log_gamma needs x > 0, got {x}"
        )));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    // Shift small arguments up; the Lanczos sum is most accurate for x >= 0.5.
    if x < 0.5 {
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(log_gamma(x)?.exp())
}

/// `1/Γ(x)` for real `x`, zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if x > 0.0 {
        return (-ln_gamma_pos(x)).exp();
    }
    if x == x.floor() {
        return 0.0;
    }
    // Reflection: 1/Γ(x) = Γ(1-x) sin(πx) / π.
    (ln_gamma_pos(1.0 - x)).exp() * (PI * x).sin() / PI
}

/// Generalised Laguerre polynomial `L_k^{(α)}(t)` by three-term recurrence.
pub fn laguerre(k: usize, alpha: f64, t: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - t;
    for n in 1..k {
        let n = n as f64;
        let next = ((2.0 * n + 1.0 + alpha - t) * cur - (n + alpha) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Power-series coefficients `c_j` with `L_k^{(α)}(t) = Σ_j c_j t^j`.
pub fn laguerre_coefficients(k: usize, alpha: f64) -> Vec<f64> {
    // c_j = (-1)^j / (j! (k-j)!) Π_{i=j+1}^{k} (i + α)
    (0..=k)
        .map(|j| {
            let mut c = if j % 2 == 0 { 1.0 } else { -1.0 };
            for i in j + 1..=k {
                c *= i as f64 + alpha;
            }
            for i in 1..=j {
                c /= i as f64;
            }
            for i in 1..=k - j {
                c /= i as f64;
            }
            c
        })
        .collect()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Gegenbauer parameter must be positive, got {lambda}"
        )));
    }
    Ok(())
}

/// Gegenbauer polynomial `C_k^{(λ)}(w)`, `λ > 0`.
pub fn gegenbauer(k: usize, lambda: f64, w: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(gegenbauer_unchecked(k, lambda, w))
}

fn gegenbauer_unchecked(k: usize, lambda: f64, w: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 2.0 * lambda * w;
    for n in 1..k {
        let n = n as f64;
        let next = (2.0 * (n + lambda) * w * cur - (n + 2.0 * lambda - 1.0) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `C_0^{(λ)}(w), …, C_{n-1}^{(λ)}(w)`.
pub fn gegenbauer_sequence(n: usize, lambda: f64, w: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let mut out = Vec::with_capacity(n);
    fill_gegenbauer(&mut out, n, lambda, w);
    Ok(out)
}

/// Fills `out` with `C_0^{(λ)}(w), …, C_{n-1}^{(λ)}(w)`; no parameter check.
pub(crate) fn fill_gegenbauer(out: &mut Vec<f64>, n: usize, lambda: f64, w: f64) {
    out.clear();
    if n == 0 {
        return;
    }
    out.push(1.0);
    if n == 1 {
        return;
    }
    out.push(2.0 * lambda * w);
    for k in 1..n - 1 {
        let kf = k as f64;
        let next = (2.0 * (kf + lambda) * w * out[k] - (kf + 2.0 * lambda - 1.0) * out[k - 1])
            / (kf + 1.0);
        out.push(next);
    }
}

/// `C_k^{(λ)}(1) = Γ(k+2λ) / (k! Γ(2λ))`, the maximum of `|C_k^{(λ)}|` on `[-1, 1]`.
pub fn gegenbauer_at_one(k: usize, lambda: f64) -> f64 {
    (0..k).fold(1.0, |acc, j| {
        acc * (j as f64 + 2.0 * lambda) / (j as f64 + 1.0)
    })
}

/// Compensated complex summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Options for the Bessel series.
#[derive(Debug, Clone, Copy)]
pub struct BesselOptions {
    /// Largest accepted `|z|`.
    pub max_abs: f64,
}

impl Default for BesselOptions {
    fn default() -> Self {
        Self {
            max_abs: DEFAULT_BESSEL_BOUND,
        }
    }
}

/// Value of `J̃_ν(z)` together with a rounding-error estimate.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex64,
    /// `ε · max_k |term_k|`, the dominant cancellation error.
    pub error_estimate: f64,
    pub terms: usize,
}

/// `J̃_ν(z) = (z/2)^{-ν} J_ν(z)` with the default bound.
pub fn bessel_j_tilde(nu: f64, z: Complex64) -> Result<Complex64> {
    Ok(bessel_j_tilde_with(nu, z, BesselOptions::default())?.value)
}

/// `J̃_ν(z)` with explicit options and an error estimate.
pub fn bessel_j_tilde_with(nu: f64, z: Complex64, opts: BesselOptions) -> Result<SeriesValue> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Bessel order must exceed -1, got {nu}"
        )));
    }
    let abs = z.norm();
    if !abs.is_finite() || abs > opts.max_abs {
        return Err(Error::BesselArgumentTooLarge {
            abs,
            bound: opts.max_abs,
        });
    }
    if abs > MILLER_THRESHOLD && abs - z.im.abs() > MILLER_THRESHOLD {
        let value = bessel_j_tilde_miller(nu, z);
        return Ok(SeriesValue {
            value,
            error_estimate: f64::EPSILON * abs * abs * value.norm().max(abs.powf(-nu - 0.5)),
            terms: 0,
        });
    }
    let q = -(z * 0.5) * (z * 0.5);
    let mut term = Complex64::new(recip_gamma(nu + 1.0), 0.0);
    let mut sum = KahanSum::new();
    sum.add(term);
    let mut max_term = term.norm();
    let mut small = 0usize;
    let mut k = 0usize;
    while small < 3 {
        k += 1;
        let kf = k as f64;
        term = term * q / (kf * (kf + nu));
        sum.add(term);
        let t = term.norm();
        max_term = max_term.max(t);
        if t <= 1e-18 * max_term {
            small += 1;
        } else {
            small = 0;
        }
        if k > 10_000 {
            return Err(Error::InvalidParameter(
                "Bessel series failed to stagnate".into(),
            ));
        }
    }
    Ok(SeriesValue {
        value: sum.value(),
        error_estimate: f64::EPSILON * max_term,
        terms: k + 1,
    })
}

/// Above this, and unless `z` is close to the imaginary axis, backward recurrence replaces
/// the power series, whose terms reach `e^{|z|}` while the value is only of size `e^{|Im z|}`.
const MILLER_THRESHOLD: f64 = 8.0;

/// `J̃_ν(z)` by Miller's backward recurrence over the orders `μ + j`, with `μ ∈ [1/2, 3/2)`
/// and `ν - μ` an integer. The scale comes from Gegenbauer's expansion
/// `e^{∓iz} = Γ(μ)(z/2)^{-μ} Σ_j (μ+j)(∓i)^j C_j^μ(1) J_{μ+j}(z)`, with the sign chosen so
/// that `|e^{∓iz}| = e^{|Im z|}` and the sum does not cancel exponentially.
fn bessel_j_tilde_miller(nu: f64, z: Complex64) -> Complex64 {
    let mut mu = nu - nu.floor();
    if mu < 0.5 {
        mu += 1.0;
    }
    let k_target = (nu - mu).round() as i64;
    let abs = z.norm();
    let j_top = ((abs.max(nu) + 40.0 + 10.0 * abs.cbrt()).ceil()) as i64;
    let j_min = k_target.min(0);
    let len = (j_top - j_min + 2) as usize;
    let idx = |j: i64| (j - j_min) as usize;
    let mut f = vec![Complex64::new(0.0, 0.0); len];
    f[idx(j_top)] = Complex64::new(1e-30, 0.0);
    let zinv = z.inv();
    for j in ((j_min + 1)..=j_top).rev() {
        let next = f[idx(j) + 1];
        let v = f[idx(j)] * (2.0 * (mu + j as f64)) * zinv - next;
        f[idx(j - 1)] = v;
        if v.norm() > 1e250 {
            for w in f.iter_mut().skip(idx(j - 1)) {
                *w *= 1e-250;
            }
        }
    }
    let s = if z.im >= 0.0 {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut c = 1.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for j in 0..=j_top {
        if j > 0 {
            c *= (2.0 * mu + j as f64 - 1.0) / j as f64;
            phase *= s;
        }
        sum += phase * ((mu + j as f64) * c) * f[idx(j)];
    }
    let half = z * 0.5;
    f[idx(k_target)] * (s * z).exp() * half.powi(-k_target as i32) * recip_gamma(mu) / sum
}

/// Principal-branch `z^p`.
pub fn cpow(z: Complex64, p: f64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return if p == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    (z.ln() * p).exp()
}

/// `J_ν(z) = (z/2)^ν J̃_ν(z)` on the principal branch.
pub fn bessel_j(nu: f64, z: Complex64) -> Result<Complex64> {
    let integer = nu == nu.round();
    if !integer && z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut(format!(
            "J_{nu} at negative real z = {}",
            z.re
        )));
    }
    let jt = bessel_j_tilde(nu, z)?;
    let half = z * 0.5;
    let pow = if integer && nu >= 0.0 {
        half.powi(nu as i32)
    } else {
        cpow(half, nu)
    };
    Ok(pow * jt)
}

/// `I_ν(x) = e^{-iπν/2} J_ν(ix)` for real `x`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    if x < 0.0 && nu != nu.round() {
        return Err(Error::BranchCut(format!("I_{nu} at negative x = {x}")));
    }
    let phase = Complex64::new(0.0, -PI * nu / 2.0).exp();
    Ok((phase * bessel_j(nu, Complex64::new(0.0, x))?).re)
}
