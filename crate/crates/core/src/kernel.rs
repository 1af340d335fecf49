//! Zonal reproducing kernels and the series for the semigroup kernel `K(x, y; ω)`
//! and the Fourier kernel `K(x, y) = K(x, y; iπ/2)`.
//!
//! Every kernel is evaluated through per-`z` coefficient vectors
//! `A(z, w) = Σ a_k(z) C_k^λ(w)`, `B(z, w) = Σ b_k(z) C_{k-1}^{λ+1}(w)`, so a single
//! truncation serves all `w` at a fixed radius product.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{wedge_vectors, Multivector};
use crate::error::{Error, Result};
use crate::radial::DeformParams;
use crate::specfun::{
    bessel_j, bessel_j_tilde_with, cpow, fill_gegenbauer, gegenbauer_at_one, recip_gamma,
    BesselOptions, DEFAULT_BESSEL_BOUND,
};

/// `ω = iπ/2`.
pub const FOURIER_OMEGA: Complex64 = Complex64::new(0.0, FRAC_PI_2);

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_unit(v: &[f64]) -> Result<()> {
    let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitVector(n));
    }
    Ok(())
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `P_k(x', y') = ((k+2λ)/2λ) C_k^λ(w) - (x'∧y') C_{k-1}^{λ+1}(w)`, `P_0 = 1`.
pub fn repr_p(k: usize, xp: &[f64], yp: &[f64]) -> Result<Multivector> {
    check_unit(xp)?;
    check_unit(yp)?;
    let m = xp.len();
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "reproducing kernels need m >= 3, got {m}"
        )));
    }
    let lam = (m as f64 - 2.0) / 2.0;
    let w = dot(xp, yp).clamp(-1.0, 1.0);
    let mut seq = Vec::new();
    fill_gegenbauer(&mut seq, k + 1, lam, w);
    let mut out = Multivector::scalar(m, (k as f64 + 2.0 * lam) / (2.0 * lam) * seq[k]);
    if k >= 1 {
        let mut up = Vec::new();
        fill_gegenbauer(&mut up, k, lam + 1.0, w);
        out += &wedge_vectors(xp, yp)?.scale(-up[k - 1]);
    }
    Ok(out)
}

/// `Q_j(x', y') = ((j+1)/2λ) C_{j+1}^λ(w) + (x'∧y') C_j^{λ+1}(w)`.
pub fn repr_q(j: usize, xp: &[f64], yp: &[f64]) -> Result<Multivector> {
    check_unit(xp)?;
    check_unit(yp)?;
    let m = xp.len();
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "reproducing kernels need m >= 3, got {m}"
        )));
    }
    let lam = (m as f64 - 2.0) / 2.0;
    let w = dot(xp, yp).clamp(-1.0, 1.0);
    let mut seq = Vec::new();
    fill_gegenbauer(&mut seq, j + 2, lam, w);
    let mut up = Vec::new();
    fill_gegenbauer(&mut up, j + 1, lam + 1.0, w);
    let mut out = Multivector::scalar(m, (j as f64 + 1.0) / (2.0 * lam) * seq[j + 1]);
    out += &wedge_vectors(xp, yp)?.scale(up[j]);
    Ok(out)
}

/// Streak truncation of the kernel series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub tol: f64,
    pub k_max: usize,
    pub streak: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            k_max: 200,
            streak: 3,
        }
    }
}

impl Truncation {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "truncation tol must be positive, got {}",
                self.tol
            )));
        }
        if self.k_max < 8 {
            return Err(Error::InvalidParameter(format!(
                "k_max must be at least 8, got {}",
                self.k_max
            )));
        }
        if self.streak == 0 {
            return Err(Error::InvalidParameter(
                "truncation streak must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub params: DeformParams,
    pub omega: Complex64,
    pub trunc: Truncation,
    /// Largest accepted Bessel argument modulus.
    pub bessel_bound: f64,
}

impl KernelParams {
    pub fn new(params: DeformParams, omega: Complex64, trunc: Truncation) -> Result<Self> {
        let kp = Self {
            params,
            omega,
            trunc,
            bessel_bound: DEFAULT_BESSEL_BOUND,
        };
        kp.validate()?;
        Ok(kp)
    }

    pub fn fourier(params: DeformParams) -> Result<Self> {
        Self::new(params, FOURIER_OMEGA, Truncation::default())
    }

    pub fn with_bessel_bound(mut self, bound: f64) -> Self {
        self.bessel_bound = bound;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.trunc.validate()?;
        let om = self.omega;
        if !om.re.is_finite() || !om.im.is_finite() || om.re < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ω must satisfy Re ω >= 0, got {om}"
            )));
        }
        if om.re == 0.0 {
            let n = om.im / PI;
            if (n - n.round()).abs() < 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "ω = {om} lies in iπℤ where the kernel is singular"
                )));
            }
        }
        Ok(())
    }

    pub fn is_fourier(&self) -> bool {
        self.omega == FOURIER_OMEGA
    }

    fn bessel_opts(&self) -> BesselOptions {
        BesselOptions {
            max_abs: self.bessel_bound,
        }
    }

    /// `α_k = 2 e^{ωδ/2} (2 sinh ω)^{-γ_k/2}`, principal branch.
    pub fn alpha(&self, k: usize) -> Complex64 {
        let p = &self.params;
        let two_sinh = self.omega.sinh() * 2.0;
        (self.omega * (p.delta() / 2.0)).exp() * 2.0 * cpow(two_sinh, -p.gamma(k) / 2.0)
    }

    /// `e^{-coth ω (r² + s²)/2}`.
    pub fn gaussian_prefactor(&self, r: f64, s: f64) -> Complex64 {
        let coth = self.omega.cosh() / self.omega.sinh();
        (-coth * (0.5 * (r * r + s * s))).exp()
    }

    /// Eigenvalue `e^{-ωt} e^{-ωℓ/(1+c)}` on `φ_{t,ℓ}`.
    pub fn eigenvalue(&self, t: usize, ell: usize) -> Complex64 {
        eigenvalue(self.omega, t, ell, &self.params)
    }
}

/// `e^{-ωt} e^{-ωℓ/(1+c)}`.
pub fn eigenvalue(omega: Complex64, t: usize, ell: usize, params: &DeformParams) -> Complex64 {
    (-omega * (t as f64 + ell as f64 / (1.0 + params.c))).exp()
}

/// Coefficient vectors of the two series at a fixed `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZCoefficients {
    pub lambda: f64,
    /// Coefficient of `C_k^λ(w)`.
    pub a: Vec<Complex64>,
    /// Coefficient of `C_{k-1}^{λ+1}(w)`; `b[0]` is unused.
    pub b: Vec<Complex64>,
    pub terms_used: usize,
    pub tail_estimate: f64,
}

impl ZCoefficients {
    fn origin(lambda: f64, a0: Complex64) -> Self {
        Self {
            lambda,
            a: vec![a0],
            b: vec![Complex64::new(0.0, 0.0)],
            terms_used: 1,
            tail_estimate: 0.0,
        }
    }

    /// `(A(z, w), B(z, w))`.
    pub fn eval(&self, w: f64) -> (Complex64, Complex64) {
        let mut ga = Vec::new();
        let mut gb = Vec::new();
        self.eval_with(w, &mut ga, &mut gb)
    }

    /// As [`Self::eval`] with caller-provided scratch space.
    pub fn eval_with(
        &self,
        w: f64,
        ga: &mut Vec<f64>,
        gb: &mut Vec<f64>,
    ) -> (Complex64, Complex64) {
        let n = self.a.len();
        fill_gegenbauer(ga, n, self.lambda, w);
        fill_gegenbauer(gb, n.saturating_sub(1), self.lambda + 1.0, w);
        let a = self.a.iter().zip(ga.iter()).map(|(c, g)| c * g).sum();
        let b = self
            .b
            .iter()
            .skip(1)
            .zip(gb.iter())
            .map(|(c, g)| c * g)
            .sum();
        (a, b)
    }
}

/// Sums terms until `streak` consecutive magnitudes fall below `tol · max`.
fn truncate<F>(trunc: &Truncation, lambda: f64, z: f64, mut term: F) -> Result<ZCoefficients>
where
    F: FnMut(usize) -> Result<(Complex64, Complex64, f64)>,
{
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut max = 0.0f64;
    let mut small = 0usize;
    let mut tail = 0.0;
    let mut rounding = 0.0;
    for k in 0..=trunc.k_max {
        let (ak, bk, err) = term(k)?;
        let mut mag = ak.norm() * gegenbauer_at_one(k, lambda);
        if k >= 1 {
            mag += bk.norm() * gegenbauer_at_one(k - 1, lambda + 1.0) * z;
        }
        rounding += err;
        a.push(ak);
        b.push(bk);
        max = max.max(mag);
        if mag <= trunc.tol * max {
            small += 1;
            tail += mag;
        } else {
            small = 0;
            tail = 0.0;
        }
        if small >= trunc.streak {
            return Ok(ZCoefficients {
                lambda,
                a,
                b,
                terms_used: k + 1,
                tail_estimate: tail + rounding,
            });
        }
    }
    Err(Error::TruncationFailure { k_max: trunc.k_max })
}

/// Radial coefficients `(p_k(z), q_k(z))` in `K = pref · Σ_k p_k P_k(x',y') + q_k Q_k(x',y')`.
///
/// `p_k = α_k z^{k/(1+c)} J̃_{γ_k/2-1}(u)`, `q_k = α_k/(2 sinh ω) z^{1+k/(1+c)} J̃_{γ_k/2}(u)`,
/// `u = iz / sinh ω`. Returns also a rounding estimate.
pub fn pq_coefficients(k: usize, z: f64, kp: &KernelParams) -> Result<(Complex64, Complex64, f64)> {
    let p = &kp.params;
    let sh = kp.omega.sinh();
    let u = I * z / sh;
    let g = p.gamma(k);
    let alpha = kp.alpha(k);
    let zp = z.powf(k as f64 / (1.0 + p.c));
    let j0 = bessel_j_tilde_with(g / 2.0 - 1.0, u, kp.bessel_opts())?;
    let j1 = bessel_j_tilde_with(g / 2.0, u, kp.bessel_opts())?;
    let pk = alpha * zp * j0.value;
    let qk = alpha / (sh * 2.0) * (zp * z) * j1.value;
    let err = alpha.norm() * zp * (j0.error_estimate + z * j1.error_estimate / (2.0 * sh.norm()));
    Ok((pk, qk, err))
}

/// Coefficient vectors of the semigroup series at `z ≥ 0`.
pub fn semigroup_coefficients(z: f64, kp: &KernelParams) -> Result<ZCoefficients> {
    kp.validate()?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "z must be a finite non-negative number, got {z}"
        )));
    }
    let lam = kp.params.lambda();
    if z == 0.0 {
        let g0 = kp.params.gamma(0);
        return Ok(ZCoefficients::origin(
            lam,
            kp.alpha(0) * recip_gamma(g0 / 2.0),
        ));
    }
    let mut prev_q = Complex64::new(0.0, 0.0);
    truncate(&kp.trunc, lam, z, |k| {
        let (pk, qk, err) = pq_coefficients(k, z, kp)?;
        let kf = k as f64;
        let a = pk * ((kf + 2.0 * lam) / (2.0 * lam)) + prev_q * (kf / (2.0 * lam));
        let b = if k == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            (prev_q - pk) / z
        };
        prev_q = qk;
        Ok((a, b, err))
    })
}

/// `α_k = e^{-iπk/(2(1+c))}` of the Fourier kernel; zero for `k < 0`.
fn fourier_alpha(k: isize, c: f64) -> Complex64 {
    if k < 0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, -PI * k as f64 / (2.0 * (1.0 + c))).exp()
    }
}

/// `K(0, y) = 1 / (2^{γ_0/2-1} Γ(γ_0/2))`.
pub fn fourier_origin_value(params: &DeformParams) -> f64 {
    let g = params.gamma(0) / 2.0;
    recip_gamma(g) / 2f64.powf(g - 1.0)
}

/// Coefficient vectors of the Fourier series, evaluated literally with `J_ν(z)`.
pub fn fourier_coefficients(
    z: f64,
    params: &DeformParams,
    trunc: &Truncation,
) -> Result<ZCoefficients> {
    params.validate()?;
    trunc.validate()?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "z must be a finite non-negative number, got {z}"
        )));
    }
    let lam = params.lambda();
    if z == 0.0 {
        return Ok(ZCoefficients::origin(
            lam,
            Complex64::new(fourier_origin_value(params), 0.0),
        ));
    }
    let c = params.c;
    let delta = params.delta();
    let zc = Complex64::new(z, 0.0);
    let pre_a = z.powf(-(delta - 2.0) / 2.0);
    let pre_b = z.powf(-delta / 2.0);
    truncate(trunc, lam, z, |k| {
        let kf = k as f64;
        let ki = k as isize;
        let jk = bessel_j(params.gamma(k) / 2.0 - 1.0, zc)?;
        let jprev = if k >= 1 {
            bessel_j(params.gamma(k - 1) / 2.0, zc)?
        } else {
            Complex64::new(0.0, 0.0)
        };
        let (al, alp) = (fourier_alpha(ki, c), fourier_alpha(ki - 1, c));
        let a = pre_a
            * (al * ((kf + 2.0 * lam) / (2.0 * lam)) * jk - I * alp * (kf / (2.0 * lam)) * jprev);
        let b = if k == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            pre_b * (-al * jk - I * alp * jprev)
        };
        Ok((a, b, 0.0))
    })
}

/// `(A, B)` of the Fourier kernel at `(z, w)`.
pub fn fourier_ab(
    z: f64,
    w: f64,
    params: &DeformParams,
    trunc: &Truncation,
) -> Result<(Complex64, Complex64)> {
    Ok(fourier_coefficients(z, params, trunc)?.eval(w))
}

/// `(A, B)` of the semigroup series at `(z, w)`, without the Gaussian prefactor.
pub fn semigroup_ab(z: f64, w: f64, kp: &KernelParams) -> Result<(Complex64, Complex64)> {
    Ok(semigroup_coefficients(z, kp)?.eval(w))
}

/// Kernel value at a pair of points.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelValue {
    pub a: Complex64,
    pub b: Complex64,
    /// `prefactor · (A + (x̲∧y̲) B)`.
    pub assembled: Multivector,
    pub terms_used: usize,
    pub tail_estimate: f64,
}

/// `(r, s, z, w)` for a pair of points; `w = 0` when `z = 0`.
fn polar_pair(x: &[f64], y: &[f64], m: usize) -> Result<(f64, f64, f64, f64)> {
    if x.len() != m {
        return Err(Error::DimensionMismatch(m, x.len()));
    }
    if y.len() != m {
        return Err(Error::DimensionMismatch(m, y.len()));
    }
    let (r, s) = (norm(x), norm(y));
    let z = r * s;
    let w = if z > 0.0 {
        (dot(x, y) / z).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    Ok((r, s, z, w))
}

fn assemble(
    x: &[f64],
    y: &[f64],
    coeffs: &ZCoefficients,
    w: f64,
    pref: Complex64,
) -> Result<KernelValue> {
    let m = x.len();
    let (a, b) = coeffs.eval(w);
    let mut assembled = Multivector::scalar(m, a);
    if b != Complex64::new(0.0, 0.0) {
        assembled += &wedge_vectors(x, y)?.scale(b);
    }
    Ok(KernelValue {
        a,
        b,
        assembled: assembled.scale(pref),
        terms_used: coeffs.terms_used,
        tail_estimate: coeffs.tail_estimate,
    })
}

/// `K(x, y; ω) = e^{-coth ω (r²+s²)/2} (A(z,w) + x̲∧y̲ B(z,w))`.
pub fn semigroup_kernel(x: &[f64], y: &[f64], kp: &KernelParams) -> Result<KernelValue> {
    let (r, s, z, w) = polar_pair(x, y, kp.params.m)?;
    let coeffs = semigroup_coefficients(z, kp)?;
    assemble(x, y, &coeffs, w, kp.gaussian_prefactor(r, s))
}

/// `K(x, y) = A(z,w) + x̲∧y̲ B(z,w)`, the deformed Fourier kernel.
pub fn fourier_kernel(
    x: &[f64],
    y: &[f64],
    params: &DeformParams,
    trunc: &Truncation,
) -> Result<KernelValue> {
    let (_, _, z, w) = polar_pair(x, y, params.m)?;
    let coeffs = fourier_coefficients(z, params, trunc)?;
    assemble(x, y, &coeffs, w, Complex64::new(1.0, 0.0))
}

/// Fourier kernel when `ω = iπ/2`, semigroup kernel otherwise.
pub fn kernel(x: &[f64], y: &[f64], kp: &KernelParams) -> Result<KernelValue> {
    if kp.is_fourier() {
        fourier_kernel(x, y, &kp.params, &kp.trunc)
    } else {
        semigroup_kernel(x, y, kp)
    }
}

/// Largest deviation of the two-point Richardson extrapolation of `K(x, y; iπ/2 + ε)`,
/// `ε ∈ {e1, e2}`, from the Fourier kernel. The leftover error is `|K''| e1 e2 / 2`.
pub fn fourier_limit_residual(
    x: &[f64],
    y: &[f64],
    params: &DeformParams,
    trunc: &Truncation,
    e1: f64,
    e2: f64,
) -> Result<f64> {
    if !(e1 > 0.0 && e2 > 0.0 && e1 != e2) {
        return Err(Error::InvalidParameter(format!(
            "need distinct positive ε, got {e1}, {e2}"
        )));
    }
    let at = |eps: f64| -> Result<Multivector> {
        let kp = KernelParams::new(*params, Complex64::new(eps, FRAC_PI_2), *trunc)?;
        Ok(semigroup_kernel(x, y, &kp)?.assembled)
    };
    let rich = (&at(e2)?.scale(e1) - &at(e1)?.scale(e2)).scale(1.0 / (e1 - e2));
    Ok(rich.max_abs_diff(&fourier_kernel(x, y, params, trunc)?.assembled))
}

/// The six auxiliary series of the Fourier kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesComponent {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl SeriesComponent {
    pub const ALL: [SeriesComponent; 6] = [Self::A, Self::B, Self::C, Self::D, Self::E, Self::F];
}

/// `A_λ … F_λ` at `(z, w)`, with `λ = (m-2)/2` taken from `params`.
///
/// `A = Σ α_k (k+λ) J_{γ_k/2-1} C_k^λ`, `B = Σ α_k J_{γ_k/2-1} C_k^λ`,
/// `C = Σ α_{k-1} (k+λ) J_{γ_{k-1}/2} C_k^λ`, `D = Σ α_{k-1} J_{γ_{k-1}/2} C_k^λ`,
/// `E = Σ α_k J_{γ_k/2-1} C_{k-1}^{λ+1}`, `F = Σ α_{k-1} J_{γ_{k-1}/2} C_{k-1}^{λ+1}`.
pub fn kernel_series_component(
    which: SeriesComponent,
    z: f64,
    w: f64,
    params: &DeformParams,
    trunc: &Truncation,
) -> Result<Complex64> {
    use SeriesComponent::*;
    params.validate()?;
    trunc.validate()?;
    if !(z > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "auxiliary series need z > 0, got {z}"
        )));
    }
    let lam = params.lambda();
    let zc = Complex64::new(z, 0.0);
    let c = params.c;
    let upper = matches!(which, E | F);
    let coeffs = truncate(trunc, lam, 1.0, |k| {
        let kf = k as f64;
        let ki = k as isize;
        let v = match which {
            A | B | E => {
                if upper && k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let j = fourier_alpha(ki, c) * bessel_j(params.gamma(k) / 2.0 - 1.0, zc)?;
                    if which == A {
                        j * (kf + lam)
                    } else {
                        j
                    }
                }
            }
            C | D | F => {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let j = fourier_alpha(ki - 1, c) * bessel_j(params.gamma(k - 1) / 2.0, zc)?;
                    if which == C {
                        j * (kf + lam)
                    } else {
                        j
                    }
                }
            }
        };
        Ok(if upper {
            (Complex64::new(0.0, 0.0), v, 0.0)
        } else {
            (v, Complex64::new(0.0, 0.0), 0.0)
        })
    })?;
    let (a, b) = coeffs.eval(w);
    Ok(if upper { b } else { a })
}

/// Residuals `(|r1|, |r2|)` of the two scalar PDEs satisfied by `(f, g) = (A, B)` of the
/// Fourier kernel, derivatives by central differences of step `h`.
pub fn pde_residual(
    z: f64,
    w: f64,
    params: &DeformParams,
    trunc: &Truncation,
    h: f64,
) -> Result<(f64, f64)> {
    if !(z > h) || !(w.abs() + h < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "PDE residual needs z > h and |w| + h < 1, got z={z}, w={w}, h={h}"
        )));
    }
    let ab = |z: f64, w: f64| fourier_ab(z, w, params, trunc);
    let (f, g) = ab(z, w)?;
    let (fzp, gzp) = ab(z + h, w)?;
    let (fzm, gzm) = ab(z - h, w)?;
    let (fwp, gwp) = ab(z, w + h)?;
    let (fwm, gwm) = ab(z, w - h)?;
    let fz = (fzp - fzm) / (2.0 * h);
    let gz = (gzp - gzm) / (2.0 * h);
    let fw = (fwp - fwm) / (2.0 * h);
    let gw = (gwp - gwm) / (2.0 * h);
    let m = params.m as f64;
    let c1 = 1.0 + params.c;
    let r1 = (m - 1.0 + params.c) * g + c1 * z * gz + fw / z + I * c1 * f - I * c1 * z * w * g;
    let r2 = c1 * z * fz - w * fw - params.c * z * w * g - c1 * z * z * w * gz
        + z * (w * w - 1.0) * gw
        + I * c1 * z * z * g;
    Ok((r1.norm(), r2.norm()))
}

fn csv_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV of kernel values at point pairs: `x1..xm, y1..ym, reA, imA, reB, imB, terms_used, tail_estimate`.
pub fn kernel_csv_xy(pairs: &[(Vec<f64>, Vec<f64>)], kp: &KernelParams) -> Result<String> {
    let m = kp.params.m;
    let mut out = String::new();
    let cols: Vec<String> = (1..=m)
        .map(|i| format!("x{i}"))
        .chain((1..=m).map(|i| format!("y{i}")))
        .chain(["reA", "imA", "reB", "imB", "terms_used", "tail_estimate"].map(String::from))
        .collect();
    out.push_str(&cols.join(","));
    out.push('\n');
    let values: Vec<Result<KernelValue>> =
        pairs.par_iter().map(|(x, y)| kernel(x, y, kp)).collect();
    for ((x, y), v) in pairs.iter().zip(values) {
        let v = v?;
        let mut row: Vec<String> = x.iter().chain(y.iter()).map(|t| csv_num(*t)).collect();
        row.extend([v.a.re, v.a.im, v.b.re, v.b.im].map(csv_num));
        row.push(v.terms_used.to_string());
        row.push(csv_num(v.tail_estimate));
        let _ = writeln!(out, "{}", row.join(","));
    }
    Ok(out)
}

/// CSV of the series `(A, B)` on a `(z, w)` grid: `z, w, reA, imA, reB, imB, terms_used, tail_estimate`.
/// The Gaussian prefactor of the semigroup kernel is not included.
pub fn kernel_csv_zw(grid: &[(f64, f64)], kp: &KernelParams) -> Result<String> {
    let mut out = String::from("z,w,reA,imA,reB,imB,terms_used,tail_estimate\n");
    let values: Vec<Result<ZCoefficients>> = grid
        .par_iter()
        .map(|&(z, _)| {
            if kp.is_fourier() {
                fourier_coefficients(z, &kp.params, &kp.trunc)
            } else {
                semigroup_coefficients(z, kp)
            }
        })
        .collect();
    for (&(z, w), coeffs) in grid.iter().zip(values) {
        let coeffs = coeffs?;
        if !(-1.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!(
                "w must lie in [-1, 1], got {w}"
            )));
        }
        let (a, b) = coeffs.eval(w);
        let row = [z, w, a.re, a.im, b.re, b.im].map(csv_num).join(",");
        let _ = writeln!(
            out,
            "{row},{},{}",
            coeffs.terms_used,
            csv_num(coeffs.tail_estimate)
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{embed_vector, random_spin_element, random_unit_vector};
    use crate::specfun::gamma;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(m: usize, c: f64) -> DeformParams {
        DeformParams::new(m, c).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng, m: usize, rmax: f64) -> Vec<f64> {
        let u = random_unit_vector(m, rng);
        let r = rng.random_range(0.05..rmax);
        u.into_iter().map(|t| t * r).collect()
    }

    #[test]
    fn p_zero_is_one_and_sum_is_zonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in [3usize, 4] {
            let lam = (m as f64 - 2.0) / 2.0;
            for _ in 0..10 {
                let x = random_unit_vector(m, &mut rng);
                let y = random_unit_vector(m, &mut rng);
                assert!(
                    repr_p(0, &x, &y)
                        .unwrap()
                        .max_abs_diff(&Multivector::one(m))
                        < 1e-15
                );
                for k in 1..5 {
                    let s = &repr_p(k, &x, &y).unwrap() + &repr_q(k - 1, &x, &y).unwrap();
                    let c = crate::specfun::gegenbauer(k, lam, dot(&x, &y)).unwrap();
                    assert!(
                        s.max_abs_diff(&Multivector::scalar(m, (lam + k as f64) / lam * c)) < 1e-12
                    );
                }
            }
        }
        assert!(matches!(
            repr_p(1, &[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]),
            Err(Error::NonUnitVector(_))
        ));
    }

    #[test]
    fn classical_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in [3usize, 4] {
            let p = params(m, 0.0);
            let norm = 1.0 / (gamma(m as f64 / 2.0).unwrap() * 2f64.powf((m as f64 - 2.0) / 2.0));
            for _ in 0..30 {
                let x = random_point(&mut rng, m, 3.0);
                let y = random_point(&mut rng, m, 3.0);
                let k = fourier_kernel(&x, &y, &p, &Truncation::default()).unwrap();
                let exact = Complex64::new(0.0, -dot(&x, &y)).exp() * norm;
                assert!(k.assembled.max_abs_diff(&Multivector::scalar(m, exact)) < 1e-10);
            }
        }
    }

    #[test]
    fn origin_value() {
        for &c in &[-0.5, 0.0, 1.0, 2.3] {
            let p = params(3, c);
            let y = [0.3, -1.2, 0.5];
            let k = fourier_kernel(&[0.0; 3], &y, &p, &Truncation::default()).unwrap();
            assert!((k.a - fourier_origin_value(&p)).norm() < 1e-15);
            // the z → 0 limit of the series agrees with the origin branch
            let near = fourier_kernel(&[1e-9, 0.0, 0.0], &y, &p, &Truncation::default()).unwrap();
            // the first corrections are of order z and z^{1/(1+c)}
            let z: f64 = 1e-9 * 1.3964;
            assert!(
                (near.a - k.a).norm() < 2.0 * z.powf((1.0 / (1.0 + c)).min(1.0)),
                "c={c}"
            );
        }
    }

    #[test]
    fn mehler_kernel_at_c_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 3;
        let p = params(m, 0.0);
        for omega in [
            Complex64::new(0.4, 0.0),
            Complex64::new(0.4, 0.7),
            Complex64::new(1.3, -0.2),
        ] {
            let kp = KernelParams::new(p, omega, Truncation::default()).unwrap();
            for _ in 0..10 {
                let x = random_point(&mut rng, m, 2.0);
                let y = random_point(&mut rng, m, 2.0);
                let v = semigroup_kernel(&x, &y, &kp).unwrap();
                let mf = m as f64;
                let (sh, ch) = (omega.sinh(), omega.cosh());
                let r2 = dot(&x, &x) + dot(&y, &y);
                let exact = 2f64.powf(1.0 - mf / 2.0) / gamma(mf / 2.0).unwrap()
                    * (omega * (mf / 2.0)).exp()
                    * sh.powf(-mf / 2.0)
                    * (-(ch / sh) * (r2 / 2.0) + dot(&x, &y) / sh).exp();
                let target = Multivector::scalar(m, exact);
                assert!(
                    v.assembled.max_abs_diff(&target) < 1e-10 * (1.0 + exact.norm()),
                    "ω={omega}"
                );
            }
        }
    }

    #[test]
    fn semigroup_route_at_fourier_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &c in &[-0.5, 0.7, 1.0] {
            let p = params(3, c);
            let kp = KernelParams::fourier(p).unwrap();
            for _ in 0..10 {
                let x = random_point(&mut rng, 3, 2.5);
                let y = random_point(&mut rng, 3, 2.5);
                let a = semigroup_kernel(&x, &y, &kp).unwrap().assembled;
                let b = fourier_kernel(&x, &y, &p, &kp.trunc).unwrap().assembled;
                assert!(a.max_abs_diff(&b) < 1e-11, "c={c}");
            }
        }
    }

    #[test]
    fn kernel_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = params(3, 0.6);
        let tr = Truncation::default();
        for seed in 0..5 {
            let x = random_point(&mut rng, 3, 2.0);
            let y = random_point(&mut rng, 3, 2.0);
            let kxy = fourier_kernel(&x, &y, &p, &tr).unwrap().assembled;
            let kyx = fourier_kernel(&y, &x, &p, &tr).unwrap().assembled;
            assert!(kyx.max_abs_diff(&kxy.bar()) < 1e-12);
            let t = 1.7;
            let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
            let ty: Vec<f64> = y.iter().map(|v| v * t).collect();
            let a = fourier_kernel(&tx, &y, &p, &tr).unwrap().assembled;
            let b = fourier_kernel(&x, &ty, &p, &tr).unwrap().assembled;
            assert!(a.max_abs_diff(&b) < 1e-12);
            let s = random_spin_element(3, 4, seed).unwrap();
            let sb = s.bar();
            let act = |v: &[f64]| {
                (&(&sb * &embed_vector(v)) * &s)
                    .to_real_vector(1e-10)
                    .unwrap()
            };
            let lhs = fourier_kernel(&act(&x), &act(&y), &p, &tr)
                .unwrap()
                .assembled;
            let rhs = &(&sb * &kxy) * &s;
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn assembled_has_grades_zero_and_two() {
        let p = params(4, 0.3);
        let kp = KernelParams::new(p, Complex64::new(0.4, 0.7), Truncation::default()).unwrap();
        let v = semigroup_kernel(&[0.3, 0.1, -0.7, 0.2], &[1.0, 0.4, 0.2, -0.3], &kp).unwrap();
        let rest = &(&v.assembled - &v.assembled.grade_project(0).unwrap())
            - &v.assembled.grade_project(2).unwrap();
        assert!(rest.max_abs() < 1e-16);
        assert!(v.terms_used > 3 && v.tail_estimate < 1e-12);
    }

    #[test]
    fn truncation_failure_and_validation() {
        let p = params(3, 0.0);
        let tight = Truncation {
            tol: 1e-300,
            k_max: 8,
            streak: 3,
        };
        assert!(matches!(
            fourier_ab(5.0, 0.2, &p, &tight),
            Err(Error::TruncationFailure { k_max: 8 })
        ));
        assert!(KernelParams::new(p, Complex64::new(0.0, PI), Truncation::default()).is_err());
        assert!(KernelParams::new(p, Complex64::new(-0.1, 0.0), Truncation::default()).is_err());
        let bad = Truncation {
            k_max: 4,
            ..Truncation::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn assembly_of_auxiliary_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        use SeriesComponent::*;
        for &c in &[0.0, 0.7] {
            let p = params(3, c);
            let tr = Truncation::default();
            let lam = p.lambda();
            let delta = p.delta();
            for _ in 0..10 {
                let z: f64 = rng.random_range(0.2..6.0);
                let w: f64 = rng.random_range(-0.95..0.95);
                let comp = |s| kernel_series_component(s, z, w, &p, &tr).unwrap();
                let a = z.powf(-(delta - 2.0) / 2.0)
                    * ((comp(A) - I * comp(C)) / (2.0 * lam) + (comp(B) + I * comp(D)) / 2.0);
                // B multiplies x̲∧y̲ with coefficient -z^{-δ/2}(E + iF)
                let b = -z.powf(-delta / 2.0) * (comp(E) + I * comp(F));
                let (fa, fb) = fourier_ab(z, w, &p, &tr).unwrap();
                assert!((a - fa).norm() < 1e-10 && (b - fb).norm() < 1e-10, "c={c}");
            }
        }
    }

    #[test]
    fn literal_c_and_d_recursions_fail() {
        // The uncorrected forms (1/2λ)∂_w C_λ = e^{iθ}C_{λ+1} are off by a phase and a k = 0 term.
        use SeriesComponent::*;
        let p = params(3, 0.7);
        let up = params(5, 0.7);
        let tr = Truncation::default();
        let (z, w, h) = (1.3, 0.2, 1e-5);
        let theta = PI / (2.0 * 1.7);
        let d = |s| {
            (kernel_series_component(s, z, w + h, &p, &tr).unwrap()
                - kernel_series_component(s, z, w - h, &p, &tr).unwrap())
                / (2.0 * h)
                / (2.0 * p.lambda())
        };
        let lit = Complex64::new(0.0, -theta).exp() * d(C);
        let cup = kernel_series_component(C, z, w, &up, &tr).unwrap();
        assert!((lit - cup).norm() > 1e-2);
    }

    #[test]
    fn richardson_limit_error_is_second_order() {
        // two-point extrapolation leaves a term proportional to e1·e2
        let x = [0.3, -0.2, 0.4];
        let y = [0.1, 0.5, -0.2];
        for &c in &[-0.5, 0.0, 1.0] {
            let p = params(3, c);
            let tr = Truncation::default();
            let coarse = fourier_limit_residual(&x, &y, &p, &tr, 1e-2, 1e-3).unwrap();
            let fine = fourier_limit_residual(&x, &y, &p, &tr, 2e-3, 2e-4).unwrap();
            let ratio = coarse / fine;
            assert!(ratio > 20.0 && ratio < 30.0, "c={c} ratio {ratio}");
            assert!(fine < 2e-7);
        }
    }

    #[test]
    fn pde_residual_second_order() {
        let p = params(3, 0.0);
        let tr = Truncation::default();
        let r1 = pde_residual(1.0, 0.3, &p, &tr, 1e-3).unwrap();
        let r2 = pde_residual(1.0, 0.3, &p, &tr, 5e-4).unwrap();
        assert!(r1.0.max(r1.1) < 1e-5);
        let ratio = r1.0.max(r1.1) / r2.0.max(r2.1);
        assert!(ratio > 3.0 && ratio < 5.0, "ratio {ratio}");
    }

    #[test]
    fn csv_layout() {
        let p = params(3, 0.0);
        let kp = KernelParams::fourier(p).unwrap();
        let s = kernel_csv_zw(&[(0.0, 0.5), (1.0, -0.2)], &kp).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "z,w,reA,imA,reB,imB,terms_used,tail_estimate");
        let first: Vec<&str> = lines[1].split(',').collect();
        let a: f64 = first[2].parse().unwrap();
        assert!((a - fourier_origin_value(&p)).abs() < 1e-16);
        assert_eq!(kernel_csv_zw(&[], &kp).unwrap().lines().count(), 1);
        let xy = kernel_csv_xy(&[(vec![0.1, 0.2, 0.3], vec![1.0, 0.0, 0.0])], &kp).unwrap();
        assert!(xy.starts_with("x1,x2,x3,y1,y2,y3,reA,"));
    }
}
