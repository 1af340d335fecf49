//! The transform `F^ω f(y) = σ_m⁻¹ ∫ K(x, y; ω) f(x) h(r_x) dx`.
//!
//! Two evaluation routes are kept apart on purpose. [`apply_transform_field`] integrates
//! over a full product rule on `ℝ^m` and serves as the oracle. Sections
//! `f(r)M_ℓ + g(r)x̲M_ℓ` go through [`transform_section_radial`], where the sphere integral
//! is done exactly by the reproducing kernels and only the radial integral is numerical.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{standard_normal, wedge_vectors, Multivector};
use crate::error::{Error, Result};
use crate::kernel::{
    fourier_coefficients, pq_coefficients, repr_p, repr_q, semigroup_coefficients,
    semigroup_kernel, KernelParams, Truncation, FOURIER_OMEGA,
};
use crate::monogenics::{cached_basis, monogenic_dimension};
use crate::quadrature::QuadratureSpec;
use crate::radial::{
    apply_d, apply_e, apply_x, inner_product, l_eigenvalue, norm, phi_normalized, project_onto_phi,
    DeformParams, MonogenicSection, RadialProfile,
};
use crate::specfun::{bessel_j_tilde_with, gegenbauer_at_one, log_gamma, BesselOptions};

/// Bessel argument bound used inside radial integrals. Nodes with large `z` carry
/// negligible Gaussian weight, and real arguments use backward recurrence.
pub const TRANSFORM_BESSEL_BOUND: f64 = 1e4;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn transform_kp(kp: &KernelParams) -> KernelParams {
    kp.with_bessel_bound(kp.bessel_bound.max(TRANSFORM_BESSEL_BOUND))
}

fn prefactor(kp: &KernelParams, r: f64, s: f64) -> Complex64 {
    if kp.is_fourier() {
        Complex64::new(1.0, 0.0)
    } else {
        kp.gaussian_prefactor(r, s)
    }
}

fn split_point(y: &[f64]) -> (f64, Vec<f64>) {
    let s = y.iter().map(|t| t * t).sum::<f64>().sqrt();
    if s > 0.0 {
        (s, y.iter().map(|t| t / s).collect())
    } else {
        let mut e = vec![0.0; y.len()];
        e[0] = 1.0;
        (0.0, e)
    }
}

/// Full product-rule quadrature of `σ_m⁻¹ ∫ K(x, y; ω) F(x) h(r_x) dx`.
pub fn apply_transform_field<F>(
    f: F,
    y: &[f64],
    kp: &KernelParams,
    q: &QuadratureSpec,
) -> Result<Multivector>
where
    F: Fn(&[f64]) -> Multivector + Sync,
{
    let p = kp.params;
    let m = p.m;
    if y.len() != m {
        return Err(Error::DimensionMismatch(m, y.len()));
    }
    let kp = transform_kp(kp);
    let (rs, wr) = q.radial_nodes()?;
    let sph = q.sphere_nodes(m)?;
    let (s, yp) = split_point(y);
    // ξ ∧ y for every sphere node; x̲ ∧ y̲ = r (ξ ∧ y̲)
    let wedges: Vec<Multivector> = sph
        .points
        .iter()
        .map(|xi| wedge_vectors(xi, y))
        .collect::<Result<_>>()?;
    let ws: Vec<f64> = sph
        .points
        .iter()
        .map(|xi| {
            xi.iter()
                .zip(&yp)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .clamp(-1.0, 1.0)
        })
        .collect();
    let rho = p.radial_exponent();
    let partial: Vec<Result<Multivector>> = rs
        .par_iter()
        .zip(wr.par_iter())
        .map(|(&r, &w_r)| {
            let z = r * s;
            let coeffs = if kp.is_fourier() {
                fourier_coefficients(z, &p, &kp.trunc)?
            } else {
                semigroup_coefficients(z, &kp)?
            };
            let pref = prefactor(&kp, r, s) * (w_r * r.powf(rho));
            let mut ga = Vec::new();
            let mut gb = Vec::new();
            let mut acc = Multivector::zero(m);
            let mut x = vec![0.0; m];
            for (j, xi) in sph.points.iter().enumerate() {
                for (xk, v) in x.iter_mut().zip(xi) {
                    *xk = r * v;
                }
                let (a, b) = coeffs.eval_with(ws[j], &mut ga, &mut gb);
                let mut k = Multivector::scalar(m, a);
                if b != Complex64::new(0.0, 0.0) {
                    k += &wedges[j].scale(b * r);
                }
                acc += &(&k * &f(&x)).scale(sph.weights[j]);
            }
            Ok(acc.scale(pref))
        })
        .collect();
    let mut total = Multivector::zero(m);
    for part in partial {
        total += &part?;
    }
    Ok(total.scale(1.0 / p.sigma_m()))
}

/// As [`apply_transform_field`], with a truncation estimate from doubling `R_max` and `n_r`.
/// Fails when the estimate exceeds `budget`.
pub fn apply_transform_field_checked<F>(
    f: F,
    y: &[f64],
    kp: &KernelParams,
    q: &QuadratureSpec,
    budget: f64,
) -> Result<(Multivector, f64)>
where
    F: Fn(&[f64]) -> Multivector + Sync,
{
    let base = apply_transform_field(&f, y, kp, q)?;
    let wide = apply_transform_field(&f, y, kp, &q.doubled())?;
    let err = base.max_abs_diff(&wide);
    if err > budget {
        return Err(Error::Quadrature(format!(
            "domain truncation estimate {err:.3e} exceeds the budget {budget:.3e}"
        )));
    }
    Ok((wide, err))
}

/// Section samples on the radial nodes: `(r_i, w_i r_i^ρ r_i^ℓ f(r_i), w_i r_i^ρ r_i^{ℓ+1} g(r_i))`.
fn section_samples(
    sec: &MonogenicSection,
    q: &QuadratureSpec,
) -> Result<Vec<(f64, Complex64, Complex64)>> {
    let (rs, wr) = q.radial_nodes()?;
    let rho = sec.params.radial_exponent();
    let l = sec.ell as i32;
    Ok(rs
        .iter()
        .zip(&wr)
        .map(|(&r, &w)| {
            let base = w * r.powf(rho) * r.powi(l);
            (r, sec.f.eval(r) * base, sec.g.eval(r) * (base * r))
        })
        .collect())
}

fn reduce_at(
    samples: &[(f64, Complex64, Complex64)],
    ell: usize,
    s: f64,
    kp: &KernelParams,
) -> Result<(Complex64, Complex64)> {
    let mut fo = Complex64::new(0.0, 0.0);
    let mut go = Complex64::new(0.0, 0.0);
    for &(r, fw, gw) in samples {
        if fw == Complex64::new(0.0, 0.0) && gw == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (pk, qk, _) = pq_coefficients(ell, r * s, kp)?;
        let pref = prefactor(kp, r, s);
        fo += pref * pk * fw;
        go += pref * qk * gw;
    }
    Ok((fo, go))
}

/// `(F(s), G(s))` with `F^ω[section](y) = F(s) M_ℓ(y') + G(s) y̲' M_ℓ(y')`, `y = s y'`.
pub fn transform_section_radial(
    sec: &MonogenicSection,
    s: f64,
    kp: &KernelParams,
    q: &QuadratureSpec,
) -> Result<(Complex64, Complex64)> {
    if sec.params != kp.params {
        return Err(Error::InvalidParameter(
            "section and kernel parameters differ".into(),
        ));
    }
    let kp = transform_kp(kp);
    reduce_at(&section_samples(sec, q)?, sec.ell, s, &kp)
}

/// [`transform_section_radial`] on many radii.
pub fn transform_section_radial_many(
    sec: &MonogenicSection,
    radii: &[f64],
    kp: &KernelParams,
    q: &QuadratureSpec,
) -> Result<Vec<(Complex64, Complex64)>> {
    if sec.params != kp.params {
        return Err(Error::InvalidParameter(
            "section and kernel parameters differ".into(),
        ));
    }
    let kp = transform_kp(kp);
    let samples = section_samples(sec, q)?;
    radii
        .par_iter()
        .map(|&s| reduce_at(&samples, sec.ell, s, &kp))
        .collect()
}

/// Pointwise value of the transformed section at `y`.
pub fn transform_section_at(
    sec: &MonogenicSection,
    y: &[f64],
    kp: &KernelParams,
    q: &QuadratureSpec,
) -> Result<Multivector> {
    let (s, yp) = split_point(y);
    let (fo, go) = transform_section_radial(sec, s, kp, q)?;
    let basis = sec.basis();
    let mut out = basis.elements[sec.idx].evaluate(&yp)?.scale(fo);
    out += &basis.times_x[sec.idx].evaluate(&yp)?.scale(go);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    /// `f(r) M_ℓ`.
    Even,
    /// `f(r) x̲ M_ℓ`.
    Odd,
}

/// One-dimensional reduction of the Fourier transform on `f(r) M_ℓ` or `f(r) x̲ M_ℓ`.
#[derive(Debug, Clone)]
pub struct BochnerTransform {
    pub params: DeformParams,
    pub ell: usize,
    pub parity: Parity,
    nodes: Vec<f64>,
    weighted: Vec<Complex64>,
}

/// Samples `f` on the radial rule and prepares the reduction.
pub fn bochner(
    ell: usize,
    f_radial: &dyn Fn(f64) -> Complex64,
    parity: Parity,
    params: DeformParams,
    q: &QuadratureSpec,
) -> Result<BochnerTransform> {
    params.validate()?;
    let (rs, wr) = q.radial_nodes()?;
    let rho = params.radial_exponent();
    let extra = match parity {
        Parity::Even => ell as f64,
        Parity::Odd => ell as f64 + 1.0,
    };
    let mut weighted = Vec::with_capacity(rs.len());
    for (&r, &w) in rs.iter().zip(&wr) {
        let v = f_radial(r) * (w * r.powf(extra + rho));
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::DivergentMoment(extra + rho));
        }
        weighted.push(v);
    }
    Ok(BochnerTransform {
        params,
        ell,
        parity,
        nodes: rs,
        weighted,
    })
}

impl BochnerTransform {
    /// Radial factor multiplying `M_ℓ(y')` (even) or `y̲' M_ℓ(y')` (odd) at `|y| = s`.
    pub fn eval(&self, s: f64) -> Result<Complex64> {
        let p = &self.params;
        let nu0 = (p.delta() - 2.0) / 2.0;
        let g = p.gamma(self.ell);
        let (nu, phase) = match self.parity {
            Parity::Even => (g / 2.0 - 1.0, Complex64::new(1.0, 0.0)),
            Parity::Odd => (g / 2.0, -I),
        };
        let opts = BesselOptions {
            max_abs: TRANSFORM_BESSEL_BOUND,
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (&r, &fw) in self.nodes.iter().zip(&self.weighted) {
            let z = r * s;
            // z^{-ν0} J_ν(z) = 2^{-ν} z^{ν-ν0} J̃_ν(z), which also covers z = 0
            let jt = bessel_j_tilde_with(nu, Complex64::new(z, 0.0), opts)?.value;
            let zpow = if z == 0.0 {
                if (nu - nu0).abs() < 1e-15 {
                    1.0
                } else {
                    0.0
                }
            } else {
                z.powf(nu - nu0)
            };
            acc += fw * jt * (zpow * 2f64.powf(-nu));
        }
        let rot = Complex64::new(
            0.0,
            -std::f64::consts::PI * self.ell as f64 / (2.0 * (1.0 + p.c)),
        )
        .exp();
        Ok(acc * rot * phase)
    }

    /// Pointwise value at `y` for the basis element `idx` of `M_ℓ`.
    pub fn eval_at(&self, idx: usize, y: &[f64]) -> Result<Multivector> {
        let basis = cached_basis(self.ell, self.params.m)?;
        let (s, yp) = split_point(y);
        let v = self.eval(s)?;
        let poly = match self.parity {
            Parity::Even => basis.get(idx)?,
            Parity::Odd => {
                basis.get(idx)?;
                &basis.times_x[idx]
            }
        };
        Ok(poly.evaluate(&yp)?.scale(v))
    }
}

/// Closed-form Fourier transform of `e^{-r²/α}`: `(α/2)^{ν0+1} e^{-α s²/4}`, `ν0 = (δ-2)/2`.
pub fn gaussian_transform(alpha: f64, params: &DeformParams) -> Result<RadialProfile> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Gaussian parameter must be positive, got {alpha}"
        )));
    }
    let nu0 = (params.delta() - 2.0) / 2.0;
    Ok(RadialProfile::from_terms(
        vec![(Complex64::new((alpha / 2.0).powf(nu0 + 1.0), 0.0), 0.0)],
        alpha / 4.0,
    ))
}

/// Coefficients on the normalised basis `φ̂_{t,ℓ,idx}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub params: DeformParams,
    pub coeffs: BTreeMap<(usize, usize, usize), Complex64>,
}

impl Expansion {
    pub fn new(params: DeformParams) -> Self {
        Self {
            params,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, t: usize, ell: usize, idx: usize, a: Complex64) {
        *self
            .coeffs
            .entry((t, ell, idx))
            .or_insert(Complex64::new(0.0, 0.0)) += a;
    }

    /// `n_terms` random complex Gaussian coefficients with `t ≤ t_max`, `ℓ ≤ ell_max`.
    pub fn random<R: Rng>(
        params: DeformParams,
        n_terms: usize,
        t_max: usize,
        ell_max: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut e = Self::new(params);
        for _ in 0..n_terms {
            let t = rng.random_range(0..=t_max);
            let ell = rng.random_range(0..=ell_max);
            let dim = cached_basis(ell, params.m)?.len();
            let idx = rng.random_range(0..dim);
            let a = Complex64::new(standard_normal(rng), standard_normal(rng));
            e.insert(t, ell, idx, a);
        }
        Ok(e)
    }

    pub fn t_max(&self) -> usize {
        self.coeffs.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|a| a.norm_sqr()).sum()
    }

    /// `Σ conj(a_i) b_i`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs
            .iter()
            .filter_map(|(k, a)| other.coeffs.get(k).map(|b| a.conj() * b))
            .sum()
    }

    /// Multiplies every coefficient by its eigenvalue `e^{-ωt} e^{-ωℓ/(1+c)}`.
    pub fn apply_semigroup(&self, omega: Complex64) -> Self {
        let mut out = Self::new(self.params);
        for (&(t, ell, idx), &a) in &self.coeffs {
            out.coeffs.insert(
                (t, ell, idx),
                a * crate::kernel::eigenvalue(omega, t, ell, &self.params),
            );
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= s;
        }
        out
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let zero = Complex64::new(0.0, 0.0);
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|k| {
                (self.coeffs.get(k).unwrap_or(&zero) - other.coeffs.get(k).unwrap_or(&zero)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// One section per `(ℓ, idx)` component.
    pub fn to_sections(&self) -> Result<Vec<MonogenicSection>> {
        let mut groups: BTreeMap<(usize, usize), MonogenicSection> = BTreeMap::new();
        for (&(t, ell, idx), &a) in &self.coeffs {
            let term = phi_normalized(t, ell, idx, self.params)?.scale(a);
            let entry = match groups.remove(&(ell, idx)) {
                Some(sec) => sec.add(&term)?,
                None => term,
            };
            groups.insert((ell, idx), entry);
        }
        Ok(groups.into_values().collect())
    }

    /// Projects sections onto `φ̂_t`, `t ≤ t_max`; returns the largest remainder norm too.
    pub fn from_sections(
        params: DeformParams,
        sections: &[MonogenicSection],
        t_max: usize,
    ) -> Result<(Self, f64)> {
        let mut e = Self::new(params);
        let mut worst = 0.0f64;
        for sec in sections {
            let (coeffs, rem) = project_onto_phi(sec, t_max)?;
            worst = worst.max(rem);
            for (t, a) in coeffs.into_iter().enumerate() {
                if a != Complex64::new(0.0, 0.0) {
                    e.insert(t, sec.ell, sec.idx, a);
                }
            }
        }
        Ok((e, worst))
    }

    /// Applies a section operator component-wise and re-expands with `t ≤ t_max + grow`.
    pub fn map_sections(
        &self,
        grow: usize,
        op: impl Fn(&MonogenicSection) -> Result<MonogenicSection>,
    ) -> Result<(Self, f64)> {
        let secs: Vec<MonogenicSection> =
            self.to_sections()?.iter().map(op).collect::<Result<_>>()?;
        Self::from_sections(self.params, &secs, self.t_max() + grow)
    }
}

/// `‖F^ω f‖²` by radial quadrature of the transformed sections.
pub fn transformed_norm_sq(e: &Expansion, kp: &KernelParams, q: &QuadratureSpec) -> Result<f64> {
    let (rs, wr) = q.radial_nodes()?;
    let rho = e.params.radial_exponent();
    let mut total = 0.0;
    for sec in e.to_sections()? {
        let vals = transform_section_radial_many(&sec, &rs, kp, q)?;
        for ((s, w), (fo, go)) in rs.iter().zip(&wr).zip(vals) {
            total += w * s.powf(rho) * (fo.norm_sqr() + go.norm_sqr());
        }
    }
    Ok(total)
}

/// `(‖f‖², ‖F f‖²)`, the first from the coefficients, the second by quadrature of the
/// Fourier transform.
pub fn parseval_check(e: &Expansion, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let kp = KernelParams::fourier(e.params)?;
    Ok((e.norm_sq(), transformed_norm_sq(e, &kp, q)?))
}

/// `(⟨F(Df), g⟩, ⟨i(1+c) x̲ F(f), g⟩)` computed on sections.
pub fn intertwining_pairing(f: &Expansion, g: &Expansion) -> Result<(Complex64, Complex64)> {
    let c1 = 1.0 + f.params.c;
    let (df, _) = f.map_sections(1, apply_d)?;
    let lhs = df.apply_semigroup(FOURIER_OMEGA);
    let (xff, _) = f
        .apply_semigroup(FOURIER_OMEGA)
        .map_sections(1, |s| Ok(apply_x(s)?.scale(I * c1)))?;
    Ok((lhs.inner(g), xff.inner(g)))
}

/// Coefficient residuals of `F∘D = i(1+c)x̲∘F`, `F∘x̲ = (i/(1+c))D∘F` and
/// `F∘𝔼 = -(𝔼+δ)∘F` on an expansion, plus the largest projection remainder.
pub fn intertwining_residuals(e: &Expansion) -> Result<([f64; 3], f64)> {
    let c1 = 1.0 + e.params.c;
    let delta = e.params.delta();
    let fe = e.apply_semigroup(FOURIER_OMEGA);
    let mut rem = 0.0f64;
    let mut track = |(x, r): (Expansion, f64)| {
        rem = rem.max(r);
        x
    };
    let d_lhs = track(e.map_sections(1, apply_d)?).apply_semigroup(FOURIER_OMEGA);
    let d_rhs = track(fe.map_sections(1, |s| Ok(apply_x(s)?.scale(I * c1)))?);
    let x_lhs = track(e.map_sections(1, apply_x)?).apply_semigroup(FOURIER_OMEGA);
    let x_rhs = track(fe.map_sections(1, |s| Ok(apply_d(s)?.scale(I / c1)))?);
    let e_lhs = track(e.map_sections(2, apply_e)?).apply_semigroup(FOURIER_OMEGA);
    let e_rhs = track(fe.map_sections(2, |s| Ok(apply_e(s)?.add(&s.scale(delta))?.scale(-1.0)))?);
    Ok((
        [
            d_lhs.max_abs_diff(&d_rhs),
            x_lhs.max_abs_diff(&x_rhs),
            e_lhs.max_abs_diff(&e_rhs),
        ],
        rem,
    ))
}

/// Hilbert–Schmidt norm of `F^ω` summed over `t ≤ t_cut`, `k ≤ k_cut`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HsNorm {
    pub value: f64,
    /// Exact size of the omitted part of `‖F^ω‖²_HS`.
    pub tail_bound: f64,
}

/// `√(Σ e^{-2 Re ω t} e^{-2 Re ω k/(1+c)} dim M_k)`; the tail uses the closed form
/// `2^m / ((1 - e^{-2a})(1 - e^{-2a/(1+c)})^{m-1})`, `a = Re ω`.
pub fn hs_norm(
    omega: Complex64,
    params: &DeformParams,
    k_cut: usize,
    t_cut: usize,
) -> Result<HsNorm> {
    params.validate()?;
    let a = omega.re;
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Hilbert–Schmidt norm needs Re ω > 0, got {omega}"
        )));
    }
    let q = (-2.0 * a / (1.0 + params.c)).exp();
    let qt = (-2.0 * a).exp();
    let mut sum_k = 0.0;
    for k in (0..=k_cut).rev() {
        sum_k += monogenic_dimension(k, params.m) as f64 * q.powi(k as i32);
    }
    let sum_t: f64 = (0..=t_cut).rev().map(|t| qt.powi(t as i32)).sum();
    let partial = sum_k * sum_t;
    let full = 2f64.powi(params.m as i32) / ((1.0 - qt) * (1.0 - q).powi(params.m as i32 - 1));
    Ok(HsNorm {
        value: partial.sqrt(),
        tail_bound: (full - partial).max(0.0),
    })
}

/// Norms entering the uncertainty inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeisenbergValue {
    pub norm_xf: f64,
    pub norm_xff: f64,
    pub norm_f_sq: f64,
    pub delta: f64,
}

impl HeisenbergValue {
    /// `(‖x̲f‖·‖x̲Ff‖, (δ/2)‖f‖²)`.
    pub fn product(&self) -> (f64, f64) {
        (
            self.norm_xf * self.norm_xff,
            self.delta / 2.0 * self.norm_f_sq,
        )
    }

    /// `(‖x̲f‖² + ‖x̲Ff‖², δ‖f‖²)`.
    pub fn additive(&self) -> (f64, f64) {
        (
            self.norm_xf.powi(2) + self.norm_xff.powi(2),
            self.delta * self.norm_f_sq,
        )
    }
}

fn sum_norm_sq(secs: &[MonogenicSection]) -> Result<f64> {
    secs.iter().map(|s| Ok(norm(s)?.powi(2))).sum()
}

/// Heisenberg norms for a finite expansion, with `Ff` from the eigenvalues.
pub fn heisenberg(e: &Expansion) -> Result<HeisenbergValue> {
    let xf: Vec<MonogenicSection> = e
        .to_sections()?
        .iter()
        .map(apply_x)
        .collect::<Result<_>>()?;
    let xff: Vec<MonogenicSection> = e
        .apply_semigroup(FOURIER_OMEGA)
        .to_sections()?
        .iter()
        .map(apply_x)
        .collect::<Result<_>>()?;
    Ok(HeisenbergValue {
        norm_xf: sum_norm_sq(&xf)?.sqrt(),
        norm_xff: sum_norm_sq(&xff)?.sqrt(),
        norm_f_sq: sum_norm_sq(&e.to_sections()?)?,
        delta: e.params.delta(),
    })
}

/// Heisenberg norms for `λ e^{-r²/α} M_0`, using [`gaussian_transform`].
pub fn heisenberg_gaussian(
    alpha: f64,
    lambda: Complex64,
    params: DeformParams,
) -> Result<HeisenbergValue> {
    let f = RadialProfile::from_terms(vec![(lambda, 0.0)], 1.0 / alpha);
    let ff = gaussian_transform(alpha, &params)?.scale(lambda);
    let zero_f = RadialProfile::zero_with_gauss(1.0 / alpha);
    let zero_ff = RadialProfile::zero_with_gauss(alpha / 4.0);
    let sec = MonogenicSection::new(params, 0, 0, f, zero_f)?;
    let fsec = MonogenicSection::new(params, 0, 0, ff, zero_ff)?;
    Ok(HeisenbergValue {
        norm_xf: norm(&apply_x(&sec)?)?,
        norm_xff: norm(&apply_x(&fsec)?)?,
        norm_f_sq: inner_product(&sec, &sec)?.re,
        delta: params.delta(),
    })
}

/// Both sides of the Master formula.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterCheck {
    pub lhs: Multivector,
    pub rhs: Multivector,
    pub omega: f64,
    pub terms_used: usize,
}

/// `∫ K(y,x; iπ/2) K(z,y; -iπ/2) e^{-s r_y²} h(r_y) dy` against
/// `σ_m e^{-ωδ/2} K(z,x; ω) e^{-(|x|²+|z|²)(1 - cosh ω)/(2 sinh ω)}`, `2s = sinh ω`.
pub fn master_formula_check(
    x: &[f64],
    zpt: &[f64],
    s: f64,
    params: DeformParams,
    q: &QuadratureSpec,
) -> Result<MasterCheck> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Master formula needs s > 0, got {s}"
        )));
    }
    let m = params.m;
    if x.len() != m || zpt.len() != m {
        return Err(Error::DimensionMismatch(m, x.len().max(zpt.len())));
    }
    let fkp = transform_kp(&KernelParams::fourier(params)?);
    let (rx, xp) = split_point(x);
    let (rz, zp) = split_point(zpt);
    let (rs, wr) = q.radial_nodes()?;
    let rho = params.radial_exponent();
    let weights: Vec<f64> = rs
        .iter()
        .zip(&wr)
        .map(|(r, w)| w * r.powf(rho) * (-s * r * r).exp())
        .collect();
    let lam = params.lambda();
    let trunc = Truncation::default();
    let mut lhs = Multivector::zero(m);
    let mut max = 0.0f64;
    let mut small = 0usize;
    let mut used = 0usize;
    for k in 0..=trunc.k_max {
        let mut rk = Complex64::new(0.0, 0.0);
        let mut sk = Complex64::new(0.0, 0.0);
        for (&r, &w) in rs.iter().zip(&weights) {
            let (px, qx, _) = pq_coefficients(k, r * rx, &fkp)?;
            let (pz, qz, _) = pq_coefficients(k, r * rz, &fkp)?;
            rk += px * pz.conj() * w;
            sk += qx * qz.conj() * w;
        }
        lhs += &repr_p(k, &zp, &xp)?.scale(rk);
        lhs += &repr_q(k, &zp, &xp)?.scale(sk);
        used = k + 1;
        let mag = rk.norm() * gegenbauer_at_one(k, lam) * 2.0
            + sk.norm() * gegenbauer_at_one(k + 1, lam) * 2.0;
        max = max.max(mag);
        if mag <= trunc.tol * max {
            small += 1;
            if small >= trunc.streak {
                break;
            }
        } else {
            small = 0;
        }
        if k == trunc.k_max {
            return Err(Error::TruncationFailure { k_max: trunc.k_max });
        }
    }
    // the σ_m of the spherical reduction and of the right-hand side cancel
    let omega = (2.0 * s).asinh();
    let kp = KernelParams::new(params, Complex64::new(omega, 0.0), Truncation::default())?;
    let kv = semigroup_kernel(zpt, x, &kp)?;
    let damp = (-(rx * rx + rz * rz) / 2.0 * (1.0 - omega.cosh()) / omega.sinh()).exp();
    let rhs = kv
        .assembled
        .scale((-omega * params.delta() / 2.0).exp() * damp);
    Ok(MasterCheck {
        lhs,
        rhs,
        omega,
        terms_used: used,
    })
}

/// `e^{-ωt} e^{-ωℓ/(1+c)}` for `t ≤ t_max`, `ℓ ≤ ell_max`.
pub fn eigenvalue_map(
    omega: Complex64,
    params: &DeformParams,
    t_max: usize,
    ell_max: usize,
) -> BTreeMap<(usize, usize), Complex64> {
    let mut out = BTreeMap::new();
    for t in 0..=t_max {
        for ell in 0..=ell_max {
            out.insert((t, ell), crate::kernel::eigenvalue(omega, t, ell, params));
        }
    }
    out
}

/// Smallest `n ≤ max_power` with `(F^{iπ/2})^n φ_{t,ℓ} = φ_{t,ℓ}`.
pub fn fourier_order(
    t: usize,
    ell: usize,
    params: &DeformParams,
    max_power: usize,
) -> Option<usize> {
    let ev = crate::kernel::eigenvalue(FOURIER_OMEGA, t, ell, params);
    let mut acc = Complex64::new(1.0, 0.0);
    for n in 1..=max_power {
        acc *= ev;
        if (acc - 1.0).norm() < 1e-10 {
            return Some(n);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub t: usize,
    pub ell: usize,
    pub l_eigenvalue: f64,
    pub f_eigenvalue_re: f64,
    pub f_eigenvalue_im: f64,
}

pub fn spectrum_table(
    params: &DeformParams,
    omega: Complex64,
    t_max: usize,
    ell_max: usize,
) -> Vec<SpectrumRow> {
    let mut rows = Vec::new();
    for t in 0..=t_max {
        for ell in 0..=ell_max {
            let ev = crate::kernel::eigenvalue(omega, t, ell, params);
            rows.push(SpectrumRow {
                t,
                ell,
                l_eigenvalue: l_eigenvalue(t, ell, params),
                f_eigenvalue_re: ev.re,
                f_eigenvalue_im: ev.im,
            });
        }
    }
    rows
}

/// CSV of a transformed field: `y1..ym, re0, im0, then (re, im) per bivector blade`.
pub fn transform_csv(m: usize, points: &[Vec<f64>], values: &[Multivector]) -> String {
    let mut out = String::new();
    let blades: Vec<usize> = (0..1usize << m).filter(|b| b.count_ones() == 2).collect();
    let mut head: Vec<String> = (1..=m).map(|i| format!("y{i}")).collect();
    head.push("re0".into());
    head.push("im0".into());
    for b in &blades {
        let name: String = (0..m)
            .filter(|i| b & (1 << i) != 0)
            .map(|i| (i + 1).to_string())
            .collect();
        head.push(format!("re_e{name}"));
        head.push(format!("im_e{name}"));
    }
    out.push_str(&head.join(","));
    out.push('\n');
    for (y, v) in points.iter().zip(values) {
        let mut row: Vec<String> = y.iter().map(|t| format!("{t:.16e}")).collect();
        let s = v.scalar_part();
        row.push(format!("{:.16e}", s.re));
        row.push(format!("{:.16e}", s.im));
        for &b in &blades {
            let c = v.coeff(b);
            row.push(format!("{:.16e}", c.re));
            row.push(format!("{:.16e}", c.im));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `log Γ` re-exported for the closed forms used in checks.
pub fn ln_gamma(x: f64) -> Result<f64> {
    log_gamma(x)
}
