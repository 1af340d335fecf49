//! Sections `f(r) M_ℓ + g(r) x̲ M_ℓ` and the radially reduced operators.
//!
//! A profile is a finite sum `Σ c_j r^{p_j}` times an implicit Gaussian
//! `e^{-a r²}` (default `a = 1/2`). The operators **D**, `x̲`, `𝔼` and `L`
//! act on the profile pair exactly, so ladder identities can be compared
//! coefficient by coefficient.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::clifford::{embed_vector, Multivector};
use crate::error::{Error, Result};
use crate::monogenics::{cached_basis, spherical_inner, MonogenicBasis};
use crate::quadrature::sphere_area;
use crate::specfun::{laguerre_coefficients, log_gamma};

const POWER_MERGE_TOL: f64 = 1e-12;
const COEFF_DROP_REL: f64 = 1e-13;

/// Largest supported dimension.
pub const MAX_DIM: usize = 6;

/// Dimension `m ≥ 3` and deformation parameter `c > -1`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DeformParams {
    pub m: usize,
    pub c: f64,
}

impl DeformParams {
    pub fn new(m: usize, c: f64) -> Result<Self> {
        let p = Self { m, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 3 {
            return Err(Error::InvalidParameter(format!(
                "m must be at least 3 (the kernel formulas divide by λ = (m-2)/2), got m = {}",
                self.m
            )));
        }
        if self.m > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "m must be at most {MAX_DIM}, got m = {}",
                self.m
            )));
        }
        if !(self.c > -1.0) || !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "c must satisfy c > -1, got c = {}",
                self.c
            )));
        }
        Ok(())
    }

    /// `λ = (m-2)/2`.
    pub fn lambda(&self) -> f64 {
        (self.m as f64 - 2.0) / 2.0
    }

    /// `δ = 1 + (m-1)/(1+c)`.
    pub fn delta(&self) -> f64 {
        1.0 + (self.m as f64 - 1.0) / (1.0 + self.c)
    }

    /// `β_ℓ = -cℓ/(1+c)`.
    pub fn beta(&self, ell: usize) -> f64 {
        -self.c * ell as f64 / (1.0 + self.c)
    }

    /// `γ_ℓ = (2ℓ + m + c)/(1+c)`.
    pub fn gamma(&self, ell: usize) -> f64 {
        (2.0 * ell as f64 + self.m as f64 + self.c) / (1.0 + self.c)
    }

    pub fn sigma_m(&self) -> f64 {
        sphere_area(self.m)
    }

    /// Exponent of `h(r) = r^{1 - (1+mc)/(1+c)}`.
    pub fn h_exponent(&self) -> f64 {
        1.0 - (1.0 + self.m as f64 * self.c) / (1.0 + self.c)
    }

    /// Exponent of the radial measure `h(r) r^{m-1} = r^{(m-1)/(1+c)}`.
    pub fn radial_exponent(&self) -> f64 {
        (self.m as f64 - 1.0) / (1.0 + self.c)
    }

    /// `h(r)`.
    pub fn h(&self, r: f64) -> f64 {
        r.powf(self.h_exponent())
    }
}

/// `∫_0^∞ r^p e^{-a r²} dr = Γ((p+1)/2) / (2 a^{(p+1)/2})`.
pub fn radial_moment(p: f64, a: f64) -> Result<f64> {
    if !(p > -1.0) {
        return Err(Error::DivergentMoment(p));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Gaussian width must be positive, got {a}"
        )));
    }
    let s = (p + 1.0) / 2.0;
    Ok((log_gamma(s)? - s * a.ln()).exp() / 2.0)
}

/// `Σ c_j r^{p_j} · e^{-a r²}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    terms: Vec<(Complex64, f64)>,
    gauss: f64,
}

impl RadialProfile {
    /// The zero profile with the standard Gaussian `e^{-r²/2}`.
    pub fn zero() -> Self {
        Self::zero_with_gauss(0.5)
    }

    pub fn zero_with_gauss(gauss: f64) -> Self {
        Self {
            terms: Vec::new(),
            gauss,
        }
    }

    pub fn from_terms(terms: Vec<(Complex64, f64)>, gauss: f64) -> Self {
        let mut p = Self { terms, gauss };
        p.canonicalize();
        p
    }

    /// `c r^p e^{-r²/2}`.
    pub fn monomial(c: impl Into<Complex64>, p: f64) -> Self {
        Self::from_terms(vec![(c.into(), p)], 0.5)
    }

    pub fn terms(&self) -> &[(Complex64, f64)] {
        &self.terms
    }

    pub fn gauss(&self) -> f64 {
        self.gauss
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.0.norm()).fold(0.0, f64::max)
    }

    pub fn min_power(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.1).reduce(f64::min)
    }

    fn merged(mut terms: Vec<(Complex64, f64)>) -> Vec<(Complex64, f64)> {
        terms.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut out: Vec<(Complex64, f64)> = Vec::with_capacity(terms.len());
        for (c, p) in terms {
            match out.last_mut() {
                Some(last) if (last.1 - p).abs() <= POWER_MERGE_TOL * (1.0 + p.abs()) => {
                    last.0 += c
                }
                _ => out.push((c, p)),
            }
        }
        out
    }

    /// Sorts by power, merges equal powers and drops negligible coefficients.
    pub fn canonicalize(&mut self) {
        let merged = Self::merged(std::mem::take(&mut self.terms));
        let max = merged.iter().map(|t| t.0.norm()).fold(0.0, f64::max);
        self.terms = merged
            .into_iter()
            .filter(|t| t.0.norm() > COEFF_DROP_REL * max && t.0 != Complex64::new(0.0, 0.0))
            .collect();
    }

    fn check_gauss(&self, other: &Self) -> Result<()> {
        if self.is_zero() || other.is_zero() || self.gauss == other.gauss {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "profiles with different Gaussian widths {} and {}",
                self.gauss, other.gauss
            )))
        }
    }

    fn shared_gauss(&self, other: &Self) -> f64 {
        if self.is_zero() {
            other.gauss
        } else {
            self.gauss
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_gauss(other)?;
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(Self::from_terms(terms, self.shared_gauss(other)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        Self::from_terms(
            self.terms.iter().map(|&(c, p)| (c * s, p)).collect(),
            self.gauss,
        )
    }

    /// Multiplies by `r^k`.
    pub fn mul_power(&self, k: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, p)| (c, p + k)).collect(),
            gauss: self.gauss,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, p)| (c.conj(), p)).collect(),
            gauss: self.gauss,
        }
    }

    /// `d/dr` of the full profile, Gaussian included.
    pub fn derivative(&self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for &(c, p) in &self.terms {
            if p != 0.0 {
                terms.push((c * p, p - 1.0));
            }
            terms.push((c * (-2.0 * self.gauss), p + 1.0));
        }
        Self::from_terms(terms, self.gauss)
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        let g = (-self.gauss * r * r).exp();
        self.terms
            .iter()
            .map(|&(c, p)| c * r.powf(p))
            .sum::<Complex64>()
            * g
    }

    /// Largest coefficient of `self - other` after merging powers (no dropping).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.gauss != other.gauss && !self.is_zero() && !other.is_zero() {
            return f64::INFINITY;
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|&(c, p)| (-c, p)));
        Self::merged(terms)
            .iter()
            .map(|t| t.0.norm())
            .fold(0.0, f64::max)
    }

    /// `∫_0^∞ conj(self) · other · r^extra dr`, term by term.
    pub fn moment_pair(&self, other: &Self, extra: f64) -> Result<Complex64> {
        let a = self.gauss + other.gauss;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c1, p1) in &self.terms {
            for &(c2, p2) in &other.terms {
                acc += c1.conj() * c2 * radial_moment(p1 + p2 + extra, a)?;
            }
        }
        Ok(acc)
    }

    /// CSV rows `power,re,im` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("power,re,im\n");
        for (c, p) in &self.terms {
            let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", p, c.re, c.im);
        }
        s
    }
}

/// `f(r) M_ℓ^{(idx)} + g(r) x̲ M_ℓ^{(idx)}`.
#[derive(Debug, Clone)]
pub struct MonogenicSection {
    pub params: DeformParams,
    pub ell: usize,
    pub idx: usize,
    pub f: RadialProfile,
    pub g: RadialProfile,
    basis: Arc<MonogenicBasis>,
}

impl MonogenicSection {
    pub fn new(
        params: DeformParams,
        ell: usize,
        idx: usize,
        f: RadialProfile,
        g: RadialProfile,
    ) -> Result<Self> {
        params.validate()?;
        let basis = cached_basis(ell, params.m)?;
        basis.get(idx)?;
        f.check_gauss(&g)?;
        Ok(Self {
            params,
            ell,
            idx,
            f,
            g,
            basis,
        })
    }

    pub fn zero(params: DeformParams, ell: usize, idx: usize) -> Result<Self> {
        Self::new(
            params,
            ell,
            idx,
            RadialProfile::zero(),
            RadialProfile::zero(),
        )
    }

    fn with_profiles(&self, f: RadialProfile, g: RadialProfile) -> Self {
        Self {
            params: self.params,
            ell: self.ell,
            idx: self.idx,
            f,
            g,
            basis: Arc::clone(&self.basis),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.params != other.params || self.ell != other.ell || self.idx != other.idx {
            return Err(Error::InvalidParameter(format!(
                "sections live in different components: (ℓ={}, idx={}) vs (ℓ={}, idx={})",
                self.ell, self.idx, other.ell, other.idx
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.with_profiles(self.f.add(&other.f)?, self.g.add(&other.g)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.with_profiles(self.f.sub(&other.f)?, self.g.sub(&other.g)?))
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        self.with_profiles(self.f.scale(s), self.g.scale(s))
    }

    /// Largest profile coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.check_compatible(other).is_err() {
            return f64::INFINITY;
        }
        self.f
            .max_abs_diff(&other.f)
            .max(self.g.max_abs_diff(&other.g))
    }

    pub fn max_coeff(&self) -> f64 {
        self.f.max_coeff().max(self.g.max_coeff())
    }

    pub fn basis(&self) -> &MonogenicBasis {
        &self.basis
    }

    /// Pointwise value at `x ∈ ℝ^m`.
    pub fn eval(&self, x: &[f64]) -> Result<Multivector> {
        let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        let mut out = Multivector::zero(self.params.m);
        if !self.f.is_zero() {
            out += &self.basis.elements[self.idx]
                .evaluate(x)?
                .scale(self.f.eval(r));
        }
        if !self.g.is_zero() {
            out += &self.basis.times_x[self.idx]
                .evaluate(x)?
                .scale(self.g.eval(r));
        }
        Ok(out)
    }

    /// `L²(h dx)` admissibility of every term.
    pub fn check_moments(&self) -> Result<()> {
        let base = self.params.radial_exponent() + 2.0 * self.ell as f64;
        if let Some(p) = self.f.min_power() {
            if 2.0 * p + base <= -1.0 {
                return Err(Error::DivergentMoment(2.0 * p + base));
            }
        }
        if let Some(p) = self.g.min_power() {
            if 2.0 * p + base + 2.0 <= -1.0 {
                return Err(Error::DivergentMoment(2.0 * p + base + 2.0));
            }
        }
        Ok(())
    }
}

/// **D** = ∂ₓ + c r⁻² x̲ 𝔼 on a section.
pub fn apply_d(s: &MonogenicSection) -> Result<MonogenicSection> {
    let c = s.params.c;
    let m = s.params.m as f64;
    let l = s.ell as f64;
    // scalar part from g: -(1+c) r g' - (m + 2ℓ + c(ℓ+1)) g
    let nf =
        s.g.derivative()
            .mul_power(1.0)
            .scale(-(1.0 + c))
            .add(&s.g.scale(-(m + 2.0 * l + c * (l + 1.0))))?;
    // x̲ part from f: (1+c) f'/r + cℓ f/r²
    let ng =
        s.f.derivative()
            .mul_power(-1.0)
            .scale(1.0 + c)
            .add(&s.f.mul_power(-2.0).scale(c * l))?;
    let out = s.with_profiles(nf, ng);
    out.check_moments()?;
    Ok(out)
}

/// Left multiplication by `x̲`.
pub fn apply_x(s: &MonogenicSection) -> Result<MonogenicSection> {
    let out = s.with_profiles(s.g.mul_power(2.0).scale(-1.0), s.f.clone());
    out.check_moments()?;
    Ok(out)
}

/// Euler operator `𝔼`.
pub fn apply_e(s: &MonogenicSection) -> Result<MonogenicSection> {
    let l = s.ell as f64;
    let nf = s.f.derivative().mul_power(1.0).add(&s.f.scale(l))?;
    let ng = s.g.derivative().mul_power(1.0).add(&s.g.scale(l + 1.0))?;
    Ok(s.with_profiles(nf, ng))
}

/// `L = D² - (1+c)² x̲²`.
pub fn apply_l(s: &MonogenicSection) -> Result<MonogenicSection> {
    let c1 = 1.0 + s.params.c;
    let dd = apply_d(&apply_d(s)?)?;
    let xx = apply_x(&apply_x(s)?)?;
    dd.sub(&xx.scale(c1 * c1))
}

/// Creation operator `A⁺ = D - (1+c) x̲`.
pub fn a_plus(s: &MonogenicSection) -> Result<MonogenicSection> {
    apply_d(s)?.sub(&apply_x(s)?.scale(1.0 + s.params.c))
}

/// Annihilation operator `A⁻ = D + (1+c) x̲`.
pub fn a_minus(s: &MonogenicSection) -> Result<MonogenicSection> {
    apply_d(s)?.add(&apply_x(s)?.scale(1.0 + s.params.c))
}

/// Eigenfunction `φ_{t,ℓ}` built on the basis element `idx` of `M_ℓ`.
pub fn phi(t: usize, ell: usize, idx: usize, params: DeformParams) -> Result<MonogenicSection> {
    params.validate()?;
    let c1 = 1.0 + params.c;
    let beta = params.beta(ell);
    let gam = params.gamma(ell);
    let half = t / 2;
    let fact: f64 = (1..=half).map(|j| j as f64).product();
    let pref = (2.0 * c1).powi(t as i32) * fact;
    let (alpha, sign) = if t.is_multiple_of(2) {
        (gam / 2.0 - 1.0, 1.0)
    } else {
        (gam / 2.0, -1.0)
    };
    let terms = laguerre_coefficients(half, alpha)
        .into_iter()
        .enumerate()
        .map(|(j, a)| (Complex64::new(sign * pref * a, 0.0), beta + 2.0 * j as f64))
        .collect();
    let profile = RadialProfile::from_terms(terms, 0.5);
    if t.is_multiple_of(2) {
        MonogenicSection::new(params, ell, idx, profile, RadialProfile::zero())
    } else {
        MonogenicSection::new(params, ell, idx, RadialProfile::zero(), profile)
    }
}

/// `C(t, ℓ)` in `2D φ_t = φ_{t+1} + C(t,ℓ) φ_{t-1}`.
pub fn ladder_constant(t: usize, ell: usize, params: &DeformParams) -> f64 {
    let c1 = 1.0 + params.c;
    let s = (t / 2) as f64;
    if t.is_multiple_of(2) {
        4.0 * c1 * c1 * s
    } else {
        2.0 * c1 * c1 * (params.gamma(ell) + 2.0 * s)
    }
}

/// Eigenvalue of `L` on `φ_{t,ℓ}`: `(1+c)²(γ_ℓ + 2t)`.
pub fn l_eigenvalue(t: usize, ell: usize, params: &DeformParams) -> f64 {
    let c1 = 1.0 + params.c;
    c1 * c1 * (params.gamma(ell) + 2.0 * t as f64)
}

/// The spectrum formula `2(1+c)ℓ + 2(1+c)² t + (1+c)(m+c)`.
pub fn spectrum_value(t: f64, ell: usize, params: &DeformParams) -> f64 {
    let c1 = 1.0 + params.c;
    2.0 * c1 * ell as f64 + 2.0 * c1 * c1 * t + c1 * (params.m as f64 + params.c)
}

type SphereKey = (usize, usize, usize, usize, usize);

/// Spherical inner products `[⟨M, M'⟩, ⟨M, x̲M'⟩, ⟨x̲M, M'⟩, ⟨x̲M, x̲M'⟩]`.
fn sphere_block(m: usize, l1: usize, i1: usize, l2: usize, i2: usize) -> Result<[Complex64; 4]> {
    static CACHE: OnceLock<Mutex<HashMap<SphereKey, [Complex64; 4]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (m, l1, i1, l2, i2);
    if let Some(v) = cache.lock().expect("sphere cache poisoned").get(&key) {
        return Ok(*v);
    }
    let b1 = cached_basis(l1, m)?;
    let b2 = cached_basis(l2, m)?;
    let (p, xp) = (b1.get(i1)?, &b1.times_x[i1]);
    let (q, xq) = (b2.get(i2)?, &b2.times_x[i2]);
    let v = [
        spherical_inner(p, q)?,
        spherical_inner(p, xq)?,
        spherical_inner(xp, q)?,
        spherical_inner(xp, xq)?,
    ];
    cache.lock().expect("sphere cache poisoned").insert(key, v);
    Ok(v)
}

/// `⟨s1, s2⟩ = [∫ bar(s1^c) s2 h dx]_0`, exact.
pub fn inner_product(s1: &MonogenicSection, s2: &MonogenicSection) -> Result<Complex64> {
    if s1.params != s2.params {
        return Err(Error::InvalidParameter(
            "sections with different parameters".into(),
        ));
    }
    let base = s1.params.radial_exponent() + (s1.ell + s2.ell) as f64;
    let sph = sphere_block(s1.params.m, s1.ell, s1.idx, s2.ell, s2.idx)?;
    let pairs = [
        (&s1.f, &s2.f, 0.0, sph[0]),
        (&s1.f, &s2.g, 1.0, sph[1]),
        (&s1.g, &s2.f, 1.0, sph[2]),
        (&s1.g, &s2.g, 2.0, sph[3]),
    ];
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b, extra, w) in pairs {
        // Parity and degree mismatches give exact or round-off zeros on the sphere.
        if w.norm() < 1e-13 || a.is_zero() || b.is_zero() {
            continue;
        }
        acc += w * a.moment_pair(b, base + extra)?;
    }
    Ok(acc)
}

pub fn norm(s: &MonogenicSection) -> Result<f64> {
    Ok(inner_product(s, s)?.re.max(0.0).sqrt())
}

/// `‖φ_{t,ℓ}‖²`, the same for every basis index.
pub fn phi_norm_sq(t: usize, ell: usize, params: DeformParams) -> Result<f64> {
    let p = phi(t, ell, 0, params)?;
    Ok(inner_product(&p, &p)?.re)
}

/// `φ_{t,ℓ} / ‖φ_{t,ℓ}‖`.
pub fn phi_normalized(
    t: usize,
    ell: usize,
    idx: usize,
    params: DeformParams,
) -> Result<MonogenicSection> {
    let p = phi(t, ell, idx, params)?;
    let n = norm(&p)?;
    Ok(p.scale(1.0 / n))
}

/// Coefficients `⟨φ̂_t, s⟩` for `t = 0..=t_max` and the norm of the remainder.
pub fn project_onto_phi(s: &MonogenicSection, t_max: usize) -> Result<(Vec<Complex64>, f64)> {
    let mut coeffs = Vec::with_capacity(t_max + 1);
    let mut rest = s.clone();
    for t in 0..=t_max {
        let b = phi_normalized(t, s.ell, s.idx, s.params)?;
        let a = if b.f.gauss() == s.f.gauss() || s.f.is_zero() {
            inner_product(&b, s)?
        } else {
            return Err(Error::InvalidParameter(
                "projection needs the standard Gaussian e^{-r²/2}".into(),
            ));
        };
        rest = rest.sub(&b.scale(a))?;
        coeffs.push(a);
    }
    let rem = norm(&rest)?;
    Ok((coeffs, rem))
}

/// Central-difference directional data `(∂_i F)(x)` with step `h`.
fn fd_partials(f: &dyn Fn(&[f64]) -> Multivector, x: &[f64], h: f64) -> Vec<Multivector> {
    let mut xp = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let a = f(&xp);
        xp[i] = x[i] - h;
        let b = f(&xp);
        xp[i] = x[i];
        out.push((&a - &b).scale(0.5 / h));
    }
    out
}

/// Coefficients of `r^{1-a/2} ∂ₓ + b r^{-a/2-1} x̲ + c r^{-a/2-1} x̲ 𝔼`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracFamily {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DiracFamily {
    /// The reduced operator **D** = ∂ₓ + c r⁻² x̲ 𝔼.
    pub fn reduced(c: f64) -> Self {
        Self { a: 2.0, b: 0.0, c }
    }
}

fn fd_family_once(
    f: &dyn Fn(&[f64]) -> Multivector,
    x: &[f64],
    h: f64,
    op: DiracFamily,
) -> Multivector {
    let m = x.len();
    let r2: f64 = x.iter().map(|t| t * t).sum();
    let r = r2.sqrt();
    let parts = fd_partials(f, x, h);
    let mut dirac = Multivector::zero(m);
    let mut euler = Multivector::zero(m);
    for (i, d) in parts.iter().enumerate() {
        dirac += &(&Multivector::generator(m, i + 1) * d);
        euler += &d.scale(x[i]);
    }
    let xv = embed_vector(x);
    let tail = r.powf(-op.a / 2.0 - 1.0);
    let mut out = dirac.scale(r.powf(1.0 - op.a / 2.0));
    if op.b != 0.0 {
        out += &(&xv * &f(x)).scale(op.b * tail);
    }
    if op.c != 0.0 {
        out += &(&xv * &euler).scale(op.c * tail);
    }
    out
}

/// Finite-difference `(r^{1-a/2} ∂ₓ + b r^{-a/2-1} x̲ + c r^{-a/2-1} x̲ 𝔼) F` at `x`,
/// central differences at `h` and `h/2` combined by Richardson extrapolation.
pub fn fd_family(
    f: &dyn Fn(&[f64]) -> Multivector,
    x: &[f64],
    h: f64,
    op: DiracFamily,
) -> Multivector {
    let coarse = fd_family_once(f, x, h, op);
    let fine = fd_family_once(f, x, h / 2.0, op);
    (&fine.scale(4.0) - &coarse).scale(1.0 / 3.0)
}

/// Finite-difference **D**F at `x`.
pub fn fd_dirac(f: &dyn Fn(&[f64]) -> Multivector, x: &[f64], h: f64, c: f64) -> Multivector {
    fd_family(f, x, h, DiracFamily::reduced(c))
}

/// Default finite-difference step `1e-4 · max(1, |x|)`.
pub fn fd_step(x: &[f64]) -> f64 {
    1e-4 * x.iter().map(|t| t * t).sum::<f64>().sqrt().max(1.0)
}

/// Generalised Kelvin maps `P` and `Q` of the `(a, b)` family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kelvin {
    /// `(PF)(x) = r^b F((a/2)^{1/a} x̲ r^{2/a-1})`.
    P { a: f64, b: f64 },
    /// `(QF)(x) = r^{-ab/2} F((2/a)^{1/2} x̲ r^{a/2-1})`.
    Q { a: f64, b: f64 },
}

impl Kelvin {
    pub fn p(a: f64, b: f64) -> Result<Self> {
        Self::check(a)?;
        Ok(Kelvin::P { a, b })
    }

    pub fn q(a: f64, b: f64) -> Result<Self> {
        Self::check(a)?;
        Ok(Kelvin::Q { a, b })
    }

    fn check(a: f64) -> Result<()> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Kelvin parameter a must be nonzero, got {a}"
            )));
        }
        Ok(())
    }

    /// `(prefactor exponent, point scale, point exponent)`.
    fn shape(&self) -> (f64, f64, f64) {
        match *self {
            Kelvin::P { a, b } => (b, (a / 2.0).powf(1.0 / a), 2.0 / a - 1.0),
            Kelvin::Q { a, b } => (-a * b / 2.0, (2.0 / a).sqrt(), a / 2.0 - 1.0),
        }
    }

    pub fn apply(&self, f: &dyn Fn(&[f64]) -> Multivector, x: &[f64]) -> Result<Multivector> {
        let (pow, scale, pexp) = self.shape();
        let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if r == 0.0 {
            if pow < 0.0 || pexp + 1.0 < 0.0 {
                return Err(Error::InvalidParameter(
                    "Kelvin map singular at the origin".into(),
                ));
            }
            let v = f(x);
            return Ok(if pow == 0.0 { v } else { v.scale(0.0) });
        }
        let k = scale * r.powf(pexp);
        let y: Vec<f64> = x.iter().map(|t| k * t).collect();
        Ok(f(&y).scale(r.powf(pow)))
    }
}

/// The constants `(β, γ)` of the operator obtained by conjugating
/// `∂ₓ + b r⁻² x̲ + c r⁻² x̲ 𝔼` with the Kelvin maps: `β = b(2+c)`, `γ = (2/a)(1+c) - 1`.
pub fn kelvin_conjugate(a: f64, b: f64, c: f64) -> DiracFamily {
    DiracFamily {
        a,
        b: b * (2.0 + c),
        c: 2.0 / a * (1.0 + c) - 1.0,
    }
}
