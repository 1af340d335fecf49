//! Dense Clifford algebra `Cl_m` with negative-definite signature.
//!
//! Blades are stored by bitmask: bit `i - 1` set means `e_i` is a factor,
//! so the coefficient vector has `2^m` slots. Generators satisfy
//! `e_i e_j = -e_j e_i` for `i != j` and `e_i^2 = -1`. Scalars are complex.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest algebra dimension accepted.
pub const MAX_DIM: usize = 12;

/// Sign of `e_A e_B` for blade bitmasks `a`, `b` (including `e_i^2 = -1`).
#[inline]
pub fn blade_sign(a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut t = a >> 1;
    while t != 0 {
        swaps += (t & b).count_ones();
        t >>= 1;
    }
    swaps += (a & b).count_ones();
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Grade of a blade bitmask.
#[inline]
pub fn blade_grade(blade: usize) -> usize {
    blade.count_ones() as usize
}

/// Indices (1-based, increasing) of the generators in a blade.
pub fn blade_indices(blade: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|i| blade >> i & 1 == 1)
        .map(|i| i + 1)
        .collect()
}

fn blade_from_indices(indices: &[usize], m: usize) -> Result<usize> {
    let mut blade = 0usize;
    let mut last = 0usize;
    for &i in indices {
        if i == 0 || i > m || i <= last {
            return Err(Error::Parse(format!(
                "blade {indices:?} is not a strictly increasing subset of 1..={m}"
            )));
        }
        blade |= 1 << (i - 1);
        last = i;
    }
    Ok(blade)
}

/// Element of `Cl_m` with complex coefficients.
#[derive(Clone, PartialEq)]
pub struct Multivector {
    m: usize,
    coeffs: Vec<Complex64>,
}

impl Multivector {
    pub fn zero(m: usize) -> Self {
        assert!(m <= MAX_DIM, "Cl_{m} exceeds the supported dimension");
        Self {
            m,
            coeffs: vec![Complex64::new(0.0, 0.0); 1 << m],
        }
    }

    pub fn scalar(m: usize, value: impl Into<Complex64>) -> Self {
        let mut out = Self::zero(m);
        out.coeffs[0] = value.into();
        out
    }

    pub fn one(m: usize) -> Self {
        Self::scalar(m, 1.0)
    }

    /// Basis blade `e_A` with coefficient one.
    pub fn blade(m: usize, blade: usize) -> Self {
        let mut out = Self::zero(m);
        out.coeffs[blade] = Complex64::new(1.0, 0.0);
        out
    }

    /// Generator `e_i`, `i` in `1..=m`.
    pub fn generator(m: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= m);
        Self::blade(m, 1 << (i - 1))
    }

    pub fn from_coeffs(m: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 1 << m {
            return Err(Error::InvalidParameter(format!(
                "Cl_{m} needs {} coefficients, got {}",
                1 << m,
                coeffs.len()
            )));
        }
        Ok(Self { m, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, blade: usize) -> Complex64 {
        self.coeffs[blade]
    }

    pub fn set_coeff(&mut self, blade: usize, value: Complex64) {
        self.coeffs[blade] = value;
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch(self.m, other.m));
        }
        let mut out = Self::zero(self.m);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca.re == 0.0 && ca.im == 0.0 {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb.re == 0.0 && cb.im == 0.0 {
                    continue;
                }
                out.coeffs[a ^ b] += ca * cb * blade_sign(a, b);
            }
        }
        Ok(out)
    }

    /// `[a]_k`.
    pub fn grade_project(&self, k: usize) -> Result<Self> {
        if k > self.m {
            return Err(Error::GradeOutOfRange {
                grade: k,
                m: self.m,
            });
        }
        let mut out = Self::zero(self.m);
        for (blade, c) in self.coeffs.iter().enumerate() {
            if blade_grade(blade) == k {
                out.coeffs[blade] = *c;
            }
        }
        Ok(out)
    }

    /// Main anti-involution: `bar(ab) = bar(b) bar(a)`, `bar(e_i) = -e_i`.
    pub fn bar(&self) -> Self {
        self.map_by_grade(|k| {
            let sign = k + k * k.saturating_sub(1) / 2;
            if sign % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
    }

    /// Grade automorphism `ε(e_i) = -e_i`.
    pub fn epsilon(&self) -> Self {
        self.map_by_grade(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
    }

    /// Complex conjugation of the scalar coefficients.
    pub fn conj(&self) -> Self {
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    fn map_by_grade(&self, sign: impl Fn(usize) -> f64) -> Self {
        Self {
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(blade, c)| c * sign(blade_grade(blade)))
                .collect(),
        }
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.m, other.m);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when only grade-`k` coefficients exceed `tol` in modulus.
    pub fn is_grade(&self, k: usize, tol: f64) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(blade, c)| blade_grade(blade) == k || c.norm() <= tol)
    }

    /// Vector part as a complex array of length `m`.
    pub fn vector_components(&self) -> Vec<Complex64> {
        (0..self.m).map(|i| self.coeffs[1 << i]).collect()
    }

    /// Real vector for a grade-1 element with (numerically) real coefficients.
    pub fn to_real_vector(&self, tol: f64) -> Result<Vec<f64>> {
        if !self.is_grade(1, tol) {
            return Err(Error::NotAVector);
        }
        Ok(self.vector_components().iter().map(|c| c.re).collect())
    }

    /// Inverse of a versor (product of non-null vectors): `bar(s) / (s bar(s))`.
    pub fn versor_inverse(&self) -> Result<Self> {
        let sb = self.bar();
        let n = self.geometric_product(&sb)?.scalar_part();
        if n.norm() == 0.0 {
            return Err(Error::InvalidParameter("versor with zero norm".into()));
        }
        Ok(sb.scale(1.0 / n))
    }

    /// Coefficients in canonical blade order (lexicographic on index sets),
    /// skipping exact zeros.
    pub fn canonical_terms(&self) -> Vec<(Vec<usize>, Complex64)> {
        let mut terms: Vec<(Vec<usize>, Complex64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(blade, c)| (blade_indices(blade), *c))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        terms
    }
}

/// `[bar(a^c) b]_0` computed directly: for blades `[bar(e_A) e_B]_0 = δ_AB`.
pub fn bar_scalar_product(a: &Multivector, b: &Multivector) -> Complex64 {
    assert_eq!(a.m, b.m);
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// `x̲ = Σ e_i x_i`.
pub fn embed_vector(x: &[f64]) -> Multivector {
    let mut out = Multivector::zero(x.len());
    for (i, &xi) in x.iter().enumerate() {
        out.coeffs[1 << i] = Complex64::new(xi, 0.0);
    }
    out
}

/// `x̲ ∧ y̲ = Σ_{j<k} e_j e_k (x_j y_k - x_k y_j)` for real vectors.
pub fn wedge_vectors(x: &[f64], y: &[f64]) -> Result<Multivector> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    let m = x.len();
    let mut out = Multivector::zero(m);
    for j in 0..m {
        for k in j + 1..m {
            out.coeffs[(1 << j) | (1 << k)] = Complex64::new(x[j] * y[k] - x[k] * y[j], 0.0);
        }
    }
    Ok(out)
}

/// Wedge of two grade-1 multivectors.
pub fn wedge(x: &Multivector, y: &Multivector) -> Result<Multivector> {
    if x.m != y.m {
        return Err(Error::DimensionMismatch(x.m, y.m));
    }
    let tol = 1e-14 * (1.0 + x.max_abs().max(y.max_abs()));
    if !x.is_grade(1, tol) || !y.is_grade(1, tol) {
        return Err(Error::NotAVector);
    }
    let xv = x.vector_components();
    let yv = y.vector_components();
    let mut out = Multivector::zero(x.m);
    for j in 0..x.m {
        for k in j + 1..x.m {
            out.coeffs[(1 << j) | (1 << k)] = xv[j] * yv[k] - xv[k] * yv[j];
        }
    }
    Ok(out)
}

/// Product of `n_factors` uniformly random unit vectors of `Cl_m`.
pub fn random_spin_element(m: usize, n_factors: usize, seed: u64) -> Result<Multivector> {
    if n_factors % 2 == 1 {
        return Err(Error::OddFactorCount(n_factors));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Multivector::one(m);
    for _ in 0..n_factors {
        let v = random_unit_vector(m, &mut rng);
        s = &s * &embed_vector(&v);
    }
    Ok(s)
}

/// Uniform point on `S^{m-1}` (normalised Gaussian vector).
pub fn random_unit_vector<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| standard_normal(rng)).collect();
        let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if n > 1e-8 {
            return v.into_iter().map(|t| t / n).collect();
        }
    }
}

/// Box–Muller draw.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Covering map `p(s)(x) = ε(s) x̲ s^{-1}` applied to a real vector.
pub fn pin_action(s: &Multivector, x: &[f64]) -> Result<Vec<f64>> {
    let xv = embed_vector(x);
    if xv.m != s.m {
        return Err(Error::DimensionMismatch(s.m, xv.m));
    }
    let out = &(&s.epsilon() * &xv) * &s.versor_inverse()?;
    out.to_real_vector(1e-10 * (1.0 + out.max_abs()))
}

impl Mul for &Multivector {
    type Output = Multivector;

    /// Geometric product; panics on dimension mismatch (see
    /// [`Multivector::geometric_product`] for the fallible form).
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.geometric_product(rhs)
            .expect("geometric product of multivectors from different algebras")
    }
}

impl Add for &Multivector {
    type Output = Multivector;

    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.m, rhs.m);
        Multivector {
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.m, rhs.m);
        Multivector {
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        assert_eq!(self.m, rhs.m);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cl_{}[", self.m)?;
        let mut first = true;
        for (blade, c) in self.canonical_terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6e}{:+.6e}i)e{:?}", c.re, c.im, blade)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    blade: Vec<usize>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct MultivectorRepr {
    m: usize,
    coeffs: Vec<TermRepr>,
}

impl Serialize for Multivector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MultivectorRepr {
            m: self.m,
            coeffs: self
                .canonical_terms()
                .into_iter()
                .map(|(blade, c)| TermRepr {
                    blade,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Multivector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MultivectorRepr::deserialize(deserializer)?;
        if repr.m == 0 || repr.m > MAX_DIM {
            return Err(serde::de::Error::custom(format!(
                "unsupported dimension {}",
                repr.m
            )));
        }
        let mut out = Multivector::zero(repr.m);
        for t in repr.coeffs {
            let blade = blade_from_indices(&t.blade, repr.m).map_err(serde::de::Error::custom)?;
            out.coeffs[blade] += Complex64::new(t.re, t.im);
        }
        Ok(out)
    }
}
