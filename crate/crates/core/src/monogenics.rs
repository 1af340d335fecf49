//! Clifford-valued homogeneous polynomials and orthonormal bases of
//! spherical monogenics `M_ℓ = ker ∂ₓ ∩ (P_ℓ ⊗ Cl_m)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{bar_scalar_product, blade_sign, Multivector};
use crate::error::{Error, Result};
use crate::specfun::log_gamma;

/// Homogeneous polynomial of degree `ℓ` in `m` variables with `Cl_m` coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCl {
    m: usize,
    degree: usize,
    #[serde(with = "term_list")]
    terms: BTreeMap<Vec<u32>, Multivector>,
}

mod term_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Term {
        exponent: Vec<u32>,
        coeff: Multivector,
    }

    pub fn serialize<S: Serializer>(
        terms: &BTreeMap<Vec<u32>, Multivector>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<Term> = terms
            .iter()
            .map(|(e, c)| Term {
                exponent: e.clone(),
                coeff: c.clone(),
            })
            .collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Vec<u32>, Multivector>, D::Error> {
        let list = Vec::<Term>::deserialize(d)?;
        Ok(list.into_iter().map(|t| (t.exponent, t.coeff)).collect())
    }
}

/// All exponent vectors of total degree `ell` in `m` variables, lexicographically descending.
pub fn monomials(m: usize, ell: usize) -> Vec<Vec<u32>> {
    fn rec(m: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == m {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            rec(m, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        rec(m, ell as u32, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

impl PolyCl {
    pub fn zero(m: usize, degree: usize) -> Self {
        Self {
            m,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Multivector) -> Self {
        let m = c.dim();
        let mut p = Self::zero(m, 0);
        p.add_term(vec![0; m], c);
        p
    }

    /// Single term `coeff · x^α`.
    pub fn monomial(exponent: Vec<u32>, coeff: Multivector) -> Result<Self> {
        if exponent.len() != coeff.dim() {
            return Err(Error::DimensionMismatch(exponent.len(), coeff.dim()));
        }
        let degree = exponent.iter().sum::<u32>() as usize;
        let mut p = Self::zero(coeff.dim(), degree);
        p.add_term(exponent, coeff);
        Ok(p)
    }

    /// `x̲ = Σ e_i x_i` as a degree-one polynomial.
    pub fn vector_variable(m: usize) -> Self {
        let mut p = Self::zero(m, 1);
        for i in 0..m {
            let mut e = vec![0; m];
            e[i] = 1;
            p.add_term(e, Multivector::generator(m, i + 1));
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Multivector)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.max_abs() == 0.0)
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    fn add_term(&mut self, exponent: Vec<u32>, coeff: Multivector) {
        debug_assert_eq!(exponent.iter().sum::<u32>() as usize, self.degree);
        match self.terms.get_mut(&exponent) {
            Some(c) => *c += &coeff,
            None => {
                self.terms.insert(exponent, coeff);
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch(self.m, other.m));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidParameter(format!(
                "cannot add homogeneous polynomials of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut out = self.clone();
        if other.is_zero() {
            return Ok(out);
        }
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.scale(s);
        }
        out
    }

    /// Product `p · q` (Clifford product of coefficients, degrees add).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.m, self.degree + other.degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.geometric_product(cb)?);
            }
        }
        Ok(out)
    }

    /// `x̲ · p`.
    pub fn times_vector_variable(&self) -> Self {
        Self::vector_variable(self.m)
            .mul(self)
            .expect("same dimension")
    }

    /// `∂_{x_i} p`, `i` zero-based.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.m, self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c.scale(e[i] as f64));
        }
        out
    }

    /// Dirac operator `∂ₓ p = Σ e_i ∂_{x_i} p`.
    pub fn dirac(&self) -> Self {
        let mut out = Self::zero(self.m, self.degree.saturating_sub(1));
        for i in 0..self.m {
            let ei = Multivector::generator(self.m, i + 1);
            for (e, c) in &self.partial(i).terms {
                out.add_term(e.clone(), &ei * c);
            }
        }
        out
    }

    /// Euler operator `𝔼 = Σ x_i ∂_{x_i}`; on a homogeneous polynomial this is `ℓ · p`.
    pub fn euler(&self) -> Self {
        let mut out = Self::zero(self.m, self.degree);
        for i in 0..self.m {
            for (e, c) in &self.partial(i).terms {
                let mut up = e.clone();
                up[i] += 1;
                out.add_term(up, c.clone());
            }
        }
        out
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Multivector> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch(self.m, x.len()));
        }
        let mut out = Multivector::zero(self.m);
        for (e, c) in &self.terms {
            let v: f64 = e.iter().zip(x).map(|(&a, &xi)| xi.powi(a as i32)).product();
            out += &c.scale(v);
        }
        Ok(out)
    }
}

/// `∫_{S^{m-1}} x^α dσ`.
pub fn sphere_integral_monomial(alpha: &[u32], m: usize) -> f64 {
    debug_assert_eq!(alpha.len(), m);
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let total: u32 = alpha.iter().sum();
    let mut lg = -log_gamma((total as f64 + m as f64) / 2.0).expect("positive");
    for &a in alpha {
        lg += log_gamma((a as f64 + 1.0) / 2.0).expect("positive");
    }
    2.0 * lg.exp()
}

/// `[∫_{S^{m-1}} bar(p^c) q dσ]_0`, exact term by term.
pub fn spherical_inner(p: &PolyCl, q: &PolyCl) -> Result<Complex64> {
    p.check_same(q)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (ea, ca) in &p.terms {
        for (eb, cb) in &q.terms {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
            let s = sphere_integral_monomial(&e, p.m);
            if s != 0.0 {
                acc += bar_scalar_product(ca, cb) * s;
            }
        }
    }
    Ok(acc)
}

/// `dim M_ℓ = 2^m (ℓ+m-2)! / (ℓ! (m-2)!)`.
pub fn monogenic_dimension(ell: usize, m: usize) -> usize {
    assert!(m >= 2);
    let mut binom: usize = 1;
    // C(ℓ+m-2, ℓ) built incrementally to stay exact.
    for j in 1..=ell {
        binom = binom * (m - 2 + j) / j;
    }
    binom << m
}

/// Orthonormal basis of `M_ℓ` together with `x̲ M` for each element.
#[derive(Debug, Clone, Serialize)]
pub struct MonogenicBasis {
    pub m: usize,
    pub ell: usize,
    pub elements: Vec<PolyCl>,
    #[serde(skip)]
    pub times_x: Vec<PolyCl>,
}

impl MonogenicBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, idx: usize) -> Result<&PolyCl> {
        self.elements.get(idx).ok_or(Error::InvalidIndex {
            idx,
            dim: self.elements.len(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.elements).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Builds an orthonormal basis of `M_ℓ` in `m ≥ 3` dimensions.
///
/// The coefficient space is expanded over (monomial, blade) pairs with real
/// unknowns; `∂ₓ p = 0` becomes a sparse integer system whose null space is
/// taken from the reduced row echelon form. Free columns are visited in
/// increasing order, which fixes the basis order.
pub fn monogenic_basis(ell: usize, m: usize) -> Result<Vec<PolyCl>> {
    Ok(build_basis(ell, m)?.elements)
}

/// Shared, lazily built basis.
pub fn cached_basis(ell: usize, m: usize) -> Result<Arc<MonogenicBasis>> {
    type Cache = Mutex<HashMap<(usize, usize), Arc<MonogenicBasis>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().expect("basis cache poisoned").get(&(ell, m)) {
        return Ok(Arc::clone(b));
    }
    let built = Arc::new(build_basis(ell, m)?);
    let mut guard = cache.lock().expect("basis cache poisoned");
    Ok(Arc::clone(guard.entry((ell, m)).or_insert(built)))
}

fn build_basis(ell: usize, m: usize) -> Result<MonogenicBasis> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "monogenic bases need m >= 3, got {m}"
        )));
    }
    if m > 6 {
        return Err(Error::InvalidParameter(format!(
            "monogenic bases limited to m <= 6, got {m}"
        )));
    }
    let nb = 1usize << m;
    let cols_mono = monomials(m, ell);
    let ncols = cols_mono.len() * nb;
    let expected = monogenic_dimension(ell, m);

    let null_vectors: Vec<Vec<f64>> = if ell == 0 {
        (0..ncols)
            .map(|j| {
                let mut v = vec![0.0; ncols];
                v[j] = 1.0;
                v
            })
            .collect()
    } else {
        let rows_mono = monomials(m, ell - 1);
        let row_index: HashMap<&Vec<u32>, usize> =
            rows_mono.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let nrows = rows_mono.len() * nb;
        let mut a = DMatrix::<f64>::zeros(nrows, ncols);
        for (j, e) in cols_mono.iter().enumerate() {
            for blade in 0..nb {
                let col = j * nb + blade;
                for i in 0..m {
                    if e[i] == 0 {
                        continue;
                    }
                    let mut d = e.clone();
                    d[i] -= 1;
                    let bit = 1usize << i;
                    let row = row_index[&d] * nb + (blade ^ bit);
                    a[(row, col)] += e[i] as f64 * blade_sign(bit, blade);
                }
            }
        }
        let svd = a.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * smax)
            .count();
        let nullity = ncols - rank;
        if nullity != expected {
            return Err(Error::RankDeficiency {
                found: nullity,
                expected,
            });
        }
        let vs = rref_null_space(a);
        if vs.len() != expected {
            return Err(Error::RankDeficiency {
                found: vs.len(),
                expected,
            });
        }
        vs
    };

    // Sphere moment matrix on monomials: positive definite, since a homogeneous
    // polynomial vanishing on the sphere vanishes identically.
    let nm = cols_mono.len();
    let mut gram = DMatrix::<f64>::zeros(nm, nm);
    for (i, a) in cols_mono.iter().enumerate() {
        for (j, b) in cols_mono.iter().enumerate() {
            let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            gram[(i, j)] = sphere_integral_monomial(&e, m);
        }
    }
    let chol = gram.cholesky().ok_or_else(|| {
        Error::InvalidParameter("sphere moment matrix not positive definite".into())
    })?;
    let lt = chol.l().transpose();

    // Map coefficient vectors to a Euclidean frame: per blade, u ↦ Lᵀ u.
    let to_frame = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; ncols];
        for blade in 0..nb {
            for i in 0..nm {
                let mut s = 0.0;
                for j in i..nm {
                    s += lt[(i, j)] * v[j * nb + blade];
                }
                out[i * nb + blade] = s;
            }
        }
        out
    };
    let frame: Vec<Vec<f64>> = null_vectors.iter().map(|v| to_frame(v)).collect();
    let ortho = modified_gram_schmidt(&null_vectors, &frame)?;

    let mut elements = Vec::with_capacity(ortho.len());
    for v in &ortho {
        let mut p = PolyCl::zero(m, ell);
        for (j, e) in cols_mono.iter().enumerate() {
            let mut coeff = Multivector::zero(m);
            let mut any = false;
            for blade in 0..nb {
                let x = v[j * nb + blade];
                if x.abs() > 1e-15 {
                    coeff.set_coeff(blade, Complex64::new(x, 0.0));
                    any = true;
                }
            }
            if any {
                p.add_term(e.clone(), coeff);
            }
        }
        elements.push(p);
    }
    let times_x = elements.iter().map(|p| p.times_vector_variable()).collect();
    Ok(MonogenicBasis {
        m,
        ell,
        elements,
        times_x,
    })
}

/// Null space of `a` from its reduced row echelon form; one vector per free column.
fn rref_null_space(mut a: DMatrix<f64>) -> Vec<Vec<f64>> {
    let (nrows, ncols) = a.shape();
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let tol = 1e-10 * scale.max(1.0);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let (best, val) = (row..nrows)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        a.swap_rows(row, best);
        let p = a[(row, col)];
        for c in col..ncols {
            a[(row, c)] /= p;
        }
        for r in 0..nrows {
            if r != row {
                let f = a[(r, col)];
                if f != 0.0 {
                    for c in col..ncols {
                        let v = a[(row, c)];
                        a[(r, c)] -= f * v;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let is_pivot: Vec<Option<usize>> = {
        let mut v = vec![None; ncols];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = Some(r);
        }
        v
    };
    (0..ncols)
        .filter(|&c| is_pivot[c].is_none())
        .map(|free| {
            let mut v = vec![0.0; ncols];
            v[free] = 1.0;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[(r, free)];
            }
            v
        })
        .collect()
}

/// Modified Gram–Schmidt with one re-orthogonalisation pass. `coords` are the
/// original coefficient vectors, `frame` their images under the isometry.
fn modified_gram_schmidt(coords: &[Vec<f64>], frame: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut out_c: Vec<Vec<f64>> = Vec::with_capacity(coords.len());
    let mut out_f: Vec<Vec<f64>> = Vec::with_capacity(coords.len());
    for (c, f) in coords.iter().zip(frame) {
        let mut c = c.clone();
        let mut f = f.clone();
        for _pass in 0..2 {
            for (qc, qf) in out_c.iter().zip(&out_f) {
                let proj = dot(qf, &f);
                for (x, y) in f.iter_mut().zip(qf) {
                    *x -= proj * y;
                }
                for (x, y) in c.iter_mut().zip(qc) {
                    *x -= proj * y;
                }
            }
        }
        let n = dot(&f, &f).sqrt();
        if n < 1e-12 {
            return Err(Error::RankDeficiency {
                found: out_c.len(),
                expected: coords.len(),
            });
        }
        c.iter_mut().for_each(|x| *x /= n);
        f.iter_mut().for_each(|x| *x /= n);
        out_c.push(c);
        out_f.push(f);
    }
    Ok(out_c)
}
