//! Gauss rules on intervals and product rules on spheres.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::log_gamma;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = self.nodes.iter().map(|t| mid + half * t).collect();
        let weights = self.weights.iter().map(|w| half * w).collect();
        (nodes, weights)
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(mid + half * t))
            .sum::<f64>()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss rule for the weight `(1 - t²)^a` on `[-1, 1]` via Golub–Welsch, `a > -1`.
pub fn gauss_gegenbauer(n: usize, a: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(a > -1.0) || n == 0 {
        return Err(Error::Quadrature(format!(
            "invalid Gegenbauer rule n={n}, a={a}"
        )));
    }
    if a == 0.0 {
        let gl = GaussLegendre::new(n);
        return Ok((gl.nodes, gl.weights));
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b2 = kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0));
        let b = b2.sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let mu0 = (0.5 * PI.ln() + log_gamma(a + 1.0)? - log_gamma(a + 1.5)?).exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs.into_iter().unzip())
}

/// Radial Gauss–Legendre rule on `[r_min, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialRule {
    pub n_r: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for RadialRule {
    fn default() -> Self {
        Self {
            n_r: 400,
            r_min: 1e-6,
            r_max: 12.0,
        }
    }
}

/// Product rule on `S^{m-1}`: `n_theta` Gauss nodes per polar angle, `n_phi` uniform azimuths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereRule {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for SphereRule {
    fn default() -> Self {
        Self {
            n_theta: 64,
            n_phi: 128,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial: RadialRule,
    pub sphere: SphereRule,
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let r = &self.radial;
        if r.n_r == 0 || !(r.r_min > 0.0) || !(r.r_max > r.r_min) || !r.r_max.is_finite() {
            return Err(Error::Quadrature(format!(
                "radial rule needs n_r > 0 and 0 < r_min < R_max, got n_r={}, r_min={}, R_max={}",
                r.n_r, r.r_min, r.r_max
            )));
        }
        if self.sphere.n_theta == 0 || self.sphere.n_phi == 0 {
            return Err(Error::Quadrature(
                "sphere rule needs n_theta, n_phi > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn radial_nodes(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        self.validate()?;
        let r = &self.radial;
        Ok(GaussLegendre::new(r.n_r).mapped(r.r_min, r.r_max))
    }

    pub fn sphere_nodes(&self, m: usize) -> Result<SphereNodes> {
        self.validate()?;
        sphere_rule(m, self.sphere.n_theta, self.sphere.n_phi)
    }

    /// Same rule with doubled `R_max` and `n_r`, for truncation estimates.
    pub fn doubled(&self) -> Self {
        let mut q = *self;
        q.radial.r_max *= 2.0;
        q.radial.n_r *= 2;
        q
    }
}

/// Points on the unit sphere with positive weights summing to `σ_m`.
#[derive(Debug, Clone)]
pub struct SphereNodes {
    pub m: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereNodes {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Product rule on `S^{m-1}`, `m ≥ 2`. Built recursively from the last coordinate down.
pub fn sphere_rule(m: usize, n_theta: usize, n_phi: usize) -> Result<SphereNodes> {
    if m < 2 {
        return Err(Error::Quadrature(format!(
            "sphere rule needs m >= 2, got {m}"
        )));
    }
    if m == 2 {
        let h = 2.0 * PI / n_phi as f64;
        let points = (0..n_phi)
            .map(|j| {
                let phi = h * j as f64;
                vec![phi.cos(), phi.sin()]
            })
            .collect();
        return Ok(SphereNodes {
            m,
            points,
            weights: vec![h; n_phi],
        });
    }
    // x_m = t with weight (1 - t²)^{(m-3)/2}, the rest scaled by sqrt(1 - t²).
    let (ts, wts) = gauss_gegenbauer(n_theta, 0.5 * (m as f64 - 3.0))?;
    let inner = sphere_rule(m - 1, n_theta, n_phi)?;
    let mut points = Vec::with_capacity(ts.len() * inner.len());
    let mut weights = Vec::with_capacity(ts.len() * inner.len());
    for (t, wt) in ts.iter().zip(&wts) {
        let rho = (1.0 - t * t).sqrt();
        for (p, wp) in inner.points.iter().zip(&inner.weights) {
            let mut q: Vec<f64> = p.iter().map(|v| rho * v).collect();
            q.push(*t);
            points.push(q);
            weights.push(wt * wp);
        }
    }
    Ok(SphereNodes { m, points, weights })
}

/// Surface area `σ_m = 2π^{m/2} / Γ(m/2)` of `S^{m-1}`.
pub fn sphere_area(m: usize) -> f64 {
    let half = m as f64 / 2.0;
    2.0 * (half * PI.ln() - log_gamma(half).expect("m >= 1")).exp()
}
