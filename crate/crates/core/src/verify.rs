//! Invariant suites with machine-readable records.
//!
//! Each suite pushes one [`Record`] per identity. The residual is the worst case over all
//! samples, so a record passes iff every sample does.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{
    embed_vector, random_spin_element, random_unit_vector, wedge_vectors, Multivector,
};
use crate::error::{Error, Result};
use crate::kernel::{
    fourier_kernel, fourier_limit_residual, kernel, kernel_series_component, pde_residual, repr_p,
    repr_q, semigroup_kernel, KernelParams, SeriesComponent, Truncation, FOURIER_OMEGA,
};
use crate::monogenics::cached_basis;
use crate::quadrature::{GaussLegendre, QuadratureSpec, RadialRule, SphereRule};
use crate::radial::{
    a_minus, a_plus, apply_d, apply_e, apply_l, apply_x, fd_dirac, fd_step, inner_product,
    ladder_constant, phi, phi_normalized, spectrum_value, DeformParams, MonogenicSection,
};
use crate::specfun::{bessel_i, bessel_j, bessel_j_tilde, gamma, gegenbauer, laguerre, log_gamma};
use crate::transform::{
    apply_transform_field, bochner, eigenvalue_map, fourier_order, gaussian_transform, heisenberg,
    heisenberg_gaussian, hs_norm, intertwining_pairing, intertwining_residuals, parseval_check,
    transform_section_at, transformed_norm_sq, Expansion, Parity,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Osp12,
    Basis,
    FunkHecke,
    KernelProps,
    Transform,
    Heisenberg,
    Master,
    Pde,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Self::Osp12,
        Self::Basis,
        Self::FunkHecke,
        Self::KernelProps,
        Self::Transform,
        Self::Heisenberg,
        Self::Master,
        Self::Pde,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Osp12 => "osp12",
            Self::Basis => "basis",
            Self::FunkHecke => "funk-hecke",
            Self::KernelProps => "kernel-props",
            Self::Transform => "transform",
            Self::Heisenberg => "heisenberg",
            Self::Master => "master",
            Self::Pde => "pde",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|x| x.name()).collect();
                Error::Parse(format!(
                    "unknown suite '{s}', expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    pub test: String,
    /// Label of the identity being checked.
    pub paper_ref: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub params: DeformParams,
    /// Extra semigroup parameter checked alongside the three standard ones.
    pub omega: Complex64,
    pub trunc: Truncation,
    pub quad: QuadratureSpec,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn new(params: DeformParams) -> Self {
        Self {
            params,
            omega: FOURIER_OMEGA,
            trunc: Truncation::default(),
            quad: QuadratureSpec::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        KernelParams::new(self.params, self.omega, self.trunc)?;
        self.quad.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub m: usize,
    pub c: f64,
    pub omega_re: f64,
    pub omega_im: f64,
    pub seed: u64,
    pub pass: bool,
    pub records: Vec<Record>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }
}

struct Sink {
    suite: Suite,
    records: Vec<Record>,
}

impl Sink {
    fn push(&mut self, test: &str, paper_ref: &str, residual: f64, tol: f64) {
        self.records.push(Record {
            suite: self.suite.name().into(),
            test: test.into(),
            paper_ref: paper_ref.into(),
            residual,
            tol,
            pass: residual <= tol,
        });
    }
}

/// Runs the given suites in order.
pub fn run(suites: &[Suite], cfg: &VerifyConfig) -> Result<Report> {
    cfg.validate()?;
    let mut records = Vec::new();
    for &s in suites {
        records.extend(run_suite(s, cfg)?);
    }
    Ok(Report {
        m: cfg.params.m,
        c: cfg.params.c,
        omega_re: cfg.omega.re,
        omega_im: cfg.omega.im,
        seed: cfg.seed,
        pass: records.iter().all(|r| r.pass),
        records,
    })
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<Record>> {
    let mut sink = Sink {
        suite,
        records: Vec::new(),
    };
    // each suite gets its own stream so filtering does not change the samples
    let mut rng =
        ChaCha8Rng::seed_from_u64(cfg.seed ^ (suite as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    match suite {
        Suite::Osp12 => osp12(cfg, &mut rng, &mut sink)?,
        Suite::Basis => basis(cfg, &mut sink)?,
        Suite::FunkHecke => funk_hecke(cfg, &mut rng, &mut sink)?,
        Suite::KernelProps => kernel_props(cfg, &mut rng, &mut sink)?,
        Suite::Transform => transform(cfg, &mut rng, &mut sink)?,
        Suite::Heisenberg => heisenberg_suite(cfg, &mut rng, &mut sink)?,
        Suite::Master => master(cfg, &mut rng, &mut sink)?,
        Suite::Pde => pde(cfg, &mut sink)?,
    }
    Ok(sink.records)
}

/// A point with `|x|` uniform in `[r0, r1]`.
pub fn random_point<R: Rng>(rng: &mut R, m: usize, r0: f64, r1: f64) -> Vec<f64> {
    let r = rng.random_range(r0..r1);
    random_unit_vector(m, rng)
        .into_iter()
        .map(|t| t * r)
        .collect()
}

/// Random combination of `φ̂_{t,ℓ,idx}`, `t ≤ 4`, for one random `(ℓ ≤ 3, idx)`.
pub fn random_section<R: Rng>(params: DeformParams, rng: &mut R) -> Result<MonogenicSection> {
    let ell = rng.random_range(0..=3usize);
    let idx = rng.random_range(0..cached_basis(ell, params.m)?.len());
    let mut s = MonogenicSection::zero(params, ell, idx)?;
    for t in 0..=4 {
        let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        s = s.add(&phi_normalized(t, ell, idx, params)?.scale(a))?;
    }
    Ok(s)
}

type Op = fn(&MonogenicSection) -> Result<MonogenicSection>;

fn e_shift(s: &MonogenicSection) -> Result<MonogenicSection> {
    apply_e(s)?.add(&s.scale(s.params.delta() / 2.0))
}

fn d2(s: &MonogenicSection) -> Result<MonogenicSection> {
    apply_d(&apply_d(s)?)
}

fn x2(s: &MonogenicSection) -> Result<MonogenicSection> {
    apply_x(&apply_x(s)?)
}

fn bracket(a: Op, b: Op, anti: bool, s: &MonogenicSection) -> Result<MonogenicSection> {
    let ab = a(&b(s)?)?;
    let ba = b(&a(s)?)?;
    if anti {
        ab.add(&ba)
    } else {
        ab.sub(&ba)
    }
}

fn c1(s: &MonogenicSection) -> f64 {
    1.0 + s.params.c
}

/// Worst pointwise relative difference between two sections.
fn pointwise(a: &MonogenicSection, b: &MonogenicSection, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        let va = a.eval(x)?;
        let vb = b.eval(x)?;
        worst = worst.max(va.max_abs_diff(&vb) / va.max_abs().max(1.0));
    }
    Ok(worst)
}

fn osp12<R: Rng>(cfg: &VerifyConfig, rng: &mut R, sink: &mut Sink) -> Result<()> {
    const REF: &str = "osp(1|2) relations of D and x";
    type Rhs = fn(&MonogenicSection) -> Result<MonogenicSection>;
    let rels: [(&str, Op, Op, bool, Rhs); 8] = [
        ("{x, D} = -2(1+c)(E + δ/2)", apply_x, apply_d, true, |s| {
            Ok(e_shift(s)?.scale(-2.0 * c1(s)))
        }),
        ("[E + δ/2, D] = -D", e_shift, apply_d, false, |s| {
            Ok(apply_d(s)?.scale(-1.0))
        }),
        ("[x², D] = 2(1+c)x", x2, apply_d, false, |s| {
            Ok(apply_x(s)?.scale(2.0 * c1(s)))
        }),
        ("[E + δ/2, x] = x", e_shift, apply_x, false, apply_x),
        ("[D², x] = -2(1+c)D", d2, apply_x, false, |s| {
            Ok(apply_d(s)?.scale(-2.0 * c1(s)))
        }),
        ("[E + δ/2, D²] = -2D²", e_shift, d2, false, |s| {
            Ok(d2(s)?.scale(-2.0))
        }),
        ("[D², x²] = 4(1+c)²(E + δ/2)", d2, x2, false, |s| {
            Ok(e_shift(s)?.scale(4.0 * c1(s).powi(2)))
        }),
        ("[E + δ/2, x²] = 2x²", e_shift, x2, false, |s| {
            Ok(x2(s)?.scale(2.0))
        }),
    ];
    let m = cfg.params.m;
    let mut worst = [0.0f64; 8];
    let mut fd_worst = 0.0f64;
    for _ in 0..20 {
        let s = random_section(cfg.params, rng)?;
        let points: Vec<Vec<f64>> = (0..3).map(|_| random_point(rng, m, 0.3, 2.0)).collect();
        let ds = apply_d(&s)?;
        let f = |x: &[f64]| s.eval(x).expect("point dimension matches");
        for x in &points {
            let fd = fd_dirac(&f, x, fd_step(x), cfg.params.c);
            let exact = ds.eval(x)?;
            fd_worst = fd_worst.max(fd.max_abs_diff(&exact) / exact.max_abs().max(1.0));
        }
        for (w, (_, a, b, anti, rhs)) in worst.iter_mut().zip(&rels) {
            let lhs = bracket(*a, *b, *anti, &s)?;
            *w = w.max(pointwise(&lhs, &rhs(&s)?, &points)?);
        }
    }
    sink.push(
        "radial reduction of D vs finite differences",
        "deformed Dirac operator D = ∂ + c r⁻² x E",
        fd_worst,
        1e-6,
    );
    for (w, (name, ..)) in worst.iter().zip(&rels) {
        sink.push(name, REF, *w, 1e-6);
    }
    Ok(())
}

fn basis(cfg: &VerifyConfig, sink: &mut Sink) -> Result<()> {
    let p = cfg.params;
    let c1 = 1.0 + p.c;
    let rel =
        |a: &MonogenicSection, b: &MonogenicSection| a.max_abs_diff(b) / b.max_coeff().max(1e-300);
    let mut ladder_d = 0.0f64;
    let mut ladder_x = 0.0f64;
    let mut create = 0.0f64;
    let mut annihilate = 0.0f64;
    let mut l_eig = 0.0f64;
    let mut spectrum = 0.0f64;
    for ell in 0..=3 {
        for t in 0..=5 {
            let ph = phi(t, ell, 0, p)?;
            let up = phi(t + 1, ell, 0, p)?;
            let ct = ladder_constant(t, ell, &p);
            let down = if t > 0 {
                phi(t - 1, ell, 0, p)?.scale(ct)
            } else {
                MonogenicSection::zero(p, ell, 0)?
            };
            ladder_d = ladder_d.max(rel(&apply_d(&ph)?.scale(2.0), &up.add(&down)?));
            ladder_x = ladder_x.max(rel(&apply_x(&ph)?.scale(-2.0 * c1), &up.sub(&down)?));
            create = create.max(rel(&a_plus(&ph)?, &up));
            if t > 0 {
                annihilate = annihilate.max(rel(&a_minus(&ph)?, &down));
            }
            let ev = spectrum_value(t as f64, ell, &p);
            l_eig = l_eig.max(rel(&apply_l(&ph)?, &ph.scale(ev)));
            let direct = 2.0 * c1 * ell as f64 + 2.0 * c1 * c1 * t as f64 + c1 * (p.m as f64 + p.c);
            spectrum = spectrum.max((ev - direct).abs() / direct);
        }
    }
    sink.push(
        "2Dφ_t = φ_{t+1} + C(t)φ_{t-1}",
        "action of D and x on the Laguerre basis",
        ladder_d,
        1e-10,
    );
    sink.push(
        "-2(1+c)xφ_t = φ_{t+1} - C(t)φ_{t-1}",
        "action of D and x on the Laguerre basis",
        ladder_x,
        1e-10,
    );
    sink.push(
        "A⁺φ_t = φ_{t+1}",
        "creation and annihilation operators",
        create,
        1e-10,
    );
    sink.push(
        "A⁻φ_t = C(t)φ_{t-1}",
        "creation and annihilation operators",
        annihilate,
        1e-10,
    );
    sink.push(
        "Lφ_t = eigenvalue·φ_t",
        "harmonic oscillator eigenfunctions",
        l_eig,
        1e-10,
    );
    sink.push(
        "spectrum 2(1+c)ℓ + 2(1+c)²t + (1+c)(m+c)",
        "discrete spectrum of L",
        spectrum,
        1e-10,
    );

    let mut secs = Vec::new();
    for ell in 0..=3 {
        let dim = cached_basis(ell, p.m)?.len();
        let mut idxs = vec![0, dim - 1];
        idxs.dedup();
        for t in 0..=5 {
            for &idx in &idxs {
                secs.push(phi(t, ell, idx, p)?);
            }
        }
    }
    let diag: Vec<f64> = secs
        .iter()
        .map(|s| Ok(inner_product(s, s)?.re))
        .collect::<Result<_>>()?;
    let mut off = 0.0f64;
    for i in 0..secs.len() {
        for j in i + 1..secs.len() {
            let g = inner_product(&secs[i], &secs[j])?;
            off = off.max(g.norm() / (diag[i] * diag[j]).sqrt());
        }
    }
    sink.push(
        "Gram matrix of φ is diagonal",
        "orthogonality of the Laguerre basis",
        off,
        1e-10,
    );
    Ok(())
}

fn funk_hecke<R: Rng>(cfg: &VerifyConfig, rng: &mut R, sink: &mut Sink) -> Result<()> {
    let p = cfg.params;
    let m = p.m;
    let lam = p.lambda();
    let sph = cfg.quad.sphere_nodes(m)?;
    let sigma = p.sigma_m();
    // σ⁻¹ Σ w f(ξ)
    let avg = |f: &dyn Fn(&[f64]) -> Result<Multivector>| -> Result<Multivector> {
        let mut acc = Multivector::zero(m);
        for (xi, w) in sph.points.iter().zip(&sph.weights) {
            acc += &f(xi)?.scale(*w);
        }
        Ok(acc.scale(1.0 / sigma))
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let yp = random_unit_vector(m, rng);
    let mut aux = [0.0f64; 4];
    let mut repr = [0.0f64; 4];
    for ell in 0..=3usize {
        let basis = cached_basis(ell, m)?;
        let mut idxs = vec![0, basis.len() - 1];
        idxs.dedup();
        for idx in idxs {
            let mm = &basis.elements[idx];
            let xm = &basis.times_x[idx];
            let my = mm.evaluate(&yp)?;
            let xmy = xm.evaluate(&yp)?;
            for k in 0..=3usize {
                let kf = k as f64;
                let checks: [(usize, Multivector, Multivector); 4] =
                    [
                        (
                            0,
                            avg(&|x| Ok(mm.evaluate(x)?.scale(gegenbauer(k, lam, dot(x, &yp))?)))?,
                            my.scale(lam / (lam + kf) * delta(k, ell)),
                        ),
                        (
                            1,
                            avg(&|x| Ok(xm.evaluate(x)?.scale(gegenbauer(k, lam, dot(x, &yp))?)))?,
                            xmy.scale(lam / (lam + kf) * delta(k, ell + 1)),
                        ),
                        (
                            2,
                            if k == 0 {
                                Multivector::zero(m)
                            } else {
                                avg(&|x| {
                                    Ok((&wedge_vectors(x, &yp)? * &mm.evaluate(x)?)
                                        .scale(gegenbauer(k - 1, lam + 1.0, dot(x, &yp))?))
                                })?
                            },
                            my.scale(-kf / (2.0 * (lam + kf)) * delta(k, ell)),
                        ),
                        (
                            3,
                            if k == 0 {
                                Multivector::zero(m)
                            } else {
                                avg(&|x| {
                                    Ok((&wedge_vectors(x, &yp)? * &xm.evaluate(x)?)
                                        .scale(gegenbauer(k - 1, lam + 1.0, dot(x, &yp))?))
                                })?
                            },
                            // printed with a minus sign; the Q_{k-1} identity forces the plus sign
                            xmy.scale((kf + 2.0 * lam) / (2.0 * (lam + kf)) * delta(k, ell + 1)),
                        ),
                    ];
                for (i, got, want) in &checks {
                    aux[*i] = aux[*i].max(got.max_abs_diff(want));
                }
                let pm = avg(&|x| Ok(&repr_p(k, x, &yp)? * &mm.evaluate(x)?))?;
                let pxm = avg(&|x| Ok(&repr_p(k, x, &yp)? * &xm.evaluate(x)?))?;
                repr[0] = repr[0].max(pm.max_abs_diff(&my.scale(delta(k, ell))));
                repr[1] = repr[1].max(pxm.max_abs());
                if k >= 1 {
                    let qm = avg(&|x| Ok(&repr_q(k - 1, x, &yp)? * &mm.evaluate(x)?))?;
                    let qxm = avg(&|x| Ok(&repr_q(k - 1, x, &yp)? * &xm.evaluate(x)?))?;
                    repr[2] = repr[2].max(qm.max_abs());
                    repr[3] = repr[3].max(qxm.max_abs_diff(&xmy.scale(delta(k, ell + 1))));
                }
            }
        }
    }
    let aux_names = [
        "∫ C_k M_ℓ = σ λ/(λ+k) δ_kℓ M_ℓ(y')",
        "∫ C_k x'M_ℓ = σ λ/(λ+k) δ_{k,ℓ+1} y'M_ℓ(y')",
        "∫ (x'∧y') C_{k-1}^{λ+1} M_ℓ = -σ k/(2(λ+k)) δ_kℓ M_ℓ(y')",
        "∫ (x'∧y') C_{k-1}^{λ+1} x'M_ℓ = σ (k+2λ)/(2(λ+k)) δ_{k,ℓ+1} y'M_ℓ(y')",
    ];
    for (r, name) in aux.iter().zip(aux_names) {
        sink.push(name, "Clifford Funk–Hecke integrals", *r, 1e-7);
    }
    let repr_names = [
        "∫ P_k M_ℓ = σ δ_kℓ M_ℓ(y')",
        "∫ P_k x'M_ℓ = 0",
        "∫ Q_{k-1} M_ℓ = 0",
        "∫ Q_{k-1} x'M_ℓ = σ δ_{k,ℓ+1} y'M_ℓ(y')",
    ];
    for (r, name) in repr.iter().zip(repr_names) {
        sink.push(name, "reproducing kernels P_k and Q_k", *r, 1e-7);
    }

    let xp = random_unit_vector(m, rng);
    let zp = random_unit_vector(m, rng);
    let mut orth = [0.0f64; 4];
    for k in 0..=3usize {
        for l in 0..=3usize {
            let pp = avg(&|y| Ok(&repr_p(k, y, &xp)? * &repr_p(l, &zp, y)?))?;
            let pq = avg(&|y| Ok(&repr_p(k, y, &xp)? * &repr_q(l, &zp, y)?))?;
            let qq = avg(&|y| Ok(&repr_q(k, y, &xp)? * &repr_q(l, &zp, y)?))?;
            let qp = avg(&|y| Ok(&repr_q(k, y, &xp)? * &repr_p(l, &zp, y)?))?;
            orth[0] = orth[0].max(pp.max_abs_diff(&repr_p(l, &zp, &xp)?.scale(delta(k, l))));
            orth[1] = orth[1].max(pq.max_abs());
            orth[2] = orth[2].max(qq.max_abs_diff(&repr_q(l, &zp, &xp)?.scale(delta(k, l))));
            orth[3] = orth[3].max(qp.max_abs());
        }
    }
    let orth_names = [
        "∫ P_k(y',x') P_ℓ(z',y') = σ δ_kℓ P_ℓ(z',x')",
        "∫ P_k(y',x') Q_ℓ(z',y') = 0",
        "∫ Q_k(y',x') Q_ℓ(z',y') = σ δ_kℓ Q_ℓ(z',x')",
        "∫ Q_k(y',x') P_ℓ(z',y') = 0",
    ];
    for (r, name) in orth.iter().zip(orth_names) {
        sink.push(name, "orthogonality of the reproducing kernels", *r, 1e-7);
    }

    let mut geg2 = 0.0f64;
    for n in 2..=12usize {
        for _ in 0..5 {
            let w: f64 = rng.random_range(-1.0..1.0);
            let nf = n as f64;
            let lhs = w * gegenbauer(n - 1, lam + 1.0, w)?;
            let rhs = nf / (2.0 * (nf + lam)) * gegenbauer(n, lam + 1.0, w)?
                + (nf + 2.0 * lam) / (2.0 * (nf + lam)) * gegenbauer(n - 2, lam + 1.0, w)?;
            geg2 = geg2.max((lhs - rhs).abs() / rhs.abs().max(1.0));
        }
    }
    sink.push(
        "w C_{n-1}^{λ+1} three-term identity, n ≤ 12",
        "Gegenbauer recursion",
        geg2,
        1e-12,
    );

    let mut bound = 0.0f64;
    for _ in 0..200 {
        let nu = rng.random_range(-0.5..10.0);
        let z = Complex64::from_polar(rng.random_range(0.0..30.0), rng.random_range(-PI..PI));
        let v = bessel_j_tilde(nu, z)?.norm();
        bound = bound.max(v * gamma(nu + 1.0)? / z.im.abs().exp() - 1.0);
    }
    sink.push(
        "|J̃_ν(z)| ≤ e^{|Im z|}/Γ(ν+1)",
        "Bessel bound",
        bound.max(0.0),
        1e-12,
    );
    Ok(())
}

fn classical_kernel(x: &[f64], y: &[f64]) -> Result<Complex64> {
    let m = x.len() as f64;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok(Complex64::new(0.0, -dot).exp() / (gamma(m / 2.0)? * 2f64.powf((m - 2.0) / 2.0)))
}

fn kernel_props<R: Rng>(cfg: &VerifyConfig, rng: &mut R, sink: &mut Sink) -> Result<()> {
    const REF: &str = "symmetries of the kernel";
    let p = cfg.params;
    let m = p.m;
    let tr = cfg.trunc;
    let c0 = DeformParams::new(m, 0.0)?;
    let mut classical = 0.0f64;
    for _ in 0..100 {
        let x = random_point(rng, m, 0.0, 3.16);
        let y = random_point(rng, m, 0.0, 3.16);
        let k = fourier_kernel(&x, &y, &c0, &tr)?.assembled;
        classical =
            classical.max(k.max_abs_diff(&Multivector::scalar(m, classical_kernel(&x, &y)?)));
    }
    sink.push(
        "c = 0 kernel equals e^{-i<x,y>}/(Γ(m/2)2^{(m-2)/2})",
        "classical Fourier kernel",
        classical,
        1e-8,
    );

    let g0 = p.gamma(0) / 2.0;
    let origin = 1.0 / (2f64.powf(g0 - 1.0) * log_gamma(g0)?.exp());
    let mut orig = 0.0f64;
    for _ in 0..10 {
        let y = random_point(rng, m, 0.1, 3.0);
        let k = fourier_kernel(&vec![0.0; m], &y, &p, &tr)?.assembled;
        orig = orig.max(k.max_abs_diff(&Multivector::scalar(m, origin)));
    }
    sink.push("K(0, y) = 1/(2^{γ₀/2-1}Γ(γ₀/2))", REF, orig, 1e-9);

    let mut scaling = 0.0f64;
    let mut herm = 0.0f64;
    let mut spin = 0.0f64;
    let mut grades = 0.0f64;
    let kps = [
        KernelParams::fourier(p)?,
        KernelParams::new(p, cfg.omega, tr)?,
    ];
    for i in 0..10u64 {
        let x = random_point(rng, m, 0.1, 2.0);
        let y = random_point(rng, m, 0.1, 2.0);
        for kp in &kps {
            let kxy = kernel(&x, &y, kp)?.assembled;
            let t = rng.random_range(0.3..1.8);
            let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
            let ty: Vec<f64> = y.iter().map(|v| v * t).collect();
            // the semigroup kernel has a Gaussian factor in |x|² + |y|² and does not scale
            if kp.is_fourier() {
                scaling = scaling.max(
                    kernel(&tx, &y, kp)?
                        .assembled
                        .max_abs_diff(&kernel(&x, &ty, kp)?.assembled),
                );
            }
            herm = herm.max(kernel(&y, &x, kp)?.assembled.max_abs_diff(&kxy.bar()));
            let s = random_spin_element(m, 4, cfg.seed.wrapping_add(i))?;
            let sb = s.bar();
            let act = |v: &[f64]| (&(&sb * &embed_vector(v)) * &s).to_real_vector(1e-10);
            let lhs = kernel(&act(&x)?, &act(&y)?, kp)?.assembled;
            spin = spin.max(lhs.max_abs_diff(&(&(&sb * &kxy) * &s)));
            let rest = &(&kxy - &kxy.grade_project(0)?) - &kxy.grade_project(2)?;
            grades = grades.max(rest.max_abs());
        }
    }
    sink.push("K(tx, y) = K(x, ty)", REF, scaling, 1e-9);
    sink.push("K(y, x) = bar K(x, y)", REF, herm, 1e-9);
    sink.push("K(s̄xs, s̄ys) = s̄ K(x, y) s", REF, spin, 1e-9);
    sink.push(
        "kernel has grades 0 and 2 only",
        "series representation of the kernel",
        grades,
        1e-14,
    );

    let mut route = 0.0f64;
    let mut limit = 0.0f64;
    let fkp = KernelParams::fourier(p)?;
    for _ in 0..5 {
        let x = random_point(rng, m, 0.2, 0.6);
        let y = random_point(rng, m, 0.2, 0.6);
        let f = fourier_kernel(&x, &y, &p, &tr)?.assembled;
        route = route.max(semigroup_kernel(&x, &y, &fkp)?.assembled.max_abs_diff(&f));
        limit = limit.max(fourier_limit_residual(&x, &y, &p, &tr, 1e-2, 1e-3)?);
    }
    sink.push(
        "semigroup series at ω = iπ/2 equals the Fourier series",
        "series representation of the kernel",
        route,
        1e-10,
    );
    // two-point extrapolation cannot beat |K''|·1e-5/2; kept at the stated tolerance
    sink.push(
        "ω = iπ/2 + ε → Fourier kernel (Richardson, ε = 1e-2, 1e-3)",
        "limit ω → iπ/2",
        limit,
        1e-6,
    );
    Ok(())
}

/// Light product rule for full `ℝ^m` quadrature oracles.
pub fn oracle_quadrature() -> QuadratureSpec {
    QuadratureSpec {
        radial: RadialRule {
            n_r: 120,
            r_min: 1e-6,
            r_max: 10.0,
        },
        sphere: SphereRule {
            n_theta: 20,
            n_phi: 40,
        },
    }
}

/// `2∫ r^{α+1} J_α(rβ) L_j^α(r²) e^{-δr²} dr` against its closed form.
fn integrate(a: f64, b: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (xs, ws) = GaussLegendre::new(400).mapped(a, b);
    xs.iter().zip(&ws).map(|(x, w)| Ok(w * f(*x)?)).sum()
}

fn real_j(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_j(nu, Complex64::new(x, 0.0))?.re)
}

pub fn hankel_laguerre_residual(alpha: f64, beta: f64, delta: f64, j: usize) -> Result<f64> {
    let lhs = 2.0
        * integrate(1e-9, 14.0, |r| {
            Ok(r.powf(alpha + 1.0)
                * real_j(alpha, r * beta)?
                * laguerre(j, alpha, r * r)
                * (-delta * r * r).exp())
        })?;
    let rhs = (delta - 1.0).powi(j as i32) * beta.powf(alpha)
        / (2f64.powf(alpha) * delta.powf(alpha + j as f64 + 1.0))
        * laguerre(j, alpha, beta * beta / (4.0 * delta * (1.0 - delta)))
        * (-beta * beta / (4.0 * delta)).exp();
    Ok((lhs - rhs).abs() / rhs.abs().max(1e-3))
}

/// `∫ r^{α+1} J_α(rs) L_j^α(r²) e^{-r²/2} dr` against `(-1)^j s^α L_j^α(s²) e^{-s²/2}`.
pub fn fourier_laguerre_residual(alpha: f64, s: f64, j: usize) -> Result<f64> {
    let lhs = integrate(1e-9, 14.0, |r| {
        Ok(r.powf(alpha + 1.0)
            * real_j(alpha, r * s)?
            * laguerre(j, alpha, r * r)
            * (-r * r / 2.0).exp())
    })?;
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let rhs = sign * s.powf(alpha) * laguerre(j, alpha, s * s) * (-s * s / 2.0).exp();
    Ok((lhs - rhs).abs() / rhs.abs().max(1e-3))
}

fn transform<R: Rng>(cfg: &VerifyConfig, rng: &mut R, sink: &mut Sink) -> Result<()> {
    let p = cfg.params;
    let m = p.m;
    let q = cfg.quad;
    let oracle = oracle_quadrature();
    let mut omegas = vec![
        Complex64::new(0.4, 0.0),
        Complex64::new(0.4, 0.7),
        FOURIER_OMEGA,
    ];
    if !omegas.contains(&cfg.omega) {
        omegas.push(cfg.omega);
    }
    let mut eig = 0.0f64;
    for &omega in &omegas {
        let kp = KernelParams::new(p, omega, cfg.trunc)?;
        for t in 0..=3 {
            for ell in 0..=2 {
                let idx = rng.random_range(0..cached_basis(ell, m)?.len());
                let f = phi(t, ell, idx, p)?;
                let ev = kp.eigenvalue(t, ell);
                for _ in 0..2 {
                    let y = random_point(rng, m, 0.1, 2.5);
                    let want = f.eval(&y)?.scale(ev);
                    let got = transform_section_at(&f, &y, &kp, &q)?;
                    eig = eig.max(got.max_abs_diff(&want) / want.max_abs().max(1.0));
                }
            }
        }
    }
    sink.push(
        "F^ω φ_{t,ℓ} = e^{-ωt}e^{-ωℓ/(1+c)} φ_{t,ℓ}",
        "eigenvalues of the semigroup",
        eig,
        1e-6,
    );

    let mut full = 0.0f64;
    for omega in [Complex64::new(0.4, 0.7), FOURIER_OMEGA] {
        let kp = KernelParams::new(p, omega, cfg.trunc)?;
        let f = phi(1, 1, 0, p)?;
        let y = random_point(rng, m, 0.3, 2.0);
        let got =
            apply_transform_field(|x: &[f64]| f.eval(x).expect("dimension"), &y, &kp, &oracle)?;
        full = full.max(got.max_abs_diff(&transform_section_at(&f, &y, &kp, &q)?));
    }
    sink.push(
        "full quadrature agrees with the radial reduction",
        "integral transform with kernel K",
        full,
        1e-6,
    );

    let fkp = KernelParams::fourier(p)?;
    let mut boch = 0.0f64;
    for ell in 0..=2usize {
        for parity in [Parity::Even, Parity::Odd] {
            let prof = |r: f64| {
                Complex64::new(
                    (1.0 + 0.3 * r * r) * (-0.6 * r * r).exp(),
                    0.2 * r * (-0.6 * r * r).exp(),
                )
            };
            let b = bochner(ell, &prof, parity, p, &q)?;
            let basis = cached_basis(ell, m)?;
            let idx = basis.len() - 1;
            let poly = match parity {
                Parity::Even => basis.elements[idx].clone(),
                Parity::Odd => basis.times_x[idx].clone(),
            };
            let field = |x: &[f64]| {
                let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
                poly.evaluate(x).expect("dimension").scale(prof(r))
            };
            let y = random_point(rng, m, 0.3, 2.0);
            let got = apply_transform_field(field, &y, &fkp, &oracle)?;
            boch = boch.max(got.max_abs_diff(&b.eval_at(idx, &y)?));
        }
    }
    sink.push(
        "Bochner reduction vs full quadrature, ℓ ≤ 2, both parities",
        "Bochner identities",
        boch,
        1e-6,
    );

    let g = bochner(
        0,
        &|r| Complex64::new((-r * r / 2.0).exp(), 0.0),
        Parity::Even,
        p,
        &q,
    )?;
    let fixed = gaussian_transform(2.0, &p)?;
    let mut gauss = 0.0f64;
    for s in [0.0, 0.5, 1.3, 2.7] {
        gauss = gauss.max((g.eval(s)? - Complex64::new((-s * s / 2.0).exp(), 0.0)).norm());
        gauss = gauss.max((fixed.eval(s) - Complex64::new((-s * s / 2.0).exp(), 0.0)).norm());
    }
    sink.push(
        "F e^{-r²/2} = e^{-r²/2}",
        "eigenvalues of the semigroup",
        gauss,
        1e-8,
    );

    let e = Expansion::random(p, 10, 5, 3, rng)?;
    let (a, b) = parseval_check(&e, &q)?;
    sink.push(
        "‖Ff‖² = ‖f‖² on a random 10-term combination",
        "unitarity of the Fourier transform",
        (a - b).abs() / a,
        1e-6,
    );

    let mut contraction = 0.0f64;
    let mut unit = 0.0f64;
    for _ in 0..50 {
        let f = Expansion::random(p, 6, 5, 3, rng)?;
        let n0 = f.norm_sq();
        let omega = Complex64::new(rng.random_range(0.0..2.0), rng.random_range(-PI..PI));
        contraction = contraction.max(f.apply_semigroup(omega).norm_sq() / n0 - 1.0);
        let iw = Complex64::new(0.0, rng.random_range(-3.0..3.0));
        unit = unit.max((f.apply_semigroup(iw).norm_sq() / n0 - 1.0).abs());
    }
    let kp = KernelParams::new(p, Complex64::new(0.4, 0.7), cfg.trunc)?;
    let quad_norm = transformed_norm_sq(&e, &kp, &q)?;
    contraction = contraction.max(quad_norm / a - 1.0);
    sink.push(
        "‖F^ω f‖ ≤ ‖f‖",
        "continuity and contraction of the semigroup",
        contraction.max(0.0),
        1e-12,
    );
    sink.push(
        "|eigenvalue| = 1 at Re ω = 0",
        "unitarity of the Fourier transform",
        unit,
        1e-12,
    );
    let exact = e.apply_semigroup(kp.omega).norm_sq();
    sink.push(
        "quadrature ‖F^ω f‖² equals the eigen-expansion",
        "continuity and contraction of the semigroup",
        (quad_norm - exact).abs() / a,
        1e-6,
    );

    let (res, rem) = intertwining_residuals(&Expansion::random(p, 6, 4, 3, rng)?)?;
    let names = ["F∘D = i(1+c)x∘F", "F∘x = (i/(1+c))D∘F", "F∘E = -(E+δ)∘F"];
    for (r, name) in res.iter().zip(names) {
        sink.push(
            name,
            "intertwining relations of the Fourier transform",
            r.max(rem),
            1e-9,
        );
    }
    let f = Expansion::random(p, 6, 4, 3, rng)?;
    let gexp = Expansion::random(p, 6, 5, 3, rng)?;
    let (l, r) = intertwining_pairing(&f, &gexp)?;
    sink.push(
        "<F(Df), g> = <i(1+c)xF(f), g>",
        "intertwining relations of the Fourier transform",
        (l - r).norm(),
        1e-6,
    );

    let hs = hs_norm(Complex64::new(1.0, 0.0), &p, 400, 400)?;
    let qk = (-2.0 / (1.0 + p.c)).exp();
    let closed = 2f64.powi(m as i32) / ((1.0 - (-2.0f64).exp()) * (1.0 - qk).powi(m as i32 - 1));
    sink.push(
        "Hilbert–Schmidt norm at ω = 1 vs closed form",
        "Hilbert–Schmidt property",
        (hs.value.powi(2) - closed).abs() / closed,
        1e-10,
    );
    let big = hs_norm(Complex64::new(40.0, 0.0), &p, 10, 10)?;
    sink.push(
        "Hilbert–Schmidt norm → 2^{m/2} as Re ω → ∞",
        "Hilbert–Schmidt property",
        (big.value - 2f64.powf(m as f64 / 2.0)).abs(),
        1e-12,
    );

    let (w1, w2) = (Complex64::new(0.3, 0.5), Complex64::new(0.2, -1.1));
    let a1 = eigenvalue_map(w1, &p, 5, 3);
    let a2 = eigenvalue_map(w2, &p, 5, 3);
    let a12 = eigenvalue_map(w1 + w2, &p, 5, 3);
    let semi = a12
        .iter()
        .map(|(k, v)| (a1[k] * a2[k] - v).norm())
        .fold(0.0, f64::max);
    sink.push(
        "eigenvalue(ω₁)·eigenvalue(ω₂) = eigenvalue(ω₁+ω₂)",
        "semigroup property",
        semi,
        1e-14,
    );

    let rational = DeformParams::new(m, 1.0)?;
    let mut order = 0.0f64;
    for t in 0..=5 {
        for ell in 0..=3 {
            if fourier_order(t, ell, &rational, 16).is_none() {
                order = 1.0;
            }
        }
    }
    sink.push(
        "c = 1: (F)^16 = Id on φ",
        "finite order of the Fourier transform",
        order,
        0.0,
    );
    let irr = DeformParams::new(m, SQRT_2 - 1.0)?;
    let none = if fourier_order(0, 1, &irr, 50).is_none() {
        0.0
    } else {
        1.0
    };
    sink.push(
        "c = √2 - 1: no power ≤ 50 is the identity on φ_{0,1}",
        "finite order of the Fourier transform",
        none,
        0.0,
    );

    let mut hl = 0.0f64;
    let mut fl = 0.0f64;
    for j in 0..=3 {
        hl = hl.max(hankel_laguerre_residual(0.8, 1.3, 0.7, j)?);
        fl = fl.max(fourier_laguerre_residual(0.8, 1.3, j)?);
    }
    sink.push(
        "Hankel–Laguerre integral with damping δ",
        "Hankel transform of Laguerre functions",
        hl,
        1e-8,
    );
    sink.push(
        "Hankel–Laguerre integral at δ = 1/2",
        "Hankel transform of Laguerre functions",
        fl,
        1e-8,
    );
    Ok(())
}

fn heisenberg_suite<R: Rng>(cfg: &VerifyConfig, rng: &mut R, sink: &mut Sink) -> Result<()> {
    let p = cfg.params;
    let mut product = 0.0f64;
    let mut additive = 0.0f64;
    for _ in 0..50 {
        let e = Expansion::random(p, 5, 4, 3, rng)?;
        let h = heisenberg(&e)?;
        let (l, r) = h.product();
        product = product.max(r / l);
        let (l, r) = h.additive();
        additive = additive.max(r / l);
    }
    // ratios strictly below one
    sink.push(
        "(δ/2)‖f‖² / (‖xf‖·‖xFf‖) < 1 on random f",
        "Heisenberg inequality",
        product,
        1.0 - 1e-9,
    );
    sink.push(
        "δ‖f‖² / (‖xf‖² + ‖xFf‖²) < 1 on random f",
        "Heisenberg inequality",
        additive,
        1.0 - 1e-9,
    );

    let mut e = Expansion::new(p);
    let n0 = crate::radial::phi_norm_sq(0, 0, p)?.sqrt();
    e.insert(0, 0, 0, Complex64::new(n0, 0.0));
    let (l, r) = heisenberg(&e)?.additive();
    sink.push(
        "equality for e^{-r²/2} (additive form)",
        "Heisenberg equality case",
        (l - r).abs() / r,
        1e-8,
    );

    let alpha = 2.7;
    let lam = Complex64::new(0.8, -0.3);
    let (l, r) = heisenberg_gaussian(alpha, lam, p)?.product();
    // transform by quadrature instead of the closed form
    let q = cfg.quad;
    let b = bochner(0, &|r| lam * (-r * r / alpha).exp(), Parity::Even, p, &q)?;
    let (ss, ws) = q.radial_nodes()?;
    let rho = p.radial_exponent();
    let mut xff = 0.0;
    for (s, w) in ss.iter().zip(&ws) {
        xff += w * s.powf(rho + 2.0) * b.eval(*s)?.norm_sqr();
    }
    let h = heisenberg_gaussian(alpha, lam, p)?;
    let lq = h.norm_xf * xff.sqrt();
    let res = ((l - r).abs() / r).max((lq - r).abs() / r);
    sink.push(
        "equality for λe^{-r²/α}, α = 2.7 (product form)",
        "Heisenberg equality case",
        res,
        1e-6,
    );
    Ok(())
}

/// `∫ J_ν(at)J_ν(bt)e^{-γ²t²} t dt` against `(1/2γ²)e^{-(a²+b²)/(4γ²)} I_ν(ab/(2γ²))`.
pub fn besselint_residual(nu: f64, a: f64, b: f64, g: f64) -> Result<f64> {
    let lhs = integrate(0.0, 12.0 / g, |t| {
        Ok(real_j(nu, a * t)? * real_j(nu, b * t)? * (-g * g * t * t).exp() * t)
    })?;
    let g2 = g * g;
    let rhs = 0.5 / g2 * (-(a * a + b * b) / (4.0 * g2)).exp() * bessel_i(nu, a * b / (2.0 * g2))?;
    Ok((lhs - rhs).abs() / rhs.abs())
}

fn master<R: Rng>(cfg: &VerifyConfig, rng: &mut R, sink: &mut Sink) -> Result<()> {
    let p = cfg.params;
    let m = p.m;
    let tol = if p.c == 0.0 { 1e-6 } else { 1e-5 };
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let x = random_point(rng, m, 0.0, 2.0);
        let z = random_point(rng, m, 0.0, 2.0);
        let s = rng.random_range(0.5..1.5);
        let mc = crate::transform::master_formula_check(&x, &z, s, p, &cfg.quad)?;
        worst = worst.max(mc.lhs.max_abs_diff(&mc.rhs) / mc.rhs.max_abs().max(1e-3));
    }
    sink.push(
        "Master formula at random (x, z, s)",
        "Master formula for the Fourier kernel",
        worst,
        tol,
    );
    let z = random_point(rng, m, 0.5, 2.0);
    let mc = crate::transform::master_formula_check(&vec![0.0; m], &z, 0.7, p, &cfg.quad)?;
    sink.push(
        "Master formula at x = 0",
        "Master formula for the Fourier kernel",
        mc.lhs.max_abs_diff(&mc.rhs) / mc.rhs.max_abs().max(1e-3),
        1e-6,
    );
    sink.push(
        "Weber integral of two Bessel functions",
        "Bessel product integral",
        besselint_residual(0.7, 1.1, 0.9, 1.0)?,
        1e-8,
    );
    Ok(())
}

/// Residuals of the six auxiliary-series identities at `(z, w)`; `up` is `params` with `m + 2`.
pub fn auxiliary_recursions(
    z: f64,
    w: f64,
    params: &DeformParams,
    trunc: &Truncation,
    h: f64,
) -> Result<[f64; 6]> {
    use SeriesComponent::*;
    let up = DeformParams::new(params.m + 2, params.c)?;
    let lam = params.lambda();
    let theta = PI / (2.0 * (1.0 + params.c));
    let rot = Complex64::from_polar(1.0, theta);
    let comp = |s, p: &DeformParams, w: f64| kernel_series_component(s, z, w, p, trunc);
    let dw = |s| -> Result<Complex64> {
        Ok((comp(s, params, w + h)? - comp(s, params, w - h)?) / (2.0 * h) / (2.0 * lam))
    };
    let j0 = bessel_j(params.gamma(0) / 2.0, Complex64::new(z, 0.0))?;
    let r_a = (comp(A, &up, w)? - rot * dw(A)?).norm();
    let r_e = (comp(E, params, w)? - dw(B)?).norm();
    let r_f = (comp(F, params, w)? - dw(D)?).norm();
    let r_c = (dw(C)? - (comp(C, &up, w)? / rot + j0 * (1.0 + lam))).norm();
    let r_d = (dw(D)? - (comp(D, &up, w)? / rot + j0)).norm();
    let delta = params.delta();
    let i = Complex64::new(0.0, 1.0);
    let (fa, fb) = crate::kernel::fourier_ab(z, w, params, trunc)?;
    let get = |s| comp(s, params, w);
    let a = z.powf(-(delta - 2.0) / 2.0)
        * ((get(A)? - i * get(C)?) / (2.0 * lam) + (get(B)? + i * get(D)?) / 2.0);
    let b = -z.powf(-delta / 2.0) * (get(E)? + i * get(F)?);
    let r_asm = (a - fa).norm().max((b - fb).norm());
    Ok([r_asm, r_a, r_c, r_d, r_e, r_f])
}

fn pde(cfg: &VerifyConfig, sink: &mut Sink) -> Result<()> {
    let p = cfg.params;
    let tr = cfg.trunc;
    let zs = [0.5, 1.0, 1.5, 2.0, 2.5];
    let ws = [-0.6, -0.3, 0.0, 0.3, 0.6];
    let mut worst = 0.0f64;
    for &z in &zs {
        for &w in &ws {
            let (a, b) = pde_residual(z, w, &p, &tr, 1e-4)?;
            worst = worst.max(a).max(b);
        }
    }
    sink.push(
        "kernel PDE system on a 5×5 (z, w) grid, h = 1e-4",
        "PDE system for the kernel",
        worst,
        1e-5,
    );
    let r1 = pde_residual(1.0, 0.3, &p, &tr, 1e-3)?;
    let r2 = pde_residual(1.0, 0.3, &p, &tr, 5e-4)?;
    let ratio = r1.0.max(r1.1) / r2.0.max(r2.1);
    sink.push(
        "residual ratio for h → h/2 is 4 (second order)",
        "PDE system for the kernel",
        (ratio - 4.0).abs(),
        1.0,
    );

    if p.m + 2 <= crate::radial::MAX_DIM {
        let names = [
            "assembly K from A…F",
            "A_{λ+1} = e^{iθ}(1/2λ)∂_w A_λ",
            "(1/2λ)∂_w C_λ = e^{-iθ}C_{λ+1} + (1+λ)J_{γ₀/2}(z)",
            "(1/2λ)∂_w D_λ = e^{-iθ}D_{λ+1} + J_{γ₀/2}(z)",
            "E_λ = (1/2λ)∂_w B_λ",
            "F_λ = (1/2λ)∂_w D_λ",
        ];
        let mut worst = [0.0f64; 6];
        for &z in &[0.7, 1.6, 3.1] {
            for &w in &[-0.5, 0.1, 0.6] {
                let r = auxiliary_recursions(z, w, &p, &tr, 1e-5)?;
                for (a, b) in worst.iter_mut().zip(r) {
                    *a = a.max(b);
                }
            }
        }
        for (r, name) in worst.iter().zip(names) {
            sink.push(name, "recursions of the auxiliary series", *r, 1e-6);
        }
    }
    Ok(())
}
