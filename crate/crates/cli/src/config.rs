use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use radial_dirac::kernel::{KernelParams, Truncation};
use radial_dirac::quadrature::{QuadratureSpec, RadialRule, SphereRule};
use radial_dirac::radial::DeformParams;
use radial_dirac::verify::VerifyConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Omega {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationConfig {
    pub tol: f64,
    pub k_max: usize,
    pub streak: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        let t = Truncation::default();
        Self {
            tol: t.tol,
            k_max: t.k_max,
            streak: t.streak,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub n_r: usize,
    pub r_max: f64,
    pub r_min: f64,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            n_r: q.radial.n_r,
            r_max: q.radial.r_max,
            r_min: q.radial.r_min,
            n_theta: q.sphere.n_theta,
            n_phi: q.sphere.n_phi,
        }
    }
}

/// Everything a command needs, read from JSON and then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub m: usize,
    pub c: f64,
    pub omega: Omega,
    pub truncation: TruncationConfig,
    pub quadrature: QuadratureConfig,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m: 3,
            c: 0.0,
            omega: Omega {
                re: 0.0,
                im: std::f64::consts::FRAC_PI_2,
            },
            truncation: TruncationConfig::default(),
            quadrature: QuadratureConfig::default(),
            seed: 0,
            output_path: None,
        }
    }
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub m: Option<usize>,
    pub c: Option<f64>,
    pub omega_re: Option<f64>,
    pub omega_im: Option<f64>,
    pub tol: Option<f64>,
    pub k_max: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, over: &Overrides) -> Result<Self, String> {
        let mut cfg = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| format!("cannot parse {}: {e}", p.display()))?
            }
            None => Self::default(),
        };
        cfg.apply(over);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, over: &Overrides) {
        if let Some(m) = over.m {
            self.m = m;
        }
        if let Some(c) = over.c {
            self.c = c;
        }
        if let Some(v) = over.omega_re {
            self.omega.re = v;
        }
        if let Some(v) = over.omega_im {
            self.omega.im = v;
        }
        if let Some(v) = over.tol {
            self.truncation.tol = v;
        }
        if let Some(v) = over.k_max {
            self.truncation.k_max = v;
        }
        if let Some(v) = over.seed {
            self.seed = v;
        }
        if let Some(v) = &over.out {
            self.output_path = Some(v.clone());
        }
    }

    /// Checks every library precondition up front so commands only fail at run time.
    pub fn validate(&self) -> Result<(), String> {
        self.kernel_params().map_err(|e| e.to_string())?;
        self.quadrature().validate().map_err(|e| e.to_string())
    }

    pub fn params(&self) -> radial_dirac::Result<DeformParams> {
        DeformParams::new(self.m, self.c)
    }

    pub fn omega(&self) -> Complex64 {
        Complex64::new(self.omega.re, self.omega.im)
    }

    pub fn truncation(&self) -> Truncation {
        Truncation {
            tol: self.truncation.tol,
            k_max: self.truncation.k_max,
            streak: self.truncation.streak,
        }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        let q = &self.quadrature;
        QuadratureSpec {
            radial: RadialRule {
                n_r: q.n_r,
                r_min: q.r_min,
                r_max: q.r_max,
            },
            sphere: SphereRule {
                n_theta: q.n_theta,
                n_phi: q.n_phi,
            },
        }
    }

    pub fn kernel_params(&self) -> radial_dirac::Result<KernelParams> {
        KernelParams::new(self.params()?, self.omega(), self.truncation())
    }

    pub fn verify_config(&self) -> radial_dirac::Result<VerifyConfig> {
        let mut v = VerifyConfig::new(self.params()?);
        v.omega = self.omega();
        v.trunc = self.truncation();
        v.quad = self.quadrature();
        v.seed = self.seed;
        Ok(v)
    }
}
