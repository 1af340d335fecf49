mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use radial_dirac::kernel::{kernel_csv_xy, kernel_csv_zw};
use radial_dirac::radial::phi;
use radial_dirac::transform::{spectrum_table, transform_csv, transform_section_at};
use radial_dirac::verify::{self, Suite};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "radial-dirac",
    version,
    about = "Kernels, transforms and identity checks for radially deformed Dirac operators"
)]
struct Cli {
    /// JSON run configuration; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_re: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_im: Option<f64>,
    /// Truncation tolerance of the kernel series.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Maximal number of kernel series terms.
    #[arg(long, global = true)]
    kmax: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel values on a (z, w) grid or at (x, y) point pairs, as CSV.
    Kernel(KernelArgs),
    /// Run the identity checks and write a JSON report.
    Verify {
        /// Restrict to these suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<Suite>,
    },
    /// Eigenvalues of the harmonic oscillator and of the transform per (t, ℓ).
    Spectrum {
        #[arg(long, default_value_t = 3)]
        t_max: usize,
        #[arg(long, default_value_t = 3)]
        ell_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Transform of a basis function φ_{t,ℓ} sampled along a ray, as CSV.
    Transform(TransformArgs),
    /// Radial profiles of a basis function φ_{t,ℓ}, as CSV.
    Basis {
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        ell: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    Zw,
    Xy,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum, default_value_t = Grid::Zw)]
    grid: Grid,
    #[arg(long, default_value_t = 0.0)]
    z_min: f64,
    #[arg(long, default_value_t = 5.0)]
    z_max: f64,
    #[arg(long, default_value_t = 11)]
    nz: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    w_min: f64,
    #[arg(long, default_value_t = 1.0)]
    w_max: f64,
    #[arg(long, default_value_t = 5)]
    nw: usize,
    /// CSV file with 2m numbers per line (x then y); used with `--grid xy`.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Number of random pairs drawn from the seed when no pair file is given.
    #[arg(long, default_value_t = 10)]
    random: usize,
    /// Radius of the ball the random points are drawn from.
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, default_value_t = 0)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    ell: usize,
    /// Index of the spherical monogenic within M_ℓ.
    #[arg(long, default_value_t = 0)]
    idx: usize,
    /// Comma-separated direction of the sampling ray.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    direction: Vec<f64>,
    #[arg(long, default_value_t = 3.0)]
    s_max: f64,
    #[arg(long, default_value_t = 7)]
    ns: usize,
}

enum Failure {
    /// Exit 1: a computation failed or a check did not pass.
    Run(String),
    /// Exit 2: the configuration or arguments violate a precondition.
    Config(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let over = Overrides {
        m: cli.m,
        c: cli.c,
        omega_re: cli.omega_re,
        omega_im: cli.omega_im,
        tol: cli.tol,
        k_max: cli.kmax,
        seed: cli.seed,
        out: cli.out,
    };
    let cfg = RunConfig::load(cli.config.as_deref(), &over).map_err(Failure::Config)?;
    let run_err = |e: radial_dirac::Error| Failure::Run(e.to_string());
    let (text, code) = match cli.command {
        Command::Kernel(args) => (kernel(&cfg, &args)?, ExitCode::SUCCESS),
        Command::Verify { suites } => {
            let suites = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites
            };
            let vc = cfg
                .verify_config()
                .map_err(|e| Failure::Config(e.to_string()))?;
            let report = verify::run(&suites, &vc).map_err(run_err)?;
            for r in report.failures() {
                eprintln!(
                    "FAIL {} / {} [{}]: {:.3e} > {:.1e}",
                    r.suite, r.test, r.paper_ref, r.residual, r.tol
                );
            }
            let json =
                serde_json::to_string_pretty(&report).map_err(|e| Failure::Run(e.to_string()))?;
            let code = if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
            (json + "\n", code)
        }
        Command::Spectrum {
            t_max,
            ell_max,
            format,
        } => {
            let params = cfg.params().map_err(|e| Failure::Config(e.to_string()))?;
            let rows = spectrum_table(&params, cfg.omega(), t_max, ell_max);
            let text = match format {
                Format::Json => {
                    serde_json::to_string_pretty(&rows).map_err(|e| Failure::Run(e.to_string()))?
                        + "\n"
                }
                Format::Csv => {
                    let mut s =
                        String::from("t,ell,l_eigenvalue,f_eigenvalue_re,f_eigenvalue_im\n");
                    for r in &rows {
                        let _ = writeln!(
                            s,
                            "{},{},{:.16e},{:.16e},{:.16e}",
                            r.t, r.ell, r.l_eigenvalue, r.f_eigenvalue_re, r.f_eigenvalue_im
                        );
                    }
                    s
                }
            };
            (text, ExitCode::SUCCESS)
        }
        Command::Transform(args) => (transform(&cfg, &args)?, ExitCode::SUCCESS),
        Command::Basis { t, ell } => {
            let params = cfg.params().map_err(|e| Failure::Config(e.to_string()))?;
            let sec = phi(t, ell, 0, params).map_err(|e| Failure::Config(e.to_string()))?;
            let mut s = String::from("component,power,re,im\n");
            for (name, prof) in [("f", &sec.f), ("g", &sec.g)] {
                for line in prof.to_csv().lines().skip(1) {
                    let _ = writeln!(s, "{name},{line}");
                }
            }
            (s, ExitCode::SUCCESS)
        }
    };
    write_output(&cfg, &text)?;
    Ok(code)
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.output_path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Run(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Run(e.to_string())),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn kernel(cfg: &RunConfig, args: &KernelArgs) -> Result<String, Failure> {
    let kp = cfg
        .kernel_params()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let m = cfg.m;
    let out = match args.grid {
        Grid::Zw => {
            if !(args.z_min >= 0.0 && args.z_max >= args.z_min) {
                return Err(Failure::Config(format!(
                    "z grid needs 0 <= z_min <= z_max, got [{}, {}]",
                    args.z_min, args.z_max
                )));
            }
            if !(-1.0 <= args.w_min && args.w_min <= args.w_max && args.w_max <= 1.0) {
                return Err(Failure::Config(format!(
                    "w grid needs -1 <= w_min <= w_max <= 1, got [{}, {}]",
                    args.w_min, args.w_max
                )));
            }
            let ws = linspace(args.w_min, args.w_max, args.nw);
            let grid: Vec<(f64, f64)> = linspace(args.z_min, args.z_max, args.nz)
                .into_iter()
                .flat_map(|z| ws.iter().map(move |&w| (z, w)))
                .collect();
            kernel_csv_zw(&grid, &kp)
        }
        Grid::Xy => {
            let pairs = match &args.pairs {
                Some(path) => read_pairs(path, m)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    (0..args.random)
                        .map(|_| {
                            let x = verify::random_point(&mut rng, m, 0.0, args.radius);
                            let y = verify::random_point(&mut rng, m, 0.0, args.radius);
                            (x, y)
                        })
                        .collect()
                }
            };
            kernel_csv_xy(&pairs, &kp)
        }
    };
    out.map_err(|e| Failure::Run(e.to_string()))
}

type PointPair = (Vec<f64>, Vec<f64>);

fn read_pairs(path: &PathBuf, m: usize) -> Result<Vec<PointPair>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let vals =
            vals.map_err(|e| Failure::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
        if vals.len() != 2 * m {
            return Err(Failure::Config(format!(
                "{}:{}: expected {} numbers (x and y in R^{m}), got {}",
                path.display(),
                n + 1,
                2 * m,
                vals.len()
            )));
        }
        pairs.push((vals[..m].to_vec(), vals[m..].to_vec()));
    }
    Ok(pairs)
}

fn transform(cfg: &RunConfig, args: &TransformArgs) -> Result<String, Failure> {
    let kp = cfg
        .kernel_params()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let m = cfg.m;
    let sec =
        phi(args.t, args.ell, args.idx, kp.params).map_err(|e| Failure::Config(e.to_string()))?;
    let dir = if args.direction.is_empty() {
        let mut d = vec![0.0; m];
        d[0] = 1.0;
        d
    } else {
        args.direction.clone()
    };
    let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if dir.len() != m || len <= 0.0 || !len.is_finite() {
        return Err(Failure::Config(format!(
            "direction must be a nonzero vector in R^{m}, got {dir:?}"
        )));
    }
    let points: Vec<Vec<f64>> = linspace(0.0, args.s_max, args.ns)
        .into_iter()
        .map(|s| dir.iter().map(|d| s * d / len).collect())
        .collect();
    let q = cfg.quadrature();
    let values = points
        .iter()
        .map(|y| transform_section_at(&sec, y, &kp, &q))
        .collect::<radial_dirac::Result<Vec<_>>>()
        .map_err(|e| Failure::Run(e.to_string()))?;
    Ok(transform_csv(m, &points, &values))
}
