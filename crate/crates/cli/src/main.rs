//! `shadowhp` command-line front end.

mod config;

use clap::{Parser, Subcommand, ValueEnum};
use config::RunConfig;
use shadowhp::amplitudes::{amplitude_v, e_field, g_of_s, h_of_s, psi_go, FieldPoint, ShadowConfig};
use shadowhp::experiments::{run_grid, write_csv, ExperimentRow, RowStatus};
use shadowhp::geometry::{region_label, KnifeGeometry};
use shadowhp::hpspace::{best_approx_error, default_quad_order, layers_for_degree};
use shadowhp::specfun::{big_f, fresnel_fr, sector_bound_cert, PROVED_SECTOR_BOUND};
use shadowhp::{Complex64, Error};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const MAX_RESOLUTION: usize = 4096;

#[derive(Parser)]
#[command(name = "shadowhp", version, about = "Shadow-boundary amplitudes and hp best approximation")]
struct Cli {
    /// Read every angle argument in degrees.
    #[arg(long, global = true)]
    degrees: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    #[value(name = "fr")]
    Fr,
    #[value(name = "F")]
    F,
    #[value(name = "E")]
    E,
    #[value(name = "g")]
    G,
    #[value(name = "h")]
    H,
    #[value(name = "V")]
    V,
    #[value(name = "psi_go")]
    PsiGo,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one function and print `re,im`.
    Eval {
        function: Function,
        /// Real and imaginary part of the argument of `fr` and `F`.
        #[arg(allow_negative_numbers = true)]
        z: Vec<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        psi: Option<f64>,
        #[arg(long)]
        k: Option<f64>,
        /// Arc length (real part for `g` and `h`).
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        /// Imaginary part of `s` for `g` and `h`.
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        s_im: f64,
        /// Edge distance of the knife-edge line.
        #[arg(long = "R")]
        edge: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1.5)]
        lnc: f64,
        #[arg(long, default_value_t = 1.0)]
        lncp: f64,
    },
    /// Label a grid of complex `s` by analyticity region, as CSV.
    Region {
        #[arg(long = "R")]
        edge: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = -3.0)]
        re_min: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 3.0)]
        re_max: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = -3.0)]
        im_min: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 3.0)]
        im_max: f64,
        /// Points per axis.
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Best approximation of `V` on the shadow mesh, as a one-row CSV.
    Project {
        #[arg(long)]
        k: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.5)]
        lnc: f64,
        #[arg(long, default_value_t = 1.0)]
        lncp: f64,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0.15)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Mesh layers; defaults to `max(1, ceil(c p))`.
        #[arg(long)]
        layers: Option<usize>,
        /// Gauss points per element; defaults to `2p + 16`.
        #[arg(long)]
        quad: Option<usize>,
    },
    /// Run a convergence sweep described by a `key = value` config file.
    Experiment {
        config: PathBuf,
        /// Overrides the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides the config's `parallelism`.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Sample the sector bounds on `|F|`.
    Cert {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

enum Failure {
    Domain(String),
    Config(String),
    Certification(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Config(_) => 2,
            Failure::Certification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Config(m) | Failure::Certification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Certification { .. } => Failure::Certification(err.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

/// Shortest representation that round-trips, switching to exponent form
/// outside `[1e-5, 1e16)`.
fn number(x: f64) -> String {
    let magnitude = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&magnitude) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn require(value: Option<f64>, flag: &str) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::Config(format!("missing required flag --{flag}")))
}

fn angle(value: f64, degrees: bool) -> f64 {
    if degrees {
        value.to_radians()
    } else {
        value
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| Failure::Config(format!("cannot create {}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn io_failure(err: io::Error) -> Failure {
    Failure::Config(format!("write failed: {err}"))
}

#[allow(clippy::too_many_arguments)]
fn eval(
    function: Function,
    z: &[f64],
    r: Option<f64>,
    psi: Option<f64>,
    k: Option<f64>,
    s: Option<f64>,
    s_im: f64,
    edge: Option<f64>,
    beta: Option<f64>,
    alpha: Option<f64>,
    lnc: f64,
    lncp: f64,
    degrees: bool,
) -> Result<Complex64, Failure> {
    let value = match function {
        Function::Fr | Function::F => {
            let [re, im] = z else {
                return Err(Failure::Config(format!(
                    "expected two positional numbers RE IM, got {}",
                    z.len()
                )));
            };
            let arg = Complex64::new(*re, *im);
            match function {
                Function::Fr => fresnel_fr(arg)?,
                _ => big_f(arg)?,
            }
        }
        Function::E => {
            let point = FieldPoint::new(require(r, "r")?, angle(require(psi, "psi")?, degrees))?;
            e_field(point, require(k, "k")?)?
        }
        Function::G | Function::H => {
            let geo = KnifeGeometry::new(require(edge, "R")?, angle(require(beta, "beta")?, degrees))?;
            let arg = Complex64::new(require(s, "s")?, s_im);
            let k = require(k, "k")?;
            match function {
                Function::G => g_of_s(arg, &geo, k)?,
                _ => h_of_s(arg, &geo, k)?,
            }
        }
        Function::V | Function::PsiGo => {
            let cfg = ShadowConfig::new(require(k, "k")?, angle(require(alpha, "alpha")?, degrees), lnc, lncp)?;
            let s = require(s, "s")?;
            match function {
                Function::V => amplitude_v(s, &cfg)?,
                _ => psi_go(s, &cfg)?,
            }
        }
    };
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn region(
    edge: f64,
    beta: f64,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: usize,
    output: Option<&Path>,
) -> Result<(), Failure> {
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(Failure::Config(format!(
            "resolution {resolution} must lie in 1..={MAX_RESOLUTION}"
        )));
    }
    if !(re_range.0 <= re_range.1 && im_range.0 <= im_range.1) {
        return Err(Failure::Config("bounds must satisfy min <= max".into()));
    }
    let geo = KnifeGeometry::new(edge, beta)?;
    let coord = |(lo, hi): (f64, f64), i: usize| {
        if resolution == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (resolution - 1) as f64
        }
    };
    let mut out = open_output(output)?;
    writeln!(out, "re,im,in_cut,in_R,in_ellipse,in_S").map_err(io_failure)?;
    for j in 0..resolution {
        let im = coord(im_range, j);
        for i in 0..resolution {
            let re = coord(re_range, i);
            let label = region_label(Complex64::new(re, im), &geo);
            writeln!(
                out,
                "{},{},{},{},{},{}",
                number(re),
                number(im),
                label.in_cut_plane, label.in_r, label.in_ellipse, label.in_s
            )
            .map_err(io_failure)?;
        }
    }
    out.flush().map_err(io_failure)
}

#[allow(clippy::too_many_arguments)]
fn project(
    k: f64,
    alpha: f64,
    lnc: f64,
    lncp: f64,
    p: usize,
    sigma: f64,
    c: f64,
    layers: Option<usize>,
    quad: Option<usize>,
) -> Result<(), Failure> {
    let cfg = ShadowConfig::new(k, alpha, lnc, lncp)?;
    let n_layers = layers.unwrap_or_else(|| layers_for_degree(p, c));
    let result = best_approx_error(&cfg, n_layers, sigma, p, quad.unwrap_or_else(|| default_quad_order(p)))?;
    let row = ExperimentRow {
        k,
        alpha,
        p,
        n_layers,
        dof: result.dof,
        error_l2: result.error_l2,
        relative_error: result.relative_error,
        status: RowStatus::Ok,
    };
    let stdout = io::stdout();
    write_csv(&[row], stdout.lock()).map_err(io_failure)
}

fn experiment(
    path: &Path,
    output: Option<PathBuf>,
    threads: Option<usize>,
    degrees: bool,
) -> Result<(), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&text, degrees).map_err(Failure::Config)?;
    if output.is_some() {
        cfg.output = output;
    }
    if let Some(threads) = threads {
        cfg.parallelism = threads;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Failure::Config(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| run_grid(&cfg.grid, cfg.quad_order))?;
    let mut out = open_output(cfg.output.as_deref())?;
    write_csv(&rows, &mut out).map_err(io_failure)?;
    out.flush().map_err(io_failure)
}

fn cert(samples: usize) -> Result<(), Failure> {
    let cert = sector_bound_cert(samples)?;
    println!("c_upper={}", cert.c_upper);
    println!("n_samples={}", cert.n_samples);
    println!("max_observed={}", cert.max_observed);
    println!("argmax={},{}", number(cert.argmax.re), number(cert.argmax.im));
    println!("growth_samples={}", cert.growth_samples);
    if cert.max_observed > PROVED_SECTOR_BOUND {
        return Err(Failure::Certification(format!(
            "max |F| = {} exceeds {}",
            cert.max_observed, PROVED_SECTOR_BOUND
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let degrees = cli.degrees;
    match cli.command {
        Command::Eval {
            function,
            z,
            r,
            psi,
            k,
            s,
            s_im,
            edge,
            beta,
            alpha,
            lnc,
            lncp,
        } => {
            let value = eval(function, &z, r, psi, k, s, s_im, edge, beta, alpha, lnc, lncp, degrees)?;
            println!("{},{}", number(value.re), number(value.im));
            Ok(())
        }
        Command::Region {
            edge,
            beta,
            re_min,
            re_max,
            im_min,
            im_max,
            resolution,
            output,
        } => region(
            edge,
            angle(beta, degrees),
            (re_min, re_max),
            (im_min, im_max),
            resolution,
            output.as_deref(),
        ),
        Command::Project {
            k,
            alpha,
            lnc,
            lncp,
            p,
            sigma,
            c,
            layers,
            quad,
        } => project(k, angle(alpha, degrees), lnc, lncp, p, sigma, c, layers, quad),
        Command::Experiment {
            config,
            output,
            threads,
        } => experiment(&config, output, threads, degrees),
        Command::Cert { samples } => cert(samples),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
