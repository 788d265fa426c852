//! Best-approximation sweeps over wavenumber, angle and degree, exponential
//! rate fits and CSV output.

use crate::amplitudes::ShadowConfig;
use crate::error::{domain, Error, Result};
use crate::hpspace::{best_approx_error, default_quad_order, layers_for_degree, shadow_mesh};
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};

pub const CSV_HEADER: &str = "k,alpha,p,n_layers,dof,error_l2,relative_error,status";

/// Errors at or below this level are treated as converged to roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-14;

/// Wavenumbers of the default sweep.
pub const K_LADDER: [f64; 4] = [4.0, 16.0, 64.0, 256.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub k_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub p_values: Vec<usize>,
    pub l_nc: f64,
    pub l_nc_prime: f64,
    pub sigma: f64,
    /// Layers per degree: `n = max(1, ceil(c p))`.
    pub c: f64,
}

impl Default for ExperimentGrid {
    /// `L_nc = 3/2`, `L'_nc = 1`, `sigma = 0.15`, `c = 1`, `alpha = 3 pi/4`,
    /// `p = 0..=12` over [`K_LADDER`].
    fn default() -> Self {
        Self {
            k_values: K_LADDER.to_vec(),
            alpha_values: vec![3.0 * PI / 4.0],
            p_values: (0..=12).collect(),
            l_nc: 1.5,
            l_nc_prime: 1.0,
            sigma: 0.15,
            c: 1.0,
        }
    }
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        if self.k_values.is_empty() || self.alpha_values.is_empty() || self.p_values.is_empty() {
            return Err(domain("experiment grid has an empty parameter list"));
        }
        if let Some(k) = self.k_values.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
            return Err(domain(format!("wavenumber {k} must be positive")));
        }
        if let Some(a) = self.alpha_values.iter().find(|a| !(**a > FRAC_PI_2 && **a <= PI)) {
            return Err(domain(format!("alpha = {a} must lie in (pi/2, pi]")));
        }
        if !(self.l_nc > 0.0 && self.l_nc_prime > 0.0) {
            return Err(domain("side lengths must be positive"));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(domain(format!("sigma = {} must lie in (0, 1)", self.sigma)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(domain(format!("c = {} must be positive", self.c)));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.k_values.len() * self.alpha_values.len() * self.p_values.len()
    }

    pub fn config(&self, k: f64, alpha: f64) -> Result<ShadowConfig> {
        ShadowConfig::new(k, alpha, self.l_nc, self.l_nc_prime)
    }

    /// `(k, alpha, p)` triples in canonical order.
    fn triples(&self) -> Vec<(f64, f64, usize)> {
        let mut out = Vec::with_capacity(self.n_rows());
        for &k in &self.k_values {
            for &alpha in &self.alpha_values {
                for &p in &self.p_values {
                    out.push((k, alpha, p));
                }
            }
        }
        out.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub k: f64,
    pub alpha: f64,
    pub p: usize,
    pub n_layers: usize,
    pub dof: usize,
    pub error_l2: f64,
    pub relative_error: f64,
    pub status: RowStatus,
}

impl ExperimentRow {
    pub fn is_ok(&self) -> bool {
        self.status == RowStatus::Ok
    }
}

fn run_row(grid: &ExperimentGrid, k: f64, alpha: f64, p: usize, quad_order: Option<usize>) -> ExperimentRow {
    let n_layers = layers_for_degree(p, grid.c);
    let quad = quad_order.unwrap_or_else(|| default_quad_order(p));
    let outcome = grid
        .config(k, alpha)
        .and_then(|cfg| best_approx_error(&cfg, n_layers, grid.sigma, p, quad));
    match outcome {
        Ok(result) => ExperimentRow {
            k,
            alpha,
            p,
            n_layers,
            dof: result.dof,
            error_l2: result.error_l2,
            relative_error: result.relative_error,
            status: RowStatus::Ok,
        },
        Err(err) => ExperimentRow {
            k,
            alpha,
            p,
            n_layers,
            dof: 0,
            error_l2: f64::NAN,
            relative_error: f64::NAN,
            status: RowStatus::Failed(err.to_string()),
        },
    }
}

/// One row per `(k, alpha, p)`, in canonical order whatever the thread count.
/// `quad_order = None` uses `2p + 16`. Row failures are recorded in the
/// status column.
pub fn run_grid(grid: &ExperimentGrid, quad_order: Option<usize>) -> Result<Vec<ExperimentRow>> {
    grid.validate()?;
    Ok(grid
        .triples()
        .into_par_iter()
        .map(|(k, alpha, p)| run_row(grid, k, alpha, p, quad_order))
        .collect())
}

fn csv_status(status: &RowStatus) -> String {
    match status {
        RowStatus::Ok => "ok".to_string(),
        RowStatus::Failed(reason) => format!("failed: {}", reason.replace([',', '\n', '\r'], ";")),
    }
}

pub fn write_csv<W: Write>(rows: &[ExperimentRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{},{},{},{:.16e},{:.16e},{}",
            row.k,
            row.alpha,
            row.p,
            row.n_layers,
            row.dof,
            row.error_l2,
            row.relative_error,
            csv_status(&row.status)
        )?;
    }
    Ok(())
}

pub fn to_csv(rows: &[ExperimentRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// Least-squares fit `log error = intercept - tau p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub tau: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `(p, error)` pairs whose error exceeds [`ROUNDOFF_FLOOR`]; at least
/// four are required.
pub fn fit_rate(points: &[(usize, f64)]) -> Result<RateFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > ROUNDOFF_FLOOR && e.is_finite())
        .map(|&(p, e)| (p as f64, e.ln()))
        .collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: usable.len(),
        });
    }
    let n = usable.len() as f64;
    let mean_p = usable.iter().map(|(p, _)| p).sum::<f64>() / n;
    let mean_y = usable.iter().map(|(_, y)| y).sum::<f64>() / n;
    let spp: f64 = usable.iter().map(|(p, _)| (p - mean_p).powi(2)).sum();
    let spy: f64 = usable.iter().map(|(p, y)| (p - mean_p) * (y - mean_y)).sum();
    if spp == 0.0 {
        return Err(domain("rate fit needs at least two distinct degrees"));
    }
    let slope = spy / spp;
    let intercept = mean_y - slope * mean_p;
    let ss_tot: f64 = usable.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = usable
        .iter()
        .map(|(p, y)| (y - intercept - slope * p).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON * mean_y.abs().max(1.0) {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        tau: -slope,
        intercept,
        r_squared,
    })
}

/// Rate fit over the successful rows matching `(k, alpha)` with `p` in
/// `p_range`.
pub fn fit_rows(
    rows: &[ExperimentRow],
    k: f64,
    alpha: f64,
    p_range: std::ops::RangeInclusive<usize>,
) -> Result<RateFit> {
    let points: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| r.is_ok() && r.k == k && r.alpha == alpha && p_range.contains(&r.p))
        .map(|r| (r.p, r.relative_error))
        .collect();
    fit_rate(&points)
}

/// `pi/2 + arctan(2 L'_nc / (3 L_nc))`: the angle at which a mesh point sits
/// exactly halfway along the side.
pub fn halfway_alpha(l_nc: f64, l_nc_prime: f64) -> f64 {
    FRAC_PI_2 + (2.0 * l_nc_prime / (3.0 * l_nc)).atan()
}

/// `pi/2 + arctan(L'_nc / L_nc)`: the shadow point reaches the far corner.
pub fn partial_illumination_alpha(l_nc: f64, l_nc_prime: f64) -> f64 {
    FRAC_PI_2 + (l_nc_prime / l_nc).atan()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DipScan {
    /// `(alpha, relative_error)` in ascending `alpha`.
    pub samples: Vec<(f64, f64)>,
    /// Angles of samples smaller than both neighbours.
    pub local_minima: Vec<f64>,
    /// The local minimum closest to `expected_alpha`.
    pub minimum_alpha: f64,
    pub expected_alpha: f64,
    /// Whether `minimum_alpha` lies within `pi/32` of `expected_alpha`.
    pub near_expected: bool,
}

/// Relative error over the grid's angles at its single `(k, p)`, and the
/// local minimum nearest the halfway-mesh-point angle.
pub fn dip_scan(grid: &ExperimentGrid, quad_order: Option<usize>) -> Result<DipScan> {
    if grid.k_values.len() != 1 || grid.p_values.len() != 1 {
        return Err(domain("dip scan needs exactly one wavenumber and one degree"));
    }
    if grid.p_values[0] < 6 {
        return Err(domain(format!("dip scan needs p >= 6, got {}", grid.p_values[0])));
    }
    let rows = run_grid(grid, quad_order)?;
    let samples: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.is_ok())
        .map(|r| (r.alpha, r.relative_error))
        .collect();
    if samples.len() < 3 {
        return Err(domain("dip scan needs at least three successful angles"));
    }
    let local_minima: Vec<f64> = samples
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .map(|w| w[1].0)
        .collect();
    let expected_alpha = halfway_alpha(grid.l_nc, grid.l_nc_prime);
    let minimum_alpha = local_minima
        .iter()
        .copied()
        .min_by(|a, b| (a - expected_alpha).abs().total_cmp(&(b - expected_alpha).abs()))
        .ok_or_else(|| domain("relative error has no interior local minimum over the scanned angles"))?;
    Ok(DipScan {
        near_expected: (minimum_alpha - expected_alpha).abs() <= PI / 32.0,
        samples,
        local_minima,
        minimum_alpha,
        expected_alpha,
    })
}

/// Degrees of freedom of the degree-`p` space on the shadow mesh.
pub fn dof_for(cfg: &ShadowConfig, p: usize, sigma: f64, c: f64) -> Result<usize> {
    let mesh = shadow_mesh(cfg, layers_for_degree(p, c), sigma)?;
    Ok(mesh.n_elements() * (p + 1))
}

/// `n` angles evenly spaced strictly inside `(pi/2, pi)`.
pub fn interior_alphas(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| FRAC_PI_2 + FRAC_PI_2 * i as f64 / (n + 1) as f64)
        .collect()
}
