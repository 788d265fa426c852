//! Flat `key = value` run configuration for the experiment subcommand.

use shadowhp::experiments::{interior_alphas, ExperimentGrid};
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: ExperimentGrid,
    /// `None` uses `2p + 16` per degree.
    pub quad_order: Option<usize>,
    pub output: Option<PathBuf>,
    /// Worker threads; 0 lets rayon decide.
    pub parallelism: usize,
}

const KEYS: [&str; 11] = [
    "k_values",
    "alpha_values",
    "alpha_interior",
    "p_values",
    "l_nc",
    "l_nc_prime",
    "sigma",
    "c",
    "quad_order",
    "output",
    "parallelism",
];

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    value
        .parse::<f64>()
        .map_err(|_| format!("{key}: '{value}' is not a number"))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, String> {
    value
        .parse::<usize>()
        .map_err(|_| format!("{key}: '{value}' is not a non-negative integer"))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|item| parse_f64(key, item.trim()))
        .collect()
}

/// Comma list of degrees; `a..b` is an inclusive range.
fn parse_degrees(key: &str, value: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim) {
        if let Some((lo, hi)) = item.split_once("..") {
            let (lo, hi) = (parse_usize(key, lo.trim())?, parse_usize(key, hi.trim())?);
            if lo > hi {
                return Err(format!("{key}: empty range '{item}'"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(parse_usize(key, item)?);
        }
    }
    Ok(out)
}

impl RunConfig {
    /// Parses and validates; every error message names the offending key or
    /// line. Angles are converted from degrees when `degrees` is set.
    pub fn parse(text: &str, degrees: bool) -> Result<Self, String> {
        let mut grid = ExperimentGrid::default();
        let mut cfg = RunConfig {
            grid: grid.clone(),
            quad_order: None,
            output: None,
            parallelism: 0,
        };
        let mut seen = Vec::new();
        let mut alpha_interior = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(format!("line {}: unknown key '{key}'", lineno + 1));
            }
            if seen.contains(&key) {
                return Err(format!("line {}: duplicate key '{key}'", lineno + 1));
            }
            seen.push(key);
            match key {
                "k_values" => grid.k_values = parse_list(key, value)?,
                "alpha_values" => grid.alpha_values = parse_list(key, value)?,
                "alpha_interior" => alpha_interior = Some(parse_usize(key, value)?),
                "p_values" => grid.p_values = parse_degrees(key, value)?,
                "l_nc" => grid.l_nc = parse_f64(key, value)?,
                "l_nc_prime" => grid.l_nc_prime = parse_f64(key, value)?,
                "sigma" => grid.sigma = parse_f64(key, value)?,
                "c" => grid.c = parse_f64(key, value)?,
                "quad_order" => {
                    cfg.quad_order = match value {
                        "auto" => None,
                        v => Some(parse_usize(key, v)?),
                    }
                }
                "output" => cfg.output = Some(PathBuf::from(value)),
                "parallelism" => cfg.parallelism = parse_usize(key, value)?,
                _ => unreachable!("key list checked above"),
            }
        }

        if degrees {
            for alpha in &mut grid.alpha_values {
                *alpha = alpha.to_radians();
            }
        }
        if let Some(count) = alpha_interior {
            if seen.contains(&"alpha_values") {
                return Err("alpha_values and alpha_interior are mutually exclusive".into());
            }
            if count == 0 {
                return Err("alpha_interior must be at least 1".into());
            }
            grid.alpha_values = interior_alphas(count);
        }
        if let Some(order) = cfg.quad_order {
            let max_p = grid.p_values.iter().copied().max().unwrap_or(0);
            if order < max_p + 1 || order > shadowhp::hpspace::MAX_GAUSS_POINTS {
                return Err(format!(
                    "quad_order = {order} must lie in {}..={}",
                    max_p + 1,
                    shadowhp::hpspace::MAX_GAUSS_POINTS
                ));
            }
        }
        grid.validate().map_err(|e| e.to_string())?;
        cfg.grid = grid;
        Ok(cfg)
    }
}
