//! Numerical certificate for the sector bounds on `|F|`.

use super::big_f;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Gamma(5/4)
const GAMMA_5_4: f64 = 0.906_402_477_055_477_0;

/// `1 + (4 / pi^{3/2}) Gamma(5/4)^2 ~ 1.59`, the proved bound on `|F(z)|` for
/// `arg z in [-pi/2, pi]`.
pub const PROVED_SECTOR_BOUND: f64 =
    1.0 + 4.0 / (PI * 1.772_453_850_905_516) * GAMMA_5_4 * GAMMA_5_4;

const MAX_RADIUS: f64 = 40.0;
/// Growth-sector samples keep `|z|^2 sin(2 arg z) <= 30`, so `e^{...} +- 1/2`
/// is still resolvable in double precision.
const GROWTH_EXPONENT_CAP: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SectorBoundCert {
    /// The proved constant the samples are checked against.
    pub c_upper: f64,
    pub n_samples: usize,
    pub max_observed: f64,
    /// Sample at which `max_observed` was attained.
    pub argmax: Complex64,
    /// Number of points checked against the two-sided growth bound.
    pub growth_samples: usize,
}

/// Radical inverse of `index` in `base` (van der Corput / Halton coordinate).
pub(crate) fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Samples `|F|` on the closed sector `arg z in [-pi/2, pi]`, `0 < |z| <= 40`,
/// and the growth estimate
/// `e^{|z|^2 sin 2 arg z} - 1/2 <= |F(z)| <= e^{|z|^2 sin 2 arg z} + 1/2`
/// on `arg z in (-pi, -pi/2)`.
///
/// Bounded-sector samples: 80% on a 2-D Halton set, 10% on each edge ray.
/// `n_samples / 4` further Halton points cover the growth sector.
pub fn sector_bound_cert(n_samples: usize) -> Result<SectorBoundCert> {
    if n_samples < 1000 {
        return Err(crate::error::domain(format!(
            "sector_bound_cert: n_samples = {n_samples} must be >= 1000"
        )));
    }
    let n_edge = n_samples / 10;
    let n_interior = n_samples - 2 * n_edge;

    let mut points = Vec::with_capacity(n_samples);
    for i in 1..=n_interior as u64 {
        let theta = -FRAC_PI_2 + 1.5 * PI * radical_inverse(i, 2);
        // shift keeps the radius strictly positive
        let r = MAX_RADIUS * (1.0 - radical_inverse(i, 3));
        points.push(Complex64::from_polar(r, theta));
    }
    for i in 1..=n_edge {
        let r = MAX_RADIUS * i as f64 / n_edge as f64;
        points.push(Complex64::new(0.0, -r));
        points.push(Complex64::new(-r, 0.0));
    }

    let mut max_observed = 0.0;
    let mut argmax = Complex64::new(0.0, 0.0);
    for &z in &points {
        let value = big_f(z)?.norm();
        if value > PROVED_SECTOR_BOUND {
            return Err(Error::Certification {
                z,
                reason: format!("|F| = {value} exceeds the bound {PROVED_SECTOR_BOUND}"),
            });
        }
        if value > max_observed {
            max_observed = value;
            argmax = z;
        }
    }

    let growth_samples = n_samples / 4;
    for i in 1..=growth_samples as u64 {
        // open sector (-pi, -pi/2)
        let theta = -PI + FRAC_PI_2 * (radical_inverse(i, 5) * 0.998 + 0.001);
        let r_cap = (GROWTH_EXPONENT_CAP / (2.0 * theta).sin()).sqrt().min(MAX_RADIUS);
        let r = r_cap * (1.0 - radical_inverse(i, 7));
        let z = Complex64::from_polar(r, theta);
        check_growth(z)?;
    }

    Ok(SectorBoundCert {
        c_upper: PROVED_SECTOR_BOUND,
        n_samples: points.len(),
        max_observed,
        argmax,
        growth_samples,
    })
}

/// Two-sided growth estimate at a single point of the growth sector.
pub(crate) fn check_growth(z: Complex64) -> Result<f64> {
    let exponent = z.norm_sqr() * (2.0 * z.arg()).sin();
    let centre = exponent.exp();
    let value = big_f(z)?.norm();
    // rounding in the subtraction e^{-iz^2} - F(-z) scales with e^{exponent}
    let slack = 64.0 * f64::EPSILON * (centre + 1.0);
    if value < centre - 0.5 - slack || value > centre + 0.5 + slack {
        return Err(Error::Certification {
            z,
            reason: format!(
                "|F| = {value} outside [{lo}, {hi}]",
                lo = centre - 0.5,
                hi = centre + 0.5
            ),
        });
    }
    Ok(value)
}
