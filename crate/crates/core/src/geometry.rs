//! Analytic continuation of the distance `r(s)` and the Fresnel argument
//! `mu(s)` along a straight line passing a knife edge, and the regions of the
//! cut `s`-plane where the amplitude bounds hold.
//!
//! The line starts at `(-R, 0)` relative to the edge tip and is inclined at
//! angle `beta`, so the point at arc length `s` is
//! `y(s) = (-R + s cos beta, s sin beta)`.

use crate::error::{domain, Error, Result};
use num_complex::Complex64;

/// Default half-width of the branch-cut exclusion zone, relative to `R`.
pub const DEFAULT_CUT_TOLERANCE: f64 = 1e-14;

/// Below this `|cos beta|` the ellipse is treated as degenerate.
const RIGHT_ANGLE_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnifeGeometry {
    /// Distance from the edge tip to the start of the line.
    pub edge_distance: f64,
    /// Inclination of the line, in `(0, pi)`.
    pub beta: f64,
    /// Branch-cut tolerance relative to `edge_distance`.
    pub cut_tolerance: f64,
}

impl KnifeGeometry {
    pub fn new(edge_distance: f64, beta: f64) -> Result<Self> {
        if !(edge_distance > 0.0 && edge_distance.is_finite()) {
            return Err(domain(format!(
                "KnifeGeometry: R = {edge_distance} must be positive and finite"
            )));
        }
        if !(beta > 0.0 && beta < std::f64::consts::PI) {
            return Err(domain(format!(
                "KnifeGeometry: beta = {beta} must lie in (0, pi)"
            )));
        }
        Ok(Self {
            edge_distance,
            beta,
            cut_tolerance: DEFAULT_CUT_TOLERANCE,
        })
    }

    pub fn with_cut_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(domain(format!("cut tolerance {tol} must be finite and >= 0")));
        }
        self.cut_tolerance = tol;
        Ok(self)
    }

    /// Branch points `R e^{+- i beta}`.
    pub fn branch_points(&self) -> (Complex64, Complex64) {
        let top = Complex64::from_polar(self.edge_distance, self.beta);
        (top, top.conj())
    }

    /// Point of the line at (real) arc length `s`.
    pub fn point(&self, s: f64) -> [f64; 2] {
        let (sin, cos) = self.beta.sin_cos();
        [-self.edge_distance + s * cos, s * sin]
    }

    /// Whether `s` lies on, or within tolerance of, one of the two vertical cuts
    /// `R cos beta + i t` with `|t| >= R sin beta`.
    pub fn on_branch_cut(&self, s: Complex64) -> bool {
        let (sin, cos) = self.beta.sin_cos();
        let tol = self.cut_tolerance * self.edge_distance;
        (s.re - self.edge_distance * cos).abs() <= tol
            && s.im.abs() >= self.edge_distance * sin - tol
    }

    fn check_cut(&self, s: Complex64) -> Result<()> {
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(domain(format!("s = {s} is not finite")));
        }
        if self.on_branch_cut(s) {
            return Err(Error::BranchCut { s });
        }
        Ok(())
    }
}

/// `r(s) = sqrt(R^2 + s^2 - 2 s R cos beta)`, written as
/// `sqrt((s - R cos beta)^2 + (R sin beta)^2)` so the principal branch cut
/// falls exactly on the two vertical rays.
pub fn r_of_s(s: Complex64, geo: &KnifeGeometry) -> Result<Complex64> {
    geo.check_cut(s)?;
    Ok(r_unchecked(s, geo))
}

fn r_unchecked(s: Complex64, geo: &KnifeGeometry) -> Complex64 {
    let (sin, cos) = geo.beta.sin_cos();
    let shifted = s - geo.edge_distance * cos;
    let height = geo.edge_distance * sin;
    (shifted * shifted + height * height).sqrt()
}

/// `R - s cos beta + r(s)`; has positive real part on the cut plane.
///
/// When the sum cancels it is taken from `(a + r)(r - a) = s^2 sin^2 beta`
/// with `a = R - s cos beta`.
pub(crate) fn mu_radicand(s: Complex64, r: Complex64, geo: &KnifeGeometry) -> Complex64 {
    let (sin, cos) = geo.beta.sin_cos();
    let a = geo.edge_distance - s * cos;
    let direct = a + r;
    let conjugate = r - a;
    if direct.norm() >= conjugate.norm() {
        direct
    } else {
        let t = s * sin;
        t * t / conjugate
    }
}

/// `mu(s) = sqrt(k) s sin beta / sqrt(R - s cos beta + r(s))`.
///
/// On `s > 0` this is `sqrt(k (y1 + r))`, the Fresnel argument of the edge
/// field at `y(s)`.
pub fn mu_of_s(s: Complex64, geo: &KnifeGeometry, k: f64) -> Result<Complex64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(domain(format!("wavenumber k = {k} must be positive")));
    }
    let r = r_of_s(s, geo)?;
    let radicand = mu_radicand(s, r, geo);
    Ok(k.sqrt() * geo.beta.sin() * s / radicand.sqrt())
}

/// `arctan sqrt((11 + 5 sqrt 5)/2)`, the opening half-angle of the sector in
/// `S_{R,beta}`.
pub fn theta_star() -> f64 {
    ((11.0 + 5.0 * 5f64.sqrt()) / 2.0).sqrt().atan()
}

/// `(R/2) min(1, 1/(sin beta sqrt(kR)))`: the scale below which no
/// `k`-independent bound on the amplitude holds. Diagnostic only.
pub fn epsilon_star(geo: &KnifeGeometry, k: f64) -> f64 {
    let big_r = geo.edge_distance;
    0.5 * big_r * (1.0 / (geo.beta.sin() * (k * big_r).sqrt())).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RegionLabel {
    pub in_cut_plane: bool,
    pub in_r: bool,
    pub in_ellipse: bool,
    pub in_s: bool,
}

/// Interior of `Im(s)^2 + (Re s - R cos beta)^2 / cos^2 beta = R^2`; empty
/// when `beta = pi/2`.
pub fn in_ellipse(s: Complex64, geo: &KnifeGeometry) -> bool {
    let big_r = geo.edge_distance;
    let cos = geo.beta.cos();
    if cos.abs() <= RIGHT_ANGLE_TOL {
        return false;
    }
    let dx = (s.re - big_r * cos) / cos;
    s.im * s.im + dx * dx < big_r * big_r
}

fn in_sector_strip(s: Complex64, height: f64) -> bool {
    s.im.abs() < height && s.arg().abs() < theta_star()
}

/// Membership of `s` in the cut plane, the bounded region `R_{R,beta}`, the
/// ellipse `E_{R,beta}` and the sector strip `S_{R,beta}`. Region boundaries
/// count as outside.
pub fn region_label(s: Complex64, geo: &KnifeGeometry) -> RegionLabel {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return RegionLabel::default();
    }
    let in_cut_plane = !geo.on_branch_cut(s);
    let in_ellipse = in_ellipse(s, geo);
    let upper = s.im > 0.0;
    let right = s.re > geo.edge_distance * geo.beta.cos();
    let cos = geo.beta.cos();
    let covered = if cos.abs() <= RIGHT_ANGLE_TOL {
        upper || right
    } else if cos > 0.0 {
        upper || right || in_ellipse
    } else {
        upper || (right && !in_ellipse)
    };
    RegionLabel {
        in_cut_plane,
        in_r: in_cut_plane && covered,
        in_ellipse,
        in_s: in_sector_strip(s, geo.edge_distance * geo.beta.sin()),
    }
}

/// `S^delta_{R,beta}`: the sector strip with height shrunk to
/// `(1 - delta) R sin beta`.
pub fn strip_s_delta(s: Complex64, geo: &KnifeGeometry, delta: f64) -> Result<bool> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("delta = {delta} must lie in (0, 1)")));
    }
    let height = (1.0 - delta) * geo.edge_distance * geo.beta.sin();
    Ok(in_sector_strip(s, height))
}
