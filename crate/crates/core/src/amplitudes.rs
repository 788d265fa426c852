//! Knife-edge field `E(r, psi)`, its geometrical-optics splitting, the
//! amplitudes `h` and `g` along a line past the edge, and the
//! shadow-boundary amplitude `V(s)` on the nonconvex side of a polygon.
//!
//! Conventions: `H(0) = 1/2`, `sign(0) = 0`; the unit normal on the line
//! `y(s) = (-R + s cos beta, s sin beta)` is `n = (sin beta, -cos beta)`.

use crate::error::{domain, Result};
use crate::geometry::{mu_of_s, mu_radicand, r_of_s, KnifeGeometry};
use crate::specfun::{big_f, fresnel_fr};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Below this `|cos(psi/2)|` the far-field coefficient is not evaluated.
pub const CRITICAL_ANGLE_TOL: f64 = 1e-8;

pub(crate) fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

pub(crate) fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_wavenumber(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("wavenumber k = {k} must be positive and finite")))
    }
}

/// `e^{i 3 pi / 4} / sqrt(pi)`
fn ode_constant() -> Complex64 {
    Complex64::from_polar(FRAC_1_SQRT_PI, 3.0 * FRAC_PI_4)
}

/// Polar point around the edge tip. `E` is `4 pi`-periodic in `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub r: f64,
    pub psi: f64,
}

impl FieldPoint {
    pub fn new(r: f64, psi: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) || !psi.is_finite() {
            return Err(domain(format!("field point (r = {r}, psi = {psi}) is invalid")));
        }
        Ok(Self { r, psi })
    }

    fn check(&self) -> Result<()> {
        Self::new(self.r, self.psi).map(|_| ())
    }

    fn check_lit_range(&self) -> Result<()> {
        if self.psi > 0.0 && self.psi < 2.0 * PI {
            Ok(())
        } else {
            Err(domain(format!("psi = {} must lie in (0, 2 pi)", self.psi)))
        }
    }
}

/// `E(r, psi) = e^{-ikr cos psi} Fr(-sqrt(2kr) cos(psi/2))`.
pub fn e_field(p: FieldPoint, k: f64) -> Result<Complex64> {
    p.check()?;
    check_wavenumber(k)?;
    let kr = k * p.r;
    let arg = -(2.0 * kr).sqrt() * (0.5 * p.psi).cos();
    let plane = Complex64::cis(-kr * p.psi.cos());
    Ok(plane * fresnel_fr(Complex64::new(arg, 0.0))?)
}

/// Geometrical-optics part `H(pi - psi) e^{-ikr cos psi}` for `psi in (0, 2 pi)`.
pub fn e_go(p: FieldPoint, k: f64) -> Result<Complex64> {
    p.check()?;
    p.check_lit_range()?;
    check_wavenumber(k)?;
    Ok(heaviside(PI - p.psi) * Complex64::cis(-k * p.r * p.psi.cos()))
}

/// Nonnegative Fresnel argument `sqrt(2kr) |cos(psi/2)|`, zero at `psi = pi`.
pub fn mu_polar(p: FieldPoint, k: f64) -> f64 {
    if p.psi == PI {
        0.0
    } else {
        (2.0 * k * p.r).sqrt() * (0.5 * p.psi).cos().abs()
    }
}

/// `|E - (E_GO - sign(pi - psi) F(mu) e^{ikr})|`.
pub fn e_remainder_check(p: FieldPoint, k: f64) -> Result<f64> {
    p.check_lit_range()?;
    if !(p.r > 0.0) {
        return Err(domain(format!("r = {} must be positive", p.r)));
    }
    let full = e_field(p, k)?;
    let go = e_go(p, k)?;
    let remainder = sign(PI - p.psi) * big_f(Complex64::new(mu_polar(p, k), 0.0))?
        * Complex64::cis(k * p.r);
    Ok((full - (go - remainder)).norm())
}

/// Diffraction coefficient `d(psi) = -e^{i pi/4} / (2 sqrt(2 pi) cos(psi/2))`.
pub fn diffraction_coefficient(psi: f64) -> Result<Complex64> {
    let half = (0.5 * psi).cos();
    if !(half.abs() >= CRITICAL_ANGLE_TOL) {
        return Err(domain(format!(
            "psi = {psi} is at a critical angle (|cos(psi/2)| < {CRITICAL_ANGLE_TOL:e})"
        )));
    }
    Ok(-Complex64::from_polar(1.0, FRAC_PI_4) / (2.0 * (2.0 * PI).sqrt() * half))
}

/// GTD far field `[plane] e^{-ikr cos psi} + d(psi) e^{ikr} / sqrt(kr)`.
pub fn gtd_far_field(p: FieldPoint, k: f64, include_plane_wave: bool) -> Result<Complex64> {
    p.check()?;
    check_wavenumber(k)?;
    if !(p.r > 0.0) {
        return Err(domain("gtd_far_field needs r > 0"));
    }
    let kr = k * p.r;
    let diffracted = diffraction_coefficient(p.psi)? * Complex64::cis(kr) / kr.sqrt();
    let plane = if include_plane_wave {
        Complex64::cis(-kr * p.psi.cos())
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(plane + diffracted)
}

/// `h(s) = d mu / d n = k sin beta (r - R) / (2 r mu)`.
///
/// Evaluated as `sqrt(k) (s - 2R cos beta) sqrt(R - s cos beta + r)
/// / (2 r (r + R))`, which is the same function with the removable
/// singularity at `s = 0` cancelled; `|r + R| >= R` on the cut plane.
pub fn h_of_s(s: Complex64, geo: &KnifeGeometry, k: f64) -> Result<Complex64> {
    check_wavenumber(k)?;
    let r = r_of_s(s, geo)?;
    let big_r = geo.edge_distance;
    let radicand = mu_radicand(s, r, geo);
    Ok(k.sqrt() * (s - 2.0 * big_r * geo.beta.cos()) * radicand.sqrt()
        / (2.0 * r * (r + big_r)))
}

fn g_analytic(s: Complex64, geo: &KnifeGeometry, k: f64) -> Result<Complex64> {
    let h = h_of_s(s, geo, k)?;
    let mu = mu_of_s(s, geo, k)?;
    let f = big_f(mu)?;
    Ok(ode_constant() * h - Complex64::new(0.0, k * geo.beta.sin()) * f)
}

/// `g(s; R, beta) = e^{i 3pi/4}/sqrt(pi) h(s) - i k sin beta F(mu(s))`.
///
/// For `Re s >= 0` this is the closed form continued from the positive axis.
/// For `Re s < 0` it returns `g(-s; R, pi - beta)`, which is the field
/// amplitude seen on the other side of the shadow boundary.
pub fn g_of_s(s: Complex64, geo: &KnifeGeometry, k: f64) -> Result<Complex64> {
    check_wavenumber(k)?;
    if s.re < 0.0 {
        let mirrored = KnifeGeometry {
            beta: PI - geo.beta,
            ..*geo
        };
        g_analytic(-s, &mirrored, k)
    } else {
        g_analytic(s, geo, k)
    }
}

/// Finite-difference check of
/// `dE/dn = dE_GO/dn - sign(pi - psi) g(s) e^{ikr}` at the point `y(s)`.
///
/// Uses a central difference of [`e_field`] with step `step` along
/// `n = (sin beta, -cos beta)`; returns the absolute residual.
pub fn de_dn_check(s: f64, geo: &KnifeGeometry, k: f64, step: f64) -> Result<f64> {
    check_wavenumber(k)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain(format!("s = {s} must be positive")));
    }
    if !(step > 0.0) {
        return Err(domain(format!("step = {step} must be positive")));
    }
    let (sin, cos) = geo.beta.sin_cos();
    let normal = [sin, -cos];
    let [y1, y2] = geo.point(s);
    let field_at = |x1: f64, x2: f64| -> Result<Complex64> {
        let mut psi = x2.atan2(x1);
        if psi < 0.0 {
            psi += 2.0 * PI;
        }
        e_field(FieldPoint::new(x1.hypot(x2), psi)?, k)
    };
    let forward = field_at(y1 + step * normal[0], y2 + step * normal[1])?;
    let backward = field_at(y1 - step * normal[0], y2 - step * normal[1])?;
    let numeric = (forward - backward) / (2.0 * step);

    let r = y1.hypot(y2);
    let mut psi = y2.atan2(y1);
    if psi < 0.0 {
        psi += 2.0 * PI;
    }
    let go = Complex64::new(0.0, -k * sin) * heaviside(PI - psi) * Complex64::cis(-k * y1);
    let g = g_of_s(Complex64::new(s, 0.0), geo, k)?;
    let predicted = go - sign(PI - psi) * g * Complex64::cis(k * r);
    Ok((numeric - predicted).norm())
}

/// Incident plane wave on the nonconvex side `Gamma_nc` of the polygon.
///
/// The side is `x(s) = (-s, -L')`, `s in [0, L_nc]`, with the corner `R` at
/// the origin and unit normal `(0, 1)`. The incident direction is
/// `d = (-sin alpha, cos alpha)`, so that `x . d = -r cos(theta - alpha)`
/// with `theta` the polar angle measured from the downward extension of the
/// adjacent side `Gamma_nc'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowConfig {
    pub k: f64,
    pub alpha: f64,
    pub l_nc: f64,
    pub l_nc_prime: f64,
}

impl ShadowConfig {
    pub fn new(k: f64, alpha: f64, l_nc: f64, l_nc_prime: f64) -> Result<Self> {
        check_wavenumber(k)?;
        if !(alpha > FRAC_PI_2 && alpha < 3.0 * FRAC_PI_2) {
            return Err(domain(format!("alpha = {alpha} must lie in (pi/2, 3pi/2)")));
        }
        for (name, value) in [("l_nc", l_nc), ("l_nc_prime", l_nc_prime)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(domain(format!("{name} = {value} must be positive")));
            }
        }
        Ok(Self {
            k,
            alpha,
            l_nc,
            l_nc_prime,
        })
    }

    /// `s^i_SB = L' tan(pi - alpha)`; negative when the incident shadow
    /// boundary misses the side.
    pub fn incident_shadow_point(&self) -> f64 {
        self.l_nc_prime * (PI - self.alpha).tan()
    }

    /// `s^r_SB = -s^i_SB`.
    pub fn reflected_shadow_point(&self) -> f64 {
        -self.incident_shadow_point()
    }

    /// `s_SB = L' |tan(pi - alpha)|`.
    pub fn s_sb(&self) -> f64 {
        self.incident_shadow_point().abs()
    }

    /// `R_alpha = L' / cos(pi - alpha)`.
    pub fn r_alpha(&self) -> f64 {
        self.l_nc_prime / (PI - self.alpha).cos()
    }

    pub fn beta_plus(&self) -> f64 {
        FRAC_PI_2 + (PI - self.alpha).abs()
    }

    pub fn beta_minus(&self) -> f64 {
        FRAC_PI_2 - (PI - self.alpha).abs()
    }

    pub fn geometry_plus(&self) -> Result<KnifeGeometry> {
        KnifeGeometry::new(self.r_alpha(), self.beta_plus())
    }

    pub fn geometry_minus(&self) -> Result<KnifeGeometry> {
        KnifeGeometry::new(self.r_alpha(), self.beta_minus())
    }

    /// Distance `r(s) = sqrt(s^2 + L'^2)` from the corner to `x(s)`.
    pub fn corner_distance(&self, s: f64) -> f64 {
        s.hypot(self.l_nc_prime)
    }

    fn check_side(&self, s: f64) -> Result<()> {
        if s >= 0.0 && s <= self.l_nc {
            Ok(())
        } else {
            Err(domain(format!("s = {s} must lie in [0, {}]", self.l_nc)))
        }
    }
}

/// Shadow-boundary amplitude
/// `V(s) = -H(s - s_SB) g+(s - s_SB) + H(s_SB - s) g-(s_SB - s) - g-(s + s_SB)`.
pub fn amplitude_v(s: f64, cfg: &ShadowConfig) -> Result<Complex64> {
    cfg.check_side(s)?;
    let s_sb = cfg.s_sb();
    let plus = cfg.geometry_plus()?;
    let minus = cfg.geometry_minus()?;
    let g = |t: f64, geo: &KnifeGeometry| g_of_s(Complex64::new(t, 0.0), geo, cfg.k);

    let mut v = -g(s + s_sb, &minus)?;
    let above = heaviside(s - s_sb);
    if above != 0.0 {
        v -= above * g(s - s_sb, &plus)?;
    }
    let below = heaviside(s_sb - s);
    if below != 0.0 {
        v += below * g(s_sb - s, &minus)?;
    }
    Ok(v)
}

/// Classical GO normal derivative on `Gamma_nc`:
/// `H(s - s^i_SB) du^i/dn - H(s^r_SB - s) du^r/dn`.
pub fn psi_go(s: f64, cfg: &ShadowConfig) -> Result<Complex64> {
    cfg.check_side(s)?;
    let k = cfg.k;
    let (sin, cos) = cfg.alpha.sin_cos();
    let height = cfg.l_nc_prime;
    let slope = Complex64::new(0.0, k * cos);
    let incident = slope * Complex64::cis(k * (s * sin - height * cos));
    let reflected = slope * Complex64::cis(k * (-s * sin - height * cos));
    Ok(heaviside(s - cfg.incident_shadow_point()) * incident
        - heaviside(cfg.reflected_shadow_point() - s) * reflected)
}

/// `Psi_GO(s) + V(s) e^{ikr(s)}`, the smooth modified-GO term.
pub fn psi_total(s: f64, cfg: &ShadowConfig) -> Result<Complex64> {
    let phase = Complex64::cis(cfg.k * cfg.corner_distance(s));
    Ok(psi_go(s, cfg)? + amplitude_v(s, cfg)? * phase)
}

/// Knife-edge solution `u^d = E(r, theta - alpha) - E(r, theta + alpha)` at a
/// Cartesian point in the polygon frame.
pub fn knife_edge_solution(x: [f64; 2], cfg: &ShadowConfig) -> Result<Complex64> {
    let r = x[0].hypot(x[1]);
    let mut theta = x[1].atan2(x[0]) + FRAC_PI_2;
    if theta <= 0.0 {
        theta += 2.0 * PI;
    }
    let incident = e_field(FieldPoint::new(r, theta - cfg.alpha)?, cfg.k)?;
    let reflected = e_field(FieldPoint::new(r, theta + cfg.alpha)?, cfg.k)?;
    Ok(incident - reflected)
}
