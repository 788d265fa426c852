//! Complex Fresnel integral and related error-function kernels.
//!
//! `Fr(z) = (1/2) erfc(e^{-i pi/4} z)` and `F(z) = e^{-i z^2} Fr(z)
//! = (1/2) w(e^{i pi/4} z)`, with `w` the Faddeeva function. Both are entire;
//! the only failure mode is an exponential factor leaving the `f64` range,
//! which is reported as [`Error::Overflow`].

mod cert;
mod faddeeva;
mod oracle;

pub use cert::{sector_bound_cert, SectorBoundCert, PROVED_SECTOR_BOUND};
pub use oracle::{fresnel_oracle, integrate_adaptive};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Largest argument of `exp` that stays finite.
const MAX_EXP: f64 = 709.78;

pub(crate) fn ensure_finite(z: Complex64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(crate::error::domain(format!("{what}: argument {z} is not finite")))
    }
}

/// `e^{i pi/4} z`
fn rotate_eighth(z: Complex64) -> Complex64 {
    Complex64::new((z.re - z.im) * FRAC_1_SQRT_2, (z.re + z.im) * FRAC_1_SQRT_2)
}

/// `a * b` as `hi + lo` with `hi = fl(a * b)`.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    (hi, a.mul_add(b, -hi))
}

/// `a + b` as `hi + lo` with `hi = fl(a + b)`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let hi = a + b;
    let bb = hi - a;
    (hi, (a - (hi - bb)) + (b - bb))
}

/// `z^2` split as `hi + lo` per component, so that phases such as `e^{i z^2}`
/// keep full relative accuracy even when `|z|^2` is in the thousands.
fn square_split(z: Complex64) -> (Complex64, Complex64) {
    let (xx, xx_lo) = two_prod(z.re, z.re);
    let (yy, yy_lo) = two_prod(z.im, z.im);
    let (re, re_lo) = two_sum(xx, -yy);
    let (xy, xy_lo) = two_prod(z.re, z.im);
    (
        Complex64::new(re, 2.0 * xy),
        Complex64::new(re_lo + xx_lo - yy_lo, 2.0 * xy_lo),
    )
}

/// `exp(sign * i * z^2)` evaluated from the split square, returned as
/// `(growth, unit)` with value `unit * exp(growth)` and `|unit| = 1`.
fn exp_i_square(z: Complex64, sign: f64) -> (f64, Complex64) {
    let (hi, lo) = square_split(z);
    let growth = -sign * (hi.im + lo.im);
    let unit = Complex64::cis(sign * hi.re) * Complex64::cis(sign * lo.re);
    (growth, unit)
}

/// Faddeeva function `w(z) = e^{-z^2} erfc(-iz)` for any finite `z`.
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    ensure_finite(z, "faddeeva")?;
    if z.im >= 0.0 {
        return Ok(faddeeva::w_upper(z));
    }
    // w(z) = 2 e^{-z^2} - w(-z)
    let growth = z.im * z.im - z.re * z.re;
    if growth > MAX_EXP {
        return Err(Error::Overflow { what: "w", z });
    }
    Ok(2.0 * (-z * z).exp() - faddeeva::w_upper(-z))
}

/// `F(z) = e^{-i z^2} Fr(z) = (1/2) w(e^{i pi/4} z)`.
///
/// Bounded on `arg z in [-pi/2, pi]`; grows like `e^{|z|^2 sin(2 arg z)}`
/// for `arg z in (-pi, -pi/2)`.
pub fn big_f(z: Complex64) -> Result<Complex64> {
    ensure_finite(z, "F")?;
    let zeta = rotate_eighth(z);
    if zeta.im >= 0.0 {
        return Ok(0.5 * faddeeva::w_upper(zeta));
    }
    // F(z) = e^{-i z^2} - F(-z), and -zeta is in the upper half-plane.
    let (growth, unit) = exp_i_square(z, -1.0);
    if growth > MAX_EXP {
        return Err(Error::Overflow { what: "F", z });
    }
    Ok(unit * growth.exp() - 0.5 * faddeeva::w_upper(-zeta))
}

/// Complex Fresnel integral
/// `Fr(z) = e^{-i pi/4}/sqrt(pi) \int_z^\infty e^{i t^2} dt = (1/2) erfc(e^{-i pi/4} z)`.
pub fn fresnel_fr(z: Complex64) -> Result<Complex64> {
    ensure_finite(z, "Fr")?;
    let zeta = rotate_eighth(z);
    let reflected = zeta.im < 0.0;
    let w = if reflected {
        faddeeva::w_upper(-zeta)
    } else {
        faddeeva::w_upper(zeta)
    };
    let half_w = 0.5 * w;

    let (growth, unit) = exp_i_square(z, 1.0);
    let term = if growth < MAX_EXP - 10.0 {
        unit * growth.exp() * half_w
    } else {
        // the exponential alone overflows; |w| ~ 1/|z| may bring it back
        let log_modulus = growth + half_w.norm().ln();
        if log_modulus > MAX_EXP {
            return Err(Error::Overflow { what: "Fr", z });
        }
        unit * (half_w / half_w.norm()) * log_modulus.exp()
    };
    Ok(if reflected {
        Complex64::new(1.0, 0.0) - term
    } else {
        term
    })
}
