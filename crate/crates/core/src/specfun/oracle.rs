//! Reference evaluation of `Fr(z)` by adaptive Gauss-Kronrod quadrature of
//! its defining integral. Shares no code with the Faddeeva kernels.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_4, PI};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 20_000;

/// Integration interval queued by its error estimate.
struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Piece { a, b, value, error }
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand on
/// `[a, b]`. Bisects the interval with the largest `|K15 - G7|` until the
/// summed estimate drops below `max(rel_tol * |I|, abs_tol)`.
///
/// Returns `(value, estimated_error)`, or `Err((value, estimated_error))` when
/// the interval budget runs out.
pub fn integrate_adaptive<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> std::result::Result<(Complex64, f64), (Complex64, f64)> {
    let mut heap = BinaryHeap::new();
    let first = kronrod15(&f, a, b);
    let mut total = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > (rel_tol * total.norm()).max(abs_tol) {
        if heap.len() >= MAX_INTERVALS {
            return Err((total, error));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // resum to shed drift from the incremental updates
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    let total = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok((total, error))
}

/// Veltkamp split of `a` into two halves with at most 26 significant bits.
fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Dekker's exact product `a * b = p + e`.
fn exact_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

/// `e^{i z^2}` with the phase `x^2 - y^2` carried in two doubles, so the
/// prefactor stays accurate for `|z|` in the tens.
fn exp_i_square(z: Complex64) -> Complex64 {
    let (xx, xx_err) = exact_product(z.re, z.re);
    let (yy, yy_err) = exact_product(z.im, z.im);
    let (xy, xy_err) = exact_product(z.re, z.im);
    let head = xx - yy;
    // Knuth two-sum error of xx - yy
    let back = head - xx;
    let tail = (xx - (head - back)) + (-yy - back) + (xx_err - yy_err);
    let modulus = (-2.0 * (xy + xy_err)).exp();
    Complex64::from_polar(modulus, head) * Complex64::from_polar(1.0, tail)
}

/// Independent evaluation of `Fr(z)` from its integral definition.
///
/// When `Re(2 e^{3 i pi/4} z) <= 0` the tail `\int_z^\infty e^{i t^2} dt` is
/// taken along the steepest-descent ray `t = z + e^{i pi/4} u`, giving
/// `Fr(z) = e^{i z^2}/sqrt(pi) \int_0^\infty e^{-u^2 + 2 e^{3 i pi/4} z u} du`
/// with a Gaussian-dominated integrand. In the complementary half-plane that
/// integrand peaks at `exp(Re(a)^2 / 4)` and cancels heavily, so the oracle
/// instead uses `Fr(z) = 1/2 - e^{-i pi/4}/sqrt(pi) \int_0^z e^{i t^2} dt`
/// along the segment `[0, z]`.
pub fn fresnel_oracle(z: Complex64, tol: f64) -> Result<Complex64> {
    crate::specfun::ensure_finite(z, "fresnel_oracle")?;
    if !(tol >= 1e-14) {
        return Err(crate::error::domain(format!(
            "fresnel_oracle: tol = {tol:e} must be >= 1e-14"
        )));
    }
    let slope = 2.0 * Complex64::from_polar(1.0, 3.0 * FRAC_PI_4) * z;
    let sqrt_pi = PI.sqrt();

    if slope.re <= 0.0 {
        // |integrand| <= exp(-u^2); beyond u = 9 it is below 1e-35.
        let integrand = |u: f64| (Complex64::new(-u * u, 0.0) + slope * u).exp();
        let (value, _) =
            integrate_adaptive(integrand, 0.0, 9.0, tol, 1e-300).map_err(|(_, estimate)| {
                Error::OracleFailure { z, estimate }
            })?;
        let prefactor = exp_i_square(z) / sqrt_pi;
        if !prefactor.re.is_finite() || !prefactor.im.is_finite() {
            return Err(Error::Overflow { what: "fresnel_oracle", z });
        }
        Ok(prefactor * value)
    } else {
        let z2 = z * z;
        let integrand = |v: f64| (Complex64::i() * z2 * (v * v)).exp();
        let (value, _) =
            integrate_adaptive(integrand, 0.0, 1.0, tol, 1e-300).map_err(|(_, estimate)| {
                Error::OracleFailure { z, estimate }
            })?;
        let segment = Complex64::from_polar(1.0, -FRAC_PI_4) / sqrt_pi * z * value;
        if !segment.re.is_finite() || !segment.im.is_finite() {
            return Err(Error::Overflow { what: "fresnel_oracle", z });
        }
        Ok(Complex64::new(0.5, 0.0) - segment)
    }
}
