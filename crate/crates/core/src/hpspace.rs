//! Geometric meshes, Gauss-Legendre quadrature and `L^2` projection onto
//! piecewise polynomials in an orthonormal Legendre basis.

use crate::amplitudes::{amplitude_v, ShadowConfig};
use crate::error::{domain, Error, Result};
use num_complex::Complex64;

pub const MAX_GAUSS_POINTS: usize = 256;

/// Sorted breakpoints of a 1-D mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub points: Vec<f64>,
    /// Layers of the geometric mesh the points were generated from.
    pub n_layers: usize,
    pub sigma: f64,
}

impl Mesh {
    pub fn n_elements(&self) -> usize {
        self.points.len() - 1
    }

    pub fn elements(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// Length of the largest element.
    pub fn max_element(&self) -> f64 {
        self.elements().map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    /// Index of the element containing `x` (the left one at a breakpoint).
    pub fn locate(&self, x: f64) -> Option<usize> {
        let last = *self.points.last()?;
        if !(x >= self.points[0] && x <= last) {
            return None;
        }
        let idx = self.points.partition_point(|&p| p < x);
        Some(idx.saturating_sub(1).min(self.n_elements() - 1))
    }
}

fn check_grading(n: usize, sigma: f64) -> Result<()> {
    if n == 0 {
        return Err(domain("mesh needs at least one layer"));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(domain(format!("grading sigma = {sigma} must lie in (0, 1)")));
    }
    Ok(())
}

/// `G_n(0, L)`: `x_0 = 0`, `x_i = sigma^{n-i} L`.
pub fn geometric_mesh(length: f64, n: usize, sigma: f64) -> Result<Mesh> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(domain(format!("mesh length {length} must be positive")));
    }
    check_grading(n, sigma)?;
    let mut points = Vec::with_capacity(n + 1);
    points.push(0.0);
    for i in 1..=n {
        points.push(sigma.powi((n - i) as i32) * length);
    }
    Ok(Mesh {
        points,
        n_layers: n,
        sigma,
    })
}

/// Mesh on `[0, L_nc]` graded towards the shadow point from both sides:
/// `({s_SB + G_n} u {s_SB - G_n}) n (0, L_nc) u {0, L_nc}`.
///
/// Points within `1e-12 L_nc` of each other or of an endpoint are merged.
pub fn shadow_mesh(cfg: &ShadowConfig, n: usize, sigma: f64) -> Result<Mesh> {
    let length = cfg.l_nc;
    let base = geometric_mesh(length, n, sigma)?;
    let centre = cfg.s_sb();
    let tol = 1e-12 * length;

    let mut interior: Vec<f64> = base
        .points
        .iter()
        .flat_map(|&x| [centre + x, centre - x])
        .filter(|&x| x > tol && x < length - tol)
        .collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup_by(|later, kept| *later - *kept <= tol);

    let mut points = Vec::with_capacity(interior.len() + 2);
    points.push(0.0);
    points.extend(interior);
    points.push(length);
    Ok(Mesh {
        points,
        n_layers: n,
        sigma,
    })
}

/// `n = max(1, ceil(c p))`.
pub fn layers_for_degree(p: usize, c: f64) -> usize {
    ((c * p as f64).ceil() as usize).max(1)
}

/// Default per-element quadrature order `2p + 16`.
pub fn default_quad_order(p: usize) -> usize {
    2 * p + 16
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut curr) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let j = j as f64;
        let next = ((2.0 * j - 1.0) * x * curr - (j - 1.0) * prev) / j;
        prev = curr;
        curr = next;
    }
    let derivative = n as f64 * (x * curr - prev) / (x * x - 1.0);
    (curr, derivative)
}

/// `m`-point Gauss-Legendre rule on `[-1, 1]` by Newton iteration from
/// Chebyshev-type initial guesses. Nodes ascend.
pub fn gauss_legendre_rule(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 || m > MAX_GAUSS_POINTS {
        return Err(domain(format!(
            "Gauss-Legendre order {m} must lie in 1..={MAX_GAUSS_POINTS}"
        )));
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let n = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(m, x);
            let dx = p / dp;
            x -= dx;
            derivative = dp;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(m, x);
        if dp.is_finite() {
            derivative = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Orthonormal shifted Legendre values `sqrt((2j+1)/(b-a)) P_j(xi)` for
/// `j = 0..=p`, written into `out`.
fn orthonormal_basis(p: usize, xi: f64, width: f64, out: &mut [f64]) {
    let (mut prev, mut curr) = (1.0, xi);
    for (j, slot) in out.iter_mut().enumerate().take(p + 1) {
        let value = match j {
            0 => 1.0,
            1 => xi,
            _ => {
                let jf = j as f64;
                let next = ((2.0 * jf - 1.0) * xi * curr - (jf - 1.0) * prev) / jf;
                prev = curr;
                curr = next;
                next
            }
        };
        *slot = value * ((2 * j + 1) as f64 / width).sqrt();
    }
}

/// Piecewise polynomials of degree `<= degree` on `mesh`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolySpace {
    pub mesh: Mesh,
    pub degree: usize,
}

impl PiecewisePolySpace {
    pub fn new(mesh: Mesh, degree: usize) -> Self {
        Self { mesh, degree }
    }

    pub fn dof(&self) -> usize {
        self.mesh.n_elements() * (self.degree + 1)
    }

    /// Value at `x` of the function with per-element coefficients `coeffs`.
    pub fn evaluate(&self, coeffs: &[Vec<Complex64>], x: f64) -> Result<Complex64> {
        let idx = self
            .mesh
            .locate(x)
            .ok_or_else(|| domain(format!("x = {x} lies outside the mesh")))?;
        let (a, b) = (self.mesh.points[idx], self.mesh.points[idx + 1]);
        let mut basis = vec![0.0; self.degree + 1];
        orthonormal_basis(self.degree, (2.0 * x - a - b) / (b - a), b - a, &mut basis);
        Ok(coeffs[idx]
            .iter()
            .zip(&basis)
            .map(|(c, phi)| c * phi)
            .sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    /// Orthonormal Legendre coefficients, one vector per element.
    pub coefficients: Vec<Vec<Complex64>>,
    pub error_l2: f64,
    pub relative_error: f64,
    pub target_norm: f64,
    pub dof: usize,
}

/// `L^2`-orthogonal projection of `target` onto `space`, element by element,
/// using a `quad_order`-point Gauss rule per element. The error is the
/// quadrature of `|target - projection|^2` at the same nodes.
pub fn l2_project<F>(target: F, space: &PiecewisePolySpace, quad_order: usize) -> Result<ProjectionResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let p = space.degree;
    if quad_order < p + 1 {
        return Err(Error::QuadratureOrder {
            order: quad_order,
            min: p + 1,
        });
    }
    let (nodes, weights) = gauss_legendre_rule(quad_order)?;
    let mut basis = vec![0.0; p + 1];
    let mut values = vec![Complex64::new(0.0, 0.0); quad_order];
    let mut coefficients = Vec::with_capacity(space.mesh.n_elements());
    let mut error_sq = 0.0;
    let mut norm_sq = 0.0;

    for (a, b) in space.mesh.elements() {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (value, &xi) in values.iter_mut().zip(&nodes) {
            *value = target(mid + half * xi)?;
            if !(value.re.is_finite() && value.im.is_finite()) {
                return Err(domain(format!("target is not finite at x = {}", mid + half * xi)));
            }
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); p + 1];
        for ((&xi, &w), value) in nodes.iter().zip(&weights).zip(&values) {
            orthonormal_basis(p, xi, b - a, &mut basis);
            for (c, phi) in coeffs.iter_mut().zip(&basis) {
                *c += value * (w * half * phi);
            }
        }
        for ((&xi, &w), value) in nodes.iter().zip(&weights).zip(&values) {
            orthonormal_basis(p, xi, b - a, &mut basis);
            let approx: Complex64 = coeffs.iter().zip(&basis).map(|(c, phi)| c * phi).sum();
            error_sq += w * half * (value - approx).norm_sqr();
            norm_sq += w * half * value.norm_sqr();
        }
        coefficients.push(coeffs);
    }

    if norm_sq == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let error_l2 = error_sq.sqrt();
    let target_norm = norm_sq.sqrt();
    Ok(ProjectionResult {
        coefficients,
        error_l2,
        relative_error: error_l2 / target_norm,
        target_norm,
        dof: space.dof(),
    })
}

/// Best approximation of `V` from degree-`p` piecewise polynomials on the
/// shadow mesh with `n` layers.
pub fn best_approx_error(
    cfg: &ShadowConfig,
    n: usize,
    sigma: f64,
    p: usize,
    quad_order: usize,
) -> Result<ProjectionResult> {
    let mesh = shadow_mesh(cfg, n, sigma)?;
    let space = PiecewisePolySpace::new(mesh, p);
    l2_project(|s| amplitude_v(s, cfg), &space, quad_order)
}

/// Bernstein-ellipse parameter `rho > 1` of the ellipse with foci `a`, `b`
/// passing through `point`.
pub fn bernstein_rho(a: f64, b: f64, point: Complex64) -> f64 {
    let xi = (2.0 * point - a - b) / (b - a);
    let root = (xi * xi - 1.0).sqrt();
    (xi + root).norm().max((xi - root).norm())
}

/// `rho = 1/eps + sqrt(1/eps^2 - 1)` for an ellipse of eccentricity `eps`.
pub fn rho_from_eccentricity(eps: f64) -> f64 {
    1.0 / eps + (1.0 / (eps * eps) - 1.0).sqrt()
}

/// Sup-norm bound `2 rho^{-p} M / (rho - 1)` on the degree-`p` best
/// approximation of a function bounded by `m_bound` inside the ellipse.
pub fn bernstein_bound(rho: f64, p: usize, m_bound: f64) -> f64 {
    2.0 * rho.powi(-(p as i32)) * m_bound / (rho - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn geometric_mesh_examples() {
        assert_eq!(geometric_mesh(1.0, 2, 0.15).unwrap().points, vec![0.0, 0.15, 1.0]);
        assert_eq!(geometric_mesh(1.0, 1, 0.15).unwrap().points, vec![0.0, 1.0]);
        let mesh = geometric_mesh(1.5, 3, 0.15).unwrap();
        let expected = [0.0, 0.033_75, 0.225, 1.5];
        for (x, e) in mesh.points.iter().zip(expected) {
            assert!((x - e).abs() < 1e-16);
        }
        assert!(geometric_mesh(1.0, 0, 0.15).is_err());
        assert!(geometric_mesh(1.0, 2, 1.0).is_err());
        assert!(geometric_mesh(-1.0, 2, 0.5).is_err());
    }

    #[test]
    fn shadow_mesh_examples() {
        let normal = ShadowConfig::new(16.0, PI, 1.5, 1.0).unwrap();
        let mesh = shadow_mesh(&normal, 2, 0.15).unwrap();
        assert_eq!(mesh.points.len(), 3);
        for (x, e) in mesh.points.iter().zip([0.0, 0.225, 1.5]) {
            assert!((x - e).abs() < 1e-15);
        }

        let cfg = ShadowConfig::new(16.0, 3.0 * PI / 4.0, 1.5, 1.0).unwrap();
        let mesh = shadow_mesh(&cfg, 1, 0.15).unwrap();
        assert_eq!(mesh.points.len(), 3);
        assert!((mesh.points[1] - 1.0).abs() < 1e-15);

        // shadow point far outside: only left-translated points survive
        let far = ShadowConfig::new(16.0, PI / 2.0 + 0.2, 1.5, 1.0).unwrap();
        assert!(far.s_sb() > 3.0);
        let mesh = shadow_mesh(&far, 4, 0.15).unwrap();
        assert_eq!(mesh.points[0], 0.0);
        assert_eq!(*mesh.points.last().unwrap(), 1.5);
        assert!(mesh.points.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mesh_point_at_the_midpoint() {
        let alpha = PI / 2.0 + (4.0f64 / 9.0).atan();
        let cfg = ShadowConfig::new(16.0, alpha, 1.5, 1.0).unwrap();
        let mesh = shadow_mesh(&cfg, 8, 0.15).unwrap();
        assert!(mesh.points.iter().any(|&x| (x - 0.75).abs() < 1e-12));
    }

    #[test]
    fn locate_finds_elements() {
        let mesh = geometric_mesh(1.0, 3, 0.5).unwrap();
        assert_eq!(mesh.locate(0.0), Some(0));
        assert_eq!(mesh.locate(0.3), Some(1));
        assert_eq!(mesh.locate(1.0), Some(2));
        assert_eq!(mesh.locate(1.1), None);
    }

    #[test]
    fn gauss_rule_examples() {
        let (x, w) = gauss_legendre_rule(1).unwrap();
        assert_eq!((x[0], w[0]), (0.0, 2.0));
        let (x, w) = gauss_legendre_rule(2).unwrap();
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15 && x[0] == -x[1]);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre_rule(3).unwrap();
        let quartic: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((quartic - 0.4).abs() < 1e-14);
        assert!(gauss_legendre_rule(0).is_err());
        assert!(gauss_legendre_rule(257).is_err());
    }

    #[test]
    fn gauss_rules_integrate_monomials_exactly() {
        for m in [1, 2, 5, 16, 40, 100, 256] {
            let (x, w) = gauss_legendre_rule(m).unwrap();
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for deg in 0..(2 * m).min(60) {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() <= 1e-13, "m={m} deg={deg}: {approx} vs {exact}");
            }
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        let (x, w) = gauss_legendre_rule(30).unwrap();
        let (a, b) = (0.3, 1.7);
        let p = 12;
        let mut gram = vec![vec![0.0; p + 1]; p + 1];
        let mut basis = vec![0.0; p + 1];
        for (&xi, &wi) in x.iter().zip(&w) {
            orthonormal_basis(p, xi, b - a, &mut basis);
            for i in 0..=p {
                for j in 0..=p {
                    gram[i][j] += wi * 0.5 * (b - a) * basis[i] * basis[j];
                }
            }
        }
        for (i, row) in gram.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((entry - expected).abs() < 1e-13);
            }
        }
    }

    fn sample_space(p: usize) -> PiecewisePolySpace {
        PiecewisePolySpace::new(geometric_mesh(1.5, 4, 0.3).unwrap(), p)
    }

    #[test]
    fn projection_reproduces_polynomials() {
        let space = sample_space(5);
        let poly = |x: f64| Ok(c(1.0 - 2.0 * x + x.powi(5), 0.5 * x * x - x.powi(3)));
        let result = l2_project(poly, &space, default_quad_order(5)).unwrap();
        assert!(result.error_l2 <= 1e-12 * result.target_norm);
        assert_eq!(result.dof, 4 * 6);
        for &x in &[0.0, 0.1, 0.7, 1.5] {
            let value = space.evaluate(&result.coefficients, x).unwrap();
            assert!((value - poly(x).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn projection_errors() {
        let space = sample_space(5);
        let err = l2_project(|_| Ok(c(1.0, 0.0)), &space, 5).unwrap_err();
        assert_eq!(err, Error::QuadratureOrder { order: 5, min: 6 });
        let err = l2_project(|_| Ok(c(0.0, 0.0)), &space, 20).unwrap_err();
        assert_eq!(err, Error::ZeroNorm);
        let err = l2_project(|_| Ok(c(f64::NAN, 0.0)), &space, 20).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn quadrature_doubling_is_converged() {
        let space = sample_space(6);
        let target = |x: f64| Ok(Complex64::cis(7.0 * x) / (x + 0.2));
        let base = l2_project(target, &space, default_quad_order(6)).unwrap();
        let doubled = l2_project(target, &space, 2 * default_quad_order(6)).unwrap();
        assert!((base.error_l2 - doubled.error_l2).abs() <= 1e-10 * doubled.error_l2);
    }

    #[test]
    fn pole_target_obeys_the_bernstein_bound() {
        for &pole in &[c(1.2, 0.0), c(-0.5, 0.0), c(0.5, 0.5)] {
            let rho = bernstein_rho(0.0, 1.0, pole);
            // the target is analytic inside any smaller ellipse
            let inner = 1.0 + 0.9 * (rho - 1.0);
            let m_bound = 1.0 / distance_to_ellipse(pole, inner);
            for p in [2, 6, 10] {
                let space = PiecewisePolySpace::new(geometric_mesh(1.0, 1, 0.5).unwrap(), p);
                let result = l2_project(|x| Ok(1.0 / (x - pole)), &space, 60).unwrap();
                assert!(result.error_l2 <= bernstein_bound(inner, p, m_bound));
            }
        }
    }

    /// Smallest distance from `point` to the ellipse with foci 0, 1 and
    /// parameter `rho`, by dense sampling.
    fn distance_to_ellipse(point: Complex64, rho: f64) -> f64 {
        (0..4000)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 4000.0;
                let z = 0.5 * Complex64::from_polar(rho, t) + 0.5 * Complex64::from_polar(1.0 / rho, -t);
                (0.5 + 0.5 * z - point).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn bernstein_parameters() {
        assert!((bernstein_rho(0.0, 1.0, c(-0.5, 0.0)) - (2.0 + 3f64.sqrt())).abs() < 1e-14);
        assert!((bernstein_rho(0.0, 1.0, c(0.5, 0.5)) - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        // semi-major axis (rho + 1/rho)/2 = 1/eps
        let rho = rho_from_eccentricity(0.6);
        assert!(((rho + 1.0 / rho) / 2.0 - 1.0 / 0.6).abs() < 1e-14);
    }

    #[test]
    fn layer_rule() {
        assert_eq!(layers_for_degree(0, 1.0), 1);
        assert_eq!(layers_for_degree(7, 1.0), 7);
        assert_eq!(layers_for_degree(7, 0.5), 4);
    }

    #[test]
    fn best_approximation_converges() {
        let cfg = ShadowConfig::new(16.0, 3.0 * PI / 4.0, 1.5, 1.0).unwrap();
        let mut previous = f64::INFINITY;
        for p in [2, 6, 12] {
            let result = best_approx_error(&cfg, p, 0.15, p, default_quad_order(p)).unwrap();
            assert!(result.relative_error < previous);
            previous = result.relative_error;
        }
        assert!(previous <= 1e-6, "p = 12 relative error {previous:e}");
    }

    #[test]
    fn error_is_monotone_in_degree_on_a_fixed_mesh() {
        let cfg = ShadowConfig::new(16.0, 3.0 * PI / 4.0, 1.5, 1.0).unwrap();
        let mut previous = f64::INFINITY;
        for p in 0..=10 {
            let result = best_approx_error(&cfg, 6, 0.15, p, default_quad_order(10)).unwrap();
            assert!(result.error_l2 <= previous * (1.0 + 1e-12));
            assert_eq!(result.dof, shadow_mesh(&cfg, 6, 0.15).unwrap().n_elements() * (p + 1));
            previous = result.error_l2;
        }
    }

    proptest! {
        #[test]
        fn projection_is_idempotent_and_orthogonal(
            freq in 0.5..20.0f64,
            shift in 0.05..2.0f64,
            p in 0usize..9,
        ) {
            let space = sample_space(p);
            let target = |x: f64| Ok(Complex64::cis(freq * x) / (x + shift));
            let first = l2_project(target, &space, default_quad_order(p)).unwrap();
            let again = l2_project(
                |x| space.evaluate(&first.coefficients, x),
                &space,
                default_quad_order(p),
            ).unwrap();
            let scale = first.target_norm;
            for (u, v) in first.coefficients.iter().flatten().zip(again.coefficients.iter().flatten()) {
                prop_assert!((u - v).norm() <= 1e-13 * scale.max(1.0));
            }
            let projection_sq = first.target_norm.powi(2) - first.error_l2.powi(2);
            let coeff_sq: f64 = first.coefficients.iter().flatten().map(|c| c.norm_sqr()).sum();
            prop_assert!((projection_sq - coeff_sq).abs() <= 1e-10 * first.target_norm.powi(2));
        }

        #[test]
        fn mesh_invariants(alpha in 1.58..4.7f64, n in 1usize..14, sigma in 0.05..0.9f64) {
            let cfg = ShadowConfig::new(16.0, alpha, 1.5, 1.0).unwrap();
            let mesh = shadow_mesh(&cfg, n, sigma).unwrap();
            prop_assert_eq!(mesh.points[0], 0.0);
            prop_assert_eq!(*mesh.points.last().unwrap(), 1.5);
            prop_assert!(mesh.points.windows(2).all(|w| w[1] - w[0] > 1e-12 * 1.5));
        }
    }
}
