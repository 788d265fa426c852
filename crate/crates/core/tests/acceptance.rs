//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowhp::amplitudes::{
    de_dn_check, e_field, e_remainder_check, g_of_s, psi_total, FieldPoint, ShadowConfig,
};
use shadowhp::experiments::{
    dof_for, fit_rate, fit_rows, interior_alphas, partial_illumination_alpha, run_grid,
    ExperimentGrid,
};
use shadowhp::geometry::KnifeGeometry;
use shadowhp::hpspace::{
    bernstein_rho, default_quad_order, geometric_mesh, l2_project, PiecewisePolySpace,
};
use shadowhp::specfun::{big_f, fresnel_fr, fresnel_oracle, sector_bound_cert};
use shadowhp::Complex64;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fresnel_oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..21 {
        for j in 0..21 {
            let z = c(-3.0 + 0.3 * i as f64, -3.0 + 0.3 * j as f64);
            let value = fresnel_fr(z).map_err(|e| e.to_string())?;
            let oracle = fresnel_oracle(z, 1e-14).map_err(|e| e.to_string())?;
            worst = worst.max((value - oracle).norm() / oracle.norm());
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-12 && seconds < 10.0,
        format!("max relative error {worst:.2e} on 21x21, {seconds:.2}s"),
    )
}

fn symmetry_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = [0.0f64; 5];
    for _ in 0..1000 {
        // Fresnel identities relative to the size of the terms, which grow
        // like e^{|z|^2} in the unbounded sector
        let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let fr = fresnel_fr(z).unwrap();
        let sum = fr + fresnel_fr(-z).unwrap();
        worst[0] = worst[0].max((sum - 1.0).norm() / fr.norm().max(1.0));
        let plane = (-Complex64::i() * z * z).exp();
        let f = big_f(z).unwrap();
        let sum = f + big_f(-z).unwrap();
        worst[1] = worst[1].max((sum - plane).norm() / plane.norm().max(f.norm()).max(1.0));

        let (r, psi, k) = (rng.gen_range(0.0..5.0), rng.gen_range(-2.0 * PI..2.0 * PI), rng.gen_range(0.5..20.0));
        let at = |angle: f64| e_field(FieldPoint::new(r, angle).unwrap(), k).unwrap();
        worst[2] = worst[2].max((at(-psi) - at(psi)).norm());
        let shifted = Complex64::cis(-k * r * psi.cos()) - at(psi);
        worst[3] = worst[3].max((at(psi + 2.0 * PI) - shifted).norm());

        let geo = KnifeGeometry::new(rng.gen_range(0.5..2.0), rng.gen_range(0.1..PI - 0.1)).unwrap();
        let mirror = KnifeGeometry::new(geo.edge_distance, PI - geo.beta).unwrap();
        let s = c(rng.gen_range(0.01..3.0), rng.gen_range(-0.3..0.3) * geo.beta.sin());
        let k = rng.gen_range(0.5..20.0);
        let lhs = g_of_s(-s, &geo, k).unwrap();
        let rhs = g_of_s(s, &mirror, k).unwrap();
        worst[4] = worst[4].max((lhs - rhs).norm() / rhs.norm().max(1.0));
    }
    check(
        worst.iter().all(|&w| w <= 1e-12),
        format!(
            "Fr {:.1e}, F {:.1e}, E even {:.1e}, E shift {:.1e}, g mirror {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn decomposition_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for &k in &[1.0, 10.0, 100.0] {
        for i in 0..50 {
            // log-spaced radii on [1e-3, 20]
            let r = 1e-3 * (20.0f64 / 1e-3).powf(i as f64 / 49.0);
            let mut angles: Vec<f64> = (0..50).map(|j| 2.0 * PI * (j as f64 + 0.5) / 50.0).collect();
            angles.push(PI);
            for psi in angles {
                let residual = e_remainder_check(FieldPoint::new(r, psi).unwrap(), k).map_err(|e| e.to_string())?;
                worst = worst.max(residual);
                points += 1;
            }
        }
    }
    check(worst <= 1e-12, format!("max residual {worst:.2e} over {points} points"))
}

fn normal_derivative_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let s = rng.gen_range(0.05..3.0);
        let geo = KnifeGeometry::new(rng.gen_range(0.5..2.0), rng.gen_range(0.1..PI - 0.1)).unwrap();
        let k = rng.gen_range(1.0..20.0);
        worst = worst.max(de_dn_check(s, &geo, k, 1e-6).map_err(|e| e.to_string())?);
    }
    check(worst <= 1e-6, format!("max residual {worst:.2e} over 200 samples"))
}

fn sector_bounds() -> Outcome {
    let cert = sector_bound_cert(10_000).map_err(|e| e.to_string())?;
    check(
        cert.max_observed <= 1.59 && (1.10..=1.25).contains(&cert.max_observed),
        format!(
            "max |F| = {:.5} at {}, {} growth points within bounds",
            cert.max_observed, cert.argmax, cert.growth_samples
        ),
    )
}

/// One-sided value and derivative at `s0` from a cubic through
/// `s0 + j h`, `j = 1..=4` (negative `h` for the left side).
fn one_sided(f: impl Fn(f64) -> Complex64, s0: f64, h: f64) -> (Complex64, Complex64) {
    let v: Vec<Complex64> = (1..=4).map(|j| f(s0 + j as f64 * h)).collect();
    let value = 4.0 * v[0] - 6.0 * v[1] + 4.0 * v[2] - v[3];
    let slope = (-26.0 * v[0] + 57.0 * v[1] - 42.0 * v[2] + 11.0 * v[3]) / (6.0 * h);
    (value, slope)
}

fn shadow_boundary_continuity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut value_gap, mut slope_gap) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let k = rng.gen_range(4.0..256.0);
        // the shadow point lies inside the side only past partial illumination
        let alpha = rng.gen_range(partial_illumination_alpha(1.5, 1.0) + 0.01..PI - 0.01);
        let cfg = ShadowConfig::new(k, alpha, 1.5, 1.0).unwrap();
        let s0 = cfg.s_sb();
        let h = 1e-3 / k;
        let field = |s: f64| psi_total(s, &cfg).unwrap();
        let (left, left_slope) = one_sided(field, s0, -h);
        let (right, right_slope) = one_sided(field, s0, h);
        value_gap = value_gap.max((left - right).norm());
        slope_gap = slope_gap.max((left_slope - right_slope).norm());
    }
    check(
        value_gap <= 1e-6 && slope_gap <= 1e-3,
        format!("value gap {value_gap:.2e}, derivative gap {slope_gap:.2e}"),
    )
}

fn convergence_study() -> Outcome {
    let start = Instant::now();
    let alpha = 3.0 * PI / 4.0;
    let base = ExperimentGrid {
        k_values: vec![16.0],
        alpha_values: vec![alpha],
        p_values: (2..=10).collect(),
        ..ExperimentGrid::default()
    };
    let rows = run_grid(&base, None).map_err(|e| e.to_string())?;
    let fit = fit_rows(&rows, 16.0, alpha, 2..=10).map_err(|e| e.to_string())?;
    let rate_ok = fit.tau >= 0.3 && fit.r_squared >= 0.95;

    let sweep = ExperimentGrid {
        k_values: vec![16.0],
        alpha_values: interior_alphas(32),
        p_values: vec![8],
        ..ExperimentGrid::default()
    };
    let rows = run_grid(&sweep, None).map_err(|e| e.to_string())?;
    let mut errors: Vec<f64> = rows.iter().map(|r| r.relative_error).collect();
    errors.sort_by(f64::total_cmp);
    let all_finite = errors.iter().all(|e| e.is_finite());
    let median = 0.5 * (errors[15] + errors[16]);
    let max = errors[31];
    let uniform_ok = all_finite && max <= 10.0 * median;

    let ladder = ExperimentGrid {
        alpha_values: vec![alpha],
        p_values: vec![8],
        ..ExperimentGrid::default()
    };
    let rows = run_grid(&ladder, None).map_err(|e| e.to_string())?;
    let by_k: Vec<f64> = rows.iter().map(|r| r.relative_error).collect();
    let k_spread = by_k.iter().cloned().fold(0.0, f64::max) / by_k.iter().cloned().fold(f64::INFINITY, f64::min);
    let k_ok = k_spread <= 100.0;

    let critical = partial_illumination_alpha(1.5, 1.0);
    let dof_at = |a: f64| dof_for(&ShadowConfig::new(16.0, a, 1.5, 1.0).unwrap(), 8, 0.15, 1.0).unwrap();
    let (before, after) = (dof_at(critical - 0.02), dof_at(critical + 0.02));
    let dof_ok = after > before;

    let seconds = start.elapsed().as_secs_f64();
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    check(
        rate_ok && uniform_ok && k_ok && dof_ok && seconds < 300.0,
        format!(
            "(a) {} tau {:.3} r2 {:.4}; (b) {} max/median {:.2}; (c) {} k spread {:.2}; (d) {} dof {} -> {}; {:.1}s",
            mark(rate_ok),
            fit.tau,
            fit.r_squared,
            mark(uniform_ok),
            max / median,
            mark(k_ok),
            k_spread,
            mark(dof_ok),
            before,
            after,
            seconds
        ),
    )
}

fn bernstein_rate_witness() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for pole in [c(1.2, 0.0), c(-0.5, 0.0), c(0.5, 0.5)] {
        let rho = bernstein_rho(0.0, 1.0, pole);
        let points: Vec<(usize, f64)> = (2..=14)
            .map(|p| {
                let space = PiecewisePolySpace::new(geometric_mesh(1.0, 1, 0.5).unwrap(), p);
                let result = l2_project(|x| Ok(1.0 / (x - pole)), &space, 80).unwrap();
                (p, result.error_l2)
            })
            .collect();
        let fit = fit_rate(&points).map_err(|e| e.to_string())?;
        let predicted = rho.ln();
        let deviation = (fit.tau - predicted).abs() / predicted;
        ok &= deviation <= 0.1;
        details.push(format!("c={pole}: slope {:.3} vs log rho {:.3}", -fit.tau, -predicted));
    }
    check(ok, details.join("; "))
}

fn projection_algebra() -> Outcome {
    let cfg = ShadowConfig::new(16.0, 3.0 * PI / 4.0, 1.5, 1.0).unwrap();
    let mesh = shadowhp::hpspace::shadow_mesh(&cfg, 6, 0.15).unwrap();
    let (mut idem, mut pyth, mut repro) = (0.0f64, 0.0f64, 0.0f64);
    for p in [0, 3, 6, 10] {
        let space = PiecewisePolySpace::new(mesh.clone(), p);
        let quad = default_quad_order(p);
        let target = |s: f64| shadowhp::amplitudes::amplitude_v(s, &cfg);
        let first = l2_project(target, &space, quad).unwrap();
        let again = l2_project(|s| space.evaluate(&first.coefficients, s), &space, quad).unwrap();
        for (a, b) in first.coefficients.iter().flatten().zip(again.coefficients.iter().flatten()) {
            idem = idem.max((a - b).norm() / first.target_norm);
        }
        let coeff_sq: f64 = first.coefficients.iter().flatten().map(|c| c.norm_sqr()).sum();
        let total = first.target_norm.powi(2);
        pyth = pyth.max((total - coeff_sq - first.error_l2.powi(2)).abs() / total);

        let linear = if p >= 1 { 1.0 } else { 0.0 };
        let poly = |s: f64| Ok(Complex64::new(1.0, 0.5) * s.powi(p as i32) + 2.0 - linear * s);
        let result = l2_project(poly, &space, quad).unwrap();
        repro = repro.max(result.error_l2 / result.target_norm);
    }
    check(
        idem <= 1e-13 && pyth <= 1e-10 && repro <= 1e-12,
        format!("idempotence {idem:.1e}, Pythagoras {pyth:.1e}, reproduction {repro:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1 Fresnel oracle agreement", fresnel_oracle_agreement),
        ("AC2 symmetry suites", symmetry_suites),
        ("AC3 edge-field decomposition", decomposition_identity),
        ("AC4 normal-derivative decomposition", normal_derivative_identity),
        ("AC5 sector bounds on F", sector_bounds),
        ("AC6 smoothness across the shadow boundary", shadow_boundary_continuity),
        ("AC7 convergence study", convergence_study),
        ("AC8 Bernstein rate witness", bernstein_rate_witness),
        ("AC9 projection algebra", projection_algebra),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
