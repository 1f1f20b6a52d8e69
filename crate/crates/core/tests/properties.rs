//! Property tests over random parameters for the invariants of the modes,
//! the step map, the quadrature and the flow.

use std::f64::consts::PI;

use proptest::prelude::*;

use kleinflow::cli::output::fmt_num;
use kleinflow::diagnostics::{current_divergence, dirac_residual};
use kleinflow::dispersion::{group_velocity, omega_bar, omega_cap, s_map};
use kleinflow::flow::{crossing_pairs, integrate_trajectory, ConstantVelocity, IntegratorConfig, NearStepCap};
use kleinflow::free_modes::{plane_wave_current, spinor_u, spinor_v, FreeMode};
use kleinflow::packets::{reflected_amplitude, transmitted_amplitude, GaussianAmplitude};
use kleinflow::quadrature::QuadratureRule;
use kleinflow::spinor::{current_of, gamma1, lorentz_inner, scalar_inner};
use kleinflow::step_modes::{closed_form_position, closed_form_trajectory, make_step_mode, StepMode};
use kleinflow::{PhysicalParams, SpacetimePoint};

fn params() -> impl Strategy<Value = PhysicalParams> {
    (0.5..2.0f64, 2.05..6.0f64).prop_map(|(kappa, ratio)| PhysicalParams::new(kappa, ratio * kappa).unwrap())
}

/// A step height and a wave number strictly inside its Klein window.
fn klein_mode() -> impl Strategy<Value = StepMode> {
    (params(), 0.01..0.99f64).prop_map(|(p, frac)| make_step_mode(frac * p.klein_k_max().unwrap(), &p).unwrap())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dispersion_relations(p in params(), k in -20.0..20.0f64) {
        let w = omega_bar(k, &p);
        prop_assert!(w >= p.kappa);
        prop_assert!(group_velocity(k, &p).abs() < 1.0);
        // Ω(k)Ω(−k) = κ and Ω(k)² + Ω(−k)² = 2ω̄
        let (a, b) = (omega_cap(k, &p), omega_cap(-k, &p));
        prop_assert!(close(a * b, p.kappa, 1e-12));
        prop_assert!(close(a * a + b * b, 2.0 * w, 1e-12));
    }

    #[test]
    fn step_map_is_a_decreasing_energy_splitting_involution(p in params(), f1 in 0.01..0.99f64, f2 in 0.01..0.99f64) {
        let upper = (p.height * p.height - 2.0 * p.kappa * p.height).sqrt();
        let (k1, k2) = (f1 * upper, f2 * upper);
        let (q1, q2) = (s_map(k1, &p).unwrap(), s_map(k2, &p).unwrap());
        prop_assert!(close(s_map(q1, &p).unwrap(), k1, 1e-9));
        prop_assert!(close(omega_bar(k1, &p) + omega_bar(q1, &p), p.height, 1e-12));
        if k1 < k2 {
            prop_assert!(q1 > q2);
        }
    }

    #[test]
    fn plane_wave_spinor_relations(p in params(), k in -5.0..5.0f64) {
        let w = omega_bar(k, &p);
        let (u, um, v, vm) = (spinor_u(k, &p), spinor_u(-k, &p), spinor_v(k, &p), spinor_v(-k, &p));
        let tol = 1e-12 * w;
        prop_assert!((scalar_inner(u, u).re - 2.0 * w).abs() < tol);
        prop_assert!((scalar_inner(u, um).re - 2.0 * p.kappa).abs() < tol);
        prop_assert!((scalar_inner(v, vm).re - 2.0 * p.kappa).abs() < tol);
        prop_assert!((lorentz_inner(u, gamma1(u)).re - 2.0 * k).abs() < tol);
        prop_assert!(lorentz_inner(v, gamma1(vm)).norm() < tol);
        // U_k has constant current proportional to (ω̄, k)
        let m = FreeMode::u(k, p);
        let j = current_of(m.eval(SpacetimePoint::new(1.3, -0.7)));
        let c = plane_wave_current(k, &p);
        prop_assert!(close(j.j0, c.j0, 1e-12) && (j.j1 - c.j1).abs() < 1e-12 * c.j0);
    }

    #[test]
    fn free_modes_solve_the_free_equation(p in params(), k in -3.0..3.0f64, x0 in -50.0..50.0f64, x1 in -50.0..50.0f64) {
        let free = PhysicalParams::new(p.kappa, 0.0).unwrap();
        let pt = SpacetimePoint::new(x0, x1);
        for m in [FreeMode::u(k, p), FreeMode::v(k, p)] {
            prop_assert!(dirac_residual(|x| m.eval(x), pt, 1e-4, &free) < 1e-6);
        }
    }

    #[test]
    fn step_coefficients(m in klein_mode()) {
        prop_assert!(m.r > -1.0 && m.r < 0.0);
        prop_assert!(m.t < 0.0);
        prop_assert!(close(m.reflection() + m.transmission(), 1.0, 1e-11));
        let k = m.params.kappa;
        prop_assert!(close(m.omega_k() * (1.0 + m.r * m.r) + 2.0 * k * m.r, m.omega_q() * m.t * m.t, 1e-10));
    }

    #[test]
    fn step_current_is_timelike_and_matches_the_spinor(m in klein_mode(), x0 in -100.0..100.0f64, x1 in -100.0..100.0f64) {
        let pt = SpacetimePoint::new(x0, x1);
        let j = m.current(pt);
        let direct = current_of(m.eval(pt));
        prop_assert!(close(j.j0, direct.j0, 1e-10) && close(j.j1, direct.j1, 1e-10));
        prop_assert!(j.j0 > 0.0);
        let bound = m.t.powi(4) * m.params.kappa.powi(2) / (PI * PI);
        prop_assert!(j.minkowski_square() >= bound * (1.0 - 1e-9));
        prop_assert!(j.j1 > 0.0, "x¹ increases along every trajectory");
        prop_assert!(dirac_residual(|x| m.eval(x), pt, 1e-4, &m.params) < 1e-6 * (1.0 + m.params.height));
    }

    #[test]
    fn step_current_is_divergence_free_across_the_step(m in klein_mode(), x0 in -10.0..10.0f64, x1 in -2.0..2.0f64) {
        let d = current_divergence(&m, SpacetimePoint::new(x0, x1), 1e-3);
        prop_assert!(d.abs() < 1e-6, "{d}");
    }

    #[test]
    fn closed_form_is_invertible_and_time_shift_covariant(m in klein_mode(), tau in -50.0..50.0f64, x1 in -50.0..50.0f64) {
        let x0 = closed_form_trajectory(&m, tau, x1);
        prop_assert!((closed_form_trajectory(&m, 0.0, x1) + tau - x0).abs() < 1e-9 * (1.0 + x0.abs()));
        prop_assert!((closed_form_position(&m, tau, x0) - x1).abs() < 1e-7 * (1.0 + x1.abs()));
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials(n in 2usize..40, coeffs in prop::collection::vec(-1.0..1.0f64, 1..80)) {
        let rule = QuadratureRule::gauss_legendre(n);
        let deg = (2 * n - 1).min(coeffs.len() - 1);
        let c = &coeffs[..=deg];
        let poly = |x: f64| c.iter().rev().fold(0.0, |acc, &a| acc * x + a);
        let exact: f64 = c.iter().enumerate().filter(|(i, _)| i % 2 == 0).map(|(i, a)| 2.0 * a / (i + 1) as f64).sum();
        prop_assert!((rule.integrate(-1.0, 1.0, poly) - exact).abs() < 1e-13 * (1.0 + c.len() as f64));
    }

    #[test]
    fn amplitude_maps(center in 0.5..2.2f64, width in 0.02..0.1f64, frac in 0.0..1.0f64) {
        let p = PhysicalParams::with_height(4.0);
        let a = GaussianAmplitude::new(center, width).unwrap().profile();
        let k = a.k1 + frac * (a.k2 - a.k1);
        let ar = reflected_amplitude(&a, &p).unwrap();
        let at = transmitted_amplitude(&a, &p).unwrap();
        let m = make_step_mode(k, &p).unwrap();
        prop_assert!((ar.k1, ar.k2) == (-a.k2, -a.k1));
        prop_assert!((ar.eval(-k) - a.eval(k) * m.r).norm() < 1e-14);
        prop_assert!(ar.eval(-k).norm() < a.eval(k).norm() || a.eval(k).norm() == 0.0);
        let q = m.q;
        prop_assert!(q >= at.k1 - 1e-12 && q <= at.k2 + 1e-12);
        prop_assert!((at.eval(q) - a.eval(k) * (q / k * m.t)).norm() < 1e-9 * (1.0 + at.eval(q).norm()));
    }

    #[test]
    fn constant_fields_integrate_exactly(v in -0.99..0.99f64, x1 in -10.0..10.0f64, t in -5.0..5.0f64) {
        let cfg = IntegratorConfig::with_span(-10.0, 10.0);
        let traj = integrate_trajectory(&ConstantVelocity(v), SpacetimePoint::new(t, x1), &cfg).unwrap();
        prop_assert!(traj.samples.windows(2).all(|w| w[0].x0 < w[1].x0));
        for s in &traj.samples {
            prop_assert!((s.x1 - (x1 + v * (s.x0 - t))).abs() < 1e-11);
        }
    }

    #[test]
    fn csv_numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn plane_trajectories_never_cross(m in klein_mode(), dtau in 0.5..20.0f64) {
        let mut cfg = IntegratorConfig::with_span(-100.0, 100.0);
        cfg.near_step = Some(NearStepCap::for_wave_numbers(m.k, m.k.max(m.q)));
        let a = integrate_trajectory(&m, SpacetimePoint::new(0.0, 0.0), &cfg).unwrap();
        let b = integrate_trajectory(&m, SpacetimePoint::new(dtau, 0.0), &cfg).unwrap();
        prop_assert!(crossing_pairs(&[a.clone(), b], 2000).is_empty());
        prop_assert!(a.samples.windows(2).all(|w| w[0].x1 < w[1].x1));
        prop_assert!(a.max_speed() < 1.0);
    }
}
