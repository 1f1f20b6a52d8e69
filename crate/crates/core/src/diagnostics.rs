//! Verification quantities: Dirac residuals, current divergence,
//! probability in intervals, localization sweeps and the reflection /
//! transmission budget of a step packet.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::{omega_bar, PhysicalParams};
use crate::error::{Error, Result};
use crate::flow::CurrentField;
use crate::packets::{
    density_integral, reflected_amplitude, transmitted_amplitude, AmplitudeProfile, PacketField,
    DEFAULT_CONVERGENCE_TOL,
};
use crate::quadrature::{QuadratureRule, SpatialQuadrature};
use crate::spinor::{SpacetimePoint, Spinor};

/// Extra reach beyond the localization window used for half-infinite
/// intervals; tails of hard-cut amplitudes decay like `1/x²`.
pub const TAIL_REACH: f64 = 2000.0;

/// Largest component of `i∂₀ψ − Hψ` with `H` the step Hamiltonian (`V = 0`
/// gives the free equation), derivatives by central differences of step `h`.
pub fn dirac_residual(psi: impl Fn(SpacetimePoint) -> Spinor, pt: SpacetimePoint, h: f64, p: &PhysicalParams) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    let d0 = (psi(SpacetimePoint::new(pt.x0 + h, pt.x1)) - psi(SpacetimePoint::new(pt.x0 - h, pt.x1))) * (0.5 / h);
    let d1 = (psi(SpacetimePoint::new(pt.x0, pt.x1 + h)) - psi(SpacetimePoint::new(pt.x0, pt.x1 - h))) * (0.5 / h);
    let s = psi(pt);
    let pot = if pt.x1 >= 0.0 { p.height } else { 0.0 };
    let r1 = i * d0.c1 - (-i * d1.c1 + s.c1 * pot + s.c2 * p.kappa);
    let r2 = i * d0.c2 - (s.c1 * p.kappa + i * d1.c2 + s.c2 * pot);
    r1.norm().max(r2.norm())
}

/// `∂₀j⁰ + ∂₁j¹` by central differences of step `h`.
pub fn current_divergence<F: CurrentField + ?Sized>(field: &F, pt: SpacetimePoint, h: f64) -> f64 {
    let t_plus = field.current_at(SpacetimePoint::new(pt.x0 + h, pt.x1)).j0;
    let t_minus = field.current_at(SpacetimePoint::new(pt.x0 - h, pt.x1)).j0;
    let x_plus = field.current_at(SpacetimePoint::new(pt.x0, pt.x1 + h)).j1;
    let x_minus = field.current_at(SpacetimePoint::new(pt.x0, pt.x1 - h)).j1;
    (t_plus - t_minus + x_plus - x_minus) / (2.0 * h)
}

/// Finite stand-ins for infinite interval ends.
fn resolve_interval(field: &PacketField, tau: f64, interval: (f64, f64)) -> (f64, f64) {
    let (wlo, whi) = field.localization_window(tau);
    let lo = if interval.0 == f64::NEG_INFINITY { wlo.min(interval.1) - TAIL_REACH } else { interval.0 };
    let hi = if interval.1 == f64::INFINITY { whi.max(interval.0) + TAIL_REACH } else { interval.1 };
    (lo, hi)
}

/// `∫_lo^hi j⁰(τ, ξ) dξ / ‖ψ‖²`; infinite ends are allowed.
pub fn probability_in_interval(
    field: &PacketField,
    tau: f64,
    interval: (f64, f64),
    spatial: &SpatialQuadrature,
) -> Result<f64> {
    let norm_sq = field.norm_sq_kspace();
    if norm_sq <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let (lo, hi) = resolve_interval(field, tau, interval);
    if hi <= lo {
        return Ok(0.0);
    }
    field.eval_checked(SpacetimePoint::new(tau, lo), DEFAULT_CONVERGENCE_TOL)?;
    field.eval_checked(SpacetimePoint::new(tau, hi), DEFAULT_CONVERGENCE_TOL)?;
    Ok(density_integral(field, tau, lo, hi, spatial) / norm_sq)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub tau: f64,
    pub interval: (f64, f64),
    pub mass_fraction: f64,
    pub total_norm_sq: f64,
    pub k_order: usize,
}

/// Velocity bounds with 10% of the group-velocity span as slack on each
/// side.
pub fn default_velocity_bounds(field: &PacketField) -> (f64, f64) {
    let (lo, hi) = field.velocity_hull();
    let slack = 0.1 * (hi - lo);
    (lo - slack, hi + slack)
}

/// Mass fraction inside `τ·[v1, v2]` for each `τ`.
pub fn localization_sweep(
    field: &PacketField,
    taus: &[f64],
    v1: f64,
    v2: f64,
    spatial: &SpatialQuadrature,
) -> Result<Vec<LocalizationReport>> {
    let (lo, hi) = field.velocity_hull();
    if !(v1 < lo && hi < v2) {
        return Err(Error::invalid(format!(
            "velocity bounds [{v1}, {v2}] must strictly enclose the group velocities [{lo}, {hi}]"
        )));
    }
    taus.iter()
        .map(|&tau| {
            let (a, b) = (v1 * tau, v2 * tau);
            let interval = (a.min(b), a.max(b));
            let mass_fraction = probability_in_interval(field, tau, interval, spatial)?;
            Ok(LocalizationReport {
                tau,
                interval,
                mass_fraction,
                total_norm_sq: field.norm_sq_kspace(),
                k_order: field.order(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtBudget {
    pub reflection: f64,
    pub transmission: f64,
    pub k_order: usize,
}

/// `R = ‖U[a_r]‖²/‖U[a]‖²` and `T = ‖V[a_t]‖²/‖U[a]‖²`, each integrated in
/// its own wave-number variable (`k` for `a_r`, `q` for `a_t`).
pub fn rt_budget(a: &AmplitudeProfile, p: &PhysicalParams, order: usize) -> Result<RtBudget> {
    let rule = QuadratureRule::gauss_legendre(order);
    let k_norm = |amp: &AmplitudeProfile| -> f64 {
        rule.mapped(amp.k1, amp.k2)
            .map(|(k, w)| w * amp.eval(k).norm_sqr() / (2.0 * omega_bar(k, p)))
            .sum()
    };
    let incoming = k_norm(a);
    if incoming <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let reflected = k_norm(&reflected_amplitude(a, p)?);
    let transmitted = k_norm(&transmitted_amplitude(a, p)?);
    Ok(RtBudget {
        reflection: reflected / incoming,
        transmission: transmitted / incoming,
        k_order: order,
    })
}

/// Divergence of the current at every probe point, in parallel.
pub fn divergence_at<F: CurrentField + ?Sized>(field: &F, probes: &[SpacetimePoint], h: f64) -> Vec<f64> {
    probes.par_iter().map(|&pt| current_divergence(field, pt, h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_modes::FreeMode;
    use crate::packets::{GaussianAmplitude, PacketKind};
    use crate::step_modes::make_step_mode;

    fn reference_packet() -> (AmplitudeProfile, PhysicalParams) {
        (GaussianAmplitude::new(0.3, 0.1).unwrap().profile(), PhysicalParams::with_height(4.0))
    }

    #[test]
    fn free_modes_solve_free_equation() {
        let p = PhysicalParams::default();
        for i in 0..10 {
            let k = -2.0 + 0.45 * i as f64;
            let pt = SpacetimePoint::new(3.1 * i as f64 - 7.0, 1.7 - 0.9 * i as f64);
            for m in [FreeMode::u(k, p), FreeMode::v(k, p)] {
                assert!(dirac_residual(|x| m.eval(x), pt, 1e-4, &p) < 1e-6);
            }
        }
    }

    #[test]
    fn step_mode_solves_step_equation() {
        let p = PhysicalParams::with_height(2.25);
        let m = make_step_mode(0.5, &p).unwrap();
        for &x1 in &[-20.0, -3.3, -0.01, 0.01, 4.0, 30.0] {
            let pt = SpacetimePoint::new(1.5, x1);
            assert!(dirac_residual(|x| m.eval(x), pt, 1e-4, &p) < 1e-6);
        }
        // the free operator does not annihilate the transmitted branch
        assert!(dirac_residual(|x| m.eval(x), SpacetimePoint::new(1.5, 4.0), 1e-4, &PhysicalParams::default()) > 1e-2);
    }

    #[test]
    fn step_mode_current_is_divergence_free() {
        let m = make_step_mode(0.5, &PhysicalParams::with_height(2.25)).unwrap();
        for &x1 in &[-9.0, -1e-3, 0.0, 1e-3, 5.0] {
            assert!(current_divergence(&m, SpacetimePoint::new(2.0, x1), 1e-3).abs() < 1e-6);
        }
    }

    #[test]
    fn probability_edge_cases() {
        let (a, p) = reference_packet();
        let field = PacketField::for_window(PacketKind::FreeU, &a, p, 0.0, 3000.0).unwrap();
        let sq = SpatialQuadrature { panel_width: 2.0, nodes_per_panel: 16 };
        assert_eq!(probability_in_interval(&field, 0.0, (3.0, 3.0), &sq).unwrap(), 0.0);
        let all = probability_in_interval(&field, 0.0, (f64::NEG_INFINITY, f64::INFINITY), &sq).unwrap();
        assert!((all - 1.0).abs() < 1e-6, "{all}");
        let zero = PacketField::new(PacketKind::FreeU, &AmplitudeProfile::zero(0.1, 0.5).unwrap(), p, 64).unwrap();
        assert!(matches!(probability_in_interval(&zero, 0.0, (-1.0, 1.0), &sq), Err(Error::ZeroNorm)));
    }

    #[test]
    fn sweep_rejects_bad_bounds_and_degenerates_at_zero() {
        let (a, p) = reference_packet();
        let field = PacketField::for_window(PacketKind::FreeU, &a, p, 0.0, 400.0).unwrap();
        let sq = SpatialQuadrature::default();
        assert!(localization_sweep(&field, &[10.0], 0.2, 0.46, &sq).is_err());
        let reports = localization_sweep(&field, &[0.0], 0.09, 0.46, &sq).unwrap();
        assert_eq!(reports[0].mass_fraction, 0.0);
        let (v1, v2) = default_velocity_bounds(&field);
        assert!(v1 < 0.0995 && v2 > 0.4473);
    }

    #[test]
    fn rt_budget_sums_to_one() {
        let (a, p) = reference_packet();
        let rt = rt_budget(&a, &p, 256).unwrap();
        assert!((rt.reflection + rt.transmission - 1.0).abs() < 1e-8);
        assert!(rt.reflection > 0.0 && rt.reflection < 1.0);
        let zero = AmplitudeProfile::zero(0.1, 0.5).unwrap();
        assert!(matches!(rt_budget(&zero, &p, 64), Err(Error::ZeroNorm)));
    }

    #[test]
    fn narrow_packet_reflects_like_its_mode() {
        let p = PhysicalParams::with_height(4.0);
        let a = GaussianAmplitude::new(0.3, 0.01).unwrap().profile();
        let rt = rt_budget(&a, &p, 128).unwrap();
        let r = make_step_mode(0.3, &p).unwrap().r;
        assert!((rt.reflection - r * r).abs() < 1e-4, "{} vs {}", rt.reflection, r * r);
    }

    #[test]
    fn reflection_decreases_towards_fixed_point() {
        let p = PhysicalParams::with_height(4.0);
        let rs: Vec<f64> = [0.3, 1.0, 1.7]
            .iter()
            .map(|&k| rt_budget(&GaussianAmplitude::new(k, 0.1).unwrap().profile(), &p, 128).unwrap().reflection)
            .collect();
        assert!(rs[0] > rs[1] && rs[1] > rs[2], "{rs:?}");
    }
}
