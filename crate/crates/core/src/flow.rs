//! Bohmian trajectories: integral curves of the current, written as
//! `dx¹/dx⁰ = j¹/j⁰` and integrated with an embedded Dormand–Prince 5(4)
//! pair under PI step-size control.
//!
//! Packet currents are continuous across `x¹ = 0`, so the step is crossed
//! without event handling; a step-size cap in a band around the step keeps
//! the `2k` interference pattern on `x¹ < 0` resolved.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::packets::PacketField;
use crate::spinor::{CurrentVector, SpacetimePoint};
use crate::step_modes::StepMode;

/// Anything that yields a current at a spacetime point.
pub trait CurrentField: Sync {
    fn current_at(&self, pt: SpacetimePoint) -> CurrentVector;
}

impl CurrentField for StepMode {
    fn current_at(&self, pt: SpacetimePoint) -> CurrentVector {
        self.current(pt)
    }
}

impl CurrentField for PacketField {
    fn current_at(&self, pt: SpacetimePoint) -> CurrentVector {
        self.current(pt)
    }
}

impl<F: CurrentField> CurrentField for &F {
    fn current_at(&self, pt: SpacetimePoint) -> CurrentVector {
        (**self).current_at(pt)
    }
}

/// Unit-density field moving at a constant velocity.
#[derive(Debug, Clone, Copy)]
pub struct ConstantVelocity(pub f64);

impl CurrentField for ConstantVelocity {
    fn current_at(&self, _pt: SpacetimePoint) -> CurrentVector {
        CurrentVector::new(1.0, self.0)
    }
}

/// Step-size cap `cap` applied while `|x¹| < band`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearStepCap {
    pub band: f64,
    pub cap: f64,
}

impl NearStepCap {
    /// `0.1/k_max` inside `|x¹| < 2π/k_min`-wide band of the slowest beat.
    pub fn for_wave_numbers(k_min: f64, k_max: f64) -> Self {
        NearStepCap {
            band: std::f64::consts::PI / k_min.abs().max(1e-3),
            cap: 0.1 / k_max.abs().max(1e-3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Absolute `j⁰` below which the velocity is considered meaningless.
    pub density_floor: f64,
    pub t_span: (f64, f64),
    pub max_steps: usize,
    pub near_step: Option<NearStepCap>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 5.0,
            density_floor: 0.0,
            t_span: (0.0, 1.0),
            max_steps: 200_000,
            near_step: None,
        }
    }
}

impl IntegratorConfig {
    pub fn with_span(t_start: f64, t_end: f64) -> Self {
        IntegratorConfig {
            t_span: (t_start, t_end),
            ..Default::default()
        }
    }

    /// Floor at `1e-10` of the packet's peak density.
    pub fn with_peak_density(mut self, peak: f64) -> Self {
        self.density_floor = 1e-10 * peak;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.t_span;
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::invalid("integrator tolerances must be positive"));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("time span [{a}, {b}] must satisfy t_start < t_end")));
        }
        if !(self.max_step > 0.0) || self.density_floor < 0.0 || self.max_steps == 0 {
            return Err(Error::invalid("max_step and max_steps must be positive, density_floor non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryStatus {
    Completed,
    AbortedLowDensity,
    AbortedStepLimit,
}

impl TrajectoryStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrajectoryStatus::Completed => "completed",
            TrajectoryStatus::AbortedLowDensity => "aborted_low_density",
            TrajectoryStatus::AbortedStepLimit => "aborted_step_limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub x0: f64,
    pub x1: f64,
    /// `j¹/j⁰` at the sample.
    pub velocity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryStats {
    pub steps: usize,
    pub rejected: usize,
    /// Largest accepted local error estimate.
    pub max_error_estimate: f64,
    /// Sum of accepted local error estimates, a crude global bound.
    pub accumulated_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Strictly increasing in `x0`.
    pub samples: Vec<TrajectorySample>,
    pub start: SpacetimePoint,
    pub status: TrajectoryStatus,
    pub stats: TrajectoryStats,
}

impl Trajectory {
    pub fn time_span(&self) -> (f64, f64) {
        (self.samples[0].x0, self.samples[self.samples.len() - 1].x0)
    }

    pub fn first(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        &self.samples[self.samples.len() - 1]
    }

    pub fn max_speed(&self) -> f64 {
        self.samples.iter().map(|s| s.velocity.abs()).fold(0.0, f64::max)
    }

    /// Ends on the far side of the step.
    pub fn is_transmitted(&self) -> bool {
        self.last().x1 > 0.0
    }

    /// Cubic Hermite interpolation of `x¹` at time `t` using the stored
    /// velocities; `None` outside the time span.
    pub fn position_at(&self, t: f64) -> Option<f64> {
        let (a, b) = self.time_span();
        if t < a || t > b {
            return None;
        }
        let i = self.samples.partition_point(|s| s.x0 <= t);
        if i == 0 {
            return Some(self.samples[0].x1);
        }
        if i == self.samples.len() {
            return Some(self.last().x1);
        }
        let (s0, s1) = (&self.samples[i - 1], &self.samples[i]);
        let h = s1.x0 - s0.x0;
        let u = (t - s0.x0) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        Some(h00 * s0.x1 + h10 * h * s0.velocity + h01 * s1.x1 + h11 * h * s1.velocity)
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct Leg {
    samples: Vec<TrajectorySample>,
    status: TrajectoryStatus,
    stats: TrajectoryStats,
}

/// Integrates from `(t0, x0)` to `t_target` (either direction).
fn integrate_leg<F: CurrentField + ?Sized>(
    field: &F,
    t0: f64,
    x0: f64,
    v0: f64,
    t_target: f64,
    cfg: &IntegratorConfig,
) -> Leg {
    let dir = (t_target - t0).signum();
    let mut samples = vec![TrajectorySample { x0: t0, x1: x0, velocity: v0 }];
    let mut stats = TrajectoryStats::default();
    let mut status = TrajectoryStatus::Completed;
    if dir == 0.0 {
        return Leg { samples, status, stats };
    }

    let velocity = |t: f64, x: f64| -> Option<f64> {
        let j = field.current_at(SpacetimePoint::new(t, x));
        (j.j0 > cfg.density_floor && j.j0 > 0.0).then(|| j.j1 / j.j0)
    };

    let (mut t, mut x, mut k1) = (t0, x0, v0);
    let mut h = (0.01f64).min(cfg.max_step).min((t_target - t0).abs());
    let mut err_old: f64 = 1e-4;
    let h_min = 1e-12 * (1.0 + t0.abs().max(t_target.abs()));

    while (t_target - t) * dir > 0.0 {
        if stats.steps + stats.rejected >= cfg.max_steps {
            status = TrajectoryStatus::AbortedStepLimit;
            break;
        }
        let mut h_cap = cfg.max_step;
        if let Some(near) = cfg.near_step {
            if x.abs() < near.band {
                h_cap = h_cap.min(near.cap);
            }
        }
        h = h.min(h_cap).min((t_target - t).abs());
        let hs = h * dir;

        let mut k = [0.0; 7];
        k[0] = k1;
        let mut low_density = false;
        for s in 1..7 {
            let xs = x + hs * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            match velocity(t + C[s] * hs, xs) {
                Some(v) => k[s] = v,
                None => {
                    low_density = true;
                    break;
                }
            }
        }
        if low_density {
            stats.rejected += 1;
            h *= 0.25;
            if h < h_min {
                status = TrajectoryStatus::AbortedLowDensity;
                break;
            }
            continue;
        }

        // stage 7 is evaluated at the fifth-order solution (FSAL)
        let x_new = x + hs * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let local = (hs * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
        let scale = cfg.abs_tol + cfg.rel_tol * x.abs().max(x_new.abs());
        let err = local / scale;

        if err <= 1.0 {
            t += hs;
            if (t_target - t) * dir <= 0.0 {
                t = t_target;
            }
            x = x_new;
            k1 = k[6];
            stats.steps += 1;
            stats.max_error_estimate = stats.max_error_estimate.max(local);
            stats.accumulated_error += local;
            samples.push(TrajectorySample { x0: t, x1: x, velocity: k1 });
            let fac = (err.max(1e-10).powf(0.2 - 0.75 * BETA) / err_old.powf(BETA) / SAFETY)
                .clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            h /= fac;
            err_old = err.max(1e-4);
        } else {
            stats.rejected += 1;
            let fac = (err.powf(0.2 - 0.75 * BETA) / SAFETY).clamp(1.0, 1.0 / FAC_MIN);
            h /= fac;
            if h < h_min {
                status = TrajectoryStatus::AbortedStepLimit;
                break;
            }
        }
    }
    Leg { samples, status, stats }
}

/// Integral curve through `start`, covering as much of `cfg.t_span` as the
/// density allows. `start.x0` must lie inside the span.
pub fn integrate_trajectory<F: CurrentField + ?Sized>(
    field: &F,
    start: SpacetimePoint,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let (t_start, t_end) = cfg.t_span;
    if !(start.x0 >= t_start && start.x0 <= t_end && start.x1.is_finite()) {
        return Err(Error::invalid(format!(
            "start time {} outside span [{t_start}, {t_end}]",
            start.x0
        )));
    }
    let j = field.current_at(start);
    if !(j.j0 > cfg.density_floor && j.j0 > 0.0) {
        return Err(Error::InvalidStart {
            x0: start.x0,
            x1: start.x1,
            density: j.j0,
            floor: cfg.density_floor,
        });
    }
    let v0 = j.j1 / j.j0;
    let back = integrate_leg(field, start.x0, start.x1, v0, t_start, cfg);
    let fwd = integrate_leg(field, start.x0, start.x1, v0, t_end, cfg);

    let mut samples: Vec<TrajectorySample> = back.samples.into_iter().rev().collect();
    samples.extend(fwd.samples.into_iter().skip(1));
    let status = [back.status, fwd.status]
        .into_iter()
        .find(|s| *s != TrajectoryStatus::Completed)
        .unwrap_or(TrajectoryStatus::Completed);
    let stats = TrajectoryStats {
        steps: back.stats.steps + fwd.stats.steps,
        rejected: back.stats.rejected + fwd.stats.rejected,
        max_error_estimate: back.stats.max_error_estimate.max(fwd.stats.max_error_estimate),
        accumulated_error: back.stats.accumulated_error + fwd.stats.accumulated_error,
    };
    Ok(Trajectory {
        samples,
        start,
        status,
        stats,
    })
}

/// Integrates every start independently (in parallel); results keep the
/// order of `starts`.
pub fn batch_trajectories<F: CurrentField + ?Sized>(
    field: &F,
    starts: &[SpacetimePoint],
    cfg: &IntegratorConfig,
) -> Vec<Result<Trajectory>> {
    starts
        .par_iter()
        .map(|&s| integrate_trajectory(field, s, cfg))
        .collect()
}

/// Pairs `(i, j)` whose ordering in `x¹` changes somewhere on a grid of
/// `grid_points` times over their common span.
pub fn crossing_pairs(trajectories: &[Trajectory], grid_points: usize) -> Vec<(usize, usize)> {
    let n = grid_points.max(2);
    let mut out = Vec::new();
    for i in 0..trajectories.len() {
        for j in i + 1..trajectories.len() {
            let (a, b) = (&trajectories[i], &trajectories[j]);
            let lo = a.time_span().0.max(b.time_span().0);
            let hi = a.time_span().1.min(b.time_span().1);
            if !(hi > lo) {
                continue;
            }
            let mut sign = 0.0;
            let crossed = (0..n).any(|g| {
                let t = lo + (hi - lo) * g as f64 / (n - 1) as f64;
                let d = a.position_at(t).unwrap() - b.position_at(t).unwrap();
                let s = if d > 0.0 {
                    1.0
                } else if d < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                if sign == 0.0 {
                    sign = s;
                    s == 0.0 && g > 0
                } else {
                    s != sign
                }
            });
            if crossed {
                out.push((i, j));
            }
        }
    }
    out
}

/// `j⁰` sampled on a uniform spatial grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub tau: f64,
    pub xs: Vec<f64>,
    pub currents: Vec<CurrentVector>,
}

impl DensityProfile {
    pub fn sample<F: CurrentField + ?Sized>(field: &F, tau: f64, lo: f64, hi: f64, points: usize) -> Self {
        let n = points.max(2);
        let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let currents = xs
            .par_iter()
            .map(|&x| field.current_at(SpacetimePoint::new(tau, x)))
            .collect();
        DensityProfile { tau, xs, currents }
    }

    pub fn peak(&self) -> f64 {
        self.currents.iter().map(|j| j.j0).fold(0.0, f64::max)
    }

    /// Trapezoidal cumulative mass, starting at 0.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.xs.len()];
        for i in 1..self.xs.len() {
            let h = self.xs[i] - self.xs[i - 1];
            acc[i] = acc[i - 1] + 0.5 * h * (self.currents[i].j0 + self.currents[i - 1].j0);
        }
        acc
    }

    /// Position below which the fraction `p` of the sampled mass lies.
    pub fn quantile(&self, p: f64) -> f64 {
        let cum = self.cumulative();
        let total = *cum.last().unwrap();
        let target = p.clamp(0.0, 1.0) * total;
        let i = cum.partition_point(|&c| c < target);
        if i == 0 {
            return self.xs[0];
        }
        if i >= cum.len() {
            return *self.xs.last().unwrap();
        }
        let (c0, c1) = (cum[i - 1], cum[i]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
        self.xs[i - 1] + frac * (self.xs[i] - self.xs[i - 1])
    }
}

/// Probability levels `(1 − c)/2 + c·i/(n − 1)`; a single start sits at the
/// median.
pub fn quantile_levels(n: usize, coverage: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.5];
    }
    let lo = 0.5 * (1.0 - coverage);
    (0..n).map(|i| lo + coverage * i as f64 / (n - 1) as f64).collect()
}

/// Density profile of a packet at `tau` over its localization window,
/// resolving the shortest wavelength present.
pub fn packet_profile(field: &PacketField, tau: f64) -> Result<DensityProfile> {
    let (lo, hi) = field.localization_window(tau);
    field.check_window((tau, tau), (lo, hi), crate::packets::DEFAULT_CONVERGENCE_TOL)?;
    let a = field.amplitude();
    let mut k_max = a.k1.abs().max(a.k2.abs());
    if field.kind() == crate::packets::PacketKind::StepIn {
        k_max = k_max.max(crate::dispersion::s_map(a.k1, field.params())?);
    }
    let spacing = (0.1f64).min(std::f64::consts::PI / (16.0 * k_max));
    let points = ((hi - lo) / spacing).ceil() as usize + 1;
    Ok(DensityProfile::sample(field, tau, lo, hi, points))
}

/// `n` starts at time `tau` placed at density quantiles spanning the central
/// `coverage` of the probability mass.
pub fn pick_starts(field: &PacketField, tau: f64, n: usize, coverage: f64) -> Result<Vec<SpacetimePoint>> {
    if n == 0 {
        return Err(Error::invalid("need at least one start"));
    }
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(Error::invalid(format!("coverage must lie in (0, 1), got {coverage}")));
    }
    let profile = packet_profile(field, tau)?;
    Ok(quantile_levels(n, coverage)
        .into_iter()
        .map(|p| SpacetimePoint::new(tau, profile.quantile(p)))
        .collect())
}
