//! Finite-norm wave packets `U[a]`, `V[a]` and `U^in[a]` obtained by
//! integrating plane modes against an amplitude `a` with the invariant
//! measure `dμ(k) = dk / (2ω̄(k))`.
//!
//! Integrals over `k` are evaluated by Gauss–Legendre quadrature on the
//! amplitude support. A finite quadrature sum of plane modes is itself an
//! exact solution, so the only approximation is the distance to the exact
//! integral; [`PacketField::eval_checked`] bounds it by comparing against
//! the rule of twice the order.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::{group_velocity, omega_bar, s_map, PhysicalParams};
use crate::error::{Error, Result};
use crate::free_modes::{cis, spinor_u, spinor_v, INV_SQRT_2PI};
use crate::quadrature::{order_for_phase, QuadratureRule, SpatialQuadrature};
use crate::spinor::{current_of, CurrentVector, SpacetimePoint, Spinor};
use crate::step_modes::make_step_mode;

/// Default Gauss–Legendre node count in `k`.
pub const DEFAULT_ORDER: usize = 256;
/// Default tolerance of the order-doubling convergence gate.
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-10;
/// Default ratio of edge density to peak density accepted by
/// [`norm_at_time`].
pub const DEFAULT_EDGE_FLOOR: f64 = 1e-8;

type AmplitudeFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// Continuous amplitude on a compact interval `[k1, k2]`.
#[derive(Clone)]
pub struct AmplitudeProfile {
    pub k1: f64,
    pub k2: f64,
    pub label: String,
    eval: Arc<AmplitudeFn>,
}

impl fmt::Debug for AmplitudeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmplitudeProfile")
            .field("k1", &self.k1)
            .field("k2", &self.k2)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl AmplitudeProfile {
    pub fn new(
        k1: f64,
        k2: f64,
        label: impl Into<String>,
        eval: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(k1.is_finite() && k2.is_finite() && k1 < k2) {
            return Err(Error::invalid(format!("amplitude support [{k1}, {k2}] must be finite with k1 < k2")));
        }
        Ok(AmplitudeProfile {
            k1,
            k2,
            label: label.into(),
            eval: Arc::new(eval),
        })
    }

    pub fn zero(k1: f64, k2: f64) -> Result<Self> {
        AmplitudeProfile::new(k1, k2, "zero", |_| Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, k: f64) -> Complex64 {
        (self.eval)(k)
    }

    pub fn width(&self) -> f64 {
        self.k2 - self.k1
    }

    /// Checks the step-packet preconditions `0 < k1` and `ω̄(k2) < V − κ`.
    pub fn check_klein_window(&self, p: &PhysicalParams) -> Result<()> {
        p.check_klein_window(self.k1)?;
        p.check_klein_window(self.k2)
    }
}

/// Truncated Gaussian `exp(−(k − K)²/Δ²)` on `[K − 2Δ, K + 2Δ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAmplitude {
    pub center: f64,
    pub width: f64,
}

impl GaussianAmplitude {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(center.is_finite() && width.is_finite() && width > 0.0) {
            return Err(Error::invalid(format!("Gaussian needs finite K and Δ > 0, got K={center}, Δ={width}")));
        }
        Ok(GaussianAmplitude { center, width })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - 2.0 * self.width, self.center + 2.0 * self.width)
    }

    pub fn profile(&self) -> AmplitudeProfile {
        let (k1, k2) = self.support();
        let GaussianAmplitude { center, width } = *self;
        AmplitudeProfile::new(k1, k2, format!("gaussian(K={center}, Δ={width})"), move |k| {
            let z = (k - center) / width;
            Complex64::new((-z * z).exp(), 0.0)
        })
        .expect("validated in GaussianAmplitude::new")
    }
}

/// `a_r(k) = r(−k) a(−k)` on `[−k2, −k1]`.
pub fn reflected_amplitude(a: &AmplitudeProfile, p: &PhysicalParams) -> Result<AmplitudeProfile> {
    a.check_klein_window(p)?;
    let inner = a.clone();
    let params = *p;
    AmplitudeProfile::new(-a.k2, -a.k1, format!("reflected({})", a.label), move |k| {
        let r = make_step_mode(-k, &params).map(|m| m.r).unwrap_or(0.0);
        inner.eval(-k) * r
    })
}

/// `a_t(q) = (q/k) t(k) a(k)` with `k = s(q)`, on `[s(k2), s(k1)]`.
pub fn transmitted_amplitude(a: &AmplitudeProfile, p: &PhysicalParams) -> Result<AmplitudeProfile> {
    a.check_klein_window(p)?;
    let lo = s_map(a.k2, p)?;
    let hi = s_map(a.k1, p)?;
    let inner = a.clone();
    let params = *p;
    AmplitudeProfile::new(lo, hi, format!("transmitted({})", a.label), move |q| {
        let Ok(k) = s_map(q, &params) else {
            return Complex64::new(0.0, 0.0);
        };
        match make_step_mode(k, &params) {
            Ok(m) => inner.eval(k) * (q / k * m.t),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketKind {
    /// Positive-frequency free packet `U[a]`.
    FreeU,
    /// Negative-frequency free packet `V[a]`.
    FreeV,
    /// Incoming step packet `U^in[a]`.
    StepIn,
}

impl fmt::Display for PacketKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PacketKind::FreeU => "freeU",
            PacketKind::FreeV => "freeV",
            PacketKind::StepIn => "stepIn",
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    k: f64,
    omega: f64,
    /// `w · a(k) / (2ω̄(k) √(2π))`
    weight: Complex64,
    /// `u(k)` for positive-frequency kinds, `v(k)` for `FreeV`.
    spinor: Spinor,
    step: Option<StepNode>,
}

#[derive(Debug, Clone, Copy)]
struct StepNode {
    q: f64,
    omega_q: f64,
    /// `r u(−k)`
    reflected: Spinor,
    /// `t v(q)`
    transmitted: Spinor,
}

/// A packet prepared for repeated evaluation at one quadrature order.
pub struct PacketField {
    kind: PacketKind,
    params: PhysicalParams,
    amplitude: AmplitudeProfile,
    order: usize,
    nodes: Vec<Node>,
    norm_sq: f64,
    doubled: OnceLock<Box<PacketField>>,
}

impl fmt::Debug for PacketField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PacketField")
            .field("kind", &self.kind)
            .field("params", &self.params)
            .field("amplitude", &self.amplitude)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl PacketField {
    pub fn new(kind: PacketKind, amplitude: &AmplitudeProfile, params: PhysicalParams, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("quadrature order must be positive"));
        }
        if kind == PacketKind::StepIn {
            amplitude.check_klein_window(&params)?;
        }
        let rule = QuadratureRule::gauss_legendre(order);
        let mut nodes = Vec::with_capacity(order);
        let mut norm_sq = 0.0;
        for (k, w) in rule.mapped(amplitude.k1, amplitude.k2) {
            let omega = omega_bar(k, &params);
            let a = amplitude.eval(k);
            norm_sq += w * a.norm_sqr() / (2.0 * omega);
            let weight = a * (w / (2.0 * omega) * INV_SQRT_2PI);
            let (spinor, step) = match kind {
                PacketKind::FreeU => (spinor_u(k, &params), None),
                PacketKind::FreeV => (spinor_v(k, &params), None),
                PacketKind::StepIn => {
                    let m = make_step_mode(k, &params)?;
                    let step = StepNode {
                        q: m.q,
                        omega_q: m.omega_q(),
                        reflected: spinor_u(-k, &params) * m.r,
                        transmitted: spinor_v(m.q, &params) * m.t,
                    };
                    (spinor_u(k, &params), Some(step))
                }
            };
            nodes.push(Node {
                k,
                omega,
                weight,
                spinor,
                step,
            });
        }
        Ok(PacketField {
            kind,
            params,
            amplitude: amplitude.clone(),
            order,
            nodes,
            norm_sq,
            doubled: OnceLock::new(),
        })
    }

    /// Field whose order is large enough for the oscillation of the
    /// integrand anywhere in `|x⁰| ≤ t_extent`, `|x¹| ≤ x_extent`.
    pub fn for_window(
        kind: PacketKind,
        amplitude: &AmplitudeProfile,
        params: PhysicalParams,
        t_extent: f64,
        x_extent: f64,
    ) -> Result<Self> {
        let order = required_order(kind, amplitude, &params, t_extent, x_extent)?;
        PacketField::new(kind, amplitude, params, order)
    }

    pub fn kind(&self) -> PacketKind {
        self.kind
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn amplitude(&self) -> &AmplitudeProfile {
        &self.amplitude
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `‖ψ‖² = ∫ |a(k)|² dμ(k)` from the amplitude alone. For `U^in[a]` this
    /// is the norm of its incoming asymptote, hence of the packet itself.
    pub fn norm_sq_kspace(&self) -> f64 {
        self.norm_sq
    }

    pub fn eval(&self, pt: SpacetimePoint) -> Spinor {
        let (t, x) = (pt.x0, pt.x1);
        let mut acc = Spinor::ZERO;
        match self.kind {
            PacketKind::FreeU => {
                for n in &self.nodes {
                    acc += n.spinor * (n.weight * cis(n.k * x - n.omega * t));
                }
            }
            PacketKind::FreeV => {
                for n in &self.nodes {
                    acc += n.spinor * (n.weight * cis(n.omega * t - n.k * x));
                }
            }
            PacketKind::StepIn if x < 0.0 => {
                for n in &self.nodes {
                    let step = n.step.as_ref().expect("step data present for StepIn");
                    let time = n.weight * cis(-n.omega * t);
                    let (s, c) = (n.k * x).sin_cos();
                    let fwd = Complex64::new(c, s);
                    let back = Complex64::new(c, -s);
                    acc += (n.spinor * fwd + step.reflected * back) * time;
                }
            }
            PacketKind::StepIn => {
                for n in &self.nodes {
                    let step = n.step.as_ref().expect("step data present for StepIn");
                    acc += step.transmitted * (n.weight * cis(step.omega_q * t - step.q * x));
                }
                acc = acc * cis(-self.params.height * t);
            }
        }
        acc
    }

    fn doubled(&self) -> &PacketField {
        self.doubled.get_or_init(|| {
            Box::new(
                PacketField::new(self.kind, &self.amplitude, self.params, 2 * self.order)
                    .expect("inputs already validated"),
            )
        })
    }

    /// Value at `pt`, rejected if the rule of twice the order disagrees by
    /// more than `tol` in any component.
    pub fn eval_checked(&self, pt: SpacetimePoint, tol: f64) -> Result<Spinor> {
        let value = self.eval(pt);
        let change = value.max_abs_diff(&self.doubled().eval(pt));
        if change > tol {
            return Err(Error::QuadratureNotConverged {
                order: self.order,
                change,
                tolerance: tol,
            });
        }
        Ok(value)
    }

    pub fn current(&self, pt: SpacetimePoint) -> CurrentVector {
        current_of(self.eval(pt))
    }

    /// Runs the convergence gate at the corners and centre of a window.
    pub fn check_window(&self, t_range: (f64, f64), x_range: (f64, f64), tol: f64) -> Result<()> {
        let ts = [t_range.0, 0.5 * (t_range.0 + t_range.1), t_range.1];
        let xs = [x_range.0, 0.5 * (x_range.0 + x_range.1), x_range.1];
        for &t in &ts {
            for &x in &xs {
                self.eval_checked(SpacetimePoint::new(t, x), tol)?;
            }
        }
        Ok(())
    }

    /// Group-velocity hull of the packet (all components for `StepIn`).
    pub fn velocity_hull(&self) -> (f64, f64) {
        let (k1, k2) = (self.amplitude.k1, self.amplitude.k2);
        let p = &self.params;
        let mut vs = vec![group_velocity(k1, p), group_velocity(k2, p)];
        if self.kind == PacketKind::StepIn {
            vs.extend([-group_velocity(k1, p), -group_velocity(k2, p)]);
            for k in [k1, k2] {
                if let Ok(q) = s_map(k, p) {
                    vs.push(group_velocity(q, p));
                }
            }
        }
        let lo = vs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Spatial interval at time `tau` outside which the packet carries only
    /// its algebraic tails: the group-velocity hull times `tau`, widened by
    /// `40/(k2 − k1)` on each side.
    pub fn localization_window(&self, tau: f64) -> (f64, f64) {
        let (vlo, vhi) = self.velocity_hull();
        let a = vlo * tau;
        let b = vhi * tau;
        let margin = 40.0 / self.amplitude.width();
        (a.min(b) - margin, a.max(b) + margin)
    }
}

/// Gauss–Legendre order for a window, from the largest phase variation of
/// the integrand across the support.
pub fn required_order(
    kind: PacketKind,
    amplitude: &AmplitudeProfile,
    params: &PhysicalParams,
    t_extent: f64,
    x_extent: f64,
) -> Result<usize> {
    let mut stretch: f64 = 1.0;
    if kind == PacketKind::StepIn {
        amplitude.check_klein_window(params)?;
        // |dq/dk| = k ω̄(q) / (q ω̄(k)), largest at the support ends
        for k in [amplitude.k1, amplitude.k2] {
            let q = s_map(k, params)?;
            stretch = stretch.max(k * omega_bar(q, params) / (q * omega_bar(k, params)));
        }
    }
    let span = amplitude.width() * stretch * (t_extent.abs() + x_extent.abs());
    Ok(order_for_phase(span, DEFAULT_ORDER))
}

/// Quadrature value of the packet at one point, gated by order doubling.
pub fn eval_packet(
    kind: PacketKind,
    a: &AmplitudeProfile,
    params: &PhysicalParams,
    pt: SpacetimePoint,
    order: usize,
) -> Result<Spinor> {
    PacketField::new(kind, a, *params, order)?.eval_checked(pt, DEFAULT_CONVERGENCE_TOL)
}

pub fn packet_current(
    kind: PacketKind,
    a: &AmplitudeProfile,
    params: &PhysicalParams,
    pt: SpacetimePoint,
    order: usize,
) -> Result<CurrentVector> {
    eval_packet(kind, a, params, pt, order).map(current_of)
}

/// Samples of `j` at time `tau` on the composite spatial rule over
/// `[lo, hi]`, split at `x¹ = 0`; returns `(x, weight, j)` in order.
pub fn current_samples(
    field: &PacketField,
    tau: f64,
    lo: f64,
    hi: f64,
    spatial: &SpatialQuadrature,
) -> Vec<(f64, f64, CurrentVector)> {
    spatial
        .points(lo, hi, &[0.0])
        .into_par_iter()
        .map(|(x, w)| (x, w, field.current(SpacetimePoint::new(tau, x))))
        .collect()
}

/// `∫_lo^hi j⁰(τ, ξ) dξ` (ordered summation, so results are reproducible).
pub fn density_integral(field: &PacketField, tau: f64, lo: f64, hi: f64, spatial: &SpatialQuadrature) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    current_samples(field, tau, lo, hi, spatial)
        .iter()
        .map(|(_, w, j)| w * j.j0)
        .sum()
}

/// `‖ψ_τ‖ = (∫ j⁰(τ, ξ) dξ)^{1/2}` over `window`. Fails with
/// [`Error::WindowTooSmall`] when the density on the outermost panels exceeds
/// `edge_floor` times the peak density inside the window.
pub fn norm_at_time(
    field: &PacketField,
    tau: f64,
    window: (f64, f64),
    spatial: &SpatialQuadrature,
    edge_floor: f64,
) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::invalid(format!("empty window [{lo}, {hi}]")));
    }
    let samples = current_samples(field, tau, lo, hi, spatial);
    let total: f64 = samples.iter().map(|(_, w, j)| w * j.j0).sum();
    let peak = samples.iter().map(|(_, _, j)| j.j0).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let m = spatial.nodes_per_panel.min(samples.len());
    let edge = samples[..m]
        .iter()
        .chain(&samples[samples.len() - m..])
        .map(|(_, _, j)| j.j0)
        .fold(0.0, f64::max);
    let floor = edge_floor * peak;
    if edge > floor {
        return Err(Error::WindowTooSmall { lo, hi, edge, floor });
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_amplitude() -> AmplitudeProfile {
        GaussianAmplitude::new(0.3, 0.1).unwrap().profile()
    }

    fn v4() -> PhysicalParams {
        PhysicalParams::with_height(4.0)
    }

    #[test]
    fn gaussian_profile() {
        let a = reference_amplitude();
        assert!((a.k1 - 0.1).abs() < 1e-15 && (a.k2 - 0.5).abs() < 1e-15);
        assert_eq!(a.eval(0.3), Complex64::new(1.0, 0.0));
        assert!((a.eval(0.1).re - (-4.0f64).exp()).abs() < 1e-15);
        assert!(GaussianAmplitude::new(0.3, 0.0).is_err());
        assert!(AmplitudeProfile::zero(0.5, 0.5).is_err());
    }

    #[test]
    fn reflected_amplitude_examples() {
        let a = reference_amplitude();
        let p = v4();
        let ar = reflected_amplitude(&a, &p).unwrap();
        assert!((ar.k1 + 0.5).abs() < 1e-15 && (ar.k2 + 0.1).abs() < 1e-15);
        let r = make_step_mode(0.3, &p).unwrap().r;
        assert!((ar.eval(-0.3) - Complex64::new(r, 0.0)).norm() < 1e-15);
        let rule = QuadratureRule::gauss_legendre(20);
        for (k, _) in rule.mapped(ar.k1, ar.k2) {
            assert!(ar.eval(k).norm() < a.eval(-k).norm());
        }
    }

    #[test]
    fn transmitted_amplitude_examples() {
        let a = reference_amplitude();
        let p = v4();
        let at = transmitted_amplitude(&a, &p).unwrap();
        let s = |k: f64| s_map(k, &p).unwrap();
        assert!((at.k1 - s(0.5)).abs() < 1e-15);
        assert!((at.k2 - s(0.1)).abs() < 1e-15);
        assert!((at.k1 - 2.702911).abs() < 1e-6 && (at.k2 - 2.823136).abs() < 1e-6);
        let q = s(0.3);
        let m = make_step_mode(0.3, &p).unwrap();
        let expected = q / 0.3 * m.t;
        assert!((at.eval(q).re - expected).abs() < 1e-12 * expected.abs());
        assert!((s(q) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn klein_window_is_enforced() {
        let p = v4();
        let too_wide = GaussianAmplitude::new(0.1, 0.1).unwrap().profile();
        assert!(PacketField::new(PacketKind::StepIn, &too_wide, p, 64).is_err());
        assert!(reflected_amplitude(&too_wide, &p).is_err());
        assert!(PacketField::new(PacketKind::FreeU, &too_wide, p, 64).is_ok());
    }

    #[test]
    fn zero_amplitude() {
        let a = AmplitudeProfile::zero(0.1, 0.5).unwrap();
        let p = v4();
        for kind in [PacketKind::FreeU, PacketKind::FreeV, PacketKind::StepIn] {
            let s = eval_packet(kind, &a, &p, SpacetimePoint::new(3.0, -2.0), 64).unwrap();
            assert_eq!(s, Spinor::ZERO);
            let j = packet_current(kind, &a, &p, SpacetimePoint::new(3.0, 2.0), 64).unwrap();
            assert_eq!(j, CurrentVector::default());
            let field = PacketField::new(kind, &a, p, 64).unwrap();
            let norm = norm_at_time(&field, 0.0, (-10.0, 10.0), &SpatialQuadrature::default(), 1e-8).unwrap();
            assert_eq!(norm, 0.0);
        }
    }

    #[test]
    fn decomposition_on_both_half_planes() {
        let a = reference_amplitude();
        let p = v4();
        let order = 256;
        let step = PacketField::new(PacketKind::StepIn, &a, p, order).unwrap();
        let incoming = PacketField::new(PacketKind::FreeU, &a, p, order).unwrap();
        let reflected = PacketField::new(PacketKind::FreeU, &reflected_amplitude(&a, &p).unwrap(), p, order).unwrap();
        let transmitted = PacketField::new(PacketKind::FreeV, &transmitted_amplitude(&a, &p).unwrap(), p, order).unwrap();

        let pt = SpacetimePoint::new(-50.0, -20.0);
        let lhs = step.eval(pt);
        let rhs = incoming.eval(pt) + reflected.eval(pt);
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);

        let pt = SpacetimePoint::new(30.0, 15.0);
        let lhs = step.eval(pt);
        let rhs = transmitted.eval(pt) * cis(-4.0 * 30.0);
        assert!(lhs.max_abs_diff(&rhs) < 1e-10, "{}", lhs.max_abs_diff(&rhs));
    }

    #[test]
    fn convergence_gate_reports_failure() {
        let a = reference_amplitude();
        let p = v4();
        let coarse = PacketField::new(PacketKind::FreeU, &a, p, 8).unwrap();
        let err = coarse.eval_checked(SpacetimePoint::new(300.0, -200.0), 1e-10).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { order: 8, .. }));
        let fine = PacketField::for_window(PacketKind::StepIn, &a, p, 400.0, 400.0).unwrap();
        fine.check_window((-400.0, 400.0), (-400.0, 400.0), 1e-10).unwrap();
    }

    #[test]
    fn norm_window_too_small() {
        let a = reference_amplitude();
        let field = PacketField::new(PacketKind::FreeU, &a, v4(), 256).unwrap();
        let err = norm_at_time(&field, 0.0, (-5.0, 5.0), &SpatialQuadrature::default(), 1e-8).unwrap_err();
        assert!(matches!(err, Error::WindowTooSmall { .. }));
    }

    #[test]
    fn free_norm_matches_kspace() {
        // brute-force spatial integral against ∫|a|²/(2ω̄) dk computed
        // independently with a plain midpoint sum
        let a = reference_amplitude();
        let p = v4();
        let n = 200_000;
        let h = a.width() / n as f64;
        let kspace: f64 = (0..n)
            .map(|i| {
                let k = a.k1 + (i as f64 + 0.5) * h;
                a.eval(k).norm_sqr() / (2.0 * omega_bar(k, &p)) * h
            })
            .sum();
        let field = PacketField::for_window(PacketKind::FreeU, &a, p, 0.0, 3000.0).unwrap();
        assert!((field.norm_sq_kspace() - kspace).abs() < 1e-9 * kspace);
        let spatial = SpatialQuadrature { panel_width: 2.0, nodes_per_panel: 16 };
        let norm = norm_at_time(&field, 0.0, (-3000.0, 3000.0), &spatial, 1e-7).unwrap();
        assert!((norm * norm - kspace).abs() < 1e-6 * kspace, "{} vs {}", norm * norm, kspace);
    }
}
