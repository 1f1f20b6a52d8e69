//! Incoming single-frequency solutions `U_k^in` of the step problem.
//!
//! On `x¹ < 0` the mode is `U_k + r U_{−k}`, on `x¹ ≥ 0` it is
//! `exp(−iVx⁰) t V_q` with `q = s(k)`. The coefficients `r`, `t` are the
//! unique ones that make the spinor continuous at `x¹ = 0`.

use std::f64::consts::PI;

use crate::dispersion::{omega_bar, omega_cap, s_map, PhysicalParams};
use crate::free_modes::{cis, spinor_u, spinor_v, INV_SQRT_2PI};
use crate::spinor::{CurrentVector, SpacetimePoint, Spinor};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMode {
    pub params: PhysicalParams,
    pub k: f64,
    pub q: f64,
    pub r: f64,
    pub t: f64,
    omega_k: f64,
    omega_q: f64,
}

/// Reflection and transmission coefficients for `k` with transmitted `q`.
pub(crate) fn coefficients(k: f64, q: f64, p: &PhysicalParams) -> (f64, f64) {
    let (kappa, v) = (p.kappa, p.height);
    let r = -2.0 * kappa * v / (v * v - (k - q) * (k - q));
    let t = -2.0 * (k / kappa) * omega_cap(k, p) * omega_cap(-q, p) / (v + k - q);
    (r, t)
}

pub fn make_step_mode(k: f64, p: &PhysicalParams) -> Result<StepMode> {
    p.check_klein_window(k)?;
    let q = s_map(k, p)?;
    let (r, t) = coefficients(k, q, p);
    Ok(StepMode {
        params: *p,
        k,
        q,
        r,
        t,
        omega_k: omega_bar(k, p),
        omega_q: omega_bar(q, p),
    })
}

impl StepMode {
    pub fn omega_k(&self) -> f64 {
        self.omega_k
    }

    pub fn omega_q(&self) -> f64 {
        self.omega_q
    }

    /// Mode-wise reflection probability `r²`.
    pub fn reflection(&self) -> f64 {
        self.r * self.r
    }

    /// Mode-wise transmission probability `q t²/k`.
    pub fn transmission(&self) -> f64 {
        self.q * self.t * self.t / self.k
    }

    pub fn eval(&self, pt: SpacetimePoint) -> Spinor {
        eval_step_mode(self, pt)
    }

    pub fn current(&self, pt: SpacetimePoint) -> CurrentVector {
        current_step_mode(self, pt)
    }

    /// Slope `dx⁰/dx¹ = ω̄(q)/q` of every trajectory on `x¹ > 0`.
    pub fn transmitted_slope(&self) -> f64 {
        self.omega_q / self.q
    }
}

pub fn eval_step_mode(m: &StepMode, pt: SpacetimePoint) -> Spinor {
    let p = &m.params;
    if pt.x1 < 0.0 {
        let time = cis(-m.omega_k * pt.x0);
        let right = spinor_u(m.k, p) * cis(m.k * pt.x1);
        let left = spinor_u(-m.k, p) * (cis(-m.k * pt.x1) * m.r);
        (right + left) * (time * INV_SQRT_2PI)
    } else {
        let phase = cis(-p.height * pt.x0) * cis(m.omega_q * pt.x0 - m.q * pt.x1);
        spinor_v(m.q, p) * (phase * (m.t * INV_SQRT_2PI))
    }
}

/// Closed-form current:
/// `π j = t²(ω̄(q)∂₀ + q∂₁) + 2κr Θ(−x¹)(cos(2kx¹) − 1)∂₀`.
///
/// The interference of `U_k` and `U_{−k}` beats at `2k`.
pub fn current_step_mode(m: &StepMode, pt: SpacetimePoint) -> CurrentVector {
    let t_sq = m.t * m.t;
    let mut j0 = t_sq * m.omega_q;
    if pt.x1 < 0.0 {
        j0 += 2.0 * m.params.kappa * m.r * ((2.0 * m.k * pt.x1).cos() - 1.0);
    }
    CurrentVector::new(j0 / PI, t_sq * m.q / PI)
}

pub fn velocity_step_mode(m: &StepMode, pt: SpacetimePoint) -> f64 {
    current_step_mode(m, pt).velocity()
}

/// Lower bound `q/(ω̄(q) + 4κ|r|/t²)` of the velocity on `x¹ < 0`.
pub fn min_velocity(m: &StepMode) -> f64 {
    m.q / (m.omega_q + 4.0 * m.params.kappa * m.r.abs() / (m.t * m.t))
}

/// Time `x⁰` at which the trajectory through `(τ, 0)` reaches `x1`:
/// `x⁰ − τ = (ω̄(q)/q)x¹ − (κr/(k q t²)) Θ(−x¹)(2kx¹ − sin(2kx¹))`,
/// the integral of `j⁰/j¹` along `x¹`.
pub fn closed_form_trajectory(m: &StepMode, tau: f64, x1: f64) -> f64 {
    let mut x0 = tau + m.transmitted_slope() * x1;
    if x1 < 0.0 {
        let kx = 2.0 * m.k * x1;
        x0 -= m.params.kappa * m.r / (m.k * m.q * m.t * m.t) * (kx - kx.sin());
    }
    x0
}

/// Inverse of [`closed_form_trajectory`] in its second argument: the `x¹`
/// reached at time `x0` by the trajectory through `(τ, 0)`.
pub fn closed_form_position(m: &StepMode, tau: f64, x0: f64) -> f64 {
    let slope = m.transmitted_slope();
    if x0 >= tau {
        return (x0 - tau) / slope;
    }
    // x⁰(x¹) is strictly increasing with slope ≥ ω̄(q)/q; bracket and bisect.
    let max_slope = 1.0 / min_velocity(m);
    let mut lo = (x0 - tau) / slope;
    let mut hi = (x0 - tau) / max_slope;
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if closed_form_trajectory(m, tau, mid) < x0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}
