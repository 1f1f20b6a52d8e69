//! Plane-wave solutions of the free Dirac equation.
//!
//! `√(2π) U_k = exp(−i(ω̄(k)x⁰ − kx¹)) u(k)` has positive frequency,
//! `√(2π) V_k = exp(i(ω̄(k)x⁰ − kx¹)) v(k)` negative frequency.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::{omega_bar, omega_cap, PhysicalParams};
use crate::spinor::{SpacetimePoint, Spinor};

/// `1/√(2π)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencySign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeMode {
    pub k: f64,
    pub sign: FrequencySign,
    pub params: PhysicalParams,
}

impl FreeMode {
    pub fn u(k: f64, params: PhysicalParams) -> Self {
        FreeMode {
            k,
            sign: FrequencySign::Positive,
            params,
        }
    }

    pub fn v(k: f64, params: PhysicalParams) -> Self {
        FreeMode {
            k,
            sign: FrequencySign::Negative,
            params,
        }
    }

    pub fn eval(&self, pt: SpacetimePoint) -> Spinor {
        eval_free_mode(self, pt)
    }
}

/// `u(k) = (Ω(k), Ω(−k))`.
pub fn spinor_u(k: f64, p: &PhysicalParams) -> Spinor {
    Spinor::real(omega_cap(k, p), omega_cap(-k, p))
}

/// `v(k) = (−Ω(k), Ω(−k))`.
pub fn spinor_v(k: f64, p: &PhysicalParams) -> Spinor {
    Spinor::real(-omega_cap(k, p), omega_cap(-k, p))
}

/// `exp(iθ)`.
#[inline]
pub(crate) fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

pub fn eval_free_mode(m: &FreeMode, pt: SpacetimePoint) -> Spinor {
    let w = omega_bar(m.k, &m.params);
    let phase = w * pt.x0 - m.k * pt.x1;
    match m.sign {
        FrequencySign::Positive => spinor_u(m.k, &m.params) * (cis(-phase) * INV_SQRT_2PI),
        FrequencySign::Negative => spinor_v(m.k, &m.params) * (cis(phase) * INV_SQRT_2PI),
    }
}

/// The constant current `(1/π)(ω̄(k)∂₀ + k∂₁)` shared by `U_k` and `V_k`.
pub fn plane_wave_current(k: f64, p: &PhysicalParams) -> crate::spinor::CurrentVector {
    crate::spinor::CurrentVector::new(omega_bar(k, p) / PI, k / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::{current_of, gamma1, lorentz_inner, scalar_inner};

    fn unit() -> PhysicalParams {
        PhysicalParams::default()
    }

    #[test]
    fn inv_sqrt_2pi() {
        assert!((INV_SQRT_2PI - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn spinor_values() {
        let p = unit();
        assert_eq!(spinor_u(0.0, &p), Spinor::real(1.0, 1.0));
        assert_eq!(spinor_v(0.0, &p), Spinor::real(-1.0, 1.0));
        let u = spinor_u(0.5, &p);
        assert_eq!(u.c1.re, omega_cap(0.5, &p));
        assert_eq!(u.c2.re, omega_cap(-0.5, &p));
        assert!((u.c1.re - 1.27202).abs() < 1e-5);
        assert!((u.c2.re - 0.78615).abs() < 1e-5);
        let v = spinor_v(0.8, &p);
        assert!(v.c1.re < 0.0 && v.c2.re > 0.0);
    }

    #[test]
    fn inner_product_relations() {
        let p = unit();
        let u = spinor_u(0.5, &p);
        assert!((scalar_inner(u, u).re - 5f64.sqrt()).abs() < 1e-14);
        assert!((scalar_inner(spinor_u(0.5, &p), spinor_u(-0.5, &p)).re - 2.0).abs() < 1e-14);
        assert!((lorentz_inner(u, gamma1(u)).re - 1.0).abs() < 1e-14);
        assert!(lorentz_inner(spinor_u(0.7, &p), gamma1(spinor_u(-0.7, &p))).norm() < 1e-14);
        let v = spinor_v(0.5, &p);
        assert!((lorentz_inner(v, gamma1(v)).re - 1.0).abs() < 1e-14);
        assert!((scalar_inner(spinor_v(1.3, &p), spinor_v(-1.3, &p)).re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn plane_wave_at_origin() {
        let p = unit();
        let s = eval_free_mode(&FreeMode::u(0.5, p), SpacetimePoint::new(0.0, 0.0));
        assert!((s.c1.re - 0.50746).abs() < 1e-4);
        assert!((s.c2.re - 0.31363).abs() < 1e-4);
        assert_eq!(s, spinor_u(0.5, &p) * INV_SQRT_2PI);
    }

    #[test]
    fn current_of_normalized_u() {
        let p = unit();
        let j = current_of(spinor_u(0.5, &p) * INV_SQRT_2PI);
        assert!((j.j0 - 1.25f64.sqrt() / PI).abs() < 1e-14);
        assert!((j.j0 - 0.35588).abs() < 1e-5);
        assert!((j.j1 - 0.5 / PI).abs() < 1e-14);
    }

    #[test]
    fn current_is_constant() {
        let p = unit();
        let expected = plane_wave_current(0.5, &p);
        for i in 0..10 {
            let pt = SpacetimePoint::new(37.1 * i as f64 - 120.0, -13.7 * i as f64 + 55.0);
            for m in [FreeMode::u(0.5, p), FreeMode::v(0.5, p)] {
                let j = current_of(m.eval(pt));
                assert!((j.j0 - expected.j0).abs() < 1e-12);
                assert!((j.j1 - expected.j1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_along_phase_velocity() {
        let p = unit();
        let k = 0.5;
        let w = omega_bar(k, &p);
        let base = SpacetimePoint::new(1.3, -0.4);
        let moved = SpacetimePoint::new(base.x0 + 2.0, base.x1 + 2.0 * w / k);
        for m in [FreeMode::u(k, p), FreeMode::v(k, p)] {
            assert!(m.eval(base).max_abs_diff(&m.eval(moved)) < 1e-14);
        }
    }
}
