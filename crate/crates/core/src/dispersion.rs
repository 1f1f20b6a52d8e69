//! Kinematics of the free Dirac field: dispersion `ω̄`, spinor weight `Ω`,
//! group velocity, and the map `s` that pairs an incoming wave number with
//! the transmitted one across a step of height `V`.

use crate::error::{DomainViolation, Error, Result};

/// Mass scale `κ` and step height `V`, both in the same units (κ = 1 by
/// default, so every length is measured in Compton lengths).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub kappa: f64,
    pub height: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            kappa: 1.0,
            height: 0.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(kappa: f64, height: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid(format!("κ must be positive and finite, got {kappa}")));
        }
        if !height.is_finite() {
            return Err(Error::invalid(format!("V must be finite, got {height}")));
        }
        Ok(PhysicalParams { kappa, height })
    }

    /// Unit mass, step height `v` (in units of κ).
    pub fn with_height(height: f64) -> Self {
        PhysicalParams { kappa: 1.0, height }
    }

    pub fn check_klein_regime(&self) -> Result<()> {
        if self.height > 2.0 * self.kappa {
            Ok(())
        } else {
            Err(Error::Domain(DomainViolation::NoKleinRegime {
                height: self.height,
                kappa: self.kappa,
            }))
        }
    }

    /// Upper end `√(V² − 2κV)` of the step map domain, which coincides with
    /// the Klein window `ω̄(k) < V − κ` for `k > 0`.
    pub fn klein_k_max(&self) -> Result<f64> {
        self.check_klein_regime()?;
        Ok((self.height * self.height - 2.0 * self.kappa * self.height).sqrt())
    }

    /// Checks `0 < k` and `ω̄(k) < V − κ`.
    pub fn check_klein_window(&self, k: f64) -> Result<()> {
        let upper = self.klein_k_max()?;
        if k > 0.0 && k < upper && omega_bar(k, self) < self.height - self.kappa {
            Ok(())
        } else {
            Err(Error::Domain(DomainViolation::OutsideKleinWindow { k, upper }))
        }
    }
}

pub fn omega_bar(k: f64, p: &PhysicalParams) -> f64 {
    p.kappa.hypot(k)
}

/// `Ω(k) = √(ω̄(k) + k)`.
pub fn omega_cap(k: f64, p: &PhysicalParams) -> f64 {
    let w = omega_bar(k, p);
    if k >= 0.0 {
        (w + k).sqrt()
    } else {
        // ω̄ + k = κ²/(ω̄ − k), free of cancellation for large negative k
        (p.kappa * p.kappa / (w - k)).sqrt()
    }
}

pub fn group_velocity(k: f64, p: &PhysicalParams) -> f64 {
    k / omega_bar(k, p)
}

/// Transmitted wave number `q = s(k)` with `ω̄(k) + ω̄(q) = V`.
pub fn s_map(k: f64, p: &PhysicalParams) -> Result<f64> {
    let upper = p.klein_k_max()?;
    if !(k > 0.0 && k < upper) {
        return Err(Error::Domain(DomainViolation::OutsideStepMap { k, upper }));
    }
    let v = p.height;
    let q_sq = v * v - 2.0 * v * omega_bar(k, p) + k * k;
    Ok(q_sq.max(0.0).sqrt())
}

/// Fixed point `k₀ = (V/2)√(1 − (2κ/V)²)` of the step map.
pub fn fixed_point_k0(p: &PhysicalParams) -> Result<f64> {
    p.check_klein_regime()?;
    let ratio = 2.0 * p.kappa / p.height;
    Ok(0.5 * p.height * (1.0 - ratio * ratio).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PhysicalParams {
        PhysicalParams::default()
    }

    /// Solves ω̄(q) = target on (0, ∞) by bisection.
    fn bisect_q(target: f64, p: &PhysicalParams) -> f64 {
        let (mut lo, mut hi) = (0.0f64, target + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if omega_bar(mid, p) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn omega_bar_values() {
        assert_eq!(omega_bar(0.0, &unit()), 1.0);
        assert!((omega_bar(0.3, &unit()) - 1.09f64.sqrt()).abs() < 1e-15);
        assert!((omega_bar(0.3, &unit()) - 1.044_030_650_891_055).abs() < 1e-14);
        assert_eq!(omega_bar(-2.7, &unit()), omega_bar(2.7, &unit()));
    }

    #[test]
    fn omega_cap_values() {
        let p = unit();
        assert_eq!(omega_cap(0.0, &p), 1.0);
        assert!((omega_cap(0.5, &p) * omega_cap(-0.5, &p) - 1.0).abs() < 1e-15);
        let direct = (1.25f64.sqrt() + 0.5).sqrt();
        assert!((omega_cap(0.5, &p) - direct).abs() < 1e-15);
        assert!((omega_cap(0.5, &p) - 1.272_019_649_514_069).abs() < 1e-12);
        let direct_neg = (1.25f64.sqrt() - 0.5).sqrt();
        assert!((omega_cap(-0.5, &p) - direct_neg).abs() < 1e-15);
    }

    #[test]
    fn group_velocity_values() {
        let p = unit();
        assert_eq!(group_velocity(0.0, &p), 0.0);
        assert!((group_velocity(0.3, &p) - 0.3 / 1.09f64.sqrt()).abs() < 1e-15);
        assert!((group_velocity(2.7, &p) - 2.7 / 8.29f64.sqrt()).abs() < 1e-15);
        let mut prev = -1.0;
        for i in -100..=100 {
            let v = group_velocity(i as f64 * 0.1, &p);
            assert!(v > prev && v.abs() < 1.0);
            prev = v;
        }
    }

    #[test]
    fn s_map_against_bisection() {
        let p = PhysicalParams::with_height(4.0);
        let q = s_map(0.3, &p).unwrap();
        let oracle = bisect_q(4.0 - omega_bar(0.3, &p), &p);
        assert!((q - oracle).abs() < 1e-12);
        assert!((q - 2.7816).abs() < 1e-4);

        let p = PhysicalParams::with_height(2.25);
        let q = s_map(0.5, &p).unwrap();
        let oracle = bisect_q(2.25 - omega_bar(0.5, &p), &p);
        assert!((q - oracle).abs() < 1e-12);
        assert!((q - 0.530421).abs() < 1e-6);
    }

    #[test]
    fn s_map_domain() {
        let p = PhysicalParams::with_height(4.0);
        assert!(s_map(0.0, &p).is_err());
        assert!(s_map(8.0f64.sqrt(), &p).is_err());
        assert!(s_map(-0.1, &p).is_err());
        let low = PhysicalParams::with_height(1.5);
        assert!(matches!(
            s_map(0.3, &low),
            Err(Error::Domain(DomainViolation::NoKleinRegime { .. }))
        ));
    }

    #[test]
    fn fixed_point() {
        let p = PhysicalParams::with_height(4.0);
        let k0 = fixed_point_k0(&p).unwrap();
        assert!((k0 - 3f64.sqrt()).abs() < 1e-15);
        assert!((s_map(k0, &p).unwrap() - k0).abs() < 1e-12);

        let p = PhysicalParams::with_height(2.25);
        let k0 = fixed_point_k0(&p).unwrap();
        let direct = 1.125 * (1.0 - (2.0f64 / 2.25).powi(2)).sqrt();
        assert!((k0 - direct).abs() < 1e-15);
        assert!((k0 - 0.515388).abs() < 1e-6);
        assert!((s_map(k0, &p).unwrap() - k0).abs() < 1e-12);

        let near = fixed_point_k0(&PhysicalParams::with_height(2.0 + 1e-10)).unwrap();
        assert!(near < 1e-4);
        assert!(fixed_point_k0(&PhysicalParams::with_height(2.0)).is_err());
    }

    #[test]
    fn involution_monotone_energy_partition() {
        for &v in &[2.25, 3.0, 4.0, 7.5] {
            let p = PhysicalParams::with_height(v);
            let upper = p.klein_k_max().unwrap();
            let mut prev = f64::INFINITY;
            for i in 1..=200 {
                let k = upper * i as f64 / 201.0;
                let q = s_map(k, &p).unwrap();
                assert!((s_map(q, &p).unwrap() - k).abs() < 1e-10, "v={v} k={k}");
                assert!(q < prev);
                prev = q;
                let sum = omega_bar(k, &p) + omega_bar(q, &p);
                assert!((sum - v).abs() <= 1e-12 * v);
            }
        }
    }

    #[test]
    fn omega_bar_bounded_below() {
        let p = PhysicalParams::new(0.7, 0.0).unwrap();
        assert_eq!(omega_bar(0.0, &p), 0.7);
        for i in 1..50 {
            assert!(omega_bar(i as f64 * 0.13, &p) > 0.7);
        }
    }
}
