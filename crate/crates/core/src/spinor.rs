//! Two-component spinors over the orthonormal basis `(e₁, e₂)`, the two
//! gamma maps of 1+1 dimensions, the scalar product `S`, the indefinite
//! Lorentz-invariant product `L(v, w) = S(v, γ⁰w)` and the current bilinear.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor {
        c1: Complex64::new(0.0, 0.0),
        c2: Complex64::new(0.0, 0.0),
    };

    pub fn new(c1: Complex64, c2: Complex64) -> Self {
        Spinor { c1, c2 }
    }

    pub fn real(c1: f64, c2: f64) -> Self {
        Spinor::new(Complex64::new(c1, 0.0), Complex64::new(c2, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }

    /// Largest absolute component difference; used for convergence and
    /// agreement checks.
    pub fn max_abs_diff(&self, other: &Spinor) -> f64 {
        (self.c1 - other.c1).norm().max((self.c2 - other.c2).norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.c1.norm().max(self.c2.norm())
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.c1 + rhs.c1, self.c2 + rhs.c2)
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, rhs: Spinor) {
        self.c1 += rhs.c1;
        self.c2 += rhs.c2;
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.c1 - rhs.c1, self.c2 - rhs.c2)
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.c1, -self.c2)
    }
}

impl Mul<Complex64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: Complex64) -> Spinor {
        Spinor::new(self.c1 * rhs, self.c2 * rhs)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: f64) -> Spinor {
        Spinor::new(self.c1 * rhs, self.c2 * rhs)
    }
}

/// Point of the spacetime plane in the standard chart, lengths in units of 1/κ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimePoint {
    pub x0: f64,
    pub x1: f64,
}

impl SpacetimePoint {
    pub fn new(x0: f64, x1: f64) -> Self {
        SpacetimePoint { x0, x1 }
    }
}

/// Current `j = j⁰∂₀ + j¹∂₁`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurrentVector {
    pub j0: f64,
    pub j1: f64,
}

impl CurrentVector {
    pub fn new(j0: f64, j1: f64) -> Self {
        CurrentVector { j0, j1 }
    }

    /// Minkowski square `j⁰² − j¹²`.
    pub fn minkowski_square(&self) -> f64 {
        self.j0 * self.j0 - self.j1 * self.j1
    }

    /// `j¹/j⁰`; NaN where the density vanishes.
    pub fn velocity(&self) -> f64 {
        self.j1 / self.j0
    }
}

/// `γ⁰`: swaps the two components.
pub fn gamma0(s: Spinor) -> Spinor {
    Spinor::new(s.c2, s.c1)
}

/// `γ¹`: `(c₁, c₂) ↦ (−c₂, c₁)`.
pub fn gamma1(s: Spinor) -> Spinor {
    Spinor::new(-s.c2, s.c1)
}

/// Sesquilinear scalar product, antilinear in the first slot.
pub fn scalar_inner(v: Spinor, w: Spinor) -> Complex64 {
    v.c1.conj() * w.c1 + v.c2.conj() * w.c2
}

pub fn lorentz_inner(v: Spinor, w: Spinor) -> Complex64 {
    v.c2.conj() * w.c1 + v.c1.conj() * w.c2
}

pub fn current_of(s: Spinor) -> CurrentVector {
    let a = s.c1.norm_sqr();
    let b = s.c2.norm_sqr();
    CurrentVector::new(a + b, a - b)
}
