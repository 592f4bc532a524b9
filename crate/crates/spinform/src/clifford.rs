//! Clifford actions on the rank-2 complex spinor fiber.
//!
//! Fixed matrix representations (σⱼ the standard Pauli matrices):
//!
//! * dimension 3: eⱼ ↦ −iσⱼ, so the complex volume form ω₃ = −e₁·e₂·e₃ acts
//!   as the identity;
//! * dimension 2 (induced on a hypersurface with normal e₃): e₁ ↦ iσ₂ and
//!   e₂ ↦ −iσ₁, which are exactly the matrices of e₁·e₃· and e₂·e₃· in the
//!   3-dimensional representation. With this choice the identification of the
//!   ambient and intrinsic spinor bundles is the identity map on fibers, and
//!   iω = σ₃ so the half-spinor spaces Σ± are the coordinate axes.
//!
//! The Hermitian inner product is conjugate-linear in its second argument.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// A point in the rank-2 complex spinor fiber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl Spinor {
    pub const fn new(z1: Complex64, z2: Complex64) -> Self {
        Spinor { z1, z2 }
    }

    pub fn from_re(a: f64, b: f64) -> Self {
        Spinor::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn zero() -> Self {
        Spinor::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// |φ|² = |z1|² + |z2|².
    pub fn norm_sqr(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Positive half-spinor φ⁺ = (z1, 0), the +1 eigenvector part of iω.
    pub fn plus(&self) -> Spinor {
        Spinor::new(self.z1, Complex64::new(0.0, 0.0))
    }

    /// Negative half-spinor φ⁻ = (0, z2).
    pub fn minus(&self) -> Spinor {
        Spinor::new(Complex64::new(0.0, 0.0), self.z2)
    }

    pub fn is_finite(&self) -> bool {
        self.z1.re.is_finite()
            && self.z1.im.is_finite()
            && self.z2.re.is_finite()
            && self.z2.im.is_finite()
    }

    /// Components as (Re z1, Im z1, Re z2, Im z2), the report serialization.
    pub fn flat(&self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.z1 + rhs.z1, self.z2 + rhs.z2)
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.z1 - rhs.z1, self.z2 - rhs.z2)
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.z1, -self.z2)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, s: f64) -> Spinor {
        Spinor::new(self.z1 * s, self.z2 * s)
    }
}

impl Mul<Complex64> for Spinor {
    type Output = Spinor;
    fn mul(self, s: Complex64) -> Spinor {
        Spinor::new(self.z1 * s, self.z2 * s)
    }
}

/// Tangent vector in frame coefficients (a₁, a₂) with respect to a local
/// orthonormal basis (e₁, e₂).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVec2 {
    pub a1: f64,
    pub a2: f64,
}

impl TangentVec2 {
    pub const E1: TangentVec2 = TangentVec2 { a1: 1.0, a2: 0.0 };
    pub const E2: TangentVec2 = TangentVec2 { a1: 0.0, a2: 1.0 };

    pub const fn new(a1: f64, a2: f64) -> Self {
        TangentVec2 { a1, a2 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a1 * self.a1 + self.a2 * self.a2
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// Tangent vector in frame coefficients (a₁, a₂, a₃).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVec3 {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl TangentVec3 {
    pub const E1: TangentVec3 = TangentVec3 {
        a1: 1.0,
        a2: 0.0,
        a3: 0.0,
    };
    pub const E2: TangentVec3 = TangentVec3 {
        a1: 0.0,
        a2: 1.0,
        a3: 0.0,
    };
    pub const E3: TangentVec3 = TangentVec3 {
        a1: 0.0,
        a2: 0.0,
        a3: 1.0,
    };

    pub const fn new(a1: f64, a2: f64, a3: f64) -> Self {
        TangentVec3 { a1, a2, a3 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3
    }
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

// e₁ ↦ iσ₂ : (z1, z2) ↦ (z2, −z1)
fn m1(p: Spinor) -> Spinor {
    Spinor::new(p.z2, -p.z1)
}

// e₂ ↦ −iσ₁ : (z1, z2) ↦ (−i z2, −i z1)
fn m2(p: Spinor) -> Spinor {
    Spinor::new(-I * p.z2, -I * p.z1)
}

// Three-dimensional action eⱼ ↦ −iσⱼ.
fn n1(p: Spinor) -> Spinor {
    Spinor::new(-I * p.z2, -I * p.z1)
}

fn n2(p: Spinor) -> Spinor {
    Spinor::new(-p.z2, p.z1)
}

fn n3(p: Spinor) -> Spinor {
    Spinor::new(-I * p.z1, I * p.z2)
}

/// Clifford multiplication X·φ in the induced 2-dimensional representation.
pub fn mul2(x: TangentVec2, phi: Spinor) -> Spinor {
    m1(phi) * x.a1 + m2(phi) * x.a2
}

/// Clifford multiplication X·ψ in the 3-dimensional representation.
pub fn mul3(x: TangentVec3, psi: Spinor) -> Spinor {
    n1(psi) * x.a1 + n2(psi) * x.a2 + n3(psi) * x.a3
}

/// Action of the real volume form ω = e₁·e₂ (equals −iσ₃ in the fixed basis).
pub fn volume2(phi: Spinor) -> Spinor {
    mul2(TangentVec2::E1, mul2(TangentVec2::E2, phi))
}

/// φ̄ = φ⁺ − φ⁻, i.e. (z1, z2) ↦ (z1, −z2). Complex-linear involution.
pub fn conjugate(phi: Spinor) -> Spinor {
    Spinor::new(phi.z1, -phi.z2)
}

/// Hermitian inner product (φ, ψ), conjugate-linear in the second slot.
pub fn inner(phi: Spinor, psi: Spinor) -> Complex64 {
    phi.z1 * psi.z1.conj() + phi.z2 * psi.z2.conj()
}

/// Re(φ, ψ) — the real scalar product the identities are stated with.
pub fn re_inner(phi: Spinor, psi: Spinor) -> f64 {
    inner(phi, psi).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sp(a: (f64, f64), b: (f64, f64)) -> Spinor {
        Spinor::new(c(a.0, a.1), c(b.0, b.1))
    }

    fn assert_close(a: Spinor, b: Spinor, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "spinors differ: {a:?} vs {b:?} (|diff| = {})",
            (a - b).norm()
        );
    }

    #[test]
    fn fixed_representation_values() {
        let one = Spinor::from_re(1.0, 0.0);
        assert_close(mul2(TangentVec2::E1, one), sp((0.0, 0.0), (-1.0, 0.0)), 0.0);
        assert_close(mul2(TangentVec2::E2, one), sp((0.0, 0.0), (0.0, -1.0)), 0.0);
        assert_close(mul3(TangentVec3::E3, one), sp((0.0, -1.0), (0.0, 0.0)), 0.0);
        assert_close(volume2(one), sp((0.0, -1.0), (0.0, 0.0)), 0.0);
        // iω·(1,0) = (1,0): Σ⁺ is the +1 eigenspace of iω.
        assert_close(volume2(one) * I, one, 0.0);
    }

    #[test]
    fn zero_vector_acts_as_zero() {
        let phi = sp((0.3, -1.2), (2.0, 0.7));
        assert_close(mul2(TangentVec2::new(0.0, 0.0), phi), Spinor::zero(), 0.0);
        assert_close(
            mul3(TangentVec3::new(0.0, 0.0, 0.0), phi),
            Spinor::zero(),
            0.0,
        );
    }

    #[test]
    fn volume3_acts_as_identity() {
        // −e₁·e₂·e₃·φ = φ
        let phi = sp((1.0, 0.0), (0.0, 1.0));
        let w = -mul3(
            TangentVec3::E1,
            mul3(TangentVec3::E2, mul3(TangentVec3::E3, phi)),
        );
        assert_close(w, phi, 1e-15);
    }

    #[test]
    fn clifford_anticommutation() {
        let phi = sp((0.5, 1.5), (-0.25, 2.0));
        let e = [TangentVec2::E1, TangentVec2::E2];
        for (j, &ej) in e.iter().enumerate() {
            for (k, &ek) in e.iter().enumerate() {
                let lhs = mul2(ej, mul2(ek, phi)) + mul2(ek, mul2(ej, phi));
                let rhs = if j == k { -(phi * 2.0) } else { Spinor::zero() };
                assert_close(lhs, rhs, 1e-14);
            }
        }
        let f = [TangentVec3::E1, TangentVec3::E2, TangentVec3::E3];
        for (j, &fj) in f.iter().enumerate() {
            for (k, &fk) in f.iter().enumerate() {
                let lhs = mul3(fj, mul3(fk, phi)) + mul3(fk, mul3(fj, phi));
                let rhs = if j == k { -(phi * 2.0) } else { Spinor::zero() };
                assert_close(lhs, rhs, 1e-14);
            }
        }
    }

    #[test]
    fn conjugate_is_involutive_and_matches_volume_form() {
        let phi = sp((1.0, 0.0), (0.0, 1.0));
        assert_close(conjugate(conjugate(phi)), phi, 0.0);
        assert_close(
            conjugate(sp((1.0, 0.0), (0.0, 1.0))),
            sp((1.0, 0.0), (0.0, -1.0)),
            0.0,
        );
        // ω·φ = −i φ̄ for φ = (2, 3i)
        let phi = sp((2.0, 0.0), (0.0, 3.0));
        assert_close(volume2(phi), conjugate(phi) * (-I), 1e-15);
        // φ̄ = iω·φ, the form used by the transport equation.
        assert_close(conjugate(phi), volume2(phi) * I, 1e-15);
    }

    #[test]
    fn inner_product_examples() {
        let phi = sp((1.0, 0.0), (0.0, 1.0));
        assert!((inner(phi, phi) - c(2.0, 0.0)).norm() < 1e-15);
        let up = Spinor::from_re(1.0, 0.0);
        let dn = Spinor::from_re(0.0, 1.0);
        assert!(inner(up, dn).norm() < 1e-15);
        // Clifford multiplication is skew-symmetric for Re( , ).
        let psi = sp((1.0, 0.0), (2.0, 1.0));
        assert!(re_inner(mul2(TangentVec2::E1, psi), psi).abs() < 1e-14);
    }

    #[test]
    fn half_spinor_split() {
        let phi = sp((0.4, -0.3), (1.1, 0.2));
        assert_close(phi.plus() + phi.minus(), phi, 0.0);
        // iω·φ± = ±φ±
        assert_close(volume2(phi.plus()) * I, phi.plus(), 1e-15);
        assert_close(volume2(phi.minus()) * I, -phi.minus(), 1e-15);
    }

    #[test]
    fn restriction_identities_are_matrix_identities() {
        // (e₁·₃ψ) = e₂·ψ = −e₁·ω·ψ, (e₂·₃ψ) = −e₁·ψ, (ν·₃ψ) = ω·ψ with ν = e₃.
        let psi = sp((0.9, -0.1), (0.3, 0.8));
        assert_close(mul3(TangentVec3::E1, psi), mul2(TangentVec2::E2, psi), 0.0);
        assert_close(
            mul3(TangentVec3::E1, psi),
            -mul2(TangentVec2::E1, volume2(psi)),
            1e-15,
        );
        assert_close(mul3(TangentVec3::E2, psi), -mul2(TangentVec2::E1, psi), 0.0);
        assert_close(mul3(TangentVec3::E3, psi), volume2(psi), 0.0);
    }

    #[test]
    fn identification_is_exact() {
        // (X·₃ e₃·₃ ψ) = X·ψ componentwise, bit-exact.
        let psi = sp((0.37, 1.25), (-0.6, 0.04));
        let x = TangentVec2::new(-1.7, 0.45);
        let x3 = TangentVec3::new(x.a1, x.a2, 0.0);
        let via3 = mul3(x3, mul3(TangentVec3::E3, psi));
        let via2 = mul2(x, psi);
        assert_eq!(via3, via2);
    }
}
