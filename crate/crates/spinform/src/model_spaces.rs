//! The four ambient model geometries: R³, S³ ⊂ R⁴, H³ in Minkowski R^{3,1}
//! (upper hyperboloid), and R⁴.
//!
//! Each carries its inner product, tangent projection, ambient covariant
//! derivative (projection of the flat derivative), and the Killing constant η
//! (0 on R³/R⁴, 1/2 on S³, i/2 on H³).

use crate::error::{Error, Result};
use crate::fd;
use num_complex::Complex64;
use serde::Serialize;
use std::ops::{Add, Mul, Neg, Sub};

/// Tolerance for "point lies on the model space".
pub const ON_SPACE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpaceKind {
    R3,
    S3,
    H3,
    R4,
}

impl SpaceKind {
    pub fn ambient_dim(self) -> usize {
        match self {
            SpaceKind::R3 => 3,
            _ => 4,
        }
    }

    /// Killing constant of the space form.
    pub fn eta(self) -> Complex64 {
        match self {
            SpaceKind::R3 | SpaceKind::R4 => Complex64::new(0.0, 0.0),
            SpaceKind::S3 => Complex64::new(0.5, 0.0),
            SpaceKind::H3 => Complex64::new(0.0, 0.5),
        }
    }

    /// The constant 4η², i.e. the sectional curvature of the space form.
    pub fn four_eta_sq(self) -> f64 {
        match self {
            SpaceKind::R3 | SpaceKind::R4 => 0.0,
            SpaceKind::S3 => 1.0,
            SpaceKind::H3 => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::R3 => "R3",
            SpaceKind::S3 => "S3",
            SpaceKind::H3 => "H3",
            SpaceKind::R4 => "R4",
        }
    }

    /// Ambient inner product: Euclidean dot for R3/S3/R4, Minkowski
    /// (−,+,+,+) for H3.
    pub fn inner(self, u: &AmbientVec, v: &AmbientVec) -> f64 {
        debug_assert_eq!(u.dim, v.dim);
        match self {
            SpaceKind::H3 => -u.c[0] * v.c[0] + u.c[1] * v.c[1] + u.c[2] * v.c[2] + u.c[3] * v.c[3],
            _ => u.dot(v),
        }
    }
}

/// Ambient coordinate vector (3 or 4 components).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientVec {
    c: [f64; 4],
    dim: usize,
}

impl AmbientVec {
    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        AmbientVec {
            c: [x, y, z, 0.0],
            dim: 3,
        }
    }

    pub fn new4(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        AmbientVec {
            c: [x0, x1, x2, x3],
            dim: 4,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        AmbientVec { c: [0.0; 4], dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> f64 {
        debug_assert!(i < self.dim);
        self.c[i]
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    /// Plain Euclidean dot product of the coordinates.
    pub fn dot(&self, other: &AmbientVec) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.c[0] * other.c[0]
            + self.c[1] * other.c[1]
            + self.c[2] * other.c[2]
            + self.c[3] * other.c[3]
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|x| x.is_finite())
    }
}

impl Add for AmbientVec {
    type Output = AmbientVec;
    fn add(self, o: AmbientVec) -> AmbientVec {
        debug_assert_eq!(self.dim, o.dim);
        let mut c = [0.0; 4];
        for i in 0..4 {
            c[i] = self.c[i] + o.c[i];
        }
        AmbientVec { c, dim: self.dim }
    }
}

impl Sub for AmbientVec {
    type Output = AmbientVec;
    fn sub(self, o: AmbientVec) -> AmbientVec {
        debug_assert_eq!(self.dim, o.dim);
        let mut c = [0.0; 4];
        for i in 0..4 {
            c[i] = self.c[i] - o.c[i];
        }
        AmbientVec { c, dim: self.dim }
    }
}

impl Mul<f64> for AmbientVec {
    type Output = AmbientVec;
    fn mul(self, s: f64) -> AmbientVec {
        let mut c = [0.0; 4];
        for i in 0..4 {
            c[i] = self.c[i] * s;
        }
        AmbientVec { c, dim: self.dim }
    }
}

impl Neg for AmbientVec {
    type Output = AmbientVec;
    fn neg(self) -> AmbientVec {
        self * -1.0
    }
}

/// Ambient inner product as a checked operation.
pub fn metric(space: SpaceKind, u: &AmbientVec, v: &AmbientVec) -> Result<f64> {
    if u.dim() != space.ambient_dim() || v.dim() != space.ambient_dim() {
        return Err(Error::DimensionMismatch(u.dim(), v.dim()));
    }
    Ok(space.inner(u, v))
}

/// Quadric residual: how far p is from the model space.
fn quadric_residual(space: SpaceKind, p: &AmbientVec) -> f64 {
    match space {
        SpaceKind::S3 => (space.inner(p, p) - 1.0).abs(),
        SpaceKind::H3 => {
            (space.inner(p, p) + 1.0)
                .abs()
                .max(if p.get(0) > 0.0 { 0.0 } else { 1.0 })
        }
        _ => 0.0,
    }
}

pub fn check_on_space(space: SpaceKind, p: &AmbientVec) -> Result<()> {
    let r = quadric_residual(space, p);
    if r > ON_SPACE_TOL {
        return Err(Error::OffModelSpace(r));
    }
    Ok(())
}

/// Rescale p exactly onto the quadric (identity on flat spaces).
pub fn renormalize(space: SpaceKind, p: AmbientVec) -> AmbientVec {
    match space {
        SpaceKind::S3 => {
            let n = p.dot(&p).sqrt();
            p * (1.0 / n)
        }
        SpaceKind::H3 => {
            let q = -space.inner(&p, &p);
            p * (1.0 / q.sqrt())
        }
        _ => p,
    }
}

/// Remove the component of w along the position normal of the quadric:
/// S³: w − ⟨w,p⟩p; H³: w + ⟨w,p⟩p (Minkowski product); identity on R³/R⁴.
pub fn tangent_project(space: SpaceKind, p: &AmbientVec, w: &AmbientVec) -> Result<AmbientVec> {
    check_on_space(space, p)?;
    Ok(project_unchecked(space, p, w))
}

pub(crate) fn project_unchecked(space: SpaceKind, p: &AmbientVec, w: &AmbientVec) -> AmbientVec {
    match space {
        SpaceKind::S3 => *w - *p * space.inner(w, p),
        SpaceKind::H3 => *w + *p * space.inner(w, p),
        _ => *w,
    }
}

/// Covariant derivative ∇ᴺ of a vector field along a curve on the model
/// space: finite-difference derivative projected onto the tangent space.
pub fn ambient_cov_deriv<G, V>(
    space: SpaceKind,
    gamma: G,
    field: V,
    t: f64,
    step: f64,
) -> Result<AmbientVec>
where
    G: Fn(f64) -> AmbientVec,
    V: Fn(f64) -> AmbientVec,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::DegenerateStep(step));
    }
    let p = renormalize(space, gamma(t));
    check_on_space(space, &p)?;
    let d = fd::deriv1(field, t, step);
    Ok(project_unchecked(space, &p, &d))
}

/// Cross product in R³.
pub fn cross3(a: &AmbientVec, b: &AmbientVec) -> AmbientVec {
    debug_assert!(a.dim() == 3 && b.dim() == 3);
    AmbientVec::new3(
        a.get(1) * b.get(2) - a.get(2) * b.get(1),
        a.get(2) * b.get(0) - a.get(0) * b.get(2),
        a.get(0) * b.get(1) - a.get(1) * b.get(0),
    )
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Generalized cross product in R⁴: the unique w with w·x = det[a, b, c, x]
/// for all x (rows).
pub fn cross4(a: &AmbientVec, b: &AmbientVec, c: &AmbientVec) -> AmbientVec {
    debug_assert!(a.dim() == 4 && b.dim() == 4 && c.dim() == 4);
    let rows = [a, b, c];
    let minor = |col: usize| -> f64 {
        let mut m = [[0.0; 3]; 3];
        for (r, v) in rows.iter().enumerate() {
            let mut cc = 0;
            for k in 0..4 {
                if k != col {
                    m[r][cc] = v.get(k);
                    cc += 1;
                }
            }
        }
        det3(m)
    };
    // Expansion of det[a, b, c, x] along the last row.
    AmbientVec::new4(-minor(0), minor(1), -minor(2), minor(3))
}

/// Flip the time component: maps Euclidean-orthogonality to
/// Minkowski-orthogonality.
pub fn minkowski_flip(v: &AmbientVec) -> AmbientVec {
    debug_assert_eq!(v.dim(), 4);
    AmbientVec::new4(-v.get(0), v.get(1), v.get(2), v.get(3))
}

pub fn det4(rows: [&AmbientVec; 4]) -> f64 {
    let w = cross4(rows[0], rows[1], rows[2]);
    w.dot(rows[3])
}
