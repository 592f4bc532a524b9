//! Parametrized surface charts in R³/S³/H³: orthonormal frames, unit normal,
//! shape operator, mean curvature, intrinsic curvature via the Brioschi
//! formula, and the built-in catalog of closed-form test surfaces.
//!
//! Conventions:
//! * e₁ = ∂u/|∂u|, e₂ by Gram-Schmidt from ∂v; ν completes (e₁, e₂, ν) to a
//!   positively oriented basis of the model-space tangent space (for S³/H³
//!   "positively oriented" means det[p, e₁, e₂, ν] > 0 with p the position).
//! * The orientation flag flips e₂ and ν together, so the triple stays
//!   positively oriented while ν ↦ −ν.
//! * S(X) = −∇ᴺ_X ν, H = ½ tr S. The unit sphere with inward normal has
//!   S = Id and H = 1; the curvature convention makes R₁₂₁₂ = +1 on it.

use crate::error::{Error, Result};
use crate::fd::{self, FD_STEP};
use crate::model_spaces::{
    cross3, cross4, minkowski_flip, project_unchecked, renormalize, AmbientVec, SpaceKind,
};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::sync::Arc;

/// Symmetric 2×2 tensor in the orthonormal frame (houses T, S = 2T, h, and
/// reconstructed energy-momentum values).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymTensor {
    pub t11: f64,
    pub t12: f64,
    pub t22: f64,
}

impl SymTensor {
    pub const ZERO: SymTensor = SymTensor {
        t11: 0.0,
        t12: 0.0,
        t22: 0.0,
    };

    pub fn new(t11: f64, t12: f64, t22: f64) -> Self {
        SymTensor { t11, t12, t22 }
    }

    pub fn identity() -> Self {
        SymTensor::new(1.0, 0.0, 1.0)
    }

    pub fn diag(a: f64, b: f64) -> Self {
        SymTensor::new(a, 0.0, b)
    }

    pub fn trace(&self) -> f64 {
        self.t11 + self.t22
    }

    pub fn det(&self) -> f64 {
        self.t11 * self.t22 - self.t12 * self.t12
    }

    pub fn scale(&self, s: f64) -> SymTensor {
        SymTensor::new(self.t11 * s, self.t12 * s, self.t22 * s)
    }

    pub fn add(&self, o: &SymTensor) -> SymTensor {
        SymTensor::new(self.t11 + o.t11, self.t12 + o.t12, self.t22 + o.t22)
    }

    pub fn sub(&self, o: &SymTensor) -> SymTensor {
        SymTensor::new(self.t11 - o.t11, self.t12 - o.t12, self.t22 - o.t22)
    }

    /// Apply as an endomorphism to frame coefficients.
    pub fn apply(&self, x: crate::clifford::TangentVec2) -> crate::clifford::TangentVec2 {
        crate::clifford::TangentVec2::new(
            self.t11 * x.a1 + self.t12 * x.a2,
            self.t12 * x.a1 + self.t22 * x.a2,
        )
    }

    /// Largest absolute entry; the norm used by residual reports.
    pub fn max_abs(&self) -> f64 {
        self.t11.abs().max(self.t12.abs()).max(self.t22.abs())
    }

    /// Eigenvalues (principal curvatures when self is a shape operator).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = 0.5 * self.trace();
        let d = (0.25 * (self.t11 - self.t22).powi(2) + self.t12 * self.t12).sqrt();
        (m - d, m + d)
    }
}

impl Serialize for SymTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(3))?;
        seq.serialize_element(&self.t11)?;
        seq.serialize_element(&self.t12)?;
        seq.serialize_element(&self.t22)?;
        seq.end()
    }
}

/// Orthonormal tangent frame, unit normal, shape operator and connection
/// coefficients at one parameter point of a chart.
#[derive(Clone, Debug)]
pub struct FramePoint {
    pub u: f64,
    pub v: f64,
    pub point: AmbientVec,
    pub partial_u: AmbientVec,
    pub partial_v: AmbientVec,
    pub e1: AmbientVec,
    pub e2: AmbientVec,
    pub nu: AmbientVec,
    /// Shape operator S(X) = −∇ᴺ_X ν in the (e₁, e₂) frame.
    pub shape: SymTensor,
    /// H = ½ tr S.
    pub mean_curvature: f64,
    /// ω₁₂(eᵢ) = ⟨∇ᴺ_{eᵢ} e₁, e₂⟩ for i = 1, 2.
    pub omega12: [f64; 2],
    /// eᵢ = coeff[i][0] ∂u + coeff[i][1] ∂v.
    pub coeff: [[f64; 2]; 2],
    /// Area density √(EG − F²) of the parametrization.
    pub area_density: f64,
}

/// Smooth parametrization of a surface in a model space over a closed
/// parameter rectangle.
#[derive(Clone)]
pub struct Chart {
    pub space: SpaceKind,
    map: Arc<dyn Fn(f64, f64) -> AmbientVec + Send + Sync>,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub flip_orientation: bool,
    pub name: String,
}

const GRAM_TOL: f64 = 1e-8;

/// Outer step for the Brioschi second-derivative stencils. The metric
/// coefficients are themselves finite-difference values carrying ~1e-13 of
/// rounding noise, which a second derivative amplifies by 1/h²; a coarser
/// outer step balances that against the O(h⁴) truncation.
pub const BRIOSCHI_STEP: f64 = 5e-3;

impl Chart {
    pub fn new(
        space: SpaceKind,
        name: &str,
        u_range: (f64, f64),
        v_range: (f64, f64),
        flip_orientation: bool,
        map: impl Fn(f64, f64) -> AmbientVec + Send + Sync + 'static,
    ) -> Self {
        Chart {
            space,
            map: Arc::new(map),
            u_range,
            v_range,
            flip_orientation,
            name: name.to_string(),
        }
    }

    /// Evaluate the immersion, renormalized onto the quadric for S³/H³.
    pub fn eval(&self, u: f64, v: f64) -> AmbientVec {
        renormalize(self.space, (self.map)(u, v))
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let eps = 1e-12;
        u >= self.u_range.0 - eps
            && u <= self.u_range.1 + eps
            && v >= self.v_range.0 - eps
            && v <= self.v_range.1 + eps
    }

    fn require_inside(&self, u: f64, v: f64) -> Result<()> {
        if self.contains(u, v) {
            Ok(())
        } else {
            Err(Error::OutsideRectangle { u, v })
        }
    }

    /// Coordinate tangent vectors ∂u, ∂v (projected onto the model tangent
    /// space to shed finite-difference crumbs).
    pub fn partials(&self, u: f64, v: f64) -> (AmbientVec, AmbientVec) {
        let p = self.eval(u, v);
        let du = fd::deriv1(|x| self.eval(x, v), u, FD_STEP);
        let dv = fd::deriv1(|x| self.eval(u, x), v, FD_STEP);
        (
            project_unchecked(self.space, &p, &du),
            project_unchecked(self.space, &p, &dv),
        )
    }

    /// Unit normal to the surface inside the model space, before the
    /// orientation flag is applied. Smooth in (u, v).
    fn normal_raw(&self, u: f64, v: f64) -> AmbientVec {
        let p = self.eval(u, v);
        let (du, dv) = self.partials(u, v);
        match self.space {
            SpaceKind::R3 => {
                let w = cross3(&du, &dv);
                w * (1.0 / w.dot(&w).sqrt())
            }
            SpaceKind::S3 | SpaceKind::R4 => {
                let w = cross4(&p, &du, &dv);
                w * (1.0 / w.dot(&w).sqrt())
            }
            SpaceKind::H3 => {
                let w = minkowski_flip(&cross4(&p, &du, &dv));
                let n = self.space.inner(&w, &w);
                w * (1.0 / n.sqrt())
            }
        }
    }

    fn oriented_normal(&self, u: f64, v: f64) -> AmbientVec {
        let n = self.normal_raw(u, v);
        if self.flip_orientation {
            -n
        } else {
            n
        }
    }

    /// e₁-map ∂u/|∂u| as a smooth function of the parameters.
    fn e1_map(&self, u: f64, v: f64) -> AmbientVec {
        let (du, _) = self.partials(u, v);
        let e = self.space.inner(&du, &du);
        du * (1.0 / e.sqrt())
    }

    /// Full frame data at a parameter point.
    pub fn frame_at(&self, u: f64, v: f64) -> Result<FramePoint> {
        self.require_inside(u, v)?;
        let sp = self.space;
        let p = self.eval(u, v);
        let (du, dv) = self.partials(u, v);
        let e = sp.inner(&du, &du);
        let f = sp.inner(&du, &dv);
        let g = sp.inner(&dv, &dv);
        let gram = e * g - f * f;
        if !(gram > GRAM_TOL) {
            return Err(Error::DegenerateChart {
                u,
                v,
                detail: format!("Gram determinant {gram:.3e}"),
            });
        }
        let e1 = du * (1.0 / e.sqrt());
        let w = dv - du * (f / e);
        let wn = sp.inner(&w, &w).sqrt();
        let sign = if self.flip_orientation { -1.0 } else { 1.0 };
        let e2 = w * (sign / wn);
        let nu = self.oriented_normal(u, v);

        // eᵢ in the coordinate basis (∂u, ∂v)
        let coeff = [[1.0 / e.sqrt(), 0.0], [sign * (-f / e) / wn, sign / wn]];

        // Shape operator from the smooth normal map: S(eᵢ) = −∇ᴺ_{eᵢ} ν.
        let dnu_du = fd::deriv1(|x| self.oriented_normal(x, v), u, FD_STEP);
        let dnu_dv = fd::deriv1(|x| self.oriented_normal(u, x), v, FD_STEP);
        let mut s = [[0.0; 2]; 2];
        let frame = [e1, e2];
        for i in 0..2 {
            let d = dnu_du * coeff[i][0] + dnu_dv * coeff[i][1];
            let grad = project_unchecked(sp, &p, &d);
            for (j, ej) in frame.iter().enumerate() {
                s[i][j] = -sp.inner(&grad, ej);
            }
        }
        let shape = SymTensor::new(s[0][0], 0.5 * (s[0][1] + s[1][0]), s[1][1]);

        // Connection coefficients ω₁₂(eᵢ) = ⟨∇ᴺ_{eᵢ} e₁, e₂⟩.
        let de1_du = fd::deriv1(|x| self.e1_map(x, v), u, FD_STEP);
        let de1_dv = fd::deriv1(|x| self.e1_map(u, x), v, FD_STEP);
        let mut omega12 = [0.0; 2];
        for i in 0..2 {
            let d = de1_du * coeff[i][0] + de1_dv * coeff[i][1];
            omega12[i] = sp.inner(&d, &e2);
        }

        Ok(FramePoint {
            u,
            v,
            point: p,
            partial_u: du,
            partial_v: dv,
            e1,
            e2,
            nu,
            shape,
            mean_curvature: 0.5 * shape.trace(),
            omega12,
            coeff,
            area_density: gram.sqrt(),
        })
    }

    /// Mean curvature with the normal-map stencils taken at step `h`
    /// (order-of-accuracy studies; `frame_at` uses the default step).
    pub fn mean_curvature_with_step(&self, u: f64, v: f64, h: f64) -> Result<f64> {
        let sp = self.space;
        let p = self.eval(u, v);
        let (du, dv) = self.partials(u, v);
        let e = sp.inner(&du, &du);
        let f = sp.inner(&du, &dv);
        let g = sp.inner(&dv, &dv);
        let gram = e * g - f * f;
        if !(gram > GRAM_TOL) {
            return Err(Error::DegenerateChart {
                u,
                v,
                detail: format!("Gram determinant {gram:.3e}"),
            });
        }
        let e1 = du * (1.0 / e.sqrt());
        let w = dv - du * (f / e);
        let wn = sp.inner(&w, &w).sqrt();
        let sign = if self.flip_orientation { -1.0 } else { 1.0 };
        let e2 = w * (sign / wn);
        let coeff = [[1.0 / e.sqrt(), 0.0], [sign * (-f / e) / wn, sign / wn]];
        let dnu_du = fd::deriv1(|x| self.oriented_normal(x, v), u, h);
        let dnu_dv = fd::deriv1(|x| self.oriented_normal(u, x), v, h);
        let frame = [e1, e2];
        let mut trace = 0.0;
        for i in 0..2 {
            let d = dnu_du * coeff[i][0] + dnu_dv * coeff[i][1];
            let grad = project_unchecked(sp, &p, &d);
            trace -= sp.inner(&grad, &frame[i]);
        }
        Ok(0.5 * trace)
    }

    /// First fundamental form (E, F, G).
    pub fn first_fundamental_form(&self, u: f64, v: f64) -> (f64, f64, f64) {
        let (du, dv) = self.partials(u, v);
        (
            self.space.inner(&du, &du),
            self.space.inner(&du, &dv),
            self.space.inner(&dv, &dv),
        )
    }

    /// Intrinsic Gauss curvature R₁₂₁₂ via the Brioschi formula — computed
    /// from the first fundamental form alone, independent of the shape
    /// operator, so Gauss-equation checks are non-circular.
    pub fn gauss_curvature(&self, u: f64, v: f64) -> Result<f64> {
        self.require_inside(u, v)?;
        Ok(self.gauss_curvature_with_step(u, v, BRIOSCHI_STEP))
    }

    pub fn gauss_curvature_with_step(&self, u: f64, v: f64, h: f64) -> f64 {
        let ef = |uu: f64, vv: f64| self.first_fundamental_form(uu, vv);
        let e = |uu, vv| ef(uu, vv).0;
        let f = |uu, vv| ef(uu, vv).1;
        let g = |uu, vv| ef(uu, vv).2;

        let (e0, f0, g0) = ef(u, v);
        let e_u = fd::deriv1(|x| e(x, v), u, h);
        let e_v = fd::deriv1(|x| e(u, x), v, h);
        let e_vv = fd::deriv2(|x| e(u, x), v, h);
        let g_u = fd::deriv1(|x| g(x, v), u, h);
        let g_v = fd::deriv1(|x| g(u, x), v, h);
        let g_uu = fd::deriv2(|x| g(x, v), u, h);
        let f_u = fd::deriv1(|x| f(x, v), u, h);
        let f_v = fd::deriv1(|x| f(u, x), v, h);
        let f_uv = fd::deriv1(|x| fd::deriv1(|y| f(x, y), v, h), u, h);

        let m1 = [
            [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
            [f_v - 0.5 * g_u, e0, f0],
            [0.5 * g_v, f0, g0],
        ];
        let m2 = [
            [0.0, 0.5 * e_v, 0.5 * g_u],
            [0.5 * e_v, e0, f0],
            [0.5 * g_u, f0, g0],
        ];
        (det3(m1) - det3(m2)) / (e0 * g0 - f0 * f0).powi(2)
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Names of the built-in test surfaces.
pub const CATALOG: &[&str] = &[
    "plane",
    "sphere",
    "cylinder",
    "catenoid",
    "totally_geodesic_s2",
    "clifford_torus",
    "geodesic_sphere_s3",
    "totally_geodesic_h2",
    "horosphere",
    "geodesic_sphere_h3",
];

/// Closed-form test surface by name. `param` is the radius r (sphere,
/// cylinder) or the geodesic radius ρ (geodesic spheres); each entry has a
/// documented default.
///
/// Orientations are chosen so the shape operators take their simplest
/// closed forms: sphere S = Id/r (inward ν), cylinder S = diag(0, 1/r),
/// catenoid S = diag(−sech²u, sech²u), Clifford torus S = diag(−1, 1),
/// geodesic spheres S = cot(ρ)·Id resp. coth(ρ)·Id (inward ν), horosphere
/// S = Id, totally geodesic surfaces S = 0.
pub fn catalog(name: &str, param: Option<f64>) -> Result<Chart> {
    let radius = |default: f64| -> Result<f64> {
        let r = param.unwrap_or(default);
        if r.is_finite() && r > 0.0 {
            Ok(r)
        } else {
            Err(Error::Config(format!(
                "surface parameter must be positive, got {r}"
            )))
        }
    };
    match name {
        "plane" => Ok(Chart::new(
            SpaceKind::R3,
            name,
            (0.0, 1.0),
            (0.0, 1.0),
            false,
            |u, v| AmbientVec::new3(u, v, 0.0),
        )),
        "sphere" => {
            let r = radius(1.0)?;
            Ok(Chart::new(
                SpaceKind::R3,
                name,
                (-1.1, 1.1),
                (0.15, 2.15),
                false,
                move |u, v| {
                    AmbientVec::new3(r * u.cos() * v.cos(), r * u.cos() * v.sin(), r * u.sin())
                },
            ))
        }
        "cylinder" => {
            let r = radius(1.0)?;
            Ok(Chart::new(
                SpaceKind::R3,
                name,
                (0.0, 2.0),
                (0.15, 2.15),
                false,
                move |u, v| AmbientVec::new3(r * v.cos(), r * v.sin(), u),
            ))
        }
        "catenoid" => Ok(Chart::new(
            SpaceKind::R3,
            name,
            (-1.0, 1.0),
            (0.15, 2.15),
            false,
            |u, v| AmbientVec::new3(u.cosh() * v.cos(), u.cosh() * v.sin(), u),
        )),
        "totally_geodesic_s2" => Ok(Chart::new(
            SpaceKind::S3,
            name,
            (-1.1, 1.1),
            (0.15, 2.15),
            false,
            |u, v| AmbientVec::new4(u.cos() * v.cos(), u.cos() * v.sin(), u.sin(), 0.0),
        )),
        "clifford_torus" => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Ok(Chart::new(
                SpaceKind::S3,
                name,
                (0.15, 2.15),
                (0.15, 2.15),
                false,
                move |u, v| AmbientVec::new4(s * u.cos(), s * u.sin(), s * v.cos(), s * v.sin()),
            ))
        }
        "geodesic_sphere_s3" => {
            let rho = radius(0.8)?;
            if rho >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::Config(format!(
                    "geodesic sphere radius must be below pi/2, got {rho}"
                )));
            }
            Ok(Chart::new(
                SpaceKind::S3,
                name,
                (-1.1, 1.1),
                (0.15, 2.15),
                false,
                move |u, v| {
                    AmbientVec::new4(
                        rho.cos(),
                        rho.sin() * u.cos() * v.cos(),
                        rho.sin() * u.cos() * v.sin(),
                        rho.sin() * u.sin(),
                    )
                },
            ))
        }
        "totally_geodesic_h2" => Ok(Chart::new(
            SpaceKind::H3,
            name,
            (-0.9, 0.9),
            (-0.9, 0.9),
            false,
            |u, v| AmbientVec::new4(u.cosh() * v.cosh(), u.sinh(), u.cosh() * v.sinh(), 0.0),
        )),
        "horosphere" => Ok(Chart::new(
            SpaceKind::H3,
            name,
            (-1.0, 1.0),
            (-1.0, 1.0),
            false,
            |u, v| {
                let q = 0.5 * (u * u + v * v);
                AmbientVec::new4(1.0 + q, q, u, v)
            },
        )),
        "geodesic_sphere_h3" => {
            let rho = radius(0.8)?;
            Ok(Chart::new(
                SpaceKind::H3,
                name,
                (-1.1, 1.1),
                (0.15, 2.15),
                false,
                move |u, v| {
                    AmbientVec::new4(
                        rho.cosh(),
                        rho.sinh() * u.cos() * v.cos(),
                        rho.sinh() * u.cos() * v.sin(),
                        rho.sinh() * u.sin(),
                    )
                },
            ))
        }
        other => Err(Error::UnknownSurface(other.to_string())),
    }
}
