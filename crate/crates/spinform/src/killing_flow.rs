//! The restricted Killing spinor equation as a linear connection:
//! parallel transport, discrete flatness (plaquette holonomy), global
//! solution on a chart, and the Gauss-Codazzi quantities G and C.
//!
//! The modified connection is ∇̂_X = ∇_X + T(X)· + ηX·ω· with T a symmetric
//! endomorphism field and η the Killing constant; its parallel sections are
//! the restrictions of ambient Killing spinors when T = S/2. The connection
//! is flat exactly when the Gauss equation G = R₁₂₁₂ − det(2T) − 4η² and the
//! Codazzi equation C = (∇_{e₁}2T)(e₂) − (∇_{e₂}2T)(e₁) both vanish, so
//! transport is globally consistent on the (simply connected) chart
//! rectangle and path-independence of the two sweep orders is a direct
//! integrability witness.

use crate::clifford::{mul2, volume2, Spinor, TangentVec2};
use crate::error::{Error, Result};
use crate::model_spaces::AmbientVec;
use crate::spin_calculus::{Grid2, ResidualStats, SpinorField, SurfaceGrid, TensorField, MARGIN};
use crate::surface_charts::{Chart, FramePoint, SymTensor};
use num_complex::Complex64;
use std::sync::Arc;

/// 2×2 complex matrix acting on the spinor fiber; used for fundamental
/// solutions of the transport ODE.
#[derive(Clone, Copy, Debug)]
pub struct SpinMat {
    pub m: [[Complex64; 2]; 2],
}

impl SpinMat {
    pub fn identity() -> SpinMat {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        SpinMat {
            m: [[o, z], [z, o]],
        }
    }

    pub fn zero() -> SpinMat {
        let z = Complex64::new(0.0, 0.0);
        SpinMat {
            m: [[z, z], [z, z]],
        }
    }

    /// Matrix whose columns are the images of the basis spinors.
    pub fn from_action(f: impl Fn(Spinor) -> Spinor) -> SpinMat {
        let a = f(Spinor::from_re(1.0, 0.0));
        let b = f(Spinor::from_re(0.0, 1.0));
        SpinMat {
            m: [[a.z1, b.z1], [a.z2, b.z2]],
        }
    }

    pub fn apply(&self, p: Spinor) -> Spinor {
        Spinor::new(
            self.m[0][0] * p.z1 + self.m[0][1] * p.z2,
            self.m[1][0] * p.z1 + self.m[1][1] * p.z2,
        )
    }

    pub fn mul(&self, o: &SpinMat) -> SpinMat {
        let mut r = SpinMat::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        r
    }

    pub fn add(&self, o: &SpinMat) -> SpinMat {
        let mut r = SpinMat::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        r
    }

    pub fn sub(&self, o: &SpinMat) -> SpinMat {
        let mut r = SpinMat::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] = self.m[i][j] - o.m[i][j];
            }
        }
        r
    }

    pub fn scale(&self, s: Complex64) -> SpinMat {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] *= s;
            }
        }
        r
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> SpinMat {
        let d = self.det();
        SpinMat {
            m: [
                [self.m[1][1] / d, -self.m[0][1] / d],
                [-self.m[1][0] / d, self.m[0][0] / d],
            ],
        }
    }

    /// Operator 2-norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        // Singular values of a 2×2: from tr(A†A) and |det A|².
        let t: f64 = self
            .m
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm_sqr())
            .sum();
        let d = self.det().norm_sqr();
        let disc = (t * t - 4.0 * d).max(0.0).sqrt();
        (0.5 * (t + disc)).sqrt()
    }
}

/// Where the symmetric tensor T of the connection comes from.
#[derive(Clone)]
pub enum TensorSource {
    /// T = S/2 from the chart geometry (the geometric pipeline).
    HalfShape,
    /// A constant endomorphism (negative controls, flat cases).
    Constant(SymTensor),
    /// Arbitrary closed-form data.
    Map(Arc<dyn Fn(f64, f64) -> SymTensor + Send + Sync>),
}

/// The modified connection ∇̂_X = ∇_X + T(X)· + ηX·ω·.
#[derive(Clone)]
pub struct ModifiedConnection {
    pub chart: Chart,
    pub eta: Complex64,
    pub t_source: TensorSource,
}

impl ModifiedConnection {
    /// Geometric connection with T = S/2 and the space's Killing constant.
    pub fn geometric(chart: Chart) -> ModifiedConnection {
        let eta = chart.space.eta();
        ModifiedConnection {
            chart,
            eta,
            t_source: TensorSource::HalfShape,
        }
    }

    pub fn with_constant_t(chart: Chart, eta: Complex64, t: SymTensor) -> ModifiedConnection {
        ModifiedConnection {
            chart,
            eta,
            t_source: TensorSource::Constant(t),
        }
    }

    pub fn with_t_map(
        chart: Chart,
        eta: Complex64,
        f: impl Fn(f64, f64) -> SymTensor + Send + Sync + 'static,
    ) -> ModifiedConnection {
        ModifiedConnection {
            chart,
            eta,
            t_source: TensorSource::Map(Arc::new(f)),
        }
    }

    fn t_at(&self, u: f64, v: f64, frame: &FramePoint) -> SymTensor {
        match &self.t_source {
            TensorSource::HalfShape => frame.shape.scale(0.5),
            TensorSource::Constant(t) => *t,
            TensorSource::Map(f) => f(u, v),
        }
    }

    /// Right-hand side matrix A(u, v; u̇, v̇) of the transport ODE
    /// dφ/dt = Aφ with A = −[½ω₁₂(γ′)ω + T(γ′)· + ηγ′·ω·], all terms
    /// complex-linear.
    fn ode_matrix(&self, u: f64, v: f64, du: f64, dv: f64) -> Result<SpinMat> {
        let fp = self.chart.frame_at(u, v)?;
        // γ′ in frame coefficients
        let sp = self.chart.space;
        let vel = fp.partial_u * du + fp.partial_v * dv;
        let a = sp.inner(&vel, &fp.e1);
        let b = sp.inner(&vel, &fp.e2);
        let gamma = TangentVec2::new(a, b);
        let w12 = a * fp.omega12[0] + b * fp.omega12[1];
        let t_gamma = self.t_at(u, v, &fp).apply(gamma);
        let eta = self.eta;
        Ok(SpinMat::from_action(move |phi| {
            let spin = volume2(phi) * (0.5 * w12);
            let tensor = mul2(t_gamma, phi);
            let killing = mul2(gamma, volume2(phi)) * eta;
            -(spin + tensor + killing)
        }))
    }

    /// Fundamental solution of ∇̂φ = 0 along the straight parameter segment
    /// from `from` to `to`, RK4 with `steps` steps.
    pub fn segment_matrix(
        &self,
        from: (f64, f64),
        to: (f64, f64),
        steps: usize,
    ) -> Result<SpinMat> {
        for &(u, v) in &[from, to] {
            if !self.chart.contains(u, v) {
                return Err(Error::CurveExitsRectangle { u, v });
            }
        }
        let (du, dv) = (to.0 - from.0, to.1 - from.1);
        let n = steps.max(1);
        let h = 1.0 / n as f64;
        let pos = |t: f64| (from.0 + t * du, from.1 + t * dv);
        let mut m = SpinMat::identity();
        for k in 0..n {
            let t0 = k as f64 * h;
            let (u0, v0) = pos(t0);
            let (um, vm) = pos(t0 + 0.5 * h);
            let (u1, v1) = pos(t0 + h);
            let a1 = self.ode_matrix(u0, v0, du, dv)?;
            let a2 = self.ode_matrix(um, vm, du, dv)?;
            let a4 = self.ode_matrix(u1, v1, du, dv)?;
            m = rk4_step(&m, &a1, &a2, &a2, &a4, h);
        }
        Ok(m)
    }

    /// Parallel transport of φ₀ along a polyline in parameter space.
    pub fn transport(
        &self,
        phi0: Spinor,
        path: &[(f64, f64)],
        steps_per_segment: usize,
    ) -> Result<Spinor> {
        let mut phi = phi0;
        for seg in path.windows(2) {
            let m = self.segment_matrix(seg[0], seg[1], steps_per_segment)?;
            phi = m.apply(phi);
        }
        Ok(phi)
    }
}

/// One classical RK4 step of the matrix ODE M' = A(t)M.
fn rk4_step(
    m: &SpinMat,
    a1: &SpinMat,
    a2: &SpinMat,
    a3: &SpinMat,
    a4: &SpinMat,
    h: f64,
) -> SpinMat {
    let ch = Complex64::new(h, 0.0);
    let k1 = a1.mul(m);
    let k2 = a2.mul(&m.add(&k1.scale(ch * 0.5)));
    let k3 = a3.mul(&m.add(&k2.scale(ch * 0.5)));
    let k4 = a4.mul(&m.add(&k3.scale(ch)));
    let incr = k1
        .add(&k2.scale(Complex64::new(2.0, 0.0)))
        .add(&k3.scale(Complex64::new(2.0, 0.0)))
        .add(&k4)
        .scale(ch * (1.0 / 6.0));
    m.add(&incr)
}

/// Holonomy witness of one grid plaquette.
#[derive(Clone, Copy, Debug)]
pub struct PlaquetteReport {
    /// Lower-left node of the cell.
    pub node: (usize, usize),
    /// Operator norm of (transport around the cell boundary − identity).
    pub deviation: f64,
    /// Metric area of the cell.
    pub area: f64,
}

impl PlaquetteReport {
    /// Curvature-scale deviation: holonomy defect per unit area.
    pub fn per_area(&self) -> f64 {
        self.deviation / self.area
    }
}

/// Summary of the discrete flatness check.
#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub max_deviation: f64,
    pub max_per_area: f64,
    pub threshold_per_area: f64,
    pub worst_node: (usize, usize),
}

impl FlatnessReport {
    pub fn is_flat(&self) -> bool {
        self.max_per_area <= self.threshold_per_area
    }
}

/// RK4 steps per plaquette edge in the flatness sweep.
const FLATNESS_EDGE_STEPS: usize = 2;

/// Flatness threshold coefficient: a flat connection shows a per-area
/// holonomy defect of order h² from the discrete transport, a curved one an
/// O(1) defect; 50·h² separates the two at every grid size in use.
const FLATNESS_COEFF: f64 = 50.0;

/// Per-cell holonomy reports over the whole grid. Edge transports are
/// computed once and shared between neighboring cells (the reversed edge is
/// the matrix inverse).
pub fn plaquette_reports(conn: &ModifiedConnection, grid: &Grid2) -> Result<Vec<PlaquetteReport>> {
    let (nu, nv) = (grid.nu, grid.nv);
    // horizontal[i][j]: (i,j) -> (i+1,j); vertical[i][j]: (i,j) -> (i,j+1)
    let mut horizontal = vec![SpinMat::identity(); (nu - 1) * nv];
    let mut vertical = vec![SpinMat::identity(); nu * (nv - 1)];
    for j in 0..nv {
        for i in 0..nu - 1 {
            horizontal[j * (nu - 1) + i] =
                conn.segment_matrix(grid.node(i, j), grid.node(i + 1, j), FLATNESS_EDGE_STEPS)?;
        }
    }
    for j in 0..nv - 1 {
        for i in 0..nu {
            vertical[j * nu + i] =
                conn.segment_matrix(grid.node(i, j), grid.node(i, j + 1), FLATNESS_EDGE_STEPS)?;
        }
    }
    let mut reports = Vec::with_capacity((nu - 1) * (nv - 1));
    for j in 0..nv - 1 {
        for i in 0..nu - 1 {
            let bottom = &horizontal[j * (nu - 1) + i];
            let right = &vertical[j * nu + (i + 1)];
            let top = &horizontal[(j + 1) * (nu - 1) + i];
            let left = &vertical[j * nu + i];
            let loop_mat = left.inverse().mul(&top.inverse()).mul(&right.mul(bottom));
            let deviation = loop_mat.sub(&SpinMat::identity()).op_norm();
            let (u, v) = grid.node(i, j);
            let fp = conn.chart.frame_at(u + 0.5 * grid.hu, v + 0.5 * grid.hv)?;
            let area = grid.hu * grid.hv * fp.area_density;
            reports.push(PlaquetteReport {
                node: (i, j),
                deviation,
                area,
            });
        }
    }
    Ok(reports)
}

pub fn flatness_check(conn: &ModifiedConnection, grid: &Grid2) -> Result<FlatnessReport> {
    let reports = plaquette_reports(conn, grid)?;
    let h = grid.hu.max(grid.hv);
    let mut max_deviation = 0.0_f64;
    let mut max_per_area = 0.0_f64;
    let mut worst_node = (0, 0);
    for r in &reports {
        max_deviation = max_deviation.max(r.deviation);
        if r.per_area() > max_per_area {
            max_per_area = r.per_area();
            worst_node = r.node;
        }
    }
    Ok(FlatnessReport {
        max_deviation,
        max_per_area,
        threshold_per_area: FLATNESS_COEFF * h * h,
        worst_node,
    })
}

/// A solved field together with its integrability diagnostics.
pub struct SolvedField {
    pub field: SpinorField,
    /// Sup over nodes of the difference between the u-then-v and v-then-u
    /// sweeps (the u-then-v field is the canonical output).
    pub path_independence: f64,
    pub flatness: FlatnessReport,
}

/// Integrate ∇̂φ = 0 over the whole grid from φ₀ at the lower-left node.
/// Fails with `FlatnessViolation` when the plaquette holonomy shows the
/// connection is not flat (G ≠ 0 or C ≠ 0).
pub fn solve_on_chart(
    conn: &ModifiedConnection,
    grid: &Grid2,
    phi0: Spinor,
    steps_per_cell: usize,
) -> Result<SolvedField> {
    let flatness = flatness_check(conn, grid)?;
    if !flatness.is_flat() {
        return Err(Error::FlatnessViolation {
            found: flatness.max_per_area,
            threshold: flatness.threshold_per_area,
        });
    }
    let field = sweep(conn, grid, phi0, steps_per_cell, true)?;
    let alt = sweep(conn, grid, phi0, steps_per_cell, false)?;
    if field.values.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFiniteField);
    }
    let path_independence = field
        .values
        .iter()
        .zip(alt.values.iter())
        .map(|(a, b)| (*a - *b).norm())
        .fold(0.0, f64::max);
    Ok(SolvedField {
        field,
        path_independence,
        flatness,
    })
}

/// Fill the grid by line transports: base u-line first then v-lines
/// (`u_first`), or base v-line first then u-lines.
fn sweep(
    conn: &ModifiedConnection,
    grid: &Grid2,
    phi0: Spinor,
    steps: usize,
    u_first: bool,
) -> Result<SpinorField> {
    let mut values = vec![Spinor::zero(); grid.len()];
    values[grid.idx(0, 0)] = phi0;
    if u_first {
        for i in 1..grid.nu {
            let m = conn.segment_matrix(grid.node(i - 1, 0), grid.node(i, 0), steps)?;
            values[grid.idx(i, 0)] = m.apply(values[grid.idx(i - 1, 0)]);
        }
        for i in 0..grid.nu {
            for j in 1..grid.nv {
                let m = conn.segment_matrix(grid.node(i, j - 1), grid.node(i, j), steps)?;
                values[grid.idx(i, j)] = m.apply(values[grid.idx(i, j - 1)]);
            }
        }
    } else {
        for j in 1..grid.nv {
            let m = conn.segment_matrix(grid.node(0, j - 1), grid.node(0, j), steps)?;
            values[grid.idx(0, j)] = m.apply(values[grid.idx(0, j - 1)]);
        }
        for j in 0..grid.nv {
            for i in 1..grid.nu {
                let m = conn.segment_matrix(grid.node(i - 1, j), grid.node(i, j), steps)?;
                values[grid.idx(i, j)] = m.apply(values[grid.idx(i - 1, j)]);
            }
        }
    }
    Ok(SpinorField {
        grid: *grid,
        values,
    })
}

/// Residual of the restricted Killing spinor equation
/// ∇_Xφ + T(X)·φ − iηX·φ̄ = 0 for X = e₁, e₂ over interior nodes.
pub fn verify_restricted_equation(
    sg: &SurfaceGrid,
    field: &SpinorField,
    t: &TensorField,
    eta: Complex64,
) -> ResidualStats {
    let i_eta = Complex64::new(0.0, 1.0) * eta;
    let margin = MARGIN.max(t.margin);
    ResidualStats::collect(sg.grid.interior(margin).flat_map(|(i, j)| {
        let phi = field.at(i, j);
        let tij = t.at(i, j);
        [0usize, 1].map(|dir| {
            let x = if dir == 0 {
                TangentVec2::E1
            } else {
                TangentVec2::E2
            };
            let grad = sg
                .spinor_cov_deriv(field, dir, i, j)
                .expect("interior node");
            let r =
                grad + mul2(tij.apply(x), phi) - mul2(x, crate::clifford::conjugate(phi)) * i_eta;
            r.norm()
        })
    }))
}

/// Pointwise Gauss and Codazzi quantities for given (T, η) data:
/// G = R₁₂₁₂ − det(S) − 4η² and C = (∇_{e₁}S)(e₂) − (∇_{e₂}S)(e₁) with
/// S = 2T. Both vanish exactly when (T, η) is integrable immersion data.
pub struct GaussCodazzi {
    /// Scalar G per interior node.
    pub g_values: Vec<((usize, usize), f64)>,
    /// Frame components of the vector C per interior node.
    pub c_values: Vec<((usize, usize), [f64; 2])>,
    pub sup_g: f64,
    pub sup_c: f64,
}

/// Step for the covariant-derivative stencils of the Codazzi vector. The
/// tensor components carry the ~1e-10 noise of the shape-operator stencils,
/// so a first derivative balances truncation against noise near 5e-3.
const CODAZZI_STEP: f64 = 5e-3;

pub fn gauss_codazzi_check(
    sg: &SurfaceGrid,
    t_source: &TensorSource,
    eta: Complex64,
) -> Result<GaussCodazzi> {
    let four_eta_sq = (eta * eta * 4.0).re;
    let chart = &sg.chart;
    let t_at = |fp: &FramePoint| -> SymTensor {
        match t_source {
            TensorSource::HalfShape => fp.shape.scale(0.5),
            TensorSource::Constant(t) => *t,
            TensorSource::Map(f) => f(fp.u, fp.v),
        }
    };
    // S(e_b) as an ambient vector and the frame itself, as smooth maps.
    let s_eb_ambient = |u: f64, v: f64| -> Result<([AmbientVec; 2], [AmbientVec; 2])> {
        let fp = chart.frame_at(u, v)?;
        let s = t_at(&fp).scale(2.0);
        let smat = [[s.t11, s.t12], [s.t12, s.t22]];
        let frame = [fp.e1, fp.e2];
        let mut out = [frame[0], frame[1]];
        for b in 0..2 {
            out[b] = frame[0] * smat[b][0] + frame[1] * smat[b][1];
        }
        Ok((out, frame))
    };
    let h = CODAZZI_STEP;
    let mut g_values = Vec::new();
    let mut c_values = Vec::new();
    let mut sup_g = 0.0_f64;
    let mut sup_c = 0.0_f64;
    for (i, j) in sg.grid.interior(MARGIN) {
        let (u, v) = sg.grid.node(i, j);
        let fp = sg.frame(i, j);
        let s = t_at(fp).scale(2.0);
        let r1212 = sg.chart.gauss_curvature(u, v)?;
        let g = r1212 - s.det() - four_eta_sq;

        // Stencil data: (S(e_b), e_b) at ±h, ±2h along both axes.
        let mut d_se = [[AmbientVec::zeros(fp.e1.dim()); 2]; 2]; // [axis][b]
        let mut d_e = [[AmbientVec::zeros(fp.e1.dim()); 2]; 2];
        for axis in 0..2 {
            let sample = |off: f64| -> Result<([AmbientVec; 2], [AmbientVec; 2])> {
                if axis == 0 {
                    s_eb_ambient(u + off, v)
                } else {
                    s_eb_ambient(u, v + off)
                }
            };
            let (m2, e_m2) = sample(-2.0 * h)?;
            let (m1, e_m1) = sample(-h)?;
            let (p1, e_p1) = sample(h)?;
            let (p2, e_p2) = sample(2.0 * h)?;
            for b in 0..2 {
                d_se[axis][b] = crate::fd::stencil1(m2[b], m1[b], p1[b], p2[b], h);
                d_e[axis][b] = crate::fd::stencil1(e_m2[b], e_m1[b], e_p1[b], e_p2[b], h);
            }
        }
        let frame = [fp.e1, fp.e2];
        let smat = [[s.t11, s.t12], [s.t12, s.t22]];
        let sp = chart.space;
        // (∇_{e_a}S)(e_b)·e_l = e_a(S(e_b))·e_l − Σ_k ⟨e_a(e_b), e_k⟩ S_{kl}
        let nabla = |a: usize, b: usize, l: usize| -> f64 {
            let mut dv = AmbientVec::zeros(frame[0].dim());
            let mut de = AmbientVec::zeros(frame[0].dim());
            for axis in 0..2 {
                dv = dv + d_se[axis][b] * fp.coeff[a][axis];
                de = de + d_e[axis][b] * fp.coeff[a][axis];
            }
            let mut corr = 0.0;
            for k in 0..2 {
                corr += sp.inner(&de, &frame[k]) * smat[k][l];
            }
            sp.inner(&dv, &frame[l]) - corr
        };
        let c = [
            nabla(0, 1, 0) - nabla(1, 0, 0),
            nabla(0, 1, 1) - nabla(1, 0, 1),
        ];
        sup_g = sup_g.max(g.abs());
        sup_c = sup_c.max((c[0] * c[0] + c[1] * c[1]).sqrt());
        g_values.push(((i, j), g));
        c_values.push(((i, j), c));
    }
    Ok(GaussCodazzi {
        g_values,
        c_values,
        sup_g,
        sup_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_charts::catalog;

    #[test]
    fn plane_transport_is_identity() {
        let chart = catalog("plane", None).unwrap();
        let conn =
            ModifiedConnection::with_constant_t(chart, Complex64::new(0.0, 0.0), SymTensor::ZERO);
        let phi0 = Spinor::from_re(0.3, -0.8);
        let path = [(0.1, 0.1), (0.9, 0.1), (0.9, 0.9), (0.1, 0.9), (0.1, 0.1)];
        let phi = conn.transport(phi0, &path, 4).unwrap();
        assert_eq!((phi - phi0).norm(), 0.0);
    }

    #[test]
    fn transport_is_complex_linear() {
        let chart = catalog("sphere", None).unwrap();
        let conn = ModifiedConnection::geometric(chart);
        let path = [(-0.5, 0.3), (0.5, 0.9), (0.2, 1.9)];
        let a = Complex64::new(0.7, -0.2);
        let b = Complex64::new(-0.1, 1.3);
        let p = Spinor::from_re(1.0, 0.0);
        let q = Spinor::new(Complex64::new(0.2, 0.5), Complex64::new(-0.3, 0.1));
        let lhs = conn.transport(p * a + q * b, &path, 8).unwrap();
        let rhs =
            conn.transport(p, &path, 8).unwrap() * a + conn.transport(q, &path, 8).unwrap() * b;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn real_eta_transport_preserves_norm() {
        for name in ["sphere", "clifford_torus", "catenoid"] {
            let chart = catalog(name, None).unwrap();
            let u0 = chart.u_range.0;
            let v0 = chart.v_range.0;
            let u1 = chart.u_range.1;
            let v1 = chart.v_range.1;
            let conn = ModifiedConnection::geometric(chart);
            let phi0 = Spinor::from_re(0.6, 0.8);
            let path = [(u0, v0), (u1, v0), (u1, v1)];
            let phi = conn.transport(phi0, &path, 64).unwrap();
            assert!(
                (phi.norm() - phi0.norm()).abs() < 1e-10,
                "{name}: norm drift {:.3e}",
                (phi.norm() - phi0.norm()).abs()
            );
        }
    }

    #[test]
    fn imaginary_eta_norm_law_along_curve() {
        // d|φ|²/dt = −Re(γ′·φ̄, φ) along transport on an H³ surface.
        let chart = catalog("horosphere", None).unwrap();
        let conn = ModifiedConnection::geometric(chart.clone());
        let phi0 = Spinor::from_re(1.0, 0.25);
        let seg = ((-0.5, -0.2), (0.7, 0.4));
        let n = 64usize;
        let mut phis = Vec::with_capacity(n + 1);
        phis.push(phi0);
        let mut m = SpinMat::identity();
        for k in 0..n {
            let t0 = k as f64 / n as f64;
            let t1 = (k + 1) as f64 / n as f64;
            let p0 = (
                seg.0 .0 + t0 * (seg.1 .0 - seg.0 .0),
                seg.0 .1 + t0 * (seg.1 .1 - seg.0 .1),
            );
            let p1 = (
                seg.0 .0 + t1 * (seg.1 .0 - seg.0 .0),
                seg.0 .1 + t1 * (seg.1 .1 - seg.0 .1),
            );
            m = conn.segment_matrix(p0, p1, 2).unwrap().mul(&m);
            phis.push(m.apply(phi0));
        }
        // compare centered differences of |φ|² to −Re(γ′·φ̄, φ)
        let h = 1.0 / n as f64;
        let (du, dv) = (seg.1 .0 - seg.0 .0, seg.1 .1 - seg.0 .1);
        for k in (4..n - 4).step_by(7) {
            let t = k as f64 * h;
            let (u, v) = (seg.0 .0 + t * du, seg.0 .1 + t * dv);
            let fp = chart.frame_at(u, v).unwrap();
            let vel = fp.partial_u * du + fp.partial_v * dv;
            let gamma = TangentVec2::new(
                chart.space.inner(&vel, &fp.e1),
                chart.space.inner(&vel, &fp.e2),
            );
            let phi = phis[k];
            let dn2 = (phis[k + 1].norm_sqr() - phis[k - 1].norm_sqr()) / (2.0 * h);
            let rhs = -crate::clifford::re_inner(mul2(gamma, crate::clifford::conjugate(phi)), phi);
            assert!((dn2 - rhs).abs() < 5e-4, "k={k}: {dn2} vs {rhs}");
        }
    }

    #[test]
    fn geometric_connections_are_flat_on_catalog() {
        for name in ["sphere", "clifford_torus", "horosphere"] {
            let chart = catalog(name, None).unwrap();
            let grid = Grid2::new(&chart, 16, 16).unwrap();
            let conn = ModifiedConnection::geometric(chart);
            let rep = flatness_check(&conn, &grid).unwrap();
            assert!(
                rep.is_flat(),
                "{name}: per-area {:.3e} vs threshold {:.3e}",
                rep.max_per_area,
                rep.threshold_per_area
            );
        }
    }

    #[test]
    fn wrong_tensor_breaks_flatness() {
        let chart = catalog("clifford_torus", None).unwrap();
        let grid = Grid2::new(&chart, 24, 24).unwrap();
        let conn = ModifiedConnection::with_constant_t(
            chart,
            Complex64::new(0.5, 0.0),
            SymTensor::identity(),
        );
        let rep = flatness_check(&conn, &grid).unwrap();
        assert!(!rep.is_flat());
        assert!(rep.max_per_area > 1e-3);
        let solved = solve_on_chart(&conn, &grid, Spinor::from_re(1.0, 0.0), 4);
        assert!(matches!(solved, Err(Error::FlatnessViolation { .. })));
    }

    #[test]
    fn gauss_codazzi_on_catalog_and_negative_control() {
        let chart = catalog("clifford_torus", None).unwrap();
        let sg = SurfaceGrid::new(chart, 16, 16).unwrap();
        let gc =
            gauss_codazzi_check(&sg, &TensorSource::HalfShape, Complex64::new(0.5, 0.0)).unwrap();
        assert!(gc.sup_g < 1e-6, "G = {:.3e}", gc.sup_g);
        assert!(gc.sup_c < 1e-6, "C = {:.3e}", gc.sup_c);

        // non-constant shape operator exercises the covariant derivative
        let chart = catalog("catenoid", None).unwrap();
        let sg = SurfaceGrid::new(chart, 16, 16).unwrap();
        let gc =
            gauss_codazzi_check(&sg, &TensorSource::HalfShape, Complex64::new(0.0, 0.0)).unwrap();
        assert!(gc.sup_g < 1e-6, "catenoid G = {:.3e}", gc.sup_g);
        assert!(gc.sup_c < 1e-6, "catenoid C = {:.3e}", gc.sup_c);

        // T = 0 on the torus: G = 0 − 0 − 1 = −1.
        let chart = catalog("clifford_torus", None).unwrap();
        let sg = SurfaceGrid::new(chart, 16, 16).unwrap();
        let zero = TensorSource::Constant(SymTensor::ZERO);
        let gc = gauss_codazzi_check(&sg, &zero, Complex64::new(0.5, 0.0)).unwrap();
        assert!((gc.sup_g - 1.0).abs() < 1e-6);
        assert!(gc.sup_c < 1e-8);

        // totally geodesic H²: G = R₁₂₁₂ − 4η² = −1 − (−1) = 0.
        let chart = catalog("totally_geodesic_h2", None).unwrap();
        let sg = SurfaceGrid::new(chart, 12, 12).unwrap();
        let zero = TensorSource::Constant(SymTensor::ZERO);
        let gc = gauss_codazzi_check(&sg, &zero, Complex64::new(0.0, 0.5)).unwrap();
        assert!(gc.sup_g < 1e-6);
    }

    #[test]
    fn rk4_path_independence_order() {
        // On fixed geometry the path-independence residual scales as the
        // fourth power of the integrator step.
        let chart = catalog("sphere", None).unwrap();
        let grid = Grid2::new(&chart, 8, 8).unwrap();
        let conn = ModifiedConnection::geometric(chart);
        let mut residuals = Vec::new();
        for steps in [1usize, 2, 4] {
            let s = solve_on_chart(&conn, &grid, Spinor::from_re(1.0, 0.0), steps).unwrap();
            residuals.push(s.path_independence);
        }
        let o1 = (residuals[0] / residuals[1]).log2();
        let o2 = (residuals[1] / residuals[2]).log2();
        assert!((o1 - 4.0).abs() < 0.6, "order {o1} from {residuals:?}");
        assert!((o2 - 4.0).abs() < 0.6, "order {o2} from {residuals:?}");
    }

    #[test]
    fn solve_and_verify_restricted_equation_on_sphere() {
        let chart = catalog("sphere", None).unwrap();
        let sg = SurfaceGrid::new(chart.clone(), 32, 32).unwrap();
        let conn = ModifiedConnection::geometric(chart);
        let solved = solve_on_chart(&conn, &sg.grid, Spinor::from_re(1.0, 0.0), 4).unwrap();
        assert!(solved.path_independence < 1e-8);
        let t = sg.half_shape_field();
        let r = verify_restricted_equation(&sg, &solved.field, &t, conn.eta);
        assert!(r.sup < 1e-6, "restricted equation residual {:.3e}", r.sup);
    }

    #[test]
    fn curve_must_stay_inside() {
        let chart = catalog("plane", None).unwrap();
        let conn =
            ModifiedConnection::with_constant_t(chart, Complex64::new(0.0, 0.0), SymTensor::ZERO);
        let r = conn.transport(Spinor::from_re(1.0, 0.0), &[(0.0, 0.0), (2.0, 0.0)], 4);
        assert!(matches!(r, Err(Error::CurveExitsRectangle { .. })));
    }
}
