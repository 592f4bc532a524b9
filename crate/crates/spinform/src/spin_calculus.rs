//! Spinor fields over surface charts: spin connection, covariant derivative,
//! Dirac operator, the Dirac-type identities of restricted Killing spinors,
//! energy-momentum tensors, and the half-spinor tensors T± with their trace,
//! antisymmetry and reconstruction relations.
//!
//! Grid fields carry values at the nodes of a uniform parameter grid.
//! Directional derivatives use the coordinate-frame chain rule with the
//! frame-change matrices precomputed per node; all derivative data lives on
//! interior nodes (two-node stencil margin), and residual norms are taken
//! over interior nodes only.

use crate::clifford::{conjugate, mul2, re_inner, volume2, Spinor, TangentVec2};
use crate::error::{Error, Result};
use crate::fd;
use crate::surface_charts::{Chart, FramePoint, SymTensor};
use num_complex::Complex64;

/// Stencil margin of interior nodes.
pub const MARGIN: usize = 2;

/// Minimum grid extent per axis.
pub const MIN_GRID: usize = 5;

/// Uniform grid over a chart's parameter rectangle.
#[derive(Clone, Copy, Debug)]
pub struct Grid2 {
    pub nu: usize,
    pub nv: usize,
    pub u0: f64,
    pub v0: f64,
    pub hu: f64,
    pub hv: f64,
}

impl Grid2 {
    pub fn new(chart: &Chart, nu: usize, nv: usize) -> Result<Grid2> {
        let need = MIN_GRID;
        if nu < need || nv < need {
            return Err(Error::GridTooSmall {
                need,
                got: nu.min(nv),
            });
        }
        Ok(Grid2 {
            nu,
            nv,
            u0: chart.u_range.0,
            v0: chart.v_range.0,
            hu: (chart.u_range.1 - chart.u_range.0) / (nu - 1) as f64,
            hv: (chart.v_range.1 - chart.v_range.0) / (nv - 1) as f64,
        })
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.u0 + i as f64 * self.hu, self.v0 + j as f64 * self.hv)
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nu && j < self.nv);
        j * self.nu + i
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_interior(&self, i: usize, j: usize, margin: usize) -> bool {
        i >= margin && i + margin < self.nu && j >= margin && j + margin < self.nv
    }

    /// Iterate interior nodes with the given margin.
    pub fn interior(&self, margin: usize) -> impl Iterator<Item = (usize, usize)> {
        let (nu, nv) = (self.nu, self.nv);
        (margin..nv.saturating_sub(margin))
            .flat_map(move |j| (margin..nu.saturating_sub(margin)).map(move |i| (i, j)))
    }
}

/// A chart together with a grid and the frame data at every node.
pub struct SurfaceGrid {
    pub chart: Chart,
    pub grid: Grid2,
    frames: Vec<FramePoint>,
}

impl SurfaceGrid {
    pub fn new(chart: Chart, nu: usize, nv: usize) -> Result<SurfaceGrid> {
        let grid = Grid2::new(&chart, nu, nv)?;
        let mut frames = Vec::with_capacity(grid.len());
        for j in 0..grid.nv {
            for i in 0..grid.nu {
                let (u, v) = grid.node(i, j);
                frames.push(chart.frame_at(u, v)?);
            }
        }
        Ok(SurfaceGrid {
            chart,
            grid,
            frames,
        })
    }

    pub fn frame(&self, i: usize, j: usize) -> &FramePoint {
        &self.frames[self.grid.idx(i, j)]
    }

    /// Shape-operator field S sampled at every node (margin 0).
    pub fn shape_field(&self) -> TensorField {
        TensorField {
            grid: self.grid,
            margin: 0,
            values: self.frames.iter().map(|f| f.shape).collect(),
        }
    }

    /// T = S/2, the geometric energy-momentum data.
    pub fn half_shape_field(&self) -> TensorField {
        TensorField {
            grid: self.grid,
            margin: 0,
            values: self.frames.iter().map(|f| f.shape.scale(0.5)).collect(),
        }
    }

    /// Grid partials of a spinor field along the coordinate axes.
    fn grid_partial(&self, field: &SpinorField, axis: usize, i: usize, j: usize) -> Spinor {
        let g = &self.grid;
        debug_assert!(g.is_interior(i, j, MARGIN));
        let at = |di: i64, dj: i64| {
            field.values[g.idx((i as i64 + di) as usize, (j as i64 + dj) as usize)]
        };
        if axis == 0 {
            fd::stencil1(at(-2, 0), at(-1, 0), at(1, 0), at(2, 0), g.hu)
        } else {
            fd::stencil1(at(0, -2), at(0, -1), at(0, 1), at(0, 2), g.hv)
        }
    }

    fn grid_partial_scalar(&self, vals: &[f64], axis: usize, i: usize, j: usize) -> f64 {
        let g = &self.grid;
        let at = |di: i64, dj: i64| vals[g.idx((i as i64 + di) as usize, (j as i64 + dj) as usize)];
        if axis == 0 {
            fd::stencil1(at(-2, 0), at(-1, 0), at(1, 0), at(2, 0), g.hu)
        } else {
            fd::stencil1(at(0, -2), at(0, -1), at(0, 1), at(0, 2), g.hv)
        }
    }

    /// Spin covariant derivative ∇_{eᵢ}φ = eᵢ(φ) + ½ω₁₂(eᵢ)·ω·φ at an
    /// interior node.
    pub fn spinor_cov_deriv(
        &self,
        field: &SpinorField,
        dir: usize,
        i: usize,
        j: usize,
    ) -> Result<Spinor> {
        if !self.grid.is_interior(i, j, MARGIN) {
            return Err(Error::OutsideRectangle {
                u: self.grid.node(i, j).0,
                v: self.grid.node(i, j).1,
            });
        }
        Ok(self.cov_deriv_unchecked(field, dir, i, j))
    }

    fn cov_deriv_unchecked(&self, field: &SpinorField, dir: usize, i: usize, j: usize) -> Spinor {
        let fp = self.frame(i, j);
        let du = self.grid_partial(field, 0, i, j);
        let dv = self.grid_partial(field, 1, i, j);
        let directional = du * fp.coeff[dir][0] + dv * fp.coeff[dir][1];
        let phi = field.values[self.grid.idx(i, j)];
        directional + volume2(phi) * (0.5 * fp.omega12[dir])
    }

    /// Directional derivative eᵢ(f) of a scalar grid field.
    pub fn dir_deriv_scalar(&self, vals: &[f64], dir: usize, i: usize, j: usize) -> f64 {
        let fp = self.frame(i, j);
        let du = self.grid_partial_scalar(vals, 0, i, j);
        let dv = self.grid_partial_scalar(vals, 1, i, j);
        fp.coeff[dir][0] * du + fp.coeff[dir][1] * dv
    }

    /// Dirac operator Dφ = e₁·∇_{e₁}φ + e₂·∇_{e₂}φ at an interior node.
    pub fn dirac(&self, field: &SpinorField, i: usize, j: usize) -> Result<Spinor> {
        if !self.grid.is_interior(i, j, MARGIN) {
            return Err(Error::OutsideRectangle {
                u: self.grid.node(i, j).0,
                v: self.grid.node(i, j).1,
            });
        }
        Ok(self.dirac_unchecked(field, i, j))
    }

    fn dirac_unchecked(&self, field: &SpinorField, i: usize, j: usize) -> Spinor {
        mul2(TangentVec2::E1, self.cov_deriv_unchecked(field, 0, i, j))
            + mul2(TangentVec2::E2, self.cov_deriv_unchecked(field, 1, i, j))
    }
}

/// Grid of spinor values over a chart's parameter rectangle.
#[derive(Clone, Debug)]
pub struct SpinorField {
    pub grid: Grid2,
    pub values: Vec<Spinor>,
}

impl SpinorField {
    pub fn constant(grid: Grid2, phi: Spinor) -> SpinorField {
        SpinorField {
            grid,
            values: vec![phi; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid2, mut f: impl FnMut(f64, f64) -> Spinor) -> SpinorField {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.nv {
            for i in 0..grid.nu {
                let (u, v) = grid.node(i, j);
                values.push(f(u, v));
            }
        }
        SpinorField { grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> Spinor {
        self.values[self.grid.idx(i, j)]
    }

    /// Nodewise map, e.g. to split into half-spinor parts.
    pub fn map(&self, f: impl Fn(Spinor) -> Spinor) -> SpinorField {
        SpinorField {
            grid: self.grid,
            values: self.values.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Squared pointwise norms.
    pub fn norm_sqr_field(&self) -> Vec<f64> {
        self.values.iter().map(|p| p.norm_sqr()).collect()
    }

    /// The eigenspinor φ* = φ⁺ + iφ⁻ of a minimal-surface restriction.
    pub fn minimal_eigenspinor(&self) -> SpinorField {
        let i = Complex64::new(0.0, 1.0);
        self.map(|p| p.plus() + p.minus() * i)
    }
}

/// Grid of symmetric tensors; `margin` marks how many boundary layers carry
/// no data.
#[derive(Clone, Debug)]
pub struct TensorField {
    pub grid: Grid2,
    pub margin: usize,
    pub values: Vec<SymTensor>,
}

impl TensorField {
    pub fn constant(grid: Grid2, t: SymTensor) -> TensorField {
        TensorField {
            grid,
            margin: 0,
            values: vec![t; grid.len()],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> SymTensor {
        debug_assert!(self.grid.is_interior(i, j, self.margin));
        self.values[self.grid.idx(i, j)]
    }

    /// Sup over shared interior nodes of the max-abs entry difference.
    pub fn max_difference(&self, other: &TensorField) -> f64 {
        let margin = self.margin.max(other.margin);
        self.grid
            .interior(margin)
            .map(|(i, j)| self.at(i, j).sub(&other.at(i, j)).max_abs())
            .fold(0.0, f64::max)
    }
}

/// Non-symmetric 2×2 tensor grid (the half-spinor tensors T± and F).
#[derive(Clone, Debug)]
pub struct Tensor2Field {
    pub grid: Grid2,
    pub margin: usize,
    /// Row-major components m[j][k] = T(e_j, e_k).
    pub values: Vec<[[f64; 2]; 2]>,
}

impl Tensor2Field {
    pub fn at(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        self.values[self.grid.idx(i, j)]
    }
}

/// Sup and L² (RMS) norms of a residual over interior nodes.
#[derive(Clone, Copy, Debug, Default)]
pub struct ResidualStats {
    pub sup: f64,
    pub l2: f64,
    pub count: usize,
}

impl ResidualStats {
    pub fn collect(values: impl Iterator<Item = f64>) -> ResidualStats {
        let mut sup = 0.0_f64;
        let mut sum = 0.0_f64;
        let mut count = 0usize;
        for v in values {
            let a = v.abs();
            sup = sup.max(a);
            sum += a * a;
            count += 1;
        }
        ResidualStats {
            sup,
            l2: if count > 0 {
                (sum / count as f64).sqrt()
            } else {
                0.0
            },
            count,
        }
    }
}

/// Residual of the Dirac identity Dφ = Hφ − 2iη φ̄ over interior nodes.
pub fn check_dirac_identity(
    sg: &SurfaceGrid,
    field: &SpinorField,
    eta: Complex64,
) -> ResidualStats {
    let two_i_eta = Complex64::new(0.0, 2.0) * eta;
    ResidualStats::collect(sg.grid.interior(MARGIN).map(|(i, j)| {
        let phi = field.at(i, j);
        let h = sg.frame(i, j).mean_curvature;
        let r = sg.dirac_unchecked(field, i, j) - phi * h + conjugate(phi) * two_i_eta;
        r.norm()
    }))
}

/// Residuals of the half-spinor identities D(φ±) = (H ± 2iη) φ∓.
pub fn check_halfspinor_identity(
    sg: &SurfaceGrid,
    field: &SpinorField,
    eta: Complex64,
) -> ResidualStats {
    let plus = field.map(|p| p.plus());
    let minus = field.map(|p| p.minus());
    let two_i_eta = Complex64::new(0.0, 2.0) * eta;
    ResidualStats::collect(sg.grid.interior(MARGIN).flat_map(|(i, j)| {
        let h = Complex64::new(sg.frame(i, j).mean_curvature, 0.0);
        let rp = sg.dirac_unchecked(&plus, i, j) - field.at(i, j).minus() * (h + two_i_eta);
        let rm = sg.dirac_unchecked(&minus, i, j) - field.at(i, j).plus() * (h - two_i_eta);
        [rp.norm(), rm.norm()]
    }))
}

/// Length law of the restricted field. For real η the report is the
/// variation of |φ|² over all nodes (sup = max − min, l2 = RMS deviation
/// from the mean); for imaginary η it is the residual of
/// X|φ|² = 2Re(iη X·φ̄, φ) for X = e₁, e₂ over interior nodes.
pub fn check_length_law(sg: &SurfaceGrid, field: &SpinorField, eta: Complex64) -> ResidualStats {
    let ns = field.norm_sqr_field();
    if eta.im == 0.0 {
        let max = ns.iter().cloned().fold(f64::MIN, f64::max);
        let min = ns.iter().cloned().fold(f64::MAX, f64::min);
        let mean = ns.iter().sum::<f64>() / ns.len() as f64;
        let rms =
            (ns.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / ns.len() as f64).sqrt();
        ResidualStats {
            sup: max - min,
            l2: rms,
            count: ns.len(),
        }
    } else {
        let i_eta = Complex64::new(0.0, 1.0) * eta;
        ResidualStats::collect(sg.grid.interior(MARGIN).flat_map(|(i, j)| {
            let phi = field.at(i, j);
            [0, 1].map(|dir| {
                let x = if dir == 0 {
                    TangentVec2::E1
                } else {
                    TangentVec2::E2
                };
                let lhs = sg.dir_deriv_scalar(&ns, dir, i, j);
                let rhs = 2.0 * re_inner(mul2(x, conjugate(phi)) * i_eta, phi);
                lhs - rhs
            })
        }))
    }
}

/// Energy-momentum tensor of the field (interior nodes, margin 2).
///
/// Real η (constant length): T(X,Y) = ½Re(X·∇_Yφ + Y·∇_Xφ, φ)/|φ|².
/// Imaginary η: the same expression plus ½(|φ⁻|² − |φ⁺|²)g(X,Y), all over
/// |φ|².
pub fn energy_momentum(
    sg: &SurfaceGrid,
    field: &SpinorField,
    eta: Complex64,
) -> Result<TensorField> {
    let mut values = vec![SymTensor::ZERO; sg.grid.len()];
    for (i, j) in sg.grid.interior(MARGIN) {
        let phi = field.at(i, j);
        let n2 = phi.norm_sqr();
        if n2.sqrt() <= 1e-10 {
            return Err(Error::VanishingSpinor {
                i,
                j,
                norm: n2.sqrt(),
            });
        }
        let grad = [
            sg.cov_deriv_unchecked(field, 0, i, j),
            sg.cov_deriv_unchecked(field, 1, i, j),
        ];
        let e = [TangentVec2::E1, TangentVec2::E2];
        let comp = |l: usize, k: usize| -> f64 {
            0.5 * re_inner(mul2(e[l], grad[k]) + mul2(e[k], grad[l]), phi)
        };
        let extra = if eta.im != 0.0 {
            0.5 * (phi.minus().norm_sqr() - phi.plus().norm_sqr())
        } else {
            0.0
        };
        values[sg.grid.idx(i, j)] = SymTensor::new(
            (comp(0, 0) + extra) / n2,
            comp(0, 1) / n2,
            (comp(1, 1) + extra) / n2,
        );
    }
    Ok(TensorField {
        grid: sg.grid,
        margin: MARGIN,
        values,
    })
}

/// The half-spinor tensors T±(X, Y) = Re(∇_Xψ±, Y·ψ∓) on interior nodes.
pub fn tensors_tpm(sg: &SurfaceGrid, field: &SpinorField) -> (Tensor2Field, Tensor2Field) {
    let mut tp = vec![[[0.0; 2]; 2]; sg.grid.len()];
    let mut tm = vec![[[0.0; 2]; 2]; sg.grid.len()];
    for (i, j) in sg.grid.interior(MARGIN) {
        let phi = field.at(i, j);
        let grad = [
            sg.cov_deriv_unchecked(field, 0, i, j),
            sg.cov_deriv_unchecked(field, 1, i, j),
        ];
        let e = [TangentVec2::E1, TangentVec2::E2];
        let idx = sg.grid.idx(i, j);
        for jj in 0..2 {
            for kk in 0..2 {
                tp[idx][jj][kk] = re_inner(grad[jj].plus(), mul2(e[kk], phi.minus()));
                tm[idx][jj][kk] = re_inner(grad[jj].minus(), mul2(e[kk], phi.plus()));
            }
        }
    }
    (
        Tensor2Field {
            grid: sg.grid,
            margin: MARGIN,
            values: tp,
        },
        Tensor2Field {
            grid: sg.grid,
            margin: MARGIN,
            values: tm,
        },
    )
}

/// Identities satisfied by T± along a Dirac solution, all in product form so
/// nodes with vanishing half-spinors stay well defined:
///
/// * real η: tr T± = −H|ψ∓|²; antisymmetry defect
///   T±(e₁,e₂) − T±(e₂,e₁) = 2η|ψ∓|²; relation |ψ⁺|²T⁺ = |ψ⁻|²T⁻.
/// * imaginary η = ib: tr T± = −(H ∓ 2b)|ψ∓|²; T± symmetric;
///   |ψ⁺|²T⁺ − |ψ⁻|²T⁻ = 2b|ψ⁺|²|ψ⁻|² g.
pub struct TpmChecks {
    pub trace: ResidualStats,
    pub antisym: ResidualStats,
    pub relation: ResidualStats,
}

pub fn check_tpm_identities(sg: &SurfaceGrid, field: &SpinorField, eta: Complex64) -> TpmChecks {
    let (tp, tm) = tensors_tpm(sg, field);
    let imag = eta.im != 0.0;
    let mut trace = Vec::new();
    let mut antisym = Vec::new();
    let mut relation = Vec::new();
    for (i, j) in sg.grid.interior(MARGIN) {
        let phi = field.at(i, j);
        let h = sg.frame(i, j).mean_curvature;
        let (np, nm) = (phi.plus().norm_sqr(), phi.minus().norm_sqr());
        let a = tp.at(i, j);
        let b = tm.at(i, j);
        if imag {
            // 2iη = −2 Im(η) on the trace: tr T± = −(H ∓ 2 Im η)|ψ∓|²
            let s = 2.0 * eta.im;
            trace.push(a[0][0] + a[1][1] + (h - s) * nm);
            trace.push(b[0][0] + b[1][1] + (h + s) * np);
            antisym.push(a[0][1] - a[1][0]);
            antisym.push(b[0][1] - b[1][0]);
            // |ψ⁺|²T⁺ − |ψ⁻|²T⁻ = 2 Im(η) |ψ⁺|²|ψ⁻|² g
            for jj in 0..2 {
                for kk in 0..2 {
                    let g = if jj == kk { 1.0 } else { 0.0 };
                    relation.push(np * a[jj][kk] - nm * b[jj][kk] - s * np * nm * g);
                }
            }
        } else {
            trace.push(a[0][0] + a[1][1] + h * nm);
            trace.push(b[0][0] + b[1][1] + h * np);
            // T±(e₁,e₂) = 2η|ψ∓|² + T±(e₂,e₁)
            let s = 2.0 * eta.re;
            antisym.push(a[0][1] - a[1][0] - s * nm);
            antisym.push(b[0][1] - b[1][0] - s * np);
            for jj in 0..2 {
                for kk in 0..2 {
                    relation.push(np * a[jj][kk] - nm * b[jj][kk]);
                }
            }
        }
    }
    TpmChecks {
        trace: ResidualStats::collect(trace.into_iter()),
        antisym: ResidualStats::collect(antisym.into_iter()),
        relation: ResidualStats::collect(relation.into_iter()),
    }
}

/// Reconstruct the symmetric tensor T from a Dirac solution via the
/// half-spinor tensors: real η uses F = T⁺ + T⁻ and
/// T = −(F + Fᵀ)/(2|ψ|²); imaginary η uses
/// F = T⁺ + T⁻ + ½(|ψ⁺|² − |ψ⁻|²) g and T = −F/|ψ|². The quotient is
/// well defined wherever ψ ≠ 0, with no division by half-spinor norms.
pub fn reconstruct_t_from_dirac(
    sg: &SurfaceGrid,
    field: &SpinorField,
    eta: Complex64,
) -> Result<TensorField> {
    let (tp, tm) = tensors_tpm(sg, field);
    let mut values = vec![SymTensor::ZERO; sg.grid.len()];
    for (i, j) in sg.grid.interior(MARGIN) {
        let phi = field.at(i, j);
        let n2 = phi.norm_sqr();
        if n2.sqrt() <= 1e-10 {
            return Err(Error::VanishingSpinor {
                i,
                j,
                norm: n2.sqrt(),
            });
        }
        let a = tp.at(i, j);
        let b = tm.at(i, j);
        let mut f = [[0.0; 2]; 2];
        for jj in 0..2 {
            for kk in 0..2 {
                f[jj][kk] = a[jj][kk] + b[jj][kk];
            }
        }
        if eta.im != 0.0 {
            let c = 0.5 * (phi.plus().norm_sqr() - phi.minus().norm_sqr());
            f[0][0] += c;
            f[1][1] += c;
        }
        values[sg.grid.idx(i, j)] = SymTensor::new(
            -f[0][0] / n2,
            -0.5 * (f[0][1] + f[1][0]) / n2,
            -f[1][1] / n2,
        );
    }
    Ok(TensorField {
        grid: sg.grid,
        margin: MARGIN,
        values,
    })
}

/// Trace identity tr T = H for a reconstructed tensor field.
pub fn check_trace_equals_h(sg: &SurfaceGrid, t: &TensorField) -> ResidualStats {
    ResidualStats::collect(
        sg.grid
            .interior(t.margin.max(MARGIN))
            .map(|(i, j)| t.at(i, j).trace() - sg.frame(i, j).mean_curvature),
    )
}

/// Residual of Dφ* = 2ηφ* for the minimal-surface eigenspinor.
pub fn check_eigenspinor(sg: &SurfaceGrid, field: &SpinorField, eta: Complex64) -> ResidualStats {
    let star = field.minimal_eigenspinor();
    let lambda = eta * 2.0;
    ResidualStats::collect(
        sg.grid
            .interior(MARGIN)
            .map(|(i, j)| (sg.dirac_unchecked(&star, i, j) - star.at(i, j) * lambda).norm()),
    )
}

/// Residual of (Dφ)± = Dφ∓: the Dirac operator swaps the half-spinor spaces.
pub fn check_dirac_swaps_split(sg: &SurfaceGrid, field: &SpinorField) -> ResidualStats {
    let plus = field.map(|p| p.plus());
    let minus = field.map(|p| p.minus());
    ResidualStats::collect(sg.grid.interior(MARGIN).flat_map(|(i, j)| {
        let d = sg.dirac_unchecked(field, i, j);
        let dp = sg.dirac_unchecked(&plus, i, j);
        let dm = sg.dirac_unchecked(&minus, i, j);
        // Dφ⁺ lands in Σ⁻ and carries the Σ⁻ part of Dφ.
        [
            (d.minus() - dp.minus()).norm(),
            (d.plus() - dm.plus()).norm(),
            dp.plus().norm(),
            dm.minus().norm(),
        ]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_charts::catalog;

    fn plane_grid(n: usize) -> SurfaceGrid {
        SurfaceGrid::new(catalog("plane", None).unwrap(), n, n).unwrap()
    }

    #[test]
    fn constant_field_on_plane_is_parallel() {
        let sg = plane_grid(9);
        let phi = Spinor::from_re(0.6, -0.2);
        let field = SpinorField::constant(sg.grid, phi);
        for (i, j) in sg.grid.interior(MARGIN) {
            let d0 = sg.spinor_cov_deriv(&field, 0, i, j).unwrap();
            let d1 = sg.spinor_cov_deriv(&field, 1, i, j).unwrap();
            assert_eq!(d0.norm(), 0.0);
            assert_eq!(d1.norm(), 0.0);
            assert_eq!(sg.dirac(&field, i, j).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn constant_coefficient_clifford_field_on_plane() {
        // ∇_{e₁}(e₁·φ₀) = 0 for constant φ₀ on the flat chart.
        let sg = plane_grid(9);
        let phi0 = Spinor::from_re(1.0, 0.5);
        let field = SpinorField::from_fn(sg.grid, |_, _| mul2(TangentVec2::E1, phi0));
        let d = sg.spinor_cov_deriv(&field, 0, 3, 4).unwrap();
        assert_eq!(d.norm(), 0.0);
    }

    #[test]
    fn boundary_nodes_rejected() {
        let sg = plane_grid(9);
        let field = SpinorField::constant(sg.grid, Spinor::from_re(1.0, 0.0));
        assert!(sg.spinor_cov_deriv(&field, 0, 0, 4).is_err());
        assert!(sg.dirac(&field, 1, 4).is_err());
        assert!(sg.dirac(&field, 8, 4).is_err());
    }

    #[test]
    fn linear_phase_field_derivative() {
        // φ(u,v) = e^{iu}φ₀ on the plane: ∇_{e₁}φ = iφ, Dφ = e₁·iφ.
        let sg = plane_grid(17);
        let phi0 = Spinor::from_re(1.0, 0.0);
        let field = SpinorField::from_fn(sg.grid, |u, _| phi0 * Complex64::new(0.0, u).exp());
        let (i, j) = (8, 8);
        let d = sg.spinor_cov_deriv(&field, 0, i, j).unwrap();
        let expect = field.at(i, j) * Complex64::new(0.0, 1.0);
        // grid step 1/16, 4th-order truncation ~ h⁴/30 ≈ 5e-7
        assert!((d - expect).norm() < 2e-6);
    }

    #[test]
    fn energy_momentum_of_constant_field_vanishes() {
        let sg = plane_grid(9);
        let field = SpinorField::constant(sg.grid, Spinor::from_re(1.0, 1.0));
        let t = energy_momentum(&sg, &field, Complex64::new(0.0, 0.0)).unwrap();
        for (i, j) in sg.grid.interior(MARGIN) {
            assert_eq!(t.at(i, j).max_abs(), 0.0);
        }
    }

    #[test]
    fn vanishing_spinor_rejected() {
        let sg = plane_grid(9);
        let field = SpinorField::constant(sg.grid, Spinor::zero());
        assert!(matches!(
            energy_momentum(&sg, &field, Complex64::new(0.0, 0.0)),
            Err(Error::VanishingSpinor { .. })
        ));
    }

    #[test]
    fn length_law_constant_field() {
        let sg = plane_grid(9);
        let field = SpinorField::constant(sg.grid, Spinor::from_re(0.8, 0.3));
        let r = check_length_law(&sg, &field, Complex64::new(0.0, 0.0));
        assert_eq!(r.sup, 0.0);
    }

    #[test]
    fn eigenspinor_of_parallel_field() {
        // Plane, η = 0: Dφ* = 0 and |φ*| = |φ|.
        let sg = plane_grid(9);
        let phi = Spinor::from_re(0.5, 0.7);
        let field = SpinorField::constant(sg.grid, phi);
        let r = check_eigenspinor(&sg, &field, Complex64::new(0.0, 0.0));
        assert_eq!(r.sup, 0.0);
        let star = field.minimal_eigenspinor();
        assert!((star.at(0, 0).norm_sqr() - phi.norm_sqr()).abs() < 1e-15);
    }
}
