//! End-to-end behaviors of the restriction pipeline beyond the acceptance
//! gate: the spinorial Gauss formula, refinement behavior of residuals and
//! plaquette holonomy, and the norm laws along transport.

use num_complex::Complex64;
use spinform::clifford::{conjugate, mul2, Spinor, TangentVec2};
use spinform::killing_flow::{
    plaquette_reports, solve_on_chart, verify_restricted_equation, ModifiedConnection, TensorSource,
};
use spinform::spin_calculus::{
    check_dirac_identity, check_dirac_swaps_split, Grid2, SurfaceGrid, MARGIN,
};
use spinform::surface_charts::catalog;

fn solve(
    name: &str,
    n: usize,
    steps: usize,
) -> (SurfaceGrid, spinform::spin_calculus::SpinorField) {
    let chart = catalog(name, None).unwrap();
    let sg = SurfaceGrid::new(chart.clone(), n, n).unwrap();
    let conn = ModifiedConnection::geometric(chart);
    let solved = solve_on_chart(&conn, &sg.grid, Spinor::from_re(1.0, 0.0), steps).unwrap();
    (sg, solved.field)
}

#[test]
fn spinorial_gauss_formula_on_sphere() {
    // For the flat ambient (η = 0) the restricted field satisfies
    // ∇_{eᵢ}φ + ½S(eᵢ)·φ = 0.
    let (sg, field) = solve("sphere", 48, 4);
    let mut worst = 0.0_f64;
    for (i, j) in sg.grid.interior(MARGIN) {
        let phi = field.at(i, j);
        let shape = sg.frame(i, j).shape;
        for (dir, x) in [(0, TangentVec2::E1), (1, TangentVec2::E2)] {
            let grad = sg.spinor_cov_deriv(&field, dir, i, j).unwrap();
            let r = grad + mul2(shape.apply(x), phi) * 0.5;
            worst = worst.max(r.norm());
        }
    }
    assert!(worst < 1e-6, "Gauss formula residual {worst:.3e}");
}

#[test]
fn restricted_equation_with_eta_term_on_h3_surface() {
    // Imaginary Killing constant: ∇_Xφ + T(X)·φ − iηX·φ̄ = 0 with the
    // conjugation term genuinely nonzero.
    let (sg, field) = solve("geodesic_sphere_h3", 48, 4);
    let eta = Complex64::new(0.0, 0.5);
    let t = sg.half_shape_field();
    let r = verify_restricted_equation(&sg, &field, &t, eta);
    assert!(r.sup < 1e-6);
    // dropping the η-term must leave a visible defect
    let r0 = verify_restricted_equation(&sg, &field, &t, Complex64::new(0.0, 0.0));
    assert!(r0.sup > 1e-2, "eta term invisible: {:.3e}", r0.sup);
}

#[test]
fn dirac_operator_swaps_split_on_solved_field() {
    let (sg, field) = solve("clifford_torus", 32, 4);
    let r = check_dirac_swaps_split(&sg, &field);
    assert!(r.sup < 1e-12, "(Dφ)± = Dφ∓ residual {:.3e}", r.sup);
}

#[test]
fn residuals_contract_under_grid_refinement() {
    // Halving the grid step reduces the identity residuals by at least 3.5×.
    let mut previous: Option<(f64, f64)> = None;
    for n in [24usize, 48] {
        let (sg, field) = solve("sphere", n, 4);
        let eta = Complex64::new(0.0, 0.0);
        let dirac = check_dirac_identity(&sg, &field, eta).sup;
        let restricted =
            verify_restricted_equation(&sg, &field, &sg.half_shape_field(), eta).sup;
        if let Some((d0, r0)) = previous {
            assert!(d0 / dirac >= 3.5, "dirac refinement ratio {:.2}", d0 / dirac);
            assert!(
                r0 / restricted >= 3.5,
                "restricted refinement ratio {:.2}",
                r0 / restricted
            );
        }
        previous = Some((dirac, restricted));
    }
}

#[test]
fn plaquette_deviation_scales_with_cell_area() {
    // On integrable data the per-area holonomy defect falls ~h² under grid
    // refinement (deviation ≤ C·A·h²).
    let chart = catalog("sphere", None).unwrap();
    let conn = ModifiedConnection::geometric(chart.clone());
    let mut per_area = Vec::new();
    for n in [12usize, 24] {
        let grid = Grid2::new(&chart, n, n).unwrap();
        let reports = plaquette_reports(&conn, &grid).unwrap();
        per_area.push(reports.iter().map(|r| r.per_area()).fold(0.0_f64, f64::max));
    }
    let ratio = per_area[0] / per_area[1];
    assert!(ratio > 2.5, "holonomy-per-area refinement ratio {ratio:.2}");
}

#[test]
fn imaginary_eta_norm_law_on_solved_field() {
    // X|φ|² = −Re(X·φ̄, φ) for the H³ pipeline, measured on the grid.
    let (sg, field) = solve("horosphere", 48, 4);
    let ns = field.norm_sqr_field();
    let mut worst = 0.0_f64;
    for (i, j) in sg.grid.interior(MARGIN) {
        let phi = field.at(i, j);
        for (dir, x) in [(0, TangentVec2::E1), (1, TangentVec2::E2)] {
            let lhs = sg.dir_deriv_scalar(&ns, dir, i, j);
            let rhs = -spinform::clifford::re_inner(mul2(x, conjugate(phi)), phi);
            worst = worst.max((lhs - rhs).abs());
        }
    }
    assert!(worst < 1e-6, "norm law residual {worst:.3e}");
}

#[test]
fn wrong_eta_is_rejected_as_non_integrable() {
    // Geometric T with the wrong Killing constant cannot be flat.
    let chart = catalog("sphere", None).unwrap();
    let grid = Grid2::new(&chart, 32, 32).unwrap();
    let conn = ModifiedConnection {
        chart,
        eta: Complex64::new(0.5, 0.0),
        t_source: TensorSource::HalfShape,
    };
    let r = solve_on_chart(&conn, &grid, Spinor::from_re(1.0, 0.0), 4);
    assert!(matches!(r, Err(spinform::Error::FlatnessViolation { .. })));
}
