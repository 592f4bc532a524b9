//! Batch driver: selects a surface, grid and η, runs the restriction,
//! reconstruction and verification pipelines, and emits JSON reports (plus
//! CSV fields for the restrict command).

use crate::clifford::Spinor;
use crate::config::{EtaSpec, RunConfig};
use crate::error::{Error, Result};
use crate::hypersurface4::{
    catalog3, codazzi3_check, energy_momentum3, gauss_components_check, norm_constancy3, solve3,
    Connection3, SurfaceGrid3, TensorSource3, CATALOG3,
};
use crate::killing_flow::{
    gauss_codazzi_check, solve_on_chart, verify_restricted_equation, ModifiedConnection,
    TensorSource,
};
use crate::report::{
    CheckContext, ConfigEcho, ConvergenceReport, ConvergenceStudy, EtaOut, Report,
};
use crate::spin_calculus::{
    check_dirac_identity, check_eigenspinor, check_halfspinor_identity, check_length_law,
    check_tpm_identities, check_trace_equals_h, energy_momentum, reconstruct_t_from_dirac,
    SurfaceGrid,
};
use crate::surface_charts::{catalog, CATALOG};
use num_complex::Complex64;
use std::io::Write;
use std::time::Instant;

/// Initial spinor for every solve: unit norm at the lower-left node.
fn base_spinor() -> Spinor {
    Spinor::from_re(1.0, 0.0)
}

fn surface_dim(name: &str) -> Result<usize> {
    if CATALOG.contains(&name) {
        Ok(2)
    } else if CATALOG3.contains(&name) {
        Ok(3)
    } else {
        Err(Error::UnknownSurface(name.to_string()))
    }
}

fn eta_for(cfg: &RunConfig, space_eta: Complex64) -> Complex64 {
    match cfg.eta {
        EtaSpec::Auto => space_eta,
        EtaSpec::Value(e) => e,
    }
}

fn echo(cfg: &RunConfig, command: &str, space: &str, grid: &[usize], eta: Complex64) -> ConfigEcho {
    ConfigEcho {
        command: command.to_string(),
        surface: cfg.surface.clone(),
        space: space.to_string(),
        grid: grid.to_vec(),
        eta: EtaOut {
            re: eta.re,
            im: eta.im,
        },
        steps_per_cell: cfg.steps_per_cell,
        param: cfg.param,
    }
}

fn context(cfg: &RunConfig, grid: &[usize], eta: Complex64) -> CheckContext {
    CheckContext {
        surface: cfg.surface.clone(),
        eta: EtaOut {
            re: eta.re,
            im: eta.im,
        },
        grid: grid.to_vec(),
    }
}

/// Run the full identity suite for the configured surface.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let dim = surface_dim(&cfg.surface)?;
    let report = if dim == 2 {
        verify_surface2(cfg, start)?
    } else {
        verify_surface3(cfg, start)?
    };
    emit(cfg, &report)?;
    Ok(report)
}

fn verify_surface2(cfg: &RunConfig, start: Instant) -> Result<Report> {
    let chart = catalog(&cfg.surface, cfg.param)?;
    let grid = cfg.grid_for_dim(2)?;
    let eta = eta_for(cfg, chart.space.eta());
    let sg = SurfaceGrid::new(chart.clone(), grid[0], grid[1])?;
    let ctx = context(cfg, &grid, eta);
    let mut checks = Vec::new();

    let gc = gauss_codazzi_check(&sg, &TensorSource::HalfShape, eta)?;
    checks.push(ctx.from_sup(
        "gauss_equation",
        gc.sup_g,
        cfg.tolerance("gauss_equation", 1e-6),
    ));
    checks.push(ctx.from_sup(
        "codazzi_equation",
        gc.sup_c,
        cfg.tolerance("codazzi_equation", 1e-6),
    ));

    let conn = ModifiedConnection {
        chart,
        eta,
        t_source: TensorSource::HalfShape,
    };
    match solve_on_chart(&conn, &sg.grid, base_spinor(), cfg.steps_per_cell) {
        Err(Error::FlatnessViolation { found, threshold }) => {
            checks.push(ctx.from_sup("flatness", found, threshold));
        }
        Err(e) => return Err(e),
        Ok(solved) => {
            checks.push(ctx.from_sup(
                "flatness",
                solved.flatness.max_per_area,
                solved.flatness.threshold_per_area,
            ));
            checks.push(ctx.from_sup(
                "path_independence",
                solved.path_independence,
                cfg.tolerance("path_independence", 1e-8),
            ));
            let field = &solved.field;
            let t_geom = sg.half_shape_field();

            let r = verify_restricted_equation(&sg, field, &t_geom, eta);
            checks.push(ctx.from_stats(
                "restricted_equation",
                &r,
                cfg.tolerance("restricted_equation", 1e-6),
            ));
            let r = check_dirac_identity(&sg, field, eta);
            checks.push(ctx.from_stats(
                "dirac_identity",
                &r,
                cfg.tolerance("dirac_identity", 1e-6),
            ));
            let r = check_halfspinor_identity(&sg, field, eta);
            checks.push(ctx.from_stats(
                "halfspinor_identity",
                &r,
                cfg.tolerance("halfspinor_identity", 1e-6),
            ));
            let r = check_length_law(&sg, field, eta);
            let length_tol = if eta.im == 0.0 {
                cfg.tolerance("length_law", 1e-8)
            } else {
                cfg.tolerance("length_law", 1e-6)
            };
            checks.push(ctx.from_stats("length_law", &r, length_tol));

            let em = energy_momentum(&sg, field, eta)?;
            let rec = reconstruct_t_from_dirac(&sg, field, eta)?;
            checks.push(ctx.from_sup(
                "energy_momentum_matches_shape",
                em.max_difference(&t_geom),
                cfg.tolerance("energy_momentum_matches_shape", 1e-6),
            ));
            checks.push(ctx.from_sup(
                "reconstruction_matches_energy_momentum",
                rec.max_difference(&em),
                cfg.tolerance("reconstruction_matches_energy_momentum", 1e-8),
            ));
            checks.push(ctx.from_sup(
                "reconstruction_matches_shape",
                rec.max_difference(&t_geom),
                cfg.tolerance("reconstruction_matches_shape", 1e-6),
            ));
            let r = check_trace_equals_h(&sg, &em);
            checks.push(ctx.from_stats(
                "trace_equals_mean_curvature",
                &r,
                cfg.tolerance("trace_equals_mean_curvature", 1e-6),
            ));
            let tpm = check_tpm_identities(&sg, field, eta);
            checks.push(ctx.from_stats("tpm_trace", &tpm.trace, cfg.tolerance("tpm_trace", 1e-6)));
            checks.push(ctx.from_stats(
                "tpm_antisymmetry",
                &tpm.antisym,
                cfg.tolerance("tpm_antisymmetry", 1e-6),
            ));
            checks.push(ctx.from_stats(
                "tpm_relation",
                &tpm.relation,
                cfg.tolerance("tpm_relation", 1e-6),
            ));

            // minimal surfaces restrict Killing spinors to eigenspinors
            let minimal = sg
                .grid
                .interior(0)
                .map(|(i, j)| sg.frame(i, j).mean_curvature.abs())
                .fold(0.0_f64, f64::max)
                < 1e-6;
            if minimal {
                let r = check_eigenspinor(&sg, field, eta);
                checks.push(ctx.from_stats(
                    "eigenspinor_dirac",
                    &r,
                    cfg.tolerance("eigenspinor_dirac", 1e-6),
                ));
                if eta.im == 0.0 {
                    let star = field.minimal_eigenspinor();
                    let ns = star.norm_sqr_field();
                    let max = ns.iter().cloned().fold(f64::MIN, f64::max);
                    let min = ns.iter().cloned().fold(f64::MAX, f64::min);
                    checks.push(ctx.from_sup(
                        "eigenspinor_norm",
                        max - min,
                        cfg.tolerance("eigenspinor_norm", 1e-8),
                    ));
                }
            }
        }
    }
    let wall = start.elapsed().as_millis() as u64;
    Ok(Report::new(
        echo(cfg, "verify", sg.chart.space.name(), &grid, eta),
        checks,
        wall,
    ))
}

fn verify_surface3(cfg: &RunConfig, start: Instant) -> Result<Report> {
    let chart = catalog3(&cfg.surface, cfg.param)?;
    let grid = cfg.grid_for_dim(3)?;
    let sg = SurfaceGrid3::new(chart.clone(), [grid[0], grid[1], grid[2]])?;
    let eta3 = Complex64::new(0.0, 0.0);
    let ctx = context(cfg, &grid, eta3);
    let mut checks = Vec::new();

    let t_geom = sg.half_shape_field();
    let r = gauss_components_check(&sg, &t_geom);
    checks.push(ctx.from_stats(
        "gauss_components",
        &r,
        cfg.tolerance("gauss_components", 1e-6),
    ));
    let r = codazzi3_check(&sg, &TensorSource3::HalfShape);
    checks.push(ctx.from_stats(
        "codazzi_equation",
        &r,
        cfg.tolerance("codazzi_equation", 1e-6),
    ));

    let conn = Connection3::geometric(chart);
    match solve3(&conn, &sg.grid, base_spinor(), cfg.steps_per_cell) {
        Err(Error::FlatnessViolation { found, threshold }) => {
            checks.push(ctx.from_sup("flatness", found, threshold));
        }
        Err(e) => return Err(e),
        Ok(solved) => {
            checks.push(ctx.from_sup(
                "flatness",
                solved.flatness.max_per_area,
                solved.flatness.threshold_per_area,
            ));
            checks.push(ctx.from_sup(
                "path_independence",
                solved.path_independence,
                cfg.tolerance("path_independence", 1e-8),
            ));
            let r = crate::hypersurface4::verify_restricted3(&sg, &solved.field, &t_geom);
            checks.push(ctx.from_stats(
                "restricted_equation",
                &r,
                cfg.tolerance("restricted_equation", 1e-6),
            ));
            let em = energy_momentum3(&sg, &solved.field)?;
            checks.push(ctx.from_sup(
                "energy_momentum_matches_tensor",
                em.max_difference(&t_geom),
                cfg.tolerance("energy_momentum_matches_tensor", 1e-6),
            ));
            checks.push(ctx.from_sup(
                "norm_constancy",
                norm_constancy3(&solved.field),
                cfg.tolerance("norm_constancy", 1e-10),
            ));
        }
    }
    let wall = start.elapsed().as_millis() as u64;
    Ok(Report::new(
        echo(cfg, "verify", "R4", &grid, eta3),
        checks,
        wall,
    ))
}

/// Solve the restriction pipeline and emit the spinor field as CSV plus a
/// JSON report with the residuals and the reconstructed tensor.
pub fn cmd_restrict(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let dim = surface_dim(&cfg.surface)?;
    let base = cfg
        .out
        .clone()
        .unwrap_or_else(|| std::path::PathBuf::from(format!("spinform_{}", cfg.surface)));
    let csv_path = base.with_extension("csv");

    let report = if dim == 2 {
        let chart = catalog(&cfg.surface, cfg.param)?;
        let grid = cfg.grid_for_dim(2)?;
        let eta = eta_for(cfg, chart.space.eta());
        let sg = SurfaceGrid::new(chart.clone(), grid[0], grid[1])?;
        let ctx = context(cfg, &grid, eta);
        let conn = ModifiedConnection {
            chart,
            eta,
            t_source: TensorSource::HalfShape,
        };
        let solved = solve_on_chart(&conn, &sg.grid, base_spinor(), cfg.steps_per_cell)?;

        let mut csv = String::from("u,v,re_z1,im_z1,re_z2,im_z2\n");
        for j in 0..sg.grid.nv {
            for i in 0..sg.grid.nu {
                let (u, v) = sg.grid.node(i, j);
                let s = solved.field.at(i, j).flat();
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    u, v, s[0], s[1], s[2], s[3]
                ));
            }
        }
        std::fs::write(&csv_path, csv)?;

        let t_geom = sg.half_shape_field();
        let mut checks = Vec::new();
        checks.push(ctx.from_sup(
            "path_independence",
            solved.path_independence,
            cfg.tolerance("path_independence", 1e-8),
        ));
        let r = verify_restricted_equation(&sg, &solved.field, &t_geom, eta);
        checks.push(ctx.from_stats(
            "restricted_equation",
            &r,
            cfg.tolerance("restricted_equation", 1e-6),
        ));
        let r = check_dirac_identity(&sg, &solved.field, eta);
        checks.push(ctx.from_stats("dirac_identity", &r, cfg.tolerance("dirac_identity", 1e-6)));
        let rec = reconstruct_t_from_dirac(&sg, &solved.field, eta)?;
        checks.push(ctx.from_sup(
            "reconstruction_matches_shape",
            rec.max_difference(&t_geom),
            cfg.tolerance("reconstruction_matches_shape", 1e-6),
        ));
        let wall = start.elapsed().as_millis() as u64;
        Report::new(
            echo(cfg, "restrict", sg.chart.space.name(), &grid, eta),
            checks,
            wall,
        )
    } else {
        let chart = catalog3(&cfg.surface, cfg.param)?;
        let grid = cfg.grid_for_dim(3)?;
        let sg = SurfaceGrid3::new(chart.clone(), [grid[0], grid[1], grid[2]])?;
        let eta3 = Complex64::new(0.0, 0.0);
        let ctx = context(cfg, &grid, eta3);
        let conn = Connection3::geometric(chart);
        let solved = solve3(&conn, &sg.grid, base_spinor(), cfg.steps_per_cell)?;

        let mut csv = String::from("u,v,w,re_z1,im_z1,re_z2,im_z2\n");
        for k in 0..sg.grid.n[2] {
            for j in 0..sg.grid.n[1] {
                for i in 0..sg.grid.n[0] {
                    let p = sg.grid.node([i, j, k]);
                    let s = solved.field.at([i, j, k]).flat();
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        p[0], p[1], p[2], s[0], s[1], s[2], s[3]
                    ));
                }
            }
        }
        std::fs::write(&csv_path, csv)?;

        let t_geom = sg.half_shape_field();
        let mut checks = Vec::new();
        checks.push(ctx.from_sup(
            "path_independence",
            solved.path_independence,
            cfg.tolerance("path_independence", 1e-8),
        ));
        let r = crate::hypersurface4::verify_restricted3(&sg, &solved.field, &t_geom);
        checks.push(ctx.from_stats(
            "restricted_equation",
            &r,
            cfg.tolerance("restricted_equation", 1e-6),
        ));
        let em = energy_momentum3(&sg, &solved.field)?;
        checks.push(ctx.from_sup(
            "energy_momentum_matches_tensor",
            em.max_difference(&t_geom),
            cfg.tolerance("energy_momentum_matches_tensor", 1e-6),
        ));
        let wall = start.elapsed().as_millis() as u64;
        Report::new(echo(cfg, "restrict", "R4", &grid, eta3), checks, wall)
    };

    let json_path = base.with_extension("json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&report)?)?;
    print_check_lines(&report);
    Ok(report)
}

/// Order-of-accuracy studies: transport path-independence over a grid
/// ladder, and the geometric finite-difference stencils over a step ladder.
pub fn cmd_convergence(cfg: &RunConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let start = Instant::now();
    let dim = surface_dim(&cfg.surface)?;
    if dim != 2 {
        return Err(Error::Config(
            "convergence studies run on 2-dimensional catalog surfaces".into(),
        ));
    }
    let chart = catalog(&cfg.surface, cfg.param)?;
    let eta = eta_for(cfg, chart.space.eta());
    let mut studies = Vec::new();

    // transport: path-independence residual against the grid step
    let mut steps = Vec::new();
    let mut residuals = Vec::new();
    for &n in &cfg.ladder {
        let grid = crate::spin_calculus::Grid2::new(&chart, n, n)?;
        let conn = ModifiedConnection {
            chart: chart.clone(),
            eta,
            t_source: TensorSource::HalfShape,
        };
        let solved = solve_on_chart(&conn, &grid, base_spinor(), cfg.steps_per_cell)?;
        steps.push(grid.hu.max(grid.hv));
        residuals.push(solved.path_independence);
    }
    studies.push(ConvergenceStudy::fit(
        "transport_path_independence",
        &steps,
        &residuals,
    ));

    // geometric stencils: successive differences of intrinsic curvature and
    // mean curvature under step refinement at a fixed interior point
    let u = 0.5 * (chart.u_range.0 + chart.u_range.1) + 0.11;
    let v = 0.5 * (chart.v_range.0 + chart.v_range.1) - 0.07;
    let ladder = [0.16, 0.08, 0.04, 0.02];
    let kvals: Vec<f64> = ladder
        .iter()
        .map(|&h| chart.gauss_curvature_with_step(u, v, h))
        .collect();
    let hvals: Vec<f64> = ladder
        .iter()
        .map(|&h| chart.mean_curvature_with_step(u, v, h))
        .collect::<Result<_>>()?;
    let diffs = |vals: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut hs = Vec::new();
        let mut ds = Vec::new();
        for k in 0..vals.len() - 1 {
            hs.push(ladder[k]);
            ds.push((vals[k] - vals[k + 1]).abs());
        }
        (hs, ds)
    };
    let (hs, ds) = diffs(&kvals);
    studies.push(ConvergenceStudy::fit("curvature_stencils", &hs, &ds));
    let (hs, ds) = diffs(&hvals);
    studies.push(ConvergenceStudy::fit("shape_stencils", &hs, &ds));

    let pass = studies.iter().all(|s| {
        s.floor
            || s.fitted_order
                .map(|o| (o - 4.0).abs() <= 0.5)
                .unwrap_or(false)
    });
    let wall = start.elapsed().as_millis() as u64;
    let grid_echo: Vec<usize> = cfg.ladder.clone();
    let report = ConvergenceReport {
        config: echo(cfg, "convergence", chart.space.name(), &grid_echo, eta),
        studies,
        pass,
        wall_time_ms: wall,
    };
    if let Some(out) = &cfg.out {
        std::fs::write(
            out.with_extension("json"),
            serde_json::to_string_pretty(&report)?,
        )?;
    } else {
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    for s in &report.studies {
        let verdict = if s.floor {
            "floor".to_string()
        } else {
            format!("order {:.2}", s.fitted_order.unwrap_or(f64::NAN))
        };
        eprintln!(
            "[{}] {} {}",
            if report.pass { "pass" } else { "FAIL" },
            s.study,
            verdict
        );
    }
    Ok(report)
}

fn print_check_lines(report: &Report) {
    let mut err = std::io::stderr();
    for c in &report.checks {
        let _ = writeln!(
            err,
            "[{}] {}: sup {:.3e} (tol {:.1e})",
            if c.pass { "pass" } else { "FAIL" },
            c.identity,
            c.sup_residual,
            c.tolerance
        );
    }
}

fn emit(cfg: &RunConfig, report: &Report) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    if let Some(out) = &cfg.out {
        std::fs::write(out.with_extension("json"), json)?;
    } else {
        println!("{json}");
    }
    print_check_lines(report);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_for(surface: &str, grid: Vec<usize>) -> RunConfig {
        RunConfig {
            surface: surface.into(),
            grid,
            out: Some(std::env::temp_dir().join(format!("spinform_test_{surface}"))),
            ..Default::default()
        }
    }

    #[test]
    fn verify_plane_all_checks_near_zero() {
        let report = cmd_verify(&cfg_for("plane", vec![8, 8])).unwrap();
        assert!(report.pass);
        for c in &report.checks {
            assert!(
                c.sup_residual == 0.0 || c.sup_residual < 1e-12,
                "{}: {:.3e}",
                c.identity,
                c.sup_residual
            );
        }
    }

    #[test]
    fn verify_unknown_surface_is_config_class() {
        let err = cmd_verify(&cfg_for("klein_bottle", vec![8, 8])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = cfg_for("sphere", vec![12, 12]);
        let a = cmd_verify(&cfg).unwrap();
        let b = cmd_verify(&cfg).unwrap();
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
    }

    #[test]
    fn restrict_writes_field_and_report() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_for("sphere", vec![16, 16]);
        cfg.out = Some(dir.path().join("sphere_run"));
        let report = cmd_restrict(&cfg).unwrap();
        assert!(report.pass);
        let csv = std::fs::read_to_string(dir.path().join("sphere_run.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "u,v,re_z1,im_z1,re_z2,im_z2");
        assert_eq!(csv.lines().count(), 1 + 16 * 16);
        let json = std::fs::read_to_string(dir.path().join("sphere_run.json")).unwrap();
        assert!(json.contains("reconstruction_matches_shape"));
    }

    #[test]
    fn convergence_floor_on_plane() {
        let mut cfg = cfg_for("plane", vec![]);
        cfg.ladder = vec![8, 16];
        cfg.steps_per_cell = 1;
        let report = cmd_convergence(&cfg).unwrap();
        let transport = &report.studies[0];
        assert!(transport.floor);
    }
}
