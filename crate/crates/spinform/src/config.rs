//! Run configuration: a flat key-value config file plus command-line
//! overrides, flags winning over file entries.
//!
//! Recognized keys: `surface`, `grid` (AxB or AxBxC), `steps`, `eta`
//! (`auto`, a real number, or an imaginary one like `0.5i`), `param`,
//! `out`, `ladder` (comma-separated grid sizes for the convergence
//! command), and `tol_<check>` tolerance overrides.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EtaSpec {
    /// Use the Killing constant of the surface's model space.
    Auto,
    Value(Complex64),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub surface: String,
    pub grid: Vec<usize>,
    pub steps_per_cell: usize,
    pub eta: EtaSpec,
    pub param: Option<f64>,
    pub out: Option<PathBuf>,
    pub ladder: Vec<usize>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            surface: String::new(),
            grid: Vec::new(),
            steps_per_cell: 4,
            eta: EtaSpec::Auto,
            param: None,
            out: None,
            ladder: vec![16, 32, 64],
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    /// Tolerance for a named check, with the built-in default.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    /// Grid extents with defaults filled in per surface dimension: 64×64
    /// for surfaces, 16³ for hypersurfaces.
    pub fn grid_for_dim(&self, dim: usize) -> Result<Vec<usize>> {
        let grid = if self.grid.is_empty() {
            if dim == 2 {
                vec![64, 64]
            } else {
                vec![16, 16, 16]
            }
        } else {
            self.grid.clone()
        };
        if grid.len() != dim {
            return Err(Error::Config(format!(
                "surface `{}` needs a {}-axis grid, got {} axes",
                self.surface,
                dim,
                grid.len()
            )));
        }
        for &n in &grid {
            if n < crate::spin_calculus::MIN_GRID {
                return Err(Error::GridTooSmall {
                    need: crate::spin_calculus::MIN_GRID,
                    got: n,
                });
            }
        }
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.surface.is_empty() {
            return Err(Error::Config("no surface selected (use --surface)".into()));
        }
        if self.steps_per_cell == 0 {
            return Err(Error::Config("steps per cell must be at least 1".into()));
        }
        for (k, v) in &self.tolerances {
            if !(*v > 0.0) {
                return Err(Error::Config(format!(
                    "tolerance {k} must be positive, got {v}"
                )));
            }
        }
        if self.ladder.len() < 2 {
            return Err(Error::Config(
                "convergence ladder needs at least 2 levels".into(),
            ));
        }
        Ok(())
    }
}

pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split('x').collect();
    if parts.len() != 2 && parts.len() != 3 {
        return Err(Error::Config(format!(
            "grid must look like 64x64 or 16x16x16, got `{s}`"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad grid extent `{p}` in `{s}`")))
        })
        .collect()
}

pub fn parse_eta(s: &str) -> Result<EtaSpec> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("auto") {
        return Ok(EtaSpec::Auto);
    }
    if let Some(imag) = t.strip_suffix('i').or_else(|| t.strip_suffix('I')) {
        let b: f64 = if imag.is_empty() || imag == "+" {
            1.0
        } else if imag == "-" {
            -1.0
        } else {
            imag.parse()
                .map_err(|_| Error::Config(format!("bad eta `{s}`")))?
        };
        return Ok(EtaSpec::Value(Complex64::new(0.0, b)));
    }
    let a: f64 = t
        .parse()
        .map_err(|_| Error::Config(format!("bad eta `{s}`")))?;
    Ok(EtaSpec::Value(Complex64::new(a, 0.0)))
}

fn parse_ladder(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad ladder entry `{p}`")))
        })
        .collect()
}

/// Apply one key-value pair onto the config.
fn apply_kv(cfg: &mut RunConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "surface" => cfg.surface = value.to_string(),
        "grid" => cfg.grid = parse_grid(value)?,
        "steps" => {
            cfg.steps_per_cell = value
                .parse()
                .map_err(|_| Error::Config(format!("bad steps `{value}`")))?
        }
        "eta" => cfg.eta = parse_eta(value)?,
        "param" => {
            cfg.param = Some(
                value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad param `{value}`")))?,
            )
        }
        "out" => cfg.out = Some(PathBuf::from(value)),
        "ladder" => cfg.ladder = parse_ladder(value)?,
        _ => {
            if let Some(tol) = key.strip_prefix("tol_") {
                let v: f64 = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad tolerance `{value}` for {key}")))?;
                cfg.tolerances.insert(tol.to_string(), v);
            } else {
                return Err(Error::Config(format!("unknown config key `{key}`")));
            }
        }
    }
    Ok(())
}

/// Parse a flat `key = value` config file ('#' starts a comment).
pub fn load_config_file(path: &Path, cfg: &mut RunConfig) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                lineno + 1
            ))
        })?;
        apply_kv(cfg, key.trim(), value.trim())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("64x64").unwrap(), vec![64, 64]);
        assert_eq!(parse_grid("16x16x16").unwrap(), vec![16, 16, 16]);
        assert!(parse_grid("64").is_err());
        assert!(parse_grid("axb").is_err());
    }

    #[test]
    fn eta_parsing() {
        assert_eq!(parse_eta("auto").unwrap(), EtaSpec::Auto);
        assert_eq!(
            parse_eta("0.5").unwrap(),
            EtaSpec::Value(Complex64::new(0.5, 0.0))
        );
        assert_eq!(
            parse_eta("0.5i").unwrap(),
            EtaSpec::Value(Complex64::new(0.0, 0.5))
        );
        assert_eq!(
            parse_eta("0").unwrap(),
            EtaSpec::Value(Complex64::new(0.0, 0.0))
        );
        assert!(parse_eta("half").is_err());
    }

    #[test]
    fn config_file_roundtrip() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# pipeline settings").unwrap();
        writeln!(f, "surface = clifford_torus").unwrap();
        writeln!(f, "grid = 32x32").unwrap();
        writeln!(f, "steps = 2").unwrap();
        writeln!(f, "tol_dirac_identity = 1e-5").unwrap();
        let mut cfg = RunConfig::default();
        load_config_file(f.path(), &mut cfg).unwrap();
        assert_eq!(cfg.surface, "clifford_torus");
        assert_eq!(cfg.grid, vec![32, 32]);
        assert_eq!(cfg.steps_per_cell, 2);
        assert_eq!(cfg.tolerance("dirac_identity", 1e-6), 1e-5);
        assert_eq!(cfg.tolerance("other", 1e-6), 1e-6);
    }

    #[test]
    fn validation_failures() {
        let mut cfg = RunConfig {
            surface: "plane".into(),
            ..Default::default()
        };
        cfg.grid = vec![3, 3];
        assert!(matches!(
            cfg.grid_for_dim(2),
            Err(Error::GridTooSmall { .. })
        ));
        cfg.grid = vec![8, 8];
        assert!(cfg.grid_for_dim(3).is_err());
        cfg.tolerances.insert("x".into(), -1.0);
        assert!(cfg.validate().is_err());
    }
}
