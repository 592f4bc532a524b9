use clap::{Args, Parser, Subcommand};
use spinform::config::{load_config_file, parse_eta, parse_grid, RunConfig};
use spinform::{cli, Error};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spin-geometry verification for surfaces in space forms.
#[derive(Parser)]
#[command(name = "spinform", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full identity suite for a catalog surface.
    Verify(CommonArgs),
    /// Solve the restriction pipeline and emit the spinor field as CSV.
    Restrict(CommonArgs),
    /// Order-of-accuracy studies over grid and stencil ladders.
    Convergence(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Catalog surface name (see README for the list).
    #[arg(long)]
    surface: Option<String>,
    /// Grid extents, e.g. 64x64 or 16x16x16.
    #[arg(long)]
    grid: Option<String>,
    /// Killing constant: auto, a real number, or an imaginary one (0.5i).
    #[arg(long)]
    eta: Option<String>,
    /// Output path (base name; .json/.csv extensions are added).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key-value config file; flags win over file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RK4 steps per grid cell.
    #[arg(long)]
    steps: Option<usize>,
    /// Surface parameter (radius or geodesic radius).
    #[arg(long)]
    param: Option<f64>,
    /// Grid ladder for convergence, e.g. 16,32,64.
    #[arg(long)]
    ladder: Option<String>,
}

fn assemble(args: &CommonArgs, is_convergence: bool) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if is_convergence {
        // one step per cell isolates the integrator order from the
        // coefficient-stencil floor
        cfg.steps_per_cell = 1;
    }
    if let Some(path) = &args.config {
        load_config_file(path, &mut cfg)?;
    }
    if let Some(s) = &args.surface {
        cfg.surface = s.clone();
    }
    if let Some(g) = &args.grid {
        cfg.grid = parse_grid(g)?;
    }
    if let Some(e) = &args.eta {
        cfg.eta = parse_eta(e)?;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if let Some(s) = args.steps {
        cfg.steps_per_cell = s;
    }
    if let Some(p) = args.param {
        cfg.param = Some(p);
    }
    if let Some(l) = &args.ladder {
        cfg.ladder = l
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad ladder entry `{p}`")))
            })
            .collect::<Result<_, _>>()?;
    }
    Ok(cfg)
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify(args) => {
            let cfg = assemble(args, false)?;
            Ok(cli::cmd_verify(&cfg)?.pass)
        }
        Command::Restrict(args) => {
            let cfg = assemble(args, false)?;
            Ok(cli::cmd_restrict(&cfg)?.pass)
        }
        Command::Convergence(args) => {
            let cfg = assemble(args, true)?;
            Ok(cli::cmd_convergence(&cfg)?.pass)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("spinform: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
