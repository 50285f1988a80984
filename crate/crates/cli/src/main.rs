//! `spherevol`: reproducible runs of the volume, bound, index, optimizer and
//! surface checks, printed as JSON (default) or CSV.

mod commands;
mod field_spec;
mod manifest;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use field_spec::{FieldSpec, Resolution};

#[derive(Debug, Parser)]
#[command(name = "spherevol", version, about = "Volumes of unit vector fields on the sphere")]
pub struct Cli {
    /// Print CSV instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    /// Print JSON (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Also write a run manifest that `replay` can re-execute.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct QuadFlags {
    /// Gauss-Legendre panels in latitude.
    #[arg(long, default_value_t = 24)]
    n_alpha: usize,
    #[arg(long, default_value_t = 8)]
    gauss_order: usize,
    /// Trapezoid nodes in longitude.
    #[arg(long, default_value_t = 128)]
    n_beta: usize,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Variant {
    Absolute,
    AsPrinted,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume of the graph of a field in the unit tangent bundle.
    Volume {
        #[arg(long)]
        field: FieldSpec,
        #[command(flatten)]
        quad: QuadFlags,
    },
    /// The lower bound pi L(xi_k), for one k or for k = 1..k_max.
    Bound {
        #[arg(long, required_unless_present = "k_max", conflicts_with = "k_max")]
        k: Option<i64>,
        #[arg(long)]
        k_max: Option<i64>,
    },
    /// Volume of a field against the bound for its larger polar index.
    Verify {
        #[arg(long)]
        field: FieldSpec,
        #[command(flatten)]
        quad: QuadFlags,
    },
    /// The five quantities of the lower-bound chain.
    Audit {
        #[arg(long)]
        field: FieldSpec,
        /// Defaults to the larger polar index of the field.
        #[arg(long)]
        k: Option<i64>,
        #[arg(long, value_enum, default_value = "absolute")]
        variant: Variant,
        #[command(flatten)]
        quad: QuadFlags,
    },
    /// Poincare indices at both poles.
    Index {
        #[arg(long)]
        field: FieldSpec,
        /// Colatitude of the sampling circles.
        #[arg(long, default_value_t = 0.05)]
        delta0: f64,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Discrete volume minimization in the index class of v_k.
    Optimize {
        #[arg(long)]
        k: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Size of the random perturbation of v_k used as the start.
        #[arg(long, default_value_t = 0.3)]
        amplitude: f64,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value = "32x64")]
        resolution: Resolution,
        /// Distance of the first and last lattice rows from the poles.
        #[arg(long, default_value_t = 1e-3)]
        cutoff: f64,
        /// Write the final grid field here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed surface built from the graph of v_k.
    Surface {
        #[arg(long)]
        k: i64,
        /// Mesh or curvature grid size; 64x256 for meshes, 40x160 for curvature.
        #[arg(long)]
        resolution: Option<Resolution>,
        /// Report sup |H| over the grid instead of the mesh.
        #[arg(long, conflicts_with = "export")]
        mean_curvature: bool,
        /// Finite-difference step for --mean-curvature.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Write the mesh as OFF plus a JSON sidecar.
        #[arg(long, value_name = "PATH")]
        export: Option<PathBuf>,
    },
    /// Re-run a manifest and check that the payload is reproduced.
    Replay { manifest: PathBuf },
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("SPHEREVOL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow::anyhow!("SPHEREVOL_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run() -> anyhow::Result<()> {
    configure_threads()?;
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors are bad input (exit 1); --help and --version exit 0
            e.print()?;
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = std::time::Instant::now();
    let report = commands::execute(&cli.command)?;
    if let Some(path) = &cli.manifest {
        let args = manifest::replayable_args(&argv[1..]);
        manifest::RunManifest::new(&cli.command, args, &report, start.elapsed()).write(path)?;
    }
    let stdout = std::io::stdout().lock();
    if cli.csv {
        report.write_csv(stdout)?;
    } else {
        report.write_json(stdout)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let _ = writeln!(std::io::stderr(), "error: {err:#}");
            let not_converged = err
                .chain()
                .any(|e| matches!(e.downcast_ref(), Some(spherevol::Error::NotConverged { .. })));
            ExitCode::from(if not_converged { 2 } else { 1 })
        }
    }
}
