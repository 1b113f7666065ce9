//! `boussinesq`: command-line harness tying the scattering solver, the
//! asymptotic formulas, the Painlevé front, and the damped simulation into
//! reproducible file-based experiments.

mod cfg;
mod commands;

use boussinesq_ist::Error;
use cfg::Overlay;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "boussinesq", version, about = "Inverse-scattering toolkit for u_tt = u_xx + (u^2)_xx + u_xxxx")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute reflection coefficients r1, r2 from initial data.
    Scatter {
        /// Initial data CSV (x,u0,v0).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output circle CSV; the ray table and report derive their names from it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Resample the input onto [-xmax, xmax] before solving.
        #[arg(long)]
        xmax: Option<f64>,
        /// Resampled grid size.
        #[arg(long)]
        ngrid: Option<usize>,
        /// Volterra residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// key=value config file; explicit flags win.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Check the exact identities and inequalities of a reflection table.
    Verify {
        /// Circle CSV produced by `scatter`.
        #[arg(long)]
        r: Option<PathBuf>,
        /// JSON report path.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate the five-sector long-time asymptotic profile.
    Asymptote {
        /// Circle CSV produced by `scatter`.
        #[arg(long)]
        r: Option<PathBuf>,
        /// Hastings-McLeod CSV produced by `painleve`.
        #[arg(long)]
        hm: Option<PathBuf>,
        /// Comma-separated evaluation times.
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        xmin: Option<f64>,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long)]
        dx: Option<f64>,
        /// Output profile CSV (x,t,u_asym,sector,extrapolated).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the damped pseudo-spectral simulation.
    Simulate {
        /// key=value config file (grid, times, damping, initial data).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for snapshots and the run report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare simulation snapshots against an asymptotic profile.
    Compare {
        /// Directory of snapshot_*.csv files from `simulate`.
        #[arg(long)]
        sim: Option<PathBuf>,
        /// Profile CSV from `asymptote`.
        #[arg(long)]
        asym: Option<PathBuf>,
        /// JSON report path; the metrics CSV derives its name from it.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Estimate the blow-up horizon from the r1 ray table.
    Blowup {
        /// Ray CSV (tau,re_r1,im_r1).
        #[arg(long)]
        ray: Option<PathBuf>,
        /// JSON report path.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve the Hastings-McLeod Painlevé II problem and tabulate u_P.
    Painleve {
        #[arg(long)]
        ymax: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        /// Output CSV (y,u,u_prime,u_P).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> boussinesq_ist::Result<()> {
    match cli.cmd {
        Cmd::Scatter { input, out, xmax, ngrid, tol, config } => {
            let ov = Overlay::load(config.as_deref())?;
            commands::cmd_scatter(&ov, input, out, xmax, ngrid, tol)
        }
        Cmd::Verify { r, report, config } => {
            let ov = Overlay::load(config.as_deref())?;
            commands::cmd_verify(&ov, r, report)
        }
        Cmd::Asymptote { r, hm, t, xmin, xmax, dx, out, config } => {
            let ov = Overlay::load(config.as_deref())?;
            commands::cmd_asymptote(&ov, r, hm, t, xmin, xmax, dx, out)
        }
        Cmd::Simulate { config, out } => {
            // The config file doubles as the experiment description here, so
            // it is read inside the command; there is no separate overlay.
            let ov = Overlay::load(None)?;
            commands::cmd_simulate(&ov, config, out)
        }
        Cmd::Compare { sim, asym, report, config } => {
            let ov = Overlay::load(config.as_deref())?;
            commands::cmd_compare(&ov, sim, asym, report)
        }
        Cmd::Blowup { ray, report, config } => {
            let ov = Overlay::load(config.as_deref())?;
            commands::cmd_blowup(&ov, ray, report)
        }
        Cmd::Painleve { ymax, n, out, config } => {
            let ov = Overlay::load(config.as_deref())?;
            commands::cmd_painleve(&ov, ymax, n, out)
        }
    }
}

/// 0 success, 2 solver non-convergence, 1 everything else.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. }
        | Error::NearZeroDenominator { .. }
        | Error::SolverFailure(_) => 2,
        _ => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
