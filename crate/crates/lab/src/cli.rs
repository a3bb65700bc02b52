//! Command-line front end.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdrk_core::mdrk::{Coupling, Formulation};
use mdrk_core::{JacobianMode, NewtonConfig, StrategyKind};

use crate::error::{LabError, Result};
use crate::plot::render_svg;
use crate::record::{read_csv, write_csv, RunRecord};
use crate::reference::ReferencePolicy;
use crate::sweep::{conditioning, convergence, single_run, MethodChoice};

#[derive(Debug, Parser)]
#[command(name = "mdrk-lab", version, about = "Convergence and conditioning experiments for MDRK integrators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Error and EOC over a list of step counts.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
        /// Fail instead of computing a fine-grid reference when no exact solution exists.
        #[arg(long)]
        no_reference_fallback: bool,
    },
    /// Mean Newton condition number over a list of ε.
    Conditioning {
        #[command(flatten)]
        run: RunArgs,
    },
    /// One integration; prints the final state and per-step iteration counts.
    Integrate {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Log-log SVG chart of a CSV produced by another command.
    Plot {
        /// Input CSV.
        #[arg(long)]
        input: PathBuf,
        /// Output SVG.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum JacobianArg {
    Fd,
    Analytic,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scheme: String,
    #[arg(long, default_value = "at")]
    pub strategy: StrategyKind,
    #[arg(long, default_value = "direct")]
    pub formulation: Formulation,
    #[arg(long, default_value = "dimdrk")]
    pub coupling: Coupling,
    #[arg(long, default_value = "pr")]
    pub problem: String,
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Vec<f64>,
    #[arg(long)]
    pub tend: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub nsteps: Vec<usize>,
    #[arg(long, default_value_t = 12)]
    pub ntol: u32,
    #[arg(long, default_value_t = 12)]
    pub ntol0: u32,
    #[arg(long, default_value_t = 1000)]
    pub maxiter: usize,
    /// Stencil half-width of the approximate strategy.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, value_enum, default_value = "fd")]
    pub jacobian: JacobianArg,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    fn choice(&self, base: NewtonConfig) -> MethodChoice {
        let mode = match self.jacobian {
            JacobianArg::Fd => JacobianMode::FiniteDifference,
            JacobianArg::Analytic => JacobianMode::Analytic,
        };
        let newton = base
            .with_tolerances(self.ntol, self.ntol0)
            .with_max_iter(self.maxiter)
            .with_jacobian_mode(mode);
        let c = MethodChoice::new(&self.scheme, self.strategy, self.formulation, self.coupling).with_newton(newton);
        match self.p {
            Some(p) => c.with_halfwidth(p),
            None => c,
        }
    }

    fn single_eps(&self) -> Result<f64> {
        match self.epsilon.as_slice() {
            [] => Ok(1.0),
            [e] => Ok(*e),
            _ => Err(LabError::Usage("this command takes a single --epsilon".into())),
        }
    }

    fn single_n(&self, default: usize) -> Result<usize> {
        match self.nsteps.as_slice() {
            [] => Ok(default),
            [n] => Ok(*n),
            _ => Err(LabError::Usage("this command takes a single --nsteps".into())),
        }
    }

    fn emit(&self, rows: &[RunRecord]) -> Result<()> {
        match &self.out {
            Some(path) => write_csv(rows, File::create(path)?),
            None => write_csv(rows, io::stdout().lock()),
        }
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Diverged,
}

pub fn execute(cli: Cli) -> Result<Status> {
    let rows = match cli.command {
        Command::Convergence {
            run,
            no_reference_fallback,
        } => {
            let n_list = if run.nsteps.is_empty() {
                vec![4, 8, 16, 32, 64, 128]
            } else {
                run.nsteps.clone()
            };
            let policy = ReferencePolicy {
                allow_fallback: !no_reference_fallback,
                ..ReferencePolicy::default()
            };
            let rows = convergence(
                &run.choice(NewtonConfig::default()),
                &run.problem,
                run.single_eps()?,
                run.tend.unwrap_or(5.0),
                &n_list,
                &policy,
            )?;
            run.emit(&rows)?;
            rows
        }
        Command::Conditioning { run } => {
            let eps = if run.epsilon.is_empty() {
                vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4]
            } else {
                run.epsilon.clone()
            };
            let rows = conditioning(
                &run.choice(NewtonConfig::conditioning()),
                &run.problem,
                &eps,
                run.tend.unwrap_or(1.25),
                run.single_n(1)?,
            )?;
            run.emit(&rows)?;
            rows
        }
        Command::Integrate { run } => {
            let out = single_run(
                &run.choice(NewtonConfig::default()),
                &run.problem,
                run.single_eps()?,
                run.tend.unwrap_or(1.0),
                run.single_n(10)?,
            )?;
            let rows = vec![out.record];
            run.emit(&rows)?;
            let mut err = io::stderr().lock();
            match &out.y {
                Some(y) => {
                    let parts: Vec<String> = y.iter().map(|v| format!("{v:.12e}")).collect();
                    writeln!(err, "final state: [{}]", parts.join(", "))?;
                }
                None => writeln!(err, "run failed: {}", out.failure.as_deref().unwrap_or("unknown"))?,
            }
            let iters: Vec<String> = out.step_iterations.iter().map(|n| n.to_string()).collect();
            writeln!(err, "newton iterations per step: {}", iters.join(" "))?;
            rows
        }
        Command::Plot { input, out } => {
            let rows = read_csv(File::open(&input)?)?;
            std::fs::write(&out, render_svg(&rows))?;
            return Ok(Status::Success);
        }
    };
    Ok(if rows.iter().all(|r| r.converged) {
        Status::Success
    } else {
        Status::Diverged
    })
}
