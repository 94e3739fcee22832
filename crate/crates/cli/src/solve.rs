//! `solve`: one solver on one problem.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use gdpm_core::baselines::{accelerated_gd, exact_step_gd};
use gdpm_core::gdeig::run_gdeig;
use gdpm_core::gdm::{run_gdm, StepSchedule};
use gdpm_core::kick::{run_kick, KickConfig};
use gdpm_core::mmio::write_vector;
use gdpm_core::planar::{planar_solve_known_l1, planar_solve_overestimate, PlanarResult, StationaryPoint};
use gdpm_core::trace::write_csv;
use gdpm_core::vecops::norm;
use gdpm_core::{Error, IterationRecord, SolverConfig, SolverRun};

use crate::args::{Alg, SolveArgs};
use crate::problem::{load_problem, parse_x0, Loaded};
use crate::{CliError, CliResult};

const PLANAR_STALL_TOL: f64 = 1e-10;

fn write_trace(path: &Path, trace: &[IterationRecord]) -> CliResult<()> {
    write_csv(trace, BufWriter::new(File::create(path)?))?;
    Ok(())
}

fn alg_name(alg: Alg) -> &'static str {
    match alg {
        Alg::Gd => "gd",
        Alg::Gdm => "gdm",
        Alg::Gdeig => "gdeig",
        Alg::Kick => "kick",
        Alg::Exact => "exact",
        Alg::Agm => "agm",
        Alg::Planar => "planar",
    }
}

fn step_size(args: &SolveArgs, loaded: &Loaded) -> CliResult<f64> {
    if let Some(a) = args.alpha {
        return Ok(a);
    }
    let (l1, _) = loaded.extremes()?;
    if l1 <= 0.0 {
        return Err(CliError::input(format!("largest eigenvalue is {l1}; pass --alpha explicitly")));
    }
    Ok(1.0 / l1)
}

fn print_run(out: &mut dyn Write, run: &SolverRun) -> CliResult<()> {
    writeln!(out, "termination: {}", run.termination.label())?;
    writeln!(out, "iterations: {}", run.iterations())?;
    writeln!(out, "final f: {:e}", run.final_f())?;
    writeln!(out, "gradient norm: {:e}", norm(&run.g))?;
    writeln!(out, "matvecs: {}", run.matvecs)?;
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> CliResult<()> {
    let loaded = load_problem(args)?;
    let p = &loaded.problem;
    let x0 = parse_x0(&args.x0, p.dim())?;
    if args.alg == Alg::Planar {
        return solve_planar(args, &loaded, &x0, out);
    }
    let mut cfg = SolverConfig::with_step(1.0, args.beta).max_iter(args.max_iter);
    cfg.g_tol = args.gtol;
    writeln!(out, "algorithm: {}", alg_name(args.alg))?;
    writeln!(out, "n: {}", p.dim())?;

    let outcome = match args.alg {
        Alg::Gd => {
            cfg.beta = 0.0;
            run_gdm(p, &x0, &cfg, &StepSchedule::Fixed(step_size(args, &loaded)?)).map(|r| (r, None))
        }
        Alg::Gdm => run_gdm(p, &x0, &cfg, &StepSchedule::Fixed(step_size(args, &loaded)?)).map(|r| (r, None)),
        Alg::Gdeig => {
            cfg.alpha = step_size(args, &loaded)?;
            cfg.compute_delta = true;
            run_gdeig(p, &x0, &cfg).map(|r| (r.run.clone(), Some(r)))
        }
        Alg::Kick => {
            cfg.alpha = step_size(args, &loaded)?;
            run_kick(p, &x0, &KickConfig::new(args.s), &cfg).map(|r| (r, None))
        }
        Alg::Exact => exact_step_gd(p, &x0, &cfg).map(|r| (r, None)),
        Alg::Agm => {
            let (l1, ln) = loaded.extremes()?;
            accelerated_gd(p, &x0, l1, ln, &cfg).map(|r| (r, None))
        }
        Alg::Planar => unreachable!("handled above"),
    };

    let (run, eig) = match outcome {
        Ok(v) => v,
        Err(Error::Diverged(report)) => {
            if let Some(path) = &args.trace {
                write_trace(path, &report.trace)?;
            }
            writeln!(out, "termination: diverged")?;
            writeln!(out, "iterations: {}", report.iteration)?;
            return Err(CliError::Core(Error::Diverged(report)));
        }
        Err(e) => return Err(e.into()),
    };
    print_run(out, &run)?;
    if let Some(g) = &eig {
        if let Some(est) = &g.estimate {
            writeln!(out, "lambda_n estimate: {:.6}", est.lambda_n)?;
            writeln!(out, "nu1: {:.6}", est.nu1)?;
            if let Some(d) = est.delta {
                writeln!(out, "delta: {d:e}")?;
            }
            if let Some(path) = &args.direction_out {
                write_vector(&est.direction, BufWriter::new(File::create(path)?))?;
            }
        }
        writeln!(out, "verdict: {}", g.verdict.kind.label())?;
    }
    if let Some(path) = &args.trace {
        write_trace(path, &run.trace)?;
    }
    Ok(())
}

fn solve_planar(args: &SolveArgs, loaded: &Loaded, x0: &[f64], out: &mut dyn Write) -> CliResult<()> {
    let p = &loaded.problem;
    if p.dim() != 2 {
        return Err(CliError::input(format!("planar requires n=2 (got n={})", p.dim())));
    }
    let res: PlanarResult = match args.alpha {
        Some(alpha) if alpha > 0.0 => planar_solve_overestimate(p, x0, 1.0 / alpha, PLANAR_STALL_TOL, args.max_iter)?,
        Some(alpha) => return Err(CliError::input(format!("--alpha must be positive, got {alpha}"))),
        None => planar_solve_known_l1(p, x0)?,
    };
    writeln!(out, "algorithm: planar")?;
    writeln!(out, "nature: {}", res.nature.label())?;
    match &res.stationary {
        StationaryPoint::Point(x) => writeln!(out, "stationary point: {:?}", x)?,
        StationaryPoint::LeastSquares { x, residual } => {
            writeln!(out, "no stationary point; least-squares point {:?} (residual {residual:e})", x)?
        }
    }
    writeln!(out, "lambda1: {:.12}", res.eig1.0)?;
    writeln!(out, "lambda2: {:.12}", res.eig2.0)?;
    writeln!(out, "steps: {}", res.steps_used)?;
    for note in &res.notes {
        writeln!(out, "note: {note:?}")?;
    }
    if let Some(path) = &args.direction_out {
        let mut w = BufWriter::new(File::create(path)?);
        write_vector(&res.eig1.1, &mut w)?;
        write_vector(&res.eig2.1, &mut w)?;
    }
    Ok(())
}
