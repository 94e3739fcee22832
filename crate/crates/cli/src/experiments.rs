//! Benchmark experiments. Seeds run in parallel; results are collected in
//! seed order, so the CSVs are identical from run to run.
//!
//! Seed `i` of an experiment with base seed `b` builds its problem from
//! `b + i`, its start point from `b + i + 10_000` and its solution vector
//! (when `b = Ax*`) from `b + i + 20_000`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use gdpm_core::baselines::{accelerated_gd, exact_step_gd};
use gdpm_core::gdeig::run_gdeig_with;
use gdpm_core::gdm::{run_gdm, smart_init, two_over_lambda1_run, StepSchedule};
use gdpm_core::linops::eval_g;
use gdpm_core::kick::{run_kick, KickConfig};
use gdpm_core::probgen::{gen_initial_point, gen_problem, EigLaw, GroundTruth, PointLaw, Rhs, SpectrumSpec};
use gdpm_core::trace::write_csv;
use gdpm_core::vecops::{dot, norm};
use gdpm_core::{Error, IterationRecord, QuadraticProblem, SolverConfig, SolverRun, Termination};

use crate::args::{ExperimentArgs, ExperimentName};
use crate::{CliError, CliResult};

const X0_OFFSET: u64 = 10_000;
const RHS_OFFSET: u64 = 20_000;
/// Recovery runs stop once `δ/‖g‖` reaches this; with `b = 0` the iterates
/// double every step and would overflow long before 1000 iterations.
const RECOVERY_EIG_TOL: f64 = 1e-12;
/// Start points for the saddle-escape scan keep this fraction of their
/// negative-curvature components.
const SADDLE_SHRINK: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub n: usize,
    pub seeds: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Kick periods `s + 1` for the scan.
    pub periods: Vec<usize>,
    /// Relative f-error target for iterations-to-tolerance.
    pub f_tol: f64,
}

impl Settings {
    pub fn defaults(name: ExperimentName) -> Self {
        let (n, seeds, max_iter) = match name {
            ExperimentName::EigRecovery => (200, 100, 1000),
            ExperimentName::KickScan => (200, 10, 1000),
            ExperimentName::StepSize | ExperimentName::KickBench => (1000, 5, 20_000),
        };
        Self { n, seeds, max_iter, seed: 0, periods: vec![10, 20, 40, 100, 200], f_tol: 1e-10 }
    }

    pub fn from_args(a: &ExperimentArgs) -> CliResult<Self> {
        let mut s = Self::defaults(a.name);
        s.n = a.n.unwrap_or(s.n);
        s.seeds = a.seeds.unwrap_or(s.seeds);
        s.max_iter = a.max_iter.unwrap_or(s.max_iter);
        s.seed = a.seed;
        if let Some(p) = &a.periods {
            s.periods = p.clone();
        }
        if s.n < 2 || s.seeds == 0 {
            return Err(CliError::input("experiments need n >= 2 and at least one seed"));
        }
        if s.periods.iter().any(|&p| p < 2) {
            return Err(CliError::input("kick periods s+1 must be at least 2"));
        }
        Ok(s)
    }

    fn seed_of(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

fn real(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}

fn opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Per-iteration mean over traces of unequal length; a finished run keeps
/// contributing its last value.
pub fn mean_curve(series: &[Vec<f64>]) -> Vec<f64> {
    let len = series.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|k| {
            let vals = series.iter().filter_map(|s| s.get(k).or(s.last()));
            let (sum, cnt) = vals.fold((0.0, 0usize), |(a, c), v| (a + v, c + 1));
            sum / cnt as f64
        })
        .collect()
}

/// One solver run inside an experiment.
#[derive(Debug, Clone)]
pub struct MethodRun {
    /// Problem class within the experiment (empty when there is only one).
    pub group: String,
    pub method: String,
    pub seed: u64,
    pub termination: String,
    pub trace: Vec<IterationRecord>,
    /// Experiment-specific count: escape iteration, iterations to gtol, or
    /// iterations to the f-error target.
    pub metric: Option<usize>,
}

impl MethodRun {
    fn from_result(group: &str, method: String, seed: u64, res: gdpm_core::Result<SolverRun>) -> CliResult<Self> {
        let (termination, trace) = match res {
            Ok(run) => (run.termination.label().to_string(), run.trace),
            Err(Error::Diverged(report)) => ("diverged".to_string(), report.trace),
            Err(e) => return Err(e.into()),
        };
        Ok(Self { group: group.to_string(), method, seed, termination, trace, metric: None })
    }

    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.k)
    }
}

fn first_k(trace: &[IterationRecord], pred: impl Fn(f64) -> bool) -> Option<usize> {
    trace.iter().find(|r| pred(r.f)).map(|r| r.k)
}

fn summary_csv(runs: &[MethodRun], metric_name: &str) -> String {
    let mut s = format!("group,method,seed,termination,iterations,{metric_name}\n");
    for r in runs {
        let _ = writeln!(s, "{},{},{},{},{},{}", r.group, r.method, r.seed, r.termination, r.iterations(), opt_usize(r.metric));
    }
    s
}

/// `k` followed by one mean-f column per method of `group`, methods in
/// first-appearance order.
fn aggregate_csv(runs: &[MethodRun], group: &str) -> String {
    let mut methods: Vec<&str> = Vec::new();
    for r in runs.iter().filter(|r| r.group == group) {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let curves: Vec<Vec<f64>> = methods
        .iter()
        .map(|m| {
            let series: Vec<Vec<f64>> = runs
                .iter()
                .filter(|r| r.group == group && r.method == *m)
                .map(|r| r.trace.iter().map(|t| t.f).collect())
                .collect();
            mean_curve(&series)
        })
        .collect();
    let mut s = String::from("k");
    for m in &methods {
        let _ = write!(s, ",{m}");
    }
    s.push('\n');
    let len = curves.iter().map(Vec::len).max().unwrap_or(0);
    for k in 0..len {
        s.push_str(&k.to_string());
        for c in &curves {
            s.push(',');
            s.push_str(&c.get(k).or(c.last()).map(|v| real(*v)).unwrap_or_default());
        }
        s.push('\n');
    }
    s
}

fn trace_files(runs: &[MethodRun]) -> CliResult<Vec<(String, String)>> {
    runs.iter()
        .map(|r| {
            let mut buf = Vec::new();
            write_csv(&r.trace, &mut buf)?;
            let group = if r.group.is_empty() { String::new() } else { format!("{}_", r.group) };
            Ok((format!("trace_{group}{}_seed{}.csv", r.method, r.seed), String::from_utf8_lossy(&buf).into_owned()))
        })
        .collect()
}

fn write_files(dir: &Path, files: &[(String, String)]) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    for (name, content) in files {
        fs::write(dir.join(name), content)?;
    }
    Ok(())
}

fn pd_law() -> EigLaw {
    EigLaw::UniformPd { lo: 0.01, hi: 1.0 }
}

fn start_point(s: &Settings, i: usize) -> CliResult<Vec<f64>> {
    Ok(gen_initial_point(s.n, s.seed_of(i).wrapping_add(X0_OFFSET), PointLaw::StandardGaussian)?)
}

fn problem(s: &Settings, i: usize, law: EigLaw, with_rhs: bool) -> CliResult<(QuadraticProblem, GroundTruth)> {
    let rhs = if with_rhs { Rhs::FromSolution(s.seed_of(i).wrapping_add(RHS_OFFSET)) } else { Rhs::Zero };
    Ok(gen_problem(&SpectrumSpec::new(s.n, law, s.seed_of(i)), rhs)?)
}

// ---------------------------------------------------------------- recovery

/// Spectrum for the recovery study: `λₙ = −1`, other negatives in
/// `[−0.5, −0.05]`, positives in `[0.05, 1]`, so the gap ratio is at most 0.75.
pub fn recovery_law(n: usize) -> EigLaw {
    EigLaw::Indefinite { neg_count: (n / 5).max(1), neg_range: (-0.5, -0.05), pos_range: (0.05, 1.0), leftmost: Some(-1.0) }
}

#[derive(Debug, Clone)]
pub struct RecoveryRun {
    pub seed: u64,
    pub lambda_n: f64,
    pub trace: Vec<IterationRecord>,
    /// `|λ̂ₙ − λₙ|/|λₙ|` per iteration, starting at iteration 1.
    pub eigval_err: Vec<f64>,
    /// `sin∠(vₙ, ĝ)` per iteration, starting at iteration 1.
    pub eigvec_err: Vec<f64>,
    /// `|vₙᵀĝ|` at the last iteration.
    pub alignment: f64,
}

impl RecoveryRun {
    pub fn final_eigval_err(&self) -> f64 {
        self.eigval_err.last().copied().unwrap_or(f64::INFINITY)
    }
}

pub fn eig_recovery(s: &Settings) -> CliResult<Vec<RecoveryRun>> {
    (0..s.seeds)
        .into_par_iter()
        .map(|i| {
            let (p, truth) = problem(s, i, recovery_law(s.n), false)?;
            let x0 = start_point(s, i)?;
            let (ln, vn) = (truth.lambda_n(), truth.eigenvector(0));
            let mut cfg = SolverConfig::with_step(1.0 / truth.lambda1(), 0.0).max_iter(s.max_iter).with_delta().eig_tol(RECOVERY_EIG_TOL);
            cfg.f_floor = f64::NEG_INFINITY;
            let (mut val, mut vec, mut align) = (Vec::new(), Vec::new(), 0.0);
            let res = run_gdeig_with(&p, &x0, &cfg, |_, est| {
                if let Some(e) = est {
                    let c = dot(&vn, &e.direction).abs().min(1.0);
                    val.push((e.lambda_n - ln).abs() / ln.abs());
                    vec.push((1.0 - c * c).max(0.0).sqrt());
                    align = c;
                }
            });
            let trace = match res {
                Ok(r) => r.run.trace,
                Err(Error::Diverged(report)) => report.trace,
                Err(e) => return Err(e.into()),
            };
            Ok(RecoveryRun { seed: s.seed_of(i), lambda_n: ln, trace, eigval_err: val, eigvec_err: vec, alignment: align })
        })
        .collect()
}

fn recovery_files(runs: &[RecoveryRun]) -> CliResult<Vec<(String, String)>> {
    let mut files = Vec::new();
    let mut summary = String::from("seed,iterations,final_eigval_err,final_eigvec_err,alignment\n");
    for r in runs {
        let mut buf = Vec::new();
        write_csv(&r.trace, &mut buf)?;
        files.push((format!("trace_gdeig_seed{}.csv", r.seed), String::from_utf8_lossy(&buf).into_owned()));
        let _ = writeln!(
            summary,
            "{},{},{},{},{}",
            r.seed,
            r.eigval_err.len(),
            real(r.final_eigval_err()),
            real(r.eigvec_err.last().copied().unwrap_or(f64::NAN)),
            real(r.alignment)
        );
    }
    let f = mean_curve(&runs.iter().map(|r| r.trace.iter().map(|t| t.f).collect()).collect::<Vec<_>>());
    let val = mean_curve(&runs.iter().map(|r| r.eigval_err.clone()).collect::<Vec<_>>());
    let vec = mean_curve(&runs.iter().map(|r| r.eigvec_err.clone()).collect::<Vec<_>>());
    let mut agg = String::from("k,mean_f,mean_eigval_err,mean_eigvec_err\n");
    for (k, fk) in f.iter().enumerate() {
        let at = |c: &[f64]| if k == 0 { String::new() } else { c.get(k - 1).or(c.last()).map(|v| real(*v)).unwrap_or_default() };
        let _ = writeln!(agg, "{k},{},{},{}", real(*fk), at(&val), at(&vec));
    }
    files.push(("summary.csv".into(), summary));
    files.push(("aggregate.csv".into(), agg));
    Ok(files)
}

// ------------------------------------------------------------------- scans

fn saddle_start(s: &Settings, i: usize, truth: &GroundTruth) -> CliResult<Vec<f64>> {
    let mut x = start_point(s, i)?;
    for (j, &l) in truth.eigenvalues.iter().enumerate() {
        if l < 0.0 {
            let v = truth.eigenvector(j);
            let c = (SADDLE_SHRINK - 1.0) * dot(&v, &x);
            x.iter_mut().zip(&v).for_each(|(xi, vi)| *xi += c * vi);
        }
    }
    Ok(x)
}

/// Weak negative curvature: negatives in `[−0.01, −0.001]`, positives in
/// `[0.1, 1]`, so fixed-step descent lingers near the saddle at the origin.
pub fn saddle_law(n: usize) -> EigLaw {
    EigLaw::Indefinite { neg_count: (n / 5).max(1), neg_range: (-0.01, -0.001), pos_range: (0.1, 1.0), leftmost: None }
}

/// Saddle escape on indefinite problems with `b = 0`; the metric is the first
/// iteration with `f < 0`.
pub fn kick_scan(s: &Settings) -> CliResult<Vec<MethodRun>> {
    let per_seed: Vec<Vec<MethodRun>> = (0..s.seeds)
        .into_par_iter()
        .map(|i| {
            let (p, truth) = problem(s, i, saddle_law(s.n), false)?;
            let x0 = saddle_start(s, i, &truth)?;
            let alpha = 1.0 / truth.lambda1();
            let cfg = SolverConfig::with_step(alpha, 0.0).max_iter(s.max_iter);
            let seed = s.seed_of(i);
            let mut runs = Vec::new();
            for &period in &s.periods {
                let res = run_kick(&p, &x0, &KickConfig::new(period - 1), &cfg);
                runs.push(MethodRun::from_result("", format!("kick{period}"), seed, res)?);
            }
            runs.push(MethodRun::from_result("", "gd".into(), seed, run_gdm(&p, &x0, &cfg, &StepSchedule::Fixed(alpha)))?);
            runs.push(MethodRun::from_result("", "exact".into(), seed, exact_step_gd(&p, &x0, &cfg))?);
            for r in &mut runs {
                r.metric = first_k(&r.trace, |f| f < 0.0);
            }
            Ok(runs)
        })
        .collect::<CliResult<_>>()?;
    Ok(per_seed.into_iter().flatten().collect())
}

/// Positive definite problem, `b = Ax*`, every run starting from the smart
/// initialization `x⁽⁰⁾ = x⁽⁻¹⁾ − g⁽⁻¹⁾/λ₁`: fixed `1/λ₁`, `2/λ₁` and
/// `2/(λ₁ + λₙ)`, each with `β ∈ {0, 0.5, 0.8}`. Iterations are counted
/// from `x⁽⁻¹⁾` (the initialization step is iteration 1) and all runs share
/// the gradient tolerance `1e-8·max(1, ‖g⁽⁻¹⁾‖)`. The metric is the
/// iteration at which that tolerance was met.
pub fn step_size(s: &Settings) -> CliResult<Vec<MethodRun>> {
    let per_seed: Vec<Vec<MethodRun>> = (0..s.seeds)
        .into_par_iter()
        .map(|i| {
            let (p, truth) = problem(s, i, pd_law(), true)?;
            let x_minus1 = start_point(s, i)?;
            let (l1, ln) = (truth.lambda1(), truth.lambda_n());
            let g_tol = SolverConfig::default().resolved_g_tol(norm(&eval_g(&p, &x_minus1)?));
            let x0 = smart_init(&p, &x_minus1)?;
            let seed = s.seed_of(i);
            let mut runs = Vec::new();
            for beta in [0.0, 0.5, 0.8] {
                let cfg = SolverConfig::with_step(1.0 / l1, beta).max_iter(s.max_iter).g_tol(g_tol);
                let b = real(beta);
                let shifted = |res: gdpm_core::Result<SolverRun>| {
                    res.map(|mut run| {
                        run.trace.iter_mut().for_each(|r| r.k += 1);
                        run
                    })
                };
                let r = shifted(run_gdm(&p, &x0, &cfg, &StepSchedule::Fixed(1.0 / l1)));
                runs.push(MethodRun::from_result("", format!("inv_l1_beta{b}"), seed, r)?);
                let r = two_over_lambda1_run(&p, &x_minus1, &cfg);
                runs.push(MethodRun::from_result("", format!("two_l1_beta{b}"), seed, r)?);
                let r = shifted(run_gdm(&p, &x0, &cfg, &StepSchedule::Fixed(2.0 / (l1 + ln))));
                runs.push(MethodRun::from_result("", format!("two_over_sum_beta{b}"), seed, r)?);
            }
            for r in &mut runs {
                if r.termination == Termination::GradientTolerance.label() {
                    r.metric = Some(r.iterations());
                }
            }
            Ok(runs)
        })
        .collect::<CliResult<_>>()?;
    Ok(per_seed.into_iter().flatten().collect())
}

/// Kick (`s + 1 ∈ {20, 100}`) against fixed-step GD and AGM on a positive
/// definite class (`pd`) and a semidefinite class with `n/20` zero
/// eigenvalues (`psd`, no AGM). The metric is the first iteration with
/// `f − f* ≤ f_tol·(f⁽⁰⁾ − f*)`.
pub fn kick_bench(s: &Settings) -> CliResult<Vec<MethodRun>> {
    let zeros = (s.n / 20).max(1);
    let classes = [("pd", pd_law()), ("psd", EigLaw::Psd { zero_count: zeros, pos_range: (0.01, 1.0) })];
    let jobs: Vec<(usize, usize)> = (0..classes.len()).flat_map(|c| (0..s.seeds).map(move |i| (c, i))).collect();
    let per_job: Vec<Vec<MethodRun>> = jobs
        .into_par_iter()
        .map(|(c, i)| {
            let (group, law) = &classes[c];
            let (p, truth) = problem(s, i, law.clone(), true)?;
            let x0 = start_point(s, i)?;
            let l1 = truth.lambda1();
            let f_star = truth.f_star().ok_or_else(|| CliError::input("benchmark problem lacks a known solution"))?;
            let cfg = SolverConfig::with_step(1.0 / l1, 0.0).max_iter(s.max_iter);
            let seed = s.seed_of(i);
            let mut runs = Vec::new();
            if *group == "pd" {
                let r = accelerated_gd(&p, &x0, l1, truth.lambda_n(), &cfg);
                runs.push(MethodRun::from_result(group, "agm".into(), seed, r)?);
            }
            for period in [20, 100] {
                runs.push(MethodRun::from_result(group, format!("kick{period}"), seed, run_kick(&p, &x0, &KickConfig::new(period - 1), &cfg))?);
            }
            runs.push(MethodRun::from_result(group, "gd".into(), seed, run_gdm(&p, &x0, &cfg, &StepSchedule::Fixed(1.0 / l1)))?);
            for r in &mut runs {
                let e0 = r.trace[0].f - f_star;
                r.metric = first_k(&r.trace, |f| f - f_star <= s.f_tol * e0);
            }
            Ok(runs)
        })
        .collect::<CliResult<_>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

fn method_files(runs: &[MethodRun], metric: &str) -> CliResult<Vec<(String, String)>> {
    let mut files = trace_files(runs)?;
    files.push(("summary.csv".into(), summary_csv(runs, metric)));
    let mut groups: Vec<&str> = Vec::new();
    for r in runs {
        if !groups.contains(&r.group.as_str()) {
            groups.push(&r.group);
        }
    }
    for g in groups {
        let name = if g.is_empty() { "aggregate.csv".to_string() } else { format!("aggregate_{g}.csv") };
        files.push((name, aggregate_csv(runs, g)));
    }
    Ok(files)
}

fn print_method_table(out: &mut dyn Write, runs: &[MethodRun], metric: &str) -> CliResult<()> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in runs {
        if !keys.contains(&(r.group.as_str(), r.method.as_str())) {
            keys.push((&r.group, &r.method));
        }
    }
    writeln!(out, "{:<6} {:<24} {:>8} {:>12}", "group", "method", "reached", format!("median {metric}"))?;
    for (g, m) in keys {
        let mut vals: Vec<usize> = runs.iter().filter(|r| r.group == g && r.method == m).filter_map(|r| r.metric).collect();
        let total = runs.iter().filter(|r| r.group == g && r.method == m).count();
        vals.sort_unstable();
        let median = vals.get(vals.len() / 2).map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        writeln!(out, "{:<6} {:<24} {:>8} {:>12}", g, m, format!("{}/{}", vals.len(), total), median)?;
    }
    Ok(())
}

/// Runs an experiment and returns the files it produces (name, contents).
pub fn experiment_files(name: ExperimentName, s: &Settings, out: &mut dyn Write) -> CliResult<Vec<(String, String)>> {
    match name {
        ExperimentName::EigRecovery => {
            let runs = eig_recovery(s)?;
            let worst = runs.iter().map(RecoveryRun::final_eigval_err).fold(0.0, f64::max);
            let align = runs.iter().map(|r| r.alignment).fold(1.0, f64::min);
            writeln!(out, "eig-recovery: {} seeds, worst final eigenvalue error {worst:e}, worst alignment {align}", runs.len())?;
            recovery_files(&runs)
        }
        ExperimentName::KickScan => {
            let runs = kick_scan(s)?;
            print_method_table(out, &runs, "escape_k")?;
            method_files(&runs, "escape_k")
        }
        ExperimentName::StepSize => {
            let runs = step_size(s)?;
            print_method_table(out, &runs, "iters_to_gtol")?;
            method_files(&runs, "iters_to_gtol")
        }
        ExperimentName::KickBench => {
            let runs = kick_bench(s)?;
            print_method_table(out, &runs, "iters_to_ftol")?;
            method_files(&runs, "iters_to_ftol")
        }
    }
}

pub fn cmd_experiment(a: &ExperimentArgs, out: &mut dyn Write) -> CliResult<()> {
    let s = Settings::from_args(a)?;
    let files = experiment_files(a.name, &s, out)?;
    if let Some(dir) = &a.out {
        write_files(dir, &files)?;
        writeln!(out, "wrote {} files to {}", files.len(), dir.display())?;
    }
    Ok(())
}
