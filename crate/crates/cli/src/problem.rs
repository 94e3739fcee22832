//! Problem specifications, loading, and the `gen` subcommand.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use gdpm_core::linops::{dense_eig_oracle, DENSE_LIMIT};
use gdpm_core::mmio::{read_matrix_market, read_vector, write_matrix_market, write_vector};
use gdpm_core::probgen::{gap_ratio_spectrum, gen_initial_point, gen_problem, Basis, EigLaw, GroundTruth, PointLaw, Rhs, SpectrumSpec};
use gdpm_core::{QuadraticProblem, SymmetricOperator};

use crate::args::{GenArgs, SolveArgs};
use crate::{CliError, CliResult};

/// Seed offset for the solution vector behind `b = Ax*`.
const RHS_SEED_OFFSET: u64 = 1_000_003;

/// Parses a `--gen` string into a spectrum specification.
pub fn parse_gen_spec(text: &str, seed: u64) -> CliResult<SpectrumSpec> {
    let (kind, rest) = text.split_once(':').ok_or_else(|| CliError::input(format!("bad problem spec '{text}': expected KIND:PARAMS")))?;
    if kind == "explicit" {
        let values = parse_list(rest)?;
        return Ok(SpectrumSpec::new(values.len(), EigLaw::Explicit(values), seed).basis(Basis::Identity));
    }
    let mut n = None;
    let mut kv = Vec::new();
    for item in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| CliError::input(format!("bad parameter '{item}': expected KEY=VALUE")))?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::input(format!("bad number in '{item}'")))?;
        if k == "n" {
            n = Some(as_count(v, "n")?);
        } else {
            kv.push((k.trim().to_string(), v));
        }
    }
    let n = n.ok_or_else(|| CliError::input(format!("problem spec '{text}' needs n=")))?;
    let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
    let known: &[&str] = match kind {
        "pd" => &["lo", "hi"],
        "indefinite" => &["neg", "leftmost"],
        "psd" => &["zeros", "lo"],
        "gap" => &["r"],
        other => return Err(CliError::input(format!("unknown problem kind '{other}'"))),
    };
    if let Some((k, _)) = kv.iter().find(|(k, _)| !known.contains(&k.as_str())) {
        return Err(CliError::input(format!("unknown parameter '{k}' for '{kind}'")));
    }
    let law = match kind {
        "pd" => EigLaw::UniformPd { lo: get("lo").unwrap_or(0.01), hi: get("hi").unwrap_or(1.0) },
        "indefinite" => {
            let mut law = EigLaw::indefinite_default(n);
            if let EigLaw::Indefinite { neg_count, leftmost, .. } = &mut law {
                if let Some(k) = get("neg") {
                    *neg_count = as_count(k, "neg")?;
                }
                *leftmost = get("leftmost");
            }
            law
        }
        "psd" => EigLaw::Psd {
            zero_count: as_count(get("zeros").ok_or_else(|| CliError::input("psd spec needs zeros="))?, "zeros")?,
            pos_range: (get("lo").unwrap_or(0.01), 1.0),
        },
        _ => EigLaw::Explicit(gap_ratio_spectrum(n, get("r").ok_or_else(|| CliError::input("gap spec needs r="))?)?),
    };
    Ok(SpectrumSpec::new(n, law, seed))
}

fn as_count(v: f64, key: &str) -> CliResult<usize> {
    if v >= 0.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(CliError::input(format!("{key} must be a non-negative integer, got {v}")))
    }
}

fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::input(format!("bad number '{s}' in list '{text}'"))))
        .collect()
}

/// A problem plus whatever spectral information came with it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub problem: QuadraticProblem,
    pub truth: Option<GroundTruth>,
}

impl Loaded {
    /// `(λ₁, λₙ)` from the generator, or from the dense oracle for loaded matrices.
    pub fn extremes(&self) -> CliResult<(f64, f64)> {
        if let Some(t) = &self.truth {
            return Ok((t.lambda1(), t.lambda_n()));
        }
        if self.problem.dim() > DENSE_LIMIT {
            return Err(CliError::input(format!("n = {} is too large for the dense eigen oracle; pass --alpha", self.problem.dim())));
        }
        let e = dense_eig_oracle(self.problem.op())?;
        Ok((e.rightmost().0, e.leftmost().0))
    }
}

pub fn load_problem(args: &SolveArgs) -> CliResult<Loaded> {
    let (op, truth, solution_rhs) = match (&args.matrix, &args.gen) {
        (Some(path), _) => (SymmetricOperator::from_dense(read_matrix_market(path)?)?, None, None),
        (None, Some(spec)) => {
            let spec = parse_gen_spec(spec, args.seed)?;
            let rhs = if args.b == "from-solution" { Rhs::FromSolution(args.seed.wrapping_add(RHS_SEED_OFFSET)) } else { Rhs::Zero };
            let (p, t) = gen_problem(&spec, rhs)?;
            let b = p.b().to_vec();
            (p.op().clone(), Some(t), Some(b))
        }
        (None, None) => return Err(CliError::input("one of --matrix or --gen is required")),
    };
    let n = op.dim();
    let b = match args.b.as_str() {
        "zero" => vec![0.0; n],
        "from-solution" => match solution_rhs {
            Some(b) => b,
            None => op.matvec(&gen_initial_point(n, args.seed.wrapping_add(RHS_SEED_OFFSET), PointLaw::StandardGaussian)?)?,
        },
        path => read_vector(Path::new(path))?,
    };
    let mut problem = QuadraticProblem::new(op, b)?;
    let l1 = match &truth {
        Some(t) => Some(t.lambda1()),
        None if n <= DENSE_LIMIT => Some(dense_eig_oracle(problem.op())?.rightmost().0),
        None => None,
    };
    if let Some(l1) = l1.filter(|l| *l > 0.0) {
        problem = problem.with_lambda1(l1)?;
    }
    Ok(Loaded { problem, truth })
}

/// `--x0`: an existing file, a comma-separated list, or an integer seed.
pub fn parse_x0(text: &str, n: usize) -> CliResult<Vec<f64>> {
    let path = Path::new(text);
    let x = if path.is_file() {
        read_vector(path)?
    } else if text.contains(',') {
        parse_list(text)?
    } else if let Ok(seed) = text.trim().parse::<u64>() {
        gen_initial_point(n, seed, PointLaw::StandardGaussian)?
    } else {
        return Err(CliError::input(format!("--x0 '{text}' is neither a file, a list, nor a seed")));
    };
    if x.len() != n {
        return Err(CliError::input(format!("--x0 has {} entries, problem has n = {n}", x.len())));
    }
    Ok(x)
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = parse_gen_spec(&args.spec, args.seed)?;
    let rhs = match args.b.as_str() {
        "zero" => Rhs::Zero,
        "from-solution" => Rhs::FromSolution(args.seed.wrapping_add(RHS_SEED_OFFSET)),
        other => return Err(CliError::input(format!("--b must be zero or from-solution, got '{other}'"))),
    };
    let (p, truth) = gen_problem(&spec, rhs)?;
    let with_ext = |ext: &str| {
        let mut s = args.out.clone().into_os_string();
        s.push(ext);
        std::path::PathBuf::from(s)
    };
    let paths = [with_ext(".mtx"), with_ext(".b.txt"), with_ext(".eig.txt")];
    write_matrix_market(&p.op().to_dense(), BufWriter::new(File::create(&paths[0])?))?;
    write_vector(p.b(), BufWriter::new(File::create(&paths[1])?))?;
    write_vector(&truth.eigenvalues, BufWriter::new(File::create(&paths[2])?))?;
    for path in &paths {
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}
