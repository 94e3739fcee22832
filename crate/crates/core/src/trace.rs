//! Per-iteration records and their CSV form.
//!
//! Columns, in order: `k,f,gnorm_sq,nu1,lambda_n,delta,delta_rel,alpha_used,
//! phase,matvecs_cum,f_kick,f_fixed`. Reals use the shortest decimal that
//! round-trips; absent optional fields are empty.

use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 12] = [
    "k",
    "f",
    "gnorm_sq",
    "nu1",
    "lambda_n",
    "delta",
    "delta_rel",
    "alpha_used",
    "phase",
    "matvecs_cum",
    "f_kick",
    "f_fixed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// The starting point, before any step.
    Start,
    Inner,
    KickAccepted,
    KickRejected,
    SmartInit,
    /// Exact-step descent along a direction with `gᵀAg ≤ 0`.
    NegCurvatureRay,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Start => "start",
            Phase::Inner => "inner",
            Phase::KickAccepted => "kick-accepted",
            Phase::KickRejected => "kick-rejected",
            Phase::SmartInit => "smart-init",
            Phase::NegCurvatureRay => "neg-curvature-ray",
        }
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "start" => Phase::Start,
            "inner" => Phase::Inner,
            "kick-accepted" => Phase::KickAccepted,
            "kick-rejected" => Phase::KickRejected,
            "smart-init" => Phase::SmartInit,
            "neg-curvature-ray" => Phase::NegCurvatureRay,
            other => return Err(Error::invalid(format!("unknown phase '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub f: f64,
    pub gnorm_sq: f64,
    pub nu1: Option<f64>,
    pub lambda_n: Option<f64>,
    pub delta: Option<f64>,
    pub delta_rel: Option<f64>,
    pub alpha_used: f64,
    pub phase: Phase,
    pub matvecs_cum: u64,
    /// Objective at the kick candidate, on kick iterations.
    pub f_kick: Option<f64>,
    /// Objective at the fixed-step candidate, on kick iterations.
    pub f_fixed: Option<f64>,
}

impl IterationRecord {
    pub fn new(k: usize, f: f64, gnorm_sq: f64, alpha_used: f64, phase: Phase, matvecs_cum: u64) -> Self {
        Self {
            k,
            f,
            gnorm_sq,
            nu1: None,
            lambda_n: None,
            delta: None,
            delta_rel: None,
            alpha_used,
            phase,
            matvecs_cum,
            f_kick: None,
            f_fixed: None,
        }
    }
}

fn fmt_real(x: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(x).to_string()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

pub fn write_csv<W: Write>(trace: &[IterationRecord], sink: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in trace {
        w.write_record([
            r.k.to_string(),
            fmt_real(r.f),
            fmt_real(r.gnorm_sq),
            fmt_opt(r.nu1),
            fmt_opt(r.lambda_n),
            fmt_opt(r.delta),
            fmt_opt(r.delta_rel),
            fmt_real(r.alpha_used),
            r.phase.as_str().to_string(),
            r.matvecs_cum.to_string(),
            fmt_opt(r.f_kick),
            fmt_opt(r.f_fixed),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(source: R) -> Result<Vec<IterationRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse { line: 1, message: "unexpected trace header".into() });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let real = |j: usize| -> Result<f64> {
            field(j).parse().map_err(|_| Error::Parse { line, message: format!("bad number in column {}", CSV_HEADER[j]) })
        };
        let opt = |j: usize| -> Result<Option<f64>> { if field(j).is_empty() { Ok(None) } else { real(j).map(Some) } };
        let int = |j: usize| -> Result<u64> {
            field(j).parse().map_err(|_| Error::Parse { line, message: format!("bad integer in column {}", CSV_HEADER[j]) })
        };
        out.push(IterationRecord {
            k: int(0)? as usize,
            f: real(1)?,
            gnorm_sq: real(2)?,
            nu1: opt(3)?,
            lambda_n: opt(4)?,
            delta: opt(5)?,
            delta_rel: opt(6)?,
            alpha_used: real(7)?,
            phase: field(8).parse()?,
            matvecs_cum: int(9)?,
            f_kick: opt(10)?,
            f_fixed: opt(11)?,
        });
    }
    Ok(out)
}

/// Checks the ordering invariants of a trace: `k` strictly increasing,
/// `matvecs_cum` nondecreasing, `gnorm_sq ≥ 0`, `delta ≥ 0`.
pub fn check_invariants(trace: &[IterationRecord]) -> std::result::Result<(), String> {
    for w in trace.windows(2) {
        if w[1].k <= w[0].k {
            return Err(format!("k not increasing at {}", w[1].k));
        }
        if w[1].matvecs_cum < w[0].matvecs_cum {
            return Err(format!("matvec count decreased at k={}", w[1].k));
        }
    }
    for r in trace {
        if !(r.gnorm_sq >= 0.0) {
            return Err(format!("negative or NaN gnorm_sq at k={}", r.k));
        }
        if r.delta.is_some_and(|d| !(d >= 0.0)) {
            return Err(format!("negative delta at k={}", r.k));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn writes_shortest_reals_and_blank_options() {
        let mut r = IterationRecord::new(1, 0.9975, 4.01, 0.25, Phase::Inner, 2);
        r.nu1 = Some(0.5025);
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "1,0.9975,4.01,0.5025,,,,0.25,inner,2,,");
    }

    #[test]
    fn rejects_bad_rows() {
        let text = format!("{}\n1,abc,0,,,,,0,inner,0,,\n", CSV_HEADER.join(","));
        assert!(matches!(read_csv(text.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let text = format!("{}\n1,1,0,,,,,0,sideways,0,,\n", CSV_HEADER.join(","));
        assert!(read_csv(text.as_bytes()).is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -1e3..1e3f64]
    }

    fn record() -> impl Strategy<Value = IterationRecord> {
        let phase = prop_oneof![
            Just(Phase::Start),
            Just(Phase::Inner),
            Just(Phase::KickAccepted),
            Just(Phase::KickRejected),
            Just(Phase::SmartInit),
            Just(Phase::NegCurvatureRay),
        ];
        (
            (0usize..100_000, finite(), 0.0..1e300f64, proptest::option::of(finite()), proptest::option::of(finite())),
            (proptest::option::of(0.0..1e10f64), proptest::option::of(0.0..1e3f64), finite(), phase, any::<u32>()),
            (proptest::option::of(finite()), proptest::option::of(finite())),
        )
            .prop_map(|((k, f, gn, nu, lam), (d, dr, a, phase, mv), (fk, ff))| IterationRecord {
                k,
                f,
                gnorm_sq: gn,
                nu1: nu,
                lambda_n: lam,
                delta: d,
                delta_rel: dr,
                alpha_used: a,
                phase,
                matvecs_cum: mv as u64,
                f_kick: fk,
                f_fixed: ff,
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip(trace in proptest::collection::vec(record(), 0..20)) {
            let mut buf = Vec::new();
            write_csv(&trace, &mut buf).unwrap();
            let back = read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back, trace);
        }
    }
}
