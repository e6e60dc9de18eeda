use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use num_integer::Integer;
use rayon::prelude::*;

use mollifier_core::series::{random_alpha_grid, rational_grid};
use mollifier_core::special::l_at_one_detailed;
use mollifier_core::{
    boundedness_monitor, build_tables, character_group, convergence_scan, criterion_report,
    jump_probe, l_at_zero, Alpha, CriterionConfig, Error, Group, SeriesKind, Tables,
};

use crate::parse::AlphaSpec;

/// How a command ended, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// A checked identity or tripwire failed (exit 1).
    Assertion(String),
    /// Bad arguments (exit 2).
    Usage(String),
    /// A size limit was exceeded (exit 3).
    Capacity(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Capacity(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Assertion(m) | Failure::Usage(m) | Failure::Capacity(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity(_) => Failure::Capacity(e.to_string()),
            Error::Consistency(_) => Failure::Assertion(e.to_string()),
            Error::Domain(_) | Error::NotReduced { .. } => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(format!("csv error: {e}"))
    }
}

pub type Outcome = Result<(), Failure>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Tsv,
}

/// Destination and delimiter shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl Output {
    fn writer(&self) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
        let sink: Box<dyn Write> = match &self.path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        let delimiter = match self.format {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        };
        Ok(csv::WriterBuilder::new().delimiter(delimiter).from_writer(sink))
    }
}

/// 17 significant digits; negative zero prints as zero.
fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn tables_for(limit: usize, requested: Option<usize>) -> Result<Tables, Failure> {
    let limit = requested.unwrap_or(limit);
    Ok(build_tables(limit.max(1))?)
}

pub struct ScanArgs {
    pub kind: SeriesKind,
    pub alphas: Vec<AlphaSpec>,
    pub schedule: Vec<usize>,
    pub sieve_limit: Option<usize>,
}

pub fn scan(args: ScanArgs, out: &Output) -> Outcome {
    let n_max = *args.schedule.last().expect("schedule is nonempty");
    let tables = tables_for(n_max, args.sieve_limit)?;
    eprintln!(
        "scan {}: {} point(s), N up to {n_max}",
        args.kind,
        args.alphas.len()
    );
    let scans = args
        .alphas
        .par_iter()
        .map(|a| convergence_scan(args.kind, a.alpha, &args.schedule, &tables))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = out.writer()?;
    w.write_record(["kind", "alpha", "N", "value", "target", "error"])?;
    for (spec, s) in args.alphas.iter().zip(&scans) {
        for (i, (&n, &v)) in s.schedule.iter().zip(&s.values).enumerate() {
            let err = s.errors.as_ref().map(|e| e[i]);
            w.write_record([
                s.kind.name().to_string(),
                spec.label.clone(),
                n.to_string(),
                num(v),
                opt_num(s.target),
                opt_num(err),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub struct IdentityArgs {
    pub q_max: u64,
    pub tolerance: Option<f64>,
    pub inject_failure: bool,
}

struct IdentityRow {
    identity: &'static str,
    q: u64,
    index: Option<u64>,
    residual: f64,
    tolerance: f64,
}

fn identity_rows(q: u64, tol: Option<f64>) -> Result<Vec<IdentityRow>, Error> {
    let g: Group = character_group(q)?;
    let pick = |default: f64| tol.unwrap_or(default);
    let mut rows = vec![IdentityRow {
        identity: "orthogonality",
        q,
        index: None,
        residual: g.orthogonality_residual(),
        tolerance: pick(1e-10),
    }];
    for (i, chi) in g.characters().iter().enumerate() {
        if !chi.is_primitive() {
            continue;
        }
        rows.push(IdentityRow {
            identity: "gauss_norm",
            q,
            index: Some(i as u64),
            residual: (chi.gauss_sum().norm_sqr() - q as f64).abs(),
            tolerance: pick(1e-9),
        });
        if chi.is_principal() {
            continue;
        }
        if chi.is_odd() {
            let l1 = l_at_one_detailed(chi, 1e-8)?.value;
            let rhs = chi.conj().gauss_sum() / num_complex::Complex::new(0.0, PI) * l1;
            rows.push(IdentityRow {
                identity: "lemma1",
                q,
                index: Some(i as u64),
                residual: (l_at_zero(&chi.conj()) - rhs).norm(),
                tolerance: pick(1e-6),
            });
        } else {
            rows.push(IdentityRow {
                identity: "l0_even",
                q,
                index: Some(i as u64),
                residual: l_at_zero(chi).norm(),
                tolerance: pick(1e-10),
            });
        }
    }
    for a in 0..q {
        if a.gcd(&q) != 1 {
            continue;
        }
        let got = g.lemma2_sum(a);
        let want = (2.0 * PI * a as f64 / q as f64).sin();
        rows.push(IdentityRow {
            identity: "lemma2",
            q,
            index: Some(a),
            residual: (got.re - want).abs().max(got.im.abs()),
            tolerance: pick(1e-10),
        });
    }
    Ok(rows)
}

pub fn identities(args: IdentityArgs, out: &Output) -> Outcome {
    if args.q_max == 0 {
        return Err(Failure::Usage("q-max must be at least 1".into()));
    }
    if let Some(t) = args.tolerance {
        if !(t > 0.0) {
            return Err(Failure::Usage("tolerance must be positive".into()));
        }
    }
    eprintln!("identities for q <= {}", args.q_max);
    let per_q = (1..=args.q_max)
        .into_par_iter()
        .map(|q| identity_rows(q, args.tolerance))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows: Vec<IdentityRow> = per_q.into_iter().flatten().collect();
    if args.inject_failure {
        if let Some(r) = rows.iter_mut().find(|r| r.identity == "lemma2") {
            r.residual += 1e-3;
        }
    }
    let mut w = out.writer()?;
    w.write_record(["identity", "q", "chi_index", "residual"])?;
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for r in &rows {
        if !(r.residual <= r.tolerance) {
            failures += 1;
        }
        worst = worst.max(r.residual);
        w.write_record([
            r.identity.to_string(),
            r.q.to_string(),
            r.index.map(|i| i.to_string()).unwrap_or_default(),
            num(r.residual),
        ])?;
    }
    w.flush()?;
    eprintln!("{} rows, max residual {worst:.3e}", rows.len());
    if failures > 0 {
        return Err(Failure::Assertion(format!(
            "{failures} identity residual(s) above tolerance"
        )));
    }
    Ok(())
}

pub struct CriterionArgs {
    pub n_values: Vec<usize>,
    pub u_max: f64,
    pub with_lhs: bool,
    pub t_max: f64,
    pub lhs_precision: f64,
    pub pairs_max_n: usize,
}

pub fn criterion(args: CriterionArgs, out: &Output) -> Outcome {
    if args.n_values.iter().any(|&n| n < 2) {
        return Err(Failure::Usage("every N must be at least 2".into()));
    }
    let n_max = *args.n_values.iter().max().expect("nonempty");
    let tables = tables_for(n_max, None)?;
    eprintln!(
        "criterion: N in {:?}, u_max {}{}",
        args.n_values,
        args.u_max,
        if args.with_lhs { ", with critical-line side" } else { "" }
    );
    let config = CriterionConfig {
        u_max: args.u_max,
        pairs_check_max_n: args.pairs_max_n,
        with_lhs: args.with_lhs,
        t_max: args.t_max,
        lhs_precision: args.lhs_precision,
        ..Default::default()
    };
    let report = criterion_report(&args.n_values, &tables, config)?;
    let mut w = out.writer()?;
    w.write_record([
        "N",
        "rhs_value",
        "rhs_uncertainty",
        "lhs_value",
        "lhs_uncertainty",
        "gap_to_one",
        "weighted_mertens",
    ])?;
    let mut bad_pairs = Vec::new();
    for row in &report.rows {
        if let Some(r) = row.pairs_residual {
            if !(r <= 1e-9) {
                bad_pairs.push((row.n, r));
            }
        }
        w.write_record([
            row.n.to_string(),
            num(row.rhs_value),
            num(row.rhs_uncertainty),
            opt_num(row.lhs.map(|l| l.total())),
            opt_num(row.lhs.map(|l| l.uncertainty())),
            num(row.gap_to_one),
            num(row.weighted_mertens),
        ])?;
    }
    w.flush()?;
    if !bad_pairs.is_empty() {
        return Err(Failure::Assertion(format!(
            "pair expansion disagrees with the piecewise integral: {bad_pairs:?}"
        )));
    }
    Ok(())
}

pub struct JumpArgs {
    pub points: Vec<AlphaSpec>,
    pub eps: Vec<f64>,
    pub n_max: usize,
}

pub fn jump(args: JumpArgs, out: &Output) -> Outcome {
    let points = args
        .points
        .iter()
        .map(|p| match p.alpha {
            Alpha::Rational(r) => Ok(r),
            Alpha::Real(_) => Err(Failure::Usage(format!(
                "jump needs a rational point a/q, got {:?}",
                p.label
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let tables = tables_for(args.n_max, None)?;
    eprintln!("jump probe at {} point(s), N = {}", points.len(), args.n_max);
    let reports = points
        .iter()
        .map(|&p| jump_probe(p, &args.eps, args.n_max, &tables))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = out.writer()?;
    w.write_record([
        "a",
        "q",
        "eps",
        "T_left",
        "T_right",
        "avg",
        "T_at",
        "conjectured_half_jump",
    ])?;
    for r in &reports {
        for row in &r.rows {
            w.write_record([
                r.point.a().to_string(),
                r.point.q().to_string(),
                num(row.eps),
                num(row.t_minus),
                num(row.t_plus),
                num((row.t_minus + row.t_plus) / 2.0),
                num(r.t_center),
                num(r.conjectured_offset),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub struct MonitorArgs {
    pub kind: SeriesKind,
    pub alphas: Vec<AlphaSpec>,
    pub random: usize,
    pub seed: u64,
    pub rational_q_max: u64,
    pub n_max: usize,
    pub ceiling: Option<f64>,
}

pub fn monitor(args: MonitorArgs, out: &Output) -> Outcome {
    let mut grid: Vec<(String, Alpha<f64>)> = args
        .alphas
        .iter()
        .map(|a| (a.label.clone(), a.alpha))
        .collect();
    for a in random_alpha_grid::<f64>(args.random, args.seed) {
        grid.push((num(a.value()), a));
    }
    for a in rational_grid::<f64>(args.rational_q_max) {
        grid.push((a.to_string(), a));
    }
    if grid.is_empty() {
        return Err(Failure::Usage(
            "no points: give --alpha, --random or --rational-grid".into(),
        ));
    }
    let tables = tables_for(args.n_max, None)?;
    eprintln!("monitor {}: {} point(s), N <= {}", args.kind, grid.len(), args.n_max);
    let alphas: Vec<Alpha<f64>> = grid.iter().map(|g| g.1).collect();
    let report = boundedness_monitor(args.kind, &alphas, &[args.n_max], &tables)?;
    let mut w = out.writer()?;
    w.write_record(["kind", "alpha", "N_max", "sup", "argmax_N"])?;
    for ((label, _), p) in grid.iter().zip(&report.points) {
        w.write_record([
            args.kind.name().to_string(),
            label.clone(),
            args.n_max.to_string(),
            num(p.sup),
            p.argmax_n.to_string(),
        ])?;
    }
    w.flush()?;
    eprintln!(
        "sup {:.6} at alpha {} N {}",
        report.sup, report.argmax_alpha, report.argmax_n
    );
    if let Some(c) = args.ceiling {
        if !(report.sup <= c) {
            return Err(Failure::Assertion(format!(
                "sup {} exceeds the ceiling {c}",
                report.sup
            )));
        }
    }
    Ok(())
}
