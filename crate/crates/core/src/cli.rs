//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 usage, 2 solver failure, 3 self-check mismatch,
//! 4 wrong regime.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::divergences::{
    dmax, dmin, dproj, dproj_set, rel_entropy, rel_entropy_set, DivergenceValue, SmoothingRadius,
};
use crate::error::{Error, Result};
use crate::freesets::{FreeCone, FreeConeFamily};
use crate::io::parse_state_json;
use crate::models::{isotropic, isotropic_dproj_bits, isotropic_dsep_inf_bits, max_entangled, IsotropicParams};
use crate::multicopy::{aep_sandwich, fmt_num, regularize, Measure};
use crate::qlinalg::{DensityMatrix, HermitianOperator};
use crate::rates::{
    achievable_standard, converse_det, converse_prob, dichotomy_rate, distillation_tradeoff, exact_affine,
    isotropic_rates, ErrorSequence,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_SELF_CHECK: i32 = 3;
pub const EXIT_WRONG_REGIME: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "projent", version, about = "Resource divergences and transformation-rate bounds over conic free sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one divergence.
    Measure(MeasureArgs),
    /// Closed-form isotropic distillation curves, cross-checked against the solver.
    Fig2(Fig2Args),
    /// Evaluate a transformation-rate bound.
    Rate(RateArgs),
    /// Per-copy values of a measure for n = 1..nmax, one block per eps.
    Regularize(RegularizeArgs),
    /// Smoothed D_max / projective divergence table over (n, eps).
    Aep(AepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output format.
    #[arg(long)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// dproj, dmax, dmin, rs, dproj_s or d (relative entropy).
    #[arg(long)]
    pub quantity: String,
    /// Free cone: ppt:dA,dB | diagonal:d | singleton:<state> | JSON | file.
    #[arg(long)]
    pub cone: Option<String>,
    /// State: isotropic:d=..,p=.. | maxent:d=.. | mixed:d=.. | diag:a,b,.. | JSON | file.
    #[arg(long)]
    pub state: String,
    /// Second state for pairwise divergences (replaces --cone).
    #[arg(long)]
    pub sigma: Option<String>,
    /// Smoothing radius.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    /// Local dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Grid start:stop:step.
    #[arg(long, default_value = "0.5:0.99:0.01")]
    pub p_grid: String,
    /// Maximum allowed |solver − closed form| at the check points.
    #[arg(long, default_value_t = 1e-4)]
    pub check_tol: f64,
    /// Also write an SVG plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RateKindArg {
    ConverseProb,
    ConverseDet,
    ExactAffine,
    Achievable,
    Tradeoff,
    Dichotomy,
    Isotropic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    CommutingQubits,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long, value_enum, default_value = "converse-prob")]
    pub kind: RateKindArg,
    /// Named input set; `commuting-qubits` is the dichotomy
    /// (diag(0.9,0.1), I/2) → (diag(0.8,0.2), I/2).
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Source state ρ (ρ₁ for dichotomies).
    #[arg(long, required_unless_present = "preset")]
    pub state: Option<String>,
    /// Target state ω (ω₁ for dichotomies).
    #[arg(long)]
    pub target: Option<String>,
    /// Second source state ρ₂ for dichotomies.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Second target state ω₂ for dichotomies.
    #[arg(long)]
    pub target_sigma: Option<String>,
    /// Free cone of the source system.
    #[arg(long)]
    pub cone: Option<String>,
    /// Free cone of the target system (defaults to --cone).
    #[arg(long)]
    pub target_cone: Option<String>,
    /// constant:<eps> | exponential:<c> | superexponential.
    #[arg(long)]
    pub errors: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub nmax: usize,
    /// Comma-separated smoothing radii.
    #[arg(long, default_value = "0")]
    pub eps: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RegularizeArgs {
    #[arg(long)]
    pub quantity: String,
    #[arg(long)]
    pub cone: String,
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value_t = 2)]
    pub nmax: usize,
    /// Comma-separated smoothing radii.
    #[arg(long, default_value = "0")]
    pub eps: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AepArgs {
    #[arg(long)]
    pub cone: String,
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value_t = 3)]
    pub nmax: usize,
    #[arg(long, default_value = "0,0.01,0.05,0.1")]
    pub eps: String,
    #[command(flatten)]
    pub output: Output,
}

/// Maps library errors onto exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SolverFailure(_) | Error::BracketError(_) | Error::DegenerateWitness(_) => EXIT_SOLVER,
        Error::WrongRegime(_) | Error::DenominatorUnresolved { .. } => EXIT_WRONG_REGIME,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `stdout` unless `--out` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Measure(a) => cmd_measure(a, stdout),
        Command::Fig2(a) => cmd_fig2(a, stdout, stderr),
        Command::Rate(a) => cmd_rate(a, stdout),
        Command::Regularize(a) => cmd_regularize(a, stdout),
        Command::Aep(a) => cmd_aep(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(output: &Output, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn parse_eps_list(s: &str) -> Result<Vec<SmoothingRadius>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let v: f64 = t
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad smoothing radius '{t}'")))?;
            SmoothingRadius::new(v)
        })
        .collect()
}

fn key_values(body: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .filter(|t| !t.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got '{kv}'")))
        })
        .collect()
}

fn get<T: std::str::FromStr>(kv: &[(String, String)], key: &str) -> Result<T> {
    let raw = kv
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::InvalidArgument(format!("missing '{key}='")))?;
    raw.parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value for '{key}': {raw}")))
}

fn parse_list(body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad number '{t}'")))
        })
        .collect()
}

/// Parses a state specification.
pub fn parse_state(spec: &str) -> Result<DensityMatrix> {
    let spec = spec.trim();
    if spec.starts_with('[') || spec.starts_with('{') {
        return parse_state_json(spec);
    }
    let (head, body) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "isotropic" => {
            let kv = key_values(body)?;
            isotropic(IsotropicParams::new(get(&kv, "d")?, get(&kv, "p")?)?)
        }
        "maxent" => max_entangled(get(&key_values(body)?, "d")?),
        "mixed" => {
            let d: usize = get(&key_values(body)?, "d")?;
            if d == 0 {
                return Err(Error::InvalidArgument("dimension must be positive".into()));
            }
            Ok(DensityMatrix::maximally_mixed(d))
        }
        "diag" => DensityMatrix::new(HermitianOperator::diagonal(&parse_list(body)?)),
        _ if Path::new(spec).is_file() => parse_state_json(&std::fs::read_to_string(spec)?),
        _ => Err(Error::InvalidArgument(format!("unrecognized state '{spec}'"))),
    }
}

/// Parses a cone specification.
pub fn parse_cone(spec: &str) -> Result<FreeCone> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        return FreeCone::from_json(spec);
    }
    let (head, body) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "ppt" => {
            let dims = body
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidArgument(format!("bad dimension '{t}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            if dims.len() < 2 {
                return Err(Error::InvalidArgument("ppt needs at least two local dimensions".into()));
            }
            let last = dims.len() - 1;
            FreeCone::ppt_multi(dims, vec![last])
        }
        "diagonal" => FreeCone::diagonal(
            body.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad dimension '{body}'")))?,
        ),
        "singleton" => FreeCone::singleton(parse_state(body)?),
        _ if Path::new(spec).is_file() => FreeCone::from_json(&std::fs::read_to_string(spec)?),
        _ => Err(Error::InvalidArgument(format!("unrecognized cone '{spec}'"))),
    }
}

fn parse_errors(spec: &str) -> Result<ErrorSequence> {
    let (head, body) = spec.split_once(':').unwrap_or((spec, ""));
    let num = || -> Result<f64> {
        body.trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad error parameter '{body}'")))
    };
    match head {
        "constant" => ErrorSequence::constant(num()?),
        "exponential" => ErrorSequence::exponential(num()?),
        "superexponential" => Ok(ErrorSequence::Superexponential),
        _ => Err(Error::InvalidArgument(format!("unrecognized error sequence '{spec}'"))),
    }
}

/// Attaches subsystem dimensions from the cone when the state has none.
fn align(rho: DensityMatrix, cone: &FreeCone) -> Result<DensityMatrix> {
    match cone.subsystem_dims() {
        Some(dims) if rho.op().subsystem_dims().is_empty() && rho.dim() == cone.dim() => rho.with_dims(dims.to_vec()),
        _ => Ok(rho),
    }
}

#[derive(Serialize)]
struct MeasureRecord<'a> {
    quantity: &'a str,
    state: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cone: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<&'a str>,
    eps: String,
    value: DivergenceValue,
}

pub fn cmd_measure(a: &MeasureArgs, stdout: &mut dyn Write) -> Result<i32> {
    let eps = SmoothingRadius::new(a.eps)?;
    let rho = parse_state(&a.state)?;
    let value = match (&a.sigma, &a.cone) {
        (Some(sigma), _) => {
            let sigma = parse_state(sigma)?;
            if eps.value() > 0.0 {
                return Err(Error::InvalidArgument("pairwise divergences are not smoothed".into()));
            }
            match a.quantity.as_str() {
                "d" | "rel_entropy" => rel_entropy(&rho, &sigma)?,
                "dmax" => dmax(&rho, &sigma)?,
                "dmin" => dmin(&rho, &sigma)?,
                "dproj" => dproj(&rho, &sigma)?,
                q => return Err(Error::InvalidArgument(format!("unknown pairwise quantity '{q}'"))),
            }
        }
        (None, Some(cone)) => {
            let cone = parse_cone(cone)?;
            let rho = align(rho, &cone)?;
            let measure: Measure = a.quantity.parse()?;
            measure.evaluate(&rho, &cone, eps)?
        }
        (None, None) => return Err(Error::InvalidArgument("either --cone or --sigma is required".into())),
    };
    let record = MeasureRecord {
        quantity: &a.quantity,
        state: &a.state,
        cone: a.cone.as_deref(),
        sigma: a.sigma.as_deref(),
        eps: fmt_num(eps.value()),
        value,
    };
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&record)?,
        Format::Csv => format!(
            "quantity,eps,bits,provenance\n{},{},{},{}\n",
            record.quantity,
            record.eps,
            fmt_num(record.value.bits),
            crate::multicopy::provenance_tag(&record.value.provenance, 1)
        ),
        Format::Svg => return Err(Error::InvalidArgument("svg output is only available for fig2".into())),
    };
    emit(&a.output, &text, stdout)?;
    Ok(EXIT_OK)
}

/// One row of the distillation figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Row {
    pub p: f64,
    pub dproj_bits: f64,
    pub dsep_inf_bits: f64,
}

/// Grid `start, start+step, …, ≤ stop`, rounded to 12 decimals.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts = parse_list(&spec.replace(':', ","))?;
    let [start, stop, step] = parts[..] else {
        return Err(Error::InvalidArgument(format!("grid must be start:stop:step, got '{spec}'")));
    };
    if !(step > 0.0) || stop < start {
        return Err(Error::InvalidArgument(format!("invalid grid '{spec}'")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Closed-form rows for the given grid.
pub fn fig2_rows(d: usize, grid: &[f64]) -> Result<Vec<Fig2Row>> {
    grid.iter()
        .map(|&p| {
            let params = IsotropicParams::new(d, p)?;
            Ok(Fig2Row {
                p,
                dproj_bits: isotropic_dproj_bits(params),
                dsep_inf_bits: isotropic_dsep_inf_bits(params),
            })
        })
        .collect()
}

pub fn fig2_csv(rows: &[Fig2Row]) -> String {
    let mut out = String::from("p,dproj_bits,dsep_inf_bits\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.p, fmt_num(r.dproj_bits), fmt_num(r.dsep_inf_bits));
    }
    out
}

/// Minimal SVG with both curves and labelled axes.
pub fn fig2_svg(rows: &[Fig2Row], d: usize) -> String {
    let (w, h, m) = (640.0, 420.0, 50.0);
    let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
    let p0 = rows.first().map_or(0.0, |r| r.p);
    let p1 = rows.last().map_or(1.0, |r| r.p).max(p0 + 1e-9);
    let ymax = rows
        .iter()
        .map(|r| finite(r.dproj_bits).max(finite(r.dsep_inf_bits)))
        .fold(1e-9, f64::max)
        .ceil();
    let x = |p: f64| m + (p - p0) / (p1 - p0) * (w - 2.0 * m);
    let y = |v: f64| h - m - finite(v) / ymax * (h - 2.0 * m);
    let poly = |f: &dyn Fn(&Fig2Row) -> f64| {
        rows.iter()
            .map(|r| format!("{:.2},{:.2}", x(r.p), y(f(r))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{m}" y1="{m}" x2="{m}" y2="{b}" stroke="black"/>"#,
        b = h - m,
        r = w - m
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">p</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="14" transform="rotate(-90 14 {})">bits per copy</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (v, anchor) in [(p0, "start"), (p1, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="{anchor}" font-size="12">{v}</text>"#,
            x(v),
            h - m + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="12">{ymax}</text>"#,
        m - 4.0,
        m + 4.0
    );
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#c0392b" stroke-width="2" points="{}"/>"##,
        poly(&|r| r.dproj_bits)
    );
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#2c3e50" stroke-width="2" stroke-dasharray="6 4" points="{}"/>"##,
        poly(&|r| r.dsep_inf_bits)
    );
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" font-size="12" fill="#c0392b">probabilistic (d = {d})</text>"##,
        m + 10.0,
        m + 10.0
    );
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" font-size="12" fill="#2c3e50">deterministic bound</text>"##,
        m + 10.0,
        m + 26.0
    );
    s.push_str("</svg>\n");
    s
}

/// Indices of `k` evenly spread grid points.
fn check_points(len: usize, k: usize) -> Vec<usize> {
    if len <= k {
        return (0..len).collect();
    }
    let mut idx: Vec<usize> = (0..k).map(|i| i * (len - 1) / (k - 1)).collect();
    idx.dedup();
    idx
}

pub fn cmd_fig2(a: &Fig2Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let grid = parse_grid(&a.p_grid)?;
    let rows = fig2_rows(a.d, &grid)?;
    let cone = FreeCone::ppt(a.d, a.d)?;
    let mut worst: f64 = 0.0;
    for i in check_points(rows.len(), 5) {
        let r = &rows[i];
        if !r.dproj_bits.is_finite() {
            continue;
        }
        let rho = isotropic(IsotropicParams::new(a.d, r.p)?)?;
        let solved = dproj_set(&rho, &cone)?.bits;
        worst = worst.max((solved - r.dproj_bits).abs());
        let d_sep = rel_entropy_set(&rho, &cone)?;
        // the closed form must fall inside the certified bracket
        let outside = (d_sep.lower() - r.dsep_inf_bits).max(r.dsep_inf_bits - d_sep.bits).max(0.0);
        worst = worst.max(outside);
    }
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => fig2_csv(&rows),
        Format::Svg => fig2_svg(&rows, a.d),
        Format::Json => to_json(&rows)?,
    };
    emit(&a.output, &text, stdout)?;
    if let Some(path) = &a.svg {
        std::fs::write(path, fig2_svg(&rows, a.d))?;
    }
    if worst > a.check_tol {
        let _ = writeln!(
            stderr,
            "self-check failed: solver and closed form differ by {worst:.3e} (tolerance {:.1e})",
            a.check_tol
        );
        return Ok(EXIT_SELF_CHECK);
    }
    Ok(EXIT_OK)
}

fn require<'a>(opt: &'a Option<String>, flag: &str) -> Result<&'a str> {
    opt.as_deref()
        .ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for this rate")))
}

pub fn cmd_rate(a: &RateArgs, stdout: &mut dyn Write) -> Result<i32> {
    if a.preset == Some(Preset::CommutingQubits) {
        let q = |s: &str| parse_state(s);
        let report = dichotomy_rate(&q("diag:0.9,0.1")?, &q("mixed:d=2")?, &q("diag:0.8,0.2")?, &q("mixed:d=2")?)?;
        emit(&a.output, &to_json(&report)?, stdout)?;
        return Ok(EXIT_OK);
    }
    let state = require(&a.state, "state")?;
    let text = if a.kind == RateKindArg::Isotropic {
        let kv = key_values(state.trim().strip_prefix("isotropic:").ok_or_else(|| {
            Error::InvalidArgument("isotropic rates need --state isotropic:d=..,p=..".into())
        })?)?;
        let (prob, det) = isotropic_rates(get(&kv, "d")?, get(&kv, "p")?)?;
        #[derive(Serialize)]
        struct Pair {
            probabilistic: crate::rates::RateReport,
            deterministic: crate::rates::RateReport,
        }
        to_json(&Pair {
            probabilistic: prob,
            deterministic: det,
        })?
    } else if a.kind == RateKindArg::Dichotomy {
        let r1 = parse_state(state)?;
        let r2 = parse_state(require(&a.sigma, "sigma")?)?;
        let w1 = parse_state(require(&a.target, "target")?)?;
        let w2 = parse_state(require(&a.target_sigma, "target-sigma")?)?;
        to_json(&dichotomy_rate(&r1, &r2, &w1, &w2)?)?
    } else {
        let source = parse_cone(require(&a.cone, "cone")?)?;
        let target_cone = match &a.target_cone {
            Some(s) => parse_cone(s)?,
            None => source.clone(),
        };
        let rho = align(parse_state(state)?, &source)?;
        let omega = align(parse_state(require(&a.target, "target")?)?, &target_cone)?;
        let (sf, tf) = (FreeConeFamily::new(source), FreeConeFamily::new(target_cone));
        let report = match a.kind {
            RateKindArg::ConverseProb => converse_prob(&rho, &omega, &sf, &tf, a.nmax)?,
            RateKindArg::ConverseDet => converse_det(&rho, &omega, &sf, &tf, a.nmax)?,
            RateKindArg::ExactAffine => exact_affine(&rho, &omega, &sf, &tf, a.nmax)?,
            RateKindArg::Achievable => {
                achievable_standard(&rho, &omega, &sf, &tf, a.nmax, &parse_eps_list(&a.eps)?)?
            }
            RateKindArg::Tradeoff => {
                let errors = parse_errors(require(&a.errors, "errors")?)?;
                distillation_tradeoff(&rho, &omega, &sf, &tf, errors, a.nmax)?
            }
            RateKindArg::Dichotomy | RateKindArg::Isotropic => unreachable!("handled above"),
        };
        to_json(&report)?
    };
    if matches!(a.output.format, Some(Format::Csv | Format::Svg)) {
        return Err(Error::InvalidArgument("rate reports are JSON only".into()));
    }
    emit(&a.output, &text, stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_regularize(a: &RegularizeArgs, stdout: &mut dyn Write) -> Result<i32> {
    let measure: Measure = a.quantity.parse()?;
    let cone = parse_cone(&a.cone)?;
    let rho = align(parse_state(&a.state)?, &cone)?;
    let family = FreeConeFamily::new(cone);
    let reports = parse_eps_list(&a.eps)?
        .into_iter()
        .map(|eps| regularize(measure, &rho, &family, a.nmax, eps))
        .collect::<Result<Vec<_>>>()?;
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("measure,n,eps,per_copy_bits,provenance\n");
            for r in &reports {
                out.extend(r.to_csv().lines().skip(1).map(|l| format!("{l}\n")));
            }
            out
        }
        Format::Json => to_json(&reports)?,
        Format::Svg => return Err(Error::InvalidArgument("svg output is only available for fig2".into())),
    };
    emit(&a.output, &text, stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_aep(a: &AepArgs, stdout: &mut dyn Write) -> Result<i32> {
    let cone = parse_cone(&a.cone)?;
    let rho = align(parse_state(&a.state)?, &cone)?;
    let table = aep_sandwich(&rho, &FreeConeFamily::new(cone), a.nmax, &parse_eps_list(&a.eps)?)?;
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&table)?,
        Format::Svg => return Err(Error::InvalidArgument("svg output is only available for fig2".into())),
    };
    emit(&a.output, &text, stdout)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("projent").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn state_and_cone_specs() {
        assert_eq!(parse_state("maxent:d=2").unwrap().dim(), 4);
        assert_eq!(parse_state("diag:0.9,0.1").unwrap().dim(), 2);
        assert!(parse_state("isotropic:d=2").is_err());
        assert_eq!(parse_cone("ppt:2,2").unwrap(), FreeCone::ppt(2, 2).unwrap());
        assert!(parse_cone("singleton:mixed:d=2").unwrap().is_affine());
        assert!(parse_cone("nonsense").is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0.5:0.99:0.01").unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g[40], 0.9);
        assert_eq!(*g.last().unwrap(), 0.99);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_str(&["measure", "--quantity", "dproj"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["measure", "--quantity", "dproj", "--state", "bogus", "--cone", "ppt:2,2"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn measure_outputs() {
        let (code, out, _) = run_str(&["measure", "--quantity", "dproj", "--cone", "ppt:2,2", "--state", "isotropic:d=2,p=0.75"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["value"]["bits"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-6);
        assert!(v["value"]["provenance"].is_object());
    }

    #[test]
    fn wrong_regime_exit_code() {
        let (code, _, err) = run_str(&[
            "rate", "--kind", "exact-affine", "--cone", "ppt:2,2", "--state", "isotropic:d=2,p=0.75", "--target", "maxent:d=2",
        ]);
        assert_eq!(code, EXIT_WRONG_REGIME, "{err}");
    }
}
