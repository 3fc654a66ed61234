//! Command-line front end. The binary only parses arguments and maps
//! errors to exit codes; everything else lives here so it can be tested.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algorithms::{expand, AlgorithmKind, ExpansionResult, ExpansionStatus, DEFAULT_MAX_STEPS};
use crate::error::{Error, Result};
use crate::experiments::{
    self, emit_figures, write_csv, write_manifest, FigureData, Profile, SweepConfig,
};
use crate::padic::Prime;
use crate::predictor::{check_run, predictor_agreement, PredictorReport};
use crate::quadratic::{QuadElem, QuadField};

#[derive(Debug, Parser)]
#[command(name = "padic-cf", version, about = "p-adic continued fractions of quadratic irrationals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand one number and report its quotients and status.
    Expand(ExpandArgs),
    /// Check the determinant sign predictor along a Browkin II run.
    Predict(PredictArgs),
    /// Periodicity table: counts, mean period and quantiles per prime.
    Table(SweepArgs),
    /// Mean valuation of B after 10, 100 and 1000 steps.
    Approx(SweepArgs),
    /// Browkin II pre-period statistics.
    Prep(SweepArgs),
    /// Charts of the periodicity table.
    Figures(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgFlag {
    B1,
    B2,
    New,
    NewSwapped,
}

impl From<AlgFlag> for AlgorithmKind {
    fn from(a: AlgFlag) -> Self {
        match a {
            AlgFlag::B1 => AlgorithmKind::BrowkinI,
            AlgFlag::B2 => AlgorithmKind::BrowkinII,
            AlgFlag::New => AlgorithmKind::New,
            AlgFlag::NewSwapped => AlgorithmKind::NewSwapped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileFlag {
    Desk,
    Paper,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub p: u64,
    /// `sqrt:D`, `rat:n/d` or `quad:a,b,c,D` for `(a + b sqrt(D)) / c`.
    #[arg(long)]
    pub input: InputSpec,
    #[arg(long, value_enum, default_value = "b2")]
    pub alg: AlgFlag,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub input: InputSpec,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// Only `b2` is meaningful; anything else is rejected.
    #[arg(long, value_enum, default_value = "b2")]
    pub alg: AlgFlag,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "desk")]
    pub profile: ProfileFlag,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, env = "PADIC_CF_JOBS", default_value_t = 1)]
    pub jobs: usize,
    /// Restrict to these primes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    #[arg(long)]
    pub d_max: Option<u64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
}

impl SweepArgs {
    pub fn config(&self) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::profile(match self.profile {
            ProfileFlag::Desk => Profile::Desk,
            ProfileFlag::Paper => Profile::Paper,
        });
        if let Some(ps) = &self.primes {
            cfg.primes = ps.iter().map(|&p| Prime::new(p)).collect::<Result<_>>()?;
        }
        if let Some(d) = self.d_max {
            cfg.d_max = d;
        }
        if let Some(s) = self.max_steps {
            cfg.max_steps = s;
        }
        cfg.parallelism = self.jobs;
        cfg.out_dir = self.out.clone();
        cfg.validate()?;
        Ok(cfg)
    }
}

/// The number to expand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputSpec {
    Sqrt(BigInt),
    Rat(BigInt, BigInt),
    Quad { a: BigInt, b: BigInt, c: BigInt, d: BigInt },
}

impl FromStr for InputSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse input {s:?}"));
        let int = |t: &str| BigInt::from_str(t.trim()).map_err(|_| bad());
        let (kind, body) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "sqrt" => Ok(InputSpec::Sqrt(int(body)?)),
            "rat" => {
                let (n, d) = body.split_once('/').unwrap_or((body, "1"));
                Ok(InputSpec::Rat(int(n)?, int(d)?))
            }
            "quad" => match body.split(',').collect::<Vec<_>>()[..] {
                [a, b, c, d] => Ok(InputSpec::Quad { a: int(a)?, b: int(b)?, c: int(c)?, d: int(d)? }),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for InputSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputSpec::Sqrt(d) => write!(f, "sqrt:{d}"),
            InputSpec::Rat(n, d) => write!(f, "rat:{n}/{d}"),
            InputSpec::Quad { a, b, c, d } => write!(f, "quad:{a},{b},{c},{d}"),
        }
    }
}

impl InputSpec {
    pub fn to_elem(&self, p: &Prime) -> Result<QuadElem> {
        match self {
            InputSpec::Sqrt(d) => QuadElem::sqrt(&QuadField::new(d.clone(), p)?),
            InputSpec::Rat(n, d) => QuadElem::rational(n.clone(), d.clone(), &QuadField::rational(p)),
            InputSpec::Quad { a, b, c, d } => {
                QuadElem::new(a.clone(), b.clone(), c.clone(), &QuadField::new(d.clone(), p)?)
            }
        }
    }
}

/// Result of `expand` as printed with `--format json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandOutput {
    pub p: u64,
    pub input: String,
    pub algorithm: AlgorithmKind,
    pub status: ExpansionStatus,
    pub quotients: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sign_trace: Vec<i8>,
}

impl ExpandOutput {
    pub fn new(p: u64, input: &InputSpec, run: &ExpansionResult) -> Self {
        ExpandOutput {
            p,
            input: input.to_string(),
            algorithm: run.algorithm,
            status: run.status,
            quotients: run.quotients.iter().map(|q| q.to_string()).collect(),
            sign_trace: run.sign_trace.clone(),
        }
    }
}

#[derive(Serialize)]
struct QuotientRow<'a> {
    n: usize,
    quotient: &'a str,
    in_period: bool,
}

/// One even step of `predict`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictRow {
    pub step: usize,
    pub n: usize,
    pub det_int: String,
    pub det_mod_p: String,
    pub predicted_nonzero_b: bool,
    pub truth_nonzero_b: bool,
    pub agrees_int: bool,
    pub agrees_mod_p: bool,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Expand(a) => cmd_expand(&a, out),
        Command::Predict(a) => cmd_predict(&a, out),
        Command::Table(a) => cmd_table(&a, out),
        Command::Approx(a) => cmd_approx(&a, out),
        Command::Prep(a) => cmd_prep(&a, out),
        Command::Figures(a) => cmd_figures(&a, out),
    }
}

fn cmd_expand(a: &ExpandArgs, out: &mut dyn Write) -> Result<()> {
    let p = Prime::new(a.p)?;
    let x = a.input.to_elem(&p)?;
    let run = expand(&x, a.alg.into(), a.max_steps)?;
    let o = ExpandOutput::new(a.p, &a.input, &run);
    match a.format {
        Format::Text => {
            writeln!(out, "{} [{}]", o.status, o.quotients.join(", "))?;
            if o.algorithm == AlgorithmKind::BrowkinII {
                let signs: Vec<String> = o.sign_trace.iter().map(|s| s.to_string()).collect();
                writeln!(out, "signs [{}]", signs.join(", "))?;
            }
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string(&o)?)?,
        Format::Csv => {
            let start = match o.status {
                ExpansionStatus::Periodic { preperiod, .. } => preperiod,
                _ => usize::MAX,
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            for (n, q) in o.quotients.iter().enumerate() {
                w.serialize(QuotientRow { n, quotient: q, in_period: n >= start })?;
            }
            out.write_all(&w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
        }
    }
    Ok(())
}

fn cmd_predict(a: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    if a.alg != AlgFlag::B2 {
        return Err(Error::InvalidArgument(
            "the sign predictor only applies to Browkin II (--alg b2)".into(),
        ));
    }
    let p = Prime::new(a.p)?;
    let x = a.input.to_elem(&p)?;
    let run = expand(&x, AlgorithmKind::BrowkinII, a.steps)?;
    let rows: Vec<PredictRow> = check_run(&run)?
        .into_iter()
        .map(|c| PredictRow {
            step: c.step,
            n: c.n,
            agrees_int: c.prediction.predicted_nonzero_b == c.truth_nonzero_b,
            agrees_mod_p: (c.prediction.det_mod_p == BigInt::from(0)) == c.truth_nonzero_b,
            det_int: c.prediction.det_int.to_string(),
            det_mod_p: c.prediction.det_mod_p.to_string(),
            predicted_nonzero_b: c.prediction.predicted_nonzero_b,
            truth_nonzero_b: c.truth_nonzero_b,
        })
        .collect();
    let label = a.input.to_string();
    let report: PredictorReport = predictor_agreement([(label.as_str(), &run)])?;
    match a.format {
        Format::Text => {
            for r in &rows {
                writeln!(
                    out,
                    "step={} n={} det={} det_mod_p={} predicted={} truth={} agree_int={} agree_mod_p={}",
                    r.step, r.n, r.det_int, r.det_mod_p, r.predicted_nonzero_b, r.truth_nonzero_b,
                    r.agrees_int, r.agrees_mod_p
                )?;
            }
            writeln!(
                out,
                "steps={} integer agree={} disagree={} mod_p agree={} disagree={}",
                report.steps,
                report.integer.agree,
                report.integer.disagree,
                report.mod_p.agree,
                report.mod_p.disagree
            )?;
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string(&rows)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r)?;
            }
            out.write_all(&w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
        }
    }
    Ok(())
}

fn prepare(a: &SweepArgs) -> Result<SweepConfig> {
    let cfg = a.config()?;
    fs::create_dir_all(&cfg.out_dir)?;
    Ok(cfg)
}

fn finish(cfg: &SweepConfig, command: &str, start: Instant, files: &[PathBuf]) -> Result<()> {
    let names: Vec<String> = files
        .iter()
        .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    write_manifest(cfg, command, start.elapsed(), &names)?;
    Ok(())
}

fn cmd_table(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = prepare(a)?;
    let start = Instant::now();
    let rows = experiments::run_table(&cfg)?;
    let path = cfg.out_dir.join("table.csv");
    write_csv(&path, &rows)?;
    for r in &rows {
        writeln!(
            out,
            "p={} alg={} periodic={} mean={:.2} q75={} q90={} total={}",
            r.p, r.algorithm, r.periodic_count, r.mean_period, r.q75, r.q90, r.total
        )?;
    }
    finish(&cfg, "table", start, &[path])
}

fn cmd_approx(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = prepare(a)?;
    let start = Instant::now();
    let rows = experiments::run_approx(&cfg)?;
    let path = cfg.out_dir.join("approx.csv");
    write_csv(&path, &rows)?;
    let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.1}"));
    for r in &rows {
        writeln!(
            out,
            "p={} alg={} v10={} v100={} v1000={} total={}",
            r.p,
            r.algorithm,
            show(r.mean_val10),
            show(r.mean_val100),
            show(r.mean_val1000),
            r.total
        )?;
    }
    finish(&cfg, "approx", start, &[path])
}

fn cmd_prep(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = prepare(a)?;
    let start = Instant::now();
    let rows = experiments::run_preperiod_stats(&cfg)?;
    let path = cfg.out_dir.join("preperiods.csv");
    write_csv(&path, &rows)?;
    for r in &rows {
        writeln!(
            out,
            "p={} periodic={} mean_preperiod={:.2} histogram={}",
            r.p, r.periodic_count, r.mean_preperiod, r.histogram
        )?;
    }
    finish(&cfg, "prep", start, &[path])
}

fn cmd_figures(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = prepare(a)?;
    let start = Instant::now();
    let detections = experiments::run_sweep(&cfg)?;
    let rows = experiments::table_rows(&detections);
    let scatter_p = if cfg.primes.iter().any(|p| p.to_u64() == Some(5)) {
        5
    } else {
        cfg.primes.first().and_then(|p| p.to_u64()).unwrap_or(5)
    };
    let files = emit_figures(&cfg.out_dir, &FigureData { rows: &rows, detections: &detections, scatter_p })?;
    for f in &files {
        writeln!(out, "{}", f.display())?;
    }
    finish(&cfg, "figures", start, &files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_specs() {
        assert_eq!("sqrt:34".parse::<InputSpec>().unwrap(), InputSpec::Sqrt(34.into()));
        assert_eq!(
            "rat:-15/109".parse::<InputSpec>().unwrap(),
            InputSpec::Rat((-15).into(), 109.into())
        );
        assert_eq!(
            "quad:3,1,1,30".parse::<InputSpec>().unwrap(),
            InputSpec::Quad { a: 3.into(), b: 1.into(), c: 1.into(), d: 30.into() }
        );
        for bad in ["34", "sqrt:", "quad:1,2,3", "cube:2", "rat:a/b"] {
            assert!(bad.parse::<InputSpec>().is_err(), "{bad}");
        }
    }

    fn text(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(args).expect("arguments parse");
        let mut buf = Vec::new();
        run(cli, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn expand_text() {
        let s = text(&["padic-cf", "expand", "--p", "23", "--input", "rat:-15/109", "--alg", "new"]).unwrap();
        assert_eq!(s, "finite [-9, -10/23, 42/23]\n");
        let s = text(&["padic-cf", "expand", "--p", "5", "--input", "sqrt:19", "--alg", "new"]).unwrap();
        assert!(s.starts_with("periodic h=1 k=20 ["));
    }

    #[test]
    fn predict_rejects_other_algorithms() {
        let e = text(&["padic-cf", "predict", "--p", "5", "--input", "sqrt:34", "--alg", "new"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
