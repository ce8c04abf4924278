//! Command-line front end.
//!
//! Exit codes: 0 success, relation exists or match; 1 negative verdict;
//! 2 usage or validation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::algebra::TruthValue;
use crate::bisim::{self, BisimError, ConditionResult, SimType};
use crate::fuzzrel::{FuzzyMat, RelError};
use crate::hm::{self, HmError, HmOptions, HmReport, Verdict};
use crate::model::{KripkeModel, ModelError};
use crate::par::Exec;
use crate::syntax::{self, Fragment, Modalities, ParseError};
use crate::weak::{self, WeakError, WeakReport};

#[derive(Debug, Parser)]
#[command(name = "fuzzy-kripke", version, about = "Bisimulations of fuzzy multimodal Kripke models")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModalityChoice {
    Both,
    Diamond,
    Box,
}

impl From<ModalityChoice> for Modalities {
    fn from(c: ModalityChoice) -> Self {
        match c {
            ModalityChoice::Both => Modalities::BOTH,
            ModalityChoice::Diamond => Modalities::DIAMONDS,
            ModalityChoice::Box => Modalities::BOXES,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula at every world (or one world).
    Eval {
        model: PathBuf,
        formula: String,
        #[arg(long)]
        world: Option<String>,
    },
    /// Greatest presimulation or prebisimulation of the given type.
    Bisim {
        model: PathBuf,
        model_prime: PathBuf,
        #[arg(long = "type", value_parser = parse_type)]
        sim_type: SimType,
    },
    /// Greatest weak presimulation and prebisimulation for a formula set.
    Weak {
        model: PathBuf,
        model_prime: PathBuf,
        /// One formula per line; `#` starts a comment.
        #[arg(long, conflicts_with_all = ["fragment", "depth"], required_unless_present = "fragment")]
        corpus: Option<PathBuf>,
        #[arg(long, value_parser = parse_fragment, requires = "depth")]
        fragment: Option<Fragment>,
        #[arg(long, requires = "fragment")]
        depth: Option<usize>,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
    /// Compare depth-bounded weak prebisimulations with the matched strong one.
    Hm {
        model: PathBuf,
        model_prime: PathBuf,
        #[arg(long, value_parser = parse_fragment)]
        fragment: Fragment,
        /// Largest depth examined.
        #[arg(long, default_value_t = 4)]
        cap: usize,
        /// Maximum number of value-vector classes per depth.
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = ModalityChoice::Both)]
        modalities: ModalityChoice,
    },
    /// Check the conditions of a type for a given relation.
    Check {
        model: PathBuf,
        model_prime: PathBuf,
        #[arg(long = "type", value_parser = parse_type)]
        sim_type: SimType,
        /// JSON matrix of decimal strings, or a `bisim --format json` report.
        #[arg(long)]
        relation: PathBuf,
    },
    /// Invert every accessibility relation.
    Reverse {
        model: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn parse_type(s: &str) -> Result<SimType, String> {
    s.parse()
}

fn parse_fragment(s: &str) -> Result<Fragment, String> {
    s.parse()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("formula: {0}")]
    Parse(#[from] ParseError),
    #[error("{path}: {source}")]
    Corpus { path: String, source: ParseError },
    #[error(transparent)]
    Bisim(#[from] BisimError),
    #[error(transparent)]
    Weak(#[from] WeakError),
    #[error(transparent)]
    Hm(#[from] HmError),
    #[error("relation file {path}: {message}")]
    RelationFile { path: String, message: String },
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Eval { model, formula, world } => {
            let m = KripkeModel::load(model)?;
            let a = syntax::parse(formula)?;
            let values = m.eval_vec(&a)?;
            let (worlds, values): (Vec<&String>, Vec<&TruthValue>) = match world {
                Some(w) => {
                    let i = m.world_index(w)?;
                    (vec![&m.worlds()[i]], vec![&values[i]])
                }
                None => (m.worlds().iter().collect(), values.iter().collect()),
            };
            if json {
                emit_json(out, &json!({ "formula": a.to_string(), "worlds": worlds, "values": values }))?;
            } else {
                writeln!(out, "{}", join(values.iter()))?;
            }
            Ok(0)
        }
        Command::Bisim { model, model_prime, sim_type } => {
            let (m, m2) = load_pair(model, model_prime)?;
            let r = bisim::greatest_pre(&m, &m2, *sim_type, exec)?;
            if json {
                emit_json(out, &r)?;
            } else {
                let t = r.sim_type;
                writeln!(out, "greatest {t}-{}", pre_name(t))?;
                writeln!(out, "sweeps: {}", r.iterations)?;
                write_matrix(out, &r.worlds, &r.worlds_prime, &r.matrix)?;
                write_conditions(out, &r.conditions)?;
                writeln!(out, "nonempty: {}", yes_no(r.nonempty))?;
                writeln!(out, "{t}-{} exists: {}", full_name(t), yes_no(r.exists))?;
            }
            Ok(if r.exists { 0 } else { 1 })
        }
        Command::Weak { model, model_prime, corpus, fragment, depth, budget } => {
            let (m, m2) = load_pair(model, model_prime)?;
            let (report, truncated) = match (corpus, fragment, depth) {
                (Some(path), _, _) => {
                    let text = read(path)?;
                    let psi = syntax::parse_corpus(&text)
                        .map_err(|source| CliError::Corpus { path: path.display().to_string(), source })?;
                    (weak::greatest_weak(&m, &m2, &psi, exec)?, false)
                }
                (None, Some(f), Some(d)) => {
                    let options = HmOptions { budget: *budget, exec, ..HmOptions::default() };
                    hm::weak_report_by_depth(&m, &m2, *f, *d, &options)?
                }
                _ => unreachable!("clap enforces --corpus or --fragment with --depth"),
            };
            if json {
                let mut v = serde_json::to_value(&report).expect("report serializes");
                v["truncated"] = json!(truncated);
                emit_json(out, &v)?;
            } else {
                write_weak(out, &m, &m2, &report, truncated)?;
            }
            Ok(if report.psi_equivalent && !truncated { 0 } else { 1 })
        }
        Command::Hm { model, model_prime, fragment, cap, budget, modalities } => {
            let (m, m2) = load_pair(model, model_prime)?;
            let options =
                HmOptions { cap: *cap, budget: *budget, modalities: (*modalities).into(), exec, ..HmOptions::default() };
            let r = hm::hm_check(&m, &m2, *fragment, &options)?;
            if json {
                emit_json(out, &r)?;
            } else {
                write_hm(out, &r)?;
            }
            Ok(if r.verdict == Verdict::Match { 0 } else { 1 })
        }
        Command::Check { model, model_prime, sim_type, relation } => {
            let (m, m2) = load_pair(model, model_prime)?;
            let phi = load_relation(relation)?;
            let r = bisim::check_conditions(&m, &m2, &phi, *sim_type)?;
            let ok = r.theta1 && r.theta2 && r.theta3 && r.nonempty;
            if json {
                emit_json(out, &r)?;
            } else {
                write_conditions(out, &r.conditions)?;
                writeln!(out, "nonempty: {}", yes_no(r.nonempty))?;
                writeln!(out, "{}-{}: {}", r.sim_type, full_name(r.sim_type), yes_no(ok))?;
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Reverse { model, output } => {
            let m = KripkeModel::load(model)?;
            let text = m.reverse().to_json();
            match output {
                Some(path) => {
                    std::fs::write(path, text).map_err(|source| CliError::Read { path: path.display().to_string(), source })?
                }
                None => out.write_all(text.as_bytes())?,
            }
            Ok(0)
        }
    }
}

fn load_pair(a: &Path, b: &Path) -> Result<(KripkeModel, KripkeModel), CliError> {
    let (m, m2) = (KripkeModel::load(a)?, KripkeModel::load(b)?);
    m.check_compatible(&m2)?;
    Ok((m, m2))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RelationFile {
    Rows(Vec<Vec<TruthValue>>),
    Report { matrix: Vec<Vec<TruthValue>> },
}

fn load_relation(path: &Path) -> Result<FuzzyMat, CliError> {
    let bad = |message: String| CliError::RelationFile { path: path.display().to_string(), message };
    let file: RelationFile = serde_json::from_str(&read(path)?).map_err(|e| bad(e.to_string()))?;
    let rows = match file {
        RelationFile::Rows(rows) | RelationFile::Report { matrix: rows } => rows,
    };
    FuzzyMat::from_rows(rows).map_err(|e: RelError| bad(e.to_string()))
}

fn emit_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    let s = serde_json::to_string_pretty(value).expect("reports serialize");
    writeln!(out, "{s}")
}

fn join<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pre_name(t: SimType) -> &'static str {
    if t.is_simulation() {
        "presimulation"
    } else {
        "prebisimulation"
    }
}

fn full_name(t: SimType) -> &'static str {
    if t.is_simulation() {
        "simulation"
    } else {
        "bisimulation"
    }
}

fn write_matrix(out: &mut dyn Write, rows: &[String], cols: &[String], m: &[Vec<TruthValue>]) -> std::io::Result<()> {
    let cells: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    let head = rows.iter().map(String::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols.len()).map(|j| cells.iter().map(|r| r[j].len()).chain([cols[j].len()]).max().unwrap_or(0)).collect();
    let line = |label: &str, items: &[String]| {
        let mut s = format!("{label:<head$}");
        for (item, w) in items.iter().zip(&widths) {
            s.push_str(&format!("  {item:<w$}"));
        }
        s.trim_end().to_string()
    };
    writeln!(out, "{}", line("", cols))?;
    for (name, row) in rows.iter().zip(&cells) {
        writeln!(out, "{}", line(name, row))?;
    }
    Ok(())
}

fn write_conditions(out: &mut dyn Write, conditions: &[ConditionResult]) -> std::io::Result<()> {
    for c in conditions {
        match &c.violation {
            None => writeln!(out, "  ok    {}", c.inequality)?,
            Some(v) => writeln!(out, "  FAIL  {}  at {}: {} > {}", c.inequality, v.at, v.lhs, v.rhs)?,
        }
    }
    Ok(())
}

fn write_weak(out: &mut dyn Write, m: &KripkeModel, m2: &KripkeModel, r: &WeakReport, truncated: bool) -> std::io::Result<()> {
    writeln!(out, "formula set: {}", r.psi)?;
    writeln!(out, "value classes: {}", r.formulas)?;
    if truncated {
        writeln!(out, "warning: class budget exhausted, matrices cover a truncated set")?;
    }
    writeln!(out, "greatest weak presimulation")?;
    write_matrix(out, m.worlds(), m2.worlds(), &r.presim.to_rows())?;
    writeln!(out, "(ws-1): {}", if r.ws1 { "holds" } else { "fails" })?;
    writeln!(out, "greatest weak prebisimulation")?;
    write_matrix(out, m.worlds(), m2.worlds(), &r.prebisim.to_rows())?;
    writeln!(out, "(wb-1): {}", if r.wb1 { "holds" } else { "fails" })?;
    writeln!(out, "equivalent: {}", yes_no(r.psi_equivalent))
}

fn write_hm(out: &mut dyn Write, r: &HmReport) -> std::io::Result<()> {
    writeln!(out, "fragment {}, matched type {}, modalities {}", r.fragment, r.sim_type, r.modalities)?;
    for d in &r.depths {
        let note = if d.truncated { ", truncated" } else { "" };
        writeln!(out, "E_{} ({} classes{note})", d.depth, d.classes)?;
        write_matrix(out, &r.worlds, &r.worlds_prime, &d.matrix)?;
    }
    writeln!(out, "greatest {}-prebisimulation", r.sim_type)?;
    write_matrix(out, &r.worlds, &r.worlds_prime, &r.strong)?;
    match r.converged_at {
        Some(d) => writeln!(out, "stabilized at depth {d}")?,
        None => writeln!(out, "not stabilized within the cap")?,
    }
    if let Some(x) = &r.first_mismatch {
        writeln!(out, "first mismatch at ({}, {}): weak {} vs strong {}", x.world, x.world_prime, x.weak, x.strong)?;
    }
    writeln!(out, "strong below every E_d: {}", yes_no(r.strong_below_weak))?;
    let verdict = match r.verdict {
        Verdict::Match => "match",
        Verdict::Mismatch => "mismatch",
        Verdict::Inconclusive => "inconclusive",
    };
    writeln!(out, "verdict: {verdict}")
}
