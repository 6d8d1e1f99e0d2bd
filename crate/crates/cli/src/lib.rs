//! Command implementations for the `incidence` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use incidence_core::assign::{incidences_from_probabilities, incidences_from_records, RecordTable, TargetSpec};
use incidence_core::kb::{render, Query};
use incidence_core::laf::{self, init_assignment, propagate, Mode, Status};
use incidence_core::logic::incidence_of;
use incidence_core::probability::{cond_prob, correlation, format_prob, prob, prob_interval, DEFAULT_DIGITS};
use incidence_core::{Error, Formula, KnowledgeBase};

/// Exit status for a consistent run.
pub const EXIT_OK: u8 = 0;
/// Exit status when the bounds are contradictory.
pub const EXIT_INCONSISTENT: u8 = 1;
/// Exit status for usage, parse and evaluation errors.
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "incidence", version, about = "Incidence calculus engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula over the exact incidences of a knowledge base.
    Eval {
        kb: PathBuf,
        #[arg(short = 'f', long = "formula")]
        formula: String,
    },
    /// Propagate bounds and print every sentence with its interval.
    Solve {
        kb: PathBuf,
        /// Refine the fixpoint by case splitting to the tightest bounds.
        #[arg(long)]
        complete: bool,
    },
    /// Answer the `query` lines of a knowledge base.
    Query {
        kb: PathBuf,
        #[arg(long)]
        complete: bool,
    },
    /// Propagate bounds and report only whether they are consistent.
    Check {
        kb: PathBuf,
        #[arg(long)]
        complete: bool,
    },
    /// Synthesise incidences from target probabilities and correlations.
    Sample {
        targets: PathBuf,
        #[arg(long, default_value_t = 100)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a weighted space and incidences from observation records.
    Ingest { records: PathBuf },
}

/// Output text plus exit status of a successful command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub stdout: String,
    pub status: u8,
}

impl Report {
    fn ok(stdout: String) -> Self {
        Report {
            stdout,
            status: EXIT_OK,
        }
    }
}

pub fn run(command: &Command) -> Result<Report, Error> {
    match command {
        Command::Eval { kb, formula } => eval(&load(kb)?, formula),
        Command::Solve { kb, complete } => solve(&load(kb)?, mode(*complete), true),
        Command::Check { kb, complete } => solve(&load(kb)?, mode(*complete), false),
        Command::Query { kb, complete } => query(&load(kb)?, mode(*complete)),
        Command::Sample { targets, size, seed } => {
            let spec = TargetSpec::parse(&read(targets)?, *size, *seed)?;
            let (space, env) = incidences_from_probabilities(&spec)?;
            Ok(Report::ok(render(&space, &env)))
        }
        Command::Ingest { records } => {
            let table = RecordTable::parse(&read(records)?)?;
            let (space, env) = incidences_from_records(&table)?;
            Ok(Report::ok(render(&space, &env)))
        }
    }
}

fn mode(complete: bool) -> Mode {
    if complete {
        Mode::Complete
    } else {
        Mode::Fixpoint
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidTarget(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<KnowledgeBase, Error> {
    KnowledgeBase::parse(&read(path)?)
}

pub fn eval(kb: &KnowledgeBase, text: &str) -> Result<Report, Error> {
    let formula = kb.resolve(text)?;
    let env = kb.environment()?;
    let inc = incidence_of(&formula, &env, kb.space())?;
    let p = kb.space().wp(&inc)?;
    let mut out = String::new();
    writeln!(out, "formula {formula}").unwrap();
    writeln!(out, "bits    {inc}").unwrap();
    writeln!(out, "points  {}", inc.to_set_literal()).unwrap();
    writeln!(out, "p = {}", format_prob(&p)).unwrap();
    Ok(Report::ok(out))
}

pub fn solve(kb: &KnowledgeBase, mode: Mode, dump: bool) -> Result<Report, Error> {
    let initial = init_assignment(kb)?;
    let outcome = propagate(&initial, mode)?;
    let mut out = if dump {
        outcome.assignment.dump(kb.space())?
    } else {
        String::new()
    };
    let status = match outcome.status {
        Status::Fixpoint => {
            out.push_str("CONSISTENT\n");
            EXIT_OK
        }
        Status::Inconsistent(id) => {
            writeln!(out, "INCONSISTENT: {}", outcome.assignment.formula(id)).unwrap();
            EXIT_INCONSISTENT
        }
    };
    Ok(Report { stdout: out, status })
}

/// Exact answers where every atom has an exact incidence; otherwise `prob`
/// queries fall back to the interval given by propagated bounds.
pub fn query(kb: &KnowledgeBase, mode: Mode) -> Result<Report, Error> {
    let env = kb.environment()?;
    let space = kb.space();
    let exact = |f: &Formula| f.atoms().iter().all(|a| env.get(a).is_some());
    let mut solved: Option<laf::PropagationOutcome> = None;
    let mut out = String::new();
    for q in kb.queries() {
        match q {
            Query::Prob(f) if exact(f) => {
                writeln!(out, "prob {f} = {}", format_prob(&prob(f, &env, space)?)).unwrap();
            }
            Query::Prob(f) => {
                if solved.is_none() {
                    solved = Some(propagate(&init_assignment(kb)?, mode)?);
                }
                let outcome = solved.as_ref().unwrap();
                if let Status::Inconsistent(id) = outcome.status {
                    writeln!(out, "INCONSISTENT: {}", outcome.assignment.formula(id)).unwrap();
                    return Ok(Report {
                        stdout: out,
                        status: EXIT_INCONSISTENT,
                    });
                }
                writeln!(out, "prob {f} in {}", prob_interval(f, &outcome.assignment, space)?).unwrap();
            }
            Query::Cond(a, b) => {
                writeln!(
                    out,
                    "cond {a} given {b} = {}",
                    format_prob(&cond_prob(a, b, &env, space)?)
                )
                .unwrap();
            }
            Query::Corr(a, b) => {
                let c = correlation(a, b, &env, space)?;
                writeln!(
                    out,
                    "corr {a} , {b} = {} (c^2 = {})",
                    c.decimal(DEFAULT_DIGITS),
                    c.squared
                )
                .unwrap();
            }
        }
    }
    Ok(Report::ok(out))
}
