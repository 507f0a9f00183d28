//! Command-line driver. Exit codes: 0 success, 1 verification failed,
//! 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::audit::{self, AuditReport, ChainVerdict};
use crate::error::{Error, Result};
use crate::geometry::{adjacent, MAX_LP_N};
use crate::matrix::CostMatrix;
use crate::oracle::{enumerate_tours, tour_lengths, MAX_ENUM_N, MIN_ENUM_N};
use crate::solver::branch_bound;
use crate::tour::Tour;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bnb-tsp",
    version,
    about = "Branch-and-bound TSP with comparison traces and exact audits"
)]
pub struct CommandConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the structured report to this file.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and print the optimal tour.
    Solve {
        #[arg(long, value_name = "PATH")]
        matrix: PathBuf,
        /// Write the comparison trace as JSON lines.
        #[arg(long, value_name = "PATH")]
        trace_out: Option<PathBuf>,
        /// Drop comparisons with an infinite operand from the trace.
        #[arg(long)]
        filter_trivial: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run one of the built-in audits, or audit the chain of a given input.
    Audit {
        #[arg(value_enum)]
        which: AuditKind,
        #[arg(long, value_name = "PATH")]
        matrix: Option<PathBuf>,
        /// Tour in cycle notation, e.g. "1 4 2 3".
        #[arg(long)]
        tour: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List all tours in canonical order, with lengths when a matrix is given.
    Enumerate {
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        n: Option<usize>,
        #[arg(long, value_name = "PATH")]
        matrix: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide adjacency for every pair of tours on n vertices.
    Adjacency {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Randomized check of the fixed witness construction.
    Lemma1 {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        cases: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditKind {
    Section4,
    Section5,
    Chain,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CommandConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&config.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn read_matrix(path: &Path) -> Result<CostMatrix> {
    let text = std::fs::read_to_string(path)?;
    let c = CostMatrix::parse(&text)?;
    if c.n() < 3 {
        return Err(Error::Precondition(format!(
            "a tour needs at least 3 vertices, matrix has n = {}",
            c.n()
        )));
    }
    Ok(c)
}

fn check_range(what: &'static str, n: usize, min: usize, max: usize) -> Result<()> {
    if (min..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedSize { what, n, min, max })
    }
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Solve {
            matrix,
            trace_out,
            filter_trivial,
            format,
        } => {
            let c = read_matrix(matrix)?;
            let solution = branch_bound(&c)?;
            let trace = if *filter_trivial {
                solution.trace.filter_nontrivial()
            } else {
                solution.trace.clone()
            };
            if let Some(path) = trace_out {
                std::fs::write(path, trace.to_jsonl())?;
            }
            match format {
                Format::Text => {
                    writeln!(out, "tour: {}", solution.tour)?;
                    writeln!(out, "length: {}", solution.length)?;
                    writeln!(
                        out,
                        "comparisons: {} ({} nontrivial)",
                        solution.trace.events.len(),
                        solution.trace.nontrivial().count()
                    )?;
                }
                Format::Structured => {
                    let v = json!({
                        "tour": solution.tour,
                        "length": solution.length,
                        "length_form": solution.length_form,
                        "comparisons": solution.trace.events.len(),
                        "nontrivial": solution.trace.nontrivial().count(),
                        "input_fingerprint": solution.trace.input_fingerprint,
                    });
                    writeln!(out, "{v}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Audit {
            which,
            matrix,
            tour,
            output,
        } => {
            let report = match which {
                AuditKind::Section4 => audit::verify_section4(),
                AuditKind::Section5 => audit::verify_section5(),
                AuditKind::Chain => {
                    let (Some(matrix), Some(tour)) = (matrix, tour) else {
                        return Err(Error::Precondition(
                            "audit chain needs --matrix and --tour".into(),
                        ));
                    };
                    let c = read_matrix(matrix)?;
                    let y = Tour::parse(tour)?;
                    audit::audit_chain(&c, &y)?
                }
            };
            emit_report(&report, output, out)?;
            let ok = match which {
                AuditKind::Chain => matches!(
                    report.chain_verdict,
                    Some(ChainVerdict::Violates | ChainVerdict::Satisfies)
                ),
                _ => report.passed(),
            };
            Ok(if ok { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Enumerate { n, matrix, format } => {
            let rows: Vec<(Tour, Option<i64>)> = match (n, matrix) {
                (_, Some(path)) => {
                    let c = read_matrix(path)?;
                    check_range("enumeration", c.n(), MIN_ENUM_N, MAX_ENUM_N)?;
                    tour_lengths(&c)?
                        .into_iter()
                        .map(|(t, l)| (t, l.finite()))
                        .collect()
                }
                (Some(n), None) => {
                    check_range("enumeration", *n, MIN_ENUM_N, MAX_ENUM_N)?;
                    enumerate_tours(*n)?
                        .into_iter()
                        .map(|t| (t, None))
                        .collect()
                }
                (None, None) => unreachable!("clap requires one of --n, --matrix"),
            };
            let with_lengths = matrix.is_some();
            for (t, len) in &rows {
                match format {
                    Format::Text => {
                        let cycle: Vec<String> = t.cycle().iter().map(usize::to_string).collect();
                        if with_lengths {
                            let len = len.map_or("inf".to_string(), |l| l.to_string());
                            writeln!(out, "{}\t{len}", cycle.join(" "))?;
                        } else {
                            writeln!(out, "{}", cycle.join(" "))?;
                        }
                    }
                    Format::Structured if with_lengths => {
                        writeln!(out, "{}", json!({ "tour": t, "length": len }))?
                    }
                    Format::Structured => writeln!(out, "{}", json!({ "tour": t }))?,
                }
            }
            Ok(EXIT_OK)
        }
        Command::Adjacency { n, format } => {
            check_range("adjacency", *n, 4, MAX_LP_N)?;
            let tours = enumerate_tours(*n)?;
            let mut total = 0usize;
            let mut adjacent_pairs = 0usize;
            for a in 0..tours.len() {
                for b in a + 1..tours.len() {
                    let adj = adjacent(&tours[a], &tours[b])?;
                    total += 1;
                    adjacent_pairs += usize::from(adj);
                    match format {
                        Format::Text => writeln!(out, "{}\t{}\t{adj}", tours[a], tours[b])?,
                        Format::Structured => writeln!(
                            out,
                            "{}",
                            json!({ "x": tours[a], "y": tours[b], "adjacent": adj })
                        )?,
                    }
                }
            }
            let clique = adjacent_pairs == total;
            match format {
                Format::Text => {
                    writeln!(out, "adjacent pairs: {adjacent_pairs}/{total}")?;
                    writeln!(out, "all tours pairwise adjacent: {clique}")?;
                }
                Format::Structured => writeln!(
                    out,
                    "{}",
                    json!({ "n": n, "pairs": total, "adjacent": adjacent_pairs, "clique": clique })
                )?,
            }
            Ok(EXIT_OK)
        }
        Command::Lemma1 {
            n,
            seed,
            cases,
            output,
        } => {
            let report = audit::lemma1_property_suite(*seed, *cases, *n)?;
            emit_report(&report, output, out)?;
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
    }
}

fn emit_report(report: &AuditReport, output: &OutputArgs, out: &mut dyn Write) -> Result<()> {
    if let Some(path) = &output.out {
        std::fs::write(path, report.to_json())?;
    }
    match output.format {
        Format::Text => out.write_all(report.summary().as_bytes())?,
        Format::Structured => writeln!(out, "{}", report.to_json())?,
    }
    Ok(())
}
