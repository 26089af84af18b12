//! `inhab`: decide inhabitation of rank-2 intersection types, run
//! alternating linear-bounded automata, and cross-check the two.
//!
//! Exit codes: 0 inhabited / accept / agree, 1 empty / reject, 2 usage or
//! parse error, 3 resource budget exhausted, 4 solver and automaton disagree.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use inhab_core::alba::{decide, parse_word, Bit, Machine};
use inhab_core::harness::{random_machines, words_of_length, xcheck, Verdict, XCheckReport};
use inhab_core::reduction::{gen_t, reduce};
use inhab_core::solver::oracle::enumerate_long_capped;
use inhab_core::solver::{solve, Limits, SolveResult};
use inhab_core::term::{check_derivation, Derivation};
use inhab_core::types::{parse_type, rank, TypeExpr};

const INHABITED: u8 = 0;
const EMPTY: u8 = 1;
const USAGE: u8 = 2;
const BUDGET: u8 = 3;
const DISAGREE: u8 = 4;

#[derive(Parser)]
#[command(name = "inhab", version, about = "Rank-2 intersection type inhabitation and ALBA tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Budget {
    /// Stop after exploring this many configurations.
    #[arg(long, value_name = "N")]
    max_configs: Option<usize>,
    /// Stop after this many seconds.
    #[arg(long, value_name = "SECONDS")]
    max_time: Option<f64>,
}

impl Budget {
    fn limits(self) -> Result<Limits, String> {
        let max_time = match self.max_time {
            Some(s) if !(s.is_finite() && s >= 0.0) => return Err(format!("invalid --max-time {s}")),
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(Limits { max_configs: self.max_configs, max_time })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the rank of a type.
    Rank { ty: String },
    /// Decide whether a type is inhabited and print a witness.
    Inhabit {
        /// The type; read from stdin when omitted.
        ty: Option<String>,
        /// Write the witness derivation to this file.
        #[arg(long, value_name = "PATH")]
        emit_derivation: Option<PathBuf>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Check a derivation file.
    Check { path: PathBuf },
    /// Print the type T(n), whose only inhabitant has 2^n - 1 applications.
    GenT { n: usize },
    /// Print the type encoding in-place acceptance of a word.
    Reduce { machine: PathBuf, word: String },
    /// Decide in-place acceptance of a word by the automaton.
    Alba { machine: PathBuf, word: String },
    /// Compare the solver on the reduction with the automaton.
    Xcheck {
        #[arg(required_unless_present = "random", requires = "word")]
        machine: Option<PathBuf>,
        word: Option<String>,
        /// Check this many seeded random machines on every word of length 2 and 3.
        #[arg(long, value_name = "N", conflicts_with = "machine")]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report as JSON.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        #[command(flatten)]
        budget: Budget,
    },
    /// List the long solutions of a type up to a nesting depth.
    Enumerate {
        ty: String,
        depth: usize,
        /// Give up after this many search steps.
        #[arg(long, value_name = "N", default_value_t = 10_000_000)]
        max_work: usize,
    },
}

/// A failed command: message for stderr and exit code.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(USAGE, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    // deep witnesses make for deep recursion in read-back and checking
    let worker = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || run(cli.command))
        .expect("spawn worker thread");
    match worker.join() {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(Failure(code, msg))) => {
            eprintln!("inhab: {msg}");
            ExitCode::from(code)
        }
        Err(_) => ExitCode::FAILURE,
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Rank { ty } => {
            println!("{}", rank(&parse_type(&ty)?));
            Ok(0)
        }
        Command::Inhabit { ty, emit_derivation, budget } => inhabit(ty, emit_derivation.as_deref(), budget),
        Command::Check { path } => check(&path),
        Command::GenT { n } => {
            if n == 0 {
                return Err(Failure(USAGE, "gen-t needs n >= 1".into()));
            }
            println!("{}", gen_t(n));
            Ok(0)
        }
        Command::Reduce { machine, word } => {
            let (m, w) = load(&machine, &word)?;
            println!("{}", reduce(&m, &w)?);
            Ok(0)
        }
        Command::Alba { machine, word } => {
            let (m, w) = load(&machine, &word)?;
            let a = decide(&m, &w)?;
            println!("{}", if a.accepted { "accept" } else { "reject" });
            Ok(if a.accepted { INHABITED } else { EMPTY })
        }
        Command::Xcheck { machine, word, random, seed, report, budget } => {
            let limits = budget.limits()?;
            let reports = match (machine, word, random) {
                (Some(path), Some(word), None) => {
                    let (m, w) = load(&path, &word)?;
                    vec![xcheck(&path.display().to_string(), &m, &w, limits)?]
                }
                (None, None, Some(count)) => {
                    println!("seed {seed}");
                    let words: Vec<Vec<Bit>> = (2..=3).flat_map(words_of_length).collect();
                    let mut out = Vec::new();
                    for (id, m) in random_machines(seed, count, 3, 6) {
                        for w in &words {
                            out.push(xcheck(&id, &m, w, limits)?);
                        }
                    }
                    out
                }
                _ => return Err(Failure(USAGE, "give a machine and a word, or --random N".into())),
            };
            xcheck_summary(&reports, report.as_deref())
        }
        Command::Enumerate { ty, depth, max_work } => {
            let goal = parse_type(&ty)?;
            match enumerate_long_capped(&goal, depth, max_work)? {
                Some(terms) => {
                    for t in &terms {
                        println!("{t}");
                    }
                    eprintln!("{} long solutions up to depth {depth}", terms.len());
                    Ok(if terms.is_empty() { EMPTY } else { INHABITED })
                }
                None => Err(Failure(BUDGET, format!("gave up after {max_work} steps"))),
            }
        }
    }
}

fn read_type(arg: Option<String>) -> Result<TypeExpr, Failure> {
    let text = match arg {
        Some(t) => t,
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    Ok(parse_type(text.trim())?)
}

fn inhabit(ty: Option<String>, emit: Option<&Path>, budget: Budget) -> Outcome {
    let goal = read_type(ty)?;
    let sol = solve(&goal, budget.limits()?)?;
    let stats = &sol.stats;
    eprintln!(
        "{} configurations, max width {}, {:.3}s",
        stats.configs,
        stats.max_width,
        stats.elapsed.as_secs_f64()
    );
    match sol.result {
        SolveResult::Inhabited(w) => {
            println!("{}", w.term);
            if let Some(path) = emit {
                fs::write(path, w.derivation.to_text())
                    .map_err(|e| Failure(USAGE, format!("{}: {e}", path.display())))?;
            }
            Ok(INHABITED)
        }
        SolveResult::Empty => {
            println!("empty type");
            Ok(EMPTY)
        }
        SolveResult::ResourceExceeded(why) => Err(Failure(BUDGET, format!("budget exhausted: {why:?}"))),
    }
}

fn check(path: &Path) -> Outcome {
    let text = fs::read_to_string(path).map_err(|e| Failure(USAGE, format!("{}: {e}", path.display())))?;
    let d = Derivation::from_text(&text)?;
    match check_derivation(&d) {
        Ok(()) => {
            println!("ok");
            Ok(0)
        }
        Err(violations) => {
            for v in &violations {
                let at: Vec<String> = v.path.iter().map(|i| i.to_string()).collect();
                println!("{} at [{}]: {}", v.rule.tag(), at.join("."), v.reason);
            }
            Ok(EMPTY)
        }
    }
}

fn load(machine: &Path, word: &str) -> Result<(Machine, Vec<Bit>), Failure> {
    let text = fs::read_to_string(machine).map_err(|e| Failure(USAGE, format!("{}: {e}", machine.display())))?;
    Ok((Machine::from_json(&text)?, parse_word(word)?))
}

fn xcheck_summary(reports: &[XCheckReport], out: Option<&Path>) -> Outcome {
    for r in reports {
        let verdict = match r.agreement {
            Some(true) => "agree",
            Some(false) => "DISAGREE",
            None => "budget",
        };
        println!(
            "{} {}: solver {:?}, automaton {:?}, {verdict}{}",
            r.machine,
            r.word,
            r.solver,
            r.automaton,
            r.witness.as_deref().map(|w| format!(", witness {w}")).unwrap_or_default()
        );
    }
    if let Some(path) = out {
        let json = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(reports)
        }?;
        fs::write(path, json).map_err(|e| Failure(USAGE, format!("{}: {e}", path.display())))?;
    }
    if reports.iter().any(|r| r.agreement == Some(false)) {
        Ok(DISAGREE)
    } else if reports.iter().any(|r| r.solver == Verdict::Budget) {
        Ok(BUDGET)
    } else {
        Ok(0)
    }
}
