//! `msl`: evaluation, translation, bounded search, counting, perspectives,
//! weights, systems and the property suites from the command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use msl_core::counting::{report, ClosedForm};
use msl_core::eval::{CoverMode, EvalOptions, Sign};
use msl_core::formula::{parse, parse_infer};
use msl_core::model::parse_model_set_ordered;
use msl_core::perspective::{parse_perspective, persp_eval, persp_eval_signed};
use msl_core::suite::run_suite;
use msl_core::systems::parse_system;
use msl_core::translate::{bounded_fo_sat, bounded_lc_sat, translate, SatWitness, SearchOptions};
use msl_core::weights::{parse_weights_with, Aggregator, Exact, WeightedUniverse};
use msl_core::{Evaluator, Formula, Signature};

#[derive(Parser)]
#[command(
    name = "msl",
    version,
    about = "First-order logic over finite model sets"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "text")]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Turnstile {
    Pos,
    Neg,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Cover {
    ThreeWay,
    Partition,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fo,
    Lc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Closed {
    Sym,
    AntiInvolutive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Semantics {
    First,
    Signed,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula on a model set.
    Eval {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        models: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        turnstile: Turnstile,
        /// Print the choice function or cover that makes a turnstile hold.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value = "three-way")]
        cover: Cover,
    },
    /// Print the first-order translation with a domain predicate.
    Translate {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, default_value = "D")]
        d_name: String,
    },
    /// Bounded satisfiability search.
    Sat {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_domain: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        max_models: u64,
        /// Report the first witness in enumeration order.
        #[arg(long)]
        deterministic: bool,
    },
    /// Count models of a sentence over {0..n-1}.
    Count {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum)]
        closed_form: Option<Closed>,
    },
    /// Evaluate a modal formula on a perspective.
    PerspEval {
        #[arg(long)]
        perspective: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_enum, default_value = "signed")]
        semantics: Semantics,
    },
    /// Value of a set of weighted properties.
    Weigh {
        #[arg(long)]
        universe: PathBuf,
        /// Tab-separated `name  ids  weight`; ids count models in file order.
        #[arg(long)]
        weights: PathBuf,
        /// Comma-separated property names; empty for all.
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
        /// sum, min, max or count-positive.
        #[arg(long, default_value = "sum")]
        aggregator: Aggregator,
        /// Weigh the intersection of the properties instead.
        #[arg(long)]
        intersect: bool,
        /// Values at or above this read as true.
        #[arg(long, default_value = "0")]
        threshold: String,
    },
    /// Run a system for a number of steps.
    Simulate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        start: String,
        #[arg(long)]
        steps: usize,
    },
    /// Run the property suites and golden examples.
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Comma-separated suite names; all when absent.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

/// A failed run: exit code and message.
struct Failure(u8, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn in_file<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| usage(format!("{}: {e}", path.display()))
}

fn formula_with(path: &Path, sig: &Signature) -> Result<Formula, Failure> {
    parse(read(path)?.trim(), sig).map_err(in_file(path))
}

fn formula_inferred(path: &Path) -> Result<Formula, Failure> {
    parse_infer(read(path)?.trim())
        .map(|(f, _)| f)
        .map_err(in_file(path))
}

fn code(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

/// Builds the report and the exit code of one command.
fn dispatch(cli: Cli) -> Result<(String, u8), Failure> {
    let tsv = cli.output == Output::Tsv;
    let mut out = String::new();
    let status = match cli.command {
        Command::Eval {
            formula,
            models,
            turnstile,
            witness,
            cover,
        } => {
            let (m, _) = parse_model_set_ordered(&read(&models)?).map_err(in_file(&models))?;
            let f = formula_with(&formula, m.signature())?;
            let cover = match cover {
                Cover::ThreeWay => CoverMode::ThreeWay,
                Cover::Partition => CoverMode::Partition,
            };
            let ev = Evaluator::new(EvalOptions {
                cover,
                ..EvalOptions::default()
            });
            let signs: &[Sign] = match turnstile {
                Turnstile::Pos => &[Sign::Pos],
                Turnstile::Neg => &[Sign::Neg],
                Turnstile::Both => &[Sign::Pos, Sign::Neg],
            };
            let mut held = Vec::new();
            for &sign in signs {
                let holds = match sign {
                    Sign::Pos => ev.eval_pos(&m, &f),
                    Sign::Neg => ev.eval_neg(&m, &f),
                }
                .map_err(|e| Failure(2, e.to_string()))?;
                held.push((sign, holds));
            }
            let name = |s: Sign| if s == Sign::Pos { "pos" } else { "neg" };
            if tsv {
                out.push_str("turnstile\tholds\n");
                for (s, h) in &held {
                    let _ = writeln!(out, "{}\t{h}", name(*s));
                }
            } else {
                let parts: Vec<String> = held
                    .iter()
                    .map(|(s, h)| format!("{}={h}", name(*s)))
                    .collect();
                let _ = writeln!(out, "{}", parts.join(" "));
            }
            if witness {
                for (s, h) in &held {
                    if !h {
                        continue;
                    }
                    match ev
                        .witness(&m, &f, *s)
                        .map_err(|e| Failure(2, e.to_string()))?
                    {
                        Some(w) => {
                            let _ = writeln!(out, "{} witness: {w}", name(*s));
                        }
                        None => {
                            let _ = writeln!(out, "{} witness: none needed", name(*s));
                        }
                    }
                }
            }
            // `both` succeeds when the formula is decided either way
            code(match turnstile {
                Turnstile::Both => held.iter().any(|(_, h)| *h),
                _ => held[0].1,
            })
        }
        Command::Translate { formula, d_name } => {
            let f = formula_inferred(&formula)?;
            let t = translate(&f, &d_name).map_err(|e| usage(e.to_string()))?;
            let _ = writeln!(out, "{t}");
            0
        }
        Command::Sat {
            formula,
            mode,
            max_domain,
            max_models,
            deterministic,
        } => {
            let f = formula_inferred(&formula)?;
            let opts = SearchOptions {
                deterministic,
                ..SearchOptions::default()
            };
            let r = match mode {
                Mode::Fo => bounded_fo_sat(&f, max_domain as usize, opts),
                Mode::Lc => bounded_lc_sat(&f, max_models as usize, max_domain as usize, opts),
            }
            .map_err(|e| usage(e.to_string()))?;
            if tsv {
                let _ = writeln!(out, "status\n{}", r.status);
            } else {
                let _ = writeln!(out, "{}", r.status);
                match &r.witness {
                    Some(SatWitness::Interpretation(i)) => {
                        let _ = writeln!(out, "{}", i.structure());
                        for (v, e) in i.assignment() {
                            let _ = writeln!(out, "{v} = {e}");
                        }
                    }
                    Some(SatWitness::ModelSet(m)) => {
                        let _ = write!(out, "{m}");
                    }
                    None => {}
                }
            }
            code(r.is_sat())
        }
        Command::Count {
            formula,
            n,
            closed_form,
        } => {
            let f = formula_inferred(&formula)?;
            let closed = closed_form.map(|c| match c {
                Closed::Sym => ClosedForm::Symmetric,
                Closed::AntiInvolutive => ClosedForm::AntiInvolutive,
            });
            let r = report(&f, n as usize, closed).map_err(|e| usage(e.to_string()))?;
            if tsv {
                out.push_str("n\tbrute\tclosed\tmatch\n");
            }
            let _ = writeln!(out, "{r}");
            code(r.matches() != Some(false))
        }
        Command::PerspEval {
            perspective,
            formula,
            semantics,
        } => {
            let p = parse_perspective(&read(&perspective)?).map_err(in_file(&perspective))?;
            let f = match p.signature() {
                Some(sig) => formula_with(&formula, sig)?,
                None => formula_inferred(&formula)?,
            };
            match semantics {
                Semantics::First => {
                    let v = persp_eval(&p, &f).map_err(|e| usage(e.to_string()))?;
                    let _ = writeln!(out, "{}{v}", if tsv { "holds\n" } else { "" });
                    code(v)
                }
                Semantics::Signed => {
                    let v = persp_eval_signed(&p, &f).map_err(|e| usage(e.to_string()))?;
                    if tsv {
                        let _ = writeln!(out, "pos\tneg\n{}\t{}", v.positive, v.negative);
                    } else {
                        let _ = writeln!(out, "{v}");
                    }
                    code(v.positive)
                }
            }
        }
        Command::Weigh {
            universe,
            weights,
            props,
            aggregator,
            intersect,
            threshold,
        } => {
            let (m, ordered) =
                parse_model_set_ordered(&read(&universe)?).map_err(in_file(&universe))?;
            let threshold = msl_core::weights::parse_rational(&threshold)
                .ok_or_else(|| usage(format!("bad threshold `{threshold}`")))?;
            let canonical: Vec<usize> = ordered
                .iter()
                .map(|i| {
                    m.members()
                        .iter()
                        .position(|c| c == i)
                        .expect("every parsed model is a member")
                })
                .collect();
            let mut wu = WeightedUniverse::new(m, aggregator).with_threshold(threshold);
            parse_weights_with(&read(&weights)?, &mut wu, |i| canonical.get(i).copied())
                .map_err(in_file(&weights))?;
            let names: Vec<&str> = props
                .iter()
                .map(String::as_str)
                .filter(|p| !p.is_empty())
                .collect();
            let value = match (intersect, names.is_empty()) {
                (true, _) => wu.intersect_then_weigh(&names),
                (false, true) => Ok(wu.full_value()),
                (false, false) => wu.value_of(&names),
            }
            .map_err(|e| usage(e.to_string()))?;
            let truth = wu.truth(&value);
            if tsv {
                let _ = writeln!(out, "value\ttruth\n{}\t{truth}", Exact(&value));
            } else {
                let _ = writeln!(out, "value={} truth={truth}", Exact(&value));
            }
            code(truth)
        }
        Command::Simulate {
            system,
            start,
            steps,
        } => {
            let sys = parse_system(&read(&system)?).map_err(in_file(&system))?;
            let s0 = sys
                .base
                .state_id(&start)
                .ok_or_else(|| usage(format!("unknown state `{start}`")))?;
            match sys.run(s0, steps) {
                Ok(e) => {
                    if tsv {
                        out.push_str("step\tstate\tactions\n");
                        for (k, (s, a)) in e.steps.iter().enumerate() {
                            let _ = writeln!(
                                out,
                                "{k}\t{}\t{}",
                                sys.base.state_name(*s),
                                sys.base.fmt_actions(a)
                            );
                        }
                        if let Some(s) = e.last {
                            let _ =
                                writeln!(out, "{}\t{}\t-", e.steps.len(), sys.base.state_name(s));
                        }
                    } else {
                        let _ = writeln!(out, "{}", e.display(&sys.base));
                    }
                    0
                }
                Err(e) => return Err(Failure(1, e.to_string())),
            }
        }
        Command::Suite { seed, only } => {
            let only: Vec<&str> = only
                .iter()
                .map(String::as_str)
                .filter(|s| !s.is_empty())
                .collect();
            let r = run_suite(seed, &only).map_err(|e| usage(e.to_string()))?;
            out = if tsv { r.to_tsv() } else { r.to_string() };
            code(r.passed())
        }
    };
    Ok((out, status))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("MSL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match dispatch(cli) {
        Ok((out, status)) => {
            print!("{out}");
            ExitCode::from(status)
        }
        Err(Failure(status, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(status)
        }
    }
}
