//! Command-line front end: argument parsing, dispatch and reporting.
//!
//! Reports are `key: value` lines. With `--format machine` the same pairs
//! are repeated as `key=value` between `BEGIN-RESULT` and `END-RESULT`.

mod engine;

use std::fmt::Display;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diamond::{Checker, DEFAULT_MAX_NODES};
use crate::error::Error;
use crate::formula::{normalize, substitute, Formula};
use crate::fx::emptiness_pos_fx;
use crate::markov::{parse_chain, MarkovChain};
use crate::oracle::{
    brute_force_sat, eval_lasso, gen_3sat_fixture, parse_dimacs, sample_lower_bound, LassoWord,
};
use crate::reach::Threshold;
use crate::valuation::Valuation;

pub use engine::Problem;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_FRAGMENT: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => match e {
                Error::Usage(_) | Error::Valuation(_) => EXIT_USAGE,
                Error::Resource { .. } => EXIT_RESOURCE,
                Error::Parse { .. } | Error::Chain(_) => EXIT_PARSE,
                Error::Fragment(_) => EXIT_FRAGMENT,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

/// Ordered key/value pairs of one query result.
#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            out.push_str(&format!("{k}: {v}\n"));
        }
        if format == Format::Machine {
            out.push_str("BEGIN-RESULT\n");
            for (k, v) in &self.lines {
                out.push_str(&format!("{k}={v}\n"));
            }
            out.push_str("END-RESULT\n");
        }
        out
    }
}

#[derive(Debug, Parser)]
#[command(name = "pltl", version, about = "Parametric LTL model checking for finite Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Chain in `.dtmc` text format
    #[arg(long)]
    chain: PathBuf,
    #[command(flatten)]
    formula: FormulaArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Node cap for automaton products
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_product_nodes: usize,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct FormulaArg {
    #[arg(long)]
    formula: Option<String>,
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether some valuation meets the threshold
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = ">0")]
        threshold: String,
        /// Print a witness valuation, and a certified path when one exists
        #[arg(long)]
        witness: bool,
        /// Write the tableau automaton to this file
        #[arg(long)]
        emit_automaton: Option<PathBuf>,
    },
    /// Compute the minimal valuations meeting the threshold
    Minset {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = ">0")]
        threshold: String,
        #[arg(long)]
        emit_automaton: Option<PathBuf>,
    },
    /// Decide whether one valuation meets the threshold
    Member {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = ">0")]
        threshold: String,
        /// Comma-separated `x=n` pairs
        #[arg(long)]
        valuation: String,
    },
    /// Exact probability of `F[<=x] a` under one valuation
    Prob {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        valuation: String,
    },
    /// Independent evaluators used for testing
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Count sampled prefixes that certify the formula
    Sample {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "")]
        valuation: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 32)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the formula on a lasso word `stem | loop`
    LassoEval {
        #[command(flatten)]
        formula: FormulaArg,
        /// Letters such as `{a,b} {} | {a}`
        #[arg(long)]
        word: String,
        #[arg(long, default_value = "")]
        valuation: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Build the chain and formula of the satisfiability reduction
    Gen3sat {
        /// CNF in DIMACS text
        #[arg(long)]
        cnf: PathBuf,
        /// Write the generated chain here
        #[arg(long)]
        out_chain: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_formula(f: &FormulaArg) -> CliResult<Formula> {
    let text = match (&f.formula, &f.formula_file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => read(p)?,
        (None, None) => return Err(Error::Usage("a formula is required".into()).into()),
    };
    Ok(normalize(text.trim())?)
}

fn load_chain(path: &Path) -> CliResult<MarkovChain> {
    Ok(parse_chain(&read(path)?)?)
}

fn load_problem(input: &Input) -> CliResult<Problem> {
    let mc = load_chain(&input.chain)?;
    let phi = load_formula(&input.formula)?;
    Ok(Problem::new(mc, phi, input.max_product_nodes)?)
}

fn header(p: &Problem, threshold: Option<&Threshold>, r: &mut Report) {
    r.push("formula", &p.phi);
    r.push("fragment", p.fragment);
    r.push("states", p.mc.len());
    if let Some(t) = threshold {
        r.push("threshold", t);
    }
}

fn emit_automaton(p: &Problem, path: &Option<PathBuf>, r: &mut Report) -> CliResult<()> {
    if let Some(path) = path {
        let checker = Checker::new(&p.phi)?;
        write(path, &checker.automaton().emit())?;
        r.push("automaton-file", path.display());
    }
    Ok(())
}

fn execute(command: Command) -> CliResult<(Report, Format)> {
    let mut r = Report::default();
    let format = match command {
        Command::Check {
            input,
            threshold,
            witness,
            emit_automaton: emit,
        } => {
            let p = load_problem(&input)?;
            let t: Threshold = threshold.parse()?;
            header(&p, Some(&t), &mut r);
            emit_automaton(&p, &emit, &mut r)?;
            engine::check(&p, &t, witness, &mut r)?;
            input.format
        }
        Command::Minset {
            input,
            threshold,
            emit_automaton: emit,
        } => {
            let p = load_problem(&input)?;
            let t: Threshold = threshold.parse()?;
            header(&p, Some(&t), &mut r);
            emit_automaton(&p, &emit, &mut r)?;
            engine::minset(&p, &t, &mut r)?;
            input.format
        }
        Command::Member {
            input,
            threshold,
            valuation,
        } => {
            let p = load_problem(&input)?;
            let t: Threshold = threshold.parse()?;
            let v: Valuation = valuation.parse()?;
            header(&p, Some(&t), &mut r);
            r.push("valuation", &v);
            engine::member(&p, &t, &v, &mut r)?;
            input.format
        }
        Command::Prob { input, valuation } => {
            let p = load_problem(&input)?;
            let v: Valuation = valuation.parse()?;
            header(&p, None, &mut r);
            r.push("valuation", &v);
            engine::prob(&p, &v, &mut r)?;
            input.format
        }
        Command::Oracle(o) => oracle(o, &mut r)?,
    };
    Ok((r, format))
}

fn oracle(command: OracleCommand, r: &mut Report) -> CliResult<Format> {
    match command {
        OracleCommand::Sample {
            input,
            valuation,
            samples,
            horizon,
            seed,
        } => {
            let mc = load_chain(&input.chain)?;
            let phi = load_formula(&input.formula)?;
            let v: Valuation = valuation.parse()?;
            let s = sample_lower_bound(&mc, &phi, &v, samples, horizon, seed)?;
            r.push("formula", &phi);
            r.push("valuation", &v);
            r.push("algorithm", s.algorithm);
            r.push("seed", s.seed);
            r.push("samples", s.samples);
            r.push("horizon", horizon);
            r.push("certified-true", s.certified_true);
            r.push("certified-false", s.certified_false);
            r.push("unknown", s.unknown);
            r.push("fraction", s.fraction());
            Ok(input.format)
        }
        OracleCommand::LassoEval {
            formula,
            word,
            valuation,
            format,
        } => {
            let phi = load_formula(&formula)?;
            let v: Valuation = valuation.parse()?;
            let w: LassoWord = word.parse()?;
            let holds = eval_lasso(&w, &substitute(&phi, &v)?)?;
            r.push("formula", &phi);
            r.push("valuation", &v);
            r.push("word", &w);
            r.push("holds", holds);
            Ok(format)
        }
        OracleCommand::Gen3sat {
            cnf,
            out_chain,
            format,
        } => {
            let cnf = parse_dimacs(&read(&cnf)?)?;
            let (mc, phi) = gen_3sat_fixture(&cnf)?;
            if let Some(path) = &out_chain {
                write(path, &mc.to_string())?;
                r.push("chain-file", path.display());
            }
            r.push("variables", cnf.vars);
            r.push("clauses", cnf.clauses.len());
            r.push("states", mc.len());
            r.push("formula", &phi);
            r.push("satisfiable", brute_force_sat(&cnf));
            let empty = emptiness_pos_fx(&mc, &phi)?;
            r.push("verdict", if empty { "empty" } else { "nonempty" });
            Ok(format)
        }
    }
}

/// Runs one invocation and returns its exit status. Reports go to `out`,
/// diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli.command) {
        Ok((report, format)) => match out.write_all(report.render(format).as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(_) => EXIT_IO,
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
