//! The `mclex` command line.
//!
//! Exit status: 0 for success or a positive answer, 1 for a negative answer,
//! 2 for bad input.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::closure::{check_tableau, decide, ClosureError, TableauProof};
use crate::degeneracy::{degeneracy_class, Degeneracy};
use crate::enumeration::{self, loc_anchors, ClassifyOptions, EnumerationError, PosetGraph};
use crate::localization::{is_admissible, loc_equal, localize, LocalizationError};
use crate::matrix::{parse_matrix, ExtendedMatrix, ParseError};
use crate::oracle::{run_battery, Level};

#[derive(Debug, Parser)]
#[command(name = "mclex", version, about = "Matrix conditions on finitely complete pointed categories")]
pub struct Cli {
    /// Log more (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the left matrices imply the right ones.
    Decide {
        #[arg(long, required = true, num_args = 1..)]
        lhs: Vec<String>,
        #[arg(long, required = true, num_args = 1..)]
        rhs: Vec<String>,
        /// Write the tableau (or tableaux) as JSON.
        #[arg(long)]
        tableau: Option<PathBuf>,
    },
    /// Print `trivial`, `anti-trivial` or `proper`.
    Degeneracy { matrix: String },
    /// Canonical representative of a matrix's class inside a window.
    Canonical {
        matrix: String,
        /// Window rows (default: the matrix's own).
        #[arg(short = 'n', long)]
        rows: Option<usize>,
        #[arg(short = 'm', long)]
        cols: Option<usize>,
        #[arg(short = 'k', long)]
        vars: Option<usize>,
    },
    /// Print the localized matrix.
    Loc { matrix: String },
    /// Whether two matrices have the same localization.
    LocEqual { a: String, b: String },
    /// Whether `(matrix, x_var)` is admissible.
    Admissible { matrix: String, var: u8 },
    /// Enumerate the class poset of a window.
    Enumerate {
        n: usize,
        m: usize,
        k: usize,
        /// Keep only classes localizing to this anchor (a name or a matrix).
        #[arg(long)]
        subposet_loc: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, env = "MCLEX_CHECKPOINT_DIR")]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        workers: u16,
        /// Skip the order and the localization groups.
        #[arg(long)]
        counts_only: bool,
        /// Print every class.
        #[arg(long)]
        list: bool,
    },
    /// Replay a tableau file.
    CheckTableau { file: PathBuf },
    /// Run the brute-force agreement checks.
    OracleCheck {
        #[arg(long, value_enum, default_value_t = OracleLevel::Fast)]
        level: OracleLevel,
    },
    /// Print the term equations of a matrix.
    MaltsevCondition { matrix: String },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleLevel {
    Fast,
    Full,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}: {err}")]
    Parse { origin: String, err: ParseError },
    #[error("{0}: {1}")]
    Read(String, std::io::Error),
    #[error("unknown anchor `{0}`")]
    Anchor(String),
    #[error("tableau file: {0}")]
    Tableau(String),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Localization(#[from] LocalizationError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// Reads a matrix given inline or as a path to a file holding one.
pub fn load_matrix(arg: &str) -> Result<ExtendedMatrix, CliError> {
    let path = Path::new(arg);
    let (origin, text) = if !arg.contains('|') && path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| CliError::Read(arg.to_string(), e))?;
        (arg.to_string(), text)
    } else {
        ("<inline>".to_string(), arg.to_string())
    };
    parse_matrix(&text).map_err(|err| CliError::Parse { origin, err })
}

fn load_all(args: &[String]) -> Result<Vec<ExtendedMatrix>, CliError> {
    args.iter().map(|a| load_matrix(a)).collect()
}

fn anchor(arg: &str) -> Result<ExtendedMatrix, CliError> {
    let wanted = arg.to_lowercase().replace(['\'', '-', '_'], "");
    for (name, m) in loc_anchors() {
        if name.to_lowercase().replace('\'', "") == wanted {
            return Ok(m);
        }
    }
    if arg.contains('|') || Path::new(arg).is_file() {
        return load_matrix(arg);
    }
    Err(CliError::Anchor(arg.to_string()))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Read(path.display().to_string(), e))
}

fn verdict(yes: bool) -> Result<i32, CliError> {
    println!("{yes}");
    Ok(if yes { 0 } else { 1 })
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Decide { lhs, rhs, tableau } => {
            let s = load_all(&lhs)?;
            let u = load_all(&rhs)?;
            let d = decide(&s, &u)?;
            if let Some(path) = tableau {
                match (d.trivial_hypothesis, d.tableaux.as_slice()) {
                    (Some(i), _) => {
                        eprintln!("hypothesis {} is trivial; no tableau written", i + 1);
                    }
                    (None, [one]) => write(&path, &(one.to_json() + "\n"))?,
                    (None, many) => {
                        let json = serde_json::to_string_pretty(many).expect("tableaux serialize");
                        write(&path, &(json + "\n"))?;
                    }
                }
            }
            verdict(d.verdict)
        }
        Command::Degeneracy { matrix } => {
            let kind = match degeneracy_class(&load_matrix(&matrix)?) {
                Degeneracy::Trivial => "trivial",
                Degeneracy::AntiTrivial => "anti-trivial",
                Degeneracy::Proper => "proper",
            };
            println!("{kind}");
            Ok(0)
        }
        Command::Canonical { matrix, rows, cols, vars } => {
            let m = load_matrix(&matrix)?;
            let c = enumeration::canonical(
                &m,
                rows.unwrap_or(m.rows()),
                cols.unwrap_or(m.left_cols()),
                vars.unwrap_or(m.max_var()),
            )?;
            println!("{c}");
            Ok(0)
        }
        Command::Loc { matrix } => {
            println!("{}", localize(&load_matrix(&matrix)?).result);
            Ok(0)
        }
        Command::LocEqual { a, b } => verdict(loc_equal(&load_matrix(&a)?, &load_matrix(&b)?)?),
        Command::Admissible { matrix, var } => match is_admissible(&load_matrix(&matrix)?, var)? {
            Some(w) => {
                println!("admissible: x{var} fills left column {} wherever it occurs", w.column + 1);
                Ok(0)
            }
            None => {
                println!("not admissible");
                Ok(1)
            }
        },
        Command::Enumerate {
            n,
            m,
            k,
            subposet_loc,
            out,
            dot,
            checkpoint,
            workers,
            counts_only,
            list,
        } => {
            let target = subposet_loc.as_deref().map(anchor).transpose()?;
            let mut opts = if counts_only {
                ClassifyOptions::counts_only()
            } else {
                ClassifyOptions::default()
            };
            opts.workers = workers as usize;
            opts.checkpoint = checkpoint;
            let mut g = enumeration::enumerate(n, m, k, &opts)?;
            if let Some(a) = &target {
                g = enumeration::subposet_by_localization(&g, a)?;
            }
            report(&g, list);
            if let Some(p) = out {
                write(&p, &g.to_json())?;
            }
            if let Some(p) = dot {
                write(&p, &g.to_dot())?;
            }
            Ok(0)
        }
        Command::CheckTableau { file } => {
            let text = fs::read_to_string(&file).map_err(|e| CliError::Read(file.display().to_string(), e))?;
            let proofs: Vec<TableauProof> = match TableauProof::from_json(&text) {
                Ok(p) => vec![p],
                Err(_) => serde_json::from_str(&text).map_err(|e| CliError::Tableau(e.to_string()))?,
            };
            let mut ok = !proofs.is_empty();
            for (i, p) in proofs.iter().enumerate() {
                match check_tableau(p) {
                    Ok(()) => println!("tableau {}: accepted ({} steps)", i + 1, p.steps.len()),
                    Err(e) => {
                        println!("tableau {}: rejected: {e}", i + 1);
                        ok = false;
                    }
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::OracleCheck { level } => {
            let level = match level {
                OracleLevel::Fast => Level::Fast,
                OracleLevel::Full => Level::Full,
            };
            let mut all = true;
            for c in run_battery(level) {
                let status = if c.passed() { "ok" } else { "FAILED" };
                println!("{status:6} {} ({} cases)", c.name, c.cases);
                for f in &c.failures {
                    println!("         {f}");
                }
                all &= c.passed();
            }
            Ok(if all { 0 } else { 1 })
        }
        Command::MaltsevCondition { matrix } => {
            println!("{}", load_matrix(&matrix)?.maltsev_condition());
            Ok(0)
        }
    }
}

fn report(g: &PosetGraph, list: bool) {
    let p = &g.params;
    println!(
        "Mclex*[{},{},{}]: {} classes, {} reduced edges, {} groups",
        p.rows,
        p.cols,
        p.vars,
        g.classes.len(),
        g.reduced_edges.len(),
        g.groups.len()
    );
    if list {
        for (i, c) in g.classes.iter().enumerate() {
            println!("c{i}\t{}\t{}", c.canonical, c.members);
        }
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
