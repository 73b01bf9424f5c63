//! Command-line front end for the `irta` library.
//!
//! Exit codes: 0 affirmative, 1 negative (with a report or counterexample
//! on standard output), 2 usage or input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use irta::{
    check_deterministic, check_integer_reset, determinize, equivalent, fuzz_equivalence, includes, is_empty,
    parse_automaton, parse_timed_word_with, print_automaton, to_dot, validate_wellformed, Automaton, Emptiness,
    Equivalence, Error, FuzzParams, Inclusion, Monotonicity, Product, Simulator, TimedWord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "irta", version, about = "Integer reset timed automata toolkit")]
pub struct Cli {
    /// Reject equal adjacent timestamps in timed words.
    #[arg(long, global = true)]
    strict_mono: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check well-formedness and the integer-reset property.
    Check { file: PathBuf },
    /// Determinize an IRTA.
    Det {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide membership of a timed word such as `b@1 c@3/2`.
    Member {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        word: Vec<String>,
    },
    /// Decide language emptiness; prints a witness when nonempty.
    Empty { file: PathBuf },
    /// Decide L(A) ⊆ L(B); prints a counterexample when it fails.
    Include { a: PathBuf, b: PathBuf },
    /// Decide L(A) = L(B).
    Equiv { a: PathBuf, b: PathBuf },
    /// Compare two automata on random timed words.
    Fuzz {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Defaults to the larger maximal constant plus 4.
        #[arg(long)]
        max_time: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        denoms: Vec<u64>,
    },
    /// Print a Graphviz rendering.
    Dot { file: PathBuf },
}

/// An error already formatted for the user.
struct Failure(String);

impl Failure {
    fn at(path: &Path, e: impl std::fmt::Display) -> Failure {
        Failure(format!("{}: {e}", path.display()))
    }
}

fn load(path: &Path) -> Result<Automaton, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::at(path, e))?;
    parse_automaton(&text).map_err(|e| Failure::at(path, e))
}

/// Loads and requires a well-formed automaton.
fn load_valid(path: &Path) -> Result<Automaton, Failure> {
    let a = load(path)?;
    let report = validate_wellformed(&a);
    if !report.is_ok() {
        return Err(Failure::at(path, report));
    }
    Ok(a)
}

fn lib_err(e: Error) -> Failure {
    Failure(e.to_string())
}

fn edge_text(a: &Automaton, i: usize) -> String {
    let e = &a.edges()[i];
    let mut s = format!("edge {} -> {} : {} [{}]", e.src, e.dst, e.letter, e.guard.display(a.clock()));
    if e.reset {
        s.push_str(&format!(" reset {}", a.clock()));
    }
    s
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let mode = if cli.strict_mono {
        Monotonicity::Strict
    } else {
        Monotonicity::Weak
    };
    let symbolic_only = |name: &str| -> Result<(), Failure> {
        if cli.strict_mono {
            Err(Failure(format!(
                "--strict-mono is not supported by `{name}`: symbolic checks use weakly monotone time"
            )))
        } else {
            Ok(())
        }
    };
    let w = |out: &mut dyn Write, s: String| -> Result<(), Failure> {
        writeln!(out, "{s}").map_err(|e| Failure(e.to_string()))
    };

    match cli.command {
        Command::Check { file } => {
            let a = load(&file)?;
            let report = validate_wellformed(&a);
            if !report.is_ok() {
                for issue in &report.issues {
                    w(out, format!("malformed: {issue}"))?;
                }
                return Ok(EXIT_NEGATIVE);
            }
            let irta = check_integer_reset(&a);
            if !irta.is_ok() {
                for &i in &irta.offending {
                    w(out, format!("non-integer reset (edge {i}): {}", edge_text(&a, i)))?;
                }
                return Ok(EXIT_NEGATIVE);
            }
            let det = if check_deterministic(&a).is_ok() { "yes" } else { "no" };
            w(
                out,
                format!("ok: {} is a well-formed IRTA (K = {}, deterministic: {det})", a.name(), a.max_const()),
            )?;
            Ok(EXIT_OK)
        }
        Command::Det { file, output } => {
            let a = load_valid(&file)?;
            let d = determinize(&a).map_err(|e| Failure::at(&file, e))?;
            let mut text = String::new();
            for (loc, state) in d.automaton.locations().iter().zip(&d.states) {
                text.push_str(&format!("# {loc} = {}\n", state.display(d.k)));
            }
            text.push_str(&print_automaton(&d.automaton));
            match output {
                Some(path) => fs::write(&path, text).map_err(|e| Failure::at(&path, e))?,
                None => out.write_all(text.as_bytes()).map_err(|e| Failure(e.to_string()))?,
            }
            Ok(EXIT_OK)
        }
        Command::Member { file, word } => {
            let a = load_valid(&file)?;
            let word = parse_timed_word_with(&word.join(" "), mode).map_err(|e| Failure(format!("word: {e}")))?;
            let sim = Simulator::new(&a).map_err(lib_err)?.with_monotonicity(mode);
            if sim.member(&word).map_err(|e| Failure(format!("word: {e}")))? {
                w(out, "accepted".into())?;
                Ok(EXIT_OK)
            } else {
                w(out, "rejected".into())?;
                Ok(EXIT_NEGATIVE)
            }
        }
        Command::Empty { file } => {
            symbolic_only("empty")?;
            let a = load_valid(&file)?;
            match is_empty(&Product::single(&a)).map_err(|e| Failure::at(&file, e))? {
                Emptiness::Empty => {
                    w(out, "empty".into())?;
                    Ok(EXIT_OK)
                }
                Emptiness::NonEmpty { witness } => {
                    w(out, "nonempty".into())?;
                    w(out, format!("witness: {}", show_word(&witness)))?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Include { a, b } => {
            symbolic_only("include")?;
            let (aa, bb) = (load_valid(&a)?, load_valid(&b)?);
            match includes(&aa, &bb).map_err(lib_err)? {
                Inclusion::Holds => {
                    w(out, "included".into())?;
                    Ok(EXIT_OK)
                }
                Inclusion::Fails { counterexample } => {
                    w(out, "not included".into())?;
                    w(out, format!("counterexample: {}", show_word(&counterexample)))?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Equiv { a, b } => {
            symbolic_only("equiv")?;
            let (aa, bb) = (load_valid(&a)?, load_valid(&b)?);
            match equivalent(&aa, &bb).map_err(lib_err)? {
                Equivalence::Equivalent => {
                    w(out, "equivalent".into())?;
                    Ok(EXIT_OK)
                }
                Equivalence::Distinguished { word, accepted_by_first } => {
                    let only = if accepted_by_first { &a } else { &b };
                    w(out, "not equivalent".into())?;
                    w(out, format!("counterexample: {}", show_word(&word)))?;
                    w(out, format!("accepted only by {}", only.display()))?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Fuzz {
            a,
            b,
            count,
            seed,
            max_len,
            max_time,
            denoms,
        } => {
            let (aa, bb) = (load_valid(&a)?, load_valid(&b)?);
            if denoms.is_empty() || denoms.contains(&0) {
                return Err(Failure("--denoms must be a list of positive integers".into()));
            }
            let defaults = FuzzParams::for_automata(&aa, &bb);
            let params = FuzzParams {
                count,
                seed,
                max_len,
                max_time: max_time.unwrap_or(defaults.max_time),
                denominators: denoms,
                monotonicity: mode,
            };
            let report = fuzz_equivalence(&aa, &bb, &params).map_err(lib_err)?;
            write!(out, "{report}").map_err(|e| Failure(e.to_string()))?;
            Ok(if report.is_clean() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Dot { file } => {
            let a = load_valid(&file)?;
            out.write_all(to_dot(&a).as_bytes()).map_err(|e| Failure(e.to_string()))?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn show_word(w: &TimedWord) -> String {
    if w.is_empty() {
        "(empty word)".to_string()
    } else {
        w.to_string()
    }
}
