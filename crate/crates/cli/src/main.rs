//! `ras` — command-line front end for ras-core.
//!
//! Output is structured only: CSV, JSON lines or a single JSON document,
//! always preceded by the resolved run configuration.

mod commands;
mod output;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use ras_core::{Class, Guards};
use serde::Serialize;
use serde_json::{json, Value};

use output::{Format, Writer};

#[derive(Parser, Debug)]
#[command(name = "ras", version, about = "Finite relation-algebra atom structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Suppress the timestamp so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_header: bool,

    /// Worker threads for sampling (results do not depend on it).
    #[arg(long, global = true, env = "RAS_THREADS")]
    threads: Option<usize>,

    /// Lift every size guard and allow the FAS formula beyond its
    /// validated range. A warning is written to the output.
    #[arg(long = "unsafe", global = true)]
    unsafe_mode: bool,

    /// Override one guard, e.g. `--guard enumerate_fas=5`.
    #[arg(long = "guard", global = true, value_name = "KEY=VALUE", value_parser = parse_guard)]
    guards: Vec<(String, u64)>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Closed-form cycle census (c1, c2, c3, c6, Q, P).
    Cycles(CyclesArgs),
    /// Every labelled member of a class.
    Enumerate(EnumerateArgs),
    /// Labelled and unlabelled counts.
    Count(CountArgs),
    /// Uniform labelled samples.
    Sample(SampleArgs),
    /// Probability of a property, exact or sampled.
    Estimate(EstimateArgs),
    /// Extension-axiom failure fractions against their bound.
    Extension(ExtensionArgs),
    /// Evaluate sentences on structures.
    FoEval(FoEvalArgs),
    /// Probability of a sentence across sizes.
    Scan(ScanArgs),
    /// Free amalgams of given or random problems.
    Amalgamate(AmalgamateArgs),
    /// One-point extension realizing a pattern.
    Extend(ExtendArgs),
    /// Witness-saturated structure built in rounds.
    Generic(GenericArgs),
    /// Ultrahomogeneity and weak homogeneity.
    Homog(HomogArgs),
    /// Cross-check formulas and fast paths against the reference oracles.
    Verify(VerifyArgs),
}

/// A list of sizes: `5`, `2..6` (inclusive) or `3,5,7`.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct Sizes(pub Vec<usize>);

fn parse_sizes(text: &str) -> Result<Sizes, String> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("`{s}` is not a size"));
    let mut out = Vec::new();
    for part in text.split(',') {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(a..=b);
        } else {
            out.push(num(part)?);
        }
    }
    Ok(Sizes(out))
}

fn guard_keys() -> Vec<String> {
    match serde_json::to_value(Guards::default()) {
        Ok(Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    }
}

fn parse_guard(text: &str) -> Result<(String, u64), String> {
    let (k, v) = text.split_once('=').ok_or("expected KEY=VALUE")?;
    let keys = guard_keys();
    if !keys.iter().any(|x| x == k) {
        return Err(format!("unknown guard `{k}` (known: {})", keys.join(", ")));
    }
    let v = v.parse().map_err(|_| format!("`{v}` is not a non-negative integer"))?;
    Ok((k.to_string(), v))
}

fn check_predicate(text: &str) -> Result<String, String> {
    text.parse::<ras_core::Predicate>().map_err(|e| e.to_string())?;
    Ok(text.to_string())
}

fn check_sentence(text: &str) -> Result<String, String> {
    ras_core::Sentence::parse(text).map_err(|e| e.to_string())?;
    Ok(text.to_string())
}

#[derive(Args, Debug, Serialize)]
struct CyclesArgs {
    #[arg(long, value_parser = parse_sizes)]
    n: Sizes,
    /// Fixed points of the involution; every valid value when omitted.
    #[arg(long, value_parser = parse_sizes)]
    s: Option<Sizes>,
}

#[derive(Args, Debug, Serialize)]
struct EnumerateArgs {
    /// fas | fsias | fsiase
    #[arg(long, default_value = "fsiase")]
    class: Class,
    #[arg(long)]
    n: usize,
    /// Keep only members with this property.
    #[arg(long, default_value = "all", value_parser = check_predicate)]
    predicate: String,
    /// Stop after this many records.
    #[arg(long)]
    limit: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct CountArgs {
    #[arg(long, default_value = "fsiase")]
    class: Class,
    #[arg(long, value_parser = parse_sizes)]
    n: Sizes,
    #[arg(long, default_value = "all", value_parser = check_predicate)]
    predicate: String,
    /// Also count isomorphism classes (by canonical forms).
    #[arg(long)]
    unlabelled: bool,
    /// Count labelled members by enumeration instead of the closed form.
    #[arg(long)]
    enumerate: bool,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long, default_value = "fsiase")]
    class: Class,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("property").required(true).args(["predicate", "sentence"])))]
struct EstimateArgs {
    /// all | symmetric-integral | rigid | associative
    #[arg(long, value_parser = check_predicate)]
    predicate: Option<String>,
    /// A first-order sentence, e.g. `exists x. (!(x = e) & T(x,x,x))`.
    #[arg(long, value_parser = check_sentence)]
    sentence: Option<String>,
    /// Defaults to the predicate's natural class.
    #[arg(long)]
    class: Option<Class>,
    #[arg(long, value_parser = parse_sizes)]
    n: Sizes,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumerate the whole class.
    #[arg(long, conflicts_with = "sampled")]
    exact: bool,
    /// Sample even when enumeration would be cheap.
    #[arg(long)]
    sampled: bool,
}

#[derive(Args, Debug, Serialize)]
struct ExtensionArgs {
    #[arg(long, value_parser = parse_sizes, default_value = "10,20,40")]
    n: Sizes,
    #[arg(long, value_parser = parse_sizes, default_value = "0,1")]
    m: Sizes,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random patterns for m >= 2 (all patterns for m <= 1).
    #[arg(long, default_value_t = 20)]
    random: usize,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("formulas").required(true).args(["sentence", "sentences"])))]
#[command(group(ArgGroup::new("models").required(true).args(["structures", "n"])))]
struct FoEvalArgs {
    #[arg(long, value_parser = check_sentence)]
    sentence: Vec<String>,
    /// File with one sentence per line (`#` comments).
    #[arg(long)]
    sentences: Option<PathBuf>,
    /// Structure file (JSON, JSON array or JSON lines); `-` for stdin.
    #[arg(long)]
    structures: Option<PathBuf>,
    /// Evaluate on every member of `--class` with this many atoms.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "fsiase")]
    class: Class,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    #[arg(long, value_parser = check_sentence)]
    sentence: String,
    #[arg(long, default_value = "s0")]
    id: String,
    /// Also scan the negation, with id `not:<id>`.
    #[arg(long)]
    negate: bool,
    #[arg(long, value_parser = parse_sizes)]
    n: Sizes,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, conflicts_with = "sampled")]
    exact: bool,
    #[arg(long)]
    sampled: bool,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("problem").required(true).args(["input", "random"])))]
struct AmalgamateArgs {
    /// JSON object with keys S, V, W (e-form structures) and mu, nu
    /// (`{"map": [...]}` embeddings of S).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Solve this many random problems instead.
    #[arg(long)]
    random: Option<u64>,
    #[arg(long, default_value_t = 6)]
    max_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct ExtendArgs {
    /// Structure file; the first structure is extended.
    #[arg(long)]
    structure: PathBuf,
    /// Pattern id, e.g. `m1:c0:ci0:cij1`.
    #[arg(long)]
    pattern: String,
    /// Distinct diversity atoms the witness is placed over; all diversity
    /// atoms when omitted.
    #[arg(long, value_delimiter = ',')]
    over: Option<Vec<usize>>,
}

#[derive(Args, Debug, Serialize)]
struct GenericArgs {
    #[arg(long, default_value_t = 2)]
    rounds: usize,
    #[arg(long, default_value_t = 2)]
    m_max: usize,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("models").required(true).args(["structures", "n"])))]
struct HomogArgs {
    #[arg(long)]
    structures: Option<PathBuf>,
    /// Check every FSIAS_e structure with these sizes.
    #[arg(long, value_parser = parse_sizes)]
    n: Option<Sizes>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    max_n: usize,
}

impl Command {
    fn default_format(&self) -> Format {
        match self {
            Command::Enumerate(_)
            | Command::Sample(_)
            | Command::Amalgamate(_)
            | Command::Extend(_)
            | Command::Generic(_) => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

/// Settings shared by every subcommand.
pub struct Context {
    pub guards: Guards,
    pub allow_unvalidated: bool,
}

#[derive(Debug)]
pub enum Failure {
    Domain(ras_core::Error),
    Io(io::Error),
    /// The run completed but a check it performs did not hold.
    Check(String),
}

impl From<ras_core::Error> for Failure {
    fn from(e: ras_core::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn resolve_guards(cli: &Cli) -> (Guards, Vec<String>) {
    let mut warnings = Vec::new();
    let base = if cli.unsafe_mode {
        warnings.push("--unsafe: size guards lifted and the FAS formula allowed beyond its validated range".into());
        Guards::unlimited()
    } else {
        Guards::default()
    };
    if cli.guards.is_empty() {
        return (base, warnings);
    }
    let mut v = serde_json::to_value(&base).expect("guards serialize");
    for (k, x) in &cli.guards {
        v[k] = json!(x);
        warnings.push(format!("guard override {k}={x}"));
    }
    let guards = serde_json::from_value(v).unwrap_or_else(|e| {
        clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("invalid --guard value: {e}\n")).exit()
    });
    (guards, warnings)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (guards, warnings) = resolve_guards(&cli);
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("ras: cannot set up {t} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let config = json!({
        "run": &cli.command,
        "format": format,
        "threads": cli.threads,
        "unsafe": cli.unsafe_mode,
        "guards": &guards,
    });
    let ctx = Context {
        guards,
        allow_unvalidated: cli.unsafe_mode,
    };

    let stdout = io::stdout().lock();
    let result = Writer::begin(io::BufWriter::new(stdout), format, &config, !cli.no_header, &warnings)
        .map_err(Failure::from)
        .and_then(|mut w| {
            let r = commands::run(&cli.command, &ctx, &mut w);
            // close the document even when a check failed
            let f = w.finish().map_err(Failure::from);
            r.and(f)
        });
    for w in &warnings {
        eprintln!("ras: warning: {w}");
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("ras: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("ras: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("ras: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes("5").unwrap().0, vec![5]);
        assert_eq!(parse_sizes("2..4").unwrap().0, vec![2, 3, 4]);
        assert_eq!(parse_sizes("2..=3,7").unwrap().0, vec![2, 3, 7]);
        assert!(parse_sizes("4..2").is_err());
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn guards() {
        assert_eq!(parse_guard("enumerate_fas=5").unwrap(), ("enumerate_fas".into(), 5));
        assert!(parse_guard("nope=1").is_err());
        assert!(parse_guard("enumerate_fas").is_err());
    }
}
