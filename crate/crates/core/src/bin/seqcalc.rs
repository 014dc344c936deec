//! `seqcalc`: decide sequents, run corpora, re-check emitted artifacts.
//!
//! Exit codes: 0 derivable (or valid, or all corpus lines fine), 1 underivable
//! (or invalid, or a corpus mismatch), 2 unknown, 3 parse error, 4 mode
//! error, 5 any other error, including bad arguments. `SEQCALC_JOBS` sets the corpus thread count.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use seqcalc::driver::{self, Emit, Format, ModeChoice, RunConfig};
use seqcalc::export::{check_document, CheckOutcome, Document};
use seqcalc::{parse_sequent, Error, Result};

#[derive(Parser)]
#[command(name = "seqcalc", version, about = "Intuitionistic sequent prover with countermodels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one sequent, given inline or as a file.
    Prove {
        #[command(flatten)]
        run: RunArgs,
        input: String,
    },
    /// Decide every line of a corpus file and check expectations.
    Corpus {
        #[command(flatten)]
        run: RunArgs,
        /// Cross-check propositional lines against a brute-force search over
        /// models with at most three worlds.
        #[arg(long)]
        oracle: bool,
        path: PathBuf,
    },
    /// Re-verify a derivation or countermodel JSON document.
    Check { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Prop,
    Positive,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    Derivation,
    Model,
    Stats,
    Truncation,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Dot,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Stage budget for full mode.
    #[arg(long)]
    depth: Option<usize>,
    /// Also run the low-memory decider and report its space use.
    #[arg(long)]
    pspace: bool,
    #[arg(long, value_enum, default_value = "all")]
    emit: EmitArg,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            mode: match self.mode {
                ModeArg::Auto => ModeChoice::Auto,
                ModeArg::Prop => ModeChoice::Prop,
                ModeArg::Positive => ModeChoice::Positive,
                ModeArg::Full => ModeChoice::Full,
            },
            depth: self.depth,
            pspace: self.pspace,
            emit: match self.emit {
                EmitArg::Derivation => Emit::Derivation,
                EmitArg::Model => Emit::Model,
                EmitArg::Stats => Emit::Stats,
                EmitArg::Truncation => Emit::Truncation,
                EmitArg::All => Emit::All,
            },
            format: match self.format {
                FormatArg::Text => Format::Text,
                FormatArg::Json => Format::Json,
                FormatArg::Dot => Format::Dot,
            },
        }
    }
}

fn read_input(input: &str) -> Result<String> {
    let p = Path::new(input);
    if !input.contains("|-") && p.is_file() {
        let text = std::fs::read_to_string(p)?;
        let line = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty());
        return line.map(str::to_string).ok_or_else(|| Error::Parse { pos: 0, msg: format!("{input}: no sequent") });
    }
    Ok(input.to_string())
}

fn prove(run: &RunArgs, input: &str) -> Result<i32> {
    let cfg = run.config();
    let s = parse_sequent(&read_input(input)?)?;
    let o = driver::decide_sequent(&s, &cfg)?;
    print!("{}", driver::render(&o, &cfg)?);
    Ok(driver::exit_code(&o.verdict))
}

fn corpus(run: &RunArgs, oracle: bool, path: &Path) -> Result<i32> {
    let cfg = run.config();
    let lines = driver::parse_corpus(&std::fs::read_to_string(path)?)?;
    let results = driver::run_corpus(&lines, &cfg, oracle);
    let mut bad = 0;
    for r in &results {
        let verdict = match &r.outcome {
            Ok(o) => o.verdict.name().to_string(),
            Err(e) => format!("error: {e}"),
        };
        let mut notes = Vec::new();
        if !r.matches_expectation() {
            notes.push("MISMATCH".to_string());
        }
        if let Err(e) = &r.verified {
            notes.push(format!("VERIFY FAILED: {e}"));
        }
        if r.oracle_agrees == Some(false) {
            notes.push("ORACLE DISAGREES".to_string());
        }
        if let Ok(o) = &r.outcome {
            if let Some(p) = o.pspace {
                notes.push(format!("size={} max_record_size={}", o.stats.sequent_size, p.max_record_size));
            }
        }
        if !r.ok() {
            bad += 1;
        }
        println!("{:>4}  {:<11} {}  {}", r.line, verdict, r.text, notes.join("  "));
    }
    println!("{} lines, {} ok, {} failed", results.len(), results.len() - bad, bad);
    Ok(i32::from(bad > 0))
}

fn check(path: &Path) -> Result<i32> {
    let text = std::fs::read_to_string(path)?;
    let docs: Vec<Document> = match serde_json::from_str::<serde_json::Value>(&text).map_err(|e| Error::Schema(e.to_string()))? {
        serde_json::Value::Array(items) => items.iter().map(|v| Document::from_json(&v.to_string())).collect::<Result<_>>()?,
        _ => vec![Document::from_json(&text)?],
    };
    let mut checked = 0;
    for d in &docs {
        match check_document(d)? {
            CheckOutcome::Valid => checked += 1,
            CheckOutcome::Invalid(why) => {
                println!("invalid: {why}");
                return Ok(1);
            }
            CheckOutcome::NotCheckable => {}
        }
    }
    if checked == 0 {
        return Err(Error::Schema("no derivation or countermodel to check".into()));
    }
    println!("valid");
    Ok(0)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("SEQCALC_JOBS").ok().and_then(|v| v.parse().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 5 } else { 0 });
        }
    };
    let res = match &cli.command {
        Command::Prove { run, input } => prove(run, input),
        Command::Corpus { run, oracle, path } => corpus(run, *oracle, path),
        Command::Check { path } => check(path),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("seqcalc: {e}");
            ExitCode::from(driver::error_code(&e) as u8)
        }
    }
}
