//! Running the deciders on sequents and corpora, with self-verification.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::export::{self, Artifact, Document, Stats};
use crate::kripke;
use crate::parser::parse_sequent;
use crate::pspace::{decide_low_memory, PspaceStats};
use crate::rules;
use crate::search::{build_search_tree_with, verdict_of, SearchLimits, SearchMode, Verdict};
use crate::sequent::Sequent;
use crate::staged::{search_staged_with_tree, StagedTree, DEFAULT_MAX_NODES};

/// Depth used for first-order sequents outside the positive fragment when
/// none is given.
pub const DEFAULT_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ModeChoice {
    #[default]
    Auto,
    Prop,
    Positive,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Prop,
    Positive,
    Full(usize),
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Prop => "prop",
            Mode::Positive => "positive",
            Mode::Full(_) => "full",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Full(k) => write!(f, "full(depth {k})"),
            m => f.write_str(m.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Emit {
    Derivation,
    Model,
    Stats,
    Truncation,
    #[default]
    All,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    Text,
    #[default]
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: ModeChoice,
    pub depth: Option<usize>,
    pub pspace: bool,
    pub emit: Emit,
    pub format: Format,
}

impl RunConfig {
    /// Picks the mode for `s`: explicit choices are checked against the
    /// sequent, `Auto` takes the smallest fragment containing it.
    pub fn resolve(&self, s: &Sequent) -> Result<Mode> {
        let mode = match self.mode {
            ModeChoice::Prop => {
                SearchMode::Prop.admits(s)?;
                Mode::Prop
            }
            ModeChoice::Positive => {
                SearchMode::Positive.admits(s)?;
                Mode::Positive
            }
            ModeChoice::Full => Mode::Full(self.depth.ok_or_else(|| Error::Mode("--mode full needs --depth".into()))?),
            ModeChoice::Auto if s.is_propositional() => Mode::Prop,
            ModeChoice::Auto if s.is_positive() => Mode::Positive,
            ModeChoice::Auto => Mode::Full(self.depth.unwrap_or(DEFAULT_DEPTH)),
        };
        if self.depth.is_some() && !matches!(mode, Mode::Full(_)) {
            return Err(Error::Mode(format!("--depth only applies to full mode, not {}", mode.name())));
        }
        if self.pspace && matches!(mode, Mode::Full(_)) {
            return Err(Error::Mode("--pspace needs prop or positive mode".into()));
        }
        if self.emit == Emit::Truncation && !matches!(mode, Mode::Full(_)) {
            return Err(Error::Mode("truncation dumps exist only in full mode".into()));
        }
        Ok(mode)
    }
}

/// A decided sequent and everything measured on the way.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub sequent: Sequent,
    pub mode: Mode,
    pub verdict: Verdict,
    pub stats: Stats,
    pub pspace: Option<PspaceStats>,
    pub staged: Option<StagedTree>,
}

fn verdict_value(v: &Verdict) -> Option<u8> {
    match v {
        Verdict::Derivable(_) => Some(1),
        Verdict::Underivable(_) => Some(0),
        Verdict::Unknown => None,
    }
}

/// Decides `s` under `cfg`.
pub fn decide_sequent(s: &Sequent, cfg: &RunConfig) -> Result<Outcome> {
    let mode = cfg.resolve(s)?;
    let mut stats = Stats { mode: mode.name().into(), sequent_size: s.size(), ..Stats::default() };
    let mut staged = None;
    let verdict = match mode {
        Mode::Prop | Mode::Positive => {
            let sm = if mode == Mode::Prop { SearchMode::Prop } else { SearchMode::Positive };
            match build_search_tree_with(s, sm, SearchLimits::for_mode(sm)) {
                Ok(tree) => {
                    stats.search_steps = Some(tree.steps());
                    verdict_of(&tree)?
                }
                Err(Error::Limit(_)) => Verdict::Unknown,
                Err(e) => return Err(e),
            }
        }
        Mode::Full(k) => {
            let (v, tree) = search_staged_with_tree(s, k, DEFAULT_MAX_NODES)?;
            stats.stages = Some(tree.stage);
            stats.staged_nodes = Some(tree.len());
            staged = Some(tree);
            v
        }
    };
    let mut pspace = None;
    if cfg.pspace {
        let sm = if mode == Mode::Prop { SearchMode::Prop } else { SearchMode::Positive };
        let (value, p) = decide_low_memory(s, sm)?;
        if let Some(v) = verdict_value(&verdict) {
            if v != value {
                return Err(Error::Check(format!("low-memory verdict {value} disagrees with tree mode {v}")));
            }
        }
        stats = stats.with_pspace(&p);
        pspace = Some(p);
    }
    match &verdict {
        Verdict::Derivable(d) => stats.derivation_size = Some(d.size()),
        Verdict::Underivable(c) => stats.worlds = Some(c.model.len()),
        Verdict::Unknown => {}
    }
    stats.verdict = verdict.name().into();
    Ok(Outcome { sequent: s.clone(), mode, verdict, stats, pspace, staged })
}

/// Re-checks the artifact of a verdict: the rule checker for derivations,
/// model validation and falsification for countermodels.
pub fn verify(o: &Outcome) -> std::result::Result<(), String> {
    match &o.verdict {
        Verdict::Derivable(d) => rules::check_derivation(d).map_err(|e| e.to_string()),
        Verdict::Underivable(c) => {
            c.model.validate().map_err(|e| e.to_string())?;
            match kripke::falsifies(&c.model, c.model.root, &o.sequent) {
                Ok(true) => Ok(()),
                Ok(false) => Err("the model does not falsify the sequent".into()),
                Err(e) => Err(e.to_string()),
            }
        }
        Verdict::Unknown => Ok(()),
    }
}

/// Process exit code of a verdict: 0 derivable, 1 underivable, 2 unknown.
pub fn exit_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Derivable(_) => 0,
        Verdict::Underivable(_) => 1,
        Verdict::Unknown => 2,
    }
}

/// Exit code of an error: 3 for parse errors, 4 for mode errors, 5 otherwise.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => 3,
        Error::Mode(_) => 4,
        _ => 5,
    }
}

/// The documents `cfg.emit` asks for.
pub fn documents(o: &Outcome, cfg: &RunConfig) -> Vec<Document> {
    let mut out = Vec::new();
    let want = |e: Emit| cfg.emit == e || cfg.emit == Emit::All;
    match &o.verdict {
        Verdict::Derivable(d) if want(Emit::Derivation) => out.push(export::derivation_document(d)),
        Verdict::Underivable(c) if want(Emit::Model) => out.push(export::countermodel_document(&c.model, &o.sequent)),
        _ => {}
    }
    if want(Emit::Stats) {
        out.push(Document::new(Artifact::Stats(o.stats.clone())));
    }
    if cfg.emit == Emit::Truncation {
        if let Some(t) = &o.staged {
            out.push(export::truncation_document(t));
        }
    }
    out
}

/// Renders the outcome. Artifacts are re-verified first; a failing check is
/// an error, never an emitted artifact.
pub fn render(o: &Outcome, cfg: &RunConfig) -> Result<String> {
    verify(o).map_err(Error::Check)?;
    Ok(match cfg.format {
        Format::Json => {
            let docs = documents(o, cfg);
            if docs.len() == 1 {
                docs[0].to_json() + "\n"
            } else {
                serde_json::to_string_pretty(&docs)? + "\n"
            }
        }
        Format::Dot => match &o.verdict {
            Verdict::Derivable(d) => export::derivation_dot(d),
            Verdict::Underivable(c) => export::model_dot(&c.model),
            Verdict::Unknown => String::new(),
        },
        Format::Text => {
            let mut s = format!("{} [{}]\n", o.verdict.name(), o.mode);
            match &o.verdict {
                Verdict::Derivable(d) if matches!(cfg.emit, Emit::Derivation | Emit::All) => s.push_str(&d.render()),
                Verdict::Underivable(c) if matches!(cfg.emit, Emit::Model | Emit::All) => {
                    for (i, w) in c.model.worlds.iter().enumerate() {
                        let atoms: Vec<String> = w.atoms.iter().map(|a| a.to_string()).collect();
                        let above: Vec<String> = c.model.above(i).iter().filter(|&&j| j != i).map(|j| format!("w{j}")).collect();
                        s.push_str(&format!("w{i}: {{{}}} reaches [{}]\n", atoms.join(", "), above.join(", ")));
                    }
                }
                _ => {}
            }
            if matches!(cfg.emit, Emit::Stats | Emit::All) {
                s.push_str(&serde_json::to_string(&o.stats)?);
                s.push('\n');
            }
            s
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Derivable,
    Underivable,
    /// Expected to be left undecided by bounded search.
    Hard,
}

impl Expectation {
    pub fn matches(self, v: &Verdict) -> bool {
        matches!(
            (self, v),
            (Expectation::Derivable, Verdict::Derivable(_)) | (Expectation::Underivable, Verdict::Underivable(_)) | (Expectation::Hard, Verdict::Unknown)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusLine {
    pub line: usize,
    pub text: String,
    pub sequent: Sequent,
    pub expected: Option<Expectation>,
}

/// Parses a corpus: one sequent per line, `#` starts a comment, and a
/// comment `# expected: derivable|underivable|hard` sets the expectation.
/// Errors name the offending line.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusLine>> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let (seq, comment) = l.split_once('#').unwrap_or((l, ""));
        let seq = seq.trim();
        if seq.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Parse { pos: 0, msg: format!("line {}: {msg}", i + 1) };
        let expected = match comment.trim().strip_prefix("expected:").map(str::trim) {
            None => None,
            Some("derivable") => Some(Expectation::Derivable),
            Some("underivable") => Some(Expectation::Underivable),
            Some("hard") => Some(Expectation::Hard),
            Some(e) => return Err(bad(format!("unknown expectation {e:?}"))),
        };
        let sequent = parse_sequent(seq).map_err(|e| bad(e.to_string()))?;
        out.push(CorpusLine { line: i + 1, text: seq.to_string(), sequent, expected });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CorpusResult {
    pub line: usize,
    pub text: String,
    pub outcome: std::result::Result<Outcome, String>,
    pub verified: std::result::Result<(), String>,
    /// `Some(false)` when a small countermodel exists for a derivable line.
    pub oracle_agrees: Option<bool>,
    pub expected: Option<Expectation>,
    pub elapsed: Duration,
}

impl CorpusResult {
    pub fn matches_expectation(&self) -> bool {
        match (&self.outcome, self.expected) {
            (Ok(o), Some(e)) => e.matches(&o.verdict),
            (Ok(_), None) => true,
            (Err(_), _) => false,
        }
    }

    pub fn ok(&self) -> bool {
        self.matches_expectation() && self.verified.is_ok() && self.oracle_agrees != Some(false)
    }
}

/// Decides every line in parallel; results come back in line order.
/// `oracle` enables the brute-force countermodel search with up to three
/// worlds on propositional lines.
pub fn run_corpus(lines: &[CorpusLine], cfg: &RunConfig, oracle: bool) -> Vec<CorpusResult> {
    lines
        .par_iter()
        .map(|l| {
            let start = Instant::now();
            let outcome = decide_sequent(&l.sequent, cfg).map_err(|e| e.to_string());
            let elapsed = start.elapsed();
            let verified = outcome.as_ref().map_or(Ok(()), verify);
            let oracle_agrees = match &outcome {
                Ok(o) if oracle && o.mode == Mode::Prop => {
                    let found = kripke::brute_force_countermodel(&l.sequent, 3).is_some();
                    Some(!(found && o.verdict.is_derivable()))
                }
                _ => None,
            };
            CorpusResult { line: l.line, text: l.text.clone(), outcome, verified, oracle_agrees, expected: l.expected, elapsed }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: ModeChoice, depth: Option<usize>) -> RunConfig {
        RunConfig { mode, depth, ..RunConfig::default() }
    }

    #[test]
    fn auto_mode_picks_the_smallest_fragment() {
        let auto = RunConfig::default();
        assert_eq!(auto.resolve(&parse_sequent("|- p -> p").unwrap()).unwrap(), Mode::Prop);
        assert_eq!(auto.resolve(&parse_sequent("P(a0) |- forall x. P(x)").unwrap()).unwrap(), Mode::Positive);
        assert_eq!(auto.resolve(&parse_sequent("forall x. P(x) |- exists x. P(x)").unwrap()).unwrap(), Mode::Full(DEFAULT_DEPTH));
    }

    #[test]
    fn invalid_configurations() {
        let s = parse_sequent("|- p").unwrap();
        assert!(matches!(cfg(ModeChoice::Full, None).resolve(&s), Err(Error::Mode(_))));
        assert!(matches!(cfg(ModeChoice::Prop, Some(3)).resolve(&s), Err(Error::Mode(_))));
        let pspace_full = RunConfig { pspace: true, ..cfg(ModeChoice::Full, Some(3)) };
        assert!(matches!(pspace_full.resolve(&s), Err(Error::Mode(_))));
        assert!(matches!(cfg(ModeChoice::Prop, None).resolve(&parse_sequent("|- P(a0)").unwrap()), Err(Error::Mode(_))));
    }

    #[test]
    fn exit_codes() {
        let run = |t: &str, c: RunConfig| exit_code(&decide_sequent(&parse_sequent(t).unwrap(), &c).unwrap().verdict);
        assert_eq!(run("|- p -> p", cfg(ModeChoice::Prop, None)), 0);
        assert_eq!(run("|- p | ~p", cfg(ModeChoice::Prop, None)), 1);
        assert_eq!(run("|- ~~(forall x. (P(x) | ~P(x)))", cfg(ModeChoice::Full, Some(3))), 2);
        assert_eq!(error_code(&parse_sequent("|- p -").unwrap_err()), 3);
    }

    #[test]
    fn corpus_lines_and_errors() {
        let lines = parse_corpus("# header\n|- p -> p  # expected: derivable\n\n|- p | ~p # expected: derivable\n").unwrap();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].line, 4);
        let res = run_corpus(&lines, &RunConfig::default(), true);
        assert!(res[0].ok());
        assert!(!res[1].ok());
        let err = parse_corpus("|- p\n|- (p\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(parse_corpus("|- p # expected: maybe").is_err());
    }

    #[test]
    fn pspace_stats_are_reported() {
        let c = RunConfig { pspace: true, ..RunConfig::default() };
        let o = decide_sequent(&parse_sequent("|- ~~(p | ~p)").unwrap(), &c).unwrap();
        assert!(o.stats.max_record_size.is_some());
        assert!(render(&o, &c).unwrap().contains("max_record_size"));
    }
}
