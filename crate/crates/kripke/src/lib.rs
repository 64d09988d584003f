//! Command-line front end for `kripke-core`, with the JSON and DOT formats
//! it reads and writes.
//!
//! Exit codes: 0 theorem (or a valid derivation, or agreement), 1 non-theorem
//! (or an invalid derivation, or a discrepancy), 2 undetermined, 3 usage or
//! input error.

pub mod dot;
pub mod json;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kripke_core::canonical::{oracle_verdict_within, CanonicalError, OracleVerdict};
use kripke_core::semantics::{correspondence_failure, MAX_ENUMERATED_WORLDS};
use kripke_core::{
    check_derivation, decide, parse, Formula, FrameProperty, KripkeModel, Logic,
    SearchOutcome, DEFAULT_MAX_STEPS,
};

use json::{DerivationFile, ModelJson, OutcomeJson};

pub const EXIT_THEOREM: u8 = 0;
pub const EXIT_NON_THEOREM: u8 = 1;
pub const EXIT_UNDETERMINED: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "kripke", version, about = "Decide formulas of K, T, K4 and GL")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide a formula; prints the verdict, and in json the proof or countermodel.
    Decide(Query),
    /// Search for a countermodel to a formula.
    Countermodel(Query),
    /// Decide a formula through the standard model of maximal consistent sets.
    Oracle(Query),
    /// Check a Hilbert derivation read from a JSON file.
    CheckDerivation(CheckArgs),
    /// Compare schema validity with frame properties on all small frames.
    Correspond(CorrespondArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = LogicArg::K, ignore_case = true)]
    pub logic: LogicArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Rule applications allowed to the search.
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS, value_parser = positive)]
    pub max_steps: usize,
}

#[derive(Args, Debug)]
pub struct Query {
    /// Formula text, or `@path` to read it from a file.
    pub formula: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Derivation file; a leading `@` is accepted.
    pub file: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CorrespondArgs {
    /// D, T, 4, 5, B, Lob, or a formula (text or `@path`).
    pub schema: String,
    /// Frame properties; defaults to the named schema's own.
    #[arg(long = "property", value_delimiter = ',')]
    pub properties: Vec<String>,
    /// Largest frame size enumerated.
    #[arg(long, default_value_t = 3, value_parser = positive)]
    pub max_worlds: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LogicArg {
    K,
    T,
    K4,
    Gl,
}

impl From<LogicArg> for Logic {
    fn from(l: LogicArg) -> Logic {
        match l {
            LogicArg::K => Logic::K,
            LogicArg::T => Logic::T,
            LogicArg::K4 => Logic::K4,
            LogicArg::Gl => Logic::GL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

/// An error reported on stderr with exit code 3.
#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

fn read_arg(text: &str) -> Result<String, Usage> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(PathBuf::from(path))
            .map(|s| s.trim().to_string())
            .map_err(|e| Usage(format!("cannot read {path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

fn read_formula(text: &str) -> Result<Formula, Usage> {
    let text = read_arg(text)?;
    parse(&text).map_err(|e| Usage(format!("cannot parse formula: {e}")))
}

fn reject_dot(format: Format, command: &str) -> Result<(), Usage> {
    if format == Format::Dot {
        return Err(Usage(format!("--format dot is only available for countermodel, not {command}")));
    }
    Ok(())
}

fn model_text(m: &KripkeModel, root: u32) -> String {
    let mut s = String::new();
    let worlds: Vec<String> = m.worlds().iter().map(|w| format!("w{w}")).collect();
    let edges: Vec<String> = m.rel().iter().map(|(a, b)| format!("w{a} -> w{b}")).collect();
    writeln!(s, "countermodel, refuting the goal at w{root}:").unwrap();
    writeln!(s, "  worlds: {}", worlds.join(" ")).unwrap();
    writeln!(s, "  edges: {}", if edges.is_empty() { "none".to_string() } else { edges.join(", ") }).unwrap();
    for &w in m.worlds() {
        writeln!(s, "  w{w}: {}", m.atoms_at(w).join(" ")).unwrap();
    }
    s
}

fn exit_for(out: &SearchOutcome) -> u8 {
    match out {
        SearchOutcome::Theorem(_) => EXIT_THEOREM,
        SearchOutcome::NonTheorem { .. } => EXIT_NON_THEOREM,
        SearchOutcome::Undetermined { .. } => EXIT_UNDETERMINED,
    }
}

fn cmd_decide(q: &Query, countermodel: bool, out: &mut String) -> Result<u8, Usage> {
    if !countermodel {
        reject_dot(q.common.format, "decide")?;
    }
    let goal = read_formula(&q.formula)?;
    let l = Logic::from(q.common.logic);
    let result = decide(l, &goal, q.common.max_steps);
    match q.common.format {
        Format::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&OutcomeJson::new(l, &goal, &result))?)?;
        }
        Format::Dot => match &result {
            SearchOutcome::NonTheorem { model, world, .. } => out.push_str(&dot::render(model, *world)),
            SearchOutcome::Theorem(_) => writeln!(out, "// Theorem of {l}: no countermodel")?,
            SearchOutcome::Undetermined { steps } => writeln!(out, "// Undetermined after {steps} steps")?,
        },
        Format::Text => match &result {
            SearchOutcome::Theorem(tree) => {
                writeln!(out, "Theorem of {l}")?;
                if !countermodel {
                    writeln!(out, "proof: {} nodes, height {}", tree.nodes.len(), tree.height())?;
                }
            }
            SearchOutcome::NonTheorem { model, world, .. } => {
                writeln!(out, "NonTheorem of {l}")?;
                out.push_str(&model_text(model, *world));
            }
            SearchOutcome::Undetermined { steps } => {
                writeln!(out, "Undetermined in {l} after {steps} steps")?;
            }
        },
    }
    Ok(exit_for(&result))
}

fn cmd_oracle(q: &Query, out: &mut String) -> Result<u8, Usage> {
    reject_dot(q.common.format, "oracle")?;
    let goal = read_formula(&q.formula)?;
    let l = Logic::from(q.common.logic);
    let verdict = match oracle_verdict_within(l, &goal, q.common.max_steps) {
        Ok(v) => v,
        Err(CanonicalError::OracleUndetermined) => {
            writeln!(out, "Undetermined: a consistency query exceeded the step bound")?;
            return Ok(EXIT_UNDETERMINED);
        }
        Err(e) => return Err(Usage(e.to_string())),
    };
    let json = q.common.format == Format::Json;
    match &verdict {
        OracleVerdict::Theorem if json => {
            let v = serde_json::json!({"verdict": "Theorem", "logic": l.name(), "goal": goal.to_string()});
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        OracleVerdict::Theorem => writeln!(out, "Theorem of {l}")?,
        OracleVerdict::NonTheorem { model, world } if json => {
            let v = serde_json::json!({
                "verdict": "NonTheorem",
                "logic": l.name(),
                "goal": goal.to_string(),
                "world": world,
                "countermodel": ModelJson::from(model),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        OracleVerdict::NonTheorem { model, world } => {
            writeln!(out, "NonTheorem of {l}")?;
            out.push_str(&model_text(model, *world));
        }
    }
    Ok(if verdict.is_theorem() { EXIT_THEOREM } else { EXIT_NON_THEOREM })
}

fn cmd_check(c: &CheckArgs, out: &mut String) -> Result<u8, Usage> {
    reject_dot(c.common.format, "check-derivation")?;
    let path = c.file.strip_prefix('@').unwrap_or(&c.file);
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("cannot read {path}: {e}")))?;
    let input = DerivationFile::parse(&text)?;
    let l = Logic::from(c.common.logic);
    let goal = match (&input.goal, input.derivation.conclusion()) {
        (Some(g), _) => g.clone(),
        (None, Some(last)) => last.clone(),
        (None, None) => return Err(Usage("derivation has no steps".into())),
    };
    let result = check_derivation(l, &input.hyps, &input.derivation, &goal);
    if c.common.format == Format::Json {
        let v = match &result {
            Ok(()) => serde_json::json!({"valid": true, "goal": goal.to_string()}),
            Err(e) => serde_json::json!({
                "valid": false,
                "goal": goal.to_string(),
                "path": e.path,
                "error": format!("{:?}", e.kind),
            }),
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        match &result {
            Ok(()) => writeln!(out, "valid {l} derivation of {goal} ({} steps)", input.derivation.total_steps())?,
            Err(e) => writeln!(out, "invalid: {e}")?,
        }
    }
    Ok(if result.is_ok() { 0 } else { 1 })
}

fn named_schema(name: &str) -> Option<(&'static str, &'static [FrameProperty])> {
    use FrameProperty as P;
    Some(match name {
        "D" => ("Box p --> Diam p", &[P::Serial]),
        "T" => ("Box p --> p", &[P::Reflexive]),
        "4" => ("Box p --> Box Box p", &[P::Transitive]),
        "5" => ("Diam p --> Box Diam p", &[P::Euclidean]),
        "B" => ("p --> Box Diam p", &[P::Symmetric]),
        "Lob" | "Löb" => ("Box (Box p --> p) --> Box p", &[P::Transitive, P::ConverseWellFounded]),
        _ => return None,
    })
}

fn cmd_correspond(c: &CorrespondArgs, out: &mut String) -> Result<u8, Usage> {
    reject_dot(c.format, "correspond")?;
    let (schema, defaults) = match named_schema(&c.schema) {
        Some((text, props)) => (parse(text)?, props.to_vec()),
        None => (read_formula(&c.schema)?, Vec::new()),
    };
    let props = if c.properties.is_empty() {
        defaults
    } else {
        c.properties
            .iter()
            .map(|p| FrameProperty::from_name(p).ok_or_else(|| Usage(format!("unknown frame property `{p}`"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    if props.is_empty() {
        return Err(Usage("give at least one --property for a formula schema".into()));
    }
    if c.max_worlds > MAX_ENUMERATED_WORLDS {
        return Err(Usage(format!("--max-worlds is at most {MAX_ENUMERATED_WORLDS}")));
    }
    if schema.atoms().len() * c.max_worlds > 63 {
        return Err(Usage("too many atoms for exhaustive valuations at this frame size".into()));
    }
    let names: Vec<&str> = props.iter().map(|p| p.name()).collect();
    let failure = correspondence_failure(&schema, &props, c.max_worlds);
    if c.format == Format::Json {
        let v = serde_json::json!({
            "schema": schema.to_string(),
            "properties": names,
            "max_worlds": c.max_worlds,
            "agree": failure.is_none(),
            "frame": failure.as_ref().map(|(w, r)| serde_json::json!({
                "worlds": w,
                "rel": r.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
            })),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        match &failure {
            None => writeln!(
                out,
                "{schema} corresponds to {} on all frames up to {} worlds",
                names.join(" + "),
                c.max_worlds
            )?,
            Some((worlds, rel)) => {
                let edges: Vec<String> = rel.iter().map(|(a, b)| format!("w{a} -> w{b}")).collect();
                writeln!(
                    out,
                    "discrepancy: frame with {} worlds and edges [{}]",
                    worlds.len(),
                    edges.join(", ")
                )?;
            }
        }
    }
    Ok(if failure.is_none() { 0 } else { 1 })
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut out = String::new();
    let result = match &cli.command {
        Command::Decide(q) => cmd_decide(q, false, &mut out),
        Command::Countermodel(q) => cmd_decide(q, true, &mut out),
        Command::Oracle(q) => cmd_oracle(q, &mut out),
        Command::CheckDerivation(c) => cmd_check(c, &mut out),
        Command::Correspond(c) => cmd_correspond(c, &mut out),
    };
    match result {
        Ok(code) => {
            let _ = stdout.write_all(out.as_bytes());
            code
        }
        Err(Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (u8, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["kripke"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn verdict_exit_codes() {
        assert_eq!(call(&["decide", "--logic", "T", "Box (Box a --> Diam a)"]).0, 0);
        assert_eq!(call(&["decide", "Box p --> p"]).0, 1);
        assert_eq!(call(&["decide", "--logic", "K4", "Box (Box p --> p) --> Box p", "--max-steps", "2"]).0, 2);
    }

    #[test]
    fn usage_errors_exit_3() {
        for args in [
            &["decide", "p &&"][..],
            &["decide", "--logic", "S5", "p"],
            &["decide", "--max-steps", "0", "p"],
            &["decide", "--format", "dot", "p"],
            &["frobnicate"],
            &["correspond", "4", "--property", "dense"],
            &["correspond", "4", "--max-worlds", "9"],
            &["correspond", "p --> p"],
            &["decide", "@/nonexistent/formula"],
        ] {
            let (code, out, err) = call(args);
            assert_eq!(code, 3, "{args:?}");
            assert!(out.is_empty() && !err.is_empty(), "{args:?}");
        }
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("countermodel"));
    }

    #[test]
    fn lowercase_logic_names() {
        assert_eq!(call(&["decide", "--logic", "gl", "Box (Box p --> p) --> Box p"]).0, 0);
    }

    #[test]
    fn correspond_named_and_custom() {
        let (code, out, _) = call(&["correspond", "T"]);
        assert_eq!(code, 0);
        assert!(out.contains("reflexive"));
        assert_eq!(call(&["correspond", "4", "--property", "reflexive"]).0, 1);
        assert_eq!(call(&["correspond", "Box p --> p", "--property", "reflexive", "--max-worlds", "2"]).0, 0);
        assert_eq!(call(&["correspond", "Lob", "--property", "irreflexive,transitive"]).0, 0);
    }
}
