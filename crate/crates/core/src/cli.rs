//! The `cfworlds` command line.
//!
//! Exit status: 0 evaluation completed, 1 false verdict under
//! `--fail-on-false`, 2 usage or parse error, 3 validation error, 4 `paper`
//! on the built-in experiment disagreed with the expected table.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::dsl::{self, ExperimentError};
use crate::logic::{self, Verdict};
use crate::qcalc::{format_probability, Outcome};
use crate::spacetime::{classify, RegionKind};
use crate::worlds::{self, Experiment, SettingLabel, Wing, WorldFilter};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_PAPER_DEVIATION: i32 = 4;

/// Expected `paper` table for the built-in experiment.
pub const REFERENCE_TABLE: [(&str, bool); 4] = [
    ("SF_L2", true),
    ("SB_L2", false),
    ("SF_L1", false),
    ("SB_L1", false),
];

#[derive(Debug, Parser)]
#[command(
    name = "cfworlds",
    version,
    about = "Evaluate region-parameterized counterfactuals about a two-wing quantum experiment"
)]
struct Cli {
    /// Emit one JSON object on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 1 when a checked statement is false.
    #[arg(long, global = true)]
    fail_on_false: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one statement against an experiment.
    Check {
        experiment: PathBuf,
        /// Statement text; read from stdin when absent or `-`.
        statement: Option<String>,
        /// Use a built-in statement (SF_L2, SB_L2, SF_L1, SB_L1).
        #[arg(long, value_name = "NAME", conflicts_with = "statement")]
        canonical: Option<String>,
    },
    /// Evaluate the four built-in statements.
    Paper {
        /// Defaults to the compiled-in reference experiment.
        experiment: Option<PathBuf>,
    },
    /// List the possible worlds.
    Worlds {
        experiment: PathBuf,
        /// One or two setting labels, e.g. `L2,R1`.
        #[arg(long, value_delimiter = ',', value_parser = parse_setting)]
        settings: Vec<SettingLabel>,
        /// Outcome constraint such as `L=+` or `R=-`; repeatable.
        #[arg(long, value_parser = parse_outcome_filter)]
        outcome: Vec<(Wing, Outcome)>,
    },
    /// Check the six Hardy probability conditions.
    Verify { experiment: PathBuf },
    /// Causal relations and region membership of the measurement events.
    Causal { experiment: PathBuf },
}

fn parse_setting(s: &str) -> Result<SettingLabel, String> {
    s.trim().parse()
}

fn parse_outcome_filter(s: &str) -> Result<(Wing, Outcome), String> {
    let (wing, outcome) = s
        .split_once('=')
        .ok_or_else(|| format!("expected WING=OUTCOME, got `{s}`"))?;
    let wing = match wing.trim() {
        "L" => Wing::Left,
        "R" => Wing::Right,
        other => return Err(format!("unknown wing `{other}`")),
    };
    let outcome = match outcome.trim() {
        "+" => Outcome::Plus,
        "-" => Outcome::Minus,
        other => return Err(format!("unknown outcome `{other}`")),
    };
    Ok((wing, outcome))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn load_experiment(path: &Path) -> Result<Experiment, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    dsl::parse_experiment(&text).map_err(|e| Failure {
        code: match e {
            ExperimentError::Parse(_) => EXIT_USAGE,
            ExperimentError::Validation(_) => EXIT_VALIDATION,
        },
        message: format!("{}: {e}", path.display()),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn verdict_json(statement: &str, verdict: &Verdict) -> serde_json::Value {
    let counterexamples: Vec<_> = verdict
        .counterexamples
        .iter()
        .map(|c| {
            json!({
                "actual": c.actual,
                "hypothetical": c.hypothetical,
                "probability": c.hypothetical.probability,
                "constraints": c.constraints,
            })
        })
        .collect();
    json!({
        "statement": statement,
        "value": verdict.value,
        "vacuous": verdict.vacuous,
        "checked_worlds": verdict.checked,
        "counterexamples": counterexamples,
    })
}

fn verdict_word(value: bool) -> &'static str {
    if value {
        "TRUE"
    } else {
        "FALSE"
    }
}

fn cmd_check(
    cli: &Cli,
    experiment: &Path,
    statement: Option<&str>,
    canonical: Option<&str>,
    stdin: &mut dyn Read,
) -> Result<(String, i32), Failure> {
    let exp = load_experiment(experiment)?;
    let stmt = match (canonical, statement) {
        (Some(name), _) => logic::canonical_statement(name).ok_or_else(|| {
            Failure::usage(format!(
                "unknown canonical statement `{name}` (known: {})",
                logic::CANONICAL_NAMES.join(", ")
            ))
        })?,
        (None, text) => {
            let owned;
            let text = match text {
                Some(t) if t != "-" => t,
                _ => {
                    let mut buf = String::new();
                    stdin
                        .read_to_string(&mut buf)
                        .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
                    owned = buf;
                    owned.trim()
                }
            };
            dsl::parse_statement(text).map_err(|e| Failure::usage(format!("statement: {e}")))?
        }
    };
    let verdict = logic::evaluate(&stmt, &exp).map_err(|e| Failure::usage(e.to_string()))?;
    let printed = dsl::print_statement(&stmt);
    let out = if cli.json {
        to_json(&verdict_json(&printed, &verdict))
    } else {
        let mut out = String::new();
        writeln!(out, "statement: {printed}").unwrap();
        out.push_str(&logic::explain(&verdict));
        writeln!(
            out,
            "vacuous: {}",
            if verdict.vacuous { "yes" } else { "no" }
        )
        .unwrap();
        out
    };
    let code = if cli.fail_on_false && !verdict.value {
        EXIT_FALSE
    } else {
        EXIT_OK
    };
    Ok((out, code))
}

fn cmd_paper(cli: &Cli, experiment: Option<&Path>) -> Result<(String, i32), Failure> {
    let exp = match experiment {
        Some(path) => load_experiment(path)?,
        None => worlds::build_reference_hardy_experiment(),
    };
    let rows: Vec<(&str, String, Verdict)> = logic::canonical_statements()
        .into_iter()
        .map(|(name, stmt)| {
            let verdict =
                logic::evaluate(&stmt, &exp).expect("built-in statements are well-formed");
            (name, dsl::print_statement(&stmt), verdict)
        })
        .collect();
    let matches_reference = rows
        .iter()
        .zip(REFERENCE_TABLE.iter())
        .all(|((name, _, v), (ref_name, ref_value))| name == ref_name && v.value == *ref_value);
    let out = if cli.json {
        let statements: Vec<_> = rows
            .iter()
            .map(|(name, text, v)| {
                json!({"name": name, "statement": text, "value": v.value, "vacuous": v.vacuous})
            })
            .collect();
        to_json(&json!({
            "experiment": experiment.map_or("built-in reference".to_string(), |p| p.display().to_string()),
            "statements": statements,
            "matches_reference": matches_reference,
        }))
    } else {
        let mut out = String::new();
        for (name, _, v) in &rows {
            write!(out, "{name:<6} {}", verdict_word(v.value)).unwrap();
            if v.vacuous {
                out.push_str(" (vacuous)");
            }
            out.push('\n');
        }
        out
    };
    let mut code = EXIT_OK;
    if experiment.is_none() && !matches_reference {
        code = EXIT_PAPER_DEVIATION;
    } else if cli.fail_on_false && rows.iter().any(|(_, _, v)| !v.value) {
        code = EXIT_FALSE;
    }
    Ok((out, code))
}

fn cmd_worlds(
    cli: &Cli,
    experiment: &Path,
    settings: &[SettingLabel],
    outcomes: &[(Wing, Outcome)],
) -> Result<(String, i32), Failure> {
    let exp = load_experiment(experiment)?;
    let mut filter = WorldFilter::default();
    for &label in settings {
        let slot = &mut filter.settings[label.wing().index()];
        if slot.is_some_and(|prev| prev != label) {
            return Err(Failure::usage(format!(
                "--settings names two settings for wing {}",
                label.wing()
            )));
        }
        *slot = Some(label);
    }
    for &(wing, outcome) in outcomes {
        filter = filter.with_outcome(wing, outcome);
    }
    let ws = worlds::enumerate_possible_worlds(&exp, Some(&filter));
    let out = if cli.json {
        to_json(&json!({ "worlds": ws }))
    } else {
        let mut out = String::new();
        for w in &ws {
            writeln!(out, "{w}  {}", format_probability(w.probability)).unwrap();
        }
        out
    };
    Ok((out, EXIT_OK))
}

fn cmd_verify(cli: &Cli, experiment: &Path) -> Result<(String, i32), Failure> {
    let exp = load_experiment(experiment)?;
    let report = worlds::verify_hardy_conditions(&exp);
    let out = if cli.json {
        to_json(&json!({
            "epsilon": report.epsilon,
            "checks": report.checks.iter().map(|c| json!({
                "id": c.id,
                "condition": c.describe(),
                "probability": c.probability,
                "passed": c.passed,
            })).collect::<Vec<_>>(),
            "all_passed": report.all_passed(),
        }))
    } else {
        let mut out = String::new();
        for c in &report.checks {
            writeln!(
                out,
                "({:<3}) {:<24} p={:<10} {}",
                c.id,
                c.describe(),
                format_probability(c.probability),
                if c.passed { "pass" } else { "FAIL" }
            )
            .unwrap();
        }
        let passed = report.checks.iter().filter(|c| c.passed).count();
        writeln!(out, "{passed}/{} passed", report.checks.len()).unwrap();
        out
    };
    Ok((out, EXIT_OK))
}

fn cmd_causal(cli: &Cli, experiment: &Path) -> Result<(String, i32), Failure> {
    let exp = load_experiment(experiment)?;
    let mut rows = Vec::new();
    for wing in Wing::ALL {
        let apex = wing.other();
        let relation = classify(exp.event(wing), exp.event(apex));
        let rules = exp.region_rules();
        rows.push((
            exp.event(wing).label.clone(),
            exp.event(apex).label.clone(),
            relation,
            rules.contains(relation, RegionKind::F),
            rules.contains(relation, RegionKind::B),
        ));
    }
    let out = if cli.json {
        to_json(&json!({
            "relations": rows.iter().map(|(e, a, rel, f, b)| json!({
                "event": e,
                "apex": a,
                "relation": rel,
                "in_F": f,
                "in_B": b,
            })).collect::<Vec<_>>(),
        }))
    } else {
        let mut out = String::new();
        for (e, a, rel, f, b) in &rows {
            let member = |yes: bool| if yes { "∈" } else { "∉" };
            writeln!(
                out,
                "{e} relative to {a}: {rel}; {e} {} F({a}); {e} {} B({a})",
                member(*f),
                member(*b)
            )
            .unwrap();
        }
        out
    };
    Ok((out, EXIT_OK))
}

/// Runs one invocation; returns the process exit status.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Check {
            experiment,
            statement,
            canonical,
        } => cmd_check(
            &cli,
            experiment,
            statement.as_deref(),
            canonical.as_deref(),
            stdin,
        ),
        Command::Paper { experiment } => cmd_paper(&cli, experiment.as_deref()),
        Command::Worlds {
            experiment,
            settings,
            outcome,
        } => cmd_worlds(&cli, experiment, settings, outcome),
        Command::Verify { experiment } => cmd_verify(&cli, experiment),
        Command::Causal { experiment } => cmd_causal(&cli, experiment),
    };
    match result {
        Ok((out, code)) => {
            if let Err(e) = stdout.write_all(out.as_bytes()) {
                let _ = writeln!(stderr, "cfworlds: {e}");
                return EXIT_USAGE;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "cfworlds: {}", f.message);
            f.code
        }
    }
}
