//! Line-oriented `.exp` experiment files.
//!
//! ```text
//! # comments run to end of line
//! state = (re, im) (re, im) (re, im) (re, im)      # |00> |01> |10> |11>
//! setting L1 : plus = (re, im) (re, im) ; minus = (re, im) (re, im)
//! event L = (t, x)
//! epsilon = 1e-9
//! fix_unswitched_settings = true
//! include_null_boundary = true                       # optional
//! ```
//!
//! The wing of a setting is the first letter of its label. Outcome `+` is the
//! `plus` vector.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use super::{ParseError, SourceSpan};
use crate::qcalc::{self, SingleParticleBasis, StateVector};
use crate::spacetime::{Event, RegionRules};
use crate::worlds::{Experiment, SettingLabel, ValidationError, Wing};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid experiment: {0}")]
    Validation(#[from] ValidationError),
}

/// Cursor over one line, reporting spans against the whole file.
struct LineCursor<'a> {
    text: &'a str,
    line: &'a str,
    base: usize,
    pos: usize,
}

impl<'a> LineCursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.line[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn span(&self, start: usize, end: usize) -> SourceSpan {
        SourceSpan::locate(self.text, self.base + start, self.base + end)
    }

    fn error_here(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let end = self.line[self.pos..]
            .chars()
            .next()
            .map_or(self.pos, |c| self.pos + c.len_utf8());
        ParseError::new(message, self.span(self.pos, end)).expecting(expected)
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.line.len()
    }

    fn expect_char(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.line[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            let what = format!("`{c}`");
            Err(self.error_here("unexpected input", &[what.as_str()]))
        }
    }

    /// A run of characters that can form a word or a number.
    fn word(&mut self) -> (usize, usize) {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.line[self.pos..].chars().next() {
            if c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | '+') {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        (start, self.pos)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let save = self.pos;
        let (start, end) = self.word();
        if &self.line[start..end] == kw {
            Ok(())
        } else {
            self.pos = save;
            self.skip_ws();
            let what = format!("`{kw}`");
            Err(self.error_here("unexpected input", &[what.as_str()]))
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let (start, end) = self.word();
        let raw = &self.line[start..end];
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(ParseError::new(
                if raw.is_empty() {
                    "missing number".to_string()
                } else {
                    format!("`{raw}` is not a finite number")
                },
                self.span(start, end.max(start)),
            )
            .expecting(&["decimal number"])),
        }
    }

    fn boolean(&mut self) -> Result<bool, ParseError> {
        let (start, end) = self.word();
        match &self.line[start..end] {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(ParseError::new(
                format!("`{other}` is not a boolean"),
                self.span(start, end),
            )
            .expecting(&["true", "false"])),
        }
    }

    fn complex(&mut self) -> Result<Complex64, ParseError> {
        self.expect_char('(')?;
        let re = self.number()?;
        self.expect_char(',')?;
        let im = self.number()?;
        self.expect_char(')')?;
        Ok(Complex64::new(re, im))
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error_here("unexpected trailing input", &["end of line"]))
        }
    }
}

#[derive(Default)]
struct Draft {
    state: Option<StateVector>,
    settings: BTreeMap<SettingLabel, SingleParticleBasis>,
    events: [Option<Event>; 2],
    epsilon: Option<f64>,
    fix_unswitched_settings: Option<bool>,
    include_null_boundary: Option<bool>,
}

fn parse_line(cur: &mut LineCursor<'_>, draft: &mut Draft) -> Result<(), ExperimentError> {
    let (start, end) = cur.word();
    let key = &cur.line[start..end];
    let key_span = cur.span(start, end);
    let duplicate = |what: &str| -> ExperimentError {
        ParseError::new(format!("`{what}` given more than once"), key_span).into()
    };
    match key {
        "state" => {
            cur.expect_char('=')?;
            let mut amps = [Complex64::new(0.0, 0.0); 4];
            for a in &mut amps {
                *a = cur.complex()?;
            }
            cur.finish()?;
            if draft.state.is_some() {
                return Err(duplicate("state"));
            }
            draft.state = Some(StateVector::new(amps));
        }
        "setting" => {
            let (ls, le) = cur.word();
            let label = cur.line[ls..le].parse::<SettingLabel>().map_err(|msg| {
                ParseError::new(msg, cur.span(ls, le)).expecting(&["L1", "L2", "R1", "R2"])
            })?;
            cur.expect_char(':')?;
            cur.keyword("plus")?;
            cur.expect_char('=')?;
            let plus = [cur.complex()?, cur.complex()?];
            cur.expect_char(';')?;
            cur.keyword("minus")?;
            cur.expect_char('=')?;
            let minus = [cur.complex()?, cur.complex()?];
            cur.finish()?;
            if draft.settings.contains_key(&label) {
                return Err(ValidationError::DuplicateSetting(label).into());
            }
            draft.settings.insert(
                label,
                SingleParticleBasis {
                    plus_vec: plus,
                    minus_vec: minus,
                },
            );
        }
        "event" => {
            let (ls, le) = cur.word();
            let name = &cur.line[ls..le];
            let wing = match name {
                "L" => Wing::Left,
                "R" => Wing::Right,
                _ => {
                    return Err(ParseError::new(
                        format!("unknown event label `{name}`"),
                        cur.span(ls, le),
                    )
                    .expecting(&["L", "R"])
                    .into())
                }
            };
            cur.expect_char('=')?;
            cur.expect_char('(')?;
            let t = cur.number()?;
            cur.expect_char(',')?;
            let x = cur.number()?;
            cur.expect_char(')')?;
            cur.finish()?;
            let slot = &mut draft.events[wing.index()];
            if slot.is_some() {
                return Err(ValidationError::DuplicateEvent(name.to_string()).into());
            }
            *slot = Some(Event::new(name, t, x));
        }
        "epsilon" => {
            cur.expect_char('=')?;
            let v = cur.number()?;
            cur.finish()?;
            if draft.epsilon.replace(v).is_some() {
                return Err(duplicate("epsilon"));
            }
        }
        "fix_unswitched_settings" | "include_null_boundary" => {
            cur.expect_char('=')?;
            let v = cur.boolean()?;
            cur.finish()?;
            let slot = if key == "fix_unswitched_settings" {
                &mut draft.fix_unswitched_settings
            } else {
                &mut draft.include_null_boundary
            };
            if slot.replace(v).is_some() {
                return Err(duplicate(key));
            }
        }
        _ => {
            return Err(ParseError::new(
                if key.is_empty() {
                    "expected a key".to_string()
                } else {
                    format!("unknown key `{key}`")
                },
                if key.is_empty() {
                    cur.error_here("", &[]).span
                } else {
                    key_span
                },
            )
            .expecting(&[
                "state",
                "setting",
                "event",
                "epsilon",
                "fix_unswitched_settings",
                "include_null_boundary",
            ])
            .into())
        }
    }
    Ok(())
}

/// Parses and validates an experiment. Syntax problems are
/// [`ExperimentError::Parse`]; well-formed but invalid content is
/// [`ExperimentError::Validation`].
pub fn parse_experiment(text: &str) -> Result<Experiment, ExperimentError> {
    let mut draft = Draft::default();
    let mut base = 0;
    for raw in text.split_inclusive('\n') {
        let content = raw.trim_end_matches(['\n', '\r']);
        let content = content.find('#').map_or(content, |i| &content[..i]);
        let mut cur = LineCursor {
            text,
            line: content,
            base,
            pos: 0,
        };
        base += raw.len();
        if cur.at_end() {
            continue;
        }
        parse_line(&mut cur, &mut draft)?;
    }

    let state = draft.state.ok_or(ValidationError::Missing("state"))?;
    let [left, right] = draft.events;
    let left = left.ok_or(ValidationError::MissingEvent(Wing::Left))?;
    let right = right.ok_or(ValidationError::MissingEvent(Wing::Right))?;
    Ok(Experiment::new(
        state,
        draft.settings,
        [left, right],
        draft.epsilon.unwrap_or(qcalc::DEFAULT_EPSILON),
        draft.fix_unswitched_settings.unwrap_or(true),
        RegionRules {
            include_null_boundary: draft.include_null_boundary.unwrap_or(true),
        },
    )?)
}

fn num(v: f64) -> String {
    // avoid printing `-0`
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn complex(c: &Complex64) -> String {
    format!("({}, {})", num(c.re), num(c.im))
}

/// Serializes an experiment in the form [`parse_experiment`] reads back
/// exactly.
pub fn print_experiment(exp: &Experiment) -> String {
    let mut out = String::new();
    let amps: Vec<String> = exp.state().amps.iter().map(complex).collect();
    writeln!(out, "state = {}", amps.join(" ")).unwrap();
    for (label, basis) in exp.settings() {
        writeln!(
            out,
            "setting {} : plus = {} {} ; minus = {} {}",
            label,
            complex(&basis.plus_vec[0]),
            complex(&basis.plus_vec[1]),
            complex(&basis.minus_vec[0]),
            complex(&basis.minus_vec[1]),
        )
        .unwrap();
    }
    for wing in Wing::ALL {
        let e = exp.event(wing);
        writeln!(out, "event {} = ({}, {})", e.label, num(e.t), num(e.x)).unwrap();
    }
    writeln!(out, "epsilon = {:e}", exp.epsilon()).unwrap();
    writeln!(
        out,
        "fix_unswitched_settings = {}",
        exp.fix_unswitched_settings()
    )
    .unwrap();
    if !exp.region_rules().include_null_boundary {
        writeln!(out, "include_null_boundary = false").unwrap();
    }
    out
}
