//! Statements about the experiment and their evaluation by exhaustive
//! quantification over possible worlds.
//!
//! Classical connectives are evaluated at a single world, with `=>` read as
//! material implication. A counterfactual node at actual world `w` holds when
//! `w` fails its `given` clause, or when every possible world `w'` that
//!
//! * measures the switched setting on the switched wing,
//! * agrees with `w` on the chosen region around the switched wing's event,
//! * keeps the other wing's setting (only if `fix_unswitched_settings`),
//!
//! satisfies the consequent. A statement is true when it holds at every
//! possible actual world.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::qcalc::format_probability;
use crate::spacetime::RegionKind;
use crate::worlds::{self, Experiment, Outcome, SettingLabel, Wing, World};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("malformed statement: {0}")]
    MalformedStatement(String),
}

/// The counterfactual replacement of one wing's setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Switch {
    pub wing: Wing,
    pub setting: SettingLabel,
}

impl Switch {
    pub fn to(setting: SettingLabel) -> Switch {
        Switch {
            wing: setting.wing(),
            setting,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Counterfactual {
    pub given: Statement,
    pub switch: Switch,
    pub region: RegionKind,
    pub consequent: Statement,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    /// The setting is the one measured on its wing.
    SettingAtom(SettingLabel),
    /// The outcome on the label's wing. Says nothing about which setting
    /// was measured there.
    OutcomeAtom(SettingLabel, Outcome),
    Not(Box<Statement>),
    And(Box<Statement>, Box<Statement>),
    Or(Box<Statement>, Box<Statement>),
    Implies(Box<Statement>, Box<Statement>),
    Counterfactual(Box<Counterfactual>),
}

impl Statement {
    pub fn setting(label: SettingLabel) -> Statement {
        Statement::SettingAtom(label)
    }

    pub fn outcome(label: SettingLabel, outcome: Outcome) -> Statement {
        Statement::OutcomeAtom(label, outcome)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(s: Statement) -> Statement {
        Statement::Not(Box::new(s))
    }

    pub fn and(a: Statement, b: Statement) -> Statement {
        Statement::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Statement, b: Statement) -> Statement {
        Statement::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Statement, b: Statement) -> Statement {
        Statement::Implies(Box::new(a), Box::new(b))
    }

    pub fn counterfactual(
        given: Statement,
        switch: Switch,
        region: RegionKind,
        consequent: Statement,
    ) -> Statement {
        Statement::Counterfactual(Box::new(Counterfactual {
            given,
            switch,
            region,
            consequent,
        }))
    }

    pub fn contains_counterfactual(&self) -> bool {
        match self {
            Statement::SettingAtom(_) | Statement::OutcomeAtom(..) => false,
            Statement::Not(a) => a.contains_counterfactual(),
            Statement::And(a, b) | Statement::Or(a, b) | Statement::Implies(a, b) => {
                a.contains_counterfactual() || b.contains_counterfactual()
            }
            Statement::Counterfactual(_) => true,
        }
    }

    /// The same statement with every counterfactual's region replaced.
    pub fn with_region(&self, region: RegionKind) -> Statement {
        match self {
            Statement::SettingAtom(_) | Statement::OutcomeAtom(..) => self.clone(),
            Statement::Not(a) => Statement::not(a.with_region(region)),
            Statement::And(a, b) => Statement::and(a.with_region(region), b.with_region(region)),
            Statement::Or(a, b) => Statement::or(a.with_region(region), b.with_region(region)),
            Statement::Implies(a, b) => {
                Statement::implies(a.with_region(region), b.with_region(region))
            }
            Statement::Counterfactual(cf) => Statement::counterfactual(
                cf.given.clone(),
                cf.switch,
                region,
                cf.consequent.clone(),
            ),
        }
    }

    /// Checks the depth-one rule and that each switch names a setting of its
    /// own wing.
    pub fn validate(&self) -> Result<(), LogicError> {
        match self {
            Statement::SettingAtom(_) | Statement::OutcomeAtom(..) => Ok(()),
            Statement::Not(a) => a.validate(),
            Statement::And(a, b) | Statement::Or(a, b) | Statement::Implies(a, b) => {
                a.validate()?;
                b.validate()
            }
            Statement::Counterfactual(cf) => {
                if cf.switch.setting.wing() != cf.switch.wing {
                    return Err(LogicError::MalformedStatement(format!(
                        "switch setting {} does not belong to wing {}",
                        cf.switch.setting, cf.switch.wing
                    )));
                }
                if cf.given.contains_counterfactual() || cf.consequent.contains_counterfactual() {
                    return Err(LogicError::MalformedStatement(
                        "counterfactuals may not be nested".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::print_statement(self))
    }
}

/// The hypothetical worlds a counterfactual quantifies over at `actual`.
pub fn counterfactual_domain(
    exp: &Experiment,
    actual: &World,
    switch: Switch,
    region: RegionKind,
) -> Vec<World> {
    worlds::enumerate_possible_worlds(exp, None)
        .into_iter()
        .filter(|h| h.setting(switch.wing) == switch.setting)
        .filter(|h| worlds::agrees_on(actual, h, switch.wing, region, exp))
        .filter(|h| {
            !exp.fix_unswitched_settings()
                || Wing::ALL
                    .into_iter()
                    .filter(|&w| w != switch.wing)
                    .all(|w| h.setting(w) == actual.setting(w))
        })
        .collect()
}

/// Classical truth at one world; counterfactual nodes quantify over their
/// domain.
pub fn holds_at(stmt: &Statement, world: &World, exp: &Experiment) -> bool {
    match stmt {
        Statement::SettingAtom(label) => world.setting(label.wing()) == *label,
        Statement::OutcomeAtom(label, outcome) => world.outcome(label.wing()) == *outcome,
        Statement::Not(a) => !holds_at(a, world, exp),
        Statement::And(a, b) => holds_at(a, world, exp) && holds_at(b, world, exp),
        Statement::Or(a, b) => holds_at(a, world, exp) || holds_at(b, world, exp),
        Statement::Implies(a, b) => !holds_at(a, world, exp) || holds_at(b, world, exp),
        Statement::Counterfactual(cf) => {
            !holds_at(&cf.given, world, exp)
                || counterfactual_domain(exp, world, cf.switch, cf.region)
                    .iter()
                    .all(|h| holds_at(&cf.consequent, h, exp))
        }
    }
}

/// Agreement constraints under which a hypothetical world was selected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraints {
    pub switch: Switch,
    pub region: RegionKind,
    /// Wings whose setting and outcome must match the actual world.
    pub agreeing_wings: Vec<Wing>,
    /// Whether the unswitched wing's setting was held fixed.
    pub unswitched_setting_fixed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub actual: World,
    /// Equal to `actual` for a violation that involves no counterfactual.
    pub hypothetical: World,
    pub constraints: Option<Constraints>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub value: bool,
    pub vacuous: bool,
    /// Number of possible actual worlds the statement was checked at.
    pub checked: usize,
    pub counterexamples: Vec<Counterexample>,
}

fn refute(stmt: &Statement, world: &World, exp: &Experiment, out: &mut Vec<Counterexample>) {
    match stmt {
        Statement::Implies(_, b) => refute(b, world, exp, out),
        Statement::And(a, b) => {
            for part in [a, b] {
                if !holds_at(part, world, exp) {
                    refute(part, world, exp, out);
                }
            }
        }
        Statement::Or(a, b) => {
            refute(a, world, exp, out);
            refute(b, world, exp, out);
        }
        Statement::Counterfactual(cf) => {
            let constraints = Constraints {
                switch: cf.switch,
                region: cf.region,
                agreeing_wings: worlds::agreement_wings(exp, cf.switch.wing, cf.region),
                unswitched_setting_fixed: exp.fix_unswitched_settings(),
            };
            for h in counterfactual_domain(exp, world, cf.switch, cf.region) {
                if !holds_at(&cf.consequent, &h, exp) {
                    out.push(Counterexample {
                        actual: *world,
                        hypothetical: h,
                        constraints: Some(constraints.clone()),
                    });
                }
            }
        }
        _ => out.push(Counterexample {
            actual: *world,
            hypothetical: *world,
            constraints: None,
        }),
    }
}

/// Antecedents along the right spine of implications, ending at a
/// counterfactual's `given` clause.
fn antecedents(stmt: &Statement) -> Vec<&Statement> {
    match stmt {
        Statement::Implies(a, b) => {
            let mut v = vec![a.as_ref()];
            v.extend(antecedents(b));
            v
        }
        Statement::Counterfactual(cf) => vec![&cf.given],
        _ => Vec::new(),
    }
}

pub fn evaluate(stmt: &Statement, exp: &Experiment) -> Result<Verdict, LogicError> {
    stmt.validate()?;
    let actuals = worlds::enumerate_possible_worlds(exp, None);
    let mut counterexamples = Vec::new();
    for w in &actuals {
        if !holds_at(stmt, w, exp) {
            let before = counterexamples.len();
            refute(stmt, w, exp, &mut counterexamples);
            if counterexamples.len() == before {
                counterexamples.push(Counterexample {
                    actual: *w,
                    hypothetical: *w,
                    constraints: None,
                });
            }
        }
    }
    counterexamples.sort_by(|a, b| {
        (a.actual.sort_key(), a.hypothetical.sort_key())
            .cmp(&(b.actual.sort_key(), b.hypothetical.sort_key()))
    });
    counterexamples.dedup_by(|a, b| {
        a.actual.same_assignment(&b.actual) && a.hypothetical.same_assignment(&b.hypothetical)
    });
    let value = counterexamples.is_empty();
    let spine = antecedents(stmt);
    let vacuous = value
        && !spine.is_empty()
        && !actuals
            .iter()
            .any(|w| spine.iter().all(|a| holds_at(a, w, exp)));
    Ok(Verdict {
        value,
        vacuous,
        checked: actuals.len(),
        counterexamples,
    })
}

pub const CANONICAL_NAMES: [&str; 4] = ["SF_L2", "SB_L2", "SF_L1", "SB_L1"];

fn canonical(left_setting: SettingLabel, region: RegionKind) -> Statement {
    Statement::implies(
        Statement::setting(left_setting),
        Statement::counterfactual(
            Statement::and(
                Statement::setting(SettingLabel::R2),
                Statement::outcome(SettingLabel::R2, Outcome::Plus),
            ),
            Switch::to(SettingLabel::R1),
            region,
            Statement::outcome(SettingLabel::R1, Outcome::Minus),
        ),
    )
}

/// The four built-in statements, in the order SF_L2, SB_L2, SF_L1, SB_L1.
pub fn canonical_statements() -> Vec<(&'static str, Statement)> {
    use RegionKind::{B, F};
    use SettingLabel::{L1, L2};
    vec![
        ("SF_L2", canonical(L2, F)),
        ("SB_L2", canonical(L2, B)),
        ("SF_L1", canonical(L1, F)),
        ("SB_L1", canonical(L1, B)),
    ]
}

pub fn canonical_statement(name: &str) -> Option<Statement> {
    canonical_statements()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| s)
}

fn describe_world(w: &World) -> String {
    format!("{w} (p={})", format_probability(w.probability))
}

fn describe_results(w: &World) -> String {
    Wing::ALL
        .into_iter()
        .map(|wing| format!("result of {} is {}", w.setting(wing), w.outcome(wing)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn describe_constraints(c: &Constraints, actual: &World) -> String {
    let mut parts = Vec::new();
    if c.agreeing_wings.is_empty() {
        parts.push(format!(
            "region {} of the {} measurement constrains no other wing",
            c.region, c.switch.wing
        ));
    } else {
        for w in &c.agreeing_wings {
            parts.push(format!(
                "{} agrees on region {} ({}={})",
                w,
                c.region,
                actual.setting(*w),
                actual.outcome(*w)
            ));
        }
    }
    if c.unswitched_setting_fixed {
        for w in Wing::ALL.into_iter().filter(|&w| w != c.switch.wing) {
            if !c.agreeing_wings.contains(&w) {
                parts.push(format!("{} setting kept at {}", w, actual.setting(w)));
            }
        }
    }
    parts.push(format!(
        "{} switched from {} to {}",
        c.switch.wing,
        actual.setting(c.switch.wing),
        c.switch.setting
    ));
    parts.join("; ")
}

/// Human-readable account of a verdict, one counterexample per block.
pub fn explain(verdict: &Verdict) -> String {
    if verdict.value {
        return if verdict.vacuous {
            "TRUE (vacuously: no possible actual world satisfies the antecedent)\n".to_string()
        } else {
            format!("TRUE ({} actual worlds checked)\n", verdict.checked)
        };
    }
    let mut out = format!(
        "FALSE ({} counterexample{} among {} actual worlds)\n",
        verdict.counterexamples.len(),
        if verdict.counterexamples.len() == 1 {
            ""
        } else {
            "s"
        },
        verdict.checked
    );
    for (i, cx) in verdict.counterexamples.iter().enumerate() {
        out.push_str(&format!(
            "  #{} actual:       {}\n",
            i + 1,
            describe_world(&cx.actual)
        ));
        match &cx.constraints {
            Some(c) => {
                out.push_str(&format!(
                    "     constraints:  {}\n",
                    describe_constraints(c, &cx.actual)
                ));
                out.push_str(&format!(
                    "     hypothetical: {}: {}\n",
                    describe_world(&cx.hypothetical),
                    describe_results(&cx.hypothetical)
                ));
            }
            None => out.push_str("     violates the statement directly\n"),
        }
    }
    out
}
