//! The two-wing experiment, its quantum-possible worlds, and region-based
//! agreement between worlds.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::qcalc::{self, QcalcError, SingleParticleBasis, StateVector};
use crate::spacetime::{Event, RegionKind, RegionRules};

pub use crate::qcalc::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Wing {
    Left,
    Right,
}

impl Wing {
    pub const ALL: [Wing; 2] = [Wing::Left, Wing::Right];

    pub fn index(self) -> usize {
        match self {
            Wing::Left => 0,
            Wing::Right => 1,
        }
    }

    pub fn other(self) -> Wing {
        match self {
            Wing::Left => Wing::Right,
            Wing::Right => Wing::Left,
        }
    }

    /// `L` or `R`.
    pub fn letter(self) -> char {
        match self {
            Wing::Left => 'L',
            Wing::Right => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Wing> {
        match c {
            'L' => Some(Wing::Left),
            'R' => Some(Wing::Right),
            _ => None,
        }
    }

    pub fn settings(self) -> [SettingLabel; 2] {
        match self {
            Wing::Left => [SettingLabel::L1, SettingLabel::L2],
            Wing::Right => [SettingLabel::R1, SettingLabel::R2],
        }
    }
}

impl fmt::Display for Wing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Wing::Left => "Left",
            Wing::Right => "Right",
        })
    }
}

/// Which property is measured; the first letter names the wing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SettingLabel {
    L1,
    L2,
    R1,
    R2,
}

impl SettingLabel {
    pub const ALL: [SettingLabel; 4] = [
        SettingLabel::L1,
        SettingLabel::L2,
        SettingLabel::R1,
        SettingLabel::R2,
    ];

    pub fn wing(self) -> Wing {
        match self {
            SettingLabel::L1 | SettingLabel::L2 => Wing::Left,
            SettingLabel::R1 | SettingLabel::R2 => Wing::Right,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SettingLabel::L1 => "L1",
            SettingLabel::L2 => "L2",
            SettingLabel::R1 => "R1",
            SettingLabel::R2 => "R2",
        }
    }
}

impl fmt::Display for SettingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SettingLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SettingLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown setting label `{s}`"))
    }
}

impl Serialize for SettingLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("invalid state: {0}")]
    State(#[source] QcalcError),
    #[error("invalid basis for setting {label}: {source}")]
    Basis {
        label: SettingLabel,
        #[source]
        source: QcalcError,
    },
    #[error("wing {wing} requires exactly 2 settings, found {found}")]
    SettingCount { wing: Wing, found: usize },
    #[error("setting {0} defined more than once")]
    DuplicateSetting(SettingLabel),
    #[error("event label `{0}` used more than once")]
    DuplicateEvent(String),
    #[error("no event given for wing {0}")]
    MissingEvent(Wing),
    #[error("event coordinates for `{0}` are not finite")]
    NonFiniteEvent(String),
    #[error("epsilon {0:e} must lie in (0, 1e-3)")]
    Epsilon(f64),
    #[error("missing `{0}` line")]
    Missing(&'static str),
}

/// State, per-setting bases and measurement events. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    state: StateVector,
    settings: BTreeMap<SettingLabel, SingleParticleBasis>,
    events: [Event; 2],
    epsilon: f64,
    fix_unswitched_settings: bool,
    region_rules: RegionRules,
}

impl Experiment {
    /// Validates every component. `events` is indexed by [`Wing::index`].
    pub fn new(
        state: StateVector,
        settings: BTreeMap<SettingLabel, SingleParticleBasis>,
        events: [Event; 2],
        epsilon: f64,
        fix_unswitched_settings: bool,
        region_rules: RegionRules,
    ) -> Result<Self, ValidationError> {
        let state = qcalc::validate_state(state).map_err(ValidationError::State)?;
        for wing in Wing::ALL {
            let found = settings.keys().filter(|l| l.wing() == wing).count();
            if found != 2 {
                return Err(ValidationError::SettingCount { wing, found });
            }
        }
        for (&label, basis) in &settings {
            basis
                .validate()
                .map_err(|source| ValidationError::Basis { label, source })?;
        }
        for e in &events {
            if !e.t.is_finite() || !e.x.is_finite() {
                return Err(ValidationError::NonFiniteEvent(e.label.clone()));
            }
        }
        if events[0].label == events[1].label {
            return Err(ValidationError::DuplicateEvent(events[0].label.clone()));
        }
        if !(epsilon > 0.0 && epsilon < 1e-3) {
            return Err(ValidationError::Epsilon(epsilon));
        }
        Ok(Experiment {
            state,
            settings,
            events,
            epsilon,
            fix_unswitched_settings,
            region_rules,
        })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn basis(&self, label: SettingLabel) -> &SingleParticleBasis {
        &self.settings[&label]
    }

    pub fn settings(&self) -> &BTreeMap<SettingLabel, SingleParticleBasis> {
        &self.settings
    }

    pub fn event(&self, wing: Wing) -> &Event {
        &self.events[wing.index()]
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn fix_unswitched_settings(&self) -> bool {
        self.fix_unswitched_settings
    }

    pub fn region_rules(&self) -> RegionRules {
        self.region_rules
    }

    pub fn with_fix_unswitched_settings(mut self, fix: bool) -> Self {
        self.fix_unswitched_settings = fix;
        self
    }

    pub fn with_region_rules(mut self, rules: RegionRules) -> Self {
        self.region_rules = rules;
        self
    }

    /// Born probability of the given settings and outcomes.
    pub fn probability(&self, settings: [SettingLabel; 2], outcomes: [Outcome; 2]) -> f64 {
        qcalc::joint_probability(
            &self.state,
            self.basis(settings[0]),
            self.basis(settings[1]),
            outcomes[0],
            outcomes[1],
        )
    }

    /// Whether the event of `wing` lies in region `kind` of the apex wing's event.
    pub fn wing_in_region(&self, wing: Wing, apex: Wing, kind: RegionKind) -> bool {
        let relation = crate::spacetime::classify(self.event(wing), self.event(apex));
        self.region_rules.contains(relation, kind)
    }
}

/// One joint assignment of setting and outcome per wing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct World {
    pub settings: [SettingLabel; 2],
    pub outcomes: [Outcome; 2],
    pub probability: f64,
}

impl World {
    pub fn setting(&self, wing: Wing) -> SettingLabel {
        self.settings[wing.index()]
    }

    pub fn outcome(&self, wing: Wing) -> Outcome {
        self.outcomes[wing.index()]
    }

    pub fn sort_key(&self) -> (SettingLabel, SettingLabel, Outcome, Outcome) {
        (
            self.settings[0],
            self.settings[1],
            self.outcomes[0],
            self.outcomes[1],
        )
    }

    /// Same settings and outcomes, ignoring the stored probability.
    pub fn same_assignment(&self, other: &World) -> bool {
        self.settings == other.settings && self.outcomes == other.outcomes
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}={} {}={}",
            self.settings[0], self.outcomes[0], self.settings[1], self.outcomes[1]
        )
    }
}

impl Serialize for World {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("World", 5)?;
        st.serialize_field("left_setting", &self.settings[0])?;
        st.serialize_field("left_outcome", &self.outcomes[0])?;
        st.serialize_field("right_setting", &self.settings[1])?;
        st.serialize_field("right_outcome", &self.outcomes[1])?;
        st.serialize_field("probability", &self.probability)?;
        st.end()
    }
}

/// Optional per-wing constraints on settings and outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WorldFilter {
    pub settings: [Option<SettingLabel>; 2],
    pub outcomes: [Option<Outcome>; 2],
}

impl WorldFilter {
    pub fn settings(left: SettingLabel, right: SettingLabel) -> Self {
        WorldFilter {
            settings: [Some(left), Some(right)],
            outcomes: [None, None],
        }
    }

    pub fn with_outcome(mut self, wing: Wing, outcome: Outcome) -> Self {
        self.outcomes[wing.index()] = Some(outcome);
        self
    }

    pub fn matches(&self, settings: [SettingLabel; 2], outcomes: [Outcome; 2]) -> bool {
        (0..2).all(|i| {
            self.settings[i].is_none_or(|s| s == settings[i])
                && self.outcomes[i].is_none_or(|o| o == outcomes[i])
        })
    }
}

/// All 16 candidate worlds in canonical order, impossible ones included.
pub fn all_worlds(exp: &Experiment) -> Vec<World> {
    let mut worlds = Vec::with_capacity(16);
    for left in Wing::Left.settings() {
        for right in Wing::Right.settings() {
            for lo in Outcome::ALL {
                for ro in Outcome::ALL {
                    let settings = [left, right];
                    let outcomes = [lo, ro];
                    worlds.push(World {
                        settings,
                        outcomes,
                        probability: exp.probability(settings, outcomes),
                    });
                }
            }
        }
    }
    worlds.sort_by_key(World::sort_key);
    worlds
}

/// Worlds with probability above `epsilon` that match `filter`, in canonical
/// (L-setting, R-setting, L-outcome, R-outcome) order.
pub fn enumerate_possible_worlds(exp: &Experiment, filter: Option<&WorldFilter>) -> Vec<World> {
    all_worlds(exp)
        .into_iter()
        .filter(|w| w.probability > exp.epsilon())
        .filter(|w| filter.is_none_or(|f| f.matches(w.settings, w.outcomes)))
        .collect()
}

/// Wings whose setting and outcome are pinned by agreement on `kind`
/// relative to the apex wing. Never contains the apex.
pub fn agreement_wings(exp: &Experiment, apex_wing: Wing, kind: RegionKind) -> Vec<Wing> {
    Wing::ALL
        .into_iter()
        .filter(|&w| w != apex_wing && exp.wing_in_region(w, apex_wing, kind))
        .collect()
}

/// Equality of setting and outcome on every wing whose event lies in the
/// region; the apex wing itself is never compared.
pub fn agrees_on(
    w1: &World,
    w2: &World,
    apex_wing: Wing,
    kind: RegionKind,
    exp: &Experiment,
) -> bool {
    agreement_wings(exp, apex_wing, kind)
        .into_iter()
        .all(|w| w1.setting(w) == w2.setting(w) && w1.outcome(w) == w2.outcome(w))
}

/// The shipped Hardy-state configuration.
pub fn build_reference_hardy_experiment() -> Experiment {
    let a = 1.0 / 3f64.sqrt();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let state = StateVector::new([
        Complex64::new(a, 0.0),
        Complex64::new(a, 0.0),
        Complex64::new(a, 0.0),
        Complex64::new(0.0, 0.0),
    ]);
    let diagonal = SingleParticleBasis::from_real([h, -h], [h, h]);
    let settings = BTreeMap::from([
        (SettingLabel::L1, diagonal),
        (SettingLabel::L2, SingleParticleBasis::computational()),
        (SettingLabel::R1, diagonal),
        (
            SettingLabel::R2,
            SingleParticleBasis::computational().swapped(),
        ),
    ]);
    let events = [Event::new("L", 0.0, -1.0), Event::new("R", 0.0, 1.0)];
    Experiment::new(
        state,
        settings,
        events,
        qcalc::DEFAULT_EPSILON,
        true,
        RegionRules::default(),
    )
    .expect("reference experiment is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyCheck {
    pub id: &'static str,
    pub settings: [SettingLabel; 2],
    pub outcomes: [Outcome; 2],
    /// `true` when the check demands probability ≤ ε, `false` for > ε.
    pub expect_zero: bool,
    pub probability: f64,
    pub passed: bool,
}

impl HardyCheck {
    pub fn describe(&self) -> String {
        format!(
            "P({}={}, {}={}) {}",
            self.settings[0],
            self.outcomes[0],
            self.settings[1],
            self.outcomes[1],
            if self.expect_zero { "<= eps" } else { "> eps" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyReport {
    pub epsilon: f64,
    pub checks: Vec<HardyCheck>,
}

impl HardyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&HardyCheck> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// The six probability facts the Hardy argument relies on.
pub fn verify_hardy_conditions(exp: &Experiment) -> HardyReport {
    use Outcome::{Minus, Plus};
    use SettingLabel::*;
    let table: [(&str, [SettingLabel; 2], [Outcome; 2], bool); 6] = [
        ("i", [L2, R2], [Minus, Plus], true),
        ("ii", [L2, R1], [Plus, Plus], true),
        ("iii", [L2, R2], [Plus, Plus], false),
        ("iv", [L2, R1], [Minus, Plus], false),
        ("v", [L1, R2], [Minus, Plus], false),
        ("vi", [L1, R1], [Minus, Plus], false),
    ];
    let eps = exp.epsilon();
    let checks = table
        .into_iter()
        .map(|(id, settings, outcomes, expect_zero)| {
            let probability = exp.probability(settings, outcomes);
            let passed = if expect_zero {
                probability <= eps
            } else {
                probability > eps
            };
            HardyCheck {
                id,
                settings,
                outcomes,
                expect_zero,
                probability,
                passed,
            }
        })
        .collect();
    HardyReport {
        epsilon: eps,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Outcome::{Minus, Plus};
    use SettingLabel::*;

    fn product_experiment() -> Experiment {
        let c = SingleParticleBasis::computational();
        let settings = SettingLabel::ALL.into_iter().map(|l| (l, c)).collect();
        Experiment::new(
            StateVector::from_real([1.0, 0.0, 0.0, 0.0]),
            settings,
            [Event::new("L", 0.0, -1.0), Event::new("R", 0.0, 1.0)],
            1e-9,
            true,
            RegionRules::default(),
        )
        .unwrap()
    }

    #[test]
    fn hardy_l2_r2_worlds() {
        let exp = build_reference_hardy_experiment();
        let ws = enumerate_possible_worlds(&exp, Some(&WorldFilter::settings(L2, R2)));
        let outcomes: Vec<_> = ws.iter().map(|w| w.outcomes).collect();
        assert_eq!(outcomes, vec![[Plus, Plus], [Plus, Minus], [Minus, Minus]]);
        assert!((ws[0].probability - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn hardy_l2_plus_forces_r1_minus() {
        let exp = build_reference_hardy_experiment();
        let filter = WorldFilter::settings(L2, R1).with_outcome(Wing::Left, Plus);
        let ws = enumerate_possible_worlds(&exp, Some(&filter));
        assert_eq!(ws.len(), 1);
        assert_eq!(ws[0].outcome(Wing::Right), Minus);
    }

    #[test]
    fn product_state_has_four_worlds() {
        let ws = enumerate_possible_worlds(&product_experiment(), None);
        assert_eq!(ws.len(), 4);
        for w in &ws {
            assert_eq!(w.outcomes, [Plus, Plus]);
            assert_eq!(w.probability, 1.0);
        }
    }

    #[test]
    fn output_is_sorted() {
        let ws = enumerate_possible_worlds(&build_reference_hardy_experiment(), None);
        assert_eq!(ws.len(), 13);
        assert!(ws.windows(2).all(|p| p[0].sort_key() < p[1].sort_key()));
    }

    #[test]
    fn agreement_reference_geometry() {
        let exp = build_reference_hardy_experiment();
        let actual = World {
            settings: [L2, R2],
            outcomes: [Plus, Plus],
            probability: 1.0 / 3.0,
        };
        let right_changed = World {
            settings: [L2, R1],
            outcomes: [Plus, Minus],
            probability: 1.0 / 3.0,
        };
        let left_changed = World {
            settings: [L2, R1],
            outcomes: [Minus, Plus],
            probability: 1.0 / 6.0,
        };
        assert!(agrees_on(
            &actual,
            &right_changed,
            Wing::Right,
            RegionKind::F,
            &exp
        ));
        assert!(!agrees_on(
            &actual,
            &left_changed,
            Wing::Right,
            RegionKind::F,
            &exp
        ));
        assert!(agrees_on(
            &actual,
            &left_changed,
            Wing::Right,
            RegionKind::B,
            &exp
        ));
        for kind in RegionKind::ALL {
            assert!(agrees_on(&actual, &actual, Wing::Right, kind, &exp));
        }
        assert_eq!(
            agreement_wings(&exp, Wing::Right, RegionKind::F),
            vec![Wing::Left]
        );
        assert!(agreement_wings(&exp, Wing::Right, RegionKind::B).is_empty());
    }

    #[test]
    fn reference_passes_hardy_checks() {
        let report = verify_hardy_conditions(&build_reference_hardy_experiment());
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn product_state_fails_hardy_checks() {
        let report = verify_hardy_conditions(&product_experiment());
        assert!(!report.all_passed());
        // Every basis is computational, so P(L2=+,R1=+) = 1.
        assert!(!report.check("ii").unwrap().passed);
        assert!(report.check("iii").unwrap().passed);
    }

    #[test]
    fn compatible_right_settings_break_hardy() {
        let reference = build_reference_hardy_experiment();
        let mut settings = reference.settings().clone();
        settings.insert(R1, *reference.basis(R2));
        let exp = Experiment::new(
            *reference.state(),
            settings,
            [
                reference.event(Wing::Left).clone(),
                reference.event(Wing::Right).clone(),
            ],
            1e-9,
            true,
            RegionRules::default(),
        )
        .unwrap();
        let report = verify_hardy_conditions(&exp);
        let ii = report.check("ii").unwrap().passed;
        let iii = report.check("iii").unwrap().passed;
        assert!(!(ii && iii));
    }

    #[test]
    fn missing_setting_rejected() {
        let reference = build_reference_hardy_experiment();
        let mut settings = reference.settings().clone();
        settings.remove(&R1);
        let err = Experiment::new(
            *reference.state(),
            settings,
            [
                reference.event(Wing::Left).clone(),
                reference.event(Wing::Right).clone(),
            ],
            1e-9,
            true,
            RegionRules::default(),
        )
        .unwrap_err();
        assert_eq!(
            err.to_string(),
            "wing Right requires exactly 2 settings, found 1"
        );
    }

    #[test]
    fn epsilon_range_enforced() {
        let reference = build_reference_hardy_experiment();
        for eps in [0.0, 1e-3, -1.0, f64::NAN] {
            let err = Experiment::new(
                *reference.state(),
                reference.settings().clone(),
                [
                    reference.event(Wing::Left).clone(),
                    reference.event(Wing::Right).clone(),
                ],
                eps,
                true,
                RegionRules::default(),
            );
            assert!(matches!(err, Err(ValidationError::Epsilon(_))));
        }
    }

    #[test]
    fn setting_pair_probabilities_sum_to_one() {
        let exp = build_reference_hardy_experiment();
        let all = all_worlds(&exp);
        for chunk in all.chunks(4) {
            let total: f64 = chunk.iter().map(|w| w.probability).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn global_phase_copy_matches() {
        let reference = build_reference_hardy_experiment();
        let rotated = Experiment::new(
            reference.state().scaled(Complex64::from_polar(1.0, 0.9)),
            reference.settings().clone(),
            [
                reference.event(Wing::Left).clone(),
                reference.event(Wing::Right).clone(),
            ],
            1e-9,
            true,
            RegionRules::default(),
        )
        .unwrap();
        for (a, b) in all_worlds(&reference)
            .iter()
            .zip(all_worlds(&rotated).iter())
        {
            assert!((a.probability - b.probability).abs() <= 1e-12);
        }
    }
}
