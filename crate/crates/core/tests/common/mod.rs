#![allow(dead_code)]

//! Test-only helpers: an independent Born-rule oracle and random generators.

use std::collections::BTreeMap;

use cfworlds::logic::{Statement, Switch};
use cfworlds::qcalc::{Outcome, SingleParticleBasis, StateVector};
use cfworlds::spacetime::{Event, RegionKind, RegionRules};
use cfworlds::worlds::{Experiment, SettingLabel};
use num_complex::Complex64;
use rand::Rng;

/// Complex numbers as bare `(re, im)` pairs so the oracle shares no
/// arithmetic with the library.
pub type Pair = (f64, f64);

fn mul(a: Pair, b: Pair) -> Pair {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn conj(a: Pair) -> Pair {
    (a.0, -a.1)
}

/// `|Σ_jk conj(l_j) conj(r_k) ψ_jk|²`, written out term by term.
pub fn oracle_probability(state: [Pair; 4], l: [Pair; 2], r: [Pair; 2]) -> f64 {
    let t00 = mul(mul(conj(l[0]), conj(r[0])), state[0]);
    let t01 = mul(mul(conj(l[0]), conj(r[1])), state[1]);
    let t10 = mul(mul(conj(l[1]), conj(r[0])), state[2]);
    let t11 = mul(mul(conj(l[1]), conj(r[1])), state[3]);
    let re = t00.0 + t01.0 + t10.0 + t11.0;
    let im = t00.1 + t01.1 + t10.1 + t11.1;
    re * re + im * im
}

/// Reference configuration typed in directly from its definition:
/// ψ = (|00⟩ + |01⟩ + |10⟩)/√3; L2 + = |0⟩; R2 + = |1⟩;
/// L1, R1 + = (|0⟩ − |1⟩)/√2, − = (|0⟩ + |1⟩)/√2.
pub struct OracleConfig {
    pub state: [Pair; 4],
    pub plus: [[Pair; 2]; 4],
    pub minus: [[Pair; 2]; 4],
}

pub fn oracle_reference() -> OracleConfig {
    let a = 1.0 / 3.0f64.sqrt();
    let h = 1.0 / 2.0f64.sqrt();
    let z = (0.0, 0.0);
    // index order L1, L2, R1, R2
    OracleConfig {
        state: [(a, 0.0), (a, 0.0), (a, 0.0), z],
        plus: [
            [(h, 0.0), (-h, 0.0)],
            [(1.0, 0.0), z],
            [(h, 0.0), (-h, 0.0)],
            [z, (1.0, 0.0)],
        ],
        minus: [
            [(h, 0.0), (h, 0.0)],
            [z, (1.0, 0.0)],
            [(h, 0.0), (h, 0.0)],
            [(1.0, 0.0), z],
        ],
    }
}

fn label_index(l: SettingLabel) -> usize {
    match l {
        SettingLabel::L1 => 0,
        SettingLabel::L2 => 1,
        SettingLabel::R1 => 2,
        SettingLabel::R2 => 3,
    }
}

impl OracleConfig {
    pub fn probability(&self, settings: [SettingLabel; 2], outcomes: [Outcome; 2]) -> f64 {
        let vec = |label: SettingLabel, o: Outcome| match o {
            Outcome::Plus => self.plus[label_index(label)],
            Outcome::Minus => self.minus[label_index(label)],
        };
        oracle_probability(
            self.state,
            vec(settings[0], outcomes[0]),
            vec(settings[1], outcomes[1]),
        )
    }
}

/// Frozen oracle output for every world of the reference configuration,
/// in canonical (L-setting, R-setting, L-outcome, R-outcome) order.
pub const REFERENCE_WORLD_PROBABILITIES: [f64; 16] = [
    1.0 / 12.0,
    1.0 / 12.0,
    1.0 / 12.0,
    3.0 / 4.0, // L1 R1
    1.0 / 6.0,
    0.0,
    1.0 / 6.0,
    2.0 / 3.0, // L1 R2
    0.0,
    2.0 / 3.0,
    1.0 / 6.0,
    1.0 / 6.0, // L2 R1
    1.0 / 3.0,
    1.0 / 3.0,
    0.0,
    1.0 / 3.0, // L2 R2
];

pub fn random_state<R: Rng>(rng: &mut R) -> StateVector {
    loop {
        let raw: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n: f64 = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-3 {
            continue;
        }
        let amps = std::array::from_fn(|i| Complex64::new(raw[2 * i] / n, raw[2 * i + 1] / n));
        return StateVector::new(amps);
    }
}

/// A Haar-ish random orthonormal basis built from Bloch angles plus phases.
pub fn random_basis<R: Rng>(rng: &mut R) -> SingleParticleBasis {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let gp: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let gm: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (s, c) = (theta / 2.0).sin_cos();
    let p = Complex64::from_polar(1.0, gp);
    let m = Complex64::from_polar(1.0, gm);
    SingleParticleBasis {
        plus_vec: [p * c, p * Complex64::from_polar(s, phi)],
        minus_vec: [m * Complex64::from_polar(-s, -phi), m * c],
    }
}

/// Random state and bases; events are either the reference spacelike pair or
/// random points on a small integer grid.
pub fn random_experiment<R: Rng>(rng: &mut R) -> Experiment {
    let settings: BTreeMap<_, _> = SettingLabel::ALL
        .into_iter()
        .map(|l| (l, random_basis(rng)))
        .collect();
    let events = if rng.gen_bool(0.5) {
        [Event::new("L", 0.0, -1.0), Event::new("R", 0.0, 1.0)]
    } else {
        loop {
            let l = Event::new(
                "L",
                rng.gen_range(-3..=3) as f64,
                rng.gen_range(-3..=3) as f64,
            );
            let r = Event::new(
                "R",
                rng.gen_range(-3..=3) as f64,
                rng.gen_range(-3..=3) as f64,
            );
            if (l.t, l.x) != (r.t, r.x) {
                break [l, r];
            }
        }
    };
    Experiment::new(
        random_state(rng),
        settings,
        events,
        1e-9,
        rng.gen_bool(0.5),
        RegionRules {
            include_null_boundary: rng.gen_bool(0.5),
        },
    )
    .expect("generated experiment is valid")
}

fn random_label<R: Rng>(rng: &mut R) -> SettingLabel {
    SettingLabel::ALL[rng.gen_range(0..4)]
}

fn random_outcome<R: Rng>(rng: &mut R) -> Outcome {
    Outcome::ALL[rng.gen_range(0..2)]
}

pub fn random_atom<R: Rng>(rng: &mut R) -> Statement {
    if rng.gen_bool(0.5) {
        Statement::setting(random_label(rng))
    } else {
        Statement::outcome(random_label(rng), random_outcome(rng))
    }
}

/// Counterfactual-free statement of depth at most `depth`.
pub fn random_classical<R: Rng>(rng: &mut R, depth: u32) -> Statement {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_atom(rng);
    }
    match rng.gen_range(0..4) {
        0 => Statement::not(random_classical(rng, depth - 1)),
        1 => Statement::and(
            random_classical(rng, depth - 1),
            random_classical(rng, depth - 1),
        ),
        2 => Statement::or(
            random_classical(rng, depth - 1),
            random_classical(rng, depth - 1),
        ),
        _ => Statement::implies(
            random_classical(rng, depth - 1),
            random_classical(rng, depth - 1),
        ),
    }
}

pub fn random_counterfactual<R: Rng>(rng: &mut R, depth: u32, region: RegionKind) -> Statement {
    let d = depth.saturating_sub(1);
    Statement::counterfactual(
        random_classical(rng, d),
        Switch::to(random_label(rng)),
        region,
        random_classical(rng, d),
    )
}

/// Well-formed statement of depth at most `depth` (at most one
/// counterfactual level, anywhere in the tree).
pub fn random_statement<R: Rng>(rng: &mut R, depth: u32) -> Statement {
    if depth == 0 || rng.gen_bool(0.2) {
        return random_atom(rng);
    }
    let region = if rng.gen_bool(0.5) {
        RegionKind::F
    } else {
        RegionKind::B
    };
    match rng.gen_range(0..6) {
        0 => random_counterfactual(rng, depth, region),
        1 => Statement::not(random_statement(rng, depth - 1)),
        2 => Statement::and(
            random_statement(rng, depth - 1),
            random_statement(rng, depth - 1),
        ),
        3 => Statement::or(
            random_statement(rng, depth - 1),
            random_statement(rng, depth - 1),
        ),
        4 => Statement::implies(
            random_statement(rng, depth - 1),
            random_statement(rng, depth - 1),
        ),
        _ => random_classical(rng, depth),
    }
}

/// Statement whose counterfactuals all sit in positive position (never under
/// `!` or on the left of `=>`), with region F.
pub fn random_positive_statement<R: Rng>(rng: &mut R, depth: u32) -> Statement {
    if depth <= 1 || rng.gen_bool(0.3) {
        return random_counterfactual(rng, depth.max(1), RegionKind::F);
    }
    match rng.gen_range(0..3) {
        0 => Statement::and(
            random_positive_statement(rng, depth - 1),
            random_classical(rng, depth - 1),
        ),
        1 => Statement::or(
            random_classical(rng, depth - 1),
            random_positive_statement(rng, depth - 1),
        ),
        _ => Statement::implies(
            random_classical(rng, depth - 1),
            random_positive_statement(rng, depth - 1),
        ),
    }
}

pub fn depth(s: &Statement) -> u32 {
    match s {
        Statement::SettingAtom(_) | Statement::OutcomeAtom(..) => 0,
        Statement::Not(a) => 1 + depth(a),
        Statement::And(a, b) | Statement::Or(a, b) | Statement::Implies(a, b) => {
            1 + depth(a).max(depth(b))
        }
        Statement::Counterfactual(cf) => 1 + depth(&cf.given).max(depth(&cf.consequent)),
    }
}
