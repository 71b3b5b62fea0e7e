//! Born-rule probabilities for pure two-qubit states measured in
//! single-particle orthonormal bases.
//!
//! Amplitudes are stored row-major over (left index, right index), so
//! `amps[2 * j + k]` is the coefficient of `|j⟩ ⊗ |k⟩`. Outcome `+` is the
//! first basis vector of a [`SingleParticleBasis`], `−` the second.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type ComplexNumber = Complex64;

/// Tolerance for unit norm and orthogonality checks.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Default threshold below which a probability counts as zero.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Slack allowed outside `[0, 1]` before clamping.
const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcalcError {
    #[error("state is not normalized: squared norm {norm_sq} differs from 1 by at least {NORM_TOLERANCE:e}")]
    Norm { norm_sq: f64 },
    #[error("amplitude {index} is not finite")]
    NonFinite { index: usize },
    #[error("basis {which} vector is not unit norm (squared norm {norm_sq})")]
    BasisNorm { which: &'static str, norm_sq: f64 },
    #[error("basis vectors are not orthogonal (|<plus|minus>| = {overlap})")]
    NotOrthogonal { overlap: f64 },
    #[error("conditioning event has probability {probability}, not above threshold {epsilon:e}")]
    ConditionImpossible { probability: f64, epsilon: f64 },
}

/// Result of a single-particle measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn symbol(self) -> char {
        match self {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        }
    }

    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub amps: [ComplexNumber; 4],
}

impl StateVector {
    pub fn new(amps: [ComplexNumber; 4]) -> Self {
        StateVector { amps }
    }

    pub fn from_real(amps: [f64; 4]) -> Self {
        StateVector {
            amps: amps.map(|re| Complex64::new(re, 0.0)),
        }
    }

    pub fn amp(&self, left: usize, right: usize) -> ComplexNumber {
        self.amps[2 * left + right]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `phase`.
    pub fn scaled(&self, phase: ComplexNumber) -> StateVector {
        StateVector {
            amps: self.amps.map(|a| a * phase),
        }
    }
}

/// Checks that `s` has finite amplitudes and unit norm within
/// [`NORM_TOLERANCE`]; returns it unchanged.
pub fn validate_state(s: StateVector) -> Result<StateVector, QcalcError> {
    if let Some(index) = s.amps.iter().position(|a| !a.is_finite()) {
        return Err(QcalcError::NonFinite { index });
    }
    let norm_sq = s.norm_sqr();
    if (norm_sq - 1.0).abs() >= NORM_TOLERANCE {
        return Err(QcalcError::Norm { norm_sq });
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleParticleBasis {
    pub plus_vec: [ComplexNumber; 2],
    pub minus_vec: [ComplexNumber; 2],
}

impl SingleParticleBasis {
    /// `+ ↔ |0⟩`, `− ↔ |1⟩`.
    pub fn computational() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        SingleParticleBasis {
            plus_vec: [one, zero],
            minus_vec: [zero, one],
        }
    }

    pub fn from_real(plus: [f64; 2], minus: [f64; 2]) -> Self {
        SingleParticleBasis {
            plus_vec: plus.map(|re| Complex64::new(re, 0.0)),
            minus_vec: minus.map(|re| Complex64::new(re, 0.0)),
        }
    }

    pub fn vector(&self, outcome: Outcome) -> &[ComplexNumber; 2] {
        match outcome {
            Outcome::Plus => &self.plus_vec,
            Outcome::Minus => &self.minus_vec,
        }
    }

    /// The same basis with the outcome labels exchanged.
    pub fn swapped(&self) -> Self {
        SingleParticleBasis {
            plus_vec: self.minus_vec,
            minus_vec: self.plus_vec,
        }
    }

    pub fn validate(self) -> Result<Self, QcalcError> {
        for (which, v) in [("plus", &self.plus_vec), ("minus", &self.minus_vec)] {
            if v.iter().any(|a| !a.is_finite()) {
                return Err(QcalcError::BasisNorm {
                    which,
                    norm_sq: f64::NAN,
                });
            }
            let norm_sq = v[0].norm_sqr() + v[1].norm_sqr();
            if (norm_sq - 1.0).abs() >= NORM_TOLERANCE {
                return Err(QcalcError::BasisNorm { which, norm_sq });
            }
        }
        let overlap = (self.plus_vec[0].conj() * self.minus_vec[0]
            + self.plus_vec[1].conj() * self.minus_vec[1])
            .norm();
        if overlap >= NORM_TOLERANCE {
            return Err(QcalcError::NotOrthogonal { overlap });
        }
        Ok(self)
    }
}

fn clamp_probability(p: f64) -> f64 {
    debug_assert!(
        (-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) || !p.is_finite(),
        "probability {p} outside slack"
    );
    p.clamp(0.0, 1.0)
}

/// `|⟨b_L(left) ⊗ b_R(right)|ψ⟩|²`.
pub fn joint_probability(
    s: &StateVector,
    bl: &SingleParticleBasis,
    br: &SingleParticleBasis,
    left: Outcome,
    right: Outcome,
) -> f64 {
    let l = bl.vector(left);
    let r = br.vector(right);
    let mut overlap = Complex64::new(0.0, 0.0);
    for (j, lj) in l.iter().enumerate() {
        for (k, rk) in r.iter().enumerate() {
            overlap += lj.conj() * rk.conj() * s.amp(j, k);
        }
    }
    clamp_probability(overlap.norm_sqr())
}

/// A constraint on some subset of the two outcomes; `None` leaves a wing
/// unconstrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PartialOutcome {
    pub left: Option<Outcome>,
    pub right: Option<Outcome>,
}

impl PartialOutcome {
    pub fn left(o: Outcome) -> Self {
        PartialOutcome {
            left: Some(o),
            right: None,
        }
    }

    pub fn right(o: Outcome) -> Self {
        PartialOutcome {
            left: None,
            right: Some(o),
        }
    }

    pub fn both(left: Outcome, right: Outcome) -> Self {
        PartialOutcome {
            left: Some(left),
            right: Some(right),
        }
    }

    pub fn matches(&self, left: Outcome, right: Outcome) -> bool {
        self.left.is_none_or(|o| o == left) && self.right.is_none_or(|o| o == right)
    }

    /// Conjunction; `None` when the two constraints contradict each other.
    pub fn and(&self, other: &PartialOutcome) -> Option<PartialOutcome> {
        fn merge(a: Option<Outcome>, b: Option<Outcome>) -> Result<Option<Outcome>, ()> {
            match (a, b) {
                (Some(x), Some(y)) if x != y => Err(()),
                (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
                (None, None) => Ok(None),
            }
        }
        Some(PartialOutcome {
            left: merge(self.left, other.left).ok()?,
            right: merge(self.right, other.right).ok()?,
        })
    }
}

/// Total probability of the outcome pairs matching `event`.
pub fn marginal_probability(
    s: &StateVector,
    bl: &SingleParticleBasis,
    br: &SingleParticleBasis,
    event: &PartialOutcome,
) -> f64 {
    let mut total = 0.0;
    for left in Outcome::ALL {
        for right in Outcome::ALL {
            if event.matches(left, right) {
                total += joint_probability(s, bl, br, left, right);
            }
        }
    }
    clamp_probability(total)
}

/// `P(target ∧ given) / P(given)`, refusing when `P(given) ≤ epsilon`.
pub fn conditional_probability(
    s: &StateVector,
    bl: &SingleParticleBasis,
    br: &SingleParticleBasis,
    given: &PartialOutcome,
    target: &PartialOutcome,
    epsilon: f64,
) -> Result<f64, QcalcError> {
    let p_given = marginal_probability(s, bl, br, given);
    if p_given <= epsilon {
        return Err(QcalcError::ConditionImpossible {
            probability: p_given,
            epsilon,
        });
    }
    let p_both = match given.and(target) {
        Some(joint) => marginal_probability(s, bl, br, &joint),
        None => 0.0,
    };
    Ok(clamp_probability(p_both / p_given))
}

/// Six significant digits; exact zero prints as `0`.
pub fn format_probability(p: f64) -> String {
    if p == 0.0 {
        return "0".to_string();
    }
    if p.abs() < 1e-4 {
        return format!("{p:.5e}");
    }
    let magnitude = p.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{p:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
