//! Causal structure of 1+1 Minkowski spacetime (c = 1) and the two
//! agreement regions anchored at an apex event.
//!
//! * `F`: every event not in the invariant future of the apex, i.e.
//!   spacelike to it or on/inside its backward lightcone.
//! * `B`: every event in the invariant past of the apex. The null boundary is
//!   included by default; see [`RegionRules::include_null_boundary`].
//!
//! The apex itself belongs to neither region.

use std::fmt;

use serde::Serialize;

/// Tolerance on the squared interval for a lightlike classification.
pub const LIGHTLIKE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub label: String,
    pub t: f64,
    pub x: f64,
}

impl Event {
    pub fn new(label: impl Into<String>, t: f64, x: f64) -> Self {
        Event {
            label: label.into(),
            t,
            x,
        }
    }

    pub fn translated(&self, dt: f64, dx: f64) -> Event {
        Event::new(self.label.clone(), self.t + dt, self.x + dx)
    }
}

/// Position of an event relative to an apex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CausalRelation {
    TimelikePast,
    LightlikePast,
    Spacelike,
    LightlikeFuture,
    TimelikeFuture,
    Coincident,
}

impl CausalRelation {
    /// The relation of the apex as seen from the other event.
    pub fn reversed(self) -> CausalRelation {
        use CausalRelation::*;
        match self {
            TimelikePast => TimelikeFuture,
            LightlikePast => LightlikeFuture,
            LightlikeFuture => LightlikePast,
            TimelikeFuture => TimelikePast,
            other => other,
        }
    }
}

impl fmt::Display for CausalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalRelation::TimelikePast => "timelike past",
            CausalRelation::LightlikePast => "lightlike past",
            CausalRelation::Spacelike => "spacelike",
            CausalRelation::LightlikeFuture => "lightlike future",
            CausalRelation::TimelikeFuture => "timelike future",
            CausalRelation::Coincident => "coincident",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RegionKind {
    F,
    B,
}

impl RegionKind {
    pub const ALL: [RegionKind; 2] = [RegionKind::F, RegionKind::B];

    pub fn symbol(self) -> char {
        match self {
            RegionKind::F => 'F',
            RegionKind::B => 'B',
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Classifies `e` relative to `apex` by the sign of `Δt² − Δx²`.
pub fn classify(e: &Event, apex: &Event) -> CausalRelation {
    let dt = e.t - apex.t;
    let dx = e.x - apex.x;
    if dt == 0.0 && dx == 0.0 {
        return CausalRelation::Coincident;
    }
    let interval = dt * dt - dx * dx;
    if interval < -LIGHTLIKE_TOLERANCE {
        CausalRelation::Spacelike
    } else if interval.abs() <= LIGHTLIKE_TOLERANCE {
        if dt < 0.0 {
            CausalRelation::LightlikePast
        } else {
            CausalRelation::LightlikeFuture
        }
    } else if dt < 0.0 {
        CausalRelation::TimelikePast
    } else {
        CausalRelation::TimelikeFuture
    }
}

/// Adjustable parts of the region definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionRules {
    /// Whether `B` contains the past null cone as well as its interior.
    /// `F` always contains it.
    pub include_null_boundary: bool,
}

impl Default for RegionRules {
    fn default() -> Self {
        RegionRules {
            include_null_boundary: true,
        }
    }
}

impl RegionRules {
    pub fn contains(&self, relation: CausalRelation, kind: RegionKind) -> bool {
        use CausalRelation::*;
        match kind {
            RegionKind::F => matches!(relation, Spacelike | TimelikePast | LightlikePast),
            RegionKind::B => match relation {
                TimelikePast => true,
                LightlikePast => self.include_null_boundary,
                _ => false,
            },
        }
    }
}

/// Region membership under the default rules.
pub fn in_region(e: &Event, apex: &Event, kind: RegionKind) -> bool {
    RegionRules::default().contains(classify(e, apex), kind)
}
