//! Counterfactual statements about a two-wing, two-qubit measurement
//! experiment, evaluated by enumerating every quantum-possible world.
//!
//! A counterfactual switches the setting measured on one wing and asks what
//! every hypothetical world agreeing with the actual one on a chosen
//! spacetime region would show. Two regions are available around the
//! switched measurement event: `F`, everything outside its future lightcone,
//! and `B`, its past lightcone.
//!
//! * [`qcalc`]: Born-rule probabilities.
//! * [`spacetime`]: causal classification and region membership.
//! * [`worlds`]: experiment model, world enumeration, agreement.
//! * [`logic`]: statements, evaluation, counterexamples.
//! * [`dsl`]: the statement language and `.exp` files.
//! * [`cli`]: the `cfworlds` command.

pub mod cli;
pub mod dsl;
pub mod logic;
pub mod qcalc;
pub mod spacetime;
pub mod worlds;

pub use logic::{canonical_statements, evaluate, explain, Statement, Verdict};
pub use worlds::{build_reference_hardy_experiment, Experiment, World};
