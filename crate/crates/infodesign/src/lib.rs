//! Solver library for data provision to a privately informed monopoly seller.
//!
//! A seller faces a buyer whose value is either `L` (low) or `H` (high) and is
//! privately informed: her type `θ ∈ [0,1]` is her belief that the value is
//! high. A designer supplies additional information about the value, either as
//! a single public signal or as a menu of signals indexed by reported type.
//! The library computes, verifies, and cross-validates the welfare objects of
//! this model:
//!
//! * [`payoffs`] — uniform-pricing profit and efficient-surplus baselines, the
//!   observable-type surplus triangle, and the indirect payoff functions
//!   `U(μ)`, `Π(μ)` of the basic posterior belief.
//! * [`mechanisms`] — direct mechanisms `(α(θ), β(θ))`, incentive-compatibility
//!   and structural checks, and the public-signal construction that replicates
//!   any incentive-compatible mechanism.
//! * [`persuasion`] — the generic surplus-set solver: graph sampling, support
//!   sweeps via concavification over belief splits, and split certificates.
//! * [`uniform`] — closed forms for uniformly distributed types, used to
//!   cross-validate the generic solver.
//! * [`implications`] — constrained seller-optimal outcomes, third-party-data
//!   comparisons, efficiency/rent checks, and communication-protocol
//!   outcome sets.
//! * [`manyvalues`] — finite value grids with more than two values, in exact
//!   rational arithmetic.
//! * [`oracle`] — brute-force enumeration and Monte-Carlo simulation used to
//!   cross-check the analytic results at desk scale.

pub mod beliefs;
pub mod dist;
mod error;
pub mod implications;
pub mod manyvalues;
pub mod mechanisms;
pub mod model;
pub mod oracle;
pub mod payoffs;
pub mod persuasion;
pub mod uniform;

pub use error::{Error, Result};
pub use model::{BinarySignal, FiniteSignal, MarketPrimitives, OutcomeSet, WelfareOutcome};

pub use dist::TypeDistribution;
