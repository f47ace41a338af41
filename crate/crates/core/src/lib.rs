//! Hourglass automata: timed automata whose clocks run up, run down or
//! pause, saturating at zero and at a per-clock bound.

pub mod graph;
pub mod model;
pub mod oracle;
pub mod regions;
pub mod scalar;
pub mod semantics;
pub mod translation;

pub use model::{
    AutomatonBuilder, ClockBounds, ClockId, ClockSet, ClockValuation, ConstRef, Direction, DirectionMap, Guard,
    GuardAtom, HourglassAutomaton, LocId, Mode, ModelError, Relation, Transition,
};
pub use scalar::{Scalar, ScalarParseError};
pub use semantics::{ConcreteState, RunTrace, TimedMove, TimedWord};
pub use translation::{translate, ExtendedTimedAutomaton, ExtendedTransition};

/// Arbitrary-precision rationals, the default backend.
pub type Rational = num_rational::BigRational;
/// Machine rationals; fast, but may overflow on long runs.
pub type SmallRational = num_rational::Ratio<i64>;
/// Wider machine rationals.
pub type WideRational = num_rational::Ratio<i128>;
