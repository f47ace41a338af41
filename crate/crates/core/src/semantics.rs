//! Concrete operational semantics of hourglass automata.
//!
//! Clocks live in `[0, c_x]` and move at the rate given by their
//! [`Direction`]; a clock that reaches a bound stays there until it is
//! flipped. Action steps change directions only, never values.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    ClockBounds, ClockValuation, Direction, DirectionMap, Guard, HourglassAutomaton, LocId, ModelError, Relation,
};
use crate::scalar::{min_of, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConcreteState<T> {
    pub location: LocId,
    pub valuation: ClockValuation<T>,
    pub directions: DirectionMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimedMove<T> {
    pub delay: T,
    pub action: String,
}

/// A finite sequence of timed moves: each move waits, then fires an action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimedWord<T> {
    pub moves: Vec<TimedMove<T>>,
}

impl<T> Default for TimedWord<T> {
    fn default() -> Self {
        TimedWord { moves: Vec::new() }
    }
}

impl<T: Scalar> TimedWord<T> {
    pub fn new(moves: Vec<TimedMove<T>>) -> Self {
        TimedWord { moves }
    }

    pub fn from_pairs(pairs: &[(T, &str)]) -> Self {
        TimedWord { moves: pairs.iter().map(|(d, a)| TimedMove { delay: d.clone(), action: a.to_string() }).collect() }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn total_delay(&self) -> T {
        self.moves.iter().fold(T::zero(), |acc, m| acc + m.delay.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep<T> {
    pub delay: T,
    pub action: String,
    pub transition: usize,
    /// Absolute time at which the action fired.
    pub time: T,
}

/// One branch of a run: the visited states and the moves between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace<T> {
    pub states: Vec<ConcreteState<T>>,
    pub steps: Vec<TraceStep<T>>,
    pub accepting: bool,
    pub elapsed: T,
    pub flip_events: usize,
    /// Index of the move that could not be taken, or the word length when
    /// the whole word ran but ended outside the final locations.
    pub failure: Option<usize>,
}

impl<T: Scalar> RunTrace<T> {
    /// Absolute time of the first step labelled `action`.
    pub fn time_of(&self, action: &str) -> Option<&T> {
        self.steps.iter().find(|s| s.action == action).map(|s| &s.time)
    }
}

impl<T: Scalar> fmt::Display for RunTrace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.accepting {
            write!(f, "ACCEPT elapsed={} flips={}", self.elapsed, self.flip_events)
        } else {
            write!(f, "REJECT at step {}", self.failure.unwrap_or(0))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError<T: fmt::Debug + fmt::Display> {
    #[error("negative delay {0}")]
    NegativeDelay(T),
    #[error("location invariant violated after waiting {instant}")]
    DelayBlocked { instant: T },
    #[error("transition #{transition} does not leave the current location")]
    WrongSource { transition: usize },
    #[error("guard of transition #{transition} is not satisfied")]
    GuardFailed { transition: usize },
    #[error("invariant of the target of transition #{transition} is violated")]
    InvariantFailed { transition: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The states `S_i x {0}` with every clock running forward, minus those
/// violating their invariant.
pub fn initial_states<T: Scalar>(a: &HourglassAutomaton) -> Vec<ConcreteState<T>> {
    let n = a.clock_count();
    a.initial()
        .iter()
        .map(|&location| ConcreteState {
            location,
            valuation: ClockValuation::zero(n),
            directions: DirectionMap::forward(n),
        })
        .filter(|s| a.invariant(s.location).satisfies(&s.valuation, a.bounds()).unwrap_or(false))
        .collect()
}

/// Hourglass clock motion for `t` time units, saturating at `0` and `c_x`.
pub fn advance<T: Scalar>(
    v: &ClockValuation<T>,
    dirs: &DirectionMap,
    t: &T,
    bounds: &ClockBounds,
) -> ClockValuation<T> {
    ClockValuation::from_values(
        v.iter()
            .map(|(x, value)| match dirs.get(x) {
                Direction::PlusOne => min_of(&(value.clone() + t.clone()), &bounds.scalar(x)),
                Direction::MinusOne => {
                    let down = value.clone() - t.clone();
                    if down < T::zero() {
                        T::zero()
                    } else {
                        down
                    }
                }
                Direction::Zero | Direction::MinusZero => value.clone(),
            })
            .collect(),
    )
}

/// Earliest instant at which a delay of `t` from `s` leaves the invariant,
/// as an infimum. Clock trajectories are monotone and each atom describes
/// an interval, so checking the endpoint decides the whole delay.
fn first_violation<T: Scalar>(invariant: &Guard, s: &ConcreteState<T>, bounds: &ClockBounds) -> T {
    let mut earliest: Option<T> = None;
    let end_ok = |atom: &crate::model::GuardAtom, value: &T| atom.holds_for(value, bounds.get(atom.clock));
    for atom in invariant.atoms() {
        let v = s.valuation.get(atom.clock);
        if !end_ok(atom, v) {
            return T::zero();
        }
        let k: T = T::from_int(i64::from(atom.constant.resolve(bounds.get(atom.clock))));
        let instant = match (s.directions.get(atom.clock), atom.relation) {
            (Direction::PlusOne, Relation::Lt | Relation::Le | Relation::Eq) => Some(k - v.clone()),
            (Direction::MinusOne, Relation::Gt | Relation::Ge | Relation::Eq) => Some(v.clone() - k),
            _ => None,
        };
        if let Some(i) = instant {
            let i = if i < T::zero() { T::zero() } else { i };
            earliest = Some(match earliest {
                Some(e) => min_of(&e, &i),
                None => i,
            });
        }
    }
    earliest.unwrap_or_else(T::zero)
}

/// `(s, v) ->_t (s, v + t)` with saturation; fails if the location
/// invariant breaks at any point of the delay.
pub fn delay_step<T: Scalar>(
    a: &HourglassAutomaton,
    s: &ConcreteState<T>,
    t: &T,
) -> Result<ConcreteState<T>, SemanticsError<T>> {
    if *t < T::zero() {
        return Err(SemanticsError::NegativeDelay(t.clone()));
    }
    let valuation = advance(&s.valuation, &s.directions, t, a.bounds());
    let invariant = a.invariant(s.location);
    if !invariant.satisfies(&valuation, a.bounds())? {
        let moving: Vec<_> = invariant
            .atoms()
            .iter()
            .filter(|atom| !atom.holds_for(valuation.get(atom.clock), a.bounds().get(atom.clock)))
            .copied()
            .collect();
        let instant = first_violation(&Guard::from_atoms(moving), s, a.bounds());
        return Err(SemanticsError::DelayBlocked { instant });
    }
    Ok(ConcreteState { location: s.location, valuation, directions: s.directions.clone() })
}

/// Fires transition `index`: flips, then toggles; the valuation is kept.
pub fn action_step<T: Scalar>(
    a: &HourglassAutomaton,
    s: &ConcreteState<T>,
    index: usize,
) -> Result<ConcreteState<T>, SemanticsError<T>> {
    let tr = &a.transitions()[index];
    if tr.source != s.location {
        return Err(SemanticsError::WrongSource { transition: index });
    }
    if !tr.guard.satisfies(&s.valuation, a.bounds())? {
        return Err(SemanticsError::GuardFailed { transition: index });
    }
    if !a.invariant(tr.target).satisfies(&s.valuation, a.bounds())? {
        return Err(SemanticsError::InvariantFailed { transition: index });
    }
    Ok(ConcreteState {
        location: tr.target,
        valuation: s.valuation.clone(),
        directions: s.directions.after_action(&tr.flips, &tr.toggles),
    })
}

struct Branch<T> {
    states: Vec<ConcreteState<T>>,
    steps: Vec<TraceStep<T>>,
    elapsed: T,
    flips: usize,
}

impl<T: Scalar> Branch<T> {
    fn into_trace(self, accepting: bool, failure: Option<usize>) -> RunTrace<T> {
        RunTrace {
            states: self.states,
            steps: self.steps,
            accepting,
            elapsed: self.elapsed,
            flip_events: self.flips,
            failure,
        }
    }
}

/// Runs `w` from every initial state, trying every transition whose label
/// matches. Returns the first accepting branch in transition order, or
/// else the branch that got furthest.
pub fn run_word<T: Scalar>(a: &HourglassAutomaton, w: &TimedWord<T>) -> RunTrace<T> {
    let mut best: Option<(usize, RunTrace<T>)> = None;
    for init in initial_states(a) {
        let branch = Branch { states: vec![init], steps: Vec::new(), elapsed: T::zero(), flips: 0 };
        if let Some(accepted) = explore(a, w, branch, &mut best) {
            return accepted;
        }
    }
    match best {
        Some((_, trace)) => trace,
        None => RunTrace {
            states: Vec::new(),
            steps: Vec::new(),
            accepting: false,
            elapsed: T::zero(),
            flip_events: 0,
            failure: Some(0),
        },
    }
}

fn explore<T: Scalar>(
    a: &HourglassAutomaton,
    w: &TimedWord<T>,
    branch: Branch<T>,
    best: &mut Option<(usize, RunTrace<T>)>,
) -> Option<RunTrace<T>> {
    let depth = branch.steps.len();
    let current = branch.states.last().expect("branch has a state").clone();
    let Some(mv) = w.moves.get(depth) else {
        let accepting = a.is_final(current.location);
        let failure = (!accepting).then_some(depth);
        let trace = branch.into_trace(accepting, failure);
        if accepting {
            return Some(trace);
        }
        record(best, depth + 1, trace);
        return None;
    };

    let waited = delay_step(a, &current, &mv.delay).ok();
    let mut advanced = false;
    if let Some(waited) = waited {
        let time = branch.elapsed.clone() + mv.delay.clone();
        for (index, tr) in a.transitions().iter().enumerate() {
            if tr.action != mv.action || tr.source != waited.location {
                continue;
            }
            let Ok(next) = action_step(a, &waited, index) else { continue };
            advanced = true;
            let mut states = branch.states.clone();
            states.push(next);
            let mut steps = branch.steps.clone();
            steps.push(TraceStep {
                delay: mv.delay.clone(),
                action: mv.action.clone(),
                transition: index,
                time: time.clone(),
            });
            let child = Branch { states, steps, elapsed: time.clone(), flips: branch.flips + tr.flips.len() };
            if let Some(accepted) = explore(a, w, child, best) {
                return Some(accepted);
            }
        }
    }
    if !advanced {
        record(best, depth, branch.into_trace(false, Some(depth)));
    }
    None
}

fn record<T>(best: &mut Option<(usize, RunTrace<T>)>, score: usize, trace: RunTrace<T>) {
    if best.as_ref().is_none_or(|(s, _)| score > *s) {
        *best = Some((score, trace));
    }
}

/// Seeded random walk: delays are multiples of `grid`, transitions are
/// chosen uniformly among the enabled ones. At most `budget` steps in
/// total; walks restart from an initial state when stuck.
pub fn random_explore<T: Scalar>(a: &HourglassAutomaton, budget: usize, seed: u64, grid: &T) -> Option<RunTrace<T>> {
    assert!(*grid > T::zero(), "delay grid must be positive");
    let inits = initial_states::<T>(a);
    if inits.is_empty() {
        return None;
    }
    if inits.iter().any(|s| a.is_final(s.location)) {
        return Some(run_word(a, &TimedWord::default()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = a.bounds().as_slice().iter().max().copied().unwrap_or(0) + 1;
    let max_k = (T::from_int(i64::from(horizon)) / grid.clone()).floor_i64().max(1);
    let max_depth = 2 * a.locations().len() + 6;
    let mut steps = 0usize;
    while steps < budget {
        let mut state = inits[rng.gen_range(0..inits.len())].clone();
        let mut word = TimedWord::default();
        for _ in 0..max_depth {
            if steps >= budget {
                break;
            }
            steps += 1;
            let mut delay = grid.clone() * T::from_int(rng.gen_range(0..=max_k));
            let waited = match delay_step(a, &state, &delay) {
                Ok(s) => s,
                Err(_) => {
                    delay = T::zero();
                    state.clone()
                }
            };
            let enabled: Vec<(usize, ConcreteState<T>)> =
                (0..a.transitions().len()).filter_map(|i| action_step(a, &waited, i).ok().map(|s| (i, s))).collect();
            if enabled.is_empty() {
                break;
            }
            let (index, next) = enabled[rng.gen_range(0..enabled.len())].clone();
            word.moves.push(TimedMove { delay, action: a.transitions()[index].action.clone() });
            state = next;
            if a.is_final(state.location) {
                let trace = run_word(a, &word);
                debug_assert!(trace.accepting);
                return Some(trace);
            }
        }
    }
    None
}
