//! Domain types: clocks, valuations, direction maps, guards and automata.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Index;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocId(pub usize);

pub type ClockSet = BTreeSet<ClockId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("clock #{clock} is not declared ({count} clocks)")]
    UnknownClock { clock: usize, count: usize },
    #[error("location #{0} is not declared")]
    UnknownLocation(usize),
    #[error("clock `{0}` declared twice")]
    DuplicateClock(String),
    #[error("location `{0}` declared twice")]
    DuplicateLocation(String),
    #[error("clock `{0}` must have a bound of at least 1")]
    NonPositiveBound(String),
    #[error("constant must be 0 or cx (clock `{clock}` compared against {constant})")]
    IllegalConstant { clock: String, constant: u32 },
    #[error("constant {constant} exceeds the bound {bound} of clock `{clock}`")]
    ConstantOutOfRange { clock: String, constant: u32, bound: u32 },
    #[error("valuation has {got} clocks, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot flip clock #{clock}: value {value} exceeds its bound {bound}")]
    FlipBeyondBound { clock: usize, value: String, bound: u32 },
}

/// Per-clock maximal constant `c_x`; every entry is at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClockBounds(Vec<u32>);

impl ClockBounds {
    pub fn new(bounds: Vec<u32>) -> Result<Self, ModelError> {
        if let Some(i) = bounds.iter().position(|&c| c == 0) {
            return Err(ModelError::NonPositiveBound(format!("#{i}")));
        }
        Ok(ClockBounds(bounds))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, clock: ClockId) -> u32 {
        self.0[clock.0]
    }

    pub fn scalar<T: Scalar>(&self, clock: ClockId) -> T {
        T::from_int(i64::from(self.0[clock.0]))
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClockId, u32)> + '_ {
        self.0.iter().enumerate().map(|(i, &c)| (ClockId(i), c))
    }

    pub fn clocks(&self) -> impl Iterator<Item = ClockId> {
        (0..self.0.len()).map(ClockId)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// The same bounds multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> ClockBounds {
        ClockBounds(self.0.iter().map(|c| c * factor).collect())
    }
}

/// `fr(t)`, the fractional component of a non-negative value.
pub fn fractional_part<T: Scalar>(t: &T) -> T {
    t.fract_value()
}

/// Exact clock values indexed by [`ClockId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClockValuation<T> {
    values: Vec<T>,
}

impl<T: Scalar> ClockValuation<T> {
    pub fn zero(clocks: usize) -> Self {
        ClockValuation { values: vec![T::zero(); clocks] }
    }

    pub fn from_values(values: Vec<T>) -> Self {
        ClockValuation { values }
    }

    pub fn from_ratios(pairs: &[(i64, i64)]) -> Self {
        ClockValuation { values: pairs.iter().map(|&(n, d)| T::from_ratio(n, d)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, clock: ClockId) -> &T {
        &self.values[clock.0]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClockId, &T)> {
        self.values.iter().enumerate().map(|(i, v)| (ClockId(i), v))
    }

    pub fn with(&self, clock: ClockId, value: T) -> Self {
        let mut values = self.values.clone();
        values[clock.0] = value;
        ClockValuation { values }
    }

    /// Every clock advanced by `t`, without saturation.
    pub fn shifted(&self, t: &T) -> Self {
        ClockValuation { values: self.values.iter().map(|v| v.clone() + t.clone()).collect() }
    }
}

impl<T> Index<ClockId> for ClockValuation<T> {
    type Output = T;

    fn index(&self, clock: ClockId) -> &T {
        &self.values[clock.0]
    }
}

impl<T: fmt::Display> fmt::Display for ClockValuation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// `v[lambda := 0]`.
pub fn apply_reset<T: Scalar>(v: &ClockValuation<T>, lambda: &ClockSet) -> ClockValuation<T> {
    let mut values = v.values.clone();
    for x in lambda {
        values[x.0] = T::zero();
    }
    ClockValuation { values }
}

/// `v[mu := c_mu - mu]`. Swaps the time left until each bound is reached.
pub fn apply_flip_update<T: Scalar>(
    v: &ClockValuation<T>,
    mu: &ClockSet,
    bounds: &ClockBounds,
) -> Result<ClockValuation<T>, ModelError> {
    let mut values = v.values.clone();
    for &x in mu {
        let c: T = bounds.scalar(x);
        if values[x.0] > c {
            return Err(ModelError::FlipBeyondBound {
                clock: x.0,
                value: values[x.0].to_string(),
                bound: bounds.get(x),
            });
        }
        values[x.0] = c - values[x.0].clone();
    }
    Ok(ClockValuation { values })
}

/// Rate of a clock: running up or down, or paused with the direction it
/// resumes in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    MinusOne,
    MinusZero,
    Zero,
    PlusOne,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::PlusOne => Direction::MinusOne,
            Direction::MinusOne => Direction::PlusOne,
            Direction::Zero => Direction::MinusZero,
            Direction::MinusZero => Direction::Zero,
        }
    }

    pub fn toggled(self) -> Direction {
        match self {
            Direction::PlusOne => Direction::Zero,
            Direction::Zero => Direction::PlusOne,
            Direction::MinusOne => Direction::MinusZero,
            Direction::MinusZero => Direction::MinusOne,
        }
    }

    pub fn is_running(self) -> bool {
        matches!(self, Direction::PlusOne | Direction::MinusOne)
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Direction::MinusOne | Direction::MinusZero)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Direction::PlusOne => "+1",
            Direction::MinusOne => "-1",
            Direction::Zero => "0",
            Direction::MinusZero => "-0",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// The map `d`, one [`Direction`] per clock.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectionMap(Vec<Direction>);

impl DirectionMap {
    /// All clocks running forward, as in every initial state.
    pub fn forward(clocks: usize) -> Self {
        DirectionMap(vec![Direction::PlusOne; clocks])
    }

    pub fn from_vec(directions: Vec<Direction>) -> Self {
        DirectionMap(directions)
    }

    pub fn get(&self, clock: ClockId) -> Direction {
        self.0[clock.0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Direction] {
        &self.0
    }

    pub fn any_running(&self) -> bool {
        self.0.iter().any(|d| d.is_running())
    }

    /// Flips `flips`, then toggles `toggles`.
    pub fn after_action(&self, flips: &ClockSet, toggles: &ClockSet) -> DirectionMap {
        let mut dirs = self.0.clone();
        for x in flips {
            dirs[x.0] = dirs[x.0].flipped();
        }
        for x in toggles {
            dirs[x.0] = dirs[x.0].toggled();
        }
        DirectionMap(dirs)
    }
}

impl fmt::Display for DirectionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.0.iter().map(|d| d.symbol()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "==",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

/// Right-hand side of a guard atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstRef {
    Zero,
    /// The compared clock's own bound.
    Cx,
    /// Any integer up to the bound; only in extended mode.
    Int(u32),
}

impl ConstRef {
    pub fn resolve(self, bound: u32) -> u32 {
        match self {
            ConstRef::Zero => 0,
            ConstRef::Cx => bound,
            ConstRef::Int(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GuardAtom {
    pub clock: ClockId,
    pub relation: Relation,
    pub constant: ConstRef,
}

impl GuardAtom {
    pub fn new(clock: ClockId, relation: Relation, constant: ConstRef) -> Self {
        GuardAtom { clock, relation, constant }
    }

    pub fn holds_for<T: Scalar>(&self, value: &T, bound: u32) -> bool {
        let c = T::from_int(i64::from(self.constant.resolve(bound)));
        self.relation.holds(value, &c)
    }
}

/// Conjunction of atoms; the empty conjunction is `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Guard {
    atoms: Vec<GuardAtom>,
}

impl Guard {
    pub fn always() -> Self {
        Guard { atoms: Vec::new() }
    }

    pub fn from_atoms(atoms: Vec<GuardAtom>) -> Self {
        Guard { atoms }
    }

    pub fn atom(clock: ClockId, relation: Relation, constant: ConstRef) -> Self {
        Guard { atoms: vec![GuardAtom::new(clock, relation, constant)] }
    }

    pub fn and(&self, other: &Guard) -> Guard {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().copied());
        Guard { atoms }
    }

    pub fn atoms(&self) -> &[GuardAtom] {
        &self.atoms
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn satisfies<T: Scalar>(&self, v: &ClockValuation<T>, bounds: &ClockBounds) -> Result<bool, ModelError> {
        for atom in &self.atoms {
            if atom.clock.0 >= v.len() || atom.clock.0 >= bounds.len() {
                return Err(ModelError::UnknownClock { clock: atom.clock.0, count: v.len() });
            }
            if !atom.holds_for(v.get(atom.clock), bounds.get(atom.clock)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Exact guard evaluation on a valuation.
pub fn satisfies<T: Scalar>(v: &ClockValuation<T>, g: &Guard, bounds: &ClockBounds) -> Result<bool, ModelError> {
    g.satisfies(v, bounds)
}

/// Whether guards may only use `0` and `cx`, or any integer up to the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Hourglass,
    Extended,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClockDecl {
    pub name: String,
    pub bound: u32,
}

/// `<source, action, guard, flips, toggles, target>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: LocId,
    pub action: String,
    pub guard: Guard,
    pub flips: ClockSet,
    pub toggles: ClockSet,
    pub target: LocId,
}

impl Transition {
    pub fn new(source: LocId, action: impl Into<String>, target: LocId) -> Self {
        Transition {
            source,
            action: action.into(),
            guard: Guard::always(),
            flips: ClockSet::new(),
            toggles: ClockSet::new(),
            target,
        }
    }

    pub fn when(mut self, guard: Guard) -> Self {
        self.guard = guard;
        self
    }

    pub fn flip(mut self, clocks: impl IntoIterator<Item = ClockId>) -> Self {
        self.flips.extend(clocks);
        self
    }

    pub fn toggle(mut self, clocks: impl IntoIterator<Item = ClockId>) -> Self {
        self.toggles.extend(clocks);
        self
    }
}

/// A validated hourglass automaton `(actions, locations, initial, final,
/// clocks, invariants, transitions)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HourglassAutomaton {
    mode: Mode,
    actions: BTreeSet<String>,
    locations: Vec<String>,
    initial: BTreeSet<LocId>,
    finals: BTreeSet<LocId>,
    clocks: Vec<ClockDecl>,
    bounds: ClockBounds,
    invariants: Vec<Guard>,
    transitions: Vec<Transition>,
}

impl HourglassAutomaton {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn actions(&self) -> &BTreeSet<String> {
        &self.actions
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn location_name(&self, loc: LocId) -> &str {
        &self.locations[loc.0]
    }

    pub fn location_by_name(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l == name).map(LocId)
    }

    pub fn initial(&self) -> &BTreeSet<LocId> {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<LocId> {
        &self.finals
    }

    pub fn is_final(&self, loc: LocId) -> bool {
        self.finals.contains(&loc)
    }

    pub fn clocks(&self) -> &[ClockDecl] {
        &self.clocks
    }

    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    pub fn clock_name(&self, clock: ClockId) -> &str {
        &self.clocks[clock.0].name
    }

    pub fn clock_by_name(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c.name == name).map(ClockId)
    }

    pub fn bounds(&self) -> &ClockBounds {
        &self.bounds
    }

    pub fn invariant(&self, loc: LocId) -> &Guard {
        &self.invariants[loc.0]
    }

    pub fn invariants(&self) -> &[Guard] {
        &self.invariants
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn has_toggles(&self) -> bool {
        self.transitions.iter().any(|t| !t.toggles.is_empty())
    }

    pub fn has_flips(&self) -> bool {
        self.transitions.iter().any(|t| !t.flips.is_empty())
    }

    /// A copy with a different transition list, re-validated.
    pub fn with_transitions(&self, transitions: Vec<Transition>) -> Result<Self, ModelError> {
        let mut builder = AutomatonBuilder::from_automaton(self);
        builder.transitions = transitions;
        builder.build()
    }
}

/// Incremental constructor for [`HourglassAutomaton`]; `build` validates.
#[derive(Debug, Clone, Default)]
pub struct AutomatonBuilder {
    mode: Mode,
    actions: BTreeSet<String>,
    locations: Vec<String>,
    initial: BTreeSet<LocId>,
    finals: BTreeSet<LocId>,
    clocks: Vec<ClockDecl>,
    invariants: HashMap<LocId, Guard>,
    transitions: Vec<Transition>,
}

impl AutomatonBuilder {
    pub fn new(mode: Mode) -> Self {
        AutomatonBuilder { mode, ..Default::default() }
    }

    fn from_automaton(a: &HourglassAutomaton) -> Self {
        AutomatonBuilder {
            mode: a.mode,
            actions: a.actions.clone(),
            locations: a.locations.clone(),
            initial: a.initial.clone(),
            finals: a.finals.clone(),
            clocks: a.clocks.clone(),
            invariants: a
                .invariants
                .iter()
                .enumerate()
                .filter(|(_, g)| !g.is_true())
                .map(|(i, g)| (LocId(i), g.clone()))
                .collect(),
            transitions: a.transitions.clone(),
        }
    }

    pub fn clock(&mut self, name: &str, bound: u32) -> Result<ClockId, ModelError> {
        if self.clocks.iter().any(|c| c.name == name) {
            return Err(ModelError::DuplicateClock(name.to_string()));
        }
        if bound == 0 {
            return Err(ModelError::NonPositiveBound(name.to_string()));
        }
        self.clocks.push(ClockDecl { name: name.to_string(), bound });
        Ok(ClockId(self.clocks.len() - 1))
    }

    pub fn location(&mut self, name: &str) -> Result<LocId, ModelError> {
        if self.locations.iter().any(|l| l == name) {
            return Err(ModelError::DuplicateLocation(name.to_string()));
        }
        self.locations.push(name.to_string());
        Ok(LocId(self.locations.len() - 1))
    }

    pub fn action(&mut self, name: &str) -> &mut Self {
        self.actions.insert(name.to_string());
        self
    }

    pub fn initial(&mut self, loc: LocId) -> &mut Self {
        self.initial.insert(loc);
        self
    }

    pub fn final_location(&mut self, loc: LocId) -> &mut Self {
        self.finals.insert(loc);
        self
    }

    pub fn invariant(&mut self, loc: LocId, guard: Guard) -> &mut Self {
        let merged = match self.invariants.remove(&loc) {
            Some(existing) => existing.and(&guard),
            None => guard,
        };
        self.invariants.insert(loc, merged);
        self
    }

    pub fn transition(&mut self, t: Transition) -> &mut Self {
        self.actions.insert(t.action.clone());
        self.transitions.push(t);
        self
    }

    fn check_location(&self, loc: LocId) -> Result<(), ModelError> {
        if loc.0 < self.locations.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownLocation(loc.0))
        }
    }

    fn check_clock(&self, clock: ClockId) -> Result<(), ModelError> {
        if clock.0 < self.clocks.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownClock { clock: clock.0, count: self.clocks.len() })
        }
    }

    fn check_guard(&self, guard: &Guard) -> Result<(), ModelError> {
        for atom in guard.atoms() {
            self.check_clock(atom.clock)?;
            let decl = &self.clocks[atom.clock.0];
            if let ConstRef::Int(k) = atom.constant {
                match self.mode {
                    Mode::Hourglass if k != 0 && k != decl.bound => {
                        return Err(ModelError::IllegalConstant { clock: decl.name.clone(), constant: k });
                    }
                    _ if k > decl.bound => {
                        return Err(ModelError::ConstantOutOfRange {
                            clock: decl.name.clone(),
                            constant: k,
                            bound: decl.bound,
                        });
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn build(self) -> Result<HourglassAutomaton, ModelError> {
        for &loc in self.initial.iter().chain(self.finals.iter()) {
            self.check_location(loc)?;
        }
        for (&loc, guard) in &self.invariants {
            self.check_location(loc)?;
            self.check_guard(guard)?;
        }
        for t in &self.transitions {
            self.check_location(t.source)?;
            self.check_location(t.target)?;
            self.check_guard(&t.guard)?;
            for &x in t.flips.iter().chain(t.toggles.iter()) {
                self.check_clock(x)?;
            }
        }
        let bounds = ClockBounds::new(self.clocks.iter().map(|c| c.bound).collect())?;
        let invariants =
            (0..self.locations.len()).map(|i| self.invariants.get(&LocId(i)).cloned().unwrap_or_default()).collect();
        Ok(HourglassAutomaton {
            mode: self.mode,
            actions: self.actions,
            locations: self.locations,
            initial: self.initial,
            finals: self.finals,
            clocks: self.clocks,
            bounds,
            invariants,
            transitions: self.transitions,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn val(pairs: &[(i64, i64)]) -> ClockValuation<Rational> {
        ClockValuation::from_ratios(pairs)
    }

    fn set(ids: &[usize]) -> ClockSet {
        ids.iter().map(|&i| ClockId(i)).collect()
    }

    #[test]
    fn fractional_part_examples() {
        assert_eq!(fractional_part(&q(17, 10)), q(7, 10));
        assert_eq!(fractional_part(&q(3, 1)), q(0, 1));
        assert_eq!(fractional_part(&q(22, 7)), q(1, 7));
    }

    #[test]
    fn guard_examples() {
        let b1 = ClockBounds::new(vec![7]).unwrap();
        let x = ClockId(0);
        let g = Guard::atom(x, Relation::Le, ConstRef::Zero);
        assert!(satisfies(&val(&[(0, 1)]), &g, &b1).unwrap());
        let g = Guard::atom(x, Relation::Ge, ConstRef::Cx);
        assert!(satisfies(&val(&[(7, 1)]), &g, &b1).unwrap());
        let g = Guard::atom(x, Relation::Gt, ConstRef::Zero).and(&Guard::atom(x, Relation::Lt, ConstRef::Cx));
        assert!(satisfies(&val(&[(7, 2)]), &g, &b1).unwrap());
        assert!(!satisfies(&val(&[(7, 1)]), &g, &b1).unwrap());
    }

    #[test]
    fn guard_on_unknown_clock_is_an_error() {
        let b1 = ClockBounds::new(vec![7]).unwrap();
        let g = Guard::atom(ClockId(3), Relation::Le, ConstRef::Zero);
        assert!(matches!(satisfies(&val(&[(0, 1)]), &g, &b1), Err(ModelError::UnknownClock { clock: 3, .. })));
    }

    #[test]
    fn reset_examples() {
        let v = val(&[(3, 1), (5, 1)]);
        assert_eq!(apply_reset(&v, &set(&[0])), val(&[(0, 1), (5, 1)]));
        assert_eq!(apply_reset(&v, &set(&[])), v);
        assert_eq!(apply_reset(&v, &set(&[0, 1])), val(&[(0, 1), (0, 1)]));
    }

    #[test]
    fn flip_examples() {
        let b = ClockBounds::new(vec![2]).unwrap();
        assert_eq!(apply_flip_update(&val(&[(3, 10)]), &set(&[0]), &b).unwrap(), val(&[(17, 10)]));
        assert_eq!(apply_flip_update(&val(&[(2, 1)]), &set(&[0]), &b).unwrap(), val(&[(0, 1)]));
        assert!(matches!(
            apply_flip_update(&val(&[(5, 2)]), &set(&[0]), &b),
            Err(ModelError::FlipBeyondBound { clock: 0, .. })
        ));
    }

    #[test]
    fn flip_swaps_time_to_bounds() {
        let b = ClockBounds::new(vec![7]).unwrap();
        let before = val(&[(5, 1)]);
        let after = apply_flip_update(&before, &set(&[0]), &b).unwrap();
        let c = q(7, 1);
        let (a1, b1) = (c.clone() - before[ClockId(0)].clone(), before[ClockId(0)].clone());
        let (a2, b2) = (c - after[ClockId(0)].clone(), after[ClockId(0)].clone());
        assert_eq!(after, val(&[(2, 1)]));
        assert_eq!((a1, b1), (q(2, 1), q(5, 1)));
        assert_eq!((a2.clone(), b2.clone()), (q(5, 1), q(2, 1)));
        assert_eq!(a2, q(5, 1));
    }

    #[test]
    fn direction_algebra() {
        use Direction::*;
        for d in [MinusOne, MinusZero, Zero, PlusOne] {
            assert_eq!(d.flipped().flipped(), d);
            assert_eq!(d.toggled().toggled(), d);
            assert_eq!(d.flipped().toggled(), d.toggled().flipped());
        }
        assert_eq!(PlusOne.toggled(), Zero);
        assert_ne!(Zero, MinusZero);
        let dm = DirectionMap::forward(2).after_action(&set(&[0]), &set(&[0, 1]));
        assert_eq!(dm.as_slice(), &[MinusZero, Zero]);
    }

    #[test]
    fn builder_rejects_illegal_constants() {
        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        let x = b.clock("x", 7).unwrap();
        let a = b.location("a").unwrap();
        b.initial(a);
        b.invariant(a, Guard::atom(x, Relation::Le, ConstRef::Int(3)));
        assert!(matches!(b.build(), Err(ModelError::IllegalConstant { constant: 3, .. })));

        let mut b = AutomatonBuilder::new(Mode::Extended);
        let x = b.clock("x", 7).unwrap();
        let a = b.location("a").unwrap();
        b.invariant(a, Guard::atom(x, Relation::Le, ConstRef::Int(3)));
        assert!(b.clone().build().is_ok());
        b.invariant(a, Guard::atom(x, Relation::Le, ConstRef::Int(8)));
        assert!(matches!(b.build(), Err(ModelError::ConstantOutOfRange { constant: 8, .. })));
    }

    #[test]
    fn builder_rejects_duplicates_and_dangling_references() {
        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        b.clock("x", 1).unwrap();
        assert_eq!(b.clock("x", 2), Err(ModelError::DuplicateClock("x".into())));
        assert!(matches!(b.clock("y", 0), Err(ModelError::NonPositiveBound(_))));
        let a = b.location("a").unwrap();
        assert!(b.location("a").is_err());
        b.transition(Transition::new(a, "go", LocId(9)));
        assert_eq!(b.build(), Err(ModelError::UnknownLocation(9)));
    }

    fn arb_fraction() -> impl Strategy<Value = Rational> {
        (0i64..200, 1i64..40).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn floor_plus_fraction_is_identity(t in arb_fraction()) {
            let fr = fractional_part(&t);
            prop_assert!(fr >= q(0, 1) && fr < q(1, 1));
            prop_assert_eq!(t.floor_value() + fr, t);
        }

        #[test]
        fn flip_is_an_involution_within_bounds(
            bound in 1u32..6,
            nums in proptest::collection::vec((0i64..=96, 0i64..=96), 2),
            mask in 0usize..4,
        ) {
            let bounds = ClockBounds::new(vec![bound, bound + 1]).unwrap();
            let v = ClockValuation::<Rational>::from_values(
                nums.iter().enumerate()
                    .map(|(i, &(n, _))| q(n * i64::from(bounds.as_slice()[i]), 96))
                    .collect(),
            );
            let mu: ClockSet = (0..2).filter(|i| mask & (1 << i) != 0).map(ClockId).collect();
            let once = apply_flip_update(&v, &mu, &bounds).unwrap();
            for (x, value) in once.iter() {
                prop_assert!(*value >= q(0, 1) && *value <= bounds.scalar(x));
            }
            prop_assert_eq!(apply_flip_update(&once, &mu, &bounds).unwrap(), v);
        }

        #[test]
        fn conjunction_is_pointwise(n in 0i64..=40, k1 in 0usize..5, k2 in 0usize..5, c1 in any::<bool>(), c2 in any::<bool>()) {
            let rels = [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt];
            let bounds = ClockBounds::new(vec![4]).unwrap();
            let v = val(&[(n, 8)]);
            let pick = |c: bool| if c { ConstRef::Cx } else { ConstRef::Zero };
            let g1 = Guard::atom(ClockId(0), rels[k1], pick(c1));
            let g2 = Guard::atom(ClockId(0), rels[k2], pick(c2));
            prop_assert_eq!(
                satisfies(&v, &g1.and(&g2), &bounds).unwrap(),
                satisfies(&v, &g1, &bounds).unwrap() && satisfies(&v, &g2, &bounds).unwrap()
            );
        }
    }
}
