//! Translation of hourglass automata into timed automata with forward-only
//! clocks and the update `x := c_x - x`.
//!
//! A translated clock holds the time since its hourglass last left the bound
//! it is running away from. With direction `+` that is the hourglass value
//! itself; with direction `-` it is `c_x` minus the hourglass value. Values
//! past `c_x` mean the hourglass is resting on its bound. Guards and
//! invariants keep their hourglass form and are evaluated on the reading
//! recovered from the forward value and the direction.

use std::fmt;

use crate::model::{
    ClockBounds, ClockId, ClockSet, ClockValuation, ConstRef, DirectionMap, Guard, HourglassAutomaton, LocId, Relation,
};
use crate::scalar::{min_of, Scalar};
use crate::semantics::TimedWord;

/// One guarded variant of a hourglass transition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedTransition {
    /// Index of the hourglass transition this variant comes from.
    pub origin: usize,
    pub source: LocId,
    pub action: String,
    /// The original guard, evaluated on hourglass readings.
    pub guard: Guard,
    /// `x >= cx` / `x < cx` atoms on the forward values selecting the variant.
    pub bound_guard: Guard,
    /// Flipped clocks resting on a bound: `x := 0`.
    pub resets: ClockSet,
    /// Flipped clocks strictly inside their range: `x := c_x - x`.
    pub flip_updates: ClockSet,
    /// Direction delta: negate these...
    pub flips: ClockSet,
    /// ...then pause or resume these.
    pub toggles: ClockSet,
    pub target: LocId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedTimedAutomaton {
    base: HourglassAutomaton,
    transitions: Vec<ExtendedTransition>,
}

impl ExtendedTimedAutomaton {
    /// Locations, clocks, invariants, initial and final sets.
    pub fn base(&self) -> &HourglassAutomaton {
        &self.base
    }

    pub fn bounds(&self) -> &ClockBounds {
        self.base.bounds()
    }

    pub fn transitions(&self) -> &[ExtendedTransition] {
        &self.transitions
    }

    pub fn delay_rule(&self) -> DelayRule {
        DelayRule
    }
}

/// Splits every flip transition into `2^|flips|` variants, one per subset of
/// flipped clocks that are resting on their bound.
pub fn translate(a: &HourglassAutomaton) -> ExtendedTimedAutomaton {
    let mut transitions = Vec::new();
    for (origin, tr) in a.transitions().iter().enumerate() {
        let mu: Vec<ClockId> = tr.flips.iter().copied().collect();
        for mask in 0u32..(1 << mu.len()) {
            let mut bound_guard = Vec::new();
            let mut resets = ClockSet::new();
            let mut flip_updates = ClockSet::new();
            for (i, &x) in mu.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    bound_guard.push(crate::model::GuardAtom::new(x, Relation::Ge, ConstRef::Cx));
                    resets.insert(x);
                } else {
                    bound_guard.push(crate::model::GuardAtom::new(x, Relation::Lt, ConstRef::Cx));
                    flip_updates.insert(x);
                }
            }
            transitions.push(ExtendedTransition {
                origin,
                source: tr.source,
                action: tr.action.clone(),
                guard: tr.guard.clone(),
                bound_guard: Guard::from_atoms(bound_guard),
                resets,
                flip_updates,
                flips: tr.flips.clone(),
                toggles: tr.toggles.clone(),
                target: tr.target,
            });
        }
    }
    ExtendedTimedAutomaton { base: a.clone(), transitions }
}

/// Delay rule of translated automata: running clocks (`+1` or `-1`) move
/// forward at rate 1, paused clocks stay put. No saturation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayRule;

impl DelayRule {
    pub fn apply<T: Scalar>(&self, w: &ClockValuation<T>, dirs: &DirectionMap, t: &T) -> ClockValuation<T> {
        delay_forward(w, dirs, t)
    }
}

pub fn concretize_direction_semantics(_eta: &ExtendedTimedAutomaton) -> DelayRule {
    DelayRule
}

pub fn delay_forward<T: Scalar>(w: &ClockValuation<T>, dirs: &DirectionMap, t: &T) -> ClockValuation<T> {
    ClockValuation::from_values(
        w.iter().map(|(x, v)| if dirs.get(x).is_running() { v.clone() + t.clone() } else { v.clone() }).collect(),
    )
}

/// Hourglass value encoded by a forward value and a direction.
pub fn reading_of<T: Scalar>(w: &T, negative: bool, bound: &T) -> T {
    let m = min_of(w, bound);
    if negative {
        bound.clone() - m
    } else {
        m
    }
}

pub fn reading<T: Scalar>(w: &ClockValuation<T>, dirs: &DirectionMap, bounds: &ClockBounds) -> ClockValuation<T> {
    ClockValuation::from_values(
        w.iter().map(|(x, v)| reading_of(v, dirs.get(x).is_negative(), &bounds.scalar(x))).collect(),
    )
}

/// Inverse of [`reading`] on `[0, c_x]`.
pub fn encode<T: Scalar>(h: &ClockValuation<T>, dirs: &DirectionMap, bounds: &ClockBounds) -> ClockValuation<T> {
    ClockValuation::from_values(
        h.iter()
            .map(|(x, v)| if dirs.get(x).is_negative() { bounds.scalar::<T>(x) - v.clone() } else { v.clone() })
            .collect(),
    )
}

/// Applies the value updates of a variant (resets, then `c_x - x`).
pub fn apply_updates<T: Scalar>(
    w: &ClockValuation<T>,
    tr: &ExtendedTransition,
    bounds: &ClockBounds,
) -> ClockValuation<T> {
    let mut values = w.values().to_vec();
    for x in &tr.resets {
        values[x.0] = T::zero();
    }
    for x in &tr.flip_updates {
        values[x.0] = bounds.scalar::<T>(*x) - values[x.0].clone();
    }
    ClockValuation::from_values(values)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TranslatedState<T> {
    pub location: LocId,
    pub values: ClockValuation<T>,
    pub directions: DirectionMap,
}

impl ExtendedTimedAutomaton {
    fn invariant_holds<T: Scalar>(&self, loc: LocId, w: &ClockValuation<T>, dirs: &DirectionMap) -> bool {
        let h = reading(w, dirs, self.bounds());
        self.base.invariant(loc).satisfies(&h, self.bounds()).unwrap_or(false)
    }

    pub fn initial_states<T: Scalar>(&self) -> Vec<TranslatedState<T>> {
        let n = self.base.clock_count();
        self.base
            .initial()
            .iter()
            .map(|&location| TranslatedState {
                location,
                values: ClockValuation::zero(n),
                directions: DirectionMap::forward(n),
            })
            .filter(|s| self.invariant_holds(s.location, &s.values, &s.directions))
            .collect()
    }

    pub fn delay<T: Scalar>(&self, s: &TranslatedState<T>, t: &T) -> Option<TranslatedState<T>> {
        if *t < T::zero() {
            return None;
        }
        let values = delay_forward(&s.values, &s.directions, t);
        self.invariant_holds(s.location, &values, &s.directions).then(|| TranslatedState {
            location: s.location,
            values,
            directions: s.directions.clone(),
        })
    }

    /// Whether variant `index` is enabled in `s` (source, both guards).
    pub fn enabled<T: Scalar>(&self, s: &TranslatedState<T>, index: usize) -> bool {
        let tr = &self.transitions[index];
        if tr.source != s.location {
            return false;
        }
        let h = reading(&s.values, &s.directions, self.bounds());
        tr.guard.satisfies(&h, self.bounds()).unwrap_or(false)
            && tr.bound_guard.satisfies(&s.values, self.bounds()).unwrap_or(false)
    }

    pub fn fire<T: Scalar>(&self, s: &TranslatedState<T>, index: usize) -> Option<TranslatedState<T>> {
        if !self.enabled(s, index) {
            return None;
        }
        let tr = &self.transitions[index];
        let values = apply_updates(&s.values, tr, self.bounds());
        let directions = s.directions.after_action(&tr.flips, &tr.toggles);
        self.invariant_holds(tr.target, &values, &directions).then_some(TranslatedState {
            location: tr.target,
            values,
            directions,
        })
    }

    /// Acceptance of a timed word under the translated semantics, trying
    /// every matching variant.
    pub fn accepts<T: Scalar>(&self, w: &TimedWord<T>) -> bool {
        self.initial_states().iter().any(|s| self.accepts_from(s, w, 0))
    }

    fn accepts_from<T: Scalar>(&self, s: &TranslatedState<T>, w: &TimedWord<T>, depth: usize) -> bool {
        let Some(mv) = w.moves.get(depth) else {
            return self.base.is_final(s.location);
        };
        let Some(waited) = self.delay(s, &mv.delay) else {
            return false;
        };
        (0..self.transitions.len())
            .filter(|&i| self.transitions[i].action == mv.action)
            .filter_map(|i| self.fire(&waited, i))
            .any(|next| self.accepts_from(&next, w, depth + 1))
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, a: &HourglassAutomaton, set: &ClockSet) -> fmt::Result {
    let names: Vec<_> = set.iter().map(|&x| a.clock_name(x)).collect();
    write!(f, "{{{}}}", names.join(", "))
}

fn write_guard(f: &mut fmt::Formatter<'_>, a: &HourglassAutomaton, g: &Guard) -> fmt::Result {
    let atoms: Vec<String> = g
        .atoms()
        .iter()
        .map(|atom| {
            let rhs = match atom.constant {
                ConstRef::Zero => "0".to_string(),
                ConstRef::Cx => "cx".to_string(),
                ConstRef::Int(k) => k.to_string(),
            };
            format!("{} {} {}", a.clock_name(atom.clock), atom.relation.symbol(), rhs)
        })
        .collect();
    f.write_str(&atoms.join(" & "))
}

impl fmt::Display for ExtendedTimedAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.base;
        writeln!(f, "# forward clocks, unbounded above; guards read hourglass values")?;
        let clocks: Vec<_> = a.clocks().iter().map(|c| format!("{}={}", c.name, c.bound)).collect();
        writeln!(f, "clocks: {}", clocks.join(", "))?;
        writeln!(f, "locations: {}", a.locations().join(", "))?;
        let names = |set: &std::collections::BTreeSet<LocId>| {
            set.iter().map(|&l| a.location_name(l).to_string()).collect::<Vec<_>>().join(", ")
        };
        writeln!(f, "initial: {}", names(a.initial()))?;
        writeln!(f, "final: {}", names(a.finals()))?;
        for (i, g) in a.invariants().iter().enumerate() {
            if !g.is_true() {
                write!(f, "invariant {}: ", a.location_name(LocId(i)))?;
                write_guard(f, a, g)?;
                writeln!(f)?;
            }
        }
        for tr in &self.transitions {
            write!(
                f,
                "trans #{} {} -> {} on {}",
                tr.origin,
                a.location_name(tr.source),
                a.location_name(tr.target),
                tr.action
            )?;
            if !tr.guard.is_true() {
                write!(f, " when ")?;
                write_guard(f, a, &tr.guard)?;
            }
            if !tr.bound_guard.is_true() {
                write!(f, " [")?;
                write_guard(f, a, &tr.bound_guard)?;
                write!(f, "]")?;
            }
            if !tr.resets.is_empty() {
                write!(f, " reset ")?;
                write_set(f, a, &tr.resets)?;
            }
            if !tr.flip_updates.is_empty() {
                let updates: Vec<_> =
                    tr.flip_updates.iter().map(|&x| format!("{0} := cx - {0}", a.clock_name(x))).collect();
                write!(f, " update {{{}}}", updates.join(", "))?;
            }
            if !tr.flips.is_empty() {
                write!(f, " negate ")?;
                write_set(f, a, &tr.flips)?;
            }
            if !tr.toggles.is_empty() {
                write!(f, " toggle ")?;
                write_set(f, a, &tr.toggles)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AutomatonBuilder, Direction, Mode, Transition};
    use crate::semantics::{initial_states, run_word};
    use crate::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn flipper() -> HourglassAutomaton {
        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        let x = b.clock("x", 7).unwrap();
        let y = b.clock("y", 3).unwrap();
        let l = b.location("l").unwrap();
        let m = b.location("m").unwrap();
        b.initial(l).final_location(m);
        b.transition(Transition::new(l, "f", l).when(Guard::atom(y, Relation::Gt, ConstRef::Zero)).flip([x]));
        b.transition(Transition::new(l, "t", l).toggle([y]));
        b.transition(Transition::new(l, "ff", l).flip([x, y]));
        b.transition(Transition::new(l, "done", m).when(Guard::atom(x, Relation::Le, ConstRef::Zero)));
        b.build().unwrap()
    }

    #[test]
    fn flip_transition_splits_on_the_bound() {
        let eta = translate(&flipper());
        let variants: Vec<_> = eta.transitions().iter().filter(|t| t.origin == 0).collect();
        assert_eq!(variants.len(), 2);
        let x = ClockId(0);
        assert_eq!(variants[0].bound_guard, Guard::atom(x, Relation::Lt, ConstRef::Cx));
        assert_eq!(variants[0].flip_updates, [x].into_iter().collect());
        assert!(variants[0].resets.is_empty());
        assert_eq!(variants[1].bound_guard, Guard::atom(x, Relation::Ge, ConstRef::Cx));
        assert_eq!(variants[1].resets, [x].into_iter().collect());
        for v in variants {
            assert_eq!(v.guard, Guard::atom(ClockId(1), Relation::Gt, ConstRef::Zero));
            assert_eq!(v.flips, [x].into_iter().collect());
        }
        assert_eq!(eta.transitions().iter().filter(|t| t.origin == 2).count(), 4);
    }

    #[test]
    fn toggles_only_touch_directions() {
        let eta = translate(&flipper());
        let t: Vec<_> = eta.transitions().iter().filter(|t| t.origin == 1).collect();
        assert_eq!(t.len(), 1);
        assert!(t[0].resets.is_empty() && t[0].flip_updates.is_empty() && t[0].bound_guard.is_true());
        assert_eq!(t[0].toggles, [ClockId(1)].into_iter().collect());
    }

    #[test]
    fn flip_free_automata_translate_one_to_one() {
        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        let x = b.clock("x", 2).unwrap();
        let l = b.location("l").unwrap();
        b.initial(l);
        b.transition(Transition::new(l, "a", l).when(Guard::atom(x, Relation::Ge, ConstRef::Cx)));
        let a = b.build().unwrap();
        let eta = translate(&a);
        assert_eq!(eta.transitions().len(), 1);
        let t = &eta.transitions()[0];
        assert_eq!((t.source, t.target, t.action.as_str()), (l, l, "a"));
        assert_eq!(t.guard, a.transitions()[0].guard);
        assert!(t.bound_guard.is_true() && t.resets.is_empty() && t.flip_updates.is_empty());
        assert_eq!(translate(&eta.base().clone()), eta);
    }

    #[test]
    fn delay_rule_moves_negative_clocks_forward() {
        let rule = concretize_direction_semantics(&translate(&flipper()));
        let w = ClockValuation::from_ratios(&[(2, 1), (1, 1)]);
        let d = DirectionMap::from_vec(vec![Direction::MinusOne, Direction::Zero]);
        assert_eq!(rule.apply(&w, &d, &q(1, 1)), ClockValuation::from_ratios(&[(3, 1), (1, 1)]));
        let d = DirectionMap::forward(2);
        assert_eq!(rule.apply(&w, &d, &q(1, 2)), ClockValuation::from_ratios(&[(5, 2), (3, 2)]));
    }

    #[test]
    fn reading_and_encoding_are_inverse_within_bounds() {
        let bounds = ClockBounds::new(vec![7, 3]).unwrap();
        let d = DirectionMap::from_vec(vec![Direction::MinusOne, Direction::PlusOne]);
        let h = ClockValuation::<Rational>::from_ratios(&[(5, 2), (1, 1)]);
        let w = encode(&h, &d, &bounds);
        assert_eq!(w, ClockValuation::from_ratios(&[(9, 2), (1, 1)]));
        assert_eq!(reading(&w, &d, &bounds), h);
        let past = ClockValuation::<Rational>::from_ratios(&[(9, 1), (4, 1)]);
        assert_eq!(reading(&past, &d, &bounds), ClockValuation::from_ratios(&[(0, 1), (3, 1)]));
    }

    #[test]
    fn translated_run_matches_hourglass_on_a_flip_word() {
        let a = flipper();
        let eta = translate(&a);
        let w = TimedWord::from_pairs(&[(q(3, 1), "f"), (q(3, 1), "done")]);
        assert!(run_word(&a, &w).accepting);
        assert!(eta.accepts(&w));
        let w = TimedWord::from_pairs(&[(q(3, 1), "f"), (q(2, 1), "done")]);
        assert!(!run_word(&a, &w).accepting);
        assert!(!eta.accepts(&w));
        assert_eq!(eta.initial_states::<Rational>().len(), initial_states::<Rational>(&a).len());
    }

    #[test]
    fn pretty_print_lists_variants() {
        let text = translate(&flipper()).to_string();
        assert!(text.contains("trans #0 l -> l on f when y > 0 [x < cx] update {x := cx - x} negate {x}"), "{text}");
        assert!(text.contains("trans #0 l -> l on f when y > 0 [x >= cx] reset {x} negate {x}"), "{text}");
        assert!(text.contains("trans #1 l -> l on t toggle {y}"), "{text}");
    }

    proptest! {
        #[test]
        fn exactly_one_variant_matches_and_updates_stay_non_negative(
            xn in 0i64..=72, yn in 0i64..=32, dx in 0usize..4, dy in 0usize..4,
        ) {
            let dirs = [Direction::PlusOne, Direction::MinusOne, Direction::Zero, Direction::MinusZero];
            let eta = translate(&flipper());
            let s = TranslatedState {
                location: LocId(0),
                values: ClockValuation::from_values(vec![q(xn, 8), q(yn, 8)]),
                directions: DirectionMap::from_vec(vec![dirs[dx], dirs[dy]]),
            };
            for origin in [0usize, 2] {
                let enabled: Vec<_> = (0..eta.transitions().len())
                    .filter(|&i| eta.transitions()[i].origin == origin && eta.enabled(&s, i))
                    .collect();
                let h = reading(&s.values, &s.directions, eta.bounds());
                let original = eta.base().transitions()[origin].guard.satisfies(&h, eta.bounds()).unwrap();
                prop_assert_eq!(enabled.len(), usize::from(original));
                for i in enabled {
                    let next = eta.fire(&s, i).unwrap();
                    for (_, v) in next.values.iter() {
                        prop_assert!(*v >= q(0, 1));
                    }
                    // the hourglass reading survives the flip
                    prop_assert_eq!(reading(&next.values, &next.directions, eta.bounds()), h.clone());
                }
            }
        }
    }
}
