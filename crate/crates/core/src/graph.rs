//! Region graph of a translated automaton and the emptiness check built on
//! it.
//!
//! Each graph state keeps the concrete translated state that first reached
//! it. Delay edges advance that member to the next region and action edges
//! fire translated transitions on it, so every path in the graph is backed
//! by a concrete run and witnesses replay by construction.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use thiserror::Error;

use crate::model::{DirectionMap, HourglassAutomaton, LocId};
use crate::regions::{region_count_bound, region_of, successor_delay, EquivalenceOptions, RegionError, RegionTuple};
use crate::scalar::Scalar;
use crate::semantics::{run_word, RunTrace, TimedMove, TimedWord};
use crate::translation::{translate, ExtendedTimedAutomaton, TranslatedState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GraphOptions {
    pub refine_half_points: bool,
    /// Build graphs for three or more clocks anyway, with a warning.
    pub unsound: bool,
}

impl GraphOptions {
    pub fn equivalence(&self) -> EquivalenceOptions {
        EquivalenceOptions { refine_half_points: self.refine_half_points, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{clocks} clocks: region successors are unsound above two clocks (pass --unsound to build anyway)")]
    RefusedUnsound { clocks: usize },
    #[error("the automaton toggles clocks: the half-point refinement is required (pass --refine)")]
    RefusedUnrefined,
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("witness failed to replay: {0}")]
    Soundness(String),
}

impl GraphError {
    /// Refusals are decisions not to run, as opposed to failures.
    pub fn is_refusal(&self) -> bool {
        matches!(self, GraphError::RefusedUnsound { .. } | GraphError::RefusedUnrefined)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionState {
    pub location: LocId,
    pub region: RegionTuple,
    pub directions: DirectionMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionEdge {
    pub action: String,
    /// Index into the translated automaton's transitions.
    pub variant: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Edge<T> {
    Delay { delay: T, target: usize },
    Action(ActionEdge),
}

#[derive(Debug, Clone)]
pub struct RegionGraph<T> {
    eta: ExtendedTimedAutomaton,
    states: Vec<RegionState>,
    members: Vec<TranslatedState<T>>,
    delay_edges: Vec<Option<(T, usize)>>,
    action_edges: Vec<Vec<ActionEdge>>,
    initials: Vec<usize>,
    finals: BTreeSet<usize>,
    warnings: Vec<String>,
}

impl<T: Scalar> RegionGraph<T> {
    pub fn automaton(&self) -> &ExtendedTimedAutomaton {
        &self.eta
    }

    pub fn states(&self) -> &[RegionState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// The concrete translated state that first reached state `id`.
    pub fn member(&self, id: usize) -> &TranslatedState<T> {
        &self.members[id]
    }

    pub fn delay_edge(&self, id: usize) -> Option<&(T, usize)> {
        self.delay_edges[id].as_ref()
    }

    pub fn action_edges(&self, id: usize) -> &[ActionEdge] {
        &self.action_edges[id]
    }

    pub fn initials(&self) -> &[usize] {
        &self.initials
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn edge_count(&self) -> usize {
        self.delay_edges.iter().flatten().count() + self.action_edges.iter().map(Vec::len).sum::<usize>()
    }

    /// `|S| * region_count_bound * 4^|X|`.
    pub fn state_bound(&self) -> BigUint {
        let a = self.eta.base();
        let n = a.clock_count();
        BigUint::from(a.locations().len()) * region_count_bound(a.bounds(), n) * BigUint::from(4u32).pow(n as u32)
    }

    /// Outgoing edges in exploration order: the delay edge, then action
    /// edges in transition order.
    pub fn edges(&self, id: usize) -> Vec<Edge<T>> {
        let mut out = Vec::new();
        if let Some((delay, target)) = &self.delay_edges[id] {
            out.push(Edge::Delay { delay: delay.clone(), target: *target });
        }
        out.extend(self.action_edges[id].iter().cloned().map(Edge::Action));
        out
    }

    /// Adjacency dump: `s<id> <loc> | <region> | d=<dirs>` per state, then
    /// the tags `half-sum-band`, `initial` and `final` where they apply.
    /// Edges are indented below their source.
    pub fn dump(&self) -> String {
        let a = self.eta.base();
        let initials: BTreeSet<usize> = self.initials.iter().copied().collect();
        let mut out = String::new();
        for (id, s) in self.states.iter().enumerate() {
            let _ = write!(out, "s{id} {} | {} | d={}", a.location_name(s.location), s.region, s.directions);
            if s.region.is_half_sum_band() {
                out.push_str(" half-sum-band");
            }
            if initials.contains(&id) {
                out.push_str(" initial");
            }
            if self.finals.contains(&id) {
                out.push_str(" final");
            }
            out.push('\n');
            if let Some((delay, target)) = &self.delay_edges[id] {
                let _ = writeln!(out, "  delay {delay} -> s{target}");
            }
            for e in &self.action_edges[id] {
                let _ = writeln!(out, "  {} #{} -> s{}", e.action, e.variant, e.target);
            }
        }
        out
    }
}

struct Builder<'a, T> {
    eta: &'a ExtendedTimedAutomaton,
    graph: RegionGraph<T>,
    index: HashMap<RegionState, usize>,
    queue: VecDeque<usize>,
    opts: EquivalenceOptions,
}

impl<T: Scalar> Builder<'_, T> {
    fn intern(&mut self, member: TranslatedState<T>) -> usize {
        let key = RegionState {
            location: member.location,
            region: region_of(&member.values, self.eta.bounds(), &self.opts),
            directions: member.directions.clone(),
        };
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.graph.states.len();
        if self.eta.base().is_final(key.location) {
            self.graph.finals.insert(id);
        }
        self.index.insert(key.clone(), id);
        self.graph.states.push(key);
        self.graph.members.push(member);
        self.graph.delay_edges.push(None);
        self.graph.action_edges.push(Vec::new());
        self.queue.push_back(id);
        id
    }

    fn expand(&mut self, id: usize) -> Result<(), GraphError> {
        let member = self.graph.members[id].clone();
        let eta = self.eta;
        if member.directions.any_running() {
            if let Some((t, _)) = successor_delay(&member.values, &member.directions, eta.bounds(), &self.opts)? {
                if let Some(next) = eta.delay(&member, &t) {
                    let target = self.intern(next);
                    self.graph.delay_edges[id] = Some((t, target));
                }
            }
        }
        for (variant, tr) in eta.transitions().iter().enumerate() {
            if let Some(next) = eta.fire(&member, variant) {
                let target = self.intern(next);
                self.graph.action_edges[id].push(ActionEdge { action: tr.action.clone(), variant, target });
            }
        }
        Ok(())
    }
}

/// Explores the reachable region graph breadth-first from the initial
/// states.
pub fn build_region_graph<T: Scalar>(
    eta: &ExtendedTimedAutomaton,
    opts: &GraphOptions,
) -> Result<RegionGraph<T>, GraphError> {
    let a = eta.base();
    let clocks = a.clock_count();
    let mut warnings = Vec::new();
    if clocks > 2 {
        if !opts.unsound {
            return Err(GraphError::RefusedUnsound { clocks });
        }
        warnings.push(format!(
            "{clocks} clocks: delay successors may merge states with different futures; verdicts are not guaranteed"
        ));
    }
    if a.has_toggles() && !opts.refine_half_points {
        return Err(GraphError::RefusedUnrefined);
    }
    let mut b = Builder {
        eta,
        graph: RegionGraph {
            eta: eta.clone(),
            states: Vec::new(),
            members: Vec::new(),
            delay_edges: Vec::new(),
            action_edges: Vec::new(),
            initials: Vec::new(),
            finals: BTreeSet::new(),
            warnings,
        },
        index: HashMap::new(),
        queue: VecDeque::new(),
        opts: opts.equivalence(),
    };
    for s in eta.initial_states::<T>() {
        let id = b.intern(s);
        if !b.graph.initials.contains(&id) {
            b.graph.initials.push(id);
        }
    }
    while let Some(id) = b.queue.pop_front() {
        b.expand(id)?;
    }
    Ok(b.graph)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Empty,
    NonEmpty,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Empty => "EMPTY",
            Verdict::NonEmpty => "NONEMPTY",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep<T> {
    pub state: usize,
    /// Edge leading to the next step; `None` on the last one.
    pub edge: Option<Edge<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStats {
    pub states: usize,
    pub edges: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct EmptinessResult<T> {
    pub verdict: Verdict,
    pub path: Option<Vec<PathStep<T>>>,
    pub word: Option<TimedWord<T>>,
    pub replay: Option<RunTrace<T>>,
    pub stats: GraphStats,
    pub warnings: Vec<String>,
}

/// Shortest path (in edges) from an initial state to a final one.
pub fn shortest_accepting_path<T: Scalar>(g: &RegionGraph<T>) -> Option<Vec<PathStep<T>>> {
    let mut parent: Vec<Option<(usize, Edge<T>)>> = vec![None; g.len()];
    let mut seen = vec![false; g.len()];
    let mut queue = VecDeque::new();
    for &i in g.initials() {
        if !seen[i] {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(id) = queue.pop_front() {
        if g.finals().contains(&id) {
            let mut path = vec![PathStep { state: id, edge: None }];
            let mut cur = id;
            while let Some((prev, edge)) = parent[cur].clone() {
                path.push(PathStep { state: prev, edge: Some(edge) });
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        for edge in g.edges(id) {
            let target = match &edge {
                Edge::Delay { target, .. } => *target,
                Edge::Action(e) => e.target,
            };
            if !seen[target] {
                seen[target] = true;
                parent[target] = Some((id, edge));
                queue.push_back(target);
            }
        }
    }
    None
}

/// Turns a graph path into a timed word and replays it on `a`.
pub fn extract_timed_witness<T: Scalar>(
    path: &[PathStep<T>],
    a: &HourglassAutomaton,
) -> Result<(TimedWord<T>, RunTrace<T>), GraphError> {
    let mut word = TimedWord::default();
    let mut pending = T::zero();
    for step in path {
        match &step.edge {
            Some(Edge::Delay { delay, .. }) => pending = pending + delay.clone(),
            Some(Edge::Action(e)) => {
                word.moves.push(TimedMove { delay: pending.clone(), action: e.action.clone() });
                pending = T::zero();
            }
            None => {}
        }
    }
    let trace = run_word(a, &word);
    if !trace.accepting {
        return Err(GraphError::Soundness(format!("{} on a word of {} moves", trace, word.len())));
    }
    Ok((word, trace))
}

/// Decides whether `a` accepts some timed word. A non-empty verdict comes
/// with a witness that has been replayed on `a`.
pub fn check_emptiness<T: Scalar>(
    a: &HourglassAutomaton,
    opts: &GraphOptions,
) -> Result<EmptinessResult<T>, GraphError> {
    let start = Instant::now();
    let eta = translate(a);
    let g = build_region_graph::<T>(&eta, opts)?;
    let path = shortest_accepting_path(&g);
    let (word, replay) = match &path {
        Some(p) => {
            let (w, t) = extract_timed_witness(p, a)?;
            (Some(w), Some(t))
        }
        None => (None, None),
    };
    Ok(EmptinessResult {
        verdict: if path.is_some() { Verdict::NonEmpty } else { Verdict::Empty },
        path,
        word,
        replay,
        stats: GraphStats { states: g.len(), edges: g.edge_count(), wall_time: start.elapsed() },
        warnings: g.warnings().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AutomatonBuilder, ConstRef, Guard, Mode, Relation, Transition};
    use crate::regions::Interval;
    use crate::Rational;

    fn one_clock_to_top() -> HourglassAutomaton {
        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        let x = b.clock("x", 2).unwrap();
        let s = b.location("s").unwrap();
        let f = b.location("f").unwrap();
        b.initial(s).final_location(f);
        b.transition(Transition::new(s, "a", f).when(Guard::atom(x, Relation::Ge, ConstRef::Cx)));
        b.build().unwrap()
    }

    #[test]
    fn trivial_graph() {
        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        b.clock("x", 1).unwrap();
        let s = b.location("s").unwrap();
        b.initial(s).final_location(s);
        let a = b.build().unwrap();
        let g = build_region_graph::<Rational>(&translate(&a), &GraphOptions::default()).unwrap();
        assert_eq!(g.initials(), &[0]);
        assert!(g.finals().contains(&0));
        let r = check_emptiness::<Rational>(&a, &GraphOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NonEmpty);
        assert!(r.word.unwrap().is_empty());
        assert_eq!(r.replay.unwrap().elapsed, Rational::from_int(0));
    }

    #[test]
    fn delay_chain_then_action() {
        let a = one_clock_to_top();
        let g = build_region_graph::<Rational>(&translate(&a), &GraphOptions::default()).unwrap();
        let mut chain = Vec::new();
        let mut id = g.initials()[0];
        loop {
            chain.push(g.states()[id].region.alpha[0]);
            match g.delay_edge(id) {
                Some((_, next)) => id = *next,
                None => break,
            }
        }
        use Interval::*;
        assert_eq!(chain, vec![Point(0), Open(0), Point(1), Open(1), Point(2), Above]);
        let r = check_emptiness::<Rational>(&a, &GraphOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NonEmpty);
        let w = r.word.unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.moves[0].delay, Rational::from_int(2));
        assert_eq!(w.moves[0].action, "a");
    }

    #[test]
    fn unsatisfiable_final_guard_is_empty() {
        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        let x = b.clock("x", 2).unwrap();
        let s = b.location("s").unwrap();
        let f = b.location("f").unwrap();
        b.initial(s).final_location(f);
        b.transition(Transition::new(s, "a", f).when(Guard::atom(x, Relation::Lt, ConstRef::Zero)));
        let r = check_emptiness::<Rational>(&b.build().unwrap(), &GraphOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Empty);
        assert!(r.path.is_none() && r.word.is_none());
    }

    #[test]
    fn refusals() {
        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        for name in ["x", "y", "z"] {
            b.clock(name, 1).unwrap();
        }
        let s = b.location("s").unwrap();
        b.initial(s);
        let a = b.build().unwrap();
        let err = check_emptiness::<Rational>(&a, &GraphOptions::default()).unwrap_err();
        assert_eq!(err, GraphError::RefusedUnsound { clocks: 3 });
        assert!(err.is_refusal());
        let r = check_emptiness::<Rational>(&a, &GraphOptions { unsound: true, ..Default::default() }).unwrap();
        assert_eq!(r.warnings.len(), 1);

        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        let x = b.clock("x", 1).unwrap();
        let s = b.location("s").unwrap();
        b.initial(s);
        b.transition(Transition::new(s, "t", s).toggle([x]));
        let a = b.build().unwrap();
        assert_eq!(
            check_emptiness::<Rational>(&a, &GraphOptions::default()).unwrap_err(),
            GraphError::RefusedUnrefined
        );
        let refined = GraphOptions { refine_half_points: true, ..Default::default() };
        assert_eq!(check_emptiness::<Rational>(&a, &refined).unwrap().verdict, Verdict::Empty);
    }

    #[test]
    fn paused_clock_can_still_be_reached_through_flips() {
        // pause y at 1/2 by waiting on x, then check y's value with guards
        let mut b = AutomatonBuilder::new(Mode::Hourglass);
        let x = b.clock("x", 1).unwrap();
        let y = b.clock("y", 2).unwrap();
        let s = b.location("s").unwrap();
        let p = b.location("p").unwrap();
        let f = b.location("f").unwrap();
        b.initial(s).final_location(f);
        b.transition(Transition::new(s, "stop", p).when(Guard::atom(x, Relation::Ge, ConstRef::Cx)).toggle([y]));
        b.transition(Transition::new(p, "go", f).when(Guard::atom(y, Relation::Lt, ConstRef::Cx)).flip([x]));
        let a = b.build().unwrap();
        let refined = GraphOptions { refine_half_points: true, ..Default::default() };
        let r = check_emptiness::<Rational>(&a, &refined).unwrap();
        assert_eq!(r.verdict, Verdict::NonEmpty);
        assert!(r.replay.unwrap().accepting);
        let g = build_region_graph::<Rational>(&translate(&a), &refined).unwrap();
        assert!(g.dump().starts_with("s0 s | alpha=[0,0],[0,0]"));
        assert!(BigUint::from(g.len()) <= g.state_bound());
    }
}
