//! Randomised and exhaustive checks of the region theory, the translation
//! and the emptiness procedure.
//!
//! Every check produces a [`Report`]. Reports never contain timings, so the
//! same seed always yields the same text. Trial `i` of a suite draws from
//! the ChaCha8 stream `i` of the master seed, which keeps trials independent
//! of each other and of evaluation order.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{check_emptiness, GraphOptions, Verdict};
use crate::model::{
    apply_flip_update, apply_reset, AutomatonBuilder, ClockBounds, ClockId, ClockSet, ClockValuation, ConstRef,
    DirectionMap, Guard, GuardAtom, HourglassAutomaton, Mode, Relation, Transition,
};
use crate::regions::{
    equivalent, equivalent_constraint_map_check, region_count_bound, region_of, successor_delay, EquivalenceOptions,
    Interval, RegionTuple,
};
use crate::scalar::{floor_to_step, Scalar};
use crate::semantics::{random_explore, run_word, TimedMove, TimedWord};
use crate::translation::translate;

/// Failures listed per section before the rest are only counted.
const SHOWN_FAILURES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub title: String,
    pub trials: u64,
    pub notes: Vec<String>,
    pub failures: Vec<String>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section { title: title.into(), trials: 0, notes: Vec::new(), failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures.push(detail());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report { name: name.into(), sections: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.sections.iter().all(Section::passed)
    }

    pub fn trials(&self) -> u64 {
        self.sections.iter().map(|s| s.trials).sum()
    }

    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    /// `SUITE <name> PASS|FAIL trials=<n>`
    pub fn summary_line(&self) -> String {
        format!("SUITE {} {} trials={}", self.name, if self.passed() { "PASS" } else { "FAIL" }, self.trials())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sections {
            writeln!(f, "== {} ==", s.title)?;
            for note in &s.notes {
                writeln!(f, "  {note}")?;
            }
            writeln!(
                f,
                "  trials={} failures={} {}",
                s.trials,
                s.failures.len(),
                if s.passed() { "PASS" } else { "FAIL" }
            )?;
            for failure in s.failures.iter().take(SHOWN_FAILURES) {
                writeln!(f, "  counterexample: {failure}")?;
            }
            if s.failures.len() > SHOWN_FAILURES {
                writeln!(f, "  ... {} more", s.failures.len() - SHOWN_FAILURES)?;
            }
        }
        writeln!(f, "{}", self.summary_line())
    }
}

/// RNG for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn grid_value<T: Scalar, R: Rng>(rng: &mut R, grid: &T, top: &T) -> T {
    let steps = (top.clone() / grid.clone()).floor_i64();
    grid.clone() * T::from_int(rng.gen_range(0..=steps))
}

fn sample_with<T: Scalar, R: Rng>(rng: &mut R, bounds: &ClockBounds, grid: &T) -> ClockValuation<T> {
    ClockValuation::from_values(
        bounds
            .iter()
            .map(|(_, c)| {
                let top = floor_to_step(&T::from_int(i64::from(c) + 1), grid);
                grid_value(rng, grid, &top)
            })
            .collect(),
    )
}

/// Uniform valuation on multiples of `grid` in `[0, c_x + 1]`.
pub fn sample_valuation<T: Scalar>(bounds: &ClockBounds, grid: &T, seed: u64) -> ClockValuation<T> {
    assert!(*grid > T::zero(), "grid must be positive");
    sample_with(&mut ChaCha8Rng::seed_from_u64(seed), bounds, grid)
}

/// A strictly increasing bijection of `[0, 1)` fixing 0 and 1/2 with
/// `phi(1 - f) = 1 - phi(f)`. Applied to fractional parts it preserves
/// order, zero, halves and every comparison of a pair sum against 1.
struct SymmetricMap<T> {
    knots: Vec<(T, T)>,
}

impl<T: Scalar> SymmetricMap<T> {
    fn random<R: Rng>(rng: &mut R) -> Self {
        let m = rng.gen_range(0..=3);
        let mut pick = || {
            let mut ks: Vec<i64> = (1..64).collect::<Vec<_>>().choose_multiple(rng, m).copied().collect();
            ks.sort_unstable();
            ks
        };
        let xs = pick();
        let ys = pick();
        let mut knots = vec![(T::zero(), T::zero())];
        knots.extend(xs.iter().zip(&ys).map(|(&x, &y)| (T::from_ratio(x, 128), T::from_ratio(y, 128))));
        knots.push((T::half(), T::half()));
        SymmetricMap { knots }
    }

    fn apply(&self, f: &T) -> T {
        if *f > T::half() {
            return T::one() - self.apply(&(T::one() - f.clone()));
        }
        for w in self.knots.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if f <= x1 {
                return y0.clone() + (f.clone() - x0.clone()) * (y1.clone() - y0.clone()) / (x1.clone() - x0.clone());
            }
        }
        unreachable!("fractional parts lie in [0, 1)")
    }
}

/// A valuation equivalent to `v` (for any clock count and either option).
fn equivalent_partner<T: Scalar, R: Rng>(
    rng: &mut R,
    v: &ClockValuation<T>,
    bounds: &ClockBounds,
) -> ClockValuation<T> {
    let phi = SymmetricMap::random(rng);
    ClockValuation::from_values(
        v.iter()
            .map(|(x, value)| {
                let c: T = bounds.scalar(x);
                if *value > c {
                    c + T::from_ratio(rng.gen_range(1..=32), 16)
                } else {
                    value.floor_value() + phi.apply(&value.fract_value())
                }
            })
            .collect(),
    )
}

fn random_subset<R: Rng>(rng: &mut R, clocks: usize) -> ClockSet {
    (0..clocks).filter(|_| rng.gen_bool(0.5)).map(ClockId).collect()
}

fn random_extended_guard<R: Rng>(rng: &mut R, bounds: &ClockBounds) -> Guard {
    const RELATIONS: [Relation; 5] = [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt];
    let atoms = (0..rng.gen_range(1..=3))
        .map(|_| {
            let x = ClockId(rng.gen_range(0..bounds.len()));
            let k = rng.gen_range(0..=bounds.get(x));
            GuardAtom::new(x, *RELATIONS.choose(rng).expect("non-empty"), ConstRef::Int(k))
        })
        .collect();
    Guard::from_atoms(atoms)
}

fn show<T: Scalar>(v: &ClockValuation<T>) -> String {
    v.to_string()
}

/// Equivalence axioms, tuple faithfulness and the five closure properties.
///
/// Every section runs `trials` times except the constructive delay
/// section, which runs `trials / 10` times. Integer delays are also checked
/// with a third clock.
pub fn check_lemma_suite<T: Scalar>(bounds: &ClockBounds, opts: &EquivalenceOptions, trials: u64, seed: u64) -> Report {
    let mut report = Report::new("lemmas");
    let coarse = T::from_ratio(1, 4);
    let fine = T::from_ratio(1, 16);
    let n = bounds.len();

    let mut axioms = Section::new("equivalence axioms");
    let mut faithful = Section::new("tuple faithfulness");
    for i in 0..trials {
        let mut rng = trial_rng(seed, i);
        let (v1, v2, v3) = if i % 2 == 0 {
            let v1 = sample_with(&mut rng, bounds, &coarse);
            (v1, sample_with(&mut rng, bounds, &coarse), sample_with(&mut rng, bounds, &coarse))
        } else {
            let v1: ClockValuation<T> = sample_with(&mut rng, bounds, &fine);
            let v2 = equivalent_partner(&mut rng, &v1, bounds);
            let v3 = equivalent_partner(&mut rng, &v1, bounds);
            (v1, v2, v3)
        };
        let e = |a: &ClockValuation<T>, b: &ClockValuation<T>| equivalent(a, b, bounds, opts);
        let ok = e(&v1, &v1)
            && e(&v1, &v2) == e(&v2, &v1)
            && (!(e(&v1, &v2) && e(&v2, &v3)) || e(&v1, &v3))
            && (i % 2 == 0 || (e(&v1, &v2) && e(&v1, &v3)));
        axioms.record(ok, || format!("v1={} v2={} v3={}", show(&v1), show(&v2), show(&v3)));
        let same = region_of(&v1, bounds, opts) == region_of(&v2, bounds, opts);
        faithful.record(same == e(&v1, &v2), || format!("v1={} v2={}", show(&v1), show(&v2)));
    }
    report.sections.push(axioms);
    report.sections.push(faithful);

    let pair = |rng: &mut ChaCha8Rng, b: &ClockBounds| {
        let v1: ClockValuation<T> = sample_with(rng, b, &fine);
        let v2 = equivalent_partner(rng, &v1, b);
        (v1, v2)
    };

    let mut p1 = Section::new("integer delay");
    let mut p1_three = Section::new("integer delay, three clocks");
    let mut wider: Vec<u32> = bounds.as_slice().to_vec();
    wider.push(bounds.as_slice().first().copied().unwrap_or(2));
    let three = ClockBounds::new(wider).expect("bounds are positive");
    for i in 0..trials {
        let mut rng = trial_rng(seed ^ 0x5031, i);
        for (section, b) in [(&mut p1, bounds), (&mut p1_three, &three)] {
            let (v1, v2) = pair(&mut rng, b);
            let t = T::from_int(rng.gen_range(0..=i64::from(b.as_slice().iter().max().copied().unwrap_or(1)) + 1));
            let ok = equivalent(&v1.shifted(&t), &v2.shifted(&t), b, opts);
            section.record(ok, || format!("v1={} v2={} t={t}", show(&v1), show(&v2)));
        }
    }
    report.sections.push(p1);
    report.sections.push(p1_three);

    let mut p2 = Section::new("delay, constructive");
    let all_running = DirectionMap::forward(n);
    let horizon = i64::from(bounds.as_slice().iter().max().copied().unwrap_or(1)) + 2;
    for i in 0..(trials / 10).max(1) {
        let mut rng = trial_rng(seed ^ 0x5032, i);
        let (v1, v2) = pair(&mut rng, bounds);
        let t1 = T::from_ratio(rng.gen_range(0..=horizon * 64), 64);
        let found = realize_delay(&v1, &v2, &t1, &all_running, bounds, opts);
        p2.record(found.is_some(), || format!("v1={} v2={} t1={t1}", show(&v1), show(&v2)));
    }
    report.sections.push(p2);

    let mut p3 = Section::new("guards");
    let mut p4 = Section::new("resets");
    let mut p5 = Section::new("flips");
    for i in 0..trials {
        let mut rng = trial_rng(seed ^ 0x5035, i);
        let (v1, v2) = pair(&mut rng, bounds);
        let g = random_extended_guard(&mut rng, bounds);
        let ok = g.satisfies(&v1, bounds).ok() == g.satisfies(&v2, bounds).ok();
        p3.record(ok, || format!("v1={} v2={} guard={g:?}", show(&v1), show(&v2)));

        let lambda = random_subset(&mut rng, n);
        let ok = equivalent(&apply_reset(&v1, &lambda), &apply_reset(&v2, &lambda), bounds, opts);
        p4.record(ok, || format!("v1={} v2={} reset={lambda:?}", show(&v1), show(&v2)));

        let mu: ClockSet = random_subset(&mut rng, n).into_iter().filter(|&x| *v1.get(x) <= bounds.scalar(x)).collect();
        let ok = match (apply_flip_update(&v1, &mu, bounds), apply_flip_update(&v2, &mu, bounds)) {
            (Ok(f1), Ok(f2)) => equivalent(&f1, &f2, bounds, opts),
            _ => false,
        };
        p5.record(ok, || format!("v1={} v2={} flip={mu:?}", show(&v1), show(&v2)));
    }
    report.sections.extend([p3, p4, p5]);
    report
}

/// Walks the region successors of `v2` looking for the region of
/// `v1 + t1`; returns the matching delay `t2`.
pub fn realize_delay<T: Scalar>(
    v1: &ClockValuation<T>,
    v2: &ClockValuation<T>,
    t1: &T,
    dirs: &DirectionMap,
    bounds: &ClockBounds,
    opts: &EquivalenceOptions,
) -> Option<T> {
    let goal = crate::translation::delay_forward(v1, dirs, t1);
    let target = region_of(&goal, bounds, opts);
    let mut current = v2.clone();
    let mut elapsed = T::zero();
    loop {
        if region_of(&current, bounds, opts) == target {
            return equivalent(&goal, &current, bounds, opts).then_some(elapsed);
        }
        let (t, next) = successor_delay(&current, dirs, bounds, opts).ok()??;
        elapsed = elapsed + t;
        current = next;
    }
}

/// Flip-mapping lemma on random valuations whose flipped clock is not an
/// integer.
pub fn check_constraint_map_suite<T: Scalar>(bounds: &ClockBounds, trials: u64, seed: u64) -> Report {
    let mut report = Report::new("consistent-update");
    let mut section = Section::new("order/sum mapping under x := cx - x");
    let grid = T::from_ratio(1, 64);
    for i in 0..trials {
        let mut rng = trial_rng(seed, i);
        let x = ClockId(rng.gen_range(0..bounds.len()));
        let mut values = Vec::new();
        for (y, c) in bounds.iter() {
            let c = T::from_int(i64::from(c));
            let v = if y == x {
                // non-integral, within the bound
                let steps = (c.clone() / grid.clone()).floor_i64();
                let mut k = rng.gen_range(1..steps);
                if k % 64 == 0 {
                    k += 1;
                }
                grid.clone() * T::from_int(k)
            } else {
                grid_value(&mut rng, &grid, &c)
            };
            values.push(v);
        }
        let v = ClockValuation::from_values(values);
        section.record(equivalent_constraint_map_check(&v, x, bounds), || format!("v={} x=#{}", show(&v), x.0));
    }
    report.sections.push(section);
    report
}

/// The three-clock pair that is equivalent but not closed under delay.
pub fn three_clock_counterexample<T: Scalar>() -> Report {
    let mut report = Report::new("three-clock");
    let bounds = ClockBounds::new(vec![2, 2, 2]).expect("positive bounds");
    let opts = EquivalenceOptions::default();
    let v1 = ClockValuation::<T>::from_ratios(&[(2, 5), (2, 5), (4, 5)]);
    let v2 = ClockValuation::<T>::from_ratios(&[(1, 10), (1, 10), (19, 20)]);
    let t1 = T::from_ratio(1, 10);
    let goal = v1.shifted(&t1);
    let target = region_of(&goal, &bounds, &opts);

    let mut eq = Section::new("v1 and v2 are equivalent");
    eq.notes.push(format!("c=(2, 2, 2) v1={} v2={}", show(&v1), show(&v2)));
    eq.record(equivalent(&v1, &v2, &bounds, &opts), || "v1 and v2 are not equivalent".into());
    report.sections.push(eq);

    let mut analytic = Section::new("analytic constraint conflict");
    analytic.notes.push(format!("t1={t1} v1+t1={}", show(&goal)));
    // integer parts: each clock of v2 + t2 must stay in the interval of v1 + t1
    let mut upper: Option<(T, usize)> = None;
    for (i, a) in target.alpha.iter().enumerate() {
        let v = v2.get(ClockId(i)).clone();
        let hi = match *a {
            Interval::Open(k) => T::from_int(i64::from(k) + 1) - v,
            Interval::Point(k) => T::from_int(i64::from(k)) - v,
            Interval::Above => continue,
        };
        if upper.as_ref().is_none_or(|(u, _)| hi < *u) {
            upper = Some((hi, i));
        }
    }
    let (upper, by) = upper.expect("all clocks are within their bounds");
    analytic.notes.push(format!("integer parts force t2 < {upper} (clock #{by})"));
    // fractional sums equal to 1 in v1 + t1 fix t2 within those intervals
    let mut forced = Vec::new();
    for x in 0..3 {
        for y in x + 1..3 {
            let (gx, gy) = (goal.get(ClockId(x)), goal.get(ClockId(y)));
            if gx.fract_value() + gy.fract_value() != T::one() {
                continue;
            }
            let floors = gx.floor_value() + gy.floor_value();
            let t2 = (T::one() + floors - v2.get(ClockId(x)).clone() - v2.get(ClockId(y)).clone()) / T::from_int(2);
            analytic.notes.push(format!("fr(x{x}) + fr(x{y}) = 1 forces t2 = {t2}"));
            forced.push(t2);
        }
    }
    let conflict = !forced.is_empty() && forced.iter().all(|t2| *t2 >= upper);
    analytic.record(conflict, || "constraints are satisfiable".into());
    report.sections.push(analytic);

    let mut scan = Section::new("grid scan of t2 over [0, 1) step 1/400");
    let mut hits = Vec::new();
    for k in 0..400 {
        let t2 = T::from_ratio(k, 400);
        scan.trials += 1;
        if equivalent(&goal, &v2.shifted(&t2), &bounds, &opts) {
            hits.push(t2);
        }
    }
    for t2 in [upper.clone(), forced.first().cloned().unwrap_or_else(T::zero)] {
        scan.trials += 1;
        if equivalent(&goal, &v2.shifted(&t2), &bounds, &opts) {
            hits.push(t2);
        }
    }
    scan.notes.push(format!(
        "boundary cases t2 in {{{upper}, {}}} included",
        forced.first().cloned().unwrap_or_else(T::zero)
    ));
    scan.failures.extend(hits.iter().map(|t| format!("t2={t} is feasible")));
    report.sections.push(scan);

    let mut walk = Section::new("exact region walk from v2");
    let dirs = DirectionMap::forward(3);
    let mut current = v2.clone();
    let mut visited = 0u64;
    loop {
        visited += 1;
        if region_of(&current, &bounds, &opts) == target {
            walk.failures.push(format!("reached the target region at {}", show(&current)));
            break;
        }
        match successor_delay(&current, &dirs, &bounds, &opts) {
            Ok(Some((_, next))) => current = next,
            _ => break,
        }
    }
    walk.trials = visited;
    walk.notes.push(format!("{visited} regions visited before the delay fixpoint, none equal to [v1 + t1]"));
    report.sections.push(walk);
    report
}

/// Distinct tuples over every grid valuation in `[0, c_x + 1]^X`.
pub fn enumerate_regions<T: Scalar>(
    bounds: &ClockBounds,
    opts: &EquivalenceOptions,
    grid: &T,
) -> BTreeSet<RegionTuple> {
    let axes: Vec<Vec<T>> = bounds
        .iter()
        .map(|(_, c)| {
            let top = (T::from_int(i64::from(c) + 1) / grid.clone()).floor_i64();
            (0..=top).map(|k| grid.clone() * T::from_int(k)).collect()
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut index = vec![0usize; axes.len()];
    loop {
        let v = ClockValuation::from_values(index.iter().zip(&axes).map(|(&k, a)| a[k].clone()).collect());
        out.insert(region_of(&v, bounds, opts));
        let mut pos = 0;
        while pos < index.len() {
            index[pos] += 1;
            if index[pos] < axes[pos].len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
        if pos == index.len() {
            break;
        }
    }
    out
}

/// Region count against the bound, and stability when the grid is halved.
pub fn region_count_report<T: Scalar>(bounds: &ClockBounds, opts: &EquivalenceOptions, grid: &T) -> Report {
    let mut report = Report::new("regions");
    let n = bounds.len();
    let bound = region_count_bound(bounds, n);
    let coarse = enumerate_regions(bounds, opts, grid);
    let finer_grid = grid.clone() / T::from_int(2);
    let fine = enumerate_regions(bounds, opts, &finer_grid);
    let mut count = Section::new("count within bound");
    count.notes.push(format!("c={:?} grid={grid} regions={} bound={bound}", bounds.as_slice(), coarse.len()));
    count.record(num_bigint::BigUint::from(coarse.len()) <= bound, || format!("{} > {bound}", coarse.len()));
    report.sections.push(count);
    let mut stable = Section::new("stable under grid refinement");
    stable.notes.push(format!("grid={finer_grid} regions={}", fine.len()));
    stable.record(coarse == fine, || format!("{} new tuples", fine.difference(&coarse).count()));
    report.sections.push(stable);
    report
}

/// Shape of generated automata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    pub clocks: usize,
    pub max_locations: usize,
    pub max_transitions: usize,
    pub max_bound: u32,
    pub toggles: bool,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams { clocks: 2, max_locations: 5, max_transitions: 6, max_bound: 3, toggles: true }
    }
}

/// Random hourglass automaton for fuzzing.
///
/// Seed protocol: automaton `i` of a batch uses stream `i` of the batch
/// seed. Location `l0` is initial. Each transition gets up to two atoms
/// over `{0, cx}` and random flip and toggle sets; locations other than
/// `l0` are final with probability 1/3 and carry an invariant with
/// probability 1/5.
pub fn random_automaton<R: Rng>(rng: &mut R, params: &GeneratorParams) -> HourglassAutomaton {
    const RELATIONS: [Relation; 5] = [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt];
    let mut b = AutomatonBuilder::new(Mode::Hourglass);
    let clocks: Vec<ClockId> = (0..params.clocks)
        .map(|i| b.clock(&format!("x{i}"), rng.gen_range(1..=params.max_bound)).expect("fresh clock"))
        .collect();
    let locs: Vec<_> = (0..rng.gen_range(1..=params.max_locations))
        .map(|i| b.location(&format!("l{i}")).expect("fresh location"))
        .collect();
    b.initial(locs[0]);
    let guard = |rng: &mut R, max: usize| {
        let atoms = (0..rng.gen_range(0..=max))
            .map(|_| {
                let x = *clocks.choose(rng).expect("at least one clock");
                let k = if rng.gen_bool(0.5) { ConstRef::Zero } else { ConstRef::Cx };
                GuardAtom::new(x, *RELATIONS.choose(rng).expect("non-empty"), k)
            })
            .collect();
        Guard::from_atoms(atoms)
    };
    for &l in &locs[1..] {
        if rng.gen_bool(1.0 / 3.0) {
            b.final_location(l);
        }
        if rng.gen_bool(0.2) {
            let g = guard(rng, 1);
            b.invariant(l, g);
        }
    }
    if locs.len() == 1 || rng.gen_bool(0.1) {
        b.final_location(*locs.last().expect("non-empty"));
    }
    for _ in 0..rng.gen_range(1..=params.max_transitions) {
        let source = *locs.choose(rng).expect("non-empty");
        let target = *locs.choose(rng).expect("non-empty");
        let action = ["a", "b", "c"][rng.gen_range(0..3)];
        let g = guard(rng, 2);
        let mut t = Transition::new(source, action, target).when(g).flip(random_subset(rng, params.clocks));
        if params.toggles {
            t = t.toggle(random_subset(rng, params.clocks).into_iter().filter(|_| rng.gen_bool(0.5)));
        }
        b.transition(t);
    }
    b.build().expect("generated automata are well formed")
}

fn cross_check_into<T: Scalar>(section: &mut Section, a: &HourglassAutomaton, budget: usize, seed: u64) {
    let opts = GraphOptions { refine_half_points: a.has_toggles(), unsound: false };
    let concrete = random_explore(a, budget, seed, &T::one());
    let tag = || format!("seed={seed} transitions={}", a.transitions().len());
    match check_emptiness::<T>(a, &opts) {
        Err(e) => section.record(false, || format!("{}: {e}", tag())),
        Ok(result) => {
            let complete = concrete.is_none() || result.verdict == Verdict::NonEmpty;
            section.record(complete, || {
                let run = concrete.as_ref().map(|t| t.to_string()).unwrap_or_default();
                format!("{}: simulator found {run} but the graph says EMPTY", tag())
            });
            if result.verdict == Verdict::NonEmpty {
                let replays = result.word.as_ref().is_some_and(|w| run_word(a, w).accepting);
                section.record(replays, || format!("{}: witness does not replay", tag()));
            }
        }
    }
}

/// Emptiness verdict against a seeded concrete search on one automaton.
pub fn cross_check_emptiness<T: Scalar>(a: &HourglassAutomaton, budget: usize, seed: u64) -> Report {
    let mut report = Report::new("cross-check");
    let mut section = Section::new("graph verdict against simulation");
    cross_check_into::<T>(&mut section, a, budget, seed);
    report.sections.push(section);
    report
}

/// [`cross_check_emptiness`] over `count` generated automata.
pub fn cross_check_batch<T: Scalar>(count: u64, budget: usize, seed: u64, params: &GeneratorParams) -> Report {
    let mut report = Report::new("cross-check");
    let mut section = Section::new("graph verdict against simulation, random automata");
    let mut nonempty = 0;
    let mut found = 0;
    for i in 0..count {
        let mut rng = trial_rng(seed, i);
        let a = random_automaton(&mut rng, params);
        let explore_seed = rng.gen();
        if random_explore::<T>(&a, budget, explore_seed, &T::one()).is_some() {
            found += 1;
        }
        let opts = GraphOptions { refine_half_points: a.has_toggles(), unsound: false };
        if check_emptiness::<T>(&a, &opts).is_ok_and(|r| r.verdict == Verdict::NonEmpty) {
            nonempty += 1;
        }
        cross_check_into::<T>(&mut section, &a, budget, explore_seed);
    }
    section.notes.push(format!("automata={count} nonempty={nonempty} simulator-accepting={found}"));
    report.sections.push(section);
    report
}

fn all_words<T: Scalar>(actions: &[String], delays: &[T], max_len: usize) -> Vec<TimedWord<T>> {
    let mut layer = vec![TimedWord::default()];
    let mut out = layer.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for d in delays {
                for a in actions {
                    let mut moves = w.moves.clone();
                    moves.push(TimedMove { delay: d.clone(), action: a.clone() });
                    next.push(TimedWord::new(moves));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn bisim_into<T: Scalar>(section: &mut Section, a: &HourglassAutomaton, max_len: usize, grid: &T) {
    let eta = translate(a);
    let top = i64::from(a.bounds().as_slice().iter().max().copied().unwrap_or(0)) + 1;
    let steps = (T::from_int(top) / grid.clone()).floor_i64();
    let delays: Vec<T> = (0..=steps).map(|k| grid.clone() * T::from_int(k)).collect();
    let actions: Vec<String> = a.actions().iter().cloned().collect();
    for w in all_words(&actions, &delays, max_len) {
        let hourglass = run_word(a, &w).accepting;
        let translated = eta.accepts(&w);
        section.record(hourglass == translated, || {
            let moves: Vec<String> = w.moves.iter().map(|m| format!("{}:{}", m.delay, m.action)).collect();
            format!("word [{}]: hourglass={hourglass} translated={translated}", moves.join(" "))
        });
    }
}

/// Acceptance agreement between an automaton and its translation on every
/// word up to `max_len` moves with delays on `grid`.
pub fn translation_bisim_check<T: Scalar>(a: &HourglassAutomaton, max_len: usize, grid: &T) -> Report {
    let mut report = Report::new("bisim");
    let mut section = Section::new("hourglass and translated acceptance agree");
    bisim_into(&mut section, a, max_len, grid);
    report.sections.push(section);
    report
}

/// [`translation_bisim_check`] over `count` small generated automata.
pub fn translation_bisim_batch<T: Scalar>(count: u64, max_len: usize, grid: &T, seed: u64) -> Report {
    let params = GeneratorParams { max_locations: 3, max_transitions: 4, ..Default::default() };
    let mut report = Report::new("bisim");
    let mut section = Section::new("hourglass and translated acceptance agree, random automata");
    for i in 0..count {
        let a = random_automaton(&mut trial_rng(seed, i), &params);
        bisim_into(&mut section, &a, max_len, grid);
    }
    section.notes.push(format!("automata={count} max_len={max_len} grid={grid}"));
    report.sections.push(section);
    report
}
