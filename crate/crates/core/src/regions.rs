//! Extended clock regions.
//!
//! Two valuations are equivalent when they agree on integer parts (or both
//! exceed the bound), on which fractional parts are zero, on the order of
//! fractional parts, and on how each pair of fractional parts sums against 1.
//! The half-point refinement additionally separates fractional parts below,
//! at and above one half.
//!
//! A class is stored as a [`RegionTuple`]: per-clock intervals, the rank of
//! each fractional part, tie flags between neighbouring ranks, and two
//! threshold arrays locating the sum-below-1 and sum-at-most-1 bands.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::model::{
    apply_flip_update, apply_reset, ClockBounds, ClockId, ClockSet, ClockValuation, DirectionMap, Guard, ModelError,
};
use crate::scalar::Scalar;

/// Where a clock value lies relative to the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Interval {
    /// `[a, a]`
    Point(u32),
    /// `(a, a + 1)`
    Open(u32),
    /// `(c_x, inf)`
    Above,
}

/// Position of a fractional part relative to one half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HalfMark {
    Zero,
    Low,
    Half,
    High,
}

impl HalfMark {
    fn symbol(self) -> &'static str {
        match self {
            HalfMark::Zero => "0",
            HalfMark::Low => "<",
            HalfMark::Half => "=",
            HalfMark::High => ">",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EquivalenceOptions {
    pub refine_half_points: bool,
    /// Largest clock count for which delay successors are trustworthy.
    pub sound_clock_limit: usize,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions { refine_half_points: false, sound_clock_limit: 2 }
    }
}

impl EquivalenceOptions {
    pub fn refined() -> Self {
        EquivalenceOptions { refine_half_points: true, ..Self::default() }
    }

    pub fn within_sound_limit(&self, clocks: usize) -> bool {
        clocks <= self.sound_clock_limit
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("no clock is running, time cannot change the region")]
    NoTimeFlow,
    #[error("no grid representative found for region {0}")]
    NoRepresentative(String),
    #[error("clock #{clock} is above its bound and cannot be flipped")]
    FlipAboveBound { clock: usize },
    #[error("region has {region} clocks but the bounds declare {bounds}")]
    DimensionMismatch { region: usize, bounds: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Canonical encoding of one equivalence class.
///
/// `beta`, `zeta`, `eta` and `half_marks` are indexed by clock and are `None`
/// for clocks above their bound. Ranks start at 1; `zeta`/`eta` use 0 for
/// "no such clock". Ties in the fractional order are ranked by clock index
/// and marked in `gamma`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionTuple {
    pub alpha: Vec<Interval>,
    pub beta: Vec<Option<usize>>,
    pub gamma: Vec<bool>,
    pub zeta: Vec<Option<usize>>,
    pub eta: Vec<Option<usize>>,
    pub half_marks: Option<Vec<Option<HalfMark>>>,
}

impl RegionTuple {
    pub fn clock_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_refined(&self) -> bool {
        self.half_marks.is_some()
    }

    pub fn options(&self) -> EquivalenceOptions {
        EquivalenceOptions { refine_half_points: self.is_refined(), ..Default::default() }
    }

    /// Every clock above its bound.
    pub fn is_all_above(&self) -> bool {
        self.alpha.iter().all(|a| *a == Interval::Above)
    }

    /// Structural invariants of canonical tuples.
    pub fn is_well_formed(&self) -> bool {
        let n = self.alpha.len();
        if self.beta.len() != n || self.zeta.len() != n || self.eta.len() != n {
            return false;
        }
        let live: Vec<usize> = (0..n).filter(|&i| self.alpha[i] != Interval::Above).collect();
        let k = live.len();
        let mut ranks: Vec<usize> = live.iter().filter_map(|&i| self.beta[i]).collect();
        ranks.sort_unstable();
        let ranks_ok = ranks == (1..=k).collect::<Vec<_>>();
        let shape_ok = (0..n).all(|i| {
            let live = self.alpha[i] != Interval::Above;
            self.beta[i].is_some() == live
                && self.zeta[i].is_some() == live
                && self.eta[i].is_some() == live
                && match (self.zeta[i], self.eta[i]) {
                    (Some(z), Some(e)) => z <= e && e <= k,
                    _ => true,
                }
        });
        let half_ok = self
            .half_marks
            .as_ref()
            .is_none_or(|h| h.len() == n && (0..n).all(|i| h[i].is_some() == (self.alpha[i] != Interval::Above)));
        ranks_ok && shape_ok && self.gamma.len() == k.saturating_sub(1) && half_ok
    }

    /// Refined tuple with a pair of clocks whose fractional parts sum to
    /// exactly 1. These are the classes where the half-point marks and the
    /// sum band meet.
    pub fn is_half_sum_band(&self) -> bool {
        if !self.is_refined() {
            return false;
        }
        (0..self.alpha.len()).any(|x| match (self.zeta[x], self.eta[x]) {
            (Some(z), Some(e)) => {
                (0..self.alpha.len()).any(|y| y != x && self.beta[y].is_some_and(|b| z < b && b <= e))
            }
            _ => false,
        })
    }
}

fn write_ranks(f: &mut fmt::Formatter<'_>, ranks: &[Option<usize>]) -> fmt::Result {
    let parts: Vec<String> = ranks.iter().map(|r| r.map_or("-".into(), |r| r.to_string())).collect();
    f.write_str(&parts.join(","))
}

impl fmt::Display for RegionTuple {
    /// `alpha=[0,0],(0,1),(c,inf) beta=1,- gamma=- zeta=0,- eta=0,- [half=0,-]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alpha: Vec<String> = self
            .alpha
            .iter()
            .map(|a| match a {
                Interval::Point(a) => format!("[{a},{a}]"),
                Interval::Open(a) => format!("({a},{})", a + 1),
                Interval::Above => "(c,inf)".to_string(),
            })
            .collect();
        write!(f, "alpha={} beta=", alpha.join(","))?;
        write_ranks(f, &self.beta)?;
        f.write_str(" gamma=")?;
        if self.gamma.is_empty() {
            f.write_str("-")?;
        } else {
            let g: Vec<&str> = self.gamma.iter().map(|&g| if g { "1" } else { "0" }).collect();
            f.write_str(&g.join(","))?;
        }
        f.write_str(" zeta=")?;
        write_ranks(f, &self.zeta)?;
        f.write_str(" eta=")?;
        write_ranks(f, &self.eta)?;
        if let Some(h) = &self.half_marks {
            let h: Vec<&str> = h.iter().map(|m| m.map_or("-", HalfMark::symbol)).collect();
            write!(f, " half={}", h.join(","))?;
        }
        Ok(())
    }
}

fn half_mark<T: Scalar>(fr: &T) -> HalfMark {
    let half = T::half();
    if fr.is_zero() {
        HalfMark::Zero
    } else if *fr < half {
        HalfMark::Low
    } else if *fr == half {
        HalfMark::Half
    } else {
        HalfMark::High
    }
}

/// Decides `v1 ≅ v2` straight from the constraints. Works for any number of
/// clocks.
///
/// Integer parts are compared symmetrically: either both values exceed the
/// bound, or both are within it with equal integer parts.
pub fn equivalent<T: Scalar>(
    v1: &ClockValuation<T>,
    v2: &ClockValuation<T>,
    bounds: &ClockBounds,
    opts: &EquivalenceOptions,
) -> bool {
    if v1.len() != v2.len() || v1.len() != bounds.len() {
        return false;
    }
    let n = v1.len();
    let ones = T::one();
    let half = T::half();
    let mut live = Vec::new();
    for i in 0..n {
        let x = ClockId(i);
        let c: T = bounds.scalar(x);
        let (a, b) = (v1.get(x), v2.get(x));
        match (*a > c, *b > c) {
            (true, true) => continue,
            (false, false) => {}
            _ => return false,
        }
        if a.floor_value() != b.floor_value() {
            return false;
        }
        let (fa, fb) = (a.fract_value(), b.fract_value());
        if fa.is_zero() != fb.is_zero() {
            return false;
        }
        if opts.refine_half_points && ((fa <= half) != (fb <= half) || (fa >= half) != (fb >= half)) {
            return false;
        }
        live.push((fa, fb));
    }
    for (i, (fx1, fx2)) in live.iter().enumerate() {
        for (j, (fy1, fy2)) in live.iter().enumerate() {
            if i == j {
                continue;
            }
            if (fx1 <= fy1) != (fx2 <= fy2) {
                return false;
            }
            let s1 = fx1.clone() + fy1.clone();
            let s2 = fx2.clone() + fy2.clone();
            if (s1 <= ones) != (s2 <= ones) || (s1 >= ones) != (s2 >= ones) {
                return false;
            }
        }
    }
    true
}

/// Checks that flipping `x` maps fractional-order facts about `x` onto
/// fractional-sum facts and back. Vacuously true for integral `v(x)`.
pub fn equivalent_constraint_map_check<T: Scalar>(v: &ClockValuation<T>, x: ClockId, bounds: &ClockBounds) -> bool {
    let c: T = bounds.scalar(x);
    let vx = v.get(x);
    if *vx > c {
        return false;
    }
    if vx.is_integral() {
        return true;
    }
    let fx = vx.fract_value();
    let flipped = (c - vx.clone()).fract_value();
    let one = T::one();
    bounds.clocks().filter(|&y| y != x).all(|y| {
        let vy = v.get(y);
        if *vy > bounds.scalar(y) {
            return true;
        }
        let fy = vy.fract_value();
        let sum = flipped.clone() + fy.clone();
        ((fx <= fy) == (sum >= one)) && ((fy <= fx) == (sum <= one))
    })
}

/// The canonical tuple of the class containing `v`.
pub fn region_of<T: Scalar>(v: &ClockValuation<T>, bounds: &ClockBounds, opts: &EquivalenceOptions) -> RegionTuple {
    let n = v.len();
    let one = T::one();
    let mut alpha = Vec::with_capacity(n);
    let mut live: Vec<(T, usize)> = Vec::new();
    for i in 0..n {
        let x = ClockId(i);
        let value = v.get(x);
        if *value > bounds.scalar::<T>(x) {
            alpha.push(Interval::Above);
            continue;
        }
        let floor = u32::try_from(value.floor_i64()).expect("clock values are non-negative");
        alpha.push(if value.is_integral() { Interval::Point(floor) } else { Interval::Open(floor) });
        live.push((value.fract_value(), i));
    }
    live.sort();
    let mut beta = vec![None; n];
    for (rank, (_, i)) in live.iter().enumerate() {
        beta[*i] = Some(rank + 1);
    }
    let gamma = live.windows(2).map(|w| w[0].0 == w[1].0).collect();
    let mut zeta = vec![None; n];
    let mut eta = vec![None; n];
    for (rx, (fx, x)) in live.iter().enumerate() {
        let mut lt = 0;
        let mut le = 0;
        for (ry, (fy, _)) in live.iter().enumerate() {
            if rx == ry {
                continue;
            }
            let sum = fx.clone() + fy.clone();
            if sum < one {
                lt = ry + 1;
            }
            if sum <= one {
                le = ry + 1;
            }
        }
        zeta[*x] = Some(lt);
        eta[*x] = Some(le);
    }
    let half_marks = opts.refine_half_points.then(|| {
        let mut marks = vec![None; n];
        for (f, i) in &live {
            marks[*i] = Some(half_mark(f));
        }
        marks
    });
    RegionTuple { alpha, beta, gamma, zeta, eta, half_marks }
}

const GRIDS: [i64; 2] = [16, 64];

/// A member of `r` with small denominators.
///
/// Open intervals are searched over the fractions `k/16`, then `k/64`;
/// clocks above their bound take `c_x + 1`.
pub fn representative<T: Scalar>(r: &RegionTuple, bounds: &ClockBounds) -> Result<ClockValuation<T>, RegionError> {
    if r.clock_count() != bounds.len() {
        return Err(RegionError::DimensionMismatch { region: r.clock_count(), bounds: bounds.len() });
    }
    let opts = r.options();
    for den in GRIDS {
        let choices: Vec<Vec<T>> = r
            .alpha
            .iter()
            .enumerate()
            .map(|(i, a)| match *a {
                Interval::Point(a) => vec![T::from_int(i64::from(a))],
                Interval::Above => vec![T::from_int(i64::from(bounds.get(ClockId(i))) + 1)],
                Interval::Open(a) => (1..den).map(|k| T::from_ratio(i64::from(a) * den + k, den)).collect(),
            })
            .collect();
        let mut index = vec![0usize; choices.len()];
        loop {
            let v = ClockValuation::from_values(index.iter().zip(&choices).map(|(&k, c)| c[k].clone()).collect());
            if region_of(&v, bounds, &opts) == *r {
                return Ok(v);
            }
            let mut pos = 0;
            while pos < index.len() {
                index[pos] += 1;
                if index[pos] < choices[pos].len() {
                    break;
                }
                index[pos] = 0;
                pos += 1;
            }
            if pos == index.len() {
                break;
            }
        }
    }
    Err(RegionError::NoRepresentative(r.to_string()))
}

fn mod_one<T: Scalar>(t: T) -> T {
    t.fract_value()
}

/// Smallest delay from `v` that leaves its region under forward motion of
/// the running clocks, with the valuation reached. `None` when no delay
/// ever changes the region.
///
/// All instants where some constraint can switch are collected; the region
/// is constant strictly between consecutive instants, so testing each gap
/// midpoint and then each instant finds the first change.
pub fn successor_delay<T: Scalar>(
    v: &ClockValuation<T>,
    dirs: &DirectionMap,
    bounds: &ClockBounds,
    opts: &EquivalenceOptions,
) -> Result<Option<(T, ClockValuation<T>)>, RegionError> {
    if !dirs.any_running() {
        return Err(RegionError::NoTimeFlow);
    }
    let current = region_of(v, bounds, opts);
    let one = T::one();
    let half = T::half();
    let live: Vec<(ClockId, T, bool)> = bounds
        .clocks()
        .filter(|&x| *v.get(x) <= bounds.scalar(x))
        .map(|x| (x, v.get(x).fract_value(), dirs.get(x).is_running()))
        .collect();
    let mut points: BTreeSet<T> = BTreeSet::new();
    for (_, f, running) in &live {
        if !running {
            continue;
        }
        points.insert(one.clone() - f.clone());
        if opts.refine_half_points {
            points.insert(if *f < half { half.clone() - f.clone() } else { one.clone() + half.clone() - f.clone() });
        }
    }
    for (i, (_, fx, rx)) in live.iter().enumerate() {
        for (_, fy, ry) in &live[i + 1..] {
            let sum_gap = mod_one(one.clone() - fx.clone() - fy.clone());
            match (rx, ry) {
                (true, true) => {
                    points.insert(sum_gap.clone() / T::from_int(2));
                    points.insert(sum_gap / T::from_int(2) + half.clone());
                }
                (true, false) | (false, true) => {
                    let (moving, still) = if *rx { (fx, fy) } else { (fy, fx) };
                    points.insert(mod_one(still.clone() - moving.clone()));
                    points.insert(sum_gap);
                }
                (false, false) => {}
            }
        }
    }
    let shift = |t: &T| crate::translation::delay_forward(v, dirs, t);
    let mut prev = T::zero();
    for point in points.into_iter().filter(|p| *p > T::zero()) {
        let mid = (prev.clone() + point.clone()) / T::from_int(2);
        for t in [mid, point.clone()] {
            let w = shift(&t);
            if region_of(&w, bounds, opts) != current {
                return Ok(Some((t, w)));
            }
        }
        prev = point;
    }
    let t = prev + one;
    let w = shift(&t);
    Ok((region_of(&w, bounds, opts) != current).then_some((t, w)))
}

/// The region reached first when time passes from `r` (forward motion of
/// running clocks). Returns `r` itself when no delay changes it.
pub fn time_successor<T: Scalar>(
    r: &RegionTuple,
    dirs: &DirectionMap,
    bounds: &ClockBounds,
    opts: &EquivalenceOptions,
) -> Result<RegionTuple, RegionError> {
    let v: ClockValuation<T> = representative(r, bounds)?;
    Ok(match successor_delay(&v, dirs, bounds, opts)? {
        Some((_, w)) => region_of(&w, bounds, opts),
        None => r.clone(),
    })
}

pub fn region_apply_reset<T: Scalar>(
    r: &RegionTuple,
    lambda: &ClockSet,
    bounds: &ClockBounds,
    opts: &EquivalenceOptions,
) -> Result<RegionTuple, RegionError> {
    let v: ClockValuation<T> = representative(r, bounds)?;
    Ok(region_of(&apply_reset(&v, lambda), bounds, opts))
}

pub fn region_apply_flip<T: Scalar>(
    r: &RegionTuple,
    mu: &ClockSet,
    bounds: &ClockBounds,
    opts: &EquivalenceOptions,
) -> Result<RegionTuple, RegionError> {
    if let Some(x) = mu.iter().find(|x| r.alpha.get(x.0) == Some(&Interval::Above)) {
        return Err(RegionError::FlipAboveBound { clock: x.0 });
    }
    let v: ClockValuation<T> = representative(r, bounds)?;
    Ok(region_of(&apply_flip_update(&v, mu, bounds)?, bounds, opts))
}

pub fn region_satisfies<T: Scalar>(r: &RegionTuple, g: &Guard, bounds: &ClockBounds) -> Result<bool, RegionError> {
    let v: ClockValuation<T> = representative(r, bounds)?;
    Ok(g.satisfies(&v, bounds)?)
}

/// `prod(2(c_x + 1)) * n! * 2^(n-1) * (n+1)^n * (n+1)^n`.
pub fn region_count_bound(bounds: &ClockBounds, n: usize) -> BigUint {
    let mut total = BigUint::one();
    for (_, c) in bounds.iter() {
        total *= BigUint::from(2 * (u64::from(c) + 1));
    }
    for k in 2..=n {
        total *= BigUint::from(k);
    }
    total *= BigUint::from(2u32).pow(n.saturating_sub(1) as u32);
    let base = BigUint::from(n + 1);
    total *= base.pow(2 * n as u32);
    total
}
