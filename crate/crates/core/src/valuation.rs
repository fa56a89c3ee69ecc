//! Value oracles for monotone submodular set functions.
//!
//! Three families are supported:
//!
//! * [`ModularValuation`]: `f(S) = sum of v_j over j in S`.
//! * [`CoverageValuation`]: each element covers a set of weighted universe
//!   items and `f(T)` is the covered weight divided by a normalizer.
//! * [`ExplicitValuation`]: a full `2^m` table for small ground sets, checked
//!   exhaustively for normalization, monotonicity and submodularity.
//!
//! Elements are 0-based here. Sets are passed as [`FixedBitSet`]s whose set
//! bits are the member elements; the bitset length does not need to match the
//! ground-set size.
//!
//! Every family also hands out a [`ValuationState`], an incremental evaluator
//! that tracks `f(S)` and all marginals `f_S(j)` as elements are appended.
//! The solvers and the cover-time computation run on top of it.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::properties::{self, CheckMode, Verdict};
use crate::DEFAULT_TOLERANCE;

/// Largest ground set accepted by [`ExplicitValuation`].
pub const EXPLICIT_MAX_ELEMENTS: usize = 16;

/// Largest universe accepted by [`CoverageValuation`].
pub const COVERAGE_MAX_UNIVERSE: usize = 1_000_000;

/// Anything that can answer value queries on subsets of `0..ground_size()`.
pub trait SetFunction {
    fn ground_size(&self) -> usize;

    fn value(&self, set: &FixedBitSet) -> f64;

    /// Value of the set encoded as a bitmask (bit `k` set iff element `k` is a
    /// member). Only meaningful for ground sets of at most 32 elements.
    fn value_of_mask(&self, mask: u32) -> f64 {
        let mut set = FixedBitSet::with_capacity(self.ground_size());
        for k in 0..self.ground_size() {
            if mask & (1 << k) != 0 {
                set.insert(k);
            }
        }
        self.value(&set)
    }
}

/// `f(S) = sum_{j in S} v_j` with `v_j >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularValuation {
    values: Vec<f64>,
}

impl ModularValuation {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::NegativeValue { index, value });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl SetFunction for ModularValuation {
    fn ground_size(&self) -> usize {
        self.values.len()
    }

    fn value(&self, set: &FixedBitSet) -> f64 {
        set.ones().map(|j| self.values[j]).sum()
    }
}

/// Weighted coverage function.
///
/// Element `j` covers the universe items `element_sets[j]`; the value of a set
/// of elements is the total weight of the union of their items divided by the
/// normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageValuation {
    item_weights: Vec<f64>,
    element_sets: Vec<Vec<u32>>,
    normalizer: f64,
    // item -> elements covering it
    holders: Vec<Vec<u32>>,
}

impl CoverageValuation {
    /// Builds a coverage valuation. Universe items are 0-based; duplicate
    /// items inside one element set are ignored.
    pub fn new(element_sets: Vec<Vec<usize>>, item_weights: Vec<f64>, normalizer: f64) -> Result<Self> {
        let universe_size = item_weights.len();
        if universe_size == 0 {
            return Err(Error::BadParams("coverage universe must not be empty".into()));
        }
        if universe_size > COVERAGE_MAX_UNIVERSE {
            return Err(Error::TooLarge {
                what: "coverage universe",
                size: universe_size,
                limit: COVERAGE_MAX_UNIVERSE,
            });
        }
        if !(normalizer.is_finite() && normalizer > 0.0) {
            return Err(Error::NonPositiveNormalizer(normalizer));
        }
        if let Some((item, &weight)) = item_weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::NonPositiveItemWeight { item, weight });
        }

        let mut sets = Vec::with_capacity(element_sets.len());
        let mut holders = vec![Vec::new(); universe_size];
        for (element, items) in element_sets.into_iter().enumerate() {
            let mut items = items;
            if let Some(&item) = items.iter().find(|&&x| x >= universe_size) {
                return Err(Error::BadUniverseRef {
                    element,
                    item,
                    universe_size,
                });
            }
            items.sort_unstable();
            items.dedup();
            for &x in &items {
                holders[x].push(element as u32);
            }
            sets.push(items.into_iter().map(|x| x as u32).collect());
        }

        Ok(Self {
            item_weights,
            element_sets: sets,
            normalizer,
            holders,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.item_weights.len()
    }

    pub fn item_weights(&self) -> &[f64] {
        &self.item_weights
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Items covered by element `j`, sorted and 0-based.
    pub fn element_set(&self, j: usize) -> &[u32] {
        &self.element_sets[j]
    }

    pub fn element_sets(&self) -> impl Iterator<Item = &[u32]> {
        self.element_sets.iter().map(Vec::as_slice)
    }

    fn set_weight(&self, j: usize, covered: &FixedBitSet) -> f64 {
        self.element_sets[j]
            .iter()
            .filter(|&&x| !covered.contains(x as usize))
            .map(|&x| self.item_weights[x as usize])
            .sum()
    }
}

impl SetFunction for CoverageValuation {
    fn ground_size(&self) -> usize {
        self.element_sets.len()
    }

    fn value(&self, set: &FixedBitSet) -> f64 {
        let mut covered = FixedBitSet::with_capacity(self.universe_size());
        for j in set.ones() {
            for &x in &self.element_sets[j] {
                covered.insert(x as usize);
            }
        }
        covered.ones().map(|x| self.item_weights[x]).sum::<f64>() / self.normalizer
    }
}

/// A set function stored as a full table indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitValuation {
    m: usize,
    table: Vec<f64>,
}

impl ExplicitValuation {
    /// Builds the oracle after verifying normalization, monotonicity and
    /// submodularity exhaustively (at [`DEFAULT_TOLERANCE`]).
    pub fn new(table: Vec<f64>) -> Result<Self> {
        let view = TableView::new(&table)?;
        match properties::check_submodular_monotone_normalized(&view, CheckMode::Exhaustive, DEFAULT_TOLERANCE)? {
            Verdict::Pass => {}
            Verdict::Fail(violation) => return Err(violation.into_error()),
        }
        Ok(Self { m: view.m, table })
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }
}

impl SetFunction for ExplicitValuation {
    fn ground_size(&self) -> usize {
        self.m
    }

    fn value(&self, set: &FixedBitSet) -> f64 {
        self.table[mask_of(set)]
    }

    fn value_of_mask(&self, mask: u32) -> f64 {
        self.table[mask as usize]
    }
}

/// An unvalidated table, for running the property checker on arbitrary data.
#[derive(Debug, Clone, Copy)]
pub struct TableView<'a> {
    m: usize,
    table: &'a [f64],
}

impl<'a> TableView<'a> {
    pub fn new(table: &'a [f64]) -> Result<Self> {
        let len = table.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "explicit table length {len} is not a power of two"
            )));
        }
        let m = len.trailing_zeros() as usize;
        if m > EXPLICIT_MAX_ELEMENTS {
            return Err(Error::TooLarge {
                what: "explicit table ground set",
                size: m,
                limit: EXPLICIT_MAX_ELEMENTS,
            });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NegativeValue { index, value });
        }
        Ok(Self { m, table })
    }
}

impl SetFunction for TableView<'_> {
    fn ground_size(&self) -> usize {
        self.m
    }

    fn value(&self, set: &FixedBitSet) -> f64 {
        self.table[mask_of(set)]
    }

    fn value_of_mask(&self, mask: u32) -> f64 {
        self.table[mask as usize]
    }
}

fn mask_of(set: &FixedBitSet) -> usize {
    set.ones().fold(0usize, |mask, j| mask | (1 << j))
}

/// A valuation oracle of one of the supported families.
#[derive(Debug, Clone, PartialEq)]
pub enum Valuation {
    Modular(ModularValuation),
    Coverage(CoverageValuation),
    Explicit(ExplicitValuation),
}

pub fn make_modular(values: Vec<f64>) -> Result<Valuation> {
    ModularValuation::new(values).map(Valuation::Modular)
}

pub fn make_coverage(element_sets: Vec<Vec<usize>>, item_weights: Vec<f64>, normalizer: f64) -> Result<Valuation> {
    CoverageValuation::new(element_sets, item_weights, normalizer).map(Valuation::Coverage)
}

pub fn make_explicit(table: Vec<f64>) -> Result<Valuation> {
    ExplicitValuation::new(table).map(Valuation::Explicit)
}

impl Valuation {
    pub fn family(&self) -> &'static str {
        match self {
            Valuation::Modular(_) => "modular",
            Valuation::Coverage(_) => "coverage",
            Valuation::Explicit(_) => "explicit",
        }
    }

    /// `f(S ∪ {j}) - f(S)`; fails when `j` is already in `S`.
    pub fn marginal(&self, set: &FixedBitSet, j: usize) -> Result<f64> {
        if set.contains(j) {
            return Err(Error::ElementInSet { element: j });
        }
        let mut extended = set.clone();
        extended.grow(j + 1);
        extended.insert(j);
        Ok(self.value(&extended) - self.value(set))
    }

    /// Value of the whole ground set.
    pub fn full_value(&self) -> f64 {
        let mut state = self.state();
        for j in 0..self.ground_size() {
            state.insert(j);
        }
        state.value()
    }

    /// Returns the same function divided pointwise by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Valuation {
        match self {
            Valuation::Modular(f) => Valuation::Modular(ModularValuation {
                values: f.values.iter().map(|v| v / lambda).collect(),
            }),
            Valuation::Coverage(f) => Valuation::Coverage(CoverageValuation {
                normalizer: f.normalizer * lambda,
                ..f.clone()
            }),
            Valuation::Explicit(f) => Valuation::Explicit(ExplicitValuation {
                m: f.m,
                table: f.table.iter().map(|v| v / lambda).collect(),
            }),
        }
    }

    /// A positive lower bound on the smallest non-zero marginal value of this
    /// function, or `None` when every marginal is zero.
    ///
    /// Modular: the smallest non-zero `v_j` (exact). Coverage: the lightest
    /// item that some element covers, over the normalizer. Explicit: exact,
    /// by enumerating every `(S, j)`.
    pub fn epsilon_lower_bound(&self) -> Option<f64> {
        let min_positive = |it: &mut dyn Iterator<Item = f64>| {
            it.filter(|&v| v > 0.0)
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
        };
        match self {
            Valuation::Modular(f) => min_positive(&mut f.values.iter().copied()),
            Valuation::Coverage(f) => min_positive(
                &mut f
                    .holders
                    .iter()
                    .zip(&f.item_weights)
                    .filter(|(h, _)| !h.is_empty())
                    .map(|(_, &w)| w),
            )
            .map(|w| w / f.normalizer),
            Valuation::Explicit(f) => {
                let full = 1u32 << f.m;
                let mut marginals = (0..full).flat_map(|mask| {
                    (0..f.m)
                        .filter(move |&j| mask & (1 << j) == 0)
                        .map(move |j| f.table[(mask | (1 << j)) as usize] - f.table[mask as usize])
                });
                min_positive(&mut marginals)
            }
        }
    }

    /// Incremental evaluator starting from the empty set.
    pub fn state(&self) -> ValuationState<'_> {
        let m = self.ground_size();
        let kind = match self {
            Valuation::Modular(f) => StateKind::Modular {
                values: &f.values,
                value: 0.0,
            },
            Valuation::Coverage(f) => StateKind::Coverage(CoverageState::new(f)),
            Valuation::Explicit(f) => StateKind::Explicit {
                table: &f.table,
                mask: 0,
            },
        };
        ValuationState {
            members: FixedBitSet::with_capacity(m),
            kind,
        }
    }
}

impl SetFunction for Valuation {
    fn ground_size(&self) -> usize {
        match self {
            Valuation::Modular(f) => f.ground_size(),
            Valuation::Coverage(f) => f.ground_size(),
            Valuation::Explicit(f) => f.ground_size(),
        }
    }

    fn value(&self, set: &FixedBitSet) -> f64 {
        match self {
            Valuation::Modular(f) => f.value(set),
            Valuation::Coverage(f) => f.value(set),
            Valuation::Explicit(f) => f.value(set),
        }
    }

    fn value_of_mask(&self, mask: u32) -> f64 {
        match self {
            Valuation::Explicit(f) => f.value_of_mask(mask),
            other => {
                let mut set = FixedBitSet::with_capacity(other.ground_size());
                set.extend((0..other.ground_size()).filter(|k| mask & (1 << k) != 0));
                other.value(&set)
            }
        }
    }
}

/// Tracks `f(S)` and the marginals `f_S(j)` while elements are appended to `S`.
#[derive(Debug, Clone)]
pub struct ValuationState<'a> {
    members: FixedBitSet,
    kind: StateKind<'a>,
}

#[derive(Debug, Clone)]
enum StateKind<'a> {
    Modular { values: &'a [f64], value: f64 },
    Coverage(CoverageState<'a>),
    Explicit { table: &'a [f64], mask: u32 },
}

#[derive(Debug, Clone)]
struct CoverageState<'a> {
    valuation: &'a CoverageValuation,
    covered: FixedBitSet,
    covered_weight: f64,
    // uncovered weight of each element's set, not yet normalized
    gains: Vec<f64>,
    touched: FixedBitSet,
}

impl<'a> CoverageState<'a> {
    fn new(valuation: &'a CoverageValuation) -> Self {
        let covered = FixedBitSet::with_capacity(valuation.universe_size());
        let gains = (0..valuation.ground_size())
            .map(|j| valuation.set_weight(j, &covered))
            .collect();
        Self {
            valuation,
            covered,
            covered_weight: 0.0,
            gains,
            touched: FixedBitSet::with_capacity(valuation.ground_size()),
        }
    }

    fn insert(&mut self, j: usize) {
        let f = self.valuation;
        let mut dirty = Vec::new();
        for &x in &f.element_sets[j] {
            let x = x as usize;
            if self.covered.put(x) {
                continue;
            }
            self.covered_weight += f.item_weights[x];
            for &k in &f.holders[x] {
                if !self.touched.put(k as usize) {
                    dirty.push(k as usize);
                }
            }
        }
        // recompute from scratch rather than subtracting, so gains never drift
        for k in dirty {
            self.gains[k] = f.set_weight(k, &self.covered);
            self.touched.set(k, false);
        }
    }
}

impl ValuationState<'_> {
    /// Current value `f(S)`.
    pub fn value(&self) -> f64 {
        match &self.kind {
            StateKind::Modular { value, .. } => *value,
            StateKind::Coverage(c) => c.covered_weight / c.valuation.normalizer,
            StateKind::Explicit { table, mask } => table[*mask as usize],
        }
    }

    /// Marginal `f(S ∪ {j}) - f(S)`; zero for members of `S`.
    pub fn gain(&self, j: usize) -> f64 {
        if self.members.contains(j) {
            return 0.0;
        }
        match &self.kind {
            StateKind::Modular { values, .. } => values[j],
            StateKind::Coverage(c) => c.gains[j] / c.valuation.normalizer,
            StateKind::Explicit { table, mask } => table[(*mask | (1 << j)) as usize] - table[*mask as usize],
        }
    }

    /// Appends `j` to `S`. Inserting a member again is a no-op.
    pub fn insert(&mut self, j: usize) {
        if self.members.put(j) {
            return;
        }
        match &mut self.kind {
            StateKind::Modular { values, value } => *value += values[j],
            StateKind::Coverage(c) => c.insert(j),
            StateKind::Explicit { mask, .. } => *mask |= 1 << j,
        }
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }
}
