//! Instances, orderings and cover times.
//!
//! An instance has `m` elements, `n` monotone submodular functions and a
//! non-negative weight per function. A function is covered once its value on
//! a prefix of the ordering reaches the unit threshold; every comparison
//! `f >= 1` is carried out as `f >= 1 - tolerance`.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::valuation::{SetFunction, Valuation};
use crate::DEFAULT_TOLERANCE;

/// Which solver (if any) produced an ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Producer {
    Aru,
    Greedy,
    BruteForce,
    External,
}

impl Producer {
    pub fn label(self) -> &'static str {
        match self {
            Producer::Aru => "aru",
            Producer::Greedy => "greedy",
            Producer::BruteForce => "brute-force",
            Producer::External => "external",
        }
    }
}

/// A permutation of the ground set; `elements()[t]` is the element placed at
/// step `t + 1`. Elements are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearOrdering {
    order: Vec<usize>,
    producer: Producer,
}

impl LinearOrdering {
    pub fn new(order: Vec<usize>, producer: Producer) -> Result<Self> {
        let m = order.len();
        let mut seen = FixedBitSet::with_capacity(m);
        for &e in &order {
            if e >= m {
                return Err(Error::NotAPermutation {
                    m,
                    reason: format!("element {} out of range", e + 1),
                });
            }
            if seen.put(e) {
                return Err(Error::NotAPermutation {
                    m,
                    reason: format!("element {} appears twice", e + 1),
                });
            }
        }
        Ok(Self { order, producer })
    }

    /// Parses a 1-based ordering as used by the external formats.
    pub fn from_one_based(order: &[usize], producer: Producer) -> Result<Self> {
        if let Some(&bad) = order.iter().find(|&&e| e == 0) {
            return Err(Error::NotAPermutation {
                m: order.len(),
                reason: format!("element {bad} out of range"),
            });
        }
        Self::new(order.iter().map(|e| e - 1).collect(), producer)
    }

    pub fn identity(m: usize, producer: Producer) -> Self {
        Self {
            order: (0..m).collect(),
            producer,
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.order
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.order.iter().map(|e| e + 1).collect()
    }

    pub fn producer(&self) -> Producer {
        self.producer
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Cover time of every function together with the weighted total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    /// `cover_times[i]` is the 1-based step at which function `i` is covered.
    pub cover_times: Vec<usize>,
    pub total_cost: f64,
}

/// Unvalidated instance data.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    pub m: usize,
    pub weights: Vec<f64>,
    pub valuations: Vec<Valuation>,
}

/// A validated instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    m: usize,
    weights: Vec<f64>,
    valuations: Vec<Valuation>,
    tolerance: f64,
}

impl Instance {
    /// Validates with the default tolerance.
    pub fn new(m: usize, weights: Vec<f64>, valuations: Vec<Valuation>) -> Result<Self> {
        validate_instance(RawInstance { m, weights, valuations }, DEFAULT_TOLERANCE)
    }

    pub fn num_elements(&self) -> usize {
        self.m
    }

    pub fn num_functions(&self) -> usize {
        self.valuations.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Whether `value` meets the unit threshold.
    pub fn covers(&self, value: f64) -> bool {
        value >= 1.0 - self.tolerance
    }

    /// `sum_i w_i c_i`, accumulated in function order.
    pub fn weighted_cost(&self, cover_times: &[usize]) -> f64 {
        self.weights.iter().zip(cover_times).map(|(w, &c)| w * c as f64).sum()
    }

    pub fn into_raw(self) -> RawInstance {
        RawInstance {
            m: self.m,
            weights: self.weights,
            valuations: self.valuations,
        }
    }
}

/// Checks dimensions, weights, normalization and coverability.
///
/// Family oracles are checked analytically (their values on the empty and the
/// full set); explicit tables were verified exhaustively when constructed.
pub fn validate_instance(raw: RawInstance, tolerance: f64) -> Result<Instance> {
    let RawInstance { m, weights, valuations } = raw;
    if !(tolerance.is_finite() && (0.0..1.0).contains(&tolerance)) {
        return Err(Error::BadParams(format!(
            "tolerance must lie in [0, 1), got {tolerance}"
        )));
    }
    if m == 0 {
        return Err(Error::DimensionMismatch("m must be at least 1".into()));
    }
    if valuations.is_empty() {
        return Err(Error::DimensionMismatch("n must be at least 1".into()));
    }
    if weights.len() != valuations.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} functions",
            weights.len(),
            valuations.len()
        )));
    }
    for (function, f) in valuations.iter().enumerate() {
        if f.ground_size() != m {
            return Err(Error::DimensionMismatch(format!(
                "function {} is defined on {} elements, expected {m}",
                function + 1,
                f.ground_size()
            )));
        }
    }
    if let Some((function, &weight)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::NegativeWeight { function, weight });
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::AllWeightsZero);
    }
    for (function, f) in valuations.iter().enumerate() {
        let empty = f.value(&FixedBitSet::with_capacity(m));
        if empty.abs() > tolerance {
            return Err(Error::NotNormalized { value: empty });
        }
        let full = f.full_value();
        if full < 1.0 - tolerance {
            return Err(Error::InfeasibleCover { function, value: full });
        }
    }
    Ok(Instance {
        m,
        weights,
        valuations,
        tolerance,
    })
}

/// Rescales each function by its threshold so that all thresholds become 1.
pub fn normalize_thresholds(valuations: &[Valuation], lambdas: &[f64]) -> Result<Vec<Valuation>> {
    if valuations.len() != lambdas.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} thresholds for {} functions",
            lambdas.len(),
            valuations.len()
        )));
    }
    if let Some((index, &lambda)) = lambdas.iter().enumerate().find(|(_, l)| !(l.is_finite() && **l > 0.0)) {
        return Err(Error::NonPositiveThreshold { index, lambda });
    }
    Ok(valuations
        .iter()
        .zip(lambdas)
        .map(|(f, &lambda)| f.scaled(lambda))
        .collect())
}

/// `f(S ∪ {j}) - f(S)` for `j ∉ S`.
pub fn marginal(oracle: &Valuation, set: &FixedBitSet, j: usize) -> Result<f64> {
    oracle.marginal(set, j)
}

/// Cover time of every function under `ordering`.
pub fn cover_times(instance: &Instance, ordering: &LinearOrdering) -> Result<CoverReport> {
    if ordering.len() != instance.m {
        return Err(Error::NotAPermutation {
            m: instance.m,
            reason: format!("ordering has {} elements", ordering.len()),
        });
    }
    let mut times = Vec::with_capacity(instance.num_functions());
    for (function, f) in instance.valuations.iter().enumerate() {
        let mut state = f.state();
        let mut cover = None;
        for (t, &j) in ordering.elements().iter().enumerate() {
            state.insert(j);
            if instance.covers(state.value()) {
                cover = Some(t + 1);
                break;
            }
        }
        times.push(cover.ok_or(Error::NeverCovered { function })?);
    }
    Ok(CoverReport {
        total_cost: instance.weighted_cost(&times),
        cover_times: times,
    })
}
