//! Ordering algorithms.
//!
//! [`adaptive_residual_updates`] and [`cumulative_greedy`] share one loop:
//! at every step each uncovered function assigns a potential to every
//! unselected element, and the element with the largest weighted potential sum
//! is appended. They differ only in the [`PotentialRule`]. Ties go to the
//! lowest element index; scores are summed left to right in function order and
//! compared with plain `>`, so runs are bit-for-bit reproducible.
//!
//! Potentials can grow between steps (the residual `1 - f(S)` in the adaptive
//! rule shrinks), so stale scores are not valid upper bounds and every step
//! rescans all candidates.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{cover_times, CoverReport, Instance, LinearOrdering, Producer};
use crate::valuation::{SetFunction, Valuation, ValuationState};

/// Default ground-set limit for [`brute_force_optimal`].
pub const BRUTE_FORCE_DEFAULT_LIMIT: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialRule {
    /// `min(1, f_S(j) / (1 - f(S)))`: marginals measured against the residual.
    AdaptiveResidual,
    /// `min(f_S(j), 1 - f(S))`: absolute truncated marginals.
    Cumulative,
}

impl PotentialRule {
    /// Potential of an element with marginal `gain` for a function whose
    /// current value is `current`. Zero once the function is covered.
    #[inline]
    pub fn potential(self, current: f64, gain: f64, tolerance: f64) -> f64 {
        if current >= 1.0 - tolerance {
            return 0.0;
        }
        let residual = 1.0 - current;
        let gain = gain.max(0.0);
        match self {
            PotentialRule::AdaptiveResidual => (gain / residual).min(1.0),
            PotentialRule::Cumulative => gain.min(residual),
        }
    }

    pub fn producer(self) -> Producer {
        match self {
            PotentialRule::AdaptiveResidual => Producer::Aru,
            PotentialRule::Cumulative => Producer::Greedy,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PotentialRule::AdaptiveResidual => "adaptive residual updates",
            PotentialRule::Cumulative => "cumulative greedy",
        }
    }
}

/// Adaptive potential of `j` for `oracle` at the selected set `set`.
pub fn potential_value(oracle: &Valuation, set: &FixedBitSet, j: usize, tolerance: f64) -> Result<f64> {
    let gain = oracle.marginal(set, j)?;
    Ok(PotentialRule::AdaptiveResidual.potential(oracle.value(set), gain, tolerance))
}

/// Everything recorded during one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub rule: PotentialRule,
    pub ordering: LinearOrdering,
    /// `frozen_potentials[t][i]`: potential of the element selected at step
    /// `t + 1` for function `i`, as it was when the element was selected.
    pub frozen_potentials: Vec<Vec<f64>>,
    /// `q[t] = sum_i w_i * frozen_potentials[t][i]`.
    pub q: Vec<f64>,
    /// `prefix_values[i][t] = f^i(first t selected elements)`, `t = 0..=m`.
    pub prefix_values: Vec<Vec<f64>>,
    pub tolerance: f64,
}

impl RunTrace {
    /// Cover times read off the prefix values.
    pub fn cover_times(&self) -> Result<Vec<usize>> {
        self.prefix_values
            .iter()
            .enumerate()
            .map(|(function, values)| {
                values
                    .iter()
                    .position(|&v| v >= 1.0 - self.tolerance)
                    .filter(|&t| t >= 1)
                    .ok_or(Error::NeverCovered { function })
            })
            .collect()
    }

    pub fn report(&self, instance: &Instance) -> Result<CoverReport> {
        let times = self.cover_times()?;
        Ok(CoverReport {
            total_cost: instance.weighted_cost(&times),
            cover_times: times,
        })
    }
}

/// The adaptive residual updates ordering.
pub fn adaptive_residual_updates(instance: &Instance) -> RunTrace {
    run_greedy_loop(instance, PotentialRule::AdaptiveResidual)
}

/// The cumulative greedy baseline.
pub fn cumulative_greedy(instance: &Instance) -> RunTrace {
    run_greedy_loop(instance, PotentialRule::Cumulative)
}

fn run_greedy_loop(instance: &Instance, rule: PotentialRule) -> RunTrace {
    let m = instance.num_elements();
    let n = instance.num_functions();
    let tolerance = instance.tolerance();
    let weights = instance.weights();

    let mut states: Vec<ValuationState<'_>> = instance.valuations().iter().map(Valuation::state).collect();
    let mut covered: Vec<bool> = states.iter().map(|s| instance.covers(s.value())).collect();
    let mut prefix_values: Vec<Vec<f64>> = states
        .iter()
        .map(|s| {
            let mut v = Vec::with_capacity(m + 1);
            v.push(s.value());
            v
        })
        .collect();

    let mut remaining: Vec<usize> = (0..m).collect();
    let mut scores = vec![0.0f64; m];
    let mut order = Vec::with_capacity(m);
    let mut frozen = Vec::with_capacity(m);
    let mut q = Vec::with_capacity(m);

    for _ in 0..m {
        let chosen = if covered.iter().all(|&c| c) {
            // every potential is zero; the tie-break picks the lowest index
            remaining[0]
        } else {
            for &j in &remaining {
                scores[j] = 0.0;
            }
            for i in (0..n).filter(|&i| !covered[i] && weights[i] != 0.0) {
                let state = &states[i];
                let current = state.value();
                let w = weights[i];
                for &j in &remaining {
                    scores[j] += w * rule.potential(current, state.gain(j), tolerance);
                }
            }
            let mut best = remaining[0];
            for &j in &remaining[1..] {
                if scores[j] > scores[best] {
                    best = j;
                }
            }
            best
        };

        let column: Vec<f64> = (0..n)
            .map(|i| {
                if covered[i] {
                    0.0
                } else {
                    rule.potential(states[i].value(), states[i].gain(chosen), tolerance)
                }
            })
            .collect();
        q.push(weights.iter().zip(&column).map(|(w, p)| w * p).sum());
        frozen.push(column);

        for (i, state) in states.iter_mut().enumerate() {
            state.insert(chosen);
            let value = state.value();
            prefix_values[i].push(value);
            covered[i] = instance.covers(value);
        }
        order.push(chosen);
        remaining.retain(|&j| j != chosen);
    }

    RunTrace {
        rule,
        ordering: LinearOrdering::new(order, rule.producer()).expect("solver emits a permutation"),
        frozen_potentials: frozen,
        q,
        prefix_values,
        tolerance,
    }
}

/// Exact optimum found by [`brute_force_optimal`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalRanking {
    pub ordering: LinearOrdering,
    pub report: CoverReport,
}

/// Minimum-cost ordering by exhaustive search over permutations.
///
/// Depth-first search in lexicographic order with branch and bound: after `d`
/// steps the accumulated cost plus the weight of the functions still uncovered
/// is a lower bound on any completion. Once every positive-weight function is
/// covered the remaining elements are appended in ascending order. Among
/// orderings of equal cost (up to a relative 1e-12) the lexicographically
/// smallest is returned.
pub fn brute_force_optimal(instance: &Instance, limit: usize) -> Result<OptimalRanking> {
    let m = instance.num_elements();
    if m > limit {
        return Err(Error::TooLarge {
            what: "brute-force ground set",
            size: m,
            limit,
        });
    }
    let states: Vec<ValuationState<'_>> = instance.valuations().iter().map(Valuation::state).collect();
    let uncovered: Vec<bool> = (0..instance.num_functions())
        .map(|i| instance.weights()[i] > 0.0)
        .collect();
    let mut search = Search {
        instance,
        best_cost: f64::INFINITY,
        best: None,
        prefix: Vec::with_capacity(m),
        used: FixedBitSet::with_capacity(m),
    };
    search.descend(&states, &uncovered, 0.0);

    let order = search.best.expect("search visits at least one leaf");
    let ordering = LinearOrdering::new(order, Producer::BruteForce)?;
    let report = cover_times(instance, &ordering)?;
    Ok(OptimalRanking { ordering, report })
}

struct Search<'a> {
    instance: &'a Instance,
    best_cost: f64,
    best: Option<Vec<usize>>,
    prefix: Vec<usize>,
    used: FixedBitSet,
}

impl Search<'_> {
    fn improves(&self, cost: f64) -> bool {
        self.best.is_none() || cost < self.best_cost - 1e-12 * self.best_cost.abs().max(1.0)
    }

    fn descend(&mut self, states: &[ValuationState<'_>], uncovered: &[bool], accumulated: f64) {
        let weights = self.instance.weights();
        let remaining_weight: f64 = uncovered.iter().zip(weights).filter(|(u, _)| **u).map(|(_, w)| w).sum();
        let m = self.instance.num_elements();

        if remaining_weight == 0.0 {
            if self.improves(accumulated) {
                let mut order = self.prefix.clone();
                order.extend((0..m).filter(|&j| !self.used.contains(j)));
                self.best_cost = accumulated;
                self.best = Some(order);
            }
            return;
        }
        // every uncovered function pays at least one more step
        if !self.improves(accumulated + remaining_weight) {
            return;
        }

        let step_cost = accumulated + remaining_weight;
        for j in 0..m {
            if self.used.contains(j) {
                continue;
            }
            let mut next_states = states.to_vec();
            let mut next_uncovered = uncovered.to_vec();
            for (i, state) in next_states.iter_mut().enumerate() {
                state.insert(j);
                if next_uncovered[i] && self.instance.covers(state.value()) {
                    next_uncovered[i] = false;
                }
            }
            self.used.insert(j);
            self.prefix.push(j);
            self.descend(&next_states, &next_uncovered, step_cost);
            self.prefix.pop();
            self.used.set(j, false);
        }
    }
}
