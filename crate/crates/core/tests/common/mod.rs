//! Independent reference implementations used by the integration tests.
//!
//! Everything here works from the raw JSON descriptors and recomputes values
//! from scratch, sharing no evaluation code with the library.

#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use proptest::prelude::*;
use subrank::document::{FunctionDescriptor, InstanceDocument};
use subrank::generators::{random_instance, Family, RandomSpec};
use subrank::valuation::{make_coverage, make_explicit, SetFunction};
use subrank::Instance;

/// Raw data of one function, 0-based.
#[derive(Debug, Clone)]
pub enum Raw {
    Modular(Vec<f64>),
    Coverage {
        sets: Vec<Vec<usize>>,
        weights: Vec<f64>,
        normalizer: f64,
    },
    Explicit(Vec<f64>),
}

impl Raw {
    pub fn value(&self, set: &[usize]) -> f64 {
        match self {
            Raw::Modular(v) => set.iter().map(|&j| v[j]).sum(),
            Raw::Coverage {
                sets,
                weights,
                normalizer,
            } => {
                let items: BTreeSet<usize> = set.iter().flat_map(|&j| sets[j].iter().copied()).collect();
                items.iter().map(|&x| weights[x]).sum::<f64>() / normalizer
            }
            Raw::Explicit(table) => table[set.iter().map(|&j| 1usize << j).sum::<usize>()],
        }
    }
}

pub struct RawInstance {
    pub m: usize,
    pub weights: Vec<f64>,
    pub functions: Vec<Raw>,
    pub tolerance: f64,
}

pub fn raw(instance: &Instance) -> RawInstance {
    let doc = InstanceDocument::from_instance(instance);
    let functions = doc
        .functions
        .iter()
        .map(|f| match f {
            FunctionDescriptor::Modular { values } => Raw::Modular(values.clone()),
            FunctionDescriptor::Coverage {
                item_weights,
                element_sets,
                normalizer,
                ..
            } => Raw::Coverage {
                sets: element_sets.iter().map(|s| s.iter().map(|x| x - 1).collect()).collect(),
                weights: item_weights.clone(),
                normalizer: *normalizer,
            },
            FunctionDescriptor::Explicit { table, .. } => Raw::Explicit(table.clone()),
        })
        .collect();
    RawInstance {
        m: doc.m,
        weights: doc.weights,
        functions,
        tolerance: instance.tolerance(),
    }
}

impl RawInstance {
    pub fn covered(&self, value: f64) -> bool {
        value >= 1.0 - self.tolerance
    }

    /// Cover times of a 0-based ordering, each prefix evaluated from scratch.
    pub fn cover_times(&self, order: &[usize]) -> Vec<usize> {
        self.functions
            .iter()
            .map(|f| {
                (1..=order.len())
                    .find(|&t| self.covered(f.value(&order[..t])))
                    .expect("every function is coverable")
            })
            .collect()
    }

    pub fn cost(&self, order: &[usize]) -> f64 {
        self.cover_times(order)
            .iter()
            .zip(&self.weights)
            .map(|(&c, w)| w * c as f64)
            .sum()
    }

    /// Optimal cost and the lexicographically first optimal ordering, by
    /// enumerating every permutation.
    pub fn optimum(&self) -> (f64, Vec<usize>) {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for order in (0..self.m).permutations(self.m) {
            let cost = self.cost(&order);
            if best
                .as_ref()
                .map_or(true, |(b, _)| cost < *b - 1e-12 * b.abs().max(1.0))
            {
                best = Some((cost, order));
            }
        }
        best.unwrap()
    }

    /// Smallest strictly positive marginal over all functions, sets and elements.
    pub fn exact_epsilon(&self) -> f64 {
        let mut eps = f64::INFINITY;
        for f in &self.functions {
            for mask in 0u32..(1 << self.m) {
                let set: Vec<usize> = (0..self.m).filter(|&j| mask >> j & 1 == 1).collect();
                let base = f.value(&set);
                for j in (0..self.m).filter(|&j| mask >> j & 1 == 0) {
                    let mut with = set.clone();
                    with.push(j);
                    let gain = f.value(&with) - base;
                    if gain > 1e-12 {
                        eps = eps.min(gain);
                    }
                }
            }
        }
        eps
    }
}

/// Smallest number of sets covering `1..=universe` (sets 1-based), by
/// enumerating subfamilies.
pub fn min_set_cover(universe: usize, sets: &[Vec<usize>]) -> usize {
    (0u32..(1 << sets.len()))
        .filter(|mask| {
            let covered: BTreeSet<usize> = (0..sets.len())
                .filter(|k| mask >> k & 1 == 1)
                .flat_map(|k| sets[k].iter().copied())
                .collect();
            covered.len() == universe
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .expect("the whole family covers the universe")
}

/// Random set cover input with every item in at least one set.
pub fn set_cover_strategy(max_sets: usize, max_items: usize) -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (1..=max_items, 1..=max_sets).prop_flat_map(|(items, sets)| {
        (
            Just(items),
            prop::collection::vec(prop::collection::vec(1..=items, 0..=items), sets),
            prop::collection::vec(0..sets, items),
        )
            .prop_map(|(items, mut family, owners)| {
                for (item, owner) in owners.into_iter().enumerate() {
                    family[owner].push(item + 1);
                }
                for set in &mut family {
                    set.sort_unstable();
                    set.dedup();
                }
                (items, family)
            })
    })
}

/// Small random instances of the modular, coverage and explicit families.
pub fn instance_strategy(max_m: usize, max_n: usize) -> impl Strategy<Value = Instance> {
    (1..=max_m, 1..=max_n, 0..3u8, 0.2f64..1.0, any::<u64>()).prop_map(|(m, n, family, density, seed)| {
        let spec = RandomSpec::new(
            m,
            n,
            if family == 0 { Family::Modular } else { Family::Coverage },
            density,
            seed,
        );
        let instance = random_instance(&spec).unwrap();
        if family == 2 {
            to_explicit(&instance)
        } else {
            instance
        }
    })
}

/// The same instance with every function stored as a full table.
pub fn to_explicit(instance: &Instance) -> Instance {
    let m = instance.num_elements();
    let valuations = instance
        .valuations()
        .iter()
        .map(|f| make_explicit((0u32..(1 << m)).map(|mask| f.value_of_mask(mask)).collect()).unwrap())
        .collect();
    Instance::new(m, instance.weights().to_vec(), valuations).unwrap()
}

/// Coverage valuation built from proptest data; items 0-based.
pub fn coverage_from(sets: Vec<Vec<usize>>, universe: usize, weights: Vec<f64>) -> subrank::Valuation {
    let total: f64 = weights.iter().sum();
    make_coverage(
        sets.into_iter()
            .map(|s| s.into_iter().filter(|&x| x < universe).collect())
            .collect(),
        weights,
        total,
    )
    .unwrap()
}
