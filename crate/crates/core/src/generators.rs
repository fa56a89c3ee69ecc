//! Instance generators: reductions from set cover, the greedy trap family,
//! the min-sum set cover and multiple intents special cases, and seeded
//! random instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::valuation::{make_coverage, make_modular, Valuation};
use crate::DEFAULT_TOLERANCE;

/// Largest `n` accepted by [`greedy_trap`].
pub const GREEDY_TRAP_MAX_N: usize = 1_000_000;

/// A set cover instance over the universe `1..=universe_size`.
///
/// Items inside `sets` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverInput {
    pub universe_size: usize,
    pub sets: Vec<Vec<usize>>,
}

impl SetCoverInput {
    pub fn new(universe_size: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let input = Self { universe_size, sets };
        input.check()?;
        Ok(input)
    }

    fn check(&self) -> Result<()> {
        if self.universe_size == 0 {
            return Err(Error::BadParams("universe must not be empty".into()));
        }
        if self.sets.is_empty() {
            return Err(Error::DimensionMismatch("at least one set is required".into()));
        }
        let mut hit = vec![false; self.universe_size];
        for (element, set) in self.sets.iter().enumerate() {
            for &item in set {
                if item == 0 || item > self.universe_size {
                    return Err(Error::BadUniverseRef {
                        element,
                        item: item.wrapping_sub(1),
                        universe_size: self.universe_size,
                    });
                }
                hit[item - 1] = true;
            }
        }
        match hit.iter().position(|h| !h) {
            Some(item) => Err(Error::UncoverableUniverseItem { item }),
            None => Ok(()),
        }
    }

    fn zero_based_sets(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(|s| s.iter().map(|x| x - 1).collect()).collect()
    }
}

/// One coverage function `f(T) = |∪_{l ∈ T} S_l| / |X|` with weight 1, one
/// element per set.
pub fn from_set_cover(input: &SetCoverInput) -> Result<Instance> {
    input.check()?;
    let f = make_coverage(
        input.zero_based_sets(),
        vec![1.0; input.universe_size],
        input.universe_size as f64,
    )?;
    Instance::new(input.sets.len(), vec![1.0], vec![f])
}

/// One 0/1 coverage function per universe item: `f^i(T) = 1` iff some chosen
/// set contains item `i`. All weights are 1.
pub fn min_sum_set_cover(input: &SetCoverInput) -> Result<Instance> {
    input.check()?;
    let m = input.sets.len();
    let valuations = (1..=input.universe_size)
        .map(|item| {
            let sets = input
                .sets
                .iter()
                .map(|s| if s.contains(&item) { vec![0] } else { vec![] })
                .collect();
            make_coverage(sets, vec![1.0], 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(m, vec![1.0; input.universe_size], valuations)
}

/// The instance on which cumulative greedy is `Ω(√n)` worse than optimal.
///
/// `m = √n + 2` elements and `n` unit-weight modular functions: `n - √n` of
/// them value element 1 at `1 - 1/n` and element 2 at `1/n`; the remaining
/// `√n` functions each value a single element `k + 2` (`k = 1..=√n`) at 1.
pub fn greedy_trap(n: usize) -> Result<Instance> {
    if n > GREEDY_TRAP_MAX_N {
        return Err(Error::TooLarge {
            what: "greedy trap",
            size: n,
            limit: GREEDY_TRAP_MAX_N,
        });
    }
    let root = (n as f64).sqrt().round() as usize;
    if n < 4 || root * root != n {
        return Err(Error::NotPerfectSquare(n));
    }
    let m = root + 2;
    let small = 1.0 / n as f64;
    let mut valuations = Vec::with_capacity(n);
    for _ in 0..n - root {
        let mut values = vec![0.0; m];
        values[0] = 1.0 - small;
        values[1] = small;
        valuations.push(make_modular(values)?);
    }
    for k in 0..root {
        let mut values = vec![0.0; m];
        values[k + 2] = 1.0;
        valuations.push(make_modular(values)?);
    }
    Instance::new(m, vec![1.0; n], valuations)
}

/// Modular functions whose entries in row `i` are all `0` or `nu[i]`.
pub fn multiple_intents(values: &[Vec<f64>], nu: &[f64], weights: &[f64]) -> Result<Instance> {
    if values.is_empty() || values.len() != nu.len() || values.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows, {} intent values, {} weights",
            values.len(),
            nu.len(),
            weights.len()
        )));
    }
    let m = values[0].len();
    let mut valuations = Vec::with_capacity(values.len());
    for (row, (entries, &nu_i)) in values.iter().zip(nu).enumerate() {
        if !(nu_i > 0.0 && nu_i <= 1.0) {
            return Err(Error::BadParams(format!(
                "intent value {} must lie in (0, 1], got {nu_i}",
                row + 1
            )));
        }
        if entries.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {m}",
                row + 1,
                entries.len()
            )));
        }
        let mut clean = Vec::with_capacity(m);
        for (column, &value) in entries.iter().enumerate() {
            if value.abs() <= DEFAULT_TOLERANCE {
                clean.push(0.0);
            } else if (value - nu_i).abs() <= DEFAULT_TOLERANCE {
                clean.push(nu_i);
            } else {
                return Err(Error::BadEntry {
                    row,
                    column,
                    value,
                    nu: nu_i,
                });
            }
        }
        valuations.push(make_modular(clean)?);
    }
    Instance::new(m, weights.to_vec(), valuations)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Modular,
    Coverage,
}

/// Parameters of [`random_instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub m: usize,
    pub n: usize,
    pub family: Family,
    /// Modular: probability that an entry is non-zero. Coverage: expected
    /// fraction of the universe in each element's set, on top of the one
    /// element every item is assigned to.
    pub density: f64,
    pub seed: u64,
    /// Per-function universe size for coverage functions; `2m` when absent.
    pub universe: Option<usize>,
}

impl RandomSpec {
    pub fn new(m: usize, n: usize, family: Family, density: f64, seed: u64) -> Self {
        Self {
            m,
            n,
            family,
            density,
            seed,
            universe: None,
        }
    }
}

/// A reproducible random instance. Weights are integers in `1..=4`.
pub fn random_instance(spec: &RandomSpec) -> Result<Instance> {
    if spec.m == 0 || spec.n == 0 {
        return Err(Error::BadParams("m and n must be at least 1".into()));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::BadParams(format!(
            "density must lie in (0, 1], got {}",
            spec.density
        )));
    }
    let universe = spec.universe.unwrap_or(2 * spec.m);
    if universe == 0 {
        return Err(Error::BadParams("universe must not be empty".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weights: Vec<f64> = (0..spec.n).map(|_| rng.gen_range(1..=4) as f64).collect();
    let valuations = (0..spec.n)
        .map(|_| match spec.family {
            Family::Modular => random_modular(&mut rng, spec.m, spec.density),
            Family::Coverage => random_coverage(&mut rng, spec.m, universe, spec.density),
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(spec.m, weights, valuations)
}

/// `count` small random instances named `random-0000`, `random-0001`, ...
///
/// Instance `k` draws `m` from `1..=max_m`, `n` from `1..=max_n` and a
/// density from `[0.3, 0.9)` using seed `seed + k`; even `k` are modular,
/// odd `k` coverage.
pub fn random_suite(count: usize, max_m: usize, max_n: usize, seed: u64) -> Result<Vec<(String, Instance)>> {
    if max_m == 0 || max_n == 0 {
        return Err(Error::BadParams("max_m and max_n must be at least 1".into()));
    }
    (0..count)
        .map(|k| {
            let instance_seed = seed.wrapping_add(k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
            let spec = RandomSpec {
                m: rng.gen_range(1..=max_m),
                n: rng.gen_range(1..=max_n),
                family: if k % 2 == 0 { Family::Modular } else { Family::Coverage },
                density: rng.gen_range(0.3..0.9),
                seed: rng.gen(),
                universe: None,
            };
            Ok((format!("random-{k:04}"), random_instance(&spec)?))
        })
        .collect()
}

fn random_modular(rng: &mut ChaCha8Rng, m: usize, density: f64) -> Result<Valuation> {
    let mut values: Vec<f64> = (0..m)
        .map(|_| {
            if rng.gen_bool(density) {
                rng.gen_range(0.05..1.0)
            } else {
                0.0
            }
        })
        .collect();
    if values.iter().all(|&v| v == 0.0) {
        let j = rng.gen_range(0..m);
        values[j] = rng.gen_range(0.05..1.0);
    }
    let target = rng.gen_range(1.0..1.5);
    let sum: f64 = values.iter().sum();
    for v in &mut values {
        *v *= target / sum;
    }
    make_modular(values)
}

fn random_coverage(rng: &mut ChaCha8Rng, m: usize, universe: usize, density: f64) -> Result<Valuation> {
    let item_weights: Vec<f64> = (0..universe).map(|_| rng.gen_range(1..=3) as f64).collect();
    let mut sets = vec![Vec::new(); m];
    for item in 0..universe {
        sets[rng.gen_range(0..m)].push(item);
    }
    let expected = density * universe as f64;
    for set in &mut sets {
        let mut k = expected.floor() as usize;
        if rng.gen_bool(expected - expected.floor()) {
            k += 1;
        }
        set.extend(sample(rng, universe, k.min(universe)));
    }
    let total: f64 = item_weights.iter().sum();
    let normalizer = total * rng.gen_range(0.4..=1.0);
    make_coverage(sets, item_weights, normalizer)
}
