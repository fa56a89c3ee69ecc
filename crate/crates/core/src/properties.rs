//! Checks for normalization, monotonicity and submodularity of set functions.
//!
//! Submodularity is tested in its decreasing-marginals form: for `S ⊆ T` and
//! `j ∉ T`, `f_S(j) >= f_T(j)`. The exhaustive mode walks every set `S`,
//! every `i, j ∉ S` and compares `f_S(j)` with `f_{S+i}(j)`; this local
//! condition is equivalent to the full one and costs `O(m^2 2^m)` instead of
//! `O(m 3^m)`. Reported witnesses use `T = S ∪ {i}`.

use std::fmt;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::valuation::{SetFunction, EXPLICIT_MAX_ELEMENTS};

/// Default number of random triples for [`CheckMode::Sampled`].
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

impl CheckMode {
    pub fn sampled(seed: u64) -> Self {
        CheckMode::Sampled {
            samples: DEFAULT_SAMPLES,
            seed,
        }
    }
}

/// First property violation found by the checker. Element indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotNormalized {
        value: f64,
    },
    NotMonotone {
        set: Vec<usize>,
        element: usize,
        before: f64,
        after: f64,
    },
    NotSubmodular {
        smaller: Vec<usize>,
        larger: Vec<usize>,
        element: usize,
        smaller_gain: f64,
        larger_gain: f64,
    },
}

impl Violation {
    pub fn into_error(self) -> Error {
        match self {
            Violation::NotNormalized { value } => Error::NotNormalized { value },
            v @ Violation::NotMonotone { .. } => Error::NotMonotone(v.to_string()),
            v @ Violation::NotSubmodular { .. } => Error::NotSubmodular(v.to_string()),
        }
    }
}

struct OneBased<'a>(&'a [usize]);

impl fmt::Display for OneBased<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", e + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotNormalized { value } => write!(f, "f(empty set) = {value}"),
            Violation::NotMonotone {
                set,
                element,
                before,
                after,
            } => write!(
                f,
                "adding {} to S={} lowers the value from {before} to {after}",
                element + 1,
                OneBased(set)
            ),
            Violation::NotSubmodular {
                smaller,
                larger,
                element,
                smaller_gain,
                larger_gain,
            } => write!(
                f,
                "S={} T={} j={}: f_S(j) = {smaller_gain} < f_T(j) = {larger_gain}",
                OneBased(smaller),
                OneBased(larger),
                element + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail(Violation),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Checks `f(∅) = 0`, monotonicity and submodularity up to `tolerance`.
pub fn check_submodular_monotone_normalized<F: SetFunction + ?Sized>(
    f: &F,
    mode: CheckMode,
    tolerance: f64,
) -> Result<Verdict> {
    let m = f.ground_size();
    let empty = f.value(&FixedBitSet::with_capacity(m));
    if empty.abs() > tolerance {
        return Ok(Verdict::Fail(Violation::NotNormalized { value: empty }));
    }
    match mode {
        CheckMode::Exhaustive => exhaustive(f, tolerance),
        CheckMode::Sampled { samples, seed } => Ok(sampled(f, samples, seed, tolerance)),
    }
}

fn members(mask: u32, m: usize) -> Vec<usize> {
    (0..m).filter(|&k| mask & (1 << k) != 0).collect()
}

fn exhaustive<F: SetFunction + ?Sized>(f: &F, tolerance: f64) -> Result<Verdict> {
    let m = f.ground_size();
    if m > EXPLICIT_MAX_ELEMENTS {
        return Err(Error::TooLargeForExhaustive {
            m,
            limit: EXPLICIT_MAX_ELEMENTS,
        });
    }
    let values: Vec<f64> = (0..1u32 << m).map(|mask| f.value_of_mask(mask)).collect();

    for mask in 0..1u32 << m {
        for j in (0..m).filter(|&j| mask & (1 << j) == 0) {
            let after = values[(mask | 1 << j) as usize];
            if after < values[mask as usize] - tolerance {
                return Ok(Verdict::Fail(Violation::NotMonotone {
                    set: members(mask, m),
                    element: j,
                    before: values[mask as usize],
                    after,
                }));
            }
        }
    }

    for mask in 0..1u32 << m {
        let base = values[mask as usize];
        for i in (0..m).filter(|&i| mask & (1 << i) == 0) {
            let larger = mask | 1 << i;
            for j in (0..m).filter(|&j| j != i && mask & (1 << j) == 0) {
                let smaller_gain = values[(mask | 1 << j) as usize] - base;
                let larger_gain = values[(larger | 1 << j) as usize] - values[larger as usize];
                if smaller_gain < larger_gain - tolerance {
                    return Ok(Verdict::Fail(Violation::NotSubmodular {
                        smaller: members(mask, m),
                        larger: members(larger, m),
                        element: j,
                        smaller_gain,
                        larger_gain,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

fn sampled<F: SetFunction + ?Sized>(f: &F, samples: usize, seed: u64, tolerance: f64) -> Verdict {
    let m = f.ground_size();
    if m < 2 {
        // only S = T = ∅ with a single j exists; monotonicity covers it
        if m == 1 {
            let mut one = FixedBitSet::with_capacity(1);
            one.insert(0);
            let after = f.value(&one);
            let before = f.value(&FixedBitSet::with_capacity(1));
            if after < before - tolerance {
                return Verdict::Fail(Violation::NotMonotone {
                    set: vec![],
                    element: 0,
                    before,
                    after,
                });
            }
        }
        return Verdict::Pass;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let j = rng.gen_range(0..m);
        let mut larger = FixedBitSet::with_capacity(m);
        let mut smaller = FixedBitSet::with_capacity(m);
        for k in (0..m).filter(|&k| k != j) {
            if rng.gen_bool(0.5) {
                larger.insert(k);
                if rng.gen_bool(0.5) {
                    smaller.insert(k);
                }
            }
        }
        let with_j = |s: &FixedBitSet| {
            let mut t = s.clone();
            t.insert(j);
            t
        };
        let (fs, ft) = (f.value(&smaller), f.value(&larger));
        let (fsj, ftj) = (f.value(&with_j(&smaller)), f.value(&with_j(&larger)));

        if ft < fs - tolerance {
            // S ⊆ T, so walk the chain to find a single-element witness
            let mut current = smaller.clone();
            for k in larger.difference(&smaller).collect::<Vec<_>>() {
                let before = f.value(&current);
                let mut next = current.clone();
                next.insert(k);
                let after = f.value(&next);
                if after < before - tolerance {
                    return Verdict::Fail(Violation::NotMonotone {
                        set: current.ones().collect(),
                        element: k,
                        before,
                        after,
                    });
                }
                current = next;
            }
        }
        if ftj < ft - tolerance {
            return Verdict::Fail(Violation::NotMonotone {
                set: larger.ones().collect(),
                element: j,
                before: ft,
                after: ftj,
            });
        }
        if fsj - fs < ftj - ft - tolerance {
            return Verdict::Fail(Violation::NotSubmodular {
                smaller: smaller.ones().collect(),
                larger: larger.ones().collect(),
                element: j,
                smaller_gain: fsj - fs,
                larger_gain: ftj - ft,
            });
        }
    }
    Verdict::Pass
}
