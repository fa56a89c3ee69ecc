//! JSON documents for instances and solver traces.
//!
//! Instance documents look like
//!
//! ```json
//! {"functions":[{"kind":"modular","values":[7.5000000000000000e-1,2.5000000000000000e-1]}],
//!  "m":2,"n":1,"schema_version":"1","weights":[1.0000000000000000e0]}
//! ```
//!
//! Function descriptors are tagged by `kind`: `modular` (`values`),
//! `coverage` (`universe_size`, `item_weights`, `element_sets`, `normalizer`)
//! or `explicit` (`m`, `table`). Universe items in `element_sets` are 1-based;
//! explicit tables are indexed by bitmask with bit `k` set iff element `k + 1`
//! is in the set.
//!
//! The canonical form has sorted keys, no whitespace, floats written with 17
//! significant digits in exponent notation, and a trailing newline.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance, RawInstance};
use crate::solvers::{PotentialRule, RunTrace};
use crate::valuation::{make_coverage, make_explicit, make_modular, SetFunction, Valuation};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub schema_version: String,
    pub m: usize,
    pub n: usize,
    pub weights: Vec<f64>,
    pub functions: Vec<FunctionDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionDescriptor {
    Modular {
        values: Vec<f64>,
    },
    Coverage {
        universe_size: usize,
        item_weights: Vec<f64>,
        element_sets: Vec<Vec<usize>>,
        normalizer: f64,
    },
    Explicit {
        m: usize,
        table: Vec<f64>,
    },
}

impl FunctionDescriptor {
    fn from_valuation(f: &Valuation) -> Self {
        match f {
            Valuation::Modular(v) => FunctionDescriptor::Modular {
                values: v.values().to_vec(),
            },
            Valuation::Coverage(v) => FunctionDescriptor::Coverage {
                universe_size: v.universe_size(),
                item_weights: v.item_weights().to_vec(),
                element_sets: v
                    .element_sets()
                    .map(|s| s.iter().map(|&x| x as usize + 1).collect())
                    .collect(),
                normalizer: v.normalizer(),
            },
            Valuation::Explicit(v) => FunctionDescriptor::Explicit {
                m: v.ground_size(),
                table: v.table().to_vec(),
            },
        }
    }

    fn to_valuation(&self, index: usize) -> Result<Valuation> {
        match self {
            FunctionDescriptor::Modular { values } => make_modular(values.clone()),
            FunctionDescriptor::Coverage {
                universe_size,
                item_weights,
                element_sets,
                normalizer,
            } => {
                if item_weights.len() != *universe_size {
                    return Err(Error::Document(format!(
                        "function {}: {} item weights for a universe of {universe_size}",
                        index + 1,
                        item_weights.len()
                    )));
                }
                let sets = element_sets
                    .iter()
                    .enumerate()
                    .map(|(element, items)| {
                        items
                            .iter()
                            .map(|&x| {
                                x.checked_sub(1).ok_or_else(|| {
                                    Error::Document(format!(
                                        "function {}: element {} references universe item 0",
                                        index + 1,
                                        element + 1
                                    ))
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                make_coverage(sets, item_weights.clone(), *normalizer)
            }
            FunctionDescriptor::Explicit { m, table } => {
                if table.len() != 1usize.checked_shl(*m as u32).unwrap_or(0) {
                    return Err(Error::Document(format!(
                        "function {}: explicit table has {} entries, expected 2^{m}",
                        index + 1,
                        table.len()
                    )));
                }
                make_explicit(table.clone())
            }
        }
    }
}

impl InstanceDocument {
    pub fn from_instance(instance: &Instance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            m: instance.num_elements(),
            n: instance.num_functions(),
            weights: instance.weights().to_vec(),
            functions: instance
                .valuations()
                .iter()
                .map(FunctionDescriptor::from_valuation)
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Document(format!(
                "unsupported schema_version {:?}",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn to_instance(&self, tolerance: f64) -> Result<Instance> {
        if self.functions.len() != self.n || self.weights.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "n = {} but {} functions and {} weights",
                self.n,
                self.functions.len(),
                self.weights.len()
            )));
        }
        let valuations = self
            .functions
            .iter()
            .enumerate()
            .map(|(i, f)| f.to_valuation(i))
            .collect::<Result<Vec<_>>>()?;
        validate_instance(
            RawInstance {
                m: self.m,
                weights: self.weights.clone(),
                valuations,
            },
            tolerance,
        )
    }

    pub fn to_canonical_string(&self) -> String {
        to_canonical_json(self)
    }
}

/// Serializes and validates in one go.
pub fn parse_instance(text: &str, tolerance: f64) -> Result<Instance> {
    InstanceDocument::parse(text)?.to_instance(tolerance)
}

/// Serialized trace of a solver run, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub algorithm: String,
    pub ordering: Vec<usize>,
    pub cover_times: Vec<usize>,
    pub q: Vec<f64>,
    /// `frozen_potentials[t][i]`, step-major.
    pub frozen_potentials: Vec<Vec<f64>>,
    /// `prefix_values[i][t]`, `t = 0..=m`.
    pub prefix_values: Vec<Vec<f64>>,
    pub tolerance: f64,
}

impl TraceDocument {
    pub fn from_trace(trace: &RunTrace) -> Result<Self> {
        Ok(Self {
            algorithm: match trace.rule {
                PotentialRule::AdaptiveResidual => "aru",
                PotentialRule::Cumulative => "greedy",
            }
            .into(),
            ordering: trace.ordering.one_based(),
            cover_times: trace.cover_times()?,
            q: trace.q.clone(),
            frozen_potentials: trace.frozen_potentials.clone(),
            prefix_values: trace.prefix_values.clone(),
            tolerance: trace.tolerance,
        })
    }
}

/// Canonical JSON for any serializable value: sorted object keys, compact
/// layout, floats in `{:.16e}` notation, trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    // Value's map is ordered by key
    let value = serde_json::to_value(value).expect("documents serialize to JSON");
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}
