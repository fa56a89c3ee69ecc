//! Runtime audits of the approximation analysis.
//!
//! For a run with cover times `c_i`:
//!
//! * `I_t = { i : c_i >= t }` are the functions still uncovered before step `t`,
//! * `R_t = sum_{i in I_t} w_i` is the cost paid at step `t`,
//! * `Q_t = sum_i w_i P_{i,π(t)}` is the weighted potential of the selected element,
//! * `Λ_t = R_t / Q_t` is the penalty of step `t`,
//! * `Δ_t' = sum_{t >= t'} Q_t` is the tail potential mass.
//!
//! The total cost equals `sum_t R_t = sum_t Λ_t Q_t`. With
//! `γ = ln(1/ε) + 2` every function's potentials along an adaptive run sum to
//! at most `γ`, hence `Δ_t' <= γ R_t'`, and the run costs at most `4γ` times
//! the optimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{cover_times, Instance, LinearOrdering};
use crate::solvers::{brute_force_optimal, PotentialRule, RunTrace};

/// Absolute slack for bound comparisons.
pub const BOUND_TOLERANCE: f64 = 1e-6;
/// Relative slack for cost identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// `ε̂` and `γ = ln(1/ε̂) + 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCertificate {
    pub epsilon_hat: f64,
    pub gamma: f64,
}

/// Lower bound on the smallest non-zero marginal over all functions.
pub fn epsilon_lower_bound(instance: &Instance) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (function, f) in instance.valuations().iter().enumerate() {
        let eps = f.epsilon_lower_bound().ok_or(Error::AllMarginalsZero { function })?;
        best = best.min(eps);
    }
    Ok(best)
}

pub fn gamma_certificate(instance: &Instance) -> Result<GammaCertificate> {
    let epsilon_hat = epsilon_lower_bound(instance)?;
    Ok(GammaCertificate {
        epsilon_hat,
        gamma: (1.0 / epsilon_hat).ln() + 2.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialAudit {
    /// `sums[i] = sum_t P_{i,π(t)}`.
    pub sums: Vec<f64>,
    pub passed: Vec<bool>,
}

impl PotentialAudit {
    pub fn all_passed(&self) -> bool {
        self.passed.iter().all(|&p| p)
    }
}

/// Per-function potential sums of an adaptive run compared against `γ`.
pub fn audit_potential_sums(trace: &RunTrace, gamma: f64) -> Result<PotentialAudit> {
    if trace.rule != PotentialRule::AdaptiveResidual {
        return Err(Error::WrongTraceKind {
            expected: PotentialRule::AdaptiveResidual.label(),
            found: trace.rule.label(),
        });
    }
    let n = trace.prefix_values.len();
    let mut sums = vec![0.0; n];
    for column in &trace.frozen_potentials {
        for (sum, p) in sums.iter_mut().zip(column) {
            *sum += p;
        }
    }
    let passed = sums.iter().map(|&s| s <= gamma + BOUND_TOLERANCE).collect();
    Ok(PotentialAudit { sums, passed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainAudit {
    pub sum: f64,
    /// Smallest positive increment; `None` when the chain never increases.
    pub delta: Option<f64>,
    /// `ln(1/δ) + 1`, or `1` for a chain without positive increments.
    pub bound: f64,
    pub ok: bool,
}

/// Residual-normalized increments of a monotone chain `0 = v_0 <= ... <= v_l < 1`.
pub fn audit_chain_sum(chain: &[f64]) -> Result<ChainAudit> {
    match chain.first() {
        None => return Err(Error::BadChain("chain is empty".into())),
        Some(&first) if first != 0.0 => {
            return Err(Error::BadChain(format!("chain starts at {first}, not 0")));
        }
        _ => {}
    }
    if let Some(&last) = chain.last() {
        if last.is_nan() || last >= 1.0 {
            return Err(Error::BadChain(format!("chain ends at {last} >= 1")));
        }
    }
    let mut sum = 0.0;
    let mut delta: Option<f64> = None;
    for (t, pair) in chain.windows(2).enumerate() {
        let (prev, next) = (pair[0], pair[1]);
        if next < prev {
            return Err(Error::BadChain(format!(
                "chain decreases at position {}: {prev} -> {next}",
                t + 1
            )));
        }
        let step = next - prev;
        sum += step / (1.0 - prev);
        if step > 0.0 {
            delta = Some(delta.map_or(step, |d| d.min(step)));
        }
    }
    let bound = delta.map_or(1.0, |d| (1.0 / d).ln() + 1.0);
    Ok(ChainAudit {
        sum,
        delta,
        bound,
        ok: sum <= bound + 1e-9,
    })
}

/// The prefix values of function `function` strictly before it is covered.
pub fn uncovered_chain(trace: &RunTrace, function: usize) -> Vec<f64> {
    trace.prefix_values[function]
        .iter()
        .copied()
        .take_while(|&v| v < 1.0 - trace.tolerance)
        .collect()
}

/// The quantities `I_t, R_t, Q_t, Λ_t, Δ_t` of a run. Vectors are indexed by
/// `t - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub cover_times: Vec<usize>,
    /// `survivors[t]`: 0-based functions with `c_i >= t + 1`.
    pub survivors: Vec<Vec<usize>>,
    pub r: Vec<f64>,
    pub q: Vec<f64>,
    /// `R_t / Q_t`; defined as 0 when `Q_t = R_t = 0`.
    pub lambda: Vec<f64>,
    pub delta: Vec<f64>,
    /// `sum_t R_t`.
    pub alg_cost: f64,
    /// `sum_t Λ_t Q_t`.
    pub penalty_cost: f64,
    /// `sum_i w_i c_i`.
    pub weighted_cost: f64,
}

impl RunDiagnostics {
    /// `Δ_t' <= γ R_t'` for every `t'`.
    pub fn width_bound(&self, gamma: f64) -> Vec<bool> {
        self.delta
            .iter()
            .zip(&self.r)
            .map(|(d, r)| *d <= gamma * r + BOUND_TOLERANCE)
            .collect()
    }

    pub fn identities_hold(&self) -> bool {
        close(self.alg_cost, self.penalty_cost) && close(self.alg_cost, self.weighted_cost)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= IDENTITY_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Computes the per-step quantities of a run and checks the cost identities.
pub fn run_diagnostics(instance: &Instance, trace: &RunTrace) -> Result<RunDiagnostics> {
    let m = instance.num_elements();
    let n = instance.num_functions();
    if trace.ordering.len() != m
        || trace.q.len() != m
        || trace.frozen_potentials.len() != m
        || trace.prefix_values.len() != n
        || trace.frozen_potentials.iter().any(|c| c.len() != n)
        || trace.prefix_values.iter().any(|v| v.len() != m + 1)
    {
        return Err(Error::InconsistentTrace(
            "trace dimensions do not match the instance".into(),
        ));
    }
    let weights = instance.weights();
    for (t, (column, &q)) in trace.frozen_potentials.iter().zip(&trace.q).enumerate() {
        let recomputed: f64 = weights.iter().zip(column).map(|(w, p)| w * p).sum();
        if !close(recomputed, q) {
            return Err(Error::InconsistentTrace(format!(
                "Q_{} = {q} but the frozen column sums to {recomputed}",
                t + 1
            )));
        }
    }
    let times = trace.cover_times()?;
    let expected = cover_times(instance, &trace.ordering)?;
    if expected.cover_times != times {
        return Err(Error::InconsistentTrace(format!(
            "trace cover times {times:?} differ from recomputed {:?}",
            expected.cover_times
        )));
    }

    let mut survivors = Vec::with_capacity(m);
    let mut r = Vec::with_capacity(m);
    let mut lambda = Vec::with_capacity(m);
    for t in 1..=m {
        let alive: Vec<usize> = (0..n).filter(|&i| times[i] >= t).collect();
        let rt: f64 = alive.iter().map(|&i| weights[i]).sum();
        let qt = trace.q[t - 1];
        let lt = if qt > 0.0 {
            rt / qt
        } else if rt == 0.0 {
            0.0
        } else {
            return Err(Error::InconsistentTrace(format!("Q_{t} = 0 while R_{t} = {rt} > 0")));
        };
        survivors.push(alive);
        r.push(rt);
        lambda.push(lt);
    }
    let mut delta = vec![0.0; m];
    let mut tail = 0.0;
    for t in (0..m).rev() {
        tail += trace.q[t];
        delta[t] = tail;
    }
    let alg_cost = r.iter().sum();
    let penalty_cost = lambda.iter().zip(&trace.q).map(|(l, q)| l * q).sum();

    let diagnostics = RunDiagnostics {
        weighted_cost: instance.weighted_cost(&times),
        cover_times: times,
        survivors,
        r,
        q: trace.q.clone(),
        lambda,
        delta,
        alg_cost,
        penalty_cost,
    };
    if !diagnostics.identities_hold() {
        return Err(Error::InconsistentTrace(format!(
            "cost identities disagree: sum R = {}, sum ΛQ = {}, sum wc = {}",
            diagnostics.alg_cost, diagnostics.penalty_cost, diagnostics.weighted_cost
        )));
    }
    Ok(diagnostics)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub width: f64,
    pub height: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramExport {
    pub bars: Vec<Bar>,
    pub total_area: f64,
}

impl HistogramExport {
    fn from_bars(bars: Vec<Bar>) -> Self {
        let total_area = bars.iter().map(|b| b.width * b.height).sum();
        Self { bars, total_area }
    }

    /// Drops bars of zero width; the area is unchanged.
    pub fn without_empty_bars(&self) -> Self {
        Self::from_bars(self.bars.iter().filter(|b| b.width != 0.0).cloned().collect())
    }
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(header).expect("writing to a Vec cannot fail");
    for row in rows {
        writer.write_record(&row).expect("writing to a Vec cannot fail");
    }
    String::from_utf8(writer.into_inner().expect("flushing a Vec cannot fail")).expect("CSV fields are UTF-8")
}

impl RunDiagnostics {
    /// One row per step with columns `t,R,Q,Lambda,Delta`; `t` is 1-based.
    pub fn to_csv(&self) -> String {
        csv_string(
            &["t", "R", "Q", "Lambda", "Delta"],
            (0..self.r.len()).map(|t| {
                vec![
                    (t + 1).to_string(),
                    self.r[t].to_string(),
                    self.q[t].to_string(),
                    self.lambda[t].to_string(),
                    self.delta[t].to_string(),
                ]
            }),
        )
    }
}

impl HistogramExport {
    /// One row per bar with columns `width,height,label`.
    pub fn to_csv(&self) -> String {
        csv_string(
            &["width", "height", "label"],
            self.bars
                .iter()
                .map(|b| vec![b.width.to_string(), b.height.to_string(), b.label.clone()]),
        )
    }
}

/// Histogram of a reference ordering (one bar of width `w_i` and height
/// `c_i` per function, sorted by cover time) and of the adaptive run (one bar
/// of width `w_i P_{i,π(t)}` and height `Λ_t` per step and function).
pub fn export_histograms(
    instance: &Instance,
    optimal: &LinearOrdering,
    trace: &RunTrace,
) -> Result<(HistogramExport, HistogramExport)> {
    let report = cover_times(instance, optimal)?;
    let mut functions: Vec<usize> = (0..instance.num_functions()).collect();
    functions.sort_by_key(|&i| (report.cover_times[i], i));
    let optimal_bars = functions
        .into_iter()
        .map(|i| Bar {
            width: instance.weights()[i],
            height: report.cover_times[i] as f64,
            label: format!("f{}", i + 1),
        })
        .collect();

    let diagnostics = run_diagnostics(instance, trace)?;
    let mut algorithm_bars = Vec::with_capacity(instance.num_elements() * instance.num_functions());
    for (t, column) in trace.frozen_potentials.iter().enumerate() {
        for (i, p) in column.iter().enumerate() {
            algorithm_bars.push(Bar {
                width: instance.weights()[i] * p,
                height: diagnostics.lambda[t],
                label: format!("t{}:f{}", t + 1, i + 1),
            });
        }
    }
    Ok((
        HistogramExport::from_bars(optimal_bars),
        HistogramExport::from_bars(algorithm_bars),
    ))
}

/// What the algorithm's cost is compared against.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// Exact optimum by brute force, for ground sets up to `limit`.
    BruteForce { limit: usize },
    /// The cost of a given ordering.
    Ordering(LinearOrdering),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    BruteForceOpt,
    AlternateOrdering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub epsilon_hat: f64,
    pub gamma: f64,
    pub per_function_potential_sums: Vec<f64>,
    pub potential_sums_ok: bool,
    pub width_bound_ok: Vec<bool>,
    pub alg_cost: f64,
    pub reference_cost: f64,
    pub ratio_vs_reference: Option<f64>,
    pub reference_kind: ReferenceKind,
    /// `ratio <= 4γ`; only asserted against the exact optimum.
    pub within_bound: Option<bool>,
}

impl BoundCertificate {
    pub fn four_gamma(&self) -> f64 {
        4.0 * self.gamma
    }

    /// True when every audit that applies passed.
    pub fn passed(&self) -> bool {
        self.potential_sums_ok && self.width_bound_ok.iter().all(|&b| b) && self.within_bound != Some(false)
    }
}

/// Compares an adaptive run against a reference and collects all audits.
pub fn approximation_report(instance: &Instance, trace: &RunTrace, reference: &Reference) -> Result<BoundCertificate> {
    let GammaCertificate { epsilon_hat, gamma } = gamma_certificate(instance)?;
    let sums = audit_potential_sums(trace, gamma)?;
    let diagnostics = run_diagnostics(instance, trace)?;
    let (reference_cost, reference_kind) = match reference {
        Reference::BruteForce { limit } => (
            brute_force_optimal(instance, *limit)?.report.total_cost,
            ReferenceKind::BruteForceOpt,
        ),
        Reference::Ordering(ordering) => (
            cover_times(instance, ordering)?.total_cost,
            ReferenceKind::AlternateOrdering,
        ),
    };
    let ratio = (reference_cost > 0.0).then(|| diagnostics.alg_cost / reference_cost);
    let within_bound = match reference_kind {
        ReferenceKind::BruteForceOpt => ratio.map(|r| r <= 4.0 * gamma + BOUND_TOLERANCE),
        ReferenceKind::AlternateOrdering => None,
    };
    Ok(BoundCertificate {
        epsilon_hat,
        gamma,
        potential_sums_ok: sums.all_passed(),
        per_function_potential_sums: sums.sums,
        width_bound_ok: diagnostics.width_bound(gamma),
        alg_cost: diagnostics.alg_cost,
        reference_cost,
        ratio_vs_reference: ratio,
        reference_kind,
        within_bound,
    })
}
