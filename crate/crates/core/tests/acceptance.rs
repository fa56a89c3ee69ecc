//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p subrank --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subrank::analysis::{
    audit_chain_sum, audit_potential_sums, gamma_certificate, run_diagnostics, uncovered_chain, BOUND_TOLERANCE,
};
use subrank::document::{to_canonical_json, TraceDocument};
use subrank::generators::{
    from_set_cover, greedy_trap, min_sum_set_cover, random_instance, random_suite, Family, RandomSpec, SetCoverInput,
};
use subrank::properties::{check_submodular_monotone_normalized, CheckMode, Verdict, Violation};
use subrank::solvers::BRUTE_FORCE_DEFAULT_LIMIT;
use subrank::valuation::TableView;
use subrank::{
    adaptive_residual_updates, brute_force_optimal, cumulative_greedy, Instance, LinearOrdering, RunTrace, Valuation,
    DEFAULT_TOLERANCE,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

/// Seeded random instances shared by several criteria.
fn desk_suite() -> Vec<(String, Instance)> {
    random_suite(240, 7, 4, 2024).expect("suite generates")
}

fn trap_sizes() -> [usize; 3] {
    [4, 100, 400]
}

fn ratio_bound(instance: &Instance, trace: &RunTrace) -> Result<(f64, f64), String> {
    let gamma = gamma_certificate(instance).map_err(|e| e.to_string())?.gamma;
    let alg = trace.report(instance).map_err(|e| e.to_string())?.total_cost;
    let opt = brute_force_optimal(instance, BRUTE_FORCE_DEFAULT_LIMIT)
        .map_err(|e| e.to_string())?
        .report
        .total_cost;
    Ok((alg / opt, 4.0 * gamma))
}

fn criterion_1() -> Outcome {
    let suite = desk_suite();
    let families = suite
        .iter()
        .map(|(_, i)| i.valuations()[0].family())
        .collect::<std::collections::BTreeSet<_>>();
    ensure(families.len() == 2, || format!("families {families:?}"))?;
    let mut worst: f64 = 0.0;
    for (name, instance) in &suite {
        let trace = adaptive_residual_updates(instance);
        let (ratio, four_gamma) = ratio_bound(instance, &trace)?;
        ensure(ratio <= four_gamma + BOUND_TOLERANCE, || {
            format!("{name}: ratio {ratio} > 4γ = {four_gamma}")
        })?;
        worst = worst.max(ratio / four_gamma);
    }
    Ok(format!("{} instances, max ratio/4γ = {worst:.4}", suite.len()))
}

fn audit_run(name: &str, instance: &Instance, trace: &RunTrace) -> Result<(), String> {
    let gamma = gamma_certificate(instance).map_err(|e| e.to_string())?.gamma;
    let sums = audit_potential_sums(trace, gamma).map_err(|e| e.to_string())?;
    ensure(sums.all_passed(), || {
        format!("{name}: potential sums {:?} exceed γ = {gamma}", sums.sums)
    })?;
    let d = run_diagnostics(instance, trace).map_err(|e| format!("{name}: {e}"))?;
    ensure(d.width_bound(gamma).iter().all(|&ok| ok), || format!("{name}: Δ > γR"))?;
    ensure(d.identities_hold(), || format!("{name}: cost identities fail"))
}

fn criterion_2() -> Outcome {
    let mut runs = 0;
    for (name, instance) in desk_suite() {
        audit_run(&name, &instance, &adaptive_residual_updates(&instance))?;
        runs += 1;
    }
    for n in trap_sizes() {
        let instance = greedy_trap(n).map_err(|e| e.to_string())?;
        audit_run(
            &format!("greedy-trap({n})"),
            &instance,
            &adaptive_residual_updates(&instance),
        )?;
        runs += 1;
    }
    Ok(format!("{runs} adaptive runs audited"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut ratios = Vec::new();
    let mut costs = Vec::new();
    for n in trap_sizes() {
        let r = (n as f64).sqrt() as usize;
        let greedy_closed = (n - r) * (r + 2) + (2..=r + 1).sum::<usize>();
        let aru_closed = (n - r) * 2 + (3..=r + 2).sum::<usize>();
        let instance = greedy_trap(n).map_err(|e| e.to_string())?;
        let greedy: usize = cumulative_greedy(&instance)
            .cover_times()
            .map_err(|e| e.to_string())?
            .iter()
            .sum();
        let aru: usize = adaptive_residual_updates(&instance)
            .cover_times()
            .map_err(|e| e.to_string())?
            .iter()
            .sum();
        ensure(greedy == greedy_closed, || {
            format!("n={n}: greedy {greedy} != {greedy_closed}")
        })?;
        ensure(aru == aru_closed, || format!("n={n}: aru {aru} != {aru_closed}"))?;
        ratios.push(greedy as f64 / aru as f64);
        costs.push(format!("{greedy}/{aru}"));
    }
    ensure(costs == ["13/11", "1145/255", "8590/1010"], || {
        format!("costs {costs:?}")
    })?;
    let growth = ratios[2] / ratios[1];
    ensure(growth >= 1.85, || format!("ratio growth {growth:.4} < 1.85"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "greedy/ARU costs {} ratio growth {growth:.4} in {elapsed:.2?}",
        costs.join(", ")
    ))
}

fn random_set_cover(rng: &mut ChaCha8Rng, max_sets: usize, max_items: usize) -> (usize, Vec<Vec<usize>>) {
    let items = rng.gen_range(1..=max_items);
    let count = rng.gen_range(1..=max_sets);
    let mut sets: Vec<Vec<usize>> = (0..count)
        .map(|_| (1..=items).filter(|_| rng.gen_bool(0.4)).collect())
        .collect();
    for item in 1..=items {
        if !sets.iter().any(|s| s.contains(&item)) {
            let k = rng.gen_range(0..count);
            sets[k].push(item);
            sets[k].sort_unstable();
        }
    }
    (items, sets)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..50 {
        let (items, sets) = random_set_cover(&mut rng, 5, 6);
        let input = SetCoverInput::new(items, sets.clone()).map_err(|e| e.to_string())?;
        let instance = from_set_cover(&input).map_err(|e| e.to_string())?;
        let opt = brute_force_optimal(&instance, BRUTE_FORCE_DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        let cover = common::min_set_cover(items, &sets);
        ensure(opt.report.total_cost == cover as f64, || {
            format!(
                "input {k}: ranking optimum {} != cover size {cover}",
                opt.report.total_cost
            )
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("50 inputs in {elapsed:.2?}"))
}

/// Prefix values of every function along `ordering`, cut before coverage.
fn ordering_chains(instance: &Instance, ordering: &LinearOrdering) -> Vec<Vec<f64>> {
    instance
        .valuations()
        .iter()
        .map(|f| {
            let mut state = f.state();
            let mut chain = vec![state.value()];
            for &j in ordering.elements() {
                state.insert(j);
                chain.push(state.value());
            }
            chain.into_iter().take_while(|&v| !instance.covers(v)).collect()
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..1000 {
        let len = rng.gen_range(1..=20);
        let mut values: Vec<f64> = (1..len).map(|_| rng.gen_range(0.0..1.0)).collect();
        values.sort_by(f64::total_cmp);
        let chain: Vec<f64> = std::iter::once(0.0).chain(values).collect();
        let audit = audit_chain_sum(&chain).map_err(|e| format!("chain {k}: {e}"))?;
        ensure(audit.ok, || {
            format!("chain {k}: sum {} > bound {}", audit.sum, audit.bound)
        })?;
    }

    let mut solver_chains = 0;
    let mut instances = desk_suite();
    for n in trap_sizes() {
        instances.push((format!("greedy-trap({n})"), greedy_trap(n).map_err(|e| e.to_string())?));
    }
    for (name, instance) in &instances {
        let mut chains = Vec::new();
        for trace in [adaptive_residual_updates(instance), cumulative_greedy(instance)] {
            chains.extend((0..instance.num_functions()).map(|i| uncovered_chain(&trace, i)));
        }
        if instance.num_elements() <= BRUTE_FORCE_DEFAULT_LIMIT {
            let opt = brute_force_optimal(instance, BRUTE_FORCE_DEFAULT_LIMIT).map_err(|e| e.to_string())?;
            chains.extend(ordering_chains(instance, &opt.ordering));
        }
        for chain in chains {
            let audit = audit_chain_sum(&chain).map_err(|e| format!("{name}: {e}"))?;
            ensure(audit.ok, || {
                format!("{name}: sum {} > bound {}", audit.sum, audit.bound)
            })?;
            solver_chains += 1;
        }
    }
    Ok(format!("1000 random chains and {solver_chains} solver chains"))
}

fn criterion_6() -> Outcome {
    let mut oracles: Vec<Valuation> = Vec::new();
    for (_, instance) in desk_suite() {
        oracles.extend(instance.valuations().iter().cloned());
        oracles.extend(common::to_explicit(&instance).valuations().iter().cloned());
    }
    oracles.extend(greedy_trap(4).map_err(|e| e.to_string())?.valuations().iter().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let (items, sets) = random_set_cover(&mut rng, 8, 10);
        let input = SetCoverInput::new(items, sets).map_err(|e| e.to_string())?;
        oracles.extend(
            from_set_cover(&input)
                .map_err(|e| e.to_string())?
                .valuations()
                .iter()
                .cloned(),
        );
    }
    for seed in 0..10 {
        for family in [Family::Modular, Family::Coverage] {
            let instance = random_instance(&RandomSpec::new(10, 2, family, 0.4, seed)).map_err(|e| e.to_string())?;
            oracles.extend(instance.valuations().iter().cloned());
        }
    }
    for (k, f) in oracles.iter().enumerate() {
        let verdict = check_submodular_monotone_normalized(f, CheckMode::Exhaustive, DEFAULT_TOLERANCE)
            .map_err(|e| e.to_string())?;
        ensure(verdict.passed(), || format!("oracle {k} ({}): {verdict:?}", f.family()))?;
    }

    let and = TableView::new(&[0.0, 0.0, 0.0, 1.0]).map_err(|e| e.to_string())?;
    let verdict = check_submodular_monotone_normalized(&and, CheckMode::Exhaustive, DEFAULT_TOLERANCE)
        .map_err(|e| e.to_string())?;
    match verdict {
        Verdict::Fail(Violation::NotSubmodular {
            ref smaller,
            ref larger,
            element,
            ..
        }) if smaller.is_empty() && larger == &[0] && element == 1 => {}
        other => return Err(format!("(0,0,0,1) gave {other:?}")),
    }
    Ok(format!(
        "{} oracles pass; (0,0,0,1) rejected with S=∅ T={{1}} j=2",
        oracles.len()
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..20 {
        let (items, sets) = random_set_cover(&mut rng, 10, 15);
        let input = SetCoverInput::new(items, sets).map_err(|e| e.to_string())?;
        let instance = min_sum_set_cover(&input).map_err(|e| e.to_string())?;
        let aru = adaptive_residual_updates(&instance);
        let greedy = cumulative_greedy(&instance);
        ensure(aru.ordering.elements() == greedy.ordering.elements(), || {
            format!(
                "instance {k}: {:?} vs {:?}",
                aru.ordering.one_based(),
                greedy.ordering.one_based()
            )
        })?;
    }
    Ok("20 instances, identical orderings".into())
}

fn criterion_8() -> Outcome {
    let spec = RandomSpec {
        universe: Some(10_000),
        ..RandomSpec::new(500, 500, Family::Coverage, 0.002, 8)
    };
    let instance = random_instance(&spec).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let first = adaptive_residual_updates(&instance);
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    let second = adaptive_residual_updates(&instance);
    let a = to_canonical_json(&TraceDocument::from_trace(&first).map_err(|e| e.to_string())?);
    let b = to_canonical_json(&TraceDocument::from_trace(&second).map_err(|e| e.to_string())?);
    ensure(a == b, || "traces differ between runs".into())?;
    let cost = first.report(&instance).map_err(|e| e.to_string())?.total_cost;
    Ok(format!(
        "m=500 n=500 universe=10^4 solved in {elapsed:.2?}, cost {cost}, trace {} bytes identical",
        a.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("approximation bound 4γ on random instances", criterion_1),
        ("potential-sum, width and cost-identity audits", criterion_2),
        ("greedy trap closed forms and separation", criterion_3),
        ("set cover reduction preserves the optimum", criterion_4),
        ("chain bound on random and solver chains", criterion_5),
        ("family oracles are submodular, (0,0,0,1) is not", criterion_6),
        ("min-sum set cover: adaptive equals greedy", criterion_7),
        ("500x500 coverage performance and determinism", criterion_8),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {title} ({detail}) [{elapsed:.2?}]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {title}: {detail} [{elapsed:.2?}]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
