mod common;

use common::{instance_strategy, raw};
use proptest::prelude::*;
use subrank::generators::greedy_trap;
use subrank::solvers::BRUTE_FORCE_DEFAULT_LIMIT;
use subrank::{
    adaptive_residual_updates, brute_force_optimal, cover_times, cumulative_greedy, Error, Instance, LinearOrdering,
    PotentialRule, Producer, RunTrace,
};

/// `(n - √n)(√n + 2) + (2 + ... + √n + 1)`
fn greedy_trap_cost(n: usize) -> usize {
    let r = (n as f64).sqrt() as usize;
    (n - r) * (r + 2) + (2..=r + 1).sum::<usize>()
}

/// `(n - √n) 2 + (3 + ... + √n + 2)`
fn aru_trap_cost(n: usize) -> usize {
    let r = (n as f64).sqrt() as usize;
    (n - r) * 2 + (3..=r + 2).sum::<usize>()
}

#[test]
fn trap_closed_forms() {
    for n in [4, 9, 16, 25, 36, 100, 400] {
        let inst = greedy_trap(n).unwrap();
        let greedy = cumulative_greedy(&inst).report(&inst).unwrap();
        let aru = adaptive_residual_updates(&inst).report(&inst).unwrap();
        assert_eq!(greedy.total_cost, greedy_trap_cost(n) as f64, "greedy n={n}");
        assert_eq!(aru.total_cost, aru_trap_cost(n) as f64, "aru n={n}");
    }
    assert_eq!(greedy_trap_cost(4), 13);
    assert_eq!(greedy_trap_cost(100), 1145);
    assert_eq!(greedy_trap_cost(400), 8590);
    assert_eq!(aru_trap_cost(400), 1010);
}

#[test]
fn trap4_orderings() {
    let inst = greedy_trap(4).unwrap();
    assert_eq!(adaptive_residual_updates(&inst).ordering.one_based(), vec![1, 2, 3, 4]);
    assert_eq!(cumulative_greedy(&inst).ordering.one_based(), vec![1, 3, 4, 2]);
    let opt = brute_force_optimal(&inst, BRUTE_FORCE_DEFAULT_LIMIT).unwrap();
    assert_eq!(opt.report.total_cost, 11.0);
    assert_eq!(opt.ordering.one_based(), vec![1, 2, 3, 4]);
    assert_eq!(opt.ordering.producer(), Producer::BruteForce);
}

#[test]
fn brute_force_refuses_large_instances() {
    let inst = greedy_trap(100).unwrap();
    assert!(matches!(
        brute_force_optimal(&inst, BRUTE_FORCE_DEFAULT_LIMIT),
        Err(Error::TooLarge { size: 12, limit: 9, .. })
    ));
}

/// Checks a trace against from-scratch evaluation: each pick maximizes the
/// weighted potential, the frozen potentials and prefix values are right.
fn check_trace(instance: &Instance, trace: &RunTrace) {
    let raw = raw(instance);
    let m = raw.m;
    let order = trace.ordering.elements();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..m).collect::<Vec<_>>());

    let potential = |value_before: f64, gain: f64| -> f64 {
        if raw.covered(value_before) {
            return 0.0;
        }
        match trace.rule {
            PotentialRule::AdaptiveResidual => (gain / (1.0 - value_before)).min(1.0),
            PotentialRule::Cumulative => gain.min(1.0 - value_before),
        }
    };

    for t in 0..m {
        let prefix = &order[..t];
        let score = |j: usize| -> f64 {
            let mut with = prefix.to_vec();
            with.push(j);
            raw.functions
                .iter()
                .zip(&raw.weights)
                .map(|(f, w)| w * potential(f.value(prefix), f.value(&with) - f.value(prefix)))
                .sum()
        };
        let all_covered = raw.functions.iter().all(|f| raw.covered(f.value(prefix)));
        let best = order[t..].iter().map(|&j| score(j)).fold(f64::NEG_INFINITY, f64::max);
        assert!(score(order[t]) >= best - 1e-9, "step {t} is not an argmax");
        if all_covered {
            assert!(order[t..].windows(2).all(|w| w[0] < w[1]), "tail is not ascending");
        }
        for (i, f) in raw.functions.iter().enumerate() {
            let mut with = prefix.to_vec();
            with.push(order[t]);
            let want = potential(f.value(prefix), f.value(&with) - f.value(prefix));
            assert!((trace.frozen_potentials[t][i] - want).abs() <= 1e-9, "P[{t}][{i}]");
        }
        let q: f64 = trace.frozen_potentials[t]
            .iter()
            .zip(&raw.weights)
            .map(|(p, w)| w * p)
            .sum();
        assert!((trace.q[t] - q).abs() <= 1e-12 * q.abs().max(1.0));
    }

    for (i, f) in raw.functions.iter().enumerate() {
        let values = &trace.prefix_values[i];
        assert_eq!(values.len(), m + 1);
        assert_eq!(values[0], 0.0);
        assert!(
            values.windows(2).all(|w| w[1] >= w[0] - 1e-12),
            "prefix values decrease"
        );
        for t in 0..=m {
            assert!((values[t] - f.value(&order[..t])).abs() <= 1e-9);
        }
    }
    assert_eq!(trace.cover_times().unwrap(), raw.cover_times(order));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn brute_force_matches_enumeration(instance in instance_strategy(6, 4)) {
        let raw = raw(&instance);
        let (cost, order) = raw.optimum();
        let opt = brute_force_optimal(&instance, BRUTE_FORCE_DEFAULT_LIMIT).unwrap();
        prop_assert!((opt.report.total_cost - cost).abs() <= 1e-9 * cost);
        prop_assert_eq!(opt.ordering.elements(), &order[..]);
    }

    #[test]
    fn adaptive_trace_is_consistent(instance in instance_strategy(7, 5)) {
        let trace = adaptive_residual_updates(&instance);
        check_trace(&instance, &trace);
        prop_assert_eq!(adaptive_residual_updates(&instance), trace);
    }

    #[test]
    fn greedy_trace_is_consistent(instance in instance_strategy(7, 5)) {
        let trace = cumulative_greedy(&instance);
        check_trace(&instance, &trace);
        prop_assert_eq!(cumulative_greedy(&instance), trace);
    }

    #[test]
    fn q_is_the_weighted_column_sum(instance in instance_strategy(8, 6)) {
        for trace in [adaptive_residual_updates(&instance), cumulative_greedy(&instance)] {
            for (column, &q) in trace.frozen_potentials.iter().zip(&trace.q) {
                let sum: f64 = column.iter().zip(instance.weights()).map(|(p, w)| w * p).sum();
                prop_assert_eq!(sum.to_bits(), q.to_bits());
            }
        }
    }

    #[test]
    fn cost_ignores_the_order_after_the_last_cover(instance in instance_strategy(7, 4), seed in any::<u64>()) {
        let trace = adaptive_residual_updates(&instance);
        let report = trace.report(&instance).unwrap();
        let last = *report.cover_times.iter().max().unwrap();
        let mut order = trace.ordering.elements().to_vec();
        let tail = &mut order[last..];
        // deterministic shuffle of the tail
        let mut state = seed | 1;
        for k in (1..tail.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            tail.swap(k, (state % (k as u64 + 1)) as usize);
        }
        let shuffled = LinearOrdering::new(order, Producer::External).unwrap();
        prop_assert_eq!(cover_times(&instance, &shuffled).unwrap(), report);
    }

    #[test]
    fn adaptive_never_beats_the_optimum(instance in instance_strategy(6, 4)) {
        let opt = brute_force_optimal(&instance, BRUTE_FORCE_DEFAULT_LIMIT).unwrap().report.total_cost;
        for trace in [adaptive_residual_updates(&instance), cumulative_greedy(&instance)] {
            prop_assert!(trace.report(&instance).unwrap().total_cost >= opt - 1e-9);
        }
    }
}
