// SPDX-License-Identifier: Apache-2.0
use photomem_core::robustness::{
    apply_noise, enumerate_scenarios, evaluate_scenario, noise_free_currents, run_sweep,
    sweep_currents, Competitors,
};
use photomem_core::wta::failure_frontier;
use photomem_core::{dataset, Crossbar, Interpretation, MotionClass, NoiseMode, SweepConfig};
use proptest::prelude::*;

fn mapped() -> Crossbar {
    let mut x = Crossbar::reference();
    x.map_labelled(&dataset::sample_vectors()).unwrap();
    x
}

fn frontier_cfg() -> SweepConfig {
    SweepConfig::default()
}

#[test]
fn scenario_counts() {
    let r = run_sweep(&mapped(), &dataset::sample_vectors(), &frontier_cfg()).unwrap();
    assert_eq!(r.total_scenarios, 324);
    assert!(r.classes.iter().all(|c| c.scenarios == 81));
    assert_eq!(
        r.classes.iter().map(|c| c.failures).sum::<usize>(),
        r.total_failures
    );
    assert_eq!(r.passes + r.total_failures, r.total_scenarios);
}

#[test]
fn frontier_interpretation_counts() {
    let r = run_sweep(&mapped(), &dataset::sample_vectors(), &frontier_cfg()).unwrap();
    let failures: Vec<(MotionClass, usize)> =
        r.classes.iter().map(|c| (c.class, c.failures)).collect();
    assert_eq!(
        failures,
        [
            (MotionClass::BottomToTop, 0),
            (MotionClass::LeftToRight, 18),
            (MotionClass::RightToLeft, 3),
            (MotionClass::TopToBottom, 0),
        ]
    );
    assert!((r.accuracy_percent - 100.0 * 303.0 / 324.0).abs() < 1e-12);
}

#[test]
fn failing_pairs_equal_frontier_for_every_variant() {
    let cfg = frontier_cfg();
    let r = run_sweep(&mapped(), &dataset::sample_vectors(), &cfg).unwrap();
    for summary in &r.classes {
        for variant in 0..cfg.variants {
            let mut pairs: Vec<(f64, f64)> = r
                .failing
                .iter()
                .filter(|f| f.class == summary.class && f.variant == variant)
                .map(|f| (f.p_dec, f.p_inc))
                .collect();
            pairs.dedup();
            assert_eq!(
                pairs, summary.frontier,
                "{} variant {variant}",
                summary.class
            );
        }
    }
}

#[test]
fn raising_all_competitors_gives_same_pairs() {
    let cfg = SweepConfig {
        competitors: Competitors::All,
        ..frontier_cfg()
    };
    let r = run_sweep(&mapped(), &dataset::sample_vectors(), &cfg).unwrap();
    assert_eq!(r.total_scenarios, 108);
    for c in &r.classes {
        assert_eq!(c.failures, c.frontier.len() * 3);
    }
}

#[test]
fn reported_interpretation_keeps_only_five_percent_drops() {
    let cfg = SweepConfig {
        interpretation: Interpretation::Paper,
        ..frontier_cfg()
    };
    let r = run_sweep(&mapped(), &dataset::sample_vectors(), &cfg).unwrap();
    assert!(r.failing.iter().all(|f| f.p_dec == 5.0));
    let lr = r
        .classes
        .iter()
        .find(|c| c.class == MotionClass::LeftToRight)
        .unwrap();
    assert_eq!(lr.failures, 9);
}

#[test]
fn unmapped_crossbar_is_rejected() {
    let err = run_sweep(
        &Crossbar::reference(),
        &dataset::sample_vectors(),
        &frontier_cfg(),
    )
    .unwrap_err();
    assert_eq!(err.kind(), photomem_core::ErrorKind::Lifecycle);
}

#[test]
fn gaussian_sweep_is_reproducible() {
    let cfg = SweepConfig {
        mode: NoiseMode::Gaussian,
        seed: 99,
        ..frontier_cfg()
    };
    let a = run_sweep(&mapped(), &dataset::sample_vectors(), &cfg).unwrap();
    let b = run_sweep(&mapped(), &dataset::sample_vectors(), &cfg).unwrap();
    assert_eq!(a, b);
    let other = run_sweep(
        &mapped(),
        &dataset::sample_vectors(),
        &SweepConfig { seed: 100, ..cfg },
    )
    .unwrap();
    assert_eq!(other.total_scenarios, a.total_scenarios);
}

#[test]
fn scenario_order_does_not_change_counts() {
    let cfg = SweepConfig {
        mode: NoiseMode::Gaussian,
        ..frontier_cfg()
    };
    let inputs = noise_free_currents(&mapped(), &dataset::sample_vectors()).unwrap();
    let forward = sweep_currents(&inputs, &cfg).unwrap();
    let reversed: Vec<_> = inputs.iter().rev().cloned().collect();
    let backward = sweep_currents(&reversed, &cfg).unwrap();
    assert_eq!(forward.total_failures, backward.total_failures);
    for (signal, currents) in &inputs {
        let mut scenarios = enumerate_scenarios(*signal, 4, &cfg);
        let count = |s: &[_]| {
            s.iter()
                .filter(|s| {
                    evaluate_scenario(currents, s, cfg.interpretation)
                        .unwrap()
                        .failed
                })
                .count()
        };
        let a = count(&scenarios);
        scenarios.reverse();
        assert_eq!(a, count(&scenarios));
    }
}

proptest! {
    #[test]
    fn larger_shifts_never_repair_a_failure(
        class in 0usize..4,
        d in 0.0f64..10.0, u in 0.0f64..10.0,
        dd in 0.0f64..5.0, du in 0.0f64..5.0,
        competitor in proptest::option::of(0u8..3),
    ) {
        let inputs = noise_free_currents(&mapped(), &dataset::sample_vectors()).unwrap();
        let (signal, currents) = &inputs[class];
        let base = photomem_core::NoiseScenario {
            signal: *signal,
            p_dec: d,
            p_inc: u,
            competitor,
            variant: 0,
            mode: NoiseMode::Deterministic,
            seed: None,
        };
        let bigger = photomem_core::NoiseScenario { p_dec: d + dd, p_inc: u + du, ..base };
        let a = evaluate_scenario(currents, &base, Interpretation::Frontier).unwrap();
        let b = evaluate_scenario(currents, &bigger, Interpretation::Frontier).unwrap();
        prop_assert!(!a.failed || b.failed);
    }

    #[test]
    fn deterministic_flip_iff_frontier(class in 0usize..4, di in 0usize..3, ui in 0usize..3) {
        let levels = [1.0, 3.0, 5.0];
        let inputs = noise_free_currents(&mapped(), &dataset::sample_vectors()).unwrap();
        let (signal, currents) = &inputs[class];
        let frontier = failure_frontier(currents, &levels).unwrap();
        let s = photomem_core::NoiseScenario {
            signal: *signal,
            p_dec: levels[di],
            p_inc: levels[ui],
            competitor: None,
            variant: 0,
            mode: NoiseMode::Deterministic,
            seed: None,
        };
        let shifted = apply_noise(currents, &s).unwrap();
        let flipped = photomem_core::wta::classify(&shifted).unwrap().winner_index
            != photomem_core::wta::classify(currents).unwrap().winner_index;
        prop_assert_eq!(flipped, frontier.contains(&(levels[di], levels[ui])));
    }
}
