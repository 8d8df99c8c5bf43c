// SPDX-License-Identifier: Apache-2.0
use photomem_core::pipeline::{activation_mask, sample_waveform, READ_THRESHOLD_V};
use photomem_core::{
    dataset, wta, Crossbar, MotionClass, MotionTrajectory, Readout, SamplingPlan, SensingSurface,
};

fn mapped(readout: Readout) -> Crossbar {
    let mut x = Crossbar::reference();
    x.map_labelled(&dataset::sample_vectors()).unwrap();
    x.set_readout(readout).unwrap();
    x
}

fn run(dir: MotionClass, readout: Readout) -> wta::ClassificationResult {
    let surface = SensingSurface {
        invert_output: true,
        ..SensingSurface::default()
    };
    let w = surface
        .simulate_motion(&MotionTrajectory::new(dir), 1000.0)
        .unwrap();
    let s = sample_waveform(&w, &SamplingPlan::default()).unwrap();
    let mask = activation_mask(&s, READ_THRESHOLD_V);
    wta::classify(&mapped(readout).column_currents(&mask).unwrap()).unwrap()
}

#[test]
fn every_direction_round_trips_through_the_replay_crossbar() {
    for dir in MotionClass::ALL {
        let r = run(dir, Readout::Replay);
        assert_eq!(r.winner, Some(dir));
        assert!(!r.tie);
        assert!(
            r.relative_margin > 0.05,
            "{dir}: margin {}",
            r.relative_margin
        );
    }
}

#[test]
fn model_readout_separates_all_but_left_to_right() {
    // The LR column differs from the RESET baseline in one fitted cell only,
    // so a synthetic LR sweep needs the measured currents to win.
    for dir in [
        MotionClass::BottomToTop,
        MotionClass::RightToLeft,
        MotionClass::TopToBottom,
    ] {
        assert_eq!(run(dir, Readout::Model).winner, Some(dir));
    }
}

#[test]
fn default_sweeps_enable_at_least_one_row() {
    let surface = SensingSurface {
        invert_output: true,
        ..SensingSurface::default()
    };
    for dir in MotionClass::ALL {
        let w = surface
            .simulate_motion(&MotionTrajectory::new(dir), 1000.0)
            .unwrap();
        let s = sample_waveform(&w, &SamplingPlan::default()).unwrap();
        assert!(
            activation_mask(&s, READ_THRESHOLD_V).count_active() > 0,
            "{dir}"
        );
    }
}
