// SPDX-License-Identifier: Apache-2.0
use photomem_core::pipeline::{activation_mask, READ_THRESHOLD_V};
use photomem_core::{
    dataset, Crossbar, DeviceCurves, MotionClass, Readout, ReplayTable, RowActivation,
    SampleVector, SamplingPlan,
};
use proptest::prelude::*;

const STANDBY: f64 = 51e-9;

fn mapped(readout: Readout) -> Crossbar {
    let mut x = Crossbar::reference();
    x.map_labelled(&dataset::sample_vectors()).unwrap();
    x.set_readout(readout).unwrap();
    x
}

fn reference_mask(class: MotionClass) -> RowActivation {
    activation_mask(&dataset::sample_vector(class), READ_THRESHOLD_V)
}

/// Independent oracle: straight sum over the embedded current table.
fn oracle_totals(mask: &RowActivation) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (r, &on) in mask.active().iter().enumerate() {
        for (c, o) in out.iter_mut().enumerate() {
            *o += if on {
                dataset::READ_CURRENT_A[r][c]
            } else {
                STANDBY
            };
        }
    }
    out
}

#[test]
fn mapping_reproduces_resistance_grid() {
    let x = mapped(Readout::Replay);
    for r in 0..8 {
        for c in 0..4 {
            assert_eq!(
                x.resistance(r, c),
                dataset::expected_resistance(r, c),
                "cell ({r}, {c})"
            );
        }
    }
    assert!(x.is_fully_mapped());
    assert_eq!(x.labels(), MotionClass::ALL.map(Some));
}

#[test]
fn replay_totals_equal_table_sums() {
    let x = mapped(Readout::Replay);
    for class in MotionClass::ALL {
        let mask = reference_mask(class);
        let got = x.column_currents(&mask).unwrap();
        for (g, o) in got.currents().iter().zip(oracle_totals(&mask)) {
            assert!((g - o).abs() < 1e-15);
        }
    }
}

#[test]
fn replay_totals_match_reference_rows_except_one_cell() {
    let x = mapped(Readout::Replay);
    let mut off = Vec::new();
    for class in MotionClass::ALL {
        let got = x.column_currents(&reference_mask(class)).unwrap();
        for (c, (g, e)) in got
            .currents()
            .iter()
            .zip(dataset::expected_totals(class))
            .enumerate()
        {
            if (g - e).abs() > 0.01e-6 + 1e-15 {
                off.push((class, c, (g - e) * 1e6));
            }
        }
    }
    // TB incoming, LR column: 3.586 uA at 470 ms makes the sum 3.943 uA
    assert_eq!(off.len(), 1, "{off:?}");
    assert_eq!((off[0].0, off[0].1), (MotionClass::TopToBottom, 1));
    assert!((off[0].2 - 0.023).abs() < 1e-9);
}

#[test]
fn model_readout_deviates_only_in_the_left_to_right_column() {
    let x = mapped(Readout::Model);
    let mut over = Vec::new();
    for class in MotionClass::ALL {
        let got = x.column_currents(&reference_mask(class)).unwrap();
        for (c, (g, e)) in got
            .currents()
            .iter()
            .zip(dataset::expected_totals(class))
            .enumerate()
        {
            let rel = (g - e).abs() / e;
            assert!(rel < 0.07, "{class} column {c}: {rel}");
            if rel > 0.05 {
                over.push((class, c));
            }
        }
    }
    assert_eq!(
        over,
        [(MotionClass::LeftToRight, 1), (MotionClass::RightToLeft, 1)]
    );
}

fn mask_strategy() -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(any::<bool>(), 8)
}

fn permute_rows(x: &Crossbar, perm: &[usize]) -> Crossbar {
    let mut cells = Vec::with_capacity(32);
    let mut table = Vec::with_capacity(32);
    let replay = x.replay().unwrap();
    for &r in perm {
        for c in 0..4 {
            cells.push(*x.cell(r, c));
            table.push(replay.get(r, c));
        }
    }
    let mut y = Crossbar::from_cells(8, 4, cells, x.labels().to_vec(), DeviceCurves::reference())
        .unwrap()
        .with_replay(ReplayTable::new(8, 4, table).unwrap())
        .unwrap();
    y.set_readout(x.readout()).unwrap();
    y
}

proptest! {
    #[test]
    fn currents_are_bounded_by_standby_and_ceiling(mask in mask_strategy(), replay in any::<bool>()) {
        let x = mapped(if replay { Readout::Replay } else { Readout::Model });
        let i = x.column_currents(&RowActivation::new(mask)).unwrap();
        for &c in i.currents() {
            prop_assert!(c >= 8.0 * STANDBY - 1e-18);
            prop_assert!(c <= 8.0 * 5.828e-6 + 1e-18);
        }
    }

    #[test]
    fn row_permutation_with_mask_preserves_totals(
        mask in mask_strategy(),
        perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
        replay in any::<bool>(),
    ) {
        let x = mapped(if replay { Readout::Replay } else { Readout::Model });
        let y = permute_rows(&x, &perm);
        let pm: Vec<bool> = perm.iter().map(|&r| mask[r]).collect();
        let a = x.column_currents(&RowActivation::new(mask)).unwrap();
        let b = y.column_currents(&RowActivation::new(pm)).unwrap();
        for (p, q) in a.currents().iter().zip(b.currents()) {
            prop_assert!((p - q).abs() <= 1e-12 * p.abs());
        }
    }

    #[test]
    fn column_current_is_sum_of_rows(mask in mask_strategy()) {
        let x = mapped(Readout::Model);
        let total = x.column_currents(&RowActivation::new(mask.clone())).unwrap();
        for c in 0..4 {
            let mut sum = 0.0;
            for (r, &on) in mask.iter().enumerate() {
                let m: Vec<bool> = (0..8).map(|k| k == r && on).collect();
                let single = x.column_currents(&RowActivation::new(m)).unwrap().currents()[c];
                sum += single - 7.0 * STANDBY;
            }
            prop_assert!((sum - total.currents()[c]).abs() < 1e-15);
        }
    }

    #[test]
    fn enabling_a_row_never_lowers_a_column(mask in mask_strategy(), row in 0usize..8) {
        let x = mapped(Readout::Model);
        let mut more = mask.clone();
        more[row] = true;
        let a = x.column_currents(&RowActivation::new(mask)).unwrap();
        let b = x.column_currents(&RowActivation::new(more)).unwrap();
        for (p, q) in a.currents().iter().zip(b.currents()) {
            prop_assert!(q >= p);
        }
    }

    #[test]
    fn arbitrary_vectors_map_into_the_device_window(amps in proptest::collection::vec(-1.2f64..1.2, 8), col in 0usize..4) {
        let mut x = Crossbar::reference();
        let v = SampleVector::new(amps, SamplingPlan::default(), MotionClass::from_index(col)).unwrap();
        x.map_class(col, &v).unwrap();
        for r in 0..8 {
            let ohm = x.resistance(r, col);
            prop_assert!((5_100.0..=96_350.0).contains(&ohm));
        }
        for c in (0..4).filter(|&c| c != col) {
            for r in 0..8 {
                prop_assert_eq!(x.resistance(r, c), 96_290.0);
            }
        }
    }
}
