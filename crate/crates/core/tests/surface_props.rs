// SPDX-License-Identifier: Apache-2.0
use photomem_core::surface::surface_output;
use photomem_core::{OcclusionGrid, PhotodiodeModel, PolarityMatrix};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

fn balanced_kernel() -> impl Strategy<Value = PolarityMatrix> {
    (1usize..7, 1usize..7)
        .prop_flat_map(|(rows, cols)| {
            let n = rows * cols;
            (Just(rows), Just(cols), 0..=n / 2)
        })
        .prop_flat_map(|(rows, cols, pairs)| {
            let n = rows * cols;
            let mut w = vec![0i8; n];
            w[..pairs].fill(1);
            w[pairs..2 * pairs].fill(-1);
            (Just(rows), Just(cols), Just(w).prop_shuffle())
        })
        .prop_map(|(rows, cols, w)| PolarityMatrix::new(rows, cols, w).unwrap())
}

fn grid(rows: usize, cols: usize) -> impl Strategy<Value = OcclusionGrid> {
    proptest::collection::vec(0.0f64..=1.0, rows * cols)
        .prop_map(move |f| OcclusionGrid::new(rows, cols, f).unwrap())
}

fn photodiode() -> impl Strategy<Value = PhotodiodeModel> {
    (500.0f64..=1200.0).prop_map(|lux| PhotodiodeModel::at_illuminance(lux).unwrap())
}

#[test]
fn uniform_occlusion_of_balanced_kernel_cancels_exactly() {
    let mut runner = TestRunner::new(Config::with_cases(1_000));
    runner
        .run(
            &(balanced_kernel(), 0.0f64..=1.0, photodiode()),
            |(k, f, pv)| {
                let occ = OcclusionGrid::uniform(k.rows(), k.cols(), f).unwrap();
                prop_assert_eq!(surface_output(&k, &pv, &occ).unwrap(), 0.0);
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn output_is_affine_in_occlusion() {
    let mut runner = TestRunner::new(Config::with_cases(1_000));
    let case = balanced_kernel().prop_flat_map(|k| {
        let (r, c) = (k.rows(), k.cols());
        (Just(k), grid(r, c), grid(r, c), 0.0f64..=1.0, photodiode())
    });
    runner
        .run(&case, |(k, a, b, t, pv)| {
            let mix: Vec<f64> = a
                .fractions()
                .iter()
                .zip(b.fractions())
                .map(|(x, y)| t * x + (1.0 - t) * y)
                .collect();
            let mixed = OcclusionGrid::new(k.rows(), k.cols(), mix).unwrap();
            let lhs = surface_output(&k, &pv, &mixed).unwrap();
            let rhs = t * surface_output(&k, &pv, &a).unwrap()
                + (1.0 - t) * surface_output(&k, &pv, &b).unwrap();
            let scale = pv.v_cell * k.nonzero_count().max(1) as f64;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
            Ok(())
        })
        .unwrap();
}

proptest! {
    #[test]
    fn output_is_bounded_by_half_the_cells(k in balanced_kernel(), pv in photodiode(), seed in any::<u64>()) {
        let n = k.rows() * k.cols();
        let f: Vec<f64> = (0..n).map(|i| ((seed >> (i % 64)) & 1) as f64).collect();
        let occ = OcclusionGrid::new(k.rows(), k.cols(), f).unwrap();
        let out = surface_output(&k, &pv, &occ).unwrap();
        prop_assert!(out.abs() <= pv.v_cell * (k.nonzero_count() / 2) as f64 + 1e-12);
    }
}
