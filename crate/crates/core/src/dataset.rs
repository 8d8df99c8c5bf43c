// SPDX-License-Identifier: Apache-2.0
//! Reference measurements embedded as constants.
//!
//! Rows are the eight sampling instants (260 ms to 470 ms, 30 ms apart);
//! columns follow [`MotionClass::ALL`] order (BT, LR, RL, TB).

use alloc::vec::Vec;

use crate::class::MotionClass;
use crate::crossbar::ReplayTable;
use crate::pipeline::{SampleVector, SamplingPlan};
use crate::surface::{Waveform, WaveformPoint, WaveformSource};

pub const ROWS: usize = 8;
pub const COLS: usize = 4;

/// Sampling instants of the reference capture, in ms.
pub const SAMPLE_TIMES_MS: [f64; ROWS] = [260.0, 290.0, 320.0, 350.0, 380.0, 410.0, 440.0, 470.0];

/// Sampled surface amplitudes in volts, `[row][class]`.
pub const SAMPLED_AMPLITUDES_V: [[f64; COLS]; ROWS] = [
    [1.16, -0.60, 0.28, -0.24],
    [1.10, 0.22, 0.48, -1.10],
    [0.30, 0.78, 0.74, -1.08],
    [-0.58, 0.44, 0.88, -0.88],
    [-1.04, 0.68, 0.70, -0.50],
    [-0.96, 0.62, 0.52, 0.0],
    [-0.36, -0.02, 0.78, 0.34],
    [-0.16, 0.06, -0.02, 1.2],
];

/// Resistance after mapping, in ohms, `[row][column]`.
pub const MAPPED_RESISTANCE_OHM: [[f64; COLS]; ROWS] = [
    [5_100.0, 96_290.0, 96_290.0, 96_290.0],
    [5_150.0, 96_290.0, 96_290.0, 96_290.0],
    [96_290.0, 27_730.0, 44_690.0, 96_290.0],
    [96_290.0, 96_290.0, 11_300.0, 96_290.0],
    [96_290.0, 96_340.0, 78_350.0, 96_290.0],
    [96_290.0, 96_320.0, 96_290.0, 96_290.0],
    [96_290.0, 96_290.0, 27_730.0, 96_290.0],
    [96_290.0, 96_290.0, 96_290.0, 5_110.0],
];

/// Per-cell READ current during testing, in amperes, `[row][column]`.
///
/// Kept verbatim, including the entries that disagree with a single
/// resistance-to-current function (4.452, 4.241, 3.567, 3.569, 3.586 and
/// 5.211 uA).
pub const READ_CURRENT_A: [[f64; COLS]; ROWS] = [
    [5.827e-6, 3.564e-6, 3.564e-6, 3.564e-6],
    [5.825e-6, 3.564e-6, 3.564e-6, 3.564e-6],
    [3.564e-6, 5.221e-6, 4.776e-6, 3.564e-6],
    [3.564e-6, 4.452e-6, 5.658e-6, 3.564e-6],
    [3.564e-6, 4.241e-6, 3.958e-6, 3.564e-6],
    [3.564e-6, 3.567e-6, 3.564e-6, 3.564e-6],
    [3.564e-6, 3.569e-6, 5.211e-6, 3.564e-6],
    [3.564e-6, 3.586e-6, 3.564e-6, 5.828e-6],
];

/// Published column totals per incoming class, in amperes, `[class][column]`.
pub const COLUMN_TOTALS_A: [[f64; COLS]; COLS] = [
    [11.96e-6, 7.428e-6, 7.428e-6, 7.428e-6],
    [10.95e-6, 13.28e-6, 12.55e-6, 10.95e-6],
    [23.75e-6, 24.72e-6, 26.83e-6, 21.49e-6],
    [3.92e-6, 3.92e-6, 3.92e-6, 6.19e-6],
];

/// SET voltage to resistance correspondences (V, ohm), read off the sampled
/// amplitudes and the mapped grid. Points below 0.7 V are sub-threshold drift.
pub const PROGRAM_POINTS: [(f64, f64); 11] = [
    (0.48, 96_290.0),
    (0.52, 96_290.0),
    (0.62, 96_320.0),
    (0.68, 96_340.0),
    (0.70, 78_350.0),
    (0.74, 44_690.0),
    (0.78, 27_730.0),
    (0.88, 11_300.0),
    (1.10, 5_150.0),
    (1.16, 5_100.0),
    (1.20, 5_110.0),
];

/// Resistance to enabled READ current (ohm, A).
pub const READ_POINTS: [(f64, f64); 8] = [
    (5_100.0, 5.827e-6),
    (5_110.0, 5.828e-6),
    (5_150.0, 5.825e-6),
    (11_300.0, 5.658e-6),
    (27_730.0, 5.221e-6),
    (44_690.0, 4.776e-6),
    (78_350.0, 3.958e-6),
    (96_290.0, 3.564e-6),
];

pub fn sampling_plan() -> SamplingPlan {
    SamplingPlan::default()
}

/// The eight reference amplitudes for one class.
pub fn amplitudes(class: MotionClass) -> [f64; ROWS] {
    let c = class.index();
    core::array::from_fn(|r| SAMPLED_AMPLITUDES_V[r][c])
}

pub fn sample_vector(class: MotionClass) -> SampleVector {
    SampleVector::new(amplitudes(class).to_vec(), sampling_plan(), Some(class))
        .expect("reference vector matches the default plan")
}

pub fn sample_vectors() -> Vec<SampleVector> {
    MotionClass::ALL.iter().map(|&c| sample_vector(c)).collect()
}

/// A piecewise-linear waveform through the reference samples.
pub fn reference_waveform(class: MotionClass) -> Waveform {
    let points = SAMPLE_TIMES_MS
        .iter()
        .zip(amplitudes(class))
        .map(|(&t, v)| WaveformPoint::new(t, v))
        .collect();
    Waveform::new(points, WaveformSource::Recorded, Some(class))
        .expect("reference samples are ordered and inside the envelope")
}

pub fn replay_table() -> ReplayTable {
    let mut currents = Vec::with_capacity(ROWS * COLS);
    for row in READ_CURRENT_A.iter() {
        currents.extend_from_slice(row);
    }
    ReplayTable::new(ROWS, COLS, currents).expect("embedded table is 8x4")
}

pub fn expected_totals(class: MotionClass) -> [f64; COLS] {
    COLUMN_TOTALS_A[class.index()]
}

pub fn expected_resistance(row: usize, col: usize) -> f64 {
    MAPPED_RESISTANCE_OHM[row][col]
}
