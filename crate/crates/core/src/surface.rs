// SPDX-License-Identifier: Apache-2.0
//! Photovoltaic sensing surface.
//!
//! The surface is a grid of PV cells wired in series/parallel with signed
//! polarity. Under uniform light the opposite-polarity pairs cancel and the
//! output terminal sits at 0 V; a shadow that removes some cells breaks the
//! balance. The whole grid is read through one terminal, so the cost of a
//! readout does not grow with the number of cells.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::class::MotionClass;
use crate::error::{Error, Result};

/// Signed wiring pattern of the PV cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i8>>", into = "Vec<Vec<i8>>")]
pub struct PolarityMatrix {
    rows: usize,
    cols: usize,
    weights: Vec<i8>,
}

impl PolarityMatrix {
    /// Builds a kernel from row-major weights.
    ///
    /// Every weight must be -1, 0 or +1 and the weights must sum to zero so
    /// that uniform illumination produces no output.
    pub fn new(rows: usize, cols: usize, weights: Vec<i8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param("polarity matrix must have at least one cell"));
        }
        if weights.len() != rows * cols {
            return Err(Error::Dimension {
                what: "polarity matrix",
                expected: (rows, cols),
                found: (weights.len() / cols.max(1), cols),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(-1..=1).contains(*w)) {
            return Err(Error::param(format!(
                "polarity weight {w} not in {{-1, 0, 1}}"
            )));
        }
        let sum: i32 = weights.iter().map(|&w| i32::from(w)).sum();
        if sum != 0 {
            return Err(Error::param(format!(
                "polarity weights sum to {sum}; opposite-polarity cells must balance"
            )));
        }
        Ok(Self {
            rows,
            cols,
            weights,
        })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::param("polarity matrix rows differ in length"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weight(&self, row: usize, col: usize) -> i8 {
        self.weights[row * self.cols + col]
    }

    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        self.weights.chunks(self.cols).map(<[i8]>::to_vec).collect()
    }

    /// Iterates `(row, col, weight)` over every cell.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (i / self.cols, i % self.cols, w))
    }

    pub fn nonzero_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0).count()
    }

    pub fn column_sums(&self) -> Vec<i32> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| i32::from(self.weight(r, c))).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<i32> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| i32::from(self.weight(r, c))).sum())
            .collect()
    }
}

impl Default for PolarityMatrix {
    fn default() -> Self {
        default_kernel()
    }
}

impl TryFrom<Vec<Vec<i8>>> for PolarityMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i8>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<PolarityMatrix> for Vec<Vec<i8>> {
    fn from(m: PolarityMatrix) -> Self {
        m.to_rows()
    }
}

/// The 4x4 reference kernel: four PV cells, two of each polarity.
pub fn default_kernel() -> PolarityMatrix {
    #[rustfmt::skip]
    let weights = alloc::vec![
        0, -1,  0, 0,
        0,  0, -1, 0,
        1,  0,  0, 0,
        0,  0,  0, 1,
    ];
    PolarityMatrix::new(4, 4, weights).expect("reference kernel is balanced")
}

/// Reference illuminance for [`PhotodiodeModel::DEFAULT_V_CELL`].
pub const REFERENCE_LUX: f64 = 850.0;
pub const LUX_RANGE: (f64, f64) = (500.0, 1200.0);

/// Behavioral PV cell.
///
/// Only `v_cell` and the illuminance drive the output. The electrical
/// parameters are carried for documentation and are `None` unless a
/// measured device is described.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotodiodeModel {
    /// Per-cell voltage contribution at the current illuminance.
    pub v_cell: f64,
    pub illuminance_lux: f64,
    pub photocurrent_a: Option<f64>,
    pub dark_current_a: Option<f64>,
    pub capacitance_f: Option<f64>,
    pub load_ohm: Option<f64>,
    /// First-order response time constant; `None` disables the filter.
    pub response_tau_ms: Option<f64>,
}

impl PhotodiodeModel {
    pub const DEFAULT_V_CELL: f64 = 0.6;

    /// A cell whose voltage scales linearly with illuminance from
    /// 0.6 V at 850 lux.
    pub fn at_illuminance(lux: f64) -> Result<Self> {
        Self::new(Self::DEFAULT_V_CELL * lux / REFERENCE_LUX, lux)
    }

    pub fn new(v_cell: f64, illuminance_lux: f64) -> Result<Self> {
        let pv = Self {
            v_cell,
            illuminance_lux,
            photocurrent_a: None,
            dark_current_a: None,
            capacitance_f: None,
            load_ohm: None,
            response_tau_ms: None,
        };
        pv.validate()?;
        Ok(pv)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_cell > 0.0 && self.v_cell.is_finite()) {
            return Err(Error::param(format!(
                "v_cell must be positive, got {}",
                self.v_cell
            )));
        }
        let (lo, hi) = LUX_RANGE;
        if !(lo..=hi).contains(&self.illuminance_lux) {
            return Err(Error::param(format!(
                "illuminance {} lux outside [{lo}, {hi}]",
                self.illuminance_lux
            )));
        }
        if let Some(tau) = self.response_tau_ms {
            if !(tau > 0.0) {
                return Err(Error::param("response time constant must be positive"));
            }
        }
        Ok(())
    }
}

impl Default for PhotodiodeModel {
    fn default() -> Self {
        Self::at_illuminance(REFERENCE_LUX).expect("reference illuminance is in range")
    }
}

/// Per-cell shadow fraction, 1 = fully blocked.
#[derive(Debug, Clone, PartialEq)]
pub struct OcclusionGrid {
    rows: usize,
    cols: usize,
    fractions: Vec<f64>,
}

impl OcclusionGrid {
    pub fn new(rows: usize, cols: usize, fractions: Vec<f64>) -> Result<Self> {
        if fractions.len() != rows * cols {
            return Err(Error::param(format!(
                "occlusion grid has {} values for {rows}x{cols} cells",
                fractions.len()
            )));
        }
        if let Some(f) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(Error::param(format!(
                "occlusion fraction {f} not in [0, 1]"
            )));
        }
        Ok(Self {
            rows,
            cols,
            fractions,
        })
    }

    pub fn uniform(rows: usize, cols: usize, fraction: f64) -> Result<Self> {
        Self::new(rows, cols, alloc::vec![fraction; rows * cols])
    }

    pub fn clear(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            fractions: alloc::vec![0.0; rows * cols],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.fractions[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, fraction: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::param(format!(
                "occlusion fraction {fraction} not in [0, 1]"
            )));
        }
        self.fractions[row * self.cols + col] = fraction;
        Ok(())
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }
}

/// Voltage at the output terminal: `v_cell * sum(w * (1 - occlusion))`.
///
/// Positive and negative cells are accumulated separately so that equal
/// illumination of a balanced kernel cancels exactly.
pub fn surface_output(
    kernel: &PolarityMatrix,
    pv: &PhotodiodeModel,
    occlusion: &OcclusionGrid,
) -> Result<f64> {
    if occlusion.shape() != (kernel.rows(), kernel.cols()) {
        return Err(Error::Dimension {
            what: "occlusion grid",
            expected: (kernel.rows(), kernel.cols()),
            found: occlusion.shape(),
        });
    }
    let (mut lit_pos, mut lit_neg) = (0.0, 0.0);
    for ((_, _, w), &f) in kernel.cells().zip(occlusion.fractions()) {
        match w {
            1 => lit_pos += 1.0 - f,
            -1 => lit_neg += 1.0 - f,
            _ => {}
        }
    }
    Ok(pv.v_cell * (lit_pos - lit_neg))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformPoint {
    pub time_ms: f64,
    pub voltage_v: f64,
}

impl WaveformPoint {
    pub fn new(time_ms: f64, voltage_v: f64) -> Self {
        Self { time_ms, voltage_v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveformSource {
    Recorded,
    Synthetic,
}

/// Admissible voltage range of a waveform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub min_v: f64,
    pub max_v: f64,
}

impl Default for Envelope {
    fn default() -> Self {
        Self {
            min_v: -1.5,
            max_v: 1.5,
        }
    }
}

/// Time-stamped surface voltage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    points: Vec<WaveformPoint>,
    source: WaveformSource,
    label: Option<MotionClass>,
}

impl Waveform {
    pub fn new(
        points: Vec<WaveformPoint>,
        source: WaveformSource,
        label: Option<MotionClass>,
    ) -> Result<Self> {
        Self::with_envelope(points, source, label, Envelope::default())
    }

    pub fn with_envelope(
        points: Vec<WaveformPoint>,
        source: WaveformSource,
        label: Option<MotionClass>,
        envelope: Envelope,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("waveform has no samples"));
        }
        for (i, pair) in points.windows(2).enumerate() {
            if !(pair[1].time_ms > pair[0].time_ms) {
                return Err(Error::param(format!(
                    "waveform times not strictly increasing at sample {}",
                    i + 1
                )));
            }
        }
        for (i, p) in points.iter().enumerate() {
            if !p.time_ms.is_finite() || !(envelope.min_v..=envelope.max_v).contains(&p.voltage_v) {
                return Err(Error::param(format!(
                    "sample {i} ({} ms, {} V) outside envelope [{}, {}] V",
                    p.time_ms, p.voltage_v, envelope.min_v, envelope.max_v
                )));
            }
        }
        Ok(Self {
            points,
            source,
            label,
        })
    }

    pub fn points(&self) -> &[WaveformPoint] {
        &self.points
    }

    pub fn source(&self) -> WaveformSource {
        self.source
    }

    pub fn label(&self) -> Option<MotionClass> {
        self.label
    }

    pub fn with_label(mut self, label: Option<MotionClass>) -> Self {
        self.label = label;
        self
    }

    pub fn span_ms(&self) -> (f64, f64) {
        (
            self.points[0].time_ms,
            self.points[self.points.len() - 1].time_ms,
        )
    }

    /// Linear interpolation between stored points; `None` outside the span.
    pub fn voltage_at(&self, t_ms: f64) -> Option<f64> {
        let (start, end) = self.span_ms();
        if !(start..=end).contains(&t_ms) {
            return None;
        }
        let idx = self.points.partition_point(|p| p.time_ms < t_ms);
        let hi = self.points[idx];
        if hi.time_ms == t_ms {
            return Some(hi.voltage_v);
        }
        let lo = self.points[idx - 1];
        let frac = (t_ms - lo.time_ms) / (hi.time_ms - lo.time_ms);
        Some(lo.voltage_v + frac * (hi.voltage_v - lo.voltage_v))
    }
}

/// Rectangular shadow, described in surface coordinates.
///
/// The surface origin is its top-left corner with x to the right (column
/// direction) and y downwards (row direction). `size_x_m` by `size_y_m` is the
/// footprint. The offset on the axis across the direction of travel places
/// the shadow (`offset_y_m` for horizontal sweeps, `offset_x_m` for vertical
/// ones); `None` there means the shadow spans the whole surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occluder {
    pub size_x_m: f64,
    pub size_y_m: f64,
    pub offset_x_m: Option<f64>,
    pub offset_y_m: Option<f64>,
}

impl Occluder {
    /// A straight edge of the given depth that covers every row (or column)
    /// it passes.
    pub fn bar(width_m: f64) -> Self {
        Self {
            size_x_m: width_m,
            size_y_m: width_m,
            offset_x_m: None,
            offset_y_m: None,
        }
    }

    /// Depth of the shadow along the direction of travel.
    pub fn depth_along(&self, direction: MotionClass) -> f64 {
        if direction.is_horizontal() {
            self.size_x_m
        } else {
            self.size_y_m
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.size_x_m > 0.0 && self.size_y_m > 0.0)
            || !self.size_x_m.is_finite()
            || !self.size_y_m.is_finite()
        {
            return Err(Error::param(format!(
                "occluder footprint {} m x {} m has no area",
                self.size_x_m, self.size_y_m
            )));
        }
        Ok(())
    }
}

impl Default for Occluder {
    /// A hand-sized shadow, 4 cm across the columns and 10 cm along the rows,
    /// whose lower-right part crosses the surface.
    fn default() -> Self {
        Self {
            size_x_m: 0.04,
            size_y_m: 0.10,
            offset_x_m: Some(0.04),
            offset_y_m: Some(0.02),
        }
    }
}

pub const SPEED_RANGE_M_S: (f64, f64) = (0.5, 0.8);

/// A constant-speed sweep across the surface.
///
/// `start_time_ms` is when the leading edge of the shadow reaches the entry
/// edge of the surface; the synthesized waveform covers
/// `0..=start_time_ms + duration_ms`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionTrajectory {
    pub direction: MotionClass,
    pub speed_m_s: f64,
    /// Hover height of the hand. Descriptive only: shadows are not blurred.
    pub height_m: f64,
    pub occluder: Occluder,
    pub start_time_ms: f64,
    pub duration_ms: f64,
}

impl MotionTrajectory {
    pub fn new(direction: MotionClass) -> Self {
        Self {
            direction,
            speed_m_s: 0.5,
            height_m: 0.02,
            occluder: Occluder::default(),
            start_time_ms: 170.0,
            duration_ms: 400.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = SPEED_RANGE_M_S;
        if !(lo..=hi).contains(&self.speed_m_s) {
            return Err(Error::param(format!(
                "speed {} m/s outside [{lo}, {hi}] m/s",
                self.speed_m_s
            )));
        }
        if !(self.duration_ms > 0.0) || !self.duration_ms.is_finite() {
            return Err(Error::param("trajectory duration must be positive"));
        }
        if !self.start_time_ms.is_finite() || self.start_time_ms < 0.0 {
            return Err(Error::param("trajectory start time must be non-negative"));
        }
        if !(self.height_m > 0.0) {
            return Err(Error::param("hover height must be positive"));
        }
        self.occluder.validate()
    }

    /// Distance travelled by the leading edge past the entry edge.
    fn travel_m(&self, t_ms: f64) -> f64 {
        (t_ms - self.start_time_ms) * self.speed_m_s * 1.0e-3
    }
}

/// Physical placement of the kernel cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceLayout {
    /// Centre-to-centre spacing of the grid.
    pub pitch_m: f64,
    /// Side of the square active area of each cell (<= pitch).
    pub cell_size_m: f64,
}

impl Default for SurfaceLayout {
    fn default() -> Self {
        Self {
            pitch_m: 0.02,
            cell_size_m: 0.016,
        }
    }
}

impl SurfaceLayout {
    fn validate(&self) -> Result<()> {
        if !(self.pitch_m > 0.0) || !(self.cell_size_m > 0.0) || self.cell_size_m > self.pitch_m {
            return Err(Error::param(format!(
                "cell size {} m must be positive and at most the pitch {} m",
                self.cell_size_m, self.pitch_m
            )));
        }
        Ok(())
    }
}

/// Kernel, cell model and geometry together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingSurface {
    pub kernel: PolarityMatrix,
    pub photodiode: PhotodiodeModel,
    pub layout: SurfaceLayout,
    /// Flip the sign convention of the output terminal.
    pub invert_output: bool,
}

impl SensingSurface {
    pub fn new(kernel: PolarityMatrix, photodiode: PhotodiodeModel) -> Self {
        Self {
            kernel,
            photodiode,
            layout: SurfaceLayout::default(),
            invert_output: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.photodiode.validate()?;
        self.layout.validate()
    }

    pub fn width_m(&self) -> f64 {
        self.kernel.cols() as f64 * self.layout.pitch_m
    }

    pub fn height_m(&self) -> f64 {
        self.kernel.rows() as f64 * self.layout.pitch_m
    }

    pub fn output(&self, occlusion: &OcclusionGrid) -> Result<f64> {
        let v = surface_output(&self.kernel, &self.photodiode, occlusion)?;
        Ok(if self.invert_output { 0.0 - v } else { v })
    }

    /// Fraction of every cell covered by the shadow at time `t_ms`.
    pub fn occlusion_at(&self, traj: &MotionTrajectory, t_ms: f64) -> OcclusionGrid {
        let (rows, cols) = (self.kernel.rows(), self.kernel.cols());
        let pitch = self.layout.pitch_m;
        let cell = self.layout.cell_size_m;
        let margin = 0.5 * (pitch - cell);
        let occ = &traj.occluder;
        let d = traj.travel_m(t_ms);
        let (w, h) = (self.width_m(), self.height_m());

        let (x_range, y_range) = match traj.direction {
            MotionClass::LeftToRight => {
                ((d - occ.size_x_m, d), cross(occ.offset_y_m, occ.size_y_m))
            }
            MotionClass::RightToLeft => (
                (w - d, w - d + occ.size_x_m),
                cross(occ.offset_y_m, occ.size_y_m),
            ),
            MotionClass::TopToBottom => {
                (cross(occ.offset_x_m, occ.size_x_m), (d - occ.size_y_m, d))
            }
            MotionClass::BottomToTop => (
                cross(occ.offset_x_m, occ.size_x_m),
                (h - d, h - d + occ.size_y_m),
            ),
        };

        let mut grid = OcclusionGrid::clear(rows, cols);
        for r in 0..rows {
            let y0 = r as f64 * pitch + margin;
            let fy = overlap(y_range, (y0, y0 + cell)) / cell;
            if fy == 0.0 {
                continue;
            }
            for c in 0..cols {
                let x0 = c as f64 * pitch + margin;
                let fx = overlap(x_range, (x0, x0 + cell)) / cell;
                grid.fractions[r * cols + c] = (fx * fy).clamp(0.0, 1.0);
            }
        }
        grid
    }

    /// Instantaneous terminal voltage, before any response filtering.
    pub fn voltage_at(&self, traj: &MotionTrajectory, t_ms: f64) -> Result<f64> {
        self.output(&self.occlusion_at(traj, t_ms))
    }

    /// Sweeps the shadow across the surface and records the terminal voltage.
    ///
    /// The result is labelled with the trajectory direction. When the
    /// photodiode model has a response time constant, a first-order low-pass
    /// is applied along the record.
    pub fn simulate_motion(
        &self,
        traj: &MotionTrajectory,
        sample_rate_hz: f64,
    ) -> Result<Waveform> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(Error::param("sample rate must be positive"));
        }
        self.validate()?;
        traj.validate()?;

        let step_ms = 1.0e3 / sample_rate_hz;
        let end_ms = traj.start_time_ms + traj.duration_ms;
        let n = libm::floor(end_ms / step_ms + 1.0e-9) as usize + 1;
        let mut points = Vec::with_capacity(n);
        for k in 0..n {
            let t = k as f64 * step_ms;
            points.push(WaveformPoint::new(t, self.voltage_at(traj, t)?));
        }
        if let Some(tau) = self.photodiode.response_tau_ms {
            let alpha = 1.0 - libm::exp(-step_ms / tau);
            let mut state = points[0].voltage_v;
            for p in points.iter_mut() {
                state += alpha * (p.voltage_v - state);
                p.voltage_v = state;
            }
        }
        Waveform::new(points, WaveformSource::Synthetic, Some(traj.direction))
    }
}

impl Default for SensingSurface {
    fn default() -> Self {
        Self::new(default_kernel(), PhotodiodeModel::default())
    }
}

fn cross(offset: Option<f64>, size: f64) -> (f64, f64) {
    match offset {
        Some(o) => (o, o + size),
        None => (f64::NEG_INFINITY, f64::INFINITY),
    }
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_kernel_matches_reference() {
        let k = default_kernel();
        assert_eq!(
            k.to_rows(),
            alloc::vec![
                alloc::vec![0, -1, 0, 0],
                alloc::vec![0, 0, -1, 0],
                alloc::vec![1, 0, 0, 0],
                alloc::vec![0, 0, 0, 1],
            ]
        );
        assert_eq!(k.to_rows()[2], alloc::vec![1, 0, 0, 0]);
        assert_eq!(k.cells().map(|(_, _, w)| i32::from(w)).sum::<i32>(), 0);
        assert_eq!(k.nonzero_count(), 4);
    }

    #[test]
    fn unbalanced_or_out_of_range_kernels_rejected() {
        assert!(PolarityMatrix::new(1, 2, alloc::vec![1, 1]).is_err());
        assert!(PolarityMatrix::new(1, 2, alloc::vec![2, -2]).is_err());
        assert!(matches!(
            PolarityMatrix::new(2, 2, alloc::vec![1, -1, 0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn output_examples() {
        let k = default_kernel();
        let pv = PhotodiodeModel::new(0.5, 850.0).unwrap();
        let clear = OcclusionGrid::clear(4, 4);
        assert_eq!(surface_output(&k, &pv, &clear).unwrap(), 0.0);
        let dark = OcclusionGrid::uniform(4, 4, 1.0).unwrap();
        assert_eq!(surface_output(&k, &pv, &dark).unwrap(), 0.0);

        // blocking the +1 cell in the third row, first column
        let mut one = OcclusionGrid::clear(4, 4);
        one.set(2, 0, 1.0).unwrap();
        // oracle: -v_cell * (sum of blocked weights)
        assert_eq!(surface_output(&k, &pv, &one).unwrap(), -0.5);
    }

    #[test]
    fn shape_mismatch_is_a_dimension_error() {
        let k = default_kernel();
        let pv = PhotodiodeModel::default();
        let grid = OcclusionGrid::clear(3, 4);
        assert!(matches!(
            surface_output(&k, &pv, &grid),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn blocking_pairs_follows_parity_of_weight_sum() {
        let k = default_kernel();
        let pv = PhotodiodeModel::default();
        let nonzero: Vec<(usize, usize, i8)> = k.cells().filter(|c| c.2 != 0).collect();
        for mask in 0u32..16 {
            let mut grid = OcclusionGrid::clear(4, 4);
            let mut blocked = 0i32;
            for (i, &(r, c, w)) in nonzero.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    grid.set(r, c, 1.0).unwrap();
                    blocked += i32::from(w);
                }
            }
            let v = surface_output(&k, &pv, &grid).unwrap();
            assert_relative_eq!(v, -pv.v_cell * f64::from(blocked), epsilon = 1e-15);
            if mask.count_ones() % 2 == 1 {
                assert_ne!(v, 0.0);
            }
        }
    }

    #[test]
    fn illuminance_scaling() {
        let pv = PhotodiodeModel::at_illuminance(1200.0).unwrap();
        assert_relative_eq!(pv.v_cell, 0.6 * 1200.0 / 850.0);
        assert!(PhotodiodeModel::at_illuminance(400.0).is_err());
        assert!(PhotodiodeModel::new(0.0, 850.0).is_err());
    }

    #[test]
    fn lr_bar_reproduces_negated_column_sums() {
        let surface = SensingSurface::default();
        let pitch = surface.layout.pitch_m;
        let mut traj = MotionTrajectory::new(MotionClass::LeftToRight);
        traj.occluder = Occluder::bar(pitch);
        let v = surface.photodiode.v_cell;
        let sums = surface.kernel.column_sums();
        for (j, &s) in sums.iter().enumerate() {
            // the bar sits exactly over column j
            let t = traj.start_time_ms + (j as f64 + 1.0) * pitch / traj.speed_m_s * 1.0e3;
            let out = surface.voltage_at(&traj, t).unwrap();
            assert_relative_eq!(out, -v * f64::from(s), epsilon = 1e-12);
        }
        let signs: Vec<i32> = sums.iter().map(|s| -s).collect();
        assert_eq!(signs, alloc::vec![-1, 1, 1, -1]);
    }

    #[test]
    fn oversized_shadow_cancels_during_full_coverage() {
        let surface = SensingSurface::default();
        for dir in MotionClass::ALL {
            let mut traj = MotionTrajectory::new(dir);
            traj.occluder = Occluder::bar(0.5);
            // leading edge well past the far edge, trailing edge not yet in
            let t = traj.start_time_ms + 0.2 / traj.speed_m_s * 1.0e3;
            let grid = surface.occlusion_at(&traj, t);
            assert!(grid.fractions().iter().all(|&f| f == 1.0));
            assert_eq!(surface.voltage_at(&traj, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn bottom_to_top_is_time_reversed_top_to_bottom() {
        let surface = SensingSurface::default();
        let mut tb = MotionTrajectory::new(MotionClass::TopToBottom);
        tb.occluder = Occluder {
            size_x_m: 0.03,
            size_y_m: 0.05,
            offset_x_m: Some(0.01),
            offset_y_m: None,
        };
        let mut bt = tb;
        bt.direction = MotionClass::BottomToTop;
        let speed = tb.speed_m_s * 1.0e-3;
        // both shadows occupy the same rows at t and pivot - t
        let pivot = 2.0 * tb.start_time_ms + (surface.height_m() + tb.occluder.size_y_m) / speed;
        let wave = surface.simulate_motion(&bt, 1000.0).unwrap();
        for p in wave.points() {
            let mirrored = surface.voltage_at(&tb, pivot - p.time_ms).unwrap();
            assert_relative_eq!(p.voltage_v, mirrored, epsilon = 1e-12);
        }
        assert!(wave.points().iter().any(|p| p.voltage_v.abs() > 0.1));
    }

    #[test]
    fn synthetic_waveform_is_labelled_and_bounded() {
        let surface = SensingSurface::default();
        let traj = MotionTrajectory::new(MotionClass::RightToLeft);
        let w = surface.simulate_motion(&traj, 1000.0).unwrap();
        assert_eq!(w.source(), WaveformSource::Synthetic);
        assert_eq!(w.label(), Some(MotionClass::RightToLeft));
        assert_eq!(w.span_ms(), (0.0, 570.0));
        assert_eq!(w.points().len(), 571);
    }

    #[test]
    fn trajectory_validation() {
        let surface = SensingSurface::default();
        let mut traj = MotionTrajectory::new(MotionClass::BottomToTop);
        traj.speed_m_s = 0.9;
        assert!(surface.simulate_motion(&traj, 1000.0).is_err());
        let mut traj = MotionTrajectory::new(MotionClass::BottomToTop);
        traj.occluder.size_x_m = 0.0;
        assert!(surface.simulate_motion(&traj, 1000.0).is_err());
        let traj = MotionTrajectory::new(MotionClass::BottomToTop);
        assert!(surface.simulate_motion(&traj, 0.0).is_err());
    }

    #[test]
    fn low_pass_smooths_edges() {
        let mut surface = SensingSurface::default();
        let traj = MotionTrajectory::new(MotionClass::TopToBottom);
        let raw = surface.simulate_motion(&traj, 1000.0).unwrap();
        surface.photodiode.response_tau_ms = Some(5.0);
        let filtered = surface.simulate_motion(&traj, 1000.0).unwrap();
        let jump = |w: &Waveform| {
            w.points()
                .windows(2)
                .map(|p| (p[1].voltage_v - p[0].voltage_v).abs())
                .fold(0.0, f64::max)
        };
        assert!(jump(&filtered) < jump(&raw));
    }

    #[test]
    fn waveform_rejects_unordered_or_out_of_envelope() {
        let pts = alloc::vec![WaveformPoint::new(1.0, 0.0), WaveformPoint::new(1.0, 0.1)];
        assert!(Waveform::new(pts, WaveformSource::Recorded, None).is_err());
        let pts = alloc::vec![WaveformPoint::new(0.0, 2.0)];
        assert!(Waveform::new(pts, WaveformSource::Recorded, None).is_err());
    }

    #[test]
    fn interpolation_hits_knots_exactly() {
        let pts = alloc::vec![
            WaveformPoint::new(0.0, 0.1),
            WaveformPoint::new(10.0, 0.3),
            WaveformPoint::new(20.0, -0.2),
        ];
        let w = Waveform::new(pts, WaveformSource::Recorded, None).unwrap();
        assert_eq!(w.voltage_at(10.0), Some(0.3));
        assert_relative_eq!(w.voltage_at(5.0).unwrap(), 0.2);
        assert_eq!(w.voltage_at(25.0), None);
    }
}
