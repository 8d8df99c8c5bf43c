// SPDX-License-Identifier: Apache-2.0
//! Synapse crossbar: one motion class programmed per column, column currents
//! summed under a row activation mask.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::class::MotionClass;
use crate::dataset;
use crate::device::{DeviceCurves, SynapseMode, SynapseState};
use crate::error::{Error, Result};
use crate::pipeline::{dac_quantize, RowActivation, SampleVector};

/// How a cell's enabled READ current is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    /// From the fitted resistance-to-current curve.
    #[default]
    Model,
    /// From a measured per-cell current table.
    Replay,
}

/// Which voltage drives a SET during mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProgrammingPath {
    /// The sampled amplitude itself, clamped to `[0, max_program_v]`.
    #[default]
    Direct,
    /// The amplitude rounded to the nearest 4-bit DAC level.
    Quantized,
}

/// Per-cell enabled READ currents in amperes, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayTable {
    rows: usize,
    cols: usize,
    currents_a: Vec<f64>,
}

impl ReplayTable {
    pub fn new(rows: usize, cols: usize, currents_a: Vec<f64>) -> Result<Self> {
        if currents_a.len() != rows * cols {
            return Err(Error::Dimension {
                what: "replay table",
                expected: (rows, cols),
                found: (currents_a.len() / cols.max(1), cols),
            });
        }
        if let Some(i) = currents_a.iter().position(|&i| !(i.is_finite() && i > 0.0)) {
            return Err(Error::param(format!(
                "replay current at row {}, column {} is not positive",
                i / cols,
                i % cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            currents_a,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.currents_a[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.currents_a[row * self.cols..(row + 1) * self.cols]
    }
}

/// The embedded measured READ current table.
pub fn replay_cell_currents() -> ReplayTable {
    dataset::replay_table()
}

/// Summed current of each column with the column's class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnCurrents {
    currents_a: Vec<f64>,
    labels: Vec<Option<MotionClass>>,
}

impl ColumnCurrents {
    pub fn new(currents_a: Vec<f64>, labels: Vec<Option<MotionClass>>) -> Result<Self> {
        if currents_a.len() != labels.len() {
            return Err(Error::param(format!(
                "{} currents but {} labels",
                currents_a.len(),
                labels.len()
            )));
        }
        if currents_a.iter().any(|i| !i.is_finite()) {
            return Err(Error::param("column current is not finite"));
        }
        Ok(Self { currents_a, labels })
    }

    /// Columns labelled in [`MotionClass::ALL`] order.
    pub fn labelled(currents_a: Vec<f64>) -> Result<Self> {
        let labels = (0..currents_a.len()).map(MotionClass::from_index).collect();
        Self::new(currents_a, labels)
    }

    pub fn currents(&self) -> &[f64] {
        &self.currents_a
    }

    pub fn labels(&self) -> &[Option<MotionClass>] {
        &self.labels
    }

    pub fn label(&self, col: usize) -> Option<MotionClass> {
        self.labels.get(col).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.currents_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.currents_a.is_empty()
    }

    /// Same labels, new values.
    pub fn with_currents(&self, currents_a: Vec<f64>) -> Result<Self> {
        Self::new(currents_a, self.labels.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossbar {
    rows: usize,
    cols: usize,
    cells: Vec<SynapseState>,
    labels: Vec<Option<MotionClass>>,
    curves: DeviceCurves,
    readout: Readout,
    replay: Option<ReplayTable>,
    path: ProgrammingPath,
}

impl Crossbar {
    /// A grid of pristine devices.
    pub fn new(rows: usize, cols: usize, curves: DeviceCurves) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param(
                "crossbar needs at least one row and one column",
            ));
        }
        let cell = SynapseState::pristine(&curves.params);
        Ok(Self {
            rows,
            cols,
            cells: alloc::vec![cell; rows * cols],
            labels: alloc::vec![None; cols],
            curves,
            readout: Readout::Model,
            replay: None,
            path: ProgrammingPath::Direct,
        })
    }

    /// 8x4, formed and reset, reference curves, measured table attached and
    /// selected.
    pub fn reference() -> Self {
        let mut x = Self::new(dataset::ROWS, dataset::COLS, DeviceCurves::reference())
            .expect("fixed shape");
        x.form_all().expect("fresh crossbar is pristine");
        x.reset_all().expect("formed cells reset");
        x.with_replay(replay_cell_currents()).expect("table is 8x4")
    }

    /// Rebuilds a crossbar from stored cell states (row-major).
    pub fn from_cells(
        rows: usize,
        cols: usize,
        cells: Vec<SynapseState>,
        labels: Vec<Option<MotionClass>>,
        curves: DeviceCurves,
    ) -> Result<Self> {
        let mut x = Self::new(rows, cols, curves)?;
        if cells.len() != rows * cols {
            return Err(Error::Dimension {
                what: "crossbar cells",
                expected: (rows, cols),
                found: (cells.len() / cols, cols),
            });
        }
        if labels.len() != cols {
            return Err(Error::Dimension {
                what: "column labels",
                expected: (1, cols),
                found: (1, labels.len()),
            });
        }
        x.cells = cells;
        x.labels = labels;
        Ok(x)
    }

    /// Attaches a measured current table and switches to replay readout.
    pub fn with_replay(mut self, table: ReplayTable) -> Result<Self> {
        if (table.rows(), table.cols()) != (self.rows, self.cols) {
            return Err(Error::Dimension {
                what: "replay table",
                expected: (self.rows, self.cols),
                found: (table.rows(), table.cols()),
            });
        }
        self.replay = Some(table);
        self.readout = Readout::Replay;
        Ok(self)
    }

    pub fn set_readout(&mut self, readout: Readout) -> Result<()> {
        if readout == Readout::Replay && self.replay.is_none() {
            return Err(Error::param(
                "replay readout requested without a current table",
            ));
        }
        self.readout = readout;
        Ok(())
    }

    pub fn set_programming_path(&mut self, path: ProgrammingPath) {
        self.path = path;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn readout(&self) -> Readout {
        self.readout
    }

    pub fn programming_path(&self) -> ProgrammingPath {
        self.path
    }

    pub fn curves(&self) -> &DeviceCurves {
        &self.curves
    }

    pub fn replay(&self) -> Option<&ReplayTable> {
        self.replay.as_ref()
    }

    pub fn cell(&self, row: usize, col: usize) -> &SynapseState {
        &self.cells[row * self.cols + col]
    }

    pub fn resistance(&self, row: usize, col: usize) -> f64 {
        self.cell(row, col).resistance_ohm
    }

    /// Row-major cell states.
    pub fn cells(&self) -> &[SynapseState] {
        &self.cells
    }

    pub fn labels(&self) -> &[Option<MotionClass>] {
        &self.labels
    }

    pub fn is_fully_mapped(&self) -> bool {
        self.labels.iter().all(Option::is_some)
    }

    pub fn form_all(&mut self) -> Result<()> {
        self.update_all(|s, x| s.form(&x.curves.params))
    }

    pub fn reset_all(&mut self) -> Result<()> {
        self.update_all(|s, x| s.reset(&x.curves.params))?;
        self.labels.iter_mut().for_each(|l| *l = None);
        Ok(())
    }

    pub fn reset_column(&mut self, col: usize) -> Result<()> {
        self.check_col(col)?;
        for r in 0..self.rows {
            let i = r * self.cols + col;
            self.cells[i] = self.cells[i]
                .reset(&self.curves.params)
                .map_err(|e| e.at_cell(r, col))?;
        }
        self.labels[col] = None;
        Ok(())
    }

    /// Voltage applied to a cell for a sampled amplitude.
    pub fn programming_voltage(&self, amplitude_v: f64) -> f64 {
        match self.path {
            ProgrammingPath::Direct => amplitude_v.clamp(0.0, self.curves.params.max_program_v),
            ProgrammingPath::Quantized => dac_quantize(amplitude_v).voltage(),
        }
    }

    /// Programs one column from a sample vector, one row per sample.
    ///
    /// Every cell of the column must be in RESET mode.
    pub fn map_class(&mut self, col: usize, samples: &SampleVector) -> Result<()> {
        self.check_col(col)?;
        if samples.len() != self.rows {
            return Err(Error::Dimension {
                what: "sample vector",
                expected: (self.rows, 1),
                found: (samples.len(), 1),
            });
        }
        for r in 0..self.rows {
            let mode = self.cell(r, col).mode;
            if mode != SynapseMode::Reset {
                return Err(Error::Lifecycle {
                    op: "map",
                    mode,
                    row: Some(r),
                    col: Some(col),
                });
            }
        }
        for (r, &a) in samples.amplitudes().iter().enumerate() {
            let v = self.programming_voltage(a);
            let i = r * self.cols + col;
            self.cells[i] = self.cells[i]
                .set_resistance(v, &self.curves)
                .map_err(|e| e.at_cell(r, col))?;
        }
        self.labels[col] = samples.label();
        Ok(())
    }

    /// Maps each vector into the column of its label.
    pub fn map_labelled(&mut self, vectors: &[SampleVector]) -> Result<()> {
        for v in vectors {
            let class = v
                .label()
                .ok_or_else(|| Error::param("sample vector has no class label"))?;
            self.map_class(class.index(), v)?;
        }
        Ok(())
    }

    /// Enabled READ current of one cell under the active readout.
    pub fn cell_read_current(&self, row: usize, col: usize) -> Result<f64> {
        let cell = self.cell(row, col);
        // lifecycle check applies in both readouts
        let model = cell
            .read_current(true, &self.curves)
            .map_err(|e| e.at_cell(row, col))?;
        Ok(match (self.readout, &self.replay) {
            (Readout::Replay, Some(t)) => t.get(row, col),
            _ => model,
        })
    }

    /// Column sums: enabled rows contribute their READ current, the others
    /// the standby current.
    pub fn column_currents(&self, mask: &RowActivation) -> Result<ColumnCurrents> {
        if mask.len() != self.rows {
            return Err(Error::Dimension {
                what: "row activation",
                expected: (self.rows, 1),
                found: (mask.len(), 1),
            });
        }
        let standby = self.curves.standby_current_a;
        let mut totals = alloc::vec![0.0; self.cols];
        for (r, &on) in mask.active().iter().enumerate() {
            for (c, total) in totals.iter_mut().enumerate() {
                *total += if on {
                    self.cell_read_current(r, c)?
                } else {
                    self.cell(r, c)
                        .read_current(false, &self.curves)
                        .map_err(|e| e.at_cell(r, c))?;
                    standby
                };
            }
        }
        ColumnCurrents::new(totals, self.labels.clone())
    }

    /// Resistance grid, `[row][col]`.
    pub fn resistance_grid(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.resistance(r, c)).collect())
            .collect()
    }

    fn check_col(&self, col: usize) -> Result<()> {
        if col >= self.cols {
            return Err(Error::param(format!(
                "column {col} outside a {}-column crossbar",
                self.cols
            )));
        }
        Ok(())
    }

    fn update_all(
        &mut self,
        f: impl Fn(&SynapseState, &Self) -> Result<SynapseState>,
    ) -> Result<()> {
        let mut next = self.cells.clone();
        for (i, s) in self.cells.iter().enumerate() {
            next[i] = f(s, self).map_err(|e| e.at_cell(i / self.cols, i % self.cols))?;
        }
        self.cells = next;
        Ok(())
    }
}
