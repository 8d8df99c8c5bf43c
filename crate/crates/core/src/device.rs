// SPDX-License-Identifier: Apache-2.0
//! HfO2 synapse: lifecycle state machine plus calibrated programming and
//! readout curves.
//!
//! A fresh device is in its high-resistance pristine state. FORM grows the
//! filament once, RESET raises the resistance to a fixed baseline, and SET
//! pulls it down according to the programming voltage. READ is abstracted
//! into a resistance-to-current curve; a row that is not READ-enabled draws a
//! flat standby current instead.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset;
use crate::error::{Error, Result};
use crate::isotonic::{Direction, MonotoneCurve, Scale};

type Point = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SynapseMode {
    Pristine,
    Formed,
    Reset,
    Set,
}

impl SynapseMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SynapseMode::Pristine => "PRISTINE",
            SynapseMode::Formed => "FORMED",
            SynapseMode::Reset => "RESET",
            SynapseMode::Set => "SET",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "PRISTINE" => Some(SynapseMode::Pristine),
            "FORMED" => Some(SynapseMode::Formed),
            "RESET" => Some(SynapseMode::Reset),
            "SET" => Some(SynapseMode::Set),
            _ => None,
        }
    }

    fn readable(self) -> bool {
        matches!(self, SynapseMode::Reset | SynapseMode::Set)
    }
}

/// Resistance levels and voltage thresholds of the device lifecycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LifecycleParams {
    pub pristine_ohm: f64,
    pub post_form_ohm: f64,
    pub reset_baseline_ohm: f64,
    /// Lowest resistance SET can reach.
    pub set_floor_ohm: f64,
    /// Below this a programming pulse has no effect.
    pub disturb_threshold_v: f64,
    /// From this voltage up a pulse performs a SET.
    pub set_threshold_v: f64,
    pub max_program_v: f64,
    /// Upper bound on the sub-threshold resistance creep.
    pub max_drift_ohm: f64,
}

impl Default for LifecycleParams {
    fn default() -> Self {
        Self {
            pristine_ohm: 10.0e6,
            post_form_ohm: 5.0e3,
            reset_baseline_ohm: 96_290.0,
            set_floor_ohm: 5_100.0,
            disturb_threshold_v: 0.45,
            set_threshold_v: 0.7,
            max_program_v: 1.2,
            max_drift_ohm: 60.0,
        }
    }
}

/// Calibrated device response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceCurves {
    /// SET voltage to resistance, fitted non-increasing in log-resistance.
    pub program: MonotoneCurve,
    /// Sub-threshold voltage to resistance increase above the current value.
    pub drift: MonotoneCurve,
    /// Resistance to enabled READ current, fitted non-increasing.
    pub read: MonotoneCurve,
    pub standby_current_a: f64,
    pub v_read: f64,
    pub params: LifecycleParams,
}

impl DeviceCurves {
    /// Builds curves from `(v_set, resistance)` and `(resistance, current)`
    /// tables.
    ///
    /// Programming points below `params.set_threshold_v` are sub-threshold
    /// observations and are stored as creep above the RESET baseline.
    pub fn from_calibration(
        program_points: &[(f64, f64)],
        read_points: &[(f64, f64)],
        params: LifecycleParams,
    ) -> Result<Self> {
        let (sub, set): (Vec<Point>, Vec<Point>) = program_points
            .iter()
            .partition(|p| p.0 < params.set_threshold_v);
        let mut drift_points = Vec::with_capacity(sub.len() + 1);
        if !sub
            .iter()
            .any(|p| (p.0 - params.disturb_threshold_v).abs() < 1e-9)
        {
            drift_points.push((params.disturb_threshold_v, 0.0));
        }
        for &(v, r) in &sub {
            if v < params.disturb_threshold_v {
                return Err(Error::param(format!(
                    "programming point at {v} V is below the disturb threshold"
                )));
            }
            let creep = r - params.reset_baseline_ohm;
            if !(0.0..=params.max_drift_ohm).contains(&creep) {
                return Err(Error::param(format!(
                    "sub-threshold point ({v} V, {r} ohm) implies {creep} ohm creep"
                )));
            }
            drift_points.push((v, creep));
        }
        if set.is_empty() {
            return Err(Error::param(
                "no programming points at or above the SET threshold",
            ));
        }
        if let Some(v) = set.iter().map(|p| p.0).find(|&v| v > params.max_program_v) {
            return Err(Error::param(format!(
                "programming point at {v} V above the DAC range"
            )));
        }
        let program =
            MonotoneCurve::fit(&set, Direction::NonIncreasing, Scale::Linear, Scale::Log)?;
        let drift = MonotoneCurve::fit(
            &drift_points,
            Direction::NonDecreasing,
            Scale::Linear,
            Scale::Linear,
        )?;
        let read = MonotoneCurve::fit(
            read_points,
            Direction::NonIncreasing,
            Scale::Log,
            Scale::Linear,
        )?;
        Ok(Self {
            program,
            drift,
            read,
            standby_current_a: 51.0e-9,
            v_read: 0.6,
            params,
        })
    }

    /// Curves fitted to the embedded reference calibration.
    pub fn reference() -> Self {
        Self::from_calibration(
            &dataset::PROGRAM_POINTS,
            &dataset::READ_POINTS,
            LifecycleParams::default(),
        )
        .expect("embedded calibration is consistent")
    }

    /// Resistance after a SET at `v_set`, before clamping.
    pub fn program_resistance(&self, v_set: f64) -> f64 {
        self.program.eval(v_set)
    }

    pub fn drift_ohm(&self, v: f64) -> f64 {
        self.drift.eval(v).clamp(0.0, self.params.max_drift_ohm)
    }

    pub fn enabled_current(&self, resistance_ohm: f64) -> f64 {
        self.read.eval(resistance_ohm)
    }
}

impl Default for DeviceCurves {
    fn default() -> Self {
        Self::reference()
    }
}

/// One synapse: lifecycle mode and present resistance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynapseState {
    pub mode: SynapseMode,
    pub resistance_ohm: f64,
}

impl SynapseState {
    pub fn pristine(params: &LifecycleParams) -> Self {
        Self {
            mode: SynapseMode::Pristine,
            resistance_ohm: params.pristine_ohm,
        }
    }

    /// One-time filament formation.
    pub fn form(&self, params: &LifecycleParams) -> Result<Self> {
        if self.mode != SynapseMode::Pristine {
            return Err(lifecycle("FORM", self.mode));
        }
        Ok(Self {
            mode: SynapseMode::Formed,
            resistance_ohm: params.post_form_ohm,
        })
    }

    pub fn reset(&self, params: &LifecycleParams) -> Result<Self> {
        if self.mode == SynapseMode::Pristine {
            return Err(lifecycle("RESET", self.mode));
        }
        Ok(Self {
            mode: SynapseMode::Reset,
            resistance_ohm: params.reset_baseline_ohm,
        })
    }

    /// Applies one programming pulse of `v_set` volts.
    ///
    /// Below the disturb threshold nothing happens. Between the disturb and
    /// SET thresholds the resistance creeps up by the fitted drift, never
    /// past `reset_baseline + max_drift`, and the mode is kept. From the SET threshold up the device is SET to the
    /// programming curve, clamped to `[set_floor, reset_baseline]`.
    pub fn set_resistance(&self, v_set: f64, curves: &DeviceCurves) -> Result<Self> {
        if !self.mode.readable() {
            return Err(lifecycle("SET", self.mode));
        }
        let p = &curves.params;
        if v_set > p.max_program_v {
            return Err(Error::Overdrive {
                volts: v_set,
                max: p.max_program_v,
            });
        }
        if !(v_set >= 0.0) {
            return Err(Error::param(format!(
                "programming voltage {v_set} V is negative"
            )));
        }
        if v_set < p.disturb_threshold_v {
            return Ok(*self);
        }
        if v_set < p.set_threshold_v {
            let ceiling = p.reset_baseline_ohm + p.max_drift_ohm;
            let crept = (self.resistance_ohm + curves.drift_ohm(v_set)).min(ceiling);
            return Ok(Self {
                mode: self.mode,
                resistance_ohm: crept.max(self.resistance_ohm),
            });
        }
        let r = curves
            .program_resistance(v_set)
            .clamp(p.set_floor_ohm, p.reset_baseline_ohm);
        Ok(Self {
            mode: SynapseMode::Set,
            resistance_ohm: r,
        })
    }

    /// Current drawn during a READ cycle.
    pub fn read_current(&self, enabled: bool, curves: &DeviceCurves) -> Result<f64> {
        if !self.mode.readable() {
            return Err(lifecycle("READ", self.mode));
        }
        Ok(if enabled {
            curves.enabled_current(self.resistance_ohm)
        } else {
            curves.standby_current_a
        })
    }
}

fn lifecycle(op: &'static str, mode: SynapseMode) -> Error {
    Error::Lifecycle {
        op,
        mode,
        row: None,
        col: None,
    }
}
