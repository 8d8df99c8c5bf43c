// SPDX-License-Identifier: Apache-2.0
//! Waveform to crossbar inputs: sampling, READ gating and DAC codes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::class::MotionClass;
use crate::error::{Error, Result};
use crate::surface::Waveform;

/// Rows whose sampled amplitude is below this are held in standby.
pub const READ_THRESHOLD_V: f64 = 0.45;

pub const DAC_MIN_V: f64 = 0.6;
pub const DAC_MAX_V: f64 = 1.2;
pub const DAC_STEP_V: f64 = 0.04;
pub const DAC_MAX_CODE: u8 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingPlan {
    /// Time of the first sample.
    pub start_ms: f64,
    pub period_ms: f64,
    pub count: usize,
    /// Width of the sampling pulse. Only used for reporting.
    pub pulse_width_us: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        // first sample one period after the 230 ms trigger
        Self {
            start_ms: 260.0,
            period_ms: 30.0,
            count: 8,
            pulse_width_us: 2.0,
        }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::param("sampling plan needs at least one sample"));
        }
        if !(self.period_ms > 0.0) || !(self.pulse_width_us > 0.0) {
            return Err(Error::param(
                "sampling period and pulse width must be positive",
            ));
        }
        if !self.start_ms.is_finite() {
            return Err(Error::param("sampling start must be finite"));
        }
        Ok(())
    }

    pub fn time_of(&self, i: usize) -> f64 {
        self.start_ms + i as f64 * self.period_ms
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.time_of(i))
    }

    pub fn end_ms(&self) -> f64 {
        self.time_of(self.count - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleVector {
    amplitudes: Vec<f64>,
    plan: SamplingPlan,
    label: Option<MotionClass>,
}

impl SampleVector {
    pub fn new(
        amplitudes: Vec<f64>,
        plan: SamplingPlan,
        label: Option<MotionClass>,
    ) -> Result<Self> {
        plan.validate()?;
        if amplitudes.len() != plan.count {
            return Err(Error::param(format!(
                "sample vector has {} amplitudes, plan expects {}",
                amplitudes.len(),
                plan.count
            )));
        }
        if let Some(a) = amplitudes.iter().find(|a| !a.is_finite()) {
            return Err(Error::param(format!("non-finite amplitude {a}")));
        }
        Ok(Self {
            amplitudes,
            plan,
            label,
        })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn plan(&self) -> &SamplingPlan {
        &self.plan
    }

    pub fn label(&self) -> Option<MotionClass> {
        self.label
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// Samples `w` at the plan instants, interpolating linearly between points.
pub fn sample_waveform(w: &Waveform, plan: &SamplingPlan) -> Result<SampleVector> {
    plan.validate()?;
    let have = w.span_ms();
    let needed = (plan.start_ms, plan.end_ms());
    let coverage = || Error::Coverage {
        needed_ms: needed,
        have_ms: have,
    };
    let amplitudes = plan
        .times()
        .map(|t| w.voltage_at(t).ok_or_else(coverage))
        .collect::<Result<Vec<_>>>()?;
    SampleVector::new(amplitudes, *plan, w.label())
}

/// Which rows drive a READ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowActivation {
    active: Vec<bool>,
}

impl RowActivation {
    pub fn new(active: Vec<bool>) -> Self {
        Self { active }
    }

    pub fn all(rows: usize, on: bool) -> Self {
        Self {
            active: alloc::vec![on; rows],
        }
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn count_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn to_bitstring(&self) -> String {
        self.active
            .iter()
            .map(|&a| if a { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|ch| match ch {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(Error::param(format!("bad activation bit `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl fmt::Display for RowActivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &a in &self.active {
            f.write_str(if a { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A row is READ-enabled when its amplitude reaches `threshold_v`.
pub fn activation_mask(s: &SampleVector, threshold_v: f64) -> RowActivation {
    RowActivation::new(s.amplitudes().iter().map(|&a| a >= threshold_v).collect())
}

/// 4-bit programming level, `voltage = 0.6 V + code * 40 mV`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DacCode(u8);

impl DacCode {
    pub fn new(code: u8) -> Result<Self> {
        if code > DAC_MAX_CODE {
            return Err(Error::param(format!(
                "DAC code {code} exceeds {DAC_MAX_CODE}"
            )));
        }
        Ok(Self(code))
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn voltage(self) -> f64 {
        DAC_MIN_V + f64::from(self.0) * DAC_STEP_V
    }
}

/// Nearest DAC level to `v` after clamping to the DAC range; halves round up.
pub fn dac_quantize(v: f64) -> DacCode {
    let clamped = if v.is_nan() {
        DAC_MIN_V
    } else {
        v.clamp(DAC_MIN_V, DAC_MAX_V)
    };
    // the slack keeps decimal midpoints such as 0.70 V on the upper side
    let steps = libm::floor((clamped - DAC_MIN_V) / DAC_STEP_V + 0.5 + 1.0e-9);
    DacCode((steps as u8).min(DAC_MAX_CODE))
}
