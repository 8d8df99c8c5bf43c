// SPDX-License-Identifier: Apache-2.0
//! Energy bookkeeping for mapping and classification.
//!
//! All values are joules.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::class::MotionClass;
use crate::error::{Error, Result};

/// Label of the residual that closes a classification ledger.
pub const RESIDUAL_LABEL: &str = "CSG/DFF and peripherals (aggregate figure, not decomposed)";

/// Crossbar read plus WTA energy for each class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    #[serde(rename = "BT")]
    pub bt: f64,
    #[serde(rename = "LR")]
    pub lr: f64,
    #[serde(rename = "RL")]
    pub rl: f64,
    #[serde(rename = "TB")]
    pub tb: f64,
}

impl PerClass {
    pub fn get(&self, class: MotionClass) -> f64 {
        match class {
            MotionClass::BottomToTop => self.bt,
            MotionClass::LeftToRight => self.lr,
            MotionClass::RightToLeft => self.rl,
            MotionClass::TopToBottom => self.tb,
        }
    }

    pub fn mean(&self) -> f64 {
        (self.bt + self.lr + self.rl + self.tb) / 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyConstants {
    pub dac_per_column_j: f64,
    pub set_per_column_j: f64,
    /// Quoted mapping figure, kept for consistency checks.
    pub map_per_class_j: f64,
    pub sampling_per_class_j: f64,
    pub read_per_column_j: f64,
    pub classify_by_class_j: PerClass,
    /// Quoted average of `classify_by_class_j`.
    pub classify_avg_wta_j: f64,
    pub total_per_classification_j: f64,
    pub form_j: f64,
    pub reset_j: f64,
}

impl Default for EnergyConstants {
    fn default() -> Self {
        Self {
            dac_per_column_j: 282.56e-12,
            set_per_column_j: 3.89e-9,
            map_per_class_j: 4.17e-9,
            sampling_per_class_j: 3.24e-12,
            read_per_column_j: 90.16e-12,
            classify_by_class_j: PerClass {
                bt: 116.38e-12,
                lr: 140.7e-12,
                rl: 200.98e-12,
                tb: 103.84e-12,
            },
            classify_avg_wta_j: 140.48e-12,
            total_per_classification_j: 0.952e-9,
            form_j: 0.0,
            reset_j: 0.0,
        }
    }
}

impl EnergyConstants {
    pub fn zero() -> Self {
        let z = PerClass {
            bt: 0.0,
            lr: 0.0,
            rl: 0.0,
            tb: 0.0,
        };
        Self {
            dac_per_column_j: 0.0,
            set_per_column_j: 0.0,
            map_per_class_j: 0.0,
            sampling_per_class_j: 0.0,
            read_per_column_j: 0.0,
            classify_by_class_j: z,
            classify_avg_wta_j: 0.0,
            total_per_classification_j: 0.0,
            form_j: 0.0,
            reset_j: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.classify_by_class_j;
        let named = [
            ("dac_per_column_j", self.dac_per_column_j),
            ("set_per_column_j", self.set_per_column_j),
            ("map_per_class_j", self.map_per_class_j),
            ("sampling_per_class_j", self.sampling_per_class_j),
            ("read_per_column_j", self.read_per_column_j),
            ("classify_by_class_j.BT", c.bt),
            ("classify_by_class_j.LR", c.lr),
            ("classify_by_class_j.RL", c.rl),
            ("classify_by_class_j.TB", c.tb),
            ("classify_avg_wta_j", self.classify_avg_wta_j),
            (
                "total_per_classification_j",
                self.total_per_classification_j,
            ),
            ("form_j", self.form_j),
            ("reset_j", self.reset_j),
        ];
        match named.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            Some((name, v)) => Err(Error::param(format!("energy constant {name} = {v}"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Phase {
    Form,
    Reset,
    Dac,
    Set,
    Sampling,
    Read,
    Wta,
    Aggregate,
}

impl Phase {
    pub const ALL: [Phase; 8] = [
        Phase::Form,
        Phase::Reset,
        Phase::Dac,
        Phase::Set,
        Phase::Sampling,
        Phase::Read,
        Phase::Wta,
        Phase::Aggregate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Form => "FORM",
            Phase::Reset => "RESET",
            Phase::Dac => "DAC",
            Phase::Set => "SET",
            Phase::Sampling => "SAMPLING",
            Phase::Read => "READ",
            Phase::Wta => "WTA",
            Phase::Aggregate => "AGGREGATE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub phase: Phase,
    pub label: String,
    pub energy_j: f64,
}

/// An ordered list of energy entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    entries: Vec<LedgerEntry>,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, phase: Phase, label: impl Into<String>, energy_j: f64) -> Result<()> {
        let label = label.into();
        if !(energy_j.is_finite() && energy_j >= 0.0) {
            return Err(Error::param(format!(
                "ledger entry {label:?} has energy {energy_j} J"
            )));
        }
        self.entries.push(LedgerEntry {
            phase,
            label,
            energy_j,
        });
        Ok(())
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.energy_j).sum()
    }

    /// Per-phase sums for phases that have entries, in [`Phase::ALL`] order.
    pub fn subtotals(&self) -> Vec<(Phase, f64)> {
        Phase::ALL
            .iter()
            .filter_map(|&p| {
                let mut it = self.entries.iter().filter(|e| e.phase == p).peekable();
                it.peek()?;
                Some((p, it.map(|e| e.energy_j).sum()))
            })
            .collect()
    }

    /// Appends the entries of `other`.
    pub fn merge(&mut self, other: EnergyLedger) {
        self.entries.extend(other.entries);
    }
}

impl Serialize for EnergyLedger {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Subtotal {
            phase: Phase,
            energy_j: f64,
        }
        let subtotals: Vec<Subtotal> = self
            .subtotals()
            .into_iter()
            .map(|(phase, energy_j)| Subtotal { phase, energy_j })
            .collect();
        let mut st = s.serialize_struct("EnergyLedger", 3)?;
        st.serialize_field("entries", &self.entries)?;
        st.serialize_field("subtotals", &subtotals)?;
        st.serialize_field("total_j", &self.total())?;
        st.end()
    }
}

/// DAC drive and SET pulses for programming one class column.
pub fn mapping_energy(class: MotionClass, k: &EnergyConstants) -> Result<EnergyLedger> {
    let mut l = EnergyLedger::new();
    if k.form_j > 0.0 {
        l.push(Phase::Form, format!("{class} column FORM"), k.form_j)?;
    }
    if k.reset_j > 0.0 {
        l.push(Phase::Reset, format!("{class} column RESET"), k.reset_j)?;
    }
    l.push(
        Phase::Dac,
        format!("{class} column DAC drive"),
        k.dac_per_column_j,
    )?;
    l.push(
        Phase::Set,
        format!("{class} column SET pulses"),
        k.set_per_column_j,
    )?;
    Ok(l)
}

/// Crossbar read and WTA for one class, sampling, and the residual up to
/// the quoted per-classification total.
pub fn classification_energy(class: MotionClass, k: &EnergyConstants) -> Result<EnergyLedger> {
    let read_wta = k.classify_by_class_j.get(class);
    let residual = k.total_per_classification_j - read_wta - k.sampling_per_class_j;
    if residual < -1e-21 {
        return Err(Error::param(format!(
            "classification total {} J is below its parts",
            k.total_per_classification_j
        )));
    }
    let mut l = EnergyLedger::new();
    l.push(Phase::Wta, format!("{class} crossbar read + WTA"), read_wta)?;
    l.push(
        Phase::Sampling,
        format!("{class} sampling"),
        k.sampling_per_class_j,
    )?;
    l.push(Phase::Aggregate, RESIDUAL_LABEL, residual.max(0.0))?;
    Ok(l)
}

/// What a run did, for [`energy_report`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunDescription {
    pub mappings: Vec<MotionClass>,
    pub classifications: Vec<MotionClass>,
}

pub fn energy_report(run: &RunDescription, k: &EnergyConstants) -> Result<EnergyLedger> {
    let mut l = EnergyLedger::new();
    for &c in &run.mappings {
        l.merge(mapping_energy(c, k)?);
    }
    for &c in &run.classifications {
        l.merge(classification_energy(c, k)?);
    }
    Ok(l)
}

/// Formats joules with an SI prefix and four significant figures.
pub fn format_si(joules: f64) -> String {
    const PREFIXES: [(f64, &str); 6] = [
        (1.0, ""),
        (1e-3, "m"),
        (1e-6, "µ"),
        (1e-9, "n"),
        (1e-12, "p"),
        (1e-15, "f"),
    ];
    if joules == 0.0 {
        return String::from("0 J");
    }
    let mag = joules.abs();
    let (scale, prefix) = PREFIXES
        .iter()
        .copied()
        .find(|&(s, _)| mag >= s * (1.0 - 1e-12))
        .unwrap_or(PREFIXES[PREFIXES.len() - 1]);
    let v = joules / scale;
    let decimals = if v.abs() >= 100.0 {
        1
    } else if v.abs() >= 10.0 {
        2
    } else {
        3
    };
    format!("{v:.decimals$} {prefix}J")
}
