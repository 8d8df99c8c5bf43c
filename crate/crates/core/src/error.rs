// SPDX-License-Identifier: Apache-2.0
use alloc::string::String;
use core::fmt;

use crate::device::SynapseMode;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Coarse error category, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parameter,
    Lifecycle,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two grids that must agree in shape do not.
    Dimension {
        what: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A value is outside its admissible range.
    Parameter(String),
    /// The waveform does not cover the requested sampling window.
    Coverage {
        needed_ms: (f64, f64),
        have_ms: (f64, f64),
    },
    /// A programming voltage above the DAC ceiling.
    Overdrive { volts: f64, max: f64 },
    /// An operation that is illegal in the device's current mode.
    Lifecycle {
        op: &'static str,
        mode: SynapseMode,
        row: Option<usize>,
        col: Option<usize>,
    },
    /// Crossbar-level ordering violation (unmapped columns, missing forms).
    NotReady(String),
    /// Two or more columns share the maximum current.
    Tie { columns: (usize, usize) },
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Lifecycle { .. } | Error::NotReady(_) => ErrorKind::Lifecycle,
            _ => ErrorKind::Parameter,
        }
    }

    pub(crate) fn at_cell(self, r: usize, c: usize) -> Self {
        match self {
            Error::Lifecycle { op, mode, .. } => Error::Lifecycle {
                op,
                mode,
                row: Some(r),
                col: Some(c),
            },
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                what,
                expected,
                found,
            } => write!(
                f,
                "{what}: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Coverage { needed_ms, have_ms } => write!(
                f,
                "waveform spans {}..{} ms but sampling needs {}..{} ms",
                have_ms.0, have_ms.1, needed_ms.0, needed_ms.1
            ),
            Error::Overdrive { volts, max } => {
                write!(f, "programming voltage {volts} V exceeds {max} V")
            }
            Error::Lifecycle { op, mode, row, col } => {
                write!(f, "cannot {op} a device in {mode:?} mode")?;
                if let (Some(r), Some(c)) = (row, col) {
                    write!(f, " (row {r}, column {c})")?;
                }
                Ok(())
            }
            Error::NotReady(msg) => write!(f, "crossbar not ready: {msg}"),
            Error::Tie { columns } => write!(
                f,
                "columns {} and {} tie for the maximum current",
                columns.0, columns.1
            ),
        }
    }
}

impl core::error::Error for Error {}
