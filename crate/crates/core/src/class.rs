// SPDX-License-Identifier: Apache-2.0
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The four hand-sweep directions, in crossbar column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MotionClass {
    #[serde(rename = "BT")]
    BottomToTop,
    #[serde(rename = "LR")]
    LeftToRight,
    #[serde(rename = "RL")]
    RightToLeft,
    #[serde(rename = "TB")]
    TopToBottom,
}

impl MotionClass {
    pub const ALL: [MotionClass; 4] = [
        MotionClass::BottomToTop,
        MotionClass::LeftToRight,
        MotionClass::RightToLeft,
        MotionClass::TopToBottom,
    ];

    pub fn code(self) -> &'static str {
        match self {
            MotionClass::BottomToTop => "BT",
            MotionClass::LeftToRight => "LR",
            MotionClass::RightToLeft => "RL",
            MotionClass::TopToBottom => "TB",
        }
    }

    /// Column this class occupies in the reference crossbar layout.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// True for sweeps along the column axis (LR, RL).
    pub fn is_horizontal(self) -> bool {
        matches!(self, MotionClass::LeftToRight | MotionClass::RightToLeft)
    }
}

impl fmt::Display for MotionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for MotionClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "BT" => Ok(MotionClass::BottomToTop),
            "LR" => Ok(MotionClass::LeftToRight),
            "RL" => Ok(MotionClass::RightToLeft),
            "TB" => Ok(MotionClass::TopToBottom),
            other => Err(Error::param(alloc::format!(
                "unknown motion class `{other}` (expected BT, LR, RL or TB)"
            ))),
        }
    }
}
