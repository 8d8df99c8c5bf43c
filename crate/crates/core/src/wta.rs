// SPDX-License-Identifier: Apache-2.0
//! Winner-take-all readout over column currents.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::class::MotionClass;
use crate::crossbar::ColumnCurrents;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub winner: Option<MotionClass>,
    pub winner_index: usize,
    pub currents: ColumnCurrents,
    /// `(I_max - I_second) / I_max`.
    pub relative_margin: f64,
    /// The two largest currents are exactly equal.
    pub tie: bool,
}

/// Index of the largest current (lowest index on ties) and of the runner-up.
fn top_two(currents: &[f64]) -> (usize, usize) {
    let mut best = 0;
    for (i, &v) in currents.iter().enumerate().skip(1) {
        if v > currents[best] {
            best = i;
        }
    }
    let second = (0..currents.len())
        .filter(|&i| i != best)
        .fold(None, |acc: Option<usize>, i| match acc {
            Some(j) if currents[j] >= currents[i] => Some(j),
            _ => Some(i),
        })
        .expect("at least two columns");
    (best, second)
}

pub fn classify(c: &ColumnCurrents) -> Result<ClassificationResult> {
    if c.len() < 2 {
        return Err(Error::param("winner-take-all needs at least two columns"));
    }
    let i = c.currents();
    let (best, second) = top_two(i);
    let (imax, i2) = (i[best], i[second]);
    let relative_margin = if imax > 0.0 {
        ((imax - i2) / imax).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(ClassificationResult {
        winner: c.label(best),
        winner_index: best,
        currents: c.clone(),
        relative_margin,
        tie: imax == i2,
    })
}

/// Whether shifting the winner down by `d` and every other column up by `u`
/// (both fractions) changes the argmax, ties going to the lower index.
pub fn shift_flips(currents: &[f64], winner: usize, d: f64, u: f64) -> bool {
    let w = (1.0 - d) * currents[winner];
    currents.iter().enumerate().any(|(k, &ik)| {
        if k == winner {
            return false;
        }
        let lk = (1.0 + u) * ik;
        lk > w || (lk == w && k < winner)
    })
}

/// Every `(d, u)` percentage pair from `levels` under which a deterministic
/// shift flips the winner. Pairs come out in `levels` order, `d` outermost.
pub fn failure_frontier(c: &ColumnCurrents, levels: &[f64]) -> Result<Vec<(f64, f64)>> {
    let r = classify(c)?;
    if r.tie {
        let (a, b) = top_two(c.currents());
        return Err(Error::Tie {
            columns: (a.min(b), a.max(b)),
        });
    }
    let mut out = Vec::new();
    for &d in levels {
        for &u in levels {
            if shift_flips(c.currents(), r.winner_index, d / 100.0, u / 100.0) {
                out.push((d, u));
            }
        }
    }
    Ok(out)
}
