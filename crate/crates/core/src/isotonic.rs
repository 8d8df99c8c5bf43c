// SPDX-License-Identifier: Apache-2.0
//! Pool-adjacent-violators regression and monotone piecewise-linear curves.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

/// Weighted least-squares isotonic fit of `ys` (in the given order).
pub fn isotonic(ys: &[f64], weights: &[f64], direction: Direction) -> Vec<f64> {
    assert_eq!(ys.len(), weights.len());
    let sign = match direction {
        Direction::NonDecreasing => 1.0,
        Direction::NonIncreasing => -1.0,
    };
    // blocks of (weighted mean, total weight, length), fitted as non-decreasing
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(ys.len());
    for (&y, &w) in ys.iter().zip(weights) {
        blocks.push((sign * y, w, 1));
        while blocks.len() > 1 {
            let n = blocks.len();
            let (m2, w2, l2) = blocks[n - 1];
            let (m1, w1, l1) = blocks[n - 2];
            if m1 <= m2 {
                break;
            }
            let w = w1 + w2;
            blocks.truncate(n - 2);
            blocks.push(((m1 * w1 + m2 * w2) / w, w, l1 + l2));
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, _, len)| core::iter::repeat_n(sign * m, len))
        .collect()
}

/// Axis transform applied before fitting and interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    fn forward(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log => libm::log(v),
        }
    }

    fn inverse(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log => libm::exp(v),
        }
    }
}

/// A calibration table with its monotone fit.
///
/// Evaluating exactly at a calibration abscissa returns the stored ordinate;
/// anywhere else the isotonic fit is interpolated linearly in the
/// transformed axes and held constant beyond the end points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCurve {
    raw: Vec<(f64, f64)>,
    knots_x: Vec<f64>,
    knots_y: Vec<f64>,
    x_scale: Scale,
    y_scale: Scale,
    direction: Direction,
}

/// Abscissas closer than this are treated as the same calibration point.
const KNOT_TOLERANCE: f64 = 1.0e-9;

impl MonotoneCurve {
    pub fn fit(
        points: &[(f64, f64)],
        direction: Direction,
        x_scale: Scale,
        y_scale: Scale,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("calibration table is empty"));
        }
        let mut raw = points.to_vec();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in raw.windows(2) {
            if pair[1].0 - pair[0].0 <= KNOT_TOLERANCE {
                return Err(Error::param(format!(
                    "duplicate calibration abscissa {}",
                    pair[0].0
                )));
            }
        }
        for &(x, y) in &raw {
            let bad_log = |s: Scale, v: f64| s == Scale::Log && !(v > 0.0);
            if !x.is_finite() || !y.is_finite() || bad_log(x_scale, x) || bad_log(y_scale, y) {
                return Err(Error::param(format!(
                    "calibration point ({x}, {y}) unusable"
                )));
            }
        }
        let knots_x: Vec<f64> = raw.iter().map(|p| x_scale.forward(p.0)).collect();
        let ty: Vec<f64> = raw.iter().map(|p| y_scale.forward(p.1)).collect();
        let knots_y = isotonic(&ty, &alloc::vec![1.0; ty.len()], direction);
        Ok(Self {
            raw,
            knots_x,
            knots_y,
            x_scale,
            y_scale,
            direction,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Calibration points, sorted by abscissa.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.raw
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.raw[0].0, self.raw[self.raw.len() - 1].0)
    }

    /// Stored ordinate when `x` is a calibration abscissa, fitted value otherwise.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.raw.partition_point(|p| p.0 < x - KNOT_TOLERANCE);
        if let Some(&(px, py)) = self.raw.get(idx) {
            if (px - x).abs() <= KNOT_TOLERANCE {
                return py;
            }
        }
        self.fitted(x)
    }

    /// The monotone fit alone.
    pub fn fitted(&self, x: f64) -> f64 {
        let tx = self.x_scale.forward(x);
        let n = self.knots_x.len();
        let ty = if n == 1 || tx <= self.knots_x[0] {
            self.knots_y[0]
        } else if tx >= self.knots_x[n - 1] {
            self.knots_y[n - 1]
        } else {
            let i = self.knots_x.partition_point(|&k| k <= tx);
            let (x0, x1) = (self.knots_x[i - 1], self.knots_x[i]);
            let (y0, y1) = (self.knots_y[i - 1], self.knots_y[i]);
            y0 + (tx - x0) / (x1 - x0) * (y1 - y0)
        };
        self.y_scale.inverse(ty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn pava_pools_violators() {
        let fit = isotonic(&[1.0, 3.0, 2.0, 4.0], &[1.0; 4], Direction::NonDecreasing);
        assert_eq!(fit, alloc::vec![1.0, 2.5, 2.5, 4.0]);
        let fit = isotonic(&[5.827, 5.828, 5.825], &[1.0; 3], Direction::NonIncreasing);
        assert_relative_eq!(fit[0], 5.8275, epsilon = 1e-12);
        assert_relative_eq!(fit[1], 5.8275, epsilon = 1e-12);
        assert_eq!(fit[2], 5.825);
    }

    #[test]
    fn curve_returns_raw_at_knots_and_fit_between() {
        let pts = [(1.0, 10.0), (2.0, 12.0), (3.0, 4.0)];
        let c = MonotoneCurve::fit(&pts, Direction::NonIncreasing, Scale::Linear, Scale::Linear)
            .unwrap();
        assert_eq!(c.eval(2.0), 12.0);
        assert_relative_eq!(c.fitted(2.0), 11.0);
        assert_relative_eq!(c.eval(2.5), 7.5);
        assert_eq!(c.eval(0.0), 11.0);
        assert_eq!(c.eval(9.0), 4.0);
    }

    #[test]
    fn duplicate_abscissa_rejected() {
        let pts = [(1.0, 1.0), (1.0, 2.0)];
        assert!(
            MonotoneCurve::fit(&pts, Direction::NonDecreasing, Scale::Linear, Scale::Linear)
                .is_err()
        );
        assert!(MonotoneCurve::fit(
            &[(0.0, 1.0)],
            Direction::NonDecreasing,
            Scale::Log,
            Scale::Linear
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn pava_output_is_monotone_and_mean_preserving(ys in proptest::collection::vec(-10.0f64..10.0, 1..40)) {
            let w = alloc::vec![1.0; ys.len()];
            let fit = isotonic(&ys, &w, Direction::NonDecreasing);
            prop_assert!(fit.windows(2).all(|p| p[0] <= p[1] + 1e-12));
            let (a, b): (f64, f64) = (ys.iter().sum(), fit.iter().sum());
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn fitted_curve_is_monotone(ys in proptest::collection::vec(0.1f64..10.0, 2..20), probe in 0.0f64..25.0) {
            let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64 + 1.0, y)).collect();
            let c = MonotoneCurve::fit(&pts, Direction::NonIncreasing, Scale::Log, Scale::Log).unwrap();
            prop_assert!(c.fitted(probe) >= c.fitted(probe + 0.37) * (1.0 - 1e-12));
        }
    }
}
