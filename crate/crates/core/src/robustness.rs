// SPDX-License-Identifier: Apache-2.0
//! Noise sweep over column currents.
//!
//! Each scenario lowers the noise-free winning column and raises one or all
//! of the competing columns, then re-runs the winner-take-all stage. A
//! scenario fails when the winner changes.
//!
//! With [`Competitors::Each`] a class gets `levels² × competitors × variants`
//! scenarios, 81 for the default three levels, three competitors and three
//! variants.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::class::MotionClass;
use crate::crossbar::{ColumnCurrents, Crossbar};
use crate::error::{Error, Result};
use crate::pipeline::{activation_mask, SampleVector, READ_THRESHOLD_V};
use crate::wta::{self, classify};

/// Decrease (percent) from which a flip counts under [`Interpretation::Paper`].
pub const REPORTED_FAILURE_DEC_PERCENT: f64 = 5.0;

pub const DEFAULT_LEVELS: [f64; 3] = [1.0, 3.0, 5.0];
pub const DEFAULT_VARIANTS: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Exact percentage shifts; the variant index is inert.
    #[default]
    Deterministic,
    /// Half-normal draws with the level as standard deviation.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpretation {
    /// A scenario fails iff the winner changes.
    #[default]
    Frontier,
    /// A scenario fails iff the winner changes and the winner was lowered by 5%.
    Paper,
}

/// Which losing columns a scenario raises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Competitors {
    /// One scenario per losing column, raising only that column.
    #[default]
    Each,
    /// Every losing column raised together.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseScenario {
    pub signal: MotionClass,
    pub p_dec: f64,
    pub p_inc: f64,
    /// Rank among the losing columns (in column order) of the one column
    /// raised; `None` raises all of them.
    pub competitor: Option<u8>,
    pub variant: u8,
    pub mode: NoiseMode,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub mode: NoiseMode,
    pub interpretation: Interpretation,
    /// Noise levels in percent, used for both the decrease and the increase.
    pub levels: Vec<f64>,
    pub competitors: Competitors,
    pub variants: u8,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: NoiseMode::Deterministic,
            interpretation: Interpretation::Frontier,
            levels: DEFAULT_LEVELS.to_vec(),
            competitors: Competitors::Each,
            variants: DEFAULT_VARIANTS,
            seed: 0x5eed,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::param("noise sweep needs at least one level"));
        }
        if let Some(l) = self
            .levels
            .iter()
            .find(|l| !(l.is_finite() && **l >= 0.0 && **l < 100.0))
        {
            return Err(Error::param(format!("noise level {l}% outside [0, 100)")));
        }
        if self.variants == 0 {
            return Err(Error::param("noise sweep needs at least one variant"));
        }
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn scenario_seed(
    base: u64,
    signal: MotionClass,
    di: usize,
    ui: usize,
    target: u8,
    variant: u8,
) -> u64 {
    let tag = ((signal.index() as u64) << 48)
        | ((di as u64) << 36)
        | ((ui as u64) << 24)
        | ((target as u64) << 12)
        | variant as u64;
    splitmix64(splitmix64(base) ^ tag)
}

/// Cartesian product of decrease level, increase level, raised competitor
/// and variant, for a crossbar with `columns` columns.
pub fn enumerate_scenarios(
    signal: MotionClass,
    columns: usize,
    config: &SweepConfig,
) -> Vec<NoiseScenario> {
    let targets: Vec<Option<u8>> = match config.competitors {
        Competitors::Each => (0..columns.saturating_sub(1) as u8).map(Some).collect(),
        Competitors::All => alloc::vec![None],
    };
    let mut out =
        Vec::with_capacity(config.levels.len().pow(2) * targets.len() * config.variants as usize);
    for (di, &p_dec) in config.levels.iter().enumerate() {
        for (ui, &p_inc) in config.levels.iter().enumerate() {
            for &competitor in &targets {
                for variant in 0..config.variants {
                    let seed = match config.mode {
                        NoiseMode::Deterministic => None,
                        NoiseMode::Gaussian => Some(scenario_seed(
                            config.seed,
                            signal,
                            di,
                            ui,
                            competitor.unwrap_or(0xff),
                            variant,
                        )),
                    };
                    out.push(NoiseScenario {
                        signal,
                        p_dec,
                        p_inc,
                        competitor,
                        variant,
                        mode: config.mode,
                        seed,
                    });
                }
            }
        }
    }
    out
}

/// Lowers the winning column and raises the competitors selected by `s`.
pub fn apply_noise(c: &ColumnCurrents, s: &NoiseScenario) -> Result<ColumnCurrents> {
    let base = classify(c)?;
    if base.tie {
        return Err(Error::param("noise is undefined when the winner is tied"));
    }
    let w = base.winner_index;
    let losers: Vec<usize> = (0..c.len()).filter(|&k| k != w).collect();
    let raised: Vec<usize> = match s.competitor {
        None => losers,
        Some(t) => alloc::vec![*losers.get(t as usize).ok_or_else(|| {
            Error::param(format!(
                "competitor {t} out of range for {} columns",
                c.len()
            ))
        })?],
    };
    let mut out = c.currents().to_vec();
    match s.mode {
        NoiseMode::Deterministic => {
            out[w] *= 1.0 - s.p_dec / 100.0;
            for &k in &raised {
                out[k] *= 1.0 + s.p_inc / 100.0;
            }
        }
        NoiseMode::Gaussian => {
            let seed = s
                .seed
                .ok_or_else(|| Error::param("gaussian scenario without a seed"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dec =
                Normal::new(0.0, s.p_dec / 100.0).map_err(|e| Error::param(format!("{e}")))?;
            let inc =
                Normal::new(0.0, s.p_inc / 100.0).map_err(|e| Error::param(format!("{e}")))?;
            let g0: f64 = dec.sample(&mut rng);
            out[w] *= 1.0 - libm::fabs(g0);
            for &k in &raised {
                let g: f64 = inc.sample(&mut rng);
                out[k] *= 1.0 + libm::fabs(g);
            }
        }
    }
    c.with_currents(out)
}

/// Outcome of one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioOutcome {
    pub scenario: NoiseScenario,
    pub winner_before: usize,
    pub winner_after: usize,
    pub failed: bool,
}

pub fn evaluate_scenario(
    c: &ColumnCurrents,
    s: &NoiseScenario,
    interpretation: Interpretation,
) -> Result<ScenarioOutcome> {
    let before = classify(c)?.winner_index;
    let after = classify(&apply_noise(c, s)?)?.winner_index;
    let flipped = before != after;
    let failed = match interpretation {
        Interpretation::Frontier => flipped,
        Interpretation::Paper => flipped && s.p_dec >= REPORTED_FAILURE_DEC_PERCENT - 1e-9,
    };
    Ok(ScenarioOutcome {
        scenario: *s,
        winner_before: before,
        winner_after: after,
        failed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailingScenario {
    pub class: MotionClass,
    pub p_dec: f64,
    pub p_inc: f64,
    pub competitor: Option<MotionClass>,
    pub variant: u8,
    pub winner_before: Option<MotionClass>,
    pub winner_after: Option<MotionClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: MotionClass,
    pub currents_a: Vec<f64>,
    pub noise_free_winner: Option<MotionClass>,
    pub relative_margin: f64,
    pub scenarios: usize,
    pub failures: usize,
    /// `(p_dec, p_inc)` pairs that flip the winner under a deterministic shift.
    pub frontier: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub mode: NoiseMode,
    pub interpretation: Interpretation,
    pub levels: Vec<f64>,
    pub competitors: Competitors,
    pub variants: u8,
    pub seed: u64,
    pub classes: Vec<ClassSummary>,
    pub total_scenarios: usize,
    pub total_failures: usize,
    pub passes: usize,
    pub accuracy_percent: f64,
    pub failing: Vec<FailingScenario>,
}

/// Sweeps already-computed noise-free currents, one set per signal.
pub fn sweep_currents(
    inputs: &[(MotionClass, ColumnCurrents)],
    config: &SweepConfig,
) -> Result<SweepReport> {
    config.validate()?;
    let mut classes = Vec::with_capacity(inputs.len());
    let mut failing = Vec::new();
    for (signal, currents) in inputs {
        let base = classify(currents)?;
        let frontier = wta::failure_frontier(currents, &config.levels)?;
        let scenarios = enumerate_scenarios(*signal, currents.len(), config);
        let losers: Vec<usize> = (0..currents.len())
            .filter(|&k| k != base.winner_index)
            .collect();
        let mut failures = 0;
        for s in &scenarios {
            let o = evaluate_scenario(currents, s, config.interpretation)?;
            if o.failed {
                failures += 1;
                failing.push(FailingScenario {
                    class: *signal,
                    p_dec: s.p_dec,
                    p_inc: s.p_inc,
                    competitor: s
                        .competitor
                        .and_then(|t| currents.label(losers[t as usize])),
                    variant: s.variant,
                    winner_before: currents.label(o.winner_before),
                    winner_after: currents.label(o.winner_after),
                });
            }
        }
        classes.push(ClassSummary {
            class: *signal,
            currents_a: currents.currents().to_vec(),
            noise_free_winner: base.winner,
            relative_margin: base.relative_margin,
            scenarios: scenarios.len(),
            failures,
            frontier,
        });
    }
    let total_scenarios: usize = classes.iter().map(|c| c.scenarios).sum();
    let total_failures: usize = classes.iter().map(|c| c.failures).sum();
    let passes = total_scenarios - total_failures;
    let accuracy_percent = if total_scenarios == 0 {
        100.0
    } else {
        100.0 * passes as f64 / total_scenarios as f64
    };
    Ok(SweepReport {
        mode: config.mode,
        interpretation: config.interpretation,
        levels: config.levels.clone(),
        competitors: config.competitors,
        variants: config.variants,
        seed: config.seed,
        classes,
        total_scenarios,
        total_failures,
        passes,
        accuracy_percent,
        failing,
    })
}

/// Noise-free column currents of each labelled input on a mapped crossbar.
pub fn noise_free_currents(
    xbar: &Crossbar,
    inputs: &[SampleVector],
) -> Result<Vec<(MotionClass, ColumnCurrents)>> {
    if !xbar.is_fully_mapped() {
        return Err(Error::NotReady(format!(
            "{} of {} columns mapped",
            xbar.labels().iter().filter(|l| l.is_some()).count(),
            xbar.cols()
        )));
    }
    inputs
        .iter()
        .map(|v| {
            let signal = v
                .label()
                .ok_or_else(|| Error::param("sweep input has no class label"))?;
            let mask = activation_mask(v, READ_THRESHOLD_V);
            Ok((signal, xbar.column_currents(&mask)?))
        })
        .collect()
}

pub fn run_sweep(
    xbar: &Crossbar,
    inputs: &[SampleVector],
    config: &SweepConfig,
) -> Result<SweepReport> {
    sweep_currents(&noise_free_currents(xbar, inputs)?, config)
}

/// Fraction of `samples` Gaussian draws at levels `(p_dec, p_inc)` that flip
/// the winner.
pub fn gaussian_failure_rate(
    c: &ColumnCurrents,
    p_dec: f64,
    p_inc: f64,
    samples: u32,
    seed: u64,
) -> Result<f64> {
    let signal = classify(c)?.winner.unwrap_or(MotionClass::BottomToTop);
    let mut failures = 0u32;
    for i in 0..samples {
        let s = NoiseScenario {
            signal,
            p_dec,
            p_inc,
            competitor: None,
            variant: 0,
            mode: NoiseMode::Gaussian,
            seed: Some(splitmix64(seed ^ u64::from(i))),
        };
        if evaluate_scenario(c, &s, Interpretation::Frontier)?.failed {
            failures += 1;
        }
    }
    Ok(if samples == 0 {
        0.0
    } else {
        f64::from(failures) / f64::from(samples)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ua(v: [f64; 4]) -> ColumnCurrents {
        ColumnCurrents::labelled(v.iter().map(|x| x * 1e-6).collect()).unwrap()
    }

    fn det(signal: MotionClass, p_dec: f64, p_inc: f64) -> NoiseScenario {
        NoiseScenario {
            signal,
            p_dec,
            p_inc,
            competitor: None,
            variant: 0,
            mode: NoiseMode::Deterministic,
            seed: None,
        }
    }

    #[test]
    fn enumeration_examples() {
        let cfg = SweepConfig::default();
        let s = enumerate_scenarios(MotionClass::BottomToTop, 4, &cfg);
        assert_eq!(s.len(), 81);
        let mut keys: Vec<_> = s
            .iter()
            .map(|s| (s.p_dec as u8, s.p_inc as u8, s.competitor, s.variant))
            .collect();
        keys.dedup();
        assert_eq!(keys.len(), 81);
        let all = SweepConfig {
            competitors: Competitors::All,
            ..SweepConfig::default()
        };
        assert_eq!(
            enumerate_scenarios(MotionClass::BottomToTop, 4, &all).len(),
            27
        );
        let gauss = SweepConfig {
            mode: NoiseMode::Gaussian,
            ..SweepConfig::default()
        };
        let g = enumerate_scenarios(MotionClass::BottomToTop, 4, &gauss);
        let mut seeds: Vec<u64> = g.iter().map(|s| s.seed.unwrap()).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), g.len());
    }

    #[test]
    fn apply_noise_examples() {
        let lr = ua([10.95, 13.28, 12.55, 10.95]);
        let out = apply_noise(&lr, &det(MotionClass::LeftToRight, 5.0, 1.0)).unwrap();
        assert_abs_diff_eq!(out.currents()[1], 12.616e-6, epsilon = 1e-15);
        let same = apply_noise(&lr, &det(MotionClass::LeftToRight, 0.0, 0.0)).unwrap();
        assert_eq!(same, lr);
        let bt = apply_noise(
            &ua([11.96, 7.428, 7.428, 7.428]),
            &det(MotionClass::BottomToTop, 5.0, 5.0),
        )
        .unwrap();
        for (got, want) in bt.currents().iter().zip([11.362, 7.7994, 7.7994, 7.7994]) {
            assert_abs_diff_eq!(*got, want * 1e-6, epsilon = 1e-15);
        }
        assert_eq!(classify(&bt).unwrap().winner_index, 0);
        assert!(apply_noise(
            &ua([1.0, 1.0, 0.5, 0.5]),
            &det(MotionClass::BottomToTop, 1.0, 1.0)
        )
        .is_err());
        let single = NoiseScenario {
            competitor: Some(1),
            ..det(MotionClass::LeftToRight, 5.0, 1.0)
        };
        // losers of LR are columns 0, 2, 3; rank 1 is column 2
        let out = apply_noise(&lr, &single).unwrap();
        assert_eq!(out.currents()[0], lr.currents()[0]);
        assert_abs_diff_eq!(out.currents()[2], 12.6755e-6, epsilon = 1e-15);
        assert!(apply_noise(
            &lr,
            &NoiseScenario {
                competitor: Some(3),
                ..single
            }
        )
        .is_err());
    }

    #[test]
    fn gaussian_noise_keeps_direction() {
        let c = ua([23.75, 24.72, 26.83, 21.49]);
        let s = NoiseScenario {
            signal: MotionClass::RightToLeft,
            p_dec: 5.0,
            p_inc: 5.0,
            competitor: None,
            variant: 1,
            mode: NoiseMode::Gaussian,
            seed: Some(42),
        };
        let out = apply_noise(&c, &s).unwrap();
        assert!(out.currents()[2] <= c.currents()[2]);
        for k in [0, 1, 3] {
            assert!(out.currents()[k] >= c.currents()[k]);
        }
        assert_eq!(apply_noise(&c, &s).unwrap(), out);
    }

    #[test]
    fn level_one_never_fails() {
        let inputs = [
            (MotionClass::LeftToRight, ua([10.95, 13.28, 12.55, 10.95])),
            (MotionClass::RightToLeft, ua([23.75, 24.72, 26.83, 21.49])),
        ];
        let cfg = SweepConfig {
            levels: alloc::vec![1.0],
            ..SweepConfig::default()
        };
        let r = sweep_currents(&inputs, &cfg).unwrap();
        assert_eq!((r.total_failures, r.accuracy_percent), (0, 100.0));
    }

    #[test]
    fn gaussian_rate_tracks_frontier() {
        // BT sits far from its frontier, LR at (5,5) sits inside it
        let bt =
            gaussian_failure_rate(&ua([11.96, 7.428, 7.428, 7.428]), 5.0, 5.0, 400, 7).unwrap();
        let lr =
            gaussian_failure_rate(&ua([10.95, 13.28, 12.55, 10.95]), 5.0, 5.0, 400, 7).unwrap();
        assert_eq!(bt, 0.0);
        assert!(lr > 0.2);
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            SweepConfig {
                levels: alloc::vec![],
                ..SweepConfig::default()
            },
            SweepConfig {
                levels: alloc::vec![-1.0],
                ..SweepConfig::default()
            },
            SweepConfig {
                variants: 0,
                ..SweepConfig::default()
            },
        ] {
            assert!(cfg.validate().is_err());
        }
    }
}
