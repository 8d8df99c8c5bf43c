// SPDX-License-Identifier: Apache-2.0
//! Run configuration, read from TOML. Every field has a default, so an empty
//! file (or no file) reproduces the reference pipeline.

use std::fmt;
use std::path::{Path, PathBuf};

use photomem_core::energy::EnergyConstants;
use photomem_core::pipeline::READ_THRESHOLD_V;
use photomem_core::surface::{default_kernel, SurfaceLayout};
use photomem_core::{
    dataset, Crossbar, DeviceCurves, LifecycleParams, MotionClass, MotionTrajectory, Occluder,
    PhotodiodeModel, PolarityMatrix, ProgrammingPath, Readout, SamplingPlan, SensingSurface,
    SweepConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::formats;

/// The shipped default configuration file.
pub const DEFAULT_TOML: &str = include_str!("../config/default.toml");

/// Where a table comes from: the built-in data set or a CSV file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Source {
    #[default]
    Embedded,
    File(PathBuf),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Embedded => f.write_str("embedded"),
            Source::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for Source {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Source {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(if s == "embedded" {
            Source::Embedded
        } else {
            Source::File(PathBuf::from(s))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceConfig {
    pub kernel: Vec<Vec<i8>>,
    pub illuminance_lux: f64,
    /// Overrides the illuminance-derived cell voltage.
    pub v_cell_v: Option<f64>,
    pub pitch_m: f64,
    pub cell_size_m: f64,
    pub invert_output: bool,
    pub response_tau_ms: Option<f64>,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        let layout = SurfaceLayout::default();
        Self {
            kernel: default_kernel().to_rows(),
            illuminance_lux: 850.0,
            v_cell_v: None,
            pitch_m: layout.pitch_m,
            cell_size_m: layout.cell_size_m,
            invert_output: true,
            response_tau_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionConfig {
    pub speed_m_s: f64,
    pub height_m: f64,
    pub start_time_ms: f64,
    pub duration_ms: f64,
    pub sample_rate_hz: f64,
    pub occluder: Occluder,
}

impl Default for MotionConfig {
    fn default() -> Self {
        let t = MotionTrajectory::new(MotionClass::LeftToRight);
        Self {
            speed_m_s: t.speed_m_s,
            height_m: t.height_m,
            start_time_ms: t.start_time_ms,
            duration_ms: t.duration_ms,
            sample_rate_hz: 1000.0,
            occluder: t.occluder,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceConfig {
    /// `v_set_v,resistance_ohm` table.
    pub program_curve: Source,
    /// `resistance_ohm,current_a` table.
    pub read_curve: Source,
    pub standby_current_a: f64,
    pub v_read_v: f64,
    pub lifecycle: LifecycleParams,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            program_curve: Source::Embedded,
            read_curve: Source::Embedded,
            standby_current_a: 51.0e-9,
            v_read_v: 0.6,
            lifecycle: LifecycleParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossbarConfig {
    pub readout: Readout,
    pub programming: ProgrammingPath,
    /// `row,col,current_a` table used by the replay readout.
    pub replay_table: Source,
    pub read_threshold_v: f64,
}

impl Default for CrossbarConfig {
    fn default() -> Self {
        Self {
            readout: Readout::Replay,
            programming: ProgrammingPath::Direct,
            replay_table: Source::Embedded,
            read_threshold_v: READ_THRESHOLD_V,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub surface: SurfaceConfig,
    pub motion: MotionConfig,
    pub sampling: SamplingPlan,
    pub device: DeviceConfig,
    pub crossbar: CrossbarConfig,
    pub energy: EnergyConstants,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            surface: SurfaceConfig::default(),
            motion: MotionConfig::default(),
            sampling: SamplingPlan::default(),
            device: DeviceConfig::default(),
            crossbar: CrossbarConfig::default(),
            energy: EnergyConstants::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config {
            path: origin.display().to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path`, or returns the defaults when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                let mut cfg = Self::from_toml(&text, p)?;
                cfg.rebase(p.parent().unwrap_or(Path::new(".")));
                Ok(cfg)
            }
        }
    }

    /// Resolves relative table paths against the config file's directory.
    fn rebase(&mut self, dir: &Path) {
        for s in [
            &mut self.device.program_curve,
            &mut self.device.read_curve,
            &mut self.crossbar.replay_table,
        ] {
            if let Source::File(p) = s {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.surface()?.validate()?;
        self.sampling.validate()?;
        self.energy.validate()?;
        self.sweep.validate()?;
        if self.motion.sample_rate_hz.is_nan() || self.motion.sample_rate_hz <= 0.0 {
            return Err(CliError::Parameter(
                "motion.sample_rate_hz must be positive".into(),
            ));
        }
        if self.device.standby_current_a.is_nan() || self.device.standby_current_a <= 0.0 {
            return Err(CliError::Parameter(
                "device.standby_current_a must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn photodiode(&self) -> Result<PhotodiodeModel> {
        let s = &self.surface;
        let mut pv = match s.v_cell_v {
            Some(v) => PhotodiodeModel::new(v, s.illuminance_lux)?,
            None => PhotodiodeModel::at_illuminance(s.illuminance_lux)?,
        };
        pv.response_tau_ms = s.response_tau_ms;
        pv.validate()?;
        Ok(pv)
    }

    pub fn surface(&self) -> Result<SensingSurface> {
        let kernel = PolarityMatrix::from_rows(&self.surface.kernel)?;
        let mut surface = SensingSurface::new(kernel, self.photodiode()?);
        surface.layout = SurfaceLayout {
            pitch_m: self.surface.pitch_m,
            cell_size_m: self.surface.cell_size_m,
        };
        surface.invert_output = self.surface.invert_output;
        surface.validate()?;
        Ok(surface)
    }

    pub fn trajectory(&self, direction: MotionClass) -> MotionTrajectory {
        let m = &self.motion;
        MotionTrajectory {
            direction,
            speed_m_s: m.speed_m_s,
            height_m: m.height_m,
            occluder: m.occluder,
            start_time_ms: m.start_time_ms,
            duration_ms: m.duration_ms,
        }
    }

    pub fn device_curves(&self) -> Result<DeviceCurves> {
        let d = &self.device;
        let program = match &d.program_curve {
            Source::Embedded => dataset::PROGRAM_POINTS.to_vec(),
            Source::File(p) => formats::read_program_curve(p)?,
        };
        let read = match &d.read_curve {
            Source::Embedded => dataset::READ_POINTS.to_vec(),
            Source::File(p) => formats::read_read_curve(p)?,
        };
        let mut curves = DeviceCurves::from_calibration(&program, &read, d.lifecycle)?;
        curves.standby_current_a = d.standby_current_a;
        curves.v_read = d.v_read_v;
        Ok(curves)
    }

    /// Formed and reset crossbar with the configured readout. Rows follow the
    /// sampling plan, columns the four motion classes.
    pub fn blank_crossbar(&self) -> Result<Crossbar> {
        let mut x = Crossbar::new(
            self.sampling.count,
            MotionClass::ALL.len(),
            self.device_curves()?,
        )?;
        x.form_all()?;
        x.reset_all()?;
        self.configure(x)
    }

    /// Attaches the replay table and applies readout and programming settings.
    pub fn configure(&self, mut x: Crossbar) -> Result<Crossbar> {
        let table = match &self.crossbar.replay_table {
            Source::Embedded => dataset::replay_table(),
            Source::File(p) => formats::read_replay_table(p)?,
        };
        if (table.rows(), table.cols()) == (x.rows(), x.cols()) {
            x = x.with_replay(table)?;
        }
        x.set_readout(self.crossbar.readout)?;
        x.set_programming_path(self.crossbar.programming);
        Ok(x)
    }
}
