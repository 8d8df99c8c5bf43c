// SPDX-License-Identifier: Apache-2.0
//! Argument parsing and dispatch. Flags override values from `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use photomem_core::energy::RunDescription;
use photomem_core::{
    Competitors, Interpretation, MotionClass, NoiseMode, ProgrammingPath, Readout,
};

use crate::commands::{self, to_json, ClassifyInput, GenerateArgs};
use crate::config::RunConfig;
use crate::error::Result;
use crate::formats;

#[derive(Debug, Parser)]
#[command(
    name = "photomem",
    version,
    about = "Photovoltaic motion sensing into a memristor crossbar, simulated"
)]
pub struct Cli {
    /// TOML run configuration; defaults reproduce the reference setup.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for written files (overrides `output_dir`).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Crossbar readout (overrides `crossbar.readout`).
    #[arg(long, global = true, value_enum)]
    pub readout: Option<ReadoutArg>,
    /// Programming path (overrides `crossbar.programming`).
    #[arg(long, global = true, value_enum)]
    pub programming: Option<ProgrammingArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a hand sweep and write its waveform.
    Generate {
        #[arg(long, default_value = "LR")]
        direction: MotionClass,
        #[arg(long)]
        speed: Option<f64>,
        /// Occluder extent along x, metres.
        #[arg(long)]
        occluder_width: Option<f64>,
        /// Occluder extent along y, metres.
        #[arg(long)]
        occluder_height: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample a waveform CSV at the eight read instants.
    Sample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        label: Option<MotionClass>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Program labelled sample vectors into a fresh crossbar and dump its state.
    Map {
        /// Sample-vector CSV; the embedded reference set when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify waveforms or sample vectors against a mapped crossbar.
    Classify {
        /// Waveform or sample-vector CSV.
        #[arg(long, conflicts_with = "class")]
        input: Option<PathBuf>,
        /// Classify one embedded reference vector.
        #[arg(long)]
        class: Option<MotionClass>,
        /// Select the row with this label from a sample-vector file.
        #[arg(long, requires = "input")]
        label: Option<MotionClass>,
        /// Crossbar dump from `map`; the reference set is mapped in-process when omitted.
        #[arg(long)]
        crossbar: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Perturb column currents and report which classifications flip.
    SweepNoise(SweepArgs),
    /// Energy ledger for a run of mappings and classifications.
    Energy {
        /// Classes to map, comma separated (`none` for no mappings). Default: all four.
        #[arg(long, value_delimiter = ',')]
        map: Option<Vec<ClassOrNone>>,
        /// Classes to classify, comma separated (`none` for none). Default: all four.
        #[arg(long, value_delimiter = ',')]
        classify: Option<Vec<ClassOrNone>>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Regenerate the reference tables and compare them cell by cell.
    ReplayTables {
        /// Also write the embedded calibration and replay tables here.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Print the JSON report instead of the matrix.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub interpretation: Option<InterpretationArg>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Noise levels in percent, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub competitors: Option<CompetitorsArg>,
    #[arg(long)]
    pub variants: Option<u8>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub crossbar: Option<PathBuf>,
    /// Sample-vector CSV; the embedded reference set when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReadoutArg {
    Model,
    Replay,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProgrammingArg {
    Direct,
    Quantized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InterpretationArg {
    Frontier,
    Paper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Deterministic,
    Gaussian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CompetitorsArg {
    Each,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassOrNone {
    Class(MotionClass),
    None,
}

impl std::str::FromStr for ClassOrNone {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(ClassOrNone::None);
        }
        s.parse::<MotionClass>()
            .map(ClassOrNone::Class)
            .map_err(|e| e.to_string())
    }
}

fn classes(list: Option<Vec<ClassOrNone>>) -> Vec<MotionClass> {
    match list {
        None => MotionClass::ALL.to_vec(),
        Some(l) => l
            .into_iter()
            .filter_map(|c| match c {
                ClassOrNone::Class(c) => Some(c),
                ClassOrNone::None => None,
            })
            .collect(),
    }
}

impl Cli {
    /// Configuration with command-line overrides applied.
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        if let Some(d) = &self.out_dir {
            cfg.output_dir = d.clone();
        }
        if let Some(r) = self.readout {
            cfg.crossbar.readout = match r {
                ReadoutArg::Model => Readout::Model,
                ReadoutArg::Replay => Readout::Replay,
            };
        }
        if let Some(p) = self.programming {
            cfg.crossbar.programming = match p {
                ProgrammingArg::Direct => ProgrammingPath::Direct,
                ProgrammingArg::Quantized => ProgrammingPath::Quantized,
            };
        }
        if let Command::SweepNoise(a) = &self.command {
            let s = &mut cfg.sweep;
            if let Some(i) = a.interpretation {
                s.interpretation = match i {
                    InterpretationArg::Frontier => Interpretation::Frontier,
                    InterpretationArg::Paper => Interpretation::Paper,
                };
            }
            if let Some(m) = a.mode {
                s.mode = match m {
                    ModeArg::Deterministic => NoiseMode::Deterministic,
                    ModeArg::Gaussian => NoiseMode::Gaussian,
                };
            }
            if let Some(c) = a.competitors {
                s.competitors = match c {
                    CompetitorsArg::Each => Competitors::Each,
                    CompetitorsArg::All => Competitors::All,
                };
            }
            if let Some(l) = &a.levels {
                s.levels = l.clone();
            }
            if let Some(v) = a.variants {
                s.variants = v;
            }
            if let Some(seed) = a.seed {
                s.seed = seed;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Runs the command and returns what goes to stdout.
    pub fn run(self) -> Result<String> {
        let cfg = self.run_config()?;
        match self.command {
            Command::Generate {
                direction,
                speed,
                occluder_width,
                occluder_height,
                output,
            } => {
                let args = GenerateArgs {
                    direction: Some(direction),
                    speed_m_s: speed,
                    occluder_x_m: occluder_width,
                    occluder_y_m: occluder_height,
                    output,
                };
                Ok(to_json(&commands::generate(&cfg, &args)?))
            }
            Command::Sample {
                input,
                label,
                output,
            } => Ok(to_json(&commands::sample(
                &cfg,
                &input,
                label,
                output.as_deref(),
            )?)),
            Command::Map { input, output } => Ok(to_json(&commands::map(
                &cfg,
                input.as_deref(),
                output.as_deref(),
            )?)),
            Command::Classify {
                input,
                class,
                label,
                crossbar,
                output,
            } => {
                let what = match (input, class) {
                    (Some(p), _) => ClassifyInput::File(p, label),
                    (None, Some(c)) => ClassifyInput::Class(c),
                    (None, None) => ClassifyInput::Reference,
                };
                Ok(to_json(&commands::classify(
                    &cfg,
                    &what,
                    crossbar.as_deref(),
                    output.as_deref(),
                )?))
            }
            Command::SweepNoise(a) => Ok(to_json(&commands::sweep(
                &cfg,
                &cfg.sweep,
                a.crossbar.as_deref(),
                a.input.as_deref(),
            )?)),
            Command::Energy {
                map,
                classify,
                format,
            } => {
                let run = RunDescription {
                    mappings: classes(map),
                    classifications: classes(classify),
                };
                let report = commands::energy(&cfg, &run)?;
                Ok(match format {
                    Format::Json => to_json(&report),
                    Format::Csv => formats::ledger_to_csv(&report.ledger),
                })
            }
            Command::ReplayTables { export, json } => {
                let report = commands::replay_tables(&cfg, export.as_deref())?;
                Ok(if json {
                    to_json(&report)
                } else {
                    report.render()
                })
            }
        }
    }
}
