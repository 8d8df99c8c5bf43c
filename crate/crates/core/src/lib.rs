// SPDX-License-Identifier: Apache-2.0
//! Behavioral model of an in-sensor motion recognizer.
//!
//! A photovoltaic sensing surface turns a hand sweep into a single analog
//! waveform. The waveform is sampled into eight amplitudes, each amplitude
//! programs one HfO2 synapse of a crossbar column, and at test time the
//! column read currents are ranked by a winner-take-all stage. The crate also
//! carries the energy bookkeeping for mapping and classification and a noise
//! sweep over column currents.
//!
//! The crate is `no_std` (with `alloc`) so the whole pipeline can run on the
//! same microcontroller class that would drive the real peripherals. File
//! formats, configuration and the command line live in the `photomem` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod class;
pub mod crossbar;
pub mod dataset;
pub mod device;
pub mod energy;
pub mod error;
pub mod isotonic;
pub mod pipeline;
pub mod robustness;
pub mod surface;
pub mod wta;

pub use class::MotionClass;
pub use crossbar::{ColumnCurrents, Crossbar, ProgrammingPath, Readout, ReplayTable};
pub use device::{DeviceCurves, LifecycleParams, SynapseMode, SynapseState};
pub use energy::{EnergyConstants, EnergyLedger, Phase};
pub use error::{Error, ErrorKind, Result};
pub use pipeline::{DacCode, RowActivation, SampleVector, SamplingPlan};
pub use robustness::{
    Competitors, Interpretation, NoiseMode, NoiseScenario, SweepConfig, SweepReport,
};
pub use surface::{
    MotionTrajectory, Occluder, OcclusionGrid, PhotodiodeModel, PolarityMatrix, SensingSurface,
    Waveform, WaveformSource,
};
pub use wta::ClassificationResult;
