// SPDX-License-Identifier: Apache-2.0
//! Command line, configuration and file formats around `photomem-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use config::RunConfig;
pub use error::{CliError, Result};
