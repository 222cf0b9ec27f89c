//! Command-line tools and file formats around `trajeval-core`: TUM
//! trajectory IO, JSON evaluation records, TOML report configs, SVG plots
//! and the `trajeval` binary.

pub mod cli;
pub mod config;
pub mod evaluate;
pub mod plot;
pub mod record;
pub mod report;
pub mod tum;
