//! Library side of the `tsallis` binary: config parsing, dispatch, tables.

pub mod config;
pub mod io;
pub mod run;
pub mod table;

pub use config::{parse_config, Cli, Command, Format, Measure, RoofKind, RunConfig};
pub use run::{execute, run, ReportRecord};
pub use table::{emit_table, parse_table, Row};
