//! Library side of the `opq` command: configuration, verification suites,
//! scan and table commands, and their CSV/JSON rendering.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod suites;

pub use config::{CommandKind, ConfigLayer, Format, RunConfig};
pub use error::OpqError;
