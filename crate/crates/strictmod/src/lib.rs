//! Command-line front end for `strictmod-core`: module files, reports, and
//! the dispatch of the `strictmod` binary.

pub mod commands;
pub mod format;
pub mod report;

pub use commands::{dispatch, run, Cli, Command, Outcome};
pub use format::{load_module, parse_module, LoadedModule, ModuleFile};
pub use report::{machine_block, Report, MACHINE_MARKER};
