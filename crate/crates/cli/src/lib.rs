//! Text formats and the `hga` command line.

pub mod cli;
pub mod format;

pub use cli::run;
