//! Command-line front end: grammar/tree file formats, DOT export, and the
//! subcommand implementations behind the `mvg` binary.

pub mod commands;
pub mod dot;
pub mod format;
pub mod treefile;
