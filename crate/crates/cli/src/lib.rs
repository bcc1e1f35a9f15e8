//! Library backing the `ptsim` command-line tool: configuration parsing and
//! command execution, kept separate from the binary for testability.

pub mod config;
pub mod run;
