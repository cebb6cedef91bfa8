//! Library side of the `fracroot` command: configuration, reports and the
//! subcommands themselves.

pub mod commands;
pub mod config;
pub mod report;
