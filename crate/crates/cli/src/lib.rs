//! Command-line driver for `dgquot` and the `.dgcat` category file format.

pub mod commands;
pub mod format;
pub mod report;

pub use commands::{run, Cli, CliError, Outcome, OutputFormat, INPUT_ERROR};
pub use format::{parse, render, CategoryFile, ParseError, Presented};
