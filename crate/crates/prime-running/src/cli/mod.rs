//! CLI surface: argument grammar, output formats, checkpoint persistence.

pub mod checkpoint;
pub mod config;
pub mod output;
