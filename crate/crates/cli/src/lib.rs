//! Experiment harness and plot emission for the command-line front end.

pub mod experiment;
pub mod svg;
