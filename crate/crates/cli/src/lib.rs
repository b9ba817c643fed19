//! Command-line front end and what-if HTTP service for the simcda pipeline.

pub mod cli;
pub mod service;
