//! Experiment suite for the cslab toolkit.

pub mod baseline;
pub mod commands;
pub mod config;
pub mod criteria;
pub mod error;
pub mod experiments;
pub mod io;
pub mod report;
