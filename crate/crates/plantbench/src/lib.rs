//! Files, sweeps, reports and the `plantbench` command line on top of
//! `plantbench-core`.

pub mod bench;
pub mod cli;
mod error;
pub mod io;
pub mod report;

pub use error::{Error, Result};
