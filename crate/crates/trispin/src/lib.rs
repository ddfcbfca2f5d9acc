//! File formats, run directories and the command-line driver built on `trispin-core`.

pub mod cli;
pub mod error;
pub mod figure2;
pub mod formats;
pub mod grid;
pub mod numfmt;
pub mod run;

pub use error::{Error, Result};
