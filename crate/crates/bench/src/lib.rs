//! File formats, the run/bench harness, and the `iusv` command line on top of
//! [`iusv_core`].

pub mod bench;
pub mod error;
pub mod files;
pub mod ingest;
pub mod report;
pub mod run;

pub use error::{Error, Result};
