//! Profile HMM training and inference with the Baum-Welch algorithm.
//!
//! * [`model`] builds, validates and serializes graphs,
//! * [`engine`] runs forward, backward and parameter updates,
//! * [`filter`] selects the states worth keeping per timestamp,
//! * [`perf`] estimates accelerator cycles for a workload,
//! * [`apps`] holds the error correction, search and alignment pipelines,
//! * [`io`] reads and writes FASTA and tables,
//! * [`bench`] and [`cli`] back the `phmm` binary.

pub mod apps;
pub mod bench;
pub mod cli;
pub mod engine;
pub mod error;
pub mod filter;
pub mod io;
pub mod model;
pub mod perf;

pub use error::{Error, Result};
