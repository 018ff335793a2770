//! Compares engine variants on synthetic error-correction data and prints the
//! CSV (timings included).
//!
//! cargo run --release --example bench

use phmm_core::bench::{bench, bench_csv, BenchConfig};

fn main() -> phmm_core::Result<()> {
    let reports = bench(&BenchConfig { reads: 10, ..BenchConfig::default() })?;
    print!("{}", bench_csv(&reports, true));
    Ok(())
}
