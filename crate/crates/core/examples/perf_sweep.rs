//! Sweeps processing engines, chunk length and core count through the
//! analytical accelerator model.
//!
//! cargo run --example perf_sweep

use phmm_core::perf::{
    amdahl, compose_speedups, reports_to_csv, sweep, AcceleratorConfig, SweepParameter, WorkloadProfile,
    ACCELERATED_FRACTIONS, TABLE3_MULTIPLIERS,
};

fn main() -> phmm_core::Result<()> {
    let config = AcceleratorConfig::default();
    let workload = WorkloadProfile::default();

    let pes = sweep(&config, &workload, SweepParameter::Pes, &[16.0, 32.0, 64.0, 128.0])?;
    for r in &pes {
        println!("pes {:>4}: kernel speedup {:>8.2}", r.config.pes, r.kernel_speedup);
    }
    let chunks = sweep(&config, &workload, SweepParameter::Chunk, &[150.0, 650.0, 1000.0])?;
    for r in &chunks {
        println!("chunk {:>5}: {:>12.0} cycles", r.workload.sequence_length, r.total_cycles);
    }
    for (name, f) in ["protein search", "msa", "error correction"].into_iter().zip(ACCELERATED_FRACTIONS) {
        let w = WorkloadProfile { accelerated_fraction: f, ..workload };
        let cores = sweep(&config, &w, SweepParameter::Cores, &[1.0, 2.0, 4.0, 8.0])?;
        let best = cores.iter().max_by(|a, b| a.end_to_end_speedup.total_cmp(&b.end_to_end_speedup)).unwrap();
        println!("{name}: best with {} cores ({:.2}x end to end)", best.config.cores, best.end_to_end_speedup);
    }
    let k = compose_speedups(&TABLE3_MULTIPLIERS);
    println!("composed multipliers {k:.2}x, end to end at 98.57% {:.2}x", amdahl(0.9857, k, 0.0));
    print!("{}", reports_to_csv(&pes[..1]));
    Ok(())
}
