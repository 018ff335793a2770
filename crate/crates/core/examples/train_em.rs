//! Baum-Welch on one read: the log-likelihood never decreases between
//! iterations. Then one sequential pass over several reads, the way error
//! correction trains a chunk.
//!
//! cargo run --release --example train_em

use phmm_core::apps::viterbi_decode;
use phmm_core::bench::synthetic_reads;
use phmm_core::engine::{train_single_in, TrainOptions, TrainingWorkspace};
use phmm_core::model::{build_error_correction, validate, Alphabet, PriorConfig};

fn main() -> phmm_core::Result<()> {
    let alphabet = Alphabet::dna();
    let (truth, reads) = synthetic_reads(7, 200, 8, 0.03);
    let draft = build_error_correction(&alphabet.decode(&truth), &alphabet, 6, 2, &PriorConfig::default())?;
    let options = TrainOptions::default();
    let mut ws = TrainingWorkspace::new();

    let mut graph = draft.clone();
    for it in 1..=6 {
        let res = train_single_in(&mut ws, &graph, &reads[0], &options)?;
        println!("iteration {it}: log-likelihood {:.4}", res.log_likelihood);
        graph = res.graph;
    }
    assert!(validate(&graph).is_empty());

    let mut graph = draft;
    for r in &reads {
        let res = train_single_in(&mut ws, &graph, r, &options)?;
        println!(
            "read of length {}: log-likelihood {:>9.3}, {} multiplications, lut hit ratio {:.3}",
            r.len(),
            res.log_likelihood,
            res.counters.multiplications,
            res.counters.lut_hit_ratio()
        );
        graph = res.graph;
    }
    let consensus = viterbi_decode(&graph)?;
    println!("consensus length {} (true sequence {})", consensus.len(), truth.len());
    Ok(())
}
