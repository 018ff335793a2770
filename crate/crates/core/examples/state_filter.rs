//! Compares the histogram filter with exact top-k selection on random values,
//! then trains one chunk with and without filtering.
//!
//! cargo run --release --example state_filter

use phmm_core::bench::synthetic_reads;
use phmm_core::engine::{train_single, TrainOptions};
use phmm_core::filter::{FilterConfig, HistogramFilter, SortFilter};
use phmm_core::model::{build_error_correction, Alphabet, PriorConfig};
use rand::{Rng, SeedableRng};

fn main() -> phmm_core::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut hist = HistogramFilter::new(16, 50)?;
    let mut sort = SortFilter::new(50)?;
    for id in 0..2000u32 {
        let v: f64 = rng.gen::<f64>().powi(6);
        hist.insert(id, v)?;
        sort.insert(id, v)?;
    }
    let (h, s) = (hist.select(), sort.select());
    let superset = s.iter().all(|id| h.contains(id));
    println!("exact top-50: {}, histogram kept {} (superset: {superset})", s.len(), h.len());

    let alphabet = Alphabet::dna();
    let (truth, reads) = synthetic_reads(5, 650, 1, 0.05);
    let graph = build_error_correction(&alphabet.decode(&truth), &alphabet, 6, 2, &PriorConfig::default())?;
    let exact = train_single(&graph, &reads[0], &TrainOptions::default())?;
    let filtered = train_single(&graph, &reads[0], &TrainOptions::default().with_filter(FilterConfig::histogram(16, 500)))?;
    let per_t = filtered.counters.filter_selected as f64 / reads[0].len() as f64;
    println!(
        "{} states; filtered run keeps {per_t:.1} per timestamp; log-likelihood {:.4} vs {:.4} ({:+.4}%)",
        graph.n_states(),
        filtered.log_likelihood,
        exact.log_likelihood,
        100.0 * (filtered.log_likelihood - exact.log_likelihood) / exact.log_likelihood.abs()
    );
    Ok(())
}
