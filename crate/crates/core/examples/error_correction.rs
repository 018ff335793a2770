//! Plants substitutions and indels in a random assembly, maps ten reads of
//! the true sequence onto it and corrects it chunk by chunk.
//!
//! cargo run --release --example error_correction

use phmm_core::apps::{correct_with_report, CorrectionOptions};
use phmm_core::io::{FastaRecord, Mapping, Strand};
use phmm_core::model::Alphabet;
use rand::{Rng, SeedableRng};

fn main() -> phmm_core::Result<()> {
    let alphabet = Alphabet::dna();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let truth: Vec<u8> = (0..400).map(|_| rng.gen_range(0..4)).collect();

    let mut draft = truth.clone();
    draft.insert(330, 2);
    draft[251] = (draft[251] + 1) % 4;
    draft.remove(170);
    draft.remove(90);
    draft[40] = (draft[40] + 3) % 4;

    let reads: Vec<FastaRecord> = (0..10).map(|i| FastaRecord::new(format!("read{i}"), alphabet.decode(&truth))).collect();
    let mappings: Vec<Mapping> = reads
        .iter()
        .map(|r| Mapping { read_id: r.id.clone(), start: 0, strand: Strand::Forward, segment: "*".into() })
        .collect();

    for chunk_length in [150, 650] {
        let options = CorrectionOptions { chunk_length, ..CorrectionOptions::default() };
        let result = correct_with_report(&alphabet.decode(&draft), &alphabet, &reads, &mappings, &options)?;
        println!(
            "chunk {chunk_length}: {} chunks, {} segments, lut hit ratio {:.3}, corrected: {}",
            result.chunks,
            result.segments_trained,
            result.counters.lut_hit_ratio(),
            result.sequence == alphabet.decode(&truth)
        );
    }
    Ok(())
}
