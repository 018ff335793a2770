//! Aligns sequences to a profile and prints the alignment; lowercase letters
//! are insertions, '-' are deletions.
//!
//! cargo run --example msa

use phmm_core::apps::{msa_align, render_alignment, viterbi_decode};
use phmm_core::io::FastaRecord;
use phmm_core::model::{build_traditional, Alphabet, PriorConfig};

fn main() -> phmm_core::Result<()> {
    let alphabet = Alphabet::dna();
    let model = build_traditional("ACGTACGTAC", &alphabet, &PriorConfig::default())?;
    let seqs = [
        FastaRecord::new("same", "ACGTACGTAC"),
        FastaRecord::new("deletion", "ACGTCGTAC"),
        FastaRecord::new("insertion", "ACGTTACGTAC"),
        FastaRecord::new("substitution", "ACGAACGTAC"),
    ];
    let rows = msa_align(&model, &seqs)?;
    for (r, line) in rows.iter().zip(render_alignment(&model, &rows)) {
        println!("{:<13} {line}  {:.3}", r.id, r.log_probability);
    }
    println!("consensus     {}", alphabet.decode(&viterbi_decode(&model)?));
    Ok(())
}
