//! Scores a matching, a mutated and an unrelated sequence against one model.
//! Forward-only passes; the last line shows that the product table changes
//! nothing numerically.
//!
//! cargo run --example score_sequences

use phmm_core::engine::{score, score_with, TrainOptions};
use phmm_core::model::{build_traditional, Alphabet, PriorConfig};

fn main() -> phmm_core::Result<()> {
    let alphabet = Alphabet::dna();
    let model = build_traditional("GATTACAGATTACA", &alphabet, &PriorConfig::default())?;
    for q in ["GATTACAGATTACA", "GATTACCGATTACA", "GATACAGATTAC", "CCCCGGGGCCCCGG"] {
        let ll = score(&model, &alphabet.encode(q)?)?;
        println!("{q:<16} {ll:>10.4} ({:.4} per symbol)", ll / q.len() as f64);
    }
    let codes = alphabet.encode("GATTACAGATTACA")?;
    let with = score_with(&model, &codes, &TrainOptions::default().with_lut(true))?;
    let without = score_with(&model, &codes, &TrainOptions::default().with_lut(false))?;
    println!("lut on/off identical: {}", with.to_bits() == without.to_bits());
    Ok(())
}
