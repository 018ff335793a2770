//! Builds both graph designs from one sequence, validates them and round-trips
//! the error-correction graph through the text format.
//!
//! cargo run --example build_model

use phmm_core::model::{build_error_correction, build_traditional, deserialize, serialize, validate, Alphabet, PriorConfig};

fn main() -> phmm_core::Result<()> {
    let alphabet = Alphabet::dna();
    let priors = PriorConfig::default();

    let trad = build_traditional("ACGTTGCA", &alphabet, &priors)?;
    let ec = build_error_correction("ACGTTGCA", &alphabet, 6, 2, &priors)?;
    for (name, g) in [("traditional", &trad), ("error-correction", &ec)] {
        println!(
            "{name:>16}: {} states, {} transitions, {} diagnostics",
            g.n_states(),
            g.n_transitions(),
            validate(g).len()
        );
    }

    let text = serialize(&ec);
    let back = deserialize(&text)?;
    assert_eq!(back, ec);
    println!("serialized {} lines, round trip exact", text.lines().count());
    println!("{}", text.lines().take(6).collect::<Vec<_>>().join("\n"));
    Ok(())
}
