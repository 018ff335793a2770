//! Ranks protein family models for a few queries.
//!
//! cargo run --release --example family_search

use phmm_core::apps::family_search;
use phmm_core::io::FastaRecord;
use phmm_core::model::{build_traditional, Alphabet, PriorConfig};
use rand::{Rng, SeedableRng};

fn main() -> phmm_core::Result<()> {
    let alphabet = Alphabet::protein();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let mut random = |n: usize| -> String {
        (0..n).map(|_| alphabet.symbol(rng.gen_range(0..alphabet.len() as u8))).collect()
    };
    let families: Vec<String> = (0..5).map(|_| random(40)).collect();
    let models = families
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((format!("family{i}"), build_traditional(s, &alphabet, &PriorConfig::default())?)))
        .collect::<phmm_core::Result<Vec<_>>>()?;

    let mut q3 = families[3].clone().into_bytes();
    q3[10] = b'W';
    let queries = vec![
        FastaRecord::new("exact1", families[1].clone()),
        FastaRecord::new("mutated3", String::from_utf8(q3).unwrap()),
        FastaRecord::new("decoy", random(40)),
    ];
    for q in family_search(&models, &queries)? {
        let top: Vec<String> =
            q.hits.iter().take(3).map(|h| format!("{} {:.3}", h.name, h.normalized_score)).collect();
        println!("{:<9} {}", q.query, top.join(" | "));
    }
    Ok(())
}
