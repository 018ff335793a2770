//! Error correction, protein family search and multiple sequence alignment.

mod correct;
mod msa;
mod search;
mod viterbi;

pub use correct::{chunk_ranges, correct, correct_chunk, correct_with_report, plan_chunks, Chunk, Correction, CorrectionOptions, Segment};
pub use msa::{msa_align, render_alignment, AlignedState, AlignmentRow};
pub use search::{family_search, QueryHits, SearchHit};
pub use viterbi::{viterbi_decode, viterbi_path, StatePath};

use crate::error::{Error, Result};
use crate::io::FastaRecord;
use crate::model::Alphabet;

/// Encodes a record, reporting foreign symbols as an alphabet mismatch.
pub(crate) fn encode_for(alphabet: &Alphabet, record: &FastaRecord) -> Result<Vec<u8>> {
    alphabet.encode(&record.sequence).map_err(|e| match e {
        Error::UnknownSymbol { position, symbol } => Error::AlphabetMismatch(format!(
            "sequence '{}' has symbol '{symbol}' at position {position}",
            record.id
        )),
        other => other,
    })
}
