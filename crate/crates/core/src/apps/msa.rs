use rayon::prelude::*;

use super::viterbi::viterbi_path;
use super::encode_for;
use crate::error::Result;
use crate::io::FastaRecord;
use crate::model::{PhmmGraph, StateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignedState {
    pub column: usize,
    pub kind: StateKind,
    /// Emitted symbol code; `None` for deletion states.
    pub symbol: Option<u8>,
}

/// Viterbi state path of one sequence in the model's column space.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentRow {
    pub id: String,
    pub states: Vec<AlignedState>,
    pub log_probability: f64,
}

impl AlignmentRow {
    pub fn symbols(&self) -> Vec<u8> {
        self.states.iter().filter_map(|s| s.symbol).collect()
    }
}

/// Aligns every sequence to `model`, in parallel.
pub fn msa_align(model: &PhmmGraph, sequences: &[FastaRecord]) -> Result<Vec<AlignmentRow>> {
    sequences
        .par_iter()
        .map(|rec| {
            let codes = encode_for(model.alphabet(), rec)?;
            let path = viterbi_path(model, &codes)?;
            let states = path
                .steps
                .iter()
                .map(|&(s, t)| {
                    let st = model.state(s);
                    let symbol = (!st.kind.is_silent()).then(|| codes[t - 1]);
                    AlignedState { column: st.column, kind: st.kind, symbol }
                })
                .collect();
            Ok(AlignmentRow { id: rec.id.clone(), states, log_probability: path.log_probability })
        })
        .collect()
}

/// Text rendering: one line per row, match columns in upper case or `-`,
/// insertions in lower case padded with `.` to the widest insertion of each
/// column.
pub fn render_alignment(model: &PhmmGraph, rows: &[AlignmentRow]) -> Vec<String> {
    let n = model.n_columns();
    let a = model.alphabet();
    let mut width = vec![0usize; n + 1];
    for r in rows {
        let mut count = vec![0usize; n + 1];
        for s in r.states.iter().filter(|s| s.kind == StateKind::Insertion) {
            count[s.column] += 1;
        }
        for (w, c) in width.iter_mut().zip(count) {
            *w = (*w).max(c);
        }
    }
    rows.iter()
        .map(|r| {
            let mut matched = vec!['-'; n + 1];
            let mut inserted = vec![String::new(); n + 1];
            for s in &r.states {
                match (s.kind, s.symbol) {
                    (StateKind::Match, Some(c)) => matched[s.column] = a.symbol(c),
                    (StateKind::Insertion, Some(c)) => inserted[s.column].push(a.symbol(c).to_ascii_lowercase()),
                    _ => {}
                }
            }
            let mut line = String::new();
            for c in 1..=n {
                line.push(matched[c]);
                line.push_str(&inserted[c]);
                line.extend(std::iter::repeat_n('.', width[c] - inserted[c].len()));
            }
            line
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_traditional, Alphabet, PriorConfig};

    #[test]
    fn identical_sequence_is_all_match() {
        let a = Alphabet::dna();
        let g = build_traditional("ACGTTG", &a, &PriorConfig::default()).unwrap();
        let rows = msa_align(&g, &[FastaRecord::new("s", "ACGTTG")]).unwrap();
        assert!(rows[0].states.iter().all(|s| s.kind == StateKind::Match));
        assert_eq!(render_alignment(&g, &rows), vec!["ACGTTG".to_string()]);
    }

    #[test]
    fn one_inserted_symbol_uses_one_insertion() {
        let a = Alphabet::dna();
        let g = build_traditional("ACGTTG", &a, &PriorConfig::default()).unwrap();
        let rows = msa_align(&g, &[FastaRecord::new("s", "ACGATTG"), FastaRecord::new("t", "ACGTTG")]).unwrap();
        let ins = rows[0].states.iter().filter(|s| s.kind == StateKind::Insertion).count();
        assert_eq!(ins, 1);
        assert_eq!(rows[0].symbols(), a.encode("ACGATTG").unwrap());
        let text = render_alignment(&g, &rows);
        assert_eq!(text[0].len(), text[1].len());
    }

    #[test]
    fn foreign_symbol_is_an_alphabet_mismatch() {
        let g = build_traditional("ACGT", &Alphabet::dna(), &PriorConfig::default()).unwrap();
        assert!(matches!(msa_align(&g, &[FastaRecord::new("p", "MKV")]), Err(crate::Error::AlphabetMismatch(_))));
    }
}
