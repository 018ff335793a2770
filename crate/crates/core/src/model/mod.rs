//! Profile HMM graphs.
//!
//! A graph represents a single sequence. States are numbered so that every
//! transition goes from a lower (or equal) id to a higher one, which makes
//! one pass in id order a valid topological sweep for silent states.

mod build;
mod format;
mod validate;

pub use build::{build_error_correction, build_traditional, start_distribution, PriorConfig};
pub use format::{deserialize, serialize};
pub use validate::{validate, Diagnostic};

use crate::error::{Error, Result};

/// Ordered set of symbols a graph emits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    index: [u8; 256],
}

const NO_SYMBOL: u8 = u8::MAX;

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self> {
        let bytes = symbols.as_bytes();
        if bytes.len() < 2 || bytes.len() >= NO_SYMBOL as usize {
            return Err(Error::InvalidGraph(format!(
                "alphabet must have between 2 and 254 symbols, got {}",
                bytes.len()
            )));
        }
        let mut index = [NO_SYMBOL; 256];
        for (k, &b) in bytes.iter().enumerate() {
            if !b.is_ascii_graphic() {
                return Err(Error::InvalidGraph(format!("non-printable alphabet symbol {b:#x}")));
            }
            if index[b as usize] != NO_SYMBOL {
                return Err(Error::InvalidGraph(format!("duplicate alphabet symbol {:?}", b as char)));
            }
            index[b as usize] = k as u8;
        }
        Ok(Self { symbols: bytes.to_vec(), index })
    }

    pub fn dna() -> Self {
        Self::new("ACGT").unwrap()
    }

    pub fn protein() -> Self {
        Self::new("ACDEFGHIKLMNPQRSTVWY").unwrap()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn symbol(&self, code: u8) -> char {
        self.symbols[code as usize] as char
    }

    pub fn code(&self, symbol: u8) -> Option<u8> {
        match self.index[symbol as usize] {
            NO_SYMBOL => None,
            c => Some(c),
        }
    }

    /// Encodes text into symbol codes. Lowercase input is accepted when only
    /// its uppercase form is part of the alphabet.
    pub fn encode(&self, text: &str) -> Result<Vec<u8>> {
        text.bytes()
            .enumerate()
            .map(|(position, b)| {
                self.code(b)
                    .or_else(|| self.code(b.to_ascii_uppercase()))
                    .ok_or(Error::UnknownSymbol { position, symbol: b as char })
            })
            .collect()
    }

    pub fn decode(&self, codes: &[u8]) -> String {
        codes.iter().map(|&c| self.symbol(c)).collect()
    }

    /// Checks that every code is inside the alphabet.
    pub fn check_codes(&self, codes: &[u8]) -> Result<()> {
        match codes.iter().position(|&c| c as usize >= self.len()) {
            Some(position) => Err(Error::UnknownSymbol { position, symbol: '?' }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateKind {
    Match,
    Insertion,
    Deletion,
}

impl StateKind {
    /// Deletion states emit nothing.
    pub fn is_silent(self) -> bool {
        matches!(self, StateKind::Deletion)
    }

    pub fn code(self) -> char {
        match self {
            StateKind::Match => 'M',
            StateKind::Insertion => 'I',
            StateKind::Deletion => 'D',
        }
    }

    pub fn from_code(c: &str) -> Option<Self> {
        match c {
            "M" => Some(StateKind::Match),
            "I" => Some(StateKind::Insertion),
            "D" => Some(StateKind::Deletion),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Design {
    /// Match, insertion (with self-loop) and silent deletion state per character.
    Traditional,
    /// Loop-free insertion chains; deletions are skip transitions between matches.
    ErrorCorrection,
}

impl Design {
    pub fn name(self) -> &'static str {
        match self {
            Design::Traditional => "TRADITIONAL",
            Design::ErrorCorrection => "ERROR_CORRECTION",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "TRADITIONAL" => Some(Design::Traditional),
            "ERROR_CORRECTION" => Some(Design::ErrorCorrection),
            _ => None,
        }
    }
}

/// One state of the graph; its id is its index in [`PhmmGraph::states`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct State {
    pub kind: StateKind,
    /// 1-based position of the represented character this state belongs to.
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub prob: f64,
}

/// Profile HMM over one represented sequence.
///
/// Transitions are kept in compressed rows sorted by `(from, to)`, so the
/// global index of a transition doubles as its slot in accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct PhmmGraph {
    design: Design,
    alphabet: Alphabet,
    n_columns: usize,
    states: Vec<State>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    out_probs: Vec<f64>,
    emissions: Vec<f64>,
    start: Vec<f64>,
    end: Vec<bool>,
    ordered: bool,
}

impl PhmmGraph {
    /// Assembles a graph from raw parts. Only structural consistency is checked
    /// here; probabilistic invariants are reported by [`validate`].
    pub fn new(
        design: Design,
        alphabet: Alphabet,
        n_columns: usize,
        states: Vec<State>,
        mut transitions: Vec<Transition>,
        emissions: Vec<f64>,
        start: Vec<f64>,
    ) -> Result<Self> {
        let n = states.len();
        let sigma = alphabet.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no states".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidGraph("too many states".into()));
        }
        if emissions.len() != n * sigma {
            return Err(Error::InvalidGraph(format!(
                "emission table has {} entries, expected {}",
                emissions.len(),
                n * sigma
            )));
        }
        if start.len() != n {
            return Err(Error::InvalidGraph(format!(
                "start distribution has {} entries, expected {n}",
                start.len()
            )));
        }
        for t in &transitions {
            if t.from >= n || t.to >= n {
                return Err(Error::InvalidGraph(format!(
                    "transition {} -> {} references a missing state",
                    t.from, t.to
                )));
            }
        }
        transitions.sort_by_key(|t| (t.from, t.to));
        if let Some(w) = transitions.windows(2).find(|w| w[0].from == w[1].from && w[0].to == w[1].to) {
            return Err(Error::InvalidGraph(format!("duplicate transition {} -> {}", w[0].from, w[0].to)));
        }
        if let Some(t) = transitions.iter().find(|t| t.from == t.to && states[t.from].kind.is_silent()) {
            return Err(Error::InvalidGraph(format!("silent state {} has a self-loop", t.from)));
        }
        let ordered = transitions.iter().all(|t| t.from <= t.to);

        let mut out_offsets = vec![0usize; n + 1];
        for t in &transitions {
            out_offsets[t.from + 1] += 1;
        }
        for k in 0..n {
            out_offsets[k + 1] += out_offsets[k];
        }
        let out_targets = transitions.iter().map(|t| t.to as u32).collect();
        let out_probs = transitions.iter().map(|t| t.prob).collect();
        let end = states
            .iter()
            .map(|s| !s.kind.is_silent() && s.column == n_columns)
            .collect();

        Ok(Self {
            design,
            alphabet,
            n_columns,
            states,
            out_offsets,
            out_targets,
            out_probs,
            emissions,
            start,
            end,
            ordered,
        })
    }

    /// Same structure with new transition probabilities (indexed like
    /// [`PhmmGraph::transition`]) and emission table.
    pub fn with_parameters(&self, transition_probs: Vec<f64>, emissions: Vec<f64>) -> Self {
        assert_eq!(transition_probs.len(), self.out_probs.len());
        assert_eq!(emissions.len(), self.emissions.len());
        Self { out_probs: transition_probs, emissions, ..self.clone() }
    }

    pub fn with_start(&self, start: Vec<f64>) -> Self {
        assert_eq!(start.len(), self.states.len());
        Self { start, ..self.clone() }
    }

    /// True when every transition satisfies `from <= to`.
    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    pub fn design(&self) -> Design {
        self.design
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_columns(&self) -> usize {
        self.n_columns
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, id: usize) -> State {
        self.states[id]
    }

    pub fn is_silent(&self, id: usize) -> bool {
        self.states[id].kind.is_silent()
    }

    pub fn n_transitions(&self) -> usize {
        self.out_targets.len()
    }

    /// Global transition indices of the outgoing row of `id`, ascending by target.
    pub fn out_range(&self, id: usize) -> std::ops::Range<usize> {
        self.out_offsets[id]..self.out_offsets[id + 1]
    }

    pub fn out_degree(&self, id: usize) -> usize {
        self.out_offsets[id + 1] - self.out_offsets[id]
    }

    pub fn out_targets(&self, id: usize) -> &[u32] {
        &self.out_targets[self.out_range(id)]
    }

    pub fn out_probs(&self, id: usize) -> &[f64] {
        &self.out_probs[self.out_range(id)]
    }

    pub fn target(&self, k: usize) -> usize {
        self.out_targets[k] as usize
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.out_probs[k]
    }

    pub fn transition_probs(&self) -> &[f64] {
        &self.out_probs
    }

    pub fn transition(&self, k: usize) -> Transition {
        let from = self.out_offsets.partition_point(|&o| o <= k) - 1;
        Transition { from, to: self.out_targets[k] as usize, prob: self.out_probs[k] }
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        (0..self.states.len()).flat_map(move |from| {
            self.out_range(from).map(move |k| Transition {
                from,
                to: self.out_targets[k] as usize,
                prob: self.out_probs[k],
            })
        })
    }

    /// Index of the transition `from -> to`, if it exists.
    pub fn find_transition(&self, from: usize, to: usize) -> Option<usize> {
        let r = self.out_range(from);
        self.out_targets[r.clone()]
            .binary_search(&(to as u32))
            .ok()
            .map(|p| r.start + p)
    }

    pub fn emission(&self, id: usize, symbol: u8) -> f64 {
        self.emissions[id * self.alphabet.len() + symbol as usize]
    }

    pub fn emission_row(&self, id: usize) -> &[f64] {
        let s = self.alphabet.len();
        &self.emissions[id * s..(id + 1) * s]
    }

    pub fn emissions(&self) -> &[f64] {
        &self.emissions
    }

    pub fn start(&self, id: usize) -> f64 {
        self.start[id]
    }

    pub fn start_probs(&self) -> &[f64] {
        &self.start
    }

    /// States allowed to emit the last symbol of an observation: the emitting
    /// states of the final column.
    pub fn is_end(&self, id: usize) -> bool {
        self.end[id]
    }

    /// Match states in column order.
    pub fn match_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == StateKind::Match)
            .map(|(k, _)| k)
    }

    /// The represented sequence, read from the argmax emission of each match state.
    pub fn represented_sequence(&self) -> Vec<u8> {
        self.match_states()
            .map(|m| argmax(self.emission_row(m)) as u8)
            .collect()
    }
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates_and_tiny_sets() {
        assert!(Alphabet::new("AA").is_err());
        assert!(Alphabet::new("A").is_err());
        assert_eq!(Alphabet::dna().len(), 4);
        assert_eq!(Alphabet::protein().len(), 20);
    }

    #[test]
    fn encode_reports_position_of_unknown_symbol() {
        let a = Alphabet::dna();
        assert_eq!(a.encode("acgt").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(a.encode("ACNT"), Err(Error::UnknownSymbol { position: 2, symbol: 'N' }));
    }

    #[test]
    fn find_transition_uses_sorted_rows() {
        let g = build_traditional("ACG", &Alphabet::dna(), &PriorConfig::default()).unwrap();
        let k = g.find_transition(0, 3).unwrap();
        assert_eq!(g.transition(k).from, 0);
        assert_eq!(g.target(k), 3);
        assert!(g.find_transition(3, 0).is_none());
    }
}
