use super::{Alphabet, Design, PhmmGraph, State, StateKind, Transition};
use crate::error::{Error, Result};

/// Prior probabilities used when a graph is first built.
///
/// Every outgoing row is formed from the class weights below over the targets
/// that exist, then normalized, so rows clipped at the end of the graph still
/// sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorConfig {
    /// Emission probability of the represented character in its match state.
    pub p_match: f64,
    /// Weight of moving to the next match state.
    pub match_forward: f64,
    /// Weight of opening (or extending) an insertion.
    pub insertion_open: f64,
    /// Weight of a deletion, split geometrically over skip lengths.
    pub deletion: f64,
    /// Ratio between consecutive skip lengths (and insertion chain entries).
    pub skip_decay: f64,
    /// Start mass placed on the first match state.
    pub start_match: f64,
    /// Error-correction graphs only: factor applied to indels that could be
    /// placed one column further right (homopolymers, tandem repeats), so
    /// that training settles on the rightmost placement instead of splitting
    /// evenly between equivalent ones.
    pub shift_penalty: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            p_match: 0.97,
            match_forward: 0.85,
            insertion_open: 0.10,
            deletion: 0.05,
            skip_decay: 0.5,
            start_match: 0.95,
            shift_penalty: 0.5,
        }
    }
}

impl PriorConfig {
    fn check(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.p_match) || !unit(self.start_match) {
            return Err(Error::InvalidOptions("prior probabilities must lie in [0, 1]".into()));
        }
        if self.match_forward <= 0.0 || self.insertion_open < 0.0 || self.deletion < 0.0 {
            return Err(Error::InvalidOptions("transition weights must be non-negative".into()));
        }
        if !(self.skip_decay > 0.0 && self.skip_decay <= 1.0) {
            return Err(Error::InvalidOptions("skip_decay must lie in (0, 1]".into()));
        }
        if !(self.shift_penalty > 0.0 && self.shift_penalty <= 1.0) {
            return Err(Error::InvalidOptions("shift_penalty must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Accumulates weighted targets for one row and normalizes them.
struct RowBuilder {
    targets: Vec<(usize, f64)>,
}

impl RowBuilder {
    fn new() -> Self {
        Self { targets: Vec::new() }
    }

    fn add(&mut self, to: usize, weight: f64) {
        if weight > 0.0 {
            self.targets.push((to, weight));
        }
    }

    fn emit(self, from: usize, out: &mut Vec<Transition>) {
        let total: f64 = self.targets.iter().map(|t| t.1).sum();
        if total > 0.0 {
            out.extend(self.targets.into_iter().map(|(to, w)| Transition { from, to, prob: w / total }));
        }
    }
}

fn geometric(count: usize, decay: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|k| decay.powi(k as i32)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn match_emissions(symbol: u8, sigma: usize, p_match: f64, row: &mut [f64]) {
    let other = (1.0 - p_match) / (sigma - 1) as f64;
    for (c, e) in row.iter_mut().enumerate() {
        *e = if c == symbol as usize { p_match } else { other };
    }
}

fn encode_nonempty(sequence: &str, alphabet: &Alphabet) -> Result<Vec<u8>> {
    if sequence.is_empty() {
        return Err(Error::EmptySequence);
    }
    alphabet.encode(sequence)
}

/// Builds the traditional design: match, insertion and deletion state per
/// character, with ids `3(t-1)`, `3(t-1)+1`, `3(t-1)+2` for column `t`.
pub fn build_traditional(sequence: &str, alphabet: &Alphabet, priors: &PriorConfig) -> Result<PhmmGraph> {
    priors.check()?;
    let codes = encode_nonempty(sequence, alphabet)?;
    let n = codes.len();
    let sigma = alphabet.len();
    let m = |t: usize| 3 * (t - 1);
    let i = |t: usize| 3 * (t - 1) + 1;
    let d = |t: usize| 3 * (t - 1) + 2;

    let mut states = Vec::with_capacity(3 * n);
    let mut emissions = vec![0.0; 3 * n * sigma];
    let mut transitions = Vec::with_capacity(7 * n);
    let uniform = 1.0 / sigma as f64;

    for t in 1..=n {
        states.push(State { kind: StateKind::Match, column: t });
        states.push(State { kind: StateKind::Insertion, column: t });
        states.push(State { kind: StateKind::Deletion, column: t });
        match_emissions(codes[t - 1], sigma, priors.p_match, &mut emissions[m(t) * sigma..(m(t) + 1) * sigma]);
        emissions[i(t) * sigma..(i(t) + 1) * sigma].fill(uniform);

        let has_next = t < n;
        let mut row = RowBuilder::new();
        if has_next {
            row.add(m(t + 1), priors.match_forward);
            row.add(d(t + 1), priors.deletion);
        }
        row.add(i(t), priors.insertion_open);
        row.emit(m(t), &mut transitions);

        let mut row = RowBuilder::new();
        row.add(i(t), priors.insertion_open);
        if has_next {
            row.add(m(t + 1), priors.match_forward);
        }
        row.emit(i(t), &mut transitions);

        if has_next {
            let mut row = RowBuilder::new();
            row.add(m(t + 1), priors.match_forward);
            row.add(d(t + 1), priors.deletion);
            row.emit(d(t), &mut transitions);
        }
    }

    let start = start_distribution(Design::Traditional, &states, 0, priors);
    PhmmGraph::new(Design::Traditional, alphabet.clone(), n, states, transitions, emissions, start)
}

/// Builds the error-correction design: per column one match state followed by
/// `max_insertion` chained insertion states without loops. Deletions of up to
/// `max_deletion` characters are skip transitions `M_t -> M_{t+k}`, `k >= 2`.
pub fn build_error_correction(
    sequence: &str,
    alphabet: &Alphabet,
    max_deletion: usize,
    max_insertion: usize,
    priors: &PriorConfig,
) -> Result<PhmmGraph> {
    priors.check()?;
    if max_deletion == 0 || max_insertion == 0 {
        return Err(Error::InvalidOptions("max_deletion and max_insertion must be at least 1".into()));
    }
    let codes = encode_nonempty(sequence, alphabet)?;
    let n = codes.len();
    let sigma = alphabet.len();
    let stride = 1 + max_insertion;
    let m = |t: usize| stride * (t - 1);
    let ins = |t: usize, k: usize| stride * (t - 1) + k;

    let skip_weights = geometric(max_deletion, priors.skip_decay);
    let entry_weights = geometric(max_insertion, priors.skip_decay);
    let uniform = 1.0 / sigma as f64;

    let mut states = Vec::with_capacity(stride * n);
    let mut emissions = vec![0.0; stride * n * sigma];
    let mut transitions = Vec::with_capacity(stride * n * (max_deletion + 3));

    // skips from a state feeding column t + 1 to columns t + 2 ..= t + 1 + max_deletion
    let add_skips = |row: &mut RowBuilder, t: usize| {
        for (k, w) in skip_weights.iter().enumerate() {
            let target = t + 2 + k;
            if target <= n {
                // deletes columns t + 1 .. target - 1; the same block shifted
                // right reads identically when column t + 1 equals column target
                let shift = if codes[t] == codes[target - 1] { priors.shift_penalty } else { 1.0 };
                row.add(m(target), priors.deletion * w * shift);
            }
        }
    };

    for t in 1..=n {
        states.push(State { kind: StateKind::Match, column: t });
        match_emissions(codes[t - 1], sigma, priors.p_match, &mut emissions[m(t) * sigma..(m(t) + 1) * sigma]);
        for k in 1..=max_insertion {
            states.push(State { kind: StateKind::Insertion, column: t });
            let row = &mut emissions[ins(t, k) * sigma..(ins(t, k) + 1) * sigma];
            row.fill(uniform);
            // inserting the next column's symbol is the same as inserting it one column later
            if t < n && priors.shift_penalty < 1.0 {
                row[codes[t] as usize] *= priors.shift_penalty;
                let z: f64 = row.iter().sum();
                row.iter_mut().for_each(|e| *e /= z);
            }
        }

        let mut row = RowBuilder::new();
        if t < n {
            row.add(m(t + 1), priors.match_forward);
        }
        for (k, w) in entry_weights.iter().enumerate() {
            row.add(ins(t, k + 1), priors.insertion_open * w);
        }
        add_skips(&mut row, t);
        row.emit(m(t), &mut transitions);

        for k in 1..=max_insertion {
            let mut row = RowBuilder::new();
            if k < max_insertion {
                row.add(ins(t, k + 1), priors.insertion_open);
            }
            if t < n {
                row.add(m(t + 1), priors.match_forward);
            }
            add_skips(&mut row, t);
            row.emit(ins(t, k), &mut transitions);
        }
    }

    let start = start_distribution(Design::ErrorCorrection, &states, max_deletion, priors);
    PhmmGraph::new(Design::ErrorCorrection, alphabet.clone(), n, states, transitions, emissions, start)
}

/// Start distribution over the first column of `states`.
///
/// Traditional graphs put `start_match` on the first match state and the rest
/// on the first deletion state. Error-correction graphs spread the rest over
/// the match states `1..=max_deletion` columns further on (leading deletions).
pub fn start_distribution(design: Design, states: &[State], max_deletion: usize, priors: &PriorConfig) -> Vec<f64> {
    let mut start = vec![0.0; states.len()];
    let Some(first) = states.iter().map(|s| s.column).min() else {
        return start;
    };
    let find = |kind: StateKind, column: usize| states.iter().position(|s| s.kind == kind && s.column == column);
    let rest = 1.0 - priors.start_match;
    if let Some(m) = find(StateKind::Match, first) {
        start[m] = priors.start_match;
    }
    match design {
        Design::Traditional => {
            if let Some(d) = find(StateKind::Deletion, first) {
                start[d] = rest;
            }
        }
        Design::ErrorCorrection => {
            for (k, w) in geometric(max_deletion.max(1), priors.skip_decay).iter().enumerate() {
                if let Some(m) = find(StateKind::Match, first + 1 + k) {
                    start[m] = rest * w;
                }
            }
        }
    }
    let total: f64 = start.iter().sum();
    if total > 0.0 {
        start.iter_mut().for_each(|p| *p /= total);
    }
    start
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    fn dna() -> Alphabet {
        Alphabet::dna()
    }

    #[test]
    fn traditional_has_three_states_per_character() {
        let g = build_traditional("ACG", &dna(), &PriorConfig::default()).unwrap();
        assert_eq!(g.n_states(), 9);
        assert_eq!(g.n_columns(), 3);
        assert!(validate(&g).is_empty(), "{:?}", validate(&g));
    }

    #[test]
    fn degenerate_match_prior_is_one_hot() {
        let priors = PriorConfig { p_match: 1.0, ..Default::default() };
        let g = build_traditional("A", &dna(), &priors).unwrap();
        assert_eq!(g.emission_row(0), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn residual_match_mass_is_split_uniformly() {
        let g = build_traditional("ACG", &dna(), &PriorConfig::default()).unwrap();
        let row = g.emission_row(0);
        assert_eq!(row[0], 0.97);
        for &e in &row[1..] {
            assert!((e - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn traditional_connection_pattern() {
        let g = build_traditional("ACGT", &dna(), &PriorConfig::default()).unwrap();
        // column 2: M=3, I=4, D=5; column 3: M=6, D=8
        assert_eq!(g.out_targets(3), &[4, 6, 8]);
        assert_eq!(g.out_targets(4), &[4, 6]);
        assert_eq!(g.out_targets(5), &[6, 8]);
        // last column
        assert_eq!(g.out_targets(9), &[10]);
        assert_eq!(g.out_targets(10), &[10]);
        assert!(g.out_targets(11).is_empty());
    }

    #[test]
    fn unknown_symbol_is_reported_with_position() {
        let err = build_traditional("ACXG", &dna(), &PriorConfig::default()).unwrap_err();
        assert_eq!(err, Error::UnknownSymbol { position: 2, symbol: 'X' });
        let err = build_error_correction("AZ", &dna(), 6, 2, &PriorConfig::default()).unwrap_err();
        assert_eq!(err, Error::UnknownSymbol { position: 1, symbol: 'Z' });
    }

    /// Outgoing count of match state `t` derived from the construction rule.
    fn expected_match_degree(t: usize, n: usize, max_del: usize, max_ins: usize) -> usize {
        let forward = usize::from(t < n);
        let skips = (2..=max_del + 1).filter(|k| t + k <= n).count();
        forward + max_ins + skips
    }

    #[test]
    fn error_correction_match_degrees_follow_construction_rule() {
        let g = build_error_correction("ACGTACGTAC", &dna(), 6, 2, &PriorConfig::default()).unwrap();
        let matches: Vec<usize> = g.match_states().collect();
        assert_eq!(matches.len(), 10);
        for (t0, &m) in matches.iter().enumerate() {
            let t = t0 + 1;
            assert_eq!(g.out_degree(m), expected_match_degree(t, 10, 6, 2), "column {t}");
        }
        // interior columns carry the full 9-target budget
        assert_eq!(g.out_degree(matches[0]), 9);
        assert_eq!(g.out_degree(matches[2]), 9);
        assert!(g.states().iter().all(|s| s.kind != StateKind::Deletion));
        assert!(g.transitions().all(|t| t.from != t.to));
        assert!(validate(&g).is_empty());
    }

    #[test]
    fn single_insertion_has_no_self_loop() {
        let g = build_error_correction("ACGTA", &dna(), 6, 1, &PriorConfig::default()).unwrap();
        for t in 1..=5 {
            let ins: Vec<usize> = (0..g.n_states())
                .filter(|&k| g.state(k).kind == StateKind::Insertion && g.state(k).column == t)
                .collect();
            assert_eq!(ins.len(), 1);
            assert!(g.find_transition(ins[0], ins[0]).is_none());
        }
    }

    #[test]
    fn transition_counts_stay_within_lut_budget() {
        let g = build_error_correction(&"ACGT".repeat(20), &dna(), 6, 2, &PriorConfig::default()).unwrap();
        let max = (0..g.n_states()).map(|k| g.out_degree(k)).max().unwrap();
        assert_eq!(max, 9);
        let interior: Vec<usize> = (0..g.n_states())
            .filter(|&k| g.state(k).column <= 70)
            .map(|k| g.out_degree(k))
            .collect();
        assert!(interior.iter().all(|&d| (3..=12).contains(&d)));
    }

    #[test]
    fn start_mass_sits_on_first_column() {
        let g = build_traditional("ACG", &dna(), &PriorConfig::default()).unwrap();
        assert_eq!(g.start(0), 0.95);
        assert!((g.start(2) - 0.05).abs() < 1e-15);
        let g = build_error_correction("ACGTACGT", &dna(), 6, 2, &PriorConfig::default()).unwrap();
        let total: f64 = g.start_probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(g.start(0), 0.95);
    }
}
