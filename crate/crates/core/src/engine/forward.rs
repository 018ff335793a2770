use super::counters::OpCounters;
use super::lut::{lut_build, Products};
use super::{check_inputs, TrainOptions};
use crate::error::Result;
use crate::filter::StateFilter;
use crate::model::PhmmGraph;

/// Max-rescaled forward values.
///
/// Row `t` (1-based, `t <= len`) holds `F_t(i) / max_k F_t(k)`, so the largest
/// stored value of every non-empty row is exactly 1. Row 0 holds the silent
/// states reached from the start distribution before the first symbol; it is
/// not rescaled. The true forward value is `row(t)[i] * exp(log_norm(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardMatrix {
    n_states: usize,
    len: usize,
    values: Vec<f64>,
    /// Raw row maxima before rescaling; `maxima[0] == 1`.
    maxima: Vec<f64>,
    log_norm: Vec<f64>,
    log_likelihood: f64,
}

impl ForwardMatrix {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.n_states..(t + 1) * self.n_states]
    }

    pub fn value(&self, t: usize, state: usize) -> f64 {
        self.values[t * self.n_states + state]
    }

    /// Raw maximum of row `t` before rescaling (the inverse scale factor).
    pub fn row_max(&self, t: usize) -> f64 {
        self.maxima[t]
    }

    /// `sum_{u <= t} ln(row_max(u))`.
    pub fn log_norm(&self, t: usize) -> f64 {
        self.log_norm[t]
    }

    /// Natural log of the unscaled forward value.
    pub fn log_value(&self, t: usize, state: usize) -> f64 {
        self.value(t, state).ln() + self.log_norm[t]
    }

    /// `ln P(sequence | graph)`; negative infinity when no path emits it.
    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }
}

pub(crate) fn has_silent(graph: &PhmmGraph) -> bool {
    (0..graph.n_states()).any(|i| graph.is_silent(i))
}

/// Forward pass with a freshly built product table (when enabled) and filter.
pub fn forward(graph: &PhmmGraph, sequence: &[u8], options: &TrainOptions) -> Result<ForwardMatrix> {
    options.check()?;
    check_inputs(graph, sequence, options.chunk_length)?;
    let table = options.lut_enabled.then(|| lut_build(graph));
    let mut filter = options
        .filter
        .as_ref()
        .map(|f| StateFilter::from_config(f, graph.n_states()))
        .transpose()?;
    let mut counters = OpCounters::default();
    forward_in(graph, sequence, Products::new(graph, table.as_ref()), filter.as_mut(), &mut counters)
}

/// Push-form forward sweep: every non-zero `F_{t-1}(i)` is broadcast to all
/// successors of `i`, then silent states are closed in increasing id order.
pub(crate) fn forward_in(
    graph: &PhmmGraph,
    sequence: &[u8],
    products: Products<'_>,
    mut filter: Option<&mut StateFilter>,
    counters: &mut OpCounters,
) -> Result<ForwardMatrix> {
    let n_states = graph.n_states();
    let len = sequence.len();
    let silent = has_silent(graph);
    let mut values = vec![0.0; (len + 1) * n_states];
    let mut maxima = vec![1.0; len + 1];
    let mut log_norm = vec![0.0; len + 1];

    if silent {
        let row0 = &mut values[..n_states];
        for i in 0..n_states {
            if !graph.is_silent(i) {
                continue;
            }
            row0[i] += graph.start(i);
            close_silent(graph, i, row0, counters);
        }
    }

    let mut selected = Vec::new();
    for t in 1..=len {
        let symbol = sequence[t - 1];
        let (done, rest) = values.split_at_mut(t * n_states);
        let prev = &done[(t - 1) * n_states..];
        let cur = &mut rest[..n_states];

        if t == 1 {
            for (j, v) in cur.iter_mut().enumerate() {
                let s = graph.start(j);
                if s > 0.0 && !graph.is_silent(j) {
                    *v = s * graph.emission(j, symbol);
                    counters.multiplications += 1;
                }
            }
        }
        for (i, &f) in prev.iter().enumerate() {
            if f == 0.0 {
                continue;
            }
            for (slot, k) in graph.out_range(i).enumerate() {
                let j = graph.target(k);
                if graph.is_silent(j) {
                    continue;
                }
                cur[j] += f * products.get(i, k, slot, symbol, counters);
                counters.multiplications += 1;
            }
        }
        if silent {
            for i in 0..n_states {
                close_silent(graph, i, cur, counters);
            }
        }

        let max = cur.iter().fold(0.0f64, |m, &v| m.max(v));
        maxima[t] = max;
        log_norm[t] = log_norm[t - 1] + max.ln();
        if max > 0.0 {
            for v in cur.iter_mut() {
                *v /= max;
            }
        }

        if let Some(filter) = filter.as_deref_mut() {
            filter.reset();
            for (i, &v) in cur.iter().enumerate() {
                if v > 0.0 {
                    filter.insert(i as u32, v)?;
                    counters.filter_inserted += 1;
                }
            }
            selected.clear();
            selected.extend(filter.select());
            counters.filter_selected += selected.len() as u64;
            let mut keep = selected.iter().peekable();
            for (i, v) in cur.iter_mut().enumerate() {
                if keep.peek().is_some_and(|&&s| s as usize == i) {
                    keep.next();
                } else {
                    *v = 0.0;
                }
            }
        }
        counters.bytes_moved += 8 * cur.iter().filter(|&&v| v > 0.0).count() as u64;
    }

    let end_mass: f64 = (0..n_states).filter(|&i| graph.is_end(i)).map(|i| values[len * n_states + i]).sum();
    let log_likelihood = if end_mass > 0.0 { end_mass.ln() + log_norm[len] } else { f64::NEG_INFINITY };

    Ok(ForwardMatrix { n_states, len, values, maxima, log_norm, log_likelihood })
}

/// Pushes the value of `i` to its silent successors within the same row.
#[inline]
fn close_silent(graph: &PhmmGraph, i: usize, row: &mut [f64], counters: &mut OpCounters) {
    let v = row[i];
    if v == 0.0 {
        return;
    }
    for k in graph.out_range(i) {
        let j = graph.target(k);
        if graph.is_silent(j) {
            row[j] += v * graph.prob(k);
            counters.multiplications += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::FilterConfig;
    use crate::model::{build_error_correction, build_traditional, Alphabet, Design, PriorConfig, State, StateKind, Transition};

    pub(crate) fn single_state(emission_a: f64) -> PhmmGraph {
        let a = Alphabet::dna();
        let rest = (1.0 - emission_a) / 3.0;
        PhmmGraph::new(
            Design::ErrorCorrection,
            a,
            1,
            vec![State { kind: StateKind::Match, column: 1 }],
            vec![Transition { from: 0, to: 0, prob: 1.0 }],
            vec![emission_a, rest, rest, rest],
            vec![1.0],
        )
        .unwrap()
    }

    fn opts() -> TrainOptions {
        TrainOptions { chunk_length: 1000, ..Default::default() }
    }

    #[test]
    fn single_state_all_ones() {
        let g = single_state(1.0);
        let f = forward(&g, &[0, 0, 0], &opts()).unwrap();
        for t in 1..=3 {
            assert_eq!(f.value(t, 0), 1.0);
            assert_eq!(f.row_max(t), 1.0);
        }
        assert_eq!(f.log_likelihood(), 0.0);
    }

    #[test]
    fn impossible_symbol_gives_negative_infinity() {
        let g = single_state(1.0);
        let f = forward(&g, &[0, 1, 0], &opts()).unwrap();
        assert_eq!(f.log_likelihood(), f64::NEG_INFINITY);
    }

    #[test]
    fn rows_are_max_normalized() {
        let g = build_error_correction("ACGTTGCAAC", &Alphabet::dna(), 6, 2, &PriorConfig::default()).unwrap();
        let seq = Alphabet::dna().encode("ACGTGCAAC").unwrap();
        let f = forward(&g, &seq, &opts()).unwrap();
        for t in 1..=seq.len() {
            let max = f.row(t).iter().cloned().fold(0.0, f64::max);
            assert_eq!(max, 1.0);
        }
        assert!(f.log_likelihood().is_finite());
    }

    #[test]
    fn admitting_filter_changes_nothing() {
        let g = build_traditional("ACGTTGCA", &Alphabet::dna(), &PriorConfig::default()).unwrap();
        let seq = Alphabet::dna().encode("ACGTTCA").unwrap();
        let plain = forward(&g, &seq, &opts()).unwrap();
        let filtered = forward(&g, &seq, &opts().with_filter(FilterConfig::histogram(16, g.n_states()))).unwrap();
        assert_eq!(plain, filtered);
    }

    #[test]
    fn empty_and_overlong_sequences_are_rejected() {
        let g = single_state(1.0);
        assert_eq!(forward(&g, &[], &opts()), Err(crate::Error::EmptySequence));
        let long = vec![0u8; 1001];
        assert!(matches!(forward(&g, &long, &opts()), Err(crate::Error::SequenceTooLong { .. })));
        assert!(matches!(forward(&g, &[7], &opts()), Err(crate::Error::UnknownSymbol { position: 0, .. })));
    }
}
