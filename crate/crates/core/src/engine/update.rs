use super::backward::BackwardBuffer;
use super::counters::OpCounters;
use super::forward::ForwardMatrix;
use super::lut::Products;
use crate::error::{Error, Result};
use crate::model::PhmmGraph;

/// Added to every finalized probability before renormalizing, so no
/// parameter becomes permanently zero across iterations.
pub const PSEUDOCOUNT: f64 = 1e-9;

/// Numerator slots a hardware scratchpad reserves per source state.
pub const NUMERATOR_CAPACITY_HINT: usize = 256;

/// Expected transition counts, laid out like the graph's transition table so
/// all numerators of one source state are contiguous. The denominator of a
/// state is the sum of its slice.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionAccumulator {
    offsets: Vec<usize>,
    numerators: Vec<f64>,
}

impl TransitionAccumulator {
    pub fn new(graph: &PhmmGraph) -> Self {
        let mut offsets = Vec::with_capacity(graph.n_states() + 1);
        offsets.push(0);
        for i in 0..graph.n_states() {
            offsets.push(graph.out_range(i).end);
        }
        Self { offsets, numerators: vec![0.0; graph.n_transitions()] }
    }

    pub fn n_states(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn numerators(&self, state: usize) -> &[f64] {
        &self.numerators[self.offsets[state]..self.offsets[state + 1]]
    }

    /// Numerator of the transition with global index `k`.
    pub fn numerator(&self, k: usize) -> f64 {
        self.numerators[k]
    }

    pub fn denominator(&self, state: usize) -> f64 {
        self.numerators(state).iter().sum()
    }

    #[inline]
    pub(crate) fn add(&mut self, k: usize, v: f64) {
        self.numerators[k] += v;
    }

    pub fn reset(&mut self) {
        self.numerators.fill(0.0);
    }

    pub(crate) fn fits(&self, graph: &PhmmGraph) -> bool {
        self.n_states() == graph.n_states() && self.check(graph).is_ok()
    }

    /// First state whose transition block does not match `graph`.
    fn check(&self, graph: &PhmmGraph) -> Result<()> {
        for i in 0..graph.n_states() {
            let r = graph.out_range(i);
            if i >= self.n_states() || self.offsets[i] != r.start || self.offsets[i + 1] != r.end {
                return Err(Error::AccumulatorStateMissing { state: i });
            }
        }
        Ok(())
    }
}

/// Expected emission counts per (state, symbol).
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionAccumulator {
    sigma: usize,
    numerators: Vec<f64>,
}

impl EmissionAccumulator {
    pub fn new(graph: &PhmmGraph) -> Self {
        let sigma = graph.alphabet().len();
        Self { sigma, numerators: vec![0.0; graph.n_states() * sigma] }
    }

    pub fn n_states(&self) -> usize {
        self.numerators.len() / self.sigma
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn numerator(&self, state: usize, symbol: u8) -> f64 {
        self.numerators[state * self.sigma + symbol as usize]
    }

    pub fn numerators(&self, state: usize) -> &[f64] {
        &self.numerators[state * self.sigma..(state + 1) * self.sigma]
    }

    pub fn denominator(&self, state: usize) -> f64 {
        self.numerators(state).iter().sum()
    }

    pub fn reset(&mut self) {
        self.numerators.fill(0.0);
    }

    fn check(&self, graph: &PhmmGraph) -> Result<()> {
        if self.sigma != graph.alphabet().len() || self.n_states() < graph.n_states() {
            return Err(Error::AccumulatorStateMissing { state: self.n_states().min(graph.n_states()) });
        }
        Ok(())
    }
}

/// `sum_i F(i) * B(i)` over emitting states; the posterior normalizer of a row.
pub(crate) fn emitting_norm(graph: &PhmmGraph, f: &[f64], b: &[f64]) -> f64 {
    f.iter()
        .zip(b)
        .enumerate()
        .filter(|&(i, (&fv, _))| fv != 0.0 && !graph.is_silent(i))
        .map(|(_, (fv, bv))| fv * bv)
        .sum()
}

/// Adds the timestamp-`t` terms of the expected counts.
///
/// Requires backward rows `t` and (for `t < len`) `t + 1` to be resident.
/// Emissions use `F_t * B_t`, transitions into emitting states use
/// `F_t * alpha * e * B_{t+1}`, and transitions into silent states stay within
/// timestamp `t`. Each term is divided by the row normalizer, which cancels
/// the scale factors.
pub fn accumulate_updates(
    graph: &PhmmGraph,
    sequence: &[u8],
    t: usize,
    forward: &ForwardMatrix,
    buffer: &BackwardBuffer,
    transitions: &mut TransitionAccumulator,
    emissions: &mut EmissionAccumulator,
) -> Result<()> {
    let len = forward.len();
    if t > len || sequence.len() != len || !buffer.is_resident(t) || (t < len && !buffer.is_resident(t + 1)) {
        return Err(Error::SequencePositionOutOfRange { t, len });
    }
    transitions.check(graph)?;
    emissions.check(graph)?;
    let mut counters = OpCounters::default();
    accumulate_in(graph, sequence, t, forward, buffer, Products::new(graph, None), &mut counters, transitions, emissions);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn accumulate_in(
    graph: &PhmmGraph,
    sequence: &[u8],
    t: usize,
    forward: &ForwardMatrix,
    buffer: &BackwardBuffer,
    products: Products<'_>,
    counters: &mut OpCounters,
    transitions: &mut TransitionAccumulator,
    emissions: &mut EmissionAccumulator,
) {
    let len = forward.len();
    let f = forward.row(t);
    let b = buffer.row(t);

    // Row 0 has no emitting states; its terms share the normalizer of row 1.
    let norm = if t == 0 {
        if len == 0 {
            return;
        }
        forward.row_max(1) * emitting_norm(graph, forward.row(1), buffer.row(1))
    } else {
        emitting_norm(graph, f, b)
    };

    if norm > 0.0 {
        if t > 0 {
            let symbol = sequence[t - 1];
            for (i, (&fv, &bv)) in f.iter().zip(b).enumerate() {
                if fv != 0.0 && bv != 0.0 && !graph.is_silent(i) {
                    emissions.numerators[i * emissions.sigma + symbol as usize] += fv * bv / norm;
                    counters.multiplications += 1;
                    counters.bytes_moved += 8;
                }
            }
        }
        for (i, &fv) in f.iter().enumerate() {
            if fv == 0.0 {
                continue;
            }
            for k in graph.out_range(i) {
                let j = graph.target(k);
                if graph.is_silent(j) && b[j] != 0.0 {
                    transitions.add(k, fv * graph.prob(k) * b[j] / norm);
                    counters.multiplications += 2;
                    counters.bytes_moved += 8;
                }
            }
        }
    }

    if t < len {
        let next = buffer.row(t + 1);
        let denom = forward.row_max(t + 1) * emitting_norm(graph, forward.row(t + 1), next);
        if denom > 0.0 {
            let symbol = sequence[t];
            for (i, &fv) in f.iter().enumerate() {
                if fv == 0.0 {
                    continue;
                }
                for (slot, k) in graph.out_range(i).enumerate() {
                    let j = graph.target(k);
                    if graph.is_silent(j) || next[j] == 0.0 {
                        continue;
                    }
                    let p = products.get(i, k, slot, symbol, counters);
                    transitions.add(k, fv * p * next[j] / denom);
                    counters.multiplications += 2;
                    counters.bytes_moved += 8;
                }
            }
        }
    }
}

/// Writes the re-estimated probabilities into a copy of `graph`.
///
/// Rows whose denominator is zero keep their current values. Every other row
/// becomes `numerator / denominator + PSEUDOCOUNT`, renormalized to sum to 1.
/// The start distribution is not re-estimated.
pub fn finalize_updates(
    transitions: &TransitionAccumulator,
    emissions: &EmissionAccumulator,
    graph: &PhmmGraph,
) -> Result<PhmmGraph> {
    transitions.check(graph)?;
    emissions.check(graph)?;
    let mut probs = graph.transition_probs().to_vec();
    for i in 0..graph.n_states() {
        let range = graph.out_range(i);
        let denom = transitions.denominator(i);
        if range.is_empty() || !(denom > 0.0 && denom.is_finite()) {
            continue;
        }
        normalize_with_pseudocount(&mut probs[range.clone()], transitions.numerators(i), denom);
    }
    let mut emis = graph.emissions().to_vec();
    let sigma = graph.alphabet().len();
    for i in 0..graph.n_states() {
        let denom = emissions.denominator(i);
        if graph.is_silent(i) || !(denom > 0.0 && denom.is_finite()) {
            continue;
        }
        normalize_with_pseudocount(&mut emis[i * sigma..(i + 1) * sigma], emissions.numerators(i), denom);
    }
    Ok(graph.with_parameters(probs, emis))
}

fn normalize_with_pseudocount(out: &mut [f64], numerators: &[f64], denom: f64) {
    let mut sum = 0.0;
    for (o, &n) in out.iter_mut().zip(numerators) {
        *o = n / denom + PSEUDOCOUNT;
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}
