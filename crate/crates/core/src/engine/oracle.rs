//! Dense log-domain reference evaluation.
//!
//! Pull-form recurrences over full `(len + 1) x N` matrices, every value kept
//! as a natural log. Nothing here is shared with the optimized path except the
//! graph accessors.

use super::check_inputs;
use crate::error::{Error, Result};
use crate::model::PhmmGraph;

pub const ORACLE_MAX_STATES: usize = 10_000;
pub const ORACLE_MAX_LEN: usize = 1_000;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DenseReference {
    n_states: usize,
    len: usize,
    log_forward: Vec<f64>,
    log_backward: Vec<f64>,
    pub log_likelihood: f64,
    /// Expected transition counts, indexed like the graph's transition table.
    pub transition_counts: Vec<f64>,
    /// Expected emission counts, `N x |alphabet|`.
    pub emission_counts: Vec<f64>,
    /// Graph with re-estimated parameters.
    pub graph: PhmmGraph,
}

impl DenseReference {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// `ln F_t(i)`; row 0 holds silent states before the first symbol.
    pub fn log_forward(&self, t: usize, i: usize) -> f64 {
        self.log_forward[t * self.n_states + i]
    }

    pub fn log_backward(&self, t: usize, i: usize) -> f64 {
        self.log_backward[t * self.n_states + i]
    }

    /// `ln sum_i F_t(i) B_t(i)` over emitting states; equals the log-likelihood
    /// for every `t >= 1`.
    pub fn log_posterior_mass(&self, graph: &PhmmGraph, t: usize) -> f64 {
        logsumexp((0..self.n_states).filter(|&i| !graph.is_silent(i)).map(|i| self.log_forward(t, i) + self.log_backward(t, i)))
    }
}

fn logsumexp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Evaluates forward, backward and one re-estimation step densely.
pub fn naive_reference(graph: &PhmmGraph, sequence: &[u8]) -> Result<DenseReference> {
    let n = graph.n_states();
    let len = sequence.len();
    if n > ORACLE_MAX_STATES || len > ORACLE_MAX_LEN {
        return Err(Error::InstanceTooLarge { states: n, len });
    }
    check_inputs(graph, sequence, ORACLE_MAX_LEN)?;

    let transitions: Vec<_> = graph.transitions().collect();
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, tr) in transitions.iter().enumerate() {
        incoming[tr.to].push(k);
    }
    let ln_a: Vec<f64> = transitions.iter().map(|tr| tr.prob.ln()).collect();
    let ln_e = |i: usize, c: u8| graph.emission(i, c).ln();
    let at = |t: usize, i: usize| t * n + i;

    let mut lf = vec![f64::NEG_INFINITY; (len + 1) * n];
    for i in 0..n {
        if graph.is_silent(i) {
            let terms: Vec<f64> = std::iter::once(graph.start(i).ln())
                .chain(incoming[i].iter().map(|&k| lf[at(0, transitions[k].from)] + ln_a[k]))
                .collect();
            lf[at(0, i)] = logsumexp(terms.iter().copied());
        }
    }
    for t in 1..=len {
        let c = sequence[t - 1];
        for i in 0..n {
            let mut terms = Vec::new();
            if graph.is_silent(i) {
                for &k in &incoming[i] {
                    terms.push(lf[at(t, transitions[k].from)] + ln_a[k]);
                }
                lf[at(t, i)] = logsumexp(terms.iter().copied());
            } else {
                if t == 1 {
                    terms.push(graph.start(i).ln());
                }
                for &k in &incoming[i] {
                    terms.push(lf[at(t - 1, transitions[k].from)] + ln_a[k]);
                }
                lf[at(t, i)] = logsumexp(terms.iter().copied()) + ln_e(i, c);
            }
        }
    }
    let log_likelihood = logsumexp((0..n).filter(|&i| graph.is_end(i)).map(|i| lf[at(len, i)]));

    let mut lb = vec![f64::NEG_INFINITY; (len + 1) * n];
    for t in (0..=len).rev() {
        for i in (0..n).rev() {
            let mut terms = Vec::new();
            if t == len && graph.is_end(i) {
                terms.push(0.0);
            }
            for k in graph.out_range(i) {
                let j = transitions[k].to;
                if graph.is_silent(j) {
                    terms.push(ln_a[k] + lb[at(t, j)]);
                } else if t < len {
                    terms.push(ln_a[k] + ln_e(j, sequence[t]) + lb[at(t + 1, j)]);
                }
            }
            lb[at(t, i)] = logsumexp(terms.iter().copied());
        }
    }

    let sigma = graph.alphabet().len();
    let mut tc = vec![0.0; transitions.len()];
    let mut ec = vec![0.0; n * sigma];
    if log_likelihood.is_finite() {
        for t in 0..=len {
            if t > 0 {
                for i in (0..n).filter(|&i| !graph.is_silent(i)) {
                    ec[i * sigma + sequence[t - 1] as usize] += (lf[at(t, i)] + lb[at(t, i)] - log_likelihood).exp();
                }
            }
            for (k, tr) in transitions.iter().enumerate() {
                let x = if graph.is_silent(tr.to) {
                    lf[at(t, tr.from)] + ln_a[k] + lb[at(t, tr.to)]
                } else if t < len {
                    lf[at(t, tr.from)] + ln_a[k] + ln_e(tr.to, sequence[t]) + lb[at(t + 1, tr.to)]
                } else {
                    continue;
                };
                tc[k] += (x - log_likelihood).exp();
            }
        }
    }

    let mut probs = graph.transition_probs().to_vec();
    for i in 0..n {
        let r = graph.out_range(i);
        reestimate(&mut probs[r.clone()], &tc[r]);
    }
    let mut emissions = graph.emissions().to_vec();
    for i in (0..n).filter(|&i| !graph.is_silent(i)) {
        reestimate(&mut emissions[i * sigma..(i + 1) * sigma], &ec[i * sigma..(i + 1) * sigma]);
    }

    Ok(DenseReference {
        n_states: n,
        len,
        log_forward: lf,
        log_backward: lb,
        log_likelihood,
        transition_counts: tc,
        emission_counts: ec,
        graph: graph.with_parameters(probs, emissions),
    })
}

fn reestimate(row: &mut [f64], counts: &[f64]) {
    let total: f64 = counts.iter().sum();
    if row.is_empty() || total <= 0.0 {
        return;
    }
    let smoothed: Vec<f64> = counts.iter().map(|c| c / total + EPS).collect();
    let z: f64 = smoothed.iter().sum();
    for (r, s) in row.iter_mut().zip(smoothed) {
        *r = s / z;
    }
}
