use super::counters::OpCounters;
use super::lut::Products;
use crate::error::{Error, Result};
use crate::model::PhmmGraph;

/// Max-rescaled backward rows.
///
/// The default buffer keeps two timestamps resident (`t` and `t + 1`) and
/// rotates them as the sweep moves towards `t = 0`. A buffer built with
/// [`BackwardBuffer::full`] keeps every row instead, which is what a schedule
/// without partial compute needs.
///
/// Row 0 only carries silent states and is not rescaled.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardBuffer {
    n_states: usize,
    len: usize,
    keep_all: bool,
    rows: Vec<f64>,
    maxima: Vec<f64>,
    /// `log_norm[t] = sum_{u >= t} ln maxima[u]`, with `log_norm[len + 1] = 0`.
    log_norm: Vec<f64>,
    /// Smallest computed timestamp; `len + 1` before the base case is set.
    lowest: usize,
}

impl BackwardBuffer {
    /// Two-slot buffer for a sequence of `len` symbols.
    pub fn new(n_states: usize, len: usize) -> Self {
        let mut b = Self::empty();
        b.prepare(n_states, len, false);
        b
    }

    /// Buffer holding all `len + 1` rows.
    pub fn full(n_states: usize, len: usize) -> Self {
        let mut b = Self::empty();
        b.prepare(n_states, len, true);
        b
    }

    fn empty() -> Self {
        Self { n_states: 0, len: 0, keep_all: false, rows: Vec::new(), maxima: Vec::new(), log_norm: Vec::new(), lowest: 0 }
    }

    /// Resizes the buffer for another sequence, reusing its allocation.
    pub(crate) fn prepare(&mut self, n_states: usize, len: usize, keep_all: bool) {
        self.n_states = n_states;
        self.len = len;
        self.keep_all = keep_all;
        let rows = if keep_all { len + 1 } else { 2 };
        self.rows.clear();
        self.rows.resize(rows * n_states, 0.0);
        self.maxima.clear();
        self.maxima.resize(len + 1, 1.0);
        self.log_norm.clear();
        self.log_norm.resize(len + 2, 0.0);
        self.lowest = len + 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of rows the buffer can hold at once.
    pub fn resident_rows(&self) -> usize {
        self.rows.len() / self.n_states.max(1)
    }

    /// Smallest timestamp computed so far, if any.
    pub fn current(&self) -> Option<usize> {
        (self.lowest <= self.len).then_some(self.lowest)
    }

    pub fn is_resident(&self, t: usize) -> bool {
        t >= self.lowest && t <= self.len && (self.keep_all || t <= self.lowest + 1)
    }

    #[inline]
    fn slot(&self, t: usize) -> usize {
        if self.keep_all {
            t
        } else {
            t & 1
        }
    }

    /// Scaled row `t`. Panics if the row is not resident.
    pub fn row(&self, t: usize) -> &[f64] {
        assert!(self.is_resident(t), "backward row {t} is not resident");
        let s = self.slot(t) * self.n_states;
        &self.rows[s..s + self.n_states]
    }

    pub fn value(&self, t: usize, state: usize) -> f64 {
        self.row(t)[state]
    }

    /// Raw maximum of row `t` before rescaling.
    pub fn row_max(&self, t: usize) -> f64 {
        self.maxima[t]
    }

    /// Natural log of the unscaled backward value.
    pub fn log_value(&self, t: usize, state: usize) -> f64 {
        self.value(t, state).ln() + self.log_norm[t]
    }

    /// Sets row `len` to the base case: 1 on end-permitted states, closed over
    /// silent successors, then rescaled.
    pub fn set_base(&mut self, graph: &PhmmGraph) {
        let mut counters = OpCounters::default();
        self.set_base_in(graph, None, &mut counters);
    }

    pub(crate) fn set_base_in(&mut self, graph: &PhmmGraph, mask: Option<&[f64]>, counters: &mut OpCounters) {
        let n = self.n_states;
        let t = self.len;
        let s = self.slot(t) * n;
        let row = &mut self.rows[s..s + n];
        row.fill(0.0);
        for i in (0..n).rev() {
            if mask.is_some_and(|m| m[i] == 0.0) {
                continue;
            }
            let mut acc = if graph.is_end(i) { 1.0 } else { 0.0 };
            for k in graph.out_range(i) {
                let j = graph.target(k);
                if graph.is_silent(j) && row[j] != 0.0 {
                    acc += graph.prob(k) * row[j];
                    counters.multiplications += 1;
                }
            }
            row[i] = acc;
        }
        let max = rescale(row);
        counters.bytes_moved += 8 * row.iter().filter(|&&v| v > 0.0).count() as u64;
        self.maxima[t] = max;
        self.log_norm[t] = max.ln();
        self.lowest = t;
    }

    fn rows_for(&mut self, t: usize) -> (&mut [f64], &[f64]) {
        let n = self.n_states;
        let a = self.slot(t) * n;
        let b = self.slot(t + 1) * n;
        if a < b {
            let (lo, hi) = self.rows.split_at_mut(b);
            (&mut lo[a..a + n], &hi[..n])
        } else {
            let (lo, hi) = self.rows.split_at_mut(a);
            (&mut hi[..n], &lo[b..b + n])
        }
    }
}

/// Divides a row by its maximum and returns it. All-zero rows are left alone.
fn rescale(row: &mut [f64]) -> f64 {
    let max = row.iter().fold(0.0f64, |m, &v| m.max(v));
    if max > 0.0 {
        for v in row.iter_mut() {
            *v /= max;
        }
    }
    max
}

/// Computes backward row `t` from row `t + 1` already held by `buffer`.
///
/// For `t = 0` only silent states are filled (the path has not emitted yet) and
/// the row is left unscaled.
pub fn backward_step(graph: &PhmmGraph, sequence: &[u8], t: usize, buffer: &mut BackwardBuffer) -> Result<()> {
    let mut counters = OpCounters::default();
    backward_step_in(graph, sequence, t, buffer, Products::new(graph, None), None, &mut counters)
}

pub(crate) fn backward_step_in(
    graph: &PhmmGraph,
    sequence: &[u8],
    t: usize,
    buffer: &mut BackwardBuffer,
    products: Products<'_>,
    mask: Option<&[f64]>,
    counters: &mut OpCounters,
) -> Result<()> {
    let len = buffer.len;
    if t >= len || buffer.lowest != t + 1 || sequence.len() != len || buffer.n_states != graph.n_states() {
        return Err(Error::SequencePositionOutOfRange { t, len });
    }
    let symbol = sequence[t];
    let (cur, next) = buffer.rows_for(t);
    cur.fill(0.0);
    for i in (0..cur.len()).rev() {
        if (t == 0 && !graph.is_silent(i)) || mask.is_some_and(|m| m[i] == 0.0) {
            continue;
        }
        let mut acc = 0.0;
        for (slot, k) in graph.out_range(i).enumerate() {
            let j = graph.target(k);
            if graph.is_silent(j) {
                if cur[j] != 0.0 {
                    acc += graph.prob(k) * cur[j];
                    counters.multiplications += 1;
                }
            } else if next[j] != 0.0 {
                acc += products.get(i, k, slot, symbol, counters) * next[j];
                counters.multiplications += 1;
            }
        }
        cur[i] = acc;
    }
    let max = if t == 0 { 1.0 } else { rescale(cur) };
    counters.bytes_moved += 8 * cur.iter().filter(|&&v| v > 0.0).count() as u64;
    buffer.maxima[t] = max;
    buffer.log_norm[t] = buffer.log_norm[t + 1] + max.ln();
    buffer.lowest = t;
    Ok(())
}
