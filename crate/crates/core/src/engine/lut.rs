//! Memoized transition x emission products.
//!
//! Within one training pass the transition and emission probabilities are
//! fixed, so `alpha_ij * e_c(v_j)` only takes `out_degree(i) * |alphabet|`
//! distinct values per state. The table stores them in a fixed block of
//! `LUT_SLOTS * |alphabet|` entries per state (36 for DNA). States with more
//! than `LUT_SLOTS` transitions are not resident and fall back to multiplying.

use super::counters::OpCounters;
use crate::model::PhmmGraph;

pub const LUT_SLOTS: usize = 9;

const NOT_RESIDENT: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductTable {
    sigma: usize,
    stride: usize,
    base: Vec<usize>,
    entries: Vec<f64>,
    built: u64,
}

impl ProductTable {
    /// Entries reserved per resident state.
    pub fn entries_per_state(&self) -> usize {
        self.stride
    }

    pub fn is_resident(&self, state: usize) -> bool {
        self.base[state] != NOT_RESIDENT
    }

    pub fn resident_states(&self) -> usize {
        self.base.iter().filter(|&&b| b != NOT_RESIDENT).count()
    }

    /// Products computed while building the table.
    pub fn built_products(&self) -> u64 {
        self.built
    }

    #[inline]
    fn lookup(&self, state: usize, slot: usize, symbol: u8) -> Option<f64> {
        match self.base[state] {
            NOT_RESIDENT => None,
            b => Some(self.entries[b + slot * self.sigma + symbol as usize]),
        }
    }
}

/// Precomputes products for every state with at most [`LUT_SLOTS`] transitions.
/// Silent targets store the bare transition probability.
pub fn lut_build(graph: &PhmmGraph) -> ProductTable {
    let sigma = graph.alphabet().len();
    let stride = LUT_SLOTS * sigma;
    let n = graph.n_states();
    let mut base = vec![NOT_RESIDENT; n];
    let resident = (0..n).filter(|&i| graph.out_degree(i) <= LUT_SLOTS).count();
    let mut entries = vec![0.0; resident * stride];
    let mut next = 0;
    let mut built = 0;
    for (i, b) in base.iter_mut().enumerate() {
        if graph.out_degree(i) > LUT_SLOTS {
            continue;
        }
        *b = next;
        for (slot, k) in graph.out_range(i).enumerate() {
            let j = graph.target(k);
            let alpha = graph.prob(k);
            let block = &mut entries[next + slot * sigma..next + (slot + 1) * sigma];
            if graph.is_silent(j) {
                block.fill(alpha);
            } else {
                for (c, e) in block.iter_mut().enumerate() {
                    *e = alpha * graph.emission(j, c as u8);
                }
                built += sigma as u64;
            }
        }
        next += stride;
    }
    ProductTable { sigma, stride, base, entries, built }
}

/// `alpha_ij * e_symbol(v_j)` for the transition in `slot` of state `i`,
/// served from the table when the state is resident.
pub fn lut_get(table: &ProductTable, graph: &PhmmGraph, i: usize, slot: usize, symbol: u8) -> f64 {
    match table.lookup(i, slot, symbol) {
        Some(p) => p,
        None => direct_product(graph, graph.out_range(i).start + slot, symbol),
    }
}

#[inline]
fn direct_product(graph: &PhmmGraph, k: usize, symbol: u8) -> f64 {
    let j = graph.target(k);
    if graph.is_silent(j) {
        graph.prob(k)
    } else {
        graph.prob(k) * graph.emission(j, symbol)
    }
}

/// Product source used by the sweeps; counts every request.
#[derive(Clone, Copy)]
pub(crate) struct Products<'a> {
    pub graph: &'a PhmmGraph,
    pub table: Option<&'a ProductTable>,
}

impl<'a> Products<'a> {
    pub fn new(graph: &'a PhmmGraph, table: Option<&'a ProductTable>) -> Self {
        Self { graph, table }
    }

    /// Product for the transition with global index `k`, which is `slot` of state `i`.
    #[inline]
    pub fn get(&self, i: usize, k: usize, slot: usize, symbol: u8, counters: &mut OpCounters) -> f64 {
        counters.product_requests += 1;
        if let Some(p) = self.table.and_then(|t| t.lookup(i, slot, symbol)) {
            counters.lut_hits += 1;
            return p;
        }
        counters.lut_passthrough += 1;
        counters.multiplications += 1;
        direct_product(self.graph, k, symbol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_error_correction, build_traditional, Alphabet, PriorConfig, State, StateKind, Transition};

    #[test]
    fn dna_table_has_36_entries_per_state() {
        let g = build_error_correction("ACGTACGTACGT", &Alphabet::dna(), 6, 2, &PriorConfig::default()).unwrap();
        let t = lut_build(&g);
        assert_eq!(t.entries_per_state(), 36);
        assert_eq!(t.resident_states(), g.n_states());
    }

    #[test]
    fn every_entry_is_the_exact_product() {
        let g = build_traditional("ACGTTG", &Alphabet::dna(), &PriorConfig::default()).unwrap();
        let t = lut_build(&g);
        for i in 0..g.n_states() {
            for (slot, k) in g.out_range(i).enumerate() {
                let j = g.target(k);
                for c in 0..4u8 {
                    let expected = if g.is_silent(j) { g.prob(k) } else { g.prob(k) * g.emission(j, c) };
                    assert_eq!(lut_get(&t, &g, i, slot, c).to_bits(), expected.to_bits());
                }
            }
        }
    }

    #[test]
    fn wide_state_passes_through() {
        // state 0 fans out to 12 match states
        let a = Alphabet::dna();
        let n = 13;
        let states: Vec<State> = (1..=n).map(|c| State { kind: StateKind::Match, column: c }).collect();
        let mut transitions: Vec<Transition> =
            (1..n).map(|to| Transition { from: 0, to, prob: 1.0 / 12.0 }).collect();
        transitions.extend((1..n - 1).map(|k| Transition { from: k, to: k + 1, prob: 1.0 }));
        let emissions = (0..n * 4).map(|k| [0.1, 0.2, 0.3, 0.4][k % 4]).collect();
        let mut start = vec![0.0; n];
        start[0] = 1.0;
        let g = PhmmGraph::new(crate::model::Design::ErrorCorrection, a, n, states, transitions, emissions, start).unwrap();
        let t = lut_build(&g);
        assert!(!t.is_resident(0));
        assert!(t.is_resident(1));
        let k = g.out_range(0).start + 11;
        assert_eq!(lut_get(&t, &g, 0, 11, 2), g.prob(k) * g.emission(g.target(k), 2));
        let mut c = OpCounters::default();
        Products::new(&g, Some(&t)).get(0, k, 11, 2, &mut c);
        assert_eq!((c.lut_hits, c.lut_passthrough), (0, 1));
    }
}
