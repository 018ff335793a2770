//! Best-n state selection per timestamp.
//!
//! [`HistogramFilter`] places each state into one of `n` equal-width bins over
//! `[0, 1]` and walks the bins from the top until the running count reaches the
//! filter size. The result always contains the exact top-n (plus the rest of
//! the bin where the count was crossed), without sorting.
//! [`SortFilter`] is the exact sort-based selection it replaces.

use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 16;
pub const DEFAULT_FILTER_SIZE: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Bin {
    /// Start of the bin's region in the slot arena.
    base: usize,
    /// Next free slot relative to `base`.
    offset: usize,
}

#[derive(Debug, Clone)]
pub struct HistogramFilter {
    bin_count: usize,
    filter_size: usize,
    capacity: usize,
    bins: Vec<Bin>,
    slots: Vec<u32>,
    inserted: usize,
}

impl HistogramFilter {
    pub fn new(bin_count: usize, filter_size: usize) -> Result<Self> {
        Self::with_capacity(bin_count, filter_size, 64)
    }

    /// `capacity` is the initial number of slots reserved per bin.
    pub fn with_capacity(bin_count: usize, filter_size: usize, capacity: usize) -> Result<Self> {
        if bin_count == 0 || filter_size == 0 {
            return Err(Error::InvalidOptions("filter bins and size must be positive".into()));
        }
        let capacity = capacity.max(1);
        let bins = (0..bin_count).map(|b| Bin { base: b * capacity, offset: 0 }).collect();
        Ok(Self {
            bin_count,
            filter_size,
            capacity,
            bins,
            slots: vec![0; bin_count * capacity],
            inserted: 0,
        })
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn filter_size(&self) -> usize {
        self.filter_size
    }

    pub fn bin_width(&self) -> f64 {
        1.0 / self.bin_count as f64
    }

    pub fn len(&self) -> usize {
        self.inserted
    }

    pub fn is_empty(&self) -> bool {
        self.inserted == 0
    }

    /// Bin of `value`: `min(floor(value * n), n - 1)`.
    pub fn bin_of(&self, value: f64) -> usize {
        ((value * self.bin_count as f64) as usize).min(self.bin_count - 1)
    }

    pub fn bin_len(&self, bin: usize) -> usize {
        self.bins[bin].offset
    }

    pub fn bin_members(&self, bin: usize) -> &[u32] {
        let b = self.bins[bin];
        &self.slots[b.base..b.base + b.offset]
    }

    fn grow(&mut self) {
        let new_capacity = self.capacity * 2;
        let mut slots = vec![0; self.bin_count * new_capacity];
        for (k, bin) in self.bins.iter_mut().enumerate() {
            let base = k * new_capacity;
            slots[base..base + bin.offset].copy_from_slice(&self.slots[bin.base..bin.base + bin.offset]);
            bin.base = base;
        }
        self.slots = slots;
        self.capacity = new_capacity;
    }

    pub fn insert(&mut self, state: u32, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidOptions(format!("filter value {value} outside [0, 1]")));
        }
        let b = self.bin_of(value);
        if self.bins[b].offset == self.capacity {
            self.grow();
        }
        let bin = &mut self.bins[b];
        self.slots[bin.base + bin.offset] = state;
        bin.offset += 1;
        self.inserted += 1;
        Ok(())
    }

    /// Number of bins visited by [`select`](Self::select), counted from the top.
    pub fn crossing_depth(&self) -> usize {
        let mut running = 0;
        for (depth, b) in (0..self.bin_count).rev().enumerate() {
            running += self.bins[b].offset;
            if running >= self.filter_size {
                return depth + 1;
            }
        }
        self.bin_count
    }

    /// States in every bin down to (and including) the one where the running
    /// count first reaches the filter size, in ascending id order.
    pub fn select(&self) -> Vec<u32> {
        let depth = self.crossing_depth();
        let mut out: Vec<u32> = (self.bin_count - depth..self.bin_count)
            .flat_map(|b| self.bin_members(b).iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn reset(&mut self) {
        for bin in &mut self.bins {
            bin.offset = 0;
        }
        self.inserted = 0;
    }
}

/// Exact top-n selection by sorting; states tied with the n-th value are kept.
#[derive(Debug, Clone)]
pub struct SortFilter {
    filter_size: usize,
    entries: Vec<(f64, u32)>,
}

impl SortFilter {
    pub fn new(filter_size: usize) -> Result<Self> {
        if filter_size == 0 {
            return Err(Error::InvalidOptions("filter size must be positive".into()));
        }
        Ok(Self { filter_size, entries: Vec::new() })
    }

    pub fn insert(&mut self, state: u32, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidOptions(format!("filter value {value} outside [0, 1]")));
        }
        self.entries.push((value, state));
        Ok(())
    }

    pub fn select(&self) -> Vec<u32> {
        top_k_with_ties(&self.entries, self.filter_size)
    }

    pub fn reset(&mut self) {
        self.entries.clear();
    }
}

/// All states whose value is at least the k-th largest value.
pub fn top_k_with_ties(entries: &[(f64, u32)], k: usize) -> Vec<u32> {
    if entries.len() <= k {
        let mut all: Vec<u32> = entries.iter().map(|e| e.1).collect();
        all.sort_unstable();
        return all;
    }
    let mut values: Vec<f64> = entries.iter().map(|e| e.0).collect();
    values.sort_unstable_by(|a, b| b.total_cmp(a));
    let threshold = values[k - 1];
    let mut out: Vec<u32> = entries.iter().filter(|e| e.0 >= threshold).map(|e| e.1).collect();
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Histogram,
    Sort,
}

/// Filter settings carried by training options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterConfig {
    pub kind: FilterKind,
    pub bins: usize,
    pub size: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { kind: FilterKind::Histogram, bins: DEFAULT_BINS, size: DEFAULT_FILTER_SIZE }
    }
}

impl FilterConfig {
    pub fn histogram(bins: usize, size: usize) -> Self {
        Self { kind: FilterKind::Histogram, bins, size }
    }

    pub fn sort(size: usize) -> Self {
        Self { kind: FilterKind::Sort, bins: DEFAULT_BINS, size }
    }
}

/// Either filter behind one interface.
#[derive(Debug, Clone)]
pub enum StateFilter {
    Histogram(HistogramFilter),
    Sort(SortFilter),
}

impl StateFilter {
    pub fn from_config(config: &FilterConfig, n_states: usize) -> Result<Self> {
        Ok(match config.kind {
            FilterKind::Histogram => {
                let per_bin = (n_states / config.bins.max(1)).max(16);
                StateFilter::Histogram(HistogramFilter::with_capacity(config.bins, config.size, per_bin)?)
            }
            FilterKind::Sort => StateFilter::Sort(SortFilter::new(config.size)?),
        })
    }

    pub fn insert(&mut self, state: u32, value: f64) -> Result<()> {
        match self {
            StateFilter::Histogram(f) => f.insert(state, value),
            StateFilter::Sort(f) => f.insert(state, value),
        }
    }

    pub fn select(&self) -> Vec<u32> {
        match self {
            StateFilter::Histogram(f) => f.select(),
            StateFilter::Sort(f) => f.select(),
        }
    }

    pub fn reset(&mut self) {
        match self {
            StateFilter::Histogram(f) => f.reset(),
            StateFilter::Sort(f) => f.reset(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bin_mapping() {
        let f = HistogramFilter::new(16, 500).unwrap();
        assert_eq!(f.bin_width(), 0.0625);
        assert_eq!(f.bin_of(0.93), 14);
        assert_eq!(f.bin_of(1.0), 15);
        assert_eq!(f.bin_of(0.0), 0);
    }

    #[test]
    fn hand_traced_walk_includes_whole_crossing_bin() {
        let mut f = HistogramFilter::new(16, 2).unwrap();
        for (id, v) in [(0, 0.9), (1, 0.55), (2, 0.5), (3, 0.1)] {
            f.insert(id, v).unwrap();
        }
        assert_eq!(f.select(), vec![0, 1, 2]);
    }

    #[test]
    fn large_filter_keeps_everything() {
        let mut f = HistogramFilter::new(16, 10).unwrap();
        for id in 0..7 {
            f.insert(id, id as f64 / 7.0).unwrap();
        }
        assert_eq!(f.select(), (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn out_of_range_value_is_rejected() {
        let mut f = HistogramFilter::new(16, 10).unwrap();
        assert!(f.insert(0, 1.01).is_err());
        assert!(f.insert(0, -0.1).is_err());
        assert!(f.insert(0, f64::NAN).is_err());
    }

    #[test]
    fn reset_restores_a_fresh_filter() {
        let mut used = HistogramFilter::new(8, 3).unwrap();
        for id in 0..50 {
            used.insert(id, (id as f64 * 0.37) % 1.0).unwrap();
        }
        used.reset();
        assert!(used.is_empty());
        assert!((0..8).all(|b| used.bin_len(b) == 0));
        let mut fresh = HistogramFilter::new(8, 3).unwrap();
        for (id, v) in [(4, 0.2), (9, 0.8), (11, 0.81), (2, 0.05)] {
            used.insert(id, v).unwrap();
            fresh.insert(id, v).unwrap();
        }
        assert_eq!(used.select(), fresh.select());

        let mut empty = HistogramFilter::new(8, 3).unwrap();
        empty.reset();
        assert!(empty.is_empty());
    }

    #[test]
    fn arena_grows_past_initial_capacity() {
        let mut f = HistogramFilter::with_capacity(4, 1000, 2).unwrap();
        for id in 0..100 {
            f.insert(id, 0.99).unwrap();
        }
        assert_eq!(f.bin_len(3), 100);
        assert_eq!(f.select().len(), 100);
    }

    #[test]
    fn sort_filter_keeps_ties() {
        let entries = [(0.5, 0), (0.9, 1), (0.5, 2), (0.1, 3)];
        assert_eq!(top_k_with_ties(&entries, 2), vec![0, 1, 2]);
        assert_eq!(top_k_with_ties(&entries, 1), vec![1]);
    }

    proptest! {
        #[test]
        fn selection_is_a_superset_with_bounded_overshoot(
            values in prop::collection::vec(0.0f64..=1.0, 1..300),
            bins in 1usize..40,
            size in 1usize..100,
        ) {
            let mut f = HistogramFilter::new(bins, size).unwrap();
            let entries: Vec<(f64, u32)> = values.iter().enumerate().map(|(k, &v)| (v, k as u32)).collect();
            for &(v, id) in &entries {
                f.insert(id, v).unwrap();
            }
            let selected = f.select();
            let exact = top_k_with_ties(&entries, size);
            for id in &exact {
                prop_assert!(selected.binary_search(id).is_ok());
            }
            if selected.len() > size {
                let crossing = bins - f.crossing_depth();
                prop_assert!(selected.len() - size < f.bin_len(crossing));
            }
        }

        #[test]
        fn selection_ignores_insertion_order(values in prop::collection::vec(0.0f64..=1.0, 1..100), size in 1usize..30) {
            let mut a = HistogramFilter::new(16, size).unwrap();
            let mut b = HistogramFilter::new(16, size).unwrap();
            for (k, &v) in values.iter().enumerate() {
                a.insert(k as u32, v).unwrap();
            }
            for (k, &v) in values.iter().enumerate().rev() {
                b.insert(k as u32, v).unwrap();
            }
            prop_assert_eq!(a.select(), b.select());
        }
    }
}
