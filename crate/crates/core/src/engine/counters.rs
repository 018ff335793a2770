use std::ops::AddAssign;

/// Operation counters collected while running the engine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounters {
    /// Floating-point multiplications in forward, backward and update sweeps.
    pub multiplications: u64,
    /// Transition x emission products consumed.
    pub product_requests: u64,
    /// Products served from a resident product table.
    pub lut_hits: u64,
    /// Products computed while building product tables.
    pub lut_builds: u64,
    /// Products computed on demand (table disabled or state not resident).
    pub lut_passthrough: u64,
    /// Values offered to the state filter.
    pub filter_inserted: u64,
    /// States kept by the state filter.
    pub filter_selected: u64,
    /// Bytes written to or read from forward rows, backward rows and accumulators.
    pub bytes_moved: u64,
    /// Largest number of backward rows resident at once.
    pub peak_backward_rows: u64,
}

impl OpCounters {
    /// Share of transition x emission products that did not need a fresh
    /// multiplication.
    pub fn lut_hit_ratio(&self) -> f64 {
        let produced = self.lut_hits + self.lut_builds + self.lut_passthrough;
        if produced == 0 {
            0.0
        } else {
            self.lut_hits as f64 / produced as f64
        }
    }
}

impl AddAssign for OpCounters {
    fn add_assign(&mut self, o: Self) {
        self.multiplications += o.multiplications;
        self.product_requests += o.product_requests;
        self.lut_hits += o.lut_hits;
        self.lut_builds += o.lut_builds;
        self.lut_passthrough += o.lut_passthrough;
        self.filter_inserted += o.filter_inserted;
        self.filter_selected += o.filter_selected;
        self.bytes_moved += o.bytes_moved;
        self.peak_backward_rows = self.peak_backward_rows.max(o.peak_backward_rows);
    }
}
