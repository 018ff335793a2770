//! Synthetic benchmark comparing engine variants on one error-correction chunk.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{naive_reference, score_with, train_single_in, OpCounters, TrainOptions, TrainingWorkspace, MAX_CHUNK};
use crate::error::Result;
use crate::filter::FilterConfig;
use crate::model::{build_error_correction, Alphabet, PhmmGraph, PriorConfig};

pub const BENCH_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub seed: u64,
    pub reads: usize,
    pub chunk_length: usize,
    /// Per-symbol probability of a substitution, insertion or deletion.
    pub error_rate: f64,
    pub filter: FilterConfig,
    /// Also run the dense reference on the first read and record the deviation.
    pub check_oracle: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            reads: 20,
            chunk_length: 650,
            error_rate: 0.05,
            filter: FilterConfig::default(),
            check_oracle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub variant: String,
    pub filter: bool,
    pub lut: bool,
    pub partial_compute: bool,
    pub n_states: usize,
    pub timestamps: u64,
    pub forward_ms: f64,
    pub train_ms: f64,
    pub counters: OpCounters,
    /// Mean states kept per timestamp; all states when unfiltered.
    pub selected_per_timestamp: f64,
    /// Log-likelihood of the last read before its update.
    pub log_likelihood: f64,
    /// Largest relative difference to the dense reference, when checked.
    pub oracle_deviation: Option<f64>,
}

/// Random chunk plus noisy copies of it.
pub fn synthetic_reads(seed: u64, len: usize, reads: usize, error_rate: f64) -> (Vec<u8>, Vec<Vec<u8>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<u8> = (0..len).map(|_| rng.gen_range(0..4)).collect();
    let out = (0..reads).map(|_| mutate(&mut rng, &truth, error_rate)).collect();
    (truth, out)
}

/// Copies `seq` with substitutions, insertions and deletions at `rate` each
/// third.
pub fn mutate(rng: &mut impl Rng, seq: &[u8], rate: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(seq.len() + 8);
    for &c in seq {
        let r: f64 = rng.gen();
        if r < rate / 3.0 {
            out.push((c + rng.gen_range(1..4)) % 4);
        } else if r < 2.0 * rate / 3.0 {
            out.push(c);
            out.push(rng.gen_range(0..4));
        } else if r < rate {
            // deletion
        } else {
            out.push(c);
        }
    }
    if out.is_empty() {
        out.push(seq[0]);
    }
    out
}

fn variants(filter: FilterConfig) -> Vec<(&'static str, TrainOptions)> {
    let base = TrainOptions { chunk_length: MAX_CHUNK, ..TrainOptions::default() };
    vec![
        ("optimized", base),
        ("no-lut", base.with_lut(false)),
        ("no-partial-compute", base.with_partial_compute(false)),
        ("histogram-filter", base.with_filter(FilterConfig { kind: crate::filter::FilterKind::Histogram, ..filter })),
        ("sort-filter", base.with_filter(FilterConfig { kind: crate::filter::FilterKind::Sort, ..filter })),
    ]
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| if x == y { 0.0 } else { (x - y).abs() / x.abs().max(y.abs()) })
        .fold(0.0, f64::max)
}

fn oracle_deviation(graph: &PhmmGraph, read: &[u8], options: &TrainOptions) -> Result<f64> {
    let reference = naive_reference(graph, read)?;
    let mut ws = TrainingWorkspace::new();
    let ours = train_single_in(&mut ws, graph, read, options)?;
    let ll = (ours.log_likelihood - reference.log_likelihood).abs() / reference.log_likelihood.abs().max(1.0);
    Ok(max_rel(ours.graph.transition_probs(), reference.graph.transition_probs())
        .max(max_rel(ours.graph.emissions(), reference.graph.emissions()))
        .max(ll))
}

/// Trains one chunk graph on every read (sequentially) under each variant.
pub fn bench(config: &BenchConfig) -> Result<Vec<BenchReport>> {
    let alphabet = Alphabet::dna();
    let (truth, reads) = synthetic_reads(config.seed, config.chunk_length, config.reads, config.error_rate);
    let graph = build_error_correction(&alphabet.decode(&truth), &alphabet, 6, 2, &PriorConfig::default())?;
    let timestamps: u64 = reads.iter().map(|r| r.len() as u64).sum();
    let mut out = Vec::new();
    for (name, options) in variants(config.filter) {
        let t0 = Instant::now();
        for r in &reads {
            score_with(&graph, r, &options)?;
        }
        let forward_ms = t0.elapsed().as_secs_f64() * 1e3;

        let mut ws = TrainingWorkspace::new();
        let mut g = graph.clone();
        let mut counters = OpCounters::default();
        let mut ll = f64::NEG_INFINITY;
        let t0 = Instant::now();
        for r in &reads {
            let res = train_single_in(&mut ws, &g, r, &options)?;
            counters += res.counters;
            ll = res.log_likelihood;
            g = res.graph;
        }
        let train_ms = t0.elapsed().as_secs_f64() * 1e3;
        let oracle = if config.check_oracle && options.filter.is_none() && !reads.is_empty() {
            Some(oracle_deviation(&graph, &reads[0], &options)?)
        } else {
            None
        };
        let selected = if options.filter.is_some() {
            counters.filter_selected as f64 / timestamps.max(1) as f64
        } else {
            graph.n_states() as f64
        };
        out.push(BenchReport {
            variant: name.to_string(),
            filter: options.filter.is_some(),
            lut: options.lut_enabled,
            partial_compute: options.partial_compute,
            n_states: graph.n_states(),
            timestamps,
            forward_ms,
            train_ms,
            counters,
            selected_per_timestamp: selected,
            log_likelihood: ll,
            oracle_deviation: oracle,
        });
    }
    Ok(out)
}

/// CSV rendering. Timing columns are left empty when `timing` is false so the
/// output is reproducible byte for byte.
pub fn bench_csv(reports: &[BenchReport], timing: bool) -> String {
    let mut out = format!("#schema={BENCH_SCHEMA}\n");
    out.push_str(
        "variant,filter,lut,partial_compute,n_states,timestamps,forward_ms,train_ms,multiplications,\
         product_requests,lut_hits,lut_builds,lut_passthrough,lut_hit_ratio,filter_inserted,filter_selected,\
         selected_per_timestamp,bytes_moved,peak_backward_rows,log_likelihood,oracle_deviation\n",
    );
    for r in reports {
        let c = &r.counters;
        let (f, t) = if timing { (format!("{:.3}", r.forward_ms), format!("{:.3}", r.train_ms)) } else { Default::default() };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{f},{t},{},{},{},{},{},{:.6},{},{},{:.3},{},{},{:.9},{}",
            r.variant,
            r.filter as u8,
            r.lut as u8,
            r.partial_compute as u8,
            r.n_states,
            r.timestamps,
            c.multiplications,
            c.product_requests,
            c.lut_hits,
            c.lut_builds,
            c.lut_passthrough,
            c.lut_hit_ratio(),
            c.filter_inserted,
            c.filter_selected,
            r.selected_per_timestamp,
            c.bytes_moved,
            c.peak_backward_rows,
            r.log_likelihood,
            r.oracle_deviation.map(|d| format!("{d:.3e}")).unwrap_or_default(),
        );
    }
    out
}
