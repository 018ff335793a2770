use std::ops::Range;

use rayon::prelude::*;

use super::viterbi::{argmax_symbol, consensus_states};
use crate::engine::{train_single_in, OpCounters, StepSet, TrainOptions, TrainingWorkspace, DEFAULT_CHUNK, MAX_CHUNK, MIN_CHUNK};
use crate::error::{Error, Result};
use crate::filter::FilterConfig;
use crate::io::{FastaRecord, Mapping};
use crate::model::{build_error_correction, start_distribution, Alphabet, PhmmGraph, PriorConfig, State, Transition};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionOptions {
    pub chunk_length: usize,
    pub max_deletion: usize,
    pub max_insertion: usize,
    pub priors: PriorConfig,
    pub filter: Option<FilterConfig>,
    pub lut_enabled: bool,
    /// Segments covering fewer chunk columns than this are ignored.
    pub min_overlap: usize,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        Self {
            chunk_length: DEFAULT_CHUNK,
            max_deletion: 6,
            max_insertion: 2,
            priors: PriorConfig::default(),
            filter: None,
            lut_enabled: true,
            min_overlap: 10,
        }
    }
}

/// Part of one read placed on a chunk.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub read_id: String,
    /// Chunk-relative, 0-based columns the segment covers.
    pub columns: Range<usize>,
    pub codes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    /// Assembly offset of the first symbol.
    pub start: usize,
    /// Columns this chunk decodes. `sequence` may run up to
    /// [`BOUNDARY_MARGIN`] symbols further so that the chunk's last column is
    /// not the end of its graph.
    pub length: usize,
    pub sequence: Vec<u8>,
    pub segments: Vec<Segment>,
}

/// Columns borrowed from the next chunk when training a chunk graph.
pub const BOUNDARY_MARGIN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub sequence: String,
    pub chunks: usize,
    pub segments_trained: usize,
    pub counters: OpCounters,
}

/// Splits `len` symbols into the fewest chunks of at most `chunk_length`,
/// with sizes differing by at most one.
pub fn chunk_ranges(len: usize, chunk_length: usize) -> Vec<Range<usize>> {
    if len == 0 {
        return Vec::new();
    }
    let count = len.div_ceil(chunk_length);
    let (base, extra) = (len / count, len % count);
    let mut out = Vec::with_capacity(count);
    let mut at = 0;
    for k in 0..count {
        let size = base + usize::from(k < extra);
        out.push(at..at + size);
        at += size;
    }
    out
}

/// Places every mapped segment on the chunks it overlaps, keeping input order.
pub fn plan_chunks(
    assembly: &[u8],
    reads: &[FastaRecord],
    mappings: &[Mapping],
    alphabet: &Alphabet,
    options: &CorrectionOptions,
) -> Result<Vec<Chunk>> {
    let len = assembly.len();
    let mut placed = Vec::with_capacity(mappings.len());
    for m in mappings {
        if m.start >= len {
            return Err(Error::MappingOutOfBounds { read: m.read_id.clone(), start: m.start, len });
        }
        let text = m.resolve(reads)?;
        let codes = alphabet.encode(&text).map_err(|e| match e {
            Error::UnknownSymbol { position, symbol } => Error::AlphabetMismatch(format!(
                "read '{}' has symbol '{symbol}' at position {position}",
                m.read_id
            )),
            other => other,
        })?;
        placed.push((m, codes));
    }

    let ranges = chunk_ranges(len, options.chunk_length);
    let placed: Vec<(&Mapping, Vec<u8>, ReadPlacement)> = placed
        .into_par_iter()
        .map(|(m, codes)| {
            let p = place_read(&codes, &assembly[m.start..]);
            (m, codes, p)
        })
        .collect();
    Ok(ranges
        .into_iter()
        .map(|r| {
            let end = (r.end + BOUNDARY_MARGIN).min(len);
            let mut segments = Vec::new();
            for (m, codes, p) in &placed {
                let covered_end = m.start + p.columns;
                let a = r.start.max(m.start);
                let b = end.min(covered_end);
                if b <= a {
                    continue;
                }
                let columns = (a - r.start)..(b - r.start);
                if a >= r.end || columns.len() < options.min_overlap.min(r.len()) {
                    continue;
                }
                let ra = p.offsets[a - m.start];
                // the last chunk keeps any read tail running past the assembly
                let rb = if b == len { codes.len() } else { p.offsets[b - m.start] };
                let rb = rb.min(ra + MAX_CHUNK);
                if rb <= ra {
                    continue;
                }
                segments.push(Segment { read_id: m.read_id.clone(), columns, codes: codes[ra..rb].to_vec() });
            }
            Chunk { start: r.start, length: r.len(), sequence: assembly[r.start..end].to_vec(), segments }
        })
        .collect())
}

/// Where a read lands on the assembly: `offsets[j]` is the number of read
/// symbols consumed once assembly column boundary `j` is reached (symbols
/// inserted at a boundary count toward the left), and `columns` is the number
/// of assembly columns the read covers.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ReadPlacement {
    pub offsets: Vec<usize>,
    pub columns: usize,
}

// Ties between equal-cost moves go to the lowest code. Preferring gaps during
// the backward trace places indels as far right as possible, matching the
// placement the graph priors favour.
const UP: u8 = 0;
const LEFT: u8 = 1;
const DIAG: u8 = 2;

/// Banded edit-distance alignment of `read` against a prefix of `assembly`.
/// The read starts at assembly column 0; the alignment may stop at any
/// assembly column once the read is consumed, or leave a read tail once the
/// assembly is exhausted.
pub(crate) fn place_read(read: &[u8], assembly: &[u8]) -> ReadPlacement {
    let n = read.len();
    let w = 16 + n / 10;
    let m = assembly.len().min(n + w);
    let width = 2 * w + 1;
    // column j of row i lives at band index j + w - i
    let band = |i: usize, j: usize| (j + w).checked_sub(i).filter(|&k| k < width);
    let mut dir = vec![u8::MAX; (n + 1) * width];
    let mut prev = vec![u32::MAX; width];
    let mut cur = vec![u32::MAX; width];
    let mut best = (u32::MAX, 0usize, 0usize);
    let consider = |cost: u32, i: usize, j: usize, best: &mut (u32, usize, usize)| {
        // prefer consuming the whole read, then covering more assembly
        let key = |c: u32, i: usize, j: usize| (c, usize::MAX - i, usize::MAX - j);
        if key(cost, i, j) < key(best.0, best.1, best.2) {
            *best = (cost, i, j);
        }
    };
    for i in 0..=n {
        cur.fill(u32::MAX);
        let j_lo = i.saturating_sub(w);
        let j_hi = (i + w).min(m);
        for j in j_lo..=j_hi {
            let k = band(i, j).unwrap();
            let (cost, d) = if i == 0 && j == 0 {
                (0, DIAG)
            } else {
                let mut c = (u32::MAX, DIAG);
                if i > 0 && j > 0 {
                    if let Some(kp) = band(i - 1, j - 1) {
                        let x = prev[kp].saturating_add(u32::from(read[i - 1] != assembly[j - 1]));
                        c = c.min((x, DIAG));
                    }
                }
                if i > 0 {
                    if let Some(kp) = band(i - 1, j) {
                        c = c.min((prev[kp].saturating_add(1), UP));
                    }
                }
                if j > 0 {
                    if let Some(kp) = band(i, j - 1) {
                        c = c.min((cur[kp].saturating_add(1), LEFT));
                    }
                }
                c
            };
            cur[k] = cost;
            dir[i * width + k] = d;
            if i == n || j == m {
                consider(cost, i, j, &mut best);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let (_, mut i, mut j) = best;
    let columns = j;
    let mut offsets = vec![0usize; columns + 1];
    offsets[j] = i;
    while i > 0 || j > 0 {
        match dir[i * width + band(i, j).unwrap()] {
            DIAG => {
                i -= 1;
                j -= 1;
            }
            UP => i -= 1,
            _ => j -= 1,
        }
        offsets[j] = offsets[j].max(i);
    }
    ReadPlacement { offsets, columns }
}

/// Sub-graph over columns `lo..=hi` (1-based) with renormalized rows and a
/// fresh start distribution. Also returns, per window transition, its global
/// index, and per window state, the in-window mass of its original row.
struct Window {
    graph: PhmmGraph,
    ids: Vec<usize>,
    global: Vec<usize>,
    mass: Vec<f64>,
}

fn window(graph: &PhmmGraph, lo: usize, hi: usize, options: &CorrectionOptions) -> Result<Window> {
    let n = graph.n_states();
    let ids: Vec<usize> = (0..n).filter(|&i| (lo..=hi).contains(&graph.state(i).column)).collect();
    let mut local = vec![usize::MAX; n];
    for (k, &i) in ids.iter().enumerate() {
        local[i] = k;
    }
    let sigma = graph.alphabet().len();
    let mut states = Vec::with_capacity(ids.len());
    let mut transitions = Vec::new();
    let mut global = Vec::new();
    let mut mass = Vec::with_capacity(ids.len());
    let mut emissions = Vec::with_capacity(ids.len() * sigma);
    for (li, &i) in ids.iter().enumerate() {
        let s = graph.state(i);
        states.push(State { kind: s.kind, column: s.column + 1 - lo });
        emissions.extend_from_slice(graph.emission_row(i));
        let inside: Vec<usize> = graph.out_range(i).filter(|&k| local[graph.target(k)] != usize::MAX).collect();
        let m: f64 = inside.iter().map(|&k| graph.prob(k)).sum();
        mass.push(m);
        if m > 0.0 {
            for k in inside {
                transitions.push(Transition { from: li, to: local[graph.target(k)], prob: graph.prob(k) / m });
                global.push(k);
            }
        }
    }
    let start = start_distribution(graph.design(), &states, options.max_deletion, &options.priors);
    let graph = PhmmGraph::new(graph.design(), graph.alphabet().clone(), hi + 1 - lo, states, transitions, emissions, start)?;
    Ok(Window { graph, ids, global, mass })
}

/// Trains the chunk graph on its segments one after another, then decodes.
pub fn correct_chunk(chunk: &Chunk, alphabet: &Alphabet, options: &CorrectionOptions) -> Result<(Vec<u8>, OpCounters)> {
    let mut counters = OpCounters::default();
    if chunk.segments.is_empty() {
        return Ok((chunk.sequence[..chunk.length].to_vec(), counters));
    }
    let text = alphabet.decode(&chunk.sequence);
    let mut graph = build_error_correction(&text, alphabet, options.max_deletion, options.max_insertion, &options.priors)?;
    let train = TrainOptions {
        filter: options.filter,
        lut_enabled: options.lut_enabled,
        partial_compute: true,
        chunk_length: MAX_CHUNK,
        steps: StepSet::ALL,
    };
    let mut ws = TrainingWorkspace::new();
    let sigma = alphabet.len();
    for seg in &chunk.segments {
        let w = window(&graph, seg.columns.start + 1, seg.columns.end, options)?;
        let trained = train_single_in(&mut ws, &w.graph, &seg.codes, &train)?;
        counters += trained.counters;
        let mut probs = graph.transition_probs().to_vec();
        let mut emissions = graph.emissions().to_vec();
        for (wk, &k) in w.global.iter().enumerate() {
            let from = w.graph.transition(wk).from;
            probs[k] = trained.graph.prob(wk) * w.mass[from];
        }
        for (li, &i) in w.ids.iter().enumerate() {
            emissions[i * sigma..(i + 1) * sigma].copy_from_slice(trained.graph.emission_row(li));
        }
        graph = graph.with_parameters(probs, emissions);
    }
    let decoded = consensus_states(&graph)?
        .into_iter()
        .filter(|&i| graph.state(i).column <= chunk.length)
        .map(|i| argmax_symbol(&graph, i))
        .collect();
    Ok((decoded, counters))
}

/// Corrects `assembly` with the mapped read segments; see [`correct_with_report`].
pub fn correct(assembly: &str, reads: &[FastaRecord], mappings: &[Mapping], options: &CorrectionOptions) -> Result<String> {
    Ok(correct_with_report(assembly, &Alphabet::dna(), reads, mappings, options)?.sequence)
}

/// Splits the assembly into chunks, trains one error-correction graph per
/// chunk on the segments overlapping it, and concatenates the consensus of
/// every chunk. Chunks without segments are copied unchanged.
pub fn correct_with_report(
    assembly: &str,
    alphabet: &Alphabet,
    reads: &[FastaRecord],
    mappings: &[Mapping],
    options: &CorrectionOptions,
) -> Result<Correction> {
    if !(MIN_CHUNK..=MAX_CHUNK).contains(&options.chunk_length) {
        return Err(Error::InvalidOptions(format!(
            "chunk length {} outside [{MIN_CHUNK}, {MAX_CHUNK}]",
            options.chunk_length
        )));
    }
    let codes = alphabet.encode(assembly)?;
    let chunks = plan_chunks(&codes, reads, mappings, alphabet, options)?;
    let results: Vec<(Vec<u8>, OpCounters)> =
        chunks.par_iter().map(|c| correct_chunk(c, alphabet, options)).collect::<Result<_>>()?;
    let mut counters = OpCounters::default();
    let mut out = Vec::with_capacity(codes.len());
    for (seq, c) in results {
        out.extend(seq);
        counters += c;
    }
    Ok(Correction {
        sequence: alphabet.decode(&out),
        chunks: chunks.len(),
        segments_trained: chunks.iter().map(|c| c.segments.len()).sum(),
        counters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::Strand;

    fn mapping(id: &str, start: usize, seg: &str) -> Mapping {
        Mapping { read_id: id.into(), start, strand: Strand::Forward, segment: seg.into() }
    }

    #[test]
    fn chunk_ranges_cover_everything() {
        assert_eq!(chunk_ranges(300, 650), vec![0..300]);
        assert_eq!(chunk_ranges(300, 150), vec![0..150, 150..300]);
        let r = chunk_ranges(1001, 500);
        assert_eq!(r.len(), 3);
        assert_eq!(r.last().unwrap().end, 1001);
        assert!(r.iter().all(|c| c.len() <= 500));
        assert!(chunk_ranges(0, 650).is_empty());
    }

    #[test]
    fn no_reads_returns_input() {
        let a = "ACGTTGCAACGT".repeat(20);
        assert_eq!(correct(&a, &[], &[], &CorrectionOptions::default()).unwrap(), a);
    }

    #[test]
    fn out_of_bounds_mapping() {
        let a = "ACGT".repeat(50);
        let m = [mapping("r", 200, "ACGT")];
        assert_eq!(
            correct(&a, &[], &m, &CorrectionOptions::default()),
            Err(Error::MappingOutOfBounds { read: "r".into(), start: 200, len: 200 })
        );
    }

    #[test]
    fn segments_are_clipped_to_chunks() {
        let a = Alphabet::dna();
        let asm = a.encode(&"ACGT".repeat(75)).unwrap();
        let m = [mapping("r", 100, &"ACGT".repeat(25))];
        let opts = CorrectionOptions { chunk_length: 150, ..Default::default() };
        let chunks = plan_chunks(&asm, &[], &m, &a, &opts).unwrap();
        assert_eq!(chunks.len(), 2);
        assert_eq!((chunks[0].length, chunks[0].sequence.len()), (150, 150 + BOUNDARY_MARGIN));
        assert_eq!(chunks[0].segments[0].columns, 100..150 + BOUNDARY_MARGIN);
        assert_eq!(chunks[0].segments[0].codes.len(), 50 + BOUNDARY_MARGIN);
        assert_eq!((chunks[1].length, chunks[1].sequence.len()), (150, 150));
        assert_eq!(chunks[1].segments[0].columns, 0..50);
    }

    #[test]
    fn placement_tracks_indels() {
        let asm = b"AACCGGTTAACCGGTT";
        // read lacks one G of asm[4..6] and carries a T after asm[10]
        let read = b"AACCGTTAACTCGGTT";
        let p = place_read(read, asm);
        assert_eq!(p.columns, 16);
        assert_eq!(p.offsets[4], 4);
        assert_eq!(p.offsets[6], 5);
        assert_eq!(p.offsets[10], 9);
        assert_eq!(p.offsets[11], 11);
        assert_eq!(p.offsets[16], 16);
        // read running past the assembly keeps its tail outside `offsets`
        let p = place_read(b"ACGTAAAA", b"ACGT");
        assert_eq!((p.columns, p.offsets[4]), (4, 4));
        // read ending early covers a prefix
        let p = place_read(b"ACG", b"ACGTTTTT");
        assert_eq!((p.columns, p.offsets[3]), (3, 3));
    }

    #[test]
    fn substitution_is_corrected() {
        let truth = "ACGTTGCAAGCTTACGGATCCATGCAAGTCGATCGGCTAGCTAGGCTTAACGTAGCTAGCATCGATCGTACGATCGATGCTAGCTAGCTGATCG";
        let mut asm = truth.to_string().into_bytes();
        asm[40] = if asm[40] == b'A' { b'C' } else { b'A' };
        let asm = String::from_utf8(asm).unwrap();
        let maps: Vec<Mapping> = (0..10).map(|k| mapping(&format!("r{k}"), 0, truth)).collect();
        assert_eq!(correct(&asm, &[], &maps, &CorrectionOptions::default()).unwrap(), truth);
    }
}
