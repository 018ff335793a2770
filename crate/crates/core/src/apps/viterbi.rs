use crate::error::{Error, Result};
use crate::model::{argmax, PhmmGraph, StateKind};

const NONE: u32 = u32::MAX;

/// Consensus sequence of a graph: the most probable state path, where each
/// emitting state contributes its largest emission probability, read out as
/// the argmax symbol of every emitting state on the path.
///
/// Self-loops are ignored, so each state appears at most once. Ties prefer a
/// match predecessor, then the lower id; symbol ties prefer the lower index.
pub fn viterbi_decode(graph: &PhmmGraph) -> Result<Vec<u8>> {
    Ok(consensus_states(graph)?.into_iter().map(|i| argmax_symbol(graph, i)).collect())
}

/// Emitting states on the consensus path of [`viterbi_decode`], in order.
pub(crate) fn consensus_states(graph: &PhmmGraph) -> Result<Vec<usize>> {
    let n = graph.n_states();
    let incoming = incoming(graph);
    let mut score = vec![f64::NEG_INFINITY; n];
    let mut back = vec![NONE; n];
    for i in 0..n {
        let mut best = graph.start(i).ln();
        let mut from = NONE;
        for &(k, j) in &incoming[i] {
            if j == i {
                continue;
            }
            let s = score[j] + graph.prob(k).ln();
            if s > best || (s == best && s > f64::NEG_INFINITY && prefer(graph, j, from)) {
                best = s;
                from = j as u32;
            }
        }
        if !graph.is_silent(i) {
            best += graph.emission_row(i).iter().cloned().fold(0.0, f64::max).ln();
        }
        score[i] = best;
        back[i] = from;
    }

    let mut end = None::<usize>;
    for i in (0..n).filter(|&i| graph.is_end(i) && score[i] > f64::NEG_INFINITY) {
        match end {
            Some(e) if score[i] < score[e] || (score[i] == score[e] && !prefer(graph, i, e as u32)) => {}
            _ => end = Some(i),
        }
    }
    let mut state = end.ok_or(Error::NoPath)?;
    let mut out = Vec::new();
    loop {
        if !graph.is_silent(state) {
            out.push(state);
        }
        match back[state] {
            NONE => break,
            p => state = p as usize,
        }
    }
    out.reverse();
    Ok(out)
}

pub(crate) fn argmax_symbol(graph: &PhmmGraph, state: usize) -> u8 {
    argmax(graph.emission_row(state)) as u8
}

/// True when `candidate` should win a tie against `current`.
fn prefer(graph: &PhmmGraph, candidate: usize, current: u32) -> bool {
    if current == NONE {
        return false;
    }
    let cm = graph.state(candidate).kind == StateKind::Match;
    let om = graph.state(current as usize).kind == StateKind::Match;
    cm && !om
}

/// `(transition index, source)` pairs per target, in ascending source order.
pub(crate) fn incoming(graph: &PhmmGraph) -> Vec<Vec<(usize, usize)>> {
    let mut inc = vec![Vec::new(); graph.n_states()];
    for i in 0..graph.n_states() {
        for k in graph.out_range(i) {
            inc[graph.target(k)].push((k, i));
        }
    }
    inc
}

/// Most probable state path emitting `sequence`, as `(state, symbols consumed)`
/// pairs, with its log probability.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePath {
    pub steps: Vec<(usize, usize)>,
    pub log_probability: f64,
}

pub fn viterbi_path(graph: &PhmmGraph, sequence: &[u8]) -> Result<StatePath> {
    if sequence.is_empty() {
        return Err(Error::EmptySequence);
    }
    graph.alphabet().check_codes(sequence)?;
    let n = graph.n_states();
    let len = sequence.len();
    let incoming = incoming(graph);
    let mut v = vec![f64::NEG_INFINITY; (len + 1) * n];
    let mut back = vec![NONE; (len + 1) * n];
    for t in 0..=len {
        for i in 0..n {
            let silent = graph.is_silent(i);
            if t == 0 && !silent {
                continue;
            }
            let mut best = if (silent && t == 0) || (!silent && t == 1) { graph.start(i).ln() } else { f64::NEG_INFINITY };
            let mut from = NONE;
            let prev = if silent { t } else { t - 1 };
            for &(k, j) in &incoming[i] {
                let s = v[prev * n + j] + graph.prob(k).ln();
                if s > best {
                    best = s;
                    from = j as u32;
                }
            }
            if !silent {
                best += graph.emission(i, sequence[t - 1]).ln();
            }
            v[t * n + i] = best;
            back[t * n + i] = from;
        }
    }
    let mut end = None::<usize>;
    for i in (0..n).filter(|&i| graph.is_end(i)) {
        if v[len * n + i] > end.map_or(f64::NEG_INFINITY, |e| v[len * n + e]) {
            end = Some(i);
        }
    }
    let last = end.ok_or(Error::NoPath)?;
    let log_probability = v[len * n + last];
    let mut steps = Vec::new();
    let (mut state, mut t) = (last, len);
    loop {
        steps.push((state, t));
        let p = back[t * n + state];
        if p == NONE {
            break;
        }
        if !graph.is_silent(state) {
            t -= 1;
        }
        state = p as usize;
    }
    steps.reverse();
    Ok(StatePath { steps, log_probability })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_error_correction, build_traditional, Alphabet, PriorConfig};

    #[test]
    fn untrained_graph_decodes_its_sequence() {
        let a = Alphabet::dna();
        let g = build_error_correction("ACGT", &a, 6, 2, &PriorConfig::default()).unwrap();
        assert_eq!(a.decode(&viterbi_decode(&g).unwrap()), "ACGT");
        let g = build_traditional("GATTACA", &a, &PriorConfig::default()).unwrap();
        assert_eq!(a.decode(&viterbi_decode(&g).unwrap()), "GATTACA");
    }

    #[test]
    fn single_column_gives_argmax_symbol() {
        let a = Alphabet::dna();
        let g = build_error_correction("G", &a, 6, 2, &PriorConfig::default()).unwrap();
        assert_eq!(viterbi_decode(&g).unwrap(), vec![2]);
    }

    #[test]
    fn exact_sequence_takes_match_path() {
        let a = Alphabet::dna();
        let g = build_traditional("ACGT", &a, &PriorConfig::default()).unwrap();
        let p = viterbi_path(&g, &a.encode("ACGT").unwrap()).unwrap();
        let kinds: Vec<StateKind> = p.steps.iter().map(|&(s, _)| g.state(s).kind).collect();
        assert_eq!(kinds, vec![StateKind::Match; 4]);
        assert_eq!(p.steps.last().unwrap().1, 4);
    }

    #[test]
    fn unreachable_end_is_an_error() {
        let a = Alphabet::dna();
        let g = build_error_correction("ACGTACGTAC", &a, 1, 1, &PriorConfig::default()).unwrap();
        // 10 columns cannot emit a single symbol with one-column skips
        assert_eq!(viterbi_path(&g, &[0]), Err(Error::NoPath));
    }
}
