use super::backward::{backward_step_in, BackwardBuffer};
use super::counters::OpCounters;
use super::forward::forward_in;
use super::lut::{lut_build, Products};
use super::update::{accumulate_in, finalize_updates, EmissionAccumulator, TransitionAccumulator};
use super::{check_inputs, TrainOptions};
use crate::error::Result;
use crate::filter::StateFilter;
use crate::model::PhmmGraph;

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub graph: PhmmGraph,
    /// Log-likelihood of the sequence under the graph before the update.
    pub log_likelihood: f64,
    pub counters: OpCounters,
}

/// Per-sequence scratch state. Reusing one across calls avoids reallocating
/// the backward rows and accumulators.
#[derive(Debug, Clone)]
pub struct TrainingWorkspace {
    backward: BackwardBuffer,
    transitions: Option<TransitionAccumulator>,
    emissions: Option<EmissionAccumulator>,
}

impl Default for TrainingWorkspace {
    fn default() -> Self {
        Self::new()
    }
}

impl TrainingWorkspace {
    pub fn new() -> Self {
        Self { backward: BackwardBuffer::new(0, 0), transitions: None, emissions: None }
    }

    pub fn backward(&self) -> &BackwardBuffer {
        &self.backward
    }

    pub fn transitions(&self) -> Option<&TransitionAccumulator> {
        self.transitions.as_ref()
    }

    pub fn emissions(&self) -> Option<&EmissionAccumulator> {
        self.emissions.as_ref()
    }
}

/// One Baum-Welch iteration on one sequence.
pub fn train_single(graph: &PhmmGraph, sequence: &[u8], options: &TrainOptions) -> Result<TrainResult> {
    train_single_in(&mut TrainingWorkspace::new(), graph, sequence, options)
}

pub fn train_single_in(
    ws: &mut TrainingWorkspace,
    graph: &PhmmGraph,
    sequence: &[u8],
    options: &TrainOptions,
) -> Result<TrainResult> {
    options.check()?;
    check_inputs(graph, sequence, options.chunk_length)?;
    let mut counters = OpCounters::default();
    let table = options.lut_enabled.then(|| lut_build(graph));
    if let Some(t) = &table {
        counters.lut_builds += t.built_products();
    }
    let products = Products::new(graph, table.as_ref());
    let mut filter = options.filter.as_ref().map(|f| StateFilter::from_config(f, graph.n_states())).transpose()?;
    let fwd = forward_in(graph, sequence, products, filter.as_mut(), &mut counters)?;
    let log_likelihood = fwd.log_likelihood();

    if !options.steps.backward {
        return Ok(TrainResult { graph: graph.clone(), log_likelihood, counters });
    }

    let len = sequence.len();
    let update = options.steps.update && log_likelihood.is_finite();
    let masked = filter.is_some();
    let mask = |t: usize| masked.then(|| fwd.row(t));

    let bwd = &mut ws.backward;
    bwd.prepare(graph.n_states(), len, !options.partial_compute);
    let tacc = reuse_transitions(&mut ws.transitions, graph);
    let eacc = reuse_emissions(&mut ws.emissions, graph);

    bwd.set_base_in(graph, mask(len), &mut counters);
    if update && options.partial_compute {
        accumulate_in(graph, sequence, len, &fwd, bwd, products, &mut counters, tacc, eacc);
    }
    for t in (0..len).rev() {
        backward_step_in(graph, sequence, t, bwd, products, mask(t), &mut counters)?;
        if update && options.partial_compute {
            accumulate_in(graph, sequence, t, &fwd, bwd, products, &mut counters, tacc, eacc);
        }
    }
    if update && !options.partial_compute {
        for t in (0..=len).rev() {
            accumulate_in(graph, sequence, t, &fwd, bwd, products, &mut counters, tacc, eacc);
        }
    }
    counters.peak_backward_rows = bwd.resident_rows() as u64;

    let graph = if update { finalize_updates(tacc, eacc, graph)? } else { graph.clone() };
    Ok(TrainResult { graph, log_likelihood, counters })
}

fn reuse_transitions<'a>(slot: &'a mut Option<TransitionAccumulator>, graph: &PhmmGraph) -> &'a mut TransitionAccumulator {
    match slot {
        Some(acc) if acc.fits(graph) => acc.reset(),
        _ => *slot = Some(TransitionAccumulator::new(graph)),
    }
    slot.as_mut().expect("accumulator present")
}

fn reuse_emissions<'a>(slot: &'a mut Option<EmissionAccumulator>, graph: &PhmmGraph) -> &'a mut EmissionAccumulator {
    match slot {
        Some(acc) if acc.n_states() == graph.n_states() && acc.sigma() == graph.alphabet().len() => acc.reset(),
        _ => *slot = Some(EmissionAccumulator::new(graph)),
    }
    slot.as_mut().expect("accumulator present")
}

/// `ln P(sequence | graph)` from an unfiltered forward-only pass. Unlike
/// training, scoring does not limit the sequence length.
pub fn score(graph: &PhmmGraph, sequence: &[u8]) -> Result<f64> {
    check_inputs(graph, sequence, usize::MAX)?;
    let table = lut_build(graph);
    let mut counters = OpCounters::default();
    Ok(forward_in(graph, sequence, Products::new(graph, Some(&table)), None, &mut counters)?.log_likelihood())
}

/// Forward-only log-likelihood honoring the filter and table settings.
pub fn score_with(graph: &PhmmGraph, sequence: &[u8], options: &TrainOptions) -> Result<f64> {
    options.check()?;
    check_inputs(graph, sequence, options.chunk_length)?;
    let table = options.lut_enabled.then(|| lut_build(graph));
    let mut filter = options.filter.as_ref().map(|f| StateFilter::from_config(f, graph.n_states())).transpose()?;
    let mut counters = OpCounters::default();
    let fwd = forward_in(graph, sequence, Products::new(graph, table.as_ref()), filter.as_mut(), &mut counters)?;
    Ok(fwd.log_likelihood())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::StepSet;
    use crate::model::{build_error_correction, build_traditional, Alphabet, Design, PriorConfig, State, StateKind, Transition};

    fn opts() -> TrainOptions {
        TrainOptions { chunk_length: 1000, ..Default::default() }
    }

    fn single_state() -> PhmmGraph {
        PhmmGraph::new(
            Design::ErrorCorrection,
            Alphabet::dna(),
            1,
            vec![State { kind: StateKind::Match, column: 1 }],
            vec![Transition { from: 0, to: 0, prob: 1.0 }],
            vec![0.25; 4],
            vec![1.0],
        )
        .unwrap()
    }

    #[test]
    fn single_state_emission_is_symbol_frequency() {
        let g = single_state();
        let seq = Alphabet::dna().encode("AACAGTAA").unwrap();
        let r = train_single(&g, &seq, &opts()).unwrap();
        assert_eq!(r.graph.out_probs(0), &[1.0]);
        let expected = [5.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0];
        for (c, e) in expected.iter().enumerate() {
            assert!((r.graph.emission(0, c as u8) - e).abs() < 1e-8);
        }
        assert!((r.log_likelihood - 8.0 * 0.25f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn forward_only_leaves_graph_unchanged() {
        let g = build_traditional("ACGTAC", &Alphabet::dna(), &PriorConfig::default()).unwrap();
        let seq = Alphabet::dna().encode("ACGAC").unwrap();
        let r = train_single(&g, &seq, &opts().with_steps(StepSet::FORWARD_ONLY)).unwrap();
        assert_eq!(r.graph, g);
        assert_eq!(r.log_likelihood, score(&g, &seq).unwrap());
    }

    #[test]
    fn lut_and_schedule_do_not_change_results() {
        let g = build_error_correction("ACGTACGGTCA", &Alphabet::dna(), 6, 2, &PriorConfig::default()).unwrap();
        let seq = Alphabet::dna().encode("ACGTCGGTTCA").unwrap();
        let base = train_single(&g, &seq, &opts()).unwrap();
        for o in [opts().with_lut(false), opts().with_partial_compute(false), opts().with_lut(false).with_partial_compute(false)] {
            let r = train_single(&g, &seq, &o).unwrap();
            assert_eq!(r.graph, base.graph);
            assert_eq!(r.log_likelihood.to_bits(), base.log_likelihood.to_bits());
        }
    }

    #[test]
    fn partial_compute_keeps_two_backward_rows() {
        let g = build_error_correction("ACGTACGGTCA", &Alphabet::dna(), 6, 2, &PriorConfig::default()).unwrap();
        let seq = Alphabet::dna().encode("ACGTCGGTTCA").unwrap();
        let r = train_single(&g, &seq, &opts()).unwrap();
        assert_eq!(r.counters.peak_backward_rows, 2);
        let r = train_single(&g, &seq, &opts().with_partial_compute(false)).unwrap();
        assert_eq!(r.counters.peak_backward_rows, seq.len() as u64 + 1);
    }

    #[test]
    fn workspace_can_be_reused_across_graphs() {
        let mut ws = TrainingWorkspace::new();
        let a = build_traditional("ACGT", &Alphabet::dna(), &PriorConfig::default()).unwrap();
        let b = build_error_correction("ACGTTA", &Alphabet::dna(), 6, 2, &PriorConfig::default()).unwrap();
        let seq = Alphabet::dna().encode("ACGT").unwrap();
        let ra = train_single_in(&mut ws, &a, &seq, &opts()).unwrap();
        let rb = train_single_in(&mut ws, &b, &seq, &opts()).unwrap();
        let ra2 = train_single_in(&mut ws, &a, &seq, &opts()).unwrap();
        assert_eq!(ra.graph, ra2.graph);
        assert_eq!(rb.graph, train_single(&b, &seq, &opts()).unwrap().graph);
    }
}
