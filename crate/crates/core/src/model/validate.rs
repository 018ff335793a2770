use super::{Design, PhmmGraph, StateKind};

const SUM_TOLERANCE: f64 = 1e-9;

/// One violated graph invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// Transition goes from a higher id to a lower one.
    OrderViolation { from: usize, to: usize },
    /// Outgoing probabilities of a state do not sum to one.
    RowSumViolation { state: usize, sum: f64 },
    /// Emission probabilities of a non-silent state do not sum to one.
    EmissionSumViolation { state: usize, sum: f64 },
    /// A transition, emission or start probability outside `[0, 1]`.
    ProbabilityOutOfRange { state: usize, value: f64 },
    /// A silent state carries emission mass.
    SilentEmission { state: usize },
    /// Start probabilities do not sum to one.
    StartSumViolation { sum: f64 },
    /// The state layout does not match the graph's design.
    ShapeViolation { state: usize, rule: &'static str },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::OrderViolation { from, to } => write!(f, "transition {from} -> {to} breaks id order"),
            Diagnostic::RowSumViolation { state, sum } => write!(f, "state {state}: outgoing sum {sum}"),
            Diagnostic::EmissionSumViolation { state, sum } => write!(f, "state {state}: emission sum {sum}"),
            Diagnostic::ProbabilityOutOfRange { state, value } => {
                write!(f, "state {state}: probability {value} outside [0, 1]")
            }
            Diagnostic::SilentEmission { state } => write!(f, "state {state}: silent state emits"),
            Diagnostic::StartSumViolation { sum } => write!(f, "start distribution sums to {sum}"),
            Diagnostic::ShapeViolation { state, rule } => write!(f, "state {state}: {rule}"),
        }
    }
}

fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

/// Checks every graph invariant and returns one diagnostic per violation.
/// An empty list means the graph is valid.
pub fn validate(graph: &PhmmGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = graph.n_states();

    for t in graph.transitions() {
        if t.from > t.to {
            out.push(Diagnostic::OrderViolation { from: t.from, to: t.to });
        }
        if !in_unit(t.prob) {
            out.push(Diagnostic::ProbabilityOutOfRange { state: t.from, value: t.prob });
        }
    }

    for id in 0..n {
        let probs = graph.out_probs(id);
        if !probs.is_empty() {
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                out.push(Diagnostic::RowSumViolation { state: id, sum });
            }
        }
        let row = graph.emission_row(id);
        if let Some(&bad) = row.iter().find(|&&e| !in_unit(e)) {
            out.push(Diagnostic::ProbabilityOutOfRange { state: id, value: bad });
        }
        if graph.is_silent(id) {
            if row.iter().any(|&e| e != 0.0) {
                out.push(Diagnostic::SilentEmission { state: id });
            }
        } else {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                out.push(Diagnostic::EmissionSumViolation { state: id, sum });
            }
        }
        let s = graph.start(id);
        if !in_unit(s) {
            out.push(Diagnostic::ProbabilityOutOfRange { state: id, value: s });
        }
    }

    let start_sum: f64 = graph.start_probs().iter().sum();
    if (start_sum - 1.0).abs() > SUM_TOLERANCE {
        out.push(Diagnostic::StartSumViolation { sum: start_sum });
    }

    match graph.design() {
        Design::Traditional => check_traditional_shape(graph, &mut out),
        Design::ErrorCorrection => check_error_correction_shape(graph, &mut out),
    }
    out
}

fn check_traditional_shape(graph: &PhmmGraph, out: &mut Vec<Diagnostic>) {
    if graph.n_states() != 3 * graph.n_columns() {
        out.push(Diagnostic::ShapeViolation { state: 0, rule: "traditional graphs have 3 states per character" });
        return;
    }
    let expected = [StateKind::Match, StateKind::Insertion, StateKind::Deletion];
    for (id, s) in graph.states().iter().enumerate() {
        if s.kind != expected[id % 3] || s.column != id / 3 + 1 {
            out.push(Diagnostic::ShapeViolation { state: id, rule: "states must be ordered M, I, D per column" });
        } else if s.kind == StateKind::Insertion && graph.find_transition(id, id).is_none() {
            out.push(Diagnostic::ShapeViolation { state: id, rule: "insertion state lacks its self-loop" });
        }
    }
}

fn check_error_correction_shape(graph: &PhmmGraph, out: &mut Vec<Diagnostic>) {
    for (id, s) in graph.states().iter().enumerate() {
        if s.kind == StateKind::Deletion {
            out.push(Diagnostic::ShapeViolation { state: id, rule: "error-correction graphs have no deletion states" });
        }
    }
    for t in graph.transitions() {
        if t.from == t.to {
            out.push(Diagnostic::ShapeViolation { state: t.from, rule: "error-correction graphs have no self-loops" });
        }
    }
}
