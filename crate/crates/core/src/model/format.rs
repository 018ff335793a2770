//! Line-oriented model files.
//!
//! ```text
//! APHMM 1 <design> <alphabet> <n_columns>
//! S <id> <kind> <column>
//! T <from> <to> <prob>
//! E <id> <symbol> <prob>
//! P <id> <prob>
//! ```
//!
//! Probabilities are written with 17 significant digits so that parsing
//! reproduces every `f64` exactly.

use std::fmt::Write as _;

use super::{Alphabet, Design, PhmmGraph, State, StateKind, Transition};
use crate::error::{Error, Result};

const MAGIC: &str = "APHMM";
const VERSION: &str = "1";

fn prob(p: f64) -> String {
    format!("{p:.16e}")
}

pub fn serialize(graph: &PhmmGraph) -> String {
    let mut out = String::new();
    let alphabet = graph.alphabet();
    let symbols = std::str::from_utf8(alphabet.symbols()).expect("alphabet is ASCII");
    writeln!(out, "{MAGIC} {VERSION} {} {symbols} {}", graph.design().name(), graph.n_columns()).unwrap();
    for (id, s) in graph.states().iter().enumerate() {
        writeln!(out, "S {id} {} {}", s.kind.code(), s.column).unwrap();
    }
    for t in graph.transitions() {
        writeln!(out, "T {} {} {}", t.from, t.to, prob(t.prob)).unwrap();
    }
    for id in 0..graph.n_states() {
        if graph.is_silent(id) {
            continue;
        }
        for (c, &e) in graph.emission_row(id).iter().enumerate() {
            writeln!(out, "E {id} {} {}", alphabet.symbol(c as u8), prob(e)).unwrap();
        }
    }
    for (id, &p) in graph.start_probs().iter().enumerate() {
        if p != 0.0 {
            writeln!(out, "P {id} {}", prob(p)).unwrap();
        }
    }
    out
}

fn perr(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

fn field<'a>(fields: &[&'a str], k: usize, line: usize) -> Result<&'a str> {
    fields.get(k).copied().ok_or_else(|| perr(line, format!("missing field {}", k + 1)))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| perr(line, format!("expected an integer, found {s:?}")))
}

fn parse_prob(s: &str, line: usize) -> Result<f64> {
    let p: f64 = s.parse().map_err(|_| perr(line, format!("expected a probability, found {s:?}")))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(perr(line, format!("probability {p} out of range [0, 1]")));
    }
    Ok(p)
}

pub fn deserialize(text: &str) -> Result<PhmmGraph> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty model file"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 5 || h[0] != MAGIC {
        return Err(perr(hline, "expected header `APHMM 1 <design> <alphabet> <n_columns>`"));
    }
    if h[1] != VERSION {
        return Err(perr(hline, format!("unsupported version {}", h[1])));
    }
    let design = Design::from_name(h[2]).ok_or_else(|| perr(hline, format!("unknown design {}", h[2])))?;
    let alphabet = Alphabet::new(h[3]).map_err(|e| perr(hline, e.to_string()))?;
    let n_columns = parse_usize(h[4], hline)?;
    let sigma = alphabet.len();

    let mut states: Vec<State> = Vec::new();
    let mut transitions = Vec::new();
    let mut emission_entries: Vec<(usize, usize, usize, f64)> = Vec::new();
    let mut start_entries: Vec<(usize, usize, f64)> = Vec::new();

    for (ln, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        match f[0] {
            "S" => {
                let id = parse_usize(field(&f, 1, ln)?, ln)?;
                if id != states.len() {
                    return Err(perr(ln, format!("state {id} out of order, expected {}", states.len())));
                }
                let kind = StateKind::from_code(field(&f, 2, ln)?)
                    .ok_or_else(|| perr(ln, format!("unknown state kind {}", f[2])))?;
                let column = parse_usize(field(&f, 3, ln)?, ln)?;
                if column == 0 || column > n_columns {
                    return Err(perr(ln, format!("column {column} outside 1..={n_columns}")));
                }
                states.push(State { kind, column });
            }
            "T" => {
                let from = parse_usize(field(&f, 1, ln)?, ln)?;
                let to = parse_usize(field(&f, 2, ln)?, ln)?;
                let p = parse_prob(field(&f, 3, ln)?, ln)?;
                transitions.push((ln, Transition { from, to, prob: p }));
            }
            "E" => {
                let id = parse_usize(field(&f, 1, ln)?, ln)?;
                let sym = field(&f, 2, ln)?;
                let code = match sym.as_bytes() {
                    [b] => alphabet.code(*b),
                    _ => None,
                }
                .ok_or_else(|| perr(ln, format!("symbol {sym:?} not in alphabet")))?;
                let p = parse_prob(field(&f, 3, ln)?, ln)?;
                emission_entries.push((ln, id, code as usize, p));
            }
            "P" => {
                let id = parse_usize(field(&f, 1, ln)?, ln)?;
                let p = parse_prob(field(&f, 2, ln)?, ln)?;
                start_entries.push((ln, id, p));
            }
            other => return Err(perr(ln, format!("unknown record type {other:?}"))),
        }
        if f.len() > expected_fields(f[0]) {
            return Err(perr(ln, "trailing fields"));
        }
    }

    let last_line = text.lines().count().max(1);
    let n = states.len();
    if n == 0 {
        return Err(perr(last_line, "no states"));
    }
    if states.iter().map(|s| s.column).max() != Some(n_columns) {
        return Err(perr(last_line, format!("states do not cover {n_columns} columns (truncated file?)")));
    }
    for &(ln, t) in &transitions {
        if t.from >= n || t.to >= n {
            return Err(perr(ln, format!("transition {} -> {} references a missing state", t.from, t.to)));
        }
    }

    let mut emissions = vec![0.0; n * sigma];
    let mut seen = vec![0usize; n];
    for &(ln, id, c, p) in &emission_entries {
        if id >= n {
            return Err(perr(ln, format!("emission for missing state {id}")));
        }
        if states[id].kind.is_silent() {
            return Err(perr(ln, format!("silent state {id} cannot emit")));
        }
        emissions[id * sigma + c] = p;
        seen[id] += 1;
    }
    if let Some(id) = (0..n).find(|&id| !states[id].kind.is_silent() && seen[id] != sigma) {
        return Err(perr(last_line, format!("state {id} has {} of {sigma} emissions (truncated file?)", seen[id])));
    }

    let mut start = vec![0.0; n];
    for &(ln, id, p) in &start_entries {
        if id >= n {
            return Err(perr(ln, format!("start probability for missing state {id}")));
        }
        start[id] = p;
    }
    let start_sum: f64 = start.iter().sum();
    if (start_sum - 1.0).abs() > 1e-9 {
        return Err(perr(last_line, format!("start distribution sums to {start_sum} (truncated file?)")));
    }

    PhmmGraph::new(
        design,
        alphabet,
        n_columns,
        states,
        transitions.into_iter().map(|(_, t)| t).collect(),
        emissions,
        start,
    )
    .map_err(|e| perr(last_line, e.to_string()))
}

fn expected_fields(kind: &str) -> usize {
    match kind {
        "P" => 3,
        _ => 4,
    }
}
