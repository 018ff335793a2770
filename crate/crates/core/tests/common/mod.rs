//! Shared helpers for the integration tests: random instances and brute-force
//! path enumeration.
#![allow(dead_code)]

use phmm_core::model::{build_error_correction, build_traditional, Alphabet, PhmmGraph, PriorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_dna(rng: &mut impl Rng, len: usize) -> String {
    (0..len).map(|_| b"ACGT"[rng.gen_range(0..4)] as char).collect()
}

pub fn random_codes(rng: &mut impl Rng, len: usize, sigma: usize) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(0..sigma) as u8).collect()
}

fn random_simplex(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Replaces every transition row and emission row with random positive values.
pub fn randomize(graph: &PhmmGraph, rng: &mut impl Rng) -> PhmmGraph {
    let mut probs = graph.transition_probs().to_vec();
    for i in 0..graph.n_states() {
        let r = graph.out_range(i);
        if !r.is_empty() {
            let row = random_simplex(rng, r.len());
            probs[r].copy_from_slice(&row);
        }
    }
    let sigma = graph.alphabet().len();
    let mut emissions = graph.emissions().to_vec();
    for i in 0..graph.n_states() {
        if !graph.is_silent(i) {
            let row = random_simplex(rng, sigma);
            emissions[i * sigma..(i + 1) * sigma].copy_from_slice(&row);
        }
    }
    graph.with_parameters(probs, emissions)
}

/// Random graph of either design with at most `max_states` states.
pub fn random_graph(rng: &mut impl Rng, max_states: usize, traditional: bool) -> PhmmGraph {
    let a = Alphabet::dna();
    let p = PriorConfig::default();
    let g = if traditional {
        let cols = rng.gen_range(1..=(max_states / 3).max(1));
        build_traditional(&random_dna(rng, cols), &a, &p).unwrap()
    } else {
        let max_ins = rng.gen_range(1..=2);
        let max_del = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=(max_states / (1 + max_ins)).max(1));
        build_error_correction(&random_dna(rng, cols), &a, max_del, max_ins, &p).unwrap()
    };
    randomize(&g, rng)
}

/// Sum over explicit state paths. `forward[t][i]` collects every path prefix
/// that has consumed `t` symbols and sits in `i`.
pub struct PathSums {
    pub forward: Vec<Vec<f64>>,
    pub backward: Vec<Vec<f64>>,
    pub total: f64,
    pub best: f64,
    pub best_path: Vec<usize>,
}

pub fn enumerate_paths(graph: &PhmmGraph, seq: &[u8]) -> PathSums {
    let n = seq.len();
    let mut s = PathSums {
        forward: vec![vec![0.0; graph.n_states()]; n + 1],
        backward: vec![vec![0.0; graph.n_states()]; n + 1],
        total: 0.0,
        best: 0.0,
        best_path: Vec::new(),
    };
    let mut path = Vec::new();
    for st in 0..graph.n_states() {
        let pi = graph.start(st);
        if pi == 0.0 {
            continue;
        }
        if graph.is_silent(st) {
            visit(graph, seq, st, 0, pi, &mut path, &mut s);
        } else {
            visit(graph, seq, st, 1, pi * graph.emission(st, seq[0]), &mut path, &mut s);
        }
    }
    for t in 0..=n {
        for i in 0..graph.n_states() {
            s.backward[t][i] = suffix(graph, seq, i, t);
        }
    }
    s
}

fn visit(graph: &PhmmGraph, seq: &[u8], st: usize, t: usize, p: f64, path: &mut Vec<usize>, s: &mut PathSums) {
    path.push(st);
    s.forward[t][st] += p;
    if t == seq.len() && graph.is_end(st) {
        s.total += p;
        if p > s.best {
            s.best = p;
            s.best_path = path.clone();
        }
    }
    for k in graph.out_range(st) {
        let j = graph.target(k);
        let a = graph.prob(k);
        if graph.is_silent(j) {
            visit(graph, seq, j, t, p * a, path, s);
        } else if t < seq.len() {
            visit(graph, seq, j, t + 1, p * a * graph.emission(j, seq[t]), path, s);
        }
    }
    path.pop();
}

fn suffix(graph: &PhmmGraph, seq: &[u8], st: usize, t: usize) -> f64 {
    let mut total = if t == seq.len() && graph.is_end(st) { 1.0 } else { 0.0 };
    for k in graph.out_range(st) {
        let j = graph.target(k);
        let a = graph.prob(k);
        if graph.is_silent(j) {
            total += a * suffix(graph, seq, j, t);
        } else if t < seq.len() {
            total += a * graph.emission(j, seq[t]) * suffix(graph, seq, j, t + 1);
        }
    }
    total
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Compares two log values; a difference of `tol` is a relative error of
/// about `tol` in the linear domain.
pub fn log_close(a: f64, b: f64, tol: f64) -> bool {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        return a == b;
    }
    (a - b).abs() <= tol
}

/// Checks the optimized training path against the dense reference on forward
/// values, re-estimated parameters and log-likelihood.
pub fn compare_with_oracle(
    graph: &PhmmGraph,
    seq: &[u8],
    options: &phmm_core::engine::TrainOptions,
    tol: f64,
) -> Result<(), String> {
    use phmm_core::engine::{forward, naive_reference, train_single};
    let reference = naive_reference(graph, seq).map_err(|e| e.to_string())?;
    let fwd = forward(graph, seq, options).map_err(|e| e.to_string())?;
    let trained = train_single(graph, seq, options).map_err(|e| e.to_string())?;
    if !log_close(trained.log_likelihood, reference.log_likelihood, tol) {
        return Err(format!("log-likelihood {} vs {}", trained.log_likelihood, reference.log_likelihood));
    }
    for t in 0..=seq.len() {
        for i in 0..graph.n_states() {
            let (a, b) = (fwd.log_value(t, i), reference.log_forward(t, i));
            if !log_close(a, b, tol) {
                return Err(format!("F[{t}][{i}] {a} vs {b}"));
            }
        }
    }
    for (k, (a, b)) in trained.graph.transition_probs().iter().zip(reference.graph.transition_probs()).enumerate() {
        if !rel_close(*a, *b, tol) {
            return Err(format!("alpha[{k}] {a} vs {b}"));
        }
    }
    for (k, (a, b)) in trained.graph.emissions().iter().zip(reference.graph.emissions()).enumerate() {
        if !rel_close(*a, *b, tol) {
            return Err(format!("e[{k}] {a} vs {b}"));
        }
    }
    Ok(())
}
