use rayon::prelude::*;

use super::encode_for;
use crate::engine::score;
use crate::error::{Error, Result};
use crate::io::FastaRecord;
use crate::model::PhmmGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    /// Index of the model in the searched set.
    pub model: usize,
    pub name: String,
    pub log_likelihood: f64,
    /// Log-likelihood divided by query length.
    pub normalized_score: f64,
    /// 1-based.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryHits {
    pub query: String,
    pub hits: Vec<SearchHit>,
}

/// Scores every query against every model with a forward-only pass and ranks
/// the models per query by normalized score (ties by model index).
pub fn family_search(models: &[(String, PhmmGraph)], queries: &[FastaRecord]) -> Result<Vec<QueryHits>> {
    if let Some((first, rest)) = models.split_first() {
        if let Some((name, _)) = rest.iter().find(|(_, g)| g.alphabet() != first.1.alphabet()) {
            return Err(Error::AlphabetMismatch(format!("model '{name}' uses a different alphabet than '{}'", first.0)));
        }
    }
    queries
        .par_iter()
        .map(|q| {
            let mut hits = Vec::with_capacity(models.len());
            if let Some((_, g)) = models.first() {
                let codes = encode_for(g.alphabet(), q)?;
                let scores: Vec<f64> = models.par_iter().map(|(_, m)| score(m, &codes)).collect::<Result<_>>()?;
                for (k, ((name, _), ll)) in models.iter().zip(scores).enumerate() {
                    hits.push(SearchHit {
                        model: k,
                        name: name.clone(),
                        log_likelihood: ll,
                        normalized_score: ll / codes.len() as f64,
                        rank: 0,
                    });
                }
            }
            hits.sort_by(|a, b| b.normalized_score.total_cmp(&a.normalized_score).then(a.model.cmp(&b.model)));
            for (r, h) in hits.iter_mut().enumerate() {
                h.rank = r + 1;
            }
            Ok(QueryHits { query: q.id.clone(), hits })
        })
        .collect()
}
