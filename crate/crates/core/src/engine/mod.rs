//! Baum-Welch forward, backward and parameter updates.
//!
//! Two interchangeable paths compute the same quantities:
//!
//! * the optimized path ([`forward`], [`BackwardBuffer`], [`accumulate_updates`],
//!   [`finalize_updates`], driven by [`train_single`]) keeps max-rescaled rows,
//!   serves transition x emission products from a [`ProductTable`], pushes each
//!   forward value to all of its successors, and folds backward rows into the
//!   update accumulators as they are produced so only two backward rows are
//!   ever resident;
//! * [`naive_reference`] evaluates the same recurrences densely in the log
//!   domain with a full backward matrix. It exists to check the former.
//!
//! Silent (deletion) states consume no symbol: they are filled within a
//! timestamp in increasing id order for forward values and in decreasing id
//! order for backward values.

mod backward;
mod counters;
mod forward;
mod lut;
mod oracle;
mod train;
mod update;

pub use backward::{backward_step, BackwardBuffer};
pub use counters::OpCounters;
pub use forward::{forward, ForwardMatrix};
pub use lut::{lut_build, lut_get, ProductTable, LUT_SLOTS};
pub use oracle::{naive_reference, DenseReference, ORACLE_MAX_LEN, ORACLE_MAX_STATES};
pub use train::{score, score_with, train_single, train_single_in, TrainResult, TrainingWorkspace};
pub use update::{accumulate_updates, finalize_updates, EmissionAccumulator, TransitionAccumulator, NUMERATOR_CAPACITY_HINT, PSEUDOCOUNT};

use crate::error::{Error, Result};
use crate::filter::FilterConfig;
use crate::model::PhmmGraph;

pub const MIN_CHUNK: usize = 150;
pub const MAX_CHUNK: usize = 1000;
pub const DEFAULT_CHUNK: usize = 650;

/// Which Baum-Welch steps run. Update requires Backward, which requires Forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepSet {
    pub forward: bool,
    pub backward: bool,
    pub update: bool,
}

impl StepSet {
    pub const ALL: StepSet = StepSet { forward: true, backward: true, update: true };
    pub const FORWARD_ONLY: StepSet = StepSet { forward: true, backward: false, update: false };
    pub const FORWARD_BACKWARD: StepSet = StepSet { forward: true, backward: true, update: false };

    pub fn check(&self) -> Result<()> {
        if !self.forward {
            return Err(Error::InvalidOptions("the forward step cannot be disabled".into()));
        }
        if self.update && !self.backward {
            return Err(Error::InvalidOptions("parameter updates require the backward step".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub filter: Option<FilterConfig>,
    pub lut_enabled: bool,
    /// Fold each backward row into the accumulators as soon as it is computed.
    /// When disabled the full backward matrix is kept and consumed afterwards.
    pub partial_compute: bool,
    pub chunk_length: usize,
    pub steps: StepSet,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            filter: None,
            lut_enabled: true,
            partial_compute: true,
            chunk_length: DEFAULT_CHUNK,
            steps: StepSet::ALL,
        }
    }
}

impl TrainOptions {
    pub fn check(&self) -> Result<()> {
        if !(MIN_CHUNK..=MAX_CHUNK).contains(&self.chunk_length) {
            return Err(Error::InvalidOptions(format!(
                "chunk length {} outside [{MIN_CHUNK}, {MAX_CHUNK}]",
                self.chunk_length
            )));
        }
        self.steps.check()
    }

    pub fn with_filter(mut self, filter: FilterConfig) -> Self {
        self.filter = Some(filter);
        self
    }

    pub fn with_steps(mut self, steps: StepSet) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_lut(mut self, enabled: bool) -> Self {
        self.lut_enabled = enabled;
        self
    }

    pub fn with_partial_compute(mut self, enabled: bool) -> Self {
        self.partial_compute = enabled;
        self
    }
}

/// Shared preconditions for running the engine on `(graph, sequence)`.
pub(crate) fn check_inputs(graph: &PhmmGraph, sequence: &[u8], chunk_length: usize) -> Result<()> {
    if sequence.is_empty() {
        return Err(Error::EmptySequence);
    }
    graph.alphabet().check_codes(sequence)?;
    if sequence.len() > chunk_length {
        return Err(Error::SequenceTooLong { len: sequence.len(), chunk_length });
    }
    if !graph.is_ordered() {
        return Err(Error::InvalidGraph("transitions must satisfy from <= to".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_dependencies_are_enforced() {
        assert!(StepSet::ALL.check().is_ok());
        assert!(StepSet::FORWARD_ONLY.check().is_ok());
        assert!(StepSet { forward: true, backward: false, update: true }.check().is_err());
        assert!(StepSet { forward: false, backward: true, update: false }.check().is_err());
    }

    #[test]
    fn chunk_length_range() {
        let mut o = TrainOptions::default();
        assert!(o.check().is_ok());
        o.chunk_length = 149;
        assert!(o.check().is_err());
        o.chunk_length = 1001;
        assert!(o.check().is_err());
        o.chunk_length = 1000;
        assert!(o.check().is_ok());
    }
}
