//! Analytical throughput model of a Baum-Welch accelerator.
//!
//! Each step (forward, backward, update) does `length x active_states x
//! transitions` multiply-accumulates. Compute time spreads them over the PEs'
//! multipliers; data time divides the operand bytes they need by the total
//! port bandwidth. A step takes the larger of the two plus a small share of
//! the smaller one (the two never overlap perfectly), scaled by the
//! arbitration overhead. The optimization flags only change bytes per MAC
//! (and the filter cost), so the model stays a pure function.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Per-optimization speedups over the previous configuration, in the order
/// filter, product table, broadcast with partial compute, memoization.
pub const TABLE3_MULTIPLIERS: [f64; 4] = [1.07, 2.48, 3.39, 1.69];
pub const TABLE3_OVERALL: f64 = 15.20;

/// Share of host time spent in Baum-Welch: protein family search, multiple
/// sequence alignment, error correction.
pub const ACCELERATED_FRACTIONS: [f64; 3] = [0.4576, 0.5144, 0.9857];

/// Share of the non-dominant (compute or data) time that is not hidden.
const OVERLAP_LEAK: f64 = 0.1;
/// Extra latency on traffic that spills past L1.
const SPILL_LATENCY: f64 = 4.0;
const VALUE_BYTES: usize = 4;

// Operand bytes per MAC, calibrated so the crossover to port-bound execution
// falls between 64 and 128 PEs at 8 ports x 16 B/cycle.
const PRODUCT_BYTES: f64 = 0.6;
const VALUE_STREAM_BYTES: f64 = 0.8;
const UPDATE_FORWARD_BYTES: f64 = 0.4;
const UPDATE_BACKWARD_BYTES: f64 = 0.8;
const UPDATE_NUMERATOR_BYTES: f64 = 0.8;
const LUT_TRAFFIC: f64 = 1.0 - 0.66;
const BROADCAST_DIVISOR: f64 = 4.0;
const MEMO_DIVISOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceleratorConfig {
    pub cores: usize,
    pub pes: usize,
    pub pes_per_group: usize,
    pub multipliers_per_pe: usize,
    pub ports: usize,
    pub bytes_per_cycle_per_port: f64,
    pub l1_kb: usize,
    pub lut_enabled: bool,
    pub filter_enabled: bool,
    pub partial_compute_enabled: bool,
    pub memoization_enabled: bool,
    pub arbitration_overhead: f64,
    /// Per-core cost of moving data between cores, as a share of kernel time.
    pub movement_overhead: f64,
}

impl Default for AcceleratorConfig {
    fn default() -> Self {
        Self {
            cores: 4,
            pes: 64,
            pes_per_group: 4,
            multipliers_per_pe: 4,
            ports: 8,
            bytes_per_cycle_per_port: 16.0,
            l1_kb: 128,
            lut_enabled: true,
            filter_enabled: true,
            partial_compute_enabled: true,
            memoization_enabled: true,
            arbitration_overhead: 0.05,
            movement_overhead: 0.05,
        }
    }
}

impl AcceleratorConfig {
    /// Single PE, single core, no optimizations.
    pub fn baseline(&self) -> Self {
        Self {
            cores: 1,
            pes: 1,
            pes_per_group: 1,
            lut_enabled: false,
            filter_enabled: false,
            partial_compute_enabled: false,
            memoization_enabled: false,
            ..*self
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidOptions(m.to_string()));
        if self.cores == 0 || self.pes == 0 || self.pes_per_group == 0 || self.multipliers_per_pe == 0 || self.ports == 0 {
            return bad("accelerator counts must be positive");
        }
        if !self.pes.is_multiple_of(self.pes_per_group) {
            return bad("pes must be divisible by pes_per_group");
        }
        if self.bytes_per_cycle_per_port.is_nan() || self.bytes_per_cycle_per_port <= 0.0 || self.l1_kb == 0 {
            return bad("bandwidth and l1 size must be positive");
        }
        if !(0.0..=1.0).contains(&self.arbitration_overhead) || !(0.0..=1.0).contains(&self.movement_overhead) {
            return bad("overheads must lie in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadProfile {
    pub sequence_length: usize,
    /// States processed per timestamp after filtering.
    pub active_states: usize,
    pub alphabet_size: usize,
    pub avg_transitions: f64,
    /// Graph states per represented character, used for the working set.
    pub states_per_column: usize,
    pub accelerated_fraction: f64,
    pub update_enabled: bool,
}

impl Default for WorkloadProfile {
    fn default() -> Self {
        Self {
            sequence_length: 650,
            active_states: 500,
            alphabet_size: 4,
            avg_transitions: 7.0,
            states_per_column: 3,
            accelerated_fraction: ACCELERATED_FRACTIONS[2],
            update_enabled: true,
        }
    }
}

impl WorkloadProfile {
    pub fn check(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.accelerated_fraction) {
            return Err(Error::InvalidOptions("accelerated_fraction must lie in [0, 1]".into()));
        }
        if self.alphabet_size < 2 || self.states_per_column == 0 || self.avg_transitions.is_nan() || self.avg_transitions < 0.0 {
            return Err(Error::InvalidOptions("invalid workload shape".into()));
        }
        Ok(())
    }

    /// Bytes the chunk keeps on chip: emission probabilities and numerators,
    /// one denominator and two backward values per state, plus the sequence.
    pub fn working_set_bytes(&self) -> usize {
        let states = self.sequence_length * self.states_per_column;
        states * (2 * self.alphabet_size + 1 + 2) * VALUE_BYTES + self.sequence_length
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCycles {
    pub compute: f64,
    pub data: f64,
    pub cycles: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfReport {
    pub config: AcceleratorConfig,
    pub workload: WorkloadProfile,
    pub forward: StepCycles,
    pub backward: StepCycles,
    pub update: StepCycles,
    /// Filter cycles, charged to the forward step's timestamps.
    pub filter_cycles: f64,
    pub total_cycles: f64,
    pub port_bound: bool,
    /// Operand bytes per cycle requested over the whole run.
    pub bandwidth_demand: f64,
    pub working_set_bytes: usize,
    pub spilled_bytes: usize,
    /// Baseline (1 PE, no optimizations) cycles over these cycles, one core.
    pub kernel_speedup: f64,
    /// Whole-application speedup over the host, across all cores.
    pub end_to_end_speedup: f64,
}

/// End-to-end speedup when a fraction `f` of the time runs `kernel_speedup`
/// times faster and `movement` (a share of the original time) is added.
pub fn amdahl(accelerated_fraction: f64, kernel_speedup: f64, movement: f64) -> f64 {
    let f = accelerated_fraction;
    if f == 0.0 {
        return 1.0 / (1.0 + movement);
    }
    1.0 / ((1.0 - f) + movement + f / kernel_speedup)
}

/// Overall speedup of optimizations applied one after another.
pub fn compose_speedups(multipliers: &[f64]) -> f64 {
    multipliers.iter().product()
}

struct Traffic {
    forward: f64,
    update: f64,
}

fn bytes_per_mac(c: &AcceleratorConfig) -> Traffic {
    let products = if c.lut_enabled { PRODUCT_BYTES * LUT_TRAFFIC } else { PRODUCT_BYTES };
    let broadcast = if c.partial_compute_enabled { BROADCAST_DIVISOR } else { 1.0 };
    let memo = if c.memoization_enabled { MEMO_DIVISOR } else { 1.0 };
    Traffic {
        forward: products + VALUE_STREAM_BYTES / broadcast,
        update: UPDATE_FORWARD_BYTES + UPDATE_BACKWARD_BYTES / broadcast + UPDATE_NUMERATOR_BYTES / memo + products,
    }
}

fn step(c: &AcceleratorConfig, macs: f64, bytes_per_mac: f64, spill_factor: f64) -> StepCycles {
    let compute = macs / (c.pes * c.multipliers_per_pe) as f64;
    let data = macs * bytes_per_mac * spill_factor / (c.ports as f64 * c.bytes_per_cycle_per_port);
    let cycles = (compute.max(data) + OVERLAP_LEAK * compute.min(data)) * (1.0 + c.arbitration_overhead);
    StepCycles { compute, data, cycles }
}

/// Cycles of one core for `workload` under `config`.
fn kernel(config: &AcceleratorConfig, workload: &WorkloadProfile) -> PerfReport {
    let len = workload.sequence_length as f64;
    let active = workload.active_states as f64;
    let macs = len * active * workload.avg_transitions;
    let ws = workload.working_set_bytes();
    let l1 = config.l1_kb * 1024;
    let spilled = ws.saturating_sub(l1);
    let spill_factor = if ws == 0 { 1.0 } else { 1.0 + (SPILL_LATENCY - 1.0) * spilled as f64 / ws as f64 };

    let traffic = bytes_per_mac(config);
    let forward = step(config, macs, traffic.forward, spill_factor);
    let backward = forward;
    let update = if workload.update_enabled {
        step(config, macs, traffic.update, spill_factor)
    } else {
        StepCycles { compute: 0.0, data: 0.0, cycles: 0.0 }
    };
    // Histogram filter: one pass over the active states per timestamp;
    // a sort-based filter pays a log factor on top.
    let per_timestamp = if config.filter_enabled { active } else { active * active.max(2.0).log2() };
    let filter_cycles = len * per_timestamp / (config.pes / config.pes_per_group) as f64;

    let total_cycles = forward.cycles + backward.cycles + update.cycles + filter_cycles;
    let compute = forward.compute + backward.compute + update.compute;
    let data = forward.data + backward.data + update.data;
    let bytes = macs * (2.0 * traffic.forward + if workload.update_enabled { traffic.update } else { 0.0 });
    PerfReport {
        config: *config,
        workload: *workload,
        forward,
        backward,
        update,
        filter_cycles,
        total_cycles,
        port_bound: data > compute,
        bandwidth_demand: if total_cycles > 0.0 { bytes / total_cycles } else { 0.0 },
        working_set_bytes: ws,
        spilled_bytes: spilled,
        kernel_speedup: 0.0,
        end_to_end_speedup: 0.0,
    }
}

pub fn estimate(config: &AcceleratorConfig, workload: &WorkloadProfile) -> Result<PerfReport> {
    config.check()?;
    workload.check()?;
    let mut report = kernel(config, workload);
    let baseline = kernel(&config.baseline(), workload);
    report.kernel_speedup = if report.total_cycles > 0.0 { baseline.total_cycles / report.total_cycles } else { 1.0 };
    let f = workload.accelerated_fraction;
    let cores = config.cores as f64;
    let k = report.kernel_speedup;
    report.end_to_end_speedup = amdahl(f, k * cores, config.movement_overhead * f * cores / k);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Pes,
    Ports,
    BytesPerCyclePerPort,
    Cores,
    Chunk,
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pes" => Self::Pes,
            "ports" => Self::Ports,
            "bytes_per_cycle_per_port" => Self::BytesPerCyclePerPort,
            "cores" => Self::Cores,
            "chunk" => Self::Chunk,
            other => return Err(Error::UnknownParameter(other.to_string())),
        })
    }
}

/// One report per value of `vary`.
pub fn sweep(
    config: &AcceleratorConfig,
    workload: &WorkloadProfile,
    vary: SweepParameter,
    values: &[f64],
) -> Result<Vec<PerfReport>> {
    values
        .iter()
        .map(|&v| {
            let mut c = *config;
            let mut w = *workload;
            let count = || {
                if v >= 1.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    Err(Error::InvalidOptions(format!("{v} is not a positive integer")))
                }
            };
            match vary {
                SweepParameter::Pes => c.pes = count()?,
                SweepParameter::Ports => c.ports = count()?,
                SweepParameter::BytesPerCyclePerPort => c.bytes_per_cycle_per_port = v,
                SweepParameter::Cores => c.cores = count()?,
                SweepParameter::Chunk => w.sequence_length = count()?,
            }
            estimate(&c, &w)
        })
        .collect()
}

pub const CSV_SCHEMA: u32 = 1;

/// CSV with a `#schema` comment, a header row, and one row per report.
pub fn reports_to_csv(reports: &[PerfReport]) -> String {
    let mut out = format!("#schema={CSV_SCHEMA}\n");
    out.push_str(
        "cores,pes,pes_per_group,ports,bytes_per_cycle_per_port,l1_kb,lut,filter,partial_compute,memoization,\
         arbitration_overhead,movement_overhead,sequence_length,active_states,alphabet_size,avg_transitions,\
         accelerated_fraction,forward_cycles,backward_cycles,update_cycles,filter_cycles,total_cycles,port_bound,\
         bandwidth_demand,working_set_bytes,spilled_bytes,kernel_speedup,end_to_end_speedup\n",
    );
    for r in reports {
        let c = &r.config;
        let w = &r.workload;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{},{:.6},{},{},{:.6},{:.6}",
            c.cores,
            c.pes,
            c.pes_per_group,
            c.ports,
            c.bytes_per_cycle_per_port,
            c.l1_kb,
            c.lut_enabled as u8,
            c.filter_enabled as u8,
            c.partial_compute_enabled as u8,
            c.memoization_enabled as u8,
            c.arbitration_overhead,
            c.movement_overhead,
            w.sequence_length,
            w.active_states,
            w.alphabet_size,
            w.avg_transitions,
            w.accelerated_fraction,
            r.forward.cycles,
            r.backward.cycles,
            r.update.cycles,
            r.filter_cycles,
            r.total_cycles,
            r.port_bound as u8,
            r.bandwidth_demand,
            r.working_set_bytes,
            r.spilled_bytes,
            r.kernel_speedup,
            r.end_to_end_speedup,
        );
    }
    out
}
