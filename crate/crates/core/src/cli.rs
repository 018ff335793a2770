//! Command-line front end used by the `phmm` binary.
//!
//! Exit codes: 0 on success, 1 for bad input (flags, files, sequences), 2 for
//! internal failures.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::apps::{correct_with_report, family_search, msa_align, render_alignment, CorrectionOptions};
use crate::bench::{bench, bench_csv, BenchConfig};
use crate::engine::{score, train_single_in, OpCounters, TrainOptions, TrainingWorkspace, DEFAULT_CHUNK};
use crate::error::{Error, Result};
use crate::filter::{FilterConfig, DEFAULT_BINS, DEFAULT_FILTER_SIZE};
use crate::io::{parse_fasta, parse_mappings, tsv, write_fasta, FastaRecord};
use crate::model::{build_error_correction, build_traditional, deserialize, serialize, Alphabet, PhmmGraph, PriorConfig};
use crate::perf::{reports_to_csv, sweep, AcceleratorConfig, SweepParameter, WorkloadProfile};

const CONFIG_MAGIC: &str = "APHMM-CONFIG";

#[derive(Parser, Debug)]
#[command(name = "phmm", version, about = "Profile HMM training, scoring, alignment and error correction")]
struct Cli {
    #[command(flatten)]
    shared: SharedFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct SharedFlags {
    /// Histogram bins of the state filter.
    #[arg(long, global = true)]
    filter_bins: Option<usize>,
    /// States kept per timestamp by the state filter.
    #[arg(long, global = true)]
    filter_size: Option<usize>,
    /// Disable state filtering.
    #[arg(long, global = true)]
    no_filter: bool,
    /// Disable the transition x emission product table.
    #[arg(long, global = true)]
    no_lut: bool,
    /// Chunk length for training and correction.
    #[arg(long, global = true)]
    chunk: Option<usize>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write a run report (TSV) to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Seed for synthetic data.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Leave timing fields out of reports.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Settings file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a model from a sequence.
    Build(BuildArgs),
    /// Train a model on reads, one Baum-Welch pass per read.
    Train(TrainArgs),
    /// Log-likelihood of every query under a model.
    Score(ScoreArgs),
    /// Rank models for every query.
    Search(SearchArgs),
    /// Align sequences to a model.
    Align(ScoreArgs),
    /// Correct an assembly with mapped reads.
    Correct(CorrectArgs),
    /// Sweep one accelerator parameter through the performance model.
    PerfSweep(SweepArgs),
    /// Compare engine variants on synthetic error-correction data.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DesignArg {
    Traditional,
    ErrorCorrection,
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// Sequence given inline.
    #[arg(long, conflicts_with = "fasta")]
    sequence: Option<String>,
    /// FASTA file holding exactly one record.
    #[arg(long)]
    fasta: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "error-correction")]
    design: DesignArg,
    /// `dna`, `protein`, or the symbols themselves.
    #[arg(long, default_value = "dna")]
    alphabet: String,
    #[arg(long, default_value_t = 6)]
    max_deletion: usize,
    #[arg(long, default_value_t = 2)]
    max_insertion: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(short, long)]
    model: PathBuf,
    #[arg(short, long)]
    reads: PathBuf,
    #[arg(long, default_value_t = 1)]
    iterations: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[arg(short, long)]
    model: PathBuf,
    #[arg(short, long)]
    query: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Model files; the file stem names each model.
    #[arg(short, long, required = true, num_args = 1..)]
    model: Vec<PathBuf>,
    #[arg(short, long)]
    query: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CorrectArgs {
    /// Assembly FASTA with one record.
    #[arg(short, long)]
    assembly: PathBuf,
    #[arg(short, long)]
    reads: PathBuf,
    /// Mapping TSV: read_id, start, strand, segment.
    #[arg(short = 'p', long)]
    mappings: PathBuf,
    #[arg(long, default_value_t = 6)]
    max_deletion: usize,
    #[arg(long, default_value_t = 2)]
    max_insertion: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// pes, ports, bytes_per_cycle_per_port, cores or chunk.
    #[arg(long)]
    vary: String,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long)]
    pes: Option<usize>,
    #[arg(long)]
    ports: Option<usize>,
    #[arg(long)]
    bytes_per_cycle: Option<f64>,
    #[arg(long)]
    cores: Option<usize>,
    #[arg(long)]
    accelerated_fraction: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    reads: usize,
    #[arg(long, default_value_t = 0.05)]
    error_rate: f64,
    /// Skip the dense reference cross-check.
    #[arg(long)]
    no_oracle: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Settings after merging defaults, the config file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub filter: Option<FilterConfig>,
    pub lut: bool,
    pub chunk: usize,
    pub threads: Option<usize>,
    pub seed: u64,
    pub timing: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self { filter: Some(FilterConfig::default()), lut: true, chunk: DEFAULT_CHUNK, threads: None, seed: 1, timing: true }
    }
}

/// Values read from a settings file; absent keys stay `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub filter: Option<bool>,
    pub filter_bins: Option<usize>,
    pub filter_size: Option<usize>,
    pub lut: Option<bool>,
    pub chunk: Option<usize>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub timing: Option<bool>,
}

/// Parses a settings file:
///
/// ```text
/// APHMM-CONFIG 1
/// filter_bins 16
/// lut off
/// ```
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut cfg = ConfigFile::default();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |reason: String| Error::Parse { line: i + 1, reason };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let value = parts.next().ok_or_else(|| err(format!("missing value for {key}")))?;
        if parts.next().is_some() {
            return Err(err("expected `<key> <value>`".into()));
        }
        if !header {
            if key != CONFIG_MAGIC || value != "1" {
                return Err(err(format!("expected `{CONFIG_MAGIC} 1` header")));
            }
            header = true;
            continue;
        }
        let num = |v: &str| v.parse::<u64>().map_err(|_| err(format!("{key}: {v:?} is not a non-negative integer")));
        let flag = |v: &str| match v {
            "on" | "true" | "1" => Ok(true),
            "off" | "false" | "0" => Ok(false),
            _ => Err(err(format!("{key}: expected on or off, got {v:?}"))),
        };
        match key {
            "filter" => cfg.filter = Some(flag(value)?),
            "filter_bins" => cfg.filter_bins = Some(num(value)? as usize),
            "filter_size" => cfg.filter_size = Some(num(value)? as usize),
            "lut" => cfg.lut = Some(flag(value)?),
            "chunk" => cfg.chunk = Some(num(value)? as usize),
            "threads" => cfg.threads = Some(num(value)? as usize),
            "seed" => cfg.seed = Some(num(value)?),
            "timing" => cfg.timing = Some(flag(value)?),
            _ => return Err(err(format!("unknown key {key:?}"))),
        }
    }
    if !header && !text.trim().is_empty() {
        return Err(Error::Parse { line: 1, reason: format!("expected `{CONFIG_MAGIC} 1` header") });
    }
    Ok(cfg)
}

fn resolve(flags: &SharedFlags, file: &ConfigFile) -> Settings {
    let d = Settings::default();
    let filter_on = !flags.no_filter && file.filter.unwrap_or(true);
    let bins = flags.filter_bins.or(file.filter_bins).unwrap_or(DEFAULT_BINS);
    let size = flags.filter_size.or(file.filter_size).unwrap_or(DEFAULT_FILTER_SIZE);
    Settings {
        filter: filter_on.then(|| FilterConfig::histogram(bins, size)),
        lut: !flags.no_lut && file.lut.unwrap_or(d.lut),
        chunk: flags.chunk.or(file.chunk).unwrap_or(d.chunk),
        threads: flags.threads.or(file.threads),
        seed: flags.seed.or(file.seed).unwrap_or(d.seed),
        timing: !flags.no_timing && file.timing.unwrap_or(d.timing),
    }
}

impl Settings {
    fn train_options(&self) -> TrainOptions {
        let mut o = TrainOptions { chunk_length: self.chunk, ..TrainOptions::default() }.with_lut(self.lut);
        o.filter = self.filter;
        o
    }

    fn echo(&self) -> Vec<(String, String)> {
        let filter = match self.filter {
            Some(f) => format!("histogram bins={} size={}", f.bins, f.size),
            None => "off".into(),
        };
        vec![
            ("filter".into(), filter),
            ("lut".into(), on_off(self.lut)),
            ("chunk".into(), self.chunk.to_string()),
            ("threads".into(), self.threads.map(|t| t.to_string()).unwrap_or_else(|| "auto".into())),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

fn on_off(b: bool) -> String {
    if b { "on" } else { "off" }.into()
}

/// What a command hands back for the optional report.
#[derive(Default)]
struct Outcome {
    counters: OpCounters,
    steps: Vec<(String, f64)>,
    extra: Vec<(String, String)>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn load_model(path: &Path) -> Result<PhmmGraph> {
    deserialize(&read_text(path)?)
}

fn load_fasta(path: &Path) -> Result<Vec<FastaRecord>> {
    parse_fasta(&read_text(path)?)
}

fn parse_alphabet(name: &str) -> Result<Alphabet> {
    match name {
        "dna" => Ok(Alphabet::dna()),
        "protein" => Ok(Alphabet::protein()),
        s => Alphabet::new(&s.to_ascii_uppercase()),
    }
}

fn single_record(path: &Path) -> Result<FastaRecord> {
    let mut records = load_fasta(path)?;
    if records.len() != 1 {
        return Err(Error::InvalidOptions(format!("{} must hold exactly one record, found {}", path.display(), records.len())));
    }
    Ok(records.remove(0))
}

fn encode(alphabet: &Alphabet, record: &FastaRecord) -> Result<Vec<u8>> {
    alphabet.encode(&record.sequence).map_err(|e| match e {
        Error::UnknownSymbol { position, symbol } => {
            Error::AlphabetMismatch(format!("record '{}': symbol {symbol:?} at position {position}", record.id))
        }
        e => e,
    })
}

fn cmd_build(a: &BuildArgs) -> Result<Outcome> {
    let alphabet = parse_alphabet(&a.alphabet)?;
    let (id, seq) = match (&a.sequence, &a.fasta) {
        (Some(s), None) => ("inline".to_string(), s.to_ascii_uppercase()),
        (None, Some(p)) => {
            let r = single_record(p)?;
            (r.id, r.sequence)
        }
        _ => return Err(Error::InvalidOptions("give either --sequence or --fasta".into())),
    };
    let priors = PriorConfig::default();
    let graph = match a.design {
        DesignArg::Traditional => build_traditional(&seq, &alphabet, &priors)?,
        DesignArg::ErrorCorrection => build_error_correction(&seq, &alphabet, a.max_deletion, a.max_insertion, &priors)?,
    };
    write_out(a.output.as_deref(), &serialize(&graph))?;
    Ok(Outcome {
        extra: vec![
            ("source".into(), id),
            ("states".into(), graph.n_states().to_string()),
            ("transitions".into(), graph.n_transitions().to_string()),
        ],
        ..Outcome::default()
    })
}

fn cmd_train(a: &TrainArgs, s: &Settings) -> Result<Outcome> {
    let mut graph = load_model(&a.model)?;
    let reads = load_fasta(&a.reads)?;
    let codes: Vec<Vec<u8>> = reads.iter().map(|r| encode(graph.alphabet(), r)).collect::<Result<_>>()?;
    let options = s.train_options();
    let mut ws = TrainingWorkspace::new();
    let mut counters = OpCounters::default();
    let mut rows = Vec::new();
    let t0 = Instant::now();
    for it in 1..=a.iterations {
        let mut total = 0.0;
        for c in &codes {
            let res = train_single_in(&mut ws, &graph, c, &options)?;
            counters += res.counters;
            total += res.log_likelihood;
            graph = res.graph;
        }
        rows.push((format!("iteration_{it}_log_likelihood"), format!("{total:.9}")));
    }
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    write_out(a.output.as_deref(), &serialize(&graph))?;
    rows.push(("reads".into(), codes.len().to_string()));
    Ok(Outcome { counters, steps: vec![("train_ms".into(), elapsed)], extra: rows })
}

fn cmd_score(a: &ScoreArgs) -> Result<Outcome> {
    let graph = load_model(&a.model)?;
    let queries = load_fasta(&a.query)?;
    let mut rows = Vec::with_capacity(queries.len());
    for q in &queries {
        let ll = score(&graph, &encode(graph.alphabet(), q)?)?;
        rows.push(vec![q.id.clone(), format!("{ll:.9}")]);
    }
    write_out(a.output.as_deref(), &tsv(&["id", "log_likelihood"], rows))?;
    Ok(Outcome::default())
}

fn model_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn cmd_search(a: &SearchArgs) -> Result<Outcome> {
    let models: Vec<(String, PhmmGraph)> =
        a.model.iter().map(|p| Ok((model_name(p), load_model(p)?))).collect::<Result<_>>()?;
    let queries = load_fasta(&a.query)?;
    let results = family_search(&models, &queries)?;
    let rows = results.iter().flat_map(|q| {
        q.hits.iter().map(move |h| {
            vec![
                q.query.clone(),
                h.rank.to_string(),
                h.name.clone(),
                format!("{:.9}", h.log_likelihood),
                format!("{:.9}", h.normalized_score),
            ]
        })
    });
    write_out(
        a.output.as_deref(),
        &tsv(&["query", "rank", "model", "log_likelihood", "normalized_score"], rows),
    )?;
    Ok(Outcome::default())
}

fn cmd_align(a: &ScoreArgs) -> Result<Outcome> {
    let graph = load_model(&a.model)?;
    let records = load_fasta(&a.query)?;
    let rows = msa_align(&graph, &records)?;
    let text = render_alignment(&graph, &rows);
    let table = rows
        .iter()
        .zip(text)
        .map(|(r, t)| vec![r.id.clone(), format!("{:.9}", r.log_probability), t]);
    write_out(a.output.as_deref(), &tsv(&["id", "log_probability", "alignment"], table))?;
    Ok(Outcome::default())
}

fn cmd_correct(a: &CorrectArgs, s: &Settings) -> Result<Outcome> {
    let assembly = single_record(&a.assembly)?;
    let reads = load_fasta(&a.reads)?;
    let mappings = parse_mappings(&read_text(&a.mappings)?)?;
    let options = CorrectionOptions {
        chunk_length: s.chunk,
        max_deletion: a.max_deletion,
        max_insertion: a.max_insertion,
        filter: s.filter,
        lut_enabled: s.lut,
        ..CorrectionOptions::default()
    };
    let t0 = Instant::now();
    let result = correct_with_report(&assembly.sequence, &Alphabet::dna(), &reads, &mappings, &options)?;
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    write_out(a.output.as_deref(), &write_fasta(&[FastaRecord::new(assembly.id, result.sequence)]))?;
    Ok(Outcome {
        counters: result.counters,
        steps: vec![("correct_ms".into(), elapsed)],
        extra: vec![
            ("chunks".into(), result.chunks.to_string()),
            ("segments_trained".into(), result.segments_trained.to_string()),
        ],
    })
}

fn cmd_sweep(a: &SweepArgs, s: &Settings) -> Result<Outcome> {
    let vary: SweepParameter = a.vary.parse()?;
    let mut config = AcceleratorConfig { lut_enabled: s.lut, filter_enabled: s.filter.is_some(), ..AcceleratorConfig::default() };
    if let Some(v) = a.pes {
        config.pes = v;
    }
    if let Some(v) = a.ports {
        config.ports = v;
    }
    if let Some(v) = a.bytes_per_cycle {
        config.bytes_per_cycle_per_port = v;
    }
    if let Some(v) = a.cores {
        config.cores = v;
    }
    let mut workload = WorkloadProfile { sequence_length: s.chunk, ..WorkloadProfile::default() };
    if let Some(f) = a.accelerated_fraction {
        workload.accelerated_fraction = f;
    }
    let reports = sweep(&config, &workload, vary, &a.values)?;
    write_out(a.output.as_deref(), &reports_to_csv(&reports))?;
    Ok(Outcome::default())
}

fn cmd_bench(a: &BenchArgs, s: &Settings) -> Result<Outcome> {
    let config = BenchConfig {
        seed: s.seed,
        reads: a.reads,
        chunk_length: s.chunk,
        error_rate: a.error_rate,
        filter: s.filter.unwrap_or_default(),
        check_oracle: !a.no_oracle,
    };
    if !(0.0..1.0).contains(&config.error_rate) {
        return Err(Error::InvalidOptions(format!("error rate {} outside [0, 1)", config.error_rate)));
    }
    let reports = bench(&config)?;
    if let Some(dev) = reports.iter().filter_map(|r| r.oracle_deviation).find(|d| *d > 1e-6) {
        return Err(Error::InvalidGraph(format!("optimized path deviates from the dense reference by {dev:.3e}")));
    }
    write_out(a.output.as_deref(), &bench_csv(&reports, s.timing))?;
    let mut counters = OpCounters::default();
    for r in &reports {
        counters += r.counters;
    }
    let steps = reports
        .iter()
        .flat_map(|r| [(format!("{}_forward_ms", r.variant), r.forward_ms), (format!("{}_train_ms", r.variant), r.train_ms)])
        .collect();
    Ok(Outcome { counters, steps, extra: Vec::new() })
}

fn report_text(command: &str, settings: &Settings, outcome: &Outcome, wall_ms: f64) -> String {
    let c = &outcome.counters;
    let mut rows: Vec<(String, String)> = vec![("command".into(), command.into())];
    rows.extend(settings.echo());
    if settings.timing {
        rows.extend(outcome.steps.iter().map(|(k, v)| (k.clone(), format!("{v:.3}"))));
        rows.push(("wall_ms".into(), format!("{wall_ms:.3}")));
    }
    for (k, v) in [
        ("multiplications", c.multiplications),
        ("product_requests", c.product_requests),
        ("lut_hits", c.lut_hits),
        ("lut_builds", c.lut_builds),
        ("lut_passthrough", c.lut_passthrough),
        ("filter_inserted", c.filter_inserted),
        ("filter_selected", c.filter_selected),
        ("bytes_moved", c.bytes_moved),
        ("peak_backward_rows", c.peak_backward_rows),
    ] {
        rows.push((k.into(), v.to_string()));
    }
    rows.push(("lut_hit_ratio".into(), format!("{:.6}", c.lut_hit_ratio())));
    rows.extend(outcome.extra.iter().cloned());
    tsv(&["key", "value"], rows.into_iter().map(|(k, v)| vec![k, v]))
}

fn dispatch(cli: &Cli, settings: &Settings) -> Result<(&'static str, Outcome)> {
    Ok(match &cli.command {
        Command::Build(a) => ("build", cmd_build(a)?),
        Command::Train(a) => ("train", cmd_train(a, settings)?),
        Command::Score(a) => ("score", cmd_score(a)?),
        Command::Search(a) => ("search", cmd_search(a)?),
        Command::Align(a) => ("align", cmd_align(a)?),
        Command::Correct(a) => ("correct", cmd_correct(a, settings)?),
        Command::PerfSweep(a) => ("perf-sweep", cmd_sweep(a, settings)?),
        Command::Bench(a) => ("bench", cmd_bench(a, settings)?),
    })
}

fn run(cli: &Cli) -> Result<()> {
    let file = match &cli.shared.config {
        Some(p) => parse_config(&read_text(p)?)?,
        None => ConfigFile::default(),
    };
    let settings = resolve(&cli.shared, &file);
    if settings.threads == Some(0) {
        return Err(Error::InvalidOptions("--threads must be at least 1".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = settings.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidOptions(e.to_string()))?;
    let t0 = Instant::now();
    let (name, outcome) = pool.install(|| dispatch(cli, &settings))?;
    let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
    if let Some(path) = &cli.shared.report {
        let mut text = report_text(name, &settings, &outcome, wall_ms);
        if !text.ends_with('\n') {
            text.push('\n');
        }
        write_out(Some(path), &text)?;
    }
    Ok(())
}

/// Internal failures map to exit code 2, everything else the user can fix to 1.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::AccumulatorStateMissing { .. } | Error::SequencePositionOutOfRange { .. } => 2,
        _ => 1,
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("phmm: {e}");
            exit_code(&e)
        }
        Err(_) => {
            eprintln!("phmm: internal error");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_and_rejects() {
        let c = parse_config("# comment\nAPHMM-CONFIG 1\nfilter_bins 8\nlut off\nseed 9\n").unwrap();
        assert_eq!(c.filter_bins, Some(8));
        assert_eq!(c.lut, Some(false));
        assert_eq!(c.seed, Some(9));
        assert!(matches!(parse_config("filter_bins 8\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("APHMM-CONFIG 1\nbogus 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_config("APHMM-CONFIG 1\nlut maybe\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(parse_config("").unwrap(), ConfigFile::default());
    }

    #[test]
    fn flags_override_config_override_defaults() {
        let file = ConfigFile { filter_bins: Some(8), filter_size: Some(100), chunk: Some(300), lut: Some(false), ..Default::default() };
        let flags = SharedFlags { filter_bins: Some(32), ..Default::default() };
        let s = resolve(&flags, &file);
        assert_eq!(s.filter, Some(FilterConfig::histogram(32, 100)));
        assert_eq!(s.chunk, 300);
        assert!(!s.lut);
        assert_eq!(s.seed, Settings::default().seed);
        let s = resolve(&SharedFlags { no_filter: true, ..Default::default() }, &file);
        assert_eq!(s.filter, None);
        assert_eq!(resolve(&SharedFlags::default(), &ConfigFile::default()), Settings::default());
    }

    #[test]
    fn parse_failures_exit_one() {
        assert_eq!(run_cli(["phmm", "score", "--bogus"]), 1);
        assert_eq!(run_cli(["phmm"]), 1);
        assert_eq!(run_cli(["phmm", "--help"]), 0);
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::EmptySequence), 1);
        assert_eq!(exit_code(&Error::Io("x".into())), 1);
        assert_eq!(exit_code(&Error::AccumulatorStateMissing { state: 3 }), 2);
    }
}
