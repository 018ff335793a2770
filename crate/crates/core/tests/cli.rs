use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use phmm_core::perf::{reports_to_csv, sweep, AcceleratorConfig, SweepParameter, WorkloadProfile};

fn phmm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phmm")).args(args).output().unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn build_score_search_align() {
    let dir = tempfile::tempdir().unwrap();
    let (m1, m2) = (p(dir.path(), "fam1.aphmm"), p(dir.path(), "fam2.aphmm"));
    ok(&phmm(&["build", "--sequence", "ACGTACGTTA", "--design", "traditional", "-o", &m1]));
    ok(&phmm(&["build", "--sequence", "GGGCCCATAT", "--design", "traditional", "-o", &m2]));
    let q = p(dir.path(), "q.fa");
    fs::write(&q, ">q1\nACGTACGTTA\n>q2\nGGGCCCATAT\n").unwrap();

    let scores = ok(&phmm(&["score", "-m", &m1, "-q", &q]));
    let lines: Vec<&str> = scores.lines().collect();
    assert_eq!(lines[0], "#schema=1");
    assert_eq!(lines[1], "id\tlog_likelihood");
    assert!(lines[2].starts_with("q1\t-"));
    assert_eq!(lines.len(), 4);
    assert_eq!(scores, ok(&phmm(&["score", "-m", &m1, "-q", &q])));

    let hits = ok(&phmm(&["search", "-m", &m1, &m2, "-q", &q]));
    assert!(hits.lines().any(|l| l.starts_with("q1\t1\tfam1\t")));
    assert!(hits.lines().any(|l| l.starts_with("q2\t1\tfam2\t")));

    let aligned = ok(&phmm(&["align", "-m", &m1, "-q", &q]));
    assert!(aligned.lines().nth(2).unwrap().ends_with("\tACGTACGTTA."));
}

#[test]
fn train_and_correct_with_report_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let truth = "ACGTTGCAAGCTTACGGATCCATGCAAGTCGATCGGCTAGCTAGGCTTAACGTAGCTAGCATCGATCGTACGATCGATGCTAGCTAGCTGATCG";
    let draft = truth.replacen("GGATCC", "GGTTCC", 1);
    let (asm, reads, maps) = (p(dir.path(), "asm.fa"), p(dir.path(), "reads.fa"), p(dir.path(), "maps.tsv"));
    fs::write(&asm, format!(">contig\n{draft}\n")).unwrap();
    let mut r = String::new();
    let mut m = String::from("read_id\tstart\tstrand\tsegment\n");
    for i in 0..6 {
        r.push_str(&format!(">r{i}\n{truth}\n"));
        m.push_str(&format!("r{i}\t0\t+\t*\n"));
    }
    fs::write(&reads, &r).unwrap();
    fs::write(&maps, &m).unwrap();
    let cfg = p(dir.path(), "run.cfg");
    fs::write(&cfg, "APHMM-CONFIG 1\nfilter off\nchunk 150\nthreads 2\n").unwrap();
    let (out, report) = (p(dir.path(), "fixed.fa"), p(dir.path(), "report.tsv"));
    ok(&phmm(&["correct", "-a", &asm, "-r", &reads, "-p", &maps, "-o", &out, "--config", &cfg, "--report", &report, "--no-timing"]));
    assert_eq!(fs::read_to_string(&out).unwrap().replace('\n', ""), format!(">contig{truth}"));
    let rep = fs::read_to_string(&report).unwrap();
    assert!(rep.starts_with("#schema=1\nkey\tvalue\ncommand\tcorrect\n"));
    assert!(rep.contains("filter\toff\n") && rep.contains("chunk\t150\n") && rep.contains("threads\t2\n"));
    assert!(!rep.contains("_ms"));
    // flag beats config
    ok(&phmm(&["correct", "-a", &asm, "-r", &reads, "-p", &maps, "-o", &out, "--config", &cfg, "--chunk", "300", "--report", &report]));
    let rep = fs::read_to_string(&report).unwrap();
    assert!(rep.contains("chunk\t300\n") && rep.contains("wall_ms"));

    let (model, trained) = (p(dir.path(), "m.aphmm"), p(dir.path(), "t.aphmm"));
    ok(&phmm(&["build", "--fasta", &asm, "-o", &model]));
    ok(&phmm(&["train", "-m", &model, "-r", &reads, "--iterations", "2", "-o", &trained, "--report", &report]));
    let rep = fs::read_to_string(&report).unwrap();
    assert!(rep.contains("iteration_2_log_likelihood"));
    assert!(fs::read_to_string(&trained).unwrap().starts_with("APHMM 1"));
}

#[test]
fn perf_sweep_matches_library() {
    let out = ok(&phmm(&["perf-sweep", "--vary", "pes", "--values", "16,32,64,128"]));
    let lib = sweep(&AcceleratorConfig::default(), &WorkloadProfile::default(), SweepParameter::Pes, &[16.0, 32.0, 64.0, 128.0]).unwrap();
    assert_eq!(out, reports_to_csv(&lib));
}

#[test]
fn bench_is_reproducible_without_timing() {
    let args = ["bench", "--reads", "2", "--chunk", "150", "--no-timing", "--seed", "5"];
    let a = ok(&phmm(&args));
    assert_eq!(a, ok(&phmm(&args)));
    assert!(a.lines().nth(1).unwrap().contains("lut_hit_ratio"));
    assert_eq!(a.lines().count(), 7);
}

#[test]
fn exit_codes() {
    assert_eq!(phmm(&["score", "--bogus"]).status.code(), Some(1));
    assert_eq!(phmm(&["score", "-m", "/nonexistent.aphmm", "-q", "/nonexistent.fa"]).status.code(), Some(1));
    assert_eq!(phmm(&["perf-sweep", "--vary", "voltage", "--values", "1"]).status.code(), Some(1));
    assert_eq!(phmm(&["build", "--sequence", "ACGZ"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = p(dir.path(), "bad.cfg");
    fs::write(&bad, "APHMM-CONFIG 1\nlut sometimes\n").unwrap();
    let out = phmm(&["perf-sweep", "--vary", "pes", "--values", "16", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(phmm(&["--help"]).status.code(), Some(0));
}
