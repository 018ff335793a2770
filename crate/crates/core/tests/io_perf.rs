use phmm_core::io::{parse_fasta, parse_mappings, write_fasta, FastaRecord, Strand};
use phmm_core::model::{build_error_correction, deserialize, serialize, Alphabet, PriorConfig};
use phmm_core::perf::{estimate, reports_to_csv, sweep, AcceleratorConfig, SweepParameter, WorkloadProfile};
use proptest::prelude::*;

#[test]
fn fasta_wrapped_and_lowercase() {
    let recs = parse_fasta(">a first\nacgt\nACGT\n\n>b\nTT\n").unwrap();
    assert_eq!(recs, vec![FastaRecord::new("a", "ACGTACGT"), FastaRecord::new("b", "TT")]);
    assert!(parse_fasta("").unwrap().is_empty());
    // symbols are not validated by the parser
    assert_eq!(parse_fasta(">x\nNNZ\n").unwrap()[0].sequence, "NNZ");
    let long = FastaRecord::new("l", "A".repeat(130));
    let text = write_fasta(std::slice::from_ref(&long));
    assert_eq!(text.lines().map(str::len).collect::<Vec<_>>(), vec![2, 60, 60, 10]);
    assert_eq!(parse_fasta(&text).unwrap(), vec![long]);
}

#[test]
fn mapping_table_with_header_and_comments() {
    let m = parse_mappings("#schema=1\nread_id\tstart\tstrand\tsegment\nr1\t10\t-\t*\nr2\t0\t+\tACG\n").unwrap();
    assert_eq!(m.len(), 2);
    assert_eq!((m[0].start, m[0].strand), (10, Strand::Reverse));
    assert_eq!(m[1].segment, "ACG");
}

#[test]
fn model_files_round_trip_bit_exact() {
    let g = build_error_correction("ACGTTAGC", &Alphabet::dna(), 6, 2, &PriorConfig::default()).unwrap();
    let text = serialize(&g);
    let back = deserialize(&text).unwrap();
    assert_eq!(back, g);
    assert_eq!(serialize(&back), text);
}

proptest! {
    #[test]
    fn fasta_parse_write_parse_is_stable(recs in prop::collection::vec(("[a-z][a-z0-9_]{0,8}", "[ACGTacgt]{1,200}"), 1..5)) {
        let records: Vec<FastaRecord> = recs.into_iter().map(|(i, s)| FastaRecord::new(i, s)).collect();
        let once = parse_fasta(&write_fasta(&records)).unwrap();
        let twice = parse_fasta(&write_fasta(&once)).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn perf_reports_are_deterministic_and_non_negative(groups in 1usize..64, ports in 1usize..16, len in 150usize..1000) {
        let c = AcceleratorConfig { pes: 4 * groups, pes_per_group: 4, ports, ..AcceleratorConfig::default() };
        let w = WorkloadProfile { sequence_length: len, ..WorkloadProfile::default() };
        let a = estimate(&c, &w).unwrap();
        prop_assert_eq!(&a, &estimate(&c, &w).unwrap());
        prop_assert!(a.total_cycles >= 0.0 && a.kernel_speedup >= 0.0 && a.end_to_end_speedup >= 0.0);
    }
}

#[test]
fn sweep_csv_matches_estimates() {
    let c = AcceleratorConfig::default();
    let w = WorkloadProfile::default();
    let reports = sweep(&c, &w, SweepParameter::Pes, &[16.0, 32.0]).unwrap();
    let direct = estimate(&AcceleratorConfig { pes: 32, ..c }, &w).unwrap();
    assert_eq!(reports[1], direct);
    let csv = reports_to_csv(&reports);
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("#schema=1\n"));
}
