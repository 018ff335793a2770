use std::fmt;

use super::FastaRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strand {
    Forward,
    Reverse,
}

impl fmt::Display for Strand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strand::Forward => "+",
            Strand::Reverse => "-",
        })
    }
}

/// One read segment placed on the assembly.
///
/// `segment` is the read sequence as it appears in the file; `*` stands for
/// the full read of the same id. Reverse-strand segments are reverse
/// complemented before use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    pub read_id: String,
    /// 0-based assembly position of the segment's first symbol.
    pub start: usize,
    pub strand: Strand,
    pub segment: String,
}

impl Mapping {
    /// The segment in assembly orientation, resolving `*` through `reads`.
    pub fn resolve(&self, reads: &[FastaRecord]) -> Result<String> {
        let raw = if self.segment == "*" {
            reads
                .iter()
                .find(|r| r.id == self.read_id)
                .map(|r| r.sequence.clone())
                .ok_or_else(|| Error::InvalidOptions(format!("mapping references unknown read '{}'", self.read_id)))?
        } else {
            self.segment.to_ascii_uppercase()
        };
        Ok(match self.strand {
            Strand::Forward => raw,
            Strand::Reverse => reverse_complement(&raw),
        })
    }
}

/// Reverse complement over A/C/G/T; other symbols are kept as they are.
pub fn reverse_complement(s: &str) -> String {
    s.bytes()
        .rev()
        .map(|b| match b.to_ascii_uppercase() {
            b'A' => 'T',
            b'C' => 'G',
            b'G' => 'C',
            b'T' => 'A',
            other => other as char,
        })
        .collect()
}

/// Parses `read_id <TAB> start <TAB> strand <TAB> segment` lines. Blank lines
/// and lines starting with `#` are skipped, as is a `read_id` header row.
pub fn parse_mappings(text: &str) -> Result<Vec<Mapping>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || line.starts_with("read_id\t") {
            continue;
        }
        let err = |reason: &str| Error::Parse { line: n + 1, reason: reason.to_string() };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(err("expected 4 tab-separated fields"));
        }
        let start = fields[1].parse().map_err(|_| err("start is not a non-negative integer"))?;
        let strand = match fields[2] {
            "+" => Strand::Forward,
            "-" => Strand::Reverse,
            _ => return Err(err("strand must be + or -")),
        };
        if fields[0].is_empty() || fields[3].is_empty() {
            return Err(err("empty field"));
        }
        out.push(Mapping { read_id: fields[0].to_string(), start, strand, segment: fields[3].to_string() });
    }
    Ok(out)
}
