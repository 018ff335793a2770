use crate::error::{Error, Result};

pub const FASTA_WIDTH: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub id: String,
    pub sequence: String,
}

impl FastaRecord {
    pub fn new(id: impl Into<String>, sequence: impl Into<String>) -> Self {
        Self { id: id.into(), sequence: sequence.into() }
    }
}

/// Parses FASTA text. Wrapped lines are joined and uppercased; the id is the
/// header up to the first whitespace. Symbols are not checked here.
pub fn parse_fasta(text: &str) -> Result<Vec<FastaRecord>> {
    let mut records: Vec<FastaRecord> = Vec::new();
    let mut header_line = 0;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let lineno = n + 1;
        if let Some(h) = line.strip_prefix('>') {
            close(&records, header_line)?;
            let id = h.split_whitespace().next().unwrap_or("");
            if id.is_empty() {
                return Err(Error::Parse { line: lineno, reason: "empty record id".into() });
            }
            records.push(FastaRecord::new(id, String::new()));
            header_line = lineno;
        } else if line.trim().is_empty() || line.starts_with(';') {
            continue;
        } else {
            let Some(rec) = records.last_mut() else {
                return Err(Error::Parse { line: lineno, reason: "sequence data before the first header".into() });
            };
            if line.chars().any(char::is_whitespace) {
                rec.sequence.extend(line.chars().filter(|c| !c.is_whitespace()).map(|c| c.to_ascii_uppercase()));
            } else {
                rec.sequence.push_str(&line.to_ascii_uppercase());
            }
        }
    }
    close(&records, header_line)?;
    Ok(records)
}

fn close(records: &[FastaRecord], header_line: usize) -> Result<()> {
    match records.last() {
        Some(r) if r.sequence.is_empty() => {
            Err(Error::Parse { line: header_line, reason: format!("record '{}' has no sequence", r.id) })
        }
        _ => Ok(()),
    }
}

/// Writes records wrapped at [`FASTA_WIDTH`] columns.
pub fn write_fasta(records: &[FastaRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push('>');
        out.push_str(&r.id);
        out.push('\n');
        let bytes = r.sequence.as_bytes();
        for line in bytes.chunks(FASTA_WIDTH) {
            out.push_str(std::str::from_utf8(line).expect("ascii sequence"));
            out.push('\n');
        }
    }
    out
}
