//! FASTA, read-mapping TSV and tabular output helpers.

mod fasta;
mod mapping;

pub use fasta::{parse_fasta, write_fasta, FastaRecord, FASTA_WIDTH};
pub use mapping::{parse_mappings, reverse_complement, Mapping, Strand};

/// Version written as `#schema=<n>` at the top of every table.
pub const TABLE_SCHEMA: u32 = 1;

/// Tab-separated table with a schema comment and a header row.
pub fn tsv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("#schema={TABLE_SCHEMA}\n{}\n", header.join("\t"));
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    #[test]
    fn tsv_layout() {
        let t = super::tsv(&["a", "b"], [vec!["1".to_string(), "2".to_string()]]);
        assert_eq!(t, "#schema=1\na\tb\n1\t2\n");
    }
}
