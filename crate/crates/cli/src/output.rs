//! Report files: JSON, CSV tables, DOT graphs, and the config hash.

use std::fmt::Write as _;
use std::path::Path;

use canon_core::precanon::PrecanonicalStructure;
use canon_core::LMat;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::JobConfig;
use crate::CliError;

/// SHA-256 of the effective configuration (after flag overrides).
pub fn config_hash(cfg: &JobConfig) -> String {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, v: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    std::fs::write(dir.join(name), s)?;
    Ok(())
}

/// Long-format CSV: one row per nonzero matrix entry.
pub struct CsvTable {
    text: String,
}

impl CsvTable {
    pub fn new() -> Self {
        Self { text: "block,row,col,value\n".into() }
    }

    pub fn push_matrix(&mut self, block: &str, labels: &[String], m: &LMat) {
        for (r, c, x) in m.entries() {
            if !x.is_zero() {
                let _ = writeln!(self.text, "{},{},{},{}", quote(block), quote(&labels[r]), quote(&labels[c]), x.to_csv_string());
            }
        }
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<(), CliError> {
        std::fs::write(dir.join(name), &self.text)?;
        Ok(())
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Order DAG (covering relations only), one cluster per structure; arrows point down.
pub struct Dot {
    text: String,
}

impl Dot {
    pub fn new() -> Self {
        Self { text: "digraph order {\n  rankdir=BT;\n".into() }
    }

    pub fn push(&mut self, name: &str, p: &PrecanonicalStructure) {
        let k = self.text.matches("subgraph").count();
        let _ = writeln!(self.text, "  subgraph cluster_{k} {{\n    label={:?};", name);
        for (i, l) in p.labels.iter().enumerate() {
            let _ = writeln!(self.text, "    n{k}_{i} [label={:?}];", l);
        }
        let n = p.len();
        for (a, b) in p.order_edges() {
            if !(0..n).any(|m| p.less(a, m) && p.less(m, b)) {
                let _ = writeln!(self.text, "    n{k}_{a} -> n{k}_{b};");
            }
        }
        self.text.push_str("  }\n");
    }

    pub fn write(mut self, dir: &Path, name: &str) -> Result<(), CliError> {
        self.text.push_str("}\n");
        std::fs::write(dir.join(name), self.text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_content_only() {
        let a: JobConfig = serde_json::from_str(r#"{"rank": 3}"#).unwrap();
        let b: JobConfig = serde_json::from_str(r#"{ "rank" : 3 }"#).unwrap();
        let c: JobConfig = serde_json::from_str(r#"{"rank": 4}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&c));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn csv_lists_nonzero_entries() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = CsvTable::new();
        t.push_matrix("[1, 0]", &["a".into(), "b".into()], &LMat::identity(2));
        t.write(dir.path(), "m.csv").unwrap();
        let s = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
        assert_eq!(s.lines().next(), Some("block,row,col,value"));
        assert_eq!(s.lines().collect::<Vec<_>>()[1..], ["\"[1, 0]\",a,a,1*q^0", "\"[1, 0]\",b,b,1*q^0"]);
    }
}
