// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use waferqc_core::FitResult;

/// A named table; cells are JSON numbers or strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.columns)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(|v| match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            }))?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub recipe: String,
    /// sha256 over the input files and the effective parameters.
    pub inputs_digest: String,
    pub params: Value,
    pub fits: BTreeMap<String, FitResult>,
    pub scalars: BTreeMap<String, f64>,
    pub tables: BTreeMap<String, Table>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
}

impl AnalysisReport {
    pub fn new(recipe: &str, inputs_digest: String, params: Value) -> Self {
        Self {
            recipe: recipe.to_string(),
            inputs_digest,
            params,
            fits: BTreeMap::new(),
            scalars: BTreeMap::new(),
            tables: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn all_converged(&self) -> bool {
        self.fits.values().all(|f| f.converged)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Length-prefixed sha256 of every input blob, then the parameters.
pub fn inputs_digest(blobs: &[&[u8]], params: &Value) -> String {
    let mut h = Sha256::new();
    for b in blobs {
        h.update((b.len() as u64).to_le_bytes());
        h.update(b);
    }
    h.update(params.to_string().as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_depends_on_order_and_params() {
        let p = serde_json::json!({"a": 1});
        let d1 = inputs_digest(&[b"ab", b"c"], &p);
        assert_eq!(d1, inputs_digest(&[b"ab", b"c"], &p));
        assert_ne!(d1, inputs_digest(&[b"a", b"bc"], &p));
        assert_ne!(d1, inputs_digest(&[b"ab", b"c"], &serde_json::json!({"a": 2})));
        assert_eq!(d1.len(), 64);
    }

    #[test]
    fn csv_table() {
        let mut t = Table::new(&["name", "x"]);
        t.push(vec!["a".into(), 1.5.into()]);
        t.push(vec!["b".into(), Value::Null]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,x\na,1.5\nb,\n");
    }
}
