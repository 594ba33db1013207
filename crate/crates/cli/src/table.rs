//! Output tables: a header and rows of exact text cells.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Read the CSV emitted by the library, whose cells never contain commas.
    pub fn from_csv(text: &str) -> Self {
        let mut lines = text.lines();
        let header = lines
            .next()
            .unwrap_or_default()
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        Table { header, rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    /// One object per row; cells stay strings so rationals keep their exact text.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let obj: Map<String, Value> = self
                .header
                .iter()
                .cloned()
                .zip(r.iter().map(|c| Value::String(c.clone())))
                .collect();
            out.push_str(&serde_json::to_string(&obj).expect("strings serialize"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let text = "m,vol\n1,-3/4\n2,1/2\n";
        let t = Table::from_csv(text);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.to_csv(), text);
        // serde_json keeps object keys sorted.
        assert_eq!(
            t.to_jsonl().lines().next().unwrap(),
            r#"{"m":"1","vol":"-3/4"}"#
        );
    }
}
