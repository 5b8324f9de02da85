//! CSV and JSON rendering of result tables.
//!
//! CSV: header row, first column the abscissa, numbers in shortest
//! round-trip form with '.' as decimal separator.
//! JSON: `{"model", "command", "results": [{column: value}], "meta": {"seed", "tolerances"}}`.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    /// Non-finite numbers become strings so the JSON stays valid and lossless.
    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(format!("{v:?}")),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self, model: Value, command: &str, meta: Value) -> String {
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "model": model,
            "command": command,
            "results": results,
            "meta": meta,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips() {
        let mut t = Table::new(&["x", "pdf", "note"]);
        let v = 0.1 + 0.2;
        t.push(vec![Cell::Num(v), Cell::Num(f64::INFINITY), Cell::Text("a,b".into())]);
        let csv = t.to_csv();
        assert_eq!(csv, "x,pdf,note\n0.30000000000000004,inf,\"a,b\"\n");
        let back: f64 = csv.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn json_shape() {
        let mut t = Table::new(&["level", "var"]);
        t.push(vec![Cell::Num(0.9), Cell::Num(f64::NAN)]);
        let s = t.to_json(json!({"name": "pareto"}), "var", json!({"seed": 42, "tolerances": {}}));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["command"], "var");
        assert_eq!(v["results"][0]["level"], 0.9);
        assert_eq!(v["results"][0]["var"], "NaN");
        assert_eq!(v["meta"]["seed"], 42);
        let keys: Vec<&String> = v["results"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["level", "var"]);
    }
}
