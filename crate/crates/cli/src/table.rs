//! Sweep tables and their CSV / JSON emission.
//!
//! Both emitters format every number through serde_json's shortest
//! round-trip printer, so the CSV cells and the JSON numbers of the same run
//! are byte-identical: UTF-8, '.' decimal separator, no thousands grouping,
//! LF terminators.

use serde_json::{Map, Number, Value};

/// Ordered rows of named real columns.
#[derive(Debug, Clone)]
pub struct SweepTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        SweepTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (name, value) in self.columns.iter().zip(row) {
                        let n = Number::from_f64(*value)
                            .expect("sweep tables hold finite numbers");
                        obj.insert(name.clone(), Value::Number(n));
                    }
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Shortest round-trip decimal form of a finite f64, identical to what
/// serde_json emits for the same value.
pub fn fmt_number(v: f64) -> String {
    serde_json::to_string(&v).expect("finite numbers serialize")
}
