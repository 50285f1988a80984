use std::io::Write;

use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// What a command produced: the JSON payload and its tabular form.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub payload: Value,
    pub table: Table,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
    }

    /// Two columns, one row per scalar entry of a flat JSON object.
    pub fn key_values(payload: &Value) -> Self {
        let mut t = Self::new(&["quantity", "value"]);
        if let Value::Object(map) = payload {
            for (key, v) in map {
                match v {
                    Value::Object(_) => {}
                    Value::Array(items) => {
                        for (i, item) in items.iter().enumerate() {
                            if !item.is_object() && !item.is_array() {
                                t.push([format!("{key}[{i}]"), scalar(item)]);
                            }
                        }
                    }
                    _ => t.push([key.clone(), scalar(v)]),
                }
            }
        }
        t
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn envelope(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "result": self.payload,
        })
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> anyhow::Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.envelope())?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.table.header)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_per_rfc4180() {
        let mut table = Table::new(&["name", "note"]);
        table.push(["a,b", "say \"hi\""]);
        let r = Report {
            command: "test",
            payload: Value::Null,
            table,
        };
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,note\n\"a,b\",\"say \"\"hi\"\"\"\n");
    }

    #[test]
    fn flat_objects_become_rows() {
        let t = Table::key_values(&json!({"value": 1.5, "ok": true, "pair": [1, 2], "nested": {"x": 1}}));
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[0], vec!["ok", "true"]);
    }
}
