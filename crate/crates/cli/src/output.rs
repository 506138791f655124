//! CSV and JSON emission.

use serde::Serialize;

use crate::config::Format;

/// One output cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_nan() => "NaN".into(),
            // Adding zero turns −0 into +0.
            Cell::Num(v) => format!("{:.16e}", v + 0.0),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) if v.is_finite() => s.serialize_f64(v + 0.0),
            Cell::Num(_) => s.serialize_none(),
            Cell::Int(v) => s.serialize_u64(*v),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// Rows under a fixed header, plus `key = value` notes.
///
/// CSV puts notes after the rows as `# key=value` lines; JSON nests them
/// under `"notes"`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            ..Self::default()
        }
    }

    pub fn note(&mut self, key: impl Into<String>, value: Cell) {
        self.notes.push((key.into(), value));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("write to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).expect("write to memory");
        }
        let mut out = String::from_utf8(w.into_inner().expect("flush to memory")).expect("ascii output");
        for (k, v) in &self.notes {
            out.push_str(&format!("# {k}={}\n", v.csv()));
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| {
                self.header
                    .iter()
                    .zip(r)
                    .map(|(h, c)| (h.to_string(), serde_json::to_value(c).expect("cell serializes")))
                    .collect()
            })
            .collect();
        let notes: serde_json::Map<String, serde_json::Value> = self
            .notes
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::to_value(v).expect("cell serializes")))
            .collect();
        let mut doc = serde_json::json!({ "rows": rows });
        if !notes.is_empty() {
            doc["notes"] = serde_json::Value::Object(notes);
        }
        let mut s = serde_json::to_string_pretty(&doc).expect("json");
        s.push('\n');
        s
    }
}
