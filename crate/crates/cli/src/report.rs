use serde_json::{json, Map, Value};

use crate::config::Format;

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    /// Machine double, written in shortest round-trip form.
    Float(f64),
    /// Decimal or rational text that must not pass through a double.
    Exact(String),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Exact(s) | Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(format_float(*x)),
            Cell::Exact(s) | Cell::Text(s) => json!(s),
        }
    }

    /// Inverse of the JSON encoding, given the kind of cell expected.
    pub fn from_json(v: &Value, like: &Cell) -> Option<Cell> {
        match like {
            Cell::Int(_) => v.as_i64().map(Cell::Int),
            Cell::Float(_) => v.as_f64().map(Cell::Float),
            Cell::Exact(_) => v.as_str().map(|s| Cell::Exact(s.to_owned())),
            Cell::Text(_) => v.as_str().map(|s| Cell::Text(s.to_owned())),
        }
    }
}

fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// Rewrites `d.ddde±x` as a positional decimal when the exponent is
/// moderate; other strings pass through.
pub fn plain_decimal(sci: &str) -> String {
    let Some((mant, exp)) = sci.split_once(['e', 'E']) else {
        return sci.to_owned();
    };
    let Ok(exp) = exp.parse::<i32>() else {
        return sci.to_owned();
    };
    if !(-6..=20).contains(&exp) {
        return sci.to_owned();
    }
    let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = mant.find('.').unwrap_or(mant.len()) as i32 + exp;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

/// Output of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    /// Header fields, in emission order.
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_owned(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: Cell) -> &mut Self {
        self.meta.push((key.to_owned(), value));
        self
    }

    pub fn meta_value(&self, key: &str) -> Option<&Cell> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report is valid JSON");
                s.push('\n');
                s
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# c3rotor {}\n", self.command);
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {}\n", v.csv()));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut meta = Map::new();
        for (k, v) in &self.meta {
            meta.insert(k.clone(), v.json());
        }
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        json!({
            "command": self.command,
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
        })
    }
}
