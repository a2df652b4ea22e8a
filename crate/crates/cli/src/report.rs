//! Deterministic report emission: JSON with fixed key order and 17
//! significant digits, CSV with 12. Identical inputs produce identical
//! bytes, so no clocks or environment data ever enter a report.

use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Value>),
    Obj(Vec<(String, Value)>),
}

impl Value {
    pub fn obj() -> Value {
        Value::Obj(Vec::new())
    }

    pub fn push(&mut self, key: &str, v: Value) {
        if let Value::Obj(pairs) = self {
            pairs.push((key.to_string(), v));
        } else {
            panic!("push on non-object value");
        }
    }

    pub fn nums(xs: &[f64]) -> Value {
        Value::Arr(xs.iter().map(|x| Value::Num(*x)).collect())
    }

    pub fn complex(re: f64, im: f64) -> Value {
        Value::Arr(vec![Value::Num(re), Value::Num(im)])
    }
}

/// 17 significant digits, locale-free.
pub fn fmt_f64_json(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    if !x.is_finite() {
        // JSON has no inf/nan literals; encode as strings would change the
        // type, so clamp to the largest finite with a sign
        return if x.is_nan() {
            "\"nan\"".to_string()
        } else if x > 0.0 {
            "1e308".to_string()
        } else {
            "-1e308".to_string()
        };
    }
    format!("{:.16e}", x)
}

fn fmt_f64_csv(x: f64) -> String {
    if x == 0.0 {
        "0.0".to_string()
    } else {
        format!("{:.11e}", x)
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

pub fn to_json(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Num(x) => out.push_str(&fmt_f64_json(*x)),
        Value::Str(s) => {
            let _ = write!(out, "\"{}\"", escape(s));
        }
        Value::Arr(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&pad);
                out.push_str("  ");
                to_json(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&pad);
            out.push(']');
        }
        Value::Obj(pairs) => {
            if pairs.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, item)) in pairs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&pad);
                let _ = write!(out, "  \"{}\": ", escape(k));
                to_json(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&pad);
            out.push('}');
        }
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = String::new();
    to_json(v, 0, &mut s);
    s.push('\n');
    s
}

/// One asserted inequality with both sides recorded.
#[derive(Debug, Clone)]
pub struct Assertion {
    pub id: String,
    pub lhs: f64,
    pub op: &'static str,
    pub rhs: f64,
    pub pass: bool,
}

impl Assertion {
    pub fn le(id: &str, lhs: f64, rhs: f64) -> Assertion {
        Assertion {
            id: id.to_string(),
            lhs,
            op: "<=",
            rhs,
            pass: lhs <= rhs,
        }
    }

    pub fn lt(id: &str, lhs: f64, rhs: f64) -> Assertion {
        Assertion {
            id: id.to_string(),
            lhs,
            op: "<",
            rhs,
            pass: lhs < rhs,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut o = Value::obj();
        o.push("id", Value::Str(self.id.clone()));
        o.push("lhs", Value::Num(self.lhs));
        o.push("op", Value::Str(self.op.to_string()));
        o.push("rhs", Value::Num(self.rhs));
        o.push("pass", Value::Bool(self.pass));
        o
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub experiment: String,
    pub meta: Vec<(String, Value)>,
    pub records: Value,
    pub assertions: Vec<Assertion>,
}

impl Report {
    pub fn new(experiment: &str) -> Report {
        Report {
            experiment: experiment.to_string(),
            meta: Vec::new(),
            records: Value::Arr(Vec::new()),
            assertions: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, v: Value) {
        self.meta.push((key.to_string(), v));
    }

    pub fn assert_le(&mut self, id: &str, lhs: f64, rhs: f64) {
        self.assertions.push(Assertion::le(id, lhs, rhs));
    }

    pub fn assert_lt(&mut self, id: &str, lhs: f64, rhs: f64) {
        self.assertions.push(Assertion::lt(id, lhs, rhs));
    }

    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn render(&self) -> String {
        let mut root = Value::obj();
        root.push("experiment", Value::Str(self.experiment.clone()));
        root.push(
            "version",
            Value::Str(format!("cfslab {}", env!("CARGO_PKG_VERSION"))),
        );
        for (k, v) in &self.meta {
            root.push(k, v.clone());
        }
        root.push("records", self.records.clone());
        root.push(
            "assertions",
            Value::Arr(self.assertions.iter().map(|a| a.to_value()).collect()),
        );
        render_json(&root)
    }
}

/// CSV table with 12-significant-digit floats.
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn row(&mut self, cells: Vec<CsvCell>) {
        assert_eq!(cells.len(), self.header.len());
        self.rows.push(
            cells
                .into_iter()
                .map(|c| match c {
                    CsvCell::Num(x) => fmt_f64_csv(x),
                    CsvCell::Str(s) => s,
                })
                .collect(),
        );
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

pub enum CsvCell {
    Num(f64),
    Str(String),
}
