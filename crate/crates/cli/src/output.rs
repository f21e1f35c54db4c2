//! Tables and their CSV / JSON rendering.

use std::io::Write;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Plain number, always 15 significant digits.
    Num(f64),
    /// Eigenvalue-like number, rounded to 4 decimals under `--paper-format`.
    Eig(f64),
    /// Conductivity value, printed as `1/N` under `--paper-format` when below one.
    Eta(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt_eig(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Eig)
    }

    pub fn opt_num(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn render(&self, paper: bool) -> String {
        match self {
            Cell::Num(x) => sig15(*x),
            Cell::Eig(x) if paper => format!("{x:.4}"),
            Cell::Eig(x) => sig15(*x),
            Cell::Eta(x) if paper => eta_label(*x),
            Cell::Eta(x) => sig15(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self, paper: bool) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
            Cell::Num(x) | Cell::Eig(x) | Cell::Eta(x) if !x.is_finite() => json!(self.render(paper)),
            _ => {
                let s = self.render(paper);
                match s.parse::<f64>() {
                    Ok(v) => json!(v),
                    Err(_) => json!(s),
                }
            }
        }
    }
}

/// `%.15g`-style formatting.
pub fn sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.14e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn eta_label(eta: f64) -> String {
    if eta < 1.0 {
        let inv = 1.0 / eta;
        if (inv - inv.round()).abs() <= 1e-9 * inv {
            return format!("1/{}", inv.round() as i64);
        }
    }
    if eta == eta.round() && eta.abs() < 1e15 {
        return format!("{}", eta as i64);
    }
    sig15(eta)
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub struct Format {
    pub json: bool,
    pub paper: bool,
}

pub fn render(command: &str, echo: &[(String, String)], table: &Table, fmt: &Format) -> std::io::Result<Vec<u8>> {
    if fmt.json {
        let mut cfg = Map::new();
        for (k, v) in echo {
            cfg.insert(k.clone(), json!(v));
        }
        let rows: Vec<Value> = table
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, cell) in table.columns.iter().zip(r) {
                    m.insert(c.clone(), cell.to_json(fmt.paper));
                }
                Value::Object(m)
            })
            .collect();
        let doc = json!({ "command": command, "config_echo": cfg, "rows": rows });
        let mut out = serde_json::to_vec_pretty(&doc)?;
        out.push(b'\n');
        return Ok(out);
    }
    let mut out = Vec::new();
    writeln!(out, "# command={command}")?;
    for (k, v) in echo {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for r in &table.rows {
        w.write_record(r.iter().map(|c| c.render(fmt.paper)))?;
    }
    w.into_inner().map_err(|e| e.into_error())
}
