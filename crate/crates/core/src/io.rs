//! Plain-text artifact writers. Every number is printed with 17 significant digits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::spectral::GridField;
use crate::symbol::SymbolTable;

/// 17 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(text.as_bytes())?;
    f.flush()?;
    Ok(())
}

/// `rho,m,closed_form`; the last column is empty without a closed form.
pub fn symbol_csv(tab: &SymbolTable) -> String {
    let mut s = String::from("rho,m,closed_form\n");
    for (r, m) in tab.radial_grid.iter().zip(&tab.values) {
        let cf = tab.closed_form.map(|c| num(c.eval(*r))).unwrap_or_default();
        let _ = writeln!(s, "{},{},{}", num(*r), num(*m), cf);
    }
    s
}

/// `x,u` or `x,y,u`, rows in lexicographic node order.
pub fn field_csv(f: &GridField) -> String {
    let g = f.grid;
    let mut s = String::with_capacity(f.values.len() * 48);
    s.push_str(if g.dimension() == 1 { "x,u\n" } else { "x,y,u\n" });
    for (i, v) in f.values.iter().enumerate() {
        let [x, y] = g.node(i);
        if g.dimension() == 1 {
            let _ = writeln!(s, "{},{}", num(x), num(*v));
        } else {
            let _ = writeln!(s, "{},{},{}", num(x), num(y), num(*v));
        }
    }
    s
}

/// A header line of column names followed by numeric rows.
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|&x| num(x)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// A value in a key-value report.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Num(x) => write!(f, "{}", num(*x)),
            Value::Int(i) => write!(f, "{i}"),
            Value::Text(t) => write!(f, "{t}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}
impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}
impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}
impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}
impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

/// Ordered `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, v: impl Into<Value>) -> &mut Self {
        self.entries.push((key.into(), v.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PeriodicGrid;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        let x = 1.0 / 3.0;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn field_rows_follow_node_order() {
        let g = PeriodicGrid::new(2, 1.0, 2).unwrap();
        let f = GridField::new(g, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let text = field_csv(&f);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,u");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].ends_with(&num(2.0)));
    }

    #[test]
    fn report_renders_in_order() {
        let mut r = Report::new();
        r.set("b", 1usize).set("a", "x");
        assert_eq!(r.render(), "b = 1\na = x\n");
    }
}
