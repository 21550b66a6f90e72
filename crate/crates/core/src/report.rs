//! Rendering of results as markdown, CSV or JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};

use crate::constants::ConstantReport;
use crate::error::{invalid, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Md,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "md" | "markdown" => Ok(Self::Md),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(invalid(format!("unknown format {other:?}, expected md, csv or json"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Num(x) if x.is_nan() => s.serialize_str("nan"),
            Cell::Num(x) => s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" }),
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Missing => s.serialize_none(),
        }
    }
}

/// `x` with `digits` significant digits; scientific notation outside
/// `[1e-4, 1e6)`.
pub fn fmt_num(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    let exp = rounded.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{rounded:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

impl Cell {
    fn text(&self, digits: usize) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x, digits),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }
}

/// A table of named columns, with optional notes and per-column sources.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
    pub provenance: Vec<(String, String)>,
}

struct Row<'a>(&'a [String], &'a [Cell]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Rows<'a>(&'a Table);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
        for r in &self.0.rows {
            seq.serialize_element(&Row(&self.0.columns, r))?;
        }
        seq.end()
    }
}

struct Pairs<'a>(&'a [(String, String)]);

impl Serialize for Pairs<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Wrapped<'a>(&'a Table, bool);

impl Serialize for Wrapped<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("rows", &Rows(self.0))?;
        if !self.0.notes.is_empty() {
            map.serialize_entry("notes", &self.0.notes)?;
        }
        if self.1 {
            map.serialize_entry("provenance", &Pairs(&self.0.provenance))?;
        }
        map.end()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), ..Self::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Renders the table. JSON is an array of row objects, or an object
    /// `{"rows", "notes", "provenance"}` when there is anything besides rows.
    pub fn render(&self, format: Format, digits: usize, provenance: bool) -> String {
        let provenance = provenance && !self.provenance.is_empty();
        let mut out = String::new();
        match format {
            Format::Json => {
                let v = if self.notes.is_empty() && !provenance {
                    serde_json::to_string_pretty(&Rows(self))
                } else {
                    serde_json::to_string_pretty(&Wrapped(self, provenance))
                };
                out.push_str(&v.expect("table serializes"));
                out.push('\n');
            }
            Format::Csv => {
                let line = |cells: Vec<String>| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
                out.push_str(&line(self.columns.clone()));
                out.push('\n');
                for r in &self.rows {
                    out.push_str(&line(r.iter().map(|c| c.text(digits)).collect()));
                    out.push('\n');
                }
                for n in &self.notes {
                    let _ = writeln!(out, "# note: {n}");
                }
                if provenance {
                    for (k, v) in &self.provenance {
                        let _ = writeln!(out, "# {k}: {v}");
                    }
                }
            }
            Format::Md => {
                let _ = writeln!(out, "| {} |", self.columns.join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(self.columns.len()));
                for r in &self.rows {
                    let cells: Vec<String> = r.iter().map(|c| c.text(digits)).collect();
                    let _ = writeln!(out, "| {} |", cells.join(" | "));
                }
                if !self.notes.is_empty() {
                    out.push('\n');
                    for n in &self.notes {
                        let _ = writeln!(out, "Note: {n}");
                    }
                }
                if provenance {
                    out.push_str("\n| column | source |\n|---|---|\n");
                    for (k, v) in &self.provenance {
                        let _ = writeln!(out, "| {k} | {v} |");
                    }
                }
            }
        }
        out
    }
}

/// A one-row table.
pub fn record(pairs: Vec<(&str, Cell)>) -> Table {
    let (cols, cells): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let mut t = Table::new(cols);
    t.push(cells);
    t
}

const REPORT_CORE: [&str; 10] = [
    "d",
    "alpha_order",
    "gamma",
    "m_upper",
    "c_gamma",
    "c_lower",
    "c_simple",
    "c_op",
    "semiclassical_factor",
    "coefficient",
];

const REPORT_REFERENCES: [&str; 3] = ["reference_lieb", "reference_flseiringer", "reference_daubechies"];

fn report_provenance() -> Vec<(String, String)> {
    [
        ("d", "spatial dimension"),
        ("alpha_order", "kinetic order α in |P|^{2α}"),
        ("gamma", "d/α"),
        ("m_upper", "optimized Gamma trial pair, capped by 8/(γ(γ-2)(γ+2))"),
        ("c_gamma", "γ^{γ+1}/(4(γ-2)^{γ-2})·m_upper"),
        ("c_lower", "γ^γ/(2(γ-1)(γ-2)^{γ-1})"),
        ("c_simple", "2γ^γ/((γ-2)^{γ-1}(γ+2))"),
        ("c_op", "min of C_n over 3 ≤ n ≤ min(d, n_cap) and n = d (α = 1), else c_gamma"),
        ("semiclassical_factor", "|B₁^d|/(2π)^d"),
        ("coefficient", "c_op·semiclassical_factor"),
        ("reference_lieb", "published constants from Lieb's method"),
        ("reference_flseiringer", "published operator-valued constant 10.332"),
        ("reference_daubechies", "published relativistic constant 6.08 (d = 3, α = 1/2)"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect()
}

/// Report rows. CSV carries the ten computed columns; markdown and JSON add
/// the reference columns.
pub fn report_table(reports: &[ConstantReport], format: Format) -> Table {
    let with_refs = format != Format::Csv;
    let mut cols: Vec<&str> = REPORT_CORE.to_vec();
    if with_refs {
        cols.extend(REPORT_REFERENCES);
    }
    let mut t = Table::new(cols.iter().copied());
    for r in reports {
        let mut row: Vec<Cell> = vec![
            r.d.into(),
            r.alpha_order.into(),
            r.gamma.into(),
            r.m_upper.into(),
            r.c_gamma.into(),
            r.c_lower.into(),
            r.c_simple.into(),
            r.c_op.into(),
            r.semiclassical_factor.into(),
            r.coefficient.into(),
        ];
        if with_refs {
            row.extend([r.reference_lieb.into(), r.reference_flseiringer.into(), r.reference_daubechies.into()]);
        }
        t.push(row);
    }
    t.provenance = report_provenance().into_iter().filter(|(k, _)| cols.contains(&k.as_str())).collect();
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(7.551512, 6), "7.55151");
        assert_eq!(fmt_num(6.75, 6), "6.75000");
        assert_eq!(fmt_num(10.8, 6), "10.8000");
        assert_eq!(fmt_num(0.0, 3), "0.00");
        assert_eq!(fmt_num(1.23456789e-7, 3), "1.23e-7");
        assert_eq!(fmt_num(9.999996, 6), "10.0000");
        assert_eq!(fmt_num(f64::INFINITY, 6), "inf");
        assert_eq!(fmt_num(-0.012345678, 4), "-0.01235");
    }

    #[test]
    fn formats() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![1.5.into(), "x,y".into()]);
        t.push(vec![Cell::Missing, true.into()]);
        assert_eq!(t.render(Format::Csv, 3, false), "a,b\n1.50,\"x,y\"\n,true\n");
        assert_eq!(t.render(Format::Md, 3, false), "| a | b |\n|---|---|\n| 1.50 | x,y |\n|  | true |\n");
        let j: serde_json::Value = serde_json::from_str(&t.render(Format::Json, 3, false)).unwrap();
        assert_eq!(j[0]["a"], 1.5);
        assert!(j[1]["a"].is_null());
        t.notes.push("n".into());
        let j: serde_json::Value = serde_json::from_str(&t.render(Format::Json, 3, false)).unwrap();
        assert_eq!(j["notes"][0], "n");
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
