//! File formats: the JSON complex format, JSON reports with fixed float
//! formatting and plain CSV tables.

use std::collections::HashMap;
use std::io;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::complex::{DoubleComplex, QuadGraph, VertexKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: u64,
    pub graph: VertexKind,
}

/// ρ of the diagonal `edge`; `quad` pins the entry to one quad when several
/// quads share a diagonal's endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoEntry {
    pub edge: [u64; 2],
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<usize>,
}

/// The JSON complex format. Quads list vertex ids counterclockwise. With
/// `sides`, quads are glued along equal side labels; without, along equal
/// vertex pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub vertices: Vec<VertexEntry>,
    pub quads: Vec<[u64; 4]>,
    pub rho: Vec<RhoEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<[usize; 4]>>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl ComplexFile {
    pub fn from_complex(dc: &DoubleComplex) -> Self {
        let raw = dc.raw();
        ComplexFile {
            vertices: raw
                .kinds
                .iter()
                .enumerate()
                .map(|(v, &graph)| VertexEntry { id: v as u64, graph })
                .collect(),
            quads: raw.quads.iter().map(|q| q.map(|v| v as u64)).collect(),
            rho: raw
                .quads
                .iter()
                .zip(&raw.rho)
                .enumerate()
                .map(|(q, (quad, &value))| RhoEntry {
                    edge: [quad[0] as u64, quad[2] as u64],
                    value,
                    quad: Some(q),
                })
                .collect(),
            sides: Some(raw.sides.clone()),
        }
    }

    /// Validates and builds the complex.
    pub fn build(&self) -> Result<DoubleComplex> {
        let mut index = HashMap::new();
        for (v, entry) in self.vertices.iter().enumerate() {
            if index.insert(entry.id, v).is_some() {
                return Err(Error::Invalid(format!("duplicate vertex id {}", entry.id)));
            }
        }
        let lookup = |id: u64| index.get(&id).copied().ok_or_else(|| Error::Invalid(format!("unknown vertex id {id}")));
        let kinds: Vec<VertexKind> = self.vertices.iter().map(|e| e.graph).collect();
        if let Some(s) = &self.sides {
            if s.len() != self.quads.len() {
                return Err(Error::Invalid(format!("{} side lists for {} quads", s.len(), self.quads.len())));
            }
        }
        let mut quads = Vec::with_capacity(self.quads.len());
        let mut sides = Vec::with_capacity(self.quads.len());
        for (q, ids) in self.quads.iter().enumerate() {
            let mut quad = [0; 4];
            for (slot, &id) in quad.iter_mut().zip(ids) {
                *slot = lookup(id)?;
            }
            let mut side = self.sides.as_ref().map_or([0; 4], |s| s[q]);
            if kinds[quad[0]] == VertexKind::Dual {
                quad.rotate_left(1);
                side.rotate_left(1);
            }
            quads.push(quad);
            sides.push(side);
        }

        let mut by_edge: HashMap<(usize, usize), f64> = HashMap::new();
        let mut by_quad: HashMap<(usize, (usize, usize)), f64> = HashMap::new();
        for r in &self.rho {
            let k = key(lookup(r.edge[0])?, lookup(r.edge[1])?);
            let slot = match r.quad {
                Some(q) => {
                    let quad = quads.get(q).ok_or_else(|| Error::Invalid(format!("rho entry names unknown quad {q}")))?;
                    if k != key(quad[0], quad[2]) && k != key(quad[1], quad[3]) {
                        return Err(Error::Invalid(format!("rho entry {:?} is not a diagonal of quad {q}", r.edge)));
                    }
                    by_quad.entry((q, k)).or_insert(r.value)
                }
                None => by_edge.entry(k).or_insert(r.value),
            };
            if *slot != r.value {
                return Err(Error::Invalid(format!("conflicting rho entries for {:?}", r.edge)));
            }
        }
        let mut used = 0;
        let mut rho = Vec::with_capacity(quads.len());
        for (q, quad) in quads.iter().enumerate() {
            let mut find = |k| {
                let v = by_quad.get(&(q, k)).or_else(|| by_edge.get(&k)).copied();
                used += v.is_some() as usize;
                v
            };
            let primal = find(key(quad[0], quad[2]));
            let dual = find(key(quad[1], quad[3]));
            rho.push(match (primal, dual) {
                (Some(p), Some(d)) if (p * d - 1.0).abs() > 1e-12 => {
                    return Err(Error::BadDual { quad: q, product: p * d })
                }
                (Some(p), _) => p,
                (None, Some(d)) => d.recip(),
                (None, None) => return Err(Error::MissingRho(q)),
            });
        }
        if used == 0 && !self.rho.is_empty() {
            return Err(Error::Invalid("no rho entry matches a diagonal".into()));
        }
        let raw = match self.sides {
            Some(_) => {
                let edge_count = sides.iter().flatten().max().map_or(0, |m| m + 1);
                QuadGraph { kinds, quads, sides, rho, edge_count }
            }
            None => QuadGraph::from_vertex_quads(kinds, quads, rho),
        };
        DoubleComplex::from_raw(raw)
    }
}

/// Parses and validates a complex in the JSON format.
pub fn load_complex(json: &str) -> Result<DoubleComplex> {
    let file: ComplexFile = serde_json::from_str(json).map_err(|e| Error::Invalid(format!("malformed complex JSON: {e}")))?;
    file.build()
}

/// `x` as C's `%.12e`: twelve digits after the point, signed two-digit exponent.
pub fn format_e12(x: f64) -> String {
    let s = format!("{x:.12e}");
    match s.split_once('e') {
        Some((m, e)) => {
            let (sign, digits) = e.strip_prefix('-').map_or(("+", e), |d| ("-", d));
            format!("{m}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

/// Writes floats as `%.12e`, non-finite ones as null.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            w.write_all(format_e12(v).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with every float written as `%.12e`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serialising to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// A complex number in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cplx {
    fn from(z: Complex64) -> Self {
        Cplx { re: z.re, im: z.im }
    }
}

pub fn complex_rows(m: &DMatrix<Complex64>) -> Vec<Vec<Cplx>> {
    m.row_iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect()
}

pub fn real_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`, and `i` alone).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("cannot parse complex number {s:?}"));
    let imag = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    // The split is the last sign not following an exponent marker.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// A CSV table: comma separated, header row, LF endings, floats as `%.12e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Empty,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(x) => format_e12(*x),
                    Cell::Empty => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{square_torus, tri_sextant, TriHexParams};
    use crate::fixtures::genus_two;

    #[test]
    fn floats_match_c_formatting() {
        assert_eq!(format_e12(1.0), "1.000000000000e+00");
        assert_eq!(format_e12(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(format_e12(6.02e123), "6.020000000000e+123");
        assert_eq!(format_e12(0.0), "0.000000000000e+00");
    }

    #[test]
    fn complex_round_trip() {
        for dc in [
            square_torus(1, 1, 0.7).unwrap().complex,
            genus_two(2).unwrap(),
            tri_sextant(TriHexParams::equilateral(), 2).unwrap().complex,
        ] {
            let json = to_json(&ComplexFile::from_complex(&dc));
            let back = load_complex(&json).unwrap();
            assert_eq!(back.raw().quads, dc.raw().quads);
            assert_eq!(back.raw().sides, dc.raw().sides);
            for (a, b) in back.rhos().iter().zip(dc.rhos()) {
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn plain_format_with_dual_values() {
        // One rhombus listed from a dual corner, ρ given on the dual diagonal.
        let json = r#"{"vertices":[{"id":10,"graph":"G*"},{"id":11,"graph":"G"},{"id":12,"graph":"G*"},{"id":13,"graph":"G"}],
            "quads":[[10,11,12,13]],"rho":[{"edge":[12,10],"value":4.0}]}"#;
        let dc = load_complex(json).unwrap();
        assert_eq!(dc.quad(0), [1, 2, 3, 0]);
        assert_eq!(dc.rho(0), 0.25);
    }

    #[test]
    fn validation_errors() {
        let v = r#"[{"id":0,"graph":"G"},{"id":1,"graph":"G*"},{"id":2,"graph":"G"},{"id":3,"graph":"G*"}]"#;
        let with = |rho: &str| format!(r#"{{"vertices":{v},"quads":[[0,1,2,3]],"rho":{rho}}}"#);
        assert_eq!(load_complex(&with("[]")).unwrap_err(), Error::MissingRho(0));
        assert!(matches!(
            load_complex(&with(r#"[{"edge":[0,2],"value":2.0},{"edge":[1,3],"value":2.0}]"#)),
            Err(Error::BadDual { quad: 0, .. })
        ));
        assert!(load_complex(&with(r#"[{"edge":[0,2],"value":2.0},{"edge":[1,3],"value":0.5}]"#)).is_ok());
        assert!(matches!(load_complex(&with(r#"[{"edge":[0,2],"value":-1.0}]"#)), Err(Error::BadRho { .. })));
        assert!(matches!(load_complex("{\"vertices\": ["), Err(Error::Invalid(_))));
        assert!(matches!(load_complex(&with(r#"[{"edge":[0,9],"value":1.0}]"#)), Err(Error::Invalid(_))));
    }

    #[test]
    fn fixed_float_format() {
        let s = to_json(&serde_json::json!({"x": 1.5, "y": [0.1, f64::NAN], "n": 3}));
        assert!(s.contains("1.500000000000e+00"));
        assert!(s.contains("1.000000000000e-01"));
        assert!(s.contains("null"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["x"], 1.5);
    }

    #[test]
    fn complex_numbers_parse() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("1+0i").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("-0.5-2i").unwrap(), c(-0.5, -2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("3").unwrap(), c(3.0, 0.0));
        assert_eq!(parse_complex("1e-3+2e+1j").unwrap(), c(1e-3, 20.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.rows.push(vec![Cell::Int(1), Cell::Float(0.25), Cell::Empty]);
        assert_eq!(t.to_csv(), "a,b,c\n1,2.500000000000e-01,\n");
    }
}
