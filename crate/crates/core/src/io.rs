//! JSON and CSV formats.
//!
//! Readers go through `serde_json::Value` so that schema errors can name the
//! offending field (`edges[3]`, `values[1][0]`, ...). Writers produce
//! serializable document structs; floats are written with 17 significant
//! digits and exact values as `"p/q"` strings.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::Value;

use crate::config::FLOAT_REL_TOL;
use crate::error::{Error, Result};
use crate::graphs::{Graph, RootedGraph, WeightedGraph};
use crate::kernels::{ExactKernel, StepKernel};
use crate::numeric::{format_g17, format_rational, json_number_to_rational, parse_rational, Rational};
use crate::profile::{region_contains, ProfilePoint, RegionQuery};
use crate::quantum::{QuantumGraph, TermKey};
use crate::reduction::{Coefficient, ExponentReport, IntPolynomial, Polynomial};

/// Parses JSON text; syntax errors carry line and column.
pub fn parse_json(text: &str, context: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::schema(context, format!("invalid JSON at line {} column {}: {e}", e.line(), e.column())))
}

fn field<'a>(v: &'a Value, name: &str, ctx: &str) -> Result<&'a Value> {
    v.as_object()
        .ok_or_else(|| Error::schema(ctx, "expected a JSON object"))?
        .get(name)
        .ok_or_else(|| Error::schema(ctx, format!("missing field {name:?}")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(path, "expected an array"))
}

fn index(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| Error::schema(path, format!("expected a nonnegative integer, found {v}")))
}

/// A rational given as a JSON number or a `"p/q"` / decimal string.
fn rational_value(v: &Value, path: &str) -> Result<Rational> {
    let parsed = match v {
        Value::Number(n) => json_number_to_rational(n),
        Value::String(s) => parse_rational(s),
        _ => return Err(Error::schema(path, format!("expected a number or rational string, found {v}"))),
    };
    parsed.map_err(|e| Error::schema(path, e.to_string()))
}

fn integer_value(v: &Value, path: &str) -> Result<BigInt> {
    let r = rational_value(v, path)?;
    if !r.is_integer() {
        return Err(Error::schema(path, format!("expected an integer, found {}", format_rational(&r))));
    }
    Ok(r.to_integer())
}

/// Re-labels validation errors with the document context.
fn in_context<T>(r: Result<T>, ctx: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Invalid { field, message } => Error::schema(format!("{ctx}.{field}"), message),
        other => other,
    })
}

fn graph_from_value(v: &Value, ctx: &str) -> Result<Graph> {
    let n = index(field(v, "n", ctx)?, &format!("{ctx}.n"))?;
    let edges = array(field(v, "edges", ctx)?, &format!("{ctx}.edges"))?;
    let mut pairs = Vec::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        let path = format!("{ctx}.edges[{i}]");
        match array(e, &path)?.as_slice() {
            [a, b] => pairs.push((index(a, &path)?, index(b, &path)?)),
            _ => return Err(Error::schema(path, "an edge is a pair [u, v]")),
        }
    }
    for (i, &(u, w)) in pairs.iter().enumerate() {
        if u == w {
            return Err(Error::schema(format!("{ctx}.edges[{i}]"), format!("loop at vertex {u}")));
        }
        if u >= n || w >= n {
            return Err(Error::schema(format!("{ctx}.edges[{i}]"), format!("endpoint out of range for n = {n}")));
        }
    }
    in_context(Graph::new(n, pairs), ctx)
}

pub fn read_graph(text: &str) -> Result<Graph> {
    graph_from_value(&parse_json(text, "graph")?, "graph")
}

pub fn read_rooted(text: &str) -> Result<RootedGraph> {
    let v = parse_json(text, "rooted graph")?;
    let g = graph_from_value(&v, "rooted graph")?;
    let roots = array(field(&v, "roots", "rooted graph")?, "rooted graph.roots")?
        .iter()
        .enumerate()
        .map(|(i, r)| index(r, &format!("rooted graph.roots[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    in_context(RootedGraph::new(g, roots), "rooted graph")
}

pub fn read_weighted(text: &str) -> Result<WeightedGraph> {
    let ctx = "weighted graph";
    let v = parse_json(text, ctx)?;
    let n = index(field(&v, "n", ctx)?, "weighted graph.n")?;
    let mut weights = Vec::new();
    for (i, e) in array(field(&v, "weights", ctx)?, "weighted graph.weights")?.iter().enumerate() {
        let path = format!("{ctx}.weights[{i}]");
        match array(e, &path)?.as_slice() {
            [a, b, w] => weights.push((index(a, &path)?, index(b, &path)?, rational_value(w, &path)?)),
            _ => return Err(Error::schema(path, "a weight is a triple [u, v, w]")),
        }
    }
    in_context(WeightedGraph::new(n, weights), ctx)
}

fn kernel_from_value(v: &Value, ctx: &str) -> Result<ExactKernel> {
    let measures = array(field(v, "measures", ctx)?, &format!("{ctx}.measures"))?
        .iter()
        .enumerate()
        .map(|(i, m)| rational_value(m, &format!("{ctx}.measures[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (i, row) in array(field(v, "values", ctx)?, &format!("{ctx}.values"))?.iter().enumerate() {
        let path = format!("{ctx}.values[{i}]");
        rows.push(
            array(row, &path)?
                .iter()
                .enumerate()
                .map(|(j, x)| rational_value(x, &format!("{path}[{j}]")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    in_context(StepKernel::new(measures, rows), ctx)
}

pub fn read_kernel(text: &str) -> Result<ExactKernel> {
    kernel_from_value(&parse_json(text, "kernel")?, "kernel")
}

/// One kernel object or an array of them.
pub fn read_kernels(text: &str) -> Result<Vec<ExactKernel>> {
    let v = parse_json(text, "kernel")?;
    match &v {
        Value::Array(items) => {
            items.iter().enumerate().map(|(i, k)| kernel_from_value(k, &format!("kernels[{i}]"))).collect()
        }
        _ => Ok(vec![kernel_from_value(&v, "kernel")?]),
    }
}

pub fn read_polynomial(text: &str) -> Result<IntPolynomial> {
    let ctx = "polynomial";
    let v = parse_json(text, ctx)?;
    let vars = array(field(&v, "vars", ctx)?, "polynomial.vars")?
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::schema(format!("polynomial.vars[{i}]"), "expected a string"))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut terms = Vec::new();
    for (i, t) in array(field(&v, "terms", ctx)?, "polynomial.terms")?.iter().enumerate() {
        let path = format!("polynomial.terms[{i}]");
        let coeff = integer_value(field(t, "coeff", &path)?, &format!("{path}.coeff"))?;
        let exps = array(field(t, "exps", &path)?, &format!("{path}.exps"))?
            .iter()
            .map(|e| {
                e.as_u64()
                    .and_then(|u| u32::try_from(u).ok())
                    .ok_or_else(|| Error::schema(format!("{path}.exps"), format!("bad exponent {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push((exps, coeff));
    }
    in_context(Polynomial::new(vars, terms), ctx)
}

pub fn read_quantum_graph(text: &str) -> Result<QuantumGraph> {
    let ctx = "quantum graph";
    let v = parse_json(text, ctx)?;
    let mut qg = QuantumGraph::zero();
    for (i, t) in array(field(&v, "terms", ctx)?, "quantum graph.terms")?.iter().enumerate() {
        let path = format!("quantum graph.terms[{i}]");
        let coeff = rational_value(field(t, "coeff", &path)?, &format!("{path}.coeff"))?;
        let g = graph_from_value(field(t, "graph", &path)?, &format!("{path}.graph"))?;
        qg.add_term(TermKey::of_graph(&g)?, coeff);
    }
    Ok(qg)
}

/// An `f64` written with 17 significant digits; non-finite values become
/// `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Float(pub f64);

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format_g17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// An exact number: a JSON integer when it fits in 64 bits, otherwise a
/// `"p/q"` string.
#[derive(Debug, Clone, PartialEq)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match (self.0.is_integer(), i64::try_from(self.0.numer())) {
            (true, Ok(i)) => s.serialize_i64(i),
            _ => s.serialize_str(&format_rational(&self.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GraphDoc {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphDoc {
    fn from(g: &Graph) -> Self {
        GraphDoc { n: g.vertex_count(), edges: g.edges().iter().map(|&(u, v)| [u, v]).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RootedDoc {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub roots: Vec<usize>,
}

impl From<&RootedGraph> for RootedDoc {
    fn from(h: &RootedGraph) -> Self {
        let g = GraphDoc::from(h.graph());
        RootedDoc { n: g.n, edges: g.edges, roots: h.roots().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WeightedDoc {
    pub n: usize,
    pub weights: Vec<(usize, usize, String)>,
}

impl From<&WeightedGraph> for WeightedDoc {
    fn from(g: &WeightedGraph) -> Self {
        WeightedDoc {
            n: g.vertex_count(),
            weights: g.weights().map(|(&(u, v), w)| (u, v, format_rational(w))).collect(),
        }
    }
}

/// Kernel JSON with every entry as an exact `"p/q"` string.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KernelDoc {
    pub measures: Vec<String>,
    pub values: Vec<Vec<String>>,
}

impl From<&ExactKernel> for KernelDoc {
    fn from(w: &ExactKernel) -> Self {
        KernelDoc {
            measures: w.measures().iter().map(format_rational).collect(),
            values: w.rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct QuantumTermDoc {
    pub coeff: String,
    pub graph: GraphDoc,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct QuantumGraphDoc {
    pub terms: Vec<QuantumTermDoc>,
}

impl From<&QuantumGraph> for QuantumGraphDoc {
    fn from(qg: &QuantumGraph) -> Self {
        QuantumGraphDoc {
            terms: qg
                .terms()
                .map(|(key, c)| QuantumTermDoc {
                    coeff: format_rational(c),
                    graph: GraphDoc::from(&key.to_graph()),
                    provenance: key.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PolyTermDoc {
    pub coeff: Exact,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PolynomialDoc {
    pub vars: Vec<String>,
    pub terms: Vec<PolyTermDoc>,
}

impl<C: Coefficient> From<&Polynomial<C>> for PolynomialDoc {
    fn from(p: &Polynomial<C>) -> Self {
        PolynomialDoc {
            vars: p.vars().to_vec(),
            terms: p.terms().map(|(e, c)| PolyTermDoc { coeff: Exact(c.to_rational()), exps: e.clone() }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExponentReportDoc {
    /// The fixed exponent 3 · deg(p).
    pub fixed_exponent: u32,
    /// Minimal clearing exponent per q, keyed by q as a string.
    pub computed: std::collections::BTreeMap<String, u32>,
    pub fixed_suffices: bool,
}

impl From<&ExponentReport> for ExponentReportDoc {
    fn from(r: &ExponentReport) -> Self {
        ExponentReportDoc {
            fixed_exponent: r.fixed_exponent,
            computed: r.computed.iter().map(|(q, e)| (q.to_string(), *e)).collect(),
            fixed_suffices: r.fixed_suffices(),
        }
    }
}

/// Pretty JSON followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

/// A profile row; `point` is `None` when the denominator vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub q: usize,
    pub point: Option<ProfilePoint>,
}

/// `q,x,y,in_region` with a header; vanishing rows leave x and y empty and
/// report 0. Membership uses the default float tolerance.
pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from("q,x,y,in_region\n");
    for row in rows {
        match row.point {
            Some(p) => {
                let inside = region_contains(&RegionQuery { x: p.x, y: p.y, tolerance: FLOAT_REL_TOL });
                writeln!(out, "{},{},{},{}", row.q, format_g17(p.x), format_g17(p.y), inside as u8).unwrap();
            }
            None => writeln!(out, "{},,,0", row.q).unwrap(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::cycle;
    use crate::numeric::rational;

    #[test]
    fn graph_round_trip() {
        let g = cycle(5).unwrap();
        assert_eq!(read_graph(&to_json(&GraphDoc::from(&g))).unwrap(), g);
    }

    #[test]
    fn graph_errors_name_fields() {
        let e = read_graph(r#"{"n": 3, "edges": [[0,1],[2,2]]}"#).unwrap_err();
        assert!(e.to_string().contains("edges[1]"), "{e}");
        let e = read_graph(r#"{"n": 3, "edges": [[0,1],}"#).unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
    }

    #[test]
    fn kernel_round_trip_and_errors() {
        let text = r#"{"measures": ["1/3", "2/3"], "values": [[0.5, "1/7"], ["1/7", -2]]}"#;
        let w = read_kernel(text).unwrap();
        assert_eq!(w.value(0, 0), &rational(1, 2));
        assert_eq!(read_kernel(&to_json(&KernelDoc::from(&w))).unwrap(), w);
        let e = read_kernel(r#"{"measures": ["1/3", "1/3"], "values": [[0,0],[0,0]]}"#).unwrap_err();
        assert!(e.to_string().contains("measures"), "{e}");
        let e = read_kernel(r#"{"measures": [0.5, 0.5], "values": [[0,1],[0,0]]}"#).unwrap_err();
        assert!(e.to_string().contains("values"), "{e}");
    }

    #[test]
    fn polynomial_round_trip() {
        let p = read_polynomial(
            r#"{"vars": ["x2","x3"], "terms": [{"coeff": -1, "exps": [2,0]}, {"coeff": "3", "exps": [0,1]}]}"#,
        )
        .unwrap();
        assert_eq!(p.to_string(), "-x2^2 + 3*x3");
        assert_eq!(read_polynomial(&to_json(&PolynomialDoc::from(&p))).unwrap(), p);
    }

    #[test]
    fn quantum_round_trip() {
        let mut qg = QuantumGraph::from_graph(&cycle(4).unwrap(), rational(-3, 2)).unwrap();
        qg.add_term(TermKey::of_graph(&crate::graphs::path(3)).unwrap(), rational(1, 1));
        assert_eq!(read_quantum_graph(&to_json(&QuantumGraphDoc::from(&qg))).unwrap(), qg);
    }

    #[test]
    fn floats_and_csv() {
        assert_eq!(to_json(&[Float(0.1), Float(f64::NAN)]).replace([' ', '\n'], ""), "[0.10000000000000001,null]");
        let csv = profile_csv(&[
            ProfileRow { q: 2, point: Some(ProfilePoint { q: 2, x: 0.5, y: 0.25 }) },
            ProfileRow { q: 3, point: None },
        ]);
        assert_eq!(csv, "q,x,y,in_region\n2,0.5,0.25,1\n3,,,0\n");
    }
}
