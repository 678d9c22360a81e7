//! Instance files, result records and random planar instance generators.
//!
//! Instance files use SteinLib-style sections:
//!
//! ```text
//! SECTION Comment
//! Name "grid-3x3"
//! END
//!
//! SECTION Graph
//! Nodes 3
//! Edges 2
//! E 1 2 5
//! E 2 3 1
//! END
//!
//! SECTION Demands
//! Demands 1
//! D 1 3
//! END
//!
//! EOF
//! ```
//!
//! Vertices are numbered from 1 in files and from 0 in memory. Edge ids are
//! assigned in file order starting at 0. A `Terminals` section (`T v` lines)
//! expands to demands from the first terminal to every other one.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{length, Demand, EdgeId, Graph, Length, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: vertex {index} out of range 1..={n}")]
    VertexOutOfRange { line: usize, col: usize, index: i64, n: usize },
    #[error("line {line}, column {col}: negative weight {weight}")]
    NegativeWeight { line: usize, col: usize, weight: i64 },
    #[error("line {line}: demand endpoints coincide")]
    DegenerateDemand { line: usize },
    #[error("line {line}: self-loop edge")]
    SelfLoop { line: usize },
    #[error("missing section {0}")]
    MissingSection(&'static str),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("grid must have at least one row and one column")]
    EmptyGrid,
    #[error("{k} disjoint demands do not fit in {n} vertices")]
    TooManyDemands { k: usize, n: usize },
    #[error("maximum edge length must be at least 1")]
    BadLength,
}

#[derive(Clone, Debug, Default)]
pub struct Instance {
    pub name: String,
    pub comment: String,
    pub graph: Graph,
    pub demands: Vec<Demand>,
}

impl Instance {
    /// Edge list as `(u, v, len)` in id order, for comparisons.
    pub fn edge_list(&self) -> Vec<(VertexId, VertexId, Length)> {
        self.graph.edges().map(|e| (e.u, e.v, e.len)).collect()
    }
}

struct Tokens<'a> {
    line: usize,
    items: Vec<(usize, &'a str)>,
}

fn tokenize(line_no: usize, text: &str) -> Tokens<'_> {
    let mut items = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                items.push((s + 1, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        items.push((s + 1, &text[s..]));
    }
    Tokens { line: line_no, items }
}

impl Tokens<'_> {
    fn syntax(&self, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col, msg: msg.into() }
    }

    fn int(&self, k: usize) -> Result<(usize, i64), ParseError> {
        let end_col = self.items.last().map(|(c, s)| c + s.len()).unwrap_or(1);
        let (col, tok) = self.items.get(k).copied().ok_or_else(|| self.syntax(end_col, "expected an integer"))?;
        tok.parse::<i64>()
            .map(|x| (col, x))
            .map_err(|_| self.syntax(col, format!("expected an integer, found `{tok}`")))
    }

    fn arity(&self, k: usize) -> Result<(), ParseError> {
        match self.items.get(k) {
            Some(&(col, tok)) => Err(self.syntax(col, format!("unexpected token `{tok}`"))),
            None => Ok(()),
        }
    }
}

fn unquote(s: &str) -> String {
    s.trim().trim_matches('"').to_string()
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut inst = Instance::default();
    let mut section: Option<String> = None;
    let mut nodes: Option<usize> = None;
    let mut saw_graph = false;
    let mut terminals: Vec<VertexId> = Vec::new();
    let mut pending_edges: Vec<(usize, Vec<(usize, i64)>)> = Vec::new();
    let mut pending_demands: Vec<(usize, Vec<(usize, i64)>)> = Vec::new();
    let mut pending_terms: Vec<(usize, usize, i64)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokenize(line_no, content);
        let Some(&(col, head)) = toks.items.first() else { continue };
        let key = head.to_ascii_lowercase();
        match (&section, key.as_str()) {
            (None, "section") => {
                let (_, name) = toks.items.get(1).copied().ok_or_else(|| toks.syntax(col, "missing section name"))?;
                // unknown sections (coordinates, presolve, ...) are skipped
                let name = name.to_ascii_lowercase();
                if name == "graph" {
                    saw_graph = true;
                }
                section = Some(name);
            }
            (None, "eof") => break,
            (None, _) if line_no == 1 && head.len() == 8 && head.chars().all(|c| c.is_ascii_hexdigit()) => {}
            (None, _) => return Err(toks.syntax(col, format!("expected SECTION, found `{head}`"))),
            (Some(_), "end") => section = None,
            (Some(s), _) => match (s.as_str(), key.as_str()) {
                ("comment", "name") => inst.name = unquote(&content[content.find(head).unwrap() + head.len()..]),
                ("comment", _) => {
                    if !inst.comment.is_empty() {
                        inst.comment.push('\n');
                    }
                    inst.comment.push_str(content.trim());
                }
                ("graph", "nodes") => {
                    let (c, n) = toks.int(1)?;
                    if n < 0 {
                        return Err(toks.syntax(c, "negative node count"));
                    }
                    nodes = Some(n as usize);
                }
                ("graph", "edges" | "arcs") => {
                    toks.int(1)?;
                }
                ("graph", "e" | "a") => {
                    let vals = (1..=3).map(|k| toks.int(k)).collect::<Result<Vec<_>, _>>()?;
                    toks.arity(4)?;
                    pending_edges.push((line_no, vals));
                }
                ("demands", "demands") => {
                    toks.int(1)?;
                }
                ("demands", "d") => {
                    let vals = (1..=2).map(|k| toks.int(k)).collect::<Result<Vec<_>, _>>()?;
                    toks.arity(3)?;
                    pending_demands.push((line_no, vals));
                }
                ("terminals", "terminals") => {
                    toks.int(1)?;
                }
                ("terminals", "t") => {
                    let (c, x) = toks.int(1)?;
                    pending_terms.push((line_no, c, x));
                }
                ("graph" | "demands" | "terminals", _) => {
                    return Err(toks.syntax(col, format!("unexpected keyword `{head}`")));
                }
                _ => {}
            },
        }
    }
    if !saw_graph {
        return Err(ParseError::MissingSection("Graph"));
    }
    let n = nodes.unwrap_or(0);
    inst.graph = Graph::with_vertices(n);
    for (line, vals) in pending_edges {
        let check = |(col, x): (usize, i64)| {
            if x < 1 || x as usize > n {
                Err(ParseError::VertexOutOfRange { line, col, index: x, n })
            } else {
                Ok(VertexId((x - 1) as u32))
            }
        };
        let u = check(vals[0])?;
        let v = check(vals[1])?;
        let (wcol, w) = vals[2];
        if w < 0 {
            return Err(ParseError::NegativeWeight { line, col: wcol, weight: w });
        }
        if u == v {
            return Err(ParseError::SelfLoop { line });
        }
        inst.graph.add_edge(u, v, length(w)).expect("checked endpoints");
    }
    for (line, vals) in pending_demands {
        let mut ends = Vec::new();
        for (col, x) in vals {
            if x < 1 || x as usize > n {
                return Err(ParseError::VertexOutOfRange { line, col, index: x, n });
            }
            ends.push(VertexId((x - 1) as u32));
        }
        let d = Demand::new(ends[0], ends[1]).map_err(|_| ParseError::DegenerateDemand { line })?;
        inst.demands.push(d);
    }
    for (line, col, x) in pending_terms {
        if x < 1 || x as usize > n {
            return Err(ParseError::VertexOutOfRange { line, col, index: x, n });
        }
        let v = VertexId((x - 1) as u32);
        if !terminals.contains(&v) {
            terminals.push(v);
        }
    }
    if let Some((&first, rest)) = terminals.split_first() {
        for &t in rest {
            inst.demands.push(Demand { s: first, t });
        }
    }
    Ok(inst)
}

/// Writes an instance whose edge ids are `0..m` in order.
pub fn serialize_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::from("33D32945 STP File, STP Format Version 1.0\n\nSECTION Comment\n");
    writeln!(out, "Name \"{}\"", inst.name).unwrap();
    for line in inst.comment.lines() {
        writeln!(out, "{line}").unwrap();
    }
    out.push_str("END\n\nSECTION Graph\n");
    writeln!(out, "Nodes {}", g.vertex_bound()).unwrap();
    writeln!(out, "Edges {}", g.num_edges()).unwrap();
    for e in g.edges() {
        assert!(e.len.is_integer(), "instance files hold integer lengths");
        writeln!(out, "E {} {} {}", e.u.0 + 1, e.v.0 + 1, e.len.to_integer()).unwrap();
    }
    out.push_str("END\n\nSECTION Demands\n");
    writeln!(out, "Demands {}", inst.demands.len()).unwrap();
    for d in &inst.demands {
        writeln!(out, "D {} {}", d.s.0 + 1, d.t.0 + 1).unwrap();
    }
    out.push_str("END\n\nEOF\n");
    out
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthDist {
    Constant(i64),
    /// Uniform on `1..=max`.
    Uniform(i64),
}

impl LengthDist {
    fn sample(self, rng: &mut ChaCha8Rng) -> Result<Length, GenerateError> {
        match self {
            LengthDist::Constant(c) if c >= 0 => Ok(length(c)),
            LengthDist::Uniform(m) if m >= 1 => Ok(length(rng.gen_range(1..=m))),
            _ => Err(GenerateError::BadLength),
        }
    }
}

fn grid_vertex(cols: usize, r: usize, c: usize) -> VertexId {
    VertexId((r * cols + c) as u32)
}

fn disjoint_demands(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Demand>, GenerateError> {
    if 2 * k > n {
        return Err(GenerateError::TooManyDemands { k, n });
    }
    let mut vs: Vec<u32> = (0..n as u32).collect();
    vs.shuffle(rng);
    Ok(vs[..2 * k].chunks(2).map(|p| Demand { s: VertexId(p[0]), t: VertexId(p[1]) }).collect())
}

/// Grid graph with vertex `r * cols + c`; edges are listed row by row, the
/// rightward edge of a vertex before its downward edge.
pub fn generate_grid_instance(
    rows: usize,
    cols: usize,
    k: usize,
    dist: LengthDist,
    seed: u64,
) -> Result<Instance, GenerateError> {
    if rows == 0 || cols == 0 {
        return Err(GenerateError::EmptyGrid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows * cols;
    if 2 * k > n {
        return Err(GenerateError::TooManyDemands { k, n });
    }
    let mut g = Graph::with_vertices(n);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                let len = dist.sample(&mut rng)?;
                g.add_edge(grid_vertex(cols, r, c), grid_vertex(cols, r, c + 1), len).unwrap();
            }
            if r + 1 < rows {
                let len = dist.sample(&mut rng)?;
                g.add_edge(grid_vertex(cols, r, c), grid_vertex(cols, r + 1, c), len).unwrap();
            }
        }
    }
    let demands = disjoint_demands(n, k, &mut rng)?;
    Ok(Instance { name: format!("grid-{rows}x{cols}-k{k}-s{seed}"), comment: String::new(), graph: g, demands })
}

/// Grid whose cells each receive one random diagonal with probability
/// `diag_prob`; still planar (a triangulated grid at probability 1).
pub fn generate_planar_instance(
    rows: usize,
    cols: usize,
    k: usize,
    diag_prob: f64,
    dist: LengthDist,
    seed: u64,
) -> Result<Instance, GenerateError> {
    let mut inst = generate_grid_instance(rows, cols, k, dist, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols.saturating_sub(1) {
            if rng.gen_bool(diag_prob.clamp(0.0, 1.0)) {
                let len = dist.sample(&mut rng)?;
                let (a, b) = if rng.gen_bool(0.5) {
                    (grid_vertex(cols, r, c), grid_vertex(cols, r + 1, c + 1))
                } else {
                    (grid_vertex(cols, r, c + 1), grid_vertex(cols, r + 1, c))
                };
                inst.graph.add_edge(a, b, len).unwrap();
            }
        }
    }
    inst.name = format!("planar-{rows}x{cols}-k{k}-s{seed}");
    Ok(inst)
}

/// Exact lengths travel as strings such as `"7"` or `"7/2"`.
pub mod length_str {
    use super::Length;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Length, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Length, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| D::Error::custom(format!("bad length `{s}`")))
    }

    pub fn parse(s: &str) -> Option<Length> {
        match s.split_once('/') {
            Some((a, b)) => {
                let a: i128 = a.trim().parse().ok()?;
                let b: i128 = b.trim().parse().ok()?;
                (b != 0).then(|| Length::new(a, b))
            }
            None => match s.trim().split_once('.') {
                // finite decimals such as `0.25` are exact too
                Some((int, frac)) if !frac.is_empty() && frac.bytes().all(|b| b.is_ascii_digit()) => {
                    let neg = int.starts_with('-');
                    let whole: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
                    let scale = 10i128.checked_pow(frac.len() as u32)?;
                    let part = Length::new(frac.parse().ok()?, scale);
                    let whole = Length::from_integer(whole.abs());
                    Some(if neg { -(whole + part) } else { whole + part })
                }
                Some(_) => None,
                None => Some(Length::from_integer(s.trim().parse().ok()?)),
            },
        }
    }

    pub mod option {
        use super::Length;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(x: &Option<Length>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => super::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Length>, D::Error> {
            let s = Option::<String>::deserialize(d)?;
            s.map(|s| super::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad length `{s}`")))).transpose()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub p: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub algorithm: String,
    /// Solution edges as 0-based positions in the instance's edge list.
    pub edges: Vec<u32>,
    #[serde(with = "length_str")]
    pub total_length: Length,
    pub feasible: bool,
    pub parameters: Parameters,
    pub wall_time_secs: f64,
    #[serde(with = "length_str::option")]
    pub oracle_opt: Option<Length>,
    pub ratio: Option<f64>,
    /// Measured quantities such as width, table sizes and error factors.
    pub measurements: BTreeMap<String, f64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("total length {claimed} differs from the sum of listed edges {actual}")]
    LengthMismatch { claimed: Length, actual: Length },
    #[error("ratio present without an oracle optimum")]
    RatioWithoutOpt,
    #[error("unknown edge {0}")]
    UnknownEdge(u32),
}

impl ResultRecord {
    pub fn new(algorithm: &str, g: &Graph, edges: &[EdgeId], feasible: bool) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            edges: edges.iter().map(|e| e.0).collect(),
            total_length: g.length_of(edges),
            feasible,
            parameters: Parameters::default(),
            wall_time_secs: 0.0,
            oracle_opt: None,
            ratio: None,
            measurements: BTreeMap::new(),
        }
    }

    pub fn with_oracle(mut self, opt: Length) -> Self {
        self.oracle_opt = Some(opt);
        self.ratio = Some(ratio(self.total_length, opt));
        self
    }

    pub fn validate(&self, g: &Graph) -> Result<(), RecordError> {
        let mut actual = Length::from_integer(0);
        for &e in &self.edges {
            actual += g.edge(EdgeId(e)).ok_or(RecordError::UnknownEdge(e))?.len;
        }
        if actual != self.total_length {
            return Err(RecordError::LengthMismatch { claimed: self.total_length, actual });
        }
        if self.ratio.is_some() && self.oracle_opt.is_none() {
            return Err(RecordError::RatioWithoutOpt);
        }
        Ok(())
    }
}

/// `len / opt` as a float, 1 when both are zero.
pub fn ratio(len: Length, opt: Length) -> f64 {
    if opt == Length::from_integer(0) {
        return if len == opt { 1.0 } else { f64::INFINITY };
    }
    let r = len / opt;
    *r.numer() as f64 / *r.denom() as f64
}

pub fn to_f64(x: Length) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn emit_result(r: &ResultRecord) -> String {
    serde_json::to_string_pretty(r).expect("record serializes")
}

pub fn parse_result(text: &str) -> Result<ResultRecord, serde_json::Error> {
    serde_json::from_str(text)
}
