//! Line-oriented text formats, the JSON graph mirror, and run manifests.
//!
//! ```text
//! # theory: arity, then generators as 0-based images
//! r 3
//! gen 1 0 2
//!
//! # graph: vertex count, then one edge per line (any orbit member)
//! n 3
//! 0 1 2
//!
//! # family: member count, then graph records separated by ---
//! family 2
//! n 3
//! 0 1 2
//! ---
//! n 4
//! ```
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{GdhError, Result};
use crate::graph::{Family, Gdh, Theory};
use crate::perm_group::{closure, Permutation};

/// Largest arity accepted in theory files; groups are stored by enumeration.
pub const MAX_ARITY: usize = 8;

/// Non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_numbers(line: usize, fields: &[&str]) -> Result<Vec<usize>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<usize>()
                .map_err(|_| GdhError::parse(line, format!("expected a non-negative integer, got {f:?}")))
        })
        .collect()
}

/// `<keyword> <value>` header line.
fn parse_header(line: usize, text: &str, keyword: &str) -> Result<usize> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    match fields.as_slice() {
        [k, v] if *k == keyword => Ok(parse_numbers(line, &[v])?[0]),
        _ => Err(GdhError::parse(line, format!("expected `{keyword} <count>`, got {text:?}"))),
    }
}

pub fn parse_theory(text: &str) -> Result<Theory> {
    let mut lines = content_lines(text);
    let (first, header) = lines
        .next()
        .ok_or_else(|| GdhError::parse(0, "empty theory record"))?;
    let r = parse_header(first, header, "r")?;
    if r == 0 {
        return Err(GdhError::parse(first, "arity must be at least 1"));
    }
    if r > MAX_ARITY {
        return Err(GdhError::ArityTooLarge { arity: r, max: MAX_ARITY });
    }
    let mut gens = Vec::new();
    for (line, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields[0] != "gen" {
            return Err(GdhError::parse(line, format!("expected `gen ...`, got {l:?}")));
        }
        let images = parse_numbers(line, &fields[1..])?;
        if images.len() != r {
            return Err(GdhError::ArityMismatch {
                expected: r,
                found: images.len(),
            });
        }
        gens.push(Permutation::new(images)?);
    }
    Theory::new(closure(r, &gens)?)
}

/// A small generating set: each element not yet generated is added in order.
pub fn serialize_theory(theory: &Theory) -> String {
    let r = theory.arity();
    let mut out = format!("r {r}\n");
    let mut gens: Vec<Permutation> = Vec::new();
    let mut span = closure(r, &gens).expect("trivial group");
    for p in theory.group().elements() {
        if !span.contains(p) {
            gens.push(p.clone());
            span = closure(r, &gens).expect("elements share the arity");
            out.push_str(&format!("gen {}\n", join(p.images())));
        }
    }
    out
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_gdh_lines<'a>(mut lines: impl Iterator<Item = (usize, &'a str)>, theory: &Theory) -> Result<Gdh> {
    let (first, header) = lines
        .next()
        .ok_or_else(|| GdhError::parse(0, "empty graph record"))?;
    let n = parse_header(first, header, "n")?;
    let mut g = Gdh::empty(theory, n)?;
    let r = theory.arity();
    for (line, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        let t = parse_numbers(line, &fields)?;
        if t.len() != r {
            return Err(GdhError::parse(
                line,
                format!("edge has {} vertices, arity is {r}", t.len()),
            ));
        }
        g.insert_edge(&t).map_err(|e| GdhError::parse(line, e.to_string()))?;
    }
    Ok(g)
}

/// Text or JSON (`{"n":…,"edges":[…]}`), detected by the first character.
pub fn parse_gdh(text: &str, theory: &Theory) -> Result<Gdh> {
    if text.trim_start().starts_with('{') {
        return parse_gdh_json(text, theory);
    }
    parse_gdh_lines(content_lines(text), theory)
}

pub fn serialize_gdh(g: &Gdh) -> String {
    let mut out = format!("n {}\n", g.vertex_count());
    for e in g.edges() {
        out.push_str(&join(&e));
        out.push('\n');
    }
    out
}

pub fn parse_family(text: &str, theory: &Theory) -> Result<Family> {
    let mut lines = content_lines(text).peekable();
    let (first, header) = lines
        .next()
        .ok_or_else(|| GdhError::parse(0, "empty family record"))?;
    let k = parse_header(first, header, "family")?;
    let mut records: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    let mut last_line = first;
    for (line, l) in lines {
        last_line = line;
        if l == "---" {
            records.push(Vec::new());
        } else {
            records.last_mut().expect("nonempty").push((line, l));
        }
    }
    if k == 0 && records.len() == 1 && records[0].is_empty() {
        return Family::new(theory, Vec::new());
    }
    if records.len() != k {
        return Err(GdhError::parse(
            last_line,
            format!("family declares {k} members, found {}", records.len()),
        ));
    }
    let members = records
        .into_iter()
        .map(|rec| parse_gdh_lines(rec.into_iter(), theory))
        .collect::<Result<Vec<_>>>()?;
    Family::new(theory, members)
}

pub fn serialize_family(fam: &Family) -> String {
    let mut out = format!("family {}\n", fam.len());
    for (i, g) in fam.members().iter().enumerate() {
        if i > 0 {
            out.push_str("---\n");
        }
        out.push_str(&serialize_gdh(g));
    }
    out
}

/// JSON mirror of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub n: usize,
    pub edges: Vec<Vec<usize>>,
}

impl From<&Gdh> for GraphRecord {
    fn from(g: &Gdh) -> Self {
        Self {
            n: g.vertex_count(),
            edges: g.edges().collect(),
        }
    }
}

impl GraphRecord {
    pub fn into_gdh(self, theory: &Theory) -> Result<Gdh> {
        Gdh::from_edges(theory, self.n, self.edges)
    }
}

pub fn parse_gdh_json(text: &str, theory: &Theory) -> Result<Gdh> {
    let rec: GraphRecord = serde_json::from_str(text).map_err(|e| GdhError::parse(e.line(), e.to_string()))?;
    rec.into_gdh(theory)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Ties an output to its inputs: rerunning with the same inputs and seed
/// reproduces `result_sha256`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub argv: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub version: String,
    pub wall_time_secs: f64,
    pub result_sha256: String,
}
