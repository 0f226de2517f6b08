use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::Parse { line: lineno, msg: format!("missing {what}") })?;
        tok.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("bad {what} {tok:?}") })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(Error::Parse { line: lineno, msg: "trailing fields".into() });
    }
    Ok((a, b))
}

/// Parses the "n m" header followed by m lines "u v" with u < v.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let (n, m) = parse_pair(header, hline)?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for _ in 0..m {
        let (lineno, line) = lines.next().ok_or_else(|| Error::Parse {
            line: text.lines().count() + 1,
            msg: format!("expected {m} edges, found {}", edges.len()),
        })?;
        let (u, v) = parse_pair(line, lineno)?;
        if u == v {
            return Err(Error::Invariant { line: Some(lineno), msg: format!("self-loop at {u}") });
        }
        if u >= n || v >= n {
            return Err(Error::Invariant { line: Some(lineno), msg: format!("vertex out of range for n={n}") });
        }
        if u > v {
            return Err(Error::Parse { line: lineno, msg: format!("expected u < v, got {u} {v}") });
        }
        if !seen.insert((u, v)) {
            return Err(Error::Invariant { line: Some(lineno), msg: format!("duplicate edge ({u}, {v})") });
        }
        edges.push((u, v));
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(Error::Parse { line: lineno, msg: format!("more than {m} edges") });
    }
    Graph::new(n, edges)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}
