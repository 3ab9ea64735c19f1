//! Plain-text graph files.
//!
//! ```text
//! # optional comments
//! n m directed|undirected
//! u v w
//! ...
//! ```

use std::fmt::Write as _;

use super::{GraphError, Length, Vertex, WeightedGraph};

pub fn read_graph(text: &str) -> Result<WeightedGraph, GraphError> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines
        .next()
        .ok_or(GraphError::Parse { line: 1, message: "missing header `n m directed|undirected`".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(line, "header must be `n m directed|undirected`"));
    }
    let n: usize = parse_num(line, fields[0], "vertex count")?;
    let m: usize = parse_num(line, fields[1], "edge count")?;
    let directed = match fields[2] {
        "directed" => true,
        "undirected" => false,
        other => return Err(parse_err(line, &format!("expected directed|undirected, found `{other}`"))),
    };

    let mut edges: Vec<(Vertex, Vertex, Length)> = Vec::with_capacity(m);
    for (line, text) in lines {
        let f: Vec<&str> = text.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(line, "edge line must be `u v w`"));
        }
        let u = parse_num(line, f[0], "vertex id")?;
        let v = parse_num(line, f[1], "vertex id")?;
        let w: Length = parse_num(line, f[2], "weight")?;
        if u >= n || v >= n {
            return Err(parse_err(line, &format!("vertex id out of range 0..{n}")));
        }
        edges.push((u, v, w));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: 1,
            message: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    WeightedGraph::from_edges(n, directed, &edges)
}

/// Canonical text: edges sorted by `(u, v)`.
pub fn write_graph(g: &WeightedGraph) -> String {
    let mut out = String::new();
    let kind = if g.is_directed() { "directed" } else { "undirected" };
    writeln!(out, "{} {} {}", g.n(), g.m(), kind).unwrap();
    for (u, v, w) in g.edges() {
        writeln!(out, "{u} {v} {w}").unwrap();
    }
    out
}

fn parse_err(line: usize, message: &str) -> GraphError {
    GraphError::Parse { line, message: message.to_string() }
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, GraphError> {
    s.parse().map_err(|_| parse_err(line, &format!("invalid {what} `{s}`")))
}
