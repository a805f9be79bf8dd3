//! Whitespace-separated edge lists.
//!
//! ```text
//! # comment
//! nodes 5
//! 0 1 0.6
//! 1 2 1.25
//! ```
//!
//! The `nodes N` line is optional and declares trailing isolated nodes. The
//! weight column is present exactly when the list is read as weighted.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{Edge, Graph, NodeId};
use crate::error::{Error, Result};

const MAX_NODE_ID: i64 = u32::MAX as i64;

pub fn load_edge_list(text: &str, directed: bool, weighted: bool) -> Result<Graph> {
    read_edge_list(text.as_bytes(), directed, weighted)
}

pub fn read_edge_list<R: BufRead>(reader: R, directed: bool, weighted: bool) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut seen: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut declared: Option<(usize, usize, String)> = None;
    let mut max_id: Option<NodeId> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();

        if tokens[0] == "nodes" {
            if tokens.len() != 2 {
                return Err(Error::parse(lineno, &line, "expected `nodes N`"));
            }
            if declared.is_some() {
                return Err(Error::parse(lineno, &line, "repeated `nodes` header"));
            }
            let n = tokens[1]
                .parse::<usize>()
                .map_err(|_| Error::parse(lineno, &line, "node count is not a nonnegative integer"))?;
            declared = Some((n, lineno, line.clone()));
            continue;
        }

        let expected = if weighted { 3 } else { 2 };
        if tokens.len() != expected {
            let shape = if weighted { "`u v w`" } else { "`u v`" };
            return Err(Error::parse(lineno, &line, format!("expected {shape}")));
        }
        let u = parse_id(tokens[0], lineno, &line)?;
        let v = parse_id(tokens[1], lineno, &line)?;
        let weight = if weighted {
            let w: f64 = tokens[2]
                .parse()
                .map_err(|_| Error::parse(lineno, &line, "weight is not a number"))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::parse(lineno, &line, "weight must be positive and finite"));
            }
            w
        } else {
            1.0
        };
        if u == v {
            return Err(Error::parse(lineno, &line, "self-loop"));
        }
        let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
        if let Some(first) = seen.insert(key, lineno) {
            return Err(Error::parse(
                lineno,
                &line,
                format!("duplicate edge (first seen on line {first})"),
            ));
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push(Edge { u, v, weight });
    }

    let implied = max_id.map_or(0, |m| m + 1);
    let node_count = match declared {
        Some((n, lineno, text)) => {
            if n < implied {
                return Err(Error::parse(
                    lineno,
                    &text,
                    format!("declares {n} nodes but edges reference node {}", implied - 1),
                ));
            }
            n
        }
        None => implied,
    };
    Graph::from_edges(node_count, directed, weighted, edges)
}

fn parse_id(token: &str, lineno: usize, line: &str) -> Result<NodeId> {
    let id: i64 = token
        .parse()
        .map_err(|_| Error::parse(lineno, line, format!("node id `{token}` is not an integer")))?;
    if id < 0 {
        return Err(Error::parse(lineno, line, format!("negative node id {id}")));
    }
    if id > MAX_NODE_ID {
        return Err(Error::parse(lineno, line, format!("node id {id} is too large")));
    }
    Ok(id as NodeId)
}

/// Writes `g` in the format accepted by [`read_edge_list`]. Weights use the
/// shortest representation that parses back to the same `f64`.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# {} {}",
        if g.is_directed() { "directed" } else { "undirected" },
        if g.is_weighted() { "weighted" } else { "unweighted" }
    )?;
    writeln!(out, "nodes {}", g.node_count())?;
    for e in g.edges() {
        if g.is_weighted() {
            writeln!(out, "{} {} {}", e.u, e.v, e.weight)?;
        } else {
            writeln!(out, "{} {}", e.u, e.v)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DegreeMode;

    #[test]
    fn path_graph() {
        let g = load_edge_list("0 1\n1 2", false, false).unwrap();
        assert_eq!(g.node_count(), 3);
        let degs: Vec<_> = (0..3)
            .map(|v| g.degree(v, DegreeMode::Undirected).unwrap())
            .collect();
        assert_eq!(degs, vec![1, 2, 1]);
    }

    #[test]
    fn weighted_pair() {
        let g = load_edge_list("0 1 0.6", false, true).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.weight(1, 0), Some(0.6));
    }

    #[test]
    fn comments_and_header() {
        let g = load_edge_list("# hello\nnodes 6\n\n0 1\n  # indented\n2 3\n", false, false).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 2);
    }

    fn err_line(text: &str, weighted: bool) -> usize {
        match load_edge_list(text, false, weighted) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_edge_names_line() {
        assert_eq!(err_line("0 1\n0 1", false), 2);
        assert_eq!(err_line("0 1\n1 0", false), 2);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(err_line("0 1\n-1 2", false), 2);
        assert_eq!(err_line("0 1 0", true), 1);
        assert_eq!(err_line("0 1 -2.5", true), 1);
        assert_eq!(err_line("3 3", false), 1);
        assert_eq!(err_line("0 1 2", false), 1);
        assert_eq!(err_line("0 x", false), 1);
        assert_eq!(err_line("0 1\nnodes 1", false), 2);
    }

    #[test]
    fn directed_accepts_antiparallel() {
        let g = load_edge_list("0 1\n1 0", true, false).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn round_trip() {
        let text = "nodes 5\n0 1 0.1\n1 2 0.30000000000000004\n3 2 7\n";
        let g = load_edge_list(text, true, true).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = load_edge_list(std::str::from_utf8(&buf).unwrap(), true, true).unwrap();
        assert_eq!(back.node_count(), 5);
        assert_eq!(back.edges(), g.edges());
    }
}
