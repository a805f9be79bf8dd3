//! Per-node parameters: a uniform value or one value per node, the latter
//! usually read from `node,value` CSV lines.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::NodeId;

#[derive(Debug, Clone, PartialEq)]
pub enum NodeParam<T> {
    Uniform(T),
    PerNode(Vec<T>),
}

impl<T: Copy> NodeParam<T> {
    pub fn get(&self, v: NodeId) -> T {
        match self {
            NodeParam::Uniform(x) => *x,
            NodeParam::PerNode(xs) => xs[v],
        }
    }

    /// Expands to exactly `node_count` values.
    pub fn resolve(&self, node_count: usize) -> Result<Vec<T>> {
        match self {
            NodeParam::Uniform(x) => Ok(vec![*x; node_count]),
            NodeParam::PerNode(xs) if xs.len() == node_count => Ok(xs.clone()),
            NodeParam::PerNode(xs) => Err(Error::param(format!(
                "parameter map covers {} nodes, graph has {node_count}",
                xs.len()
            ))),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, NodeParam::Uniform(_))
    }
}

/// Parses `node,value` lines into a dense vector. `#` comments and a leading
/// header line (whose first field is not an integer) are skipped. Every node
/// in `0..node_count` must appear exactly once.
pub fn parse_node_values<T>(text: &str, node_count: usize) -> Result<Vec<T>>
where
    T: FromStr + Copy,
{
    let mut values: Vec<Option<T>> = vec![None; node_count];
    let mut first_data = true;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::parse(lineno, line, "expected `node,value`"));
        }
        let node = match fields[0].parse::<i64>() {
            Ok(n) => n,
            Err(_) if first_data => {
                first_data = false;
                continue;
            }
            Err(_) => return Err(Error::parse(lineno, line, "node id is not an integer")),
        };
        first_data = false;
        if node < 0 || node as u64 >= node_count as u64 {
            return Err(Error::parse(
                lineno,
                line,
                format!("node {node} outside 0..{node_count}"),
            ));
        }
        let value: T = fields[1]
            .parse()
            .map_err(|_| Error::parse(lineno, line, "value does not parse"))?;
        let slot = &mut values[node as usize];
        if slot.is_some() {
            return Err(Error::parse(lineno, line, format!("node {node} listed twice")));
        }
        *slot = Some(value);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| Error::param(format!("parameter map is missing node {v}"))))
        .collect()
}
