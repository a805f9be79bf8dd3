//! Per-node centrality scores and their `node,score` serialization.

use std::io::Write;

use crate::error::{Error, Result};
use crate::games::GameSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    GaussianApprox,
    MonteCarlo,
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::GaussianApprox => "gaussian_approx",
            Method::MonteCarlo => "monte_carlo",
            Method::BruteForce => "brute_force",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShapleyVector {
    pub scores: Vec<f64>,
    pub game: GameSpec,
    /// [`crate::graph::Graph::fingerprint`] of the graph the scores belong to.
    pub graph_id: u64,
    pub method: Method,
}

impl ShapleyVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }

    /// One `node<sep>score` line per node, ascending node id, scores with 12
    /// significant digits.
    pub fn write_delimited<W: Write>(&self, mut out: W, sep: char) -> Result<()> {
        for (v, s) in self.scores.iter().enumerate() {
            writeln!(out, "{v}{sep}{}", format_sig(*s, 12))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_delimited(&mut buf, ',').expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Reads scores written by [`ShapleyVector::write_delimited`] (comma or tab
/// separated, optional header, `#` comments). Nodes must be dense `0..n`.
pub fn parse_scores(text: &str) -> Result<Vec<f64>> {
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split([',', '\t']).map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::parse(idx + 1, line, "expected `node,score`"));
        }
        let Ok(node) = fields[0].parse::<usize>() else {
            if pairs.is_empty() {
                continue;
            }
            return Err(Error::parse(idx + 1, line, "node id is not an integer"));
        };
        let score: f64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(idx + 1, line, "score is not a number"))?;
        pairs.push((node, score));
    }
    pairs.sort_by_key(|p| p.0);
    for (i, &(node, _)) in pairs.iter().enumerate() {
        if node != i {
            return Err(Error::param(format!("score file is not dense: expected node {i}, found {node}")));
        }
    }
    Ok(pairs.into_iter().map(|p| p.1).collect())
}

/// `printf("%.{digits}g")`: fixed notation for moderate exponents, otherwise
/// scientific; trailing zeros dropped.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(5.0 / 6.0, 12), "0.833333333333");
        assert_eq!(format_sig(4.0 / 3.0, 12), "1.33333333333");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(1.75, 12), "1.75");
        assert_eq!(format_sig(123456.0, 12), "123456");
        assert_eq!(format_sig(1e-7, 12), "1e-07");
        assert_eq!(format_sig(2.5e13, 12), "2.5e+13");
        assert_eq!(format_sig(0.0001234, 3), "0.000123");
        assert_eq!(format_sig(-0.5, 12), "-0.5");
        assert_eq!(format_sig(0.0, 12), "0");
        // rounding carries into the exponent
        assert_eq!(format_sig(9.9999999999999, 12), "10");
    }

    #[test]
    fn csv_round_trip() {
        let sv = ShapleyVector {
            scores: vec![5.0 / 6.0, 4.0 / 3.0, 5.0 / 6.0],
            game: GameSpec::Fringe,
            graph_id: 0,
            method: Method::Exact,
        };
        let csv = sv.to_csv();
        assert_eq!(csv, "0,0.833333333333\n1,1.33333333333\n2,0.833333333333\n");
        let back = parse_scores(&format!("node,score\n{csv}")).unwrap();
        for (a, b) in back.iter().zip(&sv.scores) {
            assert!((a - b).abs() < 1e-11);
        }
        assert!(parse_scores("0,1\n2,1\n").is_err());
    }
}
