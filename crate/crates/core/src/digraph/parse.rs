use super::Digraph;
use crate::error::ParseError;
use std::collections::HashSet;

fn two_numbers(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_ascii_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

/// Parse the edge-list format: `#` comment lines, a header `n m`, then
/// exactly `m` lines `u v`.
pub fn parse_digraph(text: &str) -> Result<Digraph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());

    let (header_line, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let (n, m) =
        two_numbers(header).ok_or(ParseError::MalformedHeader { line: header_line })?;

    let mut arcs = Vec::with_capacity(m);
    let mut seen = HashSet::with_capacity(m);
    for (line, body) in lines {
        let (u, v) = two_numbers(body).ok_or(ParseError::MalformedArc { line })?;
        for vertex in [u, v] {
            if vertex >= n {
                return Err(ParseError::VertexOutOfRange { line, vertex, n });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, vertex: u });
        }
        if !seen.insert((u, v)) {
            return Err(ParseError::DuplicateArc { line, tail: u, head: v });
        }
        arcs.push((u, v));
    }
    if arcs.len() != m {
        return Err(ParseError::ArcCountMismatch {
            expected: m,
            found: arcs.len(),
        });
    }
    Ok(Digraph::new(n, arcs).expect("arcs validated during parsing"))
}

impl std::str::FromStr for Digraph {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_digraph(s)
    }
}
