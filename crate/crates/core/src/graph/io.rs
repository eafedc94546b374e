//! Edge-list text format.
//!
//! ```text
//! # comment
//! n 3
//! 0 1
//! 1 2 1/2
//! ```
//!
//! The header is `n <count>`. A bare `<count> <edges>` header is also
//! accepted, in which case the edge count is checked. Edge lines are
//! `u v [w]` with 0-indexed vertices and an optional weight (default 1,
//! decimal or `p/q`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, Weight};

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing `n <count>` header".into(),
    })?;
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, expected_m) = match fields.as_slice() {
        ["n", count] => (
            count
                .parse::<usize>()
                .map_err(|_| err(hline, format!("bad vertex count `{count}`")))?,
            None,
        ),
        [count, m] => (
            count
                .parse::<usize>()
                .map_err(|_| err(hline, format!("bad header `{header}`")))?,
            Some(
                m.parse::<usize>()
                    .map_err(|_| err(hline, format!("bad header `{header}`")))?,
            ),
        ),
        _ => return Err(err(hline, format!("expected `n <count>`, found `{header}`"))),
    };

    let mut edges = Vec::new();
    for (line, body) in lines {
        let fields: Vec<&str> = body.split_whitespace().collect();
        let vertex = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(line, format!("bad vertex `{s}`")))
        };
        let (u, v, w) = match fields.as_slice() {
            [u, v] => (vertex(u)?, vertex(v)?, Weight::ONE),
            [u, v, w] => (
                vertex(u)?,
                vertex(v)?,
                w.parse::<Weight>().map_err(|e| err(line, e.to_string()))?,
            ),
            _ => return Err(err(line, format!("expected `u v [w]`, found `{body}`"))),
        };
        edges.push((u, v, w));
    }
    if let Some(m) = expected_m {
        if m != edges.len() {
            return Err(err(
                hline,
                format!("header declares {m} edges but {} were given", edges.len()),
            ));
        }
    }
    Graph::from_edges(n, edges)
}

/// Canonical serialization: header, then edges sorted by `(u, v)` with the
/// weight omitted when it is exactly one.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (u, v, w) in g.edges() {
        if w.is_one() {
            writeln!(out, "{u} {v}").unwrap();
        } else {
            writeln!(out, "{u} {v} {w}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{compressed_q4, path};

    #[test]
    fn parses_comments_and_weights() {
        let g = parse_edge_list("# a triangle\nn 3\n0 1\n1 2 1/2 # half\n\n0 2 0.5\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.weight(2, 1).unwrap().value(), 0.5);
    }

    #[test]
    fn accepts_count_header() {
        let g = parse_edge_list("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g, path(3).unwrap());
        assert!(parse_edge_list("3 5\n0 1\n").is_err());
    }

    #[test]
    fn reports_line_numbers() {
        match parse_edge_list("n 3\n0 1\n0 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("n 2\n0 0\n"), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn writes_canonical_text() {
        assert_eq!(write_edge_list(&path(3).unwrap()), "n 3\n0 1\n1 2\n");
        let g = compressed_q4().graph;
        let text = write_edge_list(&g);
        assert!(text.ends_with("11 12 2\n"));
        assert_eq!(parse_edge_list(&text).unwrap(), g);
    }
}
