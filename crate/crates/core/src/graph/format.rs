//! Edge-list text (`1,5;1,7;…`, 1-indexed) and graph6 records.

use super::{Graph, MAX_VERTICES};
use crate::error::{Error, Result};

fn parse_err(msg: String) -> Error {
    Error::Parse { line: None, msg }
}

/// Parses semicolon-separated `i,j` pairs of 1-indexed vertices into a graph on `n` vertices.
///
/// Whitespace and a surrounding pair of braces are tolerated. Repeated pairs
/// collapse; vertices not mentioned stay isolated.
pub fn parse_edge_list(text: &str, n: usize) -> Result<Graph> {
    let mut g = Graph::empty(n)?;
    let body = text.trim();
    let body = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')).unwrap_or(body);
    for token in body.split(';') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let (a, b) = token
            .split_once(',')
            .ok_or_else(|| parse_err(format!("malformed pair {token:?}")))?;
        let parse_vertex = |s: &str| -> Result<usize> {
            let v: i64 = s
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("malformed vertex {:?} in pair {token:?}", s.trim())))?;
            if v < 1 || v as usize > n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            Ok(v as usize - 1)
        };
        let (a, b) = (parse_vertex(a)?, parse_vertex(b)?);
        g.add_edge(a, b)?;
    }
    Ok(g)
}

/// Parses one header-less graph6 record (an optional `>>graph6<<` prefix is stripped).
pub fn parse_graph6(line: &str) -> Result<Graph> {
    let line = line.trim_end_matches(['\n', '\r']);
    let line = line.strip_prefix(">>graph6<<").unwrap_or(line);
    let bytes = line.as_bytes();
    let (&first, rest) = bytes.split_first().ok_or_else(|| parse_err("empty graph6 record".into()))?;
    for (pos, &c) in bytes.iter().enumerate() {
        if !(63..=126).contains(&c) {
            return Err(parse_err(format!("invalid graph6 character {:?} at offset {pos}", c as char)));
        }
    }
    if first == 126 {
        return Err(Error::TooLarge { what: "graph6 vertex count", got: 63, limit: MAX_VERTICES });
    }
    let n = (first - 63) as usize;
    if n > MAX_VERTICES {
        return Err(Error::TooLarge { what: "graph6 vertex count", got: n, limit: MAX_VERTICES });
    }
    if n == 0 {
        return Err(parse_err("graph6 record with zero vertices".into()));
    }
    let bits = n * (n - 1) / 2;
    let need = bits.div_ceil(6);
    if rest.len() < need {
        return Err(parse_err(format!("truncated graph6 bit field: need {need} bytes, got {}", rest.len())));
    }
    if rest.len() > need {
        return Err(parse_err(format!("graph6 record too long: need {need} bytes, got {}", rest.len())));
    }
    let mut g = Graph::empty(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = rest[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j)?;
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Encodes a graph as a graph6 record (no header, no newline).
pub fn encode_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::with_capacity(1 + (n * n.saturating_sub(1) / 2).div_ceil(6));
    out.push(n as u8 + 63);
    let mut acc = 0u8;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.has_edge(i, j) as u8;
            k += 1;
            if k % 6 == 0 {
                out.push(acc + 63);
                acc = 0;
            }
        }
    }
    if k % 6 != 0 {
        out.push((acc << (6 - k % 6)) + 63);
    }
    String::from_utf8(out).expect("graph6 is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_list_examples() {
        let g = parse_edge_list("1,5;1,7;2,6;2,7;3,7", 7).unwrap();
        assert_eq!((g.n(), g.edge_count()), (7, 5));
        let g = parse_edge_list("3,4;4,3", 4).unwrap();
        assert_eq!(g.edges(), vec![(2, 3)]);
        let g = parse_edge_list("", 3).unwrap();
        assert_eq!((g.n(), g.edge_count()), (3, 0));
        let g = parse_edge_list(" {1, 2; 2,3 } ", 3).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(parse_edge_list("1-2", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("1,x", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("0,2", 3), Err(Error::VertexOutOfRange { vertex: 0, .. })));
        assert!(matches!(parse_edge_list("1,4", 3), Err(Error::VertexOutOfRange { vertex: 4, .. })));
        assert!(matches!(parse_edge_list("2,2", 3), Err(Error::SelfLoop(2))));
    }

    #[test]
    fn graph6_examples() {
        let k2 = parse_graph6("A_").unwrap();
        assert_eq!((k2.n(), k2.edge_count()), (2, 1));
        let e2 = parse_graph6("A?").unwrap();
        assert_eq!((e2.n(), e2.edge_count()), (2, 0));
        assert_eq!(encode_graph6(&k2), "A_");
        assert_eq!(encode_graph6(&e2), "A?");
        // K4 and the path 1-2-3, checked against the format definition by hand.
        assert_eq!(encode_graph6(&parse_edge_list("1,2;1,3;1,4;2,3;2,4;3,4", 4).unwrap()), "C~");
        assert_eq!(encode_graph6(&parse_edge_list("1,2;2,3", 3).unwrap()), "Bg");
        assert_eq!(encode_graph6(&Graph::empty(1).unwrap()), "@");
    }

    #[test]
    fn graph6_errors() {
        assert!(parse_graph6("").is_err());
        assert!(parse_graph6("A ").is_err());
        assert!(parse_graph6("C").is_err());
        assert!(parse_graph6("A__").is_err());
        assert!(parse_graph6("~?@?").is_err());
        assert_eq!(parse_graph6(">>graph6<<A_\n").unwrap().edge_count(), 1);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..=32).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
                let mut g = Graph::empty(n).unwrap();
                let mut k = 0;
                for j in 1..n {
                    for i in 0..j {
                        if bits[k] {
                            g.add_edge(i, j).unwrap();
                        }
                        k += 1;
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn graph6_round_trip(g in arb_graph()) {
            let s = encode_graph6(&g);
            prop_assert_eq!(parse_graph6(&s).unwrap(), g.clone());
            prop_assert_eq!(encode_graph6(&parse_graph6(&s).unwrap()), s);
            prop_assert_eq!(parse_edge_list(&g.to_edge_list(), g.n()).unwrap(), g);
        }
    }
}
