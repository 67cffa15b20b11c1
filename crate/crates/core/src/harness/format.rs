//! Plain-text stream files.
//!
//! ```text
//! # comment
//! n 4 model ins
//! + 0 1
//! + 1 2
//! ```
//! Turnstile files use `model turn` and may contain `- u v` lines.

use std::fmt::Write as _;

use super::stream::{EdgeUpdate, GraphStream, Model};
use crate::error::{Error, Result};
use crate::graph::Edge;

pub fn parse_stream(text: &str) -> Result<GraphStream> {
    let mut header: Option<(usize, Model)> = None;
    let mut updates = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::MalformedStream(format!("line {}: {what}: '{raw}'", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 4 || fields[0] != "n" || fields[2] != "model" {
                    return Err(bad("expected header 'n <N> model <ins|turn>'"));
                }
                let n = fields[1].parse().map_err(|_| bad("bad node count"))?;
                let model = match fields[3] {
                    "ins" => Model::InsertionOnly,
                    "turn" => Model::Turnstile,
                    _ => return Err(bad("unknown model")),
                };
                header = Some((n, model));
            }
            Some(_) => {
                if fields.len() != 3 {
                    return Err(bad("expected '+ u v' or '- u v'"));
                }
                let sign = match fields[0] {
                    "+" => 1,
                    "-" => -1,
                    _ => return Err(bad("bad sign")),
                };
                let u = fields[1].parse().map_err(|_| bad("bad node id"))?;
                let v = fields[2].parse().map_err(|_| bad("bad node id"))?;
                updates.push(EdgeUpdate { u, v, sign });
            }
        }
    }
    let (n, model) = header.ok_or_else(|| Error::MalformedStream("missing header".into()))?;
    GraphStream::new(n, model, updates)
}

pub fn write_stream(stream: &GraphStream) -> String {
    let mut out = format!("n {} model {}\n", stream.n(), stream.model().tag());
    for up in stream.updates() {
        let sign = if up.sign > 0 { '+' } else { '-' };
        writeln!(out, "{sign} {} {}", up.u, up.v).unwrap();
    }
    out
}

/// Edge list in stream format (insertion-only), used to pipe certificates
/// and sparsifiers back into the CLI.
pub fn write_edges(n: usize, edges: &[Edge]) -> String {
    let mut out = format!("n {n} model ins\n");
    for e in edges {
        writeln!(out, "+ {} {}", e.u, e.v).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let text = "# demo\nn 3 model turn\n+ 0 1\n+ 1 2 # trailing\n- 0 1\n";
        let s = parse_stream(text).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(parse_stream(&write_stream(&s)).unwrap(), s);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_stream("n 3 model ins\n++ 1 2\n").is_err());
        assert!(parse_stream("+ 0 1\n").is_err());
        assert!(parse_stream("n 2 model ins\n+ 0 5\n").is_err());
        assert!(parse_stream("n 2 model ins\n- 0 1\n").is_err());
    }
}
