use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use super::ChunkedGraph;
use crate::error::{Error, Result};

/// Graph-aware attention mask over `node + text` positions. Node tokens
/// come first and attend along chunk adjacency; text tokens attend to every
/// node token and causally to earlier text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttentionMask {
    node: usize,
    text: usize,
    block: FixedBitSet,
}

impl AttentionMask {
    /// Mask from a node-block relation; the block is symmetrized and its
    /// diagonal forced on.
    pub fn from_node_block(node: usize, text: usize, allow: impl Fn(usize, usize) -> bool) -> Self {
        let mut block = FixedBitSet::with_capacity(node * node);
        for i in 0..node {
            block.insert(i * node + i);
            for j in 0..i {
                if allow(i, j) || allow(j, i) {
                    block.insert(i * node + j);
                    block.insert(j * node + i);
                }
            }
        }
        AttentionMask { node, text, block }
    }

    pub fn size(&self) -> usize {
        self.node + self.text
    }

    pub fn node_tokens(&self) -> usize {
        self.node
    }

    pub fn text_tokens(&self) -> usize {
        self.text
    }

    /// Whether position `i` may attend to position `j`.
    pub fn allows(&self, i: usize, j: usize) -> bool {
        let n = self.size();
        assert!(i < n && j < n, "position out of range");
        match (i < self.node, j < self.node) {
            (true, true) => self.block.contains(i * self.node + j),
            (true, false) => false,
            (false, true) => true,
            (false, false) => j <= i,
        }
    }

    /// Node-block rows as `0`/`1` strings.
    pub fn node_rows(&self) -> Vec<String> {
        (0..self.node)
            .map(|i| {
                (0..self.node)
                    .map(|j| if self.allows(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    /// Inverse of [`node_rows`](Self::node_rows). Rows must be square,
    /// symmetric and reflexive.
    pub fn from_node_rows(rows: &[String], text: usize) -> Result<Self> {
        let node = rows.len();
        let mut cells = vec![false; node * node];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != node {
                return Err(Error::Malformed(format!("node row {i} has length {}", row.len())));
            }
            for (j, c) in row.bytes().enumerate() {
                cells[i * node + j] = match c {
                    b'1' => true,
                    b'0' => false,
                    _ => return Err(Error::Malformed(format!("bad mask cell in row {i}"))),
                };
            }
        }
        for i in 0..node {
            if !cells[i * node + i] {
                return Err(Error::Malformed(format!("diagonal cell {i} is off")));
            }
            for j in 0..i {
                if cells[i * node + j] != cells[j * node + i] {
                    return Err(Error::Malformed(format!("node block asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(AttentionMask::from_node_block(node, text, |i, j| cells[i * node + j]))
    }

    /// Text form: a `n=<int> node=<int> text=<int>` header and `n` rows.
    pub fn to_text(&self) -> String {
        let n = self.size();
        let mut out = String::with_capacity(n * (n + 1) + 32);
        let _ = writeln!(out, "n={} node={} text={}", n, self.node, self.text);
        for i in 0..n {
            out.extend((0..n).map(|j| if self.allows(i, j) { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output and checks every layout rule.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Malformed("empty mask file".into()))?;
        let mut fields = [None; 3];
        for part in header.split_whitespace() {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Malformed(format!("bad header field `{part}`")))?;
            let v: usize = v
                .parse()
                .map_err(|_| Error::Malformed(format!("bad header value `{part}`")))?;
            match k {
                "n" => fields[0] = Some(v),
                "node" => fields[1] = Some(v),
                "text" => fields[2] = Some(v),
                _ => return Err(Error::Malformed(format!("unknown header field `{k}`"))),
            }
        }
        let [Some(n), Some(node), Some(text_count)] = fields else {
            return Err(Error::Malformed("header needs n, node and text".into()));
        };
        if n != node + text_count {
            return Err(Error::Malformed(format!("n={n} but node+text={}", node + text_count)));
        }
        let rows: Vec<&str> = lines.collect();
        if rows.len() != n {
            return Err(Error::Malformed(format!("expected {n} rows, found {}", rows.len())));
        }
        let node_rows: Vec<String> = rows[..node].iter().map(|r| r.get(..node).unwrap_or(r).to_string()).collect();
        let mask = AttentionMask::from_node_rows(&node_rows, text_count)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!("row {i} has length {}", row.len())));
            }
            for (j, c) in row.bytes().enumerate() {
                let expect = if mask.allows(i, j) { b'1' } else { b'0' };
                if c != expect {
                    return Err(Error::Malformed(format!("cell ({i}, {j}) breaks the mask layout")));
                }
            }
        }
        Ok(mask)
    }
}

/// Mask for a chunk layout followed by `text_tokens` text positions.
pub fn build_mask(cg: &ChunkedGraph, text_tokens: usize) -> AttentionMask {
    AttentionMask::from_node_block(cg.len(), text_tokens, |i, j| cg.adjacent(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(node: usize, text: usize, edges: &[(usize, usize)]) -> AttentionMask {
        AttentionMask::from_node_block(node, text, |i, j| edges.contains(&(i, j)))
    }

    #[test]
    fn single_position() {
        let m = dense(1, 0, &[]);
        assert_eq!(m.to_text(), "n=1 node=1 text=0\n1\n");
    }

    #[test]
    fn unconnected_is_diagonal() {
        let m = dense(2, 0, &[]);
        assert_eq!(m.to_text(), "n=2 node=2 text=0\n10\n01\n");
    }

    #[test]
    fn connected_with_text() {
        let m = dense(2, 2, &[(0, 1)]);
        assert_eq!(m.to_text(), "n=4 node=2 text=2\n1100\n1100\n1110\n1111\n");
    }

    #[test]
    fn text_round_trip_and_rejects_bad_layouts() {
        let m = dense(3, 2, &[(0, 2)]);
        assert_eq!(AttentionMask::parse(&m.to_text()).unwrap(), m);
        assert!(AttentionMask::parse("n=2 node=1 text=0\n1\n").is_err());
        assert!(AttentionMask::parse("n=2 node=2 text=0\n11\n01\n").is_err());
        assert!(AttentionMask::parse("n=2 node=1 text=1\n11\n11\n").is_err());
        assert!(AttentionMask::parse("n=1 node=1 text=0\n0\n").is_err());
    }

    #[test]
    fn node_rows_round_trip() {
        let m = dense(3, 4, &[(1, 2)]);
        let rows = m.node_rows();
        assert_eq!(rows, vec!["100", "011", "011"]);
        assert_eq!(AttentionMask::from_node_rows(&rows, 4).unwrap(), m);
    }
}
