//! Newick input with branch lengths.
//!
//! Node heights are recovered as `leaf depth - node depth`, so every leaf must
//! sit at the same cumulative branch length from the root.

use super::{Node, NodeId, UltrametricTree};
use crate::error::{Error, Result};
use crate::metric::REL_TOL;

struct Parsed {
    label: Option<String>,
    length: Option<f64>,
    children: Vec<Parsed>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("newick at byte {}: {msg}", self.pos)))
    }

    fn skip_ws(&mut self) -> Result<()> {
        loop {
            match self.src.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => match self.src[self.pos..].iter().position(|&b| b == b']') {
                    Some(end) => self.pos += end + 1,
                    None => return self.error("unterminated comment"),
                },
                _ => return Ok(()),
            }
        }
    }

    fn peek(&mut self) -> Result<Option<u8>> {
        self.skip_ws()?;
        Ok(self.src.get(self.pos).copied())
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.peek()? == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("expected {:?}", byte as char))
        }
    }

    fn subtree(&mut self) -> Result<Parsed> {
        let mut children = Vec::new();
        if self.peek()? == Some(b'(') {
            self.pos += 1;
            loop {
                children.push(self.subtree()?);
                match self.peek()? {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.error("expected ',' or ')'"),
                }
            }
        }
        let label = self.label()?;
        let length = if self.peek()? == Some(b':') {
            self.pos += 1;
            Some(self.number()?)
        } else {
            None
        };
        Ok(Parsed { label, length, children })
    }

    fn label(&mut self) -> Result<Option<String>> {
        match self.peek()? {
            Some(b'\'') => {
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.src.get(self.pos) {
                        None => return self.error("unterminated quoted label"),
                        Some(b'\'') if self.src.get(self.pos + 1) == Some(&b'\'') => {
                            out.push(b'\'');
                            self.pos += 2;
                        }
                        Some(b'\'') => {
                            self.pos += 1;
                            break;
                        }
                        Some(&b) => {
                            out.push(b);
                            self.pos += 1;
                        }
                    }
                }
                String::from_utf8(out)
                    .map(Some)
                    .map_err(|_| Error::Parse("newick label is not UTF-8".into()))
            }
            _ => {
                let start = self.pos;
                while let Some(&b) = self.src.get(self.pos) {
                    if b"():;,[]'".contains(&b) || b.is_ascii_whitespace() {
                        break;
                    }
                    self.pos += 1;
                }
                if self.pos == start {
                    return Ok(None);
                }
                let raw = std::str::from_utf8(&self.src[start..self.pos])
                    .map_err(|_| Error::Parse("newick label is not UTF-8".into()))?;
                Ok(Some(raw.replace('_', " ")))
            }
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws()?;
        let start = self.pos;
        while let Some(&b) = self.src.get(self.pos) {
            if b.is_ascii_digit() || b"+-.eE".contains(&b) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => self.error(&format!("bad branch length {text:?}")),
        }
    }
}

/// Parses a Newick string terminated by `;`. Every non-root node needs a
/// branch length, and all leaves must be equidistant from the root within a
/// relative tolerance of 1e-9.
pub fn parse_newick(text: &str) -> Result<UltrametricTree> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let root = p.subtree()?;
    p.expect(b';')?;
    if p.peek()?.is_some() {
        return p.error("trailing input after ';'");
    }

    // Flatten, recording the depth of every node below the root.
    let mut nodes: Vec<Node> = Vec::new();
    let mut depths: Vec<f64> = Vec::new();
    let mut stack: Vec<(&Parsed, f64, Option<NodeId>)> = vec![(&root, 0.0, None)];
    while let Some((parsed, depth, parent)) = stack.pop() {
        let id = nodes.len();
        if let Some(parent) = parent {
            if let Node::Internal { children, .. } = &mut nodes[parent] {
                children.push(id);
            }
        }
        if parsed.children.is_empty() {
            let label = parsed
                .label
                .clone()
                .ok_or_else(|| Error::Parse("newick leaf without a label".into()))?;
            nodes.push(Node::Leaf { label });
        } else {
            if parsed.children.len() == 1 {
                return Err(Error::Parse("newick node with a single child".into()));
            }
            nodes.push(Node::Internal { height: 0.0, children: Vec::new() });
        }
        depths.push(depth);
        for child in parsed.children.iter().rev() {
            let len = child
                .length
                .ok_or_else(|| Error::Parse("newick branch length missing".into()))?;
            if len < 0.0 {
                return Err(Error::Parse(format!("negative newick branch length {len}")));
            }
            stack.push((child, depth + len, Some(id)));
        }
    }
    let leaf_depths: Vec<f64> = nodes
        .iter()
        .zip(&depths)
        .filter(|(n, _)| matches!(n, Node::Leaf { .. }))
        .map(|(_, &d)| d)
        .collect();
    let max_depth = leaf_depths.iter().copied().fold(0.0, f64::max);
    let min_depth = leaf_depths.iter().copied().fold(f64::INFINITY, f64::min);
    if max_depth - min_depth > REL_TOL * max_depth.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "newick tree is not ultrametric: leaf depths range from {min_depth} to {max_depth}"
        )));
    }
    for (node, &depth) in nodes.iter_mut().zip(&depths) {
        if let Node::Internal { height, .. } = node {
            *height = max_depth - depth;
        }
    }
    UltrametricTree::from_parts(nodes, 0, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultrametric::tests::six_taxa_tree;
    use crate::ultrametric::tree_to_metric;

    #[test]
    fn six_taxa_from_newick() {
        let t = parse_newick("((a:3.5,b:3.5):2,(c:4,d:4):1.5,e:5.5,f:5.5);").unwrap();
        assert_eq!(t.leaf_labels(), ["a", "b", "c", "d", "e", "f"]);
        assert_eq!(tree_to_metric(&t), tree_to_metric(&six_taxa_tree()));
    }

    #[test]
    fn single_leaf_and_quoting() {
        let t = parse_newick("x;").unwrap();
        assert_eq!(t.leaf_count(), 1);
        let t = parse_newick("('p q':1, r_s:1)root:0.5 [comment];").unwrap();
        assert_eq!(t.leaf_labels(), ["p q", "r s"]);
        assert_eq!(t.height(t.root()), 1.0);
    }

    #[test]
    fn malformed_input() {
        assert!(parse_newick("(a:1,b:1)").is_err());
        assert!(parse_newick("(a:1,b:1;").is_err());
        assert!(parse_newick("(a,b);").is_err());
        assert!(parse_newick("(a:1,b:x);").is_err());
        assert!(parse_newick("(a:1,b:1); extra").is_err());
        assert!(parse_newick("(a:1):1;").is_err());
        assert!(parse_newick("(a:-1,b:-1);").is_err());
    }

    #[test]
    fn non_ultrametric_and_zero_height() {
        assert!(matches!(
            parse_newick("(a:1,b:2);"),
            Err(Error::InvalidInput(_))
        ));
        // Leaves hanging on zero-length branches give an internal node at height 0.
        assert!(parse_newick("(a:0,b:0);").is_err());
        // Within tolerance.
        assert!(parse_newick("(a:1,b:1.0000000000001);").is_ok());
    }
}
