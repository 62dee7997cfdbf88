//! Newick dendrograms. Branch lengths are merge-height differences, so a
//! leaf's depth below the root equals the root's merge height.

use std::path::Path;

use geoflow_core::cluster::{ClusterTree, Node};

use crate::error::{GeoflowError, Result};

/// Parsed Newick tree.
#[derive(Debug, Clone, PartialEq)]
pub struct NewickNode {
    pub name: Option<String>,
    pub length: Option<f64>,
    pub children: Vec<NewickNode>,
}

impl NewickNode {
    pub fn leaf_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        if self.children.is_empty() {
            out.extend(self.name.as_deref());
        }
        for c in &self.children {
            c.collect_leaves(out);
        }
    }

    /// Heights above the leaves, recovered by summing branch lengths from
    /// the deepest leaf, for each internal node in pre-order.
    pub fn internal_heights(&self) -> Vec<f64> {
        fn walk(n: &NewickNode, out: &mut Vec<f64>) -> f64 {
            if n.children.is_empty() {
                return 0.0;
            }
            let slot = out.len();
            out.push(0.0);
            let h = n
                .children
                .iter()
                .map(|c| walk(c, out) + c.length.unwrap_or(0.0))
                .fold(0.0, f64::max);
            out[slot] = h;
            h
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

/// Converts a cluster tree to its Newick node form.
pub fn tree_to_newick(tree: &ClusterTree) -> Option<NewickNode> {
    fn build(tree: &ClusterTree, node: Node, parent_height: Option<f64>) -> NewickNode {
        let height = tree.height(node);
        let length = parent_height.map(|p| p - height);
        match node {
            Node::Leaf(i) => NewickNode {
                name: Some(tree.leaves[i].clone()),
                length,
                children: Vec::new(),
            },
            Node::Merge(m) => {
                let merge = &tree.merges[m];
                NewickNode {
                    name: None,
                    length,
                    children: vec![build(tree, merge.left, Some(height)), build(tree, merge.right, Some(height))],
                }
            }
        }
    }
    tree.root().map(|root| build(tree, root, None))
}

fn write_label(name: &str, out: &mut String) {
    let plain = !name.is_empty()
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !"()[]':;,".contains(c));
    if plain {
        out.push_str(name);
    } else {
        out.push('\'');
        out.push_str(&name.replace('\'', "''"));
        out.push('\'');
    }
}

fn write_node(node: &NewickNode, out: &mut String) {
    if !node.children.is_empty() {
        out.push('(');
        for (i, c) in node.children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_node(c, out);
        }
        out.push(')');
    }
    if let Some(name) = &node.name {
        write_label(name, out);
    }
    if let Some(len) = node.length {
        out.push(':');
        out.push_str(&len.to_string());
    }
}

pub fn write_newick(node: &NewickNode) -> String {
    let mut out = String::new();
    write_node(node, &mut out);
    out.push_str(";\n");
    out
}

/// Newick text for a cluster tree; a tree without leaves gives `;`.
pub fn to_newick(tree: &ClusterTree) -> String {
    tree_to_newick(tree).map_or_else(|| ";\n".to_string(), |n| write_newick(&n))
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    path: &'a Path,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> GeoflowError {
        let line = self.chars[..self.pos.min(self.chars.len())]
            .iter()
            .filter(|&&c| c == '\n')
            .count() as u64
            + 1;
        GeoflowError::parse(self.path, line, msg)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn label(&mut self) -> Result<Option<String>> {
        match self.peek() {
            Some('\'') => {
                self.pos += 1;
                let mut s = String::new();
                loop {
                    match self.chars.get(self.pos) {
                        Some('\'') if self.chars.get(self.pos + 1) == Some(&'\'') => {
                            s.push('\'');
                            self.pos += 2;
                        }
                        Some('\'') => {
                            self.pos += 1;
                            return Ok(Some(s));
                        }
                        Some(&c) => {
                            s.push(c);
                            self.pos += 1;
                        }
                        None => return Err(self.err("unterminated quoted label")),
                    }
                }
            }
            _ => {
                let start = self.pos;
                while self
                    .chars
                    .get(self.pos)
                    .is_some_and(|&c| !c.is_whitespace() && !"()[]':;,".contains(c))
                {
                    self.pos += 1;
                }
                Ok((self.pos > start).then(|| self.chars[start..self.pos].iter().collect()))
            }
        }
    }

    fn node(&mut self) -> Result<NewickNode> {
        let mut children = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                children.push(self.node()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected `,` or `)`")),
                }
            }
        }
        let name = self.label()?;
        let length = if self.peek() == Some(':') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self
                .chars
                .get(self.pos)
                .is_some_and(|&c| c.is_ascii_alphanumeric() || "+-.".contains(c))
            {
                self.pos += 1;
            }
            let text: String = self.chars[start..self.pos].iter().collect();
            Some(text.parse().map_err(|_| self.err(format!("bad branch length `{text}`")))?)
        } else {
            None
        };
        Ok(NewickNode { name, length, children })
    }
}

/// Parses one Newick tree. Returns `None` for the empty tree `;`.
pub fn parse_newick(text: &str, path: &Path) -> Result<Option<NewickNode>> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        path,
    };
    if p.peek() == Some(';') {
        return Ok(None);
    }
    let node = p.node()?;
    if p.peek() != Some(';') {
        return Err(p.err("expected `;`"));
    }
    p.pos += 1;
    if p.peek().is_some() {
        return Err(p.err("trailing input after `;`"));
    }
    Ok(Some(node))
}
