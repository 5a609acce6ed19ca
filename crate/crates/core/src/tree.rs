//! Rooted, unordered, multi-labelled trees and their canonical codes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{is_label_name, Relation, Signature};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown label `{label}` at byte {pos}")]
    UnknownLabel { pos: usize, label: String },
    #[error("multiple roots (second root at byte {pos})")]
    MultipleRoots { pos: usize },
    #[error("empty tree")]
    Empty,
    #[error("parent links contain a cycle through node {0}")]
    Cycle(NodeId),
    #[error("multiple roots: nodes {0} and {1} have no parent")]
    MultipleRootNodes(NodeId, NodeId),
    #[error("node {0} does not exist")]
    NoSuchNode(NodeId),
    #[error("signature relation must be `parent`")]
    NotTreeSignature,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    /// Indices into the signature alphabet, ascending.
    labels: Vec<u32>,
    depth: usize,
    alive: bool,
}

/// Arena-backed rooted tree. Deleted subtrees are tombstoned; node ids of
/// surviving nodes never change until [`LabelledTree::compacted`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledTree {
    signature: Signature,
    nodes: Vec<Node>,
    root: NodeId,
    live: usize,
}

/// Byte string deciding l-isomorphism of rooted subtrees; ordered bytewise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    fn encode<'a>(
        label_names: impl ExactSizeIterator<Item = &'a str>,
        children: &mut [&CanonicalCode],
    ) -> Self {
        children.sort_unstable();
        let mut out = Vec::new();
        out.extend_from_slice(&(label_names.len() as u32).to_be_bytes());
        for name in label_names {
            out.extend_from_slice(&(name.len() as u32).to_be_bytes());
            out.extend_from_slice(name.as_bytes());
        }
        out.extend_from_slice(&(children.len() as u32).to_be_bytes());
        for child in children.iter() {
            out.extend_from_slice(&(child.0.len() as u32).to_be_bytes());
            out.extend_from_slice(&child.0);
        }
        CanonicalCode(out)
    }
}

impl LabelledTree {
    /// Single-node tree.
    pub fn new<S: AsRef<str>>(signature: Signature, root_labels: &[S]) -> Result<Self, TreeError> {
        if signature.relation() != Relation::Parent {
            return Err(TreeError::NotTreeSignature);
        }
        let labels = resolve_labels(&signature, root_labels, 0)?;
        Ok(LabelledTree {
            signature,
            nodes: vec![Node {
                parent: None,
                children: Vec::new(),
                labels,
                depth: 0,
                alive: true,
            }],
            root: 0,
            live: 1,
        })
    }

    pub fn add_child<S: AsRef<str>>(
        &mut self,
        parent: NodeId,
        labels: &[S],
    ) -> Result<NodeId, TreeError> {
        if !self.is_alive(parent) {
            return Err(TreeError::NoSuchNode(parent));
        }
        let labels = resolve_labels(&self.signature, labels, 0)?;
        Ok(self.push_child(parent, labels))
    }

    fn push_child(&mut self, parent: NodeId, labels: Vec<u32>) -> NodeId {
        let id = self.nodes.len();
        let depth = self.nodes[parent].depth + 1;
        self.nodes.push(Node {
            parent: Some(parent),
            children: Vec::new(),
            labels,
            depth,
            alive: true,
        });
        self.nodes[parent].children.push(id);
        self.live += 1;
        id
    }

    /// Builds a tree from a parent array; node `i` keeps id `i`.
    pub fn from_parents<S: AsRef<str>>(
        signature: Signature,
        parents: &[Option<NodeId>],
        labels: &[Vec<S>],
    ) -> Result<Self, TreeError> {
        if signature.relation() != Relation::Parent {
            return Err(TreeError::NotTreeSignature);
        }
        let n = parents.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut root = None;
        for (v, p) in parents.iter().enumerate() {
            match p {
                None => {
                    if let Some(r) = root {
                        return Err(TreeError::MultipleRootNodes(r, v));
                    }
                    root = Some(v);
                }
                Some(p) if *p >= n => return Err(TreeError::NoSuchNode(*p)),
                Some(_) => {}
            }
        }
        let root = match root {
            Some(r) => r,
            // every node has a parent, so following links must loop
            None => return Err(TreeError::Cycle(0)),
        };
        let mut nodes = Vec::with_capacity(n);
        for (v, p) in parents.iter().enumerate() {
            let l = labels.get(v).map(Vec::as_slice).unwrap_or(&[]);
            nodes.push(Node {
                parent: *p,
                children: Vec::new(),
                labels: resolve_labels(&signature, l, 0)?,
                depth: 0,
                alive: true,
            });
        }
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                nodes[*p].children.push(v);
            }
        }
        // BFS from the root; anything unreached sits on a cycle.
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for i in 0..nodes[v].children.len() {
                let c = nodes[v].children[i];
                nodes[c].depth = nodes[v].depth + 1;
                seen[c] = true;
                queue.push_back(c);
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(TreeError::Cycle(v));
        }
        Ok(LabelledTree {
            signature,
            nodes,
            root,
            live: n,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Number of live nodes.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Size of the id space, including tombstones.
    pub fn capacity(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_alive(&self, v: NodeId) -> bool {
        self.nodes.get(v).is_some_and(|n| n.alive)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].alive)
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v].parent
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v].children
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v].children.is_empty()
    }

    pub fn label_indices(&self, v: NodeId) -> &[u32] {
        &self.nodes[v].labels
    }

    pub fn labels(&self, v: NodeId) -> impl Iterator<Item = &str> + '_ {
        self.nodes[v]
            .labels
            .iter()
            .map(|&i| self.signature.labels()[i as usize].as_str())
    }

    pub fn has_label(&self, v: NodeId, label: &str) -> bool {
        match self.signature.label_index(label) {
            Some(i) => self.nodes[v].labels.binary_search(&(i as u32)).is_ok(),
            None => false,
        }
    }

    /// Distance from the root.
    pub fn depth(&self, v: NodeId) -> usize {
        self.nodes[v].depth
    }

    /// Largest root distance over live nodes; 0 for a single node.
    pub fn height(&self) -> usize {
        self.node_ids()
            .map(|v| self.nodes[v].depth)
            .max()
            .unwrap_or(0)
    }

    /// `height - depth(v)`.
    pub fn level(&self, v: NodeId) -> usize {
        self.height() - self.depth(v)
    }

    /// Live nodes in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.live);
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(self.nodes[v].children.iter().copied());
        }
        order
    }

    /// Nodes of the subtree rooted at `v`, including `v`.
    pub fn subtree(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.nodes[out[i]].children.iter().copied());
            i += 1;
        }
        out
    }

    /// Tombstones the subtree rooted at `v` (not the root).
    pub fn remove_subtree(&mut self, v: NodeId) {
        assert!(v != self.root, "cannot remove the root");
        if !self.is_alive(v) {
            return;
        }
        if let Some(p) = self.nodes[v].parent {
            self.nodes[p].children.retain(|&c| c != v);
        }
        for u in self.subtree(v) {
            self.nodes[u].alive = false;
            self.live -= 1;
        }
    }

    /// Copy with live nodes renumbered in BFS order.
    pub fn compacted(&self) -> LabelledTree {
        let order = self.bfs_order();
        let mut new_id = vec![usize::MAX; self.nodes.len()];
        for (i, &v) in order.iter().enumerate() {
            new_id[v] = i;
        }
        let nodes = order
            .iter()
            .map(|&v| {
                let n = &self.nodes[v];
                Node {
                    parent: n.parent.map(|p| new_id[p]),
                    children: n.children.iter().map(|&c| new_id[c]).collect(),
                    labels: n.labels.clone(),
                    depth: n.depth,
                    alive: true,
                }
            })
            .collect();
        LabelledTree {
            signature: self.signature.clone(),
            nodes,
            root: 0,
            live: order.len(),
        }
    }

    /// Copy of a compact tree with node `v` renamed to `perm[v]`. Child
    /// lists are reordered by new id as well.
    pub fn relabelled(&self, perm: &[NodeId]) -> LabelledTree {
        assert_eq!(self.live, self.nodes.len(), "relabel a compacted tree");
        assert_eq!(perm.len(), self.nodes.len());
        let mut nodes = vec![
            Node {
                parent: None,
                children: Vec::new(),
                labels: Vec::new(),
                depth: 0,
                alive: true,
            };
            self.nodes.len()
        ];
        for (v, n) in self.nodes.iter().enumerate() {
            let mut children: Vec<NodeId> = n.children.iter().map(|&c| perm[c]).collect();
            children.sort_unstable();
            nodes[perm[v]] = Node {
                parent: n.parent.map(|p| perm[p]),
                children,
                labels: n.labels.clone(),
                depth: n.depth,
                alive: true,
            };
        }
        LabelledTree {
            signature: self.signature.clone(),
            nodes,
            root: perm[self.root],
            live: self.live,
        }
    }

    /// Same shape and labels over a larger alphabet.
    pub fn with_signature(&self, signature: Signature) -> Result<LabelledTree, TreeError> {
        if signature.relation() != Relation::Parent {
            return Err(TreeError::NotTreeSignature);
        }
        let mut out = self.clone();
        for node in &mut out.nodes {
            let names: Vec<&str> = node
                .labels
                .iter()
                .map(|&i| self.signature.labels()[i as usize].as_str())
                .collect();
            node.labels = resolve_labels(&signature, &names, 0)?;
        }
        out.signature = signature;
        Ok(out)
    }

    /// Canonical code of every live node, indexed by node id.
    pub fn canonical_codes(&self) -> Vec<Option<CanonicalCode>> {
        let mut codes: Vec<Option<CanonicalCode>> = vec![None; self.nodes.len()];
        for &v in self.bfs_order().iter().rev() {
            let code = self.encode_node(v, &codes);
            codes[v] = Some(code);
        }
        codes
    }

    pub(crate) fn encode_node(&self, v: NodeId, codes: &[Option<CanonicalCode>]) -> CanonicalCode {
        let mut children: Vec<&CanonicalCode> = self.nodes[v]
            .children
            .iter()
            .map(|&c| codes[c].as_ref().expect("children are encoded first"))
            .collect();
        let names: Vec<&str> = self.labels(v).collect();
        CanonicalCode::encode(names.into_iter(), &mut children)
    }

    pub fn canonical_code(&self, v: NodeId) -> CanonicalCode {
        let mut codes: Vec<Option<CanonicalCode>> = vec![None; self.nodes.len()];
        let sub = self.subtree(v);
        for &u in sub.iter().rev() {
            codes[u] = Some(self.encode_node(u, &codes));
        }
        codes[v].take().expect("root of subtree encoded")
    }

    /// Children of `v` grouped by the canonical code of their subtree.
    pub fn limb_classes(&self, v: NodeId) -> BTreeMap<CanonicalCode, Vec<NodeId>> {
        let mut classes: BTreeMap<CanonicalCode, Vec<NodeId>> = BTreeMap::new();
        for &c in &self.nodes[v].children {
            classes.entry(self.canonical_code(c)).or_default().push(c);
        }
        for ids in classes.values_mut() {
            ids.sort_unstable();
        }
        classes
    }

    /// S-expression rendering; children are emitted in canonical order so
    /// that l-isomorphic trees print identically.
    pub fn to_sexpr(&self) -> String {
        let codes = self.canonical_codes();
        let mut out = String::new();
        self.write_sexpr(self.root, 0, &codes, &mut out);
        out.push('\n');
        out
    }

    fn write_sexpr(
        &self,
        v: NodeId,
        indent: usize,
        codes: &[Option<CanonicalCode>],
        out: &mut String,
    ) {
        for _ in 0..indent {
            out.push_str("  ");
        }
        let labels: Vec<&str> = self.labels(v).collect();
        let _ = write!(out, "(node [{}]", labels.join(","));
        let mut children = self.nodes[v].children.clone();
        children.sort_by(|a, b| codes[*a].cmp(&codes[*b]).then(a.cmp(b)));
        if children.is_empty() {
            out.push(')');
            return;
        }
        for c in children {
            out.push('\n');
            self.write_sexpr(c, indent + 1, codes, out);
        }
        out.push(')');
    }

    /// Parses the S-expression tree format.
    pub fn parse(text: &str, signature: &Signature) -> Result<LabelledTree, TreeError> {
        let (tree, rest) = parse_prefix(text, signature)?;
        let trailing = skip_ws(text, rest);
        if trailing < text.len() {
            if text[trailing..].starts_with('(') {
                return Err(TreeError::MultipleRoots { pos: trailing });
            }
            return Err(TreeError::Syntax {
                pos: trailing,
                message: "trailing input after the root node".into(),
            });
        }
        Ok(tree)
    }
}

/// Parses one tree at the start of `text`, returning it and the byte offset
/// just past its closing parenthesis.
pub fn parse_prefix(text: &str, signature: &Signature) -> Result<(LabelledTree, usize), TreeError> {
    if signature.relation() != Relation::Parent {
        return Err(TreeError::NotTreeSignature);
    }
    let mut tree: Option<LabelledTree> = None;
    let mut stack: Vec<NodeId> = Vec::new();
    let mut pos = skip_ws(text, 0);
    if pos >= text.len() {
        return Err(TreeError::Empty);
    }
    loop {
        pos = skip_ws(text, pos);
        let rest = &text[pos..];
        if rest.starts_with('(') {
            let (labels, next) = parse_node_head(text, pos, signature)?;
            match (&mut tree, stack.last()) {
                (None, _) => {
                    tree = Some(LabelledTree {
                        signature: signature.clone(),
                        nodes: vec![Node {
                            parent: None,
                            children: Vec::new(),
                            labels,
                            depth: 0,
                            alive: true,
                        }],
                        root: 0,
                        live: 1,
                    });
                    stack.push(0);
                }
                (Some(t), Some(&parent)) => {
                    let id = t.push_child(parent, labels);
                    stack.push(id);
                }
                (Some(_), None) => unreachable!("loop exits when the root closes"),
            }
            pos = next;
        } else if rest.starts_with(')') {
            if stack.pop().is_none() {
                return Err(TreeError::Syntax {
                    pos,
                    message: "unbalanced `)`".into(),
                });
            }
            pos += 1;
            if stack.is_empty() {
                return Ok((tree.expect("root exists"), pos));
            }
        } else if rest.is_empty() {
            return Err(TreeError::Syntax {
                pos,
                message: "unexpected end of input, missing `)`".into(),
            });
        } else {
            return Err(TreeError::Syntax {
                pos,
                message: format!(
                    "expected `(` or `)`, found `{}`",
                    rest.chars().next().unwrap()
                ),
            });
        }
    }
}

fn skip_ws(text: &str, mut pos: usize) -> usize {
    let bytes = text.as_bytes();
    while pos < bytes.len() {
        match bytes[pos] {
            b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
            // line comments
            b';' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            _ => break,
        }
    }
    pos
}

// `( node [a,b]` starting at `pos`; returns label indices and the offset after `]`.
fn parse_node_head(
    text: &str,
    pos: usize,
    signature: &Signature,
) -> Result<(Vec<u32>, usize), TreeError> {
    let mut p = skip_ws(text, pos + 1);
    if !text[p..].starts_with("node") {
        return Err(TreeError::Syntax {
            pos: p,
            message: "expected `node`".into(),
        });
    }
    p = skip_ws(text, p + 4);
    if !text[p..].starts_with('[') {
        return Err(TreeError::Syntax {
            pos: p,
            message: "expected `[`".into(),
        });
    }
    p += 1;
    let mut names: Vec<(usize, &str)> = Vec::new();
    loop {
        p = skip_ws(text, p);
        if text[p..].starts_with(']') {
            if !names.is_empty() {
                return Err(TreeError::Syntax {
                    pos: p,
                    message: "expected a label after `,`".into(),
                });
            }
            p += 1;
            break;
        }
        let start = p;
        while p < text.len() && {
            let b = text.as_bytes()[p];
            b.is_ascii_alphanumeric() || b == b'_'
        } {
            p += 1;
        }
        if start == p {
            return Err(TreeError::Syntax {
                pos: p,
                message: "expected a label name".into(),
            });
        }
        names.push((start, &text[start..p]));
        p = skip_ws(text, p);
        if text[p..].starts_with(',') {
            p += 1;
        } else if text[p..].starts_with(']') {
            p += 1;
            break;
        } else {
            return Err(TreeError::Syntax {
                pos: p,
                message: "expected `,` or `]`".into(),
            });
        }
    }
    let mut labels = Vec::with_capacity(names.len());
    for (at, name) in names {
        let idx = signature
            .label_index(name)
            .ok_or_else(|| TreeError::UnknownLabel {
                pos: at,
                label: name.to_string(),
            })?;
        labels.push(idx as u32);
    }
    labels.sort_unstable();
    labels.dedup();
    Ok((labels, p))
}

fn resolve_labels<S: AsRef<str>>(
    signature: &Signature,
    labels: &[S],
    pos: usize,
) -> Result<Vec<u32>, TreeError> {
    let mut out = Vec::with_capacity(labels.len());
    for l in labels {
        let idx = signature
            .label_index(l.as_ref())
            .ok_or_else(|| TreeError::UnknownLabel {
                pos,
                label: l.as_ref().to_string(),
            })?;
        out.push(idx as u32);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Label names occurring in a tree file, without validating structure.
pub fn scan_labels(text: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut rest = text;
    while let Some(open) = rest.find('[') {
        let Some(close) = rest[open..].find(']') else {
            break;
        };
        for name in rest[open + 1..open + close].split(',') {
            let name = name.trim();
            if is_label_name(name) {
                out.insert(name.to_string());
            }
        }
        rest = &rest[open + close + 1..];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::trees(["a", "b"]).unwrap()
    }

    #[test]
    fn load_single_node() {
        let t = LabelledTree::parse("(node [a])", &sig()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.height(), 0);
        assert_eq!(t.labels(t.root()).collect::<Vec<_>>(), vec!["a"]);
    }

    #[test]
    fn load_root_with_children() {
        let t = LabelledTree::parse("(node [] (node [a]) (node [a]))", &sig()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.height(), 1);
        assert_eq!(t.children(t.root()).len(), 2);
        assert_eq!(t.level(t.root()), 1);
        assert_eq!(t.level(1), 0);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            LabelledTree::parse("(node [a]) (node [b])", &sig()),
            Err(TreeError::MultipleRoots { .. })
        ));
        assert!(matches!(
            LabelledTree::parse("(node [c])", &sig()),
            Err(TreeError::UnknownLabel { pos: 7, .. })
        ));
        assert!(matches!(
            LabelledTree::parse("(node [a]", &sig()),
            Err(TreeError::Syntax { .. })
        ));
        assert!(matches!(
            LabelledTree::parse("(nod [a])", &sig()),
            Err(TreeError::Syntax { .. })
        ));
        assert!(matches!(
            LabelledTree::parse("(node [a,])", &sig()),
            Err(TreeError::Syntax { .. })
        ));
        assert!(matches!(
            LabelledTree::parse("  ", &sig()),
            Err(TreeError::Empty)
        ));
    }

    #[test]
    fn parent_array_errors() {
        let none: Vec<Vec<&str>> = vec![];
        assert!(matches!(
            LabelledTree::from_parents(sig(), &[None, Some(2), Some(1)], &none),
            Err(TreeError::Cycle(_))
        ));
        assert!(matches!(
            LabelledTree::from_parents(sig(), &[None, None], &none),
            Err(TreeError::MultipleRootNodes(0, 1))
        ));
        assert!(matches!(
            LabelledTree::from_parents(sig(), &[Some(1), Some(0)], &none),
            Err(TreeError::Cycle(_))
        ));
        let t = LabelledTree::from_parents(
            sig(),
            &[Some(1), None, Some(0)],
            &[vec!["a"], vec![], vec!["b"]],
        )
        .unwrap();
        assert_eq!(t.root(), 1);
        assert_eq!(t.height(), 2);
        assert_eq!(t.depth(2), 2);
    }

    #[test]
    fn codes_decide_label_isomorphism() {
        let t = LabelledTree::parse(
            "(node [] (node [a]) (node [a]) (node [b] (node [a]) (node [])) (node [b] (node []) (node [a])))",
            &sig(),
        )
        .unwrap();
        assert_eq!(t.canonical_code(1), t.canonical_code(2));
        assert_eq!(t.canonical_code(3), t.canonical_code(6));
        assert_ne!(t.canonical_code(1), t.canonical_code(5));
        assert_ne!(t.canonical_code(4), t.canonical_code(5));
    }

    #[test]
    fn limb_classes_group_children() {
        let star = LabelledTree::parse(
            "(node [] (node []) (node []) (node []) (node []) (node []))",
            &sig(),
        )
        .unwrap();
        let classes = star.limb_classes(star.root());
        assert_eq!(classes.len(), 1);
        assert_eq!(classes.values().next().unwrap().len(), 5);

        let t = LabelledTree::parse("(node [] (node [a]) (node [a]) (node [b]))", &sig()).unwrap();
        let mut sizes: Vec<usize> = t.limb_classes(t.root()).values().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2]);
        assert!(t.limb_classes(1).is_empty());
    }

    #[test]
    fn removal_and_compaction() {
        let mut t =
            LabelledTree::parse("(node [] (node [a] (node [b])) (node []))", &sig()).unwrap();
        t.remove_subtree(1);
        assert_eq!(t.len(), 2);
        assert!(!t.is_alive(2));
        assert_eq!(t.height(), 1);
        let c = t.compacted();
        assert_eq!(c.capacity(), 2);
        assert_eq!(c.canonical_code(0), t.canonical_code(0));
    }

    #[test]
    fn sexpr_round_trip() {
        let text = "(node [a,b] (node [b] (node [])) (node [a]))";
        let t = LabelledTree::parse(text, &sig()).unwrap();
        let back = LabelledTree::parse(&t.to_sexpr(), &sig()).unwrap();
        assert_eq!(back.canonical_code(back.root()), t.canonical_code(t.root()));
        assert_eq!(
            scan_labels(text).into_iter().collect::<Vec<_>>(),
            vec!["a", "b"]
        );
    }

    #[test]
    fn comments_are_skipped() {
        let t = LabelledTree::parse("; star\n(node []\n  (node [a]) ; leaf\n)\n", &sig()).unwrap();
        assert_eq!(t.len(), 2);
    }
}
