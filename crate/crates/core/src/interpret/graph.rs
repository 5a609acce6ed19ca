use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::checker::FiniteStructure;
use crate::formula::Signature;

use super::InterpretError;

/// Finite simple undirected graph on vertices `0..n`, with optional labels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adjacency: Vec<BTreeSet<usize>>,
    labels: Vec<BTreeSet<String>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adjacency: vec![BTreeSet::new(); n],
            labels: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InterpretError> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
            .expect("valid clique")
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), InterpretError> {
        let n = self.vertex_count();
        if u >= n || v >= n {
            return Err(InterpretError::InvalidGraph(format!(
                "edge {u}-{v} out of range for {n} vertices"
            )));
        }
        if u == v {
            return Err(InterpretError::InvalidGraph(format!("loop at vertex {u}")));
        }
        if !self.adjacency[u].insert(v) {
            return Err(InterpretError::InvalidGraph(format!(
                "duplicate edge {u}-{v}"
            )));
        }
        self.adjacency[v].insert(u);
        Ok(())
    }

    pub fn add_label(&mut self, v: usize, label: impl Into<String>) -> Result<(), InterpretError> {
        let label = label.into();
        if v >= self.vertex_count() || !crate::formula::is_label_name(&label) {
            return Err(InterpretError::InvalidGraph(format!(
                "bad label `{label}` on vertex {v}"
            )));
        }
        self.labels[v].insert(label);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|a| a.contains(&v))
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, a)| a.range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    pub fn labels(&self, v: usize) -> &BTreeSet<String> {
        &self.labels[v]
    }

    pub fn label_names(&self) -> BTreeSet<String> {
        self.labels.iter().flatten().cloned().collect()
    }

    pub fn signature(&self) -> Signature {
        Signature::graphs(self.label_names()).expect("labels validated on insertion")
    }

    /// Induced subgraph on `vertices` (renumbered in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            g.labels[i] = self.labels[v].clone();
            for w in self.neighbours(v) {
                if index[w] != usize::MAX && index[w] > i {
                    g.add_edge(i, index[w]).expect("simple");
                }
            }
        }
        g
    }

    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbours(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn to_structure(&self) -> FiniteStructure {
        let labels: Vec<Vec<&str>> = self
            .labels
            .iter()
            .map(|l| l.iter().map(String::as_str).collect())
            .collect();
        FiniteStructure::graph(self.signature(), self.vertex_count(), self.edges(), &labels)
            .expect("graph is well formed")
    }

    /// Parses `p <n> <m>`, `e <u> <v>` and `l <v> <NAME>` lines (1-based
    /// vertices). Lines starting with `c` are comments.
    pub fn parse(text: &str) -> Result<Graph, InterpretError> {
        let mut graph: Option<Graph> = None;
        let mut declared_edges = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let err = |message: String| InterpretError::GraphSyntax {
                line: lineno,
                message,
            };
            let Some(&kind) = fields.first() else {
                continue;
            };
            match kind {
                "c" => {}
                "p" => {
                    if graph.is_some() {
                        return Err(err("second `p` line".into()));
                    }
                    if fields.len() != 3 {
                        return Err(err("expected `p <n> <m>`".into()));
                    }
                    let n = parse_nat(fields[1])
                        .ok_or_else(|| err(format!("bad vertex count `{}`", fields[1])))?;
                    declared_edges = parse_nat(fields[2])
                        .ok_or_else(|| err(format!("bad edge count `{}`", fields[2])))?;
                    graph = Some(Graph::new(n));
                }
                "e" | "l" => {
                    let g = graph
                        .as_mut()
                        .ok_or_else(|| err("line before the `p` header".into()))?;
                    if fields.len() != 3 {
                        return Err(err(format!("expected `{kind}` followed by two fields")));
                    }
                    let vertex = |s: &str| -> Result<usize, InterpretError> {
                        match parse_nat(s) {
                            Some(v) if v >= 1 && v <= g.vertex_count() => Ok(v - 1),
                            _ => Err(InterpretError::GraphSyntax {
                                line: lineno,
                                message: format!("bad vertex `{s}`"),
                            }),
                        }
                    };
                    if kind == "e" {
                        let (u, v) = (vertex(fields[1])?, vertex(fields[2])?);
                        g.add_edge(u, v).map_err(|e| err(e.to_string()))?;
                    } else {
                        let v = vertex(fields[1])?;
                        g.add_label(v, fields[2]).map_err(|e| err(e.to_string()))?;
                    }
                }
                other => return Err(err(format!("unknown line type `{other}`"))),
            }
        }
        let g = graph.ok_or(InterpretError::GraphSyntax {
            line: 0,
            message: "missing `p <n> <m>` header".into(),
        })?;
        if g.edge_count() != declared_edges {
            return Err(InterpretError::GraphSyntax {
                line: 0,
                message: format!(
                    "header declares {declared_edges} edges, found {}",
                    g.edge_count()
                ),
            });
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("p {} {}\n", self.vertex_count(), self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        for (v, labels) in self.labels.iter().enumerate() {
            for l in labels {
                let _ = writeln!(out, "l {} {l}", v + 1);
            }
        }
        out
    }
}

pub(crate) fn parse_nat(s: &str) -> Option<usize> {
    s.parse().ok()
}

/// Rooted forest on the vertices of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationForest {
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
}

impl EliminationForest {
    pub fn new(parent: Vec<Option<usize>>) -> Result<Self, InterpretError> {
        let n = parent.len();
        let mut depth = vec![usize::MAX; n];
        for start in 0..n {
            // walk up until a node with known depth, then unwind
            let mut path = Vec::new();
            let mut v = start;
            while depth[v] == usize::MAX {
                if path.len() > n {
                    return Err(InterpretError::ForestCycle(start));
                }
                path.push(v);
                match parent[v] {
                    None => break,
                    Some(p) if p >= n => {
                        return Err(InterpretError::ForestSyntax {
                            line: v + 1,
                            message: format!("parent {} out of range", p + 1),
                        })
                    }
                    Some(p) => v = p,
                }
            }
            let mut d = if depth[v] == usize::MAX {
                // reached a root that was pushed last
                let root = path.pop().expect("non-empty");
                depth[root] = 0;
                0
            } else {
                depth[v]
            };
            while let Some(u) = path.pop() {
                d += 1;
                depth[u] = d;
            }
        }
        Ok(EliminationForest { parent, depth })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    /// Distance from the root of `v`'s tree.
    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Largest depth; 0 for an empty forest.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Number of levels, `height + 1` (0 when empty).
    pub fn levels(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.height() + 1
        }
    }

    /// Whether `u` is a proper ancestor of `v`.
    pub fn is_ancestor(&self, u: usize, v: usize) -> bool {
        let mut w = self.parent[v];
        while let Some(x) = w {
            if x == u {
                return true;
            }
            w = self.parent[x];
        }
        false
    }

    /// Checks that every edge of `g` joins an ancestor-descendant pair.
    pub fn validate_for(&self, g: &Graph) -> Result<(), InterpretError> {
        if self.len() != g.vertex_count() {
            return Err(InterpretError::NotAWitness(format!(
                "forest has {} vertices, graph has {}",
                self.len(),
                g.vertex_count()
            )));
        }
        for (u, v) in g.edges() {
            if !self.is_ancestor(u, v) && !self.is_ancestor(v, u) {
                return Err(InterpretError::NotAWitness(format!(
                    "edge {}-{} is not an ancestor-descendant pair",
                    u + 1,
                    v + 1
                )));
            }
        }
        Ok(())
    }

    /// Parses `v parent-or-0` lines (1-based) for a graph on `n` vertices.
    pub fn parse(text: &str, n: usize) -> Result<Self, InterpretError> {
        let mut parent: Vec<Option<Option<usize>>> = vec![None; n];
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let err = |message: String| InterpretError::ForestSyntax {
                line: lineno,
                message,
            };
            if fields.is_empty() || fields[0] == "c" {
                continue;
            }
            if fields.len() != 2 {
                return Err(err("expected `<vertex> <parent-or-0>`".into()));
            }
            let v = parse_nat(fields[0])
                .filter(|&v| v >= 1 && v <= n)
                .ok_or_else(|| err(format!("bad vertex `{}`", fields[0])))?;
            let p = parse_nat(fields[1])
                .filter(|&p| p <= n)
                .ok_or_else(|| err(format!("bad parent `{}`", fields[1])))?;
            if parent[v - 1].is_some() {
                return Err(err(format!("vertex {v} listed twice")));
            }
            parent[v - 1] = Some(p.checked_sub(1));
        }
        let parent = parent
            .into_iter()
            .enumerate()
            .map(|(v, p)| {
                p.ok_or(InterpretError::ForestSyntax {
                    line: 0,
                    message: format!("vertex {} has no line", v + 1),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        EliminationForest::new(parent)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, p) in self.parent.iter().enumerate() {
            let _ = writeln!(out, "{} {}", v + 1, p.map_or(0, |p| p + 1));
        }
        out
    }
}
