use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Formula, NameGen, Signature, Var};
use crate::tree::{parse_prefix, scan_labels, LabelledTree, NodeId};

use super::graph::parse_nat;
use super::{Graph, InterpretError, Interpretation, InterpretationKind};

/// Which leaves receive the `P_i_c` labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShrubLabels {
    /// `P_i_c` on `v` iff some leaf of colour `c` at distance `2i` from `v`
    /// is adjacent to `v`.
    #[default]
    Adjacency,
    /// `P_i_c` on `v` iff `S(colour(v), c, 2i)`, whether or not such a leaf
    /// exists.
    Signature,
}

/// A rooted tree with all leaves at depth `d`, leaf colours in `0..m` and a
/// symmetric signature `S(c1, c2, 2i)`. Leaves are the graph's vertices, in
/// ascending node-id order; two leaves are adjacent iff `S` holds for their
/// colours and distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeModel {
    tree: LabelledTree,
    depth: usize,
    colours: usize,
    leaves: Vec<NodeId>,
    colour: BTreeMap<NodeId, usize>,
    /// `(c1, c2, i)` with `S(c1, c2, 2i)` true; stored in both colour orders.
    adjacent: BTreeSet<(usize, usize, usize)>,
}

fn colour_of_label(label: &str) -> Option<usize> {
    let digits = label.strip_prefix("c_")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn invalid<T>(message: impl Into<String>) -> Result<T, InterpretError> {
    Err(InterpretError::TreeModel(message.into()))
}

impl TreeModel {
    /// `tree` carries leaf colours as labels `c_<k>`; `entries` lists
    /// `(c1, c2, distance, value)` and unlisted entries are false.
    pub fn new(
        tree: &LabelledTree,
        colours: usize,
        entries: impl IntoIterator<Item = (usize, usize, usize, bool)>,
    ) -> Result<Self, InterpretError> {
        let tree = tree.compacted();
        let depth = tree.height();
        let mut leaves = Vec::new();
        let mut colour = BTreeMap::new();
        for v in tree.node_ids() {
            let found: Vec<usize> = tree.labels(v).filter_map(colour_of_label).collect();
            if !tree.is_leaf(v) {
                if !found.is_empty() {
                    return invalid(format!("inner node {v} has a colour label"));
                }
                continue;
            }
            if tree.depth(v) != depth {
                return invalid(format!(
                    "leaf {v} at depth {}, expected {depth}",
                    tree.depth(v)
                ));
            }
            match found.as_slice() {
                [c] if *c < colours => {
                    colour.insert(v, *c);
                }
                [c] => return invalid(format!("leaf {v} has colour {c}, only {colours} colours")),
                [] => return invalid(format!("leaf {v} has no colour")),
                _ => return invalid(format!("leaf {v} has several colours")),
            }
            leaves.push(v);
        }
        let mut table: BTreeMap<(usize, usize, usize), bool> = BTreeMap::new();
        for (c1, c2, dist, value) in entries {
            if c1 >= colours || c2 >= colours {
                return invalid(format!("signature entry uses colour outside 0..{colours}"));
            }
            if dist % 2 != 0 || dist < 2 || dist > 2 * depth {
                return invalid(format!(
                    "signature distance {dist} is not even in 2..={}",
                    2 * depth
                ));
            }
            for key in [(c1, c2, dist / 2), (c2, c1, dist / 2)] {
                if let Some(&old) = table.get(&key) {
                    if old != value {
                        return invalid(format!(
                            "signature is not symmetric at ({c1}, {c2}, {dist})"
                        ));
                    }
                }
                table.insert(key, value);
            }
        }
        let adjacent = table
            .into_iter()
            .filter(|&(_, v)| v)
            .map(|(k, _)| k)
            .collect();
        Ok(TreeModel {
            tree,
            depth,
            colours,
            leaves,
            colour,
            adjacent,
        })
    }

    /// Parses a tree in S-expression form followed by `s c1 c2 dist 0|1`
    /// lines. Colours may be written `k` or `c_k`; the number of colours is
    /// one more than the largest mentioned.
    pub fn parse(text: &str) -> Result<Self, InterpretError> {
        let signature = Signature::trees(scan_labels(text))?;
        let (tree, offset) = parse_prefix(text, &signature)?;
        let mut entries = Vec::new();
        let mut colours = tree
            .node_ids()
            .flat_map(|v| {
                tree.labels(v)
                    .filter_map(colour_of_label)
                    .collect::<Vec<_>>()
            })
            .max()
            .map_or(1, |c| c + 1);
        let line_base = text[..offset].lines().count();
        for (i, line) in text[offset..].lines().enumerate() {
            let line = line.split(';').next().unwrap_or("");
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let err = |m: &str| InterpretError::TreeModel(format!("line {}: {m}", line_base + i));
            if fields[0] != "s" || fields.len() != 5 {
                return Err(err("expected `s <c1> <c2> <dist> 0|1`"));
            }
            let col = |s: &str| {
                parse_nat(s)
                    .or_else(|| colour_of_label(s))
                    .ok_or_else(|| err("bad colour"))
            };
            let (c1, c2) = (col(fields[1])?, col(fields[2])?);
            let dist = parse_nat(fields[3]).ok_or_else(|| err("bad distance"))?;
            let value = match fields[4] {
                "0" => false,
                "1" => true,
                _ => return Err(err("value must be 0 or 1")),
            };
            colours = colours.max(c1 + 1).max(c2 + 1);
            entries.push((c1, c2, dist, value));
        }
        TreeModel::new(&tree, colours, entries)
    }

    pub fn tree(&self) -> &LabelledTree {
        &self.tree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn colours(&self) -> usize {
        self.colours
    }

    /// Leaves in vertex order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn colour(&self, leaf: NodeId) -> Option<usize> {
        self.colour.get(&leaf).copied()
    }

    /// `S(c1, c2, dist)`.
    pub fn signature_holds(&self, c1: usize, c2: usize, dist: usize) -> bool {
        dist.is_multiple_of(2) && self.adjacent.contains(&(c1, c2, dist / 2))
    }

    /// Tree distance between two leaves.
    pub fn leaf_distance(&self, u: NodeId, v: NodeId) -> usize {
        let (mut a, mut b, mut up) = (u, v, 0);
        while a != b {
            a = self.tree.parent(a).expect("leaves share a root");
            b = self.tree.parent(b).expect("leaves share a root");
            up += 1;
        }
        2 * up
    }

    /// Non-colour labels of a leaf.
    fn vertex_labels(&self, leaf: NodeId) -> Vec<String> {
        self.tree
            .labels(leaf)
            .filter(|l| colour_of_label(l).is_none())
            .map(str::to_string)
            .collect()
    }

    pub fn represented_graph(&self) -> Graph {
        let mut g = Graph::new(self.leaves.len());
        for (i, &u) in self.leaves.iter().enumerate() {
            for l in self.vertex_labels(u) {
                g.add_label(i, l).expect("valid label");
            }
            for (j, &v) in self.leaves.iter().enumerate().skip(i + 1) {
                if self.signature_holds(self.colour[&u], self.colour[&v], self.leaf_distance(u, v))
                {
                    g.add_edge(i, j).expect("simple");
                }
            }
        }
        g
    }
}

fn colour_label(c: usize) -> String {
    format!("C_{c}")
}

fn pair_label(i: usize, c: usize) -> String {
    format!("P_{i}_{c}")
}

fn is_reserved(label: &str) -> bool {
    let numeric = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if let Some(rest) = label.strip_prefix("C_") {
        return numeric(rest);
    }
    if let Some(rest) = label.strip_prefix("P_") {
        return rest
            .split_once('_')
            .is_some_and(|(a, b)| numeric(a) && numeric(b));
    }
    false
}

/// `a` and `b` have a common ancestor `steps` levels up.
fn same_ancestor(a: &str, b: &str, steps: usize, names: &mut NameGen) -> Formula {
    if steps == 0 {
        return Formula::eq(a, b);
    }
    let pa = names.fresh("a");
    let pb = names.fresh("b");
    let rest = same_ancestor(&pa, &pb, steps - 1, names);
    Formula::exists(
        Var::element(pa.clone()),
        Formula::parent(pa.clone(), a).and(Formula::exists(
            Var::element(pb.clone()),
            Formula::parent(pb, b).and(rest),
        )),
    )
}

/// Encodes the model's graph in its own tree: colour `c` becomes `C_c` and
/// leaves get `P_i_c` labels per `mode`. `η(x, y)` says that for the height
/// `i` of the lowest common ancestor, `x` carries `P_i_colour(y)`.
pub fn shrub_interpret(
    model: &TreeModel,
    mode: ShrubLabels,
) -> Result<(LabelledTree, Interpretation), InterpretError> {
    let (d, m) = (model.depth, model.colours);
    let own: BTreeSet<String> = model
        .tree
        .node_ids()
        .flat_map(|v| model.vertex_labels(v))
        .collect();
    if let Some(clash) = own.iter().find(|l| is_reserved(l)) {
        return Err(InterpretError::ReservedLabel(clash.clone()));
    }
    let added: Vec<String> = (0..m)
        .map(colour_label)
        .chain((1..=d).flat_map(|i| (0..m).map(move |c| pair_label(i, c))))
        .collect();
    let signature = Signature::trees(own.iter().chain(&added))?;

    let tree = &model.tree;
    let parents: Vec<Option<NodeId>> = tree.node_ids().map(|v| tree.parent(v)).collect();
    let mut labels: Vec<Vec<String>> = tree.node_ids().map(|v| model.vertex_labels(v)).collect();
    for &v in &model.leaves {
        let cv = model.colour[&v];
        let mut extra = BTreeSet::new();
        match mode {
            ShrubLabels::Adjacency => {
                for &u in &model.leaves {
                    let dist = model.leaf_distance(u, v);
                    let cu = model.colour[&u];
                    if u != v && model.signature_holds(cv, cu, dist) {
                        extra.insert(pair_label(dist / 2, cu));
                    }
                }
            }
            ShrubLabels::Signature => {
                for i in 1..=d {
                    for c in 0..m {
                        if model.signature_holds(cv, c, 2 * i) {
                            extra.insert(pair_label(i, c));
                        }
                    }
                }
            }
        }
        labels[v].push(colour_label(cv));
        labels[v].extend(extra);
    }
    let t1 = LabelledTree::from_parents(signature, &parents, &labels)?;

    let (x, y) = (Interpretation::X, Interpretation::Y);
    let mut names = NameGen::new([x.to_string(), y.to_string()]);
    let child = names.fresh("z");
    let domain = Formula::exists(Var::element(child.clone()), Formula::parent(x, child)).not();
    let by_height = (1..=d).map(|i| {
        let lca =
            same_ancestor(x, y, i, &mut names).and(same_ancestor(x, y, i - 1, &mut names).not());
        let pairs =
            Formula::disjunction((0..m).map(|c| {
                Formula::label(colour_label(c), y).and(Formula::label(pair_label(i, c), x))
            }));
        lca.and(pairs)
    });
    let edge = Formula::eq(x, y)
        .not()
        .and(Formula::disjunction(by_height.collect::<Vec<_>>()));
    Ok((
        t1,
        Interpretation::new(InterpretationKind::Shrub, domain, edge, added),
    ))
}
