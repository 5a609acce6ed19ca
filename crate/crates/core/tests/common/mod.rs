//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treekern::formula::{Formula, Quantifier, Signature, Sort, Var};
use treekern::interpret::Graph;
use treekern::tree::{LabelledTree, NodeId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const LABELS: [&str; 2] = ["a", "b"];

pub fn tree_signature(t: usize) -> Signature {
    Signature::trees(LABELS[..t].iter().copied()).unwrap()
}

fn random_labels(rng: &mut ChaCha8Rng, t: usize) -> Vec<&'static str> {
    LABELS[..t]
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(0.5))
        .collect()
}

/// Shape of a limb: labels of its root and the shapes below it.
#[derive(Clone)]
struct Shape {
    labels: Vec<&'static str>,
    children: Vec<Shape>,
}

/// Children are drawn from a pool of at most three shapes, so siblings are
/// often l-isomorphic.
fn random_shape(rng: &mut ChaCha8Rng, t: usize, height: usize, width: usize) -> Shape {
    let labels = random_labels(rng, t);
    if height == 0 {
        return Shape {
            labels,
            children: Vec::new(),
        };
    }
    let pool: Vec<Shape> = (0..rng.gen_range(1..=3))
        .map(|_| random_shape(rng, t, height - 1, (width / 3).max(2)))
        .collect();
    let n = rng.gen_range(0..=width);
    let children = (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect();
    Shape { labels, children }
}

fn build(tree: &mut LabelledTree, v: NodeId, shape: &Shape, max_nodes: usize) {
    for c in &shape.children {
        if tree.len() >= max_nodes {
            return;
        }
        let id = tree.add_child(v, &c.labels).unwrap();
        build(tree, id, c, max_nodes);
    }
}

/// Random tree of height at most `max_height` with at most `max_nodes` nodes.
pub fn random_tree(
    rng: &mut ChaCha8Rng,
    t: usize,
    max_nodes: usize,
    max_height: usize,
) -> LabelledTree {
    let height = rng.gen_range(0..=max_height);
    let width = rng.gen_range(1..=max_nodes.max(1));
    let shape = random_shape(rng, t, height, width);
    let mut tree = LabelledTree::new(tree_signature(t), &shape.labels).unwrap();
    build(&mut tree, 0, &shape, max_nodes);
    tree
}

/// Star of height 1 or 2 whose leaves are mostly one l-isomorphism class;
/// makes large thresholds fire.
pub fn crowded_tree(rng: &mut ChaCha8Rng, t: usize, max_nodes: usize) -> LabelledTree {
    let sig = tree_signature(t);
    let mut tree = LabelledTree::new(sig, &random_labels(rng, t)).unwrap();
    let parent = if rng.gen_bool(0.5) {
        tree.add_child(0, &random_labels(rng, t)).unwrap()
    } else {
        0
    };
    let leaf = random_labels(rng, t);
    let target = max_nodes - rng.gen_range(0..3);
    while tree.len() < target {
        if rng.gen_bool(0.9) {
            tree.add_child(parent, &leaf).unwrap();
        } else {
            let l = random_labels(rng, t);
            tree.add_child(parent, &l).unwrap();
        }
    }
    tree
}

/// Backtracking l-isomorphism test, independent of canonical codes.
pub fn l_isomorphic(a: &LabelledTree, u: NodeId, b: &LabelledTree, v: NodeId) -> bool {
    let la: Vec<&str> = a.labels(u).collect();
    let lb: Vec<&str> = b.labels(v).collect();
    if la != lb || a.children(u).len() != b.children(v).len() {
        return false;
    }
    let ca = a.children(u);
    let cb = b.children(v);
    let mut used = vec![false; cb.len()];
    fn assign(
        a: &LabelledTree,
        b: &LabelledTree,
        ca: &[NodeId],
        cb: &[NodeId],
        i: usize,
        used: &mut [bool],
    ) -> bool {
        if i == ca.len() {
            return true;
        }
        for j in 0..cb.len() {
            if !used[j] && l_isomorphic(a, ca[i], b, cb[j]) {
                used[j] = true;
                if assign(a, b, ca, cb, i + 1, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    assign(a, b, ca, cb, 0, &mut used)
}

pub fn trees_isomorphic(a: &LabelledTree, b: &LabelledTree) -> bool {
    l_isomorphic(a, a.root(), b, b.root())
}

/// Erdős–Rényi graph.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Number of edges of a longest simple path.
pub fn longest_path(g: &Graph) -> usize {
    fn dfs(g: &Graph, v: usize, seen: &mut Vec<bool>, len: usize, best: &mut usize) {
        *best = (*best).max(len);
        for w in g.neighbours(v).collect::<Vec<_>>() {
            if !seen[w] {
                seen[w] = true;
                dfs(g, w, seen, len + 1, best);
                seen[w] = false;
            }
        }
    }
    let mut best = 0;
    for s in 0..g.vertex_count() {
        let mut seen = vec![false; g.vertex_count()];
        seen[s] = true;
        dfs(g, s, &mut seen, 0, &mut best);
    }
    best
}

/// Exact `(N_i, R_i)` straight from the recurrence, or `None` once a value
/// needs more than `bits` bits.
pub fn oracle_thresholds(
    i: usize,
    q: u64,
    s: u64,
    k: u64,
    bits: u64,
) -> Option<(BigUint, BigUint)> {
    let fits = |x: &BigUint| x.bits() <= bits;
    let two_k = BigUint::one() << k;
    let mut n = &two_k + 1u32;
    for level in 0..=i {
        let mut r = BigUint::from(q);
        for _ in 0..s {
            r *= &n;
            if !fits(&r) {
                return None;
            }
        }
        if level == i {
            return fits(&n).then_some((n, r));
        }
        let base = r + 1u32;
        let mut p = BigUint::one();
        if !base.is_one() {
            if n > BigUint::from(bits) {
                return None;
            }
            let mut e = n.clone();
            while !e.is_zero() {
                p *= &base;
                if !fits(&p) {
                    return None;
                }
                e -= 1u32;
            }
        }
        n = &two_k * p;
        if !fits(&n) {
            return None;
        }
    }
    unreachable!()
}

/// A quantifier prefix: `(quantifier, sort)` pairs, outermost first.
pub type Prefix = Vec<(Quantifier, Sort)>;

/// All prefixes with exactly `q` element and `s` set quantifiers.
pub fn prefixes(q: usize, s: usize) -> Vec<Prefix> {
    let len = q + s;
    let mut out = Vec::new();
    for sorts in 0u32..(1 << len) {
        if sorts.count_ones() as usize != s {
            continue;
        }
        for quants in 0u32..(1 << len) {
            out.push(
                (0..len)
                    .map(|i| {
                        let sort = if sorts >> i & 1 == 1 {
                            Sort::Set
                        } else {
                            Sort::Element
                        };
                        let quant = if quants >> i & 1 == 1 {
                            Quantifier::Forall
                        } else {
                            Quantifier::Exists
                        };
                        (quant, sort)
                    })
                    .collect(),
            );
        }
    }
    out
}

/// Variable names for a prefix: elements `x, y`, sets `X, Y`, in order.
pub fn prefix_vars(prefix: &Prefix) -> Vec<Var> {
    let (mut e, mut s) = (0, 0);
    prefix
        .iter()
        .map(|&(_, sort)| match sort {
            Sort::Element => {
                e += 1;
                Var::element(["x", "y"][e - 1])
            }
            Sort::Set => {
                s += 1;
                Var::set(["X", "Y"][s - 1])
            }
        })
        .collect()
}

pub fn close(prefix: &Prefix, vars: &[Var], matrix: Formula) -> Formula {
    prefix
        .iter()
        .zip(vars)
        .rev()
        .fold(matrix, |body, (&(q, _), v)| {
            Formula::Quant(q, v.clone(), Box::new(body))
        })
}

/// Atomic formulas over the given variables.
pub fn atoms(vars: &[Var], labels: &[&str], relation: treekern::formula::Relation) -> Vec<Formula> {
    let elems: Vec<&str> = vars
        .iter()
        .filter(|v| v.sort == Sort::Element)
        .map(|v| v.name.as_str())
        .collect();
    let sets: Vec<&str> = vars
        .iter()
        .filter(|v| v.sort == Sort::Set)
        .map(|v| v.name.as_str())
        .collect();
    let mut out = Vec::new();
    for &x in &elems {
        for &l in labels {
            out.push(Formula::label(l, x));
        }
        for &x2 in &sets {
            out.push(Formula::member(x, x2));
        }
    }
    for (i, &x) in elems.iter().enumerate() {
        for &y in &elems[i..] {
            out.push(Formula::rel(relation, x, y));
            if x != y {
                out.push(Formula::eq(x, y));
                if relation == treekern::formula::Relation::Parent {
                    out.push(Formula::rel(relation, y, x));
                }
            }
        }
    }
    if out.is_empty() {
        out.push(Formula::True);
    }
    out
}

fn signed(f: &Formula, neg: bool) -> Formula {
    if neg {
        f.clone().not()
    } else {
        f.clone()
    }
}

/// Literals and all two-literal conjunctions and disjunctions of `atoms`.
pub fn matrices(atoms: &[Formula]) -> Vec<Formula> {
    let mut out = Vec::new();
    for a in atoms {
        out.push(a.clone());
        out.push(a.clone().not());
    }
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            for na in [false, true] {
                for nb in [false, true] {
                    out.push(signed(&atoms[i], na).and(signed(&atoms[j], nb)));
                    out.push(signed(&atoms[i], na).or(signed(&atoms[j], nb)));
                }
            }
        }
    }
    out
}

/// The MSO template family: every prefix with `q + s <= 2` closed over every
/// matrix built from its atoms.
pub fn mso_family(t: usize, relation: treekern::formula::Relation) -> Vec<Formula> {
    let mut out = Vec::new();
    for total in 0..=2 {
        for s in 0..=total {
            for prefix in prefixes(total - s, s) {
                let vars = prefix_vars(&prefix);
                for m in matrices(&atoms(&vars, &LABELS[..t], relation)) {
                    out.push(close(&prefix, &vars, m));
                }
            }
        }
    }
    out
}

/// The CMSO template family: prefixes with at least one set quantifier and
/// `q + s <= 2`; the matrix has exactly one `mod[a,b]` atom, `b` in {2, 3}.
pub fn cmso_family(t: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    for (q, s) in [(0, 1), (1, 1), (0, 2)] {
        for prefix in prefixes(q, s) {
            let vars = prefix_vars(&prefix);
            let sets: Vec<&Var> = vars.iter().filter(|v| v.sort == Sort::Set).collect();
            let others = atoms(&vars, &LABELS[..t], treekern::formula::Relation::Parent);
            for set in &sets {
                for b in [2u32, 3] {
                    for a in 0..b {
                        let m = Formula::modulo(a, b, set.name.clone());
                        for nm in [false, true] {
                            out.push(close(&prefix, &vars, signed(&m, nm)));
                            for o in &others {
                                if *o == Formula::True {
                                    continue;
                                }
                                for no in [false, true] {
                                    out.push(close(
                                        &prefix,
                                        &vars,
                                        signed(&m, nm).and(signed(o, no)),
                                    ));
                                    out.push(close(
                                        &prefix,
                                        &vars,
                                        signed(&m, nm).or(signed(o, no)),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
