//! Acceptance suite: one PASS/FAIL line per criterion. Runs as a plain
//! binary (`harness = false`) so the report is always printed.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;
use treekern::checker::{
    check_with_kernel, eval, model_check, Assignment, Budget, FiniteStructure, KernelOptions,
};
use treekern::formula::{parse_sentence, Formula, Relation, Signature};
use treekern::interpret::{
    check_graph, shrub_interpret, tree_depth_exact, EliminationForest, FrontEnd, Graph,
    ShrubLabels, TreeModel,
};
use treekern::kernelize::{
    exact_thresholds, kernel_size_bound, reduce, threshold_n, threshold_r, tower, ThresholdFn,
    DEFAULT_BIT_BUDGET,
};
use treekern::tree::{CanonicalCode, LabelledTree, NodeId};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Kernel produced by the MSO soundness harness.
struct KernelRecord {
    height: usize,
    t: usize,
    q: usize,
    s: usize,
    size: usize,
}

fn harness_budget() -> Budget {
    Budget {
        max_set_domain: 20,
        ..Budget::default()
    }
}

/// Tree size limit per quantifier class, keeping brute force on the
/// unreduced tree feasible.
fn tree_for(
    rng: &mut rand_chacha::ChaCha8Rng,
    t: usize,
    q: usize,
    s: usize,
    crowd_limit: usize,
) -> LabelledTree {
    let limit = match (q, s) {
        (_, 0) => 40,
        (0, 2) => 10,
        _ => 12,
    };
    if rng.gen_bool(0.35) {
        let crowd = match s {
            0 => 40,
            1 => crowd_limit,
            _ => 10,
        };
        crowded_tree(rng, t, crowd)
    } else {
        random_tree(rng, t, limit, 2)
    }
}

fn c1_mso_soundness(records: &mut Vec<KernelRecord>) -> Outcome {
    let mut rng = rng(1);
    let families: Vec<(usize, Vec<Formula>)> = (0..=2)
        .map(|t| (t, mso_family(t, Relation::Parent)))
        .collect();
    let family_size: usize = families.iter().map(|(_, f)| f.len()).sum();
    let reps = 10_000usize.div_ceil(family_size);
    let budget = harness_budget();
    let options = KernelOptions {
        budget,
        ..KernelOptions::default()
    };
    let (mut pairs, mut fired, mut bad) = (0usize, 0usize, Vec::new());
    for (t, family) in &families {
        for phi in family {
            let (q, s) = phi.quantifier_counts();
            for _ in 0..reps {
                // only t = 0 lets R_0(1,1,4) = 17 fire within the set budget
                let crowd = if *t == 0 { 20 } else { 12 };
                let tree = tree_for(&mut rng, *t, q, s, crowd);
                let direct = model_check(&FiniteStructure::from_tree(&tree), phi, &budget);
                let kernel = check_with_kernel(&tree, phi, &options);
                pairs += 1;
                match (direct, kernel) {
                    (Ok(d), Ok(k)) => {
                        if k.report.kernel_size < k.report.original_size {
                            fired += 1;
                        }
                        records.push(KernelRecord {
                            height: tree.height(),
                            t: *t,
                            q: k.q,
                            s: k.s,
                            size: k.report.kernel_size,
                        });
                        if d != k.verdict {
                            bad.push(format!("{phi} on {}", tree.to_sexpr().trim()));
                        }
                    }
                    (d, k) => bad.push(format!("{phi}: {d:?} / {:?}", k.map(|k| k.verdict))),
                }
            }
        }
    }
    if let Some(first) = bad.first() {
        eprintln!("  first disagreement: {first}");
    }
    Outcome::new(
        pairs >= 10_000 && bad.is_empty(),
        format!(
            "{pairs} pairs ({family_size} template sentences), {} disagreements, reduction fired on {fired}",
            bad.len()
        ),
    )
}

fn c2_cmso_soundness() -> Outcome {
    let mut rng = rng(2);
    let families: Vec<(usize, Vec<Formula>)> = (0..=1).map(|t| (t, cmso_family(t))).collect();
    let family_size: usize = families.iter().map(|(_, f)| f.len()).sum();
    let reps = 2_000usize.div_ceil(family_size).max(2);
    let budget = harness_budget();
    let options = KernelOptions {
        budget,
        ..KernelOptions::default()
    };
    let (mut pairs, mut fired, mut bad) = (0usize, 0usize, Vec::new());
    for (t, family) in &families {
        for phi in family {
            let (q, s) = phi.quantifier_counts();
            // only (0, 1) thresholds are small enough to fire within the set budget
            let firing = (q, s) == (0, 1);
            for _ in 0..if firing { 12 * reps } else { reps } {
                let tree = if firing {
                    crowded_tree(&mut rng, *t, 20)
                } else {
                    tree_for(&mut rng, *t, q, s, 12)
                };
                let direct = model_check(&FiniteStructure::from_tree(&tree), phi, &budget);
                let kernel = check_with_kernel(&tree, phi, &options);
                pairs += 1;
                match (direct, kernel) {
                    (Ok(d), Ok(k)) => {
                        if k.report.kernel_size < k.report.original_size {
                            fired += 1;
                        }
                        let residues_kept = tree.len() % k.modulus as usize
                            == k.report.kernel_size % k.modulus as usize
                            || k.report
                                .limbs_deleted_per_level
                                .values()
                                .all(|&c| c % k.modulus as usize == 0);
                        if d != k.verdict || !residues_kept {
                            bad.push(format!("{phi} on {}", tree.to_sexpr().trim()));
                        }
                    }
                    (d, k) => bad.push(format!("{phi}: {d:?} / {:?}", k.map(|k| k.verdict))),
                }
            }
        }
    }
    if let Some(first) = bad.first() {
        eprintln!("  first disagreement: {first}");
    }
    Outcome::new(
        pairs >= 2_000 && bad.is_empty(),
        format!(
            "{pairs} pairs ({family_size} template sentences), {} disagreements, M-tuple reduction fired on {fired}",
            bad.len()
        ),
    )
}

fn c3_threshold_values() -> Outcome {
    let mut failures = Vec::new();
    let big = |x: u64| BigUint::from(x);
    let cap = big(1_000_000);
    for q in 0..=2 {
        for s in 0..=2 {
            if threshold_n(0, q, s, 5, &cap).exact_u64() != Some(33) {
                failures.push(format!("N_0({q},{s},5) != 33"));
            }
        }
    }
    if threshold_r(0, 1, 1, 5, &cap).exact_u64() != Some(33) {
        failures.push("R_0(1,1,5) != 33".into());
    }
    if threshold_r(0, 2, 2, 1, &cap).exact_u64() != Some(18) {
        failures.push("R_0(2,2,1) != 18".into());
    }
    if tower(2, &big(3), DEFAULT_BIT_BUDGET).ok() != Some(big(256)) {
        failures.push("tower(2,3) != 256".into());
    }
    let mut compared = 0;
    for i in 0..=1 {
        for q in 0..=2u64 {
            for s in 0..=2u64 {
                for k in 0..=6u64 {
                    let Some((n, r)) = oracle_thresholds(i, q, s, k, 256) else {
                        continue;
                    };
                    match exact_thresholds(i, q, s, k, 256) {
                        Ok((en, er)) if en == n && er == r => {}
                        other => failures.push(format!("exact ({i},{q},{s},{k}): {other:?}")),
                    }
                    let caps = [
                        big(1),
                        big(2),
                        big(17),
                        big(33),
                        big(1000),
                        big(1_000_000),
                        BigUint::one() << 64,
                        BigUint::one() << 200,
                        (BigUint::one() << 256) + 1u32,
                        n.clone(),
                        &n + 1u32,
                        r.clone().max(big(1)),
                        &r + 1u32,
                    ];
                    for cap in &caps {
                        let got_n = threshold_n(i, q, s, k, cap);
                        let got_r = threshold_r(i, q, s, k, cap);
                        let ok_n = *got_n.value() == n.clone().min(cap.clone())
                            && got_n.is_saturated() == (n > *cap);
                        let ok_r = *got_r.value() == r.clone().min(cap.clone())
                            && got_r.is_saturated() == (r > *cap);
                        compared += 1;
                        if !ok_n || !ok_r {
                            failures.push(format!("capped ({i},{q},{s},{k}) at cap {cap}"));
                        }
                    }
                }
            }
        }
    }
    if let Some(f) = failures.first() {
        eprintln!("  first failure: {f}");
    }
    Outcome::new(
        failures.is_empty() && compared > 0,
        format!(
            "N_0(.,.,5)=33, R_0(1,1,5)=33, R_0(2,2,1)=18, tower(2,3)=256; {compared} capped/exact comparisons, {} failures",
            failures.len()
        ),
    )
}

fn c4_size_bound(records: &[KernelRecord]) -> Outcome {
    let mut checked = 0;
    let mut violations = 0;
    for r in records.iter().filter(|r| r.height == 1) {
        let bound = kernel_size_bound(1, r.t as u64, r.q as u64, r.s as u64, DEFAULT_BIT_BUDGET)
            .expect("fits at h = 1");
        checked += 1;
        if BigUint::from(r.size) > bound {
            violations += 1;
        }
    }
    Outcome::new(
        violations == 0 && checked > 0,
        format!("{checked} height-1 kernels from criterion 1, {violations} above tow_1((2^6-12)(t+q+s)(q+s))"),
    )
}

/// Minimum number of levels over all rooted forests whose closure contains
/// the graph, by enumerating parent arrays.
fn tree_depth_by_forests(g: &Graph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    let mut best = n;
    let mut parent = vec![0usize; n]; // value n means root
    'outer: loop {
        let parents: Vec<Option<usize>> = parent.iter().map(|&p| (p < n).then_some(p)).collect();
        if parents.iter().enumerate().all(|(v, p)| *p != Some(v)) {
            if let Ok(f) = EliminationForest::new(parents) {
                if f.levels() < best && f.validate_for(g).is_ok() {
                    best = f.levels();
                }
            }
        }
        for slot in parent.iter_mut() {
            *slot += 1;
            if *slot <= n {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    best
}

fn c5_tree_depth() -> Outcome {
    let mut failures = Vec::new();
    let td = |g: &Graph| tree_depth_exact(g).map(|(d, _)| d).unwrap();
    if td(&Graph::path(15)) != 4 {
        failures.push("td(P15) != 4".to_string());
    }
    for n in 1..=6 {
        if td(&Graph::complete(n)) != n {
            failures.push(format!("td(K{n}) != {n}"));
        }
    }
    if td(&Graph::new(1)) != 1 {
        failures.push("td(K1) != 1".into());
    }
    let mut rng = rng(5);
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let p = rng.gen_range(0.1..0.6);
        let g = random_graph(&mut rng, n, p);
        let (d, forest) = tree_depth_exact(&g).unwrap();
        let l = longest_path(&g);
        let lower = (usize::BITS - (l + 1).leading_zeros()) as usize; // ceil(log2(l + 2))
        if forest.validate_for(&g).is_err() || forest.levels() != d {
            failures.push(format!("bad witness on {:?}", g.edges()));
        }
        if d < lower || d > l + 1 {
            failures.push(format!(
                "sandwich {lower} <= {d} <= {} fails on {:?}",
                l + 1,
                g.edges()
            ));
        }
    }
    let mut oracle_checked = 0;
    for _ in 0..60 {
        let n = rng.gen_range(1..=6);
        let p = rng.gen_range(0.2..0.8);
        let g = random_graph(&mut rng, n, p);
        oracle_checked += 1;
        if td(&g) != tree_depth_by_forests(&g) {
            failures.push(format!("forest enumeration disagrees on {:?}", g.edges()));
        }
    }
    if let Some(f) = failures.first() {
        eprintln!("  first failure: {f}");
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "td(P15)=4, td(Kn)=n for n<=6, td(K1)=1; sandwich on 200 random graphs; {oracle_checked} graphs against forest enumeration; {} failures",
            failures.len()
        ),
    )
}

/// DFS forest: every edge joins an ancestor and a descendant.
fn dfs_forest(g: &Graph, rng: &mut rand_chacha::ChaCha8Rng) -> EliminationForest {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    fn visit(g: &Graph, v: usize, seen: &mut [bool], parent: &mut [Option<usize>]) {
        seen[v] = true;
        for w in g.neighbours(v).collect::<Vec<_>>() {
            if !seen[w] {
                parent[w] = Some(v);
                visit(g, w, seen, parent);
            }
        }
    }
    for s in order {
        if !seen[s] {
            visit(g, s, &mut seen, &mut parent);
        }
    }
    EliminationForest::new(parent).unwrap()
}

fn c6_interpretation() -> Outcome {
    let sig = Signature::graphs(["a"]).unwrap();
    let family = mso_family(1, Relation::Edge);
    let options = KernelOptions::default();
    let budget = Budget::default();
    let mut failures = Vec::new();
    let mut checks = 0;

    let two = "ES R. A x. A y. edge(x,y) -> !((in(x,R) & in(y,R)) | (!in(x,R) & !in(y,R)))";
    let three = "ES R. ES G. A x. A y. edge(x,y) -> \
        !((in(x,R) & in(y,R)) | (in(x,G) & in(y,G)) | (!in(x,R) & !in(x,G) & !in(y,R) & !in(y,G)))";
    let cases = [
        (4, two, true),
        (4, three, true),
        (5, two, false),
        (5, three, true),
    ];
    for (n, text, want) in cases {
        let g = Graph::cycle(n);
        let phi = parse_sentence(text, &sig).unwrap();
        let direct = model_check(&g.to_structure().clone(), &phi, &budget).unwrap();
        let via = check_graph(&g, &phi, FrontEnd::TreeDepth, &options)
            .unwrap()
            .verdict;
        checks += 1;
        if direct != want || via != want {
            failures.push(format!(
                "C{n} {text}: direct {direct}, interpreted {via}, expected {want}"
            ));
        }
    }

    let mut rng = rng(6);
    for _ in 0..500 {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(0.15..0.7);
        let mut g = random_graph(&mut rng, n, p);
        for v in 0..n {
            if rng.gen_bool(0.3) {
                g.add_label(v, "a").unwrap();
            }
        }
        // the structure must know label `a` even when no vertex carries it
        let structure = FiniteStructure::graph(
            sig.clone(),
            n,
            g.edges(),
            &(0..n)
                .map(|v| g.labels(v).iter().cloned().collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let forest = dfs_forest(&g, &mut rng);
        for _ in 0..4 {
            let phi = family.choose(&mut rng).unwrap();
            let direct = model_check(&structure, phi, &budget).unwrap();
            for front in [FrontEnd::TreeDepth, FrontEnd::TreeDepthWithForest(&forest)] {
                checks += 1;
                match check_graph(&g, phi, front, &options) {
                    Ok(r) if r.verdict == direct => {}
                    other => failures.push(format!(
                        "{phi} on {:?}: direct {direct}, interpreted {:?}",
                        g.edges(),
                        other.map(|r| r.verdict)
                    )),
                }
            }
        }
    }
    if let Some(f) = failures.first() {
        eprintln!("  first failure: {f}");
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{checks} graph/sentence checks on 500 random graphs plus C4/C5 colourability, {} disagreements",
            failures.len()
        ),
    )
}

/// Parent arrays with `parent[i] < i` reach every rooted unordered tree.
fn recursive_parent_arrays(n: usize) -> Vec<Vec<Option<NodeId>>> {
    let mut out = vec![vec![None]];
    for i in 1..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..i).map(move |parent| {
                    let mut q = p.clone();
                    q.push(Some(parent));
                    q
                })
            })
            .collect();
    }
    out
}

fn c7_canonical_codes() -> Outcome {
    let sig = tree_signature(2);
    let label_sets: [&[&str]; 4] = [&[], &["a"], &["b"], &["a", "b"]];
    let mut reps: HashMap<CanonicalCode, LabelledTree> = HashMap::new();
    let (mut instances, mut failures) = (0usize, Vec::new());
    for n in 1..=6 {
        for parents in recursive_parent_arrays(n) {
            for mask in 0..4usize.pow(n as u32) {
                let labels: Vec<Vec<&str>> = (0..n)
                    .map(|v| label_sets[mask / 4usize.pow(v as u32) % 4].to_vec())
                    .collect();
                let tree = LabelledTree::from_parents(sig.clone(), &parents, &labels).unwrap();
                instances += 1;
                let code = tree.canonical_code(tree.root());
                match reps.get(&code) {
                    Some(rep) => {
                        if !trees_isomorphic(rep, &tree) {
                            failures.push(format!(
                                "equal codes, not isomorphic: {}",
                                tree.to_sexpr().trim()
                            ));
                        }
                    }
                    None => {
                        reps.insert(code, tree);
                    }
                }
            }
        }
    }
    // distinct codes must mean non-isomorphic; only trees sharing a cheap
    // invariant can possibly be isomorphic
    let mut buckets: HashMap<Vec<(usize, Vec<String>)>, Vec<&LabelledTree>> = HashMap::new();
    for t in reps.values() {
        let mut key: Vec<(usize, Vec<String>)> = t
            .node_ids()
            .map(|v| (t.depth(v), t.labels(v).map(str::to_string).collect()))
            .collect();
        key.sort();
        buckets.entry(key).or_default().push(t);
    }
    let mut pairs = 0usize;
    for group in buckets.values() {
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                pairs += 1;
                if trees_isomorphic(group[i], group[j]) {
                    failures.push(format!(
                        "different codes, isomorphic: {}",
                        group[i].to_sexpr().trim()
                    ));
                }
            }
        }
    }
    if let Some(f) = failures.first() {
        eprintln!("  first failure: {f}");
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{instances} labelled trees with <= 6 nodes, {} classes, {pairs} cross-class pairs, {} failures",
            reps.len(),
            failures.len()
        ),
    )
}

/// True when no node has more than `f(level - 1)` pairwise l-isomorphic
/// limbs, grouping by the backtracking oracle.
fn is_reduced(tree: &LabelledTree, f: &ThresholdFn, height: usize) -> bool {
    for v in tree.node_ids() {
        let level = height - tree.depth(v);
        let Some(theta) = (level >= 1).then(|| f.at(level - 1)).flatten() else {
            continue;
        };
        let mut classes: Vec<(NodeId, usize)> = Vec::new();
        for &c in tree.children(v) {
            match classes
                .iter_mut()
                .find(|(r, _)| l_isomorphic(tree, *r, tree, c))
            {
                Some(entry) => entry.1 += 1,
                None => classes.push((c, 1)),
            }
        }
        if classes.iter().any(|&(_, count)| count as u64 > theta) {
            return false;
        }
    }
    true
}

fn c8_idempotence() -> Outcome {
    let mut rng = rng(8);
    let mut failures = Vec::new();
    let mut fired = 0;
    for _ in 0..1000 {
        let t = rng.gen_range(0..=2);
        let tree = if rng.gen_bool(0.2) {
            crowded_tree(&mut rng, t, 40)
        } else {
            random_tree(&mut rng, t, 40, 3)
        };
        let levels = tree.height().max(1);
        let values: Vec<u64> = (0..rng.gen_range(0..=levels))
            .map(|_| rng.gen_range(1..=4))
            .collect();
        let f = ThresholdFn::explicit(values).unwrap();
        let once = reduce(&tree, &f);
        if once.len() < tree.len() {
            fired += 1;
        }
        let twice = reduce(&once, &f);
        let same = once.node_ids().eq(twice.node_ids()) && once.to_sexpr() == twice.to_sexpr();
        let mut perm: Vec<NodeId> = (0..tree.len()).collect();
        perm.shuffle(&mut rng);
        let permuted = reduce(&tree.relabelled(&perm), &f);
        let order_invariant =
            trees_isomorphic(&once, &permuted) && once.to_sexpr() == permuted.to_sexpr();
        let reduced = is_reduced(&once, &f, tree.height());
        let contains_root = once.is_alive(tree.root());
        if !(same && order_invariant && reduced && contains_root) {
            failures.push(format!(
                "{} (idempotent {same}, order-invariant {order_invariant}, reduced {reduced})",
                tree.to_sexpr().trim()
            ));
        }
    }
    if let Some(f) = failures.first() {
        eprintln!("  first failure: {f}");
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "1000 random trees, reduction fired on {fired}, {} failures",
            failures.len()
        ),
    )
}

/// Random tree-model text and the edge set it defines, computed from the
/// generator's own bookkeeping.
fn random_tree_model(rng: &mut rand_chacha::ChaCha8Rng) -> (String, BTreeSet<(usize, usize)>) {
    let d = if rng.gen_bool(0.05) {
        0
    } else {
        rng.gen_range(1..=2)
    };
    let m = rng.gen_range(1..=3);
    let total = if d == 0 { 1 } else { rng.gen_range(1..=10) };
    // group of each leaf (only meaningful for d = 2)
    let mut groups: Vec<usize> = Vec::new();
    if d == 2 {
        let mut g = 0;
        for i in 0..total {
            if i > 0 && rng.gen_bool(0.4) {
                g += 1;
            }
            groups.push(g);
        }
    } else {
        groups = vec![0; total];
    }
    let colours: Vec<usize> = (0..total).map(|_| rng.gen_range(0..m)).collect();
    let mut s_table = HashMap::new();
    let mut lines = String::new();
    for c1 in 0..m {
        for c2 in c1..m {
            for i in 1..=d {
                let v = rng.gen_bool(0.5);
                s_table.insert((c1, c2, i), v);
                s_table.insert((c2, c1, i), v);
                if v || rng.gen_bool(0.5) {
                    lines.push_str(&format!("s {c1} {c2} {} {}\n", 2 * i, u8::from(v)));
                }
            }
        }
    }
    let leaf = |k: usize| format!("(node [c_{}])", colours[k]);
    let text = match d {
        0 => leaf(0),
        1 => format!(
            "(node [] {})",
            (0..total).map(leaf).collect::<Vec<_>>().join(" ")
        ),
        _ => {
            let mut out = String::from("(node []");
            let mut k = 0;
            while k < total {
                let g = groups[k];
                out.push_str(" (node []");
                while k < total && groups[k] == g {
                    out.push(' ');
                    out.push_str(&leaf(k));
                    k += 1;
                }
                out.push(')');
            }
            out.push(')');
            out
        }
    };
    let mut edges = BTreeSet::new();
    for u in 0..total {
        for v in u + 1..total {
            let half = if d == 2 && groups[u] != groups[v] {
                2
            } else {
                1
            };
            if s_table
                .get(&(colours[u], colours[v], half))
                .copied()
                .unwrap_or(false)
            {
                edges.insert((u, v));
            }
        }
    }
    (format!("{text}\n{lines}"), edges)
}

/// Edges among leaves as defined by `η` on the interpreted tree; `None` if
/// `ν` does not pick out exactly the leaves or `η` is not symmetric.
fn realized_edges(model: &TreeModel, mode: ShrubLabels) -> Option<BTreeSet<(usize, usize)>> {
    let (tree, interp) = shrub_interpret(model, mode).ok()?;
    let s = FiniteStructure::from_tree(&tree);
    let budget = Budget::default();
    for v in tree.node_ids() {
        let a = Assignment::new().with_element("x", s.element_of(v)?);
        if eval(&s, interp.domain(), &a, &budget).ok()? != tree.is_leaf(v) {
            return None;
        }
    }
    let leaves = model.leaves();
    let mut out = BTreeSet::new();
    for (i, &u) in leaves.iter().enumerate() {
        for (j, &v) in leaves.iter().enumerate() {
            let a = Assignment::new()
                .with_element("x", s.element_of(u)?)
                .with_element("y", s.element_of(v)?);
            let holds = eval(&s, interp.edge(), &a, &budget).ok()?;
            if holds && i < j {
                out.insert((i, j));
            }
            if holds && i == j {
                return None;
            }
        }
    }
    let symmetric = out.iter().all(|&(i, j)| {
        let a = Assignment::new()
            .with_element("x", s.element_of(leaves[j]).unwrap())
            .with_element("y", s.element_of(leaves[i]).unwrap());
        eval(&s, interp.edge(), &a, &budget).unwrap()
    });
    symmetric.then_some(out)
}

fn c9_shrub_round_trip() -> Outcome {
    let mut rng = rng(9);
    let mut failures = Vec::new();
    let mut samples = 0;
    let check = |text: &str, want: &BTreeSet<(usize, usize)>, failures: &mut Vec<String>| {
        let model = match TreeModel::parse(text) {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("{text}: {e}"));
                return;
            }
        };
        let declared: BTreeSet<(usize, usize)> =
            model.represented_graph().edges().into_iter().collect();
        for mode in [ShrubLabels::Adjacency, ShrubLabels::Signature] {
            if realized_edges(&model, mode).as_ref() != Some(want) || declared != *want {
                failures.push(format!("{mode:?}: {}", text.replace('\n', " | ")));
            }
        }
    };
    for _ in 0..600 {
        let (text, want) = random_tree_model(&mut rng);
        samples += 1;
        check(&text, &want, &mut failures);
    }
    for n in 1..=10 {
        let leaves = vec!["(node [c_0])"; n].join(" ");
        let text = format!("(node [] {leaves})\ns 0 0 2 1\n");
        let want = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        check(&text, &want, &mut failures);
    }
    let group = "(node [] (node [c_0]) (node [c_1]) (node [c_2]))";
    let text = format!("(node [] {group} {group} {group})\ns 0 1 2 1\ns 1 2 2 1\ns 0 2 4 1\n");
    let mut want = BTreeSet::new();
    for k in 0..3 {
        want.insert((3 * k, 3 * k + 1));
        want.insert((3 * k + 1, 3 * k + 2));
        for j in 0..3 {
            if j != k {
                let (a, b) = (3 * k, 3 * j + 2);
                want.insert((a.min(b), a.max(b)));
            }
        }
    }
    check(&text, &want, &mut failures);
    if let Some(f) = failures.first() {
        eprintln!("  first failure: {f}");
    }
    Outcome::new(
        failures.is_empty() && samples >= 500,
        format!(
            "{samples} random tree-models (d <= 2, m <= 3, <= 10 leaves), K1..K10 in TM(1,1), subdivided K3,3 in TM(2,3); both label modes; {} failures",
            failures.len()
        ),
    )
}

fn main() {
    let mut records = Vec::new();
    let run = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| -> bool {
        let start = Instant::now();
        let o = f();
        println!(
            "{} criterion {id} ({name}): {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        o.pass
    };
    let results = [
        run(1, "MSO kernel soundness", &mut || {
            c1_mso_soundness(&mut records)
        }),
        run(2, "CMSO kernel soundness", &mut c2_cmso_soundness),
        run(3, "threshold values", &mut c3_threshold_values),
        run(4, "kernel size bound", &mut || c4_size_bound(&records)),
        run(5, "tree-depth exactness", &mut c5_tree_depth),
        run(6, "interpretation correctness", &mut c6_interpretation),
        run(7, "canonical codes", &mut c7_canonical_codes),
        run(
            8,
            "reduction idempotence and order invariance",
            &mut c8_idempotence,
        ),
        run(9, "shrub round-trip", &mut c9_shrub_round_trip),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
