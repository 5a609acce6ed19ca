use std::collections::HashMap;

use crate::formula::{Formula, NameGen, Signature, Var};
use crate::tree::LabelledTree;

use super::{EliminationForest, Graph, InterpretError, Interpretation, InterpretationKind};

fn level_label(j: usize) -> String {
    format!("L{j}")
}

/// `anc` is the parent of `desc` after `steps` parent steps.
fn ancestor_at(anc: &str, desc: &str, steps: usize, names: &mut NameGen) -> Formula {
    if steps == 1 {
        return Formula::parent(anc, desc);
    }
    let w = names.fresh("w");
    let rest = ancestor_at(anc, &w, steps - 1, names);
    Formula::exists(Var::element(w.clone()), Formula::parent(w, desc).and(rest))
}

/// `α(x, y)` for a tree of `levels` vertex levels: `x` sits at some level
/// `j` and `y` carries `L_j`. With `guarded`, `x` must also be a proper
/// ancestor of `y`.
pub(crate) fn alpha(
    levels: usize,
    x: &str,
    y: &str,
    guarded: bool,
    names: &mut NameGen,
) -> Formula {
    let by_level = Formula::disjunction((1..=levels).map(|j| {
        Formula::conjunction(
            [
                Formula::label(level_label(j), x),
                Formula::label(level_label(j), y),
            ]
            .into_iter()
            .chain((j + 1..=levels).map(|i| Formula::label(level_label(i), x).not())),
        )
    }));
    if !guarded {
        return by_level;
    }
    if levels < 2 {
        return Formula::False;
    }
    let anc = Formula::disjunction((1..levels).map(|steps| ancestor_at(x, y, steps, names)));
    anc.and(by_level)
}

/// Encodes `graph` as the forest `forest` under a fresh root labelled `L0`.
/// Vertex `v` becomes node `v + 1` and carries `L_j` for its own level `j`
/// and for the level of every forest ancestor it is adjacent to.
pub fn td_interpret(
    graph: &Graph,
    forest: &EliminationForest,
) -> Result<(LabelledTree, Interpretation), InterpretError> {
    forest.validate_for(graph)?;
    let n = graph.vertex_count();
    let levels = forest.levels();
    let added: Vec<String> = (0..=levels).map(level_label).collect();
    let own = graph.label_names();
    if let Some(clash) = added.iter().find(|l| own.contains(*l)) {
        return Err(InterpretError::ReservedLabel(clash.clone()));
    }
    let signature = Signature::trees(own.iter().chain(&added))?;

    let mut parents = Vec::with_capacity(n + 1);
    let mut labels = Vec::with_capacity(n + 1);
    parents.push(None);
    labels.push(vec![level_label(0)]);
    for v in 0..n {
        parents.push(Some(forest.parent(v).map_or(0, |p| p + 1)));
        let mut l: Vec<String> = graph.labels(v).iter().cloned().collect();
        l.push(level_label(forest.depth(v) + 1));
        let mut u = forest.parent(v);
        while let Some(a) = u {
            if graph.has_edge(a, v) {
                l.push(level_label(forest.depth(a) + 1));
            }
            u = forest.parent(a);
        }
        labels.push(l);
    }
    let tree = LabelledTree::from_parents(signature, &parents, &labels)?;

    let (x, y) = (Interpretation::X, Interpretation::Y);
    let mut names = NameGen::new([x.to_string(), y.to_string()]);
    let forward = alpha(levels, x, y, true, &mut names);
    let swap = HashMap::from([
        (x.to_string(), y.to_string()),
        (y.to_string(), x.to_string()),
    ]);
    let backward = forward.rename_free(&swap);
    let edge = Formula::eq(x, y).not().and(forward.or(backward));
    let domain = Formula::label(level_label(0), x).not();
    Ok((
        tree,
        Interpretation::new(InterpretationKind::TreeDepth, domain, edge, added),
    ))
}
