//! Exact tree-depth by memoized recursion over vertex subsets:
//! `td(G) = max over components`, and for connected `C`,
//! `td(C) = 1 + min over v of td(C - v)`.

use std::collections::HashMap;

use super::{EliminationForest, Graph, InterpretError};

/// Largest graph accepted by [`tree_depth_exact`].
pub const EXACT_TREE_DEPTH_LIMIT: usize = 20;

struct Solver {
    adjacency: Vec<u32>,
    /// connected vertex set -> (tree-depth, best root)
    memo: HashMap<u32, (u8, u8)>,
}

impl Solver {
    fn components(&self, set: u32) -> Vec<u32> {
        let mut rest = set;
        let mut out = Vec::new();
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.adjacency[v] & set & !comp;
                comp |= new;
                frontier |= new;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }

    fn td(&mut self, set: u32) -> u8 {
        self.components(set)
            .into_iter()
            .map(|c| self.td_connected(c).0)
            .max()
            .unwrap_or(0)
    }

    fn td_connected(&mut self, comp: u32) -> (u8, u8) {
        let size = comp.count_ones() as u8;
        if size == 1 {
            return (1, comp.trailing_zeros() as u8);
        }
        if let Some(&hit) = self.memo.get(&comp) {
            return hit;
        }
        let is_clique = (0..32)
            .filter(|v| comp >> v & 1 == 1)
            .all(|v| (self.adjacency[v] | (1 << v)) & comp == comp);
        let mut best = (size, comp.trailing_zeros() as u8);
        if !is_clique {
            let mut bits = comp;
            while bits != 0 {
                let v = bits.trailing_zeros();
                bits &= bits - 1;
                let candidate = 1 + self.td(comp & !(1 << v));
                if candidate < best.0 {
                    best = (candidate, v as u8);
                    // every connected graph on >= 2 vertices needs 2 levels
                    if candidate == 2 {
                        break;
                    }
                }
            }
        }
        self.memo.insert(comp, best);
        best
    }

    fn build(&mut self, set: u32, parent: Option<usize>, out: &mut [Option<usize>]) {
        for comp in self.components(set) {
            let (_, root) = self.td_connected(comp);
            let root = root as usize;
            out[root] = parent;
            self.build(comp & !(1 << root), Some(root), out);
        }
    }
}

/// Exact tree-depth and a witnessing elimination forest of height `td - 1`.
pub fn tree_depth_exact(g: &Graph) -> Result<(usize, EliminationForest), InterpretError> {
    let n = g.vertex_count();
    if n > EXACT_TREE_DEPTH_LIMIT {
        return Err(InterpretError::TooLarge {
            vertices: n,
            limit: EXACT_TREE_DEPTH_LIMIT,
        });
    }
    let adjacency = (0..n)
        .map(|v| g.neighbours(v).fold(0u32, |acc, w| acc | 1 << w))
        .collect();
    let mut solver = Solver {
        adjacency,
        memo: HashMap::new(),
    };
    let all = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let td = solver.td(all) as usize;
    let mut parent = vec![None; n];
    solver.build(all, None, &mut parent);
    let forest = EliminationForest::new(parent)?;
    debug_assert_eq!(forest.levels(), td);
    Ok((td, forest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(tree_depth_exact(&Graph::new(0)).unwrap().0, 0);
        assert_eq!(tree_depth_exact(&Graph::new(1)).unwrap().0, 1);
        assert_eq!(tree_depth_exact(&Graph::new(5)).unwrap().0, 1);
        assert_eq!(tree_depth_exact(&Graph::complete(4)).unwrap().0, 4);
        assert_eq!(tree_depth_exact(&Graph::path(3)).unwrap().0, 2);
        assert_eq!(tree_depth_exact(&Graph::path(7)).unwrap().0, 3);
        assert_eq!(tree_depth_exact(&Graph::cycle(5)).unwrap().0, 4);
    }

    #[test]
    fn path_with_fifteen_vertices() {
        let g = Graph::path(15);
        let (td, forest) = tree_depth_exact(&g).unwrap();
        assert_eq!(td, 4);
        assert_eq!(forest.height(), 3);
        forest.validate_for(&g).unwrap();
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            tree_depth_exact(&Graph::new(21)),
            Err(InterpretError::TooLarge {
                vertices: 21,
                limit: 20
            })
        ));
    }
}
