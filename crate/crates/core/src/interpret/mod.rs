//! Graph front-ends. A graph is encoded as a labelled tree together with a
//! simple interpretation `(ν, η)`: `ν(x)` picks the tree nodes standing for
//! vertices and `η(x, y)` defines adjacency among them. Sentences about the
//! graph are translated into sentences about the tree and checked there.

mod graph;
mod shrub;
mod td;
mod translate;
mod treedepth;

use thiserror::Error;

use crate::checker::{check_with_kernel, CheckError, KernelCheck, KernelOptions};
use crate::formula::{Formula, FormulaError, Relation};
use crate::tree::{LabelledTree, TreeError};

pub use graph::{EliminationForest, Graph};
pub use shrub::{shrub_interpret, ShrubLabels, TreeModel};
pub use td::td_interpret;
pub use translate::translate;
pub use treedepth::{tree_depth_exact, EXACT_TREE_DEPTH_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpretError {
    #[error("graph file line {line}: {message}")]
    GraphSyntax { line: usize, message: String },
    #[error("forest file line {line}: {message}")]
    ForestSyntax { line: usize, message: String },
    #[error("tree-model: {0}")]
    TreeModel(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("forest parent links contain a cycle through vertex {}", .0 + 1)]
    ForestCycle(usize),
    #[error("forest is not a tree-depth witness: {0}")]
    NotAWitness(String),
    #[error(
        "exact tree-depth needs at most {limit} vertices, graph has {vertices}; supply a forest"
    )]
    TooLarge { vertices: usize, limit: usize },
    #[error("label `{0}` is reserved by the interpretation")]
    ReservedLabel(String),
    #[error("the interpretation does not define relation `{0}`")]
    UndefinedRelation(Relation),
    #[error("graph differs from the graph represented by the tree-model")]
    GraphMismatch,
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpretationKind {
    TreeDepth,
    Shrub,
}

/// Simple interpretation of a graph in a labelled tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    kind: InterpretationKind,
    domain: Formula,
    edge: Formula,
    added_labels: Vec<String>,
}

impl Interpretation {
    /// Name of the free variable of [`Interpretation::domain`].
    pub const X: &'static str = "x";
    /// Name of the second free variable of [`Interpretation::edge`].
    pub const Y: &'static str = "y";

    pub(crate) fn new(
        kind: InterpretationKind,
        domain: Formula,
        edge: Formula,
        added_labels: Vec<String>,
    ) -> Self {
        debug_assert_eq!(domain.free_vars().len(), 1);
        debug_assert!(edge.free_vars().len() <= 2);
        Interpretation {
            kind,
            domain,
            edge,
            added_labels,
        }
    }

    pub fn kind(&self) -> InterpretationKind {
        self.kind
    }

    /// `ν(x)`.
    pub fn domain(&self) -> &Formula {
        &self.domain
    }

    /// `η(x, y)`.
    pub fn edge(&self) -> &Formula {
        &self.edge
    }

    /// Labels the interpretation adds to the tree on top of the graph's own.
    pub fn added_labels(&self) -> &[String] {
        &self.added_labels
    }
}

/// How a graph is turned into a tree.
#[derive(Debug, Clone, Copy)]
pub enum FrontEnd<'a> {
    /// Compute an optimal elimination forest (at most 20 vertices).
    TreeDepth,
    TreeDepthWithForest(&'a EliminationForest),
    /// The graph must equal the model's represented graph.
    Shrub(&'a TreeModel, ShrubLabels),
}

#[derive(Debug, Clone)]
pub struct GraphCheck {
    pub verdict: bool,
    /// Tree-depth of the forest used, for the tree-depth front-ends.
    pub tree_depth: Option<usize>,
    pub tree: LabelledTree,
    pub interpretation: Interpretation,
    pub translated: Formula,
    pub kernel: KernelCheck,
}

/// Decides `graph ⊨ sentence` by interpreting the graph in a tree,
/// translating the sentence and kernelizing the tree.
pub fn check_graph(
    graph: &Graph,
    sentence: &Formula,
    front_end: FrontEnd<'_>,
    options: &KernelOptions,
) -> Result<GraphCheck, InterpretError> {
    if !sentence.is_sentence() {
        let free = sentence
            .free_vars()
            .into_iter()
            .next()
            .expect("has a free variable");
        return Err(FormulaError::FreeVariable(free.name).into());
    }
    let (tree, interpretation, tree_depth) = match front_end {
        FrontEnd::TreeDepth => {
            let (td, forest) = tree_depth_exact(graph)?;
            let (t, i) = td_interpret(graph, &forest)?;
            (t, i, Some(td))
        }
        FrontEnd::TreeDepthWithForest(forest) => {
            let (t, i) = td_interpret(graph, forest)?;
            (t, i, Some(forest.levels()))
        }
        FrontEnd::Shrub(model, labels) => {
            if model.represented_graph() != *graph {
                return Err(InterpretError::GraphMismatch);
            }
            let (t, i) = shrub_interpret(model, labels)?;
            (t, i, None)
        }
    };
    let mentioned = sentence.labels();
    if let Some(clash) = interpretation
        .added_labels()
        .iter()
        .find(|l| mentioned.contains(*l))
    {
        return Err(InterpretError::ReservedLabel(clash.clone()));
    }
    // labels the graph never uses are empty but must exist in the tree
    let missing: Vec<&String> = mentioned
        .iter()
        .filter(|l| !tree.signature().contains(l))
        .collect();
    let tree = if missing.is_empty() {
        tree
    } else {
        tree.with_signature(tree.signature().extended(missing))?
    };
    let translated = translate(sentence, &interpretation)?;
    let kernel = check_with_kernel(&tree, &translated, options)?;
    Ok(GraphCheck {
        verdict: kernel.verdict,
        tree_depth,
        tree,
        interpretation,
        translated,
        kernel,
    })
}
