//! Brute-force MSO/CMSO evaluation over finite structures.
//!
//! Element quantifiers range over the domain and set quantifiers over all
//! `2^n` subsets (Gray-code order, short-circuiting). A visit counter and a
//! domain-size limit for set quantification keep the exponential part explicit.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::formula::{to_prenex, Formula, FormulaError, Quantifier, Relation, Signature, Sort};
use crate::kernelize::{reduce_with_report, KernelError, ReductionReport, ThresholdFn};
use crate::tree::{LabelledTree, NodeId, TreeError};

/// Hard limit: set values are bit masks.
pub const MAX_SET_DOMAIN: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("label `{0}` is not in the structure's signature")]
    UnknownLabel(String),
    #[error("formula uses relation `{found}` but the structure has `{expected}`")]
    RelationMismatch { found: Relation, expected: Relation },
    #[error("set quantification over {size} elements exceeds the budget of {limit}; kernelize or shrink the instance")]
    SetDomainTooLarge { size: usize, limit: usize },
    #[error("evaluation exceeded the budget of {limit} node visits")]
    VisitBudget { limit: u64 },
    #[error("element {element} out of range for a structure of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("formula has mod predicates; use cmso mode")]
    ModuloInMso,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    Tree,
    Graph,
}

/// Finite relational structure: dense domain `0..n`, unary label predicates,
/// one binary relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    kind: StructureKind,
    signature: Signature,
    size: usize,
    /// `[label][element]`
    label_members: Vec<Vec<bool>>,
    /// Trees: parent of each element.
    parent_of: Vec<Option<u32>>,
    /// Graphs: sorted neighbour lists.
    adjacency: Vec<Vec<u32>>,
    /// Original id (tree node id / graph vertex) of each element.
    origin: Vec<usize>,
}

impl FiniteStructure {
    /// Live nodes of `tree` in ascending id order; `parent(x, y)` holds when
    /// `x` is the parent of `y`.
    pub fn from_tree(tree: &LabelledTree) -> Self {
        let origin: Vec<NodeId> = tree.node_ids().collect();
        let mut dense = vec![u32::MAX; tree.capacity()];
        for (i, &v) in origin.iter().enumerate() {
            dense[v] = i as u32;
        }
        let sig = tree.signature().clone();
        let mut label_members = vec![vec![false; origin.len()]; sig.len()];
        let mut parent_of = vec![None; origin.len()];
        for (i, &v) in origin.iter().enumerate() {
            for &l in tree.label_indices(v) {
                label_members[l as usize][i] = true;
            }
            parent_of[i] = tree.parent(v).map(|p| dense[p]);
        }
        FiniteStructure {
            kind: StructureKind::Tree,
            signature: sig,
            size: origin.len(),
            label_members,
            parent_of,
            adjacency: Vec::new(),
            origin,
        }
    }

    /// Graph on `0..n`; `edges` are unordered pairs, loops are dropped.
    /// `labels[v]` lists the label names of vertex `v`.
    pub fn graph<S: AsRef<str>>(
        signature: Signature,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        labels: &[Vec<S>],
    ) -> Result<Self, CheckError> {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(CheckError::ElementOutOfRange {
                        element: w,
                        size: n,
                    });
                }
            }
            if u != v {
                adjacency[u].push(v as u32);
                adjacency[v].push(u as u32);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let mut label_members = vec![vec![false; n]; signature.len()];
        for (v, names) in labels.iter().enumerate().take(n) {
            for name in names {
                let l = signature
                    .label_index(name.as_ref())
                    .ok_or_else(|| CheckError::UnknownLabel(name.as_ref().to_string()))?;
                label_members[l][v] = true;
            }
        }
        Ok(FiniteStructure {
            kind: StructureKind::Graph,
            signature,
            size: n,
            label_members,
            parent_of: Vec::new(),
            adjacency,
            origin: (0..n).collect(),
        })
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Original id of domain element `e`.
    pub fn origin(&self, e: usize) -> usize {
        self.origin[e]
    }

    /// Domain element with original id `id`.
    pub fn element_of(&self, id: usize) -> Option<usize> {
        self.origin.iter().position(|&o| o == id)
    }

    pub fn relation(&self) -> Relation {
        match self.kind {
            StructureKind::Tree => Relation::Parent,
            StructureKind::Graph => Relation::Edge,
        }
    }

    fn holds(&self, x: u32, y: u32) -> bool {
        match self.kind {
            StructureKind::Tree => self.parent_of[y as usize] == Some(x),
            StructureKind::Graph => self.adjacency[x as usize].binary_search(&y).is_ok(),
        }
    }
}

/// Values of free variables, as domain elements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub elements: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, Vec<usize>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_element(mut self, var: impl Into<String>, e: usize) -> Self {
        self.elements.insert(var.into(), e);
        self
    }

    pub fn with_set(mut self, var: impl Into<String>, members: Vec<usize>) -> Self {
        self.sets.insert(var.into(), members);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest domain over which set quantifiers are expanded.
    pub max_set_domain: usize,
    pub max_visits: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_set_domain: 20,
            max_visits: 20_000_000_000,
        }
    }
}

type Slot = u16;

#[derive(Debug, Clone)]
enum Node {
    True,
    False,
    Eq(Slot, Slot),
    Rel(Slot, Slot),
    Label(usize, Slot),
    Member(Slot, Slot),
    Mod {
        residue: u32,
        modulus: u32,
        set: Slot,
    },
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Elem(Quantifier, Slot, Box<Node>),
    Set(Quantifier, Slot, Box<Node>),
}

struct Compiler<'a> {
    structure: &'a FiniteStructure,
    elem_scope: Vec<String>,
    set_scope: Vec<String>,
    elem_slots: usize,
    set_slots: usize,
}

impl Compiler<'_> {
    fn lookup(scope: &[String], name: &str) -> Result<Slot, CheckError> {
        scope
            .iter()
            .rposition(|n| n == name)
            .map(|i| i as Slot)
            .ok_or_else(|| CheckError::UnboundVariable(name.to_string()))
    }

    fn compile(&mut self, f: &Formula) -> Result<Node, CheckError> {
        Ok(match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Eq(x, y) => Node::Eq(
                Self::lookup(&self.elem_scope, x)?,
                Self::lookup(&self.elem_scope, y)?,
            ),
            Formula::Rel(r, x, y) => {
                if *r != self.structure.relation() {
                    return Err(CheckError::RelationMismatch {
                        found: *r,
                        expected: self.structure.relation(),
                    });
                }
                Node::Rel(
                    Self::lookup(&self.elem_scope, x)?,
                    Self::lookup(&self.elem_scope, y)?,
                )
            }
            Formula::Label(l, x) => {
                let idx = self
                    .structure
                    .signature
                    .label_index(l)
                    .ok_or_else(|| CheckError::UnknownLabel(l.clone()))?;
                Node::Label(idx, Self::lookup(&self.elem_scope, x)?)
            }
            Formula::Member(x, set) => Node::Member(
                Self::lookup(&self.elem_scope, x)?,
                Self::lookup(&self.set_scope, set)?,
            ),
            Formula::Mod {
                residue,
                modulus,
                set,
            } => Node::Mod {
                residue: *residue,
                modulus: *modulus,
                set: Self::lookup(&self.set_scope, set)?,
            },
            Formula::Not(a) => Node::Not(Box::new(self.compile(a)?)),
            Formula::And(a, b) => Node::And(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Or(a, b) => Node::Or(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Implies(a, b) => {
                Node::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?))
            }
            Formula::Quant(q, v, body) => {
                let (scope, slots) = match v.sort {
                    Sort::Element => (&mut self.elem_scope, &mut self.elem_slots),
                    Sort::Set => (&mut self.set_scope, &mut self.set_slots),
                };
                let slot = scope.len() as Slot;
                scope.push(v.name.clone());
                *slots = (*slots).max(scope.len());
                let body = self.compile(body);
                match v.sort {
                    Sort::Element => self.elem_scope.pop(),
                    Sort::Set => self.set_scope.pop(),
                };
                let body = Box::new(body?);
                match v.sort {
                    Sort::Element => Node::Elem(*q, slot, body),
                    Sort::Set => Node::Set(*q, slot, body),
                }
            }
        })
    }
}

struct Evaluator<'a> {
    structure: &'a FiniteStructure,
    elems: Vec<u32>,
    sets: Vec<u64>,
    visits: u64,
    max_visits: u64,
}

impl Evaluator<'_> {
    fn eval(&mut self, node: &Node) -> Result<bool, CheckError> {
        self.visits += 1;
        if self.visits > self.max_visits {
            return Err(CheckError::VisitBudget {
                limit: self.max_visits,
            });
        }
        Ok(match node {
            Node::True => true,
            Node::False => false,
            Node::Eq(x, y) => self.elems[*x as usize] == self.elems[*y as usize],
            Node::Rel(x, y) => self
                .structure
                .holds(self.elems[*x as usize], self.elems[*y as usize]),
            Node::Label(l, x) => self.structure.label_members[*l][self.elems[*x as usize] as usize],
            Node::Member(x, set) => (self.sets[*set as usize] >> self.elems[*x as usize]) & 1 == 1,
            Node::Mod {
                residue,
                modulus,
                set,
            } => self.sets[*set as usize].count_ones() % modulus == *residue,
            Node::Not(a) => !self.eval(a)?,
            Node::And(a, b) => self.eval(a)? && self.eval(b)?,
            Node::Or(a, b) => self.eval(a)? || self.eval(b)?,
            Node::Implies(a, b) => !self.eval(a)? || self.eval(b)?,
            Node::Elem(q, slot, body) => {
                let want = *q == Quantifier::Exists;
                for e in 0..self.structure.size as u32 {
                    self.elems[*slot as usize] = e;
                    if self.eval(body)? == want {
                        return Ok(want);
                    }
                }
                !want
            }
            Node::Set(q, slot, body) => {
                let want = *q == Quantifier::Exists;
                let n = self.structure.size;
                let slot = *slot as usize;
                let mut mask = 0u64;
                self.sets[slot] = mask;
                if self.eval(body)? == want {
                    return Ok(want);
                }
                for i in 1..(1u64 << n) {
                    mask ^= 1 << i.trailing_zeros();
                    self.sets[slot] = mask;
                    if self.eval(body)? == want {
                        return Ok(want);
                    }
                }
                !want
            }
        })
    }
}

/// Tarskian evaluation of `formula` under `assignment`.
pub fn eval(
    structure: &FiniteStructure,
    formula: &Formula,
    assignment: &Assignment,
    budget: &Budget,
) -> Result<bool, CheckError> {
    let n = structure.size;
    let needs_sets = formula.has_set_quantifiers();
    if needs_sets {
        let limit = budget.max_set_domain.min(MAX_SET_DOMAIN);
        if n > limit {
            return Err(CheckError::SetDomainTooLarge { size: n, limit });
        }
    }
    if !assignment.sets.is_empty() && n > MAX_SET_DOMAIN {
        return Err(CheckError::SetDomainTooLarge {
            size: n,
            limit: MAX_SET_DOMAIN,
        });
    }

    let mut compiler = Compiler {
        structure,
        elem_scope: Vec::new(),
        set_scope: Vec::new(),
        elem_slots: 0,
        set_slots: 0,
    };
    let mut elems = Vec::new();
    let mut sets = Vec::new();
    for v in formula.free_vars() {
        match v.sort {
            Sort::Element => {
                let e = *assignment
                    .elements
                    .get(&v.name)
                    .ok_or_else(|| CheckError::UnboundVariable(v.name.clone()))?;
                if e >= n {
                    return Err(CheckError::ElementOutOfRange {
                        element: e,
                        size: n,
                    });
                }
                compiler.elem_scope.push(v.name.clone());
                elems.push(e as u32);
            }
            Sort::Set => {
                let members = assignment
                    .sets
                    .get(&v.name)
                    .ok_or_else(|| CheckError::UnboundVariable(v.name.clone()))?;
                let mut mask = 0u64;
                for &e in members {
                    if e >= n {
                        return Err(CheckError::ElementOutOfRange {
                            element: e,
                            size: n,
                        });
                    }
                    mask |= 1 << e;
                }
                compiler.set_scope.push(v.name.clone());
                sets.push(mask);
            }
        }
    }
    compiler.elem_slots = compiler.elem_scope.len();
    compiler.set_slots = compiler.set_scope.len();
    let node = compiler.compile(formula)?;
    elems.resize(compiler.elem_slots, 0);
    sets.resize(compiler.set_slots, 0);

    let mut ev = Evaluator {
        structure,
        elems,
        sets,
        visits: 0,
        max_visits: budget.max_visits,
    };
    ev.eval(&node)
}

/// Evaluates a sentence with the empty assignment.
pub fn model_check(
    structure: &FiniteStructure,
    sentence: &Formula,
    budget: &Budget,
) -> Result<bool, CheckError> {
    if let Some(v) = sentence.free_vars().into_iter().next() {
        return Err(FormulaError::FreeVariable(v.name).into());
    }
    eval(structure, sentence, &Assignment::new(), budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    Mso,
    Cmso,
}

#[derive(Debug, Clone, Default)]
pub struct KernelOptions {
    /// `None` picks CMSO exactly when the sentence has mod predicates.
    pub logic: Option<Logic>,
    pub budget: Budget,
    /// Replaces the threshold function derived from the sentence. Under CMSO
    /// a step of 1 is raised to the lcm of the moduli.
    pub thresholds: Option<ThresholdFn>,
}

#[derive(Debug, Clone)]
pub struct KernelCheck {
    pub verdict: bool,
    pub logic: Logic,
    /// Element quantifiers of the prenex form.
    pub q: usize,
    /// Set quantifiers of the prenex form.
    pub s: usize,
    /// Number of labels.
    pub t: usize,
    /// lcm of the moduli (1 for MSO).
    pub modulus: u64,
    pub kernel: LabelledTree,
    pub report: ReductionReport,
}

/// The threshold function used by [`check_with_kernel`] for `sentence` over `t` labels.
pub fn kernel_thresholds(
    sentence: &Formula,
    t: usize,
    logic: Option<Logic>,
) -> Result<(ThresholdFn, Logic, usize, usize, u64), CheckError> {
    let prenex = to_prenex(sentence)?;
    let (q, s) = (prenex.q(), prenex.s());
    let logic = logic.unwrap_or(if sentence.has_mod_atoms() {
        Logic::Cmso
    } else {
        Logic::Mso
    });
    let modulus = crate::formula::lcm_moduli(sentence);
    let f = match logic {
        Logic::Mso => {
            if sentence.has_mod_atoms() {
                return Err(CheckError::ModuloInMso);
            }
            ThresholdFn::for_mso(t as u64, q as u64, s as u64)
        }
        Logic::Cmso => ThresholdFn::for_cmso(modulus, t as u64, q as u64, s as u64)?,
    };
    Ok((f, logic, q, s, modulus))
}

/// Reduces `tree` for the quantifier class of `sentence`, then model-checks the kernel.
pub fn check_with_kernel(
    tree: &LabelledTree,
    sentence: &Formula,
    options: &KernelOptions,
) -> Result<KernelCheck, CheckError> {
    let t = tree.signature().len();
    let (derived, logic, q, s, modulus) = kernel_thresholds(sentence, t, options.logic)?;
    let f = match &options.thresholds {
        // CMSO reduction removes limbs M at a time whatever the thresholds
        Some(f) if logic == Logic::Cmso && f.step() == 1 => f.clone().with_step(modulus)?,
        Some(f) => f.clone(),
        None => derived,
    };
    let f = f.with_cap(BigUint::from(tree.len() as u64 + 1));
    let (kernel, report) = reduce_with_report(tree, &f);
    let structure = FiniteStructure::from_tree(&kernel);
    let verdict = model_check(&structure, sentence, &options.budget)?;
    Ok(KernelCheck {
        verdict,
        logic,
        q,
        s,
        t,
        modulus,
        kernel,
        report,
    })
}
