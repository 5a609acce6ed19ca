//! MSO/CMSO formulas over a signature with one binary relation and unary labels.

mod parse;
mod prenex;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

pub use parse::{parse, parse_sentence};
pub use prenex::{to_prenex, PrenexFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown label `{label}` at byte {pos}")]
    UnknownLabel { pos: usize, label: String },
    #[error("sort mismatch at byte {pos}: `{var}` used where a {expected} variable is required")]
    SortMismatch {
        pos: usize,
        var: String,
        expected: Sort,
    },
    #[error("mod predicate at byte {pos} requires 0 <= a < b, got mod[{residue},{modulus}]")]
    BadModulus {
        pos: usize,
        residue: u32,
        modulus: u32,
    },
    #[error("relation `{found}` at byte {pos} is not in the signature (expected `{expected}`)")]
    WrongRelation {
        pos: usize,
        found: Relation,
        expected: Relation,
    },
    #[error("free variable `{0}` in a position that requires a sentence")]
    FreeVariable(String),
    #[error("duplicate label `{0}` in signature")]
    DuplicateLabel(String),
    #[error("invalid label name `{0}`")]
    InvalidLabel(String),
}

/// Variable sort. Element variables are written lowercase, set variables uppercase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Element,
    Set,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Element => f.write_str("element"),
            Sort::Set => f.write_str("set"),
        }
    }
}

impl Sort {
    /// Sort implied by the spelling of an identifier.
    pub fn of_name(name: &str) -> Sort {
        match name.chars().next() {
            Some(c) if c.is_ascii_uppercase() => Sort::Set,
            _ => Sort::Element,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn element(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            sort: Sort::Element,
        }
    }

    pub fn set(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            sort: Sort::Set,
        }
    }
}

/// The single binary relation of a signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `parent(x, y)`: x is the parent of y.
    Parent,
    /// `edge(x, y)`: symmetric, irreflexive adjacency.
    Edge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Parent => f.write_str("parent"),
            Relation::Edge => f.write_str("edge"),
        }
    }
}

/// Relation symbol plus a label alphabet kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    relation: Relation,
    alphabet: Vec<String>,
}

pub(crate) fn is_label_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Signature {
    pub fn new<I, S>(relation: Relation, labels: I) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet: Vec<String> = labels.into_iter().map(Into::into).collect();
        for label in &alphabet {
            if !is_label_name(label) {
                return Err(FormulaError::InvalidLabel(label.clone()));
            }
        }
        alphabet.sort();
        if let Some(w) = alphabet.windows(2).find(|w| w[0] == w[1]) {
            return Err(FormulaError::DuplicateLabel(w[0].clone()));
        }
        Ok(Signature { relation, alphabet })
    }

    pub fn trees<I, S>(labels: I) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(Relation::Parent, labels)
    }

    pub fn graphs<I, S>(labels: I) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(Relation::Edge, labels)
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn labels(&self) -> &[String] {
        &self.alphabet
    }

    /// Number of labels, `t`.
    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.alphabet
            .binary_search_by(|probe| probe.as_str().cmp(label))
            .ok()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.label_index(label).is_some()
    }

    /// Same relation, alphabet extended by `extra` (duplicates merged).
    pub fn extended<I, S>(&self, extra: I) -> Signature
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set: BTreeSet<String> = self.alphabet.iter().cloned().collect();
        set.extend(extra.into_iter().map(Into::into));
        Signature {
            relation: self.relation,
            alphabet: set.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// Formula AST. Atoms refer to variables by name; the sort of an atom
/// argument is fixed by its position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(String, String),
    Rel(Relation, String, String),
    /// `lab_NAME(x)`: (label, element variable)
    Label(String, String),
    /// `in(x, X)`: (element variable, set variable)
    Member(String, String),
    /// `mod[a,b](X)`: |X| is congruent to `residue` modulo `modulus`.
    Mod {
        residue: u32,
        modulus: u32,
        set: String,
    },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quantifier, Var, Box<Formula>),
}

impl Formula {
    pub fn eq(x: impl Into<String>, y: impl Into<String>) -> Self {
        Formula::Eq(x.into(), y.into())
    }

    pub fn rel(r: Relation, x: impl Into<String>, y: impl Into<String>) -> Self {
        Formula::Rel(r, x.into(), y.into())
    }

    pub fn parent(x: impl Into<String>, y: impl Into<String>) -> Self {
        Formula::Rel(Relation::Parent, x.into(), y.into())
    }

    pub fn edge(x: impl Into<String>, y: impl Into<String>) -> Self {
        Formula::Rel(Relation::Edge, x.into(), y.into())
    }

    pub fn label(label: impl Into<String>, x: impl Into<String>) -> Self {
        Formula::Label(label.into(), x.into())
    }

    pub fn member(x: impl Into<String>, set: impl Into<String>) -> Self {
        Formula::Member(x.into(), set.into())
    }

    pub fn modulo(residue: u32, modulus: u32, set: impl Into<String>) -> Self {
        Formula::Mod {
            residue,
            modulus,
            set: set.into(),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn exists(var: Var, body: Formula) -> Self {
        Formula::Quant(Quantifier::Exists, var, Box::new(body))
    }

    pub fn forall(var: Var, body: Formula) -> Self {
        Formula::Quant(Quantifier::Forall, var, Box::new(body))
    }

    /// Conjunction of all items; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Disjunction of all items; `false` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        let note = |name: &str, sort: Sort, out: &mut Vec<Var>| {
            let v = Var {
                name: name.to_string(),
                sort,
            };
            if !bound.contains(&v) && !out.contains(&v) {
                out.push(v);
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(x, y) | Formula::Rel(_, x, y) => {
                note(x, Sort::Element, out);
                note(y, Sort::Element, out);
            }
            Formula::Label(_, x) => note(x, Sort::Element, out),
            Formula::Member(x, set) => {
                note(x, Sort::Element, out);
                note(set, Sort::Set, out);
            }
            Formula::Mod { set, .. } => note(set, Sort::Set, out),
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn var_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Eq(x, y) | Formula::Rel(_, x, y) | Formula::Member(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Formula::Label(_, x) | Formula::Mod { set: x, .. } => {
                out.insert(x.clone());
            }
            Formula::Quant(_, v, _) => {
                out.insert(v.name.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Quant(_, _, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Element and set quantifier occurrences, `(q, s)`.
    pub fn quantifier_counts(&self) -> (usize, usize) {
        let (mut q, mut s) = (0, 0);
        self.visit(&mut |f| {
            if let Formula::Quant(_, v, _) = f {
                match v.sort {
                    Sort::Element => q += 1,
                    Sort::Set => s += 1,
                }
            }
        });
        (q, s)
    }

    pub fn has_quantifiers(&self) -> bool {
        self.quantifier_counts() != (0, 0)
    }

    pub fn has_set_quantifiers(&self) -> bool {
        self.quantifier_counts().1 > 0
    }

    pub fn has_mod_atoms(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Mod { .. }));
        found
    }

    /// Labels referenced by `lab_` atoms.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Label(l, _) = f {
                out.insert(l.clone());
            }
        });
        out
    }

    pub fn relations(&self) -> BTreeSet<Relation> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Rel(r, _, _) = f {
                out.insert(*r);
            }
        });
        out
    }

    /// Renames free variables simultaneously according to `map`. Bound
    /// variables are left alone; the caller guarantees no capture.
    pub fn rename_free(&self, map: &HashMap<String, String>) -> Formula {
        let mut shadowed = Vec::new();
        self.rename_free_inner(map, &mut shadowed)
    }

    fn rename_free_inner(
        &self,
        map: &HashMap<String, String>,
        shadowed: &mut Vec<String>,
    ) -> Formula {
        let r = |name: &String, shadowed: &Vec<String>| -> String {
            if shadowed.contains(name) {
                name.clone()
            } else {
                map.get(name).cloned().unwrap_or_else(|| name.clone())
            }
        };
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Eq(x, y) => Formula::Eq(r(x, shadowed), r(y, shadowed)),
            Formula::Rel(rel, x, y) => Formula::Rel(*rel, r(x, shadowed), r(y, shadowed)),
            Formula::Label(l, x) => Formula::Label(l.clone(), r(x, shadowed)),
            Formula::Member(x, set) => Formula::Member(r(x, shadowed), r(set, shadowed)),
            Formula::Mod {
                residue,
                modulus,
                set,
            } => Formula::Mod {
                residue: *residue,
                modulus: *modulus,
                set: r(set, shadowed),
            },
            Formula::Not(a) => a.rename_free_inner(map, shadowed).not(),
            Formula::And(a, b) => a
                .rename_free_inner(map, shadowed)
                .and(b.rename_free_inner(map, shadowed)),
            Formula::Or(a, b) => a
                .rename_free_inner(map, shadowed)
                .or(b.rename_free_inner(map, shadowed)),
            Formula::Implies(a, b) => a
                .rename_free_inner(map, shadowed)
                .implies(b.rename_free_inner(map, shadowed)),
            Formula::Quant(quant, v, body) => {
                shadowed.push(v.name.clone());
                let body = body.rename_free_inner(map, shadowed);
                shadowed.pop();
                Formula::Quant(*quant, v.clone(), Box::new(body))
            }
        }
    }
}

/// Least common multiple of all `mod[a,b]` moduli; 1 when there are none.
pub fn lcm_moduli(formula: &Formula) -> u64 {
    let mut lcm = 1u64;
    formula.visit(&mut |f| {
        if let Formula::Mod { modulus, .. } = f {
            lcm = lcm.lcm(&u64::from(*modulus));
        }
    });
    lcm
}

/// Deterministic fresh-name source: `base`, `base_1`, `base_2`, ... skipping
/// anything already taken.
#[derive(Debug, Clone, Default)]
pub struct NameGen {
    taken: BTreeSet<String>,
}

impl NameGen {
    pub fn new(taken: impl IntoIterator<Item = String>) -> Self {
        NameGen {
            taken: taken.into_iter().collect(),
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    pub fn is_taken(&self, name: &str) -> bool {
        self.taken.contains(name)
    }

    pub fn fresh(&mut self, base: &str) -> String {
        if !self.taken.contains(base) {
            self.taken.insert(base.to_string());
            return base.to_string();
        }
        let mut i = 1usize;
        loop {
            let candidate = format!("{base}_{i}");
            if !self.taken.contains(&candidate) {
                self.taken.insert(candidate.clone());
                return candidate;
            }
            i += 1;
        }
    }
}

// Binding strength used by the printer; larger binds tighter.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Quant(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) => 4,
        _ => 5,
    }
}

struct Paren<'a>(&'a Formula, bool);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Eq(x, y) => write!(f, "{x} = {y}"),
            Formula::Rel(r, x, y) => write!(f, "{r}({x}, {y})"),
            Formula::Label(l, x) => write!(f, "lab_{l}({x})"),
            Formula::Member(x, set) => write!(f, "in({x}, {set})"),
            Formula::Mod {
                residue,
                modulus,
                set,
            } => write!(f, "mod[{residue},{modulus}]({set})"),
            Formula::Not(a) => {
                write!(f, "!{}", Paren(a, precedence(a) < 4))
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let (op, p) = match self {
                    Formula::And(..) => ("&", 3),
                    Formula::Or(..) => ("|", 2),
                    _ => ("->", 1),
                };
                // left-assoc: left operand may share the level, right may not.
                let lw = precedence(a) < p;
                let rw = precedence(b) <= p;
                write!(f, "{} {op} {}", Paren(a, lw), Paren(b, rw))
            }
            Formula::Quant(q, v, body) => {
                let kw = match (q, v.sort) {
                    (Quantifier::Exists, Sort::Element) => "E",
                    (Quantifier::Forall, Sort::Element) => "A",
                    (Quantifier::Exists, Sort::Set) => "ES",
                    (Quantifier::Forall, Sort::Set) => "AS",
                };
                write!(f, "{kw} {}. {body}", v.name)
            }
        }
    }
}
