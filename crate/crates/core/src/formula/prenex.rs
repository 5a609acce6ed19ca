//! Prenex normal form.
//!
//! Implications are rewritten as `!a | b`, negations are pushed to the atoms,
//! bound variables are renamed apart (`x`, `x_1`, `x_2`, ...), and quantifiers
//! are pulled out left to right. Structures are assumed to have a non-empty
//! domain, which is what makes pulling a quantifier over `&`/`|` sound.

use std::collections::HashMap;
use std::fmt;

use super::{Formula, FormulaError, NameGen, Quantifier, Sort, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrenexFormula {
    pub prefix: Vec<(Quantifier, Var)>,
    /// Quantifier-free, in negation normal form.
    pub matrix: Formula,
}

impl PrenexFormula {
    /// Number of element quantifiers.
    pub fn q(&self) -> usize {
        self.prefix
            .iter()
            .filter(|(_, v)| v.sort == Sort::Element)
            .count()
    }

    /// Number of set quantifiers.
    pub fn s(&self) -> usize {
        self.prefix
            .iter()
            .filter(|(_, v)| v.sort == Sort::Set)
            .count()
    }

    pub fn to_formula(&self) -> Formula {
        self.prefix
            .iter()
            .rev()
            .fold(self.matrix.clone(), |body, (q, v)| {
                Formula::Quant(*q, v.clone(), Box::new(body))
            })
    }
}

impl fmt::Display for PrenexFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_formula().fmt(f)
    }
}

/// Prenex form of a sentence.
pub fn to_prenex(formula: &Formula) -> Result<PrenexFormula, FormulaError> {
    if let Some(v) = formula.free_vars().into_iter().next() {
        return Err(FormulaError::FreeVariable(v.name));
    }
    let nnf = to_nnf(formula, false);
    let mut names = NameGen::new(formula.var_names());
    let mut used = std::collections::BTreeSet::new();
    let renamed = rename_apart(&nnf, &mut HashMap::new(), &mut names, &mut used);
    let mut prefix = Vec::new();
    let matrix = pull(renamed, &mut prefix);
    Ok(PrenexFormula { prefix, matrix })
}

fn to_nnf(f: &Formula, negate: bool) -> Formula {
    match f {
        Formula::True => {
            if negate {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::False => {
            if negate {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Not(a) => to_nnf(a, !negate),
        Formula::And(a, b) => {
            let (a, b) = (to_nnf(a, negate), to_nnf(b, negate));
            if negate {
                a.or(b)
            } else {
                a.and(b)
            }
        }
        Formula::Or(a, b) => {
            let (a, b) = (to_nnf(a, negate), to_nnf(b, negate));
            if negate {
                a.and(b)
            } else {
                a.or(b)
            }
        }
        Formula::Implies(a, b) => {
            // a -> b == !a | b;  !(a -> b) == a & !b
            if negate {
                to_nnf(a, false).and(to_nnf(b, true))
            } else {
                to_nnf(a, true).or(to_nnf(b, false))
            }
        }
        Formula::Quant(q, v, body) => {
            let q = if negate { q.dual() } else { *q };
            Formula::Quant(q, v.clone(), Box::new(to_nnf(body, negate)))
        }
        atom => {
            if negate {
                atom.clone().not()
            } else {
                atom.clone()
            }
        }
    }
}

// Gives every binder a distinct name. The first binder of a name keeps it.
fn rename_apart(
    f: &Formula,
    scope: &mut HashMap<String, Vec<String>>,
    names: &mut NameGen,
    used: &mut std::collections::BTreeSet<String>,
) -> Formula {
    let lookup = |name: &String, scope: &HashMap<String, Vec<String>>| -> String {
        scope
            .get(name)
            .and_then(|stack| stack.last())
            .cloned()
            .unwrap_or_else(|| name.clone())
    };
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(x, y) => Formula::Eq(lookup(x, scope), lookup(y, scope)),
        Formula::Rel(r, x, y) => Formula::Rel(*r, lookup(x, scope), lookup(y, scope)),
        Formula::Label(l, x) => Formula::Label(l.clone(), lookup(x, scope)),
        Formula::Member(x, set) => Formula::Member(lookup(x, scope), lookup(set, scope)),
        Formula::Mod {
            residue,
            modulus,
            set,
        } => Formula::Mod {
            residue: *residue,
            modulus: *modulus,
            set: lookup(set, scope),
        },
        Formula::Not(a) => rename_apart(a, scope, names, used).not(),
        Formula::And(a, b) => {
            let a = rename_apart(a, scope, names, used);
            a.and(rename_apart(b, scope, names, used))
        }
        Formula::Or(a, b) => {
            let a = rename_apart(a, scope, names, used);
            a.or(rename_apart(b, scope, names, used))
        }
        Formula::Implies(a, b) => {
            let a = rename_apart(a, scope, names, used);
            a.implies(rename_apart(b, scope, names, used))
        }
        Formula::Quant(q, v, body) => {
            let new_name = if used.insert(v.name.clone()) {
                v.name.clone()
            } else {
                let fresh = names.fresh(&v.name);
                used.insert(fresh.clone());
                fresh
            };
            scope
                .entry(v.name.clone())
                .or_default()
                .push(new_name.clone());
            let body = rename_apart(body, scope, names, used);
            scope.get_mut(&v.name).map(Vec::pop);
            Formula::Quant(
                *q,
                Var {
                    name: new_name,
                    sort: v.sort,
                },
                Box::new(body),
            )
        }
    }
}

// Input is in NNF with distinct binder names.
fn pull(f: Formula, prefix: &mut Vec<(Quantifier, Var)>) -> Formula {
    match f {
        Formula::Quant(q, v, body) => {
            prefix.push((q, v));
            pull(*body, prefix)
        }
        Formula::And(a, b) => {
            let a = pull(*a, prefix);
            let b = pull(*b, prefix);
            a.and(b)
        }
        Formula::Or(a, b) => {
            let a = pull(*a, prefix);
            let b = pull(*b, prefix);
            a.or(b)
        }
        other => other,
    }
}
