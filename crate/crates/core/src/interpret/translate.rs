use std::collections::HashMap;

use crate::formula::{Formula, NameGen, Quantifier, Relation, Sort, Var};

use super::{InterpretError, Interpretation};

/// Copy of `f` with free variables renamed by `subst` and every bound
/// variable replaced by a fresh name from `names`.
pub(crate) fn instantiate(
    f: &Formula,
    subst: &HashMap<String, String>,
    names: &mut NameGen,
) -> Formula {
    let map = |v: &String| subst.get(v).cloned().unwrap_or_else(|| v.clone());
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::Eq(map(a), map(b)),
        Formula::Rel(r, a, b) => Formula::Rel(*r, map(a), map(b)),
        Formula::Label(l, a) => Formula::Label(l.clone(), map(a)),
        Formula::Member(a, s) => Formula::Member(map(a), map(s)),
        Formula::Mod {
            residue,
            modulus,
            set,
        } => Formula::Mod {
            residue: *residue,
            modulus: *modulus,
            set: map(set),
        },
        Formula::Not(a) => instantiate(a, subst, names).not(),
        Formula::And(a, b) => instantiate(a, subst, names).and(instantiate(b, subst, names)),
        Formula::Or(a, b) => instantiate(a, subst, names).or(instantiate(b, subst, names)),
        Formula::Implies(a, b) => {
            instantiate(a, subst, names).implies(instantiate(b, subst, names))
        }
        Formula::Quant(q, v, body) => {
            let fresh = names.fresh(&v.name);
            let mut inner = subst.clone();
            inner.insert(v.name.clone(), fresh.clone());
            Formula::Quant(
                *q,
                Var {
                    name: fresh,
                    sort: v.sort,
                },
                Box::new(instantiate(body, &inner, names)),
            )
        }
    }
}

/// `φ^I`: relativizes quantifiers to `ν` and replaces `edge` atoms by `η`.
pub fn translate(phi: &Formula, interp: &Interpretation) -> Result<Formula, InterpretError> {
    // instantiate renames every bound variable of ν and η, so only the
    // names of φ need to be avoided
    let mut names = NameGen::new(phi.var_names());
    go(phi, interp, &mut names)
}

fn nu(interp: &Interpretation, var: &str, names: &mut NameGen) -> Formula {
    let subst = HashMap::from([(Interpretation::X.to_string(), var.to_string())]);
    instantiate(interp.domain(), &subst, names)
}

fn go(
    f: &Formula,
    interp: &Interpretation,
    names: &mut NameGen,
) -> Result<Formula, InterpretError> {
    Ok(match f {
        Formula::Rel(Relation::Edge, a, b) => {
            let subst = HashMap::from([
                (Interpretation::X.to_string(), a.clone()),
                (Interpretation::Y.to_string(), b.clone()),
            ]);
            instantiate(interp.edge(), &subst, names)
        }
        Formula::Rel(r, ..) => return Err(InterpretError::UndefinedRelation(*r)),
        Formula::True
        | Formula::False
        | Formula::Eq(..)
        | Formula::Label(..)
        | Formula::Member(..)
        | Formula::Mod { .. } => f.clone(),
        Formula::Not(a) => go(a, interp, names)?.not(),
        Formula::And(a, b) => go(a, interp, names)?.and(go(b, interp, names)?),
        Formula::Or(a, b) => go(a, interp, names)?.or(go(b, interp, names)?),
        Formula::Implies(a, b) => go(a, interp, names)?.implies(go(b, interp, names)?),
        Formula::Quant(q, v, body) => {
            let guard = match v.sort {
                Sort::Element => nu(interp, &v.name, names),
                Sort::Set => {
                    let y = names.fresh("y");
                    let inside = nu(interp, &y, names);
                    Formula::forall(
                        Var::element(y.clone()),
                        Formula::member(y, v.name.clone()).implies(inside),
                    )
                }
            };
            let body = go(body, interp, names)?;
            let body = match q {
                Quantifier::Exists => guard.and(body),
                Quantifier::Forall => guard.implies(body),
            };
            Formula::Quant(*q, v.clone(), Box::new(body))
        }
    })
}
