//! Recursive-descent parser for the formula text syntax.
//!
//! ```text
//! expr    := imp
//! imp     := disj ("->" disj)*        left-assoc
//! disj    := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := "!" unary | quant | "(" expr ")" | atom
//! quant   := ("E"|"A") var "." expr | ("ES"|"AS") SETVAR "." expr
//! atom    := parent(x,y) | edge(x,y) | lab_NAME(x) | x = y | in(x,X)
//!          | mod[a,b](X) | true | false
//! ```
//!
//! A quantifier body extends as far right as possible.

use super::{Formula, FormulaError, Quantifier, Relation, Signature, Sort, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    EqSign,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::EqSign => "`=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'=' => Tok::EqSign,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..=i];
                let n = digits.parse::<u64>().map_err(|_| FormulaError::Syntax {
                    pos: start,
                    message: format!("number `{digits}` out of range"),
                })?;
                Tok::Nat(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(FormulaError::Syntax {
                    pos: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    sig: &'a Signature,
}

const KEYWORDS: &[&str] = &[
    "E", "A", "ES", "AS", "parent", "edge", "in", "mod", "true", "false",
];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            ))
        }
    }

    fn expr(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.disj()?;
        while *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.disj()?;
            lhs = lhs.implies(rhs);
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conj()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(id) if matches!(id.as_str(), "E" | "A" | "ES" | "AS") => self.quant(&id),
            _ => self.atom(),
        }
    }

    fn quant(&mut self, kw: &str) -> Result<Formula, FormulaError> {
        self.bump();
        let pos = self.pos();
        let name = self.var_name()?;
        let sort = Sort::of_name(&name);
        if matches!(kw, "ES" | "AS") && sort != Sort::Set {
            return Err(FormulaError::SortMismatch {
                pos,
                var: name,
                expected: Sort::Set,
            });
        }
        self.expect(Tok::Dot)?;
        let body = self.expr()?;
        let q = if kw.starts_with('E') {
            Quantifier::Exists
        } else {
            Quantifier::Forall
        };
        Ok(Formula::Quant(q, Var { name, sort }, Box::new(body)))
    }

    fn var_name(&mut self) -> Result<String, FormulaError> {
        match self.peek().clone() {
            Tok::Ident(id) if !KEYWORDS.contains(&id.as_str()) && !id.starts_with("lab_") => {
                self.bump();
                Ok(id)
            }
            other => self.syntax(format!("expected a variable, found {}", other.describe())),
        }
    }

    fn var_of(&mut self, expected: Sort) -> Result<String, FormulaError> {
        let pos = self.pos();
        let name = self.var_name()?;
        if Sort::of_name(&name) != expected {
            return Err(FormulaError::SortMismatch {
                pos,
                var: name,
                expected,
            });
        }
        Ok(name)
    }

    fn nat(&mut self) -> Result<u32, FormulaError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                let n = u32::try_from(n).or_else(|_| self.syntax("number out of range"))?;
                self.bump();
                Ok(n)
            }
            other => self.syntax(format!("expected a number, found {}", other.describe())),
        }
    }

    fn binary_args(&mut self) -> Result<(String, String), FormulaError> {
        self.expect(Tok::LParen)?;
        let x = self.var_of(Sort::Element)?;
        self.expect(Tok::Comma)?;
        let y = self.var_of(Sort::Element)?;
        self.expect(Tok::RParen)?;
        Ok((x, y))
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let pos = self.pos();
        let id = match self.peek().clone() {
            Tok::Ident(id) => id,
            other => return self.syntax(format!("expected a formula, found {}", other.describe())),
        };
        match id.as_str() {
            "true" => {
                self.bump();
                Ok(Formula::True)
            }
            "false" => {
                self.bump();
                Ok(Formula::False)
            }
            "parent" | "edge" => {
                self.bump();
                let rel = if id == "parent" {
                    Relation::Parent
                } else {
                    Relation::Edge
                };
                if rel != self.sig.relation() {
                    return Err(FormulaError::WrongRelation {
                        pos,
                        found: rel,
                        expected: self.sig.relation(),
                    });
                }
                let (x, y) = self.binary_args()?;
                Ok(Formula::Rel(rel, x, y))
            }
            "in" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let x = self.var_of(Sort::Element)?;
                self.expect(Tok::Comma)?;
                let set = self.var_of(Sort::Set)?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Member(x, set))
            }
            "mod" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let residue = self.nat()?;
                self.expect(Tok::Comma)?;
                let modulus = self.nat()?;
                self.expect(Tok::RBracket)?;
                if modulus == 0 || residue >= modulus {
                    return Err(FormulaError::BadModulus {
                        pos,
                        residue,
                        modulus,
                    });
                }
                self.expect(Tok::LParen)?;
                let set = self.var_of(Sort::Set)?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Mod {
                    residue,
                    modulus,
                    set,
                })
            }
            label if label.starts_with("lab_") => {
                let name = &label[4..];
                if name.is_empty() {
                    return self.syntax("empty label name after `lab_`");
                }
                if !self.sig.contains(name) {
                    return Err(FormulaError::UnknownLabel {
                        pos,
                        label: name.to_string(),
                    });
                }
                let name = name.to_string();
                self.bump();
                self.expect(Tok::LParen)?;
                let x = self.var_of(Sort::Element)?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Label(name, x))
            }
            _ => {
                // `x = y`, or an unknown predicate
                let x = self.var_name()?;
                if *self.peek() == Tok::LParen {
                    return Err(FormulaError::Syntax {
                        pos,
                        message: format!("unknown predicate `{x}`"),
                    });
                }
                self.expect(Tok::EqSign)?;
                if Sort::of_name(&x) != Sort::Element {
                    return Err(FormulaError::SortMismatch {
                        pos,
                        var: x,
                        expected: Sort::Element,
                    });
                }
                let y = self.var_of(Sort::Element)?;
                Ok(Formula::Eq(x, y))
            }
        }
    }
}

/// Parses a formula; free variables are allowed (see [`Formula::free_vars`]).
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, sig };
    let f = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax(format!("unexpected {}", p.peek().describe()));
    }
    Ok(f)
}

/// Parses and rejects formulas with free variables.
pub fn parse_sentence(text: &str, sig: &Signature) -> Result<Formula, FormulaError> {
    let f = parse(text, sig)?;
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(FormulaError::FreeVariable(v.name));
    }
    Ok(f)
}
