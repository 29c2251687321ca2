//! A small first-order language over atom structures.
//!
//! Surface syntax (ASCII for the usual connectives):
//!
//! | symbol | meaning       |
//! |--------|---------------|
//! | `forall x, y.` / `exists x.` | quantifiers (bodies extend as far right as possible) |
//! | `!`    | negation      |
//! | `&`    | conjunction   |
//! | `\|`   | disjunction   |
//! | `->`   | implication (right-associative) |
//! | `T(s,t,u)`, `I(t)`, `s = t`, `s != t` | atomic formulas |
//! | `e`, `f(t)` | the identity constant and the converse |
//!
//! Precedence, tightest first: `!`, `&`, `|`, `->`.

mod eval;
mod extension;
mod parse;
mod scan;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use eval::{evaluate, evaluate_formula, quantifier_depth};
pub use extension::ExtensionAxiom;
pub use parse::{parse, parse_in, parse_sentence_file, ParseError};
pub use scan::{zero_one_scan, ScanRow};

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Signature {
    /// `{f, T, I}`.
    IForm,
    /// `{f, e, T}`.
    EForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    E,
    F(Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Forall(Vec<VarId>, Box<Formula>),
    Exists(Vec<VarId>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Rel(Term, Term, Term),
    Ident(Term),
    Eq(Term, Term),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }
    pub fn forall(vars: Vec<VarId>, body: Formula) -> Formula {
        Formula::Forall(vars, Box::new(body))
    }
    pub fn exists(vars: Vec<VarId>, body: Formula) -> Formula {
        Formula::Exists(vars, Box::new(body))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            _ => 5,
        }
    }
}

/// A closed formula together with its variable names.
///
/// Every binder introduces a fresh [`VarId`]; `vars[id]` is its name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    pub vars: Vec<String>,
    pub root: Formula,
    /// `None` when the sentence mentions neither `e` nor `I`.
    pub signature: Option<Signature>,
}

impl Sentence {
    pub fn parse(text: &str) -> Result<Sentence, ParseError> {
        parse(text)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write_formula(&self.root, 0, &mut out);
        out
    }

    /// Number of quantified variables.
    pub fn quantifier_count(&self) -> usize {
        self.vars.len()
    }

    /// `¬self`, sharing variable names.
    pub fn negate(&self) -> Sentence {
        Sentence {
            vars: self.vars.clone(),
            root: Formula::not(self.root.clone()),
            signature: self.signature,
        }
    }

    fn write_term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(&self.vars[*v]),
            Term::E => out.push('e'),
            Term::F(inner) => {
                out.push_str("f(");
                self.write_term(inner, out);
                out.push(')');
            }
        }
    }

    fn write_formula(&self, f: &Formula, ctx: u8, out: &mut String) {
        let paren = f.precedence() < ctx || (f.precedence() == 0 && ctx > 0);
        if paren {
            out.push('(');
        }
        match f {
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                out.push_str(if matches!(f, Formula::Forall(..)) { "forall " } else { "exists " });
                let names: Vec<&str> = vs.iter().map(|v| self.vars[*v].as_str()).collect();
                out.push_str(&names.join(", "));
                out.push_str(". ");
                self.write_formula(body, 0, out);
            }
            Formula::Implies(a, b) => {
                self.write_formula(a, 2, out);
                out.push_str(" -> ");
                self.write_formula(b, 1, out);
            }
            Formula::Or(a, b) => {
                self.write_formula(a, 2, out);
                out.push_str(" | ");
                self.write_formula(b, 3, out);
            }
            Formula::And(a, b) => {
                self.write_formula(a, 3, out);
                out.push_str(" & ");
                self.write_formula(b, 4, out);
            }
            Formula::Not(a) => {
                if let Formula::Eq(l, r) = a.as_ref() {
                    self.write_term(l, out);
                    out.push_str(" != ");
                    self.write_term(r, out);
                    if paren {
                        out.push(')');
                    }
                    return;
                }
                out.push('!');
                self.write_formula(a, 4, out);
            }
            Formula::Rel(a, b, c) => {
                out.push_str("T(");
                self.write_term(a, out);
                out.push_str(", ");
                self.write_term(b, out);
                out.push_str(", ");
                self.write_term(c, out);
                out.push(')');
            }
            Formula::Ident(t) => {
                out.push_str("I(");
                self.write_term(t, out);
                out.push(')');
            }
            Formula::Eq(a, b) => {
                self.write_term(a, out);
                out.push_str(" = ");
                self.write_term(b, out);
            }
        }
        if paren {
            out.push(')');
        }
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Sentence {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

/// `f(x) = x`.
pub const SYMMETRY: &str = "forall x. f(x) = x";
/// (IP) in the `{f, e, T}` signature.
pub const IP: &str = "forall a, b, c. T(a, b, c) -> T(f(a), c, b) & T(c, f(b), a)";
/// (II).
pub const II: &str = "forall a, b. (a = b -> T(a, e, b)) & (T(a, e, b) -> a = b)";
/// (P) in the `{f, T, I}` signature.
pub const P: &str = "forall a, b, c. T(a, b, c) -> T(f(a), c, b) & T(c, f(b), a)";
/// (I).
pub const I: &str = "forall a, b. (a = b -> exists i. I(i) & T(a, i, b)) & ((exists i. I(i) & T(a, i, b)) -> a = b)";

/// The defining sentences of FSIAS_e.
pub fn fsiase_axioms() -> Vec<Sentence> {
    [SYMMETRY, IP, II]
        .into_iter()
        .map(|s| parse_in(s, Signature::EForm).expect("built-in sentence"))
        .collect()
}

/// The defining sentences of FAS.
pub fn fas_axioms() -> Vec<Sentence> {
    [P, I]
        .into_iter()
        .map(|s| parse_in(s, Signature::IForm).expect("built-in sentence"))
        .collect()
}
