//! Named properties of structures, shared by counting and estimation.

use std::fmt;
use std::str::FromStr;

use crate::algebra::is_associative;
use crate::config::Guards;
use crate::enumerate::Class;
use crate::error::{Error, Result};
use crate::fol::{evaluate, Sentence, Signature};
use crate::iso::is_rigid;
use crate::structure::Model;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    All,
    /// `f = id` and `|I| = 1`.
    SymmetricIntegral,
    /// Only the trivial automorphism.
    Rigid,
    /// The complex algebra is associative.
    Associative,
    Sentence(Box<Sentence>),
}

impl Predicate {
    pub fn name(&self) -> String {
        match self {
            Predicate::All => "all".into(),
            Predicate::SymmetricIntegral => "symmetric-integral".into(),
            Predicate::Rigid => "rigid".into(),
            Predicate::Associative => "associative".into(),
            Predicate::Sentence(_) => "sentence".into(),
        }
    }

    /// The class a predicate ranges over unless told otherwise.
    pub fn default_class(&self) -> Class {
        match self {
            Predicate::SymmetricIntegral => Class::Fas,
            Predicate::Sentence(s) if s.signature == Some(Signature::IForm) => Class::Fas,
            _ => Class::Fsiase,
        }
    }

    pub fn holds(&self, m: &dyn Model, guards: &Guards) -> Result<bool> {
        match self {
            Predicate::All => Ok(true),
            Predicate::SymmetricIntegral => Ok(m.is_symmetric() && m.identity_atoms().len() == 1),
            Predicate::Rigid => is_rigid(m, guards),
            Predicate::Associative => Ok(is_associative(m)),
            Predicate::Sentence(s) => evaluate(s, m, guards),
        }
    }
}

impl FromStr for Predicate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Predicate::All),
            "symmetric-integral" | "si" => Ok(Predicate::SymmetricIntegral),
            "rigid" => Ok(Predicate::Rigid),
            "associative" => Ok(Predicate::Associative),
            other => Err(Error::UnknownPredicate(other.to_string())),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Sentence(s) => write!(f, "sentence `{s}`"),
            other => f.write_str(&other.name()),
        }
    }
}
