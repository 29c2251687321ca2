//! Structure JSON.
//!
//! `{"n": int, "f": [int], "I": [int], "T": [[a,b,c], ...]}` for the
//! `{f, T, I}` form and `{"n": int, "e": int, "T": [...]}` for the e-form.
//! Triples are written in ascending slot order, so serializing a parsed
//! canonical document reproduces it byte for byte.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{AtomStructure, EStructure, Model};
use crate::triple::{Triple, TripleSet};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomJson {
    n: usize,
    f: Vec<usize>,
    #[serde(rename = "I")]
    identity: Vec<usize>,
    #[serde(rename = "T")]
    triples: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EJson {
    n: usize,
    e: usize,
    #[serde(rename = "T")]
    triples: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum AnyJson {
    E(EJson),
    Atom(AtomJson),
}

/// A structure in either signature, as read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyStructure {
    Atom(AtomStructure),
    E(EStructure),
}

impl AnyStructure {
    pub fn as_model(&self) -> &dyn Model {
        match self {
            AnyStructure::Atom(a) => a,
            AnyStructure::E(e) => e,
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            AnyStructure::Atom(a) => atom_to_json(a),
            AnyStructure::E(e) => e_to_json(e),
        }
    }
}

fn triple_list(set: &TripleSet) -> Vec<[usize; 3]> {
    set.iter().map(Triple::as_array).collect()
}

fn triple_set(n: usize, list: &[[usize; 3]]) -> Result<TripleSet> {
    let mut set = TripleSet::empty(n);
    for &[a, b, c] in list {
        for x in [a, b, c] {
            if x >= n {
                return Err(Error::IndexOutOfRange { index: x, n });
            }
        }
        set.insert(Triple::new(a, b, c));
    }
    Ok(set)
}

pub fn atom_to_value(a: &AtomStructure) -> serde_json::Value {
    serde_json::to_value(AtomJson {
        n: a.n(),
        f: a.converse_map().to_vec(),
        identity: a.identity_atoms(),
        triples: triple_list(a.triples()),
    })
    .expect("serializable")
}

pub fn e_to_value(e: &EStructure) -> serde_json::Value {
    serde_json::to_value(EJson {
        n: e.n(),
        e: e.e(),
        triples: triple_list(e.triples()),
    })
    .expect("serializable")
}

pub fn atom_to_json(a: &AtomStructure) -> String {
    atom_to_value(a).to_string()
}

pub fn e_to_json(e: &EStructure) -> String {
    e_to_value(e).to_string()
}

pub fn structure_from_value(v: serde_json::Value) -> Result<AnyStructure> {
    match serde_json::from_value::<AnyJson>(v)? {
        AnyJson::E(j) => {
            if j.n == 0 {
                return Err(Error::InvalidStructure("empty universe".into()));
            }
            let set = triple_set(j.n, &j.triples)?;
            Ok(AnyStructure::E(EStructure::new(j.n, j.e, set)?))
        }
        AnyJson::Atom(j) => {
            if j.n == 0 {
                return Err(Error::InvalidStructure("empty universe".into()));
            }
            let set = triple_set(j.n, &j.triples)?;
            Ok(AnyStructure::Atom(AtomStructure::new(j.n, j.f, &j.identity, set)?))
        }
    }
}

pub fn structure_from_json(text: &str) -> Result<AnyStructure> {
    structure_from_value(serde_json::from_str(text)?)
}

/// Reads a JSON array of structures, a single structure, or JSON lines.
pub fn structures_from_text(text: &str) -> Result<Vec<AnyStructure>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let values: Vec<serde_json::Value> = serde_json::from_str(text)?;
        return values.into_iter().map(structure_from_value).collect();
    }
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(structure_from_json)
        .collect()
}

/// Big integers as decimal strings (`"7660511"`), for exact values that
/// outgrow JSON numbers.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => s.serialize_some(&x.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| t.parse().map_err(D::Error::custom))
                .transpose()
        }
    }
}
