use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits for the exponential searches.
///
/// These are configuration values. Exceeding one is an explicit
/// [`Error::GuardExceeded`], never a silent truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guards {
    pub canonicalize: usize,
    pub automorphisms: usize,
    /// Full 2^n-element scans in the complex algebra.
    pub element_checks: usize,
    pub enumerate_fsiase: usize,
    pub enumerate_fas: usize,
    pub homogeneity: usize,
    /// Largest n for which the closed-form FAS count has been checked
    /// against exhaustive enumeration.
    pub formula_validated: usize,
    /// Upper bound on `depth · log2(n)` for naive quantifier expansion.
    pub eval_work_log2: u32,
    /// Output-size cap for the generic-structure builder.
    pub generic_atoms: usize,
    /// Size cap for embedding searches.
    pub embedding: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            canonicalize: 7,
            automorphisms: 8,
            element_checks: 8,
            enumerate_fsiase: 5,
            enumerate_fas: 4,
            homogeneity: 4,
            formula_validated: 4,
            eval_work_log2: 30,
            generic_atoms: 256,
            embedding: 64,
        }
    }
}

impl Guards {
    /// Guards with every limit effectively lifted.
    pub fn unlimited() -> Self {
        Guards {
            canonicalize: usize::MAX,
            automorphisms: usize::MAX,
            element_checks: 16,
            enumerate_fsiase: usize::MAX,
            enumerate_fas: usize::MAX,
            homogeneity: usize::MAX,
            formula_validated: usize::MAX,
            eval_work_log2: 64,
            generic_atoms: usize::MAX,
            embedding: usize::MAX,
        }
    }

    pub(crate) fn check(what: &'static str, n: usize, limit: usize) -> Result<()> {
        if n > limit {
            Err(Error::GuardExceeded { what, n, limit })
        } else {
            Ok(())
        }
    }
}
