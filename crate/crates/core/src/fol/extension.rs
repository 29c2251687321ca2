use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{evaluate_formula, Formula, Sentence, Signature, Term};
use crate::error::{Error, Result};
use crate::structure::Model;

/// Parameters of one extension axiom: `m` premise variables and the
/// consistency pattern of the witness `y`. A bit `0` asks for the triple,
/// `1` asks for its absence.
///
/// `cij[i]` holds the entries `c_ij` for `j = i..m` (zero-based), so the
/// matrix is stored upper-triangular including the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtensionAxiom {
    pub m: usize,
    pub c: u8,
    pub ci: Vec<u8>,
    pub cij: Vec<Vec<u8>>,
}

/// Parses the [`ExtensionAxiom::id`] form.
impl std::str::FromStr for ExtensionAxiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPattern(format!("`{s}` (expected e.g. m1:c0:ci0:cij1)"));
        let parts: Vec<&str> = s.split(':').collect();
        let [m, c, ci, cij] = parts[..] else { return Err(bad()) };
        let bits = |field: &str, prefix: &str| -> Result<Vec<u8>> {
            field
                .strip_prefix(prefix)
                .ok_or_else(bad)?
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(bad()),
                })
                .collect()
        };
        let m: usize = m.strip_prefix('m').and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let c = bits(c, "c")?;
        let ci = bits(ci, "ci")?;
        let flat = bits(cij, "cij")?;
        if c.len() != 1 || ci.len() != m || flat.len() != m * (m + 1) / 2 {
            return Err(bad());
        }
        let mut rest = flat.into_iter();
        let cij = (0..m).map(|i| rest.by_ref().take(m - i).collect()).collect();
        ExtensionAxiom::new(c[0], ci, cij)
    }
}

fn lit(bit: u8, atom: Formula) -> Formula {
    if bit == 0 {
        atom
    } else {
        Formula::not(atom)
    }
}

impl ExtensionAxiom {
    pub fn new(c: u8, ci: Vec<u8>, cij: Vec<Vec<u8>>) -> Result<Self> {
        let p = ExtensionAxiom {
            m: ci.len(),
            c,
            ci,
            cij,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bits_ok = std::iter::once(&self.c)
            .chain(&self.ci)
            .chain(self.cij.iter().flatten())
            .all(|&b| b <= 1);
        let shape_ok = self.ci.len() == self.m
            && self.cij.len() == self.m
            && self.cij.iter().enumerate().all(|(i, row)| row.len() == self.m - i);
        if bits_ok && shape_ok {
            Ok(())
        } else {
            Err(Error::InvalidPattern(format!("{self:?}")))
        }
    }

    /// `1 + m + m(m+1)/2`.
    pub fn pattern_bits(m: usize) -> usize {
        1 + m + m * (m + 1) / 2
    }

    /// Unpacks `bits` in the order `c, c_1..c_m, c_11, c_12, .., c_1m, c_22, ..`.
    pub fn from_bits(m: usize, bits: u64) -> Self {
        let mut k = 0;
        let mut next = || {
            let b = (bits >> k & 1) as u8;
            k += 1;
            b
        };
        let c = next();
        let ci = (0..m).map(|_| next()).collect();
        let cij = (0..m).map(|i| (i..m).map(|_| next()).collect()).collect();
        ExtensionAxiom { m, c, ci, cij }
    }

    pub fn to_bits(&self) -> u64 {
        std::iter::once(&self.c)
            .chain(&self.ci)
            .chain(self.cij.iter().flatten())
            .enumerate()
            .fold(0, |acc, (k, &b)| acc | (b as u64) << k)
    }

    /// Every pattern with `m` premise variables.
    pub fn all(m: usize) -> impl Iterator<Item = ExtensionAxiom> {
        let bits = Self::pattern_bits(m);
        assert!(bits < 64, "too many pattern bits");
        (0..1u64 << bits).map(move |b| Self::from_bits(m, b))
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let bits = Self::pattern_bits(m);
        Self::from_bits(m, rng.gen::<u64>() & ((1u64 << bits) - 1))
    }

    /// `c_ij` for any `i, j < m`.
    pub fn c_at(&self, i: usize, j: usize) -> u8 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.cij[i][j - i]
    }

    /// A short identifier, e.g. `m1:c0:ci0:cij1`.
    pub fn id(&self) -> String {
        let ci: String = self.ci.iter().map(|b| b.to_string()).collect();
        let cij: String = self.cij.iter().flatten().map(|b| b.to_string()).collect();
        format!("m{}:c{}:ci{}:cij{}", self.m, self.c, ci, cij)
    }

    /// The sentence
    /// `∀x_1..x_m. ⋀ x_i ≠ e → ∃y. y ≠ e ∧ ⋀ y ≠ x_i ∧ ¬^c T(y,y,y) ∧
    /// ⋀ ¬^{c_i} T(x_i,y,y) ∧ ⋀_{i≤j} ¬^{c_ij} T(x_i,x_j,y)`.
    ///
    /// Variables are read literally: nothing forces the `x_i` to be
    /// distinct. Variable ids: `x_i` is `i − 1`, `y` is `m`.
    pub fn sentence(&self) -> Sentence {
        let m = self.m;
        let x = Term::Var;
        let y = || Term::Var(m);
        let ne = |a: Term, b: Term| Formula::not(Formula::Eq(a, b));
        let mut parts = vec![ne(y(), Term::E)];
        parts.extend((0..m).map(|i| ne(y(), x(i))));
        parts.push(lit(self.c, Formula::Rel(y(), y(), y())));
        parts.extend((0..m).map(|i| lit(self.ci[i], Formula::Rel(x(i), y(), y()))));
        for i in 0..m {
            for j in i..m {
                parts.push(lit(self.c_at(i, j), Formula::Rel(x(i), x(j), y())));
            }
        }
        let body = Formula::exists(vec![m], Formula::conjunction(parts).expect("non-empty"));
        let root = match Formula::conjunction((0..m).map(|i| ne(x(i), Term::E))) {
            None => body,
            Some(premise) => Formula::forall((0..m).collect(), Formula::implies(premise, body)),
        };
        let mut vars: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        vars.push("y".into());
        Sentence {
            vars,
            root,
            signature: Some(Signature::EForm),
        }
    }

    /// Evaluates the sentence's matrix with `x_i := xs[i]` through the
    /// generic evaluator.
    pub fn instance_holds<M: Model + ?Sized>(&self, m: &M, xs: &[usize]) -> Result<bool> {
        assert_eq!(xs.len(), self.m, "one atom per premise variable");
        let s = self.sentence();
        let matrix = match &s.root {
            Formula::Forall(_, body) => body.as_ref(),
            other => other,
        };
        let mut env = vec![0; self.m + 1];
        env[..self.m].copy_from_slice(xs);
        evaluate_formula(matrix, m, &mut env)
    }

    fn identity_of<M: Model + ?Sized>(m: &M) -> Result<usize> {
        m.identity_constant()
            .ok_or_else(|| Error::Precondition("extension axioms need the constant e".into()))
    }

    /// Direct search: the first `y` witnessing the pattern for `xs`.
    pub fn witness<M: Model + ?Sized>(&self, m: &M, xs: &[usize]) -> Result<Option<usize>> {
        let e = Self::identity_of(m)?;
        Ok((0..m.size()).find(|&y| self.is_witness(m, e, xs, y)))
    }

    fn is_witness<M: Model + ?Sized>(&self, m: &M, e: usize, xs: &[usize], y: usize) -> bool {
        let want = |bit: u8, present: bool| present == (bit == 0);
        y != e
            && !xs.contains(&y)
            && want(self.c, m.holds(y, y, y))
            && xs.iter().zip(&self.ci).all(|(&x, &b)| want(b, m.holds(x, y, y)))
            && (0..xs.len()).all(|i| (i..xs.len()).all(|j| want(self.c_at(i, j), m.holds(xs[i], xs[j], y))))
    }

    /// Direct search over every tuple of non-identity atoms (repetitions
    /// allowed), in lexicographic order; returns the first tuple without a
    /// witness.
    pub fn first_failure<M: Model + ?Sized>(&self, m: &M) -> Result<Option<Vec<usize>>> {
        let e = Self::identity_of(m)?;
        let atoms: Vec<usize> = (0..m.size()).filter(|&a| a != e).collect();
        if self.m > 0 && atoms.is_empty() {
            return Ok(None);
        }
        let mut idx = vec![0usize; self.m];
        loop {
            let xs: Vec<usize> = idx.iter().map(|&k| atoms[k]).collect();
            if !(0..m.size()).any(|y| self.is_witness(m, e, &xs, y)) {
                return Ok(Some(xs));
            }
            // odometer
            let mut k = self.m;
            loop {
                if k == 0 {
                    return Ok(None);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < atoms.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Whether the structure satisfies the axiom, by direct search.
    pub fn holds_directly<M: Model + ?Sized>(&self, m: &M) -> Result<bool> {
        Ok(self.first_failure(m)?.is_none())
    }

    /// Whether the pattern can be met at all when `x_i = x_j` for the
    /// listed positions: repeated variables force equal bits.
    pub fn consistent_on(&self, xs: &[usize]) -> bool {
        let m = self.m;
        (0..m).all(|i| {
            (0..m).all(|j| {
                xs[i] != xs[j]
                    || (self.ci[i] == self.ci[j]
                        && (0..m).all(|k| {
                            self.c_at(i, k) == self.c_at(j, k) && (xs[k] != xs[i] || self.c_at(i, i) == self.c_at(i, k))
                        }))
            })
        })
    }
}
