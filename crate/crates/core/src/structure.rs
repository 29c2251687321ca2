use crate::axioms::check_axioms;
use crate::error::{Error, Result};
use crate::triple::{Triple, TripleSet};

/// Read access shared by both signatures.
///
/// An [`EStructure`] is viewed as the `{f, T, I}` structure with `f = id`
/// and `I = {e}`.
pub trait Model {
    fn size(&self) -> usize;
    fn converse(&self, a: usize) -> usize;
    fn is_identity(&self, a: usize) -> bool;
    /// The constant `e`, when the structure carries one.
    fn identity_constant(&self) -> Option<usize>;
    fn triples(&self) -> &TripleSet;

    #[inline]
    fn holds(&self, a: usize, b: usize, c: usize) -> bool {
        self.triples().contains(a, b, c)
    }

    fn identity_atoms(&self) -> Vec<usize> {
        (0..self.size()).filter(|&a| self.is_identity(a)).collect()
    }

    fn is_symmetric(&self) -> bool {
        (0..self.size()).all(|a| self.converse(a) == a)
    }
}

pub(crate) fn validate_involution(n: usize, f: &[usize]) -> Result<()> {
    if f.len() != n {
        return Err(Error::InvalidStructure(format!(
            "involution has {} entries for {n} atoms",
            f.len()
        )));
    }
    for (a, &fa) in f.iter().enumerate() {
        if fa >= n {
            return Err(Error::IndexOutOfRange { index: fa, n });
        }
        if f[fa] != a {
            return Err(Error::InvalidStructure(format!(
                "f is not an involution: f(f({a})) = {}",
                f[fa]
            )));
        }
    }
    Ok(())
}

/// A finite `{f, T, I}`-structure.
///
/// Construction checks only the shape (involution, nonempty `I`, indices in
/// range); the axioms (P) and (I) are reported by [`check_axioms`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AtomStructure {
    n: usize,
    converse: Vec<usize>,
    identity: Vec<bool>,
    triples: TripleSet,
}

impl AtomStructure {
    pub fn new(
        n: usize,
        converse: Vec<usize>,
        identity_atoms: &[usize],
        triples: TripleSet,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStructure("empty universe".into()));
        }
        validate_involution(n, &converse)?;
        if identity_atoms.is_empty() {
            return Err(Error::InvalidStructure("identity set is empty".into()));
        }
        let mut identity = vec![false; n];
        for &i in identity_atoms {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            identity[i] = true;
        }
        if triples.atoms() != n {
            return Err(Error::InvalidStructure(format!(
                "triple set over {} atoms, structure has {n}",
                triples.atoms()
            )));
        }
        Ok(AtomStructure {
            n,
            converse,
            identity,
            triples,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn converse_map(&self) -> &[usize] {
        &self.converse
    }

    pub fn identity_mask(&self) -> &[bool] {
        &self.identity
    }

    pub fn is_integral(&self) -> bool {
        self.identity.iter().filter(|&&b| b).count() == 1
    }

    pub fn triples(&self) -> &TripleSet {
        &self.triples
    }

    pub fn identity_atoms(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| self.identity[a]).collect()
    }

    pub fn triples_mut(&mut self) -> &mut TripleSet {
        &mut self.triples
    }

    /// `π·A`: atom `a` of `self` becomes atom `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> AtomStructure {
        let n = self.n;
        let mut inv = vec![0; n];
        for (a, &p) in perm.iter().enumerate() {
            inv[p] = a;
        }
        let converse = (0..n).map(|x| perm[self.converse[inv[x]]]).collect();
        let identity_atoms: Vec<usize> = (0..n).filter(|&a| self.identity[a]).map(|a| perm[a]).collect();
        let triples = TripleSet::from_triples(n, self.triples.iter().map(|t| t.map(|x| perm[x])));
        AtomStructure::new(n, converse, &identity_atoms, triples).expect("permutation preserves shape")
    }
}

impl Model for AtomStructure {
    fn size(&self) -> usize {
        self.n
    }
    fn converse(&self, a: usize) -> usize {
        self.converse[a]
    }
    fn is_identity(&self, a: usize) -> bool {
        self.identity[a]
    }
    fn identity_constant(&self) -> Option<usize> {
        None
    }
    fn triples(&self) -> &TripleSet {
        &self.triples
    }
}

/// A finite `{f, e, T}`-structure with `f` the identity map.
///
/// The type maintains (II): `(a, e, a) ∈ T` for every `a` and
/// `(a, e, b) ∉ T` for `a ≠ b`. Closure under Peircean transforms (IP) is
/// checked separately with [`EStructure::satisfies_ip`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EStructure {
    n: usize,
    e: usize,
    triples: TripleSet,
}

impl EStructure {
    pub fn new(n: usize, e: usize, triples: TripleSet) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStructure("empty universe".into()));
        }
        if e >= n {
            return Err(Error::IndexOutOfRange { index: e, n });
        }
        if triples.atoms() != n {
            return Err(Error::InvalidStructure(format!(
                "triple set over {} atoms, structure has {n}",
                triples.atoms()
            )));
        }
        for a in 0..n {
            for b in 0..n {
                if (a == b) != triples.contains(a, e, b) {
                    return Err(Error::InvalidStructure(format!(
                        "(II) fails at ({a},{e},{b})"
                    )));
                }
            }
        }
        Ok(EStructure { n, e, triples })
    }

    /// The one-atom structure `{e}` with `T = {(e,e,e)}`.
    pub fn trivial() -> Self {
        EStructure::new(1, 0, TripleSet::from_triples(1, [Triple::new(0, 0, 0)])).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn triples(&self) -> &TripleSet {
        &self.triples
    }

    /// Diversity atoms in ascending order.
    pub fn diversity_atoms(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| a != self.e).collect()
    }

    /// (IP) with `f = id`: `T` is closed under all coordinate permutations.
    pub fn satisfies_ip(&self) -> bool {
        self.ip_witness().is_none()
    }

    pub(crate) fn ip_witness(&self) -> Option<Triple> {
        self.triples.iter().find(|t| {
            !self.triples.contains(t.a, t.c, t.b) || !self.triples.contains(t.c, t.b, t.a)
        })
    }

    /// Whether the cycle `[a,b,c]` (all six permutations) is consistent.
    pub fn cycle_consistent(&self, a: usize, b: usize, c: usize) -> bool {
        self.triples.contains(a, b, c)
    }

    /// `π·E` for a permutation of the universe.
    pub fn permuted(&self, perm: &[usize]) -> EStructure {
        let triples = TripleSet::from_triples(self.n, self.triples.iter().map(|t| t.map(|x| perm[x])));
        EStructure::new(self.n, perm[self.e], triples).expect("permutation preserves (II)")
    }

    pub(crate) fn from_parts_unchecked(n: usize, e: usize, triples: TripleSet) -> Self {
        debug_assert!(EStructure::new(n, e, triples.clone()).is_ok());
        EStructure { n, e, triples }
    }
}

impl Model for EStructure {
    fn size(&self) -> usize {
        self.n
    }
    fn converse(&self, a: usize) -> usize {
        a
    }
    fn is_identity(&self, a: usize) -> bool {
        a == self.e
    }
    fn identity_constant(&self) -> Option<usize> {
        Some(self.e)
    }
    fn triples(&self) -> &TripleSet {
        &self.triples
    }
}

/// Re-signs a symmetric integral member of FAS with `e` as a constant.
pub fn convert_to_e_form(a: &AtomStructure) -> Result<EStructure> {
    let report = check_axioms(a);
    if !report.symmetric {
        return Err(Error::Precondition("structure is not symmetric".into()));
    }
    if !report.integral {
        return Err(Error::Precondition(format!(
            "structure is not integral (|I| = {})",
            a.identity_atoms().len()
        )));
    }
    if !report.satisfies_p || !report.satisfies_i {
        return Err(Error::Precondition("structure violates (P) or (I)".into()));
    }
    let e = a.identity_atoms()[0];
    EStructure::new(a.n, e, a.triples.clone())
}

/// The `{f, T, I}` form of an FSIAS_e structure: `f = id`, `I = {e}`.
pub fn convert_from_e_form(e: &EStructure) -> Result<AtomStructure> {
    if let Some(t) = e.ip_witness() {
        return Err(Error::Precondition(format!("(IP) fails at {t}")));
    }
    AtomStructure::new(e.n, (0..e.n).collect(), &[e.e], e.triples.clone())
}
