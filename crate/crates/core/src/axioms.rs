use serde::{Deserialize, Serialize};

use crate::structure::Model;
use crate::triple::Triple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axiom {
    /// Closure under Peircean transforms.
    P,
    /// `a = b` iff `(a, i, b) ∈ T` for some `i ∈ I`.
    I,
    Symmetric,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Triple(Triple),
    Pair(usize, usize),
    Atom(usize),
}

/// Outcome of [`check_axioms`]. There is one witness per failed flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub satisfies_p: bool,
    pub satisfies_i: bool,
    pub symmetric: bool,
    pub integral: bool,
    pub witnesses: Vec<(Axiom, Witness)>,
}

impl AxiomReport {
    pub fn witness(&self, axiom: Axiom) -> Option<Witness> {
        self.witnesses.iter().find(|(a, _)| *a == axiom).map(|&(_, w)| w)
    }

    /// (P) and (I) both hold, i.e. the structure is in FAS.
    pub fn in_fas(&self) -> bool {
        self.satisfies_p && self.satisfies_i
    }

    pub fn in_fsias(&self) -> bool {
        self.in_fas() && self.symmetric && self.integral
    }
}

/// First triple in slot order whose transforms `(f(a),c,b)` or `(c,f(b),a)`
/// are missing.
pub fn p_witness<M: Model + ?Sized>(m: &M) -> Option<Triple> {
    let t = m.triples();
    t.iter().find(|x| {
        !t.contains(m.converse(x.a), x.c, x.b) || !t.contains(x.c, m.converse(x.b), x.a)
    })
}

/// First pair `(a, b)` where `a = b ⟺ ∃ i ∈ I: (a,i,b) ∈ T` fails.
pub fn i_witness<M: Model + ?Sized>(m: &M) -> Option<(usize, usize)> {
    let n = m.size();
    let ids = m.identity_atoms();
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .find(|&(a, b)| (a == b) != ids.iter().any(|&i| m.holds(a, i, b)))
}

pub fn check_axioms<M: Model + ?Sized>(m: &M) -> AxiomReport {
    let mut witnesses = Vec::new();
    let p = p_witness(m);
    if let Some(t) = p {
        witnesses.push((Axiom::P, Witness::Triple(t)));
    }
    let i = i_witness(m);
    if let Some((a, b)) = i {
        witnesses.push((Axiom::I, Witness::Pair(a, b)));
    }
    let asym = (0..m.size()).find(|&a| m.converse(a) != a);
    if let Some(a) = asym {
        witnesses.push((Axiom::Symmetric, Witness::Atom(a)));
    }
    let ids = m.identity_atoms();
    let integral = ids.len() == 1;
    if !integral {
        witnesses.push((Axiom::Integral, Witness::Pair(ids[0], ids[1])));
    }
    AxiomReport {
        satisfies_p: p.is_none(),
        satisfies_i: i.is_none(),
        symmetric: asym.is_none(),
        integral,
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::AtomStructure;
    use crate::triple::TripleSet;

    fn structure(n: usize, f: Vec<usize>, ids: &[usize], t: &[(usize, usize, usize)]) -> AtomStructure {
        let set = TripleSet::from_triples(n, t.iter().map(|&x| x.into()));
        AtomStructure::new(n, f, ids, set).unwrap()
    }

    #[test]
    fn one_atom() {
        let r = check_axioms(&structure(1, vec![0], &[0], &[(0, 0, 0)]));
        assert!(r.satisfies_p && r.satisfies_i && r.symmetric && r.integral);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn consistent_identity_cycle() {
        let r = check_axioms(&structure(2, vec![0, 1], &[0], &[(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1)]));
        assert!(r.satisfies_p && r.satisfies_i);
    }

    #[test]
    fn missing_transform() {
        let r = check_axioms(&structure(2, vec![0, 1], &[0], &[(0, 0, 0), (1, 0, 1)]));
        assert!(!r.satisfies_p);
        assert_eq!(r.witness(Axiom::P), Some(Witness::Triple(Triple::new(1, 0, 1))));
    }

    #[test]
    fn identity_law_failure() {
        // (1,0,1) absent: atom 1 has no identity triple
        let r = check_axioms(&structure(2, vec![0, 1], &[0], &[(0, 0, 0)]));
        assert!(!r.satisfies_i);
        assert_eq!(r.witness(Axiom::I), Some(Witness::Pair(1, 1)));
    }

    #[test]
    fn non_symmetric_non_integral_flags() {
        let r = check_axioms(&structure(3, vec![0, 2, 1], &[0], &[]));
        assert!(!r.symmetric);
        assert_eq!(r.witness(Axiom::Symmetric), Some(Witness::Atom(1)));
        let r = check_axioms(&structure(2, vec![0, 1], &[0, 1], &[(0, 0, 0), (1, 1, 1)]));
        assert!(!r.integral);
        assert_eq!(r.witness(Axiom::Integral), Some(Witness::Pair(0, 1)));
        assert!(r.in_fas());
    }
}
