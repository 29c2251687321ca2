//! Peircean transforms, cycles and the cycle partition of `U³`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{validate_involution, AtomStructure, EStructure};
use crate::triple::{Triple, TripleSet};

/// The six Peircean transforms of `t` under the converse map `f`, in the
/// order `(a,b,c), (fa,c,b), (b,fc,fa), (fb,fa,fc), (fc,a,fb), (c,fb,a)`.
pub fn peircean_transforms(t: Triple, f: &[usize]) -> [Triple; 6] {
    let Triple { a, b, c } = t;
    [
        Triple::new(a, b, c),
        Triple::new(f[a], c, b),
        Triple::new(b, f[c], f[a]),
        Triple::new(f[b], f[a], f[c]),
        Triple::new(f[c], a, f[b]),
        Triple::new(c, f[b], a),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleKind {
    Identity,
    Diversity,
}

/// A Peircean orbit. Members are sorted, so the representative is the
/// lexicographically least member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cycle {
    members: Vec<Triple>,
    kind: CycleKind,
}

impl Cycle {
    pub fn members(&self) -> &[Triple] {
        &self.members
    }

    pub fn representative(&self) -> Triple {
        self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn kind(&self) -> CycleKind {
        self.kind
    }

    pub fn is_identity(&self) -> bool {
        self.kind == CycleKind::Identity
    }
}

/// The cycle `[a,b,c]` of `t`, classified against the identity mask.
pub fn cycle_of(t: Triple, f: &[usize], identity: &[bool]) -> Result<Cycle> {
    let n = f.len();
    for x in t.as_array() {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, n });
        }
    }
    if identity.len() != n {
        return Err(Error::InvalidStructure(format!(
            "identity mask has {} entries for {n} atoms",
            identity.len()
        )));
    }
    if let Some(&bad) = f.iter().find(|&&x| x >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    Ok(orbit(t, f, identity))
}

fn orbit(t: Triple, f: &[usize], identity: &[bool]) -> Cycle {
    let mut members = peircean_transforms(t, f).to_vec();
    members.sort_unstable();
    members.dedup();
    let kind = if members
        .iter()
        .any(|m| identity[m.a] || identity[m.b] || identity[m.c])
    {
        CycleKind::Identity
    } else {
        CycleKind::Diversity
    };
    Cycle { members, kind }
}

/// How the identity is given: an identity set `I` or the constant `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityData {
    Set(Vec<usize>),
    Atom(usize),
}

impl IdentityData {
    fn mask(&self, n: usize) -> Result<Vec<bool>> {
        let atoms: &[usize] = match self {
            IdentityData::Set(s) => s,
            IdentityData::Atom(e) => std::slice::from_ref(e),
        };
        if atoms.is_empty() {
            return Err(Error::InvalidStructure("identity set is empty".into()));
        }
        let mut mask = vec![false; n];
        for &i in atoms {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            mask[i] = true;
        }
        Ok(mask)
    }
}

/// Counts of diversity cycles by size.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SizeCensus {
    pub c1: u64,
    pub c2: u64,
    pub c3: u64,
    pub c6: u64,
}

impl SizeCensus {
    pub fn total(&self) -> u64 {
        self.c1 + self.c2 + self.c3 + self.c6
    }

    pub fn triples(&self) -> u64 {
        self.c1 + 2 * self.c2 + 3 * self.c3 + 6 * self.c6
    }
}

/// The partition of all `n³` triples into cycles for a fixed frame
/// `⟨U; f, I⟩`. Cycles are ordered by representative.
#[derive(Debug, Clone)]
pub struct CycleTable {
    n: usize,
    converse: Vec<usize>,
    identity: Vec<bool>,
    cycles: Vec<Cycle>,
    triple_to_cycle: Vec<u32>,
    census: SizeCensus,
}

impl CycleTable {
    pub fn new(n: usize, converse: &[usize], identity: &IdentityData) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStructure("empty universe".into()));
        }
        validate_involution(n, converse)?;
        let mask = identity.mask(n)?;
        Ok(Self::build(n, converse.to_vec(), mask))
    }

    /// The frame of the symmetric integral class: `f = id`, identity `e`.
    pub fn symmetric(n: usize, e: usize) -> Result<Self> {
        let f: Vec<usize> = (0..n).collect();
        Self::new(n, &f, &IdentityData::Atom(e))
    }

    pub fn for_structure(a: &AtomStructure) -> Self {
        Self::build(a.n(), a.converse_map().to_vec(), a.identity_mask().to_vec())
    }

    fn build(n: usize, converse: Vec<usize>, identity: Vec<bool>) -> Self {
        const UNSET: u32 = u32::MAX;
        let slots = n * n * n;
        let mut triple_to_cycle = vec![UNSET; slots];
        let mut cycles = Vec::new();
        let mut census = SizeCensus::default();
        for idx in 0..slots {
            if triple_to_cycle[idx] != UNSET {
                continue;
            }
            let cycle = orbit(Triple::from_index(idx, n), &converse, &identity);
            let id = cycles.len() as u32;
            for m in &cycle.members {
                triple_to_cycle[m.index(n)] = id;
            }
            if cycle.kind == CycleKind::Diversity {
                match cycle.len() {
                    1 => census.c1 += 1,
                    2 => census.c2 += 1,
                    3 => census.c3 += 1,
                    6 => census.c6 += 1,
                    other => unreachable!("cycle of size {other}"),
                }
            }
            cycles.push(cycle);
        }
        CycleTable {
            n,
            converse,
            identity,
            cycles,
            triple_to_cycle,
            census,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn converse(&self) -> &[usize] {
        &self.converse
    }

    pub fn identity_mask(&self) -> &[bool] {
        &self.identity
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn cycle_index(&self, t: Triple) -> usize {
        self.triple_to_cycle[t.index(self.n)] as usize
    }

    /// Census of diversity cycles by size.
    pub fn census(&self) -> SizeCensus {
        self.census
    }

    pub fn diversity_cycles(&self) -> Vec<usize> {
        self.indices_of(CycleKind::Diversity)
    }

    pub fn identity_cycles(&self) -> Vec<usize> {
        self.indices_of(CycleKind::Identity)
    }

    fn indices_of(&self, kind: CycleKind) -> Vec<usize> {
        (0..self.cycles.len())
            .filter(|&i| self.cycles[i].kind == kind)
            .collect()
    }

    fn is_symmetric_integral(&self) -> Option<usize> {
        let ids: Vec<usize> = (0..self.n).filter(|&a| self.identity[a]).collect();
        let symmetric = self.converse.iter().enumerate().all(|(a, &fa)| a == fa);
        (symmetric && ids.len() == 1).then(|| ids[0])
    }

    /// Inserts the members of the listed cycles into `set`.
    pub fn insert_cycles(&self, set: &mut TripleSet, cycles: impl IntoIterator<Item = usize>) {
        for c in cycles {
            for &m in &self.cycles[c].members {
                set.insert(m);
            }
        }
    }

    /// Union of the listed cycles.
    pub fn union_of(&self, cycles: impl IntoIterator<Item = usize>) -> TripleSet {
        let mut set = TripleSet::empty(self.n);
        self.insert_cycles(&mut set, cycles);
        set
    }

    fn check_chosen(&self, chosen: &[usize]) -> Result<()> {
        for &c in chosen {
            let cycle = self.cycles.get(c).ok_or(Error::IndexOutOfRange {
                index: c,
                n: self.cycles.len(),
            })?;
            if cycle.is_identity() {
                return Err(Error::IdentityCycleChosen(c));
            }
        }
        Ok(())
    }

    /// The forced identity part of an FSIAS_e structure: every `[a,e,a]`.
    pub fn forced_identity_part(&self) -> Result<TripleSet> {
        let e = self.is_symmetric_integral().ok_or_else(|| {
            Error::Precondition("e-form requires f = id and a single identity atom".into())
        })?;
        let mut set = TripleSet::empty(self.n);
        for a in 0..self.n {
            let c = self.cycle_index(Triple::new(a, e, a));
            self.insert_cycles(&mut set, [c]);
        }
        Ok(set)
    }

    /// Builds the e-form structure whose consistent diversity cycles are
    /// exactly `chosen`; the identity part is forced.
    pub fn e_structure_from_cycles(&self, chosen: &[usize]) -> Result<EStructure> {
        self.check_chosen(chosen)?;
        let e = self.is_symmetric_integral().ok_or_else(|| {
            Error::Precondition("e-form requires f = id and a single identity atom".into())
        })?;
        let mut set = self.forced_identity_part()?;
        self.insert_cycles(&mut set, chosen.iter().copied());
        EStructure::new(self.n, e, set)
    }

    /// Builds the `{f, T, I}` structure with the given consistent identity
    /// cycles and diversity cycles. The result satisfies (P); (I) depends on
    /// the identity selection.
    pub fn atom_structure_from_cycles(
        &self,
        identity_cycles: &[usize],
        chosen: &[usize],
    ) -> Result<AtomStructure> {
        self.check_chosen(chosen)?;
        for &c in identity_cycles {
            match self.cycles.get(c) {
                Some(cy) if cy.is_identity() => {}
                Some(_) => {
                    return Err(Error::Precondition(format!(
                        "cycle {c} is not an identity cycle"
                    )))
                }
                None => {
                    return Err(Error::IndexOutOfRange {
                        index: c,
                        n: self.cycles.len(),
                    })
                }
            }
        }
        let mut set = self.union_of(identity_cycles.iter().copied());
        self.insert_cycles(&mut set, chosen.iter().copied());
        let ids: Vec<usize> = (0..self.n).filter(|&a| self.identity[a]).collect();
        AtomStructure::new(self.n, self.converse.clone(), &ids, set)
    }
}
