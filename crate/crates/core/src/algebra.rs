//! Complex algebras of atom structures.
//!
//! Elements are subsets of the atoms, encoded as `u64` bit masks (bit `a`
//! set iff atom `a` is below the element). `X·Y = {c : ∃a∈X, b∈Y, (a,b,c) ∈ T}`,
//! converse is applied pointwise through `f`, and `e` is the join of the
//! identity atoms.

use serde::{Deserialize, Serialize};

use crate::axioms::check_axioms;
use crate::config::Guards;
use crate::error::{Error, Result};
use crate::structure::{AtomStructure, Model};
use crate::triple::{Triple, TripleSet};

pub type Element = u64;

const MAX_ATOMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexAlgebra {
    n: usize,
    converse: Vec<usize>,
    identity: Element,
    /// `atom_products[a * n + b]` is the element `a·b`.
    atom_products: Vec<Element>,
}

/// Builds the complex algebra of a member of FAS.
pub fn complex_algebra<M: Model + ?Sized>(m: &M) -> Result<ComplexAlgebra> {
    let report = check_axioms(m);
    if !report.in_fas() {
        return Err(Error::Precondition(format!(
            "complex algebra needs (P) and (I); witnesses {:?}",
            report.witnesses
        )));
    }
    ComplexAlgebra::from_structure_unchecked(m)
}

impl ComplexAlgebra {
    /// Builds the operations without checking (P) or (I).
    pub fn from_structure_unchecked<M: Model + ?Sized>(m: &M) -> Result<Self> {
        let n = m.size();
        Guards::check("complex algebra with 64-bit elements", n, MAX_ATOMS)?;
        let mut atom_products = vec![0; n * n];
        for t in m.triples().iter() {
            atom_products[t.a * n + t.b] |= 1 << t.c;
        }
        let identity = (0..n).filter(|&a| m.is_identity(a)).fold(0, |acc, a| acc | 1 << a);
        Ok(ComplexAlgebra {
            n,
            converse: (0..n).map(|a| m.converse(a)).collect(),
            identity,
            atom_products,
        })
    }

    pub fn atoms(&self) -> usize {
        self.n
    }

    pub fn element_count(&self) -> u128 {
        1u128 << self.n
    }

    pub fn zero(&self) -> Element {
        0
    }

    pub fn one(&self) -> Element {
        if self.n == 64 {
            u64::MAX
        } else {
            (1 << self.n) - 1
        }
    }

    pub fn e(&self) -> Element {
        self.identity
    }

    /// The diversity element `e'`.
    pub fn d(&self) -> Element {
        self.complement(self.identity)
    }

    pub fn join(&self, x: Element, y: Element) -> Element {
        x | y
    }

    pub fn meet(&self, x: Element, y: Element) -> Element {
        x & y
    }

    pub fn complement(&self, x: Element) -> Element {
        !x & self.one()
    }

    pub fn converse(&self, x: Element) -> Element {
        bits(x).fold(0, |acc, a| acc | 1 << self.converse[a])
    }

    pub fn atom_product(&self, a: usize, b: usize) -> Element {
        self.atom_products[a * self.n + b]
    }

    pub fn product(&self, x: Element, y: Element) -> Element {
        let mut out = 0;
        for a in bits(x) {
            for b in bits(y) {
                out |= self.atom_product(a, b);
            }
        }
        out
    }

    /// Full `2^n × 2^n` product table, for exhaustive element scans.
    fn product_table(&self) -> Vec<u16> {
        let size = 1usize << self.n;
        let mut table = vec![0u16; size * size];
        for a in 0..self.n {
            let row = (1usize << a) * size;
            for y in 1..size {
                let low = y & y.wrapping_neg();
                let b = low.trailing_zeros() as usize;
                table[row + y] = table[row + (y ^ low)] | self.atom_product(a, b) as u16;
            }
        }
        for x in 1..size {
            let low = x & x.wrapping_neg();
            if low == x {
                continue;
            }
            for y in 0..size {
                table[x * size + y] = table[(x ^ low) * size + y] | table[low * size + y];
            }
        }
        table
    }
}

fn bits(mut x: Element) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(b)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Boolean,
    Identity,
    Triangle,
    Associativity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub law: Law,
    pub elements: Vec<Element>,
}

/// Result of [`verify_na_axioms`].
///
/// `counterexample` is present iff one of the four law flags is false; it
/// belongs to the first failing law in the order Boolean, identity,
/// triangle, associativity, and is the lexicographically least violating
/// tuple. `product_integral` (`xy = 0 ⟹ x = 0 or y = 0`) is reported on its
/// own and is not the same thing as `|I| = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NAReport {
    pub boolean_ok: bool,
    pub identity_ok: bool,
    pub triangle_ok: bool,
    pub associative: bool,
    pub product_integral: bool,
    pub counterexample: Option<Counterexample>,
}

impl NAReport {
    /// Boolean, identity and triangle laws: membership in NA.
    pub fn is_na(&self) -> bool {
        self.boolean_ok && self.identity_ok && self.triangle_ok
    }

    pub fn is_ra(&self) -> bool {
        self.is_na() && self.associative
    }
}

/// Checks the NA axioms and associativity over every element (or pair, or
/// triple) of the complex algebra.
pub fn verify_na_axioms(c: &ComplexAlgebra, guards: &Guards) -> Result<NAReport> {
    let n = c.n;
    Guards::check("element-level algebra checks", n, guards.element_checks.min(16))?;
    let size = 1usize << n;
    let one = c.one();
    let table = c.product_table();
    let prod = |x: usize, y: usize| table[x * size + y] as usize;
    let conv: Vec<usize> = (0..size).map(|x| c.converse(x as u64) as usize).collect();
    let mut counterexample: Option<Counterexample> = None;
    let mut note = |law: Law, elements: Vec<Element>| {
        if counterexample.is_none() {
            counterexample = Some(Counterexample { law, elements });
        }
    };

    // Boolean reduct: complement laws and De Morgan over all pairs.
    let boolean_bad = (0..size as u64)
        .flat_map(|x| (0..size as u64).map(move |y| (x, y)))
        .find(|&(x, y)| {
            let cx = c.complement(x);
            x & cx != 0
                || x | cx != one
                || c.complement(cx) != x
                || c.complement(x | y) != cx & c.complement(y)
        });
    if let Some((x, y)) = boolean_bad {
        note(Law::Boolean, vec![x, y]);
    }

    let e = c.e() as usize;
    let identity_bad = (0..size).find(|&x| prod(x, e) != x || prod(e, x) != x);
    if let Some(x) = identity_bad {
        note(Law::Identity, vec![x as u64]);
    }

    let mut triangle_bad = None;
    'tri: for x in 0..size {
        for y in 0..size {
            let xy = prod(x, y);
            for z in 0..size {
                let l1 = xy & z == 0;
                let l2 = prod(conv[x], z) & y == 0;
                let l3 = prod(z, conv[y]) & x == 0;
                if l1 != l2 || l2 != l3 {
                    triangle_bad = Some((x, y, z));
                    break 'tri;
                }
            }
        }
    }
    if let Some((x, y, z)) = triangle_bad {
        note(Law::Triangle, vec![x as u64, y as u64, z as u64]);
    }

    let assoc_bad = element_associativity_counterexample(&table, size);
    if let Some(t) = assoc_bad {
        note(Law::Associativity, t.to_vec());
    }

    let product_integral = (1..size).all(|x| (1..size).all(|y| prod(x, y) != 0));

    Ok(NAReport {
        boolean_ok: boolean_bad.is_none(),
        identity_ok: identity_bad.is_none(),
        triangle_ok: triangle_bad.is_none(),
        associative: assoc_bad.is_none(),
        product_integral,
        counterexample,
    })
}

fn element_associativity_counterexample(table: &[u16], size: usize) -> Option<[Element; 3]> {
    for x in 0..size {
        let row_x = &table[x * size..(x + 1) * size];
        for y in 0..size {
            let xy = row_x[y] as usize;
            let row_xy = &table[xy * size..(xy + 1) * size];
            let row_y = &table[y * size..(y + 1) * size];
            let same = row_xy
                .iter()
                .zip(row_y)
                .all(|(&l, &yz)| l == row_x[yz as usize]);
            if !same {
                let z = (0..size)
                    .find(|&z| row_xy[z] != row_x[row_y[z] as usize])
                    .unwrap();
                return Some([x as u64, y as u64, z as u64]);
            }
        }
    }
    None
}

/// Associativity of the complex algebra checked on all element triples.
pub fn is_associative_elementwise(c: &ComplexAlgebra, guards: &Guards) -> Result<bool> {
    Guards::check("element-level algebra checks", c.n, guards.element_checks.min(16))?;
    let size = 1usize << c.n;
    Ok(element_associativity_counterexample(&c.product_table(), size).is_none())
}

/// Least atom triple `(a, b, c)` with `(ab)c ≠ a(bc)`.
pub fn atom_associativity_counterexample<M: Model + ?Sized>(m: &M) -> Option<(usize, usize, usize)> {
    let n = m.size();
    assert!(n <= MAX_ATOMS, "atom-level associativity supports at most 64 atoms");
    let mut prod = vec![0u64; n * n];
    for t in m.triples().iter() {
        prod[t.a * n + t.b] |= 1 << t.c;
    }
    for a in 0..n {
        for b in 0..n {
            let ab = prod[a * n + b];
            for c in 0..n {
                let left = bits(ab).fold(0, |acc, x| acc | prod[x * n + c]);
                let right = bits(prod[b * n + c]).fold(0, |acc, y| acc | prod[a * n + y]);
                if left != right {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// Atom-level associativity: for all atoms `a, b, c, d`,
/// `(∃x: (a,b,x) ∈ T ∧ (x,c,d) ∈ T) ⟺ (∃y: (b,c,y) ∈ T ∧ (a,y,d) ∈ T)`.
pub fn is_associative<M: Model + ?Sized>(m: &M) -> bool {
    atom_associativity_counterexample(m).is_none()
}

/// Recovers the atom structure: atoms are the singletons, `f` is the
/// converse, `I` the atoms below `e`, and `(a,b,c) ∈ T` iff `c ≤ a·b`.
pub fn atom_structure_of(c: &ComplexAlgebra) -> Result<AtomStructure> {
    let n = c.n;
    let converse: Vec<usize> = (0..n)
        .map(|a| c.converse(1 << a).trailing_zeros() as usize)
        .collect();
    let identity: Vec<usize> = (0..n).filter(|&a| c.e() >> a & 1 == 1).collect();
    let mut triples = TripleSet::empty(n);
    for a in 0..n {
        for b in 0..n {
            for x in bits(c.atom_product(a, b)) {
                triples.insert(Triple::new(a, b, x));
            }
        }
    }
    AtomStructure::new(n, converse, &identity, triples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::CycleTable;
    use crate::structure::EStructure;

    fn n2(consistent: bool) -> EStructure {
        let table = CycleTable::symmetric(2, 0).unwrap();
        let chosen = if consistent { table.diversity_cycles() } else { vec![] };
        table.e_structure_from_cycles(&chosen).unwrap()
    }

    #[test]
    fn two_element_group() {
        let c = complex_algebra(&n2(false)).unwrap();
        assert_eq!(c.product(c.d(), c.d()), c.e());
    }

    #[test]
    fn diversity_squared_is_one() {
        let c = complex_algebra(&n2(true)).unwrap();
        assert_eq!(c.product(c.d(), c.d()), c.e() | c.d());
        assert_eq!(c.product(c.d(), c.d()), c.one());
    }

    #[test]
    fn identity_acts_as_identity() {
        let table = CycleTable::symmetric(3, 0).unwrap();
        let s = table.e_structure_from_cycles(&table.diversity_cycles()[..2]).unwrap();
        let c = complex_algebra(&s).unwrap();
        for x in 0..8 {
            assert_eq!(c.product(x, c.e()), x);
            assert_eq!(c.product(c.e(), x), x);
        }
    }

    #[test]
    fn trivial_algebra() {
        let c = complex_algebra(&EStructure::trivial()).unwrap();
        let r = verify_na_axioms(&c, &Guards::default()).unwrap();
        assert!(r.boolean_ok && r.identity_ok && r.triangle_ok && r.associative);
        assert!(r.counterexample.is_none());
    }

    #[test]
    fn broken_closure_fails_triangle_law() {
        let s = n2(true);
        let mut t = s.triples().clone();
        t.insert(Triple::new(1, 1, 1));
        // break closure: drop one transform of the identity cycle [1,0,1]
        t.remove(Triple::new(0, 1, 1));
        let a = AtomStructure::new(2, vec![0, 1], &[0], t).unwrap();
        assert!(complex_algebra(&a).is_err());
        let c = ComplexAlgebra::from_structure_unchecked(&a).unwrap();
        let r = verify_na_axioms(&c, &Guards::default()).unwrap();
        assert!(!r.triangle_ok || !r.identity_ok);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn n2_structures_are_associative() {
        for consistent in [false, true] {
            let s = n2(consistent);
            assert!(is_associative(&s));
            let c = complex_algebra(&s).unwrap();
            assert!(is_associative_elementwise(&c, &Guards::default()).unwrap());
        }
        assert!(is_associative(&EStructure::trivial()));
    }

    #[test]
    fn atom_structure_round_trip() {
        let s = n2(true);
        let a = crate::structure::convert_from_e_form(&s).unwrap();
        let c = complex_algebra(&a).unwrap();
        assert_eq!(atom_structure_of(&c).unwrap(), a);
    }

    #[test]
    fn converse_properties() {
        let table = CycleTable::new(3, &[0, 2, 1], &crate::cycle::IdentityData::Atom(0)).unwrap();
        let a = table
            .atom_structure_from_cycles(
                &(0..3)
                    .map(|x| table.cycle_index(Triple::new(x, 0, x)))
                    .collect::<Vec<_>>(),
                &table.diversity_cycles(),
            )
            .unwrap();
        let c = complex_algebra(&a).unwrap();
        for x in 0..8 {
            assert_eq!(c.converse(c.converse(x)), x);
        }
        for atom in 0..3 {
            assert_eq!(c.converse(1 << atom).count_ones(), 1);
        }
        assert_eq!(c.converse(c.e()), c.e());
        assert_eq!(c.converse(c.d()), c.d());
    }
}
