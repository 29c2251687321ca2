//! Slow, independent reference computations used to cross-check the fast
//! paths. They assume as little as possible about the classes involved.

use crate::axioms::check_axioms;
use crate::config::Guards;
use crate::cycle::{CycleTable, IdentityData, SizeCensus};
use crate::enumerate::involutions;
use crate::error::{Error, Result};
use crate::iso::frame_automorphism_count;
use crate::structure::AtomStructure;
use crate::triple::TripleSet;
use num_bigint::BigUint;
use num_traits::{One, Zero};

fn identity_sets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |mask| (0..n).filter(|a| mask >> a & 1 == 1).collect())
}

/// Every `{f, T, I}` structure on `n ≤ 2` atoms — all involutions, all
/// nonempty `I`, all `2^{n³}` relations — filtered by (P) and (I).
pub fn tier0_fas(n: usize) -> Result<Vec<AtomStructure>> {
    if n == 0 || n > 2 {
        return Err(Error::GuardExceeded {
            what: "tier-0 oracle",
            n,
            limit: 2,
        });
    }
    let slots = n * n * n;
    let mut out = Vec::new();
    for f in involutions(n) {
        for id in identity_sets(n) {
            for bits in 0u64..1 << slots {
                let mut t = TripleSet::empty(n);
                for idx in (0..slots).filter(|i| bits >> i & 1 == 1) {
                    t.insert_index(idx);
                }
                let a = AtomStructure::new(n, f.clone(), &id, t)?;
                if check_axioms(&a).in_fas() {
                    out.push(a);
                }
            }
        }
    }
    Ok(out)
}

/// Every union of Peircean cycles (identity and diversity alike) over
/// every frame `(f, I)` on `n ≤ 3` atoms, filtered by (P) and (I).
pub fn tier1_fas(n: usize) -> Result<Vec<AtomStructure>> {
    if n == 0 || n > 3 {
        return Err(Error::GuardExceeded {
            what: "tier-1 oracle",
            n,
            limit: 3,
        });
    }
    let mut out = Vec::new();
    for f in involutions(n) {
        for id in identity_sets(n) {
            let table = CycleTable::new(n, &f, &IdentityData::Set(id.clone()))?;
            let k = table.cycles().len();
            for mask in 0u64..1 << k {
                let t = table.union_of((0..k).filter(|j| mask >> j & 1 == 1));
                let a = AtomStructure::new(n, f.clone(), &id, t)?;
                if check_axioms(&a).in_fas() {
                    out.push(a);
                }
            }
        }
    }
    Ok(out)
}

/// The involution fixing `0..s` and swapping `s+2k ↔ s+2k+1`.
pub fn standard_involution(n: usize, s: usize) -> Vec<usize> {
    (0..n)
        .map(|a| {
            if a < s {
                a
            } else if (a - s) % 2 == 0 {
                a + 1
            } else {
                a - 1
            }
        })
        .collect()
}

/// Diversity-cycle census by orbit computation, and the number of
/// automorphisms of the frame `⟨U; f, {0}⟩` by search.
pub fn brute_force_census(n: usize, s: usize, guards: &Guards) -> Result<(SizeCensus, u64)> {
    if s == 0 || s > n || (n - s) % 2 != 0 {
        return Err(Error::InvalidCensus { n, s });
    }
    let f = standard_involution(n, s);
    let table = CycleTable::new(n, &f, &IdentityData::Atom(0))?;
    let frame = AtomStructure::new(n, f, &[0], TripleSet::empty(n))?;
    Ok((table.census(), frame_automorphism_count(&frame, guards)?))
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let rest: Vec<usize> = items.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &y)| y).collect();
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Number of isomorphism classes of FSIAS_e on `n` atoms by Burnside's
/// lemma: the average, over permutations fixing `e = 0`, of `2^k` where `k`
/// is the number of orbits of the permutation on diversity cycles.
/// Returns the orbit-weighted sum `Σ 2^k` alongside the group order so the
/// arithmetic can be shown.
pub fn burnside_fsiase(n: usize) -> Result<(BigUint, BigUint, BigUint)> {
    if n == 0 || n > 8 {
        return Err(Error::GuardExceeded {
            what: "Burnside oracle",
            n,
            limit: 8,
        });
    }
    let table = CycleTable::symmetric(n, 0)?;
    let div = table.diversity_cycles();
    let mut pos = vec![usize::MAX; table.cycles().len()];
    for (k, &c) in div.iter().enumerate() {
        pos[c] = k;
    }
    let mut sum = BigUint::zero();
    let mut order = BigUint::zero();
    let atoms: Vec<usize> = (1..n).collect();
    for tail in permutations(&atoms) {
        let mut g = vec![0];
        g.extend(tail);
        // induced permutation on diversity cycles, then its cycle count
        let image: Vec<usize> = div
            .iter()
            .map(|&c| pos[table.cycle_index(table.cycles()[c].representative().map(|a| g[a]))])
            .collect();
        let mut seen = vec![false; div.len()];
        let mut orbits = 0u64;
        for start in 0..div.len() {
            if !seen[start] {
                orbits += 1;
                let mut k = start;
                while !seen[k] {
                    seen[k] = true;
                    k = image[k];
                }
            }
        }
        sum += BigUint::one() << orbits;
        order += 1u32;
    }
    let count = &sum / &order;
    debug_assert!((&sum % &order).is_zero());
    Ok((count, sum, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{cycle_census, enumerate_fas};
    use std::collections::HashSet;

    #[test]
    fn tier0_sizes() {
        assert_eq!(tier0_fas(1).unwrap().len(), 1);
        assert_eq!(tier0_fas(2).unwrap().len(), 5);
    }

    #[test]
    fn tier0_matches_enumeration() {
        let g = Guards::default();
        for n in 1..=2 {
            let a: HashSet<_> = tier0_fas(n).unwrap().into_iter().collect();
            let b: HashSet<_> = enumerate_fas(n, &g).unwrap().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn census_small() {
        let g = Guards::default();
        for n in 1..=6 {
            for s in (1..=n).filter(|s| (n - s) % 2 == 0) {
                let (c, p) = brute_force_census(n, s, &g).unwrap();
                let f = cycle_census(n, s).unwrap();
                assert_eq!(BigUint::from(c.c1), f.c1);
                assert_eq!(BigUint::from(c.c2), f.c2);
                assert_eq!(BigUint::from(c.c3), f.c3);
                assert_eq!(BigUint::from(c.c6), f.c6);
                assert_eq!(BigUint::from(c.total()), f.q);
                assert_eq!(BigUint::from(p), f.p);
            }
        }
    }

    #[test]
    fn burnside_matches_canonical_forms() {
        let g = Guards::default();
        let (count, sum, order) = burnside_fsiase(3).unwrap();
        assert_eq!((sum, order), (BigUint::from(20u32), BigUint::from(2u32)));
        assert_eq!(count, BigUint::from(10u32));
        for n in 1..=4 {
            let r = crate::enumerate::count_unlabelled(n, crate::Class::Fsiase, &crate::Predicate::All, &g).unwrap();
            assert_eq!(r.unlabelled.unwrap(), burnside_fsiase(n).unwrap().0);
        }
    }
}
