//! Substructures, embeddings, free amalgamation and one-point extensions
//! for FSIAS_e.
//!
//! Every subset of a symmetric structure generates the substructure on the
//! subset plus `e`, so substructures are named by their diversity atoms.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Guards;
use crate::error::{Error, Result};
use crate::fol::ExtensionAxiom;
use crate::iso::automorphisms;
use crate::structure::EStructure;
use crate::triple::{Triple, TripleSet};

/// An injective map of atom indices, `map[source atom] = target atom`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn identity(n: usize) -> Self {
        Embedding { map: (0..n).collect() }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn after(&self, inner: &Embedding) -> Embedding {
        Embedding {
            map: inner.map.iter().map(|&a| self.map[a]).collect(),
        }
    }

    /// Checks that the map is an embedding of `source` into `target`:
    /// injective, `e ↦ e`, and `T` preserved and reflected.
    pub fn validate(&self, source: &EStructure, target: &EStructure) -> Result<()> {
        let bad = |why: String| Err(Error::InvalidEmbedding(why));
        let n = source.n();
        if self.map.len() != n {
            return bad(format!("map has {} entries for {} atoms", self.map.len(), n));
        }
        let mut seen = vec![false; target.n()];
        for &b in &self.map {
            if b >= target.n() {
                return bad(format!("image {b} out of range"));
            }
            if std::mem::replace(&mut seen[b], true) {
                return bad(format!("atom {b} hit twice"));
            }
        }
        if self.map[source.e()] != target.e() {
            return bad("e is not mapped to e".into());
        }
        let (s, t) = (source.triples(), target.triples());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if s.contains(a, b, c) != t.contains(self.map[a], self.map[b], self.map[c]) {
                        return bad(format!("T differs on ({a},{b},{c})"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Inserts the symmetric cycle of `(a, b, c)`: all six permutations.
fn insert_cycle(set: &mut TripleSet, a: usize, b: usize, c: usize) {
    for (x, y, z) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
        set.insert(Triple::new(x, y, z));
    }
}

fn copy_into(src: &TripleSet, n: usize, map: impl Fn(usize) -> usize) -> TripleSet {
    let mut out = TripleSet::empty(n);
    for t in src.iter() {
        out.insert(t.map(&map));
    }
    out
}

/// The substructure generated by `s`: universe `s ∪ {e}` in increasing
/// order, with the inclusion embedding.
pub fn generated_substructure(a: &EStructure, s: &[usize]) -> Result<(EStructure, Embedding)> {
    let mut universe: Vec<usize> = s.to_vec();
    if let Some(&bad) = universe.iter().find(|&&x| x >= a.n()) {
        return Err(Error::IndexOutOfRange { index: bad, n: a.n() });
    }
    universe.push(a.e());
    universe.sort_unstable();
    universe.dedup();
    let k = universe.len();
    let mut t = TripleSet::empty(k);
    for (i, &x) in universe.iter().enumerate() {
        for (j, &y) in universe.iter().enumerate() {
            for (l, &z) in universe.iter().enumerate() {
                if a.triples().contains(x, y, z) {
                    t.insert(Triple::new(i, j, l));
                }
            }
        }
    }
    let e = universe.binary_search(&a.e()).expect("e is in the universe");
    Ok((EStructure::new(k, e, t)?, Embedding { map: universe }))
}

/// Backtracking search for embeddings of `b` into `a`, extending the fixed
/// assignments in `partial` (`None` = free). Atoms are assigned in index
/// order and candidates tried in increasing order; `visit` returns `true`
/// to stop.
fn search_embeddings(
    b: &EStructure,
    a: &EStructure,
    partial: &[Option<usize>],
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    fn go(
        k: usize,
        b: &EStructure,
        a: &EStructure,
        partial: &[Option<usize>],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if k == b.n() {
            return visit(map);
        }
        let candidates: Vec<usize> = match (partial[k], k == b.e()) {
            (Some(x), _) => vec![x],
            (None, true) => vec![a.e()],
            (None, false) => (0..a.n()).collect(),
        };
        for x in candidates {
            if used[x] || (k == b.e()) != (x == a.e()) {
                continue;
            }
            map.push(x);
            let ok = (0..=k).all(|i| {
                (0..=k).all(|j| {
                    let triples = [(i, j, k), (i, k, j), (k, i, j)];
                    triples
                        .iter()
                        .all(|&(p, q, r)| b.triples().contains(p, q, r) == a.triples().contains(map[p], map[q], map[r]))
                })
            });
            if ok {
                used[x] = true;
                let stop = go(k + 1, b, a, partial, map, used, visit);
                used[x] = false;
                if stop {
                    map.pop();
                    return true;
                }
            }
            map.pop();
        }
        false
    }
    let mut used = vec![false; a.n()];
    go(0, b, a, partial, &mut Vec::with_capacity(b.n()), &mut used, visit);
}

/// The lexicographically first embedding of `b` into `a`, if any.
pub fn embeds(b: &EStructure, a: &EStructure, guards: &Guards) -> Result<Option<Embedding>> {
    Guards::check("embedding search", b.n(), guards.embedding)?;
    let mut found = None;
    search_embeddings(b, a, &vec![None; b.n()], &mut |m| {
        found = Some(Embedding { map: m.to_vec() });
        true
    });
    Ok(found)
}

/// The free amalgam of `v` and `w` over `s`, with the two inclusions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgam {
    pub u: EStructure,
    /// `V → U`.
    pub mu: Embedding,
    /// `W → U`.
    pub nu: Embedding,
}

/// Glues `v` and `w` along the images of `s`; `T` is the union of the two
/// images. `v` keeps its indices and the atoms of `w` outside `nu[s]` are
/// appended in increasing order.
pub fn free_amalgam(
    s: &EStructure,
    v: &EStructure,
    w: &EStructure,
    mu: &Embedding,
    nu: &Embedding,
) -> Result<Amalgam> {
    mu.validate(s, v)?;
    nu.validate(s, w)?;
    let mut w_to_u = vec![usize::MAX; w.n()];
    for x in 0..s.n() {
        w_to_u[nu.apply(x)] = mu.apply(x);
    }
    let mut next = v.n();
    for slot in w_to_u.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = next;
        next += 1;
    }
    let n = next;
    let mut t = copy_into(v.triples(), n, |a| a);
    for tr in w.triples().iter() {
        t.insert(Triple::new(w_to_u[tr.a], w_to_u[tr.b], w_to_u[tr.c]));
    }
    let u = EStructure::new(n, v.e(), t)?;
    if !u.satisfies_ip() {
        return Err(Error::InvalidStructure("amalgam violates (IP)".into()));
    }
    Ok(Amalgam {
        u,
        mu: Embedding::identity(v.n()),
        nu: Embedding { map: w_to_u },
    })
}

/// An amalgamation problem `V ← S → W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamationProblem {
    pub s: EStructure,
    pub v: EStructure,
    pub w: EStructure,
    pub mu: Embedding,
    pub nu: Embedding,
}

/// Outcome of solving a problem with [`free_amalgam`] and re-checking it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamCheck {
    pub size: usize,
    /// `U` converted back to the `{f, T, I}` form is in FSIAS.
    pub in_class: bool,
    pub mu_embeds: bool,
    pub nu_embeds: bool,
    pub commutes: bool,
}

impl AmalgamCheck {
    pub fn passed(&self) -> bool {
        self.in_class && self.mu_embeds && self.nu_embeds && self.commutes
    }
}

pub fn check_amalgam(p: &AmalgamationProblem) -> Result<(Amalgam, AmalgamCheck)> {
    let am = free_amalgam(&p.s, &p.v, &p.w, &p.mu, &p.nu)?;
    let in_class = crate::structure::convert_from_e_form(&am.u)
        .map(|a| crate::axioms::check_axioms(&a).in_fsias())
        .unwrap_or(false);
    let check = AmalgamCheck {
        size: am.u.n(),
        in_class,
        mu_embeds: am.mu.validate(&p.v, &am.u).is_ok(),
        nu_embeds: am.nu.validate(&p.w, &am.u).is_ok(),
        commutes: am.mu.after(&p.mu) == am.nu.after(&p.nu),
    };
    Ok((am, check))
}

/// `extra` random one-point extensions of `base`, each over a random set of
/// its diversity atoms with a random pattern.
fn grow<R: Rng + ?Sized>(base: &EStructure, extra: usize, rng: &mut R) -> Result<EStructure> {
    let mut a = base.clone();
    for _ in 0..extra {
        let mut atoms = a.diversity_atoms();
        atoms.shuffle(rng);
        let m = rng.gen_range(0..=atoms.len());
        let p = ExtensionAxiom::random(m, rng);
        a = extend_with_witness(&a, &atoms[..m], &p)?;
    }
    Ok(a)
}

/// A random problem with `|S| ≤ 3` and `|V|, |W| ≤ max_size`: `S` is a
/// uniform FSIAS_e draw, `V` and `W` grow it by random extensions and are
/// then randomly relabelled.
pub fn random_problem<R: Rng + ?Sized>(max_size: usize, rng: &mut R) -> Result<AmalgamationProblem> {
    if max_size == 0 {
        return Err(Error::Precondition("max_size must be positive".into()));
    }
    let sn = rng.gen_range(1..=max_size.min(3));
    let s = crate::probability::sample_fsiase(sn, rng)?;
    let side = |rng: &mut R| -> Result<(EStructure, Embedding)> {
        let extra = rng.gen_range(0..=max_size - sn);
        let grown = grow(&s, extra, rng)?;
        let mut perm: Vec<usize> = (0..grown.n()).collect();
        perm.shuffle(rng);
        let inc: Vec<usize> = perm[..sn].to_vec();
        Ok((grown.permuted(&perm), Embedding { map: inc }))
    };
    let (v, mu) = side(rng)?;
    let (w, nu) = side(rng)?;
    Ok(AmalgamationProblem { s, v, w, mu, nu })
}

/// Adds one atom `v = a.n()` realizing `pattern` over the distinct
/// diversity atoms `xs`: `[v,e,v]` always, `[v,v,v]` iff `c = 0`,
/// `[x_i,v,v]` iff `c_i = 0`, `[x_i,x_j,v]` iff `c_ij = 0`.
pub fn extend_with_witness(a: &EStructure, xs: &[usize], pattern: &ExtensionAxiom) -> Result<EStructure> {
    pattern.validate()?;
    if xs.len() != pattern.m {
        return Err(Error::InvalidPattern(format!("{} atoms for m = {}", xs.len(), pattern.m)));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != xs.len() || xs.iter().any(|&x| x >= a.n() || x == a.e()) {
        return Err(Error::Precondition("witness atoms must be distinct diversity atoms".into()));
    }
    let (n, v, e) = (a.n() + 1, a.n(), a.e());
    let mut t = copy_into(a.triples(), n, |x| x);
    insert_cycle(&mut t, v, e, v);
    if pattern.c == 0 {
        insert_cycle(&mut t, v, v, v);
    }
    for (i, &x) in xs.iter().enumerate() {
        if pattern.ci[i] == 0 {
            insert_cycle(&mut t, x, v, v);
        }
        for (j, &y) in xs.iter().enumerate().skip(i) {
            if pattern.c_at(i, j) == 0 {
                insert_cycle(&mut t, x, y, v);
            }
        }
    }
    EStructure::new(n, e, t)
}

/// [`extend_with_witness`] over all diversity atoms of `a` in increasing
/// order; `pattern.m` must be `|A| − 1`.
pub fn one_point_extension(a: &EStructure, pattern: &ExtensionAxiom) -> Result<EStructure> {
    extend_with_witness(a, &a.diversity_atoms(), pattern)
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Grows a structure from the trivial one. In each round, for every set of
/// at most `m_max` diversity atoms present at the start of the round (in
/// increasing order) and every pattern, a witness is added unless one
/// already exists.
pub fn build_generic(rounds: usize, m_max: usize, guards: &Guards) -> Result<EStructure> {
    let mut a = EStructure::trivial();
    for _ in 0..rounds {
        let start = a.diversity_atoms();
        for k in 0..=m_max.min(start.len()) {
            for xs in combinations(&start, k) {
                for p in ExtensionAxiom::all(k) {
                    if p.witness(&a, &xs)?.is_none() {
                        if a.n() + 1 > guards.generic_atoms {
                            return Err(Error::GuardExceeded {
                                what: "generic structure size",
                                n: a.n() + 1,
                                limit: guards.generic_atoms,
                            });
                        }
                        a = extend_with_witness(&a, &xs, &p)?;
                    }
                }
            }
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homogeneity {
    pub ultra: bool,
    pub weak: bool,
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0..1u64 << items.len())
        .map(|mask| (0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect())
        .collect()
}

/// Ultrahomogeneity and weak homogeneity, both by exhaustive search.
///
/// `ultra`: every isomorphism between generated substructures extends to
/// an automorphism. `weak`: for generated `B ≤ C`, every embedding of `B`
/// into `A` extends to one of `C`.
pub fn homogeneity_check(a: &EStructure, guards: &Guards) -> Result<Homogeneity> {
    Guards::check("homogeneity check", a.n(), guards.homogeneity)?;
    let autos = automorphisms(a, guards)?;
    let subs = subsets(&a.diversity_atoms());

    let mut ultra = true;
    'ultra: for s in &subs {
        let (b, inc) = generated_substructure(a, s)?;
        let mut all = true;
        search_embeddings(&b, a, &vec![None; b.n()], &mut |m| {
            let extends = autos
                .iter()
                .any(|g| inc.map.iter().zip(m).all(|(&x, &y)| g[x] == y));
            all &= extends;
            !extends
        });
        if !all {
            ultra = false;
            break 'ultra;
        }
    }

    let mut weak = true;
    'weak: for sc in &subs {
        let (c, c_inc) = generated_substructure(a, sc)?;
        for sb in subsets(sc) {
            let (b, b_inc) = generated_substructure(a, &sb)?;
            // position in C of each atom of B
            let b_in_c: Vec<usize> = b_inc
                .map
                .iter()
                .map(|x| c_inc.map.binary_search(x).expect("B ⊆ C"))
                .collect();
            let mut all = true;
            search_embeddings(&b, a, &vec![None; b.n()], &mut |m| {
                let mut partial = vec![None; c.n()];
                for (i, &pos) in b_in_c.iter().enumerate() {
                    partial[pos] = Some(m[i]);
                }
                let mut found = false;
                search_embeddings(&c, a, &partial, &mut |_| {
                    found = true;
                    true
                });
                all &= found;
                !found
            });
            if !all {
                weak = false;
                break 'weak;
            }
        }
    }
    Ok(Homogeneity { ultra, weak })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_fsiase;
    use crate::fol::evaluate;

    fn two(with_cycle: bool) -> EStructure {
        let mut t = TripleSet::empty(2);
        insert_cycle(&mut t, 0, 0, 0);
        insert_cycle(&mut t, 1, 0, 1);
        if with_cycle {
            insert_cycle(&mut t, 1, 1, 1);
        }
        EStructure::new(2, 0, t).unwrap()
    }

    #[test]
    fn substructures() {
        let g = Guards::default();
        for a in enumerate_fsiase(3, &g).unwrap() {
            let (t, emb) = generated_substructure(&a, &[]).unwrap();
            assert_eq!(t, EStructure::trivial());
            assert_eq!(emb.map, vec![0]);
            let (whole, emb) = generated_substructure(&a, &[1, 2]).unwrap();
            assert_eq!(whole, a);
            assert_eq!(emb, Embedding::identity(3));
            let (b, emb) = generated_substructure(&a, &[2]).unwrap();
            assert_eq!(b.n(), 2);
            assert_eq!(b.triples().contains(1, 1, 1), a.triples().contains(2, 2, 2));
            emb.validate(&b, &a).unwrap();
            assert!(embeds(&b, &a, &g).unwrap().is_some());
        }
    }

    #[test]
    fn embedding_examples() {
        let g = Guards::default();
        let t = EStructure::trivial();
        assert_eq!(embeds(&t, &two(true), &g).unwrap().unwrap().map, vec![0]);
        assert!(embeds(&two(true), &two(false), &g).unwrap().is_none());
        assert!(Embedding { map: vec![1] }.validate(&t, &two(true)).is_err());
    }

    #[test]
    fn amalgam_over_trivial() {
        let t = EStructure::trivial();
        let v = two(true);
        let e = Embedding { map: vec![0] };
        let am = free_amalgam(&t, &v, &v, &e, &e).unwrap();
        assert_eq!(am.u.n(), 3);
        assert!(am.u.triples().contains(1, 1, 1) && am.u.triples().contains(2, 2, 2));
        assert!(!am.u.triples().contains(1, 1, 2) && !am.u.triples().contains(1, 2, 2));
        am.mu.validate(&v, &am.u).unwrap();
        am.nu.validate(&v, &am.u).unwrap();
        assert_eq!(am.mu.after(&e), am.nu.after(&e));
    }

    #[test]
    fn amalgam_over_everything() {
        let v = two(false);
        let id = Embedding::identity(2);
        let am = free_amalgam(&v, &v, &v, &id, &id).unwrap();
        assert_eq!(am.u, v);
    }

    #[test]
    fn one_point_examples() {
        let t = EStructure::trivial();
        let a = one_point_extension(&t, &ExtensionAxiom::from_bits(0, 0)).unwrap();
        assert_eq!(a, two(true));
        let a = one_point_extension(&t, &ExtensionAxiom::from_bits(0, 1)).unwrap();
        assert_eq!(a, two(false));
        let a = one_point_extension(&two(false), &ExtensionAxiom::from_bits(1, 0)).unwrap();
        assert_eq!(a.n(), 3);
        for (x, y, z) in [(2, 0, 2), (2, 2, 2), (1, 2, 2), (1, 1, 2)] {
            assert!(a.triples().contains(x, y, z));
        }
        let p = ExtensionAxiom::from_bits(1, 0);
        assert!(p.instance_holds(&a, &[1]).unwrap());
    }

    #[test]
    fn generic_small_cases() {
        let g = Guards::default();
        assert_eq!(build_generic(0, 2, &g).unwrap(), EStructure::trivial());
        assert_eq!(build_generic(1, 0, &g).unwrap().n(), 3);
        let a = build_generic(2, 1, &g).unwrap();
        let round1 = [1usize, 2];
        for p in ExtensionAxiom::all(1) {
            for &x in &round1 {
                assert!(p.instance_holds(&a, &[x]).unwrap());
            }
        }
        for p in ExtensionAxiom::all(0) {
            assert!(evaluate(&p.sentence(), &a, &g).unwrap());
        }
    }

    #[test]
    fn homogeneity_agrees_at_n3() {
        let g = Guards::default();
        assert_eq!(
            homogeneity_check(&EStructure::trivial(), &g).unwrap(),
            Homogeneity { ultra: true, weak: true }
        );
        for n in 2..=3 {
            for a in enumerate_fsiase(n, &g).unwrap() {
                let h = homogeneity_check(&a, &g).unwrap();
                assert_eq!(h.ultra, h.weak, "{a:?}");
            }
        }
    }
}
