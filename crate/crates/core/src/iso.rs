//! Automorphisms, isomorphisms and canonical forms by backtracking over
//! atom permutations.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use crate::config::Guards;
use crate::error::Result;
use crate::structure::Model;

/// Depth-first search for bijections `source → target` preserving `f`,
/// identity membership, the constant `e` and (optionally) `T` in both
/// directions. Source atoms are assigned in increasing order and target
/// candidates are tried in increasing order.
struct MapSearch<'a, S: ?Sized, D: ?Sized> {
    src: &'a S,
    dst: &'a D,
    check_triples: bool,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl<'a, S: Model + ?Sized, D: Model + ?Sized> MapSearch<'a, S, D> {
    fn new(src: &'a S, dst: &'a D, check_triples: bool) -> Self {
        let n = src.size();
        MapSearch {
            src,
            dst,
            check_triples,
            map: Vec::with_capacity(n),
            used: vec![false; n],
        }
    }

    fn admissible(&self, k: usize, x: usize) -> bool {
        let (s, d) = (self.src, self.dst);
        if self.used[x] || s.is_identity(k) != d.is_identity(x) {
            return false;
        }
        if let (Some(es), Some(ed)) = (s.identity_constant(), d.identity_constant()) {
            if (k == es) != (x == ed) {
                return false;
            }
        }
        let fk = s.converse(k);
        let fx = d.converse(x);
        match fk.cmp(&k) {
            Ordering::Less => {
                if self.map[fk] != fx {
                    return false;
                }
            }
            Ordering::Equal => {
                if fx != x {
                    return false;
                }
            }
            Ordering::Greater => {
                if fx == x || self.used[fx] {
                    return false;
                }
            }
        }
        if self.check_triples {
            let m = |i: usize| if i == k { x } else { self.map[i] };
            for p in 0..=k {
                for q in 0..=k {
                    for (a, b, c) in [(k, p, q), (p, k, q), (p, q, k)] {
                        if s.holds(a, b, c) != d.holds(m(a), m(b), m(c)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        let n = self.src.size();
        let k = self.map.len();
        if k == n {
            return visit(&self.map);
        }
        for x in 0..n {
            if self.admissible(k, x) {
                self.map.push(x);
                self.used[x] = true;
                let flow = self.run(visit);
                self.used[x] = false;
                self.map.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }
}

fn same_shape<S: Model + ?Sized, D: Model + ?Sized>(a: &S, b: &D) -> bool {
    a.size() == b.size() && a.identity_atoms().len() == b.identity_atoms().len()
}

/// All automorphisms of `m`, in lexicographic order of the image vectors.
/// The identity permutation comes first.
pub fn automorphisms<M: Model + ?Sized>(m: &M, guards: &Guards) -> Result<Vec<Vec<usize>>> {
    Guards::check("automorphism search", m.size(), guards.automorphisms)?;
    let mut out = Vec::new();
    let _ = MapSearch::new(m, m, true).run(&mut |p| {
        out.push(p.to_vec());
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// Number of automorphisms, without materializing them.
pub fn count_automorphisms<M: Model + ?Sized>(m: &M, guards: &Guards) -> Result<u64> {
    Guards::check("automorphism search", m.size(), guards.automorphisms)?;
    let mut count = 0u64;
    let _ = MapSearch::new(m, m, true).run(&mut |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    Ok(count)
}

/// Whether the identity is the only automorphism.
pub fn is_rigid<M: Model + ?Sized>(m: &M, guards: &Guards) -> Result<bool> {
    Guards::check("automorphism search", m.size(), guards.automorphisms)?;
    let mut count = 0u64;
    let _ = MapSearch::new(m, m, true).run(&mut |_| {
        count += 1;
        if count > 1 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(count == 1)
}

/// Automorphisms of the reduct `⟨U; f, I⟩` (the relation `T` is ignored).
pub fn frame_automorphism_count<M: Model + ?Sized>(m: &M, guards: &Guards) -> Result<u64> {
    Guards::check("automorphism search", m.size(), guards.automorphisms)?;
    let mut count = 0u64;
    let _ = MapSearch::new(m, m, false).run(&mut |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    Ok(count)
}

/// Some isomorphism `a → b` (first in lexicographic search order).
pub fn find_isomorphism<S: Model + ?Sized, D: Model + ?Sized>(a: &S, b: &D) -> Option<Vec<usize>> {
    if !same_shape(a, b) || a.triples().len() != b.triples().len() {
        return None;
    }
    let mut found = None;
    let _ = MapSearch::new(a, b, true).run(&mut |p| {
        found = Some(p.to_vec());
        ControlFlow::Break(())
    });
    found
}

/// Canonical encoding of an isomorphism class.
///
/// Layout: `[n, |I|]`, then one byte per position giving the new index of
/// the converse when it is already placed (`0xFF` otherwise), then the
/// relation bits packed most-significant-first. Positions are filled
/// identity atoms first; the relation bits for position `k` are the
/// triples whose largest coordinate is `k`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(pub Vec<u8>);

const PENDING: u8 = 0xFF;

struct Canon<'a, M: ?Sized> {
    m: &'a M,
    /// new position -> old atom
    order: Vec<usize>,
    /// old atom -> new position
    pos: Vec<Option<usize>>,
    id_count: usize,
    fbytes: Vec<u8>,
    bits: Vec<u8>,
    best: Option<(Vec<u8>, Vec<u8>)>,
}

impl<M: Model + ?Sized> Canon<'_, M> {
    fn shell(&mut self, k: usize) {
        let old = self.order[k];
        let fo = self.m.converse(old);
        self.fbytes.push(match self.pos[fo] {
            Some(p) => p as u8,
            None => PENDING,
        });
        let o = &self.order;
        for a in 0..=k {
            for b in 0..=k {
                for c in 0..=k {
                    if a.max(b).max(c) == k {
                        self.bits.push(self.m.holds(o[a], o[b], o[c]) as u8);
                    }
                }
            }
        }
    }

    fn compare_prefix(&self) -> Ordering {
        match &self.best {
            None => Ordering::Less,
            Some((bf, bb)) => {
                let k = self.fbytes.len();
                // The f-byte of position j is final once position j is placed,
                // except that a PENDING entry can later be matched by its partner;
                // comparing shell by shell keeps both sequences aligned.
                interleaved_cmp(&self.fbytes, &self.bits, &bf[..k], &bb[..self.bits.len()])
            }
        }
    }

    fn run(&mut self) {
        let n = self.m.size();
        let k = self.order.len();
        if k == n {
            if self.compare_prefix() == Ordering::Less {
                self.best = Some((self.fbytes.clone(), self.bits.clone()));
            }
            return;
        }
        let want_identity = k < self.id_count;
        for x in 0..n {
            if self.pos[x].is_some() || self.m.is_identity(x) != want_identity {
                continue;
            }
            let (fl, bl) = (self.fbytes.len(), self.bits.len());
            self.order.push(x);
            self.pos[x] = Some(k);
            self.shell(k);
            if self.compare_prefix() != Ordering::Greater {
                self.run();
            }
            self.fbytes.truncate(fl);
            self.bits.truncate(bl);
            self.pos[x] = None;
            self.order.pop();
        }
    }
}

/// Compares shell-interleaved encodings: shell `k` is `f[k]` followed by
/// the bits of shell `k`. Since shell sizes depend only on `k`, comparing
/// the two streams position by position in shell order is the same as
/// comparing the interleaved byte strings.
fn interleaved_cmp(fa: &[u8], ba: &[u8], fb: &[u8], bb: &[u8]) -> Ordering {
    let mut bit_off = 0;
    for k in 0..fa.len() {
        match fa[k].cmp(&fb[k]) {
            Ordering::Equal => {}
            other => return other,
        }
        let shell = (k + 1).pow(3) - k.pow(3);
        let end = (bit_off + shell).min(ba.len());
        match ba[bit_off..end].cmp(&bb[bit_off..end]) {
            Ordering::Equal => {}
            other => return other,
        }
        bit_off = end;
    }
    Ordering::Equal
}

/// Lexicographically least shell encoding of `π·m` over all permutations
/// that place identity atoms first.
pub fn canonicalize<M: Model + ?Sized>(m: &M, guards: &Guards) -> Result<CanonicalForm> {
    let n = m.size();
    Guards::check("canonicalization", n, guards.canonicalize)?;
    let id_count = m.identity_atoms().len();
    let mut canon = Canon {
        m,
        order: Vec::with_capacity(n),
        pos: vec![None; n],
        id_count,
        fbytes: Vec::with_capacity(n),
        bits: Vec::with_capacity(n * n * n),
        best: None,
    };
    canon.run();
    let (fbytes, bits) = canon.best.expect("at least one ordering exists");
    let mut out = vec![n as u8, id_count as u8];
    out.extend_from_slice(&fbytes);
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            byte |= b << (7 - i);
        }
        out.push(byte);
    }
    Ok(CanonicalForm(out))
}
