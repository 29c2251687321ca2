//! Exhaustive enumeration, closed-form counts and ratio reports.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::axioms::i_witness;
use crate::config::Guards;
use crate::cycle::{CycleTable, IdentityData};
use crate::error::{Error, Result};
use crate::iso::canonicalize;
use crate::predicate::Predicate;
use crate::structure::{AtomStructure, EStructure, Model};
use crate::triple::TripleSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    /// All finite atom structures.
    Fas,
    /// Symmetric integral members of FAS.
    Fsias,
    /// The same class in the `{f, e, T}` signature.
    Fsiase,
}

impl FromStr for Class {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "fas" => Ok(Class::Fas),
            "fsias" => Ok(Class::Fsias),
            "fsiase" => Ok(Class::Fsiase),
            _ => Err(Error::Precondition(format!("unknown class `{s}`"))),
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Fas => "fas",
            Class::Fsias => "fsias",
            Class::Fsiase => "fsiase",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Enumerated,
    Formula,
    Oracle,
    Sampled,
}

// ---------------------------------------------------------------------------
// Cycle census

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn to_uint(x: BigInt) -> BigUint {
    x.to_biguint().expect("non-negative count")
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

fn check_census(n: usize, s: usize) -> Result<()> {
    if s == 0 || s > n || (n - s) % 2 != 0 {
        Err(Error::InvalidCensus { n, s })
    } else {
        Ok(())
    }
}

/// `Q(n,s) = (n−1)((n−1)² + 3s − 1)/6`: the number of diversity cycles of
/// an `n`-atom frame whose involution has `s` fixed points.
pub fn diversity_cycle_count(n: usize, s: usize) -> Result<BigUint> {
    check_census(n, s)?;
    let (n, s) = (big(n as i64), big(s as i64));
    let m = &n - 1;
    let num: BigInt = &m * (&m * &m + 3 * s - 1);
    let (q, r) = num.div_rem(&big(6));
    debug_assert!(r.is_zero());
    Ok(to_uint(q))
}

/// `P(n,s) = (s−1)! ((n−s)/2)! 2^((n−s)/2)`: automorphisms of `⟨U; f, {e}⟩`.
pub fn frame_automorphisms(n: usize, s: usize) -> Result<BigUint> {
    check_census(n, s)?;
    let pairs = ((n - s) / 2) as u64;
    Ok(factorial(s as u64 - 1) * factorial(pairs) * (BigUint::one() << pairs))
}

/// `S(m) = Q(m,m) = (m³ − m)/6`.
pub fn symmetric_cycle_count(m: usize) -> BigUint {
    let m = BigUint::from(m);
    (&m * &m * &m - &m) / 6u32
}

/// Closed-form diversity-cycle census for the frame with `n` atoms and `s`
/// fixed points of `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCensus {
    pub n: usize,
    pub s: usize,
    #[serde(with = "crate::json::decimal")]
    pub c1: BigUint,
    #[serde(with = "crate::json::decimal")]
    pub c2: BigUint,
    #[serde(with = "crate::json::decimal")]
    pub c3: BigUint,
    #[serde(with = "crate::json::decimal")]
    pub c6: BigUint,
    #[serde(rename = "Q")]
    #[serde(with = "crate::json::decimal")]
    pub q: BigUint,
    #[serde(rename = "P")]
    #[serde(with = "crate::json::decimal")]
    pub p: BigUint,
    /// `S(n)`, present when `s = n`.
    #[serde(rename = "S")]
    #[serde(with = "crate::json::decimal::option")]
    pub s_value: Option<BigUint>,
}

impl CycleCensus {
    pub const CSV_HEADER: &'static str = "n,s,c1,c2,c3,c6,Q,P";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n, self.s, self.c1, self.c2, self.c3, self.c6, self.q, self.p
        )
    }
}

pub fn cycle_census(n: usize, s: usize) -> Result<CycleCensus> {
    check_census(n, s)?;
    let (nb, sb) = (big(n as i64), big(s as i64));
    let m = &nb - 1;
    let c1 = &sb - 1;
    let c2 = big(((n - s) / 2) as i64);
    let c3 = (&sb - 1) * (&nb - 2);
    let six_c6: BigInt = &m * (&m * &m - 3 * &sb + 2) + 3 * (&sb - 1);
    let (c6, r) = six_c6.div_rem(&big(6));
    debug_assert!(r.is_zero());
    let c3 = if n == 1 { BigInt::zero() } else { c3 };
    Ok(CycleCensus {
        n,
        s,
        c1: to_uint(c1),
        c2: to_uint(c2),
        c3: to_uint(c3),
        c6: to_uint(c6),
        q: diversity_cycle_count(n, s)?,
        p: frame_automorphisms(n, s)?,
        s_value: (s == n).then(|| symmetric_cycle_count(n)),
    })
}

/// All valid `s` for a given `n`: `1 ≤ s ≤ n`, `n − s` even.
pub fn valid_fixed_point_counts(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |s| (n - s) % 2 == 0)
}

// ---------------------------------------------------------------------------
// Involutions

/// All involutions of `{0..n}`, in lexicographic order of the image vector.
pub fn involutions(n: usize) -> Vec<Vec<usize>> {
    fn go(f: &mut Vec<Option<usize>>, out: &mut Vec<Vec<usize>>) {
        let Some(a) = f.iter().position(Option::is_none) else {
            out.push(f.iter().map(|x| x.unwrap()).collect());
            return;
        };
        f[a] = Some(a);
        go(f, out);
        for b in a + 1..f.len() {
            if f[b].is_none() {
                f[a] = Some(b);
                f[b] = Some(a);
                go(f, out);
                f[b] = None;
            }
        }
        f[a] = None;
    }
    let mut out = Vec::new();
    go(&mut vec![None; n], &mut out);
    out
}

/// `m! / (2^p p! (m − 2p)!)`: involutions of an `m`-set with `p` 2-cycles.
pub fn involution_count(m: usize, p: usize) -> BigUint {
    if 2 * p > m {
        return BigUint::zero();
    }
    factorial(m as u64) / ((BigUint::one() << p) * factorial(p as u64) * factorial((m - 2 * p) as u64))
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n as u64) / (factorial(k as u64) * factorial((n - k) as u64))
}

// ---------------------------------------------------------------------------
// FSIAS_e enumeration

/// Streams the `2^{Q(n,n)}` labelled FSIAS_e structures on `{0..n}` with
/// `e = 0`. Structure number `k` has diversity cycle `j` consistent iff
/// bit `j` of `k` is set (cycles ordered by representative).
#[derive(Debug, Clone)]
pub struct FsiaseIter {
    n: usize,
    base: TripleSet,
    cycles: Vec<Vec<usize>>,
    next: u64,
    end: u64,
}

impl FsiaseIter {
    fn new(n: usize) -> Self {
        let table = CycleTable::symmetric(n, 0).expect("valid frame");
        let base = table.forced_identity_part().expect("symmetric integral frame");
        let cycles: Vec<Vec<usize>> = table
            .diversity_cycles()
            .into_iter()
            .map(|c| table.cycles()[c].members().iter().map(|t| t.index(n)).collect())
            .collect();
        let end = 1u64 << cycles.len();
        FsiaseIter {
            n,
            base,
            cycles,
            next: 0,
            end,
        }
    }

    /// The structure at position `k` of the stream.
    pub fn structure_at(&self, k: u64) -> EStructure {
        let mut set = self.base.clone();
        for (j, members) in self.cycles.iter().enumerate() {
            if k >> j & 1 == 1 {
                for &idx in members {
                    set.insert_index(idx);
                }
            }
        }
        EStructure::from_parts_unchecked(self.n, 0, set)
    }

    /// Restricts the stream to positions `start..end`.
    pub fn range(mut self, start: u64, end: u64) -> Self {
        self.end = end.min(self.end);
        self.next = start.min(self.end);
        self
    }

    pub fn total(&self) -> u64 {
        1u64 << self.cycles.len()
    }
}

impl Iterator for FsiaseIter {
    type Item = EStructure;

    fn next(&mut self) -> Option<EStructure> {
        if self.next >= self.end {
            return None;
        }
        let s = self.structure_at(self.next);
        self.next += 1;
        Some(s)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for FsiaseIter {}

pub fn enumerate_fsiase(n: usize, guards: &Guards) -> Result<FsiaseIter> {
    if n == 0 {
        return Err(Error::InvalidStructure("empty universe".into()));
    }
    Guards::check("FSIAS_e enumeration", n, guards.enumerate_fsiase)?;
    Ok(FsiaseIter::new(n))
}

// ---------------------------------------------------------------------------
// FAS enumeration

/// One `(I, f)` frame of the FAS enumeration with its admissible identity
/// parts and its diversity cycles.
#[derive(Debug, Clone)]
struct FasFrame {
    converse: Vec<usize>,
    identity: Vec<usize>,
    identity_parts: Vec<TripleSet>,
    diversity: Vec<Vec<usize>>,
}

impl FasFrame {
    fn count(&self) -> u64 {
        self.identity_parts.len() as u64 * (1u64 << self.diversity.len())
    }
}

/// Identity-cycle selections satisfying (I) for the frame of `table`.
///
/// A cycle containing some `(a, i, b)` with `i ∈ I` and `a ≠ b` can never be
/// consistent under (I); the remaining identity cycles are combined in
/// every way and each union is checked against (I) directly.
pub fn admissible_identity_parts(table: &CycleTable) -> Vec<TripleSet> {
    let id = table.identity_mask();
    let allowed: Vec<usize> = table
        .identity_cycles()
        .into_iter()
        .filter(|&c| {
            table.cycles()[c]
                .members()
                .iter()
                .all(|t| !id[t.b] || t.a == t.c)
        })
        .collect();
    assert!(allowed.len() < 32, "too many admissible identity cycles");
    let ids: Vec<usize> = (0..table.n()).filter(|&a| id[a]).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << allowed.len() {
        let part = table.union_of((0..allowed.len()).filter(|j| mask >> j & 1 == 1).map(|j| allowed[j]));
        let probe = AtomStructure::new(table.n(), table.converse().to_vec(), &ids, part)
            .expect("frame shape is valid");
        if i_witness(&probe).is_none() {
            out.push(probe.triples().clone());
        }
    }
    out
}

/// Streams every labelled member of FAS on `{0..n}`: identity sets in
/// increasing bit-mask order, then involutions in lexicographic order, then
/// admissible identity parts, then diversity-cycle subsets.
#[derive(Debug, Clone)]
pub struct FasIter {
    n: usize,
    frames: Vec<FasFrame>,
    frame: usize,
    part: usize,
    mask: u64,
}

impl FasIter {
    fn new(n: usize) -> Self {
        let mut frames = Vec::new();
        let invs = involutions(n);
        for imask in 1u32..1 << n {
            let identity: Vec<usize> = (0..n).filter(|a| imask >> a & 1 == 1).collect();
            for f in &invs {
                let table = CycleTable::new(n, f, &IdentityData::Set(identity.clone())).expect("valid frame");
                let identity_parts = admissible_identity_parts(&table);
                if identity_parts.is_empty() {
                    continue;
                }
                let diversity = table
                    .diversity_cycles()
                    .into_iter()
                    .map(|c| table.cycles()[c].members().iter().map(|t| t.index(n)).collect())
                    .collect();
                frames.push(FasFrame {
                    converse: f.clone(),
                    identity: identity.clone(),
                    identity_parts,
                    diversity,
                });
            }
        }
        FasIter {
            n,
            frames,
            frame: 0,
            part: 0,
            mask: 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.frames.iter().map(FasFrame::count).sum()
    }
}

impl Iterator for FasIter {
    type Item = AtomStructure;

    fn next(&mut self) -> Option<AtomStructure> {
        let fr = self.frames.get(self.frame)?;
        let mut set = fr.identity_parts[self.part].clone();
        for (j, members) in fr.diversity.iter().enumerate() {
            if self.mask >> j & 1 == 1 {
                for &idx in members {
                    set.insert_index(idx);
                }
            }
        }
        let out = AtomStructure::new(self.n, fr.converse.clone(), &fr.identity, set).expect("valid shape");
        self.mask += 1;
        if self.mask == 1 << fr.diversity.len() {
            self.mask = 0;
            self.part += 1;
            if self.part == fr.identity_parts.len() {
                self.part = 0;
                self.frame += 1;
            }
        }
        Some(out)
    }
}

pub fn enumerate_fas(n: usize, guards: &Guards) -> Result<FasIter> {
    if n == 0 {
        return Err(Error::InvalidStructure("empty universe".into()));
    }
    Guards::check("FAS enumeration", n, guards.enumerate_fas)?;
    Ok(FasIter::new(n))
}

// ---------------------------------------------------------------------------
// Counting

/// One summand of the closed-form FAS count: `i` identity atoms and `p`
/// swapped pairs of diversity atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FasTerm {
    pub identity_atoms: usize,
    pub pairs: usize,
    /// Structures with one fixed identity set of size `i` and one fixed
    /// involution with `p` pairs:
    /// `(2^i − 1)^(n−i) · 2^{Q(n−i+1, n−i+1−2p)}`.
    pub per_frame: BigUint,
    /// `binom(n,i) · inv(n−i,p) · per_frame`.
    pub weight: BigUint,
}

/// The decomposition behind [`fas_count_formula`].
pub fn fas_terms(n: usize) -> Vec<FasTerm> {
    let mut out = Vec::new();
    for i in 1..=n {
        let d = n - i;
        for p in 0..=d / 2 {
            let m = d + 1;
            let q = diversity_cycle_count(m, m - 2 * p).expect("valid parameters");
            let q = q.to_u64().expect("exponent fits in u64");
            let id_choices = num_traits::pow(BigUint::from((1u64 << i) - 1), d);
            let per_frame = id_choices * (BigUint::one() << q);
            let weight = binomial(n, i) * involution_count(d, p) * &per_frame;
            out.push(FasTerm {
                identity_atoms: i,
                pairs: p,
                per_frame,
                weight,
            });
        }
    }
    out
}

/// `Σ_i binom(n,i) Σ_p inv(n−i,p) (2^i − 1)^(n−i) 2^{Q(n−i+1, n−i+1−2p)}`.
///
/// This assumes `f` fixes identity atoms and that each identity atom's only
/// consistent identity cycle is `[i,i,i]`. Both are checked against
/// exhaustive enumeration for small `n`; see [`labelled_count`].
pub fn fas_count_formula(n: usize) -> BigUint {
    fas_terms(n).into_iter().map(|t| t.weight).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub n: usize,
    pub class: Class,
    pub predicate: String,
    #[serde(with = "crate::json::decimal")]
    pub labelled: BigUint,
    #[serde(with = "crate::json::decimal::option")]
    pub unlabelled: Option<BigUint>,
    pub method: CountMethod,
}

/// Closed-form labelled count.
///
/// FSIAS_e: `2^{Q(n,n)}`; FSIAS: `n·2^{Q(n,n)}`; FAS: [`fas_count_formula`],
/// refused beyond `guards.formula_validated` unless `allow_unvalidated`.
pub fn labelled_count(n: usize, class: Class, guards: &Guards, allow_unvalidated: bool) -> Result<CountReport> {
    if n == 0 {
        return Err(Error::InvalidStructure("empty universe".into()));
    }
    let sym = BigUint::one() << symmetric_cycle_count(n).to_u64().expect("exponent fits in u64");
    let labelled = match class {
        Class::Fsiase => sym,
        Class::Fsias => sym * n,
        Class::Fas => {
            if n > guards.formula_validated && !allow_unvalidated {
                return Err(Error::Unvalidated {
                    n,
                    validated: guards.formula_validated,
                });
            }
            fas_count_formula(n)
        }
    };
    Ok(CountReport {
        n,
        class,
        predicate: "all".into(),
        labelled,
        unlabelled: None,
        method: CountMethod::Formula,
    })
}

/// Labelled count by streaming the enumeration.
pub fn labelled_count_enumerated(n: usize, class: Class, guards: &Guards) -> Result<CountReport> {
    let labelled = match class {
        Class::Fsiase => BigUint::from(enumerate_fsiase(n, guards)?.count()),
        Class::Fas => BigUint::from(enumerate_fas(n, guards)?.count()),
        Class::Fsias => BigUint::from(
            enumerate_fas(n, guards)?
                .filter(|a| a.is_symmetric() && a.is_integral())
                .count(),
        ),
    };
    Ok(CountReport {
        n,
        class,
        predicate: "all".into(),
        labelled,
        unlabelled: None,
        method: CountMethod::Enumerated,
    })
}

/// Calls `visit` on every labelled member of `class` with universe size `n`.
pub fn for_each_member(
    n: usize,
    class: Class,
    guards: &Guards,
    mut visit: impl FnMut(&dyn Model) -> Result<()>,
) -> Result<()> {
    match class {
        Class::Fsiase => {
            for s in enumerate_fsiase(n, guards)? {
                visit(&s)?;
            }
        }
        Class::Fas => {
            for a in enumerate_fas(n, guards)? {
                visit(&a)?;
            }
        }
        Class::Fsias => {
            for a in enumerate_fas(n, guards)? {
                if a.is_symmetric() && a.is_integral() {
                    visit(&a)?;
                }
            }
        }
    }
    Ok(())
}

/// Number of isomorphism classes of `class` members satisfying `predicate`,
/// by canonicalizing every labelled member.
pub fn count_unlabelled(n: usize, class: Class, predicate: &Predicate, guards: &Guards) -> Result<CountReport> {
    Guards::check("canonicalization", n, guards.canonicalize)?;
    let mut forms = HashSet::new();
    let mut labelled = 0u64;
    for_each_member(n, class, guards, |m| {
        if predicate.holds(m, guards)? {
            labelled += 1;
            forms.insert(canonicalize(m, guards)?);
        }
        Ok(())
    })?;
    Ok(CountReport {
        n,
        class,
        predicate: predicate.name(),
        labelled: labelled.into(),
        unlabelled: Some(forms.len().into()),
        method: CountMethod::Enumerated,
    })
}

// ---------------------------------------------------------------------------
// Ratio reports

/// Compares an exact isomorphism-class count with the asymptotic formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub n: usize,
    pub s: usize,
    #[serde(with = "crate::json::decimal")]
    pub exact_count: BigUint,
    /// `F(n,s)·P(n,s) / 2^{Q(n,s)}`.
    pub ratio: String,
    pub ratio_decimal: f64,
    /// `2^{Q(n,n)} / (n−1)!`.
    pub formula: String,
    pub formula_decimal: f64,
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn asymptotic_report(n: usize, s: usize, exact_count: &BigUint) -> Result<AsymptoticReport> {
    let q = diversity_cycle_count(n, s)?.to_u64().expect("exponent fits");
    let p = frame_automorphisms(n, s)?;
    let ratio = BigRational::new(
        BigInt::from(exact_count * p),
        BigInt::from(BigUint::one() << q),
    );
    let qnn = symmetric_cycle_count(n).to_u64().expect("exponent fits");
    let formula = BigRational::new(
        BigInt::from(BigUint::one() << qnn),
        BigInt::from(factorial(n as u64 - 1)),
    );
    Ok(AsymptoticReport {
        n,
        s,
        exact_count: exact_count.clone(),
        ratio_decimal: ratio_to_f64(&ratio),
        ratio: ratio.to_string(),
        formula_decimal: ratio_to_f64(&formula),
        formula: formula.to_string(),
    })
}
