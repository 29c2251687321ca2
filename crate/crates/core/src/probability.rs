//! Uniform samplers over labelled structures and probability estimates.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Guards;
use crate::cycle::{CycleTable, IdentityData};
use crate::enumerate::{fas_terms, for_each_member, labelled_count, ratio_to_f64, Class, CountMethod, FasTerm};
use crate::error::{Error, Result};
use crate::predicate::Predicate;
use crate::rng::{blocks, stream};
use crate::structure::{convert_from_e_form, AtomStructure, EStructure, Model};
use crate::triple::{Triple, TripleSet};

// ---------------------------------------------------------------------------
// Samplers

/// Uniform sampler over the `2^{Q(n,n)}` labelled FSIAS_e structures with
/// `e = 0`: the identity part is forced, each diversity cycle is kept with
/// probability 1/2.
///
/// Cycles are visited in representative order and decided by the bits of
/// successive `next_u64` draws, low bit first.
#[derive(Debug, Clone)]
pub struct FsiaseSampler {
    n: usize,
    base: TripleSet,
    cycles: Vec<Vec<u32>>,
}

impl FsiaseSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStructure("empty universe".into()));
        }
        let table = CycleTable::symmetric(n, 0)?;
        let base = table.forced_identity_part()?;
        let cycles = table
            .diversity_cycles()
            .into_iter()
            .map(|c| table.cycles()[c].members().iter().map(|t| t.index(n) as u32).collect())
            .collect();
        Ok(FsiaseSampler { n, base, cycles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> EStructure {
        let mut set = self.base.clone();
        for chunk in self.cycles.chunks(64) {
            let bits = rng.next_u64();
            for (j, members) in chunk.iter().enumerate() {
                if bits >> j & 1 == 1 {
                    for &idx in members {
                        set.insert_index(idx as usize);
                    }
                }
            }
        }
        EStructure::from_parts_unchecked(self.n, 0, set)
    }
}

/// One uniform FSIAS_e draw. Builds the cycle table on every call; use
/// [`FsiaseSampler`] for repeated draws.
pub fn sample_fsiase<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<EStructure> {
    Ok(FsiaseSampler::new(n)?.sample(rng))
}

/// Uniform sampler over labelled FAS, following the decomposition of the
/// closed-form count: pick `(|I|, #pairs)` with probability proportional to
/// its exact weight, then a uniform identity set, a uniform involution of
/// the diversity atoms with that many pairs, a uniform nonempty set of
/// identity cycles `[a,j,a]` per diversity atom, and fair coins for the
/// diversity cycles.
#[derive(Debug, Clone)]
pub struct FasSampler {
    n: usize,
    terms: Vec<FasTerm>,
    total: BigUint,
}

impl FasSampler {
    pub fn new(n: usize, guards: &Guards, allow_unvalidated: bool) -> Result<Self> {
        let total = labelled_count(n, Class::Fas, guards, allow_unvalidated)?.labelled;
        Ok(FasSampler {
            n,
            terms: fas_terms(n),
            total,
        })
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> AtomStructure {
        let n = self.n;
        let mut r = rng.gen_biguint_below(&self.total);
        let term = self
            .terms
            .iter()
            .find(|t| {
                if r < t.weight {
                    true
                } else {
                    r -= &t.weight;
                    false
                }
            })
            .expect("weights sum to the total");
        let (i, p) = (term.identity_atoms, term.pairs);

        let mut identity = rand::seq::index::sample(rng, n, i).into_vec();
        identity.sort_unstable();
        let mut is_id = vec![false; n];
        for &k in &identity {
            is_id[k] = true;
        }
        let mut diversity: Vec<usize> = (0..n).filter(|&a| !is_id[a]).collect();
        diversity.shuffle(rng);
        let mut f: Vec<usize> = (0..n).collect();
        for pair in diversity[..2 * p].chunks(2) {
            f[pair[0]] = pair[1];
            f[pair[1]] = pair[0];
        }
        diversity.sort_unstable();

        let table = CycleTable::new(n, &f, &IdentityData::Set(identity.clone())).expect("valid frame");
        let mut chosen = Vec::new();
        for &k in &identity {
            chosen.push(table.cycle_index(Triple::new(k, k, k)));
        }
        for &a in &diversity {
            let mask = rng.gen_range(1u64..1 << i);
            for (bit, &j) in identity.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    chosen.push(table.cycle_index(Triple::new(a, j, a)));
                }
            }
        }
        for chunk in table.diversity_cycles().chunks(64) {
            let bits = rng.next_u64();
            for (j, &c) in chunk.iter().enumerate() {
                if bits >> j & 1 == 1 {
                    chosen.push(c);
                }
            }
        }
        let set = table.union_of(chosen);
        AtomStructure::new(n, f, &identity, set).expect("valid shape")
    }
}

/// Uniform over labelled FSIAS: a uniform FSIAS_e draw relabelled so that
/// a uniformly chosen atom is the identity.
fn sample_fsias<R: Rng + ?Sized>(s: &FsiaseSampler, rng: &mut R) -> AtomStructure {
    let e = s.sample(rng);
    let k = rng.gen_range(0..s.n);
    let mut perm: Vec<usize> = (0..s.n).collect();
    perm.swap(0, k);
    convert_from_e_form(&e.permuted(&perm)).expect("FSIAS_e member")
}

/// A sampler for any of the three classes.
#[derive(Debug, Clone)]
pub enum ClassSampler {
    Fsiase(FsiaseSampler),
    Fsias(FsiaseSampler),
    Fas(FasSampler),
}

pub enum Sampled {
    Atom(AtomStructure),
    E(EStructure),
}

impl Sampled {
    pub fn as_model(&self) -> &dyn Model {
        match self {
            Sampled::Atom(a) => a,
            Sampled::E(e) => e,
        }
    }
}

impl ClassSampler {
    pub fn new(n: usize, class: Class, guards: &Guards, allow_unvalidated: bool) -> Result<Self> {
        Ok(match class {
            Class::Fsiase => ClassSampler::Fsiase(FsiaseSampler::new(n)?),
            Class::Fsias => ClassSampler::Fsias(FsiaseSampler::new(n)?),
            Class::Fas => ClassSampler::Fas(FasSampler::new(n, guards, allow_unvalidated)?),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Sampled {
        match self {
            ClassSampler::Fsiase(s) => Sampled::E(s.sample(rng)),
            ClassSampler::Fsias(s) => Sampled::Atom(sample_fsias(s, rng)),
            ClassSampler::Fas(s) => Sampled::Atom(s.sample(rng)),
        }
    }
}

/// Calls `visit(k, structure)` for the `samples` draws of a seeded run,
/// block by block and in order.
pub fn for_each_sample(
    sampler: &ClassSampler,
    samples: u64,
    seed: u64,
    mut visit: impl FnMut(u64, &Sampled) -> Result<()>,
) -> Result<()> {
    let mut k = 0;
    for (block, len) in blocks(samples) {
        let mut rng = stream(seed, block);
        for _ in 0..len {
            visit(k, &sampler.sample(&mut rng))?;
            k += 1;
        }
    }
    Ok(())
}

/// Counts, in parallel over blocks, the draws for which every closure in
/// `tests` holds; one count per closure.
pub fn count_hits<T>(sampler: &ClassSampler, samples: u64, seed: u64, tests: &[T]) -> Result<Vec<u64>>
where
    T: Fn(&dyn Model) -> Result<bool> + Sync,
{
    let per_block: Vec<Result<Vec<u64>>> = blocks(samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(block, len)| {
            let mut rng = stream(seed, block);
            let mut hits = vec![0u64; tests.len()];
            for _ in 0..len {
                let s = sampler.sample(&mut rng);
                for (h, t) in hits.iter_mut().zip(tests) {
                    if t(s.as_model())? {
                        *h += 1;
                    }
                }
            }
            Ok(hits)
        })
        .collect();
    let mut total = vec![0u64; tests.len()];
    for b in per_block {
        for (t, h) in total.iter_mut().zip(b?) {
            *t += h;
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Estimates

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exact when full enumeration is allowed and no larger than the
    /// sample budget, sampled otherwise.
    Auto,
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub predicate: String,
    pub class: Class,
    pub n: usize,
    /// Draws, or the population size in exact mode.
    pub samples: u64,
    pub seed: u64,
    pub value: f64,
    /// Binomial standard error `sqrt(v(1−v)/samples)`; zero in exact mode.
    pub stderr: f64,
    /// `hits/samples` in lowest terms (exact in exact mode).
    pub fraction: String,
    pub method: CountMethod,
}

impl ProbabilityEstimate {
    pub const CSV_HEADER: &'static str = "predicate,n,samples,seed,value,stderr";

    pub fn from_counts(
        predicate: String,
        class: Class,
        n: usize,
        hits: &BigUint,
        total: &BigUint,
        seed: u64,
        method: CountMethod,
    ) -> Self {
        let frac = if total.is_zero() {
            BigRational::zero()
        } else {
            BigRational::new(BigInt::from(hits.clone()), BigInt::from(total.clone()))
        };
        let value = ratio_to_f64(&frac);
        let samples = total.to_u64().unwrap_or(u64::MAX);
        let stderr = match method {
            CountMethod::Sampled if samples > 0 => (value * (1.0 - value) / samples as f64).sqrt(),
            _ => 0.0,
        };
        ProbabilityEstimate {
            predicate,
            class,
            n,
            samples,
            seed,
            value,
            stderr,
            fraction: frac.to_string(),
            method,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.predicate, self.n, self.samples, self.seed, self.value, self.stderr
        )
    }

    /// The exact fraction.
    pub fn ratio(&self) -> BigRational {
        self.fraction.parse().expect("fraction is well formed")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimateOptions {
    pub class: Option<Class>,
    pub samples: u64,
    pub seed: u64,
    pub mode: Mode,
    pub allow_unvalidated: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            class: None,
            samples: 10_000,
            seed: 0,
            mode: Mode::Auto,
            allow_unvalidated: false,
        }
    }
}

fn enumeration_allowed(n: usize, class: Class, guards: &Guards) -> bool {
    match class {
        Class::Fsiase => n <= guards.enumerate_fsiase,
        Class::Fsias | Class::Fas => n <= guards.enumerate_fas,
    }
}

/// Exact fraction of `class` members satisfying `predicate`, by enumeration.
pub fn exact_fraction(predicate: &Predicate, class: Class, n: usize, guards: &Guards) -> Result<(BigUint, BigUint)> {
    let (mut hits, mut total) = (0u64, 0u64);
    for_each_member(n, class, guards, |m| {
        total += 1;
        if predicate.holds(m, guards)? {
            hits += 1;
        }
        Ok(())
    })?;
    Ok((hits.into(), total.into()))
}

/// Probability that a uniform labelled member of the class satisfies
/// `predicate`.
pub fn estimate(predicate: &Predicate, n: usize, opts: &EstimateOptions, guards: &Guards) -> Result<ProbabilityEstimate> {
    let class = opts.class.unwrap_or_else(|| predicate.default_class());
    let exact = match opts.mode {
        Mode::Exact => true,
        Mode::Sampled => false,
        Mode::Auto => {
            enumeration_allowed(n, class, guards)
                && labelled_count(n, class, guards, true)?.labelled <= BigUint::from(opts.samples)
        }
    };
    if exact {
        let (hits, total) = exact_fraction(predicate, class, n, guards)?;
        return Ok(ProbabilityEstimate::from_counts(
            predicate.name(),
            class,
            n,
            &hits,
            &total,
            opts.seed,
            CountMethod::Enumerated,
        ));
    }
    let sampler = ClassSampler::new(n, class, guards, opts.allow_unvalidated)?;
    let test = |m: &dyn Model| predicate.holds(m, guards);
    let hits = count_hits(&sampler, opts.samples, opts.seed, &[test])?[0];
    Ok(ProbabilityEstimate::from_counts(
        predicate.name(),
        class,
        n,
        &hits.into(),
        &opts.samples.into(),
        opts.seed,
        CountMethod::Sampled,
    ))
}

// ---------------------------------------------------------------------------
// Extension axioms

/// `(n−1)^m (1 − 2^{−(m²+3m+2)/2})^{n−m−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureBound {
    pub n: usize,
    pub m: usize,
    pub exact: String,
    pub decimal: f64,
}

pub fn extension_failure_bound(n: usize, m: usize) -> Result<FailureBound> {
    if n <= m + 1 {
        return Err(Error::Precondition(format!("bound needs n > m + 1 (n = {n}, m = {m})")));
    }
    let k = (m * m + 3 * m + 2) / 2;
    let den = BigUint::one() << k;
    let miss = BigRational::new(BigInt::from(&den - 1u32), BigInt::from(den));
    let exact = BigRational::from_integer(BigInt::from(n - 1)).pow(m as i32) * miss.pow((n - m - 1) as i32);
    Ok(FailureBound {
        n,
        m,
        decimal: ratio_to_f64(&exact),
        exact: exact.to_string(),
    })
}

/// Empirical fraction of FSIAS_e samples on which each extension axiom
/// fails (evaluated through the first-order evaluator). All axioms share
/// one stream of samples.
pub fn extension_failure_fractions(
    patterns: &[crate::fol::ExtensionAxiom],
    n: usize,
    samples: u64,
    seed: u64,
    guards: &Guards,
) -> Result<Vec<ProbabilityEstimate>> {
    let sentences: Vec<_> = patterns.iter().map(|p| p.sentence()).collect();
    let tests: Vec<_> = sentences
        .iter()
        .map(|s| move |m: &dyn Model| crate::fol::evaluate(s, m, guards).map(|v| !v))
        .collect();
    let sampler = ClassSampler::new(n, Class::Fsiase, guards, false)?;
    let hits = count_hits(&sampler, samples, seed, &tests)?;
    Ok(patterns
        .iter()
        .zip(hits)
        .map(|(p, h)| {
            ProbabilityEstimate::from_counts(
                format!("fails:{}", p.id()),
                Class::Fsiase,
                n,
                &h.into(),
                &samples.into(),
                seed,
                CountMethod::Sampled,
            )
        })
        .collect())
}

/// Labelled and unlabelled symmetric-integral fractions within FAS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub n: usize,
    pub labelled: String,
    pub unlabelled: String,
    pub difference: f64,
}

pub fn transfer_row(n: usize, guards: &Guards) -> Result<TransferRow> {
    use crate::enumerate::count_unlabelled;
    let si = count_unlabelled(n, Class::Fas, &Predicate::SymmetricIntegral, guards)?;
    let all = count_unlabelled(n, Class::Fas, &Predicate::All, guards)?;
    let lab = BigRational::new(BigInt::from(si.labelled), BigInt::from(all.labelled));
    let unl = BigRational::new(
        BigInt::from(si.unlabelled.expect("unlabelled count")),
        BigInt::from(all.unlabelled.expect("unlabelled count")),
    );
    Ok(TransferRow {
        n,
        difference: (ratio_to_f64(&lab) - ratio_to_f64(&unl)).abs(),
        labelled: lab.to_string(),
        unlabelled: unl.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::check_axioms;
    use std::collections::HashMap;

    #[test]
    fn fsiase_sampler_is_deterministic() {
        let s = FsiaseSampler::new(5).unwrap();
        let mut a = stream(3, 0);
        let mut b = stream(3, 0);
        for _ in 0..20 {
            assert_eq!(s.sample(&mut a), s.sample(&mut b));
        }
        let one = FsiaseSampler::new(1).unwrap();
        assert_eq!(one.sample(&mut a), EStructure::trivial());
    }

    #[test]
    fn fas_samples_are_members() {
        let g = Guards::default();
        let s = FasSampler::new(4, &g, false).unwrap();
        let mut rng = stream(11, 0);
        for _ in 0..200 {
            let a = s.sample(&mut rng);
            assert!(check_axioms(&a).in_fas(), "{a:?}");
        }
        assert!(FasSampler::new(6, &g, false).is_err());
        let s = FasSampler::new(7, &g, true).unwrap();
        for _ in 0..20 {
            assert!(check_axioms(&s.sample(&mut rng)).in_fas());
        }
    }

    #[test]
    fn fas_sampler_hits_all_five_at_n2() {
        let s = FasSampler::new(2, &Guards::default(), false).unwrap();
        let mut rng = stream(5, 0);
        let mut seen: HashMap<AtomStructure, u32> = HashMap::new();
        for _ in 0..2000 {
            *seen.entry(s.sample(&mut rng)).or_default() += 1;
        }
        assert_eq!(seen.len(), 5);
        assert!(seen.values().all(|&c| (300..500).contains(&c)), "{seen:?}");
    }

    #[test]
    fn exact_estimates() {
        let g = Guards::default();
        let opts = EstimateOptions {
            mode: Mode::Exact,
            ..Default::default()
        };
        let e = estimate(&Predicate::SymmetricIntegral, 2, &opts, &g).unwrap();
        assert_eq!(e.fraction, "4/5");
        assert_eq!(e.value, 0.8);
        assert_eq!(e.method, CountMethod::Enumerated);
        let e = estimate(&Predicate::Rigid, 1, &opts, &g).unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn auto_mode_switches() {
        let g = Guards::default();
        let opts = EstimateOptions {
            samples: 100,
            ..Default::default()
        };
        assert_eq!(estimate(&Predicate::All, 3, &opts, &g).unwrap().method, CountMethod::Enumerated);
        assert_eq!(estimate(&Predicate::All, 5, &opts, &g).unwrap().method, CountMethod::Sampled);
    }

    #[test]
    fn sampled_estimate_is_reproducible() {
        let g = Guards::default();
        let opts = EstimateOptions {
            samples: 3000,
            seed: 42,
            mode: Mode::Sampled,
            ..Default::default()
        };
        let a = estimate(&Predicate::Associative, 4, &opts, &g).unwrap();
        let b = estimate(&Predicate::Associative, 4, &opts, &g).unwrap();
        assert_eq!(a, b);
        assert!(a.stderr > 0.0);
    }

    #[test]
    fn bounds() {
        let b = extension_failure_bound(11, 0).unwrap();
        assert_eq!(b.exact, "1/1024");
        let b = extension_failure_bound(10, 1).unwrap();
        assert!((b.decimal - 9.0 * (7.0f64 / 8.0).powi(8)).abs() < 1e-12);
        let b = extension_failure_bound(40, 2).unwrap();
        assert!((b.decimal - 39.0f64.powi(2) * (63.0f64 / 64.0).powi(37)).abs() < 1e-9);
        assert!(extension_failure_bound(2, 1).is_err());
    }
}
