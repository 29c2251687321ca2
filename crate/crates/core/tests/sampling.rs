use std::collections::HashMap;
use std::hash::Hash;

use ras_core::enumerate::{enumerate_fas, enumerate_fsiase, for_each_member, labelled_count};
use ras_core::probability::{
    estimate, for_each_sample, transfer_row, ClassSampler, EstimateOptions, FasSampler, FsiaseSampler, Mode, Sampled,
};
use ras_core::rng::stream;
use num_bigint::BigInt;
use num_rational::BigRational;
use ras_core::{Class, Guards, Predicate};

/// Upper 0.001 quantiles of the chi-square distribution.
fn chi2_critical(df: usize) -> f64 {
    match df {
        4 => 18.467,
        15 => 37.697,
        47 => 82.720,
        78 => 122.348,
        _ => panic!("no table entry for {df}"),
    }
}

fn chi_square<K: Eq + Hash>(counts: &HashMap<K, u64>, cells: usize, draws: u64) -> f64 {
    let expected = draws as f64 / cells as f64;
    let seen: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let unseen = (cells - counts.len()) as f64 * expected;
    seen + unseen
}

const DRAWS: u64 = 100_000;

#[test]
fn fsiase_uniform_at_three() {
    let g = Guards::default();
    let members: Vec<_> = enumerate_fsiase(3, &g).unwrap().collect();
    let s = FsiaseSampler::new(3).unwrap();
    let mut rng = stream(1, 0);
    let mut counts = HashMap::new();
    for _ in 0..DRAWS {
        let a = s.sample(&mut rng);
        assert!(members.contains(&a));
        *counts.entry(a).or_insert(0u64) += 1;
    }
    assert!(chi_square(&counts, 16, DRAWS) < chi2_critical(15));
}

#[test]
fn fas_uniform_at_two_and_three() {
    let g = Guards::default();
    for (n, cells) in [(2usize, 5usize), (3, 79)] {
        let members: Vec<_> = enumerate_fas(n, &g).unwrap().collect();
        assert_eq!(members.len(), cells);
        let s = FasSampler::new(n, &g, false).unwrap();
        let mut rng = stream(2, n as u64);
        let mut counts = HashMap::new();
        for _ in 0..DRAWS {
            let a = s.sample(&mut rng);
            *counts.entry(a).or_insert(0u64) += 1;
        }
        assert!(counts.keys().all(|a| members.contains(a)));
        let x = chi_square(&counts, cells, DRAWS);
        assert!(x < chi2_critical(cells - 1), "n = {n}: chi2 = {x}");
    }
}

#[test]
fn fsias_uniform_at_three() {
    let g = Guards::default();
    let sampler = ClassSampler::new(3, Class::Fsias, &g, false).unwrap();
    let mut counts = HashMap::new();
    for_each_sample(&sampler, DRAWS, 3, |_, s| {
        let Sampled::Atom(a) = s else { panic!() };
        *counts.entry(a.clone()).or_insert(0u64) += 1;
        Ok(())
    })
    .unwrap();
    let mut members = 0;
    for_each_member(3, Class::Fsias, &g, |_| {
        members += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(members, 48);
    assert!(chi_square(&counts, 48, DRAWS) < chi2_critical(47));
}

#[test]
fn symmetric_integral_mass_at_three() {
    let g = Guards::default();
    let opts = EstimateOptions {
        samples: 79_000,
        seed: 9,
        mode: Mode::Sampled,
        ..Default::default()
    };
    let e = estimate(&Predicate::SymmetricIntegral, 3, &opts, &g).unwrap();
    let target = 48.0 / 79.0;
    assert!((e.value - target).abs() <= 4.0 * e.stderr, "{e:?}");
}

#[test]
fn exact_mode_matches_enumeration() {
    let g = Guards::default();
    let opts = EstimateOptions {
        mode: Mode::Exact,
        ..Default::default()
    };
    let e = estimate(&Predicate::SymmetricIntegral, 4, &opts, &g).unwrap();
    let total = labelled_count(4, Class::Fas, &g, false).unwrap().labelled;
    assert_eq!(e.fraction, format!("{}/{}", 4 * (1 << 10), total));
    let e = estimate(&Predicate::Associative, 4, &opts, &g).unwrap();
    assert_eq!(e.fraction, "147/512");
}

#[test]
fn fixed_seed_streams_repeat() {
    let g = Guards::default();
    let sampler = ClassSampler::new(6, Class::Fas, &g, true).unwrap();
    let collect = || {
        let mut v = Vec::new();
        for_each_sample(&sampler, 2100, 77, |_, s| {
            v.push(ras_core::iso::canonicalize(s.as_model(), &g).unwrap());
            Ok(())
        })
        .unwrap();
        v
    };
    assert_eq!(collect(), collect());
}

#[test]
fn labelled_and_unlabelled_fractions() {
    let g = Guards::default();
    for n in 1..=4 {
        let r = transfer_row(n, &g).unwrap();
        assert!(r.difference >= 0.0);
        if n == 1 {
            assert_eq!(r.labelled, "1");
        }
    }
}

#[test]
fn rigid_within_fsiase_is_reported() {
    let g = Guards::default();
    let opts = EstimateOptions {
        mode: Mode::Exact,
        ..Default::default()
    };
    assert_eq!(estimate(&Predicate::Rigid, 1, &opts, &g).unwrap().value, 1.0);
    // a 3-atom e-form is rigid unless swapping its diversity atoms preserves T
    let rigid = enumerate_fsiase(3, &g)
        .unwrap()
        .filter(|a| a.permuted(&[0, 2, 1]) != *a)
        .count();
    let e = estimate(&Predicate::Rigid, 3, &opts, &g).unwrap();
    assert_eq!(e.ratio(), BigRational::new(BigInt::from(rigid), BigInt::from(16)));
}
