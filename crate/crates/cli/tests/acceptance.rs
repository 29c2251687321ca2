//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout
//! (`cargo test -p ras-cli --test acceptance`). The target exits non-zero on
//! any FAIL except criterion 10, whose failure is expected and is checked to
//! have exactly the known shape (every failing instance repeats a premise
//! variable with contradictory bits; see the README).

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use ras_core::algebra::{atom_structure_of, complex_algebra, is_associative, is_associative_elementwise, verify_na_axioms};
use ras_core::enumerate::{
    count_unlabelled, cycle_census, diversity_cycle_count, enumerate_fas, enumerate_fsiase, fas_count_formula,
    labelled_count, valid_fixed_point_counts,
};
use ras_core::fol::{evaluate, zero_one_scan, ExtensionAxiom};
use ras_core::fraisse::{build_generic, check_amalgam, homogeneity_check, random_problem};
use ras_core::iso::{canonicalize, find_isomorphism};
use ras_core::oracle::{brute_force_census, burnside_fsiase, tier0_fas, tier1_fas};
use ras_core::probability::{estimate, extension_failure_bound, extension_failure_fractions, FsiaseSampler};
use ras_core::rng::stream;
use ras_core::{
    check_axioms, convert_from_e_form, AtomStructure, Class, EStructure, EstimateOptions, Guards, Mode, Model,
    Predicate, Sentence,
};

/// Labelled FSIAS_e structures on four atoms with an associative complex
/// algebra (pinned after the first computation; both checkers agree).
const ASSOCIATIVE_AT_FOUR: usize = 294;

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn as_atom(m: &dyn Model) -> AtomStructure {
    let f: Vec<usize> = (0..m.size()).map(|a| m.converse(a)).collect();
    AtomStructure::new(m.size(), f, &m.identity_atoms(), m.triples().clone()).unwrap()
}

fn c1_census() -> Outcome {
    let g = Guards::unlimited();
    let start = Instant::now();
    let (mut rows, mut bad) = (0, Vec::new());
    for n in 1..=10 {
        for s in valid_fixed_point_counts(n) {
            let f = cycle_census(n, s).unwrap();
            let (b, p) = brute_force_census(n, s, &g).unwrap();
            let got = [b.c1, b.c2, b.c3, b.c6, b.total(), p].map(BigUint::from);
            let want = [&f.c1, &f.c2, &f.c3, &f.c6, &f.q, &f.p];
            rows += 1;
            if got.iter().zip(want).any(|(x, y)| x != y) {
                bad.push((n, s));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 10.0,
        format!("{rows} (n,s) pairs, mismatches {bad:?}, {secs:.2}s"),
    )
}

fn c2_identities() -> Outcome {
    let mut checked = 0;
    let mut ok = true;
    for m in 1..=50usize {
        let s = (BigInt::from(m).pow(3) - BigInt::from(m)) / 6;
        ok &= BigInt::from(diversity_cycle_count(m, m).unwrap()) == s;
        checked += 1;
    }
    for n in 1..=50usize {
        let qnn = BigInt::from(diversity_cycle_count(n, n).unwrap());
        for p in 0..=(n - 1) / 2 {
            let q = BigInt::from(diversity_cycle_count(n, n - 2 * p).unwrap());
            ok &= q - &qnn == BigInt::from(1 - n as i64) * BigInt::from(p);
            checked += 1;
        }
    }
    outcome(ok, format!("{checked} identities checked exactly"))
}

fn c3_labelled() -> Outcome {
    let g = Guards::default();
    let fsiase: Vec<usize> = (1..=4).map(|n| enumerate_fsiase(n, &g).unwrap().count()).collect();
    let closed: Vec<usize> = (1..=4)
        .map(|n| labelled_count(n, Class::Fsiase, &g, false).unwrap().labelled.try_into().unwrap())
        .collect();
    let mut ok = fsiase == [1, 2, 16, 1024] && fsiase == closed;

    let set = |v: Vec<AtomStructure>| v.into_iter().collect::<std::collections::HashSet<_>>();
    let tier0: Vec<_> = (1..=2).map(|n| set(tier0_fas(n).unwrap())).collect();
    let fast: Vec<_> = (1..=3).map(|n| set(enumerate_fas(n, &g).unwrap().collect())).collect();
    ok &= tier0[0].len() == 1 && tier0[1].len() == 5;
    ok &= tier0[0] == fast[0] && tier0[1] == fast[1];
    ok &= set(tier1_fas(3).unwrap()) == fast[2];

    let enumerated: Vec<usize> = (1..=4).map(|n| enumerate_fas(n, &g).unwrap().count()).collect();
    let formula: Vec<BigUint> = (1..=4).map(fas_count_formula).collect();
    ok &= enumerated == [1, 5, 79, 6769];
    ok &= formula.iter().zip(&enumerated).all(|(f, &e)| *f == BigUint::from(e));
    outcome(
        ok,
        format!("FSIAS_e {fsiase:?}; FAS enumerated {enumerated:?} = formula; tier-0 (n<=2) and tier-1 (n=3) sets equal"),
    )
}

fn c4_unlabelled() -> Outcome {
    let g = Guards::default();
    let report = count_unlabelled(3, Class::Fsiase, &Predicate::All, &g).unwrap();
    let unl: usize = report.unlabelled.clone().unwrap().try_into().unwrap();
    let (count, sum, order) = burnside_fsiase(3).unwrap();

    let mut reps: HashMap<_, EStructure> = HashMap::new();
    let mut each_maps_to_rep = true;
    for s in enumerate_fsiase(3, &g).unwrap() {
        let form = canonicalize(&s, &g).unwrap();
        match reps.get(&form) {
            Some(r) => each_maps_to_rep &= find_isomorphism(&s, r).is_some(),
            None => {
                reps.insert(form, s);
            }
        }
    }
    let reps: Vec<_> = reps.into_values().collect();
    let mut pairwise_distinct = true;
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            pairwise_distinct &= find_isomorphism(a, b).is_none();
        }
    }
    let ok = unl == 10
        && count == BigUint::from(10u32)
        && sum == BigUint::from(20u32)
        && order == BigUint::from(2u32)
        && pairwise_distinct
        && each_maps_to_rep;
    outcome(
        ok,
        format!("canonical forms {unl}; Burnside {sum}/{order} = {count}; {} classes pairwise non-isomorphic", reps.len()),
    )
}

fn c5_trend() -> Outcome {
    let g = Guards::default();
    let exact = |n| {
        let opts = EstimateOptions {
            mode: Mode::Exact,
            ..Default::default()
        };
        estimate(&Predicate::SymmetricIntegral, n, &opts, &g).unwrap().fraction
    };
    let fr: Vec<String> = (2..=4).map(exact).collect();
    let pinned = fr == ["4/5", "48/79", "4096/6769"];

    // n = 5 from the closed forms (FSIAS over FAS)
    let si5 = labelled_count(5, Class::Fsias, &g, false).unwrap().labelled;
    let all5 = labelled_count(5, Class::Fas, &g, true).unwrap().labelled;
    let p5 = u64::try_from(&si5).unwrap() as f64 / u64::try_from(&all5).unwrap() as f64;

    let opts = EstimateOptions {
        samples: 10_000,
        seed: 20,
        mode: Mode::Sampled,
        allow_unvalidated: true,
        ..Default::default()
    };
    let e10 = estimate(&Predicate::SymmetricIntegral, 10, &opts, &g).unwrap();
    let gap = e10.value - p5;
    let sigma = e10.stderr; // the n = 5 value is exact
    outcome(
        pinned && gap > 5.0 * sigma,
        format!(
            "exact {fr:?}; n=5 {si5}/{all5} = {p5:.4}; sampled n=10 {:.4} ± {:.4}; gap {:.1}σ",
            e10.value,
            sigma,
            gap / sigma
        ),
    )
}

fn c6_complex_algebras() -> Outcome {
    let g = Guards::default();
    let (mut total, mut good) = (0, 0);
    let mut check = |m: &dyn Model| {
        total += 1;
        let ca = complex_algebra(m).unwrap();
        let na = verify_na_axioms(&ca, &g).unwrap();
        if na.is_na() && atom_structure_of(&ca).unwrap() == as_atom(m) {
            good += 1;
        }
    };
    for n in 1..=3 {
        enumerate_fas(n, &g).unwrap().for_each(|a| check(&a));
    }
    for n in 1..=4 {
        enumerate_fsiase(n, &g).unwrap().for_each(|e| check(&e));
    }
    outcome(total == good, format!("{good}/{total} NA and round-trip"))
}

fn c7_associativity() -> Outcome {
    let g = Guards::default();
    let (mut agree, mut assoc) = (0, 0);
    let four: Vec<_> = enumerate_fsiase(4, &g).unwrap().collect();
    for s in &four {
        let atom = is_associative(s);
        agree += (atom == is_associative_elementwise(&complex_algebra(s).unwrap(), &g).unwrap()) as usize;
        assoc += atom as usize;
    }
    let sampler = FsiaseSampler::new(8).unwrap();
    let mut rng = stream(7, 0);
    let (mut agree8, mut assoc8) = (0, 0);
    for _ in 0..10_000 {
        let s = sampler.sample(&mut rng);
        let atom = is_associative(&s);
        agree8 += (atom == is_associative_elementwise(&complex_algebra(&s).unwrap(), &g).unwrap()) as usize;
        assoc8 += atom as usize;
    }
    outcome(
        agree == four.len() && agree8 == 10_000 && assoc == ASSOCIATIVE_AT_FOUR,
        format!(
            "n=4 agree {agree}/{}, associative {assoc} (pinned {ASSOCIATIVE_AT_FOUR}); n=8 agree {agree8}/10000 ({assoc8} associative)",
            four.len()
        ),
    )
}

fn c8_extension() -> Outcome {
    let g = Guards::default();
    let mut rows = 0;
    let mut ok = true;
    for m in 0..=2 {
        let patterns: Vec<ExtensionAxiom> = if m <= 1 {
            ExtensionAxiom::all(m).collect()
        } else {
            let mut rng = stream(8, 0);
            (0..20).map(|_| ExtensionAxiom::random(2, &mut rng)).collect()
        };
        for n in [10, 20, 40] {
            let bound = extension_failure_bound(n, m).unwrap().decimal;
            for r in extension_failure_fractions(&patterns, n, 10_000, 8, &g).unwrap() {
                rows += 1;
                ok &= r.value <= bound + 5.0 * r.stderr;
            }
        }
    }
    let (mut dual, mut pairs) = (0, 0);
    for s in enumerate_fsiase(3, &g).unwrap() {
        for m in 0..=2 {
            for p in ExtensionAxiom::all(m) {
                pairs += 1;
                dual += (evaluate(&p.sentence(), &s, &g).unwrap() == p.holds_directly(&s).unwrap()) as usize;
            }
        }
    }
    ok &= dual == pairs;
    outcome(ok, format!("{rows} (pattern, n) rows within bound + 5σ; n=3 evaluator = witness search on {dual}/{pairs}"))
}

fn c9_amalgamation() -> Outcome {
    let mut rng = stream(9, 0);
    let mut passed = 0;
    for _ in 0..1000 {
        let p = random_problem(6, &mut rng).unwrap();
        passed += check_amalgam(&p).map(|(_, c)| c.passed()).unwrap_or(false) as usize;
    }
    outcome(passed == 1000, format!("{passed}/1000 squares"))
}

/// Returns the outcome and whether a failure has the known shape.
fn c10_generic() -> (Outcome, bool) {
    let g = Guards::default();
    let gen = build_generic(2, 2, &g).unwrap();
    let in_class = check_axioms(&convert_from_e_form(&gen).unwrap()).in_fsias();
    let round1: Vec<usize> = build_generic(1, 2, &g).unwrap().diversity_atoms();

    let (mut instances, mut failures, mut distinct_failures, mut consistent_failures) = (0, 0, 0, 0);
    for m in 0..=2usize {
        for p in ExtensionAxiom::all(m) {
            let mut idx = vec![0; m];
            loop {
                let xs: Vec<usize> = idx.iter().map(|&k| round1[k]).collect();
                instances += 1;
                if !p.instance_holds(&gen, &xs).unwrap() {
                    failures += 1;
                    let mut d = xs.clone();
                    d.sort_unstable();
                    d.dedup();
                    distinct_failures += (d.len() == xs.len()) as usize;
                    consistent_failures += p.consistent_on(&xs) as usize;
                }
                // odometer over round1^m
                let mut k = m;
                while k > 0 {
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < round1.len() {
                        break;
                    }
                    idx[k] = 0;
                }
                if k == 0 && idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
    }
    let pass = in_class && failures == 0;
    let known_shape = in_class && distinct_failures == 0 && consistent_failures == 0;
    let detail = format!(
        "|A| = {}, axioms {}; {} of {instances} instances over the {} round-1 atoms fail, \
         all with repeated x_i and contradictory bits ({distinct_failures} distinct-tuple, \
         {consistent_failures} consistent-pattern failures)",
        gen.n(),
        if in_class { "hold" } else { "FAIL" },
        failures,
        round1.len(),
    );
    (outcome(pass, detail), known_shape)
}

fn c11_homogeneity() -> Outcome {
    let g = Guards::default();
    let (mut total, mut agree, mut ultra) = (0, 0, 0);
    for n in 1..=3 {
        for s in enumerate_fsiase(n, &g).unwrap() {
            let h = homogeneity_check(&s, &g).unwrap();
            total += 1;
            agree += (h.ultra == h.weak) as usize;
            ultra += h.ultra as usize;
        }
    }
    outcome(total == 19 && agree == 19, format!("ultra = weak on {agree}/{total} ({ultra} homogeneous)"))
}

fn c12_scan() -> Outcome {
    let g = Guards::default();
    let s = Sentence::parse("exists x. (!(x = e) & T(x,x,x))").unwrap();
    let n = 20;
    let samples = 10_000;
    let p = 1.0 - 0.5f64.powi(n as i32 - 1);
    // σ from the exact target: the plug-in estimate is 0 when every draw agrees
    let sigma = (p * (1.0 - p) / samples as f64).sqrt();
    let pos = zero_one_scan("s", &s, [n], samples, 12, Mode::Sampled, &g).unwrap();
    let neg = zero_one_scan("not:s", &s.negate(), [n], samples, 12, Mode::Sampled, &g).unwrap();
    let (a, b) = (pos[0].estimate.value, neg[0].estimate.value);
    let ok = (a - p).abs() <= 5.0 * sigma && (b - (1.0 - p)).abs() <= 5.0 * sigma;
    outcome(ok, format!("n=20: {a} vs {p:.8}, negation {b} vs {:.2e}, 5σ = {:.2e}", 1.0 - p, 5.0 * sigma))
}

fn c13_determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &["enumerate", "--class", "fas", "--n", "3"],
        &["sample", "--class", "fas", "--n", "5", "--samples", "500", "--seed", "13", "--unsafe"],
        &["estimate", "--predicate", "rigid", "--n", "6", "--samples", "3000", "--seed", "13"],
        &["scan", "--sentence", "exists x. (!(x = e) & T(x,x,x))", "--n", "3..8", "--samples", "2000", "--seed", "13"],
    ];
    let run = |args: &[&str], threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_ras"))
            .args(args)
            .args(["--no-header", "--threads", threads])
            .output()
            .unwrap()
    };
    let mut identical = 0;
    for args in runs {
        let (a, b, c) = (run(args, "1"), run(args, "1"), run(args, "4"));
        let strip = |o: &std::process::Output| {
            // the echoed config names the thread count
            String::from_utf8(o.stdout.clone()).unwrap().replace("\"threads\":4", "\"threads\":1")
        };
        if a.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout && strip(&a) == strip(&c) {
            identical += 1;
        }
    }
    outcome(identical == 4, format!("{identical}/4 subcommands byte-identical across repeats and thread counts"))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        }
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "cycle census vs brute force, n <= 10", c1_census),
        (2, "Q(m,m) = S(m) and Q-difference, n <= 50", c2_identities),
        (3, "labelled counts vs oracles", c3_labelled),
        (4, "unlabelled FSIAS_e at n = 3", c4_unlabelled),
        (5, "symmetric-integral fraction trend", c5_trend),
        (6, "complex algebras and atom-structure round trip", c6_complex_algebras),
        (7, "associativity cross-validation", c7_associativity),
        (8, "extension-axiom failure bounds", c8_extension),
        (9, "free amalgamation", c9_amalgamation),
    ];
    let mut results = Vec::new();
    for (id, name, f) in criteria {
        results.push((id, name, guarded(f), false));
    }
    let mut known = false;
    let c10 = guarded(|| {
        let (o, k) = c10_generic();
        known = k;
        o
    });
    results.push((10, "generic construction", c10, known));
    let rest: Vec<Criterion> = vec![
        (11, "ultrahomogeneity = weak homogeneity, n <= 3", c11_homogeneity),
        (12, "0-1 scan at n = 20", c12_scan),
        (13, "CLI determinism", c13_determinism),
    ];
    for (id, name, f) in rest {
        results.push((id, name, guarded(f), false));
    }

    for (id, name, o, _) in &results {
        println!("{} {id:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("{passed}/{} criteria pass", results.len());

    let unexpected: Vec<u32> = results
        .iter()
        .filter(|(id, _, o, known)| !o.pass && !(*id == 10 && *known))
        .map(|r| r.0)
        .collect();
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
