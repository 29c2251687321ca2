use std::collections::HashSet;
use std::io::{self, Read, Write};
use std::path::Path;

use num_bigint::BigUint;
use ras_core::algebra::{atom_structure_of, complex_algebra, is_associative, is_associative_elementwise, verify_na_axioms};
use ras_core::enumerate::{
    count_unlabelled, cycle_census, diversity_cycle_count, enumerate_fas, enumerate_fsiase, fas_count_formula,
    labelled_count, labelled_count_enumerated, symmetric_cycle_count, valid_fixed_point_counts,
};
use ras_core::fol::{evaluate, parse_sentence_file, zero_one_scan, ExtensionAxiom};
use ras_core::fraisse::{
    build_generic, check_amalgam, extend_with_witness, homogeneity_check, one_point_extension, random_problem,
    AmalgamationProblem, Embedding,
};
use ras_core::json::{atom_to_value, e_to_value, structure_from_value, structures_from_text, AnyStructure};
use ras_core::oracle::{brute_force_census, burnside_fsiase, tier0_fas, tier1_fas};
use ras_core::probability::{
    estimate, extension_failure_bound, extension_failure_fractions, for_each_sample, ClassSampler, Sampled,
};
use ras_core::rng::stream;
use ras_core::{
    check_axioms, convert_from_e_form, convert_to_e_form, AtomStructure, Class, CountMethod, CountReport,
    EStructure, EstimateOptions, Mode, Model, Predicate, Sentence,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::Writer;
use crate::{
    AmalgamateArgs, Command, Context, CountArgs, CyclesArgs, EnumerateArgs, EstimateArgs, ExtendArgs, ExtensionArgs,
    Failure, FoEvalArgs, GenericArgs, HomogArgs, SampleArgs, ScanArgs, VerifyArgs,
};

type Out<'a, W> = &'a mut Writer<W>;

pub fn run<W: Write>(cmd: &Command, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    match cmd {
        Command::Cycles(a) => cycles(a, w),
        Command::Enumerate(a) => enumerate(a, ctx, w),
        Command::Count(a) => count(a, ctx, w),
        Command::Sample(a) => sample(a, ctx, w),
        Command::Estimate(a) => estimate_cmd(a, ctx, w),
        Command::Extension(a) => extension(a, ctx, w),
        Command::FoEval(a) => fo_eval(a, ctx, w),
        Command::Scan(a) => scan(a, ctx, w),
        Command::Amalgamate(a) => amalgamate(a, w),
        Command::Extend(a) => extend(a, w),
        Command::Generic(a) => generic(a, ctx, w),
        Command::Homog(a) => homog(a, ctx, w),
        Command::Verify(a) => verify(a, ctx, w),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn e_form(s: AnyStructure) -> Result<EStructure, Failure> {
    Ok(match s {
        AnyStructure::E(e) => e,
        AnyStructure::Atom(a) => convert_to_e_form(&a)?,
    })
}

fn sampled_value(s: &Sampled) -> Value {
    match s {
        Sampled::Atom(a) => atom_to_value(a),
        Sampled::E(e) => e_to_value(e),
    }
}

fn mode(exact: bool, sampled: bool) -> Mode {
    match (exact, sampled) {
        (true, _) => Mode::Exact,
        (_, true) => Mode::Sampled,
        _ => Mode::Auto,
    }
}

fn cycles<W: Write>(a: &CyclesArgs, w: Out<W>) -> Result<(), Failure> {
    let single = a.n.0.len() == 1 && a.s.as_ref().is_some_and(|s| s.0.len() == 1);
    for &n in &a.n.0 {
        let valid: Vec<usize> = valid_fixed_point_counts(n).collect();
        let chosen: Vec<usize> = match &a.s {
            // a single explicit pair is validated, lists are filtered
            Some(s) if single => s.0.clone(),
            Some(s) => s.0.iter().copied().filter(|s| valid.contains(s)).collect(),
            None => valid,
        };
        for s in chosen {
            let mut v = serde_json::to_value(cycle_census(n, s)?).expect("census serializes");
            v["method"] = json!(CountMethod::Formula);
            w.record(v)?;
        }
    }
    Ok(())
}

fn enumerate<W: Write>(a: &EnumerateArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    let predicate: Predicate = a.predicate.parse()?;
    let g = &ctx.guards;
    let limit = a.limit.unwrap_or(u64::MAX);
    let mut written = 0u64;
    let mut emit = |m: &dyn Model, v: Value| -> Result<bool, Failure> {
        if written >= limit {
            return Ok(false);
        }
        if predicate.holds(m, g)? {
            w.record(v)?;
            written += 1;
        }
        Ok(true)
    };
    match a.class {
        Class::Fsiase => {
            for s in enumerate_fsiase(a.n, g)? {
                if !emit(&s, e_to_value(&s))? {
                    break;
                }
            }
        }
        Class::Fas | Class::Fsias => {
            for s in enumerate_fas(a.n, g)? {
                if a.class == Class::Fsias && !(s.is_symmetric() && s.is_integral()) {
                    continue;
                }
                if !emit(&s, atom_to_value(&s))? {
                    break;
                }
            }
        }
    }
    Ok(())
}

fn count<W: Write>(a: &CountArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    let predicate: Predicate = a.predicate.parse()?;
    let g = &ctx.guards;
    for &n in &a.n.0 {
        let report = if a.unlabelled {
            count_unlabelled(n, a.class, &predicate, g)?
        } else if predicate != Predicate::All {
            let mut hits = 0u64;
            ras_core::enumerate::for_each_member(n, a.class, g, |m| {
                hits += predicate.holds(m, g)? as u64;
                Ok(())
            })?;
            CountReport {
                n,
                class: a.class,
                predicate: predicate.name(),
                labelled: hits.into(),
                unlabelled: None,
                method: CountMethod::Enumerated,
            }
        } else if a.enumerate {
            labelled_count_enumerated(n, a.class, g)?
        } else {
            labelled_count(n, a.class, g, ctx.allow_unvalidated)?
        };
        w.record(report)?;
    }
    Ok(())
}

fn sample<W: Write>(a: &SampleArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    let sampler = ClassSampler::new(a.n, a.class, &ctx.guards, ctx.allow_unvalidated)?;
    let mut io_err = None;
    for_each_sample(&sampler, a.samples, a.seed, |_, s| {
        if io_err.is_none() {
            io_err = w.record(sampled_value(s)).err();
        }
        Ok(())
    })?;
    match io_err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn estimate_cmd<W: Write>(a: &EstimateArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    let predicate = match (&a.predicate, &a.sentence) {
        (Some(p), _) => p.parse()?,
        (None, Some(s)) => Predicate::Sentence(Box::new(Sentence::parse(s).map_err(ras_core::Error::from)?)),
        (None, None) => unreachable!("clap requires one of --predicate, --sentence"),
    };
    let opts = EstimateOptions {
        class: a.class,
        samples: a.samples,
        seed: a.seed,
        mode: mode(a.exact, a.sampled),
        allow_unvalidated: ctx.allow_unvalidated,
    };
    for &n in &a.n.0 {
        w.record(estimate(&predicate, n, &opts, &ctx.guards)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ExtensionRecord {
    pattern: String,
    m: usize,
    n: usize,
    samples: u64,
    seed: u64,
    value: f64,
    stderr: f64,
    bound: Option<f64>,
    bound_exact: Option<String>,
    /// `value ≤ bound + 5σ`.
    within_bound: Option<bool>,
    method: CountMethod,
}

fn extension<W: Write>(a: &ExtensionArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    for &m in &a.m.0 {
        let patterns: Vec<ExtensionAxiom> = if m <= 1 {
            ExtensionAxiom::all(m).collect()
        } else {
            let mut rng = stream(a.seed, u64::MAX - m as u64);
            (0..a.random).map(|_| ExtensionAxiom::random(m, &mut rng)).collect()
        };
        for &n in &a.n.0 {
            let bound = extension_failure_bound(n, m).ok();
            let rows = extension_failure_fractions(&patterns, n, a.samples, a.seed, &ctx.guards)?;
            for (p, r) in patterns.iter().zip(rows) {
                w.record(ExtensionRecord {
                    pattern: p.id(),
                    m,
                    n,
                    samples: r.samples,
                    seed: r.seed,
                    value: r.value,
                    stderr: r.stderr,
                    bound: bound.as_ref().map(|b| b.decimal),
                    bound_exact: bound.as_ref().map(|b| b.exact.clone()),
                    within_bound: bound.as_ref().map(|b| r.value <= b.decimal + 5.0 * r.stderr),
                    method: r.method,
                })?;
            }
        }
    }
    Ok(())
}

fn fo_eval<W: Write>(a: &FoEvalArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    let mut sentences = Vec::new();
    for s in &a.sentence {
        sentences.push(Sentence::parse(s).map_err(ras_core::Error::from)?);
    }
    if let Some(path) = &a.sentences {
        sentences.extend(parse_sentence_file(&read_input(path)?).map_err(ras_core::Error::from)?);
    }
    let models: Vec<AnyStructure> = match (&a.structures, a.n) {
        (Some(path), _) => structures_from_text(&read_input(path)?)?,
        (None, Some(n)) => match a.class {
            Class::Fsiase => enumerate_fsiase(n, &ctx.guards)?.map(AnyStructure::E).collect(),
            class => enumerate_fas(n, &ctx.guards)?
                .filter(|s| class == Class::Fas || (s.is_symmetric() && s.is_integral()))
                .map(AnyStructure::Atom)
                .collect(),
        },
        (None, None) => unreachable!("clap requires one of --structures, --n"),
    };
    for (i, s) in sentences.iter().enumerate() {
        let text = s.render();
        for (k, m) in models.iter().enumerate() {
            let value = evaluate(s, m.as_model(), &ctx.guards)?;
            w.record(json!({"sentence": i, "text": text, "structure": k, "value": value}))?;
        }
    }
    Ok(())
}

fn scan<W: Write>(a: &ScanArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    let s = Sentence::parse(&a.sentence).map_err(ras_core::Error::from)?;
    let m = mode(a.exact, a.sampled);
    let sizes = a.n.0.iter().copied();
    for row in zero_one_scan(&a.id, &s, sizes.clone(), a.samples, a.seed, m, &ctx.guards)? {
        w.record(row)?;
    }
    if a.negate {
        let id = format!("not:{}", a.id);
        for row in zero_one_scan(&id, &s.negate(), sizes, a.samples, a.seed, m, &ctx.guards)? {
            w.record(row)?;
        }
    }
    Ok(())
}

fn parse_problem(text: &str) -> Result<AmalgamationProblem, Failure> {
    let v: Value = serde_json::from_str(text).map_err(ras_core::Error::from)?;
    let part = |k: &str| -> Result<EStructure, Failure> {
        let x = v.get(k).cloned().ok_or_else(|| Failure::Check(format!("amalgamation input lacks `{k}`")))?;
        e_form(structure_from_value(x)?)
    };
    let map = |k: &str| -> Result<Embedding, Failure> {
        let x = v.get(k).cloned().ok_or_else(|| Failure::Check(format!("amalgamation input lacks `{k}`")))?;
        Ok(serde_json::from_value(x).map_err(ras_core::Error::from)?)
    };
    Ok(AmalgamationProblem {
        s: part("S")?,
        v: part("V")?,
        w: part("W")?,
        mu: map("mu")?,
        nu: map("nu")?,
    })
}

fn amalgamate<W: Write>(a: &AmalgamateArgs, w: Out<W>) -> Result<(), Failure> {
    let problems: Vec<AmalgamationProblem> = match (&a.input, a.random) {
        (Some(path), _) => vec![parse_problem(&read_input(path)?)?],
        (None, Some(k)) => {
            let mut rng = stream(a.seed, 0);
            (0..k)
                .map(|_| random_problem(a.max_size, &mut rng))
                .collect::<Result<_, _>>()?
        }
        (None, None) => unreachable!("clap requires one of --input, --random"),
    };
    let mut failed = 0;
    for (i, p) in problems.iter().enumerate() {
        let (am, check) = check_amalgam(p)?;
        failed += !check.passed() as usize;
        w.record(json!({
            "instance": i,
            "size": check.size,
            "in_class": check.in_class,
            "mu_embeds": check.mu_embeds,
            "nu_embeds": check.nu_embeds,
            "commutes": check.commutes,
            "U": e_to_value(&am.u),
            "mu": am.mu.map,
            "nu": am.nu.map,
        }))?;
    }
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} of {} amalgams failed their checks", problems.len())));
    }
    Ok(())
}

fn extend<W: Write>(a: &ExtendArgs, w: Out<W>) -> Result<(), Failure> {
    let first = structures_from_text(&read_input(&a.structure)?)?
        .into_iter()
        .next()
        .ok_or_else(|| Failure::Check(format!("{}: no structure", a.structure.display())))?;
    let base = e_form(first)?;
    let pattern: ExtensionAxiom = a.pattern.parse()?;
    let out = match &a.over {
        Some(xs) => extend_with_witness(&base, xs, &pattern)?,
        None => one_point_extension(&base, &pattern)?,
    };
    w.record(e_to_value(&out))?;
    Ok(())
}

fn generic<W: Write>(a: &GenericArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    let g = build_generic(a.rounds, a.m_max, &ctx.guards)?;
    let in_class = check_axioms(&convert_from_e_form(&g)?).in_fsias();
    w.record(json!({
        "rounds": a.rounds,
        "m_max": a.m_max,
        "n": g.n(),
        "in_class": in_class,
        "structure": e_to_value(&g),
    }))?;
    Ok(())
}

fn homog<W: Write>(a: &HomogArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    let models: Vec<EStructure> = match (&a.structures, &a.n) {
        (Some(path), _) => structures_from_text(&read_input(path)?)?
            .into_iter()
            .map(e_form)
            .collect::<Result<_, _>>()?,
        (None, Some(sizes)) => {
            let mut all = Vec::new();
            for &n in &sizes.0 {
                all.extend(enumerate_fsiase(n, &ctx.guards)?);
            }
            all
        }
        (None, None) => unreachable!("clap requires one of --structures, --n"),
    };
    for (i, m) in models.iter().enumerate() {
        let h = homogeneity_check(m, &ctx.guards)?;
        w.record(json!({"index": i, "n": m.n(), "ultra": h.ultra, "weak": h.weak}))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

#[derive(Serialize)]
struct Check {
    check: &'static str,
    n: usize,
    expected: String,
    got: String,
    ok: bool,
    method: CountMethod,
}

struct Checks<'a, W: Write> {
    w: Out<'a, W>,
    failed: usize,
}

impl<W: Write> Checks<'_, W> {
    fn record(&mut self, check: &'static str, n: usize, expected: impl ToString, got: impl ToString) -> io::Result<()> {
        let (expected, got) = (expected.to_string(), got.to_string());
        let ok = expected == got;
        self.failed += !ok as usize;
        self.w.record(Check {
            check,
            n,
            expected,
            got,
            ok,
            method: CountMethod::Oracle,
        })
    }
}

fn as_atom(m: &dyn Model) -> Result<AtomStructure, ras_core::Error> {
    let f: Vec<usize> = (0..m.size()).map(|a| m.converse(a)).collect();
    AtomStructure::new(m.size(), f, &m.identity_atoms(), m.triples().clone())
}

fn verify<W: Write>(a: &VerifyArgs, ctx: &Context, w: Out<W>) -> Result<(), Failure> {
    let g = &ctx.guards;
    let mut c = Checks { w, failed: 0 };
    let sizes = 1..=a.max_n;

    for n in sizes.clone() {
        for s in valid_fixed_point_counts(n) {
            let f = cycle_census(n, s)?;
            let (b, p) = brute_force_census(n, s, g)?;
            let expected = format!("{},{},{},{},{},{}", f.c1, f.c2, f.c3, f.c6, f.q, f.p);
            let got = format!("{},{},{},{},{},{}", b.c1, b.c2, b.c3, b.c6, b.total(), p);
            c.record("census", n, expected, got)?;
        }
    }

    for n in sizes.clone() {
        let qnn = diversity_cycle_count(n, n)?;
        c.record("q-equals-s", n, symmetric_cycle_count(n), &qnn)?;
        for s in valid_fixed_point_counts(n) {
            let p = (n - s) / 2;
            let lhs = num_bigint::BigInt::from(diversity_cycle_count(n, s)?) - num_bigint::BigInt::from(qnn.clone());
            let rhs = (1 - n as i64) * p as i64;
            c.record("q-difference", n, rhs, lhs)?;
        }
    }

    for n in sizes.clone() {
        let formula = labelled_count(n, Class::Fsiase, g, false)?.labelled;
        c.record("fsiase-count", n, formula, enumerate_fsiase(n, g)?.count())?;
        let formula = labelled_count(n, Class::Fsias, g, false)?.labelled;
        c.record("fsias-count", n, formula, labelled_count_enumerated(n, Class::Fsias, g)?.labelled)?;
    }

    for n in 1..=a.max_n.min(3) {
        let oracle: HashSet<AtomStructure> = if n <= 2 { tier0_fas(n)? } else { tier1_fas(n)? }.into_iter().collect();
        let fast: HashSet<AtomStructure> = enumerate_fas(n, g)?.collect();
        let agree = oracle == fast;
        c.record(
            if n <= 2 { "fas-tier0" } else { "fas-tier1" },
            n,
            format!("{} structures", oracle.len()),
            format!("{} structures{}", fast.len(), if agree { "" } else { " (sets differ)" }),
        )?;
    }

    for n in sizes.clone() {
        let enumerated = BigUint::from(enumerate_fas(n, g)?.count());
        c.record("fas-formula", n, fas_count_formula(n), enumerated)?;
    }

    for n in sizes.clone() {
        let (count, sum, order) = burnside_fsiase(n)?;
        let got = count_unlabelled(n, Class::Fsiase, &Predicate::All, g)?
            .unlabelled
            .expect("unlabelled count");
        c.record("unlabelled-burnside", n, format!("{count} ({sum}/{order})"), format!("{got} ({sum}/{order})"))?;
    }

    for n in sizes.clone() {
        let (mut total, mut good) = (0u64, 0u64);
        let mut visit = |m: &dyn Model| -> Result<(), ras_core::Error> {
            total += 1;
            let ca = complex_algebra(m)?;
            let na = verify_na_axioms(&ca, g)?;
            if na.is_na() && atom_structure_of(&ca)? == as_atom(m)? {
                good += 1;
            }
            Ok(())
        };
        ras_core::enumerate::for_each_member(n, Class::Fas, g, &mut visit)?;
        c.record("complex-algebra", n, total, good)?;
    }

    for n in sizes.clone() {
        let (mut total, mut agree) = (0u64, 0u64);
        for s in enumerate_fsiase(n, g)? {
            total += 1;
            agree += (is_associative(&s) == is_associative_elementwise(&complex_algebra(&s)?, g)?) as u64;
        }
        c.record("associativity", n, total, agree)?;
    }

    for n in sizes.clone() {
        let (mut total, mut agree) = (0u64, 0u64);
        for s in enumerate_fsiase(n, g)? {
            for m in 0..=2 {
                for p in ExtensionAxiom::all(m) {
                    total += 1;
                    agree += (evaluate(&p.sentence(), &s, g)? == p.holds_directly(&s)?) as u64;
                }
            }
        }
        c.record("extension-dual", n, total, agree)?;
    }

    for n in sizes {
        let (mut total, mut agree) = (0u64, 0u64);
        for s in enumerate_fsiase(n, g)? {
            let h = homogeneity_check(&s, g)?;
            total += 1;
            agree += (h.ultra == h.weak) as u64;
        }
        c.record("homogeneity", n, total, agree)?;
    }

    if c.failed > 0 {
        return Err(Failure::Check(format!("{} checks failed", c.failed)));
    }
    Ok(())
}
