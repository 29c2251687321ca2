use super::{Formula, Sentence, Signature, Term};
use crate::config::Guards;
use crate::error::{Error, Result};
use crate::structure::Model;

/// Longest chain of nested bound variables.
pub fn quantifier_depth(f: &Formula) -> usize {
    match f {
        Formula::Forall(vs, b) | Formula::Exists(vs, b) => vs.len() + quantifier_depth(b),
        Formula::Implies(a, b) | Formula::Or(a, b) | Formula::And(a, b) => {
            quantifier_depth(a).max(quantifier_depth(b))
        }
        Formula::Not(a) => quantifier_depth(a),
        _ => 0,
    }
}

/// Truth value of a closed sentence, by exhaustive expansion of every
/// quantifier. The work `n^depth` must satisfy
/// `depth·log2(n) ≤ guards.eval_work_log2`.
pub fn evaluate<M: Model + ?Sized>(s: &Sentence, m: &M, guards: &Guards) -> Result<bool> {
    check_signature(s, m)?;
    let n = m.size();
    let depth = quantifier_depth(&s.root);
    let work = depth as f64 * (n as f64).log2();
    if work > guards.eval_work_log2 as f64 {
        return Err(Error::GuardExceeded {
            what: "sentence evaluation (depth·log2 n)",
            n: work.ceil() as usize,
            limit: guards.eval_work_log2 as usize,
        });
    }
    let mut env = vec![0; s.vars.len()];
    evaluate_formula(&s.root, m, &mut env)
}

fn term<M: Model + ?Sized>(t: &Term, m: &M, env: &[usize]) -> Result<usize> {
    Ok(match t {
        Term::Var(v) => env[*v],
        Term::E => m
            .identity_constant()
            .ok_or_else(|| Error::Precondition("`e` needs a structure in the {f, e, T} signature".into()))?,
        Term::F(inner) => m.converse(term(inner, m, env)?),
    })
}

/// Evaluates `f` under the assignment `env` (indexed by variable id);
/// free variables take whatever `env` holds.
pub fn evaluate_formula<M: Model + ?Sized>(f: &Formula, m: &M, env: &mut [usize]) -> Result<bool> {
    Ok(match f {
        Formula::Forall(vs, body) => quantify(vs, body, m, env, true)?,
        Formula::Exists(vs, body) => quantify(vs, body, m, env, false)?,
        Formula::Implies(a, b) => !evaluate_formula(a, m, env)? || evaluate_formula(b, m, env)?,
        Formula::Or(a, b) => evaluate_formula(a, m, env)? || evaluate_formula(b, m, env)?,
        Formula::And(a, b) => evaluate_formula(a, m, env)? && evaluate_formula(b, m, env)?,
        Formula::Not(a) => !evaluate_formula(a, m, env)?,
        Formula::Rel(a, b, c) => m.holds(term(a, m, env)?, term(b, m, env)?, term(c, m, env)?),
        Formula::Ident(t) => m.is_identity(term(t, m, env)?),
        Formula::Eq(a, b) => term(a, m, env)? == term(b, m, env)?,
    })
}

fn quantify<M: Model + ?Sized>(
    vs: &[usize],
    body: &Formula,
    m: &M,
    env: &mut [usize],
    universal: bool,
) -> Result<bool> {
    let Some((&v, rest)) = vs.split_first() else {
        return evaluate_formula(body, m, env);
    };
    for a in 0..m.size() {
        env[v] = a;
        if quantify(rest, body, m, env, universal)? != universal {
            return Ok(!universal);
        }
    }
    Ok(universal)
}

/// Rejects sentences whose signature does not fit the structure.
pub(crate) fn check_signature<M: Model + ?Sized>(s: &Sentence, m: &M) -> Result<()> {
    if s.signature == Some(Signature::EForm) && m.identity_constant().is_none() {
        return Err(Error::Precondition(
            "sentence is in the {f, e, T} signature but the structure has no constant".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{fsiase_axioms, parse};
    use crate::structure::EStructure;
    use crate::triple::{Triple, TripleSet};

    fn two(with_cycle: bool) -> EStructure {
        let mut t = TripleSet::empty(2);
        for x in [(0, 0, 0), (1, 0, 1), (0, 1, 1), (1, 1, 0)] {
            t.insert(Triple::new(x.0, x.1, x.2));
        }
        if with_cycle {
            t.insert(Triple::new(1, 1, 1));
        }
        EStructure::new(2, 0, t).unwrap()
    }

    #[test]
    fn examples() {
        let g = Guards::default();
        let s = parse("forall x. T(x,e,x)").unwrap();
        assert!(evaluate(&s, &two(false), &g).unwrap());
        let s = parse("exists x. (!(x = e) & T(x,x,x))").unwrap();
        assert!(evaluate(&s, &two(true), &g).unwrap());
        assert!(!evaluate(&s, &two(false), &g).unwrap());
        let s = parse("forall x. forall y. x = y").unwrap();
        assert!(!evaluate(&s, &two(true), &g).unwrap());
        assert!(evaluate(&s, &EStructure::trivial(), &g).unwrap());
    }

    #[test]
    fn axioms_hold() {
        let g = Guards::default();
        for s in fsiase_axioms() {
            assert!(evaluate(&s, &two(true), &g).unwrap(), "{s}");
            assert!(evaluate(&s, &two(false), &g).unwrap(), "{s}");
        }
    }

    #[test]
    fn depth_guard() {
        let g = Guards {
            eval_work_log2: 2,
            ..Guards::default()
        };
        let s = parse("forall x y z. T(x,y,z) -> T(z,y,x)").unwrap();
        assert!(evaluate(&s, &two(true), &g).is_err());
        assert_eq!(quantifier_depth(&s.root), 3);
    }
}
