//! Seeded property suites.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::{Check, SuiteResult};
use crate::counting::{
    closed_form_anti_involutive, closed_form_symmetric, count_functions_anti_involutive,
    count_models, phi_anti_involutive, phi_symmetric,
};
use crate::eval::{eval_fo, eval_variant_singleton, CoverMode, EvalOptions, Evaluator, Verdict};
use crate::formula::{classify, is_existential_variant, parse, rank, Formula, Fragment};
use crate::model::{parse_model_set, Elem, Interpretation, ModelSet};
use crate::perspective::{
    filter_implies, minor_eval_modal, parse_perspective, persp_eval, persp_eval_signed, restrict,
    Perspective,
};
use crate::quantifier::{witness_check, MinorQuantifier};
use crate::random::{fo_signature, modal_signature, Gen};
use crate::symbol::{Symbol, Var};
use crate::systems::{
    parse_system, Evolution, FnSelector, Step, System, SystemFrameBase, TableSelector,
};
use crate::translate::{
    bounded_fo_sat, bounded_lc_sat, check_translation_claim, lc_witness_from_fo, translate,
    verify_witness, SatWitness, SearchOptions, DOMAIN_PREDICATE,
};
use crate::weights::{Aggregator, WeightedUniverse};

fn slow() -> Evaluator {
    Evaluator::new(EvalOptions {
        cover: CoverMode::ThreeWay,
        fast_path: false,
    })
}

fn fo_cases(
    gen: &mut Gen,
    n: usize,
    depth: usize,
    f: fn(&mut Gen, usize) -> Formula,
) -> Vec<(ModelSet, Formula)> {
    (0..n)
        .map(|_| (gen.fo_model_set(4, 3), f(gen, depth)))
        .collect()
}

pub fn round_trip(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let fo = fo_signature();
    let modal = modal_signature();
    for i in 0..1000 {
        let (f, sig) = match i % 3 {
            0 => (gen.fo_formula(4), &fo),
            1 => (gen.lcstar_formula(4), &fo),
            _ => (gen.modal_formula(4, 3), &modal),
        };
        let back = parse(&f.to_string(), sig);
        c.expect(back.as_ref() == Ok(&f), || {
            format!("`{f}` reparses as {back:?}")
        });
    }
    for _ in 0..100 {
        let m = gen.fo_model_set(4, 3);
        let back = parse_model_set(&m.to_string());
        c.expect(back.as_ref() == Ok(&m), || {
            format!("model set does not round-trip:\n{m}")
        });
        let r = gen.rng().gen_range(1..=3);
        let p = gen.perspective(r);
        let back = parse_perspective(&p.to_string());
        c.expect(back.as_ref() == Ok(&p), || {
            format!("perspective does not round-trip:\n{p}")
        });
    }
    Ok(())
}

pub fn classify_monotone(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    use Fragment::*;
    for i in 0..1000 {
        let (f, must) = match i % 3 {
            0 => (gen.fo_formula(4), vec![FO, LC, LCStar]),
            1 => (gen.lc_formula(4), vec![LC, LCStar]),
            _ => (gen.lcstar_formula(4), vec![LCStar]),
        };
        let got = classify(&f);
        let ok = must.iter().all(|m| got.contains(m))
            && (!got.contains(&FO) || got.contains(&LC))
            && (!got.contains(&LC) || got.contains(&LCStar));
        c.expect(ok, || format!("`{f}` classified as {got:?}"));
    }
    Ok(())
}

/// Largest number of modal operators on a root-to-leaf path, by explicit
/// traversal.
fn modal_depth(f: &Formula) -> usize {
    let mut best = 0;
    let mut stack = vec![(f, 0usize)];
    while let Some((g, d)) = stack.pop() {
        let d = d + matches!(g, Formula::Diamond(_) | Formula::MinorModal(..)) as usize;
        best = best.max(d);
        stack.extend(g.children().into_iter().map(|h| (h, d)));
    }
    best
}

pub fn rank_depth(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    for _ in 0..1000 {
        let mut f = gen.modal_formula(5, 4);
        if gen.rng().gen_bool(0.3) {
            f = Formula::minor_modal("exists", f);
        }
        if gen.rng().gen_bool(0.3) {
            f = Formula::exists("y", f);
        }
        c.eq(&format!("rank of `{f}`"), rank(&f), modal_depth(&f));
    }
    Ok(())
}

pub fn variant_equivalence(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    for _ in 0..300 {
        let f = gen.lcstar_formula(4);
        let (a, b) = (gen.variant(&f), gen.variant(&f));
        c.expect(is_existential_variant(&f, &f), || {
            format!("`{f}` is not a variant of itself")
        });
        c.expect(
            is_existential_variant(&a, &f) && is_existential_variant(&f, &a),
            || format!("`{a}` and `{f}` are not mutual variants"),
        );
        c.expect(is_existential_variant(&a, &b), || {
            format!("variants `{a}`, `{b}` of one formula are unrelated")
        });
        let g = gen.lcstar_formula(4);
        let (fg, gf) = (
            is_existential_variant(&f, &g),
            is_existential_variant(&g, &f),
        );
        c.expect(fg == gf, || format!("asymmetric on `{f}`, `{g}`"));
    }
    Ok(())
}

fn structures(m: &ModelSet) -> BTreeSet<crate::model::Structure> {
    m.members().iter().map(|i| i.structure().clone()).collect()
}

pub fn model_invariants(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let sig = fo_signature();
    let x = Symbol::new("x");
    let z = Symbol::new("z");
    for _ in 0..500 {
        // one shared domain
        let domain = gen.domain(3);
        let vars: BTreeSet<Var> = [x.clone()].into();
        let n = gen.rng().gen_range(1..=4);
        let elems: Vec<Elem> = domain.iter().copied().collect();
        let members: Vec<Interpretation> = (0..n)
            .map(|_| {
                let s = gen.structure(&domain, &sig);
                let a = *elems.choose(gen.rng()).expect("non-empty");
                Interpretation::new(s, [(x.clone(), a)].into()).expect("in the domain")
            })
            .collect();
        let m = ModelSet::with_parts(members, vars, sig.clone())?;
        c.eq(
            "extend_all = extend_set on a shared domain",
            m.extend_all(&z),
            m.extend_set(&domain, &z)?,
        );

        let m = gen.fo_model_set(4, 3);
        let count = m.choice_functions(false).count() as u128;
        let product: u128 = m
            .members()
            .iter()
            .map(|i| i.structure().domain().len() as u128)
            .product();
        c.eq("choice functions = product of domain sizes", count, product);
        c.eq("choice_function_count", m.choice_function_count(), product);
        let pick = gen.rng().gen_range(0..count as usize);
        let cf = m.choice_functions(false).nth(pick).expect("in range");
        for v in [&x, &z] {
            let ext = m.extend_choice(&cf, v)?;
            c.eq(
                "extend_choice keeps structures",
                structures(&ext),
                structures(&m),
            );
        }

        let other = gen.fo_model_set(4, 3);
        let union = m.union(&other)?;
        let meet: BTreeSet<Elem> = m
            .common_domain()
            .intersection(&other.common_domain())
            .copied()
            .collect();
        c.eq("common domain of a union", union.common_domain(), meet);
    }
    Ok(())
}

pub fn flatness(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let cases = fo_cases(gen, 1000, 3, Gen::fo_formula);
    c.par_cases(&cases, |(m, f)| {
        let ev = slow();
        let v = ev.eval(m, f)?;
        let truths = m
            .members()
            .iter()
            .map(|i| eval_fo(i, f))
            .collect::<Result<Vec<_>, _>>()?;
        let want = Verdict {
            positive: truths.iter().all(|&t| t),
            negative: truths.iter().all(|&t| !t),
        };
        Ok((v != want).then(|| format!("`{f}`: {v}, members give {want}\n{m}")))
    });
    Ok(())
}

/// Two interpretations with disjoint one-element domains.
pub fn disjoint_pair() -> ModelSet {
    parse_model_set("sig\nmodel { domain 0 }\nmodel { domain 1 }").expect("fixture")
}

pub fn disjunction(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let m = disjoint_pair();
    let cx = parse("C x. x=x", &Default::default())?;
    let expanded = Formula::not(Formula::and(
        Formula::not(cx.clone()),
        Formula::not(cx.clone()),
    ));
    let ev = Evaluator::default();
    c.eq("M ⊨+ C x. x=x", ev.eval_pos(&m, &cx)?, false);
    c.eq(
        "M ⊨+ ~(~C x. x=x & ~C x. x=x)",
        ev.eval_pos(&m, &expanded)?,
        true,
    );
    c.eq(
        "M ⊨+ (C x. x=x | C x. x=x)",
        ev.eval_pos(&m, &Formula::or(cx.clone(), cx))?,
        true,
    );
    Ok(())
}

pub fn variants(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let vars = ["x", "y"].iter().map(|v| Symbol::new(v)).collect();
    let cases: Vec<(Interpretation, Formula, Formula)> = (0..500)
        .map(|_| {
            let i = gen.interpretation(&fo_signature(), &vars, 3);
            let f = gen.fo_formula(3);
            let v = gen.variant(&f);
            (i, f, v)
        })
        .collect();
    let results: Vec<Result<Option<String>, String>> =
        cases
            .par_iter()
            .map(|(i, f, v)| {
                if !is_existential_variant(f, v) {
                    return Ok(Some(format!("`{v}` is not a variant of `{f}`")));
                }
                let truth = eval_fo(i, f).map_err(|e| e.to_string())?;
                let got = eval_variant_singleton(i, v).map_err(|e| e.to_string())?;
                let want = Verdict {
                    positive: truth,
                    negative: !truth,
                };
                Ok((got != want)
                    .then(|| format!("`{v}` (variant of `{f}`): {got}, classical {truth}")))
            })
            .collect();
    let mut lc_failures = 0;
    for ((_, _, v), r) in cases.iter().zip(results) {
        let ok = matches!(r, Ok(None));
        if !ok && classify(v).contains(&Fragment::LC) {
            lc_failures += 1;
        }
        c.expect(ok, || match r {
            Ok(Some(msg)) => msg,
            Err(e) => format!("error: {e}"),
            Ok(None) => unreachable!(),
        });
    }
    let in_lc = cases
        .iter()
        .filter(|(_, _, v)| classify(v).contains(&Fragment::LC))
        .count();
    c.note(format!("{lc_failures} of {in_lc} variants in LC disagree"));
    Ok(())
}

pub fn negation(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let cases = fo_cases(gen, 300, 3, Gen::lcstar_formula);
    c.par_cases(&cases, |(m, f)| {
        let ev = Evaluator::default();
        let nn = Formula::not(Formula::not(f.clone()));
        let (a, b) = (ev.eval(m, f)?, ev.eval(m, &nn)?);
        Ok((a != b).then(|| format!("`{f}`: {a} but double negation gives {b}")))
    });
    Ok(())
}

pub fn cover(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let cases = fo_cases(gen, 500, 3, Gen::lcstar_formula);
    c.par_cases(&cases, |(m, f)| {
        let three = slow().eval_neg(m, f)?;
        let partition = Evaluator::new(EvalOptions {
            cover: CoverMode::Partition,
            fast_path: false,
        })
        .eval_neg(m, f)?;
        Ok((three != partition)
            .then(|| format!("`{f}`: three-way {three}, partition {partition}\n{m}")))
    });
    Ok(())
}

pub fn fast_path(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let cases = fo_cases(gen, 500, 3, Gen::lcstar_formula);
    c.par_cases(&cases, |(m, f)| {
        let (fast, plain) = (Evaluator::default().eval(m, f)?, slow().eval(m, f)?);
        Ok((fast != plain).then(|| format!("`{f}`: fast path {fast}, plain {plain}")))
    });
    Ok(())
}

pub fn choice_count(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let never = parse("E x. ~x=x", &fo_signature())?;
    for _ in 0..200 {
        let m = gen.fo_model_set(4, 3);
        let product = m.choice_function_count() as u64;
        let ev = slow();
        ev.eval_pos(&m, &never)?;
        c.eq(
            "choice functions examined for a failing E x.",
            ev.examined(),
            product,
        );
        // quantifier-free bodies: at most one pass over the functions, all
        // of it when the verdict is false
        let body = gen.fo_formula(2);
        if body.children().is_empty() || !has_quantifier(&body) {
            let f = Formula::exists("x", body);
            let ev = slow();
            let holds = ev.eval_pos(&m, &f)?;
            let n = ev.examined();
            c.expect(if holds { n <= product } else { n == product }, || {
                format!("`{f}` examined {n} of {product} choice functions, verdict {holds}")
            });
        }
    }
    Ok(())
}

fn has_quantifier(f: &Formula) -> bool {
    let mut q = false;
    f.visit(&mut |g| q |= matches!(g, Formula::Exists(..) | Formula::Const(..)));
    q
}

pub fn consistency(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let cases = fo_cases(gen, 500, 3, Gen::lcstar_formula);
    let mut found = Vec::new();
    for (m, f) in &cases {
        let v = Evaluator::default().eval(m, f)?;
        c.expect(true, String::new);
        if v.positive && v.negative {
            found.push(f.to_string());
        }
    }
    c.note(format!(
        "{} of {} non-empty instances satisfy both turnstiles",
        found.len(),
        cases.len()
    ));
    if let Some(f) = found.first() {
        c.note(format!("first such formula: `{f}`"));
    }
    Ok(())
}

/// `t` is `f` with every `C x. a` replaced by `E x. (D(x) & a')`.
fn translated(f: &Formula, t: &Formula, d: &Symbol) -> bool {
    use Formula::*;
    match (f, t) {
        (Const(x, a), Exists(y, body)) => {
            x == y
                && matches!(&**body, And(guard, b)
                    if **guard == Rel(d.clone(), vec![x.clone()]) && translated(a, b, d))
        }
        (Exists(x, a), Exists(y, b)) => x == y && translated(a, b, d),
        (Not(a), Not(b)) => translated(a, b, d),
        (And(a1, a2), And(b1, b2)) | (Or(a1, a2), Or(b1, b2)) | (Impl(a1, a2), Impl(b1, b2)) => {
            translated(a1, b1, d) && translated(a2, b2, d)
        }
        (Rel(..) | Eq(..), _) => f == t,
        _ => false,
    }
}

pub fn homomorphism(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let d = Symbol::new(DOMAIN_PREDICATE);
    for _ in 0..1000 {
        let f = gen.lcstar_formula(4);
        let t = translate(&f, DOMAIN_PREDICATE)?;
        c.expect(translated(&f, &t, &d), || format!("T(`{f}`) = `{t}`"));
        c.expect(classify(&t).contains(&Fragment::FO), || {
            format!("T(`{f}`) is not first-order")
        });
    }
    Ok(())
}

pub fn translation_claim(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let cases = fo_cases(gen, 500, 3, Gen::lc_formula);
    c.par_cases(&cases, |(m, f)| {
        Ok((!check_translation_claim(f, m)?).then(|| format!("claim fails for `{f}` on\n{m}")))
    });
    let positive = cases
        .iter()
        .filter(|(m, f)| Evaluator::default().eval_pos(m, f).unwrap_or(false))
        .count();
    c.note(format!(
        "{positive} of {} instances have M ⊨+ φ",
        cases.len()
    ));
    Ok(())
}

/// Thirty distinct LC sentences.
pub fn lc_corpus(gen: &mut Gen) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    while out.len() < 30 {
        let f = gen.lc_sentence(3);
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

pub fn reduction(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let corpus = lc_corpus(gen);
    let opts = SearchOptions::default();
    let mut sat = 0;
    for f in &corpus {
        let t = translate(f, DOMAIN_PREDICATE)?;
        let fo = bounded_fo_sat(&t, 3, opts)?;
        if let Some(SatWitness::Interpretation(i)) = &fo.witness {
            sat += 1;
            c.expect(
                verify_witness(&t, fo.witness.as_ref().expect("present"))?,
                || format!("FO witness for T(`{f}`) does not verify"),
            );
            let built = lc_witness_from_fo(i, DOMAIN_PREDICATE)?;
            c.expect(verify_witness(f, &SatWitness::ModelSet(built))?, || {
                format!("model set read off the FO witness does not satisfy `{f}`")
            });
            let lc = bounded_lc_sat(f, 1, 3, opts)?;
            let verified = match &lc.witness {
                Some(w) => verify_witness(f, w)?,
                None => false,
            };
            c.expect(lc.is_sat() && verified, || {
                format!("T(`{f}`) is satisfiable but `{f}` is not found")
            });
        } else {
            c.expect(true, String::new);
        }
    }
    c.note(format!(
        "{sat} of {} sentences satisfiable within the bound",
        corpus.len()
    ));
    Ok(())
}

pub fn counting(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let sym = phi_symmetric();
    let ai = phi_anti_involutive();
    for n in 1..=4 {
        c.eq(
            &format!("symmetric relations, n={n}"),
            count_models(&sym, n)?,
            closed_form_symmetric(n),
        );
    }
    for n in 1..=7 {
        c.eq(
            &format!("anti-involutive functions, n={n}"),
            count_functions_anti_involutive(n)?,
            closed_form_anti_involutive(n),
        );
    }
    for n in 1..=4 {
        c.eq(
            &format!("anti-involutive models, n={n}"),
            count_models(&ai, n)?,
            count_functions_anti_involutive(n)?,
        );
    }
    Ok(())
}

pub fn minor_exists(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let cases: Vec<(Perspective, Formula)> = (0..200)
        .map(|_| {
            let f = gen.modal_formula(3, 2);
            let p = gen.perspective(rank(&f) + 1);
            (p, f)
        })
        .collect();
    let q = MinorQuantifier::exists();
    c.par_cases(&cases, |(p, f)| {
        let minor = minor_eval_modal(p, &q, f)?;
        let diamond = persp_eval_signed(p, &Formula::diamond(f.clone()))?;
        Ok((minor != diamond).then(|| format!("`{f}`: minor {minor}, diamond {diamond}\n{p}")))
    });
    Ok(())
}

pub fn witness(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let exists = MinorQuantifier::exists();
    let forall = MinorQuantifier::forall();
    let corrupt = MinorQuantifier {
        name: "always",
        accept_pos: |_, _, _| true,
        ..exists
    };
    for n in 1..=4 {
        c.eq(
            &format!("exists witnesses |S| ≥ 1 up to {n}"),
            witness_check(&exists, exists.base, n),
            true,
        );
        c.eq(
            &format!("forall witnesses |S| = |A| up to {n}"),
            witness_check(&forall, forall.base, n),
            true,
        );
        c.eq(
            &format!("always-accept witnesses |S| ≥ 1 up to {n}"),
            witness_check(&corrupt, exists.base, n),
            false,
        );
    }
    let majority = MinorQuantifier::majority();
    c.note(format!(
        "majority witnesses its base up to 4: {}",
        witness_check(&majority, majority.base, 4)
    ));
    Ok(())
}

/// Two pointed models of one structure over `{0,1,2,3}`, `even = {0,2}`,
/// `odd = {1,3}`, at points 2 and 3.
pub fn even_odd_perspective() -> Perspective {
    parse_perspective(
        "sig even/1 odd/1\n\
         persp {\n\
           model { domain 0 1 2 3; even = (0) (2); odd = (1) (3); assign x=2 }\n\
           model { domain 0 1 2 3; even = (0) (2); odd = (1) (3); assign x=3 }\n\
         }",
    )
    .expect("fixture")
}

pub fn even_odd(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let p = even_odd_perspective();
    let sig = p.signature().cloned().unwrap_or_default();
    let both = parse("(<>odd & <>even)", &sig)?;
    let not_both = Formula::not(both.clone());
    c.eq("P ⊨ <>odd & <>even", persp_eval(&p, &both)?, true);
    c.eq(
        "P ⊨ even | odd",
        persp_eval(&p, &parse("(even | odd)", &sig)?)?,
        true,
    );
    c.eq(
        "P ⊨ even ⇒ ~(<>odd & <>even)",
        filter_implies(&p, &parse("even", &sig)?, &not_both)?,
        true,
    );
    c.eq(
        "P ⊨ odd ⇒ ~(<>odd & <>even)",
        filter_implies(&p, &parse("odd", &sig)?, &not_both)?,
        true,
    );
    Ok(())
}

fn persp_cases(gen: &mut Gen, n: usize, basic: bool) -> Vec<(Perspective, Formula)> {
    (0..n)
        .map(|_| {
            let r = gen.rng().gen_range(1..=3);
            let f = if basic {
                gen.modal_formula_basic(4, r)
            } else {
                gen.modal_formula(3, r)
            };
            (gen.perspective(r), f)
        })
        .collect()
}

pub fn persp_exclusivity(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let cases = persp_cases(gen, 200, false);
    let mut found = Vec::new();
    for (p, f) in &cases {
        let v = persp_eval_signed(p, f)?;
        c.expect(true, String::new);
        if v.positive && v.negative {
            found.push(f.to_string());
        }
    }
    c.note(format!(
        "{} of {} instances satisfy both turnstiles",
        found.len(),
        cases.len()
    ));
    if let Some(f) = found.first() {
        c.note(format!("first such formula: `{f}`"));
    }
    Ok(())
}

pub fn persp_agreement(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let cases = persp_cases(gen, 200, true);
    let mut by_rank: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (p, f) in &cases {
        let first = persp_eval(p, f)?;
        let signed = persp_eval_signed(p, f)?;
        let e = by_rank.entry(p.rank()).or_default();
        e.0 += 1;
        e.1 += (first != signed.positive) as usize;
        c.expect(first == signed.positive, || {
            format!(
                "`{f}` on a rank-{} perspective: first take {first}, signed {signed}",
                p.rank()
            )
        });
    }
    for (r, (n, bad)) in by_rank {
        c.note(format!("rank {r}: {bad} of {n} disagree"));
    }
    Ok(())
}

pub fn restrict_idempotence(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    for _ in 0..200 {
        let r = gen.rng().gen_range(1..=3);
        let p = gen.perspective(r);
        let chi = gen.modal_formula(3, r - 1);
        let complement = gen.rng().gen_bool(0.5);
        let once = restrict(&p, &chi, complement)?;
        let twice = restrict(&once, &chi, complement)?;
        c.expect(once == twice, || {
            format!("restricting twice by `{chi}` (complement {complement}) changes\n{once}")
        });
    }
    Ok(())
}

pub fn rank1_flatness(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    for _ in 0..200 {
        let p = gen.perspective(1);
        let f = gen.modal_formula(3, 0);
        let truths = p
            .leaves()
            .iter()
            .map(|i| eval_fo(i, &f))
            .collect::<Result<Vec<_>, _>>()?;
        let all = truths.iter().all(|&t| t);
        let none = truths.iter().all(|&t| !t);
        c.eq(&format!("first take of `{f}`"), persp_eval(&p, &f)?, all);
        c.eq(
            &format!("signed take of `{f}`"),
            persp_eval_signed(&p, &f)?,
            Verdict {
                positive: all,
                negative: none,
            },
        );
    }
    Ok(())
}

pub fn weights(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    for _ in 0..200 {
        let m = gen.fo_model_set(4, 2);
        let mut wu = WeightedUniverse::new(m.clone(), Aggregator::Sum);
        let k = gen.rng().gen_range(0..=5);
        let mut names = Vec::new();
        for j in 0..k {
            let ids = (0..m.len()).filter(|_| gen.rng().gen_bool(0.5)).collect();
            let w = BigRational::new(
                gen.rng().gen_range(-5..=5).into(),
                gen.rng().gen_range(1..=3).into(),
            );
            let name = format!("P{j}");
            // re-weighting an existing property is a conflict; skip those
            if wu.add(&name, ids, w).is_ok() {
                names.push(name);
            }
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut shuffled = refs.clone();
        shuffled.shuffle(gen.rng());
        c.eq(
            "sum is order-invariant",
            wu.value_of(&shuffled)?,
            wu.value_of(&refs)?,
        );
        c.eq(
            "full value = value of all properties",
            wu.full_value(),
            wu.value_of(&refs)?,
        );
    }
    Ok(())
}

const TOGGLE: &str = "agents a; actions go;\n\
    state s0 = model { domain 0 }; state s1 = model { domain 0 1 };\n\
    F(s0, go) = {s1}; F(s1, go) = {s0};\n\
    strategy a: s0 -> go, s1 -> go;\n\
    G default;\n";

/// The two-state toggle system.
pub fn toggle() -> System {
    parse_system(TOGGLE).expect("fixture")
}

/// The toggle base with a selector that stays put, which `F` forbids.
pub fn broken_toggle() -> System {
    let base = toggle().base;
    System::new(
        base,
        Box::new(FnSelector(|_: &SystemFrameBase, h: &[Step]| {
            h.last().map(|s| s.0)
        })),
        vec![vec![0, 0]],
    )
    .expect("fixture")
}

fn random_base(gen: &mut Gen) -> SystemFrameBase {
    let sig = crate::formula::Signature::new();
    let n_states = gen.rng().gen_range(1..=3);
    let n_agents = gen.rng().gen_range(1..=2);
    let n_actions = gen.rng().gen_range(1..=2);
    let states = (0..n_states)
        .map(|i| {
            let s = crate::model::Structure::new(0..=i as Elem, &sig).expect("non-empty");
            (Symbol::new(&format!("s{i}")), s)
        })
        .collect();
    let agents = (0..n_agents)
        .map(|i| Symbol::new(&format!("a{i}")))
        .collect();
    let actions = (0..n_actions)
        .map(|i| Symbol::new(&format!("L{i}")))
        .collect();
    let mut tuples = vec![vec![]];
    for _ in 0..n_agents {
        tuples = tuples
            .into_iter()
            .flat_map(|t: Vec<usize>| (0..n_actions).map(move |a| [t.clone(), vec![a]].concat()))
            .collect();
    }
    let mut transitions = BTreeMap::new();
    for s in 0..n_states {
        for t in &tuples {
            let mut succ: BTreeSet<usize> =
                (0..n_states).filter(|_| gen.rng().gen_bool(0.5)).collect();
            if succ.is_empty() {
                succ.insert(gen.rng().gen_range(0..n_states));
            }
            transitions.insert((s, t.clone()), succ);
        }
    }
    SystemFrameBase::new(agents, actions, states, transitions).expect("total by construction")
}

/// Independent re-check of the membership condition.
fn consistent(e: &Evolution, base: &SystemFrameBase) -> bool {
    let states = e.states();
    e.steps
        .iter()
        .zip(states.iter().skip(1))
        .all(|((s, a), next)| base.successors(*s, a).contains(next))
}

pub fn systems(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let sys = toggle();
    let trace = sys.run(0, 10)?;
    let want: Vec<usize> = (0..=10).map(|i| i % 2).collect();
    c.eq("toggle trace", trace.states(), want);
    c.expect(consistent(&trace, &sys.base), || {
        "toggle trace violates F".into()
    });
    let broken = broken_toggle().run(0, 10);
    c.expect(
        matches!(
            broken,
            Err(crate::systems::SystemError::SelectorViolation { step: 0, .. })
        ),
        || format!("broken selector not caught at step 0: {broken:?}"),
    );

    for _ in 0..50 {
        let base = random_base(gen);
        let k = gen.rng().gen_range(0..=2);
        let evs = base.proper_evolutions(k);
        for e in &evs {
            c.expect(consistent(e, &base) && e.is_valid(&base), || {
                format!("invalid evolution {}", e.display(&base))
            });
        }
        // every evolution of length ≤ k+1 extends to, or is, one at k+1
        let longer: BTreeSet<Vec<Step>> = base
            .proper_evolutions(k + 1)
            .into_iter()
            .map(|e| e.steps)
            .collect();
        let prefixes: BTreeSet<Vec<Step>> = longer
            .iter()
            .flat_map(|s| (1..=s.len().min(k + 1)).map(|j| s[..j].to_vec()))
            .collect();
        let here: BTreeSet<Vec<Step>> = evs.into_iter().map(|e| e.steps).collect();
        c.eq("truncation closure", here, prefixes);

        let strategies: Vec<Vec<usize>> = (0..base.agents().len())
            .map(|_| {
                (0..base.state_count())
                    .map(|_| gen.rng().gen_range(0..base.actions().len()))
                    .collect()
            })
            .collect();
        let start = gen.rng().gen_range(0..base.state_count());
        let sel = || {
            Box::new(TableSelector {
                table: BTreeMap::new(),
                fallback: true,
            })
        };
        let a = System::new(base.clone(), sel(), strategies.clone())?.run(start, 6)?;
        let b = System::new(base.clone(), sel(), strategies)?.run(start, 6)?;
        c.expect(a == b, || "run_system is not deterministic".into());
        c.expect(consistent(&a, &base), || {
            format!("run violates F: {}", a.display(&base))
        });
    }
    Ok(())
}
