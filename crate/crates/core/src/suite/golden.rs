//! Golden examples, one check per documented input/output pair.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use super::{Check, SuiteResult};
use crate::counting::{
    closed_form_anti_involutive, closed_form_symmetric, count_functions_anti_involutive,
    count_models, model_set_of, phi_anti_involutive, phi_symmetric, report, ClosedForm,
};
use crate::eval::{eval_fo, eval_neg, eval_pos, eval_variant_singleton, EvalError, Verdict};
use crate::formula::{
    classify, is_existential_variant, is_two_variable, parse, parse_infer, rank, Formula,
    FormulaError, Fragment, Signature,
};
use crate::model::{
    parse_model_set, ChoiceFunction, Elem, Interpretation, ModelError, ModelSet, Structure,
};
use crate::perspective::{
    filter_implies, minor_eval_modal, minor_eval_quant, parse_perspective, persp_eval,
    persp_eval_signed, restrict, Perspective,
};
use crate::quantifier::{witness_check, MinorQuantifier};
use crate::random::Gen;
use crate::suite::properties::{disjoint_pair, even_odd_perspective, toggle};
use crate::symbol::Symbol;
use crate::systems::{FnSelector, Step, System, SystemError, SystemFrameBase, TableSelector};
use crate::translate::{
    bounded_fo_sat, bounded_lc_sat, check_translation_claim, translate as tr, verify_witness,
    SatError, SatStatus, SatWitness, SearchOptions,
};
use crate::weights::{Aggregator, WeightError, WeightedUniverse};

fn f(text: &str) -> Formula {
    parse_infer(text).expect("golden formula").0
}

fn fragments(list: &[Fragment]) -> BTreeSet<Fragment> {
    list.iter().copied().collect()
}

pub fn formula(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let r2 = Signature::new().with("R", 2);
    c.eq(
        "parse E x. R(x,x)",
        parse("E x. R(x,x)", &r2)?,
        Formula::exists("x", Formula::rel("R", &["x", "x"])),
    );
    c.eq(
        "parse C x. x=x",
        parse("C x. x=x", &r2)?,
        Formula::constant("x", Formula::eq("x", "x")),
    );
    let bad = parse("R(x)", &r2);
    c.expect(
        matches!(
            bad,
            Err(FormulaError::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ),
        || format!("R(x) with R/2 gave {bad:?}"),
    );

    use Fragment::*;
    c.eq(
        "classify E x. R(x)",
        classify(&f("E x. R(x)")),
        fragments(&[FO, LC, LCStar]),
    );
    c.eq(
        "classify ~C x. x=x",
        classify(&f("~C x. x=x")),
        fragments(&[LCStar]),
    );
    c.eq(
        "classify C x. ~x=x",
        classify(&f("C x. ~x=x")),
        fragments(&[LC, LCStar]),
    );

    c.eq("rank p", rank(&f("p")), 0);
    c.eq("rank <>(p & <>q)", rank(&f("<>(p & <>q)")), 2);
    c.eq("rank E x. <>R(x)", rank(&f("E x. <>R(x)")), 1);

    c.eq(
        "two-variable A x. A y. ~(R(x,y) & R(y,x))",
        is_two_variable(&f("A x. A y. ~(R(x,y) & R(y,x))")),
        true,
    );
    c.eq(
        "two-variable E z. R(z,z)",
        is_two_variable(&f("E z. R(z,z)")),
        false,
    );
    c.eq("two-variable x=y", is_two_variable(&f("x=y")), true);

    let ep = f("E x. P(x)");
    c.eq(
        "variant (E x. P(x), C x. P(x))",
        is_existential_variant(&ep, &f("C x. P(x)")),
        true,
    );
    c.eq("variant (φ, φ)", is_existential_variant(&ep, &ep), true);
    c.eq(
        "variant (E x. P(x), E x. Q(x))",
        is_existential_variant(&ep, &f("E x. Q(x)")),
        false,
    );
    Ok(())
}

fn ms(text: &str) -> ModelSet {
    parse_model_set(text).expect("golden model set")
}

fn elems(list: &[Elem]) -> BTreeSet<Elem> {
    list.iter().copied().collect()
}

fn xs(m: &ModelSet) -> Vec<Option<Elem>> {
    m.members()
        .iter()
        .map(|i| i.get(&Symbol::new("x")))
        .collect()
}

pub fn model(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let overlap = ms("sig\nmodel { domain 1 2 }\nmodel { domain 2 3 }");
    let single = ms("sig\nmodel { domain 0 1 }");
    let empty = ms("sig\n");
    let x = Symbol::new("x");
    c.eq(
        "common domain of {1,2}, {2,3}",
        overlap.common_domain(),
        elems(&[2]),
    );
    c.eq(
        "common domain of a singleton",
        single.common_domain(),
        elems(&[0, 1]),
    );
    c.eq("common domain of ∅", empty.common_domain(), elems(&[]));

    let one = ms("sig\nmodel { domain 0 1 }");
    let ext = one.extend_choice(
        &ChoiceFunction {
            values: vec![1],
            constant: false,
        },
        &x,
    )?;
    c.eq("extend_choice on one member", xs(&ext), vec![Some(1)]);
    let ext = overlap.extend_choice(
        &ChoiceFunction {
            values: vec![2, 2],
            constant: true,
        },
        &x,
    )?;
    c.eq(
        "constant choice on two members",
        xs(&ext),
        vec![Some(2), Some(2)],
    );
    let bound = ms("sig\nmodel { domain 0 1; assign x=0 }");
    let ext = bound.extend_choice(
        &ChoiceFunction {
            values: vec![1],
            constant: false,
        },
        &x,
    )?;
    c.eq("extend_choice rebinds x", xs(&ext), vec![Some(1)]);
    let bad = overlap.extend_choice(
        &ChoiceFunction {
            values: vec![1],
            constant: false,
        },
        &x,
    );
    c.expect(bad.is_err(), || {
        "a choice function missing a member was accepted".into()
    });

    c.eq("extend_all on domain {0,1}", one.extend_all(&x).len(), 2);
    c.eq("extend_all on ∅", empty.extend_all(&x).len(), 0);
    let two_three = ms("sig\nmodel { domain 0 1 }\nmodel { domain 0 1 2 }");
    c.eq(
        "extend_all on domains of sizes 2 and 3",
        two_three.extend_all(&x).len(),
        5,
    );

    c.eq(
        "extend_set with A = ∅",
        overlap.extend_set(&BTreeSet::new(), &x)?.len(),
        0,
    );
    let shared = ms("sig\nmodel { domain 0 1 }\nmodel { domain 0 1; assign }");
    c.eq(
        "extend_set with A = common domain",
        shared.extend_set(&shared.common_domain(), &x)?,
        shared.extend_all(&x),
    );
    c.eq(
        "extend_set with A = {2}",
        xs(&overlap.extend_set(&elems(&[2]), &x)?),
        vec![Some(2), Some(2)],
    );
    c.expect(
        matches!(
            overlap.extend_set(&elems(&[1]), &x),
            Err(ModelError::NotInCommonDomain(1))
        ),
        || "extend_set outside the common domain was accepted".into(),
    );

    let d = Symbol::new("D");
    let d_of = |m: &ModelSet| -> Vec<BTreeSet<Vec<Elem>>> {
        m.members()
            .iter()
            .map(|i| {
                i.structure()
                    .relation(&d)
                    .map(|r| r.tuples.clone())
                    .unwrap_or_default()
            })
            .collect()
    };
    let with_d = overlap.add_domain_predicate("D")?;
    c.eq(
        "D on {1,2}, {2,3}",
        d_of(&with_d),
        vec![[vec![2]].into(), [vec![2]].into()],
    );
    c.eq(
        "D on a singleton",
        d_of(&single.add_domain_predicate("D")?),
        vec![[vec![0], vec![1]].into()],
    );
    let disjoint = disjoint_pair();
    c.eq(
        "D with an empty common domain",
        d_of(&disjoint.add_domain_predicate("D")?),
        vec![BTreeSet::new(); 2],
    );
    c.expect(with_d.add_domain_predicate("D").is_err(), || {
        "a second D was accepted".into()
    });

    c.eq(
        "choice functions for sizes 2 and 3",
        two_three.choice_functions(false).count(),
        6,
    );
    let common_one = ms("sig\nmodel { domain 0 1 }\nmodel { domain 1 2 }");
    c.eq(
        "constant choice functions for common domain {1}",
        common_one.choice_functions(true).count(),
        1,
    );
    let empties: Vec<ChoiceFunction> = empty.choice_functions(true).collect();
    c.eq(
        "constant choice functions on ∅",
        empties,
        vec![ChoiceFunction {
            values: vec![],
            constant: true,
        }],
    );
    c.eq(
        "choice functions on ∅",
        empty.choice_functions(false).count(),
        1,
    );
    Ok(())
}

pub fn evaluator(gen: &mut Gen, c: &mut Check) -> SuiteResult {
    let r01 = ms("sig R/2\nmodel { domain 0 1; R = (0,1); assign x=0 y=1 }");
    let i = &r01.members()[0];
    c.eq("R(x,y) at x=0, y=1", eval_fo(i, &f("R(x,y)"))?, true);
    c.eq(
        "E=1 y. R(x,y) at x=0",
        eval_fo(i, &f("E=1 y. R(x,y)"))?,
        true,
    );
    c.eq("x=x", eval_fo(i, &f("x=x"))?, true);
    let unbound = eval_fo(i, &f("R(x,z)"));
    c.expect(
        matches!(unbound, Err(EvalError::UnboundVariable(_))),
        || format!("unbound z gave {unbound:?}"),
    );

    let m = disjoint_pair();
    let cx = f("C x. x=x");
    c.eq("disjoint pair ⊨+ C x. x=x", eval_pos(&m, &cx)?, false);
    c.eq(
        "disjoint pair ⊨+ ~(~C x. x=x & ~C x. x=x)",
        eval_pos(&m, &f("~(~C x. x=x & ~C x. x=x)"))?,
        true,
    );
    c.eq(
        "∅ ⊨+ P(x)",
        eval_pos(&ms("sig P/1\nvars x;"), &f("P(x)"))?,
        true,
    );
    c.eq(
        "∅ ⊨+ C x. P(x)",
        eval_pos(&ms("sig P/1\n"), &f("C x. P(x)"))?,
        true,
    );

    let falsified = ms("sig R/2\nmodel { domain 0 1; R = (1,0); assign x=0 y=1 }\nmodel { domain 0 1 2; assign x=2 y=2 }");
    c.eq(
        "every member falsifies R(x,y)",
        eval_neg(&falsified, &f("R(x,y)"))?,
        true,
    );
    c.eq(
        "empty common domain ⊨- C x. P(x)",
        eval_neg(
            &ms("sig P/1\nmodel { domain 0; P = 0 }\nmodel { domain 1; P = 1 }"),
            &f("C x. P(x)"),
        )?,
        true,
    );

    // singletons agree with classical truth on both turnstiles
    let vars = ["x", "y"].iter().map(|v| Symbol::new(v)).collect();
    for _ in 0..50 {
        let i = gen.interpretation(&crate::random::fo_signature(), &vars, 3);
        let phi = gen.fo_formula(3);
        let single = ModelSet::new([i.clone()])?;
        let truth = eval_fo(&i, &phi)?;
        c.eq(
            &format!("{{I}} ⊨+ `{phi}`"),
            eval_pos(&single, &phi)?,
            truth,
        );
        c.eq(
            &format!("{{I}} ⊨- `{phi}`"),
            eval_neg(&single, &phi)?,
            !truth,
        );
    }

    let p_empty = ms("sig P/1\nmodel { domain 0 1 }");
    let p_full = ms("sig P/1\nmodel { domain 0 1; P = 0 1 }");
    let point = |m: &ModelSet| m.members()[0].clone();
    c.eq(
        "C x. x=x on a singleton",
        eval_variant_singleton(&point(&p_empty), &cx)?,
        Verdict {
            positive: true,
            negative: false,
        },
    );
    c.eq(
        "C x. P(x) with P empty",
        eval_variant_singleton(&point(&p_empty), &f("C x. P(x)"))?,
        Verdict {
            positive: false,
            negative: true,
        },
    );
    for m in [&p_empty, &p_full] {
        c.eq(
            "E x. P(x) and C x. P(x) agree on a singleton",
            eval_variant_singleton(&point(m), &f("E x. P(x)"))?,
            eval_variant_singleton(&point(m), &f("C x. P(x)"))?,
        );
    }
    // `C` under a negation: the negative clause widens {I} to one member per
    // element, so the variant is undecided where its original is false
    let two = point(&ms("sig\nmodel { domain 0 1 }"));
    let v = eval_variant_singleton(&two, &f("C x. ~C z. x=z"));
    c.expect(matches!(v, Err(EvalError::VariantMismatch(_))), || {
        format!("C x. ~C z. x=z gave {v:?}")
    });
    let single = ModelSet::new([two.clone()])?;
    c.eq(
        "{I} ⊨- C x. ~C z. x=z on domain {0,1}",
        eval_neg(&single, &f("C x. ~C z. x=z"))?,
        false,
    );
    c.eq(
        "I ⊨ E x. ~E z. x=z on domain {0,1}",
        eval_fo(&two, &f("E x. ~E z. x=z"))?,
        false,
    );
    Ok(())
}

pub fn translate(_: &mut Gen, c: &mut Check) -> SuiteResult {
    c.eq(
        "T(C x. P(x))",
        tr(&f("C x. P(x)"), "D")?,
        f("E x. (D(x) & P(x))"),
    );
    c.eq("T(E x. P(x))", tr(&f("E x. P(x)"), "D")?, f("E x. P(x)"));
    c.eq(
        "T(C x. C y. R(x,y))",
        tr(&f("C x. C y. R(x,y)"), "D")?,
        f("E x. (D(x) & E y. (D(y) & R(x,y)))"),
    );
    c.expect(
        matches!(tr(&f("C x. D(x)"), "D"), Err(SatError::NameCollision(_))),
        || "a colliding D was accepted".into(),
    );

    let opts = SearchOptions::default();
    c.eq(
        "FO sat E x. ~x=x",
        bounded_fo_sat(&f("E x. ~x=x"), 3, opts)?.status,
        SatStatus::UnknownWithinBound,
    );
    let r = bounded_fo_sat(&f("E x. (D(x) & x=x)"), 1, opts)?;
    let witness = match &r.witness {
        Some(SatWitness::Interpretation(i)) => {
            let d: Vec<Vec<Elem>> = i
                .structure()
                .relation(&Symbol::new("D"))
                .map(|r| r.tuples.iter().cloned().collect())
                .unwrap_or_default();
            Some((i.structure().domain().clone(), d))
        }
        _ => None,
    };
    c.eq(
        "FO sat E x. (D(x) & x=x) within 1",
        witness,
        Some((elems(&[0]), vec![vec![0]])),
    );
    c.eq(
        "FO sat (P(x) & ~P(x))",
        bounded_fo_sat(&f("(P(x) & ~P(x))"), 3, opts)?.status,
        SatStatus::UnknownWithinBound,
    );

    let r = bounded_lc_sat(&f("C x. x=x"), 2, 2, opts)?;
    let singleton = matches!(&r.witness, Some(SatWitness::ModelSet(m)) if m.len() == 1);
    c.expect(r.is_sat() && singleton, || {
        format!("LC sat C x. x=x gave {r:?}")
    });
    c.expect(
        r.witness
            .as_ref()
            .map_or(Ok(false), |w| verify_witness(&f("C x. x=x"), w))?,
        || "LC witness does not verify".into(),
    );
    c.eq(
        "LC sat E x. ~x=x",
        bounded_lc_sat(&f("E x. ~x=x"), 2, 2, opts)?.status,
        SatStatus::UnknownWithinBound,
    );
    c.eq(
        "C x. x=x fails on the disjoint pair",
        eval_pos(&disjoint_pair(), &f("C x. x=x"))?,
        false,
    );

    let p = ms("sig P/1\nmodel { domain 0 1; P = 0 }");
    c.eq(
        "claim when M ⊭+ φ",
        check_translation_claim(&f("C x. ~P(x)"), &ms("sig P/1\nmodel { domain 0; P = 0 }"))?,
        true,
    );
    let full = ms("sig P/1\nmodel { domain 0 1; P = 0 1 }");
    c.eq(
        "M ⊨+ C x. P(x) with P = domain",
        eval_pos(&full, &f("C x. P(x)"))?,
        true,
    );
    c.eq(
        "M_D ⊨+ T(C x. P(x))",
        eval_pos(&full.add_domain_predicate("D")?, &f("E x. (D(x) & P(x))"))?,
        true,
    );
    c.eq(
        "claim for C x. P(x)",
        check_translation_claim(&f("C x. P(x)"), &full)?,
        true,
    );
    c.eq(
        "claim for C x. P(x), P partial",
        check_translation_claim(&f("C x. P(x)"), &p)?,
        true,
    );
    Ok(())
}

pub fn counting(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let n = |v: u64| num_bigint::BigUint::from(v);
    c.eq(
        "symmetric models, n=2",
        count_models(&phi_symmetric(), 2)?,
        n(8),
    );
    c.eq(
        "anti-involutive models, n=3",
        count_models(&phi_anti_involutive(), 3)?,
        n(2),
    );
    for size in 1..=3 {
        c.eq(
            &format!("E x. ~x=x, n={size}"),
            count_models(&f("E x. ~x=x"), size)?,
            n(0),
        );
    }
    for (size, want) in [(1, 2), (2, 8), (3, 64)] {
        c.eq(
            &format!("closed form symmetric, n={size}"),
            closed_form_symmetric(size),
            n(want),
        );
    }
    for (size, want) in [(1, 0), (2, 0), (3, 2)] {
        c.eq(
            &format!("closed form anti-involutive, n={size}"),
            closed_form_anti_involutive(size),
            n(want),
        );
    }
    for (size, want) in [(3, 2), (4, 30), (1, 0)] {
        c.eq(
            &format!("anti-involutive functions, n={size}"),
            count_functions_anti_involutive(size)?,
            n(want),
        );
    }
    c.eq(
        "report row",
        report(&phi_anti_involutive(), 3, Some(ClosedForm::AntiInvolutive))?.to_string(),
        "3\t2\t2\ttrue".to_string(),
    );
    let sym2 = model_set_of(&phi_symmetric(), 2)?;
    c.eq(
        "model set of symmetric relations on 2 elements",
        sym2.len(),
        8,
    );
    c.eq(
        "that model set ⊨+ φ_sym",
        eval_pos(&sym2, &phi_symmetric())?,
        true,
    );
    Ok(())
}

const PQ: &str = "sig p/1 q/1\n";
const A: &str = "model { domain 0 1 2 3; p = 0; assign x=0 }";
const B: &str = "model { domain 0 1 2 3; q = 1; assign x=1 }";

fn persp(body: &str) -> Perspective {
    parse_perspective(&format!("{PQ}{body}")).expect("golden perspective")
}

pub fn perspectives(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let p = persp(&format!("persp {{ {A} {B} }}"));
    let p2 = persp(&format!("persp {{ persp {{ {A} }} persp {{ {B} }} }}"));
    c.eq("{A,B} ⊨ <>p", persp_eval(&p, &f("<>p"))?, true);
    c.eq("{A,B} ⊨ p", persp_eval(&p, &f("p"))?, false);
    c.eq("{{A},{B}} ⊨ <><>p", persp_eval(&p2, &f("<><>p"))?, true);

    c.eq(
        "{A,B}↾p",
        restrict(&p, &f("p"), false)?,
        persp(&format!("persp {{ {A} }}")),
    );
    c.eq(
        "{A,B}↾~p",
        restrict(&p, &f("p"), true)?,
        persp(&format!("persp {{ {B} }}")),
    );
    c.eq(
        "restriction by a tautology",
        restrict(&p, &f("(p | ~p)"), false)?,
        p.clone(),
    );

    c.eq(
        "{A,B} ⊨+ (p | <>q)",
        persp_eval_signed(&p, &f("(p | <>q)"))?.positive,
        true,
    );
    for (m, text) in [(A, "p"), (A, "q"), (B, "q"), (B, "(p | q)")] {
        let single = persp(&format!("persp {{ {m} }}"));
        let leaf = &single.leaves()[0];
        let truth = eval_fo(leaf, &f(text))?;
        c.eq(
            &format!("leaf verdict for `{text}`"),
            persp_eval_signed(&single, &f(text))?,
            Verdict {
                positive: truth,
                negative: !truth,
            },
        );
    }
    let all_neg = persp_eval_signed(&p, &f("(p & q)"))?.negative;
    c.eq(
        "⊨- <>(p & q) iff every child ⊨- (p & q)",
        persp_eval_signed(&p, &f("<>(p & q)"))?.negative,
        all_neg,
    );
    c.eq(
        "⊨- <>p fails when one child ⊨+ p",
        persp_eval_signed(&p, &f("<>p"))?.negative,
        false,
    );

    // the first take negates classically; the signed take may leave the
    // conjunct `p` undecided below the top rank
    let mixed = persp("persp { persp { model { domain 0 1; p = 0; q = 0; assign x=0 } model { domain 0 1; assign x=0 } } }");
    let g = f("~<>(p & <>q)");
    c.eq(
        "first take ~<>(p & <>q) on a mixed child",
        persp_eval(&mixed, &g)?,
        true,
    );
    c.eq(
        "signed ~<>(p & <>q) on a mixed child",
        persp_eval_signed(&mixed, &g)?,
        Verdict {
            positive: false,
            negative: false,
        },
    );

    let eo = even_odd_perspective();
    let both = f("(<>odd & <>even)");
    c.eq(
        "even/odd: P ⊨ even ⇒ ~(<>odd & <>even)",
        filter_implies(&eo, &f("even"), &Formula::not(both.clone()))?,
        true,
    );
    c.eq(
        "even/odd: P ⊨ <>odd & <>even",
        persp_eval(&eo, &both)?,
        true,
    );
    c.eq(
        "filter with no survivors",
        filter_implies(&p, &f("(p & q)"), &f("<>q"))?,
        true,
    );
    c.eq("filter p ⇒ p", filter_implies(&p, &f("p"), &f("p"))?, true);

    let exists = MinorQuantifier::exists();
    let forall = MinorQuantifier::forall();
    let majority = MinorQuantifier::majority();
    c.eq(
        "<Q:exists>p",
        minor_eval_modal(&p, &exists, &f("p"))?,
        persp_eval_signed(&p, &f("<>p"))?,
    );
    c.eq(
        "<Q:exists>(p & q)",
        minor_eval_modal(&p, &exists, &f("(p & q)"))?,
        Verdict {
            positive: false,
            negative: true,
        },
    );
    c.eq(
        "<Q:majority>p on one ⊨+ and one ⊨- child",
        minor_eval_modal(&p, &majority, &f("p"))?,
        Verdict {
            positive: false,
            negative: true,
        },
    );

    let sig_p = "sig P/1\n";
    let fixed = parse_perspective(&format!(
        "{sig_p}persp {{ model {{ domain 0 1; P = 0 }} model {{ domain 0 1; P = 0; assign }} }}"
    ))?;
    let x = Symbol::new("x");
    c.eq(
        "Q:exists x. P(x) with P = {0}",
        minor_eval_quant(&fixed, &exists, &x, &f("P(x)"))?.positive,
        true,
    );
    c.eq(
        "Q:forall x. P(x) with P = {0}",
        minor_eval_quant(&fixed, &forall, &x, &f("P(x)"))?.positive,
        false,
    );
    let full = parse_perspective(&format!(
        "{sig_p}persp {{ model {{ domain 0 1; P = 0 1 }} }}"
    ))?;
    c.eq(
        "Q:forall x. P(x) with P = {0,1}",
        minor_eval_quant(&full, &forall, &x, &f("P(x)"))?.positive,
        true,
    );
    let undecided = parse_perspective(&format!(
        "{sig_p}persp {{ persp {{ model {{ domain 0 1; P = 0 }} }} persp {{ model {{ domain 0 1; P = 1 }} }} }}"
    ))?;
    c.eq(
        "Q:exists x. (<>P(x) & <><>P(x)) with every instance undecided",
        minor_eval_quant(&undecided, &exists, &x, &f("(<>P(x) & <><>P(x))"))?,
        Verdict {
            positive: false,
            negative: false,
        },
    );

    let always = MinorQuantifier {
        name: "always",
        accept_pos: |_, _, _| true,
        ..exists
    };
    c.eq(
        "exists witnesses |S| ≥ 1 up to 3",
        witness_check(&exists, exists.base, 3),
        true,
    );
    c.eq(
        "always-accept witnesses |S| ≥ 1",
        witness_check(&always, exists.base, 3),
        false,
    );
    c.eq(
        "forall witnesses |S| = |A| up to 3",
        witness_check(&forall, forall.base, 3),
        true,
    );
    Ok(())
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn universe() -> WeightedUniverse {
    let u =
        ms("sig rich/1\nmodel { domain 0; rich = 0 }\nmodel { domain 0 }\nmodel { domain 0 1 }");
    WeightedUniverse::new(u, Aggregator::Sum)
}

pub fn weights(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let ids = |v: &[usize]| v.iter().copied().collect::<BTreeSet<usize>>();
    let mut wu = universe();
    wu.add("P1", ids(&[0, 1]), rat(1))?;
    wu.add("P2", ids(&[1, 2]), rat(-2))?;
    c.eq("sum of +1 and -2", wu.value_of(&["P1", "P2"])?, rat(-1));
    c.eq("empty K", wu.value_of(&[])?, rat(0));
    wu.add("P1again", ids(&[0, 1]), rat(1))?;
    c.eq(
        "one property under two names counts once",
        wu.value_of(&["P1", "P1again"])?,
        rat(1),
    );
    wu.add("P4", ids(&[0]), rat(1))?;
    c.eq(
        "distinct properties of equal weight both count",
        wu.value_of(&["P1", "P4"])?,
        rat(2),
    );

    let mut single = universe();
    single.add("only", ids(&[0]), rat(5))?;
    c.eq("full value of one property", single.full_value(), rat(5));
    let mut john = universe();
    john.add("money", ids(&[0]), rat(1))?;
    john.add("debt", ids(&[0, 2]), rat(-2))?;
    c.eq("full value of money and debt", john.full_value(), rat(-1));
    c.eq(
        "full value of no properties",
        universe().full_value(),
        rat(0),
    );

    let mut meet = universe();
    meet.add("P1", ids(&[0, 1]), rat(1))?;
    meet.add("P2", ids(&[1, 2]), rat(2))?;
    meet.add("P3", ids(&[1]), rat(7))?;
    c.eq(
        "weight of P1 ∩ P2",
        meet.intersect_then_weigh(&["P1", "P2"])?,
        rat(7),
    );
    c.eq(
        "weight of a single property",
        meet.intersect_then_weigh(&["P2"])?,
        rat(2),
    );
    meet.add("P5", ids(&[2]), rat(0))?;
    let r = meet.intersect_then_weigh(&["P1", "P5"]);
    c.expect(
        matches!(r, Err(WeightError::IntersectionUnweighted(_))),
        || format!("unweighted ∅ gave {r:?}"),
    );
    c.expect(meet.value_of(&["nope"]).is_err(), || {
        "an unknown property was accepted".into()
    });
    Ok(())
}

fn base(
    n_states: usize,
    actions: &[&str],
    f: impl Fn(usize, usize) -> BTreeSet<usize>,
) -> SystemFrameBase {
    let sig = Signature::new().with("R", 1);
    let states = (0..n_states)
        .map(|i| {
            (
                Symbol::new(&format!("s{i}")),
                Structure::new([0], &sig).expect("non-empty"),
            )
        })
        .collect();
    let transitions = (0..n_states)
        .flat_map(|s| (0..actions.len()).map(move |a| (s, a)))
        .map(|(s, a)| ((s, vec![a]), f(s, a)))
        .collect();
    SystemFrameBase::new(
        vec![Symbol::new("a")],
        actions.iter().map(|a| Symbol::new(a)).collect(),
        states,
        transitions,
    )
    .expect("golden base")
}

fn default_selector() -> Box<TableSelector> {
    Box::new(TableSelector {
        table: BTreeMap::new(),
        fallback: true,
    })
}

pub fn systems(_: &mut Gen, c: &mut Check) -> SuiteResult {
    let t = toggle();
    c.eq(
        "k=0 evolutions of the toggle",
        t.base.proper_evolutions(0).len(),
        2,
    );
    let det = base(2, &["L", "R"], |s, _| [1 - s].into());
    c.eq(
        "k=0 evolutions, 2 states and 2 actions",
        det.proper_evolutions(0).len(),
        4,
    );
    c.eq(
        "k=1 evolutions of a deterministic base",
        det.proper_evolutions(1).len(),
        4 + 8,
    );
    c.eq(
        "k=2 evolutions of a deterministic base",
        det.proper_evolutions(2).len(),
        4 + 8 + 16,
    );
    let stuck = base(
        3,
        &["go"],
        |s, _| if s == 2 { [0].into() } else { [s].into() },
    );
    let entered = stuck
        .proper_evolutions(3)
        .iter()
        .any(|e| e.steps.iter().skip(1).any(|(s, _)| *s == 2));
    c.eq("an unreachable state is never entered", entered, false);

    let one = System::new(
        base(1, &["go"], |_, _| [0].into()),
        default_selector(),
        vec![vec![0]],
    )?;
    c.eq("one-state trace", one.run(0, 5)?.states(), vec![0; 6]);
    c.eq(
        "toggle trace",
        t.run(0, 10)?.states(),
        (0..=10).map(|i| i % 2).collect::<Vec<_>>(),
    );

    // G reads the whole history; the actions still follow the current state
    let free = base(2, &["L", "R"], |_, _| [0, 1].into());
    let g = FnSelector(|_: &SystemFrameBase, h: &[Step]| Some(h.len() % 3 % 2));
    let sys = System::new(free.clone(), Box::new(g), vec![vec![0, 1]])?;
    let e = sys.run(0, 9)?;
    c.expect(
        e.steps.iter().all(|(s, a)| *a == vec![sys.strategy(0, *s)]),
        || "actions depend on more than the state".into(),
    );
    let broken = System::new(
        t.base.clone(),
        Box::new(FnSelector(|_: &SystemFrameBase, h: &[Step]| {
            h.last().map(|s| s.0)
        })),
        vec![vec![0, 0]],
    )?;
    c.expect(
        matches!(
            broken.run(0, 3),
            Err(SystemError::SelectorViolation { step: 0, .. })
        ),
        || "a selector outside F was not caught".into(),
    );

    let plain =
        || System::new(free.clone(), default_selector(), vec![vec![0, 1]]).expect("golden system");
    let id = plain().with_perception(0, |s| Some(s.clone()), |s| Some(s.domain().len() - 1))?;
    c.eq(
        "identity perception",
        (0..2).map(|s| id.strategy(0, s)).collect::<Vec<_>>(),
        vec![0, 0],
    );

    let sig = Signature::new().with("R", 1);
    let marked = Structure::new([0], &sig)?.with("R", &[&[0]])?;
    let unmarked = Structure::new([0], &sig)?;
    let varied = SystemFrameBase::new(
        vec![Symbol::new("a")],
        vec![Symbol::new("L"), Symbol::new("R")],
        vec![(Symbol::new("s0"), marked), (Symbol::new("s1"), unmarked)],
        free_transitions(),
    )?;
    let sees_r = |s: &Structure| Some(s.relation(&Symbol::new("R")).map_or(0, |r| r.tuples.len()));
    let sys = System::new(varied.clone(), default_selector(), vec![vec![0, 0]])?;
    let direct = sys.with_perception(0, |s| Some(s.clone()), sees_r)?;
    c.eq(
        "R is visible without forgetting",
        direct.strategy(0, 0) != direct.strategy(0, 1),
        true,
    );
    let sys = System::new(varied, default_selector(), vec![vec![0, 0]])?;
    let forget = sys.with_perception(0, |s| Some(s.without("R")), sees_r)?;
    c.eq(
        "forgetting R equalises the actions",
        forget.strategy(0, 0),
        forget.strategy(0, 1),
    );
    let collapse = plain().with_perception(
        0,
        |_| Some(Structure::new([7], &Signature::new()).expect("non-empty")),
        |_| Some(1),
    )?;
    c.eq(
        "collapsed perception",
        collapse.strategy(0, 0),
        collapse.strategy(0, 1),
    );
    let partial = plain().with_perception(0, |_| None, |_| Some(0));
    c.expect(matches!(partial, Err(SystemError::Partial { .. })), || {
        "a partial perception was accepted".into()
    });
    Ok(())
}

fn free_transitions() -> BTreeMap<Step, BTreeSet<usize>> {
    (0..2)
        .flat_map(|s| (0..2).map(move |a| ((s, vec![a]), [0, 1].into())))
        .collect()
}

pub fn cli(_: &mut Gen, c: &mut Check) -> SuiteResult {
    c.eq(
        "eval pos on the disjoint pair",
        eval_pos(&disjoint_pair(), &f("C x. x=x"))?,
        false,
    );
    c.eq(
        "count anti-involutive n=3 with closed form",
        report(&phi_anti_involutive(), 3, Some(ClosedForm::AntiInvolutive))?.to_string(),
        "3\t2\t2\ttrue".to_string(),
    );
    let a = super::run_suite(42, &["disjunction", "witness"]).map_err(|e| e.to_string())?;
    let b = super::run_suite(42, &["disjunction", "witness"]).map_err(|e| e.to_string())?;
    c.eq("seed 42 twice", a.to_string(), b.to_string());
    c.eq(
        "only filters suites",
        a.outcomes.iter().map(|o| o.name).collect::<Vec<_>>(),
        vec!["disjunction", "witness"],
    );
    Ok(())
}

#[allow(unused)]
fn interpretation_of(m: &ModelSet) -> Interpretation {
    m.members()[0].clone()
}
