//! The evaluators against literal, slow re-implementations of the clauses.

use std::collections::{BTreeMap, BTreeSet};

use msl_core::eval::{CoverMode, EvalOptions};
use msl_core::formula::{classify, parse, Fragment};
use msl_core::{
    eval_fo, Elem, Evaluator, Formula, Interpretation, ModelSet, Signature, Structure, Symbol,
};
use proptest::prelude::*;

const VARS: [&str; 2] = ["x", "y"];

fn sig() -> Signature {
    Signature::new().with("P", 1).with("R", 2)
}

/// A member as the oracle sees it: a structure index and an assignment.
type Member = (usize, BTreeMap<String, Elem>);
type Team = BTreeSet<Member>;

struct Oracle<'a> {
    structures: &'a [Structure],
}

impl Oracle<'_> {
    fn domain(&self, m: &Member) -> &BTreeSet<Elem> {
        self.structures[m.0].domain()
    }

    fn fo(&self, m: &Member, f: &Formula) -> bool {
        let s = &self.structures[m.0];
        let val = |v: &Symbol| m.1[v.as_str()];
        let bind = |x: &Symbol, a: Elem| {
            let mut n = m.clone();
            n.1.insert(x.as_str().to_string(), a);
            n
        };
        match f {
            Formula::Rel(r, args) => s.holds(r, &args.iter().map(val).collect::<Vec<_>>()),
            Formula::Eq(a, b) => val(a) == val(b),
            Formula::Not(a) => !self.fo(m, a),
            Formula::And(a, b) => self.fo(m, a) && self.fo(m, b),
            Formula::Or(a, b) => self.fo(m, a) || self.fo(m, b),
            Formula::Impl(a, b) => !self.fo(m, a) || self.fo(m, b),
            Formula::Exists(x, a) => s.domain().iter().any(|&e| self.fo(&bind(x, e), a)),
            Formula::CountExists(k, x, a) => {
                s.domain()
                    .iter()
                    .filter(|&&e| self.fo(&bind(x, e), a))
                    .count()
                    == *k
            }
            other => panic!("not first-order: {other}"),
        }
    }

    fn common(&self, t: &Team) -> BTreeSet<Elem> {
        let mut it = t.iter();
        let Some(first) = it.next() else {
            return BTreeSet::new();
        };
        it.fold(self.domain(first).clone(), |acc, m| {
            acc.intersection(self.domain(m)).copied().collect()
        })
    }

    fn extend(&self, t: &Team, x: &Symbol, pick: impl Fn(&Member) -> Vec<Elem>) -> Team {
        t.iter()
            .flat_map(|m| {
                pick(m).into_iter().map(move |e| {
                    let mut n = m.clone();
                    n.1.insert(x.as_str().to_string(), e);
                    n
                })
            })
            .collect()
    }

    /// Every way of sending each member to one element of its domain.
    fn choices(&self, t: &Team, x: &Symbol) -> Vec<Team> {
        let mut out = vec![Team::new()];
        for m in t {
            out = out
                .into_iter()
                .flat_map(|partial| {
                    self.domain(m).iter().map(move |&e| {
                        let mut p = partial.clone();
                        let mut n = m.clone();
                        n.1.insert(x.as_str().to_string(), e);
                        p.insert(n);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Every pair of sub-teams whose union is `t`.
    fn covers(t: &Team) -> Vec<(Team, Team)> {
        let members: Vec<&Member> = t.iter().collect();
        let mut out = Vec::new();
        let n = members.len();
        for code in 0..3usize.pow(n as u32) {
            let (mut l, mut r, mut c) = (Team::new(), Team::new(), code);
            for m in &members {
                match c % 3 {
                    0 => {
                        l.insert((*m).clone());
                    }
                    1 => {
                        r.insert((*m).clone());
                    }
                    _ => {
                        l.insert((*m).clone());
                        r.insert((*m).clone());
                    }
                }
                c /= 3;
            }
            out.push((l, r));
        }
        out
    }

    fn pos(&self, t: &Team, f: &Formula) -> bool {
        match f {
            Formula::Rel(..) | Formula::Eq(..) => t.iter().all(|m| self.fo(m, f)),
            Formula::Not(a) => self.neg(t, a),
            Formula::And(a, b) => self.pos(t, a) && self.pos(t, b),
            Formula::Or(a, b) => Self::covers(t)
                .iter()
                .any(|(l, r)| self.pos(l, a) && self.pos(r, b)),
            Formula::Impl(a, b) => Self::covers(t)
                .iter()
                .any(|(l, r)| self.neg(l, a) && self.pos(r, b)),
            Formula::Exists(x, a) => self.choices(t, x).iter().any(|u| self.pos(u, a)),
            Formula::Const(_, a) if t.is_empty() => self.pos(t, a),
            Formula::Const(x, a) => self
                .common(t)
                .into_iter()
                .any(|e| self.pos(&self.extend(t, x, |_| vec![e]), a)),
            other => panic!("unsupported: {other}"),
        }
    }

    fn neg(&self, t: &Team, f: &Formula) -> bool {
        match f {
            Formula::Rel(..) | Formula::Eq(..) => t.iter().all(|m| !self.fo(m, f)),
            Formula::Not(a) => self.pos(t, a),
            Formula::And(a, b) => Self::covers(t)
                .iter()
                .any(|(l, r)| self.neg(l, a) && self.neg(r, b)),
            Formula::Or(a, b) => self.neg(t, a) && self.neg(t, b),
            Formula::Impl(a, b) => self.pos(t, a) && self.neg(t, b),
            Formula::Exists(x, a) => self.neg(
                &self.extend(t, x, |m| self.domain(m).iter().copied().collect()),
                a,
            ),
            Formula::Const(x, a) => {
                let common: Vec<Elem> = self.common(t).into_iter().collect();
                self.neg(&self.extend(t, x, |_| common.clone()), a)
            }
            other => panic!("unsupported: {other}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Fixture {
    structures: Vec<Structure>,
    members: Vec<Member>,
}

impl Fixture {
    fn team(&self) -> Team {
        self.members.iter().cloned().collect()
    }

    fn model_set(&self) -> ModelSet {
        let members = self.members.iter().map(|(s, a)| {
            let a = a.iter().map(|(v, &e)| (Symbol::new(v), e)).collect();
            Interpretation::new(self.structures[*s].clone(), a).expect("assignment into the domain")
        });
        let vars = VARS.iter().map(|v| Symbol::new(v)).collect();
        ModelSet::with_parts(members, vars, sig()).expect("consistent members")
    }
}

fn structure() -> impl Strategy<Value = Structure> {
    (1usize..=3)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n * n),
            )
        })
        .prop_map(|(n, p, r)| {
            let mut s = Structure::new(0..n as Elem, &sig()).expect("non-empty");
            for (i, _) in p.iter().enumerate().filter(|(_, b)| **b) {
                s.insert("P", vec![i as Elem]).expect("in domain");
            }
            for (i, _) in r.iter().enumerate().filter(|(_, b)| **b) {
                s.insert("R", vec![(i / n) as Elem, (i % n) as Elem])
                    .expect("in domain");
            }
            s
        })
}

fn fixture(max_members: usize) -> impl Strategy<Value = Fixture> {
    proptest::collection::vec(structure(), 1..=2).prop_flat_map(move |structures| {
        let member = (
            0..structures.len(),
            any::<(prop::sample::Index, prop::sample::Index)>(),
        );
        (
            Just(structures),
            proptest::collection::vec(member, 0..=max_members),
        )
            .prop_map(|(structures, picks)| {
                let members = picks
                    .into_iter()
                    .map(|(s, (x, y))| {
                        let n = structures[s].domain().len();
                        let a = [
                            ("x".to_string(), x.index(n) as Elem),
                            ("y".to_string(), y.index(n) as Elem),
                        ]
                        .into();
                        (s, a)
                    })
                    .collect();
                Fixture {
                    structures,
                    members,
                }
            })
    })
}

fn atom() -> impl Strategy<Value = Formula> {
    let var = prop::sample::select(&VARS[..]);
    prop_oneof![
        var.clone().prop_map(|x| Formula::rel("P", &[x])),
        (var.clone(), var.clone()).prop_map(|(x, y)| Formula::rel("R", &[x, y])),
        (var.clone(), var).prop_map(|(x, y)| Formula::eq(x, y)),
    ]
}

/// Formulas over `x`, `y` only, so that every variable stays bound by the
/// assignment; `consts` admits `C x.` anywhere.
fn formula(consts: bool) -> impl Strategy<Value = Formula> {
    atom().prop_recursive(3, 24, 2, move |inner| {
        let var = prop::sample::select(&VARS[..]);
        let mut options = vec![
            inner.clone().prop_map(Formula::not).boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::and(a, b))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::or(a, b))
                .boxed(),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::implies(a, b))
                .boxed(),
            (var.clone(), inner.clone())
                .prop_map(|(x, a)| Formula::exists(x, a))
                .boxed(),
        ];
        if consts {
            options.push(
                (var, inner)
                    .prop_map(|(x, a)| Formula::constant(x, a))
                    .boxed(),
            );
        }
        prop::strategy::Union::new(options)
    })
}

fn evaluator(cover: CoverMode, fast_path: bool) -> Evaluator {
    Evaluator::new(EvalOptions { cover, fast_path })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn classical_evaluation_matches_oracle(fx in fixture(1), f in formula(false)) {
        let oracle = Oracle { structures: &fx.structures };
        for member in &fx.members {
            let a = member.1.iter().map(|(v, &e)| (Symbol::new(v), e)).collect();
            let i = Interpretation::new(fx.structures[member.0].clone(), a).unwrap();
            prop_assert_eq!(eval_fo(&i, &f).unwrap(), oracle.fo(member, &f));
        }
    }

    #[test]
    fn first_order_turnstiles_match_clauses(fx in fixture(3), f in formula(false)) {
        let oracle = Oracle { structures: &fx.structures };
        let (team, m) = (fx.team(), fx.model_set());
        for e in [evaluator(CoverMode::ThreeWay, false), evaluator(CoverMode::ThreeWay, true)] {
            prop_assert_eq!(e.eval_pos(&m, &f).unwrap(), oracle.pos(&team, &f), "pos of {}", f);
            prop_assert_eq!(e.eval_neg(&m, &f).unwrap(), oracle.neg(&team, &f), "neg of {}", f);
        }
    }

    #[test]
    fn constant_turnstiles_match_clauses(fx in fixture(3), f in formula(true)) {
        let oracle = Oracle { structures: &fx.structures };
        let (team, m) = (fx.team(), fx.model_set());
        let e = Evaluator::default();
        prop_assert_eq!(e.eval_pos(&m, &f).unwrap(), oracle.pos(&team, &f), "pos of {}", f);
        prop_assert_eq!(e.eval_neg(&m, &f).unwrap(), oracle.neg(&team, &f), "neg of {}", f);
    }

    #[test]
    fn flatness(fx in fixture(3), f in formula(false)) {
        let m = fx.model_set();
        let e = evaluator(CoverMode::ThreeWay, false);
        let truths: Vec<bool> = m.members().iter().map(|i| eval_fo(i, &f).unwrap()).collect();
        prop_assert_eq!(e.eval_pos(&m, &f).unwrap(), truths.iter().all(|&t| t));
        prop_assert_eq!(e.eval_neg(&m, &f).unwrap(), truths.iter().all(|&t| !t));
    }

    #[test]
    fn double_negation(fx in fixture(3), f in formula(true)) {
        let m = fx.model_set();
        let e = Evaluator::default();
        let nn = Formula::not(Formula::not(f.clone()));
        prop_assert_eq!(e.eval_pos(&m, &nn).unwrap(), e.eval_pos(&m, &f).unwrap());
        prop_assert_eq!(e.eval_neg(&m, &nn).unwrap(), e.eval_neg(&m, &f).unwrap());
    }

    #[test]
    fn lc_variants_agree_on_singletons(fx in fixture(1), f in formula(false), flips in any::<u64>()) {
        prop_assume!(!fx.members.is_empty());
        let i = fx.model_set().members()[0].clone();
        let mut bit = 0;
        let v = f.map_quantifiers(&mut |q| {
            bit += 1;
            if flips >> (bit % 64) & 1 == 1 { msl_core::formula::Quantifier::Const } else { q }
        });
        prop_assume!(classify(&v).contains(&Fragment::LC));
        let truth = eval_fo(&i, &f).unwrap();
        let v = msl_core::eval_variant_singleton(&i, &v).unwrap();
        prop_assert_eq!((v.positive, v.negative), (truth, !truth));
    }

    #[test]
    fn display_round_trips(f in formula(true)) {
        prop_assert_eq!(parse(&f.to_string(), &sig()).unwrap(), f);
    }
}

#[test]
fn exactly_one_counts_witnesses() {
    let sig = sig();
    let s = Structure::new([0, 1, 2], &sig)
        .unwrap()
        .with("R", &[&[0, 1], &[0, 2], &[1, 1]])
        .unwrap();
    let oracle = Oracle {
        structures: std::slice::from_ref(&s),
    };
    for x in 0..3 {
        let i = Interpretation::new(s.clone(), [(Symbol::new("x"), x)].into()).unwrap();
        let member = (0, [("x".to_string(), x)].into());
        for text in ["E=1 y. R(x,y)", "E=2 y. R(x,y)", "E=0 y. R(x,y)"] {
            let f = parse(text, &sig).unwrap();
            assert_eq!(
                eval_fo(&i, &f).unwrap(),
                oracle.fo(&member, &f),
                "{text} at x={x}"
            );
        }
    }
}
