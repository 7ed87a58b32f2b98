//! The two perspective semantics. The first take has a single turnstile;
//! the signed take has `⊨+`/`⊨-`, a primitive `|`, restriction, and minor
//! quantifiers.

use rayon::prelude::*;

use super::{PerspError, Perspective};
use crate::eval::classical::{Classical, Leaf};
use crate::eval::Verdict;
use crate::formula::{rank, Formula};
use crate::model::Interpretation;
use crate::quantifier::{MinorQuantifier, Quantifiers};
use crate::symbol::Var;

type Res<T> = Result<T, PerspError>;

/// Children above this count are evaluated in parallel.
const PAR_CHILDREN: usize = 8;

fn any_const(f: &Formula) -> bool {
    let mut found = false;
    f.visit(&mut |g| found |= matches!(g, Formula::Const(..)));
    found
}

fn any_minor(f: &Formula) -> bool {
    let mut found = false;
    f.visit(&mut |g| found |= matches!(g, Formula::MinorModal(..) | Formula::MinorQuant(..)));
    found
}

/// Evaluates perspectives against a fixed table of minor quantifiers.
#[derive(Debug, Clone, Default)]
pub struct PerspEvaluator {
    quantifiers: Quantifiers,
}

impl PerspEvaluator {
    pub fn new(quantifiers: Quantifiers) -> Self {
        PerspEvaluator { quantifiers }
    }

    pub fn quantifiers(&self) -> &Quantifiers {
        &self.quantifiers
    }

    fn leaf(&self, i: &Interpretation, f: &Formula) -> Res<bool> {
        Ok(Classical::new(i, Leaf::Kripke(&self.quantifiers)).holds(f)?)
    }

    fn lookup(&self, q: &crate::symbol::Symbol) -> Res<&MinorQuantifier> {
        self.quantifiers
            .get(q)
            .ok_or_else(|| PerspError::UnknownQuantifier(q.to_string()))
    }

    /// Applies `f` to every top-level element; rank-1 elements are models.
    fn map_children<T: Send>(
        &self,
        p: &Perspective,
        on_model: impl Fn(&Interpretation) -> Res<T> + Sync + Send,
        on_child: impl Fn(&Perspective) -> Res<T> + Sync + Send,
    ) -> Res<Vec<T>> {
        match p {
            Perspective::Models(m) => m.members().iter().map(on_model).collect(),
            Perspective::Nested { children, .. } if children.len() > PAR_CHILDREN => {
                children.par_iter().map(on_child).collect()
            }
            Perspective::Nested { children, .. } => children.iter().map(on_child).collect(),
        }
    }

    // ---- first take ----

    /// The single-turnstile semantics. `a | b` is `~(~a & ~b)` and `a -> b`
    /// is `~(a & ~b)`; minor quantifiers are rejected.
    pub fn first(&self, p: &Perspective, f: &Formula) -> Res<bool> {
        p.check_rank(f)?;
        if any_const(f) {
            return Err(PerspError::NotInFragment("`C x.`".into()));
        }
        if any_minor(f) {
            return Err(PerspError::NotInFragment(
                "minor quantifiers need the signed semantics".into(),
            ));
        }
        self.first_at(p, f)
    }

    fn first_at(&self, p: &Perspective, f: &Formula) -> Res<bool> {
        use Formula::*;
        let alpha = p.rank();
        if rank(f) < alpha {
            let all = self.map_children(p, |i| self.leaf(i, f), |c| self.first_at(c, f))?;
            return Ok(all.into_iter().all(|b| b));
        }
        match f {
            And(a, b) => Ok(self.first_at(p, a)? && self.first_at(p, b)?),
            // expanded literally: a lower-rank `~a` still descends
            Or(a, b) => {
                let g = Formula::and(Formula::not((**a).clone()), Formula::not((**b).clone()));
                Ok(!self.first_at(p, &g)?)
            }
            Impl(a, b) => {
                let g = Formula::and((**a).clone(), Formula::not((**b).clone()));
                Ok(!self.first_at(p, &g)?)
            }
            Not(a) => Ok(!self.first_at(p, a)?),
            Diamond(a) => {
                let some = self.map_children(p, |i| self.leaf(i, a), |c| self.first_at(c, a))?;
                Ok(some.into_iter().any(|b| b))
            }
            Exists(x, a) => {
                let domain = p.model_domain().ok_or(PerspError::NotRegular("`E x.`"))?;
                for e in domain {
                    if self.first_at(&p.rebind(x, e), a)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            FilterImpl(a, b) => {
                let q = self.filter(p, a, &|c| self.first_child(c, a))?;
                Ok(q.is_empty() || self.first_at(&q, b)?)
            }
            other => Err(PerspError::NotInFragment(format!(
                "`{other}` at the top rank"
            ))),
        }
    }

    fn first_child(&self, c: Child, f: &Formula) -> Res<bool> {
        match c {
            Child::Model(i) => self.leaf(i, f),
            Child::Persp(q) => self.first_at(q, f),
        }
    }

    /// The top-level elements of `p` accepted by `keep`. `a` must have rank
    /// below `p`'s.
    fn filter(
        &self,
        p: &Perspective,
        a: &Formula,
        keep: &(dyn Fn(Child) -> Res<bool> + Sync + Send),
    ) -> Res<Perspective> {
        if rank(a) >= p.rank() {
            return Err(PerspError::Rank {
                formula: rank(a) + 1,
                perspective: p.rank(),
            });
        }
        let flags = self.map_children(p, |i| keep(Child::Model(i)), |c| keep(Child::Persp(c)))?;
        Ok(p.select(flags.iter().enumerate().filter(|(_, &k)| k).map(|(i, _)| i)))
    }

    // ---- signed take ----

    /// The `⊨+`/`⊨-` semantics on a strongly regular perspective.
    pub fn signed(&self, p: &Perspective, f: &Formula) -> Res<Verdict> {
        p.check_rank(f)?;
        if !p.is_strongly_regular() {
            return Err(PerspError::NotStronglyRegular);
        }
        if any_const(f) {
            return Err(PerspError::NotInFragment("`C x.`".into()));
        }
        self.signed_at(p, f)
    }

    fn leaf_verdict(&self, i: &Interpretation, f: &Formula) -> Res<Verdict> {
        let b = self.leaf(i, f)?;
        Ok(Verdict {
            positive: b,
            negative: !b,
        })
    }

    fn child_verdicts(&self, p: &Perspective, f: &Formula) -> Res<Vec<Verdict>> {
        self.map_children(p, |i| self.leaf_verdict(i, f), |c| self.signed_at(c, f))
    }

    fn signed_child(&self, c: Child, f: &Formula) -> Res<Verdict> {
        match c {
            Child::Model(i) => self.leaf_verdict(i, f),
            Child::Persp(q) => self.signed_at(q, f),
        }
    }

    /// `Q ⊨ ψ` for a restricted `Q`: positive also when `Q` is empty,
    /// negative only when it is not.
    fn guarded(&self, q: &Perspective, psi: &Formula) -> Res<Verdict> {
        if q.is_empty() {
            return Ok(Verdict {
                positive: true,
                negative: false,
            });
        }
        self.signed_at(q, psi)
    }

    fn signed_at(&self, p: &Perspective, f: &Formula) -> Res<Verdict> {
        use Formula::*;
        let alpha = p.rank();
        if rank(f) < alpha {
            let all = self.child_verdicts(p, f)?;
            return Ok(Verdict {
                positive: all.iter().all(|v| v.positive),
                negative: all.iter().all(|v| v.negative),
            });
        }
        Ok(match f {
            And(a, b) => {
                let (va, vb) = (self.signed_at(p, a)?, self.signed_at(p, b)?);
                Verdict {
                    positive: va.positive && vb.positive,
                    negative: va.negative || vb.negative,
                }
            }
            Or(a, b) if rank(a) < alpha => self.guarded(&self.restrict_at(p, a, true)?, b)?,
            Or(a, b) if rank(b) < alpha => self.guarded(&self.restrict_at(p, b, true)?, a)?,
            Or(a, b) => {
                let (va, vb) = (self.signed_at(p, a)?, self.signed_at(p, b)?);
                Verdict {
                    positive: va.positive || vb.positive,
                    negative: va.negative && vb.negative,
                }
            }
            Impl(a, b) if rank(a) < alpha => self.guarded(&self.restrict_at(p, a, false)?, b)?,
            Impl(a, b) => {
                let (va, vb) = (self.signed_at(p, a)?, self.signed_at(p, b)?);
                Verdict {
                    positive: va.negative || vb.positive,
                    negative: va.positive && vb.negative,
                }
            }
            Not(a) => {
                let v = self.signed_at(p, a)?;
                Verdict {
                    positive: v.negative,
                    negative: v.positive,
                }
            }
            Diamond(a) => {
                let all = self.child_verdicts(p, a)?;
                Verdict {
                    positive: all.iter().any(|v| v.positive),
                    negative: all.iter().all(|v| v.negative),
                }
            }
            MinorModal(q, a) => self.modal_minor(p, self.lookup(q)?, a)?,
            Exists(x, a) => {
                let vs = self.instances(p, x, a, "`E x.`")?;
                Verdict {
                    positive: vs.iter().any(|v| v.positive),
                    negative: vs.iter().all(|v| v.negative),
                }
            }
            MinorQuant(q, x, a) => self.quant_minor(p, self.lookup(q)?, x, a)?,
            FilterImpl(a, b) => {
                let q = self.filter(p, a, &|c| Ok(self.signed_child(c, a)?.positive))?;
                self.guarded(&q, b)?
            }
            other => {
                return Err(PerspError::NotInFragment(format!(
                    "`{other}` at the top rank"
                )))
            }
        })
    }

    /// `P[a/x] ⊨ φ` for every `a` in the model domain.
    fn instances(
        &self,
        p: &Perspective,
        x: &Var,
        a: &Formula,
        what: &'static str,
    ) -> Res<Vec<Verdict>> {
        let domain = p.model_domain().ok_or(PerspError::NotRegular(what))?;
        domain
            .into_iter()
            .map(|e| self.signed_at(&p.rebind(x, e), a))
            .collect()
    }

    fn modal_minor(&self, p: &Perspective, q: &MinorQuantifier, a: &Formula) -> Res<Verdict> {
        Ok(tally(q, &self.child_verdicts(p, a)?))
    }

    fn quant_minor(
        &self,
        p: &Perspective,
        q: &MinorQuantifier,
        x: &Var,
        a: &Formula,
    ) -> Res<Verdict> {
        Ok(tally(q, &self.instances(p, x, a, "a minor quantifier")?))
    }

    // ---- restriction ----

    /// `P↾χ`, or `P↾χ̄` when `complement`. May be empty.
    pub fn restrict(&self, p: &Perspective, chi: &Formula, complement: bool) -> Res<Perspective> {
        if rank(chi) >= p.rank() {
            return Err(PerspError::Rank {
                formula: rank(chi) + 1,
                perspective: p.rank(),
            });
        }
        if any_const(chi) {
            return Err(PerspError::NotInFragment("`C x.`".into()));
        }
        self.restrict_at(p, chi, complement)
    }

    fn restrict_at(&self, p: &Perspective, chi: &Formula, complement: bool) -> Res<Perspective> {
        if rank(chi) + 1 == p.rank() {
            let keep =
                |c: Child| -> Res<bool> { Ok(self.signed_child(c, chi)?.positive != complement) };
            return self.filter(p, chi, &keep);
        }
        let rebuilt = p
            .children()
            .iter()
            .map(|c| self.restrict_at(c, chi, complement))
            .collect::<Res<Vec<_>>>()?;
        Perspective::nested_with_rank(
            p.rank(),
            rebuilt.into_iter().filter(|c| !c.is_empty()).collect(),
        )
    }
}

#[derive(Clone, Copy)]
enum Child<'a> {
    Model(&'a Interpretation),
    Persp(&'a Perspective),
}

/// Minor-quantifier acceptance over a list of instance verdicts.
fn tally(q: &MinorQuantifier, vs: &[Verdict]) -> Verdict {
    let n = vs.len();
    let pos = vs.iter().filter(|v| v.positive).count();
    let neg = vs.iter().filter(|v| v.negative).count();
    let both = vs.iter().filter(|v| v.positive && v.negative).count();
    Verdict {
        positive: MinorQuantifier::admits(q.accept_pos, n, pos, neg, both),
        negative: MinorQuantifier::admits(q.accept_neg, n, pos, neg, both),
    }
}

/// First-take evaluation with the built-in quantifiers.
pub fn persp_eval(p: &Perspective, f: &Formula) -> Res<bool> {
    PerspEvaluator::default().first(p, f)
}

/// Signed evaluation with the built-in quantifiers.
pub fn persp_eval_signed(p: &Perspective, f: &Formula) -> Res<Verdict> {
    PerspEvaluator::default().signed(p, f)
}

/// `P ⊨ φ ⇒ ψ` in the first take: `ψ` on the children satisfying `φ`,
/// true when there are none.
pub fn filter_implies(p: &Perspective, phi: &Formula, psi: &Formula) -> Res<bool> {
    persp_eval(p, &Formula::filter_implies(phi.clone(), psi.clone()))
}

pub fn restrict(p: &Perspective, chi: &Formula, complement: bool) -> Res<Perspective> {
    PerspEvaluator::default().restrict(p, chi, complement)
}

/// `⟨Q⟩φ` at the rank of `p`, for a quantifier that need not be registered.
pub fn minor_eval_modal(p: &Perspective, q: &MinorQuantifier, f: &Formula) -> Res<Verdict> {
    let r = rank(f) + 1;
    if r != p.rank() {
        return Err(PerspError::Rank {
            formula: r,
            perspective: p.rank(),
        });
    }
    if !p.is_strongly_regular() {
        return Err(PerspError::NotStronglyRegular);
    }
    let e = PerspEvaluator::default();
    e.modal_minor(p, q, f)
}

/// The `Qx φ` clause applied at the top level of `p`, for a quantifier that
/// need not be registered. `φ` may have any rank up to `p`'s; lower-rank
/// instances `P[a/x] ⊨ φ` then descend as usual.
pub fn minor_eval_quant(
    p: &Perspective,
    q: &MinorQuantifier,
    x: &Var,
    f: &Formula,
) -> Res<Verdict> {
    p.check_rank(f)?;
    if !p.is_strongly_regular() {
        return Err(PerspError::NotStronglyRegular);
    }
    PerspEvaluator::default().quant_minor(p, q, x, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_infer;
    use crate::formula::Signature;
    use crate::model::{Elem, ModelSet, Structure};

    fn f(text: &str) -> Formula {
        parse_infer(text).unwrap().0
    }

    fn world(sig: &Signature, props: &[(&str, &[Elem])], w: Elem) -> Interpretation {
        let mut s = Structure::new(0..4, sig).unwrap();
        for (name, ext) in props {
            for &e in *ext {
                s.insert(name, vec![e]).unwrap();
            }
        }
        Interpretation::pointed(s, w).unwrap()
    }

    fn pq() -> (Interpretation, Interpretation) {
        let sig = Signature::new().with("p", 1).with("q", 1);
        (
            world(&sig, &[("p", &[0])], 0),
            world(&sig, &[("q", &[1])], 1),
        )
    }

    fn models(ms: &[&Interpretation]) -> Perspective {
        Perspective::models(ModelSet::new(ms.iter().map(|&i| i.clone())).unwrap())
    }

    #[test]
    fn first_take_examples() {
        let (a, b) = pq();
        let p = models(&[&a, &b]);
        assert!(persp_eval(&p, &f("<>p")).unwrap());
        assert!(!persp_eval(&p, &f("p")).unwrap());
        let p2 = Perspective::nested(vec![models(&[&a]), models(&[&b])]).unwrap();
        assert!(persp_eval(&p2, &f("<><>p")).unwrap());
        assert!(!persp_eval(&p2, &f("<>q")).unwrap());
        assert!(matches!(
            persp_eval(&p, &f("<><>p")),
            Err(PerspError::Rank { .. })
        ));
    }

    #[test]
    fn restriction_examples() {
        let (a, b) = pq();
        let p = models(&[&a, &b]);
        assert_eq!(restrict(&p, &f("p"), false).unwrap(), models(&[&a]));
        assert_eq!(restrict(&p, &f("p"), true).unwrap(), models(&[&b]));
        assert_eq!(restrict(&p, &f("(p | ~p)"), false).unwrap(), p);
        // two levels down: the emptied child disappears
        let p2 = Perspective::nested(vec![models(&[&a]), models(&[&b])]).unwrap();
        assert_eq!(
            restrict(&p2, &f("p"), false).unwrap(),
            Perspective::nested(vec![models(&[&a])]).unwrap()
        );
        let r = restrict(&p2, &f("<>q"), false).unwrap();
        assert_eq!(r, Perspective::nested(vec![models(&[&b])]).unwrap());
    }

    #[test]
    fn signed_disjunction_with_lower_rank_operand() {
        let (a, b) = pq();
        let p = models(&[&a, &b]);
        let v = persp_eval_signed(&p, &f("(p | <>q)")).unwrap();
        assert!(v.positive);
        // P↾~p = {B}, and {B} is not ⊨- <>q
        assert!(!v.negative);
        let v = persp_eval_signed(&p, &f("(<>q | p)")).unwrap();
        assert!(v.positive);
    }

    #[test]
    fn signed_leaves_and_diamond() {
        let (a, b) = pq();
        let p = models(&[&a, &b]);
        assert_eq!(
            persp_eval_signed(&p, &f("p")).unwrap(),
            Verdict {
                positive: false,
                negative: false
            }
        );
        assert_eq!(
            persp_eval_signed(&models(&[&a]), &f("p")).unwrap(),
            Verdict {
                positive: true,
                negative: false
            }
        );
        let v = persp_eval_signed(&p, &f("<>(p & q)")).unwrap();
        assert_eq!(
            v,
            Verdict {
                positive: false,
                negative: true
            }
        );
    }

    #[test]
    fn signed_needs_strong_regularity() {
        let (a, _) = pq();
        let e = Perspective::empty(
            1,
            a.assignment().keys().cloned().collect(),
            a.structure().signature(),
        )
        .unwrap();
        let p = Perspective::nested(vec![models(&[&a]), e]).unwrap();
        assert!(matches!(
            persp_eval_signed(&p, &f("<><>p")),
            Err(PerspError::NotStronglyRegular)
        ));
        assert!(persp_eval(&p, &f("<><>p")).is_ok());
    }

    #[test]
    fn signed_implication_families() {
        let (a, b) = pq();
        let p = models(&[&a, &b]);
        // r(χ) < α: restrict to the p-worlds, where <>q fails negatively
        let v = persp_eval_signed(&p, &f("(p -> <>q)")).unwrap();
        assert_eq!(
            v,
            Verdict {
                positive: false,
                negative: true
            }
        );
        // r(χ) = α
        let v = persp_eval_signed(&p, &f("(<>p -> <>q)")).unwrap();
        assert_eq!(
            v,
            Verdict {
                positive: true,
                negative: false
            }
        );
        // nothing satisfies p & q, so the restriction is empty
        let v = persp_eval_signed(&p, &f("((p & q) -> <>(p & q))")).unwrap();
        assert_eq!(
            v,
            Verdict {
                positive: true,
                negative: false
            }
        );
    }

    #[test]
    fn even_odd_scenario() {
        let sig = Signature::new().with("even", 1).with("odd", 1);
        let props: &[(&str, &[Elem])] = &[("even", &[0, 2]), ("odd", &[1, 3])];
        let even = world(&sig, props, 2);
        let odd = world(&sig, props, 3);
        let p = models(&[&even, &odd]);
        let chi = f("(<>odd & <>even)");
        assert!(persp_eval(&p, &chi).unwrap());
        let not_chi = Formula::not(chi.clone());
        assert!(filter_implies(&p, &f("even"), &not_chi).unwrap());
        assert!(filter_implies(&p, &f("odd"), &not_chi).unwrap());
        // the premise of the rejected rule holds too
        assert!(persp_eval(&p, &f("(even | odd)")).unwrap());
        let v = persp_eval_signed(&p, &Formula::filter_implies(f("even"), not_chi)).unwrap();
        assert!(v.positive);
    }

    #[test]
    fn filter_implies_edge_cases() {
        let (a, b) = pq();
        let p = models(&[&a, &b]);
        assert!(filter_implies(&p, &f("(p & q)"), &f("<>q")).unwrap());
        assert!(filter_implies(&p, &f("p"), &f("p")).unwrap());
        assert!(matches!(
            filter_implies(&p, &f("<>p"), &f("<>p")),
            Err(PerspError::Rank { .. })
        ));
    }

    #[test]
    fn minor_modal_examples() {
        let (a, b) = pq();
        let p = models(&[&a, &b]);
        let exists = MinorQuantifier::exists();
        let v = minor_eval_modal(&p, &exists, &f("p")).unwrap();
        assert_eq!(v, persp_eval_signed(&p, &f("<>p")).unwrap());
        assert_eq!(
            v,
            Verdict {
                positive: true,
                negative: false
            }
        );
        let v = minor_eval_modal(&p, &exists, &f("(p & q)")).unwrap();
        assert_eq!(
            v,
            Verdict {
                positive: false,
                negative: true
            }
        );
        // one positive and one negative child: "more than half" is not met,
        // and half the children are negative, which witnesses the complement
        let v = minor_eval_modal(&p, &MinorQuantifier::majority(), &f("p")).unwrap();
        assert_eq!(
            v,
            Verdict {
                positive: false,
                negative: true
            }
        );
        let v = persp_eval_signed(&p, &f("<Q:majority>p")).unwrap();
        assert_eq!(
            v,
            Verdict {
                positive: false,
                negative: true
            }
        );
    }

    #[test]
    fn minor_quant_examples() {
        let sig = Signature::new().with("P", 1);
        let i = Interpretation::new(
            Structure::new([0, 1], &sig)
                .unwrap()
                .with("P", &[&[0]])
                .unwrap(),
            Default::default(),
        )
        .unwrap();
        let p = Perspective::models(ModelSet::new([i]).unwrap());
        let x = Var::new("x");
        let v = minor_eval_quant(&p, &MinorQuantifier::exists(), &x, &f("P(x)")).unwrap();
        assert!(v.positive && !v.negative);
        let v = minor_eval_quant(&p, &MinorQuantifier::forall(), &x, &f("P(x)")).unwrap();
        assert!(!v.positive && v.negative);
    }

    #[test]
    fn minor_quant_undecided_instances() {
        // two members disagree on P(a) for every a, so no instance is decided
        let sig = Signature::new().with("P", 1);
        let mk = |ext: &[Elem]| {
            let mut s = Structure::new([0, 1], &sig).unwrap();
            for &e in ext {
                s.insert("P", vec![e]).unwrap();
            }
            Interpretation::new(s, Default::default()).unwrap()
        };
        let p = Perspective::nested(vec![
            Perspective::models(ModelSet::new([mk(&[0])]).unwrap()),
            Perspective::models(ModelSet::new([mk(&[1])]).unwrap()),
        ])
        .unwrap();
        // `<>P(x)` has rank 1 < 2, so it descends to both children, which
        // disagree for every a
        let g = f("(<>P(x) & <><>P(x))");
        let x = Var::new("x");
        for a in [0, 1] {
            let v = persp_eval_signed(&p.rebind(&x, a), &g).unwrap();
            assert_eq!(
                v,
                Verdict {
                    positive: false,
                    negative: false
                }
            );
        }
        let v = minor_eval_quant(&p, &MinorQuantifier::exists(), &x, &g).unwrap();
        assert_eq!(
            v,
            Verdict {
                positive: false,
                negative: false
            }
        );
        let flat = Perspective::models(ModelSet::new([mk(&[0]), mk(&[1])]).unwrap());
        assert!(matches!(
            minor_eval_quant(&flat, &MinorQuantifier::exists(), &x, &f("<><>P(x)")),
            Err(PerspError::Rank { .. })
        ));
    }

    #[test]
    fn first_take_rejects_minor() {
        let (a, _) = pq();
        assert!(matches!(
            persp_eval(&models(&[&a]), &f("<Q:exists>p")),
            Err(PerspError::NotInFragment(_))
        ));
    }
}
