//! The positive and negative turnstiles over finite model sets, and a
//! classical single-structure evaluator that serves as their oracle.

pub(crate) mod classical;

use std::cell::Cell;
use std::fmt;

use thiserror::Error;

use crate::formula::{classify, Formula, Fragment, Signature};
use crate::model::{ChoiceFunction, Interpretation, ModelSet};
use crate::symbol::Var;
use classical::{Classical, Leaf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("{0} is not supported by this evaluator")]
    NotInFragment(String),
    #[error("relation `{0}` is not in the model signature")]
    UnknownRelation(String),
    #[error("relation `{name}` has arity {expected} in the models but is used with {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown minor quantifier `{0}`")]
    UnknownQuantifier(String),
    #[error("a split of {0} members is beyond the enumeration limit of {MAX_COVER_MEMBERS}")]
    CoverTooLarge(usize),
    #[error("existential variant disagrees with its first-order original: {0}")]
    VariantMismatch(String),
}

/// Largest model set on which the negative conjunction clause enumerates
/// splits.
pub const MAX_COVER_MEMBERS: usize = 24;

/// The pair of turnstiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Verdict {
    pub positive: bool,
    pub negative: bool,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pos={} neg={}", self.positive, self.negative)
    }
}

/// How the negative conjunction clause splits a model set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverMode {
    /// `M' ∪ M'' = M`, overlaps and empty sides allowed.
    #[default]
    ThreeWay,
    /// `M' = A`, `M'' = M ∖ A`.
    Partition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub cover: CoverMode,
    /// Evaluate `C`-free subformulas member by member (flatness).
    pub fast_path: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            cover: CoverMode::ThreeWay,
            fast_path: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// The choice that makes a verdict true at the first point where the
/// semantics makes one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A (constant) choice function for `E x.` (`C x.`), listed per member.
    Choice { var: Var, function: ChoiceFunction },
    /// A split `M' ∪ M'' = M`, as member indices.
    Cover { left: Vec<usize>, right: Vec<usize> },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Choice { var, function } => {
                let kind = if function.constant { "constant " } else { "" };
                write!(f, "{kind}choice for {var}:")?;
                for (i, a) in function.values.iter().enumerate() {
                    write!(f, " m{i}->{a}")?;
                }
                Ok(())
            }
            Witness::Cover { left, right } => {
                let show = |v: &[usize]| {
                    v.iter()
                        .map(|i| format!("m{i}"))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                write!(f, "cover left={{{}}} right={{{}}}", show(left), show(right))
            }
        }
    }
}

/// Evaluator for the model-set semantics. Keeps a count of the choice
/// functions it has examined.
#[derive(Debug, Default)]
pub struct Evaluator {
    opts: EvalOptions,
    examined: Cell<u64>,
}

type Res<T> = Result<T, EvalError>;

impl Evaluator {
    pub fn new(opts: EvalOptions) -> Self {
        Evaluator {
            opts,
            examined: Cell::new(0),
        }
    }

    pub fn options(&self) -> EvalOptions {
        self.opts
    }

    /// Choice functions examined since construction.
    pub fn examined(&self) -> u64 {
        self.examined.get()
    }

    pub fn eval_pos(&self, m: &ModelSet, f: &Formula) -> Res<bool> {
        check_input(m, f)?;
        self.sat(m, f, Sign::Pos)
    }

    pub fn eval_neg(&self, m: &ModelSet, f: &Formula) -> Res<bool> {
        check_input(m, f)?;
        self.sat(m, f, Sign::Neg)
    }

    pub fn eval(&self, m: &ModelSet, f: &Formula) -> Res<Verdict> {
        check_input(m, f)?;
        Ok(Verdict {
            positive: self.sat(m, f, Sign::Pos)?,
            negative: self.sat(m, f, Sign::Neg)?,
        })
    }

    /// The witness behind a true verdict, found at the first choice point
    /// below any leading negations. `None` when the verdict is false or no
    /// choice is involved there.
    pub fn witness(&self, m: &ModelSet, f: &Formula, sign: Sign) -> Res<Option<Witness>> {
        check_input(m, f)?;
        let mut f = f;
        let mut sign = sign;
        while let Formula::Not(a) = f {
            f = a;
            sign = sign.flip();
        }
        Ok(match (f, sign) {
            (Formula::Exists(x, a), Sign::Pos) => {
                self.choose(m, x, a, false)?
                    .map(|function| Witness::Choice {
                        var: x.clone(),
                        function,
                    })
            }
            (Formula::Const(x, a), Sign::Pos) => {
                self.choose(m, x, a, true)?.map(|function| Witness::Choice {
                    var: x.clone(),
                    function,
                })
            }
            _ => match split_of(f, sign) {
                Some((l, r)) => self.cover(m, l, r)?.map(|(a, b)| Witness::Cover {
                    left: bits(a),
                    right: bits(b),
                }),
                None => None,
            },
        })
    }

    pub(crate) fn sat(&self, m: &ModelSet, f: &Formula, sign: Sign) -> Res<bool> {
        use Formula::*;
        if self.opts.fast_path && is_const_free(f) {
            return flat(m, f, sign);
        }
        if let Some((l, r)) = split_of(f, sign) {
            return Ok(self.cover(m, l, r)?.is_some());
        }
        match (f, sign) {
            (Rel(..) | Eq(..) | Prop(_), _) => flat(m, f, sign),
            (Not(a), _) => self.sat(m, a, sign.flip()),
            (And(a, b), Sign::Pos) => Ok(self.sat(m, a, Sign::Pos)? && self.sat(m, b, Sign::Pos)?),
            // ~(~a & ~b) and ~(~~a & ~b), negated: both conjuncts hold positively
            (Or(a, b), Sign::Neg) => Ok(self.sat(m, a, Sign::Neg)? && self.sat(m, b, Sign::Neg)?),
            (Impl(a, b), Sign::Neg) => Ok(self.sat(m, a, Sign::Pos)? && self.sat(m, b, Sign::Neg)?),
            (Exists(x, a), Sign::Pos) => Ok(self.choose(m, x, a, false)?.is_some()),
            (Const(x, a), Sign::Pos) => Ok(self.choose(m, x, a, true)?.is_some()),
            (Exists(x, a), Sign::Neg) => self.sat(&m.extend_all(x), a, Sign::Neg),
            (Const(x, a), Sign::Neg) => {
                let common = m.common_domain();
                let ext = m
                    .extend_set(&common, x)
                    .expect("the common domain is a subset of itself");
                self.sat(&ext, a, Sign::Neg)
            }
            (And(..) | Or(..) | Impl(..), _) => unreachable!("handled by split_of"),
            (CountExists(..), _) => Err(EvalError::NotInFragment("`E=k`".into())),
            (FilterImpl(..) | Diamond(_) | MinorModal(..) | MinorQuant(..), _) => {
                Err(EvalError::NotInFragment("a modal operator".into()))
            }
        }
    }

    fn choose(
        &self,
        m: &ModelSet,
        x: &Var,
        body: &Formula,
        constant: bool,
    ) -> Res<Option<ChoiceFunction>> {
        for cf in m.choice_functions(constant) {
            self.examined.set(self.examined.get() + 1);
            let ext = m
                .extend_choice(&cf, x)
                .expect("enumerated choice functions are total");
            if self.sat(&ext, body, Sign::Pos)? {
                return Ok(Some(cf));
            }
        }
        Ok(None)
    }

    /// Searches for masks `(a, b)` with `a | b` covering `m`, `m[a] ⊨ l`
    /// and `m[b] ⊨ r`.
    fn cover(
        &self,
        m: &ModelSet,
        l: (&Formula, Sign),
        r: (&Formula, Sign),
    ) -> Res<Option<(u64, u64)>> {
        let n = m.len();
        if n > 0 && n < 64 && (memberwise(l.0, l.1) || memberwise(r.0, r.1)) {
            return self.cover_memberwise(m, l, r);
        }
        if n > MAX_COVER_MEMBERS {
            return Err(EvalError::CoverTooLarge(n));
        }
        let full: u64 = (1u64 << n) - 1;
        let mut left = Memo::new(n);
        let mut right = Memo::new(n);
        let test = |memo: &mut Memo, mask: u64, side: (&Formula, Sign)| -> Res<bool> {
            if let Some(v) = memo.get(mask) {
                return Ok(v);
            }
            let v = self.sat(&m.subset_mask(mask), side.0, side.1)?;
            memo.set(mask, v);
            Ok(v)
        };
        // larger left sides first; for each, right sides from the
        // complement upwards
        for a in (0..=full).rev() {
            if !test(&mut left, a, l)? {
                continue;
            }
            let rest = full & !a;
            match self.opts.cover {
                CoverMode::Partition => {
                    if test(&mut right, rest, r)? {
                        return Ok(Some((a, rest)));
                    }
                }
                CoverMode::ThreeWay => {
                    let mut extra = 0u64;
                    loop {
                        let b = rest | extra;
                        if test(&mut right, b, r)? {
                            return Ok(Some((a, b)));
                        }
                        if extra == a {
                            break;
                        }
                        extra = (extra.wrapping_sub(a)) & a;
                    }
                }
            }
        }
        Ok(None)
    }
}

impl Evaluator {
    /// The members of `m` that satisfy `side` on their own.
    fn satisfiers(&self, m: &ModelSet, side: (&Formula, Sign)) -> Res<u64> {
        let mut mask = 0;
        for i in 0..m.len() {
            if self.sat(&m.subset_mask(1 << i), side.0, side.1)? {
                mask |= 1 << i;
            }
        }
        Ok(mask)
    }

    /// [`Self::cover`] when one side holds on a set iff it holds on each
    /// member: that side takes all its satisfiers and the other side ranges
    /// over the supersets of what is left.
    fn cover_memberwise(
        &self,
        m: &ModelSet,
        l: (&Formula, Sign),
        r: (&Formula, Sign),
    ) -> Res<Option<(u64, u64)>> {
        let full: u64 = (1u64 << m.len()) - 1;
        let swap = !memberwise(l.0, l.1);
        let (fixed, free) = if swap { (r, l) } else { (l, r) };
        let sat = self.satisfiers(m, fixed)?;
        let need = full & !sat;
        let found = if memberwise(free.0, free.1) {
            let other = self.satisfiers(m, free)?;
            (need & !other == 0).then_some(other)
        } else {
            let width = sat.count_ones() as usize;
            if width > MAX_COVER_MEMBERS {
                return Err(EvalError::CoverTooLarge(width));
            }
            // subsets of `sat`, smallest first
            let mut extra = 0u64;
            loop {
                let b = need | extra;
                if self.sat(&m.subset_mask(b), free.0, free.1)? {
                    break Some(b);
                }
                if extra == sat {
                    break None;
                }
                extra = (extra.wrapping_sub(sat)) & sat;
            }
        };
        Ok(found.map(|b| {
            let (a, b) = match self.opts.cover {
                CoverMode::ThreeWay => (sat, b),
                CoverMode::Partition => (full & !b, b),
            };
            if swap {
                (b, a)
            } else {
                (a, b)
            }
        }))
    }
}

/// Whether the clause for `(f, sign)` holds on a model set exactly when it
/// holds on every member: literals, and the connectives that do not split.
fn memberwise(f: &Formula, sign: Sign) -> bool {
    match (f, sign) {
        (Formula::Rel(..) | Formula::Eq(..) | Formula::Prop(_), _) => true,
        (Formula::Not(a), _) => memberwise(a, sign.flip()),
        (Formula::And(a, b), Sign::Pos) | (Formula::Or(a, b), Sign::Neg) => {
            memberwise(a, sign) && memberwise(b, sign)
        }
        (Formula::Impl(a, b), Sign::Neg) => memberwise(a, Sign::Pos) && memberwise(b, Sign::Neg),
        _ => false,
    }
}

/// A subformula with the turnstile it is checked under.
type Side<'a> = (&'a Formula, Sign);

/// The two sides of a clause that splits the model set, if `(f, sign)` is
/// one: negative conjunction, and positive disjunction and implication read
/// through `~(~a & ~b)` and `~a | b`.
fn split_of(f: &Formula, sign: Sign) -> Option<(Side<'_>, Side<'_>)> {
    match (f, sign) {
        (Formula::And(a, b), Sign::Neg) => Some(((a, Sign::Neg), (b, Sign::Neg))),
        (Formula::Or(a, b), Sign::Pos) => Some(((a, Sign::Pos), (b, Sign::Pos))),
        (Formula::Impl(a, b), Sign::Pos) => Some(((a, Sign::Neg), (b, Sign::Pos))),
        _ => None,
    }
}

struct Memo(Vec<u8>);

impl Memo {
    fn new(n: usize) -> Self {
        Memo(vec![0; 1usize << n])
    }
    fn get(&self, mask: u64) -> Option<bool> {
        match self.0[mask as usize] {
            0 => None,
            v => Some(v == 2),
        }
    }
    fn set(&mut self, mask: u64, v: bool) {
        self.0[mask as usize] = 1 + v as u8;
    }
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

fn is_const_free(f: &Formula) -> bool {
    let mut ok = true;
    f.visit(&mut |g| ok &= !matches!(g, Formula::Const(..)));
    ok
}

/// Member-wise classical evaluation: the positive verdict needs every member
/// to satisfy `f`, the negative one every member to falsify it.
fn flat(m: &ModelSet, f: &Formula, sign: Sign) -> Res<bool> {
    for i in m.members() {
        let truth = Classical::new(i, Leaf::Fo).holds(f)?;
        if truth != (sign == Sign::Pos) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn check_signature(sig: &Signature, f: &Formula) -> Res<()> {
    for (name, arity) in f.relations() {
        match sig.arity(&name) {
            None => return Err(EvalError::UnknownRelation(name.to_string())),
            Some(expected) if expected != arity => {
                return Err(EvalError::ArityMismatch {
                    name: name.to_string(),
                    expected,
                    found: arity,
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

fn check_input(m: &ModelSet, f: &Formula) -> Res<()> {
    if !classify(f).contains(&Fragment::LCStar) {
        let what = if classify(f).contains(&Fragment::FO) {
            "`E=k`"
        } else {
            "a modal operator"
        };
        return Err(EvalError::NotInFragment(what.into()));
    }
    check_signature(m.signature(), f)?;
    if let Some(v) = f.free_vars().iter().find(|v| !m.vars().contains(v)) {
        return Err(EvalError::UnboundVariable(v.to_string()));
    }
    Ok(())
}

/// Classical truth of a first-order formula (counting quantifiers allowed).
pub fn eval_fo(i: &Interpretation, f: &Formula) -> Res<bool> {
    if !classify(f).contains(&Fragment::FO) {
        return Err(EvalError::NotInFragment(
            "a non-first-order construct".into(),
        ));
    }
    check_signature(&i.structure().signature(), f)?;
    if let Some(v) = f
        .free_vars()
        .iter()
        .find(|v| !i.assignment().contains_key(v))
    {
        return Err(EvalError::UnboundVariable(v.to_string()));
    }
    Classical::new(i, Leaf::Fo).holds(f)
}

/// `M ⊨+ f` with the default options.
pub fn eval_pos(m: &ModelSet, f: &Formula) -> Res<bool> {
    Evaluator::default().eval_pos(m, f)
}

/// `M ⊨- f` with the default options.
pub fn eval_neg(m: &ModelSet, f: &Formula) -> Res<bool> {
    Evaluator::default().eval_neg(m, f)
}

/// Both turnstiles on `{i}` for an existential variant `f` of a first-order
/// formula, cross-checked against classical truth of that formula.
pub fn eval_variant_singleton(i: &Interpretation, f: &Formula) -> Res<Verdict> {
    let original = f.consts_to_exists();
    let truth = eval_fo(i, &original)?;
    let m = ModelSet::new([i.clone()]).expect("a singleton is consistent");
    let ev = Evaluator::new(EvalOptions {
        fast_path: false,
        ..EvalOptions::default()
    });
    let v = ev.eval(&m, f)?;
    if v.positive != truth || v.negative == truth {
        return Err(EvalError::VariantMismatch(format!(
            "{v} for `{f}`, classical truth {truth} for `{original}`"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_infer;
    use crate::model::{parse_model_set, Structure};
    use crate::symbol::Symbol;
    use std::collections::{BTreeMap, BTreeSet};

    fn f(text: &str) -> Formula {
        parse_infer(text).unwrap().0
    }

    fn disjoint() -> ModelSet {
        parse_model_set("sig P/1\nmodel { domain 0 }\nmodel { domain 1 }").unwrap()
    }

    fn slow() -> Evaluator {
        Evaluator::new(EvalOptions {
            fast_path: false,
            ..EvalOptions::default()
        })
    }

    #[test]
    fn disjoint_domains_disjunction() {
        let m = disjoint();
        let cx = f("C x. x=x");
        assert!(!eval_pos(&m, &cx).unwrap());
        let or = Formula::or(cx.clone(), cx.clone());
        let expanded = Formula::not(Formula::and(Formula::not(cx.clone()), Formula::not(cx)));
        assert!(eval_pos(&m, &or).unwrap());
        assert!(eval_pos(&m, &expanded).unwrap());
        // the disjunction also holds negatively: neither disjunct can be
        // refuted with a nonempty common domain
        assert!(eval_neg(&m, &or).unwrap());
    }

    #[test]
    fn atoms_and_empty_set() {
        let empty = ModelSet::empty(
            BTreeSet::from([Symbol::new("x")]),
            Signature::new().with("R", 1),
        );
        assert!(eval_pos(&empty, &f("R(x)")).unwrap());
        assert!(eval_neg(&empty, &f("R(x)")).unwrap());
        assert!(eval_pos(&empty, &f("C y. R(y)")).unwrap());
        let m = parse_model_set("sig R/2\nmodel { domain 0 1; R = (0,1); assign x=1 y=0 }\nmodel { domain 0 1; assign x=0 y=0 }").unwrap();
        assert!(eval_neg(&m, &f("R(x,y)")).unwrap());
        assert!(!eval_pos(&m, &f("R(x,y)")).unwrap());
    }

    #[test]
    fn empty_common_domain_refutes_constants() {
        let m = disjoint();
        assert!(eval_neg(&m, &f("C x. P(x)")).unwrap());
        assert!(eval_neg(&m, &f("C x. x=x")).unwrap());
    }

    #[test]
    fn singleton_matches_classical() {
        let m = parse_model_set("sig P/1\nmodel { domain 0 1; P = 1 }").unwrap();
        let i = &m.members()[0];
        for text in [
            "E x. P(x)",
            "A x. P(x)",
            "E x. ~P(x)",
            "(E x. P(x) & A y. P(y))",
        ] {
            let phi = f(text);
            let truth = eval_fo(i, &phi).unwrap();
            let v = slow().eval(&m, &phi).unwrap();
            assert_eq!((v.positive, v.negative), (truth, !truth), "{text}");
        }
    }

    #[test]
    fn variant_examples() {
        let m = parse_model_set("sig P/1\nmodel { domain 0 1 }").unwrap();
        let i = &m.members()[0];
        let v = eval_variant_singleton(i, &f("C x. x=x")).unwrap();
        assert!(v.positive && !v.negative);
        let v = eval_variant_singleton(i, &f("C x. P(x)")).unwrap();
        assert!(!v.positive && v.negative);
    }

    #[test]
    fn choice_function_count_when_exhausted() {
        let m = parse_model_set("sig P/1\nmodel { domain 0 1 }\nmodel { domain 0 1 2 }").unwrap();
        let ev = slow();
        assert!(!ev.eval_pos(&m, &f("E x. ~x=x")).unwrap());
        assert_eq!(ev.examined() as u128, m.choice_function_count());
    }

    #[test]
    fn partition_and_cover_differ() {
        // ~(Cx P(x) & Cx Q(x)) needs an overlapping split here
        let m = parse_model_set(
            "sig P/1 Q/1\n\
             model { domain 0 1; P = 1; Q = 0 }\n\
             model { domain 0 }\n\
             model { domain 0 2; P = 0; Q = 2 }",
        )
        .unwrap();
        let phi = f("(C x. P(x) & C x. Q(x))");
        let three = Evaluator::default();
        let part = Evaluator::new(EvalOptions {
            cover: CoverMode::Partition,
            ..EvalOptions::default()
        });
        assert!(three.eval_neg(&m, &phi).unwrap());
        assert!(!part.eval_neg(&m, &phi).unwrap());
        let w = three.witness(&m, &phi, Sign::Neg).unwrap().unwrap();
        let Witness::Cover { left, right } = w else {
            panic!()
        };
        let l: BTreeSet<_> = left.into_iter().collect();
        let r: BTreeSet<_> = right.into_iter().collect();
        assert!(!l.is_disjoint(&r));
    }

    #[test]
    fn witness_for_choice() {
        let m =
            parse_model_set("sig P/1\nmodel { domain 0 1; P = 1 }\nmodel { domain 0 1; P = 0 }")
                .unwrap();
        let w = Evaluator::default()
            .witness(&m, &f("E x. P(x)"), Sign::Pos)
            .unwrap()
            .unwrap();
        let Witness::Choice { function, .. } = w else {
            panic!()
        };
        let ext = m.extend_choice(&function, &Symbol::new("x")).unwrap();
        assert!(eval_pos(&ext, &f("P(x)")).unwrap());
        assert!(Evaluator::default()
            .witness(&m, &f("C x. P(x)"), Sign::Pos)
            .unwrap()
            .is_none());
    }

    #[test]
    fn eval_fo_examples() {
        let s = Structure::new([0, 1], &Signature::new().with("R", 2))
            .unwrap()
            .with("R", &[&[0, 1]])
            .unwrap();
        let mut a = BTreeMap::new();
        a.insert(Symbol::new("x"), 0);
        a.insert(Symbol::new("y"), 1);
        let i = Interpretation::new(s, a).unwrap();
        assert!(eval_fo(&i, &f("R(x,y)")).unwrap());
        assert!(eval_fo(&i, &f("E=1 y. R(x,y)")).unwrap());
        assert!(!eval_fo(&i, &f("E=2 y. R(x,y)")).unwrap());
        assert!(eval_fo(&i, &f("x=x")).unwrap());
        assert!(matches!(
            eval_fo(&i, &f("R(x,z)")),
            Err(EvalError::UnboundVariable(_))
        ));
        assert!(matches!(
            eval_fo(&i, &f("C x. x=x")),
            Err(EvalError::NotInFragment(_))
        ));
    }

    #[test]
    fn rejects_out_of_fragment_and_unbound() {
        let m = disjoint();
        assert!(eval_pos(&m, &f("<>P(x)")).is_err());
        assert!(matches!(
            eval_pos(&m, &f("P(x)")),
            Err(EvalError::UnboundVariable(_))
        ));
        assert!(matches!(
            eval_pos(&m, &f("E x. Q(x)")),
            Err(EvalError::UnknownRelation(_))
        ));
    }
}
