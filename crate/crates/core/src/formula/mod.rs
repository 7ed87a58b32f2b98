//! Formula syntax: the AST, the text grammar, fragment classification and rank.

mod fragment;
pub(crate) mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use fragment::{classify, is_existential_variant, is_two_variable, rank, Fragment};
pub use parse::{parse, parse_infer, FormulaError};

use crate::symbol::{RelName, Symbol, Var};

/// The variable that carries the point `w` of a pointed model `(M, w)`.
/// A proposition `p` is read as the unary atom `p(x)`.
pub const POINT_VAR: &str = "x";

/// A relational signature: relation name to arity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    relations: BTreeMap<RelName, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a relation. Returns `false` (and leaves the signature unchanged)
    /// when the name is already declared with a different arity or the arity is 0.
    pub fn declare(&mut self, name: &str, arity: usize) -> bool {
        if arity == 0 {
            return false;
        }
        let name = Symbol::new(name);
        match self.relations.get(&name) {
            Some(&a) => a == arity,
            None => {
                self.relations.insert(name, arity);
                true
            }
        }
    }

    pub fn with(mut self, name: &str, arity: usize) -> Self {
        assert!(
            self.declare(name, arity),
            "conflicting declaration of {name}"
        );
        self
    }

    pub fn arity(&self, name: &RelName) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn contains(&self, name: &RelName) -> bool {
        self.relations.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RelName, usize)> {
        self.relations.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Union of two signatures; `None` on an arity clash.
    pub fn merge(&self, other: &Signature) -> Option<Signature> {
        let mut out = self.clone();
        for (name, arity) in other.iter() {
            if !out.declare(name.as_str(), arity) {
                return None;
            }
        }
        Some(out)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("sig")?;
        for (name, arity) in self.iter() {
            write!(f, " {name}/{arity}")?;
        }
        Ok(())
    }
}

/// Formula AST.
///
/// `Or`, `Impl` and `FilterImpl` are kept as explicit nodes: the model-set
/// semantics reads `Or` as `~(~a & ~b)`, while the perspective semantics
/// gives `Or` and `Impl` their own clauses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Rel(RelName, Vec<Var>),
    Eq(Var, Var),
    Prop(RelName),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Impl(Box<Formula>, Box<Formula>),
    FilterImpl(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Const(Var, Box<Formula>),
    CountExists(usize, Var, Box<Formula>),
    Diamond(Box<Formula>),
    MinorModal(Symbol, Box<Formula>),
    MinorQuant(Symbol, Var, Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn rel(name: &str, args: &[&str]) -> Formula {
        Rel(
            Symbol::new(name),
            args.iter().map(|a| Symbol::new(a)).collect(),
        )
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Eq(Symbol::new(x), Symbol::new(y))
    }

    pub fn prop(name: &str) -> Formula {
        Prop(Symbol::new(name))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Impl(Box::new(a), Box::new(b))
    }

    pub fn filter_implies(a: Formula, b: Formula) -> Formula {
        FilterImpl(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Not(Box::new(a))
    }

    pub fn exists(x: &str, a: Formula) -> Formula {
        Exists(Symbol::new(x), Box::new(a))
    }

    /// `A x. a`, which is sugar for `~E x. ~a`.
    pub fn forall(x: &str, a: Formula) -> Formula {
        Formula::not(Formula::exists(x, Formula::not(a)))
    }

    pub fn constant(x: &str, a: Formula) -> Formula {
        Const(Symbol::new(x), Box::new(a))
    }

    pub fn count_exists(k: usize, x: &str, a: Formula) -> Formula {
        CountExists(k, Symbol::new(x), Box::new(a))
    }

    pub fn diamond(a: Formula) -> Formula {
        Diamond(Box::new(a))
    }

    /// `[] a`, sugar for `~<>~a`.
    pub fn boxed(a: Formula) -> Formula {
        Formula::not(Formula::diamond(Formula::not(a)))
    }

    pub fn minor_modal(q: &str, a: Formula) -> Formula {
        MinorModal(Symbol::new(q), Box::new(a))
    }

    pub fn minor_quant(q: &str, x: &str, a: Formula) -> Formula {
        MinorQuant(Symbol::new(q), Symbol::new(x), Box::new(a))
    }

    /// `p & ~p`.
    pub fn falsum(p: &str) -> Formula {
        Formula::and(Formula::prop(p), Formula::not(Formula::prop(p)))
    }

    /// `[](~a | b)`. Unlike `=>`, this raises the rank by one.
    pub fn strict_implies(a: Formula, b: Formula) -> Formula {
        Formula::boxed(Formula::or(Formula::not(a), b))
    }

    /// `~(a -> (p & ~p))`, a diamond-like operator that keeps the rank of `a`.
    pub fn falsum_diamond(a: Formula, p: &str) -> Formula {
        Formula::not(Formula::implies(a, Formula::falsum(p)))
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Rel(..) | Eq(..) | Prop(_) => vec![],
            And(a, b) | Or(a, b) | Impl(a, b) | FilterImpl(a, b) => vec![a, b],
            Not(a) | Exists(_, a) | Const(_, a) | CountExists(_, _, a) | Diamond(a) => vec![a],
            MinorModal(_, a) | MinorQuant(_, _, a) => vec![a],
        }
    }

    /// Height of the syntax tree; atoms have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    /// Free variables. A proposition contributes the point variable.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut note = |v: &Var, bound: &Vec<Var>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Rel(_, args) => args.iter().for_each(|v| note(v, bound)),
            Eq(x, y) => {
                note(x, bound);
                note(y, bound);
            }
            Prop(_) => note(&Symbol::new(POINT_VAR), bound),
            Exists(v, a) | Const(v, a) | CountExists(_, v, a) | MinorQuant(_, v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// Every variable occurring anywhere, bound or free (including the
    /// implicit point variable of propositions).
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Rel(_, args) => out.extend(args.iter().cloned()),
            Eq(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Prop(_) => {
                out.insert(Symbol::new(POINT_VAR));
            }
            Exists(v, _) | Const(v, _) | CountExists(_, v, _) | MinorQuant(_, v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Relation symbols used, with the arity at each use (propositions are unary).
    pub fn relations(&self) -> BTreeSet<(RelName, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Rel(name, args) => {
                out.insert((name.clone(), args.len()));
            }
            Prop(name) => {
                out.insert((name.clone(), 1));
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Replaces every `C x.` by `E x.`, giving the first-order formula this
    /// one is an existential variant of.
    pub fn consts_to_exists(&self) -> Formula {
        self.map_quantifiers(&mut |_| Quantifier::Exists)
    }

    /// Rebuilds the formula, letting `f` pick the quantifier at every
    /// `E x.`/`C x.` position (visited in pre-order).
    pub fn map_quantifiers(&self, f: &mut dyn FnMut(Quantifier) -> Quantifier) -> Formula {
        let sub = |a: &Formula, f: &mut dyn FnMut(Quantifier) -> Quantifier| {
            Box::new(a.map_quantifiers(f))
        };
        match self {
            Rel(..) | Eq(..) | Prop(_) => self.clone(),
            And(a, c) => And(sub(a, f), sub(c, f)),
            Or(a, c) => Or(sub(a, f), sub(c, f)),
            Impl(a, c) => Impl(sub(a, f), sub(c, f)),
            FilterImpl(a, c) => FilterImpl(sub(a, f), sub(c, f)),
            Not(a) => Not(sub(a, f)),
            Diamond(a) => Diamond(sub(a, f)),
            MinorModal(q, a) => MinorModal(q.clone(), sub(a, f)),
            MinorQuant(q, v, a) => MinorQuant(q.clone(), v.clone(), sub(a, f)),
            CountExists(k, v, a) => CountExists(*k, v.clone(), sub(a, f)),
            Exists(v, a) | Const(v, a) => {
                let kind = if matches!(self, Exists(..)) {
                    Quantifier::Exists
                } else {
                    Quantifier::Const
                };
                let chosen = f(kind);
                let body = sub(a, f);
                match chosen {
                    Quantifier::Exists => Exists(v.clone(), body),
                    Quantifier::Const => Const(v.clone(), body),
                }
            }
        }
    }
}

/// The two quantifiers that existential variants may swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Const,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rel(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Eq(x, y) => write!(f, "{x}={y}"),
            Prop(p) => write!(f, "{p}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Impl(a, b) => write!(f, "({a} -> {b})"),
            FilterImpl(a, b) => write!(f, "({a} => {b})"),
            Not(a) => write!(f, "~{a}"),
            Diamond(a) => write!(f, "<>{a}"),
            MinorModal(q, a) => write!(f, "<Q:{q}>{a}"),
            Exists(v, a) => write!(f, "E {v}. {a}"),
            Const(v, a) => write!(f, "C {v}. {a}"),
            CountExists(k, v, a) => write!(f, "E={k} {v}. {a}"),
            MinorQuant(q, v, a) => write!(f, "Q:{q} {v}. {a}"),
        }
    }
}
