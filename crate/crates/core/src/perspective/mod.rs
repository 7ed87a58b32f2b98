//! Perspectives: rank-stratified nested sets whose bottom layer is a model
//! set of pointed models.

mod eval;
mod text;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::eval::EvalError;
use crate::formula::{rank as formula_rank, Formula, Signature};
use crate::model::{Elem, Interpretation, ModelError, ModelSet};
use crate::symbol::Var;

pub use eval::{
    filter_implies, minor_eval_modal, minor_eval_quant, persp_eval, persp_eval_signed, restrict,
    PerspEvaluator,
};
pub use text::parse_perspective;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PerspError {
    #[error("formula of rank {formula} on a perspective of rank {perspective}")]
    Rank { formula: usize, perspective: usize },
    #[error("{0} needs a regular perspective (one shared model domain)")]
    NotRegular(&'static str),
    #[error("the signed semantics needs a strongly regular perspective")]
    NotStronglyRegular,
    #[error("not supported here: {0}")]
    NotInFragment(String),
    #[error("unknown minor quantifier `{0}`")]
    UnknownQuantifier(String),
    #[error("children of a rank-{expected} perspective must have rank {}, found {found}", expected - 1)]
    ChildRank { expected: usize, found: usize },
    #[error("a perspective has rank at least 1")]
    ZeroRank,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A perspective of rank `α ≥ 1`. Rank 1 is a model set; rank `α > 1` is a
/// set of rank `α-1` perspectives, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Perspective {
    Models(ModelSet),
    Nested {
        rank: usize,
        children: Vec<Perspective>,
    },
}

impl Perspective {
    pub fn models(m: ModelSet) -> Self {
        Perspective::Models(m)
    }

    /// A rank-`α` perspective from children of rank `α-1`. An empty child
    /// list needs [`Perspective::empty`] instead, since its rank is unknown.
    pub fn nested(children: Vec<Perspective>) -> Result<Self, PerspError> {
        let rank = children.first().map_or(2, |c| c.rank() + 1);
        Self::nested_with_rank(rank, children)
    }

    pub fn nested_with_rank(
        rank: usize,
        mut children: Vec<Perspective>,
    ) -> Result<Self, PerspError> {
        if rank < 2 {
            return Err(PerspError::ZeroRank);
        }
        if let Some(c) = children.iter().find(|c| c.rank() + 1 != rank) {
            return Err(PerspError::ChildRank {
                expected: rank,
                found: c.rank(),
            });
        }
        children.sort();
        children.dedup();
        Ok(Perspective::Nested { rank, children })
    }

    /// The empty perspective of the given rank.
    pub fn empty(rank: usize, vars: BTreeSet<Var>, sig: Signature) -> Result<Self, PerspError> {
        match rank {
            0 => Err(PerspError::ZeroRank),
            1 => Ok(Perspective::Models(ModelSet::empty(vars, sig))),
            _ => Ok(Perspective::Nested {
                rank,
                children: Vec::new(),
            }),
        }
    }

    /// Wraps `self` in singletons until it has rank `rank`.
    pub fn lift(self, rank: usize) -> Self {
        let mut p = self;
        while p.rank() < rank {
            let r = p.rank() + 1;
            p = Perspective::Nested {
                rank: r,
                children: vec![p],
            };
        }
        p
    }

    pub fn rank(&self) -> usize {
        match self {
            Perspective::Models(_) => 1,
            Perspective::Nested { rank, .. } => *rank,
        }
    }

    /// Number of elements at the top level.
    pub fn len(&self) -> usize {
        match self {
            Perspective::Models(m) => m.len(),
            Perspective::Nested { children, .. } => children.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Children of a rank ≥ 2 perspective; empty at rank 1.
    pub fn children(&self) -> &[Perspective] {
        match self {
            Perspective::Models(_) => &[],
            Perspective::Nested { children, .. } => children,
        }
    }

    /// Every pointed model at the bottom level, with repetitions across
    /// branches.
    pub fn leaves(&self) -> Vec<&Interpretation> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Interpretation>) {
        match self {
            Perspective::Models(m) => out.extend(m.members()),
            Perspective::Nested { children, .. } => {
                children.iter().for_each(|c| c.collect_leaves(out))
            }
        }
    }

    /// Signature of the first model set found, if any.
    pub fn signature(&self) -> Option<&Signature> {
        match self {
            Perspective::Models(m) => Some(m.signature()),
            Perspective::Nested { children, .. } => children.iter().find_map(|c| c.signature()),
        }
    }

    /// The shared domain of every bottom-level model. `None` when two models
    /// disagree; the empty set when there are no models.
    pub fn model_domain(&self) -> Option<BTreeSet<Elem>> {
        let leaves = self.leaves();
        let Some(first) = leaves.first() else {
            return Some(BTreeSet::new());
        };
        let d = first.structure().domain();
        leaves
            .iter()
            .all(|l| l.structure().domain() == d)
            .then(|| d.clone())
    }

    pub fn is_regular(&self) -> bool {
        self.model_domain().is_some()
    }

    /// Regular, and no empty set at any level, including `self`.
    pub fn is_strongly_regular(&self) -> bool {
        fn no_empty(p: &Perspective) -> bool {
            !p.is_empty() && p.children().iter().all(no_empty)
        }
        self.is_regular() && no_empty(self)
    }

    /// `P[a/x]`: every bottom-level assignment updated at `x`. `a` must lie
    /// in every bottom-level domain.
    pub fn rebind(&self, x: &Var, a: Elem) -> Perspective {
        match self {
            Perspective::Models(m) => {
                let mut vars = m.vars().clone();
                vars.insert(x.clone());
                let members = m.members().iter().map(|i| i.rebind(x, a));
                Perspective::Models(
                    ModelSet::with_parts(members, vars, m.signature().clone())
                        .expect("rebinding keeps members uniform"),
                )
            }
            Perspective::Nested { rank, children } => Perspective::Nested {
                rank: *rank,
                children: {
                    let mut c: Vec<_> = children.iter().map(|c| c.rebind(x, a)).collect();
                    c.sort();
                    c.dedup();
                    c
                },
            },
        }
    }

    /// Keeps the top-level elements at the given indices.
    pub fn select(&self, keep: impl IntoIterator<Item = usize>) -> Perspective {
        match self {
            Perspective::Models(m) => Perspective::Models(m.subset(keep)),
            Perspective::Nested { rank, children } => Perspective::Nested {
                rank: *rank,
                children: keep.into_iter().map(|i| children[i].clone()).collect(),
            },
        }
    }

    pub(crate) fn check_rank(&self, f: &Formula) -> Result<usize, PerspError> {
        let r = formula_rank(f);
        if r > self.rank() {
            return Err(PerspError::Rank {
                formula: r,
                perspective: self.rank(),
            });
        }
        Ok(r)
    }
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::write_perspective(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Structure;

    fn pointed(p: bool, w: Elem) -> Interpretation {
        let sig = Signature::new().with("p", 1);
        let s = Structure::new([0, 1], &sig).unwrap();
        let s = if p { s.with("p", &[&[w]]).unwrap() } else { s };
        Interpretation::pointed(s, w).unwrap()
    }

    #[test]
    fn regularity() {
        let a = ModelSet::new([pointed(true, 0)]).unwrap();
        let p = Perspective::nested(vec![Perspective::models(a.clone())]).unwrap();
        assert!(p.is_strongly_regular());
        let e = Perspective::empty(1, a.vars().clone(), a.signature().clone()).unwrap();
        let q = Perspective::nested(vec![Perspective::models(a), e]).unwrap();
        assert!(q.is_regular() && !q.is_strongly_regular());
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn child_ranks_checked() {
        let a = Perspective::models(ModelSet::new([pointed(true, 0)]).unwrap());
        let b = a.clone().lift(2);
        assert_eq!(b.rank(), 2);
        assert!(Perspective::nested(vec![a, b]).is_err());
    }

    #[test]
    fn rebind_moves_the_point() {
        let p = Perspective::models(ModelSet::new([pointed(true, 0)]).unwrap());
        let q = p.rebind(&Var::new("x"), 1);
        assert_eq!(q.leaves()[0].get(&Var::new("x")), Some(1));
    }
}
