//! Tarskian evaluation in a single structure.

use crate::formula::{Formula, POINT_VAR};
use crate::model::{Elem, Interpretation, Structure};
use crate::quantifier::Quantifiers;
use crate::symbol::{Symbol, Var};

use super::EvalError;

/// What a single-structure evaluation accepts beyond first-order logic.
#[derive(Clone, Copy)]
pub(crate) enum Leaf<'q> {
    /// Plain first-order logic with counting quantifiers.
    Fo,
    /// Leaves of a perspective: `=>` is material implication and `Q x.` is
    /// read through its base quantifier.
    Kripke(&'q Quantifiers),
}

pub(crate) struct Classical<'a> {
    structure: &'a Structure,
    env: Vec<(Var, Elem)>,
    leaf: Leaf<'a>,
    point: Symbol,
}

impl<'a> Classical<'a> {
    pub fn new(i: &'a Interpretation, leaf: Leaf<'a>) -> Self {
        Classical {
            structure: i.structure(),
            env: i
                .assignment()
                .iter()
                .map(|(v, a)| (v.clone(), *a))
                .collect(),
            leaf,
            point: Symbol::new(POINT_VAR),
        }
    }

    fn lookup(&self, v: &Var) -> Result<Elem, EvalError> {
        self.env
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, a)| *a)
            .ok_or_else(|| EvalError::UnboundVariable(v.to_string()))
    }

    fn with<T>(&mut self, v: &Var, a: Elem, f: impl FnOnce(&mut Self) -> T) -> T {
        self.env.push((v.clone(), a));
        let out = f(self);
        self.env.pop();
        out
    }

    fn count(&mut self, v: &Var, body: &Formula, stop_after: usize) -> Result<usize, EvalError> {
        let mut hits = 0;
        for &a in self.structure.domain() {
            if self.with(v, a, |c| c.holds(body))? {
                hits += 1;
                if hits >= stop_after {
                    break;
                }
            }
        }
        Ok(hits)
    }

    pub fn holds(&mut self, f: &Formula) -> Result<bool, EvalError> {
        use Formula::*;
        Ok(match f {
            Rel(name, args) => {
                let vals = args
                    .iter()
                    .map(|v| self.lookup(v))
                    .collect::<Result<smallvec::SmallVec<[Elem; 4]>, _>>()?;
                self.structure.holds(name, &vals)
            }
            Eq(x, y) => self.lookup(x)? == self.lookup(y)?,
            Prop(p) => {
                let w = self.lookup(&self.point.clone())?;
                self.structure.holds(p, &[w])
            }
            And(a, b) => self.holds(a)? && self.holds(b)?,
            Or(a, b) => self.holds(a)? || self.holds(b)?,
            Impl(a, b) => !self.holds(a)? || self.holds(b)?,
            Not(a) => !self.holds(a)?,
            Exists(v, a) => self.count(v, a, 1)? >= 1,
            CountExists(k, v, a) => self.count(v, a, k + 1)? == *k,
            FilterImpl(a, b) => match self.leaf {
                Leaf::Kripke(_) => !self.holds(a)? || self.holds(b)?,
                Leaf::Fo => return Err(EvalError::NotInFragment("`=>`".into())),
            },
            MinorQuant(q, v, a) => match self.leaf {
                Leaf::Kripke(qs) => {
                    let quant = qs
                        .get(q)
                        .ok_or_else(|| EvalError::UnknownQuantifier(q.to_string()))?;
                    let n = self.structure.domain().len();
                    let s = self.count(v, a, usize::MAX)?;
                    (quant.base)(n, s)
                }
                Leaf::Fo => return Err(EvalError::NotInFragment("`Q:`".into())),
            },
            Const(..) => return Err(EvalError::NotInFragment("`C x.`".into())),
            Diamond(_) | MinorModal(..) => {
                return Err(EvalError::NotInFragment("a modal operator".into()))
            }
        })
    }
}
