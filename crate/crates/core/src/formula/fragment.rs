use std::collections::BTreeSet;

use super::{Formula, POINT_VAR};
use Formula::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    /// Classical first-order logic, counting quantifiers included.
    FO,
    /// `C x.` allowed, but never in the scope of a negation (`~`, `|`, `->`
    /// and `A x.` all count as negation).
    LC,
    /// `C x.` allowed anywhere.
    LCStar,
    /// Modal formulas over proposition symbols only.
    ModalProp,
    /// Modal formulas with first-order atoms and quantifiers.
    ModalFO,
}

impl std::fmt::Display for Fragment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Fragment::FO => "FO",
            Fragment::LC => "LC",
            Fragment::LCStar => "LC*",
            Fragment::ModalProp => "ModalProp",
            Fragment::ModalFO => "ModalFO",
        })
    }
}

#[derive(Default)]
struct Census {
    consts: bool,
    const_under_negation: bool,
    counting: bool,
    modal: bool,
    quantifier: bool,
    first_order_atom: bool,
}

fn survey(f: &Formula, negated: bool, c: &mut Census) {
    match f {
        Rel(..) | Eq(..) => c.first_order_atom = true,
        Prop(_) => {}
        Const(..) => {
            c.consts = true;
            c.quantifier = true;
            c.const_under_negation |= negated;
        }
        Exists(..) => c.quantifier = true,
        CountExists(..) => {
            c.counting = true;
            c.quantifier = true;
        }
        MinorQuant(..) => {
            c.modal = true;
            c.quantifier = true;
        }
        Diamond(_) | MinorModal(..) | FilterImpl(..) => c.modal = true,
        And(..) => {}
        Not(_) | Or(..) | Impl(..) => {}
    }
    let below = negated || matches!(f, Not(_) | Or(..) | Impl(..));
    for child in f.children() {
        survey(child, below, c);
    }
}

/// All fragments `f` belongs to.
pub fn classify(f: &Formula) -> BTreeSet<Fragment> {
    let mut c = Census::default();
    survey(f, false, &mut c);
    let mut out = BTreeSet::new();
    if c.modal {
        if !c.consts && !c.counting {
            out.insert(Fragment::ModalFO);
            if !c.quantifier && !c.first_order_atom {
                out.insert(Fragment::ModalProp);
            }
        }
        return out;
    }
    if !c.consts {
        out.insert(Fragment::FO);
    }
    if !c.counting {
        out.insert(Fragment::LCStar);
        if !c.const_under_negation {
            out.insert(Fragment::LC);
        }
    }
    out
}

/// Modal rank: nesting depth of `<>` and `<Q:..>`. Quantifiers and `=>` do
/// not add to the rank.
pub fn rank(f: &Formula) -> usize {
    match f {
        Diamond(a) | MinorModal(_, a) => rank(a) + 1,
        _ => f.children().into_iter().map(rank).max().unwrap_or(0),
    }
}

/// True iff the only variables occurring in `f` are `x` and `y`.
pub fn is_two_variable(f: &Formula) -> bool {
    f.all_vars()
        .iter()
        .all(|v| v.as_str() == POINT_VAR || v.as_str() == "y")
}

/// True iff `a` and `b` differ at most by swapping `E v.` and `C v.`.
pub fn is_existential_variant(a: &Formula, b: &Formula) -> bool {
    match (a, b) {
        (Exists(v, p) | Const(v, p), Exists(w, q) | Const(w, q)) => {
            v == w && is_existential_variant(p, q)
        }
        (Rel(..), _) | (Eq(..), _) | (Prop(_), _) => a == b,
        (And(a1, a2), And(b1, b2))
        | (Or(a1, a2), Or(b1, b2))
        | (Impl(a1, a2), Impl(b1, b2))
        | (FilterImpl(a1, a2), FilterImpl(b1, b2)) => {
            is_existential_variant(a1, b1) && is_existential_variant(a2, b2)
        }
        (Not(p), Not(q)) | (Diamond(p), Diamond(q)) => is_existential_variant(p, q),
        (CountExists(k, v, p), CountExists(l, w, q)) => {
            k == l && v == w && is_existential_variant(p, q)
        }
        (MinorModal(s, p), MinorModal(t, q)) => s == t && is_existential_variant(p, q),
        (MinorQuant(s, v, p), MinorQuant(t, w, q)) => {
            s == t && v == w && is_existential_variant(p, q)
        }
        _ => false,
    }
}
