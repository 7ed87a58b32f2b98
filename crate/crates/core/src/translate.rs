//! Translation of `C x.` into a guarded first-order quantifier, and bounded
//! satisfiability search in both logics.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::eval::{check_signature, eval_fo, EvalError, Evaluator};
use crate::formula::{classify, Formula, Fragment, Signature};
use crate::model::{Elem, Interpretation, ModelSet, Structure};
use crate::symbol::{Symbol, Var};

/// Default name of the fresh domain predicate.
pub const DOMAIN_PREDICATE: &str = "__D";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("`{0}` already occurs in the formula or signature")]
    NameCollision(String),
    #[error("the formula is not in {0}")]
    NotInFragment(Fragment),
    #[error("the formula has free variables ({0}); a sentence is required")]
    NotASentence(String),
    #[error("domain size {size} gives 2^{bits} interpretations, beyond the limit of 2^{limit}")]
    SearchTooLarge {
        size: usize,
        bits: usize,
        limit: usize,
    },
}

/// `T`: homomorphic on every connective and on `E x.`; `C x. a` becomes
/// `E x. (D(x) & T(a))`.
pub fn translate(f: &Formula, d_name: &str) -> Result<Formula, SatError> {
    if !classify(f).contains(&Fragment::LCStar) {
        return Err(SatError::NotInFragment(Fragment::LCStar));
    }
    let d = Symbol::new(d_name);
    if f.relations().iter().any(|(name, _)| *name == d) {
        return Err(SatError::NameCollision(d_name.to_string()));
    }
    Ok(rewrite(f, &d))
}

fn rewrite(f: &Formula, d: &Symbol) -> Formula {
    use Formula::*;
    let r = |a: &Formula| Box::new(rewrite(a, d));
    match f {
        Rel(..) | Eq(..) | Prop(_) => f.clone(),
        And(a, b) => And(r(a), r(b)),
        Or(a, b) => Or(r(a), r(b)),
        Impl(a, b) => Impl(r(a), r(b)),
        Not(a) => Not(r(a)),
        Exists(x, a) => Exists(x.clone(), r(a)),
        Const(x, a) => Exists(
            x.clone(),
            Box::new(And(Box::new(Rel(d.clone(), vec![x.clone()])), r(a))),
        ),
        // excluded by the fragment check
        CountExists(..) | FilterImpl(..) | Diamond(_) | MinorModal(..) | MinorQuant(..) => {
            unreachable!("not in LC*")
        }
    }
}

/// `M ⊨+ f` implies `M_D ⊨+ T(f)`, for `f` in LC.
pub fn check_translation_claim(f: &Formula, m: &ModelSet) -> Result<bool, SatError> {
    if !classify(f).contains(&Fragment::LC) {
        return Err(SatError::NotInFragment(Fragment::LC));
    }
    let ev = Evaluator::default();
    if !ev.eval_pos(m, f)? {
        return Ok(true);
    }
    let md = m
        .add_domain_predicate(DOMAIN_PREDICATE)
        .map_err(|_| SatError::NameCollision(DOMAIN_PREDICATE.to_string()))?;
    Ok(ev.eval_pos(&md, &translate(f, DOMAIN_PREDICATE)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatStatus {
    SatWithinBound,
    UnknownWithinBound,
}

impl fmt::Display for SatStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SatStatus::SatWithinBound => "sat-within-bound",
            SatStatus::UnknownWithinBound => "unknown-within-bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatWitness {
    Interpretation(Interpretation),
    ModelSet(ModelSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub status: SatStatus,
    pub witness: Option<SatWitness>,
}

impl SatResult {
    fn unknown() -> Self {
        SatResult {
            status: SatStatus::UnknownWithinBound,
            witness: None,
        }
    }

    pub fn is_sat(&self) -> bool {
        self.status == SatStatus::SatWithinBound
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Return the first witness in enumeration order instead of whichever a
    /// worker finds first.
    pub deterministic: bool,
    /// Upper bound on the number of relation bits per domain size.
    pub max_bits: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            deterministic: true,
            max_bits: 24,
        }
    }
}

/// The relation symbols of `f` as a signature (propositions are unary).
pub fn signature_of(f: &Formula) -> Signature {
    let mut sig = Signature::new();
    for (name, arity) in f.relations() {
        sig.declare(name.as_str(), arity);
    }
    sig
}

/// Every tuple over `0..size` for each relation, in signature order; a
/// bitmask over this list is one interpretation of the signature.
fn tuple_slots(sig: &Signature, size: usize) -> Vec<(Symbol, Vec<Elem>)> {
    let mut out = Vec::new();
    for (name, arity) in sig.iter() {
        let count = size.pow(arity as u32);
        for code in 0..count {
            let mut t = Vec::with_capacity(arity);
            let mut c = code;
            for _ in 0..arity {
                t.push((c % size) as Elem);
                c /= size;
            }
            t.reverse();
            out.push((name.clone(), t));
        }
    }
    out
}

fn decode(sig: &Signature, domain: &[Elem], slots: &[(Symbol, Vec<Elem>)], mask: u64) -> Structure {
    let mut s = Structure::new(domain.iter().copied(), sig).expect("domain is non-empty");
    for (i, (name, t)) in slots.iter().enumerate() {
        if mask >> i & 1 == 1 {
            // slots range over 0..size, remapped onto the chosen domain
            let mapped = t.iter().map(|&e| domain[e as usize]).collect();
            s.insert(name.as_str(), mapped)
                .expect("slot fits the signature");
        }
    }
    s
}

/// Every assignment of `vars` into `0..size`, in lexicographic order.
fn assignments(vars: &[Var], size: usize) -> impl Iterator<Item = Vec<(Var, Elem)>> + '_ {
    let total = size.pow(vars.len() as u32);
    (0..total).map(move |mut code| {
        let mut out = Vec::with_capacity(vars.len());
        for v in vars.iter().rev() {
            out.push((v.clone(), (code % size) as Elem));
            code /= size;
        }
        out.reverse();
        out
    })
}

fn search<T: Send>(
    count: u64,
    deterministic: bool,
    probe: impl Fn(u64) -> Option<T> + Sync + Send,
) -> Option<T> {
    if deterministic {
        (0..count).into_par_iter().find_map_first(probe)
    } else {
        (0..count).into_par_iter().find_map_any(probe)
    }
}

/// Classical satisfiability of `f` over domains `{0..k-1}`, `k ≤ max_domain`.
pub fn bounded_fo_sat(
    f: &Formula,
    max_domain: usize,
    opts: SearchOptions,
) -> Result<SatResult, SatError> {
    if !classify(f).contains(&Fragment::FO) {
        return Err(SatError::NotInFragment(Fragment::FO));
    }
    let sig = signature_of(f);
    let vars: Vec<Var> = f.free_vars().into_iter().collect();
    for size in 1..=max_domain {
        let slots = tuple_slots(&sig, size);
        if slots.len() > opts.max_bits {
            return Err(SatError::SearchTooLarge {
                size,
                bits: slots.len(),
                limit: opts.max_bits,
            });
        }
        let domain: Vec<Elem> = (0..size as Elem).collect();
        let found = search(1u64 << slots.len(), opts.deterministic, |mask| {
            let s = std::sync::Arc::new(decode(&sig, &domain, &slots, mask));
            assignments(&vars, size).find_map(|a| {
                let i = Interpretation::shared(s.clone(), a.into_iter().collect()).ok()?;
                eval_fo(&i, f).ok()?.then_some(i)
            })
        });
        if let Some(i) = found {
            return Ok(SatResult {
                status: SatStatus::SatWithinBound,
                witness: Some(SatWitness::Interpretation(i)),
            });
        }
    }
    Ok(SatResult::unknown())
}

/// Positive satisfiability of an LC sentence by a non-empty model set of at
/// most `max_models` structures with domains of size at most `max_domain`.
///
/// Singletons are tried first, on domains `{0..k-1}`. Larger model sets draw
/// their members from structures over every non-empty subset of
/// `{0..max_domain-1}`, so that members may overlap partially.
pub fn bounded_lc_sat(
    f: &Formula,
    max_models: usize,
    max_domain: usize,
    opts: SearchOptions,
) -> Result<SatResult, SatError> {
    if !classify(f).contains(&Fragment::LC) {
        return Err(SatError::NotInFragment(Fragment::LC));
    }
    let free = f.free_vars();
    if !free.is_empty() {
        let names: Vec<&str> = free.iter().map(Symbol::as_str).collect();
        return Err(SatError::NotASentence(names.join(",")));
    }
    let sig = signature_of(f);
    let holds = |members: Vec<Interpretation>| -> Option<ModelSet> {
        let m = ModelSet::with_parts(members, BTreeSet::new(), sig.clone()).ok()?;
        Evaluator::default().eval_pos(&m, f).ok()?.then_some(m)
    };

    if max_models == 0 {
        return Ok(SatResult::unknown());
    }
    for size in 1..=max_domain {
        let slots = tuple_slots(&sig, size);
        if slots.len() > opts.max_bits {
            return Err(SatError::SearchTooLarge {
                size,
                bits: slots.len(),
                limit: opts.max_bits,
            });
        }
        let domain: Vec<Elem> = (0..size as Elem).collect();
        let found = search(1u64 << slots.len(), opts.deterministic, |mask| {
            let s = decode(&sig, &domain, &slots, mask);
            holds(vec![Interpretation::new(s, Default::default()).ok()?])
        });
        if let Some(m) = found {
            return Ok(SatResult {
                status: SatStatus::SatWithinBound,
                witness: Some(SatWitness::ModelSet(m)),
            });
        }
    }
    if max_models == 1 {
        return Ok(SatResult::unknown());
    }

    let mut pool = Vec::new();
    for dmask in 1u32..(1 << max_domain) {
        let domain: Vec<Elem> = (0..max_domain as Elem)
            .filter(|e| dmask >> e & 1 == 1)
            .collect();
        let slots = tuple_slots(&sig, domain.len());
        if slots.len() > opts.max_bits {
            return Err(SatError::SearchTooLarge {
                size: domain.len(),
                bits: slots.len(),
                limit: opts.max_bits,
            });
        }
        for mask in 0..1u64 << slots.len() {
            pool.push(
                Interpretation::new(decode(&sig, &domain, &slots, mask), Default::default())
                    .expect("no assignment"),
            );
        }
    }
    for k in 2..=max_models.min(pool.len()) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if let Some(m) = holds(idx.iter().map(|&i| pool[i].clone()).collect()) {
                return Ok(SatResult {
                    status: SatStatus::SatWithinBound,
                    witness: Some(SatWitness::ModelSet(m)),
                });
            }
            // next k-combination of 0..pool.len()
            let mut i = k;
            while i > 0 && idx[i - 1] == pool.len() - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(SatResult::unknown())
}

/// The model-set witness read off a classical witness of `T(f)`: the
/// singleton of that interpretation with the domain predicate dropped.
pub fn lc_witness_from_fo(fo_witness: &Interpretation, d_name: &str) -> Result<ModelSet, SatError> {
    let s = fo_witness.structure().without(d_name);
    let i = Interpretation::new(s, fo_witness.assignment().clone())
        .map_err(|e| SatError::NameCollision(e.to_string()))?;
    Ok(ModelSet::new([i]).expect("a singleton is consistent"))
}

/// Re-checks a search witness against the evaluator it came from.
pub fn verify_witness(f: &Formula, w: &SatWitness) -> Result<bool, SatError> {
    Ok(match w {
        SatWitness::Interpretation(i) => eval_fo(i, f)?,
        SatWitness::ModelSet(m) => {
            check_signature(m.signature(), f)?;
            !m.is_empty() && Evaluator::default().eval_pos(m, f)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_infer;

    fn f(text: &str) -> Formula {
        parse_infer(text).unwrap().0
    }

    #[test]
    fn translation_examples() {
        assert_eq!(
            translate(&f("C x. P(x)"), "D").unwrap(),
            f("E x. (D(x) & P(x))")
        );
        assert_eq!(translate(&f("E x. P(x)"), "D").unwrap(), f("E x. P(x)"));
        assert_eq!(
            translate(&f("C x. C y. R(x,y)"), "D").unwrap(),
            f("E x. (D(x) & E y. (D(y) & R(x,y)))")
        );
        assert!(matches!(
            translate(&f("C x. D(x)"), "D"),
            Err(SatError::NameCollision(_))
        ));
    }

    #[test]
    fn fo_search_examples() {
        let o = SearchOptions::default();
        assert!(!bounded_fo_sat(&f("E x. ~x=x"), 3, o).unwrap().is_sat());
        assert!(!bounded_fo_sat(&f("(P(x) & ~P(x))"), 3, o).unwrap().is_sat());
        let r = bounded_fo_sat(&f("E x. (D(x) & x=x)"), 1, o).unwrap();
        let Some(SatWitness::Interpretation(i)) = r.witness else {
            panic!()
        };
        assert_eq!(i.structure().domain(), &BTreeSet::from([0]));
        assert!(i.structure().holds(&Symbol::new("D"), &[0]));
    }

    #[test]
    fn lc_search_examples() {
        let o = SearchOptions::default();
        let r = bounded_lc_sat(&f("C x. x=x"), 1, 1, o).unwrap();
        let Some(SatWitness::ModelSet(m)) = &r.witness else {
            panic!()
        };
        assert_eq!(m.len(), 1);
        assert!(verify_witness(&f("C x. x=x"), r.witness.as_ref().unwrap()).unwrap());
        assert!(!bounded_lc_sat(&f("E x. ~x=x"), 2, 2, o).unwrap().is_sat());
        assert!(matches!(
            bounded_lc_sat(&f("P(x)"), 1, 1, o),
            Err(SatError::NotASentence(_))
        ));
    }

    #[test]
    fn multi_member_search_is_exhaustive_on_unsat_input() {
        let phi = f("(C x. P(x) & A y. ~P(y))");
        let o = SearchOptions::default();
        assert!(!bounded_lc_sat(&phi, 3, 2, o).unwrap().is_sat());
        let r = bounded_lc_sat(&f("C x. P(x)"), 3, 2, o).unwrap();
        let Some(SatWitness::ModelSet(m)) = r.witness else {
            panic!()
        };
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn claim_examples() {
        let m = crate::model::parse_model_set("sig P/1\nmodel { domain 0 1; P = 0 1 }").unwrap();
        assert!(check_translation_claim(&f("C x. P(x)"), &m).unwrap());
        assert!(check_translation_claim(&f("C x. ~P(x)"), &m).unwrap());
    }
}
