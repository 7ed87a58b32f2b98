//! Labeled model counting by brute force, and two closed-form enumeration
//! functions to compare against.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::eval::{
    check_signature,
    classical::{Classical, Leaf},
    EvalError,
};
use crate::formula::{classify, parse_infer, Formula, Fragment, Signature};
use crate::model::{Elem, Interpretation, ModelSet, Structure};
use crate::symbol::Symbol;
use crate::translate::signature_of;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("counting needs a first-order sentence")]
    NotAnFoSentence,
    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("n must be at least 1")]
    ZeroSize,
}

/// Largest `n` for relation-space enumeration by default.
pub const RELATION_CAP: usize = 4;
/// Largest `n` for function-space enumeration by default.
pub const FUNCTION_CAP: usize = 7;

/// `∀x∀y (Rxy → Ryx)`.
pub fn phi_symmetric() -> Formula {
    parse_infer("A x. A y. (R(x,y) -> R(y,x))")
        .expect("fixed text")
        .0
}

/// `∀x∀y ¬(Rxy ∧ Ryx) ∧ ∀x ∃^{=1}y Rxy`: the graphs of anti-involutive
/// functions.
pub fn phi_anti_involutive() -> Formula {
    parse_infer("(A x. A y. ~(R(x,y) & R(y,x)) & A x. E=1 y. R(x,y))")
        .expect("fixed text")
        .0
}

fn slots(sig: &Signature, n: usize) -> Vec<(Symbol, Vec<Elem>)> {
    let mut out = Vec::new();
    for (name, arity) in sig.iter() {
        for code in 0..n.pow(arity as u32) {
            let mut t = vec![0; arity];
            let mut c = code;
            for slot in t.iter_mut().rev() {
                *slot = (c % n) as Elem;
                c /= n;
            }
            out.push((name.clone(), t));
        }
    }
    out
}

fn structure(sig: &Signature, n: usize, slots: &[(Symbol, Vec<Elem>)], mask: u64) -> Structure {
    let mut s = Structure::new(0..n as Elem, sig).expect("n ≥ 1");
    for (i, (name, t)) in slots.iter().enumerate() {
        if mask >> i & 1 == 1 {
            s.insert(name.as_str(), t.clone()).expect("slot fits");
        }
    }
    s
}

fn check_sentence(f: &Formula) -> Result<Signature, CountError> {
    if !classify(f).contains(&Fragment::FO) || !f.free_vars().is_empty() {
        return Err(CountError::NotAnFoSentence);
    }
    let sig = signature_of(f);
    check_signature(&sig, f)?;
    Ok(sig)
}

/// Structures on `{0..n-1}` satisfying `f`, counted over every interpretation
/// of its relation symbols.
pub fn count_models(f: &Formula, n: usize) -> Result<BigUint, CountError> {
    count_models_capped(f, n, RELATION_CAP)
}

pub fn count_models_capped(f: &Formula, n: usize, cap: usize) -> Result<BigUint, CountError> {
    if n == 0 {
        return Err(CountError::ZeroSize);
    }
    if n > cap {
        return Err(CountError::CapExceeded { n, cap });
    }
    let sig = check_sentence(f)?;
    let slots = slots(&sig, n);
    if slots.len() >= 64 {
        return Err(CountError::CapExceeded { n, cap });
    }
    let count: u64 = (0..1u64 << slots.len())
        .into_par_iter()
        .map(|mask| -> Result<u64, EvalError> {
            let i = Interpretation::new(structure(&sig, n, &slots, mask), Default::default())
                .expect("no assignment");
            Ok(Classical::new(&i, Leaf::Fo).holds(f)? as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(BigUint::from(count))
}

/// The model set of all structures on `{0..n-1}` satisfying the sentence `f`.
pub fn model_set_of(f: &Formula, n: usize) -> Result<ModelSet, CountError> {
    if n == 0 {
        return Err(CountError::ZeroSize);
    }
    if n > RELATION_CAP {
        return Err(CountError::CapExceeded {
            n,
            cap: RELATION_CAP,
        });
    }
    let sig = check_sentence(f)?;
    let slots = slots(&sig, n);
    let mut members = Vec::new();
    for mask in 0..1u64 << slots.len() {
        let i = Interpretation::new(structure(&sig, n, &slots, mask), Default::default())
            .expect("no assignment");
        if Classical::new(&i, Leaf::Fo).holds(f)? {
            members.push(i);
        }
    }
    Ok(ModelSet::with_parts(members, BTreeSet::new(), sig).expect("uniform members"))
}

fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `2^(C(n,2) + n)`, the number of symmetric binary relations on `n` points.
pub fn closed_form_symmetric(n: usize) -> BigUint {
    let n = n as u64;
    BigUint::one() << (n * n.saturating_sub(1) / 2 + n)
}

/// `Σ_{i=0}^{⌊n/2⌋} (-1)^i (n-1)^{n-2i} C(n,2i) (2i)! / (2^i i!)`, with
/// `0^0 = 1`.
pub fn closed_form_anti_involutive(n: usize) -> BigUint {
    let n = n as u64;
    let mut sum = BigInt::zero();
    for i in 0..=n / 2 {
        // (2i)!/(2^i i!) counts perfect matchings of 2i points
        let matchings = factorial(2 * i) / ((BigUint::one() << i) * factorial(i));
        let power = num_traits::pow(BigUint::from(n.saturating_sub(1)), (n - 2 * i) as usize);
        let term = BigInt::from(power * binomial(n, 2 * i) * matchings);
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    assert!(!sum.is_negative(), "a count is never negative");
    sum.to_biguint().expect("non-negative")
}

/// Functions `f: n → n` with `f(f(x)) ≠ x` for every `x`, by enumerating all
/// `n^n` of them.
pub fn count_functions_anti_involutive(n: usize) -> Result<BigUint, CountError> {
    count_functions_anti_involutive_capped(n, FUNCTION_CAP)
}

pub fn count_functions_anti_involutive_capped(n: usize, cap: usize) -> Result<BigUint, CountError> {
    if n == 0 {
        return Err(CountError::ZeroSize);
    }
    if n > cap {
        return Err(CountError::CapExceeded { n, cap });
    }
    let total = (n as u64).pow(n as u32);
    let count: u64 = (0..total)
        .into_par_iter()
        .filter(|&code| {
            let mut f = [0usize; 16];
            let mut c = code;
            for slot in f.iter_mut().take(n) {
                *slot = (c % n as u64) as usize;
                c /= n as u64;
            }
            (0..n).all(|x| f[f[x]] != x)
        })
        .count() as u64;
    Ok(BigUint::from(count))
}

/// One row of a count comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub n: usize,
    pub brute: BigUint,
    pub closed: Option<BigUint>,
}

impl CountReport {
    pub fn matches(&self) -> Option<bool> {
        self.closed.as_ref().map(|c| *c == self.brute)
    }
}

impl fmt::Display for CountReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let closed = self
            .closed
            .as_ref()
            .map_or("-".to_string(), |c| c.to_string());
        let matched = self.matches().map_or("-".to_string(), |m| m.to_string());
        write!(f, "{}\t{}\t{}\t{}", self.n, self.brute, closed, matched)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    Symmetric,
    AntiInvolutive,
}

impl ClosedForm {
    pub fn eval(self, n: usize) -> BigUint {
        match self {
            ClosedForm::Symmetric => closed_form_symmetric(n),
            ClosedForm::AntiInvolutive => closed_form_anti_involutive(n),
        }
    }
}

pub fn report(
    f: &Formula,
    n: usize,
    closed: Option<ClosedForm>,
) -> Result<CountReport, CountError> {
    Ok(CountReport {
        n,
        brute: count_models(f, n)?,
        closed: closed.map(|c| c.eval(n)),
    })
}

/// Convenience for tests and tables.
pub fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: symmetric relations as subsets of the n(n+1)/2
    /// unordered pairs (loops included) counted by direct bit enumeration
    /// over all n^2-bit relations.
    fn symmetric_by_bits(n: usize) -> u64 {
        (0u64..1 << (n * n))
            .filter(|r| {
                (0..n).all(|i| (0..n).all(|j| (r >> (i * n + j) & 1) == (r >> (j * n + i) & 1)))
            })
            .count() as u64
    }

    #[test]
    fn symmetric_counts() {
        for (n, expected) in [(1, 2u64), (2, 8), (3, 64)] {
            assert_eq!(
                to_u64(&count_models(&phi_symmetric(), n).unwrap()),
                Some(expected)
            );
            assert_eq!(to_u64(&closed_form_symmetric(n)), Some(expected));
            assert_eq!(symmetric_by_bits(n), expected);
        }
    }

    #[test]
    fn anti_involutive_small_values() {
        assert_eq!(to_u64(&closed_form_anti_involutive(1)), Some(0));
        assert_eq!(to_u64(&closed_form_anti_involutive(2)), Some(0));
        assert_eq!(to_u64(&closed_form_anti_involutive(3)), Some(2));
        assert_eq!(to_u64(&closed_form_anti_involutive(4)), Some(30));
        assert_eq!(
            to_u64(&count_functions_anti_involutive(3).unwrap()),
            Some(2)
        );
        assert_eq!(
            to_u64(&count_functions_anti_involutive(4).unwrap()),
            Some(30)
        );
        assert_eq!(
            to_u64(&count_models(&phi_anti_involutive(), 3).unwrap()),
            Some(2)
        );
    }

    #[test]
    fn contradiction_has_no_models() {
        let f = parse_infer("E x. ~x=x").unwrap().0;
        assert_eq!(to_u64(&count_models(&f, 3).unwrap()), Some(0));
    }

    #[test]
    fn caps_and_errors() {
        assert!(matches!(
            count_models(&phi_symmetric(), 5),
            Err(CountError::CapExceeded { .. })
        ));
        assert!(count_functions_anti_involutive(8).is_err());
        let open = parse_infer("R(x,y)").unwrap().0;
        assert!(matches!(
            count_models(&open, 2),
            Err(CountError::NotAnFoSentence)
        ));
    }

    #[test]
    fn model_set_of_symmetric() {
        let m = model_set_of(&phi_symmetric(), 2).unwrap();
        assert_eq!(m.len(), 8);
        assert!(crate::eval::eval_pos(&m, &phi_symmetric()).unwrap());
    }

    #[test]
    fn report_row() {
        let r = report(&phi_anti_involutive(), 3, Some(ClosedForm::AntiInvolutive)).unwrap();
        assert_eq!(r.to_string(), "3\t2\t2\ttrue");
    }
}
