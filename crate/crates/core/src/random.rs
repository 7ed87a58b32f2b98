//! Seeded generators for formulas, model sets and perspectives.
//!
//! Every generator draws from one `ChaCha8Rng`, so a seed fixes the whole
//! stream of cases.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Signature};
use crate::model::{Elem, Interpretation, ModelSet, Structure};
use crate::perspective::Perspective;
use crate::symbol::{Symbol, Var};

/// Variables that may occur free in generated first-order formulas.
pub const FREE_VARS: [&str; 2] = ["x", "y"];
/// Variables generated quantifiers may bind.
pub const BOUND_VARS: [&str; 3] = ["x", "y", "z"];
/// Elements domains are drawn from.
pub const ELEMENTS: Elem = 4;

/// `P/1 R/2`, the signature of generated first-order formulas.
pub fn fo_signature() -> Signature {
    Signature::new().with("P", 1).with("R", 2)
}

/// `p/1 q/1`, the signature of generated modal formulas.
pub fn modal_signature() -> Signature {
    Signature::new().with("p", 1).with("q", 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Consts {
    None,
    /// `C x.` only outside negations.
    Positive,
    Anywhere,
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A generator on its own stream of `seed`, so that independent users of
    /// one seed do not share draws.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Gen { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A first-order formula over `P/1 R/2` of depth at most `depth`, with
    /// free variables among `x`, `y`.
    pub fn fo_formula(&mut self, depth: usize) -> Formula {
        self.formula(depth, Consts::None, false, &mut Vec::new())
    }

    /// An LC formula: `C x.` occurs, but never in the scope of `~`, `|`, `->`
    /// or `A x.`.
    pub fn lc_formula(&mut self, depth: usize) -> Formula {
        self.formula(depth, Consts::Positive, false, &mut Vec::new())
    }

    /// An LC* formula: `C x.` anywhere.
    pub fn lcstar_formula(&mut self, depth: usize) -> Formula {
        self.formula(depth, Consts::Anywhere, false, &mut Vec::new())
    }

    /// An LC sentence: an LC formula of the given depth with its free
    /// variables closed by `E` or `C`.
    pub fn lc_sentence(&mut self, depth: usize) -> Formula {
        let body = self.lc_formula(depth);
        body.free_vars().into_iter().rev().fold(body, |f, v| {
            if self.rng.gen_bool(0.5) {
                Formula::constant(v.as_str(), f)
            } else {
                Formula::exists(v.as_str(), f)
            }
        })
    }

    /// A random existential variant of `f`: each `E`/`C` position keeps or
    /// swaps its quantifier with probability 1/2.
    pub fn variant(&mut self, f: &Formula) -> Formula {
        use crate::formula::Quantifier;
        f.map_quantifiers(&mut |_| {
            if self.rng.gen_bool(0.5) {
                Quantifier::Const
            } else {
                Quantifier::Exists
            }
        })
    }

    fn var(&mut self, bound: &[Var]) -> Var {
        let mut pool: Vec<Var> = FREE_VARS.iter().map(|v| Symbol::new(v)).collect();
        pool.extend(bound.iter().cloned());
        pool.choose(&mut self.rng).expect("non-empty pool").clone()
    }

    fn atom(&mut self, bound: &[Var]) -> Formula {
        match self.rng.gen_range(0..3) {
            0 => Formula::Rel(Symbol::new("P"), vec![self.var(bound)]),
            1 => Formula::Rel(Symbol::new("R"), vec![self.var(bound), self.var(bound)]),
            _ => Formula::Eq(self.var(bound), self.var(bound)),
        }
    }

    fn formula(
        &mut self,
        depth: usize,
        consts: Consts,
        negated: bool,
        bound: &mut Vec<Var>,
    ) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.atom(bound);
        }
        let const_ok = match consts {
            Consts::None => false,
            Consts::Positive => !negated,
            Consts::Anywhere => true,
        };
        loop {
            let pick = self.rng.gen_range(0..8);
            return match pick {
                0 => Formula::not(self.formula(depth - 1, consts, true, bound)),
                1 => {
                    let a = self.formula(depth - 1, consts, negated, bound);
                    Formula::and(a, self.formula(depth - 1, consts, negated, bound))
                }
                2 => {
                    let a = self.formula(depth - 1, consts, true, bound);
                    Formula::or(a, self.formula(depth - 1, consts, true, bound))
                }
                3 => {
                    let a = self.formula(depth - 1, consts, true, bound);
                    Formula::implies(a, self.formula(depth - 1, consts, true, bound))
                }
                4 | 5 => self.quantified(depth - 1, consts, negated, bound, |v, a| {
                    Formula::Exists(v, Box::new(a))
                }),
                6 if depth >= 3 => self.quantified(depth - 3, consts, true, bound, |v, a| {
                    Formula::forall(v.as_str(), a)
                }),
                7 if const_ok => self.quantified(depth - 1, consts, negated, bound, |v, a| {
                    Formula::Const(v, Box::new(a))
                }),
                _ => continue,
            };
        }
    }

    fn quantified(
        &mut self,
        depth: usize,
        consts: Consts,
        negated: bool,
        bound: &mut Vec<Var>,
        wrap: impl FnOnce(Var, Formula) -> Formula,
    ) -> Formula {
        let v = Symbol::new(BOUND_VARS.choose(&mut self.rng).expect("non-empty"));
        bound.push(v.clone());
        let body = self.formula(depth, consts, negated, bound);
        bound.pop();
        wrap(v, body)
    }

    /// A non-empty subset of `{0..ELEMENTS-1}` with at most `max` elements.
    pub fn domain(&mut self, max: usize) -> BTreeSet<Elem> {
        let size = self.rng.gen_range(1..=max.min(ELEMENTS as usize));
        let mut all: Vec<Elem> = (0..ELEMENTS).collect();
        all.shuffle(&mut self.rng);
        all.into_iter().take(size).collect()
    }

    /// A structure over `domain` with every tuple of every relation of `sig`
    /// present with probability 1/2.
    pub fn structure(&mut self, domain: &BTreeSet<Elem>, sig: &Signature) -> Structure {
        let mut s = Structure::new(domain.iter().copied(), sig).expect("non-empty domain");
        let elems: Vec<Elem> = domain.iter().copied().collect();
        for (name, arity) in sig.iter() {
            let mut tuple = vec![0usize; arity];
            loop {
                if self.rng.gen_bool(0.5) {
                    let t = tuple.iter().map(|&i| elems[i]).collect();
                    s.insert(name.as_str(), t).expect("tuple over the domain");
                }
                // next tuple in odometer order
                let mut i = 0;
                while i < arity && tuple[i] + 1 == elems.len() {
                    tuple[i] = 0;
                    i += 1;
                }
                if i == arity {
                    break;
                }
                tuple[i] += 1;
            }
        }
        s
    }

    /// An interpretation over a random domain of at most `max_domain`
    /// elements, assigning every variable in `vars`.
    pub fn interpretation(
        &mut self,
        sig: &Signature,
        vars: &BTreeSet<Var>,
        max_domain: usize,
    ) -> Interpretation {
        let domain = self.domain(max_domain);
        let s = self.structure(&domain, sig);
        let elems: Vec<Elem> = domain.into_iter().collect();
        let a: BTreeMap<Var, Elem> = vars
            .iter()
            .map(|v| (v.clone(), *elems.choose(&mut self.rng).expect("non-empty")))
            .collect();
        Interpretation::new(s, a).expect("assignment into the domain")
    }

    /// A non-empty model set of at most `max_members` members (fewer after
    /// duplicates collapse), domains of at most `max_domain` elements.
    pub fn model_set(
        &mut self,
        sig: &Signature,
        vars: &BTreeSet<Var>,
        max_members: usize,
        max_domain: usize,
    ) -> ModelSet {
        let n = self.rng.gen_range(1..=max_members);
        let members: Vec<Interpretation> = (0..n)
            .map(|_| self.interpretation(sig, vars, max_domain))
            .collect();
        ModelSet::with_parts(members, vars.clone(), sig.clone()).expect("consistent members")
    }

    /// A model set over `P/1 R/2` assigning `x` and `y`, as used by the
    /// first-order suites.
    pub fn fo_model_set(&mut self, max_members: usize, max_domain: usize) -> ModelSet {
        let vars = FREE_VARS.iter().map(|v| Symbol::new(v)).collect();
        self.model_set(&fo_signature(), &vars, max_members, max_domain)
    }

    /// A modal formula over `p`, `q` with `~ & | -> <>`, of depth at most
    /// `depth` and rank at most `max_rank`.
    pub fn modal_formula(&mut self, depth: usize, max_rank: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return Formula::prop(if self.rng.gen_bool(0.5) { "p" } else { "q" });
        }
        loop {
            return match self.rng.gen_range(0..5) {
                0 => Formula::not(self.modal_formula(depth - 1, max_rank)),
                1 => {
                    let a = self.modal_formula(depth - 1, max_rank);
                    Formula::and(a, self.modal_formula(depth - 1, max_rank))
                }
                2 => {
                    let a = self.modal_formula(depth - 1, max_rank);
                    Formula::or(a, self.modal_formula(depth - 1, max_rank))
                }
                3 => {
                    let a = self.modal_formula(depth - 1, max_rank);
                    Formula::implies(a, self.modal_formula(depth - 1, max_rank))
                }
                4 if max_rank > 0 => Formula::diamond(self.modal_formula(depth - 1, max_rank - 1)),
                _ => continue,
            };
        }
    }

    /// A modal formula built from `~`, `&` and `<>` only.
    pub fn modal_formula_basic(&mut self, depth: usize, max_rank: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return Formula::prop(if self.rng.gen_bool(0.5) { "p" } else { "q" });
        }
        loop {
            return match self.rng.gen_range(0..3) {
                0 => Formula::not(self.modal_formula_basic(depth - 1, max_rank)),
                1 => {
                    let a = self.modal_formula_basic(depth - 1, max_rank);
                    Formula::and(a, self.modal_formula_basic(depth - 1, max_rank))
                }
                2 if max_rank > 0 => {
                    Formula::diamond(self.modal_formula_basic(depth - 1, max_rank - 1))
                }
                _ => continue,
            };
        }
    }

    /// A strongly regular perspective of the given rank over `p/1 q/1`: all
    /// leaves share the domain `{0..ELEMENTS-1}`, each level has one to
    /// three children, and each model set one to three pointed models.
    pub fn perspective(&mut self, rank: usize) -> Perspective {
        assert!(rank >= 1, "perspectives have rank at least 1");
        if rank == 1 {
            let sig = modal_signature();
            let domain: BTreeSet<Elem> = (0..ELEMENTS).collect();
            let n = self.rng.gen_range(1..=3);
            let members: Vec<Interpretation> = (0..n)
                .map(|_| {
                    let s = self.structure(&domain, &sig);
                    let w = self.rng.gen_range(0..ELEMENTS);
                    Interpretation::pointed(s, w).expect("point in the domain")
                })
                .collect();
            return Perspective::models(ModelSet::new(members).expect("consistent members"));
        }
        let n = self.rng.gen_range(1..=3);
        let children = (0..n).map(|_| self.perspective(rank - 1)).collect();
        Perspective::nested(children).expect("children of equal rank")
    }
}
