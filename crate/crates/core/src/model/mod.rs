//! Finite relational structures, interpretations and model sets.

mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub(crate) use text::{parse_model_block, parse_vars, require_sig, write_structure_block};
pub use text::{parse_model_set, parse_model_set_ordered};

use crate::formula::Signature;
use crate::lex::SyntaxError;
use crate::symbol::{RelName, Symbol, Var};

pub type Elem = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("a structure needs a non-empty domain")]
    EmptyDomain,
    #[error("relation `{0}` is not in the signature")]
    UnknownRelation(String),
    #[error("`{name}` has arity {arity} but the tuple has {found} entries")]
    TupleArity {
        name: String,
        arity: usize,
        found: usize,
    },
    #[error("element {elem} of `{name}` is outside the domain")]
    TupleOutsideDomain { name: String, elem: Elem },
    #[error("variable `{var}` is assigned {elem}, which is outside the domain")]
    AssignmentOutsideDomain { var: String, elem: Elem },
    #[error("members have different assignment domains ({0} vs {1})")]
    AssignmentDomainMismatch(String, String),
    #[error("members have different signatures ({0} vs {1})")]
    SignatureMismatch(String, String),
    #[error("`{0}` is already in the signature")]
    NameCollision(String),
    #[error("choice function has {found} values for {members} members")]
    ChoiceArity { found: usize, members: usize },
    #[error("choice function picks {elem} for member {member}, outside its domain")]
    ChoiceOutsideDomain { member: usize, elem: Elem },
    #[error("element {0} is not in the common domain")]
    NotInCommonDomain(Elem),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<Elem>>,
}

/// A finite relational structure. Every relation of its signature is present,
/// possibly empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Structure {
    domain: BTreeSet<Elem>,
    relations: BTreeMap<RelName, Relation>,
}

impl Structure {
    /// A structure with the given domain and every relation of `sig` empty.
    pub fn new(
        domain: impl IntoIterator<Item = Elem>,
        sig: &Signature,
    ) -> Result<Self, ModelError> {
        let domain: BTreeSet<Elem> = domain.into_iter().collect();
        if domain.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        let relations = sig
            .iter()
            .map(|(name, arity)| {
                (
                    name.clone(),
                    Relation {
                        arity,
                        tuples: BTreeSet::new(),
                    },
                )
            })
            .collect();
        Ok(Structure { domain, relations })
    }

    pub fn insert(&mut self, name: &str, tuple: Vec<Elem>) -> Result<(), ModelError> {
        let rel = self
            .relations
            .get_mut(&Symbol::new(name))
            .ok_or_else(|| ModelError::UnknownRelation(name.to_string()))?;
        if tuple.len() != rel.arity {
            return Err(ModelError::TupleArity {
                name: name.to_string(),
                arity: rel.arity,
                found: tuple.len(),
            });
        }
        if let Some(&elem) = tuple.iter().find(|e| !self.domain.contains(e)) {
            return Err(ModelError::TupleOutsideDomain {
                name: name.to_string(),
                elem,
            });
        }
        rel.tuples.insert(tuple);
        Ok(())
    }

    /// Builder form of [`Structure::insert`].
    pub fn with(mut self, name: &str, tuples: &[&[Elem]]) -> Result<Self, ModelError> {
        for t in tuples {
            self.insert(name, t.to_vec())?;
        }
        Ok(self)
    }

    pub fn domain(&self) -> &BTreeSet<Elem> {
        &self.domain
    }

    pub fn relation(&self, name: &RelName) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&RelName, &Relation)> {
        self.relations.iter()
    }

    pub fn holds(&self, name: &RelName, args: &[Elem]) -> bool {
        self.relations
            .get(name)
            .is_some_and(|r| r.tuples.contains(args))
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (name, rel) in &self.relations {
            sig.declare(name.as_str(), rel.arity);
        }
        sig
    }

    /// Adds a fresh unary relation interpreted as `extent ∩ domain`.
    pub fn with_unary(&self, name: &str, extent: &BTreeSet<Elem>) -> Result<Self, ModelError> {
        let key = Symbol::new(name);
        if self.relations.contains_key(&key) {
            return Err(ModelError::NameCollision(name.to_string()));
        }
        let mut out = self.clone();
        out.relations.insert(
            key,
            Relation {
                arity: 1,
                tuples: extent
                    .iter()
                    .filter(|e| self.domain.contains(e))
                    .map(|&e| vec![e])
                    .collect(),
            },
        );
        Ok(out)
    }

    pub fn without(&self, name: &str) -> Self {
        let mut out = self.clone();
        out.relations.remove(&Symbol::new(name));
        out
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_structure_block(f, self, &BTreeMap::new())
    }
}

/// A structure together with an assignment of variables to its elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interpretation {
    structure: Arc<Structure>,
    assignment: BTreeMap<Var, Elem>,
}

impl Interpretation {
    pub fn new(structure: Structure, assignment: BTreeMap<Var, Elem>) -> Result<Self, ModelError> {
        Self::shared(Arc::new(structure), assignment)
    }

    pub fn shared(
        structure: Arc<Structure>,
        assignment: BTreeMap<Var, Elem>,
    ) -> Result<Self, ModelError> {
        if let Some((var, &elem)) = assignment
            .iter()
            .find(|(_, e)| !structure.domain.contains(e))
        {
            return Err(ModelError::AssignmentOutsideDomain {
                var: var.to_string(),
                elem,
            });
        }
        Ok(Interpretation {
            structure,
            assignment,
        })
    }

    /// A pointed model `(M, w)`, read as the assignment `x ↦ w`.
    pub fn pointed(structure: Structure, w: Elem) -> Result<Self, ModelError> {
        let mut a = BTreeMap::new();
        a.insert(Symbol::new(crate::formula::POINT_VAR), w);
        Self::new(structure, a)
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn structure_arc(&self) -> &Arc<Structure> {
        &self.structure
    }

    pub fn assignment(&self) -> &BTreeMap<Var, Elem> {
        &self.assignment
    }

    pub fn get(&self, v: &Var) -> Option<Elem> {
        self.assignment.get(v).copied()
    }

    /// `f[a/x]`. The caller guarantees `a` is in the domain.
    pub(crate) fn rebind(&self, x: &Var, a: Elem) -> Self {
        debug_assert!(self.structure.domain.contains(&a));
        let mut assignment = self.assignment.clone();
        assignment.insert(x.clone(), a);
        Interpretation {
            structure: self.structure.clone(),
            assignment,
        }
    }

    fn map_structure(
        &self,
        f: impl FnOnce(&Structure) -> Result<Structure, ModelError>,
    ) -> Result<Self, ModelError> {
        Ok(Interpretation {
            structure: Arc::new(f(&self.structure)?),
            assignment: self.assignment.clone(),
        })
    }
}

/// A choice function for a model set: one element per member, in member
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChoiceFunction {
    pub values: Vec<Elem>,
    /// Set for constant choice functions; the empty function is constant
    /// only as the function for the empty model set.
    pub constant: bool,
}

/// A finite set of interpretations over one signature, all assigning the
/// same variables. Members are kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModelSet {
    members: Vec<Interpretation>,
    vars: BTreeSet<Var>,
    sig: Signature,
}

impl ModelSet {
    pub fn new(members: impl IntoIterator<Item = Interpretation>) -> Result<Self, ModelError> {
        let members: Vec<Interpretation> = members.into_iter().collect();
        let Some(first) = members.first() else {
            return Ok(Self::empty(BTreeSet::new(), Signature::new()));
        };
        let vars: BTreeSet<Var> = first.assignment.keys().cloned().collect();
        let sig = first.structure.signature();
        Self::with_parts(members, vars, sig)
    }

    /// The empty model set over the given variables and signature.
    pub fn empty(vars: BTreeSet<Var>, sig: Signature) -> Self {
        ModelSet {
            members: Vec::new(),
            vars,
            sig,
        }
    }

    /// Builds a model set with an explicit assignment domain and signature,
    /// which every member must match.
    pub fn with_parts(
        members: impl IntoIterator<Item = Interpretation>,
        vars: BTreeSet<Var>,
        sig: Signature,
    ) -> Result<Self, ModelError> {
        let mut members: Vec<Interpretation> = members.into_iter().collect();
        for m in &members {
            if !m.assignment.keys().eq(vars.iter()) {
                return Err(ModelError::AssignmentDomainMismatch(
                    fmt_vars(&vars),
                    fmt_vars(&m.assignment.keys().cloned().collect()),
                ));
            }
            let s = m.structure.signature();
            if s != sig {
                return Err(ModelError::SignatureMismatch(
                    sig.to_string(),
                    s.to_string(),
                ));
            }
        }
        members.sort();
        members.dedup();
        Ok(ModelSet { members, vars, sig })
    }

    /// Internal constructor for members already known to be consistent.
    fn from_trusted(mut members: Vec<Interpretation>, vars: BTreeSet<Var>, sig: Signature) -> Self {
        members.sort();
        members.dedup();
        ModelSet { members, vars, sig }
    }

    pub fn members(&self) -> &[Interpretation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn vars(&self) -> &BTreeSet<Var> {
        &self.vars
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Intersection of the member domains; empty for the empty model set.
    pub fn common_domain(&self) -> BTreeSet<Elem> {
        let mut it = self.members.iter();
        let Some(first) = it.next() else {
            return BTreeSet::new();
        };
        let mut out = first.structure.domain.clone();
        for m in it {
            out.retain(|e| m.structure.domain.contains(e));
        }
        out
    }

    /// True iff every member has the same domain.
    pub fn shares_domain(&self) -> bool {
        self.members
            .windows(2)
            .all(|w| w[0].structure.domain == w[1].structure.domain)
    }

    /// The members selected by `keep` (indices into [`ModelSet::members`]).
    pub fn subset(&self, keep: impl IntoIterator<Item = usize>) -> ModelSet {
        ModelSet {
            members: keep.into_iter().map(|i| self.members[i].clone()).collect(),
            vars: self.vars.clone(),
            sig: self.sig.clone(),
        }
    }

    /// Members selected by a bitmask over member indices.
    pub(crate) fn subset_mask(&self, mask: u64) -> ModelSet {
        self.subset((0..self.members.len()).filter(|i| mask >> i & 1 == 1))
    }

    pub fn union(&self, other: &ModelSet) -> Result<ModelSet, ModelError> {
        Self::with_parts(
            self.members.iter().chain(&other.members).cloned(),
            self.vars.clone(),
            self.sig.clone(),
        )
    }

    fn with_var(&self, x: &Var) -> BTreeSet<Var> {
        let mut vars = self.vars.clone();
        vars.insert(x.clone());
        vars
    }

    /// `M[F/x]`.
    pub fn extend_choice(&self, f: &ChoiceFunction, x: &Var) -> Result<ModelSet, ModelError> {
        if f.values.len() != self.members.len() {
            return Err(ModelError::ChoiceArity {
                found: f.values.len(),
                members: self.members.len(),
            });
        }
        let mut out = Vec::with_capacity(self.members.len());
        for (i, (m, &a)) in self.members.iter().zip(&f.values).enumerate() {
            if !m.structure.domain.contains(&a) {
                return Err(ModelError::ChoiceOutsideDomain { member: i, elem: a });
            }
            out.push(m.rebind(x, a));
        }
        Ok(Self::from_trusted(out, self.with_var(x), self.sig.clone()))
    }

    /// `M[⊤/x]`: every member paired with every element of its own domain.
    pub fn extend_all(&self, x: &Var) -> ModelSet {
        let out = self
            .members
            .iter()
            .flat_map(|m| m.structure.domain.iter().map(move |&a| m.rebind(x, a)))
            .collect();
        Self::from_trusted(out, self.with_var(x), self.sig.clone())
    }

    /// `M[A/x]` for `A` a subset of the common domain.
    pub fn extend_set(&self, a: &BTreeSet<Elem>, x: &Var) -> Result<ModelSet, ModelError> {
        let common = self.common_domain();
        if let Some(&bad) = a.iter().find(|e| !common.contains(e)) {
            return Err(ModelError::NotInCommonDomain(bad));
        }
        let out = self
            .members
            .iter()
            .flat_map(|m| a.iter().map(move |&e| m.rebind(x, e)))
            .collect();
        Ok(Self::from_trusted(out, self.with_var(x), self.sig.clone()))
    }

    /// `M_D`: every member gains the unary relation `name` interpreted as
    /// the common domain.
    pub fn add_domain_predicate(&self, name: &str) -> Result<ModelSet, ModelError> {
        if self.sig.contains(&Symbol::new(name)) {
            return Err(ModelError::NameCollision(name.to_string()));
        }
        let common = self.common_domain();
        let members = self
            .members
            .iter()
            .map(|m| m.map_structure(|s| s.with_unary(name, &common)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sig = self.sig.clone();
        sig.declare(name, 1);
        Ok(Self::from_trusted(members, self.vars.clone(), sig))
    }

    /// All choice functions (or all constant ones), in lexicographic order of
    /// their value vectors.
    pub fn choice_functions(&self, constant_only: bool) -> ChoiceFunctions {
        if self.members.is_empty() {
            return ChoiceFunctions::Single(Some(ChoiceFunction {
                values: Vec::new(),
                constant: constant_only,
            }));
        }
        if constant_only {
            let n = self.members.len();
            let common: Vec<Elem> = self.common_domain().into_iter().collect();
            return ChoiceFunctions::Constant {
                elems: common.into_iter(),
                n,
            };
        }
        let domains: Vec<Vec<Elem>> = self
            .members
            .iter()
            .map(|m| m.structure.domain.iter().copied().collect())
            .collect();
        ChoiceFunctions::Product {
            digits: Some(vec![0; domains.len()]),
            domains,
        }
    }

    /// Number of (unrestricted) choice functions: the product of the member
    /// domain sizes.
    pub fn choice_function_count(&self) -> u128 {
        self.members
            .iter()
            .map(|m| m.structure.domain.len() as u128)
            .product()
    }
}

fn fmt_vars(vars: &BTreeSet<Var>) -> String {
    let names: Vec<&str> = vars.iter().map(Symbol::as_str).collect();
    format!("{{{}}}", names.join(","))
}

impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.sig)?;
        if self.members.is_empty() && !self.vars.is_empty() {
            let names: Vec<&str> = self.vars.iter().map(Symbol::as_str).collect();
            writeln!(f, "vars {};", names.join(" "))?;
        }
        for m in &self.members {
            write_structure_block(f, &m.structure, &m.assignment)?;
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Iterator returned by [`ModelSet::choice_functions`].
pub enum ChoiceFunctions {
    Single(Option<ChoiceFunction>),
    Constant {
        elems: std::vec::IntoIter<Elem>,
        n: usize,
    },
    Product {
        domains: Vec<Vec<Elem>>,
        digits: Option<Vec<usize>>,
    },
}

impl Iterator for ChoiceFunctions {
    type Item = ChoiceFunction;

    fn next(&mut self) -> Option<ChoiceFunction> {
        match self {
            ChoiceFunctions::Single(f) => f.take(),
            ChoiceFunctions::Constant { elems, n } => elems.next().map(|a| ChoiceFunction {
                values: vec![a; *n],
                constant: true,
            }),
            ChoiceFunctions::Product { domains, digits } => {
                let current = digits.as_mut()?;
                let values = current
                    .iter()
                    .zip(domains.iter())
                    .map(|(&d, dom)| dom[d])
                    .collect();
                // odometer, last member varies fastest
                let mut i = current.len();
                loop {
                    if i == 0 {
                        *digits = None;
                        break;
                    }
                    i -= 1;
                    current[i] += 1;
                    if current[i] < domains[i].len() {
                        break;
                    }
                    current[i] = 0;
                }
                Some(ChoiceFunction {
                    values,
                    constant: false,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new().with("P", 1).with("R", 2)
    }

    fn member(domain: &[Elem]) -> Interpretation {
        Interpretation::new(
            Structure::new(domain.iter().copied(), &sig()).unwrap(),
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn common_domain_examples() {
        let m = ModelSet::new([member(&[1, 2]), member(&[2, 3])]).unwrap();
        assert_eq!(m.common_domain(), BTreeSet::from([2]));
        let s = ModelSet::new([member(&[0, 1])]).unwrap();
        assert_eq!(s.common_domain(), BTreeSet::from([0, 1]));
        assert!(ModelSet::empty(BTreeSet::new(), sig())
            .common_domain()
            .is_empty());
    }

    #[test]
    fn extend_examples() {
        let x = Symbol::new("x");
        let m = ModelSet::new([member(&[0, 1]), member(&[0, 1, 2])]).unwrap();
        assert_eq!(m.extend_all(&x).len(), 5);
        assert!(ModelSet::empty(BTreeSet::new(), sig())
            .extend_all(&x)
            .is_empty());
        assert!(m.extend_set(&BTreeSet::new(), &x).unwrap().is_empty());
        assert!(m.extend_set(&BTreeSet::from([2]), &x).is_err());
        let c = m.extend_set(&BTreeSet::from([1]), &x).unwrap();
        assert!(c.members().iter().all(|i| i.get(&x) == Some(1)));

        let f = ChoiceFunction {
            values: vec![1, 2],
            constant: false,
        };
        let chosen = m.extend_choice(&f, &x).unwrap();
        assert_eq!(chosen.vars(), &BTreeSet::from([x.clone()]));
        // rebinding overwrites
        let again = chosen
            .extend_choice(
                &ChoiceFunction {
                    values: vec![0, 0],
                    constant: true,
                },
                &x,
            )
            .unwrap();
        assert!(again.members().iter().all(|i| i.get(&x) == Some(0)));
        assert!(m
            .extend_choice(
                &ChoiceFunction {
                    values: vec![2, 2],
                    constant: true
                },
                &x
            )
            .is_err());
    }

    #[test]
    fn choice_function_enumeration() {
        let m = ModelSet::new([member(&[0, 1]), member(&[0, 1, 2])]).unwrap();
        let all: Vec<_> = m.choice_functions(false).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(m.choice_function_count(), 6);
        let distinct: std::collections::HashSet<_> = all.iter().map(|f| f.values.clone()).collect();
        assert_eq!(distinct.len(), 6);
        assert_eq!(m.choice_functions(true).count(), 2);

        let one = ModelSet::new([member(&[0, 1]), member(&[1, 2])]).unwrap();
        let consts: Vec<_> = one.choice_functions(true).collect();
        assert_eq!(consts.len(), 1);
        assert_eq!(consts[0].values, vec![1, 1]);

        let empty = ModelSet::empty(BTreeSet::new(), sig());
        let e: Vec<_> = empty.choice_functions(true).collect();
        assert_eq!(e.len(), 1);
        assert!(e[0].values.is_empty() && e[0].constant);
        assert_eq!(empty.choice_functions(false).count(), 1);
    }

    #[test]
    fn domain_predicate() {
        let m = ModelSet::new([member(&[1, 2]), member(&[2, 3])]).unwrap();
        let d = m.add_domain_predicate("D").unwrap();
        for i in d.members() {
            let rel = i.structure().relation(&Symbol::new("D")).unwrap();
            assert_eq!(rel.tuples, BTreeSet::from([vec![2]]));
        }
        assert!(d.add_domain_predicate("D").is_err());
        let disjoint = ModelSet::new([member(&[0]), member(&[1])]).unwrap();
        let d = disjoint.add_domain_predicate("D").unwrap();
        assert!(d.members().iter().all(|i| i
            .structure()
            .relation(&Symbol::new("D"))
            .unwrap()
            .tuples
            .is_empty()));
    }

    #[test]
    fn structure_validation() {
        let s = Structure::new([0, 1], &sig()).unwrap();
        assert!(s.clone().with("R", &[&[0, 2]]).is_err());
        assert!(s.clone().with("R", &[&[0]]).is_err());
        assert!(s.clone().with("S", &[&[0]]).is_err());
        assert!(Structure::new([], &sig()).is_err());
        let mut a = BTreeMap::new();
        a.insert(Symbol::new("x"), 5);
        assert!(Interpretation::new(s, a).is_err());
    }

    #[test]
    fn duplicates_collapse() {
        let m = ModelSet::new([member(&[0]), member(&[0])]).unwrap();
        assert_eq!(m.len(), 1);
    }
}
