//! Weighted properties of a universe model set.
//!
//! A property is a set of member ids, where id `i` is the `i`-th member of
//! `universe.members()`. Weights are exact rationals. Several names may
//! denote the same property; it is weighed once.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::model::ModelSet;

pub type Property = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("property `{name}` mentions member {id}, but the universe has {len} members")]
    OutsideUniverse { name: String, id: usize, len: usize },
    #[error("property `{name}` is weighted {old} and {new}")]
    Conflict {
        name: String,
        old: Box<BigRational>,
        new: Box<BigRational>,
    },
    #[error("the intersection {0} has no weight")]
    IntersectionUnweighted(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Reduction of a finite multiset of weights. Every aggregator maps the empty
/// multiset to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregator {
    #[default]
    Sum,
    Min,
    Max,
    CountPositive,
}

impl Aggregator {
    pub fn apply<'a>(self, weights: impl IntoIterator<Item = &'a BigRational>) -> BigRational {
        let it = weights.into_iter();
        match self {
            Aggregator::Sum => it.fold(BigRational::zero(), |a, w| a + w),
            Aggregator::CountPositive => {
                BigRational::from_integer(BigInt::from(it.filter(|w| w.is_positive()).count()))
            }
            Aggregator::Min => it.min().cloned().unwrap_or_else(BigRational::zero),
            Aggregator::Max => it.max().cloned().unwrap_or_else(BigRational::zero),
        }
    }
}

impl FromStr for Aggregator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(Aggregator::Sum),
            "min" => Ok(Aggregator::Min),
            "max" => Ok(Aggregator::Max),
            "count-positive" => Ok(Aggregator::CountPositive),
            other => Err(format!("unknown aggregator `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeightedUniverse {
    universe: ModelSet,
    weights: BTreeMap<Property, BigRational>,
    names: BTreeMap<String, Property>,
    aggregator: Aggregator,
    threshold: BigRational,
}

impl WeightedUniverse {
    pub fn new(universe: ModelSet, aggregator: Aggregator) -> Self {
        WeightedUniverse {
            universe,
            weights: BTreeMap::new(),
            names: BTreeMap::new(),
            aggregator,
            threshold: BigRational::zero(),
        }
    }

    /// Values at or above `t` read as true.
    pub fn with_threshold(mut self, t: BigRational) -> Self {
        self.threshold = t;
        self
    }

    pub fn universe(&self) -> &ModelSet {
        &self.universe
    }

    pub fn aggregator(&self) -> Aggregator {
        self.aggregator
    }

    /// Weighs the property `ids` under `name`. Re-weighing a property with a
    /// different value is an error.
    pub fn add(
        &mut self,
        name: &str,
        ids: Property,
        weight: BigRational,
    ) -> Result<(), WeightError> {
        let len = self.universe.len();
        if let Some(&id) = ids.iter().find(|&&i| i >= len) {
            return Err(WeightError::OutsideUniverse {
                name: name.to_string(),
                id,
                len,
            });
        }
        if let Some(old) = self.weights.get(&ids) {
            if *old != weight {
                return Err(WeightError::Conflict {
                    name: name.to_string(),
                    old: Box::new(old.clone()),
                    new: Box::new(weight),
                });
            }
        }
        if let Some(prev) = self.names.get(name) {
            if *prev != ids {
                let old = self.weights[prev].clone();
                return Err(WeightError::Conflict {
                    name: name.to_string(),
                    old: Box::new(old),
                    new: Box::new(weight),
                });
            }
        }
        self.weights.insert(ids.clone(), weight);
        self.names.insert(name.to_string(), ids);
        Ok(())
    }

    pub fn property(&self, name: &str) -> Result<&Property, WeightError> {
        self.names
            .get(name)
            .ok_or_else(|| WeightError::UnknownProperty(name.to_string()))
    }

    pub fn weight(&self, p: &Property) -> Option<&BigRational> {
        self.weights.get(p)
    }

    pub fn names(&self) -> impl Iterator<Item = (&str, &Property)> {
        self.names.iter().map(|(n, p)| (n.as_str(), p))
    }

    fn resolve(&self, names: &[&str]) -> Result<BTreeSet<&Property>, WeightError> {
        names.iter().map(|n| self.property(n)).collect()
    }

    /// The aggregator over the weights of the named properties, each
    /// distinct property counted once.
    pub fn value_of(&self, names: &[&str]) -> Result<BigRational, WeightError> {
        let props = self.resolve(names)?;
        Ok(self
            .aggregator
            .apply(props.iter().map(|p| &self.weights[*p])))
    }

    /// `value_of` over every weighted property.
    pub fn full_value(&self) -> BigRational {
        self.aggregator.apply(self.weights.values())
    }

    /// The weight of the intersection of the named properties. The empty
    /// intersection is the whole universe.
    pub fn intersect_then_weigh(&self, names: &[&str]) -> Result<BigRational, WeightError> {
        let props = self.resolve(names)?;
        let mut meet: Property = (0..self.universe.len()).collect();
        for p in props {
            meet = meet.intersection(p).copied().collect();
        }
        self.weights
            .get(&meet)
            .cloned()
            .ok_or_else(|| WeightError::IntersectionUnweighted(fmt_property(&meet)))
    }

    pub fn truth(&self, value: &BigRational) -> bool {
        *value >= self.threshold
    }
}

pub fn fmt_property(p: &Property) -> String {
    let ids: Vec<String> = p.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

/// Parses `7`, `-3/4` or `0.25`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{frac}", int.trim_start_matches(['-', '+']));
        let num = BigInt::from_str(&digits).ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(num, den);
        return Some(if negative { -r } else { r });
    }
    BigRational::from_str(s).ok()
}

/// Prints integers plainly and everything else as `a/b`.
pub struct Exact<'a>(pub &'a BigRational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Reads tab-separated `name  ids  weight` lines into `wu`. `ids` is a
/// comma-separated list, or `-` for the empty property. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_weights(text: &str, wu: &mut WeightedUniverse) -> Result<(), WeightError> {
    parse_weights_with(text, wu, Some)
}

/// [`parse_weights`] with member ids translated by `id`, e.g. from file order
/// to canonical order; ids it rejects are reported as outside the universe.
pub fn parse_weights_with(
    text: &str,
    wu: &mut WeightedUniverse,
    id: impl Fn(usize) -> Option<usize>,
) -> Result<(), WeightError> {
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| WeightError::Syntax { line, message };
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let [name, ids, weight] = fields[..] else {
            return Err(err(format!(
                "expected 3 tab-separated fields, found {}",
                fields.len()
            )));
        };
        let ids: Property = match ids.trim() {
            "-" | "" => Property::new(),
            list => list
                .split(',')
                .map(|i| {
                    let raw: usize = i
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("bad member id `{i}`")))?;
                    id(raw).ok_or_else(|| WeightError::OutsideUniverse {
                        name: name.trim().to_string(),
                        id: raw,
                        len: wu.universe().len(),
                    })
                })
                .collect::<Result<_, _>>()?,
        };
        let w =
            parse_rational(weight).ok_or_else(|| err(format!("bad weight `{}`", weight.trim())))?;
        wu.add(name.trim(), ids, w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Signature;
    use crate::model::{Interpretation, Structure};

    fn universe(n: u32) -> ModelSet {
        let sig = Signature::new().with("P", 1);
        ModelSet::new((0..n).map(|k| {
            Interpretation::new(Structure::new(0..=k, &sig).unwrap(), Default::default()).unwrap()
        }))
        .unwrap()
    }

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn value_examples() {
        let mut wu = WeightedUniverse::new(universe(3), Aggregator::Sum);
        wu.add("P1", [0, 1].into(), q("1")).unwrap();
        wu.add("P2", [1, 2].into(), q("-2")).unwrap();
        assert_eq!(wu.value_of(&["P1", "P2"]).unwrap(), q("-1"));
        assert_eq!(wu.value_of(&["P2", "P1"]).unwrap(), q("-1"));
        assert_eq!(wu.value_of(&[]).unwrap(), q("0"));
        assert_eq!(wu.full_value(), q("-1"));
        assert!(!wu.truth(&wu.full_value()));
        assert!(matches!(
            wu.value_of(&["P9"]),
            Err(WeightError::UnknownProperty(_))
        ));
    }

    #[test]
    fn aliases_collapse() {
        let mut wu = WeightedUniverse::new(universe(2), Aggregator::Sum);
        wu.add("A", [0].into(), q("3")).unwrap();
        wu.add("B", [0].into(), q("3")).unwrap();
        wu.add("C", [1].into(), q("3")).unwrap();
        // A and B are one property; C is distinct with an equal weight
        assert_eq!(wu.value_of(&["A", "B"]).unwrap(), q("3"));
        assert_eq!(wu.value_of(&["A", "B", "C"]).unwrap(), q("6"));
        assert!(wu.add("D", [0].into(), q("4")).is_err());
    }

    #[test]
    fn full_value_examples() {
        let mut wu = WeightedUniverse::new(universe(2), Aggregator::Sum);
        assert_eq!(wu.full_value(), q("0"));
        wu.add("money", [0].into(), q("1")).unwrap();
        wu.add("debt", [1].into(), q("-2")).unwrap();
        assert_eq!(wu.full_value(), q("-1"));
        let mut single = WeightedUniverse::new(universe(1), Aggregator::Sum);
        single.add("only", [0].into(), q("5")).unwrap();
        assert_eq!(single.full_value(), q("5"));
    }

    #[test]
    fn intersection_examples() {
        let mut wu = WeightedUniverse::new(universe(3), Aggregator::Sum);
        wu.add("P1", [0, 1].into(), q("1")).unwrap();
        wu.add("P2", [1, 2].into(), q("2")).unwrap();
        wu.add("P3", [1].into(), q("7")).unwrap();
        wu.add("P4", [2].into(), q("1/2")).unwrap();
        assert_eq!(wu.intersect_then_weigh(&["P1", "P2"]).unwrap(), q("7"));
        assert_eq!(wu.intersect_then_weigh(&["P4"]).unwrap(), q("1/2"));
        assert!(matches!(
            wu.intersect_then_weigh(&["P3", "P4"]),
            Err(WeightError::IntersectionUnweighted(_))
        ));
    }

    #[test]
    fn aggregators_on_empty_and_mixed() {
        let ws = [q("1"), q("-2"), q("1/3")];
        assert_eq!(Aggregator::Min.apply(&ws), q("-2"));
        assert_eq!(Aggregator::Max.apply(&ws), q("1"));
        assert_eq!(Aggregator::CountPositive.apply(&ws), q("2"));
        for a in [
            Aggregator::Sum,
            Aggregator::Min,
            Aggregator::Max,
            Aggregator::CountPositive,
        ] {
            assert_eq!(a.apply(std::iter::empty()), q("0"));
        }
    }

    #[test]
    fn parses_tsv_and_rationals() {
        assert_eq!(q("0.25"), q("1/4"));
        assert_eq!(q("-1.5"), q("-3/2"));
        assert!(parse_rational("1.").is_none());
        let mut wu = WeightedUniverse::new(universe(3), Aggregator::Sum);
        parse_weights(
            "# name ids weight\nP1\t0,1\t1\nP2\t2\t-2.5\nnone\t-\t0\n",
            &mut wu,
        )
        .unwrap();
        assert_eq!(wu.full_value(), q("-3/2"));
        assert_eq!(Exact(&wu.full_value()).to_string(), "-3/2");
        let err = parse_weights("P\t7\t1\n", &mut wu).unwrap_err();
        assert!(matches!(err, WeightError::OutsideUniverse { .. }));
        let err = parse_weights("P 1 1\n", &mut wu).unwrap_err();
        assert!(matches!(err, WeightError::Syntax { line: 1, .. }));
    }
}
