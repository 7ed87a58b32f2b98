//! Minor quantifiers: pairs `(Q+, Q-)` of cardinality predicates over
//! `(|A|, |B+|, |B-|)`, each meant to witness a unary generalized quantifier
//! `U` (respectively its complement).

use std::collections::BTreeMap;
use std::fmt;

use crate::symbol::Symbol;

/// A unary generalized quantifier, as a predicate on `(|A|, |S|)`.
pub type BaseFn = fn(usize, usize) -> bool;
/// An acceptance class, as a predicate on `(|A|, |B+|, |B-|)`.
pub type AcceptFn = fn(usize, usize, usize) -> bool;

#[derive(Clone, Copy)]
pub struct MinorQuantifier {
    pub name: &'static str,
    /// `U`; also the classical reading of `Q x.` inside a single model.
    pub base: BaseFn,
    pub accept_pos: AcceptFn,
    pub accept_neg: AcceptFn,
}

impl fmt::Debug for MinorQuantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MinorQuantifier({})", self.name)
    }
}

impl MinorQuantifier {
    /// `|B+| ≥ 1` / `|B-| = |A|`, witnessing `|S| ≥ 1`.
    pub fn exists() -> Self {
        MinorQuantifier {
            name: "exists",
            base: |_, s| s >= 1,
            accept_pos: |_, p, _| p >= 1,
            accept_neg: |n, p, m| p == 0 && m == n,
        }
    }

    /// `|B+| = |A|` / `|B-| ≥ 1`, witnessing `|S| = |A|`.
    pub fn forall() -> Self {
        MinorQuantifier {
            name: "forall",
            base: |n, s| s == n,
            accept_pos: |n, p, _| p == n,
            accept_neg: |_, _, m| m >= 1,
        }
    }

    /// "More than half": `|B+| > |A|/2` / `|B-| ≥ ⌈|A|/2⌉`, witnessing
    /// `|S| > |A|/2`.
    pub fn majority() -> Self {
        MinorQuantifier {
            name: "majority",
            base: |n, s| 2 * s > n,
            accept_pos: |n, p, _| 2 * p > n,
            accept_neg: |n, _, m| 2 * m >= n,
        }
    }

    /// Is there a choice of `B+ ⊆ pos`, `B- ⊆ neg`, disjoint, accepted by
    /// `accept`? `both` is `|pos ∩ neg|`.
    pub(crate) fn admits(accept: AcceptFn, n: usize, pos: usize, neg: usize, both: usize) -> bool {
        let union = pos + neg - both;
        (0..=pos).any(|p| (0..=neg).any(|m| p + m <= union && accept(n, p, m)))
    }
}

/// Named minor quantifiers available to `<Q:name>` and `Q:name x.`.
#[derive(Debug, Clone)]
pub struct Quantifiers {
    table: BTreeMap<Symbol, MinorQuantifier>,
}

impl Default for Quantifiers {
    fn default() -> Self {
        let mut q = Quantifiers {
            table: BTreeMap::new(),
        };
        for m in [
            MinorQuantifier::exists(),
            MinorQuantifier::forall(),
            MinorQuantifier::majority(),
        ] {
            q.insert(m);
        }
        q
    }
}

impl Quantifiers {
    pub fn builtin() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, q: MinorQuantifier) {
        self.table.insert(Symbol::new(q.name), q);
    }

    pub fn get(&self, name: &Symbol) -> Option<&MinorQuantifier> {
        self.table.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(Symbol::as_str)
    }
}

/// Checks witness conditions 5-7 of `accept` against `base` for every domain
/// size up to `max_size`. Both predicates depend on cardinalities only, so
/// quantifying over sets reduces to quantifying over sizes: for fixed
/// `|B+| = p`, `|B-| = m`, the sets `H` with `B+ ⊆ H ⊆ A ∖ B-` have every
/// size in `p..=n-m`.
pub fn witnesses(accept: AcceptFn, base: &dyn Fn(usize, usize) -> bool, max_size: usize) -> bool {
    (1..=max_size).all(|n| {
        let class = |p: usize, m: usize| p + m <= n && accept(n, p, m);
        let five_six = (0..=n).all(|p| {
            (0..=n - p).all(|m| {
                !class(p, m) || {
                    let sizes = p..=n - m;
                    sizes.clone().any(|h| base(n, h)) && !sizes.into_iter().any(|h| !base(n, h))
                }
            })
        });
        let seven = (0..=n)
            .filter(|&h| base(n, h))
            .all(|h| (0..=h).any(|p| (0..=n - h).any(|m| class(p, m))));
        five_six && seven
    })
}

/// `witnesses` for both halves: `Q+` against `U` and `Q-` against `Ū`.
pub fn witness_check(q: &MinorQuantifier, base: BaseFn, max_size: usize) -> bool {
    witnesses(q.accept_pos, &base, max_size)
        && witnesses(q.accept_neg, &|n, s| !base(n, s), max_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Set-level oracle: B+, B-, H range over bitmasks of an n-element set.
    fn witnesses_by_sets(
        accept: AcceptFn,
        base: &dyn Fn(usize, usize) -> bool,
        max_size: usize,
    ) -> bool {
        (1..=max_size).all(|n| {
            let full = (1u32 << n) - 1;
            let size = |s: u32| s.count_ones() as usize;
            let in_class = |bp: u32, bm: u32| bp & bm == 0 && accept(n, size(bp), size(bm));
            let fits = |bp: u32, bm: u32, h: u32| bp & !h == 0 && bm & h == 0;
            let mut ok = true;
            for bp in 0..=full {
                for bm in 0..=full {
                    if !in_class(bp, bm) {
                        continue;
                    }
                    ok &= (0..=full).any(|h| base(n, size(h)) && fits(bp, bm, h));
                    ok &= !(0..=full).any(|h| !base(n, size(h)) && fits(bp, bm, h));
                }
            }
            for h in (0..=full).filter(|&h| base(n, size(h))) {
                ok &= (0..=full).any(|bp| (0..=full).any(|bm| in_class(bp, bm) && fits(bp, bm, h)));
            }
            ok
        })
    }

    #[test]
    fn builtins_witness_their_base() {
        for q in [
            MinorQuantifier::exists(),
            MinorQuantifier::forall(),
            MinorQuantifier::majority(),
        ] {
            assert!(witness_check(&q, q.base, 4), "{}", q.name);
        }
    }

    #[test]
    fn always_accept_fails() {
        let bad: AcceptFn = |_, _, _| true;
        assert!(!witnesses(bad, &|_, s| s >= 1, 3));
    }

    #[test]
    fn cardinality_check_matches_set_oracle() {
        let bases: [BaseFn; 4] = [
            |_, s| s >= 1,
            |n, s| s == n,
            |n, s| 2 * s > n,
            |_, s| s % 2 == 0,
        ];
        let accepts: [AcceptFn; 6] = [
            |_, p, _| p >= 1,
            |n, p, m| p == 0 && m == n,
            |n, p, _| p == n,
            |_, _, m| m >= 1,
            |_, _, _| true,
            |n, p, m| 2 * p > n || m == 0,
        ];
        for base in bases {
            for accept in accepts {
                assert_eq!(
                    witnesses(accept, &base, 4),
                    witnesses_by_sets(accept, &base, 4)
                );
            }
        }
    }

    #[test]
    fn admits_respects_disjointness() {
        // one element that is both positive and negative cannot serve twice
        let both_sides: AcceptFn = |_, p, m| p >= 1 && m >= 1;
        assert!(!MinorQuantifier::admits(both_sides, 1, 1, 1, 1));
        assert!(MinorQuantifier::admits(both_sides, 2, 1, 1, 0));
    }
}
