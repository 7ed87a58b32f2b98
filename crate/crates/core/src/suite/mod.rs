//! Named property suites and golden examples, each driven by its own stream
//! of one seed. Reports contain no timings, so a seed fixes the report byte
//! for byte.

mod golden;
mod properties;

use std::error::Error;
use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::random::Gen;

pub type SuiteResult = Result<(), Box<dyn Error + Send + Sync>>;
type SuiteFn = fn(&mut Gen, &mut Check) -> SuiteResult;

/// Failure descriptions kept per suite; the count is always exact.
const SHOWN_FAILURES: usize = 8;

/// Case bookkeeping for one suite.
#[derive(Debug, Default)]
pub struct Check {
    cases: usize,
    failed: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    /// Records one case.
    pub fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(what());
        }
    }

    pub fn eq<T: PartialEq + fmt::Debug>(&mut self, label: &str, got: T, want: T) {
        let ok = got == want;
        self.expect(ok, || format!("{label}: got {got:?}, want {want:?}"));
    }

    fn fail(&mut self, what: String) {
        self.failed += 1;
        if self.failures.len() < SHOWN_FAILURES {
            self.failures.push(what);
        }
    }

    /// Records one case per item, evaluated in parallel; `f` returns the
    /// failure description, if any.
    pub fn par_cases<T: Sync>(
        &mut self,
        items: &[T],
        f: impl Fn(&T) -> Result<Option<String>, Box<dyn Error + Send + Sync>> + Sync,
    ) {
        let results: Vec<_> = items
            .par_iter()
            .map(|t| f(t).map_err(|e| e.to_string()))
            .collect();
        for r in results {
            self.cases += 1;
            match r {
                Ok(None) => {}
                Ok(Some(msg)) => self.fail(msg),
                Err(e) => self.fail(format!("error: {e}")),
            }
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

/// The result of one suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub name: &'static str,
    pub cases: usize,
    pub failed: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

struct Suite {
    name: &'static str,
    run: SuiteFn,
}

const SUITES: &[Suite] = &[
    Suite {
        name: "golden-formula",
        run: golden::formula,
    },
    Suite {
        name: "golden-model",
        run: golden::model,
    },
    Suite {
        name: "golden-evaluator",
        run: golden::evaluator,
    },
    Suite {
        name: "golden-translate",
        run: golden::translate,
    },
    Suite {
        name: "golden-counting",
        run: golden::counting,
    },
    Suite {
        name: "golden-perspectives",
        run: golden::perspectives,
    },
    Suite {
        name: "golden-weights",
        run: golden::weights,
    },
    Suite {
        name: "golden-systems",
        run: golden::systems,
    },
    Suite {
        name: "golden-cli",
        run: golden::cli,
    },
    Suite {
        name: "round-trip",
        run: properties::round_trip,
    },
    Suite {
        name: "classify",
        run: properties::classify_monotone,
    },
    Suite {
        name: "rank",
        run: properties::rank_depth,
    },
    Suite {
        name: "variant-equivalence",
        run: properties::variant_equivalence,
    },
    Suite {
        name: "model-invariants",
        run: properties::model_invariants,
    },
    Suite {
        name: "flatness",
        run: properties::flatness,
    },
    Suite {
        name: "disjunction",
        run: properties::disjunction,
    },
    Suite {
        name: "variants",
        run: properties::variants,
    },
    Suite {
        name: "negation",
        run: properties::negation,
    },
    Suite {
        name: "cover",
        run: properties::cover,
    },
    Suite {
        name: "fast-path",
        run: properties::fast_path,
    },
    Suite {
        name: "choice-count",
        run: properties::choice_count,
    },
    Suite {
        name: "consistency",
        run: properties::consistency,
    },
    Suite {
        name: "homomorphism",
        run: properties::homomorphism,
    },
    Suite {
        name: "translation-claim",
        run: properties::translation_claim,
    },
    Suite {
        name: "reduction",
        run: properties::reduction,
    },
    Suite {
        name: "counting",
        run: properties::counting,
    },
    Suite {
        name: "minor-exists",
        run: properties::minor_exists,
    },
    Suite {
        name: "witness",
        run: properties::witness,
    },
    Suite {
        name: "even-odd",
        run: properties::even_odd,
    },
    Suite {
        name: "persp-exclusivity",
        run: properties::persp_exclusivity,
    },
    Suite {
        name: "persp-agreement",
        run: properties::persp_agreement,
    },
    Suite {
        name: "restrict-idempotence",
        run: properties::restrict_idempotence,
    },
    Suite {
        name: "rank1-flatness",
        run: properties::rank1_flatness,
    },
    Suite {
        name: "weights",
        run: properties::weights,
    },
    Suite {
        name: "systems",
        run: properties::systems,
    },
];

/// Names of all suites, in report order.
pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|s| s.name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSuite(pub String);

impl fmt::Display for UnknownSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown suite `{}` (known: {})",
            self.0,
            suite_names().collect::<Vec<_>>().join(", ")
        )
    }
}

impl Error for UnknownSuite {}

/// Stable per-suite stream id, so that a suite draws the same cases whether
/// it runs alone or with the others.
fn stream_of(name: &str) -> u64 {
    // FNV-1a
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn run(suite: &Suite, seed: u64) -> Outcome {
    let mut gen = Gen::with_stream(seed, stream_of(suite.name));
    let mut check = Check::default();
    if let Err(e) = (suite.run)(&mut gen, &mut check) {
        check.cases += 1;
        check.fail(format!("error: {e}"));
    }
    Outcome {
        name: suite.name,
        cases: check.cases,
        failed: check.failed,
        failures: check.failures,
        notes: check.notes,
    }
}

/// Runs the suites named in `only` (all of them when empty), in report order.
pub fn run_suite(seed: u64, only: &[&str]) -> Result<Report, UnknownSuite> {
    if let Some(bad) = only.iter().find(|n| !SUITES.iter().any(|s| s.name == **n)) {
        return Err(UnknownSuite(bad.to_string()));
    }
    let chosen: Vec<&Suite> = SUITES
        .iter()
        .filter(|s| only.is_empty() || only.contains(&s.name))
        .collect();
    let outcomes = chosen.par_iter().map(|s| run(s, seed)).collect();
    Ok(Report { seed, outcomes })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(Outcome::passed)
    }

    pub fn outcome(&self, name: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }

    /// One row per suite: name, status, cases, failures.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("suite\tstatus\tcases\tfailed\n");
        for o in &self.outcomes {
            let status = if o.passed() { "pass" } else { "fail" };
            let _ = writeln!(out, "{}\t{}\t{}\t{}", o.name, status, o.cases, o.failed);
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}", self.seed)?;
        let width = self
            .outcomes
            .iter()
            .map(|o| o.name.len())
            .max()
            .unwrap_or(0);
        for o in &self.outcomes {
            let status = if o.passed() { "pass" } else { "FAIL" };
            write!(f, "{:width$}  {status}  {} cases", o.name, o.cases)?;
            if o.failed > 0 {
                write!(f, ", {} failed", o.failed)?;
            }
            writeln!(f)?;
            for msg in &o.failures {
                writeln!(f, "    - {msg}")?;
            }
            if o.failed > o.failures.len() {
                writeln!(f, "    - ... {} more", o.failed - o.failures.len())?;
            }
            for n in &o.notes {
                writeln!(f, "    note: {n}")?;
            }
        }
        let failed = self.outcomes.iter().filter(|o| !o.passed()).count();
        writeln!(f, "{} suites, {} failed", self.outcomes.len(), failed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut names: Vec<&str> = suite_names().collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), SUITES.len());
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite(1, &["nope"]).is_err());
    }

    #[test]
    fn only_filters_and_is_deterministic() {
        let a = run_suite(42, &["disjunction", "witness"]).unwrap();
        assert_eq!(a.outcomes.len(), 2);
        assert_eq!(
            a.to_string(),
            run_suite(42, &["witness", "disjunction"])
                .unwrap()
                .to_string()
        );
        assert!(a.passed(), "{a}");
    }
}
