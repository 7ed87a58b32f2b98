//! The acceptance criteria, one line each. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use msl_core::suite::{run_suite, Outcome};

const SEED: u64 = 42;

struct Criterion {
    id: usize,
    name: &'static str,
    suites: &'static [&'static str],
    limit: Option<Duration>,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "flatness",
        suites: &["flatness"],
        limit: Some(Duration::from_secs(30)),
    },
    Criterion {
        id: 2,
        name: "disjunction example",
        suites: &["disjunction"],
        limit: None,
    },
    Criterion {
        id: 3,
        name: "existential variants",
        suites: &["variants"],
        limit: None,
    },
    Criterion {
        id: 4,
        name: "translation claim and reduction",
        suites: &["translation-claim", "reduction"],
        limit: Some(Duration::from_secs(300)),
    },
    Criterion {
        id: 5,
        name: "counting",
        suites: &["counting"],
        limit: Some(Duration::from_secs(120)),
    },
    Criterion {
        id: 6,
        name: "perspectives",
        suites: &["minor-exists", "witness", "even-odd"],
        limit: Some(Duration::from_secs(60)),
    },
    Criterion {
        id: 7,
        name: "cover strategies",
        suites: &["cover"],
        limit: None,
    },
    Criterion {
        id: 8,
        name: "systems",
        suites: &["systems"],
        limit: None,
    },
];

fn main() -> ExitCode {
    let mut all = true;
    for c in CRITERIA {
        let start = Instant::now();
        let report = run_suite(SEED, c.suites).expect("known suites");
        let took = start.elapsed();
        let cases: usize = report.outcomes.iter().map(|o| o.cases).sum();
        let failed: usize = report.outcomes.iter().map(|o| o.failed).sum();
        let in_time = c.limit.is_none_or(|l| took <= l);
        let ok = failed == 0 && in_time;
        all &= ok;
        let limit = c
            .limit
            .map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
        println!(
            "criterion {} {:<32} {}  {} cases, {} failed, {:.2}s{}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            cases,
            failed,
            took.as_secs_f64(),
            limit
        );
        for o in &report.outcomes {
            detail(o);
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn detail(o: &Outcome) {
    for msg in &o.failures {
        println!("    {}: {msg}", o.name);
    }
    for n in &o.notes {
        println!("    {}: note: {n}", o.name);
    }
}
