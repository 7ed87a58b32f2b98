use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use msl_core::counting::{count_functions_anti_involutive, count_models, phi_symmetric};
use msl_core::eval::{CoverMode, EvalOptions};
use msl_core::formula::parse_infer;
use msl_core::perspective::persp_eval_signed;
use msl_core::random::Gen;
use msl_core::translate::{bounded_fo_sat, SearchOptions};
use msl_core::{Evaluator, Formula, ModelSet};

fn corpus(gen: &mut Gen, n: usize, lc: bool) -> Vec<(ModelSet, Formula)> {
    (0..n)
        .map(|_| {
            let m = gen.fo_model_set(4, 3);
            let f = if lc {
                gen.lc_formula(3)
            } else {
                gen.fo_formula(3)
            };
            (m, f)
        })
        .collect()
}

fn evaluation(c: &mut Criterion) {
    let mut gen = Gen::new(7);
    let fo = corpus(&mut gen, 100, false);
    let lc = corpus(&mut gen, 100, true);
    let mut g = c.benchmark_group("eval");
    for (name, fast_path) in [("clauses", false), ("fast-path", true)] {
        let ev = Evaluator::new(EvalOptions {
            fast_path,
            ..EvalOptions::default()
        });
        g.bench_function(BenchmarkId::new("fo", name), |b| {
            b.iter(|| {
                fo.iter()
                    .filter(|(m, f)| ev.eval_pos(m, f).unwrap())
                    .count()
            })
        });
    }
    for (name, cover) in [
        ("three-way", CoverMode::ThreeWay),
        ("partition", CoverMode::Partition),
    ] {
        let ev = Evaluator::new(EvalOptions {
            cover,
            fast_path: false,
        });
        g.bench_function(BenchmarkId::new("lc-neg", name), |b| {
            b.iter(|| {
                lc.iter()
                    .filter(|(m, f)| ev.eval_neg(m, f).unwrap())
                    .count()
            })
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let (f, _) = parse_infer("(A x. E y. R(x,y) & A x. ~R(x,x))").unwrap();
    c.bench_function("fo-sat/serial-successor", |b| {
        b.iter(|| bounded_fo_sat(black_box(&f), 3, SearchOptions::default()).unwrap())
    });
}

fn counting(c: &mut Criterion) {
    let mut g = c.benchmark_group("count");
    g.sample_size(10);
    let sym = phi_symmetric();
    for n in [2, 3] {
        g.bench_with_input(BenchmarkId::new("symmetric", n), &n, |b, &n| {
            b.iter(|| count_models(&sym, n).unwrap())
        });
    }
    g.bench_function("anti-involutive-functions/7", |b| {
        b.iter(|| count_functions_anti_involutive(7).unwrap())
    });
    g.finish();
}

fn perspectives(c: &mut Criterion) {
    let mut gen = Gen::new(11);
    let cases: Vec<_> = (0..50)
        .map(|_| {
            let p = gen.perspective(3);
            (p, gen.modal_formula(4, 3))
        })
        .collect();
    c.bench_function("persp/signed-rank-3", |b| {
        b.iter(|| {
            cases
                .iter()
                .filter(|(p, f)| persp_eval_signed(p, f).unwrap().positive)
                .count()
        })
    });
}

criterion_group!(benches, evaluation, search, counting, perspectives);
criterion_main!(benches);
