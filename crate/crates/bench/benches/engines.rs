use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use pegmachine_bench::{anbncn, anbncn_grammar};
use pegmachine_core::cooksim::run_linear_table;
use pegmachine_core::peg::{accepts, interpret_naive, DEFAULT_BUDGET};
use pegmachine_core::pppda::{builtin_anbncn, desugar_hat_moves, run_table, Table};
use pegmachine_core::translate::compile;

const SIZES: [usize; 4] = [16, 64, 256, 1024];

fn machine_engines(c: &mut Criterion) {
    let m = desugar_hat_moves(&builtin_anbncn());
    let table = Table::new(&m).unwrap();
    let mut group = c.benchmark_group("anbncn-machine");
    for n in SIZES {
        let tape = table.encode(&anbncn(n)).unwrap();
        group.throughput(Throughput::Elements(3 * n as u64));
        group.bench_with_input(BenchmarkId::new("direct", n), &tape, |b, tape| {
            b.iter(|| run_table(&table, black_box(tape.clone()), u64::MAX))
        });
        group.bench_with_input(BenchmarkId::new("cook", n), &tape, |b, tape| {
            b.iter(|| run_linear_table(&table, black_box(tape)))
        });
    }
    group.finish();
}

fn grammar_engines(c: &mut Criterion) {
    let g = anbncn_grammar();
    let m = compile(&g).unwrap();
    let table = Table::new(&m).unwrap();
    let mut group = c.benchmark_group("anbncn-grammar");
    for n in SIZES {
        let w = anbncn(n);
        let tape = table.encode(&w).unwrap();
        group.throughput(Throughput::Elements(3 * n as u64));
        group.bench_with_input(BenchmarkId::new("naive", n), &w, |b, w| {
            b.iter(|| interpret_naive(&g, g.rule(g.axiom()), black_box(w), 0, DEFAULT_BUDGET))
        });
        group.bench_with_input(BenchmarkId::new("packrat", n), &w, |b, w| b.iter(|| accepts(&g, black_box(w))));
        group.bench_with_input(BenchmarkId::new("compiled-cook", n), &tape, |b, tape| {
            b.iter(|| run_linear_table(&table, black_box(tape)))
        });
    }
    group.finish();
}

criterion_group!(benches, machine_engines, grammar_engines);
criterion_main!(benches);
