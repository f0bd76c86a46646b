use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dtou_bench::{generate_policies, Variable, WorkloadSpec};
use dtou_core::reasoner::{check_conformance, check_obligations, derive_policies, Parallelism};
use dtou_core::{KnowledgeBase, ReasonerOptions};

fn knowledge_base(variable: Variable, value: usize) -> KnowledgeBase {
    let spec = WorkloadSpec::new(variable, vec![value]);
    let g = generate_policies(&spec, value, 7).parse().unwrap();
    KnowledgeBase::assemble(&g.context, &g.app, &g.data).unwrap()
}

fn sequential_vs_parallel(c: &mut Criterion) {
    let cases = [(Variable::AppData, 400), (Variable::DataAttributes, 1000), (Variable::Outputs, 100)];
    for (variable, value) in cases {
        let kb = knowledge_base(variable, value);
        let mut group = c.benchmark_group(format!("{variable}={value}"));
        group.sample_size(20);
        for parallelism in [Parallelism::Sequential, Parallelism::Parallel] {
            let opts = ReasonerOptions { parallelism, ..ReasonerOptions::default() };
            let label = format!("{parallelism:?}");
            group.bench_with_input(BenchmarkId::new("conformance", &label), &opts, |b, o| {
                b.iter(|| check_conformance(&kb, o))
            });
            group.bench_with_input(BenchmarkId::new("obligations", &label), &opts, |b, o| {
                b.iter(|| check_obligations(&kb, o))
            });
            group.bench_with_input(BenchmarkId::new("derivation", &label), &opts, |b, o| {
                b.iter(|| derive_policies(&kb, o).unwrap())
            });
        }
        group.finish();
    }
}

criterion_group!(benches, sequential_vs_parallel);
criterion_main!(benches);
