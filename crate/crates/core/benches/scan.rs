use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hasse_core::group::parse_group_spec;
use hasse_core::scan::{scan, Execution, ScanMode, ScanOptions};

fn scan_execution(c: &mut Criterion) {
    let groups: Vec<_> = ["dihedral(4)", "quaternion8", "direct_product(cyclic(2),cyclic(4))", "dihedral(6)", "direct_product(cyclic(2),dihedral(4))"]
        .iter()
        .map(|s| parse_group_spec(s).unwrap())
        .collect();
    let mut g = c.benchmark_group("criteria-scan");
    g.sample_size(10);
    for (name, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel { jobs: None })] {
        let opts = ScanOptions { mode: ScanMode::Criteria, execution, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| b.iter(|| scan(&groups, opts).unwrap()));
    }
    g.finish();

    let lattice: Vec<_> = ["klein4", "dihedral(3)", "cyclic(6)", "dihedral(4)"].iter().map(|s| parse_group_spec(s).unwrap()).collect();
    let mut g = c.benchmark_group("lattice-scan");
    g.sample_size(10);
    for (name, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel { jobs: None })] {
        let opts = ScanOptions { mode: ScanMode::Lattice, execution, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| b.iter(|| scan(&lattice, opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, scan_execution);
criterion_main!(benches);
