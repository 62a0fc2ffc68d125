//! Parallel against sequential execution of the two data-parallel layers:
//! cell evaluation inside one oracle run, and independent suite trials.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use conic_cond::instance::{generate, ConeKind, GenRequest, NormFile, Require};
use conic_cond::measures::{nu_oracle, ProblemInstance};
use conic_cond::oracle::OracleOptions;
use conic_cond::suites::{run_part, Part, SuiteConfig};

fn soc_instance() -> ProblemInstance {
    let req = GenRequest::new(1, ConeKind::Soc, 3, 2, Require::Feasible).norm(NormFile::L1);
    generate(&req).unwrap().to_instance().unwrap()
}

fn oracle(c: &mut Criterion) {
    let inst = soc_instance();
    let mut group = c.benchmark_group("nu_oracle_soc3_l1");
    group.sample_size(10);
    for parallel in [false, true] {
        let opts = OracleOptions {
            parallel,
            ..OracleOptions::with_tol(1e-3)
        };
        let label = if parallel { "parallel" } else { "sequential" };
        group.bench_with_input(BenchmarkId::from_parameter(label), &opts, |b, opts| {
            b.iter(|| nu_oracle(&inst, opts).unwrap())
        });
    }
    group.finish();
}

fn trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite_trials");
    group.sample_size(10);
    for parallel in [false, true] {
        let cfg = SuiteConfig {
            trials: 16,
            parallel,
            ..SuiteConfig::default()
        };
        let label = if parallel { "parallel" } else { "sequential" };
        group.bench_with_input(
            BenchmarkId::new("nu-lp-vs-oracle", label),
            &cfg,
            |b, cfg| b.iter(|| run_part(Part::NuLpVsOracle, cfg).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, oracle, trials);
criterion_main!(benches);
