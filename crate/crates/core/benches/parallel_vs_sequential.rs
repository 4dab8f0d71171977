use std::str::FromStr;

use blowup_core::cohomology::oracle_sweep;
use blowup_core::exceptional::{enumerate_constructible, EnumerationConfig};
use blowup_core::existence::{weak_dl_check, ClauseBWindow};
use blowup_core::{ChernCharacter, Execution};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn atlas_bfs(c: &mut Criterion) {
    let mut group = c.benchmark_group("atlas_bfs");
    group.sample_size(10);
    let config = EnumerationConfig::new(50, 6);
    for m in [2usize, 5] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |b, &m| {
                b.iter(|| enumerate_constructible(black_box(m), &config, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| oracle_sweep(black_box(3), 5, 3, exec)));
    }
    group.finish();
}

fn weak_dl_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("weak_dl_scan");
    group.sample_size(10);
    let atlas = enumerate_constructible(2, &EnumerationConfig::new(40, 5), Execution::Parallel).unwrap();
    let chars: Vec<ChernCharacter> = ["2|3;0,0|-3/2", "3|1;1,0|-5/2", "4|2;1,1|-3", "5|-1;2,0|-4"]
        .iter()
        .map(|s| ChernCharacter::from_str(s).unwrap())
        .collect();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                for v in &chars {
                    black_box(weak_dl_check(v, &atlas, ClauseBWindow::Mirrored, exec).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, atlas_bfs, sweep, weak_dl_scan);
criterion_main!(benches);
