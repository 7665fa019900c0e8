use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use topofl::rng::stream;
use topofl::scenarios::{generate_scenario, ScenarioConfig};
use topofl::tda::*;

fn client_cloud(n: usize) -> PointCloud {
    let s = generate_scenario(&ScenarioConfig::healthcare(1)).unwrap();
    let rows: Vec<Vec<f64>> = s.clients.iter().flat_map(|c| c.train.features().to_vec()).take(n).collect();
    PointCloud::new(rows).unwrap()
}

fn homology(c: &mut Criterion) {
    let mut g = c.benchmark_group("homology");
    for n in [40, 80, 120] {
        let cloud = client_cloud(n);
        let dist = pairwise_distances(&cloud);
        let all: Vec<f64> = dist.edges().map(|(_, _, d)| d).collect();
        let scale = percentile(&all, 95.0).unwrap();
        g.bench_with_input(BenchmarkId::new("h0", n), &dist, |b, d| b.iter(|| h0_persistence(black_box(d))));
        g.bench_with_input(BenchmarkId::new("h1", n), &dist, |b, d| {
            b.iter(|| h1_persistence(black_box(d), scale, 200).unwrap())
        });
    }
    g.finish();
}

fn descriptors(c: &mut Criterion) {
    let cloud = client_cloud(200);
    c.bench_function("descriptor/n_sub=80", |b| {
        b.iter(|| {
            let mut rng = stream(&[7]);
            descriptor(black_box(&cloud), 80, BETTI_RESOLUTION, &mut rng).unwrap()
        })
    });
    let a = cloud_topology(&cloud, 80, &mut stream(&[1])).unwrap().diagram;
    let b = cloud_topology(&cloud, 80, &mut stream(&[2])).unwrap().diagram;
    c.bench_function("wasserstein/h0", |bench| {
        bench.iter(|| wasserstein_distance(black_box(&a), black_box(&b), 0, 2.0).unwrap())
    });
    c.bench_function("bottleneck/h0", |bench| bench.iter(|| bottleneck_distance(black_box(&a), black_box(&b), 0)));
}

criterion_group!(benches, homology, descriptors);
criterion_main!(benches);
