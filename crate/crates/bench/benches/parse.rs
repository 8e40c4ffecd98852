use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use dvc_core::taskspec::{parse, sample_instance, serialize};

const SPEC: &str = r#"
(task :name "bin-carrot" :lab "lab3"
  :goal (sequence pick placeBin)
  :object "carrot"
  :object-texture (fractal :h 0.00 0.08 :s 0.60 1.00 :v 0.40 1.00)
  :object-region (union (bbox -0.30 -0.10 -0.10 0.10) (bbox -0.35 0.10 -0.20 0.20))
  :receptacle "bin"
  :receptacle-region (union (bbox 0.10 -0.10 0.30 0.10))
  :camera (union (sph :r 0.80 1.00 :theta 37.5 52.5 :phi -15 15))
  :table-texture (jitter :base "wood" :h -0.02 0.02 :s -0.10 0.10 :v -0.10 0.10)
  :instruction "pick the carrot and place it in the bin")
"#;

fn bench(c: &mut Criterion) {
    c.bench_function("parse_spec", |b| b.iter(|| parse(black_box(SPEC)).unwrap()));
    let spec = parse(SPEC).unwrap();
    c.bench_function("serialize_spec", |b| b.iter(|| serialize(black_box(&spec))));
    c.bench_function("sample_instance", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            sample_instance(&spec, seed).unwrap()
        })
    });
}

criterion_group!(benches, bench);
criterion_main!(benches);
