use std::hint::black_box;

use attn_core::attention::{aggregate_sequence, render_heatmap};
use attn_core::metrics::map_coco;
use attn_core::toytrain::Tensor;
use attn_core::{BBox, BoxAnnotation, DecayConfig, Detection, FocusPointSet, Geometry, Point, TinyNet, TinyNetConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn points(index: u64, g: Geometry, n: usize) -> FocusPointSet {
    let pts = (0..n)
        .map(|k| {
            let t = (index as usize * 7 + k * 13) as f64;
            Point::new((t * 37.0) % g.width as f64, (t * 23.0) % g.height as f64)
        })
        .collect();
    FocusPointSet::new(index, pts)
}

fn heatmaps(c: &mut Criterion) {
    let g = Geometry::new(848, 480);
    let cfg = DecayConfig::default();
    let set = points(0, g, 4);
    c.bench_function("render_heatmap 480x848 4 points", |b| {
        b.iter(|| render_heatmap(black_box(&set), g, &cfg).unwrap())
    });

    let small = Geometry::new(212, 120);
    let sets: Vec<_> = (0..30).map(|i| points(i, small, 3)).collect();
    c.bench_function("aggregate_sequence 30 frames 120x212", |b| {
        b.iter(|| aggregate_sequence(black_box(&sets), small, &cfg).unwrap())
    });
}

fn detection_metrics(c: &mut Criterion) {
    let mut gts = Vec::new();
    let mut dets = Vec::new();
    for image in 0..200u64 {
        for k in 0..5u32 {
            let b = BBox::new(k as f64 * 20.0, image as f64 % 50.0, 15.0, 12.0);
            gts.push(BoxAnnotation::new(image, k % 3, b));
            let shifted = BBox::new(b.x + (k as f64 * 0.7), b.y + 1.0, b.w, b.h);
            dets.push(Detection::new(image, k % 3, shifted, 0.3 + 0.1 * k as f64));
        }
    }
    c.bench_function("map_coco 1000 boxes", |b| b.iter(|| map_coco(black_box(&dets), &gts)));
}

fn network(c: &mut Criterion) {
    let cfg = TinyNetConfig {
        input_channels: 3,
        base_width: 4,
        depth: 2,
        leaky_slope: 0.1,
    };
    let net = TinyNet::init(cfg, 0).unwrap();
    let shape = [4, 3, 32, 32];
    let x = Tensor::from_vec(shape, (0..shape.iter().product()).map(|i| (i % 17) as f64 / 17.0).collect()).unwrap();
    c.bench_function("tinynet forward 4x3x32x32", |b| b.iter(|| net.forward(black_box(&x)).unwrap()));
    c.bench_function("tinynet forward+backward 4x3x32x32", |b| {
        b.iter(|| {
            let (out, cache) = net.forward_cached(black_box(&x)).unwrap();
            net.backward(&cache, &out)
        })
    });
}

criterion_group!(benches, heatmaps, detection_metrics, network);
criterion_main!(benches);
