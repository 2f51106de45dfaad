use attn_core::attention::{aggregate_sequence, quantize, render_heatmap, Aggregator};
use attn_core::{AttentionMap, DecayConfig, FocusPointSet, Geometry, MapKind, Point};
use proptest::prelude::*;

/// Dense rendering with no truncation at all.
fn dense(points: &FocusPointSet, g: Geometry, sigma: f64) -> Vec<f64> {
    let mut out = vec![0.0; g.pixels()];
    for y in 0..g.height {
        for x in 0..g.width {
            for p in &points.points {
                let d2 = (x as f64 - p.x).powi(2) + (y as f64 - p.y).powi(2);
                out[y * g.width + x] = f64::max(out[y * g.width + x], (-d2 / (2.0 * sigma * sigma)).exp());
            }
        }
    }
    out
}

fn point_set(g: Geometry, index: u64) -> impl Strategy<Value = FocusPointSet> {
    let (w, h) = (g.width as f64, g.height as f64);
    prop::collection::vec((0.0..w, 0.0..h), 0..=4).prop_map(move |pts| {
        FocusPointSet::new(index, pts.into_iter().map(|(x, y)| Point::new(x.min(w - 1.0), y.min(h - 1.0))).collect())
    })
}

fn sequence() -> impl Strategy<Value = (Geometry, Vec<FocusPointSet>)> {
    (1usize..=12, 1usize..=12, 1usize..=10).prop_flat_map(|(h, w, n)| {
        let g = Geometry::new(h, w);
        let sets: Vec<_> = (0..n as u64).map(|i| point_set(g, i)).collect();
        (Just(g), sets)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aggregate_matches_unrolled_formula((g, sets) in sequence(), rate in 0.01f64..0.99) {
        let cfg = DecayConfig { rate, ..DecayConfig::default() };
        let out = aggregate_sequence(&sets, g, &cfg).unwrap();
        let hs: Vec<_> = sets.iter().map(|s| render_heatmap(s, g, &cfg).unwrap()).collect();
        for (t, y) in out.iter().enumerate() {
            for i in 0..g.pixels() {
                let expect = (0..=t)
                    .map(|k| (1.0 - rate).powi((t - k) as i32) * hs[k].values[i])
                    .fold(0.0, f64::max);
                prop_assert!((y.values[i] - expect).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn aggregation_stays_in_unit_range((g, sets) in sequence()) {
        let out = aggregate_sequence(&sets, g, &DecayConfig::default()).unwrap();
        for y in &out {
            prop_assert!(y.values.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn truncated_rendering_quantizes_like_dense(set in point_set(Geometry::new(24, 24), 0), sigma in 0.5f64..3.0) {
        let g = Geometry::new(24, 24);
        let cfg = DecayConfig { sigma, truncation_radius: 4.0, ..DecayConfig::default() };
        let fast = render_heatmap(&set, g, &cfg).unwrap().quantize().unwrap();
        let exact = AttentionMap::from_values(g, dense(&set, g, sigma), MapKind::Instantaneous).unwrap();
        prop_assert_eq!(fast, quantize(&exact).unwrap());
    }

    #[test]
    fn peak_is_one_at_integer_points(x in 0usize..16, y in 0usize..16) {
        let g = Geometry::new(16, 16);
        let set = FocusPointSet::new(0, vec![Point::new(x as f64, y as f64)]);
        let m = render_heatmap(&set, g, &DecayConfig::default()).unwrap();
        prop_assert_eq!(m.get(x, y), 1.0);
        prop_assert_eq!(m.max_value(), 1.0);
    }
}

#[test]
fn one_second_residual_is_below_one_level() {
    let g = Geometry::new(5, 5);
    let cfg = DecayConfig::default();
    let mut sets = vec![FocusPointSet::new(0, vec![Point::new(2.0, 2.0)])];
    sets.extend((1..=30).map(|i| FocusPointSet::empty(i)));
    let out = aggregate_sequence(&sets, g, &cfg).unwrap();
    let residual = out[30].get(2, 2);
    assert!((residual - 0.83f64.powi(30)).abs() < 1e-12);
    assert!((residual - 0.003_735).abs() < 1e-6);
    assert!(residual < 1.0 / 255.0);
}

#[test]
fn aggregator_skip_matches_empty_frames() {
    let g = Geometry::new(6, 6);
    let cfg = DecayConfig::default();
    let first = FocusPointSet::new(0, vec![Point::new(1.0, 1.0)]);
    let h0 = render_heatmap(&first, g, &cfg).unwrap();
    let empty = render_heatmap(&FocusPointSet::empty(1), g, &cfg).unwrap();

    let mut a = Aggregator::new(cfg);
    a.push(&h0).unwrap();
    a.skip();
    a.skip();
    let mut b = Aggregator::new(cfg);
    b.push(&h0).unwrap();
    b.push(&empty).unwrap();
    b.push(&empty).unwrap();
    assert_eq!(a.current().unwrap().values, b.current().unwrap().values);
}
