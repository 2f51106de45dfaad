use attn_core::augment::{
    augment_batch, brightness, flip_h, hsv_jitter, mosaic, translate_scale, AugmentOp, AugmentSpec, HsvGains,
    Sample,
};
use attn_core::{BBox, BoxAnnotation, FocusPointSet, Frame, Geometry, Point, QuantizedMap};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn sample(g: Geometry) -> impl Strategy<Value = Sample> {
    let n = g.pixels();
    (
        prop::collection::vec(any::<u8>(), n * 3),
        prop::collection::vec(any::<u8>(), n),
        prop::collection::vec((0..g.width, 0..g.height), 0..4),
        prop::collection::vec((0..g.width, 0..g.height, 1..=g.width, 1..=g.height), 0..4),
    )
        .prop_map(move |(rgb, att, pts, boxes)| {
            let mut s = Sample::new(Frame::new(g, 3, rgb).unwrap());
            s.attention = Some(QuantizedMap {
                width: g.width,
                height: g.height,
                values: att,
            });
            s.points = Some(FocusPointSet::new(
                0,
                pts.into_iter().map(|(x, y)| Point::new(x as f64, y as f64)).collect(),
            ));
            s.boxes = boxes
                .into_iter()
                .map(|(x, y, w, h)| {
                    let w = w.min(g.width - x);
                    let h = h.min(g.height - y);
                    BoxAnnotation::new(0, 0, BBox::new(x as f64, y as f64, w as f64, h as f64))
                })
                .collect();
            s
        })
}

const G: Geometry = Geometry {
    height: 12,
    width: 17,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flip_is_an_involution(s in sample(G)) {
        prop_assert_eq!(flip_h(&flip_h(&s)), s);
    }

    #[test]
    fn unit_brightness_is_identity(s in sample(G)) {
        prop_assert_eq!(brightness(&s, 1.0).unwrap(), s);
    }

    #[test]
    fn photometric_ops_leave_annotations(s in sample(G), f in 0.1f64..3.0, seed in any::<u64>()) {
        for out in [brightness(&s, f).unwrap(), hsv_jitter(&s, HsvGains::default(), seed).unwrap()] {
            prop_assert_eq!(&out.attention, &s.attention);
            prop_assert_eq!(&out.points, &s.points);
            prop_assert_eq!(&out.boxes, &s.boxes);
        }
    }

    #[test]
    fn warps_never_add_boxes(s in sample(G), fx in -0.2f64..0.2, fy in -0.2f64..0.2, scale in 0.5f64..1.5) {
        let out = translate_scale(&s, fx, fy, scale).unwrap();
        prop_assert!(out.boxes.len() <= s.boxes.len());
        for b in &out.boxes {
            prop_assert!(b.x >= 0.0 && b.y >= 0.0);
            prop_assert!(b.x + b.w <= G.width as f64 + 1e-9);
            prop_assert!(b.y + b.h <= G.height as f64 + 1e-9);
            prop_assert!(b.w * b.h >= 4.0);
        }
        if let Some(points) = &out.points {
            prop_assert!(points.ensure_within(G).is_ok());
        }
    }

    #[test]
    fn mosaic_keeps_bounds(a in sample(G), b in sample(G), c in sample(G), d in sample(G), seed in any::<u64>()) {
        let total = a.boxes.len() + b.boxes.len() + c.boxes.len() + d.boxes.len();
        let out = mosaic(&[a, b, c, d], seed, false).unwrap();
        let canvas = Geometry::new(2 * G.height, 2 * G.width);
        prop_assert_eq!(out.geometry(), canvas);
        prop_assert!(out.boxes.len() <= total);
        prop_assert!(out.points.as_ref().unwrap().ensure_within(canvas).is_ok());
    }
}

#[test]
fn batch_output_is_independent_of_thread_count() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let batch: Vec<Sample> = (0..12)
        .map(|_| sample(G).new_tree(&mut runner).unwrap().current())
        .collect();
    let spec = AugmentSpec {
        ops: vec![
            AugmentOp::Hsv {
                dh: 5.4,
                ds: 0.7,
                dv: 0.4,
            },
            AugmentOp::FlipH,
            AugmentOp::Translate { fx: 0.1, fy: -0.1 },
            AugmentOp::Mosaic { rescale: true },
        ],
        seed: 99,
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| augment_batch(&batch, &spec).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(8));
}
