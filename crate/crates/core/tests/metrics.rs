use std::collections::BTreeSet;

use attn_core::augment::Sample;
use attn_core::metrics::{
    average_precision, brightness_eval_sets, brightness_sweep, command_mse, iou, map_coco,
};
use attn_core::{BBox, BoxAnnotation, Detection, Frame, Geometry};
use proptest::prelude::*;

fn corners_iou(a: &BBox, b: &BBox) -> f64 {
    let (ax1, ay1, ax2, ay2) = (a.x, a.y, a.x + a.w, a.y + a.h);
    let (bx1, by1, bx2, by2) = (b.x, b.y, b.x + b.w, b.y + b.h);
    let w = f64::max(0.0, f64::min(ax2, bx2) - f64::max(ax1, bx1));
    let h = f64::max(0.0, f64::min(ay2, by2) - f64::max(ay1, by1));
    let inter = w * h;
    inter / (a.w * a.h + b.w * b.h - inter)
}

/// AP by explicit PR enumeration: interpolated precision at recall `r` is the
/// best precision among all curve points reaching `r`.
fn brute_ap(dets: &[Detection], gts: &[BoxAnnotation], thr: f64) -> f64 {
    if gts.is_empty() {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&i, &j| {
        dets[j]
            .score
            .partial_cmp(&dets[i].score)
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut used = vec![false; gts.len()];
    let mut points = Vec::new();
    let mut tp = 0.0;
    for (k, &i) in order.iter().enumerate() {
        let d = &dets[i];
        let mut best = None;
        let mut best_iou = -1.0;
        for (gi, g) in gts.iter().enumerate() {
            if used[gi] || g.image_id != d.image_id || g.class_id != d.class_id {
                continue;
            }
            let v = corners_iou(&d.bbox(), &g.bbox());
            if v >= thr && v > best_iou {
                best_iou = v;
                best = Some(gi);
            }
        }
        if let Some(gi) = best {
            used[gi] = true;
            tp += 1.0;
        }
        points.push((tp / gts.len() as f64, tp / (k + 1) as f64));
    }
    let mut sum = 0.0;
    for r in 0..=100 {
        let r = r as f64 / 100.0;
        sum += points
            .iter()
            .filter(|(rec, _)| *rec >= r)
            .map(|(_, p)| *p)
            .fold(0.0, f64::max);
    }
    sum / 101.0
}

fn brute_map(dets: &[Detection], gts: &[BoxAnnotation]) -> f64 {
    let classes: BTreeSet<u32> = gts.iter().map(|g| g.class_id).collect();
    if classes.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for t in 0..10 {
        let thr = (50 + 5 * t) as f64 / 100.0;
        for &c in &classes {
            let d: Vec<_> = dets.iter().filter(|d| d.class_id == c).copied().collect();
            let g: Vec<_> = gts.iter().filter(|g| g.class_id == c).copied().collect();
            sum += brute_ap(&d, &g, thr);
        }
    }
    sum / (10 * classes.len()) as f64
}

fn bbox() -> impl Strategy<Value = BBox> {
    (0u8..8, 0u8..8, 1u8..6, 1u8..6).prop_map(|(x, y, w, h)| BBox::new(x.into(), y.into(), w.into(), h.into()))
}

fn gts() -> impl Strategy<Value = Vec<BoxAnnotation>> {
    prop::collection::vec((0u64..3, 0u32..2, bbox()), 0..=5)
        .prop_map(|v| v.into_iter().map(|(i, c, b)| BoxAnnotation::new(i, c, b)).collect())
}

fn dets() -> impl Strategy<Value = Vec<Detection>> {
    prop::collection::vec((0u64..3, 0u32..2, bbox(), 1u8..=9), 0..=10).prop_map(|v| {
        v.into_iter()
            .map(|(i, c, b, s)| Detection::new(i, c, b, f64::from(s) / 10.0))
            .collect()
    })
}

/// Detections that copy or jitter the GT, so true positives are common.
fn near_gt_dets(gts: &[BoxAnnotation]) -> impl Strategy<Value = Vec<Detection>> {
    let gts = gts.to_vec();
    prop::collection::vec((0..gts.len().max(1), -1i8..=1, -1i8..=1, 0i8..=1, 1u8..=9), 0..=10).prop_map(
        move |v| {
            if gts.is_empty() {
                return Vec::new();
            }
            v.into_iter()
                .map(|(gi, dx, dy, dw, s)| {
                    let b = gts[gi].bbox();
                    let nb = BBox::new(b.x + f64::from(dx), b.y + f64::from(dy), b.w + f64::from(dw), b.h);
                    Detection::new(gts[gi].image_id, gts[gi].class_id, nb, f64::from(s) / 10.0)
                })
                .collect()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn map_matches_brute_force_on_random_boxes(g in gts(), d in dets()) {
        prop_assert_eq!(map_coco(&d, &g), brute_map(&d, &g));
    }

    #[test]
    fn map_matches_brute_force_near_gt((g, d) in gts().prop_flat_map(|g| { let s = near_gt_dets(&g); (Just(g), s) })) {
        prop_assert_eq!(map_coco(&d, &g), brute_map(&d, &g));
    }

    #[test]
    fn iou_is_symmetric_and_bounded(a in bbox(), b in bbox()) {
        prop_assert_eq!(iou(&a, &b), iou(&b, &a));
        prop_assert_eq!(iou(&a, &a), 1.0);
        let v = iou(&a, &b);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn map_ignores_input_order_with_distinct_scores(
        (g, d) in gts().prop_flat_map(|g| { let s = near_gt_dets(&g); (Just(g), s) }),
        perm_seed in any::<u64>(),
    ) {
        let mut d: Vec<Detection> = d;
        for (i, det) in d.iter_mut().enumerate() {
            det.score = (i as f64 + 1.0) / 100.0;
        }
        let base = map_coco(&d, &g);
        let mut shuffled = d.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            let j = (perm_seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        prop_assert_eq!(map_coco(&shuffled, &g), base);
    }

    #[test]
    fn adding_a_top_true_positive_never_lowers_ap(g in gts(), d in dets()) {
        let g: Vec<_> = g.into_iter().map(|mut b| { b.class_id = 0; b }).collect();
        let d: Vec<_> = d.into_iter().map(|mut b| { b.class_id = 0; b }).collect();
        let free = g.iter().find(|gt| {
            d.iter().all(|det| det.image_id != gt.image_id || iou(&det.bbox(), &gt.bbox()) < 0.5)
        });
        prop_assume!(free.is_some());
        let mut more = d.clone();
        more.push(Detection::from_annotation(free.unwrap(), 1.0));
        prop_assert!(average_precision(&more, &g, 0.5) >= average_precision(&d, &g, 0.5));
    }

    #[test]
    fn command_mse_properties(
        pairs in prop::collection::vec(((-1.0f64..1.0, -1.0f64..1.0), (-1.0f64..1.0, -1.0f64..1.0)), 1..20),
    ) {
        let p: Vec<[f64; 2]> = pairs.iter().map(|((a, b), _)| [*a, *b]).collect();
        let t: Vec<[f64; 2]> = pairs.iter().map(|(_, (a, b))| [*a, *b]).collect();
        let e = command_mse(&p, &t).unwrap();
        prop_assert!(e >= 0.0);
        prop_assert_eq!(command_mse(&p, &p).unwrap(), 0.0);
        let doubled: Vec<[f64; 2]> = p.iter().zip(&t).map(|(a, b)| [b[0] + 2.0 * (a[0] - b[0]), b[1] + 2.0 * (a[1] - b[1])]).collect();
        let e2 = command_mse(&doubled, &t).unwrap();
        prop_assert!((e2 - 4.0 * e).abs() <= 1e-9 * (1.0 + e));
    }
}

#[test]
fn hand_derived_pr_curve() {
    let g = [
        BoxAnnotation::new(0, 0, BBox::new(0.0, 0.0, 10.0, 10.0)),
        BoxAnnotation::new(0, 0, BBox::new(20.0, 0.0, 10.0, 10.0)),
    ];
    let d = [
        Detection::from_annotation(&g[0], 0.9),
        Detection::new(0, 0, BBox::new(40.0, 40.0, 5.0, 5.0), 0.8),
        Detection::from_annotation(&g[1], 0.7),
    ];
    let oracle = brute_ap(&d, &g, 0.5);
    assert_eq!(average_precision(&d, &g, 0.5), oracle);
    assert!((oracle - (51.0 + 50.0 * 2.0 / 3.0) / 101.0).abs() < 1e-15);
}

/// Scenes with one gray object each; the "detector" finds an object only if
/// its mean intensity clears a fixed threshold, so darkening can only lose
/// detections.
#[test]
fn darker_images_never_score_higher() {
    let g = Geometry::new(32, 32);
    let mut samples = Vec::new();
    let mut gts = Vec::new();
    for i in 0..10u64 {
        let mut frame = Frame::filled(g, 3, 20);
        let level = 100 + 12 * i as u8;
        let b = BBox::new(4.0 + i as f64, 6.0, 10.0, 8.0);
        for y in 6..14 {
            for x in (4 + i as usize)..(14 + i as usize) {
                frame.pixel_mut(x, y).fill(level);
            }
        }
        let ann = BoxAnnotation::new(i, 0, b);
        let mut s = Sample::new(frame);
        s.boxes.push(ann);
        gts.push(ann);
        samples.push(s);
    }
    let factors = [0.75, 1.0, 1.85];
    let sets = brightness_eval_sets(&samples, &factors).unwrap();
    let detect = |set: &[Sample]| -> Vec<Detection> {
        set.iter()
            .flat_map(|s| s.boxes.iter().map(move |b| (s, b)))
            .filter_map(|(s, b)| {
                let mut sum = 0.0;
                let mut n = 0.0;
                for y in b.y as usize..(b.y + b.h) as usize {
                    for x in b.x as usize..(b.x + b.w) as usize {
                        sum += f64::from(s.image.pixel(x, y)[0]);
                        n += 1.0;
                    }
                }
                let mean = sum / n;
                (mean >= 120.0).then(|| Detection::from_annotation(b, mean / 255.0))
            })
            .collect()
    };
    let report = brightness_sweep(&gts, &factors, |f| {
        factors.iter().position(|&x| x == f).map(|i| detect(&sets[i]))
    })
    .unwrap();
    assert_eq!(report.conditions(), ["0.75", "1", "1.85"]);
    let m = |c: &str| report.get(c).unwrap().metric;
    assert!(m("0.75") <= m("1"));
    assert!(m("0.75") < 1.0);
}
