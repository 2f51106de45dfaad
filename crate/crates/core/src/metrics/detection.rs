use std::collections::{BTreeMap, BTreeSet};

use crate::annotation::{BBox, BoxAnnotation, Detection};

/// IoU thresholds 0.50, 0.55, ..., 0.95.
pub fn coco_thresholds() -> [f64; 10] {
    std::array::from_fn(|i| (50 + 5 * i) as f64 / 100.0)
}

/// Intersection over union; 0 when the union is empty.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let iw = (a.right().min(b.right()) - a.x.max(b.x)).max(0.0);
    let ih = (a.bottom().min(b.bottom()) - a.y.max(b.y)).max(0.0);
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// Whether each detection, in descending score order, is a true positive.
///
/// Detections are sorted by score (stable, so ties keep input order). Each
/// one claims the highest-IoU GT of the same image and class that is still
/// unmatched and overlaps by at least `thresh`; among equal IoUs the first GT
/// wins.
pub fn match_detections(dets: &[Detection], gts: &[BoxAnnotation], thresh: f64) -> Vec<bool> {
    let mut order: Vec<&Detection> = dets.iter().collect();
    order.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut by_key: BTreeMap<(u64, u32), Vec<usize>> = BTreeMap::new();
    for (i, g) in gts.iter().enumerate() {
        by_key.entry((g.image_id, g.class_id)).or_default().push(i);
    }
    let mut taken = vec![false; gts.len()];
    order
        .iter()
        .map(|d| {
            let Some(cands) = by_key.get(&(d.image_id, d.class_id)) else {
                return false;
            };
            let db = d.bbox();
            let mut best: Option<(f64, usize)> = None;
            for &gi in cands {
                if taken[gi] {
                    continue;
                }
                let v = iou(&db, &gts[gi].bbox());
                if v >= thresh && best.is_none_or(|(bv, _)| v > bv) {
                    best = Some((v, gi));
                }
            }
            match best {
                Some((_, gi)) => {
                    taken[gi] = true;
                    true
                }
                None => false,
            }
        })
        .collect()
}

/// 101-point interpolated AP of score-ordered hit flags against `n_gt`
/// ground-truth boxes. Zero when there is no ground truth.
pub fn interpolated_ap(hits: &[bool], n_gt: usize) -> f64 {
    if n_gt == 0 {
        return 0.0;
    }
    let mut recall = Vec::with_capacity(hits.len());
    let mut precision = Vec::with_capacity(hits.len());
    let mut tp = 0usize;
    for (k, &hit) in hits.iter().enumerate() {
        tp += usize::from(hit);
        recall.push(tp as f64 / n_gt as f64);
        precision.push(tp as f64 / (k + 1) as f64);
    }
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut sum = 0.0;
    let mut k = 0;
    for i in 0..=100 {
        let r = i as f64 / 100.0;
        while k < recall.len() && recall[k] < r {
            k += 1;
        }
        if k == recall.len() {
            break;
        }
        sum += precision[k];
    }
    sum / 101.0
}

/// AP at one IoU threshold. Detections and GT are matched within their own
/// image and class, so passing several classes pools them into one curve.
pub fn average_precision(dets: &[Detection], gts: &[BoxAnnotation], thresh: f64) -> f64 {
    interpolated_ap(&match_detections(dets, gts, thresh), gts.len())
}

/// Per-class AP for every COCO threshold, classes taken from the GT.
pub fn ap_table(dets: &[Detection], gts: &[BoxAnnotation]) -> BTreeMap<u32, [f64; 10]> {
    let classes: BTreeSet<u32> = gts.iter().map(|g| g.class_id).collect();
    classes
        .into_iter()
        .map(|c| {
            let d: Vec<Detection> = dets.iter().filter(|d| d.class_id == c).copied().collect();
            let g: Vec<BoxAnnotation> = gts.iter().filter(|g| g.class_id == c).copied().collect();
            let row = coco_thresholds().map(|t| average_precision(&d, &g, t));
            (c, row)
        })
        .collect()
}

/// mAP@.5:.95: mean AP over classes with ground truth and the ten
/// thresholds. Zero when there is no ground truth at all.
pub fn map_coco(dets: &[Detection], gts: &[BoxAnnotation]) -> f64 {
    let table = ap_table(dets, gts);
    if table.is_empty() {
        return 0.0;
    }
    let n = (table.len() * 10) as f64;
    let mut sum = 0.0;
    for t in 0..10 {
        for row in table.values() {
            sum += row[t];
        }
    }
    sum / n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gt(image: u64, class: u32, x: f64, y: f64, w: f64, h: f64) -> BoxAnnotation {
        BoxAnnotation::new(image, class, BBox::new(x, y, w, h))
    }

    #[test]
    fn iou_examples() {
        let a = BBox::new(0.0, 0.0, 2.0, 2.0);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &BBox::new(5.0, 5.0, 1.0, 1.0)), 0.0);
        assert_eq!(iou(&a, &BBox::new(1.0, 1.0, 2.0, 2.0)), 1.0 / 7.0);
    }

    #[test]
    fn single_detection_cases() {
        let g = [gt(0, 0, 0.0, 0.0, 10.0, 10.0)];
        let perfect = [Detection::from_annotation(&g[0], 0.9)];
        assert_eq!(average_precision(&perfect, &g, 0.5), 1.0);
        let weak = [Detection::new(0, 0, BBox::new(0.0, 0.0, 3.0, 10.0), 0.9)];
        assert_eq!(average_precision(&weak, &g, 0.5), 0.0);
    }

    #[test]
    fn hand_derived_curve() {
        let g = [gt(0, 0, 0.0, 0.0, 10.0, 10.0), gt(0, 0, 20.0, 0.0, 10.0, 10.0)];
        let dets = [
            Detection::from_annotation(&g[0], 0.9),
            Detection::new(0, 0, BBox::new(50.0, 50.0, 5.0, 5.0), 0.8),
            Detection::from_annotation(&g[1], 0.7),
        ];
        let expected = (51.0 + 50.0 * (2.0 / 3.0)) / 101.0;
        assert!((average_precision(&dets, &g, 0.5) - expected).abs() < 1e-15);
    }

    #[test]
    fn threshold_counting_gives_half() {
        let g = [gt(0, 0, 0.0, 0.0, 10.0, 10.0)];
        let d = [Detection::new(0, 0, BBox::new(0.0, 0.0, 10.0, 7.2), 0.9)];
        assert_eq!(map_coco(&d, &g), 0.5);
    }

    #[test]
    fn perfect_and_empty() {
        let g = [gt(0, 0, 0.0, 0.0, 4.0, 4.0), gt(1, 3, 2.0, 2.0, 5.0, 9.0)];
        let d: Vec<_> = g.iter().map(|b| Detection::from_annotation(b, 0.5)).collect();
        assert_eq!(map_coco(&d, &g), 1.0);
        assert_eq!(map_coco(&[], &g), 0.0);
        assert_eq!(map_coco(&d, &[]), 0.0);
    }

    #[test]
    fn detections_for_gt_free_classes_are_ignored() {
        let g = [gt(0, 0, 0.0, 0.0, 4.0, 4.0)];
        let d = [
            Detection::from_annotation(&g[0], 0.5),
            Detection::new(0, 7, BBox::new(0.0, 0.0, 4.0, 4.0), 0.99),
        ];
        assert_eq!(map_coco(&d, &g), 1.0);
    }

    #[test]
    fn gt_is_matched_once() {
        let g = [gt(0, 0, 0.0, 0.0, 4.0, 4.0)];
        let d = [
            Detection::from_annotation(&g[0], 0.9),
            Detection::from_annotation(&g[0], 0.8),
        ];
        assert_eq!(match_detections(&d, &g, 0.5), [true, false]);
    }
}
