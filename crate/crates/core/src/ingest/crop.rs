use crate::geometry::{FocusPointSet, Frame, Geometry, Point};

/// Rows removed from the top of a frame of height `h`.
pub fn upper_third_rows(h: usize) -> usize {
    h / 3
}

pub fn cropped_geometry(g: Geometry) -> Geometry {
    Geometry::new(g.height - upper_third_rows(g.height), g.width)
}

/// Shifts points up by the cropped rows and drops those above the cut.
pub fn crop_points(points: &FocusPointSet, frame_height: usize) -> FocusPointSet {
    let cut = upper_third_rows(frame_height) as f64;
    FocusPointSet::new(
        points.frame_index,
        points
            .points
            .iter()
            .filter(|p| p.y >= cut)
            .map(|p| Point::new(p.x, p.y - cut))
            .collect(),
    )
}

/// Discards the top `floor(H / 3)` rows of `frame` and moves `points` along.
pub fn crop_upper_third(frame: &Frame, points: &FocusPointSet) -> (Frame, FocusPointSet) {
    let cut = upper_third_rows(frame.height);
    let stride = frame.width * frame.channels;
    let cropped = Frame {
        height: frame.height - cut,
        data: frame.data[cut * stride..].to_vec(),
        ..frame.clone()
    };
    (cropped, crop_points(points, frame.height))
}
