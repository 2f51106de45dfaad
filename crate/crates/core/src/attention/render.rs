use crate::attention::{AttentionMap, DecayConfig, MapKind};
use crate::error::Result;
use crate::geometry::{FocusPointSet, Geometry};

/// Renders the instantaneous heatmap of one frame.
///
/// Each pixel `q` gets `max_p exp(-|q - p|^2 / (2 sigma^2))` over the frame's
/// focus points; pixels farther than `truncation_radius * sigma` from a point
/// receive nothing from it.
pub fn render_heatmap(
    points: &FocusPointSet,
    geometry: Geometry,
    cfg: &DecayConfig,
) -> Result<AttentionMap> {
    cfg.validate()?;
    points.ensure_within(geometry)?;

    let mut map = AttentionMap::zeros(geometry, MapKind::Instantaneous);
    let radius = cfg.truncation_radius * cfg.sigma;
    let radius_sq = radius * radius;
    let inv_two_var = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    let (w, h) = (geometry.width as i64, geometry.height as i64);

    for p in &points.points {
        let x0 = ((p.x - radius).ceil() as i64).max(0);
        let x1 = ((p.x + radius).floor() as i64).min(w - 1);
        let y0 = ((p.y - radius).ceil() as i64).max(0);
        let y1 = ((p.y + radius).floor() as i64).min(h - 1);
        for y in y0..=y1 {
            let dy = y as f64 - p.y;
            let row = &mut map.values[(y * w) as usize..((y + 1) * w) as usize];
            for x in x0..=x1 {
                let dx = x as f64 - p.x;
                let d2 = dx * dx + dy * dy;
                if d2 > radius_sq {
                    continue;
                }
                let v = (-d2 * inv_two_var).exp();
                let cell = &mut row[x as usize];
                if v > *cell {
                    *cell = v;
                }
            }
        }
    }
    Ok(map)
}
