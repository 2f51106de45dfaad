use rayon::prelude::*;

use crate::attention::{render_heatmap, AttentionMap, DecayConfig, MapKind};
use crate::error::{Error, Result};
use crate::geometry::{FocusPointSet, Geometry};

/// One step of the max-decay recurrence.
///
/// Without a previous map the heatmap is returned as is (`y_0 = h_0`);
/// otherwise every pixel becomes `max(h_t, (1 - r) * y_prev)`.
pub fn aggregate_step(
    h: &AttentionMap,
    prev: Option<&AttentionMap>,
    cfg: &DecayConfig,
) -> Result<AttentionMap> {
    let Some(prev) = prev else {
        return Ok(AttentionMap {
            kind: MapKind::Aggregated,
            ..h.clone()
        });
    };
    h.geometry().ensure_same(prev.geometry())?;
    let keep = cfg.retention();
    let values = h
        .values
        .iter()
        .zip(&prev.values)
        .map(|(&cur, &old)| cur.max(keep * old))
        .collect();
    Ok(AttentionMap {
        width: h.width,
        height: h.height,
        values,
        kind: MapKind::Aggregated,
    })
}

/// Streaming form of the recurrence for one sequence.
#[derive(Debug, Clone)]
pub struct Aggregator {
    cfg: DecayConfig,
    state: Option<AttentionMap>,
}

impl Aggregator {
    pub fn new(cfg: DecayConfig) -> Self {
        Self { cfg, state: None }
    }

    /// Folds in the next frame's heatmap and returns the aggregated map.
    pub fn push(&mut self, h: &AttentionMap) -> Result<&AttentionMap> {
        let next = aggregate_step(h, self.state.as_ref(), &self.cfg)?;
        Ok(self.state.insert(next))
    }

    /// Advances one tick with no fixation: the state only decays.
    pub fn skip(&mut self) {
        let keep = self.cfg.retention();
        if let Some(state) = self.state.as_mut() {
            state.values.iter_mut().for_each(|v| *v *= keep);
        }
    }

    pub fn current(&self) -> Option<&AttentionMap> {
        self.state.as_ref()
    }
}

/// Renders and aggregates a whole sequence, one output map per input set.
///
/// Frame indices must be strictly increasing. A jump in the index is treated
/// as that many frames without fixations, so the state keeps decaying across
/// the gap. Rendering runs in parallel; the fold itself is sequential, so the
/// result does not depend on the thread count.
pub fn aggregate_sequence(
    point_sets: &[FocusPointSet],
    geometry: Geometry,
    cfg: &DecayConfig,
) -> Result<Vec<AttentionMap>> {
    cfg.validate()?;
    for pair in point_sets.windows(2) {
        if pair[1].frame_index <= pair[0].frame_index {
            return Err(Error::Ordering {
                source_name: "point sets".into(),
                line: pair[1].frame_index as usize,
                reason: format!(
                    "frame index {} follows {}; indices must be strictly increasing",
                    pair[1].frame_index, pair[0].frame_index
                ),
            });
        }
    }

    let heatmaps = point_sets
        .par_iter()
        .map(|set| render_heatmap(set, geometry, cfg))
        .collect::<Result<Vec<_>>>()?;

    let mut agg = Aggregator::new(*cfg);
    let mut out = Vec::with_capacity(heatmaps.len());
    let mut last_index = None;
    for (set, h) in point_sets.iter().zip(&heatmaps) {
        if let Some(last) = last_index {
            for _ in last + 1..set.frame_index {
                agg.skip();
            }
        }
        out.push(agg.push(h)?.clone());
        last_index = Some(set.frame_index);
    }
    Ok(out)
}
