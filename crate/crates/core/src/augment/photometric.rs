use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::augment::Sample;
use crate::error::{Error, Result};

/// Scales every color value by `factor`, rounding and clamping to `[0, 255]`.
/// Attention, points and boxes are left alone.
pub fn brightness(s: &Sample, factor: f64) -> Result<Sample> {
    if !(0.1..=3.0).contains(&factor) {
        return Err(Error::OutOfRange {
            what: "brightness factor",
            value: factor,
            range: "[0.1, 3.0]",
        });
    }
    let mut out = s.clone();
    if factor == 1.0 {
        return Ok(out);
    }
    for v in &mut out.image.data {
        *v = (f64::from(*v) * factor).round().clamp(0.0, 255.0) as u8;
    }
    Ok(out)
}

/// Jitter magnitudes: hue shift bound in degrees, saturation and value
/// gain bounds as fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsvGains {
    pub dh: f64,
    pub ds: f64,
    pub dv: f64,
}

impl Default for HsvGains {
    /// Hue 0.015 of the full circle, saturation 0.7, value 0.4.
    fn default() -> Self {
        Self {
            dh: 0.015 * 360.0,
            ds: 0.7,
            dv: 0.4,
        }
    }
}

impl HsvGains {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=180.0).contains(&self.dh) {
            return Err(Error::OutOfRange {
                what: "hsv.dh",
                value: self.dh,
                range: "[0, 180] degrees",
            });
        }
        for (what, v) in [("hsv.ds", self.ds), ("hsv.dv", self.dv)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    what,
                    value: v,
                    range: "[0, 1]",
                });
            }
        }
        Ok(())
    }
}

/// `r, g, b` in `[0, 1]` to hue in degrees `[0, 360)`, saturation, value.
pub fn rgb_to_hsv(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let s = if max == 0.0 { 0.0 } else { delta / max };
    (h, s, max)
}

pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> (f64, f64, f64) {
    let c = v * s;
    let hp = h.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    (r + m, g + m, b + m)
}

/// Random hue shift and saturation/value gains, drawn once per call from
/// `seed`: `h += u0 * dh`, `s *= 1 + u1 * ds`, `v *= 1 + u2 * dv` with
/// `u ~ U[-1, 1]^3`.
pub fn hsv_jitter(s: &Sample, gains: HsvGains, seed: u64) -> Result<Sample> {
    gains.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
    let dh = u[0] * gains.dh;
    let gs = 1.0 + u[1] * gains.ds;
    let gv = 1.0 + u[2] * gains.dv;

    let mut out = s.clone();
    for px in out.image.data.chunks_exact_mut(3) {
        let (h, sat, val) = rgb_to_hsv(
            f64::from(px[0]) / 255.0,
            f64::from(px[1]) / 255.0,
            f64::from(px[2]) / 255.0,
        );
        let (r, g, b) = hsv_to_rgb(
            h + dh,
            (sat * gs).clamp(0.0, 1.0),
            (val * gv).clamp(0.0, 1.0),
        );
        for (d, v) in px.iter_mut().zip([r, g, b]) {
            *d = (v * 255.0).round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok(out)
}
