//! Pipeline configuration: one JSON document holding every stage's settings,
//! with dotted-path overrides and per-stage seeds derived from one seed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::attention::DecayConfig;
use crate::augment::{AugmentOp, AugmentSpec};
use crate::error::{Error, Result};
use crate::fusion::{FusionMode, MarkStyle};
use crate::ingest::IngestConfig;
use crate::metrics::{DEFAULT_FACTORS, DEFAULT_FRACTIONS};
use crate::toytrain::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentConfig {
    pub ops: Vec<AugmentOp>,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            ops: AugmentSpec::default().ops,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionConfig {
    pub mode: FusionMode,
    pub mark: MarkStyle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub factors: Vec<f64>,
    pub fractions: Vec<f64>,
    /// Synthetic pool size for the budget sweep.
    pub budget_samples: usize,
    /// Held-out synthetic samples scored after every budget-sweep epoch.
    pub budget_held_out: usize,
    /// Side length of the square synthetic frames.
    pub budget_side: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            factors: DEFAULT_FACTORS.to_vec(),
            fractions: DEFAULT_FRACTIONS.to_vec(),
            budget_samples: 1000,
            budget_held_out: 200,
            budget_side: 16,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoConfig {
    /// Base for relative frame paths in manifests; the manifest's own
    /// directory when unset.
    pub frame_root: Option<PathBuf>,
}

impl IoConfig {
    pub fn resolve(&self, manifest: &Path, frame_path: &str) -> PathBuf {
        let p = Path::new(frame_path);
        if p.is_absolute() {
            return p.to_path_buf();
        }
        match &self.frame_root {
            Some(root) => root.join(p),
            None => manifest.parent().unwrap_or(Path::new("")).join(p),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub decay: DecayConfig,
    pub ingest: IngestConfig,
    pub augment: AugmentConfig,
    pub fusion: FusionConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub io: IoConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.decay.validate()?;
        self.ingest.validate()?;
        self.augment_spec().validate()?;
        self.fusion.mark.validate()?;
        self.train.validate()?;
        if self.eval.factors.is_empty() || self.eval.fractions.is_empty() {
            return Err(Error::Config("eval.factors and eval.fractions must be nonempty".into()));
        }
        if let Some(&f) = self.eval.factors.iter().find(|f| !(0.1..=3.0).contains(*f)) {
            return Err(Error::OutOfRange {
                what: "eval.factors",
                value: f,
                range: "[0.1, 3.0]",
            });
        }
        if let Some(&f) = self.eval.fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return Err(Error::OutOfRange {
                what: "eval.fractions",
                value: f,
                range: "(0, 1]",
            });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: Self = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingInput(path.to_path_buf())
            } else {
                Error::io(path, e)
            }
        })?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Loads `base` (or the defaults) and applies `key=value` overrides.
    pub fn resolve(base: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let cfg = match base {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        let mut value = serde_json::to_value(&cfg).expect("config serializes");
        for (key, raw) in overrides {
            apply_override(&mut value, key, raw)?;
        }
        Self::from_value(value)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex_digest(&Sha256::digest(bytes))
    }

    pub fn child_seed(&self, stage: &str) -> u64 {
        child_seed(self.seed, stage)
    }

    pub fn augment_spec(&self) -> AugmentSpec {
        AugmentSpec {
            ops: self.augment.ops.clone(),
            seed: self.child_seed("augment"),
        }
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Stable per-stage seed: the first 8 bytes of SHA-256(seed_le || stage).
pub fn child_seed(seed: u64, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stage.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// Sets the field at dotted path `key`. The raw text is read as JSON when it
/// parses, else as a string; a comma list fills an array-valued field.
pub fn apply_override(root: &mut Value, key: &str, raw: &str) -> Result<()> {
    let mut cur = root;
    for part in key.split('.') {
        cur = match cur {
            Value::Object(map) => map
                .get_mut(part)
                .ok_or_else(|| Error::Config(format!("unknown config key `{key}`")))?,
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        };
    }
    let parse = |s: &str| serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()));
    let new = match (&*cur, parse(raw)) {
        (Value::Array(_), Value::Array(v)) => Value::Array(v),
        (Value::Array(_), _) => Value::Array(raw.split(',').map(|s| parse(s.trim())).collect()),
        (_, v) => v,
    };
    *cur = new;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        assert_eq!(PipelineConfig::from_json(&cfg.to_json_pretty()).unwrap(), cfg);
        assert_eq!(cfg.train.epochs, 60);
        assert_eq!(cfg.train.batch_size, 16);
        assert_eq!(cfg.decay.rate, 0.17);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(PipelineConfig::from_json(r#"{"decay": {"rat": 0.2}}"#).is_err());
        assert!(PipelineConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let ov = [("decay.rat".to_string(), "0.2".to_string())];
        assert!(PipelineConfig::resolve(None, &ov).is_err());
    }

    #[test]
    fn overrides_apply() {
        let ov = [
            ("decay.rate".to_string(), "0.2".to_string()),
            ("eval.factors".to_string(), "0.5,1.0".to_string()),
            ("fusion.mode".to_string(), "marked".to_string()),
        ];
        let cfg = PipelineConfig::resolve(None, &ov).unwrap();
        assert_eq!(cfg.decay.rate, 0.2);
        assert_eq!(cfg.eval.factors, [0.5, 1.0]);
        assert_eq!(cfg.fusion.mode, FusionMode::Marked);
    }

    #[test]
    fn invalid_values_fail_validation() {
        let ov = [("decay.rate".to_string(), "1.5".to_string())];
        assert!(PipelineConfig::resolve(None, &ov).is_err());
    }

    #[test]
    fn child_seeds_are_stable_and_distinct() {
        assert_eq!(child_seed(7, "train"), child_seed(7, "train"));
        assert_ne!(child_seed(7, "train"), child_seed(7, "augment"));
        assert_ne!(child_seed(7, "train"), child_seed(8, "train"));
    }

    #[test]
    fn hash_tracks_content() {
        let a = PipelineConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
