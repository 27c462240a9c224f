//! TOML configuration for `dforge pipeline`.
//!
//! Relative paths are resolved against the directory holding the config
//! file, so a config and its inputs can move together.
//!
//! ```toml
//! seed = 13
//! out_dir = "out"
//!
//! [dataset]
//! path = "mcq.json"
//! format = "mcq"
//!
//! [corpus]
//! path = "corpus.txt"
//!
//! [rap]
//! mode = "S"
//! anchoring = "with_gtd"
//!
//! [kg]
//! path = "kg.tsv"
//!
//! [rank]
//! ranker = "cosine"
//! embeddings = "embeddings.jsonl"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dforge_core::kagio::{Separators, DEFAULT_MAX_TRIPLETS};
use dforge_core::ranker::{LabelMode, DEFAULT_TOP_K};
use dforge_core::rap::RapConfig;

use crate::stages::{DatasetInput, RankerMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; absent means rayon's default.
    #[serde(default)]
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    pub dataset: DatasetInput,
    #[serde(default)]
    pub corpus: Option<CorpusSection>,
    #[serde(default)]
    pub rap: RapConfig,
    #[serde(default)]
    pub kg: Option<KgSection>,
    #[serde(default)]
    pub rank: RankSection,
    #[serde(default)]
    pub kag: KagSection,
    #[serde(default)]
    pub evaluate: Option<EvaluateSection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    pub path: PathBuf,
    /// `text` or `jsonl`; guessed from the extension when absent.
    #[serde(default)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KgSection {
    pub path: PathBuf,
    #[serde(default)]
    pub candidates: Option<PathBuf>,
    #[serde(default)]
    pub no_candidates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankSection {
    pub ranker: RankerMode,
    pub embeddings: Option<PathBuf>,
    pub confidences: Option<PathBuf>,
    pub k: usize,
    pub blend: Option<f64>,
    pub label_mode: LabelMode,
    /// Also write the classifier training rows.
    pub training_rows: bool,
}

impl Default for RankSection {
    fn default() -> Self {
        RankSection {
            ranker: RankerMode::Cosine,
            embeddings: None,
            confidences: None,
            k: DEFAULT_TOP_K,
            blend: None,
            label_mode: LabelMode::default(),
            training_rows: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KagSection {
    pub max_triplets: usize,
    pub separators: Separators,
}

impl Default for KagSection {
    fn default() -> Self {
        KagSection {
            max_triplets: DEFAULT_MAX_TRIPLETS,
            separators: Separators::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSection {
    pub predictions: PathBuf,
    #[serde(default = "default_eval_k")]
    pub k: usize,
}

fn default_eval_k() -> usize {
    3
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {}: {source}", path.display())]
    Toml {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg: PipelineConfig = toml::from_str(&raw).map_err(|source| ConfigError::Toml {
            path: path.to_owned(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out_dir);
        fix(&mut self.dataset.path);
        if let Some(c) = &mut self.corpus {
            fix(&mut c.path);
        }
        if let Some(kg) = &mut self.kg {
            fix(&mut kg.path);
            if let Some(c) = &mut kg.candidates {
                fix(c);
            }
        }
        if let Some(e) = &mut self.rank.embeddings {
            fix(e);
        }
        if let Some(c) = &mut self.rank.confidences {
            fix(c);
        }
        if let Some(ev) = &mut self.evaluate {
            fix(&mut ev.predictions);
        }
    }
}
