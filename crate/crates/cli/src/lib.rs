//! Stage implementations behind the `dforge` binary.
//!
//! Every stage is a plain function taking an argument struct, so the
//! pipeline can be driven from tests without spawning processes.

pub mod config;
pub mod error;
pub mod stages;

use std::path::PathBuf;
use std::str::FromStr;

use dforge_core::corpus::CorpusFormat;

pub use config::PipelineConfig;
pub use error::{exit, StageError, StageResult};

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "DFORGE_THREADS";

/// Sizes the global rayon pool from `explicit`, else from `DFORGE_THREADS`.
/// Calling it after the pool exists is a no-op.
pub fn configure_threads(explicit: Option<usize>) {
    let n = explicit.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(n) = n.filter(|&n| n > 0) {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::debug!("thread pool already initialised");
        }
    }
}

/// Artifact paths written by [`run_pipeline`], relative to `out_dir`.
pub mod files {
    pub const INDEX: &str = "corpus.idx";
    pub const RAP: &str = "rap.jsonl";
    pub const RETRIEVED: &str = "retrieved.jsonl";
    pub const EMBED_REQUESTS: &str = "embed_requests.jsonl";
    pub const RANKED: &str = "ranked.jsonl";
    pub const TRAINING_ROWS: &str = "triplet_labels.jsonl";
    pub const KAG: &str = "kag.jsonl";
    pub const REPORT: &str = "report.json";
    pub const REPORT_TABLE: &str = "report.txt";
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineOutcome {
    pub written: Vec<PathBuf>,
    pub report: Option<dforge_core::EvalReport>,
}

/// Runs every stage the config has inputs for, in dependency order.
pub fn run_pipeline(cfg: &PipelineConfig) -> StageResult<PipelineOutcome> {
    use stages::*;

    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| StageError::Usage {
        stage: "pipeline",
        message: format!("cannot create {}: {e}", cfg.out_dir.display()),
    })?;
    let out = |name: &str| cfg.out_dir.join(name);
    let mut outcome = PipelineOutcome::default();

    if let Some(corpus) = &cfg.corpus {
        let format = corpus
            .format
            .as_deref()
            .map(CorpusFormat::from_str)
            .transpose()
            .map_err(|e| StageError::Usage {
                stage: "ingest",
                message: e.to_string(),
            })?;
        ingest(&IngestArgs {
            corpus: corpus.path.clone(),
            format,
            out: out(files::INDEX),
            seed: cfg.seed,
        })?;
        outcome.written.push(out(files::INDEX));
        build_rap(&BuildRapArgs {
            datasets: vec![cfg.dataset.clone()],
            index: out(files::INDEX),
            config: cfg.rap.clone(),
            out: out(files::RAP),
            seed: cfg.seed,
        })?;
        outcome.written.push(out(files::RAP));
    }

    let mut ranked = None;
    if let Some(kg) = &cfg.kg {
        retrieve(&RetrieveArgs {
            dataset: cfg.dataset.clone(),
            kg: kg.path.clone(),
            candidates: kg.candidates.clone(),
            no_candidates: kg.no_candidates,
            out: out(files::RETRIEVED),
            embed_requests: Some(out(files::EMBED_REQUESTS)),
            seed: cfg.seed,
        })?;
        outcome.written.push(out(files::RETRIEVED));
        outcome.written.push(out(files::EMBED_REQUESTS));
        let needs_embeddings = matches!(cfg.rank.ranker, RankerMode::Cosine | RankerMode::Classifier);
        if needs_embeddings && cfg.rank.embeddings.is_none() {
            log::warn!("no embeddings configured; stopping after retrieval so they can be computed");
        } else {
            rank(&RankArgs {
                dataset: cfg.dataset.clone(),
                retrieved: out(files::RETRIEVED),
                ranker: cfg.rank.ranker,
                embeddings: cfg.rank.embeddings.clone(),
                confidences: cfg.rank.confidences.clone(),
                k: cfg.rank.k,
                blend: cfg.rank.blend,
                label_mode: cfg.rank.label_mode,
                training_out: cfg.rank.training_rows.then(|| out(files::TRAINING_ROWS)),
                out: out(files::RANKED),
                seed: cfg.seed,
            })?;
            outcome.written.push(out(files::RANKED));
            if cfg.rank.training_rows {
                outcome.written.push(out(files::TRAINING_ROWS));
            }
            ranked = Some(out(files::RANKED));
        }
    }

    build_kag(&BuildKagArgs {
        dataset: cfg.dataset.clone(),
        ranked,
        max_triplets: cfg.kag.max_triplets,
        separators: cfg.kag.separators.clone(),
        out: out(files::KAG),
        seed: cfg.seed,
    })?;
    outcome.written.push(out(files::KAG));

    if let Some(ev) = &cfg.evaluate {
        let report = evaluate(&EvaluateArgs {
            dataset: cfg.dataset.clone(),
            predictions: ev.predictions.clone(),
            k: ev.k,
            out: Some(out(files::REPORT)),
            table_out: Some(out(files::REPORT_TABLE)),
            seed: cfg.seed,
        })?;
        outcome.written.push(out(files::REPORT));
        outcome.written.push(out(files::REPORT_TABLE));
        outcome.report = Some(report);
    }
    Ok(outcome)
}
