//! Pipeline stages. Each stage reads its upstream artifacts, writes its own
//! artifact with a JSON header line, and leaves a `.manifest.json` sidecar
//! with input digests, configuration and counts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use dforge_core::artifact::{read_jsonl, write_jsonl, ArtifactHeader, RunManifest};
use dforge_core::corpus::{CorpusFormat, IndexStats};
use dforge_core::dataset::{load_dataset, split_train_dev, write_canonical, DatasetFormat, McqItem};
use dforge_core::kagio::{serialize_kag, KagExample, Separators};
use dforge_core::kg::{load_candidates, load_kg, KeywordExtractor, Triplet};
use dforge_core::metrics::{evaluate as score_predictions, load_predictions, EvalReport};
use dforge_core::ranker::{
    filter_answer_only, load_confidences, qa_key, qa_text, rank_unsupervised, rerank_blended, select_random,
    supervised_rows, EmbeddingStore, LabelMode, ScoreSource, ScoredTriplet,
};
use dforge_core::rap::{build_examples, corpus_stats, RapConfig, RapExample, RapStats, SkipRecord};
use dforge_core::CorpusIndex;

use crate::error::{InStage, StageError, StageResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetInput {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: DatasetFormat,
}

fn default_format() -> DatasetFormat {
    DatasetFormat::Mcq
}

impl DatasetInput {
    pub fn new(path: impl Into<PathBuf>, format: DatasetFormat) -> Self {
        DatasetInput {
            path: path.into(),
            format,
        }
    }

    fn load(&self, stage: &'static str) -> StageResult<Vec<McqItem>> {
        require(stage, &self.path)?;
        load_dataset(&self.path, self.format).in_stage(stage)
    }
}

fn require(stage: &'static str, path: &Path) -> StageResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(StageError::MissingArtifact {
            stage,
            path: path.to_owned(),
        })
    }
}

fn usage(stage: &'static str, message: impl Into<String>) -> StageError {
    StageError::Usage {
        stage,
        message: message.into(),
    }
}

/// Appends `suffix` to a path's file name.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Per-item seed: the run seed mixed with an FNV-1a hash of the item id.
pub fn item_seed(seed: u64, item_id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in item_id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    seed ^ h
}

// ---------------------------------------------------------------- ingest

#[derive(Debug, Clone)]
pub struct IngestArgs {
    pub corpus: PathBuf,
    pub format: Option<CorpusFormat>,
    pub out: PathBuf,
    pub seed: u64,
}

pub fn ingest(args: &IngestArgs) -> StageResult<IndexStats> {
    const STAGE: &str = "ingest";
    require(STAGE, &args.corpus)?;
    let format = args.format.unwrap_or_else(|| CorpusFormat::from_path(&args.corpus));
    let index = CorpusIndex::ingest_with_format(&args.corpus, format).in_stage(STAGE)?;
    index.save(&args.out).in_stage(STAGE)?;
    let stats = index.stats().clone();
    let format_name = match format {
        CorpusFormat::PlainText => "text",
        CorpusFormat::Jsonl => "jsonl",
    };
    RunManifest::new(STAGE, args.seed, &json!({ "format": format_name }))
        .and_then(|m| m.input(&args.corpus))
        .and_then(|m| m.output(&args.out))
        .and_then(|m| m.count("index", &stats))
        .and_then(|m| m.write_beside(&args.out))
        .in_stage(STAGE)?;
    Ok(stats)
}

// ---------------------------------------------------------------- build-rap

#[derive(Debug, Clone)]
pub struct BuildRapArgs {
    /// One dataset, or several for the cross-domain setting; each is built
    /// independently and the results are concatenated in order.
    pub datasets: Vec<DatasetInput>,
    pub index: PathBuf,
    pub config: RapConfig,
    pub out: PathBuf,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RapOutcome {
    pub examples: usize,
    pub skipped: usize,
    pub deduplicated: usize,
    pub stats: RapStats,
}

pub fn build_rap(args: &BuildRapArgs) -> StageResult<RapOutcome> {
    const STAGE: &str = "build-rap";
    args.config.validate().map_err(|e| usage(STAGE, e.to_string()))?;
    if args.datasets.is_empty() {
        return Err(usage(STAGE, "at least one dataset is required"));
    }
    require(STAGE, &args.index)?;
    for d in &args.datasets {
        require(STAGE, &d.path)?;
    }
    let index = CorpusIndex::load(&args.index).in_stage(STAGE)?;

    let mut examples: Vec<RapExample> = Vec::new();
    let mut skipped: Vec<SkipRecord> = Vec::new();
    let mut deduplicated = 0;
    let mut seen = BTreeSet::new();
    for d in &args.datasets {
        let items = d.load(STAGE)?;
        let build = build_examples(&items, &index, &args.config).in_stage(STAGE)?;
        deduplicated += build.deduplicated;
        for ex in build.examples {
            if args.config.dedup && !seen.insert((ex.input.clone(), ex.target.clone())) {
                deduplicated += 1;
                continue;
            }
            examples.push(ex);
        }
        skipped.extend(build.skipped);
    }

    let header = ArtifactHeader::new("rap", args.seed, &args.config).in_stage(STAGE)?;
    write_jsonl(&args.out, &header, &examples).in_stage(STAGE)?;
    let skips_path = sibling(&args.out, ".skips.jsonl");
    let skip_header = ArtifactHeader::new("rap-skips", args.seed, &args.config).in_stage(STAGE)?;
    write_jsonl(&skips_path, &skip_header, &skipped).in_stage(STAGE)?;

    let stats = corpus_stats(&examples);
    let mut manifest = RunManifest::new(STAGE, args.seed, &args.config).in_stage(STAGE)?;
    manifest = manifest.input(&args.index).in_stage(STAGE)?;
    for d in &args.datasets {
        manifest = manifest.input(&d.path).in_stage(STAGE)?;
    }
    manifest
        .output(&args.out)
        .and_then(|m| m.output(&skips_path))
        .and_then(|m| m.count("examples", examples.len()))
        .and_then(|m| m.count("skipped_anchors", skipped.len()))
        .and_then(|m| m.count("deduplicated", deduplicated))
        .and_then(|m| m.count("stats", stats.rows()))
        .and_then(|m| m.write_beside(&args.out))
        .in_stage(STAGE)?;

    Ok(RapOutcome {
        examples: examples.len(),
        skipped: skipped.len(),
        deduplicated,
        stats,
    })
}

// ---------------------------------------------------------------- retrieve

#[derive(Debug, Clone)]
pub struct RetrieveArgs {
    pub dataset: DatasetInput,
    pub kg: PathBuf,
    pub candidates: Option<PathBuf>,
    /// Leave candidates out of the keyword set.
    pub no_candidates: bool,
    pub out: PathBuf,
    /// Where to write `{"id", "text"}` requests for the embedding adapter.
    pub embed_requests: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievedItem {
    pub item_id: String,
    pub keywords: Vec<String>,
    pub triplets: Vec<Triplet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetrieveOutcome {
    pub items: usize,
    pub triplets: usize,
    pub items_without_candidates: usize,
}

pub fn retrieve(args: &RetrieveArgs) -> StageResult<RetrieveOutcome> {
    const STAGE: &str = "retrieve";
    let items = args.dataset.load(STAGE)?;
    require(STAGE, &args.kg)?;
    let graph = load_kg(&args.kg).in_stage(STAGE)?;
    let candidates = match (&args.candidates, args.no_candidates) {
        (Some(path), false) => {
            require(STAGE, path)?;
            load_candidates(path).in_stage(STAGE)?
        }
        _ => BTreeMap::new(),
    };
    let use_candidates = args.candidates.is_some() && !args.no_candidates;
    let extractor = KeywordExtractor::default().with_graph(&graph);

    let records: Vec<RetrievedItem> = items
        .par_iter()
        .map(|item| {
            let cands: &[String] = candidates.get(&item.id).map_or(&[], Vec::as_slice);
            let w = extractor.extract(&item.stem, &item.answer, cands);
            RetrievedItem {
                item_id: item.id.clone(),
                triplets: graph.retrieve(w.iter()),
                keywords: w.keywords.into_iter().collect(),
            }
        })
        .collect();
    let without = if use_candidates {
        items.iter().filter(|i| !candidates.contains_key(&i.id)).count()
    } else {
        0
    };

    let config = json!({
        "candidates": use_candidates,
        "no_candidates": args.no_candidates,
        "max_ngram": dforge_core::kg::MAX_NGRAM,
        "kg_stats": graph.stats(),
    });
    let header = ArtifactHeader::new("retrieved", args.seed, &config).in_stage(STAGE)?;
    write_jsonl(&args.out, &header, &records).in_stage(STAGE)?;

    let mut manifest = RunManifest::new(STAGE, args.seed, &config)
        .and_then(|m| m.input(&args.dataset.path))
        .and_then(|m| m.input(&args.kg))
        .in_stage(STAGE)?;
    if use_candidates {
        manifest = manifest.input(args.candidates.as_ref().expect("set")).in_stage(STAGE)?;
    }
    manifest = manifest.output(&args.out).in_stage(STAGE)?;

    if let Some(req_path) = &args.embed_requests {
        let mut requests: Vec<EmbedRequest> = items
            .iter()
            .map(|i| EmbedRequest {
                id: qa_key(&i.id),
                text: qa_text(&i.stem, &i.answer),
            })
            .collect();
        let texts: BTreeSet<String> = records
            .iter()
            .flat_map(|r| r.triplets.iter().map(Triplet::text))
            .collect();
        requests.extend(texts.into_iter().map(|t| EmbedRequest { id: t.clone(), text: t }));
        let h = ArtifactHeader::new("embed-requests", args.seed, &config).in_stage(STAGE)?;
        write_jsonl(req_path, &h, &requests).in_stage(STAGE)?;
        manifest = manifest.output(req_path).in_stage(STAGE)?;
    }

    let total: usize = records.iter().map(|r| r.triplets.len()).sum();
    manifest
        .count("items", records.len())
        .and_then(|m| m.count("triplets", total))
        .and_then(|m| m.count("items_without_candidates", without))
        .and_then(|m| m.write_beside(&args.out))
        .in_stage(STAGE)?;
    Ok(RetrieveOutcome {
        items: records.len(),
        triplets: total,
        items_without_candidates: without,
    })
}

// ---------------------------------------------------------------- rank

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankerMode {
    /// Cosine similarity to the question-answer embedding.
    Cosine,
    /// Cosine top-k reordered by classifier confidences.
    Classifier,
    /// Only triplets with the answer as an endpoint.
    AnswerOnly,
    /// Seeded random selection (no reranker).
    None,
}

impl FromStr for RankerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cosine" => Ok(RankerMode::Cosine),
            "classifier" => Ok(RankerMode::Classifier),
            "answer_only" | "answer-only" => Ok(RankerMode::AnswerOnly),
            "none" | "random" => Ok(RankerMode::None),
            other => Err(format!("unknown ranker {other:?}")),
        }
    }
}

impl fmt::Display for RankerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankerMode::Cosine => "cosine",
            RankerMode::Classifier => "classifier",
            RankerMode::AnswerOnly => "answer_only",
            RankerMode::None => "none",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RankArgs {
    pub dataset: DatasetInput,
    pub retrieved: PathBuf,
    pub ranker: RankerMode,
    pub embeddings: Option<PathBuf>,
    /// Confidence ids are `<item_id>::<triplet text>` or plain triplet text.
    pub confidences: Option<PathBuf>,
    pub k: usize,
    pub blend: Option<f64>,
    pub label_mode: LabelMode,
    /// Where to write the relevancy classifier's training rows.
    pub training_out: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedItem {
    pub item_id: String,
    pub ranker: RankerMode,
    pub triplets: Vec<ScoredTriplet>,
}

#[derive(Serialize)]
struct RankConfig {
    ranker: RankerMode,
    k: usize,
    blend: Option<f64>,
    label_mode: LabelMode,
}

/// Confidence of a triplet for one item: the item-scoped id wins over the
/// bare triplet text.
pub fn confidence_for(confidences: &HashMap<String, f64>, item_id: &str, triplet_text: &str) -> Option<f64> {
    confidences
        .get(&format!("{item_id}::{triplet_text}"))
        .or_else(|| confidences.get(triplet_text))
        .copied()
}

pub fn rank(args: &RankArgs) -> StageResult<usize> {
    const STAGE: &str = "rank";
    if args.k == 0 {
        return Err(usage(STAGE, "k must be positive"));
    }
    let needs_embeddings = matches!(args.ranker, RankerMode::Cosine | RankerMode::Classifier);
    if needs_embeddings && args.embeddings.is_none() {
        return Err(usage(STAGE, format!("ranker {} needs --embeddings", args.ranker)));
    }
    if args.ranker == RankerMode::Classifier && args.confidences.is_none() {
        return Err(usage(STAGE, "ranker classifier needs --confidences"));
    }
    let items = args.dataset.load(STAGE)?;
    require(STAGE, &args.retrieved)?;
    let (_, retrieved): (_, Vec<RetrievedItem>) = read_jsonl(&args.retrieved).in_stage(STAGE)?;
    let store = match &args.embeddings {
        Some(p) if needs_embeddings => {
            require(STAGE, p)?;
            Some(EmbeddingStore::load(p).in_stage(STAGE)?)
        }
        _ => None,
    };
    let confidences = match &args.confidences {
        Some(p) if args.ranker == RankerMode::Classifier => {
            require(STAGE, p)?;
            Some(load_confidences(p).in_stage(STAGE)?)
        }
        _ => None,
    };
    let by_id: HashMap<&str, &McqItem> = items.iter().map(|i| (i.id.as_str(), i)).collect();

    let ranked: Vec<RankedItem> = retrieved
        .par_iter()
        .map(|rec| -> dforge_core::Result<RankedItem> {
            let item = by_id.get(rec.item_id.as_str()).ok_or_else(|| dforge_core::Error::InvalidRecord {
                id: rec.item_id.clone(),
                message: "retrieved item not in the dataset".into(),
            })?;
            let triplets = match args.ranker {
                RankerMode::Cosine => {
                    rank_unsupervised(&rec.triplets, &qa_key(&item.id), store.as_ref().expect("loaded"), args.k)?
                }
                RankerMode::Classifier => {
                    let top =
                        rank_unsupervised(&rec.triplets, &qa_key(&item.id), store.as_ref().expect("loaded"), args.k)?;
                    let all = confidences.as_ref().expect("loaded");
                    let scoped: HashMap<String, f64> = top
                        .iter()
                        .filter_map(|s| {
                            let text = s.triplet.text();
                            confidence_for(all, &item.id, &text).map(|c| (text, c))
                        })
                        .collect();
                    rerank_blended(&top, &scoped, args.blend)?
                }
                RankerMode::AnswerOnly => filter_answer_only(&rec.triplets, &item.answer)
                    .into_iter()
                    .take(args.k)
                    .map(|t| ScoredTriplet {
                        triplet: t,
                        score: 0.0,
                        source: ScoreSource::AnswerFilter,
                    })
                    .collect(),
                RankerMode::None => select_random(&rec.triplets, args.k, item_seed(args.seed, &item.id)),
            };
            Ok(RankedItem {
                item_id: rec.item_id.clone(),
                ranker: args.ranker,
                triplets,
            })
        })
        .collect::<dforge_core::Result<_>>()
        .in_stage(STAGE)?;

    let config = RankConfig {
        ranker: args.ranker,
        k: args.k,
        blend: args.blend,
        label_mode: args.label_mode,
    };
    let header = ArtifactHeader::new("ranked", args.seed, &config).in_stage(STAGE)?;
    write_jsonl(&args.out, &header, &ranked).in_stage(STAGE)?;

    let mut manifest = RunManifest::new(STAGE, args.seed, &config)
        .and_then(|m| m.input(&args.dataset.path))
        .and_then(|m| m.input(&args.retrieved))
        .in_stage(STAGE)?;
    if let (Some(p), true) = (&args.embeddings, store.is_some()) {
        manifest = manifest.input(p).in_stage(STAGE)?;
    }
    if let (Some(p), true) = (&args.confidences, confidences.is_some()) {
        manifest = manifest.input(p).in_stage(STAGE)?;
    }
    manifest = manifest.output(&args.out).in_stage(STAGE)?;

    if let Some(train_path) = &args.training_out {
        let rows: Vec<_> = retrieved
            .iter()
            .filter_map(|rec| by_id.get(rec.item_id.as_str()).map(|item| (item, rec)))
            .flat_map(|(item, rec)| {
                supervised_rows(&item.stem, &item.answer, &item.distractors, &rec.triplets, args.label_mode)
            })
            .collect();
        let h = ArtifactHeader::new("triplet-labels", args.seed, &config).in_stage(STAGE)?;
        write_jsonl(train_path, &h, &rows).in_stage(STAGE)?;
        manifest = manifest
            .output(train_path)
            .and_then(|m| m.count("training_rows", rows.len()))
            .in_stage(STAGE)?;
    }
    manifest
        .count("items", ranked.len())
        .and_then(|m| m.write_beside(&args.out))
        .in_stage(STAGE)?;
    Ok(ranked.len())
}

// ---------------------------------------------------------------- build-kag

#[derive(Debug, Clone)]
pub struct BuildKagArgs {
    pub dataset: DatasetInput,
    /// Ranked triplets; without them every input is the plain `q </s> a`.
    pub ranked: Option<PathBuf>,
    pub max_triplets: usize,
    pub separators: Separators,
    pub out: PathBuf,
    pub seed: u64,
}

#[derive(Serialize)]
struct KagConfig<'a> {
    max_triplets: usize,
    separators: &'a Separators,
    with_triplets: bool,
}

pub fn build_kag(args: &BuildKagArgs) -> StageResult<Vec<KagExample>> {
    const STAGE: &str = "build-kag";
    let items = args.dataset.load(STAGE)?;
    let ranked: HashMap<String, Vec<Triplet>> = match &args.ranked {
        Some(p) => {
            require(STAGE, p)?;
            let (_, recs): (_, Vec<RankedItem>) = read_jsonl(p).in_stage(STAGE)?;
            recs.into_iter()
                .map(|r| (r.item_id, r.triplets.into_iter().map(|s| s.triplet).collect()))
                .collect()
        }
        None => HashMap::new(),
    };
    let examples: Vec<KagExample> = items
        .iter()
        .map(|item| {
            let ts = ranked.get(&item.id).map_or(&[][..], Vec::as_slice);
            serialize_kag(item, ts, args.max_triplets, &args.separators)
        })
        .collect();
    let without = items.iter().filter(|i| !ranked.contains_key(&i.id)).count();

    let config = KagConfig {
        max_triplets: args.max_triplets,
        separators: &args.separators,
        with_triplets: args.ranked.is_some(),
    };
    let header = ArtifactHeader::new("kag", args.seed, &config).in_stage(STAGE)?;
    write_jsonl(&args.out, &header, &examples).in_stage(STAGE)?;
    let mut manifest = RunManifest::new(STAGE, args.seed, &config)
        .and_then(|m| m.input(&args.dataset.path))
        .in_stage(STAGE)?;
    if let Some(p) = &args.ranked {
        manifest = manifest.input(p).in_stage(STAGE)?;
    }
    manifest
        .output(&args.out)
        .and_then(|m| m.count("examples", examples.len()))
        .and_then(|m| m.count("items_without_triplets", without))
        .and_then(|m| m.write_beside(&args.out))
        .in_stage(STAGE)?;
    Ok(examples)
}

// ---------------------------------------------------------------- evaluate

#[derive(Debug, Clone)]
pub struct EvaluateArgs {
    pub dataset: DatasetInput,
    pub predictions: PathBuf,
    pub k: usize,
    /// JSON report path.
    pub out: Option<PathBuf>,
    /// Plain-text table path.
    pub table_out: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    header: ArtifactHeader,
    report: &'a EvalReport,
}

pub fn evaluate(args: &EvaluateArgs) -> StageResult<EvalReport> {
    const STAGE: &str = "evaluate";
    if args.k == 0 {
        return Err(usage(STAGE, "k must be positive"));
    }
    let items = args.dataset.load(STAGE)?;
    require(STAGE, &args.predictions)?;
    let preds = load_predictions(&args.predictions).in_stage(STAGE)?;
    let report = score_predictions(&preds, &items, args.k).in_stage(STAGE)?;

    let config = json!({ "k": args.k, "match": "normalized_exact" });
    if let Some(out) = &args.out {
        let header = ArtifactHeader::new("eval-report", args.seed, &config).in_stage(STAGE)?;
        let mut text = serde_json::to_string_pretty(&ReportFile {
            header,
            report: &report,
        })
        .map_err(dforge_core::Error::from)
        .in_stage(STAGE)?;
        text.push('\n');
        std::fs::write(out, text)
            .map_err(|e| StageError::Data {
                stage: STAGE,
                source: dforge_core::Error::Io {
                    path: out.clone(),
                    source: e,
                },
            })?;
        let mut manifest = RunManifest::new(STAGE, args.seed, &config)
            .and_then(|m| m.input(&args.dataset.path))
            .and_then(|m| m.input(&args.predictions))
            .and_then(|m| m.output(out))
            .in_stage(STAGE)?;
        if let Some(t) = &args.table_out {
            write_text(STAGE, t, &report.to_table())?;
            manifest = manifest.output(t).in_stage(STAGE)?;
        }
        manifest
            .count("items", report.n_items)
            .and_then(|m| m.count("missing_predictions", report.n_missing))
            .and_then(|m| m.write_beside(out))
            .in_stage(STAGE)?;
    } else if let Some(t) = &args.table_out {
        write_text(STAGE, t, &report.to_table())?;
    }
    Ok(report)
}

fn write_text(stage: &'static str, path: &Path, text: &str) -> StageResult<()> {
    std::fs::write(path, text).map_err(|e| StageError::Data {
        stage,
        source: dforge_core::Error::Io {
            path: path.to_owned(),
            source: e,
        },
    })
}

// ---------------------------------------------------------------- stats / split

/// Masked-example counts over one or more RAP files.
pub fn rap_stats(paths: &[PathBuf]) -> StageResult<RapStats> {
    const STAGE: &str = "stats";
    let mut total = RapStats::default();
    for p in paths {
        require(STAGE, p)?;
        let (_, examples): (_, Vec<RapExample>) = read_jsonl(p).in_stage(STAGE)?;
        total.merge(&corpus_stats(&examples));
    }
    Ok(total)
}

/// Item count of each dataset, by file name.
pub fn dataset_counts(inputs: &[DatasetInput]) -> StageResult<Vec<(String, usize)>> {
    inputs
        .iter()
        .map(|d| {
            let name = d
                .path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((name, d.load("stats")?.len()))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SplitArgs {
    pub dataset: DatasetInput,
    pub train_fraction: f64,
    pub seed: u64,
    pub train_out: PathBuf,
    pub dev_out: PathBuf,
}

pub fn split(args: &SplitArgs) -> StageResult<(usize, usize)> {
    const STAGE: &str = "split";
    let items = args.dataset.load(STAGE)?;
    let (train, dev) = split_train_dev(&items, args.train_fraction, args.seed).in_stage(STAGE)?;
    write_canonical(&args.train_out, &train).in_stage(STAGE)?;
    write_canonical(&args.dev_out, &dev).in_stage(STAGE)?;
    let config = json!({ "train_fraction": args.train_fraction });
    RunManifest::new(STAGE, args.seed, &config)
        .and_then(|m| m.input(&args.dataset.path))
        .and_then(|m| m.output(&args.train_out))
        .and_then(|m| m.output(&args.dev_out))
        .and_then(|m| m.count("train", train.len()))
        .and_then(|m| m.count("dev", dev.len()))
        .and_then(|m| m.write_beside(&args.train_out))
        .in_stage(STAGE)?;
    Ok((train.len(), dev.len()))
}
