use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dforge_cli::stages::{self, DatasetInput, RankerMode};
use dforge_cli::{configure_threads, exit, run_pipeline, PipelineConfig, StageError};
use dforge_core::corpus::CorpusFormat;
use dforge_core::dataset::DatasetFormat;
use dforge_core::kagio::{Separators, DEFAULT_MAX_TRIPLETS};
use dforge_core::ranker::{LabelMode, DEFAULT_TOP_K};
use dforge_core::rap::{Anchoring, RapConfig, Variant};

#[derive(Parser)]
#[command(name = "dforge", version, about = "Distractor-generation data pipeline")]
struct Cli {
    /// Worker threads (overrides DFORGE_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed recorded in artifact headers and used by randomised stages.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DatasetOpt {
    /// MCQ dataset file.
    #[arg(long)]
    dataset: PathBuf,
    /// mcq, sciq or canonical.
    #[arg(long, default_value = "mcq")]
    format: DatasetFormat,
}

impl DatasetOpt {
    fn input(&self) -> DatasetInput {
        DatasetInput::new(&self.dataset, self.format)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Segment and index a text corpus.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        /// text or jsonl; guessed from the extension by default.
        #[arg(long)]
        corpus_format: Option<CorpusFormat>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build masked pseudo questions from the corpus.
    BuildRap {
        /// Dataset file; repeat for several domains.
        #[arg(long, required = true)]
        dataset: Vec<PathBuf>,
        #[arg(long, default_value = "mcq")]
        format: DatasetFormat,
        #[arg(long)]
        index: PathBuf,
        /// S (sentence) or P (passage).
        #[arg(long, default_value = "S")]
        mode: Variant,
        /// Also anchor on gold distractors.
        #[arg(long)]
        gtd: bool,
        #[arg(long, default_value_t = 1)]
        window: usize,
        #[arg(long, default_value_t = 128)]
        max_tokens: usize,
        /// Sentences kept per anchor.
        #[arg(long, default_value_t = 8)]
        cap: usize,
        #[arg(long, default_value = "[MASK]")]
        mask_token: String,
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract keywords and retrieve knowledge-graph triplets.
    Retrieve {
        #[command(flatten)]
        data: DatasetOpt,
        #[arg(long)]
        kg: PathBuf,
        /// Candidate distractors per item (JSONL).
        #[arg(long)]
        candidates: Option<PathBuf>,
        #[arg(long)]
        no_candidates: bool,
        /// Write embedding requests here.
        #[arg(long)]
        embed_requests: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank retrieved triplets.
    Rank {
        #[command(flatten)]
        data: DatasetOpt,
        #[arg(long)]
        retrieved: PathBuf,
        /// cosine, classifier, answer_only or none.
        #[arg(long, default_value = "cosine")]
        ranker: RankerMode,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        confidences: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        k: usize,
        /// Weight of classifier confidence against cosine.
        #[arg(long)]
        blend: Option<f64>,
        /// strict or contains.
        #[arg(long, default_value = "strict")]
        label_mode: LabelMode,
        /// Write relevancy-classifier training rows here.
        #[arg(long)]
        training_out: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serialize generator inputs with ranked triplets.
    BuildKag {
        #[command(flatten)]
        data: DatasetOpt,
        /// Ranked triplets; omit for the plain question-answer baseline.
        #[arg(long)]
        ranked: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_TRIPLETS)]
        max_triplets: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predicted distractors against the gold ones.
    Evaluate {
        #[command(flatten)]
        data: DatasetOpt,
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// Print dataset sizes and masked-example counts.
    Stats {
        #[arg(long)]
        dataset: Vec<PathBuf>,
        #[arg(long, default_value = "mcq")]
        format: DatasetFormat,
        /// RAP files to count.
        #[arg(long)]
        rap: Vec<PathBuf>,
    },
    /// Carve a dev set out of a training file.
    Split {
        #[command(flatten)]
        data: DatasetOpt,
        #[arg(long, default_value_t = 0.9)]
        train_fraction: f64,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        dev_out: PathBuf,
    },
    /// Run all configured stages from a TOML file.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), StageError> {
    let seed = cli.seed;
    if !matches!(cli.command, Command::Pipeline { .. }) {
        configure_threads(cli.threads);
    }
    match cli.command {
        Command::Ingest {
            corpus,
            corpus_format,
            out,
        } => {
            let s = stages::ingest(&stages::IngestArgs {
                corpus,
                format: corpus_format,
                out,
                seed,
            })?;
            println!(
                "documents={} sentences={} tokens={} vocabulary={}",
                s.documents, s.sentences, s.tokens, s.vocabulary
            );
        }
        Command::BuildRap {
            dataset,
            format,
            index,
            mode,
            gtd,
            window,
            max_tokens,
            cap,
            mask_token,
            dedup,
            out,
        } => {
            let config = RapConfig {
                mode,
                anchoring: if gtd { Anchoring::WithGtd } else { Anchoring::AnswerOnly },
                window,
                max_passage_tokens: max_tokens,
                per_anchor_cap: cap,
                mask_token,
                dedup,
                ..RapConfig::default()
            };
            let o = stages::build_rap(&stages::BuildRapArgs {
                datasets: dataset.into_iter().map(|p| DatasetInput::new(p, format)).collect(),
                index,
                config,
                out,
                seed,
            })?;
            println!(
                "examples={} skipped_anchors={} deduplicated={}",
                o.examples, o.skipped, o.deduplicated
            );
            print_rows(&o.stats.rows());
        }
        Command::Retrieve {
            data,
            kg,
            candidates,
            no_candidates,
            embed_requests,
            out,
        } => {
            let o = stages::retrieve(&stages::RetrieveArgs {
                dataset: data.input(),
                kg,
                candidates,
                no_candidates,
                out,
                embed_requests,
                seed,
            })?;
            println!(
                "items={} triplets={} items_without_candidates={}",
                o.items, o.triplets, o.items_without_candidates
            );
        }
        Command::Rank {
            data,
            retrieved,
            ranker,
            embeddings,
            confidences,
            k,
            blend,
            label_mode,
            training_out,
            out,
        } => {
            let n = stages::rank(&stages::RankArgs {
                dataset: data.input(),
                retrieved,
                ranker,
                embeddings,
                confidences,
                k,
                blend,
                label_mode,
                training_out,
                out,
                seed,
            })?;
            println!("items={n}");
        }
        Command::BuildKag {
            data,
            ranked,
            max_triplets,
            out,
        } => {
            let ex = stages::build_kag(&stages::BuildKagArgs {
                dataset: data.input(),
                ranked,
                max_triplets,
                separators: Separators::default(),
                out,
                seed,
            })?;
            println!("examples={}", ex.len());
        }
        Command::Evaluate {
            data,
            predictions,
            k,
            out,
            table_out,
        } => {
            let report = stages::evaluate(&stages::EvaluateArgs {
                dataset: data.input(),
                predictions,
                k,
                out,
                table_out,
                seed,
            })?;
            print!("{}", report.to_table());
        }
        Command::Stats { dataset, format, rap } => {
            let inputs: Vec<_> = dataset.into_iter().map(|p| DatasetInput::new(p, format)).collect();
            print_rows(&stages::dataset_counts(&inputs)?);
            if !rap.is_empty() {
                print_rows(&stages::rap_stats(&rap)?.rows());
            }
        }
        Command::Split {
            data,
            train_fraction,
            train_out,
            dev_out,
        } => {
            let (t, d) = stages::split(&stages::SplitArgs {
                dataset: data.input(),
                train_fraction,
                seed,
                train_out,
                dev_out,
            })?;
            println!("train={t} dev={d}");
        }
        Command::Pipeline { config } => {
            let cfg = PipelineConfig::load(&config).map_err(|e| StageError::Usage {
                stage: "pipeline",
                message: e.to_string(),
            })?;
            configure_threads(cli.threads.or(cfg.threads));
            let outcome = run_pipeline(&cfg)?;
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            if let Some(r) = &outcome.report {
                print!("{}", r.to_table());
            }
        }
    }
    Ok(())
}

fn print_rows(rows: &[(String, usize)]) {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v}");
    }
}
