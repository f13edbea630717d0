//! `sarckit` command line. Exit status: 0 success, 1 data error, 2 usage
//! error.

mod commands;
mod ctx;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sarckit::corpus::{Format, Label};
use sarckit::patterns::ReportSort;

#[derive(Parser)]
#[command(name = "sarckit", version, about = "Build and classify a sarcasm corpus from debate dialogue")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Seed for every random choice in the run
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Input corpus format
    #[arg(long, global = true, value_parser = ["jsonl", "csv"])]
    pub format: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Read a corpus (JSON lines or CSV) and write it as JSON lines
    Ingest {
        #[arg(long, short)]
        input: PathBuf,
    },
    /// Keep posts whose word count lies within bounds
    FilterLength {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        min: Option<usize>,
        #[arg(long)]
        max: Option<usize>,
    },
    /// Count template instantiations per class over a labeled corpus
    LearnPatterns {
        #[arg(long, short)]
        input: PathBuf,
        #[command(flatten)]
        templates: TemplateArgs,
    },
    /// Select patterns of one class by frequency and probability
    Threshold {
        #[arg(long)]
        stats: PathBuf,
        #[arg(long)]
        class: Label,
        #[arg(long)]
        theta_f: Option<u64>,
        #[arg(long)]
        theta_p: Option<f64>,
    },
    /// Label posts with thresholded pattern sets
    ClassifyWeak {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        sarc_patterns: Option<PathBuf>,
        #[arg(long)]
        notsarc_patterns: Option<PathBuf>,
        #[arg(long)]
        theta_n: Option<usize>,
        #[command(flatten)]
        templates: TemplateArgs,
    },
    /// Evaluate every (θ_f, θ_p, θ_n) config on a dev set
    Gridsearch {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        dev: PathBuf,
        #[arg(long)]
        class: Label,
        #[command(flatten)]
        templates: TemplateArgs,
    },
    /// Build the high-precision not-sarcastic filter from pattern statistics
    BuildNsFilter {
        #[arg(long)]
        stats: PathBuf,
        #[arg(long)]
        theta_f: Option<u64>,
        #[arg(long)]
        theta_p: Option<f64>,
    },
    /// Split a corpus into posts the filter keeps and posts it removes
    ApplyFilter {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        filter: PathBuf,
        #[command(flatten)]
        templates: TemplateArgs,
    },
    /// Find posts matching cue phrases
    RetrieveCues {
        #[arg(long, short)]
        input: PathBuf,
        /// Cue file (JSON lines); defaults to the shipped list
        #[arg(long)]
        cues: Option<PathBuf>,
    },
    /// List posts with a question sentence followed by a statement
    RqCandidates {
        #[arg(long, short)]
        input: PathBuf,
    },
    /// Mix cue matches into shuffled annotation batches
    SampleBatches {
        #[arg(long)]
        matches: PathBuf,
        #[arg(long)]
        batch_size: Option<usize>,
    },
    /// Per-cue found, annotated and sarcastic counts
    CueStats {
        #[arg(long)]
        matches: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Score annotators on the qualifier
    Qualify {
        /// JSON lines of {"post_id", "label"}
        #[arg(long)]
        gold: PathBuf,
        /// JSON lines of {"annotator", "post_id", "label"}
        #[arg(long)]
        answers: PathBuf,
    },
    /// Aggregate crowd votes into labels and a sarcasm ratio
    Aggregate {
        #[arg(long)]
        annotations: PathBuf,
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Per-annotator agreement with the majority
    Agreement {
        #[arg(long)]
        annotations: PathBuf,
    },
    /// Draw a balanced subcorpus from labeled source pools
    Assemble {
        /// NAME=LABEL:QUOTA:PATH, repeatable
        #[arg(long = "source", required = true)]
        sources: Vec<String>,
    },
    /// Train a linear SVM on a labeled corpus
    TrainSvm {
        #[arg(long, short)]
        input: PathBuf,
        /// Labeled or unlabeled corpus to predict after training
        #[arg(long)]
        test: Option<PathBuf>,
        #[command(flatten)]
        learner: LearnerArgs,
    },
    /// Stratified k-fold cross-validation
    Crossval {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        learner: LearnerArgs,
    },
    /// Cross-validated F at growing per-class sizes
    LearningCurve {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        step: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        learner: LearnerArgs,
    },
    /// Rank patterns of one class with example posts
    ReportPatterns {
        #[arg(long)]
        stats: PathBuf,
        #[arg(long)]
        class: Label,
        #[arg(long)]
        sort: Option<ReportSort>,
        #[arg(long)]
        top_k: Option<usize>,
    },
}

#[derive(Args, Clone, Default)]
pub struct TemplateArgs {
    /// Leave out the ADV_ADV bigram template
    #[arg(long)]
    pub no_adv_adv: bool,
}

#[derive(Args, Clone, Default)]
pub struct RuleArgs {
    /// nine-way, nine-way-relaxed, three-way or five-way
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub required_sarc: Option<usize>,
    #[arg(long)]
    pub out_of: Option<usize>,
    #[arg(long)]
    pub set_aside_at: Option<usize>,
}

#[derive(Args, Clone, Default)]
pub struct LearnerArgs {
    /// ngrams or embedding
    #[arg(long)]
    pub features: Option<String>,
    /// Word vector table (`word v1 ... vd` per line)
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub min_df: Option<usize>,
    #[arg(long)]
    pub l2_lambda: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub eta0: Option<f64>,
    #[arg(long)]
    pub power_t: Option<f64>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest { .. } => "ingest",
            Command::FilterLength { .. } => "filter-length",
            Command::LearnPatterns { .. } => "learn-patterns",
            Command::Threshold { .. } => "threshold",
            Command::ClassifyWeak { .. } => "classify-weak",
            Command::Gridsearch { .. } => "gridsearch",
            Command::BuildNsFilter { .. } => "build-ns-filter",
            Command::ApplyFilter { .. } => "apply-filter",
            Command::RetrieveCues { .. } => "retrieve-cues",
            Command::RqCandidates { .. } => "rq-candidates",
            Command::SampleBatches { .. } => "sample-batches",
            Command::CueStats { .. } => "cue-stats",
            Command::Qualify { .. } => "qualify",
            Command::Aggregate { .. } => "aggregate",
            Command::Agreement { .. } => "agreement",
            Command::Assemble { .. } => "assemble",
            Command::TrainSvm { .. } => "train-svm",
            Command::Crossval { .. } => "crossval",
            Command::LearningCurve { .. } => "learning-curve",
            Command::ReportPatterns { .. } => "report-patterns",
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let format = cli
        .common
        .format
        .as_deref()
        .map(|f| f.parse::<Format>())
        .transpose()?;
    let mut ctx = ctx::Ctx::new(
        cli.command.name(),
        cli.common.seed,
        format,
        cli.common.out.clone(),
        cli.common.config.as_deref(),
    )?;
    commands::dispatch(&mut ctx, cli.command)?;
    ctx.finish()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ctx::Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
