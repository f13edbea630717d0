use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use sarckit::corpus::{load_corpus, Corpus, Format};
use sarckit::manifest::RunManifest;
use sarckit::syntax::Analyzer;

/// A usage problem found after argument parsing; exits with code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// The `--config` file. Every key is optional; flags win over the file and
/// the file wins over built-in defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub length: LengthConfig,
    #[serde(default)]
    pub templates: TemplatesConfig,
    #[serde(default)]
    pub thresholds: ThresholdsConfig,
    #[serde(default)]
    pub ns_filter: NsFilterConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub cues: CuesConfig,
    #[serde(default)]
    pub annotation: AnnotationConfig,
    #[serde(default)]
    pub learner: LearnerConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthConfig {
    pub min: Option<usize>,
    pub max: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplatesConfig {
    pub adv_adv: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsConfig {
    pub theta_f: Option<u64>,
    pub theta_p: Option<f64>,
    pub theta_n: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NsFilterConfig {
    pub theta_f: Option<u64>,
    pub theta_p: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub theta_f: Option<Vec<u64>>,
    pub theta_p: Option<Vec<f64>>,
    pub theta_n: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuesConfig {
    pub file: Option<PathBuf>,
    pub batch_size: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationConfig {
    pub rule: Option<String>,
    pub required_sarc: Option<usize>,
    pub out_of: Option<usize>,
    pub set_aside_at: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub features: Option<String>,
    pub embeddings: Option<PathBuf>,
    pub n_max: Option<usize>,
    pub min_df: Option<usize>,
    pub l2_lambda: Option<f64>,
    pub epochs: Option<usize>,
    pub eta0: Option<f64>,
    pub power_t: Option<f64>,
    pub k: Option<usize>,
    pub step: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }
}

/// Flag, then config, then default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// State shared by one subcommand run: resolved common settings and the
/// manifest being built.
pub struct Ctx {
    pub cfg: FileConfig,
    pub seed: u64,
    pub format: Format,
    pub out: PathBuf,
    pub manifest: RunManifest,
    settings: serde_json::Map<String, serde_json::Value>,
    analyzer: Option<Analyzer>,
}

impl Ctx {
    pub fn new(
        subcommand: &str,
        seed: Option<u64>,
        format: Option<Format>,
        out: Option<PathBuf>,
        config: Option<&Path>,
    ) -> Result<Self> {
        let mut cfg = FileConfig::default();
        let mut manifest = RunManifest::new(subcommand, None, serde_json::Value::Null);
        if let Some(path) = config {
            cfg = FileConfig::load(path)?;
            manifest.add_input(path)?;
        }
        let file_format = cfg
            .format
            .as_deref()
            .map(|f| f.parse::<Format>().map_err(|e| usage(e.to_string())))
            .transpose()?;
        let format = pick(format, file_format, Format::Jsonl);
        let seed = pick(seed, cfg.seed, 42);
        let out = pick(out, cfg.out.clone(), PathBuf::from("."));
        std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        manifest.seed = Some(seed);
        let mut ctx = Ctx {
            cfg,
            seed,
            format,
            out,
            manifest,
            settings: serde_json::Map::new(),
            analyzer: None,
        };
        ctx.set("seed", seed);
        ctx.set("format", format);
        Ok(ctx)
    }

    /// Records an effective setting in the manifest's config snapshot.
    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("settings serialize");
        self.settings.insert(key.to_string(), v);
    }

    pub fn analyzer(&mut self) -> Result<Analyzer> {
        if self.analyzer.is_none() {
            self.analyzer = Some(Analyzer::from_env()?);
            if let Some(dir) = std::env::var_os(sarckit::syntax::LEXICON_DIR_ENV) {
                self.set("lexicon_dir", PathBuf::from(dir));
            }
        }
        Ok(self.analyzer.clone().expect("set above"))
    }

    pub fn corpus(&mut self, path: &Path) -> Result<Corpus> {
        self.manifest.add_input(path)?;
        load_corpus(path, self.format).with_context(|| format!("loading {}", path.display()))
    }

    pub fn input(&mut self, path: &Path) -> Result<BufReader<File>> {
        self.manifest.add_input(path)?;
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        Ok(BufReader::new(f))
    }

    /// Path of an output in the output directory, recorded in the manifest.
    pub fn output_path(&mut self, name: &str) -> PathBuf {
        let p = self.out.join(name);
        self.manifest.add_output(&p);
        p
    }

    pub fn write(&mut self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<PathBuf> {
        let p = self.output_path(name);
        let f = File::create(&p).with_context(|| format!("creating {}", p.display()))?;
        let mut w = BufWriter::new(f);
        body(&mut w).with_context(|| format!("writing {}", p.display()))?;
        w.flush().with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    pub fn finish(mut self) -> Result<()> {
        self.manifest.config = serde_json::Value::Object(std::mem::take(&mut self.settings));
        let name = format!("{}.manifest.json", self.manifest.subcommand);
        let p = self.out.join(name);
        self.manifest.write(&p)?;
        Ok(())
    }
}
