use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::template::{instantiate_templates, LexicoSyntacticPattern, TemplateConfig, TemplateId};
use crate::corpus::{Corpus, Label};
use crate::error::{Error, Result};
use crate::syntax::Analyzer;

/// Runs the syntax pipeline and template instantiation over raw text.
#[derive(Debug, Clone, Default)]
pub struct PatternExtractor {
    pub analyzer: Analyzer,
    pub templates: TemplateConfig,
}

impl PatternExtractor {
    pub fn new(analyzer: Analyzer, templates: TemplateConfig) -> Self {
        PatternExtractor { analyzer, templates }
    }

    /// All match sites in `text`, sentence by sentence.
    pub fn extract(&self, text: &str) -> Vec<LexicoSyntacticPattern> {
        self.analyzer
            .analyze(text)
            .iter()
            .flat_map(|s| instantiate_templates(s, self.templates))
            .collect()
    }
}

/// Per-class occurrence counts of one pattern, with the first post id seen
/// for each class.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCounts {
    pub class_freq: [u64; 2],
    pub samples: [Option<String>; 2],
}

impl PatternCounts {
    pub fn freq(&self) -> u64 {
        self.class_freq[0] + self.class_freq[1]
    }

    pub fn class_freq(&self, label: Label) -> u64 {
        self.class_freq[label.index()]
    }

    /// P(label | pattern), unsmoothed.
    pub fn prob(&self, label: Label) -> f64 {
        match self.freq() {
            0 => 0.0,
            n => self.class_freq(label) as f64 / n as f64,
        }
    }

    pub fn sample(&self, label: Label) -> Option<&str> {
        self.samples[label.index()].as_deref()
    }

    fn add(&mut self, label: Label, post_id: &str) {
        let i = label.index();
        self.class_freq[i] += 1;
        if self.samples[i].is_none() {
            self.samples[i] = Some(post_id.to_string());
        }
    }

    fn merge(&mut self, other: PatternCounts) {
        for i in 0..2 {
            self.class_freq[i] += other.class_freq[i];
            if self.samples[i].is_none() {
                self.samples[i] = other.samples[i].clone();
            }
        }
    }
}

/// Pattern frequency and class probability table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternStats {
    entries: BTreeMap<LexicoSyntacticPattern, PatternCounts>,
}

impl PatternStats {
    pub fn new() -> Self {
        PatternStats::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, p: &LexicoSyntacticPattern) -> Option<&PatternCounts> {
        self.entries.get(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LexicoSyntacticPattern, &PatternCounts)> {
        self.entries.iter()
    }

    /// Records one match site.
    pub fn record(&mut self, pattern: LexicoSyntacticPattern, label: Label, post_id: &str) {
        self.entries.entry(pattern).or_default().add(label, post_id);
    }

    /// Pointwise sum. Samples already present on the left are kept, so
    /// merging shards in corpus order reproduces a sequential count.
    pub fn merge(mut self, other: PatternStats) -> PatternStats {
        for (p, c) in other.entries {
            match self.entries.get_mut(&p) {
                Some(mine) => mine.merge(c),
                None => {
                    self.entries.insert(p, c);
                }
            }
        }
        self
    }

    /// Drops every pattern of the given template.
    pub fn without_template(&self, template: TemplateId) -> PatternStats {
        PatternStats {
            entries: self
                .entries
                .iter()
                .filter(|(p, _)| p.template != template)
                .map(|(p, c)| (p.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "template_id\tanchor\tfreq\tfreq_sarc\tfreq_notsarc\tsample_sarc\tsample_notsarc")?;
        for (p, c) in &self.entries {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                p.template,
                p.anchor,
                c.freq(),
                c.class_freq(Label::Sarcastic),
                c.class_freq(Label::NotSarcastic),
                c.sample(Label::Sarcastic).unwrap_or("-"),
                c.sample(Label::NotSarcastic).unwrap_or("-"),
            )?;
        }
        Ok(())
    }

    pub fn read_tsv(reader: impl BufRead) -> Result<PatternStats> {
        let mut stats = PatternStats::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| parse_err(n, e.to_string()))?;
            if n == 0 && line.starts_with("template_id\t") || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 7 {
                return Err(parse_err(n, format!("expected 7 fields, found {}", f.len())));
            }
            let pattern = parse_pattern(n, f[0], f[1])?;
            let num = |s: &str| s.parse::<u64>().map_err(|e| parse_err(n, format!("`{s}`: {e}")));
            let (freq, sarc, notsarc) = (num(f[2])?, num(f[3])?, num(f[4])?);
            if sarc + notsarc != freq {
                return Err(parse_err(n, format!("class counts do not sum to freq {freq}")));
            }
            let sample = |s: &str| (s != "-").then(|| s.to_string());
            let counts = PatternCounts {
                class_freq: [sarc, notsarc],
                samples: [sample(f[5]), sample(f[6])],
            };
            if stats.entries.insert(pattern, counts).is_some() {
                return Err(parse_err(n, format!("duplicate pattern {} {}", f[0], f[1])));
            }
        }
        Ok(stats)
    }
}

fn parse_err(line: usize, message: String) -> Error {
    Error::Parse { line: line + 1, message }
}

fn parse_pattern(line: usize, template: &str, anchor: &str) -> Result<LexicoSyntacticPattern> {
    let template = template.parse::<TemplateId>().map_err(|m| parse_err(line, m))?;
    if anchor.is_empty() {
        return Err(parse_err(line, "empty anchor".into()));
    }
    Ok(LexicoSyntacticPattern::new(template, anchor))
}

/// Counts every match site in the response text of every pair. Shards are
/// counted in parallel and merged in corpus order.
pub fn count_patterns(corpus: &Corpus, extractor: &PatternExtractor) -> Result<PatternStats> {
    corpus.require_labeled()?;
    let stats = corpus
        .pairs()
        .par_chunks(64)
        .map(|shard| {
            let mut s = PatternStats::new();
            for pair in shard {
                let label = pair.label.expect("checked above");
                for p in extractor.extract(pair.text()) {
                    s.record(p, label, pair.id());
                }
            }
            s
        })
        .reduce(PatternStats::new, PatternStats::merge);
    Ok(stats)
}

/// (θ_f, θ_p, θ_n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub theta_f: u64,
    pub theta_p: f64,
    pub theta_n: usize,
}

impl ThresholdConfig {
    pub fn new(theta_f: u64, theta_p: f64, theta_n: usize) -> Result<Self> {
        let c = ThresholdConfig { theta_f, theta_p, theta_n };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_f < 1 {
            return Err(Error::InvalidArgument("theta_f must be at least 1".into()));
        }
        if !(self.theta_p > 0.0 && self.theta_p.is_finite()) {
            return Err(Error::InvalidArgument(format!("theta_p must be positive, got {}", self.theta_p)));
        }
        if self.theta_n < 1 {
            return Err(Error::InvalidArgument("theta_n must be at least 1".into()));
        }
        Ok(())
    }
}

/// A thresholded pattern with the statistics that selected it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternEntry {
    pub pattern: LexicoSyntacticPattern,
    pub freq: u64,
    pub prob: f64,
}

/// Patterns selected for one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSet {
    pub class: Label,
    pub entries: Vec<PatternEntry>,
}

impl PatternSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn patterns(&self) -> BTreeSet<LexicoSyntacticPattern> {
        self.entries.iter().map(|e| e.pattern.clone()).collect()
    }

    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "# class: {}", self.class)?;
        for e in &self.entries {
            writeln!(out, "{}\t{}\t{}\t{:.4}", e.pattern.template, e.pattern.anchor, e.freq, e.prob)?;
        }
        Ok(())
    }

    /// Reads a pattern set file. The `# class:` line is required.
    pub fn read_tsv(reader: impl BufRead) -> Result<PatternSet> {
        let mut class = None;
        let mut entries = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| parse_err(n, e.to_string()))?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(c) = rest.trim().strip_prefix("class:") {
                    class = Some(c.trim().parse::<Label>().map_err(|m| parse_err(n, m.to_string()))?);
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(parse_err(n, format!("expected 4 fields, found {}", f.len())));
            }
            entries.push(PatternEntry {
                pattern: parse_pattern(n, f[0], f[1])?,
                freq: f[2].parse().map_err(|e| parse_err(n, format!("freq: {e}")))?,
                prob: f[3].parse().map_err(|e| parse_err(n, format!("prob: {e}")))?,
            });
        }
        let class = class.ok_or_else(|| parse_err(0, "missing `# class:` line".into()))?;
        Ok(PatternSet { class, entries })
    }
}

/// Exactly the patterns with freq ≥ θ_f and P(class|p) ≥ θ_p, in pattern order.
pub fn threshold_patterns(stats: &PatternStats, class: Label, theta_f: u64, theta_p: f64) -> PatternSet {
    let entries = stats
        .iter()
        .filter(|(_, c)| c.freq() >= theta_f && c.prob(class) >= theta_p)
        .map(|(p, c)| PatternEntry {
            pattern: p.clone(),
            freq: c.freq(),
            prob: c.prob(class),
        })
        .collect();
    PatternSet { class, entries }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportSort {
    /// prob desc, freq desc, anchor, template
    #[default]
    Probability,
    /// freq desc, prob desc, anchor, template
    Frequency,
}

impl std::str::FromStr for ReportSort {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "prob" | "probability" => Ok(ReportSort::Probability),
            "freq" | "frequency" => Ok(ReportSort::Frequency),
            _ => Err(format!("unknown sort `{s}` (expected prob or freq)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub prob: f64,
    pub freq: u64,
    pub template: TemplateId,
    pub anchor: String,
    pub sample_post: String,
}

/// Patterns seen at least once with `class`, sorted and truncated to
/// `top_k`. Each row cites a post of that class.
pub fn emit_pattern_report(
    stats: &PatternStats,
    class: Label,
    sort: ReportSort,
    top_k: Option<usize>,
) -> Vec<ReportRow> {
    let mut rows: Vec<ReportRow> = stats
        .iter()
        .filter_map(|(p, c)| {
            Some(ReportRow {
                prob: c.prob(class),
                freq: c.freq(),
                template: p.template,
                anchor: p.anchor.clone(),
                sample_post: c.sample(class)?.to_string(),
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        let by_prob = b.prob.total_cmp(&a.prob);
        let by_freq = b.freq.cmp(&a.freq);
        let primary = match sort {
            ReportSort::Probability => by_prob.then(by_freq),
            ReportSort::Frequency => by_freq.then(by_prob),
        };
        primary.then_with(|| a.anchor.cmp(&b.anchor)).then(a.template.cmp(&b.template))
    });
    if let Some(k) = top_k {
        rows.truncate(k);
    }
    rows
}

pub fn write_report_tsv(rows: &[ReportRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "prob\tfreq\ttemplate\tanchor\tsample_post")?;
    for r in rows {
        writeln!(
            out,
            "{:.2}\t{}\t{}\t{}\t{}",
            r.prob,
            r.freq,
            r.template.display_form(),
            r.anchor.to_uppercase(),
            r.sample_post
        )?;
    }
    Ok(())
}
