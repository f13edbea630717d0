//! Regex cue retrieval over unannotated posts, the rhetorical-question
//! position heuristic, annotation batch sampling and per-cue statistics.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use crate::corpus::{word_count, Corpus, Label};
use crate::error::{Error, Result};
use crate::syntax::Analyzer;

/// Longest response (in words) retrieval will return.
pub const MAX_CUE_WORDS: usize = 150;

const BUILTIN_CUES: &str = include_str!("../data/cues.jsonl");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CueClass {
    RQ,
    HYP,
}

impl fmt::Display for CueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CueClass::RQ => "RQ",
            CueClass::HYP => "HYP",
        })
    }
}

impl FromStr for CueClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RQ" => Ok(CueClass::RQ),
            "HYP" => Ok(CueClass::HYP),
            _ => Err(Error::InvalidArgument(format!("unknown cue class `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CueSpec {
    pub name: String,
    pub pattern: String,
    pub class_hint: CueClass,
}

#[derive(Debug, Clone)]
pub struct Cue {
    pub spec: CueSpec,
    regex: Regex,
}

impl Cue {
    pub fn compile(spec: CueSpec) -> Result<Cue> {
        let regex = RegexBuilder::new(&spec.pattern)
            .case_insensitive(true)
            .build()
            .map_err(|e| Error::InvalidCue {
                name: spec.name.clone(),
                message: e.to_string(),
            })?;
        Ok(Cue { spec, regex })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.regex.is_match(text)
    }
}

/// Compiled cues in file order, names unique.
#[derive(Debug, Clone)]
pub struct CueSet {
    cues: Vec<Cue>,
}

impl CueSet {
    pub fn new(specs: Vec<CueSpec>) -> Result<CueSet> {
        let mut seen = HashSet::new();
        let mut cues = Vec::with_capacity(specs.len());
        for spec in specs {
            if !seen.insert(spec.name.clone()) {
                return Err(Error::InvalidCue {
                    name: spec.name,
                    message: "duplicate cue name".into(),
                });
            }
            cues.push(Cue::compile(spec)?);
        }
        Ok(CueSet { cues })
    }

    /// The shipped cue file.
    pub fn builtin() -> CueSet {
        CueSet::parse(BUILTIN_CUES.as_bytes()).expect("shipped cue file is valid")
    }

    pub fn parse(reader: impl BufRead) -> Result<CueSet> {
        let mut specs = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: n + 1,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let spec: CueSpec = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: n + 1,
                message: e.to_string(),
            })?;
            specs.push(spec);
        }
        CueSet::new(specs)
    }

    pub fn load(path: &Path) -> Result<CueSet> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        CueSet::parse(std::io::BufReader::new(f))
    }

    pub fn cues(&self) -> &[Cue] {
        &self.cues
    }

    pub fn len(&self) -> usize {
        self.cues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cues.is_empty()
    }
}

/// Post ids matching one cue, in corpus order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CueMatches {
    pub cue: String,
    pub class_hint: CueClass,
    pub post_ids: Vec<String>,
}

/// A post matches a cue when its response text matches, it has a parent and
/// it has at most [`MAX_CUE_WORDS`] words. Results follow cue-file order.
pub fn retrieve(corpus: &Corpus, cues: &CueSet) -> Vec<CueMatches> {
    let per_post: Vec<Vec<usize>> = corpus
        .pairs()
        .par_iter()
        .map(|pair| {
            if !pair.has_parent() || word_count(pair.text()) > MAX_CUE_WORDS {
                return Vec::new();
            }
            (0..cues.len()).filter(|&i| cues.cues[i].is_match(pair.text())).collect()
        })
        .collect();
    let mut out: Vec<CueMatches> = cues
        .cues
        .iter()
        .map(|c| CueMatches {
            cue: c.spec.name.clone(),
            class_hint: c.spec.class_hint,
            post_ids: Vec::new(),
        })
        .collect();
    for (pair, hits) in corpus.iter().zip(per_post) {
        for i in hits {
            out[i].post_ids.push(pair.id().to_string());
        }
    }
    out
}

/// Posts with a question sentence, not the last one, directly followed by
/// a statement.
pub fn rq_candidates(corpus: &Corpus, analyzer: &Analyzer) -> Vec<String> {
    let keep: Vec<bool> = corpus
        .pairs()
        .par_iter()
        .map(|pair| {
            let sentences = analyzer.analyze(pair.text());
            sentences.windows(2).any(|w| w[0].is_question && !w[1].is_question)
        })
        .collect();
    corpus
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p.id().to_string())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchItem {
    pub post_id: String,
    pub cue: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batches {
    pub batches: Vec<Vec<BatchItem>>,
    pub warnings: Vec<String>,
}

/// Shuffles each cue's posts, interleaves cues round-robin, cuts the stream
/// into batches and shuffles inside each batch. A post matched by several
/// cues goes out once, under the first cue that reaches it.
pub fn sample_batches(matches: &[CueMatches], batch_size: usize, seed: u64) -> Result<Batches> {
    if batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queues: Vec<(&str, Vec<&str>)> = matches
        .iter()
        .map(|m| {
            let mut ids: Vec<&str> = m.post_ids.iter().map(String::as_str).collect();
            ids.shuffle(&mut rng);
            (m.cue.as_str(), ids)
        })
        .collect();
    for (_, q) in &mut queues {
        q.reverse();
    }

    let mut seen = HashSet::new();
    let mut stream = Vec::new();
    loop {
        let mut progressed = false;
        for (cue, q) in &mut queues {
            while let Some(id) = q.pop() {
                progressed = true;
                if seen.insert(id) {
                    stream.push(BatchItem {
                        post_id: id.to_string(),
                        cue: cue.to_string(),
                    });
                    break;
                }
            }
        }
        if !progressed {
            break;
        }
    }

    let mut warnings = Vec::new();
    let batches: Vec<Vec<BatchItem>> = stream
        .chunks(batch_size)
        .enumerate()
        .map(|(i, chunk)| {
            let mut b = chunk.to_vec();
            b.shuffle(&mut rng);
            let cues: HashSet<&str> = b.iter().map(|x| x.cue.as_str()).collect();
            if cues.len() < 2 {
                warnings.push(format!("batch {i} draws on a single cue; cues are not mixed"));
            }
            b
        })
        .collect();
    Ok(Batches { batches, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CueStatsRow {
    pub cue: String,
    pub class_hint: CueClass,
    pub found: usize,
    pub annotated: usize,
    pub sarcastic: usize,
    /// 100 · sarcastic / annotated; undefined with nothing annotated.
    pub pct_sarcastic: Option<f64>,
}

impl CueStatsRow {
    /// Whole-percent display, "n/a" when undefined.
    pub fn pct_display(&self) -> String {
        match self.pct_sarcastic {
            Some(p) => format!("{}%", p.round() as i64),
            None => "n/a".to_string(),
        }
    }
}

/// Per-cue found / annotated / sarcastic counts. `verdicts` maps each
/// annotated post to its aggregated label; posts set aside are left out of
/// it by the caller.
pub fn cue_stats(matches: &[CueMatches], verdicts: &BTreeMap<String, Label>) -> Result<Vec<CueStatsRow>> {
    let known: HashSet<&str> = matches.iter().flat_map(|m| m.post_ids.iter().map(String::as_str)).collect();
    if let Some(id) = verdicts.keys().find(|id| !known.contains(id.as_str())) {
        return Err(Error::UnknownPost(id.clone()));
    }
    Ok(matches
        .iter()
        .map(|m| {
            let labels: Vec<Label> = m.post_ids.iter().filter_map(|id| verdicts.get(id).copied()).collect();
            let annotated = labels.len();
            let sarcastic = labels.iter().filter(|&&l| l == Label::Sarcastic).count();
            CueStatsRow {
                cue: m.cue.clone(),
                class_hint: m.class_hint,
                found: m.post_ids.len(),
                annotated,
                sarcastic,
                pct_sarcastic: (annotated > 0).then(|| 100.0 * sarcastic as f64 / annotated as f64),
            }
        })
        .collect())
}

pub fn write_cue_stats_tsv(rows: &[CueStatsRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "cue\tclass\tfound\tannotated\tsarcastic\tpct_sarc")?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.cue,
            r.class_hint,
            r.found,
            r.annotated,
            r.sarcastic,
            r.pct_display()
        )?;
    }
    Ok(())
}

pub fn write_matches_jsonl(matches: &[CueMatches], mut out: impl Write) -> std::io::Result<()> {
    for m in matches {
        serde_json::to_writer(&mut out, m)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_matches_jsonl(reader: impl BufRead) -> Result<Vec<CueMatches>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: n + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}
