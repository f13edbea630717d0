//! Quote-response pairs, corpus ingestion, length filtering and fold splitting.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary sarcasm label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "sarc", alias = "SARC", alias = "sarcastic", alias = "SARCASTIC")]
    Sarcastic,
    #[serde(rename = "notsarc", alias = "NOTSARC", alias = "not_sarcastic", alias = "NOT_SARCASTIC")]
    NotSarcastic,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Sarcastic, Label::NotSarcastic];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Sarcastic => "sarc",
            Label::NotSarcastic => "notsarc",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Sarcastic => Label::NotSarcastic,
            Label::NotSarcastic => Label::Sarcastic,
        }
    }

    /// Index used for two-slot count arrays.
    pub fn index(self) -> usize {
        match self {
            Label::Sarcastic => 0,
            Label::NotSarcastic => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sarc" | "sarcastic" => Ok(Label::Sarcastic),
            "notsarc" | "not_sarcastic" | "not-sarcastic" => Ok(Label::NotSarcastic),
            other => Err(Error::InvalidArgument(format!("unknown label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub parent_id: Option<String>,
    pub text: String,
    pub topic: Option<String>,
}

/// A response post shown together with its dialogic parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuoteResponsePair {
    pub quote: Option<Post>,
    pub response: Post,
    pub label: Option<Label>,
}

impl QuoteResponsePair {
    pub fn id(&self) -> &str {
        &self.response.id
    }

    pub fn text(&self) -> &str {
        &self.response.text
    }

    pub fn has_parent(&self) -> bool {
        self.response.parent_id.is_some() || self.quote.is_some()
    }

    pub fn with_label(mut self, label: Option<Label>) -> Self {
        self.label = label;
        self
    }

    pub fn to_record(&self) -> Record {
        Record {
            id: self.response.id.clone(),
            parent_id: self.response.parent_id.clone(),
            quote: self.quote.as_ref().map(|q| q.text.clone()),
            text: self.response.text.clone(),
            topic: self.response.topic.clone(),
            label: self.label,
        }
    }
}

/// One line of the JSON-lines interchange format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    #[serde(default)]
    pub parent_id: Option<String>,
    #[serde(default)]
    pub quote: Option<String>,
    pub text: String,
    #[serde(default)]
    pub topic: Option<String>,
    #[serde(default)]
    pub label: Option<Label>,
}

impl Record {
    fn into_pair(self) -> QuoteResponsePair {
        let quote = self.quote.map(|text| Post {
            id: self
                .parent_id
                .clone()
                .unwrap_or_else(|| format!("{}#quote", self.id)),
            parent_id: None,
            text,
            topic: self.topic.clone(),
        });
        QuoteResponsePair {
            quote,
            response: Post {
                id: self.id,
                parent_id: self.parent_id,
                text: self.text,
                topic: self.topic,
            },
            label: self.label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// An ordered, immutable collection of quote-response pairs with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pairs: Vec<QuoteResponsePair>,
}

impl Corpus {
    pub fn new(pairs: Vec<QuoteResponsePair>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(pairs.len());
        for (i, pair) in pairs.iter().enumerate() {
            if pair.response.id.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "empty id".into(),
                });
            }
            if pair.response.text.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("post `{}` has empty text", pair.response.id),
                });
            }
            if !seen.insert(pair.response.id.as_str()) {
                return Err(Error::DuplicateId(pair.response.id.clone()));
            }
        }
        Ok(Corpus { pairs })
    }

    /// Builds a labeled corpus from `(id, text, label)` triples; every post gets
    /// a synthetic parent. Mostly useful for tests and generated data.
    pub fn from_texts<I, S, T>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T, Option<Label>)>,
        S: Into<String>,
        T: Into<String>,
    {
        let pairs = items
            .into_iter()
            .map(|(id, text, label)| {
                let id = id.into();
                QuoteResponsePair {
                    quote: None,
                    response: Post {
                        parent_id: Some(format!("{id}-parent")),
                        id,
                        text: text.into(),
                        topic: None,
                    },
                    label,
                }
            })
            .collect();
        Corpus::new(pairs)
    }

    pub fn pairs(&self) -> &[QuoteResponsePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, QuoteResponsePair> {
        self.pairs.iter()
    }

    pub fn get(&self, id: &str) -> Option<&QuoteResponsePair> {
        self.pairs.iter().find(|p| p.id() == id)
    }

    /// Recount of labels over all pairs. Unlabeled pairs are not counted.
    pub fn class_counts(&self) -> BTreeMap<Label, usize> {
        let mut counts = BTreeMap::new();
        for label in self.pairs.iter().filter_map(|p| p.label) {
            *counts.entry(label).or_insert(0) += 1;
        }
        counts
    }

    pub fn count_of(&self, label: Label) -> usize {
        self.pairs.iter().filter(|p| p.label == Some(label)).count()
    }

    /// Fails on the first unlabeled pair.
    pub fn require_labeled(&self) -> Result<()> {
        match self.pairs.iter().find(|p| p.label.is_none()) {
            Some(p) => Err(Error::Unlabeled(p.id().to_string())),
            None => Ok(()),
        }
    }

    /// Keeps pairs for which `keep` returns true, in order.
    pub fn filtered(&self, mut keep: impl FnMut(&QuoteResponsePair) -> bool) -> Corpus {
        Corpus {
            pairs: self.pairs.iter().filter(|p| keep(p)).cloned().collect(),
        }
    }

    /// Sub-corpus of the given positions, in the given order.
    pub fn select(&self, indices: &[usize]) -> Corpus {
        Corpus {
            pairs: indices.iter().map(|&i| self.pairs[i].clone()).collect(),
        }
    }

    /// Concatenates corpora; ids must stay unique.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Corpus>) -> Result<Corpus> {
        Corpus::new(
            parts
                .into_iter()
                .flat_map(|c| c.pairs.iter().cloned())
                .collect(),
        )
    }

    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        for pair in &self.pairs {
            serde_json::to_writer(&mut out, &pair.to_record())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save_jsonl(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_jsonl(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a QuoteResponsePair;
    type IntoIter = std::slice::Iter<'a, QuoteResponsePair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

pub fn load_corpus(path: &Path, format: Format) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    match format {
        Format::Jsonl => read_jsonl(reader),
        Format::Csv => read_csv(reader),
    }
}

pub fn read_jsonl(reader: impl BufRead) -> Result<Corpus> {
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        pairs.push((line_no, record.into_pair()));
    }
    corpus_with_lines(pairs)
}

/// CSV import with the same column names as the JSON-lines record; empty
/// cells are treated as null.
pub fn read_csv(reader: impl std::io::Read) -> Result<Corpus> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let id_col = column("id");
    let text_col = column("text");
    let parent_col = column("parent_id");
    let quote_col = column("quote");
    let topic_col = column("topic");
    let label_col = column("label");

    let mut pairs = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line_no = i + 2;
        let row = row.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let cell = |col: Option<usize>| {
            col.and_then(|c| row.get(c))
                .map(str::to_string)
                .filter(|s| !s.is_empty())
        };
        let id = cell(id_col).ok_or_else(|| Error::Parse {
            line: line_no,
            message: "missing field `id`".into(),
        })?;
        let text = cell(text_col).ok_or_else(|| Error::Parse {
            line: line_no,
            message: "missing field `text`".into(),
        })?;
        let label = cell(label_col)
            .map(|l| l.parse::<Label>())
            .transpose()
            .map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        let record = Record {
            id,
            parent_id: cell(parent_col),
            quote: cell(quote_col),
            text,
            topic: cell(topic_col),
            label,
        };
        pairs.push((line_no, record.into_pair()));
    }
    corpus_with_lines(pairs)
}

fn corpus_with_lines(pairs: Vec<(usize, QuoteResponsePair)>) -> Result<Corpus> {
    let mut seen = HashSet::new();
    for (line, pair) in &pairs {
        if pair.response.id.is_empty() || pair.response.text.is_empty() {
            return Err(Error::Parse {
                line: *line,
                message: "id and text must be nonempty".into(),
            });
        }
        if !seen.insert(pair.response.id.clone()) {
            return Err(Error::DuplicateId(pair.response.id.clone()));
        }
    }
    Ok(Corpus {
        pairs: pairs.into_iter().map(|(_, p)| p).collect(),
    })
}

/// Number of words in `text`: whitespace-separated runs with at least one
/// alphanumeric character. `[emoticon-*]` markers are not words.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace()
        .filter(|run| !is_emoticon_marker(run))
        .filter(|run| run.chars().any(char::is_alphanumeric))
        .count()
}

fn is_emoticon_marker(run: &str) -> bool {
    let run = run.trim_matches(|c: char| !c.is_alphanumeric() && c != '[' && c != ']');
    run.starts_with("[emoticon") && run.ends_with(']')
}

/// Keeps pairs whose response has between `min` and `max` words, inclusive.
pub fn word_count_filter(corpus: &Corpus, min: usize, max: usize) -> Result<Corpus> {
    if min > max {
        return Err(Error::InvalidArgument(format!(
            "word_count_filter: min {min} > max {max}"
        )));
    }
    Ok(corpus.filtered(|p| (min..=max).contains(&word_count(p.text()))))
}

pub const DEFAULT_MIN_WORDS: usize = 10;
pub const DEFAULT_MAX_WORDS: usize = 150;

/// Stratified k-fold assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub assignment: BTreeMap<String, usize>,
    /// Fold of each pair, aligned with corpus order.
    by_index: Vec<usize>,
}

impl FoldAssignment {
    pub fn fold_of_index(&self, index: usize) -> usize {
        self.by_index[index]
    }

    pub fn by_index(&self) -> &[usize] {
        &self.by_index
    }

    /// Corpus positions in `fold` (test side) and outside it (train side).
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let (test, train): (Vec<usize>, Vec<usize>) =
            (0..self.by_index.len()).partition(|&i| self.by_index[i] == fold);
        (train, test)
    }
}

/// Stratified assignment: each class is shuffled with `seed` and dealt
/// round-robin, so per-fold counts of a class differ by at most one.
pub fn split_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    corpus.require_labeled()?;
    // an absent class does not constrain k; single-class corpora still split
    let smallest = Label::ALL
        .iter()
        .map(|&l| corpus.count_of(l))
        .filter(|&n| n > 0)
        .min()
        .unwrap_or(0);
    if k > smallest {
        return Err(Error::TooManyFolds { k, smallest });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_index = vec![0usize; corpus.len()];
    let mut offset = 0;
    for label in Label::ALL {
        let mut members: Vec<usize> = corpus
            .iter()
            .enumerate()
            .filter(|(_, p)| p.label == Some(label))
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        for (j, &i) in members.iter().enumerate() {
            by_index[i] = (offset + j) % k;
        }
        // continue dealing where this class stopped so fold totals stay level
        offset = (offset + members.len()) % k;
    }
    let assignment = corpus
        .iter()
        .zip(&by_index)
        .map(|(p, &f)| (p.id().to_string(), f))
        .collect();
    Ok(FoldAssignment {
        k,
        assignment,
        by_index,
    })
}

/// Stratified train/dev split; `train_fraction` of each class (rounded) goes
/// to train.
pub fn train_dev_split(corpus: &Corpus, train_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} outside [0, 1]"
        )));
    }
    corpus.require_labeled()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; corpus.len()];
    for label in Label::ALL {
        let mut members: Vec<usize> = corpus
            .iter()
            .enumerate()
            .filter(|(_, p)| p.label == Some(label))
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        let n_train = (members.len() as f64 * train_fraction).round() as usize;
        for &i in &members[..n_train] {
            in_train[i] = true;
        }
    }
    let train: Vec<usize> = (0..corpus.len()).filter(|&i| in_train[i]).collect();
    let dev: Vec<usize> = (0..corpus.len()).filter(|&i| !in_train[i]).collect();
    Ok((corpus.select(&train), corpus.select(&dev)))
}
