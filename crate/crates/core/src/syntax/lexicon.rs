use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use super::Tag;
use crate::error::{Error, Result};

const LEXICON_TSV: &str = include_str!("../../data/lexicon.tsv");
const PARTICIPLES: &str = include_str!("../../data/participles.txt");
const EMOTICONS: &str = include_str!("../../data/emoticons.txt");
const ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

/// File names expected inside a lexicon directory.
pub const LEXICON_FILE: &str = "lexicon.tsv";
pub const PARTICIPLE_FILE: &str = "participles.txt";
pub const EMOTICON_FILE: &str = "emoticons.txt";
pub const ABBREVIATION_FILE: &str = "abbreviations.txt";

/// Read-only word lists backing the tokenizer, tagger and chunker.
#[derive(Debug, Clone)]
pub struct Lexicon {
    tags: HashMap<String, Vec<Tag>>,
    participles: HashSet<String>,
    /// Sorted longest first so matching is greedy.
    emoticons: Vec<String>,
    abbreviations: Vec<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::builtin()
    }
}

impl Lexicon {
    pub fn builtin() -> Self {
        Lexicon::parse(LEXICON_TSV, PARTICIPLES, EMOTICONS, ABBREVIATIONS)
            .expect("shipped lexicon is well formed")
    }

    /// Loads a lexicon directory. Missing files fall back to the shipped
    /// copies.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str, fallback: &str| -> Result<String> {
            let path = dir.join(name);
            if path.exists() {
                fs::read_to_string(&path).map_err(|e| Error::io(path, e))
            } else {
                Ok(fallback.to_string())
            }
        };
        Lexicon::parse(
            &read(LEXICON_FILE, LEXICON_TSV)?,
            &read(PARTICIPLE_FILE, PARTICIPLES)?,
            &read(EMOTICON_FILE, EMOTICONS)?,
            &read(ABBREVIATION_FILE, ABBREVIATIONS)?,
        )
    }

    pub fn parse(lexicon: &str, participles: &str, emoticons: &str, abbreviations: &str) -> Result<Self> {
        let mut tags: HashMap<String, Vec<Tag>> = HashMap::new();
        for (i, line) in lexicon.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected word<TAB>TAG".into(),
            })?;
            let tag: Tag = tag.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("unknown tag `{tag}`"),
            })?;
            let entry = tags.entry(word.to_lowercase()).or_default();
            if !entry.contains(&tag) {
                entry.push(tag);
            }
        }
        let list = |s: &str| -> Vec<String> {
            s.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect()
        };
        let mut emoticons = list(emoticons);
        emoticons.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        emoticons.dedup();
        let mut abbreviations: Vec<String> =
            list(abbreviations).into_iter().map(|a| a.to_lowercase()).collect();
        abbreviations.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        abbreviations.dedup();
        Ok(Lexicon {
            tags,
            participles: list(participles)
                .into_iter()
                .map(|p| p.to_lowercase())
                .collect(),
            emoticons,
            abbreviations,
        })
    }

    /// Lexicon tags of a lowercased word, default first.
    pub fn tags(&self, lower: &str) -> Option<&[Tag]> {
        self.tags.get(lower).map(Vec::as_slice)
    }

    pub fn contains(&self, lower: &str) -> bool {
        self.tags.contains_key(lower)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Past participle per the irregular list or the `-ed` suffix rule.
    pub fn is_participle(&self, lower: &str) -> bool {
        self.participles.contains(lower) || (lower.len() > 3 && lower.ends_with("ed"))
    }

    pub fn emoticons(&self) -> &[String] {
        &self.emoticons
    }

    pub fn abbreviations(&self) -> &[String] {
        &self.abbreviations
    }
}
