//! Shallow syntax: tokenizer, sentence splitter, rule-based tagger, NP/VP/PP
//! chunker and a chunk-based subject-verb-object heuristic.
//!
//! The tagger uses a 12-tag set that carries just the distinctions the
//! pattern templates need. Everything here is deterministic and pure; the
//! [`Lexicon`] is shared read-only state.

mod chunker;
mod lexicon;
mod sentence;
mod svo;
mod tagger;
mod tokenize;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use chunker::chunk;
pub(crate) use chunker::{BE_FORMS, DO_FORMS, HAVE_FORMS};
pub use lexicon::{Lexicon, ABBREVIATION_FILE, EMOTICON_FILE, LEXICON_FILE, PARTICIPLE_FILE};
pub use sentence::split_sentences;
pub use svo::extract_svo;
pub use tagger::pos_tag;
pub use tokenize::tokenize;

/// Version of the tokenizer/tagger/chunker rules and shipped lexicons.
/// Pattern statistics depend on it, so run manifests record it.
pub const SYNTAX_VERSION: &str = "shallow-syntax/1";

/// Environment variable naming a directory of lexicon files that override
/// the shipped ones.
pub const LEXICON_DIR_ENV: &str = "SARCKIT_LEXICON_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tag {
    Det,
    Noun,
    Pron,
    Verb,
    Aux,
    Adj,
    Adv,
    Prep,
    Poss,
    PunctRun,
    Emoticon,
    Other,
}

impl Tag {
    pub const ALL: [Tag; 12] = [
        Tag::Det,
        Tag::Noun,
        Tag::Pron,
        Tag::Verb,
        Tag::Aux,
        Tag::Adj,
        Tag::Adv,
        Tag::Prep,
        Tag::Poss,
        Tag::PunctRun,
        Tag::Emoticon,
        Tag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Det => "DET",
            Tag::Noun => "NOUN",
            Tag::Pron => "PRON",
            Tag::Verb => "VERB",
            Tag::Aux => "AUX",
            Tag::Adj => "ADJ",
            Tag::Adv => "ADV",
            Tag::Prep => "PREP",
            Tag::Poss => "POSS",
            Tag::PunctRun => "PUNCT_RUN",
            Tag::Emoticon => "EMOTICON",
            Tag::Other => "OTHER",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown tag `{s}`"))
    }
}

/// A token with its byte span in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub tag: Tag,
    pub span: Range<usize>,
}

impl Token {
    pub fn is_word(&self) -> bool {
        !matches!(self.tag, Tag::PunctRun | Tag::Emoticon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChunkKind {
    NP,
    VP,
    PP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Voice {
    Active,
    Passive,
}

/// Verb-group attributes, present exactly on VP chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VpFeatures {
    pub voice: Voice,
    pub infinitive: bool,
    pub has_aux: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub kind: ChunkKind,
    /// Token index range within the sentence.
    pub span: Range<usize>,
    /// Token index of the head.
    pub head: usize,
    pub vp: Option<VpFeatures>,
}

impl Chunk {
    pub fn is_vp(&self) -> bool {
        self.kind == ChunkKind::VP
    }

    pub fn is_passive(&self) -> bool {
        matches!(self.vp, Some(VpFeatures { voice: Voice::Passive, .. }))
    }

    pub fn is_infinitive(&self) -> bool {
        matches!(self.vp, Some(VpFeatures { infinitive: true, .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub chunks: Vec<Chunk>,
    pub is_question: bool,
}

impl Sentence {
    /// Builds an unchunked sentence and derives the question flag: the last
    /// non-emoticon token is a punctuation run containing `?`.
    pub fn new(tokens: Vec<Token>) -> Self {
        let is_question = tokens
            .iter()
            .rev()
            .find(|t| t.tag != Tag::Emoticon)
            .is_some_and(|t| t.tag == Tag::PunctRun && t.surface.contains('?'));
        Sentence {
            tokens,
            chunks: Vec::new(),
            is_question,
        }
    }

    pub fn head_lower(&self, chunk: &Chunk) -> &str {
        &self.tokens[chunk.head].lower
    }
}

/// Subject-verb-object relation read off chunks. Approximate by
/// construction: no dependency parse is involved.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SvoTriple {
    pub verb: String,
    pub negated: bool,
    pub subject: Option<String>,
    pub object: Option<String>,
}

impl fmt::Display for SvoTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}(", self.verb)?;
        let args: Vec<&str> = [self.subject.as_deref(), self.object.as_deref()]
            .into_iter()
            .flatten()
            .collect();
        write!(f, "{})", args.join(", "))
    }
}

/// Runs the whole pipeline: tokenize, split, tag, chunk.
#[derive(Debug, Clone, Default)]
pub struct Analyzer {
    lexicon: Arc<Lexicon>,
}

impl Analyzer {
    pub fn new(lexicon: Lexicon) -> Self {
        Analyzer {
            lexicon: Arc::new(lexicon),
        }
    }

    /// Uses the directory named by `SARCKIT_LEXICON_DIR` when set, otherwise
    /// the shipped lexicons.
    pub fn from_env() -> crate::Result<Self> {
        match std::env::var_os(LEXICON_DIR_ENV) {
            Some(dir) => Ok(Analyzer::new(Lexicon::from_dir(std::path::Path::new(&dir))?)),
            None => Ok(Analyzer::default()),
        }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        tokenize(text, &self.lexicon)
    }

    pub fn analyze(&self, text: &str) -> Vec<Sentence> {
        let tokens = tokenize(text, &self.lexicon);
        split_sentences(text, tokens)
            .into_iter()
            .map(|s| {
                let tagged = pos_tag(s.tokens, &self.lexicon);
                chunk(Sentence::new(tagged), &self.lexicon)
            })
            .collect()
    }

    /// Tokens of the whole text, tagged sentence by sentence.
    pub fn tagged_tokens(&self, text: &str) -> Vec<Token> {
        self.analyze(text).into_iter().flat_map(|s| s.tokens).collect()
    }
}
