use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::embed::EmbeddingTable;
use crate::error::{Error, Result};

/// One post as seen by the learner: token surfaces and lowercased forms.
/// Punctuation runs and emoticons are ordinary tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedPost {
    pub surfaces: Vec<String>,
    pub lowers: Vec<String>,
}

impl TokenizedPost {
    pub fn from_tokens(tokens: &[crate::syntax::Token]) -> Self {
        TokenizedPost {
            surfaces: tokens.iter().map(|t| t.surface.clone()).collect(),
            lowers: tokens.iter().map(|t| t.lower.clone()).collect(),
        }
    }
}

/// All 1..=`n_max` grams of `tokens`, joined with a single space, with counts.
pub fn ngram_counts(tokens: &[String], n_max: usize) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for n in 1..=n_max {
        for w in tokens.windows(n) {
            *out.entry(w.join(" ")).or_insert(0) += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabularyData", into = "VocabularyData")]
pub struct Vocabulary {
    pub n_max: usize,
    pub min_df: usize,
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct VocabularyData {
    n_max: usize,
    min_df: usize,
    terms: Vec<String>,
}

impl From<VocabularyData> for Vocabulary {
    fn from(d: VocabularyData) -> Self {
        Vocabulary::from_terms(d.n_max, d.min_df, d.terms)
    }
}

impl From<Vocabulary> for VocabularyData {
    fn from(v: Vocabulary) -> Self {
        VocabularyData {
            n_max: v.n_max,
            min_df: v.min_df,
            terms: v.terms,
        }
    }
}

impl Vocabulary {
    pub fn from_terms(n_max: usize, min_df: usize, terms: Vec<String>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary {
            n_max,
            min_df,
            terms,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Count vector over the vocabulary; unseen n-grams are dropped.
    pub fn transform(&self, tokens: &[String]) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = ngram_counts(tokens, self.n_max)
            .into_iter()
            .filter_map(|(g, c)| self.id(&g).map(|i| (i, c as f64)))
            .collect();
        v.sort_unstable_by_key(|&(i, _)| i);
        v
    }
}

/// Vocabulary of n-grams occurring in at least `min_df` training posts,
/// sorted lexicographically.
pub fn fit_ngram_vocab(train: &[Vec<String>], n_max: usize, min_df: usize) -> Result<Vocabulary> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for post in train {
        for g in ngram_counts(post, n_max).into_keys() {
            *df.entry(g).or_insert(0) += 1;
        }
    }
    let terms: Vec<String> = df.into_iter().filter(|&(_, d)| d >= min_df).map(|(g, _)| g).collect();
    Ok(Vocabulary::from_terms(n_max, min_df, terms))
}

/// Sparse part indexed into the fitted vocabulary, optional dense part.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    pub sparse: Vec<(usize, f64)>,
    pub dense: Option<Vec<f64>>,
}

impl FeatureVector {
    /// All nonzero coordinates in the joint space where dense components
    /// follow `sparse_dim` sparse ones.
    pub fn entries(&self, sparse_dim: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let dense = self.dense.iter().flat_map(move |d| {
            d.iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .map(move |(j, &x)| (sparse_dim + j, x))
        });
        self.sparse.iter().copied().chain(dense)
    }
}

#[derive(Debug, Clone)]
pub enum FeatureConfig {
    /// Counts of lowercased token n-grams.
    NGrams { n_max: usize, min_df: usize },
    /// Mean of pretrained token vectors.
    Embedding { table: Arc<EmbeddingTable> },
}

impl FeatureConfig {
    pub fn ngrams() -> Self {
        FeatureConfig::NGrams { n_max: 3, min_df: 1 }
    }

    pub fn name(&self) -> String {
        match self {
            FeatureConfig::NGrams { n_max, min_df } => format!("ngrams(n_max={n_max},min_df={min_df})"),
            FeatureConfig::Embedding { table } => format!("embedding-mean(dim={})", table.dim()),
        }
    }
}

/// A feature config fitted on one training side.
#[derive(Debug, Clone)]
pub enum FittedFeatures {
    NGrams(Vocabulary),
    Embedding(Arc<EmbeddingTable>),
}

impl FittedFeatures {
    pub fn fit(config: &FeatureConfig, train: &[&TokenizedPost]) -> Result<Self> {
        match config {
            FeatureConfig::NGrams { n_max, min_df } => {
                let lowers: Vec<Vec<String>> = train.iter().map(|p| p.lowers.clone()).collect();
                Ok(FittedFeatures::NGrams(fit_ngram_vocab(&lowers, *n_max, *min_df)?))
            }
            FeatureConfig::Embedding { table } => {
                if train.is_empty() {
                    return Err(Error::EmptyTrainingSet);
                }
                Ok(FittedFeatures::Embedding(table.clone()))
            }
        }
    }

    pub fn sparse_dim(&self) -> usize {
        match self {
            FittedFeatures::NGrams(v) => v.len(),
            FittedFeatures::Embedding(_) => 0,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FittedFeatures::NGrams(v) => v.len(),
            FittedFeatures::Embedding(t) => t.dim(),
        }
    }

    pub fn transform(&self, post: &TokenizedPost) -> FeatureVector {
        match self {
            FittedFeatures::NGrams(v) => FeatureVector {
                sparse: v.transform(&post.lowers),
                dense: None,
            },
            FittedFeatures::Embedding(t) => FeatureVector {
                sparse: Vec::new(),
                dense: Some(t.embed_average(&post.surfaces).vector),
            },
        }
    }
}
