use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::{FeatureConfig, FeatureVector, FittedFeatures, TokenizedPost};
use super::svm::{train, Dataset, Hyperparams, LinearModel};
use crate::corpus::{split_folds, Corpus, Label};
use crate::error::{Error, Result};
use crate::syntax::Analyzer;

/// 2×2 confusion counts, gold × predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub sarc_as_sarc: u64,
    pub sarc_as_notsarc: u64,
    pub notsarc_as_sarc: u64,
    pub notsarc_as_notsarc: u64,
}

impl Confusion {
    pub fn add(&mut self, gold: Label, pred: Label) {
        let cell = match (gold, pred) {
            (Label::Sarcastic, Label::Sarcastic) => &mut self.sarc_as_sarc,
            (Label::Sarcastic, Label::NotSarcastic) => &mut self.sarc_as_notsarc,
            (Label::NotSarcastic, Label::Sarcastic) => &mut self.notsarc_as_sarc,
            (Label::NotSarcastic, Label::NotSarcastic) => &mut self.notsarc_as_notsarc,
        };
        *cell += 1;
    }

    pub fn merge(&mut self, o: &Confusion) {
        self.sarc_as_sarc += o.sarc_as_sarc;
        self.sarc_as_notsarc += o.sarc_as_notsarc;
        self.notsarc_as_sarc += o.notsarc_as_sarc;
        self.notsarc_as_notsarc += o.notsarc_as_notsarc;
    }

    pub fn total(&self) -> u64 {
        self.sarc_as_sarc + self.sarc_as_notsarc + self.notsarc_as_sarc + self.notsarc_as_notsarc
    }

    pub fn tp(&self, class: Label) -> u64 {
        match class {
            Label::Sarcastic => self.sarc_as_sarc,
            Label::NotSarcastic => self.notsarc_as_notsarc,
        }
    }

    pub fn fp(&self, class: Label) -> u64 {
        match class {
            Label::Sarcastic => self.notsarc_as_sarc,
            Label::NotSarcastic => self.sarc_as_notsarc,
        }
    }

    pub fn fn_(&self, class: Label) -> u64 {
        self.fp(class.other())
    }

    /// Per-class scores. An undefined ratio (zero denominator) is 0.
    pub fn metrics(&self, class: Label) -> ClassMetrics {
        let (tp, fp, fn_) = (self.tp(class) as f64, self.fp(class) as f64, self.fn_(class) as f64);
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        ClassMetrics {
            precision,
            recall,
            f1: ratio(2.0 * precision * recall, precision + recall),
        }
    }

    pub fn per_class(&self) -> PerClass {
        PerClass {
            sarc: self.metrics(Label::Sarcastic),
            notsarc: self.metrics(Label::NotSarcastic),
        }
    }

    fn undefined(&self, class: Label) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.tp(class) + self.fp(class) == 0 {
            out.push("precision");
        }
        if self.tp(class) + self.fn_(class) == 0 {
            out.push("recall");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    pub sarc: ClassMetrics,
    pub notsarc: ClassMetrics,
}

impl PerClass {
    pub fn get(&self, class: Label) -> ClassMetrics {
        match class {
            Label::Sarcastic => self.sarc,
            Label::NotSarcastic => self.notsarc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub confusion: Confusion,
    pub metrics: PerClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub features: String,
    pub hyperparams: Hyperparams,
    pub k: usize,
    pub seed: u64,
    pub posts: usize,
    pub folds: Vec<FoldReport>,
    /// Sum of fold confusions.
    pub pooled: Confusion,
    pub metrics: PerClass,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn write_json(&self, out: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    /// One row per class with pooled scores, two decimals.
    pub fn write_tsv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "features\tclass\tprecision\trecall\tf1")?;
        for class in Label::ALL {
            let m = self.metrics.get(class);
            writeln!(
                out,
                "{}\t{}\t{:.2}\t{:.2}\t{:.2}",
                self.features, class, m.precision, m.recall, m.f1
            )?;
        }
        Ok(())
    }
}

/// A fitted feature map with the model trained over it.
#[derive(Debug, Clone)]
pub struct Classifier {
    pub features: FittedFeatures,
    pub model: Predictor,
}

/// A training side with one class yields a constant predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Predictor {
    Linear(LinearModel),
    Constant(Label),
}

impl Predictor {
    pub fn predict(&self, x: &FeatureVector) -> Label {
        match self {
            Predictor::Linear(m) => m.predict(x),
            Predictor::Constant(l) => *l,
        }
    }
}

impl Classifier {
    pub fn predict(&self, post: &TokenizedPost) -> Label {
        self.model.predict(&self.features.transform(post))
    }
}

pub fn tokenize_corpus(c: &Corpus, analyzer: &Analyzer) -> Vec<TokenizedPost> {
    c.pairs()
        .par_iter()
        .map(|p| TokenizedPost::from_tokens(&analyzer.tokenize(p.text())))
        .collect()
}

/// Fits features on `posts` and trains. With one class present the result is
/// a constant predictor and a warning, unless `allow_constant` is off.
fn fit_classifier(
    posts: &[&TokenizedPost],
    labels: &[Label],
    config: &FeatureConfig,
    hp: &Hyperparams,
    allow_constant: bool,
) -> Result<(Classifier, Option<String>)> {
    let features = FittedFeatures::fit(config, posts)?;
    let xs: Vec<FeatureVector> = posts.iter().map(|p| features.transform(p)).collect();
    let data = Dataset {
        xs: &xs,
        labels,
        dim: features.dim(),
        sparse_dim: features.sparse_dim(),
    };
    match train(&data, hp) {
        Ok(m) => Ok((
            Classifier {
                features,
                model: Predictor::Linear(m),
            },
            None,
        )),
        Err(Error::SingleClass) if allow_constant => {
            let only = labels[0];
            Ok((
                Classifier {
                    features,
                    model: Predictor::Constant(only),
                },
                Some(format!("training side has only `{only}` posts; predicting `{only}` for every post")),
            ))
        }
        Err(e) => Err(e),
    }
}

/// Trains on the whole labeled corpus.
pub fn train_classifier(c: &Corpus, config: &FeatureConfig, hp: &Hyperparams, analyzer: &Analyzer) -> Result<Classifier> {
    c.require_labeled()?;
    let posts = tokenize_corpus(c, analyzer);
    let refs: Vec<&TokenizedPost> = posts.iter().collect();
    let labels: Vec<Label> = c.iter().map(|p| p.label.expect("labeled")).collect();
    fit_classifier(&refs, &labels, config, hp, false).map(|(m, _)| m)
}

/// Stratified k-fold cross-validation. Features are fitted on each fold's
/// training side only. Folds run in parallel.
pub fn cross_validate(
    c: &Corpus,
    k: usize,
    config: &FeatureConfig,
    hp: &Hyperparams,
    seed: u64,
    analyzer: &Analyzer,
) -> Result<EvalReport> {
    let folds = split_folds(c, k, seed)?;
    let posts = tokenize_corpus(c, analyzer);
    let labels: Vec<Label> = c.iter().map(|p| p.label.expect("labeled")).collect();

    let results: Vec<(FoldReport, Option<String>)> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let (train_idx, test_idx) = folds.split(fold);
            let train_posts: Vec<&TokenizedPost> = train_idx.iter().map(|&i| &posts[i]).collect();
            let train_labels: Vec<Label> = train_idx.iter().map(|&i| labels[i]).collect();
            let (clf, warning) = fit_classifier(&train_posts, &train_labels, config, hp, true)?;
            let mut confusion = Confusion::default();
            for &i in &test_idx {
                confusion.add(labels[i], clf.predict(&posts[i]));
            }
            Ok((
                FoldReport {
                    fold,
                    train_size: train_idx.len(),
                    test_size: test_idx.len(),
                    confusion,
                    metrics: confusion.per_class(),
                },
                warning.map(|w| format!("fold {fold}: {w}")),
            ))
        })
        .collect::<Result<_>>()?;

    let mut pooled = Confusion::default();
    let mut warnings = Vec::new();
    let mut fold_reports = Vec::with_capacity(k);
    for (r, w) in results {
        pooled.merge(&r.confusion);
        warnings.extend(w);
        fold_reports.push(r);
    }
    for class in Label::ALL {
        let undefined = pooled.undefined(class);
        if !undefined.is_empty() {
            warnings.push(format!("{class}: {} undefined, reported as 0", undefined.join(" and ")));
        }
    }
    Ok(EvalReport {
        features: config.name(),
        hyperparams: *hp,
        k,
        seed,
        posts: c.len(),
        folds: fold_reports,
        pooled,
        metrics: pooled.per_class(),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Posts per class requested; a class smaller than this contributes all
    /// of its posts.
    pub size: usize,
    pub f_sarc: f64,
    pub f_notsarc: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub step: usize,
    pub max: usize,
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let map = |e: csv::Error| Error::InvalidArgument(e.to_string());
        w.write_record(["size", "f_sarc", "f_notsarc"]).map_err(map)?;
        for p in &self.points {
            w.write_record([p.size.to_string(), format!("{:.4}", p.f_sarc), format!("{:.4}", p.f_notsarc)])
                .map_err(map)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

/// Sizes `step, 2·step, …` not exceeding `max`, then `max` itself.
pub fn curve_sizes(step: usize, max: usize) -> Result<Vec<usize>> {
    if step == 0 {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    if step > max {
        return Err(Error::InvalidArgument(format!(
            "step {step} exceeds the per-class size {max}"
        )));
    }
    let mut sizes: Vec<usize> = (1..).map(|i| i * step).take_while(|&s| s <= max).collect();
    if sizes.last() != Some(&max) {
        sizes.push(max);
    }
    Ok(sizes)
}

/// Cross-validates on nested per-class subsets of growing size. Each class
/// is shuffled once with `seed`; the subset of size s takes its first s
/// posts, so smaller subsets are contained in larger ones.
pub fn learning_curve(
    c: &Corpus,
    step: usize,
    k: usize,
    config: &FeatureConfig,
    hp: &Hyperparams,
    seed: u64,
    analyzer: &Analyzer,
) -> Result<LearningCurve> {
    c.require_labeled()?;
    let max = Label::ALL
        .iter()
        .map(|&l| c.count_of(l))
        .filter(|&n| n > 0)
        .min()
        .ok_or(Error::EmptyTrainingSet)?;
    let sizes = curve_sizes(step, max)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orders: Vec<Vec<usize>> = Label::ALL
        .iter()
        .map(|&l| {
            let mut m: Vec<usize> = (0..c.len()).filter(|&i| c.pairs()[i].label == Some(l)).collect();
            m.shuffle(&mut rng);
            m
        })
        .collect();

    let points = sizes
        .par_iter()
        .map(|&s| {
            let mut idx: Vec<usize> = orders.iter().flat_map(|o| o[..s.min(o.len())].iter().copied()).collect();
            idx.sort_unstable();
            let r = cross_validate(&c.select(&idx), k, config, hp, seed, analyzer)?;
            Ok(CurvePoint {
                size: s,
                f_sarc: r.metrics.sarc.f1,
                f_notsarc: r.metrics.notsarc.f1,
                warnings: r.warnings,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LearningCurve { step, max, points })
}
