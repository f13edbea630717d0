//! Supervised classification: n-gram and embedding-mean features, a linear
//! SVM trained by SGD, cross-validation and learning curves.

mod embed;
mod eval;
mod features;
mod svm;

pub use embed::{Embedded, EmbeddingTable};
pub use eval::{
    cross_validate, curve_sizes, learning_curve, tokenize_corpus, train_classifier, Classifier, ClassMetrics,
    Confusion, CurvePoint, EvalReport, FoldReport, LearningCurve, PerClass, Predictor,
};
pub use features::{
    fit_ngram_vocab, ngram_counts, FeatureConfig, FeatureVector, FittedFeatures, TokenizedPost, Vocabulary,
};
pub use svm::{hinge_objective, hinge_subgradient, train, train_traced, Dataset, Hyperparams, LinearModel};
