//! Pattern-based one-class detectors, the threshold grid search with its
//! precision/recall frontier, and the not-sarcastic pre-filter.

use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Label};
use crate::error::Result;
use crate::patterns::{
    count_patterns, threshold_patterns, LexicoSyntacticPattern, PatternExtractor, PatternSet, PatternStats,
    ThresholdConfig,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakDetector {
    pub class: Label,
    pub patterns: HashSet<LexicoSyntacticPattern>,
    pub theta_n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    Hit,
    Abstain,
}

/// Outcome of running a sarcastic and a not-sarcastic detector together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Class(Label),
    Abstain,
}

impl WeakDetector {
    pub fn new(class: Label, patterns: impl IntoIterator<Item = LexicoSyntacticPattern>, theta_n: usize) -> Self {
        WeakDetector {
            class,
            patterns: patterns.into_iter().collect(),
            theta_n,
        }
    }

    pub fn from_set(set: &PatternSet, theta_n: usize) -> Self {
        WeakDetector::new(set.class, set.entries.iter().map(|e| e.pattern.clone()), theta_n)
    }

    /// Number of match sites among `post` that belong to the detector.
    pub fn match_sites(&self, post: &[LexicoSyntacticPattern]) -> usize {
        post.iter().filter(|p| self.patterns.contains(*p)).count()
    }

    /// HIT iff at least θ_n match sites.
    pub fn classify(&self, post: &[LexicoSyntacticPattern]) -> Decision {
        if self.match_sites(post) >= self.theta_n {
            Decision::Hit
        } else {
            Decision::Abstain
        }
    }

    pub fn classify_text(&self, text: &str, extractor: &PatternExtractor) -> Decision {
        self.classify(&extractor.extract(text))
    }
}

/// Runs both detectors. When both hit, the one with more match sites wins;
/// an exact tie abstains.
pub fn resolve(sarc: &WeakDetector, notsarc: &WeakDetector, post: &[LexicoSyntacticPattern]) -> Verdict {
    let a = (sarc.classify(post) == Decision::Hit).then(|| sarc.match_sites(post));
    let b = (notsarc.classify(post) == Decision::Hit).then(|| notsarc.match_sites(post));
    match (a, b) {
        (Some(_), None) => Verdict::Class(sarc.class),
        (None, Some(_)) => Verdict::Class(notsarc.class),
        (Some(x), Some(y)) if x > y => Verdict::Class(sarc.class),
        (Some(x), Some(y)) if y > x => Verdict::Class(notsarc.class),
        _ => Verdict::Abstain,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PRPoint {
    pub config: ThresholdConfig,
    /// Undefined when the detector hits nothing.
    pub precision: Option<f64>,
    /// Undefined when the gold set has no positives.
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl PRPoint {
    pub fn from_counts(config: ThresholdConfig, tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            (Some(_), Some(_)) => Some(0.0),
            _ => None,
        };
        PRPoint {
            config,
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
        }
    }

    /// Both precision and recall are defined.
    pub fn is_valid(&self) -> bool {
        self.precision.is_some() && self.recall.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub theta_f: Vec<u64>,
    pub theta_p: Vec<f64>,
    pub theta_n: Vec<usize>,
}

impl Default for Grid {
    /// θ_f 2..=6, θ_p 0.60..=0.85 by 0.05, θ_n 1..=3.
    fn default() -> Self {
        Grid {
            theta_f: (2..=6).collect(),
            theta_p: (60..=85).step_by(5).map(|k| k as f64 / 100.0).collect(),
            theta_n: vec![1, 2, 3],
        }
    }
}

impl Grid {
    /// Configs in grid order: θ_f outermost, θ_n innermost.
    pub fn configs(&self) -> Vec<ThresholdConfig> {
        let mut out = Vec::with_capacity(self.theta_f.len() * self.theta_p.len() * self.theta_n.len());
        for &f in &self.theta_f {
            for &p in &self.theta_p {
                for &n in &self.theta_n {
                    out.push(ThresholdConfig {
                        theta_f: f,
                        theta_p: p,
                        theta_n: n,
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for c in self.configs() {
            c.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub class: Label,
    /// One point per config, in grid order.
    pub points: Vec<PRPoint>,
    /// Indices into `points`.
    pub precision_optimal: Option<usize>,
    pub f1_optimal: Option<usize>,
    pub frontier: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Evaluates a detector against gold labels given pre-extracted patterns.
pub fn evaluate(
    detector: &WeakDetector,
    config: ThresholdConfig,
    posts: &[Vec<LexicoSyntacticPattern>],
    gold: &[Label],
) -> PRPoint {
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (post, &label) in posts.iter().zip(gold) {
        let hit = detector.classify(post) == Decision::Hit;
        match (hit, label == detector.class) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    PRPoint::from_counts(config, tp, fp, fn_)
}

/// Learns patterns on `train` and evaluates every grid config on `dev`.
pub fn grid_search(
    train: &Corpus,
    dev: &Corpus,
    class: Label,
    grid: &Grid,
    extractor: &PatternExtractor,
) -> Result<GridResult> {
    grid.validate()?;
    dev.require_labeled()?;
    let stats = count_patterns(train, extractor)?;
    let posts: Vec<Vec<LexicoSyntacticPattern>> = dev.pairs().par_iter().map(|p| extractor.extract(p.text())).collect();
    let gold: Vec<Label> = dev.iter().map(|p| p.label.expect("labeled")).collect();
    Ok(grid_search_with(&stats, &posts, &gold, class, grid))
}

/// Grid search over already counted statistics and extracted dev posts.
pub fn grid_search_with(
    stats: &PatternStats,
    posts: &[Vec<LexicoSyntacticPattern>],
    gold: &[Label],
    class: Label,
    grid: &Grid,
) -> GridResult {
    let points: Vec<PRPoint> = grid
        .configs()
        .into_par_iter()
        .map(|config| {
            let set = threshold_patterns(stats, class, config.theta_f, config.theta_p);
            let detector = WeakDetector::from_set(&set, config.theta_n);
            evaluate(&detector, config, posts, gold)
        })
        .collect();

    let mut warnings = Vec::new();
    if !gold.contains(&class) {
        warnings.push(format!("dev set has no {class} posts; recall is undefined at every config"));
    }
    let invalid = points.iter().filter(|p| p.precision.is_none()).count();
    if invalid > 0 {
        warnings.push(format!("{invalid} configs hit no posts; precision undefined, excluded from frontier"));
    }
    GridResult {
        class,
        precision_optimal: precision_optimal(&points),
        f1_optimal: f1_optimal(&points),
        frontier: frontier(&points),
        points,
        warnings,
    }
}

/// Highest precision; ties go to higher recall, then smaller θ_n, then the
/// earlier config.
pub fn precision_optimal(points: &[PRPoint]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate().filter(|(_, p)| p.is_valid()) {
        let better = match best {
            None => true,
            Some(b) => {
                let q = &points[b];
                let key = |x: &PRPoint| (x.precision.unwrap(), x.recall.unwrap());
                let (pp, pr) = key(p);
                let (qp, qr) = key(q);
                pp > qp || (pp == qp && (pr > qr || (pr == qr && p.config.theta_n < q.config.theta_n)))
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Highest F1; ties go to higher precision, then the earlier config.
pub fn f1_optimal(points: &[PRPoint]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate().filter(|(_, p)| p.is_valid()) {
        let better = match best {
            None => true,
            Some(b) => {
                let q = &points[b];
                let (pf, qf) = (p.f1.unwrap(), q.f1.unwrap());
                pf > qf || (pf == qf && p.precision.unwrap() > q.precision.unwrap())
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Valid points not dominated by another valid point, by increasing
/// precision then grid order.
pub fn frontier(points: &[PRPoint]) -> Vec<usize> {
    let valid: Vec<(usize, f64, f64)> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_valid())
        .map(|(i, p)| (i, p.precision.unwrap(), p.recall.unwrap()))
        .collect();
    let mut out: Vec<usize> = valid
        .iter()
        .filter(|&&(_, p, r)| !valid.iter().any(|&(_, q, s)| q >= p && s >= r && (q > p || s > r)))
        .map(|&(i, _, _)| i)
        .collect();
    out.sort_by(|&a, &b| {
        points[a].precision.unwrap().total_cmp(&points[b].precision.unwrap()).then(a.cmp(&b))
    });
    out
}

/// CSV with header `theta_f,theta_p,theta_n,precision,recall,f1,tp,fp,fn`.
/// Undefined values are left empty.
pub fn write_points_csv<'a>(points: impl IntoIterator<Item = &'a PRPoint>, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "theta_f,theta_p,theta_n,precision,recall,f1,tp,fp,fn")?;
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
    for p in points {
        writeln!(
            out,
            "{},{:.2},{},{},{},{},{},{},{}",
            p.config.theta_f,
            p.config.theta_p,
            p.config.theta_n,
            fmt(p.precision),
            fmt(p.recall),
            fmt(p.f1),
            p.tp,
            p.fp,
            p.fn_
        )?;
    }
    Ok(())
}

/// Not-sarcastic detector with θ_n = 1: one match means remove.
pub fn build_ns_filter(stats: &PatternStats, theta_f: u64, theta_p: f64) -> WeakDetector {
    let set = threshold_patterns(stats, Label::NotSarcastic, theta_f, theta_p);
    WeakDetector::from_set(&set, 1)
}

/// Splits `corpus` into posts the detector does not hit and posts it hits,
/// preserving order in both.
pub fn apply_filter(corpus: &Corpus, detector: &WeakDetector, extractor: &PatternExtractor) -> (Corpus, Corpus) {
    let hits: Vec<bool> = corpus
        .pairs()
        .par_iter()
        .map(|p| detector.classify_text(p.text(), extractor) == Decision::Hit)
        .collect();
    let kept: Vec<usize> = (0..corpus.len()).filter(|&i| !hits[i]).collect();
    let removed: Vec<usize> = (0..corpus.len()).filter(|&i| hits[i]).collect();
    (corpus.select(&kept), corpus.select(&removed))
}
