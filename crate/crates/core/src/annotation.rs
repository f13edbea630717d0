//! Crowd annotation: qualifier scoring, vote aggregation, agreement with
//! the majority, sarcasm ratios and balanced subcorpus assembly.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Label, QuoteResponsePair};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub annotator: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub post_id: String,
    pub judgments: Vec<Judgment>,
}

impl AnnotationRecord {
    /// Rejects a second judgment from the same annotator.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for j in &self.judgments {
            if !seen.insert(j.annotator.as_str()) {
                return Err(Error::DuplicateJudgment {
                    post_id: self.post_id.clone(),
                    annotator: j.annotator.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn sarcastic_votes(&self) -> usize {
        self.judgments.iter().filter(|j| j.label == Label::Sarcastic).count()
    }

    /// Strict majority label, `None` on an even split or no judgments.
    pub fn majority(&self) -> Option<Label> {
        let sarc = self.sarcastic_votes();
        let not = self.judgments.len() - sarc;
        match sarc.cmp(&not) {
            std::cmp::Ordering::Greater => Some(Label::Sarcastic),
            std::cmp::Ordering::Less => Some(Label::NotSarcastic),
            std::cmp::Ordering::Equal => None,
        }
    }
}

/// Reads a JSON-lines annotation file. Post ids must be unique.
pub fn read_annotations(reader: impl BufRead) -> Result<Vec<AnnotationRecord>> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (n, line) in reader.lines().enumerate() {
        let err = |message: String| Error::Parse { line: n + 1, message };
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: AnnotationRecord = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        r.validate()?;
        if !ids.insert(r.post_id.clone()) {
            return Err(Error::DuplicateId(r.post_id));
        }
        out.push(r);
    }
    Ok(out)
}

/// Sarcastic when at least `required_sarc` of `out_of` votes say so.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregationRule {
    pub required_sarc: usize,
    pub out_of: usize,
    #[serde(default)]
    pub set_aside_at: Option<usize>,
}

impl AggregationRule {
    /// First crowd round: 6 of 9, posts at exactly 5 set aside.
    pub const NINE_WAY: AggregationRule = AggregationRule {
        required_sarc: 6,
        out_of: 9,
        set_aside_at: Some(5),
    };
    /// Expanded round with three trusted annotators.
    pub const THREE_WAY: AggregationRule = AggregationRule {
        required_sarc: 2,
        out_of: 3,
        set_aside_at: None,
    };
    /// Cue batches with five annotators.
    pub const FIVE_WAY: AggregationRule = AggregationRule {
        required_sarc: 3,
        out_of: 5,
        set_aside_at: None,
    };
    /// The nine-way round with 5 of 9 counted as sarcastic.
    pub const NINE_WAY_RELAXED: AggregationRule = AggregationRule {
        required_sarc: 5,
        out_of: 9,
        set_aside_at: None,
    };

    pub fn new(required_sarc: usize, out_of: usize, set_aside_at: Option<usize>) -> Result<Self> {
        let r = AggregationRule {
            required_sarc,
            out_of,
            set_aside_at,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.required_sarc == 0 || self.required_sarc > self.out_of {
            return Err(Error::InvalidArgument(format!(
                "rule needs 0 < k <= n, got k={} n={}",
                self.required_sarc, self.out_of
            )));
        }
        if let Some(s) = self.set_aside_at {
            if s >= self.required_sarc {
                return Err(Error::InvalidArgument(format!(
                    "set-aside count {s} must be below k={}",
                    self.required_sarc
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for AggregationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.required_sarc, self.out_of)?;
        if let Some(s) = self.set_aside_at {
            write!(f, " (set aside at {s})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Aggregate {
    Sarcastic,
    NotSarcastic,
    SetAside,
}

impl Aggregate {
    pub fn label(self) -> Option<Label> {
        match self {
            Aggregate::Sarcastic => Some(Label::Sarcastic),
            Aggregate::NotSarcastic => Some(Label::NotSarcastic),
            Aggregate::SetAside => None,
        }
    }
}

pub fn aggregate(record: &AnnotationRecord, rule: AggregationRule) -> Result<Aggregate> {
    rule.validate()?;
    record.validate()?;
    if record.judgments.len() != rule.out_of {
        return Err(Error::JudgmentCount {
            post_id: record.post_id.clone(),
            found: record.judgments.len(),
            expected: rule.out_of,
        });
    }
    let sarc = record.sarcastic_votes();
    Ok(if sarc >= rule.required_sarc {
        Aggregate::Sarcastic
    } else if rule.set_aside_at == Some(sarc) {
        Aggregate::SetAside
    } else {
        Aggregate::NotSarcastic
    })
}

/// Aggregated label per post; set-aside posts are omitted.
pub fn verdicts(records: &[AnnotationRecord], rule: AggregationRule) -> Result<BTreeMap<String, Label>> {
    let mut out = BTreeMap::new();
    for r in records {
        if let Some(l) = aggregate(r, rule)?.label() {
            out.insert(r.post_id.clone(), l);
        }
    }
    Ok(out)
}

/// Qualifier size and pass mark.
pub const QUALIFIER_ITEMS: usize = 20;
pub const QUALIFIER_PASS_PERCENT: usize = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualifierResult {
    pub correct: usize,
    pub total: usize,
    pub pass: bool,
}

impl QualifierResult {
    pub fn score(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }
}

/// Scores one worker against the 20 gold items (10 per class). Missing
/// answers count as wrong; passing needs strictly more than 70%.
pub fn score_qualifier(gold: &BTreeMap<String, Label>, answers: &BTreeMap<String, Label>) -> Result<QualifierResult> {
    if gold.len() != QUALIFIER_ITEMS {
        return Err(Error::InvalidArgument(format!(
            "qualifier needs {QUALIFIER_ITEMS} gold items, got {}",
            gold.len()
        )));
    }
    let sarc = gold.values().filter(|&&l| l == Label::Sarcastic).count();
    if sarc * 2 != QUALIFIER_ITEMS {
        return Err(Error::InvalidArgument(format!(
            "qualifier gold must be balanced, got {sarc} sarcastic of {QUALIFIER_ITEMS}"
        )));
    }
    let correct = gold.iter().filter(|(id, l)| answers.get(*id) == Some(l)).count();
    Ok(QualifierResult {
        correct,
        total: QUALIFIER_ITEMS,
        pass: correct * 100 > QUALIFIER_PASS_PERCENT * QUALIFIER_ITEMS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorAgreement {
    pub agreed: usize,
    pub total: usize,
    pub pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementStats {
    pub per_annotator: BTreeMap<String, AnnotatorAgreement>,
    /// Unweighted mean of the per-annotator percentages.
    pub mean_pct: Option<f64>,
    /// Posts with an even split, left out of every denominator.
    pub tied_posts: usize,
}

/// Percentage of each annotator's judgments that match the post's strict
/// majority. Tied posts are excluded.
pub fn agreement_stats(records: &[AnnotationRecord]) -> AgreementStats {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut tied_posts = 0;
    for r in records {
        let Some(majority) = r.majority() else {
            tied_posts += 1;
            continue;
        };
        for j in &r.judgments {
            let e = counts.entry(j.annotator.clone()).or_default();
            e.1 += 1;
            if j.label == majority {
                e.0 += 1;
            }
        }
    }
    let per_annotator: BTreeMap<String, AnnotatorAgreement> = counts
        .into_iter()
        .map(|(a, (agreed, total))| {
            let pct = 100.0 * agreed as f64 / total as f64;
            (a, AnnotatorAgreement { agreed, total, pct })
        })
        .collect();
    let mean_pct = (!per_annotator.is_empty())
        .then(|| per_annotator.values().map(|a| a.pct).sum::<f64>() / per_annotator.len() as f64);
    AgreementStats {
        per_annotator,
        mean_pct,
        tied_posts,
    }
}

/// Aggregate counts with the exact sarcastic fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioReport {
    pub sarcastic: usize,
    pub not_sarcastic: usize,
    pub set_aside: usize,
    pub total: usize,
}

impl RatioReport {
    /// sarcastic / total; undefined for no posts.
    pub fn ratio(&self) -> Option<f64> {
        (self.total > 0).then(|| self.sarcastic as f64 / self.total as f64)
    }

    /// The ratio rounded half-up to `places` decimals using integer
    /// arithmetic on the counts.
    pub fn ratio_rounded(&self, places: u32) -> Option<String> {
        if self.total == 0 {
            return None;
        }
        let scale = 10u128.pow(places);
        let (num, den) = (self.sarcastic as u128, self.total as u128);
        let q = (2 * num * scale + den) / (2 * den);
        let int = q / scale;
        let frac = q % scale;
        Some(if places == 0 {
            int.to_string()
        } else {
            format!("{int}.{frac:0width$}", width = places as usize)
        })
    }
}

/// Fraction of all annotated posts (set-aside included in the total) that
/// aggregate to sarcastic.
pub fn sarcasm_ratio(records: &[AnnotationRecord], rule: AggregationRule) -> Result<RatioReport> {
    let mut r = RatioReport {
        sarcastic: 0,
        not_sarcastic: 0,
        set_aside: 0,
        total: records.len(),
    };
    for rec in records {
        match aggregate(rec, rule)? {
            Aggregate::Sarcastic => r.sarcastic += 1,
            Aggregate::NotSarcastic => r.not_sarcastic += 1,
            Aggregate::SetAside => r.set_aside += 1,
        }
    }
    Ok(r)
}

/// Draw `quota` posts from `pool` and label them `label`.
#[derive(Debug, Clone)]
pub struct SourceQuota {
    pub name: String,
    pub label: Label,
    pub quota: usize,
    pub pool: Corpus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCount {
    pub name: String,
    pub label: Label,
    pub quota: usize,
    pub available: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyManifest {
    pub seed: u64,
    pub per_class: BTreeMap<Label, usize>,
    pub sources: Vec<SourceCount>,
    /// Post id to source name.
    pub provenance: BTreeMap<String, String>,
}

/// Samples each source's quota without replacement (keeping pool order) and
/// concatenates sources in the given order. Pools must be disjoint and the
/// quotas must give equal class totals.
pub fn assemble_subcorpus(sources: &[SourceQuota], seed: u64) -> Result<(Corpus, AssemblyManifest)> {
    let mut per_class: BTreeMap<Label, usize> = Label::ALL.iter().map(|&l| (l, 0)).collect();
    for s in sources {
        if s.quota > s.pool.len() {
            return Err(Error::QuotaExceeded {
                source_name: s.name.clone(),
                quota: s.quota,
                available: s.pool.len(),
            });
        }
        *per_class.get_mut(&s.label).expect("both labels present") += s.quota;
    }
    if per_class[&Label::Sarcastic] != per_class[&Label::NotSarcastic] {
        return Err(Error::InvalidArgument(format!(
            "quotas are unbalanced: {} sarcastic vs {} not sarcastic",
            per_class[&Label::Sarcastic],
            per_class[&Label::NotSarcastic]
        )));
    }
    let mut owner: HashMap<&str, &str> = HashMap::new();
    for s in sources {
        for p in s.pool.iter() {
            if let Some(prev) = owner.insert(p.id(), &s.name) {
                return Err(Error::InvalidArgument(format!(
                    "post `{}` is in both `{prev}` and `{}`",
                    p.id(),
                    s.name
                )));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<QuoteResponsePair> = Vec::new();
    let mut provenance = BTreeMap::new();
    for s in sources {
        let mut picked = sample(&mut rng, s.pool.len(), s.quota).into_vec();
        picked.sort_unstable();
        for i in picked {
            let p = s.pool.pairs()[i].clone().with_label(Some(s.label));
            provenance.insert(p.id().to_string(), s.name.clone());
            pairs.push(p);
        }
    }
    let manifest = AssemblyManifest {
        seed,
        per_class,
        sources: sources
            .iter()
            .map(|s| SourceCount {
                name: s.name.clone(),
                label: s.label,
                quota: s.quota,
                available: s.pool.len(),
            })
            .collect(),
        provenance,
    };
    Ok((Corpus::new(pairs)?, manifest))
}
