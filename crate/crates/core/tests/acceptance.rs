//! End-to-end acceptance checks. Each prints one PASS/FAIL line; the binary
//! exits non-zero if any fails. Oracles here are written against plain data
//! and do not call the code paths they check.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sarckit::annotation::{read_annotations, sarcasm_ratio, AggregationRule, Aggregate, AnnotationRecord, Judgment};
use sarckit::corpus::{split_folds, word_count_filter, Corpus, Label};
use sarckit::learn::{cross_validate, hinge_subgradient, train, Dataset, FeatureConfig, FeatureVector, Hyperparams};
use sarckit::patterns::{
    count_patterns, emit_pattern_report, instantiate_templates, threshold_patterns, LexicoSyntacticPattern,
    PatternExtractor, PatternStats, ReportSort, TemplateConfig, TemplateId,
};
use sarckit::syntax::{Analyzer, Lexicon};
use sarckit::weak::{apply_filter, build_ns_filter, frontier, grid_search, Grid, WeakDetector};

type Check = Result<String, String>;
type CheckFn = fn() -> Check;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn analyzer() -> Analyzer {
    Analyzer::new(Lexicon::builtin())
}

fn extractor() -> PatternExtractor {
    PatternExtractor::new(analyzer(), TemplateConfig::default())
}

const PRON: &[&str] = &["i", "you", "we", "they", "he"];
const DET: &[&str] = &["the", "a", "your", "my", "this"];
const ADJ: &[&str] = &["brilliant", "smart", "wrong", "great", "stupid", "long", "nice"];
const NOUN: &[&str] = &["idea", "point", "argument", "evidence", "post", "gun", "debate", "law"];
const ADV: &[&str] = &["so", "really", "never", "just", "oh", "wow", "ah", "yes", "then", "again", "totally"];
const VERB: &[&str] = &[
    "thanks", "read", "think", "love", "heard", "missed", "is", "are", "was", "been", "going", "makes", "forgot",
    "proves",
];
const PREP: &[&str] = &["for", "of", "about", "with", "to", "in"];
const PUNCT: &[&str] = &[".", ",", "?", "!"];
const SARC_CUE: &[&str] = &["thanks for the help .", "oh wow so smart .", "ah yes great idea ."];
const NOT_CUE: &[&str] = &["i think the evidence is clear .", "we read the law .", "they heard about the debate ."];

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words.choose(rng).copied().expect("nonempty")
}

/// One clause: optional subject, optional adverb, verb, then an object,
/// a prepositional phrase or an adjective.
fn clause(rng: &mut ChaCha8Rng, out: &mut Vec<String>) {
    if rng.gen_bool(0.6) {
        if rng.gen_bool(0.5) {
            out.push(pick(rng, PRON).into());
        } else {
            out.push(pick(rng, DET).into());
            out.push(pick(rng, NOUN).into());
        }
    }
    if rng.gen_bool(0.3) {
        out.push(pick(rng, ADV).into());
    }
    out.push(pick(rng, VERB).into());
    match rng.gen_range(0..4) {
        0 => {
            out.push(pick(rng, DET).into());
            if rng.gen_bool(0.4) {
                out.push(pick(rng, ADJ).into());
            }
            out.push(pick(rng, NOUN).into());
        }
        1 => {
            out.push(pick(rng, PREP).into());
            out.push(pick(rng, DET).into());
            out.push(pick(rng, NOUN).into());
        }
        2 => {
            if rng.gen_bool(0.5) {
                out.push(pick(rng, ADV).into());
            }
            out.push(pick(rng, ADJ).into());
        }
        _ => {}
    }
    out.push(pick(rng, PUNCT).into());
}

fn soup(rng: &mut ChaCha8Rng, out: &mut Vec<String>) {
    let all = [PRON, DET, ADJ, NOUN, ADV, VERB, PREP, PUNCT];
    for _ in 0..rng.gen_range(1..8) {
        let class = all[rng.gen_range(0..all.len())];
        out.push(pick(rng, class).into());
    }
}

/// At most 30 tokens. With `bias`, a class-typical clause leads the post.
fn random_post(rng: &mut ChaCha8Rng, label: Label, bias: bool) -> String {
    let mut toks: Vec<String> = Vec::new();
    if bias && rng.gen_bool(0.6) {
        let cue = match label {
            Label::Sarcastic => pick(rng, SARC_CUE),
            Label::NotSarcastic => pick(rng, NOT_CUE),
        };
        toks.extend(cue.split(' ').map(String::from));
    }
    clause(rng, &mut toks);
    while toks.len() < 30 && rng.gen_bool(0.75) {
        if rng.gen_bool(0.7) {
            clause(rng, &mut toks);
        } else {
            soup(rng, &mut toks);
        }
    }
    toks.truncate(30);
    toks.join(" ")
}

fn random_corpus(rng: &mut ChaCha8Rng, n: usize, bias: bool, prefix: &str) -> Corpus {
    let items: Vec<(String, String, Option<Label>)> = (0..n)
        .map(|i| {
            let label = if rng.gen_bool(0.5) { Label::Sarcastic } else { Label::NotSarcastic };
            (format!("{prefix}{i}"), random_post(rng, label, bias), Some(label))
        })
        .collect();
    Corpus::from_texts(items).expect("unique ids")
}

/// Match sites per post, sentence by sentence.
fn sites_of(an: &Analyzer, text: &str) -> Vec<LexicoSyntacticPattern> {
    let mut out = Vec::new();
    for s in an.analyze(text) {
        out.extend(instantiate_templates(&s, TemplateConfig::default()));
    }
    out
}

fn count_hits(patterns: &BTreeSet<LexicoSyntacticPattern>, post: &[LexicoSyntacticPattern]) -> usize {
    post.iter().filter(|p| patterns.contains(p)).count()
}

/// Patterns with freq ≥ θ_f and class share ≥ θ_p, from raw counts.
fn select(counts: &BTreeMap<LexicoSyntacticPattern, [u64; 2]>, class: Label, f: u64, p: f64) -> BTreeSet<LexicoSyntacticPattern> {
    counts
        .iter()
        .filter(|(_, c)| {
            let total = c[0] + c[1];
            let mine = if class == Label::Sarcastic { c[0] } else { c[1] };
            total >= f && total > 0 && mine as f64 / total as f64 >= p
        })
        .map(|(k, _)| k.clone())
        .collect()
}

fn raw_counts(stats: &PatternStats) -> BTreeMap<LexicoSyntacticPattern, [u64; 2]> {
    stats
        .iter()
        .map(|(p, c)| (p.clone(), [c.class_freq(Label::Sarcastic), c.class_freq(Label::NotSarcastic)]))
        .collect()
}

fn pattern_oracle() -> Check {
    let started = Instant::now();
    let an = analyzer();
    let ex = extractor();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut distinct = 0;
    for round in 0..50 {
        let n = rng.gen_range(1..=200);
        let corpus = random_corpus(&mut rng, n, round % 2 == 0, "p");
        let got = count_patterns(&corpus, &ex).map_err(|e| e.to_string())?;

        let posts: Vec<(String, Label, Vec<LexicoSyntacticPattern>)> = corpus
            .iter()
            .map(|p| (p.id().to_string(), p.label.unwrap(), sites_of(&an, p.text())))
            .collect();
        let universe: BTreeSet<&LexicoSyntacticPattern> = posts.iter().flat_map(|(_, _, s)| s).collect();
        ensure!(universe.len() == got.len(), "round {round}: {} patterns, oracle {}", got.len(), universe.len());
        for pat in universe {
            let mut freq = [0u64; 2];
            let mut sample: [Option<&str>; 2] = [None, None];
            for (id, label, sites) in &posts {
                let k = sites.iter().filter(|s| *s == pat).count() as u64;
                let i = if *label == Label::Sarcastic { 0 } else { 1 };
                freq[i] += k;
                if k > 0 && sample[i].is_none() {
                    sample[i] = Some(id);
                }
            }
            let c = got.get(pat).ok_or_else(|| format!("round {round}: {pat} missing"))?;
            ensure!(
                c.class_freq(Label::Sarcastic) == freq[0] && c.class_freq(Label::NotSarcastic) == freq[1],
                "round {round}: {pat} counted {:?}, oracle {freq:?}",
                c.class_freq
            );
            ensure!(c.freq() == freq[0] + freq[1], "round {round}: {pat} total");
            let p = freq[0] as f64 / (freq[0] + freq[1]) as f64;
            ensure!((c.prob(Label::Sarcastic) - p).abs() <= 1e-12, "round {round}: {pat} prob");
            ensure!((c.prob(Label::NotSarcastic) - (1.0 - p)).abs() <= 1e-12, "round {round}: {pat} prob");
            ensure!(
                c.sample(Label::Sarcastic) == sample[0] && c.sample(Label::NotSarcastic) == sample[1],
                "round {round}: {pat} samples"
            );
        }
        distinct += got.len();
    }
    let took = started.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:.2?}");
    Ok(format!("50 corpora, {distinct} pattern rows, {took:.2?}"))
}

fn planted_recovery() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut items = Vec::new();
    for i in 0..100 {
        // paired posts share their filler, so filler patterns split evenly
        let mut filler = Vec::new();
        clause(&mut rng, &mut filler);
        clause(&mut rng, &mut filler);
        let filler = filler.join(" ");
        let anchor = "thanks for the idea .".to_string();
        let plain = "i read your post .".to_string();
        let sarc = if i % 10 != 9 { &anchor } else { &plain };
        let not = if i % 10 == 0 { &anchor } else { &plain };
        items.push((format!("s{i}"), format!("{sarc} {filler}"), Some(Label::Sarcastic)));
        items.push((format!("n{i}"), format!("{not} {filler}"), Some(Label::NotSarcastic)));
    }
    let corpus = Corpus::from_texts(items).map_err(|e| e.to_string())?;
    let stats = count_patterns(&corpus, &extractor()).map_err(|e| e.to_string())?;
    let target = LexicoSyntacticPattern::new(TemplateId::ActVpPrepNp, "thanks for");
    let c = stats.get(&target).ok_or("planted pattern not counted")?;
    ensure!(
        c.class_freq(Label::Sarcastic) == 90 && c.class_freq(Label::NotSarcastic) == 10,
        "planted counts {:?}",
        c.class_freq
    );
    let set = threshold_patterns(&stats, Label::Sarcastic, 2, 0.75);
    ensure!(set.patterns().contains(&target), "planted pattern not selected");
    let report = emit_pattern_report(&stats, Label::Sarcastic, ReportSort::Probability, None);
    let top = report.first().ok_or("empty report")?;
    ensure!(
        top.template == target.template && top.anchor == target.anchor,
        "report top is {} {}",
        top.template,
        top.anchor
    );
    Ok(format!("{} P(sarc)={:.2} freq {}; {} selected at (2, 0.75)", target, top.prob, top.freq, set.len()))
}

fn monotonicity() -> Check {
    let an = analyzer();
    let ex = extractor();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let train_c = random_corpus(&mut rng, 400, true, "t");
    let dev = random_corpus(&mut rng, 200, true, "d");
    let stats = count_patterns(&train_c, &ex).map_err(|e| e.to_string())?;
    let counts = raw_counts(&stats);
    let dev_sites: Vec<Vec<LexicoSyntacticPattern>> = dev.iter().map(|p| sites_of(&an, p.text())).collect();
    let gold: Vec<Label> = dev.iter().map(|p| p.label.unwrap()).collect();

    for i in 0..100 {
        let class = if i % 2 == 0 { Label::Sarcastic } else { Label::NotSarcastic };
        let (f1, f2) = (rng.gen_range(1..8u64), rng.gen_range(1..8u64));
        let (p1, p2) = (rng.gen_range(0.01..1.0f64), rng.gen_range(0.01..1.0f64));
        let lo = threshold_patterns(&stats, class, f1.min(f2), p1.min(p2)).patterns();
        let hi = threshold_patterns(&stats, class, f1.max(f2), p1.max(p2)).patterns();
        ensure!(hi.is_subset(&lo), "pair {i}: stricter thresholds selected more");
        ensure!(lo == select(&counts, class, f1.min(f2), p1.min(p2)), "pair {i}: selection differs from recount");

        let set = threshold_patterns(&stats, class, f1.min(f2), p1.min(p2));
        let hits = |n: usize| -> BTreeSet<usize> {
            let d = WeakDetector::from_set(&set, n);
            (0..dev_sites.len())
                .filter(|&j| d.classify(&dev_sites[j]) == sarckit::weak::Decision::Hit)
                .collect()
        };
        let (h1, h2, h3) = (hits(1), hits(2), hits(3));
        ensure!(h3.is_subset(&h2) && h2.is_subset(&h1), "pair {i}: HIT sets not nested over theta_n");
    }

    let mut expected = Vec::new();
    for f in 2..=6u64 {
        for k in (60..=85).step_by(5) {
            for n in 1..=3usize {
                expected.push((f, k as f64 / 100.0, n));
            }
        }
    }
    let grid = Grid::default();
    let configs: Vec<(u64, f64, usize)> = grid.configs().iter().map(|c| (c.theta_f, c.theta_p, c.theta_n)).collect();
    ensure!(configs == expected, "default grid differs from the 90 expected configs");

    let mut frontier_sizes = Vec::new();
    for class in [Label::Sarcastic, Label::NotSarcastic] {
        let result = grid_search(&train_c, &dev, class, &grid, &ex).map_err(|e| e.to_string())?;
        let mut brute: Vec<Option<(f64, f64)>> = Vec::new();
        for (idx, &(f, p, n)) in expected.iter().enumerate() {
            let set = select(&counts, class, f, p);
            let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
            for (sites, &g) in dev_sites.iter().zip(&gold) {
                let hit = count_hits(&set, sites) >= n;
                match (hit, g == class) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    _ => {}
                }
            }
            let pt = &result.points[idx];
            ensure!((pt.tp, pt.fp, pt.fn_) == (tp, fp, fn_), "{class} config {idx}: counts differ from recount");
            brute.push((tp + fp > 0 && tp + fn_ > 0).then(|| (tp as f64 / (tp + fp) as f64, tp as f64 / (tp + fn_) as f64)));
        }
        let oracle: BTreeSet<usize> = (0..brute.len())
            .filter(|&i| {
                let Some((p, r)) = brute[i] else { return false };
                !brute.iter().flatten().any(|&(q, s)| q >= p && s >= r && (q > p || s > r))
            })
            .collect();
        let got: BTreeSet<usize> = result.frontier.iter().copied().collect();
        ensure!(got == oracle, "{class}: frontier {got:?}, brute force {oracle:?}");
        ensure!(frontier(&result.points) == result.frontier, "{class}: frontier not reproducible");
        frontier_sizes.push(got.len());
    }
    Ok(format!(
        "100 threshold pairs nested; theta_n 1..3 nested; frontier sizes {frontier_sizes:?} match brute force over {} configs",
        expected.len()
    ))
}

fn filter_partition() -> Check {
    let an = analyzer();
    let ex = extractor();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut removed_total = 0;
    let mut posts_total = 0;
    for round in 0..20 {
        let train_c = random_corpus(&mut rng, 150, true, "t");
        let size = rng.gen_range(0..150);
        let pool = random_corpus(&mut rng, size, round % 2 == 0, "x");
        let stats = count_patterns(&train_c, &ex).map_err(|e| e.to_string())?;
        let det = build_ns_filter(&stats, 2, 0.6);
        let (kept, removed) = apply_filter(&pool, &det, &ex);
        ensure!(kept.len() + removed.len() == pool.len(), "round {round}: sizes do not add up");
        let kept_ids: BTreeSet<&str> = kept.iter().map(|p| p.id()).collect();
        let removed_ids: BTreeSet<&str> = removed.iter().map(|p| p.id()).collect();
        ensure!(kept_ids.is_disjoint(&removed_ids), "round {round}: overlap");
        let all: BTreeSet<&str> = pool.iter().map(|p| p.id()).collect();
        ensure!(kept_ids.union(&removed_ids).copied().collect::<BTreeSet<_>>() == all, "round {round}: posts lost");
        let set: BTreeSet<LexicoSyntacticPattern> = det.patterns.iter().cloned().collect();
        for p in kept.iter() {
            ensure!(count_hits(&set, &sites_of(&an, p.text())) == 0, "round {round}: kept {} matches", p.id());
        }
        for p in removed.iter() {
            ensure!(count_hits(&set, &sites_of(&an, p.text())) >= 1, "round {round}: removed {} has no match", p.id());
        }
        removed_total += removed.len();
        posts_total += pool.len();
    }

    let words = ["alpha", "beta", "gamma", "it's", "42", "delta"];
    for round in 0..50 {
        let mut lengths = BTreeMap::new();
        let items: Vec<(String, String, Option<Label>)> = (0..rng.gen_range(0..80))
            .map(|i| {
                let n = rng.gen_range(0..=200);
                let mut toks: Vec<&str> = (0..n).map(|_| pick(&mut rng, &words)).collect();
                // punctuation runs are not words
                for _ in 0..rng.gen_range(1..4) {
                    toks.insert(rng.gen_range(0..=toks.len()), "--");
                }
                let id = format!("w{i}");
                lengths.insert(id.clone(), n);
                (id, toks.join(" "), Some(Label::NotSarcastic))
            })
            .collect();
        let c = Corpus::from_texts(items).map_err(|e| e.to_string())?;
        let once = word_count_filter(&c, 10, 150).map_err(|e| e.to_string())?;
        let twice = word_count_filter(&once, 10, 150).map_err(|e| e.to_string())?;
        ensure!(once == twice, "round {round}: filter not idempotent");
        let expect: Vec<&str> = c.iter().map(|p| p.id()).filter(|id| (10..=150).contains(&lengths[*id])).collect();
        let got: Vec<&str> = once.iter().map(|p| p.id()).collect();
        ensure!(got == expect, "round {round}: kept {got:?}");
    }
    Ok(format!(
        "20 pools ({posts_total} posts, {removed_total} removed) partition and rescan clean; length filter idempotent at 10..=150"
    ))
}

fn votes(id: String, sarc: usize) -> AnnotationRecord {
    AnnotationRecord {
        post_id: id,
        judgments: (0..9)
            .map(|a| Judgment {
                annotator: format!("w{a}"),
                label: if a < sarc { Label::Sarcastic } else { Label::NotSarcastic },
            })
            .collect(),
    }
}

fn aggregation_table() -> Check {
    // 2,220 posts at 6..=9 votes, 1,202 at exactly 5, the rest below 5.
    let (strict, five, total) = (2220usize, 1202usize, 11040usize);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut recs: Vec<AnnotationRecord> = (0..total)
        .map(|i| {
            let sarc = if i < strict {
                rng.gen_range(6..=9)
            } else if i < strict + five {
                5
            } else {
                rng.gen_range(0..=4)
            };
            votes(format!("post{i:05}"), sarc)
        })
        .collect();
    recs.shuffle(&mut rng);

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("annotations.jsonl");
    let body: String = recs.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
    std::fs::write(&path, body).map_err(|e| e.to_string())?;
    let read = read_annotations(std::io::BufReader::new(std::fs::File::open(&path).map_err(|e| e.to_string())?))
        .map_err(|e| e.to_string())?;

    let strict_r = sarcasm_ratio(&read, AggregationRule::NINE_WAY).map_err(|e| e.to_string())?;
    ensure!(
        (strict_r.sarcastic, strict_r.set_aside, strict_r.total) == (strict, five, total),
        "strict rule counts {strict_r:?}"
    );
    ensure!(strict_r.ratio_rounded(3).as_deref() == Some("0.201"), "strict ratio {:?}", strict_r.ratio_rounded(3));
    let at_five = sarckit::annotation::aggregate(&votes("x".into(), 5), AggregationRule::NINE_WAY).map_err(|e| e.to_string())?;
    ensure!(at_five == Aggregate::SetAside, "5 of 9 gives {at_five:?}");

    let relaxed = sarcasm_ratio(&read, AggregationRule::NINE_WAY_RELAXED).map_err(|e| e.to_string())?;
    ensure!(relaxed.sarcastic == strict + five, "relaxed count {}", relaxed.sarcastic);
    ensure!(relaxed.ratio_rounded(2).as_deref() == Some("0.31"), "relaxed ratio {:?}", relaxed.ratio_rounded(2));

    let out = Command::new(env!("CARGO_BIN_EXE_sarckit"))
        .current_dir(dir.path())
        .env_remove("SARCKIT_LEXICON_DIR")
        .args(["aggregate", "--annotations", "annotations.jsonl"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "aggregate failed: {}", String::from_utf8_lossy(&out.stderr));
    let ratio: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ratio.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    ensure!(
        ratio["sarcastic"] == 2220 && ratio["total"] == 11040 && ratio["set_aside"] == 1202,
        "CLI ratio.json {ratio}"
    );
    ensure!(ratio["ratio_rounded"] == "0.201", "CLI ratio {}", ratio["ratio_rounded"]);
    let verdicts = std::fs::read_to_string(dir.path().join("verdicts.tsv")).map_err(|e| e.to_string())?;
    let set_aside_rows = verdicts.lines().filter(|l| l.ends_with("\t5\tset_aside")).count();
    ensure!(set_aside_rows == five, "{set_aside_rows} set-aside rows");

    Ok(format!(
        "{}/{} = {} strict, {} set aside at 5/9, relaxed {}/{} = {}",
        strict_r.sarcastic,
        strict_r.total,
        strict_r.ratio_rounded(3).unwrap(),
        strict_r.set_aside,
        relaxed.sarcastic,
        relaxed.total,
        relaxed.ratio_rounded(2).unwrap()
    ))
}

fn dense(v: &[f64]) -> FeatureVector {
    FeatureVector {
        sparse: Vec::new(),
        dense: Some(v.to_vec()),
    }
}

fn sign(l: Label) -> f64 {
    if l == Label::Sarcastic {
        1.0
    } else {
        -1.0
    }
}

/// mean(max(0, 1 - y(w·x + b))) + λ‖w‖² over plain rows.
fn objective(rows: &[Vec<f64>], ys: &[f64], w: &[f64], b: f64, lambda: f64) -> f64 {
    let loss: f64 = rows
        .iter()
        .zip(ys)
        .map(|(x, y)| (1.0 - y * (x.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b)).max(0.0))
        .sum();
    loss / rows.len() as f64 + lambda * w.iter().map(|v| v * v).sum::<f64>()
}

fn optimization() -> Check {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let dim = 6;
    let h = 1e-6;
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < 100 {
        let n = rng.gen_range(5..30);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let labels: Vec<Label> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { Label::Sarcastic } else { Label::NotSarcastic })
            .collect();
        let ys: Vec<f64> = labels.iter().map(|&l| sign(l)).collect();
        let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = rng.gen_range(-1.0..1.0);
        let lambda = rng.gen_range(0.0..0.5);
        // differentiable: no margin within reach of the probe
        let near_kink = rows.iter().zip(&ys).any(|(x, y)| {
            let m = y * (x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() + b);
            (1.0 - m).abs() < 1e-3
        });
        if near_kink {
            continue;
        }
        let xs: Vec<FeatureVector> = rows.iter().map(|r| dense(r)).collect();
        let data = Dataset { xs: &xs, labels: &labels, dim, sparse_dim: 0 };
        let (g, gb) = hinge_subgradient(&w, b, &data, lambda);
        let mut analytic = g.clone();
        analytic.push(gb);
        for (j, &a) in analytic.iter().enumerate() {
            let probe = |d: f64| {
                let mut w2 = w.clone();
                let mut b2 = b;
                if j < dim {
                    w2[j] += d;
                } else {
                    b2 += d;
                }
                objective(&rows, &ys, &w2, b2, lambda)
            };
            let fd = (probe(h) - probe(-h)) / (2.0 * h);
            let rel = (a - fd).abs() / fd.abs().max(1.0);
            worst = worst.max(rel);
            ensure!(rel <= 1e-4, "point {checked} coord {j}: analytic {a}, finite difference {fd}");
        }
        checked += 1;
    }

    let sep: Vec<(Vec<f64>, Label)> = (0..40)
        .map(|i| {
            let x = rng.gen_range(-3.0..3.0);
            let y = rng.gen_range(-3.0..3.0);
            let shift = if i % 2 == 0 { 1.0 } else { -1.0 };
            (vec![x, y + 4.0 * shift + x * 0.5], if shift > 0.0 { Label::Sarcastic } else { Label::NotSarcastic })
        })
        .collect();
    let xs: Vec<FeatureVector> = sep.iter().map(|(x, _)| dense(x)).collect();
    let labels: Vec<Label> = sep.iter().map(|&(_, l)| l).collect();
    let data = Dataset { xs: &xs, labels: &labels, dim: 2, sparse_dim: 0 };
    let hp = Hyperparams::default();
    ensure!(hp.epochs == 5, "default epochs {}", hp.epochs);
    let m = train(&data, &hp).map_err(|e| e.to_string())?;
    let correct = xs.iter().zip(&labels).filter(|(x, &l)| m.predict(x) == l).count();
    ensure!(correct == xs.len(), "separable set: {correct}/{} after 5 epochs", xs.len());

    let overlap: Vec<(Vec<f64>, Label)> = (0..60)
        .map(|i| {
            let l = if i % 2 == 0 { Label::Sarcastic } else { Label::NotSarcastic };
            let c = sign(l) * 0.5;
            (vec![c + rng.gen_range(-1.5..1.5), -c + rng.gen_range(-1.5..1.5)], l)
        })
        .collect();
    let xs: Vec<FeatureVector> = overlap.iter().map(|(x, _)| dense(x)).collect();
    let labels: Vec<Label> = overlap.iter().map(|&(_, l)| l).collect();
    let data = Dataset { xs: &xs, labels: &labels, dim: 2, sparse_dim: 0 };
    // the property belongs to the minimizer, so train close to it
    let lambdas = [0.0, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.5, 1.0];
    let norms: Vec<f64> = lambdas
        .iter()
        .map(|&l2_lambda| train(&data, &Hyperparams { l2_lambda, epochs: 300, ..hp }).map(|m| m.norm()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure!(norms.windows(2).all(|w| w[1] <= w[0]), "norms over lambda {lambdas:?}: {norms:?}");

    let took = started.elapsed();
    ensure!(took < Duration::from_secs(5), "took {took:.2?}");
    Ok(format!(
        "100 points, worst relative gap {worst:.1e}; separable set 40/40 in 5 epochs; norm {:.3} -> {:.3} as lambda 0 -> 1; {took:.2?}",
        norms[0],
        norms[norms.len() - 1]
    ))
}

fn cross_validation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut items = Vec::new();
    for i in 0..60 {
        for (label, marker) in [(Label::Sarcastic, "zzsarc"), (Label::NotSarcastic, "zznot")] {
            let mut toks: Vec<String> = Vec::new();
            clause(&mut rng, &mut toks);
            toks.insert(rng.gen_range(0..=toks.len()), marker.into());
            items.push((format!("{}{i}", label.as_str()), toks.join(" "), Some(label)));
        }
    }
    items.shuffle(&mut rng);
    let corpus = Corpus::from_texts(items).map_err(|e| e.to_string())?;
    let k = 10;
    let folds = split_folds(&corpus, k, 42).map_err(|e| e.to_string())?;
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for f in 0..k {
        let (train_idx, test_idx) = folds.split(f);
        ensure!(train_idx.len() + test_idx.len() == corpus.len(), "fold {f} loses posts");
        for i in test_idx {
            *seen.entry(i).or_default() += 1;
        }
    }
    ensure!(seen.len() == corpus.len() && seen.values().all(|&c| c == 1), "a post is tested zero or several times");

    let report = cross_validate(&corpus, k, &FeatureConfig::ngrams(), &Hyperparams::default(), 42, &analyzer())
        .map_err(|e| e.to_string())?;
    let tested: usize = report.folds.iter().map(|f| f.test_size).sum();
    ensure!(tested == corpus.len() && report.pooled.total() as usize == corpus.len(), "report tests {tested} posts");
    for class in [Label::Sarcastic, Label::NotSarcastic] {
        let m = report.metrics.get(class);
        ensure!(m.f1 == 1.0 && m.precision == 1.0 && m.recall == 1.0, "{class}: {m:?}");
    }
    Ok(format!("{} posts, {k} folds, each tested once; F = 1.0 for both classes", corpus.len()))
}

fn main() -> ExitCode {
    let checks: [(&str, CheckFn); 7] = [
        ("pattern statistics match brute-force recount", pattern_oracle),
        ("planted pattern recovered and tops report", planted_recovery),
        ("threshold, HIT and frontier monotonicity", monotonicity),
        ("filter partition and length-filter idempotence", filter_partition),
        ("aggregation counts and ratios", aggregation_table),
        ("subgradient, separability and norm checks", optimization),
        ("cross-validation protocol", cross_validation),
    ];
    let mut failed = 0;
    for (n, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("acceptance {}: PASS  {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {}: FAIL  {name}: {why}", n + 1);
            }
        }
    }
    println!(
        "acceptance 8: NOT RUN  reproduction on released corpus: needs the released annotated corpus and a pretrained embedding table, neither available here"
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance check(s) failed");
        ExitCode::FAILURE
    }
}
