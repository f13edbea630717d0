use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use sarckit::annotation::{
    agreement_stats, assemble_subcorpus, read_annotations, sarcasm_ratio, score_qualifier, verdicts, aggregate,
    AggregationRule, SourceQuota,
};
use sarckit::corpus::{word_count_filter, Corpus, Label, DEFAULT_MAX_WORDS, DEFAULT_MIN_WORDS};
use sarckit::cues::{
    cue_stats, read_matches_jsonl, retrieve, rq_candidates, sample_batches, write_cue_stats_tsv, write_matches_jsonl,
    CueSet,
};
use sarckit::learn::{
    cross_validate, learning_curve, tokenize_corpus, train_classifier, Confusion, EmbeddingTable, FeatureConfig,
    FittedFeatures, Hyperparams, Predictor, Vocabulary,
};
use sarckit::patterns::{
    count_patterns, emit_pattern_report, threshold_patterns, write_report_tsv, PatternExtractor, PatternSet,
    PatternStats, ReportSort, TemplateConfig, ThresholdConfig,
};
use sarckit::weak::{apply_filter, grid_search, resolve, write_points_csv, Grid, Verdict, WeakDetector};

use crate::ctx::{pick, usage, Ctx};
use crate::{Command, LearnerArgs, RuleArgs, TemplateArgs};

/// Default pattern thresholds for `threshold` and `classify-weak`.
const THETA_F: u64 = 2;
const THETA_P: f64 = 0.75;
const THETA_N: usize = 1;
/// Default not-sarcastic filter: patterns at 80% probability or more.
const NS_THETA_F: u64 = 2;
const NS_THETA_P: f64 = 0.80;
const BATCH_SIZE: usize = 20;

pub fn dispatch(ctx: &mut Ctx, cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest { input } => ingest(ctx, &input),
        Command::FilterLength { input, min, max } => filter_length(ctx, &input, min, max),
        Command::LearnPatterns { input, templates } => learn_patterns(ctx, &input, &templates),
        Command::Threshold {
            stats,
            class,
            theta_f,
            theta_p,
        } => threshold(ctx, &stats, class, theta_f, theta_p),
        Command::ClassifyWeak {
            input,
            sarc_patterns,
            notsarc_patterns,
            theta_n,
            templates,
        } => classify_weak(ctx, &input, sarc_patterns.as_deref(), notsarc_patterns.as_deref(), theta_n, &templates),
        Command::Gridsearch {
            train,
            dev,
            class,
            templates,
        } => gridsearch(ctx, &train, &dev, class, &templates),
        Command::BuildNsFilter { stats, theta_f, theta_p } => build_filter(ctx, &stats, theta_f, theta_p),
        Command::ApplyFilter {
            input,
            filter,
            templates,
        } => apply(ctx, &input, &filter, &templates),
        Command::RetrieveCues { input, cues } => retrieve_cues(ctx, &input, cues.as_deref()),
        Command::RqCandidates { input } => rq(ctx, &input),
        Command::SampleBatches { matches, batch_size } => batches(ctx, &matches, batch_size),
        Command::CueStats {
            matches,
            annotations,
            rule,
        } => cue_stats_cmd(ctx, &matches, &annotations, &rule),
        Command::Qualify { gold, answers } => qualify(ctx, &gold, &answers),
        Command::Aggregate { annotations, rule } => aggregate_cmd(ctx, &annotations, &rule),
        Command::Agreement { annotations } => agreement(ctx, &annotations),
        Command::Assemble { sources } => assemble(ctx, &sources),
        Command::TrainSvm { input, test, learner } => train_svm(ctx, &input, test.as_deref(), &learner),
        Command::Crossval { input, k, learner } => crossval(ctx, &input, k, &learner),
        Command::LearningCurve { input, step, k, learner } => curve(ctx, &input, step, k, &learner),
        Command::ReportPatterns {
            stats,
            class,
            sort,
            top_k,
        } => report(ctx, &stats, class, sort, top_k),
    }
}

fn summarize(c: &Corpus) -> String {
    let unlabeled = c.iter().filter(|p| p.label.is_none()).count();
    format!(
        "{} posts ({} sarc, {} notsarc, {} unlabeled)",
        c.len(),
        c.count_of(Label::Sarcastic),
        c.count_of(Label::NotSarcastic),
        unlabeled
    )
}

fn ingest(ctx: &mut Ctx, input: &Path) -> Result<()> {
    let c = ctx.corpus(input)?;
    let p = ctx.output_path("corpus.jsonl");
    c.save_jsonl(&p)?;
    eprintln!("ingested {}", summarize(&c));
    Ok(())
}

fn filter_length(ctx: &mut Ctx, input: &Path, min: Option<usize>, max: Option<usize>) -> Result<()> {
    let min = pick(min, ctx.cfg.length.min, DEFAULT_MIN_WORDS);
    let max = pick(max, ctx.cfg.length.max, DEFAULT_MAX_WORDS);
    ctx.set("min_words", min);
    ctx.set("max_words", max);
    let c = ctx.corpus(input)?;
    let kept = word_count_filter(&c, min, max)?;
    let p = ctx.output_path("filtered.jsonl");
    kept.save_jsonl(&p)?;
    eprintln!("kept {} of {} posts", kept.len(), c.len());
    Ok(())
}

fn extractor(ctx: &mut Ctx, t: &TemplateArgs) -> Result<PatternExtractor> {
    let adv_adv = if t.no_adv_adv {
        false
    } else {
        ctx.cfg.templates.adv_adv.unwrap_or(true)
    };
    ctx.set("adv_adv", adv_adv);
    Ok(PatternExtractor::new(ctx.analyzer()?, TemplateConfig { adv_adv }))
}

fn read_stats(ctx: &mut Ctx, path: &Path) -> Result<PatternStats> {
    let r = ctx.input(path)?;
    PatternStats::read_tsv(r).with_context(|| format!("reading {}", path.display()))
}

fn read_set(ctx: &mut Ctx, path: &Path) -> Result<PatternSet> {
    let r = ctx.input(path)?;
    PatternSet::read_tsv(r).with_context(|| format!("reading {}", path.display()))
}

fn learn_patterns(ctx: &mut Ctx, input: &Path, t: &TemplateArgs) -> Result<()> {
    let ex = extractor(ctx, t)?;
    let c = ctx.corpus(input)?;
    let stats = count_patterns(&c, &ex)?;
    ctx.write("pattern_stats.tsv", |w| Ok(stats.write_tsv(w)?))?;
    eprintln!("{} distinct patterns from {}", stats.len(), summarize(&c));
    Ok(())
}

fn thresholds(ctx: &mut Ctx, f: Option<u64>, p: Option<f64>, n: Option<usize>) -> Result<ThresholdConfig> {
    let t = &ctx.cfg.thresholds;
    let c = ThresholdConfig {
        theta_f: pick(f, t.theta_f, THETA_F),
        theta_p: pick(p, t.theta_p, THETA_P),
        theta_n: pick(n, t.theta_n, THETA_N),
    };
    c.validate().map_err(|e| usage(e.to_string()))?;
    Ok(c)
}

fn threshold(ctx: &mut Ctx, stats: &Path, class: Label, f: Option<u64>, p: Option<f64>) -> Result<()> {
    let t = thresholds(ctx, f, p, None)?;
    ctx.set("class", class);
    ctx.set("theta_f", t.theta_f);
    ctx.set("theta_p", t.theta_p);
    let s = read_stats(ctx, stats)?;
    let set = threshold_patterns(&s, class, t.theta_f, t.theta_p);
    ctx.write(&format!("patterns_{class}.tsv"), |w| Ok(set.write_tsv(w)?))?;
    eprintln!("{} {class} patterns at theta_f={} theta_p={}", set.len(), t.theta_f, t.theta_p);
    Ok(())
}

fn classify_weak(
    ctx: &mut Ctx,
    input: &Path,
    sarc: Option<&Path>,
    notsarc: Option<&Path>,
    n: Option<usize>,
    t: &TemplateArgs,
) -> Result<()> {
    if sarc.is_none() && notsarc.is_none() {
        bail!(usage("give --sarc-patterns, --notsarc-patterns or both"));
    }
    let theta_n = thresholds(ctx, None, None, n)?.theta_n;
    ctx.set("theta_n", theta_n);
    let detector = |ctx: &mut Ctx, path: Option<&Path>, class: Label| -> Result<WeakDetector> {
        match path {
            Some(p) => {
                let set = read_set(ctx, p)?;
                if set.class != class {
                    bail!(usage(format!("{} holds {} patterns, expected {class}", p.display(), set.class)));
                }
                Ok(WeakDetector::from_set(&set, theta_n))
            }
            None => Ok(WeakDetector::new(class, [], theta_n)),
        }
    };
    let ds = detector(ctx, sarc, Label::Sarcastic)?;
    let dn = detector(ctx, notsarc, Label::NotSarcastic)?;
    let ex = extractor(ctx, t)?;
    let c = ctx.corpus(input)?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    ctx.write("weak_predictions.tsv", |w| {
        writeln!(w, "id\tsarc_sites\tnotsarc_sites\tverdict")?;
        for p in c.iter() {
            let pats = ex.extract(p.text());
            let v = match resolve(&ds, &dn, &pats) {
                Verdict::Class(l) => l.to_string(),
                Verdict::Abstain => "abstain".to_string(),
            };
            writeln!(w, "{}\t{}\t{}\t{v}", p.id(), ds.match_sites(&pats), dn.match_sites(&pats))?;
            *counts.entry(v).or_default() += 1;
        }
        Ok(())
    })?;
    eprintln!("{counts:?}");
    Ok(())
}

fn grid(ctx: &Ctx) -> Grid {
    let d = Grid::default();
    let g = &ctx.cfg.grid;
    Grid {
        theta_f: g.theta_f.clone().unwrap_or(d.theta_f),
        theta_p: g.theta_p.clone().unwrap_or(d.theta_p),
        theta_n: g.theta_n.clone().unwrap_or(d.theta_n),
    }
}

fn gridsearch(ctx: &mut Ctx, train: &Path, dev: &Path, class: Label, t: &TemplateArgs) -> Result<()> {
    let g = grid(ctx);
    g.validate().map_err(|e| usage(e.to_string()))?;
    ctx.set("class", class);
    ctx.set("grid", &g);
    let ex = extractor(ctx, t)?;
    let tr = ctx.corpus(train)?;
    let dv = ctx.corpus(dev)?;
    let r = grid_search(&tr, &dv, class, &g, &ex)?;
    ctx.write(&format!("gridsearch_{class}.csv"), |w| Ok(write_points_csv(&r.points, w)?))?;
    ctx.write_json(&format!("gridsearch_{class}.json"), &r)?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(i) = r.precision_optimal {
        let p = &r.points[i];
        eprintln!(
            "precision-optimal: theta_f={} theta_p={} theta_n={} P={:.4} R={:.4}",
            p.config.theta_f,
            p.config.theta_p,
            p.config.theta_n,
            p.precision.unwrap_or(0.0),
            p.recall.unwrap_or(0.0)
        );
    }
    Ok(())
}

fn build_filter(ctx: &mut Ctx, stats: &Path, f: Option<u64>, p: Option<f64>) -> Result<()> {
    let nf = &ctx.cfg.ns_filter;
    let theta_f = pick(f, nf.theta_f, NS_THETA_F);
    let theta_p = pick(p, nf.theta_p, NS_THETA_P);
    ThresholdConfig::new(theta_f, theta_p, 1).map_err(|e| usage(e.to_string()))?;
    ctx.set("theta_f", theta_f);
    ctx.set("theta_p", theta_p);
    let s = read_stats(ctx, stats)?;
    let set = threshold_patterns(&s, Label::NotSarcastic, theta_f, theta_p);
    ctx.write("ns_filter.tsv", |w| Ok(set.write_tsv(w)?))?;
    eprintln!("{} not-sarcastic filter patterns", set.len());
    Ok(())
}

fn apply(ctx: &mut Ctx, input: &Path, filter: &Path, t: &TemplateArgs) -> Result<()> {
    let set = read_set(ctx, filter)?;
    if set.class != Label::NotSarcastic {
        bail!(usage(format!("{} is not a not-sarcastic pattern set", filter.display())));
    }
    let det = WeakDetector::from_set(&set, 1);
    let ex = extractor(ctx, t)?;
    let c = ctx.corpus(input)?;
    let (kept, removed) = apply_filter(&c, &det, &ex);
    let pk = ctx.output_path("kept.jsonl");
    kept.save_jsonl(&pk)?;
    let pr = ctx.output_path("removed.jsonl");
    removed.save_jsonl(&pr)?;
    eprintln!("kept {}, removed {} of {}", kept.len(), removed.len(), c.len());
    Ok(())
}

fn retrieve_cues(ctx: &mut Ctx, input: &Path, cues: Option<&Path>) -> Result<()> {
    let file = cues.map(Path::to_path_buf).or_else(|| ctx.cfg.cues.file.clone());
    let set = match &file {
        Some(p) => {
            let r = ctx.input(p)?;
            CueSet::parse(r).with_context(|| format!("reading {}", p.display()))?
        }
        None => CueSet::builtin(),
    };
    ctx.set("cues", file.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "builtin".into()));
    let c = ctx.corpus(input)?;
    let m = retrieve(&c, &set);
    ctx.write("cue_matches.jsonl", |w| Ok(write_matches_jsonl(&m, w)?))?;
    for x in &m {
        eprintln!("{}\t{}\t{}", x.class_hint, x.cue, x.post_ids.len());
    }
    Ok(())
}

fn rq(ctx: &mut Ctx, input: &Path) -> Result<()> {
    let an = ctx.analyzer()?;
    let c = ctx.corpus(input)?;
    let ids = rq_candidates(&c, &an);
    ctx.write("rq_candidates.txt", |w| {
        for id in &ids {
            writeln!(w, "{id}")?;
        }
        Ok(())
    })?;
    eprintln!("{} of {} posts are candidates", ids.len(), c.len());
    Ok(())
}

fn read_matches(ctx: &mut Ctx, path: &Path) -> Result<Vec<sarckit::cues::CueMatches>> {
    let r = ctx.input(path)?;
    read_matches_jsonl(r).with_context(|| format!("reading {}", path.display()))
}

fn batches(ctx: &mut Ctx, matches: &Path, size: Option<usize>) -> Result<()> {
    let size = pick(size, ctx.cfg.cues.batch_size, BATCH_SIZE);
    if size == 0 {
        bail!(usage("batch size must be positive"));
    }
    ctx.set("batch_size", size);
    let m = read_matches(ctx, matches)?;
    let b = sample_batches(&m, size, ctx.seed)?;
    ctx.write("batches.jsonl", |w| {
        #[derive(Serialize)]
        struct Line<'a> {
            batch: usize,
            items: &'a [sarckit::cues::BatchItem],
        }
        for (i, items) in b.batches.iter().enumerate() {
            serde_json::to_writer(&mut *w, &Line { batch: i, items })?;
            writeln!(w)?;
        }
        Ok(())
    })?;
    for w in &b.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("{} batches", b.batches.len());
    Ok(())
}

fn rule(ctx: &mut Ctx, a: &RuleArgs, default: AggregationRule) -> Result<AggregationRule> {
    let cfg = &ctx.cfg.annotation;
    let base = match a.rule.as_deref().or(cfg.rule.as_deref()) {
        None => default,
        Some("nine-way") => AggregationRule::NINE_WAY,
        Some("nine-way-relaxed") => AggregationRule::NINE_WAY_RELAXED,
        Some("three-way") => AggregationRule::THREE_WAY,
        Some("five-way") => AggregationRule::FIVE_WAY,
        Some(other) => bail!(usage(format!(
            "unknown rule `{other}` (nine-way, nine-way-relaxed, three-way, five-way)"
        ))),
    };
    let custom = a.required_sarc.or(cfg.required_sarc).is_some() || a.out_of.or(cfg.out_of).is_some();
    let r = AggregationRule {
        required_sarc: pick(a.required_sarc, cfg.required_sarc, base.required_sarc),
        out_of: pick(a.out_of, cfg.out_of, base.out_of),
        set_aside_at: match a.set_aside_at.or(cfg.set_aside_at) {
            Some(s) => Some(s),
            None if custom => None,
            None => base.set_aside_at,
        },
    };
    r.validate().map_err(|e| usage(e.to_string()))?;
    ctx.set("rule", r);
    Ok(r)
}

fn annotations(ctx: &mut Ctx, path: &Path) -> Result<Vec<sarckit::annotation::AnnotationRecord>> {
    let r = ctx.input(path)?;
    read_annotations(r).with_context(|| format!("reading {}", path.display()))
}

fn cue_stats_cmd(ctx: &mut Ctx, matches: &Path, ann: &Path, a: &RuleArgs) -> Result<()> {
    let r = rule(ctx, a, AggregationRule::FIVE_WAY)?;
    let m = read_matches(ctx, matches)?;
    let recs = annotations(ctx, ann)?;
    let v = verdicts(&recs, r)?;
    let rows = cue_stats(&m, &v)?;
    ctx.write("cue_stats.tsv", |w| Ok(write_cue_stats_tsv(&rows, w)?))?;
    Ok(())
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(r: impl BufRead, path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{} line {}", path.display(), i + 1))?);
    }
    Ok(out)
}

fn qualify(ctx: &mut Ctx, gold: &Path, answers: &Path) -> Result<()> {
    #[derive(Deserialize)]
    struct Gold {
        post_id: String,
        label: Label,
    }
    #[derive(Deserialize)]
    struct Answer {
        annotator: String,
        post_id: String,
        label: Label,
    }
    let r = ctx.input(gold)?;
    let g: BTreeMap<String, Label> = read_jsonl::<Gold>(r, gold)?.into_iter().map(|x| (x.post_id, x.label)).collect();
    let r = ctx.input(answers)?;
    let mut by_worker: BTreeMap<String, BTreeMap<String, Label>> = BTreeMap::new();
    for a in read_jsonl::<Answer>(r, answers)? {
        if by_worker.entry(a.annotator.clone()).or_default().insert(a.post_id.clone(), a.label).is_some() {
            bail!("annotator `{}` answered `{}` twice", a.annotator, a.post_id);
        }
    }
    let mut results = Vec::new();
    for (w, ans) in &by_worker {
        results.push((w, score_qualifier(&g, ans)?));
    }
    ctx.write("qualifier.tsv", |out| {
        writeln!(out, "annotator\tcorrect\ttotal\tpass")?;
        for (w, q) in &results {
            writeln!(out, "{w}\t{}\t{}\t{}", q.correct, q.total, q.pass)?;
        }
        Ok(())
    })?;
    let passed = results.iter().filter(|(_, q)| q.pass).count();
    eprintln!("{passed} of {} annotators pass", results.len());
    Ok(())
}

fn aggregate_cmd(ctx: &mut Ctx, ann: &Path, a: &RuleArgs) -> Result<()> {
    let r = rule(ctx, a, AggregationRule::NINE_WAY)?;
    let recs = annotations(ctx, ann)?;
    let mut rows = Vec::with_capacity(recs.len());
    for rec in &recs {
        rows.push((rec.post_id.as_str(), rec.sarcastic_votes(), aggregate(rec, r)?));
    }
    ctx.write("verdicts.tsv", |w| {
        writeln!(w, "post_id\tsarc_votes\tverdict")?;
        for (id, votes, v) in &rows {
            let v = v.label().map(|l| l.to_string()).unwrap_or_else(|| "set_aside".into());
            writeln!(w, "{id}\t{votes}\t{v}")?;
        }
        Ok(())
    })?;
    let ratio = sarcasm_ratio(&recs, r)?;
    #[derive(Serialize)]
    struct RatioOut {
        rule: String,
        #[serde(flatten)]
        counts: sarckit::annotation::RatioReport,
        ratio: Option<f64>,
        ratio_rounded: Option<String>,
    }
    let out = RatioOut {
        rule: r.to_string(),
        counts: ratio,
        ratio: ratio.ratio(),
        ratio_rounded: ratio.ratio_rounded(3),
    };
    ctx.write_json("ratio.json", &out)?;
    eprintln!(
        "{} sarcastic of {} ({})",
        ratio.sarcastic,
        ratio.total,
        out.ratio_rounded.as_deref().unwrap_or("n/a")
    );
    Ok(())
}

fn agreement(ctx: &mut Ctx, ann: &Path) -> Result<()> {
    let recs = annotations(ctx, ann)?;
    let s = agreement_stats(&recs);
    ctx.write("agreement.tsv", |w| {
        writeln!(w, "annotator\tagreed\ttotal\tpct")?;
        for (a, x) in &s.per_annotator {
            writeln!(w, "{a}\t{}\t{}\t{:.2}", x.agreed, x.total, x.pct)?;
        }
        Ok(())
    })?;
    ctx.write_json("agreement.json", &s)?;
    if let Some(m) = s.mean_pct {
        eprintln!("mean agreement {m:.2}% over {} annotators", s.per_annotator.len());
    }
    Ok(())
}

/// `NAME=LABEL:QUOTA:PATH`
fn parse_source(s: &str) -> Result<(String, Label, usize, &Path)> {
    let bad = || usage(format!("bad --source `{s}`; expected NAME=LABEL:QUOTA:PATH"));
    let (name, rest) = s.split_once('=').ok_or_else(bad)?;
    let mut parts = rest.splitn(3, ':');
    let label = parts.next().ok_or_else(bad)?.parse::<Label>().map_err(|_| bad())?;
    let quota = parts.next().ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?;
    let path = Path::new(parts.next().ok_or_else(bad)?);
    if name.is_empty() {
        return Err(bad());
    }
    Ok((name.to_string(), label, quota, path))
}

fn assemble(ctx: &mut Ctx, sources: &[String]) -> Result<()> {
    let mut quotas = Vec::new();
    for s in sources {
        let (name, label, quota, path) = parse_source(s)?;
        let pool = ctx.corpus(path)?;
        quotas.push(SourceQuota {
            name,
            label,
            quota,
            pool,
        });
    }
    ctx.set("sources", sources);
    let (c, manifest) = assemble_subcorpus(&quotas, ctx.seed)?;
    let p = ctx.output_path("subcorpus.jsonl");
    c.save_jsonl(&p)?;
    ctx.write_json("assembly.json", &manifest)?;
    eprintln!("assembled {}", summarize(&c));
    Ok(())
}

fn learner(ctx: &mut Ctx, a: &LearnerArgs) -> Result<(FeatureConfig, Hyperparams)> {
    let l = ctx.cfg.learner.clone();
    let d = Hyperparams::default();
    let hp = Hyperparams {
        l2_lambda: pick(a.l2_lambda, l.l2_lambda, d.l2_lambda),
        epochs: pick(a.epochs, l.epochs, d.epochs),
        eta0: pick(a.eta0, l.eta0, d.eta0),
        power_t: pick(a.power_t, l.power_t, d.power_t),
        seed: ctx.seed,
    };
    hp.validate().map_err(|e| usage(e.to_string()))?;
    let kind = pick(a.features.clone(), l.features.clone(), "ngrams".to_string());
    let fc = match kind.as_str() {
        "ngrams" => {
            let n_max = pick(a.n_max, l.n_max, 3);
            if n_max == 0 {
                bail!(usage("n-max must be at least 1"));
            }
            FeatureConfig::NGrams {
                n_max,
                min_df: pick(a.min_df, l.min_df, 1),
            }
        }
        "embedding" => {
            let path = a
                .embeddings
                .clone()
                .or(l.embeddings)
                .ok_or_else(|| usage("--features embedding needs --embeddings FILE"))?;
            ctx.manifest.add_input(&path)?;
            let table = EmbeddingTable::load(&path)?;
            FeatureConfig::Embedding { table: Arc::new(table) }
        }
        other => bail!(usage(format!("unknown feature set `{other}` (ngrams, embedding)"))),
    };
    ctx.set("features", fc.name());
    ctx.set("hyperparams", hp);
    Ok((fc, hp))
}

fn train_svm(ctx: &mut Ctx, input: &Path, test: Option<&Path>, a: &LearnerArgs) -> Result<()> {
    let (fc, hp) = learner(ctx, a)?;
    let an = ctx.analyzer()?;
    let c = ctx.corpus(input)?;
    let clf = train_classifier(&c, &fc, &hp, &an)?;

    #[derive(Serialize)]
    enum SavedFeatures<'a> {
        NGrams(&'a Vocabulary),
        Embedding { dim: usize },
    }
    #[derive(Serialize)]
    struct SavedModel<'a> {
        features: SavedFeatures<'a>,
        model: &'a Predictor,
    }
    let features = match &clf.features {
        FittedFeatures::NGrams(v) => SavedFeatures::NGrams(v),
        FittedFeatures::Embedding(t) => SavedFeatures::Embedding { dim: t.dim() },
    };
    ctx.write_json(
        "model.json",
        &SavedModel {
            features,
            model: &clf.model,
        },
    )?;
    eprintln!("trained on {}; {} features", summarize(&c), clf.features.dim());

    if let Some(tp) = test {
        let t = ctx.corpus(tp)?;
        let posts = tokenize_corpus(&t, &an);
        let preds: Vec<Label> = posts.iter().map(|p| clf.predict(p)).collect();
        let mut conf = Confusion::default();
        ctx.write("predictions.tsv", |w| {
            writeln!(w, "id\tpredicted\tgold")?;
            for (p, pred) in t.iter().zip(&preds) {
                let gold = p.label.map(|l| l.to_string()).unwrap_or_default();
                writeln!(w, "{}\t{pred}\t{gold}", p.id())?;
                if let Some(g) = p.label {
                    conf.add(g, *pred);
                }
            }
            Ok(())
        })?;
        if conf.total() > 0 {
            let m = conf.per_class();
            eprintln!(
                "test: sarc P={:.2} R={:.2} F={:.2}; notsarc P={:.2} R={:.2} F={:.2}",
                m.sarc.precision, m.sarc.recall, m.sarc.f1, m.notsarc.precision, m.notsarc.recall, m.notsarc.f1
            );
        }
    }
    Ok(())
}

fn crossval(ctx: &mut Ctx, input: &Path, k: Option<usize>, a: &LearnerArgs) -> Result<()> {
    let k = pick(k, ctx.cfg.learner.k, 10);
    ctx.set("k", k);
    let (fc, hp) = learner(ctx, a)?;
    let an = ctx.analyzer()?;
    let c = ctx.corpus(input)?;
    let r = cross_validate(&c, k, &fc, &hp, ctx.seed, &an)?;
    ctx.write("eval.json", |w| {
        r.write_json(&mut *w)?;
        writeln!(w)?;
        Ok(())
    })?;
    ctx.write("eval.tsv", |w| Ok(r.write_tsv(w)?))?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "sarc F={:.2} notsarc F={:.2} over {} folds",
        r.metrics.sarc.f1, r.metrics.notsarc.f1, k
    );
    Ok(())
}

fn curve(ctx: &mut Ctx, input: &Path, step: Option<usize>, k: Option<usize>, a: &LearnerArgs) -> Result<()> {
    let step = pick(step, ctx.cfg.learner.step, 100);
    let k = pick(k, ctx.cfg.learner.k, 10);
    ctx.set("step", step);
    ctx.set("k", k);
    let (fc, hp) = learner(ctx, a)?;
    let an = ctx.analyzer()?;
    let c = ctx.corpus(input)?;
    let lc = learning_curve(&c, step, k, &fc, &hp, ctx.seed, &an)?;
    ctx.write("learning_curve.csv", |w| Ok(lc.write_csv(w)?))?;
    ctx.write_json("learning_curve.json", &lc)?;
    for p in &lc.points {
        for w in &p.warnings {
            eprintln!("warning (size {}): {w}", p.size);
        }
    }
    Ok(())
}

fn report(ctx: &mut Ctx, stats: &Path, class: Label, sort: Option<ReportSort>, top_k: Option<usize>) -> Result<()> {
    let sort = sort.unwrap_or_default();
    ctx.set("class", class);
    ctx.set("sort", sort);
    ctx.set("top_k", top_k);
    let s = read_stats(ctx, stats)?;
    let rows = emit_pattern_report(&s, class, sort, top_k);
    ctx.write(&format!("report_{class}.tsv"), |w| Ok(write_report_tsv(&rows, w)?))?;
    Ok(())
}
