use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn sarckit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarckit"))
        .current_dir(dir)
        .env_remove("SARCKIT_LEXICON_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = sarckit(dir, args);
    assert!(
        o.status.success(),
        "{args:?} failed with {:?}\n{}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

fn json(p: impl AsRef<Path>) -> Value {
    serde_json::from_str(&read(p)).unwrap()
}

const FILLER: [&str; 12] = [
    "the", "debate", "about", "guns", "is", "long", "and", "tiring", "but", "we", "keep", "going",
];

/// Labeled posts: sarcastic ones share a planted phrase, not-sarcastic ones
/// another; every post has a parent and 10..150 words.
fn corpus_lines(per_class: usize, offset: usize) -> String {
    let mut out = String::new();
    for i in offset..offset + per_class {
        let tail: Vec<&str> = (0..9).map(|j| FILLER[(i * 5 + j * 7) % FILLER.len()]).collect();
        for (label, head) in [
            ("sarc", "oh wow thanks for the brilliant idea ."),
            ("notsarc", "i think the evidence shows otherwise ."),
        ] {
            let rec = serde_json::json!({
                "id": format!("{label}{i}"),
                "parent_id": format!("q{i}"),
                "text": format!("{head} {} .", tail.join(" ")),
                "label": label,
            });
            out.push_str(&rec.to_string());
            out.push('\n');
        }
    }
    out
}

fn setup() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    std::fs::write(root.join("corpus.jsonl"), corpus_lines(30, 0)).unwrap();
    (dir, root)
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = sarckit(dir.path(), &["gridsearch", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"));
}

#[test]
fn unknown_subcommand_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = sarckit(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(sarckit(dir.path(), &[]).status.code(), Some(2));
}

#[test]
fn data_errors_exit_one() {
    let (_d, root) = setup();
    assert_eq!(sarckit(&root, &["crossval", "-i", "missing.jsonl"]).status.code(), Some(1));
    std::fs::write(root.join("bad.jsonl"), "{not json}\n").unwrap();
    assert_eq!(sarckit(&root, &["ingest", "-i", "bad.jsonl"]).status.code(), Some(1));
    // 10 folds need at least 10 posts per class
    std::fs::write(root.join("small.jsonl"), corpus_lines(3, 0)).unwrap();
    assert_eq!(sarckit(&root, &["crossval", "-i", "small.jsonl"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let (_d, root) = setup();
    assert_eq!(sarckit(&root, &["crossval", "-i", "corpus.jsonl", "--features", "nope"]).status.code(), Some(2));
    assert_eq!(sarckit(&root, &["crossval", "-i", "corpus.jsonl", "--features", "embedding"]).status.code(), Some(2));
    assert_eq!(sarckit(&root, &["threshold", "--stats", "x", "--class", "maybe"]).status.code(), Some(2));
    std::fs::write(root.join("bad.toml"), "no_such_key = 1\n").unwrap();
    assert_eq!(sarckit(&root, &["ingest", "-i", "corpus.jsonl", "--config", "bad.toml"]).status.code(), Some(2));
}

#[test]
fn crossval_writes_report_and_manifest() {
    let (_d, root) = setup();
    ok(&root, &["crossval", "-i", "corpus.jsonl", "--out", "run", "--seed", "7"]);
    let report = json(root.join("run/eval.json"));
    assert_eq!(report["k"], 10);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["hyperparams"]["l2_lambda"], 1e-4);
    assert!(read(root.join("run/eval.tsv")).starts_with("features\tclass\tprecision\trecall\tf1\n"));

    let m = json(root.join("run/crossval.manifest.json"));
    assert_eq!(m["subcommand"], "crossval");
    assert_eq!(m["seed"], 7);
    assert_eq!(m["syntax_version"], sarckit::syntax::SYNTAX_VERSION);
    assert_eq!(m["inputs"][0]["path"], "corpus.jsonl");
    let digest = sarckit::manifest::sha256_file(&root.join("corpus.jsonl")).unwrap();
    assert_eq!(m["inputs"][0]["sha256"], digest.as_str());
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn identical_runs_are_byte_identical() {
    let (_d, root) = setup();
    let args = ["learning-curve", "-i", "corpus.jsonl", "--out", "run", "--step", "10", "--k", "5", "--seed", "3"];
    ok(&root, &args);
    let csv1 = read(root.join("run/learning_curve.csv"));
    let json1 = read(root.join("run/learning_curve.json"));
    let mut m1 = json(root.join("run/learning-curve.manifest.json"));
    ok(&root, &args);
    assert_eq!(csv1, read(root.join("run/learning_curve.csv")));
    assert_eq!(json1, read(root.join("run/learning_curve.json")));
    let mut m2 = json(root.join("run/learning-curve.manifest.json"));
    m1["created_unix"] = Value::Null;
    m2["created_unix"] = Value::Null;
    assert_eq!(m1, m2);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let (_d, root) = setup();
    std::fs::write(
        root.join("run.toml"),
        "seed = 11\n[learner]\nk = 3\nepochs = 2\n",
    )
    .unwrap();
    ok(&root, &["crossval", "-i", "corpus.jsonl", "--config", "run.toml", "--out", "a"]);
    let r = json(root.join("a/eval.json"));
    assert_eq!((r["k"].as_u64(), r["seed"].as_u64()), (Some(3), Some(11)));
    assert_eq!(r["hyperparams"]["epochs"], 2);
    ok(&root, &["crossval", "-i", "corpus.jsonl", "--config", "run.toml", "--k", "5", "--out", "b"]);
    assert_eq!(json(root.join("b/eval.json"))["k"], 5);
    let m = json(root.join("b/crossval.manifest.json"));
    assert_eq!(m["inputs"][0]["path"], "run.toml");
}

#[test]
fn csv_input() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.csv"),
        "id,parent_id,text,label\na,q,\"well, that went great\",sarc\nb,,plain text,\n",
    )
    .unwrap();
    ok(dir.path(), &["ingest", "-i", "c.csv", "--format", "csv"]);
    let lines: Vec<Value> = read(dir.path().join("corpus.jsonl"))
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["label"], "sarc");
    assert_eq!(lines[1]["label"], Value::Null);
}

#[test]
fn pattern_pipeline() {
    let (_d, root) = setup();
    std::fs::write(root.join("dev.jsonl"), corpus_lines(10, 100)).unwrap();
    ok(&root, &["filter-length", "-i", "corpus.jsonl"]);
    assert_eq!(read(root.join("filtered.jsonl")).lines().count(), 60);

    ok(&root, &["learn-patterns", "-i", "corpus.jsonl"]);
    let stats = read(root.join("pattern_stats.tsv"));
    assert!(stats.lines().any(|l| l.starts_with("ACTVP_PREP_NP\tthanks for\t30\t30\t0")), "{stats}");

    ok(&root, &["threshold", "--stats", "pattern_stats.tsv", "--class", "sarc", "--theta-f", "2", "--theta-p", "0.75"]);
    assert!(read(root.join("patterns_sarc.tsv")).contains("ACTVP_PREP_NP\tthanks for"));
    ok(&root, &["threshold", "--stats", "pattern_stats.tsv", "--class", "notsarc"]);

    ok(&root, &["report-patterns", "--stats", "pattern_stats.tsv", "--class", "sarc", "--top-k", "5"]);
    let report = read(root.join("report_sarc.tsv"));
    assert_eq!(report.lines().count(), 6);

    ok(
        &root,
        &[
            "classify-weak",
            "-i",
            "dev.jsonl",
            "--sarc-patterns",
            "patterns_sarc.tsv",
            "--notsarc-patterns",
            "patterns_notsarc.tsv",
        ],
    );
    let preds = read(root.join("weak_predictions.tsv"));
    for line in preds.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        let gold = if cols[0].starts_with("sarc") { "sarc" } else { "notsarc" };
        assert_eq!(cols[3], gold, "{line}");
    }

    ok(&root, &["gridsearch", "--train", "corpus.jsonl", "--dev", "dev.jsonl", "--class", "sarc"]);
    let points = read(root.join("gridsearch_sarc.csv"));
    assert_eq!(points.lines().count(), 91);
    let g = json(root.join("gridsearch_sarc.json"));
    assert_eq!(g["points"].as_array().unwrap().len(), 90);

    ok(&root, &["build-ns-filter", "--stats", "pattern_stats.tsv"]);
    ok(&root, &["apply-filter", "-i", "dev.jsonl", "--filter", "ns_filter.tsv"]);
    let kept = read(root.join("kept.jsonl")).lines().count();
    let removed = read(root.join("removed.jsonl")).lines().count();
    assert_eq!(kept + removed, 20);
    assert_eq!(removed, 10);
}

#[test]
fn cue_and_annotation_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let posts = [
        ("p1", "Oh really? I had no idea that guns could be dangerous."),
        ("p2", "Wow, what a fantastic argument you have there."),
        ("p3", "I am reading the report now and will reply later."),
        ("p4", "Oh wait, you already said that in the last thread."),
    ];
    let mut lines = String::new();
    for (id, text) in posts {
        lines.push_str(&serde_json::json!({"id": id, "parent_id": "q", "text": text}).to_string());
        lines.push('\n');
    }
    std::fs::write(root.join("posts.jsonl"), lines).unwrap();

    ok(root, &["retrieve-cues", "-i", "posts.jsonl"]);
    let matches = read(root.join("cue_matches.jsonl"));
    assert!(matches.contains("\"p1\""));
    assert!(!matches.contains("\"p3\""));

    ok(root, &["rq-candidates", "-i", "posts.jsonl"]);
    assert_eq!(read(root.join("rq_candidates.txt")), "p1\n");

    ok(root, &["sample-batches", "--matches", "cue_matches.jsonl", "--batch-size", "2"]);
    let ids: Vec<String> = read(root.join("batches.jsonl"))
        .lines()
        .flat_map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            v["items"].as_array().unwrap().iter().map(|i| i["post_id"].as_str().unwrap().to_string()).collect::<Vec<_>>()
        })
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), ids.len());

    let votes = |id: &str, sarc: usize| {
        let js: Vec<Value> = (0..5)
            .map(|a| serde_json::json!({"annotator": format!("w{a}"), "label": if a < sarc {"sarc"} else {"notsarc"}}))
            .collect();
        serde_json::json!({"post_id": id, "judgments": js}).to_string()
    };
    std::fs::write(
        root.join("ann.jsonl"),
        [votes("p1", 4), votes("p2", 3), votes("p4", 1)].join("\n"),
    )
    .unwrap();
    ok(root, &["cue-stats", "--matches", "cue_matches.jsonl", "--annotations", "ann.jsonl"]);
    let stats = read(root.join("cue_stats.tsv"));
    assert!(stats.starts_with("cue\tclass\tfound\tannotated\tsarcastic\tpct_sarc\n"));

    ok(root, &["aggregate", "--annotations", "ann.jsonl", "--rule", "five-way"]);
    let r = json(root.join("ratio.json"));
    assert_eq!((r["sarcastic"].as_u64(), r["total"].as_u64()), (Some(2), Some(3)));
    assert_eq!(r["ratio_rounded"], "0.667");
    assert!(read(root.join("verdicts.tsv")).contains("p4\t1\tnotsarc"));
    // nine-way needs nine judgments per post
    assert_eq!(sarckit(root, &["aggregate", "--annotations", "ann.jsonl"]).status.code(), Some(1));

    ok(root, &["agreement", "--annotations", "ann.jsonl"]);
    let a = json(root.join("agreement.json"));
    assert_eq!(a["tied_posts"], 0);
    assert_eq!(a["per_annotator"]["w0"]["agreed"], 2);

    let mut gold = String::new();
    let mut answers = String::new();
    for i in 0..20 {
        let label = if i < 10 { "sarc" } else { "notsarc" };
        gold.push_str(&format!("{{\"post_id\":\"g{i}\",\"label\":\"{label}\"}}\n"));
        answers.push_str(&format!("{{\"annotator\":\"good\",\"post_id\":\"g{i}\",\"label\":\"{label}\"}}\n"));
        let lazy = "sarc";
        answers.push_str(&format!("{{\"annotator\":\"lazy\",\"post_id\":\"g{i}\",\"label\":\"{lazy}\"}}\n"));
    }
    std::fs::write(root.join("gold.jsonl"), gold).unwrap();
    std::fs::write(root.join("answers.jsonl"), answers).unwrap();
    ok(root, &["qualify", "--gold", "gold.jsonl", "--answers", "answers.jsonl"]);
    let q = read(root.join("qualifier.tsv"));
    assert!(q.contains("good\t20\t20\ttrue"));
    assert!(q.contains("lazy\t10\t20\tfalse"));
}

#[test]
fn assemble_and_train() {
    let (_d, root) = setup();
    let all = read(root.join("corpus.jsonl"));
    let (s, n): (Vec<&str>, Vec<&str>) = all.lines().partition(|l| l.contains("\"label\":\"sarc\""));
    std::fs::write(root.join("s.jsonl"), s.join("\n")).unwrap();
    std::fs::write(root.join("n.jsonl"), n.join("\n")).unwrap();
    ok(
        &root,
        &["assemble", "--source", "hyp=sarc:12:s.jsonl", "--source", "gen=notsarc:12:n.jsonl", "--seed", "5"],
    );
    assert_eq!(read(root.join("subcorpus.jsonl")).lines().count(), 24);
    let m = json(root.join("assembly.json"));
    assert_eq!(m["provenance"].as_object().unwrap().len(), 24);
    assert_eq!(
        sarckit(&root, &["assemble", "--source", "hyp=sarc:99:s.jsonl", "--source", "gen=notsarc:99:n.jsonl"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(sarckit(&root, &["assemble", "--source", "broken"]).status.code(), Some(2));

    ok(&root, &["train-svm", "-i", "subcorpus.jsonl", "--test", "corpus.jsonl"]);
    let model = json(root.join("model.json"));
    assert!(model["features"]["NGrams"]["terms"].as_array().unwrap().len() > 10);
    let preds = read(root.join("predictions.tsv"));
    for line in preds.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols[1], cols[2], "{line}");
    }

    std::fs::write(root.join("vec.txt"), "oh 1 0\nthanks 1 0\nevidence 0 1\nthink 0 1\n").unwrap();
    ok(
        &root,
        &["crossval", "-i", "corpus.jsonl", "--features", "embedding", "--embeddings", "vec.txt", "--out", "emb"],
    );
    let r = json(root.join("emb/eval.json"));
    assert_eq!(r["features"], "embedding-mean(dim=2)");
    assert_eq!(r["metrics"]["sarc"]["f1"], 1.0);
}
