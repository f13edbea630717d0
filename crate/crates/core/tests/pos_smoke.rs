//! Tagger accuracy against a hand-tagged set of 50 forum-style sentences.

use sarckit::syntax::{Analyzer, Tag};

const SMOKE: &str = include_str!("data/pos_smoke.txt");

fn gold() -> Vec<Vec<(String, Tag)>> {
    SMOKE
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|line| {
            line.split(' ')
                .map(|tok| {
                    let (surface, tag) = tok.rsplit_once('/').expect("surface/TAG");
                    (surface.to_string(), tag.parse().expect("known tag"))
                })
                .collect()
        })
        .collect()
}

/// Clitics attach to the previous token without a space.
fn detokenize(tokens: &[(String, Tag)]) -> String {
    let mut text = String::new();
    for (i, (surface, _)) in tokens.iter().enumerate() {
        let clitic = surface.starts_with('\'') || surface == "n't";
        if i > 0 && !clitic {
            text.push(' ');
        }
        text.push_str(surface);
    }
    text
}

#[test]
fn smoke_set_has_fifty_sentences() {
    assert_eq!(gold().len(), 50);
}

#[test]
fn token_accuracy_at_least_ninety_percent() {
    let analyzer = Analyzer::default();
    let mut total = 0usize;
    let mut correct = 0usize;
    let mut misses = Vec::new();
    for sentence in gold() {
        let text = detokenize(&sentence);
        let tagged = analyzer.tagged_tokens(&text);
        let surfaces: Vec<&str> = tagged.iter().map(|t| t.surface.as_str()).collect();
        let gold_surfaces: Vec<&str> = sentence.iter().map(|(s, _)| s.as_str()).collect();
        assert_eq!(surfaces, gold_surfaces, "tokenization differs for `{text}`");
        for (tok, (_, gold_tag)) in tagged.iter().zip(&sentence) {
            total += 1;
            if tok.tag == *gold_tag {
                correct += 1;
            } else {
                misses.push(format!("{}: {} (gold {})", tok.surface, tok.tag, gold_tag));
            }
        }
    }
    let accuracy = correct as f64 / total as f64;
    println!("tagger accuracy {correct}/{total} = {accuracy:.4}");
    for m in &misses {
        println!("  miss {m}");
    }
    assert!(accuracy >= 0.90, "accuracy {accuracy:.4} below 0.90");
}
