use super::{Chunk, ChunkKind, Sentence, SvoTriple, Tag};

const NEGATORS: &[&str] = &["not", "n't", "never"];

fn is_negator(lower: &str) -> bool {
    NEGATORS.contains(&lower)
}

/// True when only adverbs separate chunk `a` from chunk `b`.
fn adjacent(s: &Sentence, a: &Chunk, b: &Chunk) -> bool {
    a.span.end <= b.span.start && s.tokens[a.span.end..b.span.start].iter().all(|t| t.tag == Tag::Adv)
}

/// VP made of auxiliaries only, e.g. the fronted "can" in "can't you read".
fn aux_only(s: &Sentence, c: &Chunk) -> bool {
    s.tokens[c.span.clone()].iter().all(|t| t.tag != Tag::Verb) && s.tokens[c.head].tag == Tag::Aux
}

/// Reads subject-verb-object triples off the chunks of one sentence.
///
/// For every non-infinitival VP the subject is the head of the nearest
/// preceding NP and the object the head of the nearest following NP. A VP
/// is negated when "not", "n't" or "never" sits inside it or right before
/// it. An auxiliary-only VP directly followed by NP + VP is treated as a
/// fronted auxiliary: it yields no triple and passes its negation on.
pub fn extract_svo(sentence: &Sentence) -> Vec<SvoTriple> {
    let chunks = &sentence.chunks;
    let tokens = &sentence.tokens;
    let mut triples = Vec::new();
    let mut carried_negation = false;

    for (ci, c) in chunks.iter().enumerate() {
        if c.kind != ChunkKind::VP || c.is_infinitive() {
            continue;
        }
        let mut negated = std::mem::take(&mut carried_negation)
            || tokens[c.span.clone()].iter().any(|t| is_negator(&t.lower))
            || c.span.start > 0 && is_negator(&tokens[c.span.start - 1].lower);

        let fronted = aux_only(sentence, c)
            && matches!(
                (chunks.get(ci + 1), chunks.get(ci + 2)),
                (Some(np), Some(vp))
                    if np.kind == ChunkKind::NP && vp.kind == ChunkKind::VP
                        && adjacent(sentence, c, np) && adjacent(sentence, np, vp)
            );
        if fronted {
            let np = &chunks[ci + 1];
            negated |= tokens[c.span.end..np.span.start].iter().any(|t| is_negator(&t.lower));
            carried_negation = negated;
            continue;
        }

        let subject = chunks[..ci]
            .iter()
            .rev()
            .find(|n| n.kind == ChunkKind::NP)
            .map(|n| sentence.head_lower(n).to_string());
        let object = chunks[ci + 1..]
            .iter()
            .find(|n| n.kind == ChunkKind::NP)
            .map(|n| sentence.head_lower(n).to_string());
        triples.push(SvoTriple {
            verb: sentence.head_lower(c).to_string(),
            negated,
            subject,
            object,
        });
    }
    triples
}
