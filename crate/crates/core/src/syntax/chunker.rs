use super::{Chunk, ChunkKind, Lexicon, Sentence, Tag, Token, Voice, VpFeatures};

pub(crate) const BE_FORMS: &[&str] = &["be", "am", "is", "are", "was", "were", "been", "being", "'re", "'m", "'s"];
pub(crate) const GET_FORMS: &[&str] = &["get", "gets", "got", "gotten", "getting"];
pub(crate) const HAVE_FORMS: &[&str] = &["have", "has", "had", "having", "'ve"];
pub(crate) const DO_FORMS: &[&str] = &["do", "does", "did", "doing", "done"];

fn is_be_or_get(t: &Token) -> bool {
    (t.tag == Tag::Aux && BE_FORMS.contains(&t.lower.as_str()))
        || (matches!(t.tag, Tag::Verb | Tag::Aux) && GET_FORMS.contains(&t.lower.as_str()))
}

fn is_verbal(t: &Token) -> bool {
    matches!(t.tag, Tag::Verb | Tag::Aux)
}

/// First index at or after `i` that is not an adverb.
fn skip_adverbs(tokens: &[Token], mut i: usize) -> usize {
    while i < tokens.len() && tokens[i].tag == Tag::Adv {
        i += 1;
    }
    i
}

/// Groups tagged tokens into maximal, non-overlapping NP, VP and PP chunks.
///
/// * VP: a run of auxiliaries and verbs with adverbs allowed inside. A
///   leading "to" followed by a verb makes an infinitival VP. After a form of
///   "be"/"get" a past participle tagged ADJ is pulled in. The VP is PASSIVE
///   when its head is a participle preceded (adverbs aside) by a be/get
///   form; `has_aux` marks an auxiliary before the head.
/// * NP: a pronoun, or an optional determiner/possessive, adjectives (with
///   pre-modifying adverbs), then one or more nouns. A determiner or
///   possessive with no noun still forms an NP ("this", "the best").
/// * PP: a single preposition.
pub fn chunk(mut sentence: Sentence, lexicon: &Lexicon) -> Sentence {
    let tokens = &sentence.tokens;
    let mut chunks = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if let Some(c) = verb_group(tokens, i, lexicon) {
            i = c.span.end;
            chunks.push(c);
        } else if let Some(c) = noun_phrase(tokens, i) {
            i = c.span.end;
            chunks.push(c);
        } else if tokens[i].tag == Tag::Prep {
            chunks.push(Chunk {
                kind: ChunkKind::PP,
                span: i..i + 1,
                head: i,
                vp: None,
            });
            i += 1;
        } else {
            i += 1;
        }
    }
    sentence.chunks = chunks;
    sentence
}

fn infinitive_marker(tokens: &[Token], i: usize) -> bool {
    if tokens[i].lower != "to" || tokens[i].tag != Tag::Prep {
        return false;
    }
    let j = skip_adverbs(tokens, i + 1);
    let Some(v) = tokens.get(j) else { return false };
    if !is_verbal(v) {
        return false;
    }
    let n = v.lower.chars().count();
    // "looking forward to seeing" and "to asked" are not infinitives
    v.tag == Tag::Aux || !((n > 4 && v.lower.ends_with("ing")) || (n > 3 && v.lower.ends_with("ed")))
}

fn verb_group(tokens: &[Token], start: usize, lexicon: &Lexicon) -> Option<Chunk> {
    let infinitive = infinitive_marker(tokens, start);
    if !infinitive && !is_verbal(&tokens[start]) {
        return None;
    }
    let mut end = if infinitive { start + 1 } else { start };
    loop {
        if end < tokens.len() && is_verbal(&tokens[end]) {
            end += 1;
            continue;
        }
        // adverbs stay inside only when more verbal material follows
        let after = skip_adverbs(tokens, end);
        if after > end && after < tokens.len() && is_verbal(&tokens[after]) {
            end = after;
            continue;
        }
        break;
    }

    let verbal_end = end;
    let last_verbal = (start..verbal_end).rev().find(|&k| is_verbal(&tokens[k]))?;
    let mut head = (start..verbal_end)
        .rev()
        .find(|&k| tokens[k].tag == Tag::Verb)
        .unwrap_or(last_verbal);

    // "might be interested": participle tagged ADJ after be/get
    if is_be_or_get(&tokens[last_verbal]) {
        let p = skip_adverbs(tokens, verbal_end);
        if p < tokens.len() && tokens[p].tag == Tag::Adj && lexicon.is_participle(&tokens[p].lower) {
            end = p + 1;
            head = p;
        }
    }

    let passive = lexicon.is_participle(&tokens[head].lower) && {
        let mut k = head;
        let mut found = false;
        while k > start {
            k -= 1;
            if tokens[k].tag == Tag::Adv {
                continue;
            }
            found = is_be_or_get(&tokens[k]);
            break;
        }
        found
    };
    let first_verbal = if infinitive { start + 1 } else { start };
    let has_aux = (first_verbal..head).any(|k| tokens[k].tag == Tag::Aux);

    Some(Chunk {
        kind: ChunkKind::VP,
        span: start..end,
        head,
        vp: Some(VpFeatures {
            voice: if passive { Voice::Passive } else { Voice::Active },
            infinitive,
            has_aux,
        }),
    })
}

fn noun_phrase(tokens: &[Token], start: usize) -> Option<Chunk> {
    let tag = tokens[start].tag;
    if tag == Tag::Pron {
        return Some(Chunk {
            kind: ChunkKind::NP,
            span: start..start + 1,
            head: start,
            vp: None,
        });
    }
    let determined = matches!(tag, Tag::Det | Tag::Poss);
    let mut j = if determined { start + 1 } else { start };

    // modifiers: (ADV* ADJ)*
    let mut last_modifier = None;
    loop {
        let k = skip_adverbs(tokens, j);
        if k < tokens.len() && tokens[k].tag == Tag::Adj {
            last_modifier = Some(k);
            j = k + 1;
        } else {
            break;
        }
    }
    let nouns_start = j;
    while j < tokens.len() && tokens[j].tag == Tag::Noun {
        j += 1;
    }
    if j > nouns_start {
        return Some(Chunk {
            kind: ChunkKind::NP,
            span: start..j,
            head: j - 1,
            vp: None,
        });
    }
    if determined {
        let end = last_modifier.map_or(start + 1, |m| m + 1);
        return Some(Chunk {
            kind: ChunkKind::NP,
            span: start..end,
            head: end - 1,
            vp: None,
        });
    }
    None
}
