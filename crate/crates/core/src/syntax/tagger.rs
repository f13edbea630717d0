use super::{Lexicon, Tag, Token};

const SUBJECT_PRONOUNS: &[&str] = &["i", "you", "we", "they", "he", "she", "it", "who", "u", "ya"];
const S_AS_IS: &[&str] = &[
    "it", "he", "she", "that", "there", "here", "what", "who", "where", "how", "this",
    "everything", "nothing", "something", "everyone", "everybody", "someone", "somebody",
];

/// Assigns a tag to every word token. Punctuation runs and emoticons keep
/// the tags the tokenizer gave them.
///
/// Order of evidence: lexicon entry (with a few context rules to choose
/// among a word's alternatives), then suffix rules, then NOUN.
pub fn pos_tag(mut tokens: Vec<Token>, lexicon: &Lexicon) -> Vec<Token> {
    let defaults: Vec<Option<Tag>> = tokens
        .iter()
        .map(|t| t.is_word().then(|| default_tag(&t.lower, lexicon)))
        .collect();

    for i in 0..tokens.len() {
        if !tokens[i].is_word() {
            continue;
        }
        let tag = choose(&tokens, &defaults, i, lexicon);
        tokens[i].tag = tag;
    }
    tokens
}

/// Context-free tag: lexicon default, else suffix guess, else NOUN.
fn default_tag(lower: &str, lexicon: &Lexicon) -> Tag {
    match lexicon.tags(lower) {
        Some(tags) => tags[0],
        None => suffix_tag(lower, lexicon),
    }
}

fn suffix_tag(lower: &str, lexicon: &Lexicon) -> Tag {
    if !lower.chars().any(char::is_alphabetic) {
        return Tag::Noun;
    }
    // hyphenated compounds take the tag of their last part
    if let Some((_, last)) = lower.rsplit_once('-') {
        if let Some(tags) = lexicon.tags(last) {
            return match tags[0] {
                Tag::Noun | Tag::Adj | Tag::Verb | Tag::Adv => tags[0],
                _ => Tag::Noun,
            };
        }
    }
    let n = lower.chars().count();
    if n > 4 && lower.ends_with("ly") {
        return Tag::Adv;
    }
    if n > 4 && lower.ends_with("ing") {
        return Tag::Verb;
    }
    if n > 3 && lower.ends_with("ed") {
        return Tag::Verb;
    }
    const ADJ_SUFFIXES: &[&str] = &[
        "ous", "ful", "ive", "able", "ible", "less", "ical", "ic", "ish",
    ];
    if n > 4 && ADJ_SUFFIXES.iter().any(|s| lower.ends_with(s)) {
        return Tag::Adj;
    }
    if n > 5 && lower.ends_with("al") {
        return Tag::Adj;
    }
    if n > 3 && lower.ends_with('s') {
        let stems = [
            lower.strip_suffix("ies").map(|s| format!("{s}y")),
            lower.strip_suffix("es").map(str::to_string),
            lower.strip_suffix('s').map(str::to_string),
        ];
        for stem in stems.into_iter().flatten() {
            if let Some(tags) = lexicon.tags(&stem) {
                if tags.contains(&Tag::Noun) {
                    return Tag::Noun;
                }
                if tags[0] == Tag::Verb {
                    return Tag::Verb;
                }
            }
        }
    }
    Tag::Noun
}

fn prev_word(tokens: &[Token], i: usize) -> Option<usize> {
    (0..i).next_back().filter(|&j| tokens[j].is_word())
}

fn next_default(defaults: &[Option<Tag>], i: usize) -> Option<Tag> {
    defaults.get(i + 1).copied().flatten()
}

/// Word after a subject pronoun, an auxiliary or infinitival "to", possibly
/// with adverbs in between.
fn verbal_context(tokens: &[Token], i: usize) -> bool {
    let mut j = i;
    while let Some(p) = prev_word(tokens, j) {
        let t = &tokens[p];
        match t.tag {
            Tag::Adv => j = p,
            Tag::Aux => return true,
            Tag::Pron => return SUBJECT_PRONOUNS.contains(&t.lower.as_str()) || t.lower == "'s",
            Tag::Prep => return t.lower == "to",
            _ => return false,
        }
    }
    false
}

fn nominal_context(tokens: &[Token], i: usize) -> bool {
    prev_word(tokens, i).is_some_and(|p| {
        matches!(tokens[p].tag, Tag::Det | Tag::Poss | Tag::Adj)
            || (tokens[p].tag == Tag::Prep && tokens[p].lower != "to")
    })
}

/// No earlier word, or only punctuation and interjection-like adverbs
/// since the last punctuation run.
fn clause_start(tokens: &[Token], i: usize) -> bool {
    for t in tokens[..i].iter().rev() {
        match t.tag {
            Tag::PunctRun | Tag::Emoticon => return true,
            Tag::Adv => continue,
            _ => return false,
        }
    }
    true
}

fn choose(tokens: &[Token], defaults: &[Option<Tag>], i: usize, lexicon: &Lexicon) -> Tag {
    let lower = tokens[i].lower.as_str();
    let next = next_default(defaults, i);

    match lower {
        "'s" => {
            let prev = prev_word(tokens, i).map(|p| tokens[p].lower.as_str());
            return match prev {
                Some("let") => Tag::Pron,
                Some(p) if S_AS_IS.contains(&p) => Tag::Aux,
                _ => Tag::Poss,
            };
        }
        "her" => {
            return if matches!(next, Some(Tag::Noun | Tag::Adj)) {
                Tag::Poss
            } else {
                Tag::Pron
            };
        }
        "that" => {
            return if matches!(next, Some(Tag::Pron | Tag::Det | Tag::Poss)) {
                Tag::Other
            } else {
                Tag::Det
            };
        }
        _ => {}
    }

    let Some(candidates) = lexicon.tags(lower) else {
        return suffix_tag(lower, lexicon);
    };
    if candidates.len() == 1 {
        return candidates[0];
    }
    let has = |t: Tag| candidates.contains(&t);

    if nominal_context(tokens, i) {
        if has(Tag::Adj) && next == Some(Tag::Noun) {
            return Tag::Adj;
        }
        if has(Tag::Noun) {
            return Tag::Noun;
        }
    }
    if has(Tag::Verb) && verbal_context(tokens, i) {
        return Tag::Verb;
    }
    if has(Tag::Verb)
        && clause_start(tokens, i)
        && matches!(next, Some(Tag::Det | Tag::Poss | Tag::Pron | Tag::Prep))
    {
        return Tag::Verb;
    }
    if has(Tag::Adj) && has(Tag::Adv) && next == Some(Tag::Noun) {
        return Tag::Adj;
    }
    candidates[0]
}
