use super::{Lexicon, Tag, Token};

const CLITICS: [&str; 7] = ["n't", "'s", "'re", "'ve", "'ll", "'d", "'m"];

/// Splits text into words, punctuation runs and emoticons. Words are tagged
/// `OTHER` until [`pos_tag`](super::pos_tag) runs.
///
/// Every maximal run of non-alphanumeric, non-space characters is one
/// `PUNCT_RUN` token, so "?!?!" and "..." stay whole. Emoticons from the
/// lexicon and `[emoticon-*]` markers are single `EMOTICON` tokens.
/// Contractions are split Penn-style ("can't" -> "ca" "n't").
pub fn tokenize(text: &str, lexicon: &Lexicon) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        let prev = text[..pos].chars().next_back();

        if let Some(len) = emoticon_marker(rest).or_else(|| emoticon_at(rest, prev, lexicon)) {
            push(&mut tokens, text, pos..pos + len, Tag::Emoticon);
            pos += len;
        } else if let Some(len) = abbreviation_at(rest, prev, lexicon) {
            push(&mut tokens, text, pos..pos + len, Tag::Other);
            pos += len;
        } else if c.is_alphanumeric() {
            let len = word_len(rest);
            push_word(&mut tokens, text, pos..pos + len);
            pos += len;
        } else {
            let len = punct_len(rest);
            push(&mut tokens, text, pos..pos + len, Tag::PunctRun);
            pos += len;
        }
    }
    tokens
}

fn push(tokens: &mut Vec<Token>, text: &str, span: std::ops::Range<usize>, tag: Tag) {
    let surface = text[span.clone()].to_string();
    let lower = normalize(&surface);
    tokens.push(Token {
        surface,
        lower,
        tag,
        span,
    });
}

fn normalize(surface: &str) -> String {
    surface.to_lowercase().replace('\u{2019}', "'")
}

/// Splits a trailing clitic off a word.
fn push_word(tokens: &mut Vec<Token>, text: &str, span: std::ops::Range<usize>) {
    let lower = normalize(&text[span.clone()]);
    for clitic in CLITICS {
        if lower.len() > clitic.len() && lower.ends_with(clitic) {
            // clitic length in the source may differ when a curly apostrophe is used
            let surface = &text[span.clone()];
            let clitic_chars = clitic.chars().count();
            let split = surface
                .char_indices()
                .rev()
                .nth(clitic_chars - 1)
                .map(|(i, _)| span.start + i)
                .unwrap();
            if split > span.start {
                push(tokens, text, span.start..split, Tag::Other);
                push(tokens, text, split..span.end, Tag::Other);
                return;
            }
        }
    }
    push(tokens, text, span, Tag::Other);
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Alphanumerics with internal apostrophes and hyphens, plus digit-internal
/// '.' and ','.
fn word_len(s: &str) -> usize {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_alphanumeric() {
            i += 1;
            continue;
        }
        let prev = if i > 0 { Some(chars[i - 1].1) } else { None };
        let next = chars.get(i + 1).map(|&(_, c)| c);
        let joins = match (prev, next) {
            (Some(p), Some(n)) if is_apostrophe(c) || c == '-' => {
                p.is_alphanumeric() && n.is_alphanumeric()
            }
            (Some(p), Some(n)) if c == '.' || c == ',' => p.is_ascii_digit() && n.is_ascii_digit(),
            _ => false,
        };
        if !joins {
            break;
        }
        i += 1;
    }
    chars.get(i).map_or(s.len(), |&(b, _)| b)
}

fn punct_len(s: &str) -> usize {
    let mut end = 0;
    for (i, c) in s.char_indices() {
        if c.is_alphanumeric() || c.is_whitespace() || (i > 0 && s[i..].starts_with("[emoticon")) {
            break;
        }
        end = i + c.len_utf8();
    }
    end
}

/// `[emoticon-rolleyes]` style markers.
fn emoticon_marker(s: &str) -> Option<usize> {
    let lower_prefix = s.get(..9)?.to_ascii_lowercase();
    if lower_prefix != "[emoticon" {
        return None;
    }
    let close = s.find(']')?;
    let inner = &s[1..close];
    if inner.chars().any(char::is_whitespace) {
        return None;
    }
    Some(close + 1)
}

fn emoticon_at(s: &str, prev: Option<char>, lexicon: &Lexicon) -> Option<usize> {
    // an emoticon cannot start in the middle of a word unless it starts with punctuation
    let first = s.chars().next()?;
    if first.is_alphanumeric() && prev.is_some_and(char::is_alphanumeric) {
        return None;
    }
    lexicon.emoticons().iter().find_map(|e| {
        if !s.starts_with(e.as_str()) {
            return None;
        }
        let last = e.chars().next_back().unwrap();
        let next = s[e.len()..].chars().next();
        // letter-final emoticons like ":P" must not run into a word
        if last.is_alphanumeric() && next.is_some_and(char::is_alphanumeric) {
            return None;
        }
        // digit-initial emoticons like "8)" only after whitespace
        if first.is_ascii_digit() && prev.is_some_and(|p| !p.is_whitespace()) {
            return None;
        }
        // "://" and similar runs are punctuation, not emoticons
        let boundary_after = next.is_none_or(|n| n.is_alphanumeric() || n.is_whitespace() || ".,!?".contains(n));
        boundary_after.then_some(e.len())
    })
}

fn abbreviation_at(s: &str, prev: Option<char>, lexicon: &Lexicon) -> Option<usize> {
    if prev.is_some_and(char::is_alphanumeric) {
        return None;
    }
    lexicon.abbreviations().iter().find_map(|a| {
        let candidate = s.get(..a.len())?;
        if !candidate.eq_ignore_ascii_case(a) {
            return None;
        }
        let next = s[a.len()..].chars().next();
        (!next.is_some_and(char::is_alphanumeric)).then_some(a.len())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text, &Lexicon::builtin())
            .into_iter()
            .map(|t| t.surface)
            .collect()
    }

    #[test]
    fn punctuation_runs_are_single_tokens() {
        assert_eq!(surfaces("Oh, really?!?!"), ["Oh", ",", "really", "?!?!"]);
        let toks = tokenize("Oh, really?!?!", &Lexicon::builtin());
        assert_eq!(toks[0].lower, "oh");
        assert_eq!(toks[3].tag, Tag::PunctRun);
        assert_eq!(surfaces("wait..."), ["wait", "..."]);
    }

    #[test]
    fn empty_input() {
        assert!(surfaces("").is_empty());
        assert!(surfaces("   \n").is_empty());
    }

    #[test]
    fn emoticons() {
        let lex = Lexicon::builtin();
        let toks = tokenize(":)", &lex);
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].tag, Tag::Emoticon);
        let toks = tokenize("sure [emoticon-rolleyes] right", &lex);
        assert_eq!(toks[1].surface, "[emoticon-rolleyes]");
        assert_eq!(toks[1].tag, Tag::Emoticon);
        assert_eq!(surfaces("great:) ok"), ["great", ":)", "ok"]);
        assert_eq!(surfaces("see :P"), ["see", ":P"]);
        // not an emoticon: letters follow
        assert_eq!(surfaces("a:Pb"), ["a", ":", "Pb"]);
    }

    #[test]
    fn contractions_and_abbreviations() {
        assert_eq!(surfaces("can't you read?"), ["ca", "n't", "you", "read", "?"]);
        assert_eq!(surfaces("O.K. let's play"), ["O.K.", "let", "'s", "play"]);
        assert_eq!(surfaces("I'm done"), ["I", "'m", "done"]);
        assert_eq!(surfaces("don’t"), ["do", "n’t"]);
        assert_eq!(tokenize("don’t", &Lexicon::builtin())[1].lower, "n't");
    }

    #[test]
    fn words_with_internal_marks() {
        assert_eq!(surfaces("a 6-day creationist"), ["a", "6-day", "creationist"]);
        assert_eq!(surfaces("pi is 3.14, ok"), ["pi", "is", "3.14", ",", "ok"]);
        assert_eq!(surfaces("'quoted'"), ["'", "quoted", "'"]);
    }

    #[test]
    fn spans_point_into_text() {
        let text = "Well… héllo:) there!!";
        for t in tokenize(text, &Lexicon::builtin()) {
            assert_eq!(&text[t.span.clone()], t.surface);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn spans_tile_non_whitespace(text in "[a-zA-Z0-9 .,!?:;()'\\-\\[\\]]{0,60}") {
                let toks = tokenize(&text, &Lexicon::builtin());
                let mut last = 0;
                for t in &toks {
                    prop_assert!(t.span.start >= last);
                    prop_assert!(text[last..t.span.start].chars().all(char::is_whitespace));
                    prop_assert_eq!(&text[t.span.clone()], t.surface.as_str());
                    prop_assert!(!t.surface.is_empty());
                    last = t.span.end;
                }
                prop_assert!(text[last..].chars().all(char::is_whitespace));
                prop_assert_eq!(&toks, &tokenize(&text, &Lexicon::builtin()));
            }
        }
    }
}
