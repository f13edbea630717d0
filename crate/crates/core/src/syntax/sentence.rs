use super::{Sentence, Tag, Token};

/// Splits a token stream into sentences.
///
/// A boundary follows a punctuation run containing `.`, `!` or `?` when the
/// next token is separated by whitespace and starts with an uppercase letter
/// or a non-letter. Emoticons directly after such a run stay with the
/// sentence they close. A blank line is always a boundary. Abbreviations are
/// word tokens, so they never end a sentence.
pub fn split_sentences(text: &str, tokens: Vec<Token>) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut closing = false;

    let mut iter = tokens.into_iter().peekable();
    while let Some(tok) = iter.next() {
        let terminal = tok.tag == Tag::PunctRun && tok.surface.contains(['.', '!', '?']);
        if terminal {
            closing = true;
        } else if tok.tag != Tag::Emoticon {
            closing = false;
        }
        let end = tok.span.end;
        current.push(tok);

        let Some(next) = iter.peek() else { break };
        let gap = &text[end..next.span.start];
        let blank_line = gap.matches('\n').count() >= 2;
        let starts_new = next
            .surface
            .chars()
            .next()
            .is_some_and(|c| c.is_uppercase() || !c.is_alphabetic());
        let emoticon_tail = next.tag == Tag::Emoticon;
        if blank_line || (closing && !gap.is_empty() && starts_new && !emoticon_tail) {
            sentences.push(Sentence::new(std::mem::take(&mut current)));
            closing = false;
        }
    }
    if !current.is_empty() {
        sentences.push(Sentence::new(current));
    }
    sentences
}
