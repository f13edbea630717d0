use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::syntax::{Chunk, ChunkKind, Sentence, Tag, BE_FORMS, DO_FORMS, HAVE_FORMS};

/// The 17 classic case-frame templates plus four token-bigram templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TemplateId {
    /// `<subj> PassVP`
    SubjPassVp,
    /// `<subj> ActVP`
    SubjActVp,
    /// `<subj> ActVP Dobj`
    SubjActVpDobj,
    /// `<subj> ActInfVP`
    SubjActInfVp,
    /// `<subj> PassInfVP`
    SubjPassInfVp,
    /// `<subj> AuxVP Dobj`
    SubjAuxVpDobj,
    /// `<subj> AuxVP Adj`
    SubjAuxVpAdj,
    /// `ActVP <dobj>`
    ActVpDobj,
    /// `InfVP <dobj>`
    InfVpDobj,
    /// `ActInfVP <dobj>`
    ActInfVpDobj,
    /// `PassInfVP <dobj>`
    PassInfVpDobj,
    /// `Subj AuxVP <dobj>`
    SubjNounAuxVpDobj,
    /// `NP Prep <np>`
    NpPrepNp,
    /// `ActVP Prep <np>`
    ActVpPrepNp,
    /// `PassVP Prep <np>`
    PassVpPrepNp,
    /// `InfVP Prep <np>`
    InfVpPrepNp,
    /// `<possessive> NP`
    PossessiveNp,
    AdjNoun,
    AdvAdj,
    AdjAdj,
    AdvAdv,
}

impl TemplateId {
    pub const ALL: [TemplateId; 21] = [
        TemplateId::SubjPassVp,
        TemplateId::SubjActVp,
        TemplateId::SubjActVpDobj,
        TemplateId::SubjActInfVp,
        TemplateId::SubjPassInfVp,
        TemplateId::SubjAuxVpDobj,
        TemplateId::SubjAuxVpAdj,
        TemplateId::ActVpDobj,
        TemplateId::InfVpDobj,
        TemplateId::ActInfVpDobj,
        TemplateId::PassInfVpDobj,
        TemplateId::SubjNounAuxVpDobj,
        TemplateId::NpPrepNp,
        TemplateId::ActVpPrepNp,
        TemplateId::PassVpPrepNp,
        TemplateId::InfVpPrepNp,
        TemplateId::PossessiveNp,
        TemplateId::AdjNoun,
        TemplateId::AdvAdj,
        TemplateId::AdjAdj,
        TemplateId::AdvAdv,
    ];

    /// Identifier used in TSV files.
    pub fn as_str(self) -> &'static str {
        match self {
            TemplateId::SubjPassVp => "SUBJ_PASSVP",
            TemplateId::SubjActVp => "SUBJ_ACTVP",
            TemplateId::SubjActVpDobj => "SUBJ_ACTVP_DOBJ",
            TemplateId::SubjActInfVp => "SUBJ_ACTINFVP",
            TemplateId::SubjPassInfVp => "SUBJ_PASSINFVP",
            TemplateId::SubjAuxVpDobj => "SUBJ_AUXVP_DOBJ",
            TemplateId::SubjAuxVpAdj => "SUBJ_AUXVP_ADJ",
            TemplateId::ActVpDobj => "ACTVP_DOBJ",
            TemplateId::InfVpDobj => "INFVP_DOBJ",
            TemplateId::ActInfVpDobj => "ACTINFVP_DOBJ",
            TemplateId::PassInfVpDobj => "PASSINFVP_DOBJ",
            TemplateId::SubjNounAuxVpDobj => "SUBJNOUN_AUXVP_DOBJ",
            TemplateId::NpPrepNp => "NP_PREP_NP",
            TemplateId::ActVpPrepNp => "ACTVP_PREP_NP",
            TemplateId::PassVpPrepNp => "PASSVP_PREP_NP",
            TemplateId::InfVpPrepNp => "INFVP_PREP_NP",
            TemplateId::PossessiveNp => "POSSESSIVE_NP",
            TemplateId::AdjNoun => "ADJ_NOUN",
            TemplateId::AdvAdj => "ADV_ADJ",
            TemplateId::AdjAdj => "ADJ_ADJ",
            TemplateId::AdvAdv => "ADV_ADV",
        }
    }

    /// Human-readable template form used in reports.
    pub fn display_form(self) -> &'static str {
        match self {
            TemplateId::SubjPassVp => "<subj> PassVP",
            TemplateId::SubjActVp => "<subj> ActVP",
            TemplateId::SubjActVpDobj => "<subj> ActVP Dobj",
            TemplateId::SubjActInfVp => "<subj> ActInfVP",
            TemplateId::SubjPassInfVp => "<subj> PassInfVP",
            TemplateId::SubjAuxVpDobj => "<subj> AuxVP Dobj",
            TemplateId::SubjAuxVpAdj => "<subj> AuxVP Adj",
            TemplateId::ActVpDobj => "ActVP <dobj>",
            TemplateId::InfVpDobj => "InfVP <dobj>",
            TemplateId::ActInfVpDobj => "ActInfVP <dobj>",
            TemplateId::PassInfVpDobj => "PassInfVP <dobj>",
            TemplateId::SubjNounAuxVpDobj => "Subj AuxVP <dobj>",
            TemplateId::NpPrepNp => "NP Prep <np>",
            TemplateId::ActVpPrepNp => "ActVP Prep <np>",
            TemplateId::PassVpPrepNp => "PassVP Prep <np>",
            TemplateId::InfVpPrepNp => "InfVP Prep <np>",
            TemplateId::PossessiveNp => "<possessive> NP",
            TemplateId::AdjNoun => "Adj Noun",
            TemplateId::AdvAdj => "Adv Adj",
            TemplateId::AdjAdj => "Adj Adj",
            TemplateId::AdvAdv => "Adv Adv",
        }
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown template `{s}`"))
    }
}

/// A template instantiated with its lowercased lexical anchor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LexicoSyntacticPattern {
    pub template: TemplateId,
    pub anchor: String,
}

impl LexicoSyntacticPattern {
    pub fn new(template: TemplateId, anchor: impl Into<String>) -> Self {
        LexicoSyntacticPattern {
            template,
            anchor: anchor.into(),
        }
    }
}

impl fmt::Display for LexicoSyntacticPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.template.display_form(), self.anchor.to_uppercase())
    }
}

/// Which templates are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateConfig {
    /// Adverb-adverb bigrams ("ah yes", "then again").
    pub adv_adv: bool,
}

impl Default for TemplateConfig {
    fn default() -> Self {
        TemplateConfig { adv_adv: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VpClass {
    Active,
    Passive,
    /// be/have used as the main verb
    Aux,
    /// modal with no main verb
    Bare,
}

fn classify(s: &Sentence, c: &Chunk) -> VpClass {
    if c.is_passive() {
        return VpClass::Passive;
    }
    let head = &s.tokens[c.head];
    if head.tag == Tag::Aux {
        let w = head.lower.as_str();
        if BE_FORMS.contains(&w) || HAVE_FORMS.contains(&w) {
            return VpClass::Aux;
        }
        if DO_FORMS.contains(&w) {
            return VpClass::Active;
        }
        return VpClass::Bare;
    }
    VpClass::Active
}

fn adjacent(s: &Sentence, a: &Chunk, b: &Chunk) -> bool {
    a.span.end <= b.span.start && s.tokens[a.span.end..b.span.start].iter().all(|t| t.tag == Tag::Adv)
}

/// Gerund VP such as "missing the point" filling a prepositional object slot.
fn is_gerund(s: &Sentence, c: &Chunk) -> bool {
    c.is_vp() && {
        let first = &s.tokens[c.span.start];
        first.tag == Tag::Verb && first.lower.ends_with("ing")
    }
}

/// Instantiates every active template over one chunked sentence. Each match
/// site yields one pattern, in left-to-right order.
pub fn instantiate_templates(s: &Sentence, config: TemplateConfig) -> Vec<LexicoSyntacticPattern> {
    let mut out = Vec::new();
    let chunks = &s.chunks;
    let word = |i: usize| s.tokens[i].lower.as_str();
    let mut emit = |t: TemplateId, anchor: String| out.push(LexicoSyntacticPattern::new(t, anchor));

    let next_adjacent = |ci: usize| -> Option<&Chunk> {
        chunks.get(ci + 1).filter(|n| adjacent(s, &chunks[ci], n))
    };
    // Prep following chunk ci, plus its NP (or gerund) object.
    let prep_object = |ci: usize| -> Option<usize> {
        let pp = chunks.get(ci + 1).filter(|n| n.kind == ChunkKind::PP && adjacent(s, &chunks[ci], n))?;
        let obj = chunks
            .get(ci + 2)
            .filter(|o| adjacent(s, pp, o) && (o.kind == ChunkKind::NP || is_gerund(s, o)))?;
        let _ = obj;
        Some(pp.head)
    };

    for (ci, c) in chunks.iter().enumerate() {
        match c.kind {
            ChunkKind::VP => {
                let class = classify(s, c);
                let head = word(c.head);
                let subj = ci
                    .checked_sub(1)
                    .map(|p| &chunks[p])
                    .filter(|p| p.kind == ChunkKind::NP && adjacent(s, p, c));
                let next = next_adjacent(ci);
                let dobj = next.filter(|n| n.kind == ChunkKind::NP);
                let inf = next.filter(|n| n.is_infinitive());
                let inf_dobj = inf.and_then(|w| {
                    let wi = ci + 1;
                    next_adjacent(wi)
                        .filter(|o| o.kind == ChunkKind::NP)
                        .map(|_| word(w.head))
                });
                let prep = prep_object(ci);

                if c.is_infinitive() {
                    match class {
                        VpClass::Passive => {
                            if let Some(p) = prep {
                                emit(TemplateId::PassVpPrepNp, format!("{head} {}", word(p)));
                            }
                        }
                        VpClass::Bare => {}
                        _ => {
                            if dobj.is_some() {
                                emit(TemplateId::InfVpDobj, head.to_string());
                            }
                            if let Some(p) = prep {
                                emit(TemplateId::InfVpPrepNp, format!("{head} {}", word(p)));
                            }
                        }
                    }
                    continue;
                }

                // "have to prove" behaves like an active verb before an infinitive
                let inf_class = if class == VpClass::Aux && HAVE_FORMS.contains(&head) {
                    VpClass::Active
                } else {
                    class
                };

                if let Some(sj) = subj {
                    match class {
                        VpClass::Passive => emit(TemplateId::SubjPassVp, head.to_string()),
                        VpClass::Active => {
                            emit(TemplateId::SubjActVp, head.to_string());
                            if let Some(o) = dobj {
                                emit(TemplateId::SubjActVpDobj, format!("{head} {}", word(o.head)));
                            }
                        }
                        VpClass::Aux => {
                            if let Some(o) = dobj {
                                emit(TemplateId::SubjAuxVpDobj, format!("{head} {}", word(o.head)));
                                if s.tokens[sj.head].tag == Tag::Noun {
                                    emit(
                                        TemplateId::SubjNounAuxVpDobj,
                                        format!("{} {head}", word(sj.head)),
                                    );
                                }
                            }
                            let a = (c.span.end..s.tokens.len()).find(|&k| s.tokens[k].tag != Tag::Adv);
                            if let Some(a) = a {
                                let in_chunk = chunks.iter().any(|k| k.span.contains(&a));
                                if s.tokens[a].tag == Tag::Adj && !in_chunk {
                                    emit(TemplateId::SubjAuxVpAdj, format!("{head} {}", word(a)));
                                }
                            }
                        }
                        VpClass::Bare => {}
                    }
                    if let Some(w) = inf {
                        match inf_class {
                            VpClass::Active => emit(
                                TemplateId::SubjActInfVp,
                                format!("{head} to {}", word(w.head)),
                            ),
                            VpClass::Passive => emit(
                                TemplateId::SubjPassInfVp,
                                format!("{head} to {}", word(w.head)),
                            ),
                            _ => {}
                        }
                    }
                }

                if class == VpClass::Active && dobj.is_some() {
                    emit(TemplateId::ActVpDobj, head.to_string());
                }
                if let Some(w) = inf_dobj {
                    match inf_class {
                        VpClass::Active => emit(TemplateId::ActInfVpDobj, format!("{head} to {w}")),
                        VpClass::Passive => emit(TemplateId::PassInfVpDobj, format!("{head} to {w}")),
                        _ => {}
                    }
                }
                if let Some(p) = prep {
                    match class {
                        VpClass::Active => emit(TemplateId::ActVpPrepNp, format!("{head} {}", word(p))),
                        VpClass::Passive => emit(TemplateId::PassVpPrepNp, format!("{head} {}", word(p))),
                        _ => {}
                    }
                }
            }
            ChunkKind::NP => {
                if let Some(p) = prep_object(ci) {
                    emit(TemplateId::NpPrepNp, format!("{} {}", word(c.head), word(p)));
                }
                let first = c.span.start;
                if s.tokens[first].tag == Tag::Poss && c.head != first {
                    emit(TemplateId::PossessiveNp, format!("{} {}", word(first), word(c.head)));
                }
            }
            ChunkKind::PP => {}
        }
    }

    for pair in s.tokens.windows(2) {
        let template = match (pair[0].tag, pair[1].tag) {
            (Tag::Adj, Tag::Noun) => TemplateId::AdjNoun,
            (Tag::Adv, Tag::Adj) => TemplateId::AdvAdj,
            (Tag::Adj, Tag::Adj) => TemplateId::AdjAdj,
            (Tag::Adv, Tag::Adv) if config.adv_adv => TemplateId::AdvAdv,
            _ => continue,
        };
        emit(template, format!("{} {}", pair[0].lower, pair[1].lower));
    }
    out
}
