//! Glossary-constrained translation: detect standardizable terms, build an
//! annotated dictionary, obtain the translation from a pluggable backend,
//! and parse the annotated result into highlight/tooltip spans.

mod backend;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{KbError, KnowledgeBase};

pub use backend::{BackendRequest, Exemplar, IdentityBackend, PhraseTableBackend, TranslationBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    ZhEn,
    EnZh,
}

impl Direction {
    pub fn source_lang(self) -> &'static str {
        match self {
            Direction::ZhEn => "zh",
            Direction::EnZh => "en",
        }
    }

    pub fn target_lang(self) -> &'static str {
        match self {
            Direction::ZhEn => "en",
            Direction::EnZh => "zh",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::ZhEn => "zh-en",
            Direction::EnZh => "en-zh",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zh-en" => Ok(Direction::ZhEn),
            "en-zh" => Ok(Direction::EnZh),
            other => Err(format!("unknown translation direction {other:?}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum NmtCptError {
    #[error("translation text must not be empty")]
    EmptyText,
    #[error("user glossary phrases must not be empty")]
    EmptyGlossaryPhrase,
    #[error("primary term {primary:?} has no glossary rendering in language {lang:?}")]
    MissingGlossaryRendering { primary: String, lang: String },
    #[error("translation backend failed: {0}")]
    Backend(String),
    #[error(
        "backend violated the annotation contract for {source_phrase:?}: expected {expected} \
         occurrence(s) of its annotation, found {found}"
    )]
    ContractViolation {
        source_phrase: String,
        expected: usize,
        found: usize,
    },
    #[error("unbalanced [[ ]] annotation in translation output")]
    UnbalancedAnnotation,
    #[error(transparent)]
    Kb(#[from] KbError),
}

/// A translation request: source text, direction, and the ordered
/// user-customized glossary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRequest {
    pub text: String,
    pub direction: Direction,
    pub user_glossary: Vec<(String, String)>,
}

/// One dictionary entry forwarded to the backend: a source phrase and the
/// annotation that must replace it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictEntry {
    pub source: String,
    pub annotation: String,
    pub from_user_glossary: bool,
}

/// A detected knowledge-base term occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermMatch {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub term: String,
    pub primary: String,
}

/// A typed region of the parsed translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Span {
    NmmStandardized {
        text: String,
        primary: String,
        link: String,
    },
    UserGlossary {
        text: String,
    },
    Plain {
        text: String,
    },
}

impl Span {
    pub fn text(&self) -> &str {
        match self {
            Span::NmmStandardized { text, .. } | Span::UserGlossary { text } | Span::Plain { text } => {
                text
            }
        }
    }
}

/// The annotated translation plus its span decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedTranslation {
    pub mlmd_text: String,
    pub spans: Vec<Span>,
}

impl AnnotatedTranslation {
    /// Plain-text translation: annotations replaced by their renderings.
    pub fn plain_text(&self) -> String {
        self.spans.iter().map(Span::text).collect()
    }
}

fn matches_at(text: &str, pos: usize, source: &str) -> bool {
    text.len() >= pos + source.len()
        && text.as_bytes()[pos..pos + source.len()].eq_ignore_ascii_case(source.as_bytes())
}

/// Detects standardizable terms: greedy longest match over token start
/// positions against the relation graph's term set (ASCII case-insensitive),
/// each match resolved to its primary. Overlaps resolve in favor of the
/// longer, then leftmost, match.
pub fn detect_terms(text: &str, kb: &KnowledgeBase) -> Result<Vec<TermMatch>, KbError> {
    if kb.resolution().is_none() {
        return Err(KbError::IndexNotBuilt);
    }
    let mut terms: Vec<&str> = kb.resolvable_terms().collect();
    terms.sort_by(|a, b| {
        b.chars()
            .count()
            .cmp(&a.chars().count())
            .then_with(|| a.cmp(b))
    });

    let mut matches = Vec::new();
    let mut covered_until = 0;
    for token in kb.tokenizer().tokenize(text) {
        if token.start < covered_until {
            continue;
        }
        if let Some(term) = terms.iter().find(|t| matches_at(text, token.start, t)) {
            let end = token.start + term.len();
            let primary = kb
                .resolve_term(term)?
                .expect("resolvable terms resolve")
                .to_string();
            matches.push(TermMatch {
                start: token.start,
                end,
                surface: text[token.start..end].to_string(),
                term: term.to_string(),
                primary,
            });
            covered_until = end;
        }
    }
    Ok(matches)
}

/// Builds the ordered annotation dictionary: detected terms map to
/// `[[primary | rendering]]` with the target-language glossary rendering,
/// user glossary pairs map to `[[target]]`.
pub fn build_dictionary(
    matches: &[TermMatch],
    user_glossary: &[(String, String)],
    target_lang: &str,
    kb: &KnowledgeBase,
) -> Result<Vec<DictEntry>, NmtCptError> {
    let mut entries: Vec<DictEntry> = Vec::new();
    for m in matches {
        if entries.iter().any(|e| e.source == m.term) {
            continue;
        }
        let rendering = kb
            .glossary_entry(&m.primary)
            .and_then(|g| g.rendering(target_lang).map(str::to_string))
            .ok_or_else(|| NmtCptError::MissingGlossaryRendering {
                primary: m.primary.clone(),
                lang: target_lang.to_string(),
            })?;
        entries.push(DictEntry {
            source: m.term.clone(),
            annotation: format!("[[{} | {}]]", m.primary, rendering),
            from_user_glossary: false,
        });
    }
    for (source, target) in user_glossary {
        entries.push(DictEntry {
            source: source.clone(),
            annotation: format!("[[{target}]]"),
            from_user_glossary: true,
        });
    }
    Ok(entries)
}

/// A segmentation of the source text by dictionary entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment<'a> {
    Entry(usize),
    Literal(&'a str),
}

#[derive(Debug, Clone, Copy)]
struct Claim {
    start: usize,
    end: usize,
    entry: usize,
}

fn claim_pass(text: &str, entries: &[DictEntry], user_pass: bool, claims: &mut Vec<Claim>) {
    let mut order: Vec<usize> = (0..entries.len())
        .filter(|&i| entries[i].from_user_glossary == user_pass)
        .collect();
    order.sort_by(|&a, &b| {
        entries[b]
            .source
            .chars()
            .count()
            .cmp(&entries[a].source.chars().count())
            .then_with(|| a.cmp(&b))
    });
    if order.is_empty() {
        return;
    }

    let mut pos = 0;
    while pos < text.len() {
        if let Some(claim) = claims.iter().find(|c| c.start <= pos && pos < c.end) {
            pos = claim.end;
            continue;
        }
        let hit = order.iter().copied().find(|&idx| {
            let source = &entries[idx].source;
            matches_at(text, pos, source)
                && !claims
                    .iter()
                    .any(|c| c.start < pos + source.len() && pos < c.end)
        });
        match hit {
            Some(idx) => {
                let end = pos + entries[idx].source.len();
                claims.push(Claim {
                    start: pos,
                    end,
                    entry: idx,
                });
                pos = end;
            }
            None => {
                pos += text[pos..].chars().next().map_or(1, char::len_utf8);
            }
        }
    }
}

/// Splits the text into dictionary-entry occurrences and literal gaps.
/// User-glossary entries claim their occurrences first (user intent wins on
/// overlap); within a pass the longer, then leftmost, source wins. Backends
/// and the annotation-preservation check share this segmentation.
pub fn segment_by_dictionary<'a>(text: &'a str, entries: &[DictEntry]) -> Vec<Segment<'a>> {
    let mut claims = Vec::new();
    claim_pass(text, entries, true, &mut claims);
    claim_pass(text, entries, false, &mut claims);
    claims.sort_by_key(|c| c.start);

    let mut segments = Vec::new();
    let mut pos = 0;
    for claim in &claims {
        if claim.start > pos {
            segments.push(Segment::Literal(&text[pos..claim.start]));
        }
        segments.push(Segment::Entry(claim.entry));
        pos = claim.end;
    }
    if pos < text.len() {
        segments.push(Segment::Literal(&text[pos..]));
    }
    segments
}

fn expected_occurrences(text: &str, entries: &[DictEntry]) -> Vec<usize> {
    let mut counts = vec![0usize; entries.len()];
    for segment in segment_by_dictionary(text, entries) {
        if let Segment::Entry(idx) = segment {
            counts[idx] += 1;
        }
    }
    counts
}

/// Parses an annotated translation into spans: `[[p | r]]` becomes a
/// standardized span linking to `/knowledge/<p>`, `[[r]]` a user-glossary
/// span, and everything else plain text.
pub fn parse_translation(mlmd_text: &str) -> Result<Vec<Span>, NmtCptError> {
    let mut spans = Vec::new();
    let mut pos = 0;
    while let Some(open) = mlmd_text[pos..].find("[[") {
        let open = pos + open;
        if open > pos {
            spans.push(Span::Plain {
                text: mlmd_text[pos..open].to_string(),
            });
        }
        let close = mlmd_text[open + 2..]
            .find("]]")
            .ok_or(NmtCptError::UnbalancedAnnotation)?
            + open
            + 2;
        let inner = &mlmd_text[open + 2..close];
        match inner.split_once('|') {
            Some((primary, rendering)) => {
                let primary = primary.trim().to_string();
                spans.push(Span::NmmStandardized {
                    text: rendering.trim().to_string(),
                    link: format!("/knowledge/{primary}"),
                    primary,
                });
            }
            None => spans.push(Span::UserGlossary {
                text: inner.trim().to_string(),
            }),
        }
        pos = close + 2;
    }
    if pos < mlmd_text.len() {
        spans.push(Span::Plain {
            text: mlmd_text[pos..].to_string(),
        });
    }
    Ok(spans)
}

/// Runs the whole pipeline: term detection, dictionary construction, backend
/// translation, annotation-preservation verification, and span parsing.
pub fn translate(
    request: &TranslationRequest,
    kb: &KnowledgeBase,
    backend: &dyn TranslationBackend,
) -> Result<AnnotatedTranslation, NmtCptError> {
    if request.text.is_empty() {
        return Err(NmtCptError::EmptyText);
    }
    if request.user_glossary.iter().any(|(s, t)| s.is_empty() || t.is_empty()) {
        return Err(NmtCptError::EmptyGlossaryPhrase);
    }

    let matches = detect_terms(&request.text, kb)?;
    let entries = build_dictionary(
        &matches,
        &request.user_glossary,
        request.direction.target_lang(),
        kb,
    )?;

    let backend_request = BackendRequest {
        text: &request.text,
        direction: request.direction,
        entries: &entries,
        exemplars: &[],
    };
    let output = backend
        .translate(&backend_request)
        .map_err(NmtCptError::Backend)?;

    let expected = expected_occurrences(&request.text, &entries);
    for (entry, expected) in entries.iter().zip(expected) {
        let found = output.matches(entry.annotation.as_str()).count();
        if found != expected {
            return Err(NmtCptError::ContractViolation {
                source: entry.source.clone(),
                expected,
                found,
            });
        }
    }

    let spans = parse_translation(&output)?;
    Ok(AnnotatedTranslation {
        mlmd_text: output,
        spans,
    })
}
