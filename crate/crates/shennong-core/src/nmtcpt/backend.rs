//! Translation backends. The pipeline hands a backend the source text, the
//! direction, and the formatted annotation dictionary; the backend must
//! return a translation that carries every dictionary annotation verbatim.
//!
//! Two deterministic backends ship with the toolkit: a phrase-table
//! translator for offline end-to-end runs and an identity backend that only
//! substitutes the dictionary. Remote LLM backends plug in behind the same
//! trait; their prompt content is configuration, not code.

use std::io::{self, BufRead};
use std::path::Path;

use super::{segment_by_dictionary, DictEntry, Direction, Segment};

/// A few-shot exemplar forwarded to backends that prompt a remote model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exemplar {
    pub source: String,
    pub target: String,
}

/// One translation call.
#[derive(Debug)]
pub struct BackendRequest<'a> {
    pub text: &'a str,
    pub direction: Direction,
    pub entries: &'a [DictEntry],
    pub exemplars: &'a [Exemplar],
}

pub trait TranslationBackend {
    fn translate(&self, request: &BackendRequest<'_>) -> Result<String, String>;
}

/// Substitutes dictionary entries and leaves everything else verbatim.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityBackend;

impl TranslationBackend for IdentityBackend {
    fn translate(&self, request: &BackendRequest<'_>) -> Result<String, String> {
        let mut out = String::new();
        for segment in segment_by_dictionary(request.text, request.entries) {
            match segment {
                Segment::Entry(idx) => out.push_str(&request.entries[idx].annotation),
                Segment::Literal(text) => out.push_str(text),
            }
        }
        Ok(out)
    }
}

/// Deterministic offline translator: dictionary entries become their
/// annotations, the remaining segments are translated greedily against a
/// phrase table, and unknown runs pass through verbatim.
#[derive(Debug, Clone, Default)]
pub struct PhraseTableBackend {
    /// `(source, target)` pairs, longest source first.
    table: Vec<(String, String)>,
}

impl PhraseTableBackend {
    pub fn new<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut table: Vec<(String, String)> = pairs.into_iter().collect();
        table.sort_by(|a, b| {
            b.0.chars()
                .count()
                .cmp(&a.0.chars().count())
                .then_with(|| a.0.cmp(&b.0))
        });
        PhraseTableBackend { table }
    }

    /// Reads a `source<TAB>target` phrase table.
    pub fn from_file(path: impl AsRef<Path>) -> io::Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut pairs = Vec::new();
        for line in io::BufReader::new(file).lines() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((source, target)) = line.split_once('\t') else {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("phrase table line without a tab: {line:?}"),
                ));
            };
            pairs.push((source.to_string(), target.to_string()));
        }
        Ok(Self::new(pairs))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Greedy longest-match translation of one literal segment. Each phrase
    /// hit and each unknown run becomes its own piece.
    fn translate_literal(&self, literal: &str) -> Vec<String> {
        let mut pieces = Vec::new();
        let mut unknown = String::new();
        let mut pos = 0;
        while pos < literal.len() {
            let rest = &literal[pos..];
            let hit = self
                .table
                .iter()
                .find(|(source, _)| !source.is_empty() && rest.starts_with(source.as_str()));
            match hit {
                Some((source, target)) => {
                    let trimmed = unknown.trim();
                    if !trimmed.is_empty() {
                        pieces.push(trimmed.to_string());
                    }
                    unknown.clear();
                    pieces.push(target.clone());
                    pos += source.len();
                }
                None => {
                    let c = rest.chars().next().expect("non-empty rest");
                    unknown.push(c);
                    pos += c.len_utf8();
                }
            }
        }
        let trimmed = unknown.trim();
        if !trimmed.is_empty() {
            pieces.push(trimmed.to_string());
        }
        pieces
    }
}

fn attaches_left(piece: &str) -> bool {
    matches!(
        piece.chars().next(),
        Some('.' | ',' | ';' | ':' | '!' | '?' | ')')
    )
}

impl TranslationBackend for PhraseTableBackend {
    fn translate(&self, request: &BackendRequest<'_>) -> Result<String, String> {
        let mut pieces = Vec::new();
        for segment in segment_by_dictionary(request.text, request.entries) {
            match segment {
                Segment::Entry(idx) => pieces.push(request.entries[idx].annotation.clone()),
                Segment::Literal(text) => pieces.extend(self.translate_literal(text)),
            }
        }
        let out = match request.direction {
            // English output separates pieces with spaces, except before
            // attaching punctuation.
            Direction::ZhEn => {
                let mut out = String::new();
                for piece in pieces {
                    if !out.is_empty() && !attaches_left(&piece) && !out.ends_with('(') {
                        out.push(' ');
                    }
                    out.push_str(&piece);
                }
                out
            }
            Direction::EnZh => pieces.concat(),
        };
        Ok(out)
    }
}
