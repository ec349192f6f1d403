//! Pinyin lookup table and the derived generic-name / toned-pinyin operations.
//!
//! The table maps a Chinese character (or a longer phrase, which wins over
//! single characters and resolves polyphonic readings) to its toned and
//! untoned pinyin. File format: one record per line, `key<TAB>toned<TAB>untoned`,
//! where multi-character keys carry space-separated syllables.

use std::collections::BTreeMap;
use std::io::{self, BufRead};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PinyinError {
    #[error("character '{0}' is not covered by the pinyin table")]
    UnknownChar(char),
    #[error("a generic Chinese name must use two or more characters, got {0:?}")]
    TooShort(String),
    #[error("malformed pinyin table line {line}: expected key<TAB>toned<TAB>untoned")]
    TableFormat { line: usize },
    #[error("failed to read pinyin table: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
struct PinyinEntry {
    toned: Vec<String>,
    untoned: Vec<String>,
}

/// Character/phrase to pinyin lookup with longest-match segmentation.
#[derive(Debug, Clone, Default)]
pub struct PinyinTable {
    entries: BTreeMap<String, PinyinEntry>,
    max_key_chars: usize,
}

impl PinyinTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: &str, toned: &str, untoned: &str) {
        let entry = PinyinEntry {
            toned: toned.split_whitespace().map(str::to_string).collect(),
            untoned: untoned.split_whitespace().map(str::to_string).collect(),
        };
        self.max_key_chars = self.max_key_chars.max(key.chars().count());
        self.entries.insert(key.to_string(), entry);
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, PinyinError> {
        let mut table = Self::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut cols = trimmed.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(key), Some(toned), Some(untoned)) if !key.is_empty() => {
                    table.insert(key, toned, untoned);
                }
                _ => return Err(PinyinError::TableFormat { line: idx + 1 }),
            }
        }
        Ok(table)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, PinyinError> {
        let file = std::fs::File::open(path)?;
        Ok(Self::from_reader(io::BufReader::new(file))?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Segments `text` by longest table key at each position; every character
    /// must be covered.
    fn segment(&self, text: &str) -> Result<Vec<&PinyinEntry>, PinyinError> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < chars.len() {
            let mut matched = None;
            let longest = self.max_key_chars.min(chars.len() - pos);
            for len in (1..=longest).rev() {
                let candidate: String = chars[pos..pos + len].iter().collect();
                if let Some(entry) = self.entries.get(&candidate) {
                    matched = Some((entry, len));
                    break;
                }
            }
            match matched {
                Some((entry, len)) => {
                    out.push(entry);
                    pos += len;
                }
                None => return Err(PinyinError::UnknownChar(chars[pos])),
            }
        }
        Ok(out)
    }
}

/// Space-joined toned pinyin for a Chinese string, in text order.
pub fn pinyinize_toned(zh: &str, table: &PinyinTable) -> Result<String, PinyinError> {
    let mut syllables = Vec::new();
    for entry in table.segment(zh)? {
        syllables.extend(entry.toned.iter().map(String::as_str));
    }
    Ok(syllables.join(" "))
}

/// Builds an NMM Generic Name from a Chinese generic name: untoned pinyin
/// joined by hyphens, first letter capitalized, `ü` written as `v`.
pub fn make_generic_name(zh_name: &str, table: &PinyinTable) -> Result<String, PinyinError> {
    if zh_name.chars().count() < 2 {
        return Err(PinyinError::TooShort(zh_name.to_string()));
    }
    let mut syllables: Vec<String> = Vec::new();
    for entry in table.segment(zh_name)? {
        for syllable in &entry.untoned {
            syllables.push(syllable.to_lowercase().replace('ü', "v"));
        }
    }
    let mut name = syllables.join("-");
    if let Some(first) = name.get(..1) {
        let upper = first.to_uppercase();
        name.replace_range(..1, &upper);
    }
    Ok(name)
}
