//! Tokenization shared by the full-text index, the embedder, and term
//! detection: longest-match dictionary segmentation for CJK runs with
//! per-character fallback, whitespace/punctuation splitting for Latin text.

use std::collections::BTreeSet;
use std::io::{self, BufRead};
use std::path::Path;

/// A token with its byte offset in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
}

pub(crate) fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3400..=0x4DBF | 0x4E00..=0x9FFF | 0xF900..=0xFAFF | 0x20000..=0x2A6DF)
}

/// Dictionary tokenizer over a lexicon of known tokens.
#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    lexicon: BTreeSet<String>,
    max_chars: usize,
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_lexicon<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut tokenizer = Self::new();
        for token in tokens {
            tokenizer.add_token(token.into());
        }
        tokenizer
    }

    /// Reads a lexicon file: one token per line, `#` comments allowed.
    pub fn from_lexicon_file(path: impl AsRef<Path>) -> io::Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut tokenizer = Self::new();
        for line in io::BufReader::new(file).lines() {
            let line = line?;
            let token = line.trim();
            if !token.is_empty() && !token.starts_with('#') {
                tokenizer.add_token(token.to_string());
            }
        }
        Ok(tokenizer)
    }

    pub fn add_token(&mut self, token: String) {
        self.max_chars = self.max_chars.max(token.chars().count());
        self.lexicon.insert(token);
    }

    pub fn lexicon_len(&self) -> usize {
        self.lexicon.len()
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (start, c) = chars[i];
            if is_cjk(c) {
                let mut matched_len = 1;
                let longest = self.max_chars.min(chars.len() - i);
                for len in (2..=longest).rev() {
                    let end = if i + len < chars.len() {
                        chars[i + len].0
                    } else {
                        text.len()
                    };
                    if self.lexicon.contains(&text[start..end]) {
                        matched_len = len;
                        break;
                    }
                }
                let end = if i + matched_len < chars.len() {
                    chars[i + matched_len].0
                } else {
                    text.len()
                };
                tokens.push(Token {
                    text: text[start..end].to_string(),
                    start,
                });
                i += matched_len;
            } else if c.is_alphanumeric() {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_alphanumeric() && !is_cjk(chars[j].1) {
                    j += 1;
                }
                let end = if j < chars.len() { chars[j].0 } else { text.len() };
                tokens.push(Token {
                    text: text[start..end].to_lowercase(),
                    start,
                });
                i = j;
            } else {
                i += 1;
            }
        }
        tokens
    }

    /// Token texts only.
    pub fn token_texts(&self, text: &str) -> Vec<String> {
        self.tokenize(text).into_iter().map(|t| t.text).collect()
    }
}
