//! Document model for multilingual markdown and its canonical writer.

use std::fmt;

use serde::{Deserialize, Serialize};

pub type InlineSeq = Vec<Inline>;

/// Inline content of a paragraph or heading segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Inline {
    Text {
        text: String,
    },
    Strong {
        children: InlineSeq,
    },
    Emph {
        children: InlineSeq,
    },
    /// Coreference annotation `[[primary|expression]]`; the short form
    /// `[[term]]` carries the primary as its own expression.
    Coref {
        primary: String,
        expression: String,
    },
    /// Citation marker `{{ref|@id}}`, or `{{ref|[[id]]}}` when the id is a
    /// coreference resolvable against the knowledge base.
    RefMark {
        ref_id: String,
        kb_resolvable: bool,
    },
    /// Unknown inline template, preserved verbatim.
    Template {
        name: String,
        args: Vec<String>,
    },
}

/// A block of the document. Blocks are separated by blank lines in the text
/// form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Block {
    /// Parallel paragraphs, one per document language, in header order.
    Multi { paragraphs: Vec<InlineSeq> },
    /// A language-invariant paragraph.
    Mono { paragraph: InlineSeq },
    /// Heading with one segment (language-invariant) or one per language.
    Heading { level: u8, segments: Vec<InlineSeq> },
    /// Verbatim bibliographic payload from `{{ref-citation|<format>|...}}`.
    RefCitation { format: String, payload: String },
    /// Unknown block-level template, preserved verbatim.
    Template { name: String, args: Vec<String> },
}

/// A parsed multilingual markdown document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlmdDocument {
    /// Language codes from the header; the first is the primary language.
    pub langs: Vec<String>,
    pub blocks: Vec<Block>,
}

/// The four bilingual display modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DisplayMode {
    ZhEn,
    EnZh,
    Zh,
    En,
}

impl DisplayMode {
    /// Languages shown by this mode, in display order.
    pub fn langs(self) -> &'static [&'static str] {
        match self {
            DisplayMode::ZhEn => &["zh", "en"],
            DisplayMode::EnZh => &["en", "zh"],
            DisplayMode::Zh => &["zh"],
            DisplayMode::En => &["en"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DisplayMode::ZhEn => "zh-en",
            DisplayMode::EnZh => "en-zh",
            DisplayMode::Zh => "zh",
            DisplayMode::En => "en",
        }
    }
}

impl std::str::FromStr for DisplayMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zh-en" => Ok(DisplayMode::ZhEn),
            "en-zh" => Ok(DisplayMode::EnZh),
            "zh" => Ok(DisplayMode::Zh),
            "en" => Ok(DisplayMode::En),
            other => Err(format!("unknown display mode {other:?}")),
        }
    }
}

impl fmt::Display for DisplayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn write_inline(out: &mut String, inline: &Inline) {
    match inline {
        Inline::Text { text } => out.push_str(text),
        Inline::Strong { children } => {
            out.push_str("**");
            write_inline_seq(out, children);
            out.push_str("**");
        }
        Inline::Emph { children } => {
            out.push('*');
            write_inline_seq(out, children);
            out.push('*');
        }
        Inline::Coref { primary, expression } => {
            out.push_str("[[");
            out.push_str(primary);
            if expression != primary {
                out.push('|');
                out.push_str(expression);
            }
            out.push_str("]]");
        }
        Inline::RefMark { ref_id, kb_resolvable } => {
            if *kb_resolvable {
                out.push_str("{{ref|[[");
                out.push_str(ref_id);
                out.push_str("]]}}");
            } else {
                out.push_str("{{ref|@");
                out.push_str(ref_id);
                out.push_str("}}");
            }
        }
        Inline::Template { name, args } => {
            out.push_str("{{");
            out.push_str(name);
            for arg in args {
                out.push('|');
                out.push_str(arg);
            }
            out.push_str("}}");
        }
    }
}

fn write_inline_seq(out: &mut String, seq: &InlineSeq) {
    for inline in seq {
        write_inline(out, inline);
    }
}

/// Serializes an inline sequence back to markup text.
pub fn inline_seq_to_string(seq: &InlineSeq) -> String {
    let mut out = String::new();
    write_inline_seq(&mut out, seq);
    out
}

/// Plain text content of an inline sequence: coreferences contribute their
/// expression, citation markers and templates contribute nothing.
pub fn inline_seq_plain_text(seq: &InlineSeq) -> String {
    fn walk(out: &mut String, seq: &InlineSeq) {
        for inline in seq {
            match inline {
                Inline::Text { text } => out.push_str(text),
                Inline::Strong { children } | Inline::Emph { children } => walk(out, children),
                Inline::Coref { expression, .. } => out.push_str(expression),
                Inline::RefMark { .. } | Inline::Template { .. } => {}
            }
        }
    }
    let mut out = String::new();
    walk(&mut out, seq);
    out
}

/// Writes the document in its canonical text form: header line, blank-line
/// separated blocks, one line per parallel paragraph, no trailing newline.
pub fn serialize(doc: &MlmdDocument) -> String {
    let mut out = String::new();
    out.push_str("{{langs|");
    out.push_str(&doc.langs.join("|"));
    out.push_str("}}");

    for block in &doc.blocks {
        out.push_str("\n\n");
        match block {
            Block::Multi { paragraphs } => {
                let lines: Vec<String> = paragraphs.iter().map(inline_seq_to_string).collect();
                out.push_str(&lines.join("\n"));
            }
            Block::Mono { paragraph } => out.push_str(&inline_seq_to_string(paragraph)),
            Block::Heading { level, segments } => {
                for _ in 0..*level {
                    out.push('#');
                }
                out.push(' ');
                let rendered: Vec<String> = segments.iter().map(inline_seq_to_string).collect();
                out.push_str(&rendered.join(" | "));
            }
            Block::RefCitation { format, payload } => {
                out.push_str("{{ref-citation|");
                out.push_str(format);
                out.push('|');
                out.push_str(payload);
                out.push_str("}}");
            }
            Block::Template { name, args } => {
                out.push_str("{{");
                out.push_str(name);
                for arg in args {
                    out.push('|');
                    out.push_str(arg);
                }
                out.push_str("}}");
            }
        }
    }
    out
}
