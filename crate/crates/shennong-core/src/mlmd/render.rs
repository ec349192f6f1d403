//! HTML rendering in the four display modes, and annotation extraction.

use serde::{Deserialize, Serialize};

use super::ast::{Block, DisplayMode, Inline, InlineSeq, MlmdDocument};
use super::parser::MlmdError;

fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

fn escape_attr(s: &str) -> String {
    escape_text(s).replace('"', "&quot;")
}

fn render_inline_seq(seq: &InlineSeq) -> String {
    let mut out = String::new();
    for inline in seq {
        match inline {
            Inline::Text { text } => out.push_str(&escape_text(text)),
            Inline::Strong { children } => {
                out.push_str("<strong>");
                out.push_str(&render_inline_seq(children));
                out.push_str("</strong>");
            }
            Inline::Emph { children } => {
                out.push_str("<em>");
                out.push_str(&render_inline_seq(children));
                out.push_str("</em>");
            }
            Inline::Coref { primary, expression } => {
                out.push_str(&format!(
                    "<a data-coref-primary=\"{}\">{}</a>",
                    escape_attr(primary),
                    escape_text(expression)
                ));
            }
            Inline::RefMark { ref_id, .. } => {
                out.push_str(&format!(
                    "<sup data-ref-id=\"{}\">[{}]</sup>",
                    escape_attr(ref_id),
                    escape_text(ref_id)
                ));
            }
            Inline::Template { name, args } => {
                let mut src = format!("{{{{{name}");
                for arg in args {
                    src.push('|');
                    src.push_str(arg);
                }
                src.push_str("}}");
                out.push_str(&escape_text(&src));
            }
        }
    }
    out
}

/// Renders the document as an HTML fragment. Multilingual blocks emit one
/// element per mode language in mode order; language-invariant blocks appear
/// in every mode. Citation data and unknown block templates produce no
/// markup.
pub fn render_html(doc: &MlmdDocument, mode: DisplayMode) -> Result<String, MlmdError> {
    for lang in mode.langs() {
        if !doc.langs.iter().any(|l| l == lang) {
            return Err(MlmdError::LangNotInDocument {
                lang: lang.to_string(),
            });
        }
    }
    let lang_index = |lang: &str| {
        doc.langs
            .iter()
            .position(|l| l == lang)
            .expect("mode languages checked against document")
    };

    let mut elements = Vec::new();
    for block in &doc.blocks {
        match block {
            Block::Multi { paragraphs } => {
                for lang in mode.langs() {
                    let seq = &paragraphs[lang_index(lang)];
                    elements.push(format!("<p lang=\"{lang}\">{}</p>", render_inline_seq(seq)));
                }
            }
            Block::Mono { paragraph } => {
                elements.push(format!("<p>{}</p>", render_inline_seq(paragraph)));
            }
            Block::Heading { level, segments } => {
                if segments.len() == 1 {
                    elements.push(format!(
                        "<h{level}>{}</h{level}>",
                        render_inline_seq(&segments[0])
                    ));
                } else {
                    for lang in mode.langs() {
                        let seq = &segments[lang_index(lang)];
                        elements.push(format!(
                            "<h{level} lang=\"{lang}\">{}</h{level}>",
                            render_inline_seq(seq)
                        ));
                    }
                }
            }
            Block::RefCitation { .. } | Block::Template { .. } => {}
        }
    }
    Ok(elements.join("\n"))
}

/// One coreference annotation occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub primary: String,
    pub expression: String,
    /// Language of the containing paragraph; absent for language-invariant
    /// content.
    pub language: Option<String>,
    pub block_index: usize,
}

fn collect_corefs(seq: &InlineSeq, language: Option<&str>, block_index: usize, out: &mut Vec<Annotation>) {
    for inline in seq {
        match inline {
            Inline::Coref { primary, expression } => out.push(Annotation {
                primary: primary.clone(),
                expression: expression.clone(),
                language: language.map(str::to_string),
                block_index,
            }),
            Inline::Strong { children } | Inline::Emph { children } => {
                collect_corefs(children, language, block_index, out)
            }
            _ => {}
        }
    }
}

/// Extracts every coreference annotation in document order, with the
/// language inferred from the paragraph position within multilingual blocks.
pub fn extract_annotations(doc: &MlmdDocument) -> Vec<Annotation> {
    let mut out = Vec::new();
    for (block_index, block) in doc.blocks.iter().enumerate() {
        match block {
            Block::Multi { paragraphs } => {
                for (i, seq) in paragraphs.iter().enumerate() {
                    collect_corefs(seq, doc.langs.get(i).map(String::as_str), block_index, &mut out);
                }
            }
            Block::Mono { paragraph } => collect_corefs(paragraph, None, block_index, &mut out),
            Block::Heading { segments, .. } => {
                if segments.len() == 1 {
                    collect_corefs(&segments[0], None, block_index, &mut out);
                } else {
                    for (i, seq) in segments.iter().enumerate() {
                        collect_corefs(seq, doc.langs.get(i).map(String::as_str), block_index, &mut out);
                    }
                }
            }
            Block::RefCitation { .. } | Block::Template { .. } => {}
        }
    }
    out
}
