//! Parser from multilingual markdown text to the document model.

use thiserror::Error;

use super::ast::{Block, Inline, InlineSeq, MlmdDocument};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MlmdError {
    #[error("missing language header: the first line must be {{{{langs|...}}}}")]
    MissingHeader,
    #[error("malformed language header on line {line}")]
    MalformedHeader { line: usize },
    #[error("duplicate language code {lang:?} in header")]
    DuplicateLang { lang: String },
    #[error("line {line}: block has {found} paragraphs, expected 1 or {expected}")]
    ParagraphCount {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("line {line}: heading has {found} segments, expected 1 or {expected}")]
    HeadingSegments {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("unclosed comment starting on line {line}")]
    UnclosedComment { line: usize },
    #[error("line {line}: unclosed {bracket}")]
    UnclosedBracket { line: usize, bracket: &'static str },
    #[error("line {line}: coreference annotations cannot nest")]
    NestedCoref { line: usize },
    #[error("line {line}: empty coreference annotation")]
    EmptyCoref { line: usize },
    #[error("line {line}: malformed template")]
    BadTemplate { line: usize },
    #[error("display language {lang:?} is not declared by the document")]
    LangNotInDocument { lang: String },
}

/// Removes `<!-- ... -->` comments and returns trimmed, line-numbered lines.
/// A line left whitespace-only by comment removal disappears entirely; blank
/// source lines are kept as block separators.
fn strip_comments(text: &str) -> Result<Vec<(usize, String)>, MlmdError> {
    let mut out = Vec::new();
    let mut in_comment = false;
    let mut comment_start = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let was_in_comment = in_comment;
        let mut kept = String::new();
        let mut rest = raw;
        loop {
            if in_comment {
                if let Some(pos) = rest.find("-->") {
                    rest = &rest[pos + 3..];
                    in_comment = false;
                } else {
                    rest = "";
                    break;
                }
            } else if let Some(pos) = rest.find("<!--") {
                kept.push_str(&rest[..pos]);
                rest = &rest[pos + 4..];
                in_comment = true;
                comment_start = line_no;
            } else {
                kept.push_str(rest);
                break;
            }
        }
        let had_comment = was_in_comment || raw.contains("<!--");
        let kept = kept.trim();
        if had_comment && kept.is_empty() && !raw.trim().is_empty() {
            continue;
        }
        out.push((line_no, kept.to_string()));
    }
    if in_comment {
        return Err(MlmdError::UnclosedComment { line: comment_start });
    }
    Ok(out)
}

/// Splits on `|` characters that are outside `[[...]]` and `{{...}}`.
fn split_top_level_pipes(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut square = 0usize;
    let mut curly = 0usize;
    let mut start = 0;
    let mut i = 0;
    while i < s.len() {
        let rest = &s[i..];
        if rest.starts_with("[[") {
            square += 1;
            i += 2;
        } else if rest.starts_with("]]") {
            square = square.saturating_sub(1);
            i += 2;
        } else if rest.starts_with("{{") {
            curly += 1;
            i += 2;
        } else if rest.starts_with("}}") {
            curly = curly.saturating_sub(1);
            i += 2;
        } else if rest.starts_with('|') && square == 0 && curly == 0 {
            parts.push(&s[start..i]);
            start = i + 1;
            i += 1;
        } else {
            i += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Byte index just past the `}}` matching the `{{` at `open`, if any.
fn find_template_end(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = open;
    while i < s.len() {
        let rest = &s[i..];
        if rest.starts_with("{{") {
            depth += 1;
            i += 2;
        } else if rest.starts_with("}}") {
            depth = depth.checked_sub(1)?;
            i += 2;
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += rest.chars().next()?.len_utf8();
        }
    }
    None
}

fn parse_template_inline(content: &str, line: usize) -> Result<Inline, MlmdError> {
    let parts = split_top_level_pipes(content);
    let name = parts[0].to_string();
    if name.trim() == "ref" && parts.len() == 2 {
        let arg = parts[1].trim();
        if let Some(id) = arg.strip_prefix('@') {
            if !id.is_empty() {
                return Ok(Inline::RefMark {
                    ref_id: id.to_string(),
                    kb_resolvable: false,
                });
            }
        } else if let Some(inner) = arg.strip_prefix("[[").and_then(|a| a.strip_suffix("]]")) {
            let id = inner.trim();
            if !id.is_empty() {
                return Ok(Inline::RefMark {
                    ref_id: id.to_string(),
                    kb_resolvable: true,
                });
            }
        }
        return Err(MlmdError::BadTemplate { line });
    }
    Ok(Inline::Template {
        name,
        args: parts[1..].iter().map(|s| s.to_string()).collect(),
    })
}

/// Parses inline markup: emphasis, coreference annotations, citation marks,
/// and inline templates. A `*` without a matching closer stays literal text.
pub(crate) fn parse_inline(text: &str, line: usize) -> Result<InlineSeq, MlmdError> {
    let mut seq = InlineSeq::new();
    let mut literal = String::new();
    let mut i = 0;

    let flush = |literal: &mut String, seq: &mut InlineSeq| {
        if !literal.is_empty() {
            seq.push(Inline::Text {
                text: std::mem::take(literal),
            });
        }
    };

    while i < text.len() {
        let rest = &text[i..];
        if rest.starts_with("**") {
            if let Some(close) = rest[2..].find("**") {
                flush(&mut literal, &mut seq);
                let inner = &rest[2..2 + close];
                seq.push(Inline::Strong {
                    children: parse_inline(inner, line)?,
                });
                i += close + 4;
            } else {
                literal.push_str("**");
                i += 2;
            }
        } else if rest.starts_with('*') {
            if let Some(close) = rest[1..].find('*') {
                flush(&mut literal, &mut seq);
                let inner = &rest[1..1 + close];
                seq.push(Inline::Emph {
                    children: parse_inline(inner, line)?,
                });
                i += close + 2;
            } else {
                literal.push('*');
                i += 1;
            }
        } else if rest.starts_with("[[") {
            let close = rest[2..]
                .find("]]")
                .ok_or(MlmdError::UnclosedBracket { line, bracket: "[[" })?;
            let inner = &rest[2..2 + close];
            if inner.contains("[[") {
                return Err(MlmdError::NestedCoref { line });
            }
            flush(&mut literal, &mut seq);
            let parts = split_top_level_pipes(inner);
            let primary = parts[0].trim().to_string();
            if primary.is_empty() {
                return Err(MlmdError::EmptyCoref { line });
            }
            let expression = if parts.len() > 1 {
                parts[1..].join("|").trim().to_string()
            } else {
                primary.clone()
            };
            seq.push(Inline::Coref { primary, expression });
            i += close + 4;
        } else if rest.starts_with("{{") {
            let end =
                find_template_end(text, i).ok_or(MlmdError::UnclosedBracket { line, bracket: "{{" })?;
            flush(&mut literal, &mut seq);
            let content = &text[i + 2..end - 2];
            seq.push(parse_template_inline(content, line)?);
            i = end;
        } else {
            let c = rest.chars().next().expect("non-empty rest");
            literal.push(c);
            i += c.len_utf8();
        }
    }
    flush(&mut literal, &mut seq);
    Ok(seq)
}

fn parse_header(line_no: usize, line: &str) -> Result<Vec<String>, MlmdError> {
    let content = line
        .strip_prefix("{{")
        .and_then(|s| s.strip_suffix("}}"))
        .ok_or(MlmdError::MissingHeader)?;
    if find_template_end(line, 0) != Some(line.len()) {
        return Err(MlmdError::MalformedHeader { line: line_no });
    }
    let parts = split_top_level_pipes(content);
    if parts[0] != "langs" || parts.len() < 2 {
        return Err(MlmdError::MalformedHeader { line: line_no });
    }
    let mut langs = Vec::new();
    for code in &parts[1..] {
        let code = code.trim();
        if code.is_empty() {
            return Err(MlmdError::MalformedHeader { line: line_no });
        }
        if langs.iter().any(|l| l == code) {
            return Err(MlmdError::DuplicateLang {
                lang: code.to_string(),
            });
        }
        langs.push(code.to_string());
    }
    Ok(langs)
}

fn heading_level(line: &str) -> Option<(u8, &str)> {
    let hashes = line.chars().take_while(|&c| c == '#').count();
    if (1..=6).contains(&hashes) {
        line[hashes..]
            .strip_prefix(' ')
            .map(|content| (hashes as u8, content))
    } else {
        None
    }
}

fn parse_block(lines: &[(usize, String)], langs: &[String]) -> Result<Block, MlmdError> {
    let (first_line_no, first) = (&lines[0].0, lines[0].1.as_str());

    if first.starts_with("{{ref-citation|") {
        let joined = lines
            .iter()
            .map(|(_, l)| l.as_str())
            .collect::<Vec<_>>()
            .join("\n");
        let content = joined
            .strip_prefix("{{")
            .and_then(|s| s.strip_suffix("}}"))
            .ok_or(MlmdError::UnclosedBracket {
                line: *first_line_no,
                bracket: "{{",
            })?;
        let mut parts = content.splitn(3, '|');
        let (_name, format, payload) = (
            parts.next(),
            parts.next().ok_or(MlmdError::BadTemplate { line: *first_line_no })?,
            parts.next().ok_or(MlmdError::BadTemplate { line: *first_line_no })?,
        );
        return Ok(Block::RefCitation {
            format: format.to_string(),
            payload: payload.to_string(),
        });
    }

    if lines.len() == 1 {
        if let Some((level, content)) = heading_level(first) {
            let raw_segments = split_top_level_pipes(content);
            if raw_segments.len() != 1 && raw_segments.len() != langs.len() {
                return Err(MlmdError::HeadingSegments {
                    line: *first_line_no,
                    found: raw_segments.len(),
                    expected: langs.len(),
                });
            }
            let segments = raw_segments
                .iter()
                .map(|s| parse_inline(s.trim(), *first_line_no))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Block::Heading { level, segments });
        }

        if first.starts_with("{{") && find_template_end(first, 0) == Some(first.len()) {
            let content = &first[2..first.len() - 2];
            let parts = split_top_level_pipes(content);
            if parts[0].trim() != "ref" {
                return Ok(Block::Template {
                    name: parts[0].to_string(),
                    args: parts[1..].iter().map(|s| s.to_string()).collect(),
                });
            }
        }
    }

    let paragraphs = lines
        .iter()
        .map(|(line_no, text)| parse_inline(text, *line_no))
        .collect::<Result<Vec<_>, _>>()?;
    if paragraphs.len() == 1 {
        Ok(Block::Mono {
            paragraph: paragraphs.into_iter().next().expect("one paragraph"),
        })
    } else if paragraphs.len() == langs.len() {
        Ok(Block::Multi { paragraphs })
    } else {
        Err(MlmdError::ParagraphCount {
            line: *first_line_no,
            found: paragraphs.len(),
            expected: langs.len(),
        })
    }
}

/// Parses multilingual markdown text. CR-LF line endings are accepted;
/// comments are removed before block segmentation.
pub fn parse(text: &str) -> Result<MlmdDocument, MlmdError> {
    let text = text.replace("\r\n", "\n");
    let lines = strip_comments(&text)?;

    let mut iter = lines.into_iter().peekable();
    while matches!(iter.peek(), Some((_, l)) if l.is_empty()) {
        iter.next();
    }
    let (header_line, header) = iter.next().ok_or(MlmdError::MissingHeader)?;
    if !header.starts_with("{{langs") {
        return Err(MlmdError::MissingHeader);
    }
    let langs = parse_header(header_line, &header)?;

    let mut blocks = Vec::new();
    let mut current: Vec<(usize, String)> = Vec::new();
    for (line_no, line) in iter {
        if line.is_empty() {
            if !current.is_empty() {
                blocks.push(parse_block(&current, &langs)?);
                current.clear();
            }
        } else {
            current.push((line_no, line));
        }
    }
    if !current.is_empty() {
        blocks.push(parse_block(&current, &langs)?);
    }

    Ok(MlmdDocument { langs, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlmd::ast::serialize;

    fn text_of(seq: &InlineSeq) -> String {
        crate::mlmd::ast::inline_seq_plain_text(seq)
    }

    #[test]
    fn parses_hello_world() {
        let doc = parse("{{langs|zh|en}}\n\n你好，世界！\nHello, world!").unwrap();
        assert_eq!(doc.langs, ["zh", "en"]);
        assert_eq!(doc.blocks.len(), 1);
        match &doc.blocks[0] {
            Block::Multi { paragraphs } => {
                assert_eq!(text_of(&paragraphs[0]), "你好，世界！");
                assert_eq!(text_of(&paragraphs[1]), "Hello, world!");
            }
            other => panic!("expected Multi, got {other:?}"),
        }
    }

    #[test]
    fn missing_header_is_an_error() {
        assert_eq!(parse("你好，世界！\nHello!"), Err(MlmdError::MissingHeader));
    }

    #[test]
    fn duplicate_language_codes_rejected() {
        assert_eq!(
            parse("{{langs|zh|zh}}"),
            Err(MlmdError::DuplicateLang { lang: "zh".into() })
        );
    }

    #[test]
    fn classifies_multi_and_mono_blocks() {
        let doc = parse(concat!(
            "{{langs|zh|en}}\n\n",
            "这是第1个Block (Multi)中的中文段落。\n",
            "This is an English paragraph in the 1st Block (Multi).\n\n",
            "This is a language-invariant paragraph in English in the 2nd Block (Mono).\n\n",
            "这是第3个Block (Mono)中的一段中文的跨语言不变段落。\n\n",
            "这是第4个Block (Multi)中的中文段落。\n",
            "This is an English paragraph in the 4th Block (Multi).\n",
        ))
        .unwrap();
        let kinds: Vec<&str> = doc
            .blocks
            .iter()
            .map(|b| match b {
                Block::Multi { .. } => "multi",
                Block::Mono { .. } => "mono",
                _ => "other",
            })
            .collect();
        assert_eq!(kinds, ["multi", "mono", "mono", "multi"]);
    }

    #[test]
    fn paragraph_count_mismatch_is_an_error() {
        let err = parse("{{langs|zh|en}}\n\n一\n二\n三").unwrap_err();
        assert_eq!(
            err,
            MlmdError::ParagraphCount {
                line: 3,
                found: 3,
                expected: 2
            }
        );
    }

    #[test]
    fn parses_coreference_forms() {
        let doc = parse(concat!(
            "{{langs|zh|en}}\n\n",
            "[[神农]]被中国人认为是医药学的始祖。\n",
            "[[神农|Shennong]] is considered the progenitor of medicine and pharmacy by the Chinese.",
        ))
        .unwrap();
        match &doc.blocks[0] {
            Block::Multi { paragraphs } => {
                assert_eq!(
                    paragraphs[0][0],
                    Inline::Coref {
                        primary: "神农".into(),
                        expression: "神农".into()
                    }
                );
                assert_eq!(
                    paragraphs[1][0],
                    Inline::Coref {
                        primary: "神农".into(),
                        expression: "Shennong".into()
                    }
                );
            }
            other => panic!("expected Multi, got {other:?}"),
        }
    }

    #[test]
    fn coref_pipe_spacing_is_trimmed() {
        let seq = parse_inline("[[nmm-0006 | Ma-huang]]", 1).unwrap();
        assert_eq!(
            seq,
            vec![Inline::Coref {
                primary: "nmm-0006".into(),
                expression: "Ma-huang".into()
            }]
        );
    }

    #[test]
    fn nested_coref_is_rejected() {
        assert_eq!(
            parse_inline("[[a|[[b]]]]", 7),
            Err(MlmdError::NestedCoref { line: 7 })
        );
    }

    #[test]
    fn unmatched_asterisk_stays_literal() {
        let seq = parse_inline("a * b", 1).unwrap();
        assert_eq!(seq, vec![Inline::Text { text: "a * b".into() }]);
    }

    #[test]
    fn emphasis_and_strong_nest() {
        let seq = parse_inline("**bold** and *italic*", 1).unwrap();
        assert_eq!(
            seq,
            vec![
                Inline::Strong {
                    children: vec![Inline::Text { text: "bold".into() }]
                },
                Inline::Text {
                    text: " and ".into()
                },
                Inline::Emph {
                    children: vec![Inline::Text { text: "italic".into() }]
                },
            ]
        );
    }

    #[test]
    fn heading_splits_on_top_level_pipes_only() {
        let doc = parse("{{langs|zh|en}}\n\n## 二级标题 | Heading Level-2").unwrap();
        match &doc.blocks[0] {
            Block::Heading { level, segments } => {
                assert_eq!(*level, 2);
                assert_eq!(segments.len(), 2);
                assert_eq!(text_of(&segments[0]), "二级标题");
                assert_eq!(text_of(&segments[1]), "Heading Level-2");
            }
            other => panic!("expected Heading, got {other:?}"),
        }

        let piped = parse("{{langs|zh|en}}\n\n# [[甲|乙]]标题 | [[甲]] heading").unwrap();
        match &piped.blocks[0] {
            Block::Heading { segments, .. } => assert_eq!(segments.len(), 2),
            other => panic!("expected Heading, got {other:?}"),
        }
    }

    #[test]
    fn ref_mark_forms() {
        let seq = parse_inline("cited{{ref|@ai_masterbrain}} and {{ref|[[sna-ref-1]]}}", 1).unwrap();
        assert_eq!(
            seq[1],
            Inline::RefMark {
                ref_id: "ai_masterbrain".into(),
                kb_resolvable: false
            }
        );
        assert_eq!(
            seq[3],
            Inline::RefMark {
                ref_id: "sna-ref-1".into(),
                kb_resolvable: true
            }
        );
    }

    #[test]
    fn ref_citation_block_captures_payload_verbatim() {
        let text = concat!(
            "{{langs|zh|en}}\n\n",
            "{{ref-citation|bibtex|\n",
            "@article{ai_masterbrain,\n",
            "  title={AI becomes a masterbrain scientist},\n",
            "  year={2023}\n",
            "}\n",
            "}}",
        );
        let doc = parse(text).unwrap();
        match &doc.blocks[0] {
            Block::RefCitation { format, payload } => {
                assert_eq!(format, "bibtex");
                assert!(payload.contains("@article{ai_masterbrain,"));
                assert!(payload.ends_with("}\n"));
            }
            other => panic!("expected RefCitation, got {other:?}"),
        }
    }

    #[test]
    fn unknown_template_block_is_preserved() {
        let doc = parse("{{langs|zh|en}}\n\n{{image|foo.png|caption}}").unwrap();
        assert_eq!(
            doc.blocks[0],
            Block::Template {
                name: "image".into(),
                args: vec!["foo.png".into(), "caption".into()]
            }
        );
        assert_eq!(
            serialize(&doc),
            "{{langs|zh|en}}\n\n{{image|foo.png|caption}}"
        );
    }

    #[test]
    fn comments_are_erased_before_segmentation() {
        let with = concat!(
            "{{langs|zh|en}}\n\n",
            "中文**加粗**段落。 <!-- 单行注释 -->\n",
            "A **bold** paragraph.  <!-- Single-line comment -->\n\n",
            "<!-- 多行注释\nMulti-line comment\n-->\n\n",
            "尾段。\nFinal paragraph.",
        );
        let without = concat!(
            "{{langs|zh|en}}\n\n",
            "中文**加粗**段落。\n",
            "A **bold** paragraph.\n\n",
            "尾段。\nFinal paragraph.",
        );
        assert_eq!(parse(with).unwrap(), parse(without).unwrap());
    }

    #[test]
    fn unclosed_comment_reports_line() {
        let err = parse("{{langs|zh|en}}\n\nabc <!-- never closed").unwrap_err();
        assert_eq!(err, MlmdError::UnclosedComment { line: 3 });
    }

    #[test]
    fn unclosed_brackets_report_line() {
        assert_eq!(
            parse("{{langs|zh|en}}\n\n[[broken"),
            Err(MlmdError::UnclosedBracket { line: 3, bracket: "[[" })
        );
        assert_eq!(
            parse("{{langs|zh|en}}\n\n{{broken"),
            Err(MlmdError::UnclosedBracket { line: 3, bracket: "{{" })
        );
    }

    #[test]
    fn crlf_input_is_accepted() {
        let doc = parse("{{langs|zh|en}}\r\n\r\n你好\r\nHello").unwrap();
        assert_eq!(doc.blocks.len(), 1);
    }

    #[test]
    fn serialize_is_left_inverse_of_parse() {
        let canonical = "{{langs|zh|en}}\n\n你好，世界！\nHello, world!";
        let doc = parse(canonical).unwrap();
        assert_eq!(serialize(&doc), canonical);
        assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
    }

    #[test]
    fn empty_document_serializes_to_header_only() {
        let doc = parse("{{langs|zh|en}}").unwrap();
        assert!(doc.blocks.is_empty());
        assert_eq!(serialize(&doc), "{{langs|zh|en}}");
    }
}
