//! Retrieval-augmented chat: a sufficiency judge decides whether to search,
//! retrieved records ground the composed answer, and answers embed their
//! supporting records for display. Deterministic judge and composer
//! implementations ship with the toolkit; model-backed ones plug in behind
//! the same traits.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::kb::{Collection, KbRecord, KnowledgeBase};
use crate::nmtcpt::detect_terms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

/// A record attached to an answer for collapsible display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub primary: String,
    pub record: KbRecord,
    pub excerpt: String,
}

/// One chat turn; assistant turns that retrieved knowledge carry the
/// supporting records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatTurn {
    pub role: Role,
    pub text: String,
    pub attached_search_results: Vec<Attachment>,
}

impl ChatTurn {
    pub fn user(text: impl Into<String>) -> Self {
        ChatTurn {
            role: Role::User,
            text: text.into(),
            attached_search_results: Vec::new(),
        }
    }
}

/// Knowledge gathered for one detected term, handed to the composer.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievedKnowledge {
    /// The term as it appears in the question.
    pub surface: String,
    pub primary: String,
    pub record: KbRecord,
}

/// Decides whether a question needs a knowledge search given the detected
/// primaries and the session history.
pub trait SufficiencyJudge {
    fn should_retrieve(&self, question: &str, primaries: &[String], history: &[ChatTurn]) -> bool;
}

/// Composes the reply text from the question and the gathered records.
pub trait AnswerComposer {
    fn compose(&self, question: &str, knowledge: &[RetrievedKnowledge]) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JudgeMode {
    /// Always search when the question names a resolvable term.
    Precise,
    /// Skip the search when the history already holds records for every
    /// primary the question names.
    #[default]
    Quick,
}

impl std::str::FromStr for JudgeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "precise" => Ok(JudgeMode::Precise),
            "quick" => Ok(JudgeMode::Quick),
            other => Err(format!("unknown chat mode {other:?}")),
        }
    }
}

fn history_has_primary(history: &[ChatTurn], primary: &str) -> bool {
    history
        .iter()
        .flat_map(|turn| &turn.attached_search_results)
        .any(|a| a.primary == primary)
}

/// Deterministic judge: retrieve iff the question names a resolvable term
/// whose records are absent from the history attachments.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeterministicJudge {
    pub mode: JudgeMode,
}

impl SufficiencyJudge for DeterministicJudge {
    fn should_retrieve(&self, _question: &str, primaries: &[String], history: &[ChatTurn]) -> bool {
        if primaries.is_empty() {
            return false;
        }
        match self.mode {
            JudgeMode::Precise => true,
            JudgeMode::Quick => primaries.iter().any(|p| !history_has_primary(history, p)),
        }
    }
}

fn list_or_join(items: &[String]) -> String {
    match items.len() {
        0 => String::new(),
        1 => items[0].clone(),
        2 => format!("{} or {}", items[0], items[1]),
        _ => format!(
            "{}, or {}",
            items[..items.len() - 1].join(", "),
            items[items.len() - 1]
        ),
    }
}

fn list_and_join(items: &[String]) -> String {
    match items.len() {
        0 => String::new(),
        1 => items[0].clone(),
        2 => format!("{} and {}", items[0], items[1]),
        _ => format!(
            "{}, and {}",
            items[..items.len() - 1].join(", "),
            items[items.len() - 1]
        ),
    }
}

const NOT_FOUND_REPLY: &str = "The requested information was not found in the knowledge base.";

/// Deterministic composer: a keyword table selects an intent template and
/// every fact in the reply is copied verbatim from the attached records.
#[derive(Debug, Clone, Copy, Default)]
pub struct TemplateComposer;

impl TemplateComposer {
    fn field_for<'a>(
        knowledge: &'a [RetrievedKnowledge],
        primary: &str,
        key: &str,
    ) -> Option<&'a KbRecord> {
        knowledge
            .iter()
            .filter(|k| k.primary == primary)
            .map(|k| &k.record)
            .find(|r| r.fields.contains_key(key))
    }

    fn compose_for_surface(
        question_lower: &str,
        knowledge: &[RetrievedKnowledge],
        surface: &str,
        primary: &str,
    ) -> Option<String> {
        if question_lower.contains("species origin") {
            let record = Self::field_for(knowledge, primary, "species_origins")?;
            let list = record.field_list("species_origins");
            if list.is_empty() {
                return None;
            }
            return Some(format!(
                "The species origin of {surface} is {}.",
                list_or_join(&list)
            ));
        }
        if question_lower.contains("medicinal part") {
            let record = Self::field_for(knowledge, primary, "medicinal_parts")?;
            let list = record.field_list("medicinal_parts");
            if list.is_empty() {
                return None;
            }
            return Some(format!(
                "The medicinal part of {surface} is {}.",
                list_or_join(&list)
            ));
        }
        if question_lower.contains("processing method") {
            let record = Self::field_for(knowledge, primary, "processing_methods")?;
            let list = record.field_list("processing_methods");
            if list.is_empty() {
                return None;
            }
            return Some(format!(
                "The processing method of {surface} is {}.",
                list_and_join(&list)
            ));
        }
        if question_lower.contains("generic name") {
            let record = Self::field_for(knowledge, primary, "nmmgn")?;
            return Some(format!(
                "The generic name of {surface} is {}.",
                record.field_str("nmmgn")?
            ));
        }
        if question_lower.contains("systematic name") {
            let record = Self::field_for(knowledge, primary, "nmmsn")?;
            return Some(format!(
                "The systematic name of {surface} is {}.",
                record.field_str("nmmsn")?
            ));
        }
        if question_lower.contains("nmm id") || question_lower.contains("id of") {
            let record = Self::field_for(knowledge, primary, "nmm_id")?;
            return Some(format!(
                "The NMM ID of {surface} is {}.",
                record.field_str("nmm_id")?
            ));
        }
        // Reference-format fallback.
        let record = Self::field_for(knowledge, primary, "nmmsn")?;
        Some(format!(
            "{surface} refers to {} ({}, {}).",
            record.field_str("nmmsn")?,
            record.field_str("nmm_id")?,
            record.field_str("nmmgn")?
        ))
    }
}

impl AnswerComposer for TemplateComposer {
    fn compose(&self, question: &str, knowledge: &[RetrievedKnowledge]) -> String {
        if knowledge.is_empty() {
            return NOT_FOUND_REPLY.to_string();
        }
        let question_lower = question.to_lowercase();
        let mut seen: Vec<&str> = Vec::new();
        let mut sentences = Vec::new();
        for item in knowledge {
            if seen.contains(&item.primary.as_str()) {
                continue;
            }
            seen.push(&item.primary);
            if let Some(sentence) = Self::compose_for_surface(
                &question_lower,
                knowledge,
                &item.surface,
                &item.primary,
            ) {
                sentences.push(sentence);
            }
        }
        if sentences.is_empty() {
            NOT_FOUND_REPLY.to_string()
        } else {
            sentences.join(" ")
        }
    }
}

fn excerpt_of(record: &KbRecord) -> String {
    let mut lines = Vec::new();
    for (key, value) in &record.fields {
        match value {
            Value::String(s) => lines.push(format!("{key}: {s}")),
            Value::Array(items) => {
                let parts: Vec<&str> = items.iter().filter_map(Value::as_str).collect();
                if !parts.is_empty() {
                    lines.push(format!("{key}: {}", parts.join(", or, ")));
                }
            }
            Value::Number(n) => lines.push(format!("{key}: {n}")),
            _ => {}
        }
    }
    lines.join("\n")
}

fn gather(kb: &KnowledgeBase, surface: &str, primary: &str) -> Vec<RetrievedKnowledge> {
    let mut out = Vec::new();
    for collection in [Collection::Knowledge, Collection::Snnmm] {
        if let Some(record) = kb.get(collection, primary) {
            out.push(RetrievedKnowledge {
                surface: surface.to_string(),
                primary: primary.to_string(),
                record: record.clone(),
            });
        }
    }
    out
}

/// Runs one chat turn: the judge decides whether to search, records are
/// gathered either from the knowledge base or from the session history, and
/// the composer produces the grounded reply. Questions naming nothing the
/// knowledge base resolves get an explicit not-found reply.
pub fn answer(
    question: &str,
    history: &[ChatTurn],
    kb: &KnowledgeBase,
    judge: &dyn SufficiencyJudge,
    composer: &dyn AnswerComposer,
) -> ChatTurn {
    let matches = detect_terms(question, kb).unwrap_or_default();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for m in &matches {
        if !pairs.iter().any(|(_, p)| *p == m.primary) {
            pairs.push((m.surface.clone(), m.primary.clone()));
        }
    }
    let primaries: Vec<String> = pairs.iter().map(|(_, p)| p.clone()).collect();

    if judge.should_retrieve(question, &primaries, history) {
        let mut knowledge = Vec::new();
        for (surface, primary) in &pairs {
            knowledge.extend(gather(kb, surface, primary));
        }
        let attachments = knowledge
            .iter()
            .map(|k| Attachment {
                primary: k.primary.clone(),
                excerpt: excerpt_of(&k.record),
                record: k.record.clone(),
            })
            .collect();
        let text = composer.compose(question, &knowledge);
        return ChatTurn {
            role: Role::Assistant,
            text,
            attached_search_results: attachments,
        };
    }

    // Answer from knowledge already present in the session history.
    let mut knowledge = Vec::new();
    for (surface, primary) in &pairs {
        for attachment in history.iter().flat_map(|t| &t.attached_search_results) {
            if attachment.primary == *primary
                && !knowledge
                    .iter()
                    .any(|k: &RetrievedKnowledge| k.record == attachment.record)
            {
                knowledge.push(RetrievedKnowledge {
                    surface: surface.clone(),
                    primary: primary.clone(),
                    record: attachment.record.clone(),
                });
            }
        }
    }
    ChatTurn {
        role: Role::Assistant,
        text: composer.compose(question, &knowledge),
        attached_search_results: Vec::new(),
    }
}
