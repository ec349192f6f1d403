//! Knowledge base records and the JSON-lines import schema.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// The five record collections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Collection {
    Snnmm,
    Text,
    Knowledge,
    Glossary,
    Relation,
}

impl Collection {
    pub const ALL: [Collection; 5] = [
        Collection::Snnmm,
        Collection::Text,
        Collection::Knowledge,
        Collection::Glossary,
        Collection::Relation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Collection::Snnmm => "snnmm",
            Collection::Text => "text",
            Collection::Knowledge => "knowledge",
            Collection::Glossary => "glossary",
            Collection::Relation => "relation",
        }
    }

    /// File name of the collection inside a knowledge base directory.
    pub fn file_name(self) -> String {
        format!("{}.jsonl", self.as_str())
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Collection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "snnmm" => Ok(Collection::Snnmm),
            "text" => Ok(Collection::Text),
            "knowledge" => Ok(Collection::Knowledge),
            "glossary" => Ok(Collection::Glossary),
            "relation" => Ok(Collection::Relation),
            other => Err(format!("unknown collection {other:?}")),
        }
    }
}

/// One knowledge base record. The JSON-lines form is a flat object: `id` is
/// required, `body` optionally holds multilingual markup, and every other
/// key lands in `fields`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbRecord {
    pub id: String,
    pub collection: Collection,
    pub fields: BTreeMap<String, Value>,
    pub body: Option<String>,
}

impl KbRecord {
    pub fn field_str(&self, key: &str) -> Option<&str> {
        self.fields.get(key).and_then(Value::as_str)
    }

    pub fn field_list(&self, key: &str) -> Vec<String> {
        match self.fields.get(key) {
            Some(Value::Array(items)) => items
                .iter()
                .filter_map(Value::as_str)
                .map(str::to_string)
                .collect(),
            Some(Value::String(s)) => vec![s.clone()],
            _ => Vec::new(),
        }
    }

    /// The record's searchable text: every field value in key order, one per
    /// line, with the body appended. Indexing and self-retrieval both use
    /// this projection.
    pub fn full_text(&self) -> String {
        fn value_text(value: &Value, out: &mut Vec<String>) {
            match value {
                Value::String(s) => out.push(s.clone()),
                Value::Number(n) => out.push(n.to_string()),
                Value::Bool(b) => out.push(b.to_string()),
                Value::Array(items) => {
                    let parts: Vec<String> = items
                        .iter()
                        .filter_map(|v| match v {
                            Value::String(s) => Some(s.clone()),
                            Value::Number(n) => Some(n.to_string()),
                            _ => None,
                        })
                        .collect();
                    if !parts.is_empty() {
                        out.push(parts.join(" "));
                    }
                }
                _ => {}
            }
        }
        let mut lines = vec![self.id.clone()];
        for value in self.fields.values() {
            value_text(value, &mut lines);
        }
        if let Some(body) = &self.body {
            lines.push(body.clone());
        }
        lines.join("\n")
    }

    /// Parses a JSON-lines object into a record and checks the collection
    /// schema. Returns a human-readable reason on rejection.
    pub fn from_json_line(collection: Collection, line: &str) -> Result<KbRecord, String> {
        let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
        let Value::Object(map) = value else {
            return Err("expected a JSON object".to_string());
        };
        let mut fields = BTreeMap::new();
        let mut id = None;
        let mut body = None;
        for (key, value) in map {
            match key.as_str() {
                "id" => match value {
                    Value::String(s) if !s.is_empty() => id = Some(s),
                    _ => return Err("field 'id' must be a non-empty string".to_string()),
                },
                "body" => match value {
                    Value::String(s) => body = Some(s),
                    Value::Null => {}
                    _ => return Err("field 'body' must be a string".to_string()),
                },
                _ => {
                    fields.insert(key, value);
                }
            }
        }
        let record = KbRecord {
            id: id.ok_or("missing required field 'id'")?,
            collection,
            fields,
            body,
        };
        record.check_schema()?;
        Ok(record)
    }

    fn check_schema(&self) -> Result<(), String> {
        let require_str = |key: &str| -> Result<(), String> {
            match self.fields.get(key) {
                Some(Value::String(s)) if !s.is_empty() => Ok(()),
                _ => Err(format!("missing required string field '{key}'")),
            }
        };
        let require_list = |key: &str| -> Result<(), String> {
            match self.fields.get(key) {
                Some(Value::Array(_)) => Ok(()),
                _ => Err(format!("missing required list field '{key}'")),
            }
        };
        match self.collection {
            Collection::Snnmm => {
                for key in ["nmm_id", "nmmsn", "nmmsn_zh", "nmmgn", "nmmgn_zh"] {
                    require_str(key)?;
                }
                for key in ["species_origins", "medicinal_parts", "processing_methods"] {
                    require_list(key)?;
                }
            }
            Collection::Text => {
                require_str("source")?;
                if self.body.is_none() {
                    return Err("text records require a 'body'".to_string());
                }
            }
            Collection::Knowledge => require_str("nmm_id")?,
            Collection::Glossary => {
                if !self.fields.values().any(Value::is_string) {
                    return Err("glossary records need at least one language rendering".to_string());
                }
            }
            Collection::Relation => {
                require_str("from_term")?;
                require_str("to_term")?;
                if let Some(weight) = self.fields.get("weight") {
                    match weight.as_f64() {
                        Some(w) if w > 0.0 => {}
                        _ => return Err("field 'weight' must be a positive number".to_string()),
                    }
                }
            }
        }
        Ok(())
    }
}

/// A standardized rendering per language, keyed by the primary term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossaryEntry {
    pub primary: String,
    pub renderings: BTreeMap<String, String>,
}

impl GlossaryEntry {
    pub fn from_record(record: &KbRecord) -> GlossaryEntry {
        let renderings = record
            .fields
            .iter()
            .filter_map(|(k, v)| v.as_str().map(|s| (k.clone(), s.to_string())))
            .collect();
        GlossaryEntry {
            primary: record.id.clone(),
            renderings,
        }
    }

    pub fn rendering(&self, lang: &str) -> Option<&str> {
        self.renderings.get(lang).map(String::as_str)
    }
}

/// A coreference edge read from the relation collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationEdge {
    pub from_term: String,
    pub to_term: String,
    pub weight: f64,
    pub note: Option<String>,
}

impl RelationEdge {
    pub fn from_record(record: &KbRecord) -> Option<RelationEdge> {
        Some(RelationEdge {
            from_term: record.field_str("from_term")?.to_string(),
            to_term: record.field_str("to_term")?.to_string(),
            weight: record
                .fields
                .get("weight")
                .and_then(Value::as_f64)
                .unwrap_or(1.0),
            note: record.field_str("note").map(str::to_string),
        })
    }
}
