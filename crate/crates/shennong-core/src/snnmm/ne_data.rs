//! Name element data: the alternating pair/connector sequences that feed
//! systematic-name construction.

use serde::{Deserialize, Serialize};

use super::{Issue, NameComponent, Severity};

/// A single name element: an English/Latin phrase paired with its Chinese
/// counterpart. Serializes as a two-element JSON array `["en", "zh"]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameElementPair(pub String, pub String);

impl NameElementPair {
    pub fn new(en: impl Into<String>, zh: impl Into<String>) -> Self {
        NameElementPair(en.into(), zh.into())
    }

    pub fn en(&self) -> &str {
        &self.0
    }

    pub fn zh(&self) -> &str {
        &self.1
    }
}

/// One item of a name element sequence: either a pair or a connector token
/// (`"or"` / `"and"` in well-formed data; arbitrary strings are representable
/// so that validation can report them).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NeItem {
    Pair(NameElementPair),
    Connector(String),
}

/// An alternating sequence of name element pairs and connector tokens,
/// mirroring the JSON shape `[["en","zh"], "or", ["en","zh"], ...]`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NeData(pub Vec<NeItem>);

impl NeData {
    pub fn empty() -> Self {
        NeData(Vec::new())
    }

    /// Builds a well-formed sequence from pairs interleaved with `connector`.
    pub fn from_pairs<I>(pairs: I, connector: &str) -> Self
    where
        I: IntoIterator<Item = NameElementPair>,
    {
        let mut items = Vec::new();
        for pair in pairs {
            if !items.is_empty() {
                items.push(NeItem::Connector(connector.to_string()));
            }
            items.push(NeItem::Pair(pair));
        }
        NeData(items)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &NameElementPair> {
        self.0.iter().filter_map(|item| match item {
            NeItem::Pair(p) => Some(p),
            NeItem::Connector(_) => None,
        })
    }

    pub fn connectors(&self) -> impl Iterator<Item = &str> {
        self.0.iter().filter_map(|item| match item {
            NeItem::Connector(c) => Some(c.as_str()),
            NeItem::Pair(_) => None,
        })
    }

    /// The connector used throughout the sequence, if any. Assumes the data
    /// already passed homogeneity validation.
    pub fn connector(&self) -> Option<&str> {
        self.connectors().next()
    }
}

/// Checks a name element sequence against the shape and connector rules for
/// one name component. Returns issues instead of aborting; an empty list
/// means the data is well formed. Empty sequences are considered well formed
/// here (whether a component may be empty is a composition-level rule).
pub fn validate_ne_data(component: NameComponent, data: &NeData) -> Vec<Issue> {
    let mut issues = Vec::new();
    if data.0.is_empty() {
        return issues;
    }

    let pipe = component.pipe();

    for (index, item) in data.0.iter().enumerate() {
        let expect_pair = index % 2 == 0;
        match (expect_pair, item) {
            (true, NeItem::Pair(pair)) => {
                if pair.en().trim().is_empty() {
                    issues.push(Issue::new(
                        pipe,
                        Severity::Error,
                        "Name element pair has an empty English/Latin value.",
                        "名称元素对的英文/拉丁文值为空。",
                    ));
                }
                if pair.zh().trim().is_empty() {
                    issues.push(Issue::new(
                        pipe,
                        Severity::Error,
                        "Name element pair has an empty Chinese value.",
                        "名称元素对的中文值为空。",
                    ));
                }
            }
            (true, NeItem::Connector(_)) => {
                let (en, zh) = if index == 0 {
                    (
                        "Name element sequence must begin with a name element pair.".to_string(),
                        "名称元素序列必须以名称元素对开头。".to_string(),
                    )
                } else {
                    (
                        "Name element pairs must alternate with connectors.".to_string(),
                        "名称元素对与连接词必须交替出现。".to_string(),
                    )
                };
                issues.push(Issue::new_owned(pipe, Severity::Error, en, zh));
            }
            (false, NeItem::Pair(_)) => {
                issues.push(Issue::new(
                    pipe,
                    Severity::Error,
                    "Name element pairs must alternate with connectors.",
                    "名称元素对与连接词必须交替出现。",
                ));
            }
            (false, NeItem::Connector(c)) => {
                if c != "or" && c != "and" {
                    issues.push(Issue::new_owned(
                        pipe,
                        Severity::Error,
                        format!("Unknown connector '{c}': only 'or' and 'and' are allowed."),
                        format!("未知连接词'{c}'：只允许'or'与'and'。"),
                    ));
                }
            }
        }
    }

    if data.0.len() % 2 == 0 {
        issues.push(Issue::new(
            pipe,
            Severity::Error,
            "Name element sequence must end with a name element pair.",
            "名称元素序列必须以名称元素对结尾。",
        ));
    }

    let mut seen_or = false;
    let mut seen_and = false;
    for c in data.connectors() {
        match c {
            "or" => seen_or = true,
            "and" => seen_and = true,
            _ => {}
        }
    }
    match component {
        NameComponent::SpeciesOrigin => {
            if seen_and {
                issues.push(Issue::new(
                    pipe,
                    Severity::Error,
                    "Illegal connector 'and' for species origins: only 'or' is allowed.",
                    "物种基源不允许使用连接词'and'：只允许'or'。",
                ));
            }
        }
        NameComponent::ProcessingMethod => {
            if seen_or {
                issues.push(Issue::new(
                    pipe,
                    Severity::Error,
                    "Illegal connector 'or' for processing methods: only 'and' is allowed.",
                    "炮制方法不允许使用连接词'or'：只允许'and'。",
                ));
            }
        }
        NameComponent::MedicinalPart | NameComponent::SpecialDescription => {
            if seen_or && seen_and {
                issues.push(Issue::new_owned(
                    pipe,
                    Severity::Error,
                    format!(
                        "Connectors must be homogeneous within {}: found both 'or' and 'and'.",
                        component.label_en()
                    ),
                    format!("{}的连接词必须一致：同时出现了'or'与'and'。", component.label_zh()),
                ));
            }
        }
    }

    issues
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(en: &str, zh: &str) -> NeItem {
        NeItem::Pair(NameElementPair::new(en, zh))
    }

    fn conn(c: &str) -> NeItem {
        NeItem::Connector(c.to_string())
    }

    #[test]
    fn well_formed_species_data_has_no_issues() {
        let data = NeData(vec![
            pair("Ephedra sinica", "草麻黄"),
            conn("or"),
            pair("Ephedra intermedia", "中麻黄"),
        ]);
        assert!(validate_ne_data(NameComponent::SpeciesOrigin, &data).is_empty());
    }

    #[test]
    fn species_data_rejects_and_connector() {
        let data = NeData(vec![
            pair("Ephedra sinica", "草麻黄"),
            conn("and"),
            pair("Ephedra intermedia", "中麻黄"),
        ]);
        let issues = validate_ne_data(NameComponent::SpeciesOrigin, &data);
        assert_eq!(issues.len(), 1);
        assert!(issues[0].reason_en.contains("Illegal connector 'and'"));
    }

    #[test]
    fn leading_connector_is_reported() {
        let data = NeData(vec![conn("or"), pair("X", "某")]);
        let issues = validate_ne_data(NameComponent::SpeciesOrigin, &data);
        assert!(issues
            .iter()
            .any(|i| i.reason_en.contains("must begin with a name element pair")));
    }

    #[test]
    fn trailing_connector_is_reported() {
        let data = NeData(vec![pair("X", "某"), conn("or")]);
        let issues = validate_ne_data(NameComponent::SpeciesOrigin, &data);
        assert!(issues
            .iter()
            .any(|i| i.reason_en.contains("must end with a name element pair")));
    }

    #[test]
    fn mixed_connectors_rejected_for_parts() {
        let data = NeData(vec![
            pair("rhizome", "根茎"),
            conn("and"),
            pair("root", "根"),
            conn("or"),
            pair("leaf", "叶"),
        ]);
        let issues = validate_ne_data(NameComponent::MedicinalPart, &data);
        assert_eq!(issues.len(), 1);
        assert!(issues[0].reason_en.contains("homogeneous"));
    }

    #[test]
    fn empty_data_is_well_formed() {
        assert!(validate_ne_data(NameComponent::SpecialDescription, &NeData::empty()).is_empty());
    }

    #[test]
    fn json_round_trip_matches_listing_shape() {
        let json = r#"[["Ephedra sinica", "草麻黄"], "or", ["Ephedra intermedia", "中麻黄"]]"#;
        let data: NeData = serde_json::from_str(json).unwrap();
        assert_eq!(data.pairs().count(), 2);
        assert_eq!(data.connector(), Some("or"));
        let back = serde_json::to_string(&data).unwrap();
        let reparsed: NeData = serde_json::from_str(&back).unwrap();
        assert_eq!(data, reparsed);
    }
}
