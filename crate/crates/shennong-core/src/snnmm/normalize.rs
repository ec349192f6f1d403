//! Character normalization, ordering, and rendering of name components.

use super::ne_data::{NeData, NameElementPair};
use super::{Issue, NameComponent, Severity};

/// Folds a small set of accented Latin letters to ASCII. Returns `None` for
/// characters that cannot appear in a systematic name at all.
fn fold_accent(c: char) -> Option<char> {
    let folded = match c {
        'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' => 'a',
        'è' | 'é' | 'ê' | 'ë' => 'e',
        'ì' | 'í' | 'î' | 'ï' => 'i',
        'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ø' => 'o',
        'ù' | 'ú' | 'û' | 'ü' => 'u',
        'ñ' => 'n',
        'ç' => 'c',
        'ý' | 'ÿ' => 'y',
        'À' | 'Á' | 'Â' | 'Ã' | 'Ä' | 'Å' => 'A',
        'È' | 'É' | 'Ê' | 'Ë' => 'E',
        'Ì' | 'Í' | 'Î' | 'Ï' => 'I',
        'Ò' | 'Ó' | 'Ô' | 'Õ' | 'Ö' | 'Ø' => 'O',
        'Ù' | 'Ú' | 'Û' | 'Ü' => 'U',
        'Ñ' => 'N',
        'Ç' => 'C',
        'Ý' => 'Y',
        _ => return None,
    };
    Some(folded)
}

/// Normalizes an English/Latin phrase: periods are dropped (taxonomic
/// abbreviations such as `var.`), accented letters fold to ASCII, whitespace
/// collapses to single spaces. Any other character outside `a-zA-Z`, space,
/// and hyphen is rejected.
pub fn normalize_en_phrase(raw: &str) -> Result<String, char> {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        if c == '.' {
            continue;
        } else if c.is_ascii_alphabetic() || c == '-' {
            out.push(c);
        } else if c.is_whitespace() {
            out.push(' ');
        } else if let Some(folded) = fold_accent(c) {
            out.push(folded);
        } else {
            return Err(c);
        }
    }
    Ok(out.split_whitespace().collect::<Vec<_>>().join(" "))
}

/// Joins the words of a phrase with hyphens and capitalizes only the first
/// letter of the result: `"stem herbaceous"` becomes `"Stem-herbaceous"`.
pub fn capitalize_hyphenate(phrase: &str) -> String {
    let mut token = phrase
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join("-");
    if let Some(first) = token.get(..1) {
        let upper = first.to_uppercase();
        token.replace_range(..1, &upper);
    }
    token
}

fn normalize_pairs(
    data: &NeData,
    component: NameComponent,
    issues: &mut Vec<Issue>,
) -> Vec<NameElementPair> {
    let pipe = component.pipe();
    let mut pairs = Vec::new();
    for pair in data.pairs() {
        match normalize_en_phrase(pair.en()) {
            Ok(en) if en.is_empty() => issues.push(Issue::new(
                pipe,
                Severity::Error,
                "Name element pair has an empty English/Latin value.",
                "名称元素对的英文/拉丁文值为空。",
            )),
            Ok(en) => pairs.push(NameElementPair::new(en, pair.zh().trim())),
            Err(c) => issues.push(Issue::new_owned(
                pipe,
                Severity::Error,
                format!(
                    "Illegal character '{c}' in {}: only letters, spaces, and hyphens are allowed.",
                    component.label_en()
                ),
                format!("{}中存在不合法字符'{c}'：只允许字母、空格与连字符。", component.label_zh()),
            )),
        }
    }
    pairs
}

fn dedup_case_insensitive(pairs: Vec<NameElementPair>) -> Vec<NameElementPair> {
    let mut seen: Vec<String> = Vec::new();
    let mut out = Vec::new();
    for pair in pairs {
        let key = pair.en().to_lowercase();
        if !seen.contains(&key) {
            seen.push(key);
            out.push(pair);
        }
    }
    out
}

/// Normalizes species origins: strips non-legitimate characters, removes
/// exact duplicates, sorts alphabetically by the Latin name, and reports
/// inclusion-rule violations and multi-origin warnings.
pub fn normalize_species(data: &NeData) -> (NeData, Vec<Issue>) {
    let mut issues = Vec::new();
    let pipe = NameComponent::SpeciesOrigin.pipe();

    let mut pairs = normalize_pairs(data, NameComponent::SpeciesOrigin, &mut issues);
    pairs = dedup_case_insensitive(pairs);
    pairs.sort_by_key(|p| p.en().to_lowercase());

    for outer in &pairs {
        for inner in &pairs {
            let prefix = format!("{} ", outer.en().to_lowercase());
            if inner.en().to_lowercase().starts_with(&prefix) {
                issues.push(Issue::new_owned(
                    pipe,
                    Severity::Error,
                    format!(
                        "Species inclusion rule violated: '{}' includes '{}'; only the species \
                         with the highest hierarchical level may be used.",
                        outer.en(),
                        inner.en()
                    ),
                    format!(
                        "违反物种包含规则：“{}”包含“{}”；只能使用最高分类层级的物种命名。",
                        outer.en(),
                        inner.en()
                    ),
                ));
            }
        }
    }

    if pairs
        .iter()
        .any(|p| p.en().split(' ').any(|w| w.eq_ignore_ascii_case("unspecified")))
    {
        issues.push(Issue::new(
            pipe,
            Severity::Warning,
            "Unspecified species origin detected.",
            "检测到未定种物种基源。",
        ));
    }

    if pairs.len() > 1 {
        issues.push(Issue::new(
            pipe,
            Severity::Warning,
            "Multiple species origins detected.",
            "检测到多个物种基源。",
        ));
    }

    (NeData::from_pairs(pairs, "or"), issues)
}

/// Normalizes medicinal parts: character cleanup plus alphabetical ordering.
/// The connector kind is preserved.
pub fn normalize_parts(data: &NeData) -> (NeData, Vec<Issue>) {
    let mut issues = Vec::new();
    let mut pairs = normalize_pairs(data, NameComponent::MedicinalPart, &mut issues);
    pairs.sort_by_key(|p| p.en().to_lowercase());
    let connector = data.connector().unwrap_or("and").to_string();
    (NeData::from_pairs(pairs, &connector), issues)
}

/// Normalizes special descriptions or processing methods: character cleanup
/// only; the given order is semantic and never changed.
pub fn normalize_ordered(data: &NeData, component: NameComponent) -> (NeData, Vec<Issue>) {
    let mut issues = Vec::new();
    let pairs = normalize_pairs(data, component, &mut issues);
    let connector = data.connector().unwrap_or("and").to_string();
    (NeData::from_pairs(pairs, &connector), issues)
}

/// Renders normalized species origins: Latin names joined by `vel` with the
/// genus word elided once its genus has already appeared, Chinese names
/// joined by `或`.
pub fn render_species(data: &NeData) -> (String, String) {
    let mut seen_genera: Vec<String> = Vec::new();
    let mut en_parts = Vec::new();
    let mut zh_parts = Vec::new();
    for pair in data.pairs() {
        let mut words = pair.en().split(' ');
        let genus = words.next().unwrap_or_default().to_string();
        let genus_key = genus.to_lowercase();
        let rest: Vec<&str> = words.collect();
        if seen_genera.contains(&genus_key) && !rest.is_empty() {
            en_parts.push(rest.join(" "));
        } else {
            en_parts.push(pair.en().to_string());
            seen_genera.push(genus_key);
        }
        zh_parts.push(pair.zh().to_string());
    }
    (en_parts.join(" vel "), zh_parts.join("或"))
}

/// Renders non-species component I: common names are capitalize-hyphenated
/// and joined like species, but no genus elision applies.
pub fn render_common_names(data: &NeData) -> (String, String) {
    let en: Vec<String> = data.pairs().map(|p| capitalize_hyphenate(p.en())).collect();
    let zh: Vec<String> = data.pairs().map(|p| p.zh().to_string()).collect();
    (en.join(" vel "), zh.join("或"))
}

fn connector_words(connector: &str) -> (&'static str, &'static str) {
    if connector == "or" {
        (" or ", "或")
    } else {
        (" and ", "与")
    }
}

/// Renders medicinal parts: each part capitalize-hyphenated, joined by the
/// sequence connector (`and`/`or`; `与`/`或` in Chinese).
pub fn render_parts(data: &NeData) -> (String, String) {
    let connector = data.connector().unwrap_or("and");
    let (en_join, zh_join) = connector_words(connector);
    let en: Vec<String> = data.pairs().map(|p| capitalize_hyphenate(p.en())).collect();
    let zh: Vec<String> = data.pairs().map(|p| p.zh().to_string()).collect();
    (en.join(en_join), zh.join(zh_join))
}

/// Renders special descriptions in input order. Chinese descriptions are
/// adjectival prefixes and concatenate without a connector.
pub fn render_special(data: &NeData) -> (String, String) {
    let connector = data.connector().unwrap_or("and");
    let (en_join, _) = connector_words(connector);
    let en: Vec<String> = data.pairs().map(|p| capitalize_hyphenate(p.en())).collect();
    let zh: String = data.pairs().map(|p| p.zh()).collect();
    (en.join(en_join), zh)
}

/// Renders processing methods: English joined by `and` in processing order;
/// Chinese terms end in `制` and concatenate in reverse order, the later
/// method placed first.
pub fn render_processing(data: &NeData) -> (String, String) {
    let en: Vec<String> = data.pairs().map(|p| capitalize_hyphenate(p.en())).collect();
    let zh_pairs: Vec<&str> = data.pairs().map(|p| p.zh()).collect();
    let zh: String = zh_pairs.iter().rev().copied().collect();
    (en.join(" and "), zh)
}
