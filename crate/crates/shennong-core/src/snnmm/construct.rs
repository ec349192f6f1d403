//! Assembly of NMM Systematic Names from validated name components.

use serde::{Deserialize, Serialize};

use super::ne_data::{validate_ne_data, NeData};
use super::normalize::{
    normalize_ordered, normalize_parts, normalize_species, render_common_names, render_parts,
    render_processing, render_special, render_species,
};
use super::pinyin::{pinyinize_toned, PinyinTable};
use super::{Issue, NameComponent, Severity};

/// Geographic special descriptions shipped with the fixture corpus. A match
/// produces a genuine-region warning; construction proceeds.
const REGION_DESCRIPTIONS: &[(&str, &str)] = &[("Zhejiang", "浙产")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NmmType {
    Raw,
    Agricultural,
    Processed,
}

fn is_false(flag: &bool) -> bool {
    !*flag
}

/// Construction request: the NMM type plus the four name component groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmmsnRequest {
    pub nmm_type: NmmType,
    #[serde(default)]
    pub species_origins: NeData,
    #[serde(default)]
    pub medicinal_parts: NeData,
    #[serde(default)]
    pub special_descriptions: NeData,
    #[serde(default)]
    pub processing_methods: NeData,
    /// Non-species NMMs (minerals and the like) name component I with an
    /// English common name and may leave components I/II partially empty.
    #[serde(default, skip_serializing_if = "is_false")]
    pub non_species: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnZh {
    pub en: String,
    pub zh: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmmsnZh {
    pub zh: String,
    pub pinyin: String,
}

/// A constructed systematic name bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nmmsn {
    pub nmmsn: String,
    pub nmmsn_zh: NmmsnZh,
    pub nmmsn_name_element: NmmsnRequest,
    /// One `(en, zh)` pair per name component I-IV; absent components hold
    /// empty pairs. Joining the non-empty English entries with spaces yields
    /// `nmmsn`; concatenating the Chinese entries in IV-III-I-II order yields
    /// `nmmsn_zh.zh`.
    pub nmmsn_seq: Vec<(String, String)>,
}

/// Construction outcome in the wire shape: status fields always present, the
/// `nmmsn` key only on success.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructOutput {
    pub success: bool,
    pub error_msg: String,
    pub error_msg_en_zh: EnZh,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmmsn: Option<Nmmsn>,
}

fn status_fields(issues: &[Issue]) -> (String, EnZh) {
    let error_msg = issues
        .iter()
        .map(Issue::message)
        .collect::<Vec<_>>()
        .join(" ");
    let en = issues
        .iter()
        .map(|i| i.reason_en.as_str())
        .collect::<Vec<_>>()
        .join("; ");
    let zh = issues
        .iter()
        .map(|i| i.reason_zh.as_str())
        .collect::<Vec<_>>()
        .join("; ");
    (error_msg, EnZh { en, zh })
}

fn failure(issues: Vec<Issue>) -> ConstructOutput {
    let (error_msg, error_msg_en_zh) = status_fields(&issues);
    ConstructOutput {
        success: false,
        error_msg,
        error_msg_en_zh,
        nmmsn: None,
    }
}

/// Validates, normalizes, and assembles an NMM Systematic Name together with
/// its Chinese counterpart and toned pinyin. Warnings accumulate in the
/// status fields; any error aborts with a failure outcome.
pub fn construct_nmmsn(request: &NmmsnRequest, pinyin: &PinyinTable) -> ConstructOutput {
    let mut issues = Vec::new();

    match request.nmm_type {
        NmmType::Processed => {
            if request.processing_methods.is_empty() {
                issues.push(Issue::new(
                    NameComponent::ProcessingMethod.pipe(),
                    Severity::Error,
                    "A Processed NMM must contain name components I, II, and IV; the processing method is missing.",
                    "炮制天然药材的系统名必须包含命名成分I、II与IV：缺少炮制方法。",
                ));
            }
        }
        NmmType::Raw | NmmType::Agricultural => {
            if !request.processing_methods.is_empty() {
                issues.push(Issue::new(
                    NameComponent::ProcessingMethod.pipe(),
                    Severity::Error,
                    "Component IV (processing method) is only allowed for Processed NMMs.",
                    "命名成分IV（炮制方法）只允许用于炮制天然药材。",
                ));
            }
        }
    }

    if !request.non_species {
        if request.species_origins.is_empty() {
            issues.push(Issue::new(
                NameComponent::SpeciesOrigin.pipe(),
                Severity::Error,
                "Species origins must not be empty.",
                "物种基源不能为空。",
            ));
        }
        if request.medicinal_parts.is_empty() {
            issues.push(Issue::new(
                NameComponent::MedicinalPart.pipe(),
                Severity::Error,
                "Medicinal parts must not be empty.",
                "药用部位不能为空。",
            ));
        }
    } else if request.species_origins.is_empty() && request.medicinal_parts.is_empty() {
        issues.push(Issue::new(
            "construct_nmmsn",
            Severity::Error,
            "A non-species NMM still requires a common name or a medicinal part.",
            "非物种天然药材仍须提供通用名或药用部位。",
        ));
    }

    for (component, data) in [
        (NameComponent::SpeciesOrigin, &request.species_origins),
        (NameComponent::MedicinalPart, &request.medicinal_parts),
        (NameComponent::SpecialDescription, &request.special_descriptions),
        (NameComponent::ProcessingMethod, &request.processing_methods),
    ] {
        issues.extend(validate_ne_data(component, data));
    }

    if issues.iter().any(|i| i.severity == Severity::Error) {
        return failure(issues);
    }

    let (species, species_issues) = normalize_species(&request.species_origins);
    issues.extend(species_issues);
    let (parts, part_issues) = normalize_parts(&request.medicinal_parts);
    issues.extend(part_issues);
    let (special, special_issues) =
        normalize_ordered(&request.special_descriptions, NameComponent::SpecialDescription);
    issues.extend(special_issues);
    let (processing, processing_issues) =
        normalize_ordered(&request.processing_methods, NameComponent::ProcessingMethod);
    issues.extend(processing_issues);

    for pair in special.pairs() {
        if REGION_DESCRIPTIONS
            .iter()
            .any(|(en, zh)| pair.en().eq_ignore_ascii_case(en) || pair.zh() == *zh)
        {
            issues.push(Issue::new(
                NameComponent::SpecialDescription.pipe(),
                Severity::Warning,
                "Genuine-region special description detected.",
                "检测到道地药材特殊描述。",
            ));
        }
    }

    if issues.iter().any(|i| i.severity == Severity::Error) {
        return failure(issues);
    }

    let (seq_i_en, seq_i_zh) = if species.is_empty() {
        (String::new(), String::new())
    } else if request.non_species {
        render_common_names(&species)
    } else {
        render_species(&species)
    };
    let (seq_ii_en, seq_ii_zh) = if parts.is_empty() {
        (String::new(), String::new())
    } else {
        render_parts(&parts)
    };
    let (seq_iii_en, seq_iii_zh) = if special.is_empty() {
        (String::new(), String::new())
    } else {
        render_special(&special)
    };
    let (seq_iv_en, seq_iv_zh) = if processing.is_empty() {
        (String::new(), String::new())
    } else {
        render_processing(&processing)
    };

    let nmmsn_en = [&seq_i_en, &seq_ii_en, &seq_iii_en, &seq_iv_en]
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| s.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    let nmmsn_zh = format!("{seq_iv_zh}{seq_iii_zh}{seq_i_zh}{seq_ii_zh}");

    let pinyin_zh = match pinyinize_toned(&nmmsn_zh, pinyin) {
        Ok(p) => p,
        Err(err) => {
            issues.push(Issue::new_owned(
                "construct_nmmsn_zh_pinyin",
                Severity::Error,
                format!("Failed to derive pinyin for the Chinese systematic name: {err}."),
                "无法为中文系统名生成拼音。".to_string(),
            ));
            return failure(issues);
        }
    };

    let normalized_request = NmmsnRequest {
        nmm_type: request.nmm_type,
        species_origins: species,
        medicinal_parts: parts,
        special_descriptions: special,
        processing_methods: processing,
        non_species: request.non_species,
    };

    let (error_msg, error_msg_en_zh) = status_fields(&issues);
    ConstructOutput {
        success: true,
        error_msg,
        error_msg_en_zh,
        nmmsn: Some(Nmmsn {
            nmmsn: nmmsn_en,
            nmmsn_zh: NmmsnZh {
                zh: nmmsn_zh,
                pinyin: pinyin_zh,
            },
            nmmsn_name_element: normalized_request,
            nmmsn_seq: vec![
                (seq_i_en, seq_i_zh),
                (seq_ii_en, seq_ii_zh),
                (seq_iii_en, seq_iii_zh),
                (seq_iv_en, seq_iv_zh),
            ],
        }),
    }
}
