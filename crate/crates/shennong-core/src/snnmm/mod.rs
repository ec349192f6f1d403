//! Systematic nomenclature for Natural Medicinal Materials: validation and
//! normalization of name components, name assembly in English and Chinese,
//! generic names, and NMM identifiers.

mod construct;
mod ne_data;
mod nmm_id;
mod normalize;
mod pinyin;

pub use construct::{construct_nmmsn, ConstructOutput, EnZh, NmmType, Nmmsn, NmmsnRequest, NmmsnZh};
pub use ne_data::{validate_ne_data, NeData, NeItem, NameElementPair};
pub use nmm_id::{nmm_id_decode, nmm_id_encode, NmmId, NmmIdError, NMM_ID_MAX};
pub use normalize::{
    capitalize_hyphenate, normalize_en_phrase, normalize_parts, normalize_species, render_parts,
    render_processing, render_special, render_species,
};
pub use pinyin::{make_generic_name, pinyinize_toned, PinyinError, PinyinTable};

/// Issue severity. Warnings accumulate in the status fields while
/// construction proceeds; errors abort it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

impl Severity {
    fn as_str(self) -> &'static str {
        match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

/// A validation or normalization finding with its pipeline stage and a
/// bilingual reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub pipe: &'static str,
    pub severity: Severity,
    pub reason_en: String,
    pub reason_zh: String,
}

impl Issue {
    fn new(pipe: &'static str, severity: Severity, en: &str, zh: &str) -> Self {
        Issue::new_owned(pipe, severity, en.to_string(), zh.to_string())
    }

    fn new_owned(pipe: &'static str, severity: Severity, en: String, zh: String) -> Self {
        Issue {
            pipe,
            severity,
            reason_en: en,
            reason_zh: zh,
        }
    }

    /// Formats the issue in the wire template
    /// `Pipe: <stage>. Status: <severity>. Reason: <text>`.
    pub fn message(&self) -> String {
        format!(
            "Pipe: {}. Status: {}. Reason: {}",
            self.pipe,
            self.severity.as_str(),
            self.reason_en
        )
    }
}

/// The four name components of a systematic name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameComponent {
    SpeciesOrigin,
    MedicinalPart,
    SpecialDescription,
    ProcessingMethod,
}

impl NameComponent {
    pub fn pipe(self) -> &'static str {
        match self {
            NameComponent::SpeciesOrigin => "construct_nmmsn_spe_ori",
            NameComponent::MedicinalPart => "construct_nmmsn_med_part",
            NameComponent::SpecialDescription => "construct_nmmsn_spe_des",
            NameComponent::ProcessingMethod => "construct_nmmsn_pro_met",
        }
    }

    fn label_en(self) -> &'static str {
        match self {
            NameComponent::SpeciesOrigin => "species origins",
            NameComponent::MedicinalPart => "medicinal parts",
            NameComponent::SpecialDescription => "special descriptions",
            NameComponent::ProcessingMethod => "processing methods",
        }
    }

    fn label_zh(self) -> &'static str {
        match self {
            NameComponent::SpeciesOrigin => "物种基源",
            NameComponent::MedicinalPart => "药用部位",
            NameComponent::SpecialDescription => "特殊描述",
            NameComponent::ProcessingMethod => "炮制方法",
        }
    }
}
