//! The knowledge base: five record collections imported from JSON-lines
//! files, a full-text and a vector index, and coreference-backed term
//! standardization.
//!
//! Imports are single-writer; after the indexes are built the knowledge base
//! is queried read-only.

mod fulltext;
mod record;
mod tokenizer;
mod vector;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cgs::{self, CgsError, CgsMode, Cptg, EdgeSpec, ResolutionDict};

pub use fulltext::{FulltextHit, FulltextIndex};
pub use record::{Collection, GlossaryEntry, KbRecord, RelationEdge};
pub use tokenizer::{Token, Tokenizer};
pub use vector::{Embedder, HashedBagEmbedder, VectorHit, VectorIndex};

#[derive(Debug, Error)]
pub enum KbError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("unknown collection {0:?}")]
    UnknownCollection(String),
    #[error("index not built; build the knowledge base indexes first")]
    IndexNotBuilt,
    #[error("embedder dimension {got} does not match index dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector index is empty")]
    EmptyIndex,
    #[error("relation graph is invalid: {0}")]
    Graph(#[from] CgsError),
}

/// One rejected import line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportIssue {
    pub line: usize,
    pub reason: String,
}

/// Import outcome: how many records were upserted and which lines were
/// skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportReport {
    pub imported: usize,
    pub issues: Vec<ImportIssue>,
}

/// A standardized term: its primary term joined against the snnmm and
/// glossary collections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardized {
    pub primary: String,
    pub snnmm: Option<KbRecord>,
    pub glossary: Option<GlossaryEntry>,
}

/// Per-collection counts plus the knowledge-category breakdown reported by
/// `kb stats`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbStats {
    pub collections: BTreeMap<String, usize>,
    pub categories: Vec<CategoryCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCount {
    #[serde(rename = "type")]
    pub category: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    collections: BTreeMap<Collection, BTreeMap<String, KbRecord>>,
    tokenizer: Tokenizer,
    graph: Option<Cptg>,
    resolution: Option<ResolutionDict>,
    fulltext: Option<FulltextIndex>,
    vectors: Option<VectorIndex>,
}

impl KnowledgeBase {
    pub fn new(tokenizer: Tokenizer) -> Self {
        KnowledgeBase {
            tokenizer,
            ..Default::default()
        }
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    /// Upserts records from a JSON-lines file. Malformed lines are reported
    /// with their line numbers and skipped; the import continues. Any
    /// previously built index is invalidated.
    pub fn import_jsonl(
        &mut self,
        path: impl AsRef<Path>,
        collection: Collection,
    ) -> Result<ImportReport, KbError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| KbError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.import_reader(io::BufReader::new(file), collection)
            .map_err(|source| KbError::Io {
                path: path.display().to_string(),
                source,
            })
    }

    pub fn import_reader<R: BufRead>(
        &mut self,
        reader: R,
        collection: Collection,
    ) -> Result<ImportReport, io::Error> {
        let mut report = ImportReport::default();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match KbRecord::from_json_line(collection, &line) {
                Ok(record) => {
                    self.collections
                        .entry(collection)
                        .or_default()
                        .insert(record.id.clone(), record);
                    report.imported += 1;
                }
                Err(reason) => report.issues.push(ImportIssue {
                    line: idx + 1,
                    reason,
                }),
            }
        }
        self.invalidate_indexes();
        Ok(report)
    }

    /// Imports every collection file present in `dir`.
    pub fn load_dir(&mut self, dir: impl AsRef<Path>) -> Result<BTreeMap<Collection, ImportReport>, KbError> {
        let dir = dir.as_ref();
        let mut reports = BTreeMap::new();
        for collection in Collection::ALL {
            let path = dir.join(collection.file_name());
            if path.exists() {
                reports.insert(collection, self.import_jsonl(&path, collection)?);
            }
        }
        Ok(reports)
    }

    fn invalidate_indexes(&mut self) {
        self.graph = None;
        self.resolution = None;
        self.fulltext = None;
        self.vectors = None;
    }

    pub fn get(&self, collection: Collection, id: &str) -> Option<&KbRecord> {
        self.collections.get(&collection)?.get(id)
    }

    pub fn records(&self, collection: Collection) -> impl Iterator<Item = &KbRecord> {
        self.collections
            .get(&collection)
            .into_iter()
            .flat_map(|m| m.values())
    }

    pub fn all_records(&self) -> impl Iterator<Item = &KbRecord> {
        self.collections.values().flat_map(|m| m.values())
    }

    pub fn count(&self, collection: Collection) -> usize {
        self.collections.get(&collection).map_or(0, BTreeMap::len)
    }

    /// Looks a record up by id across collections, in collection order. Used
    /// to resolve knowledge-base-resolvable citation marks.
    pub fn find_record(&self, id: &str) -> Option<&KbRecord> {
        Collection::ALL
            .iter()
            .find_map(|&collection| self.get(collection, id))
    }

    /// Builds the coreference graph from the relation collection. Primaries
    /// are the snnmm record ids. Returns build warnings (duplicate edges).
    pub fn build_relation_graph(&mut self) -> Result<Vec<String>, KbError> {
        let edges: Vec<EdgeSpec> = self
            .records(Collection::Relation)
            .filter_map(RelationEdge::from_record)
            .map(|e| EdgeSpec::weighted(e.from_term, e.to_term, e.weight))
            .collect();
        let primaries: Vec<String> = self
            .records(Collection::Snnmm)
            .map(|r| r.id.clone())
            .collect();
        let (graph, warnings) = cgs::build_graph(edges, primaries, CgsMode::Weighted)?;
        self.resolution = Some(cgs::resolve_all(&graph));
        self.graph = Some(graph);
        Ok(warnings)
    }

    pub fn build_fulltext_index(&mut self) {
        self.fulltext = Some(FulltextIndex::build(self.all_records(), &self.tokenizer));
    }

    pub fn build_vector_index(&mut self, embedder: &dyn Embedder) {
        self.vectors = Some(VectorIndex::build(self.all_records(), embedder));
    }

    /// Builds the relation graph and both indexes.
    pub fn build_all(&mut self, embedder: &dyn Embedder) -> Result<Vec<String>, KbError> {
        let warnings = self.build_relation_graph()?;
        self.build_fulltext_index();
        self.build_vector_index(embedder);
        Ok(warnings)
    }

    pub fn graph(&self) -> Option<&Cptg> {
        self.graph.as_ref()
    }

    pub fn resolution(&self) -> Option<&ResolutionDict> {
        self.resolution.as_ref()
    }

    /// Every term the relation graph can resolve to a primary.
    pub fn resolvable_terms(&self) -> impl Iterator<Item = &str> {
        self.resolution
            .iter()
            .flat_map(|dict| dict.keys().map(String::as_str))
    }

    pub fn resolve_term(&self, term: &str) -> Result<Option<&str>, KbError> {
        let dict = self.resolution.as_ref().ok_or(KbError::IndexNotBuilt)?;
        Ok(cgs::resolve(dict, term))
    }

    /// Resolves a term to its primary and joins the snnmm and glossary
    /// collections by primary id. Unknown terms yield `None`.
    pub fn standardize(&self, term: &str) -> Result<Option<Standardized>, KbError> {
        let Some(primary) = self.resolve_term(term)? else {
            return Ok(None);
        };
        let primary = primary.to_string();
        let snnmm = self.get(Collection::Snnmm, &primary).cloned();
        let glossary = self
            .get(Collection::Glossary, &primary)
            .map(GlossaryEntry::from_record);
        Ok(Some(Standardized {
            primary,
            snnmm,
            glossary,
        }))
    }

    pub fn glossary_entry(&self, primary: &str) -> Option<GlossaryEntry> {
        self.get(Collection::Glossary, primary)
            .map(GlossaryEntry::from_record)
    }

    pub fn fulltext_search(
        &self,
        query: &str,
        collection: Option<Collection>,
        k: usize,
    ) -> Result<Vec<FulltextHit>, KbError> {
        let index = self.fulltext.as_ref().ok_or(KbError::IndexNotBuilt)?;
        Ok(index.search(query, collection, k, &self.tokenizer))
    }

    pub fn vector_search(
        &self,
        query: &str,
        k: usize,
        embedder: &dyn Embedder,
    ) -> Result<Vec<VectorHit>, KbError> {
        let index = self.vectors.as_ref().ok_or(KbError::IndexNotBuilt)?;
        index.search(query, k, embedder)
    }

    pub fn vector_index(&self) -> Option<&VectorIndex> {
        self.vectors.as_ref()
    }

    /// Per-collection counts plus the knowledge-category breakdown.
    pub fn stats(&self) -> KbStats {
        let collections = Collection::ALL
            .iter()
            .map(|&c| (c.as_str().to_string(), self.count(c)))
            .collect();

        let text_with_source = |source: &str| {
            self.records(Collection::Text)
                .filter(|r| r.field_str("source") == Some(source))
                .count()
        };
        let distinct_snnmm_values = |key: &str| {
            self.records(Collection::Snnmm)
                .flat_map(|r| r.field_list(key))
                .collect::<BTreeSet<String>>()
                .len()
        };

        let categories = vec![
            CategoryCount {
                category: "NMM".to_string(),
                count: self.count(Collection::Snnmm),
            },
            CategoryCount {
                category: "NMM knowledge".to_string(),
                count: self.count(Collection::Knowledge),
            },
            CategoryCount {
                category: "NMM standardized translation".to_string(),
                count: self.count(Collection::Glossary),
            },
            CategoryCount {
                category: "NMM text in ChP-2020".to_string(),
                count: text_with_source("ChP-2020"),
            },
            CategoryCount {
                category: "NMM text in ChP-2015".to_string(),
                count: text_with_source("ChP-2015"),
            },
            CategoryCount {
                category: "NMM synonym".to_string(),
                count: self.count(Collection::Relation),
            },
            CategoryCount {
                category: "Species origin".to_string(),
                count: distinct_snnmm_values("species_origins"),
            },
            CategoryCount {
                category: "Medicinal part".to_string(),
                count: distinct_snnmm_values("medicinal_parts"),
            },
            CategoryCount {
                category: "Processing method".to_string(),
                count: distinct_snnmm_values("processing_methods"),
            },
        ];

        KbStats {
            collections,
            categories,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn import(kb: &mut KnowledgeBase, collection: Collection, lines: &str) -> ImportReport {
        kb.import_reader(lines.as_bytes(), collection).unwrap()
    }

    fn sample_kb() -> KnowledgeBase {
        let tokenizer = Tokenizer::with_lexicon(["麻黄", "草麻黄", "草质茎", "木贼", "中"]);
        let mut kb = KnowledgeBase::new(tokenizer);
        import(
            &mut kb,
            Collection::Snnmm,
            concat!(
                r#"{"id":"nmm-0006","nmm_id":"NMM-0006","nmmsn":"Ephedra equisetina vel intermedia vel sinica Stem-herbaceous","nmmsn_zh":"木贼麻黄或中麻黄或草麻黄草质茎","nmmgn":"Ma-huang","nmmgn_zh":"麻黄","species_origins":["Ephedra equisetina","Ephedra intermedia","Ephedra sinica"],"medicinal_parts":["stem herbaceous"],"processing_methods":[]}"#,
                "\n",
                r#"{"id":"nmm-0003","nmm_id":"NMM-0003","nmmsn":"Ephedra sinica Stem-herbaceous","nmmsn_zh":"草麻黄草质茎","nmmgn":"Cao-ma-huang","nmmgn_zh":"草麻黄","species_origins":["Ephedra sinica"],"medicinal_parts":["stem herbaceous"],"processing_methods":[]}"#,
                "\n",
            ),
        );
        import(
            &mut kb,
            Collection::Glossary,
            concat!(
                r#"{"id":"nmm-0006","en":"Ephedra equisetina vel intermedia vel sinica Stem-herbaceous (NMM-0006, Ma-huang)","zh":"木贼麻黄或中麻黄或草麻黄草质茎（NMM-0006，麻黄）"}"#,
                "\n",
            ),
        );
        import(
            &mut kb,
            Collection::Relation,
            concat!(
                r#"{"id":"rel-1","from_term":"麻黄","to_term":"nmm-0006","weight":2,"note":"synonym"}"#,
                "\n",
                r#"{"id":"rel-2","from_term":"麻黄","to_term":"nmm-0003","weight":1,"note":"synonym"}"#,
                "\n",
                r#"{"id":"rel-3","from_term":"草麻黄","to_term":"nmm-0003","weight":1,"note":"synonym"}"#,
                "\n",
            ),
        );
        kb
    }

    #[test]
    fn import_counts_and_reports_bad_lines() {
        let mut kb = KnowledgeBase::new(Tokenizer::new());
        let report = import(
            &mut kb,
            Collection::Knowledge,
            "{\"id\":\"k1\",\"nmm_id\":\"NMM-0001\"}\nnot json\n{\"id\":\"k2\"}\n{\"id\":\"k3\",\"nmm_id\":\"NMM-0003\"}\n",
        );
        assert_eq!(report.imported, 2);
        assert_eq!(report.issues.len(), 2);
        assert_eq!(report.issues[0].line, 2);
        assert_eq!(report.issues[1].line, 3);
        assert!(report.issues[1].reason.contains("nmm_id"));
    }

    #[test]
    fn import_is_idempotent() {
        let lines = r#"{"id":"k1","nmm_id":"NMM-0001"}"#;
        let mut kb = KnowledgeBase::new(Tokenizer::new());
        import(&mut kb, Collection::Knowledge, lines);
        let first: Vec<KbRecord> = kb.records(Collection::Knowledge).cloned().collect();
        import(&mut kb, Collection::Knowledge, lines);
        let second: Vec<KbRecord> = kb.records(Collection::Knowledge).cloned().collect();
        assert_eq!(first, second);
    }

    #[test]
    fn standardization_follows_the_weighted_graph() {
        let mut kb = sample_kb();
        kb.build_relation_graph().unwrap();
        let hit = kb.standardize("麻黄").unwrap().unwrap();
        assert_eq!(hit.primary, "nmm-0006");
        assert_eq!(
            hit.glossary.unwrap().rendering("en"),
            Some("Ephedra equisetina vel intermedia vel sinica Stem-herbaceous (NMM-0006, Ma-huang)")
        );
        assert_eq!(hit.snnmm.unwrap().field_str("nmmgn"), Some("Ma-huang"));
    }

    #[test]
    fn primaries_standardize_to_themselves() {
        let mut kb = sample_kb();
        kb.build_relation_graph().unwrap();
        let hit = kb.standardize("nmm-0006").unwrap().unwrap();
        assert_eq!(hit.primary, "nmm-0006");
    }

    #[test]
    fn unknown_term_standardizes_to_none() {
        let mut kb = sample_kb();
        kb.build_relation_graph().unwrap();
        assert!(kb.standardize("无此词").unwrap().is_none());
    }

    #[test]
    fn standardize_composes_with_resolve() {
        let mut kb = sample_kb();
        kb.build_relation_graph().unwrap();
        let terms: Vec<String> = kb.resolvable_terms().map(str::to_string).collect();
        assert!(!terms.is_empty());
        for term in terms {
            let primary = kb.resolve_term(&term).unwrap().unwrap().to_string();
            assert_eq!(kb.standardize(&term).unwrap().unwrap().primary, primary);
        }
    }

    #[test]
    fn searches_require_built_indexes() {
        let kb = sample_kb();
        assert!(matches!(
            kb.fulltext_search("麻黄", None, 5),
            Err(KbError::IndexNotBuilt)
        ));
        let embedder = HashedBagEmbedder::new(kb.tokenizer().clone());
        assert!(matches!(
            kb.vector_search("麻黄", 5, &embedder),
            Err(KbError::IndexNotBuilt)
        ));
        assert!(matches!(kb.resolve_term("麻黄"), Err(KbError::IndexNotBuilt)));
    }

    #[test]
    fn stats_lists_the_nine_categories() {
        let kb = sample_kb();
        let stats = kb.stats();
        let names: Vec<&str> = stats.categories.iter().map(|c| c.category.as_str()).collect();
        assert_eq!(
            names,
            [
                "NMM",
                "NMM knowledge",
                "NMM standardized translation",
                "NMM text in ChP-2020",
                "NMM text in ChP-2015",
                "NMM synonym",
                "Species origin",
                "Medicinal part",
                "Processing method",
            ]
        );
        assert_eq!(stats.collections["snnmm"], 2);
        assert_eq!(stats.collections["relation"], 3);
        let species = stats.categories.iter().find(|c| c.category == "Species origin").unwrap();
        assert_eq!(species.count, 3);
    }

    #[test]
    fn find_record_scans_collections() {
        let kb = sample_kb();
        assert_eq!(kb.find_record("nmm-0003").unwrap().collection, Collection::Snnmm);
        assert!(kb.find_record("missing").is_none());
    }
}
