//! In-memory inverted index with term-frequency ranking.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::record::{Collection, KbRecord};
use super::tokenizer::Tokenizer;

type DocKey = (Collection, String);

/// A ranked full-text hit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FulltextHit {
    pub collection: Collection,
    pub id: String,
    pub score: usize,
}

/// Inverted index: token to per-document term frequency.
#[derive(Debug, Clone, Default)]
pub struct FulltextIndex {
    postings: BTreeMap<String, BTreeMap<DocKey, usize>>,
    doc_count: usize,
}

impl FulltextIndex {
    pub fn build<'a, I>(records: I, tokenizer: &Tokenizer) -> FulltextIndex
    where
        I: IntoIterator<Item = &'a KbRecord>,
    {
        let mut index = FulltextIndex::default();
        for record in records {
            let key = (record.collection, record.id.clone());
            for token in tokenizer.token_texts(&record.full_text()) {
                *index
                    .postings
                    .entry(token)
                    .or_default()
                    .entry(key.clone())
                    .or_insert(0) += 1;
            }
            index.doc_count += 1;
        }
        index
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    /// Tokenizes the query with the index-time tokenizer and ranks documents
    /// by the summed frequency of the distinct query tokens, descending, then
    /// by id for a stable order. Documents sharing no token are not returned.
    pub fn search(
        &self,
        query: &str,
        collection: Option<Collection>,
        k: usize,
        tokenizer: &Tokenizer,
    ) -> Vec<FulltextHit> {
        let mut terms = tokenizer.token_texts(query);
        terms.sort();
        terms.dedup();

        let mut scores: BTreeMap<&DocKey, usize> = BTreeMap::new();
        for term in &terms {
            if let Some(postings) = self.postings.get(term) {
                for (doc, tf) in postings {
                    if collection.is_some_and(|c| c != doc.0) {
                        continue;
                    }
                    *scores.entry(doc).or_insert(0) += tf;
                }
            }
        }

        let mut hits: Vec<FulltextHit> = scores
            .into_iter()
            .map(|(doc, score)| FulltextHit {
                collection: doc.0,
                id: doc.1.clone(),
                score,
            })
            .collect();
        hits.sort_by(|a, b| {
            b.score
                .cmp(&a.score)
                .then_with(|| a.id.cmp(&b.id))
                .then_with(|| a.collection.cmp(&b.collection))
        });
        hits.truncate(k);
        hits
    }
}
