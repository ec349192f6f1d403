//! Vector index over record embeddings, ranked by cosine similarity.

use serde::{Deserialize, Serialize};

use super::record::{Collection, KbRecord};
use super::tokenizer::Tokenizer;
use super::KbError;

/// Text embedding backend. Implementations must be deterministic and emit
/// L2-normalized vectors of a fixed dimension.
pub trait Embedder {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Vec<f32>;
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Deterministic test embedder: tokens hash into a fixed number of buckets,
/// counts are L2-normalized. Texts with no tokens embed to the zero vector.
#[derive(Debug, Clone)]
pub struct HashedBagEmbedder {
    dim: usize,
    tokenizer: Tokenizer,
}

impl HashedBagEmbedder {
    pub const DEFAULT_DIM: usize = 64;

    pub fn new(tokenizer: Tokenizer) -> Self {
        Self::with_dim(Self::DEFAULT_DIM, tokenizer)
    }

    pub fn with_dim(dim: usize, tokenizer: Tokenizer) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        HashedBagEmbedder { dim, tokenizer }
    }

    /// Bucket index a token hashes into; exposed so tests can verify
    /// collision-freedom of hand-computed expectations.
    pub fn bucket(&self, token: &str) -> usize {
        (fnv1a(token.as_bytes()) % self.dim as u64) as usize
    }
}

impl Embedder for HashedBagEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Vec<f32> {
        let mut vector = vec![0.0f32; self.dim];
        for token in self.tokenizer.token_texts(text) {
            vector[self.bucket(&token)] += 1.0;
        }
        let norm = vector.iter().map(|x| x * x).sum::<f32>().sqrt();
        if norm > 0.0 {
            for x in &mut vector {
                *x /= norm;
            }
        }
        vector
    }
}

/// A ranked vector hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorHit {
    pub collection: Collection,
    pub id: String,
    pub similarity: f64,
}

/// Stored embeddings of every indexed record.
#[derive(Debug, Clone)]
pub struct VectorIndex {
    dim: usize,
    entries: Vec<(Collection, String, Vec<f32>)>,
}

impl VectorIndex {
    /// Embeds every record's full text. Records whose text has no tokens
    /// (zero-norm embedding) are skipped so that all stored vectors are unit
    /// length.
    pub fn build<'a, I>(records: I, embedder: &dyn Embedder) -> VectorIndex
    where
        I: IntoIterator<Item = &'a KbRecord>,
    {
        let mut entries = Vec::new();
        for record in records {
            let vector = embedder.embed(&record.full_text());
            let norm: f32 = vector.iter().map(|x| x * x).sum::<f32>().sqrt();
            if norm > 0.0 {
                entries.push((record.collection, record.id.clone(), vector));
            }
        }
        VectorIndex {
            dim: embedder.dim(),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Norms of all stored vectors; used by the embedder-normalization check.
    pub fn stored_norms(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|(_, _, v)| v.iter().map(|x| (*x as f64) * (*x as f64)).sum::<f64>().sqrt())
            .collect()
    }

    /// Top-k records by cosine similarity to the query, ties broken by id.
    pub fn search(
        &self,
        query: &str,
        k: usize,
        embedder: &dyn Embedder,
    ) -> Result<Vec<VectorHit>, KbError> {
        if embedder.dim() != self.dim {
            return Err(KbError::DimensionMismatch {
                expected: self.dim,
                got: embedder.dim(),
            });
        }
        if self.entries.is_empty() {
            return Err(KbError::EmptyIndex);
        }
        let query_vec = embedder.embed(query);
        let mut hits: Vec<VectorHit> = self
            .entries
            .iter()
            .map(|(collection, id, stored)| {
                let dot: f64 = query_vec
                    .iter()
                    .zip(stored)
                    .map(|(a, b)| (*a as f64) * (*b as f64))
                    .sum();
                VectorHit {
                    collection: *collection,
                    id: id.clone(),
                    similarity: dot,
                }
            })
            .collect();
        hits.sort_by(|a, b| {
            b.similarity
                .partial_cmp(&a.similarity)
                .expect("similarities are finite")
                .then_with(|| a.id.cmp(&b.id))
                .then_with(|| a.collection.cmp(&b.collection))
        });
        hits.truncate(k);
        Ok(hits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, body: &str) -> KbRecord {
        KbRecord {
            id: id.to_string(),
            collection: Collection::Text,
            fields: Default::default(),
            body: Some(body.to_string()),
        }
    }

    fn embedder() -> HashedBagEmbedder {
        HashedBagEmbedder::new(Tokenizer::with_lexicon(["麻黄", "草质茎"]))
    }

    #[test]
    fn identical_text_has_unit_similarity() {
        let docs = vec![record("a", "麻黄草质茎"), record("b", "something else")];
        let index = VectorIndex::build(&docs, &embedder());
        let hits = index.search("麻黄草质茎", 2, &embedder()).unwrap();
        assert_eq!(hits[0].id, "a");
        assert!((hits[0].similarity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn embedding_is_deterministic_and_normalized() {
        let e = embedder();
        let v1 = e.embed("麻黄 token stream");
        let v2 = e.embed("麻黄 token stream");
        assert_eq!(v1, v2);
        let norm: f32 = v1.iter().map(|x| x * x).sum::<f32>().sqrt();
        assert!((norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn disjoint_token_sets_score_zero_without_collisions() {
        let e = embedder();
        // Verify the involved tokens occupy distinct buckets before asserting
        // orthogonality.
        let buckets: Vec<usize> = ["alpha", "beta", "gamma", "delta"]
            .iter()
            .map(|t| e.bucket(t))
            .collect();
        let mut unique = buckets.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), buckets.len(), "fixture tokens collide: {buckets:?}");

        let docs = vec![record("a", "alpha beta"), record("b", "gamma delta")];
        let index = VectorIndex::build(&docs, &e);
        let hits = index.search("alpha beta", 2, &e).unwrap();
        assert_eq!(hits[0].id, "a");
        assert!(hits[1].similarity.abs() < 1e-9);
    }

    #[test]
    fn partial_overlap_cosine_matches_hand_computation() {
        let e = embedder();
        let tokens = ["one", "two", "three", "four"];
        let buckets: Vec<usize> = tokens.iter().map(|t| e.bucket(t)).collect();
        let mut unique = buckets.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), tokens.len(), "fixture tokens collide: {buckets:?}");

        // Query shares 2 of 3 tokens with doc a and none with doc b:
        // cosine(query, a) = 2 / (sqrt(3) * sqrt(3)) = 2/3.
        let docs = vec![record("a", "one two three"), record("b", "four four four")];
        let index = VectorIndex::build(&docs, &e);
        let hits = index.search("one two four", 2, &e).unwrap();
        assert_eq!(hits[0].id, "a");
        let expected = 2.0 / 3.0;
        assert!((hits[0].similarity - expected).abs() < 1e-6, "{}", hits[0].similarity);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let docs = vec![record("a", "x")];
        let index = VectorIndex::build(&docs, &embedder());
        let other = HashedBagEmbedder::with_dim(32, Tokenizer::new());
        assert!(matches!(
            index.search("x", 1, &other),
            Err(KbError::DimensionMismatch { expected: 64, got: 32 })
        ));
    }

    #[test]
    fn empty_index_is_an_error() {
        let index = VectorIndex::build(std::iter::empty(), &embedder());
        assert!(matches!(
            index.search("x", 1, &embedder()),
            Err(KbError::EmptyIndex)
        ));
    }

    #[test]
    fn stored_norms_are_unit() {
        let docs = vec![record("a", "麻黄"), record("b", "麻黄草质茎 extra")];
        let index = VectorIndex::build(&docs, &embedder());
        for norm in index.stored_norms() {
            assert!((norm - 1.0).abs() < 1e-6);
        }
    }
}
