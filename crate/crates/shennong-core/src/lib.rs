//! Knowledge engineering toolkit for Natural Medicinal Materials (NMMs):
//! systematic-name construction, a multilingual markup language, coreference
//! graph search, a searchable knowledge base, glossary-constrained
//! translation, and grounded chat — all with deterministic offline backends.

pub mod cgs;
pub mod kb;
pub mod mlmd;
pub mod nmtcpt;
pub mod rag;
pub mod snnmm;

pub use cgs::{build_graph, resolve, resolve_all, resolve_path, CgsError, CgsMode, Cptg, EdgeSpec};
pub use kb::{
    Collection, Embedder, GlossaryEntry, HashedBagEmbedder, KbError, KbRecord, KnowledgeBase,
    Tokenizer,
};
pub use mlmd::{DisplayMode, MlmdDocument, MlmdError};
pub use nmtcpt::{
    AnnotatedTranslation, Direction, IdentityBackend, NmtCptError, PhraseTableBackend, Span,
    TranslationBackend, TranslationRequest,
};
pub use rag::{
    answer, AnswerComposer, ChatTurn, DeterministicJudge, JudgeMode, SufficiencyJudge,
    TemplateComposer,
};
pub use snnmm::{
    construct_nmmsn, make_generic_name, nmm_id_decode, nmm_id_encode, pinyinize_toned,
    ConstructOutput, NmmId, NmmsnRequest, PinyinTable,
};
