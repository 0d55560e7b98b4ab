//! Semantic question answering over a plain-text corpus.
//!
//! A question is tokenized, stop-filtered and POS-tagged, its keywords are
//! expanded with thesaurus synonyms, and candidates are retrieved by
//! edge-count similarity against a rooted is-a taxonomy. Documents and words
//! are fuzzy co-clustered (FCCM, Fuzzy CoDoK or FCC_STF), and answers are
//! prioritized with a two-level fuzzy scale: type-1 membership for documents,
//! interval type-2 membership bands for words.

pub mod cocluster;
pub mod engine;
pub mod fuzzyscale;
pub mod ontology;
pub mod textprep;
pub mod thesaurus;

pub use cocluster::{CoClusterConfig, CoClusterModel, TermDocMatrix, Variant};
pub use engine::{Corpus, Document, Index, QueryOptions};
pub use fuzzyscale::{IntervalType2Membership, ScoredAnswer, SenseBank, Type1Membership};
pub use ontology::{SimilarityParams, Taxonomy};
pub use textprep::{Keyword, PosTag, Stoplist, TagLexicon, Token};
pub use thesaurus::{QueryVariant, Thesaurus};
