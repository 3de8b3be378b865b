//! Document–summary matching with hidden topics.
//!
//! A long document is represented by the matrix `W` of its word vectors.
//! Its hidden topics are the `K` orthonormal directions that best
//! reconstruct those vectors (the leading left singular vectors of `W`), each
//! weighted by the share of the document's energy it captures. A short
//! summary is scored by how well each topic reconstructs the summary's own
//! word vectors, averaged over words and weighted by topic importance.
//!
//! ```
//! use hidden_topics::{match_score, EmbeddingStore, Stoplist};
//!
//! let store = EmbeddingStore::from_entries(
//!     2,
//!     [("gene", [1.0, 0.1]), ("dna", [0.9, 0.0]), ("rain", [0.0, 1.0])],
//! )
//! .unwrap();
//! let stop = Stoplist::english();
//! let on_topic = match_score("gene dna gene", "dna", &store, 15, &stop).unwrap();
//! let off_topic = match_score("gene dna gene", "rain", &store, 15, &stop).unwrap();
//! assert!(on_topic > off_topic);
//! ```

pub mod corpus_io;
pub mod embeddings;
pub mod eval;
pub mod linalg;
pub mod pipeline;
pub mod preprocess;
pub mod relevance;
pub mod synthetic;
pub mod topics;

pub use corpus_io::{Corpus, LabeledPair, RankingCategory};
pub use embeddings::{EmbeddingError, EmbeddingStore};
pub use eval::{
    classification_metrics, cross_validate, precision_at_k, precision_histogram, rank_documents,
    tune_threshold, ClassificationStats, EvalError, Metrics, RankedDocument, RankingStats,
};
pub use linalg::{top_k_svd, LinalgError, Matrix, SvdOptions, TruncatedSvd};
pub use pipeline::{match_score, MatchError, MatchReport, Matcher, PreparedDocument};
pub use preprocess::{build_matrix, remove_stopwords, tokenize, DocumentMatrix, Stoplist, TokenSequence};
pub use relevance::{
    baseline_avg_cosine, document_summary_relevance, topic_summary_relevance, word_topic_relevance,
    RelevanceReport, SummaryMatrix,
};
pub use topics::{extract_topics, TopicModel, TopicWord, DEFAULT_K};
