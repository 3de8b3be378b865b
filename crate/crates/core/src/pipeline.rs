//! End-to-end scoring: raw text in, relevance out.

use thiserror::Error;

use crate::embeddings::EmbeddingStore;
use crate::linalg::SvdOptions;
use crate::preprocess::{text_to_matrix, DocumentMatrix, PreprocessError, Stoplist};
use crate::relevance::{
    baseline_avg_cosine, document_summary_relevance, RelevanceError, RelevanceReport, SummaryMatrix,
};
use crate::topics::{extract_topics_with, TopicError, TopicModel, DEFAULT_K};

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("document has no usable content: {0}")]
    Document(#[source] PreprocessError),
    #[error("summary has no usable content: {0}")]
    Summary(#[source] PreprocessError),
    #[error("number of topics must be positive")]
    ZeroTopics,
    #[error(transparent)]
    Topics(#[from] TopicError),
    #[error(transparent)]
    Relevance(#[from] RelevanceError),
}

/// A document prepared for scoring: its word matrix and topic model.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedDocument {
    pub matrix: DocumentMatrix,
    pub model: TopicModel,
}

/// Shared scoring configuration bound to one embedding store.
#[derive(Debug, Clone)]
pub struct Matcher<'a> {
    store: &'a EmbeddingStore,
    stoplist: &'a Stoplist,
    k: usize,
    svd: SvdOptions,
}

impl<'a> Matcher<'a> {
    pub fn new(store: &'a EmbeddingStore, stoplist: &'a Stoplist, k: usize) -> Result<Self, MatchError> {
        if k == 0 {
            return Err(MatchError::ZeroTopics);
        }
        Ok(Self {
            store,
            stoplist,
            k,
            svd: SvdOptions::default(),
        })
    }

    pub fn with_default_k(store: &'a EmbeddingStore, stoplist: &'a Stoplist) -> Self {
        Self::new(store, stoplist, DEFAULT_K).expect("default K is positive")
    }

    pub fn with_svd_options(mut self, svd: SvdOptions) -> Self {
        self.svd = svd;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn store(&self) -> &EmbeddingStore {
        self.store
    }

    pub fn document_matrix(&self, text: &str) -> Result<DocumentMatrix, MatchError> {
        text_to_matrix(text, self.stoplist, self.store).map_err(MatchError::Document)
    }

    pub fn prepare_document(&self, text: &str) -> Result<PreparedDocument, MatchError> {
        let matrix = self.document_matrix(text)?;
        let model = extract_topics_with(&matrix, self.k, &self.svd)?;
        Ok(PreparedDocument { matrix, model })
    }

    pub fn prepare_summary(&self, text: &str) -> Result<SummaryMatrix, MatchError> {
        text_to_matrix(text, self.stoplist, self.store)
            .map(SummaryMatrix::from)
            .map_err(MatchError::Summary)
    }

    pub fn score_prepared(
        &self,
        doc: &PreparedDocument,
        summary: &SummaryMatrix,
    ) -> Result<RelevanceReport, MatchError> {
        Ok(document_summary_relevance(&doc.model, summary)?)
    }

    /// Full report for one document–summary pair.
    pub fn report(&self, doc_text: &str, summary_text: &str) -> Result<MatchReport, MatchError> {
        let doc = self.prepare_document(doc_text)?;
        let summary = self.prepare_summary(summary_text)?;
        let relevance = self.score_prepared(&doc, &summary)?;
        let baseline = baseline_avg_cosine(&doc.matrix, &summary)?;
        Ok(MatchReport {
            relevance,
            doc,
            summary,
            baseline,
        })
    }

    pub fn score(&self, doc_text: &str, summary_text: &str) -> Result<f64, MatchError> {
        let doc = self.prepare_document(doc_text)?;
        let summary = self.prepare_summary(summary_text)?;
        Ok(self.score_prepared(&doc, &summary)?.score)
    }
}

/// Everything computed while matching one pair.
#[derive(Debug, Clone)]
pub struct MatchReport {
    pub relevance: RelevanceReport,
    pub doc: PreparedDocument,
    pub summary: SummaryMatrix,
    pub baseline: f64,
}

/// Relevance of `summary_text` to `doc_text`, in `[0, 1]`.
pub fn match_score(
    doc_text: &str,
    summary_text: &str,
    store: &EmbeddingStore,
    k: usize,
    stoplist: &Stoplist,
) -> Result<f64, MatchError> {
    Matcher::new(store, stoplist, k)?.score(doc_text, summary_text)
}
