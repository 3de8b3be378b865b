//! Relevance of a summary to a document's topics.
//!
//! Each summary word is projected onto each topic; the cosine between the
//! word and its projection measures how well the topic explains the word.
//! Cosines are averaged over the summary words and then combined across
//! topics with the normalised topic importances as weights.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{dot, norm, Matrix};
use crate::preprocess::{DocumentMatrix, PreprocessError};
use crate::topics::TopicModel;

/// Projections shorter than this count as "not reconstructed at all".
pub const ZERO_PROJECTION_NORM: f64 = 1e-12;

/// Allowed deviation of a topic vector's norm from one.
pub const UNIT_NORM_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum RelevanceError {
    #[error("summary word vector is zero")]
    ZeroWord,
    #[error("topic vector norm {0} is not 1")]
    NotUnit(f64),
    #[error("summary has no words")]
    EmptySummary,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// `d × m` matrix of summary word vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryMatrix(DocumentMatrix);

impl SummaryMatrix {
    pub fn new(matrix: Matrix, tokens: Vec<String>) -> Result<Self, PreprocessError> {
        DocumentMatrix::new(matrix, tokens).map(Self)
    }

    pub fn from_matrix(matrix: Matrix) -> Result<Self, PreprocessError> {
        DocumentMatrix::from_matrix(matrix).map(Self)
    }

    pub fn matrix(&self) -> &Matrix {
        self.0.matrix()
    }

    pub fn tokens(&self) -> &[String] {
        self.0.tokens()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn oov(&self) -> usize {
        self.0.oov()
    }

    pub fn as_document(&self) -> &DocumentMatrix {
        &self.0
    }
}

impl From<DocumentMatrix> for SummaryMatrix {
    fn from(doc: DocumentMatrix) -> Self {
        Self(doc)
    }
}

/// Per-topic relevances and the importance-weighted score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelevanceReport {
    pub per_topic: Vec<f64>,
    pub score: f64,
    pub effective_k: usize,
}

/// Cosine between `s` and its projection `h hᵀ s` onto the unit vector `h`.
///
/// Equals `|cos(h, s)|`. A word orthogonal to `h` has no projection and
/// scores 0.
pub fn word_topic_relevance(h: &[f64], s: &[f64]) -> Result<f64, RelevanceError> {
    if h.len() != s.len() {
        return Err(RelevanceError::DimensionMismatch {
            expected: h.len(),
            found: s.len(),
        });
    }
    let h_norm = norm(h);
    if (h_norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(RelevanceError::NotUnit(h_norm));
    }
    let s_norm = norm(s);
    if s_norm == 0.0 {
        return Err(RelevanceError::ZeroWord);
    }
    Ok(projection_cosine(h, s, s_norm))
}

fn projection_cosine(h: &[f64], s: &[f64], s_norm: f64) -> f64 {
    let c = dot(h, s);
    let projected: Vec<f64> = h.iter().map(|x| c * x).collect();
    let p_norm = norm(&projected);
    if p_norm < ZERO_PROJECTION_NORM {
        return 0.0;
    }
    (dot(s, &projected) / (s_norm * p_norm)).clamp(0.0, 1.0)
}

/// Mean of [`word_topic_relevance`] over the summary words.
pub fn topic_summary_relevance(h: &[f64], summary: &SummaryMatrix) -> Result<f64, RelevanceError> {
    if summary.is_empty() {
        return Err(RelevanceError::EmptySummary);
    }
    let mut total = 0.0;
    for s in summary.matrix().columns() {
        total += word_topic_relevance(h, s)?;
    }
    Ok(total / summary.len() as f64)
}

/// `Σₖ īₖ · r(hₖ, S)`.
pub fn document_summary_relevance(
    model: &TopicModel,
    summary: &SummaryMatrix,
) -> Result<RelevanceReport, RelevanceError> {
    if model.dim() != summary.dim() {
        return Err(RelevanceError::DimensionMismatch {
            expected: model.dim(),
            found: summary.dim(),
        });
    }
    let per_topic = (0..model.effective_k())
        .map(|k| topic_summary_relevance(model.topic(k), summary))
        .collect::<Result<Vec<_>, _>>()?;
    let score = dot(model.norm_importance(), &per_topic);
    Ok(RelevanceReport {
        per_topic,
        score,
        effective_k: model.effective_k(),
    })
}

/// Cosine between the mean document vector and the mean summary vector;
/// 0 when either mean vanishes.
pub fn baseline_avg_cosine(doc: &DocumentMatrix, summary: &SummaryMatrix) -> Result<f64, RelevanceError> {
    if doc.dim() != summary.dim() {
        return Err(RelevanceError::DimensionMismatch {
            expected: doc.dim(),
            found: summary.dim(),
        });
    }
    if summary.is_empty() {
        return Err(RelevanceError::EmptySummary);
    }
    let a = column_mean(doc.matrix());
    let b = column_mean(summary.matrix());
    let (na, nb) = (norm(&a), norm(&b));
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot(&a, &b) / (na * nb)).clamp(-1.0, 1.0))
}

fn column_mean(m: &Matrix) -> Vec<f64> {
    let mut mean = vec![0.0; m.rows()];
    for c in m.columns() {
        for (acc, x) in mean.iter_mut().zip(c) {
            *acc += x;
        }
    }
    let n = m.cols() as f64;
    mean.iter_mut().for_each(|x| *x /= n);
    mean
}
