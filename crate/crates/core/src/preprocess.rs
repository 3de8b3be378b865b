//! Text → token sequence → column matrix of in-vocabulary word vectors.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::embeddings::EmbeddingStore;
use crate::linalg::Matrix;

const DEFAULT_STOPLIST: &str = include_str!("../data/stoplist.txt");

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("no in-vocabulary content words ({oov} tokens out of vocabulary)")]
    NoContent { oov: usize },
    #[error("column {column} ({token:?}) has {found} components, expected {expected}")]
    DimensionMismatch {
        column: usize,
        token: String,
        expected: usize,
        found: usize,
    },
    #[error("column {column} ({token:?}) is zero or non-finite")]
    InvalidColumn { column: usize, token: String },
    #[error("{columns} columns but {tokens} tokens")]
    TokenCountMismatch { columns: usize, tokens: usize },
    #[error("failed to read stoplist: {0}")]
    Io(#[from] std::io::Error),
}

/// Lowercase tokens in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSequence(Vec<String>);

impl TokenSequence {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSequence {
    /// Collects tokens as given; empty strings are skipped.
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(
            iter.into_iter()
                .map(Into::into)
                .filter(|t: &String| !t.is_empty())
                .collect(),
        )
    }
}

/// Splits on every non-alphanumeric character, lowercases, and drops tokens
/// made only of digits.
pub fn tokenize(text: &str) -> TokenSequence {
    TokenSequence(
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty() && !t.chars().all(char::is_numeric))
            .map(str::to_lowercase)
            .collect(),
    )
}

/// Set of lowercase tokens removed before matrix construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist(HashSet<String>);

impl Stoplist {
    /// The bundled English stop words and prepositions.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPLIST)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// One token per line; blank lines and lines starting with `#` are
    /// skipped. Entries are lowercased.
    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PreprocessError> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stoplist {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(Into::into).collect())
    }
}

/// Order-preserving filter.
pub fn remove_stopwords(seq: &TokenSequence, stoplist: &Stoplist) -> TokenSequence {
    TokenSequence(
        seq.0
            .iter()
            .filter(|t| !stoplist.contains(t))
            .cloned()
            .collect(),
    )
}

/// `d × n` matrix of word vectors plus the token behind each column.
///
/// Every column is finite and nonzero. Repeated words keep repeated columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentMatrix {
    matrix: Matrix,
    tokens: Vec<String>,
    oov: usize,
}

impl DocumentMatrix {
    /// Wraps an existing matrix, validating the column invariants.
    pub fn new(matrix: Matrix, tokens: Vec<String>) -> Result<Self, PreprocessError> {
        if matrix.cols() != tokens.len() {
            return Err(PreprocessError::TokenCountMismatch {
                columns: matrix.cols(),
                tokens: tokens.len(),
            });
        }
        if matrix.cols() == 0 {
            return Err(PreprocessError::NoContent { oov: 0 });
        }
        for (column, col) in matrix.columns().enumerate() {
            if col.iter().any(|v| !v.is_finite()) || col.iter().all(|&v| v == 0.0) {
                return Err(PreprocessError::InvalidColumn {
                    column,
                    token: tokens[column].clone(),
                });
            }
        }
        Ok(Self {
            matrix,
            tokens,
            oov: 0,
        })
    }

    /// Same as [`new`](Self::new) with generated tokens `w0, w1, …`.
    pub fn from_matrix(matrix: Matrix) -> Result<Self, PreprocessError> {
        let tokens = (0..matrix.cols()).map(|j| format!("w{j}")).collect();
        Self::new(matrix, tokens)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Column count `n`.
    pub fn len(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tokens dropped because they were missing from the store or mapped to
    /// a zero vector.
    pub fn oov(&self) -> usize {
        self.oov
    }
}

/// Stacks the vector of every in-vocabulary token, in order.
pub fn build_matrix(
    seq: &TokenSequence,
    store: &EmbeddingStore,
) -> Result<DocumentMatrix, PreprocessError> {
    let mut data = Vec::new();
    let mut tokens = Vec::new();
    let mut oov = 0;
    for token in seq.tokens() {
        match store.lookup(token) {
            Some(v) if v.iter().any(|&x| x != 0.0) => {
                data.extend_from_slice(v);
                tokens.push(token.clone());
            }
            _ => oov += 1,
        }
    }
    if tokens.is_empty() {
        return Err(PreprocessError::NoContent { oov });
    }
    Ok(DocumentMatrix {
        matrix: Matrix::from_col_major(store.dim(), tokens.len(), data),
        tokens,
        oov,
    })
}

/// `tokenize → remove_stopwords → build_matrix`.
pub fn text_to_matrix(
    text: &str,
    stoplist: &Stoplist,
    store: &EmbeddingStore,
) -> Result<DocumentMatrix, PreprocessError> {
    build_matrix(&remove_stopwords(&tokenize(text), stoplist), store)
}
