//! Pre-trained word vectors in the whitespace text format:
//!
//! ```text
//! <vocab_count> <dim>
//! <token> <v_1> ... <v_dim>
//! ```
//!
//! Vectors are kept exactly as read; nothing is normalized.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("embedding file is empty")]
    EmptyFile,
    #[error("line {line}: malformed header, expected \"<vocab_count> <dim>\" with dim > 0")]
    MalformedHeader { line: usize },
    #[error("line {line}: expected {expected} components, found {found}")]
    WrongComponentCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: component {component} is not a number: {value:?}")]
    InvalidNumber {
        line: usize,
        component: usize,
        value: String,
    },
    #[error("line {line}: component {component} is not finite")]
    NonFinite { line: usize, component: usize },
    #[error("line {line}: header declares {declared} entries but the file has {found}")]
    CountMismatch {
        line: usize,
        declared: usize,
        found: usize,
    },
    #[error("vector for {token:?} has {found} components, store dimension is {expected}")]
    DimensionMismatch {
        token: String,
        expected: usize,
        found: usize,
    },
    #[error("vector for {token:?} contains a non-finite component")]
    NonFiniteVector { token: String },
    #[error("empty token")]
    EmptyToken,
    #[error("embedding dimension must be positive")]
    ZeroDimension,
}

/// Immutable token → vector map. All vectors share one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    duplicates: usize,
}

impl EmbeddingStore {
    /// Builds a store from in-memory entries. Duplicate tokens keep their
    /// first vector and are tallied in [`duplicates`](Self::duplicates).
    pub fn from_entries<I, S, V>(dim: usize, entries: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (S, V)>,
        S: Into<String>,
        V: AsRef<[f64]>,
    {
        let mut store = Self::with_dim(dim)?;
        for (token, vector) in entries {
            let token = token.into();
            let vector = vector.as_ref();
            if vector.len() != dim {
                return Err(EmbeddingError::DimensionMismatch {
                    token,
                    expected: dim,
                    found: vector.len(),
                });
            }
            if vector.iter().any(|v| !v.is_finite()) {
                return Err(EmbeddingError::NonFiniteVector { token });
            }
            store.insert(token, vector)?;
        }
        Ok(store)
    }

    fn with_dim(dim: usize) -> Result<Self, EmbeddingError> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDimension);
        }
        Ok(Self {
            dim,
            index: HashMap::new(),
            data: Vec::new(),
            duplicates: 0,
        })
    }

    fn insert(&mut self, token: String, vector: &[f64]) -> Result<(), EmbeddingError> {
        if token.is_empty() {
            return Err(EmbeddingError::EmptyToken);
        }
        if self.index.contains_key(&token) {
            self.duplicates += 1;
            return Ok(());
        }
        self.index.insert(token, self.index.len());
        self.data.extend_from_slice(vector);
        Ok(())
    }

    /// Loads the whitespace text format from `path`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, EmbeddingError> {
        let file = File::open(path)?;
        Self::from_reader(BufReader::new(file))
    }

    /// Parses the whitespace text format. LF and CRLF line endings are both
    /// accepted; trailing blank lines are ignored.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, EmbeddingError> {
        let mut lines = reader.lines().enumerate();
        let (count, dim) = loop {
            match lines.next() {
                None => return Err(EmbeddingError::EmptyFile),
                Some((_, line)) => {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    break parse_header(&line).ok_or(EmbeddingError::MalformedHeader { line: 1 })?;
                }
            }
        };

        let mut store = Self::with_dim(dim)?;
        store.index.reserve(count);
        store.data.reserve(count.saturating_mul(dim));
        let mut vector = Vec::with_capacity(dim);
        let mut entries = 0usize;
        let mut last_line = 1;

        for (i, line) in lines {
            let line = line?;
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            last_line = line_no;
            if entries == count {
                return Err(EmbeddingError::CountMismatch {
                    line: line_no,
                    declared: count,
                    found: entries + 1,
                });
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().unwrap_or_default().to_string();
            vector.clear();
            for (component, field) in fields.enumerate() {
                let value: f64 = field.parse().map_err(|_| EmbeddingError::InvalidNumber {
                    line: line_no,
                    component: component + 1,
                    value: field.to_string(),
                })?;
                if !value.is_finite() {
                    return Err(EmbeddingError::NonFinite {
                        line: line_no,
                        component: component + 1,
                    });
                }
                vector.push(value);
            }
            if vector.len() != dim {
                return Err(EmbeddingError::WrongComponentCount {
                    line: line_no,
                    expected: dim,
                    found: vector.len(),
                });
            }
            store.insert(token, &vector)?;
            entries += 1;
        }

        if entries != count {
            return Err(EmbeddingError::CountMismatch {
                line: last_line,
                declared: count,
                found: entries,
            });
        }
        Ok(store)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct tokens.
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Duplicate entries that were skipped while building the store.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Case-sensitive lookup.
    pub fn lookup(&self, token: &str) -> Option<&[f64]> {
        self.index
            .get(token)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut fields = line.split_whitespace();
    let count = fields.next()?.parse().ok()?;
    let dim: usize = fields.next()?.parse().ok()?;
    if fields.next().is_some() || dim == 0 {
        return None;
    }
    Some((count, dim))
}
