//! Hidden topics of a document.
//!
//! The `K` topics are the orthonormal vectors `H` minimising the total squared
//! error of reconstructing every word vector `w` by its projection `H Hᵀ w`.
//! The minimiser is the leading `K` left singular vectors of the document
//! matrix `W`. A topic's importance is the energy it captures, `‖hᵀ W‖²`,
//! which equals the squared singular value; normalised importances sum to one
//! and weight the topics when scoring summaries.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::linalg::{self, dot, LinalgError, Matrix, SvdOptions};
use crate::preprocess::DocumentMatrix;

/// Number of topics used when the caller does not choose one.
pub const DEFAULT_K: usize = 15;

const MODEL_MAGIC: &str = "hidden-topics-model 1";

#[derive(Debug, Error)]
pub enum TopicError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("vector has dimension {found}, model dimension is {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("topic index {index} out of range (model has {k} topics)")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("document has zero energy")]
    ZeroEnergy,
    #[error("model file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Orthonormal topic vectors with their importances.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    topics: Matrix,
    raw_importance: Vec<f64>,
    norm_importance: Vec<f64>,
    requested_k: usize,
    frobenius_sq: f64,
}

/// Extracts `k` topics from `doc` with default solver tolerances.
pub fn extract_topics(doc: &DocumentMatrix, k: usize) -> Result<TopicModel, TopicError> {
    TopicModel::fit(doc.matrix(), k, &SvdOptions::default())
}

pub fn extract_topics_with(
    doc: &DocumentMatrix,
    k: usize,
    options: &SvdOptions,
) -> Result<TopicModel, TopicError> {
    TopicModel::fit(doc.matrix(), k, options)
}

impl TopicModel {
    /// Fits topics to the columns of `w`. `k` is clamped to `min(d, n)`.
    pub fn fit(w: &Matrix, k: usize, options: &SvdOptions) -> Result<Self, TopicError> {
        let svd = linalg::top_k_svd_with(w, k, options)?;
        let raw_importance: Vec<f64> = svd.singular_values().iter().map(|s| s * s).collect();
        let total: f64 = raw_importance.iter().sum();
        if total <= 0.0 {
            return Err(TopicError::ZeroEnergy);
        }
        let norm_importance = raw_importance.iter().map(|i| i / total).collect();
        Ok(Self {
            topics: svd.left_vectors().clone(),
            raw_importance,
            norm_importance,
            requested_k: k,
            frobenius_sq: w.frobenius_sq(),
        })
    }

    /// `d × K` matrix whose columns are the topic vectors.
    pub fn topics(&self) -> &Matrix {
        &self.topics
    }

    /// Topic vector `index` (zero-based).
    pub fn topic(&self, index: usize) -> &[f64] {
        self.topics.col(index)
    }

    pub fn dim(&self) -> usize {
        self.topics.rows()
    }

    /// Unnormalised importances `‖hₖᵀ W‖²`, nonincreasing.
    pub fn raw_importance(&self) -> &[f64] {
        &self.raw_importance
    }

    /// Importances rescaled to sum to one.
    pub fn norm_importance(&self) -> &[f64] {
        &self.norm_importance
    }

    pub fn effective_k(&self) -> usize {
        self.topics.cols()
    }

    pub fn requested_k(&self) -> usize {
        self.requested_k
    }

    /// True when the document was too small for the requested `K`.
    pub fn was_clamped(&self) -> bool {
        self.effective_k() < self.requested_k
    }

    /// `‖W‖²_F` of the source document.
    pub fn frobenius_sq(&self) -> f64 {
        self.frobenius_sq
    }

    fn check_dim(&self, len: usize) -> Result<(), TopicError> {
        if len != self.dim() {
            return Err(TopicError::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }

    fn project_unchecked(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; w.len()];
        for h in self.topics.columns() {
            let c = dot(h, w);
            for (o, &x) in out.iter_mut().zip(h) {
                *o += c * x;
            }
        }
        out
    }

    /// Projection `H Hᵀ w` of a word vector onto the topic subspace.
    pub fn reconstruct_word(&self, w: &[f64]) -> Result<Vec<f64>, TopicError> {
        self.check_dim(w.len())?;
        Ok(self.project_unchecked(w))
    }

    /// `‖w − H Hᵀ w‖²`.
    pub fn word_error(&self, w: &[f64]) -> Result<f64, TopicError> {
        let r = self.reconstruct_word(w)?;
        Ok(squared_distance(w, &r))
    }

    /// Error of reconstructing the whole document from topic `index` alone,
    /// `‖W − h hᵀ W‖²_F`, computed column by column.
    pub fn topic_reconstruction_error(
        &self,
        doc: &DocumentMatrix,
        index: usize,
    ) -> Result<f64, TopicError> {
        if index >= self.effective_k() {
            return Err(TopicError::IndexOutOfRange {
                index,
                k: self.effective_k(),
            });
        }
        self.check_dim(doc.dim())?;
        let h = self.topic(index);
        Ok(doc
            .matrix()
            .columns()
            .map(|w| {
                let c = dot(h, w);
                w.iter().zip(h).map(|(x, y)| (x - c * y).powi(2)).sum::<f64>()
            })
            .sum())
    }

    /// Sum of per-word reconstruction errors using all topics.
    pub fn total_reconstruction_error(&self, doc: &DocumentMatrix) -> Result<f64, TopicError> {
        self.check_dim(doc.dim())?;
        Ok(doc
            .matrix()
            .columns()
            .map(|w| squared_distance(w, &self.project_unchecked(w)))
            .sum())
    }

    /// The `m` distinct document tokens best reconstructed by the topics,
    /// ascending by error and then alphabetically.
    pub fn topic_words(&self, doc: &DocumentMatrix, m: usize) -> Result<Vec<TopicWord>, TopicError> {
        self.check_dim(doc.dim())?;
        let mut seen: HashMap<&str, f64> = HashMap::new();
        for (token, w) in doc.tokens().iter().zip(doc.matrix().columns()) {
            seen.entry(token.as_str())
                .or_insert_with(|| squared_distance(w, &self.project_unchecked(w)));
        }
        let mut words: Vec<TopicWord> = seen
            .into_iter()
            .map(|(token, error)| TopicWord {
                token: token.to_string(),
                error,
            })
            .collect();
        words.sort_by(|a, b| {
            a.error
                .partial_cmp(&b.error)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.token.cmp(&b.token))
        });
        words.truncate(m);
        Ok(words)
    }

    /// Writes the plain-text model dump: header, scalars, importances and
    /// one topic vector per line, all with 17 significant digits.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{MODEL_MAGIC}")?;
        writeln!(out, "dim {}", self.dim())?;
        writeln!(out, "k {}", self.effective_k())?;
        writeln!(out, "requested_k {}", self.requested_k)?;
        writeln!(out, "frobenius_sq {}", fmt17(self.frobenius_sq))?;
        writeln!(out, "raw_importance {}", join17(&self.raw_importance))?;
        writeln!(out, "norm_importance {}", join17(&self.norm_importance))?;
        for h in self.topics.columns() {
            writeln!(out, "topic {}", join17(h))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("model text is ASCII")
    }

    /// Parses the format produced by [`write_text`](Self::write_text).
    pub fn read_text<R: BufRead>(input: R) -> Result<Self, TopicError> {
        let mut lines = input.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let mut next = |what: &str| -> Result<(usize, String), TopicError> {
            match lines.next() {
                Some((n, line)) => Ok((n, line?)),
                None => Err(TopicError::Parse {
                    line: 0,
                    message: format!("unexpected end of input, expected {what}"),
                }),
            }
        };

        let (n, magic) = next("header")?;
        if magic.trim() != MODEL_MAGIC {
            return Err(parse_err(n, "not a hidden-topics model dump"));
        }
        let dim = scalar::<usize>(next("dim")?, "dim")?;
        let k = scalar::<usize>(next("k")?, "k")?;
        let requested_k = scalar::<usize>(next("requested_k")?, "requested_k")?;
        let frobenius_sq = scalar::<f64>(next("frobenius_sq")?, "frobenius_sq")?;
        let raw_importance = vector(next("raw_importance")?, "raw_importance", k)?;
        let norm_importance = vector(next("norm_importance")?, "norm_importance", k)?;
        let mut data = Vec::with_capacity(dim * k);
        for _ in 0..k {
            data.extend(vector(next("topic")?, "topic", dim)?);
        }
        if dim == 0 || k == 0 {
            return Err(parse_err(n, "dim and k must be positive"));
        }
        Ok(Self {
            topics: Matrix::from_col_major(dim, k, data),
            raw_importance,
            norm_importance,
            requested_k,
            frobenius_sq,
        })
    }
}

/// A document token with its reconstruction error.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TopicWord {
    pub token: String,
    pub error: f64,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn join17(xs: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{}", fmt17(*x)).unwrap();
    }
    s
}

fn parse_err(line: usize, message: impl Into<String>) -> TopicError {
    TopicError::Parse {
        line,
        message: message.into(),
    }
}

fn fields<'a>((n, line): &'a (usize, String), key: &str) -> Result<Vec<&'a str>, TopicError> {
    let mut it = line.split_whitespace();
    if it.next() != Some(key) {
        return Err(parse_err(*n, format!("expected {key:?}")));
    }
    Ok(it.collect())
}

fn scalar<T: std::str::FromStr>(entry: (usize, String), key: &str) -> Result<T, TopicError> {
    let f = fields(&entry, key)?;
    match f.as_slice() {
        [v] => v
            .parse()
            .map_err(|_| parse_err(entry.0, format!("invalid {key} value {v:?}"))),
        _ => Err(parse_err(entry.0, format!("{key} takes one value"))),
    }
}

fn vector(entry: (usize, String), key: &str, len: usize) -> Result<Vec<f64>, TopicError> {
    let f = fields(&entry, key)?;
    if f.len() != len {
        return Err(parse_err(
            entry.0,
            format!("{key} has {} values, expected {len}", f.len()),
        ));
    }
    f.iter()
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(entry.0, format!("invalid number {v:?}")))
        })
        .collect()
}
