//! Evaluation protocols: thresholded classification with cross-validation,
//! and ranked retrieval with precision@k and precision-bin histograms.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::corpus_io::{Corpus, LabeledPair, RankingCategory};
use crate::embeddings::EmbeddingStore;
use crate::pipeline::{MatchError, Matcher, PreparedDocument};
use crate::preprocess::Stoplist;
use crate::relevance::SummaryMatrix;

/// Re-shuffles allowed before giving up on folds whose tuning split holds a
/// single class.
pub const MAX_FOLD_RETRIES: usize = 100;

/// Default number of cross-validation folds.
pub const DEFAULT_FOLDS: usize = 10;

/// Slack when checking that a precision value lies on the `1/k` grid.
pub const GRID_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{predictions} predictions but {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("no samples")]
    Empty,
    #[error("labels are all {0}; need both classes")]
    DegenerateLabels(bool),
    #[error("{samples} samples cannot be split into {folds} folds")]
    TooFewSamples { samples: usize, folds: usize },
    #[error("need at least 2 folds, got {0}")]
    InvalidFolds(usize),
    #[error("could not draw folds with two-class tuning splits after {0} shuffles")]
    DegenerateFold(usize),
    #[error("k = {k} is outside 1..={len}")]
    KOutOfRange { k: usize, len: usize },
    #[error("precision {value} of query {query:?} is not a multiple of 1/{k}")]
    OffGrid { query: String, value: f64, k: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("pair {index} ({summary_id} / {doc_id}): {source}")]
    Pair {
        index: usize,
        summary_id: String,
        doc_id: String,
        #[source]
        source: MatchError,
    },
    #[error("category {category:?}: {source}")]
    Category {
        category: String,
        #[source]
        source: MatchError,
    },
    #[error(transparent)]
    Match(#[from] MatchError),
}

/// Precision, recall and F1 over the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            precision,
            recall,
            f1,
        }
    }
}

pub fn classification_metrics(predictions: &[bool], labels: &[bool]) -> Result<Metrics, EvalError> {
    if predictions.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(EvalError::Empty);
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&p, &l) in predictions.iter().zip(labels) {
        match (p, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(Metrics::from_counts(tp, fp, fn_))
}

/// Threshold maximising F1 when `score > threshold` predicts a match.
///
/// Candidates are `-∞`, the midpoints between adjacent distinct scores, and
/// `+∞`. Among equally good candidates the lowest wins.
pub fn tune_threshold(scores: &[f64], labels: &[bool]) -> Result<f64, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            predictions: scores.len(),
            labels: labels.len(),
        });
    }
    if scores.is_empty() {
        return Err(EvalError::Empty);
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == labels.len() {
        return Err(EvalError::DegenerateLabels(positives > 0));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Walk the distinct values upward. Before group j, everything below is
    // predicted negative and everything from j on is predicted positive.
    // F1 = 2 TP / (predicted + actual); compared as exact fractions.
    let n = scores.len();
    let mut best = (f64::NEG_INFINITY, 2 * positives as u128, (n + positives) as u128);
    let mut below = 0usize;
    let mut pos_below = 0usize;
    let mut i = 0;
    while i < n {
        let value = scores[order[i]];
        while i < n && scores[order[i]] == value {
            below += 1;
            pos_below += usize::from(labels[order[i]]);
            i += 1;
        }
        let threshold = if i < n {
            let next = scores[order[i]];
            let mid = value / 2.0 + next / 2.0;
            if mid > value && mid < next {
                mid
            } else {
                value
            }
        } else {
            f64::INFINITY
        };
        let num = 2 * (positives - pos_below) as u128;
        let den = ((n - below) + positives) as u128;
        if num * best.2 > best.1 * den {
            best = (threshold, num, den);
        }
    }
    Ok(best.0)
}

fn serialize_threshold<S: Serializer>(t: &f64, s: S) -> Result<S::Ok, S::Error> {
    if t.is_finite() {
        s.serialize_f64(*t)
    } else if *t > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Outcome of one cross-validation fold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    #[serde(serialize_with = "serialize_threshold")]
    pub threshold: f64,
    pub tuning_size: usize,
    pub test_size: usize,
    #[serde(flatten)]
    pub metrics: Metrics,
    /// Sample indices used for threshold tuning; the rest were tested.
    #[serde(skip)]
    pub tuning_indices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample standard deviation (`n − 1` denominator; 0 for one value).
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

/// Per-fold results with their means and standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationStats {
    pub folds: Vec<FoldResult>,
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
    pub seed: u64,
    /// Shuffles discarded because some tuning split held one class.
    pub redraws: usize,
}

/// Splits a seeded shuffle into `folds` near-equal parts. Each part tunes a
/// threshold; the remaining parts form the test set.
pub fn cross_validate(
    samples: &[(f64, bool)],
    folds: usize,
    seed: u64,
) -> Result<ClassificationStats, EvalError> {
    if folds < 2 {
        return Err(EvalError::InvalidFolds(folds));
    }
    let n = samples.len();
    if n < folds {
        return Err(EvalError::TooFewSamples { samples: n, folds });
    }
    let positives = samples.iter().filter(|s| s.1).count();
    if positives == 0 || positives == n {
        return Err(EvalError::DegenerateLabels(positives > 0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let bounds: Vec<(usize, usize)> = (0..folds)
        .map(|f| (f * n / folds, (f + 1) * n / folds))
        .collect();

    let mut redraws = 0;
    loop {
        order.sort_unstable();
        order.shuffle(&mut rng);
        let two_class = bounds.iter().all(|&(a, b)| {
            let pos = order[a..b].iter().filter(|&&i| samples[i].1).count();
            pos > 0 && pos < b - a
        });
        if two_class {
            break;
        }
        redraws += 1;
        if redraws > MAX_FOLD_RETRIES {
            return Err(EvalError::DegenerateFold(MAX_FOLD_RETRIES));
        }
    }

    let mut results = Vec::with_capacity(folds);
    for &(a, b) in &bounds {
        let tuning = &order[a..b];
        let scores: Vec<f64> = tuning.iter().map(|&i| samples[i].0).collect();
        let labels: Vec<bool> = tuning.iter().map(|&i| samples[i].1).collect();
        let threshold = tune_threshold(&scores, &labels)?;

        let test: Vec<usize> = order[..a].iter().chain(&order[b..]).copied().collect();
        let predictions: Vec<bool> = test.iter().map(|&i| samples[i].0 > threshold).collect();
        let truth: Vec<bool> = test.iter().map(|&i| samples[i].1).collect();
        let metrics = classification_metrics(&predictions, &truth)?;
        results.push(FoldResult {
            threshold,
            tuning_size: tuning.len(),
            test_size: test.len(),
            metrics,
            tuning_indices: tuning.to_vec(),
        });
    }

    let column = |f: fn(&Metrics) -> f64| -> Vec<f64> { results.iter().map(|r| f(&r.metrics)).collect() };
    Ok(ClassificationStats {
        precision: MeanStd::of(&column(|m| m.precision)),
        recall: MeanStd::of(&column(|m| m.recall)),
        f1: MeanStd::of(&column(|m| m.f1)),
        folds: results,
        seed,
        redraws,
    })
}

/// Fraction of the first `k` ranked ids that are relevant.
pub fn precision_at_k<T: Borrow<str>>(
    ranked: &[T],
    relevant: &BTreeSet<String>,
    k: usize,
) -> Result<f64, EvalError> {
    if k == 0 || k > ranked.len() {
        return Err(EvalError::KOutOfRange { k, len: ranked.len() });
    }
    let hits = ranked[..k]
        .iter()
        .filter(|id| relevant.contains((*id).borrow()))
        .count();
    Ok(hits as f64 / k as f64)
}

/// Fraction of queries in each of the `k + 1` bins `0/k, 1/k, …, k/k`.
pub fn precision_histogram(per_query: &BTreeMap<String, f64>, k: usize) -> Result<Vec<f64>, EvalError> {
    if k == 0 {
        return Err(EvalError::KOutOfRange { k, len: 0 });
    }
    if per_query.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut counts = vec![0usize; k + 1];
    for (query, &value) in per_query {
        let bin = (value * k as f64).round();
        if !(0.0..=k as f64).contains(&bin) || (value - bin / k as f64).abs() > GRID_TOL {
            return Err(EvalError::OffGrid {
                query: query.clone(),
                value,
                k,
            });
        }
        counts[bin as usize] += 1;
    }
    let total = per_query.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// precision@k for every query, with its mean and bin histogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingStats {
    pub k: usize,
    pub mean_precision: f64,
    pub per_query_precision: BTreeMap<String, f64>,
    pub histogram: Vec<f64>,
}

impl RankingStats {
    pub fn new(k: usize, per_query_precision: BTreeMap<String, f64>) -> Result<Self, EvalError> {
        let histogram = precision_histogram(&per_query_precision, k)?;
        let mean_precision =
            per_query_precision.values().sum::<f64>() / per_query_precision.len() as f64;
        Ok(Self {
            k,
            mean_precision,
            per_query_precision,
            histogram,
        })
    }
}

/// One entry of a ranking. `flagged` documents had no usable content.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedDocument {
    pub doc_id: String,
    pub score: f64,
    pub flagged: bool,
}

/// Orders by score descending, then id ascending; flagged documents go last.
pub fn sort_ranking(ranking: &mut [RankedDocument]) {
    ranking.sort_by(|a, b| {
        a.flagged
            .cmp(&b.flagged)
            .then_with(|| b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal))
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
}

/// A corpus whose documents have been turned into topic models once, so
/// that many summaries can be ranked against it.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    entries: Vec<(String, Option<PreparedDocument>)>,
}

impl PreparedCorpus {
    /// Documents with no usable content are kept and flagged; any other
    /// failure is returned.
    pub fn prepare(matcher: &Matcher<'_>, corpus: &Corpus) -> Result<Self, EvalError> {
        if corpus.is_empty() {
            return Err(EvalError::EmptyCorpus);
        }
        let entries = corpus
            .par_iter()
            .map(|(id, text)| match matcher.prepare_document(text) {
                Ok(doc) => Ok((id.clone(), Some(doc))),
                Err(MatchError::Document(_)) => Ok((id.clone(), None)),
                Err(e) => Err(EvalError::Match(e)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn flagged(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(|(_, d)| d.is_none())
            .map(|(id, _)| id.as_str())
    }

    pub fn rank(&self, matcher: &Matcher<'_>, summary: &SummaryMatrix) -> Result<Vec<RankedDocument>, EvalError> {
        let mut ranking = self
            .entries
            .par_iter()
            .map(|(id, doc)| match doc {
                Some(doc) => Ok(RankedDocument {
                    doc_id: id.clone(),
                    score: matcher.score_prepared(doc, summary)?.score,
                    flagged: false,
                }),
                None => Ok(RankedDocument {
                    doc_id: id.clone(),
                    score: 0.0,
                    flagged: true,
                }),
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        sort_ranking(&mut ranking);
        Ok(ranking)
    }
}

/// Ranks every corpus document by its relevance to `summary_text`.
pub fn rank_documents(
    summary_text: &str,
    corpus: &Corpus,
    store: &EmbeddingStore,
    k: usize,
    stoplist: &Stoplist,
) -> Result<Vec<RankedDocument>, EvalError> {
    let matcher = Matcher::new(store, stoplist, k)?;
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let summary = matcher.prepare_summary(summary_text)?;
    PreparedCorpus::prepare(&matcher, corpus)?.rank(&matcher, &summary)
}

/// precision@k statistics for every `k` in `ks`, over all categories.
pub fn evaluate_ranking(
    matcher: &Matcher<'_>,
    categories: &[RankingCategory],
    corpus: &PreparedCorpus,
    ks: &[usize],
) -> Result<Vec<RankingStats>, EvalError> {
    if categories.is_empty() {
        return Err(EvalError::Empty);
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > corpus.len()) {
        return Err(EvalError::KOutOfRange { k, len: corpus.len() });
    }
    let rankings = categories
        .par_iter()
        .map(|c| {
            let summary = matcher.prepare_summary(&c.summary_text).map_err(|source| EvalError::Category {
                category: c.category_id.clone(),
                source,
            })?;
            let ranking = corpus.rank(matcher, &summary)?;
            let ids: Vec<String> = ranking.into_iter().map(|r| r.doc_id).collect();
            Ok((c, ids))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;

    ks.iter()
        .map(|&k| {
            let mut per_query = BTreeMap::new();
            for (c, ids) in &rankings {
                per_query.insert(c.category_id.clone(), precision_at_k(ids, &c.relevant_doc_ids, k)?);
            }
            RankingStats::new(k, per_query)
        })
        .collect()
}

/// Scores every labeled pair. Each distinct document text is decomposed once.
pub fn score_pairs(matcher: &Matcher<'_>, pairs: &[LabeledPair]) -> Result<Vec<f64>, EvalError> {
    let pair_error = |index: usize, source: MatchError| EvalError::Pair {
        index,
        summary_id: pairs[index].summary_id.clone(),
        doc_id: pairs[index].doc_id.clone(),
        source,
    };

    let mut first_use: HashMap<&str, usize> = HashMap::new();
    for (i, p) in pairs.iter().enumerate() {
        first_use.entry(p.doc_text.as_str()).or_insert(i);
    }
    let mut unique: Vec<(&str, usize)> = first_use.into_iter().collect();
    unique.sort_by_key(|&(_, i)| i);

    let docs: HashMap<&str, PreparedDocument> = unique
        .par_iter()
        .map(|&(text, i)| {
            matcher
                .prepare_document(text)
                .map(|d| (text, d))
                .map_err(|e| pair_error(i, e))
        })
        .collect::<Result<_, _>>()?;

    pairs
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let summary = matcher.prepare_summary(&p.summary_text).map_err(|e| pair_error(i, e))?;
            let doc = &docs[p.doc_text.as_str()];
            matcher
                .score_prepared(doc, &summary)
                .map(|r| r.score)
                .map_err(|e| pair_error(i, e))
        })
        .collect()
}
