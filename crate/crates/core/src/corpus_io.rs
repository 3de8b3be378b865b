//! JSON-lines datasets.
//!
//! * labeled pairs: `{"summary_id", "doc_id", "summary_text", "doc_text", "label"}`
//! * documents: `{"doc_id", "text"}`
//! * ranking categories: `{"category_id", "summary_text", "relevant_doc_ids"}`

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: field {field:?} must not be empty")]
    EmptyField { line: usize, field: &'static str },
    #[error("line {line}: category {category:?} references unknown document {doc_id:?}")]
    DanglingReference {
        line: usize,
        category: String,
        doc_id: String,
    },
    #[error("line {line}: duplicate document id {doc_id:?}")]
    DuplicateDocument { line: usize, doc_id: String },
}

/// One annotated summary–document pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledPair {
    pub summary_id: String,
    pub doc_id: String,
    pub summary_text: String,
    pub doc_text: String,
    pub label: bool,
}

/// A summary and the documents judged relevant to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankingCategory {
    pub category_id: String,
    pub summary_text: String,
    pub relevant_doc_ids: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusDocument {
    pub doc_id: String,
    pub text: String,
}

/// Documents keyed by id, iterated in id order.
pub type Corpus = BTreeMap<String, String>;

fn read_jsonl<T, R>(reader: R) -> Result<Vec<(usize, T)>, CorpusError>
where
    T: DeserializeOwned,
    R: BufRead,
{
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|source| CorpusError::Json {
            line: i + 1,
            source,
        })?;
        out.push((i + 1, record));
    }
    Ok(out)
}

fn non_empty(line: usize, field: &'static str, value: &str) -> Result<(), CorpusError> {
    if value.trim().is_empty() {
        Err(CorpusError::EmptyField { line, field })
    } else {
        Ok(())
    }
}

pub fn read_pairs<R: BufRead>(reader: R) -> Result<Vec<LabeledPair>, CorpusError> {
    read_jsonl::<LabeledPair, _>(reader)?
        .into_iter()
        .map(|(line, p)| {
            non_empty(line, "summary_id", &p.summary_id)?;
            non_empty(line, "doc_id", &p.doc_id)?;
            non_empty(line, "summary_text", &p.summary_text)?;
            non_empty(line, "doc_text", &p.doc_text)?;
            Ok(p)
        })
        .collect()
}

/// Loads labeled pairs in file order.
pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<LabeledPair>, CorpusError> {
    read_pairs(BufReader::new(File::open(path)?))
}

pub fn write_pairs<W: Write>(mut out: W, pairs: &[LabeledPair]) -> Result<(), CorpusError> {
    for p in pairs {
        serde_json::to_writer(&mut out, p).map_err(|source| CorpusError::Json { line: 0, source })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_corpus<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::new();
    for (line, doc) in read_jsonl::<CorpusDocument, _>(reader)? {
        non_empty(line, "doc_id", &doc.doc_id)?;
        non_empty(line, "text", &doc.text)?;
        if corpus.contains_key(&doc.doc_id) {
            return Err(CorpusError::DuplicateDocument {
                line,
                doc_id: doc.doc_id,
            });
        }
        corpus.insert(doc.doc_id, doc.text);
    }
    Ok(corpus)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    read_corpus(BufReader::new(File::open(path)?))
}

pub fn write_corpus<W: Write>(mut out: W, corpus: &Corpus) -> Result<(), CorpusError> {
    for (doc_id, text) in corpus {
        serde_json::to_writer(&mut out, &serde_json::json!({ "doc_id": doc_id, "text": text }))
            .map_err(|source| CorpusError::Json { line: 0, source })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses categories and checks every referenced id against `corpus`.
pub fn read_categories<R: BufRead>(
    reader: R,
    corpus: &Corpus,
) -> Result<Vec<RankingCategory>, CorpusError> {
    read_jsonl::<RankingCategory, _>(reader)?
        .into_iter()
        .map(|(line, c)| {
            non_empty(line, "category_id", &c.category_id)?;
            non_empty(line, "summary_text", &c.summary_text)?;
            if c.relevant_doc_ids.is_empty() {
                return Err(CorpusError::EmptyField {
                    line,
                    field: "relevant_doc_ids",
                });
            }
            if let Some(missing) = c.relevant_doc_ids.iter().find(|id| !corpus.contains_key(*id)) {
                return Err(CorpusError::DanglingReference {
                    line,
                    category: c.category_id.clone(),
                    doc_id: missing.clone(),
                });
            }
            Ok(c)
        })
        .collect()
}

pub fn write_categories<W: Write>(mut out: W, categories: &[RankingCategory]) -> Result<(), CorpusError> {
    for c in categories {
        serde_json::to_writer(&mut out, c).map_err(|source| CorpusError::Json { line: 0, source })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Loads a ranking dataset: categories plus the pool of documents to rank.
pub fn load_ranking_dataset(
    categories_path: impl AsRef<Path>,
    docs_path: impl AsRef<Path>,
) -> Result<(Vec<RankingCategory>, Corpus), CorpusError> {
    let corpus = load_corpus(docs_path)?;
    let categories = read_categories(BufReader::new(File::open(categories_path)?), &corpus)?;
    Ok((categories, corpus))
}
