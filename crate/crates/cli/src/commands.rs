use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use hidden_topics::corpus_io::{self, CorpusError};
use hidden_topics::eval::{self, EvalError, PreparedCorpus};
use hidden_topics::linalg::SvdOptions;
use hidden_topics::{EmbeddingStore, MatchError, Matcher, Stoplist};

use crate::format::{sig6, sig6_list, table};
use crate::{Cli, CliError, Command, Format};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    validate_inputs(cli)?;
    let stoplist = load_stoplist(cli)?;
    let store = load_embeddings(cli)?;
    let matcher = Matcher::new(&store, &stoplist, cli.k)
        .map_err(|e| CliError::input(e.to_string()))?
        .with_svd_options(SvdOptions {
            orthonormality_tol: cli.ortho_tol,
            residual_tol: cli.residual_tol,
        });

    let rendered = match &cli.command {
        Command::Match {
            doc_file,
            summary_file,
        } => cmd_match(cli, &matcher, doc_file, summary_file)?,
        Command::Rank {
            summary_file,
            corpus_file,
            top,
        } => cmd_rank(cli, &matcher, summary_file, corpus_file, *top)?,
        Command::Topics {
            doc_file,
            words,
            dump_model,
        } => cmd_topics(cli, &matcher, doc_file, *words, dump_model.as_deref())?,
        Command::EvalClassify {
            pairs_file,
            folds,
            dump_scores,
        } => cmd_eval_classify(cli, &matcher, pairs_file, *folds, dump_scores.as_deref())?,
        Command::EvalRank {
            categories_file,
            docs_file,
            ks,
        } => cmd_eval_rank(cli, &matcher, categories_file, docs_file, ks)?,
    };
    out.write_all(rendered.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::input(format!("failed to write output: {e}")))
}

/// Checks every input path before any expensive loading starts.
fn validate_inputs(cli: &Cli) -> Result<()> {
    let embeddings = cli
        .embeddings
        .as_deref()
        .ok_or_else(|| CliError::input("--embeddings PATH is required"))?;
    let mut paths = vec![embeddings];
    if let Some(s) = cli.stoplist.as_deref() {
        paths.push(s);
    }
    match &cli.command {
        Command::Match {
            doc_file,
            summary_file,
        } => paths.extend([doc_file.as_path(), summary_file.as_path()]),
        Command::Rank {
            summary_file,
            corpus_file,
            ..
        } => paths.extend([summary_file.as_path(), corpus_file.as_path()]),
        Command::Topics { doc_file, .. } => paths.push(doc_file),
        Command::EvalClassify { pairs_file, .. } => paths.push(pairs_file),
        Command::EvalRank {
            categories_file,
            docs_file,
            ..
        } => paths.extend([categories_file.as_path(), docs_file.as_path()]),
    }
    for p in paths {
        if !p.is_file() {
            return Err(CliError::input(format!("{}: no such file", p.display())));
        }
    }
    Ok(())
}

fn load_stoplist(cli: &Cli) -> Result<Stoplist> {
    match cli.stoplist.as_deref() {
        Some(p) => Stoplist::load(p).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => Ok(Stoplist::english()),
    }
}

fn load_embeddings(cli: &Cli) -> Result<EmbeddingStore> {
    let path = cli.embeddings.as_deref().expect("validated");
    let store = EmbeddingStore::load(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if store.duplicates() > 0 {
        eprintln!(
            "warning: {}: {} duplicate tokens ignored (first occurrence kept)",
            path.display(),
            store.duplicates()
        );
    }
    Ok(store)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn match_error(path: &Path, e: MatchError) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}

fn corpus_error(path: &Path, e: CorpusError) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}

fn eval_error(path: &Path, e: EvalError) -> CliError {
    match e {
        EvalError::DegenerateLabels(_)
        | EvalError::DegenerateFold(_)
        | EvalError::TooFewSamples { .. }
        | EvalError::InvalidFolds(_) => CliError::degenerate(format!("{}: {e}", path.display())),
        other => CliError::input(format!("{}: {other}", path.display())),
    }
}

fn warn_clamped(path: &Path, requested: usize, effective: usize) {
    if effective < requested {
        eprintln!(
            "warning: {}: document supports only {effective} topics, requested {requested}",
            path.display()
        );
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_match(cli: &Cli, matcher: &Matcher<'_>, doc_file: &Path, summary_file: &Path) -> Result<String> {
    let doc_text = read_text(doc_file)?;
    let summary_text = read_text(summary_file)?;
    let doc = matcher
        .prepare_document(&doc_text)
        .map_err(|e| match_error(doc_file, e))?;
    let summary = matcher
        .prepare_summary(&summary_text)
        .map_err(|e| match_error(summary_file, e))?;
    let report = matcher
        .score_prepared(&doc, &summary)
        .map_err(|e| match_error(doc_file, e))?;
    let baseline = hidden_topics::baseline_avg_cosine(&doc.matrix, &summary)
        .map_err(|e| CliError::input(e.to_string()))?;
    warn_clamped(doc_file, doc.model.requested_k(), doc.model.effective_k());

    Ok(match cli.format {
        Format::Json => json(&json!({
            "score": report.score,
            "requested_k": doc.model.requested_k(),
            "effective_k": report.effective_k,
            "per_topic": report.per_topic,
            "norm_importance": doc.model.norm_importance(),
            "raw_importance": doc.model.raw_importance(),
            "baseline_avg_cosine": baseline,
            "document": { "words": doc.matrix.len(), "oov": doc.matrix.oov() },
            "summary": { "words": summary.len(), "oov": summary.oov() },
        })),
        Format::Text => {
            let mut s = format!(
                "score        {}\nbaseline     {}\ntopics       {} (requested {})\ndocument     {} words, {} oov\nsummary      {} words, {} oov\n\n",
                sig6(report.score),
                sig6(baseline),
                report.effective_k,
                doc.model.requested_k(),
                doc.matrix.len(),
                doc.matrix.oov(),
                summary.len(),
                summary.oov(),
            );
            let rows: Vec<Vec<String>> = (0..report.effective_k)
                .map(|k| {
                    vec![
                        (k + 1).to_string(),
                        sig6(doc.model.norm_importance()[k]),
                        sig6(doc.model.raw_importance()[k]),
                        sig6(report.per_topic[k]),
                    ]
                })
                .collect();
            s.push_str(&table(&["topic", "importance", "raw", "relevance"], &rows));
            s
        }
    })
}

fn cmd_rank(
    cli: &Cli,
    matcher: &Matcher<'_>,
    summary_file: &Path,
    corpus_file: &Path,
    top: usize,
) -> Result<String> {
    let summary_text = read_text(summary_file)?;
    let corpus = corpus_io::load_corpus(corpus_file).map_err(|e| corpus_error(corpus_file, e))?;
    let summary = matcher
        .prepare_summary(&summary_text)
        .map_err(|e| match_error(summary_file, e))?;
    let prepared = PreparedCorpus::prepare(matcher, &corpus).map_err(|e| eval_error(corpus_file, e))?;
    let flagged: Vec<&str> = prepared.flagged().collect();
    if !flagged.is_empty() {
        eprintln!(
            "warning: {}: {} documents without usable content ranked last",
            corpus_file.display(),
            flagged.len()
        );
    }
    let mut ranking = prepared
        .rank(matcher, &summary)
        .map_err(|e| eval_error(corpus_file, e))?;
    ranking.truncate(top);

    Ok(match cli.format {
        Format::Json => json(&json!({
            "corpus_size": corpus.len(),
            "k": matcher.k(),
            "summary": { "words": summary.len(), "oov": summary.oov() },
            "flagged": flagged,
            "results": ranking
                .iter()
                .enumerate()
                .map(|(i, r)| json!({ "rank": i + 1, "doc_id": r.doc_id, "score": r.score, "flagged": r.flagged }))
                .collect::<Vec<_>>(),
        })),
        Format::Text => {
            let rows: Vec<Vec<String>> = ranking
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    vec![
                        (i + 1).to_string(),
                        r.doc_id.clone(),
                        sig6(r.score),
                        if r.flagged { "no content".into() } else { String::new() },
                    ]
                })
                .collect();
            table(&["rank", "doc_id", "score", "note"], &rows)
        }
    })
}

fn cmd_topics(
    cli: &Cli,
    matcher: &Matcher<'_>,
    doc_file: &Path,
    words: usize,
    dump_model: Option<&Path>,
) -> Result<String> {
    let text = read_text(doc_file)?;
    let doc = matcher
        .prepare_document(&text)
        .map_err(|e| match_error(doc_file, e))?;
    warn_clamped(doc_file, doc.model.requested_k(), doc.model.effective_k());
    let topic_words = doc
        .model
        .topic_words(&doc.matrix, words)
        .map_err(|e| CliError::input(e.to_string()))?;
    if let Some(path) = dump_model {
        let file = fs::File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        doc.model
            .write_text(BufWriter::new(file))
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }

    Ok(match cli.format {
        Format::Json => json(&json!({
            "requested_k": doc.model.requested_k(),
            "effective_k": doc.model.effective_k(),
            "frobenius_sq": doc.model.frobenius_sq(),
            "raw_importance": doc.model.raw_importance(),
            "norm_importance": doc.model.norm_importance(),
            "document": { "words": doc.matrix.len(), "oov": doc.matrix.oov() },
            "topic_words": topic_words,
        })),
        Format::Text => {
            let mut s = format!(
                "topics       {} (requested {})\nimportance   {}\n\n",
                doc.model.effective_k(),
                doc.model.requested_k(),
                sig6_list(doc.model.norm_importance()),
            );
            let rows: Vec<Vec<String>> = topic_words
                .iter()
                .map(|w| vec![w.token.clone(), sig6(w.error)])
                .collect();
            s.push_str(&table(&["word", "error"], &rows));
            s
        }
    })
}

#[derive(Serialize)]
struct ScoreRecord<'a> {
    summary_id: &'a str,
    doc_id: &'a str,
    score: f64,
    label: bool,
}

fn cmd_eval_classify(
    cli: &Cli,
    matcher: &Matcher<'_>,
    pairs_file: &Path,
    folds: usize,
    dump_scores: Option<&Path>,
) -> Result<String> {
    let pairs = corpus_io::load_pairs(pairs_file).map_err(|e| corpus_error(pairs_file, e))?;
    let scores = eval::score_pairs(matcher, &pairs).map_err(|e| eval_error(pairs_file, e))?;
    if let Some(path) = dump_scores {
        let io_err = |e: std::io::Error| CliError::input(format!("{}: {e}", path.display()));
        let mut w = BufWriter::new(fs::File::create(path).map_err(io_err)?);
        for (p, &score) in pairs.iter().zip(&scores) {
            let record = ScoreRecord {
                summary_id: &p.summary_id,
                doc_id: &p.doc_id,
                score,
                label: p.label,
            };
            serde_json::to_writer(&mut w, &record).map_err(|e| CliError::input(e.to_string()))?;
            w.write_all(b"\n").map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
    }
    let samples: Vec<(f64, bool)> = scores.iter().zip(&pairs).map(|(&s, p)| (s, p.label)).collect();
    let stats = eval::cross_validate(&samples, folds, cli.seed).map_err(|e| eval_error(pairs_file, e))?;

    Ok(match cli.format {
        Format::Json => json(&json!({
            "pairs": pairs.len(),
            "positives": samples.iter().filter(|s| s.1).count(),
            "k": matcher.k(),
            "stats": stats,
        })),
        Format::Text => {
            let mut s = format!(
                "pairs      {} ({} positive)\nfolds      {} (seed {}, {} redraws)\n\n",
                pairs.len(),
                samples.iter().filter(|s| s.1).count(),
                stats.folds.len(),
                stats.seed,
                stats.redraws,
            );
            let rows = vec![
                vec!["precision".into(), sig6(stats.precision.mean), sig6(stats.precision.std)],
                vec!["recall".into(), sig6(stats.recall.mean), sig6(stats.recall.std)],
                vec!["f1".into(), sig6(stats.f1.mean), sig6(stats.f1.std)],
            ];
            s.push_str(&table(&["metric", "mean", "std"], &rows));
            s
        }
    })
}

fn cmd_eval_rank(
    cli: &Cli,
    matcher: &Matcher<'_>,
    categories_file: &Path,
    docs_file: &Path,
    ks: &[usize],
) -> Result<String> {
    let corpus = corpus_io::load_corpus(docs_file).map_err(|e| corpus_error(docs_file, e))?;
    let categories = fs::File::open(categories_file)
        .map_err(CorpusError::from)
        .and_then(|f| corpus_io::read_categories(std::io::BufReader::new(f), &corpus))
        .map_err(|e| corpus_error(categories_file, e))?;
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > corpus.len()) {
        return Err(CliError::input(format!(
            "--k {k} is outside 1..={} (corpus size of {})",
            corpus.len(),
            docs_file.display()
        )));
    }
    let prepared = PreparedCorpus::prepare(matcher, &corpus).map_err(|e| eval_error(docs_file, e))?;
    let stats =
        eval::evaluate_ranking(matcher, &categories, &prepared, ks).map_err(|e| eval_error(categories_file, e))?;

    Ok(match cli.format {
        Format::Json => {
            let results: Vec<_> = stats
                .iter()
                .map(|s| {
                    let bins: BTreeMap<String, f64> = s
                        .histogram
                        .iter()
                        .enumerate()
                        .map(|(b, &f)| (format!("{b}/{}", s.k), f))
                        .collect();
                    json!({
                        "k": s.k,
                        "mean_precision": s.mean_precision,
                        "histogram": s.histogram,
                        "bins": bins,
                        "per_query_precision": s.per_query_precision,
                    })
                })
                .collect();
            json(&json!({
                "categories": categories.len(),
                "corpus_size": corpus.len(),
                "k_topics": matcher.k(),
                "flagged": prepared.flagged().collect::<Vec<_>>(),
                "results": results,
            }))
        }
        Format::Text => {
            let mut s = format!("categories {}\ncorpus     {}\n", categories.len(), corpus.len());
            for r in &stats {
                s.push_str(&format!("\nprecision@{}  mean {}\n", r.k, sig6(r.mean_precision)));
                let rows: Vec<Vec<String>> = r
                    .histogram
                    .iter()
                    .enumerate()
                    .map(|(b, &f)| vec![format!("{b}/{}", r.k), sig6(f)])
                    .collect();
                s.push_str(&table(&["bin", "fraction"], &rows));
            }
            s
        }
    })
}
