//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero when any gating criterion fails.
//!
//! Criterion 9 runs only when `HIDDEN_TOPICS_PAIRS` and
//! `HIDDEN_TOPICS_EMBEDDINGS` point at a labeled-pairs file and a word-vector
//! file.

// `!(x <= tol)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hidden_topics::eval::score_pairs;
use hidden_topics::synthetic::TwoClusters;
use hidden_topics::{
    cross_validate, document_summary_relevance, match_score, precision_at_k, precision_histogram,
    topic_summary_relevance, tune_threshold, word_topic_relevance, DocumentMatrix, EmbeddingStore, Matcher,
    Matrix, Stoplist, SummaryMatrix, SvdOptions, TopicModel,
};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("svd-oracle", svd_oracle),
        ("importance-identities", importance_identities),
        ("monotone-coverage", monotone_coverage),
        ("relevance-bounds", relevance_bounds),
        ("analytic-cases", analytic_cases),
        ("cluster-separation", cluster_separation),
        ("eval-oracles", eval_oracles),
        ("cli-determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    match real_data() {
        None => println!("SKIP 9 real-data (optional): set HIDDEN_TOPICS_PAIRS and HIDDEN_TOPICS_EMBEDDINGS"),
        Some(Ok(detail)) => println!("PASS 9 real-data (optional): {detail}"),
        Some(Err(detail)) => println!("FAIL 9 real-data (optional, not gating): {detail}"),
    }
    println!("{} of {} gating criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// ---------------------------------------------------------------------------
// Oracle helpers.

fn random_matrix<R: Rng>(rng: &mut R, d: usize, n: usize) -> Matrix {
    Matrix::from_col_major(d, n, (0..d * n).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

fn to_nalgebra(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.as_col_major())
}

/// Descending eigenpairs of `W Wᵀ` from nalgebra.
fn eigen_oracle(w: &Matrix) -> (Vec<f64>, DMatrix<f64>) {
    let a = to_nalgebra(w);
    let eig = (&a * a.transpose()).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(w.rows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Singular values of `W` itself, descending. Square roots of `W Wᵀ`
/// eigenvalues would turn 1e-16 rounding into 1e-8.
fn singular_values(w: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_nalgebra(w).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A random matrix whose `W Wᵀ` spectrum has a clear gap after the `k`-th
/// eigenvalue.
struct Separated {
    w: Matrix,
    k: usize,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

const MIN_RELATIVE_GAP: f64 = 1e-3;

fn separated_corpus(count: usize, seed: u64) -> (Vec<Separated>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut rejected = 0;
    while out.len() < count {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=10);
        let k = rng.gen_range(1..=d.min(n));
        let w = random_matrix(&mut rng, d, n);
        let (values, vectors) = eigen_oracle(&w);
        let next = values.get(k).copied().unwrap_or(0.0).max(0.0);
        if values[k - 1] - next < MIN_RELATIVE_GAP * values[0].max(1.0) {
            rejected += 1;
            continue;
        }
        out.push(Separated { w, k, values, vectors });
    }
    (out, rejected)
}

// ---------------------------------------------------------------------------
// 1–3: topic extraction.

fn svd_oracle() -> Outcome {
    let start = Instant::now();
    let (corpus, rejected) = separated_corpus(500, 101);
    let mut worst = 0.0f64;
    for (i, c) in corpus.iter().enumerate() {
        let model = TopicModel::fit(&c.w, c.k, &SvdOptions::default()).map_err(|e| format!("matrix {i}: {e}"))?;
        ensure!(model.effective_k() == c.k, "matrix {i}: effective K {} != {}", model.effective_k(), c.k);
        let h = to_nalgebra(model.topics());
        let u = c.vectors.columns(0, c.k).into_owned();
        let diff = (&h * h.transpose() - &u * u.transpose()).abs().max();
        worst = worst.max(diff);
        ensure!(diff <= 1e-6, "matrix {i} ({}x{}, K={}): projector differs by {diff:e}", c.w.rows(), c.w.cols(), c.k);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "500 matrices, max projector diff {worst:.2e} (tol 1e-6), {rejected} redrawn for spectral gap, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn importance_identities() -> Outcome {
    let (corpus, _) = separated_corpus(500, 101);
    let (mut worst_i, mut worst_e, mut worst_sum) = (0.0f64, 0.0f64, 0.0f64);
    for (i, c) in corpus.iter().enumerate() {
        let model = TopicModel::fit(&c.w, c.k, &SvdOptions::default()).map_err(|e| e.to_string())?;
        let doc = DocumentMatrix::from_matrix(c.w.clone()).map_err(|e| e.to_string())?;
        let total: f64 = c.w.as_col_major().iter().map(|x| x * x).sum();
        for k in 0..c.k {
            let h = model.topic(k);
            let captured: f64 = c.w.columns().map(|col| dot(h, col).powi(2)).sum();
            let di = (captured - c.values[k]).abs().max((model.raw_importance()[k] - c.values[k]).abs());
            worst_i = worst_i.max(di);
            ensure!(di <= 1e-8, "matrix {i} topic {k}: importance off by {di:e}");
            let e_k = model.topic_reconstruction_error(&doc, k).map_err(|e| e.to_string())?;
            let de = (e_k - (total - captured)).abs();
            worst_e = worst_e.max(de);
            ensure!(de <= 1e-6, "matrix {i} topic {k}: E_k off by {de:e}");
        }
        let ds = (model.norm_importance().iter().sum::<f64>() - 1.0).abs();
        worst_sum = worst_sum.max(ds);
        ensure!(ds <= 1e-10, "matrix {i}: normalized importances sum off by {ds:e}");
    }
    Ok(format!(
        "max |i_k - σ_k²| {worst_i:.2e} (tol 1e-8), max E_k error {worst_e:.2e} (tol 1e-6), max |Σī - 1| {worst_sum:.2e} (tol 1e-10)"
    ))
}

/// Slack for "nonincreasing": errors of exhausted subspaces are rounding
/// noise around zero.
const COVERAGE_SLACK: f64 = 1e-12;

fn monotone_coverage() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut strict_checks = 0;
    for doc_i in 0..100 {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=10);
        // Every third document is rank-deficient.
        let w = if doc_i % 3 == 0 && d.min(n) > 1 {
            let r = rng.gen_range(1..d.min(n));
            let a = random_matrix(&mut rng, d, r);
            let b = random_matrix(&mut rng, r, n);
            a.matmul(&b)
        } else {
            random_matrix(&mut rng, d, n)
        };
        let doc = DocumentMatrix::from_matrix(w.clone()).map_err(|e| e.to_string())?;
        let sigma = singular_values(&w);
        let scale = w.frobenius_sq().max(1.0);
        let mut prev = w.frobenius_sq();
        for k in 1..=d.min(n) {
            let model = TopicModel::fit(&w, k, &SvdOptions::default()).map_err(|e| format!("doc {doc_i} K={k}: {e}"))?;
            let err = model.total_reconstruction_error(&doc).map_err(|e| e.to_string())?;
            ensure!(err <= prev + COVERAGE_SLACK * scale, "doc {doc_i}: error rose from {prev:e} to {err:e} at K={k}");
            // σ_K > 1e-8 means topic K captured real energy.
            if sigma[k - 1] > 1e-8 {
                strict_checks += 1;
                ensure!(err < prev, "doc {doc_i}: error not strictly lower at K={k} ({prev:e} -> {err:e})");
            }
            prev = err;
        }
    }
    Ok(format!("100 documents, {strict_checks} strict decreases verified"))
}

// ---------------------------------------------------------------------------
// 4–5: relevance.

fn summary_from(m: Matrix) -> SummaryMatrix {
    SummaryMatrix::from_matrix(m).expect("nonempty summary")
}

fn relevance_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    let mut words = 0;
    for pair in 0..1000 {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=10);
        let k = rng.gen_range(1..=d.min(n));
        let w = random_matrix(&mut rng, d, n);
        let model = TopicModel::fit(&w, k, &SvdOptions::default()).map_err(|e| format!("pair {pair}: {e}"))?;
        let m = rng.gen_range(1..=6);
        let s = random_matrix(&mut rng, d, m);
        let summary = summary_from(s.clone());
        let report = document_summary_relevance(&model, &summary).map_err(|e| e.to_string())?;
        ensure!((0.0..=1.0).contains(&report.score), "pair {pair}: score {}", report.score);

        let mut expected = 0.0;
        for t in 0..model.effective_k() {
            let h = model.topic(t);
            let neg: Vec<f64> = h.iter().map(|x| -x).collect();
            let r = report.per_topic[t];
            ensure!((0.0..=1.0).contains(&r), "pair {pair} topic {t}: relevance {r}");
            let flipped = topic_summary_relevance(&neg, &summary).map_err(|e| e.to_string())?;
            ensure!(flipped.to_bits() == r.to_bits(), "pair {pair} topic {t}: sign flip {r} -> {flipped}");

            let mut mean_cos = 0.0;
            for (j, col) in s.columns().enumerate() {
                words += 1;
                let rel = word_topic_relevance(h, col).map_err(|e| e.to_string())?;
                ensure!((0.0..=1.0).contains(&rel), "pair {pair}: word relevance {rel}");
                mean_cos += dot(h, col).abs() / dot(col, col).sqrt();

                // Powers of two scale exactly, so the value must not move at all.
                for c in [0.25, 2.0, 1024.0] {
                    let scaled: Vec<f64> = col.iter().map(|x| c * x).collect();
                    let v = word_topic_relevance(h, &scaled).map_err(|e| e.to_string())?;
                    ensure!(v.to_bits() == rel.to_bits(), "pair {pair} word {j}: scaling by {c} moved {rel} -> {v}");
                }
                let c = rng.gen_range(1e-3..1e3);
                let scaled: Vec<f64> = col.iter().map(|x| c * x).collect();
                let v = word_topic_relevance(h, &scaled).map_err(|e| e.to_string())?;
                ensure!((v - rel).abs() <= 1e-12, "pair {pair} word {j}: scaling by {c} moved {rel} -> {v}");
            }
            expected += model.norm_importance()[t] * mean_cos / m as f64;
        }
        let diff = (report.score - expected).abs();
        worst = worst.max(diff);
        ensure!(diff <= 1e-10, "pair {pair}: score {} vs weighted mean {expected}", report.score);
    }
    Ok(format!(
        "1000 pairs / {words} word-topic values in [0,1], max |r - Σ ī·mean|cos|| {worst:.2e} (tol 1e-10), sign flip bitwise, scaling bitwise for 2^j and within 1e-12 otherwise"
    ))
}

fn analytic_cases() -> Outcome {
    let axis = word_topic_relevance(&[1.0, 0.0], &[3.0, 4.0]).map_err(|e| e.to_string())?;
    ensure!(axis == 0.6, "h=(1,0), s=(3,4) gave {axis}");
    let orth = word_topic_relevance(&[1.0, 0.0], &[0.0, 2.0]).map_err(|e| e.to_string())?;
    ensure!(orth == 0.0, "h=(1,0), s=(0,2) gave {orth}");

    // One topic carries all the weight, so the score is that topic's relevance.
    let w = Matrix::from_columns(2, &[[2.0, 0.0], [1.0, 0.0]]);
    let model = TopicModel::fit(&w, 1, &SvdOptions::default()).map_err(|e| e.to_string())?;
    let summary = summary_from(Matrix::from_columns(2, &[[3.0, 4.0]]));
    let report = document_summary_relevance(&model, &summary).map_err(|e| e.to_string())?;
    let single = topic_summary_relevance(model.topic(0), &summary).map_err(|e| e.to_string())?;
    ensure!(report.score == 0.6 && report.score == single, "single-topic score {} (topic {single})", report.score);

    let store = EmbeddingStore::from_entries(
        4,
        vec![
            ("east".to_string(), vec![1.0, 0.0, 0.0, 0.0]),
            ("eastward".to_string(), vec![2.0, 0.0, 0.0, 0.0]),
            ("north".to_string(), vec![0.0, 1.0, 0.0, 0.0]),
            ("up".to_string(), vec![0.0, 0.0, 3.0, 0.0]),
        ],
    )
    .map_err(|e| e.to_string())?;
    let zero = match_score("east eastward east", "north up", &store, 2, &Stoplist::empty()).map_err(|e| e.to_string())?;
    ensure!(zero == 0.0, "orthogonal subspaces scored {zero}");
    Ok("0.6 axis projection, single-topic identity, orthogonal -> 0 all exact".into())
}

// ---------------------------------------------------------------------------
// 6: end-to-end separation.

fn cluster_separation() -> Outcome {
    let start = Instant::now();
    let clusters = TwoClusters::new(20, 10, 606);
    let pairs = clusters.labeled_pairs(50, 607);
    let stop = Stoplist::english();
    let matcher = Matcher::with_default_k(&clusters.store, &stop);
    let scores = score_pairs(&matcher, &pairs).map_err(|e| e.to_string())?;
    let mut docs = 0;
    let mut margin = f64::INFINITY;
    for (chunk, s) in pairs.chunks(2).zip(scores.chunks(2)) {
        ensure!(chunk[0].label && !chunk[1].label && chunk[0].doc_id == chunk[1].doc_id, "unexpected pair layout");
        docs += 1;
        margin = margin.min(s[0] - s[1]);
        ensure!(s[0] > s[1], "{}: in-cluster {} <= out-cluster {}", chunk[0].doc_id, s[0], s[1]);
    }
    ensure!(docs == 100, "{docs} documents");
    let samples: Vec<(f64, bool)> = scores.iter().copied().zip(pairs.iter().map(|p| p.label)).collect();
    let stats = cross_validate(&samples, 10, 0).map_err(|e| e.to_string())?;
    ensure!(stats.f1.mean >= 0.99, "mean F1 {}", stats.f1.mean);
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    // Cross-check against the standalone entry point.
    let direct = match_score(&pairs[0].doc_text, &pairs[0].summary_text, &clusters.store, 15, &stop)
        .map_err(|e| e.to_string())?;
    ensure!(direct == scores[0], "match_score {direct} != batch score {}", scores[0]);
    Ok(format!(
        "100/100 documents prefer the in-cluster summary (min margin {margin:.3}), CV mean F1 {:.4} ± {:.4}, {:.2}s",
        stats.f1.mean,
        stats.f1.std,
        elapsed.as_secs_f64()
    ))
}

// ---------------------------------------------------------------------------
// 7: evaluation protocol.

/// `2TP / (predicted + actual)` as an exact fraction.
fn f1_fraction(scores: &[f64], labels: &[bool], predict: impl Fn(f64) -> bool) -> (u64, u64) {
    let (mut tp, mut pred, mut act) = (0u64, 0u64, 0u64);
    for (&s, &l) in scores.iter().zip(labels) {
        let p = predict(s);
        tp += (p && l) as u64;
        pred += p as u64;
        act += l as u64;
    }
    (2 * tp, pred + act)
}

fn fraction_cmp(a: (u64, u64), b: (u64, u64)) -> std::cmp::Ordering {
    (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128))
}

fn eval_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);

    for set in 0..100 {
        let n = rng.gen_range(2..=100);
        // Coarse grid so ties are common.
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..12) as f64 / 8.0).collect();
        let mut labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
        labels[0] = true;
        labels[1] = false;
        let t = tune_threshold(&scores, &labels).map_err(|e| e.to_string())?;

        // Every distinct partition "score > c" for c in {-inf} ∪ scores.
        let mut cuts: Vec<f64> = scores.clone();
        cuts.push(f64::NEG_INFINITY);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut best = (0u64, 1u64);
        let mut best_cut = f64::NAN;
        for &c in &cuts {
            let f = f1_fraction(&scores, &labels, |s| s > c);
            if fraction_cmp(f, best).is_gt() {
                best = f;
                best_cut = c;
            }
        }
        let got = f1_fraction(&scores, &labels, |s| s > t);
        ensure!(fraction_cmp(got, best).is_eq(), "set {set}: tuned F1 {got:?} < exhaustive {best:?}");
        // Lowest optimal partition: t must sit in [best_cut, next score).
        let next = cuts.iter().copied().find(|&c| c > best_cut).unwrap_or(f64::INFINITY);
        ensure!(t >= best_cut && t < next, "set {set}: threshold {t} outside [{best_cut}, {next})");
    }

    for q in 0..100 {
        let len = rng.gen_range(1..30);
        let ids: Vec<String> = (0..len).map(|i| format!("d{i}")).collect();
        let mut ranked = ids.clone();
        ranked.shuffle(&mut rng);
        let relevant: BTreeSet<String> = ids.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
        for k in 1..=len {
            let hits = ranked[..k].iter().filter(|id| relevant.contains(*id)).count();
            let p = precision_at_k(&ranked, &relevant, k).map_err(|e| e.to_string())?;
            ensure!(p == hits as f64 / k as f64, "query {q}: precision@{k} {p} vs {hits}/{k}");
        }
    }

    for h in 0..100 {
        let k = rng.gen_range(1..8);
        let queries = rng.gen_range(1..25);
        let mut per_query = BTreeMap::new();
        let mut counts = vec![0usize; k + 1];
        for i in 0..queries {
            let hits = rng.gen_range(0..=k);
            counts[hits] += 1;
            per_query.insert(format!("q{i}"), hits as f64 / k as f64);
        }
        let hist = precision_histogram(&per_query, k).map_err(|e| e.to_string())?;
        for (b, (&got, &c)) in hist.iter().zip(&counts).enumerate() {
            ensure!(got == c as f64 / queries as f64, "histogram {h} bin {b}: {got} vs {c}/{queries}");
        }
    }

    let samples: Vec<(f64, bool)> = (0..200).map(|_| (rng.gen::<f64>(), rng.gen_bool(0.5))).collect();
    let a = cross_validate(&samples, 10, 42).map_err(|e| e.to_string())?;
    let b = cross_validate(&samples, 10, 42).map_err(|e| e.to_string())?;
    let bits = |s: &hidden_topics::ClassificationStats| -> Vec<u64> {
        s.folds
            .iter()
            .flat_map(|f| [f.threshold, f.metrics.precision, f.metrics.recall, f.metrics.f1])
            .chain([s.precision.mean, s.precision.std, s.recall.mean, s.recall.std, s.f1.mean, s.f1.std])
            .map(f64::to_bits)
            .collect()
    };
    ensure!(bits(&a) == bits(&b) && a == b, "cross_validate differs between runs with seed 42");
    Ok("tune_threshold = exhaustive sweep on 100 sets, precision@k and histograms = direct counts, CV bit-identical".into())
}

// ---------------------------------------------------------------------------
// 8: CLI determinism.

fn cli_determinism() -> Outcome {
    let fx = common::Fixture::new(808);
    let mut checked = Vec::new();
    for args in [
        &["match", "doc.txt", "summary_a.txt"][..],
        &["rank", "summary_a.txt", "corpus.jsonl", "--top", "10"][..],
    ] {
        let first = fx.run(args);
        ensure!(first.status.success(), "{}: {}", args[0], common::stderr(&first));
        serde_json::from_slice::<serde_json::Value>(&first.stdout).map_err(|e| format!("{}: {e}", args[0]))?;
        for threads in ["1", "4", ""] {
            let mut cmd = common::bin();
            cmd.arg("--embeddings").arg(fx.path("vectors.txt"));
            for a in args {
                if a.ends_with(".txt") || a.ends_with(".jsonl") {
                    cmd.arg(fx.path(a));
                } else {
                    cmd.arg(a);
                }
            }
            if !threads.is_empty() {
                cmd.env("RAYON_NUM_THREADS", threads);
            }
            let again = cmd.env_remove("HIDDEN_TOPICS_STOPLIST").output().map_err(|e| e.to_string())?;
            ensure!(again.stdout == first.stdout, "{} output changed (RAYON_NUM_THREADS={threads:?})", args[0]);
        }
        checked.push(format!("{} ({} bytes)", args[0], first.stdout.len()));
    }
    Ok(format!("byte-identical JSON across 4 runs: {}", checked.join(", ")))
}

// ---------------------------------------------------------------------------
// 9: optional real data.

fn real_data() -> Option<Outcome> {
    let pairs = std::env::var_os("HIDDEN_TOPICS_PAIRS")?;
    let embeddings = std::env::var_os("HIDDEN_TOPICS_EMBEDDINGS")?;
    Some((|| {
        let start = Instant::now();
        let out = common::bin()
            .arg("--embeddings")
            .arg(&embeddings)
            .arg("eval-classify")
            .arg(&pairs)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(out.status.success(), "exit {:?}: {}", out.status.code(), common::stderr(&out));
        let elapsed = start.elapsed();
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let f1 = &v["stats"]["f1"];
        ensure!(f1["mean"].is_number(), "report lacks F1");
        ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
        Ok(format!(
            "{} pairs, F1 {} ± {} in {:.1}s",
            v["pairs"],
            f1["mean"],
            f1["std"],
            elapsed.as_secs_f64()
        ))
    })())
}
