#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hidden_topics::corpus_io::{write_categories, write_corpus, write_pairs};
use hidden_topics::synthetic::{Cluster, TwoClusters};
use hidden_topics::{Corpus, RankingCategory};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hidden-topics"))
}

/// Files for a two-cluster world, written to a temporary directory.
pub struct Fixture {
    pub dir: TempDir,
    pub clusters: TwoClusters,
}

impl Fixture {
    pub fn new(seed: u64) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let clusters = TwoClusters::new(20, 5, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
        std::fs::write(dir.path().join("vectors.txt"), clusters.store_text()).unwrap();

        let doc = format!("The {} and the {}.", clusters.text(Cluster::A, 30, &mut rng), clusters.text(Cluster::A, 30, &mut rng));
        std::fs::write(dir.path().join("doc.txt"), doc).unwrap();
        std::fs::write(dir.path().join("summary_a.txt"), clusters.text(Cluster::A, 6, &mut rng)).unwrap();
        std::fs::write(dir.path().join("summary_b.txt"), clusters.text(Cluster::B, 6, &mut rng)).unwrap();
        std::fs::write(dir.path().join("empty.txt"), "the of 1999 unknownword").unwrap();

        let mut corpus = Corpus::new();
        for i in 0..5 {
            corpus.insert(format!("a{i}"), clusters.text(Cluster::A, 40, &mut rng));
            corpus.insert(format!("b{i}"), clusters.text(Cluster::B, 40, &mut rng));
        }
        let mut buf = Vec::new();
        write_corpus(&mut buf, &corpus).unwrap();
        std::fs::write(dir.path().join("corpus.jsonl"), buf).unwrap();

        let categories = vec![
            RankingCategory {
                category_id: "cat-a".into(),
                summary_text: clusters.text(Cluster::A, 5, &mut rng),
                relevant_doc_ids: (0..5).map(|i| format!("a{i}")).collect(),
            },
            RankingCategory {
                category_id: "cat-b".into(),
                summary_text: clusters.text(Cluster::B, 5, &mut rng),
                relevant_doc_ids: (0..3).map(|i| format!("b{i}")).collect(),
            },
        ];
        let mut buf = Vec::new();
        write_categories(&mut buf, &categories).unwrap();
        std::fs::write(dir.path().join("categories.jsonl"), buf).unwrap();

        let pairs = clusters.labeled_pairs(10, seed + 2);
        let mut buf = Vec::new();
        write_pairs(&mut buf, &pairs).unwrap();
        std::fs::write(dir.path().join("pairs.jsonl"), buf).unwrap();

        Self { dir, clusters }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn run(&self, args: &[&str]) -> Output {
        bin()
            .arg("--embeddings")
            .arg(self.path("vectors.txt"))
            .args(args.iter().map(|a| {
                if a.ends_with(".txt") || a.ends_with(".jsonl") {
                    self.path(a).into_os_string()
                } else {
                    a.into()
                }
            }))
            .env_remove("HIDDEN_TOPICS_STOPLIST")
            .output()
            .unwrap()
    }
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn display(p: &Path) -> String {
    p.display().to_string()
}
