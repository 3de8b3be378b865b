//! Seeded synthetic data: an embedding store with two mutually orthogonal
//! word clusters, and documents or summaries drawn from one cluster.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus_io::LabeledPair;
use crate::embeddings::EmbeddingStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cluster {
    A,
    B,
}

impl Cluster {
    pub fn other(self) -> Self {
        match self {
            Cluster::A => Cluster::B,
            Cluster::B => Cluster::A,
        }
    }
}

/// Cluster `A` words live in the first `dim / 2` coordinates, cluster `B`
/// words in the rest.
#[derive(Debug, Clone)]
pub struct TwoClusters {
    pub store: EmbeddingStore,
    pub a: Vec<String>,
    pub b: Vec<String>,
}

impl TwoClusters {
    pub fn new(words_per_cluster: usize, dim_per_cluster: usize, seed: u64) -> Self {
        assert!(dim_per_cluster > 0, "clusters need at least one dimension");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 2 * dim_per_cluster;
        let mut entries = Vec::with_capacity(2 * words_per_cluster);
        let mut names = [Vec::new(), Vec::new()];
        for (c, prefix) in ["alpha", "beta"].iter().enumerate() {
            for w in 0..words_per_cluster {
                let token = format!("{prefix}{w:03}");
                let mut v = vec![0.0; dim];
                let block = &mut v[c * dim_per_cluster..(c + 1) * dim_per_cluster];
                // Shared offset keeps the cluster coherent; jitter spreads it.
                for x in block.iter_mut() {
                    *x = 0.5 + rng.gen_range(-1.0..1.0);
                }
                if block.iter().all(|&x| x == 0.0) {
                    block[0] = 1.0;
                }
                names[c].push(token.clone());
                entries.push((token, v));
            }
        }
        let store = EmbeddingStore::from_entries(dim, entries).expect("generated vectors are valid");
        let [a, b] = names;
        Self { store, a, b }
    }

    pub fn words(&self, cluster: Cluster) -> &[String] {
        match cluster {
            Cluster::A => &self.a,
            Cluster::B => &self.b,
        }
    }

    /// Space-separated text of `len` words sampled with replacement.
    pub fn text<R: Rng>(&self, cluster: Cluster, len: usize, rng: &mut R) -> String {
        let words = self.words(cluster);
        (0..len)
            .map(|_| words.choose(rng).expect("cluster is not empty").as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// For every generated document, one in-cluster (positive) and one
    /// out-of-cluster (negative) summary pair.
    pub fn labeled_pairs(&self, docs_per_cluster: usize, seed: u64) -> Vec<LabeledPair> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for cluster in [Cluster::A, Cluster::B] {
            for i in 0..docs_per_cluster {
                let doc_id = format!("{cluster:?}-doc{i:03}");
                let len = rng.gen_range(40..120);
                let doc_text = self.text(cluster, len, &mut rng);
                for (label, side) in [(true, cluster), (false, cluster.other())] {
                    let len = rng.gen_range(4..12);
                    pairs.push(LabeledPair {
                        summary_id: format!("{doc_id}-{side:?}"),
                        doc_id: doc_id.clone(),
                        summary_text: self.text(side, len, &mut rng),
                        doc_text: doc_text.clone(),
                        label,
                    });
                }
            }
        }
        pairs
    }

    /// Writes the store in the whitespace text format.
    pub fn store_text(&self) -> String {
        let mut tokens: Vec<&String> = self.a.iter().chain(&self.b).collect();
        tokens.sort();
        let mut out = format!("{} {}\n", tokens.len(), self.store.dim());
        for t in tokens {
            out.push_str(t);
            for x in self.store.lookup(t).expect("token was generated") {
                out.push(' ');
                out.push_str(&format!("{x:?}"));
            }
            out.push('\n');
        }
        out
    }
}
