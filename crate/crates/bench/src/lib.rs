//! Shared setup for the kernel benchmarks: a seeded synthetic corpus and its
//! final-month snapshot.

use forumrank_core::{
    extract_snapshot, generate_synthetic, CommGraph, Corpus, ExtractionParams, SynthConfig,
};

pub fn bench_corpus(n_users: u32, months: u32) -> Corpus {
    let cfg = SynthConfig {
        seed: 2024,
        n_users,
        months,
        topic_start_rate: 0.8,
        reply_rate: 5.0,
        ..Default::default()
    };
    let out = generate_synthetic(&cfg).expect("generate benchmark corpus");
    Corpus::new(out.posts, out.sales).expect("valid corpus")
}

pub fn bench_graph(corpus: &Corpus) -> CommGraph {
    let cutoff = *corpus.span_months().expect("nonempty corpus").last().unwrap();
    extract_snapshot(corpus, &ExtractionParams::default(), cutoff).expect("snapshot")
}
