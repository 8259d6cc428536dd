//! Relabels one half of a split corpus with a random permutation and
//! recovers it. Accuracy should track the plain identity benchmark.
//!
//! cargo run --release --example cipher_bench -- data/corpus_en.txt 10

use std::path::PathBuf;

use coocmap::bench::{self, BenchConfig, SplitData};

fn main() -> coocmap::Result<()> {
    let mut args = std::env::args().skip(1);
    let corpus = PathBuf::from(args.next().unwrap_or_else(|| "data/corpus_en.txt".into()));
    let mb: f64 = args.next().map_or(10.0, |s| s.parse().expect("budget in MB"));

    let cfg = BenchConfig::preset("coocmap")?;
    let data = SplitData::from_corpus(&corpus, (mb * 1e6) as u64, &cfg)?;
    let plain = bench::identity_run(&data, &cfg)?.report;
    println!("identity: {}", plain.score());
    for seed in 1..=3 {
        let out = bench::cipher_run(&data, seed, &cfg)?;
        println!("cipher seed {seed}: {}  gap {:+.4}", out.report.score(), out.report.accuracy - plain.accuracy);
    }
    Ok(())
}
