//! Runs the same identity benchmark with each association matrix.
//!
//! cargo run --release --example assoc_variants

use coocmap::bench::{self, synthetic_corpus, BenchConfig, SplitData, SyntheticConfig};

fn main() -> coocmap::Result<()> {
    let text = synthetic_corpus(&SyntheticConfig::default());
    for preset in ["coocmap", "log1p", "rapp", "fung", "ppmi", "glove"] {
        let cfg = BenchConfig {
            vocab_size: 400,
            eval_top: 200,
            ..BenchConfig::preset(preset)?
        };
        let data = SplitData::from_text(&text, 0, &cfg)?;
        let r = bench::identity_run(&data, &cfg)?.report;
        let iters: usize = r.stages.iter().map(|s| s.objectives.len()).sum();
        println!("{preset:>8}  {}  ({iters} iterations)", r.score());
    }
    Ok(())
}
