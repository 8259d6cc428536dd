//! Compares self-learning on co-occurrence rows against the mapping-based
//! baseline on SVD vectors of the same counts.

use coocmap::bench::{self, synthetic_corpus, BenchConfig, SplitData, SyntheticConfig};

fn main() -> coocmap::Result<()> {
    let text = synthetic_corpus(&SyntheticConfig::default());
    for (preset, dim) in [("coocmap", None), ("vecmap-raw", Some(50)), ("vecmap-raw", Some(150))] {
        let mut cfg = BenchConfig {
            vocab_size: 400,
            eval_top: 200,
            ..BenchConfig::preset(preset)?
        };
        if dim.is_some() {
            cfg.pipeline.dim = dim;
        }
        let data = SplitData::from_text(&text, 0, &cfg)?;
        let r = bench::identity_run(&data, &cfg)?.report;
        println!("{preset:<10} dim {:>4}  {}", dim.map_or("-".into(), |d| d.to_string()), r.score());
    }
    Ok(())
}
