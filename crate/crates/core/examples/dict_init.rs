//! Seeds self-learning with a partial dictionary instead of the
//! unsupervised initializer.

use coocmap::align::{self, AlignConfig, MatchState};
use coocmap::bench::{synthetic_corpus, BenchConfig, SplitData, SyntheticConfig};
use coocmap::eval;

fn main() -> coocmap::Result<()> {
    let cfg = BenchConfig {
        vocab_size: 400,
        eval_top: 200,
        ..BenchConfig::preset("coocmap")?
    };
    let data = SplitData::from_text(&synthetic_corpus(&SyntheticConfig::default()), 0, &cfg)?;
    let truth = eval::identity_truth(&data.a.vocab, &data.b.vocab, 200);

    for seed_size in [0, 10, 50, 200] {
        let seed = (seed_size > 0).then(|| {
            let (s, t) = truth.iter().take(seed_size).copied().unzip();
            MatchState::new(s, t).expect("valid seed")
        });
        let run = align::run_coocmap(&data.a.counts, &data.b.counts, &cfg.pipeline.coocmap_config(), seed.as_ref())?;
        let targets = run.translate(&AlignConfig::default())?;
        println!("seed {seed_size:>3} pairs: {}", eval::score_indices(&targets, &truth));
    }
    Ok(())
}
