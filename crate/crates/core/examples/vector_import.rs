//! Writes word vectors in text format, reads them back, and matches them
//! through their Gram matrices.

use coocmap::assoc;
use coocmap::bench::{synthetic_corpus, BenchConfig, SplitData, SyntheticConfig};
use coocmap::eval;
use coocmap::presets::{run_pipeline, PipelineConfig, PipelineInputs};

fn main() -> coocmap::Result<()> {
    let cfg = BenchConfig {
        vocab_size: 400,
        eval_top: 200,
        ..BenchConfig::preset("coocmap")?
    };
    let data = SplitData::from_text(&synthetic_corpus(&SyntheticConfig::default()), 0, &cfg)?;
    let dir = tempfile::tempdir().expect("temp dir");
    let p1 = dir.path().join("a.vec");
    let p2 = dir.path().join("b.vec");
    assoc::save_vectors(&p1, &assoc::svd_vectors(&data.a.counts, 40)?, &data.a.vocab)?;
    assoc::save_vectors(&p2, &assoc::svd_vectors(&data.b.counts, 40)?, &data.b.vocab)?;
    let xv = assoc::load_vectors(&p1, &data.a.vocab)?.vectors;
    let zv = assoc::load_vectors(&p2, &data.b.vocab)?.vectors;

    let truth = eval::identity_truth(&data.a.vocab, &data.b.vocab, 200);
    for preset in ["vecmap-vectors", "coocmap-vectors", "coocmap-vectors-clip"] {
        let out = run_pipeline(
            &PipelineConfig::preset(preset)?,
            PipelineInputs {
                vectors: Some((&xv, &zv)),
                ..Default::default()
            },
        )?;
        println!("{preset:<22} {}", eval::score_indices(&out.targets, &truth));
    }
    Ok(())
}
