//! Aligns two halves of a synthetic corpus through the lower-level API and
//! prints the objective trace of self-learning.

use coocmap::align::{self, AlignConfig, CoocmapConfig};
use coocmap::assoc::AssocKind;
use coocmap::bench::{synthetic_corpus, split_alternating, SyntheticConfig};
use coocmap::{cooc, corpus, eval};

fn main() -> coocmap::Result<()> {
    let text = synthetic_corpus(&SyntheticConfig::default());
    let lines = corpus::tokenize_str(&text);
    let (a, b) = split_alternating(&lines, 1000);
    let side = |half: &[Vec<String>]| -> coocmap::Result<_> {
        let vocab = corpus::build_vocab(corpus::flat_tokens(half), 300)?;
        let counts = cooc::count_cooc(&corpus::encode(half, &vocab), 5)?;
        Ok((vocab, counts))
    };
    let (v1, c1) = side(&a)?;
    let (v2, c2) = side(&b)?;

    let cfg = CoocmapConfig {
        assoc: AssocKind::Coocmap,
        trunc: None,
        clip: None,
        align: AlignConfig::default(),
    };
    let run = align::run_coocmap(&c1, &c2, &cfg, None)?;
    for stage in &run.stages {
        let trace: Vec<String> = stage.objectives.iter().map(|o| format!("{o:.4}")).collect();
        println!("{}: {}", stage.name, trace.join(" "));
    }

    let targets = run.translate(&cfg.align)?;
    let truth = eval::identity_truth(&v1, &v2, 200);
    println!("top-200 identity {}", eval::score_indices(&targets, &truth));
    for (i, &j) in targets.iter().enumerate().skip(1).take(8) {
        println!("  {} -> {}", v1.token(i as u32), v2.token(j as u32));
    }
    Ok(())
}
