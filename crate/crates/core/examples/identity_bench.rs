//! Splits one corpus into two halves and checks that every frequent word
//! is translated to itself.
//!
//! cargo run --release --example identity_bench -- data/corpus_en.txt 20 coocmap

use std::path::PathBuf;

use coocmap::bench::{split_identity_bench, BenchConfig};

fn main() -> coocmap::Result<()> {
    let mut args = std::env::args().skip(1);
    let corpus = PathBuf::from(args.next().unwrap_or_else(|| "data/corpus_en.txt".into()));
    let mb: f64 = args.next().map_or(20.0, |s| s.parse().expect("budget in MB"));
    let preset = args.next().unwrap_or_else(|| "coocmap".into());

    let cfg = BenchConfig::preset(&preset)?;
    let out = split_identity_bench(&corpus, (mb * 1e6) as u64, &cfg)?;
    let r = &out.report;
    println!(
        "{preset} @ {mb} MB: identity accuracy {:.3} ({}/{}) in {:.1}s",
        r.accuracy, r.correct, r.evaluated, r.seconds
    );
    for stage in &r.stages {
        println!("  {}: {} iterations, final objective {:.5}", stage.name, stage.objectives.len(), stage.objectives.last().unwrap_or(&0.0));
    }
    Ok(())
}
