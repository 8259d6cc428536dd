//! Data-size sweep over a synthetic corpus, written as CSV to stdout.

use coocmap::bench::{self, synthetic_corpus, SweepMode, SweepSpec, SyntheticConfig};

fn main() -> coocmap::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let corpus = dir.path().join("synthetic.txt");
    std::fs::write(&corpus, synthetic_corpus(&SyntheticConfig { lines: 40_000, ..Default::default() })).expect("write corpus");

    let spec = SweepSpec {
        mode: SweepMode::Identity,
        corpus: Some(corpus),
        source: None,
        target: None,
        dictionary: None,
        budgets: vec![50_000, 100_000, 200_000, 400_000, 800_000],
        presets: vec!["coocmap".into(), "ppmi".into()],
        dimensions: vec![],
        repetitions: 1,
        seed: 0,
        vocab_size: 300,
        window: 5,
        eval_top: 200,
        report_dir: None,
    };
    let rows = bench::run_sweep(&spec, 2)?;
    bench::write_sweep_csv(std::io::stdout().lock(), &rows)
}
