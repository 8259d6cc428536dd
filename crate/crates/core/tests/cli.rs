use std::path::Path;
use std::process::{Command, Output};

use coocmap::bench::{self, RunReport, SyntheticConfig};
use coocmap::cooc;
use coocmap::corpus::Vocabulary;

fn coocmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coocmap")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = coocmap(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synthetic_file(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("syn.txt");
    std::fs::write(&path, bench::synthetic_corpus(&SyntheticConfig { lines: 6000, ..Default::default() })).unwrap();
    path
}

#[test]
fn count_writes_window_one_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tiny.txt");
    std::fs::write(&input, "a b c\n").unwrap();
    let out = dir.path().join("tiny.cooc");
    let stdout = ok(&["count", "--input", s(&input), "--window", "1", "--out", s(&out)]);
    assert!(stdout.contains("tokens 3"), "{stdout}");
    let vocab = Vocabulary::load(dir.path().join("tiny.cooc.vocab")).unwrap();
    let c = cooc::load_cooc(&out, Some(&vocab)).unwrap();
    let id = |t: &str| vocab.id(t).unwrap() as usize;
    let mut want = [[0.0; 4]; 4];
    for (x, y) in [("a", "b"), ("b", "c")] {
        want[id(x)][id(y)] = 1.0;
        want[id(y)][id(x)] = 1.0;
    }
    for (i, row) in want.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            assert_eq!(c.counts.get(i, j), v, "({i},{j})");
        }
    }
}

#[test]
fn induce_on_identical_counts_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let input = synthetic_file(dir.path());
    let counts = dir.path().join("syn.cooc");
    ok(&["count", "--input", s(&input), "--vocab-size", "150", "--out", s(&counts)]);
    let report = dir.path().join("report.json");
    let preds = dir.path().join("preds.tsv");
    let stdout = ok(&[
        "induce", "--cooc1", s(&counts), "--cooc2", s(&counts), "--eval-top", "100",
        "--out-report", s(&report), "--out-preds", s(&preds),
    ]);
    assert!(stdout.starts_with("accuracy 1.0000 (100/100)"), "{stdout}");
    let r: RunReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.mode, "induce");
    assert_eq!(r.accuracy, 1.0);
    let dump = std::fs::read_to_string(&preds).unwrap();
    assert!(dump.starts_with("rank\tsource\tprediction\tcorrect\n"));

    // rerunning gives byte-identical outputs apart from the timing field
    let report2 = dir.path().join("report2.json");
    let preds2 = dir.path().join("preds2.tsv");
    ok(&[
        "induce", "--cooc1", s(&counts), "--cooc2", s(&counts), "--eval-top", "100",
        "--out-report", s(&report2), "--out-preds", s(&preds2),
    ]);
    assert_eq!(dump, std::fs::read_to_string(&preds2).unwrap());
    let r2: RunReport = serde_json::from_str(&std::fs::read_to_string(&report2).unwrap()).unwrap();
    assert_eq!(r.deterministic(), r2.deterministic());
}

#[test]
fn eval_scores_a_handwritten_dump() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    std::fs::write(p("v1"), "[UNK]\nhouse\ncat\ndog\n").unwrap();
    std::fs::write(p("v2"), "[UNK]\ncasa\ngato\nperro\n").unwrap();
    std::fs::write(p("preds"), "1\thouse\tcasa\n2\tcat\tgato\n3\tdog\tgato\n").unwrap();
    std::fs::write(p("dict"), "house casa\ncat gato\ndog perro\n").unwrap();
    let stdout = ok(&["eval", "--preds", s(&p("preds")), "--dict", s(&p("dict")), "--vocab1", s(&p("v1")), "--vocab2", s(&p("v2"))]);
    assert_eq!(stdout.trim(), "accuracy 0.6667 (2/3)");
}

#[test]
fn exit_codes_separate_usage_from_bad_input() {
    assert_eq!(coocmap(&["--help"]).status.code(), Some(0));
    assert_eq!(coocmap(&["count"]).status.code(), Some(1));
    assert_eq!(coocmap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(coocmap(&["count", "--input", "/nonexistent/x", "--out", "/tmp/never"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.txt");
    std::fs::write(&input, "a b\n").unwrap();
    let out = coocmap(&["count", "--input", s(&input), "--vocab-size", "0", "--out", s(&dir.path().join("c"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vocabulary size"));
}

#[test]
fn config_file_supplies_defaults_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.txt");
    std::fs::write(&input, "a b c d e f\n").unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# shared settings\nwindow = 1\nvocab_size = 4\n").unwrap();
    let out = dir.path().join("c");
    let stdout = ok(&["count", "--config", s(&conf), "--input", s(&input), "--out", s(&out), "--window", "2"]);
    assert!(stdout.contains("vocab 4 window 2"), "{stdout}");

    std::fs::write(&conf, "windoww = 1\n").unwrap();
    assert_eq!(coocmap(&["count", "--config", s(&conf), "--input", s(&input), "--out", s(&out)]).status.code(), Some(2));
}

#[test]
fn sweep_writes_the_results_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = synthetic_file(dir.path());
    let spec = dir.path().join("spec.json");
    let spec_json = serde_json::json!({
        "mode": "identity",
        "corpus": input,
        "budgets": [50000, 200000],
        "presets": ["coocmap"],
        "vocab_size": 150,
        "eval_top": 100,
    });
    std::fs::write(&spec, spec_json.to_string()).unwrap();
    let csv = dir.path().join("out.csv");
    let stdout = ok(&["sweep", "--spec", s(&spec), "--out-csv", s(&csv)]);
    assert!(stdout.starts_with("2 runs, 0 failed"), "{stdout}");
    let table = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], bench::SWEEP_CSV_HEADER);
    assert!(lines[1].starts_with("50000,coocmap,"));
    assert!(lines[2].starts_with("200000,coocmap,"));

    std::fs::write(&spec, r#"{"mode": "identity", "budgets": [1], "presets": ["coocmap"], "colour": 1}"#).unwrap();
    assert_eq!(coocmap(&["sweep", "--spec", s(&spec), "--out-csv", s(&csv)]).status.code(), Some(2));
}

#[test]
fn bench_reports_identity_and_cipher() {
    let dir = tempfile::tempdir().unwrap();
    let input = synthetic_file(dir.path());
    let report = dir.path().join("r.json");
    for mode in ["identity", "cipher"] {
        let stdout = ok(&[
            "bench", "--corpus", s(&input), "--budget", "1MB", "--mode", mode, "--seed", "3",
            "--vocab-size", "150", "--eval-top", "100", "--out-report", s(&report),
        ]);
        assert!(stdout.starts_with(mode), "{stdout}");
        let r: RunReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(r.mode, mode);
        assert!(r.accuracy > 0.8, "{mode}: {}", r.accuracy);
    }
}
