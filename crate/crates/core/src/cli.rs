//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 numeric failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use crate::align::ClipSpec;
use crate::assoc::{self, LoadedVectors};
use crate::bench::{self, BenchConfig, RunReport, SplitData, SweepSpec};
use crate::cooc::{self, DEFAULT_WINDOW};
use crate::corpus::{self, Vocabulary, DEFAULT_VOCAB_SIZE};
use crate::error::{Error, Result};
use crate::eval::{self, Predictions};
use crate::presets::{run_pipeline, PipelineConfig, PipelineInputs};

#[derive(Parser, Debug)]
#[command(name = "coocmap", version, about = "Unsupervised word translation from co-occurrence counts")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Preset parameters that may be overridden per run.
#[derive(clap::Args, Debug, Clone, Default)]
pub struct Overrides {
    /// Lower clip percentile.
    #[arg(long, requires = "clip_hi")]
    pub clip_lo: Option<f64>,
    /// Upper clip percentile.
    #[arg(long, requires = "clip_lo")]
    pub clip_hi: Option<f64>,
    /// Singular directions removed in the second stage.
    #[arg(long)]
    pub drop: Option<usize>,
    /// Truncation rank, or vector dimension for vecmap-raw.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub csls_k: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut PipelineConfig) {
        if let (Some(lo), Some(hi)) = (self.clip_lo, self.clip_hi) {
            cfg.clip = Some(ClipSpec { lo, hi });
        }
        if self.drop.is_some() {
            cfg.drop = self.drop;
        }
        if self.dim.is_some() {
            cfg.dim = self.dim;
        }
        if let Some(k) = self.csls_k {
            cfg.csls_k = k;
        }
        if let Some(n) = self.max_iters {
            cfg.max_iters = n;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchMode {
    Identity,
    Cipher,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a vocabulary and co-occurrence counts from raw text.
    Count {
        #[arg(long)]
        input: PathBuf,
        /// Bytes read from the start of the input (e.g. 20MB, 500kB, 123).
        #[arg(long, value_parser = parse_bytes)]
        bytes: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_VOCAB_SIZE)]
        vocab_size: usize,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        /// Line shards counted in parallel.
        #[arg(long, default_value_t = 1)]
        shards: usize,
        /// Count file; the vocabulary goes to `<out>.vocab`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Induce a translation between two counted corpora.
    Induce {
        #[arg(long)]
        cooc1: PathBuf,
        #[arg(long)]
        cooc2: PathBuf,
        /// Defaults to `<cooc1>.vocab`.
        #[arg(long)]
        vocab1: Option<PathBuf>,
        /// Defaults to `<cooc2>.vocab`.
        #[arg(long)]
        vocab2: Option<PathBuf>,
        #[arg(long, default_value = "coocmap")]
        preset: String,
        /// Evaluation dictionary; also the seed for dict-init.
        #[arg(long)]
        dict: Option<PathBuf>,
        #[arg(long, requires = "vectors2")]
        vectors1: Option<PathBuf>,
        #[arg(long, requires = "vectors1")]
        vectors2: Option<PathBuf>,
        /// Without a dictionary, score identity on this many frequent words.
        #[arg(long, default_value_t = bench::DEFAULT_EVAL_TOP)]
        eval_top: usize,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out_report: PathBuf,
        #[arg(long)]
        out_preds: PathBuf,
    },
    /// Score a predictions dump against a dictionary.
    Eval {
        #[arg(long)]
        preds: PathBuf,
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        vocab1: PathBuf,
        #[arg(long)]
        vocab2: PathBuf,
    },
    /// Run the split-corpus identity or cipher benchmark.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_parser = parse_bytes)]
        budget: u64,
        #[arg(long, value_enum, default_value = "identity")]
        mode: BenchMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "coocmap")]
        preset: String,
        #[arg(long, default_value_t = DEFAULT_VOCAB_SIZE)]
        vocab_size: usize,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long, default_value_t = bench::DEFAULT_EVAL_TOP)]
        eval_top: usize,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out_report: Option<PathBuf>,
        #[arg(long)]
        out_preds: Option<PathBuf>,
    },
    /// Run a JSON sweep specification and write the results table.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

/// Parses `123`, `500kB`, `20MB` or `1.5GB` (decimal units).
pub fn parse_bytes(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim();
    let split = t.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let scale = match unit.to_ascii_lowercase().as_str() {
        "" | "b" => 1.0,
        "kb" | "k" => 1e3,
        "mb" | "m" => 1e6,
        "gb" | "g" => 1e9,
        _ => return Err(format!("unknown unit {unit:?}")),
    };
    let value: f64 = num.trim().parse().map_err(|_| format!("bad byte count {s:?}"))?;
    if !(value >= 0.0) || !value.is_finite() {
        return Err(format!("bad byte count {s:?}"));
    }
    Ok((value * scale).round() as u64)
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: n + 1,
                msg: "expected key = value".into(),
            });
        };
        let key = k.trim().replace('_', "-");
        let value = v.trim().trim_matches('"').to_owned();
        if key.is_empty() {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: n + 1,
                msg: "empty key".into(),
            });
        }
        out.push((key, value));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Inserts config entries as flags right after the subcommand, so flags
/// given on the command line (which come later) take precedence.
fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let entries = read_config(&path)?;
    let cmd = Cli::command();
    let names: Vec<String> = cmd.get_subcommands().map(|c| c.get_name().to_owned()).collect();
    let Some(pos) = args.iter().position(|a| names.iter().any(|n| a == n.as_str())) else {
        return Ok(args);
    };
    let sub = cmd
        .find_subcommand(args[pos].to_str().unwrap_or_default())
        .expect("matched by name");
    let mut extra = Vec::new();
    for (key, value) in entries {
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            return Err(Error::validation(format!(
                "{}: unknown key {key:?} for `{}`",
                path.display(),
                sub.get_name()
            )));
        };
        if key == "config" {
            continue;
        }
        if matches!(arg.get_action(), clap::ArgAction::SetTrue) {
            if value == "true" {
                extra.push(OsString::from(format!("--{key}")));
            }
        } else {
            extra.push(OsString::from(format!("--{key}")));
            extra.push(OsString::from(value));
        }
    }
    let mut merged = args[..=pos].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[pos + 1..]);
    Ok(merged)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn vocab_path_for(cooc_path: &Path) -> PathBuf {
    let mut s = cooc_path.as_os_str().to_owned();
    s.push(".vocab");
    PathBuf::from(s)
}

fn write_report(path: &Path, report: &RunReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

fn load_vectors_for(path: &Path, vocab: &Vocabulary) -> Result<LoadedVectors> {
    let loaded = assoc::load_vectors(path, vocab)?;
    if !loaded.missing.is_empty() {
        eprintln!(
            "note: {} vocabulary words have no vector in {} (zero rows)",
            loaded.missing.len(),
            path.display()
        );
    }
    Ok(loaded)
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Count {
            input,
            bytes,
            vocab_size,
            window,
            shards,
            out,
        } => {
            let text = corpus::take_head_bytes(&input, bytes.unwrap_or(u64::MAX))?;
            let lines = corpus::tokenize(&text)?;
            let vocab = corpus::build_vocab(corpus::flat_tokens(&lines), vocab_size)?;
            let encoded = corpus::encode(&lines, &vocab);
            let counts = cooc::count_cooc_sharded(&encoded, window, shards)?;
            let types = corpus::flat_tokens(&lines).collect::<std::collections::HashSet<_>>().len();
            vocab.save(vocab_path_for(&out))?;
            cooc::save_cooc(&counts, &out)?;
            println!(
                "bytes {} tokens {} types {} vocab {} window {}",
                text.len(),
                encoded.ids.len(),
                types,
                vocab.size(),
                window
            );
            Ok(())
        }
        Command::Induce {
            cooc1,
            cooc2,
            vocab1,
            vocab2,
            preset,
            dict,
            vectors1,
            vectors2,
            eval_top,
            overrides,
            out_report,
            out_preds,
        } => {
            let started = Instant::now();
            let v1 = Vocabulary::load(vocab1.unwrap_or_else(|| vocab_path_for(&cooc1)))?;
            let v2 = Vocabulary::load(vocab2.unwrap_or_else(|| vocab_path_for(&cooc2)))?;
            let c1 = cooc::load_cooc(&cooc1, Some(&v1))?;
            let c2 = cooc::load_cooc(&cooc2, Some(&v2))?;
            let mut pipeline = PipelineConfig::preset(&preset)?;
            overrides.apply(&mut pipeline);
            let dictionary = dict.as_deref().map(eval::load_dictionary).transpose()?;
            let seed = match (&dictionary, pipeline.method.needs_seed()) {
                (Some(d), true) => Some(d.seed_state(&v1, &v2)?),
                (None, true) => return Err(Error::validation("dict-init needs --dict")),
                _ => None,
            };
            let vectors = match (&vectors1, &vectors2) {
                (Some(p1), Some(p2)) => Some((load_vectors_for(p1, &v1)?.vectors, load_vectors_for(p2, &v2)?.vectors)),
                _ => None,
            };
            let outcome = run_pipeline(
                &pipeline,
                PipelineInputs {
                    c1: Some(&c1),
                    c2: Some(&c2),
                    vectors: vectors.as_ref().map(|(a, b)| (a, b)),
                    seed: seed.as_ref(),
                },
            )?;
            let preds = Predictions::from_indices(&outcome.targets, &v1, &v2);
            let truth_dict = match dictionary {
                Some(d) => d,
                None => eval::truth_dictionary(&eval::identity_truth(&v1, &v2, eval_top), &v1, &v2),
            };
            let score = eval::precision_at_1(&preds, &truth_dict, &v1, &v2);
            eval::write_predictions(&out_preds, &preds, Some(&truth_dict), &v1, &v2)?;
            let report = RunReport {
                mode: "induce".into(),
                config: BenchConfig {
                    pipeline,
                    vocab_size: v1.size().max(v2.size()),
                    window: c1.window,
                    eval_top,
                    count_shards: 1,
                },
                budget_bytes: 0,
                bytes_used: [0, 0],
                vocab_sizes: [v1.size(), v2.size()],
                token_counts: [c1.token_count, c2.token_count],
                rng_seed: None,
                stages: outcome.stages,
                accuracy: score.accuracy,
                evaluated: score.evaluated,
                correct: score.correct,
                no_overlap: score.no_overlap,
                works: score.accuracy >= bench::WORKS_THRESHOLD,
                starts: score.accuracy >= bench::STARTS_THRESHOLD,
                seconds: started.elapsed().as_secs_f64(),
            };
            write_report(&out_report, &report)?;
            println!("{score}");
            Ok(())
        }
        Command::Eval {
            preds,
            dict,
            vocab1,
            vocab2,
        } => {
            let preds = eval::read_predictions(&preds)?;
            let dict = eval::load_dictionary(&dict)?;
            let v1 = Vocabulary::load(&vocab1)?;
            let v2 = Vocabulary::load(&vocab2)?;
            println!("{}", eval::precision_at_1(&preds, &dict, &v1, &v2));
            Ok(())
        }
        Command::Bench {
            corpus,
            budget,
            mode,
            seed,
            preset,
            vocab_size,
            window,
            eval_top,
            overrides,
            out_report,
            out_preds,
        } => {
            let mut pipeline = PipelineConfig::preset(&preset)?;
            overrides.apply(&mut pipeline);
            let cfg = BenchConfig {
                pipeline,
                vocab_size,
                window,
                eval_top,
                count_shards: 1,
            };
            let data = SplitData::from_corpus(&corpus, budget, &cfg)?;
            let outcome = match mode {
                BenchMode::Identity => bench::identity_run(&data, &cfg)?,
                BenchMode::Cipher => bench::cipher_run(&data, seed, &cfg)?,
            };
            if let Some(p) = &out_report {
                write_report(p, &outcome.report)?;
            }
            if let Some(p) = &out_preds {
                eval::write_predictions(
                    p,
                    &outcome.predictions,
                    Some(&outcome.dictionary),
                    &outcome.source_vocab,
                    &outcome.target_vocab,
                )?;
            }
            let r = &outcome.report;
            println!(
                "{} {} bytes={} {} works={} seconds={:.1}",
                r.mode,
                preset,
                budget,
                r.score(),
                r.works,
                r.seconds
            );
            Ok(())
        }
        Command::Sweep { spec, out_csv, workers } => {
            let spec = SweepSpec::load(&spec)?;
            let rows = bench::run_sweep(&spec, workers)?;
            let file = std::fs::File::create(&out_csv).map_err(|e| Error::io(&out_csv, e))?;
            bench::write_sweep_csv(file, &rows)?;
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            println!("{} runs, {} failed, table in {}", rows.len(), failed, out_csv.display());
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_sizes() {
        assert_eq!(parse_bytes("123"), Ok(123));
        assert_eq!(parse_bytes("20MB"), Ok(20_000_000));
        assert_eq!(parse_bytes("0.5mb"), Ok(500_000));
        assert_eq!(parse_bytes("3kB"), Ok(3000));
        assert!(parse_bytes("12XB").is_err());
        assert!(parse_bytes("-1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn config_values_sit_under_explicit_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.conf");
        std::fs::write(&cfg, "# defaults\nwindow = 3\nvocab_size = 50\n").unwrap();
        let args: Vec<OsString> = ["coocmap", "count", "--config", cfg.to_str().unwrap(), "--input", "x", "--out", "y", "--window", "7"]
            .iter()
            .map(OsString::from)
            .collect();
        let cli = Cli::try_parse_from(merge_config(args).unwrap()).unwrap();
        let Command::Count { window, vocab_size, .. } = cli.command else { panic!() };
        assert_eq!((window, vocab_size), (7, 50));

        std::fs::write(&cfg, "colour = red\n").unwrap();
        let args: Vec<OsString> = ["coocmap", "count", "--config", cfg.to_str().unwrap()]
            .iter()
            .map(OsString::from)
            .collect();
        assert!(matches!(merge_config(args), Err(Error::Validation(_))));
    }
}
