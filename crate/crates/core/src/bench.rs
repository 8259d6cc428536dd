//! Desk-scale harnesses: split-corpus identity, substitution cipher, paired
//! corpora with a dictionary, and sweeps over budgets, presets and
//! dimensions.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::align::{MatchState, StageTrace};
use crate::cooc::{self, CoocMatrix, DEFAULT_WINDOW};
use crate::corpus::{self, Vocabulary, DEFAULT_VOCAB_SIZE};
use crate::error::{Error, Result};
use crate::kernels;
use crate::eval::{self, Dictionary, Predictions, Score};
use crate::presets::{run_pipeline, PipelineConfig, PipelineInputs};

/// Lines per block when splitting one corpus into two halves.
pub const SPLIT_BLOCK_LINES: usize = 1000;
/// Identity accuracy is measured on this many of the most frequent shared
/// tokens.
pub const DEFAULT_EVAL_TOP: usize = 1000;
/// Accuracy at which a run "works".
pub const WORKS_THRESHOLD: f64 = 0.5;
/// Accuracy at which a run "starts" to work.
pub const STARTS_THRESHOLD: f64 = 0.05;

/// Corpus preparation and scoring settings shared by all harnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub pipeline: PipelineConfig,
    pub vocab_size: usize,
    pub window: usize,
    pub eval_top: usize,
    /// Line shards counted in parallel.
    pub count_shards: usize,
}

impl BenchConfig {
    pub fn new(pipeline: PipelineConfig) -> Self {
        BenchConfig {
            pipeline,
            vocab_size: DEFAULT_VOCAB_SIZE,
            window: DEFAULT_WINDOW,
            eval_top: DEFAULT_EVAL_TOP,
            count_shards: 1,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        Ok(Self::new(PipelineConfig::preset(name)?))
    }
}

/// One side of a benchmark: vocabulary and counts.
#[derive(Clone, Debug)]
pub struct Side {
    pub vocab: Vocabulary,
    pub counts: CoocMatrix,
    pub bytes: u64,
}

impl Side {
    pub fn from_lines(lines: &[Vec<String>], bytes: u64, cfg: &BenchConfig) -> Result<Self> {
        let vocab = corpus::build_vocab(corpus::flat_tokens(lines), cfg.vocab_size)?;
        let encoded = corpus::encode(lines, &vocab);
        let counts = cooc::count_cooc_sharded(&encoded, cfg.window, cfg.count_shards)?;
        Ok(Side { vocab, counts, bytes })
    }

    /// The first `budget` bytes of `path`, cut at a line boundary.
    pub fn from_corpus(path: &Path, budget: u64, cfg: &BenchConfig) -> Result<Self> {
        let text = corpus::take_head_bytes(path, budget)?;
        let lines = corpus::tokenize(&text)?;
        Side::from_lines(&lines, text.len() as u64, cfg)
    }
}

fn line_bytes(lines: &[&str]) -> u64 {
    lines.iter().map(|l| l.len() as u64 + 1).sum()
}

/// Splits lines into two halves by alternating blocks of `block` lines.
pub fn split_alternating<T: Clone>(lines: &[T], block: usize) -> (Vec<T>, Vec<T>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (k, chunk) in lines.chunks(block.max(1)).enumerate() {
        if k % 2 == 0 { &mut a } else { &mut b }.extend_from_slice(chunk);
    }
    (a, b)
}

/// Both halves of the corpus head, ready for a run.
#[derive(Clone, Debug)]
pub struct SplitData {
    pub a: Side,
    pub b: Side,
    pub budget: u64,
}

impl SplitData {
    pub fn from_text(text: &str, budget: u64, cfg: &BenchConfig) -> Result<Self> {
        let raw: Vec<&str> = text.lines().collect();
        let (ra, rb) = split_alternating(&raw, SPLIT_BLOCK_LINES);
        let tok = |ls: &[&str]| corpus::tokenize_str(&ls.join("\n"));
        Ok(SplitData {
            a: Side::from_lines(&tok(&ra), line_bytes(&ra), cfg)?,
            b: Side::from_lines(&tok(&rb), line_bytes(&rb), cfg)?,
            budget,
        })
    }

    pub fn from_corpus(path: &Path, budget: u64, cfg: &BenchConfig) -> Result<Self> {
        let bytes = corpus::take_head_bytes(path, budget)?;
        let text = std::str::from_utf8(&bytes).map_err(|e| Error::Utf8 {
            offset: e.valid_up_to(),
        })?;
        SplitData::from_text(text, budget, cfg)
    }
}

/// Serializable record of one run. `seconds` is the only field that varies
/// between identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: String,
    pub config: BenchConfig,
    pub budget_bytes: u64,
    pub bytes_used: [u64; 2],
    pub vocab_sizes: [usize; 2],
    pub token_counts: [u64; 2],
    pub rng_seed: Option<u64>,
    pub stages: Vec<StageTrace>,
    pub accuracy: f64,
    pub evaluated: usize,
    pub correct: usize,
    pub no_overlap: bool,
    pub works: bool,
    pub starts: bool,
    pub seconds: f64,
}

impl RunReport {
    /// The report with its volatile field zeroed.
    pub fn deterministic(&self) -> RunReport {
        RunReport {
            seconds: 0.0,
            ..self.clone()
        }
    }

    pub fn score(&self) -> Score {
        Score {
            accuracy: self.accuracy,
            evaluated: self.evaluated,
            correct: self.correct,
            no_overlap: self.no_overlap,
        }
    }
}

/// A finished run with everything needed to re-score it.
#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub report: RunReport,
    pub predictions: Predictions,
    /// Ground truth as a dictionary over the two vocabularies.
    pub dictionary: Dictionary,
    pub source_vocab: Vocabulary,
    pub target_vocab: Vocabulary,
}

struct RunParts<'a> {
    mode: &'a str,
    cfg: &'a BenchConfig,
    budget: u64,
    a: &'a Side,
    b: &'a Side,
    rng_seed: Option<u64>,
}

fn run_scored(parts: RunParts<'_>, truth: &[(usize, usize)], started: Instant) -> Result<BenchOutcome> {
    let RunParts { mode, cfg, budget, a, b, rng_seed } = parts;
    let seed = if cfg.pipeline.method.needs_seed() {
        let (s, t): (Vec<usize>, Vec<usize>) = truth.iter().copied().unzip();
        Some(MatchState::new(s, t)?)
    } else {
        None
    };
    let outcome = run_pipeline(
        &cfg.pipeline,
        PipelineInputs {
            c1: Some(&a.counts),
            c2: Some(&b.counts),
            vectors: None,
            seed: seed.as_ref(),
        },
    )?;
    let score = eval::score_indices(&outcome.targets, truth);
    let report = RunReport {
        mode: mode.to_owned(),
        config: cfg.clone(),
        budget_bytes: budget,
        bytes_used: [a.bytes, b.bytes],
        vocab_sizes: [a.vocab.size(), b.vocab.size()],
        token_counts: [a.counts.token_count, b.counts.token_count],
        rng_seed,
        stages: outcome.stages,
        accuracy: score.accuracy,
        evaluated: score.evaluated,
        correct: score.correct,
        no_overlap: score.no_overlap,
        works: score.accuracy >= WORKS_THRESHOLD,
        starts: score.accuracy >= STARTS_THRESHOLD,
        seconds: started.elapsed().as_secs_f64(),
    };
    Ok(BenchOutcome {
        report,
        predictions: Predictions::from_indices(&outcome.targets, &a.vocab, &b.vocab),
        dictionary: eval::truth_dictionary(truth, &a.vocab, &b.vocab),
        source_vocab: a.vocab.clone(),
        target_vocab: b.vocab.clone(),
    })
}

/// Identity benchmark on prepared halves: every shared token should map to
/// itself.
pub fn identity_run(data: &SplitData, cfg: &BenchConfig) -> Result<BenchOutcome> {
    let started = Instant::now();
    let truth = eval::identity_truth(&data.a.vocab, &data.b.vocab, cfg.eval_top);
    run_scored(
        RunParts { mode: "identity", cfg, budget: data.budget, a: &data.a, b: &data.b, rng_seed: None },
        &truth,
        started,
    )
}

/// Splits the head of `path` and runs the identity benchmark.
pub fn split_identity_bench(path: &Path, budget: u64, cfg: &BenchConfig) -> Result<BenchOutcome> {
    identity_run(&SplitData::from_corpus(path, budget, cfg)?, cfg)
}

/// Uniform random permutation of `0..n` from a seeded generator.
pub fn seeded_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    pi
}

/// Cipher relabeling of a vocabulary of size `n`: the reserved [`UNK`] id
/// stays at 0 and every word id is shuffled.
///
/// [`UNK`]: corpus::UNK
pub fn cipher_permutation(n: usize, seed: u64) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    std::iter::once(0)
        .chain(seeded_permutation(n - 1, seed).into_iter().map(|p| p + 1))
        .collect()
}

/// Relabels a side: old id `i` becomes id `pi[i]`, in the counts and in
/// the vocabulary.
pub fn permute_side(side: &Side, pi: &[usize]) -> Result<Side> {
    if pi.first().is_some_and(|&p| p != 0) {
        return Err(Error::validation("a cipher permutation must keep [UNK] at id 0"));
    }
    let counts = cooc::permute_cooc(&side.counts, pi)?;
    let mut tokens = vec![String::new(); pi.len()];
    for (i, &p) in pi.iter().enumerate() {
        tokens[p] = side.vocab.token(i as u32).to_owned();
    }
    Ok(Side {
        vocab: Vocabulary::from_tokens(tokens)?,
        counts,
        bytes: side.bytes,
    })
}

/// Cipher benchmark on prepared halves: the target side is relabeled by a
/// seeded permutation and recovery is scored against it.
pub fn cipher_run(data: &SplitData, seed: u64, cfg: &BenchConfig) -> Result<BenchOutcome> {
    let started = Instant::now();
    let pi = cipher_permutation(data.b.vocab.size(), seed);
    let b = permute_side(&data.b, &pi)?;
    let truth: Vec<(usize, usize)> = eval::identity_truth(&data.a.vocab, &data.b.vocab, cfg.eval_top)
        .into_iter()
        .map(|(i, j)| (i, pi[j]))
        .collect();
    run_scored(
        RunParts { mode: "cipher", cfg, budget: data.budget, a: &data.a, b: &b, rng_seed: Some(seed) },
        &truth,
        started,
    )
}

pub fn cipher_bench(path: &Path, budget: u64, seed: u64, cfg: &BenchConfig) -> Result<BenchOutcome> {
    cipher_run(&SplitData::from_corpus(path, budget, cfg)?, seed, cfg)
}

/// Two corpora scored against a bilingual dictionary.
pub fn pair_run(a: &Side, b: &Side, budget: u64, dict: &Dictionary, cfg: &BenchConfig) -> Result<BenchOutcome> {
    let started = Instant::now();
    let truth = dict.seed_pairs(&a.vocab, &b.vocab);
    let mut out = run_scored(
        RunParts { mode: "pair", cfg, budget, a, b, rng_seed: None },
        &truth,
        started,
    )?;
    let score = eval::precision_at_1(&out.predictions, dict, &a.vocab, &b.vocab);
    let r = &mut out.report;
    r.accuracy = score.accuracy;
    r.evaluated = score.evaluated;
    r.correct = score.correct;
    r.no_overlap = score.no_overlap;
    r.works = score.accuracy >= WORKS_THRESHOLD;
    r.starts = score.accuracy >= STARTS_THRESHOLD;
    out.dictionary = dict.clone();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Identity,
    Cipher,
    Pair,
}

fn one() -> usize {
    1
}

fn default_vocab() -> usize {
    DEFAULT_VOCAB_SIZE
}

fn default_window() -> usize {
    DEFAULT_WINDOW
}

fn default_eval_top() -> usize {
    DEFAULT_EVAL_TOP
}

/// JSON sweep description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub mode: SweepMode,
    /// Single corpus for identity and cipher modes.
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    /// Source and target corpora for pair mode.
    #[serde(default)]
    pub source: Option<PathBuf>,
    #[serde(default)]
    pub target: Option<PathBuf>,
    /// Evaluation dictionary for pair mode; also seeds dict-init.
    #[serde(default)]
    pub dictionary: Option<PathBuf>,
    pub budgets: Vec<u64>,
    pub presets: Vec<String>,
    #[serde(default)]
    pub dimensions: Vec<usize>,
    #[serde(default = "one")]
    pub repetitions: usize,
    /// Base seed for cipher permutations; repetition `r` uses `seed + r`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_vocab")]
    pub vocab_size: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_eval_top")]
    pub eval_top: usize,
    /// Directory for one JSON report per run.
    #[serde(default)]
    pub report_dir: Option<PathBuf>,
}

impl SweepSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: SweepSpec = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: e.line(),
            msg: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budgets.is_empty() || self.budgets.contains(&0) || !self.budgets.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::validation("budgets must be positive and strictly ascending"));
        }
        if self.presets.is_empty() || self.repetitions == 0 {
            return Err(Error::validation("a sweep needs at least one preset and one repetition"));
        }
        for p in &self.presets {
            let cfg = PipelineConfig::preset(p)?;
            if cfg.method.needs_vectors() {
                return Err(Error::validation(format!("preset {p:?} needs vector files and cannot be swept")));
            }
        }
        if self.dimensions.contains(&0) {
            return Err(Error::validation("dimensions must be positive"));
        }
        match self.mode {
            SweepMode::Identity | SweepMode::Cipher if self.corpus.is_none() => {
                Err(Error::validation("identity and cipher sweeps need \"corpus\""))
            }
            SweepMode::Pair if self.source.is_none() || self.target.is_none() || self.dictionary.is_none() => {
                Err(Error::validation("pair sweeps need \"source\", \"target\" and \"dictionary\""))
            }
            _ => Ok(()),
        }
    }

    /// Every `(budget, preset, dimension, repetition)` in output order.
    pub fn points(&self) -> Vec<SweepPoint> {
        let dims: Vec<Option<usize>> = if self.dimensions.is_empty() {
            vec![None]
        } else {
            self.dimensions.iter().copied().map(Some).collect()
        };
        let mut out = Vec::new();
        for &budget in &self.budgets {
            for preset in &self.presets {
                for &dimension in &dims {
                    for repetition in 0..self.repetitions {
                        out.push(SweepPoint {
                            budget,
                            preset: preset.clone(),
                            dimension,
                            repetition,
                        });
                    }
                }
            }
        }
        out
    }

    fn bench_config(&self, point: &SweepPoint) -> Result<BenchConfig> {
        let mut pipeline = PipelineConfig::preset(&point.preset)?;
        if point.dimension.is_some() {
            pipeline.dim = point.dimension;
        }
        Ok(BenchConfig {
            pipeline,
            vocab_size: self.vocab_size,
            window: self.window,
            eval_top: self.eval_top,
            count_shards: 1,
        })
    }

    fn run_point(&self, point: &SweepPoint, dict: Option<&Dictionary>) -> Result<RunReport> {
        let cfg = self.bench_config(point)?;
        let outcome = match self.mode {
            SweepMode::Identity => split_identity_bench(self.corpus.as_deref().unwrap(), point.budget, &cfg)?,
            SweepMode::Cipher => cipher_bench(
                self.corpus.as_deref().unwrap(),
                point.budget,
                self.seed + point.repetition as u64,
                &cfg,
            )?,
            SweepMode::Pair => {
                let a = Side::from_corpus(self.source.as_deref().unwrap(), point.budget, &cfg)?;
                let b = Side::from_corpus(self.target.as_deref().unwrap(), point.budget, &cfg)?;
                pair_run(&a, &b, point.budget, dict.expect("validated"), &cfg)?
            }
        };
        Ok(outcome.report)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub budget: u64,
    pub preset: String,
    pub dimension: Option<usize>,
    pub repetition: usize,
}

/// One sweep result; failed points carry the error text.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub result: std::result::Result<RunReport, String>,
}

pub const SWEEP_CSV_HEADER: &str = "budget_bytes,preset,dimension,accuracy,evaluated,seconds,error";

/// Runs every point with up to `workers` in parallel; rows keep spec order.
/// Each point runs its dense kernels sequentially, so results do not depend
/// on `workers`.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let dict = match (&spec.mode, &spec.dictionary) {
        (SweepMode::Pair, Some(p)) => Some(eval::load_dictionary(p)?),
        _ => None,
    };
    if let Some(dir) = &spec.report_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::validation(format!("cannot start workers: {e}")))?;
    let points = spec.points();
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .into_par_iter()
            .enumerate()
            .map(|(n, point)| {
                let result = kernels::sequential(|| spec.run_point(&point, dict.as_ref())).map_err(|e| e.to_string());
                if let (Some(dir), Ok(report)) = (&spec.report_dir, &result) {
                    let path = dir.join(format!("run-{n:04}.json"));
                    let json = serde_json::to_vec_pretty(report).expect("reports serialize");
                    if let Err(e) = std::fs::write(&path, json) {
                        return SweepRow {
                            point,
                            result: Err(Error::io(&path, e).to_string()),
                        };
                    }
                }
                SweepRow { point, result }
            })
            .collect()
    });
    Ok(rows)
}

/// Writes the sweep table. Error rows leave the numeric columns empty.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Error::Format(format!("writing sweep table: {e}"));
    w.write_record(SWEEP_CSV_HEADER.split(',')).map_err(fail)?;
    for row in rows {
        let p = &row.point;
        let dim = p.dimension.map(|d| d.to_string()).unwrap_or_default();
        let record = match &row.result {
            Ok(r) => [
                p.budget.to_string(),
                p.preset.clone(),
                dim,
                format!("{:.6}", r.accuracy),
                r.evaluated.to_string(),
                format!("{:.3}", r.seconds),
                String::new(),
            ],
            Err(e) => [p.budget.to_string(), p.preset.clone(), dim, String::new(), String::new(), String::new(), e.clone()],
        };
        w.write_record(&record).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// Smallest budget whose accuracy reaches `threshold`, over rows of one
/// preset in ascending budget order.
pub fn first_budget_reaching(rows: &[(u64, f64)], threshold: f64) -> Option<u64> {
    rows.iter().find(|(_, acc)| *acc >= threshold).map(|(b, _)| *b)
}

/// Settings for [`synthetic_corpus`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub words: usize,
    pub lines: usize,
    pub line_len: usize,
    /// Successors each word prefers.
    pub fanout: usize,
    /// Probability of following a preferred successor rather than a
    /// frequency-weighted random word.
    pub coherence: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            words: 300,
            lines: 20000,
            line_len: 12,
            fanout: 4,
            coherence: 0.7,
            seed: 7,
        }
    }
}

/// Text from a random first-order chain over `w0 … wN` with Zipf-like
/// word frequencies. Every word has a few preferred successors, which
/// gives each word a distinctive co-occurrence profile.
pub fn synthetic_corpus(cfg: &SyntheticConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.words.max(2);
    let weights: Vec<f64> = (0..n).map(|i| 1.0 / (i as f64 + 2.0)).collect();
    let total: f64 = weights.iter().sum();
    let cdf: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w / total;
            Some(*acc)
        })
        .collect();
    let draw = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.random();
        cdf.partition_point(|&c| c < u).min(n - 1)
    };
    let successors: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..cfg.fanout.max(1)).map(|_| draw(&mut rng)).collect())
        .collect();
    let mut text = String::new();
    for _ in 0..cfg.lines {
        let mut w = draw(&mut rng);
        for k in 0..cfg.line_len.max(1) {
            if k > 0 {
                text.push(' ');
                w = if rng.random::<f64>() < cfg.coherence {
                    successors[w][rng.random_range(0..successors[w].len())]
                } else {
                    draw(&mut rng)
                };
            }
            text.push('w');
            text.push_str(&w.to_string());
        }
        text.push('\n');
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_split() {
        let lines: Vec<usize> = (0..7).collect();
        let (a, b) = split_alternating(&lines, 2);
        assert_eq!(a, vec![0, 1, 4, 5]);
        assert_eq!(b, vec![2, 3, 6]);
    }

    #[test]
    fn permutation_is_seeded() {
        let p = seeded_permutation(50, 3);
        assert_eq!(p, seeded_permutation(50, 3));
        assert_ne!(p, seeded_permutation(50, 4));
        let mut sorted = p.clone();
        sorted.sort();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        let c = cipher_permutation(50, 3);
        assert_eq!(c[0], 0);
        assert_ne!(c, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn sweep_points_are_the_product() {
        let spec: SweepSpec = serde_json::from_str(
            r#"{"mode":"identity","corpus":"x","budgets":[1000000,2000000],"presets":["coocmap","ppmi"]}"#,
        )
        .unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.points().len(), 4);
        let bad: SweepSpec = serde_json::from_str(
            r#"{"mode":"identity","corpus":"x","budgets":[2,1],"presets":["coocmap"]}"#,
        )
        .unwrap();
        assert!(bad.validate().is_err());
        assert!(serde_json::from_str::<SweepSpec>(r#"{"mode":"identity","budgets":[1],"presets":[],"nope":1}"#).is_err());
    }

    #[test]
    fn synthetic_corpus_is_deterministic() {
        let cfg = SyntheticConfig { lines: 20, ..Default::default() };
        let a = synthetic_corpus(&cfg);
        assert_eq!(a, synthetic_corpus(&cfg));
        assert_eq!(a.lines().count(), 20);
        assert!(a.lines().all(|l| l.split(' ').count() == cfg.line_len));
    }

    #[test]
    fn first_budget() {
        let rows = [(1, 0.0), (2, 0.3), (5, 0.6), (10, 0.4)];
        assert_eq!(first_budget_reaching(&rows, 0.5), Some(5));
        assert_eq!(first_budget_reaching(&rows, 0.05), Some(2));
        assert_eq!(first_budget_reaching(&rows, 0.9), None);
    }
}
