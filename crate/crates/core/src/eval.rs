//! Dictionaries, translations, precision@1 and prediction dumps.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::align::{self, AlignConfig, MatchState};
use crate::assoc::AssocMatrix;
use crate::corpus::{Vocabulary, UNK};
use crate::error::{Error, Result};
use crate::kernels::{ClipThresholds, DenseMatrix};

/// Source token to the set of acceptable target tokens.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dictionary {
    pub entries: BTreeMap<String, BTreeSet<String>>,
}

impl Dictionary {
    pub fn insert(&mut self, source: &str, target: &str) {
        self.entries
            .entry(source.to_lowercase())
            .or_default()
            .insert(target.to_lowercase());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All `(source id, target id)` pairs with both sides in vocabulary,
    /// in dictionary order.
    pub fn seed_pairs(&self, v1: &Vocabulary, v2: &Vocabulary) -> Vec<(usize, usize)> {
        self.entries
            .iter()
            .filter_map(|(s, ts)| v1.id(s).map(|i| (i, ts)))
            .flat_map(|(i, ts)| ts.iter().filter_map(move |t| v2.id(t).map(|j| (i as usize, j as usize))))
            .collect()
    }

    /// Seed matching for dict-init runs.
    pub fn seed_state(&self, v1: &Vocabulary, v2: &Vocabulary) -> Result<MatchState> {
        let (s, t) = self.seed_pairs(v1, v2).into_iter().unzip();
        MatchState::new(s, t)
            .map_err(|_| Error::validation("no dictionary pair has both sides in vocabulary"))
    }
}

/// Reads one `source target` pair per nonempty line, lowercased.
pub fn load_dictionary(path: impl AsRef<Path>) -> Result<Dictionary> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut dict = Dictionary::default();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            [s, t] => dict.insert(s, t),
            _ => {
                return Err(Error::Parse {
                    path: path.to_owned(),
                    line: n + 1,
                    msg: format!("expected 2 fields, found {}", fields.len()),
                })
            }
        }
    }
    if dict.is_empty() {
        return Err(Error::Parse {
            path: path.to_owned(),
            line: 0,
            msg: "dictionary has no entries".into(),
        });
    }
    Ok(dict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    /// Frequency rank of the source word (its vocabulary id).
    pub rank: usize,
    pub source: String,
    pub predicted: String,
}

/// One prediction per source word, in source rank order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Predictions {
    pub items: Vec<Prediction>,
}

impl Predictions {
    pub fn from_indices(targets: &[usize], v1: &Vocabulary, v2: &Vocabulary) -> Self {
        Predictions {
            items: targets
                .iter()
                .enumerate()
                .map(|(i, &j)| Prediction {
                    rank: i,
                    source: v1.token(i as u32).to_owned(),
                    predicted: v2.token(j as u32).to_owned(),
                })
                .collect(),
        }
    }

    fn lookup(&self) -> HashMap<&str, &str> {
        self.items
            .iter()
            .map(|p| (p.source.as_str(), p.predicted.as_str()))
            .collect()
    }
}

/// Final forward translation of every source word.
pub fn translate(
    x: &AssocMatrix,
    z: &AssocMatrix,
    state: &MatchState,
    cfg: &AlignConfig,
    v1: &Vocabulary,
    v2: &Vocabulary,
) -> Result<Predictions> {
    if x.size() != v1.size() || z.size() != v2.size() {
        return Err(Error::validation("association sizes do not match the vocabularies"));
    }
    let targets = align::translate_indices(x, z, state, cfg)?;
    Ok(Predictions::from_indices(&targets, v1, v2))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub accuracy: f64,
    pub evaluated: usize,
    pub correct: usize,
    /// Set when nothing was evaluable; accuracy is then 0.
    pub no_overlap: bool,
}

impl Score {
    pub fn from_counts(correct: usize, evaluated: usize) -> Self {
        Score {
            accuracy: if evaluated == 0 { 0.0 } else { correct as f64 / evaluated as f64 },
            evaluated,
            correct,
            no_overlap: evaluated == 0,
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "accuracy {:.4} ({}/{})",
            self.accuracy, self.correct, self.evaluated
        )?;
        if self.no_overlap {
            write!(f, " no-overlap")?;
        }
        Ok(())
    }
}

/// Whether a dictionary entry can be scored: its source is in `v1` and at
/// least one target is in `v2`.
fn evaluable(dict: &Dictionary, source: &str, v1: &Vocabulary, v2: &Vocabulary) -> bool {
    v1.id(source).is_some() && dict.entries[source].iter().any(|t| v2.id(t).is_some())
}

/// Precision@1 over the evaluable dictionary entries.
pub fn precision_at_1(preds: &Predictions, dict: &Dictionary, v1: &Vocabulary, v2: &Vocabulary) -> Score {
    let lookup = preds.lookup();
    let mut evaluated = 0;
    let mut correct = 0;
    for (source, targets) in &dict.entries {
        if !evaluable(dict, source, v1, v2) {
            continue;
        }
        evaluated += 1;
        if lookup.get(source.as_str()).is_some_and(|p| targets.contains(*p)) {
            correct += 1;
        }
    }
    Score::from_counts(correct, evaluated)
}

/// Index pairs `(source, expected target)` for the `top` most frequent
/// source tokens that also occur in `v2`, excluding [`UNK`].
pub fn identity_truth(v1: &Vocabulary, v2: &Vocabulary, top: usize) -> Vec<(usize, usize)> {
    v1.tokens()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.as_str() != UNK)
        .filter_map(|(i, t)| v2.id(t).map(|j| (i, j as usize)))
        .take(top)
        .collect()
}

/// Accuracy of `targets[source] == expected` over a list of truth pairs.
pub fn score_indices(targets: &[usize], truth: &[(usize, usize)]) -> Score {
    let correct = truth.iter().filter(|&&(i, j)| targets.get(i) == Some(&j)).count();
    Score::from_counts(correct, truth.len())
}

/// The dictionary equivalent of a list of truth pairs, for scoring dumps.
pub fn truth_dictionary(truth: &[(usize, usize)], v1: &Vocabulary, v2: &Vocabulary) -> Dictionary {
    let mut dict = Dictionary::default();
    for &(i, j) in truth {
        dict.insert(v1.token(i as u32), v2.token(j as u32));
    }
    dict
}

/// Writes `rank\tsource\tprediction\tcorrect` lines under a header. The
/// last column is `1`/`0`, or `-` when the source is not evaluable.
pub fn write_predictions(
    path: impl AsRef<Path>,
    preds: &Predictions,
    dict: Option<&Dictionary>,
    v1: &Vocabulary,
    v2: &Vocabulary,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "rank\tsource\tprediction\tcorrect").map_err(io)?;
    for p in &preds.items {
        let mark = match dict {
            Some(d) if d.entries.contains_key(&p.source) && evaluable(d, &p.source, v1, v2) => {
                if d.entries[&p.source].contains(&p.predicted) {
                    "1"
                } else {
                    "0"
                }
            }
            _ => "-",
        };
        writeln!(w, "{}\t{}\t{}\t{}", p.rank, p.source, p.predicted, mark).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a predictions dump. The header line and the `correct` column are
/// optional.
pub fn read_predictions(path: impl AsRef<Path>) -> Result<Predictions> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut items = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let err = |msg: String| Error::Parse {
            path: path.to_owned(),
            line: n + 1,
            msg,
        };
        if line.trim().is_empty() || (n == 0 && line.starts_with("rank\t")) {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(err(format!("expected 3 or 4 tab-separated fields, found {}", fields.len())));
        }
        let rank = fields[0]
            .parse()
            .map_err(|_| err(format!("bad rank {:?}", fields[0])))?;
        let source = fields[1].to_lowercase();
        if !seen.insert(source.clone()) {
            return Err(err(format!("duplicate source {source:?}")));
        }
        items.push(Prediction {
            rank,
            source,
            predicted: fields[2].to_lowercase(),
        });
    }
    Ok(Predictions { items })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClipSide {
    /// Clipped in the full matrix only.
    #[serde(rename = "full-rank+")]
    FullRank,
    /// Clipped in the reduced matrix only.
    #[serde(rename = "reduced+")]
    Reduced,
}

impl fmt::Display for ClipSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClipSide::FullRank => "full-rank+",
            ClipSide::Reduced => "reduced+",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipDiff {
    pub i: usize,
    pub j: usize,
    pub token_i: String,
    pub token_j: String,
    pub side: ClipSide,
    pub magnitude: f64,
}

/// Entries that one matrix would clip and the other would not, under the
/// same thresholds, largest `|full − reduced|` first.
pub fn clip_diff_report(
    full: &DenseMatrix,
    reduced: &DenseMatrix,
    thresholds: ClipThresholds,
    vocab: &Vocabulary,
) -> Result<Vec<ClipDiff>> {
    if full.shape() != reduced.shape() || full.rows() != vocab.size() {
        return Err(Error::validation("clip diff needs equally shaped matrices over the vocabulary"));
    }
    let mut out = Vec::new();
    for i in 0..full.rows() {
        for (j, (&a, &b)) in full.row(i).iter().zip(reduced.row(i)).enumerate() {
            let side = match (thresholds.clips(a), thresholds.clips(b)) {
                (true, false) => ClipSide::FullRank,
                (false, true) => ClipSide::Reduced,
                _ => continue,
            };
            out.push(ClipDiff {
                i,
                j,
                token_i: vocab.token(i as u32).to_owned(),
                token_j: vocab.token(j as u32).to_owned(),
                side,
                magnitude: (a - b).abs(),
            });
        }
    }
    out.sort_by(|x, y| y.magnitude.total_cmp(&x.magnitude).then((x.i, x.j).cmp(&(y.i, y.j))));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(tokens: &[&str]) -> Vocabulary {
        Vocabulary::from_tokens(
            std::iter::once(UNK)
                .chain(tokens.iter().copied())
                .map(String::from)
                .collect(),
        )
        .unwrap()
    }

    fn dict_file(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn dictionary_examples() {
        let d = load_dictionary(dict_file("dog chien\ndog toutou\n").path()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.entries["dog"].len(), 2);
        let d = load_dictionary(dict_file("Dog Chien").path()).unwrap();
        assert!(d.entries["dog"].contains("chien"));
        assert!(load_dictionary(dict_file("").path()).is_err());
        let err = load_dictionary(dict_file("a b\nc\n").path()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn precision_examples() {
        let v1 = vocab(&["dog", "cat"]);
        let v2 = vocab(&["chien", "chat"]);
        let preds = Predictions::from_indices(&[0, 1, 2], &v1, &v2);
        let mut d = Dictionary::default();
        d.insert("dog", "chien");
        d.insert("cat", "chat");
        assert_eq!(precision_at_1(&preds, &d, &v1, &v2).accuracy, 1.0);

        let preds = Predictions::from_indices(&[0, 1, 1], &v1, &v2);
        let s = precision_at_1(&preds, &d, &v1, &v2);
        assert_eq!((s.accuracy, s.correct, s.evaluated), (0.5, 1, 2));

        let mut far = Dictionary::default();
        far.insert("bird", "oiseau");
        far.insert("dog", "loup");
        let s = precision_at_1(&preds, &far, &v1, &v2);
        assert_eq!(s.evaluated, 0);
        assert_eq!(s.accuracy, 0.0);
        assert!(s.no_overlap);
    }

    #[test]
    fn identity_truth_skips_unk_and_missing() {
        let v1 = vocab(&["a", "b", "c", "d"]);
        let v2 = vocab(&["c", "a", "x"]);
        assert_eq!(identity_truth(&v1, &v2, 10), vec![(1, 2), (3, 1)]);
        assert_eq!(identity_truth(&v1, &v2, 1), vec![(1, 2)]);
        let s = score_indices(&[0, 2, 0, 0, 0], &identity_truth(&v1, &v2, 10));
        assert_eq!((s.correct, s.evaluated), (1, 2));
    }

    #[test]
    fn dump_roundtrip_rescoring() {
        let v1 = vocab(&["dog", "cat", "cow"]);
        let v2 = vocab(&["chien", "chat", "vache"]);
        let mut d = Dictionary::default();
        d.insert("dog", "chien");
        d.insert("cat", "chien");
        d.insert("cow", "vache");
        let preds = Predictions::from_indices(&[0, 1, 1, 3], &v1, &v2);
        let f = tempfile::NamedTempFile::new().unwrap();
        write_predictions(f.path(), &preds, Some(&d), &v1, &v2).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        assert!(text.starts_with("rank\tsource\tprediction\tcorrect\n0\t[UNK]\t[UNK]\t-\n1\tdog\tchien\t1\n"));
        let back = read_predictions(f.path()).unwrap();
        assert_eq!(back.items.len(), 4);
        assert_eq!(precision_at_1(&back, &d, &v1, &v2), precision_at_1(&preds, &d, &v1, &v2));
    }

    #[test]
    fn clip_diff_examples() {
        let v = vocab(&["a", "b"]);
        let th = ClipThresholds { lower: -1.0, upper: 1.0 };
        let x = DenseMatrix::from_fn(3, 3, |i, j| (i as f64 - j as f64) * 0.1);
        assert!(clip_diff_report(&x, &x, th, &v).unwrap().is_empty());

        let mut full = x.clone();
        full.set(1, 2, 5.0);
        let mut reduced = x.clone();
        reduced.set(2, 0, -3.0);
        let report = clip_diff_report(&full, &reduced, th, &v).unwrap();
        assert_eq!(report.len(), 2);
        assert_eq!((report[0].i, report[0].j, report[0].side), (1, 2, ClipSide::FullRank));
        assert_eq!(report[0].token_j, "b");
        assert_eq!((report[1].i, report[1].j, report[1].side), (2, 0, ClipSide::Reduced));
        assert!(report[0].magnitude >= report[1].magnitude);
    }
}
