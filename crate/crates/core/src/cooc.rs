//! Word–context co-occurrence counts.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{EncodedCorpus, Vocabulary};
use crate::error::{Error, Result};
use crate::kernels::DenseMatrix;

/// Default window: tokens counted on each side.
pub const DEFAULT_WINDOW: usize = 5;

const MAGIC: &[u8; 8] = b"COOCMAT1";

/// Symmetric `V × V` count matrix bound to a vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct CoocMatrix {
    pub counts: DenseMatrix,
    pub window: usize,
    pub vocab_digest: String,
    pub token_count: u64,
}

#[derive(Serialize, Deserialize)]
struct Header {
    #[serde(rename = "V")]
    v: usize,
    m: usize,
    token_count: u64,
    vocab_digest: String,
}

impl CoocMatrix {
    pub fn size(&self) -> usize {
        self.counts.rows()
    }

    pub fn total(&self) -> f64 {
        self.counts.data().iter().sum()
    }
}

fn count_lines<'a>(lines: impl Iterator<Item = &'a [u32]>, v: usize, m: usize) -> Vec<f64> {
    let mut counts = vec![0.0; v * v];
    for line in lines {
        let n = line.len();
        for (i, &w) in line.iter().enumerate() {
            let row = w as usize * v;
            let lo = i.saturating_sub(m);
            let hi = (i + m + 1).min(n);
            for (j, &c) in line[lo..hi].iter().enumerate() {
                if lo + j != i {
                    counts[row + c as usize] += 1.0;
                }
            }
        }
    }
    counts
}

/// Counts pairs within `m` tokens of each other inside the same line.
pub fn count_cooc(corpus: &EncodedCorpus<'_>, m: usize) -> Result<CoocMatrix> {
    count_cooc_sharded(corpus, m, 1)
}

/// Same as [`count_cooc`], counting line shards in parallel and summing.
pub fn count_cooc_sharded(corpus: &EncodedCorpus<'_>, m: usize, shards: usize) -> Result<CoocMatrix> {
    if m == 0 {
        return Err(Error::validation("window size must be at least 1"));
    }
    let v = corpus.vocab.size();
    let lines: Vec<&[u32]> = corpus.lines().collect();
    let shards = shards.clamp(1, lines.len().max(1));
    let data = if shards == 1 {
        count_lines(lines.iter().copied(), v, m)
    } else {
        let chunk = lines.len().div_ceil(shards);
        lines
            .par_chunks(chunk)
            .map(|part| count_lines(part.iter().copied(), v, m))
            .reduce_with(|mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            })
            .unwrap_or_else(|| vec![0.0; v * v])
    };
    Ok(CoocMatrix {
        counts: DenseMatrix::from_raw(v, v, data),
        window: m,
        vocab_digest: corpus.vocab.digest(),
        token_count: corpus.ids.len() as u64,
    })
}

fn check_permutation(pi: &[usize], n: usize) -> Result<()> {
    if pi.len() != n {
        return Err(Error::validation(format!(
            "permutation has length {}, matrix has size {n}",
            pi.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in pi {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::validation(format!("not a permutation: entry {p}")));
        }
    }
    Ok(())
}

/// Relabels rows and columns: `out[pi[i], pi[j]] = c[i, j]`.
///
/// The result is bound to the permuted labeling, so its digest changes
/// unless `pi` is the identity.
pub fn permute_cooc(c: &CoocMatrix, pi: &[usize]) -> Result<CoocMatrix> {
    let v = c.size();
    check_permutation(pi, v)?;
    let mut out = DenseMatrix::zeros(v, v);
    for i in 0..v {
        let src = c.counts.row(i);
        let dst = out.row_mut(pi[i]);
        for (j, &x) in src.iter().enumerate() {
            dst[pi[j]] = x;
        }
    }
    let identity = pi.iter().enumerate().all(|(i, &p)| i == p);
    let vocab_digest = if identity {
        c.vocab_digest.clone()
    } else {
        let mut h = Sha256::new();
        h.update(c.vocab_digest.as_bytes());
        for &p in pi {
            h.update((p as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    };
    Ok(CoocMatrix {
        counts: out,
        window: c.window,
        vocab_digest,
        token_count: c.token_count,
    })
}

/// Inverse of a permutation given as `i -> pi[i]`.
pub fn invert_permutation(pi: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; pi.len()];
    for (i, &p) in pi.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Writes the `COOCMAT1` binary format.
pub fn save_cooc(c: &CoocMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let header = serde_json::to_vec(&Header {
        v: c.size(),
        m: c.window,
        token_count: c.token_count,
        vocab_digest: c.vocab_digest.clone(),
    })
    .map_err(|e| Error::Format(e.to_string()))?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&(header.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&header).map_err(io)?;
    for v in c.counts.data() {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads a `COOCMAT1` file, checking its digest against `vocab` when given.
pub fn load_cooc(path: impl AsRef<Path>, vocab: Option<&Vocabulary>) -> Result<CoocMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let io = |e| Error::io(path, e);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("{}: not a COOCMAT1 file", path.display())));
    }
    let mut len = [0u8; 8];
    r.read_exact(&mut len).map_err(io)?;
    let mut header = vec![0u8; u64::from_le_bytes(len) as usize];
    r.read_exact(&mut header).map_err(io)?;
    let header: Header = serde_json::from_slice(&header)
        .map_err(|e| Error::Format(format!("{}: bad header: {e}", path.display())))?;
    if let Some(vocab) = vocab {
        if vocab.size() != header.v || vocab.digest() != header.vocab_digest {
            return Err(Error::Integrity(format!(
                "{} was counted with a different vocabulary",
                path.display()
            )));
        }
    }
    let mut bytes = vec![0u8; header.v * header.v * 8];
    r.read_exact(&mut bytes).map_err(io)?;
    let data = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Ok(CoocMatrix {
        counts: DenseMatrix::from_vec(header.v, header.v, data)?,
        window: header.m,
        vocab_digest: header.vocab_digest,
        token_count: header.token_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{encode, UNK};

    fn vocab_ab() -> Vocabulary {
        Vocabulary::from_tokens(vec![UNK.into(), "a".into(), "b".into()]).unwrap()
    }

    fn line(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn from_rows(rows: &[&[f64]]) -> CoocMatrix {
        CoocMatrix {
            counts: DenseMatrix::from_rows(rows).unwrap(),
            window: 1,
            vocab_digest: "d".into(),
            token_count: 0,
        }
    }

    #[test]
    fn aba_window_one() {
        let v = vocab_ab();
        let c = count_cooc(&encode(&[line(&["a", "b", "a"])], &v), 1).unwrap();
        assert_eq!(c.counts.get(1, 2), 2.0);
        assert_eq!(c.counts.get(2, 1), 2.0);
        assert_eq!(c.counts.get(1, 1), 0.0);
        assert_eq!(c.total(), 4.0);
        assert_eq!(c.token_count, 3);
    }

    #[test]
    fn aba_window_two() {
        let v = vocab_ab();
        let c = count_cooc(&encode(&[line(&["a", "b", "a"])], &v), 2).unwrap();
        assert_eq!(c.counts.get(1, 1), 2.0);
        assert_eq!(c.counts.get(1, 2), 2.0);
        assert_eq!(c.counts.get(2, 1), 2.0);
        assert_eq!(c.counts.get(2, 2), 0.0);
    }

    #[test]
    fn single_token_and_line_boundaries() {
        let v = vocab_ab();
        let c = count_cooc(&encode(&[line(&["a"])], &v), 3).unwrap();
        assert_eq!(c.total(), 0.0);
        let c = count_cooc(&encode(&[line(&["a"]), line(&["b"])], &v), 3).unwrap();
        assert_eq!(c.total(), 0.0);
        assert!(count_cooc(&encode(&[line(&["a"])], &v), 0).is_err());
    }

    #[test]
    fn permute_examples() {
        let c = from_rows(&[&[0.0, 2.0], &[2.0, 0.0]]);
        assert_eq!(permute_cooc(&c, &[0, 1]).unwrap(), c);
        assert_eq!(permute_cooc(&c, &[1, 0]).unwrap().counts, c.counts);
        let c = from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let p = permute_cooc(&c, &[1, 0]).unwrap();
        assert_eq!(p.counts, DenseMatrix::from_rows(&[[4.0, 2.0], [2.0, 1.0]]).unwrap());
        assert_ne!(p.vocab_digest, c.vocab_digest);
        assert!(permute_cooc(&c, &[0, 0]).is_err());
        assert!(permute_cooc(&c, &[0]).is_err());
        assert!(permute_cooc(&c, &[0, 2]).is_err());
    }

    #[test]
    fn file_roundtrip_and_integrity() {
        let v = vocab_ab();
        let c = count_cooc(&encode(&[line(&["a", "b", "a", "b"])], &v), 2).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_cooc(&c, f.path()).unwrap();
        assert_eq!(load_cooc(f.path(), Some(&v)).unwrap(), c);

        let bytes = std::fs::read(f.path()).unwrap();
        assert_eq!(&bytes[..8], b"COOCMAT1");
        assert_eq!(bytes.len(), 16 + u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize + 9 * 8);

        let other = Vocabulary::from_tokens(vec![UNK.into(), "b".into(), "a".into()]).unwrap();
        assert!(matches!(load_cooc(f.path(), Some(&other)), Err(Error::Integrity(_))));

        let bad = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(bad.path(), b"NOTCOOC!").unwrap();
        assert!(matches!(load_cooc(bad.path(), None), Err(Error::Format(_))));
    }
}
