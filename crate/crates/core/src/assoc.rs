//! Association matrices built from counts or from imported word vectors.
//!
//! Every constructor is a fold of [`Transform`]s over a source matrix, and
//! the resulting [`AssocMatrix`] keeps that chain so it can be replayed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cooc::CoocMatrix;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::kernels::{self, DenseMatrix};

/// One step of an association chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Transform {
    Epow { alpha: f64 },
    Log1p,
    /// `p(s,i) / (p(s) p(i))`
    Rapp,
    /// `p(s,i) log(p(s,i) / (p(s) p(i)))`
    Fung,
    /// `max(0, log(p(s,i) / (p(s) p(i))) − log k)`
    Ppmi { k: f64 },
    /// Subtract row means, then column means.
    DoubleCenter,
    Normalize,
    UnitL1,
    UnitL2,
    Clip { lo: f64, hi: f64 },
    Drop { r: usize },
    Trunc { r: usize },
    PsdSqrtGram,
}

/// Post-construction step accepted by [`apply_pipeline`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    Clip { lo: f64, hi: f64 },
    Drop { r: usize },
    Trunc { r: usize },
    Normalize,
}

impl From<Step> for Transform {
    fn from(s: Step) -> Self {
        match s {
            Step::Clip { lo, hi } => Transform::Clip { lo, hi },
            Step::Drop { r } => Transform::Drop { r },
            Step::Trunc { r } => Transform::Trunc { r },
            Step::Normalize => Transform::Normalize,
        }
    }
}

/// Joint and marginal probabilities of a count table.
struct Probabilities {
    total: f64,
    rows: Vec<f64>,
    cols: Vec<f64>,
}

impl Probabilities {
    fn of(c: &DenseMatrix) -> Self {
        let total: f64 = c.data().iter().sum();
        let mut rows = vec![0.0; c.rows()];
        let mut cols = vec![0.0; c.cols()];
        for (i, row) in c.row_iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                rows[i] += v;
                cols[j] += v;
            }
        }
        if total > 0.0 {
            rows.iter_mut().chain(cols.iter_mut()).for_each(|v| *v /= total);
        }
        Probabilities { total, rows, cols }
    }

    /// Applies `f(p(s,i), p(s) p(i))` to every positive entry; zero joint or
    /// zero marginals give 0.
    fn map(&self, c: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> DenseMatrix {
        if self.total <= 0.0 {
            return DenseMatrix::zeros(c.rows(), c.cols());
        }
        DenseMatrix::from_fn(c.rows(), c.cols(), |i, j| {
            let p = c.get(i, j) / self.total;
            let indep = self.rows[i] * self.cols[j];
            if p > 0.0 && indep > 0.0 {
                f(p, indep)
            } else {
                0.0
            }
        })
    }
}

fn double_center(x: &DenseMatrix) -> DenseMatrix {
    let mut out = x.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let mean = row.iter().sum::<f64>() / row.len().max(1) as f64;
        row.iter_mut().for_each(|v| *v -= mean);
    }
    kernels::centerc(&out)
}

/// Applies a single transform.
pub fn apply_transform(t: &Transform, x: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(match *t {
        Transform::Epow { alpha } => kernels::epow(x, alpha)?,
        Transform::Log1p => {
            if x.data().iter().any(|&v| v <= -1.0) {
                return Err(Error::validation("log1p needs entries greater than -1"));
            }
            x.map(f64::ln_1p)
        }
        Transform::Rapp => Probabilities::of(x).map(x, |p, q| p / q),
        Transform::Fung => Probabilities::of(x).map(x, |p, q| p * (p / q).ln()),
        Transform::Ppmi { k } => {
            if !(k > 0.0) {
                return Err(Error::validation(format!("ppmi shift must be positive, got {k}")));
            }
            let shift = k.ln();
            Probabilities::of(x).map(x, |p, q| ((p / q).ln() - shift).max(0.0))
        }
        Transform::DoubleCenter => double_center(x),
        Transform::Normalize => kernels::normalize(x),
        Transform::UnitL1 => kernels::unit_l1(x),
        Transform::UnitL2 => kernels::unitr(x),
        Transform::Clip { lo, hi } => kernels::clip(x, lo, hi)?,
        Transform::Drop { r } => kernels::drop_head(x, r)?,
        Transform::Trunc { r } => kernels::trunc(x, r)?,
        Transform::PsdSqrtGram => kernels::psd_sqrt_gram(x)?,
    })
}

/// Association matrix with the chain of transforms that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct AssocMatrix {
    pub data: DenseMatrix,
    pub chain: Vec<Transform>,
    pub vocab_digest: String,
}

impl AssocMatrix {
    fn build(source: &DenseMatrix, chain: Vec<Transform>, vocab_digest: &str) -> Result<Self> {
        let data = replay_chain(&chain, source)?;
        Ok(AssocMatrix {
            data,
            chain,
            vocab_digest: vocab_digest.to_owned(),
        })
    }

    /// Re-runs the recorded chain on its source (counts or vectors).
    pub fn replay(&self, source: &DenseMatrix) -> Result<DenseMatrix> {
        replay_chain(&self.chain, source)
    }

    pub fn size(&self) -> usize {
        self.data.rows()
    }
}

fn replay_chain(chain: &[Transform], source: &DenseMatrix) -> Result<DenseMatrix> {
    let (first, rest) = chain
        .split_first()
        .ok_or_else(|| Error::validation("empty transform chain"))?;
    let mut data = apply_transform(first, source)?;
    for t in rest {
        data = apply_transform(t, &data)?;
    }
    Ok(data)
}

/// `normalize(C^∘½)`
pub fn coocmap_assoc(c: &CoocMatrix) -> Result<AssocMatrix> {
    AssocMatrix::build(
        &c.counts,
        vec![Transform::Epow { alpha: 0.5 }, Transform::Normalize],
        &c.vocab_digest,
    )
}

/// `normalize(log(1 + C))`
pub fn log1p_assoc(c: &CoocMatrix) -> Result<AssocMatrix> {
    AssocMatrix::build(&c.counts, vec![Transform::Log1p, Transform::Normalize], &c.vocab_digest)
}

pub fn rapp_assoc(c: &CoocMatrix) -> Result<AssocMatrix> {
    AssocMatrix::build(&c.counts, vec![Transform::Rapp, Transform::UnitL1], &c.vocab_digest)
}

pub fn fung_assoc(c: &CoocMatrix) -> Result<AssocMatrix> {
    AssocMatrix::build(&c.counts, vec![Transform::Fung, Transform::UnitL1], &c.vocab_digest)
}

/// Shifted positive PMI with ℓ₂ rows.
pub fn ppmi_assoc(c: &CoocMatrix, k: f64) -> Result<AssocMatrix> {
    AssocMatrix::build(&c.counts, vec![Transform::Ppmi { k }, Transform::UnitL2], &c.vocab_digest)
}

/// `log(1 + C)` with row and column mean biases removed, ℓ₂ rows.
pub fn glove_assoc(c: &CoocMatrix) -> Result<AssocMatrix> {
    AssocMatrix::build(
        &c.counts,
        vec![Transform::Log1p, Transform::DoubleCenter, Transform::UnitL2],
        &c.vocab_digest,
    )
}

/// `normalize((Xv Xvᵀ)^½)`
pub fn assoc_from_vectors(xv: &WordVectors) -> Result<AssocMatrix> {
    AssocMatrix::build(&xv.data, vec![Transform::PsdSqrtGram, Transform::Normalize], &xv.vocab_digest)
}

/// Applies `steps` left to right and extends the chain.
pub fn apply_pipeline(a: &AssocMatrix, steps: &[Step]) -> Result<AssocMatrix> {
    let mut out = a.clone();
    for &step in steps {
        let t = Transform::from(step);
        out.data = apply_transform(&t, &out.data)?;
        out.chain.push(t);
    }
    Ok(out)
}

/// Named association constructor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AssocKind {
    Coocmap,
    Log1p,
    Rapp,
    Fung,
    Ppmi { k: f64 },
    Glove,
}

impl AssocKind {
    pub fn build(self, c: &CoocMatrix) -> Result<AssocMatrix> {
        match self {
            AssocKind::Coocmap => coocmap_assoc(c),
            AssocKind::Log1p => log1p_assoc(c),
            AssocKind::Rapp => rapp_assoc(c),
            AssocKind::Fung => fung_assoc(c),
            AssocKind::Ppmi { k } => ppmi_assoc(c, k),
            AssocKind::Glove => glove_assoc(c),
        }
    }

    /// Distance each construction is paired with.
    pub fn default_metric(self) -> kernels::Metric {
        use kernels::Metric;
        match self {
            AssocKind::Coocmap | AssocKind::Log1p => Metric::Cosine,
            AssocKind::Rapp | AssocKind::Fung => Metric::NegL1,
            AssocKind::Ppmi { .. } | AssocKind::Glove => Metric::NegL2,
        }
    }
}

/// Word vectors, row `i` belonging to vocabulary id `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct WordVectors {
    pub data: DenseMatrix,
    pub vocab_digest: String,
}

impl WordVectors {
    pub fn dim(&self) -> usize {
        self.data.cols()
    }
}

/// `U S_r` from the SVD of `C^∘½`.
pub fn svd_vectors(c: &CoocMatrix, r: usize) -> Result<WordVectors> {
    let v = c.size();
    if r == 0 || r > v {
        return Err(Error::validation(format!("vector dimension must be in 1..={v}, got {r}")));
    }
    let f = kernels::svd(&kernels::epow(&c.counts, 0.5)?)?;
    let data = DenseMatrix::from_fn(v, r, |i, j| f.u.get(i, j) * f.s[j]);
    Ok(WordVectors {
        data,
        vocab_digest: c.vocab_digest.clone(),
    })
}

/// Vectors read from a text file, aligned to a vocabulary.
#[derive(Clone, Debug)]
pub struct LoadedVectors {
    pub vectors: WordVectors,
    /// Vocabulary tokens absent from the file; their rows are zero.
    pub missing: Vec<String>,
}

/// Reads the `"V d"` + `"token v₁ … v_d"` text format.
pub fn load_vectors(path: impl AsRef<Path>, vocab: &Vocabulary) -> Result<LoadedVectors> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_owned(),
        line,
        msg,
    };
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty vector file".into()))?
        .map_err(|e| Error::io(path, e))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|f| f.parse().map_err(|_| parse_err(1, format!("bad header {header:?}"))))
        .collect::<Result<_>>()?;
    let &[_, d] = dims.as_slice() else {
        return Err(parse_err(1, format!("header must be \"V d\", got {header:?}")));
    };
    if d == 0 {
        return Err(parse_err(1, "vector dimension must be at least 1".into()));
    }
    let mut data = DenseMatrix::zeros(vocab.size(), d);
    let mut found = vec![false; vocab.size()];
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = n + 2;
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else { continue };
        let values: Vec<f64> = fields
            .map(|f| f.parse::<f64>().map_err(|_| parse_err(lineno, format!("bad number {f:?}"))))
            .collect::<Result<_>>()?;
        if values.len() != d {
            return Err(parse_err(lineno, format!("expected {d} values, found {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(lineno, "non-finite value".into()));
        }
        let Some(id) = vocab.id(token).or_else(|| vocab.id(&token.to_lowercase())) else {
            continue;
        };
        let id = id as usize;
        if !found[id] {
            data.row_mut(id).copy_from_slice(&values);
            found[id] = true;
        }
    }
    let missing = found
        .iter()
        .enumerate()
        .filter(|(_, &f)| !f)
        .map(|(i, _)| vocab.token(i as u32).to_owned())
        .collect();
    Ok(LoadedVectors {
        vectors: WordVectors {
            data,
            vocab_digest: vocab.digest(),
        },
        missing,
    })
}

pub fn save_vectors(path: impl AsRef<Path>, xv: &WordVectors, vocab: &Vocabulary) -> Result<()> {
    let path = path.as_ref();
    if xv.data.rows() != vocab.size() {
        return Err(Error::validation("vector rows do not match the vocabulary"));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{} {}", xv.data.rows(), xv.data.cols()).map_err(io)?;
    for (i, row) in xv.data.row_iter().enumerate() {
        write!(w, "{}", vocab.token(i as u32)).map_err(io)?;
        for v in row {
            write!(w, " {v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::UNK;

    fn cooc(rows: &[&[f64]]) -> CoocMatrix {
        CoocMatrix {
            counts: DenseMatrix::from_rows(rows).unwrap(),
            window: 5,
            vocab_digest: "test".into(),
            token_count: 0,
        }
    }

    fn outer(a: &[f64], b: &[f64]) -> CoocMatrix {
        CoocMatrix {
            counts: DenseMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j]),
            window: 5,
            vocab_digest: "test".into(),
            token_count: 0,
        }
    }

    #[test]
    fn coocmap_examples() {
        let a = coocmap_assoc(&cooc(&[&[0.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(a.data, DenseMatrix::zeros(2, 2));

        // sqrt -> [[0,2],[2,0]]; unitr -> [[0,1],[1,0]]; center -> ±0.5; unitr -> ±√½
        let a = coocmap_assoc(&cooc(&[&[0.0, 4.0], &[4.0, 0.0]])).unwrap();
        let h = 0.5f64.sqrt();
        let expected = DenseMatrix::from_rows(&[[-h, h], [h, -h]]).unwrap();
        assert!(a.data.max_abs_diff(&expected) < 1e-15);
        assert_eq!(a.chain, vec![Transform::Epow { alpha: 0.5 }, Transform::Normalize]);
    }

    #[test]
    fn log1p_examples() {
        let e1 = std::f64::consts::E - 1.0;
        let c = cooc(&[&[e1]]);
        assert!((apply_transform(&Transform::Log1p, &c.counts).unwrap().get(0, 0) - 1.0).abs() < 1e-15);
        assert_eq!(log1p_assoc(&c).unwrap().data, DenseMatrix::zeros(1, 1));
    }

    #[test]
    fn rapp_examples() {
        let a = rapp_assoc(&cooc(&[&[2.0, 0.0], &[0.0, 2.0]])).unwrap();
        assert_eq!(a.data, DenseMatrix::identity(2));

        let a = rapp_assoc(&outer(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0])).unwrap();
        for v in a.data.data() {
            assert!((v - 1.0 / 3.0).abs() < 1e-10);
        }

        let a = rapp_assoc(&cooc(&[&[0.0, 0.0], &[0.0, 3.0]])).unwrap();
        assert_eq!(a.data.row(0), &[0.0, 0.0]);
    }

    #[test]
    fn independence_degenerate_cases() {
        let c = outer(&[1.0, 2.0, 3.0, 0.5], &[4.0, 5.0, 6.0, 1.5]);
        for t in [Transform::Fung, Transform::Ppmi { k: 1.0 }] {
            let a = apply_transform(&t, &c.counts).unwrap();
            assert!(a.data().iter().all(|v| v.abs() < 1e-10));
        }
        let sq = outer(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        assert!(ppmi_assoc(&sq, 1e300).unwrap().data.data().iter().all(|&v| v == 0.0));
        let flat = cooc(&[&[3.0, 3.0], &[3.0, 3.0]]);
        assert!(glove_assoc(&flat).unwrap().data.data().iter().all(|v| v.abs() < 1e-15));
        assert_eq!(glove_assoc(&cooc(&[&[7.0]])).unwrap().data, DenseMatrix::zeros(1, 1));
        assert!(ppmi_assoc(&sq, 0.0).is_err());
    }

    #[test]
    fn fung_zero_entries_contribute_nothing() {
        let c = cooc(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let a = fung_assoc(&c).unwrap();
        assert_eq!(a.data.get(0, 0), 0.0);
        assert_eq!(a.data.get(1, 1), 0.0);
    }

    #[test]
    fn pipeline_extends_chain() {
        let c = cooc(&[&[0.0, 4.0, 1.0], &[4.0, 0.0, 9.0], &[1.0, 9.0, 2.0]]);
        let a = coocmap_assoc(&c).unwrap();
        assert_eq!(apply_pipeline(&a, &[]).unwrap(), a);
        let p = apply_pipeline(&a, &[Step::Clip { lo: 1.0, hi: 99.0 }, Step::Drop { r: 1 }]).unwrap();
        let direct = kernels::drop_head(&kernels::clip(&a.data, 1.0, 99.0).unwrap(), 1).unwrap();
        assert_eq!(p.data, direct);
        assert_eq!(p.chain.len(), 4);
        assert_eq!(p.replay(&c.counts).unwrap(), p.data);
    }

    #[test]
    fn svd_vectors_examples() {
        let c = cooc(&[&[4.0, 0.0], &[0.0, 1.0]]);
        let v = svd_vectors(&c, 2).unwrap();
        assert!(v.data.max_abs_diff(&DenseMatrix::from_diag(&[2.0, 1.0])) < 1e-12);
        assert!(svd_vectors(&c, 0).is_err());
        assert!(svd_vectors(&c, 3).is_err());

        // rank-1 C^∘½ = a aᵀ, recovered by one scaled singular vector
        let a: [f64; 3] = [1.0, 2.0, 3.0];
        let c = CoocMatrix {
            counts: DenseMatrix::from_fn(3, 3, |i, j| (a[i] * a[j]).powi(2)),
            ..cooc(&[&[0.0]])
        };
        let v = svd_vectors(&c, 1).unwrap();
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        for i in 0..3 {
            assert!((v.data.get(i, 0) - a[i] * norm).abs() < 1e-10);
        }
    }

    #[test]
    fn vectors_text_format() {
        let vocab = Vocabulary::from_tokens(vec![UNK.into(), "dog".into(), "cat".into()]).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), "3 2\nDog 1 2\nbird 0 1\ncat 3.5 -1e-3\n").unwrap();
        let loaded = load_vectors(f.path(), &vocab).unwrap();
        assert_eq!(loaded.missing, vec![UNK.to_string()]);
        assert_eq!(loaded.vectors.data.row(1), &[1.0, 2.0]);
        assert_eq!(loaded.vectors.data.row(2), &[3.5, -1e-3]);
        assert_eq!(loaded.vectors.data.row(0), &[0.0, 0.0]);

        let out = tempfile::NamedTempFile::new().unwrap();
        save_vectors(out.path(), &loaded.vectors, &vocab).unwrap();
        let back = load_vectors(out.path(), &vocab).unwrap();
        assert_eq!(back.vectors, loaded.vectors);
        assert!(back.missing.is_empty());

        std::fs::write(f.path(), "1 2\ndog 1\n").unwrap();
        assert!(matches!(load_vectors(f.path(), &vocab), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn orthonormal_vectors_give_normalized_identity() {
        let xv = WordVectors {
            data: DenseMatrix::identity(3),
            vocab_digest: "x".into(),
        };
        let a = assoc_from_vectors(&xv).unwrap();
        assert!(a.data.max_abs_diff(&kernels::normalize(&DenseMatrix::identity(3))) < 1e-12);
    }
}
