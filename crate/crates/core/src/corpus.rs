//! Raw text ingestion: head slicing, tokenization, vocabularies, encoding.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Reserved unknown token, always id 0.
pub const UNK: &str = "[UNK]";

/// Default vocabulary size.
pub const DEFAULT_VOCAB_SIZE: usize = 5000;

/// Reads at most `n` bytes from the start of `path`, cut back to the last
/// complete line.
pub fn take_head_bytes(path: impl AsRef<Path>, n: u64) -> Result<Vec<u8>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::new();
    file.take(n)
        .read_to_end(&mut buf)
        .map_err(|e| Error::io(path, e))?;
    let keep = buf.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    buf.truncate(keep);
    Ok(buf)
}

/// Lowercases and splits on Unicode whitespace, one token list per line.
pub fn tokenize(bytes: &[u8]) -> Result<Vec<Vec<String>>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Utf8 {
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize_str(text))
}

pub fn tokenize_str(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|line| line.to_lowercase().split_whitespace().map(str::to_owned).collect())
        .collect()
}

/// Frequency-ranked token list; id 0 is [`UNK`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Wraps an explicit token list. The first token must be [`UNK`] and
    /// tokens must be unique.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.first().map(String::as_str) != Some(UNK) {
            return Err(Error::validation(format!("vocabulary must start with {UNK}")));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (id, tok) in tokens.iter().enumerate() {
            if tok.is_empty() || tok.chars().any(char::is_whitespace) {
                return Err(Error::validation(format!("invalid token {tok:?} at id {id}")));
            }
            if index.insert(tok.clone(), id as u32).is_some() {
                return Err(Error::validation(format!("duplicate token {tok:?}")));
            }
        }
        Ok(Vocabulary { tokens, index })
    }

    pub fn size(&self) -> usize {
        self.tokens.len()
    }

    pub fn unk_id(&self) -> u32 {
        0
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Hex SHA-256 of the serialized vocabulary.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for tok in &self.tokens {
            h.update(tok.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    /// One token per line; line number is the id.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for tok in &self.tokens {
            writeln!(w, "{tok}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let tokens = BufReader::new(file)
            .lines()
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(|e| Error::io(path, e))?;
        Vocabulary::from_tokens(tokens).map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: 0,
            msg: e.to_string(),
        })
    }

    /// Maps ids back to tokens.
    pub fn decode<'a>(&'a self, ids: &'a [u32]) -> impl Iterator<Item = &'a str> + 'a {
        ids.iter().map(move |&id| self.token(id))
    }
}

/// `[UNK]` plus the `v_max − 1` most frequent tokens, ties broken by first
/// occurrence.
pub fn build_vocab<'a, I>(tokens: I, v_max: usize) -> Result<Vocabulary>
where
    I: IntoIterator<Item = &'a str>,
{
    if v_max == 0 {
        return Err(Error::validation("vocabulary size must be at least 1"));
    }
    let mut counts: HashMap<&'a str, (u64, usize)> = HashMap::new();
    for (pos, tok) in tokens.into_iter().enumerate() {
        counts.entry(tok).or_insert((0, pos)).0 += 1;
    }
    let mut ranked: Vec<(&str, u64, usize)> = counts
        .into_iter()
        .filter(|(tok, _)| *tok != UNK)
        .map(|(tok, (n, first))| (tok, n, first))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    let tokens = std::iter::once(UNK.to_owned())
        .chain(ranked.into_iter().take(v_max - 1).map(|(t, _, _)| t.to_owned()))
        .collect();
    Vocabulary::from_tokens(tokens)
}

/// Convenience: every token of every line, in order.
pub fn flat_tokens(lines: &[Vec<String>]) -> impl Iterator<Item = &str> {
    lines.iter().flatten().map(String::as_str)
}

/// A corpus as token ids plus the line structure.
#[derive(Clone, Debug)]
pub struct EncodedCorpus<'v> {
    pub ids: Vec<u32>,
    /// End offsets (exclusive) of the nonempty input lines.
    pub line_breaks: Vec<usize>,
    pub vocab: &'v Vocabulary,
}

impl<'v> EncodedCorpus<'v> {
    /// Token ids of each nonempty line.
    pub fn lines(&self) -> impl Iterator<Item = &[u32]> {
        let mut start = 0;
        self.line_breaks.iter().map(move |&end| {
            let line = &self.ids[start..end];
            start = end;
            line
        })
    }

    pub fn num_lines(&self) -> usize {
        self.line_breaks.len()
    }

    /// Lines `[from, to)` as a standalone corpus.
    pub fn slice_lines(&self, from: usize, to: usize) -> EncodedCorpus<'v> {
        let start = if from == 0 { 0 } else { self.line_breaks[from - 1] };
        let end = if to == 0 { 0 } else { self.line_breaks[to - 1] };
        EncodedCorpus {
            ids: self.ids[start..end].to_vec(),
            line_breaks: self.line_breaks[from..to].iter().map(|b| b - start).collect(),
            vocab: self.vocab,
        }
    }
}

/// Maps tokens to ids, out-of-vocabulary tokens to [`UNK`].
pub fn encode<'v, L: AsRef<[String]>>(lines: &[L], vocab: &'v Vocabulary) -> EncodedCorpus<'v> {
    let mut ids = Vec::new();
    let mut line_breaks = Vec::new();
    for line in lines {
        let line = line.as_ref();
        if line.is_empty() {
            continue;
        }
        ids.extend(line.iter().map(|t| vocab.id(t).unwrap_or(0)));
        line_breaks.push(ids.len());
    }
    EncodedCorpus {
        ids,
        line_breaks,
        vocab,
    }
}
