//! Counts co-occurrences in a text file, saves them, and loads them back.
//!
//! cargo run --release --example count_and_save -- data/corpus_en.txt 2

use coocmap::bench::{synthetic_corpus, SyntheticConfig};
use coocmap::{cooc, corpus};

fn main() -> coocmap::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = match args.next() {
        Some(path) => {
            let mb: f64 = args.next().map_or(2.0, |s| s.parse().expect("budget in MB"));
            String::from_utf8_lossy(&corpus::take_head_bytes(path, (mb * 1e6) as u64)?).into_owned()
        }
        None => synthetic_corpus(&SyntheticConfig::default()),
    };

    let lines = corpus::tokenize_str(&text);
    let vocab = corpus::build_vocab(corpus::flat_tokens(&lines), 2000)?;
    let encoded = corpus::encode(&lines, &vocab);
    let counts = cooc::count_cooc_sharded(&encoded, cooc::DEFAULT_WINDOW, 4)?;
    println!("{} lines, {} tokens, vocabulary {}", lines.len(), encoded.ids.len(), vocab.size());

    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("counts.bin");
    cooc::save_cooc(&counts, &path)?;
    vocab.save(dir.path().join("counts.bin.vocab"))?;
    let back = cooc::load_cooc(&path, Some(&vocab))?;
    assert_eq!(back, counts);
    println!("saved {} bytes, total mass {}", std::fs::metadata(&path).map_or(0, |m| m.len()), back.total());

    let top = vocab.token(1);
    let id = 1;
    let mut neighbours: Vec<(f64, &str)> = (1..vocab.size()).map(|j| (counts.counts.get(id, j), vocab.token(j as u32))).collect();
    neighbours.sort_by(|a, b| b.0.total_cmp(&a.0));
    let shown: Vec<String> = neighbours.iter().take(8).map(|(c, t)| format!("{t}:{c}")).collect();
    println!("most frequent word {top:?} co-occurs with {}", shown.join(" "));
    Ok(())
}
