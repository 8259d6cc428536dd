//! Clip, drop and truncate on a real association matrix, plus the entries
//! whose clipping status changes once the tail of the spectrum is removed.

use coocmap::assoc::{self, Step};
use coocmap::bench::{synthetic_corpus, SyntheticConfig};
use coocmap::eval::{self, ClipSide};
use coocmap::kernels;
use coocmap::{cooc, corpus};

fn main() -> coocmap::Result<()> {
    let text = synthetic_corpus(&SyntheticConfig::default());
    let lines = corpus::tokenize_str(&text);
    let vocab = corpus::build_vocab(corpus::flat_tokens(&lines), 300)?;
    let counts = cooc::count_cooc(&corpus::encode(&lines, &vocab), 5)?;
    let x = assoc::coocmap_assoc(&counts)?;

    let s = kernels::svd(&x.data)?.s;
    println!("leading singular values: {:?}", s.iter().take(5).map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>());

    for steps in [
        vec![Step::Clip { lo: 1.0, hi: 99.0 }],
        vec![Step::Drop { r: 5 }],
        vec![Step::Trunc { r: 50 }],
        vec![Step::Trunc { r: 50 }, Step::Drop { r: 5 }, Step::Clip { lo: 1.0, hi: 99.0 }],
    ] {
        let y = assoc::apply_pipeline(&x, &steps)?;
        let top = kernels::svd(&y.data)?.s[0];
        println!("{:<60} sigma_1 {top:.3}  range [{:.3}, {:.3}]", format!("{:?}", y.chain), min(&y.data), max(&y.data));
    }

    let reduced = kernels::trunc(&x.data, 50)?;
    let thresholds = kernels::clip_thresholds(&x.data, 1.0, 99.0)?;
    let diff = eval::clip_diff_report(&x.data, &reduced, thresholds, &vocab)?;
    let full_only = diff.iter().filter(|d| d.side == ClipSide::FullRank).count();
    println!("{} entries change clipping status ({full_only} only in the full matrix)", diff.len());
    for d in diff.iter().take(5) {
        println!("  {:>8} {:>8}  {:?}  {:.4}", d.token_i, d.token_j, d.side, d.magnitude);
    }
    Ok(())
}

fn min(m: &kernels::DenseMatrix) -> f64 {
    m.data().iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(m: &kernels::DenseMatrix) -> f64 {
    m.data().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
