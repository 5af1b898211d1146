//! Text alignment of one document pair: n-gram seeds, then single-linkage extension.
//!
//! ```text
//! cargo run --example seed_and_extend
//! ```

use textreuse::alignment::{align_spans, DEFAULT_DELTA};
use textreuse::synthgen::word;
use textreuse::{align_pair, extend, normalize, seed_matches, AlignParams, RawDocument, Result};

fn text(ids: impl IntoIterator<Item = u32>) -> String {
    ids.into_iter().map(word).collect::<Vec<_>>().join(" ")
}

fn main() -> Result<()> {
    // Document b reuses two passages of a, with a short unrelated insertion
    // between them and a long one before the second copy of the tail.
    let a = format!("{} {} {}", text(0..40), text(100..130), text(200..260));
    let b = format!(
        "{} {} {} {} {}",
        text(1000..1020),
        text(100..115),
        text(2000..2004),
        text(115..130),
        text(3000..3080),
    );
    let b = format!("{b} {}", text(220..240));
    let (a, b) = (
        normalize(&RawDocument::new("10.1/a", a)),
        normalize(&RawDocument::new("10.1/b", b)),
    );

    let seeds = seed_matches(&a, &b, 8, 7)?;
    println!("{} seeds", seeds.len());
    for s in seeds.iter().take(3) {
        println!("  a {:?}  b {:?}  {:?}", s.span_a, s.span_b, a.slice(s.span_a));
    }

    for delta in [10, DEFAULT_DELTA] {
        println!("delta {delta}:");
        for al in extend(&seeds, delta, 2) {
            println!("  a {:?}  b {:?}  from {} seeds", al.span_a, al.span_b, al.seeds);
        }
    }

    let params = AlignParams::default();
    assert_eq!(align_spans(&a, &b, &params)?.len(), align_pair(&a, &b, &params)?.len());
    for case in align_pair(&a, &b, &params)? {
        println!("{}", serde_json::to_string_pretty(&case)?);
    }
    Ok(())
}
