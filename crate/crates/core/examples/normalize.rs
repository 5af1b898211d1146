//! Normalization: lowercase alphabetic tokens, single spaces, offsets back into the raw text.
//!
//! ```text
//! cargo run --example normalize
//! ```

use textreuse::span::Span;
use textreuse::{length_filter, normalize, RawDocument};

fn main() {
    let raw = RawDocument::new(
        "10.1000/example",
        "The 3 cats, running!  Über-fast: Straße & naïve café (2019).",
    );
    let doc = normalize(&raw);

    println!("raw:        {:?}", raw.text);
    println!("normalized: {:?}", doc.normalized_text);
    println!("{} tokens, {} chars", doc.token_count(), doc.doc_length);
    for ((token, norm), raw_span) in doc.tokens.iter().zip(&doc.token_spans).zip(&doc.raw_spans) {
        let original: String = raw.text.chars().skip(raw_span.begin).take(raw_span.len()).collect();
        println!(
            "  {token:<10} normalized {:>2}..{:<2}  raw {:>2}..{:<2}  {original:?}",
            norm.begin, norm.end, raw_span.begin, raw_span.end
        );
    }

    // Raw offsets (for example from external annotations) map onto normalized ones.
    let raw_span = Span::new(4, 19);
    let mapped = doc.raw_to_normalized(raw_span).expect("span covers tokens");
    println!("raw {raw_span:?} -> normalized {mapped:?} = {:?}", doc.slice(mapped));

    println!("passes the 1,000..=60,000 word filter: {}", length_filter(&doc));
}
