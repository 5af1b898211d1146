//! MinHash collision rates as estimates of passage Jaccard similarity.
//!
//! ```text
//! cargo run --example jaccard_estimate
//! ```

use std::collections::BTreeSet;

use textreuse::retrieval::MinHasher;
use textreuse::Result;

fn main() -> Result<()> {
    println!("shared  jaccard  m=10   m=100  m=1000");
    for shared in [0, 5, 10, 20, 30, 40, 50] {
        // Two 50-term sets with `shared` terms in common.
        let a: BTreeSet<String> = (0..50).map(|i| format!("t{i}")).collect();
        let b: BTreeSet<String> = (50 - shared..100 - shared).map(|i| format!("t{i}")).collect();
        let exact = a.intersection(&b).count() as f64 / a.union(&b).count() as f64;
        print!("{shared:>6}  {exact:>7.3}");
        for m in [10, 100, 1000] {
            let h = MinHasher::new(m, 1)?;
            let sa = h.signature(a.iter().map(String::as_str))?;
            let sb = h.signature(b.iter().map(String::as_str))?;
            let rate = sa.iter().zip(&sb).filter(|(x, y)| x == y).count() as f64 / m as f64;
            print!("  {rate:>5.3}");
        }
        println!();
    }
    Ok(())
}
