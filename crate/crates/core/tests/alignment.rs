mod common;

use proptest::prelude::*;
use textreuse::alignment::{align_spans, AlignParams};
use textreuse::span::{self, Span};
use textreuse::{align_pair, extend, seed_matches, Alignment, Seed};

use common::{doc_of, extend_oracle, seed_oracle};

fn small_doc(vocab: u32, max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..vocab, 0..max_len)
}

/// Two documents sharing a few copied stretches over a small vocabulary.
fn doc_pair() -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (small_doc(4, 80), small_doc(4, 80), prop::collection::vec((0usize..80, 0usize..80, 1usize..30), 0..3)).prop_map(
        |(a, mut b, copies)| {
            for (from, to, len) in copies {
                if a.is_empty() {
                    break;
                }
                let from = from % a.len();
                let piece = &a[from..(from + len).min(a.len())];
                let to = to.min(b.len());
                b.splice(to..to, piece.iter().copied());
            }
            (a, b)
        },
    )
}

fn window() -> impl Strategy<Value = (usize, usize)> {
    (1usize..6).prop_flat_map(|n| (Just(n), 0..n))
}

fn seed_set() -> impl Strategy<Value = Vec<Seed>> {
    let side = (0usize..400, 1usize..40).prop_map(|(b, l)| Span::new(b, b + l));
    prop::collection::vec((side.clone(), side).prop_map(|(a, b)| Seed { span_a: a, span_b: b }), 0..25)
}

fn covered(als: &[Alignment]) -> (Vec<Span>, Vec<Span>) {
    (
        span::union(als.iter().map(|a| a.span_a)),
        span::union(als.iter().map(|a| a.span_b)),
    )
}

fn contains_all(outer: &[Span], inner: &[Span]) -> bool {
    inner.iter().all(|i| outer.iter().any(|o| o.contains(i)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn seeding_matches_brute_force((a, b) in doc_pair(), (n, k) in window()) {
        let (da, db) = (doc_of("a", &a), doc_of("b", &b));
        prop_assert_eq!(seed_matches(&da, &db, n, k).unwrap(), seed_oracle(&da, &db, n, k));
    }

    #[test]
    fn extension_matches_components(seeds in seed_set(), delta in 0usize..120, min_seeds in 1usize..4) {
        prop_assert_eq!(extend(&seeds, delta, min_seeds), extend_oracle(&seeds, delta, min_seeds));
    }

    #[test]
    fn extension_ignores_seed_order(mut seeds in seed_set(), delta in 0usize..120) {
        let before = extend(&seeds, delta, 2);
        seeds.reverse();
        prop_assert_eq!(extend(&seeds, delta, 2), before);
    }

    #[test]
    fn alignment_is_symmetric((a, b) in doc_pair(), (n, k) in window(), delta in 0usize..60) {
        let (da, db) = (doc_of("a", &a), doc_of("b", &b));
        let params = AlignParams { n_gram: n, k, delta, min_seeds: 1, ..Default::default() };
        let mut ab = align_pair(&da, &db, &params).unwrap();
        let mut ba: Vec<_> = align_pair(&db, &da, &params).unwrap().into_iter().map(|c| c.swapped()).collect();
        ab.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
        ba.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn larger_delta_never_adds_cases(seeds in seed_set(), d1 in 0usize..100, extra in 0usize..100) {
        let small = extend(&seeds, d1, 1);
        let large = extend(&seeds, d1 + extra, 1);
        prop_assert!(large.len() <= small.len());
    }

    #[test]
    fn larger_delta_never_loses_coverage(seeds in seed_set(), d1 in 0usize..100, extra in 0usize..100, min_seeds in 1usize..4) {
        let (sa, sb) = covered(&extend(&seeds, d1, min_seeds));
        let (la, lb) = covered(&extend(&seeds, d1 + extra, min_seeds));
        prop_assert!(contains_all(&la, &sa) && contains_all(&lb, &sb));
    }

    #[test]
    fn case_text_is_the_located_text((a, b) in doc_pair()) {
        let (da, db) = (doc_of("a", &a), doc_of("b", &b));
        let params = AlignParams { n_gram: 3, k: 2, delta: 20, min_seeds: 1, ..Default::default() };
        for c in align_pair(&da, &db, &params).unwrap() {
            prop_assert_eq!(c.text_a.as_deref(), Some(da.slice(c.span_a())));
            prop_assert_eq!(c.text_b.as_deref(), Some(db.slice(c.span_b())));
            prop_assert!(c.end_a <= c.doc_length_a && c.end_b <= c.doc_length_b);
        }
    }
}

#[test]
fn planted_passage_is_recovered_exactly() {
    let a: Vec<u32> = (0..400).collect();
    let mut b: Vec<u32> = (10_000..10_300).collect();
    b.splice(120..120, a[50..150].iter().copied());
    let (da, db) = (doc_of("a", &a), doc_of("b", &b));
    let spans = align_spans(&da, &db, &AlignParams::default()).unwrap();
    assert_eq!(spans.len(), 1);
    assert_eq!(da.slice(spans[0].span_a), db.slice(spans[0].span_b));
    assert_eq!(spans[0].span_a, Span::new(da.token_spans[50].begin, da.token_spans[149].end));
    assert_eq!(spans[0].seeds, 93);
}

#[test]
fn invalid_windows_are_rejected() {
    let d = doc_of("a", &[1, 2, 3]);
    assert!(seed_matches(&d, &d, 0, 0).is_err());
    assert!(seed_matches(&d, &d, 3, 3).is_err());
    let p = AlignParams { min_seeds: 0, ..Default::default() };
    assert!(align_pair(&d, &d, &p).is_err());
}
