mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use textreuse::metrics::{
    evaluate, f_beta, granularity, grid_search, score_pair, Averaging, EvalOptions, GoldSpan, GridRanges,
    UnknownPairs,
};
use textreuse::span::Span;
use textreuse::synthgen::{generate, GenSpec};
use textreuse::{align_pair, normalize, AlignParams, Document, GoldAnnotation, ReuseCase, Strategy as Label};

use common::doc_of;

fn case(doi_a: &str, doi_b: &str, a: Span, b: Span) -> ReuseCase {
    serde_json::from_value(serde_json::json!({
        "id": "x", "begin_a": a.begin, "end_a": a.end, "doc_length_a": 10_000, "doi_a": doi_a,
        "year_a": null, "field_a": null, "area_a": null, "discipline_a": null,
        "begin_b": b.begin, "end_b": b.end, "doc_length_b": 10_000, "doi_b": doi_b,
        "year_b": null, "field_b": null, "area_b": null, "discipline_b": null,
    }))
    .unwrap()
}

fn gold(doi_a: &str, doi_b: &str, spans: &[(Span, Span)], strategy: Label) -> GoldAnnotation {
    GoldAnnotation {
        pair_id: format!("{doi_a}|{doi_b}"),
        doi_a: doi_a.into(),
        doi_b: doi_b.into(),
        spans: spans.iter().map(|&(a, b)| GoldSpan::new(a, b)).collect(),
        strategy,
    }
}

fn sp(b: usize, e: usize) -> Span {
    Span::new(b, e)
}

/// Character positions covered on each side, as a set of (side, position).
fn chars(spans: &[(Span, Span)]) -> BTreeSet<(u8, usize)> {
    let mut out = BTreeSet::new();
    for (a, b) in spans {
        out.extend((a.begin..a.end).map(|p| (0, p)));
        out.extend((b.begin..b.end).map(|p| (1, p)));
    }
    out
}

fn span_pairs(max: usize) -> impl Strategy<Value = Vec<(Span, Span)>> {
    let side = (0usize..300, 1usize..60).prop_map(|(b, l)| Span::new(b, b + l));
    prop::collection::vec((side.clone(), side), 0..max)
}

const DOIS: [&str; 3] = ["10.1/a", "10.1/b", "10.1/c"];

/// Gold and detections over the three pairs of `DOIS`, sides randomly flipped.
fn fixture() -> impl Strategy<Value = (Vec<GoldAnnotation>, Vec<ReuseCase>)> {
    (
        prop::collection::vec((span_pairs(4), span_pairs(4)), 3),
        prop::collection::vec(any::<bool>(), 24),
    )
        .prop_map(|(per_pair, flips)| {
            let pairs = [(0, 1), (0, 2), (1, 2)];
            let mut g = Vec::new();
            let mut d = Vec::new();
            for (i, ((gs, ds), (x, y))) in per_pair.into_iter().zip(pairs).enumerate() {
                let (a, b) = (DOIS[x], DOIS[y]);
                if flips[i] {
                    let swapped: Vec<_> = gs.iter().map(|(p, q)| (*q, *p)).collect();
                    g.push(gold(b, a, &swapped, Label::Random));
                } else {
                    g.push(gold(a, b, &gs, Label::Random));
                }
                for (j, (p, q)) in ds.into_iter().enumerate() {
                    let c = case(a, b, p, q);
                    d.push(if flips[3 + i * 7 + j] { c.swapped() } else { c });
                }
            }
            (g, d)
        })
}

/// Every pair of `DOIS` is listed, with the cases on it as gold spans.
fn as_gold(cases: &[ReuseCase]) -> Vec<GoldAnnotation> {
    let mut out: Vec<GoldAnnotation> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(x, y)| gold(DOIS[x], DOIS[y], &[], Label::Random))
        .collect();
    for c in cases {
        let (a, b, sa, sb) = if c.doi_a <= c.doi_b {
            (&c.doi_a, &c.doi_b, c.span_a(), c.span_b())
        } else {
            (&c.doi_b, &c.doi_a, c.span_b(), c.span_a())
        };
        match out.iter_mut().find(|g| &g.doi_a == a && &g.doi_b == b) {
            Some(g) => g.spans.push(GoldSpan::new(sa, sb)),
            None => out.push(gold(a, b, &[(sa, sb)], Label::Random)),
        }
    }
    out
}

fn as_cases(gold: &[GoldAnnotation]) -> Vec<ReuseCase> {
    gold.iter()
        .flat_map(|g| g.spans.iter().map(move |s| case(&g.doi_a, &g.doi_b, s.span_a(), s.span_b())))
        .collect()
}

fn opts(averaging: Averaging) -> EvalOptions {
    EvalOptions {
        averaging,
        unknown_pairs: UnknownPairs::AsNegative,
        ..Default::default()
    }
}

proptest! {
    #[test]
    fn pair_scores_match_set_arithmetic(g in span_pairs(5), d in span_pairs(5)) {
        let c = score_pair(&g, &d);
        let (gc, dc) = (chars(&g), chars(&d));
        let inter = gc.intersection(&dc).count();
        prop_assert_eq!(c.gold_chars, gc.len());
        prop_assert_eq!(c.detected_chars, dc.len());
        prop_assert_eq!(c.overlap_chars, inter);
        let p = if dc.is_empty() { 1.0 } else { inter as f64 / dc.len() as f64 };
        let r = if gc.is_empty() { 1.0 } else { inter as f64 / gc.len() as f64 };
        prop_assert_eq!((c.precision(), c.recall()), (p, r));
    }

    #[test]
    fn swapping_gold_and_detections_exchanges_precision_and_recall(
        (g, d) in fixture(),
        micro in any::<bool>(),
    ) {
        let o = opts(if micro { Averaging::Micro } else { Averaging::Macro });
        let fwd = evaluate(&g, &d, &o).unwrap().overall;
        let bwd = evaluate(&as_gold(&d), &as_cases(&g), &o).unwrap().overall;
        prop_assert!((fwd.precision - bwd.recall).abs() < 1e-12);
        prop_assert!((fwd.recall - bwd.precision).abs() < 1e-12);
    }

    #[test]
    fn scores_ignore_order_and_side_assignment((g, d) in fixture(), seed in any::<u64>()) {
        let o = opts(Averaging::Macro);
        let base = evaluate(&g, &d, &o).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let mut d2: Vec<ReuseCase> = d.iter().cloned().map(ReuseCase::swapped).collect();
        let mut g2 = g.clone();
        rand::seq::SliceRandom::shuffle(&mut d2[..], &mut rng);
        rand::seq::SliceRandom::shuffle(&mut g2[..], &mut rng);
        let other = evaluate(&g2, &d2, &o).unwrap();
        prop_assert_eq!(base.overall.pairs, other.overall.pairs);
        prop_assert!((base.overall.precision - other.overall.precision).abs() < 1e-12);
        prop_assert!((base.overall.recall - other.overall.recall).abs() < 1e-12);
        prop_assert_eq!(base.overall.granularity, other.overall.granularity);
    }

    #[test]
    fn scores_stay_in_range((g, d) in fixture()) {
        for micro in [false, true] {
            let s = evaluate(&g, &d, &opts(if micro { Averaging::Micro } else { Averaging::Macro })).unwrap().overall;
            for v in [s.precision, s.recall, s.f_beta] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(s.granularity >= 1.0);
        }
    }
}

#[test]
fn half_overlap_gives_half_precision_and_recall() {
    // Gold covers 100 chars per side; the detection covers 50 of them plus 50 others.
    let g = [gold("a", "b", &[(sp(100, 200), sp(100, 200))], Label::None)];
    let d = [case("a", "b", sp(150, 250), sp(150, 250))];
    let s = evaluate(&g, &d, &EvalOptions::default()).unwrap().overall;
    assert_eq!((s.precision, s.recall), (0.5, 0.5));
}

#[test]
fn empty_detection_conventions() {
    let g = [
        gold("a", "b", &[(sp(0, 10), sp(0, 10))], Label::None),
        gold("a", "c", &[], Label::NoPlagiarism),
    ];
    let r = evaluate(&g, &[], &EvalOptions::default()).unwrap();
    assert_eq!(r.per_strategy[&Label::None].precision, 1.0);
    assert_eq!(r.per_strategy[&Label::None].recall, 0.0);
    let neg = &r.per_strategy[&Label::NoPlagiarism];
    assert_eq!((neg.precision, neg.recall, neg.f_beta), (1.0, 1.0, 1.0));
}

#[test]
fn granularity_counts_detections_per_found_case() {
    let g = [gold(
        "a",
        "b",
        &[(sp(0, 100), sp(0, 100)), (sp(200, 300), sp(200, 300)), (sp(400, 500), sp(400, 500))],
        Label::None,
    )];
    let one_each = [
        case("a", "b", sp(0, 100), sp(0, 100)),
        case("a", "b", sp(200, 300), sp(200, 300)),
        case("a", "b", sp(400, 500), sp(400, 500)),
    ];
    assert_eq!(granularity(&g, &one_each).unwrap(), 1.0);
    let mixed = [
        case("a", "b", sp(0, 100), sp(0, 100)),
        case("a", "b", sp(200, 300), sp(200, 300)),
        case("a", "b", sp(400, 450), sp(400, 450)),
        case("a", "b", sp(450, 500), sp(450, 500)),
    ];
    assert!((granularity(&g, &mixed).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    let split = [
        case("a", "b", sp(0, 50), sp(0, 50)),
        case("a", "b", sp(50, 100), sp(50, 100)),
    ];
    assert_eq!(granularity(&g[..1], &split).unwrap(), 2.0);
    // Overlap on one side only does not count.
    let skew = [case("a", "b", sp(0, 100), sp(900, 1000))];
    assert_eq!(granularity(&g, &skew).unwrap(), 1.0);
}

#[test]
fn unknown_pairs_are_rejected_or_scored_as_negatives() {
    let g = [gold("a", "b", &[(sp(0, 10), sp(0, 10))], Label::None)];
    let d = [case("a", "b", sp(0, 10), sp(0, 10)), case("c", "a", sp(0, 10), sp(0, 10))];
    assert!(evaluate(&g, &d, &EvalOptions::default()).is_err());
    let r = evaluate(&g, &d, &opts(Averaging::Macro)).unwrap();
    assert_eq!(r.overall.pairs, 2);
    assert_eq!(r.overall.precision, 0.5);
    assert_eq!(r.per_strategy[&Label::NoPlagiarism].precision, 0.0);
}

#[test]
fn plagdet_is_reported_only_when_requested() {
    let g = [gold("a", "b", &[(sp(0, 100), sp(0, 100))], Label::None)];
    let d = [case("a", "b", sp(0, 50), sp(0, 50)), case("a", "b", sp(50, 100), sp(50, 100))];
    let plain = evaluate(&g, &d, &EvalOptions::default()).unwrap().overall;
    assert_eq!(plain.plagdet, None);
    let folded = evaluate(&g, &d, &EvalOptions { fold_granularity: true, ..Default::default() })
        .unwrap()
        .overall;
    assert!((folded.plagdet.unwrap() - 1.0 / 3f64.log2()).abs() < 1e-12);
}

#[test]
fn f_beta_edge_cases() {
    assert_eq!(f_beta(1.0, 1.0, 0.5), 1.0);
    assert_eq!(f_beta(1.0, 0.0, 0.5), 0.0);
    assert_eq!(f_beta(0.0, 0.0, 0.5), 0.0);
    assert!((f_beta(0.5, 0.5, 1.0) - 0.5).abs() < 1e-12);
}

#[test]
fn report_renderings() {
    let g = [
        gold("a", "b", &[(sp(0, 10), sp(0, 10))], Label::Random),
        gold("a", "c", &[(sp(0, 10), sp(0, 10))], Label::None),
    ];
    let r = evaluate(&g, &as_cases(&g), &EvalOptions::default()).unwrap();
    let table = r.to_table();
    let lines: Vec<&str> = table.lines().collect();
    assert!(lines[0].contains("Precision") && lines[0].contains("F0.5"));
    assert!(lines[1].starts_with("No Obfuscation"));
    assert!(lines[2].starts_with("Random Obfuscation"));
    assert!(lines.last().unwrap().starts_with("Entire Corpus"));
    let rows: Vec<serde_json::Value> = r.to_jsonl().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["scope"], "Entire Corpus");
    assert_eq!(rows[2]["precision"], 1.0);
}

fn synthetic() -> (Vec<Document>, Vec<GoldAnnotation>) {
    let spec = GenSpec {
        documents: 60,
        ..GenSpec::default()
    }
    .with_planted_pairs(30);
    let c = generate(&spec).unwrap();
    (c.documents.iter().map(normalize).collect(), c.gold)
}

#[test]
fn singleton_grid_equals_direct_evaluation() {
    let (docs, g) = synthetic();
    let ranges = GridRanges {
        n_gram: vec![8],
        k: vec![7],
        delta: vec![250],
    };
    let rows = grid_search(&docs, &g, &ranges, &AlignParams::default(), &EvalOptions::default()).unwrap();
    assert_eq!(rows.len(), 1);
    let find = |d: &str| docs.iter().find(|x| x.doi == d).unwrap();
    let detected: Vec<ReuseCase> = g
        .iter()
        .flat_map(|p| align_pair(find(&p.doi_a), find(&p.doi_b), &AlignParams::default()).unwrap())
        .collect();
    let direct = evaluate(&g, &detected, &EvalOptions::default()).unwrap().overall;
    assert_eq!(rows[0].scores, direct);
    assert_eq!(rows[0].rank, 1);

    let empty = GridRanges {
        n_gram: vec![],
        ..ranges
    };
    assert!(grid_search(&docs, &g, &empty, &AlignParams::default(), &EvalOptions::default()).is_err());
}

#[test]
fn default_parameters_rank_in_top_quartile() {
    let (docs, g) = synthetic();
    let ranges = GridRanges {
        n_gram: vec![4, 6, 8, 10, 12],
        k: vec![0, 3, 5, 7],
        delta: vec![50, 100, 250, 500],
    };
    let rows = grid_search(&docs, &g, &ranges, &AlignParams::default(), &EvalOptions::default()).unwrap();
    let ours = rows.iter().find(|r| (r.n_gram, r.k, r.delta) == (8, 7, 250)).unwrap();
    assert!(ours.rank <= rows.len().div_ceil(4), "rank {} of {}", ours.rank, rows.len());
    for w in rows.windows(2) {
        assert!(w[0].scores.f_beta >= w[1].scores.f_beta);
        assert!(w[0].rank <= w[1].rank);
    }
    let again = grid_search(&docs, &g, &ranges, &AlignParams::default(), &EvalOptions::default()).unwrap();
    assert_eq!(rows, again);
}

#[test]
fn widening_delta_past_the_gap_scale_costs_precision() {
    // Four reused blocks in the same order in both documents, separated by
    // unrelated filler of increasing length.
    let block = |i: u32| -> Vec<u32> { (i * 100..i * 100 + 20).collect() };
    let filler = |tag: u32, len: u32| -> Vec<u32> { (0..len).map(|j| 100_000 * tag + j).collect() };
    let gaps = [6u32, 20, 50];
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for i in 0..4u32 {
        a.extend(block(i));
        b.extend(block(i));
        if let Some(&g) = gaps.get(i as usize) {
            a.extend(filler(1 + i, g));
            b.extend(filler(10 + i, g));
        }
    }
    let (da, db) = (doc_of("a", &a), doc_of("b", &b));
    let spans: Vec<(Span, Span)> = (0..4usize)
        .map(|i| {
            let start = da.tokens.iter().position(|t| *t == textreuse::synthgen::word(i as u32 * 100)).unwrap();
            let sa = Span::new(da.token_spans[start].begin, da.token_spans[start + 19].end);
            let start = db.tokens.iter().position(|t| *t == textreuse::synthgen::word(i as u32 * 100)).unwrap();
            (sa, Span::new(db.token_spans[start].begin, db.token_spans[start + 19].end))
        })
        .collect();
    let g = [gold("a", "b", &spans, Label::None)];

    let mut last = f64::INFINITY;
    let mut precisions = Vec::new();
    for delta in [10, 50, 100, 150, 250, 400, 800] {
        let params = AlignParams { delta, ..Default::default() };
        let d = align_pair(&da, &db, &params).unwrap();
        let s = evaluate(&g, &d, &EvalOptions::default()).unwrap().overall;
        assert_eq!(s.recall, 1.0);
        assert!(s.precision <= last, "precision rose at delta {delta}");
        last = s.precision;
        precisions.push(s.precision);
    }
    assert_eq!(precisions[0], 1.0);
    assert!(precisions.last().unwrap() < &0.8);
    let distinct: BTreeSet<u64> = precisions.iter().map(|p| p.to_bits()).collect();
    assert!(distinct.len() >= 4, "{precisions:?}");
}
