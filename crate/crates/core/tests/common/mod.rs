#![allow(dead_code)]

use textreuse::span::Span;
use textreuse::synthgen::word;
use textreuse::{normalize, Alignment, Document, RawDocument, Seed};

pub fn doc(doi: &str, text: &str) -> Document {
    normalize(&RawDocument::new(doi, text))
}

/// Text made of vocabulary words with the given ids.
pub fn text_of(ids: &[u32]) -> String {
    ids.iter().map(|&i| word(i)).collect::<Vec<_>>().join(" ")
}

pub fn doc_of(doi: &str, ids: &[u32]) -> Document {
    doc(doi, &text_of(ids))
}

/// Writes records as one JSON object per line.
pub fn write_lines(path: &std::path::Path, lines: &[String]) {
    std::fs::write(path, lines.join("\n") + "\n").unwrap();
}

/// Brute force: compare every window of `a` with every window of `b` token by token.
pub fn seed_oracle(a: &Document, b: &Document, n: usize, k: usize) -> Vec<Seed> {
    let starts = |d: &Document| -> Vec<usize> {
        if d.tokens.len() < n {
            return vec![];
        }
        (0..=d.tokens.len() - n).step_by(n - k).collect()
    };
    let span = |d: &Document, s: usize| Span::new(d.token_spans[s].begin, d.token_spans[s + n - 1].end);
    let mut out = Vec::new();
    for i in starts(a) {
        for j in starts(b) {
            if a.tokens[i..i + n] == b.tokens[j..j + n] {
                out.push(Seed {
                    span_a: span(a, i),
                    span_b: span(b, j),
                });
            }
        }
    }
    out
}

fn gap(x: Span, y: Span) -> usize {
    x.begin.max(y.begin).saturating_sub(x.end.min(y.end))
}

fn overlap(x: Span, y: Span) -> bool {
    x.begin < y.end && y.begin < x.end
}

/// Connected components of the "within delta on both sides" graph by depth-first
/// search, then repeated pairwise merging of boxes that overlap on both sides.
pub fn extend_oracle(seeds: &[Seed], delta: usize, min_seeds: usize) -> Vec<Alignment> {
    let n = seeds.len();
    let mut comp = vec![usize::MAX; n];
    let mut boxes: Vec<Alignment> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = boxes.len();
        let mut stack = vec![start];
        comp[start] = id;
        let mut b = Alignment {
            span_a: seeds[start].span_a,
            span_b: seeds[start].span_b,
            seeds: 0,
        };
        while let Some(i) = stack.pop() {
            b.span_a = Span::new(b.span_a.begin.min(seeds[i].span_a.begin), b.span_a.end.max(seeds[i].span_a.end));
            b.span_b = Span::new(b.span_b.begin.min(seeds[i].span_b.begin), b.span_b.end.max(seeds[i].span_b.end));
            b.seeds += 1;
            for j in 0..n {
                if comp[j] == usize::MAX
                    && gap(seeds[i].span_a, seeds[j].span_a) <= delta
                    && gap(seeds[i].span_b, seeds[j].span_b) <= delta
                {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        boxes.push(b);
    }
    'outer: loop {
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if overlap(boxes[i].span_a, boxes[j].span_a) && overlap(boxes[i].span_b, boxes[j].span_b) {
                    let other = boxes.remove(j);
                    let b = &mut boxes[i];
                    b.span_a = Span::new(b.span_a.begin.min(other.span_a.begin), b.span_a.end.max(other.span_a.end));
                    b.span_b = Span::new(b.span_b.begin.min(other.span_b.begin), b.span_b.end.max(other.span_b.end));
                    b.seeds += other.seeds;
                    continue 'outer;
                }
            }
        }
        break;
    }
    boxes.retain(|b| b.seeds >= min_seeds);
    boxes.sort();
    boxes
}
