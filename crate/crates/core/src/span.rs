use serde::{Deserialize, Serialize};

/// Half-open character interval `[begin, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub begin: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(begin: usize, end: usize) -> Self {
        Span { begin, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.begin)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.begin
    }

    /// Number of characters strictly between the two spans; zero when they touch or overlap.
    pub fn gap(&self, other: &Span) -> usize {
        let lo_end = self.end.min(other.end);
        let hi_begin = self.begin.max(other.begin);
        hi_begin.saturating_sub(lo_end)
    }

    /// True when the spans share at least one character.
    pub fn overlaps(&self, other: &Span) -> bool {
        self.begin < other.end && other.begin < self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.begin <= other.begin && other.end <= self.end
    }

    pub fn cover(&self, other: &Span) -> Span {
        Span::new(self.begin.min(other.begin), self.end.max(other.end))
    }
}

/// Sorts and coalesces spans into a disjoint, increasing list. Empty spans are dropped.
pub fn union(spans: impl IntoIterator<Item = Span>) -> Vec<Span> {
    let mut v: Vec<Span> = spans.into_iter().filter(|s| !s.is_empty()).collect();
    v.sort_unstable();
    let mut out: Vec<Span> = Vec::with_capacity(v.len());
    for s in v {
        match out.last_mut() {
            Some(last) if s.begin <= last.end => last.end = last.end.max(s.end),
            _ => out.push(s),
        }
    }
    out
}

pub fn total_len(disjoint: &[Span]) -> usize {
    disjoint.iter().map(Span::len).sum()
}

/// Size of the intersection of two disjoint, sorted span lists.
pub fn intersection_len(a: &[Span], b: &[Span]) -> usize {
    let (mut i, mut j, mut acc) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].begin.max(b[j].begin);
        let hi = a[i].end.min(b[j].end);
        if hi > lo {
            acc += hi - lo;
        }
        if a[i].end < b[j].end {
            i += 1;
        } else {
            j += 1;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_between_disjoint_and_overlapping() {
        let a = Span::new(0, 10);
        assert_eq!(a.gap(&Span::new(110, 120)), 100);
        assert_eq!(Span::new(110, 120).gap(&a), 100);
        assert_eq!(a.gap(&Span::new(10, 12)), 0);
        assert_eq!(a.gap(&Span::new(5, 12)), 0);
    }

    #[test]
    fn union_and_intersection() {
        let u = union([Span::new(5, 10), Span::new(0, 3), Span::new(8, 12), Span::new(4, 4)]);
        assert_eq!(u, vec![Span::new(0, 3), Span::new(5, 12)]);
        assert_eq!(total_len(&u), 10);
        let v = union([Span::new(2, 6), Span::new(11, 20)]);
        assert_eq!(intersection_len(&u, &v), 1 + 1 + 1);
    }
}
