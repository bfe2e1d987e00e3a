//! Colored indices, sequences, and multi-sequence keys.
//!
//! A sequence is stored head-first: element 0 is the head, the last element
//! is the tail sitting next to the marked point. Concatenation, splits and
//! shuffles all follow this display order.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// A colored index. `color` is 1-based and selects the color class, `ord`
/// numbers the copies of that color within a pool.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Idx {
    pub color: u16,
    pub ord: u16,
}

impl Idx {
    pub const fn new(color: u16, ord: u16) -> Self {
        Idx { color, ord }
    }
}

impl fmt::Display for Idx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.color, self.ord)
    }
}

/// A finite sequence of colored indices in display (head-first) order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Default)]
pub struct Seq(pub Vec<Idx>);

impl Seq {
    pub fn empty() -> Self {
        Seq(Vec::new())
    }

    pub fn single(i: Idx) -> Self {
        Seq(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Head of the sequence: the entry farthest from the marked point.
    pub fn head(&self) -> Option<Idx> {
        self.0.first().copied()
    }

    /// Tail of the sequence: the entry adjacent to the marked point.
    pub fn tail(&self) -> Option<Idx> {
        self.0.last().copied()
    }

    pub fn contains(&self, i: Idx) -> bool {
        self.0.contains(&i)
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Idx> {
        self.0.iter()
    }

    /// True when no index occurs twice.
    pub fn is_repetition_free(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.0.iter().all(|i| seen.insert(*i))
    }

    /// `self` followed by `other` in display order.
    pub fn concat(&self, other: &Seq) -> Seq {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Seq(v)
    }

    /// All deconcatenation splits `(head_part, tail_part)`, including the two
    /// trivial ones.
    pub fn splits(&self) -> Vec<(Seq, Seq)> {
        (0..=self.0.len())
            .map(|k| (Seq(self.0[..k].to_vec()), Seq(self.0[k..].to_vec())))
            .collect()
    }

    pub fn set(&self) -> BTreeSet<Idx> {
        self.0.iter().copied().collect()
    }

    /// Count of entries in each color class, colors 1..=r.
    pub fn multi_degree(&self, r: usize) -> Vec<u32> {
        let mut d = vec![0u32; r];
        for i in &self.0 {
            let c = i.color as usize;
            assert!(c >= 1 && c <= r, "color out of range");
            d[c - 1] += 1;
        }
        d
    }

    /// All position subsets interpreted as subsequences, paired with the
    /// complementary subsequence: `(positions, chosen, rest)`.
    pub fn subsequences(&self) -> Vec<(Vec<usize>, Seq, Seq)> {
        let n = self.0.len();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0u32..(1u32 << n) {
            let mut pos = Vec::new();
            let mut chosen = Vec::new();
            let mut rest = Vec::new();
            for (k, &i) in self.0.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    pos.push(k);
                    chosen.push(i);
                } else {
                    rest.push(i);
                }
            }
            out.push((pos, Seq(chosen), Seq(rest)));
        }
        out
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

/// All shuffles of `a` and `b`: interleavings preserving both internal orders.
/// The result has `binomial(|a|+|b|, |a|)` entries, with multiplicity.
pub fn shuffles(a: &Seq, b: &Seq) -> Vec<Seq> {
    fn go(a: &[Idx], b: &[Idx], acc: &mut Vec<Idx>, out: &mut Vec<Seq>) {
        match (a.first(), b.first()) {
            (None, None) => out.push(Seq(acc.clone())),
            (Some(&x), None) => {
                acc.push(x);
                go(&a[1..], b, acc, out);
                acc.pop();
            }
            (None, Some(&y)) => {
                acc.push(y);
                go(a, &b[1..], acc, out);
                acc.pop();
            }
            (Some(&x), Some(&y)) => {
                acc.push(x);
                go(&a[1..], b, acc, out);
                acc.pop();
                acc.push(y);
                go(a, &b[1..], acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(a.len() + b.len());
    go(&a.0, &b.0, &mut acc, &mut out);
    out
}

/// An n-tuple of sequences, one per marked point.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Key(pub Vec<Seq>);

impl Key {
    pub fn unit(n: usize) -> Self {
        Key(vec![Seq::empty(); n])
    }

    pub fn slots(&self) -> usize {
        self.0.len()
    }

    pub fn total_len(&self) -> usize {
        self.0.iter().map(Seq::len).sum()
    }

    /// Repetition-free across the concatenation of all slots.
    pub fn is_repetition_free(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.0.iter().flat_map(|s| s.0.iter()).all(|i| seen.insert(*i))
    }

    pub fn support(&self) -> BTreeSet<Idx> {
        self.0.iter().flat_map(|s| s.0.iter().copied()).collect()
    }

    pub fn contains(&self, i: Idx) -> bool {
        self.0.iter().any(|s| s.contains(i))
    }

    /// Slot holding `i`, if any. Repetition-free keys have at most one.
    pub fn slot_of(&self, i: Idx) -> Option<usize> {
        self.0.iter().position(|s| s.contains(i))
    }

    pub fn multi_degree(&self, r: usize) -> Vec<u32> {
        let mut d = vec![0u32; r];
        for s in &self.0 {
            for (k, c) in s.multi_degree(r).into_iter().enumerate() {
                d[k] += c;
            }
        }
        d
    }

    pub fn with_slot(&self, slot: usize, s: Seq) -> Key {
        let mut k = self.clone();
        k.0[slot] = s;
        k
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Keys order by total degree first, then slot-wise lexicographically.
/// Map iteration in this order is the canonical serialization order.
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_len()
            .cmp(&other.total_len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ";")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(c: u16, o: u16) -> Idx {
        Idx::new(c, o)
    }

    #[test]
    fn shuffle_count_is_binomial() {
        let a = Seq(vec![i(1, 0), i(1, 1)]);
        let b = Seq(vec![i(1, 2), i(1, 3), i(1, 4)]);
        assert_eq!(shuffles(&a, &b).len(), 10);
        for s in shuffles(&a, &b) {
            assert_eq!(s.len(), 5);
            assert!(s.is_repetition_free());
        }
    }

    #[test]
    fn splits_enumerate_deconcatenations() {
        let s = Seq(vec![i(1, 0), i(2, 0)]);
        let sp = s.splits();
        assert_eq!(sp.len(), 3);
        assert_eq!(sp[0].0, Seq::empty());
        assert_eq!(sp[2].1, Seq::empty());
        for (a, b) in sp {
            assert_eq!(a.concat(&b), s);
        }
    }

    #[test]
    fn key_order_is_degree_first() {
        let small = Key(vec![Seq::empty(), Seq(vec![i(1, 0)])]);
        let large = Key(vec![Seq(vec![i(1, 0)]), Seq(vec![i(1, 1)])]);
        assert!(small < large);
    }

    #[test]
    fn repetition_detection_spans_slots() {
        let k = Key(vec![Seq(vec![i(1, 0)]), Seq(vec![i(1, 0)])]);
        assert!(!k.is_repetition_free());
    }
}
