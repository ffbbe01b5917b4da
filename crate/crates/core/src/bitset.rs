//! Fixed-length bit rows used as column membership sets.
//!
//! Subgroup evaluation is the pipeline's hot path: conjunctions are
//! intersections of per-feature membership sets, so columns are stored as
//! packed 64-bit words and rules are evaluated word-by-word.

use alloc::vec;
use alloc::vec::Vec;

/// A fixed-length set of row indices stored as packed bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSet {
    words: Vec<u64>,
    len: usize,
}

impl RowSet {
    /// Empty set over `len` rows.
    pub fn new(len: usize) -> Self {
        RowSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Set over `len` rows with every bit set.
    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for w in &mut s.words {
            *w = !0;
        }
        s.clear_tail();
        s
    }

    /// Build from a bool slice.
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::new(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set(i);
            }
        }
        s
    }

    /// Number of rows (bits), not the number set.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True when the set covers zero rows.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Mark row `i` as a member.
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    /// Membership of row `i`.
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of member rows.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Raw words; the final word's unused high bits are zero.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// In-place intersection with `other`.
    pub fn and_assign(&mut self, other: &RowSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// In-place union with `other`.
    pub fn or_assign(&mut self, other: &RowSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Complement within the row range.
    pub fn complement(&self) -> RowSet {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// |self AND other| without materializing the intersection.
    pub fn and_count(&self, other: &RowSet) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Member row indices in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            core::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    fn clear_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
}

/// Intersect `columns` and count both members and members that are also in
/// `positives`, in a single pass over the words.
///
/// An empty column list is treated as the full row set.
pub fn conjunction_counts(columns: &[&RowSet], positives: &RowSet, n_rows: usize) -> (usize, usize) {
    let n_words = n_rows.div_ceil(64);
    let tail = n_rows % 64;
    let mut members = 0usize;
    let mut hits = 0usize;
    for wi in 0..n_words {
        let mut w = if wi + 1 == n_words && tail != 0 {
            (1u64 << tail) - 1
        } else {
            !0u64
        };
        for col in columns {
            w &= col.words[wi];
            if w == 0 {
                break;
            }
        }
        members += w.count_ones() as usize;
        hits += (w & positives.words[wi]).count_ones() as usize;
    }
    (members, hits)
}
