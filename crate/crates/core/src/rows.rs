//! Bit rows over a column range, and the level-to-level transfer operators.
//!
//! Bit `i` of a row stands for column `lo + i`. Only columns with the parity of
//! the row's level are ever set; the other half of the bits is dead weight that
//! keeps one column step equal to one bit shift.

use smallvec::{smallvec, SmallVec};

use crate::env::Environment;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitRow {
    lo: i64,
    len: usize,
    words: SmallVec<[u64; 2]>,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitRow {
    pub fn zeros(lo: i64, len: usize) -> Self {
        BitRow {
            lo,
            len,
            words: smallvec![0; word_count(len)],
        }
    }

    /// Row over `[lo, hi]` (inclusive); empty if `hi < lo`.
    pub fn span(lo: i64, hi: i64) -> Self {
        BitRow::zeros(lo, (hi - lo + 1).max(0) as usize)
    }

    /// All columns of parity `t` inside `[lo, hi]`.
    pub fn full(lo: i64, hi: i64, t: i64) -> Self {
        let mut row = BitRow::span(lo, hi);
        let first = if (lo + t).rem_euclid(2) == 0 { 0 } else { 1 };
        let pattern = if first == 0 {
            0x5555_5555_5555_5555u64
        } else {
            0xAAAA_AAAA_AAAA_AAAAu64
        };
        row.words.iter_mut().for_each(|w| *w = pattern);
        row.clear_tail();
        row
    }

    pub fn from_columns(lo: i64, hi: i64, cols: impl IntoIterator<Item = i64>) -> Self {
        let mut row = BitRow::span(lo, hi);
        for c in cols {
            row.set(c);
        }
        row
    }

    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest column covered (inclusive).
    #[inline]
    pub fn hi(&self) -> i64 {
        self.lo + self.len as i64 - 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn covers(&self, col: i64) -> bool {
        col >= self.lo && col <= self.hi()
    }

    #[inline]
    pub fn get(&self, col: i64) -> bool {
        if !self.covers(col) {
            return false;
        }
        let i = (col - self.lo) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Panics if `col` is outside the row.
    #[inline]
    pub fn set(&mut self, col: i64) {
        assert!(
            self.covers(col),
            "column {col} outside row [{}, {}]",
            self.lo,
            self.hi()
        );
        let i = (col - self.lo) as usize;
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn max_col(&self) -> Option<i64> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| self.lo + (k * 64) as i64 + 63 - w.leading_zeros() as i64)
    }

    pub fn min_col(&self) -> Option<i64> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| self.lo + (k * 64) as i64 + w.trailing_zeros() as i64)
    }

    pub fn columns(&self) -> impl Iterator<Item = i64> + '_ {
        self.words.iter().enumerate().flat_map(move |(k, &w)| {
            let base = self.lo + (k * 64) as i64;
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as i64;
                w &= w - 1;
                Some(base + b)
            })
        })
    }

    /// 64 bits starting at bit offset `s` (may be negative or past the end).
    #[inline]
    fn word_at(&self, s: i64) -> u64 {
        let w = s.div_euclid(64);
        let r = s.rem_euclid(64) as u32;
        let get = |k: i64| -> u64 {
            if k < 0 || k as usize >= self.words.len() {
                0
            } else {
                self.words[k as usize]
            }
        };
        if r == 0 {
            get(w)
        } else {
            (get(w) >> r) | (get(w + 1) << (64 - r))
        }
    }

    /// Copy realigned to `[lo, lo + len)`, zero where this row has no data.
    pub fn extract(&self, lo: i64, len: usize) -> BitRow {
        let mut out = BitRow::zeros(lo, len);
        let base = lo - self.lo;
        for (k, w) in out.words.iter_mut().enumerate() {
            *w = self.word_at(base + (k * 64) as i64);
        }
        out.clear_tail();
        out
    }

    /// `extract(lo + shift, len)` relabelled to start at `lo`, so that
    /// `out(c) = self(c + shift)`.
    pub fn shifted(&self, lo: i64, len: usize, shift: i64) -> BitRow {
        let mut out = self.extract(lo + shift, len);
        out.lo = lo;
        out
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    fn check_aligned(&self, other: &BitRow) {
        assert!(
            self.lo == other.lo && self.len == other.len,
            "misaligned rows [{}, {}] and [{}, {}]",
            self.lo,
            self.hi(),
            other.lo,
            other.hi()
        );
    }

    pub fn and_assign(&mut self, other: &BitRow) {
        self.check_aligned(other);
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a &= b);
    }

    pub fn or_assign(&mut self, other: &BitRow) {
        self.check_aligned(other);
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a |= b);
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        self.check_aligned(other);
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a ^= b);
    }

    pub fn andnot_assign(&mut self, other: &BitRow) {
        self.check_aligned(other);
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a &= !b);
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }
}

/// Open-edge masks of one level over a column range.
pub struct RowMasks {
    pub left: BitRow,
    pub right: BitRow,
}

pub fn masks<E: Environment + ?Sized>(env: &E, t: i64, lo: i64, len: usize) -> RowMasks {
    let mut left = BitRow::zeros(lo, len);
    let mut right = BitRow::zeros(lo, len);
    if len > 0 {
        env.fill_row(t, lo, len, left.words_mut(), right.words_mut());
    }
    RowMasks { left, right }
}

/// Transfer a set of sites on level `t` one level up, into the column range
/// `[lo, hi]` of level `t + 1`.
pub fn step_up<E: Environment + ?Sized>(env: &E, cur: &BitRow, t: i64, lo: i64, hi: i64) -> BitRow {
    let len = (hi - lo + 1).max(0) as usize;
    if len == 0 || cur.is_empty() {
        return BitRow::zeros(lo, len);
    }
    // only the occupied stretch of the source row needs edge lookups
    let (a, b) = (cur.min_col().unwrap(), cur.max_col().unwrap());
    let src_lo = a.max(lo - 1);
    let src_hi = b.min(hi + 1);
    if src_lo > src_hi {
        return BitRow::zeros(lo, len);
    }
    let src_len = (src_hi - src_lo + 1) as usize;
    let src = cur.extract(src_lo, src_len);
    let RowMasks {
        mut left,
        mut right,
    } = masks(env, t, src_lo, src_len);
    right.and_assign(&src);
    left.and_assign(&src);
    // next(c) = right(c - 1) | left(c + 1)
    let mut next = right.shifted(lo, len, -1);
    next.or_assign(&left.shifted(lo, len, 1));
    next
}

/// Sites of level `t` in `[lo, hi]` with an open edge into the set `upper` on
/// level `t + 1`.
pub fn step_down<E: Environment + ?Sized>(
    env: &E,
    upper: &BitRow,
    t: i64,
    lo: i64,
    hi: i64,
) -> BitRow {
    let len = (hi - lo + 1).max(0) as usize;
    if len == 0 || upper.is_empty() {
        return BitRow::zeros(lo, len);
    }
    let RowMasks {
        mut left,
        mut right,
    } = masks(env, t, lo, len);
    // cur(c) = right(c) & upper(c + 1) | left(c) & upper(c - 1)
    right.and_assign(&upper.shifted(lo, len, 1));
    left.and_assign(&upper.shifted(lo, len, -1));
    right.or_assign(&left);
    right
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_row_respects_parity() {
        let r = BitRow::full(-3, 70, 1);
        assert!(r.columns().all(|c| (c + 1) % 2 == 0));
        assert_eq!(r.count_ones(), 37);
        assert_eq!(r.min_col(), Some(-3));
        assert_eq!(r.max_col(), Some(69));
        let r = BitRow::full(-3, 70, 0);
        assert_eq!(r.min_col(), Some(-2));
        assert_eq!(r.max_col(), Some(70));
    }

    proptest! {
        #[test]
        fn extract_matches_bitwise(cols in prop::collection::btree_set(-150i64..150, 0..40),
                                   lo in -200i64..200, len in 0usize..300) {
            let row = BitRow::from_columns(-150, 149, cols.iter().copied());
            let ex = row.extract(lo, len);
            for c in lo..lo + len as i64 {
                prop_assert_eq!(ex.get(c), cols.contains(&c));
            }
            prop_assert_eq!(
                ex.columns().collect::<Vec<_>>(),
                cols.iter().copied().filter(|c| *c >= lo && *c < lo + len as i64).collect::<Vec<_>>()
            );
        }
    }
}
