//! Word-packed bit-vectors and GF(2) elimination.

use std::fmt;

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length bit-vector stored in 64-bit words, bit `i` of the vector
/// living at bit `i % 64` of word `i / 64`. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitMask {
    words: Vec<u64>,
    len: usize,
}

impl BitMask {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut m = Self {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        m.clear_tail();
        m
    }

    /// Mask with bits `range` set.
    pub fn range(len: usize, range: std::ops::Range<usize>) -> Self {
        let mut m = Self::zeros(len);
        for i in range {
            m.set(i, true);
        }
        m
    }

    pub fn from_sites<I: IntoIterator<Item = usize>>(len: usize, sites: I) -> Self {
        let mut m = Self::zeros(len);
        for s in sites {
            m.set(s, true);
        }
        m
    }

    pub fn from_words(len: usize, words: Vec<u64>) -> Self {
        assert_eq!(
            words.len(),
            words_for(len),
            "word count does not match length"
        );
        let mut m = Self { words, len };
        m.clear_tail();
        m
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// True when no bit is set.
    #[inline]
    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn any(&self) -> bool {
        !self.none()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn and(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn and_not(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn or_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn and_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Parity of the popcount of `self & other`.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "bit-vector lengths differ");
        Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            len: self.len,
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Rank over GF(2) of the given word-packed rows. The rows are used as
/// scratch space and left in a partially reduced state.
pub fn rank_in_place(rows: &mut [Vec<u64>]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let (head, tail) = rows.split_at_mut(i + 1);
        let pivot = &head[i];
        let Some(w) = pivot.iter().position(|&x| x != 0) else {
            continue;
        };
        let bit = pivot[w] & pivot[w].wrapping_neg();
        rank += 1;
        for row in tail.iter_mut() {
            if row[w] & bit != 0 {
                for (a, b) in row[w..].iter_mut().zip(&pivot[w..]) {
                    *a ^= b;
                }
            }
        }
    }
    rank
}

/// Rank over GF(2) of a set of rows given as bit-vectors.
pub fn rank<'a, I>(rows: I) -> usize
where
    I: IntoIterator<Item = &'a BitMask>,
{
    let mut scratch: Vec<Vec<u64>> = rows.into_iter().map(|r| r.words.clone()).collect();
    rank_in_place(&mut scratch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn set_get_and_count() {
        let mut m = BitMask::zeros(130);
        m.set(0, true);
        m.set(64, true);
        m.set(129, true);
        assert!(m.get(129) && m.get(64) && !m.get(1));
        assert_eq!(m.count_ones(), 3);
        assert_eq!(m.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        m.set(64, false);
        assert_eq!(m.count_ones(), 2);
    }

    #[test]
    fn ones_has_clean_tail() {
        let m = BitMask::ones(70);
        assert_eq!(m.count_ones(), 70);
        assert_eq!(m.words()[1], (1 << 6) - 1);
    }

    #[test]
    fn rank_of_small_matrices() {
        let rows = [
            BitMask::from_sites(4, [0, 1]),
            BitMask::from_sites(4, [1, 2]),
            BitMask::from_sites(4, [0, 2]),
        ];
        assert_eq!(rank(&rows), 2);
        let eye: Vec<_> = (0..100).map(|i| BitMask::from_sites(100, [i])).collect();
        assert_eq!(rank(&eye), 100);
        assert_eq!(rank(&[BitMask::zeros(10)]), 0);
    }

    fn naive_rank(mut m: Vec<Vec<bool>>) -> usize {
        let cols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            if let Some(p) = (r..m.len()).find(|&i| m[i][c]) {
                m.swap(r, p);
                for i in 0..m.len() {
                    if i != r && m[i][c] {
                        for j in 0..cols {
                            let v = m[r][j];
                            m[i][j] ^= v;
                        }
                    }
                }
                r += 1;
            }
        }
        r
    }

    proptest! {
        #[test]
        fn rank_matches_dense_elimination(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 70), 1..20)) {
            let packed: Vec<_> = rows
                .iter()
                .map(|r| BitMask::from_sites(70, r.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)))
                .collect();
            prop_assert_eq!(rank(&packed), naive_rank(rows));
        }
    }
}
