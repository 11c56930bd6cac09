//! Dense linear algebra over GF(2).
//!
//! Vectors are packed into `u64` words. [`EchelonBasis`] keeps a reduced set of
//! pivot rows so that membership and independence tests cost one reduction pass.

use std::fmt;

/// Packed bit vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for i in ones {
            v.toggle(i);
        }
        v
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
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Parity of the bitwise AND with `other`.
    #[inline]
    /// XOR raw words into the front of the vector.
    pub fn xor_words(&mut self, words: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let bit = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(k * 64 + bit)
                }
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVec({s})")
    }
}

/// Incrementally built row-echelon basis.
///
/// Each stored row has a distinct pivot (its lowest set bit) and no other
/// stored row has that bit set below it, so `reduce` is a single sweep.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    // pivot column -> row index
    pivot_of: Vec<Option<usize>>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        EchelonBasis { len, rows: Vec::new(), pivots: Vec::new(), pivot_of: vec![None; len] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis in place; returns the residual.
    pub fn reduce(&self, v: &mut BitVec) {
        while let Some(p) = first_pivot_hit(v, &self.pivot_of) {
            let r = self.pivot_of[p].expect("pivot present");
            v.xor_assign(&self.rows[r]);
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Insert `v`; returns `true` when it was independent of the basis.
    pub fn insert(&mut self, v: BitVec) -> bool {
        debug_assert_eq!(v.len(), self.len);
        let mut w = v;
        self.reduce(&mut w);
        match w.first_one() {
            None => false,
            Some(p) => {
                self.pivot_of[p] = Some(self.rows.len());
                self.pivots.push(p);
                self.rows.push(w);
                true
            }
        }
    }
}

// Lowest set bit of `v` that is a pivot column, if any.
fn first_pivot_hit(v: &BitVec, pivot_of: &[Option<usize>]) -> Option<usize> {
    v.ones().find(|&i| pivot_of[i].is_some())
}

/// Rank of a list of equal-length vectors.
pub fn rank(rows: &[BitVec]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut basis = EchelonBasis::new(first.len());
    rows.iter().filter(|r| basis.insert((*r).clone())).count()
}

/// Determinant of a square matrix over GF(2).
pub fn det(rows: &[BitVec]) -> bool {
    rows.iter().all(|r| r.len() == rows.len()) && rank(rows) == rows.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_ops() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(129, true);
        v.toggle(64);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.count_ones(), 3);
        let w = BitVec::from_indices(130, [64, 100]);
        assert!(v.dot(&w));
        v.xor_assign(&w);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 100, 129]);
    }

    #[test]
    fn echelon_detects_dependence() {
        let a = BitVec::from_indices(5, [0, 1]);
        let b = BitVec::from_indices(5, [1, 2]);
        let c = BitVec::from_indices(5, [0, 2]);
        let mut basis = EchelonBasis::new(5);
        assert!(basis.insert(a));
        assert!(basis.insert(b));
        assert!(!basis.insert(c.clone()));
        assert!(basis.contains(&c));
        assert_eq!(basis.rank(), 2);
    }

    #[test]
    fn symplectic_matrix_is_nonsingular() {
        let j = vec![
            BitVec::from_indices(4, [1]),
            BitVec::from_indices(4, [0]),
            BitVec::from_indices(4, [3]),
            BitVec::from_indices(4, [2]),
        ];
        assert!(det(&j));
        let singular = vec![BitVec::from_indices(2, [0, 1]), BitVec::from_indices(2, [0, 1])];
        assert!(!det(&singular));
    }
}
