//! Word-packed bit vectors and matrices over GF(2).
//!
//! Every row operation in this crate bottoms out in word-wise XOR and
//! popcount on these types, which is what keeps elimination and tableau
//! updates cheap at a few thousand qubits.

pub const WORD_BITS: usize = 64;

#[inline]
pub const fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Fixed-length bit vector packed into `u64` words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
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
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// GF(2) dot product: parity of the AND of the two vectors.
    #[inline]
    pub fn dot(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Parity of the selected positions of `self` (mask dot outcomes).
    pub fn masked_parity(&self, mask: &BitVec) -> bool {
        self.dot(mask)
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Dense GF(2) matrix, stored row-major as [`BitVec`]s.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BitVec::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVec>) -> Self {
        let cols = rows.first().map_or(0, BitVec::len);
        assert!(rows.iter().all(|r| r.len() == cols));
        Self { rows: rows.len(), cols, data: rows }
    }

    /// Parses lines of `0`/`1` characters, eg. "110\n011".
    pub fn parse(text: &str) -> crate::error::Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut bits = Vec::with_capacity(line.len());
            for ch in line.chars() {
                match ch {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    ' ' | '\t' => {}
                    other => {
                        return Err(crate::Error::Parse {
                            line: lineno + 1,
                            msg: format!("unexpected character {other:?}"),
                        })
                    }
                }
            }
            rows.push(BitVec::from_bools(&bits));
        }
        if rows.is_empty() {
            return Err(crate::Error::Parse { line: 0, msg: "empty matrix".into() });
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(crate::Error::Parse { line: 0, msg: "ragged rows".into() });
        }
        Ok(Self::from_rows(rows))
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r].set(c, v);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.data[r].iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len());
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.data[r].dot(v) {
                out.set(r, true);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut work: Vec<BitVec> = self.data.clone();
        gf2_rank(&mut work)
    }

    /// Row-reduces `self` in place to reduced row-echelon form; returns rank.
    pub fn rref(&mut self) -> usize {
        gf2_rref(&mut self.data)
    }

    /// True if `v` lies in the row space of `self`.
    pub fn row_space_contains(&self, v: &BitVec) -> bool {
        let mut work = self.data.clone();
        let base = gf2_rank(&mut work);
        work.push(v.clone());
        gf2_rank(&mut work) == base
    }

    /// Any solution x of `A x = rhs` over GF(2), free variables set to zero.
    pub fn solve(&self, rhs: &BitVec) -> Option<BitVec> {
        assert_eq!(rhs.len(), self.rows);
        // augmented elimination
        let mut aug: Vec<BitVec> = Vec::with_capacity(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            let mut a = BitVec::zeros(self.cols + 1);
            for c in row.iter_ones() {
                a.set(c, true);
            }
            a.set(self.cols, rhs.get(i));
            aug.push(a);
        }
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            let Some(found) = (pivot_row..aug.len()).find(|&r| aug[r].get(col)) else {
                continue;
            };
            aug.swap(pivot_row, found);
            let pivot = aug[pivot_row].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r != pivot_row && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
            if pivot_row == aug.len() {
                break;
            }
        }
        // inconsistent rows: zero coefficients with nonzero rhs
        for row in aug.iter().skip(pivot_row) {
            if row.get(self.cols) {
                return None;
            }
        }
        let mut x = BitVec::zeros(self.cols);
        for (r, c) in pivots {
            if aug[r].get(self.cols) {
                x.set(c, true);
            }
        }
        Some(x)
    }
}

/// In-place elimination; returns the rank. `rows` end up in echelon form.
pub fn gf2_rank(rows: &mut Vec<BitVec>) -> usize {
    gf2_rref(rows)
}

/// Reduced row echelon form over GF(2); returns the rank.
pub fn gf2_rref(rows: &mut Vec<BitVec>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(found) = (pivot_row..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    pivot_row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_roundtrip() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert!(v.get(0) && v.get(64) && v.get(129));
        assert!(!v.get(1));
        assert_eq!(v.count_ones(), 3);
        v.flip(64);
        assert_eq!(v.count_ones(), 2);
    }

    #[test]
    fn dot_is_parity_of_overlap() {
        let a = BitVec::from_indices(100, &[1, 5, 70]);
        let b = BitVec::from_indices(100, &[5, 70, 99]);
        assert!(!a.dot(&b)); // two overlaps
        let c = BitVec::from_indices(100, &[5]);
        assert!(a.dot(&c));
    }

    #[test]
    fn rref_rank() {
        let mut m = BitMatrix::parse("110\n011\n101").unwrap();
        // row3 = row1 + row2
        assert_eq!(m.rref(), 2);
        assert_eq!(m.rank(), 2);
        assert!(m.row_space_contains(&BitVec::from_bools(&[true, false, true])));
        assert!(!m.row_space_contains(&BitVec::from_bools(&[true, true, true])));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(BitMatrix::parse("10a").is_err());
        assert!(BitMatrix::parse("").is_err());
        assert!(BitMatrix::parse("10\n100").is_err());
    }

    #[test]
    fn identity_mul() {
        let m = BitMatrix::identity(5);
        let v = BitVec::from_indices(5, &[0, 3]);
        assert_eq!(m.mul_vec(&v), v);
    }
}
