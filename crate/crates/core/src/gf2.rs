//! Dense matrices over GF(2).
//!
//! Rows are packed into `u64` words, column `j` living in bit `j % 64` of word
//! `j / 64`. Row 0 is the most significant signal level throughout the crate,
//! so the shift matrix moves bits towards higher row indices.

use std::fmt;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

const WORD_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(WORD_BITS);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// The `q x q` matrix `S^k`: ones at `(i, j)` with `i = j + k`.
    ///
    /// Applied to a column vector it pushes every level `k` places towards the
    /// least significant end and zero-fills the top; `k >= q` gives zero.
    pub fn shift(q: usize, k: usize) -> Self {
        let mut m = Self::zeros(q, q);
        for j in 0..q.saturating_sub(k) {
            m.set(j + k, j, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(i, j, true),
                    other => {
                        return Err(Error::Domain(format!(
                            "entry ({i}, {j}) is {other}, not a bit"
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    /// Uniform random bits from ChaCha8 seeded via `seed_from_u64(seed)`.
    ///
    /// Each row consumes `ceil(cols / 64)` successive `next_u64` outputs, low
    /// bits first, with the unused high bits of the last word discarded.
    pub fn random(rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_from(rows, cols, &mut rng)
    }

    pub fn random_from<R: RngCore + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        let tail = m.tail_mask();
        for r in 0..rows {
            let row = m.row_words_mut(r);
            for w in row.iter_mut() {
                *w = rng.next_u64();
            }
            if let Some(last) = row.last_mut() {
                *last &= tail;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(
            r < self.rows && c < self.cols,
            "entry ({r}, {c}) out of bounds"
        );
        self.words[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(
            r < self.rows && c < self.cols,
            "entry ({r}, {c}) out of bounds"
        );
        let w = &mut self.words[r * self.stride + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn tail_mask(&self) -> u64 {
        match self.cols % WORD_BITS {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// Rank over GF(2), by Gaussian elimination on a copy of the rows.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|r| self.row_words(r).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let (w, bit) = (c / WORD_BITS, 1u64 << (c % WORD_BITS));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let (top, rest) = rows.split_at_mut(rank + 1);
            let pivot = &top[rank];
            for row in rest.iter_mut().filter(|row| row[w] & bit != 0) {
                // words before `w` are already zero in both rows
                for (x, y) in row[w..].iter_mut().zip(&pivot[w..]) {
                    *x ^= y;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (wi, &word) in self.row_words(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let k = wi * WORD_BITS + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let src = other.row_words(k);
                    for (x, y) in out.words[i * out.stride..(i + 1) * out.stride]
                        .iter_mut()
                        .zip(src)
                    {
                        *x ^= y;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Entrywise XOR.
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &BitMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        for (x, y) in self.words.iter_mut().zip(&other.words) {
            *x ^= y;
        }
        Ok(())
    }

    /// Matrix-vector product for a bit vector given as booleans.
    pub fn apply(&self, v: &[bool]) -> Result<Vec<bool>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| v[c] && self.get(r, c)).count() % 2 == 1)
            .collect())
    }

    /// Lays out a grid of blocks; `None` stands for an all-zero block.
    pub fn block_assemble(
        blocks: &[Vec<Option<&BitMatrix>>],
        row_dims: &[usize],
        col_dims: &[usize],
    ) -> Result<BitMatrix> {
        if blocks.len() != row_dims.len() {
            return Err(Error::Dimension(format!(
                "{} block rows but {} row dimensions",
                blocks.len(),
                row_dims.len()
            )));
        }
        let rows = row_dims.iter().sum();
        let cols = col_dims.iter().sum();
        let mut out = BitMatrix::zeros(rows, cols);
        let mut r0 = 0;
        for (bi, (brow, &rd)) in blocks.iter().zip(row_dims).enumerate() {
            if brow.len() != col_dims.len() {
                return Err(Error::Dimension(format!(
                    "block row {bi} has {} blocks, expected {}",
                    brow.len(),
                    col_dims.len()
                )));
            }
            let mut c0 = 0;
            for (bj, (block, &cd)) in brow.iter().zip(col_dims).enumerate() {
                if let Some(b) = block {
                    if b.rows != rd || b.cols != cd {
                        return Err(Error::Dimension(format!(
                            "block ({bi}, {bj}) is {}x{}, expected {rd}x{cd}",
                            b.rows, b.cols
                        )));
                    }
                    out.paste(b, r0, c0);
                }
                c0 += cd;
            }
            r0 += rd;
        }
        Ok(out)
    }

    fn paste(&mut self, block: &BitMatrix, r0: usize, c0: usize) {
        for r in 0..block.rows {
            for (wi, &word) in block.row_words(r).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let c = wi * WORD_BITS + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    self.set(r0 + r, c0 + c, true);
                }
            }
        }
    }

    /// `I_k ⊗ self`: `k` copies of `self` along the diagonal.
    pub fn block_diagonal_repeat(&self, k: usize) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * k, self.cols * k);
        for t in 0..k {
            out.paste(self, t * self.rows, t * self.cols);
        }
        out
    }

    /// The submatrix on the given row and column indices, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Rank as log2 of the number of distinct vectors in the row span.
    fn span_rank(m: &BitMatrix) -> usize {
        let rows: Vec<u64> = (0..m.rows())
            .map(|r| (0..m.cols()).fold(0u64, |acc, c| acc | (u64::from(m.get(r, c)) << c)))
            .collect();
        let mut span = std::collections::HashSet::new();
        for subset in 0u32..(1 << rows.len()) {
            let v = rows
                .iter()
                .enumerate()
                .filter(|(i, _)| subset >> i & 1 == 1)
                .fold(0u64, |acc, (_, &r)| acc ^ r);
            span.insert(v);
        }
        span.len().trailing_zeros() as usize
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = BitMatrix> {
        (0..=max, 0..=max, any::<u64>()).prop_map(|(r, c, s)| BitMatrix::random(r, c, s))
    }

    #[test]
    fn shift_zero_is_identity() {
        assert_eq!(BitMatrix::shift(3, 0), BitMatrix::identity(3));
    }

    #[test]
    fn shift_entries() {
        let s = BitMatrix::shift(5, 3);
        assert_eq!(s.count_ones(), 2);
        assert!(s.get(3, 0) && s.get(4, 1));
        assert!(BitMatrix::shift(4, 4).is_zero());
        assert!(BitMatrix::shift(4, 9).is_zero());
    }

    #[test]
    fn shift_applied_to_column() {
        let y = BitMatrix::shift(4, 2)
            .apply(&[true, false, true, true])
            .unwrap();
        assert_eq!(y, vec![false, false, true, false]);
    }

    #[test]
    fn shift_rank() {
        for q in 1..=9 {
            assert_eq!(BitMatrix::identity(q).rank(), q);
            for n in 0..=q {
                assert_eq!(BitMatrix::shift(q, q - n).rank(), n);
            }
        }
    }

    #[test]
    fn mul_examples() {
        let b = BitMatrix::random(6, 4, 11);
        assert_eq!(BitMatrix::identity(6).mul(&b).unwrap(), b);
        let s = BitMatrix::shift(5, 1);
        assert_eq!(s.mul(&s).unwrap(), BitMatrix::shift(5, 2));
        let col = BitMatrix::from_rows(&[[1u8], [1]]).unwrap();
        let out = BitMatrix::shift(2, 1).mul(&col).unwrap();
        assert_eq!(out, BitMatrix::from_rows(&[[0u8], [1]]).unwrap());
        assert!(matches!(s.mul(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn add_examples() {
        let a = BitMatrix::random(7, 9, 3);
        assert!(a.add(&a).unwrap().is_zero());
        assert_eq!(a.add(&BitMatrix::zeros(7, 9)).unwrap(), a);
        let x = BitMatrix::from_rows(&[[1u8], [1]]).unwrap();
        let y = BitMatrix::from_rows(&[[0u8], [1]]).unwrap();
        assert_eq!(
            x.add(&y).unwrap(),
            BitMatrix::from_rows(&[[1u8], [0]]).unwrap()
        );
        assert!(a.add(&x).is_err());
    }

    #[test]
    fn block_assemble_examples() {
        let a = BitMatrix::random(3, 3, 5);
        assert_eq!(
            BitMatrix::block_assemble(&[vec![Some(&a)]], &[3], &[3]).unwrap(),
            a
        );

        let b = BitMatrix::random(3, 3, 6);
        let stack =
            BitMatrix::block_assemble(&[vec![Some(&a)], vec![Some(&b)]], &[3, 3], &[3]).unwrap();
        assert_eq!((stack.rows(), stack.cols()), (6, 3));
        assert_eq!(stack.select(&[3, 4, 5], &[0, 1, 2]), b);

        let empty =
            BitMatrix::block_assemble(&[vec![None, None], vec![None, None]], &[2, 3], &[4, 1])
                .unwrap();
        assert_eq!(empty, BitMatrix::zeros(5, 5));

        let bad = BitMatrix::block_assemble(&[vec![Some(&a)]], &[2], &[3]);
        assert!(matches!(bad, Err(Error::Dimension(_))));
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(BitMatrix::random(20, 70, 42), BitMatrix::random(20, 70, 42));
        assert_ne!(BitMatrix::random(20, 70, 42), BitMatrix::random(20, 70, 43));
        let e = BitMatrix::random(0, 5, 1);
        assert_eq!((e.rows(), e.cols()), (0, 5));
        assert_eq!(e.rank(), 0);
    }

    #[test]
    fn random_rank_regression() {
        // frozen against the ChaCha8 stream
        assert_eq!(BitMatrix::random(64, 64, 0).rank(), 63);
        assert_eq!(BitMatrix::random(64, 64, 1).rank(), 62);
    }

    #[test]
    fn wide_rows_span_words() {
        let mut m = BitMatrix::zeros(3, 130);
        m.set(0, 129, true);
        m.set(1, 64, true);
        m.set(2, 129, true);
        m.set(2, 64, true);
        assert_eq!(m.rank(), 2);
        assert_eq!(BitMatrix::identity(200).rank(), 200);
    }

    #[test]
    fn from_rows_rejects_non_bits() {
        assert!(matches!(
            BitMatrix::from_rows(&[[0u8, 2]]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            BitMatrix::from_rows(&[vec![0u8, 1], vec![1]]),
            Err(Error::Dimension(_))
        ));
    }

    proptest! {
        #[test]
        fn rank_matches_span_oracle(m in arb_matrix(12)) {
            prop_assert_eq!(m.rank(), span_rank(&m));
        }

        #[test]
        fn rank_of_product_bounded(a in arb_matrix(16), s in any::<u64>(), c in 0usize..16) {
            let b = BitMatrix::random(a.cols(), c, s);
            let p = a.mul(&b).unwrap();
            prop_assert!(p.rank() <= a.rank().min(b.rank()));
        }

        #[test]
        fn rank_of_block_diagonal_adds(a in arb_matrix(10), b in arb_matrix(10)) {
            let d = BitMatrix::block_assemble(
                &[vec![Some(&a), None], vec![None, Some(&b)]],
                &[a.rows(), b.rows()],
                &[a.cols(), b.cols()],
            ).unwrap();
            prop_assert_eq!(d.rank(), a.rank() + b.rank());
        }

        #[test]
        fn shifts_compose((q, j, k) in (1usize..20).prop_flat_map(|q| (Just(q), 0..=q)).prop_flat_map(|(q, j)| (Just(q), Just(j), 0..=q - j))) {
            let p = BitMatrix::shift(q, j).mul(&BitMatrix::shift(q, k)).unwrap();
            prop_assert_eq!(p, BitMatrix::shift(q, j + k));
        }

        #[test]
        fn add_is_involution(a in arb_matrix(70), s in any::<u64>()) {
            let b = BitMatrix::random(a.rows(), a.cols(), s);
            prop_assert_eq!(a.add(&b).unwrap().add(&b).unwrap(), a);
        }

        #[test]
        fn rank_bounded_by_shape(m in arb_matrix(80)) {
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
        }
    }
}
