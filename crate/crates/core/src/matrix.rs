//! Dense and sparse integer matrices, and dense matrices over F2.

use std::fmt;

use serde::Serialize;

/// A dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == i64::from(i == j)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Matrix product; panics on dimension mismatch or overflow.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        self.checked_mul(other).expect("integer matrix product overflowed")
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Option<IntMatrix> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = out.get(i, j).checked_add(a.checked_mul(b)?)?;
                        out.set(i, j, v);
                    }
                }
            }
        }
        Some(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: i64) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mod2(&self) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j).rem_euclid(2) == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let mut s = SparseMatrix::new(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if v != 0 {
                    s.push(i, j, v);
                }
            }
        }
        s
    }
}

/// A sparse integer matrix as a list of nonzero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: i64) {
        debug_assert!(i < self.rows && j < self.cols);
        if v != 0 {
            self.entries.push((i, j, v));
        }
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols);
        for &(i, j, v) in &self.entries {
            m.add_to(i, j, v);
        }
        m
    }

    /// Dense submatrix on selected rows and columns.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut ri = vec![usize::MAX; self.rows];
        let mut ci = vec![usize::MAX; self.cols];
        for (a, &i) in rows.iter().enumerate() {
            ri[i] = a;
        }
        for (b, &j) in cols.iter().enumerate() {
            ci[j] = b;
        }
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for &(i, j, v) in &self.entries {
            if ri[i] != usize::MAX && ci[j] != usize::MAX {
                m.add_to(ri[i], ci[j], v);
            }
        }
        m
    }

    /// Entries with duplicates summed and zeros dropped, sorted by position.
    pub fn compact(&self) -> SparseMatrix {
        let mut acc: std::collections::BTreeMap<(usize, usize), i64> = std::collections::BTreeMap::new();
        for &(i, j, v) in &self.entries {
            *acc.entry((i, j)).or_default() += v;
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: acc.into_iter().filter(|&(_, v)| v != 0).map(|((i, j), v)| (i, j, v)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.compact().entries.is_empty()
    }

    /// Entries reduced mod 2 (kept as 0/1 integers).
    pub fn mod2(&self) -> SparseMatrix {
        let mut c = self.compact();
        c.entries.retain_mut(|e| {
            e.2 = e.2.rem_euclid(2);
            e.2 != 0
        });
        c
    }

    /// `self * other`, compacted.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); other.rows];
        for &(k, j, x) in &other.entries {
            by_row[k].push((j, x));
        }
        let mut out = SparseMatrix::new(self.rows, other.cols);
        for &(i, k, x) in &self.entries {
            for &(j, y) in &by_row[k] {
                out.entries.push((i, j, x * y));
            }
        }
        out.compact()
    }

    /// `self - other`, compacted.
    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        out.entries.extend(other.entries.iter().map(|&(i, j, x)| (i, j, -x)));
        out.compact()
    }

    /// `self * v`
    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0; self.rows];
        for &(i, j, x) in &self.entries {
            out[i] += x * v[j];
        }
        out
    }
}

/// A dense matrix over F2 with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let s: String = (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        F2Matrix { rows, cols, words, bits: vec![0; rows * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn xor_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        for k in 0..w {
            let s = self.bits[src * w + k];
            self.bits[dst * w + k] ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            let w = self.words;
            for k in 0..w {
                self.bits.swap(a * w + k, b * w + k);
            }
        }
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn mul(&self, o: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, o.rows);
        let mut out = F2Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    for w in 0..o.words.min(out.words) {
                        out.bits[i * out.words + w] ^= o.bits[k * o.words + w];
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[bool]) -> Vec<bool> {
        (0..self.rows).map(|i| (0..self.cols).filter(|&j| self.get(i, j) && v[j]).count() % 2 == 1).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Row echelon form in place; returns pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else { continue };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().len()
    }

    /// Basis of the kernel, as column vectors.
    pub fn kernel(&self) -> Vec<Vec<bool>> {
        let mut m = self.clone();
        let pivots = m.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![false; self.cols];
                v[f] = true;
                for (r, &p) in pivots.iter().enumerate() {
                    if m.get(r, f) {
                        v[p] = true;
                    }
                }
                v
            })
            .collect()
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(rows: usize, cols: &[Vec<bool>]) -> F2Matrix {
        let mut m = F2Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &b) in c.iter().enumerate() {
                if b {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<bool> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2_rank_and_kernel() {
        let m = IntMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).mod2();
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|&b| !b));
    }

    #[test]
    fn sparse_block() {
        let m = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        let s = m.to_sparse();
        assert_eq!(s.block(&[1], &[0, 1]), IntMatrix::from_rows(&[vec![3, 4]]));
        assert_eq!(s.to_dense(), m);
    }
}
