use rayon::prelude::*;

use super::{smith, unimodular_inverse, ChainComplex, Coefficients};
use crate::matrix::{IntMatrix, SparseMatrix};
use crate::{Error, Result};

/// Reduction of vectors over F2 against a growing echelon basis; each basis
/// vector remembers which homology generators it stands for.
#[derive(Clone, Debug, Default)]
struct F2Reducer {
    pivots: Vec<(usize, Vec<bool>, Vec<bool>)>,
}

impl F2Reducer {
    fn reduce(&self, v: &mut [bool], tag: &mut [bool]) {
        for (p, vec, t) in &self.pivots {
            if v[*p] {
                for (a, b) in v.iter_mut().zip(vec) {
                    *a ^= b;
                }
                for (a, b) in tag.iter_mut().zip(t) {
                    *a ^= b;
                }
            }
        }
    }

    fn push(&mut self, v: Vec<bool>, tag: Vec<bool>) {
        let p = v.iter().position(|&b| b).expect("nonzero pivot vector");
        self.pivots.push((p, v, tag));
    }
}

#[derive(Clone, Debug)]
enum Projector {
    /// Free coordinates are `proj * c`.
    Integers(IntMatrix),
    F2 { reducer: F2Reducer, rank: usize },
}

/// Generators of the free part of one bigraded piece of homology.
#[derive(Clone, Debug)]
pub struct ClassBlock {
    pub h: i64,
    pub q: i64,
    pub column: usize,
    /// Generators of the column in this quantum degree.
    pub indices: Vec<usize>,
    /// Cycle representatives in block coordinates.
    pub reps: Vec<Vec<i64>>,
    projector: Projector,
}

impl ClassBlock {
    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    /// Free coordinates of the class of a cycle given in block coordinates.
    pub fn project(&self, c: &[i64]) -> Vec<i64> {
        match &self.projector {
            Projector::Integers(p) => p.mul_vec(c),
            Projector::F2 { reducer, rank } => {
                let mut v: Vec<bool> = c.iter().map(|x| x.rem_euclid(2) == 1).collect();
                let mut tag = vec![false; *rank];
                reducer.reduce(&mut v, &mut tag);
                debug_assert!(v.iter().all(|b| !b), "projected vector is not a cycle");
                tag.into_iter().map(i64::from).collect()
            }
        }
    }
}

/// Homology with chosen cycle representatives for the free part, so chain
/// maps can be pushed down to matrices on homology.
#[derive(Clone, Debug)]
pub struct HomologyClasses {
    pub coefficients: Coefficients,
    /// Blocks with positive free rank, sorted by `(h, q)`.
    pub blocks: Vec<ClassBlock>,
    qdeg: Vec<Vec<i64>>,
}

impl HomologyClasses {
    pub fn compute(c: &ChainComplex, coeffs: Coefficients) -> Result<Self> {
        let qs: Vec<i64> = c.quantum_degrees().into_iter().collect();
        let jobs: Vec<(usize, i64)> = (0..c.len()).flat_map(|k| qs.iter().map(move |&q| (k, q))).collect();
        let mut blocks: Vec<ClassBlock> = jobs
            .into_par_iter()
            .map(|(k, q)| block(c, k, q, coeffs))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        blocks.sort_by_key(|b| (b.h, b.q));
        Ok(HomologyClasses { coefficients: coeffs, blocks, qdeg: c.qdeg.clone() })
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(ClassBlock::rank).sum()
    }

    /// `(h, q)` of every generator in order.
    pub fn gradings(&self) -> Vec<(i64, i64)> {
        self.blocks.iter().flat_map(|b| std::iter::repeat_n((b.h, b.q), b.rank())).collect()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut o = Vec::with_capacity(self.blocks.len());
        let mut acc = 0;
        for b in &self.blocks {
            o.push(acc);
            acc += b.rank();
        }
        o
    }

    /// Matrix on homology of a chain map of bidegree `(0, dq)` given by one
    /// sparse matrix per column.
    pub fn induced(&self, map: &[SparseMatrix], dq: i64) -> Result<IntMatrix> {
        self.induced_shifted(map, 0, dq)
    }

    /// Like [`Self::induced`] for a map raising the column by `dh`; `map[k]`
    /// starts at column `k`. Maps that anticommute with the differential are
    /// fine too.
    pub fn induced_shifted(&self, map: &[SparseMatrix], dh: usize, dq: i64) -> Result<IntMatrix> {
        let n = self.rank();
        let offsets = self.offsets();
        let mut out = IntMatrix::zeros(n, n);
        for (bi, b) in self.blocks.iter().enumerate() {
            let Some(m) = map.get(b.column) else { continue };
            let target = self.blocks.iter().position(|t| t.column == b.column + dh && t.q == b.q + dq);
            for (r, rep) in b.reps.iter().enumerate() {
                let mut full = vec![0i64; m.cols];
                for (x, &i) in rep.iter().zip(&b.indices) {
                    full[i] = *x;
                }
                let image = m.mul_vec(&full);
                let want = b.q + dq;
                let degrees = self.qdeg.get(b.column + dh).map_or(&[][..], Vec::as_slice);
                if image.iter().enumerate().any(|(i, &x)| self.nonzero(x) && degrees.get(i) != Some(&want)) {
                    return Err(Error::Consistency("chain map is not homogeneous of the stated degree".into()));
                }
                let Some(ti) = target else { continue };
                let t = &self.blocks[ti];
                let local: Vec<i64> = t.indices.iter().map(|&i| image[i]).collect();
                for (row, x) in t.project(&local).into_iter().enumerate() {
                    let x = if self.coefficients == Coefficients::F2 { x.rem_euclid(2) } else { x };
                    out.set(offsets[ti] + row, offsets[bi] + r, x);
                }
            }
        }
        Ok(out)
    }

    fn nonzero(&self, x: i64) -> bool {
        match self.coefficients {
            Coefficients::Integers => x != 0,
            Coefficients::F2 => x.rem_euclid(2) != 0,
        }
    }
}

fn block(c: &ChainComplex, k: usize, q: i64, coeffs: Coefficients) -> Result<Option<ClassBlock>> {
    let indices = c.indices(k, q);
    let n = indices.len();
    if n == 0 {
        return Ok(None);
    }
    let d_out = c.block(k, q);
    let d_in = if k > 0 { c.block(k - 1, q) } else { IntMatrix::zeros(n, 0) };
    let h = c.h_min + k as i64;
    let (reps, projector) = match coeffs {
        Coefficients::Integers => integer_block(&d_out, &d_in, n)?,
        Coefficients::F2 => f2_block(&d_out, &d_in, n),
    };
    if reps.is_empty() {
        return Ok(None);
    }
    Ok(Some(ClassBlock { h, q, column: k, indices, reps, projector }))
}

fn integer_block(d_out: &IntMatrix, d_in: &IntMatrix, n: usize) -> Result<(Vec<Vec<i64>>, Projector)> {
    // Kernel of d_out: the last columns of V in U d_out V = D.
    let (r1, v1) = if d_out.rows() == 0 {
        (0, IntMatrix::identity(n))
    } else {
        let s = smith(d_out, true)?;
        (s.rank(), s.v.unwrap())
    };
    let v1inv = unimodular_inverse(&v1)?.ok_or_else(|| Error::Consistency("smith transform is not invertible".into()))?;
    let z = n - r1;
    let kernel_rows: Vec<usize> = (r1..n).collect();
    let all_cols: Vec<usize> = (0..n).collect();
    let to_kernel = v1inv.select(&kernel_rows, &all_cols);
    let kernel = v1.select(&all_cols, &kernel_rows);
    // Boundaries in kernel coordinates.
    let b = to_kernel.mul(d_in);
    let (r2, u2) = if b.cols() == 0 || z == 0 {
        (0, IntMatrix::identity(z))
    } else {
        let s = smith(&b, true)?;
        (s.rank(), s.u.unwrap())
    };
    let u2inv = unimodular_inverse(&u2)?.ok_or_else(|| Error::Consistency("smith transform is not invertible".into()))?;
    let free_rows: Vec<usize> = (r2..z).collect();
    let proj = u2.select(&free_rows, &(0..z).collect::<Vec<_>>()).mul(&to_kernel);
    let reps: Vec<Vec<i64>> = free_rows.iter().map(|&j| kernel.mul_vec(&u2inv.column(j))).collect();
    Ok((reps, Projector::Integers(proj)))
}

fn f2_block(d_out: &IntMatrix, d_in: &IntMatrix, n: usize) -> (Vec<Vec<i64>>, Projector) {
    let kernel: Vec<Vec<bool>> = if d_out.rows() == 0 {
        (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect()
    } else {
        d_out.mod2().kernel()
    };
    let mut red = F2Reducer::default();
    let dim = kernel.len();
    for j in 0..d_in.cols() {
        let mut v: Vec<bool> = d_in.column(j).iter().map(|x| x.rem_euclid(2) == 1).collect();
        let mut tag = vec![false; dim];
        red.reduce(&mut v, &mut tag);
        if v.iter().any(|&b| b) {
            red.push(v, vec![false; dim]);
        }
    }
    let mut reps = Vec::new();
    for z in kernel {
        let mut v = z;
        let mut tag = vec![false; dim];
        red.reduce(&mut v, &mut tag);
        if v.iter().any(|&b| b) {
            let mut t = vec![false; dim];
            t[reps.len()] = true;
            reps.push(v.iter().map(|&b| i64::from(b)).collect());
            red.push(v, t);
        }
    }
    let rank = reps.len();
    for p in red.pivots.iter_mut() {
        p.2.truncate(rank);
    }
    (reps, Projector::F2 { reducer: red, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::homology;

    /// Z^2 -> Z^2 by diag(1, 0) next to Z --3--> Z.
    fn sample() -> ChainComplex {
        let mut d = SparseMatrix::new(3, 3);
        d.push(0, 0, 1);
        d.push(2, 2, 3);
        ChainComplex { h_min: 0, qdeg: vec![vec![0, 0, 2], vec![0, 0, 2]], d: vec![d] }
    }

    #[test]
    fn ranks_match_homology() {
        for coeffs in [Coefficients::Integers, Coefficients::F2] {
            let c = if coeffs == Coefficients::F2 { sample().reduce_mod2() } else { sample() };
            let classes = HomologyClasses::compute(&c, coeffs).unwrap();
            let h = homology(&c, coeffs).unwrap();
            assert_eq!(classes.rank(), h.total_rank());
        }
    }

    #[test]
    fn identity_induces_identity() {
        let c = sample();
        let classes = HomologyClasses::compute(&c, Coefficients::Integers).unwrap();
        let id: Vec<SparseMatrix> = c
            .qdeg
            .iter()
            .map(|g| {
                let mut m = SparseMatrix::new(g.len(), g.len());
                for i in 0..g.len() {
                    m.push(i, i, 1);
                }
                m
            })
            .collect();
        assert!(classes.induced(&id, 0).unwrap().is_identity());
    }
}
