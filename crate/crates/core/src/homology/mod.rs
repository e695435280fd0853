//! Integer and mod 2 homology of graded chain complexes, Laurent polynomials
//! and the Kuperberg bracket.

mod bracket;
mod classes;
mod laurent;
mod snf;

pub use classes::{ClassBlock, HomologyClasses};
pub use bracket::{kuperberg_bracket, web_bracket, web_bracket_with, BracketOrder};
pub use laurent::LaurentPoly;
pub use snf::{is_unimodular, smith, unimodular_inverse, Snf};

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::{IntMatrix, SparseMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coefficients {
    #[serde(rename = "Z")]
    Integers,
    #[serde(rename = "F2")]
    F2,
}

/// A cochain complex of free graded abelian groups: the differential raises
/// the homological degree by one and preserves the quantum degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChainComplex {
    pub h_min: i64,
    /// Quantum degree of each generator, per homological degree.
    pub qdeg: Vec<Vec<i64>>,
    /// `d[k]` maps degree `h_min + k` to `h_min + k + 1`.
    pub d: Vec<SparseMatrix>,
}

impl ChainComplex {
    pub fn len(&self) -> usize {
        self.qdeg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qdeg.is_empty()
    }

    /// Differential out of column `k`, or a zero map past the end.
    pub fn differential(&self, k: usize) -> SparseMatrix {
        if k < self.d.len() {
            self.d[k].clone()
        } else {
            let next = self.qdeg.get(k + 1).map_or(0, Vec::len);
            SparseMatrix::new(next, self.qdeg.get(k).map_or(0, Vec::len))
        }
    }

    pub fn quantum_degrees(&self) -> BTreeSet<i64> {
        self.qdeg.iter().flatten().copied().collect()
    }

    /// Generator indices of quantum degree `q` in column `k`.
    pub fn indices(&self, k: usize, q: i64) -> Vec<usize> {
        self.qdeg.get(k).map_or_else(Vec::new, |g| (0..g.len()).filter(|&i| g[i] == q).collect())
    }

    /// Dense block of `d[k]` between generators of quantum degree `q`.
    pub fn block(&self, k: usize, q: i64) -> IntMatrix {
        let cols = self.indices(k, q);
        let rows = self.indices(k + 1, q);
        self.differential(k).block(&rows, &cols)
    }

    /// The same complex with every differential reduced mod 2.
    pub fn reduce_mod2(&self) -> ChainComplex {
        ChainComplex { h_min: self.h_min, qdeg: self.qdeg.clone(), d: self.d.iter().map(SparseMatrix::mod2).collect() }
    }

    /// Check that `d` preserves quantum degree and `d∘d = 0`.
    pub fn check(&self) -> Result<()> {
        self.check_over(Coefficients::Integers)
    }

    /// [`Self::check`] with `d∘d` computed in the given coefficients.
    pub fn check_over(&self, coeffs: Coefficients) -> Result<()> {
        for (k, dk) in self.d.iter().enumerate() {
            for &(i, j, _) in &dk.entries {
                if self.qdeg[k + 1][i] != self.qdeg[k][j] {
                    return Err(Error::Consistency(format!("differential at h = {} changes quantum degree", self.h_min + k as i64)));
                }
            }
        }
        let bad = (0..self.d.len().saturating_sub(1)).into_par_iter().find_first(|&k| {
            let dd = self.d[k + 1].mul(&self.d[k]);
            match coeffs {
                Coefficients::Integers => !dd.entries.is_empty(),
                Coefficients::F2 => !dd.mod2().entries.is_empty(),
            }
        });
        match bad {
            Some(k) => Err(Error::Consistency(format!("d∘d is nonzero at h = {}", self.h_min + k as i64))),
            None => Ok(()),
        }
    }

    /// Graded Euler characteristic of the chain groups.
    pub fn euler_characteristic(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (k, g) in self.qdeg.iter().enumerate() {
            let sign = if (self.h_min + k as i64) % 2 == 0 { 1 } else { -1 };
            for &q in g {
                p.add_term(sign, q);
            }
        }
        p
    }
}

/// One bigraded piece of homology.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub h: i64,
    pub q: i64,
    pub free: usize,
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Homology {
    pub coefficients: Coefficients,
    /// Nonzero groups, sorted by `(h, q)`.
    pub groups: Vec<HomologyGroup>,
}

impl Homology {
    pub fn total_rank(&self) -> usize {
        self.groups.iter().map(|g| g.free).sum()
    }

    pub fn has_torsion(&self) -> bool {
        self.groups.iter().any(|g| !g.torsion.is_empty())
    }

    /// Free rank in each bidegree.
    pub fn ranks(&self) -> BTreeMap<(i64, i64), usize> {
        self.groups.iter().filter(|g| g.free > 0).map(|g| ((g.h, g.q), g.free)).collect()
    }

    /// Free rank per quantum degree, summed over `h`.
    pub fn quantum_ranks(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for g in &self.groups {
            if g.free > 0 {
                *m.entry(g.q).or_insert(0) += g.free;
            }
        }
        m
    }

    pub fn euler_characteristic(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for g in &self.groups {
            p.add_term(if g.h % 2 == 0 { 1 } else { -1 } * g.free as i64, g.q);
        }
        p
    }

    /// Shift every group by `(dh, dq)`.
    pub fn shifted(&self, dh: i64, dq: i64) -> Homology {
        Homology {
            coefficients: self.coefficients,
            groups: self.groups.iter().map(|g| HomologyGroup { h: g.h + dh, q: g.q + dq, ..g.clone() }).collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.groups).expect("homology serializes")
    }
}

/// Shift homology so the lowest homological degree is 0 and the quantum
/// degrees move by a multiple of 4 to put the lowest one in `0..4`.
pub fn normalize_relative(h: &Homology) -> Homology {
    let Some(h_min) = h.groups.iter().map(|g| g.h).min() else {
        return h.clone();
    };
    let q_min = h.groups.iter().map(|g| g.q).min().unwrap();
    h.shifted(-h_min, -4 * q_min.div_euclid(4))
}

/// Homology of a complex, split by quantum degree.
pub fn homology(c: &ChainComplex, coeffs: Coefficients) -> Result<Homology> {
    let n = c.len();
    let qs: Vec<i64> = c.quantum_degrees().into_iter().collect();
    // Rank and torsion of each block of the differential.
    let jobs: Vec<(usize, i64)> = (0..n).flat_map(|k| qs.iter().map(move |&q| (k, q))).collect();
    let blocks: Vec<((usize, i64), (usize, Vec<u64>))> = jobs
        .into_par_iter()
        .map(|(k, q)| {
            let b = c.block(k, q);
            let r = if b.rows() == 0 || b.cols() == 0 {
                (0, Vec::new())
            } else {
                match coeffs {
                    Coefficients::Integers => {
                        let s = smith(&b, false)?;
                        (s.rank(), s.torsion())
                    }
                    Coefficients::F2 => (b.mod2().rank(), Vec::new()),
                }
            };
            Ok(((k, q), r))
        })
        .collect::<Result<_>>()?;
    let info: BTreeMap<(usize, i64), (usize, Vec<u64>)> = blocks.into_iter().collect();
    let mut groups = Vec::new();
    for k in 0..n {
        for &q in &qs {
            let dim = c.indices(k, q).len();
            let out_rank = info[&(k, q)].0;
            let (in_rank, torsion) = if k > 0 { info[&(k - 1, q)].clone() } else { (0, Vec::new()) };
            let free = dim - out_rank - in_rank;
            if free > 0 || !torsion.is_empty() {
                groups.push(HomologyGroup { h: c.h_min + k as i64, q, free, torsion });
            }
        }
    }
    groups.sort();
    Ok(Homology { coefficients: coeffs, groups })
}

/// Count of even invariant factors, i.e. the F2-dimension of `T ⊗ F2`.
pub fn even_torsion(t: &[u64]) -> usize {
    t.iter().filter(|&&d| d % 2 == 0).count()
}

/// Check the universal coefficient theorem: for a cochain complex of free
/// groups, `dim H^h(C ⊗ F2) = free_h + t2_h + t2_{h+1}`.
pub fn universal_coefficients_hold(z: &Homology, f2: &Homology) -> bool {
    let mut expect: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for g in &z.groups {
        *expect.entry((g.h, g.q)).or_default() += g.free + even_torsion(&g.torsion);
        let t = even_torsion(&g.torsion);
        if t > 0 {
            *expect.entry((g.h - 1, g.q)).or_default() += t;
        }
    }
    expect.retain(|_, v| *v > 0);
    let got: BTreeMap<(i64, i64), usize> = f2.ranks();
    expect == got
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Z --2--> Z in degrees 0 -> 1.
    fn times_two() -> ChainComplex {
        let mut d = SparseMatrix::new(1, 1);
        d.push(0, 0, 2);
        ChainComplex { h_min: 0, qdeg: vec![vec![0], vec![0]], d: vec![d] }
    }

    #[test]
    fn multiplication_by_two() {
        let c = times_two();
        c.check().unwrap();
        let z = homology(&c, Coefficients::Integers).unwrap();
        assert_eq!(z.groups, vec![HomologyGroup { h: 1, q: 0, free: 0, torsion: vec![2] }]);
        let f2 = homology(&c.reduce_mod2(), Coefficients::F2).unwrap();
        assert_eq!(f2.ranks(), BTreeMap::from([((0, 0), 1), ((1, 0), 1)]));
        assert!(universal_coefficients_hold(&z, &f2));
    }

    #[test]
    fn normalization() {
        let h = Homology {
            coefficients: Coefficients::Integers,
            groups: vec![HomologyGroup { h: -2, q: -7, free: 1, torsion: vec![] }],
        };
        let n = normalize_relative(&h);
        assert_eq!((n.groups[0].h, n.groups[0].q), (0, 1));
    }
}
