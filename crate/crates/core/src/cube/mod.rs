//! The cube of resolutions of a web diagram and its bigraded chain complex.

use rayon::prelude::*;
use serde_json::json;

use crate::foam::{Movie, MovieMove, UnzipMove, ZipMove};
use crate::homology::{ChainComplex, Coefficients};
use crate::matrix::SparseMatrix;
use crate::state::{movie_matrix, same_web, BasisCache, StateSpace};
use crate::web::{resolve, wide_edge_id, wide_vertices, CrossingSign, EdgeId, WebDiagram};
use crate::{Error, Result};

/// Largest crossing count [`build_cube`] accepts.
pub const MAX_CROSSINGS: usize = 16;

/// `(-1)^(number of ones in v before coordinate c)`.
pub fn sign_assignment(v: u64, c: usize) -> i64 {
    if (v & ((1u64 << c) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// One resolution in the cube.
#[derive(Clone, Debug)]
pub struct CubeVertex {
    pub bits: u64,
    pub h: i64,
    pub shift: i64,
    pub space: StateSpace,
    /// Web edge carrying each diagram arc.
    pub arc_edge: Vec<EdgeId>,
    /// First generator of this vertex within its column.
    pub offset: usize,
}

/// `F(D)`: the chain complex together with the resolutions it is built from.
#[derive(Clone, Debug)]
pub struct CubeComplex {
    pub complex: ChainComplex,
    pub vertices: Vec<CubeVertex>,
    /// Generators per column as (cube vertex, basis index).
    pub labels: Vec<Vec<(u64, usize)>>,
    pub p_plus: usize,
    pub p_minus: usize,
    pub coefficients: Coefficients,
}

impl CubeComplex {
    pub fn crossings(&self) -> usize {
        self.vertices.len().trailing_zeros() as usize
    }

    pub fn column(&self, h: i64) -> Option<usize> {
        let k = h - self.complex.h_min;
        (0..self.complex.len() as i64).contains(&k).then_some(k as usize)
    }

    pub fn vertex(&self, bits: u64) -> &CubeVertex {
        &self.vertices[bits as usize]
    }

    pub fn reduce_mod2(&self) -> CubeComplex {
        CubeComplex { complex: self.complex.reduce_mod2(), coefficients: Coefficients::F2, ..self.clone() }
    }

    /// Ranks per `(h, q)` and the differentials as sparse triples.
    pub fn to_json(&self) -> serde_json::Value {
        let mut ranks = std::collections::BTreeMap::<(i64, i64), usize>::new();
        for (k, g) in self.complex.qdeg.iter().enumerate() {
            for &q in g {
                *ranks.entry((self.complex.h_min + k as i64, q)).or_default() += 1;
            }
        }
        let ranks: Vec<_> = ranks.into_iter().map(|((h, q), r)| json!({"h": h, "q": q, "rank": r})).collect();
        let d: Vec<_> = self
            .complex
            .d
            .iter()
            .enumerate()
            .map(|(k, m)| {
                json!({
                    "h": self.complex.h_min + k as i64,
                    "rows": m.rows,
                    "cols": m.cols,
                    "entries": m.entries.iter().map(|&(i, j, v)| [i as i64, j as i64, v]).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({"coefficients": self.coefficients, "ranks": ranks, "differentials": d})
    }
}

fn bits_of(v: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| v >> i & 1 == 1).collect()
}

/// The zip or unzip between the resolutions `v` and `v + e_c`.
pub fn skein_movie(d: &WebDiagram, v: &CubeVertex, u: &CubeVertex, c: usize) -> Movie {
    let cr = &d.crossings[c];
    let [il, ir, or, ol] = cr.ends;
    let m = wide_edge_id(d, c);
    let mv = match cr.sign {
        CrossingSign::Positive => {
            let (sink, source) = wide_vertices(d, c);
            MovieMove::Zip(ZipMove {
                left: v.arc_edge[il],
                right: v.arc_edge[ir],
                left_lo: u.arc_edge[il],
                left_hi: u.arc_edge[ol],
                right_lo: u.arc_edge[ir],
                right_hi: u.arc_edge[or],
                mid: m,
                sink,
                source,
            })
        }
        CrossingSign::Negative => MovieMove::Unzip(UnzipMove { mid: m, left: u.arc_edge[il], right: u.arc_edge[ir] }),
    };
    Movie::new(v.space.web.clone(), vec![mv])
}

/// Build `F(D)` over the integers.
pub fn build_cube(d: &WebDiagram) -> Result<CubeComplex> {
    build_cube_with(d, &BasisCache::new())
}

pub fn build_cube_with(d: &WebDiagram, cache: &BasisCache) -> Result<CubeComplex> {
    let n = d.crossings.len();
    if n > MAX_CROSSINGS {
        return Err(Error::Invalid(format!("{n} crossings exceed the limit of {MAX_CROSSINGS}")));
    }
    let (pp, pm) = d.sign_counts();
    let mut vertices: Vec<CubeVertex> = (0..1u64 << n)
        .into_par_iter()
        .map(|v| {
            let r = resolve(d, &bits_of(v, n));
            let weight = v.count_ones() as i64;
            Ok(CubeVertex {
                bits: v,
                h: weight - pm as i64,
                shift: 3 * pm as i64 - 2 * pp as i64 - weight,
                space: cache.state_space(&r.web)?,
                arc_edge: r.arc_edge,
                offset: 0,
            })
        })
        .collect::<Result<_>>()?;

    let mut qdeg: Vec<Vec<i64>> = vec![Vec::new(); n + 1];
    let mut labels: Vec<Vec<(u64, usize)>> = vec![Vec::new(); n + 1];
    for v in vertices.iter_mut() {
        let k = v.bits.count_ones() as usize;
        v.offset = qdeg[k].len();
        for (i, &q) in v.space.degrees.iter().enumerate() {
            qdeg[k].push(q + v.shift);
            labels[k].push((v.bits, i));
        }
    }

    let edges: Vec<(u64, usize)> =
        (0..1u64 << n).flat_map(|v| (0..n).filter(move |&c| v >> c & 1 == 0).map(move |c| (v, c))).collect();
    let pieces: Vec<(usize, Vec<(usize, usize, i64)>)> = edges
        .into_par_iter()
        .map(|(v, c)| {
            let u = v | 1 << c;
            let (vv, uu) = (&vertices[v as usize], &vertices[u as usize]);
            let movie = skein_movie(d, vv, uu, c);
            if !same_web(&movie.target()?, &uu.space.web) {
                return Err(Error::Consistency(format!("skein movie at crossing {c} misses the resolution {u:b}")));
            }
            let m = movie_matrix(&movie, &vv.space, &uu.space)?;
            let eps = sign_assignment(v, c);
            let entries = m.entries.iter().map(|&(i, j, x)| (uu.offset + i, vv.offset + j, eps * x)).collect();
            Ok((v.count_ones() as usize, entries))
        })
        .collect::<Result<_>>()?;

    let mut dmat: Vec<SparseMatrix> = (0..n).map(|k| SparseMatrix::new(qdeg[k + 1].len(), qdeg[k].len())).collect();
    for (k, entries) in pieces {
        for (i, j, x) in entries {
            dmat[k].push(i, j, x);
        }
    }
    let complex = ChainComplex { h_min: -(pm as i64), qdeg, d: dmat };
    complex.check()?;
    Ok(CubeComplex { complex, vertices, labels, p_plus: pp, p_minus: pm, coefficients: Coefficients::Integers })
}
