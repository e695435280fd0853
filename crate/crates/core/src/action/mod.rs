//! The action of edge variables `X_e` on homology, the ring relations they
//! satisfy, and the theta module check.

use rayon::prelude::*;
use serde::Serialize;

use crate::cube::CubeComplex;
use crate::foam::{Movie, MovieMove};
use crate::homology::{Coefficients, HomologyClasses};
use crate::matrix::{IntMatrix, SparseMatrix};
use crate::state::movie_matrix;
use crate::web::{Port, WebDiagram};
use crate::{Error, Result};

/// The spatial web under a diagram: edges as chains of arcs running through
/// crossings and joins.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbstractWeb {
    /// Arcs of each edge, in order along the edge.
    pub edges: Vec<Vec<usize>>,
    /// Edge of each diagram arc.
    pub edge_of_arc: Vec<usize>,
    /// Edges at each vertex, in the vertex's order.
    pub vertices: Vec<[usize; 3]>,
    /// Edges without endpoints.
    pub loops: Vec<usize>,
}

pub fn abstract_web(d: &WebDiagram) -> Result<AbstractWeb> {
    let ports = d.ports()?;
    let next = |a: usize| -> Option<usize> {
        match ports[a][1] {
            Port::Join { join } => Some(d.joins[join].1),
            Port::Crossing { crossing, slot } => Some(d.crossings[crossing].ends[WebDiagram::crossing_exit(slot)]),
            Port::Vertex { .. } => None,
        }
    };
    let mut edge_of_arc = vec![usize::MAX; d.arcs];
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for a in 0..d.arcs {
        if !matches!(ports[a][0], Port::Vertex { .. }) {
            continue;
        }
        let mut e = vec![a];
        let mut x = a;
        while let Some(y) = next(x) {
            e.push(y);
            x = y;
        }
        for &x in &e {
            edge_of_arc[x] = edges.len();
        }
        edges.push(e);
    }
    let mut loops = Vec::new();
    for a in 0..d.arcs {
        if edge_of_arc[a] != usize::MAX {
            continue;
        }
        let mut e = vec![a];
        edge_of_arc[a] = edges.len();
        let mut x = next(a).expect("closed strand");
        while x != a {
            edge_of_arc[x] = edges.len();
            e.push(x);
            x = next(x).expect("closed strand");
        }
        loops.push(edges.len());
        edges.push(e);
    }
    let vertices = d.vertices.iter().map(|v| v.arcs.map(|a| edge_of_arc[a])).collect();
    Ok(AbstractWeb { edges, edge_of_arc, vertices, loops })
}

/// Chain map of a dot on diagram arc `arc`, one matrix per column.
pub fn dotted_chain_map(cube: &CubeComplex, arc: usize) -> Result<Vec<SparseMatrix>> {
    let cols = &cube.complex.qdeg;
    let per_vertex: Vec<(usize, usize, SparseMatrix)> = cube
        .vertices
        .par_iter()
        .map(|v| {
            let e = *v.arc_edge.get(arc).ok_or_else(|| Error::Invalid(format!("arc {arc} does not exist")))?;
            let m = Movie::new(v.space.web.clone(), vec![MovieMove::Dot { edge: e }]);
            Ok((v.bits.count_ones() as usize, v.offset, movie_matrix(&m, &v.space, &v.space)?))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<SparseMatrix> = cols.iter().map(|g| SparseMatrix::new(g.len(), g.len())).collect();
    for (k, off, m) in per_vertex {
        for (i, j, x) in m.entries {
            let x = if cube.coefficients == Coefficients::F2 { x.rem_euclid(2) } else { x };
            out[k].push(off + i, off + j, x);
        }
    }
    Ok(out)
}

/// Whether `map` commutes with the differential of `cube`.
pub fn commutes_with_differential(cube: &CubeComplex, map: &[SparseMatrix]) -> bool {
    cube.complex.d.iter().enumerate().all(|(k, d)| {
        let diff = d.mul(&map[k]).sub(&map[k + 1].mul(d));
        match cube.coefficients {
            Coefficients::F2 => diff.mod2().entries.is_empty(),
            Coefficients::Integers => diff.entries.is_empty(),
        }
    })
}

/// Actions of the edge variables on the free part of homology.
#[derive(Clone, Debug, Serialize)]
pub struct ActionMatrices {
    pub coefficients: Coefficients,
    /// `(h, q)` of each homology generator.
    pub gradings: Vec<(i64, i64)>,
    /// One matrix per edge of the abstract web.
    pub edges: Vec<IntMatrix>,
}

/// Action of a dot at `arc` on homology.
pub fn induced_action_at(cube: &CubeComplex, classes: &HomologyClasses, arc: usize) -> Result<IntMatrix> {
    let map = dotted_chain_map(cube, arc)?;
    if !commutes_with_differential(cube, &map) {
        return Err(Error::Consistency(format!("dot on arc {arc} is not a chain map")));
    }
    classes.induced(&map, 2)
}

/// Action of every edge, each placed at the first arc of the edge.
pub fn induced_action(d: &WebDiagram, cube: &CubeComplex, classes: &HomologyClasses) -> Result<ActionMatrices> {
    let w = abstract_web(d)?;
    let edges = w.edges.par_iter().map(|arcs| induced_action_at(cube, classes, arcs[0])).collect::<Result<Vec<_>>>()?;
    Ok(ActionMatrices { coefficients: classes.coefficients, gradings: classes.gradings(), edges })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `X_i + X_j + X_k = 0`
    Linear([usize; 3]),
    /// `X_i X_j + X_j X_k + X_k X_i = 0`
    Quadratic([usize; 3]),
    /// `X_i X_j X_k = 0`
    Cubic([usize; 3]),
    /// `X_i^3 = 0` on a loop edge.
    LoopCube(usize),
}

/// Generators `X_e`, one per edge, of degree 2, with the vertex and loop
/// relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RingPresentation {
    pub generators: usize,
    pub relations: Vec<Relation>,
}

pub fn ring_presentation(w: &AbstractWeb) -> RingPresentation {
    let mut relations = Vec::new();
    for &t in &w.vertices {
        relations.extend([Relation::Linear(t), Relation::Quadratic(t), Relation::Cubic(t)]);
    }
    relations.extend(w.loops.iter().map(|&e| Relation::LoopCube(e)));
    RingPresentation { generators: w.edges.len(), relations }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    /// Nonzero entries left by each relation.
    pub residuals: Vec<(Relation, usize)>,
    /// Whether all edge actions commute.
    pub commuting: bool,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        self.commuting && self.residuals.iter().all(|r| r.1 == 0)
    }
}

pub fn verify_relations(p: &RingPresentation, a: &ActionMatrices) -> RelationReport {
    let reduce = |m: IntMatrix| -> usize {
        let mut n = 0;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let x = m.get(i, j);
                let nz = if a.coefficients == Coefficients::F2 { x.rem_euclid(2) != 0 } else { x != 0 };
                n += usize::from(nz);
            }
        }
        n
    };
    let x = &a.edges;
    let residuals = p
        .relations
        .iter()
        .map(|&r| {
            let m = match r {
                Relation::Linear([i, j, k]) => x[i].add(&x[j]).add(&x[k]),
                Relation::Quadratic([i, j, k]) => x[i].mul(&x[j]).add(&x[j].mul(&x[k])).add(&x[k].mul(&x[i])),
                Relation::Cubic([i, j, k]) => x[i].mul(&x[j]).mul(&x[k]),
                Relation::LoopCube(i) => x[i].mul(&x[i]).mul(&x[i]),
            };
            (r, reduce(m))
        })
        .collect();
    let commuting =
        (0..x.len()).all(|i| (i + 1..x.len()).all(|j| reduce(x[i].mul(&x[j]).sub(&x[j].mul(&x[i]))) == 0));
    RelationReport { residuals, commuting }
}

/// Rank of vectors over F2.
fn f2_rank(vectors: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<bool>> = vectors.iter().map(|v| v.iter().map(|x| x.rem_euclid(2) == 1).collect()).collect();
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c]) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i][c] {
                let pivot = rows[rank].clone();
                for (a, b) in rows[i].iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether homology over F2 with the actions `x1`, `x2` of two edges is a
/// free module of rank one over the theta ring: six generators in quantum
/// ranks (1, 2, 2, 1) and some `g` with `g, X1 g, X2 g, X1^2 g, X1 X2 g,
/// X1^2 X2 g` spanning.
pub fn theta_module_check(gradings: &[(i64, i64)], x1: &IntMatrix, x2: &IntMatrix) -> bool {
    if gradings.len() != 6 || x1.rows() != 6 || x2.rows() != 6 {
        return false;
    }
    let mut qs: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    for &(_, q) in gradings {
        *qs.entry(q).or_default() += 1;
    }
    if qs.values().copied().collect::<Vec<_>>() != vec![1, 2, 2, 1] {
        return false;
    }
    let q0 = *qs.keys().next().unwrap();
    let low: Vec<usize> = (0..6).filter(|&i| gradings[i].1 == q0).collect();
    (1u32..1 << low.len()).any(|mask| {
        let mut g = vec![0i64; 6];
        for (b, &i) in low.iter().enumerate() {
            if mask >> b & 1 == 1 {
                g[i] = 1;
            }
        }
        let a = x1.mul_vec(&g);
        let b = x2.mul_vec(&g);
        let aa = x1.mul_vec(&a);
        let ab = x1.mul_vec(&b);
        let aab = x1.mul_vec(&ab);
        f2_rank(&[g.clone(), a, b, aa, ab, aab]) == 6
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::build_cube;

    fn theta() -> WebDiagram {
        WebDiagram::from_json(r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[2,1,0]}]}"#)
            .unwrap()
    }

    fn unknot() -> WebDiagram {
        WebDiagram::from_json(r#"{"arcs":1,"joins":[[0,0]]}"#).unwrap()
    }

    #[test]
    fn unknot_action_is_multiplication_by_x() {
        let d = unknot();
        let cube = build_cube(&d).unwrap();
        let classes = HomologyClasses::compute(&cube.complex, Coefficients::Integers).unwrap();
        let a = induced_action(&d, &cube, &classes).unwrap();
        let x = &a.edges[0];
        assert_eq!(x.to_rows(), vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0]]);
        let w = abstract_web(&d).unwrap();
        assert!(verify_relations(&ring_presentation(&w), &a).holds());
    }

    #[test]
    fn theta_relations_and_module() {
        let d = theta();
        let w = abstract_web(&d).unwrap();
        assert_eq!(w.edges.len(), 3);
        for coeffs in [Coefficients::Integers, Coefficients::F2] {
            let mut cube = build_cube(&d).unwrap();
            if coeffs == Coefficients::F2 {
                cube = cube.reduce_mod2();
            }
            let classes = HomologyClasses::compute(&cube.complex, coeffs).unwrap();
            let a = induced_action(&d, &cube, &classes).unwrap();
            let report = verify_relations(&ring_presentation(&w), &a);
            assert!(report.holds(), "{report:?}");
            if coeffs == Coefficients::F2 {
                assert!(theta_module_check(&a.gradings, &a.edges[0], &a.edges[1]));
                let zero = IntMatrix::zeros(6, 6);
                assert!(!theta_module_check(&a.gradings, &zero, &zero));
            }
        }
    }
}
