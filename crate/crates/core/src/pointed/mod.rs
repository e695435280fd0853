//! Pointed homology: the iterated mapping cone of the dot actions at mark
//! points, and the Koszul complex of those actions on homology.

use serde::Serialize;

use crate::action::{abstract_web, commutes_with_differential, dotted_chain_map, induced_action, theta_module_check, AbstractWeb};
use crate::cube::{build_cube_with, CubeComplex};
use crate::homology::{homology, ChainComplex, Coefficients, Homology, HomologyClasses};
use crate::matrix::{IntMatrix, SparseMatrix};
use crate::state::BasisCache;
use crate::web::WebDiagram;
use crate::{Error, Result};

/// `(-1)^(number of elements of s below i)`.
fn wedge_sign(s: u32, i: usize) -> i64 {
    if (s & ((1 << i) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Generators `(S, y)` with `S` a set of mark points and `y` a generator of
/// `F(D)`, placed in degree `(h(y) + |S|, q(y) - 2|S|)`.
#[derive(Clone, Debug)]
pub struct PointedComplex {
    pub cube: CubeComplex,
    /// Arc of each mark point.
    pub marks: Vec<usize>,
    /// Dot action of each mark point, one matrix per column of the cube.
    pub actions: Vec<Vec<SparseMatrix>>,
    pub complex: ChainComplex,
    /// Generators per column as (subset, generator in its cube column).
    pub labels: Vec<Vec<(u32, usize)>>,
}

/// Lay out the cube over subsets of `0..m`, with `m_len(k)` generators in
/// source column `k`, and return the per-column offsets of each subset.
fn layout(m: usize, columns: usize, m_len: impl Fn(usize) -> usize) -> Vec<Vec<Option<usize>>> {
    let total = columns + m;
    let mut fill = vec![0usize; total];
    let mut offsets = vec![vec![None; total]; 1 << m];
    for s in 0..1u32 << m {
        let w = s.count_ones() as usize;
        for k in 0..columns {
            offsets[s as usize][k + w] = Some(fill[k + w]);
            fill[k + w] += m_len(k);
        }
    }
    offsets
}

/// Total complex of a cube over subsets with vertex complex `c` and edge maps
/// `maps[i][k]` on column `k`; `c` may have no differentials.
fn total_complex(c: &ChainComplex, maps: &[Vec<SparseMatrix>], modulus2: bool) -> (ChainComplex, Vec<Vec<(u32, usize)>>) {
    let m = maps.len();
    let columns = c.len();
    let total = columns + m;
    let offsets = layout(m, columns, |k| c.qdeg[k].len());
    let mut qdeg = vec![Vec::new(); total];
    let mut labels = vec![Vec::new(); total];
    for s in 0..1u32 << m {
        let w = s.count_ones() as usize;
        for k in 0..columns {
            for (y, &q) in c.qdeg[k].iter().enumerate() {
                qdeg[k + w].push(q - 2 * w as i64);
                labels[k + w].push((s, y));
            }
        }
    }
    let mut d: Vec<SparseMatrix> =
        (0..total.saturating_sub(1)).map(|k| SparseMatrix::new(qdeg[k + 1].len(), qdeg[k].len())).collect();
    let reduce = |x: i64| if modulus2 { x.rem_euclid(2) } else { x };
    for s in 0..1u32 << m {
        let w = s.count_ones() as usize;
        let sign = if w % 2 == 0 { 1 } else { -1 };
        for k in 0..columns {
            let src = offsets[s as usize][k + w].unwrap();
            if k + 1 < columns {
                let dst = offsets[s as usize][k + 1 + w].unwrap();
                for &(i, j, x) in &c.d[k].entries {
                    d[k + w].push(dst + i, src + j, reduce(sign * x));
                }
            }
            for (i, map) in maps.iter().enumerate() {
                if s >> i & 1 == 1 {
                    continue;
                }
                let t = s | 1 << i;
                let dst = offsets[t as usize][k + w + 1].unwrap();
                let e = wedge_sign(s, i);
                for &(a, b, x) in &map[k].entries {
                    d[k + w].push(dst + a, src + b, reduce(e * x));
                }
            }
        }
    }
    (ChainComplex { h_min: c.h_min, qdeg, d }, labels)
}

pub fn pointed_complex(d: &WebDiagram, marks: &[usize], coeffs: Coefficients) -> Result<PointedComplex> {
    pointed_complex_with(d, marks, coeffs, &BasisCache::new())
}

pub fn pointed_complex_with(
    d: &WebDiagram,
    marks: &[usize],
    coeffs: Coefficients,
    cache: &BasisCache,
) -> Result<PointedComplex> {
    if marks.len() > 16 {
        return Err(Error::Invalid(format!("{} mark points exceed the limit of 16", marks.len())));
    }
    if let Some(&a) = marks.iter().find(|&&a| a >= d.arcs) {
        return Err(Error::Invalid(format!("mark point on arc {a}, which does not exist")));
    }
    let mut cube = build_cube_with(d, cache)?;
    if coeffs == Coefficients::F2 {
        cube = cube.reduce_mod2();
    }
    let actions = marks.iter().map(|&a| dotted_chain_map(&cube, a)).collect::<Result<Vec<_>>>()?;
    if let Some(i) = actions.iter().position(|m| !commutes_with_differential(&cube, m)) {
        return Err(Error::Consistency(format!("dot at mark point {i} is not a chain map")));
    }
    let (complex, labels) = total_complex(&cube.complex, &actions, coeffs == Coefficients::F2);
    complex.check_over(coeffs)?;
    Ok(PointedComplex { cube, marks: marks.to_vec(), actions, complex, labels })
}

impl PointedComplex {
    pub fn coefficients(&self) -> Coefficients {
        self.cube.coefficients
    }

    /// Chain map of `x_i`, `(S, y) -> ±(S ∪ i, y)`, one matrix per column.
    pub fn exterior_map(&self, i: usize) -> Vec<SparseMatrix> {
        let c = &self.complex;
        let mut index = std::collections::HashMap::new();
        for (k, col) in self.labels.iter().enumerate() {
            for (p, &l) in col.iter().enumerate() {
                index.insert((k, l), p);
            }
        }
        (0..c.len())
            .map(|k| {
                let rows = c.qdeg.get(k + 1).map_or(0, Vec::len);
                let mut m = SparseMatrix::new(rows, c.qdeg[k].len());
                for (p, &(s, y)) in self.labels[k].iter().enumerate() {
                    if s >> i & 1 == 0 {
                        let target = index[&(k + 1, (s | 1 << i, y))];
                        m.push(target, p, wedge_sign(s, i));
                    }
                }
                m
            })
            .collect()
    }

    /// Action of each `x_i` on the free part of pointed homology.
    pub fn exterior_action(&self) -> Result<Vec<IntMatrix>> {
        let classes = HomologyClasses::compute(&self.complex, self.coefficients())?;
        (0..self.marks.len()).map(|i| classes.induced_shifted(&self.exterior_map(i), 1, -2)).collect()
    }
}

pub fn pointed_homology(pc: &PointedComplex) -> Result<Homology> {
    homology(&pc.complex, pc.coefficients())
}

/// `K(s, M)` for commuting endomorphisms `s` of degree `(0, 2)` on a free
/// module with generators in the given bidegrees.
#[derive(Clone, Debug)]
pub struct KoszulComplex {
    pub complex: ChainComplex,
}

pub fn koszul_complex(gradings: &[(i64, i64)], s: &[IntMatrix], coeffs: Coefficients) -> Result<KoszulComplex> {
    let n = gradings.len();
    if s.iter().any(|x| x.rows() != n || x.cols() != n) {
        return Err(Error::Invalid("action matrices do not match the module".into()));
    }
    let zero = |m: IntMatrix| match coeffs {
        Coefficients::Integers => m.is_zero(),
        Coefficients::F2 => m.mod2().is_zero(),
    };
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if !zero(s[i].mul(&s[j]).sub(&s[j].mul(&s[i]))) {
                return Err(Error::Invalid(format!("actions {i} and {j} do not commute")));
            }
        }
    }
    // M as a complex with zero differential, one column per h.
    let (h_lo, h_hi) = match (gradings.iter().map(|g| g.0).min(), gradings.iter().map(|g| g.0).max()) {
        (Some(a), Some(b)) => (a, b),
        _ => (0, -1),
    };
    let columns = (h_hi - h_lo + 1) as usize;
    let mut qdeg = vec![Vec::new(); columns];
    let mut place = vec![(0usize, 0usize); n];
    for (g, &(h, q)) in gradings.iter().enumerate() {
        let k = (h - h_lo) as usize;
        place[g] = (k, qdeg[k].len());
        qdeg[k].push(q);
    }
    let d = (0..columns.saturating_sub(1)).map(|k| SparseMatrix::new(qdeg[k + 1].len(), qdeg[k].len())).collect();
    let base = ChainComplex { h_min: h_lo, qdeg, d };
    let maps: Vec<Vec<SparseMatrix>> = s
        .iter()
        .map(|x| {
            let mut per: Vec<SparseMatrix> = base.qdeg.iter().map(|g| SparseMatrix::new(g.len(), g.len())).collect();
            for a in 0..n {
                for b in 0..n {
                    let v = x.get(a, b);
                    if v != 0 {
                        let ((ka, ia), (kb, ib)) = (place[a], place[b]);
                        if ka != kb {
                            return Err(Error::Invalid("action changes the homological degree".into()));
                        }
                        per[ka].push(ia, ib, v);
                    }
                }
            }
            Ok(per)
        })
        .collect::<Result<_>>()?;
    let (complex, _) = total_complex(&base, &maps, coeffs == Coefficients::F2);
    complex.check_over(coeffs)?;
    Ok(KoszulComplex { complex })
}

pub fn koszul_homology(gradings: &[(i64, i64)], s: &[IntMatrix], coeffs: Coefficients) -> Result<Homology> {
    homology(&koszul_complex(gradings, s, coeffs)?.complex, coeffs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulReport {
    pub koszul_rank: usize,
    pub pointed_rank: usize,
    pub bound_holds: bool,
}

/// Compare the rank of pointed homology with the rank of the Koszul complex
/// of the mark point actions on the free part of `H(D)`.
pub fn koszul_rank_bound_check(pc: &PointedComplex) -> Result<KoszulReport> {
    let coeffs = pc.coefficients();
    let classes = HomologyClasses::compute(&pc.cube.complex, coeffs)?;
    let s = pc.actions.iter().map(|m| classes.induced(m, 2)).collect::<Result<Vec<_>>>()?;
    let koszul_rank = koszul_homology(&classes.gradings(), &s, coeffs)?.total_rank();
    let pointed_rank = pointed_homology(pc)?.total_rank();
    Ok(KoszulReport { koszul_rank, pointed_rank, bound_holds: koszul_rank >= pointed_rank })
}

/// Whether the meridians of the marked edges form a basis of the first
/// homology of the web's complement: the marks sit on distinct edges and the
/// unmarked edges form a spanning forest.
pub fn meridian_basis(w: &AbstractWeb, marks: &[usize]) -> bool {
    let mut marked = vec![false; w.edges.len()];
    for &a in marks {
        let Some(&e) = w.edge_of_arc.get(a) else { return false };
        if std::mem::replace(&mut marked[e], true) {
            return false;
        }
    }
    let mut ends: Vec<Vec<usize>> = vec![Vec::new(); w.edges.len()];
    for (v, es) in w.vertices.iter().enumerate() {
        for &e in es {
            ends[e].push(v);
        }
    }
    let mut parent: Vec<usize> = (0..w.vertices.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    // Unmarked edges must form a forest; then every marked edge closes a cycle.
    let mut order: Vec<usize> = (0..w.edges.len()).collect();
    order.sort_by_key(|&e| marked[e]);
    let mut cycles = 0;
    for e in order {
        let vs = &ends[e];
        let cycle = match vs[..] {
            [u, v] => {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
                a == b
            }
            _ => true,
        };
        if cycle != marked[e] {
            return false;
        }
        cycles += usize::from(cycle);
    }
    marks.len() == cycles
}

/// Verdicts of the theta detection criteria on a diagram of a spatial theta
/// graph, over F2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    pub marks: Vec<usize>,
    /// `H(Γ; F2)` is a cyclic module over `R_Θ ⊗ F2` with the graded ranks of
    /// `H(Θ; F2)`.
    pub module_isomorphic: bool,
    pub pointed_rank: usize,
    pub rank_is_four: bool,
    pub planar_theta_signature: bool,
}

/// Run both theta criteria. `marks` defaults to the first arcs of the first
/// two edges.
pub fn theta_detection(d: &WebDiagram, marks: Option<&[usize]>, cache: &BasisCache) -> Result<ThetaReport> {
    let w = abstract_web(d)?;
    if w.vertices.len() != 2 || w.edges.len() != 3 || !w.loops.is_empty() {
        return Err(Error::Invalid("not a diagram of a theta graph".into()));
    }
    let marks = marks.map_or_else(|| vec![w.edges[0][0], w.edges[1][0]], <[usize]>::to_vec);
    if marks.len() != 2 || !meridian_basis(&w, &marks) {
        return Err(Error::Invalid("theta detection needs two mark points on distinct edges".into()));
    }
    let cube = build_cube_with(d, cache)?.reduce_mod2();
    let classes = HomologyClasses::compute(&cube.complex, Coefficients::F2)?;
    let a = induced_action(d, &cube, &classes)?;
    let module_isomorphic = theta_module_check(&a.gradings, &a.edges[0], &a.edges[1]);
    let pc = pointed_complex_with(d, &marks, Coefficients::F2, cache)?;
    let pointed_rank = pointed_homology(&pc)?.total_rank();
    let rank_is_four = pointed_rank == 4;
    Ok(ThetaReport { marks, module_isomorphic, pointed_rank, rank_is_four, planar_theta_signature: module_isomorphic && rank_is_four })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> WebDiagram {
        WebDiagram::from_json(r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[2,1,0]}]}"#)
            .unwrap()
    }

    fn unknot() -> WebDiagram {
        WebDiagram::from_json(r#"{"arcs":1,"joins":[[0,0]]}"#).unwrap()
    }

    fn shift_matrix() -> IntMatrix {
        IntMatrix::from_rows(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0]])
    }

    #[test]
    fn no_marks_is_the_cube() {
        let d = theta();
        let pc = pointed_complex(&d, &[], Coefficients::Integers).unwrap();
        assert_eq!(pc.complex, pc.cube.complex);
    }

    #[test]
    fn unknot_with_one_mark_is_a_cone() {
        let pc = pointed_complex(&unknot(), &[0], Coefficients::Integers).unwrap();
        assert_eq!(pc.complex.qdeg, vec![vec![-2, 0, 2], vec![-4, -2, 0]]);
        assert_eq!(pc.complex.d[0].to_dense(), shift_matrix());
        let h = pointed_homology(&pc).unwrap();
        let ranks: Vec<_> = h.ranks().into_iter().collect();
        assert_eq!(ranks, vec![((0, 2), 1), ((1, -4), 1)]);
        assert!(!h.has_torsion());
        let r = koszul_rank_bound_check(&pc).unwrap();
        assert_eq!((r.koszul_rank, r.pointed_rank, r.bound_holds), (2, 2, true));
    }

    #[test]
    fn koszul_of_nilpotent_shift() {
        let g = [(0, -2), (0, 0), (0, 2)];
        let h = koszul_homology(&g, &[shift_matrix()], Coefficients::Integers).unwrap();
        assert_eq!(h.ranks().into_iter().collect::<Vec<_>>(), vec![((0, 2), 1), ((1, -4), 1)]);
        let trivial = koszul_homology(&g, &[], Coefficients::Integers).unwrap();
        assert_eq!(trivial.total_rank(), 3);
        let other = IntMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 0]]);
        assert!(koszul_complex(&g, &[shift_matrix(), other], Coefficients::Integers).is_err());
    }

    #[test]
    fn theta_with_two_marks() {
        for coeffs in [Coefficients::Integers, Coefficients::F2] {
            let pc = pointed_complex(&theta(), &[0, 1], coeffs).unwrap();
            let h = pointed_homology(&pc).unwrap();
            assert_eq!(h.total_rank(), 4);
            assert!(!h.has_torsion());
            let r = koszul_rank_bound_check(&pc).unwrap();
            assert_eq!((r.koszul_rank, r.pointed_rank), (4, 4));
            let x = pc.exterior_action().unwrap();
            let zero = |m: IntMatrix| if coeffs == Coefficients::F2 { m.mod2().is_zero() } else { m.is_zero() };
            assert!(zero(x[0].mul(&x[0])) && zero(x[1].mul(&x[1])));
            assert!(zero(x[0].mul(&x[1]).add(&x[1].mul(&x[0]))));
        }
    }

    #[test]
    fn meridians_of_two_theta_edges_are_a_basis() {
        let w = abstract_web(&theta()).unwrap();
        assert!(meridian_basis(&w, &[0, 1]));
        assert!(meridian_basis(&w, &[2, 0]));
        assert!(!meridian_basis(&w, &[0]));
        assert!(!meridian_basis(&w, &[1, 1]));
        assert!(!meridian_basis(&w, &[0, 1, 2]));
        let u = abstract_web(&unknot()).unwrap();
        assert!(meridian_basis(&u, &[0]));
        assert!(!meridian_basis(&u, &[]));
    }

    #[test]
    fn theta_detection_separates_planar_and_knotted() {
        let cache = BasisCache::new();
        let r = theta_detection(&theta(), None, &cache).unwrap();
        assert!(r.module_isomorphic && r.rank_is_four && r.planar_theta_signature);
        let knotted = WebDiagram::from_json(
            r#"{"arcs":9,"crossings":[{"ends":[1,2,3,0],"sign":"pos"},{"ends":[6,7,2,1],"sign":"pos"},
            {"ends":[8,3,7,6],"sign":"pos"}],"vertices":[{"arcs":[0,4,5],"polarity":"in"},{"arcs":[4,8,5],"polarity":"out"}]}"#,
        )
        .unwrap();
        let r = theta_detection(&knotted, None, &cache).unwrap();
        assert!(!r.module_isomorphic && !r.rank_is_four);
        assert!(theta_detection(&unknot(), None, &cache).is_err());
    }

    #[test]
    fn bad_mark_is_rejected() {
        assert!(matches!(pointed_complex(&theta(), &[7], Coefficients::Integers), Err(Error::Invalid(_))));
    }
}
