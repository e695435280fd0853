//! State spaces of planar webs: bases of movies read off a reduction, dual
//! bases through the closed-foam pairing, and integer matrices of foams.

mod pairing;
mod reduce;

pub use pairing::sandwich;
pub use reduce::{reduce, Branch, ReductionPolicy, ReductionTree, StepKind};
pub(crate) use reduce::same_web;

use std::collections::BTreeSet;
use std::sync::Arc;

use dashmap::DashMap;
use serde::Serialize;

use crate::foam::{Movie, MovieMove, SaddleMove};
use crate::homology::{unimodular_inverse, LaurentPoly};
use crate::matrix::{IntMatrix, SparseMatrix};
use crate::web::{EdgeId, PlanarWeb, Side};
use crate::{Error, Result};

/// A basis of `F(web)`: movies from the empty web, their degrees, and the
/// reversed movies used as candidate duals.
#[derive(Clone, Debug, Serialize)]
pub struct GradedBasis {
    pub web: PlanarWeb,
    pub elements: Vec<Movie>,
    pub degrees: Vec<i64>,
    pub duals: Vec<Movie>,
    /// `pairing[i][j]` is the evaluation of `duals[j]` after `elements[i]`.
    pub pairing: IntMatrix,
    #[serde(skip)]
    correction: IntMatrix,
}

impl GradedBasis {
    pub fn new(web: &PlanarWeb) -> Result<Self> {
        Self::with_policy(web, ReductionPolicy::default())
    }

    /// Reduce each component with `policy` and tensor the results.
    pub fn with_policy(web: &PlanarWeb, policy: ReductionPolicy) -> Result<Self> {
        let comps = web.components();
        if comps.len() <= 1 {
            return Self::connected(web, policy);
        }
        let factors = comps.iter().map(|c| Self::connected(&web.subweb(c), policy)).collect::<Result<Vec<_>>>()?;
        Ok(Self::tensor(&factors.iter().collect::<Vec<_>>()))
    }

    fn connected(web: &PlanarWeb, policy: ReductionPolicy) -> Result<Self> {
        let tree = reduce(web, policy)?;
        let mut elements = Vec::new();
        let mut degrees = Vec::new();
        for (moves, d) in tree_movies(&tree) {
            elements.push(Movie::new(PlanarWeb::new(), moves));
            degrees.push(d);
        }
        let duals = elements.iter().map(Movie::reverse).collect::<Result<Vec<_>, _>>()?;
        let transposed = sandwich(&elements, None, &duals)?;
        let correction = unimodular_inverse(&transposed)?.ok_or_else(|| {
            Error::Consistency(format!("pairing matrix of a web with {} edges is not unimodular", web.edges().len()))
        })?;
        Ok(GradedBasis { web: web.clone(), elements, degrees, duals, pairing: transposed.transpose(), correction })
    }

    /// Tensor product of bases of disjoint webs; the first factor varies
    /// slowest.
    pub fn tensor(factors: &[&GradedBasis]) -> GradedBasis {
        let mut out = GradedBasis {
            web: PlanarWeb::new(),
            elements: vec![Movie::identity(PlanarWeb::new())],
            degrees: vec![0],
            duals: vec![Movie::identity(PlanarWeb::new())],
            pairing: IntMatrix::identity(1),
            correction: IntMatrix::identity(1),
        };
        for f in factors {
            let mut web = out.web.clone();
            for (&id, e) in f.web.edges() {
                web.insert_edge(id, *e);
            }
            for (&id, v) in f.web.vertices() {
                web.insert_vertex(id, *v);
            }
            let mut elements = Vec::new();
            let mut duals = Vec::new();
            let mut degrees = Vec::new();
            for (a, da) in out.elements.iter().zip(&out.degrees) {
                for (b, db) in f.elements.iter().zip(&f.degrees) {
                    let mut moves = a.moves.clone();
                    moves.extend_from_slice(&b.moves);
                    elements.push(Movie::new(PlanarWeb::new(), moves));
                    degrees.push(da + db);
                }
            }
            for a in &out.duals {
                for b in &f.duals {
                    let mut moves = b.moves.clone();
                    moves.extend_from_slice(&a.moves);
                    duals.push(Movie::new(web.clone(), moves));
                }
            }
            out = GradedBasis {
                elements,
                degrees,
                duals,
                pairing: kron(&out.pairing, &f.pairing),
                correction: kron(&out.correction, &f.correction),
                web,
            };
        }
        out
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `sum_i q^degree_i`
    pub fn graded_rank(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for &d in &self.degrees {
            p.add_term(1, d);
        }
        p
    }

    /// `(P^T)^{-1}`: turns pairings against the candidate duals into
    /// coordinates.
    pub fn dual_correction(&self) -> &IntMatrix {
        &self.correction
    }

    /// Coordinates of a foam from the empty web to `web`, read through the
    /// pairing.
    pub fn coordinates(&self, x: &Movie) -> Result<Vec<i64>> {
        let beta = sandwich(std::slice::from_ref(x), None, &self.duals)?;
        Ok(self.correction.mul_vec(&beta.column(0)))
    }
}

fn kron(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = IntMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a.get(i, j);
            if x == 0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, x * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Basis movies of a reduction tree with their degrees.
fn tree_movies(t: &ReductionTree) -> Vec<(Vec<MovieMove>, i64)> {
    if t.step.is_none() {
        return vec![(Vec::new(), 0)];
    }
    let mut out = Vec::new();
    for b in &t.branches {
        let creation: i64 = b.creation.iter().map(MovieMove::degree).sum();
        for (m, d) in tree_movies(&b.child) {
            for k in 0..=b.max_dots {
                let mut moves = m.clone();
                moves.push(b.creation[0]);
                moves.extend(std::iter::repeat_n(MovieMove::Dot { edge: b.dotted_edge }, k as usize));
                moves.extend_from_slice(&b.creation[1..]);
                out.push((moves, d + creation + 2 * k as i64));
            }
        }
    }
    out
}

/// Matrix of the foam `m` in the given bases: entry `(j, i)` is the `j`-th
/// coordinate of `m` applied to the `i`-th basis element.
pub fn cobordism_matrix(m: &Movie, b1: &GradedBasis, b2: &GradedBasis) -> Result<IntMatrix> {
    if !same_web(&m.source, &b1.web) {
        return Err(Error::Invalid("movie source does not match the source basis".into()));
    }
    if !same_web(&m.target()?, &b2.web) {
        return Err(Error::Invalid("movie target does not match the target basis".into()));
    }
    let c = sandwich(&b1.elements, Some(m), &b2.duals)?;
    let out = b2.correction.checked_mul(&c).ok_or_else(|| Error::Consistency("cobordism matrix overflowed".into()))?;
    let deg = m.degree();
    for k in 0..out.rows() {
        for i in 0..out.cols() {
            if out.get(k, i) != 0 && b2.degrees[k] != b1.degrees[i] + deg {
                return Err(Error::Consistency("cobordism matrix is not homogeneous".into()));
            }
        }
    }
    Ok(out)
}

/// Where [`neck_cutting_check`] compresses a neck.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeckSite {
    /// The identity cylinder over a loop, cut in the middle.
    Loop(EdgeId),
    /// A tube attached to the facet over an edge, cut across.
    Tube(EdgeId),
}

/// Check the neck-cutting relation on the identity foam of `web`: the foam
/// with the neck equals minus the sum of the three surgered foams with dots
/// `(2, 0)`, `(1, 1)` and `(0, 2)` on the two new disks.
pub fn neck_cutting_check(web: &PlanarWeb, site: Option<NeckSite>) -> Result<bool> {
    let Some(site) = site else { return Ok(true) };
    let b = GradedBasis::new(web)?;
    let dots = |e: EdgeId, k: usize| std::iter::repeat_n(MovieMove::Dot { edge: e }, k);
    let (neck, cuts) = match site {
        NeckSite::Loop(e) => {
            if !web.edge(e).is_some_and(|x| x.is_loop()) {
                return Err(Error::Invalid(format!("edge {e} is not a loop")));
            }
            let cuts = (0..=2)
                .map(|a| {
                    let mut v: Vec<MovieMove> = dots(e, a).collect();
                    v.push(MovieMove::Death { edge: e });
                    v.push(MovieMove::Birth { edge: e });
                    v.extend(dots(e, 2 - a));
                    v
                })
                .collect::<Vec<_>>();
            (IntMatrix::identity(b.len()), cuts)
        }
        NeckSite::Tube(e) => {
            if web.edge(e).is_none() {
                return Err(Error::Invalid(format!("edge {e} does not exist")));
            }
            let keep = web.next_edge_id();
            let c = keep + 1;
            let split = MovieMove::Saddle(SaddleMove::Split { edge: e, side: Side::Left, keep, new_loop: c });
            let merge = MovieMove::Saddle(SaddleMove::Merge { a: keep, b: c, side: Side::Left, ab: e, ba: e });
            let tube = cobordism_matrix(&Movie::new(web.clone(), vec![split, merge]), &b, &b)?;
            let cuts = (0..=2)
                .map(|a| {
                    let mut v = vec![split];
                    v.extend(dots(c, a));
                    v.push(MovieMove::Death { edge: c });
                    v.push(MovieMove::Birth { edge: c });
                    v.extend(dots(c, 2 - a));
                    v.push(merge);
                    v
                })
                .collect::<Vec<_>>();
            (tube, cuts)
        }
    };
    let mut sum = IntMatrix::zeros(b.len(), b.len());
    for moves in cuts {
        sum = sum.add(&cobordism_matrix(&Movie::new(web.clone(), moves), &b, &b)?);
    }
    Ok(neck.add(&sum).is_zero())
}

/// `F(web)` as a tensor product over connected components, each with a
/// cached basis.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub web: PlanarWeb,
    pub components: Vec<BTreeSet<EdgeId>>,
    pub factors: Vec<Arc<GradedBasis>>,
    pub degrees: Vec<i64>,
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.factors[k + 1].len();
        }
        s
    }

    /// Graded rank `sum q^degree`.
    pub fn graded_rank(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for &d in &self.degrees {
            p.add_term(1, d);
        }
        p
    }
}

/// Bases of connected webs, shared across the webs they occur in.
#[derive(Debug, Default)]
pub struct BasisCache {
    map: DashMap<PlanarWeb, Arc<GradedBasis>>,
}

impl BasisCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Every basis computed so far.
    pub fn bases(&self) -> Vec<Arc<GradedBasis>> {
        self.map.iter().map(|e| e.value().clone()).collect()
    }

    /// Basis of a connected web.
    pub fn basis(&self, web: &PlanarWeb) -> Result<Arc<GradedBasis>> {
        if let Some(b) = self.map.get(web) {
            return Ok(b.clone());
        }
        let b = Arc::new(GradedBasis::connected(web, ReductionPolicy::default())?);
        self.map.insert(web.clone(), b.clone());
        Ok(b)
    }

    pub fn state_space(&self, web: &PlanarWeb) -> Result<StateSpace> {
        let components = web.components();
        let factors = components.iter().map(|c| self.basis(&web.subweb(c))).collect::<Result<Vec<_>>>()?;
        let mut degrees = vec![0i64];
        for f in &factors {
            degrees = degrees.iter().flat_map(|a| f.degrees.iter().map(move |b| a + b)).collect();
        }
        Ok(StateSpace { web: web.clone(), components, factors, degrees })
    }
}

/// Matrix of a movie between state spaces, computed on the components the
/// movie touches and extended by the identity elsewhere.
pub fn movie_matrix(m: &Movie, src: &StateSpace, tgt: &StateSpace) -> Result<SparseMatrix> {
    let mut mentioned = BTreeSet::new();
    for mv in &m.moves {
        match *mv {
            MovieMove::Birth { edge } | MovieMove::Death { edge } | MovieMove::Dot { edge } => {
                mentioned.insert(edge);
            }
            MovieMove::Saddle(SaddleMove::Merge { a, b, .. }) => {
                mentioned.extend([a, b]);
            }
            MovieMove::Saddle(SaddleMove::Split { edge, .. }) => {
                mentioned.insert(edge);
            }
            MovieMove::Zip(z) => {
                mentioned.extend([z.left, z.right]);
            }
            MovieMove::Unzip(u) => {
                mentioned.insert(u.mid);
            }
        }
    }
    let touched: Vec<usize> =
        (0..src.components.len()).filter(|&k| !src.components[k].is_disjoint(&mentioned)).collect();
    // Untouched source components and where they sit in the target.
    let mut kept: Vec<(usize, usize)> = Vec::new();
    for k in 0..src.components.len() {
        if touched.contains(&k) {
            continue;
        }
        let t = tgt
            .components
            .iter()
            .position(|c| *c == src.components[k])
            .filter(|&t| same_web(&tgt.factors[t].web, &src.factors[k].web))
            .ok_or_else(|| Error::Consistency("movie changes a component it does not mention".into()))?;
        kept.push((k, t));
    }
    let new: Vec<usize> = (0..tgt.components.len()).filter(|t| !kept.iter().any(|&(_, x)| x == *t)).collect();

    let lsrc = GradedBasis::tensor(&touched.iter().map(|&k| &*src.factors[k]).collect::<Vec<_>>());
    let ltgt = GradedBasis::tensor(&new.iter().map(|&t| &*tgt.factors[t]).collect::<Vec<_>>());
    let local = cobordism_matrix(&Movie::new(lsrc.web.clone(), m.moves.clone()), &lsrc, &ltgt)?;

    let (ss, ts) = (src.strides(), tgt.strides());
    // Target offset of each local target index.
    let local_tgt: Vec<usize> = (0..ltgt.len())
        .map(|mut x| {
            let mut off = 0;
            for &t in new.iter().rev() {
                let n = tgt.factors[t].len();
                off += (x % n) * ts[t];
                x /= n;
            }
            off
        })
        .collect();
    let mut out = SparseMatrix::new(tgt.dim(), src.dim());
    for s in 0..src.dim() {
        let digit = |k: usize| (s / ss[k]) % src.factors[k].len();
        let mut li = 0;
        for &k in &touched {
            li = li * src.factors[k].len() + digit(k);
        }
        let base: usize = kept.iter().map(|&(k, t)| digit(k) * ts[t]).sum();
        for (lk, &off) in local_tgt.iter().enumerate() {
            let v = local.get(lk, li);
            if v != 0 {
                out.push(base + off, s, v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
