use std::collections::HashMap;

use serde::Serialize;

use crate::foam::{apply, splice, MovieMove, Strand, ZipMove};
use crate::web::{EdgeId, PlanarWeb, Polarity, VertexId};
use crate::{Error, Result};

/// Which face a reduction removes next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum ReductionPolicy {
    /// Digons, then squares, then circles; lowest face first.
    #[default]
    DigonsFirst,
    /// Circles, then squares, then digons; highest face first.
    CirclesFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepKind {
    Circle,
    Digon,
    Square,
}

/// One way back from a reduced web: the dot-free moves recreating the
/// current web, and the edge right after the birth that may carry dots.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub creation: Vec<MovieMove>,
    pub dotted_edge: EdgeId,
    pub max_dots: u32,
    pub child: Box<ReductionTree>,
}

/// A reduction of a web down to the empty web. Squares branch in two.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionTree {
    pub web: PlanarWeb,
    pub step: Option<StepKind>,
    pub branches: Vec<Branch>,
}

impl ReductionTree {
    /// Steps along the first branch at every node.
    pub fn steps(&self) -> Vec<StepKind> {
        let mut out = Vec::new();
        let mut t = self;
        while let Some(s) = t.step {
            out.push(s);
            t = &t.branches[0].child;
        }
        out
    }
}

/// Reduce a closed planar web to the empty web.
pub fn reduce(web: &PlanarWeb, policy: ReductionPolicy) -> Result<ReductionTree> {
    if web.is_empty() {
        return Ok(ReductionTree { web: web.clone(), step: None, branches: Vec::new() });
    }
    let faces = web.faces();
    let loops: Vec<EdgeId> = web.loops().collect();
    let digons: Vec<usize> = (0..faces.len()).filter(|&i| faces[i].len() == 2).collect();
    let squares: Vec<usize> = (0..faces.len()).filter(|&i| faces[i].len() == 4).collect();
    let face_edges = |i: usize| faces[i].darts.iter().map(|d| d.edge).collect::<Vec<_>>();
    let (kind, pick): (StepKind, Option<usize>) = match policy {
        ReductionPolicy::DigonsFirst => {
            if let Some(&d) = digons.first() {
                (StepKind::Digon, Some(d))
            } else if let Some(&s) = squares.first() {
                (StepKind::Square, Some(s))
            } else {
                (StepKind::Circle, None)
            }
        }
        ReductionPolicy::CirclesFirst => {
            if !loops.is_empty() {
                (StepKind::Circle, None)
            } else if let Some(&s) = squares.last() {
                (StepKind::Square, Some(s))
            } else if let Some(&d) = digons.last() {
                (StepKind::Digon, Some(d))
            } else {
                (StepKind::Circle, None)
            }
        }
    };
    let branches = match kind {
        StepKind::Circle => {
            let c = match policy {
                ReductionPolicy::DigonsFirst => loops.first(),
                ReductionPolicy::CirclesFirst => loops.last(),
            };
            let Some(&c) = c else {
                return Err(Error::Consistency("closed planar web without a circle, digon or square".into()));
            };
            let mut reduced = web.clone();
            reduced.remove_edge(c);
            vec![Branch {
                creation: vec![MovieMove::Birth { edge: c }],
                dotted_edge: c,
                max_dots: 2,
                child: Box::new(reduce(&reduced, policy)?),
            }]
        }
        StepKind::Digon => {
            let (reduced, creation) = digon_creation(web, &face_edges(pick.unwrap()))?;
            let c = match creation[0] {
                MovieMove::Birth { edge } => edge,
                _ => unreachable!(),
            };
            vec![Branch { creation, dotted_edge: c, max_dots: 1, child: Box::new(reduce(&reduced, policy)?) }]
        }
        StepKind::Square => {
            let edges = face_edges(pick.unwrap());
            let mut out = Vec::new();
            for first in [false, true] {
                let (reduced, creation) = square_creation(web, &edges, first)?;
                let c = match creation[0] {
                    MovieMove::Birth { edge } => edge,
                    _ => unreachable!(),
                };
                out.push(Branch { creation, dotted_edge: c, max_dots: 0, child: Box::new(reduce(&reduced, policy)?) });
            }
            out
        }
    };
    Ok(ReductionTree { web: web.clone(), step: Some(kind), branches })
}

fn consistency(what: &str) -> impl Fn(String) -> Error + '_ {
    move |e| Error::Consistency(format!("{what}: {e}"))
}

/// Name a spliced strand by its first segment, or its smallest one if closed.
fn strand_name(st: &Strand) -> EdgeId {
    if st.closed {
        *st.segments.iter().min().unwrap()
    } else {
        st.segments[0]
    }
}

/// Segments (edges of the unreduced web) making up each edge of a reduced web.
#[derive(Clone, Debug)]
struct Segments {
    map: HashMap<EdgeId, (Vec<EdgeId>, bool)>,
}

impl Segments {
    fn new(reduced: &PlanarWeb, strands: &[Strand]) -> Self {
        let mut map: HashMap<EdgeId, (Vec<EdgeId>, bool)> =
            reduced.edges().iter().map(|(&id, e)| (id, (vec![id], e.is_loop()))).collect();
        for st in strands {
            map.insert(st.id, (st.segments.clone(), st.closed));
        }
        Segments { map }
    }

    /// The current edge whose segments contain `p` followed by `n`.
    fn find(&self, p: EdgeId, n: EdgeId) -> Option<EdgeId> {
        self.map.iter().find_map(|(&id, (segs, closed))| {
            let k = segs.len();
            let hit = (0..k).any(|i| segs[i] == p && (i + 1 < k || *closed) && segs[(i + 1) % k] == n);
            hit.then_some(id)
        })
    }

    /// Cut edge `id` between `p` and `n`; returns (lo id, hi id).
    fn split(&mut self, id: EdgeId, p: EdgeId, n: EdgeId) -> (EdgeId, EdgeId) {
        let (segs, closed) = self.map.remove(&id).unwrap();
        let k = segs.len();
        let i = (0..k).find(|&i| segs[i] == p && segs[(i + 1) % k] == n).unwrap();
        if closed {
            let rot: Vec<EdgeId> = (0..k).map(|j| segs[(i + 1 + j) % k]).collect();
            let name = rot[0];
            self.map.insert(name, (rot, false));
            (name, name)
        } else {
            let lo = segs[..=i].to_vec();
            let hi = segs[i + 1..].to_vec();
            let (l, h) = (lo[0], hi[0]);
            self.map.insert(l, (lo, false));
            self.map.insert(h, (hi, false));
            (l, h)
        }
    }
}

fn third(web: &PlanarWeb, v: VertexId, not: &[EdgeId]) -> EdgeId {
    *web.vertex(v).unwrap().rotation.iter().find(|e| !not.contains(e)).unwrap()
}

fn cyclic_eq(a: [EdgeId; 3], b: [EdgeId; 3]) -> bool {
    (0..3).any(|r| (0..3).all(|j| a[j] == b[(j + r) % 3]))
}

/// Equal as planar webs, rotations compared cyclically.
pub(crate) fn same_web(a: &PlanarWeb, b: &PlanarWeb) -> bool {
    a.edges() == b.edges()
        && a.vertices().len() == b.vertices().len()
        && a.vertices().iter().all(|(id, v)| {
            b.vertex(*id).is_some_and(|w| w.polarity == v.polarity && cyclic_eq(v.rotation, w.rotation))
        })
}

/// The two zips of `strand` with `other`, one for each side.
fn zip_roles(
    strand: (EdgeId, EdgeId, EdgeId),
    other: (EdgeId, EdgeId, EdgeId),
    mid: EdgeId,
    sink: VertexId,
    source: VertexId,
) -> [ZipMove; 2] {
    [(strand, other), (other, strand)].map(|(l, r)| ZipMove {
        left: l.0,
        right: r.0,
        left_lo: l.1,
        left_hi: l.2,
        right_lo: r.1,
        right_hi: r.2,
        mid,
        sink,
        source,
    })
}

/// The first candidate whose replay from `reduced` reproduces `target`.
fn first_replaying(reduced: &PlanarWeb, target: &PlanarWeb, candidates: Vec<Vec<MovieMove>>) -> Option<Vec<MovieMove>> {
    candidates.into_iter().find(|moves| {
        let mut w = reduced.clone();
        moves.iter().all(|m| apply(&mut w, m).is_ok()) && same_web(&w, target)
    })
}

/// Remove a digon face; returns the reduced web and the moves recreating the
/// digon from it (a birth followed by a zip).
fn digon_creation(web: &PlanarWeb, edges: &[EdgeId]) -> Result<(PlanarWeb, Vec<MovieMove>)> {
    let (e1, e2) = (edges[0], edges[1]);
    let ed = web.edge(e1).unwrap();
    let (s, t) = (ed.head.unwrap(), ed.tail.unwrap());
    let f_in = third(web, s, &[e1, e2]);
    let f_out = third(web, t, &[e1, e2]);
    let mut reduced = web.clone();
    let strands = splice(&mut reduced, &[s, t], &[e1, e2], &[(f_in, f_out)], strand_name).map_err(consistency("digon removal"))?;
    let mut segs = Segments::new(&reduced, &strands);
    let cur = segs.find(f_in, f_out).unwrap();
    let (lo, hi) = segs.split(cur, f_in, f_out);
    let mut candidates = Vec::new();
    for (mid, c) in [(e1, e2), (e2, e1)] {
        for z in zip_roles((cur, lo, hi), (c, c, c), mid, s, t) {
            candidates.push(vec![MovieMove::Birth { edge: c }, MovieMove::Zip(z)]);
        }
    }
    let moves = first_replaying(&reduced, web, candidates).ok_or_else(|| Error::Consistency("no zip recreates the digon".into()))?;
    Ok((reduced, moves))
}

/// Remove a square face, pairing the first sink with the first or the second
/// source; returns the reduced web and the recreating moves (a birth and two
/// zips).
fn square_creation(web: &PlanarWeb, edges: &[EdgeId], other_pairing: bool) -> Result<(PlanarWeb, Vec<MovieMove>)> {
    let mut sinks = Vec::new();
    let mut sources = Vec::new();
    for &e in edges {
        let ed = web.edge(e).unwrap();
        for v in [ed.tail.unwrap(), ed.head.unwrap()] {
            let list = if web.vertex(v).unwrap().polarity == Polarity::Sink { &mut sinks } else { &mut sources };
            if !list.contains(&v) {
                list.push(v);
            }
        }
    }
    sinks.sort_unstable();
    sources.sort_unstable();
    let (a, c) = (sinks[0], sinks[1]);
    let (p, q) = if other_pairing { (sources[1], sources[0]) } else { (sources[0], sources[1]) };
    let between = |src: VertexId, snk: VertexId| {
        *edges.iter().find(|&&e| web.edge(e).unwrap().tail == Some(src) && web.edge(e).unwrap().head == Some(snk)).unwrap()
    };
    let (pa, pc, qa, qc) = (between(p, a), between(p, c), between(q, a), between(q, c));
    let (oa, op, oc, oq) = (third(web, a, edges), third(web, p, edges), third(web, c, edges), third(web, q, edges));

    let mut reduced = web.clone();
    let strands = splice(&mut reduced, &[a, p, c, q], edges, &[(oa, op), (oc, oq)], strand_name)
        .map_err(consistency("square removal"))?;
    let mut segs = Segments::new(&reduced, &strands);
    // The born circle becomes a second edge p -> a, which the second zip
    // cuts into p -> c and q -> a.
    let born = pc;
    let s1 = segs.find(oa, op).unwrap();
    let (s1_lo, s1_hi) = segs.split(s1, oa, op);
    let s2 = segs.find(oc, oq).unwrap();
    let (s2_lo, s2_hi) = segs.split(s2, oc, oq);
    let mut candidates = Vec::new();
    for z1 in zip_roles((s1, s1_lo, s1_hi), (born, born, born), pa, a, p) {
        for z2 in zip_roles((s2, s2_lo, s2_hi), (born, pc, qa), qc, c, q) {
            candidates.push(vec![MovieMove::Birth { edge: born }, MovieMove::Zip(z1), MovieMove::Zip(z2)]);
        }
    }
    let moves = first_replaying(&reduced, web, candidates).ok_or_else(|| Error::Consistency("no zips recreate the square".into()))?;
    Ok((reduced, moves))
}
