use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::WebError;

pub type EdgeId = u32;
pub type VertexId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    /// All three edges point in.
    Sink,
    /// All three edges point out.
    Source,
}

/// A trivalent vertex with its edges listed counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanarVertex {
    pub polarity: Polarity,
    pub rotation: [EdgeId; 3],
}

impl PlanarVertex {
    pub fn position(&self, e: EdgeId) -> Option<usize> {
        self.rotation.iter().position(|&x| x == e)
    }
}

/// An oriented edge. Both ends are `None` for a vertexless loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanarEdge {
    pub tail: Option<VertexId>,
    pub head: Option<VertexId>,
}

impl PlanarEdge {
    pub const LOOP: PlanarEdge = PlanarEdge { tail: None, head: None };

    pub fn is_loop(&self) -> bool {
        self.tail.is_none() && self.head.is_none()
    }
}

/// The side of an oriented edge, looking along its orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A side of an oriented edge: `forward` walks tail to head and sees the left
/// side of the edge on its left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dart {
    pub edge: EdgeId,
    pub forward: bool,
}

/// A face boundary traced with the face on the left.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Face {
    pub darts: Vec<Dart>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

/// A closed planar web with stable edge and vertex identifiers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanarWeb {
    vertices: BTreeMap<VertexId, PlanarVertex>,
    edges: BTreeMap<EdgeId, PlanarEdge>,
}

impl PlanarWeb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &BTreeMap<VertexId, PlanarVertex> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeMap<EdgeId, PlanarEdge> {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> Option<&PlanarVertex> {
        self.vertices.get(&v)
    }

    pub fn edge(&self, e: EdgeId) -> Option<&PlanarEdge> {
        self.edges.get(&e)
    }

    pub fn loops(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().filter(|(_, e)| e.is_loop()).map(|(&id, _)| id)
    }

    /// `#vertices - #edges`, with loops counted as circles (contributing 0).
    pub fn euler_characteristic(&self) -> i64 {
        let arcs = self.edges.values().filter(|e| !e.is_loop()).count();
        self.vertices.len() as i64 - arcs as i64
    }

    pub fn next_edge_id(&self) -> EdgeId {
        self.edges.keys().next_back().map_or(0, |&e| e + 1)
    }

    pub fn next_vertex_id(&self) -> VertexId {
        self.vertices.keys().next_back().map_or(0, |&v| v + 1)
    }

    pub fn add_loop(&mut self, id: EdgeId) -> Result<(), WebError> {
        if self.edges.contains_key(&id) {
            return Err(WebError::InvalidWeb(format!("edge {id} already exists")));
        }
        self.edges.insert(id, PlanarEdge::LOOP);
        Ok(())
    }

    pub(crate) fn insert_edge(&mut self, id: EdgeId, e: PlanarEdge) {
        self.edges.insert(id, e);
    }

    pub(crate) fn insert_vertex(&mut self, id: VertexId, v: PlanarVertex) {
        self.vertices.insert(id, v);
    }

    pub(crate) fn remove_edge(&mut self, id: EdgeId) -> Option<PlanarEdge> {
        self.edges.remove(&id)
    }

    pub(crate) fn remove_vertex(&mut self, id: VertexId) -> Option<PlanarVertex> {
        self.vertices.remove(&id)
    }

    pub(crate) fn replace_in_rotation(&mut self, v: VertexId, old: EdgeId, new: EdgeId) {
        if let Some(vx) = self.vertices.get_mut(&v) {
            if let Some(p) = vx.position(old) {
                vx.rotation[p] = new;
            }
        }
    }

    /// Rename edges and vertices. Identifiers missing from the maps are kept.
    pub fn relabel(&self, edges: &HashMap<EdgeId, EdgeId>, vertices: &HashMap<VertexId, VertexId>) -> Self {
        let ve = |e: EdgeId| *edges.get(&e).unwrap_or(&e);
        let vv = |v: VertexId| *vertices.get(&v).unwrap_or(&v);
        let mut out = PlanarWeb::new();
        for (&id, v) in &self.vertices {
            out.vertices.insert(
                vv(id),
                PlanarVertex { polarity: v.polarity, rotation: v.rotation.map(ve) },
            );
        }
        for (&id, e) in &self.edges {
            out.edges.insert(ve(id), PlanarEdge { tail: e.tail.map(vv), head: e.head.map(vv) });
        }
        out
    }

    /// Check incidence, bipartiteness and planarity.
    pub fn validate(&self) -> Result<(), WebError> {
        let bad = |m: String| Err(WebError::InvalidWeb(m));
        for (&id, e) in &self.edges {
            match (e.tail, e.head) {
                (None, None) => {}
                (Some(t), Some(h)) => {
                    let (Some(tv), Some(hv)) = (self.vertices.get(&t), self.vertices.get(&h)) else {
                        return bad(format!("edge {id} has a missing endpoint"));
                    };
                    if tv.polarity != Polarity::Source || hv.polarity != Polarity::Sink {
                        return bad(format!("edge {id} does not run from a source to a sink"));
                    }
                    if tv.position(id).is_none() || hv.position(id).is_none() {
                        return bad(format!("edge {id} is missing from a rotation"));
                    }
                }
                _ => return bad(format!("edge {id} has exactly one endpoint")),
            }
        }
        for (&id, v) in &self.vertices {
            let r = v.rotation;
            if r[0] == r[1] || r[1] == r[2] || r[0] == r[2] {
                return bad(format!("vertex {id} repeats an edge"));
            }
            for e in r {
                let Some(edge) = self.edges.get(&e) else {
                    return bad(format!("vertex {id} references missing edge {e}"));
                };
                let end = match v.polarity {
                    Polarity::Sink => edge.head,
                    Polarity::Source => edge.tail,
                };
                if end != Some(id) {
                    return bad(format!("edge {e} is not attached to vertex {id} correctly"));
                }
            }
        }
        for (comp, (v, e, f)) in self.component_counts().into_iter().enumerate() {
            let chi = v as i64 - e as i64 + f as i64;
            if chi != 2 {
                return Err(WebError::NonPlanar { component: comp, genus: (2 - chi) / 2 });
            }
        }
        Ok(())
    }

    pub fn dart_start(&self, d: Dart) -> Option<VertexId> {
        let e = self.edges[&d.edge];
        if d.forward {
            e.tail
        } else {
            e.head
        }
    }

    pub fn dart_end(&self, d: Dart) -> Option<VertexId> {
        let e = self.edges[&d.edge];
        if d.forward {
            e.head
        } else {
            e.tail
        }
    }

    /// The next dart along the face to the left of `d`.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        let Some(v) = self.dart_end(d) else {
            return d;
        };
        let vx = &self.vertices[&v];
        let k = vx.position(d.edge).expect("edge in rotation");
        let e = vx.rotation[(k + 2) % 3];
        Dart { edge: e, forward: self.edges[&e].tail == Some(v) }
    }

    /// All faces, numbered by first appearance when scanning darts in edge
    /// order (forward before backward).
    pub fn faces(&self) -> Vec<Face> {
        let mut seen = BTreeSet::new();
        let mut faces = Vec::new();
        for &e in self.edges.keys() {
            for forward in [true, false] {
                let start = Dart { edge: e, forward };
                if seen.contains(&start) {
                    continue;
                }
                let mut darts = Vec::new();
                let mut d = start;
                loop {
                    seen.insert(d);
                    darts.push(d);
                    d = self.next_in_face(d);
                    if d == start {
                        break;
                    }
                }
                faces.push(Face { darts });
            }
        }
        faces
    }

    /// Map from dart to the index of its face in [`PlanarWeb::faces`].
    pub fn face_index(faces: &[Face]) -> HashMap<Dart, usize> {
        let mut m = HashMap::new();
        for (i, f) in faces.iter().enumerate() {
            for &d in &f.darts {
                m.insert(d, i);
            }
        }
        m
    }

    /// The sub-web made of the given edges and the vertices they meet.
    pub fn subweb(&self, edges: &BTreeSet<EdgeId>) -> PlanarWeb {
        let mut w = PlanarWeb::new();
        for &e in edges {
            let edge = self.edges[&e];
            w.edges.insert(e, edge);
            for v in [edge.tail, edge.head].into_iter().flatten() {
                w.vertices.insert(v, self.vertices[&v]);
            }
        }
        w
    }

    /// Connected components as sets of edge ids.
    pub fn components(&self) -> Vec<BTreeSet<EdgeId>> {
        let mut seen: BTreeSet<EdgeId> = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.edges.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(e) = stack.pop() {
                if !comp.insert(e) {
                    continue;
                }
                let edge = self.edges[&e];
                for v in [edge.tail, edge.head].into_iter().flatten() {
                    for &x in &self.vertices[&v].rotation {
                        if !comp.contains(&x) {
                            stack.push(x);
                        }
                    }
                }
            }
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// (vertices, edges, faces) per component, loops counted as one vertex and
    /// one edge so every planar component has Euler characteristic 2.
    fn component_counts(&self) -> Vec<(usize, usize, usize)> {
        let faces = self.faces();
        let fidx = Self::face_index(&faces);
        self.components()
            .into_iter()
            .map(|comp| {
                let mut verts = BTreeSet::new();
                let mut loops = 0;
                for &e in &comp {
                    let edge = self.edges[&e];
                    if edge.is_loop() {
                        loops += 1;
                    }
                    verts.extend([edge.tail, edge.head].into_iter().flatten());
                }
                let fs: BTreeSet<usize> = comp
                    .iter()
                    .flat_map(|&e| [fidx[&Dart { edge: e, forward: true }], fidx[&Dart { edge: e, forward: false }]])
                    .collect();
                (verts.len() + loops, comp.len(), fs.len())
            })
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Sink 0 with edges 0,1,2 ccw; source 1. Edges all run 1 -> 0.
    pub fn theta() -> PlanarWeb {
        let mut w = PlanarWeb::new();
        w.insert_vertex(0, PlanarVertex { polarity: Polarity::Sink, rotation: [0, 1, 2] });
        w.insert_vertex(1, PlanarVertex { polarity: Polarity::Source, rotation: [2, 1, 0] });
        for e in 0..3 {
            w.insert_edge(e, PlanarEdge { tail: Some(1), head: Some(0) });
        }
        w
    }

    #[test]
    fn theta_has_three_digon_faces() {
        let w = theta();
        w.validate().unwrap();
        let faces = w.faces();
        assert_eq!(faces.len(), 3);
        assert!(faces.iter().all(|f| f.len() == 2));
        assert_eq!(w.euler_characteristic(), -1);
    }

    #[test]
    fn theta_with_equal_rotations_is_not_planar() {
        let mut w = theta();
        w.insert_vertex(1, PlanarVertex { polarity: Polarity::Source, rotation: [0, 1, 2] });
        assert!(matches!(w.validate(), Err(WebError::NonPlanar { .. })));
    }

    #[test]
    fn loop_faces() {
        let mut w = PlanarWeb::new();
        w.add_loop(4).unwrap();
        w.validate().unwrap();
        assert_eq!(w.faces().len(), 2);
        assert_eq!(w.euler_characteristic(), 0);
        assert_eq!(w.components().len(), 1);
    }
}
