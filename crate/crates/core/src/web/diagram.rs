use serde::{Deserialize, Serialize};

use super::planar::Polarity;
use super::WebError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossingSign {
    #[serde(rename = "pos")]
    Positive,
    #[serde(rename = "neg")]
    Negative,
}

impl CrossingSign {
    pub fn flip(self) -> Self {
        match self {
            CrossingSign::Positive => CrossingSign::Negative,
            CrossingSign::Negative => CrossingSign::Positive,
        }
    }
}

/// A trivalent vertex; `arcs` are listed counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiagramVertex {
    pub polarity: Polarity,
    pub arcs: [usize; 3],
}

/// A crossing with its four arc ends counterclockwise, starting at the
/// incoming end on the left: `[in_left, in_right, out_right, out_left]`.
///
/// `in_left` continues to `out_right` and `in_right` to `out_left`. The sign is
/// positive when the `in_right -> out_left` strand is the over strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub sign: CrossingSign,
    pub ends: [usize; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Tail,
    Head,
}

/// Where an arc end is attached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Port {
    Vertex { vertex: usize, slot: usize },
    Crossing { crossing: usize, slot: usize },
    Join { join: usize },
}

/// A web diagram: arcs glued at trivalent vertices, crossings and 2-valent
/// joins (the head of `joins[i].0` meets the tail of `joins[i].1`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WebDiagram {
    pub arcs: usize,
    pub vertices: Vec<DiagramVertex>,
    pub crossings: Vec<Crossing>,
    pub joins: Vec<(usize, usize)>,
    pub markpoints: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramJson {
    arcs: usize,
    #[serde(default)]
    vertices: Vec<VertexJson>,
    #[serde(default)]
    crossings: Vec<CrossingJson>,
    #[serde(default)]
    joins: Vec<[usize; 2]>,
    #[serde(default)]
    markpoints: Vec<MarkJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexJson {
    polarity: PolarityJson,
    arcs: [usize; 3],
}

#[derive(Serialize, Deserialize, Clone, Copy)]
enum PolarityJson {
    #[serde(rename = "in")]
    In,
    #[serde(rename = "out")]
    Out,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrossingJson {
    sign: CrossingSign,
    ends: [usize; 4],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkJson {
    arc: usize,
}

impl WebDiagram {
    /// Parse and validate a diagram from its JSON code.
    pub fn from_json(s: &str) -> Result<Self, WebError> {
        let raw: DiagramJson = serde_json::from_str(s).map_err(|e| WebError::Malformed(e.to_string()))?;
        let d = WebDiagram {
            arcs: raw.arcs,
            vertices: raw
                .vertices
                .into_iter()
                .map(|v| DiagramVertex {
                    polarity: match v.polarity {
                        PolarityJson::In => Polarity::Sink,
                        PolarityJson::Out => Polarity::Source,
                    },
                    arcs: v.arcs,
                })
                .collect(),
            crossings: raw.crossings.into_iter().map(|c| Crossing { sign: c.sign, ends: c.ends }).collect(),
            joins: raw.joins.into_iter().map(|[a, b]| (a, b)).collect(),
            markpoints: raw.markpoints.into_iter().map(|m| m.arc).collect(),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("diagram serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = DiagramJson {
            arcs: self.arcs,
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson {
                    polarity: match v.polarity {
                        Polarity::Sink => PolarityJson::In,
                        Polarity::Source => PolarityJson::Out,
                    },
                    arcs: v.arcs,
                })
                .collect(),
            crossings: self.crossings.iter().map(|c| CrossingJson { sign: c.sign, ends: c.ends }).collect(),
            joins: self.joins.iter().map(|&(a, b)| [a, b]).collect(),
            markpoints: self.markpoints.iter().map(|&arc| MarkJson { arc }).collect(),
        };
        serde_json::to_value(raw).expect("diagram serializes")
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Numbers of positive and negative crossings.
    pub fn sign_counts(&self) -> (usize, usize) {
        let p = self.crossings.iter().filter(|c| c.sign == CrossingSign::Positive).count();
        (p, self.crossings.len() - p)
    }

    /// The crossing strand continuing an incoming end slot.
    pub fn crossing_exit(slot: usize) -> usize {
        match slot {
            0 => 2,
            1 => 3,
            _ => panic!("slot {slot} is not incoming"),
        }
    }

    /// Attachment of the tail and head of every arc. Fails unless each arc end
    /// is used exactly once.
    pub fn ports(&self) -> Result<Vec<[Port; 2]>, WebError> {
        let n = self.arcs;
        let mut uses: Vec<[Vec<Port>; 2]> = vec![[Vec::new(), Vec::new()]; n];
        let check = |a: usize, what: &str| {
            if a >= n {
                Err(WebError::Malformed(format!("{what} references arc {a}, but there are {n} arcs")))
            } else {
                Ok(())
            }
        };
        for (i, v) in self.vertices.iter().enumerate() {
            let [a, b, c] = v.arcs;
            if a == b || b == c || a == c {
                return Err(WebError::Malformed(format!("vertex {i} repeats an arc")));
            }
            let end = match v.polarity {
                Polarity::Sink => 1,
                Polarity::Source => 0,
            };
            for (slot, &a) in v.arcs.iter().enumerate() {
                check(a, "vertex")?;
                uses[a][end].push(Port::Vertex { vertex: i, slot });
            }
        }
        for (i, c) in self.crossings.iter().enumerate() {
            for (slot, &a) in c.ends.iter().enumerate() {
                check(a, "crossing")?;
                uses[a][usize::from(slot < 2)].push(Port::Crossing { crossing: i, slot });
            }
        }
        for (i, &(a, b)) in self.joins.iter().enumerate() {
            check(a, "join")?;
            check(b, "join")?;
            uses[a][1].push(Port::Join { join: i });
            uses[b][0].push(Port::Join { join: i });
        }
        for &m in &self.markpoints {
            check(m, "markpoint")?;
        }
        let mut out = Vec::with_capacity(n);
        for (a, u) in uses.iter().enumerate() {
            for end in 0..2 {
                if u[end].len() > 1 && u[1 - end].is_empty() {
                    let vertex = u[end].iter().find_map(|p| match p {
                        Port::Vertex { vertex, .. } => Some(*vertex),
                        _ => None,
                    });
                    if let Some(vertex) = vertex {
                        return Err(WebError::Orientation { vertex });
                    }
                }
            }
            for (end, name) in [(0, "tail"), (1, "head")] {
                if u[end].len() != 1 {
                    return Err(WebError::Malformed(format!(
                        "the {name} of arc {a} is used {} times, expected exactly once",
                        u[end].len()
                    )));
                }
            }
            out.push([u[0][0], u[1][0]]);
        }
        Ok(out)
    }

    /// Rotation (arcs with the end attached there) around a node.
    pub(crate) fn node_rotation(&self, node: Node) -> Vec<(usize, End)> {
        match node {
            Node::Vertex(i) => {
                let v = &self.vertices[i];
                let end = match v.polarity {
                    Polarity::Sink => End::Head,
                    Polarity::Source => End::Tail,
                };
                v.arcs.iter().map(|&a| (a, end)).collect()
            }
            Node::Crossing(i) => {
                let e = self.crossings[i].ends;
                vec![(e[0], End::Head), (e[1], End::Head), (e[2], End::Tail), (e[3], End::Tail)]
            }
            Node::Join(i) => {
                let (a, b) = self.joins[i];
                vec![(a, End::Head), (b, End::Tail)]
            }
        }
    }

    pub fn validate(&self) -> Result<(), WebError> {
        let ports = self.ports()?;
        let nodes = self.node_count();
        let node_of = |p: Port| match p {
            Port::Vertex { vertex, .. } => vertex,
            Port::Crossing { crossing, .. } => self.vertices.len() + crossing,
            Port::Join { join } => self.vertices.len() + self.crossings.len() + join,
        };
        let slot_of = |p: Port| match p {
            Port::Vertex { slot, .. } | Port::Crossing { slot, .. } => slot,
            Port::Join { .. } => 0,
        };
        // Faces: arriving at a node through slot k, leave through slot k-1.
        let n = self.arcs;
        let mut face_of = vec![[usize::MAX; 2]; n];
        let mut faces = 0usize;
        for a in 0..n {
            for fwd in [1usize, 0] {
                if face_of[a][fwd] != usize::MAX {
                    continue;
                }
                let (mut arc, mut dir) = (a, fwd);
                while face_of[arc][dir] == usize::MAX {
                    face_of[arc][dir] = faces;
                    let port = ports[arc][dir];
                    let node = self.node_from_port(port);
                    let rot = self.node_rotation(node);
                    let k = match port {
                        Port::Join { .. } => usize::from(dir == 0),
                        _ => slot_of(port),
                    };
                    let (next, end) = rot[(k + rot.len() - 1) % rot.len()];
                    arc = next;
                    dir = usize::from(end == End::Tail);
                }
                faces += 1;
            }
        }
        // Components by union-find over nodes.
        let mut parent: Vec<usize> = (0..nodes).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for pr in &ports {
            let (x, y) = (find(&mut parent, node_of(pr[0])), find(&mut parent, node_of(pr[1])));
            parent[x] = y;
        }
        let mut chi = vec![0i64; nodes];
        let mut present = vec![false; nodes];
        for x in 0..nodes {
            let r = find(&mut parent, x);
            chi[r] += 1;
            present[r] = true;
        }
        let mut comp_faces = vec![std::collections::BTreeSet::new(); nodes];
        for (a, pr) in ports.iter().enumerate() {
            let r = find(&mut parent, node_of(pr[0]));
            chi[r] -= 1;
            comp_faces[r].insert(face_of[a][0]);
            comp_faces[r].insert(face_of[a][1]);
        }
        let mut comp = 0;
        for r in 0..nodes {
            if !present[r] {
                continue;
            }
            let total = chi[r] + comp_faces[r].len() as i64;
            if total != 2 {
                return Err(WebError::NonPlanar { component: comp, genus: (2 - total) / 2 });
            }
            comp += 1;
        }
        Ok(())
    }

    pub(crate) fn node_count(&self) -> usize {
        self.vertices.len() + self.crossings.len() + self.joins.len()
    }

    pub(crate) fn node_from_port(&self, p: Port) -> Node {
        match p {
            Port::Vertex { vertex, .. } => Node::Vertex(vertex),
            Port::Crossing { crossing, .. } => Node::Crossing(crossing),
            Port::Join { join } => Node::Join(join),
        }
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        let Ok(ports) = self.ports() else { return 0 };
        let nv = self.vertices.len();
        let nc = self.crossings.len();
        let idx = |p: Port| match p {
            Port::Vertex { vertex, .. } => vertex,
            Port::Crossing { crossing, .. } => nv + crossing,
            Port::Join { join } => nv + nc + join,
        };
        let n = self.node_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        for pr in &ports {
            let (x, y) = (find(&mut parent, idx(pr[0])), find(&mut parent, idx(pr[1])));
            parent[x] = y;
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Node {
    Vertex(usize),
    Crossing(usize),
    Join(usize),
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const THETA: &str = r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[2,1,0]}]}"#;

    #[test]
    fn parses_theta() {
        let d = WebDiagram::from_json(THETA).unwrap();
        assert_eq!(d.vertices.len(), 2);
        assert_eq!(d.component_count(), 1);
        assert_eq!(WebDiagram::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn rejects_nonplanar_theta() {
        let s = r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[0,1,2]}]}"#;
        assert!(matches!(WebDiagram::from_json(s), Err(WebError::NonPlanar { .. })));
    }

    #[test]
    fn rejects_orientation_violation() {
        let s = r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"in","arcs":[2,1,0]}]}"#;
        assert!(matches!(WebDiagram::from_json(s), Err(WebError::Orientation { .. })));
    }

    #[test]
    fn rejects_unknown_fields() {
        let s = r#"{"arcs":1,"joins":[[0,0]],"colour":"red"}"#;
        assert!(matches!(WebDiagram::from_json(s), Err(WebError::Malformed(_))));
    }

    #[test]
    fn unknot_with_join() {
        let d = WebDiagram::from_json(r#"{"arcs":1,"joins":[[0,0]]}"#).unwrap();
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn rejects_dangling_end() {
        let s = r#"{"arcs":2,"joins":[[0,1]]}"#;
        assert!(WebDiagram::from_json(s).is_err());
    }
}
