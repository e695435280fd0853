//! Canonical relabeling of web diagrams, for isomorphism tests.

use std::collections::{HashMap, VecDeque};

use super::diagram::{Crossing, CrossingSign, DiagramVertex, Node, Port, WebDiagram};
use super::moves::simplify_joins;
use super::planar::Polarity;

/// A relabeled copy of `d` that is equal for two diagrams exactly when they
/// are isomorphic as oriented planar diagrams with the same crossing data and
/// mark points. Joins between distinct arcs are contracted first.
///
/// Each component is labeled by a breadth-first walk from every possible
/// starting arc and the lexicographically least result is kept.
pub fn canonical_form(d: &WebDiagram) -> WebDiagram {
    let mut d = d.clone();
    simplify_joins(&mut d);
    let Ok(ports) = d.ports() else { return d };
    let comps = components(&d, &ports);
    let mut pieces: Vec<(Vec<i64>, WebDiagram)> = comps
        .iter()
        .map(|arcs| {
            arcs.iter()
                .map(|&start| {
                    let e = relabel(&d, &ports, start);
                    (key(&e), e)
                })
                .min_by(|a, b| a.0.cmp(&b.0))
                .expect("components are nonempty")
        })
        .collect();
    pieces.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = WebDiagram::default();
    for (_, p) in pieces {
        let off = out.arcs;
        out.arcs += p.arcs;
        out.vertices.extend(p.vertices.iter().map(|v| DiagramVertex { polarity: v.polarity, arcs: v.arcs.map(|a| a + off) }));
        out.crossings.extend(p.crossings.iter().map(|c| Crossing { sign: c.sign, ends: c.ends.map(|a| a + off) }));
        out.joins.extend(p.joins.iter().map(|&(a, b)| (a + off, b + off)));
        out.markpoints.extend(p.markpoints.iter().map(|&a| a + off));
    }
    out
}

fn node_of(p: Port) -> Node {
    match p {
        Port::Vertex { vertex, .. } => Node::Vertex(vertex),
        Port::Crossing { crossing, .. } => Node::Crossing(crossing),
        Port::Join { join } => Node::Join(join),
    }
}

fn components(d: &WebDiagram, ports: &[[Port; 2]]) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; d.arcs];
    let mut out = Vec::new();
    for a in 0..d.arcs {
        if comp[a] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut arcs = Vec::new();
        let mut stack = vec![a];
        comp[a] = id;
        while let Some(x) = stack.pop() {
            arcs.push(x);
            for p in ports[x] {
                for (y, _) in d.node_rotation(node_of(p)) {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        stack.push(y);
                    }
                }
            }
        }
        arcs.sort_unstable();
        out.push(arcs);
    }
    out
}

/// The component of `start`, relabeled by a deterministic walk from it.
fn relabel(d: &WebDiagram, ports: &[[Port; 2]], start: usize) -> WebDiagram {
    let mut label: HashMap<usize, usize> = HashMap::new();
    let mut seen: HashMap<Node, ()> = HashMap::new();
    let mut queue = VecDeque::new();
    label.insert(start, 0);
    queue.push_back(start);
    let mut nodes = Vec::new();
    while let Some(a) = queue.pop_front() {
        for p in ports[a] {
            let node = node_of(p);
            if seen.insert(node, ()).is_some() {
                continue;
            }
            nodes.push(node);
            let rot = d.node_rotation(node);
            let from = match (node, p) {
                (Node::Vertex(_), Port::Vertex { slot, .. }) => slot,
                _ => 0,
            };
            for i in 0..rot.len() {
                let (x, _) = rot[(from + i) % rot.len()];
                if !label.contains_key(&x) {
                    label.insert(x, label.len());
                    queue.push_back(x);
                }
            }
        }
    }
    let l = |a: usize| label[&a];
    let mut out = WebDiagram { arcs: label.len(), ..WebDiagram::default() };
    for node in nodes {
        match node {
            Node::Vertex(i) => {
                let v = d.vertices[i];
                let mut arcs = v.arcs.map(l);
                let k = (0..3).min_by_key(|&k| arcs[k]).unwrap();
                arcs.rotate_left(k);
                out.vertices.push(DiagramVertex { polarity: v.polarity, arcs });
            }
            Node::Crossing(i) => {
                let c = d.crossings[i];
                out.crossings.push(Crossing { sign: c.sign, ends: c.ends.map(l) });
            }
            Node::Join(i) => out.joins.push((l(d.joins[i].0), l(d.joins[i].1))),
        }
    }
    out.vertices.sort_by_key(|v| v.arcs);
    out.crossings.sort_by_key(|c| c.ends);
    out.joins.sort_unstable();
    out.markpoints = d.markpoints.iter().filter_map(|a| label.get(a).copied()).collect();
    out.markpoints.sort_unstable();
    out
}

fn key(d: &WebDiagram) -> Vec<i64> {
    let mut k = vec![d.arcs as i64, d.vertices.len() as i64, d.crossings.len() as i64, d.joins.len() as i64];
    for v in &d.vertices {
        k.push(i64::from(v.polarity == Polarity::Source));
        k.extend(v.arcs.iter().map(|&a| a as i64));
    }
    for c in &d.crossings {
        k.push(i64::from(c.sign == CrossingSign::Positive));
        k.extend(c.ends.iter().map(|&a| a as i64));
    }
    for &(a, b) in &d.joins {
        k.extend([a as i64, b as i64]);
    }
    k.push(d.markpoints.len() as i64);
    k.extend(d.markpoints.iter().map(|&a| a as i64));
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeled_theta_is_recognised() {
        let a = WebDiagram::from_json(r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[2,1,0]}]}"#)
            .unwrap();
        let b = WebDiagram::from_json(r#"{"arcs":3,"vertices":[{"polarity":"out","arcs":[1,0,2]},{"polarity":"in","arcs":[0,1,2]}]}"#)
            .unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn joins_are_contracted() {
        let kink = WebDiagram::from_json(r#"{"arcs":4,"crossings":[{"sign":"pos","ends":[0,1,2,3]}],"joins":[[2,1],[3,0]]}"#)
            .unwrap();
        let plain = WebDiagram::from_json(r#"{"arcs":2,"crossings":[{"sign":"pos","ends":[1,0,0,1]}]}"#).unwrap();
        assert_eq!(canonical_form(&kink), canonical_form(&plain));
        let mirror = WebDiagram::from_json(r#"{"arcs":2,"crossings":[{"sign":"neg","ends":[1,0,0,1]}]}"#).unwrap();
        assert_ne!(canonical_form(&kink), canonical_form(&mirror));
    }
}
