use super::diagram::{CrossingSign, Port, WebDiagram};
use super::planar::{EdgeId, PlanarEdge, PlanarVertex, PlanarWeb, Polarity, VertexId};

/// A planar resolution together with the web edge carrying each diagram arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub web: PlanarWeb,
    pub arc_edge: Vec<EdgeId>,
}

/// Whether crossing `c` becomes a wide edge under resolution bit `bit`.
pub(crate) fn is_wide(sign: CrossingSign, bit: bool) -> bool {
    match sign {
        CrossingSign::Positive => bit,
        CrossingSign::Negative => !bit,
    }
}

/// Identifier of the wide edge of crossing `c`.
pub(crate) fn wide_edge_id(d: &WebDiagram, c: usize) -> EdgeId {
    (d.arcs + c) as EdgeId
}

/// Sink and source created by the wide edge of crossing `c`.
pub(crate) fn wide_vertices(d: &WebDiagram, c: usize) -> (VertexId, VertexId) {
    let base = (d.vertices.len() + 2 * c) as VertexId;
    (base, base + 1)
}

/// Resolve every crossing according to `bits` (0 = smoothing for a positive
/// crossing, wide edge for a negative one). Edges take the smallest arc id of
/// the chain they contain; wide edges of crossing `c` get id `arcs + c`.
pub fn resolve(d: &WebDiagram, bits: &[bool]) -> Resolution {
    assert_eq!(bits.len(), d.crossings.len(), "one bit per crossing");
    let ports = d.ports().expect("validated diagram");
    let n = d.arcs;
    let wide: Vec<bool> = d.crossings.iter().zip(bits).map(|(c, &b)| is_wide(c.sign, b)).collect();

    // Successor of an arc through a join or a smoothing, if any.
    let succ = |a: usize| -> Option<usize> {
        match ports[a][1] {
            Port::Join { join } => Some(d.joins[join].1),
            Port::Crossing { crossing, slot } if !wide[crossing] => {
                // A smoothing joins in_left to out_left and in_right to out_right.
                Some(d.crossings[crossing].ends[if slot == 0 { 3 } else { 2 }])
            }
            _ => None,
        }
    };
    let starts_chain = |a: usize| match ports[a][0] {
        Port::Vertex { .. } => true,
        Port::Crossing { crossing, .. } => wide[crossing],
        Port::Join { .. } => false,
    };

    let mut chain_of = vec![usize::MAX; n];
    let mut chains: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        if !starts_chain(a) {
            continue;
        }
        let mut ch = vec![a];
        let mut x = a;
        while let Some(y) = succ(x) {
            ch.push(y);
            x = y;
        }
        for &x in &ch {
            chain_of[x] = chains.len();
        }
        chains.push(ch);
    }
    let mut loops = Vec::new();
    for a in 0..n {
        if chain_of[a] != usize::MAX {
            continue;
        }
        let mut ch = vec![a];
        chain_of[a] = chains.len();
        let mut x = succ(a).expect("loop arcs continue");
        while x != a {
            chain_of[x] = chains.len();
            ch.push(x);
            x = succ(x).expect("loop arcs continue");
        }
        loops.push(chains.len());
        chains.push(ch);
    }
    let chain_id: Vec<EdgeId> = chains.iter().map(|c| *c.iter().min().unwrap() as EdgeId).collect();
    let arc_edge: Vec<EdgeId> = (0..n).map(|a| chain_id[chain_of[a]]).collect();

    let vertex_of_port = |p: Port, head: bool| -> VertexId {
        match p {
            Port::Vertex { vertex, .. } => vertex as VertexId,
            Port::Crossing { crossing, .. } => {
                let (s, t) = wide_vertices(d, crossing);
                if head {
                    s
                } else {
                    t
                }
            }
            Port::Join { .. } => unreachable!("chains end at vertices"),
        }
    };

    let mut web = PlanarWeb::new();
    for (i, ch) in chains.iter().enumerate() {
        let e = if loops.contains(&i) {
            PlanarEdge::LOOP
        } else {
            PlanarEdge {
                tail: Some(vertex_of_port(ports[ch[0]][0], false)),
                head: Some(vertex_of_port(ports[*ch.last().unwrap()][1], true)),
            }
        };
        web.insert_edge(chain_id[i], e);
    }
    for (i, v) in d.vertices.iter().enumerate() {
        web.insert_vertex(i as VertexId, PlanarVertex { polarity: v.polarity, rotation: v.arcs.map(|a| arc_edge[a]) });
    }
    for (c, cr) in d.crossings.iter().enumerate() {
        if !wide[c] {
            continue;
        }
        let m = wide_edge_id(d, c);
        let (s, t) = wide_vertices(d, c);
        let [il, ir, or, ol] = cr.ends.map(|a| arc_edge[a]);
        web.insert_edge(m, PlanarEdge { tail: Some(t), head: Some(s) });
        web.insert_vertex(s, PlanarVertex { polarity: Polarity::Sink, rotation: [m, il, ir] });
        web.insert_vertex(t, PlanarVertex { polarity: Polarity::Source, rotation: [or, ol, m] });
    }
    Resolution { web, arc_edge }
}

/// The planar web obtained by resolving every crossing according to `bits`.
pub fn resolution_web(d: &WebDiagram, bits: &[bool]) -> PlanarWeb {
    resolve(d, bits).web
}

/// The web edge carrying each arc in the resolution `bits`.
pub fn arc_edge_map(d: &WebDiagram, bits: &[bool]) -> Vec<EdgeId> {
    resolve(d, bits).arc_edge
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single positive crossing closed into a two-component unlink-like
    /// picture: arcs 0..4 with in_L=0, in_R=1, out_R=2, out_L=3, joined
    /// 2->0 and 3->1 (a one-crossing diagram of the unknot).
    fn kink() -> WebDiagram {
        WebDiagram::from_json(
            r#"{"arcs":4,"crossings":[{"sign":"pos","ends":[0,1,2,3]}],"joins":[[2,1],[3,0]]}"#,
        )
        .unwrap()
    }

    #[test]
    fn resolutions_of_a_kink() {
        let d = kink();
        let w0 = resolution_web(&d, &[false]);
        w0.validate().unwrap();
        assert_eq!(w0.vertices().len(), 0);
        let w1 = resolution_web(&d, &[true]);
        w1.validate().unwrap();
        assert_eq!(w1.vertices().len(), 2);
        assert_eq!(w1.edges().len(), 3);
    }
}
