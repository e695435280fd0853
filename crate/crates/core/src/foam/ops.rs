use std::collections::{BTreeSet, HashMap};

use super::{MovieMove, SaddleMove, UnzipMove, ZipMove};
use crate::web::{Dart, EdgeId, PlanarEdge, PlanarVertex, PlanarWeb, Polarity, Side, VertexId};

/// A strand produced by [`splice`]: the old edges it is made of, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strand {
    pub id: EdgeId,
    pub segments: Vec<EdgeId>,
    pub closed: bool,
}

fn dart(e: EdgeId, side: Side) -> Dart {
    Dart { edge: e, forward: side == Side::Left }
}

/// Whether the given darts lie in a common face, or in different components.
fn share_face(web: &PlanarWeb, x: Dart, y: Dart) -> bool {
    let comps = web.components();
    let cx = comps.iter().position(|c| c.contains(&x.edge));
    let cy = comps.iter().position(|c| c.contains(&y.edge));
    if cx != cy {
        return true;
    }
    let faces = web.faces();
    let idx = PlanarWeb::face_index(&faces);
    idx[&x] == idx[&y]
}

/// A side on which `x` and `y` face each other.
pub(crate) fn facing_side(web: &PlanarWeb, x: EdgeId, y: EdgeId) -> Side {
    if share_face(web, dart(x, Side::Left), dart(y, Side::Left)) {
        Side::Left
    } else {
        Side::Right
    }
}

fn need_edge(web: &PlanarWeb, e: EdgeId) -> Result<PlanarEdge, String> {
    web.edge(e).copied().ok_or_else(|| format!("edge {e} does not exist"))
}

fn fresh_edges(web: &PlanarWeb, ids: &[EdgeId], removed: &[EdgeId]) -> Result<(), String> {
    for &i in ids {
        if web.edge(i).is_some() && !removed.contains(&i) {
            return Err(format!("edge id {i} is already in use"));
        }
    }
    Ok(())
}

/// Apply one movie move in place.
pub fn apply(web: &mut PlanarWeb, m: &MovieMove) -> Result<(), String> {
    match *m {
        MovieMove::Birth { edge } => web.add_loop(edge).map_err(|e| e.to_string()),
        MovieMove::Death { edge } => {
            if !need_edge(web, edge)?.is_loop() {
                return Err(format!("edge {edge} is not a loop"));
            }
            web.remove_edge(edge);
            Ok(())
        }
        MovieMove::Dot { edge } => need_edge(web, edge).map(|_| ()),
        MovieMove::Zip(z) => {
            let mut w = web.clone();
            zip(&mut w, &z)?;
            *web = w;
            Ok(())
        }
        MovieMove::Unzip(u) => unzip(web, &u).map(|_| ()),
        MovieMove::Saddle(s) => {
            let mut w = web.clone();
            saddle(&mut w, &s)?;
            *web = w;
            Ok(())
        }
    }
}

fn attach_arc(web: &mut PlanarWeb, old: EdgeId, id: EdgeId, tail: Option<VertexId>, head: Option<VertexId>) {
    web.insert_edge(id, PlanarEdge { tail, head });
    if let Some(t) = tail {
        web.replace_in_rotation(t, old, id);
    }
    if let Some(h) = head {
        web.replace_in_rotation(h, old, id);
    }
}

fn zip(web: &mut PlanarWeb, z: &ZipMove) -> Result<(), String> {
    let ea = need_edge(web, z.left)?;
    let eb = need_edge(web, z.right)?;
    if !share_face(web, dart(z.left, Side::Right), dart(z.right, Side::Left)) {
        return Err(format!("edges {} and {} do not face each other", z.left, z.right));
    }
    if z.sink == z.source || web.vertex(z.sink).is_some() || web.vertex(z.source).is_some() {
        return Err("zip vertices must be fresh".into());
    }
    let removed = [z.left, z.right];
    fresh_edges(web, &[z.left_lo, z.left_hi, z.right_lo, z.right_hi, z.mid], &removed)?;
    let (s, t) = (Some(z.sink), Some(z.source));
    web.remove_edge(z.left);
    web.remove_edge(z.right);
    if z.left != z.right {
        let mut ids = BTreeSet::from([z.mid]);
        for (x, ex, lo, hi) in [(z.left, ea, z.left_lo, z.left_hi), (z.right, eb, z.right_lo, z.right_hi)] {
            if ex.is_loop() {
                if lo != hi {
                    return Err(format!("zipping loop {x} needs equal lo and hi ids"));
                }
                if !ids.insert(lo) {
                    return Err(format!("edge id {lo} is used twice"));
                }
                web.insert_edge(lo, PlanarEdge { tail: t, head: s });
            } else {
                if lo == hi || !ids.insert(lo) || !ids.insert(hi) {
                    return Err(format!("zipping arc {x} needs distinct fresh ids"));
                }
                attach_arc(web, x, lo, ex.tail, s);
                attach_arc(web, x, hi, t, ex.head);
            }
        }
    } else {
        let e = z.left;
        let distinct: BTreeSet<_> = [z.left_lo, z.left_hi, z.right_lo, z.right_hi, z.mid].into_iter().collect();
        if ea.is_loop() {
            if z.left_hi != z.right_lo || z.right_hi != z.left_lo || distinct.len() != 3 {
                return Err(format!("self-zip of loop {e} needs left_hi = right_lo and right_hi = left_lo"));
            }
            web.insert_edge(z.left_hi, PlanarEdge { tail: t, head: s });
            web.insert_edge(z.right_hi, PlanarEdge { tail: t, head: s });
        } else if distinct.len() != 4 {
            return Err(format!("self-zip of arc {e} needs exactly one shared id"));
        } else if z.left_hi == z.right_lo {
            attach_arc(web, e, z.left_lo, ea.tail, s);
            web.insert_edge(z.left_hi, PlanarEdge { tail: t, head: s });
            attach_arc(web, e, z.right_hi, t, ea.head);
        } else if z.right_hi == z.left_lo {
            attach_arc(web, e, z.right_lo, ea.tail, s);
            web.insert_edge(z.right_hi, PlanarEdge { tail: t, head: s });
            attach_arc(web, e, z.left_hi, t, ea.head);
        } else {
            return Err(format!("self-zip of arc {e} needs left_hi = right_lo or right_hi = left_lo"));
        }
    }
    web.insert_edge(z.mid, PlanarEdge { tail: t, head: s });
    web.insert_vertex(z.sink, PlanarVertex { polarity: Polarity::Sink, rotation: [z.right_lo, z.mid, z.left_lo] });
    web.insert_vertex(z.source, PlanarVertex { polarity: Polarity::Source, rotation: [z.right_hi, z.left_hi, z.mid] });
    Ok(())
}

/// The four strand ends around a wide edge: (left_lo, right_lo, left_hi, right_hi).
pub(crate) fn wide_edge_ends(web: &PlanarWeb, mid: EdgeId) -> Result<(VertexId, VertexId, [EdgeId; 4]), String> {
    let em = need_edge(web, mid)?;
    let (Some(t), Some(s)) = (em.tail, em.head) else {
        return Err(format!("edge {mid} is a loop"));
    };
    let sv = web.vertex(s).unwrap();
    let tv = web.vertex(t).unwrap();
    let ks = sv.position(mid).unwrap();
    let kt = tv.position(mid).unwrap();
    Ok((
        s,
        t,
        [sv.rotation[(ks + 1) % 3], sv.rotation[(ks + 2) % 3], tv.rotation[(kt + 2) % 3], tv.rotation[(kt + 1) % 3]],
    ))
}

pub(crate) fn unzip(web: &mut PlanarWeb, u: &UnzipMove) -> Result<Vec<Strand>, String> {
    let (s, t, [a_lo, b_lo, a_hi, b_hi]) = wide_edge_ends(web, u.mid)?;
    let mut check = web.clone();
    let strands = splice(&mut check, &[s, t], &[u.mid], &[(a_lo, a_hi), (b_lo, b_hi)], |st| {
        if st.segments.contains(&a_lo) {
            u.left
        } else {
            u.right
        }
    })?;
    let merged = strands.len() == 1;
    if merged != (u.left == u.right) {
        return Err(if merged {
            format!("unzipping {} leaves one strand, so left and right must coincide", u.mid)
        } else {
            format!("unzipping {} leaves two strands, so left and right must differ", u.mid)
        });
    }
    *web = check;
    Ok(strands)
}

/// Remove `vertices` and `internal` edges, joining the head of `x` to the tail
/// of `y` for each `(x, y)` in `links`, and name each resulting strand.
pub fn splice(
    web: &mut PlanarWeb,
    vertices: &[VertexId],
    internal: &[EdgeId],
    links: &[(EdgeId, EdgeId)],
    name: impl Fn(&Strand) -> EdgeId,
) -> Result<Vec<Strand>, String> {
    let next: HashMap<EdgeId, EdgeId> = links.iter().copied().collect();
    let prev: HashMap<EdgeId, EdgeId> = links.iter().map(|&(x, y)| (y, x)).collect();
    let mut involved: Vec<EdgeId> = links.iter().flat_map(|&(x, y)| [x, y]).collect();
    involved.sort_unstable();
    involved.dedup();
    let mut seen = BTreeSet::new();
    let mut strands = Vec::new();
    for &e in &involved {
        if prev.contains_key(&e) || seen.contains(&e) {
            continue;
        }
        let mut segs = vec![e];
        seen.insert(e);
        let mut x = e;
        while let Some(&y) = next.get(&x) {
            if !seen.insert(y) {
                return Err("splice links do not form paths".into());
            }
            segs.push(y);
            x = y;
        }
        strands.push(Strand { id: 0, segments: segs, closed: false });
    }
    for &e in &involved {
        if seen.contains(&e) {
            continue;
        }
        let mut segs = vec![e];
        seen.insert(e);
        let mut x = next[&e];
        while x != e {
            seen.insert(x);
            segs.push(x);
            x = next[&x];
        }
        strands.push(Strand { id: 0, segments: segs, closed: true });
    }
    for st in &mut strands {
        st.id = name(st);
    }
    let ends: Vec<(Option<VertexId>, Option<VertexId>)> = strands
        .iter()
        .map(|st| {
            if st.closed {
                (None, None)
            } else {
                (web.edge(st.segments[0]).unwrap().tail, web.edge(*st.segments.last().unwrap()).unwrap().head)
            }
        })
        .collect();
    for &v in vertices {
        web.remove_vertex(v);
    }
    for &e in internal.iter().chain(&involved) {
        web.remove_edge(e);
    }
    let mut ids = BTreeSet::new();
    for (st, &(tail, head)) in strands.iter().zip(&ends) {
        if web.edge(st.id).is_some() || !ids.insert(st.id) {
            return Err(format!("edge id {} is already in use", st.id));
        }
        web.insert_edge(st.id, PlanarEdge { tail, head });
        if let Some(t) = tail {
            web.replace_in_rotation(t, st.segments[0], st.id);
        }
        if let Some(h) = head {
            web.replace_in_rotation(h, *st.segments.last().unwrap(), st.id);
        }
    }
    Ok(strands)
}

fn saddle(web: &mut PlanarWeb, s: &SaddleMove) -> Result<(), String> {
    match *s {
        SaddleMove::Merge { a, b, side, ab, ba } => {
            let ea = need_edge(web, a)?;
            let eb = need_edge(web, b)?;
            if a == b {
                return Err("a merge saddle needs two different edges".into());
            }
            if !share_face(web, dart(a, side), dart(b, side)) {
                return Err(format!("edges {a} and {b} do not face each other"));
            }
            fresh_edges(web, &[ab, ba], &[a, b])?;
            web.remove_edge(a);
            web.remove_edge(b);
            match (ea.is_loop(), eb.is_loop()) {
                (false, false) => {
                    if ab == ba {
                        return Err("a merge of two arcs needs two ids".into());
                    }
                    web.insert_edge(ab, PlanarEdge { tail: ea.tail, head: eb.head });
                    web.insert_edge(ba, PlanarEdge { tail: eb.tail, head: ea.head });
                    web.replace_in_rotation(ea.tail.unwrap(), a, ab);
                    web.replace_in_rotation(eb.head.unwrap(), b, ab);
                    web.replace_in_rotation(eb.tail.unwrap(), b, ba);
                    web.replace_in_rotation(ea.head.unwrap(), a, ba);
                }
                (true, true) => web.insert_edge(ab, PlanarEdge::LOOP),
                (true, false) => attach_arc(web, b, ab, eb.tail, eb.head),
                (false, true) => attach_arc(web, a, ab, ea.tail, ea.head),
            }
            Ok(())
        }
        SaddleMove::Split { edge, keep, new_loop, .. } => {
            let e = need_edge(web, edge)?;
            if keep == new_loop {
                return Err("a split saddle needs two ids".into());
            }
            fresh_edges(web, &[keep, new_loop], &[edge])?;
            web.remove_edge(edge);
            attach_arc(web, edge, keep, e.tail, e.head);
            web.insert_edge(new_loop, PlanarEdge::LOOP);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_circles() -> PlanarWeb {
        let mut w = PlanarWeb::new();
        w.add_loop(0).unwrap();
        w.add_loop(1).unwrap();
        w
    }

    fn zip01() -> ZipMove {
        ZipMove { left: 0, right: 1, left_lo: 0, left_hi: 0, right_lo: 1, right_hi: 1, mid: 2, sink: 0, source: 1 }
    }

    #[test]
    fn zip_two_circles_gives_theta() {
        let mut w = two_circles();
        apply(&mut w, &MovieMove::Zip(zip01())).unwrap();
        w.validate().unwrap();
        assert_eq!(w.vertices().len(), 2);
        assert_eq!(w.faces().len(), 3);
    }

    #[test]
    fn unzip_undoes_zip() {
        let mut w = two_circles();
        apply(&mut w, &MovieMove::Zip(zip01())).unwrap();
        let strands = unzip(&mut w, &UnzipMove { mid: 2, left: 0, right: 1 }).unwrap();
        assert_eq!(strands.len(), 2);
        assert!(strands.iter().all(|s| s.closed));
        assert_eq!(w, two_circles());
    }

    #[test]
    fn saddle_merges_and_splits_loops() {
        let mut w = two_circles();
        let m = SaddleMove::Merge { a: 0, b: 1, side: Side::Left, ab: 5, ba: 5 };
        apply(&mut w, &MovieMove::Saddle(m)).unwrap();
        assert_eq!(w.edges().len(), 1);
        let s = SaddleMove::Split { edge: 5, side: Side::Left, keep: 0, new_loop: 1 };
        apply(&mut w, &MovieMove::Saddle(s)).unwrap();
        assert_eq!(w, two_circles());
    }

    #[test]
    fn zip_needs_fresh_vertices() {
        let mut w = two_circles();
        apply(&mut w, &MovieMove::Zip(zip01())).unwrap();
        w.add_loop(7).unwrap();
        w.add_loop(8).unwrap();
        let z = ZipMove { left: 7, right: 8, left_lo: 7, left_hi: 7, right_lo: 8, right_hi: 8, mid: 9, sink: 0, source: 3 };
        assert!(apply(&mut w, &MovieMove::Zip(z)).is_err());
    }
}
