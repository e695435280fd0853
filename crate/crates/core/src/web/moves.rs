//! Reidemeister moves I–V on web diagrams.
//!
//! Moves that add crossings are laid out from a small local picture: every
//! strand through a new crossing gets a direction vector in the plane, and the
//! crossing's slot order and sign follow from those vectors. Moves that remove
//! crossings are named by a side of an arc on the face they collapse.

use serde::{Deserialize, Serialize};

use super::diagram::{Crossing, CrossingSign, End, Port, WebDiagram};
use super::planar::Polarity;
use super::WebError;

type Result<T> = std::result::Result<T, WebError>;

/// The face on the left (`left`) or right of an arc, looking along it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArcSide {
    pub arc: usize,
    pub left: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    I,
    II,
    III,
    IV,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case", deny_unknown_fields)]
pub enum Move {
    /// Curl the arc into the face on `side`, with a crossing of sign `sign`.
    AddKink { side: ArcSide, sign: CrossingSign },
    /// Undo a curl whose monogon face lies on `side`.
    RemoveKink { side: ArcSide },
    /// Push one arc over another through a face both border. The two sides
    /// may name the same arc, and then `under_first` says which of the two
    /// pieces comes first along it.
    AddBigon {
        over: ArcSide,
        under: ArcSide,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        under_first: bool,
    },
    /// Pull apart the two crossings around the bigon face on `side`.
    RemoveBigon { side: ArcSide },
    /// Slide a strand across the crossing opposite the triangle face on `side`.
    Triangle { side: ArcSide },
    /// `arc` runs from a vertex to a crossing; slide the other strand of that
    /// crossing across the vertex so it crosses the two other edges instead.
    PushAcrossVertex { arc: usize },
    /// Slide the strand on the triangle face on `side` (a vertex and two
    /// crossings) back across the vertex.
    PullAcrossVertex { side: ArcSide },
    /// Twist the edges at slots `slot` and `slot + 1` of a vertex around each
    /// other.
    Twist { vertex: usize, slot: usize, sign: CrossingSign },
    /// Undo a twist whose bigon face (a vertex and a crossing) lies on `side`.
    Untwist { side: ArcSide },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::AddKink { .. } | Move::RemoveKink { .. } => MoveKind::I,
            Move::AddBigon { .. } | Move::RemoveBigon { .. } => MoveKind::II,
            Move::Triangle { .. } => MoveKind::III,
            Move::PushAcrossVertex { .. } | Move::PullAcrossVertex { .. } => MoveKind::IV,
            Move::Twist { .. } | Move::Untwist { .. } => MoveKind::V,
        }
    }

    /// Change in the number of crossings.
    pub fn crossing_change(&self) -> i64 {
        match self {
            Move::AddKink { .. } | Move::PushAcrossVertex { .. } | Move::Twist { .. } => 1,
            Move::RemoveKink { .. } | Move::PullAcrossVertex { .. } | Move::Untwist { .. } => -1,
            Move::AddBigon { .. } => 2,
            Move::RemoveBigon { .. } => -2,
            Move::Triangle { .. } => 0,
        }
    }

    /// The same move with arcs renamed by `map`.
    fn renamed(self, map: &[usize]) -> Move {
        let r = |s: ArcSide| ArcSide { arc: map[s.arc], left: s.left };
        match self {
            Move::AddKink { side, sign } => Move::AddKink { side: r(side), sign },
            Move::RemoveKink { side } => Move::RemoveKink { side: r(side) },
            Move::AddBigon { over, under, under_first } => Move::AddBigon { over: r(over), under: r(under), under_first },
            Move::RemoveBigon { side } => Move::RemoveBigon { side: r(side) },
            Move::Triangle { side } => Move::Triangle { side: r(side) },
            Move::PushAcrossVertex { arc } => Move::PushAcrossVertex { arc: map[arc] },
            Move::PullAcrossVertex { side } => Move::PullAcrossVertex { side: r(side) },
            Move::Twist { .. } => self,
            Move::Untwist { side } => Move::Untwist { side: r(side) },
        }
    }
}

fn mismatch(msg: impl Into<String>) -> WebError {
    WebError::MoveNotApplicable(msg.into())
}

fn idx(e: End) -> usize {
    match e {
        End::Tail => 0,
        End::Head => 1,
    }
}

/// A strand through a crossing that is about to be built.
#[derive(Clone, Copy, Debug)]
struct Strand {
    dir: (i64, i64),
    inc: usize,
    out: usize,
}

impl Strand {
    /// Strand met while walking along `walk` from arc `before` to arc `after`;
    /// the strand's own orientation agrees with the walk when `forward`.
    fn walked(walk: (i64, i64), forward: bool, before: usize, after: usize) -> Strand {
        if forward {
            Strand { dir: walk, inc: before, out: after }
        } else {
            Strand { dir: (-walk.0, -walk.1), inc: after, out: before }
        }
    }
}

fn cross(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

fn crossing(s: Strand, t: Strand, s_over: bool) -> Crossing {
    let c = cross(s.dir, t.dir);
    assert!(c != 0, "parallel strands");
    let (l, r, r_over) = if c > 0 { (s, t, !s_over) } else { (t, s, s_over) };
    let sign = if r_over { CrossingSign::Positive } else { CrossingSign::Negative };
    Crossing { sign, ends: [l.inc, r.inc, l.out, r.out] }
}

fn signed_crossing(s: Strand, t: Strand, sign: CrossingSign) -> Crossing {
    let s_is_right = cross(s.dir, t.dir) < 0;
    crossing(s, t, (sign == CrossingSign::Positive) == s_is_right)
}

/// Whether the strand entering `c` at in-slot `slot` is the over strand.
fn over_at(c: &Crossing, slot: usize) -> bool {
    (slot == 1) == (c.sign == CrossingSign::Positive)
}

/// In-slot of the strand through `slot`.
fn strand_in(slot: usize) -> usize {
    slot % 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Loc {
    Vertex(usize, usize),
    Crossing(usize, usize),
    JoinHead(usize),
    JoinTail(usize),
}

fn locate(d: &WebDiagram, arc: usize, end: End) -> Option<Loc> {
    for (i, v) in d.vertices.iter().enumerate() {
        let e = if v.polarity == Polarity::Sink { End::Head } else { End::Tail };
        if e == end {
            if let Some(s) = v.arcs.iter().position(|&x| x == arc) {
                return Some(Loc::Vertex(i, s));
            }
        }
    }
    for (i, c) in d.crossings.iter().enumerate() {
        for s in 0..4 {
            if c.ends[s] == arc && (s < 2) == (end == End::Head) {
                return Some(Loc::Crossing(i, s));
            }
        }
    }
    for (i, &(a, b)) in d.joins.iter().enumerate() {
        if end == End::Head && a == arc {
            return Some(Loc::JoinHead(i));
        }
        if end == End::Tail && b == arc {
            return Some(Loc::JoinTail(i));
        }
    }
    None
}

fn set(d: &mut WebDiagram, loc: Loc, arc: usize) {
    match loc {
        Loc::Vertex(i, s) => d.vertices[i].arcs[s] = arc,
        Loc::Crossing(i, s) => d.crossings[i].ends[s] = arc,
        Loc::JoinHead(i) => d.joins[i].0 = arc,
        Loc::JoinTail(i) => d.joins[i].1 = arc,
    }
}

fn new_arc(d: &mut WebDiagram) -> usize {
    d.arcs += 1;
    d.arcs - 1
}

/// Drop the arcs in `dead`, each paired with the arc that inherits its mark
/// points, and renumber. Returns the old-to-new map; dead arcs map to their
/// heir.
fn drop_arcs(d: &mut WebDiagram, dead: &[(usize, usize)]) -> Vec<usize> {
    let mut heir: Vec<usize> = (0..d.arcs).collect();
    for &(x, h) in dead {
        heir[x] = h;
    }
    let root = |mut x: usize| {
        let mut steps = 0;
        while heir[x] != x && steps <= heir.len() {
            x = heir[x];
            steps += 1;
        }
        x
    };
    let mut map = vec![usize::MAX; d.arcs];
    let mut next = 0;
    for a in 0..d.arcs {
        if heir[a] == a {
            map[a] = next;
            next += 1;
        }
    }
    for a in 0..d.arcs {
        map[a] = map[root(a)];
    }
    for v in d.vertices.iter_mut() {
        v.arcs = v.arcs.map(|a| map[a]);
    }
    for c in d.crossings.iter_mut() {
        c.ends = c.ends.map(|a| map[a]);
    }
    for j in d.joins.iter_mut() {
        *j = (map[j.0], map[j.1]);
    }
    for m in d.markpoints.iter_mut() {
        *m = map[*m];
    }
    d.arcs = next;
    map
}

/// Contract every join between two distinct arcs into a single arc. Returns
/// the old-to-new arc map.
pub fn simplify_joins(d: &mut WebDiagram) -> Vec<usize> {
    let mut dead = Vec::new();
    while let Some(i) = d.joins.iter().position(|&(a, b)| a != b) {
        let (a, b) = d.joins.remove(i);
        let loc = locate(d, b, End::Head).expect("every arc has a head");
        set(d, loc, a);
        dead.push((b, a));
    }
    drop_arcs(d, &dead)
}

/// Replace a crossing by two joins that let each strand pass straight through.
fn dissolve(d: &mut WebDiagram, c: usize) {
    let x = d.crossings.remove(c);
    d.joins.push((x.ends[0], x.ends[2]));
    d.joins.push((x.ends[1], x.ends[3]));
}

fn remove_crossings(d: &mut WebDiagram, cs: &[usize]) {
    let mut cs = cs.to_vec();
    cs.sort_unstable_by(|a, b| b.cmp(a));
    for c in cs {
        d.crossings.remove(c);
    }
}

/// The face walk starting on `side`: each step is an arc and the end walked
/// towards, with the face on the left of the walk.
pub fn face_walk(d: &WebDiagram, side: ArcSide) -> Result<Vec<(usize, End)>> {
    if side.arc >= d.arcs {
        return Err(mismatch(format!("arc {} does not exist", side.arc)));
    }
    let ports = d.ports()?;
    Ok(walk(d, &ports, side))
}

fn walk(d: &WebDiagram, ports: &[[Port; 2]], side: ArcSide) -> Vec<(usize, End)> {
    let start = (side.arc, if side.left { End::Head } else { End::Tail });
    let mut out = Vec::new();
    let (mut arc, mut dir) = start;
    loop {
        out.push((arc, dir));
        let port = ports[arc][idx(dir)];
        let rot = d.node_rotation(d.node_from_port(port));
        let k = match port {
            Port::Join { .. } => usize::from(dir == End::Tail),
            Port::Vertex { slot, .. } | Port::Crossing { slot, .. } => slot,
        };
        let (next, end) = rot[(k + rot.len() - 1) % rot.len()];
        arc = next;
        dir = if end == End::Tail { End::Head } else { End::Tail };
        if (arc, dir) == start {
            return out;
        }
    }
}

fn port_crossing(p: Port) -> Option<(usize, usize)> {
    match p {
        Port::Crossing { crossing, slot } => Some((crossing, slot)),
        _ => None,
    }
}

fn port_vertex(p: Port) -> Option<(usize, usize)> {
    match p {
        Port::Vertex { vertex, slot } => Some((vertex, slot)),
        _ => None,
    }
}

/// Apply a move; the result is validated.
pub fn apply_move(d: &WebDiagram, m: &Move) -> Result<WebDiagram> {
    apply_move_with_inverse(d, m).map(|r| r.0)
}

/// Apply a move and return the move that undoes it on the result.
pub fn apply_move_with_inverse(d: &WebDiagram, m: &Move) -> Result<(WebDiagram, Move)> {
    if d.joins.iter().any(|&(a, b)| a != b) {
        return Err(mismatch("the diagram has joins between distinct arcs; simplify it first"));
    }
    let ports = d.ports()?;
    let mut out = d.clone();
    let inverse = match *m {
        Move::AddKink { side, sign } => add_kink(&mut out, side, sign)?,
        Move::RemoveKink { side } => remove_kink(&mut out, &ports, side)?,
        Move::AddBigon { over, under, under_first } => add_bigon(&mut out, &ports, over, under, under_first)?,
        Move::RemoveBigon { side } => remove_bigon(&mut out, &ports, side)?,
        Move::Triangle { side } => triangle(&mut out, &ports, side)?,
        Move::PushAcrossVertex { arc } => push_across_vertex(&mut out, &ports, arc)?,
        Move::PullAcrossVertex { side } => pull_across_vertex(&mut out, &ports, side)?,
        Move::Twist { vertex, slot, sign } => twist(&mut out, vertex, slot, sign)?,
        Move::Untwist { side } => untwist(&mut out, &ports, side)?,
    };
    let map = simplify_joins(&mut out);
    let inverse = inverse.renamed(&map);
    out.validate()?;
    Ok((out, inverse))
}

fn check_side(d: &WebDiagram, side: ArcSide) -> Result<()> {
    if side.arc >= d.arcs {
        return Err(mismatch(format!("arc {} does not exist", side.arc)));
    }
    Ok(())
}

fn add_kink(d: &mut WebDiagram, side: ArcSide, sign: CrossingSign) -> Result<Move> {
    check_side(d, side)?;
    let a = side.arc;
    let head = locate(d, a, End::Head).expect("every arc has a head");
    let a2 = new_arc(d);
    let lp = new_arc(d);
    set(d, head, a2);
    // The arc runs along +x; the curl sits above it when on the left.
    let (u1, u2) = if side.left { ((1, 1), (1, -1)) } else { ((1, -1), (1, 1)) };
    let first = Strand { dir: u1, inc: a, out: lp };
    let second = Strand { dir: u2, inc: lp, out: a2 };
    d.crossings.push(signed_crossing(first, second, sign));
    Ok(Move::RemoveKink { side: ArcSide { arc: lp, left: side.left } })
}

fn remove_kink(d: &mut WebDiagram, ports: &[[Port; 2]], side: ArcSide) -> Result<Move> {
    check_side(d, side)?;
    let face = walk(d, ports, side);
    let lp = side.arc;
    let (Some((c, t)), Some((c2, h))) = (port_crossing(ports[lp][0]), port_crossing(ports[lp][1])) else {
        return Err(mismatch("expected a curl: an arc leaving and entering the same crossing"));
    };
    if face.len() != 1 || c != c2 {
        return Err(mismatch("expected a monogon face"));
    }
    let x = d.crossings[c];
    let left = (t, h) == (3, 0);
    let a = x.ends[strand_in(t)];
    dissolve(d, c);
    let map = simplify_joins(d);
    Ok(Move::AddKink { side: ArcSide { arc: map[a], left }, sign: x.sign })
}

fn add_bigon(d: &mut WebDiagram, ports: &[[Port; 2]], over: ArcSide, under: ArcSide, under_first: bool) -> Result<Move> {
    check_side(d, over)?;
    check_side(d, under)?;
    if over.arc == under.arc && over.left != under.left {
        return Err(mismatch("a bigon on a single arc needs both pieces on the same side"));
    }
    if over.arc != under.arc && under_first {
        return Err(mismatch("piece order only applies to a single arc"));
    }
    let face = walk(d, ports, over);
    let under_step = (under.arc, if under.left { End::Head } else { End::Tail });
    if !face.contains(&under_step) {
        return Err(mismatch("the two sides do not lie on a common face"));
    }
    // Split each arc into three pieces, listed in walking order.
    let mut pieces = |side: ArcSide| {
        let a = side.arc;
        let head = locate(d, a, End::Head).expect("every arc has a head");
        let mid = new_arc(d);
        let last = new_arc(d);
        set(d, head, last);
        if side.left {
            [a, mid, last]
        } else {
            [last, mid, a]
        }
    };
    let (a, b) = if over.arc == under.arc {
        // Five pieces along the arc; the second and fourth cross.
        let p0 = over.arc;
        let head = locate(d, p0, End::Head).expect("every arc has a head");
        let p: Vec<usize> = std::iter::once(p0).chain((0..4).map(|_| new_arc(d))).collect();
        set(d, head, p[4]);
        let triple = |k: usize| if over.left { [p[k - 1], p[k], p[k + 1]] } else { [p[k + 1], p[k], p[k - 1]] };
        let (ko, ku) = if under_first { (3, 1) } else { (1, 3) };
        (triple(ko), triple(ku))
    } else {
        (pieces(over), pieces(under))
    };
    // `under` walks along +x below the face, `over` along -x above it and
    // dips below `under` between the two new crossings.
    let right = crossing(
        Strand::walked((0, -1), over.left, a[0], a[1]),
        Strand::walked((1, 0), under.left, b[1], b[2]),
        true,
    );
    let left = crossing(
        Strand::walked((0, 1), over.left, a[1], a[2]),
        Strand::walked((1, 0), under.left, b[0], b[1]),
        true,
    );
    d.crossings.push(right);
    d.crossings.push(left);
    Ok(Move::RemoveBigon { side: ArcSide { arc: b[1], left: !under.left } })
}

fn remove_bigon(d: &mut WebDiagram, ports: &[[Port; 2]], side: ArcSide) -> Result<Move> {
    check_side(d, side)?;
    let face = walk(d, ports, side);
    if face.len() != 2 {
        return Err(mismatch("expected a bigon face"));
    }
    let mut ends = Vec::new();
    for &(arc, _) in &face {
        let (Some(t), Some(h)) = (port_crossing(ports[arc][0]), port_crossing(ports[arc][1])) else {
            return Err(mismatch("expected a bigon between two crossings"));
        };
        ends.push((arc, t, h));
    }
    let (c1, c2) = (ends[0].1 .0, ends[0].2 .0);
    if c1 == c2 {
        return Err(mismatch("expected two distinct crossings"));
    }
    let over = |(_, t, h): (usize, (usize, usize), (usize, usize))| {
        (over_at(&d.crossings[t.0], strand_in(t.1)), over_at(&d.crossings[h.0], strand_in(h.1)))
    };
    let (o1, o2) = over(ends[0]);
    if o1 != o2 {
        return Err(mismatch("the bigon's strands are not over at both crossings"));
    }
    let (p, q) = (ends[0].0, ends[1].0);
    let (op, oq) = if o1 { (p, q) } else { (q, p) };
    let side_of = |arc: usize| face.iter().find(|s| s.0 == arc).unwrap().1 == End::Tail;
    let (lo, lu) = (side_of(op), side_of(oq));
    let mut cs = [c1, c2];
    cs.sort_unstable_by(|a, b| b.cmp(a));
    for c in cs {
        dissolve(d, c);
    }
    // If both strands end up on one arc, record which piece comes first.
    let mut under_first = false;
    let mut x = op;
    for _ in 0..d.arcs {
        let Some(&(prev, _)) = d.joins.iter().find(|j| j.1 == x && j.0 != x) else { break };
        if prev == oq {
            under_first = true;
            break;
        }
        if prev == op {
            break;
        }
        x = prev;
    }
    let map = simplify_joins(d);
    Ok(Move::AddBigon {
        over: ArcSide { arc: map[op], left: lo },
        under: ArcSide { arc: map[oq], left: lu },
        under_first: under_first && map[op] == map[oq],
    })
}

fn triangle(d: &mut WebDiagram, ports: &[[Port; 2]], side: ArcSide) -> Result<Move> {
    check_side(d, side)?;
    let face = walk(d, ports, side);
    if face.len() != 3 {
        return Err(mismatch("expected a triangle face"));
    }
    // (middle arc, (crossing, out slot) at its tail, (crossing, in slot) at its head)
    let mut sides = Vec::new();
    for &(arc, _) in &face {
        let (Some(p), Some(q)) = (port_crossing(ports[arc][0]), port_crossing(ports[arc][1])) else {
            return Err(mismatch("expected a triangle of three crossings"));
        };
        sides.push((arc, p, q));
    }
    let mut cs: Vec<usize> = sides.iter().map(|s| s.1 .0).collect();
    cs.sort_unstable();
    cs.dedup();
    if cs.len() != 3 || sides.iter().any(|s| s.1 .0 == s.2 .0) {
        return Err(mismatch("expected three distinct crossings"));
    }
    let movable = sides.iter().any(|&(_, p, q)| {
        over_at(&d.crossings[p.0], strand_in(p.1)) == over_at(&d.crossings[q.0], strand_in(q.1))
    });
    if !movable {
        return Err(mismatch("the triangle's crossings are cyclically over and under"));
    }
    let old = d.crossings.clone();
    for &(m, (p, ps), (q, qs)) in &sides {
        let pin = strand_in(ps);
        let x = old[p].ends[pin];
        let y = old[q].ends[WebDiagram::crossing_exit(qs)];
        d.crossings[q].ends[qs] = x;
        d.crossings[q].ends[WebDiagram::crossing_exit(qs)] = m;
        d.crossings[p].ends[pin] = m;
        d.crossings[p].ends[ps] = y;
    }
    Ok(Move::Triangle { side: ArcSide { arc: side.arc, left: !side.left } })
}

fn vertex_dir(p: Polarity) -> bool {
    p == Polarity::Source
}

fn push_across_vertex(d: &mut WebDiagram, ports: &[[Port; 2]], p3: usize) -> Result<Move> {
    if p3 >= d.arcs {
        return Err(mismatch(format!("arc {p3} does not exist")));
    }
    let pr = ports[p3];
    let ((v, k3), (c, t)) = match (port_vertex(pr[0]), port_crossing(pr[1]), port_crossing(pr[0]), port_vertex(pr[1])) {
        (Some(a), Some(b), _, _) | (_, _, Some(b), Some(a)) => (a, b),
        _ => return Err(mismatch("expected an arc from a vertex to a crossing")),
    };
    let source = vertex_dir(d.vertices[v].polarity);
    let x0 = d.crossings[c];
    // Around the crossing: p3 points down, then the strand's east end, then
    // the continuation of p3, then the west end.
    let east = (t + 1) % 4;
    let sigma: i64 = if east >= 2 { 1 } else { -1 };
    let sin = if sigma == 1 { (t + 3) % 4 } else { east };
    let (x, y) = (x0.ends[sin], x0.ends[WebDiagram::crossing_exit(sin)]);
    let q3 = x0.ends[(t + 2) % 4];
    let over = over_at(&x0, sin);
    let vx = d.vertices[v].arcs;
    let (p1, p2) = (vx[(k3 + 1) % 3], vx[(k3 + 2) % 3]);
    let n1 = new_arc(d);
    let n2 = new_arc(d);
    let m = new_arc(d);
    d.vertices[v].arcs[k3] = q3;
    d.vertices[v].arcs[(k3 + 1) % 3] = n1;
    d.vertices[v].arcs[(k3 + 2) % 3] = n2;
    d.crossings.remove(c);
    // The vertex sits at the origin with p3 up, p1 down-left, p2 down-right;
    // the strand now runs along y = -1.
    let e1 = Strand::walked((-2, -1), source, n1, p1);
    let e2 = Strand::walked((2, -1), source, n2, p2);
    let (sa, sb) = if sigma == 1 {
        (Strand { dir: (1, 0), inc: x, out: m }, Strand { dir: (1, 0), inc: m, out: y })
    } else {
        (Strand { dir: (-1, 0), inc: m, out: y }, Strand { dir: (-1, 0), inc: x, out: m })
    };
    d.crossings.push(crossing(sa, e1, over));
    d.crossings.push(crossing(sb, e2, over));
    let map = drop_arcs(d, &[(p3, q3)]);
    Ok(Move::PullAcrossVertex { side: ArcSide { arc: map[m], left: sigma == 1 } })
}

fn pull_across_vertex(d: &mut WebDiagram, ports: &[[Port; 2]], side: ArcSide) -> Result<Move> {
    check_side(d, side)?;
    let face = walk(d, ports, side);
    if face.len() != 3 {
        return Err(mismatch("expected a triangle face"));
    }
    let n = face.len();
    // Find the step that arrives at the vertex.
    let Some(i) = face.iter().position(|&(a, e)| port_vertex(ports[a][idx(e)]).is_some()) else {
        return Err(mismatch("expected a triangle with a vertex"));
    };
    let (n2, e2) = face[i];
    let (n1, e1end) = face[(i + 1) % n];
    let (m, _) = face[(i + 2) % n];
    let (v, k) = port_vertex(ports[n2][idx(e2)]).unwrap();
    let Some((v1, k1)) = port_vertex(ports[n1][1 - idx(e1end)]) else {
        return Err(mismatch("expected a triangle with a vertex"));
    };
    if v1 != v || k1 != (k + 2) % 3 {
        return Err(mismatch("expected a triangle with a vertex"));
    }
    let (Some(a), Some(b)) = (port_crossing(ports[n1][idx(e1end)]), port_crossing(ports[n2][1 - idx(e2)])) else {
        return Err(mismatch("expected the vertex's edges to end at crossings"));
    };
    let (Some(mt), Some(mh)) = (port_crossing(ports[m][0]), port_crossing(ports[m][1])) else {
        return Err(mismatch("expected the third side between two crossings"));
    };
    if a.0 == b.0 || !((mt.0 == a.0 && mh.0 == b.0) || (mt.0 == b.0 && mh.0 == a.0)) {
        return Err(mismatch("expected a triangle of a vertex and two crossings"));
    }
    let sigma: i64 = if mt.0 == a.0 { 1 } else { -1 };
    let (ca, cb) = (d.crossings[a.0], d.crossings[b.0]);
    let (xin, yout) = if sigma == 1 { ((ca, mt.1), (cb, mh.1)) } else { ((cb, mt.1), (ca, mh.1)) };
    let x = xin.0.ends[strand_in(xin.1)];
    let y = yout.0.ends[WebDiagram::crossing_exit(yout.1)];
    let over = over_at(&ca, strand_in(if sigma == 1 { mt.1 } else { mh.1 }));
    if over != over_at(&cb, strand_in(if sigma == 1 { mh.1 } else { mt.1 })) {
        return Err(mismatch("the strand is not over at both crossings"));
    }
    let f1 = ca.ends[(a.1 + 2) % 4];
    let f2 = cb.ends[(b.1 + 2) % 4];
    let source = vertex_dir(d.vertices[v].polarity);
    let k3 = (k + 1) % 3;
    let p3 = d.vertices[v].arcs[k3];
    let n3 = new_arc(d);
    d.vertices[v].arcs[k1] = f1;
    d.vertices[v].arcs[k] = f2;
    d.vertices[v].arcs[k3] = n3;
    remove_crossings(d, &[a.0, b.0]);
    let s = Strand { dir: (sigma, 0), inc: x, out: y };
    let e3 = Strand::walked((0, 1), source, n3, p3);
    d.crossings.push(crossing(s, e3, over));
    let map = drop_arcs(d, &[(n1, f1), (n2, f2), (m, x)]);
    Ok(Move::PushAcrossVertex { arc: map[n3] })
}

fn twist(d: &mut WebDiagram, vertex: usize, slot: usize, sign: CrossingSign) -> Result<Move> {
    if vertex >= d.vertices.len() || slot >= 3 {
        return Err(mismatch(format!("vertex {vertex} slot {slot} does not exist")));
    }
    let source = vertex_dir(d.vertices[vertex].polarity);
    let vx = d.vertices[vertex].arcs;
    let (pi, pj) = (vx[slot], vx[(slot + 1) % 3]);
    let sa = new_arc(d);
    let sb = new_arc(d);
    d.vertices[vertex].arcs[slot] = sa;
    d.vertices[vertex].arcs[(slot + 1) % 3] = sb;
    // Slot edges leave the vertex up-right and up-left and cross above it.
    let a = Strand::walked((-1, 1), source, sa, pj);
    let b = Strand::walked((1, 1), source, sb, pi);
    d.crossings.push(signed_crossing(a, b, sign));
    Ok(Move::Untwist { side: ArcSide { arc: sa, left: source } })
}

fn untwist(d: &mut WebDiagram, ports: &[[Port; 2]], side: ArcSide) -> Result<Move> {
    check_side(d, side)?;
    let face = walk(d, ports, side);
    if face.len() != 2 {
        return Err(mismatch("expected a bigon face"));
    }
    let Some(i) = face.iter().position(|&(a, e)| port_vertex(ports[a][idx(e)]).is_some()) else {
        return Err(mismatch("expected a bigon between a vertex and a crossing"));
    };
    let (sb, eb) = face[i];
    let (sa, ea) = face[(i + 1) % 2];
    let (v, k) = port_vertex(ports[sb][idx(eb)]).unwrap();
    let (Some((va, ka)), Some(cb), Some(ca)) =
        (port_vertex(ports[sa][1 - idx(ea)]), port_crossing(ports[sb][1 - idx(eb)]), port_crossing(ports[sa][idx(ea)]))
    else {
        return Err(mismatch("expected a bigon between a vertex and a crossing"));
    };
    if va != v || ca.0 != cb.0 || ka != (k + 2) % 3 {
        return Err(mismatch("expected a bigon between a vertex and a crossing"));
    }
    let c = d.crossings[ca.0];
    let ta = c.ends[(ca.1 + 2) % 4];
    let tb = c.ends[(cb.1 + 2) % 4];
    d.vertices[v].arcs[ka] = tb;
    d.vertices[v].arcs[k] = ta;
    d.crossings.remove(ca.0);
    drop_arcs(d, &[(sa, tb), (sb, ta)]);
    Ok(Move::Twist { vertex: v, slot: ka, sign: c.sign })
}

/// Every move that applies to `d`, with both over/under and sign choices for
/// moves that add crossings. Kinks are added on the left only.
pub fn candidate_moves(d: &WebDiagram) -> Vec<Move> {
    let Ok(ports) = d.ports() else { return Vec::new() };
    let mut out = Vec::new();
    let signs = [CrossingSign::Positive, CrossingSign::Negative];
    let sides: Vec<ArcSide> =
        (0..d.arcs).flat_map(|arc| [true, false].map(|left| ArcSide { arc, left })).collect();
    for &side in &sides {
        for sign in signs {
            out.push(Move::AddKink { side, sign });
        }
        out.extend([
            Move::RemoveKink { side },
            Move::RemoveBigon { side },
            Move::Triangle { side },
            Move::PullAcrossVertex { side },
            Move::Untwist { side },
        ]);
    }
    let mut seen = std::collections::HashSet::new();
    for &side in &sides {
        let face = walk(d, &ports, side);
        let mut key: Vec<_> = face.clone();
        key.sort();
        if !seen.insert(key) {
            continue;
        }
        let on: Vec<ArcSide> = face.iter().map(|&(arc, e)| ArcSide { arc, left: e == End::Head }).collect();
        for &a in &on {
            for &b in &on {
                if a.arc != b.arc {
                    out.push(Move::AddBigon { over: a, under: b, under_first: false });
                } else if a == b {
                    out.extend([false, true].map(|under_first| Move::AddBigon { over: a, under: b, under_first }));
                }
            }
        }
    }
    out.extend((0..d.arcs).map(|arc| Move::PushAcrossVertex { arc }));
    for vertex in 0..d.vertices.len() {
        for slot in 0..3 {
            for sign in signs {
                out.push(Move::Twist { vertex, slot, sign });
            }
        }
    }
    out.retain(|m| apply_move(d, m).is_ok());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::web::canonical_form;

    const THETA: &str = r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[2,1,0]}]}"#;
    const LOOP: &str = r#"{"arcs":1,"joins":[[0,0]]}"#;

    fn roundtrip(d: &WebDiagram, m: &Move) {
        let (e, inv) = apply_move_with_inverse(d, m).unwrap();
        assert_eq!(e.crossings.len() as i64, d.crossings.len() as i64 + m.crossing_change(), "{m:?}");
        let back = apply_move(&e, &inv).unwrap_or_else(|err| panic!("{m:?} then {inv:?}: {err}"));
        assert_eq!(canonical_form(&back), canonical_form(d), "{m:?} then {inv:?}");
    }

    #[test]
    fn twist_on_theta_adds_one_crossing() {
        let d = WebDiagram::from_json(THETA).unwrap();
        let e = apply_move(&d, &Move::Twist { vertex: 0, slot: 0, sign: CrossingSign::Positive }).unwrap();
        assert_eq!(e.crossings.len(), 1);
        assert_eq!(e.crossings[0].sign, CrossingSign::Positive);
    }

    #[test]
    fn every_candidate_move_is_undone_by_its_inverse() {
        let mut d = WebDiagram::from_json(THETA).unwrap();
        for m in [
            Move::Twist { vertex: 0, slot: 1, sign: CrossingSign::Negative },
            Move::AddKink { side: ArcSide { arc: 0, left: false }, sign: CrossingSign::Positive },
            Move::AddBigon { over: ArcSide { arc: 1, left: true }, under: ArcSide { arc: 2, left: false }, under_first: false },
        ] {
            if let Ok(e) = apply_move(&d, &m) {
                d = e;
            }
        }
        assert!(d.crossings.len() >= 2);
        let ms = candidate_moves(&d);
        for kind in [MoveKind::I, MoveKind::II, MoveKind::IV, MoveKind::V] {
            assert!(ms.iter().any(|m| m.kind() == kind), "{kind:?}");
        }
        for m in &ms {
            roundtrip(&d, m);
        }
    }

    #[test]
    fn kinks_on_a_loop() {
        let d = WebDiagram::from_json(LOOP).unwrap();
        for left in [true, false] {
            for sign in [CrossingSign::Positive, CrossingSign::Negative] {
                roundtrip(&d, &Move::AddKink { side: ArcSide { arc: 0, left }, sign });
            }
        }
    }

    #[test]
    fn bad_sites_are_rejected() {
        let d = WebDiagram::from_json(THETA).unwrap();
        assert!(matches!(apply_move(&d, &Move::RemoveKink { side: ArcSide { arc: 0, left: true } }), Err(WebError::MoveNotApplicable(_))));
        assert!(apply_move(&d, &Move::PushAcrossVertex { arc: 9 }).is_err());
        assert!(apply_move(&d, &Move::Twist { vertex: 2, slot: 0, sign: CrossingSign::Positive }).is_err());
    }
}
