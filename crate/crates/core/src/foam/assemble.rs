use std::collections::HashMap;

use serde::Serialize;

use super::ops::{self, wide_edge_ends};
use super::{FoamError, Movie, MovieMove, SaddleMove};
use crate::web::{EdgeId, PlanarWeb, Polarity, VertexId};

/// A facet of an assembled foam.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FacetShape {
    /// Euler characteristic of the facet as a compact surface.
    pub euler: i64,
    /// Number of boundary circles along seams.
    pub sides: u32,
    /// Genus, for facets away from the source and target webs.
    pub genus: Option<u32>,
}

/// The combinatorial type of a foam without dots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FoamShape {
    pub facets: Vec<FacetShape>,
    /// Facet sides met by each seam, in the seam's cyclic order.
    pub seams: Vec<[u32; 3]>,
    /// Facet owning each side.
    pub side_facet: Vec<u32>,
}

/// A closed foam with dots, ready for evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PreFoam {
    pub shape: FoamShape,
    pub dots: Vec<u32>,
    pub degree: i64,
}

/// A movie assembled into a foam, remembering which facet each edge of each
/// frame lies on.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub shape: FoamShape,
    /// Dots per facet from the movie's dot moves.
    pub dots: Vec<u32>,
    pub degree: i64,
    pub closed: bool,
    frame_facets: Vec<HashMap<EdgeId, u32>>,
}

impl Assembled {
    /// Facet through `edge` in the frame before move `frame`.
    pub fn facet_at(&self, frame: usize, edge: EdgeId) -> Option<u32> {
        self.frame_facets.get(frame)?.get(&edge).copied()
    }

    pub fn prefoam(&self) -> Result<PreFoam, FoamError> {
        if !self.closed {
            return Err(FoamError::NotClosed);
        }
        Ok(PreFoam { shape: self.shape.clone(), dots: self.dots.clone(), degree: self.degree })
    }
}

#[derive(Default)]
struct Uf {
    parent: Vec<u32>,
}

impl Uf {
    fn add(&mut self) -> u32 {
        let n = self.parent.len() as u32;
        self.parent.push(n);
        n
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, x: u32, y: u32) -> u32 {
        let (a, b) = (self.find(x), self.find(y));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi as usize] = lo;
            lo
        } else {
            a
        }
    }
}

#[derive(Default)]
struct Tracker {
    sheets: Uf,
    sheet_chi: Vec<i64>,
    edge_sheet: HashMap<EdgeId, u32>,
    seams: Uf,
    /// Slot nodes of each vertex instance, by rotation position.
    inst_slots: Vec<[u32; 3]>,
    /// Slot nodes of each vertex instance in the seam's cyclic order.
    inst_cycle: Vec<[u32; 3]>,
    slots: Uf,
    slot_sheet: Vec<u32>,
    vert_inst: HashMap<VertexId, u32>,
    seam_chi: i64,
    dots: Vec<u32>,
    frames: Vec<HashMap<EdgeId, u32>>,
}

impl Tracker {
    fn new_sheet(&mut self) -> u32 {
        self.sheet_chi.push(0);
        self.sheets.add()
    }

    fn sheet(&self, e: EdgeId) -> u32 {
        self.edge_sheet[&e]
    }

    fn add_chi(&mut self, sheet: u32, d: i64) {
        self.sheet_chi[sheet as usize] += d;
    }

    fn new_instance(&mut self, web: &PlanarWeb, v: VertexId) -> u32 {
        let vx = web.vertex(v).expect("vertex exists");
        let id = self.seams.add();
        let mut s = [0u32; 3];
        for (k, e) in vx.rotation.iter().enumerate() {
            s[k] = self.slots.add();
            self.slot_sheet.push(self.sheet(*e));
        }
        self.inst_slots.push(s);
        // Seams are oriented so that sinks are read clockwise and sources
        // counterclockwise.
        self.inst_cycle.push(match vx.polarity {
            Polarity::Sink => [s[0], s[2], s[1]],
            Polarity::Source => s,
        });
        self.vert_inst.insert(v, id);
        id
    }

    fn record_frame(&mut self, web: &PlanarWeb) {
        let mut m = HashMap::with_capacity(web.edges().len());
        for (&id, e) in web.edges() {
            let s = self.sheet(id);
            m.insert(id, s);
            if !e.is_loop() {
                self.add_chi(s, -1);
            }
        }
        self.seam_chi += web.vertices().len() as i64;
        self.frames.push(m);
    }

    /// Slab contributions of edges and vertices that the move leaves alone.
    fn idle(&mut self, web: &PlanarWeb, edges: &[EdgeId], vertices: &[VertexId]) {
        for (&id, e) in web.edges() {
            if !e.is_loop() && !edges.contains(&id) {
                let s = self.sheet(id);
                self.add_chi(s, 1);
            }
        }
        let idle_v = web.vertices().keys().filter(|v| !vertices.contains(v)).count();
        self.seam_chi -= idle_v as i64;
    }
}

fn not_applicable(index: usize) -> impl Fn(String) -> FoamError {
    move |reason| FoamError::NotApplicable { index, reason }
}

/// Assemble a movie into a foam. Dot moves are recorded as dots.
pub fn assemble(movie: &Movie) -> Result<Assembled, FoamError> {
    let mut t = Tracker::default();
    let mut web = movie.source.clone();
    for &e in web.edges().keys() {
        let s = t.new_sheet();
        t.edge_sheet.insert(e, s);
    }
    for &v in web.vertices().keys().collect::<Vec<_>>() {
        t.new_instance(&web, v);
    }
    let source_chi = web.euler_characteristic();
    let mut dot_count = 0i64;
    t.record_frame(&web);
    for (index, mv) in movie.moves.iter().enumerate() {
        let err = not_applicable(index);
        match *mv {
            MovieMove::Birth { edge } => {
                t.idle(&web, &[], &[]);
                ops::apply(&mut web, mv).map_err(&err)?;
                let s = t.new_sheet();
                t.add_chi(s, 1);
                t.edge_sheet.insert(edge, s);
            }
            MovieMove::Death { edge } => {
                ops::apply(&mut web, mv).map_err(&err)?;
                let s = t.sheet(edge);
                t.add_chi(s, 1);
                t.edge_sheet.remove(&edge);
                t.idle(&web, &[], &[]);
            }
            MovieMove::Dot { edge } => {
                ops::apply(&mut web, mv).map_err(&err)?;
                let s = t.sheet(edge);
                t.dots.push(s);
                dot_count += 1;
                t.idle(&web, &[], &[]);
            }
            MovieMove::Zip(z) => {
                let before = web.clone();
                ops::apply(&mut web, mv).map_err(&err)?;
                t.idle(&before, &[z.left, z.right], &[]);
                let (sa, sb) = (t.sheet(z.left), t.sheet(z.right));
                let arcs_a = !before.edge(z.left).unwrap().is_loop();
                let arcs_b = !before.edge(z.right).unwrap().is_loop();
                if arcs_a {
                    t.add_chi(sa, 1);
                }
                if arcs_b && z.right != z.left {
                    t.add_chi(sb, 1);
                }
                for e in [z.left, z.right] {
                    t.edge_sheet.remove(&e);
                }
                for e in [z.left_lo, z.left_hi] {
                    t.edge_sheet.insert(e, sa);
                }
                for e in [z.right_lo, z.right_hi] {
                    t.edge_sheet.insert(e, sb);
                }
                let sm = t.new_sheet();
                t.add_chi(sm, 1);
                t.edge_sheet.insert(z.mid, sm);
                t.seam_chi -= 1;
                let is = t.new_instance(&web, z.sink);
                let it = t.new_instance(&web, z.source);
                t.seams.union(is, it);
                let (ss, ts) = (t.inst_slots[is as usize], t.inst_slots[it as usize]);
                t.slots.union(ss[2], ts[1]);
                t.slots.union(ss[0], ts[0]);
                t.slots.union(ss[1], ts[2]);
            }
            MovieMove::Unzip(u) => {
                let before = web.clone();
                let (s, tv, [a_lo, b_lo, a_hi, b_hi]) = wide_edge_ends(&before, u.mid).map_err(&err)?;
                let strands = ops::unzip(&mut web, &u).map_err(&err)?;
                t.idle(&before, &[u.mid, a_lo, b_lo, a_hi, b_hi], &[s, tv]);
                let sm = t.sheet(u.mid);
                t.add_chi(sm, 1);
                t.edge_sheet.remove(&u.mid);
                for st in &strands {
                    let mut root = t.sheet(st.segments[0]);
                    for &x in &st.segments[1..] {
                        let sx = t.sheet(x);
                        root = t.sheets.union(root, sx);
                    }
                    if !st.closed {
                        t.add_chi(root, 1);
                    }
                    for x in &st.segments {
                        t.edge_sheet.remove(x);
                    }
                    t.edge_sheet.insert(st.id, root);
                }
                t.seam_chi -= 1;
                let (is, it) = (t.vert_inst[&s], t.vert_inst[&tv]);
                t.vert_inst.remove(&s);
                t.vert_inst.remove(&tv);
                t.seams.union(is, it);
                let ks = before.vertex(s).unwrap().position(u.mid).unwrap();
                let kt = before.vertex(tv).unwrap().position(u.mid).unwrap();
                let (ss, ts) = (t.inst_slots[is as usize], t.inst_slots[it as usize]);
                t.slots.union(ss[ks], ts[kt]);
                t.slots.union(ss[(ks + 1) % 3], ts[(kt + 2) % 3]);
                t.slots.union(ss[(ks + 2) % 3], ts[(kt + 1) % 3]);
            }
            MovieMove::Saddle(sd) => {
                let before = web.clone();
                ops::apply(&mut web, mv).map_err(&err)?;
                match sd {
                    SaddleMove::Merge { a, b, ab, ba, .. } => {
                        t.idle(&before, &[a, b], &[]);
                        let arcs = [a, b].iter().filter(|&&x| !before.edge(x).unwrap().is_loop()).count() as i64;
                        let (sa, sb) = (t.sheet(a), t.sheet(b));
                        let root = t.sheets.union(sa, sb);
                        t.add_chi(root, arcs - 1);
                        t.edge_sheet.remove(&a);
                        t.edge_sheet.remove(&b);
                        for e in [ab, ba] {
                            if web.edge(e).is_some() {
                                t.edge_sheet.insert(e, root);
                            }
                        }
                    }
                    SaddleMove::Split { edge, keep, new_loop, .. } => {
                        t.idle(&before, &[edge], &[]);
                        let arcs = i64::from(!before.edge(edge).unwrap().is_loop());
                        let s = t.sheet(edge);
                        t.add_chi(s, arcs - 1);
                        t.edge_sheet.remove(&edge);
                        t.edge_sheet.insert(keep, s);
                        t.edge_sheet.insert(new_loop, s);
                    }
                }
            }
        }
        t.record_frame(&web);
    }
    finish(t, movie, &web, source_chi, dot_count)
}

fn finish(mut t: Tracker, movie: &Movie, target: &PlanarWeb, source_chi: i64, dots: i64) -> Result<Assembled, FoamError> {
    let closed = movie.source.is_empty() && target.is_empty();
    let boundary: Vec<u32> = {
        let first = t.frames.first().cloned().unwrap_or_default();
        let last = t.frames.last().cloned().unwrap_or_default();
        first.values().chain(last.values()).copied().collect()
    };
    let n_sheets = t.sheet_chi.len() as u32;
    let mut facet_of_root: HashMap<u32, u32> = HashMap::new();
    let mut facets: Vec<FacetShape> = Vec::new();
    let mut sheet_facet = vec![0u32; n_sheets as usize];
    for s in 0..n_sheets {
        let r = t.sheets.find(s);
        let f = *facet_of_root.entry(r).or_insert_with(|| {
            facets.push(FacetShape { euler: 0, sides: 0, genus: None });
            facets.len() as u32 - 1
        });
        sheet_facet[s as usize] = f;
        facets[f as usize].euler += t.sheet_chi[s as usize];
    }
    let mut touches = vec![false; facets.len()];
    for s in boundary {
        touches[sheet_facet[s as usize] as usize] = true;
    }

    let n_slots = t.slot_sheet.len() as u32;
    let mut side_of_root: HashMap<u32, u32> = HashMap::new();
    let mut side_facet: Vec<u32> = Vec::new();
    let mut slot_side = vec![0u32; n_slots as usize];
    for x in 0..n_slots {
        let r = t.slots.find(x);
        let f = sheet_facet[t.sheets.find(t.slot_sheet[x as usize]) as usize];
        let side = *side_of_root.entry(r).or_insert_with(|| {
            side_facet.push(f);
            side_facet.len() as u32 - 1
        });
        if side_facet[side as usize] != f {
            return Err(FoamError::Inconsistent("a seam side lies on two facets".into()));
        }
        slot_side[x as usize] = side;
    }
    for &f in &side_facet {
        facets[f as usize].sides += 1;
    }

    let mut seams: Vec<[u32; 3]> = Vec::new();
    let mut seam_of_root: HashMap<u32, usize> = HashMap::new();
    for i in 0..t.inst_cycle.len() as u32 {
        let r = t.seams.find(i);
        let cyc = t.inst_cycle[i as usize].map(|x| slot_side[x as usize]);
        match seam_of_root.get(&r) {
            None => {
                if cyc[0] == cyc[1] && cyc[1] == cyc[2] {
                    return Err(FoamError::Incomplete(
                        "a seam whose three sides form a single circle is not supported".into(),
                    ));
                }
                if cyc[0] == cyc[1] || cyc[1] == cyc[2] || cyc[0] == cyc[2] {
                    return Err(FoamError::Inconsistent("seam monodromy is a transposition".into()));
                }
                seam_of_root.insert(r, seams.len());
                seams.push(cyc);
            }
            Some(&k) => {
                let c = seams[k];
                let same = (0..3).any(|rot| (0..3).all(|j| c[j] == cyc[(j + rot) % 3]));
                if !same {
                    return Err(FoamError::Inconsistent("seam orientation is not coherent".into()));
                }
            }
        }
    }

    for (f, fc) in facets.iter_mut().enumerate() {
        if touches[f] {
            continue;
        }
        let twice_genus = 2 - fc.euler - fc.sides as i64;
        if twice_genus < 0 || twice_genus % 2 != 0 {
            return Err(FoamError::Inconsistent(format!(
                "facet {f} has euler characteristic {} and {} sides",
                fc.euler, fc.sides
            )));
        }
        fc.genus = Some((twice_genus / 2) as u32);
    }

    let degree = movie.degree();
    let chi: i64 = facets.iter().map(|f| f.euler).sum::<i64>() + t.seam_chi;
    let formula = source_chi + target.euler_characteristic() - 2 * chi + 2 * dots;
    if formula != degree {
        return Err(FoamError::Inconsistent(format!(
            "degree {degree} disagrees with the euler characteristic count {formula}"
        )));
    }

    let mut dot_counts = vec![0u32; facets.len()];
    for &s in &t.dots {
        dot_counts[sheet_facet[t.sheets.find(s) as usize] as usize] += 1;
    }
    let frame_facets = t
        .frames
        .iter()
        .map(|m| m.iter().map(|(&e, &s)| (e, sheet_facet[s as usize])).collect())
        .collect();
    Ok(Assembled {
        shape: FoamShape { facets, seams, side_facet },
        dots: dot_counts,
        degree,
        closed,
        frame_facets,
    })
}
