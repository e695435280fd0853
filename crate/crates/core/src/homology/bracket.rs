use super::LaurentPoly;
use crate::foam::splice;
use crate::web::{resolution_web, PlanarWeb, Polarity, VertexId, WebDiagram};

/// Order in which [`web_bracket_with`] removes faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketOrder {
    /// Circles, then digons, then squares, lowest face first.
    CirclesFirst,
    /// Squares, then digons, then circles, highest face first.
    SquaresFirst,
}

/// The Kuperberg bracket of a closed planar web.
pub fn web_bracket(w: &PlanarWeb) -> LaurentPoly {
    web_bracket_with(w, BracketOrder::SquaresFirst)
}

pub fn web_bracket_with(w: &PlanarWeb, order: BracketOrder) -> LaurentPoly {
    let mut w = w.clone();
    let mut factor = LaurentPoly::one();
    loop {
        if w.is_empty() {
            return factor;
        }
        let faces = w.faces();
        let circles: Vec<u32> = w.loops().collect();
        let digons: Vec<usize> = (0..faces.len()).filter(|&i| faces[i].len() == 2).collect();
        let squares: Vec<usize> = (0..faces.len()).filter(|&i| faces[i].len() == 4).collect();
        let step = match order {
            BracketOrder::CirclesFirst => {
                if let Some(&c) = circles.first() {
                    Step::Circle(c)
                } else if let Some(&d) = digons.first() {
                    Step::Digon(d)
                } else if let Some(&s) = squares.first() {
                    Step::Square(s)
                } else {
                    panic!("closed planar web without a small face")
                }
            }
            BracketOrder::SquaresFirst => {
                if let Some(&s) = squares.last() {
                    Step::Square(s)
                } else if let Some(&d) = digons.last() {
                    Step::Digon(d)
                } else if let Some(&c) = circles.last() {
                    Step::Circle(c)
                } else {
                    panic!("closed planar web without a small face")
                }
            }
        };
        match step {
            Step::Circle(c) => {
                w.remove_edge(c);
                factor = &factor * &LaurentPoly::circle();
            }
            Step::Digon(i) => {
                let e1 = faces[i].darts[0].edge;
                let e2 = faces[i].darts[1].edge;
                let edge = *w.edge(e1).unwrap();
                let (s, t) = (edge.head.unwrap(), edge.tail.unwrap());
                let third = |v: VertexId| *w.vertex(v).unwrap().rotation.iter().find(|&&e| e != e1 && e != e2).unwrap();
                let (f_in, f_out) = (third(s), third(t));
                splice(&mut w, &[s, t], &[e1, e2], &[(f_in, f_out)], |st| first_or_min(st)).expect("digon removal");
                factor = &factor * &LaurentPoly::digon();
            }
            Step::Square(i) => {
                let (w0, w1) = split_square(&w, &faces[i].darts.iter().map(|d| d.edge).collect::<Vec<_>>());
                let b0 = web_bracket_with(&w0, order);
                let b1 = web_bracket_with(&w1, order);
                return &factor * &(&b0 + &b1);
            }
        }
    }
}

enum Step {
    Circle(u32),
    Digon(usize),
    Square(usize),
}

fn first_or_min(st: &crate::foam::Strand) -> u32 {
    if st.closed {
        *st.segments.iter().min().unwrap()
    } else {
        st.segments[0]
    }
}

/// The two ways of resolving a square face.
fn split_square(w: &PlanarWeb, edges: &[u32]) -> (PlanarWeb, PlanarWeb) {
    let mut verts: Vec<VertexId> = Vec::new();
    for &e in edges {
        let ed = w.edge(e).unwrap();
        for v in [ed.tail.unwrap(), ed.head.unwrap()] {
            if !verts.contains(&v) {
                verts.push(v);
            }
        }
    }
    let sinks: Vec<VertexId> = verts.iter().copied().filter(|&v| w.vertex(v).unwrap().polarity == Polarity::Sink).collect();
    let sources: Vec<VertexId> = verts.iter().copied().filter(|&v| w.vertex(v).unwrap().polarity == Polarity::Source).collect();
    let outer = |v: VertexId| *w.vertex(v).unwrap().rotation.iter().find(|e| !edges.contains(e)).unwrap();
    let (a, c) = (sinks[0], sinks[1]);
    let (b, d) = (sources[0], sources[1]);
    let resolve = |pa: VertexId, pc: VertexId| {
        let mut x = w.clone();
        splice(&mut x, &[a, b, c, d], edges, &[(outer(a), outer(pa)), (outer(c), outer(pc))], first_or_min)
            .expect("square removal");
        x
    };
    (resolve(b, d), resolve(d, b))
}

/// The Kuperberg bracket of a diagram, summed over the cube of resolutions
/// with signs `(-1)^(|v| - n_-)` and shifts `q^(3 n_- - 2 n_+ - |v|)`.
pub fn kuperberg_bracket(d: &WebDiagram) -> LaurentPoly {
    let n = d.crossings.len();
    let (np, nn) = d.sign_counts();
    let mut total = LaurentPoly::zero();
    for bits in 0u64..(1 << n) {
        let v: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        let weight = bits.count_ones() as i64;
        let sign = if (weight - nn as i64).rem_euclid(2) == 0 { 1 } else { -1 };
        let shift = 3 * nn as i64 - 2 * np as i64 - weight;
        let b = web_bracket(&resolution_web(d, &v));
        total = &total + &b.shift(shift).scale(sign);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> PlanarWeb {
        let d = WebDiagram::from_json(r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[2,1,0]}]}"#).unwrap();
        resolution_web(&d, &[])
    }

    #[test]
    fn theta_bracket() {
        let expect = &LaurentPoly::digon() * &LaurentPoly::circle();
        assert_eq!(web_bracket(&theta()), expect);
        assert_eq!(web_bracket_with(&theta(), BracketOrder::CirclesFirst), expect);
    }

    #[test]
    fn kink_is_invisible() {
        let d = WebDiagram::from_json(r#"{"arcs":4,"crossings":[{"sign":"pos","ends":[0,1,2,3]}],"joins":[[2,1],[3,0]]}"#).unwrap();
        assert_eq!(kuperberg_bracket(&d), LaurentPoly::circle());
    }
}
