use std::collections::HashMap;

use rayon::prelude::*;

use crate::foam::{assemble, seam_table, Movie, MovieMove};
use crate::matrix::IntMatrix;
use crate::web::EdgeId;
use crate::Result;

/// Movies sharing a dot-free skeleton, with each member's dots.
struct Group {
    skeleton: Vec<MovieMove>,
    members: Vec<(usize, Vec<(usize, EdgeId)>)>,
}

fn group(movies: &[Movie]) -> Vec<Group> {
    let mut index: HashMap<Vec<MovieMove>, usize> = HashMap::new();
    let mut out: Vec<Group> = Vec::new();
    for (i, m) in movies.iter().enumerate() {
        let (skel, dots) = m.skeleton();
        let g = *index.entry(skel.moves.clone()).or_insert_with(|| {
            out.push(Group { skeleton: skel.moves, members: Vec::new() });
            out.len() - 1
        });
        out[g].members.push((i, dots));
    }
    out
}

/// Evaluate every closed foam `right[j] ∘ middle ∘ left[i]`; entry `(j, i)`.
///
/// Foams that share a skeleton are assembled once and differ only in how many
/// dots sit on each facet.
pub fn sandwich(left: &[Movie], middle: Option<&Movie>, right: &[Movie]) -> Result<IntMatrix> {
    let mut out = IntMatrix::zeros(right.len(), left.len());
    if left.is_empty() || right.is_empty() {
        return Ok(out);
    }
    let source = left[0].source.clone();
    let (mid_skel, mid_dots) = match middle {
        Some(m) => {
            let (s, d) = m.skeleton();
            (s.moves, d)
        }
        None => (Vec::new(), Vec::new()),
    };
    let mid_deg = middle.map_or(0, Movie::degree);
    let ldeg: Vec<i64> = left.iter().map(Movie::degree).collect();
    let rdeg: Vec<i64> = right.iter().map(Movie::degree).collect();
    let lg = group(left);
    let rg = group(right);
    let jobs: Vec<(usize, usize)> = (0..lg.len()).flat_map(|a| (0..rg.len()).map(move |b| (a, b))).collect();

    let results: Vec<Vec<(usize, usize, i64)>> = jobs
        .into_par_iter()
        .map(|(a, b)| -> Result<Vec<(usize, usize, i64)>> {
            let (gl, gr) = (&lg[a], &rg[b]);
            let (ldeg, rdeg) = (&ldeg, &rdeg);
            let pairs: Vec<(usize, usize)> = gl
                .members
                .iter()
                .enumerate()
                .flat_map(|(x, (i, _))| {
                    gr.members.iter().enumerate().filter(move |(_, (j, _))| ldeg[*i] + mid_deg + rdeg[*j] == 0).map(move |(y, _)| (x, y))
                })
                .collect();
            if pairs.is_empty() {
                return Ok(Vec::new());
            }
            let mut moves = gl.skeleton.clone();
            moves.extend_from_slice(&mid_skel);
            moves.extend_from_slice(&gr.skeleton);
            let asm = assemble(&Movie::new(source.clone(), moves))?;
            let shape = asm.prefoam()?.shape;
            let nf = shape.facets.len();
            let cap: Vec<i64> = shape.facets.iter().map(|f| 2 - 2 * f.genus.unwrap_or(0) as i64).collect();
            if cap.iter().any(|&c| c < 0) {
                return Ok(Vec::new());
            }
            let probe = |offset: usize, dots: &[(usize, EdgeId)], v: &mut [u32]| {
                for &(k, e) in dots {
                    let f = asm.facet_at(offset + k, e).expect("dotted edge lies on a facet");
                    v[f as usize] += 1;
                }
            };
            let mut base: Vec<u32> = asm.dots.clone();
            probe(gl.skeleton.len(), &mid_dots, &mut base);
            let lv: Vec<Vec<u32>> = gl
                .members
                .iter()
                .map(|(_, d)| {
                    let mut v = vec![0; nf];
                    probe(0, d, &mut v);
                    v
                })
                .collect();
            let roff = gl.skeleton.len() + mid_skel.len();
            let rv: Vec<Vec<u32>> = gr
                .members
                .iter()
                .map(|(_, d)| {
                    let mut v = vec![0; nf];
                    probe(roff, d, &mut v);
                    v
                })
                .collect();
            let mut wanted: Vec<(usize, usize, Vec<u32>)> = Vec::new();
            for (x, y) in pairs {
                let d: Vec<u32> = (0..nf).map(|f| base[f] + lv[x][f] + rv[y][f]).collect();
                if (0..nf).all(|f| d[f] as i64 <= cap[f]) {
                    wanted.push((gl.members[x].0, gr.members[y].0, d));
                }
            }
            if wanted.is_empty() {
                return Ok(Vec::new());
            }
            let windows: Vec<(u32, u32)> = (0..nf)
                .map(|f| {
                    let lo = wanted.iter().map(|w| w.2[f]).min().unwrap();
                    let hi = wanted.iter().map(|w| w.2[f]).max().unwrap();
                    (lo, hi)
                })
                .collect();
            let table = seam_table(&shape, &windows)?;
            Ok(wanted
                .into_iter()
                .filter_map(|(i, j, d)| {
                    let v = table.evaluate(&shape, &d);
                    (v != 0).then_some((j, i, v))
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    for (j, i, v) in results.into_iter().flatten() {
        out.set(j, i, v);
    }
    Ok(out)
}
