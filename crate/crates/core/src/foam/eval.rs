use std::collections::HashMap;

use super::{FacetShape, FoamError, FoamShape, PreFoam};

/// Value contributed by a closed-up facet carrying `dots` dots, before the
/// seams are summed over: zero once dots and handles exceed degree two.
pub fn facet_weight(f: &FacetShape, dots: u32) -> i64 {
    let g = f.genus.expect("closed facet") as i64;
    if dots as i64 + 2 * g > 2 {
        return 0;
    }
    let sign = if f.sides % 2 == 1 { 1 } else { -1 };
    sign * (-3i64).pow(g as u32)
}

/// Signed seam sums of a foam shape, tabulated by the number of dots on each
/// facet.
#[derive(Clone, Debug, Default)]
pub struct SeamTable {
    pub values: HashMap<Vec<u8>, i64>,
}

impl SeamTable {
    pub fn get(&self, dots: &[u8]) -> i64 {
        self.values.get(dots).copied().unwrap_or(0)
    }

    /// Evaluate the foam with the given dots per facet.
    pub fn evaluate(&self, shape: &FoamShape, dots: &[u32]) -> i64 {
        let mut w = 1i64;
        let mut key = Vec::with_capacity(dots.len());
        for (f, &d) in shape.facets.iter().zip(dots) {
            let x = facet_weight(f, d);
            if x == 0 {
                return 0;
            }
            w *= x;
            key.push(d as u8);
        }
        w * self.get(&key)
    }
}

const EVEN: [[u8; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
const ODD: [[u8; 3]; 3] = [[0, 2, 1], [2, 1, 0], [1, 0, 2]];

/// Tabulate the seam sum for every dot vector with `windows[f].0 <= d_f <=
/// windows[f].1`.
///
/// Each seam side carries an exponent in {0, 1, 2}; a seam contributes the
/// sign of the permutation its three exponents form (zero unless they are
/// distinct), and a facet with `b` sides, euler characteristic `chi` and `d`
/// dots needs its exponents to add up to `b - chi + d`.
pub fn seam_table(shape: &FoamShape, windows: &[(u32, u32)]) -> Result<SeamTable, FoamError> {
    let nf = shape.facets.len();
    assert_eq!(windows.len(), nf);
    let mut base = Vec::with_capacity(nf);
    for f in &shape.facets {
        if f.genus.is_none() {
            return Err(FoamError::NotClosed);
        }
        base.push(f.sides as i64 - f.euler);
    }
    let lo: Vec<i64> = (0..nf).map(|f| base[f] + windows[f].0 as i64).collect();
    let hi: Vec<i64> = (0..nf).map(|f| base[f] + windows[f].1 as i64).collect();

    let order = seam_order(shape);
    let mut remaining = vec![0i64; nf];
    for &s in &shape.side_facet {
        remaining[s as usize] += 1;
    }
    let mut states: HashMap<Vec<u8>, i64> = HashMap::new();
    states.insert(vec![0u8; nf], 1);
    let ok = |sums: &[u8], rem: &[i64]| (0..nf).all(|f| sums[f] as i64 <= hi[f] && sums[f] as i64 + 2 * rem[f] >= lo[f]);
    if !ok(&vec![0u8; nf], &remaining) {
        return Ok(SeamTable::default());
    }
    for &s in &order {
        let facets = shape.seams[s].map(|side| shape.side_facet[side as usize] as usize);
        for &f in &facets {
            remaining[f] -= 1;
        }
        let mut next: HashMap<Vec<u8>, i64> = HashMap::with_capacity(states.len() * 2);
        for (sums, count) in states {
            for (perms, sign) in [(&EVEN, 1i64), (&ODD, -1i64)] {
                for p in perms {
                    let mut t = sums.clone();
                    for j in 0..3 {
                        t[facets[j]] += p[j];
                    }
                    if !ok(&t, &remaining) {
                        continue;
                    }
                    let e = next.entry(t).or_insert(0);
                    *e = e
                        .checked_add(sign * count)
                        .ok_or_else(|| FoamError::Inconsistent("seam sum overflow".into()))?;
                }
            }
        }
        next.retain(|_, v| *v != 0);
        states = next;
    }
    let mut values = HashMap::with_capacity(states.len());
    for (sums, count) in states {
        let key: Vec<u8> = (0..nf).map(|f| (sums[f] as i64 - base[f]) as u8).collect();
        values.insert(key, count);
    }
    Ok(SeamTable { values })
}

/// Seams ordered so that each one shares as many facets as possible with the
/// seams before it.
fn seam_order(shape: &FoamShape) -> Vec<usize> {
    let n = shape.seams.len();
    let facets: Vec<[u32; 3]> = shape.seams.iter().map(|s| s.map(|x| shape.side_facet[x as usize])).collect();
    let mut done = vec![false; n];
    let mut touched = vec![false; shape.facets.len()];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let best = (0..n)
            .filter(|&i| !done[i])
            .max_by_key(|&i| (facets[i].iter().filter(|&&f| touched[f as usize]).count(), std::cmp::Reverse(i)))
            .unwrap();
        done[best] = true;
        for &f in &facets[best] {
            touched[f as usize] = true;
        }
        out.push(best);
    }
    out
}

/// Evaluate a closed foam.
pub fn evaluate(p: &PreFoam) -> Result<i64, FoamError> {
    if p.shape.facets.iter().any(|f| f.genus.is_none()) {
        return Err(FoamError::NotClosed);
    }
    if p.degree != 0 {
        return Ok(0);
    }
    for (f, &d) in p.shape.facets.iter().zip(&p.dots) {
        if facet_weight(f, d) == 0 {
            return Ok(0);
        }
    }
    let windows: Vec<(u32, u32)> = p.dots.iter().map(|&d| (d, d)).collect();
    let table = seam_table(&p.shape, &windows)?;
    Ok(table.evaluate(&p.shape, &p.dots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foam::{assemble, FacetShape, Movie, MovieMove};
    use crate::web::PlanarWeb;

    fn sphere(dots: u32) -> PreFoam {
        PreFoam {
            shape: FoamShape { facets: vec![FacetShape { euler: 2, sides: 0, genus: Some(0) }], seams: vec![], side_facet: vec![] },
            dots: vec![dots],
            degree: 2 * dots as i64 - 4,
        }
    }

    #[test]
    fn spheres() {
        assert_eq!(evaluate(&sphere(0)).unwrap(), 0);
        assert_eq!(evaluate(&sphere(2)).unwrap(), -1);
        assert_eq!(evaluate(&sphere(3)).unwrap(), 0);
    }

    #[test]
    fn theta_values_by_assembly() {
        use crate::foam::{UnzipMove, ZipMove};
        let theta = |d: [u32; 3]| {
            let z = ZipMove { left: 0, right: 1, left_lo: 0, left_hi: 0, right_lo: 1, right_hi: 1, mid: 2, sink: 0, source: 1 };
            let mut mv = vec![MovieMove::Birth { edge: 0 }, MovieMove::Birth { edge: 1 }, MovieMove::Zip(z)];
            for (e, &k) in d.iter().enumerate() {
                for _ in 0..k {
                    mv.push(MovieMove::Dot { edge: e as u32 });
                }
            }
            mv.push(MovieMove::Unzip(UnzipMove { mid: 2, left: 0, right: 1 }));
            mv.push(MovieMove::Death { edge: 0 });
            mv.push(MovieMove::Death { edge: 1 });
            evaluate(&assemble(&Movie::new(PlanarWeb::new(), mv)).unwrap().prefoam().unwrap()).unwrap()
        };
        let mut values = std::collections::BTreeMap::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    values.insert((a, b, c), theta([a, b, c]));
                }
            }
        }
        let nonzero: Vec<_> = values.iter().filter(|(_, &v)| v != 0).collect();
        assert_eq!(nonzero.len(), 6);
        // Even permutations of one ordering share a sign, odd ones the other.
        let s = values[&(0, 1, 2)];
        assert_eq!(s.abs(), 1);
        assert_eq!(values[&(1, 2, 0)], s);
        assert_eq!(values[&(2, 0, 1)], s);
        assert_eq!(values[&(0, 2, 1)], -s);
        assert_eq!(values[&(2, 1, 0)], -s);
        assert_eq!(values[&(1, 0, 2)], -s);
    }
}
