//! Homology comparison across Reidemeister moves.

use serde::Serialize;

use crate::cube::build_cube_with;
use crate::homology::{homology, normalize_relative, Coefficients, Homology};
use crate::state::BasisCache;
use crate::web::{apply_move, Move, MoveKind, WebDiagram};
use crate::Result;

/// Size of the homological shift a move of this kind induces.
pub fn homological_shift(kind: MoveKind) -> i64 {
    match kind {
        MoveKind::I | MoveKind::II | MoveKind::III => 0,
        MoveKind::IV => 2,
        MoveKind::V => 1,
    }
}

/// The `(dh, dq)` with `a.shifted(dh, dq) == b`, if there is one.
pub fn raw_shift(a: &Homology, b: &Homology) -> Option<(i64, i64)> {
    let (ga, gb) = (a.groups.first()?, b.groups.first()?);
    let dh = gb.h - ga.h;
    let dq = b.groups.iter().map(|g| g.q).min()? - a.groups.iter().map(|g| g.q).min()?;
    (a.shifted(dh, dq).groups == b.groups).then_some((dh, dq))
}

/// Whether a raw shift fits the move: the quantum shift is `-4` times the
/// homological one, and the homological one has the size of
/// [`homological_shift`].
pub fn shift_consistent(kind: MoveKind, (dh, dq): (i64, i64)) -> bool {
    dq.rem_euclid(4) == 0 && dq == -4 * dh && dh.abs() == homological_shift(kind)
}

#[derive(Clone, Debug, Serialize)]
pub struct MoveReport {
    #[serde(rename = "move")]
    pub mv: Move,
    pub kind: MoveKind,
    pub crossings: (usize, usize),
    pub normalized_equal: bool,
    pub shift: Option<(i64, i64)>,
    pub shift_consistent: bool,
}

impl MoveReport {
    pub fn passed(&self) -> bool {
        self.normalized_equal && self.shift_consistent
    }
}

pub fn diagram_homology(d: &WebDiagram, coeffs: Coefficients, cache: &BasisCache) -> Result<Homology> {
    let cube = build_cube_with(d, cache)?;
    cube.complex.check_over(coeffs)?;
    homology(&cube.complex, coeffs)
}

/// Apply `m` to `d` and compare the homology of both sides.
pub fn check_move(d: &WebDiagram, m: &Move, coeffs: Coefficients, cache: &BasisCache) -> Result<MoveReport> {
    let e = apply_move(d, m)?;
    let a = diagram_homology(d, coeffs, cache)?;
    let b = diagram_homology(&e, coeffs, cache)?;
    let shift = raw_shift(&a, &b);
    Ok(MoveReport {
        mv: *m,
        kind: m.kind(),
        crossings: (d.crossings.len(), e.crossings.len()),
        normalized_equal: normalize_relative(&a) == normalize_relative(&b),
        shift,
        shift_consistent: shift.is_some_and(|s| shift_consistent(m.kind(), s)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::HomologyGroup;
    use crate::web::{ArcSide, CrossingSign};

    fn theta() -> WebDiagram {
        WebDiagram::from_json(r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[2,1,0]}]}"#)
            .unwrap()
    }

    fn hom(groups: &[(i64, i64, usize)]) -> Homology {
        Homology {
            coefficients: Coefficients::Integers,
            groups: groups.iter().map(|&(h, q, free)| HomologyGroup { h, q, free, torsion: vec![] }).collect(),
        }
    }

    #[test]
    fn shifts_are_recovered() {
        let a = hom(&[(0, -2, 1), (0, 0, 1), (1, 4, 1)]);
        assert_eq!(raw_shift(&a, &a.shifted(1, -4)), Some((1, -4)));
        assert_eq!(raw_shift(&a, &hom(&[(0, -2, 1), (0, 0, 1), (1, 2, 1)])), None);
        assert!(shift_consistent(MoveKind::V, (1, -4)));
        assert!(shift_consistent(MoveKind::IV, (-2, 8)));
        assert!(!shift_consistent(MoveKind::V, (1, 4)));
        assert!(!shift_consistent(MoveKind::II, (1, -4)));
    }

    #[test]
    fn twist_and_kink_on_theta() {
        let cache = BasisCache::new();
        let twist = Move::Twist { vertex: 0, slot: 0, sign: CrossingSign::Positive };
        let r = check_move(&theta(), &twist, Coefficients::Integers, &cache).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.shift.unwrap().0.abs(), 1);
        let kink = Move::AddKink { side: ArcSide { arc: 1, left: true }, sign: CrossingSign::Negative };
        let r = check_move(&theta(), &kink, Coefficients::F2, &cache).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.shift, Some((0, 0)));
    }
}
