use proptest::prelude::*;

use sl3web::cube::build_cube_with;
use sl3web::homology::{
    homology, kuperberg_bracket, normalize_relative, universal_coefficients_hold, web_bracket_with, BracketOrder,
    Coefficients,
};
use sl3web::invariance::{check_move, diagram_homology};
use sl3web::pointed::{koszul_rank_bound_check, pointed_complex, pointed_homology};
use sl3web::state::BasisCache;
use sl3web::web::{apply_move, apply_move_with_inverse, candidate_moves, canonical_form, resolution_web, WebDiagram};

const THETA: &str = r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[2,1,0]}]}"#;
const UNKNOT: &str = r#"{"arcs":1,"joins":[[0,0]]}"#;
/// Walks stop before a diagram would exceed this many crossings.
const WALK_CROSSINGS: i64 = 4;

fn start(theta: bool) -> WebDiagram {
    WebDiagram::from_json(if theta { THETA } else { UNKNOT }).unwrap()
}

/// Apply the moves picked by `choices` in turn, skipping ones that would make
/// the diagram too large.
fn walk(mut d: WebDiagram, choices: &[usize]) -> WebDiagram {
    for &c in choices {
        let ms: Vec<_> = candidate_moves(&d)
            .into_iter()
            .filter(|m| d.crossings.len() as i64 + m.crossing_change() <= WALK_CROSSINGS)
            .collect();
        if ms.is_empty() {
            break;
        }
        d = apply_move(&d, &ms[c % ms.len()]).unwrap();
    }
    d
}

fn relabel(d: &WebDiagram, perm: &[usize]) -> WebDiagram {
    let mut e = d.clone();
    for v in &mut e.vertices {
        v.arcs = v.arcs.map(|a| perm[a]);
    }
    for c in &mut e.crossings {
        c.ends = c.ends.map(|a| perm[a]);
    }
    for j in &mut e.joins {
        *j = (perm[j.0], perm[j.1]);
    }
    for m in &mut e.markpoints {
        *m = perm[*m];
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn walks_preserve_normalized_homology(theta in any::<bool>(), choices in prop::collection::vec(any::<usize>(), 1..4), pick in any::<usize>()) {
        let d = walk(start(theta), &choices);
        let ms = candidate_moves(&d);
        let m = ms[pick % ms.len()];
        prop_assume!(d.crossings.len() as i64 + m.crossing_change() <= WALK_CROSSINGS + 1);
        let r = check_move(&d, &m, Coefficients::Integers, &BasisCache::new()).unwrap();
        prop_assert!(r.passed(), "{} {:?} {:?}", d.to_json(), m, r);
    }

    #[test]
    fn euler_characteristic_is_the_bracket(theta in any::<bool>(), choices in prop::collection::vec(any::<usize>(), 0..4)) {
        let d = walk(start(theta), &choices);
        let cache = BasisCache::new();
        let cube = build_cube_with(&d, &cache).unwrap();
        prop_assert_eq!(cube.complex.euler_characteristic(), kuperberg_bracket(&d));
        let z = homology(&cube.complex, Coefficients::Integers).unwrap();
        let f2 = homology(&cube.complex, Coefficients::F2).unwrap();
        prop_assert_eq!(z.euler_characteristic(), kuperberg_bracket(&d));
        prop_assert!(universal_coefficients_hold(&z, &f2));
    }

    #[test]
    fn bracket_ignores_reduction_order(theta in any::<bool>(), choices in prop::collection::vec(any::<usize>(), 0..4), bits in any::<u64>()) {
        let d = walk(start(theta), &choices);
        let res: Vec<bool> = (0..d.crossings.len()).map(|i| bits >> i & 1 == 1).collect();
        let w = resolution_web(&d, &res);
        prop_assert_eq!(web_bracket_with(&w, BracketOrder::CirclesFirst), web_bracket_with(&w, BracketOrder::SquaresFirst));
    }

    #[test]
    fn canonical_form_ignores_labels(theta in any::<bool>(), choices in prop::collection::vec(any::<usize>(), 0..4), perm_seed in any::<u64>()) {
        let d = canonical_form(&walk(start(theta), &choices));
        let mut perm: Vec<usize> = (0..d.arcs).collect();
        let mut s = perm_seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let e = relabel(&d, &perm);
        prop_assert!(e.validate().is_ok());
        prop_assert_eq!(canonical_form(&e), d);
    }

    #[test]
    fn inverse_moves_undo(theta in any::<bool>(), choices in prop::collection::vec(any::<usize>(), 0..4), pick in any::<usize>()) {
        let d = walk(start(theta), &choices);
        let ms = candidate_moves(&d);
        let (e, inv) = apply_move_with_inverse(&d, &ms[pick % ms.len()]).unwrap();
        prop_assert_eq!(canonical_form(&apply_move(&e, &inv).unwrap()), canonical_form(&d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pointed_homology_survives_moves(choices in prop::collection::vec(any::<usize>(), 1..3)) {
        let mut d = start(true);
        d.markpoints = vec![0, 1];
        let e = walk(d.clone(), &choices);
        prop_assert_eq!(e.markpoints.len(), 2);
        let h = |d: &WebDiagram| {
            let pc = pointed_complex(d, &d.markpoints, Coefficients::Integers).unwrap();
            let k = koszul_rank_bound_check(&pc).unwrap();
            assert!(k.bound_holds);
            normalize_relative(&pointed_homology(&pc).unwrap())
        };
        prop_assert_eq!(h(&d), h(&e));
    }
}

#[test]
fn f2_homology_is_move_invariant_on_theta() {
    let cache = BasisCache::new();
    let d = start(true);
    let a = normalize_relative(&diagram_homology(&d, Coefficients::F2, &cache).unwrap());
    for m in candidate_moves(&d) {
        let b = diagram_homology(&apply_move(&d, &m).unwrap(), Coefficients::F2, &cache).unwrap();
        assert_eq!(normalize_relative(&b), a, "{m:?}");
    }
}
