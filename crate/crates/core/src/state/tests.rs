use super::*;
use crate::homology::web_bracket;
use crate::web::{resolution_web, WebDiagram};

fn circle() -> PlanarWeb {
    let mut w = PlanarWeb::new();
    w.add_loop(0).unwrap();
    w
}

fn theta() -> PlanarWeb {
    let d = WebDiagram::from_json(r#"{"arcs":3,"vertices":[{"polarity":"in","arcs":[0,1,2]},{"polarity":"out","arcs":[2,1,0]}]}"#)
        .unwrap();
    resolution_web(&d, &[])
}

fn hopf() -> WebDiagram {
    WebDiagram::from_json(
        r#"{"arcs":4,"crossings":[{"sign":"pos","ends":[0,1,2,3]},{"sign":"pos","ends":[3,2,1,0]}]}"#,
    )
    .unwrap()
}

/// The 1-skeleton of a cube: six square faces.
fn cube_web() -> PlanarWeb {
    let d = WebDiagram::from_json(
        r#"{"arcs":12,"vertices":[
            {"polarity":"in","arcs":[0,8,3]},{"polarity":"out","arcs":[1,9,0]},
            {"polarity":"in","arcs":[2,10,1]},{"polarity":"out","arcs":[3,11,2]},
            {"polarity":"out","arcs":[4,7,8]},{"polarity":"in","arcs":[5,4,9]},
            {"polarity":"out","arcs":[10,6,5]},{"polarity":"in","arcs":[6,11,7]}]}"#,
    )
    .unwrap();
    resolution_web(&d, &[])
}

fn all_resolutions(d: &WebDiagram) -> Vec<PlanarWeb> {
    let n = d.crossings.len();
    (0u32..1 << n).map(|b| resolution_web(d, &(0..n).map(|i| b >> i & 1 == 1).collect::<Vec<_>>())).collect()
}

fn dotted(web: &PlanarWeb, e: EdgeId, k: usize) -> Movie {
    Movie::new(web.clone(), vec![MovieMove::Dot { edge: e }; k])
}

#[test]
fn empty_web_has_rank_one() {
    let b = GradedBasis::new(&PlanarWeb::new()).unwrap();
    assert_eq!(b.degrees, vec![0]);
    assert!(b.pairing.is_identity());
}

#[test]
fn circle_basis() {
    let b = GradedBasis::new(&circle()).unwrap();
    assert_eq!(b.degrees, vec![-2, 0, 2]);
    let x = cobordism_matrix(&dotted(&circle(), 0, 1), &b, &b).unwrap();
    let expect = IntMatrix::from_rows(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0]]);
    assert_eq!(x, expect);
    assert!(x.mul(&x).mul(&x).is_zero());
    assert!(!x.mul(&x).is_zero());
    let empty = GradedBasis::new(&PlanarWeb::new()).unwrap();
    let death = Movie::new(circle(), vec![MovieMove::Death { edge: 0 }]);
    assert_eq!(cobordism_matrix(&death, &b, &empty).unwrap().to_rows(), vec![vec![0, 0, -1]]);
    let id = cobordism_matrix(&Movie::identity(circle()), &b, &b).unwrap();
    assert!(id.is_identity());
}

#[test]
fn theta_basis() {
    let t = reduce(&theta(), ReductionPolicy::default()).unwrap();
    assert_eq!(t.steps(), vec![StepKind::Digon, StepKind::Circle]);
    let b = GradedBasis::new(&theta()).unwrap();
    let mut d = b.degrees.clone();
    d.sort_unstable();
    assert_eq!(d, vec![-3, -1, -1, 1, 1, 3]);
    for m in &b.elements {
        assert!(same_web(&m.target().unwrap(), &theta()));
    }
}

#[test]
fn graded_rank_matches_bracket() {
    for web in all_resolutions(&hopf()).into_iter().chain([theta(), circle(), cube_web()]) {
        for policy in [ReductionPolicy::DigonsFirst, ReductionPolicy::CirclesFirst] {
            let b = GradedBasis::with_policy(&web, policy).unwrap();
            assert_eq!(b.graded_rank(), web_bracket(&web));
        }
    }
}

#[test]
fn bases_from_different_reductions_agree() {
    // Each alternative basis element expands in the default basis, and the
    // expansion reproduces its pairing with every alternative dual.
    for web in all_resolutions(&hopf()).into_iter().chain([theta(), cube_web()]) {
        let b = GradedBasis::new(&web).unwrap();
        let alt = GradedBasis::with_policy(&web, ReductionPolicy::CirclesFirst).unwrap();
        let direct = sandwich(&alt.elements, None, &alt.duals).unwrap();
        let a = sandwich(&b.elements, None, &alt.duals).unwrap();
        let coords = b.dual_correction().mul(&sandwich(&alt.elements, None, &b.duals).unwrap());
        assert_eq!(a.mul(&coords), direct);
    }
}

#[test]
fn neck_cutting() {
    assert!(neck_cutting_check(&PlanarWeb::new(), None).unwrap());
    assert!(neck_cutting_check(&circle(), Some(NeckSite::Loop(0))).unwrap());
    assert!(neck_cutting_check(&circle(), Some(NeckSite::Tube(0))).unwrap());
    for e in 0..3 {
        assert!(neck_cutting_check(&theta(), Some(NeckSite::Tube(e))).unwrap());
    }
}

#[test]
fn dots_compose() {
    let w = theta();
    let b = GradedBasis::new(&w).unwrap();
    let x0 = cobordism_matrix(&dotted(&w, 0, 1), &b, &b).unwrap();
    let x1 = cobordism_matrix(&dotted(&w, 1, 1), &b, &b).unwrap();
    let both = Movie::new(w.clone(), vec![MovieMove::Dot { edge: 0 }, MovieMove::Dot { edge: 1 }]);
    assert_eq!(cobordism_matrix(&both, &b, &b).unwrap(), x1.mul(&x0));
    assert_eq!(x0.mul(&x1), x1.mul(&x0));
}

#[test]
fn state_space_matches_whole_web_basis() {
    let cache = BasisCache::new();
    for web in all_resolutions(&hopf()) {
        let s = cache.state_space(&web).unwrap();
        let b = GradedBasis::new(&web).unwrap();
        assert_eq!(s.degrees, b.degrees);
        for &e in web.edges().keys() {
            let m = dotted(&web, e, 1);
            assert_eq!(movie_matrix(&m, &s, &s).unwrap().to_dense(), cobordism_matrix(&m, &b, &b).unwrap());
        }
    }
}


#[test]
fn cube_web_reduces_through_squares() {
    let t = reduce(&cube_web(), ReductionPolicy::default()).unwrap();
    assert_eq!(t.steps()[0], StepKind::Square);
    let b = GradedBasis::new(&cube_web()).unwrap();
    assert_eq!(b.graded_rank(), web_bracket(&cube_web()));
    for m in &b.elements {
        assert!(same_web(&m.target().unwrap(), &cube_web()));
    }
}
