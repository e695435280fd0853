//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Deserialize;

use sl3web::action::{abstract_web, induced_action, ring_presentation, theta_module_check, verify_relations};
use sl3web::cube::build_cube_with;
use sl3web::foam::{assemble, evaluate, Movie, MovieMove, SaddleMove, UnzipMove, ZipMove};
use sl3web::homology::{
    homology, is_unimodular, kuperberg_bracket, universal_coefficients_hold, Coefficients, HomologyClasses,
};
use sl3web::invariance::check_move;
use sl3web::pointed::{koszul_rank_bound_check, pointed_complex, pointed_homology};
use sl3web::state::{movie_matrix, BasisCache};
use sl3web::web::{EdgeId, Move, MoveKind, PlanarWeb, Side, WebDiagram};

const FOAM_LIMIT: Duration = Duration::from_secs(1);
const CIRCLE_LIMIT: Duration = Duration::from_secs(1);
const THETA_LIMIT: Duration = Duration::from_secs(1);
const POINTED_LIMIT: Duration = Duration::from_secs(1);
const INVARIANCE_LIMIT: Duration = Duration::from_secs(60);
const EULER_LIMIT: Duration = Duration::from_secs(120);

const MULTIPLICATIVITY_PAIRS: usize = 20;
const MIN_MOVE_PAIRS: usize = 10;
const MIN_DIAGRAMS: usize = 20;
const MAX_CROSSINGS: usize = 8;
/// Diagrams up to this size also get their ring relations checked.
const ACTION_CROSSINGS: usize = 4;

type Outcome = Result<String, String>;

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn load(name: &str) -> WebDiagram {
    let s = std::fs::read_to_string(data().join("diagrams").join(name)).expect("corpus file");
    WebDiagram::from_json(&s).expect("corpus diagram")
}

fn corpus() -> Vec<(String, WebDiagram)> {
    let mut names: Vec<String> = std::fs::read_dir(data().join("diagrams"))
        .expect("corpus dir")
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), load(&n))).collect()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, format!("took {:?}, limit {:?}", t.elapsed(), limit))
}

// Closed foams as movies on the empty web, with edge and vertex ids from `base`.

fn sphere(dots: u32, base: EdgeId) -> Vec<MovieMove> {
    let mut m = vec![MovieMove::Birth { edge: base }];
    m.extend((0..dots).map(|_| MovieMove::Dot { edge: base }));
    m.push(MovieMove::Death { edge: base });
    m
}

fn surface(genus: u32, dots: u32, base: EdgeId) -> Vec<MovieMove> {
    let (a, b, c) = (base, base + 1, base + 2);
    let mut m = vec![MovieMove::Birth { edge: a }];
    for _ in 0..genus {
        m.push(MovieMove::Saddle(SaddleMove::Split { edge: a, side: Side::Left, keep: b, new_loop: c }));
        m.push(MovieMove::Saddle(SaddleMove::Merge { a: b, b: c, side: Side::Left, ab: a, ba: a }));
    }
    m.extend((0..dots).map(|_| MovieMove::Dot { edge: a }));
    m.push(MovieMove::Death { edge: a });
    m
}

/// The theta foam with `dots[i]` dots on the i-th facet in the cyclic order
/// of its seam, which at the zip's sink is clockwise: left, mid, right.
fn theta(dots: [u32; 3], base: EdgeId) -> Vec<MovieMove> {
    let (l, r, mid) = (base, base + 1, base + 2);
    let zip = ZipMove { left: l, right: r, left_lo: l, left_hi: l, right_lo: r, right_hi: r, mid, sink: base, source: base + 1 };
    let mut m = vec![MovieMove::Birth { edge: l }, MovieMove::Birth { edge: r }, MovieMove::Zip(zip)];
    for (e, &k) in [l, mid, r].iter().zip(&dots) {
        m.extend((0..k).map(|_| MovieMove::Dot { edge: *e }));
    }
    m.push(MovieMove::Unzip(UnzipMove { mid, left: l, right: r }));
    m.push(MovieMove::Death { edge: l });
    m.push(MovieMove::Death { edge: r });
    m
}

fn eval(moves: Vec<MovieMove>) -> Result<i64, String> {
    let a = assemble(&Movie::new(PlanarWeb::new(), moves)).map_err(|e| e.to_string())?;
    evaluate(&a.prefoam().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

fn theta_axiom(k: [u32; 3]) -> i64 {
    let cyc = |p: [u32; 3]| (0..3).any(|s| [k[s], k[(s + 1) % 3], k[(s + 2) % 3]] == p);
    if cyc([0, 1, 2]) {
        1
    } else if cyc([0, 2, 1]) {
        -1
    } else {
        0
    }
}

fn foam_axioms() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for dots in 0..5 {
        let want = if dots == 2 { -1 } else { 0 };
        ensure(eval(sphere(dots, 0))? == want, format!("sphere with {dots} dots"))?;
        checked += 1;
    }
    for genus in 1..3 {
        for dots in 0..3 {
            let want = if genus == 1 && dots == 0 { 3 } else { 0 };
            ensure(eval(surface(genus, dots, 0))? == want, format!("genus {genus} with {dots} dots"))?;
            checked += 1;
        }
    }
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let v = eval(theta([a, b, c], 0))?;
                ensure(v == theta_axiom([a, b, c]), format!("theta({a},{b},{c}) = {v}"))?;
                checked += 1;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let random = |rng: &mut StdRng, base: EdgeId| match rng.gen_range(0..6) {
        0 => sphere(rng.gen_range(0..4), base),
        1 => sphere(2, base),
        2 => surface(rng.gen_range(1..3), rng.gen_range(0..2), base),
        3 => surface(1, 0, base),
        4 => theta([rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(0..3)], base),
        _ => {
            let mut k = if rng.gen() { [0, 1, 2] } else { [0, 2, 1] };
            k.rotate_left(rng.gen_range(0..3));
            theta(k, base)
        }
    };
    let mut nonzero = 0;
    for _ in 0..MULTIPLICATIVITY_PAIRS {
        let (x, y) = (random(&mut rng, 0), random(&mut rng, 10));
        let (fx, fy) = (eval(x.clone())?, eval(y.clone())?);
        let fxy = eval(x.into_iter().chain(y).collect())?;
        ensure(fxy == fx * fy, format!("F(x ⊔ y) = {fxy}, F(x)F(y) = {}", fx * fy))?;
        nonzero += usize::from(fxy != 0);
    }
    within(t, FOAM_LIMIT)?;
    Ok(format!("{checked} closed foams, {MULTIPLICATIVITY_PAIRS} disjoint unions ({nonzero} nonzero)"))
}

fn circle() -> Outcome {
    let t = Instant::now();
    let mut web = PlanarWeb::new();
    web.add_loop(0).map_err(|e| e.to_string())?;
    let s = BasisCache::new().state_space(&web).map_err(|e| e.to_string())?;
    ensure(s.degrees == vec![-2, 0, 2], format!("degrees {:?}", s.degrees))?;
    let dot = Movie::new(web, vec![MovieMove::Dot { edge: 0 }]);
    let x = movie_matrix(&dot, &s, &s).map_err(|e| e.to_string())?;
    let x2 = x.mul(&x);
    ensure(!x.is_zero() && !x2.is_zero(), "X^2 vanishes")?;
    ensure(x2.mul(&x).is_zero(), "X^3 does not vanish")?;
    within(t, CIRCLE_LIMIT)?;
    Ok("degrees (-2, 0, 2), X^3 = 0 and X^2 != 0".into())
}

fn theta_diagram() -> Outcome {
    let t = Instant::now();
    let d = load("theta.json");
    let cube = build_cube_with(&d, &BasisCache::new()).map_err(|e| e.to_string())?;
    let h = homology(&cube.complex, Coefficients::Integers).map_err(|e| e.to_string())?;
    let want: BTreeMap<(i64, i64), usize> = [((0, -3), 1), ((0, -1), 2), ((0, 1), 2), ((0, 3), 1)].into();
    ensure(h.ranks() == want, format!("ranks {:?}", h.ranks()))?;
    ensure(!h.has_torsion(), "torsion")?;
    let f2 = cube.reduce_mod2();
    let classes = HomologyClasses::compute(&f2.complex, Coefficients::F2).map_err(|e| e.to_string())?;
    let a = induced_action(&d, &f2, &classes).map_err(|e| e.to_string())?;
    ensure(theta_module_check(&a.gradings, &a.edges[0], &a.edges[1]), "not cyclic over R_Θ ⊗ F2")?;
    within(t, THETA_LIMIT)?;
    Ok("ranks (1, 2, 2, 1), torsion-free, cyclic R_Θ-module over F2".into())
}

fn pointed_theta() -> Outcome {
    let t = Instant::now();
    let d = load("theta.json");
    let pc = pointed_complex(&d, &[0, 1], Coefficients::Integers).map_err(|e| e.to_string())?;
    let h = pointed_homology(&pc).map_err(|e| e.to_string())?;
    ensure(h.total_rank() == 4 && !h.has_torsion(), format!("rank {}", h.total_rank()))?;
    let k = koszul_rank_bound_check(&pc).map_err(|e| e.to_string())?;
    ensure(k.bound_holds && k.koszul_rank == k.pointed_rank, format!("{k:?}"))?;
    within(t, POINTED_LIMIT)?;
    Ok(format!("rank {}, Koszul rank {}", k.pointed_rank, k.koszul_rank))
}

#[derive(Deserialize)]
struct MovePair {
    diagram: String,
    #[serde(rename = "move")]
    mv: Move,
}

fn invariance() -> Outcome {
    let t = Instant::now();
    let pairs: Vec<MovePair> =
        serde_json::from_str(&std::fs::read_to_string(data().join("moves.json")).unwrap()).map_err(|e| e.to_string())?;
    ensure(pairs.len() >= MIN_MOVE_PAIRS, format!("only {} pairs", pairs.len()))?;
    let cache = BasisCache::new();
    let mut kinds = BTreeSet::new();
    for p in &pairs {
        let r = check_move(&load(&p.diagram), &p.mv, Coefficients::Integers, &cache).map_err(|e| e.to_string())?;
        ensure(r.normalized_equal, format!("{} {:?}: normalized homologies differ", p.diagram, p.mv))?;
        ensure(r.shift_consistent, format!("{} {:?}: shift {:?}", p.diagram, p.mv, r.shift))?;
        kinds.insert(r.kind);
    }
    let all: BTreeSet<MoveKind> = [MoveKind::I, MoveKind::II, MoveKind::III, MoveKind::IV, MoveKind::V].into();
    ensure(kinds == all, format!("kinds covered {kinds:?}"))?;
    within(t, INVARIANCE_LIMIT)?;
    Ok(format!("{} pairs over RI-RV, shifts (0,0), (±1,∓4), (±2,∓8)", pairs.len()))
}

fn decategorification() -> Outcome {
    let t = Instant::now();
    let corpus = corpus();
    ensure(corpus.len() >= MIN_DIAGRAMS, format!("only {} diagrams", corpus.len()))?;
    let cache = BasisCache::new();
    let mut most = 0;
    for (name, d) in &corpus {
        ensure(d.crossings.len() <= MAX_CROSSINGS, format!("{name} too large"))?;
        most = most.max(d.crossings.len());
        let cube = build_cube_with(d, &cache).map_err(|e| e.to_string())?;
        ensure(cube.complex.euler_characteristic() == kuperberg_bracket(d), format!("{name}: χ != bracket"))?;
    }
    within(t, EULER_LIMIT)?;
    Ok(format!("{} diagrams, up to {most} crossings", corpus.len()))
}

fn structural() -> Outcome {
    let cache = BasisCache::new();
    let mut relations = 0;
    for (name, d) in corpus() {
        let cube = build_cube_with(&d, &cache).map_err(|e| e.to_string())?;
        cube.complex.check().map_err(|e| format!("{name}: {e}"))?;
        cube.complex.check_over(Coefficients::F2).map_err(|e| format!("{name}: {e}"))?;
        if d.crossings.len() > ACTION_CROSSINGS {
            continue;
        }
        let p = ring_presentation(&abstract_web(&d).map_err(|e| e.to_string())?);
        for coeffs in [Coefficients::Integers, Coefficients::F2] {
            let c = if coeffs == Coefficients::F2 { cube.reduce_mod2() } else { cube.clone() };
            let classes = HomologyClasses::compute(&c.complex, coeffs).map_err(|e| e.to_string())?;
            let a = induced_action(&d, &c, &classes).map_err(|e| e.to_string())?;
            let r = verify_relations(&p, &a);
            ensure(r.holds(), format!("{name} over {coeffs:?}: {r:?}"))?;
            relations += p.relations.len();
        }
    }
    let bases = cache.bases();
    for b in &bases {
        ensure(is_unimodular(&b.pairing).map_err(|e| e.to_string())?, "pairing not unimodular")?;
    }
    Ok(format!("d² = 0 over Z and F2, {} unimodular pairings, {relations} relations checked", bases.len()))
}

fn universal_coefficients() -> Outcome {
    let cache = BasisCache::new();
    let corpus = corpus();
    let mut torsion = 0;
    for (name, d) in &corpus {
        let cube = build_cube_with(d, &cache).map_err(|e| e.to_string())?;
        let z = homology(&cube.complex, Coefficients::Integers).map_err(|e| e.to_string())?;
        let f2 = homology(&cube.complex, Coefficients::F2).map_err(|e| e.to_string())?;
        ensure(universal_coefficients_hold(&z, &f2), format!("{name}"))?;
        torsion += usize::from(z.has_torsion());
    }
    Ok(format!("{} diagrams, {torsion} with torsion", corpus.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 foam axioms", foam_axioms),
        ("2 circle", circle),
        ("3 theta", theta_diagram),
        ("4 pointed theta", pointed_theta),
        ("5 invariance", invariance),
        ("6 decategorification", decategorification),
        ("7 structural invariants", structural),
        ("8 universal coefficients", universal_coefficients),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        match f() {
            Ok(msg) => println!("PASS  {name}: {msg} [{:.2?}]", t.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg} [{:.2?}]", t.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
