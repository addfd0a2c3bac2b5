use std::sync::Arc;

use bq_witness::field::{parse_expr, Constructible};
use bq_witness::gadgets::{self, compile};
use bq_witness::geom::{self, Frame, Point};
use bq_witness::rigidity::{
    assemble_from_rigid, edge_objective_gradient, falsify_search, is_rigid, phi_map, rigidity_matrix,
    Framework, RigidityError, Verdict,
};
use bq_witness::verify::{unit_graph, verify};
use bq_witness::witness::{Claim, Figure, GadgetNode, WitnessSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-8;

fn c(s: &str) -> Constructible {
    parse_expr(s).unwrap().eval().unwrap()
}

fn triangle() -> Framework {
    let h = 3f64.sqrt() / 2.0;
    Framework::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], vec![(0, 1), (1, 2), (0, 2)])
}

fn square() -> Framework {
    let v = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    Framework::new(2, v, vec![(0, 1), (1, 2), (2, 3), (0, 3)])
}

fn spindle() -> WitnessSet {
    let x = Point::origin(2);
    let y = x.offset(&c("sqrt(3)"), &Point::axis(2, 0).0);
    gadgets::scale_up(&x, &y, &Constructible::one()).unwrap()
}

fn unit_simplex(n: usize) -> Vec<Point> {
    geom::regular_simplex(n + 1, &Constructible::one(), &Point::origin(n), &Frame::axes(n, 0..n)).unwrap()
}

fn moved(f: &Framework, seed: u64) -> Framework {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t: f64 = rng.gen_range(0.0..6.0);
    let (dx, dy): (f64, f64) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let vertices = f
        .vertices
        .iter()
        .map(|v| vec![t.cos() * v[0] - t.sin() * v[1] + dx, t.sin() * v[0] + t.cos() * v[1] + dy])
        .collect();
    Framework::new(2, vertices, f.edges.clone())
}

#[test]
fn phi_examples() {
    let s = unit_simplex(2);
    let d = phi_map(&s, &s[0]).unwrap();
    assert_eq!(d, vec![Constructible::zero(), Constructible::one(), Constructible::one()]);
    let centroid = geom::centroid(&s);
    let third = c("sqrt(1/3)");
    assert_eq!(phi_map(&s, &centroid).unwrap(), vec![third.clone(), third.clone(), third]);
    let bad = vec![Point::origin(2), Point::axis(2, 0), Point::from_ints(&[0, 2])];
    assert!(phi_map(&bad, &centroid).is_err());
    assert!(phi_map(&s[..2], &centroid).is_err());
}

#[test]
fn phi_separates_points() {
    let s = unit_simplex(3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = Vec::new();
    for _ in 0..100 {
        let coords: Vec<Constructible> =
            (0..3).map(|_| Constructible::rational(rng.gen_range(-40..40), rng.gen_range(1..9)).unwrap()).collect();
        let y = Point::new(coords);
        let d = phi_map(&s, &y).unwrap();
        assert!(!seen.iter().any(|(p, e)| p != &y && e == &d));
        seen.push((y, d));
    }
}

#[test]
fn classic_ranks() {
    let r = is_rigid(&triangle(), TOL);
    assert_eq!((r.rank, r.expected_rank, r.verdict), (3, 3, Verdict::Rigid));
    assert_eq!(rigidity_matrix(&triangle()).shape(), (3, 6));
    let r = is_rigid(&square(), TOL);
    assert_eq!((r.rank, r.expected_rank, r.verdict), (4, 5, Verdict::Flexible));
    let edge = Framework::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![(0, 1)]);
    let r = is_rigid(&edge, TOL);
    assert_eq!((r.rank, r.expected_rank), (1, 1));
}

#[test]
fn collapsed_triangle_is_indeterminate() {
    let v = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]];
    let f = Framework::new(2, v, vec![(0, 1), (0, 2)]);
    assert_eq!(is_rigid(&f, TOL).verdict, Verdict::Indeterminate);
}

#[test]
fn rank_ignores_rigid_motions() {
    for f in [triangle(), square(), unit_graph(&spindle())] {
        let r = is_rigid(&f, TOL).rank;
        for seed in 0..5 {
            assert_eq!(is_rigid(&moved(&f, seed), TOL).rank, r);
        }
    }
}

#[test]
fn spindle_skeleton_is_rigid() {
    let f = unit_graph(&spindle());
    assert_eq!((f.vertices.len(), f.edges.len()), (7, 11));
    let r = is_rigid(&f, TOL);
    assert_eq!(r.expected_rank, 11);
    assert_eq!((r.rank, r.verdict), (11, Verdict::Rigid));
    for &(a, b) in &f.edges {
        let d: f64 = f.vertices[a].iter().zip(&f.vertices[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((d - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn assembly_over_a_triangle() {
    let w = assemble_from_rigid(&triangle(), 0, 1, 0.1).unwrap();
    assert!(w.approximate);
    assert_eq!(w.derivation.params["chains"], "9");
    assert!(matches!(&w.claims[0], Claim::ExactDistance { value, .. } if *value == Constructible::one()));
    let r = verify(&w);
    assert!(r.passed, "{:?}", r.claims);
}

#[test]
fn assembly_rejects_bad_input() {
    assert!(matches!(assemble_from_rigid(&square(), 0, 2, 0.1), Err(RigidityError::NotRigid(Verdict::Flexible))));
    assert!(assemble_from_rigid(&triangle(), 0, 1, 0.0).is_err());
    assert!(assemble_from_rigid(&triangle(), 0, 9, 0.1).is_err());
}

#[test]
fn gradient_matches_central_differences() {
    let f = unit_graph(&spindle());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let x: Vec<f64> = (0..14).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (_, g) = edge_objective_gradient(2, &f.edges, &x);
        let h = 1e-6;
        for k in 0..x.len() {
            let mut y = x.clone();
            y[k] += h;
            let up = edge_objective_gradient(2, &f.edges, &y).0;
            y[k] -= 2.0 * h;
            let down = edge_objective_gradient(2, &f.edges, &y).0;
            let fd = (up - down) / (2.0 * h);
            assert!((fd - g[k]).abs() <= 1e-6 * g[k].abs().max(1.0), "{fd} vs {}", g[k]);
        }
    }
}

#[test]
fn unit_pair_cannot_be_broken() {
    let w = gadgets::unit_pair(&Point::origin(2), &Point::axis(2, 0)).unwrap();
    let r = falsify_search(&w, 20, 1, 1e-10, 0.5).unwrap();
    assert!(!r.violated);
    assert!(r.near_feasible.iter().all(|t| t.claim_deviation < 1e-5));
}

#[test]
fn bare_claim_folds() {
    let w = WitnessSet {
        dim: 2,
        points: vec![Point::origin(2), Point::from_ints(&[2, 0])],
        unit_edges: vec![],
        claims: vec![Claim::ExactDistance { pair: (0, 1), value: Constructible::from_int(2) }],
        derivation: Arc::new(GadgetNode::new(Figure::Compile)),
        approximate: false,
    };
    let r = falsify_search(&w, 4, 42, 1e-10, 0.5).unwrap();
    assert!(r.violated);
    let no_claims = WitnessSet { claims: vec![], ..w };
    assert!(falsify_search(&no_claims, 4, 42, 1e-10, 0.5).is_err());
}

#[test]
fn compiled_two_holds_and_repeats() {
    let w = compile("2", 2, &Point::origin(2), &Point::axis(2, 0).0).unwrap();
    let a = falsify_search(&w, 30, 42, 1e-10, 0.5).unwrap();
    assert!(!a.violated, "{a:?}");
    let b = falsify_search(&w, 30, 42, 1e-10, 0.5).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn dropped_edge_snapshot() {
    let w = spindle();
    let mut lines = Vec::new();
    for k in 0..w.unit_edges.len() {
        let mut cut = w.clone();
        let e = cut.unit_edges.remove(k);
        let r = falsify_search(&cut, 40, 42, 1e-10, 0.5).unwrap();
        lines.push(format!("{:?} violated={}", e, r.violated));
    }
    let got = lines.join("\n") + "\n";
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/snapshots/dropped_edge.txt");
    match std::fs::read_to_string(path) {
        Ok(want) => assert_eq!(got, want),
        Err(_) => {
            std::fs::create_dir_all(std::path::Path::new(path).parent().unwrap()).unwrap();
            std::fs::write(path, &got).unwrap();
        }
    }
}
