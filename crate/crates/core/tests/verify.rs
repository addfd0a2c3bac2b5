use bq_witness::field::Constructible;
use bq_witness::gadgets::{self, compile};
use bq_witness::geom::Point;
use bq_witness::verify::{unit_graph, verify};
use bq_witness::witness::{Claim, WitnessSet};

fn plane_pair() -> (Point, Point) {
    (Point::origin(2), Point::axis(2, 0))
}

fn spindle() -> WitnessSet {
    let (x, y) = plane_pair();
    let v = Constructible::from_int(3).sqrt().unwrap();
    gadgets::scale_up(&x, &y.offset(&(&v - &Constructible::one()), &Point::axis(2, 0).0), &Constructible::one())
        .unwrap()
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[test]
fn unit_pair_report() {
    let (x, y) = plane_pair();
    let w = gadgets::unit_pair(&x, &y).unwrap();
    let r = verify(&w);
    assert!(r.passed);
    assert_eq!((r.points, r.declared_edges, r.discovered_edges), (2, 1, 1));
    assert!(r.incidental.is_empty());
    let f = unit_graph(&w);
    assert_eq!((f.vertices.len(), f.edges.len()), (2, 1));
}

#[test]
fn spindle_report() {
    let w = spindle();
    let r = verify(&w);
    assert!(r.passed);
    assert_eq!(r.points, 7);
    assert!(r.discovered_edges >= r.declared_edges);
    let f = unit_graph(&w);
    assert_eq!((f.vertices.len(), f.edges.len()), (7, 11));
}

#[test]
fn corrupted_coordinate_is_caught() {
    let mut w = spindle();
    let nudge = Constructible::rational(1, 1000).unwrap();
    let i = w.unit_edges[0].1;
    let mut coords = w.points[i].coords().to_vec();
    coords[0] = &coords[0] + &nudge;
    w.points[i] = Point::new(coords);
    let r = verify(&w);
    assert!(!r.passed);
    assert!(!r.failed_edges.is_empty());
    assert!(r.failed_edges.iter().all(|e| e.pair.0 == i || e.pair.1 == i));
}

#[test]
fn false_claim_is_reported() {
    let (x, y) = plane_pair();
    let mut w = gadgets::unit_pair(&x, &y).unwrap();
    w.claims.push(Claim::ExactDistance {
        pair: (0, 1),
        value: Constructible::from_int(2),
    });
    w.claims.push(Claim::Hyperplane { points: vec![0, 1] });
    let r = verify(&w);
    assert!(!r.passed);
    assert_eq!(r.claims.iter().filter(|c| !c.holds).count(), 1);
}

#[test]
fn compiled_two_is_connected() {
    let w = compile("2", 2, &Point::origin(2), &Point::axis(2, 0).0).unwrap();
    assert!(verify(&w).passed);
    let f = unit_graph(&w);
    assert!(connected(f.vertices.len(), &f.edges));
}

#[test]
fn report_survives_json_round_trip() {
    let w = compile("sqrt(2)", 2, &Point::origin(2), &Point::axis(2, 0).0).unwrap();
    let text = serde_json::to_string(&w).unwrap();
    let back: WitnessSet = serde_json::from_str(&text).unwrap();
    assert_eq!(back, w);
    let a = serde_json::to_string(&verify(&w)).unwrap();
    let b = serde_json::to_string(&verify(&back)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn permuting_points_keeps_the_verdict() {
    let w = compile("3/2", 2, &Point::origin(2), &Point::axis(2, 0).0).unwrap();
    let n = w.points.len();
    let perm: Vec<usize> = (0..n).map(|i| (i + 3) % n).collect();
    let mut shuffled = w.clone();
    shuffled.points = (0..n).map(|i| w.points[(i + n - 3) % n].clone()).collect();
    shuffled.unit_edges = w.unit_edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    let mut claims = w.claims.clone();
    for c in &mut claims {
        match c {
            Claim::ExactDistance { pair, .. } | Claim::UpperBound { pair, .. } => *pair = (perm[pair.0], perm[pair.1]),
            other => panic!("unexpected claim {other:?}"),
        }
    }
    shuffled.claims = claims;
    let (a, b) = (verify(&w), verify(&shuffled));
    assert!(a.passed && b.passed);
    assert_eq!(a.discovered_edges, b.discovered_edges);
    let kinds = |r: &bq_witness::verify::VerifyReport| {
        let mut v: Vec<_> = r.claims.iter().map(|c| (c.kind.clone(), c.holds)).collect();
        v.sort();
        v
    };
    assert_eq!(kinds(&a), kinds(&b));
}
