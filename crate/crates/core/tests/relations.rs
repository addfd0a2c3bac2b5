use bq_witness::field::{parse_expr, Constructible};
use bq_witness::geom::{self, Point};
use bq_witness::relations::{
    distinct_witness, equal_distance_witness, hyperplane_witness, less_than_witness, peaucellier,
    proposition_reflections, RelationError,
};
use bq_witness::verify::verify;
use bq_witness::witness::{Claim, WitnessSet};

fn c(s: &str) -> Constructible {
    parse_expr(s).unwrap().eval().unwrap()
}

fn p(v: &[&str]) -> Point {
    Point::new(v.iter().map(|s| c(s)).collect())
}

fn passes(w: &WitnessSet) {
    let r = verify(w);
    assert!(r.passed, "{:?} {:?}", r.failed_edges, r.claims);
}

fn d2(w: &WitnessSet, i: usize, j: usize) -> Constructible {
    geom::dist_sq(&w.points[i], &w.points[j]).unwrap()
}

#[test]
fn collinear_triple_cells() {
    let xs = [p(&["0", "0"]), p(&["1", "0"]), p(&["2", "0"])];
    let (w, cells) = peaucellier(&xs).unwrap();
    assert_eq!(cells.len(), 3);
    for cell in &cells {
        let u = cell.u as i64;
        assert_eq!(u, 1);
        let sq = |k: i64| Constructible::from_int(k * k * u * u);
        assert_eq!(d2(&w, cell.p, cell.o), sq(4));
        assert_eq!(d2(&w, cell.p, cell.a), sq(4));
        assert_eq!(d2(&w, cell.p, cell.t), sq(1));
        assert_eq!(d2(&w, cell.t, cell.x), sq(1));
        assert_eq!(cell.b.len(), 2);
        for &b in &cell.b {
            assert_eq!(d2(&w, cell.o, b), sq(6));
            assert_eq!(d2(&w, cell.x, b), sq(2));
            assert_eq!(d2(&w, cell.a, b), sq(2));
        }
        assert_ne!(cell.b[0], cell.b[1]);
        let product = geom::dist(&w.points[cell.o], &w.points[cell.x]).unwrap()
            * geom::dist(&w.points[cell.o], &w.points[cell.a]).unwrap();
        assert_eq!(product, Constructible::from_int(32 * u * u));
    }
    assert!(matches!(&w.claims[0], Claim::Hyperplane { points } if points.len() == 3));
    passes(&w);
}

#[test]
fn inversion_detects_leaving_the_plane() {
    let xs = [p(&["0", "0"]), p(&["3", "0"])];
    let (w, cells) = peaucellier(&xs).unwrap();
    let cell = &cells[0];
    let (pp, o) = (&w.points[cell.p], &w.points[cell.o]);
    let power = Constructible::from_int(32 * (cell.u as i64).pow(2));
    let four_u = Constructible::from_int(16 * (cell.u as i64).pow(2));
    for off in ["1/7", "sqrt(2)/100", "-1"] {
        let x = p(&["1", off]);
        let a = geom::invert(o, &power, &x).unwrap();
        assert_ne!(geom::dist_sq(pp, &a).unwrap(), four_u, "offset {off}");
    }
    let a = geom::invert(o, &power, &p(&["5/2", "0"])).unwrap();
    assert_eq!(geom::dist_sq(pp, &a).unwrap(), four_u);
}

#[test]
fn single_point_hyperplane() {
    let (w, cells) = peaucellier(&[p(&["1/2", "sqrt(3)"])]).unwrap();
    assert_eq!(cells.len(), 1);
    passes(&w);
}

#[test]
fn hyperplane_rejects_spanning_points() {
    let xs = [p(&["0", "0"]), p(&["1", "0"]), p(&["0", "1"])];
    assert_eq!(hyperplane_witness(&xs, 2), Err(RelationError::NotCoplanar));
    assert!(hyperplane_witness(&[p(&["0", "0"])], 3).is_err());
    assert!(hyperplane_witness(&[], 2).is_err());
}

#[test]
fn reflections_example() {
    let (j, k, l, m) = (p(&["0", "0"]), p(&["1", "0"]), p(&["0", "2"]), p(&["1", "2"]));
    let r = proposition_reflections(&j, &k, &l, &m).unwrap();
    assert_eq!(r.a, l);
    let h1 = r.first.clone().unwrap();
    assert_eq!(geom::reflect(&j, &h1), r.a);
    assert_eq!(geom::reflect(&k, &h1), r.b);
    assert_eq!(r.b, p(&["1", "2"]));
    if let Some(h2) = &r.second {
        assert_eq!(geom::reflect(&r.a, h2), r.a);
        assert_eq!(geom::reflect(&r.b, h2), m);
    }
}

#[test]
fn reflections_on_rotated_pairs() {
    let cases = [
        (["0", "0"], ["1", "0"], ["3", "1"], ["3", "2"]),
        (["1/2", "0"], ["0", "sqrt(3)/2"], ["2", "2"], ["3", "2"]),
        (["0", "0"], ["3", "4"], ["-1", "1"], ["4", "1"]),
    ];
    for (j, k, l, m) in cases {
        let (j, k, l, m) = (p(&j), p(&k), p(&l), p(&m));
        let r = proposition_reflections(&j, &k, &l, &m).unwrap();
        let jk = geom::dist_sq(&j, &k).unwrap();
        assert_eq!(geom::dist_sq(&r.a, &r.b).unwrap(), jk);
        assert_eq!(geom::dist_sq(&r.a, &m).unwrap(), jk);
        let h1 = r.first.clone().unwrap();
        assert_eq!(geom::reflect(&j, &h1), r.a);
        assert_eq!(geom::reflect(&k, &h1), r.b);
        let h2 = r.second.clone().unwrap();
        assert_eq!(geom::reflect(&r.a, &h2), r.a);
        assert_eq!(geom::reflect(&r.b, &h2), m);
    }
}

#[test]
fn reflections_degenerate_and_unequal() {
    let (j, k) = (p(&["0", "0"]), p(&["1", "0"]));
    let r = proposition_reflections(&j, &k, &j, &k).unwrap();
    assert!(r.first.is_none() && r.second.is_none());
    assert_eq!(
        proposition_reflections(&j, &k, &j, &p(&["2", "0"])),
        Err(RelationError::UnequalPairs)
    );
}

#[test]
fn equal_distance_identity_case() {
    let (j, k) = (p(&["0", "0"]), p(&["1", "1/3"]));
    let w = equal_distance_witness(&j, &k, &j, &k, 2).unwrap();
    assert_eq!(w.points, vec![j, k]);
    assert!(w.unit_edges.is_empty());
    passes(&w);
}

#[test]
fn equal_distance_one_pair_shared() {
    for (j, k, l, m) in [
        (["-1", "0"], ["0", "1"], ["1", "0"], ["0", "1"]),
        (["0", "1"], ["-1", "0"], ["0", "1"], ["1", "0"]),
    ] {
        let w = equal_distance_witness(&p(&j), &p(&k), &p(&l), &p(&m), 2).unwrap();
        assert!(matches!(w.claims.last(), Some(Claim::EqualDistance { .. })));
        passes(&w);
    }
}

#[test]
fn equal_distance_general_case() {
    let (j, k, l, m) = (p(&["-1", "0"]), p(&["-2", "1"]), p(&["1", "0"]), p(&["2", "1"]));
    let w = equal_distance_witness(&j, &k, &l, &m, 2).unwrap();
    let Some(Claim::EqualDistance { first, second }) = w.claims.last() else {
        panic!("missing claim");
    };
    assert_eq!(d2(&w, first.0, first.1), d2(&w, second.0, second.1));
    assert_eq!(w.points[first.0], j);
    assert_eq!(w.points[second.1], m);
    passes(&w);
}

#[test]
fn equal_distance_errors() {
    let (j, k) = (p(&["0", "0"]), p(&["1", "0"]));
    assert_eq!(
        equal_distance_witness(&j, &k, &p(&["5", "0"]), &p(&["5", "2"]), 2),
        Err(RelationError::UnequalPairs)
    );
}

#[test]
fn equal_sides_reduce_without_zero_gap() {
    let (j, k, l, m) = (p(&["0", "0"]), p(&["1", "0"]), p(&["1", "1"]), p(&["0", "1"]));
    passes(&equal_distance_witness(&j, &k, &l, &m, 2).unwrap());
}

#[test]
fn delta_is_a_third_of_the_gap() {
    let jk = Constructible::one();
    let jm = Constructible::from_int(2);
    assert_eq!((&jm - &jk).checked_div(&Constructible::from_int(3)).unwrap(), c("1/3"));
}

#[test]
fn distinct_uses_half_distance() {
    let w = distinct_witness(&p(&["0", "0"]), &p(&["1", "0"])).unwrap();
    assert!(matches!(&w.claims[0], Claim::Approx { eps, .. } if *eps == c("1/2")));
    assert!(w.claims.iter().any(|cl| matches!(cl, Claim::Distinct { .. })));
    passes(&w);
    let w = distinct_witness(&p(&["sqrt(2)", "1/3"]), &p(&["-1", "sqrt(5)"])).unwrap();
    passes(&w);
    assert!(distinct_witness(&p(&["1", "1"]), &p(&["1", "1"])).is_err());
}

#[test]
fn less_than_gap() {
    let (j, k, l, m) = (p(&["0", "0"]), p(&["1", "0"]), p(&["0", "1"]), p(&["4", "1"]));
    let w = less_than_witness(&j, &k, &l, &m).unwrap();
    let eps: Vec<_> = w
        .claims
        .iter()
        .filter_map(|cl| match cl {
            Claim::Approx { eps, .. } => Some(eps.clone()),
            _ => None,
        })
        .collect();
    assert_eq!(eps, vec![Constructible::one(); 2]);
    let (jk, lm) = (Constructible::one(), Constructible::from_int(4));
    assert!(&jk + &eps[0] < &lm - &eps[0]);
    passes(&w);
    assert!(less_than_witness(&l, &m, &j, &k).is_err());
    assert!(less_than_witness(&j, &k, &j, &k).is_err());
}

#[test]
fn less_than_with_radicals() {
    let w = less_than_witness(&p(&["0", "0"]), &p(&["1", "1"]), &p(&["0", "0"]), &p(&["3/2", "0"])).unwrap();
    passes(&w);
}
