//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use bq_witness::field::Constructible;
use bq_witness::gadgets::{self, compile};
use bq_witness::geom::{self, Frame, Point};
use bq_witness::relations::{equal_distance_witness, hyperplane_witness, less_than_witness, peaucellier};
use bq_witness::rigidity::{falsify_search, is_rigid, Framework, Verdict};
use bq_witness::verify::{unit_graph, verify};
use bq_witness::witness::{Claim, Figure, GadgetNode, WitnessSet};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IDENTITY_BUDGET: Duration = Duration::from_secs(1);
const COMPILE_BUDGET: Duration = Duration::from_secs(30);
const RIGIDITY_BUDGET: Duration = Duration::from_secs(5);
const FALSIFY_BUDGET: Duration = Duration::from_secs(120);
const FIELD_BUDGET: Duration = Duration::from_secs(10);

const SINGULAR_TOL: f64 = 1e-8;
const UNIT_RESIDUAL_TOL: f64 = 1e-10;
const CLAIM_DEVIATION_TOL: f64 = 1e-5;
const FALSIFY_MARGIN: f64 = 0.5;
const FALSIFY_RESTARTS: usize = 200;
const FALSIFY_SEED: u64 = 42;
const ORACLE_DIGITS: u32 = 140;
const ORACLE_FLOOR_DIGITS: u32 = 50;

const EXPRESSIONS: [&str; 10] =
    ["1", "2", "7", "1/3", "22/7", "sqrt(3)", "sqrt(2)", "1+sqrt(2)", "sqrt(1/2)", "(2*sqrt(3))/5"];

fn c(s: &str) -> Constructible {
    s.parse().unwrap()
}

fn snapshot_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/snapshots").join(name)
}

/// Compare against a stored snapshot, recording it on first run.
fn snapshot(name: &str, got: &str) -> Result<(), String> {
    let path = snapshot_path(name);
    match std::fs::read_to_string(&path) {
        Ok(want) if want == got => Ok(()),
        Ok(want) => Err(format!("snapshot {name} differs:\n--- stored\n{want}--- now\n{got}")),
        Err(_) => {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, got).unwrap();
            Ok(())
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    check(t < budget, || format!("{what} took {t:.2?}, budget {budget:?}"))
}

fn passes(w: &WitnessSet, what: &str) -> Result<(), String> {
    let r = verify(w);
    check(r.passed, || format!("{what}: verify failed {:?} {:?}", r.failed_edges, r.claims))
}

// 1. exact identities

fn exact_identities() -> Result<String, String> {
    let mut checked = 0;
    for n in 2..=5usize {
        let nq = n as i64;
        let frame = Frame::axes(n, 0..n - 1);
        for ds in ["1", "3/2", "sqrt(2)"] {
            let start = Instant::now();
            let d = c(ds);
            let scale = Constructible::rational(2 * nq + 2, nq).unwrap();
            let simplex = geom::regular_simplex(n, &d, &Point::origin(n), &frame).map_err(|e| e.to_string())?;
            let (p, q) = (geom::apex(&simplex, &d, 1).unwrap(), geom::apex(&simplex, &d, -1).unwrap());
            check(geom::dist_sq(&p, &q).unwrap() == &scale * &d.square(), || format!("apex separation n={n} d={ds}"))?;

            let edge = &scale.sqrt().unwrap() * &d;
            let simplex = geom::regular_simplex(n, &edge, &Point::origin(n), &frame).unwrap();
            let (p, q) = (geom::apex(&simplex, &d, 1).unwrap(), geom::apex(&simplex, &d, -1).unwrap());
            let sep = &Constructible::rational(2, nq).unwrap() * &d;
            check(geom::dist(&p, &q).unwrap() == sep, || format!("bound separation n={n} d={ds}"))?;
            let circ = &(&Constructible::one() - &Constructible::rational(1, nq * nq).unwrap()) * &d.square();
            check(geom::simplex_circumradius_sq(n, &edge) == circ, || format!("circumradius n={n} d={ds}"))?;
            check(geom::dist_sq(&simplex[0], &geom::centroid(&simplex)).unwrap() == circ, || {
                format!("placed circumradius n={n} d={ds}")
            })?;
            within(start, IDENTITY_BUDGET, &format!("simplex identities n={n} d={ds}"))?;
            checked += 3;
        }
        for (a, b) in [("2", "1"), ("5", "4"), ("sqrt(3)", "1")] {
            let start = Instant::now();
            let (a, b) = (c(a), c(b));
            let target = &a.square() - &b.square();
            let x = Point::origin(n);
            let up = Point::axis(n, 1).0;
            let s = x.offset(&-&b, &up);
            let t = x.offset(&b, &up);
            let hint = Frame::axes(n, 0..n);
            let y = geom::sphere_intersect_point(&s, &a, &t, &a, &hint, 1).map_err(|e| e.to_string())?;
            check(geom::dist_sq(&x, &y).unwrap() == target, || format!("median n={n} a={a} b={b}"))?;
            check(geom::dist(&s, &t).unwrap() == &b + &b, || format!("median base n={n}"))?;
            check(geom::dist(&y, &s).unwrap() == a && geom::dist(&y, &t).unwrap() == a, || format!("median legs n={n}"))?;
            within(start, IDENTITY_BUDGET, &format!("median n={n} a={a} b={b}"))?;
            let w = gadgets::pyth_diff(&x, &x.offset(&target.sqrt().unwrap(), &Point::axis(n, 0).0), &a, &b)
                .map_err(|e| e.to_string())?;
            let value = match &w.claims[0] {
                Claim::ExactDistance { value, .. } => value.clone(),
                other => return Err(format!("unexpected claim {other:?}")),
            };
            check(value.square() == target, || format!("difference witness n={n} a={a} b={b}"))?;
            passes(&w, &format!("difference witness n={n}"))?;
            checked += 1;
        }
        for u in 1..=3i64 {
            let start = Instant::now();
            let p = Point::origin(n);
            let normal = Point::axis(n, n - 1).0;
            let o = p.offset(&Constructible::from_int(4 * u), &normal);
            let power = Constructible::from_int(32 * u * u);
            for k in 1..=2 * u {
                let x = p.offset(&Constructible::rational(k, 1).unwrap(), &Point::axis(n, 0).0);
                let a = geom::invert(&o, &power, &x).unwrap();
                let prod = &geom::dist(&o, &x).unwrap() * &geom::dist(&o, &a).unwrap();
                check(prod == power, || format!("inversion product n={n} u={u}"))?;
                check(geom::dist_sq(&p, &a).unwrap() == Constructible::from_int(16 * u * u), || {
                    format!("inversion arm n={n} u={u}")
                })?;
            }
            within(start, IDENTITY_BUDGET, &format!("inversion n={n} u={u}"))?;
            checked += 1;
        }
    }
    for u in 1..=3i64 {
        let start = Instant::now();
        let xs = [Point::from_ints(&[-2 * u, 0]), Point::from_ints(&[2 * u, 0])];
        let (w, cells) = peaucellier(&xs).map_err(|e| e.to_string())?;
        for cell in &cells {
            check(cell.u as i64 == u, || format!("cell scale {} for u={u}", cell.u))?;
            let prod = &geom::dist(&w.points[cell.o], &w.points[cell.x]).unwrap()
                * &geom::dist(&w.points[cell.o], &w.points[cell.a]).unwrap();
            check(prod == Constructible::from_int(32 * u * u), || format!("cell product u={u}"))?;
        }
        within(start, IDENTITY_BUDGET, &format!("inversor cell u={u}"))?;
        checked += 1;
    }
    Ok(format!("{checked} identities"))
}

// 2. compiler coverage

fn compile_all() -> Result<(String, Vec<String>), String> {
    let mut lines = Vec::new();
    let mut json = Vec::new();
    for n in [2usize, 3] {
        for e in EXPRESSIONS {
            let w = compile(e, n, &Point::origin(n), &Point::axis(n, 0).0).map_err(|err| format!("{e}: {err}"))?;
            let r = verify(&w);
            let failures = r.failed_edges.len() + r.claims.iter().filter(|c| !c.holds).count();
            check(r.passed && failures == 0, || format!("n={n} {e}: {failures} violations"))?;
            lines.push(format!(
                "n={n} {e}: points {} edges {} tower {} derivation {}",
                r.points, r.declared_edges, r.max_tower_depth, r.derivation_depth
            ));
            json.push(serde_json::to_string(&w).unwrap());
        }
    }
    Ok((lines.join("\n") + "\n", json))
}

fn compiler_coverage() -> Result<String, String> {
    let start = Instant::now();
    let (sizes, _) = compile_all()?;
    within(start, COMPILE_BUDGET, "compiler coverage")?;
    snapshot("compile_sizes.txt", &sizes)?;
    Ok(format!("20 witnesses in {:.2?}", start.elapsed()))
}

// 3. positive rationals

fn rational_density() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let (p, q) = (rng.gen_range(1..=50i64), rng.gen_range(1..=50i64));
        let w = compile(&format!("{p}/{q}"), 2, &Point::origin(2), &Point::axis(2, 0).0)
            .map_err(|e| format!("{p}/{q}: {e}"))?;
        let want = Constructible::rational(p, q).unwrap();
        check(matches!(&w.claims[0], Claim::ExactDistance { value, .. } if *value == want), || {
            format!("{p}/{q}: claim value")
        })?;
        passes(&w, &format!("{p}/{q}"))?;
    }
    Ok("20 rationals".into())
}

// 4. approximation certificates

fn random_constructible(rng: &mut ChaCha8Rng, root: &Constructible) -> Constructible {
    let q = Constructible::rational(rng.gen_range(-20..=20), rng.gen_range(1..=7)).unwrap();
    let s = Constructible::rational(rng.gen_range(-3..=3), rng.gen_range(1..=4)).unwrap();
    &q + &(&s * root)
}

fn random_point(rng: &mut ChaCha8Rng, root: &Constructible) -> Point {
    Point::new((0..2).map(|_| random_constructible(rng, root)).collect())
}

fn approximation_certificates() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut count = 0;
    for _ in 0..10 {
        let root = Constructible::from_int([2, 3, 5][rng.gen_range(0..3)]).sqrt().unwrap();
        let x = random_point(&mut rng, &root);
        let mut y = random_point(&mut rng, &root);
        while y == x {
            y = random_point(&mut rng, &root);
        }
        for eps in ["1", "1/10", "1/100"] {
            let eps = c(eps);
            let w = gadgets::approx_gadget(&x, &y, &eps).map_err(|e| e.to_string())?;
            let Claim::Approx { pair, via, .. } = &w.claims[0] else {
                return Err("missing approx claim".into());
            };
            let xz = geom::dist(&w.points[pair.0], &w.points[*via]).unwrap();
            let zy = geom::dist(&w.points[*via], &w.points[pair.1]).unwrap();
            check(xz.is_rational() && xz.sign() > 0, || format!("|xz| = {xz} not a positive rational"))?;
            check(zy.is_rational() && zy.sign() > 0, || format!("|zy| = {zy} not a positive rational"))?;
            check(&zy + &zy <= eps, || format!("|zy| = {zy} exceeds eps/2 for eps {eps}"))?;
            passes(&w, "approximation")?;
            count += 1;
        }
    }
    Ok(format!("{count} certificates"))
}

// 5. relation gadgets

fn relation_gadgets() -> Result<String, String> {
    let p = |v: &[&str]| Point::new(v.iter().map(|s| c(s)).collect());
    let w = hyperplane_witness(&[p(&["0", "0"]), p(&["1", "0"]), p(&["2", "0"])], 2).map_err(|e| e.to_string())?;
    passes(&w, "hyperplane n=2")?;
    let plane = [p(&["0", "0", "0"]), p(&["1", "0", "0"]), p(&["0", "1", "0"]), p(&["1", "1", "0"])];
    let w3 = hyperplane_witness(&plane, 3).map_err(|e| e.to_string())?;
    passes(&w3, "hyperplane n=3")?;
    let cases = [
        ("J=L,K=M", ["0", "0"], ["1", "1/2"], ["0", "0"], ["1", "1/2"]),
        ("J!=L,K=M", ["-1", "0"], ["0", "1"], ["1", "0"], ["0", "1"]),
        ("J=L,K!=M", ["0", "1"], ["-1", "0"], ["0", "1"], ["1", "0"]),
        ("J!=L,K!=M", ["-1", "0"], ["-2", "1"], ["1", "0"], ["2", "1"]),
    ];
    for (name, j, k, l, m) in cases {
        let w = equal_distance_witness(&p(&j), &p(&k), &p(&l), &p(&m), 2).map_err(|e| format!("{name}: {e}"))?;
        passes(&w, name)?;
    }
    let (j, k, l, m) = (p(&["0", "0"]), p(&["1", "0"]), p(&["0", "1"]), p(&["4", "1"]));
    let w = less_than_witness(&j, &k, &l, &m).map_err(|e| e.to_string())?;
    passes(&w, "less-than")?;
    let eps = w.claims.iter().find_map(|cl| match cl {
        Claim::Approx { eps, .. } => Some(eps.clone()),
        _ => None,
    });
    let eps = eps.ok_or("missing approximation")?;
    let (jk, lm) = (geom::dist(&j, &k).unwrap(), geom::dist(&l, &m).unwrap());
    check(&(&lm - &jk) == &(&eps * &Constructible::from_int(3)), || "gap is not 3 eps".into())?;
    check(&jk + &eps < &lm - &eps, || "intervals overlap".into())?;
    Ok(format!("hyperplane n=3 has {} points", w3.points.len()))
}

// 6. rigidity

fn rigidity_suite() -> Result<String, String> {
    let start = Instant::now();
    let h = 3f64.sqrt() / 2.0;
    let tri = Framework::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], vec![(0, 1), (1, 2), (0, 2)]);
    let r = is_rigid(&tri, SINGULAR_TOL);
    check(r.rank == 3 && r.expected_rank == 3 && r.verdict == Verdict::Rigid, || format!("triangle {r:?}"))?;
    let sq = Framework::new(
        2,
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
        vec![(0, 1), (1, 2), (2, 3), (0, 3)],
    );
    let r = is_rigid(&sq, SINGULAR_TOL);
    check(r.rank == 4 && r.verdict == Verdict::Flexible, || format!("4-cycle {r:?}"))?;
    let x = Point::origin(2);
    let y = x.offset(&c("sqrt(3)"), &Point::axis(2, 0).0);
    let f = unit_graph(&gadgets::scale_up(&x, &y, &Constructible::one()).unwrap());
    let r = is_rigid(&f, SINGULAR_TOL);
    check(r.expected_rank == 11, || format!("expected rank {}", r.expected_rank))?;
    let line = format!(
        "vertices {} edges {} rank {} expected {} verdict {:?}\n",
        f.vertices.len(),
        f.edges.len(),
        r.rank,
        r.expected_rank,
        r.verdict
    );
    snapshot("acceptance_rigidity.txt", &line)?;
    within(start, RIGIDITY_BUDGET, "rigidity suite")?;
    Ok(line.trim_end().to_string())
}

// 7. falsifier

fn bare_claim() -> WitnessSet {
    WitnessSet {
        dim: 2,
        points: vec![Point::origin(2), Point::from_ints(&[2, 0])],
        unit_edges: vec![],
        claims: vec![Claim::ExactDistance {
            pair: (0, 1),
            value: Constructible::from_int(2),
        }],
        derivation: Arc::new(GadgetNode::new(Figure::Compile)),
        approximate: false,
    }
}

fn falsify_pair() -> Result<(String, String), String> {
    let w = compile("2", 2, &Point::origin(2), &Point::axis(2, 0).0).map_err(|e| e.to_string())?;
    let r = falsify_search(&w, FALSIFY_RESTARTS, FALSIFY_SEED, UNIT_RESIDUAL_TOL, FALSIFY_MARGIN)
        .map_err(|e| e.to_string())?;
    check(!r.violated, || format!("compiled 2 violated: {}", r.best_claim_deviation))?;
    check(r.near_feasible.iter().all(|t| t.claim_deviation < CLAIM_DEVIATION_TOL), || "deviation".into())?;
    let control = falsify_search(&bare_claim(), FALSIFY_RESTARTS, FALSIFY_SEED, UNIT_RESIDUAL_TOL, FALSIFY_MARGIN)
        .map_err(|e| e.to_string())?;
    check(control.violated, || "bare claim was not folded".into())?;
    Ok((serde_json::to_string(&r).unwrap(), serde_json::to_string(&control).unwrap()))
}

fn falsifier() -> Result<String, String> {
    let start = Instant::now();
    falsify_pair()?;
    within(start, FALSIFY_BUDGET, "falsifier")?;
    Ok(format!("{FALSIFY_RESTARTS} restarts each in {:.2?}", start.elapsed()))
}

// 8. field suite against a fixed-point decimal oracle

#[derive(Clone)]
struct Fixed(BigInt);

fn unit_scale() -> BigInt {
    BigInt::from(10).pow(ORACLE_DIGITS)
}

impl Fixed {
    fn int(i: i64) -> Fixed {
        Fixed(BigInt::from(i) * unit_scale())
    }
    fn add(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 + &o.0)
    }
    fn sub(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 - &o.0)
    }
    fn mul(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 * &o.0 / unit_scale())
    }
    fn div(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 * unit_scale() / &o.0)
    }
    fn sqrt(&self) -> Fixed {
        Fixed((&self.0 * unit_scale()).sqrt())
    }
    /// Whether `|self| > 10^-floor`.
    fn exceeds(&self, floor: u32) -> bool {
        self.0.abs() > BigInt::from(10).pow(ORACLE_DIGITS - floor)
    }
}

struct Sample {
    text: String,
    value: Fixed,
}

fn leaf(rng: &mut ChaCha8Rng) -> Sample {
    match rng.gen_range(0..3) {
        0 => {
            let i = rng.gen_range(1..=12);
            Sample { text: i.to_string(), value: Fixed::int(i) }
        }
        1 => {
            let (p, q) = (rng.gen_range(1..=30), rng.gen_range(2..=9));
            Sample { text: format!("({p}/{q})"), value: Fixed::int(p).div(&Fixed::int(q)) }
        }
        _ => {
            let r = [2, 3, 5, 6, 7][rng.gen_range(0..5)];
            Sample { text: format!("sqrt({r})"), value: Fixed::int(r).sqrt() }
        }
    }
}

fn expr(rng: &mut ChaCha8Rng, depth: u32) -> Sample {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let (a, b) = (expr(rng, depth - 1), expr(rng, depth - 1));
    match rng.gen_range(0..5) {
        0 => Sample { text: format!("({}+{})", a.text, b.text), value: a.value.add(&b.value) },
        1 => Sample { text: format!("({}-{})", a.text, b.text), value: a.value.sub(&b.value) },
        2 => Sample { text: format!("({}*{})", a.text, b.text), value: a.value.mul(&b.value) },
        3 if b.value.exceeds(10) => Sample { text: format!("({}/{})", a.text, b.text), value: a.value.div(&b.value) },
        _ if a.value.0.is_positive() && depth == 1 => {
            Sample { text: format!("sqrt({})", a.text), value: a.value.sqrt() }
        }
        _ => Sample { text: format!("({}+{})", a.text, b.text), value: a.value.add(&b.value) },
    }
}

/// `e − r` with `r` a decimal truncation of `e` to a random number of digits.
fn near_zero(rng: &mut ChaCha8Rng) -> Sample {
    let e = expr(rng, 2);
    let k = rng.gen_range(2..=30u32);
    let cut = BigInt::from(10).pow(ORACLE_DIGITS - k);
    let r = &e.value.0 / &cut;
    let text = format!("({}-({}/{}))", e.text, r, BigInt::from(10).pow(k));
    let value = e.value.sub(&Fixed(&r * &cut));
    Sample { text, value }
}

fn oracle_sign(f: &Fixed) -> i8 {
    if f.0.is_zero() {
        0
    } else if f.0.is_positive() {
        1
    } else {
        -1
    }
}

fn field_suite() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pool: Vec<Constructible> = (0..40).map(|_| c(&expr(&mut rng, 2).text)).collect();
    let pick = |rng: &mut ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
    for i in 0..1000 {
        let (a, b, d) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let ok = match i % 4 {
            0 => &(&a + &b) + &d == &a + &(&b + &d),
            1 => &a * &(&b + &d) == &(&a * &b) + &(&a * &d),
            2 => &(&a + &b) - &b == a,
            _ => a.is_zero() || &a * &a.recip().unwrap() == Constructible::one(),
        };
        check(ok, || format!("axiom {} failed on {a}, {b}, {d}", i % 4))?;
    }
    let mut compared = 0;
    let mut tries = 0;
    while compared < 1000 {
        tries += 1;
        check(tries < 5000, || "too few samples above the oracle floor".into())?;
        let s = if tries % 2 == 0 { near_zero(&mut rng) } else { expr(&mut rng, 3) };
        if !s.value.exceeds(ORACLE_FLOOR_DIGITS) {
            continue;
        }
        let v = c(&s.text);
        check(v.sign() == oracle_sign(&s.value), || format!("sign of {} disagrees with the oracle", s.text))?;
        compared += 1;
    }
    for _ in 0..200 {
        let s = expr(&mut rng, 2);
        let v = c(&s.text).abs();
        check(v.square().sqrt().unwrap() == v, || format!("sqrt of square of {}", s.text))?;
    }
    within(start, FIELD_BUDGET, "field suite")?;
    Ok(format!("1000 axioms, {compared} signs, 200 roots in {:.2?}", start.elapsed()))
}

// 9. determinism

fn determinism() -> Result<String, String> {
    let (sizes_a, json_a) = compile_all()?;
    let (sizes_b, json_b) = compile_all()?;
    check(sizes_a == sizes_b && json_a == json_b, || "compiled witnesses differ between runs".into())?;
    let fa = falsify_pair()?;
    let fb = falsify_pair()?;
    check(fa == fb, || "falsifier reports differ between runs".into())?;
    let bytes: usize = json_a.iter().map(String::len).sum::<usize>() + fa.0.len() + fa.1.len();
    Ok(format!("{bytes} bytes identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Result<String, String>); 9] = [
        ("exact identities", exact_identities),
        ("compiler coverage", compiler_coverage),
        ("positive rationals", rational_density),
        ("approximation certificates", approximation_certificates),
        ("relation gadgets", relation_gadgets),
        ("rigidity suite", rigidity_suite),
        ("falsifier", falsifier),
        ("field suite", field_suite),
        ("determinism", determinism),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let t = start.elapsed();
        match outcome {
            Ok(note) => println!("criterion {} {name}: PASS ({t:.2?}) {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({t:.2?}) {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

