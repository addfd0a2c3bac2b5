//! Recipes: structural descriptions of how a distance is forced, with a
//! planner that picks cheap recipes and a lowering from expression trees.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::{ArithOp, Constructible, Expr};

pub type R = Arc<Recipe>;

/// Squared circumradius of the simplex centred on the line of the
/// difference and sum gadgets; `None` is the unit-scaled simplex with edge
/// `√(2+2/n)`.
pub type Hub = Option<BigRational>;

/// How a distance is forced. Each variant names the gadget applied last.
#[derive(Clone)]
pub enum Recipe {
    Unit,
    /// `√(2+2/n)·d`
    ScaleUp(R),
    /// `(2/n)·d`, forced only as an upper bound.
    Bound(R),
    /// `2·d`
    Double(R),
    /// `k·d`, `k ≥ 3`
    Multiple(R, u32),
    /// `d/k`, `k ≥ 2`
    Divide(R, u32),
    /// `√(a²−b²)`, `a > b`
    PythDiff(R, R),
    /// `a − b`, `a > b`, with the hub simplex of [`Hub`]
    Diff(R, R, Hub),
    /// `a + b`
    Sum(R, R, Hub),
    /// `a·b/c`, `a ≠ c`
    Ratio(R, R, R),
    /// `√a`
    Sqrt(R),
}

impl Recipe {
    fn shallow(&self) -> (u8, [usize; 3], u32, Option<&BigRational>) {
        let p = |r: &R| Arc::as_ptr(r) as usize;
        match self {
            Recipe::Unit => (0, [0; 3], 0, None),
            Recipe::ScaleUp(a) => (1, [p(a), 0, 0], 0, None),
            Recipe::Bound(a) => (2, [p(a), 0, 0], 0, None),
            Recipe::Double(a) => (3, [p(a), 0, 0], 0, None),
            Recipe::Multiple(a, k) => (4, [p(a), 0, 0], *k, None),
            Recipe::Divide(a, k) => (5, [p(a), 0, 0], *k, None),
            Recipe::PythDiff(a, b) => (6, [p(a), p(b), 0], 0, None),
            Recipe::Diff(a, b, h) => (7, [p(a), p(b), 0], 0, h.as_ref()),
            Recipe::Sum(a, b, h) => (8, [p(a), p(b), 0], 0, h.as_ref()),
            Recipe::Ratio(a, b, c) => (9, [p(a), p(b), p(c)], 0, None),
            Recipe::Sqrt(a) => (10, [p(a), 0, 0], 0, None),
        }
    }
}

/// Children compare by identity; [`node`] makes that coincide with
/// structural equality.
impl PartialEq for Recipe {
    fn eq(&self, o: &Self) -> bool {
        self.shallow() == o.shallow()
    }
}

impl Eq for Recipe {}

impl std::hash::Hash for Recipe {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.shallow().hash(h)
    }
}

static NODES: LazyLock<Mutex<HashSet<R>>> = LazyLock::new(|| Mutex::new(HashSet::new()));

/// The shared instance of a recipe.
pub fn node(r: Recipe) -> R {
    let mut nodes = NODES.lock().unwrap();
    if let Some(x) = nodes.get(&r) {
        return x.clone();
    }
    let x = Arc::new(r);
    nodes.insert(x.clone());
    x
}

impl fmt::Debug for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Unit => write!(f, "1"),
            Recipe::ScaleUp(r) => write!(f, "scale_up({r:?})"),
            Recipe::Bound(r) => write!(f, "bound({r:?})"),
            Recipe::Double(r) => write!(f, "double({r:?})"),
            Recipe::Multiple(r, k) => write!(f, "multiple({r:?}, {k})"),
            Recipe::Divide(r, k) => write!(f, "divide({r:?}, {k})"),
            Recipe::PythDiff(a, b) => write!(f, "pyth_diff({a:?}, {b:?})"),
            Recipe::Diff(a, b, None) => write!(f, "diff({a:?}, {b:?})"),
            Recipe::Sum(a, b, None) => write!(f, "sum({a:?}, {b:?})"),
            Recipe::Diff(a, b, Some(h)) => write!(f, "diff({a:?}, {b:?}; hub {h})"),
            Recipe::Sum(a, b, Some(h)) => write!(f, "sum({a:?}, {b:?}; hub {h})"),
            Recipe::Ratio(a, b, c) => write!(f, "ratio({a:?}, {b:?}, {c:?})"),
            Recipe::Sqrt(a) => write!(f, "sqrt({a:?})"),
        }
    }
}

pub fn unit() -> R {
    node(Recipe::Unit)
}

pub fn scale_up(r: R) -> R {
    node(Recipe::ScaleUp(r))
}

pub fn bound(r: R) -> R {
    node(Recipe::Bound(r))
}

pub fn double(r: R) -> R {
    node(Recipe::Double(r))
}

pub fn multiple(r: R, k: u32) -> R {
    match k {
        0 => panic!("zero multiple"),
        1 => r,
        2 => double(r),
        _ => node(Recipe::Multiple(r, k)),
    }
}

pub fn divide(r: R, k: u32) -> R {
    match k {
        0 => panic!("division by zero"),
        1 => r,
        _ => node(Recipe::Divide(r, k)),
    }
}

pub fn integer(k: u32) -> R {
    multiple(unit(), k)
}

fn q(p: i64, d: i64) -> Constructible {
    Constructible::rational(p, d).unwrap()
}

fn cint(i: i64) -> Constructible {
    Constructible::from_int(i)
}

/// `2 + 2/n`
pub fn scale_sq(n: usize) -> Constructible {
    q(2 * n as i64 + 2, n as i64)
}

static VALUES: LazyLock<Mutex<HashMap<(R, usize), Constructible>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// The distance a recipe forces in dimension `n`.
pub fn value(r: &R, n: usize) -> Constructible {
    if let Recipe::Unit = **r {
        return Constructible::one();
    }
    let key = (r.clone(), n);
    if let Some(v) = VALUES.lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = match &**r {
        Recipe::Unit => unreachable!(),
        Recipe::ScaleUp(d) => &scale_sq(n).sqrt().unwrap() * &value(d, n),
        Recipe::Bound(d) => &q(2, n as i64) * &value(d, n),
        Recipe::Double(d) => &cint(2) * &value(d, n),
        Recipe::Multiple(d, k) => &cint(*k as i64) * &value(d, n),
        Recipe::Divide(d, k) => value(d, n).checked_div(&cint(*k as i64)).unwrap(),
        Recipe::PythDiff(a, b) => (&value(a, n).square() - &value(b, n).square())
            .sqrt()
            .unwrap(),
        Recipe::Diff(a, b, _) => &value(a, n) - &value(b, n),
        Recipe::Sum(a, b, _) => &value(a, n) + &value(b, n),
        Recipe::Ratio(a, b, c) => (&value(a, n) * &value(b, n))
            .checked_div(&value(c, n))
            .unwrap(),
        Recipe::Sqrt(a) => value(a, n).sqrt().unwrap(),
    };
    VALUES.lock().unwrap().insert(key, v.clone());
    v
}

/// Least positive integer `m` with `base < 2·m·leg`.
pub fn least_apex_multiple(base: &Constructible, leg: &Constructible) -> u32 {
    let ratio = base.checked_div(&(&cint(2) * leg)).unwrap();
    if let Some(q) = ratio.to_rational() {
        let m = q.floor().to_integer() + BigInt::one();
        return m.to_u32().expect("apex multiple fits in u32").max(1);
    }
    let mut m = ratio.to_f64().floor().max(0.0) as u32;
    while (base - &(&cint(2 * m as i64) * leg)).sign() >= 0 {
        m += 1;
    }
    while m > 1 && (base - &(&cint(2 * (m - 1) as i64) * leg)).sign() < 0 {
        m -= 1;
    }
    m.max(1)
}

pub fn hub_radius_sq(hub: &Hub, n: usize) -> Constructible {
    match hub {
        None => {
            let nn = (n * n) as i64;
            q(nn - 1, nn)
        }
        Some(r2) => Constructible::from_rational(r2.clone()),
    }
}

/// Edge of the hub simplex: `R·√(2n/(n−1))`.
pub fn hub_edge(hub: &Hub, n: usize) -> R {
    match hub {
        None => scale_up(unit()),
        Some(_) => {
            let e2 = &hub_radius_sq(hub, n) * &q(2 * n as i64, n as i64 - 1);
            plan_value(&e2.sqrt().unwrap(), n).expect("rational square")
        }
    }
}

/// Recipe for the spokes `|x p_i| = √(a² + R²)` of the difference and sum
/// gadgets.
pub fn spoke(a: &Constructible, hub: &Hub, n: usize) -> R {
    let r2 = hub_radius_sq(hub, n);
    let v = (&a.square() + &r2).sqrt().unwrap();
    plan_value(&v, n).unwrap_or_else(|| hypot(&v, a, &r2, n))
}

/// Fallback for `√(a² + c²)` via
/// `√(a²+c²) = √((√2·a)² − (√(a²−c²))²)` with the larger leg as `a`.
fn hypot(v: &Constructible, a: &Constructible, c2: &Constructible, n: usize) -> R {
    let c = c2.sqrt().unwrap();
    let (big, small) = if a > &c { (a.clone(), c) } else { (c, a.clone()) };
    if big == small {
        return realize(v, n);
    }
    let big_r = realize(&big, n);
    let root2 = sqrt2_times(big_r);
    let inner = node(Recipe::PythDiff(realize(&big, n), realize(&small, n)));
    node(Recipe::PythDiff(root2, inner))
}

/// `a ∓ b` through the centred-simplex gadget, choosing the cheapest hub.
/// When `a²` and `b²` are rational a hub radius making both spokes rational
/// is searched for.
pub fn diff_sum(a: &R, b: &R, sum: bool, n: usize) -> R {
    let make = |h: Hub| {
        node(if sum {
            Recipe::Sum(a.clone(), b.clone(), h)
        } else {
            Recipe::Diff(a.clone(), b.clone(), h)
        })
    };
    let mut cands = vec![make(None)];
    let (sa, sb) = (value(a, n).square().to_rational(), value(b, n).square().to_rational());
    if let (Some(sa), Some(sb)) = (sa, sb) {
        let two = BigRational::from_integer(2.into());
        let (hi, lo) = if sa > sb { (sa, sb) } else { (sb, sa) };
        let gap = &hi - &lo;
        for k in small_rationals(6) {
            if gap.is_zero() {
                break;
            }
            let u = (&gap / &k - &k) / &two;
            let r2 = &u * &u - &lo;
            if u.is_negative() || !r2.is_positive() || r2.denom().bits() > 12 || r2.numer().bits() > 12 {
                continue;
            }
            cands.push(make(Some(r2)));
        }
    }
    cheapest(cands, n)
}

/// `√2·a = √((√3·a)² − a²)`, `√3·a = √((2a)² − a²)`.
fn sqrt2_times(a: R) -> R {
    let root3 = node(Recipe::PythDiff(double(a.clone()), a.clone()));
    node(Recipe::PythDiff(root3, a))
}

// ---- cost model ---------------------------------------------------------

static COSTS: LazyLock<Mutex<HashMap<(R, usize), f64>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Estimated point count of the expanded witness (an upper bound, since
/// deduplication only shrinks it).
pub fn cost(r: &R, n: usize) -> f64 {
    if let Recipe::Unit = **r {
        return 2.0;
    }
    let key = (r.clone(), n);
    if let Some(c) = COSTS.lock().unwrap().get(&key) {
        return *c;
    }
    let nf = n as f64;
    let sub = |r: &R| cost(r, n) - 2.0;
    let c = match &**r {
        Recipe::Unit => unreachable!(),
        Recipe::ScaleUp(d) => (3.0 + 2.0 * nf) + (nf * (nf - 1.0) + 4.0 * nf + 1.0) * sub(d),
        Recipe::Bound(d) if n == 2 => cost(d, n),
        Recipe::Bound(d) => {
            (nf + 2.0) + nf * (nf - 1.0) / 2.0 * sub(&scale_up(d.clone())) + 2.0 * nf * sub(d)
        }
        Recipe::Double(d) => {
            4.0 + 2.0 * sub(d) + sub(&bound(d.clone())) + sub(&scale_up(scale_up(d.clone())))
        }
        Recipe::Multiple(d, k) => {
            let k = *k as f64;
            (k + 1.0) + k * sub(d) + (k - 1.0) * sub(&scaled(d, 2, n))
        }
        Recipe::Divide(d, k) => {
            let (m, k) = (divide_apex(d, *k, n), *k);
            5.0 + sub(d)
                + 2.0 * (sub(&integer((k - 1) * m)) + sub(&integer(m)) + sub(&integer(k * m)))
        }
        Recipe::PythDiff(a, b) => 4.0 + 2.0 * sub(b) + sub(&scaled(b, 2, n)) + 2.0 * sub(a),
        Recipe::Diff(a, b, hub) | Recipe::Sum(a, b, hub) => {
            let (va, vb) = (value(a, n), value(b, n));
            let skeleton = (nf + 3.0)
                + nf * (nf - 1.0) / 2.0 * sub(&hub_edge(hub, n))
                + nf * (sub(&spoke(&va, hub, n)) + sub(&spoke(&vb, hub, n)));
            let (x, y) = if let Recipe::Diff(..) = **r {
                (&va - &vb, vb.clone())
            } else {
                let m = if va < vb { va.clone() } else { vb.clone() };
                (&va + &vb, m)
            };
            let (lq, lr) = approx_legs(&x, &y);
            skeleton + sub(&plan_rational(&lq)) + sub(&plan_rational(&lr))
        }
        Recipe::Ratio(a, b, c) => {
            let m = ratio_apex(b, c, n);
            let (va, vc) = (value(a, n), value(c, n));
            5.0 + 2.0 * sub(&scaled(a, m, n))
                + 2.0 * sub(&scaled(c, m, n))
                + 2.0 * sub(&scaled(&gap(&va, &vc, n), m, n))
                + sub(b)
        }
        Recipe::Sqrt(a) => cost(&expand_sqrt(a, n), n),
    };
    COSTS.lock().unwrap().insert(key, c);
    c
}

/// `k·d`, either as a chain over `d` or planned afresh by value.
pub fn scaled(r: &R, k: u32, n: usize) -> R {
    let mut cands = vec![multiple(r.clone(), k)];
    let v = &value(r, n) * &cint(k as i64);
    if let Some(p) = plan_value(&v, n) {
        cands.push(p);
    }
    cheapest(cands, n)
}

fn cheapest(cands: Vec<R>, n: usize) -> R {
    cands
        .into_iter()
        .map(|r| (cost(&r, n), r))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
        .1
}

pub(crate) fn divide_apex(d: &R, k: u32, n: usize) -> u32 {
    least_apex_multiple(&value(d, n), &cint(k as i64))
}

pub(crate) fn ratio_apex(b: &R, c: &R, n: usize) -> u32 {
    least_apex_multiple(&value(b, n), &value(c, n))
}

/// Recipe for `|a − c|`, both nonzero and distinct.
pub(crate) fn gap(a: &Constructible, c: &Constructible, n: usize) -> R {
    let d = (a - c).abs();
    plan_value(&d, n).unwrap_or_else(|| {
        let (hi, lo) = if a > c { (a, c) } else { (c, a) };
        diff_sum(&realize(hi, n), &realize(lo, n), false, n)
    })
}

/// `√a = ½·√((a+1)² − (a−1)²)` for `a > 1` and
/// `√a = 1/√(1/a)` for `a < 1`.
pub(crate) fn expand_sqrt(a: &R, n: usize) -> R {
    let va = value(a, n);
    let one = Constructible::one();
    match va.cmp(&one) {
        std::cmp::Ordering::Equal => unit(),
        std::cmp::Ordering::Greater => {
            let plus = combine(&va, &one, a, &unit(), true, n);
            let minus = combine(&va, &one, a, &unit(), false, n);
            divide(node(Recipe::PythDiff(plus, minus)), 2)
        }
        std::cmp::Ordering::Less => {
            let inv = reciprocal(a, n);
            reciprocal(&node(Recipe::Sqrt(inv)), n)
        }
    }
}

fn reciprocal(a: &R, n: usize) -> R {
    let v = value(a, n).recip().unwrap();
    plan_value(&v, n).unwrap_or_else(|| ratio(unit(), unit(), a.clone(), n))
}

/// `a ± b` as a recipe, planning by value when possible.
fn combine(va: &Constructible, vb: &Constructible, a: &R, b: &R, add: bool, n: usize) -> R {
    let v = if add { va + vb } else { (va - vb).abs() };
    if let Some(r) = plan_value(&v, n) {
        return r;
    }
    if add || va > vb {
        diff_sum(a, b, add, n)
    } else {
        diff_sum(b, a, false, n)
    }
}

/// `a·b/c`, collapsing the cases where a leg ratio is trivial.
pub fn ratio(a: R, b: R, c: R, n: usize) -> R {
    let (va, vc) = (value(&a, n), value(&c, n));
    if va == vc {
        return b;
    }
    node(Recipe::Ratio(a, b, c))
}

// ---- planning -----------------------------------------------------------

fn to_u32(i: &BigInt) -> Option<u32> {
    i.to_u32()
}

static RATIONAL_PLANS: LazyLock<Mutex<HashMap<BigRational, R>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Cheapest known recipe for a positive rational (dimension-independent
/// choice, costed in the plane).
pub fn plan_rational(v: &Constructible) -> R {
    let q = v.to_rational().expect("rational distance");
    assert!(q.is_positive(), "distance must be positive");
    if let Some(r) = RATIONAL_PLANS.lock().unwrap().get(&q) {
        return r.clone();
    }
    let (p, d) = (q.numer().clone(), q.denom().clone());
    let p32 = to_u32(&p).expect("numerator fits in u32");
    let d32 = to_u32(&d).expect("denominator fits in u32");
    let r = if d32 == 1 {
        integer(p32)
    } else {
        let mut cands = Vec::new();
        for k in divisors(d32) {
            let inner = BigRational::new(p.clone() * BigInt::from(k), d.clone());
            cands.push(divide(plan_rational(&Constructible::from_rational(inner)), k));
        }
        if p32 > 1 {
            cands.push(node(Recipe::Ratio(integer(p32), unit(), integer(d32))));
        }
        cheapest(cands, 2)
    };
    RATIONAL_PLANS.lock().unwrap().insert(q, r.clone());
    r
}

/// Divisors of `d` above 1.
fn divisors(d: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut i = 2;
    while i * i <= d {
        if d % i == 0 {
            out.push(i);
            if i * i != d {
                out.push(d / i);
            }
        }
        i += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out.sort_unstable();
    out
}

fn small_rationals(bound: i64) -> Vec<BigRational> {
    let mut out = Vec::new();
    for den in 1..=bound {
        for num in 1..=bound {
            if num.gcd(&den) == 1 {
                out.push(BigRational::new(num.into(), den.into()));
            }
        }
    }
    out
}

static SQRT_PLANS: LazyLock<Mutex<HashMap<(BigRational, usize), R>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Recipe for `√s` with `s` a positive rational non-square, as
/// `√(A² − B²)` with `A − B = k`, `A + B = s/k` for a cheap rational `k`,
/// possibly after scaling `s` by a square. Only the legs of smallest height
/// are costed.
pub fn plan_sqrt_rational(s: &BigRational, n: usize) -> R {
    let key = (s.clone(), n);
    if let Some(r) = SQRT_PLANS.lock().unwrap().get(&key) {
        return r.clone();
    }
    let mut legs: Vec<(u64, i64, BigRational, BigRational)> =
        pyth_legs(s).map(|(a, b)| (height(&a) + height(&b), 1, a, b)).collect();
    for t in 2..=4i64 {
        let t2 = BigRational::from_integer(BigInt::from(t * t));
        legs.extend(pyth_legs(&(s * &t2)).map(|(a, b)| (height(&a) + height(&b), t, a, b)));
        legs.extend(pyth_legs(&(s / &t2)).map(|(a, b)| (height(&a) + height(&b), -t, a, b)));
    }
    legs.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut cands: Vec<R> = legs
        .into_iter()
        .take(8)
        .map(|(_, t, a, b)| {
            let ra = plan_rational(&Constructible::from_rational(a));
            let rb = plan_rational(&Constructible::from_rational(b));
            let r = node(Recipe::PythDiff(ra, rb));
            match t {
                1 => r,
                t if t > 1 => divide(r, t as u32),
                t => multiple(r, (-t) as u32),
            }
        })
        .collect();
    if let Some(q) = (Constructible::from_rational(s.clone()).checked_div(&scale_sq(n)))
        .ok()
        .and_then(|x| x.sqrt().ok())
        .filter(Constructible::is_rational)
    {
        cands.push(scale_up(plan_rational(&q)));
    }
    let r = cheapest(cands, n);
    SQRT_PLANS.lock().unwrap().insert(key, r.clone());
    r
}

fn height(q: &BigRational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

fn pyth_legs(s: &BigRational) -> impl Iterator<Item = (BigRational, BigRational)> + '_ {
    let two = BigRational::from_integer(2.into());
    small_rationals(8).into_iter().filter_map(move |k| {
        if &k * &k >= *s {
            return None;
        }
        let a = (s / &k + &k) / &two;
        let b = (s / &k - &k) / &two;
        if b.is_zero() || [&a, &b].iter().any(|x| x.numer().bits() > 12 || x.denom().bits() > 12) {
            return None;
        }
        Some((a, b))
    })
}

/// Plan by value when `v` or `v²` is rational.
pub fn plan_value(v: &Constructible, n: usize) -> Option<R> {
    if v.sign() <= 0 {
        return None;
    }
    if v.is_rational() {
        return Some(plan_rational(v));
    }
    let s = v.square().to_rational()?;
    if s.numer().bits() > 31 || s.denom().bits() > 31 {
        return None;
    }
    Some(plan_sqrt_rational(&s, n))
}

/// Recipe for an arbitrary positive constructible distance.
pub fn realize(v: &Constructible, n: usize) -> R {
    if let Some(r) = plan_value(v, n) {
        return r;
    }
    let e = crate::field::parse_expr(&v.to_string()).expect("display re-parses");
    lower(&e, n).expect("positive value").0
}

/// Lower an expression tree to a recipe realizing `|value|`. Returns `None`
/// for subexpressions that evaluate to zero.
pub fn lower(e: &Expr, n: usize) -> Option<(R, Constructible)> {
    let v = e.eval().ok()?;
    if v.is_zero() {
        return None;
    }
    let av = v.abs();
    if let Some(r) = plan_value(&av, n) {
        return Some((r, v));
    }
    let r = match e {
        Expr::Int(_) => unreachable!("integers are rational"),
        Expr::Neg(inner) => return lower(inner, n),
        Expr::Sqrt(inner) => {
            let (ri, _) = lower(inner, n)?;
            node(Recipe::Sqrt(ri))
        }
        Expr::Bin(op, a, b) => {
            let la = lower(a, n);
            let lb = lower(b, n);
            match (op, la, lb) {
                (ArithOp::Add | ArithOp::Sub, Some(x), None) => return Some(x),
                (ArithOp::Add, None, Some(y)) => return Some(y),
                (ArithOp::Sub, None, Some((ry, vy))) => return Some((ry, -vy)),
                (ArithOp::Add | ArithOp::Sub, Some((ra, va)), Some((rb, vb))) => {
                    let same_sign = (va.sign() == vb.sign()) == (*op == ArithOp::Add);
                    combine(&va.abs(), &vb.abs(), &ra, &rb, same_sign, n)
                }
                (ArithOp::Mul, Some((ra, _)), Some((rb, _))) => {
                    cheapest(vec![ratio(ra.clone(), rb.clone(), unit(), n), ratio(rb, ra, unit(), n)], n)
                }
                (ArithOp::Div, Some((ra, _)), Some((rb, _))) => cheapest(
                    vec![ratio(unit(), ra.clone(), rb.clone(), n), ratio(ra, unit(), rb, n)],
                    n,
                ),
                _ => return None,
            }
        }
    };
    Some((r, v))
}

/// Distinct division steps in the recipes; each adds a tower level to the
/// witness coordinates.
fn divisions(rs: &[&R]) -> usize {
    fn walk(r: &R, seen: &mut HashSet<*const Recipe>, count: &mut usize) {
        if !seen.insert(Arc::as_ptr(r)) {
            return;
        }
        if matches!(**r, Recipe::Divide(..) | Recipe::Ratio(..)) {
            *count += 1;
        }
        match &**r {
            Recipe::Unit => {}
            Recipe::ScaleUp(a)
            | Recipe::Bound(a)
            | Recipe::Double(a)
            | Recipe::Multiple(a, _)
            | Recipe::Divide(a, _)
            | Recipe::Sqrt(a) => walk(a, seen, count),
            Recipe::PythDiff(a, b) | Recipe::Diff(a, b, _) | Recipe::Sum(a, b, _) => {
                walk(a, seen, count);
                walk(b, seen, count);
            }
            Recipe::Ratio(a, b, c) => {
                walk(a, seen, count);
                walk(b, seen, count);
                walk(c, seen, count);
            }
        }
    }
    let (mut seen, mut count) = (HashSet::new(), 0);
    for r in rs {
        walk(r, &mut seen, &mut count);
    }
    count
}

fn smooth(mut k: u32) -> bool {
    for p in [2, 3, 5, 7] {
        while k % p == 0 {
            k /= p;
        }
    }
    k == 1
}

/// Rational legs `(q, r)` for an ε-approximation of the distance `d`, with
/// `r ≤ min(ε/2, d)` and `|q − d| < r/2`. `r` ranges over the largest power
/// of ½ and the reciprocals of small smooth integers below the limit, `q`
/// over the simplest rational in range and those with denominator at most
/// 64 or dividing that of `r`; the pair with the cheapest witness, weighted
/// by its number of division steps, wins.
pub fn approx_legs(d: &Constructible, eps: &Constructible) -> (Constructible, Constructible) {
    let half = BigRational::new(1.into(), 2.into());
    let limit = {
        let e2 = eps.checked_div(&cint(2)).unwrap();
        if &e2 < d {
            e2
        } else {
            d.clone()
        }
    };
    let mut r = BigRational::one();
    while Constructible::from_rational(r.clone()) > limit {
        r *= &half;
    }
    while Constructible::from_rational(&r * BigRational::from_integer(2.into())) <= limit {
        r *= BigRational::from_integer(2.into());
    }
    let mut rs = vec![r.clone()];
    let base = (BigRational::one() / &r).to_integer().to_u32().unwrap_or(u32::MAX);
    for k in (base / 2).max(1)..=base.saturating_mul(2).min(4096) {
        let rk = BigRational::new(1.into(), k.into());
        if smooth(k) && rk != r && Constructible::from_rational(rk.clone()) <= limit {
            rs.push(rk);
        }
    }
    let finest = rs.iter().min().unwrap().clone();
    let quarter = &finest / BigRational::from_integer(4.into());
    let mut prec = 64;
    let dy = loop {
        let dy = d.dyadic(prec);
        if dy.width() < quarter {
            break dy;
        }
        prec *= 2;
    };
    let mut best: Option<(f64, BigRational, BigRational)> = None;
    for r in rs {
        let lo = dy.hi_rational() - &r * &half;
        let hi = dy.lo_rational() + &r * &half;
        let rden = to_u32(r.denom()).unwrap_or(1);
        let mut dens: Vec<i64> = (1..=64).collect();
        dens.extend(divisors(rden).into_iter().map(i64::from).filter(|&k| k > 64));
        let mut cands = vec![simplest_between(&lo, &hi)];
        for den in dens {
            let den = BigRational::from_integer(den.into());
            let p = (&hi * &den).ceil() - BigRational::one();
            if p.is_positive() && &p / &den > lo {
                cands.push(p / den);
            }
        }
        let rr = plan_rational(&Constructible::from_rational(r.clone()));
        let rc = cost(&rr, 2);
        for q in cands {
            if q.numer().bits() > 31 || q.denom().bits() > 31 {
                continue;
            }
            let qr = plan_rational(&Constructible::from_rational(q.clone()));
            let score = (cost(&qr, 2) + rc) * 2f64.powi(divisions(&[&qr, &rr]) as i32);
            if best.as_ref().is_none_or(|b| score < b.0) {
                best = Some((score, q, r.clone()));
            }
        }
    }
    let (_, q, r) = best.expect("some leg pair");
    (Constructible::from_rational(q), Constructible::from_rational(r))
}

/// Simplest rational strictly inside `(lo, hi)`, `0 ≤ lo < hi`.
pub fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let fl = lo.floor();
    if &(&fl + BigRational::one()) < hi {
        return fl + BigRational::one();
    }
    if fl == *lo {
        // lo is an integer; descend on the fractional part
        let frac_hi = hi - &fl;
        let inv = simplest_between(&(BigRational::one() / frac_hi), &BigRational::from_integer(BigInt::from(1) << 64));
        return fl + BigRational::one() / inv;
    }
    let (a, b) = (lo - &fl, hi - &fl);
    let inner = simplest_between(&(BigRational::one() / b), &(BigRational::one() / a));
    fl + BigRational::one() / inner
}
