//! Witness sets for relations other than a single distance: points on a
//! common hyperplane, equal distances, strict inequality and distinctness.
//!
//! ```
//! use bq_witness::geom::Point;
//! use bq_witness::relations::distinct_witness;
//! use bq_witness::verify::verify;
//!
//! let w = distinct_witness(&Point::from_ints(&[0, 0]), &Point::from_ints(&[1, 0])).unwrap();
//! assert!(verify(&w).passed);
//! ```

use std::sync::Arc;

use crate::field::Constructible;
use crate::gadgets::recipe::plan_rational;
use crate::gadgets::template::{add_approx, add_recipe};
use crate::gadgets::GadgetError;
use crate::geom::{self, Frame, GeomError, Hyperplane, Point};
use crate::witness::{Builder, Claim, Figure, GadgetNode, Pair, WitnessSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("the points do not lie on a common hyperplane")]
    NotCoplanar,
    #[error("|JK| and |LM| differ")]
    UnequalPairs,
    #[error("|JK| equals |JM|, so the separating approximation has radius zero")]
    ZeroDelta,
    #[error("{0}")]
    Precondition(String),
}

fn cint(i: i64) -> Constructible {
    Constructible::from_int(i)
}

/// Indices of one inversor cell inside a witness, with its integer scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeaucellierCell {
    pub p: usize,
    pub o: usize,
    pub t: usize,
    pub x: usize,
    pub a: usize,
    pub b: Vec<usize>,
    pub u: u32,
}

fn add_int(b: &mut Builder, i: usize, j: usize, k: u32) -> Result<Arc<GadgetNode>, GadgetError> {
    add_recipe(b, i, j, &plan_rational(&cint(k as i64)))
}

fn add_distinct(b: &mut Builder, i: usize, j: usize) -> Result<Arc<GadgetNode>, RelationError> {
    let d = geom::dist(&b.points()[i], &b.points()[j])?;
    let eps = d.checked_div(&cint(2)).map_err(GeomError::from)?;
    Ok(add_approx(b, i, j, &eps)?.1)
}

fn unit(v: &[Constructible]) -> Result<Vec<Constructible>, GeomError> {
    let len = geom::norm_sq(v).sqrt()?;
    v.iter().map(|c| c.checked_div(&len).map_err(GeomError::from)).collect()
}

/// Pairwise orthogonal, unnormalized basis of the complement of `v`.
fn complement(v: &[Constructible]) -> Vec<Vec<Constructible>> {
    let n = v.len();
    let mut basis: Vec<Vec<Constructible>> = vec![v.to_vec()];
    for i in 0..n {
        let mut w = Point::axis(n, i).0;
        for b in &basis {
            let t = geom::dot(&w, b).checked_div(&geom::norm_sq(b)).unwrap();
            w = geom::sub(&w, &geom::scale(&t, b));
        }
        if !geom::norm_sq(&w).is_zero() {
            basis.push(w);
        }
    }
    basis.split_off(1)
}

/// Regular simplex with `count ≥ 2` vertices inscribed in the sphere of
/// squared radius `rho_sq` about `center` inside `center + span(basis)`.
/// Each level costs one square root over the field of the inputs.
fn inscribed(count: usize, rho_sq: &Constructible, center: &Point, basis: &[Vec<Constructible>]) -> Result<Vec<Point>, GeomError> {
    if count < 2 || basis.len() + 1 < count {
        return Err(GeomError::Degenerate("basis too small for simplex"));
    }
    let k = count as i64;
    let edge_sq = rho_sq * &Constructible::rational(2 * k, k - 1)?;
    let mut pts = vec![center.clone(); count];
    for j in 1..count {
        let jj = j as i64;
        let w = &basis[j - 1];
        let t = (&edge_sq * &Constructible::rational(jj + 1, 2 * jj)?).checked_div(&geom::norm_sq(w))?.sqrt()?;
        let below = -&t.checked_div(&cint(jj + 1))?;
        let at = (&t * &cint(jj)).checked_div(&cint(jj + 1))?;
        for (i, p) in pts.iter_mut().enumerate().take(j + 1) {
            *p = p.offset(if i == j { &at } else { &below }, w);
        }
    }
    Ok(pts)
}

fn dedup(ids: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &i in ids {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// Add the inversor cells forcing the points `xs` of `b` onto a common
/// hyperplane.
fn add_hyperplane(
    b: &mut Builder,
    xs: &[usize],
) -> Result<(Vec<PeaucellierCell>, Arc<GadgetNode>), RelationError> {
    let n = b.dim();
    let xs = dedup(xs);
    let pts: Vec<Point> = xs.iter().map(|&i| b.points()[i].clone()).collect();
    if pts.is_empty() {
        return Err(RelationError::Precondition("no points given".into()));
    }
    if geom::affine_rank(&pts) >= n {
        return Err(RelationError::NotCoplanar);
    }
    let g = match geom::common_hyperplane(&pts) {
        Some(g) => g,
        None => Hyperplane::new(pts[0].clone(), Point::axis(n, 0).0)?,
    };
    let normal = unit(&g.normal)?;
    let along = unit(&complement(&g.normal)[0])?;
    let c = geom::centroid(&pts);
    let mut step = Constructible::one();
    let p = loop {
        if !pts.contains(&c) {
            break c;
        }
        let q = c.offset(&step, &along);
        if !pts.contains(&q) {
            break q;
        }
        step = step.checked_div(&cint(2)).map_err(GeomError::from)?;
        if step < Constructible::rational(1, 1 << 20).map_err(GeomError::from)? {
            return Err(RelationError::Precondition("no admissible pivot point on the hyperplane".into()));
        }
    };
    let mut u = 1u32;
    for x in &pts {
        let d2 = geom::dist_sq(&p, x)?;
        while d2 > cint(4 * (u as i64) * (u as i64)) {
            u += 1;
        }
    }
    let ui = u as i64;
    let uc = cint(ui);
    let o = p.offset(&cint(4 * ui), &normal);
    let power = cint(32 * ui * ui);
    let pi = b.insert(p.clone());
    let oi = b.insert(o.clone());
    let mut node = GadgetNode::new(Figure::Hyperplane).param("u", u).param("m", xs.len());
    node.children.push(add_int(b, pi, oi, 4 * u)?);
    let hint = Frame::axes(n, 0..0);
    let mut cells = Vec::new();
    for (&xi, x) in xs.iter().zip(&pts) {
        let t = geom::sphere_intersect_point(&p, &uc, x, &uc, &hint, 1)?;
        let a = geom::invert(&o, &power, x)?;
        let ti = b.insert(t);
        let ai = b.insert(a.clone());
        for (i, j, k) in [(pi, ti, u), (ti, xi, u), (pi, ai, 4 * u)] {
            node.children.push(add_int(b, i, j, k)?);
        }
        let mid = geom::midpoint(x, &a);
        let half_sq = geom::dist_sq(x, &a)?.checked_div(&cint(4)).map_err(GeomError::from)?;
        let rho_sq = &cint(4 * ui * ui) - &half_sq;
        if rho_sq.sign() <= 0 {
            return Err(RelationError::Precondition("rhombus sphere is empty".into()));
        }
        let bs = inscribed(n, &rho_sq, &mid, &complement(&geom::sub(&a.0, &x.0)))?;
        let bi: Vec<usize> = bs.into_iter().map(|q| b.insert(q)).collect();
        for &bj in &bi {
            for (i, k) in [(xi, 2 * u), (ai, 2 * u), (oi, 6 * u)] {
                node.children.push(add_int(b, i, bj, k)?);
            }
        }
        for (k, &bk) in bi.iter().enumerate() {
            for &bl in &bi[k + 1..] {
                node.children.push(add_distinct(b, bk, bl)?);
            }
        }
        cells.push(PeaucellierCell {
            p: pi,
            o: oi,
            t: ti,
            x: xi,
            a: ai,
            b: bi,
            u,
        });
    }
    Ok((cells, Arc::new(node)))
}

fn seeded(points: &[Point]) -> Result<(Builder, Vec<usize>), RelationError> {
    let n = points.first().ok_or(RelationError::Precondition("no points given".into()))?.dim();
    if n < 2 {
        return Err(GadgetError::Dimension(n).into());
    }
    let mut b = Builder::new(n);
    let mut ids = Vec::new();
    for p in points {
        if p.dim() != n {
            return Err(GeomError::DimensionMismatch(n, p.dim()).into());
        }
        ids.push(b.insert(p.clone()));
    }
    Ok((b, ids))
}

/// Inversor cells forcing `xs` onto a common hyperplane, with the cells'
/// indices.
pub fn peaucellier(xs: &[Point]) -> Result<(WitnessSet, Vec<PeaucellierCell>), RelationError> {
    let (mut b, ids) = seeded(xs)?;
    let (cells, node) = add_hyperplane(&mut b, &ids)?;
    let claim = Claim::Hyperplane { points: ids };
    Ok((b.finish(vec![claim], node, false), cells))
}

/// A witness forcing the images of `xs` onto a common affine hyperplane.
pub fn hyperplane_witness(xs: &[Point], n: usize) -> Result<WitnessSet, RelationError> {
    if let Some(p) = xs.iter().find(|p| p.dim() != n) {
        return Err(GeomError::DimensionMismatch(n, p.dim()).into());
    }
    Ok(peaucellier(xs)?.0)
}

/// The two-mirror reduction: `A = L`, `B` the image of `K` in the mirror
/// `H1` taking `J` to `L`, and `H2` the mirror taking `B` to `M` while
/// fixing `A`. `None` marks an identity step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reflections {
    pub a: Point,
    pub b: Point,
    pub first: Option<Hyperplane>,
    pub second: Option<Hyperplane>,
}

pub fn proposition_reflections(j: &Point, k: &Point, l: &Point, m: &Point) -> Result<Reflections, RelationError> {
    if geom::dist_sq(j, k)? != geom::dist_sq(l, m)? {
        return Err(RelationError::UnequalPairs);
    }
    let first = if j == l { None } else { Some(geom::mirror_between(j, l)?) };
    let b = match &first {
        Some(h) => geom::reflect(k, h),
        None => k.clone(),
    };
    let second = if b == *m { None } else { Some(geom::mirror_between(&b, m)?) };
    Ok(Reflections {
        a: l.clone(),
        b,
        first,
        second,
    })
}

/// Points on `h` at distance `s` from `p`, `s` the least integer above the
/// distance from `p` to `h`.
fn sphere_on_mirror(
    b: &mut Builder,
    p: usize,
    h: &Hyperplane,
) -> Result<(u32, Vec<usize>), RelationError> {
    let pt = b.points()[p].clone();
    let d2 = h.dist_sq_to(&pt);
    let mut s = 1u32;
    while cint(s as i64 * s as i64) <= d2 {
        s += 1;
    }
    let rho_sq = &cint(s as i64 * s as i64) - &d2;
    let pts = inscribed(b.dim(), &rho_sq, &h.project(&pt), &complement(&h.normal))?;
    Ok((s, pts.into_iter().map(|q| b.insert(q)).collect()))
}

/// Legs from `p` and its mirror image `q` to fresh points on `h`; returns
/// those points.
fn mirrored_legs(
    b: &mut Builder,
    p: usize,
    q: usize,
    h: &Hyperplane,
    node: &mut GadgetNode,
) -> Result<Vec<usize>, RelationError> {
    let (s, xs) = sphere_on_mirror(b, p, h)?;
    for &x in &xs {
        node.children.push(add_int(b, x, p, s)?);
        node.children.push(add_int(b, x, q, s)?);
    }
    for (i, &x) in xs.iter().enumerate() {
        for &y in &xs[i + 1..] {
            if x != y {
                node.children.push(add_distinct(b, x, y)?);
            }
        }
    }
    Ok(xs)
}

/// One mirror-symmetric instance: `L`, `M` are the images of `J`, `K` in `h`.
fn add_symmetric(b: &mut Builder, [j, k, l, m]: [usize; 4], h: Option<&Hyperplane>) -> Result<Arc<GadgetNode>, RelationError> {
    let mut node = GadgetNode::new(Figure::EqualDistance);
    if j == l && k == m {
        return Ok(Arc::new(node.param("case", "identity")));
    }
    let h = h.ok_or(RelationError::Precondition("mirror missing".into()))?;
    if j != l && k != m {
        let p = |i: usize| b.points()[i].clone();
        let (jk, jm) = (geom::dist(&p(j), &p(k))?, geom::dist(&p(j), &p(m))?);
        let delta = (&jm - &jk).abs().checked_div(&cint(3)).map_err(GeomError::from)?;
        if delta.is_zero() {
            return Err(RelationError::ZeroDelta);
        }
        node = node.param("case", "general").param("delta", &delta);
        let mut on = mirrored_legs(b, j, l, h, &mut node)?;
        on.extend(mirrored_legs(b, k, m, h, &mut node)?);
        node.children.push(add_hyperplane(b, &on)?.1);
        node.children.push(add_distinct(b, j, l)?);
        node.children.push(add_distinct(b, k, m)?);
        for (x, y) in [(j, k), (l, m), (j, m), (l, k)] {
            if x != y {
                node.children.push(add_approx(b, x, y, &delta)?.1);
            }
        }
        return Ok(Arc::new(node));
    }
    let (moving, image, fixed) = if k == m { (j, l, k) } else { (k, m, j) };
    node = node.param("case", "one_fixed");
    let mut on = mirrored_legs(b, moving, image, h, &mut node)?;
    on.push(fixed);
    node.children.push(add_hyperplane(b, &on)?.1);
    node.children.push(add_distinct(b, moving, image)?);
    Ok(Arc::new(node))
}

/// A witness forcing `|f(J)f(K)| = |f(L)f(M)|`.
pub fn equal_distance_witness(j: &Point, k: &Point, l: &Point, m: &Point, n: usize) -> Result<WitnessSet, RelationError> {
    let (mut b, ids) = seeded(&[j.clone(), k.clone(), l.clone(), m.clone()])?;
    if b.dim() != n {
        return Err(GeomError::DimensionMismatch(n, b.dim()).into());
    }
    let r = proposition_reflections(j, k, l, m)?;
    let (ji, ki, li, mi) = (ids[0], ids[1], ids[2], ids[3]);
    let bi = b.insert(r.b.clone());
    let mut node = GadgetNode::new(Figure::EqualDistance);
    node.children.push(add_symmetric(&mut b, [ji, ki, li, bi], r.first.as_ref())?);
    node.children.push(add_symmetric(&mut b, [li, bi, li, mi], r.second.as_ref())?);
    let claim = Claim::EqualDistance {
        first: (ji, ki),
        second: (li, mi),
    };
    Ok(b.finish(vec![claim], Arc::new(node), false))
}

/// `T_pq(|pq|/2)` with a distinctness claim.
pub fn distinct_witness(p: &Point, q: &Point) -> Result<WitnessSet, RelationError> {
    let (mut b, ids) = seeded(&[p.clone(), q.clone()])?;
    if ids[0] == ids[1] {
        return Err(GeomError::Coincident.into());
    }
    let eps = geom::dist(p, q)?.checked_div(&cint(2)).map_err(GeomError::from)?;
    let (via, child) = add_approx(&mut b, ids[0], ids[1], &eps)?;
    let claims = vec![
        Claim::Approx {
            pair: (ids[0], ids[1]),
            value: geom::dist(p, q)?,
            eps: eps.clone(),
            via,
        },
        Claim::Distinct { pair: (ids[0], ids[1]) },
    ];
    let node = GadgetNode::new(Figure::Distinct).child(child);
    Ok(b.finish(claims, Arc::new(node), false))
}

/// `T_JK(ε) ∪ T_LM(ε)` with `ε = (|LM| − |JK|)/3`.
pub fn less_than_witness(j: &Point, k: &Point, l: &Point, m: &Point) -> Result<WitnessSet, RelationError> {
    let (mut b, ids) = seeded(&[j.clone(), k.clone(), l.clone(), m.clone()])?;
    let (jk, lm) = (geom::dist(j, k)?, geom::dist(l, m)?);
    if jk >= lm {
        return Err(RelationError::Precondition("less-than needs |JK| < |LM|".into()));
    }
    let eps = (&lm - &jk).checked_div(&cint(3)).map_err(GeomError::from)?;
    let mut node = GadgetNode::new(Figure::LessThan).param("eps", &eps);
    let mut claims = Vec::new();
    let pairs: [(Pair, &Constructible); 2] = [((ids[0], ids[1]), &jk), ((ids[2], ids[3]), &lm)];
    for ((x, y), value) in pairs {
        if x == y {
            continue;
        }
        let (via, child) = add_approx(&mut b, x, y, &eps)?;
        node.children.push(child);
        claims.push(Claim::Approx {
            pair: (x, y),
            value: value.clone(),
            eps: eps.clone(),
            via,
        });
    }
    claims.push(Claim::LessThan {
        first: (ids[0], ids[1]),
        second: (ids[2], ids[3]),
    });
    Ok(b.finish(claims, Arc::new(node), false))
}
