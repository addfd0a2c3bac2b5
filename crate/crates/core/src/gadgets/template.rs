//! Canonical-frame templates: every recipe is built once per dimension with
//! `x` at the origin and `y` on the positive first axis, then instantiated
//! at each pair by a rigid motion.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use super::recipe::{self, approx_legs, plan_rational, Recipe, R};
use super::GadgetError;
use crate::field::Constructible;
use crate::geom::{self, Frame, Point};
use crate::witness::{Builder, Figure, GadgetNode, Pair, Placement};

#[derive(Debug)]
pub struct Template {
    pub points: Vec<Point>,
    pub edges: Vec<Pair>,
    pub node: Arc<GadgetNode>,
    pub value: Constructible,
}

static TEMPLATES: LazyLock<Mutex<HashMap<(R, usize), Arc<Template>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn q(p: i64, d: i64) -> Constructible {
    Constructible::rational(p, d).unwrap()
}

fn cint(i: i64) -> Constructible {
    Constructible::from_int(i)
}

fn on_axis(n: usize, i: usize, t: &Constructible) -> Point {
    let mut p = Point::origin(n);
    p.0[i] = t.clone();
    p
}

/// Place the template of `r` onto the pair `(i, j)` of `b`.
pub(crate) fn add_recipe(
    b: &mut Builder,
    i: usize,
    j: usize,
    r: &R,
) -> Result<Arc<GadgetNode>, GadgetError> {
    let t = template(r, b.dim())?;
    let place = Placement::onto(&b.points()[i], &b.points()[j], &t.value)?;
    b.absorb(&t.points, &t.edges, &place);
    Ok(t.node.clone())
}

/// Append `T_ij(eps)`: a point `z` with rational `|iz|`, `|zj|` and
/// `|zj| ≤ eps/2`, plus the two rational gadgets. Returns `z` and the node.
pub(crate) fn add_approx(
    b: &mut Builder,
    i: usize,
    j: usize,
    eps: &Constructible,
) -> Result<(usize, Arc<GadgetNode>), GadgetError> {
    if eps.sign() <= 0 {
        return Err(GadgetError::Precondition("approximation radius must be positive".into()));
    }
    let (x, y) = (b.points()[i].clone(), b.points()[j].clone());
    let d = geom::dist(&x, &y)?;
    if d.is_zero() {
        return Err(GadgetError::Precondition("approximated points coincide".into()));
    }
    let (lq, lr) = approx_legs(&d, eps);
    let hint = Frame::axes(b.dim(), 0..0);
    let z = geom::sphere_intersect_point(&x, &lq, &y, &lr, &hint, 1)?;
    let zi = b.insert(z);
    let a = add_recipe(b, i, zi, &plan_rational(&lq))?;
    let c = add_recipe(b, zi, j, &plan_rational(&lr))?;
    let node = GadgetNode::new(Figure::Approx)
        .param("eps", eps)
        .param("q", &lq)
        .param("r", &lr)
        .child(a)
        .child(c);
    Ok((zi, Arc::new(node)))
}

struct Draft {
    b: Builder,
    node: GadgetNode,
}

impl Draft {
    fn new(n: usize, figure: Figure, length: &Constructible) -> Self {
        let mut b = Builder::new(n);
        b.insert(Point::origin(n));
        b.insert(on_axis(n, 0, length));
        Draft {
            b,
            node: GadgetNode::new(figure),
        }
    }

    fn pt(&mut self, p: Point) -> usize {
        self.b.insert(p)
    }

    fn sub(&mut self, i: usize, j: usize, r: &R) -> Result<(), GadgetError> {
        let c = add_recipe(&mut self.b, i, j, r)?;
        self.node.children.push(c);
        Ok(())
    }

    fn approx(&mut self, i: usize, j: usize, eps: &Constructible) -> Result<(), GadgetError> {
        let (_, c) = add_approx(&mut self.b, i, j, eps)?;
        self.node.children.push(c);
        Ok(())
    }

    fn finish(self, value: Constructible) -> Template {
        let points = self.b.points().to_vec();
        let edges = self.b.edges().to_vec();
        Template {
            points,
            edges,
            node: Arc::new(self.node),
            value,
        }
    }
}

/// The expanded canonical template of a recipe in dimension `n`.
pub fn template(r: &R, n: usize) -> Result<Arc<Template>, GadgetError> {
    let key = (r.clone(), n);
    if let Some(t) = TEMPLATES.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(build(r, n)?);
    TEMPLATES.lock().unwrap().insert(key, t.clone());
    Ok(t)
}

fn build(r: &R, n: usize) -> Result<Template, GadgetError> {
    let value = recipe::value(r, n);
    let axes = Frame::axes(n, 1..n);
    match &**r {
        Recipe::Unit => {
            let mut d = Draft::new(n, Figure::Unit, &value);
            d.b.add_edge(0, 1);
            Ok(d.finish(value))
        }
        Recipe::ScaleUp(dr) => {
            let dv = recipe::value(dr, n);
            let mut d = Draft::new(n, Figure::ScaleUp, &value);
            d.node = d.node.param("d", &dv);
            let z = on_axis(n, 0, &(&value * &q(1, 2)));
            let simplex = geom::regular_simplex(n, &dv, &z, &axes)?;
            let ni = n as i64;
            let cos = q(3 * ni + 4, 4 * ni + 4);
            let sin = &q(ni * (7 * ni + 8), 1).sqrt()? * &q(1, 4 * ni + 4);
            let rot = |p: &Point| {
                let mut out = p.clone();
                out.0[0] = &(&cos * &p.0[0]) - &(&sin * &p.0[1]);
                out.0[1] = &(&sin * &p.0[0]) + &(&cos * &p.0[1]);
                out
            };
            let y = d.b.points()[1].clone();
            let ps: Vec<usize> = simplex.iter().map(|p| d.pt(p.clone())).collect();
            let yt = d.pt(rot(&y));
            let pts: Vec<usize> = simplex.iter().map(|p| d.pt(rot(p))).collect();
            let mut pairs = vec![(1, yt)];
            for (k, &p) in ps.iter().enumerate() {
                pairs.push((0, p));
                pairs.push((1, p));
                for &o in &ps[..k] {
                    pairs.push((o, p));
                }
            }
            for (k, &p) in pts.iter().enumerate() {
                pairs.push((0, p));
                pairs.push((yt, p));
                for &o in &pts[..k] {
                    pairs.push((o, p));
                }
            }
            for (a, b) in pairs {
                d.sub(a, b, dr)?;
            }
            Ok(d.finish(value))
        }
        Recipe::Bound(dr) if n == 2 => {
            let t = template(dr, n)?;
            let node = GadgetNode::new(Figure::Bound)
                .param("d", &t.value)
                .child(t.node.clone());
            Ok(Template {
                points: t.points.clone(),
                edges: t.edges.clone(),
                node: Arc::new(node),
                value,
            })
        }
        Recipe::Bound(dr) => {
            let dv = recipe::value(dr, n);
            let mut d = Draft::new(n, Figure::Bound, &value);
            d.node = d.node.param("d", &dv);
            let edge = &recipe::scale_sq(n).sqrt()? * &dv;
            let z = on_axis(n, 0, &(&value * &q(1, 2)));
            let simplex = geom::regular_simplex(n, &edge, &z, &axes)?;
            let ps: Vec<usize> = simplex.into_iter().map(|p| d.pt(p)).collect();
            let big = recipe::scale_up(dr.clone());
            for (k, &p) in ps.iter().enumerate() {
                for &o in &ps[..k] {
                    d.sub(o, p, &big)?;
                }
            }
            for &p in &ps {
                d.sub(0, p, dr)?;
                d.sub(1, p, dr)?;
            }
            Ok(d.finish(value))
        }
        Recipe::Double(dr) => {
            let dv = recipe::value(dr, n);
            let mut d = Draft::new(n, Figure::Double, &value);
            d.node = d.node.param("d", &dv);
            let s = d.pt(on_axis(n, 0, &dv));
            let t = d.pt(on_axis(n, 0, &(&recipe::scale_sq(n) * &dv)));
            d.sub(0, s, dr)?;
            d.sub(s, 1, dr)?;
            d.sub(1, t, &recipe::bound(dr.clone()))?;
            d.sub(0, t, &recipe::scale_up(recipe::scale_up(dr.clone())))?;
            Ok(d.finish(value))
        }
        Recipe::Multiple(dr, k) => {
            let dv = recipe::value(dr, n);
            let mut d = Draft::new(n, Figure::Multiple, &value);
            d.node = d.node.param("d", &dv).param("k", k);
            let w: Vec<usize> = (0..=*k as i64)
                .map(|i| d.pt(on_axis(n, 0, &(&cint(i) * &dv))))
                .collect();
            let two = recipe::scaled(dr, 2, n);
            for i in 0..*k as usize {
                d.sub(w[i], w[i + 1], dr)?;
                if i + 2 <= *k as usize {
                    d.sub(w[i], w[i + 2], &two)?;
                }
            }
            Ok(d.finish(value))
        }
        Recipe::Divide(dr, k) => {
            let dv = recipe::value(dr, n);
            let m = recipe::divide_apex(dr, *k, n);
            let (k, mi) = (*k as i64, m as i64);
            let mut d = Draft::new(n, Figure::Divide, &value);
            d.node = d.node.param("d", &dv).param("k", k).param("m", m);
            let half = &value * &q(1, 2);
            let h = (&cint(mi * mi) - &half.square()).sqrt()?;
            let mut zp = on_axis(n, 0, &half);
            zp.0[1] = h;
            let z = d.pt(zp.clone());
            let stretch = |p: &Point| zp.offset(&cint(k), &geom::sub(&p.0, &zp.0));
            let xt = d.pt(stretch(&Point::origin(n)));
            let yt = d.pt(stretch(&on_axis(n, 0, &value)));
            let legs = [
                (xt, 0, (k - 1) * mi),
                (0, z, mi),
                (xt, z, k * mi),
                (yt, 1, (k - 1) * mi),
                (1, z, mi),
                (yt, z, k * mi),
            ];
            d.sub(xt, yt, dr)?;
            for (a, b, len) in legs {
                d.sub(a, b, &recipe::integer(len as u32))?;
            }
            Ok(d.finish(value))
        }
        Recipe::PythDiff(ar, br) => {
            let bv = recipe::value(br, n);
            let av = recipe::value(ar, n);
            let mut d = Draft::new(n, Figure::PythDiff, &value);
            d.node = d.node.param("a", &av).param("b", &bv);
            let s = d.pt(on_axis(n, 1, &-&bv));
            let t = d.pt(on_axis(n, 1, &bv));
            d.sub(s, 0, br)?;
            d.sub(0, t, br)?;
            d.sub(s, t, &recipe::scaled(br, 2, n))?;
            d.sub(s, 1, ar)?;
            d.sub(t, 1, ar)?;
            Ok(d.finish(value))
        }
        Recipe::Diff(ar, br, hub) | Recipe::Sum(ar, br, hub) => {
            let sum = matches!(**r, Recipe::Sum(..));
            let (av, bv) = (recipe::value(ar, n), recipe::value(br, n));
            let fig = if sum { Figure::Sum } else { Figure::Diff };
            let mut d = Draft::new(n, fig, &value);
            d.node = d.node.param("a", &av).param("b", &bv);
            let z = on_axis(n, 0, &av);
            if let Some(h) = hub {
                d.node = d.node.param("hub", h);
            }
            let big = recipe::hub_edge(hub, n);
            let edge = recipe::value(&big, n);
            let simplex = geom::regular_simplex(n, &edge, &z, &axes)?;
            let ps: Vec<usize> = simplex.into_iter().map(|p| d.pt(p)).collect();
            for (k, &p) in ps.iter().enumerate() {
                for &o in &ps[..k] {
                    d.sub(o, p, &big)?;
                }
            }
            let (sx, sy) = (recipe::spoke(&av, hub, n), recipe::spoke(&bv, hub, n));
            for &p in &ps {
                d.sub(0, p, &sx)?;
                d.sub(1, p, &sy)?;
            }
            let eps = if sum && bv > av { av } else { bv };
            d.approx(0, 1, &eps)?;
            Ok(d.finish(value))
        }
        Recipe::Ratio(ar, br, cr) => {
            let (av, bv, cv) = (
                recipe::value(ar, n),
                recipe::value(br, n),
                recipe::value(cr, n),
            );
            let m = recipe::ratio_apex(br, cr, n);
            let mut d = Draft::new(n, Figure::Ratio, &value);
            d.node = d
                .node
                .param("a", &av)
                .param("b", &bv)
                .param("c", &cv)
                .param("m", m);
            let half = &value * &q(1, 2);
            let leg = &cint(m as i64) * &av;
            let h = (&leg.square() - &half.square()).sqrt()?;
            let mut op = on_axis(n, 0, &half);
            op.0[1] = h;
            let o = d.pt(op.clone());
            let shrink = cv.checked_div(&av)?;
            let pull = |p: &Point| op.offset(&shrink, &geom::sub(&p.0, &op.0));
            let at = d.pt(pull(&Point::origin(n)));
            let bt = d.pt(pull(&on_axis(n, 0, &value)));
            let (ma, mc) = (recipe::scaled(ar, m, n), recipe::scaled(cr, m, n));
            let mg = recipe::scaled(&recipe::gap(&av, &cv, n), m, n);
            d.sub(o, 0, &ma)?;
            d.sub(o, 1, &ma)?;
            d.sub(o, at, &mc)?;
            d.sub(o, bt, &mc)?;
            d.sub(0, at, &mg)?;
            d.sub(1, bt, &mg)?;
            d.sub(at, bt, br)?;
            Ok(d.finish(value))
        }
        Recipe::Sqrt(ar) => {
            let inner = recipe::expand_sqrt(ar, n);
            let t = template(&inner, n)?;
            let node = GadgetNode::new(Figure::Sqrt)
                .param("a", recipe::value(ar, n))
                .child(t.node.clone());
            Ok(Template {
                points: t.points.clone(),
                edges: t.edges.clone(),
                node: Arc::new(node),
                value,
            })
        }
    }
}
