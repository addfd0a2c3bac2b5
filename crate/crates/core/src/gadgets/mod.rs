//! Witness-set constructors for distances.
//!
//! Every gadget is described by a [`Recipe`], expanded once per dimension
//! into a canonical [`Template`] and then instantiated at the requested
//! pair. The public constructors check their preconditions exactly and
//! return a [`WitnessSet`] whose first two points are the given pair.
//!
//! ```
//! use bq_witness::field::Constructible;
//! use bq_witness::gadgets::scale_up;
//! use bq_witness::geom::Point;
//!
//! let three = Constructible::from_int(3);
//! let y = Point::new(vec![three.sqrt().unwrap(), Constructible::zero()]);
//! let w = scale_up(&Point::origin(2), &y, &Constructible::one()).unwrap();
//! assert_eq!(w.points.len(), 7);
//! assert_eq!(w.unit_edges.len(), 11);
//! ```

pub mod recipe;
pub mod template;

use std::sync::Arc;

pub use recipe::{Recipe, R};
pub use template::{template, Template};

use crate::field::{parse_expr, Constructible, FieldError, ParseError};
use crate::geom::{self, GeomError, Point};
use crate::witness::{Builder, Claim, Figure, GadgetNode, Placement, WitnessSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expected squared distance {expected}, found {found}")]
    DistanceMismatch { expected: String, found: String },
    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),
    #[error("{0}")]
    Precondition(String),
}

fn pre(ok: bool, msg: &str) -> Result<(), GadgetError> {
    if ok {
        Ok(())
    } else {
        Err(GadgetError::Precondition(msg.to_string()))
    }
}

fn positive(v: &Constructible, name: &str) -> Result<(), GadgetError> {
    pre(v.sign() > 0, &format!("{name} must be positive"))
}

fn dim_of(x: &Point, y: &Point) -> Result<usize, GadgetError> {
    if x.dim() != y.dim() {
        return Err(GeomError::DimensionMismatch(x.dim(), y.dim()).into());
    }
    if x.dim() < 2 {
        return Err(GadgetError::Dimension(x.dim()));
    }
    Ok(x.dim())
}

fn expect_dist(x: &Point, y: &Point, value: &Constructible) -> Result<(), GadgetError> {
    let found = geom::dist_sq(x, y)?;
    let expected = value.square();
    if found != expected {
        return Err(GadgetError::DistanceMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

/// Instantiate a recipe at `(x, y)`, claiming its value.
pub fn instantiate(x: &Point, y: &Point, r: &R) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    let t = template(r, n)?;
    expect_dist(x, y, &t.value)?;
    let mut b = Builder::new(n);
    b.insert(x.clone());
    b.insert(y.clone());
    b.absorb(&t.points, &t.edges, &Placement::onto(x, y, &t.value)?);
    let claim = match **r {
        Recipe::Bound(_) => Claim::UpperBound {
            pair: (0, 1),
            value: t.value.clone(),
        },
        _ => Claim::ExactDistance {
            pair: (0, 1),
            value: t.value.clone(),
        },
    };
    Ok(b.finish(vec![claim], t.node.clone(), false))
}

/// Recipe forcing the positive distance `d`.
pub fn realize(d: &Constructible, n: usize) -> Result<R, GadgetError> {
    positive(d, "distance")?;
    if n < 2 {
        return Err(GadgetError::Dimension(n));
    }
    Ok(recipe::realize(d, n))
}

pub fn unit_pair(x: &Point, y: &Point) -> Result<WitnessSet, GadgetError> {
    instantiate(x, y, &recipe::unit())
}

/// `|xy| = √(2+2/n)·d`, forced by the bipyramid pair construction.
pub fn scale_up(x: &Point, y: &Point, d: &Constructible) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    instantiate(x, y, &recipe::scale_up(realize(d, n)?))
}

/// `|xy| = (2/n)·d`, forced only as an upper bound. In the plane the bound
/// equals `d` and the set forces it exactly.
pub fn bound_gadget(x: &Point, y: &Point, d: &Constructible) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    instantiate(x, y, &recipe::bound(realize(d, n)?))
}

/// `|xy| = 2d`.
pub fn double(x: &Point, y: &Point, d: &Constructible) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    instantiate(x, y, &recipe::double(realize(d, n)?))
}

/// `|xy| = k·d` through a chain of `k` steps of length `d`.
pub fn multiple(x: &Point, y: &Point, d: &Constructible, k: u32) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    pre(k > 0, "multiple needs k > 0")?;
    instantiate(x, y, &recipe::multiple(realize(d, n)?, k))
}

/// `|xy| = d/k` by shrinking a similar isosceles triangle.
pub fn divide(x: &Point, y: &Point, d: &Constructible, k: u32) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    pre(k > 0, "divide needs k > 0")?;
    instantiate(x, y, &recipe::divide(realize(d, n)?, k))
}

/// `T_xy(eps)`: two rational legs through a point `z` with `|zy| ≤ eps/2`.
pub fn approx_gadget(x: &Point, y: &Point, eps: &Constructible) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    positive(eps, "eps")?;
    pre(x != y, "approximated points coincide")?;
    let mut b = Builder::new(n);
    b.insert(x.clone());
    b.insert(y.clone());
    let (via, node) = template::add_approx(&mut b, 0, 1, eps)?;
    let claim = Claim::Approx {
        pair: (0, 1),
        value: geom::dist(x, y)?,
        eps: eps.clone(),
        via,
    };
    Ok(b.finish(vec![claim], node, false))
}

/// `|xy| = √(a² − b²)`.
pub fn pyth_diff(x: &Point, y: &Point, a: &Constructible, b: &Constructible) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    positive(b, "b")?;
    pre(a > b, "pyth_diff needs a > b")?;
    let r = recipe::node(Recipe::PythDiff(realize(a, n)?, realize(b, n)?));
    instantiate(x, y, &r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Diff,
    Sum,
}

/// `|xy| = a − b` or `a + b` by the centred-simplex construction.
pub fn diff_sum(
    x: &Point,
    y: &Point,
    a: &Constructible,
    b: &Constructible,
    mode: Mode,
) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    positive(b, "b")?;
    positive(a, "a")?;
    let (ra, rb) = (realize(a, n)?, realize(b, n)?);
    let r = match mode {
        Mode::Diff => {
            pre(a > b, "difference needs a > b")?;
            recipe::node(Recipe::Diff(ra, rb, None))
        }
        Mode::Sum => recipe::node(Recipe::Sum(ra, rb, None)),
    };
    instantiate(x, y, &r)
}

/// `|AB| = a·b/c` by similar triangles about an apex.
pub fn ratio(
    a_pt: &Point,
    b_pt: &Point,
    a: &Constructible,
    b: &Constructible,
    c: &Constructible,
) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(a_pt, b_pt)?;
    for (v, name) in [(a, "a"), (b, "b"), (c, "c")] {
        positive(v, name)?;
    }
    let r = recipe::ratio(realize(a, n)?, realize(b, n)?, realize(c, n)?, n);
    instantiate(a_pt, b_pt, &r)
}

/// `|xy| = √a` through the half-difference-of-squares identity.
pub fn sqrt_gadget(x: &Point, y: &Point, a: &Constructible) -> Result<WitnessSet, GadgetError> {
    let n = dim_of(x, y)?;
    positive(a, "a")?;
    instantiate(x, y, &recipe::node(Recipe::Sqrt(realize(a, n)?)))
}

/// Parse a distance expression, place `y = anchor + v·direction` and force
/// `|anchor y| = v`.
pub fn compile(
    expr: &str,
    n: usize,
    anchor: &Point,
    direction: &[Constructible],
) -> Result<WitnessSet, GadgetError> {
    if n < 2 {
        return Err(GadgetError::Dimension(n));
    }
    if anchor.dim() != n || direction.len() != n {
        return Err(GeomError::DimensionMismatch(n, anchor.dim().max(direction.len())).into());
    }
    pre(geom::norm_sq(direction) == Constructible::one(), "direction must be a unit vector")?;
    let e = parse_expr(expr)?;
    let v = e.eval()?;
    positive(&v, "distance")?;
    let (r, _) = recipe::lower(&e, n).expect("positive value lowers");
    let y = anchor.offset(&v, direction);
    let mut w = instantiate(anchor, &y, &r)?;
    let node = GadgetNode::new(Figure::Compile)
        .param("expr", expr)
        .child(w.derivation.clone());
    w.derivation = Arc::new(node);
    Ok(w)
}
