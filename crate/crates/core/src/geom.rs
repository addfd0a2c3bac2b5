//! Exact n-dimensional primitives: distances, simplices, apexes, mirrors,
//! inversion and sphere intersections over [`Constructible`] coordinates.

use serde::{Deserialize, Serialize};

use crate::field::{Constructible, FieldError};

pub type Vector = Vec<Constructible>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("radius is below the circumradius, no apex exists")]
    NoApex,
    #[error("the spheres do not intersect")]
    EmptyIntersection,
    #[error("points coincide")]
    Coincident,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<Constructible>);

impl Point {
    pub fn new(coords: Vec<Constructible>) -> Self {
        Point(coords)
    }

    pub fn origin(n: usize) -> Self {
        Point(vec![Constructible::zero(); n])
    }

    /// The `i`-th standard basis vector as a point.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut p = Self::origin(n);
        p.0[i] = Constructible::one();
        p
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Point(v.iter().map(|&i| Constructible::from_int(i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Constructible] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Constructible::to_f64).collect()
    }

    pub fn tower_depth(&self) -> usize {
        self.0.iter().map(Constructible::tower_depth).max().unwrap_or(0)
    }

    /// `self + s·v`.
    pub fn offset(&self, s: &Constructible, v: &[Constructible]) -> Point {
        Point(
            self.0
                .iter()
                .zip(v)
                .map(|(a, b)| a + &(s * b))
                .collect(),
        )
    }

    pub fn translate(&self, v: &[Constructible]) -> Point {
        Point(self.0.iter().zip(v).map(|(a, b)| a + b).collect())
    }
}

impl std::fmt::Debug for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Move every coordinate of `points` into one common tower.
/// Put all coordinates over one common tower when it is no deeper than the
/// deepest point; otherwise unify each point separately.
pub fn unify_points(points: &mut [Point]) {
    let mut deepest = 0;
    for p in points.iter_mut() {
        crate::field::unify_all(p.0.iter_mut(), usize::MAX);
        deepest = deepest.max(p.tower_depth());
    }
    crate::field::unify_all(points.iter_mut().flat_map(|p| p.0.iter_mut()), deepest);
}

pub fn sub(a: &[Constructible], b: &[Constructible]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Constructible], b: &[Constructible]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(s: &Constructible, v: &[Constructible]) -> Vector {
    v.iter().map(|x| s * x).collect()
}

pub fn dot(a: &[Constructible], b: &[Constructible]) -> Constructible {
    a.iter()
        .zip(b)
        .fold(Constructible::zero(), |acc, (x, y)| &acc + &(x * y))
}

pub fn norm_sq(v: &[Constructible]) -> Constructible {
    dot(v, v)
}

fn same_dim(p: &Point, q: &Point) -> Result<(), GeomError> {
    if p.dim() == q.dim() {
        Ok(())
    } else {
        Err(GeomError::DimensionMismatch(p.dim(), q.dim()))
    }
}

pub fn dist_sq(p: &Point, q: &Point) -> Result<Constructible, GeomError> {
    same_dim(p, q)?;
    Ok(norm_sq(&sub(&p.0, &q.0)))
}

pub fn dist(p: &Point, q: &Point) -> Result<Constructible, GeomError> {
    Ok(dist_sq(p, q)?.sqrt()?)
}

pub fn midpoint(p: &Point, q: &Point) -> Point {
    let half = Constructible::rational(1, 2).unwrap();
    Point(p.0.iter().zip(&q.0).map(|(a, b)| &(a + b) * &half).collect())
}

pub fn centroid(points: &[Point]) -> Point {
    let n = points[0].dim();
    let k = Constructible::from_int(points.len() as i64);
    let mut sum = vec![Constructible::zero(); n];
    for p in points {
        sum = add(&sum, &p.0);
    }
    Point(sum.iter().map(|c| c.checked_div(&k).unwrap()).collect())
}

/// Affine hyperplane `{p : (p − base)·normal = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub base: Point,
    pub normal: Vector,
}

impl Hyperplane {
    pub fn new(base: Point, normal: Vector) -> Result<Self, GeomError> {
        if base.dim() != normal.len() {
            return Err(GeomError::DimensionMismatch(base.dim(), normal.len()));
        }
        if normal.iter().all(Constructible::is_zero) {
            return Err(GeomError::Degenerate("zero normal"));
        }
        Ok(Hyperplane { base, normal })
    }

    /// Signed offset `(p − base)·normal`, unnormalized.
    pub fn offset(&self, p: &Point) -> Constructible {
        dot(&sub(&p.0, &self.base.0), &self.normal)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.offset(p).is_zero()
    }

    pub fn dist_sq_to(&self, p: &Point) -> Constructible {
        self.offset(p).square().checked_div(&norm_sq(&self.normal)).unwrap()
    }

    /// Orthogonal projection onto the hyperplane.
    pub fn project(&self, p: &Point) -> Point {
        let t = self
            .offset(p)
            .checked_div(&norm_sq(&self.normal))
            .unwrap();
        p.offset(&-t, &self.normal)
    }

    pub fn unit_normal(&self) -> Vector {
        let len = norm_sq(&self.normal).sqrt().unwrap();
        self.normal
            .iter()
            .map(|c| c.checked_div(&len).unwrap())
            .collect()
    }
}

pub fn reflect(p: &Point, h: &Hyperplane) -> Point {
    let t = h.offset(p).checked_div(&norm_sq(&h.normal)).unwrap();
    p.offset(&(&t * &Constructible::from_int(-2)), &h.normal)
}

/// The hyperplane reflecting `x` onto `y`.
pub fn mirror_between(x: &Point, y: &Point) -> Result<Hyperplane, GeomError> {
    same_dim(x, y)?;
    if x == y {
        return Err(GeomError::Coincident);
    }
    Hyperplane::new(midpoint(x, y), sub(&y.0, &x.0))
}

/// Inversion in the sphere about `center` with squared radius `power`.
pub fn invert(center: &Point, power: &Constructible, p: &Point) -> Result<Point, GeomError> {
    same_dim(center, p)?;
    if power.sign() <= 0 {
        return Err(GeomError::Degenerate("inversion power must be positive"));
    }
    let v = sub(&p.0, &center.0);
    let r2 = norm_sq(&v);
    if r2.is_zero() {
        return Err(GeomError::Coincident);
    }
    Ok(center.offset(&power.checked_div(&r2)?, &v))
}

/// Exactly orthonormal list of vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    vectors: Vec<Vector>,
}

impl Frame {
    pub fn new(vectors: Vec<Vector>) -> Result<Self, GeomError> {
        for (i, a) in vectors.iter().enumerate() {
            if norm_sq(a) != Constructible::one() {
                return Err(GeomError::Degenerate("frame vector is not a unit vector"));
            }
            for b in &vectors[..i] {
                if b.len() != a.len() {
                    return Err(GeomError::DimensionMismatch(b.len(), a.len()));
                }
                if !dot(a, b).is_zero() {
                    return Err(GeomError::Degenerate("frame vectors are not orthogonal"));
                }
            }
        }
        Ok(Frame { vectors })
    }

    /// Standard axes `e_i` for `i` in `range`.
    pub fn axes(n: usize, range: std::ops::Range<usize>) -> Self {
        Frame {
            vectors: range.map(|i| Point::axis(n, i).0).collect(),
        }
    }

    /// Orthonormal basis of the complement of the unit vector `u`: the last
    /// `n − 1` columns of the reflection taking `e_1` to `u`.
    pub fn complement(u: &[Constructible]) -> Result<Self, GeomError> {
        let n = u.len();
        if norm_sq(u) != Constructible::one() {
            return Err(GeomError::Degenerate("direction is not a unit vector"));
        }
        let e1 = Point::axis(n, 0);
        let vectors = if e1.0 == u {
            (1..n).map(|i| Point::axis(n, i).0).collect()
        } else {
            let h = Hyperplane::new(Point::origin(n), sub(&e1.0, u))?;
            (1..n).map(|i| reflect(&Point::axis(n, i), &h).0).collect()
        };
        Ok(Frame { vectors })
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Squared circumradius of a regular simplex with `count` vertices.
pub fn simplex_circumradius_sq(count: usize, edge: &Constructible) -> Constructible {
    let k = count as i64;
    &edge.square() * &Constructible::rational(k - 1, 2 * k).unwrap()
}

/// Regular simplex with `count` vertices, centroid `center`, lying in
/// `center + span(frame)`.
pub fn regular_simplex(
    count: usize,
    edge: &Constructible,
    center: &Point,
    frame: &Frame,
) -> Result<Vec<Point>, GeomError> {
    if count == 0 || frame.len() + 1 < count {
        return Err(GeomError::Degenerate("frame too small for simplex"));
    }
    if edge.sign() <= 0 {
        return Err(GeomError::Degenerate("simplex edge must be positive"));
    }
    if let Some(v) = frame.vectors.iter().find(|v| v.len() != center.dim()) {
        return Err(GeomError::DimensionMismatch(v.len(), center.dim()));
    }
    let mut pts = vec![center.clone(); count];
    for j in 1..count {
        let jj = j as i64;
        let h = &Constructible::rational(jj + 1, 2 * jj)?.sqrt()? * edge;
        let below = -&h.checked_div(&Constructible::from_int(jj + 1))?;
        let at = &(&h * &Constructible::from_int(jj)) / &Constructible::from_int(jj + 1);
        let axis = &frame.vectors[j - 1];
        for (i, p) in pts.iter_mut().enumerate() {
            let c = match i.cmp(&j) {
                std::cmp::Ordering::Less => &below,
                std::cmp::Ordering::Equal => &at,
                std::cmp::Ordering::Greater => continue,
            };
            *p = p.offset(c, axis);
        }
    }
    Ok(pts)
}

/// Point at distance `r` from every vertex of a regular simplex spanning a
/// hyperplane, on the `side` of that hyperplane along its computed normal.
pub fn apex(simplex: &[Point], r: &Constructible, side: i8) -> Result<Point, GeomError> {
    let n = simplex.first().ok_or(GeomError::Degenerate("empty simplex"))?.dim();
    for p in simplex {
        same_dim(&simplex[0], p)?;
    }
    let c = centroid(simplex);
    let r0 = dist_sq(&simplex[0], &c)?;
    if simplex.iter().any(|p| dist_sq(p, &c).unwrap() != r0) {
        return Err(GeomError::Degenerate("simplex vertices are not equidistant from the centroid"));
    }
    let rows: Vec<Vector> = simplex[1..].iter().map(|p| sub(&p.0, &simplex[0].0)).collect();
    let null = nullspace(&rows, n);
    if null.len() != 1 {
        return Err(GeomError::Degenerate("simplex does not span a hyperplane"));
    }
    let h2 = &r.square() - &r0;
    if h2.sign() < 0 {
        return Err(GeomError::NoApex);
    }
    let normal = &null[0];
    let t = h2.checked_div(&norm_sq(normal))?.sqrt()?;
    let t = if side < 0 { -t } else { t };
    Ok(c.offset(&t, normal))
}

/// A point at distance `r1` from `c1` and `r2` from `c2`, in the plane through
/// `c1 → c2` and the first hint vector (then coordinate axis) not parallel to it.
pub fn sphere_intersect_point(
    c1: &Point,
    r1: &Constructible,
    c2: &Point,
    r2: &Constructible,
    hint: &Frame,
    side: i8,
) -> Result<Point, GeomError> {
    same_dim(c1, c2)?;
    let n = c1.dim();
    let u = sub(&c2.0, &c1.0);
    let d2 = norm_sq(&u);
    if d2.is_zero() {
        return Err(GeomError::Coincident);
    }
    let (r1s, r2s) = (r1.square(), r2.square());
    if (&(r1 - r2).square() - &d2).sign() > 0 || (&d2 - &(r1 + r2).square()).sign() > 0 {
        return Err(GeomError::EmptyIntersection);
    }
    let a = (&(&d2 + &r1s) - &r2s).checked_div(&(&d2 * &Constructible::from_int(2)))?;
    let h2 = &r1s - &(&a.square() * &d2);
    let foot = c1.offset(&a, &u);
    if h2.is_zero() {
        return Ok(foot);
    }
    let candidates = hint
        .vectors
        .iter()
        .cloned()
        .chain((0..n).map(|i| Point::axis(n, i).0));
    for f in candidates {
        if f.len() != n {
            continue;
        }
        let w = sub(&f, &scale(&dot(&f, &u).checked_div(&d2)?, &u));
        let w2 = norm_sq(&w);
        if w2.is_zero() {
            continue;
        }
        let t = h2.checked_div(&w2)?.sqrt()?;
        let t = if side < 0 { -t } else { t };
        return Ok(foot.offset(&t, &w));
    }
    Err(GeomError::Degenerate("no direction transverse to the centre line"))
}

/// Row-reduce in place; returns pivot columns.
fn row_reduce(m: &mut [Vector], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip().unwrap();
        m[row] = scale(&inv, &m[row]);
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let sub_row = scale(&f, &m[row]);
                m[r] = sub(&m[r], &sub_row);
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vector]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    row_reduce(&mut rows.to_vec(), ncols).len()
}

/// Basis of `{v : row·v = 0 for every row}`.
pub fn nullspace(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m, ncols);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Constructible::zero(); ncols];
            v[free] = Constructible::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[r][free];
            }
            v
        })
        .collect()
}

/// Dimension of the affine hull.
pub fn affine_rank(points: &[Point]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let rows: Vec<Vector> = points[1..].iter().map(|p| sub(&p.0, &points[0].0)).collect();
    rank(&rows)
}

/// A hyperplane containing all `points`, if one exists.
pub fn common_hyperplane(points: &[Point]) -> Option<Hyperplane> {
    let n = points.first()?.dim();
    let rows: Vec<Vector> = points[1..].iter().map(|p| sub(&p.0, &points[0].0)).collect();
    let normal = nullspace(&rows, n).into_iter().next()?;
    Hyperplane::new(points[0].clone(), normal).ok()
}
