//! Floating-point side: distance coordinates, infinitesimal rigidity,
//! assembly of witnesses from rigid unit-distance graphs, and a seeded
//! search for unit-preserving maps that break a claim.
//!
//! ```
//! use bq_witness::rigidity::{is_rigid, Framework, Verdict};
//!
//! let h = 3f64.sqrt() / 2.0;
//! let triangle = Framework::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], vec![(0, 1), (1, 2), (0, 2)]);
//! let report = is_rigid(&triangle, 1e-8);
//! assert_eq!(report.rank, 3);
//! assert_eq!(report.verdict, Verdict::Rigid);
//! ```

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::field::Constructible;
use crate::gadgets::{self, recipe, GadgetError};
use crate::geom::{self, Frame, GeomError, Point};
use crate::witness::{Builder, Claim, Figure, GadgetNode, Pair, WitnessSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RigidityError {
    #[error("points {0} and {1} of the simplex are not at distance 1")]
    NotUnitSimplex(usize, usize),
    #[error("expected {expected} simplex points, got {found}")]
    SimplexSize { expected: usize, found: usize },
    #[error("edge ({0}, {1}) has length {2}, not 1")]
    EdgeLength(usize, usize, f64),
    #[error("index {0} out of range")]
    Index(usize),
    #[error("framework is not rigid ({0:?})")]
    NotRigid(Verdict),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

/// Bar-and-joint framework whose bars all have target length 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Framework {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub edges: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
}

impl Framework {
    pub fn new(dim: usize, vertices: Vec<Vec<f64>>, edges: Vec<Pair>) -> Self {
        Framework {
            dim,
            vertices,
            edges,
            alpha: None,
            beta: None,
        }
    }

    /// Check indices, dimensions and that every bar is within `tol` of 1.
    pub fn validate(&self, tol: f64) -> Result<(), RigidityError> {
        if let Some(v) = self.vertices.iter().find(|v| v.len() != self.dim) {
            return Err(GeomError::DimensionMismatch(v.len(), self.dim).into());
        }
        for &(a, b) in &self.edges {
            let (Some(p), Some(q)) = (self.vertices.get(a), self.vertices.get(b)) else {
                return Err(RigidityError::Index(a.max(b)));
            };
            let len = dist(p, q);
            if (len - 1.0).abs() > tol {
                return Err(RigidityError::EdgeLength(a, b, len));
            }
        }
        Ok(())
    }
}

fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Distances from `y` to the vertices of a unit simplex of `n + 1` points.
pub fn phi_map(simplex: &[Point], y: &Point) -> Result<Vec<Constructible>, RigidityError> {
    let n = y.dim();
    if simplex.len() != n + 1 {
        return Err(RigidityError::SimplexSize {
            expected: n + 1,
            found: simplex.len(),
        });
    }
    let one = Constructible::one();
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            if geom::dist_sq(&simplex[i], &simplex[j])? != one {
                return Err(RigidityError::NotUnitSimplex(i, j));
            }
        }
    }
    simplex
        .iter()
        .map(|p| Ok(geom::dist(p, y)?))
        .collect()
}

/// One row per edge `(u, v)`: `x_u − x_v` in the columns of `u` and
/// `x_v − x_u` in those of `v`.
pub fn rigidity_matrix(f: &Framework) -> DMatrix<f64> {
    let n = f.dim;
    let mut m = DMatrix::zeros(f.edges.len(), n * f.vertices.len());
    for (r, &(u, v)) in f.edges.iter().enumerate() {
        for k in 0..n {
            let d = f.vertices[u][k] - f.vertices[v][k];
            m[(r, u * n + k)] = d;
            m[(r, v * n + k)] = -d;
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Rigid,
    Flexible,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub rank: usize,
    pub expected_rank: usize,
    /// Smallest singular value counted in the rank.
    pub smallest_singular: Option<f64>,
    /// Largest singular value not counted in the rank.
    pub largest_null: Option<f64>,
    pub verdict: Verdict,
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Affine dimension of floating points, by singular values above `tol`.
fn affine_dim(pts: &[Vec<f64>], tol: f64) -> usize {
    if pts.len() < 2 {
        return 0;
    }
    let n = pts[0].len();
    let m = DMatrix::from_fn(pts.len() - 1, n, |r, c| pts[r + 1][c] - pts[0][c]);
    singular_values(&m).iter().filter(|&&s| s > tol).count()
}

/// Infinitesimal rigidity by the rank of the rigidity matrix.
pub fn is_rigid(f: &Framework, tol: f64) -> RigidityReport {
    let n = f.dim;
    let v = f.vertices.len();
    let expected_rank = (n * v).saturating_sub(n * (n + 1) / 2);
    let s = singular_values(&rigidity_matrix(f));
    let rank = s.iter().filter(|&&x| x > tol).count();
    let smallest_singular = rank.checked_sub(1).map(|i| s[i]);
    let largest_null = s.get(rank).copied();
    let spanning = affine_dim(&f.vertices, tol) == n;
    let verdict = if !spanning {
        Verdict::Indeterminate
    } else if rank == expected_rank {
        Verdict::Rigid
    } else {
        Verdict::Flexible
    };
    RigidityReport {
        rank,
        expected_rank,
        smallest_singular,
        largest_null,
        verdict,
    }
}

/// Simplest rational within `tol` of `x`.
fn rational_near(x: f64, tol: f64) -> Constructible {
    let lo = BigRational::from_float(x - tol).unwrap();
    let hi = BigRational::from_float(x + tol).unwrap();
    Constructible::from_rational(recipe::simplest_between(&lo, &hi))
}

fn positive_rational(x: f64) -> Option<Constructible> {
    let q = BigRational::from_float(x)?;
    (x > 0.0).then(|| Constructible::from_rational(q))
}

/// Per-coordinate rounding of framework vertices in [`assemble_from_rigid`].
pub const VERTEX_TOL: f64 = 1e-13;

/// Witness pinning every vertex of a rigid framework by approximation
/// chains to an exact unit simplex. Vertex coordinates are replaced by the
/// simplest rationals within [`VERTEX_TOL`], so the result is approximate.
pub fn assemble_from_rigid(
    f: &Framework,
    alpha: usize,
    beta: usize,
    eps: f64,
) -> Result<WitnessSet, RigidityError> {
    let n = f.dim;
    f.validate(1e-6)?;
    for i in [alpha, beta] {
        if i >= f.vertices.len() {
            return Err(RigidityError::Index(i));
        }
    }
    let eps_q = positive_rational(eps)
        .ok_or_else(|| RigidityError::Precondition("eps must be positive".into()))?;
    let report = is_rigid(f, 1e-8);
    if report.verdict != Verdict::Rigid {
        return Err(RigidityError::NotRigid(report.verdict));
    }
    let center = Point::origin(n);
    let simplex = geom::regular_simplex(n + 1, &Constructible::one(), &center, &Frame::axes(n, 0..n))?;
    let verts: Vec<Point> = f
        .vertices
        .iter()
        .map(|v| Point::new(v.iter().map(|&x| rational_near(x, VERTEX_TOL)).collect()))
        .collect();
    let mut b = Builder::new(n);
    let vidx: Vec<usize> = verts.iter().map(|p| b.insert(p.clone())).collect();
    let sidx: Vec<usize> = simplex.iter().map(|p| b.insert(p.clone())).collect();
    for i in 0..sidx.len() {
        for j in i + 1..sidx.len() {
            b.add_edge(sidx[i], sidx[j]);
        }
    }
    let one = Constructible::one();
    for &(u, v) in &f.edges {
        if geom::dist_sq(&verts[u], &verts[v])? == one {
            b.add_edge(vidx[u], vidx[v]);
        }
    }
    let mut node = GadgetNode::new(Figure::Rigid).param("eps", eps);
    let mut chains = 0;
    for x in &verts {
        for p in &simplex {
            if p == x {
                continue;
            }
            let t = gadgets::approx_gadget(p, x, &eps_q)?;
            b.merge(&t);
            node = node.child(t.derivation.clone());
            chains += 1;
        }
    }
    let value = geom::dist(&verts[alpha], &verts[beta])?;
    let claim = Claim::ExactDistance {
        pair: (vidx[alpha], vidx[beta]),
        value,
    };
    let node = node.param("chains", chains);
    Ok(b.finish(vec![claim], std::sync::Arc::new(node), true))
}

/// Settings of [`falsify_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// A map counts as unit-preserving when every unit edge is within this
    /// of length 1.
    pub tau_unit: f64,
    /// Claim deviation the search tries to reach.
    pub margin: f64,
    /// Deviation above which a unit-preserving map violates the claims.
    pub claim_tol: f64,
    pub max_iter: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 200,
            seed: 42,
            tau_unit: 1e-10,
            margin: 0.5,
            claim_tol: 1e-5,
            max_iter: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub unit_residual: f64,
    pub claim_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub trials: usize,
    pub seed: u64,
    pub best_unit_residual: f64,
    /// Largest claim deviation among unit-preserving maps.
    pub best_claim_deviation: f64,
    /// Trials ending at a unit-preserving map.
    pub near_feasible: Vec<Trial>,
    pub violated: bool,
}

struct Problem<'a> {
    dim: usize,
    edges: &'a [Pair],
    claims: Vec<(Claim, Vec<f64>)>,
    margin: f64,
    /// Whether the claim hinge rows take part in the objective.
    push: bool,
}

fn point(x: &[f64], dim: usize, i: usize) -> &[f64] {
    &x[i * dim..(i + 1) * dim]
}

impl Problem<'_> {
    /// Nonnegative amount by which a claim fails under the map `x`.
    fn deviation(&self, claim: &Claim, values: &[f64], x: &[f64]) -> f64 {
        let d = |(a, b): Pair| dist(point(x, self.dim, a), point(x, self.dim, b));
        match claim {
            Claim::ExactDistance { pair, .. } => (d(*pair) - values[0]).abs(),
            Claim::UpperBound { pair, .. } => (d(*pair) - values[0]).max(0.0),
            Claim::Approx { pair, .. } => ((d(*pair) - values[0]).abs() - values[1]).max(0.0),
            Claim::Distinct { pair } => (self.margin - d(*pair)).max(0.0),
            Claim::EqualDistance { first, second } => (d(*first) - d(*second)).abs(),
            Claim::LessThan { first, second } => (d(*first) - d(*second)).max(0.0),
            Claim::Hyperplane { points } => {
                let pts: Vec<Vec<f64>> = points.iter().map(|&i| point(x, self.dim, i).to_vec()).collect();
                if pts.len() <= self.dim {
                    return 0.0;
                }
                let m = DMatrix::from_fn(pts.len() - 1, self.dim, |r, c| pts[r + 1][c] - pts[0][c]);
                singular_values(&m).get(self.dim - 1).copied().unwrap_or(0.0)
            }
        }
    }

    fn claim_deviation(&self, x: &[f64]) -> f64 {
        self.claims
            .iter()
            .map(|(c, v)| self.deviation(c, v, x))
            .fold(0.0, f64::max)
    }

    fn unit_residual(&self, x: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b)| (dist(point(x, self.dim, a), point(x, self.dim, b)) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Edge residuals followed by one hinge residual per claim.
    fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = self
            .edges
            .iter()
            .map(|&(a, b)| dist(point(x, self.dim, a), point(x, self.dim, b)) - 1.0)
            .collect();
        if self.push {
            for (c, v) in &self.claims {
                r.push((self.margin - self.deviation(c, v, x)).max(0.0));
            }
        }
        r
    }

    /// Jacobian of [`Self::residuals`]: analytic for edges, central
    /// differences for the claim rows.
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let hinges = if self.push { self.claims.len() } else { 0 };
        let mut j = DMatrix::zeros(self.edges.len() + hinges, x.len());
        for (r, &(a, b)) in self.edges.iter().enumerate() {
            let (p, q) = (point(x, n, a), point(x, n, b));
            let len = dist(p, q).max(1e-300);
            for k in 0..n {
                let g = (p[k] - q[k]) / len;
                j[(r, a * n + k)] += g;
                j[(r, b * n + k)] -= g;
            }
        }
        let mut y = x.to_vec();
        for (ci, (c, v)) in self.claims.iter().enumerate().take(hinges) {
            let row = self.edges.len() + ci;
            let h = 1e-7;
            for col in c.indices().iter().flat_map(|&i| (i * n)..(i * n + n)) {
                let orig = y[col];
                y[col] = orig + h;
                let up = (self.margin - self.deviation(c, v, &y)).max(0.0);
                y[col] = orig - h;
                let down = (self.margin - self.deviation(c, v, &y)).max(0.0);
                y[col] = orig;
                j[(row, col)] = (up - down) / (2.0 * h);
            }
        }
        j
    }

    fn cost(&self, x: &[f64]) -> f64 {
        self.residuals(x).iter().map(|r| r * r).sum()
    }

    /// Levenberg–Marquardt from `x`.
    fn minimize(&self, mut x: Vec<f64>, max_iter: usize) -> Vec<f64> {
        let mut mu = 1e-3;
        let mut cost = self.cost(&x);
        for _ in 0..max_iter {
            if cost < 1e-30 {
                break;
            }
            let r = DVector::from_vec(self.residuals(&x));
            let j = self.jacobian(&x);
            let jt = j.transpose();
            let g = &jt * &r;
            let h = &jt * &j;
            let mut improved = false;
            for _ in 0..20 {
                let mut a = h.clone();
                for i in 0..a.nrows() {
                    a[(i, i)] += mu * (1.0 + h[(i, i)]);
                }
                let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                    mu *= 10.0;
                    continue;
                };
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let c = self.cost(&trial);
                if c < cost {
                    let rel = (cost - c) / cost.max(1e-300);
                    x = trial;
                    cost = c;
                    mu = (mu / 3.0).max(1e-12);
                    improved = rel > 1e-15;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        x
    }
}

fn claim_values(c: &Claim) -> Vec<f64> {
    match c {
        Claim::ExactDistance { value, .. } | Claim::UpperBound { value, .. } => vec![value.to_f64()],
        Claim::Approx { value, eps, .. } => vec![value.to_f64(), eps.to_f64()],
        _ => Vec::new(),
    }
}

/// [`falsify_with`] with the default claim tolerance and iteration cap.
pub fn falsify_search(
    w: &WitnessSet,
    restarts: usize,
    seed: u64,
    tau_unit: f64,
    margin: f64,
) -> Result<SearchReport, RigidityError> {
    falsify_with(
        w,
        &SearchConfig {
            restarts,
            seed,
            tau_unit,
            margin,
            ..SearchConfig::default()
        },
    )
}

/// Search for maps of the witness points that keep every unit edge at
/// length 1 while pushing the claims at least `margin` away from holding.
/// Each trial minimizes the unit residuals plus a hinge on the claims, then
/// polishes the unit residuals alone from where that stopped.
///
/// Even trials start from uniformly random maps in the bounding box of the
/// embedding, odd trials from the embedding under a random reflection plus
/// Gaussian-like noise of random scale.
pub fn falsify_with(w: &WitnessSet, cfg: &SearchConfig) -> Result<SearchReport, RigidityError> {
    if w.claims.is_empty() {
        return Err(RigidityError::Precondition("witness has no claims".into()));
    }
    let n = w.dim;
    let np = w.points.len();
    for c in &w.claims {
        if let Some(&i) = c.indices().iter().find(|&&i| i >= np) {
            return Err(RigidityError::Index(i));
        }
    }
    if let Some(&(a, b)) = w.unit_edges.iter().find(|&&(a, b)| a >= np || b >= np) {
        return Err(RigidityError::Index(a.max(b)));
    }
    let mut problem = Problem {
        dim: n,
        edges: &w.unit_edges,
        claims: w.claims.iter().map(|c| (c.clone(), claim_values(c))).collect(),
        margin: cfg.margin,
        push: true,
    };
    let base: Vec<f64> = w.points.iter().flat_map(Point::to_f64).collect();
    let (lo, hi) = base.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
    let span = (hi - lo).max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut near_feasible = Vec::new();
    let mut best_unit_residual = f64::INFINITY;
    for t in 0..cfg.restarts {
        let start: Vec<f64> = if t % 2 == 0 {
            (0..np * n).map(|_| lo + span * rng.gen::<f64>()).collect()
        } else {
            let scale = 10f64.powf(rng.gen_range(-3.0..0.0));
            let flip: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            base.iter()
                .enumerate()
                .map(|(i, v)| flip[i % n] * v + scale * (rng.gen::<f64>() - 0.5))
                .collect()
        };
        problem.push = true;
        let pushed = problem.minimize(start, cfg.max_iter);
        problem.push = false;
        let x = problem.minimize(pushed, cfg.max_iter);
        let unit_residual = problem.unit_residual(&x);
        best_unit_residual = best_unit_residual.min(unit_residual);
        if unit_residual < cfg.tau_unit {
            near_feasible.push(Trial {
                index: t,
                unit_residual,
                claim_deviation: problem.claim_deviation(&x),
            });
        }
    }
    let best_claim_deviation = near_feasible
        .iter()
        .map(|t| t.claim_deviation)
        .fold(0.0, f64::max);
    Ok(SearchReport {
        trials: cfg.restarts,
        seed: cfg.seed,
        best_unit_residual,
        best_claim_deviation,
        violated: best_claim_deviation > cfg.claim_tol,
        near_feasible,
    })
}

/// Analytic gradient of the edge part of the search objective
/// `Σ (|x_u − x_v| − 1)²`.
pub fn edge_objective_gradient(dim: usize, edges: &[Pair], x: &[f64]) -> (f64, Vec<f64>) {
    let mut g = vec![0.0; x.len()];
    let mut value = 0.0;
    for &(a, b) in edges {
        let (p, q) = (point(x, dim, a), point(x, dim, b));
        let len = dist(p, q);
        let r = len - 1.0;
        value += r * r;
        for k in 0..dim {
            let d = 2.0 * r * (p[k] - q[k]) / len;
            g[a * dim + k] += d;
            g[b * dim + k] -= d;
        }
    }
    (value, g)
}
