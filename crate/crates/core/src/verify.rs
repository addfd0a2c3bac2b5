//! Exact verification of witness sets.
//!
//! Declared unit edges and claims are re-checked from the coordinates alone.
//! Undeclared unit pairs are found with a floating-point grid and confirmed
//! exactly; they are reported, never counted as failures.
//!
//! ```
//! use bq_witness::gadgets::unit_pair;
//! use bq_witness::geom::Point;
//! use bq_witness::verify::verify;
//!
//! let w = unit_pair(&Point::from_ints(&[0, 0]), &Point::from_ints(&[1, 0])).unwrap();
//! let report = verify(&w);
//! assert!(report.passed);
//! assert_eq!(report.discovered_edges, 1);
//! ```

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::field::Constructible;
use crate::geom::{self, Point};
use crate::rigidity::Framework;
use crate::witness::{Claim, Pair, WitnessSet};

/// A declared unit edge whose squared length is not exactly 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeFailure {
    pub pair: Pair,
    /// Squared length found, or `None` when an index is out of range.
    pub dist_sq: Option<Constructible>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub index: usize,
    pub kind: String,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub points: usize,
    pub declared_edges: usize,
    /// Every exact unit pair among the points, declared or not.
    pub discovered_edges: usize,
    pub incidental: Vec<Pair>,
    pub failed_edges: Vec<EdgeFailure>,
    pub claims: Vec<ClaimResult>,
    pub max_tower_depth: usize,
    pub derivation_depth: usize,
    pub derivation_nodes: u64,
}

pub fn verify(w: &WitnessSet) -> VerifyReport {
    let w = &unified(w);
    let n = w.points.len();
    let one = Constructible::one();
    let mut failed_edges = Vec::new();
    let mut good: HashSet<Pair> = HashSet::new();
    for &(a, b) in &w.unit_edges {
        let key = (a.min(b), a.max(b));
        if a >= n || b >= n || w.points[a].dim() != w.dim || w.points[b].dim() != w.dim {
            failed_edges.push(EdgeFailure { pair: (a, b), dist_sq: None });
            continue;
        }
        let d = geom::dist_sq(&w.points[a], &w.points[b]).expect("dimensions checked");
        if d == one {
            good.insert(key);
        } else {
            failed_edges.push(EdgeFailure { pair: (a, b), dist_sq: Some(d) });
        }
    }
    let mut incidental = unit_pairs(w, &good);
    incidental.sort_unstable();
    let claims: Vec<ClaimResult> = w
        .claims
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let detail = check_claim(w, c).err();
            ClaimResult {
                index: i,
                kind: c.kind().to_string(),
                holds: detail.is_none(),
                detail,
            }
        })
        .collect();
    let passed = failed_edges.is_empty() && claims.iter().all(|c| c.holds);
    VerifyReport {
        passed,
        points: n,
        declared_edges: w.unit_edges.len(),
        discovered_edges: good.len() + incidental.len(),
        incidental,
        failed_edges,
        claims,
        max_tower_depth: w.max_tower_depth(),
        derivation_depth: w.derivation.depth(),
        derivation_nodes: w.derivation.node_count(),
    }
}

fn unified(w: &WitnessSet) -> WitnessSet {
    let mut w = w.clone();
    if w.points.iter().all(|p| p.dim() == w.dim) {
        geom::unify_points(&mut w.points);
    }
    w
}

/// Pairs at exact distance 1 outside `known`, candidates taken from a unit
/// grid over the floating-point coordinates.
fn unit_pairs(w: &WitnessSet, known: &HashSet<Pair>) -> Vec<Pair> {
    let pts: Vec<Vec<f64>> = w
        .points
        .iter()
        .filter(|p| p.dim() == w.dim)
        .map(Point::to_f64)
        .collect();
    if pts.len() != w.points.len() {
        return Vec::new();
    }
    let cell = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| x.floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }
    let offsets = neighbourhood(w.dim);
    let one = Constructible::one();
    let mut out = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let c = cell(p);
        for off in &offsets {
            let key: Vec<i64> = c.iter().zip(off).map(|(a, b)| a + b).collect();
            let Some(ids) = grid.get(&key) else { continue };
            for &j in ids {
                if j <= i || known.contains(&(i, j)) {
                    continue;
                }
                let d2: f64 = p.iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                if (d2 - 1.0).abs() < 1e-6
                    && geom::dist_sq(&w.points[i], &w.points[j]).ok().as_ref() == Some(&one)
                {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

fn neighbourhood(dim: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-1..=1).map(move |d| {
                    let mut v = v.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}

fn pair_dist_sq(w: &WitnessSet, (a, b): Pair) -> Result<Constructible, String> {
    let (p, q) = match (w.points.get(a), w.points.get(b)) {
        (Some(p), Some(q)) => (p, q),
        _ => return Err(format!("pair ({a}, {b}) out of range")),
    };
    geom::dist_sq(p, q).map_err(|e| e.to_string())
}

fn check_claim(w: &WitnessSet, c: &Claim) -> Result<(), String> {
    match c {
        Claim::ExactDistance { pair, value } => {
            let d = pair_dist_sq(w, *pair)?;
            if value.sign() < 0 || d != value.square() {
                return Err(format!("squared distance {d}, claimed {}", value.square()));
            }
        }
        Claim::UpperBound { pair, value } => {
            let d = pair_dist_sq(w, *pair)?;
            if value.sign() < 0 || d > value.square() {
                return Err(format!("squared distance {d} exceeds {}", value.square()));
            }
        }
        Claim::Approx { pair, value, eps, via } => {
            let d = pair_dist_sq(w, *pair)?;
            if value.sign() < 0 || d != value.square() {
                return Err(format!("squared distance {d}, claimed {}", value.square()));
            }
            let near = pair_dist_sq(w, (pair.0, *via))?;
            let far = pair_dist_sq(w, (*via, pair.1))?;
            for (leg, sq) in [("x-z", &near), ("z-y", &far)] {
                if !sq.sqrt().is_ok_and(|r| r.is_rational()) {
                    return Err(format!("leg {leg} has irrational length √({sq})"));
                }
            }
            let half = eps.checked_div(&Constructible::from_int(2)).map_err(|e| e.to_string())?;
            if eps.sign() <= 0 || far > half.square() {
                return Err(format!("leg z-y of squared length {far} exceeds eps/2 = {half}"));
            }
        }
        Claim::Distinct { pair } => {
            if pair_dist_sq(w, *pair)?.is_zero() {
                return Err("points coincide".into());
            }
        }
        Claim::Hyperplane { points } => {
            let mut pts = Vec::with_capacity(points.len());
            for &i in points {
                pts.push(w.points.get(i).ok_or(format!("index {i} out of range"))?.clone());
            }
            if pts.iter().any(|p| p.dim() != w.dim) {
                return Err("point dimension differs from witness dimension".into());
            }
            let r = geom::affine_rank(&pts);
            if r >= w.dim {
                return Err(format!("points span an affine space of dimension {r}"));
            }
        }
        Claim::EqualDistance { first, second } => {
            let (a, b) = (pair_dist_sq(w, *first)?, pair_dist_sq(w, *second)?);
            if a != b {
                return Err(format!("squared distances {a} and {b} differ"));
            }
        }
        Claim::LessThan { first, second } => {
            let (a, b) = (pair_dist_sq(w, *first)?, pair_dist_sq(w, *second)?);
            if a >= b {
                return Err(format!("squared distance {a} is not below {b}"));
            }
        }
    }
    Ok(())
}

/// Floating embedding of the points with every exact unit pair as an edge.
pub fn unit_graph(w: &WitnessSet) -> Framework {
    let w = &unified(w);
    let one = Constructible::one();
    let n = w.points.len();
    let mut edges: HashSet<Pair> = w
        .unit_edges
        .iter()
        .filter(|&&(a, b)| a < n && b < n && pair_dist_sq(w, (a, b)).ok().as_ref() == Some(&one))
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    let found = unit_pairs(w, &edges);
    edges.extend(found);
    let mut edges: Vec<Pair> = edges.into_iter().collect();
    edges.sort_unstable();
    Framework {
        dim: w.dim,
        vertices: w.points.iter().map(Point::to_f64).collect(),
        edges,
        alpha: None,
        beta: None,
    }
}
