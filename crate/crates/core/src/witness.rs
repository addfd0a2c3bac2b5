//! Witness sets: deduplicated points, unit edges, claims and derivations.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::field::Constructible;
use crate::geom::{self, GeomError, Point, Vector};

pub type Pair = (usize, usize);

/// The relation a witness set forces on every unit-preserving map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    ExactDistance { pair: Pair, value: Constructible },
    UpperBound { pair: Pair, value: Constructible },
    /// `|f(x)f(y)|` within `eps` of `value`, certified by the rational legs
    /// `x–via` and `via–y`.
    Approx {
        pair: Pair,
        value: Constructible,
        eps: Constructible,
        via: usize,
    },
    Distinct { pair: Pair },
    Hyperplane { points: Vec<usize> },
    EqualDistance { first: Pair, second: Pair },
    LessThan { first: Pair, second: Pair },
}

impl Claim {
    pub fn indices(&self) -> Vec<usize> {
        match self {
            Claim::ExactDistance { pair, .. }
            | Claim::UpperBound { pair, .. }
            | Claim::Distinct { pair } => vec![pair.0, pair.1],
            Claim::Approx { pair, via, .. } => vec![pair.0, pair.1, *via],
            Claim::Hyperplane { points } => points.clone(),
            Claim::EqualDistance { first, second } | Claim::LessThan { first, second } => {
                vec![first.0, first.1, second.0, second.1]
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Claim::ExactDistance { .. } => "exact_distance",
            Claim::UpperBound { .. } => "upper_bound",
            Claim::Approx { .. } => "approx",
            Claim::Distinct { .. } => "distinct",
            Claim::Hyperplane { .. } => "hyperplane",
            Claim::EqualDistance { .. } => "equal_distance",
            Claim::LessThan { .. } => "less_than",
        }
    }

    /// Point pairs whose distance the claim constrains.
    pub fn pairs(&self) -> Vec<Pair> {
        match self {
            Claim::ExactDistance { pair, .. }
            | Claim::UpperBound { pair, .. }
            | Claim::Approx { pair, .. }
            | Claim::Distinct { pair } => vec![*pair],
            Claim::Hyperplane { .. } => vec![],
            Claim::EqualDistance { first, second } | Claim::LessThan { first, second } => {
                vec![*first, *second]
            }
        }
    }

    fn remap(&self, map: &[usize]) -> Claim {
        let p = |(a, b): Pair| (map[a], map[b]);
        match self {
            Claim::ExactDistance { pair, value } => Claim::ExactDistance {
                pair: p(*pair),
                value: value.clone(),
            },
            Claim::UpperBound { pair, value } => Claim::UpperBound {
                pair: p(*pair),
                value: value.clone(),
            },
            Claim::Approx { pair, value, eps, via } => Claim::Approx {
                pair: p(*pair),
                value: value.clone(),
                eps: eps.clone(),
                via: map[*via],
            },
            Claim::Distinct { pair } => Claim::Distinct { pair: p(*pair) },
            Claim::Hyperplane { points } => Claim::Hyperplane {
                points: points.iter().map(|&i| map[i]).collect(),
            },
            Claim::EqualDistance { first, second } => Claim::EqualDistance {
                first: p(*first),
                second: p(*second),
            },
            Claim::LessThan { first, second } => Claim::LessThan {
                first: p(*first),
                second: p(*second),
            },
        }
    }
}

/// Which construction produced a piece of a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    Unit,
    ScaleUp,
    Bound,
    Double,
    Multiple,
    Divide,
    Approx,
    PythDiff,
    Diff,
    Sum,
    Ratio,
    Sqrt,
    Compile,
    Hyperplane,
    EqualDistance,
    LessThan,
    Distinct,
    Rigid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetNode {
    pub figure: Figure,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Arc<GadgetNode>>,
}

impl GadgetNode {
    pub fn new(figure: Figure) -> Self {
        GadgetNode {
            figure,
            params: BTreeMap::new(),
            children: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn child(mut self, c: Arc<GadgetNode>) -> Self {
        self.children.push(c);
        self
    }

    pub fn node_count(&self) -> u64 {
        1 + self.children.iter().map(|c| c.node_count()).sum::<u64>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSet {
    pub dim: usize,
    pub points: Vec<Point>,
    pub unit_edges: Vec<Pair>,
    pub claims: Vec<Claim>,
    pub derivation: Arc<GadgetNode>,
    /// Set when the points only approximate an input configuration.
    pub approximate: bool,
}

impl WitnessSet {
    pub fn max_tower_depth(&self) -> usize {
        self.points.iter().map(Point::tower_depth).max().unwrap_or(0)
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }
}

/// Rigid motion `p ↦ origin + R·p` where `R` is the reflection taking `e₁`
/// to a unit vector.
#[derive(Clone, Debug)]
pub struct Placement {
    origin: Point,
    mirror: Option<(Vector, Constructible)>,
}

impl Placement {
    pub fn identity(n: usize) -> Self {
        Placement {
            origin: Point::origin(n),
            mirror: None,
        }
    }

    /// Carry `0 ↦ a` and `length·e₁ ↦ b`; requires `|ab| = length` exactly.
    pub fn onto(a: &Point, b: &Point, length: &Constructible) -> Result<Self, GeomError> {
        let d = b.0.iter().zip(&a.0).map(|(x, y)| x - y).collect::<Vector>();
        if geom::norm_sq(&d) != length.square() {
            return Err(GeomError::Degenerate("pair is not at the template distance"));
        }
        let n = a.dim();
        let mut v: Vector = d.iter().map(|c| -&c.checked_div(length).unwrap()).collect();
        v[0] = &v[0] + &Constructible::one();
        let vv = geom::norm_sq(&v);
        let mirror = if vv.is_zero() {
            None
        } else {
            Some((v, Constructible::from_int(2).checked_div(&vv)?))
        };
        debug_assert_eq!(a.dim(), n);
        Ok(Placement {
            origin: a.clone(),
            mirror,
        })
    }

    pub fn apply(&self, p: &Point) -> Point {
        let q = match &self.mirror {
            None => p.clone(),
            Some((v, s)) => p.offset(&-&(s * &geom::dot(v, &p.0)), v),
        };
        q.translate(&self.origin.0)
    }
}

const WEIGHTS: [f64; 8] = [
    1.0,
    0.754_877_666_2,
    0.569_840_290_9,
    0.430_159_709_1,
    0.324_717_957_2,
    0.245_122_333_8,
    0.185_037_170_8,
    0.139_680_581_2,
];

fn key(p: &Point) -> f64 {
    p.0.iter()
        .enumerate()
        .map(|(i, c)| c.to_f64() * WEIGHTS[i % WEIGHTS.len()] * (1.0 + (i / 8) as f64))
        .sum()
}

/// Incremental witness assembly with exact point deduplication.
#[derive(Clone, Debug)]
pub struct Builder {
    dim: usize,
    points: Vec<Point>,
    index: BTreeMap<OrderedFloat<f64>, Vec<usize>>,
    edges: Vec<Pair>,
    edge_set: HashSet<Pair>,
}

impl Builder {
    pub fn new(dim: usize) -> Self {
        Builder {
            dim,
            points: Vec::new(),
            index: BTreeMap::new(),
            edges: Vec::new(),
            edge_set: HashSet::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn edges(&self) -> &[Pair] {
        &self.edges
    }

    pub fn insert(&mut self, p: Point) -> usize {
        assert_eq!(p.dim(), self.dim, "point dimension");
        let k = key(&p);
        let tol = 1e-7 * (1.0 + k.abs());
        let range = OrderedFloat(k - tol)..=OrderedFloat(k + tol);
        for (_, ids) in self.index.range(range) {
            for &i in ids {
                if self.points[i] == p {
                    return i;
                }
            }
        }
        let i = self.points.len();
        self.points.push(p);
        self.index.entry(OrderedFloat(k)).or_default().push(i);
        i
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        let e = (a.min(b), a.max(b));
        if a != b && self.edge_set.insert(e) {
            self.edges.push(e);
        }
    }

    /// Copy points and edges through `place`; returns the index map.
    pub fn absorb(&mut self, points: &[Point], edges: &[Pair], place: &Placement) -> Vec<usize> {
        let mut place = place.clone();
        let mut points = points.to_vec();
        {
            let Placement { origin, mirror } = &mut place;
            let fixed = origin.0.iter_mut().chain(mirror.iter_mut().flat_map(|(v, s)| v.iter_mut().chain([s])));
            crate::field::unify_all(fixed.chain(points.iter_mut().flat_map(|p| p.0.iter_mut())), usize::MAX);
        }
        let map: Vec<usize> = points.iter().map(|p| self.insert(place.apply(p))).collect();
        for &(a, b) in edges {
            self.add_edge(map[a], map[b]);
        }
        map
    }

    /// Merge another witness (same coordinates); claims are remapped and
    /// returned.
    pub fn merge(&mut self, w: &WitnessSet) -> (Vec<usize>, Vec<Claim>) {
        let map = self.absorb(&w.points, &w.unit_edges, &Placement::identity(self.dim));
        let claims = w.claims.iter().map(|c| c.remap(&map)).collect();
        (map, claims)
    }

    pub fn finish(
        self,
        claims: Vec<Claim>,
        derivation: Arc<GadgetNode>,
        approximate: bool,
    ) -> WitnessSet {
        let mut points = self.points;
        geom::unify_points(&mut points);
        WitnessSet {
            dim: self.dim,
            points,
            unit_edges: self.edges,
            claims,
            derivation,
            approximate,
        }
    }
}
