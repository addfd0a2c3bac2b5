//! Hash-consed quadratic towers `Q ⊂ Q(√r₀) ⊂ Q(√r₀,√r₁) ⊂ …`.
//!
//! A tower is a persistent linked list of [`Level`]s. Every level is interned
//! on `(parent, radicand)`, so two towers are structurally equal exactly when
//! they are the same `Arc`. Each radicand is a non-square of the field below
//! it, which makes the monomials `∏ √rᵢ` a basis and equality a coefficient
//! comparison.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, LazyLock, Mutex, OnceLock};

use num_rational::BigRational;

use super::enclosure::Interval;
use super::Constructible;

/// Maximum number of radicands in one tower (masks are `u64`).
pub const MAX_DEPTH: usize = 64;

pub(crate) type Term = (u64, BigRational);
pub(crate) type Tower = Option<Arc<Level>>;

pub(crate) struct Level {
    pub(crate) parent: Tower,
    /// Lives in `parent` exactly: all masks are below `depth - 1`.
    pub(crate) radicand: Constructible,
    pub(crate) depth: usize,
    pub(crate) id: u64,
    root_enclosure: OnceLock<Interval>,
    basis_products: Mutex<HashMap<(u64, u64), Arc<[Term]>>>,
}

impl Level {
    pub(crate) fn root_enclosure(&self) -> Interval {
        *self
            .root_enclosure
            .get_or_init(|| self.radicand.enclosure().sqrt())
    }

    pub(crate) fn basis_product(&self, key: (u64, u64)) -> Option<Arc<[Term]>> {
        self.basis_products.lock().unwrap().get(&key).cloned()
    }

    pub(crate) fn store_basis_product(&self, key: (u64, u64), terms: Arc<[Term]>) {
        self.basis_products.lock().unwrap().insert(key, terms);
    }
}

impl std::fmt::Debug for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Level")
            .field("depth", &self.depth)
            .field("radicand", &self.radicand.to_string())
            .finish()
    }
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

type InternKey = (u64, Vec<Term>);
static INTERN: LazyLock<Mutex<HashMap<InternKey, Arc<Level>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

pub(crate) fn tower_id(t: &Tower) -> u64 {
    t.as_ref().map_or(0, |l| l.id)
}

pub(crate) fn depth(t: &Tower) -> usize {
    t.as_ref().map_or(0, |l| l.depth)
}

pub(crate) fn same(a: &Tower, b: &Tower) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => Arc::ptr_eq(x, y),
        _ => false,
    }
}

/// The prefix of `t` with exactly `d` radicands.
pub(crate) fn ancestor(t: &Tower, d: usize) -> Tower {
    let mut cur = t.clone();
    while depth(&cur) > d {
        cur = cur.and_then(|l| l.parent.clone());
    }
    cur
}

/// Level holding radicand index `i` (0-based from the bottom).
pub(crate) fn level_at(t: &Tower, i: usize) -> Arc<Level> {
    ancestor(t, i + 1).expect("level index within tower")
}

/// Adjoin `√radicand` on top of `parent`. The radicand must already live in
/// `parent` and must not be a square there.
pub(crate) fn extend(parent: &Tower, radicand: Constructible) -> Tower {
    debug_assert!(same(&radicand.tower, parent));
    let d = depth(parent) + 1;
    assert!(d <= MAX_DEPTH, "quadratic tower deeper than {MAX_DEPTH}");
    let key = (tower_id(parent), radicand.terms.clone());
    let mut map = INTERN.lock().unwrap();
    let level = map
        .entry(key)
        .or_insert_with(|| {
            Arc::new(Level {
                parent: parent.clone(),
                radicand,
                depth: d,
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                root_enclosure: OnceLock::new(),
                basis_products: Mutex::new(HashMap::new()),
            })
        })
        .clone();
    Some(level)
}

/// Image of one radicand of the right-hand tower inside a joined tower.
#[derive(Clone, Debug)]
pub(crate) enum Image {
    Bit(u32),
    Elem(Constructible),
}

#[derive(Debug)]
pub(crate) struct Join {
    pub(crate) tower: Tower,
    /// One entry per level of the right-hand tower.
    pub(crate) images: Vec<Image>,
    pub(crate) bits_only: bool,
}

static JOINS: LazyLock<Mutex<HashMap<(u64, u64), Arc<Join>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Join two towers. The left tower is always a prefix of the result; the
/// right tower's radicands are appended unless they are already squares.
pub(crate) fn join(a: &Tower, b: &Tower) -> Arc<Join> {
    let key = (tower_id(a), tower_id(b));
    if let Some(j) = JOINS.lock().unwrap().get(&key) {
        return j.clone();
    }
    let j = Arc::new(compute_join(a, b));
    JOINS.lock().unwrap().insert(key, j.clone());
    j
}

fn compute_join(a: &Tower, b: &Tower) -> Join {
    let db = depth(b);
    let mut common = depth(a).min(db);
    while !same(&ancestor(a, common), &ancestor(b, common)) {
        common -= 1;
    }
    let mut images: Vec<Image> = (0..common).map(|i| Image::Bit(i as u32)).collect();
    let mut result = a.clone();
    for j in common..db {
        let level = level_at(b, j);
        let partial = Join {
            tower: result.clone(),
            images: images.clone(),
            bits_only: images.iter().all(|im| matches!(im, Image::Bit(_))),
        };
        let radicand = convert(&level.radicand, &partial);
        match radicand.sqrt_in_own_tower() {
            Some(root) => images.push(Image::Elem(root)),
            None => {
                result = extend(&result, radicand);
                images.push(Image::Bit((depth(&result) - 1) as u32));
            }
        }
    }
    let bits_only = images.iter().all(|im| matches!(im, Image::Bit(_)));
    Join {
        tower: result,
        images,
        bits_only,
    }
}

/// Re-express `x` (living in the right-hand tower of `j`) in `j.tower`.
pub(crate) fn convert(x: &Constructible, j: &Join) -> Constructible {
    if j.bits_only {
        let mut terms: Vec<Term> = x
            .terms
            .iter()
            .map(|(m, c)| (remap_mask(*m, &j.images), c.clone()))
            .collect();
        terms.sort_by_key(|t| t.0);
        return Constructible::from_terms(j.tower.clone(), terms);
    }
    let mut acc = Constructible::zero_in(j.tower.clone());
    for (mask, c) in &x.terms {
        let mut bits = 0u64;
        let mut factor = Constructible::from_terms(
            j.tower.clone(),
            vec![(0, c.clone())],
        );
        let mut m = *mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            match &j.images[i] {
                Image::Bit(b) => bits |= 1 << b,
                Image::Elem(e) => factor = factor.mul_same(e),
            }
        }
        let basis = Constructible::basis(j.tower.clone(), bits);
        acc = acc.add_same(&factor.mul_same(&basis));
    }
    acc
}

fn remap_mask(mask: u64, images: &[Image]) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        if let Image::Bit(b) = images[i] {
            out |= 1 << b;
        }
    }
    out
}
