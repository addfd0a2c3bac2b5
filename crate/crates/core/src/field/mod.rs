//! Exact arithmetic in the real quadratic closure of `Q`.
//!
//! A [`Constructible`] is a sparse coefficient vector over the monomial basis
//! of a quadratic tower. Because every radicand of a tower is a non-square of
//! the field below it, the representation is canonical within a tower and
//! zero-testing is a structural check. Numbers from different towers are
//! re-expressed over a joined tower before combining.
//!
//! ```
//! use bq_witness::field::Constructible;
//!
//! let two = Constructible::from_int(2);
//! let r = two.sqrt().unwrap();
//! assert_eq!(&r * &r, two);
//! assert_eq!(r.sign(), 1);
//! ```

mod enclosure;
mod parse;
pub(crate) mod tower;

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use enclosure::{Dyadic, Interval};
pub use parse::{parse_expr, Expr, ParseError};
use tower::{Term, Tower};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// The four field operations accepted by [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Apply a field operation, reporting division by zero as an error.
pub fn arith(
    op: ArithOp,
    a: &Constructible,
    b: &Constructible,
) -> Result<Constructible, FieldError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

/// Re-express all values over one common tower. Arithmetic among values
/// sharing a tower skips the per-operation conversion. Nothing changes and
/// `false` is returned when the common tower would be deeper than
/// `max_depth`.
pub fn unify_all<'a>(values: impl IntoIterator<Item = &'a mut Constructible>, max_depth: usize) -> bool {
    let values: Vec<&mut Constructible> = values.into_iter().collect();
    let mut common: Tower = None;
    let mut seen = HashSet::new();
    for v in &values {
        if v.is_rational() || !seen.insert(tower::tower_id(&v.tower)) {
            continue;
        }
        if tower::depth(&common) == 0 {
            common = v.tower.clone();
        } else if !tower::same(&common, &v.tower) {
            if tower::depth(&common) + tower::depth(&v.tower) > max_depth
                && tower::depth(&tower::join(&common, &v.tower).tower) > max_depth
            {
                return false;
            }
            common = tower::join(&common, &v.tower).tower.clone();
        }
    }
    for v in values {
        if tower::same(&common, &v.tower) {
            continue;
        }
        *v = if v.is_rational() {
            Constructible::from_terms(common.clone(), std::mem::take(&mut v.terms))
        } else {
            tower::convert(v, &tower::join(&common, &v.tower))
        };
    }
    true
}

/// An exact element of the field of ruler-and-compass constructible reals.
#[derive(Clone)]
pub struct Constructible {
    pub(crate) tower: Tower,
    /// Sorted by mask, coefficients nonzero.
    pub(crate) terms: Vec<Term>,
    enc: OnceLock<Interval>,
}

fn q_int(i: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(i))
}

impl Constructible {
    pub(crate) fn from_terms(tower: Tower, mut terms: Vec<Term>) -> Self {
        terms.retain(|(_, c)| !c.is_zero());
        Constructible {
            tower,
            terms,
            enc: OnceLock::new(),
        }
    }

    pub(crate) fn zero_in(tower: Tower) -> Self {
        Self::from_terms(tower, Vec::new())
    }

    pub(crate) fn basis(tower: Tower, mask: u64) -> Self {
        Self::from_terms(tower, vec![(mask, BigRational::one())])
    }

    pub fn zero() -> Self {
        Self::zero_in(None)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(i: i64) -> Self {
        Self::from_rational(q_int(i))
    }

    pub fn from_bigint(i: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(i))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::from_terms(None, vec![(0, q)])
    }

    /// Exact rational `p/q` in lowest terms.
    pub fn rational(p: i64, q: i64) -> Result<Self, FieldError> {
        if q == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::from_rational(BigRational::new(p.into(), q.into())))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value, if this number is rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_some()
    }

    /// Number of radicands this value actually depends on, counting the
    /// radicands nested inside those radicands.
    pub fn tower_depth(&self) -> usize {
        let mut used = 0u64;
        for (m, _) in &self.terms {
            used |= m;
        }
        let mut closed = 0u64;
        let mut stack = vec![used];
        while let Some(mut m) = stack.pop() {
            m &= !closed;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                closed |= 1 << i;
                let level = tower::level_at(&self.tower, i);
                let inner = level.radicand.terms.iter().fold(0, |acc, (mk, _)| acc | mk);
                stack.push(inner);
            }
        }
        closed.count_ones() as usize
    }

    // ---- same-tower kernels -------------------------------------------------

    pub(crate) fn add_same(&self, o: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            if j == o.terms.len() || (i < self.terms.len() && self.terms[i].0 < o.terms[j].0) {
                out.push(self.terms[i].clone());
                i += 1;
            } else if i == self.terms.len() || o.terms[j].0 < self.terms[i].0 {
                out.push(o.terms[j].clone());
                j += 1;
            } else {
                let c = &self.terms[i].1 + &o.terms[j].1;
                if !c.is_zero() {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Self::from_terms(self.tower.clone(), out)
    }

    fn neg_same(&self) -> Self {
        Self::from_terms(
            self.tower.clone(),
            self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        )
    }

    fn scale(&self, k: &BigRational) -> Self {
        Self::from_terms(
            self.tower.clone(),
            self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        )
    }

    fn basis_product(tower: &Tower, m1: u64, m2: u64) -> Arc<[Term]> {
        let common = m1 & m2;
        if common == 0 {
            return Arc::from(vec![(m1 | m2, BigRational::one())]);
        }
        let all = m1 | m2;
        let owner = tower::level_at(tower, 63 - all.leading_zeros() as usize);
        if let Some(hit) = owner.basis_product((m1, m2)) {
            return hit;
        }
        let h = 63 - common.leading_zeros();
        let bit = 1u64 << h;
        let rest = Self::from_terms(
            tower.clone(),
            Self::basis_product(tower, m1 ^ bit, m2 ^ bit).to_vec(),
        );
        let level = tower::level_at(tower, h as usize);
        let radicand = Self::from_terms(tower.clone(), level.radicand.terms.clone());
        let prod: Arc<[Term]> = Arc::from(radicand.mul_same(&rest).terms);
        owner.store_basis_product((m1, m2), prod.clone());
        prod
    }

    /// Numerators over the least common denominator.
    fn integral(terms: &[Term]) -> (Vec<(u64, BigInt)>, BigInt) {
        let den = terms.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let nums = terms
            .iter()
            .map(|(m, c)| (*m, c.numer() * (&den / c.denom())))
            .collect();
        (nums, den)
    }

    /// Numerators over the least common denominator, if all fit in `i128`.
    fn small(terms: &[Term]) -> Option<(Vec<(u64, i128)>, i128)> {
        let mut den: i128 = 1;
        for (_, c) in terms {
            let d = c.denom().to_i128()?;
            den = den.checked_mul(d / den.gcd(&d))?;
        }
        let nums = terms
            .iter()
            .map(|(m, c)| Some((*m, c.numer().to_i128()?.checked_mul(den / c.denom().to_i128()?)?)))
            .collect::<Option<_>>()?;
        Some((nums, den))
    }

    /// [`Self::mul_same`] in machine integers; `None` on overflow.
    fn mul_small(&self, o: &Self, symmetric: bool) -> Option<Self> {
        let (a, da) = Self::small(&self.terms)?;
        let (b, db) = if symmetric {
            (a.clone(), da)
        } else {
            Self::small(&o.terms)?
        };
        let mut products = Vec::new();
        let mut dk: i128 = 1;
        for (i, (m1, _)) in a.iter().enumerate() {
            let start = if symmetric { i } else { 0 };
            for (m2, _) in &b[start..] {
                if m1 & m2 != 0 {
                    let (bp, d) = Self::small(&Self::basis_product(&self.tower, *m1, *m2))?;
                    dk = dk.checked_mul(d / dk.gcd(&d))?;
                    products.push((bp, d));
                }
            }
        }
        let mut acc: Vec<(u64, i128)> = Vec::with_capacity(a.len() * b.len());
        let mut next = products.iter();
        for (i, (m1, c1)) in a.iter().enumerate() {
            let start = if symmetric { i } else { 0 };
            for (j, (m2, c2)) in b[start..].iter().enumerate() {
                let mut c = c1.checked_mul(*c2)?;
                if symmetric && j > 0 {
                    c = c.checked_mul(2)?;
                }
                if m1 & m2 == 0 {
                    acc.push((m1 | m2, c.checked_mul(dk)?));
                } else {
                    let (bp, d) = next.next().unwrap();
                    for (m, k) in bp {
                        acc.push((*m, c.checked_mul(k.checked_mul(dk / d)?)?));
                    }
                }
            }
        }
        acc.sort_unstable_by_key(|t| t.0);
        let den = BigInt::from(da) * BigInt::from(db) * BigInt::from(dk);
        let mut out: Vec<Term> = Vec::new();
        let mut iter = acc.into_iter().peekable();
        while let Some((m, mut c)) = iter.next() {
            while let Some((_, more)) = iter.next_if(|t| t.0 == m) {
                c = c.checked_add(more)?;
            }
            if c != 0 {
                out.push((m, BigRational::new(c.into(), den.clone())));
            }
        }
        Some(Self::from_terms(self.tower.clone(), out))
    }

    pub(crate) fn mul_same(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero_in(self.tower.clone());
        }
        let symmetric = std::ptr::eq(self, o);
        if let Some(p) = self.mul_small(o, symmetric) {
            return p;
        }
        let (a, da) = Self::integral(&self.terms);
        let (b, db) = if symmetric {
            (a.clone(), da.clone())
        } else {
            Self::integral(&o.terms)
        };
        let mut products = Vec::new();
        let mut dk = BigInt::one();
        for (i, (m1, _)) in a.iter().enumerate() {
            let start = if symmetric { i } else { 0 };
            for (m2, _) in &b[start..] {
                if m1 & m2 != 0 {
                    let bp = Self::basis_product(&self.tower, *m1, *m2);
                    for (_, k) in bp.iter() {
                        if !k.denom().is_one() && !(&dk % k.denom()).is_zero() {
                            dk = dk.lcm(k.denom());
                        }
                    }
                    products.push(bp);
                }
            }
        }
        let two = BigInt::from(2);
        let mut acc: Vec<(u64, BigInt)> = Vec::with_capacity(a.len() * b.len());
        let mut next = products.iter();
        for (i, (m1, c1)) in a.iter().enumerate() {
            let start = if symmetric { i } else { 0 };
            for (j, (m2, c2)) in b[start..].iter().enumerate() {
                let mut c = c1 * c2;
                if symmetric && j > 0 {
                    c *= &two;
                }
                if m1 & m2 == 0 {
                    acc.push((m1 | m2, c * &dk));
                } else {
                    for (m, k) in next.next().unwrap().iter() {
                        acc.push((*m, &c * (k.numer() * (&dk / k.denom()))));
                    }
                }
            }
        }
        acc.sort_unstable_by_key(|t| t.0);
        let den = da * db * dk;
        let mut out: Vec<Term> = Vec::new();
        let mut iter = acc.into_iter().peekable();
        while let Some((m, mut c)) = iter.next() {
            while let Some((_, more)) = iter.next_if(|t| t.0 == m) {
                c += more;
            }
            if !c.is_zero() {
                out.push((m, BigRational::new(c, den.clone())));
            }
        }
        Self::from_terms(self.tower.clone(), out)
    }

    fn inv_same(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let all = self.terms.iter().fold(0u64, |a, (m, _)| a | m);
        if all == 0 {
            let c = &self.terms[0].1;
            return Ok(Self::from_terms(self.tower.clone(), vec![(0, c.recip())]));
        }
        let bit = 1u64 << (63 - all.leading_zeros());
        let conj = Self::from_terms(
            self.tower.clone(),
            self.terms
                .iter()
                .map(|(m, c)| if m & bit != 0 { (*m, -c) } else { (*m, c.clone()) })
                .collect(),
        );
        let norm = self.mul_same(&conj);
        Ok(conj.mul_same(&norm.inv_same()?))
    }

    /// Bring two numbers into one tower.
    fn unify<'a>(&'a self, o: &'a Self) -> (Cow<'a, Self>, Cow<'a, Self>) {
        if tower::same(&self.tower, &o.tower) {
            return (Cow::Borrowed(self), Cow::Borrowed(o));
        }
        if o.is_rational() {
            let lifted = Self::from_terms(self.tower.clone(), o.terms.clone());
            return (Cow::Borrowed(self), Cow::Owned(lifted));
        }
        if self.is_rational() {
            let lifted = Self::from_terms(o.tower.clone(), self.terms.clone());
            return (Cow::Owned(lifted), Cow::Borrowed(o));
        }
        let j = tower::join(&self.tower, &o.tower);
        let left = Self::from_terms(j.tower.clone(), self.terms.clone());
        (Cow::Owned(left), Cow::Owned(tower::convert(o, &j)))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, FieldError> {
        let (a, b) = self.unify(o);
        Ok(a.mul_same(&b.inv_same()?))
    }

    pub fn recip(&self) -> Result<Self, FieldError> {
        self.inv_same()
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Self {
        self.mul_same(self)
    }

    // ---- square roots -------------------------------------------------------

    fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
        if q.is_negative() {
            return None;
        }
        let (n, d) = (q.numer(), q.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
    }

    /// Split off level `d − 1`: `self = a + b·√r`.
    fn split(&self, d: usize) -> (Self, Self) {
        let bit = 1u64 << (d - 1);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (m, c) in &self.terms {
            if m & bit != 0 {
                b.push((m ^ bit, c.clone()));
            } else {
                a.push((*m, c.clone()));
            }
        }
        (Self::from_terms(self.tower.clone(), a), Self::from_terms(self.tower.clone(), b))
    }

    /// Norm from the first `d` levels down to the rationals.
    fn norm_to_rational(&self, d: usize) -> BigRational {
        let mut x = self.clone();
        for k in (1..=d).rev() {
            let (a, b) = x.split(k);
            if b.is_zero() {
                x = a.square();
                continue;
            }
            let level = tower::level_at(&x.tower, k - 1);
            let r = Self::from_terms(x.tower.clone(), level.radicand.terms.clone());
            x = a.square().add_same(&b.square().mul_same(&r).neg_same());
        }
        x.to_rational().expect("norm is rational")
    }

    /// Square root inside the first `d` levels of this number's tower.
    fn sqrt_rec(&self, d: usize) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.enclosure().hi < 0.0 {
            return None;
        }
        if d == 0 {
            let q = self.to_rational().expect("level-0 element is rational");
            return Self::rational_sqrt(&q).map(|r| Self::from_terms(self.tower.clone(), vec![(0, r)]));
        }
        if d > 1 && Self::rational_sqrt(&self.norm_to_rational(d)).is_none() {
            return None;
        }
        let bit = 1u64 << (d - 1);
        let tw = self.tower.clone();
        let (a, b) = self.split(d);
        let level = tower::level_at(&tw, d - 1);
        let r = Self::from_terms(tw.clone(), level.radicand.terms.clone());
        let root_r = Self::basis(tw.clone(), bit);
        if b.is_zero() {
            if let Some(s) = a.sqrt_rec(d - 1) {
                return Some(s);
            }
            let quotient = a.mul_same(&r.inv_same().ok()?);
            return quotient.sqrt_rec(d - 1).map(|c| c.mul_same(&root_r));
        }
        let norm = a.square().add_same(&b.square().mul_same(&r).neg_same());
        let s = norm.sqrt_rec(d - 1)?;
        let half = BigRational::new(1.into(), 2.into());
        for cand in [a.add_same(&s).scale(&half), a.add_same(&s.neg_same()).scale(&half)] {
            if let Some(c) = cand.sqrt_rec(d - 1) {
                if c.is_zero() {
                    continue;
                }
                let coef = b.mul_same(&c.scale(&q_int(2)).inv_same().ok()?);
                return Some(c.add_same(&coef.mul_same(&root_r)));
            }
        }
        None
    }

    /// The nonnegative square root if it already lies in this number's tower.
    pub(crate) fn sqrt_in_own_tower(&self) -> Option<Self> {
        let r = self.sqrt_rec(tower::depth(&self.tower))?;
        Some(if r.sign() < 0 { r.neg_same() } else { r })
    }

    /// Nonnegative square root. The tower grows only when the argument is not
    /// already a square.
    pub fn sqrt(&self) -> Result<Self, FieldError> {
        match self.sign() {
            -1 => return Err(FieldError::NegativeSqrt),
            0 => return Ok(Self::zero()),
            _ => {}
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::sqrt_rational(&q));
        }
        if let Some(r) = self.sqrt_in_own_tower() {
            return Ok(r);
        }
        let t = tower::extend(&self.tower, self.clone());
        let bit = 1u64 << (tower::depth(&t) - 1);
        Ok(Self::basis(t, bit))
    }

    fn sqrt_rational(q: &BigRational) -> Self {
        if let Some(r) = Self::rational_sqrt(q) {
            return Self::from_rational(r);
        }
        // √(p/q) = (s/q)·√f with p·q = s²·f
        let mut f = q.numer() * q.denom();
        let mut s = BigInt::one();
        for p in 2u32..1000 {
            let pp = BigInt::from(p * p);
            while (&f % &pp).is_zero() {
                f /= &pp;
                s *= p;
            }
        }
        let coef = BigRational::new(s, q.denom().clone());
        let fq = BigRational::from_integer(f);
        if let Some(r) = Self::rational_sqrt(&fq) {
            return Self::from_rational(coef * r);
        }
        let t = tower::extend(&None, Self::from_rational(fq));
        Self::from_terms(t, vec![(1, coef)])
    }

    // ---- sign and enclosures -------------------------------------------------

    /// Cached `f64` interval guaranteed to contain the exact value.
    pub fn enclosure(&self) -> Interval {
        *self.enc.get_or_init(|| {
            let mut acc = Interval::point(0.0);
            for (m, c) in &self.terms {
                let mut t = Interval::from_rational(c);
                let mut mm = *m;
                while mm != 0 {
                    let i = mm.trailing_zeros() as usize;
                    mm &= mm - 1;
                    t = t.mul(tower::level_at(&self.tower, i).root_enclosure());
                }
                acc = acc.add(t);
            }
            acc
        })
    }

    fn root_dyadic(&self, i: usize, prec: u32) -> Dyadic {
        let level = tower::level_at(&self.tower, i);
        level.radicand.dyadic(prec).sqrt()
    }

    /// Enclosure with endpoints on the grid `2^-prec`.
    pub fn dyadic(&self, prec: u32) -> Dyadic {
        let mut acc = Dyadic::zero(prec);
        for (m, c) in &self.terms {
            let mut t = Dyadic::from_rational(c, prec);
            let mut mm = *m;
            while mm != 0 {
                let i = mm.trailing_zeros() as usize;
                mm &= mm - 1;
                t = t.mul(&self.root_dyadic(i, prec));
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Exact sign. Zero is decided structurally; nonzero values are resolved
    /// by refining enclosures from 64 bits upward.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if let Some(q) = self.to_rational() {
            return if q.is_positive() { 1 } else { -1 };
        }
        if let Some(s) = self.enclosure().sign() {
            return s;
        }
        let mut prec = 64;
        loop {
            if let Some(s) = self.dyadic(prec).sign() {
                return s;
            }
            prec *= 2;
        }
    }

    /// Best `f64` approximation.
    pub fn to_f64(&self) -> f64 {
        if let Some(q) = self.to_rational() {
            return q.to_f64().unwrap_or(f64::NAN);
        }
        let e = self.enclosure();
        if e.width() <= 1e-12 * e.mid().abs().max(1e-300) {
            return e.mid();
        }
        let d = self.dyadic(128);
        let mid = (d.lo_rational() + d.hi_rational()) / q_int(2);
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal string with exactly `k` digits after the point and absolute
    /// error at most `10^-k`.
    pub fn approx(&self, k: u32) -> String {
        let scale = BigInt::from(10).pow(k);
        let target = BigRational::new(1.into(), scale.clone() * 4);
        let mut prec = 64;
        let d = loop {
            let d = self.dyadic(prec);
            if d.width() <= target {
                break d;
            }
            prec *= 2;
        };
        let mid = (d.lo_rational() + d.hi_rational()) / q_int(2);
        let scaled = mid * BigRational::from_integer(scale.clone());
        let n = scaled.round().to_integer();
        let neg = n.sign() == Sign::Minus;
        let digits = n.abs().to_string();
        let k = k as usize;
        let padded = format!("{digits:0>width$}", width = k + 1);
        let (int, frac) = padded.split_at(padded.len() - k);
        let sign = if neg { "-" } else { "" };
        if k == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl PartialEq for Constructible {
    fn eq(&self, other: &Self) -> bool {
        if tower::same(&self.tower, &other.tower) {
            return self.terms == other.terms;
        }
        (self - other).is_zero()
    }
}

impl Eq for Constructible {}

impl PartialOrd for Constructible {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Constructible {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl<'a> Add<&'a Constructible> for &'a Constructible {
    type Output = Constructible;
    fn add(self, o: &Constructible) -> Constructible {
        let (a, b) = self.unify(o);
        a.add_same(&b)
    }
}

impl<'a> Sub<&'a Constructible> for &'a Constructible {
    type Output = Constructible;
    fn sub(self, o: &Constructible) -> Constructible {
        let (a, b) = self.unify(o);
        a.add_same(&b.neg_same())
    }
}

impl<'a> Mul<&'a Constructible> for &'a Constructible {
    type Output = Constructible;
    fn mul(self, o: &Constructible) -> Constructible {
        if let Some(q) = o.to_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.to_rational() {
            return o.scale(&q);
        }
        let (a, b) = self.unify(o);
        a.mul_same(&b)
    }
}

/// Panics on division by zero; see [`Constructible::checked_div`].
impl<'a> Div<&'a Constructible> for &'a Constructible {
    type Output = Constructible;
    fn div(self, o: &Constructible) -> Constructible {
        self.checked_div(o).expect("division by zero")
    }
}

impl Neg for &Constructible {
    type Output = Constructible;
    fn neg(self) -> Constructible {
        self.neg_same()
    }
}

impl Neg for Constructible {
    type Output = Constructible;
    fn neg(self) -> Constructible {
        self.neg_same()
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<Constructible> for Constructible {
            type Output = Constructible;
            fn $f(self, o: Constructible) -> Constructible { (&self).$f(&o) }
        }
        impl<'a> $tr<&'a Constructible> for Constructible {
            type Output = Constructible;
            fn $f(self, o: &Constructible) -> Constructible { (&self).$f(o) }
        }
        impl<'a> $tr<Constructible> for &'a Constructible {
            type Output = Constructible;
            fn $f(self, o: Constructible) -> Constructible { self.$f(&o) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl From<i64> for Constructible {
    fn from(i: i64) -> Self {
        Self::from_int(i)
    }
}

impl From<BigRational> for Constructible {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Constructible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { "-" } else { "+" })?;
            }
            let a = c.abs();
            if *m == 0 {
                f.write_str(&fmt_rational(&a))?;
                continue;
            }
            let mut first = true;
            if !a.is_one() {
                f.write_str(&fmt_rational(&a))?;
                first = false;
            }
            let mut mm = *m;
            while mm != 0 {
                let i = mm.trailing_zeros() as usize;
                mm &= mm - 1;
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                write!(f, "sqrt({})", tower::level_at(&self.tower, i).radicand)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Constructible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Constructible({self})")
    }
}

impl FromStr for Constructible {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, FieldError> {
        parse_expr(s)?.eval()
    }
}

impl Serialize for Constructible {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Constructible {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
