//! Rigorous enclosures: a fast `f64` interval and an arbitrary-precision
//! dyadic interval used when the fast one straddles zero.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Closed `f64` interval, rounded outward after every operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    fn outward(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            return Self::ENTIRE;
        }
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        match q.to_f64() {
            Some(x) if x.is_finite() => {
                if q.is_integer() && x.abs() < 9.0e15 {
                    Interval::point(x)
                } else {
                    // conversion is within one ulp; widen by two
                    Interval::outward(x.next_down(), x.next_up())
                }
            }
            _ => Self::ENTIRE,
        }
    }

    pub fn add(self, o: Self) -> Self {
        Interval::outward(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn mul(self, o: Self) -> Self {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        if c.iter().any(|x| x.is_nan()) {
            return Self::ENTIRE;
        }
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::outward(lo, hi)
    }

    /// Enclosure of `√x` for the nonnegative part of `self`.
    pub fn sqrt(self) -> Self {
        let lo = self.lo.max(0.0).sqrt();
        let hi = if self.hi < 0.0 { 0.0 } else { self.hi.sqrt() };
        let lo = if lo > 0.0 { lo.next_down() } else { 0.0 };
        Interval { lo, hi: hi.next_up() }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            0.5 * self.lo + 0.5 * self.hi
        } else {
            f64::NAN
        }
    }

    /// Sign when the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo > 0.0 {
            Some(1)
        } else if self.hi < 0.0 {
            Some(-1)
        } else {
            None
        }
    }
}

/// Interval `[lo, hi] / 2^prec` with integer endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub lo: BigInt,
    pub hi: BigInt,
    pub prec: u32,
}

impl Dyadic {
    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let scaled = q.numer() << prec;
        let (lo, r) = scaled.div_mod_floor(q.denom());
        let hi = if r.is_zero() { lo.clone() } else { &lo + 1 };
        Dyadic { lo, hi, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Dyadic {
            lo: BigInt::zero(),
            hi: BigInt::zero(),
            prec,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Dyadic {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let min = c.iter().min().unwrap();
        let max = c.iter().max().unwrap();
        let one = BigInt::from(1) << self.prec;
        Dyadic {
            lo: min.div_floor(&one),
            hi: max.div_ceil(&one),
            prec: self.prec,
        }
    }

    pub fn sqrt(&self) -> Self {
        let clamp = |x: &BigInt| {
            if x.sign() == Sign::Minus {
                BigInt::zero()
            } else {
                x.clone()
            }
        };
        let lo = (clamp(&self.lo) << self.prec).sqrt();
        let hi_sq = clamp(&self.hi) << self.prec;
        let mut hi = hi_sq.sqrt();
        if &hi * &hi < hi_sq {
            hi += 1;
        }
        Dyadic {
            lo,
            hi,
            prec: self.prec,
        }
    }

    pub fn sign(&self) -> Option<i8> {
        if self.lo.sign() == Sign::Plus {
            Some(1)
        } else if self.hi.sign() == Sign::Minus {
            Some(-1)
        } else {
            None
        }
    }

    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::from(1) << self.prec)
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::from(1) << self.prec)
    }

    pub fn width(&self) -> BigRational {
        self.hi_rational() - self.lo_rational()
    }
}
