//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s
//! carrying about 106 bits of significand.
//!
//! Only what the Laplace inversion needs is here: the four operations,
//! `sqrt`, `exp` and `expm1`. Algorithms follow the usual error-free
//! transformations (Knuth two-sum, fused-multiply-add two-product).

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };
    pub const LN_2: Self = DoubleDouble {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Multiplies by `2^n` exactly (barring over/underflow).
    pub fn ldexp(self, n: i32) -> Self {
        // split so each factor stays a normal f64
        let mut out = self;
        let mut n = n;
        while n != 0 {
            let step = n.clamp(-1000, 1000);
            let f = 2.0_f64.powi(step);
            out = DoubleDouble::new(out.hi * f, out.lo * f);
            n -= step;
        }
        out
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                DoubleDouble::new(f64::NAN, f64::NAN)
            };
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let residual = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, residual);
        DoubleDouble { hi, lo }
    }

    /// `e^x − 1` for `|x| ≤ ln 2`, accurate relative to the result.
    fn expm1_reduced(self) -> Self {
        const HALVINGS: i32 = 10;
        let r = self.ldexp(-HALVINGS);
        let mut term = r;
        let mut sum = r;
        let mut k = 2.0;
        while term.hi.abs() > 1e-36 * sum.hi.abs().max(f64::MIN_POSITIVE) {
            term = term * r / k;
            sum = sum + term;
            k += 1.0;
        }
        // expm1(2y) = expm1(y) · (2 + expm1(y))
        for _ in 0..HALVINGS {
            sum = sum * (sum + 2.0);
        }
        sum
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.7 {
            return DoubleDouble::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        let n = (self.hi / std::f64::consts::LN_2).round();
        let r = self - Self::LN_2 * n;
        (r.expm1_reduced() + 1.0).ldexp(n as i32)
    }

    pub fn expm1(self) -> Self {
        if self.hi.abs() <= std::f64::consts::LN_2 {
            self.expm1_reduced()
        } else {
            self.exp() - 1.0
        }
    }

    pub fn powi(self, n: u32) -> Self {
        (0..n).fold(Self::ONE, |acc, _| acc * self)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble::new(-self.hi, -self.lo)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Add<f64> for DoubleDouble {
    type Output = Self;
    fn add(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = Self;
    fn sub(self, b: f64) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    fn mul(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + q3
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;
    fn div(self, b: f64) -> Self {
        self / DoubleDouble::from(b)
    }
}
