//! Complex balls: a dyadic midpoint with BigInt mantissas and an f64 radius.

use super::scalar::{Scalar, ZeroTest};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use std::fmt;

/// m * 2^e
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub m: BigInt,
    pub e: i64,
}

fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 + 8.0 * f64::EPSILON) + f64::MIN_POSITIVE
    }
}

fn pow2(e: i64) -> f64 {
    if e > 1000 {
        f64::INFINITY
    } else if e < -1070 {
        0.0
    } else {
        2f64.powi(e as i32)
    }
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            m: BigInt::zero(),
            e: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    /// Truncate to `prec` bits; returns the value and an absolute error bound.
    pub fn round(self, prec: u32) -> (Dyadic, f64) {
        let bits = self.m.bits();
        if bits <= prec as u64 {
            return (self, 0.0);
        }
        let k = bits - prec as u64;
        let m = &self.m >> k;
        // arithmetic shift floors; error below 2^(e+k)
        let e = self.e + k as i64;
        (Dyadic { m, e }, pow2(e))
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &o.m << (o.e - e) as usize;
        Dyadic { m: a + b, e }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            m: -self.m.clone(),
            e: self.e,
        }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic {
            m: &self.m * &o.m,
            e: self.e + o.e,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.m.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&self.m >> shift as usize).to_f64().unwrap();
        top * pow2(self.e + shift)
    }

    /// Reciprocal of a positive dyadic with `prec` bits; error bound returned.
    pub fn recip(&self, prec: u32) -> (Dyadic, f64) {
        let bits = self.m.bits() as i64;
        let k = prec as i64 + bits;
        let num = BigInt::one() << k as usize;
        let qv = num.div_floor(&self.m);
        let e = -self.e - k;
        (Dyadic { m: qv, e }, pow2(e) * 2.0)
    }

    pub fn from_rational(a: &BigRational, prec: u32) -> (Dyadic, f64) {
        if a.is_zero() {
            return (Dyadic::zero(), 0.0);
        }
        let n = a.numer();
        let d = a.denom();
        if d.is_one() {
            return Dyadic { m: n.clone(), e: 0 }.round(prec);
        }
        let k = prec as i64 + d.bits() as i64 - n.bits() as i64 + 2;
        let k = k.max(0);
        let scaled = n << k as usize;
        let (qv, r) = scaled.div_rem(d);
        let e = -k;
        let err = if r.is_zero() { 0.0 } else { pow2(e) };
        let (v, e2) = Dyadic { m: qv, e }.round(prec);
        (v, up(err + e2))
    }

    /// Decimal string with `digits` digits after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten = BigInt::from(10u32).pow(digits as u32);
        let scaled = &self.m * &ten;
        let v = if self.e >= 0 {
            scaled << self.e as usize
        } else {
            let sh = (-self.e) as usize;
            let half = if sh > 0 {
                BigInt::one() << (sh - 1)
            } else {
                BigInt::zero()
            };
            (scaled + half) >> sh
        };
        let neg = v.is_negative();
        let s = v.abs().to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (ip, fp) = s.split_at(s.len() - digits);
        format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
    }
}

#[derive(Clone)]
pub struct Ball {
    pub re: Dyadic,
    pub im: Dyadic,
    pub rad: f64,
    pub prec: u32,
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.approx();
        write!(f, "({:e} + {:e}i ± {:e})", a, b, self.rad)
    }
}

pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64
}

impl Ball {
    pub fn exact(re: Dyadic, im: Dyadic, prec: u32) -> Ball {
        Ball {
            re,
            im,
            rad: 0.0,
            prec,
        }
    }

    pub fn from_rationals(re: &BigRational, im: &BigRational, prec: u32) -> Ball {
        let (a, ea) = Dyadic::from_rational(re, prec);
        let (b, eb) = Dyadic::from_rational(im, prec);
        Ball {
            re: a,
            im: b,
            rad: up(ea + eb),
            prec,
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Ball {
        let conv = |x: f64| -> Dyadic {
            if x == 0.0 {
                return Dyadic::zero();
            }
            let e = x.abs().log2().floor() as i64 - 60;
            let m = (x / pow2(e)).round();
            Dyadic {
                m: BigInt::from(m as i128),
                e,
            }
        };
        Ball::exact(conv(re), conv(im), prec)
    }

    pub fn mid_abs(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn with_radius(&self, r: f64) -> Ball {
        let mut b = self.clone();
        b.rad = up(r);
        b
    }

    pub fn midpoint(&self) -> Ball {
        self.with_radius(0.0)
    }

    /// Upper bound on |self|.
    pub fn abs_upper(&self) -> f64 {
        up(self.mid_abs() + self.rad)
    }

    pub fn rel_error_to(&self, exact: &Ball) -> f64 {
        let d = self.sub(exact);
        up(d.mid_abs() + d.rad) / exact.mid_abs()
    }

    pub fn decimal(&self, digits: usize) -> (String, String) {
        (self.re.to_decimal(digits), self.im.to_decimal(digits))
    }
}

impl Scalar for Ball {
    fn zero_like(&self) -> Self {
        Ball::exact(Dyadic::zero(), Dyadic::zero(), self.prec)
    }

    fn one_like(&self) -> Self {
        Ball::exact(
            Dyadic {
                m: BigInt::one(),
                e: 0,
            },
            Dyadic::zero(),
            self.prec,
        )
    }

    fn from_rational_like(&self, a: &BigRational) -> Self {
        Ball::from_rationals(a, &BigRational::zero(), self.prec)
    }

    fn add(&self, o: &Self) -> Self {
        let (re, e1) = self.re.add(&o.re).round(self.prec);
        let (im, e2) = self.im.add(&o.im).round(self.prec);
        Ball {
            re,
            im,
            rad: up(self.rad + o.rad + e1 + e2),
            prec: self.prec,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).add(&self.im.mul(&o.im).neg());
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        let (re, e1) = re.round(self.prec);
        let (im, e2) = im.round(self.prec);
        let a = self.mid_abs();
        let b = o.mid_abs();
        let rad = up(up(a * o.rad) + up(b * self.rad) + up(self.rad * o.rad) + e1 + e2);
        Ball {
            re,
            im,
            rad,
            prec: self.prec,
        }
    }

    fn neg(&self) -> Self {
        Ball {
            re: self.re.neg(),
            im: self.im.neg(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    fn inv(&self) -> Result<Self> {
        let a = self.mid_abs();
        if self.re.is_zero() && self.im.is_zero() && self.rad == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let lower = a * (1.0 - 1e-12) - self.rad;
        if lower <= 0.0 {
            return Err(Error::Undecidable);
        }
        let d = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let (d, _) = d.round(self.prec + 16);
        let (r, _) = d.recip(self.prec + 8);
        let (re, e1) = self.re.mul(&r).round(self.prec);
        let (im, e2) = self.im.neg().mul(&r).round(self.prec);
        let inv_abs = 1.0 / a;
        // arithmetic error: a few ulps relative
        let arith = inv_abs * pow2(-(self.prec as i64) + 6);
        let prop = self.rad / (lower * a);
        Ok(Ball {
            re,
            im,
            rad: up(prop + arith + e1 + e2),
            prec: self.prec,
        })
    }

    fn zero_test(&self) -> ZeroTest {
        if self.re.is_zero() && self.im.is_zero() && self.rad == 0.0 {
            return ZeroTest::Zero;
        }
        if self.mid_abs() * (1.0 - 1e-12) > self.rad {
            ZeroTest::NonZero
        } else {
            ZeroTest::Unknown
        }
    }

    fn conj(&self) -> Self {
        Ball {
            re: self.re.clone(),
            im: self.im.neg(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    fn approx(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    fn random_like(&self, rng: &mut dyn RngCore, bound: i64) -> Self {
        let mut g = || {
            BigRational::new(
                BigInt::from(rng.gen_range(-bound * 8..=bound * 8)),
                BigInt::from(8),
            )
        };
        let a = g();
        let b = g();
        Ball::from_rationals(&a, &b, self.prec)
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn render(&self) -> String {
        let digits = ((self.prec.saturating_sub(64)) as f64 / std::f64::consts::LOG2_10) as usize;
        let (a, b) = self.decimal(digits.max(20));
        format!("{}|{}|{:.3e}", a, b, self.rad)
    }
}
