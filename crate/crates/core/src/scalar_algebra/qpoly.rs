use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qz(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Dense univariate polynomial over Q, coefficients from low to high degree.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    c: Vec<BigRational>,
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", a)?,
                1 => write!(f, "({})*x", a)?,
                _ => write!(f, "({})*x^{}", a, i)?,
            }
        }
        Ok(())
    }
}

impl QPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn zero() -> Self {
        QPoly { c: vec![] }
    }

    pub fn one() -> Self {
        QPoly { c: vec![q(1)] }
    }

    pub fn x() -> Self {
        QPoly { c: vec![q(0), q(1)] }
    }

    pub fn constant(a: BigRational) -> Self {
        QPoly::new(vec![a])
    }

    pub fn from_i64(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&v| q(v)).collect())
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        QPoly::new(c.iter().map(qz).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.c.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly::new(self.c.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, s: &BigRational) -> QPoly {
        QPoly::new(self.c.iter().map(|a| a * s).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut r = vec![BigRational::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        QPoly::new(r)
    }

    pub fn pow(&self, e: u32) -> QPoly {
        let mut r = QPoly::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree();
        let lc_inv = d.lc().recip();
        let mut r = self.c.clone();
        if r.len() < d.c.len() {
            return (QPoly::zero(), self.clone());
        }
        let mut qc = vec![BigRational::zero(); r.len() - dd];
        for k in (0..qc.len()).rev() {
            let t = &r[k + dd] * &lc_inv;
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] -= &t * b;
                }
            }
            qc[k] = t;
        }
        r.truncate(dd);
        (QPoly::new(qc), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let l = self.lc().recip();
        self.scale(&l)
    }

    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Returns (g, s, t) with s*self + t*o = g monic.
    pub fn xgcd(&self, o: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&qq.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&qq.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.lc().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * q(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    /// Substitute x -> p(x).
    pub fn compose(&self, p: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(p).add(&QPoly::constant(a.clone()));
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }

    /// Yun's squarefree decomposition: pairs (monic squarefree factor, multiplicity).
    pub fn squarefree_decomposition(&self) -> Vec<(QPoly, u32)> {
        let f = self.monic();
        if f.degree() == 0 {
            return vec![];
        }
        let mut out = Vec::new();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.divrem(&a0).0;
        let mut c = fp.divrem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.divrem(&a).0;
            if b.degree() == 0 {
                break;
            }
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Primitive integer polynomial with positive leading coefficient, same roots.
    pub fn primitive_part(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let mut l = BigInt::one();
        for a in &self.c {
            l = l.lcm(a.denom());
        }
        let mut v: Vec<BigInt> = self
            .c
            .iter()
            .map(|a| (a * qz(&l)).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for a in &v {
            g = g.gcd(a);
        }
        if v.last().unwrap().is_negative() {
            g = -g;
        }
        for a in v.iter_mut() {
            *a = &*a / &g;
        }
        v
    }

    /// Resultant of two polynomials over Q.
    pub fn resultant(&self, o: &QPoly) -> BigRational {
        if self.is_zero() || o.is_zero() {
            return BigRational::zero();
        }
        let mut a = self.clone();
        let mut b = o.clone();
        let mut res = BigRational::one();
        loop {
            let da = a.degree();
            let db = b.degree();
            if db == 0 {
                let mut t = BigRational::one();
                for _ in 0..da {
                    t *= b.lc();
                }
                return res * t;
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return BigRational::zero();
            }
            let dr = r.degree();
            if da % 2 == 1 && db % 2 == 1 {
                res = -res;
            }
            let mut t = BigRational::one();
            for _ in 0..(da - dr) {
                t *= b.lc();
            }
            res *= t;
            a = b;
            b = r;
        }
    }

    pub fn discriminant(&self) -> BigRational {
        let n = self.degree();
        let r = self.resultant(&self.derivative());
        let sign = if (n * (n.saturating_sub(1)) / 2) % 2 == 1 {
            q(-1)
        } else {
            q(1)
        };
        sign * r / self.lc()
    }

    /// Newton interpolation through the points (x_i, y_i) with distinct x_i.
    pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> QPoly {
        let n = xs.len();
        let mut dd: Vec<BigRational> = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
            }
        }
        let mut acc = QPoly::zero();
        for i in (0..n).rev() {
            let lin = QPoly::new(vec![-xs[i].clone(), q(1)]);
            acc = acc.mul(&lin).add(&QPoly::constant(dd[i].clone()));
        }
        acc
    }
}

pub fn is_integer_poly(p: &[BigRational]) -> bool {
    p.iter().all(|a| a.is_integer())
}

pub fn abs_max(v: &[BigInt]) -> BigInt {
    v.iter().map(|a| a.abs()).max().unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_matches_root_products() {
        // x^2 + 1 and x - 2: res = (2)^2 + 1 = 5
        let a = QPoly::from_i64(&[1, 0, 1]);
        let b = QPoly::from_i64(&[-2, 1]);
        assert_eq!(a.resultant(&b), q(5));
        // disc(x^2 + 1) = -4, disc(x^3 - 2) = -108
        assert_eq!(a.discriminant(), q(-4));
        assert_eq!(QPoly::from_i64(&[-2, 0, 0, 1]).discriminant(), q(-108));
    }

    #[test]
    fn squarefree_decomposition_recovers_multiplicities() {
        let a = QPoly::from_i64(&[-1, 1]);
        let b = QPoly::from_i64(&[1, 0, 1]);
        let f = a.pow(3).mul(&b);
        let d = f.squarefree_decomposition();
        assert_eq!(d, vec![(b, 1), (a, 3)]);
    }

    #[test]
    fn interpolation_roundtrip() {
        let p = QPoly::from_i64(&[3, -1, 0, 2]);
        let xs: Vec<_> = (0..4).map(q).collect();
        let ys: Vec<_> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(QPoly::interpolate(&xs, &ys), p);
    }
}
