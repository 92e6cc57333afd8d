use super::qpoly::{q, QPoly};
use super::scalar::{Scalar, ZeroTest};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use std::fmt;
use std::sync::Arc;

/// The cyclotomic field Q(zeta_N), with reduction tables.
#[derive(Debug)]
pub struct CycloField {
    pub n: u32,
    pub phi: usize,
    /// zeta^k reduced modulo Phi_N, for k in 0..N.
    powers: Vec<Vec<BigInt>>,
    /// The units of Z/N, i.e. the Galois group.
    pub units: Vec<u32>,
}

pub fn cyclotomic_poly(n: u32) -> QPoly {
    let mut f = QPoly::from_i64(&{
        let mut v = vec![0i64; n as usize + 1];
        v[0] = -1;
        v[n as usize] = 1;
        v
    });
    for d in 1..n {
        if n % d == 0 {
            f = f.divrem(&cyclotomic_poly(d)).0;
        }
    }
    f
}

impl CycloField {
    pub fn new(n: u32) -> Arc<CycloField> {
        assert!(n >= 1);
        let phi_poly = cyclotomic_poly(n);
        let phi = phi_poly.degree();
        let mut powers = Vec::with_capacity(n as usize);
        for k in 0..n as usize {
            let mut v = vec![0i64; k + 1];
            v[k] = 1;
            let r = QPoly::from_i64(&v).rem(&phi_poly);
            powers.push(
                (0..phi)
                    .map(|i| r.coeff(i).to_integer())
                    .collect::<Vec<BigInt>>(),
            );
        }
        let units = (1..=n).filter(|a| a.gcd(&n) == 1).map(|a| a % n).collect();
        Arc::new(CycloField {
            n,
            phi,
            powers,
            units,
        })
    }
}

#[derive(Clone)]
pub struct Cyclo {
    pub ctx: Arc<CycloField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Self) -> bool {
        self.ctx.n == o.ctx.n && self.num == o.num && self.den == o.den
    }
}

impl Cyclo {
    pub fn new(ctx: &Arc<CycloField>, num: Vec<BigInt>, den: BigInt) -> Cyclo {
        let mut c = Cyclo {
            ctx: ctx.clone(),
            num,
            den,
        };
        c.normalize();
        c
    }

    pub fn zeta_pow(ctx: &Arc<CycloField>, k: i64) -> Cyclo {
        let n = ctx.n as i64;
        let kk = k.rem_euclid(n) as usize;
        Cyclo::new(ctx, ctx.powers[kk].clone(), BigInt::one())
    }

    pub fn from_rational(ctx: &Arc<CycloField>, a: &BigRational) -> Cyclo {
        let mut num = vec![BigInt::zero(); ctx.phi];
        num[0] = a.numer().clone();
        Cyclo::new(ctx, num, a.denom().clone())
    }

    pub fn coords(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|a| BigRational::new(a.clone(), self.den.clone()))
            .collect()
    }

    pub fn from_coords(ctx: &Arc<CycloField>, c: &[BigRational]) -> Cyclo {
        let mut l = BigInt::one();
        for a in c {
            l = l.lcm(a.denom());
        }
        let num = c
            .iter()
            .map(|a| (a * BigRational::from_integer(l.clone())).to_integer())
            .collect();
        Cyclo::new(ctx, num, l)
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for a in self.num.iter_mut() {
                *a = -a.clone();
            }
        }
        let mut g = self.den.clone();
        for a in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(a);
        }
        if !g.is_one() && !g.is_zero() {
            for a in self.num.iter_mut() {
                *a = &*a / &g;
            }
            self.den = &self.den / &g;
        }
        if self.num.iter().all(|a| a.is_zero()) {
            self.den = BigInt::one();
        }
    }

    /// Galois automorphism zeta -> zeta^a.
    pub fn galois(&self, a: u32) -> Cyclo {
        let n = self.ctx.n as usize;
        let mut out = vec![BigInt::zero(); self.ctx.phi];
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (j * a as usize) % n;
            for (i, v) in self.ctx.powers[k].iter().enumerate() {
                if !v.is_zero() {
                    out[i] += c * v;
                }
            }
        }
        Cyclo::new(&self.ctx, out, self.den.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.num.iter().skip(1).all(|a| a.is_zero())
    }

    pub fn rational_value(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn norm(&self) -> BigRational {
        let mut p = self.clone();
        for &a in &self.ctx.units {
            if a != 1 {
                p = Scalar::mul(&p, &self.galois(a));
            }
        }
        p.rational_value().expect("norm is rational")
    }

    pub fn height(&self) -> usize {
        let m = self
            .num
            .iter()
            .map(|a| a.bits())
            .max()
            .unwrap_or(0);
        (m + self.den.bits()) as usize
    }
}

impl Scalar for Cyclo {
    fn zero_like(&self) -> Self {
        Cyclo::new(&self.ctx, vec![BigInt::zero(); self.ctx.phi], BigInt::one())
    }

    fn one_like(&self) -> Self {
        Cyclo::from_rational(&self.ctx, &q(1))
    }

    fn from_rational_like(&self, a: &BigRational) -> Self {
        Cyclo::from_rational(&self.ctx, a)
    }

    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            let num = self.num.iter().zip(&o.num).map(|(a, b)| a + b).collect();
            return Cyclo::new(&self.ctx, num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&o.num)
            .map(|(a, b)| a * &o.den + b * &self.den)
            .collect();
        Cyclo::new(&self.ctx, num, &self.den * &o.den)
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        let phi = self.ctx.phi;
        let mut full = vec![BigInt::zero(); 2 * phi];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.num.iter().enumerate() {
                if !b.is_zero() {
                    full[i + j] += a * b;
                }
            }
        }
        let n = self.ctx.n as usize;
        let mut out: Vec<BigInt> = full[..phi].to_vec();
        for k in phi..2 * phi {
            if full[k].is_zero() {
                continue;
            }
            for (i, v) in self.ctx.powers[k % n].iter().enumerate() {
                if !v.is_zero() {
                    out[i] += &full[k] * v;
                }
            }
        }
        Cyclo::new(&self.ctx, out, &self.den * &o.den)
    }

    fn neg(&self) -> Self {
        Cyclo {
            ctx: self.ctx.clone(),
            num: self.num.iter().map(|a| -a).collect(),
            den: self.den.clone(),
        }
    }

    fn inv(&self) -> Result<Self> {
        if self.num.iter().all(|a| a.is_zero()) {
            return Err(Error::DivisionByZero);
        }
        if self.is_rational() {
            let r = BigRational::new(self.den.clone(), self.num[0].clone());
            return Ok(Cyclo::from_rational(&self.ctx, &r));
        }
        let mut p = self.one_like();
        for &a in &self.ctx.units {
            if a != 1 {
                p = p.mul(&self.galois(a));
            }
        }
        let nrm = self.mul(&p).rational_value().expect("norm is rational");
        Ok(p.mul(&Cyclo::from_rational(&self.ctx, &nrm.recip())))
    }

    fn zero_test(&self) -> ZeroTest {
        if self.num.iter().all(|a| a.is_zero()) {
            ZeroTest::Zero
        } else {
            ZeroTest::NonZero
        }
    }

    fn conj(&self) -> Self {
        self.galois(self.ctx.n - 1)
    }

    fn approx(&self) -> (f64, f64) {
        let n = self.ctx.n as f64;
        let d = big_to_f64(&self.den);
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ang = 2.0 * std::f64::consts::PI * j as f64 / n;
            let v = big_to_f64(a) / d;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }

    fn random_like(&self, rng: &mut dyn RngCore, bound: i64) -> Self {
        let num = (0..self.ctx.phi)
            .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
            .collect();
        Cyclo::new(&self.ctx, num, BigInt::one())
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn render(&self) -> String {
        let parts: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

pub fn big_to_f64(a: &BigInt) -> f64 {
    a.to_f64().unwrap_or(if a.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(12), QPoly::from_i64(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_poly(24).degree(), 8);
        assert_eq!(cyclotomic_poly(9), QPoly::from_i64(&[1, 0, 0, 1, 0, 0, 1]));
    }

    #[test]
    fn zeta_has_order_n() {
        let k = CycloField::new(24);
        let z = Cyclo::zeta_pow(&k, 1);
        let z24 = z.pow_i(24).unwrap();
        assert_eq!(z24, z.one_like());
        assert_ne!(z.pow_i(12).unwrap(), z.one_like());
    }

    #[test]
    fn inverse_and_norm() {
        let k = CycloField::new(12);
        let a = Cyclo::new(
            &k,
            vec![BigInt::from(2), BigInt::from(-1), BigInt::from(3), BigInt::from(0)],
            BigInt::from(5),
        );
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b), a.one_like());
        let (re, im) = a.mul(&a.conj()).approx();
        assert!(im.abs() < 1e-12 && re > 0.0);
    }
}
