use super::factor::{factor_q, is_irreducible};
use super::qpoly::{q, QPoly};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Element of Q[y]/(g): coordinates in the power basis 1, y, ..., y^{d-1}.
pub type NfElem = Vec<BigRational>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberField {
    pub label: String,
    /// Coefficients of the monic defining polynomial, low to high.
    #[serde(rename = "poly_coeffs", with = "rational_strings")]
    pub poly: Vec<BigRational>,
}

/// Serde helper: rationals as strings such as "-3/4".
pub mod rational_strings {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|a| a.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        raw.iter()
            .map(|v| match v {
                serde_json::Value::String(s) => super::parse_rational(s).map_err(D::Error::custom),
                serde_json::Value::Number(n) => super::parse_rational(&n.to_string()).map_err(D::Error::custom),
                _ => Err(D::Error::custom("expected a rational string")),
            })
            .collect()
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("bad rational '{}'", s));
    let (n, d) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: num_bigint::BigInt = n.parse().map_err(|_| bad())?;
    let d: num_bigint::BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl NumberField {
    pub fn new(label: &str, poly: &[i64]) -> Result<Self> {
        Self::from_rationals(label, poly.iter().map(|&a| q(a)).collect())
    }

    pub fn from_rationals(label: &str, poly: Vec<BigRational>) -> Result<Self> {
        let f = NumberField {
            label: label.to_string(),
            poly,
        };
        f.check()?;
        Ok(f)
    }

    pub fn rationals() -> Self {
        NumberField {
            label: "Q".into(),
            poly: vec![q(0), q(1)],
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.poly.len() < 2 || !self.poly.last().unwrap().is_one() {
            return Err(Error::InvalidField(format!(
                "{}: defining polynomial must be monic of degree >= 1",
                self.label
            )));
        }
        if !is_irreducible(&self.qpoly()) {
            return Err(Error::InvalidField(format!(
                "{}: defining polynomial is reducible or not squarefree",
                self.label
            )));
        }
        Ok(())
    }

    pub fn qpoly(&self) -> QPoly {
        QPoly::new(self.poly.clone())
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn zero(&self) -> NfElem {
        vec![BigRational::zero(); self.degree()]
    }

    pub fn one(&self) -> NfElem {
        self.from_rational(&q(1))
    }

    pub fn from_rational(&self, a: &BigRational) -> NfElem {
        let mut v = self.zero();
        v[0] = a.clone();
        v
    }

    pub fn from_i64(&self, a: i64) -> NfElem {
        self.from_rational(&q(a))
    }

    /// The generator y.
    pub fn gen(&self) -> NfElem {
        self.from_poly(&QPoly::x())
    }

    pub fn from_poly(&self, p: &QPoly) -> NfElem {
        let r = p.rem(&self.qpoly());
        (0..self.degree()).map(|i| r.coeff(i)).collect()
    }

    pub fn to_poly(&self, a: &NfElem) -> QPoly {
        QPoly::new(a.clone())
    }

    pub fn add(&self, a: &NfElem, b: &NfElem) -> NfElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &NfElem, b: &NfElem) -> NfElem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn neg(&self, a: &NfElem) -> NfElem {
        a.iter().map(|x| -x).collect()
    }

    pub fn mul(&self, a: &NfElem, b: &NfElem) -> NfElem {
        self.from_poly(&self.to_poly(a).mul(&self.to_poly(b)))
    }

    pub fn scale(&self, a: &NfElem, s: &BigRational) -> NfElem {
        a.iter().map(|x| x * s).collect()
    }

    pub fn is_zero(&self, a: &NfElem) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    pub fn inv(&self, a: &NfElem) -> Option<NfElem> {
        if self.is_zero(a) {
            return None;
        }
        let (g, s, _) = self.to_poly(a).xgcd(&self.qpoly());
        debug_assert_eq!(g, QPoly::one());
        Some(self.from_poly(&s))
    }

    pub fn pow(&self, a: &NfElem, e: u32) -> NfElem {
        let mut r = self.one();
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }

    /// Matrix of multiplication by a in the power basis (columns = images of basis vectors).
    pub fn mult_matrix(&self, a: &NfElem) -> Vec<Vec<BigRational>> {
        let d = self.degree();
        let mut m = vec![vec![BigRational::zero(); d]; d];
        let mut basis = self.one();
        for j in 0..d {
            let col = self.mul(a, &basis);
            for i in 0..d {
                m[i][j] = col[i].clone();
            }
            basis = self.mul(&basis, &self.gen());
        }
        m
    }

    pub fn trace(&self, a: &NfElem) -> BigRational {
        let m = self.mult_matrix(a);
        (0..self.degree()).map(|i| m[i][i].clone()).sum()
    }

    pub fn discriminant(&self) -> BigRational {
        self.qpoly().discriminant()
    }
}

/// Polynomial in X with coefficients in a number field, low to high.
pub type NfPoly = Vec<NfElem>;

fn nf_trim(f: &NumberField, mut a: NfPoly) -> NfPoly {
    while a.last().map_or(false, |x| f.is_zero(x)) {
        a.pop();
    }
    a
}

pub fn nfpoly_rem(f: &NumberField, a: &NfPoly, b: &NfPoly) -> NfPoly {
    let b = nf_trim(f, b.clone());
    let mut r = nf_trim(f, a.clone());
    let db = b.len() - 1;
    let li = f.inv(b.last().unwrap()).unwrap();
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let t = f.mul(r.last().unwrap(), &li);
        for (j, y) in b.iter().enumerate() {
            r[k + j] = f.sub(&r[k + j], &f.mul(&t, y));
        }
        r.pop();
        r = nf_trim(f, r);
    }
    let _ = db;
    r
}

pub fn nfpoly_monic(f: &NumberField, a: &NfPoly) -> NfPoly {
    let a = nf_trim(f, a.clone());
    if a.is_empty() {
        return a;
    }
    let li = f.inv(a.last().unwrap()).unwrap();
    a.iter().map(|x| f.mul(x, &li)).collect()
}

pub fn nfpoly_gcd(f: &NumberField, a: &NfPoly, b: &NfPoly) -> NfPoly {
    let mut x = nf_trim(f, a.clone());
    let mut y = nf_trim(f, b.clone());
    while !y.is_empty() {
        let r = nfpoly_rem(f, &x, &y);
        x = y;
        y = r;
    }
    nfpoly_monic(f, &x)
}

/// Expand p(X + s*y) as a polynomial in X over the field (y its generator).
fn shift_poly(f: &NumberField, p: &QPoly, s: i64) -> NfPoly {
    let shift = f.scale(&f.gen(), &q(s));
    // Horner in NfPoly
    let mut acc: NfPoly = vec![];
    let lin: NfPoly = vec![shift, f.one()];
    for c in p.coeffs().iter().rev() {
        // acc = acc * (X + s y) + c
        let mut next: NfPoly = vec![f.zero(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in lin.iter().enumerate() {
                next[i + j] = f.add(&next[i + j], &f.mul(a, b));
            }
        }
        if next.is_empty() {
            next.push(f.zero());
        }
        next[0] = f.add(&next[0], &f.from_rational(c));
        acc = next;
    }
    nf_trim(f, acc)
}

/// Norm N(T) = prod over roots theta of g of p(T - s*theta), made monic.
pub fn shifted_norm(p: &QPoly, g: &QPoly, s: i64) -> QPoly {
    let total = p.degree() * g.degree();
    let xs: Vec<BigRational> = (0..=total as i64).map(q).collect();
    let ys: Vec<BigRational> = xs
        .iter()
        .map(|t| {
            // h(y) = p(t - s*y)
            let lin = QPoly::new(vec![t.clone(), q(-s)]);
            let h = p.compose(&lin);
            g.resultant(&h)
        })
        .collect();
    QPoly::interpolate(&xs, &ys).monic()
}

/// One irreducible factor of a rational polynomial over a number field,
/// with the norm factor that determines it.
#[derive(Clone, Debug)]
pub struct ExtFactor {
    /// Monic factor over the field.
    pub factor: NfPoly,
    /// Irreducible factor of the norm: minimal polynomial of the primitive element x + s*y.
    pub norm_factor: QPoly,
}

/// Factor a squarefree irreducible-over-Q polynomial p over the field by norms.
/// Returns the shift s and the factors; the norm of p(X - s y) is squarefree.
pub fn factor_over(field: &NumberField, p: &QPoly) -> (i64, Vec<ExtFactor>) {
    let p = p.monic();
    let g = field.qpoly();
    for s in [0i64, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 7, -7, 11, 13] {
        let n = shifted_norm(&p, &g, s);
        if !n.is_squarefree() {
            continue;
        }
        let mut out = Vec::new();
        // N(T) has roots beta + s*theta; factor over F: gcd(p(X), N_i(X + s*y))
        let pf: NfPoly = p.coeffs().iter().map(|c| field.from_rational(c)).collect();
        for (ni, _) in factor_q(&n) {
            let shifted = shift_poly(field, &ni, s);
            let h = nfpoly_gcd(field, &pf, &shifted);
            out.push(ExtFactor {
                factor: h,
                norm_factor: ni,
            });
        }
        return (s, out);
    }
    panic!("no squarefree norm found for {}", p);
}

/// Evaluate a rational polynomial on a number field element.
pub fn eval_in(field: &NumberField, p: &QPoly, a: &NfElem) -> NfElem {
    let mut acc = field.zero();
    for c in p.coeffs().iter().rev() {
        acc = field.add(&field.mul(&acc, a), &field.from_rational(c));
    }
    acc
}

/// Roots of p lying in the field.
pub fn roots_in(field: &NumberField, p: &QPoly) -> Vec<NfElem> {
    let mut out = Vec::new();
    for (h, _) in factor_q(p) {
        if h.degree() == 1 {
            out.push(field.from_rational(&(-h.coeff(0))));
            continue;
        }
        if field.degree() == 1 {
            continue;
        }
        let (_, fs) = factor_over(field, &h);
        for ef in fs {
            if ef.factor.len() == 2 {
                out.push(field.neg(&ef.factor[0]));
            }
        }
    }
    out
}

/// Field automorphisms as images of the generator.
pub fn automorphisms(field: &NumberField) -> Vec<NfElem> {
    roots_in(field, &field.qpoly())
}

pub fn elem_is_rational(a: &NfElem) -> bool {
    a.iter().skip(1).all(|x| x.is_zero())
}

pub fn one_q() -> BigRational {
    BigRational::one()
}
