//! Matrices with entries in a number field.

use super::backend::Backend;
use super::embed::EmbeddingSet;
use super::matrix::Matrix;
use super::numfield::{NfElem, NumberField};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

pub type EMat = Vec<Vec<NfElem>>;

pub fn identity(k: &NumberField, n: usize) -> EMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect())
        .collect()
}

pub fn mul(k: &NumberField, a: &EMat, b: &EMat) -> EMat {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = k.zero();
                    for l in 0..inner {
                        acc = k.add(&acc, &k.mul(&a[i][l], &b[l][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn kron(k: &NumberField, a: &EMat, b: &EMat) -> EMat {
    let (n, m) = (a.len(), b.len());
    (0..n * m)
        .map(|i| {
            (0..n * m)
                .map(|j| k.mul(&a[i / m][j / m], &b[i % m][j % m]))
                .collect()
        })
        .collect()
}

/// Reversal conjugation J A J.
pub fn reverse(a: &EMat) -> EMat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[n - 1 - i][n - 1 - j].clone()).collect())
        .collect()
}

pub fn inverse(k: &NumberField, a: &EMat) -> Result<EMat> {
    let n = a.len();
    let mut m: Vec<Vec<NfElem>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { k.one() } else { k.zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !k.is_zero(&m[i][c])).ok_or(Error::Singular)?;
        m.swap(p, c);
        let inv = k.inv(&m[c][c]).unwrap();
        for x in m[c].iter_mut() {
            *x = k.mul(x, &inv);
        }
        for i in 0..n {
            if i != c && !k.is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                let pivot_row = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = k.sub(x, &k.mul(&f, y));
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn is_identity(k: &NumberField, a: &EMat) -> bool {
    *a == identity(k, a.len())
}

pub fn eval<S: Backend>(emb: &EmbeddingSet<S>, a: &EMat, tau: usize) -> Matrix<S> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    Matrix::from_fn(n, m, |i, j| emb.eval(&a[i][j], tau))
}

/// A random invertible matrix with small integral coordinates.
pub fn random_invertible<R: Rng>(k: &NumberField, n: usize, rng: &mut R, bound: i64) -> EMat {
    loop {
        let a: EMat = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        (0..k.degree())
                            .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-bound..=bound))))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        if inverse(k, &a).is_ok() {
            return a;
        }
    }
}

pub fn to_strings(a: &EMat) -> Vec<Vec<Vec<String>>> {
    a.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.iter().map(|c| c.to_string()).collect())
                .collect()
        })
        .collect()
}

pub fn from_strings(k: &NumberField, s: &[Vec<Vec<String>>]) -> Result<EMat> {
    s.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let mut v: Vec<BigRational> = x
                        .iter()
                        .map(|c| super::numfield::parse_rational(c))
                        .collect::<Result<_>>()?;
                    if v.len() > k.degree() {
                        return Err(Error::Parse("field element has too many coordinates".into()));
                    }
                    v.resize(k.degree(), BigRational::zero());
                    Ok(v)
                })
                .collect()
        })
        .collect()
}
