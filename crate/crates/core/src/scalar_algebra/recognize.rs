//! Deciding whether a tau-indexed vector lies in the rational span of given vectors.

use super::ball::Ball;
use super::cyclo::Cyclo;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum Membership {
    /// Rational coordinates against the spanning family.
    Member { coords: Vec<String>, heuristic: bool },
    Absent,
    Unknown,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Membership::Member { heuristic: false, .. } => "member",
            Membership::Member { heuristic: true, .. } => "member(heuristic)",
            Membership::Absent => "absent",
            Membership::Unknown => "unknown",
        }
    }
}

/// Gaussian elimination over Q; returns one solution of A c = b or None.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let inv = m[r][c].recip();
        for k in c..=cols {
            m[r][k] = &m[r][k] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=cols {
                    let t = &f * &m[r][k];
                    m[i][k] = &m[i][k] - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

pub fn recognize_exact(target: &[Cyclo], span: &[Vec<Cyclo>]) -> Membership {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (t, x) in target.iter().enumerate() {
        let xc = x.coords();
        let sc: Vec<Vec<BigRational>> = span.iter().map(|v| v[t].coords()).collect();
        for k in 0..xc.len() {
            a.push(sc.iter().map(|c| c[k].clone()).collect());
            b.push(xc[k].clone());
        }
    }
    match solve_rational(&a, &b) {
        Some(c) => Membership::Member {
            coords: c.iter().map(|v| v.to_string()).collect(),
            heuristic: false,
        },
        None => Membership::Absent,
    }
}

/// LLL reduction of integer row vectors (delta = 3/4), exact rational Gram-Schmidt.
pub fn lll(mut b: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = b.len();
    if n == 0 {
        return b;
    }
    let delta = BigRational::new(3.into(), 4.into());
    let gso = |b: &Vec<Vec<BigInt>>| {
        let n = b.len();
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut bstar: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut norms = vec![BigRational::zero(); n];
        for i in 0..n {
            let mut v: Vec<BigRational> = b[i].iter().map(|x| BigRational::from_integer(x.clone())).collect();
            for j in 0..i {
                if norms[j].is_zero() {
                    continue;
                }
                let num: BigRational = b[i]
                    .iter()
                    .zip(&bstar[j])
                    .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
                    .sum();
                mu[i][j] = num / &norms[j];
                for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                    *vk = &*vk - &mu[i][j] * bk;
                }
            }
            norms[i] = v.iter().map(|x| x * x).sum();
            bstar.push(v);
        }
        (mu, norms)
    };
    let (mut mu, mut norms) = gso(&b);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if !r.is_zero() {
                let ri = r.to_integer();
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &ri * y;
                }
                for l in 0..=j {
                    let t = if l == j { BigRational::one() } else { mu[j][l].clone() };
                    mu[k][l] = &mu[k][l] - &r * t;
                }
            }
        }
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            let g = gso(&b);
            mu = g.0;
            norms = g.1;
            k = (k - 1).max(1);
        }
    }
    b
}

fn scaled(x: &Ball, scale_bits: u32) -> (BigInt, BigInt) {
    let conv = |d: &super::ball::Dyadic| -> BigInt {
        let sh = d.e + scale_bits as i64;
        if sh >= 0 {
            &d.m << sh as usize
        } else {
            &d.m >> (-sh) as usize
        }
    };
    (conv(&x.re), conv(&x.im))
}

/// Integer-relation search; a positive answer is heuristic, a negative one is "unknown".
pub fn recognize_float(target: &[Ball], span: &[Vec<Ball>], height_bits: u32) -> Membership {
    let prec = target.first().map_or(128, |b| b.prec);
    let worst_rad = target
        .iter()
        .chain(span.iter().flatten())
        .map(|b| b.rad)
        .fold(0.0f64, f64::max);
    // usable bits: below the error radius
    let usable = if worst_rad > 0.0 {
        (-worst_rad.log2()).floor().max(0.0) as u32
    } else {
        prec.saturating_sub(16)
    };
    let scale_bits = usable.saturating_sub(8).min(prec);
    if scale_bits < 3 * height_bits {
        return Membership::Unknown;
    }
    let m = span.len() + 1;
    let t = target.len();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let v = if i == 0 { target } else { &span[i - 1][..] };
        let mut row = vec![BigInt::zero(); m];
        row[i] = BigInt::one();
        for x in v.iter().take(t) {
            let (a, b) = scaled(x, scale_bits);
            row.push(a);
            row.push(b);
        }
        rows.push(row);
    }
    let red = lll(rows);
    let bound = BigInt::one() << height_bits as usize;
    let tol = BigInt::from(m as i64 * 4 + 4) * &bound;
    let mut best: Option<Vec<BigInt>> = None;
    for r in red {
        let c0 = &r[0];
        if c0.is_zero() {
            continue;
        }
        if r[..m].iter().any(|c| c.abs() > bound) {
            continue;
        }
        if r[m..].iter().any(|x| x.abs() > tol) {
            continue;
        }
        let better = best
            .as_ref()
            .map_or(true, |b| c0.abs() < b[0].abs());
        if better {
            best = Some(r[..m].to_vec());
        }
    }
    match best {
        Some(c) => {
            let c0 = BigRational::from_integer(c[0].clone());
            let coords = c[1..]
                .iter()
                .map(|x| (-BigRational::from_integer(x.clone()) / &c0).to_string())
                .collect();
            Membership::Member {
                coords,
                heuristic: true,
            }
        }
        None => Membership::Unknown,
    }
}
