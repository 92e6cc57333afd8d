//! Factorization in Q[x]: squarefree decomposition, a small prime with few
//! modular factors, quadratic Hensel lifting, and subset recombination.

use super::modp::{self, Fp};
use super::qpoly::{qz, QPoly};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type ZPoly = Vec<BigInt>;

fn ztrim(mut a: ZPoly) -> ZPoly {
    while a.last().map_or(false, |x| x.is_zero()) {
        a.pop();
    }
    a
}

fn zmod(a: &ZPoly, m: &BigInt) -> ZPoly {
    ztrim(a.iter().map(|x| x.mod_floor(m)).collect())
}

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    ztrim(r)
}

fn zmul_mod(a: &ZPoly, b: &ZPoly, m: &BigInt) -> ZPoly {
    zmod(&zmul(a, b), m)
}

fn zadd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    ztrim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn zsub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    ztrim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

/// Division by a monic polynomial modulo m.
fn zdivrem_monic(a: &ZPoly, b: &ZPoly, m: &BigInt) -> (ZPoly, ZPoly) {
    let db = b.len() - 1;
    let mut r = zmod(a, m);
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut qv = vec![BigInt::zero(); r.len() - db];
    for k in (0..qv.len()).rev() {
        let t = r[k + db].mod_floor(m);
        if !t.is_zero() {
            for (j, y) in b.iter().enumerate() {
                r[k + j] = (&r[k + j] - &t * y).mod_floor(m);
            }
        }
        qv[k] = t;
    }
    r.truncate(db);
    (ztrim(qv), zmod(&r, m))
}

fn to_fp(a: &ZPoly, p: u64) -> Fp {
    let pb = BigInt::from(p);
    modp::trim(
        a.iter()
            .map(|x| x.mod_floor(&pb).to_u64().unwrap())
            .collect(),
    )
}

fn from_fp(a: &Fp) -> ZPoly {
    a.iter().map(|&x| BigInt::from(x)).collect()
}

fn symmetric(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m >> 1;
    ztrim(
        a.iter()
            .map(|x| {
                let r = x.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn content(a: &ZPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

fn primitive(a: &ZPoly) -> ZPoly {
    let mut g = content(a);
    if g.is_zero() {
        return a.clone();
    }
    if a.last().unwrap().is_negative() {
        g = -g;
    }
    a.iter().map(|x| x / &g).collect()
}

/// Exact division over Z; None if it does not divide.
fn zdiv_exact(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    let mut r = a.clone();
    if r.len() < b.len() {
        return None;
    }
    let mut qv = vec![BigInt::zero(); r.len() - db];
    for k in (0..qv.len()).rev() {
        let (t, rr) = r[k + db].div_rem(lb);
        if !rr.is_zero() {
            return None;
        }
        if !t.is_zero() {
            for (j, y) in b.iter().enumerate() {
                r[k + j] -= &t * y;
            }
        }
        qv[k] = t;
    }
    if r.iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(ztrim(qv))
}

fn lift_pair(
    f: &ZPoly,
    g: &ZPoly,
    h: &ZPoly,
    s: &ZPoly,
    t: &ZPoly,
    m: &BigInt,
) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    // f = g*h mod m, h monic, s*g + t*h = 1 mod m; lift to m^2
    let m2 = m * m;
    let e = zmod(&zsub(f, &zmul(g, h)), &m2);
    let (qq, r) = zdivrem_monic(&zmul_mod(s, &e, &m2), h, &m2);
    let g2 = zmod(&zadd(&zadd(g, &zmul(t, &e)), &zmul(&qq, g)), &m2);
    let h2 = zmod(&zadd(h, &r), &m2);
    let b = zmod(
        &zsub(&zadd(&zmul(s, &g2), &zmul(t, &h2)), &vec![BigInt::one()]),
        &m2,
    );
    let (c, d) = zdivrem_monic(&zmul_mod(s, &b, &m2), &h2, &m2);
    let s2 = zmod(&zsub(s, &d), &m2);
    let t2 = zmod(&zsub(&zsub(t, &zmul(t, &b)), &zmul(&c, &g2)), &m2);
    (g2, h2, s2, t2)
}

/// Lift a factorization f = prod(factors) mod p of a monic f to modulus >= bound.
fn multifactor_lift(f: &ZPoly, factors: &[Fp], p: u64, bound: &BigInt) -> (Vec<ZPoly>, BigInt) {
    let mut modulus = BigInt::from(p);
    while &modulus < bound {
        modulus = &modulus * &modulus;
    }
    let lifted = lift_rec(f, factors, p, &modulus);
    (lifted, modulus)
}

fn lift_rec(f: &ZPoly, factors: &[Fp], p: u64, target: &BigInt) -> Vec<ZPoly> {
    if factors.len() == 1 {
        return vec![zmod(f, target)];
    }
    let k = factors.len() / 2;
    let gp = factors[..k]
        .iter()
        .fold(vec![1u64], |a, b| modp::mul(&a, b, p));
    let hp = factors[k..]
        .iter()
        .fold(vec![1u64], |a, b| modp::mul(&a, b, p));
    // h must be monic for the division steps; both products are monic
    let (_, sp, tp) = modp::xgcd(&gp, &hp, p);
    let mut m = BigInt::from(p);
    let mut g = from_fp(&gp);
    let mut h = from_fp(&hp);
    let mut s = from_fp(&sp);
    let mut t = from_fp(&tp);
    while &m < target {
        let r = lift_pair(f, &g, &h, &s, &t, &m);
        g = r.0;
        h = r.1;
        s = r.2;
        t = r.3;
        m = &m * &m;
    }
    g = zmod(&g, target);
    h = zmod(&h, target);
    let mut out = lift_rec(&g, &factors[..k], p, target);
    out.extend(lift_rec(&h, &factors[k..], p, target));
    out
}

fn isqrt_ceil(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    if &(&r * &r) < n {
        r + 1
    } else {
        r
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Irreducible factors over Z of a primitive squarefree polynomial.
pub fn factor_squarefree_z(f: &ZPoly) -> Vec<ZPoly> {
    let f = primitive(f);
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f];
    }
    let lc = f.last().unwrap().clone();
    let df: ZPoly = ztrim(
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| a * BigInt::from(i))
            .collect(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d ^ n as u64);
    let mut best: Option<(u64, Vec<Fp>)> = None;
    let mut tried = 0;
    for p in modp::small_primes(3, 400) {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = to_fp(&f, p);
        let g = modp::gcd(&fp, &to_fp(&df, p), p);
        if g.len() > 1 {
            continue;
        }
        let fs = modp::factor_squarefree(&fp, p, &mut rng);
        if fs.len() == 1 {
            return vec![f];
        }
        if best.as_ref().map_or(true, |b| fs.len() < b.1.len()) {
            best = Some((p, fs));
        }
        tried += 1;
        if tried >= 6 {
            break;
        }
    }
    let (p, modfactors) = best.expect("no suitable prime");
    let norm2: BigInt = f.iter().map(|a| a * a).sum();
    let bound = (BigInt::one() << (n + 1)) * isqrt_ceil(&norm2) * lc.abs() * 2 + 1;
    let pb = BigInt::from(p);
    let lc_inv = lc.modpow(&(&pb - 2), &pb);
    let mut modulus = pb.clone();
    while modulus < bound {
        modulus = &modulus * &modulus;
    }
    let lc_inv_big = lc.modinv(&modulus).unwrap_or(lc_inv);
    let fmonic = zmod(&f.iter().map(|a| a * &lc_inv_big).collect(), &modulus);
    let (mut lifted, modulus) = multifactor_lift(&fmonic, &modfactors, p, &bound);

    let mut result = Vec::new();
    let mut cur = f.clone();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = false;
        for subset in combinations(lifted.len(), size) {
            let l = cur.last().unwrap().clone();
            let prod = subset.iter().fold(vec![BigInt::from(l.clone())], |a, &i| {
                zmul_mod(&a, &lifted[i], &modulus)
            });
            let cand = primitive(&symmetric(&prod, &modulus));
            if cand.len() < 2 {
                continue;
            }
            if let Some(quot) = zdiv_exact(&cur, &cand) {
                result.push(cand);
                cur = quot;
                let keep: Vec<ZPoly> = lifted
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, g)| g.clone())
                    .collect();
                lifted = keep;
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if cur.len() > 1 {
        result.push(primitive(&cur));
    }
    result
}

/// Monic irreducible factors over Q with multiplicities, sorted by degree then coefficients.
pub fn factor_q(f: &QPoly) -> Vec<(QPoly, u32)> {
    let mut out = Vec::new();
    for (g, mult) in f.squarefree_decomposition() {
        let z = g.primitive_part();
        for h in factor_squarefree_z(&z) {
            out.push((QPoly::from_ints(&h).monic(), mult));
        }
    }
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| cmp_poly(&a.0, &b.0))
    });
    out
}

pub fn cmp_poly(a: &QPoly, b: &QPoly) -> std::cmp::Ordering {
    let n = a.coeffs().len().max(b.coeffs().len());
    for i in (0..n).rev() {
        let c = a.coeff(i).cmp(&b.coeff(i));
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    std::cmp::Ordering::Equal
}

pub fn is_irreducible(f: &QPoly) -> bool {
    let fs = factor_q(f);
    fs.len() == 1 && fs[0].1 == 1
}

#[allow(dead_code)]
fn sign_of(a: &BigInt) -> Sign {
    a.sign()
}

#[allow(dead_code)]
fn as_q(a: &ZPoly) -> QPoly {
    QPoly::new(a.iter().map(qz).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prod(fs: &[(QPoly, u32)]) -> QPoly {
        fs.iter()
            .fold(QPoly::one(), |a, (g, m)| a.mul(&g.pow(*m)))
    }

    #[test]
    fn cyclotomic_x12_minus_1() {
        let f = QPoly::from_i64(&[-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        let fs = factor_q(&f);
        let degs: Vec<usize> = fs.iter().map(|(g, _)| g.degree()).collect();
        assert_eq!(degs, vec![1, 1, 2, 2, 2, 4]);
        assert_eq!(prod(&fs), f);
    }

    #[test]
    fn swinnerton_dyer_irreducible() {
        // minimal polynomial of sqrt2 + sqrt3: splits mod every prime
        let f = QPoly::from_i64(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&f));
        let g = QPoly::from_i64(&[-2, 0, 0, 1]);
        assert!(is_irreducible(&g));
    }

    #[test]
    fn non_monic_product() {
        let a = QPoly::from_i64(&[3, 0, 2]);
        let b = QPoly::from_i64(&[-1, 5, 0, 7]);
        let f = a.mul(&b).mul(&QPoly::from_i64(&[1, 3]));
        let fs = factor_q(&f);
        assert_eq!(fs.len(), 3);
        assert_eq!(prod(&fs), f.monic());
    }
}
