//! Polynomials over a small prime field, used for modular factorization.

use rand::Rng;

pub type Fp = Vec<u64>;

pub fn trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn add(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn sub(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn mul(a: &Fp, b: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    trim(r)
}

pub fn scale(a: &Fp, s: u64, p: u64) -> Fp {
    trim(a.iter().map(|&x| x * s % p).collect())
}

pub fn divrem(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    assert!(!b.is_empty());
    let db = b.len() - 1;
    let li = inv_mod(*b.last().unwrap(), p);
    let mut r = a.clone();
    if r.len() < b.len() {
        return (vec![], trim(r));
    }
    let mut qv = vec![0u64; r.len() - db];
    for k in (0..qv.len()).rev() {
        let t = r[k + db] * li % p;
        if t != 0 {
            for (j, &y) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + p - t * y % p) % p;
            }
        }
        qv[k] = t;
    }
    r.truncate(db);
    (trim(qv), trim(r))
}

pub fn rem(a: &Fp, b: &Fp, p: u64) -> Fp {
    divrem(a, b, p).1
}

pub fn monic(a: &Fp, p: u64) -> Fp {
    match a.last() {
        None => vec![],
        Some(&l) => scale(a, inv_mod(l, p), p),
    }
}

pub fn gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// (g, s, t) with s*a + t*b = g monic.
pub fn xgcd(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp, Fp) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (qq, r) = divrem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let s = sub(&s0, &mul(&qq, &s1, p), p);
        s0 = std::mem::replace(&mut s1, s);
        let t = sub(&t0, &mul(&qq, &t1, p), p);
        t0 = std::mem::replace(&mut t1, t);
    }
    let li = inv_mod(*r0.last().unwrap(), p);
    (scale(&r0, li, p), scale(&s0, li, p), scale(&t0, li, p))
}

pub fn derivative(a: &Fp, p: u64) -> Fp {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &x)| x * (i as u64 % p) % p)
            .collect(),
    )
}

pub fn powmod_poly(base: &Fp, mut e: u128, m: &Fp, p: u64) -> Fp {
    let mut r = vec![1u64];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = rem(&mul(&r, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        e >>= 1;
    }
    r
}

fn powmod_big(base: &Fp, p: u64, k: usize, extra_half: bool, m: &Fp) -> Fp {
    // base^(p^k) or base^((p^k - 1)/2) without overflowing the exponent
    if !extra_half {
        let mut r = rem(base, m, p);
        for _ in 0..k {
            r = powmod_poly(&r, p as u128, m, p);
        }
        r
    } else {
        // (p^k - 1)/2 = (p-1)/2 * (1 + p + ... + p^{k-1})
        let mut acc = vec![1u64];
        let mut cur = rem(base, m, p);
        for _ in 0..k {
            acc = rem(&mul(&acc, &cur, p), m, p);
            cur = powmod_poly(&cur, p as u128, m, p);
        }
        powmod_poly(&acc, ((p - 1) / 2) as u128, m, p)
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn ddf(f: &Fp, p: u64) -> Vec<(Fp, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let mut d = 0;
    while f.len() > 1 && 2 * (d + 1) <= f.len() - 1 {
        d += 1;
        h = powmod_poly(&h, p as u128, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if g.len() > 1 {
            f = divrem(&f, &g, p).0;
            h = rem(&h, &f, p);
            out.push((g, d));
        }
    }
    if f.len() > 1 {
        let deg = f.len() - 1;
        out.push((monic(&f, p), deg));
    }
    out
}

/// Equal-degree splitting (Cantor-Zassenhaus), p odd.
pub fn edf<R: Rng>(f: &Fp, d: usize, p: u64, rng: &mut R) -> Vec<Fp> {
    let n = f.len() - 1;
    if n == d {
        return vec![monic(f, p)];
    }
    loop {
        let a: Fp = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() <= 1 {
            continue;
        }
        let g0 = gcd(&a, f, p);
        let g = if g0.len() > 1 {
            g0
        } else {
            let b = powmod_big(&a, p, d, true, f);
            gcd(&sub(&b, &vec![1u64], p), f, p)
        };
        if g.len() > 1 && g.len() < f.len() {
            let h = divrem(f, &g, p).0;
            let mut r = edf(&g, d, p, rng);
            r.extend(edf(&monic(&h, p), d, p, rng));
            return r;
        }
    }
}

pub fn factor_squarefree<R: Rng>(f: &Fp, p: u64, rng: &mut R) -> Vec<Fp> {
    let f = monic(f, p);
    let mut out = Vec::new();
    for (g, d) in ddf(&f, p) {
        out.extend(edf(&g, d, p, rng));
    }
    out.sort();
    out
}

pub fn small_primes(from: u64, count: usize) -> Vec<u64> {
    let mut v = Vec::new();
    let mut c = from.max(3);
    while v.len() < count {
        if (2..).take_while(|d| d * d <= c).all(|d| c % d != 0) {
            v.push(c);
        }
        c += 1;
    }
    v
}
