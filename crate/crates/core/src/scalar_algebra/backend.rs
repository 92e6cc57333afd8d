//! Scalar backends: how roots of rational polynomials become scalars.

use super::ball::{bits_for_digits, Ball};
use super::cyclo::{cyclotomic_poly, Cyclo, CycloField};
use super::numfield::{parse_rational, roots_in, NumberField};
use super::qpoly::QPoly;
use super::recognize::{recognize_exact, recognize_float, Membership};
use super::scalar::Scalar;
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::Zero;
use std::cmp::Ordering;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendSpec {
    Exact { conductor: u32 },
    Float { digits: u32 },
}

impl BackendSpec {
    pub fn describe(&self) -> String {
        match self {
            BackendSpec::Exact { conductor } => format!("exact N={}", conductor),
            BackendSpec::Float { digits } => format!("float {} digits", digits),
        }
    }
}

pub trait Backend: Scalar {
    type Ctx: Clone + Send + Sync + std::fmt::Debug;

    fn spec(ctx: &Self::Ctx) -> BackendSpec;
    fn rational(ctx: &Self::Ctx, a: &BigRational) -> Self;
    /// All complex roots of a squarefree rational polynomial, canonically ordered.
    fn roots(ctx: &Self::Ctx, p: &QPoly, label: &str) -> Result<Vec<Self>>;
    /// Inverse of `render`.
    fn parse(ctx: &Self::Ctx, s: &str) -> Result<Self>;
    /// Is `target` a rational combination of the vectors in `span`?
    fn recognize(target: &[Self], span: &[Vec<Self>]) -> Membership;
}

/// Order by real part, then imaginary part, comparing approximations.
pub fn canonical_cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    let (ar, ai) = a.approx();
    let (br, bi) = b.approx();
    let scale = 1.0 + ar.abs().max(br.abs());
    if (ar - br).abs() > 1e-9 * scale {
        ar.partial_cmp(&br).unwrap_or(Ordering::Equal)
    } else {
        ai.partial_cmp(&bi).unwrap_or(Ordering::Equal)
    }
}

impl Backend for Cyclo {
    type Ctx = Arc<CycloField>;

    fn spec(ctx: &Self::Ctx) -> BackendSpec {
        BackendSpec::Exact { conductor: ctx.n }
    }

    fn rational(ctx: &Self::Ctx, a: &BigRational) -> Self {
        Cyclo::from_rational(ctx, a)
    }

    fn roots(ctx: &Self::Ctx, p: &QPoly, label: &str) -> Result<Vec<Self>> {
        let host = NumberField {
            label: format!("Q(zeta_{})", ctx.n),
            poly: cyclotomic_poly(ctx.n).coeffs().to_vec(),
        };
        let mut out: Vec<Cyclo> = roots_in(&host, p)
            .into_iter()
            .map(|r| Cyclo::from_coords(ctx, &r))
            .collect();
        if out.len() != p.degree() {
            return Err(Error::NotEmbeddable {
                field: label.to_string(),
                conductor: ctx.n,
            });
        }
        out.sort_by(canonical_cmp);
        Ok(out)
    }

    fn parse(ctx: &Self::Ctx, s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("bad cyclotomic scalar '{}'", s)))?;
        let mut c: Vec<BigRational> = if inner.trim().is_empty() {
            vec![]
        } else {
            inner
                .split(',')
                .map(parse_rational)
                .collect::<Result<_>>()?
        };
        if c.len() > ctx.phi {
            return Err(Error::Parse(format!(
                "cyclotomic scalar '{}' has more than {} coordinates",
                s, ctx.phi
            )));
        }
        c.resize(ctx.phi, BigRational::zero());
        Ok(Cyclo::from_coords(ctx, &c))
    }

    fn recognize(target: &[Self], span: &[Vec<Self>]) -> Membership {
        recognize_exact(target, span)
    }
}

impl Backend for Ball {
    /// Working precision in bits.
    type Ctx = u32;

    fn spec(ctx: &Self::Ctx) -> BackendSpec {
        BackendSpec::Float {
            digits: ((*ctx as f64 - 64.0) / std::f64::consts::LOG2_10).round() as u32,
        }
    }

    fn rational(ctx: &Self::Ctx, a: &BigRational) -> Self {
        Ball::from_rationals(a, &BigRational::zero(), *ctx)
    }

    fn roots(ctx: &Self::Ctx, p: &QPoly, label: &str) -> Result<Vec<Self>> {
        let mut out = float_roots(p, *ctx)
            .ok_or_else(|| Error::InvalidField(format!("{}: root isolation failed", label)))?;
        out.sort_by(canonical_cmp);
        Ok(out)
    }

    fn parse(ctx: &Self::Ctx, s: &str) -> Result<Self> {
        // "re|im|rad" with decimal or rational parts
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bad ball '{}'", s)));
        }
        let re = parse_decimal(parts[0])?;
        let im = parse_decimal(parts[1])?;
        let rad: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad radius in '{}'", s)))?;
        let b = Ball::from_rationals(&re, &im, *ctx);
        Ok(b.with_radius(b.rad + rad))
    }

    fn recognize(target: &[Self], span: &[Vec<Self>]) -> Membership {
        recognize_float(target, span, 48)
    }
}

pub fn float_ctx(digits: u32) -> u32 {
    bits_for_digits(digits)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.contains('/') || !t.contains('.') {
        return parse_rational(t);
    }
    let neg = t.starts_with('-');
    let body = t.trim_start_matches(['-', '+']);
    let (ip, fp) = body.split_once('.').unwrap();
    let digits = format!("{}{}", ip, fp);
    let n: num_bigint::BigInt = digits
        .parse()
        .map_err(|_| Error::Parse(format!("bad decimal '{}'", s)))?;
    let d = num_bigint::BigInt::from(10u32).pow(fp.len() as u32);
    let v = BigRational::new(n, d);
    Ok(if neg { -v } else { v })
}

/// Durand-Kerner in double precision, then Newton refinement with balls.
/// Each returned ball is certified to contain a root (radius n|f/f'|).
fn float_roots(p: &QPoly, prec: u32) -> Option<Vec<Ball>> {
    let p = p.monic();
    let n = p.degree();
    let cf: Vec<(f64, f64)> = p
        .coeffs()
        .iter()
        .map(|c| (num_traits::ToPrimitive::to_f64(c).unwrap_or(0.0), 0.0))
        .collect();
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let a = 0.4 + 0.9 * k as f64;
            let r = 1.0 + cf.iter().map(|c| c.0.abs()).fold(0.0, f64::max);
            let r = r.min(50.0);
            (r * a.cos() * 0.7, r * a.sin() * 0.7)
        })
        .collect();
    let cmul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let cdiv = |a: (f64, f64), b: (f64, f64)| {
        let d = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
    };
    let eval = |x: (f64, f64)| {
        let mut acc = (0.0, 0.0);
        for c in cf.iter().rev() {
            acc = cmul(acc, x);
            acc = (acc.0 + c.0, acc.1 + c.1);
        }
        acc
    };
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den = cmul(den, (z[i].0 - z[j].0, z[i].1 - z[j].1));
                }
            }
            let step = cdiv(eval(z[i]), den);
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            delta = delta.max(step.0.hypot(step.1));
        }
        if delta < 1e-15 {
            break;
        }
    }
    let dp = p.derivative();
    let ball_eval = |q: &QPoly, x: &Ball| {
        let mut acc = x.zero_like();
        for c in q.coeffs().iter().rev() {
            acc = acc.mul(x).add(&x.from_rational_like(c));
        }
        acc
    };
    let mut out = Vec::with_capacity(n);
    for zi in z {
        let mut x = Ball::from_f64(zi.0, zi.1, prec);
        let iters = (prec as f64 / 40.0).log2().ceil().max(1.0) as usize + 3;
        for _ in 0..iters {
            let fx = ball_eval(&p, &x.midpoint());
            let dfx = ball_eval(&dp, &x.midpoint());
            let step = fx.midpoint().div(&dfx.midpoint()).ok()?;
            x = x.midpoint().sub(&step.midpoint()).midpoint();
        }
        let fx = ball_eval(&p, &x);
        let dfx = ball_eval(&dp, &x);
        let bound = n as f64 * fx.abs_upper() / (dfx.mid_abs() - dfx.rad).max(f64::MIN_POSITIVE);
        out.push(x.with_radius(bound));
    }
    // certified separation
    for i in 0..n {
        for j in i + 1..n {
            let d = out[i].sub(&out[j]);
            if d.mid_abs() <= out[i].rad + out[j].rad {
                return None;
            }
        }
    }
    Some(out)
}
