//! Synthetic motive data with planted motivic periods.
//!
//! Frobenius is drawn first as an E-rational matrix; frames at bar sigma are
//! then forced by the frame relation, so the data descends to E by construction.

use super::{rev_cols, MotiveData, PlantedRecord};
use crate::error::{validation, Error, Result};
use crate::scalar_algebra::emat::{self, EMat};
use crate::scalar_algebra::{Backend, FieldPair, Matrix, Scalar, ZeroTest};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

const MAX_RETRIES: u64 = 16;

#[derive(Clone, Debug)]
pub struct SyntheticSpec<S: Scalar> {
    pub label: String,
    pub n: usize,
    pub w: i64,
    /// Exponents per component, strictly decreasing.
    pub hodge: Vec<Vec<i64>>,
    pub seed: u64,
    /// Draw the lower filtration corrections of the frames at random.
    pub random_epsilon: bool,
    /// Use identity frames at sigma in the CM type instead of random ones.
    pub identity_frames: bool,
    /// Overrides of Q_{i,sigma}(tau), keyed by (tau, sigma, i) with i zero-based.
    pub planted_q: Vec<((usize, usize, usize), S)>,
    /// Frobenius at each sigma of the CM type; drawn at random when absent.
    pub frobenius: Option<Vec<EMat>>,
    pub coeff_bound: i64,
}

impl<S: Scalar> SyntheticSpec<S> {
    pub fn new(label: &str, n: usize, w: i64, hodge: Vec<Vec<i64>>, seed: u64) -> Self {
        SyntheticSpec {
            label: label.to_string(),
            n,
            w,
            hodge,
            seed,
            random_epsilon: false,
            identity_frames: false,
            planted_q: Vec::new(),
            frobenius: None,
            coeff_bound: 3,
        }
    }
}

/// Random regular Hodge exponents satisfying the reflection forced by Frobenius.
/// With `avoid_middle`, no exponent equals w/2 (an error if that is impossible).
pub fn random_hodge<S: Backend, R: Rng>(
    pair: &FieldPair<S>,
    n: usize,
    w: i64,
    spread: i64,
    avoid_middle: bool,
    rng: &mut R,
) -> Result<Vec<Vec<i64>>> {
    let na = pair.decomp.num_components();
    let mut out: Vec<Option<Vec<i64>>> = vec![None; na];
    let spread = spread.max(n as i64 + 1);
    for a in 0..na {
        if out[a].is_some() {
            continue;
        }
        let c = pair.conj_alpha[a];
        if c == a {
            if n % 2 == 1 && (w % 2 != 0 || avoid_middle) {
                return Err(Error::MiddleClass(format!(
                    "component {} is self-conjugate and the rank {} is odd",
                    a, n
                )));
            }
            // k values above w/2, reflected below
            let k = n / 2;
            let lo = w.div_euclid(2) + 1;
            let mut tops: Vec<i64> = Vec::new();
            while tops.len() < k {
                let p = rng.gen_range(lo..lo + spread);
                if !tops.contains(&p) {
                    tops.push(p);
                }
            }
            tops.sort_by(|x, y| y.cmp(x));
            let mut list = tops.clone();
            if n % 2 == 1 {
                list.push(w / 2);
            }
            list.extend(tops.iter().rev().map(|p| w - p));
            out[a] = Some(list);
        } else {
            let centre = w.div_euclid(2);
            let mut vals: Vec<i64> = Vec::new();
            while vals.len() < n {
                let p = centre + rng.gen_range(-spread..=spread);
                if avoid_middle && 2 * p == w {
                    continue;
                }
                if !vals.contains(&p) {
                    vals.push(p);
                }
            }
            vals.sort_by(|x, y| y.cmp(x));
            let refl: Vec<i64> = (0..n).map(|i| w - vals[n - 1 - i]).collect();
            out[a] = Some(vals);
            out[c] = Some(refl);
        }
    }
    Ok(out.into_iter().map(|x| x.unwrap()).collect())
}

fn nonzero_random<S: Scalar>(like: &S, rng: &mut dyn RngCore, bound: i64) -> S {
    loop {
        let x = like.random_like(rng, bound);
        if x.zero_test() == ZeroTest::NonZero {
            return x;
        }
    }
}

fn random_invertible<S: Scalar>(like: &S, n: usize, rng: &mut dyn RngCore, bound: i64) -> Matrix<S> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| like.random_like(rng, bound));
        if matches!(m.det().map(|d| d.zero_test()), Ok(ZeroTest::NonZero)) {
            return m;
        }
    }
}

fn unipotent<S: Scalar>(like: &S, n: usize, random: bool, rng: &mut dyn RngCore, bound: i64) -> Matrix<S> {
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            like.one_like()
        } else if i < j && random {
            like.random_like(rng, bound)
        } else {
            like.zero_like()
        }
    })
}

/// Build motive data realizing the frame relation with planted Q values.
pub fn synthesize_motive<S: Backend>(
    pair: &Arc<FieldPair<S>>,
    spec: &SyntheticSpec<S>,
) -> Result<MotiveData<S>> {
    let n = spec.n;
    let (nt, ns, g) = (pair.num_tau(), pair.num_sigma(), pair.half());
    let na = pair.decomp.num_components();
    if n == 0 {
        return Err(Error::Dimension("rank must be positive".into()));
    }
    if spec.hodge.len() != na || spec.hodge.iter().any(|h| h.len() != n) {
        return Err(validation("DIMENSION", "exponent table does not match components and rank"));
    }
    if spec.hodge.iter().any(|h| h.windows(2).any(|x| x[0] <= x[1])) {
        return Err(validation("REGULARITY", "exponents must be strictly decreasing"));
    }
    for a in 0..na {
        let c = pair.conj_alpha[a];
        if (0..n).any(|i| spec.hodge[c][i] != spec.w - spec.hodge[a][n - 1 - i]) {
            return Err(validation(
                "FROB_EXPONENT_REFLECTION",
                format!("component {} and its conjugate are not reflected", a),
            ));
        }
    }
    for ((t, s, i), v) in &spec.planted_q {
        if *t >= nt || *s >= ns || *i >= n {
            return Err(Error::Dimension("planted Q index out of range".into()));
        }
        if v.zero_test() != ZeroTest::NonZero {
            return Err(validation("PLANTED_Q_CONJ", "planted Q must be nonzero"));
        }
    }
    let e = &pair.e.field;
    let like = pair.one();
    let bound = spec.coeff_bound;

    for attempt in 0..MAX_RETRIES {
        let seed = spec.seed.wrapping_add(attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // separate stream so that the frames do not depend on the epsilon choice
        let mut eps_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_e951);
        let mut frob: Vec<EMat> = vec![Vec::new(); ns];
        for s in 0..g {
            let f = match &spec.frobenius {
                Some(list) => list
                    .get(s)
                    .cloned()
                    .ok_or_else(|| Error::Dimension("Frobenius list shorter than CM type".into()))?,
                None => emat::random_invertible(e, n, &mut rng, 2),
            };
            let finv = emat::inverse(e, &f)
                .map_err(|_| validation("FROB_INVOLUTION", "planted Frobenius is singular"))?;
            frob[pair.bar(s)] = finv;
            frob[s] = f;
        }

        let mut comparison: Vec<Vec<Option<Matrix<S>>>> = vec![vec![None; ns]; nt];
        let mut qtab: Vec<Vec<Vec<S>>> = vec![vec![Vec::new(); ns]; nt];
        let mut degenerate = false;
        for t in 0..nt {
            for s in 0..g {
                let sb = pair.bar(s);
                let omega = if spec.identity_frames {
                    Matrix::identity(&like, n)
                } else {
                    random_invertible(&like, n, &mut rng, bound)
                };
                let qs: Vec<S> = (0..n)
                    .map(|i| {
                        let drawn = nonzero_random(&like, &mut rng, bound);
                        spec.planted_q
                            .iter()
                            .find(|(k, _)| *k == (t, s, i))
                            .map(|(_, v)| v.clone())
                            .unwrap_or(drawn)
                    })
                    .collect();
                // omega at bar sigma: column i* is Q_i^{-1} F omega_i
                let phi = emat::eval(&pair.e, &frob[s], t);
                let dinv = Matrix::from_fn(n, n, |i, j| {
                    if i == j {
                        qs[i].inv().unwrap()
                    } else {
                        like.zero_like()
                    }
                });
                let omega_bar = rev_cols(&phi.mul(&omega)?.mul(&dinv)?);
                let qbar: Vec<S> = (0..n).map(|i| qs[n - 1 - i].inv().unwrap()).collect();
                let w_s = unipotent(&like, n, spec.random_epsilon, &mut eps_rng, bound);
                let w_sb = unipotent(&like, n, spec.random_epsilon, &mut eps_rng, bound);
                let (oi, obi) = match (omega.inverse(), omega_bar.inverse()) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => {
                        degenerate = true;
                        break;
                    }
                };
                comparison[t][s] = Some(w_s.mul(&oi)?);
                comparison[t][sb] = Some(w_sb.mul(&obi)?);
                qtab[t][s] = qs;
                qtab[t][sb] = qbar;
            }
            if degenerate {
                break;
            }
        }
        if degenerate {
            continue;
        }
        // planted overrides at bar sigma must agree with the forced values
        for ((t, s, i), v) in &spec.planted_q {
            if pair.f.cm_type.as_ref().map_or(false, |c| c.contains(s)) {
                continue;
            }
            if v.sub(&qtab[*t][*s][*i]).zero_test() != ZeroTest::Zero {
                return Err(validation(
                    "PLANTED_Q_CONJ",
                    format!(
                        "Q_{{{},{}}}({}) must equal the inverse of Q_{{{},{}}}",
                        i + 1,
                        pair.f.labels[*s],
                        pair.e.labels[*t],
                        n - i,
                        pair.f.labels[pair.bar(*s)]
                    ),
                ));
            }
        }
        let comparison: Vec<Vec<Matrix<S>>> = comparison
            .into_iter()
            .map(|r| r.into_iter().map(|m| m.unwrap()).collect())
            .collect();
        let delta: Vec<Vec<S>> = comparison
            .iter()
            .map(|r| r.iter().map(|m| m.det()).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let no_middle = !spec.hodge.iter().flatten().any(|&p| 2 * p == spec.w);
        return Ok(MotiveData {
            pair: pair.clone(),
            label: spec.label.clone(),
            n,
            w: spec.w,
            hodge: spec.hodge.clone(),
            regular: true,
            no_middle_class: no_middle,
            comparison,
            frobenius: frob,
            dr_basis: format!("{}:w~", spec.label),
            betti_basis: format!("{}:e", spec.label),
            planted: Some(PlantedRecord {
                seed,
                random_epsilon: spec.random_epsilon,
                q: qtab,
                basis_multiplier: vec![vec![like.one_like(); ns]; nt],
                delta,
            }),
        });
    }
    Err(Error::Singular)
}
