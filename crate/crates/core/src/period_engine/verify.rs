//! Exact checks of the factorization statements: conjugacy, tensor products,
//! restriction of scalars and independence of the frame corrections.

use super::{level, local_deligne_period, provenance, q_cumulative, sigma_determinant_period, PeriodValue};
use crate::error::{Error, Result};
use crate::hodge_combinatorics::{split_indices, tensor_two_pi_i_exponent};
use crate::motive_model::{
    conjugate, rebase, restriction_of_scalars, synthesize_motive, tensor, BasisChange, MotiveData, RestrictionPackage,
    SyntheticSpec,
};
use crate::scalar_algebra::decomp::eval_tensor;
use crate::scalar_algebra::emat;
use crate::scalar_algebra::numfield::NfElem;
use crate::scalar_algebra::{Backend, FieldPair, Matrix, Membership, QPoly, Scalar, ZeroTest};
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};
use std::sync::Arc;

fn all_zero(z: &[ZeroTest]) -> bool {
    z.iter().all(|x| *x == ZeroTest::Zero)
}

fn vec_equal<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.len() == b.len() && all_zero(&a.iter().zip(b).map(|(x, y)| x.sub(y).zero_test()).collect::<Vec<_>>())
}

fn render<S: Scalar>(v: &[S]) -> Vec<String> {
    v.iter().map(|x| x.render()).collect()
}

#[derive(Clone, Debug)]
pub struct ConjugacyReport<S: Scalar> {
    pub sigma: usize,
    pub j: usize,
    /// Q^{(n-j)}(M^c, sigma) / Q^{(j)}(M, sigma).
    pub ratio: PeriodValue<S>,
    pub membership: Membership,
    /// The ratio predicted from the recorded basis change, when known.
    pub expected: Option<Vec<S>>,
    pub matches_expected: Option<bool>,
}

impl<S: Scalar> ConjugacyReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "sigma": self.sigma,
            "j": self.j,
            "ratio": self.ratio.to_json(),
            "membership": self.membership,
            "expected": self.expected.as_ref().map(|e| render(e)),
            "matches_expected": self.matches_expected,
        })
    }
}

/// Compare Q^{(n-j)}(M^c, sigma) with Q^{(j)}(M, sigma). An optional Betti
/// change applied to M^c scales the ratio by det P_sigma.
pub fn verify_conjugacy<S: Backend>(
    m: &MotiveData<S>,
    sigma: usize,
    j: usize,
    twist: Option<&BasisChange>,
) -> Result<ConjugacyReport<S>> {
    if j > m.n {
        return Err(Error::Dimension(format!("j = {} exceeds the rank {}", j, m.n)));
    }
    let mut mc = conjugate(m)?;
    let mut expected = Some(vec![m.pair.one(); m.pair.num_tau()]);
    if let Some(c) = twist {
        mc = rebase(&mc, c)?;
        expected = match (&c.betti, &c.dr) {
            (Some(ps), None) => Some(
                (0..m.pair.num_tau())
                    .map(|t| emat::eval(&m.pair.e, &ps[sigma], t).det())
                    .collect::<Result<Vec<_>>>()?,
            ),
            (None, None) => expected,
            _ => None,
        };
    }
    let lhs = q_cumulative(&mc, sigma, m.n - j)?;
    let rhs = q_cumulative(m, sigma, j)?;
    let ratio = lhs.div(&rhs)?;
    let membership = m.pair.recognize_e_sigma(&ratio.tau_components, sigma);
    let matches_expected = expected.as_ref().map(|e| vec_equal(e, &ratio.tau_components));
    Ok(ConjugacyReport { sigma, j, ratio, membership, expected, matches_expected })
}

#[derive(Clone, Debug)]
pub struct TwistCheck<S: Scalar> {
    pub ratio: PeriodValue<S>,
    pub factor: Vec<S>,
    pub matches: bool,
    pub membership: Membership,
}

#[derive(Clone, Debug)]
pub struct TensorReport<S: Scalar> {
    pub sigma: usize,
    /// Per tau: (sp(., M; M'), sp(., M'; M)).
    pub split: Vec<(Vec<usize>, Vec<usize>)>,
    /// c^+(M (x) M') divided by the product formula; the 2 pi i exponents cancel.
    pub ratio: PeriodValue<S>,
    pub membership: Membership,
    pub twisted: Option<TwistCheck<S>>,
}

impl<S: Scalar> TensorReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "sigma": self.sigma,
            "split_indices": self.split.iter().map(|(a, b)| json!({"M": a, "M'": b})).collect::<Vec<_>>(),
            "ratio": self.ratio.to_json(),
            "membership": self.membership,
            "twisted": self.twisted.as_ref().map(|t| json!({
                "ratio": t.ratio.to_json(),
                "factor": render(&t.factor),
                "matches": t.matches,
                "membership": t.membership,
            })),
        })
    }

    pub fn passed(&self) -> bool {
        self.membership.is_member() && self.twisted.as_ref().map_or(true, |t| t.matches && t.membership.is_member())
    }
}

/// The product formula sum_j Q^{(j)}(M)^{sp_j} prod_k Q^{(k)}(M')^{sp'_k}
/// times (2 pi i)^{-nn'(n+n'-2)/2}, evaluated per tau.
pub fn tensor_product_formula<S: Backend>(
    m: &MotiveData<S>,
    m2: &MotiveData<S>,
    sigma: usize,
) -> Result<(PeriodValue<S>, Vec<(Vec<usize>, Vec<usize>)>)> {
    let nt = m.pair.num_tau();
    let qm = (0..=m.n).map(|j| q_cumulative(m, sigma, j)).collect::<Result<Vec<_>>>()?;
    let qm2 = (0..=m2.n).map(|k| q_cumulative(m2, sigma, k)).collect::<Result<Vec<_>>>()?;
    let mut comps = Vec::with_capacity(nt);
    let mut split = Vec::with_capacity(nt);
    let mut exp = 0i64;
    for t in 0..nt {
        let (sp, sp2) = split_indices(m.exponents(t, sigma), m.w, m2.exponents(t, sigma), m2.w)?;
        let mut c = m.pair.one();
        let mut e = 0i64;
        for (j, &k) in sp.iter().enumerate() {
            c = c.mul(&qm[j].tau_components[t].pow_i(k as i64)?);
            e += qm[j].two_pi_i_exponent * k as i64;
        }
        for (j, &k) in sp2.iter().enumerate() {
            c = c.mul(&qm2[j].tau_components[t].pow_i(k as i64)?);
            e += qm2[j].two_pi_i_exponent * k as i64;
        }
        exp = e;
        comps.push(c);
        split.push((sp, sp2));
    }
    let prefactor = tensor_two_pi_i_exponent(m.n as u64, m2.n as u64) as i64;
    Ok((
        PeriodValue::new(comps, exp - prefactor, &format!("{} ; {}", provenance(m), provenance(m2)), &level(m, sigma)),
        split,
    ))
}

/// c^+(M (x) M', sigma) from the Kronecker data against the product formula.
/// With a twist, the same comparison is repeated after rebasing the tensor,
/// and the ratio must move by det P_sigma / (det B_sigma|low det B_bar|low).
pub fn verify_tensor_formula<S: Backend>(
    m: &MotiveData<S>,
    m2: &MotiveData<S>,
    sigma: usize,
    twist: Option<&BasisChange>,
) -> Result<TensorReport<S>> {
    let t = tensor(m, m2)?;
    if t.has_middle_class() {
        return Err(Error::MiddleClass(format!(
            "{} has a ((w+w')/2, (w+w')/2) class, so there is no critical point",
            t.label
        )));
    }
    let (rhs, split) = tensor_product_formula(m, m2, sigma)?;
    let lhs = local_deligne_period(&t, sigma, true)?;
    let ratio = lhs.div(&rhs)?;
    let membership = if ratio.two_pi_i_exponent == 0 {
        m.pair.recognize_e_sigma(&ratio.tau_components, sigma)
    } else {
        Membership::Absent
    };
    let twisted = match twist {
        None => None,
        Some(c) => {
            let tt = rebase(&t, c)?;
            let lhs2 = local_deligne_period(&tt, sigma, true)?;
            let ratio2 = lhs2.div(&rhs)?;
            let factor = twist_factor(&t, c, sigma)?;
            let predicted: Vec<S> = ratio.tau_components.iter().zip(&factor).map(|(a, b)| a.mul(b)).collect();
            let matches = vec_equal(&predicted, &ratio2.tau_components);
            let membership = m.pair.recognize_e_sigma(&ratio2.tau_components, sigma);
            Some(TwistCheck { ratio: ratio2, factor, matches, membership })
        }
    };
    Ok(TensorReport { sigma, split, ratio, membership, twisted })
}

/// Per tau: det P_sigma / (det B_sigma[low, low] det B_bar[low', low']).
fn twist_factor<S: Backend>(m: &MotiveData<S>, c: &BasisChange, sigma: usize) -> Result<Vec<S>> {
    let p = &m.pair;
    let sb = p.bar(sigma);
    let mut out = Vec::with_capacity(p.num_tau());
    for t in 0..p.num_tau() {
        let mut f = p.one();
        if let Some(ps) = &c.betti {
            f = f.mul(&emat::eval(&p.e, &ps[sigma], t).det()?);
        }
        if let Some(b) = &c.dr {
            for s in [sigma, sb] {
                let low = m.low_set(t, s);
                let bm = Matrix::from_fn(low.len(), low.len(), |i, j| eval_tensor(&p.e, &p.f, &b[low[i]][low[j]], t, s));
                f = f.div(&bm.det()?)?;
            }
        }
        out.push(f);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct GlobalPeriods<S: Scalar> {
    pub delta: PeriodValue<S>,
    pub c_plus: PeriodValue<S>,
    pub c_minus: PeriodValue<S>,
}

/// delta(M_Q) and c^{+-}(M_Q) from the assembled restriction of scalars.
pub fn global_periods<S: Backend>(m: &MotiveData<S>, pkg: &RestrictionPackage<S>) -> Result<GlobalPeriods<S>> {
    let nt = m.pair.num_tau();
    let prov = format!("{} alpha={:?}", provenance(m), pkg.imaginary);
    let lvl = m.pair.e.field.label.clone();
    let mut delta = Vec::with_capacity(nt);
    let mut cp = Vec::with_capacity(nt);
    let mut cm = Vec::with_capacity(nt);
    for t in 0..nt {
        delta.push(pkg.dr_assembly[t].solve(&pkg.betti_blocks[t])?.det()?);
        cp.push(pkg.plus_dr[t].solve(&pkg.plus_betti[0][t])?.det()?);
        cm.push(pkg.plus_dr[t].solve(&pkg.plus_betti[1][t])?.det()?);
    }
    Ok(GlobalPeriods {
        delta: PeriodValue::new(delta, 0, &prov, &lvl),
        c_plus: PeriodValue::new(cp, 0, &prov, &lvl),
        c_minus: PeriodValue::new(cm, 0, &prov, &lvl),
    })
}

/// Per tau: det(local target) / det(E-basis of M_DR^+). This is the factor by
/// which c^{+-}(M_Q) differs from the product of the local periods.
pub fn assembly_determinant<S: Backend>(pkg: &RestrictionPackage<S>) -> Result<Vec<S>> {
    pkg.local_target
        .iter()
        .zip(&pkg.plus_dr)
        .map(|(a, b)| a.det()?.div(&b.det()?))
        .collect()
}

/// A square root of a nonzero rational in the backend.
fn sqrt_rational<S: Backend>(ctx: &S::Ctx, d: &BigRational, label: &str) -> Result<S> {
    let p = QPoly::new(vec![-d.clone(), BigRational::from_integer(0.into()), BigRational::one()]);
    let roots = S::roots(ctx, &p, label)?;
    roots
        .into_iter()
        .next()
        .ok_or_else(|| Error::InvalidField(format!("no square root of {}", d)))
}

#[derive(Clone, Debug)]
pub struct RatioCheck<S: Scalar> {
    pub name: String,
    pub ratio: PeriodValue<S>,
    pub membership: Membership,
}

#[derive(Clone, Debug)]
pub struct GlobalReport<S: Scalar> {
    pub periods: GlobalPeriods<S>,
    pub checks: Vec<RatioCheck<S>>,
    /// c^{+-}(M_Q) = assembly * prod_{sigma in CM type} c^{+-}(M, sigma), exactly.
    pub assembly_exact: [bool; 2],
    /// assembly * prod c^{+-}(M, sigma) per tau, for comparisons at a tolerance.
    pub assembly_predicted: [Vec<S>; 2],
}

impl<S: Scalar> GlobalReport<S> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.membership.is_member()) && self.assembly_exact.iter().all(|x| *x)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "delta": self.periods.delta.to_json(),
            "c_plus": self.periods.c_plus.to_json(),
            "c_minus": self.periods.c_minus.to_json(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "ratio": c.ratio.to_json(),
                "membership": c.membership,
            })).collect::<Vec<_>>(),
            "assembly_exact": self.assembly_exact,
        })
    }
}

/// Check the factorization of delta(M_Q) and c^{+-}(M_Q) into local periods.
pub fn verify_global_factorization<S: Backend>(m: &MotiveData<S>, imaginary: Option<&NfElem>) -> Result<GlobalReport<S>> {
    let p = &m.pair;
    let (nt, ns, g, n) = (p.num_tau(), p.num_sigma(), p.half(), m.n);
    let pkg = restriction_of_scalars(m, imaginary)?;
    let periods = global_periods(m, &pkg)?;
    let lvl = p.e.field.label.clone();

    let sqrt_df: S = sqrt_rational(&p.ctx, &p.f.field.qpoly().discriminant(), "D_F")?;
    let sqrt_dfp: S = if g == 1 {
        p.one()
    } else {
        sqrt_rational(&p.ctx, &pkg.plus_poly.discriminant(), "D_F+")?
    };
    let alpha_prod = (0..g).fold(p.one(), |acc, s| acc.mul(&p.eval_f(&pkg.imaginary, s)));

    let deltas = (0..ns).map(|s| sigma_determinant_period(m, s)).collect::<Result<Vec<_>>>()?;
    let mut denom_delta = vec![sqrt_df.pow_i(n as i64)?; nt];
    for d in &deltas {
        for t in 0..nt {
            denom_delta[t] = denom_delta[t].mul(&d.tau_components[t]);
        }
    }
    let mut checks = Vec::new();
    let ratio = periods.delta.div(&PeriodValue::new(denom_delta, 0, "", &lvl))?;
    checks.push(RatioCheck {
        name: "delta".into(),
        membership: p.recognize_e(&ratio.tau_components),
        ratio,
    });

    let assembly = assembly_determinant(&pkg)?;
    let mut assembly_exact = [false; 2];
    let mut assembly_predicted: [Vec<S>; 2] = [Vec::new(), Vec::new()];
    for (k, plus) in [true, false].into_iter().enumerate() {
        let locals = (0..g).map(|s| local_deligne_period(m, s, plus)).collect::<Result<Vec<_>>>()?;
        let mut prod = vec![p.one(); nt];
        for l in &locals {
            for t in 0..nt {
                prod[t] = prod[t].mul(&l.tau_components[t]);
            }
        }
        let global = if plus { &periods.c_plus } else { &periods.c_minus };
        let predicted: Vec<S> = (0..nt).map(|t| prod[t].mul(&assembly[t])).collect();
        assembly_exact[k] = vec_equal(&predicted, &global.tau_components);
        assembly_predicted[k] = predicted;
        let scale = alpha_prod.pow_i((n / 2) as i64)?.mul(&sqrt_dfp.pow_i(n as i64)?);
        let denom: Vec<S> = prod.iter().map(|x| x.mul(&scale)).collect();
        let ratio = global.div(&PeriodValue::new(denom, 0, "", &lvl))?;
        checks.push(RatioCheck {
            name: if plus { "c_plus".into() } else { "c_minus".into() },
            membership: p.recognize_e(&ratio.tau_components),
            ratio,
        });
    }
    Ok(GlobalReport { periods, checks, assembly_exact, assembly_predicted })
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub agree: bool,
    pub compared: usize,
    pub mismatches: Vec<String>,
}

/// Synthesize the same motive with and without random lower corrections of
/// the frames and compare delta, c^{+-} and every Q^{(j)}.
pub fn omega_hat_invariance<S: Backend>(pair: &Arc<FieldPair<S>>, spec: &SyntheticSpec<S>) -> Result<InvarianceReport> {
    let mut a = spec.clone();
    a.random_epsilon = false;
    let mut b = spec.clone();
    b.random_epsilon = true;
    let ma = synthesize_motive(pair, &a)?;
    let mb = synthesize_motive(pair, &b)?;
    let mut compared = 0;
    let mut mismatches = Vec::new();
    let mut cmp = |name: String, x: &PeriodValue<S>, y: &PeriodValue<S>| {
        compared += 1;
        if x.equals(y) != ZeroTest::Zero {
            mismatches.push(name);
        }
    };
    for s in 0..pair.num_sigma() {
        let l = &pair.f.labels[s];
        cmp(format!("delta@{}", l), &sigma_determinant_period(&ma, s)?, &sigma_determinant_period(&mb, s)?);
        if !ma.has_middle_class() {
            for plus in [true, false] {
                cmp(
                    format!("c{}@{}", if plus { "+" } else { "-" }, l),
                    &local_deligne_period(&ma, s, plus)?,
                    &local_deligne_period(&mb, s, plus)?,
                );
            }
        }
        for j in 0..=ma.n {
            cmp(format!("Q({})@{}", j, l), &q_cumulative(&ma, s, j)?, &q_cumulative(&mb, s, j)?);
        }
    }
    Ok(InvarianceReport { agree: mismatches.is_empty(), compared, mismatches })
}
