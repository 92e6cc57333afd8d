//! Determinant periods, Deligne periods and motivic periods, with exact
//! verification of the factorization statements on synthetic data.

mod verify;

pub use verify::{
    assembly_determinant, global_periods, omega_hat_invariance, tensor_product_formula, verify_conjugacy,
    verify_global_factorization, verify_tensor_formula, ConjugacyReport, GlobalPeriods, GlobalReport,
    InvarianceReport, RatioCheck, TensorReport, TwistCheck,
};

use crate::error::{Error, Result};
use crate::motive_model::MotiveData;
use crate::scalar_algebra::{Backend, Matrix, Scalar, ZeroTest};
use serde_json::{json, Value};

/// An element of E (x) C with a formal power of 2 pi i attached.
#[derive(Clone, Debug)]
pub struct PeriodValue<S: Scalar> {
    pub tau_components: Vec<S>,
    pub two_pi_i_exponent: i64,
    pub basis_provenance: String,
    /// Ring tag of the ambient equivalence, e.g. "E(x)s1(F)".
    pub equivalence_level: String,
}

impl<S: Scalar> PeriodValue<S> {
    pub fn new(tau_components: Vec<S>, two_pi_i_exponent: i64, provenance: &str, level: &str) -> Self {
        PeriodValue {
            tau_components,
            two_pi_i_exponent,
            basis_provenance: provenance.to_string(),
            equivalence_level: level.to_string(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        PeriodValue {
            tau_components: self
                .tau_components
                .iter()
                .zip(&o.tau_components)
                .map(|(a, b)| a.mul(b))
                .collect(),
            two_pi_i_exponent: self.two_pi_i_exponent + o.two_pi_i_exponent,
            basis_provenance: format!("{} * {}", self.basis_provenance, o.basis_provenance),
            equivalence_level: self.equivalence_level.clone(),
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(PeriodValue {
            tau_components: self
                .tau_components
                .iter()
                .zip(&o.tau_components)
                .map(|(a, b)| a.div(b))
                .collect::<Result<_>>()?,
            two_pi_i_exponent: self.two_pi_i_exponent - o.two_pi_i_exponent,
            basis_provenance: format!("{} / {}", self.basis_provenance, o.basis_provenance),
            equivalence_level: self.equivalence_level.clone(),
        })
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        Ok(PeriodValue {
            tau_components: self
                .tau_components
                .iter()
                .map(|a| a.pow_i(e))
                .collect::<Result<_>>()?,
            two_pi_i_exponent: self.two_pi_i_exponent * e,
            basis_provenance: format!("({})^{}", self.basis_provenance, e),
            equivalence_level: self.equivalence_level.clone(),
        })
    }

    /// Exact equality of components and of the 2 pi i exponent.
    pub fn equals(&self, o: &Self) -> ZeroTest {
        if self.two_pi_i_exponent != o.two_pi_i_exponent {
            return ZeroTest::NonZero;
        }
        let mut out = ZeroTest::Zero;
        for (a, b) in self.tau_components.iter().zip(&o.tau_components) {
            match a.sub(b).zero_test() {
                ZeroTest::NonZero => return ZeroTest::NonZero,
                ZeroTest::Unknown => out = ZeroTest::Unknown,
                ZeroTest::Zero => {}
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tau_components": self.tau_components.iter().map(|x| x.render()).collect::<Vec<_>>(),
            "two_pi_i_exponent": self.two_pi_i_exponent,
            "basis_provenance": self.basis_provenance,
            "equivalence_level": self.equivalence_level,
        })
    }
}

fn level<S: Backend>(m: &MotiveData<S>, sigma: usize) -> String {
    format!("{}(x){}({})", m.pair.e.field.label, m.pair.f.labels[sigma], m.pair.f.field.label)
}

fn provenance<S: Backend>(m: &MotiveData<S>) -> String {
    format!("betti={} dr={}", m.betti_basis, m.dr_basis)
}

fn check_sigma<S: Backend>(m: &MotiveData<S>, sigma: usize) -> Result<()> {
    if sigma >= m.pair.num_sigma() {
        return Err(Error::Dimension(format!("embedding index {} out of range", sigma)));
    }
    Ok(())
}

/// delta(M, sigma): determinant of the comparison in the fixed bases.
pub fn sigma_determinant_period<S: Backend>(m: &MotiveData<S>, sigma: usize) -> Result<PeriodValue<S>> {
    check_sigma(m, sigma)?;
    let comps = (0..m.pair.num_tau())
        .map(|t| m.comparison[t][sigma].det())
        .collect::<Result<Vec<_>>>()?;
    Ok(PeriodValue::new(comps, 0, &provenance(m), &level(m, sigma)))
}

/// n_sigma(tau) = dim of the conjugate part at sigma: the number of
/// basis vectors with p > w/2 at (tau, sigma).
pub fn n_sigma<S: Backend>(m: &MotiveData<S>, sigma: usize) -> Vec<usize> {
    (0..m.pair.num_tau())
        .map(|t| m.n - m.low_set(t, sigma).len())
        .collect()
}

/// e_sigma(tau) = (-1)^{n_sigma(tau)}.
pub fn e_sigma<S: Backend>(m: &MotiveData<S>, sigma: usize) -> Vec<i64> {
    n_sigma(m, sigma)
        .into_iter()
        .map(|k| if k % 2 == 0 { 1 } else { -1 })
        .collect()
}

/// The matrix of I^{+-} on the basis e_j +- F e_j, against the target basis
/// (w_a, w_{a*}) of the quotient at sigma and bar sigma. Row a reads the low
/// coordinate a at sigma, or the coordinate a* at bar sigma.
pub fn deligne_matrix<S: Backend>(m: &MotiveData<S>, tau: usize, sigma: usize, plus: bool) -> Result<Matrix<S>> {
    let n = m.n;
    let sb = m.pair.bar(sigma);
    let at_s = &m.comparison[tau][sigma];
    let at_sb = m.comparison[tau][sb].mul(&m.frobenius_at(tau, sigma))?;
    let low = m.low_set(tau, sigma);
    Ok(Matrix::from_fn(n, n, |a, j| {
        if low.contains(&a) {
            at_s.get(a, j).clone()
        } else {
            let v = at_sb.get(n - 1 - a, j);
            if plus { v.clone() } else { v.neg() }
        }
    }))
}

/// c^+(M, sigma) (plus = true) or c^-(M, sigma).
pub fn local_deligne_period<S: Backend>(m: &MotiveData<S>, sigma: usize, plus: bool) -> Result<PeriodValue<S>> {
    check_sigma(m, sigma)?;
    if m.has_middle_class() {
        return Err(Error::MiddleClass(format!(
            "{} has a (w/2, w/2) class, so there is no critical point",
            m.label
        )));
    }
    let comps = (0..m.pair.num_tau())
        .map(|t| deligne_matrix(m, t, sigma, plus)?.det())
        .collect::<Result<Vec<_>>>()?;
    Ok(PeriodValue::new(comps, 0, &provenance(m), &level(m, sigma)))
}

/// Q_i(M, sigma)(tau) for every i (zero-based rows) at a single tau.
///
/// With G = I_{bar sigma} F I_sigma^{-1}, the normalized Hodge line
/// w^_i = w~_i + sum_{k<i} c_k w~_k is cut out by G w^_i having no
/// coordinates past i*, and Q_i is the coordinate at i*.
pub fn motivic_q_at<S: Backend>(m: &MotiveData<S>, tau: usize, sigma: usize) -> Result<Vec<S>> {
    if !m.is_regular_data() {
        return Err(Error::Unsupported(format!("{} is not regular", m.label)));
    }
    let n = m.n;
    let sb = m.pair.bar(sigma);
    let g = m.comparison[tau][sb]
        .mul(&m.frobenius_at(tau, sigma))?
        .mul(&m.comparison[tau][sigma].inverse()?)?;
    let like = g.like().clone();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let istar = n - 1 - i;
        let mut what = vec![like.zero_like(); n];
        what[i] = like.one_like();
        if i > 0 {
            let rows: Vec<usize> = (istar + 1..n).collect();
            let cols: Vec<usize> = (0..i).collect();
            let a = g.select(&rows, &cols);
            let b = Matrix::from_fn(rows.len(), 1, |r, _| g.get(rows[r], i).neg());
            let c = a.solve(&b).map_err(|_| {
                crate::error::validation("HODGE_SWAP", "Hodge line not determined by the filtrations")
            })?;
            for k in 0..i {
                what[k] = c.get(k, 0).clone();
            }
        }
        let image = g.mul_vec(&what);
        let q = image[istar].clone();
        if q.zero_test() != ZeroTest::NonZero {
            return Err(crate::error::validation("HODGE_SWAP", "Frobenius annihilates a Hodge line"));
        }
        out.push(q);
    }
    Ok(out)
}

/// Q_i(M, sigma) as a tau-vector (i zero-based).
pub fn motivic_q<S: Backend>(m: &MotiveData<S>, sigma: usize, i: usize) -> Result<PeriodValue<S>> {
    check_sigma(m, sigma)?;
    if i >= m.n {
        return Err(Error::Dimension(format!("index {} out of range for rank {}", i + 1, m.n)));
    }
    let comps = (0..m.pair.num_tau())
        .map(|t| Ok(motivic_q_at(m, t, sigma)?[i].clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(PeriodValue::new(comps, 0, &provenance(m), &level(m, sigma)))
}

/// Q^{(j)}(M, sigma) = Q_1 ... Q_j delta(M, sigma) (2 pi i)^{n(n-1)/2}.
pub fn q_cumulative<S: Backend>(m: &MotiveData<S>, sigma: usize, j: usize) -> Result<PeriodValue<S>> {
    check_sigma(m, sigma)?;
    if j > m.n {
        return Err(Error::Dimension(format!("j = {} exceeds the rank {}", j, m.n)));
    }
    let delta = sigma_determinant_period(m, sigma)?;
    let nt = m.pair.num_tau();
    let mut comps = delta.tau_components.clone();
    if j > 0 {
        for (t, c) in comps.iter_mut().enumerate().take(nt) {
            let qs = motivic_q_at(m, t, sigma)?;
            for q in qs.iter().take(j) {
                *c = c.mul(q);
            }
        }
    }
    let n = m.n as i64;
    Ok(PeriodValue::new(comps, n * (n - 1) / 2, &provenance(m), &level(m, sigma)))
}
