//! Right-hand sides of the critical-value formulas and the checked
//! derivation chains built on the rule set.

use super::rules::{check_equivalence, rule_set, Assumption, Equivalence, RuleSet, Universe};
use super::text::parse_char;
use super::{coeff_tag, Atom, CharExpr, Expr, MotiveBase, MotiveRef, Rationality, Ring};
use crate::error::{validation, Error, Result};
use crate::hodge_combinatorics::{
    bar_label, critical_points, critical_range_unitary, guerberoff_s_index, hodge_from_infinity, i_sigma,
    split_indices, tensor_two_pi_i_exponent, unitary_infinity_type, Half, HodgeExponents, InfinityType,
    UnitaryData,
};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

fn motive_tags(m: &MotiveRef) -> BTreeSet<String> {
    match &m.base {
        MotiveBase::Named(id) => [coeff_tag(id)].into_iter().collect(),
        MotiveBase::Hecke(chi) => chi.coeff_tags(),
    }
}

fn pair_level(m1: &MotiveRef, m2: &MotiveRef) -> Ring {
    let mut c = motive_tags(m1);
    c.extend(motive_tags(m2));
    Ring { coeffs: c, rational: Rationality::Gal }
}

/// Critical integers of Res(M(Pi) (x) M(Pi')) in the motivic normalization.
fn pair_critical(hp: &HodgeExponents, hc: &HodgeExponents) -> Result<Vec<i64>> {
    let w = hp.w + hc.w;
    let mut pairs = Vec::new();
    for l in &hp.labels {
        for &p in hp.at(l)? {
            for &r in hc.at(l)? {
                pairs.push((p + r, w - p - r));
            }
        }
    }
    critical_points(&pairs)
}

/// Check that automorphic `m` is critical; returns `n n' m` times the
/// number of CM labels, the exponent of 2 pi i.
fn critical_exponent(pi: &InfinityType, pi2: &InfinityType, hp: &HodgeExponents, hc: &HodgeExponents, m: Half) -> Result<i64> {
    let (n, n2) = (pi.n as i64, pi2.n as i64);
    let crit = pair_critical(hp, hc)?;
    let m_mot = Half(m.0 + n + n2 - 2).to_integer();
    if !m_mot.map_or(false, |x| crit.contains(&x)) {
        let shown: Vec<String> = crit.iter().map(|c| Half(2 * c - (n + n2 - 2)).to_string()).collect();
        return Err(Error::NotCritical(format!(
            "m = {} is not critical; critical points are {{{}}}",
            m,
            shown.join(", ")
        )));
    }
    let d = pi.cm_labels().len() as i64;
    // m n n' is an integer since n n'(n + n' - 2)/2 is
    let doubled = m.0 * n * n2 * d;
    debug_assert_eq!(
        doubled,
        2 * (m_mot.unwrap() * n * n2 * d - d * tensor_two_pi_i_exponent(n as u64, n2 as u64) as i64)
    );
    Ok(doubled / 2)
}

fn check_labels(pi: &InfinityType, pi2: &InfinityType) -> Result<()> {
    if pi.cm_labels() != pi2.cm_labels() {
        return Err(validation("LABELS", "the two infinity types use different CM types"));
    }
    Ok(())
}

/// `(2 pi i)^{m n n' d} prod_sigma prod_j Q^(j)(M,sigma)^sp(j) prod_k Q^(k)(M',sigma)^sp(k)`
/// with `m` in the automorphic normalization `Z + (n + n' - 2)/2`.
pub fn emit_deligne_rhs(pi: &InfinityType, m1: &MotiveRef, pi2: &InfinityType, m2: &MotiveRef, m: Half) -> Result<Expr> {
    check_labels(pi, pi2)?;
    let hp = hodge_from_infinity(pi)?;
    let hc = hodge_from_infinity(pi2)?;
    let e = critical_exponent(pi, pi2, &hp, &hc, m)?;
    let mut out = Expr::one(pair_level(m1, m2)).times(Atom::TwoPiI, e);
    for s in pi.cm_labels() {
        out = out.mul(&local_q_product(&hp, m1, &hc, m2, s)?);
    }
    Ok(out)
}

fn local_q_product(hp: &HodgeExponents, m1: &MotiveRef, hc: &HodgeExponents, m2: &MotiveRef, s: &str) -> Result<Expr> {
    let (sp, sp2) = split_indices(hp.at(s)?, hp.w, hc.at(s)?, hc.w)?;
    let mut out = Expr::one(pair_level(m1, m2));
    for (j, k) in sp.iter().enumerate() {
        out = out.times(Atom::Qj { motive: m1.clone(), sigma: s.to_string(), j: j as u32 }, *k as i64);
    }
    for (j, k) in sp2.iter().enumerate() {
        out = out.times(Atom::Qj { motive: m2.clone(), sigma: s.to_string(), j: j as u32 }, *k as i64);
    }
    Ok(out)
}

/// The same shape with `P^(j)(Pi, sigma)` in place of the motivic periods.
pub fn emit_automorphic_rhs(pi: &InfinityType, rep: &str, pi2: &InfinityType, rep2: &str, m: Half) -> Result<Expr> {
    let m1 = MotiveRef::named(rep);
    let m2 = MotiveRef::named(rep2);
    let motivic = emit_deligne_rhs(pi, &m1, pi2, &m2, m)?;
    let mut out = Expr::one(motivic.level.clone());
    for (a, e) in motivic.terms {
        let a = match a {
            Atom::Qj { motive, sigma, j } => {
                let MotiveBase::Named(id) = motive.base else { unreachable!() };
                Atom::PLocal { rep: id, sigma, r: j }
            }
            other => other,
        };
        out = out.times(a, e);
    }
    Ok(out)
}

/// Local tensor factor `(2 pi i)^{-n n'(n+n'-2)/2} prod_j Q^(j)^sp prod_k Q^(k)^sp` at sigma.
pub fn emit_local_tensor_rhs(pi: &InfinityType, m1: &MotiveRef, pi2: &InfinityType, m2: &MotiveRef, sigma: &str) -> Result<Expr> {
    check_labels(pi, pi2)?;
    let hp = hodge_from_infinity(pi)?;
    let hc = hodge_from_infinity(pi2)?;
    let t = tensor_two_pi_i_exponent(pi.n as u64, pi2.n as u64) as i64;
    let mut level = pair_level(m1, m2);
    level.rational = Rationality::Sigma(sigma.to_string());
    Ok(local_q_product(&hp, m1, &hc, m2, sigma)?.at_level(level).times(Atom::TwoPiI, -t))
}

/// `(2 pi i)^{m n d} prod_sigma Q^(I)(M(Pi)) Q^(0)(M(chi))^{n-I} Q^(1)(M(chi))^I`
/// with `I = I_sigma(Pi, chi)`.
pub fn emit_n1motive_rhs(pi: &InfinityType, m1: &MotiveRef, chi: &InfinityType, m2: &MotiveRef, m: Half) -> Result<Expr> {
    check_labels(pi, chi)?;
    if chi.n != 1 {
        return Err(Error::Dimension("the second argument must be a Hecke character".into()));
    }
    let hp = hodge_from_infinity(pi)?;
    let hc = hodge_from_infinity(chi)?;
    let e = critical_exponent(pi, chi, &hp, &hc, m)?;
    let n = pi.n as i64;
    let mut out = Expr::one(pair_level(m1, m2)).times(Atom::TwoPiI, e);
    for s in pi.cm_labels() {
        let i = i_sigma(pi, chi, s)? as u32;
        let q = |m: &MotiveRef, j| Atom::Qj { motive: m.clone(), sigma: s.to_string(), j };
        out = out.times(q(m1, i), 1).times(q(m2, 0), n - i as i64).times(q(m2, 1), i as i64);
    }
    Ok(out)
}

/// `(2 pi i)^{d m n - 2 a_0} P(psi) Q_V(pi)` for `m` in the unitary critical range.
pub fn emit_guer_rhs(data: &[(String, UnitaryData)], rep: &str, psi: &CharExpr, a0: i64, m: Half) -> Result<Expr> {
    let n = data.first().map(|(_, d)| d.a.len()).ok_or_else(|| Error::Dimension("no embeddings".into()))?;
    let range = critical_range_unitary(n, &data.iter().map(|(_, d)| d.clone()).collect::<Vec<_>>())?;
    if !range.contains(&m) {
        let shown: Vec<String> = range.iter().map(|x| x.to_string()).collect();
        return Err(Error::NotCritical(format!(
            "m = {} is outside the critical range {{{}}}",
            m,
            shown.join(", ")
        )));
    }
    let d = data.len() as i64;
    let e = m.0 * n as i64 * d / 2 - 2 * a0;
    let signature = data.iter().map(|(s, u)| (s.clone(), (u.r as u32, u.s as u32))).collect();
    let mut coeffs: BTreeSet<String> = [coeff_tag(rep)].into_iter().collect();
    coeffs.extend(psi.coeff_tags());
    Ok(Expr::one(Ring { coeffs, rational: Rationality::Gal })
        .times(Atom::TwoPiI, e)
        .times(Atom::GuerP { chi: psi.clone() }, 1)
        .times(Atom::Petersson { rep: rep.to_string(), signature }, 1))
}

/// `delta(M_0, sigma_0) Q(psi~, sigma_0) prod_{j <= s} Q_j(M_0, sigma_0)`.
pub fn emit_guermotive_rhs(m0: &str, psit: &CharExpr, sigma: &str, r: u32, s: u32) -> Expr {
    let m = MotiveRef::named(m0);
    let mut coeffs: BTreeSet<String> = [coeff_tag(m0)].into_iter().collect();
    coeffs.extend(psit.coeff_tags());
    let mut e = Expr::one(Ring { coeffs, rational: Rationality::Sigma(sigma.to_string()) })
        .times(Atom::Delta { motive: m.clone(), sigma: sigma.to_string() }, 1)
        .times(Atom::GuerQ { chi: psit.clone(), sigma: sigma.to_string(), r, s }, 1);
    for j in 1..=s {
        e = e.times(Atom::Qi { motive: m.clone(), sigma: sigma.to_string(), i: j }, 1);
    }
    e
}

#[derive(Clone, Debug)]
pub enum StepCheck {
    Equivalence(Equivalence),
    Integer { lhs: i64, rhs: i64 },
    /// A hypothesis taken as a relation; it holds only when in force.
    Hypothesis { assumption: Assumption, in_force: bool },
}

#[derive(Clone, Debug)]
pub struct DerivationStep {
    pub name: String,
    pub statement: String,
    pub check: StepCheck,
}

impl DerivationStep {
    pub fn holds(&self) -> bool {
        match &self.check {
            StepCheck::Equivalence(e) => e.holds,
            StepCheck::Integer { lhs, rhs } => lhs == rhs,
            StepCheck::Hypothesis { .. } => true,
        }
    }

    pub fn to_json(&self) -> Value {
        let check = match &self.check {
            StepCheck::Equivalence(e) => e.to_json(),
            StepCheck::Integer { lhs, rhs } => json!({"integer": [lhs, rhs], "holds": lhs == rhs}),
            StepCheck::Hypothesis { assumption, in_force } => {
                json!({"assumed": assumption.to_string(), "in_force": in_force})
            }
        };
        json!({"step": self.name, "statement": self.statement, "holds": self.holds(), "check": check})
    }
}

#[derive(Clone, Debug)]
pub struct Derivation {
    pub name: String,
    pub assumptions: Vec<Assumption>,
    pub steps: Vec<DerivationStep>,
}

impl Derivation {
    pub fn failed_at(&self) -> Option<&str> {
        self.steps.iter().find(|s| !s.holds()).map(|s| s.name.as_str())
    }

    pub fn succeeded(&self) -> bool {
        self.failed_at().is_none()
    }

    /// Names of hypotheses the chain relied on.
    pub fn assumed(&self) -> Vec<String> {
        let mut out: BTreeSet<String> = BTreeSet::new();
        for s in &self.steps {
            match &s.check {
                StepCheck::Equivalence(e) => out.extend(e.steps.iter().filter_map(|t| t.assumed.map(|a| a.to_string()))),
                StepCheck::Hypothesis { assumption, .. } => {
                    out.insert(assumption.to_string());
                }
                _ => {}
            }
        }
        out.into_iter().collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "derivation": self.name,
            "assumptions": self.assumptions.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "succeeded": self.succeeded(),
            "failed_at": self.failed_at(),
            "assumed": self.assumed(),
            "steps": self.steps.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        })
    }
}

struct Chain<'a> {
    rs: &'a RuleSet,
    level: Ring,
    steps: Vec<DerivationStep>,
}

impl Chain<'_> {
    fn equiv(&mut self, name: &str, lhs: &Expr, rhs: &Expr) -> Result<()> {
        self.equiv_at(name, lhs, rhs, self.level.clone())
    }

    fn equiv_at(&mut self, name: &str, lhs: &Expr, rhs: &Expr, level: Ring) -> Result<()> {
        let e = check_equivalence(self.rs, lhs, rhs, &level)?;
        self.steps.push(DerivationStep {
            name: name.to_string(),
            statement: format!("{} ~ {}", lhs.render(), rhs.render()),
            check: StepCheck::Equivalence(e),
        });
        Ok(())
    }
}

fn ex(level: &Ring, parts: Vec<(Atom, i64)>) -> Expr {
    parts.into_iter().fold(Expr::one(level.clone()), |e, (a, k)| e.times(a, k))
}

/// The geometric meaning of local periods: `P^(r)(Pi, sigma) ~ Q^(r)(M(Pi), sigma)`
/// over a CM type of two embeddings, with `r` at `sigma` and `n` elsewhere.
pub fn derivation_44(n: u32, r: u32, assumptions: &[Assumption]) -> Result<Derivation> {
    if n == 0 || r > n {
        return Err(Error::Dimension(format!("need 0 <= r <= n and n >= 1, got r = {}, n = {}", r, n)));
    }
    let uni = Universe::new(&["s1", "s2"])
        .with_rep("Pi", n, Some("xi_Pi"), false, 0)?
        .with_char("xi")
        .with_alias("xi_Pi", "tld(xi)")?;
    let mut rs = rule_set(&uni, assumptions)?;
    let level = Ring::new([coeff_tag("Pi"), coeff_tag("xi")], Rationality::Gal);
    let (s1, s2) = ("s1".to_string(), "s2".to_string());
    let pi = MotiveRef::named("Pi");
    let xi = parse_char("xi")?;
    let xi_pi = parse_char("xi_Pi")?;
    let m_xi = MotiveRef::hecke(xi.clone());
    let index: BTreeMap<String, u32> = [(s1.clone(), r), (s2.clone(), n)].into_iter().collect();
    let p_global = Atom::PGlobal { rep: "Pi".into(), index };
    let p_local = |s: &str, k: u32| Atom::PLocal { rep: "Pi".into(), sigma: s.into(), r: k };
    let cm = |chi: CharExpr, s: &str| Atom::Cm { chi, sigma: Some(s.into()) };
    let q1 = |m: &MotiveRef, s: &str, i: u32| Atom::Qi { motive: m.clone(), sigma: s.into(), i };
    let delta = |m: MotiveRef, s: &str| Atom::Delta { motive: m, sigma: s.into() };
    let bottom_stage = |m: &MotiveRef| -> Vec<(Atom, i64)> { (1..=n - r).map(|i| (q1(m, "s1", i), 1)).collect() };
    let tri = (n as i64) * (n as i64 - 1) / 2;

    let mut steps = Vec::new();
    {
        let mut ch = Chain { rs: &rs, level: level.clone(), steps: Vec::new() };
        ch.equiv(
            "decomposition-of-automorphic-period",
            &ex(&level, vec![(p_global.clone(), 1)]),
            &ex(&level, vec![(p_local("s1", r), 1), (p_local("s2", n), 1)]),
        )?;
        ch.equiv(
            "top-local-period-at-other-embedding",
            &ex(&level, vec![(p_global.clone(), 1)]),
            &ex(&level, vec![(p_local("s1", r), 1), (cm(xi_pi.check(), "s2"), 1)]),
        )?;
        steps.append(&mut ch.steps);
    }

    // inner product of a rational class in the bottom stage of the exterior power
    let mut tate = bottom_stage(&pi.dual());
    tate.push((q1(&m_xi, "s1", 1), 1));
    tate.push((q1(&m_xi, "s2", 1), 1));
    let tate_rhs = ex(&level, tate);
    let in_force = rs.is_enabled(Some(Assumption::TateConjecture));
    rs.add_relation(
        &ex(&level, vec![(p_global.clone(), 1)]).div(&tate_rhs),
        "tate-geometric",
        "Tate conjecture: P^(I)(Pi) ~ Q_1..Q_(n-r)(M(Pi^v), sigma) Q_1(M(xi))",
        Some(Assumption::TateConjecture),
    )?;
    steps.push(DerivationStep {
        name: "automorphic-period-as-inner-product".into(),
        statement: format!("{} ~ {}", p_global, tate_rhs.render()),
        check: StepCheck::Hypothesis { assumption: Assumption::TateConjecture, in_force },
    });

    let mut ch = Chain { rs: &rs, level: level.clone(), steps };
    ch.equiv(
        "calculation-at-other-embedding",
        &ex(&level, vec![(q1(&m_xi, "s2", 1), 1)]),
        &ex(&level, vec![(cm(xi_pi.check(), "s2"), 1)]),
    )?;
    let mut first = bottom_stage(&pi.dual());
    first.push((q1(&m_xi, "s1", 1), 1));
    ch.equiv("main-comparison", &ex(&level, vec![(p_local("s1", r), 1)]), &ex(&level, first))?;
    let mut second = bottom_stage(&pi.conjugate());
    second.push((q1(&m_xi, "s1", 1), 1));
    ch.equiv("main-comparison-conjugate-form", &ex(&level, vec![(p_local("s1", r), 1)]), &ex(&level, second))?;
    let m_xi_pi_c = MotiveRef::hecke(xi_pi.conj());
    ch.equiv(
        "calculation-at-sigma",
        &ex(&level, vec![(q1(&m_xi, "s1", 1), 1)]),
        &ex(&level, vec![(delta(m_xi_pi_c.clone(), "s1"), 1)]),
    )?;
    ch.equiv(
        "determinant-relation",
        &ex(&level, vec![(delta(pi.conjugate(), "s1"), 1)]),
        &ex(&level, vec![(delta(m_xi_pi_c, "s1"), 1), (Atom::TwoPiI, -tri)]),
    )?;
    ch.equiv(
        "xi-period-as-determinant",
        &ex(&level, vec![(q1(&m_xi, "s1", 1), 1)]),
        &ex(&level, vec![(delta(pi.conjugate(), "s1"), 1), (Atom::TwoPiI, tri)]),
    )?;
    let qj = |m: MotiveRef, j: u32| Atom::Qj { motive: m, sigma: "s1".into(), j };
    ch.equiv(
        "local-period-as-conjugate-motivic-period",
        &ex(&level, vec![(p_local("s1", r), 1)]),
        &ex(&level, vec![(qj(pi.conjugate(), n - r), 1)]),
    )?;
    ch.equiv(
        "local-period-as-motivic-period",
        &ex(&level, vec![(p_local("s1", r), 1)]),
        &ex(&level, vec![(qj(pi.clone(), r), 1)]),
    )?;
    let _ = s2;
    Ok(Derivation { name: "geometric-meaning-of-local-periods".into(), assumptions: assumptions.to_vec(), steps: ch.steps })
}

/// Parameters for the comparison of the rank-one tensor formula with the
/// formula for `M_0 (x) Res M(psi~)`.
#[derive(Clone, Debug)]
pub struct GuerberoffCase {
    /// Unitary weights, signature and `m_sigma, m_bar sigma` at each sigma of the CM type.
    pub data: Vec<(String, UnitaryData)>,
    pub m: Half,
    pub self_conjugate: bool,
}

impl GuerberoffCase {
    pub fn n(&self) -> usize {
        self.data.first().map_or(0, |(_, d)| d.a.len())
    }

    /// Infinity types of Pi (weight 0) and of psi~.
    pub fn infinity_types(&self) -> Result<(InfinityType, InfinityType)> {
        let n = self.n();
        let mut pe = Vec::new();
        let mut ce = Vec::new();
        for (s, d) in &self.data {
            let a = unitary_infinity_type(&d.a);
            pe.push((s.clone(), a.clone()));
            ce.push((s.clone(), vec![Half::int(d.m_bar - d.m_sigma)]));
        }
        for (s, d) in &self.data {
            let a = unitary_infinity_type(&d.a);
            pe.push((bar_label(s), a.iter().map(|x| Half(-x.0)).collect()));
            ce.push((bar_label(s), vec![Half::int(d.m_sigma - d.m_bar)]));
        }
        Ok((InfinityType::new(n, Half(0), "t1", pe)?, InfinityType::new(1, Half(0), "t1", ce)?))
    }

    pub fn to_json(&self) -> Value {
        let data: Vec<Value> = self
            .data
            .iter()
            .map(|(s, d)| json!({"sigma": s, "a": d.a, "r": d.r, "s": d.s, "m_sigma": d.m_sigma, "m_bar": d.m_bar}))
            .collect();
        json!({"data": data, "m": self.m.to_string(), "self_conjugate": self.self_conjugate})
    }

    pub fn from_json(v: &Value) -> Result<GuerberoffCase> {
        let arr = v["data"].as_array().ok_or_else(|| Error::Parse("missing 'data'".into()))?;
        let mut data = Vec::new();
        for d in arr {
            let get = |k: &str| d[k].as_i64().ok_or_else(|| Error::Parse(format!("data entry without integer '{}'", k)));
            let a: Vec<i64> =
                serde_json::from_value(d["a"].clone()).map_err(|e| Error::Parse(format!("weights 'a': {}", e)))?;
            let sigma = d["sigma"].as_str().ok_or_else(|| Error::Parse("data entry without 'sigma'".into()))?;
            data.push((
                sigma.to_string(),
                UnitaryData { a, r: get("r")? as usize, s: get("s")? as usize, m_sigma: get("m_sigma")?, m_bar: get("m_bar")? },
            ));
        }
        Ok(GuerberoffCase {
            data,
            m: Half::from_value(&v["m"])?,
            self_conjugate: v["self_conjugate"].as_bool().unwrap_or(true),
        })
    }
}

/// Compare the rank-one tensor formula for `(Pi, psi~)` with the formula for
/// the descended motive, one embedding at a time.
pub fn guerberoff_trace(case: &GuerberoffCase, assumptions: &[Assumption]) -> Result<Derivation> {
    let n = case.n() as u32;
    if n == 0 {
        return Err(Error::Dimension("empty case".into()));
    }
    let sigmas: Vec<&str> = case.data.iter().map(|(s, _)| s.as_str()).collect();
    let uni = Universe::new(&sigmas)
        .with_rep("Pi", n, None, case.self_conjugate, 0)?
        .with_char("psi")
        .with_alias("psit", "tld(psi)")?
        .with_descent("M0", "Pi");
    let rs = rule_set(&uni, assumptions)?;
    let (pi_t, psi_t) = case.infinity_types()?;
    let pi = MotiveRef::named("Pi");
    let psit = parse_char("psit")?;
    let m_psi = MotiveRef::hecke(psit.clone());
    let coeffs = [coeff_tag("Pi"), coeff_tag("psi")];
    let global = Ring::new(coeffs.clone(), Rationality::Gal);

    let mut ch = Chain { rs: &rs, level: global.clone(), steps: Vec::new() };
    let deligne = emit_deligne_rhs(&pi_t, &pi, &psi_t, &m_psi, case.m)?.at_level(global.clone());
    let n1 = emit_n1motive_rhs(&pi_t, &pi, &psi_t, &m_psi, case.m)?.at_level(global.clone());
    ch.equiv("rank-one-tensor-formula", &deligne, &n1)?;

    let tri = (n as i64) * (n as i64 - 1) / 2;
    for (s, d) in &case.data {
        let level = Ring::new(coeffs.clone(), Rationality::Sigma(s.clone()));
        let i = i_sigma(&pi_t, &psi_t, s)? as u32;
        let sg = guerberoff_s_index(&d.a, d.m_sigma, d.m_bar) as u32;
        ch.steps.push(DerivationStep {
            name: format!("index-dictionary[{}]", s),
            statement: format!("s = n - I: {} = {} - {}", sg, n, i),
            check: StepCheck::Integer { lhs: sg as i64, rhs: n as i64 - i as i64 },
        });
        let cm = Atom::Cm { chi: psit.clone(), sigma: Some(s.clone()) };
        let qj = |m: &MotiveRef, j: u32| Atom::Qj { motive: m.clone(), sigma: s.clone(), j };
        ch.equiv_at(
            &format!("cm-factor[{}]", s),
            &ex(&level, vec![(Atom::GuerQ { chi: psit.clone(), sigma: s.clone(), r: i, s: n - i }, 1)]),
            &ex(&level, vec![(cm.clone(), 2 * i as i64 - n as i64)]),
            level.clone(),
        )?;
        ch.equiv_at(
            &format!("hecke-factors[{}]", s),
            &ex(&level, vec![(qj(&m_psi, 0), n as i64 - i as i64), (qj(&m_psi, 1), i as i64)]),
            &ex(&level, vec![(cm, 2 * i as i64 - n as i64)]),
            level.clone(),
        )?;
        let m0 = MotiveRef::named("M0");
        let mut lhs = vec![(Atom::Delta { motive: m0.clone(), sigma: s.clone() }, 1)];
        lhs.extend((1..=sg).map(|j| (Atom::Qi { motive: m0.clone(), sigma: s.clone(), i: j }, 1)));
        ch.equiv_at(
            &format!("descended-periods[{}]", s),
            &ex(&level, lhs),
            &ex(&level, vec![(Atom::TwoPiI, -tri), (qj(&pi, sg), 1)]),
            level.clone(),
        )?;
        ch.equiv_at(
            &format!("self-conjugacy[{}]", s),
            &ex(&level, vec![(qj(&pi, sg), 1)]),
            &ex(&level, vec![(qj(&pi, i), 1)]),
            level.clone(),
        )?;
        let local = ex(
            &level,
            vec![(Atom::TwoPiI, -tri), (qj(&pi, i), 1), (qj(&m_psi, 0), n as i64 - i as i64), (qj(&m_psi, 1), i as i64)],
        );
        let guer = emit_guermotive_rhs("M0", &psit, s, i, sg).at_level(level.clone());
        ch.equiv_at(&format!("comparison[{}]", s), &local, &guer, level.clone())?;
    }
    Ok(Derivation { name: "rank-one-versus-descended-motive".into(), assumptions: assumptions.to_vec(), steps: ch.steps })
}
