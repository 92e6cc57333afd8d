//! Split indices, critical points and the dictionary between infinity types
//! and Hodge exponents.
//!
//! Half-integers are carried as doubled integers (`Half`), so every
//! comparison below is exact integer arithmetic.

use crate::error::{validation, Error, Result};
use crate::motive_model::MotiveData;
use crate::scalar_algebra::Backend;
use serde_json::{json, Map, Value};
use std::fmt;

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(pub i64);

impl Half {
    pub fn int(x: i64) -> Self {
        Half(2 * x)
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_integer(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("not a half-integer: '{}'", s));
        if let Some(num) = t.strip_suffix("/2") {
            let p: i64 = num.trim().parse().map_err(|_| bad())?;
            Ok(Half(p))
        } else {
            let p: i64 = t.parse().map_err(|_| bad())?;
            Ok(Half(2 * p))
        }
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => Half::parse(s),
            Value::Number(x) => x
                .as_i64()
                .map(Half::int)
                .ok_or_else(|| Error::Parse(format!("not a half-integer: {}", x))),
            _ => Err(Error::Parse(format!("not a half-integer: {}", v))),
        }
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Label of the conjugate embedding, with labels `s` and `bar(s)`.
pub fn bar_label(label: &str) -> String {
    match label.strip_prefix("bar(").and_then(|x| x.strip_suffix(')')) {
        Some(inner) => inner.to_string(),
        None => format!("bar({})", label),
    }
}

fn in_cm_type(label: &str) -> bool {
    !label.starts_with("bar(")
}

/// Archimedean parameters of a cohomological representation of GL_n over F.
///
/// `a[k]` is the list `A_{sigma,i}` for `labels[k]`. Lists at sigma in the
/// CM type are strictly decreasing; lists at bar sigma are stored indexed by
/// the pairing, so that `A_{sigma,i} + A_{bar sigma,i} = weight` termwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinityType {
    pub n: usize,
    pub weight: Half,
    pub tau: String,
    pub labels: Vec<String>,
    pub a: Vec<Vec<Half>>,
}

impl InfinityType {
    /// Build and normalize. A conjugate list given in decreasing order is
    /// re-indexed by the pairing.
    pub fn new(n: usize, weight: Half, tau: &str, entries: Vec<(String, Vec<Half>)>) -> Result<Self> {
        let labels: Vec<String> = entries.iter().map(|(l, _)| l.clone()).collect();
        let mut a: Vec<Vec<Half>> = entries.into_iter().map(|(_, v)| v).collect();
        for (k, l) in labels.iter().enumerate() {
            if a[k].len() != n {
                return Err(validation("DIMENSION", format!("{} has {} parameters, rank is {}", l, a[k].len(), n)));
            }
            let parity = (n as i64 - 1).rem_euclid(2);
            if let Some(x) = a[k].iter().find(|x| x.0.rem_euclid(2) != parity) {
                return Err(validation(
                    "HALF_INTEGRALITY",
                    format!("{} at {} is not in Z + (n-1)/2", x, l),
                ));
            }
        }
        for (k, l) in labels.iter().enumerate() {
            if !in_cm_type(l) {
                continue;
            }
            if a[k].windows(2).any(|x| x[0] <= x[1]) {
                return Err(validation("STRICT_DECREASE", format!("parameters at {} are not strictly decreasing", l)));
            }
            let b = bar_label(l);
            let Some(kb) = labels.iter().position(|x| *x == b) else {
                return Err(validation("CONJUGATE_MISSING", format!("no parameters at {}", b)));
            };
            let termwise = (0..n).all(|i| a[k][i].0 + a[kb][i].0 == weight.0);
            if !termwise {
                let reversed = (0..n).all(|i| a[k][i].0 + a[kb][n - 1 - i].0 == weight.0);
                if !reversed {
                    return Err(validation(
                        "PURITY",
                        format!("A at {} and {} do not sum to the weight {}", l, b, weight),
                    ));
                }
                a[kb].reverse();
            }
        }
        if let Some(l) = labels.iter().find(|l| !in_cm_type(l) && !labels.contains(&bar_label(l))) {
            return Err(validation("CONJUGATE_MISSING", format!("no parameters at {}", bar_label(l))));
        }
        Ok(InfinityType { n, weight, tau: tau.to_string(), labels, a })
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Dimension(format!("no embedding labelled {}", label)))
    }

    pub fn at(&self, label: &str) -> Result<&[Half]> {
        Ok(&self.a[self.index(label)?])
    }

    pub fn cm_labels(&self) -> Vec<&str> {
        self.labels.iter().filter(|l| in_cm_type(l)).map(|s| s.as_str()).collect()
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| Error::Parse("missing integer 'n'".into()))? as usize;
        let weight = Half::from_value(&v["weight"])?;
        let tau = v["tau"].as_str().unwrap_or("t1");
        let obj = v["A"]
            .as_object()
            .ok_or_else(|| Error::Parse("missing object 'A'".into()))?;
        let mut entries = Vec::new();
        for (l, list) in obj {
            let arr = list
                .as_array()
                .ok_or_else(|| Error::Parse(format!("A[{}] is not a list", l)))?;
            let vals = arr.iter().map(Half::from_value).collect::<Result<Vec<_>>>()?;
            entries.push((l.clone(), vals));
        }
        // CM type first, in label order, then the conjugates
        entries.sort_by_key(|(l, _)| (!in_cm_type(l), l.clone()));
        InfinityType::new(n, weight, tau, entries)
    }

    pub fn to_json(&self) -> Value {
        let mut a = Map::new();
        for (l, list) in self.labels.iter().zip(&self.a) {
            a.insert(l.clone(), json!(list.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
        }
        json!({"n": self.n, "weight": self.weight.to_string(), "tau": self.tau, "A": a})
    }
}

/// Hodge exponents attached to an infinity type, per embedding label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeExponents {
    pub w: i64,
    pub labels: Vec<String>,
    /// Decreasing exponents at each label.
    pub p: Vec<Vec<i64>>,
}

impl HodgeExponents {
    pub fn at(&self, label: &str) -> Result<&[i64]> {
        let k = self
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Dimension(format!("no embedding labelled {}", label)))?;
        Ok(&self.p[k])
    }

    /// All Hodge pairs (p, w - p) over every embedding.
    pub fn pairs(&self) -> Vec<(i64, i64)> {
        self.p
            .iter()
            .flatten()
            .map(|&p| (p, self.w - p))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (l, p) in self.labels.iter().zip(&self.p) {
            m.insert(l.clone(), json!(p));
        }
        json!({"w": self.w, "exponents": m})
    }
}

/// p_i = -A_{sigma,i} + (n-1)/2 and w = -w(Pi) + n - 1.
pub fn hodge_from_infinity(pi: &InfinityType) -> Result<HodgeExponents> {
    let shift = pi.n as i64 - 1;
    let w2 = -pi.weight.0 + 2 * shift;
    let w = Half(w2)
        .to_integer()
        .ok_or_else(|| validation("HALF_INTEGRALITY", "motive weight is not an integer"))?;
    let mut p = Vec::with_capacity(pi.labels.len());
    for list in &pi.a {
        let mut e: Vec<i64> = list
            .iter()
            .map(|x| Half(-x.0 + shift).to_integer())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| validation("HALF_INTEGRALITY", "Hodge exponent is not an integer"))?;
        e.sort_by(|x, y| y.cmp(x));
        p.push(e);
    }
    Ok(HodgeExponents { w, labels: pi.labels.clone(), p })
}

/// Split indices of a pair of exponent lists (any order).
///
/// Returns `(sp(.,M;M'), sp(.,M';M))` of lengths n+1 and n'+1. The part of
/// -r_k is the number of i with p_i + r_k > (w+w')/2.
pub fn split_indices(p: &[i64], w: i64, r: &[i64], w2: i64) -> Result<(Vec<usize>, Vec<usize>)> {
    let c2 = w + w2;
    for &pi in p {
        for &rk in r {
            if 2 * (pi + rk) == c2 {
                return Err(Error::MiddleClass(format!(
                    "p = {} and r = {} give a ({}/2, {}/2) class",
                    pi, rk, c2, c2
                )));
            }
        }
    }
    let mut sp = vec![0usize; p.len() + 1];
    for &rk in r {
        sp[p.iter().filter(|&&pi| 2 * (pi + rk) > c2).count()] += 1;
    }
    let mut sp2 = vec![0usize; r.len() + 1];
    for &pi in p {
        sp2[r.iter().filter(|&&rk| 2 * (pi + rk) > c2).count()] += 1;
    }
    Ok((sp, sp2))
}

/// Split indices for a pair of motives at every (tau, sigma) with sigma in
/// the CM type: `table[tau][sigma]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndexTable {
    pub table: Vec<Vec<(Vec<usize>, Vec<usize>)>>,
}

impl SplitIndexTable {
    pub fn to_json(&self) -> Value {
        json!(self
            .table
            .iter()
            .map(|row| row
                .iter()
                .map(|(a, b)| json!({"M": a, "M'": b}))
                .collect::<Vec<_>>())
            .collect::<Vec<_>>())
    }
}

pub fn split_index_table<S: Backend>(m: &MotiveData<S>, m2: &MotiveData<S>) -> Result<SplitIndexTable> {
    let nt = m.pair.num_tau();
    let g = m.pair.half();
    let mut table = Vec::with_capacity(nt);
    for t in 0..nt {
        let row = (0..g)
            .map(|s| split_indices(m.exponents(t, s), m.w, m2.exponents(t, s), m2.w))
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    Ok(SplitIndexTable { table })
}

/// I_sigma(Pi, chi) = #{i : A_{s,i} - A_{bar s,i} + a_s - a_{bar s} < 0}.
pub fn i_sigma(pi: &InfinityType, chi: &InfinityType, sigma: &str) -> Result<usize> {
    if chi.n != 1 {
        return Err(Error::Dimension("the character must have rank 1".into()));
    }
    let b = bar_label(sigma);
    let (a, ab) = (pi.at(sigma)?, pi.at(&b)?);
    let d = chi.at(sigma)?[0].0 - chi.at(&b)?[0].0;
    Ok((0..pi.n).filter(|&i| a[i].0 - ab[i].0 + d < 0).count())
}

/// The integer interval (max{p : p < q}, min{q : p < q}] for a Hodge
/// multiset of a motive over Q.
pub fn critical_points(pairs: &[(i64, i64)]) -> Result<Vec<i64>> {
    if pairs.is_empty() {
        return Err(Error::Dimension("empty Hodge multiset".into()));
    }
    let w = pairs[0].0 + pairs[0].1;
    if pairs.iter().any(|(p, q)| p + q != w) {
        return Err(validation("PURITY", "Hodge pairs of different weights"));
    }
    if pairs.iter().any(|(p, q)| p == q) {
        return Err(Error::MiddleClass(
            "a (w/2, w/2) class is present, so there is no critical point".into(),
        ));
    }
    let mut sorted: Vec<(i64, i64)> = pairs.to_vec();
    let mut swapped: Vec<(i64, i64)> = pairs.iter().map(|&(p, q)| (q, p)).collect();
    sorted.sort();
    swapped.sort();
    if sorted != swapped {
        return Err(validation("HODGE_SYMMETRY", "h^{p,q} != h^{q,p}"));
    }
    let lo = pairs.iter().filter(|(p, q)| p < q).map(|x| x.0).max().unwrap();
    let hi = pairs.iter().filter(|(p, q)| p < q).map(|x| x.1).min().unwrap();
    Ok(((lo + 1)..=hi).collect())
}

/// Weights and signatures at one sigma of the CM type for the unitary range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitaryData {
    /// a_{sigma,1} >= ... >= a_{sigma,n}.
    pub a: Vec<i64>,
    pub r: usize,
    pub s: usize,
    pub m_sigma: i64,
    pub m_bar: i64,
}

/// All m in Z + (n-1)/2 with
/// n < m + (n-1)/2 <= min over sigma of {a_{r}+s+m_s-m_bar, a_{s}+r+m_bar-m_s}.
/// A term whose index is 0 imposes no bound.
pub fn critical_range_unitary(n: usize, data: &[UnitaryData]) -> Result<Vec<Half>> {
    let mut bound: Option<i64> = None;
    for d in data {
        if d.a.len() != n || d.r + d.s != n {
            return Err(Error::Dimension("weights or signature do not match the rank".into()));
        }
        let mut terms = Vec::new();
        if d.r >= 1 {
            terms.push(d.a[d.r - 1] + d.s as i64 + d.m_sigma - d.m_bar);
        }
        if d.s >= 1 {
            terms.push(d.a[d.s - 1] + d.r as i64 + d.m_bar - d.m_sigma);
        }
        for t in terms {
            bound = Some(bound.map_or(t, |b| b.min(t)));
        }
    }
    let Some(hi) = bound else {
        return Err(Error::Dimension("no bounding term".into()));
    };
    let shift = n as i64 - 1;
    Ok((n as i64 + 1..=hi).map(|x| Half(2 * x - shift)).collect())
}

/// Infinity type of Pi at sigma from the unitary weights:
/// A_{sigma,i} = -a_i - (n+1)/2 + i for i = 1..n, returned in decreasing order
/// (the formula itself increases with i).
pub fn unitary_infinity_type(a: &[i64]) -> Vec<Half> {
    let n = a.len() as i64;
    let mut out: Vec<Half> = (1..=n)
        .map(|i| Half(-2 * a[(i - 1) as usize] - (n + 1) + 2 * i))
        .collect();
    out.sort_by(|x, y| y.cmp(x));
    out
}

/// Index s_sigma in the tensor with the restriction of psi~, from the dictionary
/// s_sigma = n - I_sigma(Pi, psi~). psi~ = psi / psi^c has exponent
/// m_bar - m_sigma at sigma.
pub fn guerberoff_s_index(a: &[i64], m_sigma: i64, m_bar: i64) -> usize {
    let big_a = unitary_infinity_type(a);
    let d = m_bar - m_sigma;
    // A_{bar s,i} = -A_{s,i} since w(Pi) = 0
    let i = big_a.iter().filter(|x| x.0 + 2 * d < 0).count();
    a.len() - i
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicates {
    pub polarized_necessary: bool,
    pub sufficiently_regular: bool,
    pub good_position: bool,
}

/// {A_{s,i}} = {-A_{bar s,i}} at every sigma.
pub fn polarized_necessary(pi: &InfinityType) -> bool {
    pi.labels.iter().enumerate().all(|(k, l)| {
        let Ok(ab) = pi.at(&bar_label(l)) else { return false };
        let mut x: Vec<i64> = pi.a[k].iter().map(|h| h.0).collect();
        let mut y: Vec<i64> = ab.iter().map(|h| -h.0).collect();
        x.sort();
        y.sort();
        x == y
    })
}

/// All |A_{s,i} - A_{s,i'}| >= gap for i != i'.
pub fn sufficiently_regular(pi: &InfinityType, gap: i64) -> bool {
    pi.a.iter().all(|list| {
        (0..list.len()).all(|i| (0..i).all(|j| (list[i].0 - list[j].0).abs() >= 2 * gap))
    })
}

/// The numbers -B_j fall in pairwise distinct gaps of -(w(Pi)+w(Pi'))/2 + A_i.
pub fn good_position(pi: &InfinityType, pi2: &InfinityType) -> Result<bool> {
    if pi.n <= pi2.n {
        return Err(Error::Unsupported(format!(
            "good position needs n > n' (got {} and {})",
            pi.n, pi2.n
        )));
    }
    // doubled: compare -2B_j with 2A_i - (w + w')
    let c = pi.weight.0 + pi2.weight.0;
    for l in &pi.labels {
        let a = pi.at(l)?;
        let b = pi2.at(l)?;
        let mut seen = Vec::new();
        for bj in b {
            let x = -2 * bj.0;
            if a.iter().any(|ai| 2 * ai.0 - c == x) {
                return Ok(false);
            }
            let gap = a.iter().filter(|ai| 2 * ai.0 - c > x).count();
            if seen.contains(&gap) {
                return Ok(false);
            }
            seen.push(gap);
        }
    }
    Ok(true)
}

pub fn predicates(pi: &InfinityType, pi2: &InfinityType, gap: i64) -> Result<Predicates> {
    Ok(Predicates {
        polarized_necessary: polarized_necessary(pi) && polarized_necessary(pi2),
        sufficiently_regular: sufficiently_regular(pi, gap) && sufficiently_regular(pi2, gap),
        good_position: good_position(pi, pi2)?,
    })
}

/// b_n(F) = n(n-1)d/2 for F CM of degree 2d, with b_n + b_{n-1} = (n-1)^2 d.
pub fn cohomology_degree(n: u64, degree_f: u64) -> Result<(u64, u64)> {
    if degree_f == 0 || degree_f % 2 != 0 {
        return Err(Error::NotCm(format!("a CM field has even degree, got {}", degree_f)));
    }
    let d = degree_f / 2;
    let b = |k: u64| k * k.saturating_sub(1) * d / 2;
    let prev = if n == 0 { 0 } else { b(n - 1) };
    Ok((b(n), b(n) + prev))
}

/// Exponent of 2 pi i in the tensor factorization, n n' (n + n' - 2) / 2.
pub fn tensor_two_pi_i_exponent(n: u64, n2: u64) -> u64 {
    n * n2 * (n + n2).saturating_sub(2) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: &[&str]) -> Vec<Half> {
        v.iter().map(|s| Half::parse(s).unwrap()).collect()
    }

    #[test]
    fn half_roundtrip() {
        for s in ["3/2", "-3/2", "4", "-1", "0"] {
            assert_eq!(Half::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Half::parse("6/2").unwrap().to_string(), "3");
        assert!(Half::parse("1/3").is_err());
    }

    #[test]
    fn hodge_from_rank_two_type() {
        let pi = InfinityType::new(
            2,
            Half(0),
            "t1",
            vec![("s1".into(), h(&["3/2", "-3/2"])), ("bar(s1)".into(), h(&["3/2", "-3/2"]))],
        )
        .unwrap();
        let hx = hodge_from_infinity(&pi).unwrap();
        assert_eq!(hx.w, 1);
        assert_eq!(hx.at("s1").unwrap(), &[2, -1]);
        assert!(polarized_necessary(&pi));
        // sorted conjugate list was re-indexed by the pairing
        assert_eq!(pi.at("bar(s1)").unwrap(), &h(&["-3/2", "3/2"])[..]);
    }

    #[test]
    fn rank_one_exponent() {
        let chi = InfinityType::new(1, Half(4), "t1", vec![("s1".into(), h(&["5"])), ("bar(s1)".into(), h(&["-3"]))])
            .unwrap();
        let hx = hodge_from_infinity(&chi).unwrap();
        assert_eq!(hx.at("s1").unwrap(), &[-5]);
        assert_eq!(hx.w, -2);
    }

    #[test]
    fn rejects_bad_types() {
        let e = InfinityType::new(2, Half(0), "t1", vec![("s1".into(), h(&["1", "0"])), ("bar(s1)".into(), h(&["0", "-1"]))]);
        assert!(e.is_err());
        let e = InfinityType::new(
            2,
            Half(0),
            "t1",
            vec![("s1".into(), h(&["1/2", "3/2"])), ("bar(s1)".into(), h(&["-1/2", "-3/2"]))],
        );
        assert!(e.is_err());
        let e = InfinityType::new(
            2,
            Half(0),
            "t1",
            vec![("s1".into(), h(&["3/2", "1/2"])), ("bar(s1)".into(), h(&["5/2", "1/2"]))],
        );
        assert!(e.is_err());
    }

    #[test]
    fn split_example() {
        let (a, b) = split_indices(&[3, 0], 3, &[1], 2).unwrap();
        assert_eq!(a, vec![0, 1, 0]);
        assert_eq!(b, vec![1, 1]);
        assert!(matches!(split_indices(&[2, 1], 3, &[0], 1), Err(Error::MiddleClass(_))));
    }

    #[test]
    fn i_sigma_counts() {
        // differences A_s - A_bar s + a_s - a_bar s = (4, -2)
        let pi = InfinityType::new(
            2,
            Half(0),
            "t1",
            vec![("s1".into(), h(&["3/2", "-3/2"])), ("bar(s1)".into(), h(&["-3/2", "3/2"]))],
        )
        .unwrap();
        let chi = InfinityType::new(1, Half(0), "t1", vec![("s1".into(), h(&["1/2"])), ("bar(s1)".into(), h(&["-1/2"]))]);
        // rank 1 needs integral parameters
        assert!(chi.is_err());
        let chi = InfinityType::new(1, Half(0), "t1", vec![("s1".into(), h(&["1"])), ("bar(s1)".into(), h(&["-1"]))])
            .unwrap();
        // 3 + 2 = 5 > 0 and -3 + 2 = -1 < 0
        assert_eq!(i_sigma(&pi, &chi, "s1").unwrap(), 1);
        let chi0 = InfinityType::new(1, Half(0), "t1", vec![("s1".into(), h(&["4"])), ("bar(s1)".into(), h(&["-4"]))])
            .unwrap();
        assert_eq!(i_sigma(&pi, &chi0, "s1").unwrap(), 0);
    }

    #[test]
    fn critical_examples() {
        assert_eq!(critical_points(&[(0, 1), (1, 0)]).unwrap(), vec![1]);
        assert_eq!(critical_points(&[(0, 3), (3, 0)]).unwrap(), vec![1, 2, 3]);
        assert!(matches!(critical_points(&[(1, 1), (0, 2), (2, 0)]), Err(Error::MiddleClass(_))));
    }

    #[test]
    fn unitary_range_examples() {
        let d = UnitaryData { a: vec![3, -3], r: 1, s: 1, m_sigma: 0, m_bar: 0 };
        // bound = min(3 + 1, 3 + 1) = 4, so m + 1/2 in {3, 4}
        let got = critical_range_unitary(2, &[d]).unwrap();
        assert_eq!(got, vec![Half(5), Half(7)]);
        let d = UnitaryData { a: vec![1, -1], r: 1, s: 1, m_sigma: 0, m_bar: 0 };
        assert!(critical_range_unitary(2, &[d]).unwrap().is_empty());
    }

    #[test]
    fn degrees() {
        assert_eq!(cohomology_degree(3, 4).unwrap().0, 6);
        assert_eq!(cohomology_degree(1, 2).unwrap().0, 0);
        assert_eq!(cohomology_degree(2, 2).unwrap(), (1, 1));
        assert!(cohomology_degree(2, 3).is_err());
    }

    #[test]
    fn good_position_interleaved() {
        let pi = InfinityType::new(
            3,
            Half(0),
            "t1",
            vec![("s1".into(), h(&["4", "0", "-4"])), ("bar(s1)".into(), h(&["-4", "0", "4"]))],
        )
        .unwrap();
        let pi2 = InfinityType::new(
            2,
            Half(0),
            "t1",
            vec![("s1".into(), h(&["5/2", "-5/2"])), ("bar(s1)".into(), h(&["-5/2", "5/2"]))],
        )
        .unwrap();
        assert!(good_position(&pi, &pi2).unwrap());
        let pi3 = InfinityType::new(
            2,
            Half(0),
            "t1",
            vec![("s1".into(), h(&["3/2", "1/2"])), ("bar(s1)".into(), h(&["-3/2", "-1/2"]))],
        )
        .unwrap();
        assert!(!good_position(&pi, &pi3).unwrap());
        assert!(good_position(&pi2, &pi).is_err());
        assert!(!sufficiently_regular(&pi2, 6));
        assert!(sufficiently_regular(&pi, 4));
    }
}
