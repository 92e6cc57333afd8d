use super::MotiveData;
use crate::scalar_algebra::emat;
use crate::scalar_algebra::{Backend, Matrix, ZeroTest};
use serde::Serialize;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub code: String,
    /// "pass", "fail" or "skip".
    pub status: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn failed_codes(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == "fail")
            .map(|c| c.code.as_str())
            .collect()
    }
}

fn check(code: &str, ok: Option<bool>, detail: String) -> Check {
    Check {
        code: code.to_string(),
        status: match ok {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "skip",
        }
        .to_string(),
        detail,
    }
}

/// Check every structural axiom of the data, one diagnostic code per axiom.
pub fn validate<S: Backend>(m: &MotiveData<S>) -> ValidationReport {
    let mut checks = Vec::new();
    let p = &m.pair;
    let (nt, ns, na) = (p.num_tau(), p.num_sigma(), p.decomp.num_components());
    let n = m.n;

    let mut dim_err = Vec::new();
    if m.hodge.len() != na {
        dim_err.push(format!("{} exponent lists for {} components", m.hodge.len(), na));
    }
    if m.hodge.iter().any(|h| h.len() != n) {
        dim_err.push("exponent list of wrong length".to_string());
    }
    if m.comparison.len() != nt || m.comparison.iter().any(|r| r.len() != ns) {
        dim_err.push("comparison table is not indexed by all (tau, sigma)".to_string());
    }
    if m.comparison
        .iter()
        .flatten()
        .any(|c| c.rows != n || c.cols != n)
    {
        dim_err.push("comparison matrix of wrong size".to_string());
    }
    if m.frobenius.len() != ns
        || m.frobenius
            .iter()
            .any(|f| f.len() != n || f.iter().any(|r| r.len() != n))
    {
        dim_err.push("Frobenius table malformed".to_string());
    }
    let dims_ok = dim_err.is_empty();
    checks.push(check("DIMENSION", Some(dims_ok), dim_err.join("; ")));
    if !dims_ok {
        return ValidationReport { valid: false, checks };
    }

    // comparison invertible
    let mut bad = Vec::new();
    for t in 0..nt {
        for s in 0..ns {
            match m.comparison[t][s].det().map(|d| d.zero_test()) {
                Ok(ZeroTest::NonZero) => {}
                Ok(z) => bad.push(format!("({},{}): det {:?}", p.e.labels[t], p.f.labels[s], z)),
                Err(e) => bad.push(format!("({},{}): {}", p.e.labels[t], p.f.labels[s], e)),
            }
        }
    }
    checks.push(check("COMPARISON_INVERTIBLE", Some(bad.is_empty()), bad.join("; ")));

    // Frobenius involution, exact over E
    let e = m.e();
    let mut bad = Vec::new();
    for s in 0..ns {
        let prod = emat::mul(e, &m.frobenius[p.bar(s)], &m.frobenius[s]);
        if !emat::is_identity(e, &prod) {
            bad.push(format!("F_{} F_{} != Id", p.f.labels[p.bar(s)], p.f.labels[s]));
        }
    }
    let invol_ok = bad.is_empty();
    checks.push(check("FROB_INVOLUTION", Some(invol_ok), bad.join("; ")));

    // exponent reflection forced by the Hodge swap
    let mut bad = Vec::new();
    for a in 0..na {
        let c = p.conj_alpha[a];
        for i in 0..n {
            if m.hodge[c][i] != m.w - m.hodge[a][n - 1 - i] {
                bad.push(format!("component {} index {}", a, i + 1));
            }
        }
    }
    checks.push(check("FROB_EXPONENT_REFLECTION", Some(bad.is_empty()), bad.join("; ")));

    checks.push(check(
        "HODGE_ALPHA_KEYS",
        Some(true),
        "exponents stored per component".to_string(),
    ));

    if m.regular {
        let ok = m.is_regular_data();
        checks.push(check(
            "REGULARITY",
            Some(ok),
            if ok { String::new() } else { "exponent list not strictly decreasing".to_string() },
        ));
    } else {
        checks.push(check("REGULARITY", None, "regularity not claimed".to_string()));
    }

    let middle = m.has_middle_class();
    if m.no_middle_class {
        checks.push(check(
            "MIDDLE_FLAG",
            Some(!middle),
            if middle { "a (w/2, w/2) class is present".to_string() } else { String::new() },
        ));
    } else {
        checks.push(check(
            "MIDDLE_FLAG",
            None,
            format!("flag not set; middle class present: {}", middle),
        ));
    }

    // Frobenius carries the Hodge filtration at sigma to one opposed to it
    if invol_ok {
        let mut bad = Vec::new();
        for t in 0..nt {
            for s in 0..ns {
                if let Err(d) = opposed(m, t, s) {
                    bad.push(format!("({},{}): {}", p.e.labels[t], p.f.labels[s], d));
                }
            }
        }
        checks.push(check("HODGE_SWAP", Some(bad.is_empty()), bad.join("; ")));
    } else {
        checks.push(check("HODGE_SWAP", None, "Frobenius is not an involution".to_string()));
    }

    let valid = checks.iter().all(|c| c.status != "fail");
    ValidationReport { valid, checks }
}

/// F^p at sigma and the Frobenius transport of F^{w-p+1} at bar sigma must
/// be complementary for every p.
fn opposed<S: Backend>(m: &MotiveData<S>, tau: usize, sigma: usize) -> Result<(), String> {
    let n = m.n;
    let sb = m.pair.bar(sigma);
    let g = m.comparison[tau][sb]
        .mul(&m.frobenius_at(tau, sigma))
        .and_then(|x| x.mul(&m.comparison[tau][sigma].inverse()?))
        .map_err(|e| e.to_string())?;
    let ginv = g.inverse().map_err(|e| e.to_string())?;
    let ex = m.exponents(tau, sigma);
    let exb = m.exponents(tau, sb);
    let mut values: Vec<i64> = ex.to_vec();
    values.sort();
    values.dedup();
    let like = m.comparison[tau][sigma].like().clone();
    for &pv in &values {
        let a: Vec<usize> = (0..n).filter(|&i| ex[i] >= pv).collect();
        let b: Vec<usize> = (0..n).filter(|&i| exb[i] >= m.w - pv + 1).collect();
        if a.len() + b.len() != n {
            return Err(format!("filtration ranks {} + {} at p = {}", a.len(), b.len(), pv));
        }
        let mat = Matrix::from_fn(n, n, |r, c| {
            if c < a.len() {
                if r == a[c] { like.one_like() } else { like.zero_like() }
            } else {
                ginv.get(r, b[c - a.len()]).clone()
            }
        });
        match mat.det().map(|d| d.zero_test()) {
            Ok(ZeroTest::NonZero) => {}
            Ok(ZeroTest::Zero) => return Err(format!("filtrations meet at p = {}", pv)),
            _ => return Err(format!("undecidable at p = {}", pv)),
        }
    }
    Ok(())
}
