//! Single-shot commands.

use crate::{json_arg, read_json, Backend, BackendArgs, CliError, Finding, FormulaArgs, RewriteArgs, SplitArgs, Verdict};
use periodkit::error::Error;
use periodkit::hodge_combinatorics::{critical_points, split_index_table, split_indices, Half, InfinityType};
use periodkit::motive_model::{validate, MotiveData};
use periodkit::period_engine::{
    e_sigma, local_deligne_period, motivic_q, q_cumulative, sigma_determinant_period,
};
use periodkit::period_terms::{
    canonicalize, check_equivalence, derivation_44, emit_automorphic_rhs, emit_deligne_rhs, emit_guer_rhs,
    emit_local_tensor_rhs, emit_n1motive_rhs, guerberoff_trace, parse_char, parse_expr, parse_motive, parse_ring,
    rule_set, Assumption, Expr, GuerberoffCase, Schedule, Universe,
};
use periodkit::scalar_algebra::backend::float_ctx;
use periodkit::scalar_algebra::{Backend as ScalarBackend, Ball, Cyclo, CycloField, FieldPair, NumberField, ZeroTest};
use serde_json::{json, Value};
use std::path::Path;

/// Call a function generic in the scalar backend with the selected context.
macro_rules! with_backend {
    ($sel:expr, $f:ident ( $($arg:expr),* )) => {
        match $sel {
            Backend::Exact(n) => $f::<Cyclo>(&CycloField::new(n), $($arg),*),
            Backend::Float(d) => $f::<Ball>(&float_ctx(d), $($arg),*),
        }
    };
}
pub(crate) use with_backend;

/// `label:c0,c1,...` with the coefficients of a monic polynomial, low to high.
pub(crate) fn parse_field(s: &str) -> Result<NumberField, CliError> {
    let (label, coeffs) = s
        .rsplit_once(':')
        .ok_or_else(|| CliError::usage(format!("field '{}' must look like label:c0,c1,...", s)))?;
    let coeffs = coeffs
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::usage(format!("bad coefficients in field '{}'", s)))?;
    Ok(NumberField::new(label.trim(), &coeffs)?)
}

pub(crate) fn backend_json(sel: Backend) -> Value {
    match sel {
        Backend::Exact(n) => json!({"mode": "exact", "conductor": n}),
        Backend::Float(d) => json!({"mode": "float", "digits": d}),
    }
}

pub fn decompose(b: &BackendArgs, e: &str, f: &str) -> Result<Finding, CliError> {
    let sel = b.select()?;
    let e = parse_field(e)?;
    let f = parse_field(f)?;
    with_backend!(sel, decompose_with(&e, &f, sel))
}

fn decompose_with<S: ScalarBackend>(ctx: &S::Ctx, e: &NumberField, f: &NumberField, sel: Backend) -> Result<Finding, CliError> {
    let p = FieldPair::<S>::new(ctx, e, f)?;
    let sum: usize = p.decomp.components.iter().map(|c| c.degree).sum();
    let product = e.degree() * f.degree();
    Ok(Finding {
        verdict: Verdict::from_bool(sum == product),
        result: json!({
            "backend": backend_json(sel),
            "E": p.e.summary(),
            "F": p.f.summary(),
            "decomposition": p.decomp.to_json(),
            "degree_check": {"sum_of_component_degrees": sum, "degree_product": product},
        }),
    })
}

fn load_motive<S: ScalarBackend>(ctx: &S::Ctx, path: &Path) -> Result<MotiveData<S>, CliError> {
    let v = read_json("motive data", path)?;
    Ok(MotiveData::<S>::from_json(ctx, &v)?)
}

pub fn validate_cmd(b: &BackendArgs, input: &Path) -> Result<Finding, CliError> {
    let sel = b.select()?;
    with_backend!(sel, validate_with(input))
}

fn validate_with<S: ScalarBackend>(ctx: &S::Ctx, input: &Path) -> Result<Finding, CliError> {
    let m = load_motive::<S>(ctx, input)?;
    let rep = validate(&m);
    Ok(Finding {
        verdict: Verdict::from_bool(rep.valid),
        result: serde_json::to_value(&rep).expect("validation reports serialize"),
    })
}

pub fn periods(b: &BackendArgs, input: &Path) -> Result<Finding, CliError> {
    let sel = b.select()?;
    with_backend!(sel, periods_with(input))
}

fn periods_with<S: ScalarBackend>(ctx: &S::Ctx, input: &Path) -> Result<Finding, CliError> {
    let m = load_motive::<S>(ctx, input)?;
    let rep = validate(&m);
    if !rep.valid {
        return Ok(Finding {
            verdict: Verdict::Fail,
            result: json!({"validation": serde_json::to_value(&rep).expect("validation reports serialize")}),
        });
    }
    let p = &m.pair;
    let mut verdict = Verdict::Pass;
    let mut out = Vec::new();
    for s in 0..p.half() {
        let cp = local_deligne_period(&m, s, true)?;
        let cm = local_deligne_period(&m, s, false)?;
        let e = e_sigma(&m, s);
        // c+ = e_sigma c- componentwise
        let mut sign = ZeroTest::Zero;
        for t in 0..p.num_tau() {
            let want = cm.tau_components[t].mul(&p.one().from_i64_like(e[t]));
            match want.sub(&cp.tau_components[t]).zero_test() {
                ZeroTest::NonZero => sign = ZeroTest::NonZero,
                ZeroTest::Unknown if sign == ZeroTest::Zero => sign = ZeroTest::Unknown,
                _ => {}
            }
        }
        verdict = verdict.max(match sign {
            ZeroTest::Zero => Verdict::Pass,
            ZeroTest::Unknown => Verdict::Inconclusive,
            ZeroTest::NonZero => Verdict::Fail,
        });
        let q = (0..m.n).map(|i| Ok(motivic_q(&m, s, i)?.to_json())).collect::<Result<Vec<_>, Error>>()?;
        let qc = (0..=m.n).map(|j| Ok(q_cumulative(&m, s, j)?.to_json())).collect::<Result<Vec<_>, Error>>()?;
        out.push(json!({
            "sigma": p.f.labels[s],
            "delta": sigma_determinant_period(&m, s)?.to_json(),
            "c_plus": cp.to_json(),
            "c_minus": cm.to_json(),
            "e_sigma": e,
            "sign_relation": format!("{:?}", sign).to_lowercase(),
            "Q": q,
            "Q_cumulative": qc,
        }));
    }
    Ok(Finding { verdict, result: json!({"label": m.label, "n": m.n, "w": m.w, "sigmas": out}) })
}

pub fn critical(hodge: &str) -> Result<Finding, CliError> {
    let pairs: Vec<(i64, i64)> = serde_json::from_str(hodge).map_err(|e| CliError::json("Hodge multiset", &e))?;
    match critical_points(&pairs) {
        Ok(pts) => Ok(Finding { verdict: Verdict::Pass, result: json!({"hodge": pairs, "critical_points": pts}) }),
        Err(Error::MiddleClass(why)) => Ok(Finding {
            verdict: Verdict::Fail,
            result: json!({"hodge": pairs, "critical_points": Value::Null, "refused": why}),
        }),
        Err(e) => Err(e.into()),
    }
}

pub fn split(a: &SplitArgs) -> Result<Finding, CliError> {
    match (&a.p, a.w, &a.r, a.w2, &a.input, &a.input2) {
        (Some(p), Some(w), Some(r), Some(w2), None, None) => {
            let p: Vec<i64> = serde_json::from_str(p).map_err(|e| CliError::json("exponents --p", &e))?;
            let r: Vec<i64> = serde_json::from_str(r).map_err(|e| CliError::json("exponents --r", &e))?;
            match split_indices(&p, w, &r, w2) {
                Ok((sp, sp2)) => Ok(Finding {
                    verdict: Verdict::from_bool(sp.iter().sum::<usize>() == r.len() && sp2.iter().sum::<usize>() == p.len()),
                    result: json!({"M": sp, "M'": sp2, "n": p.len(), "n'": r.len()}),
                }),
                Err(Error::MiddleClass(why)) => {
                    Ok(Finding { verdict: Verdict::Fail, result: json!({"refused": why}) })
                }
                Err(e) => Err(e.into()),
            }
        }
        (None, None, None, None, Some(i1), Some(i2)) => {
            let sel = a.backend.select()?;
            with_backend!(sel, split_with(i1, i2))
        }
        _ => Err(CliError::usage("give either --p --w --r --w2 or --input --input2")),
    }
}

fn split_with<S: ScalarBackend>(ctx: &S::Ctx, i1: &Path, i2: &Path) -> Result<Finding, CliError> {
    let m = load_motive::<S>(ctx, i1)?;
    // both motives must live over the same field pair
    let v2 = read_json("motive data", i2)?;
    let m2 = MotiveData::<S>::from_json_with_pair(&m.pair, &v2)?;
    match split_index_table(&m, &m2) {
        Ok(t) => Ok(Finding {
            verdict: Verdict::Pass,
            result: json!({"tau_labels": m.pair.e.labels, "sigma_labels": m.pair.f.labels[..m.pair.half()], "table": t.to_json()}),
        }),
        Err(Error::MiddleClass(why)) => Ok(Finding { verdict: Verdict::Fail, result: json!({"refused": why}) }),
        Err(e) => Err(e.into()),
    }
}

fn infinity_arg(what: &str, s: &Option<String>) -> Result<InfinityType, CliError> {
    let s = s.as_ref().ok_or_else(|| CliError::usage(format!("missing --{}", what)))?;
    Ok(InfinityType::from_json(&json_arg(what, s)?)?)
}

fn half_arg(m: &Option<String>) -> Result<Half, CliError> {
    let m = m.as_ref().ok_or_else(|| CliError::usage("missing --m"))?;
    Ok(Half::parse(m)?)
}

fn expr_json(e: &Expr) -> Value {
    json!({"text": e.render(), "expression": e.to_json()})
}

pub fn formula(a: &FormulaArgs) -> Result<Finding, CliError> {
    let refused = |e: Error| -> Result<Finding, CliError> {
        match e {
            Error::NotCritical(why) | Error::MiddleClass(why) => {
                Ok(Finding { verdict: Verdict::Fail, result: json!({"refused": why}) })
            }
            e => Err(e.into()),
        }
    };
    let emitted = match a.kind.as_str() {
        "deligne" | "rank-one" | "automorphic" => {
            let pi = infinity_arg("pi", &a.pi)?;
            let pi2 = infinity_arg("pi2", &a.pi2)?;
            let m = half_arg(&a.m)?;
            let m1 = parse_motive(&a.motive1)?;
            let m2 = parse_motive(&a.motive2)?;
            match a.kind.as_str() {
                "deligne" => emit_deligne_rhs(&pi, &m1, &pi2, &m2, m),
                "rank-one" => emit_n1motive_rhs(&pi, &m1, &pi2, &m2, m),
                _ => emit_automorphic_rhs(&pi, &a.motive1, &pi2, &a.motive2, m),
            }
        }
        "local-tensor" => {
            let pi = infinity_arg("pi", &a.pi)?;
            let pi2 = infinity_arg("pi2", &a.pi2)?;
            let sigma = a.sigma.as_deref().ok_or_else(|| CliError::usage("missing --sigma"))?;
            emit_local_tensor_rhs(&pi, &parse_motive(&a.motive1)?, &pi2, &parse_motive(&a.motive2)?, sigma)
        }
        "guerberoff" => {
            let case = a.case.as_ref().ok_or_else(|| CliError::usage("missing --case"))?;
            let case = GuerberoffCase::from_json(&json_arg("case", case)?)?;
            let m = match &a.m {
                Some(_) => half_arg(&a.m)?,
                None => case.m,
            };
            emit_guer_rhs(&case.data, &a.motive1, &parse_char(&a.psi)?, a.a0, m)
        }
        k => return Err(CliError::usage(format!("unknown formula kind '{}'", k))),
    };
    match emitted {
        Ok(e) => Ok(Finding { verdict: Verdict::Pass, result: expr_json(&e) }),
        Err(e) => refused(e),
    }
}

fn parse_assumption(s: &str) -> Result<Assumption, CliError> {
    ALL_ASSUMPTIONS
        .iter()
        .copied()
        .find(|a| a.to_string() == s)
        .ok_or_else(|| {
            let names: Vec<String> = ALL_ASSUMPTIONS.iter().map(|a| a.to_string()).collect();
            CliError::usage(format!("unknown assumption '{}'; known: {}", s, names.join(", ")))
        })
}

const ALL_ASSUMPTIONS: [Assumption; 3] = [Assumption::HypCrelle, Assumption::TateConjecture, Assumption::MotiveDescent];

fn parse_schedule(s: &str) -> Result<Schedule, CliError> {
    match s {
        "leftmost" => Ok(Schedule::Leftmost),
        "rightmost" => Ok(Schedule::Rightmost),
        _ => match s.strip_prefix("seed:").and_then(|k| k.parse().ok()) {
            Some(k) => Ok(Schedule::Seeded(k)),
            None => Err(CliError::usage(format!("unknown schedule '{}'", s))),
        },
    }
}

pub fn rewrite(a: &RewriteArgs) -> Result<Finding, CliError> {
    let mut assumptions: Vec<Assumption> = ALL_ASSUMPTIONS.to_vec();
    for w in &a.without {
        let off = parse_assumption(w)?;
        assumptions.retain(|x| *x != off);
    }
    let names: Vec<String> = assumptions.iter().map(|x| x.to_string()).collect();
    if let Some(d) = &a.derivation {
        let deriv = match d.as_str() {
            "local-periods" => {
                let n = a.n.ok_or_else(|| CliError::usage("missing --n"))?;
                let r = a.r.ok_or_else(|| CliError::usage("missing --r"))?;
                if n == 0 || r == 0 || r > n {
                    return Err(CliError::usage("need 1 <= r <= n"));
                }
                derivation_44(n, r, &assumptions)?
            }
            "guerberoff" => {
                let case = a.case.as_ref().ok_or_else(|| CliError::usage("missing --case"))?;
                let case = GuerberoffCase::from_json(&json_arg("case", case)?)?;
                guerberoff_trace(&case, &assumptions)?
            }
            k => return Err(CliError::usage(format!("unknown derivation '{}'", k))),
        };
        return Ok(Finding { verdict: Verdict::from_bool(deriv.succeeded()), result: deriv.to_json() });
    }
    let uni = a.universe.as_ref().ok_or_else(|| CliError::usage("missing --universe"))?;
    let uni = Universe::from_json(&json_arg("universe", uni)?)?;
    let rs = rule_set(&uni, &assumptions)?;
    if a.list_rules {
        return Ok(Finding { verdict: Verdict::Pass, result: json!({"assumptions": names, "rule_set": rs.listing()}) });
    }
    let text = a.expr.as_ref().ok_or_else(|| CliError::usage("missing --expr"))?;
    let level = match &a.level {
        Some(l) => parse_ring(l)?,
        None => uni.top_level(),
    };
    let e1 = parse_expr(text, level.clone())?;
    match &a.equiv {
        Some(other) => {
            let e2 = parse_expr(other, level.clone())?;
            let eq = check_equivalence(&rs, &e1, &e2, &level)?;
            Ok(Finding {
                verdict: Verdict::from_bool(eq.holds),
                result: json!({"assumptions": names, "lhs": expr_json(&e1), "rhs": expr_json(&e2), "equivalence": eq.to_json()}),
            })
        }
        None => {
            let c = canonicalize(&rs, &e1, parse_schedule(&a.schedule)?)?;
            let steps: Vec<Value> = c.steps.iter().map(|s| s.to_json()).collect();
            Ok(Finding {
                verdict: Verdict::Pass,
                result: json!({"assumptions": names, "input": expr_json(&e1), "canonical": expr_json(&c.expr), "trace": steps}),
            })
        }
    }
}
