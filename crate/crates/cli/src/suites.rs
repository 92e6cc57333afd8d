//! Seeded verification sweeps.
//!
//! Item k draws from a ChaCha stream numbered k under the run seed, so an
//! item's data does not depend on which worker ran it or in what order.

use crate::commands::{backend_json, parse_field, with_backend};
use crate::{Backend, CliError, Finding, Verdict, VerifyArgs};
use periodkit::error::{Error, Result};
use periodkit::motive_model::{random_hodge, synthesize_motive, validate, MotiveData, SyntheticSpec};
use periodkit::period_engine::{
    e_sigma, local_deligne_period, motivic_q_at, n_sigma, verify_conjugacy, verify_global_factorization,
    verify_tensor_formula,
};
use periodkit::scalar_algebra::backend::float_ctx;
use periodkit::scalar_algebra::{Backend as ScalarBackend, Ball, Cyclo, CycloField, FieldPair, Membership, NumberField, Scalar, ZeroTest};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

const SUITES: [&str; 5] = ["tensor", "global", "conjugacy", "planted", "sign"];
const DEFAULT_PAIR: &str = "Q:0,1/Q(i):1,0,1";
/// Redraws allowed when a draw forces a middle Hodge class.
const ATTEMPTS: usize = 64;

/// Scalars that can bound their distance to a reference value.
pub trait Closeness: Scalar {
    /// Upper bound for |self - exact| / |exact|; None for exact arithmetic.
    fn rel_bound(&self, exact: &Self) -> Option<f64>;
}

impl Closeness for Cyclo {
    fn rel_bound(&self, _: &Self) -> Option<f64> {
        None
    }
}

impl Closeness for Ball {
    fn rel_bound(&self, exact: &Self) -> Option<f64> {
        Some(self.rel_error_to(exact))
    }
}

/// Compare `got` with `want`: exact zero test, or the tolerance in float mode.
fn compare<S: Closeness>(got: &S, want: &S, tol: f64, worst: &mut f64) -> Verdict {
    let zt = got.sub(want).zero_test();
    match got.rel_bound(want) {
        None => match zt {
            ZeroTest::Zero => Verdict::Pass,
            ZeroTest::NonZero => Verdict::Fail,
            ZeroTest::Unknown => Verdict::Inconclusive,
        },
        Some(b) => {
            *worst = worst.max(b);
            if b <= tol {
                Verdict::Pass
            } else if zt == ZeroTest::NonZero {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            }
        }
    }
}

fn membership_verdict(m: &Membership) -> Verdict {
    match m {
        Membership::Member { .. } => Verdict::Pass,
        Membership::Absent => Verdict::Fail,
        Membership::Unknown => Verdict::Inconclusive,
    }
}

/// Item labels: membership suites speak of members, the others of passes.
fn item_label(suite: &str, v: Verdict) -> &'static str {
    match (suite, v) {
        ("tensor" | "global" | "conjugacy", Verdict::Pass) => "member",
        ("tensor" | "global" | "conjugacy", Verdict::Fail) => "absent",
        (_, v) => v.label(),
    }
}

pub fn verify(a: &VerifyArgs, progress: bool) -> std::result::Result<Finding, CliError> {
    let sel = a.backend.select()?;
    if !SUITES.contains(&a.suite.as_str()) {
        return Err(CliError::usage(format!("unknown suite '{}'; known: {}", a.suite, SUITES.join(", "))));
    }
    if a.max_n == 0 || a.max_n2 == 0 {
        return Err(CliError::usage("ranks must be at least 1"));
    }
    if !(a.tolerance > 0.0) {
        return Err(CliError::usage("--tolerance must be positive"));
    }
    let specs: Vec<String> = if a.pairs.is_empty() { vec![DEFAULT_PAIR.to_string()] } else { a.pairs.clone() };
    let mut fields = Vec::new();
    for s in &specs {
        let (e, f) = s
            .split_once('/')
            .ok_or_else(|| CliError::usage(format!("pair '{}' must look like E/F", s)))?;
        fields.push((parse_field(e)?, parse_field(f)?));
    }
    with_backend!(sel, sweep(a, &fields, sel, progress))
}

struct Item {
    verdict: Verdict,
    body: Value,
}

fn sweep<S: ScalarBackend + Closeness + Send + Sync>(
    ctx: &S::Ctx,
    a: &VerifyArgs,
    fields: &[(NumberField, NumberField)],
    sel: Backend,
    progress: bool,
) -> std::result::Result<Finding, CliError>
where
    S::Ctx: Send + Sync,
{
    let pairs = fields
        .iter()
        .map(|(e, f)| FieldPair::<S>::new(ctx, e, f))
        .collect::<Result<Vec<_>>>()?;
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, a.count.max(1));
    let next = AtomicUsize::new(0);
    let done: Mutex<BTreeMap<usize, Item>> = Mutex::new(BTreeMap::new());
    std::thread::scope(|sc| {
        for _ in 0..jobs {
            sc.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= a.count {
                    break;
                }
                let p = &pairs[k % pairs.len()];
                let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                rng.set_stream(k as u64);
                let item = match run_item(&a.suite, p, a, &mut rng) {
                    Ok(mut it) => {
                        it.body["verdict"] = json!(item_label(&a.suite, it.verdict));
                        it
                    }
                    Err(e) => Item { verdict: Verdict::Fail, body: json!({"verdict": "error", "error": e.to_string()}) },
                };
                let mut body = item.body;
                body["index"] = json!(k);
                body["pair"] = json!(format!("{}/{}", p.e.field.label, p.f.field.label));
                if progress {
                    eprintln!("{}", json!({"index": k, "verdict": body["verdict"]}));
                }
                done.lock().unwrap().insert(k, Item { verdict: item.verdict, body });
            });
        }
    });
    let done = done.into_inner().unwrap();
    let mut tallies: BTreeMap<String, usize> = BTreeMap::new();
    let mut verdict = Verdict::Pass;
    let mut items = Vec::with_capacity(done.len());
    for (_, it) in done {
        verdict = verdict.max(it.verdict);
        *tallies.entry(it.body["verdict"].as_str().unwrap_or("error").to_string()).or_default() += 1;
        items.push(it.body);
    }
    Ok(Finding {
        verdict,
        result: json!({
            "suite": a.suite,
            "count": a.count,
            "seed": a.seed,
            "backend": backend_json(sel),
            "pairs": fields.iter().map(|(e, f)| format!("{}/{}", e.label, f.label)).collect::<Vec<_>>(),
            "tallies": tallies,
            "items": items,
        }),
    })
}

/// A synthetic motive of rank at most max_n with random weight and regular
/// Hodge data, or None when every draw forced a middle class. Rank and weight
/// are redrawn together: a self-conjugate component of E (x) F admits no odd
/// rank without a middle class.
fn draw<S: ScalarBackend>(p: &Arc<FieldPair<S>>, max_n: usize, label: &str, rng: &mut ChaCha8Rng) -> Result<Option<MotiveData<S>>> {
    for _ in 0..ATTEMPTS {
        let n = rng.gen_range(1..=max_n);
        let w = rng.gen_range(0..=5);
        match random_hodge(p, n, w, 4, true, rng) {
            Ok(h) => {
                let mut spec = SyntheticSpec::new(label, n, w, h, rng.gen());
                spec.random_epsilon = true;
                return synthesize_motive(p, &spec).map(Some);
            }
            Err(Error::MiddleClass(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn skipped() -> Item {
    Item { verdict: Verdict::Inconclusive, body: json!({"skipped": "every draw had a middle Hodge class"}) }
}

fn run_item<S: ScalarBackend + Closeness>(suite: &str, p: &Arc<FieldPair<S>>, a: &VerifyArgs, rng: &mut ChaCha8Rng) -> Result<Item> {
    match suite {
        "tensor" => tensor_item(p, a, rng),
        "global" => global_item(p, a, rng),
        "conjugacy" => conjugacy_item(p, a, rng),
        "planted" => planted_item(p, a, rng),
        _ => sign_item(p, a, rng),
    }
}

fn tensor_item<S: ScalarBackend>(p: &Arc<FieldPair<S>>, a: &VerifyArgs, rng: &mut ChaCha8Rng) -> Result<Item> {
    for _ in 0..ATTEMPTS {
        let (Some(m), Some(m2)) = (draw(p, a.max_n, "M", rng)?, draw(p, a.max_n2, "M'", rng)?) else { return Ok(skipped()) };
        let mut verdict = Verdict::Pass;
        let mut sigmas = Vec::new();
        let mut middle = false;
        for s in 0..p.half() {
            match verify_tensor_formula(&m, &m2, s, None) {
                Ok(r) => {
                    verdict = verdict.max(membership_verdict(&r.membership));
                    let mut j = r.to_json();
                    j["sigma"] = json!(p.f.labels[s]);
                    sigmas.push(j);
                }
                Err(Error::MiddleClass(_)) => {
                    middle = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if middle {
            continue;
        }
        return Ok(Item { verdict, body: json!({"n": m.n, "n'": m2.n, "w": m.w, "w'": m2.w, "sigmas": sigmas}) });
    }
    Ok(skipped())
}

fn global_item<S: ScalarBackend + Closeness>(p: &Arc<FieldPair<S>>, a: &VerifyArgs, rng: &mut ChaCha8Rng) -> Result<Item> {
    let Some(m) = draw(p, a.max_n, "M", rng)? else { return Ok(skipped()) };
    let rep = verify_global_factorization(&m, None)?;
    let mut verdict = Verdict::Pass;
    for c in &rep.checks {
        verdict = verdict.max(membership_verdict(&c.membership));
    }
    // c+-(M_Q) against the assembled product of local periods
    let mut worst = 0.0f64;
    for (predicted, global) in rep.assembly_predicted.iter().zip([&rep.periods.c_plus, &rep.periods.c_minus]) {
        for (x, y) in predicted.iter().zip(&global.tau_components) {
            verdict = verdict.max(compare(x, y, a.tolerance, &mut worst));
        }
    }
    let mut body = rep.to_json();
    body["n"] = json!(m.n);
    body["w"] = json!(m.w);
    if !p.one().is_exact() {
        body["max_relative_error"] = json!(format!("{:.3e}", worst));
    }
    Ok(Item { verdict, body })
}

fn conjugacy_item<S: ScalarBackend + Closeness>(p: &Arc<FieldPair<S>>, a: &VerifyArgs, rng: &mut ChaCha8Rng) -> Result<Item> {
    let Some(m) = draw(p, a.max_n, "M", rng)? else { return Ok(skipped()) };
    let n = m.n;
    let mut verdict = Verdict::Pass;
    let mut checks = Vec::new();
    for s in 0..p.half() {
        for j in 0..=n {
            let r = verify_conjugacy(&m, s, j, None)?;
            let mut v = membership_verdict(&r.membership);
            let mut worst = 0.0f64;
            if let Some(expected) = &r.expected {
                for (x, y) in r.ratio.tau_components.iter().zip(expected) {
                    v = v.max(compare(x, y, a.tolerance, &mut worst));
                }
            }
            verdict = verdict.max(v);
            checks.push(json!({
                "sigma": p.f.labels[s],
                "j": j,
                "membership": r.membership,
                "matches_expected": v == Verdict::Pass,
                "ratio": r.ratio.to_json(),
            }));
        }
    }
    Ok(Item { verdict, body: json!({"n": n, "w": m.w, "checks": checks}) })
}

fn planted_item<S: ScalarBackend + Closeness>(p: &Arc<FieldPair<S>>, a: &VerifyArgs, rng: &mut ChaCha8Rng) -> Result<Item> {
    let Some(m) = draw(p, a.max_n, "M", rng)? else { return Ok(skipped()) };
    let n = m.n;
    let rep = validate(&m);
    if !rep.valid {
        return Ok(Item { verdict: Verdict::Fail, body: json!({"n": n, "invalid": rep.failed_codes()}) });
    }
    let planted = m.planted.as_ref().expect("synthetic data records what was planted");
    let mut verdict = Verdict::Pass;
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for t in 0..p.num_tau() {
        for s in 0..p.num_sigma() {
            let got = motivic_q_at(&m, t, s)?;
            for (x, y) in got.iter().zip(&planted.q[t][s]) {
                verdict = verdict.max(compare(x, y, a.tolerance, &mut worst));
                compared += 1;
            }
        }
    }
    let mut body = json!({"n": n, "w": m.w, "compared": compared});
    if !p.one().is_exact() {
        body["max_relative_error"] = json!(format!("{:.3e}", worst));
    }
    Ok(Item { verdict, body })
}

fn sign_item<S: ScalarBackend + Closeness>(p: &Arc<FieldPair<S>>, a: &VerifyArgs, rng: &mut ChaCha8Rng) -> Result<Item> {
    let Some(m) = draw(p, a.max_n, "M", rng)? else { return Ok(skipped()) };
    let n = m.n;
    let rep = validate(&m);
    if !rep.valid {
        return Ok(Item { verdict: Verdict::Fail, body: json!({"n": n, "invalid": rep.failed_codes()}) });
    }
    let mut verdict = Verdict::Pass;
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for s in 0..p.num_sigma() {
        let cp = local_deligne_period(&m, s, true)?;
        let cm = local_deligne_period(&m, s, false)?;
        let e = e_sigma(&m, s);
        for t in 0..p.num_tau() {
            let want = cm.tau_components[t].mul(&p.one().from_i64_like(e[t]));
            verdict = verdict.max(compare(&cp.tau_components[t], &want, a.tolerance, &mut worst));
        }
        rows.push(json!({"sigma": p.f.labels[s], "n_sigma": n_sigma(&m, s), "e_sigma": e}));
    }
    Ok(Item { verdict, body: json!({"n": n, "w": m.w, "sigmas": rows}) })
}
