//! Symbolic period expressions and the equivalence relations between them.
//!
//! An expression is a Laurent monomial in period atoms together with an
//! equivalence level `~_{A;L}`. Relations are oriented rewrite rules; each
//! rule rewrites one atom and carries the ring of the multiplier it
//! introduces, so a rule only fires when that ring is admissible at the level.

mod derive;
mod rules;
mod text;

pub use derive::{
    derivation_44, emit_automorphic_rhs, emit_deligne_rhs, emit_guer_rhs, emit_guermotive_rhs, emit_local_tensor_rhs, emit_n1motive_rhs,
    guerberoff_trace, Derivation, DerivationStep, GuerberoffCase, StepCheck,
};
pub use rules::{
    canonicalize, check_equivalence, rule_set, Assumption, Canonical, Equivalence, Relation, RepInfo, Rule,
    RuleKind, RuleSet, Schedule, TraceStep, Universe,
};
pub use text::{parse_atom, parse_char, parse_expr, parse_motive, parse_ring};

use crate::error::{Error, Result};
use crate::hodge_combinatorics::bar_label;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A formal product of Hecke characters `chi` and `chi^c`.
///
/// Keys are `(base name, conjugated)`. The modifiers act on the exponent
/// vector, so `chk(tld(chi)) = tld(chi)` holds identically.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharExpr(pub BTreeMap<(String, bool), i64>);

impl CharExpr {
    pub fn base(name: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert((name.to_string(), false), 1);
        CharExpr(m)
    }

    pub fn trivial() -> Self {
        CharExpr::default()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    /// A single factor `chi` or `chi^c` with exponent one.
    pub fn is_base(&self) -> bool {
        self.0.len() == 1 && self.0.values().all(|&e| e == 1)
    }

    pub fn mul(&self, other: &CharExpr) -> CharExpr {
        let mut m = self.0.clone();
        for (k, e) in &other.0 {
            *m.entry(k.clone()).or_insert(0) += e;
        }
        m.retain(|_, e| *e != 0);
        CharExpr(m)
    }

    pub fn pow(&self, k: i64) -> CharExpr {
        if k == 0 {
            return CharExpr::trivial();
        }
        CharExpr(self.0.iter().map(|(b, e)| (b.clone(), e * k)).collect())
    }

    pub fn inv(&self) -> CharExpr {
        self.pow(-1)
    }

    /// `chi^c`.
    pub fn conj(&self) -> CharExpr {
        CharExpr(self.0.iter().map(|((b, c), e)| ((b.clone(), !c), *e)).collect())
    }

    /// `chi^{c,-1}`.
    pub fn check(&self) -> CharExpr {
        self.conj().inv()
    }

    /// `chi / chi^c`.
    pub fn tilde(&self) -> CharExpr {
        self.mul(&self.conj().inv())
    }

    pub fn bases(&self) -> BTreeSet<&str> {
        self.0.keys().map(|(b, _)| b.as_str()).collect()
    }

    /// Factors as single-factor characters with their exponents.
    pub fn factors(&self) -> Vec<(CharExpr, i64)> {
        self.0
            .iter()
            .map(|(k, e)| {
                let mut m = BTreeMap::new();
                m.insert(k.clone(), 1);
                (CharExpr(m), *e)
            })
            .collect()
    }

    pub fn coeff_tags(&self) -> BTreeSet<String> {
        self.bases().into_iter().map(coeff_tag).collect()
    }
}

impl fmt::Display for CharExpr {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|((b, c), e)| {
                let s = if *c { format!("c({})", b) } else { b.clone() };
                if *e == 1 {
                    s
                } else {
                    format!("{}^{}", s, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("."))
    }
}

pub fn coeff_tag(name: &str) -> String {
    format!("E({})", name)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MotiveBase {
    /// M(Pi) for a representation, or a motive over F+ declared as a descent.
    Named(String),
    /// M(chi) for a Hecke character.
    Hecke(CharExpr),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MotiveRef {
    pub base: MotiveBase,
    pub conj: bool,
    pub dual: bool,
}

impl MotiveRef {
    pub fn named(id: &str) -> Self {
        MotiveRef { base: MotiveBase::Named(id.to_string()), conj: false, dual: false }
    }

    pub fn hecke(chi: CharExpr) -> Self {
        MotiveRef { base: MotiveBase::Hecke(chi), conj: false, dual: false }
    }

    pub fn conjugate(&self) -> Self {
        MotiveRef { conj: !self.conj, ..self.clone() }
    }

    /// Duals of Hecke motives are folded into the character.
    pub fn dual(&self) -> Self {
        match &self.base {
            MotiveBase::Hecke(chi) => MotiveRef { base: MotiveBase::Hecke(chi.inv()), ..self.clone() },
            MotiveBase::Named(_) => MotiveRef { dual: !self.dual, ..self.clone() },
        }
    }

    pub fn plain(&self) -> Self {
        MotiveRef { base: self.base.clone(), conj: false, dual: false }
    }
}

impl fmt::Display for MotiveRef {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let mut s = match &self.base {
            MotiveBase::Named(id) => id.clone(),
            MotiveBase::Hecke(chi) => format!("M({})", chi),
        };
        if self.dual {
            s = format!("dual({})", s);
        }
        if self.conj {
            s = format!("c({})", s);
        }
        write!(f, "{}", s)
    }
}

/// Rationality part of a coefficient ring: Q, sigma(F) or F^gal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rationality {
    Q,
    Sigma(String),
    Gal,
}

impl Rationality {
    pub fn within(&self, other: &Rationality) -> bool {
        match (self, other) {
            (Rationality::Q, _) => true,
            (Rationality::Sigma(_), Rationality::Gal) => true,
            // sigma(F) = bar(sigma)(F) for a CM field
            (Rationality::Sigma(a), Rationality::Sigma(b)) => a == b || bar_label(a) == *b,
            (Rationality::Gal, Rationality::Gal) => true,
            _ => false,
        }
    }
}

/// A ring `A (x) L` given by coefficient field tags and a rationality field.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ring {
    pub coeffs: BTreeSet<String>,
    pub rational: Rationality,
}

impl Ring {
    pub fn new<I: IntoIterator<Item = String>>(coeffs: I, rational: Rationality) -> Self {
        Ring { coeffs: coeffs.into_iter().collect(), rational }
    }

    pub fn rational() -> Self {
        Ring { coeffs: BTreeSet::new(), rational: Rationality::Q }
    }

    pub fn within(&self, level: &Ring) -> bool {
        self.coeffs.is_subset(&level.coeffs) && self.rational.within(&level.rational)
    }

    pub fn join(&self, other: &Ring) -> Ring {
        let rational = if self.rational.within(&other.rational) {
            other.rational.clone()
        } else if other.rational.within(&self.rational) {
            self.rational.clone()
        } else {
            Rationality::Gal
        };
        Ring { coeffs: self.coeffs.union(&other.coeffs).cloned().collect(), rational }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let c: Vec<&str> = self.coeffs.iter().map(|s| s.as_str()).collect();
        let r = match &self.rational {
            Rationality::Q => "Q".to_string(),
            Rationality::Gal => "Fgal".to_string(),
            Rationality::Sigma(s) => s.clone(),
        };
        write!(f, "{};{}", c.join(","), r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    TwoPiI,
    TwoPi,
    ImagUnit,
    DiscSqrt { field: String },
    AlphaProd { field: String },
    Unit { ring: Ring },
    /// p(chi, sigma); the embedding may be left unspecified.
    Cm { chi: CharExpr, sigma: Option<String> },
    Delta { motive: MotiveRef, sigma: String },
    Qi { motive: MotiveRef, sigma: String, i: u32 },
    Qj { motive: MotiveRef, sigma: String, j: u32 },
    Whittaker { rep: String },
    /// Q(psi~, sigma_0) for a Hermitian space of signature (r, s) at sigma.
    GuerQ { chi: CharExpr, sigma: String, r: u32, s: u32 },
    GuerP { chi: CharExpr },
    /// Normalized Petersson norm Q_V(pi), with the signature (r, s) per sigma.
    Petersson { rep: String, signature: BTreeMap<String, (u32, u32)> },
    PGlobal { rep: String, index: BTreeMap<String, u32> },
    PLocal { rep: String, sigma: String, r: u32 },
}

impl Atom {
    pub fn motive(&self) -> Option<&MotiveRef> {
        match self {
            Atom::Delta { motive, .. } | Atom::Qi { motive, .. } | Atom::Qj { motive, .. } => Some(motive),
            _ => None,
        }
    }

    /// Replace the motive of a motivic atom.
    pub fn with_motive(&self, m: MotiveRef) -> Atom {
        match self {
            Atom::Delta { sigma, .. } => Atom::Delta { motive: m, sigma: sigma.clone() },
            Atom::Qi { sigma, i, .. } => Atom::Qi { motive: m, sigma: sigma.clone(), i: *i },
            Atom::Qj { sigma, j, .. } => Atom::Qj { motive: m, sigma: sigma.clone(), j: *j },
            other => other.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Atom::TwoPiI => json!({"kind": "two_pi_i"}),
            Atom::TwoPi => json!({"kind": "two_pi"}),
            Atom::ImagUnit => json!({"kind": "i"}),
            Atom::DiscSqrt { field } => json!({"kind": "disc_sqrt", "field": field}),
            Atom::AlphaProd { field } => json!({"kind": "alpha_prod", "field": field}),
            Atom::Unit { ring } => json!({"kind": "opaque_unit", "ring": ring.to_string()}),
            Atom::Cm { chi, sigma } => json!({"kind": "cm_p", "char": chi.to_string(), "sigma": sigma}),
            Atom::Delta { motive, sigma } => json!({"kind": "delta", "motive": motive.to_string(), "sigma": sigma}),
            Atom::Qi { motive, sigma, i } => {
                json!({"kind": "Q_i", "motive": motive.to_string(), "sigma": sigma, "i": i})
            }
            Atom::Qj { motive, sigma, j } => {
                json!({"kind": "Q_cumulative", "motive": motive.to_string(), "sigma": sigma, "j": j})
            }
            Atom::Whittaker { rep } => json!({"kind": "whittaker_p", "rep": rep}),
            Atom::GuerQ { chi, sigma, r, s } => {
                json!({"kind": "guer_q", "char": chi.to_string(), "sigma": sigma, "r": r, "s": s})
            }
            Atom::GuerP { chi } => json!({"kind": "guer_p", "char": chi.to_string()}),
            Atom::Petersson { rep, signature } => {
                let sig: BTreeMap<&String, [u32; 2]> = signature.iter().map(|(k, v)| (k, [v.0, v.1])).collect();
                json!({"kind": "petersson_Q", "rep": rep, "signature": sig})
            }
            Atom::PGlobal { rep, index } => json!({"kind": "P_global", "rep": rep, "index": index}),
            Atom::PLocal { rep, sigma, r } => json!({"kind": "P_local", "rep": rep, "sigma": sigma, "r": r}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Atom> {
        let kind = v["kind"].as_str().ok_or_else(|| Error::Parse("atom without 'kind'".into()))?;
        let s = |k: &str| -> Result<String> {
            v[k].as_str()
                .map(|x| x.to_string())
                .ok_or_else(|| Error::Parse(format!("atom {}: missing string '{}'", kind, k)))
        };
        let u = |k: &str| -> Result<u32> {
            v[k].as_u64()
                .map(|x| x as u32)
                .ok_or_else(|| Error::Parse(format!("atom {}: missing integer '{}'", kind, k)))
        };
        let atom = match kind {
            "two_pi_i" => Atom::TwoPiI,
            "two_pi" => Atom::TwoPi,
            "i" => Atom::ImagUnit,
            "disc_sqrt" => Atom::DiscSqrt { field: s("field")? },
            "alpha_prod" => Atom::AlphaProd { field: s("field")? },
            "opaque_unit" => Atom::Unit { ring: text::parse_ring(&s("ring")?)? },
            "cm_p" => Atom::Cm {
                chi: parse_char(&s("char")?)?,
                sigma: v["sigma"].as_str().map(|x| x.to_string()),
            },
            "delta" => Atom::Delta { motive: parse_motive(&s("motive")?)?, sigma: s("sigma")? },
            "Q_i" => Atom::Qi { motive: parse_motive(&s("motive")?)?, sigma: s("sigma")?, i: u("i")? },
            "Q_cumulative" => Atom::Qj { motive: parse_motive(&s("motive")?)?, sigma: s("sigma")?, j: u("j")? },
            "whittaker_p" => Atom::Whittaker { rep: s("rep")? },
            "guer_q" => Atom::GuerQ { chi: parse_char(&s("char")?)?, sigma: s("sigma")?, r: u("r")?, s: u("s")? },
            "guer_p" => Atom::GuerP { chi: parse_char(&s("char")?)? },
            "petersson_Q" => {
                let sig: BTreeMap<String, [u32; 2]> = serde_json::from_value(v["signature"].clone())
                    .map_err(|e| Error::Parse(format!("petersson_Q signature: {}", e)))?;
                Atom::Petersson { rep: s("rep")?, signature: sig.into_iter().map(|(k, x)| (k, (x[0], x[1]))).collect() }
            }
            "P_global" => {
                let index: BTreeMap<String, u32> = serde_json::from_value(v["index"].clone())
                    .map_err(|e| Error::Parse(format!("P_global index: {}", e)))?;
                Atom::PGlobal { rep: s("rep")?, index }
            }
            "P_local" => Atom::PLocal { rep: s("rep")?, sigma: s("sigma")?, r: u("r")? },
            other => return Err(Error::Parse(format!("unknown atom kind '{}'", other))),
        };
        Ok(atom)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Atom::TwoPiI => write!(f, "(2πi)"),
            Atom::TwoPi => write!(f, "(2π)"),
            Atom::ImagUnit => write!(f, "i"),
            Atom::DiscSqrt { field } => write!(f, "sqrt(D[{}])", field),
            Atom::AlphaProd { field } => write!(f, "alpha[{}]", field),
            Atom::Unit { ring } => write!(f, "u[{}]", ring),
            Atom::Cm { chi, sigma: None } => write!(f, "p[{}]", chi),
            Atom::Cm { chi, sigma: Some(s) } => write!(f, "p[{};{}]", chi, s),
            Atom::Delta { motive, sigma } => write!(f, "delta[{};{}]", motive, sigma),
            Atom::Qi { motive, sigma, i } => write!(f, "Q_{}[{};{}]", i, motive, sigma),
            Atom::Qj { motive, sigma, j } => write!(f, "Q^({})[{};{}]", j, motive, sigma),
            Atom::Whittaker { rep } => write!(f, "pW[{}]", rep),
            Atom::GuerQ { chi, sigma, r, s } => write!(f, "Qg[{};{};{}|{}]", chi, sigma, r, s),
            Atom::GuerP { chi } => write!(f, "Pg[{}]", chi),
            Atom::Petersson { rep, signature } => {
                let parts: Vec<String> = signature.iter().map(|(k, (r, s))| format!("{}:{}|{}", k, r, s)).collect();
                write!(f, "QV[{};{}]", rep, parts.join(","))
            }
            Atom::PGlobal { rep, index } => {
                let parts: Vec<String> = index.iter().map(|(k, r)| format!("{}:{}", k, r)).collect();
                write!(f, "P^({})[{}]", parts.join(","), rep)
            }
            Atom::PLocal { rep, sigma, r } => write!(f, "P^({})[{};{}]", r, rep, sigma),
        }
    }
}

/// A Laurent monomial in atoms, read up to `~_{A;L}` at `level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub terms: BTreeMap<Atom, i64>,
    pub level: Ring,
}

impl Expr {
    pub fn one(level: Ring) -> Self {
        Expr { terms: BTreeMap::new(), level }
    }

    pub fn atom(a: Atom, level: Ring) -> Self {
        Expr::one(level).times(a, 1)
    }

    pub fn is_one(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiply in `a^e`, dropping zero exponents.
    pub fn times(mut self, a: Atom, e: i64) -> Self {
        add_term(&mut self.terms, a, e);
        self
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        let mut out = self.clone();
        for (a, e) in &other.terms {
            add_term(&mut out.terms, a.clone(), *e);
        }
        out
    }

    pub fn pow(&self, k: i64) -> Expr {
        let mut out = Expr::one(self.level.clone());
        for (a, e) in &self.terms {
            add_term(&mut out.terms, a.clone(), e * k);
        }
        out
    }

    pub fn inv(&self) -> Expr {
        self.pow(-1)
    }

    pub fn div(&self, other: &Expr) -> Expr {
        self.mul(&other.inv())
    }

    pub fn exponent(&self, a: &Atom) -> i64 {
        self.terms.get(a).copied().unwrap_or(0)
    }

    pub fn at_level(mut self, level: Ring) -> Self {
        self.level = level;
        self
    }

    /// Canonical text form.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, e)| if *e == 1 { a.to_string() } else { format!("{}^{}", a, e) })
            .collect();
        parts.join(" * ")
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(a, e)| json!({"atom": a.to_json(), "exp": e}))
            .collect();
        json!({"level": self.level.to_string(), "terms": terms, "text": self.render()})
    }

    pub fn from_json(v: &Value) -> Result<Expr> {
        let level = text::parse_ring(v["level"].as_str().ok_or_else(|| Error::Parse("missing 'level'".into()))?)?;
        let mut e = Expr::one(level);
        let terms = v["terms"].as_array().ok_or_else(|| Error::Parse("missing 'terms'".into()))?;
        for t in terms {
            let a = Atom::from_json(&t["atom"])?;
            let k = t["exp"].as_i64().ok_or_else(|| Error::Parse("term without integer 'exp'".into()))?;
            e = e.times(a, k);
        }
        Ok(e)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

pub(crate) fn add_term(m: &mut BTreeMap<Atom, i64>, a: Atom, e: i64) {
    if e == 0 {
        return;
    }
    let slot = m.entry(a.clone()).or_insert(0);
    *slot += e;
    if *slot == 0 {
        m.remove(&a);
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        Expr::from_json(&v).map_err(serde::de::Error::custom)
    }
}
