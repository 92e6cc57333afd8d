//! Rewrite rules, the rule set, canonical forms and equivalence checking.

use super::text::parse_char;
use super::{add_term, coeff_tag, Atom, CharExpr, Expr, MotiveBase, MotiveRef, Rationality, Ring};
use crate::error::{Error, Result};
use crate::hodge_combinatorics::bar_label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

const STEP_LIMIT: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepInfo {
    pub id: String,
    pub n: u32,
    /// Central character, possibly an alias declared in the universe.
    pub central: Option<CharExpr>,
    pub self_conjugate: bool,
    pub a0: i64,
}

/// The objects an expression may mention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    /// The CM type; conjugates are `bar(...)`.
    pub sigmas: Vec<String>,
    pub reps: BTreeMap<String, RepInfo>,
    pub chars: BTreeSet<String>,
    /// Character names defined as products of other characters.
    pub aliases: BTreeMap<String, CharExpr>,
    /// Motive over F+ -> representation whose motive it descends.
    pub descents: BTreeMap<String, String>,
}

impl Universe {
    pub fn new(sigmas: &[&str]) -> Self {
        Universe {
            sigmas: sigmas.iter().map(|s| s.to_string()).collect(),
            reps: BTreeMap::new(),
            chars: BTreeSet::new(),
            aliases: BTreeMap::new(),
            descents: BTreeMap::new(),
        }
    }

    pub fn with_rep(mut self, id: &str, n: u32, central: Option<&str>, self_conjugate: bool, a0: i64) -> Result<Self> {
        let central = central.map(parse_char).transpose()?;
        self.reps.insert(id.to_string(), RepInfo { id: id.to_string(), n, central, self_conjugate, a0 });
        Ok(self)
    }

    pub fn with_char(mut self, id: &str) -> Self {
        self.chars.insert(id.to_string());
        self
    }

    pub fn with_alias(mut self, id: &str, def: &str) -> Result<Self> {
        self.aliases.insert(id.to_string(), parse_char(def)?);
        Ok(self)
    }

    pub fn with_descent(mut self, id: &str, rep: &str) -> Self {
        self.descents.insert(id.to_string(), rep.to_string());
        self
    }

    pub fn all_sigmas(&self) -> Vec<String> {
        let mut v = self.sigmas.clone();
        v.extend(self.sigmas.iter().map(|s| bar_label(s)));
        v
    }

    pub fn is_sigma(&self, s: &str) -> bool {
        self.sigmas.iter().any(|x| x == s || bar_label(x) == s)
    }

    pub fn in_cm_type(&self, s: &str) -> bool {
        self.sigmas.iter().any(|x| x == s)
    }

    /// Representation underlying a named motive.
    pub fn rep_of(&self, id: &str) -> Option<&RepInfo> {
        let id = self.descents.get(id).map(|s| s.as_str()).unwrap_or(id);
        self.reps.get(id)
    }

    pub fn rank(&self, m: &MotiveRef) -> Option<u32> {
        match &m.base {
            MotiveBase::Named(id) => self.rep_of(id).map(|r| r.n),
            MotiveBase::Hecke(_) => Some(1),
        }
    }

    pub fn char_coeffs(&self, chi: &CharExpr) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for b in chi.bases() {
            match self.aliases.get(b) {
                Some(def) => out.extend(self.char_coeffs_depth(def, 0)),
                None => {
                    out.insert(coeff_tag(b));
                }
            }
        }
        out
    }

    fn char_coeffs_depth(&self, chi: &CharExpr, depth: usize) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for b in chi.bases() {
            match self.aliases.get(b) {
                Some(def) if depth < 16 => out.extend(self.char_coeffs_depth(def, depth + 1)),
                _ => {
                    out.insert(coeff_tag(b));
                }
            }
        }
        out
    }

    pub fn motive_coeffs(&self, m: &MotiveRef) -> BTreeSet<String> {
        match &m.base {
            MotiveBase::Named(id) => {
                let id = self.descents.get(id).cloned().unwrap_or_else(|| id.clone());
                [coeff_tag(&id)].into_iter().collect()
            }
            MotiveBase::Hecke(chi) => self.char_coeffs(chi),
        }
    }

    /// Expand alias bases once.
    pub fn expand_aliases(&self, chi: &CharExpr) -> Option<CharExpr> {
        if !chi.bases().iter().any(|b| self.aliases.contains_key(*b)) {
            return None;
        }
        let mut out = CharExpr::trivial();
        for ((b, c), e) in &chi.0 {
            let piece = match self.aliases.get(b) {
                Some(def) => {
                    if *c {
                        def.conj()
                    } else {
                        def.clone()
                    }
                }
                None => {
                    let mut m = BTreeMap::new();
                    m.insert((b.clone(), *c), 1);
                    CharExpr(m)
                }
            };
            out = out.mul(&piece.pow(*e));
        }
        Some(out)
    }

    /// A level at which every rule of this universe may fire.
    pub fn top_level(&self) -> Ring {
        let mut coeffs: BTreeSet<String> = self.reps.keys().map(|r| coeff_tag(r)).collect();
        coeffs.extend(self.chars.iter().map(|c| coeff_tag(c)));
        for def in self.aliases.values() {
            coeffs.extend(self.char_coeffs(def));
        }
        for r in self.reps.values() {
            if let Some(c) = &r.central {
                coeffs.extend(self.char_coeffs(c));
            }
        }
        Ring { coeffs, rational: Rationality::Gal }
    }

    /// Reject atoms naming unknown objects or out-of-range indices.
    pub fn check_atom(&self, a: &Atom) -> Result<()> {
        let bad = |msg: String| Err(Error::Rewrite(msg));
        let sig = |s: &str| -> Result<()> {
            if self.is_sigma(s) {
                Ok(())
            } else {
                Err(Error::Rewrite(format!("unknown embedding '{}'", s)))
            }
        };
        let chars_ok = |chi: &CharExpr| -> Result<()> {
            for b in chi.bases() {
                if !self.chars.contains(b) && !self.aliases.contains_key(b) {
                    return Err(Error::Rewrite(format!("unknown character '{}'", b)));
                }
            }
            Ok(())
        };
        let rep = |id: &str| -> Result<&RepInfo> {
            self.reps
                .get(id)
                .ok_or_else(|| Error::Rewrite(format!("unknown representation '{}'", id)))
        };
        if let Some(m) = a.motive() {
            match &m.base {
                MotiveBase::Named(id) => {
                    if self.rep_of(id).is_none() {
                        return bad(format!("unknown motive '{}'", id));
                    }
                    if self.descents.contains_key(id) && (m.conj || m.dual) {
                        return bad(format!("descended motive '{}' takes no modifiers", id));
                    }
                }
                MotiveBase::Hecke(chi) => chars_ok(chi)?,
            }
        }
        let n = a.motive().and_then(|m| self.rank(m)).unwrap_or(0);
        match a {
            Atom::Cm { chi, sigma } => {
                chars_ok(chi)?;
                if let Some(s) = sigma {
                    sig(s)?;
                }
            }
            Atom::Delta { sigma, .. } => sig(sigma)?,
            Atom::Qi { sigma, i, .. } => {
                sig(sigma)?;
                if *i < 1 || *i > n {
                    return bad(format!("Q_{} on a motive of rank {}", i, n));
                }
            }
            Atom::Qj { sigma, j, .. } => {
                sig(sigma)?;
                if *j > n {
                    return bad(format!("Q^({}) on a motive of rank {}", j, n));
                }
            }
            Atom::Whittaker { rep: r } => {
                rep(r)?;
            }
            Atom::GuerQ { chi, sigma, r, s } => {
                chars_ok(chi)?;
                sig(sigma)?;
                let _ = (r, s);
            }
            Atom::GuerP { chi } => chars_ok(chi)?,
            Atom::Petersson { rep: r, signature } => {
                let info = rep(r)?;
                for (s, (x, y)) in signature {
                    if !self.in_cm_type(s) || x + y != info.n {
                        return bad(format!("bad signature entry {}:{}|{}", s, x, y));
                    }
                }
                if signature.len() != self.sigmas.len() {
                    return bad("signature must cover the CM type".into());
                }
            }
            Atom::PGlobal { rep: r, index } => {
                let info = rep(r)?;
                for (s, x) in index {
                    if !self.in_cm_type(s) || *x > info.n {
                        return bad(format!("bad index entry {}:{}", s, x));
                    }
                }
                if index.len() != self.sigmas.len() {
                    return bad("index must cover the CM type".into());
                }
            }
            Atom::PLocal { rep: r, sigma, r: k } => {
                let info = rep(r)?;
                if !self.in_cm_type(sigma) || *k > info.n {
                    return bad(format!("P^({}) at {} for rank {}", k, sigma, info.n));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let reps: Vec<Value> = self
            .reps
            .values()
            .map(|r| {
                json!({"id": r.id, "n": r.n, "central_character": r.central.as_ref().map(|c| c.to_string()),
                       "self_conjugate": r.self_conjugate, "a0": r.a0})
            })
            .collect();
        let aliases: BTreeMap<&String, String> = self.aliases.iter().map(|(k, v)| (k, v.to_string())).collect();
        json!({"sigmas": self.sigmas, "reps": reps, "chars": self.chars, "aliases": aliases, "descents": self.descents})
    }

    pub fn from_json(v: &Value) -> Result<Universe> {
        let sigmas: Vec<String> = serde_json::from_value(v["sigmas"].clone())
            .map_err(|e| Error::Parse(format!("universe sigmas: {}", e)))?;
        let mut u = Universe { sigmas, ..Universe::new(&[]) };
        if let Some(reps) = v["reps"].as_array() {
            for r in reps {
                let id = r["id"].as_str().ok_or_else(|| Error::Parse("representation without 'id'".into()))?;
                let n = r["n"].as_u64().ok_or_else(|| Error::Parse(format!("representation {} without 'n'", id)))?;
                u = u.with_rep(
                    id,
                    n as u32,
                    r["central_character"].as_str(),
                    r["self_conjugate"].as_bool().unwrap_or(false),
                    r["a0"].as_i64().unwrap_or(0),
                )?;
            }
        }
        if let Some(cs) = v["chars"].as_array() {
            for c in cs {
                u = u.with_char(c.as_str().ok_or_else(|| Error::Parse("character names are strings".into()))?);
            }
        }
        if let Some(al) = v["aliases"].as_object() {
            for (k, d) in al {
                u = u.with_alias(k, d.as_str().ok_or_else(|| Error::Parse("alias definitions are strings".into()))?)?;
            }
        }
        if let Some(ds) = v["descents"].as_object() {
            for (k, r) in ds {
                u = u.with_descent(k, r.as_str().ok_or_else(|| Error::Parse("descent targets are strings".into()))?);
            }
        }
        Ok(u)
    }
}

/// Statements the rule set may take for granted only when asked to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assumption {
    /// The Rankin-Selberg/unitary comparison for general CM fields; the
    /// factorization of automorphic periods is derived from it.
    HypCrelle,
    /// Automorphic periods as inner products of rational classes.
    TateConjecture,
    /// A conjugate self-dual M(Pi) descends to a polarized motive over F+.
    MotiveDescent,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let s = match self {
            Assumption::HypCrelle => "unitary-comparison-hypothesis",
            Assumption::TateConjecture => "tate-conjecture",
            Assumption::MotiveDescent => "descent-to-totally-real-field",
        };
        write!(f, "{}", s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    ConjugateCumulative,
    CumulativeDefinition,
    Polarization,
    ConjugateQi,
    ConjugateDelta,
    CharacterDefinition,
    HeckeDelta,
    HeckeQ1,
    CmMultiplicativity,
    AutomorphicDeterminant,
    SelfConjugate,
    Descent,
    FactorGlobal,
    FactorBottom,
    FactorTop,
    PeriodDefinition,
    GuerberoffCm,
    TwoPi,
    ImagUnitSquare,
    GaloisClosureElements,
    OpaqueUnits,
    /// Listed for citation only; used as a hypothesis by derivations.
    TateGeometric,
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub name: &'static str,
    pub citation: &'static str,
    pub kind: RuleKind,
    pub requires: Option<Assumption>,
}

/// An oriented relation `head -> rhs` produced by completion or by a
/// hypothesis of a derivation.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub citation: String,
    pub head: Atom,
    pub rhs: BTreeMap<Atom, i64>,
    pub ring: Ring,
    pub requires: Option<Assumption>,
}

#[derive(Clone, Debug)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub relations: Vec<Relation>,
    pub enabled: BTreeSet<Assumption>,
    pub universe: Universe,
}

/// Which reducible atom to rewrite next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Leftmost,
    Rightmost,
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: String,
    pub citation: String,
    pub atom: String,
    pub ring: String,
    pub assumed: Option<Assumption>,
}

impl TraceStep {
    pub fn to_json(&self) -> Value {
        json!({"rule": self.rule, "citation": self.citation, "atom": self.atom, "unit_ring": self.ring,
               "assumed": self.assumed.map(|a| a.to_string())})
    }
}

#[derive(Clone, Debug)]
pub struct Canonical {
    pub expr: Expr,
    pub steps: Vec<TraceStep>,
}

impl Canonical {
    /// Rule names with the number of firings.
    pub fn rules_used(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for s in &self.steps {
            *m.entry(s.rule.clone()).or_insert(0) += 1;
        }
        m
    }
}

struct Firing {
    /// Replacement for the whole power atom^e.
    replacement: BTreeMap<Atom, i64>,
    ring: Ring,
    name: String,
    citation: String,
    requires: Option<Assumption>,
}

fn mono(pairs: Vec<(Atom, i64)>) -> BTreeMap<Atom, i64> {
    let mut m = BTreeMap::new();
    for (a, e) in pairs {
        add_term(&mut m, a, e);
    }
    m
}

fn scale(m: BTreeMap<Atom, i64>, k: i64) -> BTreeMap<Atom, i64> {
    m.into_iter().map(|(a, e)| (a, e * k)).filter(|(_, e)| *e != 0).collect()
}

fn base_rules() -> Vec<Rule> {
    use Assumption::*;
    use RuleKind::*;
    let r = |name, citation, kind, requires| Rule { name, citation, kind, requires };
    vec![
        r("conjugacy-cumulative", "conjugacy of motivic periods: Q^(n-j)(M^c) ~ Q^(j)(M) over E(x)sigma(F)", ConjugateCumulative, None),
        r("cumulative-definition", "definition of Q^(j) as Q_1...Q_j delta (2 pi i)^(n(n-1)/2)", CumulativeDefinition, None),
        r("polarization", "polarized representation: M(Pi^v) = M(Pi^c)", Polarization, None),
        r("conjugate-frobenius-period", "conjugacy of motivic periods: Q_i(M^c) ~ Q_(n+1-i)(M)^-1", ConjugateQi, None),
        r("conjugate-determinant", "conjugacy of motivic periods: delta(M^c) ~ prod Q_i(M) delta(M)", ConjugateDelta, None),
        r("character-definition", "declared characters as products of characters", CharacterDefinition, None),
        r("hecke-determinant", "comparison of CM and motivic periods: delta(M(chi)) ~ p(chk(chi)^c)", HeckeDelta, None),
        r("hecke-frobenius-period", "comparison of CM and motivic periods: Q_1(M(chi)) ~ p(chk chi)/p(chk(chi)^c)", HeckeQ1, None),
        r("cm-period-multiplicativity", "comparison of CM and motivic periods: p(chi1)p(chi2) ~ p(chi1 chi2)", CmMultiplicativity, None),
        r("automorphic-determinant", "det M(Pi^c) = det M(xi_Pi^c)(n(1-n)/2), with delta(M^c) = prod Q_i delta(M)", AutomorphicDeterminant, None),
        r("self-conjugate", "M(Pi) = M(Pi)^c for Pi = Pi^c, with the conjugacy of motivic periods", SelfConjugate, None),
        r("descent", "periods of a polarized motive over F+ at sigma_0 equal those of M(Pi) at its lift", Descent, Some(MotiveDescent)),
        r("factorization-global", "factorization of automorphic periods: P^(I) ~ prod_sigma P^(I(sigma))(Pi, sigma)", FactorGlobal, Some(HypCrelle)),
        r("factorization-bottom", "factorization of automorphic periods: P^(0)(Pi, sigma) ~ p(chk xi_Pi, bar sigma)", FactorBottom, Some(HypCrelle)),
        r("factorization-top", "factorization of automorphic periods: P^(n)(Pi, sigma) ~ p(chk xi_Pi, sigma)", FactorTop, Some(HypCrelle)),
        r("automorphic-period-definition", "arithmetic automorphic period P^(I) := (2 pi)^(-2 a_0) Q_V(pi)", PeriodDefinition, None),
        r("guerberoff-cm-factor", "Q(psi~, sigma_0) ~ p(psi~, sigma)^(r - s) over Q(psi~)(x)sigma(F)", GuerberoffCm, None),
        r("two-pi", "(2 pi) = (2 pi i) i^-1", TwoPi, None),
        r("imaginary-unit", "i^2 = -1 is rational", ImagUnitSquare, None),
        r("galois-closure-elements", "sqrt(D_F) and prod sigma(alpha) lie in F^gal", GaloisClosureElements, None),
        r("opaque-units", "units of a ring admissible at the level", OpaqueUnits, None),
        r("tate-geometric", "Tate conjecture: P^(I)(Pi) ~ Q_1..Q_(n-r)(M(Pi^v), sigma) Q_1(M(xi))", TateGeometric, Some(TateConjecture)),
    ]
}

impl RuleSet {
    pub fn is_enabled(&self, a: Option<Assumption>) -> bool {
        a.map_or(true, |a| self.enabled.contains(&a))
    }

    pub fn rule(&self, kind: RuleKind) -> Option<&Rule> {
        self.rules.iter().find(|r| r.kind == kind)
    }

    pub fn listing(&self) -> Value {
        let rules: Vec<Value> = self
            .rules
            .iter()
            .map(|r| {
                json!({"name": r.name, "citation": r.citation, "assumed": r.requires.map(|a| a.to_string()),
                       "enabled": self.is_enabled(r.requires)})
            })
            .collect();
        let rels: Vec<Value> = self
            .relations
            .iter()
            .map(|r| {
                json!({"name": r.name, "citation": r.citation, "head": r.head.to_string(),
                       "rhs": Expr { terms: r.rhs.clone(), level: r.ring.clone() }.render()})
            })
            .collect();
        json!({"rules": rules, "derived": rels})
    }

    /// All firings of enabled rules on `a^e`.
    fn firings(&self, a: &Atom, e: i64, level: &Ring) -> Vec<Firing> {
        let mut out = Vec::new();
        for rule in &self.rules {
            if !self.is_enabled(rule.requires) {
                continue;
            }
            if let Some((rhs, ring)) = self.apply(rule.kind, a, e) {
                if ring.within(level) {
                    out.push(Firing {
                        replacement: rhs,
                        ring,
                        name: rule.name.to_string(),
                        citation: rule.citation.to_string(),
                        requires: rule.requires,
                    });
                }
            }
        }
        for rel in &self.relations {
            if rel.head == *a && self.is_enabled(rel.requires) && rel.ring.within(level) {
                out.push(Firing {
                    replacement: scale(rel.rhs.clone(), e),
                    ring: rel.ring.clone(),
                    name: rel.name.clone(),
                    citation: rel.citation.clone(),
                    requires: rel.requires,
                });
            }
        }
        out
    }

    fn first_firing(&self, a: &Atom, e: i64, level: &Ring) -> Option<Firing> {
        self.firings(a, e, level).into_iter().next()
    }

    /// Rewrite of `a^e` by one rule kind, with the multiplier's ring.
    fn apply(&self, kind: RuleKind, a: &Atom, e: i64) -> Option<(BTreeMap<Atom, i64>, Ring)> {
        use RuleKind::*;
        let u = &self.universe;
        let sig_ring = |coeffs: BTreeSet<String>, s: &str| Ring { coeffs, rational: Rationality::Sigma(s.to_string()) };
        let gal_ring = |coeffs: BTreeSet<String>| Ring { coeffs, rational: Rationality::Gal };
        let rat_ring = |coeffs: BTreeSet<String>| Ring { coeffs, rational: Rationality::Q };
        let out = match (kind, a) {
            (ConjugateCumulative, Atom::Qj { motive, sigma, j }) if motive.conj && !motive.dual => {
                let n = u.rank(motive)?;
                let rhs = mono(vec![(Atom::Qj { motive: motive.conjugate(), sigma: sigma.clone(), j: n.checked_sub(*j)? }, 1)]);
                (rhs, sig_ring(u.motive_coeffs(motive), sigma))
            }
            (CumulativeDefinition, Atom::Qj { motive, sigma, j }) => {
                let n = u.rank(motive)? as i64;
                let mut v: Vec<(Atom, i64)> = (1..=*j)
                    .map(|i| (Atom::Qi { motive: motive.clone(), sigma: sigma.clone(), i }, 1))
                    .collect();
                v.push((Atom::Delta { motive: motive.clone(), sigma: sigma.clone() }, 1));
                v.push((Atom::TwoPiI, n * (n - 1) / 2));
                (mono(v), Ring::rational())
            }
            (Polarization, _) => {
                let m = a.motive()?;
                if !m.dual || !matches!(m.base, MotiveBase::Named(_)) {
                    return None;
                }
                let sigma = sigma_of(a)?;
                let flipped = MotiveRef { dual: false, conj: !m.conj, base: m.base.clone() };
                (mono(vec![(a.with_motive(flipped), 1)]), sig_ring(u.motive_coeffs(m), &sigma))
            }
            (ConjugateQi, Atom::Qi { motive, sigma, i }) if motive.conj && !motive.dual => {
                let n = u.rank(motive)?;
                let rhs = mono(vec![(Atom::Qi { motive: motive.conjugate(), sigma: sigma.clone(), i: n + 1 - i }, -1)]);
                (rhs, sig_ring(u.motive_coeffs(motive), sigma))
            }
            (ConjugateDelta, Atom::Delta { motive, sigma }) if motive.conj && !motive.dual => {
                let n = u.rank(motive)?;
                let m = motive.conjugate();
                let mut v: Vec<(Atom, i64)> =
                    (1..=n).map(|i| (Atom::Qi { motive: m.clone(), sigma: sigma.clone(), i }, 1)).collect();
                v.push((Atom::Delta { motive: m, sigma: sigma.clone() }, 1));
                (mono(v), sig_ring(u.motive_coeffs(motive), sigma))
            }
            (CharacterDefinition, _) => {
                let expanded = match a {
                    Atom::Cm { chi, sigma } => Atom::Cm { chi: u.expand_aliases(chi)?, sigma: sigma.clone() },
                    Atom::GuerQ { chi, sigma, r, s } => {
                        Atom::GuerQ { chi: u.expand_aliases(chi)?, sigma: sigma.clone(), r: *r, s: *s }
                    }
                    Atom::GuerP { chi } => Atom::GuerP { chi: u.expand_aliases(chi)? },
                    _ => match a.motive() {
                        Some(MotiveRef { base: MotiveBase::Hecke(chi), conj, dual }) => a.with_motive(MotiveRef {
                            base: MotiveBase::Hecke(u.expand_aliases(chi)?),
                            conj: *conj,
                            dual: *dual,
                        }),
                        _ => return None,
                    },
                };
                (mono(vec![(expanded, 1)]), Ring::rational())
            }
            (HeckeDelta, Atom::Delta { motive, sigma }) if !motive.conj => {
                let MotiveBase::Hecke(chi) = &motive.base else { return None };
                if u.expand_aliases(chi).is_some() {
                    return None;
                }
                let rhs = mono(vec![(Atom::Cm { chi: chi.check().conj(), sigma: Some(sigma.clone()) }, 1)]);
                (rhs, rat_ring(u.char_coeffs(chi)))
            }
            (HeckeQ1, Atom::Qi { motive, sigma, i: 1 }) if !motive.conj => {
                let MotiveBase::Hecke(chi) = &motive.base else { return None };
                if u.expand_aliases(chi).is_some() {
                    return None;
                }
                let rhs = mono(vec![
                    (Atom::Cm { chi: chi.check(), sigma: Some(sigma.clone()) }, 1),
                    (Atom::Cm { chi: chi.check().conj(), sigma: Some(sigma.clone()) }, -1),
                ]);
                (rhs, rat_ring(u.char_coeffs(chi)))
            }
            (CmMultiplicativity, Atom::Cm { chi, sigma }) if !chi.is_base() => {
                if u.expand_aliases(chi).is_some() {
                    return None;
                }
                let v = chi.factors().into_iter().map(|(f, k)| (Atom::Cm { chi: f, sigma: sigma.clone() }, k)).collect();
                (mono(v), rat_ring(u.char_coeffs(chi)))
            }
            (AutomorphicDeterminant, Atom::Delta { motive, sigma }) if !motive.conj && !motive.dual => {
                let MotiveBase::Named(id) = &motive.base else { return None };
                let rep = u.reps.get(id)?;
                let xi = rep.central.as_ref()?;
                let n = rep.n as i64;
                let mut v: Vec<(Atom, i64)> =
                    (1..=rep.n).map(|i| (Atom::Qi { motive: motive.clone(), sigma: sigma.clone(), i }, -1)).collect();
                v.push((Atom::Delta { motive: MotiveRef::hecke(xi.conj()), sigma: sigma.clone() }, 1));
                v.push((Atom::TwoPiI, n * (1 - n) / 2));
                let mut coeffs = u.motive_coeffs(motive);
                coeffs.extend(u.char_coeffs(xi));
                (mono(v), gal_ring(coeffs))
            }
            (SelfConjugate, Atom::Qi { motive, sigma, i }) if !motive.conj && !motive.dual => {
                let MotiveBase::Named(id) = &motive.base else { return None };
                let rep = u.reps.get(id)?;
                if !rep.self_conjugate || 2 * i < rep.n + 1 {
                    return None;
                }
                let rhs = if 2 * i == rep.n + 1 {
                    BTreeMap::new()
                } else {
                    mono(vec![(Atom::Qi { motive: motive.clone(), sigma: sigma.clone(), i: rep.n + 1 - i }, -1)])
                };
                (rhs, sig_ring(u.motive_coeffs(motive), sigma))
            }
            (Descent, Atom::Qi { motive, .. }) | (Descent, Atom::Delta { motive, .. }) => {
                let MotiveBase::Named(id) = &motive.base else { return None };
                let rep = u.descents.get(id)?;
                let sigma = sigma_of(a)?;
                let lifted = a.with_motive(MotiveRef::named(rep));
                (mono(vec![(lifted, 1)]), sig_ring(u.motive_coeffs(motive), &sigma))
            }
            (FactorGlobal, Atom::PGlobal { rep, index }) => {
                let info = u.reps.get(rep)?;
                if index.len() != u.sigmas.len() {
                    return None;
                }
                let v = index
                    .iter()
                    .map(|(s, r)| (Atom::PLocal { rep: rep.clone(), sigma: s.clone(), r: *r }, 1))
                    .collect();
                (mono(v), gal_ring([coeff_tag(&info.id)].into_iter().collect()))
            }
            (FactorBottom, Atom::PLocal { rep, sigma, r: 0 }) => {
                let info = u.reps.get(rep)?;
                let xi = info.central.as_ref()?;
                let rhs = mono(vec![(Atom::Cm { chi: xi.check(), sigma: Some(bar_label(sigma)) }, 1)]);
                let mut coeffs: BTreeSet<String> = [coeff_tag(rep)].into_iter().collect();
                coeffs.extend(u.char_coeffs(xi));
                (rhs, gal_ring(coeffs))
            }
            (FactorTop, Atom::PLocal { rep, sigma, r }) => {
                let info = u.reps.get(rep)?;
                if *r != info.n || *r == 0 {
                    return None;
                }
                let xi = info.central.as_ref()?;
                let rhs = mono(vec![(Atom::Cm { chi: xi.check(), sigma: Some(sigma.clone()) }, 1)]);
                let mut coeffs: BTreeSet<String> = [coeff_tag(rep)].into_iter().collect();
                coeffs.extend(u.char_coeffs(xi));
                (rhs, gal_ring(coeffs))
            }
            (PeriodDefinition, Atom::Petersson { rep, signature }) => {
                let info = u.reps.get(rep)?;
                let index = signature.iter().map(|(s, (r, _))| (s.clone(), *r)).collect();
                let rhs = mono(vec![(Atom::TwoPi, 2 * info.a0), (Atom::PGlobal { rep: rep.clone(), index }, 1)]);
                (rhs, Ring::rational())
            }
            (GuerberoffCm, Atom::GuerQ { chi, sigma, r, s }) => {
                let rhs = mono(vec![(Atom::Cm { chi: chi.clone(), sigma: Some(sigma.clone()) }, *r as i64 - *s as i64)]);
                (rhs, sig_ring(u.char_coeffs(chi), sigma))
            }
            (TwoPi, Atom::TwoPi) => (mono(vec![(Atom::TwoPiI, 1), (Atom::ImagUnit, -1)]), Ring::rational()),
            (ImagUnitSquare, Atom::ImagUnit) => {
                if e == 0 || e == 1 {
                    return None;
                }
                return Some((mono(vec![(Atom::ImagUnit, e.rem_euclid(2))]), Ring::rational()));
            }
            (GaloisClosureElements, Atom::DiscSqrt { .. }) | (GaloisClosureElements, Atom::AlphaProd { .. }) => {
                (BTreeMap::new(), gal_ring(BTreeSet::new()))
            }
            (OpaqueUnits, Atom::Unit { ring }) => return Some((BTreeMap::new(), ring.clone())),
            _ => return None,
        };
        Some((scale(out.0, e), out.1))
    }

    /// Add `rel ~ 1` as an oriented relation after reducing it.
    /// Returns the chosen head, or None when the relation already holds.
    pub fn add_relation(
        &mut self,
        rel: &Expr,
        name: &str,
        citation: &str,
        requires: Option<Assumption>,
    ) -> Result<Option<Atom>> {
        let c = canonicalize(self, rel, Schedule::Leftmost)?;
        if c.expr.is_one() {
            return Ok(None);
        }
        let head = c
            .expr
            .terms
            .iter()
            .rev()
            .find(|(a, e)| e.abs() == 1 && !matches!(a, Atom::TwoPiI | Atom::ImagUnit))
            .map(|(a, e)| (a.clone(), *e));
        let Some((head, eh)) = head else {
            return Err(Error::Rewrite(format!(
                "relation {} = 1 has no atom with exponent +-1 to orient on",
                c.expr.render()
            )));
        };
        // head^eh * rest = 1, so head = rest^(-eh)
        let rhs: BTreeMap<Atom, i64> = c
            .expr
            .terms
            .iter()
            .filter(|(a, _)| **a != head)
            .map(|(a, e)| (a.clone(), -eh * e))
            .collect();
        self.relations.push(Relation {
            name: name.to_string(),
            citation: citation.to_string(),
            head: head.clone(),
            rhs,
            ring: rel.level.clone(),
            requires,
        });
        Ok(Some(head))
    }

    /// Finite list of atoms over the universe, for the build-time checks.
    pub fn enumerate_atoms(&self) -> Vec<Atom> {
        let u = &self.universe;
        let mut atoms = Vec::new();
        let sigmas = u.all_sigmas();
        let mut motives: Vec<MotiveRef> = Vec::new();
        for id in u.reps.keys() {
            let m = MotiveRef::named(id);
            motives.extend([m.clone(), m.conjugate(), m.dual(), m.dual().conjugate()]);
        }
        motives.extend(u.descents.keys().map(|d| MotiveRef::named(d)));
        let mut chars: Vec<CharExpr> = Vec::new();
        for c in u.chars.iter().chain(u.aliases.keys()) {
            let b = CharExpr::base(c);
            chars.extend([b.clone(), b.conj(), b.check(), b.tilde(), b.inv(), b.pow(2)]);
        }
        for r in u.reps.values() {
            if let Some(x) = &r.central {
                chars.extend([x.clone(), x.check(), x.conj()]);
            }
        }
        for chi in &chars {
            let m = MotiveRef::hecke(chi.clone());
            motives.extend([m.clone(), m.conjugate()]);
            atoms.push(Atom::Cm { chi: chi.clone(), sigma: None });
            atoms.push(Atom::GuerP { chi: chi.clone() });
            for s in &sigmas {
                atoms.push(Atom::Cm { chi: chi.clone(), sigma: Some(s.clone()) });
            }
            for s in &u.sigmas {
                atoms.push(Atom::GuerQ { chi: chi.clone(), sigma: s.clone(), r: 1, s: 0 });
            }
        }
        for m in &motives {
            let Some(n) = u.rank(m) else { continue };
            for s in &sigmas {
                atoms.push(Atom::Delta { motive: m.clone(), sigma: s.clone() });
                for i in 1..=n {
                    atoms.push(Atom::Qi { motive: m.clone(), sigma: s.clone(), i });
                }
                for j in 0..=n {
                    atoms.push(Atom::Qj { motive: m.clone(), sigma: s.clone(), j });
                }
            }
        }
        for r in u.reps.values() {
            atoms.push(Atom::Whittaker { rep: r.id.clone() });
            for s in &u.sigmas {
                for k in 0..=r.n {
                    atoms.push(Atom::PLocal { rep: r.id.clone(), sigma: s.clone(), r: k });
                }
            }
            // all indices when there are few of them
            let d = u.sigmas.len() as u32;
            let count = (r.n as u64 + 1).saturating_pow(d);
            if count <= 4096 {
                for code in 0..count {
                    let mut c = code;
                    let mut index = BTreeMap::new();
                    let mut signature = BTreeMap::new();
                    for s in &u.sigmas {
                        let k = (c % (r.n as u64 + 1)) as u32;
                        c /= r.n as u64 + 1;
                        index.insert(s.clone(), k);
                        signature.insert(s.clone(), (k, r.n - k));
                    }
                    atoms.push(Atom::PGlobal { rep: r.id.clone(), index });
                    atoms.push(Atom::Petersson { rep: r.id.clone(), signature });
                }
            }
        }
        atoms.extend([Atom::TwoPiI, Atom::TwoPi, Atom::ImagUnit]);
        atoms.sort();
        atoms.dedup();
        atoms
    }

    /// Every atom reduces in bounded time, and all rules firing on the same
    /// atom reach the same normal form.
    pub fn check_confluence(&self) -> Result<usize> {
        let level = self.universe.top_level();
        let mut pairs = 0;
        for a in self.enumerate_atoms() {
            let fs = self.firings(&a, 1, &level);
            if fs.len() < 2 {
                let _ = canonicalize(self, &Expr::atom(a.clone(), level.clone()), Schedule::Leftmost)?;
                continue;
            }
            let mut forms = Vec::new();
            for f in &fs {
                let e = Expr { terms: f.replacement.clone(), level: level.clone() };
                forms.push((f.name.clone(), canonicalize(self, &e, Schedule::Leftmost)?.expr));
            }
            for (name, form) in &forms[1..] {
                if form.terms != forms[0].1.terms {
                    return Err(Error::Rewrite(format!(
                        "rules {} and {} diverge at {}: {} vs {}",
                        forms[0].0,
                        name,
                        a,
                        forms[0].1.render(),
                        form.render()
                    )));
                }
            }
            pairs += 1;
        }
        Ok(pairs)
    }
}

fn sigma_of(a: &Atom) -> Option<String> {
    match a {
        Atom::Delta { sigma, .. } | Atom::Qi { sigma, .. } | Atom::Qj { sigma, .. } => Some(sigma.clone()),
        _ => None,
    }
}

/// The rule set over a universe, with the given assumptions switched on.
///
/// Completion adds the relation `P^(0)(Pi, sigma) P^(n)(Pi, sigma) ~ 1` in
/// reduced form, then every atom of the universe is checked for divergence
/// and for joinability of overlapping rules.
pub fn rule_set(universe: &Universe, assumptions: &[Assumption]) -> Result<RuleSet> {
    let mut rs = RuleSet {
        rules: base_rules(),
        relations: Vec::new(),
        enabled: assumptions.iter().copied().collect(),
        universe: universe.clone(),
    };
    if rs.is_enabled(Some(Assumption::HypCrelle)) {
        for r in universe.reps.values() {
            let Some(xi) = &r.central else { continue };
            let mut coeffs = universe.char_coeffs(xi);
            coeffs.insert(coeff_tag(&r.id));
            let level = Ring { coeffs, rational: Rationality::Gal };
            for s in &universe.sigmas {
                let rel = Expr::one(level.clone())
                    .times(Atom::PLocal { rep: r.id.clone(), sigma: s.clone(), r: 0 }, 1)
                    .times(Atom::PLocal { rep: r.id.clone(), sigma: s.clone(), r: r.n }, 1);
                rs.add_relation(
                    &rel,
                    "factorization-top-bottom",
                    "factorization of automorphic periods: P^(0)(Pi, sigma) P^(n)(Pi, sigma) ~ 1",
                    Some(Assumption::HypCrelle),
                )?;
            }
        }
    }
    rs.check_confluence()?;
    Ok(rs)
}

/// Rule-saturated normal form at the expression's level.
pub fn canonicalize(rs: &RuleSet, e: &Expr, schedule: Schedule) -> Result<Canonical> {
    for a in e.terms.keys() {
        rs.universe.check_atom(a)?;
    }
    let mut terms = e.terms.clone();
    let mut steps = Vec::new();
    let mut rng = match schedule {
        Schedule::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        _ => None,
    };
    loop {
        let mut reducible: Vec<(Atom, Firing)> = Vec::new();
        for (a, k) in &terms {
            if let Some(f) = rs.first_firing(a, *k, &e.level) {
                reducible.push((a.clone(), f));
                if schedule == Schedule::Leftmost {
                    break;
                }
            }
        }
        if reducible.is_empty() {
            break;
        }
        let pick = match schedule {
            Schedule::Leftmost => 0,
            Schedule::Rightmost => reducible.len() - 1,
            Schedule::Seeded(_) => rng.as_mut().unwrap().gen_range(0..reducible.len()),
        };
        let (a, f) = reducible.swap_remove(pick);
        let k = terms.remove(&a).unwrap_or(0);
        for (b, x) in f.replacement {
            add_term(&mut terms, b, x);
        }
        steps.push(TraceStep {
            rule: f.name,
            citation: f.citation,
            atom: if k == 1 { a.to_string() } else { format!("{}^{}", a, k) },
            ring: f.ring.to_string(),
            assumed: f.requires,
        });
        if steps.len() > STEP_LIMIT {
            return Err(Error::Rewrite(format!("rule set diverges on {}", e.render())));
        }
    }
    Ok(Canonical { expr: Expr { terms, level: e.level.clone() }, steps })
}

#[derive(Clone, Debug)]
pub struct Equivalence {
    pub holds: bool,
    pub level: Ring,
    pub steps: Vec<TraceStep>,
    /// Canonical form of lhs/rhs; empty when the equivalence holds.
    pub residue: Expr,
}

impl Equivalence {
    pub fn to_json(&self) -> Value {
        let mut used: BTreeMap<&str, (&str, usize, Option<String>)> = BTreeMap::new();
        for s in &self.steps {
            let slot = used.entry(&s.rule).or_insert((&s.citation, 0, s.assumed.map(|a| a.to_string())));
            slot.1 += 1;
        }
        let rules: Vec<Value> = used
            .iter()
            .map(|(k, (c, n, a))| json!({"rule": k, "citation": c, "count": n, "assumed": a}))
            .collect();
        json!({"holds": self.holds, "level": self.level.to_string(), "rules": rules,
               "residue": self.residue.render()})
    }
}

/// Decide `e1 ~ e2` at `level` by reducing `e1 / e2`.
pub fn check_equivalence(rs: &RuleSet, e1: &Expr, e2: &Expr, level: &Ring) -> Result<Equivalence> {
    let q = e1.div(e2).at_level(level.clone());
    let c = canonicalize(rs, &q, Schedule::Leftmost)?;
    Ok(Equivalence { holds: c.expr.is_one(), level: level.clone(), steps: c.steps, residue: c.expr })
}
