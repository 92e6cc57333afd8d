//! Parser for the canonical text form.
//!
//! ```text
//! expr    := "1" | factor (" * " factor)*
//! factor  := atom ("^" int)?
//! atom    := "(2πi)" | "(2π)" | "i"
//!          | "p[" char (";" sigma)? "]"
//!          | "delta[" motive ";" sigma "]"
//!          | "Q_" int "[" motive ";" sigma "]"
//!          | "Q^(" int ")[" motive ";" sigma "]"
//!          | "P^(" int ")[" rep ";" sigma "]"
//!          | "P^(" sigma ":" int ("," sigma ":" int)* ")[" rep "]"
//!          | "pW[" rep "]" | "Pg[" char "]"
//!          | "Qg[" char ";" sigma ";" int "|" int "]"
//!          | "QV[" rep ";" sigma ":" int "|" int ("," ...)* "]"
//!          | "sqrt(D[" field "])" | "alpha[" field "]" | "u[" ring "]"
//! char    := cterm ("." cterm)*
//! cterm   := cprim ("^" int)?
//! cprim   := "1" | ident | "c(" char ")" | "chk(" char ")" | "tld(" char ")"
//!          | "inv(" char ")" | "(" char ")"
//! motive  := ident | "M(" char ")" | "c(" motive ")" | "dual(" motive ")"
//! ring    := (tag ("," tag)*)? ";" ("Q" | "Fgal" | sigma)
//! ```
//! ASCII spellings `(2pi i)` and `(2pi)` are accepted.

use super::{Atom, CharExpr, Expr, MotiveRef, Rationality, Ring};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Split at `sep` outside parentheses and brackets.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..k]);
                start = k + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Strip `prefix(` ... `)` when the closing parenthesis ends the string.
fn unwrap_call<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
    // the outer parentheses must match each other
    let mut depth = 0i32;
    for ch in inner.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    (depth == 0).then_some(inner)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Trailing `^int` at depth zero, if any.
fn split_power(s: &str) -> (&str, Option<i64>) {
    let mut depth = 0i32;
    let mut last = None;
    for (k, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '^' if depth == 0 => last = Some(k),
            _ => {}
        }
    }
    if let Some(k) = last {
        if let Ok(e) = s[k + 1..].trim().parse::<i64>() {
            return (s[..k].trim(), Some(e));
        }
    }
    (s, None)
}

pub fn parse_char(s: &str) -> Result<CharExpr> {
    let s = s.trim();
    if s.is_empty() {
        return Err(perr("empty character"));
    }
    let parts = split_top(s, '.');
    if parts.len() > 1 {
        let mut acc = CharExpr::trivial();
        for p in parts {
            acc = acc.mul(&parse_char(p)?);
        }
        return Ok(acc);
    }
    let (body, e) = split_power(s);
    if let Some(e) = e {
        return Ok(parse_char(body)?.pow(e));
    }
    if s == "1" {
        return Ok(CharExpr::trivial());
    }
    for (name, op) in [
        ("c", CharExpr::conj as fn(&CharExpr) -> CharExpr),
        ("chk", CharExpr::check),
        ("tld", CharExpr::tilde),
        ("inv", CharExpr::inv),
        ("", |x: &CharExpr| x.clone()),
    ] {
        if let Some(inner) = unwrap_call(s, name) {
            return Ok(op(&parse_char(inner)?));
        }
    }
    if is_ident(s) {
        return Ok(CharExpr::base(s));
    }
    Err(perr(format!("cannot read character '{}'", s)))
}

pub fn parse_motive(s: &str) -> Result<MotiveRef> {
    let s = s.trim();
    if let Some(inner) = unwrap_call(s, "c") {
        return Ok(parse_motive(inner)?.conjugate());
    }
    if let Some(inner) = unwrap_call(s, "dual") {
        return Ok(parse_motive(inner)?.dual());
    }
    if let Some(inner) = unwrap_call(s, "M") {
        return Ok(MotiveRef::hecke(parse_char(inner)?));
    }
    if is_ident(s) {
        return Ok(MotiveRef::named(s));
    }
    Err(perr(format!("cannot read motive '{}'", s)))
}

pub fn parse_ring(s: &str) -> Result<Ring> {
    let parts = split_top(s.trim(), ';');
    if parts.len() != 2 {
        return Err(perr(format!("ring '{}' must have the form tags;field", s)));
    }
    let coeffs: Vec<String> = split_top(parts[0], ',')
        .into_iter()
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect();
    let rational = match parts[1].trim() {
        "Q" => Rationality::Q,
        "Fgal" => Rationality::Gal,
        "" => return Err(perr("empty rationality field")),
        sigma => Rationality::Sigma(sigma.to_string()),
    };
    Ok(Ring::new(coeffs, rational))
}

fn bracket<'a>(s: &'a str, head: &str) -> Option<&'a str> {
    s.strip_prefix(head)?.strip_prefix('[')?.strip_suffix(']')
}

fn num(s: &str) -> Result<u32> {
    s.trim().parse().map_err(|_| perr(format!("expected a non-negative integer, found '{}'", s)))
}

fn args(inner: &str, k: usize, what: &str) -> Result<Vec<String>> {
    let v: Vec<String> = split_top(inner, ';').into_iter().map(|x| x.trim().to_string()).collect();
    if v.len() != k {
        return Err(perr(format!("{} expects {} arguments, found {}", what, k, v.len())));
    }
    Ok(v)
}

fn pair(s: &str) -> Result<(u32, u32)> {
    let v: Vec<&str> = s.split('|').collect();
    if v.len() != 2 {
        return Err(perr(format!("expected r|s, found '{}'", s)));
    }
    Ok((num(v[0])?, num(v[1])?))
}

pub fn parse_atom(s: &str) -> Result<Atom> {
    let s = s.trim();
    match s {
        "(2πi)" | "(2pi i)" | "(2πi )" => return Ok(Atom::TwoPiI),
        "(2π)" | "(2pi)" => return Ok(Atom::TwoPi),
        "i" => return Ok(Atom::ImagUnit),
        _ => {}
    }
    if let Some(inner) = bracket(s, "p") {
        let v: Vec<&str> = split_top(inner, ';');
        return match v.as_slice() {
            [c] => Ok(Atom::Cm { chi: parse_char(c)?, sigma: None }),
            [c, sg] => Ok(Atom::Cm { chi: parse_char(c)?, sigma: Some(sg.trim().to_string()) }),
            _ => Err(perr(format!("bad CM period '{}'", s))),
        };
    }
    if let Some(inner) = bracket(s, "delta") {
        let a = args(inner, 2, "delta")?;
        return Ok(Atom::Delta { motive: parse_motive(&a[0])?, sigma: a[1].clone() });
    }
    if let Some(inner) = bracket(s, "pW") {
        return Ok(Atom::Whittaker { rep: inner.trim().to_string() });
    }
    if let Some(inner) = bracket(s, "Pg") {
        return Ok(Atom::GuerP { chi: parse_char(inner)? });
    }
    if let Some(inner) = bracket(s, "Qg") {
        let a = args(inner, 3, "Qg")?;
        let (r, sg) = pair(&a[2])?;
        return Ok(Atom::GuerQ { chi: parse_char(&a[0])?, sigma: a[1].clone(), r, s: sg });
    }
    if let Some(inner) = bracket(s, "QV") {
        let a = args(inner, 2, "QV")?;
        let mut signature = BTreeMap::new();
        for part in split_top(&a[1], ',') {
            let (k, v) = part.split_once(':').ok_or_else(|| perr(format!("bad signature entry '{}'", part)))?;
            signature.insert(k.trim().to_string(), pair(v)?);
        }
        return Ok(Atom::Petersson { rep: a[0].clone(), signature });
    }
    if let Some(inner) = bracket(s, "alpha") {
        return Ok(Atom::AlphaProd { field: inner.trim().to_string() });
    }
    if let Some(inner) = bracket(s, "u") {
        return Ok(Atom::Unit { ring: parse_ring(inner)? });
    }
    if let Some(inner) = unwrap_call(s, "sqrt") {
        if let Some(f) = bracket(inner, "D") {
            return Ok(Atom::DiscSqrt { field: f.trim().to_string() });
        }
    }
    if let Some(rest) = s.strip_prefix("Q_") {
        let (i, tail) = rest.split_once('[').ok_or_else(|| perr(format!("bad atom '{}'", s)))?;
        let inner = tail.strip_suffix(']').ok_or_else(|| perr(format!("bad atom '{}'", s)))?;
        let a = args(inner, 2, "Q_i")?;
        return Ok(Atom::Qi { motive: parse_motive(&a[0])?, sigma: a[1].clone(), i: num(i)? });
    }
    for head in ["Q^(", "P^("] {
        if let Some(rest) = s.strip_prefix(head) {
            let (idx, tail) = rest.split_once(")[").ok_or_else(|| perr(format!("bad atom '{}'", s)))?;
            let inner = tail.strip_suffix(']').ok_or_else(|| perr(format!("bad atom '{}'", s)))?;
            if head == "Q^(" {
                let a = args(inner, 2, "Q^(j)")?;
                return Ok(Atom::Qj { motive: parse_motive(&a[0])?, sigma: a[1].clone(), j: num(idx)? });
            }
            if idx.contains(':') {
                let mut index = BTreeMap::new();
                for part in idx.split(',') {
                    let (k, v) = part.split_once(':').ok_or_else(|| perr(format!("bad index '{}'", part)))?;
                    index.insert(k.trim().to_string(), num(v)?);
                }
                return Ok(Atom::PGlobal { rep: inner.trim().to_string(), index });
            }
            let a = args(inner, 2, "P^(r)")?;
            return Ok(Atom::PLocal { rep: a[0].clone(), sigma: a[1].clone(), r: num(idx)? });
        }
    }
    Err(perr(format!("unknown atom '{}'", s)))
}

/// Parse an expression in the canonical text grammar at the given level.
pub fn parse_expr(s: &str, level: Ring) -> Result<Expr> {
    let mut e = Expr::one(level);
    let s = s.trim();
    if s == "1" {
        return Ok(e);
    }
    for factor in split_top(s, '*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(perr("empty factor"));
        }
        let (body, k) = split_power(factor);
        e = e.times(parse_atom(body)?, k.unwrap_or(1));
    }
    Ok(e)
}
