//! Regular pure motive data over a CM field: realizations in coordinates.
//!
//! Conventions used throughout:
//! * `comparison[tau][sigma]` maps Betti coordinates of `M_sigma` to
//!   coordinates in the de Rham basis `w~_1..w~_n`, after `tau (x) sigma`.
//! * `frobenius[sigma]` is the E-matrix of `F_{inf,sigma}: M_sigma -> M_{bar sigma}`.
//! * `hodge[alpha][a]` is the Hodge exponent `p` of the de Rham basis vector `a`
//!   on the component `alpha`. For regular motives the list is strictly
//!   decreasing, so the filtration is by initial segments.

mod ops;
mod synth;
mod validate;

pub use ops::{
    apply_automorphism, conjugate, minimal_polynomial, random_basis_change, rebase, restriction_of_scalars, tensor,
    BasisChange, RestrictionPackage,
};
pub use synth::{random_hodge, synthesize_motive, SyntheticSpec};
pub use validate::{validate, Check, ValidationReport};

use crate::error::{Error, Result};
use crate::scalar_algebra::emat::{self, EMat};
use crate::scalar_algebra::{Backend, FieldPair, Matrix, NumberField, Scalar};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct PlantedRecord<S: Scalar> {
    pub seed: u64,
    pub random_epsilon: bool,
    /// q[tau][sigma][i] for every sigma, including the forced values at bar sigma.
    pub q: Vec<Vec<Vec<S>>>,
    /// delta[tau][sigma] at synthesis time.
    pub delta: Vec<Vec<S>>,
    /// Accumulated determinant of basis changes applied since synthesis,
    /// so that current delta = delta * multiplier.
    pub basis_multiplier: Vec<Vec<S>>,
}

#[derive(Clone, Debug)]
pub struct MotiveData<S: Backend> {
    pub pair: Arc<FieldPair<S>>,
    pub label: String,
    pub n: usize,
    pub w: i64,
    pub hodge: Vec<Vec<i64>>,
    /// Regularity is claimed (and then checked) for primitive motives.
    pub regular: bool,
    /// Claimed absence of (w/2, w/2) classes.
    pub no_middle_class: bool,
    pub comparison: Vec<Vec<Matrix<S>>>,
    pub frobenius: Vec<EMat>,
    pub dr_basis: String,
    pub betti_basis: String,
    pub planted: Option<PlantedRecord<S>>,
}

impl<S: Backend> MotiveData<S> {
    pub fn e(&self) -> &NumberField {
        &self.pair.e.field
    }

    pub fn alpha(&self, tau: usize, sigma: usize) -> usize {
        self.pair.alpha(tau, sigma)
    }

    /// Exponents of the de Rham basis at (tau, sigma).
    pub fn exponents(&self, tau: usize, sigma: usize) -> &[i64] {
        &self.hodge[self.alpha(tau, sigma)]
    }

    pub fn has_middle_class(&self) -> bool {
        self.hodge.iter().flatten().any(|&p| 2 * p == self.w)
    }

    /// Indices of basis vectors with p < w/2 at (tau, sigma).
    pub fn low_set(&self, tau: usize, sigma: usize) -> Vec<usize> {
        let e = self.exponents(tau, sigma);
        (0..self.n).filter(|&a| 2 * e[a] < self.w).collect()
    }

    /// Comparison matrix at (tau, sigma).
    pub fn comparison_at(&self, tau: usize, sigma: usize) -> &Matrix<S> {
        &self.comparison[tau][sigma]
    }

    /// `F_{inf,sigma}` evaluated at tau.
    pub fn frobenius_at(&self, tau: usize, sigma: usize) -> Matrix<S> {
        emat::eval(&self.pair.e, &self.frobenius[sigma], tau)
    }

    /// The Hodge type at (tau, sigma) as (p, q) pairs by decreasing p.
    pub fn hodge_type(&self, tau: usize, sigma: usize) -> Vec<(i64, i64)> {
        let mut t: Vec<(i64, i64)> = self
            .exponents(tau, sigma)
            .iter()
            .map(|&p| (p, self.w - p))
            .collect();
        t.sort_by(|a, b| b.0.cmp(&a.0));
        t
    }

    pub fn is_regular_data(&self) -> bool {
        self.hodge.iter().all(|h| h.windows(2).all(|x| x[0] > x[1]))
    }

    pub fn to_json(&self) -> Value {
        let hodge: BTreeMap<String, &Vec<i64>> = self
            .hodge
            .iter()
            .enumerate()
            .map(|(a, h)| (a.to_string(), h))
            .collect();
        let comparison: Vec<Vec<Vec<Vec<String>>>> = self
            .comparison
            .iter()
            .map(|row| row.iter().map(render_matrix).collect())
            .collect();
        let frobenius: Vec<_> = self.frobenius.iter().map(emat::to_strings).collect();
        let mut v = json!({
            "label": self.label,
            "E": self.pair.e.field,
            "F": self.pair.f.field,
            "backend": self.pair.backend().describe(),
            "n": self.n,
            "w": self.w,
            "hodge_exponents": hodge,
            "regular": self.regular,
            "no_middle_class": self.no_middle_class,
            "comparison": comparison,
            "frobenius": frobenius,
            "dr_basis_tag": self.dr_basis,
            "betti_basis_tag": self.betti_basis,
            "tau_labels": self.pair.e.labels,
            "sigma_labels": self.pair.f.labels,
        });
        if let Some(p) = &self.planted {
            v["planted"] = json!({
                "seed": p.seed,
                "random_epsilon": p.random_epsilon,
                "Q": p.q.iter().map(|r| r.iter().map(|x| render_vec(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "delta": p.delta.iter().map(|r| render_vec(r)).collect::<Vec<_>>(),
                "basis_multiplier": p.basis_multiplier.iter().map(|r| render_vec(r)).collect::<Vec<_>>(),
            });
        }
        v
    }

    /// Read motive data back; the field pair is rebuilt from the embedded fields.
    pub fn from_json(ctx: &S::Ctx, v: &Value) -> Result<Self> {
        let field = |k: &str| -> Result<NumberField> {
            let f: NumberField = serde_json::from_value(v[k].clone())
                .map_err(|e| Error::Parse(format!("field {}: {}", k, e)))?;
            f.check()?;
            Ok(f)
        };
        let pair = FieldPair::new(ctx, &field("E")?, &field("F")?)?;
        Self::from_json_with_pair(&pair, v)
    }

    pub fn from_json_with_pair(pair: &Arc<FieldPair<S>>, v: &Value) -> Result<Self> {
        // scalars are stored in the writer's representation; exact coordinates
        // only mean something over the conductor they were written for
        if let Some(written) = v["backend"].as_str() {
            let current = pair.backend().describe();
            let exact = |d: &str| d.starts_with("exact");
            if exact(written) != exact(&current) || (exact(written) && written != current) {
                return Err(Error::Parse(format!(
                    "motive data was written with backend '{}' and cannot be read with '{}'",
                    written, current
                )));
            }
        }
        let get_usize = |k: &str| {
            v[k].as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("missing integer '{}'", k)))
        };
        let n = get_usize("n")?;
        let w = v["w"]
            .as_i64()
            .ok_or_else(|| Error::Parse("missing integer 'w'".into()))?;
        let hmap = v["hodge_exponents"]
            .as_object()
            .ok_or_else(|| Error::Parse("missing 'hodge_exponents'".into()))?;
        let na = pair.decomp.num_components();
        let mut hodge = vec![Vec::new(); na];
        for (k, list) in hmap {
            let a: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad component key '{}'", k)))?;
            if a >= na {
                return Err(crate::error::validation(
                    "HODGE_ALPHA_KEYS",
                    format!("component {} does not exist ({} components)", a, na),
                ));
            }
            hodge[a] = serde_json::from_value(list.clone())
                .map_err(|e| Error::Parse(format!("hodge_exponents[{}]: {}", k, e)))?;
        }
        if let Some(a) = hodge.iter().position(|h| h.is_empty() && n > 0) {
            return Err(crate::error::validation(
                "HODGE_ALPHA_KEYS",
                format!("no exponents for component {}", a),
            ));
        }
        let comparison: Vec<Vec<Vec<Vec<String>>>> = serde_json::from_value(v["comparison"].clone())
            .map_err(|e| Error::Parse(format!("comparison: {}", e)))?;
        let comparison = comparison
            .iter()
            .map(|row| {
                row.iter()
                    .map(|m| parse_matrix::<S>(&pair.ctx, m))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let frob: Vec<Vec<Vec<Vec<String>>>> = serde_json::from_value(v["frobenius"].clone())
            .map_err(|e| Error::Parse(format!("frobenius: {}", e)))?;
        let frobenius = frob
            .iter()
            .map(|m| emat::from_strings(&pair.e.field, m))
            .collect::<Result<Vec<_>>>()?;
        let label = v["label"].as_str().unwrap_or("M").to_string();
        let m = MotiveData {
            pair: pair.clone(),
            label,
            n,
            w,
            regular: v["regular"].as_bool().unwrap_or(true),
            no_middle_class: v["no_middle_class"].as_bool().unwrap_or(false),
            hodge,
            comparison,
            frobenius,
            dr_basis: v["dr_basis_tag"].as_str().unwrap_or("w").to_string(),
            betti_basis: v["betti_basis_tag"].as_str().unwrap_or("e").to_string(),
            planted: None,
        };
        Ok(m)
    }
}

pub fn render_vec<S: Scalar>(v: &[S]) -> Vec<String> {
    v.iter().map(|x| x.render()).collect()
}

pub fn render_matrix<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| render_vec(r)).collect()
}

pub fn parse_matrix<S: Backend>(ctx: &S::Ctx, rows: &[Vec<String>]) -> Result<Matrix<S>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) || n == 0 {
        return Err(crate::error::validation("DIMENSION", "matrix is not square".to_string()));
    }
    let data = rows
        .iter()
        .map(|r| r.iter().map(|s| S::parse(ctx, s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(data))
}

/// Column reversal `A J`.
pub fn rev_cols<S: Scalar>(a: &Matrix<S>) -> Matrix<S> {
    Matrix::from_fn(a.rows, a.cols, |i, j| a.get(i, a.cols - 1 - j).clone())
}

/// Row reversal `J A`.
pub fn rev_rows<S: Scalar>(a: &Matrix<S>) -> Matrix<S> {
    Matrix::from_fn(a.rows, a.cols, |i, j| a.get(a.rows - 1 - i, j).clone())
}
