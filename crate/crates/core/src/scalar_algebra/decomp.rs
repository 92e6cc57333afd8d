//! E (x) F as a product of fields, and modules over it.

use super::backend::Backend;
use super::cyclo::Cyclo;
use super::embed::EmbeddingSet;
use super::matrix::Matrix;
use super::numfield::{factor_over, NfPoly, NumberField};
use super::qpoly::QPoly;
use super::scalar::{Scalar, ZeroTest};
use crate::error::{Error, Result};
use num_rational::BigRational;
use serde::Serialize;
use std::collections::BTreeSet;

pub const DEGREE_CAP: usize = 64;

#[derive(Clone, Debug)]
pub struct Component {
    pub alpha: usize,
    /// Monic irreducible factor of f over F.
    pub factor: NfPoly,
    /// Minimal polynomial over Q of a primitive element of L_alpha.
    pub compositum_poly: QPoly,
    /// Absolute degree [L_alpha : Q].
    pub degree: usize,
}

#[derive(Clone, Debug)]
pub struct CompositumDecomposition {
    pub e_label: String,
    pub f_label: String,
    pub shift: i64,
    pub components: Vec<Component>,
    /// pair_map[tau][sigma] = alpha(tau, sigma).
    pub pair_map: Vec<Vec<usize>>,
    /// Labels of the embeddings used to index pair_map.
    pub tau_labels: Vec<String>,
    pub sigma_labels: Vec<String>,
}

/// Factor a rational polynomial over a number field.
pub fn factor_over_extension(f: &QPoly, field: &NumberField) -> Result<Vec<NfPoly>> {
    if !f.lc().eq(&num_traits::One::one()) {
        return Err(Error::InvalidField("polynomial must be monic".into()));
    }
    if !super::factor::is_irreducible(f) {
        return Err(Error::InvalidField(
            "polynomial must be squarefree and irreducible over Q".into(),
        ));
    }
    let total = f.degree() * field.degree();
    if total > DEGREE_CAP {
        return Err(Error::DegreeCap(total));
    }
    if f.degree() == 1 || field.degree() == 1 {
        return Ok(vec![f.coeffs().iter().map(|c| field.from_rational(c)).collect()]);
    }
    Ok(factor_over(field, f).1.into_iter().map(|x| x.factor).collect())
}

/// Evaluate a polynomial with F-coefficients: coefficients through sigma, variable at x.
pub fn eval_over<S: Backend>(emb_f: &EmbeddingSet<S>, p: &NfPoly, sigma: usize, x: &S) -> S {
    let mut acc = x.zero_like();
    for c in p.iter().rev() {
        acc = acc.mul(x).add(&emb_f.eval(c, sigma));
    }
    acc
}

impl CompositumDecomposition {
    pub fn compute<S: Backend>(emb_e: &EmbeddingSet<S>, emb_f: &EmbeddingSet<S>) -> Result<Self> {
        let e = &emb_e.field;
        let f = &emb_f.field;
        let total = e.degree() * f.degree();
        if total > DEGREE_CAP {
            return Err(Error::DegreeCap(total));
        }
        let (shift, raw) = if e.degree() == 1 || f.degree() == 1 {
            let p: NfPoly = e.poly.iter().map(|c| f.from_rational(c)).collect();
            let cp = if f.degree() == 1 { e.qpoly() } else { f.qpoly() };
            (0, vec![(p, cp)])
        } else {
            let (s, fs) = factor_over(f, &e.qpoly());
            (s, fs.into_iter().map(|x| (x.factor, x.norm_factor)).collect())
        };
        let components: Vec<Component> = raw
            .into_iter()
            .enumerate()
            .map(|(alpha, (factor, cp))| Component {
                alpha,
                degree: (factor.len() - 1) * f.degree(),
                factor,
                compositum_poly: cp,
            })
            .collect();
        let mut pair_map = vec![vec![0; emb_f.len()]; emb_e.len()];
        for (t, row) in pair_map.iter_mut().enumerate() {
            for (s, slot) in row.iter_mut().enumerate() {
                let mut hit = None;
                for c in &components {
                    let v = eval_over(emb_f, &c.factor, s, &emb_e.roots[t]);
                    match v.zero_test() {
                        ZeroTest::NonZero => {}
                        _ => {
                            if hit.is_some() {
                                return Err(Error::Undecidable);
                            }
                            hit = Some(c.alpha);
                        }
                    }
                }
                *slot = hit.ok_or(Error::Undecidable)?;
            }
        }
        Ok(CompositumDecomposition {
            e_label: e.label.clone(),
            f_label: f.label.clone(),
            shift,
            components,
            pair_map,
            tau_labels: emb_e.labels.clone(),
            sigma_labels: emb_f.labels.clone(),
        })
    }

    pub fn component_of(&self, tau: usize, sigma: usize) -> usize {
        self.pair_map[tau][sigma]
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn total_degree(&self) -> usize {
        self.components.iter().map(|c| c.degree).sum()
    }

    /// Pairs (tau, sigma) in the fiber of alpha.
    pub fn fiber(&self, alpha: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, row) in self.pair_map.iter().enumerate() {
            for (s, &a) in row.iter().enumerate() {
                if a == alpha {
                    out.push((t, s));
                }
            }
        }
        out
    }

    /// Invariants that hold in any backend.
    pub fn check(&self, e_degree: usize, f_degree: usize) -> Vec<String> {
        let mut bad = Vec::new();
        let sum_f: usize = self.components.iter().map(|c| c.factor.len() - 1).sum();
        if sum_f != e_degree {
            bad.push(format!("factor degrees sum to {} != {}", sum_f, e_degree));
        }
        if self.total_degree() != e_degree * f_degree {
            bad.push("absolute degrees do not sum to [E:Q][F:Q]".into());
        }
        let hit: BTreeSet<usize> = self.pair_map.iter().flatten().copied().collect();
        if hit.len() != self.components.len() {
            bad.push("pair map is not surjective".into());
        }
        for c in &self.components {
            let n = self.fiber(c.alpha).len();
            if n != c.degree {
                bad.push(format!(
                    "fiber of component {} has {} pairs, expected {}",
                    c.alpha, n, c.degree
                ));
            }
        }
        bad
    }

    /// The component alpha(tau, bar(sigma)) for alpha = alpha(tau, sigma); well defined
    /// when complex conjugation is central in the automorphisms of F.
    pub fn conj_components(&self, conj_f: &[usize]) -> Result<Vec<usize>> {
        let mut out: Vec<Option<usize>> = vec![None; self.components.len()];
        for (t, row) in self.pair_map.iter().enumerate() {
            for (s, &a) in row.iter().enumerate() {
                let b = self.pair_map[t][conj_f[s]];
                match out[a] {
                    None => out[a] = Some(b),
                    Some(x) if x != b => {
                        return Err(Error::NotCm(format!(
                            "conjugation does not act on the components of {} (x) {}",
                            self.e_label, self.f_label
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(out.into_iter().map(|x| x.unwrap()).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Comp {
            alpha: usize,
            factor_coeffs: Vec<Vec<String>>,
            compositum_poly: Vec<String>,
        }
        let comps: Vec<Comp> = self
            .components
            .iter()
            .map(|c| Comp {
                alpha: c.alpha,
                factor_coeffs: c
                    .factor
                    .iter()
                    .map(|x| x.iter().map(|r| r.to_string()).collect())
                    .collect(),
                compositum_poly: c
                    .compositum_poly
                    .coeffs()
                    .iter()
                    .map(|r| r.to_string())
                    .collect(),
            })
            .collect();
        let mut pm = Vec::new();
        for (t, row) in self.pair_map.iter().enumerate() {
            for (s, &a) in row.iter().enumerate() {
                pm.push(serde_json::json!([self.tau_labels[t], self.sigma_labels[s], a]));
            }
        }
        serde_json::json!({
            "E": self.e_label,
            "F": self.f_label,
            "components": comps,
            "pair_map": pm,
        })
    }
}

/// Galois invariance alpha(g tau, g sigma) = alpha(tau, sigma) over all g in
/// Gal(Q(zeta_N)/Q).
pub fn galois_invariant(
    d: &CompositumDecomposition,
    emb_e: &EmbeddingSet<Cyclo>,
    emb_f: &EmbeddingSet<Cyclo>,
) -> bool {
    let ctx = &emb_e.roots[0].ctx;
    let find = |roots: &[Cyclo], v: &Cyclo| roots.iter().position(|r| r == v);
    for &a in &ctx.units {
        for t in 0..emb_e.len() {
            let gt = match find(&emb_e.roots, &emb_e.roots[t].galois(a)) {
                Some(i) => i,
                None => return false,
            };
            for s in 0..emb_f.len() {
                let gs = match find(&emb_f.roots, &emb_f.roots[s].galois(a)) {
                    Some(i) => i,
                    None => return false,
                };
                if d.pair_map[gt][gs] != d.pair_map[t][s] {
                    return false;
                }
            }
        }
    }
    true
}

/// Element of E (x) F in the basis x^k (x) y^l: coeffs[k][l].
pub type TensorElem = Vec<Vec<BigRational>>;

pub fn eval_tensor<S: Backend>(
    emb_e: &EmbeddingSet<S>,
    emb_f: &EmbeddingSet<S>,
    a: &TensorElem,
    tau: usize,
    sigma: usize,
) -> S {
    let x = &emb_e.roots[tau];
    let y = &emb_f.roots[sigma];
    let mut acc = x.zero_like();
    let mut xk = x.one_like();
    for row in a {
        let mut yl = x.one_like();
        for c in row {
            acc = acc.add(&xk.mul(&yl).mul(&x.from_rational_like(c)));
            yl = yl.mul(y);
        }
        xk = xk.mul(x);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ModuleRank {
    Free(usize),
    NotFree { fiber_dims: Vec<Vec<usize>> },
}

/// A finitely generated E (x) F-module, described by its dimension over each L_alpha.
#[derive(Clone, Debug)]
pub struct TensorModule {
    pub component_dims: Vec<usize>,
}

impl TensorModule {
    pub fn fiber_dim(&self, d: &CompositumDecomposition, tau: usize, sigma: usize) -> usize {
        self.component_dims[d.component_of(tau, sigma)]
    }

    pub fn module_rank(&self, d: &CompositumDecomposition) -> ModuleRank {
        let dims: Vec<Vec<usize>> = d
            .pair_map
            .iter()
            .map(|row| row.iter().map(|&a| self.component_dims[a]).collect())
            .collect();
        let first = dims.first().and_then(|r| r.first()).copied().unwrap_or(0);
        if dims.iter().flatten().all(|&x| x == first) {
            ModuleRank::Free(first)
        } else {
            ModuleRank::NotFree { fiber_dims: dims }
        }
    }

    /// Whether a family of vectors in (E (x) F)^r is a basis; decided on one
    /// embedding of each component L_alpha.
    pub fn is_basis<S: Backend>(
        &self,
        d: &CompositumDecomposition,
        emb_e: &EmbeddingSet<S>,
        emb_f: &EmbeddingSet<S>,
        family: &[Vec<TensorElem>],
    ) -> Result<bool> {
        let r = match self.module_rank(d) {
            ModuleRank::Free(r) => r,
            ModuleRank::NotFree { .. } => {
                return Err(Error::Unsupported("module is not free".into()))
            }
        };
        if family.len() != r || family.iter().any(|v| v.len() != r) {
            return Err(Error::Dimension(format!(
                "family of {} vectors for a module of rank {}",
                family.len(),
                r
            )));
        }
        if r == 0 {
            return Ok(true);
        }
        for c in &d.components {
            let (t, s) = d.fiber(c.alpha)[0];
            let m = Matrix::from_fn(r, r, |i, j| eval_tensor(emb_e, emb_f, &family[j][i], t, s));
            match m.det()?.zero_test() {
                ZeroTest::NonZero => {}
                ZeroTest::Zero => return Ok(false),
                ZeroTest::Unknown => return Err(Error::Undecidable),
            }
        }
        Ok(true)
    }
}

/// (det A(tau))_tau for a tau-indexed family of square matrices.
pub fn per_embedding_determinant<S: Scalar>(family: &[Matrix<S>]) -> Result<Vec<S>> {
    family.iter().map(|m| m.det()).collect()
}
