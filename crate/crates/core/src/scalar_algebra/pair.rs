use super::backend::Backend;
use super::decomp::CompositumDecomposition;
use super::embed::EmbeddingSet;
use super::numfield::{NfElem, NumberField};
use super::recognize::Membership;
use crate::error::Result;
use std::sync::Arc;

/// Coefficient field E, CM base field F, their embeddings and the decomposition of E (x) F.
#[derive(Debug)]
pub struct FieldPair<S: Backend> {
    pub ctx: S::Ctx,
    pub e: EmbeddingSet<S>,
    pub f: EmbeddingSet<S>,
    /// Complex conjugation of F as the image of its generator.
    pub c_f: NfElem,
    pub decomp: CompositumDecomposition,
    /// alpha -> alpha(tau, bar sigma) for (tau, sigma) in alpha.
    pub conj_alpha: Vec<usize>,
}

impl<S: Backend> FieldPair<S> {
    pub fn new(ctx: &S::Ctx, e: &NumberField, f: &NumberField) -> Result<Arc<Self>> {
        let emb_e = EmbeddingSet::coefficient(ctx, e)?;
        let emb_f = EmbeddingSet::cm(ctx, f)?;
        let c_f = emb_f.cm_involution()?;
        let decomp = CompositumDecomposition::compute(&emb_e, &emb_f)?;
        let conj_alpha = decomp.conj_components(&emb_f.conj)?;
        Ok(Arc::new(FieldPair {
            ctx: ctx.clone(),
            e: emb_e,
            f: emb_f,
            c_f,
            decomp,
            conj_alpha,
        }))
    }

    pub fn num_tau(&self) -> usize {
        self.e.len()
    }

    pub fn num_sigma(&self) -> usize {
        self.f.len()
    }

    /// Size of the CM type.
    pub fn half(&self) -> usize {
        self.f.half()
    }

    pub fn bar(&self, sigma: usize) -> usize {
        self.f.bar(sigma)
    }

    pub fn alpha(&self, tau: usize, sigma: usize) -> usize {
        self.decomp.component_of(tau, sigma)
    }

    pub fn eval_e(&self, a: &NfElem, tau: usize) -> S {
        self.e.eval(a, tau)
    }

    pub fn eval_f(&self, a: &NfElem, sigma: usize) -> S {
        self.f.eval(a, sigma)
    }

    pub fn one(&self) -> S {
        S::rational(&self.ctx, &super::qpoly::q(1))
    }

    /// The tau-vector of 1 (x) sigma(a).
    pub fn f_vector(&self, a: &NfElem, sigma: usize) -> Vec<S> {
        let v = self.eval_f(a, sigma);
        vec![v; self.num_tau()]
    }

    /// The tau-vector of a (x) 1.
    pub fn e_vector(&self, a: &NfElem) -> Vec<S> {
        (0..self.num_tau()).map(|t| self.eval_e(a, t)).collect()
    }

    /// Spanning family of E (x) sigma(F) inside E (x) C.
    pub fn span_e_sigma(&self, sigma: usize) -> Vec<Vec<S>> {
        let mut out = Vec::new();
        let ys: Vec<S> = {
            let y = &self.f.roots[sigma];
            let mut p = y.one_like();
            (0..self.f.field.degree())
                .map(|_| {
                    let c = p.clone();
                    p = p.mul(y);
                    c
                })
                .collect()
        };
        for k in 0..self.e.field.degree() {
            for yl in &ys {
                out.push(
                    (0..self.num_tau())
                        .map(|t| self.e.roots[t].pow_i(k as i64).unwrap().mul(yl))
                        .collect(),
                );
            }
        }
        out
    }

    /// Spanning family of E inside E (x) C.
    pub fn span_e(&self) -> Vec<Vec<S>> {
        (0..self.e.field.degree())
            .map(|k| {
                (0..self.num_tau())
                    .map(|t| self.e.roots[t].pow_i(k as i64).unwrap())
                    .collect()
            })
            .collect()
    }

    pub fn recognize_e_sigma(&self, x: &[S], sigma: usize) -> Membership {
        S::recognize(x, &self.span_e_sigma(sigma))
    }

    pub fn recognize_e(&self, x: &[S]) -> Membership {
        S::recognize(x, &self.span_e())
    }

    pub fn backend(&self) -> super::backend::BackendSpec {
        S::spec(&self.ctx)
    }
}
