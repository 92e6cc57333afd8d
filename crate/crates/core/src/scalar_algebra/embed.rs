use super::backend::Backend;
use super::numfield::{automorphisms, NfElem, NumberField};
use super::scalar::{Scalar, ZeroTest};
use crate::error::{Error, Result};
use serde::Serialize;

/// Complex embeddings of a number field as backend scalars.
///
/// For a CM field the order is `s1..sg` (the CM type, roots in the upper half
/// plane) followed by `bar(s1)..bar(sg)`.
#[derive(Clone, Debug)]
pub struct EmbeddingSet<S: Backend> {
    pub field: NumberField,
    pub roots: Vec<S>,
    pub conj: Vec<usize>,
    pub cm_type: Option<Vec<usize>>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingSummary {
    pub field: String,
    pub labels: Vec<String>,
    pub conj: Vec<usize>,
    pub roots: Vec<String>,
    pub cm_type: Option<Vec<String>>,
}

impl<S: Backend> EmbeddingSet<S> {
    /// Embeddings of a coefficient field, labelled `t1, t2, ...`.
    pub fn coefficient(ctx: &S::Ctx, field: &NumberField) -> Result<Self> {
        let roots = S::roots(ctx, &field.qpoly(), &field.label)?;
        let conj = conj_permutation(&roots)?;
        let labels = (1..=roots.len()).map(|i| format!("t{}", i)).collect();
        Ok(EmbeddingSet {
            field: field.clone(),
            roots,
            conj,
            cm_type: None,
            labels,
        })
    }

    /// Embeddings of a base field that must be CM.
    pub fn cm(ctx: &S::Ctx, field: &NumberField) -> Result<Self> {
        let roots = S::roots(ctx, &field.qpoly(), &field.label)?;
        let d = roots.len();
        let mut upper: Vec<S> = Vec::new();
        for r in &roots {
            let (_, im) = r.approx();
            match r.sub(&r.conj()).zero_test() {
                ZeroTest::NonZero => {
                    if im > 0.0 {
                        upper.push(r.clone());
                    }
                }
                _ => return Err(Error::NotCm(format!("{}: has a real embedding", field.label))),
            }
        }
        if upper.len() * 2 != d {
            return Err(Error::NotCm(field.label.clone()));
        }
        let mut ordered = upper.clone();
        ordered.extend(upper.iter().map(|r| r.conj()));
        let g = upper.len();
        let conj: Vec<usize> = (0..d).map(|i| (i + g) % d).collect();
        let mut labels: Vec<String> = (1..=g).map(|i| format!("s{}", i)).collect();
        labels.extend((1..=g).map(|i| format!("bar(s{})", i)));
        let set = EmbeddingSet {
            field: field.clone(),
            roots: ordered,
            conj,
            cm_type: Some((0..g).collect()),
            labels,
        };
        set.cm_involution()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Number of embeddings in the CM type.
    pub fn half(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn bar(&self, i: usize) -> usize {
        self.conj[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Image of a field element under embedding i.
    pub fn eval(&self, a: &NfElem, i: usize) -> S {
        let r = &self.roots[i];
        let mut acc = r.zero_like();
        for c in a.iter().rev() {
            acc = acc.mul(r).add(&r.from_rational_like(c));
        }
        acc
    }

    /// The automorphism inducing complex conjugation on every embedding,
    /// as the image of the generator.
    pub fn cm_involution(&self) -> Result<NfElem> {
        for c in automorphisms(&self.field) {
            let ok = (0..self.len()).all(|i| {
                let lhs = self.eval(&c, i);
                let rhs = self.roots[i].conj();
                lhs.sub(&rhs).zero_test() == ZeroTest::Zero
                    || (!lhs.is_exact() && lhs.sub(&rhs).zero_test() == ZeroTest::Unknown)
            });
            if ok {
                return Ok(c);
            }
        }
        Err(Error::NotCm(format!(
            "{}: complex conjugation is not induced by an automorphism",
            self.field.label
        )))
    }

    pub fn summary(&self) -> EmbeddingSummary {
        EmbeddingSummary {
            field: self.field.label.clone(),
            labels: self.labels.clone(),
            conj: self.conj.clone(),
            roots: self.roots.iter().map(|r| r.render()).collect(),
            cm_type: self
                .cm_type
                .as_ref()
                .map(|v| v.iter().map(|&i| self.labels[i].clone()).collect()),
        }
    }
}

/// Pair each root with its complex conjugate.
pub fn conj_permutation<S: Scalar>(roots: &[S]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let c = r.conj();
        let hits: Vec<usize> = (0..roots.len())
            .filter(|&j| roots[j].sub(&c).zero_test() != ZeroTest::NonZero)
            .collect();
        if hits.len() != 1 {
            return Err(Error::Undecidable);
        }
        out.push(hits[0]);
    }
    Ok(out)
}
