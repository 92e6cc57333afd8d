use super::{rev_cols, MotiveData, PlantedRecord};
use crate::error::{validation, Error, Result};
use crate::scalar_algebra::decomp::{eval_tensor, TensorElem};
use crate::scalar_algebra::emat::{self, EMat};
use crate::scalar_algebra::recognize::solve_rational;
use crate::scalar_algebra::{Backend, Matrix, NfElem, NumberField, QPoly, ZeroTest};
use num_rational::BigRational;
use num_traits::One;
use std::sync::Arc;

fn same_pair<S: Backend>(m: &MotiveData<S>, o: &MotiveData<S>) -> Result<()> {
    let (a, b) = (&m.pair, &o.pair);
    if Arc::ptr_eq(a, b) || (a.e.field == b.e.field && a.f.field == b.f.field && a.backend() == b.backend()) {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "motives live over different fields or backends ({} / {})",
            m.label, o.label
        )))
    }
}

/// M (x) M': Kronecker data, exponents p_i + r_k in Kronecker order.
pub fn tensor<S: Backend>(m: &MotiveData<S>, o: &MotiveData<S>) -> Result<MotiveData<S>> {
    same_pair(m, o)?;
    let hodge: Vec<Vec<i64>> = m
        .hodge
        .iter()
        .zip(&o.hodge)
        .map(|(p, r)| p.iter().flat_map(|a| r.iter().map(move |b| a + b)).collect())
        .collect();
    let comparison = m
        .comparison
        .iter()
        .zip(&o.comparison)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.kron(b)).collect())
        .collect();
    let e = m.e();
    let frobenius = m
        .frobenius
        .iter()
        .zip(&o.frobenius)
        .map(|(a, b)| emat::kron(e, a, b))
        .collect();
    let w = m.w + o.w;
    let mut t = MotiveData {
        pair: m.pair.clone(),
        label: format!("{}(x){}", m.label, o.label),
        n: m.n * o.n,
        w,
        hodge,
        regular: false,
        no_middle_class: false,
        comparison,
        frobenius,
        dr_basis: format!("{}(x){}", m.dr_basis, o.dr_basis),
        betti_basis: format!("{}(x){}", m.betti_basis, o.betti_basis),
        planted: None,
    };
    t.regular = t.is_regular_data();
    t.no_middle_class = !t.has_middle_class();
    Ok(t)
}

impl<S: Backend> MotiveData<S> {
    /// Exponents at a component as a sorted multiset (decreasing).
    pub fn sorted_exponents(&self, alpha: usize) -> Vec<i64> {
        let mut v = self.hodge[alpha].clone();
        v.sort_by(|a, b| b.cmp(a));
        v
    }
}

/// M^c: the data at sigma is the data of M at bar sigma, with Betti bases
/// transported by Frobenius and reversed.
pub fn conjugate<S: Backend>(m: &MotiveData<S>) -> Result<MotiveData<S>> {
    let p = &m.pair;
    let (nt, ns) = (p.num_tau(), p.num_sigma());
    let mut comparison = Vec::with_capacity(nt);
    for t in 0..nt {
        let mut row = Vec::with_capacity(ns);
        for s in 0..ns {
            let c = m.comparison[t][p.bar(s)].mul(&m.frobenius_at(t, s))?;
            row.push(rev_cols(&c));
        }
        comparison.push(row);
    }
    let frobenius: Vec<EMat> = m.frobenius.iter().map(emat::reverse).collect();
    let hodge = (0..m.hodge.len()).map(|a| m.hodge[p.conj_alpha[a]].clone()).collect();
    let planted = match &m.planted {
        Some(r) => {
            let delta = comparison
                .iter()
                .map(|row: &Vec<Matrix<S>>| row.iter().map(|c| c.det()).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Some(PlantedRecord {
                seed: r.seed,
                random_epsilon: r.random_epsilon,
                q: (0..nt)
                    .map(|t| (0..ns).map(|s| r.q[t][p.bar(s)].clone()).collect())
                    .collect(),
                basis_multiplier: vec![vec![p.one(); ns]; nt],
                delta,
            })
        }
        None => None,
    };
    Ok(MotiveData {
        pair: m.pair.clone(),
        label: conj_label(&m.label),
        n: m.n,
        w: m.w,
        hodge,
        regular: m.regular,
        no_middle_class: m.no_middle_class,
        comparison,
        frobenius,
        dr_basis: m.dr_basis.clone(),
        betti_basis: conj_label(&m.betti_basis),
        planted,
    })
}

fn conj_label(s: &str) -> String {
    match s.strip_suffix("^c") {
        Some(x) => x.to_string(),
        None => format!("{}^c", s),
    }
}

/// Change of Betti bases (E-rational, one per sigma) and of the de Rham basis
/// (filtration-preserving over E (x) F).
#[derive(Clone, Debug, Default)]
pub struct BasisChange {
    pub betti: Option<Vec<EMat>>,
    /// New basis vector b is sum_a dr[a][b] w~_a.
    pub dr: Option<Vec<Vec<TensorElem>>>,
    pub tag: String,
}

pub fn rebase<S: Backend>(m: &MotiveData<S>, change: &BasisChange) -> Result<MotiveData<S>> {
    let p = &m.pair;
    let (nt, ns, n) = (p.num_tau(), p.num_sigma(), m.n);
    let e = m.e();
    let mut out = m.clone();
    let mut mult = vec![vec![p.one(); ns]; nt];
    if let Some(ps) = &change.betti {
        if ps.len() != ns {
            return Err(Error::Dimension("one Betti change per embedding of F".into()));
        }
        let invs: Vec<EMat> = ps
            .iter()
            .map(|x| emat::inverse(e, x))
            .collect::<Result<_>>()?;
        for s in 0..ns {
            out.frobenius[s] = emat::mul(e, &emat::mul(e, &invs[p.bar(s)], &m.frobenius[s]), &ps[s]);
        }
        for t in 0..nt {
            for s in 0..ns {
                let pe = emat::eval(&p.e, &ps[s], t);
                out.comparison[t][s] = out.comparison[t][s].mul(&pe)?;
                mult[t][s] = mult[t][s].mul(&pe.det()?);
            }
        }
        out.betti_basis = format!("{}*{}", m.betti_basis, change.tag);
    }
    if let Some(b) = &change.dr {
        if b.len() != n || b.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("de Rham change must be n x n".into()));
        }
        for t in 0..nt {
            for s in 0..ns {
                let ex = m.exponents(t, s);
                let bm = Matrix::from_fn(n, n, |i, j| eval_tensor(&p.e, &p.f, &b[i][j], t, s));
                for i in 0..n {
                    for j in 0..n {
                        if ex[i] < ex[j] && bm.get(i, j).zero_test() != ZeroTest::Zero {
                            return Err(validation(
                                "DR_FILTRATION",
                                format!("de Rham change does not preserve the filtration at ({}, {})", i + 1, j + 1),
                            ));
                        }
                    }
                }
                let d = bm.det()?;
                out.comparison[t][s] = bm.solve(&out.comparison[t][s])?;
                mult[t][s] = mult[t][s].div(&d)?;
            }
        }
        out.dr_basis = format!("{}*{}", m.dr_basis, change.tag);
    }
    if let Some(r) = &mut out.planted {
        for t in 0..nt {
            for s in 0..ns {
                r.basis_multiplier[t][s] = r.basis_multiplier[t][s].mul(&mult[t][s]);
            }
        }
        if change.dr.is_some() {
            // Q values are tied to the normalisation of the de Rham basis
            out.planted = None;
        }
    }
    Ok(out)
}

/// Apply an automorphism of F given by the image of the generator.
pub fn apply_automorphism(f: &NumberField, a: &NfElem, image: &NfElem) -> NfElem {
    let mut acc = f.zero();
    for c in a.iter().rev() {
        acc = f.add(&f.mul(&acc, image), &f.from_rational(c));
    }
    acc
}

/// Minimal polynomial over Q of an element of F, via linear dependence of powers.
pub fn minimal_polynomial(f: &NumberField, a: &NfElem) -> QPoly {
    let d = f.degree();
    let mut powers = vec![f.one()];
    for k in 1..=d {
        let next = f.mul(&powers[k - 1], a);
        // is a^k a combination of lower powers?
        let rows: Vec<Vec<BigRational>> = (0..d)
            .map(|c| powers.iter().map(|pw| pw[c].clone()).collect())
            .collect();
        if let Some(x) = solve_rational(&rows, &next) {
            let mut coeffs: Vec<BigRational> = x.iter().map(|v| -v.clone()).collect();
            coeffs.push(BigRational::one());
            return QPoly::new(coeffs);
        }
        powers.push(next);
    }
    unreachable!("an element of a degree-{} field has a minimal polynomial of degree <= {}", d, d)
}

/// The restriction of scalars to Q of M, assembled in coordinates.
#[derive(Clone, Debug)]
pub struct RestrictionPackage<S: Backend> {
    pub label: String,
    pub n: usize,
    pub degree_f: usize,
    /// Purely imaginary element of F.
    pub imaginary: NfElem,
    /// Generator of F+ and its minimal polynomial.
    pub plus_gen: NfElem,
    pub plus_poly: QPoly,
    /// Row labels (sigma', a) of the low-coordinate system.
    pub low_rows: Vec<Vec<(usize, usize)>>,
    /// Per tau: coordinates of the E-basis y^l w~_i of M_DR at every sigma.
    pub dr_assembly: Vec<Matrix<S>>,
    /// Per tau: block diagonal of the comparison matrices over all sigma.
    pub betti_blocks: Vec<Matrix<S>>,
    /// Per tau: the E-basis of M_DR^+ in low coordinates.
    pub plus_dr: Vec<Matrix<S>>,
    /// Per tau: images of e_j +- F e_j (sigma in the CM type), index 0 for +.
    pub plus_betti: [Vec<Matrix<S>>; 2],
    /// Per tau: images of the local bases (v_a, v_{a*}) at each sigma of the CM type.
    pub local_target: Vec<Matrix<S>>,
}

impl<S: Backend> RestrictionPackage<S> {
    pub fn betti_dim(&self) -> usize {
        self.n * self.degree_f
    }
}

pub fn restriction_of_scalars<S: Backend>(
    m: &MotiveData<S>,
    imaginary: Option<&NfElem>,
) -> Result<RestrictionPackage<S>> {
    if m.has_middle_class() {
        return Err(Error::MiddleClass(format!(
            "{}: a (w/2, w/2) class leaves no critical point",
            m.label
        )));
    }
    let p = &m.pair;
    let f = &p.f.field;
    let (nt, ns, g, n) = (p.num_tau(), p.num_sigma(), p.half(), m.n);
    let d = f.degree();
    let alpha = match imaginary {
        Some(a) => a.clone(),
        None => f.sub(&f.gen(), &p.c_f),
    };
    let alpha_bar = apply_automorphism(f, &alpha, &p.c_f);
    if f.add(&alpha, &alpha_bar) != f.zero() || f.is_zero(&alpha) {
        return Err(validation("NOT_IMAGINARY", "the chosen element is not purely imaginary"));
    }
    // a generator of F+ of the form y^k + c(y)^k
    let mut beta = f.one();
    let mut plus_poly = QPoly::from_i64(&[-1, 1]);
    for k in 1..=d as u32 {
        let y = f.pow(&f.gen(), k);
        let b = f.add(&y, &apply_automorphism(f, &y, &p.c_f));
        let mp = minimal_polynomial(f, &b);
        if mp.degree() == g {
            beta = b;
            plus_poly = mp;
            break;
        }
    }
    if plus_poly.degree() != g {
        return Err(Error::InvalidField("no generator of the totally real subfield found".into()));
    }
    let t_k: Vec<NfElem> = (0..g).map(|k| f.pow(&beta, k as u32)).collect();
    let ta = |k: usize| f.mul(&t_k[k], &alpha);

    let like = p.one();
    let zero = like.zero_like();
    let mut low_rows = Vec::with_capacity(nt);
    let mut dr_assembly = Vec::with_capacity(nt);
    let mut betti_blocks = Vec::with_capacity(nt);
    let mut plus_dr = Vec::with_capacity(nt);
    let mut plus_betti = [Vec::with_capacity(nt), Vec::with_capacity(nt)];
    let mut local_target = Vec::with_capacity(nt);
    let half_plus = (n + 1) / 2;
    let half_minus = n / 2;
    for t in 0..nt {
        let ypow: Vec<Vec<S>> = (0..ns)
            .map(|s| (0..d).map(|l| p.eval_f(&f.pow(&f.gen(), l as u32), s)).collect())
            .collect();
        dr_assembly.push(Matrix::from_fn(d * n, d * n, |r, c| {
            let (s, i) = (r / n, r % n);
            let (l, i2) = (c / n, c % n);
            if i == i2 { ypow[s][l].clone() } else { zero.clone() }
        }));
        betti_blocks.push(Matrix::from_fn(d * n, d * n, |r, c| {
            let (s, i) = (r / n, r % n);
            let (s2, j) = (c / n, c % n);
            if s == s2 { m.comparison[t][s].get(i, j).clone() } else { zero.clone() }
        }));
        let rows: Vec<(usize, usize)> = (0..ns)
            .flat_map(|s| m.low_set(t, s).into_iter().map(move |a| (s, a)))
            .collect();
        let size = rows.len();
        if size != g * n {
            return Err(Error::Dimension("low coordinates do not have size n [F+:Q]".into()));
        }
        let row_of = |s: usize, a: usize| rows.iter().position(|&x| x == (s, a));
        // E-basis of M_DR^+: t_k (v_i + v_i*) then t_k alpha (v_j - v_j*)
        let mut cols: Vec<Vec<S>> = Vec::with_capacity(size);
        for k in 0..g {
            for i in 0..half_plus {
                let mut v = vec![zero.clone(); size];
                for (r, &(s, a)) in rows.iter().enumerate() {
                    if a == i || a == n - 1 - i {
                        v[r] = p.eval_f(&t_k[k], s);
                    }
                }
                cols.push(v);
            }
            for j in 0..half_minus {
                let mut v = vec![zero.clone(); size];
                for (r, &(s, a)) in rows.iter().enumerate() {
                    let x = p.eval_f(&ta(k), s);
                    if a == j {
                        v[r] = x;
                    } else if a == n - 1 - j {
                        v[r] = x.neg();
                    }
                }
                cols.push(v);
            }
        }
        plus_dr.push(Matrix::from_fn(size, size, |r, c| cols[c][r].clone()));
        for (si, sign) in [1i64, -1].iter().enumerate() {
            let mut mat = Matrix::zeros(&like, size, size);
            for s in 0..g {
                let sb = p.bar(s);
                let at_s = &m.comparison[t][s];
                let at_sb = m.comparison[t][sb].mul(&m.frobenius_at(t, s))?;
                for j in 0..n {
                    let c = s * n + j;
                    for a in m.low_set(t, s) {
                        mat.set(row_of(s, a).unwrap(), c, at_s.get(a, j).clone());
                    }
                    for a in m.low_set(t, sb) {
                        let v = at_sb.get(a, j);
                        mat.set(row_of(sb, a).unwrap(), c, if *sign > 0 { v.clone() } else { v.neg() });
                    }
                }
            }
            plus_betti[si].push(mat);
        }
        let mut target = Matrix::zeros(&like, size, size);
        for s in 0..g {
            let low = m.low_set(t, s);
            for a in 0..n {
                let r = if low.contains(&a) {
                    row_of(s, a)
                } else {
                    row_of(p.bar(s), n - 1 - a)
                };
                let r = r.ok_or_else(|| validation("BASIS_CONDITION", "target vector outside the low coordinates"))?;
                target.set(r, s * n + a, like.one_like());
            }
        }
        if target.det()?.zero_test() != ZeroTest::NonZero {
            return Err(validation("BASIS_CONDITION", "the images of (w_i, w_{n+1-i}) are not a basis"));
        }
        local_target.push(target);
        low_rows.push(rows);
    }
    Ok(RestrictionPackage {
        label: format!("Res({})", m.label),
        n,
        degree_f: d,
        imaginary: alpha,
        plus_gen: beta,
        plus_poly,
        low_rows,
        dr_assembly,
        betti_blocks,
        plus_dr,
        plus_betti,
        local_target,
    })
}

/// A random basis change: E-rational Betti matrices and/or a de Rham change
/// whose pattern preserves the filtration on every component.
pub fn random_basis_change<S: Backend, R: rand::Rng>(
    m: &MotiveData<S>,
    betti: bool,
    dr: bool,
    rng: &mut R,
) -> BasisChange {
    let p = &m.pair;
    let e = m.e();
    let n = m.n;
    let (de, df) = (e.degree(), p.f.field.degree());
    let betti = betti.then(|| {
        (0..p.num_sigma())
            .map(|_| emat::random_invertible(e, n, rng, 2))
            .collect()
    });
    let allowed = |a: usize, b: usize| a == b || m.hodge.iter().all(|h| h[a] > h[b]);
    let dr = dr.then(|| {
        let draw = |rng: &mut R| -> TensorElem {
            (0..de)
                .map(|_| (0..df).map(|_| BigRational::from_integer(rng.gen_range(-2i64..=2).into())).collect())
                .collect()
        };
        let zero: TensorElem = vec![vec![BigRational::from_integer(0.into()); df]; de];
        let mut b = vec![vec![zero.clone(); n]; n];
        for a in 0..n {
            for c in 0..n {
                if a == c {
                    // diagonal entries must be units of E (x) F
                    loop {
                        let x = draw(rng);
                        let unit = (0..p.num_tau()).all(|t| {
                            (0..p.num_sigma())
                                .all(|s| eval_tensor(&p.e, &p.f, &x, t, s).zero_test() == ZeroTest::NonZero)
                        });
                        if unit {
                            b[a][c] = x;
                            break;
                        }
                    }
                } else if allowed(a, c) {
                    b[a][c] = draw(rng);
                }
            }
        }
        b
    });
    BasisChange {
        betti,
        dr,
        tag: "twist".to_string(),
    }
}
