use periodkit::error::Error;
use periodkit::motive_model::*;
use periodkit::period_engine::*;
use periodkit::scalar_algebra::emat;
use periodkit::scalar_algebra::{Cyclo, CycloField, FieldPair, Matrix, NumberField, Scalar, ZeroTest};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn pair(cond: u32, e: (&str, &[i64]), f: (&str, &[i64])) -> Arc<FieldPair<Cyclo>> {
    let k = CycloField::new(cond);
    let e = NumberField::new(e.0, e.1).unwrap();
    let f = NumberField::new(f.0, f.1).unwrap();
    FieldPair::new(&k, &e, &f).unwrap()
}

fn pairs() -> Vec<Arc<FieldPair<Cyclo>>> {
    vec![
        // the host field is larger than E (x) F so that membership tests decide something
        pair(12, ("Q", &[0, 1]), ("Q(i)", &[1, 0, 1])),
        pair(12, ("Q(i)", &[1, 0, 1]), ("Q(i)", &[1, 0, 1])),
        pair(24, ("Q(sqrt-2)", &[2, 0, 1]), ("Q(zeta8)", &[1, 0, 0, 0, 1])),
    ]
}

/// None when the rank and weight force a middle class on a self-conjugate component.
fn try_synth(p: &Arc<FieldPair<Cyclo>>, n: usize, w: i64, seed: u64, eps: bool) -> Option<MotiveData<Cyclo>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hodge = match random_hodge(p, n, w, 4, true, &mut rng) {
        Ok(h) => h,
        Err(Error::MiddleClass(_)) => return None,
        Err(e) => panic!("{}", e),
    };
    let mut spec = SyntheticSpec::new("M", n, w, hodge, seed);
    spec.random_epsilon = eps;
    Some(synthesize_motive(p, &spec).unwrap())
}

fn synth(p: &Arc<FieldPair<Cyclo>>, n: usize, w: i64, seed: u64, eps: bool) -> MotiveData<Cyclo> {
    try_synth(p, n, w, seed, eps).unwrap()
}

fn eq(a: &[Cyclo], b: &[Cyclo]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.sub(y).zero_test() == ZeroTest::Zero)
}

#[test]
fn synthetic_data_validates_and_recovers_planted_q() {
    for p in pairs() {
        for (seed, n) in (0..6).zip([1, 2, 3, 4, 2, 3]) {
            let Some(m) = try_synth(&p, n, 3, seed, true) else { continue };
            let rep = validate(&m);
            assert!(rep.valid, "{:?}", rep.failed_codes());
            let planted = m.planted.clone().unwrap();
            for t in 0..p.num_tau() {
                for s in 0..p.num_sigma() {
                    let q = periods_q(&m, t, s);
                    assert!(eq(&q, &planted.q[t][s]), "seed {} tau {} sigma {}", seed, t, s);
                }
            }
        }
    }
}

fn periods_q(m: &MotiveData<Cyclo>, t: usize, s: usize) -> Vec<Cyclo> {
    periodkit::period_engine::motivic_q_at(m, t, s).unwrap()
}

#[test]
fn broken_frobenius_is_reported() {
    let p = &pairs()[0];
    let mut m = synth(p, 2, 1, 7, false);
    let e = m.e().clone();
    m.frobenius[1] = emat::identity(&e, 2);
    m.frobenius[1][0][1] = e.from_i64(1);
    let rep = validate(&m);
    assert!(!rep.valid);
    assert!(rep.failed_codes().contains(&"FROB_INVOLUTION"));
}

#[test]
fn rank_one_identity_frames() {
    let p = &pairs()[1];
    let q = p.one().from_i64_like(5);
    let mut spec = SyntheticSpec::new("chi", 1, 0, vec![vec![1], vec![-1]], 3);
    spec.identity_frames = true;
    spec.frobenius = Some(vec![emat::identity(&p.e.field, 1)]);
    spec.planted_q = vec![((0, 0, 0), q.clone())];
    let m = synthesize_motive(p, &spec).unwrap();
    assert!(validate(&m).valid);
    let got = motivic_q(&m, 0, 0).unwrap();
    assert!(eq(&got.tau_components[..1], &[q.clone()]));
    // at bar sigma the forced value is the inverse
    let got = motivic_q(&m, 1, 0).unwrap();
    assert!(eq(&got.tau_components[..1], &[q.inv().unwrap()]));
    assert!(m.comparison[0][0].get(0, 0).sub(&p.one()).zero_test() == ZeroTest::Zero);
}

fn prod(v: &[Cyclo], like: &Cyclo) -> Cyclo {
    v.iter().fold(like.one_like(), |a, b| a.mul(b))
}

#[test]
fn conjugate_determinant_is_product_of_q() {
    for p in pairs() {
        for seed in 10..13 {
            let Some(m) = try_synth(&p, 3, 5, seed, true) else { continue };
            let mc = conjugate(&m).unwrap();
            assert!(validate(&mc).valid);
            for s in 0..p.num_sigma() {
                let d = sigma_determinant_period(&m, s).unwrap();
                let dc = sigma_determinant_period(&mc, s).unwrap();
                for t in 0..p.num_tau() {
                    let q = motivic_q_at(&m, t, s).unwrap();
                    let want = prod(&q, &p.one()).mul(&d.tau_components[t]);
                    assert_eq!(want.sub(&dc.tau_components[t]).zero_test(), ZeroTest::Zero);
                }
                // Q^{(n)}(M) against delta(M^c)
                let qn = q_cumulative(&m, s, m.n).unwrap();
                assert!(eq(&qn.tau_components, &dc.tau_components));
            }
            // conjugation is an involution on the data
            let mcc = conjugate(&mc).unwrap();
            assert_eq!(mcc.hodge, m.hodge);
            for t in 0..p.num_tau() {
                for s in 0..p.num_sigma() {
                    let a = &mcc.comparison[t][s];
                    let b = &m.comparison[t][s];
                    assert!(eq(&a.to_rows().concat(), &b.to_rows().concat()));
                }
            }
        }
    }
}

#[test]
fn conjugacy_ratio_is_one_and_tracks_betti_twists() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for p in pairs() {
        for seed in 20..23 {
            let Some(m) = try_synth(&p, 3, 3, seed, true) else { continue };
            let tw = random_basis_change(&conjugate(&m).unwrap(), true, false, &mut rng);
            for s in 0..p.half() {
                for j in 0..=m.n {
                    let r = verify_conjugacy(&m, s, j, None).unwrap();
                    assert!(r.membership.is_member());
                    assert_eq!(r.matches_expected, Some(true));
                    let r = verify_conjugacy(&m, s, j, Some(&tw)).unwrap();
                    assert!(r.membership.is_member());
                    assert_eq!(r.matches_expected, Some(true));
                }
            }
        }
    }
}

#[test]
fn plus_minus_sign_relation() {
    for p in pairs() {
        for seed in 30..34 {
            let Some(m) = try_synth(&p, 4, 3, seed, true) else { continue };
            for s in 0..p.num_sigma() {
                let cp = local_deligne_period(&m, s, true).unwrap();
                let cm = local_deligne_period(&m, s, false).unwrap();
                let e = e_sigma(&m, s);
                for t in 0..p.num_tau() {
                    let want = cm.tau_components[t].mul(&p.one().from_i64_like(e[t]));
                    assert_eq!(want.sub(&cp.tau_components[t]).zero_test(), ZeroTest::Zero);
                }
            }
        }
    }
}

#[test]
fn rank_two_deligne_period_matches_cofactor_expansion() {
    let p = &pairs()[1];
    let m = synth(p, 2, 1, 41, true);
    for t in 0..p.num_tau() {
        for s in 0..p.num_sigma() {
            let d = deligne_matrix(&m, t, s, true).unwrap();
            let low = m.low_set(t, s);
            let at_s = &m.comparison[t][s];
            let at_sb = m.comparison[t][p.bar(s)].mul(&m.frobenius_at(t, s)).unwrap();
            let entry = |a: usize, j: usize| {
                if low.contains(&a) { at_s.get(a, j).clone() } else { at_sb.get(1 - a, j).clone() }
            };
            let cof = entry(0, 0).mul(&entry(1, 1)).sub(&entry(0, 1).mul(&entry(1, 0)));
            assert_eq!(cof.sub(&d.det().unwrap()).zero_test(), ZeroTest::Zero);
        }
    }
}

#[test]
fn tensor_of_rank_two_and_rank_one() {
    let p = &pairs()[1];
    let a = synth(p, 2, 3, 50, true);
    let b = synth(p, 1, 2, 51, true);
    let t = tensor(&a, &b).unwrap();
    assert_eq!(t.w, 5);
    assert!(validate(&t).valid);
    for alpha in 0..t.hodge.len() {
        for (i, &x) in t.hodge[alpha].iter().enumerate() {
            assert_eq!(x, a.hodge[alpha][i] + b.hodge[alpha][0]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tw = random_basis_change(&t, true, true, &mut rng);
    for s in 0..p.half() {
        let r = verify_tensor_formula(&a, &b, s, Some(&tw)).unwrap();
        assert_eq!(r.ratio.two_pi_i_exponent, 0);
        assert!(r.passed(), "{:?}", r.to_json());
        // negative control: a stray motivic period leaves the coefficient ring
        let q1 = motivic_q(&a, s, 0).unwrap();
        let off: Vec<Cyclo> = r.ratio.tau_components.iter().zip(&q1.tau_components).map(|(x, y)| x.mul(y)).collect();
        assert!(!p.recognize_e_sigma(&off, s).is_member());
        for (sp, sp2) in &r.split {
            assert_eq!(sp.iter().sum::<usize>(), 1);
            assert_eq!(sp2.iter().sum::<usize>(), 2);
        }
    }
}

#[test]
fn tensor_formula_on_random_pairs() {
    for p in pairs() {
        for seed in 60..64u64 {
            let (n, n2) = (1 + seed as usize % 3, 1 + (seed as usize / 2) % 2);
            let Some(a) = try_synth(&p, n, 3, seed, true) else { continue };
            let Some(b) = try_synth(&p, n2, 2, seed + 100, true) else { continue };
            for s in 0..p.half() {
                match verify_tensor_formula(&a, &b, s, None) {
                    Ok(r) => assert!(r.passed(), "{:?}", r.to_json()),
                    Err(Error::MiddleClass(_)) => {}
                    Err(e) => panic!("{}", e),
                }
            }
        }
    }
}

#[test]
fn trivial_rank_one_factor_reduces_to_c_plus() {
    let p = &pairs()[1];
    let a = synth(p, 2, 1, 70, true);
    let mut spec = SyntheticSpec::new("1", 1, 0, vec![vec![0], vec![0]], 1);
    spec.identity_frames = true;
    spec.frobenius = Some(vec![emat::identity(&p.e.field, 1)]);
    spec.planted_q = vec![((0, 0, 0), p.one()), ((1, 0, 0), p.one())];
    let one = synthesize_motive(p, &spec).unwrap();
    for s in 0..p.half() {
        let r = verify_tensor_formula(&a, &one, s, None).unwrap();
        assert!(r.passed());
        let direct = local_deligne_period(&a, s, true).unwrap();
        let t = tensor(&a, &one).unwrap();
        let via = local_deligne_period(&t, s, true).unwrap();
        assert!(eq(&direct.tau_components, &via.tau_components));
    }
}

#[test]
fn global_factorization_holds() {
    for p in pairs() {
        for seed in 80..83 {
            for n in [1usize, 2, 3] {
                let Some(m) = try_synth(&p, n, 3, seed, true) else { continue };
                let rep = verify_global_factorization(&m, None).unwrap();
                assert!(rep.passed(), "{:?}", rep.to_json());
                let d = sigma_determinant_period(&m, 0).unwrap();
                let off: Vec<Cyclo> =
                    rep.checks[0].ratio.tau_components.iter().zip(&d.tau_components).map(|(x, y)| x.mul(y)).collect();
                assert!(!p.recognize_e(&off).is_member());
                let pkg = restriction_of_scalars(&m, None).unwrap();
                assert_eq!(pkg.betti_dim(), n * p.f.field.degree());
            }
        }
    }
}

#[test]
fn non_imaginary_element_is_rejected() {
    let p = &pairs()[0];
    let m = synth(p, 2, 1, 3, false);
    let f = &p.f.field;
    let real = f.one();
    assert!(matches!(
        restriction_of_scalars(&m, Some(&real)),
        Err(Error::Validation { ref code, .. }) if code == "NOT_IMAGINARY"
    ));
}

#[test]
fn frame_corrections_do_not_move_periods() {
    for p in pairs() {
        for seed in 90..93 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let Ok(hodge) = random_hodge(&p, 3, 3, 4, true, &mut rng) else { continue };
            let spec = SyntheticSpec::new("M", 3, 3, hodge, seed);
            let r = omega_hat_invariance(&p, &spec).unwrap();
            assert!(r.agree, "{:?}", r.mismatches);
            assert!(r.compared > 0);
        }
    }
}

#[test]
fn basis_changes_scale_delta_by_their_determinant() {
    let p = &pairs()[2];
    let m = synth(p, 3, 3, 111, true);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let c = random_basis_change(&m, true, false, &mut rng);
    let m2 = rebase(&m, &c).unwrap();
    assert!(validate(&m2).valid);
    let mult = &m2.planted.as_ref().unwrap().basis_multiplier;
    for s in 0..p.num_sigma() {
        let d1 = sigma_determinant_period(&m, s).unwrap();
        let d2 = sigma_determinant_period(&m2, s).unwrap();
        for t in 0..p.num_tau() {
            let want = d1.tau_components[t].mul(&mult[t][s]);
            assert_eq!(want.sub(&d2.tau_components[t]).zero_test(), ZeroTest::Zero);
        }
        // Q values do not see a Betti change
        for t in 0..p.num_tau() {
            assert!(eq(&motivic_q_at(&m, t, s).unwrap(), &motivic_q_at(&m2, t, s).unwrap()));
        }
    }
}

#[test]
fn filtration_breaking_de_rham_change_is_rejected() {
    let p = &pairs()[0];
    let m = synth(p, 2, 1, 5, false);
    let e = &p.e.field;
    let f = &p.f.field;
    let unit = |x: i64| -> Vec<Vec<num_rational::BigRational>> {
        let mut v = vec![vec![num_rational::BigRational::from_integer(0.into()); f.degree()]; e.degree()];
        v[0][0] = num_rational::BigRational::from_integer(x.into());
        v
    };
    // swap the two basis vectors
    let dr = vec![vec![unit(0), unit(1)], vec![unit(1), unit(0)]];
    let c = BasisChange { betti: None, dr: Some(dr), tag: "swap".into() };
    assert!(matches!(rebase(&m, &c), Err(Error::Validation { ref code, .. }) if code == "DR_FILTRATION"));
}

#[test]
fn inconsistent_planted_conjugate_value_is_rejected() {
    let p = &pairs()[1];
    let mut spec = SyntheticSpec::new("chi", 1, 0, vec![vec![1], vec![-1]], 3);
    spec.planted_q = vec![((0, 0, 0), p.one().from_i64_like(2)), ((0, 1, 0), p.one().from_i64_like(2))];
    assert!(matches!(
        synthesize_motive(p, &spec),
        Err(Error::Validation { ref code, .. }) if code == "PLANTED_Q_CONJ"
    ));
}

#[test]
fn json_round_trip() {
    let p = &pairs()[2];
    let m = synth(p, 2, 1, 8, true);
    let v = m.to_json();
    let back = MotiveData::<Cyclo>::from_json(&p.ctx, &v).unwrap();
    assert_eq!(back.to_json()["comparison"], v["comparison"]);
    assert!(validate(&back).valid);
    let _ = Matrix::identity(&p.one(), 1);
}
