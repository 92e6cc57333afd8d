use periodkit::error::Error;
use periodkit::hodge_combinatorics::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Integers m at which neither L_inf(M, s) nor L_inf(M^v, 1 - s) has a pole,
/// found by listing the Gamma arguments and testing each for a pole.
fn gamma_pole_oracle(pairs: &[(i64, i64)], window: i64) -> Option<Vec<i64>> {
    if pairs.iter().any(|(p, q)| p == q) {
        return None;
    }
    // Gamma_C(s - p) for p < q on the left, Gamma_C(1 - s + q) on the dual side
    let mut args: Vec<(i64, i64)> = Vec::new(); // argument = a*s + b
    for &(p, q) in pairs {
        if p < q {
            args.push((1, -p));
            args.push((-1, 1 + q));
        }
    }
    let pole = |a: i64, b: i64, s: i64| a * s + b <= 0;
    Some(
        (-window..=window)
            .filter(|&s| args.iter().all(|&(a, b)| !pole(a, b, s)))
            .collect(),
    )
}

fn random_multiset(rng: &mut ChaCha8Rng, middle: bool) -> Vec<(i64, i64)> {
    let k = rng.gen_range(1..=4usize);
    let w = rng.gen_range(-20..=20i64) * 2 + if middle { 0 } else { rng.gen_range(0..=1) };
    let mut ps: Vec<i64> = Vec::new();
    while ps.len() < k {
        let p = w.div_euclid(2) - rng.gen_range(1..=20);
        if 2 * p < w && !ps.contains(&p) {
            ps.push(p);
        }
    }
    let mut out: Vec<(i64, i64)> = ps.iter().flat_map(|&p| [(p, w - p), (w - p, p)]).collect();
    if middle {
        out.push((w / 2, w / 2));
    }
    out
}

#[test]
fn critical_points_agree_with_gamma_poles() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let ms = random_multiset(&mut rng, false);
        let got = critical_points(&ms).unwrap();
        assert_eq!(Some(got), gamma_pole_oracle(&ms, 200), "{:?}", ms);
    }
    for _ in 0..100 {
        let ms = random_multiset(&mut rng, true);
        assert!(matches!(critical_points(&ms), Err(Error::MiddleClass(_))));
        assert!(gamma_pole_oracle(&ms, 200).is_none());
    }
}

#[test]
fn two_pi_i_identity_specializes() {
    for n in 0..=64u64 {
        assert_eq!(tensor_two_pi_i_exponent(n, 1), n * n.saturating_sub(1) / 2);
    }
}

fn random_type(rng: &mut ChaCha8Rng, n: usize, weight2: i64) -> InfinityType {
    // doubled values in Z + (n-1)/2
    let parity = (n as i64 - 1).rem_euclid(2);
    let mut vals: Vec<i64> = Vec::new();
    while vals.len() < n {
        let v = 2 * rng.gen_range(-15..=15i64) + parity;
        if !vals.contains(&v) {
            vals.push(v);
        }
    }
    vals.sort_by(|a, b| b.cmp(a));
    let a: Vec<Half> = vals.iter().map(|&v| Half(v)).collect();
    let ab: Vec<Half> = vals.iter().map(|&v| Half(weight2 - v)).collect();
    InfinityType::new(n, Half(weight2), "t1", vec![("s1".into(), a), ("bar(s1)".into(), ab)]).unwrap()
}

#[test]
fn rank_one_split_indices_match_i_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.gen_range(1..=6usize);
        // weights keep the motive weights integral
        let (w1, w2) = (2 * rng.gen_range(-3..=3), 2 * rng.gen_range(-3..=3));
        let pi = random_type(&mut rng, n, w1);
        let chi = random_type(&mut rng, 1, w2);
        let hp = hodge_from_infinity(&pi).unwrap();
        let hc = hodge_from_infinity(&chi).unwrap();
        let (sp, sp2) = match split_indices(hp.at("s1").unwrap(), hp.w, hc.at("s1").unwrap(), hc.w) {
            Ok(x) => x,
            Err(Error::MiddleClass(_)) => continue,
            Err(e) => panic!("{}", e),
        };
        let i = i_sigma(&pi, &chi, "s1").unwrap();
        assert_eq!(sp.iter().position(|&x| x == 1), Some(i));
        assert_eq!(sp2, vec![n - i, i]);
        checked += 1;
    }
}

fn self_dual_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    let mut tops: Vec<i64> = Vec::new();
    while tops.len() < n / 2 {
        let t = rng.gen_range(1..=12);
        if !tops.contains(&t) {
            tops.push(t);
        }
    }
    tops.sort_by(|a, b| b.cmp(a));
    let mut a = tops.clone();
    if n % 2 == 1 {
        a.push(0);
    }
    a.extend(tops.iter().rev().map(|t| -t));
    a
}

#[test]
fn guerberoff_index_is_n_minus_i_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut admissible = 0;
    for _ in 0..20000 {
        let n = rng.gen_range(1..=6usize);
        let a = self_dual_weights(&mut rng, n);
        let r = rng.gen_range(0..=n);
        let (ms, mb) = (rng.gen_range(-6..=6), rng.gen_range(-6..=6));
        let d = UnitaryData { a: a.clone(), r, s: n - r, m_sigma: ms, m_bar: mb };
        let range = critical_range_unitary(n, &[d]).unwrap();
        if range.is_empty() {
            continue;
        }
        admissible += 1;
        assert_eq!(guerberoff_s_index(&a, ms, mb), n - r, "a={:?} r={} ms={} mb={}", a, r, ms, mb);

        // each critical m, shifted to the motivic normalisation, is critical for
        // the Hodge data of M(Pi) (x) M(psi~^c) over all embeddings
        let big_a = unitary_infinity_type(&a);
        let delta = ms - mb;
        let pi = InfinityType::new(
            n,
            Half(0),
            "t1",
            vec![
                ("s1".into(), big_a.clone()),
                ("bar(s1)".into(), big_a.iter().map(|x| Half(-x.0)).collect()),
            ],
        )
        .unwrap();
        let chi = InfinityType::new(
            1,
            Half(0),
            "t1",
            vec![("s1".into(), vec![Half::int(delta)]), ("bar(s1)".into(), vec![Half::int(-delta)])],
        )
        .unwrap();
        let hp = hodge_from_infinity(&pi).unwrap();
        let hc = hodge_from_infinity(&chi).unwrap();
        let w = hp.w + hc.w;
        let mut pairs = Vec::new();
        for l in ["s1", "bar(s1)"] {
            for &p in hp.at(l).unwrap() {
                let e = p + hc.at(l).unwrap()[0];
                pairs.push((e, w - e));
            }
        }
        let crit = critical_points(&pairs).unwrap();
        for m in range {
            let x = Half(m.0 + n as i64 - 1).to_integer().unwrap();
            assert!(crit.contains(&x), "m = {} not critical for {:?}", m, pairs);
        }
    }
    assert!(admissible > 1000);
}

#[test]
fn infinity_type_json_round_trip() {
    let v = serde_json::json!({"n": 2, "weight": "0", "A": {"s1": ["3/2", "-3/2"], "bar(s1)": ["3/2", "-3/2"]}});
    let t = InfinityType::from_json(&v).unwrap();
    let back = InfinityType::from_json(&t.to_json()).unwrap();
    assert_eq!(t, back);
}

proptest! {
    #[test]
    fn split_totals(p in proptest::collection::btree_set(-20i64..20, 1..8),
                    r in proptest::collection::btree_set(-20i64..20, 1..6),
                    w in -10i64..10, w2 in -10i64..10) {
        let p: Vec<i64> = p.into_iter().rev().collect();
        let r: Vec<i64> = r.into_iter().rev().collect();
        match split_indices(&p, w, &r, w2) {
            Ok((a, b)) => {
                prop_assert_eq!(a.len(), p.len() + 1);
                prop_assert_eq!(b.len(), r.len() + 1);
                prop_assert_eq!(a.iter().sum::<usize>(), r.len());
                prop_assert_eq!(b.iter().sum::<usize>(), p.len());
            }
            Err(Error::MiddleClass(_)) => {
                prop_assert!(p.iter().any(|x| r.iter().any(|y| 2 * (x + y) == w + w2)));
            }
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn split_indices_are_order_free(p in proptest::collection::btree_set(-20i64..20, 1..6),
                                    r in proptest::collection::btree_set(-20i64..20, 1..5)) {
        let p: Vec<i64> = p.into_iter().collect();
        let r: Vec<i64> = r.into_iter().collect();
        let mut pr = p.clone();
        pr.reverse();
        // odd total weight avoids the middle
        let a = split_indices(&p, 1, &r, 0);
        let b = split_indices(&pr, 1, &r, 0);
        prop_assert_eq!(a.ok(), b.ok());
    }

    #[test]
    fn critical_interval_is_symmetric(k in 1usize..4, w in -10i64..10, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ps: Vec<i64> = Vec::new();
        while ps.len() < k {
            let p = w.div_euclid(2) - rng.gen_range(1..=10);
            if 2 * p < w && !ps.contains(&p) { ps.push(p); }
        }
        let pairs: Vec<(i64, i64)> = ps.iter().flat_map(|&p| [(p, w - p), (w - p, p)]).collect();
        let c = critical_points(&pairs).unwrap();
        // m critical iff w + 1 - m critical (functional equation)
        for &m in &c {
            prop_assert!(c.contains(&(w + 1 - m)));
        }
    }

    #[test]
    fn half_parse_render(x in -1000i64..1000) {
        prop_assert_eq!(Half::parse(&Half(x).to_string()).unwrap(), Half(x));
    }
}
