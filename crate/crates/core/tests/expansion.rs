use dashu_int::IBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unitsum_core::catalog::{catalog_entry, load_catalog};
use unitsum_core::expansion::{
    certify_field, greedy_expand, represent_critical_point, unit_sum_representation, DugMethod, FieldContext,
    DEFAULT_DELTA, DEFAULT_MAX_DEPTH,
};
use unitsum_core::numerics::DEFAULT_PRECISION_BITS;
use unitsum_core::rewriting::{gamma_order, rewrite_to_signed, values_equal, word_of};

fn ctx(id: &str) -> FieldContext {
    FieldContext::new(&catalog_entry(id, DEFAULT_PRECISION_BITS).unwrap()).unwrap()
}

/// Independent oracle: sum the certificate terms by repeated multiplication.
fn evaluate(c: &FieldContext, cert: &unitsum_core::expansion::UnitSumCertificate) -> Option<unitsum_core::ring::OrderElement> {
    let o = c.order();
    let inv = o.inverse(&cert.unit_base).ok()?;
    let mut acc = o.zero();
    for t in &cert.terms {
        let mut u = t.unit.element.clone();
        let (step, n) = if t.unit.shift >= 0 { (&cert.unit_base, t.unit.shift) } else { (&inv, -t.unit.shift) };
        for _ in 0..n {
            u = o.mul(&u, step).ok()?;
        }
        acc = o.add(&acc, &u.scale(&IBig::from(t.coefficient))).ok()?;
    }
    Some(acc)
}

#[test]
fn zero_expands_trivially() {
    let c = ctx("q-sqrt-1-zeta4");
    let r = greedy_expand(&c, &c.order().zero(), DEFAULT_DELTA).unwrap();
    assert_eq!(r.amplification, 0);
    assert!(r.digits.is_empty());
    assert!(r.beta.is_zero());
}

#[test]
fn unit_expands_with_exact_identity() {
    let c = ctx("q-sqrt-1-zeta4");
    let r = greedy_expand(&c, &c.base, DEFAULT_DELTA).unwrap();
    assert!(r.verify(&c, &c.base).unwrap());
    let a = c.order().from_i64([5, 3, 0, 0]);
    let r = greedy_expand(&c, &a, DEFAULT_DELTA).unwrap();
    assert!(r.verify(&c, &a).unwrap());
}

#[test]
fn one_minus_gamma_is_eps_inverse_up_to_zeta() {
    let c = ctx("q-sqrt-1-zeta4");
    let a = c.order().from_i64([1, -1, 0, 0]);
    let rep = represent_critical_point(&c, &a, DEFAULT_MAX_DEPTH).unwrap();
    assert_eq!(rep.depth, 1);
    assert!(rep.verify(&c).unwrap());
    let cert = unit_sum_representation(&c, &a, DEFAULT_MAX_DEPTH).unwrap();
    assert_eq!(cert.terms.len(), 1);
    assert_eq!(cert.terms[0].unit.shift, -1);
    assert_eq!(cert.terms[0].coefficient, 1);
    let one = unit_sum_representation(&c, &c.order().one(), DEFAULT_MAX_DEPTH).unwrap();
    assert_eq!(one.terms.len(), 1);
    assert_eq!(one.terms[0].unit.shift, 0);
}

#[test]
fn certifications_match_table_markers() {
    let c = ctx("q-sqrt-1-zeta4");
    let f = certify_field(&c, DEFAULT_MAX_DEPTH).unwrap();
    assert_eq!((f.w, f.critical_count, f.max_depth, f.dug), (1, 4, Some(1), true));
    let c = ctx("q-sqrt-7-4zeta4");
    let f = certify_field(&c, DEFAULT_MAX_DEPTH).unwrap();
    assert_eq!((f.w, f.critical_count, f.max_depth, f.dug, f.omega_bound), (2, 8, Some(2), false, 2));
    let c = ctx("q-sqrt-11-7zeta3");
    let f = certify_field(&c, DEFAULT_MAX_DEPTH).unwrap();
    assert_eq!((f.w, f.critical_count, f.dug), (1, 0, true));
    let c = ctx("x4-x+1");
    let f = certify_field(&c, DEFAULT_MAX_DEPTH).unwrap();
    assert_eq!(f.dug_method, DugMethod::Rewriting);
}

#[test]
fn depth_search_is_monotone() {
    let c = ctx("q-sqrt-4-zeta3");
    let crit = c.critical_set().unwrap();
    for p in crit.elements().take(10) {
        let a = represent_critical_point(&c, p, 3).unwrap();
        let b = represent_critical_point(&c, p, 8).unwrap();
        assert_eq!(a.digits, b.digits);
    }
}

#[test]
fn random_elements_round_trip_in_every_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for entry in load_catalog().unwrap() {
        if entry.unit.is_none() {
            continue;
        }
        let c = FieldContext::new(&entry).unwrap();
        for _ in 0..200 {
            let a = c.order().from_i64(std::array::from_fn(|_| rng.random_range(-20..=20)));
            let cert = unit_sum_representation(&c, &a, DEFAULT_MAX_DEPTH)
                .unwrap_or_else(|e| panic!("{}: {a}: {e}", entry.id()));
            assert!(cert.verify(c.order()).unwrap());
            assert!(cert.max_coefficient() <= c.w);
            assert_eq!(evaluate(&c, &cert).unwrap(), a, "{}", entry.id());
        }
    }
}

#[test]
fn rewriting_and_expansion_agree_on_x4_minus_x_plus_1() {
    let c = ctx("x4-x+1");
    let g = gamma_order();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let coords: [i64; 4] = std::array::from_fn(|_| rng.random_range(-20..=20));
        let a = c.order().from_i64(coords);
        let cert = unit_sum_representation(&c, &a, DEFAULT_MAX_DEPTH).unwrap();
        assert!(cert.verify(c.order()).unwrap());
        let x = word_of(&g, &g.from_i64(coords));
        let (v, _) = rewrite_to_signed(&x).unwrap();
        assert!(v.iter().all(|(_, d)| d.abs() <= 1));
        assert!(values_equal(&g, &x, &v).unwrap());
    }
}
