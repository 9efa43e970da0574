use std::collections::BTreeSet;

use rayon::prelude::*;
use unitsum_core::expansion::FieldContext;
use unitsum_core::lattice::DigitAlphabet;
use unitsum_core::{catalog_entry, load_catalog, load_catalog_with_precision, DEFAULT_PRECISION_BITS as P};

#[test]
fn gaussian_alphabet_sizes() {
    let e = catalog_entry("q-sqrt-1-zeta4", P).unwrap();
    let emb = &e.unit.as_ref().unwrap().embedding;
    let zeta = &e.descriptor.zeta;
    let sizes: Vec<usize> =
        (0..=2).map(|w| DigitAlphabet::roots_of_unity(&e.order, zeta, 4, w, emb).unwrap().len()).collect();
    // a + b i with |a|, |b| <= w
    assert_eq!(sizes, vec![1, 9, 25]);
    let zero = DigitAlphabet::roots_of_unity(&e.order, zeta, 4, 0, emb).unwrap();
    assert!(zero.elements[0].is_zero());
}

#[test]
fn eisenstein_alphabet_size() {
    let e = catalog_entry("q-sqrt-19-11zeta3", P).unwrap();
    let emb = &e.unit.as_ref().unwrap().embedding;
    let a = DigitAlphabet::roots_of_unity(&e.order, &e.descriptor.zeta, 6, 1, emb).unwrap();
    let mut brute = BTreeSet::new();
    for mask in 0..64u32 {
        let mut c = [0i64; 2];
        for k in 1..=6 {
            if mask >> (k - 1) & 1 == 1 {
                // zeta6^k in the basis 1, zeta3
                let z: [i64; 2] = [[1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1], [1, 0]][k - 1];
                c[0] += z[0];
                c[1] += z[1];
            }
        }
        brute.insert(c);
    }
    assert_eq!(a.len(), brute.len());
}

#[test]
fn affine_alphabet_size() {
    let e = catalog_entry("x4-x+1", P).unwrap();
    let u = e.unit.as_ref().unwrap();
    for (w, n) in [(0, 1), (1, 9), (2, 25)] {
        assert_eq!(DigitAlphabet::affine_pair(&e.order, &u.unit, w, &u.embedding).unwrap().len(), n);
    }
}

#[test]
fn doubled_precision_agrees() {
    let lo = load_catalog().unwrap();
    let hi = load_catalog_with_precision(2 * P).unwrap();
    let pairs: Vec<_> = lo.iter().zip(&hi).filter(|(e, _)| e.unit.is_some()).collect();
    pairs.par_iter().for_each(|(a, b)| {
        let ca = FieldContext::new(a).unwrap();
        let cb = FieldContext::new(b).unwrap();
        assert_eq!(ca.w, cb.w, "{}", a.id());
        let pa: Vec<_> = ca.critical_set().unwrap().elements().cloned().collect();
        let pb: Vec<_> = cb.critical_set().unwrap().elements().cloned().collect();
        assert_eq!(pa, pb, "{}", a.id());
    });
}

#[test]
fn small_slack_adds_no_points() {
    let all = load_catalog().unwrap();
    all.par_iter().filter(|e| e.unit.is_some()).for_each(|e| {
        let c = FieldContext::new(e).unwrap();
        let base = c.critical_set().unwrap().count();
        assert_eq!(c.critical_set_with_slack(1e-6).unwrap().count(), base, "{}", e.id());
    });
}

#[test]
fn critical_points_are_sorted_and_nonzero() {
    let c = FieldContext::new(&catalog_entry("q-sqrt-1-4zeta4", P).unwrap()).unwrap();
    let s = c.critical_set().unwrap();
    assert!(s.contains_zero);
    assert!(s.elements().all(|p| !p.is_zero()));
    let v: Vec<_> = s.elements().map(|p| p.coords().clone()).collect();
    assert!(v.windows(2).all(|w| w[0] < w[1]));
}
