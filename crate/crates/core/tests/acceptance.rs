//! One PASS/FAIL line per acceptance criterion.
//!
//! Exits nonzero when the failing set differs from `KNOWN_FAILURES`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use unitsum_core::catalog::{catalog_entry, load_catalog, CatalogEntry, Marker};
use unitsum_core::expansion::{certify_field, unit_sum_representation, FieldContext, DEFAULT_MAX_DEPTH};
use unitsum_core::geometry::{minimal_w, verify_covering_exact, Criterion};
use unitsum_core::numerics::{to_c64, DEFAULT_PRECISION_BITS};
use unitsum_core::rewriting::{
    apply_case_table, gamma_order, rewrite_to_signed, table_for, validate_derived_rules, values_equal, Word,
};

/// Criteria expected to fail, see the decisions ledger.
const KNOWN_FAILURES: &[u32] = &[5];

const PRINTED_TOLERANCE: f64 = 5e-4;
const ROUND_TRIPS: usize = 1000;
const RANDOM_WORDS: usize = 10_000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn entry(id: &str) -> CatalogEntry {
    catalog_entry(id, DEFAULT_PRECISION_BITS).unwrap()
}

fn table_rows(table: u8) -> Outcome {
    let entries: Vec<CatalogEntry> =
        load_catalog().unwrap().into_iter().filter(|e| e.descriptor.table == Some(table)).collect();
    let rows: Vec<(String, bool, String)> = entries
        .par_iter()
        .map(|e| {
            let exp = e.descriptor.expected.unwrap();
            let c = FieldContext::new(e).unwrap();
            let f = certify_field(&c, DEFAULT_MAX_DEPTH).unwrap();
            let b_ok = match exp.b {
                Some(b) => f.max_depth == Some(b),
                None => f.critical_count == 0,
            };
            let ok = f.w == exp.w && f.critical_count == exp.c && b_ok;
            (e.id().to_string(), ok, format!("{:?}", (f.w, f.critical_count, f.max_depth)))
        })
        .collect();
    let bad: Vec<String> = rows.iter().filter(|r| !r.1).map(|r| format!("{} got {}", r.0, r.2)).collect();
    outcome(bad.is_empty(), format!("{}/{} rows match{}", rows.len() - bad.len(), rows.len(), if bad.is_empty() { String::new() } else { format!(": {bad:?}") }))
}

fn criterion_3() -> Outcome {
    let rows = table_rows(5);
    let mut worst = 0.0f64;
    for e in load_catalog().unwrap().iter().filter(|e| e.descriptor.table == Some(5)) {
        let u = e.unit.as_ref().unwrap();
        let z = to_c64(&u.embedding.embed_main(&u.unit));
        let p = e.descriptor.printed_unit.unwrap();
        worst = worst.max((z.re - p.re).abs()).max((z.im - p.im).abs());
    }
    let ok = rows.ok && worst <= PRINTED_TOLERANCE;
    outcome(ok, format!("{}; printed eps_tilde max component error {worst:.1e} (tol {PRINTED_TOLERANCE:e})", rows.detail))
}

fn criterion_4() -> Outcome {
    let c = FieldContext::new(&entry("q-sqrt-1-zeta4")).unwrap();
    let o = c.order();
    let crit = c.critical_set().unwrap();
    let zeta = &c.entry.descriptor.zeta;
    let eps_inv = o.inverse(&c.base).unwrap();
    let one_minus_gamma = o.from_i64([1, -1, 0, 0]);
    let mut expected = BTreeSet::new();
    let mut via_eps = BTreeSet::new();
    let mut z = o.one();
    for _ in 0..4 {
        expected.insert(o.mul(&z, &one_minus_gamma).unwrap());
        via_eps.insert(o.mul(&z, &eps_inv).unwrap());
        z = o.mul(&z, zeta).unwrap();
    }
    let got: BTreeSet<_> = crit.elements().cloned().collect();
    outcome(got == expected && expected == via_eps, format!("|B\\{{0}}| = {}, equals zeta4^k(1-gamma): {}, equals zeta4^k/eps: {}", got.len(), got == expected, expected == via_eps))
}

fn criterion_5() -> Outcome {
    let c = FieldContext::with_w(&entry("q-zeta8"), 1, 0).unwrap();
    let o = c.order();
    let covering = c.verdict.passes();
    let f = certify_field(&c, DEFAULT_MAX_DEPTH).unwrap();
    let eps_inv = o.inverse(&c.base).unwrap();
    let zeta = &c.entry.descriptor.zeta;
    let mut odd = BTreeSet::new();
    for k in 0..4u64 {
        let z = o.power(zeta, 2 * k + 1).unwrap();
        odd.insert(o.mul(&z, &eps_inv).unwrap());
    }
    let got: BTreeSet<_> = f.reports.iter().map(|r| r.point.clone()).collect();
    let contains = odd.is_subset(&got);
    let exact = got == odd;
    outcome(
        covering && f.dug && contains && exact,
        format!(
            "square criterion w=1: {covering}, dug: {}, |B\\{{0}}| = {} (contains zeta8^(2k+1)/eps: {contains}, exactly those: {exact})",
            f.dug,
            got.len()
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for id in ["q-sqrt-19-11zeta3", "q-sqrt-17-12zeta3", "q-sqrt-17-16zeta3"] {
        let c = FieldContext::with_w(&entry(id), 1, 0).unwrap();
        let eps = c.emb.embed_main(&c.base);
        let check = verify_covering_exact(&eps, &c.alphabet.images_main, &c.region, 1);
        let this = !check.covered() && check.witness.is_some();
        ok &= this;
        parts.push(format!("{id}: {:?} witness {:?}", check.status, check.witness.map(|[x, y]| format!("{x:.4}{y:+.4}i"))));
    }
    let sanity = {
        let c = FieldContext::new(&entry("q-sqrt-1-zeta4")).unwrap();
        let eps = c.emb.embed_main(&c.base);
        verify_covering_exact(&eps, &c.alphabet.images_main, &c.region, 1).covered()
    };
    ok &= sanity;
    parts.push(format!("q-sqrt-1-zeta4 covered: {sanity}"));
    outcome(ok, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let e = entry("x4+2x2-2x+1");
    let u = e.unit.as_ref().unwrap();
    let alt = u.embedding.with_choice(u.embedding.chosen.alternate());
    let alt_unit = e.order.inverse(&u.unit).unwrap();
    let candidates = [u.embedding.embed_main(&u.unit), alt.embed_main(&alt_unit)];
    let m = minimal_w(&candidates, Criterion::Parallelogram, DEFAULT_PRECISION_BITS).unwrap();
    let ok = m.per_embedding == vec![Some(2), Some(4)] && m.w == 2;
    outcome(ok, format!("minimal w per embedding {:?}", m.per_embedding))
}

fn criterion_8() -> Outcome {
    let entries: Vec<CatalogEntry> = load_catalog().unwrap().into_iter().filter(|e| e.unit.is_some()).collect();
    let bad: Vec<String> = entries
        .par_iter()
        .filter_map(|e| {
            let f = certify_field(&FieldContext::new(e).unwrap(), DEFAULT_MAX_DEPTH).unwrap();
            let ok = match e.descriptor.marker {
                Marker::None => f.dug,
                m => f.omega_bound <= m.omega_bound(),
            };
            (!ok).then(|| format!("{} ({:?}, omega <= {})", e.id(), e.descriptor.marker, f.omega_bound))
        })
        .collect();
    outcome(bad.is_empty(), format!("{} fields checked{}", entries.len(), if bad.is_empty() { String::new() } else { format!(", failing {bad:?}") }))
}

fn signed_and_equal(x: &Word) -> bool {
    let o = gamma_order();
    match rewrite_to_signed(x) {
        Ok((v, _)) => v.iter().all(|(_, d)| d.abs() <= 1) && values_equal(&o, x, &v).unwrap(),
        Err(_) => false,
    }
}

fn criterion_9() -> Outcome {
    let small: Vec<Word> = (0..2401i64)
        .map(|n| Word::from_digits(&(0..4).map(|k| (n / 7i64.pow(k)) % 7 - 3).collect::<Vec<_>>(), 0))
        .collect();
    let bad_small = small.par_iter().filter(|x| !signed_and_equal(x)).count();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37);
    let random: Vec<Word> = (0..RANDOM_WORDS)
        .map(|_| Word::from_digits(&(0..4).map(|_| rng.random_range(-50..=50)).collect::<Vec<_>>(), 0))
        .collect();
    let bad_random = random.par_iter().filter(|x| !signed_and_equal(x)).count();
    outcome(bad_small == 0 && bad_random == 0, format!("2401 words |x_i|<=3: {bad_small} failures; {RANDOM_WORDS} random words |x_i|<=50: {bad_random} failures"))
}

/// `~` negates the next digit, `|`, `(` and `)` are ignored.
fn barred_digits(s: &str) -> Vec<i64> {
    let mut out = Vec::new();
    let mut neg = false;
    for ch in s.chars() {
        match ch {
            '~' => neg = true,
            '0'..='9' => {
                let d = ch.to_digit(10).unwrap() as i64;
                out.push(if neg { -d } else { d });
                neg = false;
            }
            _ => {}
        }
    }
    out
}

fn criterion_10() -> Outcome {
    // (gap to the next 2, input, printed output); the last digit sits at i-1
    let rows: &[(i64, &str, &str)] = &[
        (6, "00~1|020|", "~10~1|110|"),
        (6, "010|020|", "~110|110|"),
        (6, "000|020|", "~100|110|"),
        (6, "~100|020|", "~110|011|"),
        (5, "10|00|020|", "1~1|00|110|"),
        (5, "11|00|020|", "10|00|110|"),
        (5, "~10|00|020|", "~1~1|00|110|"),
        (5, "~1~1|00|020|", "~1~1|10|011|"),
        (5, "~10|10|020|", "~1~1|10|110|"),
        (5, "(0)~1~1|10|020|", "(1)~1~1|11|011|"),
        (4, "~10|0|020|", "~11|0|011|"),
        (4, "~1~1|0|020|", "~10|0|011|"),
        (3, "011|020|", "~111|110|"),
        (3, "110|020|", "010|110|"),
        (3, "010|020|", "~110|110|"),
        (2, "00~1~1|20|", "~10~10|10|"),
        (2, "0~1~10|20|", "~1~1~11|10|"),
    ];
    let mut bad = Vec::new();
    for &(gap, input, output) in rows {
        let (table, top, _) = table_for(Some(gap));
        let x = Word::from_digits(&barred_digits(input), -1);
        let want = Word::from_digits(&barred_digits(output), -1);
        match apply_case_table(&x, 0, table, top) {
            Ok(got) if got == want => {}
            Ok(got) => bad.push(format!("{input} -> {got}, printed {output}")),
            Err(e) => bad.push(format!("{input}: {e}")),
        }
    }
    // isolated 2 with gap >= 6 runs through normalize end to end
    for &(_, input, output) in &rows[..4] {
        let x = Word::from_digits(&barred_digits(input), -1);
        let want = Word::from_digits(&barred_digits(output), -1);
        if unitsum_core::rewriting::normalize(&x).map(|r| r.0) != Ok(want) {
            bad.push(format!("normalize {input}"));
        }
    }
    outcome(bad.is_empty(), format!("{} table rows, {} mismatches{}", rows.len(), bad.len(), if bad.is_empty() { String::new() } else { format!(": {bad:?}") }))
}

fn criterion_11() -> Outcome {
    match validate_derived_rules() {
        Ok(checks) => {
            let desc: Vec<String> = checks.iter().map(|c| format!("{} = {} shifts of w1", c.rule.name(), c.combination.len())).collect();
            outcome(checks.len() == 4 && checks.iter().all(|c| c.divisible), desc.join(", "))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_12() -> Outcome {
    let entries: Vec<CatalogEntry> = load_catalog().unwrap().into_iter().filter(|e| e.unit.is_some()).collect();
    let bad: Vec<String> = entries
        .par_iter()
        .enumerate()
        .filter_map(|(k, e)| {
            let c = FieldContext::new(e).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
            for _ in 0..ROUND_TRIPS {
                let a = c.order().from_i64(std::array::from_fn(|_| rng.random_range(-20..=20)));
                let ok = unit_sum_representation(&c, &a, DEFAULT_MAX_DEPTH)
                    .map(|cert| cert.verify(c.order()).unwrap_or(false) && cert.max_coefficient() <= c.w)
                    .unwrap_or(false);
                if !ok {
                    return Some(format!("{}: {a}", e.id()));
                }
            }
            None
        })
        .collect();
    outcome(bad.is_empty(), format!("{} fields x {ROUND_TRIPS} elements{}", entries.len(), if bad.is_empty() { String::new() } else { format!(", failing {bad:?}") }))
}

fn main() -> ExitCode {
    let criteria: Vec<(u32, &str, fn() -> Outcome)> = vec![
        (1, "Table 2 (w, C, B)", || table_rows(2)),
        (2, "Table 3 (w, C, B)", || table_rows(3)),
        (3, "Table 5 (w, C, B) and printed units", criterion_3),
        (4, "critical set of Q(sqrt(1+zeta4))", criterion_4),
        (5, "Q(zeta8) covering and critical set", criterion_5),
        (6, "exact covering fails for the dagger zeta3 fields", criterion_6),
        (7, "embedding sensitivity of X^4+2X^2-2X+1", criterion_7),
        (8, "omega bounds by marker", criterion_8),
        (9, "signed rewriting sweep", criterion_9),
        (10, "normalization table rows", criterion_10),
        (11, "derived rules", criterion_11),
        (12, "certificate round trip", criterion_12),
    ];
    let mut failed = BTreeSet::new();
    for (n, name, f) in criteria {
        let t = Instant::now();
        let o = f();
        println!("criterion {n:2} {} {name}: {} [{:.1}s]", if o.ok { "PASS" } else { "FAIL" }, o.detail, t.elapsed().as_secs_f64());
        if !o.ok {
            failed.insert(n);
        }
    }
    let known: BTreeSet<u32> = KNOWN_FAILURES.iter().copied().collect();
    println!("failing: {failed:?}, known: {known:?}");
    if failed == known {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
