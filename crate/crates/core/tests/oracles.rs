mod common;

use common::{lambda_common, lambda_gf, series};
use entropik::degree_line::line_degrees;
use entropik::genfun::{lambda_from_gf, pade_fit, stabilize, table_fraction, Stabilized};
use entropik::patterns::{Pattern, PatternKind};
use entropik::recurrence::{
    balance_check, conjecture_lambda, cs_prime_complexity, cs_prime_sequence, cyclic_complexity,
    q9_closed_form_mismatches, q9_sequence,
};
use rug::Integer;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn table_fractions_expand_to_reference_series() {
    for q in 4..=13 {
        let gf = table_fraction(q).unwrap();
        assert_eq!(gf.expand(30).unwrap(), series(q), "q = {q}");
    }
}

#[test]
fn lambda_from_fraction_matches_reference() {
    for q in 4..=13 {
        let got = lambda_from_gf(&table_fraction(q).unwrap()).unwrap();
        assert!(rel(got.estimate.lambda, lambda_gf(q)) < 1e-9, "q = {q}: {}", got.estimate.lambda);
        assert!(got.agree, "q = {q}: root {} ratio {}", got.from_root, got.from_ratio);
        assert!(got.estimate.is_consistent());
    }
    let growth = |q| lambda_from_gf(&table_fraction(q).unwrap()).unwrap().growth_order;
    assert_eq!(growth(4), Some(1));
    assert_eq!(growth(5), Some(2));
    assert_eq!(growth(6), None);
}

#[test]
fn closed_form_complexities_match_reference() {
    for q in [5, 7, 11, 13] {
        assert!(rel(cs_prime_complexity(q).unwrap().lambda, lambda_gf(q)) < 1e-12, "q = {q}");
    }
    for q in 5..=17 {
        assert!(rel(cyclic_complexity(q).unwrap().lambda, lambda_common(q)) < 1e-12, "q = {q}");
        assert!(rel(conjecture_lambda(q).unwrap().lambda, lambda_common(q)) < 1e-12, "q = {q}");
    }
    assert!(cs_prime_complexity(9).is_err());
}

#[test]
fn prime_recurrence_matches_reference_series() {
    for q in [5, 7, 11, 13] {
        let s = cs_prime_sequence(q, 58).unwrap();
        assert_eq!(s.full_step()[..30], series(q)[..], "q = {q}");
        assert!(balance_check(&s).is_empty(), "q = {q}");
    }
}

#[test]
fn q9_recurrence_matches_reference_series() {
    let s = q9_sequence(58).unwrap();
    assert_eq!(s.full_step()[..30], series(9)[..]);
    assert!(q9_closed_form_mismatches(&s).is_empty());
    assert!(balance_check(&s).is_empty());
    assert!(s.closure.is_some());
}

#[test]
fn fraction_is_recovered_from_few_terms() {
    for q in 4..=13 {
        let gf = table_fraction(q).unwrap();
        let m = gf.order();
        let terms = series(q);
        match stabilize(&pade_fit(&terms[..m + 3], None).unwrap()) {
            Stabilized::Stable { gf: got, .. } => assert_eq!(got, gf, "q = {q}"),
            Stabilized::Unstable { diagnostics } => panic!("q = {q}: {diagnostics:?}"),
        }
        assert!(
            matches!(stabilize(&pade_fit(&terms[..m], None).unwrap()), Stabilized::Unstable { .. }),
            "q = {q} with {m} terms"
        );
    }
}

#[test]
fn truncated_q7_series_is_unstable() {
    let terms = series(7);
    assert!(matches!(stabilize(&pade_fit(&terms[..5], None).unwrap()), Stabilized::Unstable { .. }));
}

#[test]
fn line_degrees_match_reference_series() {
    for (q, n) in [(4, 16), (5, 16), (6, 6)] {
        let pat = Pattern::build(q, PatternKind::CyclicSymmetric).unwrap();
        let rec = line_degrees(&pat, n, 2, 1).unwrap().full_step();
        let got: Vec<Integer> = rec.values.iter().map(|&d| Integer::from(d)).collect();
        assert_eq!(got[..], series(q)[..got.len()], "q = {q}");
        assert!(rec.flags.is_empty());
    }
}
