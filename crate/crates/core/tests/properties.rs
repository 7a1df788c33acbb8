use entropik::algebra::{FpMatrix, MultiPoly, PrimeField, UniPoly};
use entropik::genfun::{pade_fit, stabilize, RationalGF, Stabilized};
use entropik::maps::{hadamard_map, inverse_map, inverse_point_cs, kappa_j, proj_eq_fp};
use entropik::patterns::{hadamard_point, CMatrix, Pattern, PatternKind};
use entropik::probe::{estimate_lambda, hadamard_step, normalize};
use entropik::surface::{balance_violations, propagate, verify_lemma, verify_multiplicity_relations};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Integer;

const P61: u64 = (1 << 61) - 1;

fn field() -> PrimeField {
    PrimeField::new(P61).unwrap()
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

proptest! {
    #[test]
    fn field_axioms(a in 0..P61, b in 0..P61, c in 0..P61) {
        let f = field();
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
        prop_assert_eq!(f.mul(a, b), mulmod(a, b, P61));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn gcd_contains_common_factor(
        a in prop::collection::vec(0u64..1000, 1..12),
        b in prop::collection::vec(0u64..1000, 1..12),
        c in prop::collection::vec(1u64..1000, 2..6),
    ) {
        let f = PrimeField::new(1_000_003).unwrap();
        let (a, b, c) = (UniPoly::new(f, a), UniPoly::new(f, b), UniPoly::new(f, c));
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
        let (ac, bc) = (a.mul(&c), b.mul(&c));
        let g = ac.gcd(&bc);
        prop_assert!(g.div_exact(&c).is_some(), "common factor lost");
        prop_assert!(ac.div_exact(&g).is_some() && bc.div_exact(&g).is_some());
    }

    #[test]
    fn monomial_content_is_extracted(
        terms in prop::collection::vec((prop::collection::vec(0u32..4, 3), 1u64..100), 1..6),
        shift in prop::collection::vec(0u32..3, 3),
    ) {
        let f = PrimeField::new(101).unwrap();
        let poly = MultiPoly::from_terms(f, 3, terms).unwrap();
        prop_assume!(!poly.is_zero());
        let base = poly.content_monomial().unwrap();
        let shifted = poly.mul_monomial(&shift);
        let got = shifted.content_monomial().unwrap();
        let want: Vec<u32> = base.iter().zip(&shift).map(|(a, b)| a + b).collect();
        prop_assert_eq!(&got, &want);
        prop_assert_eq!(shifted.div_monomial(&got).unwrap().content_monomial().unwrap(), vec![0; 3]);
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(
        fa in prop::collection::vec((prop::collection::vec(0u32..3, 2), 1u64..50), 1..4),
        fb in prop::collection::vec((prop::collection::vec(0u32..3, 2), 1u64..50), 1..4),
        h0 in prop::collection::vec((prop::collection::vec(0u32..2, 2), 1u64..50), 1..3),
        h1 in prop::collection::vec((prop::collection::vec(0u32..2, 2), 1u64..50), 1..3),
        pt in prop::collection::vec(0u64..10_007, 2),
    ) {
        let f = PrimeField::new(10_007).unwrap();
        let mk = |t: Vec<(Vec<u32>, u64)>| MultiPoly::from_terms(f, 2, t).unwrap();
        let (a, b) = (mk(fa), mk(fb));
        let h = [mk(h0), mk(h1)];
        let lhs = a.mul(&b).substitute(&h).unwrap();
        let rhs = a.substitute(&h).unwrap().mul(&b.substitute(&h).unwrap());
        prop_assert_eq!(&lhs, &rhs);
        let sum = a.add(&b).substitute(&h).unwrap();
        prop_assert_eq!(&sum, &a.substitute(&h).unwrap().add(&b.substitute(&h).unwrap()));
        let inner = [h[0].eval(&pt), h[1].eval(&pt)];
        prop_assert_eq!(lhs.eval(&pt), a.mul(&b).eval(&inner));
    }

    #[test]
    fn normalized_vectors_are_primitive(v in prop::collection::vec(-10_000i64..10_000, 2..7), k in 1i64..1000) {
        let mut x: Vec<Integer> = v.iter().map(|&a| Integer::from(a * k)).collect();
        prop_assume!(x.iter().any(|a| *a != 0));
        normalize(&mut x);
        let g = x.iter().fold(Integer::new(), |g, a| g.gcd(a));
        prop_assert_eq!(g, 1);
        prop_assert!(*x.iter().find(|a| **a != 0).unwrap() > 0);
    }

    #[test]
    fn hadamard_step_times_entry_is_total_product(v in prop::collection::vec(1i64..1_000_000, 2..7)) {
        let x: Vec<Integer> = v.iter().map(|&a| Integer::from(a)).collect();
        let y = hadamard_step(&x).unwrap();
        let total: Integer = x.iter().product();
        for (a, b) in x.iter().zip(&y) {
            prop_assert_eq!(Integer::from(a * b), total.clone());
        }
    }

    #[test]
    fn geometric_growth_is_recovered(ratio in 1.5f64..40.0, base in 10.0f64..1000.0, len in 5usize..10) {
        let bits: Vec<u64> = (0..len).map(|n| (base * ratio.powi(n as i32)).round() as u64).collect();
        let est = estimate_lambda(&bits, 2).unwrap();
        prop_assert!((est.lambda - ratio).abs() / ratio < 1e-2);
        prop_assert!(est.is_consistent());
    }

    #[test]
    fn accepted_fractions_reproduce_their_input(
        num in prop::collection::vec(0i64..4, 1..3),
        a in 1i64..6,
        extra in 3usize..8,
    ) {
        // (num)/((1-u)(1-a u)) has nonnegative integer coefficients
        let mut n = num.clone();
        n[0] = 1;
        let gf = RationalGF::from_i64(&n, &[1, -1 - a, a]).unwrap();
        let terms = gf.expand(gf.order() + extra).unwrap();
        match stabilize(&pade_fit(&terms, None).unwrap()) {
            Stabilized::Stable { gf: got, .. } => {
                prop_assert_eq!(got.expand(terms.len()).unwrap(), terms);
                prop_assert_eq!(got, gf);
            }
            Stabilized::Unstable { diagnostics } => prop_assert!(false, "unstable: {diagnostics:?}"),
        }
    }

    #[test]
    fn pattern_json_round_trip(q in 3usize..12, k in 0usize..4) {
        let kind = [PatternKind::General, PatternKind::Symmetric, PatternKind::Cyclic, PatternKind::CyclicSymmetric][k];
        let pat = Pattern::build(q, kind).unwrap();
        prop_assert_eq!(Pattern::from_json(&pat.to_json()).unwrap(), pat);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn balance_holds_at_every_surface_step(seed in any::<u64>(), qi in 0usize..4) {
        let (q, n) = [(5, 8), (7, 6), (9, 5), (11, 4)][qi];
        let pat = Pattern::build(q, PatternKind::CyclicSymmetric).unwrap();
        let (d, e) = propagate(&pat, n, seed).unwrap();
        prop_assert_eq!(balance_violations(&d.values, &e), Vec::<String>::new());
        if q != 9 {
            prop_assert!(verify_multiplicity_relations(&e).passed());
        }
    }

    #[test]
    fn factorization_identities_hold(seed in any::<u64>(), qi in 0usize..3) {
        let q = [5, 7, 9][qi];
        let pat = Pattern::build(q, PatternKind::CyclicSymmetric).unwrap();
        let rep = verify_lemma(&pat, 6, seed).unwrap();
        prop_assert!(rep.all_passed(), "{:?}", rep.first_failure());
    }
}

fn random_point(f: &PrimeField, p: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..p).map(|_| f.random_nonzero(rng)).collect()
}

/// `I` at a point: adjugate of the pattern matrix, read at the class representatives.
fn inverse_point(pat: &Pattern, f: &PrimeField, x: &[u64]) -> Option<Vec<u64>> {
    let m = FpMatrix { n: pat.q(), a: pat.expand(x) };
    let adj = m.adjugate(f)?;
    let out: Vec<u64> = pat.representatives().iter().map(|&(i, j)| adj.get(i, j)).collect();
    // every cell of a class carries the same value
    for i in 0..pat.q() {
        for j in 0..pat.q() {
            assert_eq!(adj.get(i, j), out[pat.class(i, j)], "adjugate leaves the pattern");
        }
    }
    Some(out)
}

#[test]
fn hadamard_involution_on_random_points() {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for q in 3..=10 {
        for kind in [PatternKind::General, PatternKind::Symmetric, PatternKind::Cyclic, PatternKind::CyclicSymmetric] {
            let pat = Pattern::build(q, kind).unwrap();
            let p = pat.p();
            let kappa = kappa_j(f, p);
            for _ in 0..100 {
                let x = random_point(&f, p, &mut rng);
                let jj = hadamard_point(&f, &hadamard_point(&f, &x));
                let k = kappa.eval(&x);
                let scaled: Vec<u64> = x.iter().map(|&v| f.mul(v, k)).collect();
                assert_eq!(jj, scaled, "J∘J ≠ κ_J·id for {kind} q = {q}");
            }
        }
    }
}

#[test]
fn hadamard_map_matches_point_evaluation() {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for q in [3, 5, 8] {
        let pat = Pattern::build(q, PatternKind::CyclicSymmetric).unwrap();
        let j = hadamard_map(&pat, f);
        assert_eq!(j.degree() as usize, pat.p() - 1);
        for _ in 0..20 {
            let x = random_point(&f, pat.p(), &mut rng);
            assert_eq!(j.evaluate(&x).unwrap(), hadamard_point(&f, &x));
        }
    }
}

#[test]
fn matrix_inverse_involution_on_random_points() {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for q in 3..=9 {
        for kind in [PatternKind::General, PatternKind::Symmetric, PatternKind::Cyclic, PatternKind::CyclicSymmetric] {
            let pat = Pattern::build(q, kind).unwrap();
            for _ in 0..100 {
                let x = random_point(&f, pat.p(), &mut rng);
                let ii = inverse_point(&pat, &f, &inverse_point(&pat, &f, &x).unwrap()).unwrap();
                assert!(proj_eq_fp(&f, &ii, &x), "I∘I ≠ id for {kind} q = {q}");
            }
        }
    }
}

#[test]
fn symbolic_inverse_agrees_with_similarity_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for q in 3..=13 {
        let pat = Pattern::build(q, PatternKind::CyclicSymmetric).unwrap();
        let field = PrimeField::find_ntt_field(q as u64, 8, 0).unwrap();
        let c = CMatrix::build(&pat, field).unwrap();
        let sym = if q <= 9 { Some(inverse_map(&pat, field, &mut rng).unwrap()) } else { None };
        for _ in 0..100 {
            let x = random_point(&field, pat.p(), &mut rng);
            let via_c = inverse_point_cs(&c, &x);
            let via_adj = inverse_point(&pat, &field, &x).unwrap();
            assert!(proj_eq_fp(&field, &via_c, &via_adj), "q = {q}");
            if let Some(m) = &sym {
                assert!(proj_eq_fp(&field, &m.evaluate(&x).unwrap(), &via_adj), "q = {q}");
            }
        }
    }
}

#[test]
fn c_matrix_squares_to_q() {
    for q in 3..=17 {
        let pat = Pattern::build(q, PatternKind::CyclicSymmetric).unwrap();
        let field = PrimeField::find_ntt_field(q as u64, 8, 0).unwrap();
        let c = CMatrix::build(&pat, field).unwrap();
        let (p, modulus) = (c.p(), field.modulus());
        // schoolbook product in u128, independent of the field code
        for i in 0..p {
            for j in 0..p {
                let s = (0..p).fold(0u128, |acc, k| {
                    (acc + c.m.get(i, k) as u128 * c.m.get(k, j) as u128) % modulus as u128
                });
                let want = if i == j { q as u128 % modulus as u128 } else { 0 };
                assert_eq!(s, want, "q = {q}, entry ({i}, {j})");
            }
        }
    }
}
