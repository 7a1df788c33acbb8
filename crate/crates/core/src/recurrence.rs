//! Exact degree sequences from the closed linear recurrences satisfied by the
//! cyclic symmetric degrees and content exponents, and closed-form complexities.
//!
//! For prime `q` (with `p = (q+1)/2`) the exponents take two values per step:
//! `u⁰` on class 0 and `u¹` on every other class. For `q = 9` the classes
//! split as `{0}`, `{1, 2, 4}` and `{3}` with exponents `u⁰`, `u¹`, `u²`; the
//! last equation of that system is a hypothesis, reported as a conjectural
//! closure.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::algebra::field::is_prime_u64;
use crate::algebra::intpoly::{self, IntPoly};
use crate::degree_line::{DegreeRecord, Granularity};
use crate::error::{Error, Result};
use crate::patterns::{cs_classes, PatternKind};
use crate::surface::ExponentRecord;

/// Tag attached to sequences whose closing equation is hypothetical.
pub const CONJECTURAL_CLOSURE: &str = "conjectural closure";

/// Exact half-step sequences `d_n`, `u_n^i`, `v_n^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSequences {
    pub q: usize,
    pub p: usize,
    pub d: Vec<Integer>,
    /// `u[n][i]` per class
    pub u: Vec<Vec<Integer>>,
    /// `v[n][i]` per class, `v[0] = 0`
    pub v: Vec<Vec<Integer>>,
    pub closure: Option<String>,
}

impl ExactSequences {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Machine-word records; fails once a value exceeds `u64`.
    pub fn to_records(&self) -> Result<(DegreeRecord, ExponentRecord)> {
        let conv = |x: &Integer| {
            x.to_u64()
                .ok_or_else(|| Error::Computation(format!("value {x} does not fit in 64 bits")))
        };
        let conv_row = |r: &Vec<Integer>| r.iter().map(conv).collect::<Result<Vec<u64>>>();
        let values = self.d.iter().map(conv).collect::<Result<Vec<_>>>()?;
        let u = self.u.iter().map(conv_row).collect::<Result<Vec<_>>>()?;
        let v = self.v.iter().map(conv_row).collect::<Result<Vec<_>>>()?;
        let deg = DegreeRecord {
            pattern: PatternKind::CyclicSymmetric,
            q: self.q,
            granularity: Granularity::HalfStep,
            values,
            method: "recurrence".into(),
            flags: Vec::new(),
        };
        Ok((deg, ExponentRecord { q: self.q, p: self.p, u, v }))
    }

    /// Full-step degrees `d_0, d_2, d_4, …`.
    pub fn full_step(&self) -> Vec<Integer> {
        self.d.iter().step_by(2).cloned().collect()
    }

    /// Ratio `d_{n+1} / d_n` as a float.
    pub fn ratio(&self, n: usize) -> Option<f64> {
        let (a, b) = (self.d.get(n + 1)?, self.d.get(n)?);
        if *b == 0 {
            return None;
        }
        Some(Rational::from((a.clone(), b.clone())).to_f64())
    }

    /// JSON with exact integers as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let s = |v: &[Integer]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        serde_json::json!({
            "q": self.q,
            "p": self.p,
            "granularity": "half_step",
            "d": s(&self.d),
            "u": self.u.iter().map(|r| s(r)).collect::<Vec<_>>(),
            "v": self.v.iter().map(|r| s(r)).collect::<Vec<_>>(),
            "closure": self.closure,
        })
    }
}

/// Fills `v_n^i = (p−2)·d_{n−1} + u_{n−1}^i − Σ_j u_{n−1}^j`.
fn backward_exponents(p: usize, d: &[Integer], u: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
    let mut v = vec![vec![Integer::new(); p]];
    for n in 1..d.len() {
        let sum: Integer = u[n - 1].iter().sum();
        let base = Integer::from(&d[n - 1] * (p as u64 - 2)) - sum;
        v.push(u[n - 1].iter().map(|ui| Integer::from(&base + ui)).collect());
    }
    v
}

/// Seed rows `0..=4` of the prime system as functions of `p`.
pub fn prime_seed_rows(p: usize) -> [[Integer; 3]; 5] {
    let p = Integer::from(p);
    let pm1 = Integer::from(&p - 1);
    let pm2 = Integer::from(&p - 2);
    let p2 = Integer::from(&p * &p);
    let p3 = Integer::from(&p2 * &p);
    let z = Integer::new;
    [
        [Integer::from(1), z(), z()],
        [pm1.clone(), z(), z()],
        [Integer::from(&pm1 * &pm1), pm2.clone(), z()],
        [
            p3.clone() - Integer::from(3) * &p2 + Integer::from(2) * &p + 1,
            Integer::from(&pm1 * &pm2),
            z(),
        ],
        [
            Integer::from(&pm1 * (p3 - Integer::from(3) * &p2 + &p + 3)),
            Integer::from(&pm1 * &pm1) * &pm2,
            pm2,
        ],
    ]
}

fn prime_p(q: usize) -> Result<usize> {
    if q < 5 || !is_prime_u64(q as u64) {
        return Err(Error::Precondition(format!(
            "q = {q}: the closed system holds for primes q >= 5 only"
        )));
    }
    Ok(cs_classes(q))
}

/// Sequences of the prime system for `n = 0..=n_max`.
pub fn cs_prime_sequence(q: usize, n_max: usize) -> Result<ExactSequences> {
    let p = prime_p(q)?;
    let seeds = prime_seed_rows(p);
    let (pm1, pm2) = (p as u64 - 1, p as u64 - 2);
    let len = n_max + 1;
    let (mut d, mut u0, mut u1) = (Vec::with_capacity(len), Vec::with_capacity(len), Vec::with_capacity(len));
    for n in 0..len {
        if n < 4 {
            d.push(seeds[n][0].clone());
            u0.push(seeds[n][1].clone());
            u1.push(seeds[n][2].clone());
            continue;
        }
        let dn = Integer::from(&d[n - 1] * pm1) - &u0[n - 1] - Integer::from(&u1[n - 1] * pm1);
        let u0n = Integer::from(&d[n - 2] * pm2) - Integer::from(&u1[n - 2] * pm1);
        let u1n = Integer::from(&d[n - 4] * pm2) - &u0[n - 4] - Integer::from(&u1[n - 4] * pm2);
        if n == 4 && [&dn, &u0n, &u1n] != [&seeds[4][0], &seeds[4][1], &seeds[4][2]] {
            return Err(Error::GoldenMismatch(format!("q = {q}: seed rows do not reproduce row 4")));
        }
        d.push(dn);
        u0.push(u0n);
        u1.push(u1n);
    }
    let u: Vec<Vec<Integer>> = (0..len)
        .map(|n| {
            let mut row = vec![u1[n].clone(); p];
            row[0] = u0[n].clone();
            row
        })
        .collect();
    let v = backward_exponents(p, &d, &u);
    Ok(ExactSequences { q, p, d, u, v, closure: None })
}

/// Classes of the `q = 9` pattern carrying `u¹` and `u²`.
const Q9_CLASS1: [usize; 3] = [1, 2, 4];
const Q9_CLASS2: usize = 3;

/// Seed rows `(d, u⁰, u¹, u²)` for `n = 0..=4` of the `q = 9` system.
pub const Q9_SEEDS: [[i64; 4]; 5] = [[1, 0, 0, 0], [4, 0, 0, 0], [16, 3, 0, 2], [59, 12, 0, 8], [216, 46, 3, 32]];

/// Sequences of the `q = 9` system closed by `u²_{n+1} = 2d_{n−1} − 3u¹_{n−1}`.
pub fn q9_sequence(n_max: usize) -> Result<ExactSequences> {
    let len = n_max + 1;
    let mut rows: Vec<[Integer; 4]> = Vec::with_capacity(len);
    for n in 0..len {
        if n < 4 {
            rows.push(Q9_SEEDS[n].map(Integer::from));
            continue;
        }
        let r1 = &rows[n - 1];
        let r2 = &rows[n - 2];
        let r4 = &rows[n - 4];
        let d = Integer::from(&r1[0] * 4) - &r1[1] - Integer::from(&r1[2] * 3) - &r1[3];
        let u0 = Integer::from(&r2[0] * 3) - Integer::from(&r2[2] * 3) - &r2[3];
        let u1 = Integer::from(&r4[0] * 3) - &r4[1] - Integer::from(&r4[2] * 2) - &r4[3];
        let u2 = Integer::from(&r2[0] * 2) - Integer::from(&r2[2] * 3);
        let row = [d, u0, u1, u2];
        if n == 4 && row != Q9_SEEDS[4].map(Integer::from) {
            return Err(Error::GoldenMismatch("q = 9: seed rows do not reproduce row 4".into()));
        }
        rows.push(row);
    }
    let p = 5;
    let d: Vec<Integer> = rows.iter().map(|r| r[0].clone()).collect();
    let u: Vec<Vec<Integer>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![r[1].clone(); p];
            for &i in &Q9_CLASS1 {
                row[i] = r[2].clone();
            }
            row[Q9_CLASS2] = r[3].clone();
            row
        })
        .collect();
    let v = backward_exponents(p, &d, &u);
    Ok(ExactSequences { q: 9, p, d, u, v, closure: Some(CONJECTURAL_CLOSURE.into()) })
}

/// Violations of the balance equations
/// `d_{n+1} = (p−1)d_n − Σ_i u_n^i` and `(p−2)d_n = v_{n+1}^i + Σ_{j≠i} u_n^j`.
pub fn balance_check(s: &ExactSequences) -> Vec<String> {
    let mut bad = Vec::new();
    let p = s.p as u64;
    for n in 0..s.len().saturating_sub(1) {
        let sum: Integer = s.u[n].iter().sum();
        if s.d[n + 1] != Integer::from(&s.d[n] * (p - 1)) - &sum {
            bad.push(format!("degree balance fails at n = {n}"));
        }
        for i in 0..s.p {
            let rhs = Integer::from(&s.v[n + 1][i] + &sum) - &s.u[n][i];
            if rhs != Integer::from(&s.d[n] * (p - 2)) {
                bad.push(format!("exponent balance fails at n = {n}, class {i}"));
            }
        }
    }
    bad
}

/// Denominator `P(s)` of the `q = 9` half-step generating functions.
pub fn q9_denominator() -> IntPoly {
    intpoly::mul(&intpoly::from_i64(&[1, -1]), &intpoly::from_i64(&[1, -3, -2, -1, 2, 2, -1]))
}

/// Closed-form numerators over `P(s)` for `d, u⁰, u¹, u²`.
pub fn q9_numerators() -> [IntPoly; 4] {
    let den = q9_denominator();
    // d(s) = 1 + (4 − s² − s⁶)·s / P(s)
    let d = intpoly::add(&den, &intpoly::from_i64(&[0, 4, 0, -1, 0, 0, 0, -1]));
    let a = intpoly::from_i64(&[3, 0, -2]);
    let u0 = intpoly::shift(&intpoly::mul(&a, &intpoly::from_i64(&[1, 0, 1])), 2);
    let u1 = intpoly::shift(&a, 4);
    let u2 = intpoly::shift(&intpoly::from_i64(&[2, 0, 2, 0, -3]), 2);
    [d, u0, u1, u2]
}

/// Full-step generating function of the `q = 9` degrees as `(numerator, denominator)`.
pub fn q9_full_step_gf() -> (IntPoly, IntPoly) {
    let a = intpoly::from_i64(&[1, 1, 3, -3]);
    let num = intpoly::mul(&a, &a);
    let den = intpoly::mul(&intpoly::from_i64(&[1, -1]), &intpoly::from_i64(&[1, -13, 2, 1, 12, -8, 1]));
    (num, den)
}

/// Compares the `q = 9` sequences with the closed forms; returns the mismatches.
pub fn q9_closed_form_mismatches(s: &ExactSequences) -> Vec<String> {
    let mut bad = Vec::new();
    let n = s.len();
    let den = q9_denominator();
    let cols: [Vec<Integer>; 4] = [
        s.d.clone(),
        s.u.iter().map(|r| r[0].clone()).collect(),
        s.u.iter().map(|r| r[Q9_CLASS1[0]].clone()).collect(),
        s.u.iter().map(|r| r[Q9_CLASS2].clone()).collect(),
    ];
    for ((name, num), col) in ["d", "u0", "u1", "u2"].iter().zip(q9_numerators()).zip(cols) {
        let series = intpoly::series(&num, &den, n).expect("P(0) = 1");
        if series != col {
            bad.push(format!("{name}(s) differs from the closed form"));
        }
    }
    let (num, den) = q9_full_step_gf();
    let full = s.full_step();
    if intpoly::series(&num, &den, full.len()).expect("unit constant term") != full {
        bad.push("full-step degrees differ from the closed form".into());
    }
    bad
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Recurrence,
    Genfun,
    Arithmetic,
}

/// A complexity `λ` with its entropy `ln λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub lambda: f64,
    pub entropy: f64,
    pub method: Method,
    pub uncertainty: f64,
    /// integer polynomial (lowest degree first) vanishing at `1/λ`
    pub exact_poly: Option<Vec<i64>>,
}

impl ComplexityEstimate {
    pub fn new(lambda: f64, method: Method, uncertainty: f64, exact_poly: Option<Vec<i64>>) -> Self {
        ComplexityEstimate { lambda, entropy: lambda.ln(), method, uncertainty, exact_poly }
    }

    /// `|poly(1/λ)|` divided by the largest coefficient magnitude.
    pub fn poly_residual(&self) -> Option<f64> {
        let c = self.exact_poly.as_ref()?;
        let x = 1.0 / self.lambda;
        let val = c.iter().rev().fold(0.0, |acc, &a| acc * x + a as f64);
        let scale = c.iter().map(|a| a.unsigned_abs()).max().unwrap_or(1).max(1) as f64;
        Some((val / scale).abs())
    }

    pub fn is_consistent(&self) -> bool {
        self.lambda >= 1.0
            && (self.entropy - self.lambda.ln()).abs() <= 1e-15 * self.lambda.ln().abs().max(1.0)
            && self.poly_residual().is_none_or(|r| r < 1e-12)
    }
}

/// `λ = 1/x₀` for the smaller root `x₀` of `x² + b·x + 1` (`b ≤ −2`).
fn reciprocal_quadratic(b: i64, method: Method) -> ComplexityEstimate {
    let t = -(b as f64);
    let disc = (t * t - 4.0).max(0.0);
    let lambda = (t + disc.sqrt()) / 2.0;
    ComplexityEstimate::new(lambda, method, f64::EPSILON * lambda, Some(vec![1, b, 1]))
}

/// `λ` for cyclic symmetric `q` prime: root of `x² + (2−(p−1)²)x + 1`.
pub fn cs_prime_complexity(q: usize) -> Result<ComplexityEstimate> {
    let p = prime_p(q)? as i64;
    Ok(reciprocal_quadratic(2 - (p - 1) * (p - 1), Method::Recurrence))
}

/// `λ` for cyclic `q`: root of `x² + (2−(q−2)²)x + 1`.
pub fn cyclic_complexity(q: usize) -> Result<ComplexityEstimate> {
    if q < 4 {
        return Err(Error::Precondition(format!("q = {q}: need q >= 4")));
    }
    let q = q as i64;
    Ok(reciprocal_quadratic(2 - (q - 2) * (q - 2), Method::Arithmetic))
}

/// Common `λ` conjectured for general, symmetric and cyclic matrices:
/// larger root of `x² − (q²−4q+2)x + 1`.
pub fn conjecture_lambda(q: usize) -> Result<ComplexityEstimate> {
    if q < 4 {
        return Err(Error::Precondition(format!("q = {q}: need q >= 4")));
    }
    let q = q as i64;
    let est = reciprocal_quadratic(-(q * q - 4 * q + 2), Method::Arithmetic);
    debug_assert_eq!(q * q - 4 * q + 2, (q - 2) * (q - 2) - 2);
    Ok(est)
}

/// Transition matrix of the prime system on the state
/// `(d, u⁰, u¹)` at lags `1..=4` (12 × 12).
pub fn prime_companion(p: usize) -> Vec<Vec<Integer>> {
    let (pm1, pm2) = (p as i64 - 1, p as i64 - 2);
    // state index: var * 4 + lag - 1, var 0 = d, 1 = u⁰, 2 = u¹
    let idx = |var: usize, lag: usize| var * 4 + lag - 1;
    let mut m = vec![vec![Integer::new(); 12]; 12];
    m[idx(0, 1)][idx(0, 1)] = Integer::from(pm1);
    m[idx(0, 1)][idx(1, 1)] = Integer::from(-1);
    m[idx(0, 1)][idx(2, 1)] = Integer::from(-pm1);
    m[idx(1, 1)][idx(0, 2)] = Integer::from(pm2);
    m[idx(1, 1)][idx(2, 2)] = Integer::from(-pm1);
    m[idx(2, 1)][idx(0, 4)] = Integer::from(pm2);
    m[idx(2, 1)][idx(1, 4)] = Integer::from(-1);
    m[idx(2, 1)][idx(2, 4)] = Integer::from(-pm2);
    for var in 0..3 {
        for lag in 2..=4 {
            m[idx(var, lag)][idx(var, lag - 1)] = Integer::from(1);
        }
    }
    m
}

/// Whether the characteristic polynomial of the 12 × 12 transition matrix
/// has the half-step factor `x² − (p−1)x + 1`, whose roots square to those of
/// `x² + (2−(p−1)²)x + 1`.
pub fn companion_has_quadratic_factor(q: usize) -> Result<bool> {
    let p = prime_p(q)?;
    let cp = intpoly::charpoly(&prime_companion(p));
    let factor = intpoly::from_i64(&[1, 1 - p as i64, 1]);
    Ok(intpoly::rem_monic(&cp, &factor).is_empty())
}

/// Polynomial growth `d_n ≈ a·n^k` for sequences with `λ = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialGrowth {
    pub degree: u32,
    /// least-squares quadratic `c₀ + c₁n + c₂n²` over the second half of the data
    pub quadratic: [f64; 3],
    /// largest relative deviation of the data from that quadratic
    pub max_rel_deviation: f64,
}

/// Growth exponent from `log₂(d_{2N} / d_N)` plus a quadratic least-squares fit.
pub fn polynomial_growth(d: &[Integer]) -> Result<PolynomialGrowth> {
    if d.len() < 16 {
        return Err(Error::Precondition("need at least 16 terms".into()));
    }
    let big = d.len() - 1;
    let half = big / 2;
    if d[half] <= 0 {
        return Err(Error::Computation("nonpositive degree".into()));
    }
    let ratio = Rational::from((d[2 * half].clone(), d[half].clone())).to_f64();
    let degree = ratio.log2().round().max(0.0) as u32;
    let xs: Vec<f64> = (half..=big).map(|n| n as f64).collect();
    let ys: Vec<f64> = d[half..=big].iter().map(|x| x.to_f64()).collect();
    let quadratic = least_squares_quadratic(&xs, &ys);
    let max_rel_deviation = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| ((quadratic[0] + quadratic[1] * x + quadratic[2] * x * x) - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max);
    Ok(PolynomialGrowth { degree, quadratic, max_rel_deviation })
}

fn least_squares_quadratic(xs: &[f64], ys: &[f64]) -> [f64; 3] {
    // normal equations on centred, scaled abscissae for conditioning
    let mid = xs.iter().sum::<f64>() / xs.len() as f64;
    let sc = xs.iter().map(|x| (x - mid).abs()).fold(1.0, f64::max);
    let mut a = [[0.0; 4]; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let t = (x - mid) / sc;
        let pw = [1.0, t, t * t];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += pw[i] * pw[j];
            }
            a[i][3] += pw[i] * y;
        }
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).expect("rows");
        a.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let b: Vec<f64> = (0..3).map(|i| a[i][3] / a[i][i]).collect();
    // back to powers of n: t = (n − mid)/sc
    let (b0, b1, b2) = (b[0], b[1] / sc, b[2] / (sc * sc));
    [b0 - b1 * mid + b2 * mid * mid, b1 - 2.0 * b2 * mid, b2]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn q5_and_q7_rows() {
        let s5 = cs_prime_sequence(5, 8).unwrap();
        assert_eq!(s5.d[..5], ints(&[1, 2, 4, 7, 12])[..]);
        let s7 = cs_prime_sequence(7, 8).unwrap();
        assert_eq!(s7.d, ints(&[1, 3, 9, 25, 69, 183, 481, 1263, 3309]));
        assert_eq!(s7.v[8], ints(&[2394, 2090, 2090, 2090]));
        assert!(balance_check(&s7).is_empty());
    }

    #[test]
    fn composite_q_is_refused() {
        assert!(cs_prime_sequence(9, 10).is_err());
        assert!(cs_prime_complexity(15).is_err());
    }

    #[test]
    fn q9_closed_forms_hold() {
        let s = q9_sequence(60).unwrap();
        assert_eq!(s.d[..5], ints(&[1, 4, 16, 59, 216])[..]);
        assert!(q9_closed_form_mismatches(&s).is_empty());
        assert!(balance_check(&s).is_empty());
    }

    #[test]
    fn printed_q9_forms_differ_by_sign_and_shift() {
        let [_, u0, u1, u2] = q9_numerators();
        let a = intpoly::from_i64(&[-3, 0, 2]);
        let printed_u0 = intpoly::shift(&intpoly::mul(&a, &intpoly::from_i64(&[1, 0, 1])), 4);
        let printed_u1 = intpoly::shift(&a, 4);
        let printed_u2 = intpoly::shift(&intpoly::from_i64(&[-2, 0, -2, 0, 3]), 2);
        assert_eq!(printed_u0, intpoly::neg(&intpoly::shift(&u0, 2)));
        assert_eq!(printed_u1, intpoly::neg(&u1));
        assert_eq!(printed_u2, intpoly::neg(&u2));
    }

    #[test]
    fn companion_factor() {
        for q in [5, 7, 11, 13] {
            assert!(companion_has_quadratic_factor(q).unwrap(), "q = {q}");
        }
    }

    #[test]
    fn q5_grows_quadratically() {
        let s = cs_prime_sequence(5, 200).unwrap();
        let g = polynomial_growth(&s.d).unwrap();
        assert_eq!(g.degree, 2);
        assert!(g.quadratic[2] > 0.0);
    }
}
