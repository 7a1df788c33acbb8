//! Rational generating functions `f(u) = Σ d_n uⁿ` inferred from degree
//! sequences by exact Padé approximation, and `λ` from their smallest pole.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::algebra::intpoly::{self, IntPoly};
use crate::error::{Error, Result};
use crate::recurrence::{ComplexityEstimate, Method};

/// `numerator / denominator` in lowest terms with `denominator(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalGF {
    pub numerator: IntPoly,
    pub denominator: IntPoly,
}

impl RationalGF {
    /// Reduces `num / den`; `None` when `den(0) = 0` after cancellation.
    /// The result may have `|den(0)| > 1`, see [`RationalGF::is_integral`].
    pub fn reduced(num: &[Integer], den: &[Integer]) -> Option<Self> {
        let den = intpoly::trim(den.to_vec());
        if den.is_empty() {
            return None;
        }
        let g = intpoly::gcd(num, &den);
        let mut num = intpoly::div_exact(num, &g)?;
        let mut den = intpoly::div_exact(&den, &g)?;
        let c = intpoly::content(&num).gcd(&intpoly::content(&den));
        let sign = if den[0] < 0 { -1 } else { 1 };
        if den[0] == 0 {
            return None;
        }
        let scale = c * sign;
        for x in num.iter_mut().chain(den.iter_mut()) {
            *x = x.clone().div_exact(&scale);
        }
        Some(RationalGF { numerator: num, denominator: den })
    }

    pub fn from_i64(num: &[i64], den: &[i64]) -> Option<Self> {
        Self::reduced(&intpoly::from_i64(num), &intpoly::from_i64(den))
    }

    /// Integer expansion coefficients, which holds iff `den(0) = 1`.
    pub fn is_integral(&self) -> bool {
        self.denominator[0] == 1
    }

    /// First `n` coefficients; `None` unless integral.
    pub fn expand(&self, n: usize) -> Option<Vec<Integer>> {
        if !self.is_integral() {
            return None;
        }
        intpoly::series(&self.numerator, &self.denominator, n)
    }

    /// `m = deg num + deg den`, the order needed to pin the fraction down.
    pub fn order(&self) -> usize {
        self.numerator.len().saturating_sub(1) + self.denominator.len() - 1
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "numerator": ints_json(&self.numerator),
            "denominator": ints_json(&self.denominator),
        })
    }
}

/// Integers as JSON numbers when they fit in `i64`, decimal strings otherwise.
pub fn ints_json(v: &[Integer]) -> Vec<serde_json::Value> {
    v.iter()
        .map(|x| match x.to_i64() {
            Some(i) => serde_json::Value::from(i),
            None => serde_json::Value::from(x.to_string()),
        })
        .collect()
}

/// One `[N/M]` approximant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub n: usize,
    pub m: usize,
    /// the linear system for the denominator had more than one solution
    pub singular: bool,
    /// reduced approximant, `None` when it has a pole at `u = 0`
    pub fraction: Option<RationalGF>,
}

/// All splits `N + M = window − 1` of a sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadeTable {
    pub terms: Vec<Integer>,
    pub window: usize,
    pub splits: Vec<Split>,
}

/// A nonzero kernel vector of an integer matrix with `cols > rows`, by
/// fraction-free elimination and rational back substitution.
fn kernel_vector(mut a: Vec<Vec<Integer>>, cols: usize) -> (Vec<Integer>, usize) {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut prev = Integer::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let t = Integer::from(&a[r][c] * &a[i][j]) - Integer::from(&a[i][c] * &a[r][j]);
                a[i][j] = t.div_exact(&prev);
            }
            a[i][c] = Integer::new();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let f = free[0];
    let mut x = vec![Rational::new(); cols];
    x[f] = Rational::from(1);
    for (k, &pc) in pivots.iter().enumerate().rev() {
        let mut s = Rational::new();
        for j in pc + 1..cols {
            if x[j] != 0 {
                s += Rational::from(&a[k][j] * &x[j]);
            }
        }
        x[pc] = -s / Rational::from(&a[k][pc]);
    }
    let lcm = x.iter().fold(Integer::from(1), |l, v| l.lcm(v.denom()));
    let v = x
        .into_iter()
        .map(|q| {
            let (n, d) = q.into_numer_denom();
            n * lcm.clone().div_exact(&d)
        })
        .collect();
    (v, cols - rank)
}

fn solve_split(c: &[Integer], n: usize, m: usize) -> Split {
    let coef = |k: isize| if k < 0 { Integer::new() } else { c[k as usize].clone() };
    // coefficients n+1 ..= n+m of c·Q vanish
    let rows: Vec<Vec<Integer>> =
        (0..m).map(|r| (0..=m).map(|j| coef((n + 1 + r) as isize - j as isize)).collect()).collect();
    let (q, kernel_dim) = if m == 0 { (vec![Integer::from(1)], 1) } else { kernel_vector(rows, m + 1) };
    let mut p = vec![Integer::new(); n + 1];
    for (i, pi) in p.iter_mut().enumerate() {
        for (j, qj) in q.iter().enumerate().take(i + 1) {
            *pi += Integer::from(qj * &c[i - j]);
        }
    }
    Split { n, m, singular: kernel_dim > 1, fraction: RationalGF::reduced(&p, &q) }
}

/// Padé table over the first `window` terms (all terms when `None`).
pub fn pade_fit(terms: &[Integer], window: Option<usize>) -> Result<PadeTable> {
    let window = window.unwrap_or(terms.len()).min(terms.len());
    if window < 4 {
        return Err(Error::Precondition(format!("need at least 4 terms, got {window}")));
    }
    let c = &terms[..window];
    let splits = (0..window).map(|n| solve_split(c, n, window - 1 - n)).collect();
    Ok(PadeTable { terms: terms.to_vec(), window, splits })
}

pub fn pade_fit_u64(terms: &[u64], window: Option<usize>) -> Result<PadeTable> {
    let t: Vec<Integer> = terms.iter().map(|&x| Integer::from(x)).collect();
    pade_fit(&t, window)
}

/// Outcome of [`stabilize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stabilized {
    Stable {
        gf: RationalGF,
        /// numerator degrees `N` of the agreeing splits
        splits_used: Vec<usize>,
    },
    Unstable {
        diagnostics: Vec<String>,
    },
}

/// Minimum number of consecutive splits that must agree.
pub const MIN_RUN: usize = 3;

/// Terms checked for nonnegativity beyond the data.
const HORIZON: usize = 64;

/// A fraction shared by at least [`MIN_RUN`] consecutive splits that
/// reproduces every term (held-out ones included) and expands to
/// nonnegative integers.
pub fn stabilize(table: &PadeTable) -> Stabilized {
    let mut diagnostics = Vec::new();
    let mut best: Option<(RationalGF, Vec<usize>)> = None;
    let splits = &table.splits;
    let mut i = 0;
    while i < splits.len() {
        let Some(f) = &splits[i].fraction else {
            i += 1;
            continue;
        };
        let mut j = i + 1;
        while j < splits.len() && splits[j].fraction.as_ref() == Some(f) {
            j += 1;
        }
        let run: Vec<usize> = splits[i..j].iter().map(|s| s.n).collect();
        if run.len() >= MIN_RUN {
            match validate(f, &table.terms) {
                Ok(()) => {
                    if best.as_ref().is_none_or(|(_, r)| run.len() > r.len()) {
                        best = Some((f.clone(), run));
                    }
                }
                Err(why) => diagnostics.push(format!("splits N = {:?}: {why}", run)),
            }
        }
        i = j;
    }
    match best {
        Some((gf, splits_used)) => Stabilized::Stable { gf, splits_used },
        None => {
            diagnostics.push(format!(
                "no fraction shared by {MIN_RUN} consecutive splits of {} terms",
                table.window
            ));
            Stabilized::Unstable { diagnostics }
        }
    }
}

fn validate(f: &RationalGF, terms: &[Integer]) -> std::result::Result<(), String> {
    let Some(exp) = f.expand(terms.len().max(HORIZON)) else {
        return Err("non-integer coefficients".into());
    };
    if let Some(k) = (0..terms.len()).find(|&k| exp[k] != terms[k]) {
        return Err(format!("predicts {} for term {k}, data has {}", exp[k], terms[k]));
    }
    if let Some(k) = exp.iter().position(|c| *c < 0) {
        return Err(format!("negative coefficient at order {k}"));
    }
    Ok(())
}

/// `λ` from the smallest pole, by two estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GfLambda {
    pub estimate: ComplexityEstimate,
    /// inverse of the smallest positive real zero of the denominator
    pub from_root: f64,
    /// `c_{n+1} / c_n` at [`RATIO_ORDER`]
    pub from_ratio: f64,
    pub agree: bool,
    /// for `λ = 1`: polynomial growth order (multiplicity of the pole at 1, minus 1)
    pub growth_order: Option<u32>,
}

pub const RATIO_ORDER: usize = 500;
pub const AGREEMENT_TOL: f64 = 1e-9;

fn eval_q(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::new(), |acc, c| acc * x + c)
}

fn sign_changes(seq: &[Vec<Rational>], x: &Rational) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| eval_q(p, x).cmp0() as i32)
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn rat_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let m = b.len() - 1;
    let lb = b[m].clone();
    while r.len() > m {
        let t = r.pop().expect("nonempty") / &lb;
        let k = r.len() - m;
        for j in 0..m {
            r[k + j] -= Rational::from(&t * &b[j]);
        }
        while r.last().is_some_and(|c| *c == 0) {
            r.pop();
        }
    }
    r
}

/// Smallest positive real root of a polynomial with `p(0) ≠ 0`, by Sturm
/// sequence and bisection to 2^-100.
pub fn smallest_positive_root(p: &[Integer]) -> Option<f64> {
    let p = intpoly::trim(p.to_vec());
    if p.len() < 2 {
        return None;
    }
    let g = intpoly::gcd(&p, &intpoly::derivative(&p));
    let sf = intpoly::div_exact(&p, &g)?;
    let to_q = |a: &[Integer]| a.iter().map(Rational::from).collect::<Vec<_>>();
    let mut seq = vec![to_q(&sf), to_q(&intpoly::derivative(&sf))];
    while seq.last().is_some_and(|s| s.len() > 1) {
        let n = seq.len();
        let r: Vec<Rational> = rat_rem(&seq[n - 2], &seq[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    // Cauchy bound 1 + max|a_i / a_lead|
    let lead = Rational::from(sf.last().expect("nonconstant"));
    let bound = sf
        .iter()
        .map(|c| (Rational::from(c) / &lead).abs())
        .fold(Rational::new(), |m, x| if x > m { x } else { m })
        + 1u32;
    let mut lo = Rational::new();
    let mut hi = bound;
    let v_lo = sign_changes(&seq, &lo);
    if v_lo == sign_changes(&seq, &hi) {
        return None;
    }
    let eps = Rational::from((1, Integer::from(1) << 100u32));
    let p_q = to_q(&sf);
    while Rational::from(&hi - &lo) > eps {
        let mid = Rational::from(&lo + &hi) / 2u32;
        if eval_q(&p_q, &mid) == 0 && sign_changes(&seq, &lo) - sign_changes(&seq, &mid) == 1 {
            return Some(mid.to_f64());
        }
        if sign_changes(&seq, &lo) > sign_changes(&seq, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(Rational::from(&lo + &hi).to_f64() / 2.0)
}

/// Multiplicity of `u = 1` as a root.
fn multiplicity_at_one(p: &[Integer]) -> u32 {
    let lin = intpoly::from_i64(&[1, -1]);
    let mut p = p.to_vec();
    let mut k = 0;
    while let Some(q) = intpoly::div_exact(&p, &lin) {
        if q.is_empty() {
            break;
        }
        p = q;
        k += 1;
    }
    k
}

/// `λ = 1 / min |z|` over the poles of `f`.
///
/// With nonnegative coefficients the radius of convergence is itself a pole on
/// the positive axis, so the smallest positive real zero of the (reduced)
/// denominator is the dominant singularity. The ratio of consecutive
/// coefficients gives an independent estimate.
pub fn lambda_from_gf(f: &RationalGF) -> Result<GfLambda> {
    if f.denominator.len() < 2 {
        return Err(Error::Precondition("denominator is constant".into()));
    }
    let root = smallest_positive_root(&f.denominator)
        .ok_or_else(|| Error::Computation("denominator has no positive real zero".into()))?;
    let from_root = 1.0 / root;
    let exp = f
        .expand(RATIO_ORDER + 2)
        .ok_or_else(|| Error::Precondition("fraction is not integral".into()))?;
    let from_ratio = if exp[RATIO_ORDER] == 0 {
        f64::NAN
    } else {
        Rational::from((exp[RATIO_ORDER + 1].clone(), exp[RATIO_ORDER].clone())).to_f64()
    };
    let unit = (from_root - 1.0).abs() < 1e-12;
    let growth_order = unit.then(|| multiplicity_at_one(&f.denominator).saturating_sub(1));
    let (lambda, agree, uncertainty) = if let Some(k) = growth_order {
        // the ratio behaves like 1 + k/n here
        let predicted = 1.0 + k as f64 / RATIO_ORDER as f64;
        (1.0, (from_ratio - predicted).abs() < 1e-2, (from_ratio - 1.0).abs())
    } else {
        let diff = (from_ratio - from_root).abs();
        (from_root, diff <= AGREEMENT_TOL * from_root, diff)
    };
    let exact_poly = f.denominator.iter().map(|c| c.to_i64()).collect::<Option<Vec<i64>>>();
    Ok(GfLambda {
        estimate: ComplexityEstimate::new(lambda, Method::Genfun, uncertainty, exact_poly),
        from_root,
        from_ratio,
        agree,
        growth_order,
    })
}

/// Golden generating functions for the cyclic symmetric pattern, full step.
pub fn table_fraction(q: usize) -> Option<RationalGF> {
    use intpoly::{from_i64 as p, mul};
    let sq = |a: &[i64]| mul(&p(a), &p(a));
    let one_minus = p(&[1, -1]);
    let cyc3 = p(&[1, 1, 1]);
    let (num, den) = match q {
        4 => (sq(&[1, 1]), sq(&[1, -1])),
        5 => (sq(&[1, 1, 2]), mul(&mul(&sq(&[1, -1]), &one_minus), &cyc3)),
        6 => (sq(&[1, 2]), mul(&one_minus, &p(&[1, -4]))),
        7 => (sq(&[1, 1, 3]), mul(&mul(&one_minus, &cyc3), &p(&[1, -7, 1]))),
        8 => (mul(&p(&[1, 1]), &p(&[1, 2, -1])), mul(&one_minus, &p(&[1, -11, 7, -1]))),
        9 => (sq(&[1, 1, 3, -3]), mul(&one_minus, &p(&[1, -13, 2, 1, 12, -8, 1]))),
        10 => (sq(&[1, 3]), mul(&one_minus, &p(&[1, -18, 1]))),
        11 => (sq(&[1, 1, 5]), mul(&mul(&one_minus, &cyc3), &p(&[1, -23, 1]))),
        12 => (mul(&p(&[1, 4, -3]), &p(&[1, 2, -1])), mul(&one_minus, &p(&[1, -27, 31, -9]))),
        13 => (sq(&[1, 1, 6]), mul(&mul(&one_minus, &cyc3), &p(&[1, -34, 1]))),
        _ => return None,
    };
    RationalGF::reduced(&num, &den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn geometric_sequence() {
        let t = pade_fit(&ints(&[1; 8]), None).unwrap();
        let Stabilized::Stable { gf, .. } = stabilize(&t) else { panic!("unstable") };
        assert_eq!(gf, RationalGF::from_i64(&[1], &[1, -1]).unwrap());
    }

    #[test]
    fn q4_central_split() {
        let t = pade_fit(&ints(&[1, 4, 8, 12, 16]), None).unwrap();
        assert_eq!(t.splits[2].fraction, table_fraction(4));
    }

    #[test]
    fn q8_lambda() {
        let l = lambda_from_gf(&table_fraction(8).unwrap()).unwrap();
        assert!((l.estimate.lambda - 10.331852).abs() < 1e-6);
        assert!(l.agree);
        let l4 = lambda_from_gf(&table_fraction(4).unwrap()).unwrap();
        assert_eq!((l4.estimate.lambda, l4.growth_order), (1.0, Some(1)));
    }

    #[test]
    fn perturbed_input_is_unstable() {
        let mut d = table_fraction(6).unwrap().expand(9).unwrap();
        d[6] += 1;
        let t = pade_fit(&d, None).unwrap();
        assert!(matches!(stabilize(&t), Stabilized::Unstable { .. }));
    }
}
