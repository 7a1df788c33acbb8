//! Complexity from the growth of integer entries: iterate the matrix inverse
//! and the Hadamard inverse on a random integer matrix, dividing out the
//! collective GCD after each, and fit the growth of the entry bit length.
//!
//! The iteration runs on the `p` class coordinates. The inverse is taken as
//! `D·M⁻¹` from fraction-free elimination, where `D = ±det M`; projectively
//! this is the adjugate. Cyclic patterns only need the first column.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::{Pattern, PatternKind};
use crate::recurrence::{conjecture_lambda, ComplexityEstimate, Method};

/// `D·M⁻¹·B` with `D = ±det M` by Bareiss elimination; `None` when singular.
pub fn bareiss_solve(m: &[Vec<Integer>], rhs: &[Vec<Integer>]) -> Option<Vec<Vec<Integer>>> {
    let n = m.len();
    let k = rhs.first().map_or(0, Vec::len);
    let w = n + k;
    let mut a: Vec<Vec<Integer>> = m
        .iter()
        .zip(rhs)
        .map(|(r, b)| r.iter().chain(b).cloned().collect())
        .collect();
    let mut prev = Integer::from(1);
    for c in 0..n {
        let pr = (c..n).find(|&i| a[i][c] != 0)?;
        a.swap(c, pr);
        let (top, rest) = a.split_at_mut(c + 1);
        let piv = &top[c];
        for row in rest.iter_mut() {
            for j in c + 1..w {
                let mut t = Integer::from(&piv[c] * &row[j]);
                t -= Integer::from(&row[c] * &piv[j]);
                row[j] = t.div_exact(&prev);
            }
            row[c] = Integer::new();
        }
        prev = a[c][c].clone();
    }
    let d = prev;
    let mut x = vec![vec![Integer::new(); k]; n];
    for col in 0..k {
        for i in (0..n).rev() {
            let mut s = Integer::from(&d * &a[i][n + col]);
            for (j, xr) in x.iter().enumerate().skip(i + 1) {
                s -= Integer::from(&a[i][j] * &xr[col]);
            }
            x[i][col] = s.div_exact(&a[i][i]);
        }
    }
    Some(x)
}

fn is_cyclic(kind: PatternKind) -> bool {
    matches!(kind, PatternKind::Cyclic | PatternKind::CyclicSymmetric)
}

/// Class vector of the (projective) inverse of the pattern matrix of `x`.
pub fn inverse_step(pat: &Pattern, x: &[Integer]) -> Result<Vec<Integer>> {
    let q = pat.q();
    let cells = pat.expand(x);
    let m: Vec<Vec<Integer>> = cells.chunks(q).map(|r| r.to_vec()).collect();
    let singular = || Error::Computation("matrix became singular".into());
    if is_cyclic(pat.kind()) {
        let mut e0 = vec![vec![Integer::new()]; q];
        e0[0][0] = Integer::from(1);
        let col = bareiss_solve(&m, &e0).ok_or_else(singular)?;
        let mut out = vec![None; pat.p()];
        for (i, v) in col.into_iter().enumerate() {
            let c = pat.class(i, 0);
            if out[c].is_none() {
                out[c] = Some(v[0].clone());
            }
        }
        return out.into_iter().map(|v| v.ok_or_else(|| Error::Computation("class missing from column".into()))).collect();
    }
    let id: Vec<Vec<Integer>> = (0..q).map(|i| (0..q).map(|j| Integer::from(u8::from(i == j))).collect()).collect();
    let inv = bareiss_solve(&m, &id).ok_or_else(singular)?;
    let mut out: Vec<Option<Integer>> = vec![None; pat.p()];
    for (i, row) in inv.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            let c = pat.class(i, j);
            match &out[c] {
                None => out[c] = Some(v),
                Some(w) if *w != v => return Err(Error::Computation("inverse does not respect the pattern".into())),
                _ => {}
            }
        }
    }
    Ok(out.into_iter().map(|v| v.expect("surjective classes")).collect())
}

/// Hadamard inverse made polynomial: `y_k = ∏_{j≠k} x_j`.
pub fn hadamard_step(x: &[Integer]) -> Result<Vec<Integer>> {
    if x.iter().any(|v| *v == 0) {
        return Err(Error::Computation("zero entry before the Hadamard inverse".into()));
    }
    let n = x.len();
    let mut suffix = vec![Integer::from(1); n + 1];
    for k in (0..n).rev() {
        suffix[k] = Integer::from(&suffix[k + 1] * &x[k]);
    }
    let mut prefix = Integer::from(1);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        out.push(Integer::from(&prefix * &suffix[k + 1]));
        prefix *= &x[k];
    }
    Ok(out)
}

/// Divides by the collective GCD; the first nonzero entry is made positive.
pub fn normalize(x: &mut [Integer]) {
    let mut g = x.iter().fold(Integer::new(), |g, v| g.gcd(v));
    if g == 0 {
        return;
    }
    if x.iter().find(|v| **v != 0).is_some_and(|v| *v < 0) {
        g = -g;
    }
    for v in x.iter_mut() {
        v.div_exact_mut(&g);
    }
}

/// Largest bit length over the class coordinates.
pub fn max_bits(x: &[Integer]) -> u64 {
    x.iter().map(|v| u64::from(v.significant_bits())).max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// initial entries are uniform in `[1, 2^entry_bits)`
    pub entry_bits: u32,
    /// apply the Hadamard inverse before the matrix inverse
    pub hadamard_first: bool,
    /// stop before a Hadamard product would exceed this many bits
    pub max_bits: u64,
    /// resampling attempts for a degenerate initial matrix
    pub retries: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { entry_bits: 16, hadamard_first: false, max_bits: 1 << 31, retries: 8 }
    }
}

/// Bit lengths after every iteration (`bits[0]` is the starting matrix).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeTrace {
    pub pattern: PatternKind,
    pub q: usize,
    pub p: usize,
    pub seed: u64,
    pub entry_bits: u32,
    pub bits: Vec<u64>,
    /// seconds per iteration; not part of reproducible output
    #[serde(skip)]
    pub wall_secs: Vec<f64>,
    /// why the run stopped early, if it did
    pub stopped: Option<String>,
    #[serde(skip)]
    pub last: Vec<Integer>,
}

impl ProbeTrace {
    pub fn iters_completed(&self) -> usize {
        self.bits.len().saturating_sub(1)
    }
}

fn random_vector(p: usize, bits: u32, rng: &mut ChaCha8Rng) -> Vec<Integer> {
    (0..p).map(|_| Integer::from(rng.gen_range(1..1u64 << bits))).collect()
}

/// One iteration of the probe loop with normalizations.
pub fn probe_iteration(pat: &Pattern, x: &[Integer], hadamard_first: bool) -> Result<Vec<Integer>> {
    let first = if hadamard_first { hadamard_step(x)? } else { inverse_step(pat, x)? };
    let mut first = first;
    normalize(&mut first);
    let mut second = if hadamard_first { inverse_step(pat, &first)? } else { hadamard_step(&first)? };
    normalize(&mut second);
    Ok(second)
}

/// Runs up to `iters` iterations from a seeded random pattern matrix.
pub fn probe(pat: &Pattern, iters: usize, seed: u64, opts: &ProbeOptions) -> Result<ProbeTrace> {
    if iters < 3 {
        return Err(Error::Precondition("need at least 3 iterations".into()));
    }
    if !(2..=63).contains(&opts.entry_bits) {
        return Err(Error::Precondition("entry_bits must lie in [2, 63]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = ProbeTrace {
        pattern: pat.kind(),
        q: pat.q(),
        p: pat.p(),
        seed,
        entry_bits: opts.entry_bits,
        bits: Vec::new(),
        wall_secs: Vec::new(),
        stopped: None,
        last: Vec::new(),
    };
    // a starting matrix whose first iteration is defined
    let mut x = Vec::new();
    let mut next = None;
    for _ in 0..=opts.retries {
        x = random_vector(pat.p(), opts.entry_bits, &mut rng);
        normalize(&mut x);
        let t = Instant::now();
        if let Ok(y) = probe_iteration(pat, &x, opts.hadamard_first) {
            next = Some((y, t.elapsed().as_secs_f64()));
            break;
        }
    }
    let (y, secs) = next.ok_or_else(|| Error::Computation("no usable starting matrix".into()))?;
    trace.bits.push(max_bits(&x));
    trace.bits.push(max_bits(&y));
    trace.wall_secs.push(secs);
    x = y;
    while trace.iters_completed() < iters {
        let product: u64 = x.iter().map(|v| u64::from(v.significant_bits())).sum();
        let est = product.max(max_bits(&x) * pat.q() as u64);
        if est > opts.max_bits {
            trace.stopped = Some(format!("resource cap: next step needs about {est} bits"));
            break;
        }
        let t = Instant::now();
        match probe_iteration(pat, &x, opts.hadamard_first) {
            Ok(y) => {
                trace.bits.push(max_bits(&y));
                trace.wall_secs.push(t.elapsed().as_secs_f64());
                x = y;
            }
            Err(e) => {
                trace.stopped = Some(e.to_string());
                break;
            }
        }
    }
    trace.last = x;
    Ok(trace)
}

/// Default number of leading iterations excluded from the fit.
pub const DEFAULT_BURN_IN: usize = 2;

/// `λ = exp(slope)` of a least-squares fit of `ln(bits_n)` against `n` over
/// the trailing half (at least two points) of the trace after `burn_in`.
///
/// The uncertainty is the propagated standard error of the slope; with a
/// two-point window it is the change between the last two one-step slopes.
pub fn estimate_lambda(bits: &[u64], burn_in: usize) -> Result<ComplexityEstimate> {
    if bits.len() < burn_in + 3 {
        return Err(Error::Precondition(format!(
            "trace of {} entries is too short for burn-in {burn_in}",
            bits.len()
        )));
    }
    let avail = bits.len() - burn_in;
    let k = avail.div_ceil(2).max(2);
    let start = bits.len() - k;
    let ln = |n: usize| (bits[n].max(1) as f64).ln();
    let xs: Vec<f64> = (start..bits.len()).map(|n| n as f64).collect();
    let ys: Vec<f64> = (start..bits.len()).map(ln).collect();
    let mx = xs.iter().sum::<f64>() / k as f64;
    let my = ys.iter().sum::<f64>() / k as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let se = if k > 2 {
        let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
        (rss / (k - 2) as f64 / sxx).sqrt()
    } else {
        let n = bits.len() - 1;
        ((ln(n) - ln(n - 1)) - (ln(n - 1) - ln(n - 2))).abs()
    };
    let lambda = slope.exp();
    Ok(ComplexityEstimate::new(lambda, Method::Arithmetic, lambda * se, None))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub pattern: PatternKind,
    pub iters_completed: usize,
    pub bits: Vec<u64>,
    pub lambda: Option<ComplexityEstimate>,
    pub rel_deviation: Option<f64>,
    pub aborted: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub q: usize,
    pub analytic: ComplexityEstimate,
    pub rows: Vec<ConjectureRow>,
    pub partial: bool,
}

/// Probes the general, symmetric and cyclic patterns (concurrently) and
/// compares each `λ` with the conjectured common value.
pub fn conjecture_check(q: usize, iters: usize, seed: u64, burn_in: usize, opts: &ProbeOptions) -> Result<ConjectureReport> {
    if q < 5 {
        return Err(Error::Precondition(format!("q = {q}: need q >= 5")));
    }
    let analytic = conjecture_lambda(q)?;
    let kinds = [PatternKind::General, PatternKind::Symmetric, PatternKind::Cyclic];
    let rows: Vec<ConjectureRow> = std::thread::scope(|s| {
        let handles: Vec<_> = kinds
            .iter()
            .map(|&kind| {
                s.spawn(move || -> Result<ConjectureRow> {
                    let pat = Pattern::build(q, kind)?;
                    let trace = probe(&pat, iters, seed, opts)?;
                    let lambda = estimate_lambda(&trace.bits, burn_in).ok();
                    Ok(ConjectureRow {
                        pattern: kind,
                        iters_completed: trace.iters_completed(),
                        rel_deviation: lambda.as_ref().map(|l| (l.lambda - analytic.lambda).abs() / analytic.lambda),
                        lambda,
                        aborted: trace.stopped.clone(),
                        bits: trace.bits,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(kinds)
            .map(|(h, kind)| match h.join() {
                Ok(Ok(row)) => row,
                Ok(Err(e)) => ConjectureRow {
                    pattern: kind,
                    iters_completed: 0,
                    bits: Vec::new(),
                    lambda: None,
                    rel_deviation: None,
                    aborted: Some(e.to_string()),
                },
                Err(_) => ConjectureRow {
                    pattern: kind,
                    iters_completed: 0,
                    bits: Vec::new(),
                    lambda: None,
                    rel_deviation: None,
                    aborted: Some("worker panicked".into()),
                },
            })
            .collect()
    });
    let partial = rows.iter().any(|r| r.aborted.is_some() || r.lambda.is_none());
    Ok(ConjectureReport { q, analytic, rows, partial })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn bareiss_inverse_of_small_matrix() {
        let m = vec![ints(&[2, 1]), ints(&[5, 3])];
        let id = vec![ints(&[1, 0]), ints(&[0, 1])];
        let x = bareiss_solve(&m, &id).unwrap();
        // det = 1, inverse = [[3, -1], [-5, 2]]
        assert_eq!(x, vec![ints(&[3, -1]), ints(&[-5, 2])]);
    }

    #[test]
    fn geometric_trace() {
        let bits: Vec<u64> = (0..8).map(|n| 10 * 3u64.pow(n)).collect();
        let l = estimate_lambda(&bits, 2).unwrap();
        assert!((l.lambda - 3.0).abs() < 1e-9);
    }

    #[test]
    fn hadamard_products() {
        assert_eq!(hadamard_step(&ints(&[2, 3, 5])).unwrap(), ints(&[15, 10, 6]));
        assert!(hadamard_step(&ints(&[2, 0])).is_err());
    }
}
