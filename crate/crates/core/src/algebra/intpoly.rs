//! Dense polynomials with big integer coefficients (lowest degree first).

use rug::{Integer, Rational};

pub type IntPoly = Vec<Integer>;

pub fn from_i64(c: &[i64]) -> IntPoly {
    c.iter().map(|&x| Integer::from(x)).collect()
}

pub fn trim(mut a: IntPoly) -> IntPoly {
    while a.last().is_some_and(|c| *c == 0) {
        a.pop();
    }
    a
}

pub fn mul(a: &[Integer], b: &[Integer]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Integer::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Integer::from(x * y);
        }
    }
    trim(out)
}

pub fn add(a: &[Integer], b: &[Integer]) -> IntPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let mut s = a.get(i).cloned().unwrap_or_default();
            if let Some(y) = b.get(i) {
                s += y;
            }
            s
        })
        .collect();
    trim(out)
}

pub fn neg(a: &[Integer]) -> IntPoly {
    a.iter().map(|x| Integer::from(-x)).collect()
}

/// Multiplies by `s^k`.
pub fn shift(a: &[Integer], k: usize) -> IntPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Integer::new(); k];
    out.extend(a.iter().cloned());
    out
}

/// First `n` coefficients of `num/den`; `None` unless `den(0) = ±1`.
pub fn series(num: &[Integer], den: &[Integer], n: usize) -> Option<Vec<Integer>> {
    let d0 = den.first()?;
    if *d0 != 1 && *d0 != -1 {
        return None;
    }
    let mut c: Vec<Integer> = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = num.get(k).cloned().unwrap_or_default();
        for (j, dj) in den.iter().enumerate().skip(1).take(k) {
            s -= Integer::from(dj * &c[k - j]);
        }
        if *d0 == -1 {
            s = -s;
        }
        c.push(s);
    }
    Some(c)
}

pub fn eval_f64(a: &[Integer], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
}

/// Characteristic polynomial `det(x·Id − M)` (monic, lowest degree first) by Faddeev–LeVerrier.
pub fn charpoly(m: &[Vec<Integer>]) -> IntPoly {
    let n = m.len();
    let mq: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|x| Rational::from(x)).collect()).collect();
    let matmul = |a: &[Vec<Rational>], b: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut s = Rational::new();
                        for (k, bk) in b.iter().enumerate() {
                            if a[i][k] != 0 {
                                s += Rational::from(&a[i][k] * &bk[j]);
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect()
    };
    let mut coeffs = vec![Rational::new(); n + 1];
    coeffs[n] = Rational::from(1);
    // M_k = M·M_{k-1} + c_{n-k+1}·Id, c_{n-k} = -tr(M·M_k)/k
    let mut mk: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| Rational::from(u8::from(i == j))).collect()).collect();
    for k in 1..=n {
        let am = matmul(&mq, &mk);
        let tr: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        let c = -tr / Rational::from(k as u32);
        coeffs[n - k] = c.clone();
        mk = am;
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    coeffs.into_iter().map(|r| r.into_numer_denom().0).collect()
}

/// Remainder of `a` modulo a monic `b`.
pub fn rem_monic(a: &[Integer], b: &[Integer]) -> IntPoly {
    let mut r = a.to_vec();
    let m = b.len() - 1;
    while r.len() > m {
        let lead = r.pop().expect("nonempty");
        let k = r.len() - m;
        for (j, bj) in b.iter().enumerate().take(m) {
            r[k + j] -= Integer::from(&lead * bj);
        }
    }
    trim(r)
}

pub fn content(a: &[Integer]) -> Integer {
    a.iter().fold(Integer::new(), |g, c| g.gcd(c))
}

/// `a / content(a)`, with a positive leading coefficient.
pub fn primitive(a: &[Integer]) -> IntPoly {
    let a = trim(a.to_vec());
    let mut g = content(&a);
    if g == 0 {
        return a;
    }
    if a.last().is_some_and(|c| *c < 0) {
        g = -g;
    }
    a.into_iter().map(|c| c.div_exact(&g)).collect()
}

pub fn derivative(a: &[Integer]) -> IntPoly {
    trim(a.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u64)).collect())
}

/// Pseudo-remainder `lc(b)^k · a mod b`.
pub fn prem(a: &[Integer], b: &[Integer]) -> IntPoly {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lb = b.last().expect("nonzero divisor").clone();
    let m = b.len() - 1;
    while r.len() > m {
        let lead = r.pop().expect("nonempty");
        let k = r.len() - m;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (j, bj) in b.iter().enumerate().take(m) {
            r[k + j] -= Integer::from(&lead * bj);
        }
        r = trim(r);
    }
    r
}

/// Primitive greatest common divisor over the rationals.
pub fn gcd(a: &[Integer], b: &[Integer]) -> IntPoly {
    let (mut a, mut b) = (primitive(a), primitive(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = primitive(&prem(&a, &b));
        a = b;
        b = r;
    }
    a
}

/// `a / b` when the division is exact in `Z[u]`.
pub fn div_exact(a: &[Integer], b: &[Integer]) -> Option<IntPoly> {
    let b = trim(b.to_vec());
    let lb = b.last()?.clone();
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return r.is_empty().then(Vec::new);
    }
    let m = b.len() - 1;
    let mut q = vec![Integer::new(); r.len() - m];
    while r.len() > m {
        let lead = r.pop().expect("nonempty");
        if !lead.is_divisible(&lb) {
            return None;
        }
        let t = lead.div_exact(&lb);
        let k = r.len() - m;
        for (j, bj) in b.iter().enumerate().take(m) {
            r[k + j] -= Integer::from(&t * bj);
        }
        q[k] = t;
    }
    trim(r).is_empty().then(|| trim(q))
}
