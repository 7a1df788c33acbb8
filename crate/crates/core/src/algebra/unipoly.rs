//! Dense univariate polynomials over a prime field.
//!
//! Multiplication switches to the NTT above a small threshold, division uses
//! Newton iteration on the reversed divisor, and the GCD runs the half-GCD
//! recursion so that line images of degree in the millions remain tractable.

use std::fmt;

use super::field::PrimeField;
use super::ntt;

/// Polynomial lengths below this use the quadratic Euclidean algorithm.
const HGCD_THRESHOLD: usize = 160;
/// Division with quotient or divisor shorter than this is done by long division.
const DIV_THRESHOLD: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() > 12 {
            write!(f, "UniPoly(deg {} over F_{})", self.coeffs.len() - 1, self.field.modulus())
        } else {
            write!(f, "UniPoly({:?} over F_{})", self.coeffs, self.field.modulus())
        }
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl UniPoly {
    /// Builds a polynomial from coefficients (lowest degree first); reduces and trims.
    pub fn new(field: PrimeField, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| field.from_u64(c)).collect();
        trim(&mut coeffs);
        UniPoly { field, coeffs }
    }

    pub(crate) fn from_reduced(field: PrimeField, mut coeffs: Vec<u64>) -> Self {
        trim(&mut coeffs);
        UniPoly { field, coeffs }
    }

    pub fn from_i64(field: PrimeField, coeffs: &[i64]) -> Self {
        Self::from_reduced(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: PrimeField) -> Self {
        UniPoly { field, coeffs: Vec::new() }
    }

    pub fn constant(field: PrimeField, c: u64) -> Self {
        Self::new(field, vec![c])
    }

    pub fn one(field: PrimeField) -> Self {
        Self::constant(field, 1)
    }

    /// `c + d·t`
    pub fn linear(field: PrimeField, c: u64, d: u64) -> Self {
        Self::new(field, vec![c, d])
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn eval(&self, t: u64) -> u64 {
        let f = &self.field;
        let tm = f.to_mont(t);
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mont_mul(acc, tm), c))
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let f = self.field;
        let (long, short) = if self.len() >= o.len() { (self, o) } else { (o, self) };
        let mut v = long.coeffs.clone();
        for (x, &y) in v.iter_mut().zip(&short.coeffs) {
            *x = f.add(*x, y);
        }
        Self::from_reduced(f, v)
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let f = self.field;
        let mut v = self.coeffs.clone();
        if v.len() < o.len() {
            v.resize(o.len(), 0);
        }
        for (x, &y) in v.iter_mut().zip(&o.coeffs) {
            *x = f.sub(*x, y);
        }
        Self::from_reduced(f, v)
    }

    pub fn neg(&self) -> UniPoly {
        let f = self.field;
        UniPoly { field: f, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: u64) -> UniPoly {
        let f = self.field;
        let cm = f.to_mont(c);
        Self::from_reduced(f, self.coeffs.iter().map(|&x| f.mont_mul(x, cm)).collect())
    }

    /// Adds `c·o` into `self` in place.
    pub fn add_scaled(&mut self, o: &UniPoly, c: u64) {
        let f = self.field;
        if self.coeffs.len() < o.len() {
            self.coeffs.resize(o.len(), 0);
        }
        let cm = f.to_mont(c);
        for (x, &y) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *x = f.add(*x, f.mont_mul(y, cm));
        }
        trim(&mut self.coeffs);
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        Self::from_reduced(self.field, ntt::multiply(&self.field, &self.coeffs, &o.coeffs))
    }

    pub fn square(&self) -> UniPoly {
        Self::from_reduced(self.field, ntt::multiply(&self.field, &self.coeffs, &self.coeffs))
    }

    /// `self mod t^k`
    pub fn truncate(&self, k: usize) -> UniPoly {
        Self::from_reduced(self.field, self.coeffs[..k.min(self.len())].to_vec())
    }

    /// `self div t^k`
    pub fn shr(&self, k: usize) -> UniPoly {
        if k >= self.len() {
            return Self::zero(self.field);
        }
        UniPoly { field: self.field, coeffs: self.coeffs[k..].to_vec() }
    }

    /// `self · t^k`
    pub fn shl(&self, k: usize) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![0; k];
        v.extend_from_slice(&self.coeffs);
        UniPoly { field: self.field, coeffs: v }
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lead()).expect("nonzero lead");
        self.scale(inv)
    }

    /// Inverse of the power series `self` modulo `t^k`; requires a nonzero constant term.
    pub fn inv_series(&self, k: usize) -> UniPoly {
        let f = self.field;
        let c0 = f.inv(self.coeff(0)).expect("series with zero constant term");
        let mut g = vec![c0];
        let mut m = 1;
        while m < k {
            let m2 = (2 * m).min(k);
            let lo = &self.coeffs[..self.coeffs.len().min(m2)];
            // g <- g - g·(self·g - 1) mod t^m2; the low m terms of self·g - 1 vanish
            let err: Vec<u64> = if m <= ntt::NTT_THRESHOLD || !ntt::supported(&f, 2 * m) {
                let mut e = ntt::naive_mul(&f, lo, &g);
                e.resize(m2.max(m), 0);
                e[m..m2].to_vec()
            } else {
                // coefficients m..m2 of lo·g; a cyclic length 2m avoids wrap-around there
                let plan = ntt::Plan::new(&f, 2 * m);
                let fg = plan.fwd(&g);
                let e = plan.inv(plan.mul(&plan.fwd(lo), &fg), m2);
                let mut err = e[m.min(e.len())..].to_vec();
                err.resize(m2 - m, 0);
                err = {
                    let fe = plan.fwd(&err);
                    plan.inv(plan.mul(&fe, &fg), m2 - m)
                };
                for x in err.iter_mut() {
                    *x = f.neg(*x);
                }
                g.resize(m2, 0);
                g[m..].copy_from_slice(&err[..m2 - m]);
                m = m2;
                continue;
            };
            let mut corr = ntt::naive_mul(&f, &g, &err);
            corr.resize(m2 - m, 0);
            g.resize(m2, 0);
            for (i, c) in corr.into_iter().take(m2 - m).enumerate() {
                g[m + i] = f.neg(c);
            }
            m = m2;
        }
        g.truncate(k);
        Self::from_reduced(f, g)
    }

    fn divrem_naive(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let f = self.field;
        let n = self.len();
        let m = d.len();
        let mut r = self.coeffs.clone();
        let inv = f.to_mont(f.inv(d.lead()).expect("nonzero divisor"));
        let dm: Vec<u64> = d.coeffs.iter().map(|&c| f.to_mont(c)).collect();
        let mut q = vec![0u64; n - m + 1];
        for i in (0..=n - m).rev() {
            let c = f.mont_mul(r[i + m - 1], inv);
            q[i] = c;
            if c == 0 {
                continue;
            }
            for j in 0..m {
                r[i + j] = f.sub(r[i + j], f.mont_mul(c, dm[j]));
            }
        }
        r.truncate(m - 1);
        (Self::from_reduced(f, q), Self::from_reduced(f, r))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.len() < d.len() {
            return (Self::zero(self.field), self.clone());
        }
        let qlen = self.len() - d.len() + 1;
        if qlen <= DIV_THRESHOLD || d.len() <= DIV_THRESHOLD {
            return self.divrem_naive(d);
        }
        let q = self.div_fast(d, qlen);
        // the remainder has fewer than len(d) terms, so a cyclic product of that size suffices
        let n = d.len() - 1;
        if !ntt::supported(&self.field, n) {
            return (q.clone(), self.sub(&d.mul(&q)));
        }
        let dq = ntt::cyclic_multiply(&self.field, &d.coeffs, &q.coeffs, n, n);
        let plan_n = dq.len().max(n).next_power_of_two().max(2);
        let f = self.field;
        let mut folded = vec![0u64; plan_n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            folded[i % plan_n] = f.add(folded[i % plan_n], c);
        }
        let r: Vec<u64> = (0..n).map(|i| f.sub(folded[i], dq.get(i).copied().unwrap_or(0))).collect();
        (q, Self::from_reduced(f, r))
    }

    fn div_fast(&self, d: &UniPoly, qlen: usize) -> UniPoly {
        let ra: Vec<u64> = self.coeffs.iter().rev().take(qlen).copied().collect();
        let rb: Vec<u64> = d.coeffs.iter().rev().take(qlen).copied().collect();
        let ra = Self::from_reduced(self.field, ra);
        let rb = Self::from_reduced(self.field, rb);
        let qr = ra.mul(&rb.inv_series(qlen)).truncate(qlen);
        let mut q = qr.coeffs;
        q.resize(qlen, 0);
        q.reverse();
        Self::from_reduced(self.field, q)
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.divrem(d).1
    }

    /// Quotient of an exact division; `None` if the remainder is nonzero.
    pub fn div_exact(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    /// Quotient assuming exact division (the remainder is not computed).
    pub fn div_assume_exact(&self, d: &UniPoly) -> UniPoly {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.len() < d.len() {
            return Self::zero(self.field);
        }
        let qlen = self.len() - d.len() + 1;
        if qlen <= DIV_THRESHOLD || d.len() <= DIV_THRESHOLD {
            return self.divrem_naive(d).0;
        }
        self.div_fast(d, qlen)
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let (mut a, mut b) = if self.len() >= o.len() { (self.clone(), o.clone()) } else { (o.clone(), self.clone()) };
        loop {
            if b.is_zero() {
                return a.monic();
            }
            if a.len() <= HGCD_THRESHOLD {
                return euclid(a, b).monic();
            }
            let m = hgcd(&a, &b);
            let (a2, b2) = m.apply(&a, &b);
            a = a2;
            b = b2;
            if b.is_zero() {
                return a.monic();
            }
            let r = a.rem(&b);
            a = b;
            b = r;
        }
    }

    pub fn derivative(&self) -> UniPoly {
        let f = self.field;
        let v = self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, f.from_u64(i as u64))).collect();
        Self::from_reduced(f, v)
    }
}

fn euclid(mut a: UniPoly, mut b: UniPoly) -> UniPoly {
    while !b.is_zero() {
        let r = a.divrem_naive(&b).1;
        a = b;
        b = r;
    }
    a
}

/// 2×2 polynomial matrix acting on column vectors `(a, b)`.
#[derive(Clone, Debug)]
struct Mat2 {
    m: [UniPoly; 4],
}

impl Mat2 {
    fn identity(f: PrimeField) -> Self {
        Mat2 { m: [UniPoly::one(f), UniPoly::zero(f), UniPoly::zero(f), UniPoly::one(f)] }
    }

    fn max_len(&self) -> usize {
        self.m.iter().map(|p| p.len()).max().unwrap_or(0)
    }

    /// `M·(a, b)`, whose entries are known to be no longer than `a`.
    fn apply(&self, a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly) {
        let f = *a.field();
        let [m00, m01, m10, m11] = &self.m;
        if self.max_len() <= ntt::NTT_THRESHOLD || !ntt::supported(&f, a.len()) {
            return (m00.mul(a).add(&m01.mul(b)), m10.mul(a).add(&m11.mul(b)));
        }
        let plan = ntt::Plan::new(&f, a.len().max(b.len()));
        let (fa, fb) = (plan.fwd(&a.coeffs), plan.fwd(&b.coeffs));
        let row = |x: &UniPoly, y: &UniPoly| {
            let mut acc = plan.mul(&plan.fwd(&x.coeffs), &fa);
            plan.mul_acc(&mut acc, &plan.fwd(&y.coeffs), &fb);
            UniPoly::from_reduced(f, plan.inv(acc, plan.size()))
        };
        (row(m00, m01), row(m10, m11))
    }

    fn mul(&self, o: &Mat2) -> Mat2 {
        let f = *self.m[0].field();
        if self.max_len().min(o.max_len()) <= ntt::NTT_THRESHOLD || !ntt::supported(&f, self.max_len() + o.max_len()) {
            let [a, b, c, d] = &self.m;
            let [e, g, h, k] = &o.m;
            return Mat2 { m: [a.mul(e).add(&b.mul(h)), a.mul(g).add(&b.mul(k)), c.mul(e).add(&d.mul(h)), c.mul(g).add(&d.mul(k))] };
        }
        let plan = ntt::Plan::new(&f, self.max_len() + o.max_len() - 1);
        let s: Vec<Vec<u64>> = self.m.iter().map(|p| plan.fwd(&p.coeffs)).collect();
        let t: Vec<Vec<u64>> = o.m.iter().map(|p| plan.fwd(&p.coeffs)).collect();
        let entry = |i: usize, j: usize| {
            let mut acc = plan.mul(&s[2 * i], &t[j]);
            plan.mul_acc(&mut acc, &s[2 * i + 1], &t[2 + j]);
            UniPoly::from_reduced(f, plan.inv(acc, plan.size()))
        };
        Mat2 { m: [entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1)] }
    }

    /// Left-multiplies by the Euclid step `[[0,1],[1,-q]]`.
    fn step(&mut self, q: &UniPoly) {
        let n0 = self.m[0].sub(&q.mul(&self.m[2]));
        let n1 = self.m[1].sub(&q.mul(&self.m[3]));
        self.m.swap(0, 2);
        self.m.swap(1, 3);
        self.m[2] = n0;
        self.m[3] = n1;
    }
}

/// Half-GCD: a matrix `M` with `M·(a,b) = (c,d)` consecutive Euclidean remainders,
/// `len(c) > k ≥ len(d)` where `k = ceil(len(a)/2)`. Requires `len(a) ≥ len(b)`.
fn hgcd(a: &UniPoly, b: &UniPoly) -> Mat2 {
    let f = *a.field();
    let n = a.len();
    let k = n.div_ceil(2);
    if b.len() <= k {
        return Mat2::identity(f);
    }
    if n <= HGCD_THRESHOLD {
        let mut m = Mat2::identity(f);
        let (mut x, mut y) = (a.clone(), b.clone());
        while y.len() > k {
            let (q, r) = x.divrem_naive(&y);
            m.step(&q);
            x = y;
            y = r;
        }
        return m;
    }
    let mut m1 = hgcd(&a.shr(k), &b.shr(k));
    let (mut x, mut y) = m1.apply(a, b);
    if y.len() <= k {
        return m1;
    }
    let (q, r) = x.divrem(&y);
    m1.step(&q);
    x = y;
    y = r;
    if y.len() <= k {
        return m1;
    }
    let l = x.len() - 1;
    let j = 2 * k - l;
    let m2 = hgcd(&x.shr(j), &y.shr(j));
    m2.mul(&m1)
}

/// Least common multiple of a family (monic up to the product of leading coefficients).
pub fn lcm_many(polys: &[UniPoly]) -> UniPoly {
    let mut it = polys.iter();
    let mut l = it.next().expect("nonempty family").clone();
    for p in it {
        let g = l.gcd(p);
        l = l.mul(&p.div_assume_exact(&g));
    }
    l
}

/// Monic GCD of a family of polynomials.
pub fn gcd_many(polys: &[UniPoly]) -> UniPoly {
    let mut it = polys.iter();
    let mut g = it.next().expect("nonempty family").clone();
    for p in it {
        if g.len() == 1 {
            break;
        }
        g = g.gcd(p);
    }
    g.monic()
}
