//! Sparse multivariate polynomials over a [`Ring`].

use std::collections::BTreeMap;

use super::field::PrimeField;
use super::ring::Ring;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

pub type Exponent = Vec<u32>;

/// Sparse polynomial: exponent vector → nonzero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly<R: Ring> {
    ring: R,
    nvars: usize,
    terms: BTreeMap<Exponent, R::Elem>,
}

impl<R: Ring> MultiPoly<R> {
    pub fn zero(ring: R, nvars: usize) -> Self {
        MultiPoly { ring, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: R, nvars: usize, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(ring: R, nvars: usize) -> Self {
        let one = ring.one();
        Self::constant(ring, nvars, one)
    }

    /// The variable `x_i`.
    pub fn var(ring: R, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(ring, e)
    }

    pub fn monomial(ring: R, e: Exponent) -> Self {
        let nvars = e.len();
        let one = ring.one();
        let mut p = Self::zero(ring, nvars);
        p.add_term(e, one);
        p
    }

    /// Builds from `(exponent, coefficient)` pairs, merging duplicates.
    pub fn from_terms(ring: R, nvars: usize, terms: impl IntoIterator<Item = (Exponent, R::Elem)>) -> Result<Self> {
        let mut p = Self::zero(ring, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Precondition(format!("exponent of length {} in {nvars} variables", e.len())));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Adds `c·x^e` in place.
    pub fn add_term(&mut self, e: Exponent, c: R::Elem) {
        debug_assert_eq!(e.len(), self.nvars);
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = self.ring.add(v, &c);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &R::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[u32]) -> R::Elem {
        self.terms.get(e).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Degree in the variable `x_i`, `None` for zero.
    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), self.ring.neg(c));
        }
        r
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), self.ring.neg(c))).collect();
        MultiPoly { ring: self.ring.clone(), nvars: self.nvars, terms }
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut r = Self::zero(self.ring.clone(), self.nvars);
        for (e, v) in &self.terms {
            r.add_term(e.clone(), self.ring.mul(v, c));
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.ring.clone(), self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, self.ring.mul(c1, c2));
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(self.ring.clone(), self.nvars);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Multiplies by the monomial `x^e`.
    pub fn mul_monomial(&self, e: &[u32]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
            .collect();
        MultiPoly { ring: self.ring.clone(), nvars: self.nvars, terms }
    }

    pub fn eval(&self, x: &[R::Elem]) -> R::Elem {
        let ring = &self.ring;
        let mut acc = ring.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = ring.mul(&t, xi);
                }
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }

    /// Composition `f(images_0, …, images_{n-1})`.
    pub fn substitute(&self, images: &[MultiPoly<R>]) -> Result<Self> {
        if images.len() != self.nvars {
            return Err(Error::Precondition(format!(
                "substitute: {} images for {} variables",
                images.len(),
                self.nvars
            )));
        }
        let target = images.first().map(|g| g.nvars).unwrap_or(0);
        if images.iter().any(|g| g.nvars != target) {
            return Err(Error::Precondition("substitute: images live in different rings".into()));
        }
        let mut powers: Vec<Vec<MultiPoly<R>>> = images.iter().map(|g| vec![Self::one(self.ring.clone(), target), g.clone()]).collect();
        let mut out = Self::zero(self.ring.clone(), target);
        for (e, c) in &self.terms {
            let mut t = Self::constant(self.ring.clone(), target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k as usize]);
                }
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Largest monomial dividing every term.
    pub fn content_monomial(&self) -> Result<Exponent> {
        let mut it = self.terms.keys();
        let first = it.next().ok_or_else(|| Error::Precondition("undefined content of the zero polynomial".into()))?;
        let mut m = first.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        Ok(m)
    }

    /// Divides by the monomial `x^e`; fails if it does not divide every term.
    pub fn div_monomial(&self, e: &[u32]) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if k.iter().zip(e).any(|(a, b)| a < b) {
                return Err(Error::Computation("monomial does not divide polynomial".into()));
            }
            terms.insert(k.iter().zip(e).map(|(a, b)| a - b).collect(), c.clone());
        }
        Ok(MultiPoly { ring: self.ring.clone(), nvars: self.nvars, terms })
    }

    /// Exact division by `d` (lexicographic leading terms); `None` if `d` does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (dl, dc) = d.terms.iter().next_back()?;
        let dinv = self.ring.inv(dc)?;
        let mut r = self.clone();
        let mut q = Self::zero(self.ring.clone(), self.nvars);
        while let Some((rl, rc)) = r.terms.iter().next_back() {
            if rl.iter().zip(dl).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exponent = rl.iter().zip(dl).map(|(a, b)| a - b).collect();
            let c = self.ring.mul(rc, &dinv);
            let t = Self::from_terms(self.ring.clone(), self.nvars, [(e, c)]).ok()?;
            r = r.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }

    /// Applies `f` to every coefficient, landing in ring `to`.
    pub fn map_coeffs<S: Ring>(&self, to: S, f: impl Fn(&R::Elem) -> S::Elem) -> MultiPoly<S> {
        let mut r = MultiPoly::zero(to, self.nvars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c));
        }
        r
    }

    /// Human-readable rendering `c*x0^a*x1^b + ...`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mut s = self.ring.render(c);
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => s.push_str(&format!("*x{i}")),
                        _ => s.push_str(&format!("*x{i}^{k}")),
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

impl MultiPoly<PrimeField> {
    /// Restriction to the line `a + t·b`, as a univariate polynomial in `t`.
    pub fn restrict_to_line(&self, a: &[u64], b: &[u64]) -> UniPoly {
        let f = self.ring;
        let lin: Vec<UniPoly> = a.iter().zip(b).map(|(&x, &y)| UniPoly::linear(f, x, y)).collect();
        let mut powers: Vec<Vec<UniPoly>> = lin.iter().map(|l| vec![UniPoly::one(f), l.clone()]).collect();
        let mut out = UniPoly::zero(f);
        for (e, &c) in &self.terms {
            let mut t = UniPoly::constant(f, c);
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&lin[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k as usize]);
                }
            }
            out = out.add(&t);
        }
        out
    }
}

/// All exponent vectors of total degree `d` in `n` variables (lexicographic order).
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Exponent> {
    fn rec(n: usize, d: u32, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if cur.len() + 1 == n {
            cur.push(d);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=d {
            cur.push(k);
            rec(n, d - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ring::{BigRational, Rationals};

    fn fp() -> PrimeField {
        PrimeField::new(1_000_000_007).unwrap()
    }

    #[test]
    fn content_examples() {
        let f = fp();
        let p = MultiPoly::from_terms(f, 2, [(vec![2, 1], 1), (vec![1, 2], 1)]).unwrap();
        assert_eq!(p.content_monomial().unwrap(), vec![1, 1]);
        let p = MultiPoly::var(f, 2, 0).add(&MultiPoly::var(f, 2, 1));
        assert_eq!(p.content_monomial().unwrap(), vec![0, 0]);
        let p = MultiPoly::var(f, 1, 0).pow(3);
        assert_eq!(p.content_monomial().unwrap(), vec![3]);
        assert!(MultiPoly::zero(f, 2).content_monomial().is_err());
    }

    #[test]
    fn substitute_swap_and_hadamard() {
        let f = fp();
        let x0 = MultiPoly::var(f, 2, 0);
        let x1 = MultiPoly::var(f, 2, 1);
        let s = x0.add(&x1);
        assert_eq!(s.substitute(&[x1.clone(), x0.clone()]).unwrap(), s);
        let v: Vec<_> = (0..3).map(|i| MultiPoly::var(f, 3, i)).collect();
        let j = [v[1].mul(&v[2]), v[0].mul(&v[2]), v[0].mul(&v[1])];
        assert_eq!(v[0].substitute(&j).unwrap(), v[1].mul(&v[2]));
        assert!(v[0].substitute(&j[..2]).is_err());
    }

    #[test]
    fn exact_division_over_rationals() {
        let q = Rationals;
        let x = MultiPoly::var(q, 2, 0);
        let y = MultiPoly::var(q, 2, 1);
        let a = x.add(&y.scale(&BigRational::from((1, 2))));
        let b = x.mul(&x).sub(&y.mul(&y).scale(&BigRational::from(3)));
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(prod.add(&x).div_exact(&a).is_none());
    }

    #[test]
    fn line_restriction() {
        let f = fp();
        let p = MultiPoly::from_terms(f, 2, [(vec![2, 0], 1), (vec![0, 1], 3)]).unwrap();
        // (1+2t)^2 + 3(5+7t) = 16 + 25 t + 4 t^2
        let u = p.restrict_to_line(&[1, 5], &[2, 7]);
        assert_eq!(u, UniPoly::new(f, vec![16, 25, 4]));
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
    }
}
