//! Prime fields `F_p` with `p < 2^63`, backed by Montgomery multiplication.
//!
//! Elements are plain residues in `[0, p)`. The Montgomery form is only used
//! internally (NTT kernels, hot loops) through the `mont_*` helpers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A primitive root of unity of a given order held by a [`PrimeField`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub order: u64,
    pub omega: u64,
}

/// The prime field `Z/pZ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    modulus: u64,
    /// `-p^{-1} mod 2^64`
    ninv: u64,
    /// `2^128 mod p`
    r2: u64,
    /// `2^64 mod p`
    r1: u64,
    two_adicity: u32,
    /// primitive `2^two_adicity`-th root of unity (plain form)
    two_adic_root: u64,
    root: Option<RootOfUnity>,
}

impl Serialize for PrimeField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View {
            modulus: u64,
            root: Option<RootOfUnity>,
        }
        View { modulus: self.modulus, root: self.root }.serialize(s)
    }
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
fn mulmod_u128(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u128(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_u128(r, b, m);
        }
        b = mulmod_u128(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &MR_BASES {
        let mut x = powmod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u128(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n` by trial division (small `n` only).
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Maximum number of candidates examined by the prime searches.
pub const SEARCH_CAP: u64 = 50_000_000;

impl PrimeField {
    /// Builds the field for a prime modulus. Fails if `p` is not an odd prime below `2^63`.
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 63 || !is_prime_u64(p) {
            return Err(Error::Precondition(format!("{p} is not an odd prime below 2^63")));
        }
        // Newton iteration for p^{-1} mod 2^64.
        let mut inv: u64 = 1;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r1 = ((1u128 << 64) % p as u128) as u64;
        let r2 = mulmod_u128(r1, r1, p);
        let mut f = PrimeField {
            modulus: p,
            ninv: inv.wrapping_neg(),
            r2,
            r1,
            two_adicity: 0,
            two_adic_root: 1,
            root: None,
        };
        let s = (p - 1).trailing_zeros();
        let odd = (p - 1) >> s;
        let mut g = 2;
        loop {
            if f.pow(g, (p - 1) / 2) == p - 1 {
                break;
            }
            g += 1;
        }
        f.two_adicity = s;
        f.two_adic_root = f.pow(g, odd);
        Ok(f)
    }

    /// Builds the field together with a primitive `order`-th root of unity.
    pub fn with_root(p: u64, order: u64) -> Result<Self> {
        let mut f = Self::new(p)?;
        if order < 1 || (p - 1) % order != 0 {
            return Err(Error::Precondition(format!("{p} is not 1 mod {order}")));
        }
        let factors = prime_factors(order);
        let mut g = 2;
        while g < p {
            let w = f.pow(g, (p - 1) / order);
            if factors.iter().all(|&r| f.pow(w, order / r) != 1) {
                f.root = Some(RootOfUnity { order, omega: w });
                return Ok(f);
            }
            g += 1;
        }
        Err(Error::Precondition(format!("no primitive {order}-th root in F_{p}")))
    }

    /// Smallest prime `p ≥ 2^min_bits` with `p ≡ 1 (mod q)`, with a verified primitive `q`-th root.
    pub fn find_with_root(q: u64, min_bits: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::Precondition("q must be at least 2".into()));
        }
        Self::find_congruent(q, min_bits, 0).and_then(|p| Self::with_root(p, q))
    }

    /// The `skip`-th prime (0-based) `p ≥ max(2^min_bits, 5)` with `p ≡ 1 (mod step)`, `p < 2^63`.
    pub fn find_congruent(step: u64, min_bits: u32, skip: u64) -> Result<u64> {
        if min_bits > 62 {
            return Err(Error::Precondition("min_bits must be at most 62".into()));
        }
        let lower = (1u64 << min_bits).max(5);
        let mut k = (lower - 1).div_ceil(step);
        let mut seen = 0;
        for _ in 0..SEARCH_CAP {
            let Some(c) = k.checked_mul(step).and_then(|v| v.checked_add(1)) else { break };
            if c >= 1 << 63 {
                break;
            }
            if c >= lower && is_prime_u64(c) {
                if seen == skip {
                    return Ok(c);
                }
                seen += 1;
            }
            k += 1;
        }
        Err(Error::ResourceCap(format!("prime search for step {step} exhausted its cap")))
    }

    /// A field suited to NTT-based polynomial arithmetic with a primitive `q`-th root.
    ///
    /// The modulus lies in `[2^61, 2^62)`, is `1 mod q·2^two_adicity`; `skip` picks distinct primes.
    pub fn find_ntt_field(q: u64, two_adicity: u32, skip: u64) -> Result<Self> {
        let q = q.max(1);
        let pow2 = 1u64 << two_adicity;
        let step = q / gcd_u64(q, pow2) * pow2;
        let p = Self::find_congruent(step, 61, skip)?;
        if q >= 2 {
            Self::with_root(p, q)
        } else {
            Self::new(p)
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn root(&self) -> Option<RootOfUnity> {
        self.root
    }

    /// The stored primitive root of unity, or a precondition error.
    pub fn omega(&self) -> Result<u64> {
        self.root
            .map(|r| r.omega)
            .ok_or_else(|| Error::Precondition(format!("F_{} carries no root of unity", self.modulus)))
    }

    pub fn two_adicity(&self) -> u32 {
        self.two_adicity
    }

    /// Primitive `2^k`-th root of unity, `k ≤ two_adicity`.
    pub fn root_of_two_power(&self, k: u32) -> Option<u64> {
        if k > self.two_adicity {
            return None;
        }
        let mut w = self.two_adic_root;
        for _ in k..self.two_adicity {
            w = self.mul(w, w);
        }
        Some(w)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        s.min(s.wrapping_sub(self.modulus))
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let d = a.wrapping_sub(b);
        d.min(d.wrapping_add(self.modulus))
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub(crate) fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.ninv);
        let u = ((t + m as u128 * self.modulus as u128) >> 64) as u64;
        u.min(u.wrapping_sub(self.modulus))
    }

    /// Montgomery product `a·b·2^{-64}`.
    #[inline]
    pub(crate) fn mont_mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub(crate) fn to_mont(&self, a: u64) -> u64 {
        self.mont_mul(a, self.r2)
    }

    #[inline]
    pub(crate) fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    /// `-p^{-1} mod 2^64`, the REDC constant.
    #[inline]
    pub(crate) fn mont_ninv(&self) -> u64 {
        self.ninv
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.mont_mul(self.mont_mul(a, b), self.r2)
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut b = self.to_mont(a);
        let mut r = self.r1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mont_mul(r, b);
            }
            b = self.mont_mul(b, b);
            e >>= 1;
        }
        self.from_mont(r)
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::Computation("inverse of zero".into()));
        }
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let qt = r0 / r1;
            (r0, r1) = (r1, r0 - qt * r1);
            (s0, s1) = (s1, s0 - qt * s1);
        }
        Ok(s0.rem_euclid(self.modulus as i128) as u64)
    }

    /// Inverts every entry of `v` with one field inversion (Montgomery's batch trick).
    pub fn batch_inv(&self, v: &mut [u64]) -> Result<()> {
        let mut prefix = Vec::with_capacity(v.len());
        let mut acc = 1;
        for &x in v.iter() {
            if x == 0 {
                return Err(Error::Computation("inverse of zero".into()));
            }
            prefix.push(acc);
            acc = self.mul(acc, x);
        }
        let mut inv = self.inv(acc)?;
        for i in (0..v.len()).rev() {
            let x = v[i];
            v[i] = self.mul(inv, prefix[i]);
            inv = self.mul(inv, x);
        }
        Ok(())
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        (a as i128).rem_euclid(self.modulus as i128) as u64
    }

    pub fn from_u64(&self, a: u64) -> u64 {
        a % self.modulus
    }

    /// Symmetric lift to `(-p/2, p/2]`.
    pub fn to_signed(&self, a: u64) -> i128 {
        if a > self.modulus / 2 {
            a as i128 - self.modulus as i128
        } else {
            a as i128
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.modulus)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_primes_are_classified() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(3215031751)); // strong pseudoprime to 2,3,5,7
    }

    #[test]
    fn montgomery_matches_u128_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [31u64, 1_000_000_007, (1 << 61) - 1, 9_223_372_036_854_775_783] {
            let f = PrimeField::new(p).unwrap();
            for _ in 0..2000 {
                let a = f.random(&mut rng);
                let b = f.random(&mut rng);
                assert_eq!(f.mul(a, b), mulmod_u128(a, b, p));
                assert_eq!(f.pow(a, 5), powmod_u128(a, 5, p));
            }
        }
    }

    #[test]
    fn q5_root_in_f31() {
        let f = PrimeField::find_with_root(5, 4).unwrap();
        assert_eq!(f.modulus(), 31);
        let w = f.omega().unwrap();
        assert_eq!(f.pow(w, 5), 1);
        assert_ne!(w, 1);
        assert!(PrimeField::with_root(31, 5).is_ok());
        assert_eq!(f.pow(2, 5), 1);
    }

    #[test]
    fn q2_root_is_minus_one() {
        let f = PrimeField::find_with_root(2, 2).unwrap();
        assert_eq!(f.modulus(), 5);
        assert_eq!(f.omega().unwrap(), f.modulus() - 1);
    }

    #[test]
    fn q7_root_above_2_20() {
        let f = PrimeField::find_with_root(7, 20).unwrap();
        let p = f.modulus();
        assert!(p > 1 << 20 && p % 7 == 1);
        let w = f.omega().unwrap();
        assert_eq!(f.pow(w, 7), 1);
        assert_ne!(w, 1);
    }

    #[test]
    fn ntt_field_has_both_roots() {
        let f = PrimeField::find_ntt_field(9, 24, 3).unwrap();
        assert!(f.modulus() >= 1 << 61 && f.modulus() < 1 << 62);
        assert!(f.two_adicity() >= 24);
        let w = f.root_of_two_power(24).unwrap();
        assert_eq!(f.pow(w, 1 << 24), 1);
        assert_ne!(f.pow(w, 1 << 23), 1);
        let o = f.omega().unwrap();
        assert_eq!(f.pow(o, 9), 1);
        assert_ne!(f.pow(o, 3), 1);
        let g = PrimeField::find_ntt_field(9, 24, 4).unwrap();
        assert_ne!(f.modulus(), g.modulus());
    }

    #[test]
    fn batch_inverse() {
        let f = PrimeField::new(1_000_000_007).unwrap();
        let mut v = vec![1, 2, 3, 999, 123456];
        let orig = v.clone();
        f.batch_inv(&mut v).unwrap();
        for (a, b) in orig.iter().zip(&v) {
            assert_eq!(f.mul(*a, *b), 1);
        }
        assert!(f.batch_inv(&mut [1, 0]).is_err());
    }
}
