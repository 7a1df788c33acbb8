//! Radix-2 number-theoretic transform over a [`PrimeField`] with enough 2-adicity.
//!
//! Data stays in plain form; twiddles are stored in Montgomery form so a single
//! REDC per butterfly yields plain results. Butterflies reduce lazily into `[0, 2p)`. Twiddle tables are cached per modulus:
//! the stage-`h` slice `tw[h..2h]` holds powers of a primitive `2h`-th root and does
//! not depend on the transform size.

use std::cell::RefCell;
use std::rc::Rc;

use super::field::PrimeField;

/// Below this product length, schoolbook multiplication is used.
pub const NTT_THRESHOLD: usize = 48;

struct Twiddles {
    fwd: Vec<u64>,
    inv: Vec<u64>,
}

thread_local! {
    static TABLES: RefCell<Vec<(u64, Rc<Twiddles>)>> = const { RefCell::new(Vec::new()) };
}

fn build_twiddles(f: &PrimeField, n: usize) -> Twiddles {
    let n = n.max(2);
    let mut fwd = vec![0u64; n];
    let mut inv = vec![0u64; n];
    let mut h = 1usize;
    let mut lg = 1;
    while h < n {
        let w = f.root_of_two_power(lg).expect("field lacks 2-adic roots for this size");
        let wi = f.inv(w).expect("nonzero root");
        let (mut x, mut y) = (1u64, 1u64);
        for j in 0..h {
            fwd[h + j] = x;
            inv[h + j] = y;
            x = f.mul(x, w);
            y = f.mul(y, wi);
        }
        h <<= 1;
        lg += 1;
    }
    let fwd = fwd.into_iter().map(|w| f.to_mont(w)).collect();
    let inv = inv.into_iter().map(|w| f.to_mont(w)).collect();
    Twiddles { fwd, inv }
}

fn twiddles(f: &PrimeField, n: usize) -> Rc<Twiddles> {
    TABLES.with(|t| {
        let mut t = t.borrow_mut();
        if let Some((_, tw)) = t.iter().find(|(m, tw)| *m == f.modulus() && tw.fwd.len() >= n) {
            return tw.clone();
        }
        let tw = Rc::new(build_twiddles(f, n));
        t.retain(|(m, _)| *m != f.modulus());
        if t.len() >= 8 {
            t.remove(0);
        }
        t.push((f.modulus(), tw.clone()));
        tw
    })
}

/// Montgomery product `x·w·2^{-64} mod p` up to one extra `p`; needs `x·w < 4p²` and `p < 2^62`.
#[inline(always)]
fn mul_lazy(x: u64, w: u64, p: u64, ninv: u64) -> u64 {
    let t = x as u128 * w as u128;
    let m = (t as u64).wrapping_mul(ninv);
    ((t + m as u128 * p as u128) >> 64) as u64
}

/// Decimation-in-frequency transform; input in `[0, p)`, output in `[0, 2p)`, bit-reversed order.
fn forward(f: &PrimeField, a: &mut [u64], tw: &Twiddles) {
    let p = f.modulus();
    let p2 = 2 * p;
    let ninv = f.mont_ninv();
    let n = a.len();
    let mut h = n / 2;
    while h >= 1 {
        let t = &tw.fwd[h..2 * h];
        for chunk in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for j in 0..h {
                let u = lo[j];
                let v = hi[j];
                let s = u + v;
                lo[j] = s.min(s.wrapping_sub(p2));
                hi[j] = mul_lazy(u + p2 - v, t[j], p, ninv);
            }
        }
        h /= 2;
    }
}

/// Decimation-in-time inverse (unscaled); input in `[0, p)`, output in `[0, 2p)`.
fn inverse(f: &PrimeField, a: &mut [u64], tw: &Twiddles) {
    let p = f.modulus();
    let p2 = 2 * p;
    let ninv = f.mont_ninv();
    let n = a.len();
    let mut h = 1;
    while h < n {
        let t = &tw.inv[h..2 * h];
        for chunk in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for j in 0..h {
                let u = lo[j];
                let v = mul_lazy(hi[j], t[j], p, ninv);
                let s = u + v;
                let d = u + p2 - v;
                lo[j] = s.min(s.wrapping_sub(p2));
                hi[j] = d.min(d.wrapping_sub(p2));
            }
        }
        h <<= 1;
    }
}

/// Whether [`Plan`] supports products of length `len` over `f`.
pub(crate) fn supported(f: &PrimeField, len: usize) -> bool {
    f.modulus() < 1 << 62 && len.max(2).next_power_of_two().trailing_zeros() <= f.two_adicity()
}

pub(crate) fn naive_mul(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let xm = f.to_mont(x);
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mont_mul(xm, y));
        }
    }
    out
}

/// Transforms of a fixed power-of-two size; products of transformed vectors are
/// computed modulo `t^n - 1`.
pub(crate) struct Plan {
    f: PrimeField,
    n: usize,
    tw: Rc<Twiddles>,
}

impl Plan {
    /// Smallest plan of size at least `min_len`.
    pub(crate) fn new(f: &PrimeField, min_len: usize) -> Plan {
        let n = min_len.max(2).next_power_of_two();
        Plan { f: *f, n, tw: twiddles(f, n) }
    }

    pub(crate) fn size(&self) -> usize {
        self.n
    }

    /// Forward transform of `a` reduced modulo `t^n - 1`.
    pub(crate) fn fwd(&self, a: &[u64]) -> Vec<u64> {
        let mut v = vec![0u64; self.n];
        for (i, chunk) in a.chunks(self.n).enumerate() {
            if i == 0 {
                v[..chunk.len()].copy_from_slice(chunk);
            } else {
                for (x, &y) in v.iter_mut().zip(chunk) {
                    *x = self.f.add(*x, y);
                }
            }
        }
        forward(&self.f, &mut v, &self.tw);
        v
    }

    /// Pointwise product (carries a factor `2^{-64}` removed by [`Plan::inv`]).
    pub(crate) fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.f.mont_mul(x, y)).collect()
    }

    /// `acc += a·b` pointwise.
    pub(crate) fn mul_acc(&self, acc: &mut [u64], a: &[u64], b: &[u64]) {
        for ((z, &x), &y) in acc.iter_mut().zip(a).zip(b) {
            *z = self.f.add(*z, self.f.mont_mul(x, y));
        }
    }

    /// Inverse transform of a sum of pointwise products, truncated to `len` coefficients.
    pub(crate) fn inv(&self, mut v: Vec<u64>, len: usize) -> Vec<u64> {
        let f = &self.f;
        inverse(f, &mut v, &self.tw);
        let ninv = f.inv(self.n as u64 % f.modulus()).expect("n invertible");
        let scale = f.to_mont(f.to_mont(ninv));
        v.truncate(len.min(self.n));
        for x in v.iter_mut() {
            *x = f.mont_mul(*x, scale);
        }
        v
    }
}

/// Full product of two coefficient slices (lowest degree first).
pub fn multiply(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= NTT_THRESHOLD || !supported(f, len) {
        return naive_mul(f, a, b);
    }
    cyclic_multiply(f, a, b, len, len)
}

/// Low `out_len` coefficients of `a·b mod (t^n - 1)` for the smallest `n ≥ min_size`.
pub(crate) fn cyclic_multiply(f: &PrimeField, a: &[u64], b: &[u64], min_size: usize, out_len: usize) -> Vec<u64> {
    let plan = Plan::new(f, min_size);
    let fa = plan.fwd(a);
    let prod = if std::ptr::eq(a, b) {
        plan.mul(&fa, &fa)
    } else {
        let fb = plan.fwd(b);
        plan.mul(&fa, &fb)
    };
    plan.inv(prod, out_len)
}

/// Maximum product length supported by [`multiply`] for this field.
pub fn max_len(f: &PrimeField) -> usize {
    1usize << f.two_adicity().min(40)
}
