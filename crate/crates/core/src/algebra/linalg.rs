//! Small dense linear algebra over a prime field (row-major square matrices).

use super::field::PrimeField;

/// Dense `n×n` matrix over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    pub n: usize,
    pub a: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(n: usize) -> Self {
        FpMatrix { n, a: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, f: &PrimeField, o: &FpMatrix) -> FpMatrix {
        let n = self.n;
        let mut r = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = f.add(r.get(i, j), f.mul(x, o.get(k, j)));
                    r.set(i, j, v);
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, f: &PrimeField, v: &[u64]) -> Vec<u64> {
        (0..self.n).map(|i| (0..self.n).fold(0, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j])))).collect()
    }

    pub fn scale(&self, f: &PrimeField, c: u64) -> FpMatrix {
        FpMatrix { n: self.n, a: self.a.iter().map(|&x| f.mul(x, c)).collect() }
    }

    /// Determinant and inverse by Gauss-Jordan; inverse is `None` when singular.
    pub fn det_inverse(&self, f: &PrimeField) -> (u64, Option<FpMatrix>) {
        let n = self.n;
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        let mut det = 1u64;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| m.get(r, c) != 0) else { return (0, None) };
            if piv != c {
                for j in 0..n {
                    m.a.swap(piv * n + j, c * n + j);
                    inv.a.swap(piv * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pv = m.get(c, c);
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("nonzero pivot");
            for j in 0..n {
                m.set(c, j, f.mul(m.get(c, j), pinv));
                inv.set(c, j, f.mul(inv.get(c, j), pinv));
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let factor = m.get(r, c);
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    m.set(r, j, f.sub(m.get(r, j), f.mul(factor, m.get(c, j))));
                    inv.set(r, j, f.sub(inv.get(r, j), f.mul(factor, inv.get(c, j))));
                }
            }
        }
        (det, Some(inv))
    }

    /// Adjugate (transposed cofactor matrix) of an invertible matrix, `None` if singular.
    pub fn adjugate(&self, f: &PrimeField) -> Option<FpMatrix> {
        let (det, inv) = self.det_inverse(f);
        inv.map(|m| m.scale(f, det))
    }
}

/// Solves `A x = b` for square nonsingular `A`; `None` if singular.
pub fn solve(f: &PrimeField, a: &FpMatrix, b: &[u64]) -> Option<Vec<u64>> {
    let (_, inv) = a.det_inverse(f);
    inv.map(|m| m.mul_vec(f, b))
}

/// Coefficients of the polynomial of degree `< xs.len()` interpolating `(xs, ys)` (Newton form).
pub fn interpolate(f: &PrimeField, xs: &[u64], ys: &[u64]) -> Vec<u64> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            let num = f.sub(dd[i], dd[i - 1]);
            let den = f.sub(xs[i], xs[i - k]);
            dd[i] = f.mul(num, f.inv(den).expect("distinct nodes"));
        }
    }
    let mut coeffs = vec![0u64; n];
    for k in (0..n).rev() {
        // coeffs <- coeffs·(t - xs[k]) + dd[k]
        let mut next = vec![0u64; n];
        for i in 0..n {
            if coeffs[i] == 0 {
                continue;
            }
            if i + 1 < n {
                next[i + 1] = f.add(next[i + 1], coeffs[i]);
            }
            next[i] = f.sub(next[i], f.mul(coeffs[i], xs[k]));
        }
        next[0] = f.add(next[0], dd[k]);
        coeffs = next;
    }
    coeffs
}

/// Coefficients of the polynomial of degree `< ys.len()` taking value `ys[i]` at `start + i`.
///
/// Equally spaced nodes make every divided-difference denominator a small integer,
/// so only `ys.len()` inversions are needed.
pub fn interpolate_consecutive(f: &PrimeField, start: u64, ys: &[u64]) -> Vec<u64> {
    let n = ys.len();
    if n == 0 {
        return Vec::new();
    }
    let mut invs: Vec<u64> = (1..n as u64).map(|k| f.from_u64(k)).collect();
    f.batch_inv(&mut invs).expect("node spacing invertible");
    let mut dd = ys.to_vec();
    for k in 1..n {
        let ik = invs[k - 1];
        for i in (k..n).rev() {
            dd[i] = f.mul(f.sub(dd[i], dd[i - 1]), ik);
        }
    }
    let mut coeffs = vec![0u64; n];
    coeffs[0] = dd[n - 1];
    let mut len = 1;
    for k in (0..n - 1).rev() {
        // coeffs <- coeffs·(t - x_k) + dd[k]
        let xk = f.from_u64(start.wrapping_add(k as u64));
        coeffs[len] = 0;
        for i in (1..=len).rev() {
            coeffs[i] = f.sub(coeffs[i - 1], f.mul(coeffs[i], xk));
        }
        coeffs[0] = f.sub(dd[k], f.mul(coeffs[0], xk));
        len += 1;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjugate_of_2x2() {
        let f = PrimeField::new(101).unwrap();
        let m = FpMatrix { n: 2, a: vec![1, 2, 3, 4] };
        let adj = m.adjugate(&f).unwrap();
        assert_eq!(adj.a, vec![4, f.from_i64(-2), f.from_i64(-3), 1]);
        let (det, _) = m.det_inverse(&f);
        assert_eq!(det, f.from_i64(-2));
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let f = PrimeField::new(1_000_000_007).unwrap();
        let poly = [5u64, 0, 3, 7];
        let xs: Vec<u64> = (1..=4).collect();
        let ys: Vec<u64> = xs.iter().map(|&x| poly.iter().rev().fold(0, |a, &c| f.add(f.mul(a, x), c))).collect();
        assert_eq!(interpolate(&f, &xs, &ys), poly.to_vec());
        let ys: Vec<u64> = (0..4).map(|i| ys_at(&f, &poly, 10 + i)).collect();
        assert_eq!(interpolate_consecutive(&f, 10, &ys), poly.to_vec());
    }

    fn ys_at(f: &PrimeField, poly: &[u64], x: u64) -> u64 {
        poly.iter().rev().fold(0, |a, &c| f.add(f.mul(a, x), c))
    }
}
