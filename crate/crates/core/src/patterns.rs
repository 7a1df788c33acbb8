//! Matrix patterns (partitions of the q×q entries into classes), admissibility
//! under the matrix inverse, and the structures specific to cyclic symmetric
//! matrices: the eigenvalue matrix `C` and the distinguished singular points.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{FpMatrix, PrimeField};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    General,
    Symmetric,
    Cyclic,
    CyclicSymmetric,
    Custom,
}

impl PatternKind {
    /// Short tag used on the command line and in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            PatternKind::General => "g",
            PatternKind::Symmetric => "s",
            PatternKind::Cyclic => "c",
            PatternKind::CyclicSymmetric => "cs",
            PatternKind::Custom => "custom",
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PatternKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g" | "general" => Ok(PatternKind::General),
            "s" | "symmetric" => Ok(PatternKind::Symmetric),
            "c" | "cyclic" => Ok(PatternKind::Cyclic),
            "cs" | "cyclic_symmetric" | "cyclicsymmetric" => Ok(PatternKind::CyclicSymmetric),
            "custom" => Ok(PatternKind::Custom),
            other => Err(Error::Precondition(format!("unknown pattern kind '{other}'"))),
        }
    }
}

/// A partition of the cells of a q×q matrix into `p` classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pattern {
    q: usize,
    kind: PatternKind,
    /// row-major class index of every cell
    classes: Vec<usize>,
    #[serde(skip)]
    p: usize,
}

#[derive(Deserialize)]
struct PatternWire {
    q: usize,
    kind: PatternKind,
    classes: Vec<usize>,
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PatternWire::deserialize(d)?;
        Pattern::from_classes(w.q, w.kind, w.classes).map_err(serde::de::Error::custom)
    }
}

impl Pattern {
    /// One of the four fundamental patterns.
    pub fn build(q: usize, kind: PatternKind) -> Result<Self> {
        if q < 3 {
            return Err(Error::Precondition(format!("pattern size q={q} must be at least 3")));
        }
        let mut classes = vec![0; q * q];
        match kind {
            PatternKind::General => {
                for (c, v) in classes.iter_mut().enumerate() {
                    *v = c;
                }
            }
            PatternKind::Symmetric => {
                let mut idx = vec![vec![0; q]; q];
                let mut next = 0;
                for i in 0..q {
                    for j in i..q {
                        idx[i][j] = next;
                        idx[j][i] = next;
                        next += 1;
                    }
                }
                for i in 0..q {
                    for j in 0..q {
                        classes[i * q + j] = idx[i][j];
                    }
                }
            }
            PatternKind::Cyclic => {
                for i in 0..q {
                    for j in 0..q {
                        classes[i * q + j] = (j + q - i) % q;
                    }
                }
            }
            PatternKind::CyclicSymmetric => {
                for i in 0..q {
                    for j in 0..q {
                        let k = (j + q - i) % q;
                        classes[i * q + j] = k.min(q - k);
                    }
                }
            }
            PatternKind::Custom => {
                return Err(Error::Precondition("custom patterns are built with Pattern::from_classes".into()))
            }
        }
        Self::from_classes(q, kind, classes)
    }

    /// Validates an explicit class assignment (row-major).
    pub fn from_classes(q: usize, kind: PatternKind, classes: Vec<usize>) -> Result<Self> {
        if q < 2 || classes.len() != q * q {
            return Err(Error::Precondition(format!("expected {} cells for q={q}, got {}", q * q, classes.len())));
        }
        let p = classes.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; p];
        for &c in &classes {
            seen[c] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Precondition("class indices are not onto [0, p)".into()));
        }
        let pat = Pattern { q, kind, classes, p };
        let ok = match kind {
            PatternKind::Symmetric => pat.is_symmetric(),
            PatternKind::Cyclic => pat.is_cyclic(),
            PatternKind::CyclicSymmetric => pat.is_symmetric() && pat.is_cyclic(),
            _ => true,
        };
        if !ok {
            return Err(Error::Precondition(format!("classes inconsistent with kind {kind}")));
        }
        Ok(pat)
    }

    fn is_symmetric(&self) -> bool {
        (0..self.q).all(|i| (0..self.q).all(|j| self.class(i, j) == self.class(j, i)))
    }

    fn is_cyclic(&self) -> bool {
        let q = self.q;
        (0..q).all(|i| (0..q).all(|j| self.class(i, j) == self.class((i + 1) % q, (j + 1) % q)))
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    /// Number of classes (homogeneous coordinates).
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    #[inline]
    pub fn class(&self, i: usize, j: usize) -> usize {
        self.classes[i * self.q + j]
    }

    /// First cell (row-major) of every class.
    pub fn representatives(&self) -> Vec<(usize, usize)> {
        let mut reps = vec![None; self.p];
        for i in 0..self.q {
            for j in 0..self.q {
                let c = self.class(i, j);
                if reps[c].is_none() {
                    reps[c] = Some((i, j));
                }
            }
        }
        reps.into_iter().map(|r| r.expect("surjective classes")).collect()
    }

    /// The q×q matrix of a class vector.
    pub fn expand<T: Clone>(&self, x: &[T]) -> Vec<T> {
        self.classes.iter().map(|&c| x[c].clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pattern serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Monte-Carlo admissibility: the adjugate of random pattern matrices over a
    /// large prime field must again be constant on classes.
    pub fn check_admissible<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> bool {
        let f = PrimeField::find_congruent(1, 61, rng.gen_range(0..64))
            .and_then(PrimeField::new)
            .expect("61-bit prime");
        let q = self.q;
        let mut done = 0;
        let mut attempts = 0;
        while done < trials && attempts < 10 * trials + 10 {
            attempts += 1;
            let x: Vec<u64> = (0..self.p).map(|_| f.random(rng)).collect();
            let m = FpMatrix { n: q, a: self.expand(&x) };
            let Some(adj) = m.adjugate(&f) else { continue };
            let mut val = vec![None; self.p];
            for i in 0..q {
                for j in 0..q {
                    let c = self.class(i, j);
                    let v = adj.get(i, j);
                    match val[c] {
                        None => val[c] = Some(v),
                        Some(w) if w != v => return false,
                        _ => {}
                    }
                }
            }
            done += 1;
        }
        done == trials
    }
}

/// Number of classes of a cyclic symmetric q×q pattern.
pub fn cs_classes(q: usize) -> usize {
    q / 2 + 1
}

/// The p×p eigenvalue matrix of cyclic symmetric matrices: `X = C·x` lists the
/// distinct eigenvalues of the matrix with class vector `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CMatrix {
    pub q: usize,
    pub field: PrimeField,
    pub m: FpMatrix,
}

impl CMatrix {
    /// Builds `C` for a cyclic symmetric pattern; the field must hold a primitive q-th root.
    pub fn build(pat: &Pattern, field: PrimeField) -> Result<Self> {
        if pat.kind() != PatternKind::CyclicSymmetric {
            return Err(Error::Precondition("the C matrix is defined for cyclic symmetric patterns".into()));
        }
        let q = pat.q();
        let root = field.root().filter(|r| r.order == q as u64).ok_or_else(|| {
            Error::Precondition(format!("field F_{} lacks a primitive {q}-th root of unity", field.modulus()))
        })?;
        let w = root.omega;
        let p = pat.p();
        let winv = field.inv(w)?;
        let mut m = FpMatrix::zeros(p);
        for r in 0..p {
            for s in 0..p {
                let v = if s == 0 {
                    1
                } else if q % 2 == 0 && s == p - 1 {
                    if r % 2 == 0 {
                        1
                    } else {
                        field.neg(1)
                    }
                } else {
                    let e = (r * s) as u64;
                    field.add(field.pow(w, e), field.pow(winv, e))
                };
                m.set(r, s, v);
            }
        }
        let c = CMatrix { q, field, m };
        if !c.squares_to_q() {
            return Err(Error::Computation("C^2 != q Id".into()));
        }
        Ok(c)
    }

    pub fn p(&self) -> usize {
        self.m.n
    }

    /// Checks `C² = q·Id` exactly.
    pub fn squares_to_q(&self) -> bool {
        let sq = self.m.mul(&self.field, &self.m);
        sq == FpMatrix::identity(self.p()).scale(&self.field, self.field.from_u64(self.q as u64))
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.m.mul_vec(&self.field, x)
    }

    /// `C⁻¹ = C/q`.
    pub fn apply_inverse(&self, x: &[u64]) -> Vec<u64> {
        let qi = self.field.inv(self.field.from_u64(self.q as u64)).expect("q invertible");
        self.apply(x).into_iter().map(|v| self.field.mul(v, qi)).collect()
    }
}

/// A point with small integer coordinates, normalized (gcd 1, first nonzero positive).
pub type IntPoint = Vec<i64>;

/// Distinguished singular varieties of a cyclic symmetric pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularPointSet {
    pub p: usize,
    /// `P_k`: the coordinate points
    pub points_p: Vec<IntPoint>,
    /// `Q_k = C·P_k` (projectively `C⁻¹P_k`), in field coordinates
    pub points_q: Vec<Vec<u64>>,
    /// `(s, R)` with `R = I(P_s)` for `s = 1..p-1` when `I(P_s)` has small integer coordinates
    pub points_r: Vec<(usize, Option<IntPoint>)>,
    /// indices `k` of the hyperplanes `Π_k = {x_k = 0}`
    pub hyperplanes: Vec<usize>,
}

/// Lifts a projective field point to small integers, if it has a representative
/// with entries of absolute value ≤ `bound`.
pub fn lift_small(field: &PrimeField, x: &[u64], bound: i64) -> Option<IntPoint> {
    let k = x.iter().position(|&v| v != 0)?;
    // try scalings making the first nonzero coordinate 1..=bound
    for lead in 1..=bound {
        let s = field.mul(field.from_i64(lead), field.inv(x[k]).ok()?);
        let y: Vec<i128> = x.iter().map(|&v| field.to_signed(field.mul(v, s))).collect();
        if y.iter().all(|v| v.abs() <= bound as i128) {
            let mut out: Vec<i64> = y.into_iter().map(|v| v as i64).collect();
            let g = out.iter().fold(0i64, |g, &v| gcd_i64(g, v.abs()));
            for v in out.iter_mut() {
                *v /= g;
            }
            return Some(out);
        }
    }
    None
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd_i64(b, a % b)
    }
}

/// Hadamard inverse of a class vector in polynomial form: component k is `∏_{j≠k} x_j`.
pub fn hadamard_point(field: &PrimeField, x: &[u64]) -> Vec<u64> {
    let n = x.len();
    let mut prefix = vec![1u64; n + 1];
    for i in 0..n {
        prefix[i + 1] = field.mul(prefix[i], x[i]);
    }
    let mut out = vec![0u64; n];
    let mut suffix = 1u64;
    for i in (0..n).rev() {
        out[i] = field.mul(prefix[i], suffix);
        suffix = field.mul(suffix, x[i]);
    }
    out
}

impl SingularPointSet {
    pub fn build(c: &CMatrix) -> Self {
        let p = c.p();
        let f = &c.field;
        let points_p: Vec<IntPoint> = (0..p)
            .map(|k| {
                let mut v = vec![0; p];
                v[k] = 1;
                v
            })
            .collect();
        let points_q: Vec<Vec<u64>> = (0..p).map(|k| (0..p).map(|r| c.m.get(r, k)).collect()).collect();
        let points_r = (1..p)
            .map(|s| {
                // I(P_s) = C⁻¹ J(C P_s)
                let y = hadamard_point(f, &points_q[s]);
                let r = if y.iter().all(|&v| v == 0) { None } else { lift_small(f, &c.apply(&y), 64) };
                (s, r)
            })
            .collect();
        SingularPointSet { p, points_p, points_q, points_r, hyperplanes: (0..p).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn class_counts() {
        assert_eq!(Pattern::build(5, PatternKind::CyclicSymmetric).unwrap().p(), 3);
        assert_eq!(Pattern::build(6, PatternKind::CyclicSymmetric).unwrap().p(), 4);
        assert_eq!(Pattern::build(4, PatternKind::Cyclic).unwrap().p(), 4);
        assert_eq!(Pattern::build(4, PatternKind::General).unwrap().p(), 16);
        assert_eq!(Pattern::build(4, PatternKind::Symmetric).unwrap().p(), 10);
        assert!(Pattern::build(2, PatternKind::General).is_err());
        assert!(Pattern::build(4, PatternKind::Custom).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = Pattern::build(5, PatternKind::CyclicSymmetric).unwrap();
        let s = p.to_json();
        assert!(s.contains("\"kind\":\"cyclic_symmetric\""));
        assert_eq!(Pattern::from_json(&s).unwrap(), p);
        assert!(Pattern::from_json(r#"{"q":2,"kind":"custom","classes":[0,2,2,2]}"#).is_err());
    }

    #[test]
    fn row_zero_equal_is_not_admissible() {
        let mut classes = vec![0, 0, 0];
        classes.extend(1..7);
        let pat = Pattern::from_classes(3, PatternKind::Custom, classes).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(!pat.check_admissible(3, &mut rng));
        let cs = Pattern::build(7, PatternKind::CyclicSymmetric).unwrap();
        assert!(cs.check_admissible(3, &mut rng));
    }

    #[test]
    fn c_matrix_q5_over_f31() {
        let f = PrimeField::with_root(31, 5).unwrap();
        let pat = Pattern::build(5, PatternKind::CyclicSymmetric).unwrap();
        let c = CMatrix::build(&pat, f).unwrap();
        assert_eq!((0..3).map(|s| c.m.get(0, s)).collect::<Vec<_>>(), vec![1, 2, 2]);
        assert!(c.squares_to_q());
    }
}
