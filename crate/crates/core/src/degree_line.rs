//! Degrees of the iterates of `K = I∘J` restricted to a generic line.
//!
//! A line `a + t·b` is pushed through `J, I, J, I, …` as a tuple of univariate
//! polynomials over a prime field; after every elementary map the tuple is
//! reduced to coprime components and its degree recorded.
//!
//! `J` is applied as `y_k = L / x_k` with `L = lcm(x_0, …, x_{p-1})`, which is
//! the Hadamard inverse `∏_{j≠k} x_j` with its common factor already removed.
//! For cyclic symmetric patterns `I = C⁻¹∘J∘C`, so the same kernel serves `I`
//! after a change of frame. Other patterns evaluate the adjugate pointwise and
//! interpolate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::unipoly::{gcd_many, lcm_many};
use crate::algebra::{linalg, FpMatrix, PrimeField, UniPoly};
use crate::error::{Error, Result};
use crate::patterns::{CMatrix, Pattern, PatternKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    /// one entry per elementary involution
    HalfStep,
    /// one entry per application of `K`
    FullStep,
}

/// A degree sequence `d_0, d_1, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub pattern: PatternKind,
    pub q: usize,
    pub granularity: Granularity,
    pub values: Vec<u64>,
    pub method: String,
    /// indices where independent trials disagreed
    #[serde(default)]
    pub flags: Vec<usize>,
}

impl DegreeRecord {
    /// The full-step view (even entries of a half-step record).
    pub fn full_step(&self) -> DegreeRecord {
        match self.granularity {
            Granularity::FullStep => self.clone(),
            Granularity::HalfStep => DegreeRecord {
                pattern: self.pattern,
                q: self.q,
                granularity: Granularity::FullStep,
                values: self.values.iter().step_by(2).copied().collect(),
                method: self.method.clone(),
                flags: self.flags.iter().filter(|&&n| n % 2 == 0).map(|n| n / 2).collect(),
            },
        }
    }
}

/// The line `a + t·b` in class coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericLine {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

impl GenericLine {
    /// Random non-degenerate line with all coordinates nonzero.
    pub fn random<R: Rng + ?Sized>(f: &PrimeField, p: usize, rng: &mut R) -> Self {
        loop {
            let a: Vec<u64> = (0..p).map(|_| f.random_nonzero(rng)).collect();
            let b: Vec<u64> = (0..p).map(|_| f.random_nonzero(rng)).collect();
            // reject proportional a, b
            let r = f.mul(b[0], f.inv(a[0]).expect("nonzero"));
            if a.iter().zip(&b).any(|(&x, &y)| f.mul(x, r) != y) {
                return GenericLine { a, b };
            }
        }
    }

    pub fn components(&self, f: &PrimeField) -> Vec<UniPoly> {
        self.a.iter().zip(&self.b).map(|(&x, &y)| UniPoly::linear(*f, x, y)).collect()
    }
}

/// Tuple degree: maximum component degree.
pub fn tuple_degree(v: &[UniPoly]) -> u64 {
    v.iter().filter_map(|u| u.degree()).max().unwrap_or(0) as u64
}

/// Reduced Hadamard inverse `(L/x_k)_k`; `None` when a component vanishes.
pub fn reduced_hadamard(v: &[UniPoly]) -> Option<Vec<UniPoly>> {
    if v.iter().any(|u| u.is_zero()) {
        return None;
    }
    let l = lcm_many(v);
    Some(v.iter().map(|x| l.div_assume_exact(x)).collect())
}

/// `w_r = Σ_s m[r][s] v_s`.
pub fn linear_change(f: &PrimeField, m: &FpMatrix, v: &[UniPoly]) -> Vec<UniPoly> {
    (0..m.n)
        .map(|r| {
            let mut acc = UniPoly::zero(*f);
            for (s, x) in v.iter().enumerate() {
                let c = m.get(r, s);
                if c != 0 {
                    acc.add_scaled(x, c);
                }
            }
            acc
        })
        .collect()
}

/// Divides out the common factor of the tuple.
pub fn reduce_tuple(v: Vec<UniPoly>) -> Vec<UniPoly> {
    let g = gcd_many(&v);
    if g.degree().unwrap_or(0) == 0 {
        return v;
    }
    v.iter().map(|x| x.div_assume_exact(&g)).collect()
}

/// Matrix inverse of the pattern matrix along the curve, by evaluation of the
/// numeric adjugate at enough points and interpolation.
fn adjugate_on_curve(pat: &Pattern, f: &PrimeField, v: &[UniPoly]) -> Option<Vec<UniPoly>> {
    let q = pat.q();
    let deg = tuple_degree(v) as usize;
    let npts = (q - 1) * deg + 1;
    let reps = pat.representatives();
    let mut xs = Vec::with_capacity(npts);
    let mut ys: Vec<Vec<u64>> = vec![Vec::with_capacity(npts); pat.p()];
    let mut t = 1u64;
    while xs.len() < npts {
        t += 1;
        let vals: Vec<u64> = v.iter().map(|u| u.eval(t)).collect();
        let m = FpMatrix { n: q, a: pat.expand(&vals) };
        // a singular sample point gives a valid adjugate only through cofactors; skip it
        let Some(adj) = m.adjugate(f) else { continue };
        xs.push(t);
        for (k, &(i, j)) in reps.iter().enumerate() {
            ys[k].push(adj.get(i, j));
        }
        if t > 16 * npts as u64 + 64 {
            return None;
        }
    }
    Some(ys.iter().map(|y| UniPoly::from_reduced(*f, linalg::interpolate(f, &xs, y))).collect())
}

/// Per-trial context for one prime field.
pub struct LineRun {
    pub field: PrimeField,
    pattern: Pattern,
    cmat: Option<CMatrix>,
}

impl LineRun {
    pub fn new(pattern: &Pattern, field: PrimeField) -> Result<Self> {
        let cmat = if pattern.kind() == PatternKind::CyclicSymmetric { Some(CMatrix::build(pattern, field)?) } else { None };
        Ok(LineRun { field, pattern: pattern.clone(), cmat })
    }

    /// Applies `J` (`which = 'J'`) or `I` to a reduced tuple.
    pub fn step(&self, which: char, v: &[UniPoly]) -> Option<Vec<UniPoly>> {
        match which {
            'J' => reduced_hadamard(v),
            _ => match &self.cmat {
                Some(c) => {
                    let big_x = linear_change(&self.field, &c.m, v);
                    let y = reduced_hadamard(&big_x)?;
                    Some(linear_change(&self.field, &c.m, &y))
                }
                None => adjugate_on_curve(&self.pattern, &self.field, v).map(reduce_tuple),
            },
        }
    }

    /// Half-step degrees `d_0..d_{2 n_max}` along the line (`J` first).
    /// Returns the degrees reached before a degeneracy, and its index if any.
    pub fn run(&self, line: &GenericLine, n_max: usize) -> (Vec<u64>, Option<usize>) {
        let mut v = line.components(&self.field);
        let mut degs = vec![tuple_degree(&v)];
        for h in 1..=2 * n_max {
            let which = if h % 2 == 1 { 'J' } else { 'I' };
            match self.step(which, &v) {
                Some(w) if w.iter().any(|u| !u.is_zero()) => {
                    v = w;
                    degs.push(tuple_degree(&v));
                }
                _ => return (degs, Some(h)),
            }
        }
        (degs, None)
    }
}

/// 2-adicity requested from line-degree fields (NTT lengths up to `2^28`).
pub const LINE_TWO_ADICITY: u32 = 28;

/// Field for trial `trial` under `seed`: a distinct NTT-friendly prime.
pub fn trial_field(pat: &Pattern, seed: u64, trial: usize) -> Result<PrimeField> {
    let order = if pat.kind() == PatternKind::CyclicSymmetric { pat.q() as u64 } else { 1 };
    let skip = (seed % 97) * 4 + trial as u64;
    PrimeField::find_ntt_field(order, LINE_TWO_ADICITY, skip)
}

/// Half-step degree record, pointwise maximum over `trials` independent runs.
pub fn line_degrees(pat: &Pattern, n_max: usize, trials: usize, seed: u64) -> Result<DegreeRecord> {
    if n_max < 1 || trials < 1 {
        return Err(Error::Precondition("n_max and trials must be at least 1".into()));
    }
    let mut records = Vec::with_capacity(trials);
    let mut first_failure = None;
    for trial in 0..trials {
        let field = trial_field(pat, seed, trial)?;
        let run = LineRun::new(pat, field)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial as u64 + 1)));
        let line = GenericLine::random(&field, pat.p(), &mut rng);
        let (degs, fail) = run.run(&line, n_max);
        match fail {
            None => records.push(DegreeRecord {
                pattern: pat.kind(),
                q: pat.q(),
                granularity: Granularity::HalfStep,
                values: degs,
                method: "line".into(),
                flags: vec![],
            }),
            Some(n) => first_failure = Some(first_failure.map_or(n, |m: usize| m.min(n))),
        }
    }
    if records.is_empty() {
        return Err(Error::Computation(format!(
            "all trials degenerate; first vanishing image at half-step {}",
            first_failure.unwrap_or(0)
        )));
    }
    degree_consensus(&records)
}

/// Pointwise maximum of records, flagging indices where they disagree.
pub fn degree_consensus(records: &[DegreeRecord]) -> Result<DegreeRecord> {
    let first = records.first().ok_or_else(|| Error::Precondition("no degree records to merge".into()))?;
    if records.iter().any(|r| r.granularity != first.granularity || r.q != first.q || r.pattern != first.pattern) {
        return Err(Error::Precondition("records differ in granularity, pattern or q".into()));
    }
    let len = records.iter().map(|r| r.values.len()).min().unwrap_or(0);
    let mut values = Vec::with_capacity(len);
    let mut flags: Vec<usize> = records.iter().flat_map(|r| r.flags.iter().copied()).filter(|&n| n < len).collect();
    for n in 0..len {
        let max = records.iter().map(|r| r.values[n]).max().unwrap_or(0);
        if records.iter().any(|r| r.values[n] != max) {
            flags.push(n);
        }
        values.push(max);
    }
    flags.sort_unstable();
    flags.dedup();
    Ok(DegreeRecord { pattern: first.pattern, q: first.q, granularity: first.granularity, values, method: first.method.clone(), flags })
}
