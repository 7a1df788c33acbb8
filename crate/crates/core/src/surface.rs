//! Images of a generic hyperplane under alternating `I`, `J` for cyclic symmetric
//! patterns, with the monomial content removed at every step.
//!
//! A surface `S_n` is held as an evaluation chain: `S_0` is a linear form and
//! `S_n(y) = S_{n-1}(B_n(y)) / F_n(y)^{e_n}` where `B_n` is `J` or `I = C·J·C`
//! (up to the scalar `q`) and `F_n` is the frame in which `B_n` is a Hadamard
//! inverse (`y` for `J`, `C·y` for `I`). Degrees and exponents are read off
//! univariate restrictions, which are recovered by interpolation with one spare
//! node that must agree.
//!
//! `u_n` is the content removed when `S_n` is pulled back by the next map and
//! `v_n` the content of `S_n` pulled back by the map that produced it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::interpolate_consecutive;
use crate::algebra::PrimeField;
use crate::degree_line::{DegreeRecord, Granularity};
use crate::error::{Error, Result};
use crate::patterns::{hadamard_point, CMatrix, Pattern, PatternKind};

/// One of the two elementary involutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Involution {
    I,
    J,
}

impl Involution {
    /// The map producing `S_n` from `S_{n-1}`: `I` for odd `n`, `J` for even `n`.
    pub fn producing(n: usize) -> Involution {
        if n % 2 == 1 {
            Involution::I
        } else {
            Involution::J
        }
    }
}

/// Content exponents per step `n` and class `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentRecord {
    pub q: usize,
    pub p: usize,
    /// `u[n][i]`: content of `S_n` under the next map
    pub u: Vec<Vec<u64>>,
    /// `v[n][i]`: content of `S_n` under the map that produced it (`v[0] = 0`)
    pub v: Vec<Vec<u64>>,
}

impl ExponentRecord {
    /// Exponents of the coordinate monomials (`J` steps), `α_n`.
    pub fn alpha(&self, n: usize) -> &[u64] {
        if n % 2 == 1 {
            &self.u[n]
        } else {
            &self.v[n]
        }
    }

    /// Exponents of the linear forms `X = C·x` (`I` steps), `β_n`.
    pub fn beta(&self, n: usize) -> &[u64] {
        if n % 2 == 1 {
            &self.v[n]
        } else {
            &self.u[n]
        }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// A surface sequence under construction.
#[derive(Clone, Debug)]
pub struct SurfaceChain {
    field: PrimeField,
    c: CMatrix,
    hyperplane: Vec<u64>,
    /// `(B_n, e_n)` for `n = 1, 2, …`
    steps: Vec<(Involution, Vec<u64>)>,
}

/// Nodes tried before a restriction is declared degenerate.
const NODE_RETRIES: usize = 4;

impl SurfaceChain {
    pub fn new(c: CMatrix, hyperplane: Vec<u64>) -> Self {
        SurfaceChain { field: c.field, c, hyperplane, steps: Vec::new() }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn p(&self) -> usize {
        self.c.p()
    }

    /// Index of the last surface.
    pub fn top(&self) -> usize {
        self.steps.len()
    }

    pub fn push(&mut self, map: Involution, content: Vec<u64>) {
        self.steps.push((map, content));
    }

    /// Coordinates in which `map` is a Hadamard inverse.
    pub fn frame(&self, map: Involution, y: &[u64]) -> Vec<u64> {
        match map {
            Involution::J => y.to_vec(),
            Involution::I => self.c.apply(y),
        }
    }

    /// The polynomial map `J` or `C·J·C` (degree `p−1`).
    pub fn apply(&self, map: Involution, y: &[u64]) -> Vec<u64> {
        match map {
            Involution::J => hadamard_point(&self.field, y),
            Involution::I => self.c.apply(&hadamard_point(&self.field, &self.c.apply(y))),
        }
    }

    /// `S_n(y)`, or `None` when the chain divides by zero at `y`.
    pub fn eval(&self, n: usize, y: &[u64]) -> Option<u64> {
        let f = &self.field;
        let mut y = y.to_vec();
        let mut den = 1u64;
        for (map, e) in self.steps[..n].iter().rev() {
            let fr = self.frame(*map, &y);
            for (&x, &k) in fr.iter().zip(e) {
                if k > 0 {
                    den = f.mul(den, f.pow(x, k));
                }
            }
            y = self.apply(*map, &y);
        }
        let num = self.hyperplane.iter().zip(&y).fold(0, |acc, (&h, &x)| f.add(acc, f.mul(h, x)));
        let inv = f.inv(den).ok()?;
        Some(f.mul(num, inv))
    }

    /// Coefficients of `ε ↦ g(c + ε·a)` for a function of degree at most `bound` along the
    /// line; the spare node must agree with the interpolant.
    fn restrict<R: Rng + ?Sized, G: Fn(&[u64]) -> Option<u64>>(
        &self,
        g: G,
        c: &[u64],
        a: &[u64],
        bound: u64,
        rng: &mut R,
    ) -> Result<Vec<u64>> {
        let f = &self.field;
        let n = bound as usize + 2;
        'retry: for _ in 0..NODE_RETRIES {
            let start = rng.gen_range(1..1u64 << 40);
            let mut ys = Vec::with_capacity(n);
            for k in 0..n as u64 {
                let e = f.from_u64(start + k);
                let pt: Vec<u64> = c.iter().zip(a).map(|(&ci, &ai)| f.add(ci, f.mul(e, ai))).collect();
                match g(&pt) {
                    Some(v) => ys.push(v),
                    None => continue 'retry,
                }
            }
            let mut coeffs = interpolate_consecutive(f, start, &ys);
            if coeffs[n - 1] != 0 {
                return Err(Error::Computation(format!("restriction exceeds the degree bound {bound}")));
            }
            while coeffs.last() == Some(&0) {
                coeffs.pop();
            }
            return Ok(coeffs);
        }
        Err(Error::Computation("restriction hit the indeterminacy locus at every node set".into()))
    }

    /// Degree of `S_n` read on a random line, given an a-priori bound.
    pub fn degree<R: Rng + ?Sized>(&self, n: usize, bound: u64, rng: &mut R) -> Result<u64> {
        let p = self.p();
        let a: Vec<u64> = (0..p).map(|_| self.field.random_nonzero(rng)).collect();
        let b: Vec<u64> = (0..p).map(|_| self.field.random_nonzero(rng)).collect();
        let coeffs = self.restrict(|y| self.eval(n, y), &a, &b, bound, rng)?;
        if coeffs.is_empty() {
            return Err(Error::Computation(format!("S_{n} vanishes on a generic line")));
        }
        Ok(coeffs.len() as u64 - 1)
    }

    /// A random point on the frame hyperplane `F(y)_i = 0` of `map`.
    fn frame_point<R: Rng + ?Sized>(&self, map: Involution, i: usize, rng: &mut R) -> Vec<u64> {
        let p = self.p();
        let mut y: Vec<u64> = (0..p).map(|_| self.field.random_nonzero(rng)).collect();
        y[i] = 0;
        match map {
            Involution::J => y,
            // C·(C·y) = q·y vanishes in coordinate i
            Involution::I => self.c.apply(&y),
        }
    }

    /// Vanishing order of `y ↦ S_n(B(y))` along `F_B(y)_i = 0`; `pullback = None` gives
    /// the order of `S_n` itself. `bound` limits the degree of the restricted function.
    pub fn order_along<R: Rng + ?Sized>(
        &self,
        n: usize,
        pullback: Option<Involution>,
        frame: Involution,
        i: usize,
        bound: u64,
        rng: &mut R,
    ) -> Result<u64> {
        let c = self.frame_point(frame, i, rng);
        let a: Vec<u64> = (0..self.p()).map(|_| self.field.random_nonzero(rng)).collect();
        let g = |y: &[u64]| match pullback {
            Some(m) => self.eval(n, &self.apply(m, y)),
            None => self.eval(n, y),
        };
        let coeffs = self.restrict(g, &c, &a, bound, rng)?;
        coeffs
            .iter()
            .position(|&x| x != 0)
            .map(|k| k as u64)
            .ok_or_else(|| Error::Computation(format!("S_{n} vanishes identically on a frame hyperplane")))
    }

    /// Content exponents of `S_n ∘ B` in the frame of `B`.
    pub fn content<R: Rng + ?Sized>(&self, n: usize, map: Involution, d_n: u64, rng: &mut R) -> Result<Vec<u64>> {
        let bound = (self.p() as u64 - 1) * d_n;
        (0..self.p()).map(|i| self.order_along(n, Some(map), map, i, bound, rng)).collect()
    }
}

/// Field of the surface computations: a large prime `≡ 1 (mod q)`.
pub fn surface_field(q: usize, seed: u64) -> Result<PrimeField> {
    let p = PrimeField::find_congruent(q as u64, 61, seed % 64)?;
    PrimeField::with_root(p, q as u64)
}

/// Options of a propagation; skipping the content removal is a negative control.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PropagateOptions {
    pub skip_content_removal: bool,
}

/// Result of a propagation, keeping the chain for further checks.
#[derive(Clone, Debug)]
pub struct Propagation {
    pub degrees: DegreeRecord,
    pub exponents: ExponentRecord,
    pub chain: SurfaceChain,
}

const HYPERPLANE_RETRIES: usize = 3;

/// Pushes a random hyperplane through `I, J, I, …` up to `S_{n_max}`.
pub fn propagate(pat: &Pattern, n_max: usize, seed: u64) -> Result<(DegreeRecord, ExponentRecord)> {
    propagate_with(pat, n_max, seed, PropagateOptions::default()).map(|r| (r.degrees, r.exponents))
}

pub fn propagate_with(pat: &Pattern, n_max: usize, seed: u64, opts: PropagateOptions) -> Result<Propagation> {
    if pat.kind() != PatternKind::CyclicSymmetric {
        return Err(Error::Precondition("surface propagation needs a cyclic symmetric pattern".into()));
    }
    let field = surface_field(pat.q(), seed)?;
    let c = CMatrix::build(pat, field)?;
    let p = pat.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..HYPERPLANE_RETRIES {
        let h: Vec<u64> = (0..p).map(|_| field.random_nonzero(&mut rng)).collect();
        let mut chain = SurfaceChain::new(c.clone(), h);
        let u0 = chain.content(0, Involution::producing(1), 1, &mut rng)?;
        if u0.iter().any(|&e| e != 0) {
            continue;
        }
        let mut d = vec![1u64];
        let mut u = vec![u0];
        let mut v = vec![vec![0u64; p]];
        for n in 1..=n_max {
            let map = Involution::producing(n);
            let removed = if opts.skip_content_removal { vec![0; p] } else { u[n - 1].clone() };
            chain.push(map, removed);
            let dn = chain.degree(n, (p as u64 - 1) * d[n - 1], &mut rng)?;
            d.push(dn);
            v.push(chain.content(n, map, dn, &mut rng)?);
            u.push(chain.content(n, Involution::producing(n + 1), dn, &mut rng)?);
        }
        let degrees = DegreeRecord {
            pattern: pat.kind(),
            q: pat.q(),
            granularity: Granularity::HalfStep,
            values: d,
            method: "surface".into(),
            flags: vec![],
        };
        let exponents = ExponentRecord { q: pat.q(), p, u, v };
        return Ok(Propagation { degrees, exponents, chain });
    }
    Err(Error::Computation("initial hyperplane singular after retries".into()))
}

/// Outcome of the factorization checks at one step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaStep {
    pub n: usize,
    pub map: Involution,
    /// `S_n` has no factor among the frame coordinates of the map that produced it
    pub content_free: bool,
    /// restriction to a line is a polynomial of the recorded degree
    pub degree_ok: bool,
    /// `S_n(B(y)) = const · F_B(y)^{v_n} · S_{n-1}(y)` at random points
    pub pullback_ok: bool,
    /// frame coordinates still dividing `S_n`, with their orders
    pub residual: Vec<(usize, u64)>,
}

impl LemmaStep {
    pub fn passed(&self) -> bool {
        self.content_free && self.degree_ok && self.pullback_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub q: usize,
    pub steps: Vec<LemmaStep>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.steps.iter().all(LemmaStep::passed)
    }

    pub fn first_failure(&self) -> Option<&LemmaStep> {
        self.steps.iter().find(|s| !s.passed())
    }
}

/// Points used for the pullback identity.
const PULLBACK_POINTS: usize = 4;

/// Checks the factorization at every step `1..=n_max`.
pub fn verify_lemma(pat: &Pattern, n_max: usize, seed: u64) -> Result<LemmaReport> {
    verify_lemma_with(pat, n_max, seed, PropagateOptions::default())
}

pub fn verify_lemma_with(pat: &Pattern, n_max: usize, seed: u64, opts: PropagateOptions) -> Result<LemmaReport> {
    let prop = propagate_with(pat, n_max, seed, opts)?;
    let chain = &prop.chain;
    let f = chain.field;
    let d = &prop.degrees.values;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5bd1_e995);
    let mut steps = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let map = Involution::producing(n);
        let mut residual = Vec::new();
        for i in 0..chain.p() {
            let k = chain.order_along(n, None, map, i, d[n], &mut rng)?;
            if k > 0 {
                residual.push((i, k));
            }
        }
        let degree_ok = chain.degree(n, d[n], &mut rng)? == d[n];
        let v = &prop.exponents.v[n];
        let mut ratio = None;
        let mut pullback_ok = true;
        for _ in 0..PULLBACK_POINTS {
            let y: Vec<u64> = (0..chain.p()).map(|_| f.random_nonzero(&mut rng)).collect();
            let (Some(lhs), Some(prev)) = (chain.eval(n, &chain.apply(map, &y)), chain.eval(n - 1, &y)) else {
                continue;
            };
            let fr = chain.frame(map, &y);
            let mono = fr.iter().zip(v).fold(1, |acc, (&x, &k)| f.mul(acc, f.pow(x, k)));
            let rhs = f.mul(mono, prev);
            let Ok(rinv) = f.inv(rhs) else { continue };
            let r = f.mul(lhs, rinv);
            match ratio {
                None => ratio = Some(r),
                Some(r0) => pullback_ok &= r0 == r,
            }
        }
        pullback_ok &= ratio.is_some();
        steps.push(LemmaStep { n, map, content_free: residual.is_empty(), degree_ok, pullback_ok, residual });
    }
    Ok(LemmaReport { q: pat.q(), steps })
}

/// Outcome of the singularity-structure relations for prime `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityReport {
    /// `u_n^0 = v_{n-1}^0`
    pub u0_matches_v0: bool,
    /// `u_n^s = v_{n-3}^s` for `s ≥ 1` (`v` taken as zero before `n = 0`)
    pub us_matches_vs: bool,
    /// `u_n^s` independent of `s = 1..p-1`
    pub classes_equal: bool,
    /// human-readable violations
    pub violations: Vec<String>,
}

impl MultiplicityReport {
    pub fn passed(&self) -> bool {
        self.u0_matches_v0 && self.us_matches_vs && self.classes_equal
    }
}

pub fn verify_multiplicity_relations(rec: &ExponentRecord) -> MultiplicityReport {
    let mut violations = Vec::new();
    let zero = vec![0u64; rec.p];
    let v_at = |k: isize| if k < 0 { &zero } else { &rec.v[k as usize] };
    let (mut a, mut b, mut c) = (true, true, true);
    for n in 1..rec.len() {
        if rec.u[n][0] != v_at(n as isize - 1)[0] {
            a = false;
            violations.push(format!("u_{n}^0 = {} but v_{}^0 = {}", rec.u[n][0], n - 1, v_at(n as isize - 1)[0]));
        }
        for s in 1..rec.p {
            let vs = v_at(n as isize - 3)[s];
            if rec.u[n][s] != vs {
                b = false;
                violations.push(format!("u_{n}^{s} = {} but v_{}^{s} = {vs}", rec.u[n][s], n as isize - 3));
            }
            if rec.u[n][s] != rec.u[n][1] {
                c = false;
                violations.push(format!("u_{n}^{s} = {} differs from u_{n}^1 = {}", rec.u[n][s], rec.u[n][1]));
            }
        }
    }
    MultiplicityReport { u0_matches_v0: a, us_matches_vs: b, classes_equal: c, violations }
}

/// Balance identities linking degrees and exponents; returns the violated ones.
pub fn balance_violations(d: &[u64], rec: &ExponentRecord) -> Vec<String> {
    let p = rec.p as i128;
    let mut out = Vec::new();
    let sum = |row: &[u64]| row.iter().map(|&x| x as i128).sum::<i128>();
    for n in 1..d.len().min(rec.len()) {
        let expect = (p - 1) * d[n - 1] as i128 - sum(&rec.u[n - 1]);
        if d[n] as i128 != expect {
            out.push(format!("d_{n} = {} but (p-1)d_{} - Σu_{} = {expect}", d[n], n - 1, n - 1));
        }
        for i in 0..rec.p {
            let v = (p - 2) * d[n - 1] as i128 + rec.u[n - 1][i] as i128 - sum(&rec.u[n - 1]);
            if rec.v[n][i] as i128 != v {
                out.push(format!("v_{n}^{i} = {} but the involution balance gives {v}", rec.v[n][i]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(q: usize) -> Pattern {
        Pattern::build(q, PatternKind::CyclicSymmetric).unwrap()
    }

    #[test]
    fn q5_initial_rows() {
        let (d, e) = propagate(&cs(5), 4, 3).unwrap();
        assert_eq!(d.values, vec![1, 2, 4, 7, 12]);
        let rows: Vec<(u64, u64, u64)> = (0..5).map(|n| (d.values[n], e.u[n][0], e.u[n][1])).collect();
        assert_eq!(rows, vec![(1, 0, 0), (2, 0, 0), (4, 1, 0), (7, 2, 0), (12, 4, 1)]);
        assert!(balance_violations(&d.values, &e).is_empty());
    }

    #[test]
    fn chain_matches_hadamard_pullback() {
        let pat = cs(5);
        let f = surface_field(5, 0).unwrap();
        let c = CMatrix::build(&pat, f).unwrap();
        let mut chain = SurfaceChain::new(c, vec![1, 2, 3]);
        chain.push(Involution::I, vec![0; 3]);
        // S_1(y) = h · C·J(C·y)
        let y = vec![5, 7, 11];
        let img = chain.apply(Involution::I, &y);
        let expect = (0..3).fold(0, |acc, i| f.add(acc, f.mul([1, 2, 3][i], img[i])));
        assert_eq!(chain.eval(1, &y), Some(expect));
    }

    #[test]
    fn skipped_content_is_detected() {
        let rep = verify_lemma_with(&cs(5), 4, 1, PropagateOptions { skip_content_removal: true }).unwrap();
        let bad = rep.first_failure().unwrap();
        assert_eq!(bad.n, 3);
        assert_eq!(bad.map, Involution::I);
        assert!(!bad.residual.is_empty());
    }
}
