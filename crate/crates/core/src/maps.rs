//! The involutions `J` (Hadamard inverse) and `I` (matrix inverse up to a
//! factor) as homogeneous polynomial maps on the class coordinates, point
//! evaluation, and the orbit analysis of distinguished singular varieties.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;

use crate::algebra::multipoly::monomials_of_degree;
use crate::algebra::unipoly::gcd_many;
use crate::algebra::{linalg, FpMatrix, MultiPoly, PrimeField, Ring, UniPoly};
use crate::error::{Error, Result};
use crate::patterns::{hadamard_point, lift_small, CMatrix, Pattern, PatternKind, SingularPointSet};

/// A homogeneous polynomial map on the class coordinates of a pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap<R: Ring> {
    pub components: Vec<MultiPoly<R>>,
    pub pattern: Pattern,
}

impl<R: Ring> PolyMap<R> {
    pub fn degree(&self) -> u32 {
        self.components.iter().filter_map(|c| c.total_degree()).max().unwrap_or(0)
    }

    /// Componentwise evaluation; all-zero images are reported as indeterminate.
    pub fn evaluate(&self, x: &[R::Elem]) -> Result<Vec<R::Elem>> {
        if x.len() != self.components.len() {
            return Err(Error::Precondition(format!("point has {} coordinates, map has {}", x.len(), self.components.len())));
        }
        let ring = self.components[0].ring();
        let y: Vec<R::Elem> = self.components.iter().map(|c| c.eval(x)).collect();
        if y.iter().all(|v| ring.is_zero(v)) {
            return Err(Error::Indeterminate { point: x.iter().map(|v| ring.render(v)).collect() });
        }
        Ok(y)
    }

    /// The composition `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap<R>) -> Result<PolyMap<R>> {
        let components = self.components.iter().map(|c| c.substitute(&inner.components)).collect::<Result<_>>()?;
        Ok(PolyMap { components, pattern: self.pattern.clone() })
    }
}

/// `J`: component k is `∏_{j≠k} x_j`.
pub fn hadamard_map<R: Ring>(pat: &Pattern, ring: R) -> PolyMap<R> {
    let p = pat.p();
    let components = (0..p)
        .map(|k| {
            let mut e = vec![1; p];
            e[k] = 0;
            MultiPoly::monomial(ring.clone(), e)
        })
        .collect();
    PolyMap { components, pattern: pat.clone() }
}

/// `κ_J = ∏ x_i^{p-2}`, the factor in `J∘J = κ_J·id`.
pub fn kappa_j<R: Ring>(ring: R, p: usize) -> MultiPoly<R> {
    MultiPoly::monomial(ring, vec![(p as u32).saturating_sub(2); p])
}

/// Determinant of the symbolic matrix restricted to `rows` (ascending) by
/// Laplace expansion along the first row, memoized on the column mask.
fn symbolic_minor(
    entries: &[MultiPoly<PrimeField>],
    q: usize,
    rows: &[usize],
    mask: u32,
    memo: &mut HashMap<u32, MultiPoly<PrimeField>>,
) -> MultiPoly<PrimeField> {
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let f = *entries[0].ring();
    let nv = entries[0].nvars();
    let depth = q - 1 - mask.count_ones() as usize;
    let r = rows[depth];
    let mut acc = MultiPoly::zero(f, nv);
    if mask.count_ones() == 1 {
        let c = mask.trailing_zeros() as usize;
        acc = entries[r * q + c].clone();
    } else {
        let mut sign_pos = 0;
        for c in 0..q {
            if mask & (1 << c) == 0 {
                continue;
            }
            let sub = symbolic_minor(entries, q, rows, mask & !(1 << c), memo);
            let term = entries[r * q + c].mul(&sub);
            acc = if sign_pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            sign_pos += 1;
        }
    }
    memo.insert(mask, acc.clone());
    acc
}

/// `I`: adjugate of the symbolic pattern matrix, one representative entry per
/// class, divided by the polynomial content of the components.
pub fn inverse_map<R: Rng + ?Sized>(pat: &Pattern, field: PrimeField, rng: &mut R) -> Result<PolyMap<PrimeField>> {
    let q = pat.q();
    let p = pat.p();
    if q > 31 {
        return Err(Error::Precondition("symbolic adjugate limited to q ≤ 31".into()));
    }
    let entries: Vec<MultiPoly<PrimeField>> = pat.classes().iter().map(|&c| MultiPoly::var(field, p, c)).collect();
    let full: u32 = (1u32 << q) - 1;
    let mut memos: HashMap<usize, HashMap<u32, MultiPoly<PrimeField>>> = HashMap::new();
    let mut adj_entry = |i: usize, j: usize| -> MultiPoly<PrimeField> {
        // adj(i,j) = (-1)^{i+j} det(M without row j and column i)
        let rows: Vec<usize> = (0..q).filter(|&r| r != j).collect();
        let memo = memos.entry(j).or_default();
        let m = symbolic_minor(&entries, q, &rows, full & !(1 << i), memo);
        if (i + j) % 2 == 0 {
            m
        } else {
            m.neg()
        }
    };
    let reps = pat.representatives();
    let mut components: Vec<MultiPoly<PrimeField>> = reps.iter().map(|&(i, j)| adj_entry(i, j)).collect();
    // admissibility: other cells must agree with the representative
    let x: Vec<u64> = (0..p).map(|_| field.random(rng)).collect();
    let num = FpMatrix { n: q, a: pat.expand(&x) };
    if let Some(adj) = num.adjugate(&field) {
        for i in 0..q {
            for j in 0..q {
                if adj.get(i, j) != components[pat.class(i, j)].eval(&x) {
                    return Err(Error::Precondition(format!("pattern not admissible: cofactor ({i},{j}) leaves its class")));
                }
            }
        }
    }
    let g = polynomial_content(&components, rng)?;
    if g.total_degree().unwrap_or(0) > 0 {
        components = components
            .iter()
            .map(|c| c.div_exact(&g).ok_or_else(|| Error::Computation("content does not divide a component".into())))
            .collect::<Result<_>>()?;
    }
    Ok(PolyMap { components, pattern: pat.clone() })
}

/// Polynomial GCD of homogeneous components over `F_p`, by restriction to random
/// lines through a fixed direction `b`: the monic GCD of `F_i(x + t b)` is
/// `G(x + t b)/G(b)`, whose value at `t = 0` interpolates `G` up to scale.
pub fn polynomial_content<R: Rng + ?Sized>(components: &[MultiPoly<PrimeField>], rng: &mut R) -> Result<MultiPoly<PrimeField>> {
    let f = *components[0].ring();
    let p = components[0].nvars();
    let rand_vec = |rng: &mut R| -> Vec<u64> { (0..p).map(|_| f.random(rng)).collect() };
    let b = rand_vec(rng);
    let gcd_at = |x: &[u64]| gcd_many(&components.iter().map(|c| c.restrict_to_line(x, &b)).collect::<Vec<_>>());
    let a0 = rand_vec(rng);
    let dg = gcd_at(&a0).degree().unwrap_or(0) as u32;
    if dg == 0 {
        return Ok(MultiPoly::one(f, p));
    }
    let monos = monomials_of_degree(p, dg);
    let n = monos.len();
    let extra = 3;
    let mut rows = Vec::with_capacity(n + extra);
    let mut vals = Vec::with_capacity(n + extra);
    for _ in 0..n + extra {
        let x = rand_vec(rng);
        let h = gcd_at(&x);
        if h.degree() != Some(dg as usize) {
            return Err(Error::Computation("unstable content degree on random lines".into()));
        }
        vals.push(h.coeff(0));
        rows.push(monos.iter().map(|e| e.iter().zip(&x).fold(1, |acc, (&k, &xi)| f.mul(acc, f.pow(xi, k as u64)))).collect::<Vec<u64>>());
    }
    let mut a = FpMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, rows[i][j]);
        }
    }
    let sol = linalg::solve(&f, &a, &vals[..n]).ok_or_else(|| Error::Computation("singular interpolation system".into()))?;
    for k in n..n + extra {
        let v = rows[k].iter().zip(&sol).fold(0, |acc, (&r, &s)| f.add(acc, f.mul(r, s)));
        if v != vals[k] {
            return Err(Error::Computation("content interpolation failed verification".into()));
        }
    }
    MultiPoly::from_terms(f, p, monos.into_iter().zip(sol))
}

/// Scales a field point so its first nonzero coordinate is 1.
pub fn normalize_fp(f: &PrimeField, x: &[u64]) -> Vec<u64> {
    match x.iter().find(|&&v| v != 0) {
        None => x.to_vec(),
        Some(&lead) => {
            let inv = f.inv(lead).expect("nonzero");
            x.iter().map(|&v| f.mul(v, inv)).collect()
        }
    }
}

/// Projective equality over a field.
pub fn proj_eq_fp(f: &PrimeField, a: &[u64], b: &[u64]) -> bool {
    a.len() == b.len() && a.iter().any(|&v| v != 0) && normalize_fp(f, a) == normalize_fp(f, b)
}

/// `I` for cyclic symmetric patterns through the eigenvalue frame: `C⁻¹ J(C x)`.
pub fn inverse_point_cs(c: &CMatrix, x: &[u64]) -> Vec<u64> {
    c.apply_inverse(&hadamard_point(&c.field, &c.apply(x)))
}

/// How a variety is transformed by one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrow {
    /// image of lower dimension (hyperplane onto a point)
    BlowDown,
    /// image of the same dimension
    Regular,
    /// indeterminate point whose limits sweep out a positive-dimensional variety
    BlowUp,
}

/// A variety tracked by the orbit analysis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Variety {
    /// `Π_k = {x_k = 0}`
    Hyperplane { k: usize },
    /// A point, labelled when it is one of the distinguished points.
    Point { label: String, coords: Option<Vec<i64>> },
    /// Linear span of the limit points of a blow-up, with the coordinates vanishing on it.
    Linear { dim: usize, zero_coords: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitStep {
    pub map: char,
    pub arrow: Arrow,
    pub image: Variety,
    /// for blow-ups: coordinates vanishing at the indeterminate point (the coordinate
    /// subspace `Π_{i,j,..}` containing it)
    pub singular_locus: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub q: usize,
    pub start: Variety,
    pub steps: Vec<OrbitStep>,
}

/// Start varieties accepted by [`orbit_report`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitStart {
    Hyperplane(usize),
    P(usize),
    Q(usize),
    /// `R_s = I(P_s)`
    R(usize),
}

fn apply_series(c: &CMatrix, which: char, v: &[UniPoly]) -> Vec<UniPoly> {
    let f = c.field;
    let had = |v: &[UniPoly]| -> Vec<UniPoly> {
        (0..v.len())
            .map(|k| v.iter().enumerate().filter(|&(j, _)| j != k).fold(UniPoly::one(f), |acc, (_, x)| acc.mul(x)))
            .collect()
    };
    let lin = |v: &[UniPoly]| -> Vec<UniPoly> {
        (0..v.len())
            .map(|r| {
                let mut acc = UniPoly::zero(f);
                for (s, x) in v.iter().enumerate() {
                    acc.add_scaled(x, c.m.get(r, s));
                }
                acc
            })
            .collect()
    };
    match which {
        'J' => had(v),
        _ => lin(&had(&lin(v))),
    }
}

fn apply_point(c: &CMatrix, which: char, x: &[u64]) -> Vec<u64> {
    match which {
        'J' => hadamard_point(&c.field, x),
        _ => inverse_point_cs(c, x),
    }
}

fn label_point(c: &CMatrix, sp: &SingularPointSet, x: &[u64]) -> Variety {
    let f = &c.field;
    let p = c.p();
    let coords = lift_small(f, x, 64);
    for k in 0..p {
        let mut e = vec![0u64; p];
        e[k] = 1;
        if proj_eq_fp(f, x, &e) {
            return Variety::Point { label: format!("P_{k}"), coords };
        }
    }
    for (s, _) in &sp.points_r {
        let r = inverse_point_cs(c, &{
            let mut e = vec![0u64; p];
            e[*s] = 1;
            e
        });
        if proj_eq_fp(f, x, &r) {
            return Variety::Point { label: format!("R_{s}"), coords };
        }
    }
    for k in 0..p {
        if proj_eq_fp(f, x, &sp.points_q[k]) {
            return Variety::Point { label: format!("Q_{k}"), coords };
        }
    }
    Variety::Point { label: "other".into(), coords }
}

/// Rank of a set of vectors over the field.
fn rank(f: &PrimeField, vs: &[Vec<u64>]) -> usize {
    let mut rows: Vec<Vec<u64>> = vs.to_vec();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, piv);
        let inv = f.inv(rows[r][col]).expect("nonzero");
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let fac = f.mul(rows[i][col], inv);
                for j in 0..ncols {
                    let v = f.sub(rows[i][j], f.mul(fac, rows[r][j]));
                    rows[i][j] = v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Applies `J, I, J, …` to a distinguished variety of a cyclic symmetric
/// pattern, classifying each step, until a blow-up or `max_steps`.
pub fn orbit_report<R: Rng + ?Sized>(pat: &Pattern, start: OrbitStart, max_steps: usize, rng: &mut R) -> Result<OrbitReport> {
    if pat.kind() != PatternKind::CyclicSymmetric {
        return Err(Error::Precondition("orbit analysis is defined for cyclic symmetric patterns".into()));
    }
    let q = pat.q();
    let p = pat.p();
    let field = PrimeField::find_ntt_field(q as u64, 8, 0)?;
    let f = field;
    let c = CMatrix::build(pat, field)?;
    let sp = SingularPointSet::build(&c);
    let unit = |k: usize| -> Vec<u64> {
        let mut e = vec![0u64; p];
        e[k] = 1;
        e
    };
    // current state: either a generic hyperplane or a point
    let mut hyper: Option<usize> = None;
    let mut point: Vec<u64> = Vec::new();
    let start_var = match start {
        OrbitStart::Hyperplane(k) if k < p => {
            hyper = Some(k);
            Variety::Hyperplane { k }
        }
        OrbitStart::P(k) if k < p => {
            point = unit(k);
            label_point(&c, &sp, &point)
        }
        OrbitStart::Q(k) if k < p => {
            point = sp.points_q[k].clone();
            label_point(&c, &sp, &point)
        }
        OrbitStart::R(s) if s >= 1 && s < p => {
            point = inverse_point_cs(&c, &unit(s));
            label_point(&c, &sp, &point)
        }
        _ => return Err(Error::Precondition(format!("unsupported start variety {start:?}"))),
    };
    let mut steps = Vec::new();
    for step in 0..max_steps {
        let which = if step % 2 == 0 { 'J' } else { 'I' };
        if let Some(k) = hyper.take() {
            let images: Vec<Vec<u64>> = (0..4)
                .map(|_| {
                    let mut x: Vec<u64> = (0..p).map(|_| f.random_nonzero(rng)).collect();
                    x[k] = 0;
                    normalize_fp(&f, &apply_point(&c, which, &x))
                })
                .collect();
            if images.iter().all(|y| y == &images[0]) && images[0].iter().any(|&v| v != 0) {
                point = images[0].clone();
                steps.push(OrbitStep { map: which, arrow: Arrow::BlowDown, image: label_point(&c, &sp, &point), singular_locus: None });
                continue;
            }
            steps.push(OrbitStep { map: which, arrow: Arrow::Regular, image: Variety::Linear { dim: p - 1, zero_coords: vec![] }, singular_locus: None });
            break;
        }
        let y = apply_point(&c, which, &point);
        if y.iter().any(|&v| v != 0) {
            point = normalize_fp(&f, &y);
            steps.push(OrbitStep { map: which, arrow: Arrow::Regular, image: label_point(&c, &sp, &point), singular_locus: None });
            continue;
        }
        // indeterminate: collect limit points of B(x + εv)
        let limits: Vec<Vec<u64>> = (0..p + 3)
            .map(|_| {
                let v: Vec<UniPoly> = point.iter().map(|&x| UniPoly::linear(f, x, f.random(rng))).collect();
                let img = apply_series(&c, which, &v);
                let order = img.iter().filter_map(|u| u.coeffs().iter().position(|&a| a != 0)).min().unwrap_or(0);
                img.iter().map(|u| u.coeff(order)).collect()
            })
            .collect();
        let dim = rank(&f, &limits) - 1;
        let zero_coords: Vec<usize> = (0..p).filter(|&i| limits.iter().all(|l| l[i] == 0)).collect();
        let locus: Vec<usize> = (0..p).filter(|&i| point[i] == 0).collect();
        let image = if dim == p - 2 && zero_coords.len() == 1 {
            Variety::Hyperplane { k: zero_coords[0] }
        } else {
            Variety::Linear { dim, zero_coords }
        };
        steps.push(OrbitStep { map: which, arrow: Arrow::BlowUp, image, singular_locus: Some(locus) });
        break;
    }
    Ok(OrbitReport { q, start: start_var, steps })
}
