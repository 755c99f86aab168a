//! The metric group `(A, q)` of a skew-symmetric isogeny, and the isogeny
//! constructions that move between such groups.
//!
//! `A` is the kernel of the isogeny, realised inside a finite field. The
//! form is `q(a) = i(r(a))` and the pairing `B(a, b) = i(g(a, b))`, where `r`
//! and `g` are the Artin-Schreier solutions from [`crate::ppoly`] and `i` is
//! the embedding `F_p -> Q_p/Z_p` with `i(1) = 1/p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fp;
use crate::gf::{self, check_ctx, make_field_capped, Field, FieldElem};
use crate::mgrp::{Caps, MetricGroup, QpZp};
use crate::ore::{OreMatrix, OrePoly};
use crate::ppoly::{self, PerfectPoly};

/// Largest kernel on which polarization is checked pair by pair.
pub const POLARIZATION_PAIR_LIMIT: usize = 4096;

/// A tabulated kernel with its quadratic form and pairing.
#[derive(Clone, Debug)]
pub struct BiextModel {
    f: OreMatrix,
    field: Field,
    basis: Vec<Vec<FieldElem>>,
    points: Vec<Vec<FieldElem>>,
    q: Vec<u32>,
    gram: Vec<Vec<u32>>,
    connected: bool,
}

impl BiextModel {
    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn f(&self) -> &OreMatrix {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// Field containing every kernel point.
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// `F_p`-basis of `A`; each vector has one coordinate per copy of the
    /// additive group.
    pub fn basis(&self) -> &[Vec<FieldElem>] {
        &self.basis
    }

    /// All points of `A`, indexed by base-p coordinates over the basis
    /// (little-endian), so index `p^i` is basis vector `i`.
    pub fn points(&self) -> &[Vec<FieldElem>] {
        &self.points
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// `log_p |A|`.
    pub fn log_size(&self) -> usize {
        self.basis.len()
    }

    /// True when the input was zero, whose kernel is connected; the metric
    /// group is then trivial.
    pub fn is_connected_kernel(&self) -> bool {
        self.connected
    }

    /// `r(a)` in `F_p` for the point with index `a`.
    pub fn q_fp(&self, a: usize) -> u32 {
        self.q[a]
    }

    pub fn q_value(&self, a: usize) -> QpZp {
        QpZp::from_prime(self.p(), self.q[a])
    }

    /// Gram matrix of `g` on the basis, entries in `F_p`.
    pub fn gram(&self) -> &[Vec<u32>] {
        &self.gram
    }

    pub fn coords(&self, a: usize) -> Vec<u32> {
        let p = self.p() as usize;
        let mut a = a;
        (0..self.basis.len())
            .map(|_| {
                let d = (a % p) as u32;
                a /= p;
                d
            })
            .collect()
    }

    pub fn index(&self, coords: &[u32]) -> usize {
        let p = self.p() as usize;
        coords.iter().rev().fold(0, |acc, &c| acc * p + c as usize)
    }

    /// Index of `a + b`.
    pub fn add(&self, a: usize, b: usize) -> usize {
        let p = self.p() as usize;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.basis.len() {
            out += (a % p + b % p) % p * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    /// `B(a, b)` in `F_p`, by bilinear extension of the Gram matrix.
    pub fn b_fp(&self, a: usize, b: usize) -> u32 {
        let p = self.p();
        let (ca, cb) = (self.coords(a), self.coords(b));
        let mut acc = 0;
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                acc = fp::add(acc, fp::mul(fp::mul(x, y, p), self.gram[i][j], p), p);
            }
        }
        acc
    }

    /// `B(a, b) = q(a + b) - q(a) - q(b)` on every pair.
    ///
    /// Up to [`POLARIZATION_PAIR_LIMIT`] points every pair is checked. Beyond
    /// that the identity is checked for `b` running over the basis, which
    /// implies it for all `b` by induction on `b` (both sides change by the
    /// same amount when a basis vector is added to `b`).
    pub fn polarization_holds(&self) -> bool {
        let p = self.p();
        let n = self.size();
        let dim = self.basis.len();
        let coords: Vec<Vec<u32>> = (0..n).map(|a| self.coords(a)).collect();
        let dot = |a: &[u32], b: &[u32]| {
            a.iter().zip(b).fold(0, |acc, (&x, &y)| fp::add(acc, fp::mul(x, y, p), p))
        };
        // Column vectors G b, so B(a, b) = a . (G b).
        let gb = |cb: &[u32]| -> Vec<u32> {
            (0..dim)
                .map(|i| (0..dim).fold(0, |acc, j| fp::add(acc, fp::mul(self.gram[i][j], cb[j], p), p)))
                .collect()
        };
        let check = |a: usize, b: usize, gbb: &[u32]| {
            let lhs = fp::sub(fp::sub(self.q[self.add(a, b)], self.q[a], p), self.q[b], p);
            lhs == dot(&coords[a], gbb)
        };
        if n <= POLARIZATION_PAIR_LIMIT {
            let gbs: Vec<Vec<u32>> = coords.iter().map(|c| gb(c)).collect();
            (0..n).all(|a| (0..n).all(|b| check(a, b, &gbs[b])))
        } else {
            let pp = p as usize;
            (0..dim).all(|i| {
                let b = pp.pow(i as u32);
                let gbb = gb(&coords[b]);
                (0..n).all(|a| check(a, b, &gbb))
            })
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.gram.len();
        (0..n).all(|i| (0..n).all(|j| self.gram[i][j] == self.gram[j][i]))
    }

    /// The Gram matrix is invertible over `F_p`.
    pub fn is_nondegenerate(&self) -> bool {
        self.gram.is_empty() || fp::inverse(&self.gram, self.p()).is_some()
    }

    pub fn metric_group(&self) -> MetricGroup {
        let p = self.p();
        let q = (0..self.size()).map(|a| self.q_value(a)).collect();
        MetricGroup::new(p, vec![p as u64; self.basis.len()], q).expect("well-formed table")
    }

    /// Point indices sorted by the digits of their coordinates.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.size()).collect();
        idx.sort_by(|&a, &b| {
            let da = self.points[a].iter().map(FieldElem::coeffs);
            let db = self.points[b].iter().map(FieldElem::coeffs);
            da.cmp(db)
        });
        idx
    }

    /// Index of a point of `A`, if it is one.
    pub fn locate(&self, point: &[FieldElem]) -> Option<usize> {
        self.points.iter().position(|x| x.as_slice() == point)
    }
}

/// `i(g(a, b))` for `a` in `ker f` and `b` in `ker f*`.
pub fn pairing(f: &OrePoly, a: &FieldElem, b: &FieldElem) -> Result<QpZp> {
    if !f.act(a)?.is_zero() {
        return Err(Error::Precondition("first argument is not in ker f".into()));
    }
    if !f.adjoint().act(b)?.is_zero() {
        return Err(Error::Precondition("second argument is not in ker f*".into()));
    }
    let v = ppoly::solve_g(f).p_eval(&[a.clone(), b.clone()])?;
    let x = v
        .as_prime()
        .ok_or_else(|| Error::Internal("pairing value outside F_p".into()))?;
    Ok(QpZp::from_prime(f.p(), x))
}

/// The metric group of a skew isogeny `f`; `f = 0` yields the trivial group
/// flagged as a connected kernel.
pub fn metric_from_skew(f: &OrePoly, caps: &Caps) -> Result<BiextModel> {
    if !f.is_skew() {
        return Err(Error::NotSkew);
    }
    let fm = OreMatrix::from_poly(f);
    if f.is_zero() {
        return Ok(trivial_model(fm));
    }
    let r = ppoly::solve_r(f)?;
    if r.frob_minus_id() != ppoly::r_target(f) {
        return Err(Error::Internal("r failed verification".into()));
    }
    let g = ppoly::solve_g(f);
    if g.frob_minus_id() != ppoly::g_target(f) {
        return Err(Error::Internal("g failed verification".into()));
    }
    let kernel = f.kernel(caps.max_ext)?;
    let basis = kernel.basis.into_iter().map(|x| vec![x]).collect();
    tabulate(fm, kernel.field, basis, &r, &g, caps)
}

/// The metric group of a skew matrix.
///
/// Block-diagonal matrices whose blocks are `1x1` or antidiagonal `2x2`
/// (the shapes produced by [`direct_sum_blocks`], [`hyperbolic_block`] and
/// diagonal pullbacks) have their kernel assembled from scalar kernels. Any
/// other shape needs `expected_size`, and the field is grown until the joint
/// kernel reaches it.
pub fn metric_from_skew_matrix(
    m: &OreMatrix,
    expected_size: Option<u64>,
    caps: &Caps,
) -> Result<BiextModel> {
    if !m.is_skew_matrix() {
        return Err(Error::NotSkew);
    }
    if m.entries().iter().all(OrePoly::is_zero) {
        return Ok(trivial_model(m.clone()));
    }
    let (field, basis) = match block_kernel(m, caps)? {
        Some(found) => found,
        None => {
            let expected = expected_size.ok_or_else(|| {
                Error::Unsupported("kernel of a general matrix needs an expected size".into())
            })?;
            grow_kernel(m, expected, caps)?
        }
    };
    if let Some(expected) = expected_size {
        let got = (m.ctx().p() as u64).pow(basis.len() as u32);
        if got != expected {
            return Err(Error::Internal(format!(
                "kernel has {got} points, expected {expected}"
            )));
        }
    }
    let r = ppoly::solve_r_matrix(m)?;
    let g = ppoly::solve_g_matrix(m)?;
    tabulate(m.clone(), field, basis, &r, &g, caps)
}

fn trivial_model(f: OreMatrix) -> BiextModel {
    let field = f.ctx().clone();
    let d = f.dim();
    BiextModel {
        points: vec![vec![FieldElem::zero(&field); d]],
        f,
        field,
        basis: Vec::new(),
        q: vec![0],
        gram: Vec::new(),
        connected: true,
    }
}

#[derive(Clone, Copy)]
enum Block {
    Single(usize),
    Pair(usize, usize),
}

/// Splits the index set into the connected components of the nonzero
/// pattern, if every component is a nonzero diagonal entry or an
/// antidiagonal pair with nonzero off-diagonal entries.
fn block_pattern(m: &OreMatrix) -> Option<Vec<Block>> {
    let d = m.dim();
    let nz = |i: usize, j: usize| !m.get(i, j).is_zero();
    let mut seen = vec![false; d];
    let mut blocks = Vec::new();
    for i in 0..d {
        if seen[i] {
            continue;
        }
        let partners: Vec<usize> = (0..d).filter(|&j| j != i && (nz(i, j) || nz(j, i))).collect();
        match partners.as_slice() {
            [] if nz(i, i) => {
                seen[i] = true;
                blocks.push(Block::Single(i));
            }
            [j] => {
                let j = *j;
                let others = (0..d).any(|k| k != i && k != j && (nz(j, k) || nz(k, j)));
                if others || nz(i, i) || nz(j, j) || !nz(i, j) || !nz(j, i) {
                    return None;
                }
                seen[i] = true;
                seen[j] = true;
                blocks.push(Block::Pair(i, j));
            }
            _ => return None,
        }
    }
    Some(blocks)
}

type KernelBasis = (Field, Vec<Vec<FieldElem>>);

fn block_kernel(m: &OreMatrix, caps: &Caps) -> Result<Option<KernelBasis>> {
    let Some(blocks) = block_pattern(m) else {
        return Ok(None);
    };
    let d = m.dim();
    // (coordinate, kernel of the entry acting on it)
    let mut parts = Vec::new();
    for b in blocks {
        match b {
            Block::Single(i) => parts.push((i, m.get(i, i).kernel(caps.max_ext)?)),
            Block::Pair(i, j) => {
                parts.push((j, m.get(i, j).kernel(caps.max_ext)?));
                parts.push((i, m.get(j, i).kernel(caps.max_ext)?));
            }
        }
    }
    let degree = parts.iter().fold(1, |acc, (_, k)| lcm(acc, k.field.degree()));
    let cap = caps.max_ext * m.ctx().degree();
    let field = make_field_capped(m.ctx().p(), degree, cap.max(degree))?;
    let mut basis = Vec::new();
    for (coord, k) in parts {
        for x in k.basis {
            let mut v = vec![FieldElem::zero(&field); d];
            v[coord] = x.embed_into(&field)?;
            basis.push(v);
        }
    }
    Ok(Some((field, basis)))
}

fn grow_kernel(m: &OreMatrix, expected: u64, caps: &Caps) -> Result<KernelBasis> {
    let p = m.ctx().p() as u64;
    let base = m.ctx().degree();
    let cap = caps.max_ext * base;
    for s in (base..=cap).step_by(base) {
        let field = make_field_capped(m.ctx().p(), s, cap)?;
        let lifted = m.embed_into(&field)?;
        let basis = gf::fp_kernel_vec(&field, m.dim(), |x| lifted.apply(x).expect("same field"))?;
        let size = p.checked_pow(basis.len() as u32).unwrap_or(u64::MAX);
        if size == expected {
            return Ok((field, basis));
        }
        if size > expected {
            return Err(Error::Precondition(format!(
                "kernel has at least {size} points, more than the expected {expected}"
            )));
        }
    }
    Err(Error::ExtensionCap { cap })
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Lists every point of the kernel and evaluates `r` on each, and `g` on
/// pairs of basis vectors.
fn tabulate(
    f: OreMatrix,
    field: Field,
    basis: Vec<Vec<FieldElem>>,
    r: &PerfectPoly,
    g: &PerfectPoly,
    caps: &Caps,
) -> Result<BiextModel> {
    let p = field.p();
    let dim = basis.len();
    let size = (p as usize)
        .checked_pow(dim as u32)
        .filter(|&n| n <= caps.enum_cap)
        .ok_or(Error::EnumerationCap {
            what: "kernel tabulation",
            needed: (p as usize).saturating_pow(dim as u32),
            cap: caps.enum_cap,
        })?;
    for v in &basis {
        if v.iter().any(|x| !x.is_zero()) && f.apply(v)?.iter().any(|y| !y.is_zero()) {
            return Err(Error::Internal("basis vector outside the kernel".into()));
        }
    }
    let rows: Vec<Vec<u32>> = basis
        .iter()
        .map(|v| v.iter().flat_map(|x| x.coeffs().iter().copied()).collect())
        .collect();
    let width = rows.first().map_or(0, Vec::len);
    if fp::rank(&rows, width, p) != dim {
        return Err(Error::Internal("kernel basis is dependent".into()));
    }

    let d = f.dim();
    let mut points = Vec::with_capacity(size);
    points.push(vec![FieldElem::zero(&field); d]);
    for idx in 1..size {
        let mut low = 0;
        let mut stride = 1;
        while (idx / stride) % p as usize == 0 {
            low += 1;
            stride *= p as usize;
        }
        let prev = &points[idx - stride];
        let next: Vec<FieldElem> = prev.iter().zip(&basis[low]).map(|(a, b)| a + b).collect();
        points.push(next);
    }

    let to_fp = |x: FieldElem, what: &str| -> Result<u32> {
        x.as_prime()
            .ok_or_else(|| Error::Internal(format!("{what} value outside F_p")))
    };
    let r = r.embed_into(&field)?;
    let g = g.embed_into(&field)?;
    let q = points
        .iter()
        .map(|pt| to_fp(r.p_eval(pt)?, "q"))
        .collect::<Result<Vec<u32>>>()?;
    let mut gram = vec![vec![0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut pt = basis[i].clone();
            pt.extend_from_slice(&basis[j]);
            gram[i][j] = to_fp(g.p_eval(&pt)?, "pairing")?;
        }
    }
    Ok(BiextModel {
        f,
        field,
        basis,
        points,
        q,
        gram,
        connected: false,
    })
}

/// The monic `pi` in `k{tau}` whose additive polynomial is
/// `prod_{l in span L} (x - l)`; coefficients lie in the field of `L`.
pub fn subgroup_isogeny(field: &Field, l: &[FieldElem]) -> Result<OrePoly> {
    let p = field.p();
    for x in l {
        check_ctx(field, x.ctx())?;
    }
    let rows: Vec<Vec<u32>> = l.iter().map(|x| x.coeffs().to_vec()).collect();
    if fp::rank(&rows, field.degree(), p) != l.len() {
        return Err(Error::Dependent);
    }
    let tau = OrePoly::tau(field);
    let mut pi = OrePoly::one(field);
    for x in l {
        let y = pi.act(x)?;
        let c = y.pow(p as u64 - 1);
        pi = &(&tau - &OrePoly::monomial(c, 0)) * &pi;
    }
    Ok(pi)
}

/// The skew `f'` with `pi* f' pi = f`, where `pi` is the quotient by the
/// isotropic subspace spanned by `l` inside `ker f`.
pub fn descend(f: &OrePoly, l: &[FieldElem]) -> Result<OrePoly> {
    if !f.is_skew() {
        return Err(Error::NotSkew);
    }
    let Some(first) = l.first() else {
        return Ok(f.clone());
    };
    let field = first.ctx().clone();
    let fk = f.embed_into(&field)?;
    for x in l {
        if !fk.act(x)?.is_zero() {
            return Err(Error::Precondition("L is not inside ker f".into()));
        }
    }
    let pi = subgroup_isogeny(&field, l)?;
    // q must vanish on all of span L.
    let r = ppoly::solve_r(&fk)?;
    let p = field.p() as usize;
    let mut span = vec![FieldElem::zero(&field)];
    for x in l {
        let base = span.clone();
        for k in 1..p {
            let kx = x.scale(k as u32);
            span.extend(base.iter().map(|y| y + &kx));
        }
    }
    for y in &span {
        if !r.p_eval(std::slice::from_ref(y))?.is_zero() {
            return Err(Error::NotIsotropic);
        }
    }
    let x = fk
        .right_divide_exact(&pi)?
        .ok_or_else(|| Error::Internal("f is not right-divisible by pi".into()))?;
    let f_adj = x
        .adjoint()
        .right_divide_exact(&pi)?
        .ok_or_else(|| Error::Internal("f is not left-divisible by pi*".into()))?;
    let f_new = f_adj.adjoint();
    if &(&pi.adjoint() * &f_new) * &pi != fk {
        return Err(Error::Internal("descended map does not recompose".into()));
    }
    if !f_new.is_skew() {
        return Err(Error::Internal("descended map is not skew".into()));
    }
    Ok(f_new)
}

/// `Phi* F Phi`. `Phi` must be a nonzero scalar isogeny (for `d = 1`) or a
/// diagonal matrix with nonzero entries.
pub fn pullback(m: &OreMatrix, phi: &OreMatrix) -> Result<OreMatrix> {
    if !m.is_skew_matrix() {
        return Err(Error::NotSkew);
    }
    if phi.dim() != m.dim() {
        return Err(Error::Invalid("dimension mismatch".into()));
    }
    if !phi.is_diagonal() {
        return Err(Error::Unsupported("only diagonal isogenies are supported".into()));
    }
    if (0..phi.dim()).any(|i| phi.get(i, i).is_zero()) {
        return Err(Error::Precondition("Phi is not an isogeny".into()));
    }
    phi.m_adjoint().try_mul(m)?.try_mul(phi)
}

pub fn pullback_poly(f: &OrePoly, phi: &OrePoly) -> Result<OrePoly> {
    let out = pullback(&OreMatrix::from_poly(f), &OreMatrix::from_poly(phi))?;
    Ok(out.get(0, 0).clone())
}

/// `log_p |ker Phi|` for a diagonal isogeny.
pub fn diagonal_kernel_log(phi: &OreMatrix) -> Option<u32> {
    if !phi.is_diagonal() {
        return None;
    }
    (0..phi.dim()).map(|i| phi.get(i, i).span()).sum()
}

/// `[[0, g], [-g*, 0]]`.
pub fn hyperbolic_block(g: &OrePoly) -> OreMatrix {
    OreMatrix::hyperbolic_block(g)
}

/// Block-diagonal assembly.
pub fn direct_sum_blocks(blocks: &[OreMatrix]) -> Result<OreMatrix> {
    let (first, rest) = blocks
        .split_first()
        .ok_or_else(|| Error::Invalid("no blocks".into()))?;
    rest.iter().try_fold(first.clone(), |acc, b| acc.direct_sum(b))
}

/// Shape of a seeded random instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    /// A single skew element.
    Scalar,
    /// `diag(f_1, ..., f_d)` with skew `f_i`.
    Diagonal,
    /// Hyperbolic blocks `[[0, g], [-g*, 0]]`, plus one skew scalar when `d`
    /// is odd.
    Hyperbolic,
}

/// A random skew isogeny together with its kernel size.
#[derive(Clone, Debug)]
pub struct Instance {
    pub kind: InstanceKind,
    pub matrix: OreMatrix,
    /// `log_p` of the kernel size implied by the construction.
    pub expected_log: u32,
}

/// Draws a skew instance of dimension `d` from ChaCha8 seeded with `seed`.
///
/// Tau-degrees are drawn from `1..=n`. For `d > 1` the even seeds build
/// hyperbolic blocks and the odd seeds diagonal matrices; degrees are lowered
/// so the kernel has at most `max_points` points.
pub fn random_instance(ctx: &Field, d: usize, n: u32, seed: u64, max_points: usize) -> Instance {
    assert!(d >= 1 && n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = ctx.p() as f64;
    let budget = ((max_points as f64).ln() / p.ln()).floor().max(0.0) as u32;
    let kind = if d == 1 {
        InstanceKind::Scalar
    } else if seed % 2 == 0 {
        InstanceKind::Hyperbolic
    } else {
        InstanceKind::Diagonal
    };
    // Each scalar slot contributes 2 * deg to log |A|; each hyperbolic pair too.
    let slots = match kind {
        InstanceKind::Scalar => 1,
        InstanceKind::Diagonal => d,
        InstanceKind::Hyperbolic => d / 2 + d % 2,
    };
    let mut degrees: Vec<u32> = (0..slots).map(|_| rng.gen_range(1..=n)).collect();
    while degrees.iter().sum::<u32>() * 2 > budget && degrees.iter().any(|&x| x > 1) {
        let i = (0..slots).max_by_key(|&i| degrees[i]).unwrap();
        degrees[i] -= 1;
    }
    let expected_log = degrees.iter().sum::<u32>() * 2;
    let matrix = match kind {
        InstanceKind::Scalar => {
            OreMatrix::from_poly(&OrePoly::random_skew_with(ctx, degrees[0], &mut rng))
        }
        InstanceKind::Diagonal => {
            let diag: Vec<OrePoly> = degrees
                .iter()
                .map(|&k| OrePoly::random_skew_with(ctx, k, &mut rng))
                .collect();
            OreMatrix::diagonal(&diag).expect("common context")
        }
        InstanceKind::Hyperbolic => {
            let mut blocks = Vec::new();
            for (slot, &k) in degrees.iter().enumerate() {
                if slot < d / 2 {
                    // g has span k: exponents in lo..=lo+k, lo in [-1, 0].
                    let lo = -(rng.gen_range(0..=1i64).min(k as i64));
                    let g = OrePoly::random(ctx, lo, lo + k as i64, &mut rng);
                    blocks.push(OreMatrix::hyperbolic_block(&g));
                } else {
                    let f = OrePoly::random_skew_with(ctx, k, &mut rng);
                    blocks.push(OreMatrix::from_poly(&f));
                }
            }
            direct_sum_blocks(&blocks).expect("common context")
        }
    };
    Instance {
        kind,
        matrix,
        expected_log,
    }
}

/// Metric group of a matrix built by [`random_instance`] or any other
/// supported construction; scalar matrices go through [`metric_from_skew`].
pub fn metric_of(m: &OreMatrix, caps: &Caps) -> Result<BiextModel> {
    if m.dim() == 1 {
        let mut model = metric_from_skew(m.get(0, 0), caps)?;
        model.f = m.clone();
        Ok(model)
    } else {
        metric_from_skew_matrix(m, None, caps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::mgrp::witt_class;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn worked_example_p3() {
        let f3 = make_field(3, 1).unwrap();
        let w = OrePoly::from_prime_terms(&f3, &[(1, 1), (-1, -1)]);
        let model = metric_from_skew(&w, &caps()).unwrap();
        assert_eq!(model.size(), 9);
        assert_eq!(model.field().degree(), 2);
        for (a, x) in model.points().iter().enumerate() {
            let nm = x[0].norm_to_prime_from(1).unwrap().as_prime().unwrap();
            assert_eq!(model.q_fp(a), nm);
            for (b, y) in model.points().iter().enumerate() {
                let tr = (&x[0] * &y[0].frobenius()).trace_to_prime();
                assert_eq!(model.b_fp(a, b), tr);
                assert_eq!(pairing(&w, &x[0], &y[0]).unwrap(), QpZp::from_prime(3, tr));
            }
        }
        assert!(model.polarization_holds() && model.is_symmetric() && model.is_nondegenerate());
        assert_eq!(witt_class(&model.metric_group(), &caps()).unwrap().name(), "NormForm");
    }

    #[test]
    fn zero_is_connected() {
        let f = make_field(3, 1).unwrap();
        let m = metric_from_skew(&OrePoly::zero(&f), &caps()).unwrap();
        assert!(m.is_connected_kernel());
        assert_eq!(m.size(), 1);
        let scalar = OrePoly::one(&f);
        assert!(matches!(metric_from_skew(&scalar, &caps()), Err(Error::NotSkew)));
    }

    #[test]
    fn subgroup_isogeny_examples() {
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(subgroup_isogeny(&f9, &[]).unwrap(), OrePoly::one(&f9));
        let lang = subgroup_isogeny(&f9, &[FieldElem::one(&f9)]).unwrap();
        assert_eq!(lang, OrePoly::from_prime_terms(&f9, &[(1, 1), (0, -1)]));
        let g = FieldElem::generator(&f9);
        let full = subgroup_isogeny(&f9, &[FieldElem::one(&f9), g.clone()]).unwrap();
        assert_eq!(full.kernel(64).unwrap().size(), 9);
        assert!(matches!(
            subgroup_isogeny(&f9, &[g.clone(), g.scale(2)]),
            Err(Error::Dependent)
        ));
    }

    #[test]
    fn pullback_of_worked_example() {
        let f3 = make_field(3, 1).unwrap();
        let w = OrePoly::from_prime_terms(&f3, &[(1, 1), (-1, -1)]);
        let phi = OrePoly::from_prime_terms(&f3, &[(1, 1), (0, -1)]);
        let pulled = pullback_poly(&w, &phi).unwrap();
        assert!(pulled.is_skew());
        assert_eq!(pulled.kernel(64).unwrap().size(), 81);
        let id = OreMatrix::identity(&f3, 1);
        assert_eq!(pullback(&OreMatrix::from_poly(&w), &id).unwrap(), OreMatrix::from_poly(&w));
    }

    #[test]
    fn descend_empty_is_identity() {
        let f = make_field(3, 1).unwrap();
        let s = OrePoly::random_skew(&f, 2, 1);
        assert_eq!(descend(&s, &[]).unwrap(), s);
    }

    #[test]
    fn matrix_models() {
        let f3 = make_field(3, 1).unwrap();
        let w = OrePoly::from_prime_terms(&f3, &[(1, 1), (-1, -1)]);
        let diag = OreMatrix::diagonal(&[w.clone(), w.clone()]).unwrap();
        let model = metric_from_skew_matrix(&diag, Some(81), &caps()).unwrap();
        assert_eq!(model.size(), 81);
        assert!(model.polarization_holds() && model.is_nondegenerate());
        assert!(witt_class(&model.metric_group(), &caps()).unwrap().is_zero());

        let hyp = hyperbolic_block(&OrePoly::tau(&f3));
        let model = metric_from_skew_matrix(&hyp, None, &caps()).unwrap();
        assert_eq!(model.size(), 1);
        let g = OrePoly::from_prime_terms(&f3, &[(1, 1), (0, 1)]);
        let model = metric_from_skew_matrix(&hyperbolic_block(&g), None, &caps()).unwrap();
        assert_eq!(model.size(), 9);
        assert!(witt_class(&model.metric_group(), &caps()).unwrap().is_zero());
    }

    #[test]
    fn general_matrix_needs_expected_size() {
        let f3 = make_field(3, 1).unwrap();
        let w = OrePoly::from_prime_terms(&f3, &[(1, 1), (-1, -1)]);
        let t = OrePoly::tau(&f3);
        let s = &t - &t.adjoint();
        let m = OreMatrix::from_rows(vec![vec![w.clone(), s.clone()], vec![s, w.clone()]])
        .unwrap();
        assert!(m.is_skew_matrix());
        assert!(matches!(
            metric_from_skew_matrix(&m, None, &caps()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn random_instances_have_promised_sizes() {
        let f = make_field(3, 1).unwrap();
        for d in 1..=3 {
            for seed in 0..6 {
                let inst = random_instance(&f, d, 2, seed, 729);
                assert!(inst.matrix.is_skew_matrix());
                let model = metric_of(&inst.matrix, &caps()).unwrap();
                assert_eq!(model.log_size() as u32, inst.expected_log);
            }
        }
    }
}
