//! Finite fields F_{p^N} standing in for the algebraically closed base field.
//!
//! A [`FieldCtx`] fixes the defining modulus (the lexicographically smallest
//! monic irreducible polynomial of degree N, coefficient lists compared from
//! the constant term upwards) together with the matrices of Frobenius and of
//! its inverse in the power basis `1, g, ..., g^(N-1)`. Contexts are interned:
//! every call to [`make_field`] with the same `(p, N)` returns the same `Arc`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fp;

/// Default upper bound on the extension degree accepted by [`make_field`].
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Largest prime accepted; keeps products of residues summable in `u64`.
pub const MAX_PRIME: u32 = 65521;

pub type Field = Arc<FieldCtx>;

pub struct FieldCtx {
    p: u32,
    degree: usize,
    modulus: Vec<u32>,
    /// Column `j` holds the coordinates of `(g^j)^p`.
    frob: Vec<Vec<u32>>,
    /// Column `j` holds the coordinates of `(g^j)^(1/p)`.
    inv_frob: Vec<Vec<u32>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}{:?}", self.p, self.degree, self.modulus)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree
    }
}
impl Eq for FieldCtx {}

fn field_cache() -> &'static RwLock<HashMap<(u32, usize), Field>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, usize), Field>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn embed_cache() -> &'static RwLock<HashMap<(u32, usize, usize), Vec<u32>>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, usize, usize), Vec<u32>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Context for F_{p^N} with the default degree cap.
pub fn make_field(p: u32, degree: usize) -> Result<Field> {
    make_field_capped(p, degree, DEFAULT_DEGREE_CAP)
}

pub fn make_field_capped(p: u32, degree: usize, cap: usize) -> Result<Field> {
    if !fp::is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if p > MAX_PRIME {
        return Err(Error::PrimeTooLarge(p as u64));
    }
    if degree == 0 || degree > cap {
        return Err(Error::DegreeCap { degree, cap });
    }
    if let Some(f) = field_cache().read().unwrap().get(&(p, degree)) {
        return Ok(f.clone());
    }
    let ctx = Arc::new(FieldCtx::build(p, degree));
    let mut cache = field_cache().write().unwrap();
    Ok(cache.entry((p, degree)).or_insert(ctx).clone())
}

/// Lexicographically smallest monic irreducible of the given degree.
fn smallest_irreducible(p: u32, degree: usize) -> Vec<u32> {
    if degree == 1 {
        return vec![0, 1];
    }
    // Odometer over (c_0, ..., c_{N-1}) with c_0 the most significant digit.
    // A zero constant term means x divides f, so start at c_0 = 1.
    let mut digits = vec![0u32; degree];
    digits[0] = 1;
    loop {
        let mut f = digits.clone();
        f.push(1);
        if fp::is_irreducible(&f, p) {
            return f;
        }
        let mut i = degree;
        loop {
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            assert!(i > 0, "irreducible polynomials exist in every degree");
        }
    }
}

impl FieldCtx {
    fn build(p: u32, degree: usize) -> Self {
        let modulus = smallest_irreducible(p, degree);
        let pad = |mut v: Vec<u32>| {
            v.resize(degree, 0);
            v
        };
        let gp = fp::poly_powmod(&[0, 1], p as u64, &modulus, p);
        let mut frob = Vec::with_capacity(degree);
        let mut cur = fp::poly_rem(&[1], &modulus, p);
        for _ in 0..degree {
            frob.push(pad(cur.clone()));
            cur = fp::poly_rem(&fp::poly_mul(&cur, &gp, p), &modulus, p);
        }
        let rows: Vec<Vec<u32>> = (0..degree)
            .map(|i| (0..degree).map(|j| frob[j][i]).collect())
            .collect();
        let inv_rows = fp::inverse(&rows, p).expect("Frobenius is an automorphism");
        let inv_frob = (0..degree)
            .map(|j| (0..degree).map(|i| inv_rows[i][j]).collect())
            .collect();
        FieldCtx {
            p,
            degree,
            modulus,
            frob,
            inv_frob,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic modulus, little-endian, length `degree + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// `p^N`, saturating.
    pub fn order(&self) -> u128 {
        (self.p as u128).saturating_pow(self.degree as u32)
    }

    fn apply(&self, cols: &[Vec<u32>], c: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let mut acc = vec![0u64; self.degree];
        for (j, &cj) in c.iter().enumerate() {
            if cj == 0 {
                continue;
            }
            for (a, &m) in acc.iter_mut().zip(cols[j].iter()) {
                *a += cj as u64 * m as u64;
            }
        }
        acc.into_iter().map(|x| (x % p) as u32).collect()
    }

    fn reduce_product(&self, acc: Vec<u64>) -> Vec<u32> {
        let p = self.p as u64;
        let n = self.degree;
        let mut r: Vec<u64> = acc.into_iter().map(|x| x % p).collect();
        for top in (n..r.len()).rev() {
            let c = r[top] % p;
            if c == 0 {
                continue;
            }
            // g^top = g^(top-n) * g^n and g^n = -(m_0 + ... + m_{n-1} g^(n-1))
            let neg = p - c;
            for i in 0..n {
                let m = self.modulus[i] as u64;
                if m != 0 {
                    r[top - n + i] = (r[top - n + i] + neg * m) % p;
                }
            }
        }
        r.truncate(n);
        r.resize(n, 0);
        r.into_iter().map(|x| x as u32).collect()
    }
}

/// An element of a finite field, tagged with its context.
///
/// Arithmetic operators panic when the operands live in different contexts;
/// the `try_*` methods report [`Error::ContextMismatch`] instead.
#[derive(Clone)]
pub struct FieldElem {
    ctx: Field,
    c: Vec<u32>,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.c)
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.c == other.c
    }
}
impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.p.hash(state);
        self.c.hash(state);
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the little-endian coefficient list.
impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.cmp(&other.c)
    }
}

fn same_ctx(a: &Field, b: &Field) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn check_ctx(a: &Field, b: &Field) -> Result<()> {
    if same_ctx(a, b) {
        Ok(())
    } else {
        Err(Error::ContextMismatch {
            left_p: a.p,
            left_n: a.degree,
            right_p: b.p,
            right_n: b.degree,
        })
    }
}

impl FieldElem {
    pub fn zero(ctx: &Field) -> Self {
        FieldElem {
            ctx: ctx.clone(),
            c: vec![0; ctx.degree],
        }
    }

    pub fn one(ctx: &Field) -> Self {
        Self::from_prime(ctx, 1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_prime(ctx: &Field, v: i64) -> Self {
        let mut e = Self::zero(ctx);
        e.c[0] = fp::reduce_i64(v, ctx.p);
        e
    }

    /// The class of `x` modulo the defining polynomial.
    pub fn generator(ctx: &Field) -> Self {
        Self::from_poly(ctx, &[0, 1])
    }

    fn from_poly(ctx: &Field, poly: &[u32]) -> Self {
        let mut c = fp::poly_rem(poly, &ctx.modulus, ctx.p);
        c.resize(ctx.degree, 0);
        FieldElem {
            ctx: ctx.clone(),
            c,
        }
    }

    /// Builds an element from base-p digits; shorter lists are zero-padded.
    pub fn from_coeffs(ctx: &Field, digits: &[u32]) -> Result<Self> {
        if digits.len() > ctx.degree {
            return Err(Error::Invalid(format!(
                "{} digits for a degree-{} field",
                digits.len(),
                ctx.degree
            )));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= ctx.p) {
            return Err(Error::Invalid(format!("digit {d} is not below p = {}", ctx.p)));
        }
        let mut c = digits.to_vec();
        c.resize(ctx.degree, 0);
        Ok(FieldElem {
            ctx: ctx.clone(),
            c,
        })
    }

    /// The element whose digits are the base-p expansion of `index`.
    pub fn from_index(ctx: &Field, mut index: u64) -> Self {
        let mut e = Self::zero(ctx);
        for d in e.c.iter_mut() {
            *d = (index % ctx.p as u64) as u32;
            index /= ctx.p as u64;
        }
        e
    }

    pub fn random<R: Rng + ?Sized>(ctx: &Field, rng: &mut R) -> Self {
        FieldElem {
            ctx: ctx.clone(),
            c: (0..ctx.degree).map(|_| rng.gen_range(0..ctx.p)).collect(),
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(ctx: &Field, rng: &mut R) -> Self {
        loop {
            let e = Self::random(ctx, rng);
            if !e.is_zero() {
                return e;
            }
        }
    }

    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    pub fn p(&self) -> u32 {
        self.ctx.p
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// `Some(v)` when the element lies in the prime field.
    pub fn as_prime(&self) -> Option<u32> {
        if self.c[1..].iter().all(|&x| x == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_ctx(&self.ctx, &other.ctx)?;
        let p = self.ctx.p;
        Ok(FieldElem {
            ctx: self.ctx.clone(),
            c: self
                .c
                .iter()
                .zip(&other.c)
                .map(|(&a, &b)| fp::add(a, b, p))
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        check_ctx(&self.ctx, &other.ctx)?;
        let p = self.ctx.p;
        Ok(FieldElem {
            ctx: self.ctx.clone(),
            c: self
                .c
                .iter()
                .zip(&other.c)
                .map(|(&a, &b)| fp::sub(a, b, p))
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_ctx(&self.ctx, &other.ctx)?;
        let n = self.ctx.degree;
        let mut acc = vec![0u64; 2 * n - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                acc[i + j] += a as u64 * b as u64;
            }
        }
        Ok(FieldElem {
            ctx: self.ctx.clone(),
            c: self.ctx.reduce_product(acc),
        })
    }

    pub fn neg(&self) -> Self {
        let p = self.ctx.p;
        FieldElem {
            ctx: self.ctx.clone(),
            c: self.c.iter().map(|&a| fp::sub(0, a, p)).collect(),
        }
    }

    /// Multiplication by an element of the prime field.
    pub fn scale(&self, k: u32) -> Self {
        let p = self.ctx.p;
        FieldElem {
            ctx: self.ctx.clone(),
            c: self.c.iter().map(|&a| fp::mul(a, k % p, p)).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.ctx);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Extended Euclid in F_p[x] against the modulus.
        let p = self.ctx.p;
        let mut a = self.c.clone();
        fp::trim(&mut a);
        let (mut r0, mut r1) = (self.ctx.modulus.clone(), a);
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = fp::poly_divrem(&r0, &r1, p);
            let s = fp::poly_sub(&s0, &fp::poly_mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant.
        let k = fp::inv(r0[0], p);
        let scaled: Vec<u32> = s0.iter().map(|&x| fp::mul(x, k, p)).collect();
        Ok(Self::from_poly(&self.ctx, &scaled))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inv()?)
    }

    /// `x^p`.
    pub fn frobenius(&self) -> Self {
        FieldElem {
            ctx: self.ctx.clone(),
            c: self.ctx.apply(&self.ctx.frob, &self.c),
        }
    }

    /// The unique `y` with `y^p = x`.
    pub fn inv_frobenius(&self) -> Self {
        FieldElem {
            ctx: self.ctx.clone(),
            c: self.ctx.apply(&self.ctx.inv_frob, &self.c),
        }
    }

    /// `x^(p^k)` for any integer `k` (negative powers are iterated p-th roots).
    pub fn frob_pow(&self, k: i64) -> Self {
        let n = self.ctx.degree as i64;
        let k = k.rem_euclid(n);
        let mut x = self.clone();
        if k <= n / 2 {
            for _ in 0..k {
                x = x.frobenius();
            }
        } else {
            for _ in 0..(n - k) {
                x = x.inv_frobenius();
            }
        }
        x
    }

    /// Trace down to F_p.
    pub fn trace_to_prime(&self) -> u32 {
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..self.ctx.degree {
            cur = cur.frobenius();
            acc = &acc + &cur;
        }
        acc.as_prime().expect("trace lands in the prime field")
    }

    /// Norm down to the subfield of degree `sub_degree`.
    pub fn norm_to_prime_from(&self, sub_degree: usize) -> Result<Self> {
        let n = self.ctx.degree;
        if sub_degree == 0 || n % sub_degree != 0 {
            return Err(Error::BadDegree {
                sub: sub_degree,
                degree: n,
            });
        }
        let mut acc = Self::one(&self.ctx);
        let mut cur = self.clone();
        for _ in 0..n / sub_degree {
            acc = &acc * &cur;
            cur = cur.frob_pow(sub_degree as i64);
        }
        Ok(acc)
    }

    /// Image under the canonical embedding into `dst`.
    pub fn embed_into(&self, dst: &Field) -> Result<Self> {
        embed(&self.ctx, dst, self)
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &'a FieldElem) -> FieldElem {
        self.try_add(rhs).expect("field context mismatch")
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &'a FieldElem) -> FieldElem {
        self.try_sub(rhs).expect("field context mismatch")
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &'a FieldElem) -> FieldElem {
        self.try_mul(rhs).expect("field context mismatch")
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::neg(self)
    }
}

/// Ring embedding F_{p^n} -> F_{p^N} for `n | N`.
///
/// The generator of `src` is sent to the lexicographically smallest root of
/// `src`'s modulus in `dst` among those compatible with the embeddings of
/// every intermediate subfield, so composing embeddings along a divisibility
/// chain agrees with the direct one.
pub fn embed(src: &Field, dst: &Field, x: &FieldElem) -> Result<FieldElem> {
    check_ctx(src, &x.ctx)?;
    if same_ctx(src, dst) {
        return Ok(x.clone());
    }
    if src.p != dst.p || dst.degree % src.degree != 0 {
        return Err(Error::BadDegree {
            sub: src.degree,
            degree: dst.degree,
        });
    }
    if src.degree == 1 {
        return Ok(FieldElem::from_prime(dst, x.c[0] as i64));
    }
    let gamma = FieldElem {
        ctx: dst.clone(),
        c: generator_image(src, dst)?,
    };
    // Horner in gamma.
    let mut acc = FieldElem::zero(dst);
    for &d in x.c.iter().rev() {
        acc = &(&acc * &gamma) + &FieldElem::from_prime(dst, d as i64);
    }
    Ok(acc)
}

fn generator_image(src: &Field, dst: &Field) -> Result<Vec<u32>> {
    let key = (src.p, src.degree, dst.degree);
    if let Some(v) = embed_cache().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let n = src.degree;
    // Constraints from every intermediate subfield F_{p^d}, 1 < d < n, d | n:
    // the image of g_d computed through src must equal its direct image.
    let mut constraints = Vec::new();
    for d in (2..n).filter(|d| n % d == 0) {
        let sub = make_field_capped(src.p, d, usize::MAX)?;
        let beta = generator_image(&sub, src)?;
        let delta = FieldElem {
            ctx: dst.clone(),
            c: generator_image(&sub, dst)?,
        };
        constraints.push((beta, delta));
    }
    let modulus: Vec<FieldElem> = src
        .modulus
        .iter()
        .map(|&m| FieldElem::from_prime(dst, m as i64))
        .collect();
    let root = find_root(&modulus)?;
    let mut best: Option<FieldElem> = None;
    let mut conj = root;
    for _ in 0..n {
        let ok = constraints
            .iter()
            .all(|(beta, delta)| horner(beta, &conj) == *delta);
        if ok && best.as_ref().map_or(true, |b| conj < *b) {
            best = Some(conj.clone());
        }
        conj = conj.frobenius();
    }
    let best = best.ok_or_else(|| Error::Internal("no compatible root for embedding".into()))?;
    embed_cache().write().unwrap().insert(key, best.c.clone());
    Ok(best.c)
}

fn horner(digits: &[u32], x: &FieldElem) -> FieldElem {
    let mut acc = FieldElem::zero(&x.ctx);
    for &d in digits.iter().rev() {
        acc = &(&acc * x) + &FieldElem::from_prime(&x.ctx, d as i64);
    }
    acc
}

// Dense polynomials over an extension field, little-endian, trimmed.
type ExtPoly = Vec<FieldElem>;

fn ext_trim(a: &mut ExtPoly) {
    while a.last().is_some_and(FieldElem::is_zero) {
        a.pop();
    }
}

fn ext_mul(a: &ExtPoly, b: &ExtPoly) -> ExtPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let ctx = &a[0].ctx;
    let mut out = vec![FieldElem::zero(ctx); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    ext_trim(&mut out);
    out
}

fn ext_rem(a: &ExtPoly, m: &ExtPoly) -> ExtPoly {
    let mut r = a.clone();
    ext_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = m[dm].inv().expect("trimmed divisor");
    while r.len() > dm {
        let top = r.len() - 1;
        let c = &r[top] * &lead_inv;
        for (i, mi) in m.iter().enumerate() {
            r[top - dm + i] = &r[top - dm + i] - &(&c * mi);
        }
        r.pop();
        ext_trim(&mut r);
    }
    r
}

fn ext_gcd(a: &ExtPoly, b: &ExtPoly) -> ExtPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    ext_trim(&mut x);
    ext_trim(&mut y);
    while !y.is_empty() {
        let r = ext_rem(&x, &y);
        x = std::mem::replace(&mut y, r);
    }
    if let Some(lead) = x.last().cloned() {
        let li = lead.inv().expect("nonzero");
        for c in x.iter_mut() {
            *c = &*c * &li;
        }
    }
    x
}

fn ext_pow_p(a: &ExtPoly, m: &ExtPoly) -> ExtPoly {
    let p = a.first().map_or(2, |e| e.ctx.p);
    let mut e = p as u64;
    let mut acc: ExtPoly = vec![FieldElem::one(&m[0].ctx)];
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = ext_rem(&ext_mul(&acc, &b), m);
        }
        e >>= 1;
        if e > 0 {
            b = ext_rem(&ext_mul(&b, &b), m);
        }
    }
    acc
}

/// One root of a squarefree polynomial that splits into linear factors,
/// found by splitting with absolute traces `Tr(delta * x)`.
fn find_root(poly: &ExtPoly) -> Result<FieldElem> {
    let ctx = poly[0].ctx.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x726f_6f74);
    let mut f = poly.clone();
    ext_trim(&mut f);
    let mut attempts = 0;
    while f.len() > 2 {
        attempts += 1;
        if attempts > 200 {
            return Err(Error::Internal("root splitting did not converge".into()));
        }
        let delta = FieldElem::random_nonzero(&ctx, &mut rng);
        let mut t = ext_rem(&vec![FieldElem::zero(&ctx), delta], &f);
        let mut h = t.clone();
        for _ in 1..ctx.degree {
            t = ext_pow_p(&t, &f);
            let len = h.len().max(t.len());
            h.resize(len, FieldElem::zero(&ctx));
            for (hi, ti) in h.iter_mut().zip(t.iter()) {
                *hi = &*hi + ti;
            }
            ext_trim(&mut h);
        }
        let mut smallest: Option<ExtPoly> = None;
        for c in 0..ctx.p {
            let mut hc = h.clone();
            if hc.is_empty() {
                hc.push(FieldElem::zero(&ctx));
            }
            hc[0] = &hc[0] - &FieldElem::from_prime(&ctx, c as i64);
            ext_trim(&mut hc);
            let g = ext_gcd(&f, &hc);
            if g.len() > 1 && g.len() < f.len() && smallest.as_ref().map_or(true, |s| g.len() < s.len()) {
                smallest = Some(g);
            }
        }
        if let Some(g) = smallest {
            f = g;
        }
    }
    if f.len() != 2 {
        return Err(Error::Internal("polynomial has no root".into()));
    }
    let inv = f[1].inv()?;
    Ok(-&(&f[0] * &inv))
}

/// F_p-basis of the kernel of an F_p-linear self-map of the field.
pub fn fp_kernel<F>(ctx: &Field, op: F) -> Result<Vec<FieldElem>>
where
    F: Fn(&FieldElem) -> FieldElem,
{
    let basis = fp_kernel_vec(ctx, 1, |v| vec![op(&v[0])])?;
    Ok(basis.into_iter().map(|mut v| v.remove(0)).collect())
}

/// F_p-basis of the kernel of an F_p-linear map on `ctx^dim`.
///
/// Linearity is spot-checked on 16 pseudo-random pairs before the matrix of
/// the map is assembled and row-reduced.
pub fn fp_kernel_vec<F>(ctx: &Field, dim: usize, op: F) -> Result<Vec<Vec<FieldElem>>>
where
    F: Fn(&[FieldElem]) -> Vec<FieldElem>,
{
    let p = ctx.p;
    let n = ctx.degree;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b65_726e);
    let rand_vec = |rng: &mut ChaCha8Rng| -> Vec<FieldElem> {
        (0..dim).map(|_| FieldElem::random(ctx, rng)).collect()
    };
    for _ in 0..16 {
        let a = rand_vec(&mut rng);
        let b = rand_vec(&mut rng);
        let k = rng.gen_range(0..p);
        let sum: Vec<FieldElem> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = op(&sum);
        let (oa, ob) = (op(&a), op(&b));
        if lhs.len() != oa.len() || lhs.iter().zip(oa.iter().zip(&ob)).any(|(l, (x, y))| *l != x + y) {
            return Err(Error::NotLinear);
        }
        let ka: Vec<FieldElem> = a.iter().map(|x| x.scale(k)).collect();
        if op(&ka).iter().zip(&oa).any(|(l, x)| *l != x.scale(k)) {
            return Err(Error::NotLinear);
        }
    }
    let cols = dim * n;
    let mut columns = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = vec![FieldElem::zero(ctx); dim];
        v[j / n].c[j % n] = 1;
        let img = op(&v);
        let col: Vec<u32> = img.iter().flat_map(|e| e.c.iter().copied()).collect();
        columns.push(col);
    }
    let out_rows = columns.first().map_or(0, Vec::len);
    let rows: Vec<Vec<u32>> = (0..out_rows)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let null = fp::nullspace(&rows, cols, p);
    Ok(null
        .into_iter()
        .map(|v| {
            (0..dim)
                .map(|b| FieldElem {
                    ctx: ctx.clone(),
                    c: v[b * n..(b + 1) * n].to_vec(),
                })
                .collect()
        })
        .collect())
}
