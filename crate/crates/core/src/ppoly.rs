//! Polynomials with exponents in `Z[1/p]`, nonnegative, over a finite field.
//!
//! These carry the explicit Artin-Schreier solutions `g(u, v)` and `r(x)`:
//! for an Ore element `f`, `g^p - g = f(u) v - u f*(v)` and, when `f` is
//! skew, `r^p - r = x f(x)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{check_ctx, Field, FieldElem};
use crate::ore::{OreMatrix, OrePoly};

/// The exponent `num / p^e`, normalized so that `p` does not divide `num`
/// unless `e = 0`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PExp {
    pub num: u128,
    pub e: u32,
}

impl PExp {
    pub const ZERO: PExp = PExp { num: 0, e: 0 };

    pub fn new(mut num: u128, mut e: u32, p: u32) -> Self {
        let p = p as u128;
        if num == 0 {
            return Self::ZERO;
        }
        while e > 0 && num % p == 0 {
            num /= p;
            e -= 1;
        }
        PExp { num, e }
    }

    pub fn int(n: u128) -> Self {
        PExp { num: n, e: 0 }
    }

    /// `p^k` for any integer `k`.
    pub fn p_power(k: i64, p: u32) -> Self {
        if k >= 0 {
            PExp::int((p as u128).pow(k as u32))
        } else {
            PExp {
                num: 1,
                e: (-k) as u32,
            }
        }
    }

    pub fn add(self, other: Self, p: u32) -> Self {
        let e = self.e.max(other.e);
        let pp = p as u128;
        let a = self.num * pp.pow(e - self.e);
        let b = other.num * pp.pow(e - other.e);
        PExp::new(a + b, e, p)
    }

    /// `p^k * self`.
    pub fn times_p_power(self, k: i64, p: u32) -> Self {
        if self.num == 0 {
            return self;
        }
        let shifted = self.e as i64 - k;
        if shifted >= 0 {
            PExp::new(self.num, shifted as u32, p)
        } else {
            PExp::int(self.num * (p as u128).pow((-shifted) as u32))
        }
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }
}

impl fmt::Display for PExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/p^{}", self.num, self.e)
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct PerfectPoly {
    ctx: Field,
    nvars: usize,
    terms: BTreeMap<Vec<PExp>, FieldElem>,
}

impl fmt::Debug for PerfectPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(exps, c)| {
                let mono: Vec<String> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| format!("x{i}^({x})"))
                    .collect();
                format!("{:?}*{}", c.coeffs(), mono.join("*"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl PerfectPoly {
    pub fn zero(ctx: &Field, nvars: usize) -> Self {
        PerfectPoly {
            ctx: ctx.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: FieldElem, nvars: usize) -> Self {
        Self::monomial(c, vec![PExp::ZERO; nvars])
    }

    pub fn monomial(c: FieldElem, exps: Vec<PExp>) -> Self {
        let mut h = Self::zero(c.ctx(), exps.len());
        h.add_term(exps, &c);
        h
    }

    /// The coordinate function `x_i`.
    pub fn var(ctx: &Field, nvars: usize, i: usize) -> Self {
        let mut exps = vec![PExp::ZERO; nvars];
        exps[i] = PExp::int(1);
        Self::monomial(FieldElem::one(ctx), exps)
    }

    /// `f(x_i) = sum c_j x_i^(p^j)` as a polynomial.
    pub fn additive(f: &OrePoly, nvars: usize, i: usize) -> Self {
        let p = f.p();
        let mut h = Self::zero(f.ctx(), nvars);
        for (j, c) in f.terms() {
            let mut exps = vec![PExp::ZERO; nvars];
            exps[i] = PExp::p_power(j, p);
            h.add_term(exps, c);
        }
        h
    }

    pub fn from_terms<I>(ctx: &Field, nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<PExp>, FieldElem)>,
    {
        let p = ctx.p();
        let mut h = Self::zero(ctx, nvars);
        for (exps, c) in terms {
            check_ctx(ctx, c.ctx())?;
            if exps.len() != nvars {
                return Err(Error::Invalid(format!(
                    "monomial with {} exponents in {nvars} variables",
                    exps.len()
                )));
            }
            let exps = exps.into_iter().map(|x| PExp::new(x.num, x.e, p)).collect();
            h.add_term(exps, &c);
        }
        Ok(h)
    }

    fn add_term(&mut self, exps: Vec<PExp>, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&exps) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, sum);
        }
    }

    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[PExp], &FieldElem)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        check_ctx(&self.ctx, &other.ctx)?;
        if self.nvars != other.nvars {
            return Err(Error::Invalid(format!(
                "variable count mismatch {} vs {}",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PerfectPoly {
            ctx: self.ctx.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let p = self.ctx.p();
        let mut out = Self::zero(&self.ctx, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps = ea.iter().zip(eb).map(|(x, y)| x.add(*y, p)).collect();
                out.add_term(exps, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// `h^p`, computed termwise.
    pub fn frobenius_image(&self) -> Self {
        let p = self.ctx.p();
        let mut out = Self::zero(&self.ctx, self.nvars);
        for (e, c) in &self.terms {
            let exps = e.iter().map(|x| x.times_p_power(1, p)).collect();
            out.add_term(exps, &c.frobenius());
        }
        out
    }

    /// `h^p - h`.
    pub fn frob_minus_id(&self) -> Self {
        self.frobenius_image().try_sub(self).expect("same shape")
    }

    /// Renames variable `i` to `map[i]` in a polynomial with `nvars` variables.
    pub fn relabel(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let p = self.ctx.p();
        let mut out = Self::zero(&self.ctx, nvars);
        for (e, c) in &self.terms {
            let mut exps = vec![PExp::ZERO; nvars];
            for (i, x) in e.iter().enumerate() {
                exps[map[i]] = exps[map[i]].add(*x, p);
            }
            out.add_term(exps, c);
        }
        out
    }

    pub fn embed_into(&self, dst: &Field) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(e.clone(), c.embed_into(dst)?);
        }
        Ok(PerfectPoly {
            ctx: dst.clone(),
            nvars: self.nvars,
            terms,
        })
    }

    /// Evaluation; `x^(num/p^e)` is `inv_frobenius^e(x^num)`.
    pub fn p_eval(&self, point: &[FieldElem]) -> Result<FieldElem> {
        if point.len() != self.nvars {
            return Err(Error::Invalid(format!(
                "{} coordinates for {} variables",
                point.len(),
                self.nvars
            )));
        }
        let Some(first) = point.first() else {
            return Ok(self
                .terms
                .values()
                .next()
                .cloned()
                .unwrap_or_else(|| FieldElem::zero(&self.ctx)));
        };
        let field = first.ctx().clone();
        for x in point {
            check_ctx(&field, x.ctx())?;
        }
        if check_ctx(&self.ctx, &field).is_err() {
            return self.embed_into(&field)?.p_eval(point);
        }
        let group_order = field.order() - 1;
        let mut acc = FieldElem::zero(&field);
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, ex) in point.iter().zip(e) {
                term = &term * &monomial_value(x, *ex, group_order);
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

fn monomial_value(x: &FieldElem, ex: PExp, group_order: u128) -> FieldElem {
    if ex.num == 0 {
        return FieldElem::one(x.ctx());
    }
    if x.is_zero() {
        return x.clone();
    }
    // x^num as a product of Frobenius images over the base-p digits of num;
    // the exponents arising here have few nonzero digits.
    let p = x.p() as u128;
    let mut rest = ex.num % group_order;
    let mut acc = FieldElem::one(x.ctx());
    let mut cur = x.clone();
    while rest > 0 {
        let digit = (rest % p) as u64;
        if digit > 0 {
            acc = &acc * &cur.pow(digit);
        }
        rest /= p;
        if rest > 0 {
            cur = cur.frobenius();
        }
    }
    acc.frob_pow(-(ex.e as i64))
}

/// `g(u, v)` with `g(0, 0) = 0` and `g^p - g = f(u) v - u f*(v)`; variables
/// are `(u, v)`.
pub fn solve_g(f: &OrePoly) -> PerfectPoly {
    let p = f.p();
    let mut g = PerfectPoly::zero(f.ctx(), 2);
    for (n, a) in f.terms() {
        if n > 0 {
            for s in 1..=n {
                let exps = vec![PExp::p_power(n - s, p), PExp::p_power(-s, p)];
                g.add_term(exps, &a.frob_pow(-s));
            }
        } else if n < 0 {
            let m = -n;
            for s in 0..m {
                let exps = vec![PExp::p_power(s - m, p), PExp::p_power(s, p)];
                g.add_term(exps, &-&a.frob_pow(s));
            }
        }
    }
    g
}

/// `r(x)` with `r(0) = 0` and `r^p - r = x f(x)`, for skew `f`.
pub fn solve_r(f: &OrePoly) -> Result<PerfectPoly> {
    if !f.is_skew() {
        return Err(Error::NotSkew);
    }
    let p = f.p();
    let mut r = PerfectPoly::zero(f.ctx(), 1);
    for (j, c) in f.terms().filter(|(j, _)| *j > 0) {
        for s in 1..=j {
            let ex = PExp::p_power(-s, p).add(PExp::p_power(j - s, p), p);
            r.add_term(vec![ex], &c.frob_pow(-s));
        }
    }
    Ok(r)
}

/// `x f(x)`.
pub fn r_target(f: &OrePoly) -> PerfectPoly {
    let x = PerfectPoly::var(f.ctx(), 1, 0);
    x.try_mul(&PerfectPoly::additive(f, 1, 0)).expect("same shape")
}

/// `f(u) v - u f*(v)`.
pub fn g_target(f: &OrePoly) -> PerfectPoly {
    let ctx = f.ctx();
    let u = PerfectPoly::var(ctx, 2, 0);
    let v = PerfectPoly::var(ctx, 2, 1);
    let left = PerfectPoly::additive(f, 2, 0).try_mul(&v).unwrap();
    let right = u.try_mul(&PerfectPoly::additive(&f.adjoint(), 2, 1)).unwrap();
    left.try_sub(&right).unwrap()
}

/// `sum_i x_i (F x)_i` in variables `x_0..x_{d-1}`.
pub fn r_target_matrix(m: &OreMatrix) -> PerfectPoly {
    let d = m.dim();
    let ctx = m.ctx();
    let mut acc = PerfectPoly::zero(ctx, d);
    for i in 0..d {
        let xi = PerfectPoly::var(ctx, d, i);
        for j in 0..d {
            let term = xi.try_mul(&PerfectPoly::additive(m.get(i, j), d, j)).unwrap();
            acc = acc.try_add(&term).unwrap();
        }
    }
    acc
}

/// `(F u) . v - u . (F* v)` in variables `u_0..u_{d-1}, v_0..v_{d-1}`.
pub fn g_target_matrix(m: &OreMatrix) -> PerfectPoly {
    let d = m.dim();
    let ctx = m.ctx();
    let adj = m.m_adjoint();
    let mut acc = PerfectPoly::zero(ctx, 2 * d);
    for i in 0..d {
        let vi = PerfectPoly::var(ctx, 2 * d, d + i);
        let ui = PerfectPoly::var(ctx, 2 * d, i);
        for j in 0..d {
            let fu = PerfectPoly::additive(m.get(i, j), 2 * d, j);
            let fv = PerfectPoly::additive(adj.get(i, j), 2 * d, d + j);
            acc = acc.try_add(&fu.try_mul(&vi).unwrap()).unwrap();
            acc = acc.try_sub(&ui.try_mul(&fv).unwrap()).unwrap();
        }
    }
    acc
}

/// Multivariate `r` for a skew matrix: diagonal entries contribute `solve_r`
/// in their own variable, each pair `i < j` contributes `solve_g(F_ij)` at
/// `(u, v) = (x_j, x_i)`. The result is checked against `r_target_matrix`.
pub fn solve_r_matrix(m: &OreMatrix) -> Result<PerfectPoly> {
    if !m.is_skew_matrix() {
        return Err(Error::NotSkew);
    }
    let d = m.dim();
    let mut r = PerfectPoly::zero(m.ctx(), d);
    for i in 0..d {
        r = r.try_add(&solve_r(m.get(i, i))?.relabel(d, &[i]))?;
        for j in i + 1..d {
            r = r.try_add(&solve_g(m.get(i, j)).relabel(d, &[j, i]))?;
        }
    }
    if r.frob_minus_id() != r_target_matrix(m) {
        return Err(Error::Internal("multivariate r failed verification".into()));
    }
    Ok(r)
}

/// Multivariate `g`: entry `(i, j)` contributes `solve_g(F_ij)` at
/// `(u, v) = (u_j, v_i)`. Checked against `g_target_matrix`.
pub fn solve_g_matrix(m: &OreMatrix) -> Result<PerfectPoly> {
    if !m.is_skew_matrix() {
        return Err(Error::NotSkew);
    }
    let d = m.dim();
    let mut g = PerfectPoly::zero(m.ctx(), 2 * d);
    for i in 0..d {
        for j in 0..d {
            g = g.try_add(&solve_g(m.get(i, j)).relabel(2 * d, &[j, d + i]))?;
        }
    }
    if g.frob_minus_id() != g_target_matrix(m) {
        return Err(Error::Internal("multivariate g failed verification".into()));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn ex(num: u128, e: u32) -> PExp {
        PExp { num, e }
    }

    #[test]
    fn exponent_normalization() {
        assert_eq!(PExp::new(9, 2, 3), PExp::int(1));
        assert_eq!(PExp::new(6, 2, 3), ex(2, 1));
        assert_eq!(PExp::new(0, 5, 3), PExp::ZERO);
        // 1 + 1/3 = 4/3
        assert_eq!(PExp::int(1).add(ex(1, 1), 3), ex(4, 1));
        // 1/3 + 2/3 = 1
        assert_eq!(ex(1, 1).add(ex(2, 1), 3), PExp::int(1));
        assert_eq!(ex(1, 2).times_p_power(3, 3), PExp::int(3));
    }

    #[test]
    fn fractional_evaluation() {
        let f = make_field(3, 4).unwrap();
        let a = FieldElem::generator(&f);
        let b = &a + &FieldElem::one(&f);
        let root = PerfectPoly::monomial(FieldElem::one(&f), vec![ex(1, 1)]);
        assert_eq!(root.p_eval(&[a.clone()]).unwrap(), a.inv_frobenius());
        let g = solve_g(&OrePoly::from_prime_terms(&f, &[(1, 1), (-1, -1)]));
        let expected = &(&a * &b.inv_frobenius()) + &(&a.inv_frobenius() * &b);
        assert_eq!(g.p_eval(&[a, b]).unwrap(), expected);
    }

    #[test]
    fn worked_example_solutions() {
        let f = make_field(3, 1).unwrap();
        let w = OrePoly::from_prime_terms(&f, &[(1, 1), (-1, -1)]);
        let one = FieldElem::one(&f);
        let g = solve_g(&w);
        let expected = PerfectPoly::from_terms(
            &f,
            2,
            [
                (vec![PExp::int(1), ex(1, 1)], one.clone()),
                (vec![ex(1, 1), PExp::int(1)], one.clone()),
            ],
        )
        .unwrap();
        assert_eq!(g, expected);
        let r = solve_r(&w).unwrap();
        assert_eq!(r, PerfectPoly::monomial(one, vec![ex(4, 1)]));
        assert!(solve_g(&OrePoly::monomial(FieldElem::generator(&f), 0)).is_zero());
        assert!(solve_r(&OrePoly::zero(&f)).unwrap().is_zero());
    }

    #[test]
    fn frob_minus_id_examples() {
        let f = make_field(5, 1).unwrap();
        assert!(PerfectPoly::zero(&f, 1).frob_minus_id().is_zero());
        let root = PerfectPoly::monomial(FieldElem::one(&f), vec![ex(1, 1)]);
        let expected = PerfectPoly::var(&f, 1, 0).try_sub(&root).unwrap();
        assert_eq!(root.frob_minus_id(), expected);
    }

    #[test]
    fn solve_r_rejects_non_skew() {
        let f = make_field(3, 1).unwrap();
        let non = OrePoly::from_prime_terms(&f, &[(1, 1)]);
        assert!(matches!(solve_r(&non), Err(Error::NotSkew)));
    }

    #[test]
    fn solutions_satisfy_their_equations() {
        for (p, m) in [(2, 2), (3, 2), (5, 1)] {
            let f = make_field(p, m).unwrap();
            for seed in 0..10 {
                let s = OrePoly::random_skew(&f, 1 + (seed % 3) as u32, seed);
                assert_eq!(solve_r(&s).unwrap().frob_minus_id(), r_target(&s));
                assert_eq!(solve_g(&s).frob_minus_id(), g_target(&s));
            }
        }
    }

    #[test]
    fn hyperbolic_block_solvers_verify() {
        let f = make_field(3, 1).unwrap();
        let tau = OrePoly::tau(&f);
        let m = OreMatrix::hyperbolic_block(&tau);
        assert!(solve_r_matrix(&m).is_ok());
        assert!(solve_g_matrix(&m).is_ok());
    }

    #[test]
    fn one_by_one_matrix_reduces_to_scalar_solvers() {
        let f = make_field(3, 2).unwrap();
        let s = OrePoly::random_skew(&f, 2, 4);
        let m = OreMatrix::from_poly(&s);
        assert_eq!(solve_r_matrix(&m).unwrap(), solve_r(&s).unwrap());
        assert_eq!(solve_g_matrix(&m).unwrap(), solve_g(&s));
    }
}
