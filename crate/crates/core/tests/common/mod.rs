//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the Frobenius matrices, the subgroup searches or the
//! cyclotomic arithmetic of the library; each check is redone the slow way.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use biext_core::ppoly::PExp;
use biext_core::{FieldElem, MetricGroup, OreMatrix, OrePoly, PerfectPoly, QpZp};

/// `x^(p^k)` by repeated `p`-th powers, `k` taken modulo the field degree.
pub fn frob(x: &FieldElem, k: i64) -> FieldElem {
    let n = x.ctx().degree() as i64;
    let p = x.p() as u64;
    let mut y = x.clone();
    for _ in 0..k.rem_euclid(n) {
        y = y.pow(p);
    }
    y
}

/// `f(x) = sum c_i x^(p^i)`.
pub fn act(f: &OrePoly, x: &FieldElem) -> FieldElem {
    let mut acc = FieldElem::zero(x.ctx());
    for (e, c) in f.terms() {
        let c = c.embed_into(x.ctx()).expect("coefficient embeds");
        acc = &acc + &(&c * &frob(x, e));
    }
    acc
}

/// Absolute trace to the prime field.
pub fn trace(x: &FieldElem) -> u32 {
    let n = x.ctx().degree() as i64;
    let mut acc = FieldElem::zero(x.ctx());
    for i in 0..n {
        acc = &acc + &frob(x, i);
    }
    acc.as_prime().expect("trace lies in F_p")
}

/// Values `x` with `f(x) = 0`, by scanning the whole field.
pub fn roots_by_scan(f: &OrePoly, field: &biext_core::Field) -> usize {
    let order = field.order() as u64;
    (0..order)
        .filter(|&i| act(f, &FieldElem::from_index(field, i)).is_zero())
        .count()
}

/// `sum_a exp(2 pi i q(a))` in floating point.
pub fn gauss_float(g: &MetricGroup) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for a in 0..g.size() {
        let (num, den) = g.q_value(a).fraction();
        let t = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
        re += t.cos();
        im += t.sin();
    }
    (re, im)
}

/// Mixed-radix arithmetic on element indices, written out separately from the
/// library's.
pub struct Arith {
    pub orders: Vec<u64>,
    pub size: usize,
    table: Vec<usize>,
}

impl Arith {
    pub fn new(g: &MetricGroup) -> Self {
        let mut ar = Arith {
            orders: g.orders().to_vec(),
            size: g.size(),
            table: Vec::new(),
        };
        // Small groups get a full addition table.
        if ar.size <= 1024 {
            let n = ar.size;
            ar.table = (0..n * n).map(|i| ar.add_digits(i / n, i % n)).collect();
        }
        ar
    }

    fn digits(&self, mut a: usize) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&o| {
                let d = a as u64 % o;
                a /= o as usize;
                d
            })
            .collect()
    }

    fn undigits(&self, d: &[u64]) -> usize {
        let mut a = 0u64;
        for (x, &o) in d.iter().zip(&self.orders).rev() {
            a = a * o + x;
        }
        a as usize
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.table.is_empty() {
            self.add_digits(a, b)
        } else {
            self.table[a * self.size + b]
        }
    }

    fn add_digits(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = x
            .iter()
            .zip(&y)
            .zip(&self.orders)
            .map(|((u, v), o)| (u + v) % o)
            .collect();
        self.undigits(&s)
    }

    /// The subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.size];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.add(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.size).filter(|&x| seen[x]).collect()
    }

    /// Every subgroup, found by adjoining one element at a time.
    pub fn all_subgroups(&self) -> Vec<Vec<usize>> {
        let mut found = BTreeSet::new();
        let start = vec![0usize];
        found.insert(start.clone());
        let mut queue = VecDeque::from([start]);
        while let Some(h) = queue.pop_front() {
            for a in 0..self.size {
                if h.binary_search(&a).is_ok() {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(a);
                let j = self.closure(&gens);
                if found.insert(j.clone()) {
                    queue.push_back(j);
                }
            }
        }
        found.into_iter().collect()
    }
}

pub fn b(g: &MetricGroup, ar: &Arith, x: usize, y: usize) -> QpZp {
    g.q_value(ar.add(x, y)).add(g.q_value(x).neg()).add(g.q_value(y).neg())
}

pub fn is_isotropic(g: &MetricGroup, h: &[usize]) -> bool {
    h.iter().all(|&a| g.q_value(a).is_zero())
}

pub fn perp(g: &MetricGroup, ar: &Arith, h: &[usize]) -> Vec<usize> {
    (0..g.size())
        .filter(|&x| h.iter().all(|&y| b(g, ar, x, y).is_zero()))
        .collect()
}

/// Size of `H^perp / H` and how often each value of `q` occurs on it.
pub fn subquotient_profile(g: &MetricGroup, h: &[usize]) -> (usize, BTreeMap<QpZp, usize>) {
    let ar = Arith::new(g);
    let hp = perp(g, &ar, h);
    let mut seen = BTreeSet::new();
    let mut hist = BTreeMap::new();
    for &x in &hp {
        if seen.contains(&x) {
            continue;
        }
        for &y in h {
            seen.insert(ar.add(x, y));
        }
        *hist.entry(g.q_value(x)).or_insert(0) += 1;
    }
    (hp.len() / h.len(), hist)
}

/// `x * f(x)` written directly as `sum c_i x^(1 + p^i)`.
pub fn r_target(f: &OrePoly) -> PerfectPoly {
    let p = f.p();
    let terms = f.terms().map(|(e, c)| {
        let exp = PExp::int(1).add(PExp::p_power(e, p), p);
        (vec![exp], c.clone())
    });
    PerfectPoly::from_terms(f.ctx(), 1, terms.collect::<Vec<_>>()).unwrap()
}

/// `f(u) v - u f*(v)` in variables `(u, v)`; `f*` written out termwise as
/// `sum c_i^(p^-i) v^(p^-i)`.
pub fn g_target(f: &OrePoly) -> PerfectPoly {
    let p = f.p();
    let mut terms = Vec::new();
    for (e, c) in f.terms() {
        terms.push((vec![PExp::p_power(e, p), PExp::int(1)], c.clone()));
        terms.push((vec![PExp::int(1), PExp::p_power(-e, p)], frob(c, -e).neg()));
    }
    PerfectPoly::from_terms(f.ctx(), 2, terms).unwrap()
}

/// `sum_ij x_i F_ij(x_j)` in `d` variables.
pub fn r_target_matrix(m: &OreMatrix) -> PerfectPoly {
    let p = m.ctx().p();
    let d = m.dim();
    let mut terms = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for (e, c) in m.get(i, j).terms() {
                let mut exps = vec![PExp::ZERO; d];
                exps[i] = exps[i].add(PExp::int(1), p);
                exps[j] = exps[j].add(PExp::p_power(e, p), p);
                terms.push((exps, c.clone()));
            }
        }
    }
    PerfectPoly::from_terms(m.ctx(), d, terms).unwrap()
}

/// `sum_ij v_i F_ij(u_j) - u_j F_ij*(v_i)`, with `u` first then `v`.
pub fn g_target_matrix(m: &OreMatrix) -> PerfectPoly {
    let p = m.ctx().p();
    let d = m.dim();
    let mut terms = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for (e, c) in m.get(i, j).terms() {
                let mut exps = vec![PExp::ZERO; 2 * d];
                exps[d + i] = PExp::int(1);
                exps[j] = PExp::p_power(e, p);
                terms.push((exps, c.clone()));
                let mut exps = vec![PExp::ZERO; 2 * d];
                exps[j] = PExp::int(1);
                exps[d + i] = PExp::p_power(-e, p);
                terms.push((exps, frob(c, -e).neg()));
            }
        }
    }
    PerfectPoly::from_terms(m.ctx(), 2 * d, terms).unwrap()
}
