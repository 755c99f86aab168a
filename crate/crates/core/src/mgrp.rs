//! Finite abelian p-groups with quadratic forms valued in `Q_p/Z_p`.
//!
//! Elements of a [`MetricGroup`] are indices in mixed radix, little-endian
//! over the cyclic factors. The form is a full value table, so nothing here
//! assumes `p` odd.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::fp;
use crate::gf::{make_field, FieldElem};

/// Budgets for every search whose cost grows with the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Splitting fields are searched up to degree `max_ext * m`.
    pub max_ext: usize,
    /// Largest group on which subgroups are enumerated.
    pub enum_cap: usize,
    /// Largest group on which isomorphisms are searched.
    pub iso_cap: usize,
    /// Largest group whose Gauss sum is expanded.
    pub gauss_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_ext: 64,
            enum_cap: 4096,
            iso_cap: 1024,
            gauss_cap: 1_000_000,
        }
    }
}

fn cap_check(what: &'static str, needed: usize, cap: usize) -> Result<()> {
    if needed > cap {
        Err(Error::EnumerationCap { what, needed, cap })
    } else {
        Ok(())
    }
}

/// `num / p^k` in `Q_p/Z_p`, with `0 <= num < p^k` and `p` not dividing
/// `num` unless the value is zero (then `num = k = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QpZp {
    pub p: u32,
    pub num: u64,
    pub k: u32,
}

impl QpZp {
    pub fn zero(p: u32) -> Self {
        QpZp { p, num: 0, k: 0 }
    }

    pub fn new(p: u32, num: i64, k: u32) -> Self {
        let modulus = (p as i64).pow(k);
        let mut num = num.rem_euclid(modulus) as u64;
        let mut k = k;
        while k > 0 && num % p as u64 == 0 {
            num /= p as u64;
            k -= 1;
        }
        if num == 0 {
            k = 0;
        }
        QpZp { p, num, k }
    }

    /// The image of `x in F_p` under `1 -> 1/p`.
    pub fn from_prime(p: u32, x: u32) -> Self {
        Self::new(p, x as i64, 1)
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// `(numerator, denominator)` with the denominator `p^k`.
    pub fn fraction(self) -> (u64, u64) {
        (self.num, (self.p as u64).pow(self.k))
    }

    /// Numerator over `p^level`, for `level >= k`.
    pub fn scaled(self, level: u32) -> u64 {
        self.num * (self.p as u64).pow(level - self.k)
    }

    pub fn add(self, o: Self) -> Self {
        let k = self.k.max(o.k);
        Self::new(self.p, (self.scaled(k) + o.scaled(k)) as i64, k)
    }

    pub fn neg(self) -> Self {
        Self::new(self.p, -(self.num as i64), self.k)
    }
}

impl fmt::Display for QpZp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.fraction();
        if n == 0 {
            write!(f, "0")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

/// Results of the axiom checks in [`MetricGroup::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Validation {
    pub q_even: bool,
    pub b_biadditive: bool,
    pub nondegenerate: bool,
}

impl Validation {
    pub fn is_premetric(&self) -> bool {
        self.q_even && self.b_biadditive
    }

    pub fn is_metric(&self) -> bool {
        self.is_premetric() && self.nondegenerate
    }
}

/// Tie-breaking order for greedy searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchOrder {
    Forward,
    Reverse,
}

/// A subgroup, as the sorted list of its element indices.
pub type Subgroup = Vec<usize>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MetricGroup {
    p: u32,
    orders: Vec<u64>,
    strides: Vec<usize>,
    /// Values are `q[a] / p^level`.
    level: u32,
    modulus: u64,
    q: Vec<u64>,
}

impl MetricGroup {
    /// Builds from cyclic orders (each a power of `p` above 1) and the value of
    /// `q` on every element in index order.
    pub fn new(p: u32, orders: Vec<u64>, q: Vec<QpZp>) -> Result<Self> {
        if !fp::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        for &o in &orders {
            if o < p as u64 || !is_power_of(o, p as u64) {
                return Err(Error::Invalid(format!("cyclic order {o} is not a power of {p}")));
            }
        }
        let size = checked_size(&orders)?;
        if q.len() != size {
            return Err(Error::Invalid(format!(
                "{} values for a group of order {size}",
                q.len()
            )));
        }
        if let Some(v) = q.iter().find(|v| v.p != p) {
            return Err(Error::Invalid(format!("value {v} has prime {} not {p}", v.p)));
        }
        let level = q.iter().map(|v| v.k).max().unwrap_or(0);
        let scaled = q.iter().map(|v| v.scaled(level)).collect();
        Ok(Self::from_scaled(p, orders, level, scaled))
    }

    /// Builds the table by evaluating `f` on coordinate vectors.
    pub fn from_fn<F>(p: u32, orders: Vec<u64>, f: F) -> Result<Self>
    where
        F: Fn(&[u64]) -> QpZp,
    {
        let size = checked_size(&orders)?;
        let strides = strides_of(&orders);
        let q = (0..size)
            .map(|a| f(&decode(a, &orders, &strides)))
            .collect();
        Self::new(p, orders, q)
    }

    fn from_scaled(p: u32, orders: Vec<u64>, level: u32, q: Vec<u64>) -> Self {
        let strides = strides_of(&orders);
        let mut g = MetricGroup {
            p,
            orders,
            strides,
            level,
            modulus: (p as u64).pow(level),
            q,
        };
        // Keep the smallest common denominator so equal tables compare equal.
        while g.level > 0 && g.q.iter().all(|&v| v % p as u64 == 0) {
            for v in g.q.iter_mut() {
                *v /= p as u64;
            }
            g.level -= 1;
            g.modulus /= p as u64;
        }
        g
    }

    pub fn trivial(p: u32) -> Self {
        Self::from_scaled(p, Vec::new(), 0, vec![0])
    }

    /// `(F_{p^2}, i o Nm)`; element `(c0, c1)` is `c0 + c1 g` for the field
    /// generator `g`.
    pub fn norm_form_group(p: u32) -> Result<Self> {
        let f = make_field(p, 2)?;
        Self::from_fn(p, vec![p as u64; 2], |c| {
            let digits = [c[0] as u32, c[1] as u32];
            let x = FieldElem::from_coeffs(&f, &digits).expect("digits in range");
            let n = x.norm_to_prime_from(1).expect("1 divides 2");
            QpZp::from_prime(p, n.as_prime().expect("norm lies in F_p"))
        })
    }

    /// `(F_p^2, q(x, y) = xy/p)`.
    pub fn hyperbolic_plane(p: u32) -> Result<Self> {
        Self::from_fn(p, vec![p as u64; 2], |c| {
            QpZp::new(p, (c[0] * c[1]) as i64, 1)
        })
    }

    /// `(Z/p, q(x) = a x^2 / p)`.
    pub fn rank1(p: u32, a: u32) -> Result<Self> {
        Self::from_fn(p, vec![p as u64], |c| {
            QpZp::new(p, (a as u64 * c[0] * c[0]) as i64, 1)
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn size(&self) -> usize {
        self.q.len()
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Largest `k` with a value of denominator `p^k`.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn q_value(&self, a: usize) -> QpZp {
        QpZp::new(self.p, self.q[a] as i64, self.level)
    }

    /// `q(a)` as a numerator over `p^level`.
    pub fn q_scaled(&self, a: usize) -> u64 {
        self.q[a]
    }

    pub fn values(&self) -> impl Iterator<Item = QpZp> + '_ {
        (0..self.size()).map(|a| self.q_value(a))
    }

    pub fn coords(&self, a: usize) -> Vec<u64> {
        decode(a, &self.orders, &self.strides)
    }

    pub fn index(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.orders)
            .zip(&self.strides)
            .map(|((&c, &o), &s)| (c % o) as usize * s)
            .sum()
    }

    /// The `i`-th standard generator.
    pub fn generator(&self, i: usize) -> usize {
        self.strides[i]
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for ((&o, &s), _) in self.orders.iter().zip(&self.strides).zip(0..) {
            let da = (a / s) as u64 % o;
            let db = (b / s) as u64 % o;
            out += ((da + db) % o) as usize * s;
        }
        out
    }

    /// `a + e_i`, in constant time.
    fn add_gen(&self, a: usize, i: usize) -> usize {
        let s = self.strides[i];
        let o = self.orders[i];
        if (a / s) as u64 % o == o - 1 {
            a - (o as usize - 1) * s
        } else {
            a + s
        }
    }

    pub fn neg(&self, a: usize) -> usize {
        let mut out = 0;
        for (&o, &s) in self.orders.iter().zip(&self.strides) {
            let d = (a / s) as u64 % o;
            out += ((o - d) % o) as usize * s;
        }
        out
    }

    pub fn mul(&self, n: u64, a: usize) -> usize {
        let mut out = 0;
        for (&o, &s) in self.orders.iter().zip(&self.strides) {
            let d = (a / s) as u64 % o;
            out += ((d * (n % o)) % o) as usize * s;
        }
        out
    }

    pub fn order_of(&self, a: usize) -> u64 {
        let mut ord = 1;
        while self.mul(ord, a) != 0 {
            ord *= self.p as u64;
        }
        ord
    }

    /// `B(a, b) = q(a+b) - q(a) - q(b)` as a numerator over `p^level`.
    pub fn b_scaled(&self, a: usize, b: usize) -> u64 {
        let m = self.modulus;
        (self.q[self.add(a, b)] + 2 * m - self.q[a] - self.q[b]) % m
    }

    pub fn b_value(&self, a: usize, b: usize) -> QpZp {
        QpZp::new(self.p, self.b_scaled(a, b) as i64, self.level)
    }

    /// Exhaustive check of `q(-a) = q(a)`, biadditivity of `B`, and
    /// nondegeneracy.
    pub fn validate(&self) -> Validation {
        let n = self.size();
        let r = self.rank();
        let q_even = (0..n).all(|a| self.q[self.neg(a)] == self.q[a]) && self.q[0] == 0;
        let gen_b: Vec<Vec<u64>> = (0..r)
            .map(|i| (0..n).map(|c| self.b_scaled(self.generator(i), c)).collect())
            .collect();
        let m = self.modulus;
        // B(a + e_i, c) = B(a, c) + B(e_i, c) for every a, c and generator
        // e_i implies biadditivity, since B is symmetric by construction.
        let b_biadditive = (0..r).all(|i| {
            (0..n).all(|a| {
                let ai = self.add_gen(a, i);
                (0..n).all(|c| self.b_scaled(ai, c) == (self.b_scaled(a, c) + gen_b[i][c]) % m)
            })
        });
        let nondegenerate = (1..n).all(|a| (0..r).any(|i| gen_b[i][a] != 0));
        Validation {
            q_even,
            b_biadditive,
            nondegenerate,
        }
    }

    pub fn is_metric(&self) -> bool {
        self.validate().is_metric()
    }

    /// Orthogonal sum; coordinates of `self` come first.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::Invalid(format!("primes differ: {} vs {}", self.p, other.p)));
        }
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        let level = self.level.max(other.level);
        let (sa, sb) = (
            (self.p as u64).pow(level - self.level),
            (self.p as u64).pow(level - other.level),
        );
        let m = (self.p as u64).pow(level);
        let na = self.size();
        checked_size(&orders)?;
        let mut q = Vec::with_capacity(na * other.size());
        for b in 0..other.size() {
            for a in 0..na {
                q.push((self.q[a] * sa + other.q[b] * sb) % m);
            }
        }
        Ok(Self::from_scaled(self.p, orders, level, q))
    }

    /// `(A, -q)`.
    pub fn negated(&self) -> Self {
        let m = self.modulus;
        let q = self.q.iter().map(|&v| (m - v) % m).collect();
        Self::from_scaled(self.p, self.orders.clone(), self.level, q)
    }

    /// Subgroup generated by `gens`.
    pub fn span(&self, gens: &[usize]) -> Subgroup {
        let mut seen = vec![false; self.size()];
        seen[0] = true;
        let mut out = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.add(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_isotropic(&self, h: &[usize]) -> bool {
        h.iter().all(|&a| self.q[a] == 0)
    }

    /// `{a : B(a, h) = 0 for all h in H}`.
    pub fn orthogonal(&self, h: &[usize]) -> Subgroup {
        (0..self.size())
            .filter(|&a| h.iter().all(|&x| self.b_scaled(a, x) == 0))
            .collect()
    }

    /// Every isotropic subgroup, found by extending isotropic subgroups one
    /// element at a time. Fails when more than `max_count` are found.
    pub fn isotropic_subgroups(&self, max_count: usize, enum_cap: usize) -> Result<Vec<Subgroup>> {
        cap_check("isotropic subgroup enumeration", self.size(), enum_cap)?;
        let mut seen: HashSet<Subgroup> = HashSet::new();
        let mut queue = VecDeque::new();
        let zero = vec![0usize];
        seen.insert(zero.clone());
        queue.push_back((zero, Vec::<usize>::new()));
        let mut out = Vec::new();
        while let Some((h, gens)) = queue.pop_front() {
            out.push(h.clone());
            let member = membership(&h, self.size());
            for a in 0..self.size() {
                if member[a] || self.q[a] != 0 || gens.iter().any(|&g| self.b_scaled(a, g) != 0) {
                    continue;
                }
                let mut next_gens = gens.clone();
                next_gens.push(a);
                let next = self.span(&next_gens);
                if seen.insert(next.clone()) {
                    cap_check("isotropic subgroups", seen.len(), max_count)?;
                    queue.push_back((next, next_gens));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// An isotropic subgroup that cannot be enlarged, built greedily from
    /// the smallest admissible element.
    pub fn maximal_isotropic(&self, enum_cap: usize) -> Result<Subgroup> {
        self.maximal_isotropic_ordered(enum_cap, SearchOrder::Forward)
    }

    pub fn maximal_isotropic_ordered(&self, enum_cap: usize, order: SearchOrder) -> Result<Subgroup> {
        cap_check("maximal isotropic search", self.size(), enum_cap)?;
        let mut gens = Vec::new();
        let mut h = vec![0usize];
        loop {
            let member = membership(&h, self.size());
            let admissible = |&a: &usize| {
                !member[a] && self.q[a] == 0 && gens.iter().all(|&g| self.b_scaled(a, g) == 0)
            };
            let next = match order {
                SearchOrder::Forward => (0..self.size()).find(admissible),
                SearchOrder::Reverse => (0..self.size()).rev().find(admissible),
            };
            match next {
                Some(a) => {
                    gens.push(a);
                    h = self.span(&gens);
                }
                None => return Ok(h),
            }
        }
    }

    /// `H^perp / H` with the induced form.
    pub fn subquotient(&self, h: &[usize], enum_cap: usize) -> Result<Self> {
        Ok(self.subquotient_with_lifts(h, enum_cap)?.0)
    }

    /// As [`Self::subquotient`], also returning the elements of `H^perp` that
    /// lift the standard generators of the result.
    pub fn subquotient_with_lifts(&self, h: &[usize], enum_cap: usize) -> Result<(Self, Vec<usize>)> {
        cap_check("subquotient", self.size(), enum_cap)?;
        let h = self.span(h);
        if !self.is_isotropic(&h) {
            return Err(Error::NotIsotropic);
        }
        let perp = self.orthogonal(&h);
        let lifts = self.cyclic_basis(&perp, &h);
        let orders: Vec<u64> = lifts.iter().map(|&(_, o)| o).collect();
        let basis: Vec<usize> = lifts.iter().map(|&(x, _)| x).collect();
        let size = checked_size(&orders)?;
        let strides = strides_of(&orders);
        let q = (0..size)
            .map(|c| {
                let coords = decode(c, &orders, &strides);
                let elem = coords
                    .iter()
                    .zip(&basis)
                    .fold(0, |acc, (&k, &x)| self.add(acc, self.mul(k, x)));
                self.q[elem]
            })
            .collect();
        Ok((Self::from_scaled(self.p, orders, self.level, q), basis))
    }

    /// Elements `x_1, x_2, ...` of `s` (with their orders modulo `h`) such
    /// that `s / h` is the direct sum of the cyclic groups they generate.
    ///
    /// Each step takes an element of largest order modulo the current span
    /// `D` and corrects it by an element of `D` so its order modulo `h` does
    /// not exceed its order modulo `D`.
    fn cyclic_basis(&self, s: &[usize], h: &[usize]) -> Vec<(usize, u64)> {
        let n = self.size();
        let in_h = membership(h, n);
        let mut d: Subgroup = h.to_vec();
        let mut out = Vec::new();
        while d.len() < s.len() {
            let in_d = membership(&d, n);
            let order_mod = |x: usize| {
                let mut o = 1;
                while !in_d[self.mul(o, x)] {
                    o *= self.p as u64;
                }
                o
            };
            let (y, o) = s
                .iter()
                .map(|&x| (x, order_mod(x)))
                .max_by_key(|&(x, o)| (o, std::cmp::Reverse(x)))
                .expect("nonempty");
            let x = d
                .iter()
                .map(|&dd| self.add(y, self.neg(dd)))
                .find(|&x| in_h[self.mul(o, x)])
                .expect("a lift of the same order exists");
            out.push((x, o));
            let mut gens: Vec<usize> = out.iter().map(|&(x, _)| x).collect();
            gens.extend_from_slice(h);
            d = self.span(&gens);
        }
        out
    }

    /// Repeatedly passes to `<a>^perp / <a>` for a nonzero `a` with `q(a) = 0`.
    pub fn anisotropic_kernel(&self, enum_cap: usize) -> Result<Self> {
        self.anisotropic_kernel_ordered(enum_cap, SearchOrder::Forward)
    }

    pub fn anisotropic_kernel_ordered(&self, enum_cap: usize, order: SearchOrder) -> Result<Self> {
        let mut cur = self.clone();
        loop {
            cap_check("anisotropic kernel", cur.size(), enum_cap)?;
            let isotropic = |&a: &usize| cur.q[a] == 0;
            let found = match order {
                SearchOrder::Forward => (1..cur.size()).find(isotropic),
                SearchOrder::Reverse => (1..cur.size()).rev().find(isotropic),
            };
            match found {
                Some(a) => cur = cur.subquotient(&[a], enum_cap)?,
                None => return Ok(cur),
            }
        }
    }

    pub fn is_anisotropic(&self) -> bool {
        (1..self.size()).all(|a| self.q[a] != 0)
    }

    /// Number of elements taking each value.
    pub fn q_histogram(&self) -> BTreeMap<QpZp, usize> {
        let mut h = BTreeMap::new();
        for v in self.values() {
            *h.entry(v).or_insert(0) += 1;
        }
        h
    }

    /// Elementary-divisor multiset, sorted.
    fn invariant_type(&self) -> Vec<u64> {
        let mut t = self.orders.clone();
        t.sort_unstable();
        t
    }

    /// Whether a group isomorphism carries one form to the other.
    pub fn is_metric_isomorphic(&self, other: &Self, iso_cap: usize) -> Result<bool> {
        cap_check("isomorphism search", self.size().max(other.size()), iso_cap)?;
        Ok(self.isomorphic_unbounded(other))
    }

    fn isomorphic_unbounded(&self, other: &Self) -> bool {
        if self.p != other.p
            || self.size() != other.size()
            || self.level != other.level
            || self.invariant_type() != other.invariant_type()
            || self.q_histogram() != other.q_histogram()
        {
            return false;
        }
        if self == other {
            return true;
        }
        let r = self.rank();
        let gens: Vec<usize> = (0..r).map(|i| self.generator(i)).collect();
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| {
                let o = self.order_of(g);
                (0..other.size())
                    .filter(|&x| other.q[x] == self.q[g] && other.order_of(x) == o)
                    .collect()
            })
            .collect();
        let mut images = Vec::with_capacity(r);
        self.extend_iso(other, &gens, &candidates, &mut images)
    }

    fn extend_iso(
        &self,
        other: &Self,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
    ) -> bool {
        let i = images.len();
        if i == gens.len() {
            return self.check_iso(other, images);
        }
        for &x in &candidates[i] {
            let compatible = (0..i).all(|j| {
                other.b_scaled(x, images[j]) == self.b_scaled(gens[i], gens[j])
            });
            if compatible {
                images.push(x);
                if self.extend_iso(other, gens, candidates, images) {
                    return true;
                }
                images.pop();
            }
        }
        false
    }

    fn check_iso(&self, other: &Self, images: &[usize]) -> bool {
        let mut hit = vec![false; other.size()];
        for a in 0..self.size() {
            let img = self
                .coords(a)
                .iter()
                .zip(images)
                .fold(0, |acc, (&k, &x)| other.add(acc, other.mul(k, x)));
            if hit[img] || other.q[img] != self.q[a] {
                return false;
            }
            hit[img] = true;
        }
        true
    }

    /// `sum_a exp(2 pi i q(a))` as an exact cyclotomic integer.
    pub fn gauss_sum(&self, gauss_cap: usize) -> Result<CycInt> {
        cap_check("Gauss sum", self.size(), gauss_cap)?;
        let mut counts = vec![0i64; self.modulus as usize];
        for &v in &self.q {
            counts[v as usize] += 1;
        }
        Ok(CycInt::from_exponent_counts(self.p, self.level, counts))
    }
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

fn checked_size(orders: &[u64]) -> Result<usize> {
    orders
        .iter()
        .try_fold(1usize, |acc, &o| acc.checked_mul(o as usize))
        .filter(|&n| n <= 1 << 26)
        .ok_or_else(|| Error::Invalid("group is too large to tabulate".into()))
}

fn strides_of(orders: &[u64]) -> Vec<usize> {
    let mut s = 1usize;
    orders
        .iter()
        .map(|&o| {
            let cur = s;
            s *= o as usize;
            cur
        })
        .collect()
}

fn decode(a: usize, orders: &[u64], strides: &[usize]) -> Vec<u64> {
    orders
        .iter()
        .zip(strides)
        .map(|(&o, &s)| (a / s) as u64 % o)
        .collect()
}

fn membership(h: &[usize], n: usize) -> Vec<bool> {
    let mut m = vec![false; n];
    for &x in h {
        m[x] = true;
    }
    m
}

/// An element of `Z[zeta]` for a primitive `p^k`-th root of unity, in the
/// power basis `1, zeta, ..., zeta^(phi(p^k) - 1)`.
#[derive(Clone, Debug)]
pub struct CycInt {
    p: u32,
    k: u32,
    coeffs: Vec<i64>,
}

impl CycInt {
    pub fn from_int(p: u32, n: i64) -> Self {
        CycInt { p, k: 0, coeffs: vec![n] }
    }

    /// `sum_i counts[i] zeta^i` with `counts.len() = p^k`.
    pub fn from_exponent_counts(p: u32, k: u32, counts: Vec<i64>) -> Self {
        let mut c = CycInt { p, k, coeffs: counts };
        c.reduce();
        c
    }

    /// Builds from canonical coefficients; the length must be `phi(p^k)`.
    pub fn from_coeffs(p: u32, k: u32, coeffs: Vec<i64>) -> Result<Self> {
        let c = CycInt { p, k, coeffs };
        if c.coeffs.len() != c.phi() {
            return Err(Error::Invalid(format!(
                "{} coefficients for conductor {}",
                c.coeffs.len(),
                c.conductor()
            )));
        }
        Ok(c)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn conductor(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    fn phi(&self) -> usize {
        if self.k == 0 {
            1
        } else {
            ((self.p - 1) as u64 * (self.p as u64).pow(self.k - 1)) as usize
        }
    }

    /// Rewrites `zeta^i` for `i >= phi` using
    /// `zeta^phi = -sum_{j < p-1} zeta^(j p^(k-1))`.
    fn reduce(&mut self) {
        if self.k == 0 {
            let s = self.coeffs.iter().sum();
            self.coeffs = vec![s];
            return;
        }
        let phi = self.phi();
        let step = (self.p as usize).pow(self.k - 1);
        for i in (phi..self.coeffs.len()).rev() {
            let c = std::mem::take(&mut self.coeffs[i]);
            if c != 0 {
                for j in 0..self.p as usize - 1 {
                    self.coeffs[i - phi + j * step] -= c;
                }
            }
        }
        self.coeffs.truncate(phi);
        self.coeffs.resize(phi, 0);
    }

    /// Same number written at conductor `p^k2`, `k2 >= k`.
    pub fn lift(&self, k2: u32) -> Self {
        assert!(k2 >= self.k);
        if k2 == self.k {
            return self.clone();
        }
        let scale = (self.p as usize).pow(k2 - self.k);
        let mut counts = vec![0i64; (self.p as usize).pow(k2)];
        for (i, &c) in self.coeffs.iter().enumerate() {
            counts[i * scale] += c;
        }
        Self::from_exponent_counts(self.p, k2, counts)
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.k.max(other.k);
        let (a, b) = (self.lift(k), other.lift(k));
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycInt { p: self.p, k, coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.k.max(other.k);
        let (a, b) = (self.lift(k), other.lift(k));
        let n = (self.p as usize).pow(k);
        let mut counts = vec![0i64; n];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                counts[(i + j) % n] += x * y;
            }
        }
        Self::from_exponent_counts(self.p, k, counts)
    }

    /// Complex conjugation, `zeta -> zeta^-1`.
    pub fn conj(&self) -> Self {
        let n = (self.p as usize).pow(self.k);
        let mut counts = vec![0i64; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            counts[(n - i) % n] += c;
        }
        Self::from_exponent_counts(self.p, self.k, counts)
    }

    /// The rational integer this equals, if any.
    pub fn as_int(&self) -> Option<i64> {
        (self.coeffs[1..].iter().all(|&c| c == 0)).then_some(self.coeffs[0])
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let k = self.k.max(other.k);
        self.lift(k).coeffs == other.lift(k).coeffs
    }
}

impl Eq for CycInt {}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_int() {
            return write!(f, "{n}");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| format!("{c}*z^{i}"))
            .collect();
        write!(f, "{} (z = exp(2 pi i/{}))", parts.join(" + "), self.conductor())
    }
}

/// Canonical names for Witt classes that have a standard representative.
#[derive(Clone, Debug)]
pub enum WittLabel {
    Zero,
    /// The class of `(F_{p^2}, i o Nm)`.
    NormForm,
    /// `(Z/p, a x^2 / p)` for odd `p`; `a` is 1 or the least non-square.
    Rank1(u32),
    /// Any other class, carried by an anisotropic representative.
    Other(MetricGroup),
}

#[derive(Clone, Debug)]
pub struct WittClass {
    pub p: u32,
    pub label: WittLabel,
}

impl WittClass {
    pub fn zero(p: u32) -> Self {
        WittClass {
            p,
            label: WittLabel::Zero,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.label, WittLabel::Zero)
    }

    /// An anisotropic metric group in this class.
    pub fn representative(&self) -> Result<MetricGroup> {
        match &self.label {
            WittLabel::Zero => Ok(MetricGroup::trivial(self.p)),
            WittLabel::NormForm => MetricGroup::norm_form_group(self.p),
            WittLabel::Rank1(a) => MetricGroup::rank1(self.p, *a),
            WittLabel::Other(g) => Ok(g.clone()),
        }
    }

    pub fn name(&self) -> String {
        match &self.label {
            WittLabel::Zero => "Zero".into(),
            WittLabel::NormForm => "NormForm".into(),
            WittLabel::Rank1(a) => format!("Rank1({a})"),
            WittLabel::Other(g) => format!("Other(order {})", g.size()),
        }
    }
}

impl fmt::Display for WittClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl PartialEq for WittClass {
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        match (&self.label, &other.label) {
            (WittLabel::Zero, WittLabel::Zero) | (WittLabel::NormForm, WittLabel::NormForm) => true,
            (WittLabel::Rank1(a), WittLabel::Rank1(b)) => a == b,
            (WittLabel::Other(a), WittLabel::Other(b)) => a.isomorphic_unbounded(b),
            _ => false,
        }
    }
}

/// The class of `A`: its anisotropic kernel, named when it is one of the
/// standard representatives.
pub fn witt_class(a: &MetricGroup, caps: &Caps) -> Result<WittClass> {
    let k = a.anisotropic_kernel(caps.enum_cap)?;
    let p = a.p();
    let label = if k.size() == 1 {
        WittLabel::Zero
    } else if k.size() == (p * p) as usize
        && k.is_metric_isomorphic(&MetricGroup::norm_form_group(p)?, caps.iso_cap)?
    {
        WittLabel::NormForm
    } else if p != 2 && k.size() == p as usize {
        // q(x) = a x^2 / p on the generator's multiples; a is q(1) * p.
        let v = k.q_value(1);
        let a_val = if v.k == 1 { v.num as u32 } else { 0 };
        if fp::is_square(a_val, p) {
            WittLabel::Rank1(1)
        } else {
            WittLabel::Rank1(fp::smallest_nonsquare(p))
        }
    } else {
        WittLabel::Other(k)
    };
    Ok(WittClass { p, label })
}

pub fn witt_add(a: &WittClass, b: &WittClass, caps: &Caps) -> Result<WittClass> {
    if a.p != b.p {
        return Err(Error::Invalid(format!("primes differ: {} vs {}", a.p, b.p)));
    }
    let sum = a.representative()?.direct_sum(&b.representative()?)?;
    witt_class(&sum, caps)
}

pub fn witt_neg(a: &WittClass, caps: &Caps) -> Result<WittClass> {
    witt_class(&a.representative()?.negated(), caps)
}

/// The two Witt classes an exponent-p group of square order can have.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentPClass {
    Hyperbolic,
    NormFormClass,
}

pub fn classify_exponent_p(a: &MetricGroup, caps: &Caps) -> Result<ExponentPClass> {
    let p = a.p() as usize;
    let mut n = a.size();
    let mut log = 0;
    while n % p == 0 {
        n /= p;
        log += 1;
    }
    if n != 1 || log % 2 == 1 {
        return Err(Error::Precondition(format!(
            "order {} is not an even power of {p}",
            a.size()
        )));
    }
    if a.level() > 1 {
        return Err(Error::Precondition("values must lie in (1/p)Z/Z".into()));
    }
    match witt_class(a, caps)?.label {
        WittLabel::Zero => Ok(ExponentPClass::Hyperbolic),
        WittLabel::NormForm => Ok(ExponentPClass::NormFormClass),
        _ => Err(Error::Precondition(
            "anisotropic kernel is neither trivial nor the norm form".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn value_normalization() {
        assert_eq!(QpZp::new(3, 3, 2), QpZp::new(3, 1, 1));
        assert_eq!(QpZp::new(3, 9, 2), QpZp::zero(3));
        assert_eq!(QpZp::new(3, -1, 1).fraction(), (2, 3));
        assert_eq!(QpZp::from_prime(3, 1).add(QpZp::from_prime(3, 2)), QpZp::zero(3));
    }

    #[test]
    fn validation_examples() {
        assert!(MetricGroup::trivial(3).is_metric());
        for p in [3, 5, 7] {
            assert!(MetricGroup::rank1(p, 1).unwrap().is_metric());
        }
        let g = MetricGroup::new(2, vec![2], vec![QpZp::zero(2), QpZp::new(2, 1, 1)]).unwrap();
        let v = g.validate();
        assert!(v.is_premetric() && !v.nondegenerate);
        // (Z/4, x^2/4) is premetric but q(-a) = q(a) fails for x/4.
        let bad = MetricGroup::from_fn(2, vec![4], |c| QpZp::new(2, c[0] as i64, 2)).unwrap();
        assert!(!bad.validate().q_even);
    }

    #[test]
    fn norm_form_histogram() {
        let g = MetricGroup::norm_form_group(3).unwrap();
        assert_eq!(g.size(), 9);
        let h = g.q_histogram();
        assert_eq!(h[&QpZp::zero(3)], 1);
        assert_eq!(h[&QpZp::from_prime(3, 1)], 4);
        assert_eq!(h[&QpZp::from_prime(3, 2)], 4);
        for p in [2, 3, 5] {
            let g = MetricGroup::norm_form_group(p).unwrap();
            assert!(g.is_metric() && g.is_anisotropic());
            assert_eq!(g.maximal_isotropic(4096).unwrap(), vec![0]);
        }
    }

    #[test]
    fn hyperbolic_plane_has_lagrangian() {
        for p in [2, 3, 5] {
            let g = MetricGroup::hyperbolic_plane(p).unwrap();
            assert!(g.is_metric());
            let line: Subgroup = g.span(&[g.generator(0)]);
            assert!(g.is_isotropic(&line));
            assert_eq!(g.orthogonal(&line), line);
            assert_eq!(g.subquotient(&line, 4096).unwrap().size(), 1);
            assert_eq!(g.anisotropic_kernel(4096).unwrap().size(), 1);
            assert_eq!(classify_exponent_p(&g, &caps()).unwrap(), ExponentPClass::Hyperbolic);
        }
    }

    #[test]
    fn isomorphism_examples() {
        let a = MetricGroup::rank1(3, 1).unwrap();
        let b = MetricGroup::rank1(3, 2).unwrap();
        assert!(a.is_metric_isomorphic(&a, 1024).unwrap());
        assert!(!a.is_metric_isomorphic(&b, 1024).unwrap());
        let n = MetricGroup::norm_form_group(3).unwrap();
        let h = MetricGroup::hyperbolic_plane(3).unwrap();
        assert!(!n.is_metric_isomorphic(&h, 1024).unwrap());
        // x^2 + y^2 over F_3 is anisotropic and isomorphic to the norm form.
        let s = a.direct_sum(&a).unwrap();
        assert!(s.is_metric_isomorphic(&n, 1024).unwrap());
        // Relabelled coordinates of the same form.
        let swapped = MetricGroup::from_fn(3, vec![3, 3], |c| {
            n.q_value(n.index(&[c[1], c[0]]))
        })
        .unwrap();
        assert!(swapped.is_metric_isomorphic(&n, 1024).unwrap());
    }

    #[test]
    fn witt_group_of_f3() {
        let c = caps();
        let reps = [
            MetricGroup::trivial(3),
            MetricGroup::rank1(3, 1).unwrap(),
            MetricGroup::rank1(3, 2).unwrap(),
            MetricGroup::norm_form_group(3).unwrap(),
        ];
        let classes: Vec<WittClass> = reps.iter().map(|g| witt_class(g, &c).unwrap()).collect();
        assert_eq!(
            classes.iter().map(WittClass::name).collect::<Vec<_>>(),
            ["Zero", "Rank1(1)", "Rank1(2)", "NormForm"]
        );
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(classes[i] == classes[j], i == j);
            }
            let neg = witt_neg(&classes[i], &c).unwrap();
            assert!(witt_add(&classes[i], &neg, &c).unwrap().is_zero());
        }
        let nf = &classes[3];
        assert!(witt_add(nf, nf, &c).unwrap().is_zero());
    }

    #[test]
    fn gauss_sums() {
        let c = caps();
        assert_eq!(MetricGroup::trivial(3).gauss_sum(c.gauss_cap).unwrap().as_int(), Some(1));
        for p in [2, 3, 5, 7] {
            let n = MetricGroup::norm_form_group(p).unwrap();
            assert_eq!(n.gauss_sum(c.gauss_cap).unwrap().as_int(), Some(-(p as i64)));
            let h = MetricGroup::hyperbolic_plane(p).unwrap();
            assert_eq!(h.gauss_sum(c.gauss_cap).unwrap().as_int(), Some(p as i64));
        }
        // Rank one: |G|^2 = p but G itself is not rational.
        let r = MetricGroup::rank1(5, 1).unwrap();
        let g = r.gauss_sum(c.gauss_cap).unwrap();
        assert_eq!(g.as_int(), None);
        assert_eq!(g.mul(&g.conj()).as_int(), Some(5));
        // Z/4 with q(x) = x^2/8: a level-3 form.
        let z4 = MetricGroup::from_fn(2, vec![4], |x| QpZp::new(2, (x[0] * x[0]) as i64, 3)).unwrap();
        assert!(z4.is_metric());
        let g = z4.gauss_sum(c.gauss_cap).unwrap();
        assert_eq!(g.mul(&g.conj()).as_int(), Some(4));
    }

    #[test]
    fn cyclotomic_arithmetic() {
        // 1 + zeta + zeta^2 = 0 for p = 3.
        let z = CycInt::from_exponent_counts(3, 1, vec![1, 1, 1]);
        assert_eq!(z.as_int(), Some(0));
        let one = CycInt::from_int(3, 1);
        assert_eq!(one.lift(2).as_int(), Some(1));
        let zeta9 = CycInt::from_exponent_counts(3, 2, (0..9).map(|i| i64::from(i == 1)).collect());
        let zeta9_cubed = zeta9.mul(&zeta9).mul(&zeta9);
        let zeta3 = CycInt::from_exponent_counts(3, 1, vec![0, 1, 0]);
        assert_eq!(zeta9_cubed, zeta3);
        assert_eq!(zeta9.mul(&zeta9.conj()), one);
    }

    #[test]
    fn subquotient_sizes_and_gauss_relation() {
        let c = caps();
        let a = MetricGroup::norm_form_group(3)
            .unwrap()
            .direct_sum(&MetricGroup::hyperbolic_plane(3).unwrap())
            .unwrap();
        let total = a.gauss_sum(c.gauss_cap).unwrap();
        for h in a.isotropic_subgroups(10_000, c.enum_cap).unwrap() {
            let sq = a.subquotient(&h, c.enum_cap).unwrap();
            assert!(sq.is_metric());
            assert_eq!(h.len() * h.len() * sq.size(), a.size());
            let rhs = CycInt::from_int(3, h.len() as i64).mul(&sq.gauss_sum(c.gauss_cap).unwrap());
            assert_eq!(total, rhs);
        }
    }

    #[test]
    fn anisotropic_kernel_does_not_depend_on_order() {
        let c = caps();
        let n = MetricGroup::norm_form_group(3).unwrap();
        let a = n.direct_sum(&n).unwrap().direct_sum(&n).unwrap();
        let k1 = a.anisotropic_kernel_ordered(c.enum_cap, SearchOrder::Forward).unwrap();
        let k2 = a.anisotropic_kernel_ordered(c.enum_cap, SearchOrder::Reverse).unwrap();
        assert!(k1.is_metric_isomorphic(&k2, c.iso_cap).unwrap());
        assert!(k1.is_metric_isomorphic(&n, c.iso_cap).unwrap());
    }

    #[test]
    fn caps_are_enforced() {
        let h = MetricGroup::hyperbolic_plane(5).unwrap();
        assert!(matches!(
            h.isotropic_subgroups(100, 10),
            Err(Error::EnumerationCap { .. })
        ));
        assert!(matches!(h.gauss_sum(3), Err(Error::EnumerationCap { .. })));
        assert!(matches!(
            h.is_metric_isomorphic(&h, 4),
            Err(Error::EnumerationCap { .. })
        ));
    }
}
