//! Prime-field scalars, dense polynomials over F_p and F_p linear algebra.
//!
//! Polynomials are little-endian `Vec<u32>` with no trailing zeros; the zero
//! polynomial is the empty vector.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub fn add(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn pow(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue.
pub fn inv(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow(a, p as u64 - 2, p)
}

/// Reduces an arbitrary signed integer into `[0, p)`.
pub fn reduce_i64(a: i64, p: u32) -> u32 {
    a.rem_euclid(p as i64) as u32
}

/// Legendre-style square test on F_p^x (every element is a square when p = 2).
pub fn is_square(a: u32, p: u32) -> bool {
    if a == 0 || p == 2 {
        return true;
    }
    pow(a, (p as u64 - 1) / 2, p) == 1
}

/// Smallest non-square residue of an odd prime.
pub fn smallest_nonsquare(p: u32) -> u32 {
    (2..p).find(|&a| !is_square(a, p)).expect("odd prime has non-squares")
}

pub fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = sub(x, y, p);
    }
    trim(&mut out);
    out
}

pub fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![0u64; a.len() + b.len() - 1];
    let pp = p as u64;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] = (acc[i + j] + x as u64 * y as u64) % pp;
        }
    }
    let mut out: Vec<u32> = acc.into_iter().map(|x| x as u32).collect();
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero `m`.
pub fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    poly_divrem(a, m, p).1
}

pub fn poly_divrem(a: &[u32], m: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    assert!(!m.is_empty(), "polynomial division by zero");
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < m.len() {
        return (Vec::new(), r);
    }
    let dm = m.len() - 1;
    let lead_inv = inv(m[dm], p);
    let mut q = vec![0; r.len() - dm];
    while r.len() > dm {
        let top = r.len() - 1;
        let c = mul(r[top], lead_inv, p);
        if c != 0 {
            let shift = top - dm;
            q[shift] = c;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = sub(r[shift + i], mul(c, mi, p), p);
            }
        }
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Monic gcd.
pub fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        let li = inv(lead, p);
        for c in x.iter_mut() {
            *c = mul(*c, li, p);
        }
    }
    x
}

pub fn poly_powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut acc = poly_rem(&[1], m, p);
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), m, p);
        }
        e >>= 1;
        if e > 0 {
            b = poly_rem(&poly_mul(&b, &b, p), m, p);
        }
    }
    acc
}

/// Ben-Or irreducibility test for a monic polynomial of degree >= 1.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0, 1];
    let mut h = x.clone();
    for _ in 0..n / 2 {
        h = poly_powmod(&h, p as u64, f, p);
        let g = poly_gcd(f, &poly_sub(&h, &x, p), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Row-reduces `rows` (each of length `cols`) in place and returns the pivot columns.
pub fn row_reduce(rows: &mut [Vec<u32>], cols: usize, p: u32) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let li = inv(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = mul(*x, li, p);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(pivot_row.iter()) {
                    *x = sub(*x, mul(f, y, p), p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<u32>], cols: usize, p: u32) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m, cols, p).len()
}

/// Basis of `{x : M x = 0}` for the matrix with the given rows.
pub fn nullspace(rows: &[Vec<u32>], cols: usize, p: u32) -> Vec<Vec<u32>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m, cols, p);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0; cols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = sub(0, m[r][free], p);
        }
        basis.push(v);
    }
    basis
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(rows: &[Vec<u32>], p: u32) -> Option<Vec<Vec<u32>>> {
    let n = rows.len();
    let mut aug: Vec<Vec<u32>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| u32::from(i == j)));
            v
        })
        .collect();
    let pivots = row_reduce(&mut aug, 2 * n, p);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn irreducibility_matches_root_and_factor_search() {
        // Degree 2 and 3 over F_3: irreducible iff no roots.
        for deg in 2..=3usize {
            for idx in 0..3u32.pow(deg as u32) {
                let mut f: Vec<u32> = (0..deg).map(|i| (idx / 3u32.pow(i as u32)) % 3).collect();
                f.push(1);
                let has_root = (0..3).any(|x| {
                    f.iter().rev().fold(0, |acc, &c| add(mul(acc, x, 3), c, 3)) == 0
                });
                assert_eq!(is_irreducible(&f, 3), !has_root, "{f:?}");
            }
        }
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 over F_2 has no roots but is reducible.
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 0, 1], 2));
    }

    #[test]
    fn nullspace_and_inverse() {
        let m = vec![vec![1, 2, 0], vec![2, 4, 0]];
        let ns = nullspace(&m, 3, 5);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let dot = row.iter().zip(v).fold(0, |a, (&x, &y)| add(a, mul(x, y, 5), 5));
                assert_eq!(dot, 0);
            }
        }
        let a = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(inverse(&a, 3), Some(vec![vec![1, 2], vec![0, 1]]));
        assert_eq!(inverse(&[vec![1, 1], vec![1, 1]], 3), None);
    }
}
