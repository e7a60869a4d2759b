//! Finite fields F_{p^d} with explicit polynomial representation.
//!
//! Elements are coefficient vectors over F_p with respect to a fixed monic
//! irreducible modulus, chosen deterministically (first in lexicographic
//! order) so that every run of the library agrees on coordinates.

use crate::error::{Error, Result};
use std::fmt;

/// A finite field F_{p^deg} = F_p[t]/(modulus).
#[derive(Debug)]
pub struct Fq {
    p: u64,
    deg: usize,
    /// Monic modulus, length deg+1, coefficients mod p, leading coefficient 1.
    modulus: Vec<u64>,
    /// Matrix of x -> x^p on coefficient vectors, column-major: col i = (t^i)^p.
    frob_cols: Vec<Vec<u64>>,
}

/// Field element: coefficient vector of length deg, entries in [0, p).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqEl(pub Vec<u64>);

impl fmt::Debug for FqEl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqEl{:?}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
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

// --- dense F_p[x] helpers (coefficient vectors, lowest degree first) ---

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = (r[dr] * lead_inv) % p;
        if c != 0 {
            for i in 0..=dm {
                let idx = dr - dm + i;
                r[idx] = (r[idx] + p - (c * m[i]) % p) % p;
            }
        }
        poly_trim(&mut r);
        if r.len() == 1 && r[0] == 0 {
            break;
        }
        if r.len() > dm && r[r.len() - 1] == 0 {
            poly_trim(&mut r);
        }
    }
    r.resize(dm.max(1), 0);
    r
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    out
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = poly_rem_full(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Remainder without padding to a fixed length.
fn poly_rem_full(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    if dm == 0 {
        return vec![0];
    }
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = (r[dr] * lead_inv) % p;
        if c != 0 {
            for i in 0..=dm {
                let idx = dr - dm + i;
                r[idx] = (r[idx] + p - (c * m[i]) % p) % p;
            }
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem_full(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem_full(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_rem_full(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Rabin irreducibility: f monic of degree d over F_p is irreducible iff
/// x^{p^d} = x mod f and gcd(x^{p^{d/l}} - x, f) = 1 for every prime l | d.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    let x = vec![0u64, 1];
    let q_d = (p as u128).pow(d as u32);
    let xp = poly_powmod(&x, q_d, f, p);
    // x^{p^d} - x must be 0 mod f
    let mut diff = xp.clone();
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    poly_trim(&mut diff);
    if !(diff.len() == 1 && diff[0] == 0) {
        return false;
    }
    let mut primes = vec![];
    let mut n = d;
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            primes.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    for l in primes {
        let e = (p as u128).pow((d / l) as u32);
        let xe = poly_powmod(&x, e, f, p);
        let mut g = xe.clone();
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        poly_trim(&mut g);
        let gg = poly_gcd(&g, f, p);
        if !(gg.len() == 1) {
            return false;
        }
    }
    true
}

impl Fq {
    /// The field F_{p^deg} with the lexicographically first irreducible modulus.
    pub fn new(p: u64, deg: usize) -> Result<Fq> {
        if !is_prime(p) || p == 2 {
            return Err(Error::ConfigInvalid(format!("p = {p} must be an odd prime")));
        }
        if deg == 0 || deg > 12 {
            return Err(Error::ConfigInvalid(format!("unsupported degree {deg}")));
        }
        let modulus = if deg == 1 {
            vec![0, 1]
        } else {
            let mut found = None;
            // iterate constant-to-high coefficients in lex order
            let total = (p as u128).pow(deg as u32);
            let mut k = 0u128;
            'outer: while k < total {
                let mut f = Vec::with_capacity(deg + 1);
                let mut kk = k;
                for _ in 0..deg {
                    f.push((kk % p as u128) as u64);
                    kk /= p as u128;
                }
                f.push(1);
                k += 1;
                if f[0] == 0 {
                    continue 'outer; // reducible: divisible by x
                }
                if is_irreducible(&f, p) {
                    found = Some(f);
                    break;
                }
            }
            found.ok_or_else(|| Error::SearchExhausted("irreducible modulus".into()))?
        };
        let mut fq = Fq { p, deg, modulus, frob_cols: vec![] };
        let mut cols = Vec::with_capacity(deg);
        for i in 0..deg {
            let mut ti = vec![0u64; i + 1];
            ti[i] = 1;
            let c = poly_powmod(&ti, p as u128, &fq.modulus, p);
            let mut v = c;
            v.resize(deg, 0);
            cols.push(v);
        }
        fq.frob_cols = cols;
        Ok(fq)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of elements p^deg.
    pub fn card(&self) -> u64 {
        (self.p as u128).pow(self.deg as u32) as u64
    }

    pub fn zero(&self) -> FqEl {
        FqEl(vec![0; self.deg])
    }

    pub fn one(&self) -> FqEl {
        let mut v = vec![0; self.deg];
        v[0] = 1;
        FqEl(v)
    }

    /// The class of the generator t (equals 0 in the prime field).
    pub fn gen(&self) -> FqEl {
        let mut v = vec![0; self.deg];
        if self.deg > 1 {
            v[1] = 1;
        }
        FqEl(v)
    }

    pub fn from_u64(&self, n: u64) -> FqEl {
        let mut v = vec![0; self.deg];
        v[0] = n % self.p;
        FqEl(v)
    }

    pub fn from_i64(&self, n: i64) -> FqEl {
        let p = self.p as i64;
        let r = ((n % p) + p) % p;
        self.from_u64(r as u64)
    }

    pub fn is_zero(&self, a: &FqEl) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqEl, b: &FqEl) -> FqEl {
        FqEl(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + y) % self.p).collect())
    }

    pub fn sub(&self, a: &FqEl, b: &FqEl) -> FqEl {
        FqEl(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + self.p - y) % self.p).collect())
    }

    pub fn neg(&self, a: &FqEl) -> FqEl {
        FqEl(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    pub fn mul(&self, a: &FqEl, b: &FqEl) -> FqEl {
        let prod = poly_mul(&a.0, &b.0, self.p);
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.deg, 0);
        FqEl(r)
    }

    pub fn scal(&self, c: u64, a: &FqEl) -> FqEl {
        let c = c % self.p;
        FqEl(a.0.iter().map(|&x| x * c % self.p).collect())
    }

    pub fn pow(&self, a: &FqEl, mut e: u64) -> FqEl {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FqEl) -> Result<FqEl> {
        if self.is_zero(a) {
            return Err(Error::NotUnit);
        }
        // a^{q-2}
        let q = self.card();
        Ok(self.pow(a, q - 2))
    }

    /// Frobenius x -> x^p via the precomputed coefficient matrix.
    pub fn frob(&self, a: &FqEl) -> FqEl {
        let mut out = vec![0u64; self.deg];
        for (i, col) in self.frob_cols.iter().enumerate() {
            let c = a.0[i];
            if c == 0 {
                continue;
            }
            for (j, &m) in col.iter().enumerate() {
                out[j] = (out[j] + c * m) % self.p;
            }
        }
        FqEl(out)
    }

    pub fn frob_k(&self, a: &FqEl, k: usize) -> FqEl {
        let mut x = a.clone();
        for _ in 0..(k % self.deg.max(1)) {
            x = self.frob(&x);
        }
        x
    }

    /// True when a lies in the subfield F_{p^k} (k must divide deg).
    pub fn in_subfield(&self, a: &FqEl, k: usize) -> bool {
        self.frob_k(a, k) == *a
    }

    /// All elements in index order (lex by coefficient vector, low coeff fastest).
    pub fn elements(&self) -> impl Iterator<Item = FqEl> + '_ {
        (0..self.card()).map(move |i| self.el_from_index(i))
    }

    pub fn el_from_index(&self, mut i: u64) -> FqEl {
        let mut v = Vec::with_capacity(self.deg);
        for _ in 0..self.deg {
            v.push(i % self.p);
            i /= self.p;
        }
        FqEl(v)
    }

    pub fn el_index(&self, a: &FqEl) -> u64 {
        let mut i = 0u64;
        for &c in a.0.iter().rev() {
            i = i * self.p + c;
        }
        i
    }

    /// A square root by exhaustive scan (fields here are tiny), None if nonsquare.
    pub fn sqrt(&self, a: &FqEl) -> Option<FqEl> {
        for x in self.elements() {
            if self.mul(&x, &x) == *a {
                return Some(x);
            }
        }
        None
    }

    /// Norm to the subfield of index 2: x^(p^{deg/2}+1)-style tower norm.
    /// Requires even deg; the result lies in F_{p^{deg/2}}.
    pub fn conj_half(&self, a: &FqEl) -> FqEl {
        debug_assert!(self.deg % 2 == 0);
        self.frob_k(a, self.deg / 2)
    }
}

// --- matrices over Fq ---

/// Dense row-major matrix over a fixed Fq (the field is passed to methods).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqMat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<FqEl>,
}

impl fmt::Debug for FqMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FqMat {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<_> = (0..self.cols).map(|j| format!("{:?}", self.a[i * self.cols + j].0)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl FqMat {
    pub fn zero(fq: &Fq, rows: usize, cols: usize) -> FqMat {
        FqMat { rows, cols, a: vec![fq.zero(); rows * cols] }
    }

    pub fn identity(fq: &Fq, n: usize) -> FqMat {
        let mut m = FqMat::zero(fq, n, n);
        for i in 0..n {
            m.set(i, i, fq.one());
        }
        m
    }

    pub fn from_rows(rows_v: Vec<Vec<FqEl>>) -> FqMat {
        let rows = rows_v.len();
        let cols = if rows == 0 { 0 } else { rows_v[0].len() };
        let mut a = Vec::with_capacity(rows * cols);
        for r in rows_v {
            assert_eq!(r.len(), cols);
            a.extend(r);
        }
        FqMat { rows, cols, a }
    }

    pub fn get(&self, i: usize, j: usize) -> &FqEl {
        &self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FqEl) {
        self.a[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<FqEl> {
        self.a[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self, fq: &Fq) -> FqMat {
        let mut t = FqMat::zero(fq, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, fq: &Fq, other: &FqMat) -> FqMat {
        assert_eq!(self.cols, other.rows);
        let mut out = FqMat::zero(fq, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if fq.is_zero(aik) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = fq.add(out.get(i, j), &fq.mul(aik, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, fq: &Fq, v: &[FqEl]) -> Vec<FqEl> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = fq.zero();
                for j in 0..self.cols {
                    acc = fq.add(&acc, &fq.mul(self.get(i, j), &v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn stack(top: &FqMat, bottom: &FqMat) -> FqMat {
        assert_eq!(top.cols, bottom.cols);
        let mut a = top.a.clone();
        a.extend(bottom.a.iter().cloned());
        FqMat { rows: top.rows + bottom.rows, cols: top.cols, a }
    }

    /// Entrywise Frobenius x -> x^p.
    pub fn frob(&self, fq: &Fq) -> FqMat {
        FqMat { rows: self.rows, cols: self.cols, a: self.a.iter().map(|x| fq.frob(x)).collect() }
    }

    /// Reduced row echelon form with zero rows removed; returns pivot columns.
    pub fn rref(&self, fq: &Fq) -> (FqMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r >= m.rows {
                break;
            }
            let mut piv = None;
            for i in r..m.rows {
                if !fq.is_zero(m.get(i, c)) {
                    piv = Some(i);
                    break;
                }
            }
            let Some(pi) = piv else { continue };
            // swap rows r, pi
            if pi != r {
                for j in 0..m.cols {
                    let x = m.get(r, j).clone();
                    let y = m.get(pi, j).clone();
                    m.set(r, j, y);
                    m.set(pi, j, x);
                }
            }
            let inv = fq.inv(m.get(r, c)).expect("pivot nonzero");
            for j in 0..m.cols {
                let v = fq.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || fq.is_zero(m.get(i, c)) {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = fq.sub(m.get(i, j), &fq.mul(&f, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut rows_v = Vec::new();
        for i in 0..r {
            rows_v.push(m.row(i));
        }
        (FqMat::from_rows(rows_v), pivots)
    }

    pub fn rank(&self, fq: &Fq) -> usize {
        self.rref(fq).1.len()
    }

    /// Basis of the right kernel, as rows of the returned matrix.
    pub fn kernel(&self, fq: &Fq) -> FqMat {
        let (r, pivots) = self.rref(fq);
        let mut free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.sort();
        let mut rows_v = Vec::new();
        for &fc in &free {
            let mut v = vec![fq.zero(); self.cols];
            v[fc] = fq.one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = fq.neg(r.get(ri, fc));
            }
            rows_v.push(v);
        }
        if rows_v.is_empty() {
            FqMat { rows: 0, cols: self.cols, a: vec![] }
        } else {
            FqMat::from_rows(rows_v)
        }
    }

    /// One solution x of self * x = b, if any.
    pub fn solve(&self, fq: &Fq, b: &[FqEl]) -> Option<Vec<FqEl>> {
        assert_eq!(self.rows, b.len());
        let mut aug = FqMat::zero(fq, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref(fq);
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![fq.zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(ri, self.cols).clone();
        }
        Some(x)
    }
}

/// F_p-basis of the solutions of A sigma(x) = x in F_{p^d}^n, where sigma is
/// the coefficientwise Frobenius x -> x^p. The solution set is an F_p-space.
pub fn fixed_points_semilinear(fq: &Fq, a: &FqMat) -> Result<Vec<Vec<FqEl>>> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    if a.rank(fq) < n {
        return Err(Error::SingularOperator("semilinear fixed-point operator".into()));
    }
    let d = fq.deg();
    let p = fq.p();
    let fp = Fq::new(p, 1)?;
    let big = n * d;
    // columns of the F_p-linear map x -> A sigma(x) - x
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(big);
    for i in 0..n {
        for e in 0..d {
            let mut x = vec![fq.zero(); n];
            let mut v = vec![0u64; d];
            v[e] = 1;
            x[i] = FqEl(v);
            let sx: Vec<FqEl> = x.iter().map(|c| fq.frob(c)).collect();
            let ax = a.mul_vec(fq, &sx);
            let mut col = Vec::with_capacity(big);
            for j in 0..n {
                let diff = fq.sub(&ax[j], &x[j]);
                col.extend(diff.0.iter().copied());
            }
            cols.push(col);
        }
    }
    // kernel over F_p
    let mut rows_v = Vec::with_capacity(big);
    for r in 0..big {
        let row: Vec<FqEl> = (0..big).map(|c| FqEl(vec![cols[c][r]])).collect();
        rows_v.push(row);
    }
    let m = FqMat::from_rows(rows_v);
    let ker = m.kernel(&fp);
    let mut basis = Vec::new();
    for bi in 0..ker.rows {
        let row = ker.row(bi);
        let mut vec_fq = Vec::with_capacity(n);
        for j in 0..n {
            let mut coeffs = vec![0u64; d];
            for e in 0..d {
                coeffs[e] = row[j * d + e].0[0];
            }
            vec_fq.push(FqEl(coeffs));
        }
        basis.push(vec_fq);
    }
    basis.sort();
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_in_f9() {
        let f = Fq::new(3, 2).unwrap();
        let t = f.gen();
        // modulus is the lex-first irreducible: t^2 + 1 over F_3? (c0=1,c1=0): t^2+1, irreducible mod 3
        let t2 = f.mul(&t, &t);
        let m1 = f.from_i64(-(f.modulus()[0] as i64));
        // t^2 = -c0 - c1 t
        assert_eq!(t2.0[0], m1.0[0]);
        for x in f.elements() {
            if !f.is_zero(&x) {
                let xi = f.inv(&x).unwrap();
                assert_eq!(f.mul(&x, &xi), f.one());
            }
        }
    }

    #[test]
    fn frobenius_is_field_automorphism_of_order_deg() {
        for (p, d) in [(3u64, 2usize), (3, 4), (5, 2), (5, 4)] {
            let f = Fq::new(p, d).unwrap();
            let a = f.el_from_index(7 % f.card());
            let b = f.el_from_index(11 % f.card());
            assert_eq!(f.frob(&f.mul(&a, &b)), f.mul(&f.frob(&a), &f.frob(&b)));
            assert_eq!(f.frob(&f.add(&a, &b)), f.add(&f.frob(&a), &f.frob(&b)));
            assert_eq!(f.frob(&a), f.pow(&a, p));
            assert_eq!(f.frob_k(&a, d), a);
        }
    }

    #[test]
    fn fixed_points_of_identity_are_prime_field() {
        let f = Fq::new(3, 2).unwrap();
        let a = FqMat::identity(&f, 3);
        let basis = fixed_points_semilinear(&f, &a).unwrap();
        // fixed points of sigma on F_9^3 = F_3^3
        assert_eq!(basis.len(), 3);
    }

    #[test]
    fn rref_idempotent_and_rank() {
        let f = Fq::new(3, 2).unwrap();
        let rows = vec![
            vec![f.from_u64(1), f.from_u64(2), f.gen()],
            vec![f.from_u64(2), f.from_u64(4 % 3), f.scal(2, &f.gen())],
        ];
        let m = FqMat::from_rows(rows);
        let (r, piv) = m.rref(&f);
        assert_eq!(piv.len(), 1); // second row is twice the first
        let (r2, _) = r.rref(&f);
        assert_eq!(r, r2);
    }

    #[test]
    fn kernel_times_matrix_vanishes() {
        let f = Fq::new(5, 2).unwrap();
        let rows = vec![
            vec![f.from_u64(1), f.from_u64(2), f.from_u64(3), f.from_u64(1)],
            vec![f.from_u64(0), f.from_u64(1), f.from_u64(4), f.gen()],
        ];
        let m = FqMat::from_rows(rows);
        let k = m.kernel(&f);
        assert_eq!(k.rows, 2);
        for i in 0..k.rows {
            let v = k.row(i);
            let mv = m.mul_vec(&f, &v);
            assert!(mv.iter().all(|x| f.is_zero(x)));
        }
    }
}
