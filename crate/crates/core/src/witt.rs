//! Truncated unramified extensions Z_{p^d}/p^N with an exact Frobenius lift.
//!
//! The ring is (Z/p^N)[t]/(m(t)) where m is the coefficient lift of the
//! residue-field modulus. The Frobenius sigma sends t to the unique root of m
//! congruent to t^p mod p, computed once by Newton iteration; sigma is then a
//! (Z/p^N)-linear map on coefficient vectors and an exact ring automorphism.

use crate::error::{Error, Result};
use crate::fq::{Fq, FqEl};
use std::fmt;
use std::sync::Arc;

#[derive(Debug)]
pub struct WittRing {
    p: u64,
    n_prec: u32,
    pn: u64,
    deg: usize,
    /// Monic modulus mod p^N, length deg+1.
    modulus: Vec<u64>,
    /// sigma on coefficient vectors, column-major: col i = coords of sigma(t)^i.
    sigma_cols: Vec<Vec<u64>>,
    /// Inverse automorphism sigma^{deg-1}.
    sigma_inv_cols: Vec<Vec<u64>>,
    fq: Arc<Fq>,
    /// Digits reserved against round-off: valuations in [N-guard, N) are
    /// treated as "cannot tell from zero" by elimination pivoting.
    guard: u32,
}

/// Ring element: coefficient vector of length deg, entries in [0, p^N).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WittEl(pub Vec<u64>);

impl fmt::Debug for WittEl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{:?}", self.0)
    }
}

fn pow_u64(p: u64, e: u32) -> u64 {
    (p as u128).pow(e) as u64
}

impl WittRing {
    pub fn new(fq: Arc<Fq>, n_prec: u32) -> Result<Arc<WittRing>> {
        Self::with_guard(fq, n_prec, 4)
    }

    pub fn with_guard(fq: Arc<Fq>, n_prec: u32, guard: u32) -> Result<Arc<WittRing>> {
        let p = fq.p();
        let deg = fq.deg();
        if n_prec == 0 {
            return Err(Error::ConfigInvalid("precision must be positive".into()));
        }
        if guard >= n_prec {
            return Err(Error::ConfigInvalid(format!(
                "guard {guard} must be smaller than precision {n_prec}"
            )));
        }
        let pn_big = (p as u128).checked_pow(n_prec).ok_or_else(|| {
            Error::ConfigInvalid(format!("p^N overflows: p={p}, N={n_prec}"))
        })?;
        if pn_big > (1u128 << 62) {
            return Err(Error::ConfigInvalid(format!(
                "p^N = {pn_big} exceeds the 2^62 coefficient bound"
            )));
        }
        let pn = pn_big as u64;
        let modulus: Vec<u64> = fq.modulus().iter().map(|&c| c % pn).collect();
        let mut ring = WittRing {
            p,
            n_prec,
            pn,
            deg,
            modulus,
            sigma_cols: vec![],
            sigma_inv_cols: vec![],
            fq,
            guard,
        };
        // Newton-lift the Frobenius image of t.
        let s = ring.lift_frobenius_root()?;
        ring.sigma_cols = ring.power_basis_matrix(&s);
        // sigma has order deg; its inverse is sigma^(deg-1)
        let mut inv_cols = ring.identity_cols();
        for _ in 0..(deg.max(1) - 1) {
            inv_cols = ring.compose_cols(&ring.sigma_cols, &inv_cols);
        }
        ring.sigma_inv_cols = inv_cols;
        Ok(Arc::new(ring))
    }

    fn identity_cols(&self) -> Vec<Vec<u64>> {
        (0..self.deg)
            .map(|i| {
                let mut v = vec![0u64; self.deg];
                v[i] = 1;
                v
            })
            .collect()
    }

    /// cols of (A after B) given cols of A and B: (A.B) e_i = A (B e_i).
    fn compose_cols(&self, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
        b.iter().map(|bi| self.apply_cols(a, &WittEl(bi.clone())).0).collect()
    }

    fn apply_cols(&self, cols: &[Vec<u64>], x: &WittEl) -> WittEl {
        let mut out = vec![0u64; self.deg];
        for (i, col) in cols.iter().enumerate() {
            let c = x.0[i];
            if c == 0 {
                continue;
            }
            for (j, &m) in col.iter().enumerate() {
                out[j] = self.add_u(out[j], self.mul_u(c, m));
            }
        }
        WittEl(out)
    }

    fn power_basis_matrix(&self, s: &WittEl) -> Vec<Vec<u64>> {
        let mut cols = Vec::with_capacity(self.deg);
        let mut acc = self.one();
        for _ in 0..self.deg {
            cols.push(acc.0.clone());
            acc = self.mul(&acc, s);
        }
        cols
    }

    fn lift_frobenius_root(&self) -> Result<WittEl> {
        if self.deg == 1 {
            return Ok(self.zero());
        }
        let t = self.gen();
        let mut s = self.pow(&t, self.p);
        // m(s) = 0 mod p at the start; Newton doubles the precision each step
        let mut steps = 0;
        loop {
            let fs = self.eval_modulus(&s);
            if self.is_zero(&fs) {
                return Ok(s);
            }
            let dfs = self.eval_modulus_deriv(&s);
            let dinv = self.inv(&dfs)?;
            s = self.sub(&s, &self.mul(&fs, &dinv));
            steps += 1;
            if steps > 2 * self.n_prec + 8 {
                return Err(Error::PrecisionExhausted(
                    "Frobenius root Newton iteration did not converge".into(),
                ));
            }
        }
    }

    fn eval_modulus(&self, x: &WittEl) -> WittEl {
        // Horner with monic leading 1
        let mut acc = self.one();
        for k in (0..self.deg).rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.from_u64(self.modulus[k]));
        }
        acc
    }

    fn eval_modulus_deriv(&self, x: &WittEl) -> WittEl {
        let d = self.deg as u64;
        let mut acc = self.from_u64(d % self.pn);
        for k in (1..self.deg).rev() {
            acc = self.mul(&acc, x);
            let c = self.mul_u(k as u64 % self.pn, self.modulus[k]);
            acc = self.add(&acc, &self.from_u64(c));
        }
        acc
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n_prec
    }

    /// Valuations at or above this are treated as indistinguishable from zero.
    pub fn cutoff(&self) -> u32 {
        (self.n_prec - self.guard).max(1)
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    pub fn pn(&self) -> u64 {
        self.pn
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn residue_field(&self) -> &Arc<Fq> {
        &self.fq
    }

    pub fn p_pow(&self, k: u32) -> u64 {
        debug_assert!(k <= self.n_prec);
        pow_u64(self.p, k)
    }

    #[inline]
    fn add_u(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.pn {
            s - self.pn
        } else {
            s
        }
    }

    #[inline]
    fn mul_u(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pn as u128) as u64
    }

    pub fn zero(&self) -> WittEl {
        WittEl(vec![0; self.deg])
    }

    pub fn one(&self) -> WittEl {
        let mut v = vec![0; self.deg];
        v[0] = 1;
        WittEl(v)
    }

    pub fn gen(&self) -> WittEl {
        let mut v = vec![0; self.deg];
        if self.deg > 1 {
            v[1] = 1;
        }
        WittEl(v)
    }

    pub fn from_u64(&self, n: u64) -> WittEl {
        let mut v = vec![0; self.deg];
        v[0] = n % self.pn;
        WittEl(v)
    }

    pub fn from_i64(&self, n: i64) -> WittEl {
        let m = self.pn as i128;
        let r = ((n as i128 % m) + m) % m;
        self.from_u64(r as u64)
    }

    pub fn is_zero(&self, a: &WittEl) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &WittEl, b: &WittEl) -> WittEl {
        WittEl(a.0.iter().zip(&b.0).map(|(&x, &y)| self.add_u(x, y)).collect())
    }

    pub fn sub(&self, a: &WittEl, b: &WittEl) -> WittEl {
        WittEl(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| self.add_u(x, if y == 0 { 0 } else { self.pn - y }))
                .collect(),
        )
    }

    pub fn neg(&self, a: &WittEl) -> WittEl {
        WittEl(a.0.iter().map(|&x| if x == 0 { 0 } else { self.pn - x }).collect())
    }

    pub fn mul(&self, a: &WittEl, b: &WittEl) -> WittEl {
        // schoolbook product then reduction by the monic modulus
        let d = self.deg;
        let mut prod = vec![0u128; 2 * d - 1];
        for i in 0..d {
            let ai = a.0[i];
            if ai == 0 {
                continue;
            }
            for j in 0..d {
                let bj = b.0[j];
                if bj == 0 {
                    continue;
                }
                prod[i + j] = (prod[i + j] + ai as u128 * bj as u128) % self.pn as u128;
            }
        }
        // reduce t^(d+k) using t^d = -(m_0 + ... + m_{d-1} t^{d-1})
        for k in (d..2 * d - 1).rev() {
            let c = prod[k] % self.pn as u128;
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                let m = self.modulus[i] as u128;
                if m == 0 {
                    continue;
                }
                // subtract c * m at position k - d + i
                let pos = k - d + i;
                let sub = (c * m) % self.pn as u128;
                prod[pos] = (prod[pos] + self.pn as u128 - sub) % self.pn as u128;
            }
        }
        WittEl(prod[..d].iter().map(|&x| x as u64).collect())
    }

    pub fn scal_u(&self, c: u64, a: &WittEl) -> WittEl {
        WittEl(a.0.iter().map(|&x| self.mul_u(c % self.pn, x)).collect())
    }

    pub fn pow(&self, a: &WittEl, mut e: u64) -> WittEl {
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

    /// p-adic valuation: min over coefficients, N for zero.
    pub fn val(&self, a: &WittEl) -> u32 {
        let mut best = self.n_prec;
        for &c in &a.0 {
            if c == 0 {
                continue;
            }
            let mut v = 0u32;
            let mut x = c;
            while x % self.p == 0 {
                x /= self.p;
                v += 1;
            }
            if v < best {
                best = v;
            }
            if best == 0 {
                return 0;
            }
        }
        best
    }

    pub fn is_unit(&self, a: &WittEl) -> bool {
        self.val(a) == 0
    }

    /// Exact division by p^k; None when some coefficient is not divisible.
    pub fn div_p(&self, a: &WittEl, k: u32) -> Option<WittEl> {
        let pk = self.p_pow(k);
        let mut out = Vec::with_capacity(self.deg);
        for &c in &a.0 {
            if c % pk != 0 {
                return None;
            }
            out.push(c / pk);
        }
        Some(WittEl(out))
    }

    pub fn mul_p(&self, a: &WittEl, k: u32) -> WittEl {
        let pk = self.p_pow(k.min(self.n_prec));
        self.scal_u(pk % self.pn, a)
    }

    /// Inverse of a unit by Hensel lifting the residue inverse.
    pub fn inv(&self, a: &WittEl) -> Result<WittEl> {
        if !self.is_unit(a) {
            return Err(Error::NotUnit);
        }
        let r = self.reduce(a);
        let rinv = self.fq.inv(&r)?;
        let mut x = self.lift(&rinv);
        // x <- x(2 - a x), doubling precision
        let two = self.from_u64(2);
        let mut steps = 0u32;
        loop {
            let ax = self.mul(a, &x);
            let corr = self.sub(&two, &ax);
            let nx = self.mul(&x, &corr);
            if nx == x {
                let check = self.mul(a, &x);
                if check == self.one() {
                    return Ok(x);
                }
            }
            x = nx;
            steps += 1;
            if steps > self.n_prec + 8 {
                let check = self.mul(a, &x);
                if check == self.one() {
                    return Ok(x);
                }
                return Err(Error::PrecisionExhausted("unit inverse iteration".into()));
            }
        }
    }

    /// Reduction mod p into the residue field.
    pub fn reduce(&self, a: &WittEl) -> FqEl {
        FqEl(a.0.iter().map(|&c| c % self.p).collect())
    }

    /// Coefficient lift of a residue element.
    pub fn lift(&self, a: &FqEl) -> WittEl {
        WittEl(a.0.clone())
    }

    /// The Frobenius lift sigma (exact automorphism reducing to x -> x^p).
    pub fn sigma(&self, a: &WittEl) -> WittEl {
        self.apply_cols(&self.sigma_cols, a)
    }

    pub fn sigma_inv(&self, a: &WittEl) -> WittEl {
        self.apply_cols(&self.sigma_inv_cols, a)
    }

    pub fn sigma_k(&self, a: &WittEl, k: usize) -> WittEl {
        let k = k % self.deg.max(1);
        let mut x = a.clone();
        for _ in 0..k {
            x = self.sigma(&x);
        }
        x
    }

    /// Square root of a unit by residue scan plus Hensel (p odd).
    pub fn sqrt_unit(&self, a: &WittEl) -> Option<WittEl> {
        if !self.is_unit(a) {
            return None;
        }
        let r = self.reduce(a);
        let r0 = self.fq.sqrt(&r)?;
        let mut x = self.lift(&r0);
        // Newton: x <- (x + a/x)/2
        let half = self.inv(&self.from_u64(2)).expect("2 is a unit for odd p");
        for _ in 0..self.n_prec + 3 {
            let xi = self.inv(&x).ok()?;
            let nx = self.mul(&self.add(&x, &self.mul(a, &xi)), &half);
            if nx == x {
                break;
            }
            x = nx;
        }
        if self.mul(&x, &x) == *a {
            Some(x)
        } else {
            None
        }
    }

    /// Reinterpret at lower precision n2 (coefficients reduced mod p^n2).
    pub fn truncate_to(&self, other: &WittRing, a: &WittEl) -> WittEl {
        debug_assert!(other.n_prec <= self.n_prec);
        debug_assert_eq!(other.deg, self.deg);
        WittEl(a.0.iter().map(|&c| c % other.pn).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, deg: usize, n: u32) -> Arc<WittRing> {
        let fq = Arc::new(Fq::new(p, deg).unwrap());
        WittRing::new(fq, n).unwrap()
    }

    #[test]
    fn sigma_is_ring_automorphism_reducing_to_frobenius() {
        for (p, d) in [(3u64, 2usize), (5, 2), (3, 4)] {
            let w = ring(p, d, 12);
            let a = WittEl((0..d as u64).map(|i| (i * 7 + 3) % w.pn()).collect());
            let b = WittEl((0..d as u64).map(|i| (i * 13 + 1) % w.pn()).collect());
            assert_eq!(w.sigma(&w.mul(&a, &b)), w.mul(&w.sigma(&a), &w.sigma(&b)));
            assert_eq!(w.sigma(&w.add(&a, &b)), w.add(&w.sigma(&a), &w.sigma(&b)));
            // reduces to x^p
            let fq = w.residue_field().clone();
            assert_eq!(w.reduce(&w.sigma(&a)), fq.frob(&w.reduce(&a)));
            // order deg
            let mut x = a.clone();
            for _ in 0..d {
                x = w.sigma(&x);
            }
            assert_eq!(x, a);
            // sigma_inv really inverts
            assert_eq!(w.sigma_inv(&w.sigma(&a)), a);
        }
    }

    #[test]
    fn units_invert_exactly() {
        let w = ring(3, 2, 12);
        let a = WittEl(vec![7, 5]);
        let ai = w.inv(&a).unwrap();
        assert_eq!(w.mul(&a, &ai), w.one());
        assert!(w.inv(&w.mul_p(&a, 1)).is_err());
    }

    #[test]
    fn valuation_and_exact_division() {
        let w = ring(3, 2, 12);
        let a = WittEl(vec![27, 9]);
        assert_eq!(w.val(&a), 2);
        let d = w.div_p(&a, 2).unwrap();
        assert_eq!(d, WittEl(vec![3, 1]));
        assert!(w.div_p(&a, 3).is_none());
        assert_eq!(w.val(&w.zero()), 12);
    }

    #[test]
    fn sqrt_of_nonsquare_unit_exists_in_quadratic_extension() {
        let w = ring(3, 2, 12);
        // 2 is a nonsquare mod 3; it has a root in Z_9/3^12
        let two = w.from_u64(2);
        let r = w.sqrt_unit(&two).unwrap();
        assert_eq!(w.mul(&r, &r), two);
        // and sigma negates it (the two roots are conjugate)
        assert_eq!(w.sigma(&r), w.neg(&r));
    }
}
