//! Square classes, Hilbert symbols, and isometry invariants of
//! nondegenerate quadratic forms over Q_p for odd p.
//!
//! A form is handed in as a symmetric Gram matrix over the rational column
//! (the degree-one truncated ring); congruence diagonalization with exact
//! pivoting extracts square classes, and (dimension, determinant class,
//! Hasse product) classify the form. Witt decomposition peels hyperbolic
//! planes to expose the anisotropic kernel.

use crate::config::legendre;
use crate::error::{Error, Result};
use crate::rmatrix::RMatrix;
use crate::witt::WittRing;
use std::sync::Arc;

/// Square class of a nonzero p-adic number: valuation parity and whether the
/// unit part is a square mod p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QpClass {
    pub odd_val: bool,
    pub unit_square: bool,
}

impl QpClass {
    pub fn one() -> QpClass {
        QpClass {
            odd_val: false,
            unit_square: true,
        }
    }

    pub fn from_i64(p: u64, a: i64) -> Result<QpClass> {
        if a == 0 {
            return Err(Error::DegenerateForm("square class of zero".into()));
        }
        let mut v = 0u32;
        let mut x = a;
        while x % p as i64 == 0 {
            x /= p as i64;
            v += 1;
        }
        Ok(QpClass {
            odd_val: v % 2 == 1,
            unit_square: legendre(x, p) == 1,
        })
    }

    pub fn mul(self, other: QpClass) -> QpClass {
        QpClass {
            odd_val: self.odd_val ^ other.odd_val,
            unit_square: self.unit_square == other.unit_square,
        }
    }

    pub fn is_one(self) -> bool {
        !self.odd_val && self.unit_square
    }
}

/// Hilbert symbol (a, b)_p on square classes, odd p.
pub fn hilbert(p: u64, a: QpClass, b: QpClass) -> i32 {
    let eps = ((p - 1) / 2) % 2 == 1; // -1 is a nonsquare exactly when true
    let mut sign = 1i32;
    if a.odd_val && b.odd_val && eps {
        sign = -sign;
    }
    if b.odd_val && !a.unit_square {
        sign = -sign;
    }
    if a.odd_val && !b.unit_square {
        sign = -sign;
    }
    sign
}

pub fn hilbert_i64(p: u64, a: i64, b: i64) -> Result<i32> {
    Ok(hilbert(p, QpClass::from_i64(p, a)?, QpClass::from_i64(p, b)?))
}

/// Independent check: (a, b)_p = 1 exactly when z^2 = a x^2 + b y^2 has a
/// primitive solution mod p^3 (valuations of a, b at most 1). Brute force.
pub fn hilbert_conic_oracle(p: u64, a: i64, b: i64) -> bool {
    let m = (p * p * p) as i64;
    let am = ((a % m) + m) % m;
    let bm = ((b % m) + m) % m;
    for x in 0..m {
        for y in 0..m {
            let rhs = (am * x % m * x % m + bm * y % m * y % m) % m;
            for z in 0..m {
                if (z * z) % m != rhs {
                    continue;
                }
                if x % p as i64 != 0 || y % p as i64 != 0 || z % p as i64 != 0 {
                    return true;
                }
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormInvariants {
    pub dim: usize,
    pub det: QpClass,
    pub hasse: i32,
    pub witt_index: usize,
    pub aniso_dim: usize,
}

/// Diagonalize a symmetric Gram matrix by congruence over the rational
/// column, returning the square classes of the diagonal entries.
pub fn diagonal_classes(zp: &Arc<WittRing>, gram: &RMatrix) -> Result<Vec<QpClass>> {
    assert_eq!(gram.rows, gram.cols);
    let w = zp.clone();
    let p = w.p();
    let cutoff = w.cutoff();
    let n = gram.rows;
    let mut g = gram.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut classes = Vec::with_capacity(n);
    let scale = gram.scale;
    while !active.is_empty() {
        // locate the minimum valuation among active entries
        let mut best: Option<(usize, usize, u32)> = None;
        for &i in &active {
            for &j in &active {
                let e = g.get(i, j);
                if w.is_zero(e) {
                    continue;
                }
                let v = w.val(e);
                if best.map_or(true, |(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                }
            }
        }
        let (bi, bj, k) = match best {
            None => {
                return Err(Error::DegenerateForm(
                    "symmetric block vanished before diagonalization finished".into(),
                ));
            }
            Some((_, _, v)) if v >= cutoff => {
                return Err(Error::PrecisionExhausted(format!(
                    "diagonalization pivot valuation {v} past cutoff {cutoff}"
                )));
            }
            Some(t) => t,
        };
        // prefer a diagonal pivot at the same valuation
        let diag_pivot = active
            .iter()
            .copied()
            .filter(|&i| !w.is_zero(g.get(i, i)) && w.val(g.get(i, i)) == k)
            .min();
        let piv = match diag_pivot {
            Some(i) => i,
            None => {
                // fold row/column bj into bi: the new diagonal entry picks up
                // 2 g[bi][bj], which attains the minimum valuation
                for c in 0..n {
                    let s = w.add(g.get(bi, c), g.get(bj, c));
                    g.set(bi, c, s);
                }
                for r in 0..n {
                    let s = w.add(g.get(r, bi), g.get(r, bj));
                    g.set(r, bi, s);
                }
                debug_assert_eq!(w.val(g.get(bi, bi)), k);
                bi
            }
        };
        // clear the pivot row/column among the other active indices
        let d = g.get(piv, piv).clone();
        let unit = w.div_p(&d, k).expect("valuation divides pivot");
        let uinv = w.inv(&unit)?;
        for &i in active.iter().filter(|&&i| i != piv) {
            let e = g.get(i, piv).clone();
            if w.is_zero(&e) {
                continue;
            }
            let c = w.mul(
                &w.div_p(&e, k)
                    .ok_or_else(|| Error::PrecisionExhausted("congruence division".into()))?,
                &uinv,
            );
            // row_i -= c row_piv; col_i -= c col_piv
            for cidx in 0..n {
                let s = w.sub(g.get(i, cidx), &w.mul(&c, g.get(piv, cidx)));
                g.set(i, cidx, s);
            }
            for ridx in 0..n {
                let s = w.sub(g.get(ridx, i), &w.mul(&c, g.get(ridx, piv)));
                g.set(ridx, i, s);
            }
        }
        // record the class of d = p^k * unit relative to the global scale
        let val = k as i32 - scale;
        let res = w.reduce(&unit);
        let unit_rep = res.0[0];
        classes.push(QpClass {
            odd_val: val.rem_euclid(2) == 1,
            unit_square: legendre(unit_rep as i64, p) == 1,
        });
        active.retain(|&i| i != piv);
    }
    Ok(classes)
}

pub fn invariants_from_classes(p: u64, classes: &[QpClass]) -> FormInvariants {
    let n = classes.len();
    let mut det = QpClass::one();
    for &c in classes {
        det = det.mul(c);
    }
    let mut hasse = 1i32;
    for i in 0..n {
        for j in i + 1..n {
            hasse *= hilbert(p, classes[i], classes[j]);
        }
    }
    let minus_one = QpClass {
        odd_val: false,
        unit_square: legendre(-1, p) == 1,
    };
    // peel hyperbolic planes while the form stays isotropic
    let mut dim = n;
    let mut d = det;
    let mut eps = hasse;
    let mut witt = 0usize;
    while dim > 0 && isotropic(p, dim, d, eps, minus_one) {
        // det of a hyperbolic plane is -1; removing it divides the
        // determinant and adjusts the Hasse product by (-1, d_rest)
        let d_rest = d.mul(minus_one);
        eps *= hilbert(p, minus_one, d_rest);
        d = d_rest;
        dim -= 2;
        witt += 1;
    }
    FormInvariants {
        dim: n,
        det,
        hasse,
        witt_index: witt,
        aniso_dim: dim,
    }
}

fn isotropic(p: u64, dim: usize, det: QpClass, hasse: i32, minus_one: QpClass) -> bool {
    match dim {
        0 | 1 => false,
        2 => det == minus_one,
        3 => {
            let md = det.mul(minus_one);
            hilbert(p, minus_one, md) == hasse
        }
        4 => !det.is_one() || hasse == hilbert(p, minus_one, minus_one),
        _ => true,
    }
}

pub fn invariants_of_gram(zp: &Arc<WittRing>, gram: &RMatrix) -> Result<FormInvariants> {
    let classes = diagonal_classes(zp, gram)?;
    Ok(invariants_from_classes(zp.p(), &classes))
}

/// Isometry over Q_p is decided by dimension, determinant class, and the
/// Hasse product.
pub fn isometric(a: &FormInvariants, b: &FormInvariants) -> bool {
    a.dim == b.dim && a.det == b.det && a.hasse == b.hasse
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;

    fn zp(p: u64) -> Arc<WittRing> {
        let fq = Arc::new(Fq::new(p, 1).unwrap());
        WittRing::new(fq, 12).unwrap()
    }

    #[test]
    fn hilbert_agrees_with_conic_search() {
        for p in [3u64, 5] {
            let d = crate::config::smallest_nonsquare(p).unwrap() as i64;
            let pi = p as i64;
            let reps = [1i64, -1, d, -d, pi, -pi, pi * d, -pi * d];
            for &a in &reps {
                for &b in &reps {
                    let sym = hilbert_i64(p, a, b).unwrap();
                    let oracle = hilbert_conic_oracle(p, a, b);
                    assert_eq!(sym == 1, oracle, "p={p} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn hyperbolic_plane_invariants() {
        let w = zp(5);
        let g = RMatrix::from_i64(w.clone(), 2, 2, &[0, 1, 1, 0]);
        let inv = invariants_of_gram(&w, &g).unwrap();
        assert_eq!(inv.witt_index, 1);
        assert_eq!(inv.aniso_dim, 0);
        assert_eq!(inv.hasse, 1);
        // det class is -1
        let m1 = QpClass::from_i64(5, -1).unwrap();
        assert_eq!(inv.det, m1);
    }

    #[test]
    fn anisotropic_quaternary_form() {
        // <1, -d, -p, dp> is the norm form of the quaternion division
        // algebra, the unique 4-dimensional anisotropic space
        for p in [3u64, 5, 7] {
            let w = zp(p);
            let d = crate::config::smallest_nonsquare(p).unwrap() as i64;
            let pi = p as i64;
            let g = RMatrix::from_i64(w.clone(), 4, 4, &[
                1, 0, 0, 0,
                0, -d, 0, 0,
                0, 0, -pi, 0,
                0, 0, 0, d * pi,
            ]);
            let inv = invariants_of_gram(&w, &g).unwrap();
            assert_eq!(inv.aniso_dim, 4, "p={p}");
            assert_eq!(inv.witt_index, 0);
        }
    }

    #[test]
    fn diagonalization_handles_off_diagonal_minimum() {
        let w = zp(3);
        // all diagonal entries have higher valuation than the off-diagonal 1
        let g = RMatrix::from_i64(w.clone(), 2, 2, &[3, 1, 1, 3]);
        let inv = invariants_of_gram(&w, &g).unwrap();
        // det = 9 - 1 = 8 ~ unit square class of 2 mod 3 (nonsquare)
        assert_eq!(
            inv.det,
            QpClass {
                odd_val: false,
                unit_square: false
            }
        );
        assert_eq!(inv.dim, 2);
        // -det = -8 = 1 mod 3 is a square in Z_3, so the plane is hyperbolic
        assert_eq!(inv.witt_index, 1);
        assert_eq!(inv.aniso_dim, 0);
    }

    #[test]
    fn class_arithmetic() {
        let a = QpClass::from_i64(3, 6).unwrap(); // 3 * 2: odd val, nonsquare unit
        assert!(a.odd_val && !a.unit_square);
        assert!(a.mul(a).is_one());
        assert_eq!(QpClass::from_i64(3, 12).unwrap(), QpClass::from_i64(3, 27).unwrap().mul(QpClass::from_i64(3, 4).unwrap()));
    }
}
