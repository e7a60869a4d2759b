//! Fixed reference spaces: the six-dimensional quadratic space with its
//! standard diagonal Gram, the nonsplit even quadric over the prime field,
//! and the four-dimensional Hermitian space with the antidiagonal pairing.

use crate::error::{Error, Result};
use crate::fq::{Fq, FqEl, FqMat};
use crate::rmatrix::RMatrix;
use crate::witt::WittRing;
use std::sync::Arc;

/// Diagonal Gram of quadratic values diag(-p, p d, -1, d, -1, d) over the
/// given ring: Q(v) = v G v^T, polar form [x, y] = 2 x G y^T.
pub fn standard_gram(ring: &Arc<WittRing>, delta: u64) -> RMatrix {
    let p = ring.p() as i64;
    let d = delta as i64;
    let mut g = RMatrix::zero(ring.clone(), 6, 6);
    let diag = [-p, p * d, -1, d, -1, d];
    for (i, &v) in diag.iter().enumerate() {
        g.set(i, i, ring.from_i64(v));
    }
    g
}

/// Bilinear Gram of the 2d-dimensional quadric over the base prime field,
/// nonsplit at the anisotropic tail: d-1 hyperbolic pairs followed by the
/// norm-form block diag(2, -2 delta). Q(v) = B(v, v) / 2.
pub fn quadric_gram(fq: &Arc<Fq>, delta: u64, d: usize) -> FqMat {
    assert!(d >= 1);
    let n = 2 * d;
    let mut g = FqMat::zero(fq, n, n);
    for i in 0..d - 1 {
        g.set(2 * i, 2 * i + 1, fq.one());
        g.set(2 * i + 1, 2 * i, fq.one());
    }
    g.set(n - 2, n - 2, fq.from_u64(2));
    g.set(n - 1, n - 1, fq.neg(&fq.from_u64(2 * delta % fq.p())));
    g
}

pub fn bilinear(fq: &Arc<Fq>, g: &FqMat, x: &[FqEl], y: &[FqEl]) -> FqEl {
    let n = g.rows;
    let mut acc = fq.zero();
    for i in 0..n {
        if fq.is_zero(&x[i]) {
            continue;
        }
        for j in 0..n {
            if fq.is_zero(&y[j]) {
                continue;
            }
            let t = fq.mul(&x[i], &fq.mul(g.get(i, j), &y[j]));
            acc = fq.add(&acc, &t);
        }
    }
    acc
}

pub fn quad_value(fq: &Arc<Fq>, g: &FqMat, v: &[FqEl]) -> FqEl {
    let b = bilinear(fq, g, v, v);
    let half = fq.inv(&fq.from_u64(2)).expect("odd characteristic");
    fq.mul(&b, &half)
}

/// Coordinatewise p-power Frobenius on a vector.
pub fn frob_vec(fq: &Arc<Fq>, v: &[FqEl]) -> Vec<FqEl> {
    v.iter().map(|e| fq.frob(e)).collect()
}

/// The two reference maximal isotropic flags of the quadric over a field
/// containing the quadratic subfield: rows 0..d-1 of `plus` span the
/// distinguished family member, `minus` differs in the last row, and the
/// coordinate Frobenius exchanges the two last rows.
pub struct ReferenceFlags {
    pub plus: FqMat,
    pub minus: FqMat,
}

pub fn reference_flags(fq: &Arc<Fq>, delta: u64, d: usize) -> Result<ReferenceFlags> {
    if fq.deg() % 2 != 0 {
        return Err(Error::ConfigInvalid(
            "reference flags need the quadratic subfield".into(),
        ));
    }
    let n = 2 * d;
    let g = quadric_gram(fq, delta, d);
    // u = sqrt(delta), pinned to the lexicographically smaller root
    let u = {
        let r = fq
            .sqrt(&fq.from_u64(delta))
            .ok_or_else(|| Error::SearchExhausted("delta has no square root".into()))?;
        let rn = fq.neg(&r);
        if r <= rn {
            r
        } else {
            rn
        }
    };
    // s in the quadratic subfield with s^(p+1) = -1/(4 delta)
    let target = {
        let four_delta = fq.from_u64(4 * delta % fq.p());
        fq.neg(&fq.inv(&four_delta)?)
    };
    let p = fq.p();
    let mut s_found: Option<FqEl> = None;
    for idx in 0..fq.p().pow(2) {
        let cand = fq.el_from_index(idx);
        if !fq.in_subfield(&cand, 2) {
            continue;
        }
        let n1 = fq.mul(&fq.pow(&cand, p), &cand);
        if n1 == target {
            s_found = Some(cand);
            break;
        }
    }
    // el_from_index for indexes < p^2 only walks the first coefficients; scan
    // the whole field when the subfield is not laid out in the low indexes
    if s_found.is_none() {
        for idx in 0..fq.card() {
            let cand = fq.el_from_index(idx);
            if !fq.in_subfield(&cand, 2) {
                continue;
            }
            let n1 = fq.mul(&fq.pow(&cand, p), &cand);
            if n1 == target {
                s_found = Some(cand);
                break;
            }
        }
    }
    let s = s_found.ok_or_else(|| Error::SearchExhausted("norm equation unsolved".into()))?;
    let sp = fq.pow(&s, p);
    let mut plus = FqMat::zero(fq, d, n);
    let mut minus = FqMat::zero(fq, d, n);
    for i in 0..d - 1 {
        plus.set(i, 2 * i, fq.one());
        minus.set(i, 2 * i, fq.one());
    }
    // last rows: s (u, 1) and s^p (-u, 1) in the anisotropic coordinates
    plus.set(d - 1, n - 2, fq.mul(&s, &u));
    plus.set(d - 1, n - 1, s.clone());
    minus.set(d - 1, n - 2, fq.neg(&fq.mul(&sp, &u)));
    minus.set(d - 1, n - 1, sp.clone());
    // sanity: both rows isotropic and they pair to 1
    let er = plus.row(d - 1);
    let fr = minus.row(d - 1);
    if !fq.is_zero(&quad_value(fq, &g, &er)) || !fq.is_zero(&quad_value(fq, &g, &fr)) {
        return Err(Error::DegenerateForm("flag rows are not isotropic".into()));
    }
    if bilinear(fq, &g, &er, &fr) != fq.one() {
        return Err(Error::DegenerateForm("flag rows do not pair to one".into()));
    }
    if frob_vec(fq, &er) != fr {
        return Err(Error::DegenerateForm(
            "Frobenius does not exchange the flag rows".into(),
        ));
    }
    Ok(ReferenceFlags { plus, minus })
}

/// Evaluate v G v^T for a symmetric Gram.
pub fn gram_eval(fq: &Arc<Fq>, g: &FqMat, v: &[FqEl]) -> FqEl {
    bilinear(fq, g, v, v)
}

/// Projective representatives (leading coordinate one) of the zero lines of
/// the symmetric Gram: vectors v with v G v^T = 0.
pub fn isotropic_lines(fq: &Arc<Fq>, g: &FqMat) -> Vec<Vec<FqEl>> {
    let n = g.rows;
    let card = fq.card();
    let mut out = Vec::new();
    for lead in 0..n {
        let free = (n - lead - 1) as u32;
        for idx in 0..card.pow(free) {
            let mut v = vec![fq.zero(); n];
            v[lead] = fq.one();
            let mut t = idx;
            for k in lead + 1..n {
                v[k] = fq.el_from_index(t % card);
                t /= card;
            }
            if fq.is_zero(&gram_eval(fq, g, &v)) {
                out.push(v);
            }
        }
    }
    out
}

/// Totally isotropic subspaces of the given dimension for a symmetric Gram,
/// as canonical reduced row bases. Brute-force extension, suitable for the
/// small ambient spaces used here.
pub fn isotropic_subspaces(fq: &Arc<Fq>, g: &FqMat, dim: usize) -> Vec<FqMat> {
    use std::collections::BTreeSet;
    let n = g.rows;
    let card = fq.card();
    let mut level: BTreeSet<FqMat> = BTreeSet::new();
    for v in isotropic_lines(fq, g) {
        let (r, _) = FqMat::from_rows(vec![v]).rref(fq);
        level.insert(r);
    }
    for _ in 1..dim {
        let mut next: BTreeSet<FqMat> = BTreeSet::new();
        for s in &level {
            // the perp of the span: kernel of G * S^T as row space
            let m = s.mul(fq, g);
            let ker = m.kernel(fq);
            let kd = ker.rows as u32;
            for idx in 1..card.pow(kd) {
                let mut c = Vec::with_capacity(ker.rows);
                let mut t = idx;
                for _ in 0..ker.rows {
                    c.push(fq.el_from_index(t % card));
                    t /= card;
                }
                let mut v = vec![fq.zero(); n];
                for (ci, cv) in c.iter().enumerate() {
                    if fq.is_zero(cv) {
                        continue;
                    }
                    for j in 0..n {
                        v[j] = fq.add(&v[j], &fq.mul(cv, ker.get(ci, j)));
                    }
                }
                if !fq.is_zero(&gram_eval(fq, g, &v)) {
                    continue;
                }
                let cand = FqMat::stack(s, &FqMat::from_rows(vec![v.clone()]));
                let (r, piv) = cand.rref(fq);
                if piv.len() == s.rows + 1 {
                    next.insert(r);
                }
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Antidiagonal Hermitian Gram on four variables.
pub fn hermitian_gram(fq: &Arc<Fq>) -> FqMat {
    let mut h = FqMat::zero(fq, 4, 4);
    for i in 0..4 {
        h.set(i, 3 - i, fq.one());
    }
    h
}

/// Sesquilinear pairing x^T H y^(p).
pub fn hermitian_pair(fq: &Arc<Fq>, h: &FqMat, x: &[FqEl], y: &[FqEl]) -> FqEl {
    let yf = frob_vec(fq, y);
    let mut acc = fq.zero();
    for i in 0..4 {
        if fq.is_zero(&x[i]) {
            continue;
        }
        for j in 0..4 {
            if fq.is_zero(h.get(i, j)) || fq.is_zero(&yf[j]) {
                continue;
            }
            let t = fq.mul(&x[i], &fq.mul(h.get(i, j), &yf[j]));
            acc = fq.add(&acc, &t);
        }
    }
    acc
}

/// Change of basis T with T^T H T^(p) = I, one hyperbolic block at a time:
/// transports the antidiagonal Hermitian model onto the diagonal norm-sum
/// model. Found by a small search for vectors of norm one.
pub fn hermitian_diagonalizer(fq: &Arc<Fq>) -> Result<FqMat> {
    let h = hermitian_gram(fq);
    let p = fq.p();
    // blocks {0,3} and {1,2} are hyperbolic planes for the pairing
    let mut cols: Vec<Vec<FqEl>> = Vec::with_capacity(4);
    for &(a, b) in &[(0usize, 3usize), (1, 2)] {
        // want v = x e_a + y e_b, w with norm(v) = norm(w) = 1, pair(v,w) = 0;
        // norm(x e_a + y e_b) = x y^p + y x^p
        let mut found: Option<(Vec<FqEl>, Vec<FqEl>)> = None;
        'outer: for xi in 0..fq.card() {
            let x = fq.el_from_index(xi);
            for yi in 0..fq.card() {
                let y = fq.el_from_index(yi);
                let mut v = vec![fq.zero(); 4];
                v[a] = x.clone();
                v[b] = y.clone();
                if hermitian_pair(fq, &h, &v, &v) != fq.one() {
                    continue;
                }
                // second vector orthogonal to v of norm 1 inside the block:
                // search the block for it
                for x2i in 0..fq.card() {
                    let x2 = fq.el_from_index(x2i);
                    for y2i in 0..fq.card() {
                        let y2 = fq.el_from_index(y2i);
                        let mut w = vec![fq.zero(); 4];
                        w[a] = x2.clone();
                        w[b] = y2.clone();
                        if hermitian_pair(fq, &h, &w, &w) != fq.one() {
                            continue;
                        }
                        if !fq.is_zero(&hermitian_pair(fq, &h, &v, &w)) {
                            continue;
                        }
                        found = Some((v.clone(), w));
                        break 'outer;
                    }
                }
            }
        }
        let (v, w) =
            found.ok_or_else(|| Error::SearchExhausted("hyperbolic block not split".into()))?;
        cols.push(v);
        cols.push(w);
        let _ = p;
    }
    // assemble T with these as columns
    let mut t = FqMat::zero(fq, 4, 4);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..4 {
            t.set(i, j, c[i].clone());
        }
    }
    // verify T^T H T^(p) = I
    let tf = t.frob(fq);
    let prod = t.transpose(fq).mul(fq, &h).mul(fq, &tf);
    let id = FqMat::identity(fq, 4);
    if prod.a != id.a {
        return Err(Error::SearchExhausted(
            "diagonalizer verification failed".into(),
        ));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_gram_matches_expected_invariants() {
        use crate::forms::{invariants_of_gram, QpClass};
        for p in [3u64, 5, 7] {
            let delta = crate::config::smallest_nonsquare(p).unwrap();
            let fq = Arc::new(Fq::new(p, 1).unwrap());
            let zp = WittRing::new(fq, 12).unwrap();
            let g = standard_gram(&zp, delta);
            let inv = invariants_of_gram(&zp, &g).unwrap();
            assert_eq!(inv.dim, 6);
            assert_eq!(inv.witt_index, 2, "p={p}");
            assert_eq!(inv.aniso_dim, 2);
            assert_eq!(inv.hasse, -1, "p={p}");
            let md = QpClass::from_i64(p, -(delta as i64)).unwrap();
            assert_eq!(inv.det, md);
        }
    }

    #[test]
    fn quadric_is_nonsplit_over_prime_field() {
        // the 4-dimensional case over F_p has no isotropic plane; count
        // isotropic vectors of Q(v) = B(v,v)/2: q^3 - q^2 + q zeros for the
        // minus type (including 0)
        let p = 3u64;
        let fq = Arc::new(Fq::new(p, 1).unwrap());
        let g = quadric_gram(&fq, 2, 2);
        let mut zeros = 0u64;
        let card = fq.card();
        let n = 4;
        let total = card.pow(n as u32);
        for idx in 0..total {
            let mut v = Vec::with_capacity(n);
            let mut t = idx;
            for _ in 0..n {
                v.push(fq.el_from_index(t % card));
                t /= card;
            }
            if fq.is_zero(&quad_value(&fq, &g, &v)) {
                zeros += 1;
            }
        }
        assert_eq!(zeros, 27 - 9 + 3);
    }

    #[test]
    fn reference_flags_over_quadratic_field() {
        for d in [1usize, 2, 3] {
            let fq = Arc::new(Fq::new(3, 2).unwrap());
            let fl = reference_flags(&fq, 2, d).unwrap();
            let g = quadric_gram(&fq, 2, d);
            // all rows of both flags are isotropic and mutually orthogonal
            for m in [&fl.plus, &fl.minus] {
                for i in 0..d {
                    for j in 0..d {
                        assert!(fq.is_zero(&bilinear(&fq, &g, &m.row(i), &m.row(j))));
                    }
                }
            }
        }
    }

    #[test]
    fn hermitian_counts_at_p3() {
        // isotropic vectors of the antidiagonal Hermitian form over F_9:
        // 280 projective points (the classical surface count)
        let fq = Arc::new(Fq::new(3, 2).unwrap());
        let h = hermitian_gram(&fq);
        let card = fq.card();
        let mut pts = 0u64;
        // projective representatives: first nonzero coordinate = 1
        for lead in 0..4 {
            let free = 3 - lead;
            for idx in 0..card.pow(free as u32) {
                let mut v = vec![fq.zero(); 4];
                v[lead] = fq.one();
                let mut t = idx;
                for k in lead + 1..4 {
                    v[k] = fq.el_from_index(t % card);
                    t /= card;
                }
                if fq.is_zero(&hermitian_pair(&fq, &h, &v, &v)) {
                    pts += 1;
                }
            }
        }
        assert_eq!(pts, 280);
    }

    #[test]
    fn diagonalizer_transports_the_form() {
        let fq = Arc::new(Fq::new(3, 2).unwrap());
        let t = hermitian_diagonalizer(&fq).unwrap();
        // columns have norm 1 and pair to zero under the antidiagonal form
        let h = hermitian_gram(&fq);
        let tf = t.frob(&fq);
        let prod = t.transpose(&fq).mul(&fq, &h).mul(&fq, &tf);
        assert_eq!(prod.a, FqMat::identity(&fq, 4).a);
    }
}
