//! The eight-dimensional semilinear module underlying everything else, and
//! its wedge-square: an involution ("star"), a six-dimensional fixed space
//! with two distinguished bases, and the induced quadratic form that matches
//! the standard diagonal Gram.
//!
//! Coordinates 0..3 are the first (plus) block, 4..7 the second (minus)
//! block. The wedge space has twelve coordinates: index pairs of each block,
//! in lexicographic order, plus-block first.

use crate::config::Context;
use crate::error::{Error, Result};
use crate::rmatrix::RMatrix;
use crate::spaces;
use crate::witt::{WittEl, WittRing};
use std::sync::Arc;

/// Lexicographic pairs of {0,1,2,3} indexing wedge coordinates per block.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of the complementary pair.
pub const COMPLEMENT: [usize; 6] = [5, 4, 3, 2, 1, 0];

/// Sign of the permutation (P, P^c) of (0,1,2,3).
pub const PAIR_SIGN: [i64; 6] = [1, -1, 1, 1, -1, 1];

pub fn pair_index(i: usize, j: usize) -> usize {
    PAIRS.iter().position(|&(a, b)| (a, b) == (i, j)).unwrap()
}

pub struct Hodge {
    pub w: Arc<WittRing>,
    pub delta: WittEl,
    /// Semilinear operator on columns: v -> f_mat * sigma(v).
    pub f_mat: RMatrix,
    /// Alternating Gram of the polarization on the eight coordinates.
    pub lambda_gram: RMatrix,
    /// Rows: the star-fixed basis x_1..x_6 in wedge coordinates.
    pub x_basis: RMatrix,
    /// Rows: y_i in x-coordinates (orthogonal basis, Frobenius-fixed).
    pub y_in_x: RMatrix,
    /// Inverse change of coordinates (denominators bounded by one power of p).
    pub x_in_y: RMatrix,
    /// Polar form on x-coordinates: [x_i, x_j].
    pub polar_x: RMatrix,
    /// Diagonal Gram of quadratic values on the y basis.
    pub gram_y: RMatrix,
    /// Frobenius on x-coordinate rows: v -> sigma(v) * phi_x (value matrix).
    pub phi_x: RMatrix,
    /// Endomorphism of each wedge basis vector (action on columns).
    wedge_endos: Vec<RMatrix>,
}

impl Hodge {
    pub fn new(ctx: &Context) -> Result<Hodge> {
        let w = ctx.w.clone();
        let delta = ctx.delta_w.clone();
        let p = w.p() as i64;

        let mut f_mat = RMatrix::zero(w.clone(), 8, 8);
        let fcols: [(usize, i64); 8] = [
            (4, 1),
            (5, 1),
            (6, p),
            (7, p),
            (0, p),
            (1, p),
            (2, 1),
            (3, 1),
        ];
        for (j, &(i, c)) in fcols.iter().enumerate() {
            f_mat.set(i, j, w.from_i64(c));
        }

        let dinv = w.inv(&delta)?;
        let mut lambda_gram = RMatrix::zero(w.clone(), 8, 8);
        for i in 0..4 {
            lambda_gram.set(i, 4 + i, dinv.clone());
            lambda_gram.set(4 + i, i, w.neg(&dinv));
        }

        // x basis rows in wedge coordinates: (e-pair index, sign, f-pair index, sign)
        let xdefs: [(usize, i64, usize, i64); 6] = [
            (pair_index(0, 1), 1, pair_index(2, 3), 1),
            (pair_index(2, 3), 1, pair_index(0, 1), 1),
            (pair_index(0, 2), 1, pair_index(1, 3), -1),
            (pair_index(1, 3), -1, pair_index(0, 2), 1),
            (pair_index(0, 3), 1, pair_index(1, 2), 1),
            (pair_index(1, 2), 1, pair_index(0, 3), 1),
        ];
        let mut x_basis = RMatrix::zero(w.clone(), 6, 12);
        for (r, &(pe, se, pf, sf)) in xdefs.iter().enumerate() {
            x_basis.set(r, pe, w.from_i64(se));
            x_basis.set(r, 6 + pf, w.from_i64(sf));
        }

        let mut y_in_x = RMatrix::zero(w.clone(), 6, 6);
        let pw = w.from_i64(p);
        y_in_x.set(0, 0, pw.clone());
        y_in_x.set(0, 1, w.one());
        y_in_x.set(1, 0, w.mul(&pw, &delta));
        y_in_x.set(1, 1, w.neg(&delta));
        for k in 0..2 {
            let base = 2 + 2 * k;
            y_in_x.set(base, base, w.one());
            y_in_x.set(base, base + 1, w.one());
            y_in_x.set(base + 1, base, delta.clone());
            y_in_x.set(base + 1, base + 1, w.neg(&delta));
        }
        let x_in_y = y_in_x.inverse()?;

        let mut polar_x = RMatrix::zero(w.clone(), 6, 6);
        for k in 0..3 {
            polar_x.set(2 * k, 2 * k + 1, w.from_i64(-1));
            polar_x.set(2 * k + 1, 2 * k, w.from_i64(-1));
        }

        let gram_y = spaces::standard_gram(&w, ctx.cfg.delta);

        // Frobenius on x-coordinates: value matrix with rows Phi(x_i)
        let mut phi_x = RMatrix::zero(w.clone(), 6, 6);
        phi_x.scale = 1;
        let pn = w.p_pow(1);
        phi_x.set(0, 1, w.one());
        phi_x.set(1, 0, w.from_u64(pn * pn % w.pn()));
        for &(i, j) in &[(2usize, 3usize), (3, 2), (4, 5), (5, 4)] {
            phi_x.set(i, j, w.from_u64(pn));
        }

        // endomorphisms of the twelve wedge basis vectors
        let mut wedge_endos = Vec::with_capacity(12);
        for blk in 0..2 {
            for &(i, j) in PAIRS.iter() {
                let mut m = RMatrix::zero(w.clone(), 8, 8);
                if blk == 0 {
                    // plus-block pair: z -> z_{4+i} b_j - z_{4+j} b_i
                    m.set(j, 4 + i, w.one());
                    m.set(i, 4 + j, w.from_i64(-1));
                } else {
                    // minus-block pair: z -> z_i b_{4+j} - z_j b_{4+i}
                    m.set(4 + j, i, w.one());
                    m.set(4 + i, j, w.from_i64(-1));
                }
                wedge_endos.push(m);
            }
        }

        Ok(Hodge {
            w,
            delta,
            f_mat,
            lambda_gram,
            x_basis,
            y_in_x,
            x_in_y,
            polar_x,
            gram_y,
            phi_x,
            wedge_endos,
        })
    }

    /// Sesquilinear pairing of eight-coordinate vectors, valued in pairs.
    pub fn herm(&self, x: &[WittEl], y: &[WittEl]) -> (WittEl, WittEl) {
        let w = &self.w;
        let mut u = w.zero();
        let mut v = w.zero();
        for i in 0..4 {
            u = w.add(&u, &w.mul(&x[i], &y[4 + i]));
            v = w.add(&v, &w.mul(&x[4 + i], &y[i]));
        }
        (u, v)
    }

    /// Alternating form delta^{-1} (u - v) built from the pairing.
    pub fn lambda(&self, x: &[WittEl], y: &[WittEl]) -> WittEl {
        let (u, v) = self.herm(x, y);
        let w = &self.w;
        let dinv = w.inv(&self.delta).expect("delta is a unit");
        w.mul(&dinv, &w.sub(&u, &v))
    }

    /// Scalar action of a + b*sqrt: the two block characters on the diagonal.
    pub fn iota(&self, a: i64, b: i64) -> RMatrix {
        let w = &self.w;
        let aw = w.from_i64(a);
        let bd = w.mul(&w.from_i64(b), &self.delta);
        let psi0 = w.add(&aw, &bd);
        let psi1 = w.sub(&aw, &bd);
        let mut m = RMatrix::zero(w.clone(), 8, 8);
        for i in 0..4 {
            m.set(i, i, psi0.clone());
            m.set(4 + i, 4 + i, psi1.clone());
        }
        m
    }

    /// Push a row-lattice basis through the semilinear operator.
    pub fn f_rows(&self, m: &RMatrix) -> RMatrix {
        m.sigma_entrywise().mul(&self.f_mat.transpose())
    }

    /// Preimage of a row-lattice basis under the semilinear operator.
    pub fn f_inv_rows(&self, m: &RMatrix) -> Result<RMatrix> {
        let finv = self.f_mat.inverse()?;
        Ok(m.mul(&finv.transpose()).sigma_inv_entrywise())
    }

    /// Wedge of two eight-coordinate vectors, blockwise.
    pub fn wedge(&self, a: &[WittEl], b: &[WittEl]) -> Vec<WittEl> {
        let w = &self.w;
        let mut out = vec![w.zero(); 12];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            let pe = w.sub(&w.mul(&a[i], &b[j]), &w.mul(&a[j], &b[i]));
            let pf = w.sub(&w.mul(&a[4 + i], &b[4 + j]), &w.mul(&a[4 + j], &b[4 + i]));
            out[k] = pe;
            out[6 + k] = pf;
        }
        out
    }

    /// The star involution on wedge coordinates.
    pub fn star(&self, v: &[WittEl]) -> Vec<WittEl> {
        let w = &self.w;
        let mut out = vec![w.zero(); 12];
        for k in 0..6 {
            let c = COMPLEMENT[k];
            let s = PAIR_SIGN[k];
            let se = if s == 1 { v[6 + k].clone() } else { w.neg(&v[6 + k]) };
            let sf = if s == 1 { v[k].clone() } else { w.neg(&v[k]) };
            out[c] = se;
            out[6 + c] = sf;
        }
        out
    }

    /// p times the wedge Frobenius: an integral operator on wedge coordinates.
    pub fn phi_num(&self, v: &[WittEl]) -> Vec<WittEl> {
        let w = &self.w;
        let p = w.p();
        // multipliers of the two blocks of the semilinear operator
        let de: [u64; 6] = [1, p, p, p, p, p * p % w.pn()];
        let df: [u64; 6] = [p * p % w.pn(), p, p, p, p, 1];
        let mut out = vec![w.zero(); 12];
        for k in 0..6 {
            out[6 + k] = w.scal_u(de[k], &w.sigma(&v[k]));
            out[k] = w.scal_u(df[k], &w.sigma(&v[6 + k]));
        }
        out
    }

    /// Frobenius on rows given in wedge coordinates (scale bookkeeping via
    /// the numerator).
    pub fn phi_wedge_rows(&self, m: &RMatrix) -> RMatrix {
        let mut out = RMatrix::zero(self.w.clone(), m.rows, 12);
        for i in 0..m.rows {
            let nv = self.phi_num(&m.row(i));
            for (j, x) in nv.into_iter().enumerate() {
                out.set(i, j, x);
            }
        }
        out.scale = m.scale + 1;
        out
    }

    /// Frobenius on rows given in x-coordinates.
    pub fn phi_x_rows(&self, m: &RMatrix) -> RMatrix {
        m.sigma_entrywise().mul(&self.phi_x)
    }

    /// Blockwise volume pairing of wedge vectors.
    fn block_pair(&self, x: &[WittEl], y: &[WittEl]) -> WittEl {
        let w = &self.w;
        let mut acc = w.zero();
        for k in 0..6 {
            let c = COMPLEMENT[k];
            let s = PAIR_SIGN[k];
            for off in [0usize, 6] {
                let t = w.mul(&x[off + k], &y[off + c]);
                acc = if s == 1 { w.add(&acc, &t) } else { w.sub(&acc, &t) };
            }
        }
        acc
    }

    /// Quadratic form on wedge coordinates; on the star-fixed space its
    /// values on the y basis are the standard diagonal Gram.
    pub fn quad(&self, v: &[WittEl]) -> WittEl {
        let w = &self.w;
        let b = self.block_pair(v, v);
        let qinv = w.inv(&w.from_i64(-4)).expect("odd residue characteristic");
        w.mul(&b, &qinv)
    }

    /// Polar form attached to `quad`.
    pub fn polar(&self, x: &[WittEl], y: &[WittEl]) -> WittEl {
        let w = &self.w;
        let b = self.block_pair(x, y);
        let hinv = w.inv(&w.from_i64(-2)).expect("odd residue characteristic");
        w.mul(&b, &hinv)
    }

    /// Endomorphism of the eight-dimensional module attached to a wedge
    /// vector; squares to the quadratic value.
    pub fn wedge_to_endo(&self, v: &[WittEl]) -> RMatrix {
        let mut acc = RMatrix::zero(self.w.clone(), 8, 8);
        for (k, e) in self.wedge_endos.iter().enumerate() {
            if self.w.is_zero(&v[k]) {
                continue;
            }
            acc = acc.add(&e.mul_scalar(&v[k]));
        }
        acc
    }

    /// Endomorphism attached to a row in x-coordinates.
    pub fn endo_of_x(&self, row: &[WittEl]) -> RMatrix {
        let v = self.x_to_wedge(row);
        self.wedge_to_endo(&v)
    }

    /// Wedge coordinates of a vector given in x-coordinates.
    pub fn x_to_wedge(&self, row: &[WittEl]) -> Vec<WittEl> {
        let w = &self.w;
        let mut out = vec![w.zero(); 12];
        for i in 0..6 {
            if w.is_zero(&row[i]) {
                continue;
            }
            for j in 0..12 {
                let c = self.x_basis.get(i, j);
                if !w.is_zero(c) {
                    out[j] = w.add(&out[j], &w.mul(&row[i], c));
                }
            }
        }
        out
    }

    /// x-coordinates of a star-fixed wedge vector (error when not fixed).
    pub fn wedge_to_x(&self, v: &[WittEl]) -> Result<Vec<WittEl>> {
        if self.star(v) != v {
            return Err(Error::DegenerateForm("vector is not star-fixed".into()));
        }
        // read off the plus-block coordinates against the sparse x rows
        let out = vec![
            v[pair_index(0, 1)].clone(),
            v[pair_index(2, 3)].clone(),
            v[pair_index(0, 2)].clone(),
            self.w.neg(&v[pair_index(1, 3)]),
            v[pair_index(0, 3)].clone(),
            v[pair_index(1, 2)].clone(),
        ];
        let back = self.x_to_wedge(&out);
        if back != v {
            return Err(Error::DegenerateForm(
                "vector is outside the star-fixed span".into(),
            ));
        }
        Ok(out)
    }

    /// Exhaustive structural self-check; ties the operator tables, both
    /// bases, the involution, and the quadratic form together.
    pub fn verify_tables(&self) -> Result<()> {
        let w = &self.w;
        let p = w.p();

        // the semilinear operator squares to multiplication by p
        let f2 = self.f_mat.mul(&self.f_mat);
        let pid = RMatrix::identity(w.clone(), 8).mul_scalar(&w.from_u64(p));
        if !f2.eq_value(&pid) {
            return Err(Error::DegenerateForm("operator square is not p".into()));
        }

        // compatibility with the alternating form: lam(Fx, Fy) = p sigma(lam(x,y))
        let basis: Vec<Vec<WittEl>> = (0..8)
            .map(|i| {
                let mut v = vec![w.zero(); 8];
                v[i] = w.one();
                v
            })
            .collect();
        let f_of: Vec<Vec<WittEl>> = (0..8)
            .map(|j| (0..8).map(|i| self.f_mat.get(i, j).clone()).collect())
            .collect();
        for i in 0..8 {
            for j in 0..8 {
                let lhs = self.lambda(&f_of[i], &f_of[j]);
                let rhs = w.scal_u(p, &w.sigma(&self.lambda(&basis[i], &basis[j])));
                if lhs != rhs {
                    return Err(Error::DegenerateForm(
                        "alternating form is not scaled by p".into(),
                    ));
                }
            }
        }

        // star is an involution
        for k in 0..12 {
            let mut v = vec![w.zero(); 12];
            v[k] = w.one();
            if self.star(&self.star(&v)) != v {
                return Err(Error::DegenerateForm("star is not an involution".into()));
            }
        }

        // x rows are star-fixed and have the expected polar Gram
        for i in 0..6 {
            let r = self.x_basis.row(i);
            if self.star(&r) != r {
                return Err(Error::DegenerateForm("x row is not star-fixed".into()));
            }
            for j in 0..6 {
                let pv = self.polar(&r, &self.x_basis.row(j));
                if pv != *self.polar_x.get(i, j) {
                    return Err(Error::DegenerateForm("x polar Gram mismatch".into()));
                }
            }
        }

        // Frobenius table on the x basis: the numerator of Phi(x_i) matches
        // p times the stated value matrix
        for i in 0..6 {
            let nv = self.phi_num(&self.x_basis.row(i));
            let expect = {
                let mut acc = vec![w.zero(); 12];
                for j in 0..6 {
                    // p * phi_x value at (i,j) = entry since phi_x.scale = 1
                    let c = self.phi_x.get(i, j);
                    if w.is_zero(c) {
                        continue;
                    }
                    let xj = self.x_basis.row(j);
                    for t in 0..12 {
                        acc[t] = w.add(&acc[t], &w.mul(c, &xj[t]));
                    }
                }
                acc
            };
            if nv != expect {
                return Err(Error::DegenerateForm("Frobenius table mismatch".into()));
            }
        }

        // star commutes with Frobenius
        for k in 0..12 {
            let mut v = vec![w.zero(); 12];
            v[k] = w.one();
            if self.star(&self.phi_num(&v)) != self.phi_num(&self.star(&v)) {
                return Err(Error::DegenerateForm(
                    "star does not commute with Frobenius".into(),
                ));
            }
        }

        // y basis: Frobenius-fixed, quadratic values the standard Gram
        let phi_y = self.phi_x_rows(&self.y_in_x);
        if !phi_y.eq_value(&self.y_in_x) {
            return Err(Error::DegenerateForm("y rows are not Frobenius-fixed".into()));
        }
        for i in 0..6 {
            let yi = self.x_to_wedge(&self.y_in_x.row(i));
            for j in 0..6 {
                let yj = self.x_to_wedge(&self.y_in_x.row(j));
                let got = if i == j {
                    self.quad(&yi)
                } else {
                    let pol = self.polar(&yi, &yj);
                    let half = w.inv(&w.from_u64(2))?;
                    w.mul(&pol, &half)
                };
                if got != *self.gram_y.get(i, j) {
                    return Err(Error::DegenerateForm("y Gram mismatch".into()));
                }
            }
        }

        // Clifford relations for the y endomorphisms
        for i in 0..6 {
            let yi = self.x_to_wedge(&self.y_in_x.row(i));
            let ei = self.wedge_to_endo(&yi);
            for j in i..6 {
                let yj = self.x_to_wedge(&self.y_in_x.row(j));
                let ej = self.wedge_to_endo(&yj);
                let anti = ei.mul(&ej).add(&ej.mul(&ei));
                let pol = self.polar(&yi, &yj);
                let want = RMatrix::identity(w.clone(), 8).mul_scalar(&pol);
                if !anti.eq_value(&want) {
                    return Err(Error::DegenerateForm("Clifford relation fails".into()));
                }
            }
        }

        // the standard lattice is self-dual for the alternating form
        let std8 = crate::rmatrix::Lattice::standard(w.clone(), 8);
        let dual = std8.dual_gram(&self.lambda_gram)?;
        if !std8.eq_lattice(&dual) {
            return Err(Error::DegenerateForm(
                "standard lattice is not self-dual".into(),
            ));
        }

        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PrimeConfig;

    fn ctx(p: u64) -> Context {
        Context::new(PrimeConfig::new(p).unwrap().with_m(1).unwrap()).unwrap()
    }

    #[test]
    fn tables_hold_at_small_primes() {
        for p in [3u64, 5] {
            let c = ctx(p);
            let h = Hodge::new(&c).unwrap();
            h.verify_tables().unwrap();
        }
    }

    #[test]
    fn star_table_on_pure_wedges() {
        let c = ctx(3);
        let h = Hodge::new(&c).unwrap();
        let w = &h.w;
        let mut e = vec![vec![w.zero(); 8]; 8];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = w.one();
        }
        // (b0 ^ b1)* = b6 ^ b7 in the opposite block
        let w01 = h.wedge(&e[0], &e[1]);
        let star = h.star(&w01);
        let expect = h.wedge(&e[6], &e[7]);
        assert_eq!(star, expect);
        // (b0 ^ b2)* = b7 ^ b5 = -(b5 ^ b7)
        let w02 = h.wedge(&e[0], &e[2]);
        let star2 = h.star(&w02);
        let mut expect2 = h.wedge(&e[5], &e[7]);
        for x in expect2.iter_mut() {
            *x = w.neg(x);
        }
        assert_eq!(star2, expect2);
    }

    #[test]
    fn wedge_action_example_and_square() {
        let c = ctx(3);
        let h = Hodge::new(&c).unwrap();
        let w = &h.w;
        // (b0 ^ b1) applied to b4 gives b1
        let mut v = vec![w.zero(); 12];
        v[pair_index(0, 1)] = w.one();
        let m = h.wedge_to_endo(&v);
        let mut z = RMatrix::zero(w.clone(), 8, 1);
        z.set(4, 0, w.one());
        let out = m.mul(&z);
        let mut want = RMatrix::zero(w.clone(), 8, 1);
        want.set(1, 0, w.one());
        assert!(out.eq_value(&want));
        // a star-fixed vector: endomorphism squares to its quadratic value
        let y3 = h.x_to_wedge(&h.y_in_x.row(2));
        let e3 = h.wedge_to_endo(&y3);
        let sq = e3.mul(&e3);
        let q = h.quad(&y3);
        assert_eq!(q, w.from_i64(-1));
        assert!(sq.eq_value(&RMatrix::identity(w.clone(), 8).mul_scalar(&q)));
    }

    #[test]
    fn coordinate_roundtrip_and_denominators() {
        let c = ctx(5);
        let h = Hodge::new(&c).unwrap();
        // x_in_y has denominators at most p
        assert!(h.x_in_y.scale <= 1);
        let prod = h.y_in_x.mul(&h.x_in_y);
        assert!(prod.eq_value(&RMatrix::identity(h.w.clone(), 6)));
        // wedge_to_x inverts x_to_wedge
        let w = &h.w;
        let row: Vec<WittEl> = (0..6).map(|k| w.from_u64(k as u64 + 2)).collect();
        let v = h.x_to_wedge(&row);
        let back = h.wedge_to_x(&v).unwrap();
        assert_eq!(back, row);
    }

    #[test]
    fn frobenius_action_on_standard_module() {
        // the preimage of p times the standard lattice has colength four
        let c = ctx(3);
        let h = Hodge::new(&c).unwrap();
        let w = &h.w;
        let std8 = crate::rmatrix::Lattice::standard(w.clone(), 8);
        let p_std = std8.rescale_p(1);
        let pre = h.f_inv_rows(&p_std.basis).unwrap();
        let d1 = crate::rmatrix::Lattice::from_generators(&pre).unwrap();
        let exps = std8.divisor_exponents(&d1).unwrap();
        let ones = exps.iter().filter(|&&e| e == 1).count();
        let zeros = exps.iter().filter(|&&e| e == 0).count();
        assert_eq!((zeros, ones), (4, 4));
    }
}
