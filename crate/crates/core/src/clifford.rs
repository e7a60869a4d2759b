//! Clifford algebra machinery: an abstract subset-indexed algebra over an
//! orthogonal basis, the concrete matrix order generated by the wedge
//! action of a rank-six lattice, primitive idempotents of the residue
//! algebra with Newton lifting, and membership data for the even similitude
//! group.

use crate::error::{Error, Result};
use crate::fq::{FqEl, FqMat};
use crate::hodge::Hodge;
use crate::rmatrix::{Lattice, RMatrix};
use crate::witt::{WittEl, WittRing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::sync::Arc;

/// Sign of moving the product basis_S * basis_T into ascending order:
/// (-1)^(number of pairs s in S, t in T with s > t).
fn merge_sign(s: u32, t: u32) -> i32 {
    let mut swaps = 0u32;
    for bit_s in 0..6 {
        if s & (1 << bit_s) == 0 {
            continue;
        }
        let lower = t & ((1u32 << bit_s) - 1);
        swaps += lower.count_ones();
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Abstract Clifford algebra on an orthogonal basis with quadratic values
/// `qvals`; elements are coefficient vectors indexed by subset bitmask, the
/// basis element of mask S being the ascending product of the generators.
pub struct CliffordDiag {
    pub w: Arc<WittRing>,
    pub qvals: Vec<WittEl>,
}

pub type CEl = Vec<WittEl>;

impl CliffordDiag {
    pub fn new(w: Arc<WittRing>, qvals: Vec<WittEl>) -> CliffordDiag {
        assert_eq!(qvals.len(), 6);
        CliffordDiag { w, qvals }
    }

    pub fn zero(&self) -> CEl {
        vec![self.w.zero(); 64]
    }

    pub fn scalar(&self, c: &WittEl) -> CEl {
        let mut e = self.zero();
        e[0] = c.clone();
        e
    }

    pub fn one(&self) -> CEl {
        self.scalar(&self.w.one())
    }

    pub fn basis_el(&self, mask: u32) -> CEl {
        let mut e = self.zero();
        e[mask as usize] = self.w.one();
        e
    }

    /// Embed a vector written in the orthogonal basis.
    pub fn embed(&self, v: &[WittEl]) -> CEl {
        let mut e = self.zero();
        for (i, c) in v.iter().enumerate() {
            e[1 << i] = c.clone();
        }
        e
    }

    pub fn add(&self, a: &CEl, b: &CEl) -> CEl {
        a.iter().zip(b).map(|(x, y)| self.w.add(x, y)).collect()
    }

    pub fn scal(&self, c: &WittEl, a: &CEl) -> CEl {
        a.iter().map(|x| self.w.mul(c, x)).collect()
    }

    pub fn mul(&self, a: &CEl, b: &CEl) -> CEl {
        let w = &self.w;
        let mut out = self.zero();
        for s in 0..64u32 {
            if w.is_zero(&a[s as usize]) {
                continue;
            }
            for t in 0..64u32 {
                if w.is_zero(&b[t as usize]) {
                    continue;
                }
                let mut coeff = w.mul(&a[s as usize], &b[t as usize]);
                if merge_sign(s, t) < 0 {
                    coeff = w.neg(&coeff);
                }
                let mut common = s & t;
                while common != 0 {
                    let i = common.trailing_zeros() as usize;
                    coeff = w.mul(&coeff, &self.qvals[i]);
                    common &= common - 1;
                }
                let u = (s ^ t) as usize;
                out[u] = w.add(&out[u], &coeff);
            }
        }
        out
    }

    /// Main anti-involution: reverses products, so the mask-S coefficient
    /// picks up (-1)^(|S| choose 2).
    pub fn reverse(&self, a: &CEl) -> CEl {
        let w = &self.w;
        let mut out = a.clone();
        for (s, x) in out.iter_mut().enumerate() {
            let k = (s as u32).count_ones();
            if (k * (k.saturating_sub(1)) / 2) % 2 == 1 {
                *x = w.neg(x);
            }
        }
        out
    }

    pub fn is_scalar(&self, a: &CEl) -> Option<WittEl> {
        for (s, x) in a.iter().enumerate() {
            if s != 0 && !self.w.is_zero(x) {
                return None;
            }
        }
        Some(a[0].clone())
    }

    /// Matrix of left multiplication by `a` on the 64 basis elements.
    fn left_mul_matrix(&self, a: &CEl) -> RMatrix {
        let mut m = RMatrix::zero(self.w.clone(), 64, 64);
        for t in 0..64u32 {
            let col = self.mul(a, &self.basis_el(t));
            for (s, x) in col.into_iter().enumerate() {
                if !self.w.is_zero(&x) {
                    m.set(s, t as usize, x);
                }
            }
        }
        m
    }

    pub fn inverse(&self, a: &CEl) -> Result<CEl> {
        let l = self.left_mul_matrix(a);
        let linv = l.inverse()?;
        if linv.scale > 0 {
            return Err(Error::NotUnit);
        }
        let one = self.one();
        let mut out = self.zero();
        for s in 0..64 {
            let mut acc = self.w.zero();
            for t in 0..64 {
                if self.w.is_zero(&one[t]) {
                    continue;
                }
                acc = self.w.add(&acc, &self.w.mul(linv.get(s, t), &one[t]));
            }
            out[s] = acc;
        }
        Ok(out)
    }

    /// Data certifying that `g` lies in the even similitude group: the
    /// spinor similitude (a scalar unit) and the orthogonal matrix induced
    /// by conjugation on the vector subspace.
    pub fn gspin_check(&self, g: &CEl, gram: &RMatrix) -> Result<(WittEl, RMatrix)> {
        let w = &self.w;
        // even support only
        for (s, x) in g.iter().enumerate() {
            if (s as u32).count_ones() % 2 == 1 && !w.is_zero(x) {
                return Err(Error::DegenerateForm("element has odd support".into()));
            }
        }
        let nu = self
            .is_scalar(&self.mul(&self.reverse(g), g))
            .ok_or_else(|| Error::DegenerateForm("norm is not scalar".into()))?;
        if !w.is_unit(&nu) {
            return Err(Error::NotUnit);
        }
        let ginv = self.inverse(g)?;
        let mut so = RMatrix::zero(w.clone(), 6, 6);
        for j in 0..6 {
            let conj = self.mul(&self.mul(g, &self.basis_el(1 << j)), &ginv);
            for (s, x) in conj.iter().enumerate() {
                if w.is_zero(x) {
                    continue;
                }
                if (s as u32).count_ones() != 1 {
                    return Err(Error::DegenerateForm(
                        "conjugation does not preserve the vector space".into(),
                    ));
                }
                let k = (s as u32).trailing_zeros() as usize;
                so.set(j, k, x.clone());
            }
        }
        // conjugation preserves the quadratic Gram
        let got = so.mul(gram).mul(&so.transpose());
        if !got.eq_value(gram) {
            return Err(Error::DegenerateForm(
                "conjugation does not preserve the form".into(),
            ));
        }
        Ok((nu, so))
    }
}

/// Concrete order inside the eight-dimensional endomorphisms, generated by
/// the wedge action of six lattice vectors given in x-coordinates.
pub struct CliffordOrder {
    pub w: Arc<WittRing>,
    pub gens: Vec<RMatrix>,
    /// 64 subset products, ascending factor order, indexed by bitmask.
    pub basis_mats: Vec<RMatrix>,
}

impl CliffordOrder {
    pub fn new(h: &Hodge, basis_x: &RMatrix) -> Result<CliffordOrder> {
        assert_eq!((basis_x.rows, basis_x.cols), (6, 6));
        let w = h.w.clone();
        let mut gens = Vec::with_capacity(6);
        for i in 0..6 {
            let m = h.endo_of_x(&basis_x.row(i)).rescale_p(-basis_x.scale);
            gens.push(m.to_scale_zero()?);
        }
        let mut basis_mats = vec![RMatrix::identity(w.clone(), 8); 64];
        for mask in 1..64u32 {
            let i = mask.trailing_zeros();
            let rest = mask & (mask - 1);
            basis_mats[mask as usize] = gens[i as usize].mul(&basis_mats[rest as usize]);
        }
        Ok(CliffordOrder { w, gens, basis_mats })
    }

    /// Rank of the order modulo p inside the 64-dimensional matrix space;
    /// 64 exactly when the residue algebra is the full matrix algebra.
    pub fn residue_rank(&self) -> Result<usize> {
        let fq = self.w.residue_field().clone();
        let mut rows = Vec::with_capacity(64);
        for m in &self.basis_mats {
            let mm = m.to_scale_zero()?.reduce_fq()?;
            rows.push(mm.a);
        }
        let mat = FqMat::from_rows(rows);
        Ok(mat.rank(&fq))
    }

    fn residue_combination(&self, coeffs: &[FqEl]) -> Result<FqMat> {
        let fq = self.w.residue_field();
        let mut acc = FqMat::zero(fq, 8, 8);
        for (c, m) in coeffs.iter().zip(&self.basis_mats) {
            if fq.is_zero(c) {
                continue;
            }
            let mm = m.to_scale_zero()?.reduce_fq()?;
            for i in 0..8 {
                for j in 0..8 {
                    let t = fq.mul(c, mm.get(i, j));
                    acc.set(i, j, fq.add(acc.get(i, j), &t));
                }
            }
        }
        Ok(acc)
    }

    /// Minimal polynomial of a residue matrix, monic, by the first linear
    /// dependence among its powers.
    fn residue_min_poly(&self, z: &FqMat) -> Vec<FqEl> {
        let fq = self.w.residue_field();
        let mut pows: Vec<FqMat> = vec![FqMat::identity(fq, 8)];
        loop {
            let next = pows.last().unwrap().mul(fq, z);
            // solve: next = sum c_k pows[k] as flattened vectors
            let rows: Vec<Vec<FqEl>> = pows.iter().map(|m| m.a.clone()).collect();
            let mat = FqMat::from_rows(rows).transpose(fq);
            if let Some(sol) = mat.solve(fq, &next.a) {
                // min poly: T^k - sum c_j T^j
                let mut coeffs = vec![fq.zero(); pows.len() + 1];
                for (j, c) in sol.iter().enumerate() {
                    coeffs[j] = fq.neg(c);
                }
                coeffs[pows.len()] = fq.one();
                return coeffs;
            }
            pows.push(next);
        }
    }

    /// A lift e with e^2 = e whose residue is a rank-one idempotent of the
    /// residue matrix algebra. Deterministic for a fixed seed.
    pub fn primitive_idempotent(&self, seed: u64) -> Result<RMatrix> {
        let fq = self.w.residue_field().clone();
        let card = fq.card();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for _attempt in 0..200 {
            let coeffs: Vec<FqEl> = (0..64)
                .map(|_| fq.el_from_index(rng.gen_range(0..card)))
                .collect();
            let z = self.residue_combination(&coeffs)?;
            let mu = self.residue_min_poly(&z);
            // scan the residue field for simple roots
            for li in 0..card {
                let lam = fq.el_from_index(li);
                // synthetic division of mu by (T - lam)
                let deg = mu.len() - 1;
                let mut quo = vec![fq.zero(); deg];
                let mut carry = fq.zero();
                for k in (0..=deg).rev() {
                    let c = fq.add(&mu[k], &carry);
                    if k == 0 {
                        if !fq.is_zero(&c) {
                            // not a root
                            quo.clear();
                        }
                        break;
                    }
                    quo[k - 1] = c.clone();
                    carry = fq.mul(&c, &lam);
                }
                if quo.is_empty() {
                    continue;
                }
                // h(lam) != 0 means lam is a simple root
                let mut hval = fq.zero();
                let mut lp = fq.one();
                for c in &quo {
                    hval = fq.add(&hval, &fq.mul(c, &lp));
                    lp = fq.mul(&lp, &lam);
                }
                if fq.is_zero(&hval) {
                    continue;
                }
                // e0 = h(z) / h(lam)
                let hinv = fq.inv(&hval)?;
                let mut e0 = FqMat::zero(&fq, 8, 8);
                let mut zp = FqMat::identity(&fq, 8);
                for c in &quo {
                    if !fq.is_zero(c) {
                        let s = fq.mul(c, &hinv);
                        for t in 0..64 {
                            let v = fq.add(e0.get(t / 8, t % 8), &fq.mul(&s, zp.get(t / 8, t % 8)));
                            e0.set(t / 8, t % 8, v);
                        }
                    }
                    zp = zp.mul(&fq, &z);
                }
                if e0.rank(&fq) != 1 {
                    continue;
                }
                // Newton lift: e <- 3e^2 - 2e^3 doubles the precision
                let w = &self.w;
                let mut e = RMatrix::zero(w.clone(), 8, 8);
                for i in 0..8 {
                    for j in 0..8 {
                        e.set(i, j, w.lift(e0.get(i, j)));
                    }
                }
                let three = w.from_u64(3);
                let two = w.from_u64(2);
                let steps = 64 - u64::from(w.precision()).leading_zeros() + 2;
                for _ in 0..steps {
                    let e2 = e.mul(&e);
                    let e3 = e2.mul(&e);
                    e = e2.mul_scalar(&three).sub(&e3.mul_scalar(&two));
                }
                let e2 = e.mul(&e);
                if !e2.eq_value(&e) {
                    continue;
                }
                return Ok(e);
            }
        }
        Err(Error::IdempotentSearchFailed(seed))
    }

    /// Row lattice spanned by the orbit of a row vector under the order.
    pub fn orbit_span(&self, v: &RMatrix) -> Result<Lattice> {
        assert_eq!((v.rows, v.cols), (1, 8));
        let mut acc: Option<RMatrix> = None;
        for m in &self.basis_mats {
            let r = v.mul(&m.transpose());
            acc = Some(match acc {
                None => r,
                Some(a) => a.stack(&r),
            });
        }
        Lattice::from_generators(&acc.unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Context, PrimeConfig};

    fn ctx(p: u64) -> Context {
        Context::new(PrimeConfig::new(p).unwrap()).unwrap()
    }

    fn diag_algebra(c: &Context) -> (Hodge, CliffordDiag) {
        let h = Hodge::new(c).unwrap();
        let q: Vec<WittEl> = (0..6).map(|i| h.gram_y.get(i, i).clone()).collect();
        let alg = CliffordDiag::new(h.w.clone(), q);
        (h, alg)
    }

    #[test]
    fn abstract_relations() {
        let c = ctx(3);
        let (h, alg) = diag_algebra(&c);
        let w = &alg.w;
        for i in 0..6u32 {
            for j in 0..6u32 {
                let yi = alg.basis_el(1 << i);
                let yj = alg.basis_el(1 << j);
                let anti = alg.add(&alg.mul(&yi, &yj), &alg.mul(&yj, &yi));
                let expect = if i == j {
                    alg.scalar(&w.scal_u(2, &alg.qvals[i as usize]))
                } else {
                    alg.zero()
                };
                assert_eq!(anti, expect);
            }
        }
        // reversal is an anti-homomorphism on a sample product
        let a = alg.basis_el(0b101);
        let b = alg.basis_el(0b110);
        let lhs = alg.reverse(&alg.mul(&a, &b));
        let rhs = alg.mul(&alg.reverse(&b), &alg.reverse(&a));
        assert_eq!(lhs, rhs);
        let _ = h;
    }

    #[test]
    fn abstract_matches_matrix_realization() {
        let c = ctx(3);
        let (h, alg) = diag_algebra(&c);
        // matrix generators from the y rows satisfy the same relations
        let order = CliffordOrder::new(&h, &h.y_in_x).unwrap();
        for i in 0..6 {
            let sq = order.gens[i].mul(&order.gens[i]);
            let want = RMatrix::identity(h.w.clone(), 8).mul_scalar(&alg.qvals[i]);
            assert!(sq.eq_value(&want), "generator {i} square");
        }
        // multiplication agrees: (y0 y1)(y1 y2) = Q(y1) y0 y2
        let ab = alg.mul(&alg.basis_el(0b011), &alg.basis_el(0b110));
        let mut expect = alg.zero();
        expect[0b101] = alg.qvals[1].clone();
        assert_eq!(ab, expect);
        let mab = order.basis_mats[0b011].mul(&order.basis_mats[0b110]);
        let mexp = order.basis_mats[0b101].mul_scalar(&alg.qvals[1]);
        assert!(mab.eq_value(&mexp));
    }

    #[test]
    fn even_similitudes_pass_the_membership_check() {
        let c = ctx(3);
        let (h, alg) = diag_algebra(&c);
        let w = &alg.w;
        // product of two anisotropic vectors
        let v1: Vec<WittEl> = [1i64, 0, 1, 0, 0, 1].iter().map(|&t| w.from_i64(t)).collect();
        let v2: Vec<WittEl> = [0i64, 1, 1, 0, 1, 0].iter().map(|&t| w.from_i64(t)).collect();
        let q1 = {
            // v1 is given in y coordinates; convert to x rows for quad
            let m = RMatrix::from_rows(w.clone(), vec![v1.clone()]).mul(&h.y_in_x);
            h.quad(&h.x_to_wedge(&m.row(0)))
        };
        assert!(w.is_unit(&q1));
        let g = alg.mul(&alg.embed(&v1), &alg.embed(&v2));
        let (nu, so) = alg.gspin_check(&g, &h.gram_y).unwrap();
        // nu = Q(v1) Q(v2)
        let qv = |v: &[WittEl]| {
            let mut acc = w.zero();
            for i in 0..6 {
                acc = w.add(&acc, &w.mul(&w.mul(&v[i], &v[i]), h.gram_y.get(i, i)));
            }
            acc
        };
        assert_eq!(nu, w.mul(&qv(&v1), &qv(&v2)));
        assert_eq!(so.rows, 6);
        // odd elements are rejected
        assert!(alg.gspin_check(&alg.basis_el(0b1), &h.gram_y).is_err());
    }

    #[test]
    fn order_is_full_and_idempotents_generate_one_lattice_class() {
        let c = ctx(3);
        let h = Hodge::new(&c).unwrap();
        let ident = RMatrix::identity(h.w.clone(), 6);
        let order = CliffordOrder::new(&h, &ident).unwrap();
        assert_eq!(order.residue_rank().unwrap(), 64);
        let e = order.primitive_idempotent(7).unwrap();
        assert!(e.mul(&e).eq_value(&e));
        // orbits of independent seed vectors agree up to a power of p
        let w = &h.w;
        let mk = |i: usize| {
            let mut v = RMatrix::zero(w.clone(), 1, 8);
            v.set(0, i, w.one());
            v.mul(&e.transpose())
        };
        let mut lats = Vec::new();
        for i in 0..8 {
            let v = mk(i);
            if v.is_zero() {
                continue;
            }
            lats.push(order.orbit_span(&v).unwrap());
        }
        assert!(!lats.is_empty());
        for l in &lats[1..] {
            let d = lats[0].divisor_exponents(l).unwrap();
            assert!(d.iter().all(|&x| x == d[0]), "orbits differ by a scalar only");
        }
    }
}
