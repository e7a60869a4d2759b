//! Matrices with entries in a truncated unramified ring, carrying a global
//! power-of-p denominator, plus lattice operations built on a staircase
//! (Hermite) normal form.
//!
//! An `RMatrix` with entry block E and scale s represents the matrix
//! p^{-s} * E. Lattices are row spans of full-column-rank matrices; the
//! staircase form gives a canonical basis, and duals/intersections reduce to
//! exact triangular inversion with tracked denominators.

use crate::error::{Error, Result};
use crate::fq::FqMat;
use crate::witt::{WittEl, WittRing};
use std::sync::Arc;

#[derive(Clone)]
pub struct RMatrix {
    pub ring: Arc<WittRing>,
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub a: Vec<WittEl>,
    /// Matrix value is p^{-scale} times the entry block.
    pub scale: i32,
}

impl std::fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RMatrix {}x{} scale {}", self.rows, self.cols, self.scale)?;
        for i in 0..self.rows {
            let row: Vec<&WittEl> = (0..self.cols).map(|j| self.get(i, j)).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl RMatrix {
    pub fn zero(ring: Arc<WittRing>, rows: usize, cols: usize) -> RMatrix {
        let z = ring.zero();
        RMatrix {
            ring,
            rows,
            cols,
            a: vec![z; rows * cols],
            scale: 0,
        }
    }

    pub fn identity(ring: Arc<WittRing>, n: usize) -> RMatrix {
        let mut m = RMatrix::zero(ring.clone(), n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: Arc<WittRing>, rows: Vec<Vec<WittEl>>) -> RMatrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut a = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            a.extend(row);
        }
        RMatrix {
            ring,
            rows: r,
            cols: c,
            a,
            scale: 0,
        }
    }

    pub fn from_i64(ring: Arc<WittRing>, rows: usize, cols: usize, data: &[i64]) -> RMatrix {
        assert_eq!(data.len(), rows * cols);
        let a = data.iter().map(|&v| ring.from_i64(v)).collect();
        RMatrix {
            ring,
            rows,
            cols,
            a,
            scale: 0,
        }
    }

    pub fn from_fq(ring: Arc<WittRing>, m: &FqMat) -> RMatrix {
        let a = m.a.iter().map(|e| ring.lift(e)).collect();
        RMatrix {
            ring,
            rows: m.rows,
            cols: m.cols,
            a,
            scale: 0,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &WittEl {
        &self.a[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: WittEl) {
        self.a[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<WittEl> {
        self.a[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> RMatrix {
        let mut m = RMatrix::zero(self.ring.clone(), self.cols, self.rows);
        m.scale = self.scale;
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn sigma_entrywise(&self) -> RMatrix {
        let mut m = self.clone();
        for e in &mut m.a {
            *e = self.ring.sigma(e);
        }
        m
    }

    pub fn sigma_inv_entrywise(&self) -> RMatrix {
        let mut m = self.clone();
        for e in &mut m.a {
            *e = self.ring.sigma_inv(e);
        }
        m
    }

    pub fn mul(&self, other: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let w = &self.ring;
        let mut out = RMatrix::zero(w.clone(), self.rows, other.cols);
        out.scale = self.scale + other.scale;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lik = self.get(i, k);
                if w.is_zero(lik) {
                    continue;
                }
                for j in 0..other.cols {
                    let r = other.get(k, j);
                    if w.is_zero(r) {
                        continue;
                    }
                    let prod = w.mul(lik, r);
                    let cur = out.get(i, j).clone();
                    out.set(i, j, w.add(&cur, &prod));
                }
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &WittEl) -> RMatrix {
        let mut m = self.clone();
        for e in &mut m.a {
            *e = self.ring.mul(e, c);
        }
        m
    }

    /// Multiply the matrix value by p^d (d may be negative).
    pub fn rescale_p(&self, d: i32) -> RMatrix {
        let mut m = self.clone();
        m.scale -= d;
        m
    }

    fn raise_entries(&self, d: u32) -> RMatrix {
        // multiply all entries by p^d (truncating), keeping scale fixed
        let mut m = self.clone();
        for e in &mut m.a {
            *e = self.ring.mul_p(e, d);
        }
        m
    }

    /// Rewrite both matrices at a common scale.
    pub fn align(&self, other: &RMatrix) -> (RMatrix, RMatrix) {
        let s = self.scale.max(other.scale);
        let mut a = self.raise_entries((s - self.scale) as u32);
        a.scale = s;
        let mut b = other.raise_entries((s - other.scale) as u32);
        b.scale = s;
        (a, b)
    }

    pub fn add(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let (mut a, b) = self.align(other);
        for (x, y) in a.a.iter_mut().zip(&b.a) {
            *x = self.ring.add(x, y);
        }
        a
    }

    pub fn sub(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let (mut a, b) = self.align(other);
        for (x, y) in a.a.iter_mut().zip(&b.a) {
            *x = self.ring.sub(x, y);
        }
        a
    }

    pub fn eq_value(&self, other: &RMatrix) -> bool {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return false;
        }
        let (a, b) = self.align(other);
        a.a == b.a
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|e| self.ring.is_zero(e))
    }

    /// Minimum entry valuation; None for the zero matrix.
    pub fn content_val(&self) -> Option<u32> {
        let mut best: Option<u32> = None;
        for e in &self.a {
            if self.ring.is_zero(e) {
                continue;
            }
            let v = self.ring.val(e);
            best = Some(best.map_or(v, |b| b.min(v)));
            if best == Some(0) {
                break;
            }
        }
        best
    }

    /// Divide out the entry content so that min entry valuation is 0.
    pub fn normalized(&self) -> RMatrix {
        match self.content_val() {
            None => {
                let mut m = self.clone();
                m.scale = 0;
                m
            }
            Some(0) => self.clone(),
            Some(c) => {
                let mut m = self.clone();
                for e in &mut m.a {
                    *e = self.ring.div_p(e, c).expect("content divides all entries");
                }
                m.scale -= c as i32;
                m
            }
        }
    }

    /// True when the value matrix has all entries in the integral ring.
    pub fn is_integral(&self) -> Result<bool> {
        if self.scale <= 0 {
            return Ok(true);
        }
        let s = self.scale as u32;
        let cutoff = self.ring.cutoff();
        for e in &self.a {
            if self.ring.is_zero(e) {
                continue;
            }
            let v = self.ring.val(e);
            if v < s {
                if v >= cutoff {
                    return Err(Error::PrecisionExhausted(format!(
                        "integrality test met valuation {v} past cutoff {cutoff}"
                    )));
                }
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Rewrite with scale 0; requires an integral value.
    pub fn to_scale_zero(&self) -> Result<RMatrix> {
        if !self.is_integral()? {
            return Err(Error::DenominatorOverflow(
                "matrix is not integral".into(),
            ));
        }
        let mut m = self.clone();
        if self.scale > 0 {
            let s = self.scale as u32;
            for e in &mut m.a {
                *e = self
                    .ring
                    .div_p(e, s)
                    .ok_or_else(|| Error::PrecisionExhausted("exact division failed".into()))?;
            }
        } else if self.scale < 0 {
            let s = (-self.scale) as u32;
            for e in &mut m.a {
                *e = self.ring.mul_p(e, s);
            }
        }
        m.scale = 0;
        Ok(m)
    }

    /// Residue matrix over the residue field; requires an integral value.
    pub fn reduce_fq(&self) -> Result<FqMat> {
        let z = self.to_scale_zero()?;
        let fq = self.ring.residue_field();
        let mut out = FqMat::zero(fq, z.rows, z.cols);
        for i in 0..z.rows {
            for j in 0..z.cols {
                out.set(i, j, self.ring.reduce(z.get(i, j)));
            }
        }
        Ok(out)
    }

    pub fn stack(&self, other: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, other.cols);
        let (mut a, b) = self.align(other);
        a.rows += b.rows;
        a.a.extend(b.a);
        a
    }

    /// Staircase (Hermite) form of the row span. Row operations only, so the
    /// span is preserved exactly; zero rows are dropped. Pivot t sits in row t
    /// at column pivots[t].0 with entry p^pivots[t].1; entries below and left
    /// of pivots vanish, entries above a pivot are reduced mod that power.
    pub fn hermite(&self) -> Result<HermiteForm> {
        let w = self.ring.clone();
        let cutoff = w.cutoff();
        let mut m = self.clone();
        let mut pivots: Vec<(usize, u32)> = Vec::new();
        let mut next_row = 0usize;
        for j in 0..m.cols {
            // best pivot among unassigned rows
            let mut best: Option<(usize, u32)> = None;
            for i in next_row..m.rows {
                let e = m.get(i, j);
                if w.is_zero(e) {
                    continue;
                }
                let v = w.val(e);
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
            let (pi, k) = match best {
                None => continue,
                Some((_, v)) if v >= cutoff => {
                    return Err(Error::PrecisionExhausted(format!(
                        "pivot valuation {v} at column {j} is past cutoff {cutoff}"
                    )));
                }
                Some(x) => x,
            };
            m.swap_rows(next_row, pi);
            // normalize pivot entry to exactly p^k
            let unit = w
                .div_p(m.get(next_row, j), k)
                .expect("valuation divides pivot");
            let uinv = w.inv(&unit)?;
            m.scale_row(next_row, &uinv);
            // eliminate the column in all unassigned rows (exact: val >= k there)
            for i in next_row + 1..m.rows {
                let e = m.get(i, j).clone();
                if w.is_zero(&e) {
                    continue;
                }
                let c = w
                    .div_p(&e, k)
                    .ok_or_else(|| Error::PrecisionExhausted("elimination division".into()))?;
                m.row_axpy_neg(i, next_row, &c, j);
            }
            pivots.push((j, k));
            next_row += 1;
        }
        // any remaining rows are exactly zero by construction
        m.rows = next_row;
        m.a.truncate(next_row * m.cols);
        // reduction pass: entries above pivot t, taken left to right, are
        // reduced mod p^k; later pivot rows vanish on earlier pivot columns,
        // so earlier reductions are never disturbed
        for t in 0..pivots.len() {
            let (jt, kt) = pivots[t];
            if kt == 0 {
                // entries above a unit pivot are eliminated completely
                for r in 0..t {
                    let e = m.get(r, jt).clone();
                    if w.is_zero(&e) {
                        continue;
                    }
                    m.row_axpy_neg(r, t, &e, jt);
                }
                continue;
            }
            let pk = w.p_pow(kt);
            for r in 0..t {
                let e = m.get(r, jt).clone();
                if w.is_zero(&e) {
                    continue;
                }
                // coefficient-wise quotient by p^k
                let q = WittEl(e.0.iter().map(|&c| c / pk).collect());
                if w.is_zero(&q) {
                    continue;
                }
                m.row_axpy_neg(r, t, &q, jt);
            }
        }
        Ok(HermiteForm { mat: m, pivots })
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.a.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, c: &WittEl) {
        for j in 0..self.cols {
            let e = self.ring.mul(self.get(i, j), c);
            self.set(i, j, e);
        }
    }

    /// row i -= c * row src, acting on columns >= from.
    fn row_axpy_neg(&mut self, i: usize, src: usize, c: &WittEl, from: usize) {
        for j in from..self.cols {
            let s = self.get(src, j).clone();
            if self.ring.is_zero(&s) {
                continue;
            }
            let prod = self.ring.mul(c, &s);
            let e = self.ring.sub(self.get(i, j), &prod);
            self.set(i, j, e);
        }
    }

    /// Exact inverse of a square matrix, with the accumulated power of p
    /// tracked in the scale. Fails if the determinant valuation eats the
    /// whole working precision.
    pub fn inverse(&self) -> Result<RMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let w = self.ring.clone();
        let cutoff = w.cutoff();
        let mut h = self.clone();
        h.scale = 0;
        let mut u = RMatrix::identity(w.clone(), n);
        let mut kexp: Vec<u32> = Vec::with_capacity(n);
        for j in 0..n {
            let mut best: Option<(usize, u32)> = None;
            for i in j..n {
                let e = h.get(i, j);
                if w.is_zero(e) {
                    continue;
                }
                let v = w.val(e);
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
            let (pi, k) = match best {
                Some((i, v)) if v < cutoff => (i, v),
                _ => {
                    return Err(Error::SingularOperator(format!(
                        "no usable pivot in column {j}"
                    )));
                }
            };
            h.swap_rows(j, pi);
            u.swap_rows(j, pi);
            let unit = w.div_p(h.get(j, j), k).expect("valuation divides pivot");
            let uinv = w.inv(&unit)?;
            h.scale_row(j, &uinv);
            u.scale_row(j, &uinv);
            for i in j + 1..n {
                let e = h.get(i, j).clone();
                if w.is_zero(&e) {
                    continue;
                }
                let c = w
                    .div_p(&e, k)
                    .ok_or_else(|| Error::PrecisionExhausted("inverse elimination".into()))?;
                h.row_axpy_neg(i, j, &c, j);
                u.row_axpy_neg(i, j, &c, 0);
            }
            kexp.push(k);
        }
        let ktot: u32 = kexp.iter().sum();
        if ktot >= w.precision() {
            return Err(Error::PrecisionExhausted(format!(
                "determinant valuation {ktot} consumes the precision {}",
                w.precision()
            )));
        }
        // solve H Z = p^ktot U by back-substitution; all divisions are exact,
        // and E^{-1} = H^{-1} U because the row operations carried U along
        let mut z = RMatrix::zero(w.clone(), n, n);
        for col in 0..n {
            let rhs: Vec<WittEl> = (0..n)
                .map(|i| w.mul_p(u.get(i, col), ktot))
                .collect();
            for i in (0..n).rev() {
                let mut acc = rhs[i].clone();
                for l in i + 1..n {
                    let prod = w.mul(h.get(i, l), z.get(l, col));
                    acc = w.sub(&acc, &prod);
                }
                let zi = w.div_p(&acc, kexp[i]).ok_or_else(|| {
                    Error::PrecisionExhausted("back-substitution division".into())
                })?;
                z.set(i, col, zi);
            }
        }
        // value inverse = p^{-(ktot - self.scale)} Z
        z.scale = ktot as i32 - self.scale;
        // elimination with deep pivots can silently spend precision: digits
        // shifted out by the exact divisions never come back. Multiplying
        // back against the input exposes any such corruption, so callers get
        // a loud error instead of a plausible wrong basis.
        let check = self.mul(&z);
        if !check.eq_value(&RMatrix::identity(w.clone(), n)) {
            return Err(Error::PrecisionExhausted(format!(
                "inverse self-check failed after spending valuation {ktot}"
            )));
        }
        Ok(z)
    }

    /// Valuation of det(value matrix); RankDeficient when no full pivot set.
    pub fn det_val(&self) -> Result<i32> {
        assert_eq!(self.rows, self.cols);
        let h = self.hermite()?;
        if h.pivots.len() < self.cols {
            return Err(Error::RankDeficient(format!(
                "rank {} of a {} x {} matrix",
                h.pivots.len(),
                self.rows,
                self.cols
            )));
        }
        let k: u32 = h.pivots.iter().map(|&(_, k)| k).sum();
        Ok(k as i32 - self.cols as i32 * self.scale)
    }

    /// Determinant by cofactor expansion (small n), as (entry det, scale*n).
    pub fn det_exact(&self) -> (WittEl, i32) {
        assert_eq!(self.rows, self.cols);
        let idx: Vec<usize> = (0..self.rows).collect();
        let d = self.det_rec(&idx, 0);
        (d, self.scale * self.rows as i32)
    }

    fn det_rec(&self, cols: &[usize], row: usize) -> WittEl {
        let w = &self.ring;
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = w.zero();
        for (t, &j) in cols.iter().enumerate() {
            let e = self.get(row, j);
            if w.is_zero(e) {
                continue;
            }
            let rest: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&c| c != j)
                .collect();
            let minor = self.det_rec(&rest, row + 1);
            let term = w.mul(e, &minor);
            if t % 2 == 0 {
                acc = w.add(&acc, &term);
            } else {
                acc = w.sub(&acc, &term);
            }
        }
        acc
    }

    /// Elementary divisor exponents of the value matrix, ascending. Uses
    /// global minimum-valuation pivoting with exact eliminations.
    pub fn smith_exponents(&self) -> Result<Vec<i32>> {
        let w = self.ring.clone();
        let cutoff = w.cutoff();
        let mut m = self.clone();
        // strip the global content first: elimination then works near
        // valuation zero, which keeps entries inside the reliable band even
        // when the representation scale is large
        let content = m.content_val().unwrap_or(0);
        if content > 0 {
            for e in m.a.iter_mut() {
                *e = w
                    .div_p(e, content)
                    .ok_or_else(|| Error::PrecisionExhausted("content division".into()))?;
            }
        }
        let mut row_active = vec![true; m.rows];
        let mut col_active = vec![true; m.cols];
        let mut exps: Vec<u32> = Vec::new();
        loop {
            let mut best: Option<(usize, usize, u32)> = None;
            for i in 0..m.rows {
                if !row_active[i] {
                    continue;
                }
                for j in 0..m.cols {
                    if !col_active[j] {
                        continue;
                    }
                    let e = m.get(i, j);
                    if w.is_zero(e) {
                        continue;
                    }
                    let v = w.val(e);
                    if best.map_or(true, |(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
            let (pi, pj, k) = match best {
                None => break,
                Some((_, _, v)) if v >= cutoff => {
                    return Err(Error::PrecisionExhausted(format!(
                        "residual entry valuation {v} past cutoff {cutoff}"
                    )));
                }
                Some(x) => x,
            };
            let unit = w.div_p(m.get(pi, pj), k).expect("valuation divides pivot");
            let uinv = w.inv(&unit)?;
            m.scale_row(pi, &uinv);
            for i in 0..m.rows {
                if i == pi || !row_active[i] {
                    continue;
                }
                let e = m.get(i, pj).clone();
                if w.is_zero(&e) {
                    continue;
                }
                let c = w
                    .div_p(&e, k)
                    .ok_or_else(|| Error::PrecisionExhausted("divisor elimination".into()))?;
                m.row_axpy_neg(i, pi, &c, 0);
            }
            // clearing the pivot row by column operations only touches the
            // pivot row now that its column is clean
            for j in 0..m.cols {
                if j == pj || !col_active[j] {
                    continue;
                }
                m.set(pi, j, w.zero());
            }
            row_active[pi] = false;
            col_active[pj] = false;
            exps.push(k);
        }
        let mut out: Vec<i32> = exps
            .into_iter()
            .map(|k| (k + content) as i32 - self.scale)
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub mat: RMatrix,
    /// (column, exponent) per pivot row, in row order.
    pub pivots: Vec<(usize, u32)>,
}

/// Full-rank lattice: canonical staircase basis plus its cached inverse.
#[derive(Clone)]
pub struct Lattice {
    pub basis: RMatrix,
    pub pivots: Vec<(usize, u32)>,
    inv: RMatrix,
}

impl std::fmt::Debug for Lattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Lattice(dim {}, scale {})", self.dim(), self.basis.scale)?;
        Ok(())
    }
}

impl Lattice {
    /// Canonical lattice from a spanning set (full column rank required).
    pub fn from_generators(m: &RMatrix) -> Result<Lattice> {
        let h = m.normalized().hermite()?;
        if h.pivots.len() != m.cols {
            return Err(Error::RankDeficient(format!(
                "generators span rank {} in ambient dimension {}",
                h.pivots.len(),
                m.cols
            )));
        }
        let basis = h.mat.normalized();
        let inv = basis.inverse()?;
        Ok(Lattice {
            basis,
            pivots: h.pivots,
            inv,
        })
    }

    pub fn standard(ring: Arc<WittRing>, n: usize) -> Lattice {
        Lattice::from_generators(&RMatrix::identity(ring, n)).expect("identity is unimodular")
    }

    pub fn dim(&self) -> usize {
        self.basis.cols
    }

    pub fn ring(&self) -> &Arc<WittRing> {
        &self.basis.ring
    }

    /// Multiply the lattice by p^d.
    pub fn rescale_p(&self, d: i32) -> Lattice {
        Lattice {
            basis: self.basis.rescale_p(d).normalized(),
            pivots: self.pivots.clone(),
            inv: self.inv.rescale_p(-d),
        }
    }

    /// Deterministic identity for hashing and ordering.
    pub fn key(&self) -> LatticeKey {
        let b = self.basis.normalized();
        LatticeKey {
            scale: b.scale,
            entries: b.a.iter().map(|e| e.0.clone()).collect(),
        }
    }

    pub fn contains_vec(&self, v: &RMatrix) -> Result<bool> {
        debug_assert_eq!(v.rows, 1);
        debug_assert_eq!(v.cols, self.dim());
        let x = v.mul(&self.inv);
        x.is_integral()
    }

    pub fn contains(&self, other: &Lattice) -> Result<bool> {
        let x = other.basis.mul(&self.inv);
        x.is_integral()
    }

    pub fn eq_lattice(&self, other: &Lattice) -> bool {
        self.key() == other.key()
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        Lattice::from_generators(&self.basis.stack(&other.basis))
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        let d1 = self.std_dual()?;
        let d2 = other.std_dual()?;
        d1.sum(&d2)?.std_dual()
    }

    /// Dual under the standard pairing x . y^T.
    pub fn std_dual(&self) -> Result<Lattice> {
        let a = self.basis.transpose().inverse()?;
        Lattice::from_generators(&a)
    }

    /// Dual under the pairing (x, y) -> x G y^T.
    pub fn dual_gram(&self, g: &RMatrix) -> Result<Lattice> {
        let a = g.mul(&self.basis.transpose()).inverse()?;
        Lattice::from_generators(&a)
    }

    /// Elementary divisor exponents of `other` relative to this lattice
    /// (all >= 0 exactly when other is contained in self).
    pub fn divisor_exponents(&self, other: &Lattice) -> Result<Vec<i32>> {
        let x = other.basis.mul(&self.inv);
        x.smith_exponents()
    }

    /// Image under an invertible linear map acting on row vectors, v -> v A.
    pub fn apply_right(&self, a: &RMatrix) -> Result<Lattice> {
        Lattice::from_generators(&self.basis.mul(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeKey {
    pub scale: i32,
    pub entries: Vec<Vec<u64>>,
}

/// Lift a residue matrix along with p times the standard lattice: the row
/// span of [p I; lift(M)] between p W^n and W^n.
pub fn lattice_between(ring: &Arc<WittRing>, mbar: &FqMat) -> Result<Lattice> {
    let n = mbar.cols;
    let pid = RMatrix::identity(ring.clone(), n).rescale_p(1).to_scale_zero()?;
    let lifted = RMatrix::from_fq(ring.clone(), mbar);
    Lattice::from_generators(&pid.stack(&lifted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;

    fn ring(p: u64, deg: usize, n: u32) -> Arc<WittRing> {
        let fq = Arc::new(Fq::new(p, deg).unwrap());
        WittRing::new(fq, n).unwrap()
    }

    #[test]
    fn hermite_canonical_on_known_example() {
        let w = ring(3, 1, 8);
        let m1 = RMatrix::from_i64(w.clone(), 2, 2, &[1, 1, 0, 3]);
        let m2 = RMatrix::from_i64(w.clone(), 2, 2, &[1, 4, 0, 3]);
        let h1 = m1.hermite().unwrap();
        let h2 = m2.hermite().unwrap();
        assert_eq!(h1.mat.a, h2.mat.a);
        assert_eq!(h1.pivots, vec![(0, 0), (1, 1)]);
        // entry above the pivot is reduced mod 3
        assert_eq!(h1.mat.get(0, 1), &w.from_u64(1));
    }

    #[test]
    fn inverse_roundtrip_and_scale() {
        let w = ring(3, 2, 12);
        let m = RMatrix::from_i64(w.clone(), 3, 3, &[1, 2, 0, 0, 3, 1, 2, 0, 9]);
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        assert!(prod.eq_value(&RMatrix::identity(w.clone(), 3)));
        let prod2 = inv.mul(&m);
        assert!(prod2.eq_value(&RMatrix::identity(w, 3)));
    }

    #[test]
    fn smith_exponents_detect_quotients() {
        let w = ring(3, 1, 10);
        // second divisor is the gcd of 2x2 minors: rows {0,2} x cols {0,2}
        // give determinant 9, so the divisor chain is (1, 9, 9)
        let m = RMatrix::from_i64(w.clone(), 3, 3, &[3, 0, 1, 0, 9, 0, 0, 0, 3]);
        let e = m.smith_exponents().unwrap();
        assert_eq!(e, vec![0, 2, 2]);
        let diag = RMatrix::from_i64(w.clone(), 3, 3, &[3, 0, 0, 0, 9, 0, 0, 0, 27]);
        assert_eq!(diag.smith_exponents().unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn lattice_sum_intersect_dual() {
        let w = ring(3, 1, 12);
        let a = Lattice::from_generators(&RMatrix::from_i64(w.clone(), 2, 2, &[1, 0, 0, 3]))
            .unwrap();
        let b = Lattice::from_generators(&RMatrix::from_i64(w.clone(), 2, 2, &[3, 0, 0, 1]))
            .unwrap();
        let s = a.sum(&b).unwrap();
        let std = Lattice::standard(w.clone(), 2);
        assert!(s.eq_lattice(&std));
        let i = a.intersect(&b).unwrap();
        let expect =
            Lattice::from_generators(&RMatrix::from_i64(w.clone(), 2, 2, &[3, 0, 0, 3])).unwrap();
        assert!(i.eq_lattice(&expect));
        // dual of p-scaled lattice
        let d = i.std_dual().unwrap();
        let expect_d = std.rescale_p(-1);
        assert!(d.eq_lattice(&expect_d));
        // containments
        assert!(std.contains(&i).unwrap());
        assert!(d.contains(&std).unwrap());
        assert!(!i.contains(&std).unwrap());
    }

    #[test]
    fn divisor_exponents_of_sublattice() {
        let w = ring(5, 1, 12);
        let big = Lattice::standard(w.clone(), 2);
        let small =
            Lattice::from_generators(&RMatrix::from_i64(w.clone(), 2, 2, &[5, 1, 0, 25])).unwrap();
        let e = big.divisor_exponents(&small).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.iter().all(|&x| x >= 0));
        assert_eq!(e.iter().sum::<i32>(), 3);
    }
}
