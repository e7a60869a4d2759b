//! Vertex lattices in the six-dimensional quadratic space over Z_p: a
//! lattice whose dual (for the standard Gram) sits between p times the
//! lattice and the lattice itself, with even colength 2, 4, or 6. Neighbor
//! enumeration passes through the quadratic forms induced on the p-torsion
//! quotients, and a breadth-first walk assembles a piece of the building
//! together with a two-coloring of the top-type adjacency graph.

use crate::config::Context;
use crate::error::{Error, Result};
use crate::fq::{Fq, FqEl, FqMat};
use crate::rmatrix::{Lattice, LatticeKey, RMatrix};
use crate::spaces;
use crate::witt::WittRing;
use std::collections::BTreeMap;
use std::sync::Arc;

pub struct VertexCtx {
    pub zp: Arc<WittRing>,
    pub fp: Arc<Fq>,
    /// Quadratic Gram: Q(v) = v G v^T.
    pub gram: RMatrix,
}

impl VertexCtx {
    /// Lattice chains here reach covolume valuations near the default
    /// precision, so the walk runs in a deeper ring: as many digits as fit
    /// in the word-size bound, never fewer than the ambient context uses.
    pub fn new(ctx: &Context) -> Result<VertexCtx> {
        let p = ctx.p();
        let mut n_max = 0u32;
        let mut pw: u128 = 1;
        while pw * p as u128 <= 1u128 << 62 {
            pw *= p as u128;
            n_max += 1;
        }
        let n = n_max.min(26).max(ctx.cfg.precision);
        let deep = ctx.at_precision(n)?;
        let zp = deep.zp.clone();
        let fp = zp.residue_field().clone();
        let gram = spaces::standard_gram(&zp, deep.cfg.delta);
        Ok(VertexCtx { zp, fp, gram })
    }

    pub fn dual(&self, lat: &Lattice) -> Result<Lattice> {
        lat.dual_gram(&self.gram)
    }

    /// The colength profile of the dual inside the lattice; a vertex lattice
    /// has all exponents in {0, 1} with an even, positive number of ones.
    pub fn vertex_type(&self, lat: &Lattice) -> Result<Option<u32>> {
        let dual = self.dual(lat)?;
        let exps = lat.divisor_exponents(&dual)?;
        if !exps.iter().all(|&e| e == 0 || e == 1) {
            return Ok(None);
        }
        let t = exps.iter().filter(|&&e| e == 1).count() as u32;
        if t == 2 || t == 4 || t == 6 {
            Ok(Some(t))
        } else {
            Ok(None)
        }
    }

    /// The base vertex of maximal type: grow a maximal integral lattice for
    /// the p^{-1}-rescaled form greedily from a visibly integral start, then
    /// divide by p. The result is canonical for the fixed search order.
    pub fn base_type6(&self) -> Result<Lattice> {
        let zp = &self.zp;
        let g0 = self.gram.rescale_p(-1);
        let mut basis = RMatrix::identity(zp.clone(), 6);
        for k in 2..6 {
            let e = basis.get(k, k).clone();
            basis.set(k, k, zp.mul_p(&e, 1));
        }
        let mut lat = Lattice::from_generators(&basis)?;
        let card = self.fp.card();
        'grow: for _round in 0..8 {
            let dual0 = lat.dual_gram(&g0)?;
            if dual0.eq_lattice(&lat) {
                // maximal integral and self-dual for the rescaled form
                let out = lat.rescale_p(-1);
                match self.vertex_type(&out)? {
                    Some(6) => return Ok(out),
                    other => {
                        return Err(Error::DegenerateForm(format!(
                            "base lattice has type {other:?}"
                        )))
                    }
                }
            }
            // look for an integral-valued vector of the dual outside the
            // lattice; restricting to dual ∩ p^{-1} lat keeps the quotient
            // elementary p-torsion, so scanning residue combinations of its
            // basis is exhaustive and integrality only depends on the class
            let inter = dual0.intersect(&lat.rescale_p(-1))?;
            for idx in 1..card.pow(6) {
                let mut t = idx;
                let mut coeffs = Vec::with_capacity(6);
                for _ in 0..6 {
                    coeffs.push(t % card);
                    t /= card;
                }
                let mut row = RMatrix::zero(zp.clone(), 1, 6);
                for j in 0..6 {
                    let mut acc = zp.zero();
                    for (i, &c) in coeffs.iter().enumerate() {
                        if c == 0 {
                            continue;
                        }
                        acc = zp.add(&acc, &zp.scal_u(c, inter.basis.get(i, j)));
                    }
                    row.set(0, j, acc);
                }
                row.scale = inter.basis.scale;
                if lat.contains_vec(&row)? {
                    continue;
                }
                let q = row.mul(&g0).mul(&row.transpose());
                if !q.is_integral()? {
                    continue;
                }
                let gens = lat.basis.stack(&row);
                lat = Lattice::from_generators(&gens)?;
                continue 'grow;
            }
            return Err(Error::SearchExhausted(
                "no integral vector to adjoin, lattice not self-dual".into(),
            ));
        }
        Err(Error::SearchExhausted("maximal lattice growth did not stop".into()))
    }

    /// Gram of p*Q on lat/p*lat over F_p (entries of p B G B^T).
    fn torsion_gram(&self, lat: &Lattice) -> Result<FqMat> {
        let b = &lat.basis;
        let g = b.mul(&self.gram).mul(&b.transpose()).rescale_p(1);
        g.to_scale_zero()?.reduce_fq()
    }

    /// Lattice spanned by lat plus lifts of rows (coordinates in basis `of`).
    fn adjoin_rows(&self, lat: &Lattice, of: &RMatrix, rows: &[Vec<FqEl>]) -> Result<Lattice> {
        let zp = &self.zp;
        let mut gens = lat.basis.clone();
        for r in rows {
            let mut row = RMatrix::zero(zp.clone(), 1, 6);
            for j in 0..6 {
                let mut acc = zp.zero();
                for (i, c) in r.iter().enumerate() {
                    if self.fp.is_zero(c) {
                        continue;
                    }
                    acc = zp.add(&acc, &zp.scal_u(c.0[0], of.get(i, j)));
                }
                row.set(0, j, acc);
            }
            row.scale = of.scale;
            gens = gens.stack(&row);
        }
        Lattice::from_generators(&gens)
    }

    /// Vertex lattices directly below: intersections with the radical-side
    /// preimages of perps of isotropic subspaces of the torsion form.
    /// Returns (lattice, type) pairs, deduplicated, in key order.
    pub fn inferiors(&self, lat: &Lattice) -> Result<Vec<(Lattice, u32)>> {
        let t = self
            .vertex_type(lat)?
            .ok_or_else(|| Error::DegenerateForm("not a vertex lattice".into()))?;
        let mut out: BTreeMap<LatticeKey, (Lattice, u32)> = BTreeMap::new();
        if t == 2 {
            return Ok(vec![]);
        }
        let gq = self.torsion_gram(lat)?;
        let max_u = (t / 2 - 1) as usize;
        for u in 1..=max_u {
            for s in spaces::isotropic_subspaces(&self.fp, &gq, u) {
                // radical lines give perps equal to the whole space; the
                // resulting candidate is lat itself and is filtered out
                let perp = s.mul(&self.fp, &gq).kernel(&self.fp);
                let rows: Vec<Vec<FqEl>> = (0..perp.rows).map(|i| perp.row(i)).collect();
                let plat = lat.rescale_p(1);
                let cand = self.adjoin_rows(&plat, &lat.basis, &rows)?;
                if cand.eq_lattice(lat) {
                    continue;
                }
                if let Some(ct) = self.vertex_type(&cand)? {
                    if ct + 2 * u as u32 == t {
                        out.entry(cand.key()).or_insert((cand, ct));
                    }
                }
            }
        }
        Ok(out.into_values().collect())
    }

    /// Vertex lattices directly above: preimages of isotropic subspaces of
    /// the form p^2 Q on (p^{-1} dual) / lat.
    pub fn superiors(&self, lat: &Lattice) -> Result<Vec<(Lattice, u32)>> {
        let t = self
            .vertex_type(lat)?
            .ok_or_else(|| Error::DegenerateForm("not a vertex lattice".into()))?;
        let mut out: BTreeMap<LatticeKey, (Lattice, u32)> = BTreeMap::new();
        if t == 6 {
            return Ok(vec![]);
        }
        let top = self.dual(lat)?.rescale_p(-1); // p^{-1} dual, contains lat
        let d = top.basis.clone();
        // Gram of p^2 Q on top/lat representatives (entries of p^2 D G D^T)
        let gq = d
            .mul(&self.gram)
            .mul(&d.transpose())
            .rescale_p(2)
            .to_scale_zero()?
            .reduce_fq()?;
        // image of lat inside top/(p top): kernel describes nothing here; we
        // enumerate subspaces of top/(p top) and keep those meeting lat only
        // in p top, which is guaranteed by dimension bookkeeping below
        let max_u = ((6 - t) / 2) as usize;
        for u in 1..=max_u {
            for s in spaces::isotropic_subspaces(&self.fp, &gq, u) {
                let rows: Vec<Vec<FqEl>> = (0..s.rows).map(|i| s.row(i)).collect();
                let cand = self.adjoin_rows(lat, &d, &rows)?;
                if cand.eq_lattice(lat) {
                    continue;
                }
                if let Some(ct) = self.vertex_type(&cand)? {
                    if ct == t + 2 * u as u32 {
                        out.entry(cand.key()).or_insert((cand, ct));
                    }
                }
            }
        }
        Ok(out.into_values().collect())
    }
}

pub struct BuildingNode {
    pub lat: Lattice,
    pub t: u32,
    pub depth: u32,
}

pub struct Building {
    pub nodes: Vec<BuildingNode>,
    pub key_to_id: BTreeMap<LatticeKey, usize>,
    /// Comparability edges (i < j).
    pub edges: Vec<(usize, usize)>,
    /// Pairs of top-type nodes whose intersection is a vertex of type 4.
    pub six_adjacency: Vec<(usize, usize)>,
    /// Two-coloring of the top-type adjacency graph (top-type nodes only).
    pub colors: BTreeMap<usize, u8>,
}

/// Breadth-first exploration of the building from the base vertex, out to
/// the given radius in neighbor steps.
pub fn build_building(vctx: &VertexCtx, radius: u32) -> Result<Building> {
    let base = vctx.base_type6()?;
    let mut nodes: Vec<BuildingNode> = Vec::new();
    let mut key_to_id: BTreeMap<LatticeKey, usize> = BTreeMap::new();
    let t0 = vctx.vertex_type(&base)?.unwrap();
    key_to_id.insert(base.key(), 0);
    nodes.push(BuildingNode { lat: base, t: t0, depth: 0 });
    let mut frontier = vec![0usize];
    for depth in 1..=radius {
        let mut next = Vec::new();
        for &id in &frontier {
            let lat = nodes[id].lat.clone();
            let mut nbrs = vctx.inferiors(&lat)?;
            nbrs.extend(vctx.superiors(&lat)?);
            for (nl, nt) in nbrs {
                let key = nl.key();
                if key_to_id.contains_key(&key) {
                    continue;
                }
                let nid = nodes.len();
                key_to_id.insert(key, nid);
                nodes.push(BuildingNode { lat: nl, t: nt, depth });
                next.push(nid);
            }
        }
        frontier = next;
    }
    // comparability edges
    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if nodes[i].t == nodes[j].t {
                continue;
            }
            let (big, small, bi, si) = if nodes[i].t > nodes[j].t {
                (&nodes[i].lat, &nodes[j].lat, i, j)
            } else {
                (&nodes[j].lat, &nodes[i].lat, j, i)
            };
            if big.contains(small)? {
                edges.push((si.min(bi), si.max(bi)));
            }
        }
    }
    // top-type adjacency: intersection is a type-4 vertex lattice
    let six_ids: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].t == 6).collect();
    let mut six_adjacency = Vec::new();
    for (a, &i) in six_ids.iter().enumerate() {
        for &j in six_ids.iter().skip(a + 1) {
            let meet = nodes[i].lat.intersect(&nodes[j].lat)?;
            if vctx.vertex_type(&meet)? == Some(4) {
                six_adjacency.push((i, j));
            }
        }
    }
    // two-coloring per connected component, anchored at the least key
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &six_ids {
        adj.entry(i).or_default();
    }
    for &(i, j) in &six_adjacency {
        adj.get_mut(&i).unwrap().push(j);
        adj.get_mut(&j).unwrap().push(i);
    }
    let mut colors: BTreeMap<usize, u8> = BTreeMap::new();
    let mut order: Vec<usize> = six_ids.clone();
    order.sort_by_key(|&i| nodes[i].lat.key());
    for &start in &order {
        if colors.contains_key(&start) {
            continue;
        }
        colors.insert(start, 0);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = colors[&u];
            for &v in &adj[&u] {
                match colors.get(&v) {
                    None => {
                        colors.insert(v, 1 - cu);
                        queue.push_back(v);
                    }
                    Some(&cv) => {
                        if cv == cu {
                            return Err(Error::NotBipartite(format!(
                                "nodes {u} and {v} conflict"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(Building { nodes, key_to_id, edges, six_adjacency, colors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PrimeConfig;

    fn vctx(p: u64) -> VertexCtx {
        let ctx = Context::new(PrimeConfig::new(p).unwrap()).unwrap();
        VertexCtx::new(&ctx).unwrap()
    }

    #[test]
    fn base_vertex_exists_and_has_top_type() {
        for p in [3u64, 5] {
            let v = vctx(p);
            let base = v.base_type6().unwrap();
            assert_eq!(v.vertex_type(&base).unwrap(), Some(6), "p={p}");
            // dual equals p * lattice exactly at the top type
            let dual = v.dual(&base).unwrap();
            assert!(dual.eq_lattice(&base.rescale_p(1)));
        }
    }

    #[test]
    fn neighbor_counts_at_p3() {
        let v = vctx(3);
        let base = v.base_type6().unwrap();
        let inf = v.inferiors(&base).unwrap();
        let n4 = inf.iter().filter(|(_, t)| *t == 4).count();
        let n2 = inf.iter().filter(|(_, t)| *t == 2).count();
        // isotropic lines and planes of the nonsplit six-dimensional
        // quadric over F_3
        assert_eq!(n4, 112);
        assert_eq!(n2, 280);
        assert!(v.superiors(&base).unwrap().is_empty());
    }

    #[test]
    fn type4_and_type2_neighbors() {
        let v = vctx(3);
        let base = v.base_type6().unwrap();
        let inf = v.inferiors(&base).unwrap();
        let four = inf.iter().find(|(_, t)| *t == 4).unwrap().0.clone();
        let two = inf.iter().find(|(_, t)| *t == 2).unwrap().0.clone();
        // a type-4 vertex: ten type-2 inferiors (elliptic quadric), exactly
        // two type-6 superiors
        let finf = v.inferiors(&four).unwrap();
        assert_eq!(finf.len(), 10);
        assert!(finf.iter().all(|(_, t)| *t == 2));
        let fsup = v.superiors(&four).unwrap();
        let s6 = fsup.iter().filter(|(_, t)| *t == 6).count();
        assert_eq!(s6, 2);
        // a type-2 vertex: no inferiors, sixteen type-4 and eight type-6 above
        assert!(v.inferiors(&two).unwrap().is_empty());
        let tsup = v.superiors(&two).unwrap();
        let s4 = tsup.iter().filter(|(_, t)| *t == 4).count();
        let s6b = tsup.iter().filter(|(_, t)| *t == 6).count();
        assert_eq!((s4, s6b), (16, 8));
    }

    #[test]
    fn radius_two_building_two_colors() {
        let v = vctx(3);
        let b = build_building(&v, 2).unwrap();
        // every type-6 node picked up at depth 2 meets the base in a type-4
        // vertex, and the adjacency graph admits a proper two-coloring with
        // the two classes separated
        let sixes: Vec<usize> = (0..b.nodes.len()).filter(|&i| b.nodes[i].t == 6).collect();
        assert!(sixes.len() > 1);
        assert_eq!(b.colors.len(), sixes.len());
        for &(i, j) in &b.six_adjacency {
            assert_ne!(b.colors[&i], b.colors[&j]);
        }
        // the base is adjacent to the distance-two top-type vertices that
        // contain one of its type-4 inferiors
        assert!(b.six_adjacency.iter().any(|&(i, j)| i == 0 || j == 0));
    }

    #[test]
    fn radius_one_building_is_consistent() {
        let v = vctx(3);
        let b = build_building(&v, 1).unwrap();
        assert_eq!(b.nodes.len(), 1 + 112 + 280);
        // each neighbor is comparable to the base
        let from_base = b.edges.iter().filter(|&&(i, j)| i == 0 || j == 0).count();
        assert_eq!(from_base, 392);
        // the base is the unique top-type node so far, trivially colored
        assert_eq!(b.colors.len(), 1);
        assert_eq!(b.colors[&0], 0);
    }
}
