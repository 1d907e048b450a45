//! The pretriangulated hull: one-sided twisted complexes over a Table category.
//!
//! A twisted complex is `(⊕ C_i[r_i], q)` with `q_{ij} ∈ Hom(C_j, C_i)` of
//! underlying degree `1 + r_i − r_j`, nonzero only for `i < j`, and
//! `δq + q² = 0`. Morphisms are matrices `f_{ij} ∈ Hom(C_j, C'_i)`; a matrix
//! has degree `l` when every entry has underlying degree `l + r'_i − r_j`.
//!
//! Conventions: composition is matrix multiplication without signs,
//! `δf = ((−1)^{r'_i} d f_{ij})`, and `Df = δf + q′f − (−1)^l f q`.

use std::collections::BTreeMap;

use crate::category::{ExtTable, TableCategory, TableFunctor};
use crate::error::{Error, Result};
use crate::linalg::{Complex, LinearMap, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedComplex {
    /// `(object, shift)` per summand.
    summands: Vec<(usize, i32)>,
    /// `q[(i, j)]` with `i < j`, a vector in `Hom(C_j, C_i)`.
    q: BTreeMap<(usize, usize), Vector>,
}

impl TwistedComplex {
    /// Checks triangularity, degrees and the Maurer–Cartan equation.
    pub fn new(base: &TableCategory, summands: Vec<(usize, i32)>, q: BTreeMap<(usize, usize), Vector>) -> Result<Self> {
        let t = TwistedComplex::unchecked(base, summands, q)?;
        if let Some((i, j)) = t.mc_defect(base) {
            return Err(Error::NotClosed(format!("δq + q² ≠ 0 at entry ({i},{j})")));
        }
        Ok(t)
    }

    /// Checks triangularity and degrees only.
    pub fn unchecked(base: &TableCategory, summands: Vec<(usize, i32)>, q: BTreeMap<(usize, usize), Vector>) -> Result<Self> {
        for &(o, _) in &summands {
            if o >= base.num_objects() {
                return Err(Error::UnknownObject(format!("object #{o}")));
            }
        }
        let mut q = q;
        q.retain(|_, v| !v.is_zero());
        for (&(i, j), v) in &q {
            if i >= j || j >= summands.len() {
                return Err(Error::Invalid(format!("q entry ({i},{j}) is not strictly upper triangular")));
            }
            let (cj, rj) = summands[j];
            let (ci, ri) = summands[i];
            let h = base.hom(cj, ci);
            if v.max_index().map_or(false, |m| m >= h.dim()) {
                return Err(Error::Invalid(format!("q entry ({i},{j}) out of range")));
            }
            if v.iter().any(|(k, _)| h.degree(*k) != 1 + ri - rj) {
                return Err(Error::DegreeMismatch(format!("q entry ({i},{j}) must have degree {}", 1 + ri - rj)));
            }
        }
        Ok(TwistedComplex { summands, q })
    }

    pub fn zero() -> Self {
        TwistedComplex { summands: vec![], q: BTreeMap::new() }
    }

    pub fn singleton(object: usize) -> Self {
        TwistedComplex { summands: vec![(object, 0)], q: BTreeMap::new() }
    }

    pub fn summands(&self) -> &[(usize, i32)] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn q(&self, i: usize, j: usize) -> Option<&Vector> {
        self.q.get(&(i, j))
    }

    pub fn q_entries(&self) -> &BTreeMap<(usize, usize), Vector> {
        &self.q
    }

    /// First entry where `δq + q²` is nonzero.
    pub fn mc_defect(&self, base: &TableCategory) -> Option<(usize, usize)> {
        let n = self.summands.len();
        let field = base.field();
        for i in 0..n {
            for j in i + 1..n {
                let (ci, ri) = self.summands[i];
                let (cj, _) = self.summands[j];
                let mut v = match self.q.get(&(i, j)) {
                    Some(qij) => base.hom(cj, ci).apply_d(qij).scale(&field.sign(ri as i64)),
                    None => Vector::zero(),
                };
                for k in i + 1..j {
                    if let (Some(a), Some(b)) = (self.q.get(&(i, k)), self.q.get(&(k, j))) {
                        let ck = self.summands[k].0;
                        v = v.add(&base.compose(cj, ck, ci, a, b));
                    }
                }
                if !v.is_zero() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// `C[n]`: every `r_i` increased by `n`, `q` multiplied by `(−1)^n`.
    pub fn shift(&self, base: &TableCategory, n: i32) -> TwistedComplex {
        let s = base.field().sign(n as i64);
        TwistedComplex {
            summands: self.summands.iter().map(|&(o, r)| (o, r + n)).collect(),
            q: self.q.iter().map(|(k, v)| (*k, v.scale(&s))).collect(),
        }
    }

    /// The image under a DG functor, entry by entry.
    pub fn map(&self, f: &TableFunctor) -> TwistedComplex {
        TwistedComplex {
            summands: self.summands.iter().map(|&(o, r)| (f.objects[o], r)).collect(),
            q: self
                .q
                .iter()
                .map(|(&(i, j), v)| ((i, j), f.apply(self.summands[j].0, self.summands[i].0, v)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn label(&self, base: &TableCategory) -> String {
        if self.summands.is_empty() {
            return "0".into();
        }
        self.summands
            .iter()
            .map(|&(o, r)| if r == 0 { base.object_name(o).to_string() } else { format!("{}[{r}]", base.object_name(o)) })
            .collect::<Vec<_>>()
            .join("⊕")
    }
}

/// `Hom(C, C′)` as a complex of matrices. Basis element `k` is the matrix
/// with a single basis entry `slots[k] = (i, j, b)`.
#[derive(Clone, Debug)]
pub struct PretrHom {
    pub complex: Complex,
    pub slots: Vec<(usize, usize, usize)>,
    offsets: BTreeMap<(usize, usize), usize>,
}

impl PretrHom {
    /// The basis index of entry `b` in slot `(i, j)`.
    pub fn index(&self, i: usize, j: usize, b: usize) -> usize {
        self.offsets[&(i, j)] + b
    }

    /// Entry `(i, j)` of a matrix given in this basis.
    pub fn entry(&self, v: &Vector, i: usize, j: usize, dim: usize) -> Vector {
        let off = self.offsets[&(i, j)];
        v.filter_map_index(|k| (k >= off && k < off + dim).then(|| k - off))
    }
}

pub fn pretr_hom(base: &TableCategory, c: &TwistedComplex, c2: &TwistedComplex) -> PretrHom {
    let field = base.field();
    let mut slots = Vec::new();
    let mut labels = Vec::new();
    let mut degrees = Vec::new();
    let mut offsets = BTreeMap::new();
    for (i, &(ci, ri)) in c2.summands.iter().enumerate() {
        for (j, &(cj, rj)) in c.summands.iter().enumerate() {
            offsets.insert((i, j), slots.len());
            let h = base.hom(cj, ci);
            for b in 0..h.dim() {
                slots.push((i, j, b));
                if c.len() == 1 && c2.len() == 1 {
                    labels.push(h.label(b).to_string());
                } else {
                    labels.push(format!("[{i},{j}]{}", h.label(b)));
                }
                degrees.push(h.degree(b) - ri + rj);
            }
        }
    }
    let hom = PretrHom { complex: Complex::zero(field), slots, offsets };
    let mut d = Vec::with_capacity(hom.slots.len());
    for k in 0..hom.slots.len() {
        let (i, j, b) = hom.slots[k];
        let (ci, ri) = c2.summands[i];
        let (cj, _) = c.summands[j];
        let l = degrees[k];
        let bv = Vector::unit(b, field);
        // δ
        let mut col = base
            .hom(cj, ci)
            .d(b)
            .scale(&field.sign(ri as i64))
            .reindex(|t| hom.index(i, j, t));
        // q′ f
        for kk in 0..i {
            if let Some(qk) = c2.q.get(&(kk, i)) {
                let ck = c2.summands[kk].0;
                let v = base.compose(cj, ci, ck, qk, &bv);
                col = col.add(&v.reindex(|t| hom.index(kk, j, t)));
            }
        }
        // −(−1)^l f q
        let s = -field.sign(l as i64);
        for m in j + 1..c.summands.len() {
            if let Some(qm) = c.q.get(&(j, m)) {
                let cm = c.summands[m].0;
                let v = base.compose(cm, cj, ci, &bv, qm);
                col = col.add(&v.scale(&s).reindex(|t| hom.index(i, m, t)));
            }
        }
        d.push(col);
    }
    PretrHom {
        complex: Complex::from_parts(field, labels, degrees, d, None),
        slots: hom.slots,
        offsets: hom.offsets,
    }
}

/// Matrix product `g ∘ f` for `f ∈ Hom(C, C′)`, `g ∈ Hom(C′, C″)`.
pub fn compose(
    base: &TableCategory,
    c: &TwistedComplex,
    c1: &TwistedComplex,
    c2: &TwistedComplex,
    g: &Vector,
    f: &Vector,
) -> Vector {
    let (hf, hg, hgf) = (pretr_hom(base, c, c1), pretr_hom(base, c1, c2), pretr_hom(base, c, c2));
    compose_in(base, c, c1, c2, (&hf, &hg, &hgf), g, f)
}

pub(crate) fn compose_in(
    base: &TableCategory,
    c: &TwistedComplex,
    c1: &TwistedComplex,
    c2: &TwistedComplex,
    homs: (&PretrHom, &PretrHom, &PretrHom),
    g: &Vector,
    f: &Vector,
) -> Vector {
    let (hf, hg, hgf) = homs;
    let mut out = Vector::zero();
    for (a, x) in g.iter() {
        let (i, k, bg) = hg.slots[*a];
        for (b, y) in f.iter() {
            let (k2, j, bf) = hf.slots[*b];
            if k2 != k {
                continue;
            }
            let (ci, ck, cj) = (c2.summands[i].0, c1.summands[k].0, c.summands[j].0);
            let v = base.compose(cj, ck, ci, &Vector::unit(bg, base.field()), &Vector::unit(bf, base.field()));
            out = out.add_scaled(&(x * y), &v.reindex(|t| hgf.index(i, j, t)));
        }
    }
    out
}

pub fn identity(base: &TableCategory, c: &TwistedComplex) -> Vector {
    let h = pretr_hom(base, c, c);
    let mut out = Vector::zero();
    for (i, &(ci, _)) in c.summands.iter().enumerate() {
        out = out.add(&base.unit(ci).reindex(|t| h.index(i, i, t)));
    }
    out
}

/// `Cone(f) = (C′ ⊕ C[1], [[q′, f], [0, −q]])` for a closed degree-0 `f: C → C′`.
pub fn cone(base: &TableCategory, c: &TwistedComplex, c2: &TwistedComplex, f: &Vector) -> Result<TwistedComplex> {
    let h = pretr_hom(base, c, c2);
    if f.iter().any(|(k, _)| h.complex.degree(*k) != 0) {
        return Err(Error::DegreeMismatch("cone needs a degree-0 morphism".into()));
    }
    if !h.complex.apply_d(f).is_zero() {
        return Err(Error::NotClosed("cone needs a closed morphism".into()));
    }
    let off = c2.len();
    let shifted = c.shift(base, 1);
    let mut summands = c2.summands.clone();
    summands.extend(shifted.summands.iter().copied());
    let mut q = c2.q.clone();
    for (&(i, j), v) in &shifted.q {
        q.insert((i + off, j + off), v.clone());
    }
    for (i, &(ci, _)) in c2.summands.iter().enumerate() {
        for (j, &(cj, _)) in c.summands.iter().enumerate() {
            let e = h.entry(f, i, j, base.hom(cj, ci).dim());
            if !e.is_zero() {
                q.insert((i, j + off), e);
            }
        }
    }
    TwistedComplex::new(base, summands, q)
}

/// A contracting homotopy `h` with `Dh = id`, if `C` is contractible.
pub fn is_contractible(base: &TableCategory, c: &TwistedComplex) -> Option<Vector> {
    let end = pretr_hom(base, c, c);
    end.complex.primitive(&identity(base, c), 0)
}

/// Whether the closed degree-0 `f` is a homotopy equivalence, witnessed by
/// a contraction of its cone.
pub fn is_homotopy_equivalence(base: &TableCategory, c: &TwistedComplex, c2: &TwistedComplex, f: &Vector) -> Result<Option<Vector>> {
    let k = cone(base, c, c2, f)?;
    Ok(is_contractible(base, &k))
}

/// Cohomology of `Hom(X, Y)` in `lo..=hi`.
pub fn ext_tr(base: &TableCategory, x: &TwistedComplex, y: &TwistedComplex, lo: i32, hi: i32) -> Result<ExtTable> {
    ExtTable::exact_from(&pretr_hom(base, x, y).complex, lo, hi)
}

/// The full subcategory of `base^pretr` on the given twisted complexes, as a Table category.
pub fn full_subcategory_table(base: &TableCategory, objects: &[(String, TwistedComplex)]) -> Result<TableCategory> {
    let n = objects.len();
    let mut homs = Vec::with_capacity(n * n);
    let mut ph = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let h = pretr_hom(base, &objects[x].1, &objects[y].1);
            homs.push(h.complex.clone());
            ph.push(h);
        }
    }
    let units = objects.iter().map(|(_, c)| identity(base, c)).collect();
    let field = base.field();
    TableCategory::from_fn(field, objects.iter().map(|(s, _)| s.clone()).collect(), homs, units, |x, y, z, i, j| {
        let (cx, cy, cz) = (&objects[x].1, &objects[y].1, &objects[z].1);
        compose_in(
            base,
            cx,
            cy,
            cz,
            (&ph[x * n + y], &ph[y * n + z], &ph[x * n + z]),
            &Vector::unit(i, field),
            &Vector::unit(j, field),
        )
    })
}

/// The extension of `F: A → A′` to full subcategories of the hulls:
/// `objects` in `A^pretr` are sent to their entrywise images.
pub fn extend_functor(
    f: &TableFunctor,
    objects: &[(String, TwistedComplex)],
) -> Result<(TableCategory, TableCategory, TableFunctor)> {
    let src = full_subcategory_table(&f.source, objects)?;
    let images: Vec<(String, TwistedComplex)> = objects.iter().map(|(s, c)| (s.clone(), c.map(f))).collect();
    for (s, c) in &images {
        if let Some((i, j)) = c.mc_defect(&f.target) {
            return Err(Error::NotClosed(format!("image of {s} violates δq + q² = 0 at ({i},{j})")));
        }
    }
    let tgt = full_subcategory_table(&f.target, &images)?;
    let n = objects.len();
    let mut maps = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let hs = pretr_hom(&f.source, &objects[x].1, &objects[y].1);
            let ht = pretr_hom(&f.target, &images[x].1, &images[y].1);
            let columns = hs
                .slots
                .iter()
                .map(|&(i, j, b)| {
                    let (ci, cj) = (objects[y].1.summands[i].0, objects[x].1.summands[j].0);
                    f.apply(cj, ci, &Vector::unit(b, f.source.field())).reindex(|t| ht.index(i, j, t))
                })
                .collect();
            maps.push(LinearMap { source_dim: hs.complex.dim(), target_dim: ht.complex.dim(), degree: 0, columns });
        }
    }
    let func = TableFunctor::new(src.clone(), tgt.clone(), (0..n).collect(), maps)?;
    Ok((src, tgt, func))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    fn a0_table() -> TableCategory {
        // Two objects, Hom(X1,X2) = k·f, closed of degree 0.
        let q = Field::Rational;
        let id = || Complex::new(q, vec![("id".into(), 0)], vec![Vector::zero()]).unwrap();
        let f = Complex::new(q, vec![("f".into(), 0)], vec![Vector::zero()]).unwrap();
        TableCategory::from_fn(
            q,
            vec!["X1".into(), "X2".into()],
            vec![id(), f, Complex::zero(q), id()],
            vec![Vector::unit(0, q), Vector::unit(0, q)],
            |_, _, _, _, _| Vector::unit(0, q),
        )
        .unwrap()
    }

    #[test]
    fn singletons_embed_fully_faithfully() {
        let a = a0_table();
        let h = pretr_hom(&a, &TwistedComplex::singleton(0), &TwistedComplex::singleton(1));
        assert_eq!(&h.complex, a.hom(0, 1));
    }

    #[test]
    fn cone_of_f_has_expected_homs() {
        let a = a0_table();
        let q = a.field();
        let (x1, x2) = (TwistedComplex::singleton(0), TwistedComplex::singleton(1));
        let c = cone(&a, &x1, &x2, &Vector::unit(0, q)).unwrap();
        let end = pretr_hom(&a, &c, &c).complex;
        assert_eq!(end.dim(), 3);
        assert_eq!(end.betti(0).unwrap(), 1);
        assert_eq!(end.betti(1).unwrap(), 0);
        assert!(is_contractible(&a, &c).is_none());
        let to_x2 = pretr_hom(&a, &c, &x2).complex;
        assert_eq!(to_x2.dim_in_degree(0), 1);
        assert_eq!(to_x2.dim_in_degree(1), 1);
        assert!(to_x2.is_acyclic());
        assert!(pretr_hom(&a, &x1, &c).complex.is_acyclic());
    }

    #[test]
    fn cone_of_identity_is_contractible() {
        let a = a0_table();
        let x = TwistedComplex::singleton(0);
        let c = cone(&a, &x, &x, a.unit(0)).unwrap();
        let h = is_contractible(&a, &c).unwrap();
        let end = pretr_hom(&a, &c, &c).complex;
        assert_eq!(end.apply_d(&h), identity(&a, &c));
        assert!(is_contractible(&a, &TwistedComplex::zero()).is_some());
    }

    #[test]
    fn shift_moves_ext() {
        let a = a0_table();
        let x = TwistedComplex::singleton(0);
        let t = ext_tr(&a, &x.shift(&a, 1), &x, -2, 2).unwrap();
        assert_eq!(t.dim(1), Some(1));
        assert_eq!(t.dim(0), Some(0));
        assert_eq!(x.shift(&a, 1).shift(&a, -1), x);
    }
}
