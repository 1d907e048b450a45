//! DG functors into Table categories and quasi-equivalence checks.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{ChainMap, Complex, Echelon, LinearMap, Vector};

use super::free::{FreeCategory, FreeElem, Word};
use super::table::TableCategory;

/// A DG functor between Table categories: an object map and one degree-0
/// linear map per Hom complex (`maps[x*n+y]` for `Hom(x,y)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableFunctor {
    pub source: TableCategory,
    pub target: TableCategory,
    pub objects: Vec<usize>,
    pub maps: Vec<LinearMap>,
}

/// A DG functor out of a free category: a functor on the base plus the
/// image of every generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeFunctor {
    pub source: FreeCategory,
    pub base: TableFunctor,
    pub images: Vec<Vector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DgFunctor {
    Table(TableFunctor),
    Free(FreeFunctor),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(String),
    Inconclusive(String),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }
}

impl TableFunctor {
    pub fn new(source: TableCategory, target: TableCategory, objects: Vec<usize>, maps: Vec<LinearMap>) -> Result<Self> {
        let n = source.num_objects();
        if objects.len() != n || maps.len() != n * n {
            return Err(Error::Invalid("functor needs one image per object and per Hom complex".into()));
        }
        if objects.iter().any(|&o| o >= target.num_objects()) {
            return Err(Error::UnknownObject("functor object image out of range".into()));
        }
        let f = TableFunctor { source, target, objects, maps };
        f.check()?;
        Ok(f)
    }

    pub fn identity(c: &TableCategory) -> TableFunctor {
        let n = c.num_objects();
        let maps = (0..n * n).map(|k| LinearMap::identity(c.hom(k / n, k % n).dim(), c.field())).collect();
        TableFunctor { source: c.clone(), target: c.clone(), objects: (0..n).collect(), maps }
    }

    /// The inclusion of a full subcategory on `objects`.
    pub fn inclusion(c: &TableCategory, objects: &[usize]) -> TableFunctor {
        let sub = c.full_subcategory(objects);
        let m = objects.len();
        let maps = (0..m * m).map(|k| LinearMap::identity(sub.hom(k / m, k % m).dim(), c.field())).collect();
        TableFunctor { source: sub, target: c.clone(), objects: objects.to_vec(), maps }
    }

    pub fn map(&self, x: usize, y: usize) -> &LinearMap {
        &self.maps[x * self.source.num_objects() + y]
    }

    pub fn apply(&self, x: usize, y: usize, v: &Vector) -> Vector {
        self.map(x, y).apply(v)
    }

    /// Degrees, differentials, units and composition are preserved.
    fn check(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        let n = s.num_objects();
        for x in 0..n {
            for y in 0..n {
                let (h, th) = (s.hom(x, y), t.hom(self.objects[x], self.objects[y]));
                let m = self.map(x, y);
                if m.source_dim != h.dim() || m.target_dim != th.dim() {
                    return Err(Error::Invalid(format!("functor map on Hom({},{}) has the wrong shape", s.object_name(x), s.object_name(y))));
                }
                for j in 0..h.dim() {
                    let img = &m.columns[j];
                    if img.iter().any(|(i, _)| th.degree(*i) != h.degree(j)) {
                        return Err(Error::DegreeMismatch(format!("F({}) changes degree", h.label(j))));
                    }
                    if th.apply_d(img) != m.apply(h.d(j)) {
                        return Err(Error::NotClosed(format!("F does not commute with d on {}", h.label(j))));
                    }
                }
            }
            if self.apply(x, x, s.unit(x)) != *t.unit(self.objects[x]) {
                return Err(Error::Invalid(format!("F(id_{}) is not an identity", s.object_name(x))));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (hg, hf) = (s.hom(y, z), s.hom(x, y));
                    for i in 0..hg.dim() {
                        for j in 0..hf.dim() {
                            let lhs = self.apply(x, z, s.compose_basis(x, y, z, i, j));
                            let (fx, fy, fz) = (self.objects[x], self.objects[y], self.objects[z]);
                            let rhs = t.compose(fx, fy, fz, &self.map(y, z).columns[i], &self.map(x, y).columns[j]);
                            if lhs != rhs {
                                return Err(Error::Invalid(format!("F does not preserve {}∘{}", hg.label(i), hf.label(j))));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `G ∘ F`.
    pub fn then(&self, g: &TableFunctor) -> Result<TableFunctor> {
        let n = self.source.num_objects();
        let mut maps = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                maps.push(g.map(self.objects[x], self.objects[y]).compose(self.map(x, y)));
            }
        }
        let objects = self.objects.iter().map(|&o| g.objects[o]).collect();
        TableFunctor::new(self.source.clone(), g.target.clone(), objects, maps)
    }

    pub fn chain_map(&self, x: usize, y: usize) -> Result<ChainMap> {
        ChainMap::new(
            self.source.hom(x, y).clone(),
            self.target.hom(self.objects[x], self.objects[y]).clone(),
            self.map(x, y).clone(),
        )
    }
}

impl FreeFunctor {
    pub fn new(source: FreeCategory, base: TableFunctor, images: Vec<Vector>) -> Result<Self> {
        if base.source != *source.base() {
            return Err(Error::BaseMismatch("functor base differs from the free category's base".into()));
        }
        if images.len() != source.generators().len() {
            return Err(Error::Invalid("one image per generator is required".into()));
        }
        let f = FreeFunctor { source, base, images };
        for (k, g) in f.source.generators().iter().enumerate() {
            let (x, y) = (f.base.objects[g.source], f.base.objects[g.target]);
            let th = f.target().hom(x, y);
            if f.images[k].iter().any(|(i, _)| th.degree(*i) != g.degree) {
                return Err(Error::DegreeMismatch(format!("F({}) has the wrong degree", g.name)));
            }
            if th.apply_d(&f.images[k]) != f.apply(&g.d) {
                return Err(Error::NotClosed(format!("F(d{}) ≠ dF({})", g.name, g.name)));
            }
        }
        Ok(f)
    }

    pub fn target(&self) -> &TableCategory {
        &self.base.target
    }

    pub fn apply_word(&self, w: &Word) -> Vector {
        let t = self.target();
        let field = t.field();
        let gens = self.source.generators();
        let n = w.gens.len();
        let obj = |k: usize| -> (usize, usize) {
            let from = if k == 0 { w.source } else { gens[w.gens[k - 1]].target };
            let to = if k == n { w.target } else { gens[w.gens[k]].source };
            (from, to)
        };
        let (from0, to0) = obj(0);
        let mut acc = self.base.apply(from0, to0, &Vector::unit(w.base[0], field));
        let start = self.base.objects[from0];
        let mut cur = self.base.objects[to0];
        for k in 1..=n {
            let g = w.gens[k - 1];
            let gt = self.base.objects[gens[g].target];
            acc = t.compose(start, cur, gt, &self.images[g], &acc);
            let (from, to) = obj(k);
            let nt = self.base.objects[to];
            acc = t.compose(start, self.base.objects[from], nt, &self.base.apply(from, to, &Vector::unit(w.base[k], field)), &acc);
            cur = nt;
        }
        acc
    }

    pub fn apply(&self, e: &FreeElem) -> Vector {
        let mut out = Vector::zero();
        for (w, c) in e.iter() {
            out = out.add_scaled(c, &self.apply_word(w));
        }
        out
    }

    /// The induced map `F_W → Hom(F x, F y)` on a truncation.
    pub fn on_truncation(&self, words: &[Word]) -> Vec<Vector> {
        words.iter().map(|w| self.apply_word(w)).collect()
    }
}

/// Bounds for checks that materialize free Hom complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuasiBounds {
    pub lo: i32,
    pub hi: i32,
    /// Weight of the truncation whose classes must map isomorphically.
    pub weight: usize,
    /// Extra weight allowed for killing classes in the kernel.
    pub extra: usize,
    pub cap: usize,
}

impl Default for QuasiBounds {
    fn default() -> Self {
        QuasiBounds { lo: -3, hi: 3, weight: 4, extra: 3, cap: 200_000 }
    }
}

/// Full faithfulness on cohomology in the window and essential
/// surjectivity of `Ho(F)`.
pub fn check_quasi_equivalence(f: &DgFunctor, bounds: QuasiBounds) -> Verdict {
    match f {
        DgFunctor::Table(t) => check_table(t, bounds),
        DgFunctor::Free(fr) => check_free(fr, bounds),
    }
}

pub(crate) fn essentially_surjective(images: &[usize], target: &TableCategory) -> std::result::Result<(), String> {
    'objects: for t in 0..target.num_objects() {
        if images.contains(&t) {
            continue;
        }
        for &s in images {
            let h = target.hom(s, t);
            let Ok(coh) = h.cohomology(0) else { continue };
            let mut candidates = coh.representatives.clone();
            if candidates.len() > 1 {
                let sum = candidates.iter().fold(Vector::zero(), |a, v| a.add(v));
                candidates.push(sum);
            }
            for phi in &candidates {
                if target.ho_inverse(s, t, phi).is_some() {
                    continue 'objects;
                }
            }
        }
        return Err(format!("no homotopy equivalence onto {}", target.object_name(t)));
    }
    Ok(())
}

fn check_table(f: &TableFunctor, b: QuasiBounds) -> Verdict {
    let n = f.source.num_objects();
    for x in 0..n {
        for y in 0..n {
            let cm = match f.chain_map(x, y) {
                Ok(c) => c,
                Err(e) => return Verdict::No(e.to_string()),
            };
            for m in b.lo..=b.hi {
                match cm.is_quasi_isomorphism_on(m, m) {
                    Ok(true) => {}
                    Ok(false) => {
                        return Verdict::No(format!(
                            "H^{m}(Hom({},{})) is not preserved",
                            f.source.object_name(x),
                            f.source.object_name(y)
                        ))
                    }
                    Err(e) => return Verdict::Inconclusive(e.to_string()),
                }
            }
        }
    }
    match essentially_surjective(&f.objects, &f.target) {
        Ok(()) => Verdict::Yes,
        Err(w) => Verdict::Inconclusive(w),
    }
}

fn check_free(f: &FreeFunctor, b: QuasiBounds) -> Verdict {
    check_quasi_equivalence_probed(f, &[], b)
}

/// [`check_quasi_equivalence`] for a free functor, with probes: DG functors
/// out of the same free category. A cycle that `F` sends to a coboundary
/// but that some probe sends to a non-zero class is non-zero in cohomology,
/// so `H(F)` is not injective and the answer is an exact no.
pub fn check_quasi_equivalence_probed(f: &FreeFunctor, probes: &[FreeFunctor], b: QuasiBounds) -> Verdict {
    let src = &f.source;
    let n = src.num_objects();
    let objs = &f.base.objects;
    let mut inconclusive = None;
    for x in 0..n {
        for y in 0..n {
            let big = match src.hom_truncated(x, y, b.weight + b.extra, Some((b.lo - 1, b.hi + 1)), b.cap) {
                Ok(h) => h,
                Err(e) => return Verdict::Inconclusive(e.to_string()),
            };
            let target = f.target().hom(objs[x], objs[y]);
            let images = f.on_truncation(&big.words);
            let name = format!("Hom({},{})", src.objects()[x], src.objects()[y]);
            for m in b.lo..=b.hi {
                let survivors = match classes_match(&big.complex, &big.levels, b.weight, target, &images, m) {
                    Ok(()) => continue,
                    Err(Mismatch::Other(w)) => {
                        inconclusive.get_or_insert(format!("{name} degree {m}: {w}"));
                        continue;
                    }
                    Err(Mismatch::Kernel(z)) => z,
                };
                for p in probes {
                    let pt = p.target().hom(p.base.objects[x], p.base.objects[y]);
                    let pimages = p.on_truncation(&big.words);
                    for z in &survivors {
                        let mut v = Vector::zero();
                        for (i, c) in z.iter() {
                            v = v.add_scaled(c, &pimages[*i]);
                        }
                        if !pt.is_coboundary(&v, m) {
                            return Verdict::No(format!(
                                "{name} degree {m}: the cycle {} maps to zero in cohomology but a probe detects it",
                                big.complex.format_vector(z)
                            ));
                        }
                    }
                }
                inconclusive.get_or_insert(format!("{name} degree {m}: a class in the kernel survives the larger truncation"));
            }
        }
    }
    if let Some(w) = inconclusive {
        return Verdict::Inconclusive(w);
    }
    match essentially_surjective(objs, f.target()) {
        Ok(()) => Verdict::Yes,
        Err(w) => Verdict::Inconclusive(w),
    }
}

enum Mismatch {
    /// Kernel cycles that are not boundaries in the larger truncation.
    Kernel(Vec<Vector>),
    Other(String),
}

/// Classes of `F_w` surject onto `H^m(target)`, and those mapping to zero
/// die in the larger truncation.
fn classes_match(
    big: &Complex,
    levels: &[usize],
    w: usize,
    target: &Complex,
    images: &[Vector],
    m: i32,
) -> std::result::Result<(), Mismatch> {
    let field = big.field();
    let cur: Vec<usize> = big.indices_in_degree(m).into_iter().filter(|&i| levels[i] <= w).collect();
    let pos: BTreeMap<usize, usize> = big.indices_in_degree(m + 1).into_iter().enumerate().map(|(k, i)| (i, k)).collect();
    let cols: Vec<Vector> = cur.iter().map(|&j| big.d(j).filter_map_index(|i| pos.get(&i).copied())).collect();
    let cycles: Vec<Vector> = crate::linalg::kernel(&cols, field).into_iter().map(|z| z.reindex(|k| cur[k])).collect();
    let mut tb = Echelon::new();
    for j in target.indices_in_degree(m - 1) {
        tb.insert(target.d(j));
    }
    let base_rank = tb.rank();
    let image_of = |z: &Vector| -> Vector {
        let mut out = Vector::zero();
        for (i, c) in z.iter() {
            out = out.add_scaled(c, &images[*i]);
        }
        out
    };
    // surjectivity
    let mut hit = tb.clone();
    for z in &cycles {
        hit.insert(&image_of(z));
    }
    let target_h = target.betti(m).map_err(|e| Mismatch::Other(e.to_string()))?;
    if hit.rank() - base_rank != target_h {
        return Err(Mismatch::Other("not surjective on cohomology".into()));
    }
    // kernel classes: combinations of cycles whose image is a target coboundary
    let reduced: Vec<Vector> = cycles.iter().map(|z| tb.reduce(&image_of(z)).0).collect();
    let kernel = crate::linalg::kernel(&reduced, field);
    let mut big_b = Echelon::new();
    for j in big.indices_in_degree(m - 1) {
        big_b.insert(big.d(j));
    }
    let mut survivors = Vec::new();
    for k in kernel {
        let mut z = Vector::zero();
        for (i, c) in k.iter() {
            z = z.add_scaled(c, &cycles[*i]);
        }
        if !big_b.contains(&z) {
            survivors.push(z);
        }
    }
    if survivors.is_empty() {
        Ok(())
    } else {
        Err(Mismatch::Kernel(survivors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    #[test]
    fn identity_functor_is_a_quasi_equivalence() {
        let c = TableCategory::discrete(Field::Rational, vec!["a".into(), "b".into()]);
        let f = DgFunctor::Table(TableFunctor::identity(&c));
        assert_eq!(check_quasi_equivalence(&f, QuasiBounds::default()), Verdict::Yes);
    }

    #[test]
    fn missing_object_is_not_hit() {
        let c = TableCategory::discrete(Field::Rational, vec!["a".into(), "b".into()]);
        let f = TableFunctor::inclusion(&c, &[0]);
        assert!(!check_quasi_equivalence(&DgFunctor::Table(f), QuasiBounds::default()).is_yes());
    }
}
