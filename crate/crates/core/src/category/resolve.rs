//! Semi-free resolutions of Table categories: starting from the discrete
//! category on the same objects, adjoin free generators that hit missing
//! cohomology and kill the kernel, one class at a time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Complex, LinearMap, Vector};

use super::functor::{check_quasi_equivalence, DgFunctor, FreeFunctor, QuasiBounds, TableFunctor, Verdict};
use super::{FreeCategory, FreeElem, Generator, TableCategory, TruncatedHom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryResolveBounds {
    /// Largest number of generators adjoined.
    pub steps: usize,
    pub lo: i32,
    pub hi: i32,
    /// Weight of the truncations in which classes are searched for.
    pub weight: usize,
    /// A class is used only if it is not a boundary at weight `weight + extra`.
    pub extra: usize,
    pub cap: usize,
}

impl Default for CategoryResolveBounds {
    fn default() -> Self {
        CategoryResolveBounds { steps: 12, lo: -2, hi: 2, weight: 4, extra: 2, cap: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryResolutionReport {
    pub generators_added: usize,
    /// No class was left in `lo..=hi+1` when the procedure stopped.
    pub exhausted: bool,
    /// `check_quasi_equivalence` on the window.
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct CategoryResolution {
    pub category: FreeCategory,
    pub functor: FreeFunctor,
    pub report: CategoryResolutionReport,
}

fn discrete_functor(c: &TableCategory) -> Result<TableFunctor> {
    let n = c.num_objects();
    let d = TableCategory::discrete(c.field(), c.objects().to_vec());
    let maps = (0..n * n)
        .map(|k| {
            let (x, y) = (k / n, k % n);
            let tdim = c.hom(x, y).dim();
            if x == y {
                LinearMap { source_dim: 1, target_dim: tdim, degree: 0, columns: vec![c.unit(x).clone()] }
            } else {
                LinearMap::zero(0, tdim, 0)
            }
        })
        .collect();
    TableFunctor::new(d, c.clone(), (0..n).collect(), maps)
}

/// `Cone(F_W → Hom_C)[−1] = F_W ⊕ Hom_C[−1]`, `D(p, c) = (dp, F(p) − dc)`.
struct ShiftedCone {
    hom: TruncatedHom,
    complex: Complex,
}

fn shifted_cone(f: &FreeFunctor, x: usize, y: usize, weight: usize, window: (i32, i32), cap: usize) -> Result<ShiftedCone> {
    let hom = f.source.hom_truncated(x, y, weight, Some(window), cap)?;
    let target = f.target().hom(x, y);
    let nk = hom.complex.dim();
    let images = f.on_truncation(&hom.words);
    let mut basis: Vec<(String, i32)> = (0..nk).map(|i| (hom.complex.label(i).to_string(), hom.complex.degree(i))).collect();
    basis.extend((0..target.dim()).map(|j| (format!("{}[-1]", target.label(j)), target.degree(j) + 1)));
    let mut d: Vec<Vector> = (0..nk).map(|i| hom.complex.d(i).add(&images[i].reindex(|j| j + nk))).collect();
    d.extend((0..target.dim()).map(|j| target.d(j).neg().reindex(|i| i + nk)));
    let complex = Complex::new(target.field(), basis, d)?.with_window(window.0, window.1);
    Ok(ShiftedCone { hom, complex })
}

impl ShiftedCone {
    /// The same vector in a larger truncation's cone.
    fn embed(&self, v: &Vector, big: &ShiftedCone) -> Option<Vector> {
        let (nk, nb) = (self.hom.complex.dim(), big.hom.complex.dim());
        let mut entries = Vec::new();
        for (i, c) in v.iter() {
            let j = if *i < nk { big.hom.index_of(&self.hom.words[*i])? } else { *i - nk + nb };
            entries.push((j, c.clone()));
        }
        Some(Vector::from_entries(entries))
    }
}

/// The first class, by weight then degree then pair, that survives in the
/// larger truncation: `(x, y, degree, p, c)`.
fn next_class(f: &FreeFunctor, b: &CategoryResolveBounds) -> Result<Option<(usize, usize, i32, FreeElem, Vector)>> {
    let n = f.source.num_objects();
    let window = (b.lo - 1, b.hi + 2);
    for w in 0..=b.weight {
        for degree in b.lo..=b.hi + 1 {
            for x in 0..n {
                for y in 0..n {
                    let small = shifted_cone(f, x, y, w, window, b.cap)?;
                    let reps = small.complex.cohomology(degree)?.representatives;
                    if reps.is_empty() {
                        continue;
                    }
                    let big = shifted_cone(f, x, y, w + b.extra, window, b.cap)?;
                    for r in reps {
                        let rb = small.embed(&r, &big).expect("truncations are nested");
                        if big.complex.is_coboundary(&rb, degree) {
                            continue;
                        }
                        let nk = small.hom.complex.dim();
                        let mut p = FreeElem::zero();
                        let mut c = Vec::new();
                        for (i, s) in r.iter() {
                            if *i < nk {
                                p.add_term(small.hom.words[*i].clone(), s);
                            } else {
                                c.push((*i - nk, s.clone()));
                            }
                        }
                        return Ok(Some((x, y, degree, p, Vector::from_entries(c))));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// A free category `K` with `F: K → C`. Every class `(p, c)` of degree `n`
/// of `Cone(Hom_K(X,Y) → Hom_C(X,Y))[−1]` found becomes a generator `g:
/// X → Y` of degree `n − 1` with `dg = p` and `F(g) = c`.
pub fn semi_free_resolve_category(c: &TableCategory, bounds: CategoryResolveBounds) -> Result<CategoryResolution> {
    let base = discrete_functor(c)?;
    let mut gens: Vec<Generator> = Vec::new();
    let mut images: Vec<Vector> = Vec::new();
    let build = |gens: &[Generator], images: &[Vector]| -> Result<FreeFunctor> {
        let k = FreeCategory::new(base.source.clone(), gens.to_vec())?;
        FreeFunctor::new(k, base.clone(), images.to_vec())
    };
    let mut f = build(&gens, &images)?;
    let mut exhausted = false;
    for step in 0..bounds.steps {
        let Some((x, y, degree, p, img)) = next_class(&f, &bounds)? else {
            exhausted = true;
            break;
        };
        gens.push(Generator {
            name: format!("g{step}:{}→{}", c.object_name(x), c.object_name(y)),
            source: x,
            target: y,
            degree: degree - 1,
            d: p,
        });
        images.push(img);
        f = build(&gens, &images).map_err(|e| Error::Invalid(format!("adjoining generator {step}: {e}")))?;
    }
    if !exhausted {
        exhausted = next_class(&f, &bounds)?.is_none();
    }
    let q = QuasiBounds { lo: bounds.lo, hi: bounds.hi, weight: bounds.weight, extra: bounds.extra, cap: bounds.cap };
    let verdict = check_quasi_equivalence(&DgFunctor::Free(f.clone()), q);
    let report = CategoryResolutionReport { generators_added: gens.len(), exhausted, verdict };
    Ok(CategoryResolution { category: f.source.clone(), functor: f, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{dual_numbers, i2};
    use crate::linalg::Field;

    #[test]
    fn discrete_category_needs_no_generators() {
        let c = TableCategory::discrete(Field::Rational, vec!["a".into(), "b".into()]);
        let r = semi_free_resolve_category(&c, CategoryResolveBounds::default()).unwrap();
        assert_eq!(r.report.generators_added, 0);
        assert!(r.report.exhausted);
        assert_eq!(r.report.verdict, Verdict::Yes);
    }

    #[test]
    fn resolution_of_i2() {
        let r = semi_free_resolve_category(&i2(Field::Rational), CategoryResolveBounds::default()).unwrap();
        assert!(r.category.validate().is_valid());
        assert_eq!(r.report.verdict, Verdict::Yes, "{:?}", r.category.generators());
    }

    #[test]
    fn resolution_of_dual_numbers() {
        let r = semi_free_resolve_category(&dual_numbers(Field::Rational), CategoryResolveBounds::default()).unwrap();
        assert!(r.category.validate().is_valid());
        assert_eq!(r.report.verdict, Verdict::Yes, "{:?}", r.category.generators());
    }
}
