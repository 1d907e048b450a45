//! Semi-free right modules, their certificates, and two resolutions: the
//! iterative one (kill the cohomology of the shifted cone, repeat) and the
//! truncated bar resolution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::category::TableCategory;
use crate::error::{Error, Result};
use crate::linalg::{Complex, LinearMap, Vector};

use super::{DgModule, ModuleMap, Variance};

/// A free generator `e` at object `U` with `d(e) = Σ e'·b`, `b ∈ Hom(U, U_{e'})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGenerator {
    pub label: String,
    pub object: usize,
    pub degree: i32,
    pub d: Vec<(usize, Vector)>,
}

/// A right module `⊕_e e·Hom(−, U_e)` given by its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiFreeModule {
    base: TableCategory,
    generators: Vec<FreeGenerator>,
}

impl SemiFreeModule {
    pub fn new(base: TableCategory, generators: Vec<FreeGenerator>) -> Result<SemiFreeModule> {
        for g in &generators {
            if g.object >= base.num_objects() {
                return Err(Error::UnknownObject(format!("generator {} sits at an unknown object", g.label)));
            }
            for (e, b) in &g.d {
                let t = generators.get(*e).ok_or_else(|| Error::Invalid(format!("d({}) names an unknown generator", g.label)))?;
                let h = base.hom(g.object, t.object);
                if b.max_index().map_or(false, |i| i >= h.dim()) {
                    return Err(Error::Invalid(format!("d({}) has a coefficient outside Hom", g.label)));
                }
                if b.iter().any(|(i, _)| t.degree + h.degree(*i) != g.degree + 1) {
                    return Err(Error::DegreeMismatch(format!("d({}) is not of degree {}", g.label, g.degree + 1)));
                }
            }
        }
        Ok(SemiFreeModule { base, generators })
    }

    pub fn base(&self) -> &TableCategory {
        &self.base
    }

    pub fn generators(&self) -> &[FreeGenerator] {
        &self.generators
    }

    fn offsets(&self, z: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.generators.len() + 1);
        let mut acc = 0;
        for g in &self.generators {
            out.push(acc);
            acc += self.base.hom(z, g.object).dim();
        }
        out.push(acc);
        out
    }

    /// The underlying DG module; the basis of the value at `z` is `e·b`
    /// with `b` running over `Hom(z, U_e)`, generators in order.
    pub fn realize(&self) -> Result<DgModule> {
        let b = &self.base;
        let f = b.field();
        let n = b.num_objects();
        let offsets: Vec<Vec<usize>> = (0..n).map(|z| self.offsets(z)).collect();
        let mut values = Vec::with_capacity(n);
        for z in 0..n {
            let mut basis = Vec::new();
            let mut d = Vec::new();
            for (k, g) in self.generators.iter().enumerate() {
                let h = b.hom(z, g.object);
                let sign = f.sign(g.degree as i64);
                for j in 0..h.dim() {
                    basis.push((format!("{}·{}", g.label, h.label(j)), g.degree + h.degree(j)));
                    let bj = Vector::unit(j, f);
                    let mut v = h.d(j).scale(&sign).reindex(|i| i + offsets[z][k]);
                    for (e, c) in &g.d {
                        let t = self.generators[*e].object;
                        let cb = b.compose(z, g.object, t, c, &bj);
                        v = v.add(&cb.reindex(|i| i + offsets[z][*e]));
                    }
                    d.push(v);
                }
            }
            values.push(Complex::new(f, basis, d)?);
        }
        DgModule::from_fn(b.clone(), Variance::Right, values, |x, y, a, m| {
            let k = offsets[y].partition_point(|&o| o <= m) - 1;
            let g = &self.generators[k];
            let bm = Vector::unit(m - offsets[y][k], f);
            b.compose(x, y, g.object, &bm, &Vector::unit(a, f)).reindex(|i| i + offsets[x][k])
        })
    }

    /// `e·b ↦ f(e)·b` into `target`, for images `f(e) ∈ target(U_e)`.
    pub fn map_to(&self, realized: &DgModule, target: &DgModule, images: &[Vector]) -> Result<ModuleMap> {
        let b = &self.base;
        let f = b.field();
        let mut components = Vec::with_capacity(b.num_objects());
        for z in 0..b.num_objects() {
            let mut cols = Vec::new();
            for (k, g) in self.generators.iter().enumerate() {
                for j in 0..b.hom(z, g.object).dim() {
                    cols.push(target.act(z, g.object, &Vector::unit(j, f), &images[k]));
                }
            }
            components.push(LinearMap { source_dim: cols.len(), target_dim: target.value(z).dim(), degree: 0, columns: cols });
        }
        ModuleMap::new(realized.clone(), target.clone(), components)
    }

    /// The submodule on generators with `keep(k)`; must be closed under `d`.
    pub fn restrict_generators(&self, keep: impl Fn(usize) -> bool) -> Result<(SemiFreeModule, Vec<usize>)> {
        let kept: Vec<usize> = (0..self.generators.len()).filter(|&k| keep(k)).collect();
        let pos: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let mut gens = Vec::with_capacity(kept.len());
        for &k in &kept {
            let g = &self.generators[k];
            let mut d = Vec::with_capacity(g.d.len());
            for (e, c) in &g.d {
                let &i = pos.get(e).ok_or_else(|| Error::Invalid(format!("d({}) leaves the submodule", g.label)))?;
                d.push((i, c.clone()));
            }
            gens.push(FreeGenerator { d, ..g.clone() });
        }
        Ok((SemiFreeModule::new(self.base.clone(), gens)?, kept))
    }
}

/// Stage `i ≥ 1` lists generators whose differential only involves earlier
/// stages; stage 0 is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiFreeCertificate {
    pub stages: Vec<Vec<usize>>,
}

impl SemiFreeCertificate {
    /// Stage of a generator is one more than the largest stage it refers to;
    /// fails when the references contain a cycle.
    pub fn from_module(p: &SemiFreeModule) -> Result<SemiFreeCertificate> {
        let n = p.generators.len();
        let mut stage = vec![0usize; n];
        let mut state = vec![0u8; n];
        for start in 0..n {
            if state[start] == 2 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some(&mut (k, ref mut next)) = stack.last_mut() {
                let refs = &p.generators[k].d;
                if *next < refs.len() {
                    let e = refs[*next].0;
                    *next += 1;
                    match state[e] {
                        0 => {
                            state[e] = 1;
                            stack.push((e, 0));
                        }
                        1 => return Err(Error::Invalid(format!("generator {} refers to itself through d", p.generators[e].label))),
                        _ => {}
                    }
                } else {
                    stage[k] = 1 + refs.iter().map(|(e, _)| stage[*e]).max().unwrap_or(0);
                    state[k] = 2;
                    stack.pop();
                }
            }
        }
        let top = stage.iter().copied().max().unwrap_or(0);
        let mut stages = vec![Vec::new(); top + 1];
        for (k, s) in stage.into_iter().enumerate() {
            stages[s].push(k);
        }
        Ok(SemiFreeCertificate { stages })
    }

    pub fn stage_of(&self, k: usize) -> Option<usize> {
        self.stages.iter().position(|s| s.contains(&k))
    }

    /// Stage 0 empty, every generator listed once, differentials only
    /// reaching strictly earlier stages, and `d² = 0` on the realization.
    pub fn validate(&self, p: &SemiFreeModule) -> std::result::Result<(), String> {
        if self.stages.first().map_or(false, |s| !s.is_empty()) {
            return Err("stage 0 is not empty".into());
        }
        let mut stage = vec![usize::MAX; p.generators.len()];
        for (i, s) in self.stages.iter().enumerate() {
            for &k in s {
                if k >= stage.len() || stage[k] != usize::MAX {
                    return Err(format!("generator {k} is listed twice or does not exist"));
                }
                stage[k] = i;
            }
        }
        if let Some(k) = stage.iter().position(|&s| s == usize::MAX) {
            return Err(format!("generator {} is not in any stage", p.generators[k].label));
        }
        for (k, g) in p.generators.iter().enumerate() {
            if let Some((e, _)) = g.d.iter().find(|(e, _)| stage[*e] >= stage[k]) {
                return Err(format!("d({}) involves {} from a stage that is not earlier", g.label, p.generators[*e].label));
            }
        }
        let r = p.realize().map_err(|e| e.to_string())?;
        for (z, c) in r.values().iter().enumerate() {
            if c.check_d_squared().is_err() {
                return Err(format!("d² ≠ 0 at {}", p.base.object_name(z)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolveBounds {
    pub steps: usize,
    pub lo: i32,
    pub hi: i32,
    /// Kill cohomology of the shifted cone in every degree, not only in
    /// `lo..=hi+1`.
    pub all_degrees: bool,
}

impl ResolveBounds {
    pub fn window(steps: usize, lo: i32, hi: i32) -> ResolveBounds {
        ResolveBounds { steps, lo, hi, all_degrees: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub lo: i32,
    pub hi: i32,
    pub steps: usize,
    /// `(object, degree)` cells where the augmentation is an isomorphism on `H`.
    pub certified: Vec<(usize, i32)>,
    pub uncertified: Vec<(usize, i32)>,
    /// The shifted cone is acyclic in every degree at every object.
    pub complete: bool,
    /// Every shifted cone is acyclic from this degree up (`None` when complete).
    pub acyclic_from: Option<i32>,
}

impl ResolutionReport {
    pub fn is_certified(&self, object: usize, degree: i32) -> bool {
        self.certified.contains(&(object, degree))
    }

    pub fn all_certified(&self) -> bool {
        self.uncertified.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Resolution {
    pub module: SemiFreeModule,
    /// `f(e) ∈ M(U_e)` for each generator.
    pub images: Vec<Vector>,
    /// Filtration level of each generator: the step that added it, or the
    /// number of bars. Generators of level at most `s` span a submodule.
    pub levels: Vec<usize>,
    pub realized: DgModule,
    pub augmentation: ModuleMap,
    pub certificate: SemiFreeCertificate,
    pub report: ResolutionReport,
}

impl Resolution {
    fn assemble(
        module: SemiFreeModule,
        images: Vec<Vector>,
        levels: Vec<usize>,
        target: &DgModule,
        lo: i32,
        hi: i32,
        steps: usize,
    ) -> Result<Resolution> {
        let realized = module.realize()?;
        let augmentation = module.map_to(&realized, target, &images)?;
        let certificate = SemiFreeCertificate::from_module(&module)?;
        let report = report_for(&augmentation, lo, hi, steps)?;
        Ok(Resolution { module, images, levels, realized, augmentation, certificate, report })
    }

    /// The resolution built from generators of level at most `level`.
    pub fn truncate(&self, level: usize) -> Result<Resolution> {
        let (module, kept) = self.module.restrict_generators(|k| self.levels[k] <= level)?;
        let images = kept.iter().map(|&k| self.images[k].clone()).collect();
        let levels = kept.iter().map(|&k| self.levels[k]).collect();
        Resolution::assemble(module, images, levels, self.augmentation.target(), self.report.lo, self.report.hi, level)
    }

    pub fn max_level(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0)
    }
}

/// `Cone(φ_U)[−1] = P(U) ⊕ M(U)[−1]` with `D(p, m) = (dp, φ(p) − dm)`.
fn shifted_cone(phi: &ModuleMap, u: usize) -> Complex {
    let (p, m) = (phi.source().value(u), phi.target().value(u));
    let f = p.field();
    let np = p.dim();
    let mut basis: Vec<(String, i32)> = (0..np).map(|i| (p.label(i).to_string(), p.degree(i))).collect();
    basis.extend((0..m.dim()).map(|i| (format!("{}[-1]", m.label(i)), m.degree(i) + 1)));
    let mut d: Vec<Vector> = (0..np).map(|i| p.d(i).add(&phi.component(u).columns[i].reindex(|k| k + np))).collect();
    d.extend((0..m.dim()).map(|i| m.d(i).neg().reindex(|k| k + np)));
    Complex::new(f, basis, d).expect("cone degrees are consistent")
}

fn report_for(phi: &ModuleMap, lo: i32, hi: i32, steps: usize) -> Result<ResolutionReport> {
    let b = phi.source().base();
    let mut certified = Vec::new();
    let mut uncertified = Vec::new();
    let mut top: Option<i32> = None;
    for u in 0..b.num_objects() {
        let k = shifted_cone(phi, u);
        if let Some((dlo, dhi)) = k.degree_range() {
            for m in (dlo..=dhi).rev() {
                if k.betti(m)? != 0 {
                    top = Some(top.map_or(m, |t| t.max(m)));
                    break;
                }
            }
        }
        for m in lo..=hi {
            if k.betti(m)? == 0 && k.betti(m + 1)? == 0 {
                certified.push((u, m));
            } else {
                uncertified.push((u, m));
            }
        }
    }
    Ok(ResolutionReport { lo, hi, steps, certified, uncertified, complete: top.is_none(), acyclic_from: top.map(|t| t + 1) })
}

fn require_right(m: &DgModule) -> Result<()> {
    if m.variance() != Variance::Right {
        return Err(Error::VarianceMismatch("resolutions are built for right modules; pass to the opposite category".into()));
    }
    Ok(())
}

fn cone_classes(phi: &ModuleMap, u: usize, bounds: &ResolveBounds) -> Result<Vec<(i32, Vector)>> {
    let k = shifted_cone(phi, u);
    let (lo, hi) = if bounds.all_degrees {
        match k.degree_range() {
            Some(r) => r,
            None => return Ok(vec![]),
        }
    } else {
        (bounds.lo, bounds.hi + 1)
    };
    let mut out = Vec::new();
    for n in lo..=hi {
        for rep in k.cohomology(n)?.representatives {
            out.push((n, rep));
        }
    }
    Ok(out)
}

struct Builder<'a> {
    base: &'a TableCategory,
    target: &'a DgModule,
    generators: Vec<FreeGenerator>,
    images: Vec<Vector>,
    levels: Vec<usize>,
}

impl Builder<'_> {
    fn phi(&self) -> Result<ModuleMap> {
        let p = SemiFreeModule::new(self.base.clone(), self.generators.clone())?;
        let realized = p.realize()?;
        p.map_to(&realized, self.target, &self.images)
    }

    fn classes(&self, bounds: &ResolveBounds) -> Result<Vec<Vec<(i32, Vector)>>> {
        let phi = self.phi()?;
        (0..self.base.num_objects()).map(|u| cone_classes(&phi, u, bounds)).collect()
    }

    /// Adds a generator for each class `(p, m)` at `u`: degree `n − 1`, `de = p`, `f(e) = m`.
    fn add(&mut self, u: usize, classes: &[(i32, Vector)], step: usize) -> Result<()> {
        let p = SemiFreeModule::new(self.base.clone(), self.generators.clone())?;
        let offsets = p.offsets(u);
        let np = *offsets.last().unwrap();
        for (count, (n, rep)) in classes.iter().enumerate() {
            let mut d: BTreeMap<usize, Vec<(usize, crate::linalg::Scalar)>> = BTreeMap::new();
            let mut image = Vec::new();
            for (i, c) in rep.iter() {
                if *i < np {
                    let e = offsets.partition_point(|&o| o <= *i) - 1;
                    d.entry(e).or_default().push((*i - offsets[e], c.clone()));
                } else {
                    image.push((*i - np, c.clone()));
                }
            }
            self.generators.push(FreeGenerator {
                label: format!("e{step}.{}.{count}", self.base.object_name(u)),
                object: u,
                degree: n - 1,
                d: d.into_iter().map(|(e, v)| (e, Vector::from_entries(v))).collect(),
            });
            self.images.push(Vector::from_entries(image));
            self.levels.push(step);
        }
        Ok(())
    }
}

/// Starting from zero, each step picks one object `U` and adds, for every
/// class `(p, m)` of degree `n` in `Cone(P → M)[−1]` at `U`, a generator `e`
/// at `U` of degree `n − 1` with `de = p` and `f(e) = m` (classes in order
/// of degree). The object is the one leaving the fewest classes behind,
/// ties going to the lowest index.
pub fn semi_free_resolve(module: &DgModule, bounds: ResolveBounds) -> Result<Resolution> {
    require_right(module)?;
    let b = module.base().clone();
    let mut builder = Builder { base: &b, target: module, generators: Vec::new(), images: Vec::new(), levels: Vec::new() };
    let mut steps = 0;
    for step in 1..=bounds.steps {
        let classes = builder.classes(&bounds)?;
        if classes.iter().all(|c| c.is_empty()) {
            break;
        }
        steps = step;
        let mut best: Option<(usize, usize)> = None;
        for u in 0..b.num_objects() {
            if classes[u].is_empty() {
                continue;
            }
            let mut trial = Builder {
                base: &b,
                target: module,
                generators: builder.generators.clone(),
                images: builder.images.clone(),
                levels: builder.levels.clone(),
            };
            trial.add(u, &classes[u], step)?;
            let left: usize = trial.classes(&bounds)?.iter().map(|c| c.len()).sum();
            if best.map_or(true, |(_, l)| left < l) {
                best = Some((u, left));
            }
        }
        let (u, _) = best.expect("some object has classes");
        builder.add(u, &classes[u], step)?;
    }
    let p = SemiFreeModule::new(b.clone(), builder.generators)?;
    Resolution::assemble(p, builder.images, builder.levels, module, bounds.lo, bounds.hi, steps)
}

type BarKey = (Vec<usize>, usize, Vec<usize>);

/// The bar resolution truncated at `length` bars. A generator
/// `m[b_{n−1}|…|b_1]` at `U_1` stands for the word `m ε b_{n−1} ε … b_1 ε`
/// of the total complex `⊕_n M ⊗ (k[1] ⊗ Hom)^{⊗…}` (differential by the
/// Leibniz rule with `dε = id`) placed in degree `|word| + 1`; its
/// differential is minus the positive-length part, and the augmentation is
/// the length-zero part.
pub fn bar_resolution(module: &DgModule, length: usize, lo: i32, hi: i32, cap: usize) -> Result<Resolution> {
    require_right(module)?;
    let b = module.base().clone();
    let f = b.field();
    let n_obj = b.num_objects();
    // enumerate keys level by level
    let mut keys: Vec<BarKey> = Vec::new();
    let mut frontier: Vec<BarKey> = Vec::new();
    for u in 0..n_obj {
        for m in 0..module.value(u).dim() {
            frontier.push((vec![u], m, vec![]));
        }
    }
    for level in 1..=length {
        keys.extend(frontier.iter().cloned());
        if keys.len() > cap {
            return Err(Error::CapExceeded { size: keys.len(), cap });
        }
        if level == length {
            break;
        }
        let mut next = Vec::new();
        for (objs, m, bs) in &frontier {
            let last = *objs.last().unwrap();
            for u in 0..n_obj {
                for j in 0..b.hom(u, last).dim() {
                    let mut o = objs.clone();
                    o.push(u);
                    let mut bb = bs.clone();
                    bb.push(j);
                    next.push((o, *m, bb));
                }
            }
        }
        frontier = next;
    }
    let index: BTreeMap<BarKey, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let degree_of = |(objs, m, bs): &BarKey| -> i32 {
        let mut d = module.value(objs[0]).degree(*m) - objs.len() as i32 + 1;
        for (j, bj) in bs.iter().enumerate() {
            d += b.hom(objs[j + 1], objs[j]).degree(*bj);
        }
        d
    };
    let minus = f.from_i64(-1);
    let mut generators = Vec::with_capacity(keys.len());
    let mut images = Vec::with_capacity(keys.len());
    for key in &keys {
        let (objs, m, bs) = key;
        let level = objs.len();
        let u1 = *objs.last().unwrap();
        let mm = module.value(objs[0]);
        let mut terms: BTreeMap<usize, Vector> = BTreeMap::new();
        let mut add = |target: BarKey, coeff: Vector, scalar: &crate::linalg::Scalar| {
            let e = index[&target];
            let entry = terms.entry(e).or_insert_with(Vector::zero);
            *entry = entry.add_scaled(scalar, &coeff);
        };
        let id1 = b.unit(u1).clone();
        // dm
        for (m2, c) in mm.d(*m).iter() {
            add((objs.clone(), *m2, bs.clone()), id1.clone(), &(&minus * c));
        }
        let mut exp = mm.degree(*m) as i64;
        // after m: the ε at objs[0], then b's with ε's
        for j in 0..bs.len() {
            // ε between the left letter and bs[j]
            let s = &minus * &f.sign(exp);
            if j == 0 {
                let mb = module.act(objs[1], objs[0], &Vector::unit(bs[0], f), &Vector::unit(*m, f));
                for (m2, c) in mb.iter() {
                    add((objs[1..].to_vec(), *m2, bs[1..].to_vec()), id1.clone(), &(&s * c));
                }
            } else {
                let comp = b.compose(objs[j + 1], objs[j], objs[j - 1], &Vector::unit(bs[j - 1], f), &Vector::unit(bs[j], f));
                for (c2, c) in comp.iter() {
                    let mut o = objs.clone();
                    o.remove(j);
                    let mut bb = bs.clone();
                    bb.remove(j);
                    bb[j - 1] = *c2;
                    add((o, *m, bb), id1.clone(), &(&s * c));
                }
            }
            exp -= 1;
            // d b_j
            let h = b.hom(objs[j + 1], objs[j]);
            let s = &minus * &f.sign(exp);
            for (c2, c) in h.d(bs[j]).iter() {
                let mut bb = bs.clone();
                bb[j] = *c2;
                add((objs.clone(), *m, bb), id1.clone(), &(&s * c));
            }
            exp += h.degree(bs[j]) as i64;
        }
        // the final ε
        let s = &minus * &f.sign(exp);
        let image = if level == 1 {
            Vector::unit(*m, f).scale(&f.sign(exp))
        } else {
            let lb = bs.len() - 1;
            let target = (objs[..level - 1].to_vec(), *m, bs[..lb].to_vec());
            add(target, Vector::unit(bs[lb], f), &s);
            Vector::zero()
        };
        generators.push(FreeGenerator {
            label: bar_label(&b, module, key),
            object: u1,
            degree: degree_of(key),
            d: terms.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        });
        images.push(image);
    }
    let levels = keys.iter().map(|(objs, _, _)| objs.len()).collect();
    let p = SemiFreeModule::new(b, generators)?;
    Resolution::assemble(p, images, levels, module, lo, hi, length)
}

fn bar_label(b: &TableCategory, module: &DgModule, (objs, m, bs): &BarKey) -> String {
    let mut s = module.value(objs[0]).label(*m).to_string();
    s.push('[');
    let parts: Vec<&str> = bs.iter().enumerate().map(|(j, bj)| b.hom(objs[j + 1], objs[j]).label(*bj)).collect();
    s.push_str(&parts.join("|"));
    s.push(']');
    s
}
