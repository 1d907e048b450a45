//! DG modules over Table categories.
//!
//! A right module `M` assigns a complex `M(x)` to every object and a map
//! `M(y) ⊗ Hom(x,y) → M(x)`, `m ⊗ a ↦ m·a`, with
//! `d(m·a) = dm·a + (-1)^{|m|} m·da`. A left module has `Hom(x,y) ⊗ M(x) → M(y)`
//! and `d(a·v) = da·v + (-1)^{|a|} a·dv`.

mod orthogonal;
mod semifree;

pub use orthogonal::{check_induced_image, in_right_orthogonal, in_right_orthogonal_twisted, lind_res_cone, LindResCone};

pub use semifree::{
    bar_resolution, semi_free_resolve, FreeGenerator, ResolutionReport, ResolveBounds, Resolution, SemiFreeCertificate,
    SemiFreeModule,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::category::{Axiom, TableCategory, TableFunctor, ValidationReport, Verdict};
use crate::error::{Error, Result};
use crate::linalg::sparse::accumulate;
use crate::linalg::{kernel, ChainMap, Complex, LinearMap, Scalar, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variance {
    Left,
    Right,
}

/// A DG module over a Table category, with the action stored as structure
/// constants. For `a ∈ Hom(x,y)` the action reads from `M(y)` (right) or
/// `M(x)` (left); `action[x*n+y][a*dim_in + m]` is the image of `(a, m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgModule {
    base: TableCategory,
    variance: Variance,
    values: Vec<Complex>,
    action: Vec<Vec<Vector>>,
}

impl DgModule {
    /// `act(x, y, a, m)` gives the image of basis elements `a ∈ Hom(x,y)` and
    /// `m` in the input value.
    pub fn from_fn(
        base: TableCategory,
        variance: Variance,
        values: Vec<Complex>,
        mut act: impl FnMut(usize, usize, usize, usize) -> Vector,
    ) -> Result<DgModule> {
        let n = base.num_objects();
        if values.len() != n {
            return Err(Error::Invalid("module needs one complex per object".into()));
        }
        let mut action = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let (input, output) = match variance {
                    Variance::Right => (y, x),
                    Variance::Left => (x, y),
                };
                let (da, dm, dout) = (base.hom(x, y).dim(), values[input].dim(), values[output].dim());
                let mut table = Vec::with_capacity(da * dm);
                for a in 0..da {
                    for m in 0..dm {
                        let v = act(x, y, a, m);
                        if v.max_index().map_or(false, |i| i >= dout) {
                            return Err(Error::Invalid("module action out of range".into()));
                        }
                        table.push(v);
                    }
                }
                action.push(table);
            }
        }
        Ok(DgModule { base, variance, values, action })
    }

    pub fn zero(base: &TableCategory, variance: Variance) -> DgModule {
        let values = vec![Complex::zero(base.field()); base.num_objects()];
        DgModule::from_fn(base.clone(), variance, values, |_, _, _, _| Vector::zero()).unwrap()
    }

    pub fn base(&self) -> &TableCategory {
        &self.base
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn value(&self, x: usize) -> &Complex {
        &self.values[x]
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    fn input(&self, x: usize, y: usize) -> usize {
        match self.variance {
            Variance::Right => y,
            Variance::Left => x,
        }
    }

    fn output(&self, x: usize, y: usize) -> usize {
        match self.variance {
            Variance::Right => x,
            Variance::Left => y,
        }
    }

    pub fn act_basis(&self, x: usize, y: usize, a: usize, m: usize) -> &Vector {
        let n = self.base.num_objects();
        let dm = self.values[self.input(x, y)].dim();
        &self.action[x * n + y][a * dm + m]
    }

    /// `m·a` (right) or `a·m` (left) for `a ∈ Hom(x,y)`.
    pub fn act(&self, x: usize, y: usize, a: &Vector, m: &Vector) -> Vector {
        let mut acc = BTreeMap::new();
        for (i, c) in a.iter() {
            for (j, e) in m.iter() {
                let ce = c * e;
                for (k, f) in self.act_basis(x, y, *i, *j).iter() {
                    accumulate(&mut acc, *k, &(&ce * f));
                }
            }
        }
        Vector::from_map(acc)
    }

    /// Degree, `d² = 0`, Leibniz, unit and associativity checks.
    pub fn validate(&self) -> ValidationReport {
        let b = &self.base;
        let n = b.num_objects();
        let f = b.field();
        let mut report = ValidationReport::default();
        for (x, c) in self.values.iter().enumerate() {
            if c.check_d_squared().is_err() {
                report.push(Axiom::DSquared, format!("d² ≠ 0 on the value at {}", b.object_name(x)));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let (inp, out) = (&self.values[self.input(x, y)], &self.values[self.output(x, y)]);
                let h = b.hom(x, y);
                for a in 0..h.dim() {
                    let av = Vector::unit(a, f);
                    for m in 0..inp.dim() {
                        let mv = Vector::unit(m, f);
                        let img = self.act(x, y, &av, &mv);
                        let deg = h.degree(a) + inp.degree(m);
                        if img.iter().any(|(k, _)| out.degree(*k) != deg) {
                            report.push(Axiom::Degree, format!("action of {} on {} has the wrong degree", h.label(a), inp.label(m)));
                            continue;
                        }
                        let lhs = out.apply_d(&img);
                        let rhs = match self.variance {
                            Variance::Right => self
                                .act(x, y, &av, inp.d(m))
                                .add(&self.act(x, y, h.d(a), &mv).scale(&f.sign(inp.degree(m) as i64))),
                            Variance::Left => self
                                .act(x, y, h.d(a), &mv)
                                .add(&self.act(x, y, &av, inp.d(m)).scale(&f.sign(h.degree(a) as i64))),
                        };
                        if lhs != rhs {
                            report.push(Axiom::Leibniz, format!("Leibniz fails for {} acting on {}", h.label(a), inp.label(m)));
                        }
                    }
                }
            }
        }
        for x in 0..n {
            let c = &self.values[x];
            for m in 0..c.dim() {
                let mv = Vector::unit(m, f);
                if self.act(x, x, b.unit(x), &mv) != mv {
                    report.push(Axiom::Unit, format!("identity does not act trivially on {}", c.label(m)));
                }
            }
        }
        // right: (m·a)·c = m·(a∘c) for c: w→x, a: x→y; left: c·(a·v) = (c∘a)·v for a: w→x, c: x→y
        for w in 0..n {
            for x in 0..n {
                for y in 0..n {
                    let (hc, ha) = match self.variance {
                        Variance::Right => (b.hom(w, x), b.hom(x, y)),
                        Variance::Left => (b.hom(x, y), b.hom(w, x)),
                    };
                    let inp = match self.variance {
                        Variance::Right => &self.values[y],
                        Variance::Left => &self.values[w],
                    };
                    for i in 0..ha.dim() {
                        let av = Vector::unit(i, f);
                        for j in 0..hc.dim() {
                            let cv = Vector::unit(j, f);
                            for m in 0..inp.dim() {
                                let mv = Vector::unit(m, f);
                                let (lhs, rhs) = match self.variance {
                                    Variance::Right => (
                                        self.act(w, x, &cv, &self.act(x, y, &av, &mv)),
                                        self.act(w, y, &b.compose(w, x, y, &av, &cv), &mv),
                                    ),
                                    Variance::Left => (
                                        self.act(x, y, &cv, &self.act(w, x, &av, &mv)),
                                        self.act(w, y, &b.compose(w, x, y, &cv, &av), &mv),
                                    ),
                                };
                                if lhs != rhs {
                                    report.push(
                                        Axiom::Associativity,
                                        format!("action is not associative on {}, {}, {}", inp.label(m), ha.label(i), hc.label(j)),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        report
    }

    /// `M[k]`: every value shifted; right actions are unchanged, left
    /// actions pick up `(-1)^{k|a|}`.
    pub fn shift(&self, k: i32) -> DgModule {
        let f = self.base.field();
        let values = self.values.iter().map(|c| c.shift(k)).collect();
        DgModule::from_fn(self.base.clone(), self.variance, values, |x, y, a, m| {
            let v = self.act_basis(x, y, a, m).clone();
            match self.variance {
                Variance::Right => v,
                Variance::Left => v.scale(&f.sign(k as i64 * self.base.hom(x, y).degree(a) as i64)),
            }
        })
        .unwrap()
    }

    pub fn is_acyclic_on(&self, lo: i32, hi: i32) -> Result<bool> {
        for c in &self.values {
            if !c.is_acyclic_on(lo, hi)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `M ⊕ N`.
    pub fn direct_sum(&self, other: &DgModule) -> Result<DgModule> {
        same_kind(self, other)?;
        let values: Vec<Complex> =
            self.values.iter().zip(&other.values).map(|(a, b)| a.direct_sum(b)).collect::<Result<_>>()?;
        DgModule::from_fn(self.base.clone(), self.variance, values, |x, y, a, m| {
            let inp = self.values[self.input(x, y)].dim();
            let out = self.values[self.output(x, y)].dim();
            if m < inp {
                self.act_basis(x, y, a, m).clone()
            } else {
                other.act_basis(x, y, a, m - inp).reindex(|i| i + out)
            }
        })
    }
}

fn same_kind(a: &DgModule, b: &DgModule) -> Result<()> {
    if a.variance != b.variance {
        return Err(Error::VarianceMismatch("modules of different variance".into()));
    }
    if a.base != b.base {
        return Err(Error::BaseMismatch("modules over different categories".into()));
    }
    Ok(())
}

/// The representable right module `h_y = Hom(−, y)` or left module `h̃_y = Hom(y, −)`.
pub fn yoneda(base: &TableCategory, y: usize, variance: Variance) -> Result<DgModule> {
    let n = base.num_objects();
    if y >= n {
        return Err(Error::UnknownObject(format!("object index {y}")));
    }
    let f = base.field();
    match variance {
        Variance::Right => {
            let values = (0..n).map(|z| base.hom(z, y).clone()).collect();
            DgModule::from_fn(base.clone(), variance, values, |x, z, a, m| {
                base.compose(x, z, y, &Vector::unit(m, f), &Vector::unit(a, f))
            })
        }
        Variance::Left => {
            let values = (0..n).map(|z| base.hom(y, z).clone()).collect();
            DgModule::from_fn(base.clone(), variance, values, |x, z, a, m| {
                base.compose(y, x, z, &Vector::unit(a, f), &Vector::unit(m, f))
            })
        }
    }
}

/// `M∘F` for a module `M` over the target of `F`.
pub fn restrict(functor: &TableFunctor, module: &DgModule) -> Result<DgModule> {
    if module.base != functor.target {
        return Err(Error::BaseMismatch("module is not over the target of the functor".into()));
    }
    let s = &functor.source;
    let values = (0..s.num_objects()).map(|x| module.values[functor.objects[x]].clone()).collect();
    let f = s.field();
    DgModule::from_fn(s.clone(), module.variance, values, |x, y, a, m| {
        let fa = functor.map(x, y).apply(&Vector::unit(a, f));
        module.act(functor.objects[x], functor.objects[y], &fa, &Vector::unit(m, f))
    })
}

/// The coend `G ⊗_A F`: the quotient of `⊕_x G(x) ⊗ F(x)` by the relations
/// `(g·a) ⊗ v − g ⊗ (a·v)`.
#[derive(Clone, Debug)]
pub struct CoendTensor {
    pub complex: Complex,
    /// From `⊕_x G(x) ⊗ F(x)` onto `complex`.
    pub projection: LinearMap,
    /// `g ⊗ v` with `g ∈ G(x)`, `v ∈ F(x)` sits at `offsets[x] + g*dim F(x) + v`.
    pub offsets: Vec<usize>,
    /// The standard basis element behind each basis element of `complex`.
    pub kept: Vec<usize>,
    left_dims: Vec<usize>,
}

impl CoendTensor {
    pub fn index(&self, x: usize, g: usize, v: usize) -> usize {
        self.offsets[x] + g * self.left_dims[x] + v
    }

    /// `(x, g, v)` for a standard basis index of the unreduced sum.
    pub fn locate(&self, i: usize) -> (usize, usize, usize) {
        let x = self.offsets.partition_point(|&o| o <= i) - 1;
        let r = i - self.offsets[x];
        (x, r / self.left_dims[x], r % self.left_dims[x])
    }

    /// Class of `g ⊗ v`.
    pub fn class_of(&self, x: usize, g: &Vector, v: &Vector) -> Vector {
        let mut acc = BTreeMap::new();
        for (i, a) in g.iter() {
            for (j, b) in v.iter() {
                let ab = a * b;
                for (k, c) in self.projection.columns[self.index(x, *i, *j)].iter() {
                    accumulate(&mut acc, *k, &(&ab * c));
                }
            }
        }
        Vector::from_map(acc)
    }
}

pub fn module_tensor(right: &DgModule, left: &DgModule) -> Result<CoendTensor> {
    if right.variance != Variance::Right || left.variance != Variance::Left {
        return Err(Error::VarianceMismatch("module_tensor needs a right and a left module".into()));
    }
    if right.base != left.base {
        return Err(Error::BaseMismatch("modules over different categories".into()));
    }
    let b = &right.base;
    let n = b.num_objects();
    let mut offsets = Vec::with_capacity(n);
    let mut big = Complex::zero(b.field());
    for x in 0..n {
        offsets.push(big.dim());
        big = big.direct_sum(&right.values[x].tensor(&left.values[x])?)?;
    }
    let left_dims: Vec<usize> = left.values.iter().map(|c| c.dim()).collect();
    let mut relations = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let (dfx, dfy) = (left_dims[x], left_dims[y]);
            for a in 0..b.hom(x, y).dim() {
                for g in 0..right.values[y].dim() {
                    let ga = right.act_basis(x, y, a, g);
                    for v in 0..dfx {
                        let av = left.act_basis(x, y, a, v);
                        let mut rel: Vec<(usize, Scalar)> = Vec::new();
                        for (k, c) in ga.iter() {
                            rel.push((offsets[x] + k * dfx + v, c.clone()));
                        }
                        for (k, c) in av.iter() {
                            rel.push((offsets[y] + g * dfy + k, -c.clone()));
                        }
                        let rel = Vector::from_entries(rel);
                        if !rel.is_zero() {
                            relations.push(rel);
                        }
                    }
                }
            }
        }
    }
    let (complex, projection, kept) = big.quotient_with_basis(&relations);
    Ok(CoendTensor { complex, projection, offsets, kept, left_dims })
}

/// Left adjoint of restriction. For a right module,
/// `(Ind M)(z) = M ⊗_A Hom(z, F−)` with `[m ⊗ v]·c = [m ⊗ v∘c]`; for a left
/// module, `(Ind M)(z) = Hom(F−, z) ⊗_A M` with `c·[r ⊗ v] = [c∘r ⊗ v]`.
pub fn induce(functor: &TableFunctor, module: &DgModule) -> Result<DgModule> {
    Ok(induce_with_tensors(functor, module)?.0)
}

/// [`induce`], also returning the coend presentation of each value.
pub fn induce_with_tensors(functor: &TableFunctor, module: &DgModule) -> Result<(DgModule, Vec<CoendTensor>)> {
    if module.base != functor.source {
        return Err(Error::BaseMismatch("module is not over the source of the functor".into()));
    }
    let (s, t) = (&functor.source, &functor.target);
    let f = t.field();
    let ns = s.num_objects();
    let fo = &functor.objects;
    let mut tensors = Vec::with_capacity(t.num_objects());
    for z in 0..t.num_objects() {
        let tz = match module.variance {
            Variance::Right => {
                let values = (0..ns).map(|x| t.hom(z, fo[x]).clone()).collect();
                let probe = DgModule::from_fn(s.clone(), Variance::Left, values, |x, y, a, v| {
                    t.compose(z, fo[x], fo[y], &functor.map(x, y).columns[a], &Vector::unit(v, f))
                })?;
                module_tensor(module, &probe)?
            }
            Variance::Left => {
                let values = (0..ns).map(|x| t.hom(fo[x], z).clone()).collect();
                let probe = DgModule::from_fn(s.clone(), Variance::Right, values, |x, y, a, r| {
                    t.compose(fo[x], fo[y], z, &Vector::unit(r, f), &functor.map(x, y).columns[a])
                })?;
                module_tensor(&probe, module)?
            }
        };
        tensors.push(tz);
    }
    let values = tensors.iter().map(|c| c.complex.clone()).collect();
    let induced = DgModule::from_fn(t.clone(), module.variance, values, |w, z, c, k| {
        let cv = Vector::unit(c, f);
        match module.variance {
            Variance::Right => {
                let (x, g, v) = tensors[z].locate(tensors[z].kept[k]);
                let vc = t.compose(w, z, fo[x], &Vector::unit(v, f), &cv);
                tensors[w].class_of(x, &Vector::unit(g, f), &vc)
            }
            Variance::Left => {
                let (x, r, v) = tensors[w].locate(tensors[w].kept[k]);
                let cr = t.compose(fo[x], w, z, &cv, &Vector::unit(r, f));
                tensors[z].class_of(x, &cr, &Vector::unit(v, f))
            }
        }
    })?;
    Ok((induced, tensors))
}

/// For right modules: given `ψ: P → Res_F N`, the adjoint `Ind_F P → N`,
/// `[p ⊗ v] ↦ ψ(p)·v`.
pub fn counit(functor: &TableFunctor, target: &DgModule, psi: &ModuleMap) -> Result<ModuleMap> {
    if target.variance != Variance::Right || psi.source.variance != Variance::Right {
        return Err(Error::VarianceMismatch("counit is built for right modules".into()));
    }
    let (induced, tensors) = induce_with_tensors(functor, &psi.source)?;
    let t = &functor.target;
    let f = t.field();
    let mut components = Vec::with_capacity(t.num_objects());
    for z in 0..t.num_objects() {
        let tz = &tensors[z];
        let cols = tz
            .kept
            .iter()
            .map(|&i| {
                let (x, g, v) = tz.locate(i);
                target.act(z, functor.objects[x], &Vector::unit(v, f), &psi.components[x].columns[g])
            })
            .collect::<Vec<_>>();
        components.push(LinearMap { source_dim: cols.len(), target_dim: target.values[z].dim(), degree: 0, columns: cols });
    }
    ModuleMap::new(induced, target.clone(), components)
}

/// A closed degree-0 morphism of modules, one linear map per object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    source: DgModule,
    target: DgModule,
    components: Vec<LinearMap>,
}

impl ModuleMap {
    /// Checks shape, degree, compatibility with `d` and with the actions.
    pub fn new(source: DgModule, target: DgModule, components: Vec<LinearMap>) -> Result<ModuleMap> {
        same_kind(&source, &target)?;
        let b = &source.base;
        let n = b.num_objects();
        let f = b.field();
        if components.len() != n {
            return Err(Error::Invalid("module map needs one component per object".into()));
        }
        for x in 0..n {
            let (s, t, phi) = (&source.values[x], &target.values[x], &components[x]);
            if phi.source_dim != s.dim() || phi.target_dim != t.dim() {
                return Err(Error::Invalid(format!("component at {} has the wrong shape", b.object_name(x))));
            }
            ChainMap::new(s.clone(), t.clone(), phi.clone())?;
        }
        for x in 0..n {
            for y in 0..n {
                let (inp, out) = (source.input(x, y), source.output(x, y));
                for a in 0..b.hom(x, y).dim() {
                    let av = Vector::unit(a, f);
                    for m in 0..source.values[inp].dim() {
                        let lhs = components[out].apply(source.act_basis(x, y, a, m));
                        let rhs = target.act(x, y, &av, &components[inp].columns[m]);
                        if lhs != rhs {
                            return Err(Error::NotClosed(format!(
                                "module map does not commute with the action of {}",
                                b.hom(x, y).label(a)
                            )));
                        }
                    }
                }
            }
        }
        Ok(ModuleMap { source, target, components })
    }

    pub fn identity(m: &DgModule) -> ModuleMap {
        let f = m.base.field();
        let components = m.values.iter().map(|c| LinearMap::identity(c.dim(), f)).collect();
        ModuleMap { source: m.clone(), target: m.clone(), components }
    }

    pub fn zero(source: &DgModule, target: &DgModule) -> Result<ModuleMap> {
        let components = source.values.iter().zip(&target.values).map(|(s, t)| LinearMap::zero(s.dim(), t.dim(), 0)).collect();
        ModuleMap::new(source.clone(), target.clone(), components)
    }

    pub fn source(&self) -> &DgModule {
        &self.source
    }

    pub fn target(&self) -> &DgModule {
        &self.target
    }

    pub fn component(&self, x: usize) -> &LinearMap {
        &self.components[x]
    }

    pub fn chain_map(&self, x: usize) -> ChainMap {
        ChainMap::new(self.source.values[x].clone(), self.target.values[x].clone(), self.components[x].clone()).unwrap()
    }

    /// `Cone(φ) = N ⊕ M[1]` objectwise; the action on the `M[1]` part is that
    /// of `M[1]`.
    pub fn cone(&self) -> DgModule {
        let b = &self.source.base;
        let values: Vec<Complex> = (0..b.num_objects()).map(|x| self.chain_map(x).cone()).collect();
        let shifted = self.source.shift(1);
        let t = &self.target;
        DgModule::from_fn(b.clone(), t.variance, values, |x, y, a, m| {
            let (inp, out) = (t.input(x, y), t.output(x, y));
            let (ti, to) = (t.values[inp].dim(), t.values[out].dim());
            if m < ti {
                t.act_basis(x, y, a, m).clone()
            } else {
                shifted.act_basis(x, y, a, m - ti).reindex(|i| i + to)
            }
        })
        .unwrap()
    }
}

/// Per object: is the cone of `φ` acyclic in degrees `lo..=hi`?
pub fn is_quasi_isomorphism(phi: &ModuleMap, lo: i32, hi: i32) -> Result<Verdict> {
    let b = &phi.source.base;
    for x in 0..b.num_objects() {
        let cone = phi.chain_map(x).cone();
        for m in lo..=hi {
            if cone.betti(m)? != 0 {
                return Ok(Verdict::No(format!("cone is not acyclic at {} in degree {m}", b.object_name(x))));
            }
        }
    }
    Ok(Verdict::Yes)
}

/// The complex of module morphisms `Hom(M, N)`: the subcomplex of
/// `⊕_z Hom_k(M(z), N(z))` cut out by naturality, `φ(m·a) = φ(m)·a` for right
/// modules and `φ(a·v) = (-1)^{|φ||a|} a·φ(v)` for left modules.
#[derive(Clone, Debug)]
pub struct ModuleHom {
    pub complex: Complex,
    /// Inclusion into `⊕_z Hom_k(M(z), N(z))`.
    pub inclusion: LinearMap,
    pub offsets: Vec<usize>,
    dims: Vec<(usize, usize)>,
}

impl ModuleHom {
    /// The component at `z` of an element of `complex`.
    pub fn component(&self, v: &Vector, z: usize) -> LinearMap {
        let big = self.inclusion.apply(v);
        let (dm, dn) = self.dims[z];
        let local = big.filter_map_index(|i| {
            (i >= self.offsets[z] && i < self.offsets[z] + dm * dn).then(|| i - self.offsets[z])
        });
        let deg = v.leading().map(|i| self.complex.degree(i)).unwrap_or(0);
        LinearMap::from_hom_vector(&local, dm, dn, deg)
    }
}

pub fn module_hom(source: &DgModule, target: &DgModule) -> Result<ModuleHom> {
    same_kind(source, target)?;
    let b = &source.base;
    let n = b.num_objects();
    let f = b.field();
    let mut offsets = Vec::with_capacity(n);
    let mut dims = Vec::with_capacity(n);
    let mut big = Complex::zero(f);
    for z in 0..n {
        offsets.push(big.dim());
        dims.push((source.values[z].dim(), target.values[z].dim()));
        big = big.direct_sum(&source.values[z].hom(&target.values[z])?)?;
    }
    // constraint rows: block per (x, y, a, m) of size dim(output value)
    let mut row_offsets = BTreeMap::new();
    let mut rows = 0usize;
    for x in 0..n {
        for y in 0..n {
            let (inp, out) = (source.input(x, y), source.output(x, y));
            for a in 0..b.hom(x, y).dim() {
                for m in 0..source.values[inp].dim() {
                    row_offsets.insert((x, y, a, m), rows);
                    rows += target.values[out].dim();
                }
            }
        }
    }
    let mut columns: Vec<Vector> = Vec::with_capacity(big.dim());
    for z in 0..n {
        let (dm, dn) = dims[z];
        for p in 0..dm {
            for q in 0..dn {
                let deg = target.values[z].degree(q) - source.values[z].degree(p);
                let eq = Vector::unit(q, f);
                let mut acc = BTreeMap::new();
                for x in 0..n {
                    for y in 0..n {
                        let (inp, out) = (source.input(x, y), source.output(x, y));
                        let h = b.hom(x, y);
                        for a in 0..h.dim() {
                            // φ applied after the action
                            if out == z {
                                for m in 0..source.values[inp].dim() {
                                    if let Some(c) = source.act_basis(x, y, a, m).get(p) {
                                        let r = row_offsets[&(x, y, a, m)];
                                        accumulate(&mut acc, r + q, c);
                                    }
                                }
                            }
                            // the action after φ
                            if inp == z {
                                let r = row_offsets[&(x, y, a, p)];
                                let mut s = -f.one();
                                if source.variance == Variance::Left {
                                    s = &s * &f.sign(deg as i64 * h.degree(a) as i64);
                                }
                                for (k, c) in target.act(x, y, &Vector::unit(a, f), &eq).iter() {
                                    accumulate(&mut acc, r + k, &(&s * c));
                                }
                            }
                        }
                    }
                }
                columns.push(Vector::from_map(acc));
            }
        }
    }
    let mut generators = Vec::new();
    let (lo, hi) = big.degree_range().unwrap_or((0, -1));
    for deg in lo..=hi {
        let idx = big.indices_in_degree(deg);
        let cols: Vec<Vector> = idx.iter().map(|&i| columns[i].clone()).collect();
        for k in kernel(&cols, f) {
            generators.push((k.reindex(|j| idx[j]), deg));
        }
    }
    let (complex, inclusion) = big.subcomplex(&generators)?;
    Ok(ModuleHom { complex, inclusion, offsets, dims })
}
