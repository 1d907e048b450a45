//! The quotient-property checker and the arrow-with-cone example.

use std::collections::BTreeMap;

use crate::category::functor::essentially_surjective;
use crate::category::{TableCategory, TableFunctor, Verdict};
use crate::error::Result;
use crate::examples::{a0_to, cone_instance, i2, j_broken, ConeInstance};
use crate::linalg::{Field, Vector};
use crate::modules::{check_induced_image, restrict, yoneda, ModuleMap, ResolveBounds, Variance};
use crate::pretr::extend_functor;

/// Is `ξ: A → C` a DG quotient of `A` by `B`? Checks that every `ξ(U)`,
/// `U ∈ B`, is contractible, that `Ho(ξ)` is essentially surjective, and
/// that for every `Y` the cone of `h_Y → ξ^* h_{ξY}` is induced from `B`.
pub fn is_dg_quotient(xi: &TableFunctor, b: &[usize], bounds: ResolveBounds) -> Result<Verdict> {
    let (a, c) = (&xi.source, &xi.target);
    for &u in b {
        let v = xi.objects[u];
        if !c.hom(v, v).is_acyclic() {
            return Ok(Verdict::No(format!(
                "(a) the image {} of {} is not contractible",
                c.object_name(v),
                a.object_name(u)
            )));
        }
    }
    if let Err(w) = essentially_surjective(&xi.objects, c) {
        return Ok(Verdict::Inconclusive(format!("(b) {w}")));
    }
    let mut inconclusive = None;
    for y in 0..a.num_objects() {
        let hy = yoneda(a, y, Variance::Right)?;
        let pulled = restrict(xi, &yoneda(c, xi.objects[y], Variance::Right)?)?;
        let components = (0..a.num_objects()).map(|x| xi.map(x, y).clone()).collect();
        let n = ModuleMap::new(hy, pulled, components)?.cone();
        match check_induced_image(&n, b, bounds)? {
            Verdict::Yes => {}
            Verdict::No(w) => {
                return Ok(Verdict::No(format!("(c) the cone at {} is not induced from B: {w}", a.object_name(y))))
            }
            Verdict::Inconclusive(w) => {
                inconclusive.get_or_insert(format!("(c) at {}: {w}", a.object_name(y)));
            }
        }
    }
    Ok(inconclusive.map_or(Verdict::Yes, Verdict::Inconclusive))
}

/// Expected Ext of the quotient between two of its objects: dimension per
/// degree and the label of a morphism whose class spans the degree-0 part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedExt {
    pub dims: BTreeMap<i32, usize>,
    pub generator: &'static str,
}

#[derive(Clone, Debug)]
pub struct I2Example {
    pub instance: ConeInstance,
    /// `{X1, X2, Cone f}` inside `A₀^pretr`.
    pub a: TableCategory,
    /// `{Cone f}`.
    pub b: Vec<usize>,
    /// Keyed by `(x, y)` for `x, y ∈ {X1, X2}`.
    pub expected: BTreeMap<(usize, usize), ExpectedExt>,
}

pub fn build_example_i2(field: Field, lo: i32, hi: i32) -> I2Example {
    let instance = cone_instance(field);
    let a = instance.category.clone();
    let b = vec![instance.cone_index];
    let mut expected = BTreeMap::new();
    for (x, y, generator) in [(0, 0, "id"), (0, 1, "f"), (1, 0, "f⁻¹"), (1, 1, "id")] {
        let dims = (lo..=hi).map(|m| (m, usize::from(m == 0))).collect();
        expected.insert((x, y), ExpectedExt { dims, generator });
    }
    I2Example { instance, a, b, expected }
}

/// `A → I₂`-side functor (`f ↦ f`) and the broken `A → J_b` one (`f ↦ 0`),
/// both extended to `{X1, X2, Cone f}`.
pub fn i2_functors(field: Field) -> Result<(TableFunctor, TableFunctor)> {
    let inst = cone_instance(field);
    let t = i2(field);
    let good = extend_functor(&a0_to(field, &t, Vector::unit(0, field))?, &inst.objects)?.2;
    let j = j_broken(field);
    let broken = extend_functor(&a0_to(field, &j, Vector::zero())?, &inst.objects)?.2;
    Ok((good, broken))
}
