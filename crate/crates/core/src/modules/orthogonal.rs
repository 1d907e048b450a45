//! Right orthogonals and the cone of `LInd Res h_Y → h_Y`.

use crate::category::{TableCategory, TableFunctor, Verdict};
use crate::error::{Error, Result};
use crate::pretr::{pretr_hom, TwistedComplex};

use super::semifree::{semi_free_resolve, Resolution, ResolveBounds};
use super::{counit, is_quasi_isomorphism, restrict, yoneda, DgModule, ModuleMap, Variance};

fn check_objects(a: &TableCategory, b: &[usize]) -> Result<()> {
    if let Some(u) = b.iter().find(|&&u| u >= a.num_objects()) {
        return Err(Error::UnknownObject(format!("object index {u}")));
    }
    Ok(())
}

/// Is `M(U)` acyclic in `lo..=hi` for every `U` in `b`?
pub fn in_right_orthogonal(module: &DgModule, b: &[usize], lo: i32, hi: i32) -> Result<Verdict> {
    check_objects(module.base(), b)?;
    for &u in b {
        for m in lo..=hi {
            if module.value(u).betti(m)? != 0 {
                return Ok(Verdict::No(format!("H^{m} at {} is nonzero", module.base().object_name(u))));
            }
        }
    }
    Ok(Verdict::Yes)
}

/// Is `Hom(U, X)` acyclic in `lo..=hi` for every twisted complex `U` in `b`?
pub fn in_right_orthogonal_twisted(
    base: &TableCategory,
    x: &TwistedComplex,
    b: &[TwistedComplex],
    lo: i32,
    hi: i32,
) -> Result<Verdict> {
    for u in b {
        let h = pretr_hom(base, u, x);
        for m in lo..=hi {
            if h.complex.betti(m)? != 0 {
                return Ok(Verdict::No(format!("H^{m} Hom({}, {}) is nonzero", u.label(base), x.label(base))));
            }
        }
    }
    Ok(Verdict::Yes)
}

/// `M_Y = Cone(Ind P → h_Y)` for a semi-free resolution `P` of `Res_B h_Y`.
#[derive(Clone, Debug)]
pub struct LindResCone {
    pub module: DgModule,
    pub counit: ModuleMap,
    pub resolution: Resolution,
    /// `M_Y(U)` acyclic in the window for all `U ∈ B`.
    pub orthogonal: Verdict,
    /// `M_Y(U)` acyclic in every degree for all `U ∈ B`.
    pub orthogonal_everywhere: bool,
}

fn resolve_restriction(module: &DgModule, b: &[usize], bounds: ResolveBounds) -> Result<(TableFunctor, Resolution)> {
    check_objects(module.base(), b)?;
    let inclusion = TableFunctor::inclusion(module.base(), b);
    let restricted = restrict(&inclusion, module)?;
    let res = semi_free_resolve(&restricted, bounds)?;
    Ok((inclusion, res))
}

pub fn lind_res_cone(a: &TableCategory, y: usize, b: &[usize], bounds: ResolveBounds) -> Result<LindResCone> {
    let hy = yoneda(a, y, Variance::Right)?;
    let (inclusion, resolution) = resolve_restriction(&hy, b, bounds)?;
    let counit = counit(&inclusion, &hy, &resolution.augmentation)?;
    let module = counit.cone();
    let orthogonal = in_right_orthogonal(&module, b, bounds.lo, bounds.hi)?;
    let orthogonal_everywhere = b.iter().all(|&u| module.value(u).is_acyclic());
    Ok(LindResCone { module, counit, resolution, orthogonal, orthogonal_everywhere })
}

/// Is the counit `Ind Res M → M` (through a semi-free resolution of
/// `Res_B M`) a quasi-isomorphism in `lo..=hi`? Inconclusive unless the
/// resolution is complete.
pub fn check_induced_image(module: &DgModule, b: &[usize], bounds: ResolveBounds) -> Result<Verdict> {
    if module.variance() != Variance::Right {
        return Err(Error::VarianceMismatch("check_induced_image takes a right module".into()));
    }
    let (inclusion, res) = resolve_restriction(module, b, bounds)?;
    if !res.report.complete {
        return Ok(Verdict::Inconclusive(format!(
            "resolution not complete after {} steps",
            res.report.steps
        )));
    }
    let eps = counit(&inclusion, module, &res.augmentation)?;
    is_quasi_isomorphism(&eps, bounds.lo, bounds.hi)
}
