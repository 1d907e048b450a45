//! The cone formula, the orthogonal-module route and the cross-checker.

use serde::{Deserialize, Serialize};

use crate::category::{ExtEntry, ExtTable, FiltrationProfile, Status, TableCategory, TableFunctor, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{ChainMap, Complex, LinearMap, Vector};
use crate::modules::{
    bar_resolution, lind_res_cone, module_hom, restrict, semi_free_resolve, yoneda, Resolution, ResolveBounds,
    Variance,
};

use super::{drinfeld_quotient, quotient_ext, ExtBounds, Route};

fn normalize(a: &TableCategory, b: &[usize]) -> Result<Vec<usize>> {
    if let Some(u) = b.iter().find(|&&u| u >= a.num_objects()) {
        return Err(Error::UnknownObject(format!("object index {u} is not in A")));
    }
    let mut b = b.to_vec();
    b.sort_unstable();
    b.dedup();
    Ok(b)
}

fn max_degree(c: &Complex) -> Option<i32> {
    c.degrees().iter().copied().max()
}

/// Largest degree of `Hom(U, U')` over `U, U' ∈ B`.
fn beta(a: &TableCategory, b: &[usize]) -> Option<i32> {
    b.iter().flat_map(|&u| b.iter().map(move |&v| (u, v))).filter_map(|(u, v)| max_degree(a.hom(u, v))).max()
}

/// Upgrades every degree `m ≥ from` to certified.
fn certify_from(table: &mut ExtTable, from: i32) {
    for (m, e) in table.entries.iter_mut() {
        if *m >= from && !matches!(e.status, Status::Exact) {
            e.status = Status::Certified;
        }
    }
}

/// `T = ⊕_e e ⊗ Hom_A(X, U_e)` with `d(e⊗v) = Σ e'⊗(c∘v) + (−1)^{|e|} e⊗dv`
/// and the evaluation `e⊗v ↦ f(e)∘v` into `Hom_A(X,Y)`; returns the cone of
/// the evaluation and the filtration level of each of its basis elements.
fn evaluation_cone(a: &TableCategory, b: &[usize], x: usize, y: usize, res: &Resolution) -> Result<(Complex, Vec<usize>)> {
    let f = a.field();
    let gens = res.module.generators();
    let mut offsets = Vec::with_capacity(gens.len());
    let mut basis = Vec::new();
    for g in gens {
        offsets.push(basis.len());
        let h = a.hom(x, b[g.object]);
        for j in 0..h.dim() {
            basis.push((format!("{}⊗{}", g.label, h.label(j)), g.degree + h.degree(j)));
        }
    }
    let mut d = Vec::with_capacity(basis.len());
    let mut ev = Vec::with_capacity(basis.len());
    let mut levels = vec![0; a.hom(x, y).dim()];
    for (k, g) in gens.iter().enumerate() {
        let u = b[g.object];
        let h = a.hom(x, u);
        let sign = f.sign(g.degree as i64);
        for j in 0..h.dim() {
            let v = Vector::unit(j, f);
            let mut col = h.d(j).scale(&sign).reindex(|i| i + offsets[k]);
            for (e, c) in &g.d {
                let w = b[gens[*e].object];
                col = col.add(&a.compose(x, u, w, c, &v).reindex(|i| i + offsets[*e]));
            }
            d.push(col);
            ev.push(a.compose(x, u, y, &res.images[k], &v));
            levels.push(res.levels[k]);
        }
    }
    let t = Complex::new(f, basis, d)?;
    let map = LinearMap { source_dim: t.dim(), target_dim: a.hom(x, y).dim(), degree: 0, columns: ev };
    let cm = ChainMap::new(t, a.hom(x, y).clone(), map)?;
    Ok((cm.cone(), levels))
}

/// `H(Cone(h_Y ⊗^L_B h̃_X → Hom_A(X,Y)))`, the derived tensor taken through a
/// resolution of `Res_B h_Y`. Exact when the resolution is complete or every
/// `Hom_A(X,U)`, `U ∈ B`, is acyclic; degrees that no further generator can
/// reach are certified when the Homs inside `B` sit in degrees `≤ 0`; the
/// rest carry the stabilization flags of the tower over resolution levels.
pub fn cone_formula_ext(a: &TableCategory, b: &[usize], x: usize, y: usize, bounds: &ExtBounds) -> Result<ExtTable> {
    let b = normalize(a, b)?;
    let (lo, hi) = (bounds.lo, bounds.hi);
    if b.is_empty() {
        return ExtTable::exact_from(a.hom(x, y), lo, hi);
    }
    let incl = TableFunctor::inclusion(a, &b);
    let m = restrict(&incl, &yoneda(a, y, Variance::Right)?)?;
    let res = match bounds.route {
        Route::SemiFree => semi_free_resolve(&m, ResolveBounds { steps: bounds.steps, lo, hi, all_degrees: true })?,
        Route::Bar => bar_resolution(&m, bounds.max_level.max(1), lo, hi, bounds.cap)?,
    };
    let (cone, levels) = evaluation_cone(a, &b, x, y, &res)?;
    let dhi = b.iter().filter_map(|&u| max_degree(a.hom(x, u))).max();
    let Some(dhi) = dhi else { return ExtTable::exact_from(&cone, lo, hi) };
    if res.report.complete || b.iter().all(|&u| a.hom(x, u).is_acyclic()) {
        return ExtTable::exact_from(&cone, lo, hi);
    }
    let top = res.max_level();
    let mut table = FiltrationProfile::compute(&cone, &levels, lo, hi, top).to_table(bounds.stable);
    for m in lo..=hi {
        let reps = cone.cohomology(m)?.representatives.iter().map(|v| cone.format_vector(v)).collect();
        table.entries.get_mut(&m).expect("degree in window").representatives = reps;
    }
    if beta(a, &b).map_or(true, |d| d <= 0) {
        // largest degree of a generator the resolution could still add
        let g_max = match bounds.route {
            Route::SemiFree => res.report.acyclic_from.map(|l| l - 2),
            Route::Bar => (0..b.len()).filter_map(|u| max_degree(m.value(u))).max().map(|mh| mh - top as i32),
        };
        if let Some(g) = g_max {
            certify_from(&mut table, g + dhi + 1);
        }
    }
    Ok(table)
}

#[derive(Clone, Debug)]
pub struct VerdierExt {
    pub table: ExtTable,
    /// The `B^⊥` certificate on the window.
    pub orthogonal: Verdict,
    pub authoritative: bool,
}

/// `H(Hom(h_X, M_Y))` for `M_Y = Cone(LInd Res h_Y → h_Y)`.
pub fn verdier_ext_via_orthogonal(a: &TableCategory, b: &[usize], x: usize, y: usize, bounds: &ExtBounds) -> Result<VerdierExt> {
    let b = normalize(a, b)?;
    let (lo, hi) = (bounds.lo, bounds.hi);
    let lrc = lind_res_cone(a, y, &b, ResolveBounds { steps: bounds.steps, lo, hi, all_degrees: true })?;
    let hx = yoneda(a, x, Variance::Right)?;
    let hom = module_hom(&hx, &lrc.module)?;
    let mut table = ExtTable::exact_from(&hom.complex, lo, hi)?;
    if !lrc.orthogonal_everywhere {
        for e in table.entries.values_mut() {
            e.status = Status::Unstable;
        }
        let dhi = b.iter().filter_map(|&u| max_degree(a.hom(x, u))).max();
        if beta(a, &b).map_or(true, |d| d <= 0) {
            if let (Some(l), Some(dhi)) = (lrc.resolution.report.acyclic_from, dhi) {
                certify_from(&mut table, l - 2 + dhi + 1);
            }
        }
    }
    let authoritative = lrc.orthogonal.is_yes();
    Ok(VerdierExt { table, orthogonal: lrc.orthogonal, authoritative })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Truncation,
    Cone,
    Verdier,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: i32,
    pub truncation: ExtEntry,
    pub cone: ExtEntry,
    pub verdier: ExtEntry,
    /// The value of the most authoritative certified pipeline.
    pub dim: Option<usize>,
    pub authority: Option<Pipeline>,
    /// Two certified pipelines disagree.
    pub discrepancy: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub x: usize,
    pub y: usize,
    pub verdier_authoritative: bool,
    pub degrees: Vec<DegreeReport>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub pairs: Vec<PairReport>,
}

impl CrossCheckReport {
    /// `(x, y, degree)` of every discrepancy.
    pub fn discrepancies(&self) -> Vec<(usize, usize, i32)> {
        self.pairs
            .iter()
            .flat_map(|p| p.degrees.iter().filter(|d| d.discrepancy).map(move |d| (p.x, p.y, d.degree)))
            .collect()
    }

    pub fn table(&self, x: usize, y: usize) -> Option<&PairReport> {
        self.pairs.iter().find(|p| p.x == x && p.y == y)
    }
}

/// Runs the three pipelines on each pair; `pairs = None` means all pairs.
pub fn cross_check(a: &TableCategory, b: &[usize], pairs: Option<&[(usize, usize)]>, bounds: &ExtBounds) -> Result<CrossCheckReport> {
    let all: Vec<(usize, usize)>;
    let pairs = match pairs {
        Some(p) => p,
        None => {
            let n = a.num_objects();
            all = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
            &all
        }
    };
    let q = drinfeld_quotient(a, b)?;
    let mut report = CrossCheckReport::default();
    for &(x, y) in pairs {
        let t1 = quotient_ext(&q, x, y, bounds)?;
        let t2 = cone_formula_ext(a, b, x, y, bounds)?;
        let v = verdier_ext_via_orthogonal(a, b, x, y, bounds)?;
        let mut degrees = Vec::new();
        for m in bounds.lo..=bounds.hi {
            let (e1, e2, e3) = (&t1.entries[&m], &t2.entries[&m], &v.table.entries[&m]);
            let ranked = [(Pipeline::Verdier, e3, v.authoritative), (Pipeline::Cone, e2, true), (Pipeline::Truncation, e1, true)];
            let certified: Vec<(Pipeline, usize)> =
                ranked.iter().filter(|(_, e, ok)| *ok && e.status.is_certified()).map(|(p, e, _)| (*p, e.dim)).collect();
            let discrepancy = certified.windows(2).any(|w| w[0].1 != w[1].1);
            degrees.push(DegreeReport {
                degree: m,
                truncation: e1.clone(),
                cone: e2.clone(),
                verdier: e3.clone(),
                dim: certified.first().map(|c| c.1),
                authority: certified.first().map(|c| c.0),
                discrepancy,
            });
        }
        report.pairs.push(PairReport { x, y, verdier_authoritative: v.authoritative, degrees });
    }
    Ok(report)
}
