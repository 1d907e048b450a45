//! Drinfeld quotients `A/B` of Table categories and their Ext groups.

mod check;
mod pipelines;
pub mod random;

pub use check::{build_example_i2, i2_functors, is_dg_quotient, ExpectedExt, I2Example};
pub use pipelines::{
    cone_formula_ext, cross_check, verdier_ext_via_orthogonal, CrossCheckReport, DegreeReport, PairReport, Pipeline,
    VerdierExt,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::category::{ExtTable, Status, FiltrationProfile, FreeCategory, FreeElem, Generator, TableCategory, TruncatedHom, Word};
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Resolution route for the cone formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    SemiFree,
    Bar,
}

/// Bounds shared by the three Ext pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtBounds {
    pub lo: i32,
    pub hi: i32,
    /// Largest number of `ε` letters (pipeline 1) or bars (bar route).
    pub max_level: usize,
    /// Consecutive isomorphic comparison maps needed to call a degree stable.
    pub stable: usize,
    /// Steps of the semi-free resolution.
    pub steps: usize,
    /// Largest basis materialized.
    pub cap: usize,
    pub route: Route,
}

impl Default for ExtBounds {
    fn default() -> Self {
        ExtBounds { lo: -3, hi: 3, max_level: 8, stable: 2, steps: 8, cap: 200_000, route: Route::SemiFree }
    }
}

/// `A` with a free generator `ε_U: U → U` of degree −1, `dε_U = id_U`, for
/// every `U ∈ B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientCategory {
    a: TableCategory,
    b: Vec<usize>,
    free: FreeCategory,
}

pub fn drinfeld_quotient(a: &TableCategory, b: &[usize]) -> Result<QuotientCategory> {
    if let Some(u) = b.iter().find(|&&u| u >= a.num_objects()) {
        return Err(Error::UnknownObject(format!("object index {u} is not in A")));
    }
    let mut b = b.to_vec();
    b.sort_unstable();
    b.dedup();
    let gens = b
        .iter()
        .map(|&u| {
            let mut d = FreeElem::zero();
            for (i, c) in a.unit(u).iter() {
                d.add_term(Word { source: u, target: u, gens: vec![], base: vec![*i] }, c);
            }
            Generator { name: format!("ε_{}", a.object_name(u)), source: u, target: u, degree: -1, d }
        })
        .collect();
    let free = FreeCategory::new(a.clone(), gens)?;
    Ok(QuotientCategory { a: a.clone(), b, free })
}

impl QuotientCategory {
    pub fn base(&self) -> &TableCategory {
        &self.a
    }

    pub fn subcategory(&self) -> &[usize] {
        &self.b
    }

    pub fn presentation(&self) -> &FreeCategory {
        &self.free
    }

    fn max_degree(&self, s: usize, t: usize) -> Option<i32> {
        self.a.hom(s, t).degrees().iter().copied().max()
    }

    /// First degree that words with more than `level` letters `ε` cannot
    /// affect, when every Hom inside `B` sits in degrees `≤ 0`.
    fn truncation_safe_from(&self, x: usize, y: usize, level: usize) -> Option<i32> {
        let b = &self.b;
        let beta = b.iter().flat_map(|&u| b.iter().map(move |&v| (u, v))).filter_map(|(u, v)| self.max_degree(u, v)).max();
        if beta.map_or(false, |d| d > 0) {
            return None;
        }
        let dx = b.iter().filter_map(|&u| self.max_degree(x, u)).max()?;
        let dy = b.iter().filter_map(|&u| self.max_degree(u, y)).max()?;
        Some(dx + dy - level as i32 + 1)
    }

    /// Every graded piece `Hom^n(X,Y)`, `n ≥ 1`, is acyclic: no chain
    /// `X → U_1 → … → U_n → Y` through `B` has only non-acyclic factors.
    pub fn graded_pieces_acyclic(&self, x: usize, y: usize) -> bool {
        let live = |s: usize, t: usize| !self.a.hom(s, t).is_acyclic();
        let mut reached: Vec<usize> = self.b.iter().copied().filter(|&u| live(x, u)).collect();
        let mut k = 0;
        while k < reached.len() {
            let u = reached[k];
            for &v in &self.b {
                if !reached.contains(&v) && live(u, v) {
                    reached.push(v);
                }
            }
            k += 1;
        }
        !reached.iter().any(|&u| live(u, y))
    }
}

/// The truncation `F_N = ⊕_{n ≤ N} Hom^n(X,Y)` restricted to a degree window.
#[derive(Clone, Debug)]
pub struct FilteredHom {
    pub hom: TruncatedHom,
    pub lo: i32,
    pub hi: i32,
}

impl FilteredHom {
    pub fn level_count(&self, n: usize, degree: i32) -> usize {
        self.hom
            .levels
            .iter()
            .zip(self.hom.complex.degrees())
            .filter(|(l, d)| **l == n && **d == degree)
            .count()
    }

    /// Compares the word count of every level and degree with the tensor
    /// formula for the graded pieces.
    pub fn check_graded_dimensions(&self, q: &QuotientCategory) -> std::result::Result<(), String> {
        for n in 0..=self.hom.max_weight {
            let expected = graded_dimensions(q, self.hom.source, self.hom.target, n);
            for m in self.lo..=self.hi {
                let want = expected.get(&m).copied().unwrap_or(0);
                let got = self.level_count(n, m);
                if want != got {
                    return Err(format!("level {n}, degree {m}: {got} words, formula gives {want}"));
                }
            }
        }
        Ok(())
    }
}

/// Degree → dimension of `Hom(U_n,Y) ⊗ k[1] ⊗ … ⊗ k[1] ⊗ Hom(X,U_1)` summed over
/// tuples in `B`.
pub fn graded_dimensions(q: &QuotientCategory, x: usize, y: usize, n: usize) -> BTreeMap<i32, usize> {
    type Poly = BTreeMap<i32, usize>;
    let poly = |s: usize, t: usize| -> Poly {
        let mut p = Poly::new();
        for &d in q.a.hom(s, t).degrees() {
            *p.entry(d).or_default() += 1;
        }
        p
    };
    let mul = |p: &Poly, r: &Poly, shift: i32| -> Poly {
        let mut out = Poly::new();
        for (a, x) in p {
            for (b, y) in r {
                *out.entry(a + b + shift).or_default() += x * y;
            }
        }
        out
    };
    let add = |into: &mut Poly, p: Poly| {
        for (k, v) in p {
            *into.entry(k).or_default() += v;
        }
    };
    if n == 0 {
        return poly(x, y);
    }
    let mut cur: BTreeMap<usize, Poly> = q.b.iter().map(|&u| (u, poly(x, u))).collect();
    for _ in 1..n {
        let mut next: BTreeMap<usize, Poly> = BTreeMap::new();
        for &v in &q.b {
            let mut acc = Poly::new();
            for (&u, p) in &cur {
                add(&mut acc, mul(p, &poly(u, v), -1));
            }
            next.insert(v, acc);
        }
        cur = next;
    }
    let mut out = Poly::new();
    for (&u, p) in &cur {
        add(&mut out, mul(p, &poly(u, y), -1));
    }
    out.retain(|_, v| *v > 0);
    out
}

/// `F_N` on degrees `lo..=hi`, with `d² = 0` asserted.
pub fn quotient_hom_truncated(q: &QuotientCategory, x: usize, y: usize, level: usize, lo: i32, hi: i32, cap: usize) -> Result<FilteredHom> {
    let hom = q.free.hom_truncated(x, y, level, Some((lo, hi)), cap)?;
    if let Err(j) = hom.complex.check_d_squared() {
        return Err(Error::DSquaredNonzero(format!("on {}", hom.complex.label(j))));
    }
    Ok(FilteredHom { hom, lo, hi })
}

/// Ext of the quotient from the word filtration. When every graded piece
/// of positive level is acyclic the answer is `H(Hom_A(X,Y))`, exactly;
/// otherwise `H^m(F_N)` for `N ≤ max_level` with the comparison maps decides
/// stability.
pub fn quotient_ext(q: &QuotientCategory, x: usize, y: usize, bounds: &ExtBounds) -> Result<ExtTable> {
    if q.graded_pieces_acyclic(x, y) {
        return ExtTable::exact_from(q.a.hom(x, y), bounds.lo, bounds.hi);
    }
    let f = quotient_hom_truncated(q, x, y, bounds.max_level, bounds.lo - 1, bounds.hi + 1, bounds.cap)?;
    let c = &f.hom.complex;
    let profile = FiltrationProfile::compute(c, &f.hom.levels, bounds.lo, bounds.hi, bounds.max_level);
    let mut table = profile.to_table(bounds.stable);
    for m in bounds.lo..=bounds.hi {
        let reps = c.cohomology(m)?.representatives.iter().map(|v| c.format_vector(v)).collect();
        if let Some(e) = table.entries.get_mut(&m) {
            e.representatives = reps;
        }
    }
    // With the Homs inside B in degrees ≤ 0, a word with n letters ε has
    // degree at most dX + dY − n, so words past the truncation cannot reach
    // degrees m ≥ dX + dY − N + 1.
    if let Some(from) = q.truncation_safe_from(x, y, bounds.max_level) {
        for (m, e) in table.entries.iter_mut() {
            if *m >= from {
                e.status = Status::Certified;
            }
        }
    }
    Ok(table)
}

/// Whether `v ∈ Hom_A(X,Y)` (closed, homogeneous) is still a nonzero class in
/// `F_N`; for `N` past stabilization this is its class in the quotient.
pub fn class_survives(q: &QuotientCategory, x: usize, y: usize, v: &Vector, level: usize, cap: usize) -> Result<bool> {
    let Some(deg) = q.a.degree_of(x, y, v) else { return Ok(false) };
    if q.graded_pieces_acyclic(x, y) {
        return Ok(!q.a.hom(x, y).is_coboundary(v, deg));
    }
    let f = quotient_hom_truncated(q, x, y, level, deg - 1, deg + 1, cap)?;
    let mut elem = FreeElem::zero();
    for (i, c) in v.iter() {
        elem.add_term(Word { source: x, target: y, gens: vec![], base: vec![*i] }, c);
    }
    let w = f.hom.vector_of(&elem).ok_or_else(|| Error::Invalid("element is not in the truncation".into()))?;
    Ok(!f.hom.complex.is_coboundary(&w, deg))
}
