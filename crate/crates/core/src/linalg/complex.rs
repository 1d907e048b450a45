//! Finite cochain complexes over an exact field.
//!
//! A [`Complex`] is a graded vector space with a fixed basis and a degree +1
//! differential stored column by column. A complex may be *windowed*: only
//! the degrees `lo..=hi` are materialized and the differential out of degree
//! `hi` is not recorded, so cohomology is only meaningful on `lo+1..=hi-1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::field::{Field, Scalar};
use super::sparse::{kernel, rank, solve, Echelon, Insert, Vector};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    field: Field,
    labels: Vec<String>,
    degrees: Vec<i32>,
    differential: Vec<Vector>,
    window: Option<(i32, i32)>,
}

/// Cohomology in one degree, with cocycle representatives spanning a
/// complement of the coboundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cohomology {
    pub degree: i32,
    pub dim: usize,
    pub representatives: Vec<Vector>,
}

impl Complex {
    /// Builds a complex, checking that `d` raises degree by one. `d∘d = 0`
    /// is not checked here; see [`Complex::check_d_squared`].
    pub fn new(field: Field, basis: Vec<(String, i32)>, differential: Vec<Vector>) -> Result<Self> {
        let (labels, degrees): (Vec<_>, Vec<_>) = basis.into_iter().unzip();
        let c = Complex { field, labels, degrees, differential, window: None };
        c.check_shape()?;
        Ok(c)
    }

    pub(crate) fn from_parts(
        field: Field,
        labels: Vec<String>,
        degrees: Vec<i32>,
        differential: Vec<Vector>,
        window: Option<(i32, i32)>,
    ) -> Self {
        let c = Complex { field, labels, degrees, differential, window };
        debug_assert!(c.check_shape().is_ok());
        c
    }

    pub fn zero(field: Field) -> Self {
        Complex { field, labels: vec![], degrees: vec![], differential: vec![], window: None }
    }

    /// One basis vector in the given degree.
    pub fn ground(field: Field, degree: i32) -> Self {
        Complex::from_parts(field, vec!["1".into()], vec![degree], vec![Vector::zero()], None)
    }

    fn check_shape(&self) -> Result<()> {
        if self.differential.len() != self.degrees.len() {
            return Err(Error::Invalid("differential must have one column per basis element".into()));
        }
        for (j, col) in self.differential.iter().enumerate() {
            for (i, c) in col.iter() {
                if *i >= self.degrees.len() {
                    return Err(Error::Invalid(format!("differential index {i} out of range")));
                }
                if !self.field.contains(c) {
                    return Err(Error::FieldMismatch(self.field.spec(), c.field().spec()));
                }
                if self.degrees[*i] != self.degrees[j] + 1 {
                    return Err(Error::DegreeMismatch(format!(
                        "d({}) has a component on {} of degree {} (expected {})",
                        self.labels[j], self.labels[*i], self.degrees[*i], self.degrees[j] + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn with_window(mut self, lo: i32, hi: i32) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn window(&self) -> Option<(i32, i32)> {
        self.window
    }

    pub fn d(&self, i: usize) -> &Vector {
        &self.differential[i]
    }

    pub fn differential(&self) -> &[Vector] {
        &self.differential
    }

    pub fn apply_d(&self, v: &Vector) -> Vector {
        let mut acc = BTreeMap::new();
        for (j, x) in v.iter() {
            for (i, y) in self.differential[*j].iter() {
                super::sparse::accumulate(&mut acc, *i, &(x * y));
            }
        }
        Vector::from_map(acc)
    }

    /// Indices of basis elements in degree `m`.
    pub fn indices_in_degree(&self, m: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == m).collect()
    }

    pub fn dim_in_degree(&self, m: i32) -> usize {
        self.degrees.iter().filter(|&&d| d == m).count()
    }

    /// Smallest and largest degree carrying a basis element.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let lo = *self.degrees.iter().min()?;
        let hi = *self.degrees.iter().max()?;
        Some((lo, hi))
    }

    /// `d∘d = 0`, checked on every basis element; returns the first offender.
    pub fn check_d_squared(&self) -> std::result::Result<(), usize> {
        for j in 0..self.dim() {
            if let Some((lo, hi)) = self.window {
                if self.degrees[j] + 1 >= hi || self.degrees[j] < lo {
                    continue;
                }
            }
            if !self.apply_d(&self.differential[j]).is_zero() {
                return Err(j);
            }
        }
        Ok(())
    }

    fn require_window(&self, m: i32) -> Result<()> {
        if let Some((lo, hi)) = self.window {
            if m - 1 < lo || m + 1 > hi {
                return Err(Error::WindowInsufficient { degree: m, lo: lo + 1, hi: hi - 1 });
            }
        }
        Ok(())
    }

    /// Matrix of `d^m` in local coordinates (columns: degree `m`, rows: degree `m+1`).
    fn local_d(&self, m: i32) -> (Vec<usize>, Vec<Vector>) {
        let src = self.indices_in_degree(m);
        let tgt = self.indices_in_degree(m + 1);
        let pos: BTreeMap<usize, usize> = tgt.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let cols = src
            .iter()
            .map(|&j| self.differential[j].filter_map_index(|i| pos.get(&i).copied()))
            .collect();
        (src, cols)
    }

    /// `dim H^m`, by ranks only.
    pub fn betti(&self, m: i32) -> Result<usize> {
        self.require_window(m)?;
        let (src, cols) = self.local_d(m);
        let (_, prev) = self.local_d(m - 1);
        Ok(src.len() - rank(&cols) - rank(&prev))
    }

    /// `H^m` with representatives expressed in the global basis.
    pub fn cohomology(&self, m: i32) -> Result<Cohomology> {
        self.require_window(m)?;
        let (src, cols) = self.local_d(m);
        let (_, prev) = self.local_d(m - 1);
        let cycles = kernel(&cols, self.field);
        let mut boundaries = Echelon::new();
        for b in &prev {
            boundaries.insert(b);
        }
        let mut reps = Vec::new();
        for z in cycles {
            if boundaries.insert(&z) {
                reps.push(z.reindex(|k| src[k]));
            }
        }
        Ok(Cohomology { degree: m, dim: reps.len(), representatives: reps })
    }

    /// Whether `v` (homogeneous of degree `m`) is a coboundary.
    pub fn is_coboundary(&self, v: &Vector, m: i32) -> bool {
        let prev: Vec<Vector> = self.indices_in_degree(m - 1).iter().map(|&j| self.differential[j].clone()).collect();
        solve(&prev, v, self.field).is_some()
    }

    /// Some `u` of degree `m-1` with `du = v`.
    pub fn primitive(&self, v: &Vector, m: i32) -> Option<Vector> {
        let idx = self.indices_in_degree(m - 1);
        let cols: Vec<Vector> = idx.iter().map(|&j| self.differential[j].clone()).collect();
        solve(&cols, v, self.field).map(|x| x.reindex(|k| idx[k]))
    }

    /// Acyclic in every degree of `lo..=hi`.
    pub fn is_acyclic_on(&self, lo: i32, hi: i32) -> Result<bool> {
        for m in lo..=hi {
            if self.betti(m)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Acyclic in all degrees (finite, unwindowed complexes).
    pub fn is_acyclic(&self) -> bool {
        match self.degree_range() {
            None => true,
            Some((lo, hi)) => (lo..=hi).all(|m| self.betti(m).map_or(false, |b| b == 0)),
        }
    }

    /// Reorders the basis: new element `k` is old element `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Complex {
        let mut inv = vec![0; perm.len()];
        for (k, &o) in perm.iter().enumerate() {
            inv[o] = k;
        }
        Complex::from_parts(
            self.field,
            perm.iter().map(|&o| self.labels[o].clone()).collect(),
            perm.iter().map(|&o| self.degrees[o]).collect(),
            perm.iter().map(|&o| self.differential[o].reindex(|i| inv[i])).collect(),
            self.window,
        )
    }

    /// `C[n]`: degrees drop by `n`, the differential is multiplied by `(-1)^n`.
    pub fn shift(&self, n: i32) -> Complex {
        let s = self.field.sign(n as i64);
        Complex::from_parts(
            self.field,
            self.labels.clone(),
            self.degrees.iter().map(|d| d - n).collect(),
            self.differential.iter().map(|v| v.scale(&s)).collect(),
            self.window.map(|(lo, hi)| (lo - n, hi - n)),
        )
    }

    /// Direct sum; the basis of `other` follows that of `self`.
    pub fn direct_sum(&self, other: &Complex) -> Result<Complex> {
        same_field(self, other)?;
        let off = self.dim();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut degrees = self.degrees.clone();
        degrees.extend(other.degrees.iter().copied());
        let mut d = self.differential.clone();
        d.extend(other.differential.iter().map(|v| v.reindex(|i| i + off)));
        Ok(Complex::from_parts(self.field, labels, degrees, d, None))
    }

    /// `self ⊗ other` with `d(a⊗b) = da⊗b + (-1)^{|a|} a⊗db`; basis index `i*dim(other)+j`.
    pub fn tensor(&self, other: &Complex) -> Result<Complex> {
        same_field(self, other)?;
        let n2 = other.dim();
        let mut labels = Vec::with_capacity(self.dim() * n2);
        let mut degrees = Vec::with_capacity(self.dim() * n2);
        let mut d = Vec::with_capacity(self.dim() * n2);
        for i in 0..self.dim() {
            let s = self.field.sign(self.degrees[i] as i64);
            for j in 0..n2 {
                labels.push(format!("{}⊗{}", self.labels[i], other.labels[j]));
                degrees.push(self.degrees[i] + other.degrees[j]);
                let mut entries: Vec<(usize, Scalar)> = Vec::new();
                for (k, c) in self.differential[i].iter() {
                    entries.push((k * n2 + j, c.clone()));
                }
                for (k, c) in other.differential[j].iter() {
                    entries.push((i * n2 + k, &s * c));
                }
                d.push(Vector::from_entries(entries));
            }
        }
        Ok(Complex::from_parts(self.field, labels, degrees, d, None))
    }

    /// The Hom complex `Hom(self, other)`. Basis element `a*dim(other)+b`
    /// sends `e_a` to `e_b` and has degree `|b| - |a|`;
    /// `dφ = d∘φ - (-1)^{|φ|} φ∘d`.
    pub fn hom(&self, other: &Complex) -> Result<Complex> {
        same_field(self, other)?;
        let n2 = other.dim();
        // incoming[a] = list of (a', c) with d(e_{a'}) having coefficient c on e_a
        let mut incoming: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.dim()];
        for (ap, col) in self.differential.iter().enumerate() {
            for (a, c) in col.iter() {
                incoming[*a].push((ap, c.clone()));
            }
        }
        let mut labels = Vec::with_capacity(self.dim() * n2);
        let mut degrees = Vec::with_capacity(self.dim() * n2);
        let mut d = Vec::with_capacity(self.dim() * n2);
        for a in 0..self.dim() {
            for b in 0..n2 {
                let deg = other.degrees[b] - self.degrees[a];
                labels.push(format!("[{}→{}]", self.labels[a], other.labels[b]));
                degrees.push(deg);
                let s = -self.field.sign(deg as i64);
                let mut entries: Vec<(usize, Scalar)> = Vec::new();
                for (bp, c) in other.differential[b].iter() {
                    entries.push((a * n2 + bp, c.clone()));
                }
                for (ap, c) in &incoming[a] {
                    entries.push((ap * n2 + b, &s * c));
                }
                d.push(Vector::from_entries(entries));
            }
        }
        Ok(Complex::from_parts(self.field, labels, degrees, d, None))
    }

    /// The quotient by a `d`-stable span of homogeneous vectors. The quotient
    /// basis is the set of standard basis vectors that are not pivots of the
    /// reduced relations. Returns the quotient and the projection map.
    pub fn quotient(&self, relations: &[Vector]) -> (Complex, LinearMap) {
        let (q, proj, _) = self.quotient_with_basis(relations);
        (q, proj)
    }

    /// As [`Complex::quotient`], also returning the kept standard basis indices.
    pub fn quotient_with_basis(&self, relations: &[Vector]) -> (Complex, LinearMap, Vec<usize>) {
        let mut ech = Echelon::new();
        for r in relations {
            ech.insert(r);
        }
        let kept: Vec<usize> = (0..self.dim()).filter(|&i| !ech.is_pivot(i)).collect();
        let pos: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let project = |v: &Vector| -> Vector {
            let (rem, _) = ech.reduce(v);
            rem.filter_map_index(|i| pos.get(&i).copied())
        };
        let d = kept.iter().map(|&i| project(&self.differential[i])).collect();
        let q = Complex::from_parts(
            self.field,
            kept.iter().map(|&i| self.labels[i].clone()).collect(),
            kept.iter().map(|&i| self.degrees[i]).collect(),
            d,
            self.window,
        );
        let proj = LinearMap {
            source_dim: self.dim(),
            target_dim: kept.len(),
            degree: 0,
            columns: (0..self.dim()).map(|i| project(&Vector::unit(i, self.field))).collect(),
        };
        (q, proj, kept)
    }

    /// The subcomplex spanned by homogeneous vectors `generators` (must be
    /// `d`-stable and independent). Returns it with its inclusion map.
    pub fn subcomplex(&self, generators: &[(Vector, i32)]) -> Result<(Complex, LinearMap)> {
        let mut ech = Echelon::tracking();
        for (k, (g, _)) in generators.iter().enumerate() {
            if let Insert::Dependent(_) = ech.insert_tagged(g, Vector::unit(k, self.field)) {
                return Err(Error::Invalid("subcomplex generators are dependent".into()));
            }
        }
        let mut d = Vec::with_capacity(generators.len());
        for (g, _) in generators {
            let dg = self.apply_d(g);
            let e = ech
                .express(&dg)
                .ok_or_else(|| Error::Invalid("subcomplex is not d-stable".into()))?;
            d.push(e);
        }
        let sub = Complex::from_parts(
            self.field,
            (0..generators.len()).map(|k| format!("s{k}")).collect(),
            generators.iter().map(|(_, m)| *m).collect(),
            d,
            self.window,
        );
        let incl = LinearMap {
            source_dim: generators.len(),
            target_dim: self.dim(),
            degree: 0,
            columns: generators.iter().map(|(g, _)| g.clone()).collect(),
        };
        Ok((sub, incl))
    }

    /// `v` as a combination of basis labels, e.g. `f + -1·g`.
    pub fn format_vector(&self, v: &Vector) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let one = self.field.one();
        v.iter()
            .map(|(i, c)| if *c == one { self.labels[*i].clone() } else { format!("{c}·{}", self.labels[*i]) })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Keeps only basis elements with `keep(i)`; the kept span must be a subcomplex.
    pub fn restrict_basis(&self, keep: impl Fn(usize) -> bool) -> (Complex, Vec<usize>) {
        let kept: Vec<usize> = (0..self.dim()).filter(|&i| keep(i)).collect();
        let pos: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let c = Complex::from_parts(
            self.field,
            kept.iter().map(|&i| self.labels[i].clone()).collect(),
            kept.iter().map(|&i| self.degrees[i]).collect(),
            kept.iter().map(|&i| self.differential[i].filter_map_index(|r| pos.get(&r).copied())).collect(),
            self.window,
        );
        (c, kept)
    }
}

fn same_field(a: &Complex, b: &Complex) -> Result<()> {
    if a.field != b.field {
        return Err(Error::FieldMismatch(a.field.spec(), b.field.spec()));
    }
    Ok(())
}

/// A homogeneous linear map between bases, column `j` the image of `e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub source_dim: usize,
    pub target_dim: usize,
    pub degree: i32,
    pub columns: Vec<Vector>,
}

impl LinearMap {
    pub fn zero(source_dim: usize, target_dim: usize, degree: i32) -> Self {
        LinearMap { source_dim, target_dim, degree, columns: vec![Vector::zero(); source_dim] }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        LinearMap { source_dim: n, target_dim: n, degree: 0, columns: (0..n).map(|i| Vector::unit(i, field)).collect() }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut acc = BTreeMap::new();
        for (j, x) in v.iter() {
            for (i, y) in self.columns[*j].iter() {
                super::sparse::accumulate(&mut acc, *i, &(x * y));
            }
        }
        Vector::from_map(acc)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            source_dim: other.source_dim,
            target_dim: self.target_dim,
            degree: self.degree + other.degree,
            columns: other.columns.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn sub(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.sub(b)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &Scalar) -> LinearMap {
        LinearMap { columns: self.columns.iter().map(|v| v.scale(c)).collect(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vector::is_zero)
    }

    /// As an element of `Hom(source, target)` in the basis of [`Complex::hom`].
    pub fn to_hom_vector(&self) -> Vector {
        let n2 = self.target_dim;
        Vector::from_entries(
            self.columns
                .iter()
                .enumerate()
                .flat_map(|(a, col)| col.iter().map(move |(b, c)| (a * n2 + b, c.clone()))),
        )
    }

    pub fn from_hom_vector(v: &Vector, source_dim: usize, target_dim: usize, degree: i32) -> LinearMap {
        let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); source_dim];
        for (k, c) in v.iter() {
            cols[k / target_dim].push((k % target_dim, c.clone()));
        }
        LinearMap { source_dim, target_dim, degree, columns: cols.into_iter().map(Vector::from_entries).collect() }
    }
}

/// A degree-0 map of complexes commuting with the differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    map: LinearMap,
}

/// A degree −1 map `h` with `f − g = dh + hd`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    pub map: LinearMap,
}

/// Witness that a chain map is a homotopy equivalence: `inverse` with
/// `f∘inverse − 1 = d(h_target)` and `inverse∘f − 1 = d(h_source)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyInverse {
    pub inverse: LinearMap,
    pub target_homotopy: LinearMap,
    pub source_homotopy: LinearMap,
}

impl ChainMap {
    pub fn new(source: Complex, target: Complex, map: LinearMap) -> Result<Self> {
        if source.field != target.field {
            return Err(Error::FieldMismatch(source.field.spec(), target.field.spec()));
        }
        if map.source_dim != source.dim() || map.target_dim != target.dim() || map.degree != 0 {
            return Err(Error::DegreeMismatch("chain map shape".into()));
        }
        for (j, col) in map.columns.iter().enumerate() {
            for (i, _) in col.iter() {
                if target.degrees[*i] != source.degrees[j] {
                    return Err(Error::DegreeMismatch(format!("f({}) is not homogeneous of degree 0", source.labels[j])));
                }
            }
        }
        let cm = ChainMap { source, target, map };
        if !cm.is_closed() {
            return Err(Error::NotClosed("f∘d ≠ d∘f".into()));
        }
        Ok(cm)
    }

    pub fn identity(c: &Complex) -> ChainMap {
        ChainMap { source: c.clone(), target: c.clone(), map: LinearMap::identity(c.dim(), c.field) }
    }

    pub fn zero(source: &Complex, target: &Complex) -> ChainMap {
        ChainMap { source: source.clone(), target: target.clone(), map: LinearMap::zero(source.dim(), target.dim(), 0) }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    fn is_closed(&self) -> bool {
        (0..self.source.dim()).all(|j| {
            let a = self.target.apply_d(&self.map.columns[j]);
            let b = self.map.apply(&self.source.differential[j]);
            a == b
        })
    }

    pub fn compose(&self, other: &ChainMap) -> Result<ChainMap> {
        if other.target.dim() != self.source.dim() {
            return Err(Error::Invalid("chain maps are not composable".into()));
        }
        Ok(ChainMap { source: other.source.clone(), target: self.target.clone(), map: self.map.compose(&other.map) })
    }

    /// `Cone(f) = target ⊕ source[1]` with `d(y, x) = (dy + f x, −dx)`.
    pub fn cone(&self) -> Complex {
        let f = self.source.field;
        let nt = self.target.dim();
        let mut labels: Vec<String> = self.target.labels.iter().map(|l| format!("t:{l}")).collect();
        labels.extend(self.source.labels.iter().map(|l| format!("s:{l}")));
        let mut degrees = self.target.degrees.clone();
        degrees.extend(self.source.degrees.iter().map(|d| d - 1));
        let mut d = self.target.differential.clone();
        let minus = f.from_i64(-1);
        for j in 0..self.source.dim() {
            let own = self.source.differential[j].scale(&minus).reindex(|i| i + nt);
            d.push(own.add(&self.map.columns[j]));
        }
        Complex::from_parts(f, labels, degrees, d, None)
    }

    /// Induced map on `H^m`, as its rank.
    pub fn rank_on_cohomology(&self, m: i32) -> Result<usize> {
        let hs = self.source.cohomology(m)?;
        let mut ech = Echelon::new();
        for j in self.target.indices_in_degree(m - 1) {
            ech.insert(&self.target.differential[j]);
        }
        let base = ech.rank();
        for z in &hs.representatives {
            ech.insert(&self.map.apply(z));
        }
        Ok(ech.rank() - base)
    }

    pub fn is_quasi_isomorphism_on(&self, lo: i32, hi: i32) -> Result<bool> {
        for m in lo..=hi {
            let r = self.rank_on_cohomology(m)?;
            if r != self.source.betti(m)? || r != self.target.betti(m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `h` of degree −1 with `dh + hd = f`, when one exists.
    pub fn solve_homotopy(&self) -> Option<Homotopy> {
        solve_null_homotopy(&self.source, &self.target, &self.map)
    }

    /// A homotopy inverse together with both homotopies, when `f` is a homotopy equivalence.
    pub fn homotopy_inverse(&self) -> Option<HomotopyInverse> {
        homotopy_inverse(&self.source, &self.target, &self.map)
    }
}

/// Solves `dh + hd = f` for a degree-0 map `f: source → target`.
pub fn solve_null_homotopy(source: &Complex, target: &Complex, f: &LinearMap) -> Option<Homotopy> {
    let hom = source.hom(target).ok()?;
    let idx = hom.indices_in_degree(-1);
    let cols: Vec<Vector> = idx.iter().map(|&j| hom.d(j).clone()).collect();
    let x = solve(&cols, &f.to_hom_vector(), source.field)?;
    let h = x.reindex(|k| idx[k]);
    Some(Homotopy { map: LinearMap::from_hom_vector(&h, source.dim(), target.dim(), -1) })
}

fn homotopy_inverse(source: &Complex, target: &Complex, f: &LinearMap) -> Option<HomotopyInverse> {
    let field = source.field;
    let back = target.hom(source).ok()?; // Hom(T, S)
    let end_t = target.hom(target).ok()?;
    let end_s = source.hom(source).ok()?;
    let g_idx = back.indices_in_degree(0);
    let ht_idx = end_t.indices_in_degree(-1);
    let hs_idx = end_s.indices_in_degree(-1);
    // Unknowns: g ∈ Hom(T,S)^0, h_t ∈ End(T)^{-1}, h_s ∈ End(S)^{-1}.
    // Equations stacked: [d g ; f∘g − d h_t ; g∘f − d h_s] = [0 ; 1_T ; 1_S].
    let n_back = back.dim();
    let n_t = end_t.dim();
    let (ns, nt) = (source.dim(), target.dim());
    let off_t = n_back;
    let off_s = n_back + n_t;
    let minus = field.from_i64(-1);
    let mut cols = Vec::new();
    for &j in &g_idx {
        let dg = back.d(j).clone();
        let g = LinearMap::from_hom_vector(&Vector::unit(j, field), nt, ns, 0);
        let fg = f.compose(&g).to_hom_vector().reindex(|i| i + off_t);
        let gf = g.compose(f).to_hom_vector().reindex(|i| i + off_s);
        cols.push(dg.add(&fg).add(&gf));
    }
    for &j in &ht_idx {
        cols.push(end_t.d(j).scale(&minus).reindex(|i| i + off_t));
    }
    for &j in &hs_idx {
        cols.push(end_s.d(j).scale(&minus).reindex(|i| i + off_s));
    }
    let rhs = LinearMap::identity(nt, field)
        .to_hom_vector()
        .reindex(|i| i + off_t)
        .add(&LinearMap::identity(ns, field).to_hom_vector().reindex(|i| i + off_s));
    let x = solve(&cols, &rhs, field)?;
    let (ng, nht) = (g_idx.len(), ht_idx.len());
    let pick = |lo: usize, hi: usize, idx: &[usize]| -> Vector {
        x.filter_map_index(|k| (k >= lo && k < hi).then(|| idx[k - lo]))
    };
    let g = pick(0, ng, &g_idx);
    let ht = pick(ng, ng + nht, &ht_idx);
    let hs = pick(ng + nht, cols.len(), &hs_idx);
    Some(HomotopyInverse {
        inverse: LinearMap::from_hom_vector(&g, nt, ns, 0),
        target_homotopy: LinearMap::from_hom_vector(&ht, nt, nt, -1),
        source_homotopy: LinearMap::from_hom_vector(&hs, ns, ns, -1),
    })
}

/// Serializable cohomology dimensions of a finite complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable(pub BTreeMap<i32, usize>);

impl Complex {
    pub fn betti_table(&self, lo: i32, hi: i32) -> Result<BettiTable> {
        let mut t = BTreeMap::new();
        for m in lo..=hi {
            t.insert(m, self.betti(m)?);
        }
        Ok(BettiTable(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn two_term_identity() -> Complex {
        // k --id--> k in degrees 0, 1
        Complex::new(q(), vec![("a".into(), 0), ("b".into(), 1)], vec![Vector::unit(1, q()), Vector::zero()]).unwrap()
    }

    #[test]
    fn zero_complex_has_no_cohomology() {
        let z = Complex::zero(q());
        assert_eq!(z.betti(0).unwrap(), 0);
        assert_eq!(z.betti(-7).unwrap(), 0);
    }

    #[test]
    fn exact_two_term_complex() {
        let c = two_term_identity();
        assert_eq!(c.betti(0).unwrap(), 0);
        assert_eq!(c.betti(1).unwrap(), 0);
        assert!(c.check_d_squared().is_ok());
    }

    #[test]
    fn wrong_degree_differential_is_rejected() {
        let bad = Complex::new(q(), vec![("a".into(), 0), ("b".into(), 2)], vec![Vector::unit(1, q()), Vector::zero()]);
        assert!(matches!(bad, Err(Error::DegreeMismatch(_))));
    }

    #[test]
    fn windowed_cohomology_refuses_edges() {
        let c = Complex::ground(q(), 0).with_window(-1, 1);
        assert_eq!(c.betti(0).unwrap(), 1);
        assert!(matches!(c.betti(1), Err(Error::WindowInsufficient { .. })));
    }

    #[test]
    fn cone_of_identity_is_contractible() {
        let k = Complex::ground(q(), 0);
        let cone = ChainMap::identity(&k).cone();
        assert!(cone.is_acyclic());
        let id = ChainMap::identity(&cone);
        assert!(id.solve_homotopy().is_some());
    }

    #[test]
    fn cone_of_zero_map_is_direct_sum() {
        let k = Complex::ground(q(), 0);
        let cone = ChainMap::zero(&k, &k).cone();
        assert_eq!(cone.betti(0).unwrap(), 1);
        assert_eq!(cone.betti(-1).unwrap(), 1);
    }

    #[test]
    fn identity_on_ground_is_not_null_homotopic() {
        let k = Complex::ground(q(), 0);
        assert!(ChainMap::identity(&k).solve_homotopy().is_none());
        let c = two_term_identity();
        let h = ChainMap::identity(&c).solve_homotopy().unwrap();
        // dh + hd = id
        let d = LinearMap { source_dim: 2, target_dim: 2, degree: 1, columns: c.differential().to_vec() };
        let lhs = d.compose(&h.map);
        let rhs = h.map.compose(&d);
        let sum = LinearMap { columns: lhs.columns.iter().zip(&rhs.columns).map(|(a, b)| a.add(b)).collect(), ..lhs };
        assert_eq!(sum.columns, LinearMap::identity(2, q()).columns);
    }

    #[test]
    fn shift_by_zero_is_identity_and_shift_moves_degrees() {
        let c = two_term_identity();
        assert_eq!(c.shift(0), c);
        let s = c.shift(1);
        assert_eq!(s.degrees(), &[-1, 0]);
        assert_eq!(s.d(0), &Vector::unit(1, q()).scale(&q().from_i64(-1)));
        assert_eq!(s.shift(-1), c);
    }

    #[test]
    fn tensor_with_ground_is_isomorphic() {
        let c = two_term_identity();
        let t = c.tensor(&Complex::ground(q(), 0)).unwrap();
        assert_eq!(t.degrees(), c.degrees());
        assert_eq!(t.differential(), c.differential());
    }

    #[test]
    fn quotient_by_subcomplex() {
        let c = two_term_identity();
        // subcomplex spanned by b (degree 1)
        let (qc, proj) = c.quotient(&[Vector::unit(1, q())]);
        assert_eq!(qc.dim(), 1);
        assert_eq!(qc.betti(0).unwrap(), 1);
        assert_eq!(proj.columns[1], Vector::zero());
    }

    #[test]
    fn homotopy_inverse_of_quasi_isomorphism() {
        // Inclusion k → (k ⊕ (k→k)) in degree 0
        let big = Complex::new(
            q(),
            vec![("x".into(), 0), ("a".into(), 0), ("b".into(), 1)],
            vec![Vector::zero(), Vector::unit(2, q()), Vector::zero()],
        )
        .unwrap();
        let k = Complex::ground(q(), 0);
        let f = ChainMap::new(k.clone(), big.clone(), LinearMap { source_dim: 1, target_dim: 3, degree: 0, columns: vec![Vector::unit(0, q())] }).unwrap();
        assert!(f.cone().is_acyclic());
        let w = f.homotopy_inverse().unwrap();
        assert_eq!(w.inverse.compose(f.map()).columns, LinearMap::identity(1, q()).columns);
        let z = ChainMap::zero(&k, &big);
        assert!(z.homotopy_inverse().is_none());
    }
}
